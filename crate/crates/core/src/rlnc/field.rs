use crate::error::{domain, Result};

/// The prime field `F_q`, elements stored as `u32` in `[0, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Field {
    q: u32,
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2
            || (2..)
                .take_while(|d| d * d <= q)
                .any(|d| q.is_multiple_of(d))
        {
            return Err(domain(format!("field order {q} is not prime")));
        }
        Ok(Field { q })
    }

    pub fn order(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.q) {
            return Err(domain("zero has no inverse"));
        }
        // Extended Euclid.
        let (mut r0, mut r1) = (self.q as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let k = r0 / r1;
            (r0, r1) = (r1, r0 - k * r1);
            (t0, t1) = (t1, t0 - k * t1);
        }
        Ok(t0.rem_euclid(self.q as i64) as u32)
    }

    /// `acc += k * x`, element-wise.
    #[inline]
    pub fn axpy(self, acc: &mut [u32], k: u32, x: &[u32]) {
        if k == 0 {
            return;
        }
        for (a, &b) in acc.iter_mut().zip(x) {
            *a = self.add(*a, self.mul(k, b));
        }
    }

    pub fn dot(self, a: &[u32], b: &[u32]) -> u32 {
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let f = Field::new(257).unwrap();
        assert_eq!(f.add(200, 100), 43);
        assert_eq!(f.inv(2).unwrap(), 129);
        assert!(f.inv(0).is_err());
        for x in [0, 1, 5, 256] {
            assert_eq!(f.mul(1, x), x);
        }
        assert!(Field::new(256).is_err());
        assert!(Field::new(1).is_err());
        assert!(Field::new(2).is_ok());
    }

    #[test]
    fn every_nonzero_element_is_invertible() {
        for q in [2, 3, 5, 7, 257] {
            let f = Field::new(q).unwrap();
            for a in 1..q {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }
}
