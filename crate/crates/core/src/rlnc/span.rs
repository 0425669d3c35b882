use rand::Rng;

use super::Field;
use crate::error::{Error, Result};

/// A coefficient vector over the `s` messages and the matching payload.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodedPacket {
    pub mu: Vec<u32>,
    pub m: Vec<u32>,
}

impl CodedPacket {
    pub fn zero(s: usize, l: usize) -> Self {
        CodedPacket {
            mu: vec![0; s],
            m: vec![0; l],
        }
    }

    /// The packet `(e_i, payload)` a source starts with.
    pub fn unit(s: usize, i: usize, payload: Vec<u32>) -> Self {
        let mut mu = vec![0; s];
        mu[i] = 1;
        CodedPacket { mu, m: payload }
    }

    pub fn is_zero(&self) -> bool {
        self.mu.iter().all(|&x| x == 0) && self.m.iter().all(|&x| x == 0)
    }

    /// Whether the payload is the combination `mu` of `messages`.
    pub fn is_consistent(&self, field: Field, messages: &[Vec<u32>]) -> bool {
        let mut expect = vec![0; self.m.len()];
        for (k, msg) in self.mu.iter().zip(messages) {
            field.axpy(&mut expect, *k, msg);
        }
        expect == self.m
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    Messages(Vec<Vec<u32>>),
    Incomplete,
}

/// Everything a node can compute from the packets it received: a basis in
/// reduced row-echelon form over the coefficient part, rows stored as
/// `[mu | m]` and kept sorted by pivot column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanState {
    field: Field,
    s: usize,
    l: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl SpanState {
    pub fn new(field: Field, s: usize, l: usize) -> Self {
        SpanState {
            field,
            s,
            l,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.s, self.l)
    }

    pub fn basis(&self) -> impl Iterator<Item = CodedPacket> + '_ {
        self.rows.iter().map(|r| CodedPacket {
            mu: r[..self.s].to_vec(),
            m: r[self.s..].to_vec(),
        })
    }

    /// Adds `pkt` to the span. Returns whether the rank grew.
    pub fn insert(&mut self, pkt: &CodedPacket) -> Result<bool> {
        if pkt.mu.len() != self.s || pkt.m.len() != self.l {
            return Err(Error::DimensionMismatch {
                expected: self.s + self.l,
                found: pkt.mu.len() + pkt.m.len(),
            });
        }
        if self.rows.len() == self.s {
            return Ok(false);
        }
        let f = self.field;
        let mut v: Vec<u32> = pkt.mu.iter().chain(&pkt.m).copied().collect();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let k = v[p];
            if k != 0 {
                f.axpy(&mut v, f.neg(k), row);
            }
        }
        let Some(p) = v[..self.s].iter().position(|&x| x != 0) else {
            return Ok(false);
        };
        let inv = f.inv(v[p])?;
        for x in &mut v {
            *x = f.mul(*x, inv);
        }
        for row in &mut self.rows {
            let k = row[p];
            if k != 0 {
                f.axpy(row, f.neg(k), &v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        Ok(true)
    }

    /// A uniformly random element of the span: an independent uniform
    /// coefficient for every basis row.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CodedPacket {
        let f = self.field;
        let mut v = vec![0u32; self.s + self.l];
        for row in &self.rows {
            let k = rng.random_range(0..f.order());
            f.axpy(&mut v, k, row);
        }
        let m = v.split_off(self.s);
        CodedPacket { mu: v, m }
    }

    /// Whether `mu` is not orthogonal to the coefficient space.
    pub fn knows_about(&self, mu: &[u32]) -> bool {
        self.rows
            .iter()
            .any(|r| self.field.dot(&r[..self.s], mu) != 0)
    }

    pub fn decode(&self) -> Decoded {
        if self.rows.len() < self.s {
            return Decoded::Incomplete;
        }
        // Full rank in reduced form: the coefficient part is the identity.
        Decoded::Messages(self.rows.iter().map(|r| r[self.s..].to_vec()).collect())
    }
}
