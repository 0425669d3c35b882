use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitset::NodeSet;
use crate::error::{domain, Error, Result};

/// The abstract coupon process: `s` coupons spread over `n` bins, each
/// coupon in at least `ell` bins, at most one copy per bin.
#[derive(Clone, Debug, PartialEq)]
pub struct CouponState {
    n_bins: usize,
    s_coupons: usize,
    cap: usize,
    bins: Vec<Vec<u32>>,
}

impl CouponState {
    /// Places every coupon in `ell` distinct bins: the first `ell` entries of
    /// a uniformly random permutation of the bins.
    pub fn random<R: Rng + ?Sized>(
        n_bins: usize,
        s_coupons: usize,
        ell: usize,
        cap: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if ell > n_bins {
            return Err(domain(format!("ell = {ell} exceeds the {n_bins} bins")));
        }
        let mut bins = vec![Vec::new(); n_bins];
        let mut order: Vec<usize> = (0..n_bins).collect();
        for x in 0..s_coupons {
            order.shuffle(rng);
            for &b in &order[..ell] {
                bins[b].push(x as u32);
            }
        }
        Self::from_bins(s_coupons, cap, bins)
    }

    pub fn from_bins(s_coupons: usize, cap: usize, mut bins: Vec<Vec<u32>>) -> Result<Self> {
        if bins.is_empty() || s_coupons == 0 || cap == 0 {
            return Err(domain("need at least one bin, one coupon and capacity 1"));
        }
        for bin in &mut bins {
            bin.sort_unstable();
            if bin.windows(2).any(|w| w[0] == w[1]) {
                return Err(domain("a bin holds two copies of one coupon"));
            }
            if bin.last().is_some_and(|&x| x as usize >= s_coupons) {
                return Err(domain("coupon id out of range"));
            }
        }
        Ok(CouponState {
            n_bins: bins.len(),
            s_coupons,
            cap,
            bins,
        })
    }

    pub fn bins(&self) -> &[Vec<u32>] {
        &self.bins
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Copies of each coupon.
    pub fn copies(&self) -> Vec<usize> {
        let mut c = vec![0; self.s_coupons];
        for bin in &self.bins {
            for &x in bin {
                c[x as usize] += 1;
            }
        }
        c
    }

    /// The smallest number of copies of any coupon.
    pub fn ell(&self) -> usize {
        self.copies().into_iter().min().unwrap_or(0)
    }
}

/// Exact probability that one step collects coupon `x`.
pub fn collection_probability(state: &CouponState, x: u32) -> f64 {
    let per_bin: f64 = state
        .bins
        .iter()
        .filter(|b| b.contains(&x))
        .map(|b| state.cap.min(b.len()) as f64 / b.len() as f64)
        .sum();
    0.5 * per_bin / state.n_bins as f64
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce5_e9b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs the process until every coupon is collected; returns the steps.
///
/// Each step picks a uniform bin and opens it with probability 1/2; an open
/// bin yields `min(cap, |bin|)` of its coupons, the ones ranking first under
/// a fresh random order. The random draws per step do not depend on bin
/// contents or `cap`, so runs with the same stream are coupled: raising the
/// capacity never increases the step count.
pub fn coupon_collection_run<R: Rng + ?Sized>(state: &CouponState, rng: &mut R) -> Result<u64> {
    if let Some(x) = state.copies().iter().position(|&c| c == 0) {
        return Err(Error::UnreachableCoupon(x));
    }
    let mut collected = NodeSet::new(state.s_coupons);
    let mut keyed: Vec<(u64, u32)> = Vec::new();
    let mut steps = 0u64;
    while !collected.is_full() {
        steps += 1;
        let b = rng.random_range(0..state.n_bins);
        let open = rng.random_bool(0.5);
        let key = rng.random::<u64>();
        if !open {
            continue;
        }
        let bin = &state.bins[b];
        if bin.len() <= state.cap {
            for &x in bin {
                collected.insert(x as usize);
            }
        } else {
            keyed.clear();
            keyed.extend(bin.iter().map(|&x| {
                (
                    mix(key ^ u64::from(x).wrapping_mul(0xd6e8_feb8_6659_fd93)),
                    x,
                )
            }));
            keyed.select_nth_unstable(state.cap - 1);
            for &(_, x) in &keyed[..state.cap] {
                collected.insert(x as usize);
            }
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    #[test]
    fn placement_respects_ell() {
        let mut rng = seeded_rng(1, "c");
        let st = CouponState::random(16, 20, 4, 2, &mut rng).unwrap();
        assert!(st.copies().iter().all(|&c| c == 4));
        assert_eq!(st.ell(), 4);
        assert!(CouponState::random(4, 2, 5, 1, &mut rng).is_err());
        assert!(CouponState::from_bins(2, 1, vec![vec![0, 0]]).is_err());
    }

    #[test]
    fn unplaced_coupon_is_an_error() {
        let st = CouponState::from_bins(2, 1, vec![vec![0]]).unwrap();
        let mut rng = seeded_rng(1, "c");
        assert!(matches!(
            coupon_collection_run(&st, &mut rng),
            Err(Error::UnreachableCoupon(1))
        ));
    }

    #[test]
    fn single_bin_single_coupon_is_geometric() {
        let st = CouponState::from_bins(1, 1, vec![vec![0]]).unwrap();
        let mut rng = seeded_rng(2, "c");
        let trials = 10_000;
        let total: u64 = (0..trials)
            .map(|_| coupon_collection_run(&st, &mut rng).unwrap())
            .sum();
        let mean = total as f64 / trials as f64;
        assert!((1.9..=2.1).contains(&mean), "{mean}");
    }

    #[test]
    fn full_bins_finish_on_first_open() {
        let st = CouponState::from_bins(3, 3, vec![vec![0, 1, 2]; 4]).unwrap();
        let mut rng = seeded_rng(3, "c");
        let trials = 10_000;
        let total: u64 = (0..trials)
            .map(|_| coupon_collection_run(&st, &mut rng).unwrap())
            .sum();
        let mean = total as f64 / trials as f64;
        assert!((1.9..=2.1).contains(&mean), "{mean}");
    }

    #[test]
    fn capacity_coupling_is_monotone() {
        let mut rng = seeded_rng(4, "place");
        let small = CouponState::random(16, 16, 2, 1, &mut rng).unwrap();
        let large = CouponState::from_bins(16, 4, small.bins().to_vec()).unwrap();
        for t in 0..50 {
            let a = coupon_collection_run(&small, &mut seeded_rng(t, "run")).unwrap();
            let b = coupon_collection_run(&large, &mut seeded_rng(t, "run")).unwrap();
            assert!(b <= a);
        }
    }
}
