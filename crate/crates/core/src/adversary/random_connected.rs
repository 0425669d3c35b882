use std::sync::Arc;

use rand::Rng;

use super::tree::random_spanning_tree;
use super::AdversaryPolicy;
use crate::engine::HistoryView;
use crate::error::{domain, Result};
use crate::graph::RoundGraph;
use crate::primitives::Horizon;
use crate::rng::seeded_rng;

/// Benign baseline: uniformly random spanning trees plus independent
/// per-round extra edges with probability `extra_edge_p`.
///
/// A fresh backbone tree starts every `T` rounds and stays for `2T - 1`
/// rounds, so any `T` consecutive rounds share one whole tree. With `T = 1`
/// every round is a fresh tree; with `T = inf` one tree stays forever. The
/// graph of round `r` depends only on `(seed, r)`, so the schedule is fixed
/// before the run and never looks at the algorithm.
#[derive(Clone, Debug)]
pub struct RandomConnected {
    n: usize,
    period: Horizon,
    extra_edge_p: f64,
    seed: u64,
    declared_tau: Horizon,
    trees: Vec<(u64, Arc<RoundGraph>)>,
    backbone: Option<((u64, bool), Arc<RoundGraph>)>,
}

impl RandomConnected {
    pub fn new(n: usize, period: Horizon, extra_edge_p: f64, seed: u64) -> Result<Self> {
        if period == Horizon::Finite(0) {
            return Err(domain("backbone period T must be at least 1"));
        }
        if !(0.0..=1.0).contains(&extra_edge_p) {
            return Err(domain(format!(
                "extra-edge probability {extra_edge_p} outside [0, 1]"
            )));
        }
        Ok(RandomConnected {
            n,
            period,
            extra_edge_p,
            seed,
            declared_tau: Horizon::Infinite,
            trees: Vec::new(),
            backbone: None,
        })
    }

    /// Records the obliviousness the experiment claims; the schedule itself
    /// never reads the algorithm's randomness.
    pub fn declared_tau(mut self, tau: Horizon) -> Self {
        self.declared_tau = tau;
        self
    }

    pub fn declared(&self) -> Horizon {
        self.declared_tau
    }

    fn tree(&mut self, block: u64) -> Arc<RoundGraph> {
        if let Some((_, g)) = self.trees.iter().find(|(b, _)| *b == block) {
            return Arc::clone(g);
        }
        let mut rng = seeded_rng(self.seed, &format!("backbone:{block}"));
        let g = Arc::new(random_spanning_tree(self.n, &mut rng));
        if self.trees.len() >= 2 {
            self.trees.remove(0);
        }
        self.trees.push((block, Arc::clone(&g)));
        g
    }

    /// Union of the backbone trees alive in `round`.
    fn backbone(&mut self, round: u64) -> Arc<RoundGraph> {
        let (block, with_prev) = match self.period {
            Horizon::Finite(t) => {
                let b = (round - 1) / t;
                (b, b >= 1 && (round - 1) % t + 2 <= t)
            }
            Horizon::Infinite => (0, false),
        };
        if let Some((key, g)) = &self.backbone {
            if *key == (block, with_prev) {
                return Arc::clone(g);
            }
        }
        let current = self.tree(block);
        let g = if with_prev {
            let mut g = (*self.tree(block - 1)).clone();
            g.union_with(&current);
            Arc::new(g)
        } else {
            current
        };
        self.backbone = Some(((block, with_prev), Arc::clone(&g)));
        g
    }

    /// The graph of `round`, independent of any execution.
    pub fn graph_at(&mut self, round: u64) -> Arc<RoundGraph> {
        let backbone = self.backbone(round);
        if self.extra_edge_p <= 0.0 {
            return backbone;
        }
        let mut g = (*backbone).clone();
        let mut rng = seeded_rng(self.seed, &format!("extra:{round}"));
        let n = self.n;
        if self.extra_edge_p >= 1.0 {
            return Arc::new(RoundGraph::complete(n));
        }
        // Walk the pairs (u < v) in row-major order with geometric gaps.
        let log_q = (1.0 - self.extra_edge_p).ln();
        let total = n * (n - 1) / 2;
        let (mut u, mut row_start) = (0usize, 0usize);
        let mut idx = 0usize;
        loop {
            let x: f64 = rng.random();
            let gap = ((1.0 - x).ln() / log_q).floor();
            if !gap.is_finite() || gap >= (total - idx) as f64 {
                break;
            }
            idx += gap as usize;
            while idx >= row_start + (n - 1 - u) {
                row_start += n - 1 - u;
                u += 1;
            }
            let v = u + 1 + (idx - row_start);
            g.insert_unchecked(u, v);
            idx += 1;
            if idx >= total {
                break;
            }
        }
        Arc::new(g)
    }
}

impl<M> AdversaryPolicy<M> for RandomConnected {
    fn name(&self) -> &'static str {
        "random-connected"
    }
    fn tau(&self) -> Horizon {
        Horizon::Infinite
    }
    fn promise(&self) -> Horizon {
        self.period
    }
    fn next_graph(&mut self, view: &HistoryView<'_, M>) -> Arc<RoundGraph> {
        self.graph_at(view.round())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::check_interval_connectivity;

    #[test]
    fn infinite_period_keeps_one_backbone() {
        let mut a = RandomConnected::new(12, Horizon::Infinite, 0.0, 5).unwrap();
        let g1 = a.graph_at(1);
        let g2 = a.graph_at(1000);
        assert!(Arc::ptr_eq(&g1, &g2));
        assert_eq!(g1.edge_count(), 11);
    }

    #[test]
    fn period_one_without_extras_gives_fresh_trees() {
        let mut a = RandomConnected::new(12, Horizon::Finite(1), 0.0, 5).unwrap();
        let trees: Vec<_> = (1..=20).map(|r| a.graph_at(r)).collect();
        assert!(trees
            .iter()
            .all(|g| g.edge_count() == 11 && g.is_connected()));
        assert!(trees.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn schedules_meet_their_promise() {
        for t in [1u64, 2, 3, 7] {
            let mut a = RandomConnected::new(9, Horizon::Finite(t), 0.2, t).unwrap();
            let sched: Vec<RoundGraph> = (1..=30).map(|r| (*a.graph_at(r)).clone()).collect();
            assert!(check_interval_connectivity(&sched, Horizon::Finite(t)).unwrap());
        }
    }

    #[test]
    fn extra_edge_density_matches() {
        let n = 40;
        let p = 0.1;
        let mut a = RandomConnected::new(n, Horizon::Infinite, p, 9).unwrap();
        let tree = a.graph_at(1).edge_count();
        let rounds = 300;
        let extra: usize = (1..=rounds)
            .map(|r| a.graph_at(r).edge_count())
            .sum::<usize>();
        let pairs = (n * (n - 1) / 2) as f64;
        // Tree edges are always present; non-tree pairs appear with prob. p.
        let expected_extra = (pairs - (n - 1) as f64) * p;
        let observed = extra as f64 / rounds as f64 - (n - 1) as f64;
        assert!(tree >= n - 1);
        assert!(
            (observed - expected_extra).abs() < 0.05 * expected_extra,
            "{observed} vs {expected_extra}"
        );
    }

    #[test]
    fn graphs_depend_only_on_seed_and_round() {
        let mut a = RandomConnected::new(10, Horizon::Finite(3), 0.3, 77).unwrap();
        let mut b = RandomConnected::new(10, Horizon::Finite(3), 0.3, 77).unwrap();
        let fwd: Vec<_> = (1..=10).map(|r| a.graph_at(r)).collect();
        for r in (1..=10).rev() {
            assert_eq!(*b.graph_at(r), *fwd[r as usize - 1]);
        }
    }
}
