//! Per-round communication graphs and interval-connectivity checking.

use std::fmt;
use std::sync::Arc;

use crate::bitset::{self, NodeSet};
use crate::error::{domain, Error, Result};
use crate::primitives::{Horizon, NodeId};

/// Undirected simple graph on `n` nodes, stored as a bit adjacency matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RoundGraph {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
}

impl RoundGraph {
    pub fn empty(n: usize) -> Self {
        let stride = bitset::words_for(n);
        RoundGraph {
            n,
            stride,
            rows: vec![0; stride * n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = RoundGraph::empty(n);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    bitset::set_bit(g.row_mut(u), v);
                }
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = RoundGraph::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Ring `0 - 1 - ... - (n-1) - 0`. For `n = 2` this is a single edge.
    pub fn ring(n: usize) -> Self {
        let mut g = RoundGraph::empty(n);
        for u in 0..n {
            let v = (u + 1) % n;
            if u != v {
                g.insert_unchecked(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = RoundGraph::empty(n);
        for u in 1..n {
            g.insert_unchecked(u - 1, u);
        }
        g
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(domain(format!("self-loop at node {u}")));
        }
        if u >= self.n || v >= self.n {
            return Err(domain(format!(
                "edge ({u}, {v}) out of range for n = {}",
                self.n
            )));
        }
        self.insert_unchecked(u, v);
        Ok(())
    }

    #[inline]
    pub(crate) fn insert_unchecked(&mut self, u: usize, v: usize) {
        bitset::set_bit(self.row_mut(u), v);
        bitset::set_bit(self.row_mut(v), u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if u < self.n && v < self.n {
            bitset::clear_bit(self.row_mut(u), v);
            bitset::clear_bit(self.row_mut(v), u);
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && bitset::test_bit(self.row(u), v)
    }

    #[inline]
    pub(crate) fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.stride..(u + 1) * self.stride]
    }

    #[inline]
    fn row_mut(&mut self, u: usize) -> &mut [u64] {
        &mut self.rows[u * self.stride..(u + 1) * self.stride]
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = NodeId> + '_ {
        bitset::iter_ones(self.row(u)).map(NodeId::from)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    /// Edges as canonical pairs `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            bitset::iter_ones(self.row(u))
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Keeps only edges present in both graphs.
    pub fn intersect_with(&mut self, other: &RoundGraph) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &RoundGraph) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a |= b;
        }
    }

    pub fn is_subgraph_of(&self, other: &RoundGraph) -> bool {
        self.n == other.n && self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    /// Connected on all `n` nodes. The empty graph on one node is connected.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = NodeSet::new(self.n);
        let mut stack = vec![0usize];
        seen.insert(0);
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for v in bitset::iter_ones(self.row(u)) {
                if seen.insert(v) {
                    reached += 1;
                    stack.push(v);
                }
            }
        }
        reached == self.n
    }
}

impl fmt::Debug for RoundGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RoundGraph(n={}, edges=", self.n)?;
        f.debug_list().entries(self.edges()).finish()?;
        f.write_str(")")
    }
}

/// Whether every window of `t` consecutive graphs has a connected intersection.
///
/// Windows that would run past the end of a finite trace are checked on the
/// available suffix, so a schedule shorter than `t` is checked as one window.
pub fn check_interval_connectivity(schedule: &[RoundGraph], t: Horizon) -> Result<bool> {
    if t == Horizon::Finite(0) {
        return Err(domain("interval length T must be at least 1"));
    }
    let first = schedule
        .first()
        .ok_or_else(|| domain("schedule must be non-empty"))?;
    let n = first.node_count();
    if let Some(bad) = schedule.iter().find(|g| g.node_count() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.node_count(),
        });
    }
    let mut audit = IntervalAuditor::new(n, t)?;
    for g in schedule {
        audit.push(&Arc::new(g.clone()));
    }
    Ok(audit.finish().is_none())
}

/// Online checker for the interval-connectivity promise of an emitted
/// schedule.
///
/// Finite windows use a two-stack sliding aggregate, so each pushed graph
/// costs an amortized constant number of row intersections.
pub struct IntervalAuditor {
    n: usize,
    t: Horizon,
    pushed: u64,
    first_failure: Option<u64>,
    // T = inf: intersection of every distinct graph seen so far.
    running: Option<RoundGraph>,
    seen: Vec<Arc<RoundGraph>>,
    // finite T: front holds suffix aggregates (oldest on top), back the
    // newest items plus their aggregate.
    front: Vec<RoundGraph>,
    back: Vec<Arc<RoundGraph>>,
    back_agg: Option<RoundGraph>,
}

impl IntervalAuditor {
    pub fn new(n: usize, t: Horizon) -> Result<Self> {
        if t == Horizon::Finite(0) {
            return Err(domain("interval length T must be at least 1"));
        }
        Ok(IntervalAuditor {
            n,
            t,
            pushed: 0,
            first_failure: None,
            running: None,
            seen: Vec::new(),
            front: Vec::new(),
            back: Vec::new(),
            back_agg: None,
        })
    }

    pub fn promise(&self) -> Horizon {
        self.t
    }

    pub fn push(&mut self, g: &Arc<RoundGraph>) {
        debug_assert_eq!(g.node_count(), self.n);
        self.pushed += 1;
        match self.t {
            Horizon::Infinite => {
                if self.seen.iter().any(|s| Arc::ptr_eq(s, g)) {
                    return;
                }
                if self.seen.len() < 16 {
                    self.seen.push(Arc::clone(g));
                }
                match &mut self.running {
                    Some(r) => r.intersect_with(g),
                    None => self.running = Some((**g).clone()),
                }
            }
            Horizon::Finite(t) => {
                match &mut self.back_agg {
                    Some(agg) => agg.intersect_with(g),
                    None => self.back_agg = Some((**g).clone()),
                }
                self.back.push(Arc::clone(g));
                if self.len() as u64 > t {
                    self.pop_oldest();
                }
                if self.len() as u64 == t
                    && self.first_failure.is_none()
                    && !self.window().is_connected()
                {
                    self.first_failure = Some(self.pushed);
                }
            }
        }
    }

    fn len(&self) -> usize {
        self.front.len() + self.back.len()
    }

    fn pop_oldest(&mut self) {
        if self.front.is_empty() {
            let mut agg: Option<RoundGraph> = None;
            for g in self.back.drain(..).rev() {
                let next = match agg.take() {
                    Some(mut a) => {
                        a.intersect_with(&g);
                        a
                    }
                    None => (*g).clone(),
                };
                self.front.push(next.clone());
                agg = Some(next);
            }
            self.back_agg = None;
        }
        self.front.pop();
    }

    fn window(&self) -> RoundGraph {
        match (self.front.last(), &self.back_agg) {
            (Some(f), Some(b)) => {
                let mut w = f.clone();
                w.intersect_with(b);
                w
            }
            (Some(f), None) => f.clone(),
            (None, Some(b)) => b.clone(),
            (None, None) => RoundGraph::complete(self.n),
        }
    }

    /// The 1-based index of the first graph that closed a disconnected
    /// window, or `None` if the whole schedule keeps the promise.
    pub fn finish(&self) -> Option<u64> {
        if let Some(f) = self.first_failure {
            return Some(f);
        }
        if self.pushed == 0 {
            return None;
        }
        match self.t {
            Horizon::Infinite => match &self.running {
                Some(r) if !r.is_connected() => Some(self.pushed),
                _ => None,
            },
            Horizon::Finite(t) => {
                // A trace shorter than T is a single partial window.
                if self.pushed < t && !self.window().is_connected() {
                    Some(self.pushed)
                } else {
                    None
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> RoundGraph {
        RoundGraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn rejects_self_loops_and_out_of_range() {
        let mut h = RoundGraph::empty(3);
        assert!(h.add_edge(1, 1).is_err());
        assert!(h.add_edge(0, 3).is_err());
        h.add_edge(2, 0).unwrap();
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn ring_and_complete_shapes() {
        let r = RoundGraph::ring(6);
        assert_eq!(r.edge_count(), 6);
        assert_eq!(r.max_degree(), 2);
        assert!(r.is_connected());
        let k = RoundGraph::complete(70);
        assert_eq!(k.edge_count(), 70 * 69 / 2);
        assert!(RoundGraph::ring(2).is_connected());
        assert!(!RoundGraph::empty(2).is_connected());
    }

    #[test]
    fn intersection_of_path_and_triangle_is_connected() {
        let s = [g(3, &[(0, 1), (1, 2)]), g(3, &[(0, 1), (1, 2), (0, 2)])];
        assert!(check_interval_connectivity(&s, Horizon::Finite(2)).unwrap());
    }

    #[test]
    fn disconnected_rounds_fail_for_t1() {
        let s = [g(3, &[(0, 1)]), g(3, &[(1, 2)])];
        assert!(!check_interval_connectivity(&s, Horizon::Finite(1)).unwrap());
    }

    #[test]
    fn stable_tree_passes_any_t() {
        let tree = [(0, 1), (1, 2), (1, 3)];
        let s: Vec<_> = (0..7)
            .map(|r| {
                let mut h = g(4, &tree);
                if r % 2 == 0 {
                    h.add_edge(0, 3).unwrap();
                }
                h
            })
            .collect();
        for t in [
            Horizon::Finite(1),
            Horizon::Finite(3),
            Horizon::Finite(50),
            Horizon::Infinite,
        ] {
            assert!(check_interval_connectivity(&s, t).unwrap());
        }
    }

    #[test]
    fn t_zero_and_empty_schedule_are_errors() {
        assert!(check_interval_connectivity(&[RoundGraph::ring(3)], Horizon::Finite(0)).is_err());
        assert!(check_interval_connectivity(&[], Horizon::Finite(1)).is_err());
    }

    #[test]
    fn alternating_paths_fail_for_long_windows() {
        let a = g(3, &[(0, 1), (1, 2)]);
        let b = g(3, &[(0, 2), (1, 2)]);
        let s = vec![a.clone(), b.clone(), a, b];
        assert!(check_interval_connectivity(&s, Horizon::Finite(1)).unwrap());
        assert!(!check_interval_connectivity(&s, Horizon::Finite(2)).unwrap());
        assert!(!check_interval_connectivity(&s, Horizon::Infinite).unwrap());
    }
}
