use rand::Rng;

use crate::graph::RoundGraph;

/// Adds a uniformly random spanning tree on `nodes` to `graph`, decoding a
/// random Prüfer sequence (uniform over all labelled trees).
pub(crate) fn add_random_tree(graph: &mut RoundGraph, nodes: &[usize], rng: &mut impl Rng) {
    let k = nodes.len();
    match k {
        0 | 1 => return,
        2 => {
            graph.insert_unchecked(nodes[0], nodes[1]);
            return;
        }
        _ => {}
    }
    let seq: Vec<usize> = (0..k - 2).map(|_| rng.random_range(0..k)).collect();
    let mut degree = vec![1usize; k];
    for &x in &seq {
        degree[x] += 1;
    }
    // Linear-time decoding.
    let mut ptr = degree.iter().position(|&d| d == 1).expect("a leaf exists");
    let mut leaf = ptr;
    for &x in &seq {
        graph.insert_unchecked(nodes[leaf], nodes[x]);
        degree[x] -= 1;
        if degree[x] == 1 && x < ptr {
            leaf = x;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    graph.insert_unchecked(nodes[leaf], nodes[k - 1]);
}

/// A uniformly random spanning tree of the complete graph on `n` nodes.
pub fn random_spanning_tree(n: usize, rng: &mut impl Rng) -> RoundGraph {
    let mut g = RoundGraph::empty(n);
    let nodes: Vec<usize> = (0..n).collect();
    add_random_tree(&mut g, &nodes, rng);
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use std::collections::HashMap;

    #[test]
    fn trees_are_spanning_trees() {
        let mut rng = seeded_rng(1, "t");
        for n in 1..40 {
            let t = random_spanning_tree(n, &mut rng);
            assert_eq!(t.edge_count(), n.saturating_sub(1));
            assert!(t.is_connected());
        }
    }

    #[test]
    fn four_node_trees_are_uniform() {
        // Cayley: 4^2 = 16 labelled trees on 4 nodes.
        let mut rng = seeded_rng(2, "t");
        let mut counts: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
        let draws = 32_000;
        for _ in 0..draws {
            let t = random_spanning_tree(4, &mut rng);
            *counts.entry(t.edges().collect()).or_default() += 1;
        }
        assert_eq!(counts.len(), 16);
        let expected = draws as f64 / 16.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 15 degrees of freedom; 99.9th percentile is about 37.7.
        assert!(chi2 < 37.7, "chi2 = {chi2}");
    }
}
