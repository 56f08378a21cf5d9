#![allow(dead_code)]

use covadj::random::node_name;
use covadj::{AdjustmentQuery, Admg, NodeSet};
use proptest::prelude::*;

/// Builds an ADMG on `n` nodes from raw edge picks. Directed edges follow
/// `order`; repeated picks and self-pairs are dropped.
pub fn build(n: usize, order: &[usize], edges: &[(usize, usize, bool)]) -> Admg {
    let mut b = Admg::builder();
    for i in 0..n {
        b.node(node_name(i));
    }
    let pos = |v: usize| order.iter().position(|&w| w == v).unwrap();
    let mut seen = Vec::new();
    for &(i, j, bidirected) in edges {
        let (lo, hi) = (i.min(j), i.max(j));
        if i == j || seen.contains(&(lo, hi, bidirected)) {
            continue;
        }
        seen.push((lo, hi, bidirected));
        if bidirected {
            b.bidirected(node_name(lo), node_name(hi)).unwrap();
        } else if pos(lo) < pos(hi) {
            b.directed(node_name(lo), node_name(hi)).unwrap();
        } else {
            b.directed(node_name(hi), node_name(lo)).unwrap();
        }
    }
    b.build().unwrap()
}

pub fn arb_admg(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = Admg> {
    (2..=max_nodes)
        .prop_flat_map(move |n| {
            let order = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
            let edges =
                prop::collection::vec((0..n, 0..n, prop::bool::weighted(0.3)), 0..=max_edges);
            (Just(n), order, edges)
        })
        .prop_map(|(n, order, edges)| build(n, &order, &edges))
}

pub fn arb_dag(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = Admg> {
    (2..=max_nodes)
        .prop_flat_map(move |n| {
            let order = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
            let edges = prop::collection::vec((0..n, 0..n, Just(false)), 0..=max_edges);
            (Just(n), order, edges)
        })
        .prop_map(|(n, order, edges)| build(n, &order, &edges))
}

/// Role per node: 0 unused, 1 treatment, 2 outcome, 3 covariate.
pub fn query_from_roles(g: &Admg, roles: &[u8]) -> Option<AdjustmentQuery> {
    let pick = |r: u8| -> NodeSet {
        g.nodes()
            .iter()
            .zip(roles)
            .filter(|(_, &x)| x == r)
            .map(|(n, _)| n.clone())
            .collect()
    };
    let q = AdjustmentQuery::new(pick(1), pick(2), pick(3));
    (!q.x.is_empty() && !q.y.is_empty()).then_some(q)
}

/// A graph with a valid query on it.
pub fn arb_graph_query(
    max_nodes: usize,
    max_edges: usize,
) -> impl Strategy<Value = (Admg, AdjustmentQuery)> {
    arb_admg(max_nodes, max_edges)
        .prop_flat_map(|g| {
            let n = g.len();
            (Just(g), prop::collection::vec(0u8..4, n))
        })
        .prop_filter_map("needs treatments and outcomes", |(g, roles)| {
            query_from_roles(&g, &roles).map(|q| (g, q))
        })
}

/// Three disjoint node sets (A and B non-empty) from a role vector.
pub fn sets_from_roles(g: &Admg, roles: &[u8]) -> Option<(NodeSet, NodeSet, NodeSet)> {
    query_from_roles(g, roles).map(|q| (q.x, q.y, q.z))
}

pub fn subsets(pool: &NodeSet) -> Vec<NodeSet> {
    let items: Vec<_> = pool.iter().cloned().collect();
    (0..1usize << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, n)| n.clone())
                .collect()
        })
        .collect()
}

/// The DAG obtained by replacing each bidirected arc with a latent parent.
pub fn expand(g: &Admg) -> (Admg, NodeSet) {
    let mut b = Admg::builder();
    for n in g.nodes() {
        b.node(n.clone());
    }
    for (t, h) in g.directed_edges() {
        b.directed(t.clone(), h.clone()).unwrap();
    }
    let mut latents = NodeSet::new();
    for (p, q) in g.bidirected_edges() {
        let u = format!("__L_{p}_{q}");
        b.directed(u.as_str(), p.clone()).unwrap();
        b.directed(u.as_str(), q.clone()).unwrap();
        latents.insert(u);
    }
    (b.build().unwrap(), latents)
}
