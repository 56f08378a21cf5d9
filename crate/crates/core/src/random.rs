//! Seeded generators for graphs, queries and routes, used by tests and
//! benchmarks.

use std::ops::RangeInclusive;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::criteria::AdjustmentQuery;
use crate::graph::{Admg, EdgeKind, NodeId, NodeSet};
use crate::separation::{Route, Step};

/// Parameters of a random ADMG family.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphFamily {
    pub nodes: RangeInclusive<usize>,
    pub max_edges: usize,
    /// Probability that an edge is bidirected.
    pub bidirected_fraction: f64,
}

impl Default for GraphFamily {
    fn default() -> Self {
        GraphFamily {
            nodes: 2..=5,
            max_edges: 8,
            bidirected_fraction: 0.3,
        }
    }
}

/// `A`, `B`, ..., `Z`, `A1`, `B1`, ...
pub fn node_name(i: usize) -> NodeId {
    let letter = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        NodeId::new(letter.to_string())
    } else {
        NodeId::new(format!("{letter}{}", i / 26))
    }
}

/// One graph drawn from `family`. Edge directions follow a random causal
/// order, so node names carry no ordering information. A pair may carry
/// both a directed and a bidirected edge.
pub fn random_admg<R: Rng>(rng: &mut R, family: &GraphFamily) -> Admg {
    let n = rng.random_range(family.nodes.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let pairs = n * n.saturating_sub(1) / 2;
    let slots = 2 * pairs;
    let m = rng.random_range(0..=family.max_edges.min(slots));
    let mut b = Admg::builder();
    for i in 0..n {
        b.node(node_name(i));
    }
    let mut used: Vec<(usize, usize, EdgeKind)> = Vec::new();
    while used.len() < m {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j {
            continue;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let kind = if rng.random_bool(family.bidirected_fraction) {
            EdgeKind::Bidirected
        } else {
            EdgeKind::Directed
        };
        if used.contains(&(lo, hi, kind)) {
            continue;
        }
        used.push((lo, hi, kind));
        match kind {
            EdgeKind::Bidirected => {
                b.bidirected(node_name(lo), node_name(hi))
                    .expect("fresh edge");
            }
            EdgeKind::Directed => {
                let pos = |v: usize| order.iter().position(|&w| w == v).expect("in order");
                let (t, h) = if pos(lo) < pos(hi) {
                    (lo, hi)
                } else {
                    (hi, lo)
                };
                b.directed(node_name(t), node_name(h)).expect("fresh edge");
            }
        }
    }
    b.build().expect("edges follow a causal order")
}

/// `count` graphs from `family`, reproducible from `seed`.
pub fn graph_family(seed: u64, count: usize, family: &GraphFamily) -> Vec<Admg> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_admg(&mut rng, family)).collect()
}

/// Every query on `g`: each node is a treatment, outcome, covariate or
/// unused, with treatments and outcomes non-empty.
pub fn all_queries(g: &Admg) -> Vec<AdjustmentQuery> {
    let n = g.len();
    let total = 4usize.pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let (mut x, mut y, mut z) = (NodeSet::new(), NodeSet::new(), NodeSet::new());
        let mut c = code;
        for name in g.nodes() {
            match c % 4 {
                1 => x.insert(name.clone()),
                2 => y.insert(name.clone()),
                3 => z.insert(name.clone()),
                _ => false,
            };
            c /= 4;
        }
        if !x.is_empty() && !y.is_empty() {
            out.push(AdjustmentQuery::new(x, y, z));
        }
    }
    out
}

/// Every labelled DAG on `n` nodes (each pair absent, forward or backward).
pub fn all_dags(n: usize) -> Vec<Admg> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut b = Admg::builder();
        for i in 0..n {
            b.node(node_name(i));
        }
        let mut c = code;
        for &(i, j) in &pairs {
            match c % 3 {
                1 => {
                    b.directed(node_name(i), node_name(j)).expect("fresh edge");
                }
                2 => {
                    b.directed(node_name(j), node_name(i)).expect("fresh edge");
                }
                _ => {}
            }
            c /= 3;
        }
        if let Ok(g) = b.build() {
            out.push(g);
        }
    }
    out
}

/// A random walk of up to `max_steps` edges starting anywhere. Returns
/// `None` if the graph has no edges.
pub fn random_route<R: Rng>(rng: &mut R, g: &Admg, max_steps: usize) -> Option<Route> {
    let names = g.nodes();
    let with_edges: Vec<usize> = (0..g.len())
        .filter(|&v| !g.incidences(v).is_empty())
        .collect();
    let &start = with_edges.choose(rng)?;
    let steps_wanted = rng.random_range(1..=max_steps.max(1));
    let mut at = start;
    let mut steps = Vec::new();
    for _ in 0..steps_wanted {
        let inc = g
            .incidences(at)
            .choose(rng)
            .expect("every visited node has an edge");
        let (from, to) = (names[at].clone(), names[inc.other].clone());
        steps.push(match (inc.kind, inc.mark_here) {
            (EdgeKind::Bidirected, _) => Step::bidirected(from, to),
            (EdgeKind::Directed, crate::graph::Mark::Tail) => Step::forward(from, to),
            (EdgeKind::Directed, crate::graph::Mark::Head) => Step::backward(from, to),
        });
        at = inc.other;
    }
    Some(Route::new(names[start].clone(), steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert_eq!(node_name(0).as_str(), "A");
        assert_eq!(node_name(25).as_str(), "Z");
        assert_eq!(node_name(26).as_str(), "A1");
    }

    #[test]
    fn family_is_reproducible_and_bounded() {
        let fam = GraphFamily::default();
        let a = graph_family(3, 50, &fam);
        assert_eq!(a, graph_family(3, 50, &fam));
        for g in &a {
            assert!((2..=5).contains(&g.len()));
            assert!(g.num_directed() + g.num_bidirected() <= 8);
        }
        assert!(a.iter().any(|g| g.num_bidirected() > 0));
    }

    #[test]
    fn query_count() {
        let g = crate::graph::parse_graph("A -> B\nB -> C").unwrap();
        // 4^3 role maps minus those without a treatment or an outcome
        let no_x = 3usize.pow(3);
        let no_y = 3usize.pow(3);
        let neither = 2usize.pow(3);
        assert_eq!(all_queries(&g).len(), 64 - no_x - no_y + neither);
    }

    #[test]
    fn dag_counts() {
        // labelled DAG counts: 1, 3, 25, 543
        assert_eq!(all_dags(2).len(), 3);
        assert_eq!(all_dags(3).len(), 25);
        assert_eq!(all_dags(4).len(), 543);
    }

    #[test]
    fn routes_are_valid_walks() {
        let g = crate::graph::parse_graph("A -> B\nB <-> C\nC -> D").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let r = random_route(&mut rng, &g, 6).unwrap();
            r.validate(&g).unwrap();
        }
        assert!(random_route(&mut rng, &crate::graph::parse_graph("node A").unwrap(), 3).is_none());
    }
}
