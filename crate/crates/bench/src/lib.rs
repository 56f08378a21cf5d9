//! Workloads shared by the benchmarks.

use covadj::random::{graph_family, GraphFamily};
use covadj::{parse_graph, AdjustmentQuery, Admg, NodeSet};

/// A fixed sample of small mixed graphs.
pub fn small_graphs(count: usize) -> Vec<Admg> {
    graph_family(7, count, &GraphFamily::default())
}

/// A layered graph with `width * depth` nodes: each layer feeds the next,
/// and neighbours in a layer share a latent confounder.
pub fn layered(width: usize, depth: usize) -> Admg {
    let name = |l: usize, i: usize| format!("N{l}_{i}");
    let mut text = String::new();
    for l in 0..depth {
        for i in 0..width {
            if l + 1 < depth {
                text.push_str(&format!("{} -> {}\n", name(l, i), name(l + 1, i)));
                text.push_str(&format!(
                    "{} -> {}\n",
                    name(l, i),
                    name(l + 1, (i + 1) % width)
                ));
            }
            if i + 1 < width {
                text.push_str(&format!("{} <-> {}\n", name(l, i), name(l, i + 1)));
            }
        }
    }
    parse_graph(&text).expect("generated graph is valid")
}

/// First layer as treatments, last layer as outcomes, no covariates.
pub fn layered_query(width: usize, depth: usize) -> AdjustmentQuery {
    let layer =
        |l: usize| -> NodeSet { NodeSet::from_names((0..width).map(|i| format!("N{l}_{i}"))) };
    AdjustmentQuery::new(layer(0), layer(depth - 1), NodeSet::new())
}

pub fn fig1(which: char) -> Admg {
    let text = match which {
        'a' => "Z -> X\nZ -> Y\nX -> Y",
        'b' => "X -> Y\nX -> Z",
        _ => "X -> Z\nZ -> Y\nX <-> Y",
    };
    parse_graph(text).expect("fixture parses")
}
