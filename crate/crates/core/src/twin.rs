//! The two-world twin network for a single intervention `do(X)`.
//!
//! Bidirected arcs are expanded to explicit exogenous parents shared by both
//! worlds, so the result is a plain DAG. Nodes that do not descend from X are
//! identical in both worlds and get a single merged copy.

use std::collections::BTreeMap;

use crate::criteria::AdjustmentQuery;
use crate::error::{Error, Result};
use crate::graph::{Admg, NodeId, NodeSet};
use crate::separation;

pub const COUNTERFACTUAL_SUFFIX: &str = "@do";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwinGraph {
    pub graph: Admg,
    pub factual_of: BTreeMap<NodeId, NodeId>,
    /// Merged nodes map to their shared copy, so this map is total.
    pub counterfactual_of: BTreeMap<NodeId, NodeId>,
    /// Non-descendants of X, present once.
    pub merged: NodeSet,
    /// One per bidirected arc of the source graph, in arc order.
    pub exogenous: Vec<NodeId>,
}

impl TwinGraph {
    pub fn factual(&self, set: &NodeSet) -> NodeSet {
        set.iter().map(|n| self.factual_of[n].clone()).collect()
    }

    pub fn counterfactual(&self, set: &NodeSet) -> NodeSet {
        set.iter()
            .map(|n| self.counterfactual_of[n].clone())
            .collect()
    }

    /// The twin graph plus a bidirected arc between the two copies of every
    /// non-treatment node that has both. The arc stands for the node's own
    /// disturbance, which both worlds share; the plain graph leaves it
    /// implicit, as drawings of twin networks usually do.
    pub fn with_shared_disturbances(&self, x: &NodeSet) -> Result<Admg> {
        let g = &self.graph;
        let mut b = Admg::builder();
        for n in g.nodes() {
            b.node(n.clone());
        }
        for (t, h) in g.directed_edges() {
            b.directed(t.clone(), h.clone())?;
        }
        for (p, q) in g.bidirected_edges() {
            b.bidirected(p.clone(), q.clone())?;
        }
        for (f, cf) in &self.counterfactual_of {
            if cf != &self.factual_of[f] && !x.contains(f.as_str()) {
                b.bidirected(self.factual_of[f].clone(), cf.clone())?;
            }
        }
        b.build()
    }
}

pub fn exogenous_name(a: &NodeId, b: &NodeId) -> NodeId {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    NodeId::new(format!("__U_{lo}_{hi}"))
}

pub fn twin_network(g: &Admg, x: &NodeSet) -> Result<TwinGraph> {
    let de_x = crate::graph::descendants(g, x)?;
    let mut b = Admg::builder();
    let mut factual_of = BTreeMap::new();
    let mut counterfactual_of = BTreeMap::new();
    let mut merged = NodeSet::new();

    for n in g.nodes() {
        b.node(n.clone());
        factual_of.insert(n.clone(), n.clone());
        if !de_x.contains(n.as_str()) {
            merged.insert(n.clone());
            counterfactual_of.insert(n.clone(), n.clone());
        }
    }
    for n in g.nodes() {
        if de_x.contains(n.as_str()) {
            let copy = NodeId::new(format!("{n}{COUNTERFACTUAL_SUFFIX}"));
            if g.contains(copy.as_str()) {
                return Err(Error::NameCollision(copy.to_string()));
            }
            b.node(copy.clone());
            counterfactual_of.insert(n.clone(), copy);
        }
    }

    for (t, h) in g.directed_edges() {
        b.directed(t.clone(), h.clone())?;
    }
    // Edges into merged nodes come from merged nodes and already exist.
    let post = crate::graph::cut_incoming(g, x)?;
    for (t, h) in post.directed_edges() {
        if de_x.contains(h.as_str()) {
            b.directed(counterfactual_of[t].clone(), counterfactual_of[h].clone())?;
        }
    }

    let mut exogenous = Vec::new();
    for (p, q) in g.bidirected_edges() {
        let u = exogenous_name(p, q);
        if g.contains(u.as_str()) || b.contains(u.as_str()) {
            return Err(Error::NameCollision(u.to_string()));
        }
        for end in [p, q] {
            b.directed(u.clone(), factual_of[end].clone())?;
            let cf = &counterfactual_of[end];
            if cf != &factual_of[end] && !x.contains(end.as_str()) {
                b.directed(u.clone(), cf.clone())?;
            }
        }
        exogenous.push(u);
    }

    Ok(TwinGraph {
        graph: b.build()?,
        factual_of,
        counterfactual_of,
        merged,
        exogenous,
    })
}

/// Whether `Y_x` is independent of `X` given `Z` in every model inducing
/// `g`, read off the twin network.
pub fn graphical_ignorability(g: &Admg, q: &AdjustmentQuery) -> Result<bool> {
    q.validate(g)?;
    let t = twin_network(g, &q.x)?;
    let twin = t.with_shared_disturbances(&q.x)?;
    let xs = t.factual(&q.x);
    let ys = t.counterfactual(&q.y);
    let zs = t.factual(&q.z);
    // A merged outcome never descends from X and could coincide with a
    // factual covariate only if Y and Z overlapped, which validation rules out.
    Ok(separation::d_separated(&twin, &xs, &ys, &zs)?.separated)
}
