use std::collections::BTreeSet;

use super::{Admg, NodeSet};
use crate::error::{Error, Result};

impl Admg {
    pub(crate) fn ancestors_mask(&self, seed: &[bool]) -> Vec<bool> {
        self.closure(seed, |v| self.parents_idx(v))
    }

    pub(crate) fn descendants_mask(&self, seed: &[bool]) -> Vec<bool> {
        self.closure(seed, |v| self.children_idx(v))
    }

    fn closure<'a>(&'a self, seed: &[bool], next: impl Fn(usize) -> &'a [usize]) -> Vec<bool> {
        let mut out = seed.to_vec();
        let mut stack: Vec<usize> = (0..self.len()).filter(|&v| seed[v]).collect();
        while let Some(v) = stack.pop() {
            for &w in next(v) {
                if !out[w] {
                    out[w] = true;
                    stack.push(w);
                }
            }
        }
        out
    }

    /// Mask of nodes on some proper causal path from `x` to `y`, endpoints included.
    pub(crate) fn proper_causal_mask(&self, x: &[bool], y: &[bool]) -> Vec<bool> {
        let n = self.len();
        // forward: non-X nodes reachable from X by a directed path that never
        // re-enters X
        let mut fwd = vec![false; n];
        let mut stack = Vec::new();
        for v in (0..n).filter(|&v| x[v]) {
            for &c in self.children_idx(v) {
                if !x[c] && !fwd[c] {
                    fwd[c] = true;
                    stack.push(c);
                }
            }
        }
        while let Some(v) = stack.pop() {
            for &c in self.children_idx(v) {
                if !x[c] && !fwd[c] {
                    fwd[c] = true;
                    stack.push(c);
                }
            }
        }
        // backward: non-X ancestors of Y through non-X nodes only
        let mut back = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&v| y[v] && !x[v]).collect();
        for &v in &stack {
            back[v] = true;
        }
        while let Some(v) = stack.pop() {
            for &p in self.parents_idx(v) {
                if !x[p] && !back[p] {
                    back[p] = true;
                    stack.push(p);
                }
            }
        }
        let mut out: Vec<bool> = (0..n).map(|v| fwd[v] && back[v]).collect();
        for v in (0..n).filter(|&v| x[v]) {
            if self
                .children_idx(v)
                .iter()
                .any(|&c| !x[c] && fwd[c] && back[c])
            {
                out[v] = true;
            }
        }
        out
    }

    pub(crate) fn cut_incoming_mask(&self, x: &[bool]) -> Admg {
        self.with_edges(|_, h| !x[h], |a, b| !x[a] && !x[b])
    }

    pub(crate) fn cut_outgoing_mask(&self, x: &[bool]) -> Admg {
        self.with_edges(|t, _| !x[t], |_, _| true)
    }

    pub(crate) fn latent_project_mask(&self, latent: &[bool]) -> Admg {
        let n = self.len();
        // observed nodes first reached from `v` along directed paths whose
        // interior is latent
        let reach = |v: usize| -> Vec<usize> {
            let mut seen = vec![false; n];
            let mut found = Vec::new();
            let mut stack = vec![v];
            while let Some(u) = stack.pop() {
                for &c in self.children_idx(u) {
                    if seen[c] {
                        continue;
                    }
                    seen[c] = true;
                    if latent[c] {
                        stack.push(c);
                    } else {
                        found.push(c);
                    }
                }
            }
            found
        };
        let mut directed = BTreeSet::new();
        let mut bidirected = BTreeSet::new();
        let add_bi = |a: usize, b: usize, set: &mut BTreeSet<(usize, usize)>| {
            if a != b {
                set.insert((a.min(b), a.max(b)));
            }
        };
        let down: Vec<Vec<usize>> = (0..n).map(reach).collect();
        for v in (0..n).filter(|&v| !latent[v]) {
            for &w in &down[v] {
                directed.insert((v, w));
            }
        }
        // a latent fork u with two observed first-hits
        for u in (0..n).filter(|&u| latent[u]) {
            for (i, &a) in down[u].iter().enumerate() {
                for &b in &down[u][i + 1..] {
                    add_bi(a, b, &mut bidirected);
                }
            }
        }
        // a bidirected edge whose latent endpoints are expanded downward
        for &(a, b) in self.bidirected_idx() {
            let side = |v: usize| if latent[v] { down[v].clone() } else { vec![v] };
            for &p in &side(a) {
                for &q in &side(b) {
                    add_bi(p, q, &mut bidirected);
                }
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut names = Vec::new();
        for v in (0..n).filter(|&v| !latent[v]) {
            remap[v] = names.len();
            names.push(self.name(v).clone());
        }
        let directed = directed
            .into_iter()
            .map(|(t, h)| (remap[t], remap[h]))
            .collect();
        let bidirected = bidirected
            .into_iter()
            .map(|(a, b)| (remap[a].min(remap[b]), remap[a].max(remap[b])))
            .collect();
        Admg::from_parts(names, directed, bidirected).expect("projection of a DAG is acyclic")
    }
}

/// All nodes with a directed path (possibly empty) into `set`.
pub fn ancestors(g: &Admg, set: &NodeSet) -> Result<NodeSet> {
    let m = g.mask(set)?;
    Ok(g.set_of(&g.ancestors_mask(&m)))
}

/// All nodes reachable from `set` by a directed path (possibly empty).
pub fn descendants(g: &Admg, set: &NodeSet) -> Result<NodeSet> {
    let m = g.mask(set)?;
    Ok(g.set_of(&g.descendants_mask(&m)))
}

/// The mutilated graph: every arrowhead into `x` removed, bidirected ends included.
pub fn cut_incoming(g: &Admg, x: &NodeSet) -> Result<Admg> {
    Ok(g.cut_incoming_mask(&g.mask(x)?))
}

/// Removes every directed edge leaving `x`; bidirected edges stay.
pub fn cut_outgoing(g: &Admg, x: &NodeSet) -> Result<Admg> {
    Ok(g.cut_outgoing_mask(&g.mask(x)?))
}

/// Marginalizes `latent` out of `g`, keeping every separation statement
/// among the remaining nodes.
pub fn latent_project(g: &Admg, latent: &NodeSet) -> Result<Admg> {
    Ok(g.latent_project_mask(&g.mask(latent)?))
}

/// Every node (endpoints included) on a directed path from `x` to `y` that
/// meets `x` only at its first node.
pub fn proper_causal_nodes(g: &Admg, x: &NodeSet, y: &NodeSet) -> Result<NodeSet> {
    let (xm, ym) = (g.mask(x)?, g.mask(y)?);
    if !x.is_disjoint(y) {
        return Err(Error::InvalidQuery(
            "treatments and outcomes overlap".into(),
        ));
    }
    Ok(g.set_of(&g.proper_causal_mask(&xm, &ym)))
}
