//! Paths, routes and separation.
//!
//! Bidirected edge ends count as arrowheads everywhere, so the same blocking
//! rule covers DAGs and their latent projections. Two independent routes to a
//! separation verdict live here: [`d_separated`] uses linear-time
//! arrowhead-aware reachability, while [`enumerate_paths`] plus
//! [`path_blocked`] check every simple path explicitly.

mod path;

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Admg, EdgeKind, Mark, NodeSet};

pub use path::{Path, Route, Step};

/// Outcome of a separation query. A witness is present exactly when the
/// sets are connected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SepVerdict {
    pub separated: bool,
    pub witness: Option<Path>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct IdxStep {
    pub kind: EdgeKind,
    pub entry: Mark,
    pub exit: Mark,
}

/// Index-level path used by the search routines; `nodes.len() == steps.len() + 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct IdxPath {
    pub nodes: Vec<usize>,
    pub steps: Vec<IdxStep>,
}

impl IdxPath {
    pub fn is_causal(&self) -> bool {
        !self.steps.is_empty()
            && self
                .steps
                .iter()
                .all(|s| s.entry == Mark::Tail && s.exit == Mark::Head)
    }

    pub fn to_path(&self, g: &Admg) -> Path {
        let steps = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| Step {
                from: g.name(self.nodes[i]).clone(),
                to: g.name(self.nodes[i + 1]).clone(),
                kind: s.kind,
                mark_at_entry: s.entry,
                mark_at_exit: s.exit,
            })
            .collect();
        Path::new(g.name(self.nodes[0]).clone(), steps)
    }

    fn from_path(g: &Admg, p: &Path) -> Result<IdxPath> {
        let mut nodes = vec![g.idx(p.start().as_str())?];
        let mut steps = Vec::with_capacity(p.len());
        for s in p.steps() {
            nodes.push(g.idx(s.to.as_str())?);
            steps.push(IdxStep {
                kind: s.kind,
                entry: s.mark_at_entry,
                exit: s.mark_at_exit,
            });
        }
        Ok(IdxPath { nodes, steps })
    }

    /// Whether interior position `i` is a collider.
    fn collider_at(&self, i: usize) -> bool {
        self.steps[i - 1].exit == Mark::Head && self.steps[i].entry == Mark::Head
    }

    fn open_given(&self, z: &[bool], an_z: &[bool]) -> bool {
        (1..self.nodes.len() - 1)
            .all(|i| interior_open(self.nodes[i], self.collider_at(i), z, an_z))
    }
}

#[inline]
pub(crate) fn interior_open(v: usize, collider: bool, z: &[bool], an_z: &[bool]) -> bool {
    if collider {
        an_z[v]
    } else {
        !z[v]
    }
}

/// Depth-first enumeration of simple paths from `a` to `b` that meet `a`
/// only at the start and `b` only at the end. Paths are produced in
/// lexicographic order of (node name, edge kind) sequences. `interior_ok`
/// prunes on each interior node as soon as both its edges are known.
pub(crate) fn walk_paths(
    g: &Admg,
    a: &[bool],
    b: &[bool],
    max_len: usize,
    interior_ok: &dyn Fn(usize, bool) -> bool,
    visit: &mut dyn FnMut(&IdxPath) -> ControlFlow<()>,
) {
    #[allow(clippy::too_many_arguments)]
    fn go(
        g: &Admg,
        b: &[bool],
        a: &[bool],
        max_len: usize,
        interior_ok: &dyn Fn(usize, bool) -> bool,
        visit: &mut dyn FnMut(&IdxPath) -> ControlFlow<()>,
        path: &mut IdxPath,
        on_path: &mut [bool],
    ) -> ControlFlow<()> {
        let v = *path.nodes.last().expect("non-empty");
        for inc in g.incidences(v) {
            let w = inc.other;
            if on_path[w] || a[w] {
                continue;
            }
            if let Some(prev) = path.steps.last() {
                let collider = prev.exit == Mark::Head && inc.mark_here == Mark::Head;
                if !interior_ok(v, collider) {
                    continue;
                }
            }
            path.nodes.push(w);
            path.steps.push(IdxStep {
                kind: inc.kind,
                entry: inc.mark_here,
                exit: inc.mark_there,
            });
            let flow = if b[w] {
                visit(path)
            } else if path.steps.len() < max_len {
                on_path[w] = true;
                let f = go(g, b, a, max_len, interior_ok, visit, path, on_path);
                on_path[w] = false;
                f
            } else {
                ControlFlow::Continue(())
            };
            path.nodes.pop();
            path.steps.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    let mut starts: Vec<usize> = (0..g.len()).filter(|&v| a[v]).collect();
    starts.sort_by_key(|&v| g.rank(v));
    let mut on_path = vec![false; g.len()];
    for s in starts {
        if b[s] || max_len == 0 {
            continue;
        }
        let mut path = IdxPath {
            nodes: vec![s],
            steps: Vec::new(),
        };
        on_path[s] = true;
        let flow = go(
            g,
            b,
            a,
            max_len,
            interior_ok,
            visit,
            &mut path,
            &mut on_path,
        );
        on_path[s] = false;
        if flow.is_break() {
            return;
        }
    }
}

/// Shortest path (ties broken lexicographically) accepted by both predicates.
pub(crate) fn shortest_path(
    g: &Admg,
    a: &[bool],
    b: &[bool],
    interior_ok: &dyn Fn(usize, bool) -> bool,
    accept: &dyn Fn(&IdxPath) -> bool,
) -> Option<IdxPath> {
    let mut best: Option<IdxPath> = None;
    // iterative deepening keeps the first hit at each length lexicographically least
    for len in 1..g.len().max(1) {
        walk_paths(g, a, b, len, interior_ok, &mut |p| {
            if p.steps.len() == len && accept(p) {
                best = Some(p.clone());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if best.is_some() {
            break;
        }
    }
    best
}

/// Shortest open path from `a` to `b` given `z`, filtered by `accept`.
pub(crate) fn shortest_open_path(
    g: &Admg,
    a: &[bool],
    b: &[bool],
    z: &[bool],
    accept: &dyn Fn(&IdxPath) -> bool,
) -> Option<IdxPath> {
    let an_z = g.ancestors_mask(z);
    shortest_path(g, a, b, &|v, c| interior_open(v, c, z, &an_z), accept)
}

/// Nodes reachable from `sources` along walks open given `z`.
pub(crate) fn reachable(g: &Admg, sources: &[bool], z: &[bool]) -> Vec<bool> {
    let n = g.len();
    let an_z = g.ancestors_mask(z);
    // state: (node, arrived through an arrowhead at the node)
    let mut seen = vec![[false; 2]; n];
    let mut reached = vec![false; n];
    let mut stack = Vec::new();
    for s in (0..n).filter(|&s| sources[s]) {
        for inc in g.incidences(s) {
            stack.push((inc.other, inc.mark_there == Mark::Head));
        }
    }
    while let Some((v, head_in)) = stack.pop() {
        if seen[v][head_in as usize] {
            continue;
        }
        seen[v][head_in as usize] = true;
        reached[v] = true;
        for inc in g.incidences(v) {
            let collider = head_in && inc.mark_here == Mark::Head;
            if interior_open(v, collider, z, &an_z) {
                let next = (inc.other, inc.mark_there == Mark::Head);
                if !seen[next.0][next.1 as usize] {
                    stack.push(next);
                }
            }
        }
    }
    reached
}

pub(crate) fn disjoint3(a: &NodeSet, b: &NodeSet, z: &NodeSet) -> Result<()> {
    if !a.is_disjoint(b) || !a.is_disjoint(z) || !b.is_disjoint(z) {
        return Err(Error::InvalidQuery(
            "node sets must be pairwise disjoint".into(),
        ));
    }
    Ok(())
}

/// Index-level separation with witness.
pub(crate) fn d_separated_mask(
    g: &Admg,
    a: &[bool],
    b: &[bool],
    z: &[bool],
) -> (bool, Option<IdxPath>) {
    let reached = reachable(g, a, z);
    let connected = (0..g.len()).any(|v| b[v] && reached[v]);
    if !connected {
        return (true, None);
    }
    let witness = shortest_open_path(g, a, b, z, &|_| true);
    debug_assert!(witness.is_some(), "reachability and path search disagree");
    (false, witness)
}

/// Whether `p` is blocked by `z`: some interior non-collider lies in `z`, or
/// some interior collider has no descendant in `z`.
pub fn path_blocked(g: &Admg, p: &Path, z: &NodeSet) -> Result<bool> {
    p.validate(g)?;
    let zm = g.mask(z)?;
    let ip = IdxPath::from_path(g, p)?;
    Ok(!ip.open_given(&zm, &g.ancestors_mask(&zm)))
}

/// Whether a route is open given `z`, applying the blocking rule to every
/// consecutive triple of visits.
pub fn route_open(g: &Admg, r: &Route, z: &NodeSet) -> Result<bool> {
    r.validate(g)?;
    let zm = g.mask(z)?;
    let an_z = g.ancestors_mask(&zm);
    let steps = r.steps();
    for i in 1..steps.len() {
        let v = g.idx(steps[i].from.as_str())?;
        let collider =
            steps[i - 1].mark_at_exit == Mark::Head && steps[i].mark_at_entry == Mark::Head;
        if !interior_open(v, collider, &zm, &an_z) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every simple path of at most `max_len` edges from `a` to `b` that meets
/// `a` only at its start and `b` only at its end, shortest first.
pub fn enumerate_paths(g: &Admg, a: &NodeSet, b: &NodeSet, max_len: usize) -> Result<Vec<Path>> {
    let (am, bm) = (g.mask(a)?, g.mask(b)?);
    if !a.is_disjoint(b) {
        return Err(Error::InvalidQuery("endpoint sets overlap".into()));
    }
    let mut out: Vec<IdxPath> = Vec::new();
    walk_paths(g, &am, &bm, max_len, &|_, _| true, &mut |p| {
        out.push(p.clone());
        ControlFlow::Continue(())
    });
    out.sort_by_key(|p| p.steps.len());
    Ok(out.iter().map(|p| p.to_path(g)).collect())
}

/// d-separation of `a` and `b` given `z`, with the shortest open path as a
/// witness when they are connected.
pub fn d_separated(g: &Admg, a: &NodeSet, b: &NodeSet, z: &NodeSet) -> Result<SepVerdict> {
    let (am, bm, zm) = (g.mask(a)?, g.mask(b)?, g.mask(z)?);
    disjoint3(a, b, z)?;
    let (separated, witness) = d_separated_mask(g, &am, &bm, &zm);
    Ok(SepVerdict {
        separated,
        witness: witness.map(|p| p.to_path(g)),
    })
}

/// Extracts the direct route: start at the last visit of the first node,
/// then repeatedly step to the successor visit and jump to the last visit of
/// that node, until the route's end node is reached.
pub fn direct_route(g: &Admg, r: &Route) -> Result<Path> {
    r.validate(g)?;
    let visits = r.visits();
    let last_visit = |node| {
        visits
            .iter()
            .rposition(|v| *v == node)
            .expect("node is visited")
    };
    let end = r.end();
    let first = last_visit(visits[0]);
    let mut pos = first;
    let mut steps = Vec::new();
    while visits[pos] != end {
        steps.push(r.steps()[pos].clone());
        pos = last_visit(visits[pos + 1]);
    }
    Ok(Path::new(visits[first].clone(), steps))
}

/// A path from `a` to `b` whose interior nodes are all colliders and whose
/// nodes are all ancestors of `a ∪ b`; `None` when there is none.
pub fn find_inducing_path(g: &Admg, a: &NodeSet, b: &NodeSet) -> Result<Option<Path>> {
    let (am, bm) = (g.mask(a)?, g.mask(b)?);
    if !a.is_disjoint(b) {
        return Err(Error::InvalidQuery("endpoint sets overlap".into()));
    }
    let ab: Vec<bool> = am.iter().zip(&bm).map(|(x, y)| *x || *y).collect();
    let anc = g.ancestors_mask(&ab);
    let found = shortest_path(g, &am, &bm, &|v, collider| collider && anc[v], &|_| true);
    Ok(found.map(|p| p.to_path(g)))
}
