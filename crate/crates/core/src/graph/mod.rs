//! Acyclic directed mixed graphs and the node-set vocabulary used everywhere
//! else in the crate.
//!
//! Graphs are immutable once built. Every transform returns a fresh [`Admg`]
//! with the same node order as its input, so outputs stay reproducible.

mod parse;
mod transform;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use parse::parse_graph;
pub use transform::{
    ancestors, cut_incoming, cut_outgoing, descendants, latent_project, proper_causal_nodes,
};

/// A node name. Names are compared case-sensitively.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Self {
        NodeId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Whether `name` is accepted by the graph text format: a letter or
    /// underscore, then letters, digits, `_` or `@` (as in `Y@do`).
    pub fn is_valid_name(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '@')
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl From<&NodeId> for NodeId {
    fn from(s: &NodeId) -> Self {
        s.clone()
    }
}

impl std::borrow::Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// A set of nodes, iterated in name order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeSet(BTreeSet<NodeId>);

impl NodeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<NodeId>,
    {
        NodeSet(names.into_iter().map(Into::into).collect())
    }

    pub fn insert(&mut self, node: impl Into<NodeId>) -> bool {
        self.0.insert(node.into())
    }

    pub fn remove(&mut self, node: &str) -> bool {
        self.0.remove(node)
    }

    pub fn contains(&self, node: &str) -> bool {
        self.0.contains(node)
    }

    pub fn iter(&self) -> impl Iterator<Item = &NodeId> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn names(&self) -> Vec<&str> {
        self.0.iter().map(NodeId::as_str).collect()
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<T: IntoIterator<Item = NodeId>>(iter: T) -> Self {
        NodeSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = &'a NodeId;
    type IntoIter = std::collections::btree_set::Iter<'a, NodeId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl IntoIterator for NodeSet {
    type Item = NodeId;
    type IntoIter = std::collections::btree_set::IntoIter<NodeId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Directed,
    Bidirected,
}

/// The kind of edge end sitting at a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mark {
    Tail,
    Head,
}

/// One incidence seen from a node: the neighbour, the edge kind and the two
/// edge-end marks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Incidence {
    pub other: usize,
    pub kind: EdgeKind,
    pub mark_here: Mark,
    pub mark_there: Mark,
}

/// An acyclic directed mixed graph in latent-projection form.
#[derive(Clone, Debug)]
pub struct Admg {
    names: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    directed: BTreeSet<(usize, usize)>,
    // stored with the smaller index first
    bidirected: BTreeSet<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    // per node, sorted by (neighbour name, edge kind, marks)
    incidences: Vec<Vec<Incidence>>,
    // position of each node in name order
    rank: Vec<usize>,
}

impl PartialEq for Admg {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.directed == other.directed
            && self.bidirected == other.bidirected
    }
}

impl Eq for Admg {}

impl Default for Admg {
    fn default() -> Self {
        Admg::builder().build().expect("empty graph is acyclic")
    }
}

/// Incremental constructor; acyclicity is checked in [`AdmgBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct AdmgBuilder {
    names: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    directed: BTreeSet<(usize, usize)>,
    bidirected: BTreeSet<(usize, usize)>,
}

impl AdmgBuilder {
    /// Declares a node (no-op if present) and returns its index.
    pub fn node(&mut self, name: impl Into<NodeId>) -> usize {
        let name = name.into();
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        i
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn directed(
        &mut self,
        tail: impl Into<NodeId>,
        head: impl Into<NodeId>,
    ) -> Result<&mut Self> {
        let (t, h) = (self.node(tail), self.node(head));
        if t == h {
            return Err(Error::SelfLoop(self.names[t].to_string()));
        }
        if !self.directed.insert((t, h)) {
            return Err(Error::DuplicateEdge(format!(
                "{} -> {}",
                self.names[t], self.names[h]
            )));
        }
        Ok(self)
    }

    pub fn bidirected(&mut self, a: impl Into<NodeId>, b: impl Into<NodeId>) -> Result<&mut Self> {
        let (a, b) = (self.node(a), self.node(b));
        if a == b {
            return Err(Error::SelfLoop(self.names[a].to_string()));
        }
        if !self.bidirected.insert((a.min(b), a.max(b))) {
            return Err(Error::DuplicateEdge(format!(
                "{} <-> {}",
                self.names[a], self.names[b]
            )));
        }
        Ok(self)
    }

    pub fn build(self) -> Result<Admg> {
        Admg::from_parts(self.names, self.directed, self.bidirected)
    }
}

impl Admg {
    pub fn builder() -> AdmgBuilder {
        AdmgBuilder::default()
    }

    /// Builds a graph from already-deduplicated index edges.
    pub(crate) fn from_parts(
        names: Vec<NodeId>,
        directed: BTreeSet<(usize, usize)>,
        bidirected: BTreeSet<(usize, usize)>,
    ) -> Result<Admg> {
        let n = names.len();
        let index: HashMap<NodeId, usize> = names
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(t, h) in &directed {
            children[t].push(h);
            parents[h].push(t);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let mut rank = vec![0; n];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        let mut incidences = vec![Vec::new(); n];
        for &(t, h) in &directed {
            incidences[t].push(Incidence {
                other: h,
                kind: EdgeKind::Directed,
                mark_here: Mark::Tail,
                mark_there: Mark::Head,
            });
            incidences[h].push(Incidence {
                other: t,
                kind: EdgeKind::Directed,
                mark_here: Mark::Head,
                mark_there: Mark::Tail,
            });
        }
        for &(a, b) in &bidirected {
            for (x, y) in [(a, b), (b, a)] {
                incidences[x].push(Incidence {
                    other: y,
                    kind: EdgeKind::Bidirected,
                    mark_here: Mark::Head,
                    mark_there: Mark::Head,
                });
            }
        }
        for inc in &mut incidences {
            inc.sort_by_key(|e| (rank[e.other], e.kind, e.mark_here, e.mark_there));
        }
        let g = Admg {
            names,
            index,
            directed,
            bidirected,
            parents,
            children,
            incidences,
            rank,
        };
        if let Some(v) = g.find_cycle_node() {
            return Err(Error::Cycle(g.names[v].to_string()));
        }
        Ok(g)
    }

    fn find_cycle_node(&self) -> Option<usize> {
        let order = self.kahn();
        if order.len() == self.len() {
            return None;
        }
        let mut seen = vec![false; self.len()];
        for &v in &order {
            seen[v] = true;
        }
        // smallest-index node left over sits on or downstream of a cycle; walk
        // parents until one repeats to land on the cycle itself
        let mut v = (0..self.len()).find(|&v| !seen[v])?;
        let mut visited = vec![false; self.len()];
        while !visited[v] {
            visited[v] = true;
            v = *self.parents[v].iter().find(|&&p| !seen[p])?;
        }
        Some(v)
    }

    fn kahn(&self) -> Vec<usize> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = stack.pop() {
            order.push(v);
            for &c in self.children[v].iter().rev() {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    stack.push(c);
                }
            }
        }
        order
    }

    /// A topological order of the directed part.
    pub(crate) fn topological_order(&self) -> Vec<usize> {
        self.kahn()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Nodes in first-mention order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.names
    }

    pub fn node_set(&self) -> NodeSet {
        self.names.iter().cloned().collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub(crate) fn idx(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_owned()))
    }

    pub(crate) fn name(&self, i: usize) -> &NodeId {
        &self.names[i]
    }

    pub(crate) fn rank(&self, i: usize) -> usize {
        self.rank[i]
    }

    pub fn has_directed(&self, tail: &str, head: &str) -> bool {
        match (self.index.get(tail), self.index.get(head)) {
            (Some(&t), Some(&h)) => self.directed.contains(&(t, h)),
            _ => false,
        }
    }

    pub fn has_bidirected(&self, a: &str, b: &str) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&a), Some(&b)) => self.bidirected.contains(&(a.min(b), a.max(b))),
            _ => false,
        }
    }

    /// Directed edges as (tail, head), ordered by node position.
    pub fn directed_edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> + '_ {
        self.directed
            .iter()
            .map(move |&(t, h)| (&self.names[t], &self.names[h]))
    }

    /// Bidirected edges, each reported once with the earlier-declared endpoint first.
    pub fn bidirected_edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> + '_ {
        self.bidirected
            .iter()
            .map(move |&(a, b)| (&self.names[a], &self.names[b]))
    }

    pub fn num_directed(&self) -> usize {
        self.directed.len()
    }

    pub fn num_bidirected(&self) -> usize {
        self.bidirected.len()
    }

    pub(crate) fn bidirected_idx(&self) -> &BTreeSet<(usize, usize)> {
        &self.bidirected
    }

    pub(crate) fn parents_idx(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub(crate) fn children_idx(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub(crate) fn incidences(&self, v: usize) -> &[Incidence] {
        &self.incidences[v]
    }

    pub fn parents(&self, node: &str) -> Result<NodeSet> {
        let v = self.idx(node)?;
        Ok(self.parents[v]
            .iter()
            .map(|&p| self.names[p].clone())
            .collect())
    }

    pub fn children(&self, node: &str) -> Result<NodeSet> {
        let v = self.idx(node)?;
        Ok(self.children[v]
            .iter()
            .map(|&c| self.names[c].clone())
            .collect())
    }

    /// Converts a node set to a membership mask, rejecting unknown names.
    pub(crate) fn mask(&self, set: &NodeSet) -> Result<Vec<bool>> {
        let mut m = vec![false; self.len()];
        for n in set {
            m[self.idx(n.as_str())?] = true;
        }
        Ok(m)
    }

    pub(crate) fn set_of(&self, mask: &[bool]) -> NodeSet {
        mask.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.names[i].clone())
            .collect()
    }

    /// Builds the graph on the same node list with a filtered edge set.
    pub(crate) fn with_edges(
        &self,
        keep_directed: impl Fn(usize, usize) -> bool,
        keep_bidirected: impl Fn(usize, usize) -> bool,
    ) -> Admg {
        let directed = self
            .directed
            .iter()
            .copied()
            .filter(|&(t, h)| keep_directed(t, h))
            .collect();
        let bidirected = self
            .bidirected
            .iter()
            .copied()
            .filter(|&(a, b)| keep_bidirected(a, b))
            .collect();
        Admg::from_parts(self.names.clone(), directed, bidirected)
            .expect("edge subsets of an acyclic graph are acyclic")
    }

    /// The subgraph induced on the nodes where `keep` is set, preserving order.
    pub(crate) fn induced(&self, keep: &[bool]) -> Admg {
        let mut remap = vec![usize::MAX; self.len()];
        let mut names = Vec::new();
        for (i, n) in self.names.iter().enumerate() {
            if keep[i] {
                remap[i] = names.len();
                names.push(n.clone());
            }
        }
        let directed = self
            .directed
            .iter()
            .filter(|&&(t, h)| keep[t] && keep[h])
            .map(|&(t, h)| (remap[t], remap[h]))
            .collect();
        let bidirected = self
            .bidirected
            .iter()
            .filter(|&&(a, b)| keep[a] && keep[b])
            .map(|&(a, b)| (remap[a].min(remap[b]), remap[a].max(remap[b])))
            .collect();
        Admg::from_parts(names, directed, bidirected).expect("induced subgraph is acyclic")
    }

    /// Serializes to the line-oriented text format accepted by [`parse_graph`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Admg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.names.is_empty() {
            f.write_str("node")?;
            for n in &self.names {
                write!(f, " {n}")?;
            }
            writeln!(f)?;
        }
        for (t, h) in self.directed_edges() {
            writeln!(f, "{t} -> {h}")?;
        }
        for (a, b) in self.bidirected_edges() {
            writeln!(f, "{a} <-> {b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_rejects_cycles_and_duplicates() {
        let mut b = Admg::builder();
        b.directed("A", "B").unwrap();
        assert!(matches!(b.directed("A", "B"), Err(Error::DuplicateEdge(_))));
        b.directed("B", "C").unwrap().directed("C", "A").unwrap();
        assert!(matches!(b.build(), Err(Error::Cycle(_))));
    }

    #[test]
    fn parallel_directed_and_bidirected_allowed() {
        let mut b = Admg::builder();
        b.directed("A", "B").unwrap().bidirected("B", "A").unwrap();
        let g = b.build().unwrap();
        assert!(g.has_directed("A", "B"));
        assert!(g.has_bidirected("A", "B"));
        assert_eq!(g.incidences(0).len(), 2);
    }

    #[test]
    fn bidirected_self_loop_rejected() {
        let mut b = Admg::builder();
        assert!(matches!(b.bidirected("A", "A"), Err(Error::SelfLoop(_))));
    }

    #[test]
    fn names() {
        assert!(NodeId::is_valid_name("_x1"));
        assert!(NodeId::is_valid_name("Z"));
        assert!(!NodeId::is_valid_name("1x"));
        assert!(!NodeId::is_valid_name("a-b"));
        assert!(!NodeId::is_valid_name(""));
    }

    #[test]
    fn node_set_is_name_sorted() {
        let s = NodeSet::from_names(["b", "B", "a"]);
        assert_eq!(s.names(), vec!["B", "a", "b"]);
        assert_eq!(s.to_string(), "{B, a, b}");
    }
}
