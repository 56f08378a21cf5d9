use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Admg, EdgeKind, Mark, NodeId};

/// One traversed edge. `mark_at_entry` is the edge end at `from`,
/// `mark_at_exit` the end at `to`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub from: NodeId,
    pub to: NodeId,
    pub kind: EdgeKind,
    pub mark_at_entry: Mark,
    pub mark_at_exit: Mark,
}

impl Step {
    pub fn forward(from: impl Into<NodeId>, to: impl Into<NodeId>) -> Step {
        Step::new(from, to, EdgeKind::Directed, Mark::Tail, Mark::Head)
    }

    pub fn backward(from: impl Into<NodeId>, to: impl Into<NodeId>) -> Step {
        Step::new(from, to, EdgeKind::Directed, Mark::Head, Mark::Tail)
    }

    pub fn bidirected(from: impl Into<NodeId>, to: impl Into<NodeId>) -> Step {
        Step::new(from, to, EdgeKind::Bidirected, Mark::Head, Mark::Head)
    }

    fn new(
        from: impl Into<NodeId>,
        to: impl Into<NodeId>,
        kind: EdgeKind,
        mark_at_entry: Mark,
        mark_at_exit: Mark,
    ) -> Step {
        Step {
            from: from.into(),
            to: to.into(),
            kind,
            mark_at_entry,
            mark_at_exit,
        }
    }

    fn arrow(&self) -> &'static str {
        match (self.mark_at_entry, self.mark_at_exit) {
            (Mark::Tail, Mark::Head) => "->",
            (Mark::Head, Mark::Tail) => "<-",
            (Mark::Head, Mark::Head) => "<->",
            (Mark::Tail, Mark::Tail) => "--",
        }
    }

    /// Checks mark consistency and that the edge exists in `g`.
    fn check(&self, g: &Admg) -> std::result::Result<(), String> {
        let ok_marks = matches!(
            (self.kind, self.mark_at_entry, self.mark_at_exit),
            (EdgeKind::Directed, Mark::Tail, Mark::Head)
                | (EdgeKind::Directed, Mark::Head, Mark::Tail)
                | (EdgeKind::Bidirected, Mark::Head, Mark::Head)
        );
        if !ok_marks {
            return Err(format!(
                "inconsistent marks on {} {} {}",
                self.from,
                self.arrow(),
                self.to
            ));
        }
        let present = match (self.kind, self.mark_at_entry) {
            (EdgeKind::Directed, Mark::Tail) => {
                g.has_directed(self.from.as_str(), self.to.as_str())
            }
            (EdgeKind::Directed, Mark::Head) => {
                g.has_directed(self.to.as_str(), self.from.as_str())
            }
            (EdgeKind::Bidirected, _) => g.has_bidirected(self.from.as_str(), self.to.as_str()),
        };
        if present {
            Ok(())
        } else {
            Err(format!(
                "no edge {} {} {}",
                self.from,
                self.arrow(),
                self.to
            ))
        }
    }
}

/// A walk that visits each node at most once.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    start: NodeId,
    steps: Vec<Step>,
}

impl Path {
    /// Creates a path without checking it against any graph; see [`Path::validate`].
    pub fn new(start: impl Into<NodeId>, steps: Vec<Step>) -> Path {
        Path {
            start: start.into(),
            steps,
        }
    }

    pub fn start(&self) -> &NodeId {
        &self.start
    }

    pub fn end(&self) -> &NodeId {
        self.steps.last().map_or(&self.start, |s| &s.to)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn nodes(&self) -> Vec<&NodeId> {
        std::iter::once(&self.start)
            .chain(self.steps.iter().map(|s| &s.to))
            .collect()
    }

    /// Directed, pointing away from the start at every step.
    pub fn is_causal(&self) -> bool {
        !self.steps.is_empty()
            && self
                .steps
                .iter()
                .all(|s| s.mark_at_entry == Mark::Tail && s.mark_at_exit == Mark::Head)
    }

    /// The first edge has an arrowhead at the start node.
    pub fn is_backdoor(&self) -> bool {
        self.steps
            .first()
            .is_some_and(|s| s.mark_at_entry == Mark::Head)
    }

    pub fn validate(&self, g: &Admg) -> Result<()> {
        check_walk(g, &self.start, &self.steps).map_err(Error::InvalidPath)?;
        let nodes = self.nodes();
        for (i, n) in nodes.iter().enumerate() {
            if nodes[..i].contains(n) {
                return Err(Error::InvalidPath(format!("node `{n}` repeats")));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_walk(
    g: &Admg,
    start: &NodeId,
    steps: &[Step],
) -> std::result::Result<(), String> {
    if !g.contains(start.as_str()) {
        return Err(format!("unknown node `{start}`"));
    }
    let mut at = start;
    for s in steps {
        if &s.from != at {
            return Err(format!(
                "step {} {} {} does not continue from `{at}`",
                s.from,
                s.arrow(),
                s.to
            ));
        }
        s.check(g)?;
        at = &s.to;
    }
    Ok(())
}

fn write_walk(f: &mut fmt::Formatter<'_>, start: &NodeId, steps: &[Step]) -> fmt::Result {
    write!(f, "{start}")?;
    for s in steps {
        write!(f, " {} {}", s.arrow(), s.to)?;
    }
    Ok(())
}

fn parse_walk(s: &str) -> Result<(NodeId, Vec<Step>)> {
    let bad = |m: &str| Error::InvalidPath(format!("{m} in `{s}`"));
    let mut tokens = s.split_whitespace();
    let start = tokens.next().ok_or_else(|| bad("empty path"))?;
    if !NodeId::is_valid_name(start) {
        return Err(bad("bad node name"));
    }
    let mut at = NodeId::from(start);
    let mut steps = Vec::new();
    while let Some(arrow) = tokens.next() {
        let to = tokens.next().ok_or_else(|| bad("dangling arrow"))?;
        if !NodeId::is_valid_name(to) {
            return Err(bad("bad node name"));
        }
        let step = match arrow {
            "->" => Step::forward(at.clone(), to),
            "<-" => Step::backward(at.clone(), to),
            "<->" => Step::bidirected(at.clone(), to),
            _ => return Err(bad("unknown arrow")),
        };
        at = step.to.clone();
        steps.push(step);
    }
    Ok((NodeId::from(start), steps))
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_walk(f, &self.start, &self.steps)
    }
}

impl FromStr for Path {
    type Err = Error;

    /// Parses `X -> A <-> B <- Y`. Only syntax is checked.
    fn from_str(s: &str) -> Result<Path> {
        let (start, steps) = parse_walk(s)?;
        Ok(Path { start, steps })
    }
}

impl serde::Serialize for Path {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Path {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Path, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A walk that may revisit nodes. Each visit carries the number of earlier
/// visits to the same node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    start: NodeId,
    steps: Vec<Step>,
    occurrence_labels: Vec<usize>,
}

impl Route {
    pub fn new(start: impl Into<NodeId>, steps: Vec<Step>) -> Route {
        let start = start.into();
        let mut labels = Vec::with_capacity(steps.len() + 1);
        let visits: Vec<&NodeId> = std::iter::once(&start)
            .chain(steps.iter().map(|s| &s.to))
            .collect();
        for (i, v) in visits.iter().enumerate() {
            labels.push(visits[..i].iter().filter(|w| *w == v).count());
        }
        Route {
            start,
            steps,
            occurrence_labels: labels,
        }
    }

    pub fn start(&self) -> &NodeId {
        &self.start
    }

    pub fn end(&self) -> &NodeId {
        self.steps.last().map_or(&self.start, |s| &s.to)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// One label per visit: 0 for a node's first visit, 1 for its second, ...
    pub fn occurrence_labels(&self) -> &[usize] {
        &self.occurrence_labels
    }

    pub fn visits(&self) -> Vec<&NodeId> {
        std::iter::once(&self.start)
            .chain(self.steps.iter().map(|s| &s.to))
            .collect()
    }

    pub fn validate(&self, g: &Admg) -> Result<()> {
        check_walk(g, &self.start, &self.steps).map_err(Error::InvalidRoute)?;
        if Route::new(self.start.clone(), self.steps.clone()).occurrence_labels
            != self.occurrence_labels
        {
            return Err(Error::InvalidRoute("occurrence labels out of sync".into()));
        }
        Ok(())
    }
}

impl From<Path> for Route {
    fn from(p: Path) -> Route {
        Route::new(p.start, p.steps)
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_walk(f, &self.start, &self.steps)
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Route> {
        let (start, steps) = parse_walk(s)?;
        Ok(Route::new(start, steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    #[test]
    fn display_and_parse() {
        let p: Path = "X -> A <-> B <- Y".parse().unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.to_string(), "X -> A <-> B <- Y");
        assert_eq!(p.steps()[1].kind, EdgeKind::Bidirected);
        assert!("X =>".parse::<Path>().is_err());
        assert!("X ->".parse::<Path>().is_err());
    }

    #[test]
    fn validation() {
        let g = parse_graph("Z -> X\nZ -> Y\nX -> Y").unwrap();
        let ok: Path = "X <- Z -> Y".parse().unwrap();
        ok.validate(&g).unwrap();
        assert!(!ok.is_causal());
        assert!(ok.is_backdoor());
        let wrong_dir: Path = "X -> Z -> Y".parse().unwrap();
        assert!(wrong_dir.validate(&g).is_err());
        let repeat: Path = "X <- Z -> X".parse().unwrap();
        assert!(repeat.validate(&g).is_err());
        let causal: Path = "X -> Y".parse().unwrap();
        assert!(causal.is_causal());
    }

    #[test]
    fn route_labels() {
        let r: Route = "X -> A <- B -> A -> Y".parse().unwrap();
        assert_eq!(r.occurrence_labels(), &[0, 0, 0, 1, 0]);
    }
}
