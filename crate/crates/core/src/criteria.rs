//! Covariate-adjustment criteria and the set constructions built on them.
//!
//! [`adjustment_criterion`] is complete: it holds exactly when adjusting for
//! `Z` yields the interventional distribution in every model inducing the
//! graph. [`backdoor_criterion`] is the classic sufficient condition. The
//! magnification-based check in [`theorem7_check`] reaches the same verdict
//! without going through counterfactuals.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Admg, NodeId, NodeSet};
use crate::separation::{self, interior_open, walk_paths, IdxPath, Path};

/// Treatments `x`, outcomes `y` and covariates `z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdjustmentQuery {
    pub x: NodeSet,
    pub y: NodeSet,
    pub z: NodeSet,
}

impl AdjustmentQuery {
    pub fn new(x: NodeSet, y: NodeSet, z: NodeSet) -> Self {
        AdjustmentQuery { x, y, z }
    }

    /// Convenience constructor from name lists.
    pub fn from_names(x: &[&str], y: &[&str], z: &[&str]) -> Self {
        AdjustmentQuery {
            x: NodeSet::from_names(x.iter().copied()),
            y: NodeSet::from_names(y.iter().copied()),
            z: NodeSet::from_names(z.iter().copied()),
        }
    }

    pub fn with_z(&self, z: NodeSet) -> Self {
        AdjustmentQuery {
            x: self.x.clone(),
            y: self.y.clone(),
            z,
        }
    }

    pub fn validate(&self, g: &Admg) -> Result<()> {
        for n in self.x.iter().chain(&self.y).chain(&self.z) {
            if !g.contains(n.as_str()) {
                return Err(Error::UnknownNode(n.to_string()));
            }
        }
        if self.x.is_empty() || self.y.is_empty() {
            return Err(Error::InvalidQuery(
                "treatments and outcomes must be non-empty".into(),
            ));
        }
        separation::disjoint3(&self.x, &self.y, &self.z)
    }
}

impl fmt::Display for AdjustmentQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X={} Y={} Z={}", self.x, self.y, self.z)
    }
}

/// Why a criterion failed, with a checkable witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    /// `offender` is a covariate descending (with arrows into X cut) from
    /// `causal_node`, a non-treatment node on a proper causal path.
    Condition1 {
        offender: NodeId,
        causal_node: NodeId,
    },
    /// A non-causal path from X to Y left open by Z.
    Condition2 {
        open_path: Path,
    },
    BackdoorDescendant {
        offender: NodeId,
    },
    BackdoorOpenPath {
        open_path: Path,
    },
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Condition1 { offender, causal_node } => write!(
                f,
                "covariate {offender} descends from {causal_node}, which lies on a proper causal path"
            ),
            Failure::Condition2 { open_path } => write!(f, "non-causal path {open_path} is open"),
            Failure::BackdoorDescendant { offender } => {
                write!(f, "covariate {offender} is a descendant of a treatment")
            }
            Failure::BackdoorOpenPath { open_path } => write!(f, "back-door path {open_path} is open"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub holds: bool,
    pub failure: Option<Failure>,
}

impl CriterionVerdict {
    fn pass() -> Self {
        CriterionVerdict {
            holds: true,
            failure: None,
        }
    }

    fn fail(failure: Failure) -> Self {
        CriterionVerdict {
            holds: false,
            failure: Some(failure),
        }
    }

    pub fn witness_path(&self) -> Option<&Path> {
        match &self.failure {
            Some(Failure::Condition2 { open_path } | Failure::BackdoorOpenPath { open_path }) => {
                Some(open_path)
            }
            _ => None,
        }
    }
}

/// How condition 2 of the adjustment criterion is checked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// d-separation in the proper back-door graph.
    #[default]
    Fast,
    /// Explicit enumeration of every simple path from X to Y.
    Reference,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "fast" => Ok(Mode::Fast),
            "reference" => Ok(Mode::Reference),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

fn first_member(g: &Admg, mask: &[bool]) -> Option<usize> {
    (0..g.len()).filter(|&v| mask[v]).min_by_key(|&v| g.rank(v))
}

/// The back-door criterion: no covariate descends from a treatment, and
/// every path into a treatment is blocked.
pub fn backdoor_criterion(g: &Admg, q: &AdjustmentQuery) -> Result<CriterionVerdict> {
    q.validate(g)?;
    let (x, y, z) = (g.mask(&q.x)?, g.mask(&q.y)?, g.mask(&q.z)?);
    let de_x = g.descendants_mask(&x);
    let bad: Vec<bool> = (0..g.len()).map(|v| z[v] && de_x[v]).collect();
    if let Some(v) = first_member(g, &bad) {
        return Ok(CriterionVerdict::fail(Failure::BackdoorDescendant {
            offender: g.name(v).clone(),
        }));
    }
    // With edges out of X removed every path from X starts with an arrowhead
    // at X; without covariate descendants of X ancestry of Z is unchanged.
    let cut = g.cut_outgoing_mask(&x);
    let (separated, witness) = separation::d_separated_mask(&cut, &x, &y, &z);
    if separated {
        Ok(CriterionVerdict::pass())
    } else {
        let open_path = witness.expect("connected verdict has a witness").to_path(g);
        Ok(CriterionVerdict::fail(Failure::BackdoorOpenPath {
            open_path,
        }))
    }
}

fn condition1(g: &Admg, x: &[bool], y: &[bool], z: &[bool]) -> Option<Failure> {
    let pcn = g.proper_causal_mask(x, y);
    let causal: Vec<bool> = (0..g.len()).map(|v| pcn[v] && !x[v]).collect();
    let gx = g.cut_incoming_mask(x);
    let forbidden = gx.descendants_mask(&causal);
    let mut offenders: Vec<usize> = (0..g.len()).filter(|&v| z[v] && forbidden[v]).collect();
    offenders.sort_by_key(|&v| g.rank(v));
    let offender = *offenders.first()?;
    let mut sources: Vec<usize> = (0..g.len()).filter(|&v| causal[v]).collect();
    sources.sort_by_key(|&v| g.rank(v));
    let causal_node = sources
        .into_iter()
        .find(|&c| {
            let mut seed = vec![false; g.len()];
            seed[c] = true;
            gx.descendants_mask(&seed)[offender]
        })
        .expect("forbidden node has a causal ancestor");
    Some(Failure::Condition1 {
        offender: g.name(offender).clone(),
        causal_node: g.name(causal_node).clone(),
    })
}

/// The complete adjustment criterion.
pub fn adjustment_criterion(g: &Admg, q: &AdjustmentQuery, mode: Mode) -> Result<CriterionVerdict> {
    q.validate(g)?;
    let (x, y, z) = (g.mask(&q.x)?, g.mask(&q.y)?, g.mask(&q.z)?);
    if let Some(f) = condition1(g, &x, &y, &z) {
        return Ok(CriterionVerdict::fail(f));
    }
    let witness = match mode {
        Mode::Fast => {
            let pbd = proper_backdoor_mask(g, &x, &y);
            let (_, w) = separation::d_separated_mask(&pbd, &x, &y, &z);
            w
        }
        Mode::Reference => open_noncausal_by_enumeration(g, &x, &y, &z),
    };
    Ok(match witness {
        None => CriterionVerdict::pass(),
        Some(p) => CriterionVerdict::fail(Failure::Condition2 {
            open_path: p.to_path(g),
        }),
    })
}

/// Walks every simple path from X to Y with no pruning and returns the
/// shortest (then lexicographically least) non-causal one that is open.
fn open_noncausal_by_enumeration(g: &Admg, x: &[bool], y: &[bool], z: &[bool]) -> Option<IdxPath> {
    let an_z = g.ancestors_mask(z);
    let mut best: Option<IdxPath> = None;
    walk_paths(g, x, y, g.len(), &|_, _| true, &mut |p: &IdxPath| {
        if best
            .as_ref()
            .is_some_and(|b| b.steps.len() <= p.steps.len())
            || p.is_causal()
        {
            return ControlFlow::Continue(());
        }
        let open = (1..p.nodes.len() - 1).all(|i| {
            let collider = p.steps[i - 1].exit == crate::graph::Mark::Head
                && p.steps[i].entry == crate::graph::Mark::Head;
            interior_open(p.nodes[i], collider, z, &an_z)
        });
        if open {
            best = Some(p.clone());
        }
        ControlFlow::Continue(())
    });
    best
}

fn proper_backdoor_mask(g: &Admg, x: &[bool], y: &[bool]) -> Admg {
    let pcn = g.proper_causal_mask(x, y);
    g.with_edges(|t, h| !(x[t] && pcn[h] && !x[h]), |_, _| true)
}

/// Removes the first edge of every proper causal path from X to Y.
pub fn proper_backdoor_graph(g: &Admg, x: &NodeSet, y: &NodeSet) -> Result<Admg> {
    let (xm, ym) = (g.mask(x)?, g.mask(y)?);
    if !x.is_disjoint(y) {
        return Err(Error::InvalidQuery(
            "treatments and outcomes overlap".into(),
        ));
    }
    Ok(proper_backdoor_mask(g, &xm, &ym))
}

/// Drops covariates that descend from a treatment.
pub fn strip_to_backdoor(g: &Admg, q: &AdjustmentQuery) -> Result<NodeSet> {
    q.validate(g)?;
    let de_x = crate::graph::descendants(g, &q.x)?;
    Ok(q.z.difference(&de_x))
}

/// Ancestors of X ∪ Y that are neither treatments, outcomes nor on a proper
/// causal path. Valid whenever any adjustment set is.
pub fn canonical_adjustment_set(g: &Admg, x: &NodeSet, y: &NodeSet) -> Result<NodeSet> {
    let (xm, ym) = (g.mask(x)?, g.mask(y)?);
    if !x.is_disjoint(y) {
        return Err(Error::InvalidQuery(
            "treatments and outcomes overlap".into(),
        ));
    }
    let xy: Vec<bool> = xm.iter().zip(&ym).map(|(a, b)| *a || *b).collect();
    let an = g.ancestors_mask(&xy);
    let pcn = g.proper_causal_mask(&xm, &ym);
    let keep: Vec<bool> = (0..g.len()).map(|v| an[v] && !xy[v] && !pcn[v]).collect();
    Ok(g.set_of(&keep))
}

pub fn exists_adjustment_set(g: &Admg, x: &NodeSet, y: &NodeSet) -> Result<bool> {
    let z = canonical_adjustment_set(g, x, y)?;
    let q = AdjustmentQuery::new(x.clone(), y.clone(), z);
    Ok(adjustment_criterion(g, &q, Mode::Fast)?.holds)
}

const MAX_ENUMERATION_CANDIDATES: usize = 24;

/// Valid adjustment sets drawn from `candidates`, smallest first and
/// lexicographic within a size, at most `limit` of them.
pub fn enumerate_adjustment_sets(
    g: &Admg,
    x: &NodeSet,
    y: &NodeSet,
    candidates: &NodeSet,
    limit: usize,
) -> Result<Vec<NodeSet>> {
    if limit == 0 {
        return Err(Error::InvalidArgument("limit must be positive".into()));
    }
    g.mask(candidates)?;
    if !candidates.is_disjoint(x) || !candidates.is_disjoint(y) {
        return Err(Error::InvalidQuery(
            "candidates overlap treatments or outcomes".into(),
        ));
    }
    let pool: Vec<&NodeId> = candidates.iter().collect();
    if pool.len() > MAX_ENUMERATION_CANDIDATES {
        return Err(Error::InvalidArgument(format!(
            "{} candidates is too many to enumerate (limit {MAX_ENUMERATION_CANDIDATES})",
            pool.len()
        )));
    }
    let mut out = Vec::new();
    for size in 0..=pool.len() {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let z: NodeSet = idx.iter().map(|&i| pool[i].clone()).collect();
            let q = AdjustmentQuery::new(x.clone(), y.clone(), z);
            if adjustment_criterion(g, &q, Mode::Fast)?.holds {
                out.push(q.z);
                if out.len() == limit {
                    return Ok(out);
                }
            }
            // next combination in lexicographic order
            let Some(i) = (0..size).rev().find(|&i| idx[i] < pool.len() - size + i) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(out)
}

fn sorted_pair<'a>(a: &'a NodeId, b: &'a NodeId) -> (&'a NodeId, &'a NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Replaces every bidirected arc by an explicit parent `__W_<A>_<B>` and
/// every listed directed edge by a mediator `__C_<A>_<B>`.
pub fn magnify(g: &Admg, edges: &[(NodeId, NodeId)]) -> Result<Admg> {
    for (t, h) in edges {
        if !g.has_directed(t.as_str(), h.as_str()) {
            return Err(Error::NotAnEdge(t.to_string(), h.to_string()));
        }
    }
    let mut b = Admg::builder();
    for n in g.nodes() {
        b.node(n.clone());
    }
    let fresh =
        |b: &crate::graph::AdmgBuilder, prefix: &str, p: &NodeId, q: &NodeId| -> Result<NodeId> {
            let (lo, hi) = sorted_pair(p, q);
            let name = format!("__{prefix}_{lo}_{hi}");
            if b.contains(&name) {
                return Err(Error::NameCollision(name));
            }
            Ok(NodeId::new(name))
        };
    for (t, h) in g.directed_edges() {
        if edges.iter().any(|(a, c)| a == t && c == h) {
            let c = fresh(&b, "C", t, h)?;
            b.directed(t.clone(), c.clone())?;
            b.directed(c, h.clone())?;
        } else {
            b.directed(t.clone(), h.clone())?;
        }
    }
    for (p, q) in g.bidirected_edges() {
        let w = fresh(&b, "W", p, q)?;
        b.directed(w.clone(), p.clone())?;
        b.directed(w, q.clone())?;
    }
    b.build()
}

/// Every directed edge whose tail is in `set`.
pub fn edges_out_of(g: &Admg, set: &NodeSet) -> Result<Vec<(NodeId, NodeId)>> {
    g.mask(set)?;
    Ok(g.directed_edges()
        .filter(|(t, _)| set.contains(t.as_str()))
        .map(|(t, h)| (t.clone(), h.clone()))
        .collect())
}

/// The set intersecting ancestors of Z, non-descendants of X, and nodes
/// d-connected to Y given Z once X is deleted. Members of X, Y and Z are
/// never returned.
pub fn find_l(ge: &Admg, x: &NodeSet, y: &NodeSet, z: &NodeSet) -> Result<NodeSet> {
    let (xm, ym, zm) = (ge.mask(x)?, ge.mask(y)?, ge.mask(z)?);
    separation::disjoint3(x, y, z)?;
    let an_z = ge.ancestors_mask(&zm);
    let de_x = ge.descendants_mask(&xm);
    let keep: Vec<bool> = xm.iter().map(|b| !b).collect();
    let sub = ge.induced(&keep);
    let reached = separation::reachable(&sub, &sub.mask(y)?, &sub.mask(z)?);
    let connected = sub.set_of(&reached);
    let out: Vec<bool> = (0..ge.len())
        .map(|v| {
            an_z[v]
                && !de_x[v]
                && !zm[v]
                && !ym[v]
                && !xm[v]
                && connected.contains(ge.name(v).as_str())
        })
        .collect();
    Ok(ge.set_of(&out))
}

/// Everything computed by [`theorem7_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem7Report {
    pub magnified: Admg,
    pub l: NodeSet,
    pub z_nd: NodeSet,
    pub z_d: NodeSet,
    /// L ∪ Z_nd satisfies the back-door criterion in the magnified graph.
    pub clause_a: bool,
    /// X is d-separated from L given Z.
    pub clause_b: bool,
    /// Y is d-separated from Z_d given X ∪ Z_nd ∪ L.
    pub clause_c: bool,
}

impl Theorem7Report {
    pub fn holds(&self) -> bool {
        self.clause_a && self.clause_b && self.clause_c
    }
}

pub fn theorem7_report(g: &Admg, q: &AdjustmentQuery) -> Result<Theorem7Report> {
    q.validate(g)?;
    let ge = magnify(g, &edges_out_of(g, &q.y)?)?;
    let de_x = crate::graph::descendants(g, &q.x)?;
    let z_nd = q.z.difference(&de_x);
    let z_d = q.z.intersection(&de_x);
    let l = find_l(&ge, &q.x, &q.y, &q.z)?;
    let clause_a = backdoor_criterion(
        &ge,
        &AdjustmentQuery::new(q.x.clone(), q.y.clone(), l.union(&z_nd)),
    )?
    .holds;
    let clause_b = l.is_empty() || separation::d_separated(&ge, &q.x, &l, &q.z)?.separated;
    let clause_c = z_d.is_empty()
        || separation::d_separated(&ge, &q.y, &z_d, &q.x.union(&z_nd).union(&l))?.separated;
    Ok(Theorem7Report {
        magnified: ge,
        l,
        z_nd,
        z_d,
        clause_a,
        clause_b,
        clause_c,
    })
}

/// Adjustment validity decided through the magnified graph and a
/// constructed auxiliary set, without counterfactuals.
pub fn theorem7_check(g: &Admg, q: &AdjustmentQuery) -> Result<bool> {
    Ok(theorem7_report(g, q)?.holds())
}

/// Which criterion produced a [`VerdictReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionName {
    Adjustment,
    Backdoor,
    Theorem7,
}

/// The clauses of the magnified-graph check that failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseFailure {
    pub failed_clauses: Vec<char>,
    pub l: NodeSet,
}

/// The serialized form of a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub criterion: CriterionName,
    pub holds: bool,
    pub failure: Option<ReportFailure>,
    pub witness_path: Option<Path>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportFailure {
    Criterion(Failure),
    Clauses(ClauseFailure),
}

impl VerdictReport {
    pub fn from_verdict(criterion: CriterionName, v: &CriterionVerdict) -> Self {
        VerdictReport {
            criterion,
            holds: v.holds,
            failure: v.failure.clone().map(ReportFailure::Criterion),
            witness_path: v.witness_path().cloned(),
        }
    }

    pub fn from_theorem7(r: &Theorem7Report) -> Self {
        let failed: Vec<char> = [('a', r.clause_a), ('b', r.clause_b), ('c', r.clause_c)]
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(c, _)| c)
            .collect();
        VerdictReport {
            criterion: CriterionName::Theorem7,
            holds: r.holds(),
            failure: (!failed.is_empty()).then(|| {
                ReportFailure::Clauses(ClauseFailure {
                    failed_clauses: failed,
                    l: r.l.clone(),
                })
            }),
            witness_path: None,
        }
    }

    /// The verdict this report was made from, for the two path-based criteria.
    pub fn to_verdict(&self) -> Option<CriterionVerdict> {
        let failure = match &self.failure {
            None => None,
            Some(ReportFailure::Criterion(f)) => Some(f.clone()),
            Some(ReportFailure::Clauses(_)) => return None,
        };
        Some(CriterionVerdict {
            holds: self.holds,
            failure,
        })
    }
}
