use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Admg, NodeId, NodeSet};

use super::factor::Factor;

/// Row sums of stored CPTs are within this of one.
pub const ROW_TOL: f64 = 1e-9;

/// A discrete structural causal model: a DAG with explicit latent roots and
/// one conditional probability table per node.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteScm {
    graph: Admg,
    expanded: Admg,
    latent: Vec<bool>,
    domains: Vec<usize>,
    /// Parent indices into `expanded`, in table order.
    parents: Vec<Vec<usize>>,
    /// Row-major: one row per parent assignment (first parent most
    /// significant), `domains[v]` entries per row.
    cpts: Vec<Vec<f64>>,
}

pub fn latent_name(a: &NodeId, b: &NodeId) -> NodeId {
    crate::twin::exogenous_name(a, b)
}

/// Draws a uniform point on the probability simplex and mixes it with the
/// uniform distribution so every entry is at least `eps`.
fn draw_row(rng: &mut ChaCha8Rng, size: usize, eps: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..size).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let scale = 1.0 - size as f64 * eps;
    raw.iter().map(|r| eps + scale * r / total).collect()
}

/// A random model inducing `g`. Every observed and latent variable has
/// `domain_size` values; each bidirected arc becomes one latent root.
pub fn random_scm(
    g: &Admg,
    seed: u64,
    domain_size: usize,
    positivity_eps: f64,
) -> Result<DiscreteScm> {
    if domain_size < 2 {
        return Err(Error::InvalidArgument(
            "domain size must be at least 2".into(),
        ));
    }
    if !(0.0..1.0 / domain_size as f64).contains(&positivity_eps) {
        return Err(Error::InvalidArgument(format!(
            "positivity eps {positivity_eps} outside [0, 1/{domain_size})"
        )));
    }
    let mut b = Admg::builder();
    for n in g.nodes() {
        b.node(n.clone());
    }
    for (t, h) in g.directed_edges() {
        b.directed(t.clone(), h.clone())?;
    }
    for (p, q) in g.bidirected_edges() {
        let u = latent_name(p, q);
        if b.contains(u.as_str()) {
            return Err(Error::NameCollision(u.to_string()));
        }
        b.directed(u.clone(), p.clone())?;
        b.directed(u, q.clone())?;
    }
    let expanded = b.build()?;
    let n = expanded.len();
    let latent: Vec<bool> = (0..n).map(|v| v >= g.len()).collect();
    let domains = vec![domain_size; n];
    let parents: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut p = expanded.parents_idx(v).to_vec();
            p.sort_unstable();
            p
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cpts = (0..n)
        .map(|v| {
            let rows: usize = parents[v].iter().map(|&p| domains[p]).product();
            (0..rows)
                .flat_map(|_| draw_row(&mut rng, domains[v], positivity_eps))
                .collect()
        })
        .collect();
    Ok(DiscreteScm {
        graph: g.clone(),
        expanded,
        latent,
        domains,
        parents,
        cpts,
    })
}

impl DiscreteScm {
    /// The observed graph the model induces.
    pub fn graph(&self) -> &Admg {
        &self.graph
    }

    pub fn expanded_dag(&self) -> &Admg {
        &self.expanded
    }

    pub fn latents(&self) -> NodeSet {
        self.expanded.set_of(&self.latent)
    }

    pub fn observed(&self) -> NodeSet {
        self.graph.node_set()
    }

    pub fn domain(&self, node: &str) -> Option<usize> {
        self.expanded.idx(node).ok().map(|v| self.domains[v])
    }

    pub fn parents_of(&self, node: &str) -> Result<Vec<NodeId>> {
        let v = self.expanded.idx(node)?;
        Ok(self.parents[v]
            .iter()
            .map(|&p| self.expanded.name(p).clone())
            .collect())
    }

    /// CPT rows of `node`, in row-major parent order.
    pub fn cpt_rows(&self, node: &str) -> Result<Vec<&[f64]>> {
        let v = self.expanded.idx(node)?;
        Ok(self.cpts[v].chunks(self.domains[v]).collect())
    }

    pub(crate) fn len(&self) -> usize {
        self.expanded.len()
    }

    pub(crate) fn is_latent(&self, v: usize) -> bool {
        self.latent[v]
    }

    pub(crate) fn domain_idx(&self, v: usize) -> usize {
        self.domains[v]
    }

    pub(crate) fn parents_idx(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub(crate) fn idx(&self, node: &str) -> Result<usize> {
        self.expanded.idx(node)
    }

    pub(crate) fn name(&self, v: usize) -> &NodeId {
        self.expanded.name(v)
    }

    /// The CPT row used when the parents take `values` (in table order).
    pub(crate) fn row(&self, v: usize, values: impl Iterator<Item = usize>) -> &[f64] {
        let mut r = 0;
        for (p, val) in self.parents[v].iter().zip(values) {
            r = r * self.domains[*p] + val;
        }
        let d = self.domains[v];
        &self.cpts[v][r * d..(r + 1) * d]
    }

    pub(crate) fn factor(&self, v: usize) -> Factor {
        let mut vars = self.parents[v].clone();
        vars.push(v);
        let sizes: Vec<usize> = vars.iter().map(|&w| self.domains[w]).collect();
        Factor::from_unsorted(&vars, &sizes, self.cpts[v].clone())
    }

    pub(crate) fn expanded_topological_order(&self) -> Vec<usize> {
        self.expanded.topological_order()
    }
}

/// The JSON form: node list (latents included), then per-node maps.
#[derive(Serialize, Deserialize)]
struct ScmJson {
    nodes: Vec<NodeId>,
    latents: Vec<NodeId>,
    domains: BTreeMap<NodeId, usize>,
    parents: BTreeMap<NodeId, Vec<NodeId>>,
    cpts: BTreeMap<NodeId, Vec<Vec<f64>>>,
}

impl Serialize for DiscreteScm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let names = self.expanded.nodes();
        let json = ScmJson {
            nodes: names.to_vec(),
            latents: self.latents().into_iter().collect(),
            domains: (0..self.len())
                .map(|v| (names[v].clone(), self.domains[v]))
                .collect(),
            parents: (0..self.len())
                .map(|v| {
                    (
                        names[v].clone(),
                        self.parents[v].iter().map(|&p| names[p].clone()).collect(),
                    )
                })
                .collect(),
            cpts: (0..self.len())
                .map(|v| {
                    (
                        names[v].clone(),
                        self.cpts[v]
                            .chunks(self.domains[v])
                            .map(<[f64]>::to_vec)
                            .collect(),
                    )
                })
                .collect(),
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteScm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = ScmJson::deserialize(d)?;
        DiscreteScm::from_json(json).map_err(serde::de::Error::custom)
    }
}

impl DiscreteScm {
    fn from_json(json: ScmJson) -> Result<DiscreteScm> {
        let bad = |m: String| Error::MalformedModel(m);
        let mut b = Admg::builder();
        for n in &json.nodes {
            if !NodeId::is_valid_name(n.as_str()) {
                return Err(bad(format!("invalid node name `{n}`")));
            }
            if b.contains(n.as_str()) {
                return Err(bad(format!("node `{n}` listed twice")));
            }
            b.node(n.clone());
        }
        let known = |n: &NodeId| json.nodes.contains(n);
        for key in json
            .domains
            .keys()
            .chain(json.parents.keys())
            .chain(json.cpts.keys())
            .chain(&json.latents)
        {
            if !known(key) {
                return Err(bad(format!("unknown node `{key}`")));
            }
        }
        let mut domains = Vec::new();
        let mut parents_named = Vec::new();
        for n in &json.nodes {
            let d = *json
                .domains
                .get(n)
                .ok_or_else(|| bad(format!("no domain for `{n}`")))?;
            if d < 2 {
                return Err(bad(format!("domain of `{n}` is smaller than 2")));
            }
            domains.push(d);
            let ps = json.parents.get(n).cloned().unwrap_or_default();
            for p in &ps {
                if !known(p) {
                    return Err(bad(format!("unknown parent `{p}` of `{n}`")));
                }
                b.directed(p.clone(), n.clone())
                    .map_err(|e| bad(e.to_string()))?;
            }
            parents_named.push(ps);
        }
        let expanded = b.build().map_err(|e| bad(e.to_string()))?;
        let latent: Vec<bool> = json
            .nodes
            .iter()
            .map(|n| json.latents.contains(n))
            .collect();
        let parents: Vec<Vec<usize>> = parents_named
            .iter()
            .map(|ps| {
                ps.iter()
                    .map(|p| expanded.idx(p.as_str()).expect("declared"))
                    .collect()
            })
            .collect();
        let mut cpts = Vec::new();
        for (v, n) in json.nodes.iter().enumerate() {
            if latent[v] && !parents[v].is_empty() {
                return Err(bad(format!("latent `{n}` has parents")));
            }
            let rows = json
                .cpts
                .get(n)
                .ok_or_else(|| bad(format!("no CPT for `{n}`")))?;
            let want: usize = parents[v].iter().map(|&p| domains[p]).product();
            if rows.len() != want {
                return Err(bad(format!(
                    "`{n}` has {} CPT rows, expected {want}",
                    rows.len()
                )));
            }
            let mut flat = Vec::with_capacity(want * domains[v]);
            for row in rows {
                if row.len() != domains[v] {
                    return Err(bad(format!("CPT row of `{n}` has {} entries", row.len())));
                }
                if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(bad(format!("CPT row of `{n}` has a negative entry")));
                }
                let total: f64 = row.iter().sum();
                if (total - 1.0).abs() > ROW_TOL {
                    return Err(bad(format!("CPT row of `{n}` sums to {total}")));
                }
                flat.extend_from_slice(row);
            }
            cpts.push(flat);
        }
        let graph = expanded.latent_project_mask(&latent);
        Ok(DiscreteScm {
            graph,
            expanded,
            latent,
            domains,
            parents,
            cpts,
        })
    }
}
