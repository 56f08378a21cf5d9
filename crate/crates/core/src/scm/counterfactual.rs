//! Joint distributions of potential outcomes across several worlds.
//!
//! A CPT fixes only single-world behaviour. To couple worlds each observed
//! node `V` is given one uniform noise `U_V` shared by every world, and takes
//! the value `F⁻¹(U_V | parents)` under its world's parent values (inverse
//! transform sampling with values in index order). Latent roots are shared
//! outright. The resulting joint is computed exactly by splitting `[0, 1)`
//! at every CPT breakpoint in play.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;

use super::dist::{Assignment, Dist};
use super::factor::MAX_CELLS;
use super::model::DiscreteScm;

/// The value of `node` in the world where `intervention` was applied.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub node: NodeId,
    pub intervention: Assignment,
}

impl Term {
    pub fn factual(node: impl Into<NodeId>) -> Term {
        Term {
            node: node.into(),
            intervention: Assignment::new(),
        }
    }

    pub fn under(node: impl Into<NodeId>, intervention: Assignment) -> Term {
        Term {
            node: node.into(),
            intervention,
        }
    }

    /// The variable name used in the output distribution: `Y` when factual,
    /// otherwise `Y@do(X=1,W=0)`.
    pub fn label(&self) -> NodeId {
        NodeId::new(self.to_string())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.node)?;
        if !self.intervention.is_empty() {
            let parts: Vec<String> = self
                .intervention
                .iter()
                .map(|(n, v)| format!("{n}={v}"))
                .collect();
            write!(f, "@do({})", parts.join(","))?;
        }
        Ok(())
    }
}

struct Search<'a> {
    scm: &'a DiscreteScm,
    order: Vec<usize>,
    /// Per world, the clamped value of each node (if intervened).
    clamps: Vec<Vec<Option<usize>>>,
    /// Per world, current values; usize::MAX while unassigned.
    values: Vec<Vec<usize>>,
    /// (world, node) per output variable, in output order.
    outputs: Vec<(usize, usize)>,
    strides: Vec<usize>,
    probs: Vec<f64>,
    leaves: u128,
}

impl Search<'_> {
    fn run(&mut self, k: usize, mass: f64) -> Result<()> {
        if mass == 0.0 {
            return Ok(());
        }
        if k == self.order.len() {
            self.leaves += 1;
            if self.leaves > MAX_CELLS {
                return Err(Error::StateSpace {
                    cells: self.leaves,
                    limit: MAX_CELLS,
                });
            }
            let cell: usize = self
                .outputs
                .iter()
                .zip(&self.strides)
                .map(|(&(w, v), s)| self.values[w][v] * s)
                .sum();
            self.probs[cell] += mass;
            return Ok(());
        }
        let v = self.order[k];
        let worlds = self.values.len();
        if self.scm.is_latent(v) {
            let row = self.scm.row(v, std::iter::empty()).to_vec();
            for (val, p) in row.into_iter().enumerate() {
                for w in 0..worlds {
                    self.values[w][v] = val;
                }
                self.run(k + 1, mass * p)?;
            }
            return Ok(());
        }
        // cumulative rows for worlds where v follows its mechanism
        let mut cums: Vec<(usize, Vec<f64>)> = Vec::new();
        for w in 0..worlds {
            match self.clamps[w][v] {
                Some(val) => self.values[w][v] = val,
                None => {
                    let parents = self.scm.parents_idx(v);
                    let row = self.scm.row(v, parents.iter().map(|&p| self.values[w][p]));
                    let mut acc = 0.0;
                    let cum: Vec<f64> = row
                        .iter()
                        .map(|p| {
                            acc += p;
                            acc
                        })
                        .collect();
                    cums.push((w, cum));
                }
            }
        }
        if cums.is_empty() {
            return self.run(k + 1, mass);
        }
        let mut cuts: Vec<f64> = vec![0.0, 1.0];
        for (_, cum) in &cums {
            cuts.extend(cum[..cum.len() - 1].iter().copied());
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for pair in cuts.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if hi <= lo {
                continue;
            }
            for (w, cum) in &cums {
                let val = cum.iter().position(|&c| lo < c).unwrap_or(cum.len() - 1);
                self.values[*w][v] = val;
            }
            self.run(k + 1, mass * (hi - lo))?;
        }
        Ok(())
    }
}

/// The joint distribution of the given potential outcomes. Output variables
/// are the term labels (see [`Term::label`]), name-sorted.
pub fn counterfactual_joint(scm: &DiscreteScm, terms: &[Term]) -> Result<Dist> {
    if terms.is_empty() {
        return Err(Error::InvalidArgument("no terms".into()));
    }
    let mut worlds: Vec<&Assignment> = Vec::new();
    let mut labelled: Vec<(NodeId, usize, usize)> = Vec::new(); // (label, world, node)
    for t in terms {
        let v = scm.idx(t.node.as_str())?;
        if scm.is_latent(v) {
            return Err(Error::InvalidQuery(format!("`{}` is latent", t.node)));
        }
        for (n, &val) in &t.intervention {
            let c = scm.idx(n.as_str())?;
            if scm.is_latent(c) {
                return Err(Error::InvalidQuery(format!(
                    "cannot intervene on latent `{n}`"
                )));
            }
            if val >= scm.domain_idx(c) {
                return Err(Error::OutOfDomain {
                    node: n.to_string(),
                    value: val,
                    size: scm.domain_idx(c),
                });
            }
        }
        let w = match worlds.iter().position(|a| **a == t.intervention) {
            Some(w) => w,
            None => {
                worlds.push(&t.intervention);
                worlds.len() - 1
            }
        };
        let label = t.label();
        if labelled.iter().any(|(l, _, _)| *l == label) {
            return Err(Error::InvalidArgument(format!("term {label} listed twice")));
        }
        labelled.push((label, w, v));
    }
    labelled.sort_by(|a, b| a.0.cmp(&b.0));
    let variables: Vec<(NodeId, usize)> = labelled
        .iter()
        .map(|(l, _, v)| (l.clone(), scm.domain_idx(*v)))
        .collect();
    let cells: u128 = variables.iter().map(|(_, d)| *d as u128).product();
    if cells > MAX_CELLS {
        return Err(Error::StateSpace {
            cells,
            limit: MAX_CELLS,
        });
    }
    let mut strides = vec![0usize; variables.len()];
    let mut s = 1;
    for j in (0..variables.len()).rev() {
        strides[j] = s;
        s *= variables[j].1;
    }

    // only ancestors of the requested nodes matter
    let mut needed = vec![false; scm.len()];
    let mut stack: Vec<usize> = labelled.iter().map(|(_, _, v)| *v).collect();
    while let Some(v) = stack.pop() {
        if !needed[v] {
            needed[v] = true;
            stack.extend_from_slice(scm.parents_idx(v));
        }
    }
    let order: Vec<usize> = scm
        .expanded_topological_order()
        .into_iter()
        .filter(|&v| needed[v])
        .collect();
    let clamps: Vec<Vec<Option<usize>>> = worlds
        .iter()
        .map(|a| {
            let mut c = vec![None; scm.len()];
            for (n, &val) in a.iter() {
                c[scm.idx(n.as_str()).expect("checked")] = Some(val);
            }
            c
        })
        .collect();
    let mut search = Search {
        scm,
        order,
        clamps,
        values: vec![vec![usize::MAX; scm.len()]; worlds.len()],
        outputs: labelled.iter().map(|(_, w, v)| (*w, *v)).collect(),
        strides,
        probs: vec![0.0; s],
        leaves: 0,
    };
    search.run(0, 1.0)?;
    Dist::new(variables, search.probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph, NodeSet};
    use crate::scm::infer::{interventional, joint_observed};
    use crate::scm::model::random_scm;

    fn asg(pairs: &[(&str, usize)]) -> Assignment {
        pairs.iter().map(|(n, v)| (NodeId::from(*n), *v)).collect()
    }

    #[test]
    fn labels() {
        assert_eq!(Term::factual("Y").label().as_str(), "Y");
        assert_eq!(
            Term::under("Y", asg(&[("X", 1), ("W", 0)]))
                .label()
                .as_str(),
            "Y@do(W=0,X=1)"
        );
    }

    #[test]
    fn factual_term_is_the_observed_marginal() {
        let g = parse_graph("X -> Z\nZ -> Y\nX <-> Y").unwrap();
        let m = random_scm(&g, 4, 2, 0.05).unwrap();
        let cf = counterfactual_joint(&m, &[Term::factual("Y")]).unwrap();
        let obs = joint_observed(&m)
            .unwrap()
            .marginal(&NodeSet::from_names(["Y"]))
            .unwrap();
        assert!(cf.max_abs_diff(&obs).unwrap() < 1e-9);
    }

    #[test]
    fn intervened_term_is_the_g_formula() {
        let g = parse_graph("X -> Z\nZ -> Y\nX <-> Y").unwrap();
        let m = random_scm(&g, 4, 3, 0.05).unwrap();
        for xv in 0..3 {
            let x = asg(&[("X", xv)]);
            let cf = counterfactual_joint(&m, &[Term::under("Y", x.clone())]).unwrap();
            let truth = interventional(&m, &x, &NodeSet::from_names(["Y"])).unwrap();
            assert_eq!(cf.variables()[0].1, 3);
            for (a, b) in cf.probs().iter().zip(truth.probs()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ignorability_holds_on_fig1a() {
        let g = parse_graph("Z -> X\nZ -> Y\nX -> Y").unwrap();
        let m = random_scm(&g, 21, 2, 0.05).unwrap();
        let x = asg(&[("X", 1)]);
        let joint = counterfactual_joint(
            &m,
            &[Term::under("Y", x), Term::factual("X"), Term::factual("Z")],
        )
        .unwrap();
        for (cell, p) in joint.cells() {
            let z = asg(&[("Z", cell[&NodeId::from("Z")])]);
            let pz = joint.prob(&z).unwrap();
            let mut yz = z.clone();
            yz.insert("Y@do(X=1)".into(), cell[&NodeId::from("Y@do(X=1)")]);
            let mut xz = z.clone();
            xz.insert("X".into(), cell[&NodeId::from("X")]);
            let factorized = joint.prob(&yz).unwrap() * joint.prob(&xz).unwrap() / pz;
            assert!((p - factorized).abs() < 1e-9);
        }
    }

    #[test]
    fn consistency_when_intervention_matches_fact() {
        // Y_x equals Y whenever X = x.
        let g = parse_graph("X -> Y\nX <-> Y").unwrap();
        let m = random_scm(&g, 8, 2, 0.05).unwrap();
        let joint = counterfactual_joint(
            &m,
            &[
                Term::under("Y", asg(&[("X", 0)])),
                Term::factual("X"),
                Term::factual("Y"),
            ],
        )
        .unwrap();
        let mismatch = joint
            .prob(&asg(&[("X", 0), ("Y", 0), ("Y@do(X=0)", 1)]))
            .unwrap()
            + joint
                .prob(&asg(&[("X", 0), ("Y", 1), ("Y@do(X=0)", 0)]))
                .unwrap();
        assert!(mismatch.abs() < 1e-12);
    }

    #[test]
    fn rejects_duplicates_and_latents() {
        let g = parse_graph("X -> Y\nX <-> Y").unwrap();
        let m = random_scm(&g, 8, 2, 0.05).unwrap();
        assert!(counterfactual_joint(&m, &[Term::factual("Y"), Term::factual("Y")]).is_err());
        assert!(counterfactual_joint(&m, &[Term::factual("__U_X_Y")]).is_err());
        assert!(counterfactual_joint(&m, &[]).is_err());
    }
}
