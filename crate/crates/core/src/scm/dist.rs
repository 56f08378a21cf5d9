use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeSet};

/// A value for each of some variables.
pub type Assignment = BTreeMap<NodeId, usize>;

/// Tolerance for normalization checks.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Every assignment to `vars`, first variable most significant.
pub fn all_assignments(vars: &[(NodeId, usize)]) -> Vec<Assignment> {
    let total: usize = vars.iter().map(|(_, d)| d).product();
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; vars.len()];
    for _ in 0..total {
        out.push(
            vars.iter()
                .zip(&digits)
                .map(|((n, _), &v)| (n.clone(), v))
                .collect(),
        );
        for j in (0..vars.len()).rev() {
            digits[j] += 1;
            if digits[j] < vars[j].1 {
                break;
            }
            digits[j] = 0;
        }
    }
    out
}

/// A joint distribution over name-sorted variables, stored densely in
/// row-major order (first variable most significant).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dist {
    variables: Vec<(NodeId, usize)>,
    probs: Vec<f64>,
}

impl Dist {
    pub fn new(variables: Vec<(NodeId, usize)>, probs: Vec<f64>) -> Result<Dist> {
        let d = Dist::unchecked(variables, probs)?;
        let total = d.total();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(d)
    }

    /// Checks shape and sign but not normalization.
    pub(crate) fn unchecked(variables: Vec<(NodeId, usize)>, probs: Vec<f64>) -> Result<Dist> {
        if variables.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidArgument(
                "variables must be strictly name-sorted".into(),
            ));
        }
        if variables.iter().any(|(_, d)| *d == 0) {
            return Err(Error::InvalidArgument("empty domain".into()));
        }
        let cells: usize = variables.iter().map(|(_, d)| d).product();
        if probs.len() != cells {
            return Err(Error::InvalidArgument(format!(
                "{} probabilities for {cells} cells",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidArgument(
                "negative or non-finite probability".into(),
            ));
        }
        Ok(Dist { variables, probs })
    }

    pub fn variables(&self) -> &[(NodeId, usize)] {
        &self.variables
    }

    pub fn names(&self) -> NodeSet {
        self.variables.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn domain(&self, name: &str) -> Option<usize> {
        self.variables
            .iter()
            .find(|(n, _)| n.as_str() == name)
            .map(|(_, d)| *d)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Each cell with its assignment, in storage order.
    pub fn cells(&self) -> impl Iterator<Item = (Assignment, f64)> + '_ {
        all_assignments(&self.variables)
            .into_iter()
            .zip(self.probs.iter().copied())
    }

    fn check_partial(&self, a: &Assignment) -> Result<()> {
        for (n, &v) in a {
            let size = self
                .domain(n.as_str())
                .ok_or_else(|| Error::UnknownNode(n.to_string()))?;
            if v >= size {
                return Err(Error::OutOfDomain {
                    node: n.to_string(),
                    value: v,
                    size,
                });
            }
        }
        Ok(())
    }

    /// Probability of a partial assignment (the marginal cell).
    pub fn prob(&self, a: &Assignment) -> Result<f64> {
        self.check_partial(a)?;
        let mut strides = vec![0usize; self.variables.len()];
        let mut s = 1;
        for j in (0..self.variables.len()).rev() {
            strides[j] = s;
            s *= self.variables[j].1;
        }
        let fixed: Vec<Option<usize>> = self
            .variables
            .iter()
            .map(|(n, _)| a.get(n).copied())
            .collect();
        let mut total = 0.0;
        'cells: for (i, p) in self.probs.iter().enumerate() {
            for j in 0..fixed.len() {
                if let Some(v) = fixed[j] {
                    if (i / strides[j]) % self.variables[j].1 != v {
                        continue 'cells;
                    }
                }
            }
            total += p;
        }
        Ok(total)
    }

    pub fn marginal(&self, keep: &NodeSet) -> Result<Dist> {
        for n in keep {
            if self.domain(n.as_str()).is_none() {
                return Err(Error::UnknownNode(n.to_string()));
            }
        }
        let vars: Vec<(NodeId, usize)> = self
            .variables
            .iter()
            .filter(|(n, _)| keep.contains(n.as_str()))
            .cloned()
            .collect();
        let cells: usize = vars.iter().map(|(_, d)| d).product();
        let mut probs = vec![0.0; cells];
        // target stride per source variable, zero when dropped
        let mut tstride = vec![0usize; self.variables.len()];
        let mut s = 1;
        for j in (0..self.variables.len()).rev() {
            if keep.contains(self.variables[j].0.as_str()) {
                tstride[j] = s;
                s *= self.variables[j].1;
            }
        }
        let mut digits = vec![0usize; self.variables.len()];
        let mut t = 0usize;
        for &p in &self.probs {
            probs[t] += p;
            for j in (0..digits.len()).rev() {
                digits[j] += 1;
                t += tstride[j];
                if digits[j] < self.variables[j].1 {
                    break;
                }
                t -= tstride[j] * digits[j];
                digits[j] = 0;
            }
        }
        Ok(Dist {
            variables: vars,
            probs,
        })
    }

    fn check_same_shape(&self, other: &Dist) -> Result<()> {
        if self.variables != other.variables {
            return Err(Error::InvalidArgument(
                "distributions are over different variables".into(),
            ));
        }
        Ok(())
    }

    pub fn tv_distance(&self, other: &Dist) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(0.5
            * self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    pub fn max_abs_diff(&self, other: &Dist) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}
