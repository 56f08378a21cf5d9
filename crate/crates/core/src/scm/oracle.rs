//! Randomized checks of the adjustment criterion against ground truth.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{adjustment_criterion, AdjustmentQuery, Mode};
use crate::error::{Error, Result};
use crate::graph::{Admg, NodeId};

use super::dist::{all_assignments, Assignment};
use super::infer::{adjustment_estimand, interventional, joint_observed};
use super::model::{random_scm, DiscreteScm};

/// Domain size of the models drawn by the oracles.
pub const ORACLE_DOMAIN: usize = 2;
/// Positivity floor of the models drawn by the oracles.
pub const ORACLE_EPS: f64 = 0.05;

/// How far the adjustment functional is from the truth in one model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    /// Largest total-variation distance over treatment values.
    pub tv: f64,
    /// Largest single-cell difference over treatment values.
    pub max_cell: f64,
    /// The first treatment value attaining `tv`.
    pub x: Assignment,
}

pub fn adjustment_gap(scm: &DiscreteScm, q: &AdjustmentQuery) -> Result<Gap> {
    q.validate(scm.graph())?;
    let p = joint_observed(scm)?;
    let x_vars: Vec<(NodeId, usize)> =
        q.x.iter()
            .map(|n| (n.clone(), scm.domain(n.as_str()).expect("validated")))
            .collect();
    let mut best = Gap {
        tv: -1.0,
        max_cell: 0.0,
        x: Assignment::new(),
    };
    for x in all_assignments(&x_vars) {
        let truth = interventional(scm, &x, &q.y)?;
        let est = adjustment_estimand(&p, &x, &q.y, &q.z)?;
        let tv = truth.tv_distance(&est)?;
        best.max_cell = best.max_cell.max(truth.max_abs_diff(&est)?);
        if tv > best.tv {
            best.tv = tv;
            best.x = x;
        }
    }
    Ok(best)
}

/// Seeds for successive trials, drawn from one master generator.
fn trial_seeds(seed: u64) -> impl Iterator<Item = u64> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    std::iter::repeat_with(move || master.next_u64())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    /// Seed passed to [`random_scm`] to rebuild `scm`.
    pub seed: u64,
    pub gap: f64,
    pub x: Assignment,
    pub scm: DiscreteScm,
}

/// Looks for a model in which adjusting for `q.z` gives the wrong answer.
/// Refuses queries where the criterion holds, since none exists.
pub fn search_counterexample(
    g: &Admg,
    q: &AdjustmentQuery,
    trials: usize,
    delta: f64,
    seed: u64,
) -> Result<Option<Counterexample>> {
    if adjustment_criterion(g, q, Mode::Fast)?.holds {
        return Err(Error::CriterionHolds);
    }
    for (trial, s) in trial_seeds(seed).take(trials).enumerate() {
        let scm = random_scm(g, s, ORACLE_DOMAIN, ORACLE_EPS)?;
        let gap = adjustment_gap(&scm, q)?;
        if gap.tv > delta {
            return Ok(Some(Counterexample {
                trial,
                seed: s,
                gap: gap.tv,
                x: gap.x,
                scm,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub gap: f64,
    pub x: Assignment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub trials: usize,
    pub tol: f64,
    /// Largest single-cell gap seen.
    pub max_gap: f64,
    pub worst: Option<TrialRecord>,
    /// First trial whose gap exceeded `tol`.
    pub violation: Option<TrialRecord>,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks numerically that adjusting for `q.z` recovers every interventional
/// distribution. Refuses queries where the criterion fails.
pub fn verify_soundness(
    g: &Admg,
    q: &AdjustmentQuery,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<SoundnessReport> {
    if !adjustment_criterion(g, q, Mode::Fast)?.holds {
        return Err(Error::CriterionFails);
    }
    let mut report = SoundnessReport {
        trials,
        tol,
        max_gap: 0.0,
        worst: None,
        violation: None,
    };
    for (trial, s) in trial_seeds(seed).take(trials).enumerate() {
        let scm = random_scm(g, s, ORACLE_DOMAIN, ORACLE_EPS)?;
        let gap = adjustment_gap(&scm, q)?;
        let record = TrialRecord {
            trial,
            seed: s,
            gap: gap.max_cell,
            x: gap.x,
        };
        if report.worst.is_none() || gap.max_cell > report.max_gap {
            report.max_gap = gap.max_cell;
            report.worst = Some(record.clone());
        }
        if gap.max_cell > tol && report.violation.is_none() {
            report.violation = Some(record);
        }
    }
    Ok(report)
}
