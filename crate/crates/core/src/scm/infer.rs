//! Exact observational, interventional and adjustment distributions.

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeSet};

use super::dist::{all_assignments, Assignment, Dist};
use super::factor::{self, Factor};
use super::model::DiscreteScm;

fn check_assignment(scm: &DiscreteScm, x: &Assignment) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (n, &val) in x {
        let v = scm.idx(n.as_str())?;
        if scm.is_latent(v) {
            return Err(Error::InvalidQuery(format!(
                "cannot intervene on latent `{n}`"
            )));
        }
        let size = scm.domain_idx(v);
        if val >= size {
            return Err(Error::OutOfDomain {
                node: n.to_string(),
                value: val,
                size,
            });
        }
        out.push((v, val));
    }
    Ok(out)
}

/// Joint over all observed nodes except those clamped by `x`.
fn mutilated_joint(scm: &DiscreteScm, x: &Assignment) -> Result<Dist> {
    let clamp = check_assignment(scm, x)?;
    let clamped = |v: usize| clamp.iter().find(|(c, _)| *c == v).map(|(_, val)| *val);
    let keep: Vec<usize> = (0..scm.len())
        .filter(|&v| !scm.is_latent(v) && clamped(v).is_none())
        .collect();
    factor::check_cells(keep.iter().map(|&v| scm.domain_idx(v)))?;

    let mut factors = Vec::new();
    for v in (0..scm.len()).filter(|&v| clamped(v).is_none()) {
        let mut f: Factor = scm.factor(v);
        for &(c, val) in &clamp {
            f = f.reduce(c, val);
        }
        factors.push(f);
    }
    let latents: Vec<usize> = (0..scm.len()).filter(|&v| scm.is_latent(v)).collect();
    let joint = factor::eliminate(factors, &latents)?;
    debug_assert!(joint.vars.iter().all(|v| keep.contains(v)));

    // Observed nodes with no factor left (impossible for CPT models, but
    // keep the table shape honest) would be missing; expand to `keep`.
    let mut full = joint;
    for &v in &keep {
        if !full.vars.contains(&v) {
            let d = scm.domain_idx(v);
            full = full.product(&Factor::from_unsorted(&[v], &[d], vec![1.0 / d as f64; d]))?;
        }
    }
    to_dist(scm, &full)
}

fn to_dist(scm: &DiscreteScm, f: &Factor) -> Result<Dist> {
    let mut order: Vec<usize> = (0..f.vars.len()).collect();
    order.sort_by(|&a, &b| scm.name(f.vars[a]).cmp(scm.name(f.vars[b])));
    // relabel each variable by its name rank so sorting yields name order
    let mut rank = vec![0; f.vars.len()];
    for (pos, &j) in order.iter().enumerate() {
        rank[j] = pos;
    }
    let sorted = Factor::from_unsorted(&rank, &f.sizes, f.table.clone());
    let variables = order
        .iter()
        .map(|&j| (scm.name(f.vars[j]).clone(), f.sizes[j]))
        .collect();
    Dist::unchecked(variables, sorted.table)
}

/// P(v) over the observed nodes, latents summed out.
pub fn joint_observed(scm: &DiscreteScm) -> Result<Dist> {
    mutilated_joint(scm, &Assignment::new())
}

/// P(Y | do(X = x)) by truncated factorization.
pub fn interventional(scm: &DiscreteScm, x: &Assignment, y: &NodeSet) -> Result<Dist> {
    for n in y {
        let v = scm.idx(n.as_str())?;
        if scm.is_latent(v) {
            return Err(Error::InvalidQuery(format!("`{n}` is latent")));
        }
        if x.contains_key(n) {
            return Err(Error::InvalidQuery(format!(
                "`{n}` is both intervened on and an outcome"
            )));
        }
    }
    mutilated_joint(scm, x)?.marginal(y)
}

fn describe(a: &Assignment) -> String {
    let parts: Vec<String> = a.iter().map(|(n, v)| format!("{n}={v}")).collect();
    parts.join(", ")
}

/// The adjustment functional Σ_z P(Y | x, z) P(z), as a distribution over Y.
pub fn adjustment_estimand(p: &Dist, x: &Assignment, y: &NodeSet, z: &NodeSet) -> Result<Dist> {
    let xs: NodeSet = x.keys().cloned().collect();
    crate::separation::disjoint3(&xs, y, z)?;
    for n in xs.iter().chain(y).chain(z) {
        if p.domain(n.as_str()).is_none() {
            return Err(Error::UnknownNode(n.to_string()));
        }
    }
    let pxyz = p.marginal(&xs.union(y).union(z))?;
    pxyz.prob(x)?;
    let y_vars: Vec<(NodeId, usize)> = pxyz
        .variables()
        .iter()
        .filter(|(n, _)| y.contains(n.as_str()))
        .cloned()
        .collect();
    let z_vars: Vec<(NodeId, usize)> = pxyz
        .variables()
        .iter()
        .filter(|(n, _)| z.contains(n.as_str()))
        .cloned()
        .collect();
    let ys = all_assignments(&y_vars);
    let mut probs = vec![0.0; ys.len()];
    for zc in all_assignments(&z_vars) {
        let pz = pxyz.prob(&zc)?;
        if pz <= 0.0 {
            continue;
        }
        let mut xz = zc.clone();
        xz.extend(x.iter().map(|(n, v)| (n.clone(), *v)));
        let pxz = pxyz.prob(&xz)?;
        if pxz <= 0.0 {
            return Err(Error::Positivity {
                cell: describe(&xz),
            });
        }
        for (i, yc) in ys.iter().enumerate() {
            let mut xyz = xz.clone();
            xyz.extend(yc.iter().map(|(n, v)| (n.clone(), *v)));
            probs[i] += pxyz.prob(&xyz)? / pxz * pz;
        }
    }
    Dist::new(y_vars, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::scm::model::random_scm;

    fn asg(pairs: &[(&str, usize)]) -> Assignment {
        pairs.iter().map(|(n, v)| (NodeId::from(*n), *v)).collect()
    }
    fn set(names: &[&str]) -> NodeSet {
        NodeSet::from_names(names.iter().copied())
    }

    #[test]
    fn joint_is_normalized_and_name_sorted() {
        let g = parse_graph("Z -> X\nZ -> Y\nX -> Y\nX <-> Y").unwrap();
        let m = random_scm(&g, 5, 2, 0.05).unwrap();
        let p = joint_observed(&m).unwrap();
        assert!((p.total() - 1.0).abs() < 1e-12);
        let names: Vec<&str> = p.variables().iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["X", "Y", "Z"]);
    }

    #[test]
    fn independent_coins_multiply() {
        let g = parse_graph("node A B").unwrap();
        let m = random_scm(&g, 2, 2, 0.0).unwrap();
        let p = joint_observed(&m).unwrap();
        let a = m.cpt_rows("A").unwrap()[0].to_vec();
        let b = m.cpt_rows("B").unwrap()[0].to_vec();
        for (cell, pr) in p.cells() {
            let want = a[cell[&NodeId::from("A")]] * b[cell[&NodeId::from("B")]];
            assert!((pr - want).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_intervention_is_the_observed_marginal() {
        let g = parse_graph("X -> Z\nZ -> Y\nX <-> Y").unwrap();
        let m = random_scm(&g, 9, 2, 0.05).unwrap();
        let obs = joint_observed(&m).unwrap().marginal(&set(&["Y"])).unwrap();
        assert_eq!(
            interventional(&m, &Assignment::new(), &set(&["Y"])).unwrap(),
            obs
        );
    }

    #[test]
    fn backdoor_formula_on_fig1a() {
        let g = parse_graph("Z -> X\nZ -> Y\nX -> Y").unwrap();
        for seed in 0..10 {
            let m = random_scm(&g, seed, 2, 0.05).unwrap();
            let p = joint_observed(&m).unwrap();
            for xv in 0..2 {
                let x = asg(&[("X", xv)]);
                let truth = interventional(&m, &x, &set(&["Y"])).unwrap();
                let est = adjustment_estimand(&p, &x, &set(&["Y"]), &set(&["Z"])).unwrap();
                assert!(truth.max_abs_diff(&est).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn empty_adjustment_is_conditioning() {
        let g = parse_graph("Z -> X\nZ -> Y\nX -> Y").unwrap();
        let m = random_scm(&g, 3, 2, 0.05).unwrap();
        let p = joint_observed(&m).unwrap();
        let x = asg(&[("X", 1)]);
        let est = adjustment_estimand(&p, &x, &set(&["Y"]), &set(&[])).unwrap();
        let px = p.prob(&x).unwrap();
        let py1 = p.prob(&asg(&[("X", 1), ("Y", 1)])).unwrap() / px;
        assert!((est.probs()[1] - py1).abs() < 1e-12);
    }

    #[test]
    fn positivity_violation_is_reported() {
        let vars = vec![
            (NodeId::from("X"), 2),
            (NodeId::from("Y"), 2),
            (NodeId::from("Z"), 2),
        ];
        // X = Z deterministically
        let p = Dist::new(vars, vec![0.25, 0.0, 0.25, 0.0, 0.0, 0.25, 0.0, 0.25]).unwrap();
        let err =
            adjustment_estimand(&p, &asg(&[("X", 0)]), &set(&["Y"]), &set(&["Z"])).unwrap_err();
        assert_eq!(
            err,
            Error::Positivity {
                cell: "X=0, Z=1".into()
            }
        );
    }

    #[test]
    fn bad_interventions() {
        let g = parse_graph("X -> Y").unwrap();
        let m = random_scm(&g, 0, 2, 0.05).unwrap();
        assert!(matches!(
            interventional(&m, &asg(&[("X", 2)]), &set(&["Y"])),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(interventional(&m, &asg(&[("X", 0)]), &set(&["X"])).is_err());
        assert!(interventional(&m, &asg(&[("Q", 0)]), &set(&["Y"])).is_err());
    }
}
