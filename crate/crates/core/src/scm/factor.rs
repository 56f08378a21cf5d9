//! Dense factors over variable indices, for exact variable elimination.

use crate::error::{Error, Result};

/// Largest intermediate table the oracle will build.
pub const MAX_CELLS: u128 = 1 << 20;

#[derive(Clone, Debug)]
pub(crate) struct Factor {
    /// Strictly increasing variable indices; first is most significant.
    pub vars: Vec<usize>,
    pub sizes: Vec<usize>,
    pub table: Vec<f64>,
}

fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    let mut s = 1;
    for j in (0..sizes.len()).rev() {
        out[j] = s;
        s *= sizes[j];
    }
    out
}

/// Calls `f(target_index, source_index)` for every cell of `sizes`, where
/// indices advance by the given per-digit strides.
fn odometer(sizes: &[usize], a: &[usize], b: &[usize], mut f: impl FnMut(usize, usize)) {
    let total: usize = sizes.iter().product();
    let mut digits = vec![0usize; sizes.len()];
    let (mut ia, mut ib) = (0usize, 0usize);
    for _ in 0..total {
        f(ia, ib);
        for j in (0..sizes.len()).rev() {
            digits[j] += 1;
            ia += a[j];
            ib += b[j];
            if digits[j] < sizes[j] {
                break;
            }
            ia -= a[j] * sizes[j];
            ib -= b[j] * sizes[j];
            digits[j] = 0;
        }
    }
}

pub(crate) fn check_cells(sizes: impl IntoIterator<Item = usize>) -> Result<()> {
    let cells = sizes
        .into_iter()
        .fold(1u128, |acc, d| acc.saturating_mul(d as u128));
    if cells > MAX_CELLS {
        return Err(Error::StateSpace {
            cells,
            limit: MAX_CELLS,
        });
    }
    Ok(())
}

impl Factor {
    pub fn scalar(value: f64) -> Factor {
        Factor {
            vars: Vec::new(),
            sizes: Vec::new(),
            table: vec![value],
        }
    }

    /// Builds a factor from variables in any order, permuting the table
    /// (given in the order of `vars`) into sorted order.
    pub fn from_unsorted(vars: &[usize], sizes: &[usize], table: Vec<f64>) -> Factor {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by_key(|&j| vars[j]);
        if order.iter().enumerate().all(|(i, &j)| i == j) {
            return Factor {
                vars: vars.to_vec(),
                sizes: sizes.to_vec(),
                table,
            };
        }
        let sorted_vars: Vec<usize> = order.iter().map(|&j| vars[j]).collect();
        let sorted_sizes: Vec<usize> = order.iter().map(|&j| sizes[j]).collect();
        let dst = strides(&sorted_sizes);
        let mut target_of_source = vec![0; vars.len()];
        for (pos, &j) in order.iter().enumerate() {
            target_of_source[j] = dst[pos];
        }
        let mut out = vec![0.0; table.len()];
        odometer(sizes, &target_of_source, &strides(sizes), |t, s| {
            out[t] = table[s]
        });
        Factor {
            vars: sorted_vars,
            sizes: sorted_sizes,
            table: out,
        }
    }

    pub fn product(&self, other: &Factor) -> Result<Factor> {
        let mut vars: Vec<usize> = self.vars.iter().chain(&other.vars).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        let size_of = |v: usize| {
            self.vars
                .iter()
                .position(|&w| w == v)
                .map(|j| self.sizes[j])
                .or_else(|| {
                    other
                        .vars
                        .iter()
                        .position(|&w| w == v)
                        .map(|j| other.sizes[j])
                })
                .expect("variable belongs to an operand")
        };
        let sizes: Vec<usize> = vars.iter().map(|&v| size_of(v)).collect();
        check_cells(sizes.iter().copied())?;
        let stride_in = |f: &Factor| -> Vec<usize> {
            let s = strides(&f.sizes);
            vars.iter()
                .map(|v| f.vars.iter().position(|w| w == v).map_or(0, |j| s[j]))
                .collect()
        };
        let (sa, sb) = (stride_in(self), stride_in(other));
        let total: usize = sizes.iter().product();
        let mut table = Vec::with_capacity(total);
        odometer(&sizes, &sa, &sb, |ia, ib| {
            table.push(self.table[ia] * other.table[ib])
        });
        Ok(Factor { vars, sizes, table })
    }

    pub fn sum_out(&self, var: usize) -> Factor {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        let mut sizes = self.sizes.clone();
        vars.remove(pos);
        sizes.remove(pos);
        let dst = strides(&sizes);
        let mut tstride: Vec<usize> = Vec::with_capacity(self.vars.len());
        let mut k = 0;
        for j in 0..self.vars.len() {
            if j == pos {
                tstride.push(0);
            } else {
                tstride.push(dst[k]);
                k += 1;
            }
        }
        let mut table = vec![0.0; sizes.iter().product()];
        odometer(&self.sizes, &tstride, &strides(&self.sizes), |t, s| {
            table[t] += self.table[s]
        });
        Factor { vars, sizes, table }
    }

    /// Fixes `var` to `value` and drops it.
    pub fn reduce(&self, var: usize, value: usize) -> Factor {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let src = strides(&self.sizes);
        let mut vars = self.vars.clone();
        let mut sizes = self.sizes.clone();
        vars.remove(pos);
        sizes.remove(pos);
        let sstride: Vec<usize> = (0..self.vars.len())
            .filter(|&j| j != pos)
            .map(|j| src[j])
            .collect();
        let base = value * src[pos];
        let mut table = Vec::with_capacity(sizes.iter().product());
        odometer(&sizes, &sstride, &sstride, |s, _| {
            table.push(self.table[base + s])
        });
        Factor { vars, sizes, table }
    }
}

/// Sums `eliminate` out of the product of `factors` and returns the product
/// of what remains. Variables are eliminated greedily, smallest resulting
/// table first.
pub(crate) fn eliminate(mut factors: Vec<Factor>, eliminate: &[usize]) -> Result<Factor> {
    let mut pending: Vec<usize> = eliminate.to_vec();
    while !pending.is_empty() {
        let cost = |v: usize| -> u128 {
            let mut seen: Vec<(usize, usize)> = Vec::new();
            for f in factors.iter().filter(|f| f.vars.contains(&v)) {
                for (&w, &d) in f.vars.iter().zip(&f.sizes) {
                    if !seen.iter().any(|(x, _)| *x == w) {
                        seen.push((w, d));
                    }
                }
            }
            seen.iter()
                .fold(1u128, |acc, (_, d)| acc.saturating_mul(*d as u128))
        };
        let (k, &v) = pending
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| (cost(v), v))
            .expect("non-empty");
        pending.remove(k);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&v));
        factors = rest;
        let mut acc = Factor::scalar(1.0);
        for f in &touching {
            acc = acc.product(f)?;
        }
        factors.push(acc.sum_out(v));
    }
    let mut acc = Factor::scalar(1.0);
    for f in &factors {
        acc = acc.product(f)?;
    }
    Ok(acc)
}
