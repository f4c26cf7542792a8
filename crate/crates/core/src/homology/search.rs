//! Branch-and-bound over the kernel lattice of `∂₂`.
//!
//! Every filling is `x = x_p + K·y` with `x_p` a particular solution and the
//! columns of `K` a ℤ-basis of the 2-cycles. We minimize `Σ wᵢ|xᵢ|` over
//! integer `y`, optionally inside the box `|xᵢ| ≤ B`. Each node solves the
//! linear relaxation in `y` (with `tᵢ ≥ ±xᵢ`) for a lower bound, tries the
//! rounded relaxation as an incumbent, and branches on the most fractional
//! `y_j`. Warm-started children reuse the parent's simplex tableau.

use std::collections::{BTreeMap, BTreeSet};

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Solution, Variable};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Search limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    /// Maximum number of branch-and-bound nodes before giving up optimality.
    pub node_budget: usize,
    /// Relative tolerance for bound comparisons.
    pub tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { node_budget: 20_000, tolerance: 1e-9 }
    }
}

struct Lattice {
    support: Vec<usize>,
    xp: Vec<BigInt>,
    // kernel columns restricted to support positions
    k: Vec<Vec<(usize, BigInt)>>,
    weights: Vec<f64>,
}

impl Lattice {
    fn point(&self, y: &[i64]) -> Vec<BigInt> {
        let mut x = self.xp.clone();
        for (j, col) in self.k.iter().enumerate() {
            if y[j] == 0 {
                continue;
            }
            let yj = BigInt::from(y[j]);
            for (i, v) in col {
                x[*i] += v * &yj;
            }
        }
        x
    }

    fn cost(&self, x: &[BigInt]) -> f64 {
        x.iter()
            .zip(&self.weights)
            .map(|(a, w)| a.abs().to_f64().unwrap_or(f64::INFINITY) * w)
            .sum()
    }

    fn in_box(&self, x: &[BigInt], bound: Option<f64>) -> bool {
        match bound {
            None => true,
            Some(b) => x.iter().all(|a| a.abs().to_f64().unwrap_or(f64::INFINITY) <= b),
        }
    }

    fn to_map(&self, x: &[BigInt]) -> BTreeMap<usize, BigInt> {
        self.support
            .iter()
            .zip(x)
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| (*i, a.clone()))
            .collect()
    }

    // lexicographic comparison in canonical simplex order (support is sorted)
    fn lex_less(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        a < b
    }
}

struct Incumbent {
    x: Vec<BigInt>,
    cost: f64,
}

/// Returns the best point found and whether it is proven optimal, or `None`
/// when the box admits no lattice point.
pub(crate) fn minimize(
    xp: &BTreeMap<usize, BigInt>,
    kernel: &[BTreeMap<usize, BigInt>],
    weights: &[f64],
    bound: Option<f64>,
    config: &SearchConfig,
) -> Result<Option<(BTreeMap<usize, BigInt>, bool)>> {
    let mut support: BTreeSet<usize> = xp.keys().copied().collect();
    for col in kernel {
        support.extend(col.keys().copied());
    }
    let support: Vec<usize> = support.into_iter().collect();
    let pos: BTreeMap<usize, usize> = support.iter().enumerate().map(|(p, i)| (*i, p)).collect();
    let lat = Lattice {
        xp: support.iter().map(|i| xp.get(i).cloned().unwrap_or_default()).collect(),
        k: kernel
            .iter()
            .map(|col| col.iter().map(|(i, v)| (pos[i], v.clone())).collect())
            .collect(),
        weights: support.iter().map(|i| weights[*i]).collect(),
        support,
    };
    let r = lat.k.len();
    let zero = vec![0i64; r];
    let x0 = lat.point(&zero);
    let mut best: Option<Incumbent> =
        lat.in_box(&x0, bound).then(|| Incumbent { cost: lat.cost(&x0), x: x0.clone() });
    if r == 0 {
        return Ok(best.map(|b| (lat.to_map(&b.x), true)));
    }

    // rows touched by the kernel; the rest contribute a constant
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lat.xp.len()];
    for (j, col) in lat.k.iter().enumerate() {
        for (i, v) in col {
            rows[*i].push((j, v.to_f64().unwrap_or(f64::INFINITY)));
        }
    }
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let y: Vec<Variable> = (0..r).map(|_| problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let mut constant = 0.0;
    for (i, row) in rows.iter().enumerate() {
        let xpi = lat.xp[i].to_f64().unwrap_or(f64::INFINITY);
        if row.is_empty() {
            constant += lat.weights[i] * xpi.abs();
            if let Some(b) = bound {
                if xpi.abs() > b {
                    return Ok(None);
                }
            }
            continue;
        }
        let t = problem.add_var(lat.weights[i], (0.0, f64::INFINITY));
        let mut plus = LinearExpr::empty();
        let mut minus = LinearExpr::empty();
        let mut kx = LinearExpr::empty();
        plus.add(t, 1.0);
        minus.add(t, 1.0);
        for &(j, v) in row {
            plus.add(y[j], -v);
            minus.add(y[j], v);
            kx.add(y[j], v);
        }
        problem.add_constraint(plus, ComparisonOp::Ge, xpi);
        problem.add_constraint(minus, ComparisonOp::Ge, -xpi);
        if let Some(b) = bound {
            if b.is_finite() {
                problem.add_constraint(kx.clone(), ComparisonOp::Le, b - xpi);
                problem.add_constraint(kx, ComparisonOp::Ge, -b - xpi);
            }
        }
    }
    let root = match problem.solve() {
        Ok(s) => s,
        Err(minilp::Error::Infeasible) => return Ok(None),
        Err(e) => return Err(Error::Consistency(format!("relaxation failed: {e}"))),
    };

    let tol = |c: f64| config.tolerance * c.abs().max(1.0);
    let mut stack: Vec<Solution> = vec![root];
    let mut nodes = 0usize;
    let mut exhausted = true;
    while let Some(sol) = stack.pop() {
        if nodes >= config.node_budget {
            exhausted = false;
            break;
        }
        nodes += 1;
        let lb = sol.objective() + constant;
        if let Some(b) = &best {
            if lb > b.cost - tol(b.cost) {
                continue;
            }
        }
        let vals: Vec<f64> = y.iter().map(|v| *sol.var_value(*v)).collect();
        // rounding heuristic
        let rounded: Vec<i64> = vals.iter().map(|v| v.round() as i64).collect();
        let xr = lat.point(&rounded);
        if lat.in_box(&xr, bound) {
            let c = lat.cost(&xr);
            let better = match &best {
                None => true,
                Some(b) => c < b.cost - tol(b.cost) || (c <= b.cost + tol(b.cost) && lat.lex_less(&xr, &b.x)),
            };
            if better {
                best = Some(Incumbent { x: xr, cost: c });
            }
        }
        // most fractional coordinate
        let branch = vals
            .iter()
            .enumerate()
            .map(|(j, v)| (j, (v - v.round()).abs()))
            .filter(|(_, f)| *f > 1e-6)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((j, _)) = branch else { continue };
        let v = vals[j];
        let (lo, hi) = (v.floor(), v.ceil());
        // push the far side first so the near side is explored first
        let near_up = v - lo > 0.5;
        let children = [(ComparisonOp::Le, lo), (ComparisonOp::Ge, hi)];
        let order: [usize; 2] = if near_up { [0, 1] } else { [1, 0] };
        for &c in &order {
            let (op, rhs) = children[c];
            let mut e = LinearExpr::empty();
            e.add(y[j], 1.0);
            match sol.clone().add_constraint(e, op, rhs) {
                Ok(child) => stack.push(child),
                Err(minilp::Error::Infeasible) => {}
                Err(e) => return Err(Error::Consistency(format!("relaxation failed: {e}"))),
            }
        }
    }
    if !exhausted && best.is_none() {
        return Err(Error::TooLarge("node budget exhausted before any feasible point".into()));
    }
    Ok(best.map(|b| (lat.to_map(&b.x), exhausted)))
}
