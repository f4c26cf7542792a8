//! Exhaustive filling search, used as an independent oracle.

use crate::chain::Chain;
use crate::complex::WeightedComplex;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::FillingResult;

/// Largest number of 2-simplices the oracle accepts.
pub const BRUTE_FORCE_MAX_TRIANGLES: usize = 16;

/// Minimal-mass filling among all coefficient vectors with entries in
/// `[-coeff_bound, coeff_bound]`, or `None` if no such vector fills `z`.
///
/// Triangles are assigned in canonical order, coefficients from `-b` up to
/// `b`. An edge is checked as soon as its last incident triangle is fixed.
/// Only strict improvements replace the incumbent, so ties resolve to the
/// lexicographically smallest vector.
pub fn brute_force_filling<T: Scalar>(
    z: &Chain,
    complex: &WeightedComplex<T>,
    coeff_bound: i64,
) -> Result<Option<FillingResult<T>>> {
    let tris = complex.simplices(2);
    if tris.len() > BRUTE_FORCE_MAX_TRIANGLES {
        return Err(Error::TooLarge(format!(
            "{} two-simplices exceed the brute-force limit {BRUTE_FORCE_MAX_TRIANGLES}",
            tris.len()
        )));
    }
    if z.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, found: z.degree() });
    }
    complex.check_chain(z)?;
    if !z.is_cycle() {
        return Err(Error::NotACycle);
    }
    let n_edges = complex.count(1);
    let target: Vec<i64> = complex.simplices(1).iter().map(|e| z.coeff(e)).collect();
    // (edge, sign) per triangle, and edges closed after each triangle
    let mut incid: Vec<Vec<(usize, i64)>> = Vec::with_capacity(tris.len());
    let mut last = vec![None::<usize>; n_edges];
    for (t, s) in tris.iter().enumerate() {
        let faces: Vec<(usize, i64)> =
            s.faces().map(|(f, sg)| (complex.index_of(&f).expect("closed complex"), sg)).collect();
        for &(e, _) in &faces {
            last[e] = Some(t);
        }
        incid.push(faces);
    }
    let mut closes: Vec<Vec<usize>> = vec![Vec::new(); tris.len()];
    for (e, l) in last.iter().enumerate() {
        match l {
            Some(t) => closes[*t].push(e),
            None if target[e] != 0 => return Ok(None),
            None => {}
        }
    }
    let vols: Vec<f64> = complex.volumes(2).iter().map(|v| v.as_f64()).collect();

    let mut st = State {
        b: coeff_bound.max(0),
        incid: &incid,
        closes: &closes,
        target: &target,
        vols: &vols,
        acc: vec![0; n_edges],
        cur: vec![0; tris.len()],
        best: None,
    };
    if tris.is_empty() {
        return Ok(z.is_empty().then(|| FillingResult {
            filling: Some(Chain::zero(2)),
            mass: T::zero(),
            max_abs_coeff: 0,
            optimal: true,
        }));
    }
    st.go(0, 0.0);
    let Some((_, x)) = st.best else { return Ok(None) };
    let c = Chain::from_terms(2, tris.iter().cloned().zip(x))?;
    Ok(Some(FillingResult {
        mass: complex.mass(&c),
        max_abs_coeff: c.max_abs_coeff(),
        filling: Some(c),
        optimal: true,
    }))
}

struct State<'a> {
    b: i64,
    incid: &'a [Vec<(usize, i64)>],
    closes: &'a [Vec<usize>],
    target: &'a [i64],
    vols: &'a [f64],
    acc: Vec<i64>,
    cur: Vec<i64>,
    best: Option<(f64, Vec<i64>)>,
}

impl State<'_> {
    fn go(&mut self, t: usize, mass: f64) {
        if t == self.cur.len() {
            if self.best.as_ref().map_or(true, |(m, _)| mass < *m - 1e-12 * m.max(1.0)) {
                self.best = Some((mass, self.cur.clone()));
            }
            return;
        }
        for a in -self.b..=self.b {
            let m = mass + a.abs() as f64 * self.vols[t];
            if let Some((bm, _)) = &self.best {
                if m > *bm + 1e-12 * bm.max(1.0) {
                    continue;
                }
            }
            for &(e, s) in &self.incid[t] {
                self.acc[e] += s * a;
            }
            if self.closes[t].iter().all(|&e| self.acc[e] == self.target[e]) {
                self.cur[t] = a;
                self.go(t + 1, m);
            }
            for &(e, s) in &self.incid[t] {
                self.acc[e] -= s * a;
            }
        }
        self.cur[t] = 0;
    }
}
