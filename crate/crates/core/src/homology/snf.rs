//! Sparse Smith normal form over the integers.
//!
//! Elimination picks unit pivots first (Markowitz-cheapest), then the
//! smallest-magnitude entry, and finishes with a pairwise gcd pass so the
//! diagonal forms a divisibility chain. Row operations are mirrored into
//! `U` and its inverse, column operations into `V` and its inverse, so the
//! certificate can be checked by multiplication alone.
//!
//! Arithmetic first runs in checked `i64`; any overflow restarts the whole
//! computation over `BigInt`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Integer arithmetic with overflow reporting.
pub trait Coeff: Clone + Debug + PartialEq + Zero + One {
    fn c_add(&self, o: &Self) -> Option<Self>;
    fn c_mul(&self, o: &Self) -> Option<Self>;
    fn c_neg(&self) -> Option<Self>;
    /// Floor-rounded quotient (remainder has the sign of the divisor).
    fn c_div_floor(&self, o: &Self) -> Option<Self>;
    fn magnitude(&self) -> BigInt;
    fn is_unit(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn to_big(&self) -> BigInt;
    fn from_i64(v: i64) -> Self;
}

impl Coeff for i64 {
    fn c_add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn c_mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn c_neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn c_div_floor(&self, o: &Self) -> Option<Self> {
        if *self == i64::MIN && *o == -1 {
            return None;
        }
        Some(Integer::div_floor(self, o))
    }
    fn magnitude(&self) -> BigInt {
        BigInt::from(*self).abs()
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_i64(v: i64) -> Self {
        v
    }
}

impl Coeff for BigInt {
    fn c_add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn c_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn c_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn c_div_floor(&self, o: &Self) -> Option<Self> {
        Some(Integer::div_floor(self, o))
    }
    fn magnitude(&self) -> BigInt {
        self.abs()
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
}

#[derive(Debug)]
struct Overflow;

type Sparse<C> = Vec<BTreeMap<usize, C>>;

fn axpy<C: Coeff>(dst: &mut BTreeMap<usize, C>, src: &BTreeMap<usize, C>, f: &C) -> std::result::Result<(), Overflow> {
    for (k, v) in src {
        let add = v.c_mul(f).ok_or(Overflow)?;
        let new = match dst.get(k) {
            Some(old) => old.c_add(&add).ok_or(Overflow)?,
            None => add,
        };
        if new.is_zero() {
            dst.remove(k);
        } else {
            dst.insert(*k, new);
        }
    }
    Ok(())
}

/// Sparse integer matrix with column-major storage and a row index.
#[derive(Clone, Debug)]
pub struct SparseIntMatrix<C> {
    n_rows: usize,
    cols: Sparse<C>,
    rows: Vec<BTreeSet<usize>>,
}

impl<C: Coeff> SparseIntMatrix<C> {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        SparseIntMatrix { n_rows, cols: vec![BTreeMap::new(); n_cols], rows: vec![BTreeSet::new(); n_rows] }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.cols[c].get(&r).cloned().unwrap_or_else(C::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: C) {
        if v.is_zero() {
            self.cols[c].remove(&r);
            self.rows[r].remove(&c);
        } else {
            self.cols[c].insert(r, v);
            self.rows[r].insert(c);
        }
    }

    pub fn column(&self, c: usize) -> &BTreeMap<usize, C> {
        &self.cols[c]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(BTreeMap::len).sum()
    }

    fn col_axpy(&mut self, dst: usize, src: usize, f: &C) -> std::result::Result<(), Overflow> {
        let src_col = self.cols[src].clone();
        for (r, v) in &src_col {
            let add = v.c_mul(f).ok_or(Overflow)?;
            let new = match self.cols[dst].get(r) {
                Some(old) => old.c_add(&add).ok_or(Overflow)?,
                None => add,
            };
            self.set(*r, dst, new);
        }
        Ok(())
    }

    fn row_axpy(&mut self, dst: usize, src: usize, f: &C) -> std::result::Result<(), Overflow> {
        let src_cols: Vec<usize> = self.rows[src].iter().copied().collect();
        for c in src_cols {
            let add = self.cols[c][&src].c_mul(f).ok_or(Overflow)?;
            let new = match self.cols[c].get(&dst) {
                Some(old) => old.c_add(&add).ok_or(Overflow)?,
                None => add,
            };
            self.set(dst, c, new);
        }
        Ok(())
    }

    fn negate_row(&mut self, r: usize) -> std::result::Result<(), Overflow> {
        let cs: Vec<usize> = self.rows[r].iter().copied().collect();
        for c in cs {
            let v = self.cols[c][&r].c_neg().ok_or(Overflow)?;
            self.cols[c].insert(r, v);
        }
        Ok(())
    }

    pub fn to_big(&self) -> SparseIntMatrix<BigInt> {
        SparseIntMatrix {
            n_rows: self.n_rows,
            cols: self.cols.iter().map(|c| c.iter().map(|(k, v)| (*k, v.to_big())).collect()).collect(),
            rows: self.rows.clone(),
        }
    }

    /// Dense copy, mainly for tests.
    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.n_cols()]; self.n_rows];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                d[*r][c] = v.to_big();
            }
        }
        d
    }
}

/// Transform matrices and their inverses, updated alongside elimination.
struct Transforms<C> {
    u: Sparse<C>,     // rows of U
    u_inv: Sparse<C>, // columns of U⁻¹
    v: Sparse<C>,     // columns of V
    v_inv: Sparse<C>, // rows of V⁻¹
}

fn identity<C: Coeff>(n: usize) -> Sparse<C> {
    (0..n).map(|i| BTreeMap::from([(i, C::one())])).collect()
}

impl<C: Coeff> Transforms<C> {
    fn new(m: usize, n: usize) -> Self {
        Transforms { u: identity(m), u_inv: identity(m), v: identity(n), v_inv: identity(n) }
    }

    // row_dst += f · row_src
    fn row_op(&mut self, dst: usize, src: usize, f: &C) -> std::result::Result<(), Overflow> {
        let s = self.u[src].clone();
        axpy(&mut self.u[dst], &s, f)?;
        let nf = f.c_neg().ok_or(Overflow)?;
        let d = self.u_inv[dst].clone();
        axpy(&mut self.u_inv[src], &d, &nf)
    }

    // col_dst += f · col_src
    fn col_op(&mut self, dst: usize, src: usize, f: &C) -> std::result::Result<(), Overflow> {
        let s = self.v[src].clone();
        axpy(&mut self.v[dst], &s, f)?;
        let nf = f.c_neg().ok_or(Overflow)?;
        let d = self.v_inv[dst].clone();
        axpy(&mut self.v_inv[src], &d, &nf)
    }

    fn negate_row(&mut self, r: usize) -> std::result::Result<(), Overflow> {
        for v in self.u[r].values_mut() {
            *v = v.c_neg().ok_or(Overflow)?;
        }
        for v in self.u_inv[r].values_mut() {
            *v = v.c_neg().ok_or(Overflow)?;
        }
        Ok(())
    }
}

struct Eliminator<C> {
    a: SparseIntMatrix<C>,
    t: Option<Transforms<C>>,
}

impl<C: Coeff> Eliminator<C> {
    fn row_op(&mut self, dst: usize, src: usize, f: &C) -> std::result::Result<(), Overflow> {
        self.a.row_axpy(dst, src, f)?;
        if let Some(t) = &mut self.t {
            t.row_op(dst, src, f)?;
        }
        Ok(())
    }

    fn col_op(&mut self, dst: usize, src: usize, f: &C) -> std::result::Result<(), Overflow> {
        self.a.col_axpy(dst, src, f)?;
        if let Some(t) = &mut self.t {
            t.col_op(dst, src, f)?;
        }
        Ok(())
    }

    fn negate_row(&mut self, r: usize) -> std::result::Result<(), Overflow> {
        self.a.negate_row(r)?;
        if let Some(t) = &mut self.t {
            t.negate_row(r)?;
        }
        Ok(())
    }

    fn pick_pivot(&self, used_rows: &[bool]) -> Option<(usize, usize)> {
        let mut best_unit: Option<(usize, usize, usize)> = None;
        let mut best_small: Option<(BigInt, usize, usize)> = None;
        for (c, col) in self.a.cols.iter().enumerate() {
            for (r, v) in col {
                if used_rows[*r] {
                    continue;
                }
                if v.is_unit() {
                    let cost = (self.a.rows[*r].len() - 1) * (col.len() - 1);
                    if best_unit.map_or(true, |b| cost < b.0) {
                        best_unit = Some((cost, *r, c));
                        if cost == 0 {
                            return Some((*r, c));
                        }
                    }
                } else if best_unit.is_none() {
                    let m = v.magnitude();
                    if best_small.as_ref().map_or(true, |b| m < b.0) {
                        best_small = Some((m, *r, c));
                    }
                }
            }
        }
        best_unit.map(|(_, r, c)| (r, c)).or(best_small.map(|(_, r, c)| (r, c)))
    }

    /// Clears row `r` and column `c` around the pivot, restricted to rows in
    /// `live_rows`/cols in `live_cols` (None = all). Returns the final pivot
    /// position, which may move when a smaller remainder appears.
    fn clear_cross(
        &mut self,
        mut r: usize,
        mut c: usize,
        used_rows: &[bool],
        used_cols: &[bool],
    ) -> std::result::Result<(usize, usize), Overflow> {
        loop {
            let p = self.a.get(r, c);
            // column c: row ops
            let others: Vec<usize> =
                self.a.cols[c].keys().copied().filter(|&i| i != r && !used_rows[i]).collect();
            let mut smaller: Option<usize> = None;
            for i in others {
                let q = self.a.get(i, c).c_div_floor(&p).ok_or(Overflow)?;
                let nq = q.c_neg().ok_or(Overflow)?;
                if !q.is_zero() {
                    self.row_op(i, r, &nq)?;
                }
                if !self.a.get(i, c).is_zero() {
                    smaller = Some(i);
                }
            }
            if let Some(i) = smaller {
                r = i;
                continue;
            }
            // row r: column ops
            let others: Vec<usize> =
                self.a.rows[r].iter().copied().filter(|&j| j != c && !used_cols[j]).collect();
            let mut smaller: Option<usize> = None;
            for j in others {
                let q = self.a.get(r, j).c_div_floor(&p).ok_or(Overflow)?;
                let nq = q.c_neg().ok_or(Overflow)?;
                if !q.is_zero() {
                    self.col_op(j, c, &nq)?;
                }
                if !self.a.get(r, j).is_zero() {
                    smaller = Some(j);
                }
            }
            match smaller {
                Some(j) => {
                    c = j;
                }
                None => {
                    if self.a.cols[c].len() == 1 {
                        return Ok((r, c));
                    }
                }
            }
        }
    }

    fn run(mut self) -> std::result::Result<RawSnf<C>, Overflow> {
        let (m, n) = (self.a.n_rows, self.a.n_cols());
        let mut used_rows = vec![false; m];
        let mut used_cols = vec![false; n];
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        while let Some((r0, c0)) = self.pick_pivot(&used_rows) {
            let (r, c) = self.clear_cross(r0, c0, &used_rows, &used_cols)?;
            if self.a.get(r, c).is_negative() {
                self.negate_row(r)?;
            }
            used_rows[r] = true;
            used_cols[c] = true;
            pivots.push((r, c));
        }
        // divisibility repair among non-unit pivots
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..pivots.len() {
                for j in (i + 1)..pivots.len() {
                    let (ri, ci) = pivots[i];
                    let (rj, cj) = pivots[j];
                    let a = self.a.get(ri, ci);
                    let b = self.a.get(rj, cj);
                    let (ab, bb) = (a.to_big(), b.to_big());
                    let (lo, hi, lo_idx, hi_idx) =
                        if ab <= bb { (ab, bb, i, j) } else { (bb, ab, j, i) };
                    if (&hi % &lo).is_zero() {
                        continue;
                    }
                    changed = true;
                    let (rl, cl) = pivots[lo_idx];
                    let (rh, ch) = pivots[hi_idx];
                    // row_l += row_h puts hi at (rl, ch); re-clear within the 2x2 block
                    self.row_op(rl, rh, &C::one())?;
                    let mut ur = vec![true; m];
                    let mut uc = vec![true; n];
                    ur[rl] = false;
                    ur[rh] = false;
                    uc[cl] = false;
                    uc[ch] = false;
                    let (r1, c1) = self.clear_cross(rl, cl, &ur, &uc)?;
                    let (r2, c2) = (if r1 == rl { rh } else { rl }, if c1 == cl { ch } else { cl });
                    for (rr, cc) in [(r1, c1), (r2, c2)] {
                        if self.a.get(rr, cc).is_negative() {
                            self.negate_row(rr)?;
                        }
                    }
                    pivots[lo_idx] = (r1, c1);
                    pivots[hi_idx] = (r2, c2);
                }
            }
        }
        pivots.sort_by_key(|&(r, c)| self.a.get(r, c).to_big());
        Ok(RawSnf { a: self.a, t: self.t, pivots })
    }
}

struct RawSnf<C> {
    a: SparseIntMatrix<C>,
    t: Option<Transforms<C>>,
    pivots: Vec<(usize, usize)>,
}

/// Smith normal form `U · B · V = diag(d₁, …, d_r, 0, …)` with `dᵢ | dᵢ₊₁`.
///
/// `U` and `V` are stored permuted so the invariant factors sit on the
/// leading diagonal. Inverses are carried along for the unimodularity check.
#[derive(Clone, Debug)]
pub struct SnfCertificate {
    pub n_rows: usize,
    pub n_cols: usize,
    pub diagonal: Vec<BigInt>,
    /// Rows of `U`.
    pub u: Vec<BTreeMap<usize, BigInt>>,
    /// Columns of `U⁻¹`.
    pub u_inv: Vec<BTreeMap<usize, BigInt>>,
    /// Columns of `V`.
    pub v: Vec<BTreeMap<usize, BigInt>>,
    /// Rows of `V⁻¹`.
    pub v_inv: Vec<BTreeMap<usize, BigInt>>,
}

/// Invariant factors only (no transforms).
pub fn invariant_factors<C: Coeff>(b: &SparseIntMatrix<C>) -> Vec<BigInt> {
    let run = |m: SparseIntMatrix<BigInt>| {
        Eliminator { a: m, t: None }.run().expect("BigInt never overflows")
    };
    let raw = match (Eliminator { a: to_i64(b), t: None }).run() {
        Ok(r) => r.pivots.iter().map(|&(r_, c)| r.a.get(r_, c).to_big()).collect(),
        Err(Overflow) => {
            let r = run(b.to_big());
            r.pivots.iter().map(|&(r_, c)| r.a.get(r_, c)).collect()
        }
    };
    raw
}

fn to_i64<C: Coeff>(b: &SparseIntMatrix<C>) -> SparseIntMatrix<i64> {
    let mut m = SparseIntMatrix::new(b.n_rows, b.n_cols());
    for (c, col) in b.cols.iter().enumerate() {
        for (r, v) in col {
            m.set(*r, c, v.to_big().to_i64().expect("boundary entries fit i64"));
        }
    }
    m
}

/// Row-major ↔ column-major.
fn transpose(m: &[BTreeMap<usize, BigInt>], n_other: usize) -> Vec<BTreeMap<usize, BigInt>> {
    let mut t = vec![BTreeMap::new(); n_other];
    for (i, row) in m.iter().enumerate() {
        for (k, v) in row {
            t[*k].insert(i, v.clone());
        }
    }
    t
}

/// `M · x` with `M` given by columns.
fn mat_vec(cols: &[BTreeMap<usize, BigInt>], x: &BTreeMap<usize, BigInt>) -> BTreeMap<usize, BigInt> {
    let mut out: BTreeMap<usize, BigInt> = BTreeMap::new();
    for (k, xk) in x {
        for (i, m) in &cols[*k] {
            *out.entry(*i).or_insert_with(BigInt::zero) += m * xk;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn convert<C: Coeff>(s: &Sparse<C>) -> Vec<BTreeMap<usize, BigInt>> {
    s.iter().map(|m| m.iter().map(|(k, v)| (*k, v.to_big())).collect()).collect()
}

impl SnfCertificate {
    /// Computes the certificate and verifies it by multiplication.
    pub fn compute<C: Coeff>(b: &SparseIntMatrix<C>) -> Result<Self> {
        let (m, n) = (b.n_rows, b.n_cols());
        let raw = match (Eliminator { a: to_i64(b), t: Some(Transforms::new(m, n)) }).run() {
            Ok(r) => Self::from_raw(r, m, n),
            Err(Overflow) => {
                let r = Eliminator { a: b.to_big(), t: Some(Transforms::new(m, n)) }
                    .run()
                    .expect("BigInt never overflows");
                Self::from_raw(r, m, n)
            }
        };
        raw.verify(&b.to_big())?;
        Ok(raw)
    }

    fn from_raw<C: Coeff>(r: RawSnf<C>, m: usize, n: usize) -> Self {
        let t = r.t.expect("transforms tracked");
        let diagonal: Vec<BigInt> = r.pivots.iter().map(|&(i, j)| r.a.get(i, j).to_big()).collect();
        let mut row_order: Vec<usize> = r.pivots.iter().map(|p| p.0).collect();
        let mut col_order: Vec<usize> = r.pivots.iter().map(|p| p.1).collect();
        let pr: BTreeSet<usize> = row_order.iter().copied().collect();
        let pc: BTreeSet<usize> = col_order.iter().copied().collect();
        row_order.extend((0..m).filter(|i| !pr.contains(i)));
        col_order.extend((0..n).filter(|j| !pc.contains(j)));
        // row k of the permuted U is old row row_order[k]; the matching
        // columns of U⁻¹ move with it.
        let u_old = convert(&t.u);
        let u_inv_old = convert(&t.u_inv);
        let u: Vec<_> = row_order.iter().map(|&o| u_old[o].clone()).collect();
        let u_inv: Vec<_> = row_order.iter().map(|&o| u_inv_old[o].clone()).collect();
        let v_old = convert(&t.v);
        let v_inv_old = convert(&t.v_inv);
        let v: Vec<_> = col_order.iter().map(|&o| v_old[o].clone()).collect();
        let v_inv: Vec<_> = col_order.iter().map(|&o| v_inv_old[o].clone()).collect();
        SnfCertificate { n_rows: m, n_cols: n, diagonal, u, u_inv, v, v_inv }
    }

    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Checks `U·B·V = D`, `U·U⁻¹ = I`, `V⁻¹·V = I` and divisibility.
    pub fn verify(&self, b: &SparseIntMatrix<BigInt>) -> Result<()> {
        let fail = |m: &str| Err(Error::Consistency(format!("SNF certificate: {m}")));
        for w in self.diagonal.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return fail("divisibility chain broken");
            }
        }
        if self.diagonal.iter().any(|d| !d.is_positive()) {
            return fail("nonpositive invariant factor");
        }
        let u_cols = transpose(&self.u, self.n_rows);
        let v_inv_cols = transpose(&self.v_inv, self.n_cols);
        for j in 0..self.n_cols {
            let mut bv: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (k, vk) in &self.v[j] {
                for (r, bval) in b.column(*k) {
                    *bv.entry(*r).or_insert_with(BigInt::zero) += bval * vk;
                }
            }
            let ubv = mat_vec(&u_cols, &bv);
            let ok = if j < self.diagonal.len() {
                ubv.len() == 1 && ubv.get(&j) == Some(&self.diagonal[j])
            } else {
                ubv.is_empty()
            };
            if !ok {
                return fail("U·B·V is not the diagonal form");
            }
        }
        // U⁻¹ columns are indexed by U's row index; their entries by B's rows.
        for (j, col) in self.u_inv.iter().enumerate() {
            let e = mat_vec(&u_cols, col);
            if e.len() != 1 || e.get(&j) != Some(&BigInt::one()) {
                return fail("U is not unimodular");
            }
        }
        for (j, col) in self.v.iter().enumerate() {
            let e = mat_vec(&v_inv_cols, col);
            if e.len() != 1 || e.get(&j) != Some(&BigInt::one()) {
                return fail("V is not unimodular");
            }
        }
        Ok(())
    }

    /// Solves `B x = z` over ℤ; `None` when no integer solution exists.
    pub fn solve(&self, z: &BTreeMap<usize, BigInt>) -> Option<BTreeMap<usize, BigInt>> {
        // y = D⁺ (U z), x = V y
        let mut x: BTreeMap<usize, BigInt> = BTreeMap::new();
        for (i, row) in self.u.iter().enumerate() {
            let uz: BigInt = row.iter().filter_map(|(k, a)| z.get(k).map(|b| a * b)).sum();
            if i < self.diagonal.len() {
                let (q, r) = uz.div_rem(&self.diagonal[i]);
                if !r.is_zero() {
                    return None;
                }
                if q.is_zero() {
                    continue;
                }
                for (k, v) in &self.v[i] {
                    *x.entry(*k).or_insert_with(BigInt::zero) += v * &q;
                }
            } else if !uz.is_zero() {
                return None;
            }
        }
        x.retain(|_, v| !v.is_zero());
        Some(x)
    }

    /// Coordinates of `U z` that must vanish for `B x = z` to be solvable:
    /// residues mod `dᵢ` on rows with `dᵢ > 1`, raw values past the rank.
    /// Linear in `z` (componentwise, modulo the residues).
    pub fn obstruction(&self, z: &BTreeMap<usize, BigInt>) -> Vec<BigInt> {
        let mut out = Vec::new();
        for (i, row) in self.u.iter().enumerate() {
            let uz: BigInt = row.iter().filter_map(|(k, a)| z.get(k).map(|b| a * b)).sum();
            match self.diagonal.get(i) {
                Some(d) if d.is_one() => {}
                Some(d) => out.push(uz.mod_floor(d)),
                None => out.push(uz),
            }
        }
        out
    }

    /// Obstruction rows of the columns of `U` for the given edge indices,
    /// unreduced. Summing `aₑ·col(e)` and reducing gives the obstruction of
    /// `Σ aₑ e`.
    pub fn obstruction_columns(&self, cols: &BTreeSet<usize>) -> BTreeMap<usize, Vec<BigInt>> {
        let rows: Vec<usize> = (0..self.u.len())
            .filter(|i| self.diagonal.get(*i).map_or(true, |d| !d.is_one()))
            .collect();
        let mut out: BTreeMap<usize, Vec<BigInt>> =
            cols.iter().map(|c| (*c, vec![BigInt::zero(); rows.len()])).collect();
        for (slot, &i) in rows.iter().enumerate() {
            for (k, a) in &self.u[i] {
                if let Some(v) = out.get_mut(k) {
                    v[slot] = a.clone();
                }
            }
        }
        out
    }

    /// Moduli matching [`obstruction`](Self::obstruction); zero marks a free row.
    pub fn obstruction_moduli(&self) -> Vec<BigInt> {
        (0..self.u.len())
            .filter_map(|i| match self.diagonal.get(i) {
                Some(d) if d.is_one() => None,
                Some(d) => Some(d.clone()),
                None => Some(BigInt::zero()),
            })
            .collect()
    }

    /// ℤ-basis of the kernel of `B`: the trailing columns of `V`.
    pub fn kernel_basis(&self) -> Vec<BTreeMap<usize, BigInt>> {
        self.v[self.diagonal.len()..].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_dense(d: &[&[i64]]) -> SparseIntMatrix<i64> {
        let mut m = SparseIntMatrix::new(d.len(), d[0].len());
        for (i, row) in d.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    #[test]
    fn diagonal_of_classic_example() {
        let m = from_dense(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let cert = SnfCertificate::compute(&m).unwrap();
        let d: Vec<i64> = cert.diagonal.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(d, vec![2, 6, 12]);
        assert_eq!(invariant_factors(&m).len(), 3);
    }

    #[test]
    fn non_dividing_pivots_repaired() {
        let m = from_dense(&[&[2, 0], &[0, 3]]);
        let cert = SnfCertificate::compute(&m).unwrap();
        let d: Vec<i64> = cert.diagonal.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(d, vec![1, 6]);
    }

    #[test]
    fn solve_and_kernel() {
        // x0 + x1 = 3, rank 1, kernel spanned by (1,-1)
        let m = from_dense(&[&[1, 1]]);
        let cert = SnfCertificate::compute(&m).unwrap();
        let z = BTreeMap::from([(0usize, BigInt::from(3))]);
        let x = cert.solve(&z).unwrap();
        let s: BigInt = x.values().sum();
        assert_eq!(s, BigInt::from(3));
        assert_eq!(cert.kernel_basis().len(), 1);
        // 2x = 1 has no integer solution
        let m2 = from_dense(&[&[2]]);
        let c2 = SnfCertificate::compute(&m2).unwrap();
        assert!(c2.solve(&BTreeMap::from([(0usize, BigInt::from(1))])).is_none());
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 2;
        let m = from_dense(&[&[big, big - 1], &[big - 3, big - 7]]);
        let cert = SnfCertificate::compute(&m).unwrap();
        assert_eq!(cert.rank(), 2);
    }
}
