//! Exact integer homology and the filling problem `∂₂ x = z`.

mod brute;
mod hf1;
mod nr;
mod search;
pub mod snf;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

pub use brute::{brute_force_filling, BRUTE_FORCE_MAX_TRIANGLES};
pub use hf1::{hf1_curve, hf1_estimate, hf1_estimate_threads, sample_cycles, Hf1Sample};
pub use nr::{nr_coefficient_bound, nr_coefficient_bound_exact, nr_term_count_bound};
pub use search::SearchConfig;
pub use snf::{invariant_factors, SnfCertificate, SparseIntMatrix};

use crate::chain::Chain;
use crate::complex::WeightedComplex;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Matrix of `∂_k`: rows are (k−1)-simplices, columns k-simplices, both in
/// the complex's canonical order.
#[derive(Clone, Debug)]
pub struct BoundaryMatrix {
    pub degree: usize,
    pub matrix: SparseIntMatrix<i64>,
}

impl BoundaryMatrix {
    pub fn new<T: Scalar>(complex: &WeightedComplex<T>, k: usize) -> Self {
        assert!(k >= 1);
        let rows = complex.count(k - 1);
        let cols = complex.simplices(k);
        let mut m = SparseIntMatrix::new(rows, cols.len());
        for (j, s) in cols.iter().enumerate() {
            for (f, sign) in s.faces() {
                let i = complex.index_of(&f).expect("closed complex");
                m.set(i, j, sign);
            }
        }
        BoundaryMatrix { degree: k, matrix: m }
    }
}

/// Betti number and torsion coefficients of `H_k(complex; ℤ)`.
pub fn homology_rank_and_torsion<T: Scalar>(
    complex: &WeightedComplex<T>,
    k: usize,
) -> Result<(usize, Vec<BigInt>)> {
    if k > complex.dim() {
        return Err(Error::DegreeOutOfRange { k, dim: complex.dim() });
    }
    let n_k = complex.count(k);
    let rank_k = if k == 0 { 0 } else { invariant_factors(&BoundaryMatrix::new(complex, k).matrix).len() };
    let (rank_next, torsion) = if k < complex.dim() {
        let d = invariant_factors(&BoundaryMatrix::new(complex, k + 1).matrix);
        let t: Vec<BigInt> = d.iter().filter(|x| !x.is_one()).cloned().collect();
        (d.len(), t)
    } else {
        (0, Vec::new())
    };
    Ok((n_k - rank_k - rank_next, torsion))
}

/// True iff `H₁ = 0`.
pub fn h1_trivial<T: Scalar>(complex: &WeightedComplex<T>) -> Result<bool> {
    if complex.dim() == 0 {
        return Ok(true);
    }
    let (b, t) = homology_rank_and_torsion(complex, 1)?;
    Ok(b == 0 && t.is_empty())
}

/// Outcome of a filling query.
#[derive(Clone, Debug, PartialEq)]
pub struct FillingResult<T> {
    pub filling: Option<Chain>,
    pub mass: T,
    pub max_abs_coeff: i64,
    pub optimal: bool,
}

impl<T: Scalar> FillingResult<T> {
    pub fn infeasible() -> Self {
        FillingResult { filling: None, mass: T::zero(), max_abs_coeff: 0, optimal: true }
    }

    fn found(complex: &WeightedComplex<T>, c: Chain, optimal: bool) -> Self {
        FillingResult { mass: complex.mass(&c), max_abs_coeff: c.max_abs_coeff(), filling: Some(c), optimal }
    }

    pub fn is_feasible(&self) -> bool {
        self.filling.is_some()
    }
}

/// JSON shape of a filling result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillingResultJson {
    pub feasible: bool,
    pub optimal: bool,
    pub mass: f64,
    pub max_abs_coeff: i64,
    pub terms: Vec<crate::io::TermJson>,
}

impl<T: Scalar> From<&FillingResult<T>> for FillingResultJson {
    fn from(r: &FillingResult<T>) -> Self {
        FillingResultJson {
            feasible: r.filling.is_some(),
            optimal: r.optimal,
            mass: r.mass.as_f64(),
            max_abs_coeff: r.max_abs_coeff,
            terms: r.filling.as_ref().map(crate::io::chain_terms).unwrap_or_default(),
        }
    }
}

/// Filling solver for one complex; computes and caches the SNF of `∂₂`.
pub struct FillingSolver<'a, T> {
    complex: &'a WeightedComplex<T>,
    cert: Option<Arc<SnfCertificate>>,
}

impl<'a, T: Scalar> FillingSolver<'a, T> {
    pub fn new(complex: &'a WeightedComplex<T>) -> Result<Self> {
        let cert = if complex.dim() >= 2 && complex.count(2) > 0 {
            Some(Arc::new(SnfCertificate::compute(&BoundaryMatrix::new(complex, 2).matrix)?))
        } else {
            None
        };
        Ok(FillingSolver { complex, cert })
    }

    /// Reuses a certificate computed earlier for the same complex.
    pub fn with_certificate(complex: &'a WeightedComplex<T>, cert: Option<Arc<SnfCertificate>>) -> Self {
        FillingSolver { complex, cert }
    }

    pub fn shared_certificate(&self) -> Option<Arc<SnfCertificate>> {
        self.cert.clone()
    }

    pub fn complex(&self) -> &'a WeightedComplex<T> {
        self.complex
    }

    pub fn certificate(&self) -> Option<&SnfCertificate> {
        self.cert.as_deref()
    }

    fn check_cycle(&self, z: &Chain) -> Result<()> {
        if z.degree() != 1 {
            return Err(Error::DegreeMismatch { expected: 1, found: z.degree() });
        }
        self.complex.check_chain(z)?;
        if !z.is_cycle() {
            return Err(Error::NotACycle);
        }
        Ok(())
    }

    fn edge_vector(&self, z: &Chain) -> BTreeMap<usize, BigInt> {
        z.iter()
            .map(|(s, a)| (self.complex.index_of(s).expect("checked"), BigInt::from(a)))
            .collect()
    }

    pub(crate) fn chain_from_vector(&self, x: &BTreeMap<usize, BigInt>) -> Result<Chain> {
        let tris = self.complex.simplices(2);
        let mut c = Chain::zero(2);
        for (i, a) in x {
            let a = a.to_i64().ok_or_else(|| Error::TooLarge("filling coefficient exceeds i64".into()))?;
            c.add_term(tris[*i].clone(), a);
        }
        Ok(c)
    }

    fn particular(&self, z: &Chain) -> Result<Option<BTreeMap<usize, BigInt>>> {
        self.check_cycle(z)?;
        if z.is_empty() {
            return Ok(Some(BTreeMap::new()));
        }
        Ok(match &self.cert {
            Some(c) => c.solve(&self.edge_vector(z)),
            None => None,
        })
    }

    /// Solvability of `∂₂ x = z` over ℤ.
    pub fn fills_exist(&self, z: &Chain) -> Result<bool> {
        Ok(self.particular(z)?.is_some())
    }

    /// Some exact integer filling (not minimized).
    pub fn some_filling(&self, z: &Chain) -> Result<FillingResult<T>> {
        let x = self.particular(z)?.ok_or(Error::DoesNotBound)?;
        Ok(FillingResult::found(self.complex, self.chain_from_vector(&x)?, false))
    }

    fn kernel(&self) -> Vec<BTreeMap<usize, BigInt>> {
        self.cert.as_ref().map(|c| c.kernel_basis()).unwrap_or_default()
    }

    /// Filling with every |coefficient| ≤ `coeff_bound`; among those, one of
    /// least coefficient sum. `Ok(None)` when the search proves none exists.
    pub fn bounded_filling(
        &self,
        z: &Chain,
        coeff_bound: &BigInt,
        config: &SearchConfig,
    ) -> Result<Option<FillingResult<T>>> {
        let Some(xp) = self.particular(z)? else { return Ok(None) };
        let bound = coeff_bound.to_f64().unwrap_or(f64::INFINITY);
        let weights = vec![1.0; self.complex.count(2)];
        let out = search::minimize(&xp, &self.kernel(), &weights, Some(bound), config)?;
        match out {
            None => Ok(None),
            Some((x, optimal)) => {
                Ok(Some(FillingResult::found(self.complex, self.chain_from_vector(&x)?, optimal)))
            }
        }
    }

    /// Minimal-mass integer filling; `optimal` is false when the node budget
    /// ran out first.
    pub fn minimal_mass_filling(&self, z: &Chain, config: &SearchConfig) -> Result<FillingResult<T>> {
        let xp = self.particular(z)?.ok_or(Error::DoesNotBound)?;
        let weights: Vec<f64> = self.complex.volumes(2).iter().map(|v| v.as_f64()).collect();
        let (x, optimal) = search::minimize(&xp, &self.kernel(), &weights, None, config)?
            .expect("unboxed search always has the particular solution");
        Ok(FillingResult::found(self.complex, self.chain_from_vector(&x)?, optimal))
    }
}

/// One-shot wrappers.
pub fn fills_exist<T: Scalar>(z: &Chain, complex: &WeightedComplex<T>) -> Result<bool> {
    FillingSolver::new(complex)?.fills_exist(z)
}

pub fn some_filling<T: Scalar>(z: &Chain, complex: &WeightedComplex<T>) -> Result<FillingResult<T>> {
    FillingSolver::new(complex)?.some_filling(z)
}

pub fn bounded_filling<T: Scalar>(
    z: &Chain,
    complex: &WeightedComplex<T>,
    coeff_bound: i64,
) -> Result<Option<FillingResult<T>>> {
    FillingSolver::new(complex)?.bounded_filling(z, &BigInt::from(coeff_bound), &SearchConfig::default())
}

pub fn minimal_mass_filling<T: Scalar>(z: &Chain, complex: &WeightedComplex<T>) -> Result<FillingResult<T>> {
    FillingSolver::new(complex)?.minimal_mass_filling(z, &SearchConfig::default())
}

#[cfg(test)]
mod tests;
