//! The explicit constants `g₁, g₂, h, f₁, f₂` and the area bound `F`.
//!
//! Everything is computed as a base-2 logarithm. When `Ñ ≤ 3` an exact
//! rational shadow is computed as well (the tower `Ñ^{4Ñ^{2Ñ}}` has about
//! 4600 bits at `Ñ = 3`). Past roughly `Ñ = 80` the logarithm itself
//! overflows an `f64`; the `*_log2_log2` fields stay finite.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `Ñ` for which the exact rational shadow is computed.
pub const EXACT_MAX_BALLS: u64 = 3;

/// Inputs of the bound: total ball count `Ñ`, diameter `D`, the neck
/// constant `B`, tree depth `k`, bodies per level `N`, the largest torsion
/// order `h₁` of a neck, and the harmonic bound `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub n_tilde: u64,
    pub d: f64,
    pub b: f64,
    pub k_depth: u64,
    pub n_width: u64,
    pub h1: u64,
    pub epsilon: f64,
}

impl BoundParams {
    /// `B(ε) = (20/3)·√(1−ε)·√(1+2ε)`, as printed.
    pub fn b_of_epsilon(eps: f64) -> f64 {
        20.0 / 3.0 * (1.0 - eps).sqrt() * (1.0 + 2.0 * eps).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.n_tilde == 0 {
            return bad("ball count must be at least 1");
        }
        if !(self.d.is_finite() && self.d > 0.0) {
            return bad("diameter must be positive and finite");
        }
        if !(self.b.is_finite() && self.b >= 0.0) {
            return bad("neck constant must be nonnegative and finite");
        }
        if self.k_depth == 0 || self.n_width == 0 || self.h1 == 0 {
            return bad("depth, width and torsion order must be at least 1");
        }
        if !(self.epsilon.is_finite() && (0.0..1.0).contains(&self.epsilon)) {
            return bad("epsilon must lie in [0, 1)");
        }
        Ok(())
    }
}

/// Exact values, as `numerator/denominator` decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactBounds {
    pub g1: String,
    pub g2: String,
    pub h: String,
    pub f1: String,
    pub f2: String,
    pub area: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub g1_log2: f64,
    pub g2_log2: f64,
    pub h_log2: f64,
    pub f1_log2: f64,
    pub f2_log2: f64,
    /// `F = 120·f₁·D + 60·f₂`.
    pub area_log2: f64,
    pub f1_log2_log2: f64,
    pub f2_log2_log2: f64,
    pub area_log2_log2: f64,
    pub exact: Option<ExactBounds>,
}

/// `log₂(2^a + 2^b)`.
pub fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    if hi == f64::INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

fn log2_u(x: u64) -> f64 {
    (x as f64).log2()
}

/// `log₂ log₂ Ñ^{4Ñ^{e}}` for the towers, valid when `Ñ ≥ 2`.
fn tower_log2_log2(n: u64, e: f64) -> f64 {
    2.0 + e * log2_u(n) + log2_u(n).log2()
}

fn loglog(log2: f64, fallback: f64) -> f64 {
    if log2.is_finite() {
        if log2 > 0.0 {
            log2.log2()
        } else {
            f64::NEG_INFINITY
        }
    } else {
        fallback
    }
}

pub fn bound_calculator(p: &BoundParams) -> Result<Bounds> {
    p.validate()?;
    let n = p.n_tilde;
    let ln = log2_u(n);
    let nf = n as f64;
    let ld = p.d.log2();
    // log₂ of the towers Ñ^{4Ñ^{2Ñ}} and Ñ^{4Ñ^{Ñ+1}}
    let t1 = 4.0 * nf.powf(2.0 * nf) * ln;
    let t2 = 4.0 * nf.powf(nf + 1.0) * ln;
    let g1 = log2_add(240f64.log2() + t1, (40.0 * nf * nf + 60.0).log2()) + ld;
    let g2 = log2_add(3f64.log2() + t2 + 3.0 * ln + 2.0 * ld, g1 + 1.0 + ld + 3.0 * ln);
    let h = 1.0 + p.h1 as f64 * log2_u(p.h1);
    let f1 = g1 + p.k_depth as f64 * (2.0 * p.b + 1.0).log2();
    let f2 = g2 + h + log2_u(p.n_width) + log2_u(p.k_depth);
    let area = log2_add(120f64.log2() + f1 + ld, 60f64.log2() + f2);
    let tower = if n >= 2 { tower_log2_log2(n, 2.0 * nf) } else { f64::NEG_INFINITY };
    let exact = if n <= EXACT_MAX_BALLS { Some(exact_bounds(p)?) } else { None };
    Ok(Bounds {
        g1_log2: g1,
        g2_log2: g2,
        h_log2: h,
        f1_log2: f1,
        f2_log2: f2,
        area_log2: area,
        f1_log2_log2: loglog(f1, tower),
        f2_log2_log2: loglog(f2, tower),
        area_log2_log2: loglog(area, tower),
        exact,
    })
}

fn rat(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidParams(format!("{x} is not finite")))
}

fn int(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn pow_int(base: u64, e: u64) -> Result<BigRational> {
    let e = u32::try_from(e).map_err(|_| Error::TooLarge(format!("exponent {e}")))?;
    Ok(BigRational::from_integer(Pow::pow(BigInt::from(base), e)))
}

struct ExactValues {
    g1: BigRational,
    g2: BigRational,
    h: BigRational,
    f1: BigRational,
    f2: BigRational,
    area: BigRational,
}

fn exact_values(p: &BoundParams) -> Result<ExactValues> {
    let n = p.n_tilde;
    let d = rat(p.d)?;
    let t1 = pow_int(n, 4 * n.pow(2 * n as u32))?;
    let t2 = pow_int(n, 4 * n.pow(n as u32 + 1))?;
    let n3 = int(n * n * n);
    let g1 = (int(240) * t1 + int(40 * n * n + 60)) * &d;
    let g2 = int(3) * t2 * &n3 * &d * &d + &g1 * int(2) * &d * &n3;
    let h = int(2) * pow_int(p.h1, p.h1)?;
    let growth = int(2) * rat(p.b)? + BigRational::one();
    let k = i32::try_from(p.k_depth).map_err(|_| Error::TooLarge("depth".into()))?;
    let f1 = &g1 * Pow::pow(&growth, k);
    let f2 = &g2 * &h * int(p.n_width) * int(p.k_depth);
    let area = int(120) * &f1 * &d + int(60) * &f2;
    Ok(ExactValues { g1, g2, h, f1, f2, area })
}

fn exact_bounds(p: &BoundParams) -> Result<ExactBounds> {
    let v = exact_values(p)?;
    let s = |x: &BigRational| format!("{}/{}", x.numer(), x.denom());
    Ok(ExactBounds { g1: s(&v.g1), g2: s(&v.g2), h: s(&v.h), f1: s(&v.f1), f2: s(&v.f2), area: s(&v.area) })
}

/// `log₂` of a positive big integer, accurate to f64 precision.
pub fn log2_bigint(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap().abs().log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().abs().log2() + shift as f64
}

pub fn log2_rational(x: &BigRational) -> f64 {
    log2_bigint(x.numer()) - log2_bigint(x.denom())
}

/// `log₂(f₁·mass₁ + f₂)`.
pub fn log2_rhs(b: &Bounds, mass1: f64) -> f64 {
    let lhs = if mass1 > 0.0 { b.f1_log2 + mass1.log2() } else { f64::NEG_INFINITY };
    log2_add(lhs, b.f2_log2)
}

/// `mass₂ ≤ f₁·mass₁ + f₂`, compared in log space.
pub fn bound_holds(b: &Bounds, mass1: f64, mass2: f64) -> bool {
    if mass2 <= 0.0 {
        return true;
    }
    if b.f1_log2.is_infinite() || b.f2_log2.is_infinite() {
        return mass2.is_finite();
    }
    mass2.log2() <= log2_rhs(b, mass1) + 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u64, d: f64) -> BoundParams {
        BoundParams { n_tilde: n, d, b: 2.0, k_depth: 1, n_width: 1, h1: 1, epsilon: 1e-3 }
    }

    #[test]
    fn g1_known_values() {
        let b = bound_calculator(&params(1, 1.0)).unwrap();
        assert!((b.g1_log2 - 340f64.log2()).abs() < 1e-12);
        assert_eq!(b.exact.unwrap().g1, "340/1");
        let b = bound_calculator(&params(2, 1.0)).unwrap();
        assert!((b.g1_log2 - 71.907).abs() < 1e-3, "{}", b.g1_log2);
    }

    #[test]
    fn exact_matches_log_space() {
        for n in 1..=3 {
            for d in [0.5, 1.0, 3.25] {
                let p = BoundParams { n_tilde: n, d, b: 6.5, k_depth: 3, n_width: 2, h1: 5, epsilon: 1e-3 };
                let b = bound_calculator(&p).unwrap();
                let v = exact_values(&p).unwrap();
                for (lg, ex) in [
                    (b.g1_log2, &v.g1),
                    (b.g2_log2, &v.g2),
                    (b.h_log2, &v.h),
                    (b.f1_log2, &v.f1),
                    (b.f2_log2, &v.f2),
                    (b.area_log2, &v.area),
                ] {
                    let e = log2_rational(ex);
                    assert!((lg - e).abs() <= 1e-9 * e.abs().max(1.0), "n={n} d={d}: {lg} vs {e}");
                }
                let identity = int(60) * (int(2) * rat(d).unwrap() * &v.f1 + &v.f2);
                assert_eq!(identity, v.area);
            }
        }
    }

    #[test]
    fn huge_ball_counts_stay_finite_in_log_log() {
        let b = bound_calculator(&params(200, 1.0)).unwrap();
        assert!(b.f1_log2.is_infinite());
        assert!(b.f1_log2_log2.is_finite() && b.f1_log2_log2 > 1000.0);
        assert!(b.exact.is_none());
        assert!(bound_holds(&b, 1.0, 1e300));
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = params(1, 1.0);
        p.d = 0.0;
        assert!(matches!(bound_calculator(&p), Err(Error::InvalidParams(_))));
        let mut p = params(1, 1.0);
        p.h1 = 0;
        assert!(bound_calculator(&p).is_err());
    }

    #[test]
    fn printed_neck_constant() {
        assert!((BoundParams::b_of_epsilon(0.0) - 20.0 / 3.0).abs() < 1e-15);
        assert!(BoundParams::b_of_epsilon(1e-3) > 20.0 / 3.0);
    }
}
