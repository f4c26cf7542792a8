//! Near-Euclidean chart models: metric validation, distortion-checked
//! lengths and cone fillings to the chart origin.
//!
//! The metric at a point is the nearest stored sample (identity when there
//! are none). Each sample satisfies `‖g − δ‖_op ≤ 10⁻³` once the chart
//! validates, so every length ratio stays inside the certified window
//! regardless of how the samples are laid out.

use std::collections::BTreeMap;

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nerve::SkeletonMetric;
use crate::scalar::Scalar;

/// Bound on `‖g − δ‖_C⁰ + r‖∂g‖_C⁰`.
pub const HARMONIC_BOUND: f64 = 1e-3;
/// `√(1 − 10⁻³)`: lower distortion factor.
pub fn distortion_low() -> f64 {
    (1.0 - HARMONIC_BOUND).sqrt()
}
/// `√(1 + 2·10⁻³)`: upper distortion factor.
pub fn distortion_high() -> f64 {
    (1.0 + 2.0 * HARMONIC_BOUND).sqrt()
}
/// Slack allowed on the distortion checks for quadrature round-off.
pub const QUADRATURE_SLACK: f64 = 1e-6;

pub type Point<T> = [T; 4];

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSample<T> {
    pub at: Point<T>,
    pub g: [[T; 4]; 4],
}

/// Chart ball of radius `r_h` around `anchor`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicChart<T> {
    pub anchor: usize,
    pub radius: T,
    pub coords: BTreeMap<usize, Point<T>>,
    pub metric_samples: Vec<MetricSample<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartPolyline<T> {
    pub points: Vec<Point<T>>,
    pub closed: bool,
}

/// Outcome of [`validate_chart`].
#[derive(Clone, Debug, PartialEq)]
pub struct ChartValidation {
    pub valid: bool,
    /// Largest `‖g − δ‖ + r‖∂g‖` over samples and where it occurs.
    pub worst_value: f64,
    pub worst_sample: Option<usize>,
    /// Vertices whose coordinates lie outside the open ball.
    pub coords_outside: Vec<usize>,
}

fn mat<T: Scalar>(g: &[[T; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| g[i][j].as_f64())
}

fn vec4<T: Scalar>(p: &Point<T>) -> Vector4<f64> {
    Vector4::new(p[0].as_f64(), p[1].as_f64(), p[2].as_f64(), p[3].as_f64())
}

/// Operator norm of a symmetric matrix (symmetrized first).
fn sym_norm(m: &Matrix4<f64>) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigenvalues().iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn norm<T: Scalar>(p: &Point<T>) -> T {
    p.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

impl<T: Scalar> HarmonicChart<T> {
    /// Exactly flat chart with no samples.
    pub fn flat(anchor: usize, radius: T, coords: BTreeMap<usize, Point<T>>) -> Self {
        HarmonicChart { anchor, radius, coords, metric_samples: Vec::new() }
    }

    /// The metric at `x`: the nearest sample, or the identity.
    pub fn metric_at(&self, x: &Point<T>) -> Matrix4<f64> {
        let xv = vec4(x);
        self.metric_samples
            .iter()
            .map(|s| ((vec4(&s.at) - xv).norm_squared(), s))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, s)| mat(&s.g))
            .unwrap_or_else(Matrix4::identity)
    }
}

/// Checks the C⁰ plus scaled-derivative bound at every sample, with the
/// derivative estimated by finite differences against nearby samples.
pub fn validate_chart<T: Scalar>(ch: &HarmonicChart<T>) -> ChartValidation {
    let r = ch.radius.as_f64();
    let pts: Vec<Vector4<f64>> = ch.metric_samples.iter().map(|s| vec4(&s.at)).collect();
    let gs: Vec<Matrix4<f64>> = ch.metric_samples.iter().map(|s| mat(&s.g)).collect();
    // neighbourhood: within twice the largest nearest-neighbour spacing
    let mut spacing: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        let nn = pts
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| (q - p).norm())
            .fold(f64::INFINITY, f64::min);
        if nn.is_finite() {
            spacing = spacing.max(nn);
        }
    }
    let reach = 2.0 * spacing;
    let mut worst = 0.0f64;
    let mut worst_sample = None;
    for (i, p) in pts.iter().enumerate() {
        let c0 = sym_norm(&(gs[i] - Matrix4::identity()));
        let mut d: f64 = 0.0;
        for (j, q) in pts.iter().enumerate() {
            let h = (q - p).norm();
            if j != i && h > 0.0 && h <= reach {
                d = d.max(sym_norm(&(gs[j] - gs[i])) / h);
            }
        }
        let v = c0 + r * d;
        if worst_sample.is_none() || v > worst {
            worst = v;
            worst_sample = Some(i);
        }
    }
    let coords_outside: Vec<usize> =
        ch.coords.iter().filter(|(_, p)| !(norm(p) < ch.radius)).map(|(v, _)| *v).collect();
    ChartValidation {
        valid: worst <= HARMONIC_BOUND && coords_outside.is_empty(),
        worst_value: worst,
        worst_sample,
        coords_outside,
    }
}

impl<T: Scalar> ChartPolyline<T> {
    fn segments(&self) -> Vec<(Point<T>, Point<T>)> {
        let mut s: Vec<_> = self.points.windows(2).map(|w| (w[0], w[1])).collect();
        if self.closed && self.points.len() > 1 {
            s.push((*self.points.last().unwrap(), self.points[0]));
        }
        s
    }

    fn check(&self, ch: &HarmonicChart<T>) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidPolyline("no points".into()));
        }
        for w in self.points.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidPolyline("repeated consecutive point".into()));
            }
        }
        for p in &self.points {
            if !(norm(p) < ch.radius) {
                return Err(Error::InvalidPolyline(format!("point at norm {} outside the chart ball", norm(p))));
            }
        }
        Ok(())
    }
}

/// Euclidean length and metric length (midpoint rule on pieces of length at
/// most `r_h/64`). Errors if the ratio leaves `[√(1−10⁻³), √(1+2·10⁻³)]`.
pub fn chart_length<T: Scalar>(p: &ChartPolyline<T>, ch: &HarmonicChart<T>) -> Result<(T, T)> {
    p.check(ch)?;
    let h = ch.radius.as_f64() / 64.0;
    let (mut eu, mut me) = (0.0f64, 0.0f64);
    for (a, b) in p.segments() {
        let (va, vb) = (vec4(&a), vec4(&b));
        let d = vb - va;
        let len = d.norm();
        eu += len;
        let pieces = ((len / h).ceil() as usize).max(1);
        let step = d / pieces as f64;
        for k in 0..pieces {
            let mid = va + step * (k as f64 + 0.5);
            let g = ch.metric_at(&[T::lit(mid[0]), T::lit(mid[1]), T::lit(mid[2]), T::lit(mid[3])]);
            me += (step.dot(&(g * step))).max(0.0).sqrt();
        }
    }
    if me > 0.0 {
        let ratio = eu / me;
        if ratio < distortion_low() - QUADRATURE_SLACK || ratio > distortion_high() + QUADRATURE_SLACK {
            return Err(Error::DistortionViolated { ratio });
        }
    }
    Ok((T::lit(eu), T::lit(me)))
}

/// Triangle fan to the chart origin.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeFill<T> {
    pub triangles: Vec<[Point<T>; 3]>,
    pub mass: T,
}

/// Metric area of the flat triangle `(a, b, c)` with the metric frozen at
/// its centroid.
pub fn triangle_area<T: Scalar>(a: &Point<T>, b: &Point<T>, c: &Point<T>, ch: &HarmonicChart<T>) -> T {
    let (va, vb, vc) = (vec4(a), vec4(b), vec4(c));
    let (u, v) = (vb - va, vc - va);
    let cen = (va + vb + vc) / 3.0;
    let g = ch.metric_at(&[T::lit(cen[0]), T::lit(cen[1]), T::lit(cen[2]), T::lit(cen[3])]);
    let gram = Matrix2::new(u.dot(&(g * u)), u.dot(&(g * v)), v.dot(&(g * u)), v.dot(&(g * v)));
    T::lit(0.5 * gram.determinant().max(0.0).sqrt())
}

/// Cones a closed polyline inside the half ball to the origin.
pub fn cone_fill<T: Scalar>(z: &ChartPolyline<T>, ch: &HarmonicChart<T>) -> Result<ConeFill<T>> {
    let limit = ch.radius / T::lit(2.0);
    for p in &z.points {
        let n = norm(p);
        if n > limit {
            return Err(Error::EscapesHalfBall { norm: n.as_f64(), limit: limit.as_f64() });
        }
    }
    let distinct = {
        let mut d = z.points.clone();
        d.dedup();
        if d.len() > 1 && d.first() == d.last() {
            d.pop();
        }
        d
    };
    if distinct.len() < 3 {
        return Ok(ConeFill { triangles: Vec::new(), mass: T::zero() });
    }
    let closed = ChartPolyline { points: distinct, closed: true };
    let o = [T::zero(); 4];
    let mut triangles = Vec::new();
    let mut mass = T::zero();
    for (a, b) in closed.segments() {
        mass += triangle_area(&o, &a, &b, ch);
        triangles.push([o, a, b]);
    }
    Ok(ConeFill { triangles, mass })
}

/// Every vertex within skeleton distance `r_h/2` of the anchor must have
/// coordinates; returns the largest chart norm among those vertices.
pub fn ball_diameter_check<T: Scalar>(ch: &HarmonicChart<T>, metric: &SkeletonMetric<T>) -> Result<T> {
    let inner = metric.ball(ch.anchor, ch.radius / T::lit(2.0))?;
    let mut best = T::zero();
    for v in inner {
        let p = ch.coords.get(&v).ok_or(Error::MissingChartCoords(v))?;
        best = best.max(norm(p));
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSampleJson {
    pub at: [f64; 4],
    pub g: [[f64; 4]; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartJson {
    pub anchor: usize,
    pub radius: f64,
    pub coords: BTreeMap<String, [f64; 4]>,
    #[serde(default)]
    pub metric_samples: Vec<MetricSampleJson>,
}

fn pt_f64<T: Scalar>(p: &Point<T>) -> [f64; 4] {
    p.map(|x| x.as_f64())
}

fn pt_t<T: Scalar>(p: &[f64; 4]) -> Point<T> {
    p.map(T::lit)
}

impl<T: Scalar> From<&HarmonicChart<T>> for ChartJson {
    fn from(c: &HarmonicChart<T>) -> Self {
        ChartJson {
            anchor: c.anchor,
            radius: c.radius.as_f64(),
            coords: c.coords.iter().map(|(v, p)| (v.to_string(), pt_f64(p))).collect(),
            metric_samples: c
                .metric_samples
                .iter()
                .map(|s| MetricSampleJson { at: pt_f64(&s.at), g: s.g.map(|r| r.map(|x| x.as_f64())) })
                .collect(),
        }
    }
}

impl ChartJson {
    pub fn to_chart<T: Scalar>(&self) -> Result<HarmonicChart<T>> {
        let mut coords = BTreeMap::new();
        for (k, p) in &self.coords {
            let v: usize = k.parse().map_err(|_| Error::Parse {
                context: "chart coords".into(),
                message: format!("vertex key {k:?} is not an integer"),
            })?;
            coords.insert(v, pt_t(p));
        }
        Ok(HarmonicChart {
            anchor: self.anchor,
            radius: T::lit(self.radius),
            coords,
            metric_samples: self
                .metric_samples
                .iter()
                .map(|s| MetricSample { at: pt_t(&s.at), g: s.g.map(|r| r.map(T::lit)) })
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scaled(c: f64, at: [f64; 4]) -> MetricSample<f64> {
        let mut g = [[0.0; 4]; 4];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = c;
        }
        MetricSample { at, g }
    }

    #[test]
    fn validation_examples() {
        let flat = HarmonicChart::<f64>::flat(0, 1.0, BTreeMap::new());
        assert!(validate_chart(&flat).valid);
        let mut big = flat.clone();
        big.metric_samples = vec![scaled(1.0 + 2e-3, [0.0; 4]), scaled(1.0 + 2e-3, [0.1, 0.0, 0.0, 0.0])];
        let v = validate_chart(&big);
        assert!(!v.valid);
        assert!((v.worst_value - 2e-3).abs() < 1e-12);
    }

    #[test]
    fn constant_metric_lengths() {
        let mut ch = HarmonicChart::<f64>::flat(0, 4.0, BTreeMap::new());
        let seg = ChartPolyline { points: vec![[0.0; 4], [1.0, 0.0, 0.0, 0.0]], closed: false };
        let (e, m) = chart_length(&seg, &ch).unwrap();
        assert_eq!((e, m), (1.0, 1.0));
        ch.metric_samples = vec![scaled(1.0 - 1e-3, [0.0; 4])];
        let (e, m) = chart_length(&seg, &ch).unwrap();
        assert_eq!(e, 1.0);
        assert!((m - (1.0f64 - 1e-3).sqrt()).abs() < 1e-12);
        ch.metric_samples = vec![scaled(0.5, [0.0; 4])];
        assert!(matches!(chart_length(&seg, &ch), Err(Error::DistortionViolated { .. })));
    }

    #[test]
    fn cone_fill_flat_areas() {
        let ch = HarmonicChart::<f64>::flat(0, 1.0, BTreeMap::new());
        let r = 0.1;
        let sq = ChartPolyline {
            points: vec![[r, r, 0.0, 0.0], [-r, r, 0.0, 0.0], [-r, -r, 0.0, 0.0], [r, -r, 0.0, 0.0]],
            closed: true,
        };
        let f = cone_fill(&sq, &ch).unwrap();
        assert!((f.mass - 4.0 * r * r).abs() < 1e-15);
        assert_eq!(f.triangles.len(), 4);
        let n = 7;
        let ngon = ChartPolyline {
            points: (0..n)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    [r * t.cos(), r * t.sin(), 0.0, 0.0]
                })
                .collect(),
            closed: true,
        };
        let f = cone_fill(&ngon, &ch).unwrap();
        let exact = n as f64 / 2.0 * r * r * (2.0 * std::f64::consts::PI / n as f64).sin();
        assert!((f.mass - exact).abs() < 1e-12);
        let two = ChartPolyline { points: vec![[0.1, 0.0, 0.0, 0.0], [0.0, 0.1, 0.0, 0.0]], closed: true };
        assert_eq!(cone_fill(&two, &ch).unwrap().mass, 0.0);
        let far = ChartPolyline { points: vec![[0.6, 0.0, 0.0, 0.0], [0.0, 0.1, 0.0, 0.0], [0.0; 4]], closed: true };
        assert!(matches!(cone_fill(&far, &ch), Err(Error::EscapesHalfBall { .. })));
    }

    #[test]
    fn json_round_trip() {
        let mut coords = BTreeMap::new();
        coords.insert(3, [0.1, 0.2, 0.0, -0.3]);
        let ch = HarmonicChart { anchor: 3, radius: 2.0, coords, metric_samples: vec![scaled(1.0005, [0.0; 4])] };
        let j = ChartJson::from(&ch);
        let back: ChartJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        assert_eq!(back.to_chart::<f64>().unwrap(), ch);
    }
}
