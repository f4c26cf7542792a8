//! Building blocks: an edge-length complex builder, the lens 2-complex, and
//! lens blocks stacked in levels.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use crate::chain::Simplex;
use crate::chart::Point;
use crate::complex::{heron, WeightedComplex};
use crate::error::{Error, Result};
use crate::nerve::{Ball, Covering, SkeletonMetric};

/// Complex assembled from edge lengths; triangle areas come from Heron's
/// formula unless given explicitly.
#[derive(Default)]
pub(crate) struct Builder {
    next: usize,
    pub lengths: BTreeMap<(usize, usize), f64>,
    pub tris: BTreeMap<[usize; 3], Option<f64>>,
    pub pos: BTreeMap<usize, Point<f64>>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

impl Builder {
    pub fn vertex(&mut self, pos: Point<f64>) -> usize {
        let v = self.next;
        self.next += 1;
        self.pos.insert(v, pos);
        v
    }

    pub fn edge(&mut self, u: usize, v: usize, len: f64) {
        debug_assert!(u != v && len > 0.0);
        self.lengths.entry(key(u, v)).or_insert(len);
    }

    pub fn len(&self, u: usize, v: usize) -> f64 {
        self.lengths[&key(u, v)]
    }

    pub fn tri(&mut self, a: usize, b: usize, c: usize) {
        let mut t = [a, b, c];
        t.sort_unstable();
        self.tris.entry(t).or_insert(None);
    }

    pub fn tri_with_area(&mut self, a: usize, b: usize, c: usize, area: f64) {
        let mut t = [a, b, c];
        t.sort_unstable();
        self.tris.insert(t, Some(area));
    }

    pub fn build(&self) -> Result<WeightedComplex<f64>> {
        let mut entries = Vec::new();
        for (&(u, v), &l) in &self.lengths {
            entries.push((Simplex::new(vec![u, v])?, Some(l)));
        }
        for (t, area) in &self.tris {
            let [a, b, c] = *t;
            let area = match area {
                Some(x) => *x,
                None => heron(self.len(a, b), self.len(b, c), self.len(a, c)),
            };
            if !(area > 0.0) {
                return Err(Error::Consistency(format!("degenerate triangle {t:?}")));
            }
            entries.push((Simplex::new(t.to_vec())?, Some(area)));
        }
        WeightedComplex::from_simplices(entries, |s| if s.dim() == 0 { Some(1.0) } else { None })
    }
}

/// The 2-complex `K` with `H₁ = ℤ_p`: a triangulated torus grid of period
/// `pm` modulo the translation `(m, qm)`, with cone disks on the `m` row loops
/// and the `m` column loops.
#[derive(Clone, Debug)]
pub struct LensComplex {
    pub p: u64,
    pub q: u64,
    pub m: usize,
    pub n_vertices: usize,
    /// `(u, v, length)` with `u < v` at unit spacing.
    pub edges: Vec<(usize, usize, f64)>,
    pub tris: Vec<[usize; 3]>,
    /// A closed walk representing a generator of `H₁`.
    pub generator: Vec<usize>,
    pub pos: Vec<[f64; 3]>,
}

impl LensComplex {
    pub fn new(p: u64, q: u64, m: usize) -> Result<Self> {
        if p < 2 || q == 0 || num_integer::gcd(p, q) != 1 || m < 3 {
            return Err(Error::InvalidParams(format!("lens parameters p={p}, q={q}, m={m}")));
        }
        let period = p as i64 * m as i64;
        let (mi, qi) = (m as i64, q as i64);
        let canon = |i: i64, j: i64| -> usize {
            let k = i.div_euclid(mi);
            let (i, j) = (i - k * mi, (j - k * qi * mi).rem_euclid(period));
            (i * period + j) as usize
        };
        let nt = m * period as usize;
        let row_apex = |j0: usize| nt + j0;
        let col_apex = |i0: usize| nt + m + i0;
        let rho = period as f64 / (2.0 * PI);
        let mut lengths: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut tris = BTreeSet::new();
        let add_tri = |t: [usize; 3], tris: &mut BTreeSet<[usize; 3]>| {
            let mut t = t;
            t.sort_unstable();
            tris.insert(t);
        };
        for i in 0..mi {
            for j in 0..period {
                let (a, b, c, d) = (canon(i, j), canon(i + 1, j), canon(i + 1, j + 1), canon(i, j + 1));
                lengths.insert(key(a, b), 1.0);
                lengths.insert(key(a, d), 1.0);
                lengths.insert(key(a, c), 2f64.sqrt());
                add_tri([a, b, c], &mut tris);
                add_tri([a, d, c], &mut tris);
            }
        }
        for j0 in 0..mi {
            let apex = row_apex(j0 as usize);
            for i in 0..period {
                let (a, b) = (canon(i, j0), canon(i + 1, j0));
                lengths.insert(key(apex, a), rho);
                add_tri([apex, a, b], &mut tris);
            }
        }
        for i0 in 0..mi {
            let apex = col_apex(i0 as usize);
            for j in 0..period {
                let (a, b) = (canon(i0, j), canon(i0, j + 1));
                lengths.insert(key(apex, a), rho);
                add_tri([apex, a, b], &mut tris);
            }
        }
        let mut generator: Vec<usize> = (0..=mi).map(|k| canon(k, k)).collect();
        for k in 1..=(qi - 1) * mi {
            generator.push(canon(mi, mi + k));
        }
        let n_vertices = nt + 2 * m;
        let mut pos = vec![[0.0; 3]; n_vertices];
        for i in 0..mi {
            for j in 0..period {
                let (t1, t2) = (2.0 * PI * i as f64 / period as f64, 2.0 * PI * j as f64 / period as f64);
                pos[canon(i, j)] = [rho * t1.cos(), rho * t1.sin(), rho * t2];
            }
        }
        for k in 0..m {
            pos[row_apex(k)] = [0.0, 0.0, k as f64];
            pos[col_apex(k)] = [0.0, 0.0, -(k as f64) - 1.0];
        }
        Ok(LensComplex {
            p,
            q,
            m,
            n_vertices,
            edges: lengths.into_iter().map(|((u, v), l)| (u, v, l)).collect(),
            tris: tris.into_iter().collect(),
            generator,
            pos,
        })
    }

    /// Diameter of the 1-skeleton at unit spacing.
    pub fn diameter(&self) -> f64 {
        let mut b = Builder::default();
        for _ in 0..self.n_vertices {
            b.vertex([0.0; 4]);
        }
        for &(u, v, l) in &self.edges {
            b.edge(u, v, l);
        }
        let c = b.build().expect("graph");
        let m = SkeletonMetric::new(&c);
        let all: BTreeSet<usize> = (0..self.n_vertices).collect();
        m.diameter_of(&all).expect("connected")
    }

    pub fn max_edge(&self) -> f64 {
        self.edges.iter().map(|e| e.2).fold(0.0, f64::max)
    }
}

/// A stack of copies of `K`: its 1-skeleton on every level, joined by
/// triangulated strips, and its 2-cells on the `core` level only. Level `ℓ`
/// is scaled by `scales[ℓ]`; `heights[ℓ]` separates levels `ℓ` and `ℓ+1`.
pub(crate) struct LensBlock {
    pub ids: Vec<Vec<usize>>,
    pub generator: Vec<usize>,
}

impl LensBlock {
    pub fn level(&self, l: usize) -> BTreeSet<usize> {
        self.ids[l].iter().copied().collect()
    }

    pub fn levels(&self, range: std::ops::RangeInclusive<usize>) -> BTreeSet<usize> {
        range.flat_map(|l| self.ids[l].iter().copied()).collect()
    }

    /// The generator walk on level `l`.
    pub fn generator_at(&self, l: usize) -> Vec<usize> {
        self.generator.iter().map(|&v| self.ids[l][v]).collect()
    }
}

/// Smallest gap keeping every strip triangle nondegenerate.
pub(crate) fn min_gap(k: &LensComplex, spacing: f64, a: f64, b: f64) -> f64 {
    0.6 * (a - b).abs() * spacing * k.max_edge()
}

pub(crate) fn lens_block(
    bld: &mut Builder,
    k: &LensComplex,
    spacing: f64,
    scales: &[f64],
    heights: &[f64],
    core: usize,
    offset: Point<f64>,
) -> LensBlock {
    assert_eq!(heights.len() + 1, scales.len());
    let mut ids = Vec::with_capacity(scales.len());
    let mut z = 0.0;
    for (l, &lam) in scales.iter().enumerate() {
        if l > 0 {
            z += heights[l - 1];
        }
        let level: Vec<usize> = (0..k.n_vertices)
            .map(|v| {
                let p = k.pos[v];
                bld.vertex([
                    offset[0] + lam * spacing * p[0],
                    offset[1] + lam * spacing * p[1],
                    offset[2] + lam * spacing * p[2],
                    offset[3] + z,
                ])
            })
            .collect();
        for &(u, v, len) in &k.edges {
            bld.edge(level[u], level[v], lam * spacing * len);
        }
        ids.push(level);
    }
    for l in 0..heights.len() {
        let (lo, hi, h) = (&ids[l], &ids[l + 1], heights[l]);
        let prod = scales[l] * scales[l + 1] * spacing * spacing;
        for v in 0..k.n_vertices {
            bld.edge(lo[v], hi[v], h);
        }
        for &(u, v, len) in &k.edges {
            bld.edge(lo[u], hi[v], (h * h + prod * len * len).sqrt());
            bld.tri(lo[u], lo[v], hi[v]);
            bld.tri(lo[u], hi[u], hi[v]);
        }
    }
    for t in &k.tris {
        let c = &ids[core];
        bld.tri(c[t[0]], c[t[1]], c[t[2]]);
    }
    LensBlock { ids, generator: k.generator.clone() }
}

/// Cone from a new apex over a closed walk; apex edges have length `r`.
pub(crate) fn cap(bld: &mut Builder, walk: &[usize], r: f64, pos: Point<f64>) -> usize {
    let apex = bld.vertex(pos);
    for w in walk.windows(2) {
        bld.edge(apex, w[0], r);
        bld.tri(apex, w[0], w[1]);
    }
    apex
}

/// Balls of radius `r` centered at edge endpoints until every edge of the
/// body lies in some ball.
pub(crate) fn greedy_covering(
    complex: &WeightedComplex<f64>,
    metric: &SkeletonMetric<f64>,
    body: &BTreeSet<usize>,
    r: f64,
    region: &str,
) -> Result<Covering<f64>> {
    let mut balls: Vec<Ball<f64>> = Vec::new();
    for e in complex.simplices(1) {
        let (u, v) = (e.vertices()[0], e.vertices()[1]);
        if !(body.contains(&u) && body.contains(&v)) {
            continue;
        }
        if balls.iter().any(|b| b.members.contains(&u) && b.members.contains(&v)) {
            continue;
        }
        let members = metric.ball(u, r)?;
        if !members.contains(&v) {
            return Err(Error::InvalidParams(format!("edge {u}-{v} is longer than the ball radius {r}")));
        }
        balls.push(Ball { center: u, radius: r, region: region.to_string(), members });
    }
    for &v in body {
        if !balls.iter().any(|b| b.members.contains(&v)) {
            balls.push(Ball { center: v, radius: r, region: region.to_string(), members: metric.ball(v, r)? });
        }
    }
    Ok(Covering { balls })
}

/// Largest edge with both endpoints in `set`.
pub(crate) fn max_edge_within(complex: &WeightedComplex<f64>, set: &BTreeSet<usize>) -> f64 {
    complex
        .simplices(1)
        .iter()
        .zip(complex.volumes(1))
        .filter(|(e, _)| e.vertices().iter().all(|v| set.contains(v)))
        .map(|(_, l)| *l)
        .fold(0.0, f64::max)
}
