//! Deterministic corpus generators.
//!
//! Every generator is a pure function of its parameters. The bubble
//! instances stack copies of the lens 2-complex `K` (see [`LensComplex`]):
//! the child body and the neck carry `K`, and the parent caps the generator
//! of `H₁(K) = ℤ_p` with a cone at the larger scale, so the whole complex has
//! `H₁ = 0` while a loop at the neck bounds only through the parent.

mod build;
pub mod dir;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::chart::{HarmonicChart, MetricSample, Point};
use crate::complex::WeightedComplex;
use crate::error::{Error, Result};
use crate::nerve::SkeletonMetric;
use crate::pipeline::{BubbleTree, Instance, Region};
use crate::pipeline::tree::{Incidence, TreeEdge};

pub use build::LensComplex;
use build::{cap, greedy_covering, lens_block, max_edge_within, min_gap, Builder, LensBlock};

/// Harmonic bound used by every generated instance.
pub const CORPUS_EPSILON: f64 = 1e-3;

/// A generated instance with its provenance.
#[derive(Clone, Debug)]
pub struct CorpusInstance {
    pub generator: String,
    /// Seed of the chart metric perturbation.
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    pub instance: Instance<f64>,
    /// A closed walk generating `H₁` of the neck, when there is one.
    pub neck_generator: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub generator: String,
    pub params: BTreeMap<String, f64>,
}

impl CorpusInstance {
    pub fn name(&self) -> String {
        let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}{v}")).collect();
        format!("{}_{}", self.generator, p.join("_"))
    }

    pub fn neck_generator_chain(&self) -> Option<Chain> {
        self.neck_generator.as_ref().map(|w| Chain::from_walk(w).expect("walk on complex edges"))
    }
}

fn params(list: &[(&str, f64)]) -> BTreeMap<String, f64> {
    list.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Metric samples per chart.
pub const CHART_SAMPLES: usize = 32;

impl CorpusInstance {
    /// Replaces every chart's metric samples by a smooth perturbation of
    /// amplitude `ε/2` drawn from `seed`. Coordinates are left alone.
    pub fn perturb_charts(&mut self, seed: u64) {
        self.seed = seed;
        for (i, ch) in self.instance.charts.values_mut().enumerate() {
            let p = gen_perturbed_chart(self.instance.epsilon / 2.0, ch.radius, CHART_SAMPLES, seed.wrapping_add(i as u64));
            ch.metric_samples = p.metric_samples;
        }
    }
}

fn flat_charts(
    bld: &Builder,
    tree: &BubbleTree,
    coverings: &BTreeMap<String, crate::nerve::Covering<f64>>,
) -> BTreeMap<String, HarmonicChart<f64>> {
    let mut out = BTreeMap::new();
    for b in tree.bodies() {
        let anchor = coverings[&b.id].balls[0].center;
        let o = bld.pos[&anchor];
        let r_h = b.r_h.unwrap();
        let coords: BTreeMap<usize, Point<f64>> = bld
            .pos
            .iter()
            .map(|(v, p)| (*v, [p[0] - o[0], p[1] - o[1], p[2] - o[2], p[3] - o[3]]))
            .filter(|(_, x)| crate::chart::norm(x) <= r_h)
            .collect();
        out.insert(b.id.clone(), HarmonicChart::flat(anchor, r_h, coords));
    }
    out
}

struct Assembly {
    bld: Builder,
    regions: Vec<Region>,
    edges: Vec<TreeEdge>,
    incidence: Vec<Incidence>,
    /// Ball radius per body.
    radii: BTreeMap<String, f64>,
}

impl Assembly {
    fn new(bld: Builder) -> Self {
        Assembly { bld, regions: Vec::new(), edges: Vec::new(), incidence: Vec::new(), radii: BTreeMap::new() }
    }

    fn body(&mut self, id: &str, vertices: BTreeSet<usize>, ball_radius: f64) {
        self.regions.push(Region::body(id, vertices, 20.0 * ball_radius));
        self.radii.insert(id.to_string(), ball_radius);
    }

    fn link(&mut self, parent: &str, child: &str, neck: Region) {
        self.edges.push(TreeEdge { parent: parent.into(), child: child.into() });
        for b in [parent, child] {
            self.incidence.push(Incidence { neck: neck.id.clone(), body: b.into() });
        }
        self.regions.push(neck);
    }

    fn finish(mut self, generator: &str, p: BTreeMap<String, f64>, neck_generator: Option<Vec<usize>>) -> Result<CorpusInstance> {
        let complex = self.bld.build()?;
        let metric = SkeletonMetric::new(&complex);
        let mut coverings = BTreeMap::new();
        for r in self.regions.iter_mut() {
            if let Some(&radius) = self.radii.get(&r.id) {
                coverings.insert(r.id.clone(), greedy_covering(&complex, &metric, &r.vertices, radius, &r.id)?);
                r.covering = Some(format!("coverings/{}.json", r.id));
                r.chart = Some(format!("charts/{}.json", r.id));
            }
        }
        let tree = BubbleTree { regions: self.regions, edges: self.edges, incidence: self.incidence };
        let charts = flat_charts(&self.bld, &tree, &coverings);
        let instance = Instance { complex, tree, coverings, charts, epsilon: CORPUS_EPSILON };
        instance.validate()?;
        let mut ci = CorpusInstance { generator: generator.to_string(), seed: 0, params: p, instance, neck_generator };
        if generator != "flat_ball" {
            ci.perturb_charts(0);
        }
        Ok(ci)
    }
}

/// Ball radius for a body: a margin above its longest edge.
fn body_radius(c: &WeightedComplex<f64>, set: &BTreeSet<usize>) -> f64 {
    1.25 * max_edge_within(c, set)
}

/// Boundary of a tetrahedron with edge length `scale` and face areas `scale²`.
pub fn gen_tetra_boundary(scale: f64) -> Result<CorpusInstance> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParams(format!("scale {scale}")));
    }
    let mut bld = Builder::default();
    let corners = [[1.0, 1.0, 1.0, 0.0], [1.0, -1.0, -1.0, 0.0], [-1.0, 1.0, -1.0, 0.0], [-1.0, -1.0, 1.0, 0.0]];
    let v: Vec<usize> =
        corners.iter().map(|c| bld.vertex(c.map(|x| x * scale / 8f64.sqrt()))).collect();
    for i in 0..4 {
        for j in i + 1..4 {
            bld.edge(v[i], v[j], scale);
        }
    }
    for t in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        bld.tri_with_area(v[t[0]], v[t[1]], v[t[2]], scale * scale);
    }
    let mut a = Assembly::new(bld);
    a.body("B-1-1", v.iter().copied().collect(), 4.0 * scale);
    a.finish("tetra_boundary", params(&[("scale", scale)]), None)
}

/// Kuhn triangulation of the grid `{0..n−1}⁴` with spacing `r_h/(50(n−1))`,
/// 2-skeleton only, exact flat lengths and areas; one body covered by a
/// single ball, with identity chart.
pub fn gen_flat_ball(resolution: usize, r_h: f64) -> Result<CorpusInstance> {
    if !(2..=4).contains(&resolution) || !(r_h > 0.0) {
        return Err(Error::InvalidParams(format!("resolution {resolution}, r_h {r_h}")));
    }
    let n = resolution;
    let s = r_h / (50.0 * (n - 1) as f64);
    let mut bld = Builder::default();
    let idx = |x: [usize; 4]| ((x[0] * n + x[1]) * n + x[2]) * n + x[3];
    let mut pts = Vec::new();
    for i in 0..n.pow(4) {
        let x = [i / n.pow(3), (i / n.pow(2)) % n, (i / n) % n, i % n];
        let c = bld.vertex(x.map(|a| a as f64 * s));
        debug_assert_eq!(c, idx(x));
        pts.push(x);
    }
    let len = |a: [usize; 4], b: [usize; 4]| {
        s * (0..4).map(|k| (a[k] as f64 - b[k] as f64).powi(2)).sum::<f64>().sqrt()
    };
    // simplices of the Kuhn triangulation are chains u < v < w whose total
    // difference is a 0/1 vector
    let add = |x: [usize; 4], mask: usize| -> Option<[usize; 4]> {
        let mut y = x;
        for k in 0..4 {
            if mask >> k & 1 == 1 {
                y[k] += 1;
                if y[k] >= n {
                    return None;
                }
            }
        }
        Some(y)
    };
    for &u in &pts {
        for m1 in 1..16usize {
            let Some(v) = add(u, m1) else { continue };
            bld.edge(idx(u), idx(v), len(u, v));
            for m2 in 1..16usize {
                if m1 & m2 != 0 {
                    continue;
                }
                let Some(w) = add(v, m2) else { continue };
                bld.edge(idx(u), idx(w), len(u, w));
                bld.edge(idx(v), idx(w), len(v, w));
                bld.tri(idx(u), idx(v), idx(w));
            }
        }
    }
    let all: BTreeSet<usize> = (0..n.pow(4)).collect();
    let mut a = Assembly::new(bld);
    a.body("B-1-1", all, r_h / 20.0);
    a.finish("flat_ball", params(&[("resolution", n as f64), ("r_h", r_h)]), None)
}

/// Gap between levels so that `thick ≥ diam(K)/4` over `gaps` gaps.
fn neck_gap(k: &LensComplex, spacing: f64, gaps: usize) -> f64 {
    (k.diameter() * spacing / (4.0 * gaps as f64)).max(0.5 * spacing)
}

/// `L(p,q) × [0, layers]` built from `K`, plus a collar level below it:
/// levels `0..=layers+1`, 2-cells on a middle level, `H₁ = ℤ_p`. The neck and
/// the parent body are levels `1..=layers+1`; the child adds the collar.
pub fn gen_lens_neck(p: u64, q: u64, layers: usize) -> Result<CorpusInstance> {
    if layers < 1 {
        return Err(Error::InvalidParams("a lens neck needs at least one layer".into()));
    }
    let k = LensComplex::new(p, q, 3)?;
    let top = layers + 1;
    let h = neck_gap(&k, 1.0, layers);
    let mut bld = Builder::default();
    let blk = lens_block(&mut bld, &k, 1.0, &vec![1.0; top + 1], &vec![h; top], (top + 1) / 2, [0.0; 4]);
    let complex = bld.build()?;
    let child = blk.levels(0..=top);
    let neck = blk.levels(1..=top);
    let rc = body_radius(&complex, &child);
    let mut a = Assembly::new(bld);
    a.body("B-1-1", neck.clone(), 1.5 * rc);
    a.body("B-2-1", child, rc);
    let nk = Region::neck("N-2-1", neck, blk.level(1), blk.level(top), p);
    a.link("B-1-1", "B-2-1", nk);
    let g = blk.generator_at(1);
    a.finish("lens_neck", params(&[("p", p as f64), ("q", q as f64), ("layers", layers as f64)]), Some(g))
}

/// A lens block with a capped top: levels 0..=3, 2-cells on level 2, the
/// neck is levels 1..=3. Returns the block.
fn capped_block(bld: &mut Builder, k: &LensComplex, spacing: f64, scales: &[f64; 4], gap: f64, offset: Point<f64>) -> LensBlock {
    lens_block(bld, k, spacing, scales, &[gap; 3], 2, offset)
}

/// Child body at scale 1, lens neck `L(p,1)`, parent at scale `ratio` that
/// caps the neck generator.
pub fn gen_two_scale_bubble(ratio: f64, p: u64) -> Result<CorpusInstance> {
    if !(ratio >= 4.0 && ratio.is_finite()) {
        return Err(Error::InvalidParams(format!("scale ratio {ratio} must be at least 4")));
    }
    let k = LensComplex::new(p, 1, 3)?;
    let gap = neck_gap(&k, 1.0, 2);
    let mut bld = Builder::default();
    let blk = capped_block(&mut bld, &k, 1.0, &[1.0; 4], gap, [0.0; 4]);
    let child = blk.levels(0..=3);
    let neck = blk.levels(1..=3);
    let rc = {
        let c = bld.build()?;
        body_radius(&c, &child)
    };
    let r_parent = ratio * rc;
    let apex = cap(&mut bld, &blk.generator_at(3), 0.8 * r_parent, [0.0, 0.0, 0.0, 3.0 * gap + 0.8 * r_parent]);
    let mut parent = neck.clone();
    parent.insert(apex);
    let mut a = Assembly::new(bld);
    a.body("B-1-1", parent, r_parent);
    a.body("B-2-1", child, rc);
    a.link("B-1-1", "B-2-1", Region::neck("N-2-1", neck, blk.level(1), blk.level(3), p));
    let g = blk.generator_at(1);
    a.finish("two_scale_bubble", params(&[("ratio", ratio), ("p", p as f64)]), Some(g))
}

/// Apex distance of the cap in the thin-neck family, in units of the
/// child's spacing.
pub const EH_CAP_RADIUS: f64 = 40.0;
/// Smallest shrink the thin-neck family is laid out for; the geometry away
/// from the thin level does not depend on `shrink`.
pub const EH_MIN_SHRINK: f64 = 0.01;

/// `L(2,1)` neck whose level 1 is scaled by `shrink`: the neck generator
/// there has 1-mass `3√2·shrink` while the cap stays at distance
/// [`EH_CAP_RADIUS`].
pub fn gen_eh_thin_neck(shrink: f64) -> Result<CorpusInstance> {
    if !(EH_MIN_SHRINK..=1.0).contains(&shrink) {
        return Err(Error::InvalidParams(format!("shrink {shrink} outside [{EH_MIN_SHRINK}, 1]")));
    }
    let k = LensComplex::new(2, 1, 3)?;
    let gap = neck_gap(&k, 1.0, 2).max(min_gap(&k, 1.0, 1.0, EH_MIN_SHRINK));
    let mut bld = Builder::default();
    let blk = capped_block(&mut bld, &k, 1.0, &[1.0, shrink, 1.0, 1.0], gap, [0.0; 4]);
    let child = blk.levels(0..=3);
    let neck = blk.levels(1..=3);
    let rc = {
        let c = bld.build()?;
        body_radius(&c, &child)
    };
    let apex = cap(&mut bld, &blk.generator_at(3), EH_CAP_RADIUS, [0.0, 0.0, 0.0, 3.0 * gap + EH_CAP_RADIUS]);
    let mut parent = neck.clone();
    parent.insert(apex);
    let mut a = Assembly::new(bld);
    a.body("B-1-1", parent, 1.25 * EH_CAP_RADIUS);
    a.body("B-2-1", child, rc);
    a.link("B-1-1", "B-2-1", Region::neck("N-2-1", neck, blk.level(1), blk.level(3), 2));
    let g = blk.generator_at(1);
    a.finish("eh_thin_neck", params(&[("shrink", shrink)]), Some(g))
}

/// One parent capping `children` separate lens blocks through a shared apex.
pub fn gen_multi_bubble(p: u64, children: usize) -> Result<CorpusInstance> {
    if !(1..=4).contains(&children) {
        return Err(Error::InvalidParams(format!("{children} children")));
    }
    let k = LensComplex::new(p, 1, 3)?;
    let gap = neck_gap(&k, 1.0, 2);
    let mut bld = Builder::default();
    let blocks: Vec<LensBlock> = (0..children)
        .map(|i| capped_block(&mut bld, &k, 1.0, &[1.0; 4], gap, [40.0 * i as f64, 0.0, 0.0, 0.0]))
        .collect();
    let rc = {
        let c = bld.build()?;
        blocks.iter().map(|b| body_radius(&c, &b.levels(0..=3))).fold(0.0, f64::max)
    };
    let r_parent = 4.0 * rc;
    let apex = bld.vertex([0.0, 0.0, 0.0, 3.0 * gap + 0.8 * r_parent]);
    for b in &blocks {
        let g = b.generator_at(3);
        for w in g.windows(2) {
            bld.edge(apex, w[0], 0.8 * r_parent);
            bld.tri(apex, w[0], w[1]);
        }
    }
    let mut a = Assembly::new(bld);
    let mut parent: BTreeSet<usize> = BTreeSet::from([apex]);
    for b in &blocks {
        parent.extend(b.levels(1..=3));
    }
    a.body("B-1-1", parent, r_parent);
    for (i, b) in blocks.iter().enumerate() {
        let id = format!("B-2-{}", i + 1);
        a.body(&id, b.levels(0..=3), rc);
        a.link("B-1-1", &id, Region::neck(&format!("N-2-{}", i + 1), b.levels(1..=3), b.level(1), b.level(3), p));
    }
    let g = blocks[0].generator_at(1);
    a.finish("multi_bubble", params(&[("p", p as f64), ("children", children as f64)]), Some(g))
}

/// Three levels of scale: a leaf block, a middle body that caps it and
/// carries a second block at spacing `ratio`, and a root capping that one.
pub fn gen_deep_bubble(ratio: f64, p: u64) -> Result<CorpusInstance> {
    if !(ratio >= 2.0 && ratio.is_finite()) {
        return Err(Error::InvalidParams(format!("scale ratio {ratio} must be at least 2")));
    }
    let k = LensComplex::new(p, 1, 3)?;
    let mut bld = Builder::default();
    let gap1 = neck_gap(&k, 1.0, 2);
    let leaf = capped_block(&mut bld, &k, 1.0, &[1.0; 4], gap1, [0.0; 4]);
    let gap2 = neck_gap(&k, ratio, 2);
    let mid = capped_block(&mut bld, &k, ratio, &[1.0; 4], gap2, [0.0, 0.0, 0.0, 10.0 * gap1 + 20.0 * ratio]);
    let c0 = bld.build()?;
    let r_leaf = body_radius(&c0, &leaf.levels(0..=3));
    let r_block2 = body_radius(&c0, &mid.levels(0..=3));
    let r_mid = r_block2.max(1.5 * r_leaf);
    let a1 = cap(&mut bld, &leaf.generator_at(3), 0.8 * r_mid, [0.0, 0.0, 0.0, 3.0 * gap1 + r_mid]);
    bld.edge(a1, mid.ids[0][0], 0.8 * r_mid);
    let r_root = ratio * r_mid;
    let a2 = cap(&mut bld, &mid.generator_at(3), 0.8 * r_root, [0.0, 0.0, 0.0, 1e3 * ratio]);
    let mut a = Assembly::new(bld);
    let mut root = mid.levels(1..=3);
    root.insert(a2);
    let mut midv = leaf.levels(1..=3);
    midv.extend(mid.levels(0..=3));
    midv.insert(a1);
    a.body("B-1-1", root, r_root);
    a.body("B-2-1", midv, r_mid);
    a.body("B-3-1", leaf.levels(0..=3), r_leaf);
    a.link("B-1-1", "B-2-1", Region::neck("N-2-1", mid.levels(1..=3), mid.level(1), mid.level(3), p));
    a.link("B-2-1", "B-3-1", Region::neck("N-3-1", leaf.levels(1..=3), leaf.level(1), leaf.level(3), p));
    let g = leaf.generator_at(1);
    a.finish("deep_bubble", params(&[("ratio", ratio), ("p", p as f64)]), Some(g))
}

/// Dispatch by generator name. `seed` drives the chart perturbation; the
/// flat ball keeps its exact identity chart.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<CorpusInstance> {
    let mut ci = generate_unseeded(spec)?;
    if ci.generator != "flat_ball" {
        ci.perturb_charts(seed);
    }
    Ok(ci)
}

fn generate_unseeded(spec: &GeneratorSpec) -> Result<CorpusInstance> {
    let get = |k: &str| {
        spec.params.get(k).copied().ok_or_else(|| Error::InvalidParams(format!("missing parameter {k}")))
    };
    let int = |k: &str| -> Result<u64> {
        let x = get(k)?;
        if x >= 0.0 && x.fract() == 0.0 {
            Ok(x as u64)
        } else {
            Err(Error::InvalidParams(format!("{k} must be a nonnegative integer")))
        }
    };
    match spec.generator.as_str() {
        "tetra_boundary" => gen_tetra_boundary(get("scale")?),
        "flat_ball" => gen_flat_ball(int("resolution")? as usize, get("r_h")?),
        "lens_neck" => gen_lens_neck(int("p")?, int("q")?, int("layers")? as usize),
        "two_scale_bubble" => gen_two_scale_bubble(get("ratio")?, int("p")?),
        "eh_thin_neck" => gen_eh_thin_neck(get("shrink")?),
        "multi_bubble" => gen_multi_bubble(int("p")?, int("children")? as usize),
        "deep_bubble" => gen_deep_bubble(get("ratio")?, int("p")?),
        g => Err(Error::InvalidParams(format!("unknown generator {g}"))),
    }
}

/// The reference corpus: every generator with `H₁ = 0` at three settings.
pub fn standard_corpus() -> Vec<GeneratorSpec> {
    let s = |g: &str, p: &[(&str, f64)]| GeneratorSpec { generator: g.to_string(), params: params(p) };
    vec![
        s("tetra_boundary", &[("scale", 0.5)]),
        s("tetra_boundary", &[("scale", 1.0)]),
        s("tetra_boundary", &[("scale", 2.0)]),
        s("flat_ball", &[("resolution", 2.0), ("r_h", 1.0)]),
        s("flat_ball", &[("resolution", 2.0), ("r_h", 4.0)]),
        s("flat_ball", &[("resolution", 3.0), ("r_h", 1.0)]),
        s("two_scale_bubble", &[("ratio", 4.0), ("p", 2.0)]),
        s("two_scale_bubble", &[("ratio", 8.0), ("p", 3.0)]),
        s("two_scale_bubble", &[("ratio", 16.0), ("p", 5.0)]),
        s("eh_thin_neck", &[("shrink", 1.0)]),
        s("eh_thin_neck", &[("shrink", 0.1)]),
        s("eh_thin_neck", &[("shrink", 0.01)]),
        s("multi_bubble", &[("p", 2.0), ("children", 2.0)]),
        s("multi_bubble", &[("p", 3.0), ("children", 2.0)]),
        s("multi_bubble", &[("p", 2.0), ("children", 3.0)]),
        s("deep_bubble", &[("ratio", 2.0), ("p", 2.0)]),
        s("deep_bubble", &[("ratio", 3.0), ("p", 3.0)]),
        s("deep_bubble", &[("ratio", 4.0), ("p", 2.0)]),
    ]
}

/// A chart of radius `r` whose metric is `δ + a·cos(π⟨x,u⟩/(4r))·S` at
/// `samples` random points of the half ball, `‖S‖ = 1`.
pub fn gen_perturbed_chart(amplitude: f64, r: f64, samples: usize, seed: u64) -> HarmonicChart<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = [0.0; 4];
    for x in &mut u {
        *x = rng.gen_range(-1.0..1.0);
    }
    let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    u.iter_mut().for_each(|x| *x /= un);
    // S = diag(1, −1, 0.5, 0) in a random orthonormal frame is overkill; a
    // symmetric matrix with operator norm 1 suffices
    let s = [[1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0], [0.0, 0.0, 0.5, 0.0], [0.0, 0.0, 0.0, 0.0]];
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let mut x = [0.0; 4];
        for c in &mut x {
            *c = rng.gen_range(-r..r);
        }
        if x.iter().map(|c| c * c).sum::<f64>().sqrt() > r {
            continue;
        }
        let w = amplitude * (std::f64::consts::PI * (0..4).map(|i| x[i] * u[i]).sum::<f64>() / (4.0 * r)).cos();
        let mut g = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = if i == j { 1.0 } else { 0.0 } + w * s[i][j];
            }
        }
        out.push(MetricSample { at: x, g });
    }
    HarmonicChart { anchor: 0, radius: r, coords: BTreeMap::from([(0, [0.0; 4])]), metric_samples: out }
}
