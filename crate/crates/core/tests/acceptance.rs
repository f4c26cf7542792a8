//! Acceptance run: one pass/fail line per criterion, nonzero exit on failure.
//! `FILLBOUND_THREADS` caps the worker threads of criterion 1.

use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use fillbound::chart::{chart_length, cone_fill, validate_chart, ChartPolyline, HarmonicChart};
use fillbound::corpus::*;
use fillbound::homology::{
    brute_force_filling, h1_trivial, homology_rank_and_torsion, sample_cycles, FillingSolver,
    SearchConfig,
};
use fillbound::pipeline::*;
use fillbound::{Chain, Simplex, WeightedComplex};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn threads() -> usize {
    std::env::var("FILLBOUND_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

struct Run {
    exact: usize,
    bound: usize,
    total: usize,
    instances: usize,
    failures: Vec<String>,
}

/// Criteria 1 and 6 share one run over the corpus.
fn corpus_run() -> Run {
    let specs = standard_corpus();
    let next = Mutex::new(0usize);
    let out = Mutex::new(Run { exact: 0, bound: 0, total: 0, instances: 0, failures: Vec::new() });
    std::thread::scope(|s| {
        for _ in 0..threads().min(specs.len()) {
            s.spawn(|| loop {
                let i = {
                    let mut n = next.lock().unwrap();
                    *n += 1;
                    *n - 1
                };
                let Some(spec) = specs.get(i) else { break };
                let ci = generate(spec, 1000 + i as u64).expect("corpus instance");
                let ctx = FillContext::new(&ci.instance, PipelineConfig::default()).expect("context");
                let cycles = sample_cycles(&ci.instance.complex, 50, 7 + i as u64);
                let (mut exact, mut bound, mut fails) = (0, 0, Vec::new());
                if cycles.len() != 50 {
                    fails.push(format!("{}: only {} cycles sampled", ci.name(), cycles.len()));
                }
                for z in &cycles {
                    match ctx.full_fill(z) {
                        Ok(r) => {
                            if r.filling.boundary().unwrap() == *z {
                                exact += 1;
                            } else {
                                fails.push(format!("{}: boundary mismatch", ci.name()));
                            }
                            let m1 = ci.instance.complex.mass(z);
                            if bound_holds(&r.bounds, m1, r.mass) {
                                bound += 1;
                            } else {
                                fails.push(format!("{}: bound violated (mass {})", ci.name(), r.mass));
                            }
                        }
                        Err(e) => fails.push(format!("{}: {e}", ci.name())),
                    }
                }
                let mut o = out.lock().unwrap();
                o.exact += exact;
                o.bound += bound;
                o.total += cycles.len();
                o.instances += 1;
                o.failures.extend(fails);
            });
        }
    });
    out.into_inner().unwrap()
}

fn criterion_1(run: &Run) -> Outcome {
    let generators: std::collections::BTreeSet<String> =
        standard_corpus().into_iter().map(|s| s.generator).collect();
    let msg = format!(
        "{}/{} fillings exact over {} instances of {} generators",
        run.exact,
        run.total,
        run.instances,
        generators.len()
    );
    if run.exact == run.total && run.total == 50 * run.instances && run.instances >= 18 && generators.len() >= 6 {
        Ok(msg)
    } else {
        Err(format!("{msg}; {:?}", run.failures.iter().take(3).collect::<Vec<_>>()))
    }
}

fn criterion_6(run: &Run) -> Outcome {
    let msg = format!("{}/{} reports within f1·mass1 + f2", run.bound, run.total);
    if run.bound == run.total && run.total > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_small(rng: &mut ChaCha8Rng) -> (WeightedComplex<f64>, Chain) {
    let n = rng.gen_range(4..=7);
    let mut tris = std::collections::BTreeSet::new();
    let want = rng.gen_range(2..=12usize).min(n * (n - 1) * (n - 2) / 6);
    while tris.len() < want {
        let mut v: Vec<usize> = (0..n).collect();
        for i in 0..3 {
            let j = rng.gen_range(i..n);
            v.swap(i, j);
        }
        tris.insert(Simplex::new(v[..3].to_vec()).unwrap());
    }
    // dyadic volumes keep every mass exact in f64
    let entries: Vec<(Simplex, Option<f64>)> =
        tris.iter().map(|t| (t.clone(), Some(rng.gen_range(1..=16) as f64 / 4.0))).collect();
    let c = WeightedComplex::from_simplices(entries, |_| Some(1.0)).unwrap();
    let mut x = Chain::zero(2);
    for t in c.simplices(2) {
        if rng.gen_bool(0.4) {
            x.add_term(t.clone(), rng.gen_range(-2..=2));
        }
    }
    let z = x.boundary().unwrap();
    (c, z)
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut compared, mut skipped) = (0, 0);
    for _ in 0..5000 {
        if compared == 200 {
            break;
        }
        let (c, z) = random_small(&mut rng);
        let solver = FillingSolver::new(&c).map_err(|e| e.to_string())?;
        let r = solver.minimal_mass_filling(&z, &SearchConfig::default()).map_err(|e| e.to_string())?;
        if !r.optimal {
            return Err("search did not complete".into());
        }
        let b = brute_force_filling(&z, &c, 3).map_err(|e| e.to_string())?;
        // instances whose optimum needs a coefficient above 3 are outside
        // the brute-force box and are not counted
        if r.max_abs_coeff > 3 {
            skipped += 1;
            if let Some(b) = b {
                if r.mass > b.mass + 1e-9 {
                    return Err(format!("search {} above brute force {}", r.mass, b.mass));
                }
            }
            continue;
        }
        let b = b.ok_or("brute force found no filling")?;
        if (r.mass - b.mass).abs() > 1e-9 {
            return Err(format!("mass {} vs brute force {}", r.mass, b.mass));
        }
        compared += 1;
    }
    if compared == 200 {
        Ok(format!("200/200 masses equal ({skipped} instances needed coefficients above 3)"))
    } else {
        Err(format!("only {compared} comparable instances"))
    }
}

fn random_point(rng: &mut ChaCha8Rng, r: f64) -> [f64; 4] {
    loop {
        let p: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-r..r));
        if p.iter().map(|x| x * x).sum::<f64>().sqrt() < r {
            return p;
        }
    }
}

fn perturbed_charts() -> Vec<HarmonicChart<f64>> {
    (0..10).map(|s| gen_perturbed_chart(CORPUS_EPSILON / 2.0, 1.0 + s as f64, 48, 300 + s)).collect()
}

fn criterion_3() -> Outcome {
    let charts = perturbed_charts();
    if let Some(i) = charts.iter().position(|c| !validate_chart(c).valid) {
        return Err(format!("chart {i} does not validate"));
    }
    let (lo, hi) = ((1.0f64 - 1e-3).sqrt() - 1e-6, (1.0f64 + 2e-3).sqrt() + 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut min, mut max) = (f64::INFINITY, 0.0f64);
    for i in 0..1000 {
        let ch = &charts[i % charts.len()];
        let k = rng.gen_range(2..=6);
        let points = (0..k).map(|_| random_point(&mut rng, 0.99 * ch.radius)).collect();
        let p = ChartPolyline { points, closed: rng.gen_bool(0.5) };
        let (eu, me) = chart_length(&p, ch).map_err(|e| format!("polyline {i}: {e}"))?;
        let ratio = eu / me;
        min = min.min(ratio);
        max = max.max(ratio);
        if !(lo..=hi).contains(&ratio) {
            return Err(format!("polyline {i}: ratio {ratio}"));
        }
    }
    Ok(format!("1000 polylines, euclidean/metric ratio in [{min:.6}, {max:.6}]"))
}

fn criterion_4() -> Outcome {
    let charts = perturbed_charts();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let ch = &charts[i % charts.len()];
        let k = rng.gen_range(3..=8);
        let points = (0..k).map(|_| random_point(&mut rng, 0.5 * ch.radius)).collect();
        let z = ChartPolyline { points, closed: true };
        let fill = cone_fill(&z, ch).map_err(|e| format!("loop {i}: {e}"))?;
        let (_, len) = chart_length(&z, ch).map_err(|e| format!("loop {i}: {e}"))?;
        let rhs = len * ch.radius;
        worst = worst.max(fill.mass / rhs);
        if fill.mass > rhs {
            return Err(format!("loop {i}: cone mass {} above {rhs}", fill.mass));
        }
    }
    // star-shaped planar polygons about the origin in the flat chart
    let flat = HarmonicChart::flat(0, 2.0, Default::default());
    for i in 0..200 {
        let k = rng.gen_range(3..=9);
        let mut angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let radii: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
        let pts: Vec<[f64; 4]> =
            angles.iter().zip(&radii).map(|(a, r)| [r * a.cos(), r * a.sin(), 0.0, 0.0]).collect();
        let mut area = 0.0;
        for j in 0..k {
            let (p, q) = (pts[j], pts[(j + 1) % k]);
            area += 0.5 * (p[0] * q[1] - p[1] * q[0]).abs();
        }
        let fill = cone_fill(&ChartPolyline { points: pts, closed: true }, &flat).map_err(|e| e.to_string())?;
        if (fill.mass - area).abs() > 1e-9 {
            return Err(format!("flat polygon {i}: cone {} vs planar {area}", fill.mass));
        }
    }
    Ok(format!("1000 loops, max cone mass / (length·r_h) = {worst:.4}; 200 flat polygons exact"))
}

fn criterion_5() -> Outcome {
    let mut instances = Vec::new();
    for (p, q) in [(2, 1), (3, 1), (5, 2), (7, 3)] {
        for layers in [1, 2, 3] {
            instances.push(gen_lens_neck(p, q, layers).map_err(|e| e.to_string())?);
        }
    }
    for spec in standard_corpus() {
        instances.push(generate(&spec, 0).map_err(|e| e.to_string())?);
    }
    let mut necks = 0;
    let mut worst = 0.0f64;
    for ci in &instances {
        let b = BoundParams::b_of_epsilon(ci.instance.epsilon);
        for n in ci.instance.tree.necks() {
            let g = neck_thickness_and_diameter(&ci.instance.complex, n, b).map_err(|e| e.to_string())?;
            necks += 1;
            worst = worst.max(g.diam / (g.b * g.thick));
            if !g.holds {
                return Err(format!("{} {}: diam {} > B·thick = {}·{}", ci.name(), n.id, g.diam, g.b, g.thick));
            }
        }
    }
    Ok(format!("{necks} necks, max diam/(B·thick) = {worst:.4}"))
}

fn criterion_7() -> Outcome {
    let mut rows = Vec::new();
    let config = SearchConfig { node_budget: 200_000, ..SearchConfig::default() };
    for shrink in [1.0, 0.1, 0.01] {
        let ci = gen_eh_thin_neck(shrink).map_err(|e| e.to_string())?;
        let g = ci.neck_generator_chain().ok_or("no generator")?;
        let solver = FillingSolver::new(&ci.instance.complex).map_err(|e| e.to_string())?;
        let r = solver.minimal_mass_filling(&g, &config).map_err(|e| e.to_string())?;
        if !r.optimal {
            return Err(format!("shrink {shrink}: exact search did not complete"));
        }
        rows.push((ci.instance.complex.mass(&g), r.mass));
    }
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |a, r| (a.0.min(r.1), a.1.max(r.1)));
    let spread = (hi - lo) / hi;
    let length_ratio = rows[0].0 / rows[2].0;
    let msg = format!(
        "fill masses {:.3}, {:.3}, {:.3} (spread {:.2}%), loop masses {:.4}, {:.4}, {:.4} (ratio {:.1})",
        rows[0].1,
        rows[1].1,
        rows[2].1,
        100.0 * spread,
        rows[0].0,
        rows[1].0,
        rows[2].0,
        length_ratio
    );
    if spread < 0.05 && (length_ratio - 100.0).abs() < 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_8() -> Outcome {
    for p in [2u64, 3, 5, 7] {
        let ci = gen_lens_neck(p, 1, 1).map_err(|e| e.to_string())?;
        let h = homology_rank_and_torsion(&ci.instance.complex, 1).map_err(|e| e.to_string())?;
        if h != (0, vec![BigInt::from(p)]) {
            return Err(format!("L({p},1)×I: H1 = {h:?}"));
        }
    }
    let mut full = 0;
    for spec in standard_corpus().into_iter().filter(|s| s.generator.ends_with("bubble") || s.generator == "eh_thin_neck") {
        let ci = generate(&spec, 0).map_err(|e| e.to_string())?;
        if !h1_trivial(&ci.instance.complex).map_err(|e| e.to_string())? {
            return Err(format!("{}: H1 ≠ 0", ci.name()));
        }
        full += 1;
    }
    Ok(format!("H1 = Z/p for p in 2,3,5,7; H1 = 0 on {full} multi-scale instances"))
}

fn rel_err(log2_value: f64, exact: &BigRational) -> f64 {
    let e = fillbound::pipeline::bounds::log2_rational(exact);
    ((log2_value - e) * std::f64::consts::LN_2).exp_m1().abs()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let p = BoundParams {
            n_tilde: if i < 3 { i + 1 } else { rng.gen_range(1..=3) },
            d: rng.gen_range(1..=64) as f64 / 8.0,
            b: rng.gen_range(0..=40) as f64 / 4.0,
            k_depth: rng.gen_range(1..=4),
            n_width: rng.gen_range(1..=5),
            h1: rng.gen_range(1..=7),
            epsilon: 1e-3,
        };
        let b = bound_calculator(&p).map_err(|e| e.to_string())?;
        let ex = b.exact.as_ref().ok_or("exact column missing")?;
        let q = |s: &str| BigRational::from_str(s).map_err(|e| format!("{s}: {e}"));
        let (f1, f2, area) = (q(&ex.f1)?, q(&ex.f2)?, q(&ex.area)?);
        for (l, e) in [
            (b.g1_log2, q(&ex.g1)?),
            (b.g2_log2, q(&ex.g2)?),
            (b.h_log2, q(&ex.h)?),
            (b.f1_log2, f1.clone()),
            (b.f2_log2, f2.clone()),
            (b.area_log2, area.clone()),
        ] {
            worst = worst.max(rel_err(l, &e));
        }
        let d = BigRational::from_float(p.d).unwrap();
        let int = |x: i64| BigRational::from_integer(BigInt::from(x));
        let two_forms = int(60) * (&f1 * int(2) * &d + &f2);
        let remark = int(120) * &f1 * &d + int(60) * &f2;
        if area != remark || remark != two_forms {
            return Err(format!("draw {i}: area identity fails"));
        }
    }
    if worst <= 1e-9 {
        Ok(format!("1000 draws with N in 1..3; max relative error {worst:.2e}; F identity exact"))
    } else {
        Err(format!("max relative error {worst:.2e}"))
    }
}

fn main() {
    let t = Instant::now();
    let run = corpus_run();
    let corpus_time = t.elapsed();
    let mut results: Vec<(u32, Outcome, std::time::Duration)> = Vec::new();
    results.push((1, criterion_1(&run), corpus_time));
    for (n, f) in [(2, criterion_2 as fn() -> Outcome), (3, criterion_3), (4, criterion_4), (5, criterion_5)] {
        let t = Instant::now();
        let r = f();
        results.push((n, r, t.elapsed()));
    }
    results.push((6, criterion_6(&run), corpus_time));
    for (n, f) in [(7, criterion_7 as fn() -> Outcome), (8, criterion_8), (9, criterion_9)] {
        let t = Instant::now();
        let r = f();
        results.push((n, r, t.elapsed()));
    }
    let mut failed = 0;
    for (n, r, dt) in &results {
        match r {
            Ok(m) => println!("criterion {n}: PASS  {m}  [{:.1}s]", dt.as_secs_f64()),
            Err(m) => {
                failed += 1;
                println!("criterion {n}: FAIL  {m}  [{:.1}s]", dt.as_secs_f64())
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
