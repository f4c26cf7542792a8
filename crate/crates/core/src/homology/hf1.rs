//! Sampled estimates of the homological filling function
//! `HF₁(l) = sup_{mass₁(z) ≤ l} inf_{∂C = z} mass₂(C)`.
//!
//! Cycles come from loop-erased random walks on the 1-skeleton. The sample
//! set depends only on the seed, never on `l`, so the estimate is a running
//! maximum over a fixed pool and therefore nondecreasing in `l`. Sampling can
//! only under-estimate the supremum.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::Chain;
use crate::complex::WeightedComplex;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{h1_trivial, FillingSolver, SearchConfig};

/// One sampled cycle: its 1-mass and the mass of a minimal filling.
#[derive(Clone, Debug, PartialEq)]
pub struct Hf1Sample<T> {
    pub mass1: T,
    pub fill_mass: T,
    /// False when the filling search ran out of budget.
    pub optimal: bool,
}

/// `count` simple edge cycles drawn from loop-erased random walks.
/// Duplicates are kept; the sequence is a function of the seed alone.
pub fn sample_cycles<T: Scalar>(complex: &WeightedComplex<T>, count: usize, seed: u64) -> Vec<Chain> {
    let adj = complex.adjacency();
    let mut verts: Vec<usize> = adj.iter().filter(|(_, n)| n.len() >= 2).map(|(v, _)| *v).collect();
    verts.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if verts.is_empty() {
        return out;
    }
    let max_steps = 4 * complex.count(0) + 16;
    let mut attempts = 0usize;
    while out.len() < count && attempts < 50 * count + 100 {
        attempts += 1;
        let start = *verts.choose(&mut rng).unwrap();
        let mut path = vec![start];
        let mut pos: HashMap<usize, usize> = HashMap::from([(start, 0)]);
        for _ in 0..max_steps {
            let cur = *path.last().unwrap();
            let prev = path.len().checked_sub(2).map(|i| path[i]);
            let nbrs: Vec<usize> =
                adj[&cur].iter().map(|(w, _)| *w).filter(|w| Some(*w) != prev).collect();
            if nbrs.is_empty() {
                break;
            }
            let next = nbrs[rng.gen_range(0..nbrs.len())];
            if let Some(&i) = pos.get(&next) {
                let mut walk = path[i..].to_vec();
                walk.push(next);
                out.push(Chain::from_walk(&walk).expect("walk uses complex edges"));
                break;
            }
            pos.insert(next, path.len());
            path.push(next);
        }
    }
    out
}

fn checked_solver<T: Scalar>(complex: &WeightedComplex<T>) -> Result<FillingSolver<'_, T>> {
    if !h1_trivial(complex)? {
        return Err(Error::NontrivialH1);
    }
    FillingSolver::new(complex)
}

/// Sampled cycles of 1-mass at most `l`, each with its minimal filling mass.
pub fn hf1_estimate<T: Scalar>(
    complex: &WeightedComplex<T>,
    l: T,
    samples: usize,
    seed: u64,
    config: &SearchConfig,
) -> Result<Vec<Hf1Sample<T>>> {
    hf1_estimate_threads(complex, l, samples, seed, config, 1)
}

/// [`hf1_estimate`] with the fills spread over at most `threads` threads.
/// The result does not depend on `threads`.
pub fn hf1_estimate_threads<T: Scalar>(
    complex: &WeightedComplex<T>,
    l: T,
    samples: usize,
    seed: u64,
    config: &SearchConfig,
    threads: usize,
) -> Result<Vec<Hf1Sample<T>>> {
    if !(l > T::zero()) {
        return Err(Error::InvalidParams(format!("length budget must be positive, got {l}")));
    }
    let solver = checked_solver(complex)?;
    let cycles: Vec<(Chain, T)> = sample_cycles(complex, samples, seed)
        .into_iter()
        .map(|z| {
            let m = complex.mass(&z);
            (z, m)
        })
        .filter(|(_, m)| *m <= l)
        .collect();
    let threads = threads.clamp(1, cycles.len().max(1));
    let chunk = cycles.len().div_ceil(threads).max(1);
    let run = |part: &[(Chain, T)]| -> Result<Vec<Hf1Sample<T>>> {
        let mut cache = HashMap::new();
        part.iter()
            .map(|(z, m1)| {
                let (fill_mass, optimal) = fill_cached(&solver, &mut cache, z, config)?;
                Ok(Hf1Sample { mass1: *m1, fill_mass, optimal })
            })
            .collect()
    };
    if threads == 1 {
        return run(&cycles);
    }
    let parts: Vec<Result<Vec<Hf1Sample<T>>>> = std::thread::scope(|s| {
        let handles: Vec<_> = cycles.chunks(chunk).map(|part| s.spawn(|| run(part))).collect();
        handles.into_iter().map(|h| h.join().expect("fill thread panicked")).collect()
    });
    let mut out = Vec::with_capacity(cycles.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn fill_cached<T: Scalar>(
    solver: &FillingSolver<'_, T>,
    cache: &mut HashMap<Chain, (T, bool)>,
    z: &Chain,
    config: &SearchConfig,
) -> Result<(T, bool)> {
    if let Some(v) = cache.get(z) {
        return Ok(*v);
    }
    let r = solver.minimal_mass_filling(z, config)?;
    cache.insert(z.clone(), (r.mass, r.optimal));
    Ok((r.mass, r.optimal))
}

/// `(l, estimate)` for each `l` in `ls`, all sharing one sample pool.
/// Estimates are 0 where no sampled cycle fits.
pub fn hf1_curve<T: Scalar>(
    complex: &WeightedComplex<T>,
    ls: &[T],
    samples: usize,
    seed: u64,
    config: &SearchConfig,
) -> Result<Vec<(T, T)>> {
    let solver = checked_solver(complex)?;
    let lmax = ls.iter().copied().fold(T::zero(), T::max);
    let mut cache = HashMap::new();
    let mut pool: Vec<(T, T)> = Vec::new();
    for z in sample_cycles(complex, samples, seed) {
        let m1 = complex.mass(&z);
        if m1 <= lmax {
            pool.push((m1, fill_cached(&solver, &mut cache, &z, config)?.0));
        }
    }
    Ok(ls
        .iter()
        .map(|&l| {
            let est = pool.iter().filter(|(m1, _)| *m1 <= l).map(|p| p.1).fold(T::zero(), T::max);
            (l, est)
        })
        .collect())
}
