//! Finding `c''` in a neck with `z − c''` bounding in the child's subtree.
//!
//! Candidates are the fundamental loops of shortest-path trees of the neck,
//! rooted at a spread of neck vertices. Whether `z − k·g` bounds in the
//! subtree is decided from SNF obstruction vectors: columns of `U` are
//! precomputed for the neck edges, so every candidate costs one sparse sum.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::context::{FillContext, LocalSolver};

/// Roots of shortest-path trees used for candidate loops.
const MAX_ROOTS: usize = 16;
/// Candidates kept after sorting by length.
const MAX_CANDIDATES: usize = 96;
/// Candidates combined pairwise when no single multiple works.
const PAIR_CANDIDATES: usize = 24;

pub struct NeckCandidates<T> {
    pub neck: String,
    pub order: u64,
    subtree: Arc<LocalSolver<T>>,
    moduli: Vec<BigInt>,
    /// `(loop, length, reduced obstruction)`, shortest first.
    pub loops: Vec<(Chain, T, Vec<BigInt>)>,
}

fn reduce(mut v: Vec<BigInt>, moduli: &[BigInt]) -> Vec<BigInt> {
    for (x, m) in v.iter_mut().zip(moduli) {
        if !m.is_zero() {
            *x = x.mod_floor(m);
        }
    }
    v
}

impl<T: Scalar> NeckCandidates<T> {
    pub fn build(ctx: &FillContext<'_, T>, body: &str) -> Result<Self> {
        let tree = ctx.tree();
        let parent = tree
            .parent(body)
            .ok_or_else(|| Error::Consistency(format!("root body {body} has no neck")))?;
        let neck = tree.neck_between(parent, body)?;
        let subtree = ctx.solver_for(&tree.subtree_vertices(body)?)?;
        let cert = subtree
            .certificate()
            .ok_or_else(|| Error::Consistency(format!("subtree of {body} has no triangles")))?;
        let moduli = cert.obstruction_moduli();
        let neck_complex = ctx.inst.complex.induced(&neck.vertices);
        let edges = neck_complex.simplices(1);
        let cols: BTreeSet<usize> =
            edges.iter().map(|e| subtree.complex.index_of(e).expect("neck lies in the subtree")).collect();
        let col = cert.obstruction_columns(&cols);
        let metric = ctx.neck_metric(&neck.id)?;
        let verts: Vec<usize> = neck.vertices.iter().copied().collect();
        let step = verts.len().div_ceil(MAX_ROOTS).max(1);
        let mut seen: BTreeSet<Chain> = BTreeSet::new();
        let mut loops = Vec::new();
        for &root in verts.iter().step_by(step) {
            let mut to_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &v in &verts {
                to_root.insert(v, metric.shortest_path(v, root)?.0);
            }
            for e in edges {
                let (a, b) = (e.vertices()[0], e.vertices()[1]);
                if to_root[&a].get(1) == Some(&b) || to_root[&b].get(1) == Some(&a) {
                    continue;
                }
                let mut g = Chain::from_walk(&[a, b])?;
                g -= &Chain::from_walk(&to_root[&a])?;
                g += &Chain::from_walk(&to_root[&b])?;
                if g.is_empty() || !seen.insert(g.clone()) {
                    continue;
                }
                let mut ob = vec![BigInt::zero(); moduli.len()];
                for (s, c) in g.iter() {
                    let i = subtree.complex.index_of(s).expect("neck edge");
                    for (x, y) in ob.iter_mut().zip(&col[&i]) {
                        *x += y * c;
                    }
                }
                let ob = reduce(ob, &moduli);
                if ob.iter().any(|x| !x.is_zero()) {
                    let len = ctx.inst.complex.mass(&g);
                    loops.push((g, len, ob));
                }
            }
        }
        loops.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap().then_with(|| x.0.cmp(&y.0)));
        loops.truncate(MAX_CANDIDATES);
        Ok(NeckCandidates { neck: neck.id.clone(), order: neck.group_order.unwrap_or(1).max(1), subtree, moduli, loops })
    }

    /// Obstruction of `z` in the subtree; zero iff `z` bounds there.
    pub fn obstruction(&self, z: &Chain) -> Result<Vec<BigInt>> {
        let cert = self.subtree.certificate().expect("checked at build");
        let mut v = BTreeMap::new();
        for (s, a) in z.iter() {
            let i = self
                .subtree
                .complex
                .index_of(s)
                .ok_or_else(|| Error::Consistency(format!("edge {s} leaves the subtree")))?;
            v.insert(i, BigInt::from(a));
        }
        Ok(reduce(cert.obstruction(&v), &self.moduli))
    }

    fn scaled(&self, ob: &[BigInt], k: i64) -> Vec<BigInt> {
        reduce(ob.iter().map(|x| x * k).collect(), &self.moduli)
    }

    /// Cheapest `k·g`, then `k₁·g₁ + k₂·g₂`, matching the class of `z`.
    pub fn representative(&self, z: &Chain) -> Result<Chain> {
        let target = self.obstruction(z)?;
        if target.iter().all(|x| x.is_zero()) {
            return Ok(Chain::zero(1));
        }
        let kmax = self.order.max(2) as i64;
        let ks: Vec<i64> = (1..kmax).flat_map(|k| [k, -k]).collect();
        let mut best: Option<(T, Chain)> = None;
        fn consider<T: Scalar>(best: &mut Option<(T, Chain)>, cost: T, c: Chain) {
            if best.as_ref().map_or(true, |(b, _)| cost < *b) {
                *best = Some((cost, c));
            }
        }
        for (g, len, ob) in &self.loops {
            for &k in &ks {
                if self.scaled(ob, k) == target {
                    consider(&mut best, *len * T::from_int(k.abs()), g.scale(k));
                }
            }
        }
        if let Some((_, c)) = best {
            return Ok(c);
        }
        let head = &self.loops[..self.loops.len().min(PAIR_CANDIDATES)];
        for (i, (g1, l1, o1)) in head.iter().enumerate() {
            for (g2, l2, o2) in &head[i + 1..] {
                for &k1 in &ks {
                    let a = self.scaled(o1, k1);
                    for &k2 in &ks {
                        let b = self.scaled(o2, k2);
                        let sum = reduce(a.iter().zip(&b).map(|(x, y)| x + y).collect(), &self.moduli);
                        if sum == target {
                            let cost = *l1 * T::from_int(k1.abs()) + *l2 * T::from_int(k2.abs());
                            consider(&mut best, cost, &g1.scale(k1) + &g2.scale(k2));
                        }
                    }
                }
            }
        }
        best.map(|(_, c)| c)
            .ok_or_else(|| Error::Consistency(format!("no representative of the cycle's class in neck {}", self.neck)))
    }
}
