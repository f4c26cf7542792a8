//! Replacing a cycle by a homologous cycle of the geodesic graph Γ.
//!
//! The cycle is split into closed walks. Each edge of a walk is assigned a
//! ball containing it, and each walk is cut into arcs of length at most `R`.
//! Arc `m` runs from `p_m` to `p_{m+1}`; with `x_m` the center of the ball of
//! its first edge and `σ_m` a shortest path `x_m → p_m`, the loop
//! `γ_m = σ_m + arc_m − σ_{m+1} − α_m` closes up, where `α_m` is the Γ-walk
//! through the balls met along the arc. The `σ` telescope, so
//! `Σ γ_m = walk − Σ α_m`, and filling every `γ_m` locally yields `E` with
//! `∂E = c − c_Γ`.

use std::collections::BTreeMap;

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::nerve::GraphChain;
use crate::scalar::Scalar;

use super::context::{FillContext, SubtreeGeometry};

/// Closed walks whose sum is `z`; an edge with coefficient `a` is traversed
/// `|a|` times. Deterministic: always the smallest available vertex.
pub fn closed_walks(z: &Chain) -> Result<Vec<Vec<usize>>> {
    if !z.is_cycle() {
        return Err(Error::NotACycle);
    }
    let mut out_edges: BTreeMap<usize, BTreeMap<usize, i64>> = BTreeMap::new();
    for (e, a) in z.iter() {
        let (u, v) = (e.vertices()[0], e.vertices()[1]);
        let (from, to) = if a > 0 { (u, v) } else { (v, u) };
        *out_edges.entry(from).or_default().entry(to).or_default() += a.abs();
    }
    fn take(out: &mut BTreeMap<usize, BTreeMap<usize, i64>>, from: usize) -> Option<usize> {
        let m = out.get_mut(&from)?;
        let (&to, n) = m.iter_mut().next()?;
        *n -= 1;
        if *n == 0 {
            m.remove(&to);
        }
        Some(to)
    }
    let mut walks = Vec::new();
    loop {
        let Some(start) = out_edges.iter().find(|(_, m)| !m.is_empty()).map(|(v, _)| *v) else { break };
        let mut walk = vec![start];
        let mut cur = start;
        loop {
            let next = take(&mut out_edges, cur).ok_or_else(|| Error::Consistency("unbalanced cycle".into()))?;
            walk.push(next);
            cur = next;
            if cur == start {
                break;
            }
        }
        walks.push(walk);
    }
    Ok(walks)
}

#[derive(Clone, Debug)]
pub struct PushResult {
    /// Γ-cycle over the subtree's ball indices.
    pub graph_chain: GraphChain,
    /// `∂filling = c − c_Γ` in the complex.
    pub filling: Chain,
    pub arcs: usize,
    pub walks: usize,
}

fn loop_erase(seq: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for &b in seq {
        if let Some(i) = out.iter().position(|x| *x == b) {
            out.truncate(i + 1);
        } else {
            out.push(b);
        }
    }
    out
}

/// Pushes `z` into Γ using the balls `preferred` (subtree-local indices) and
/// arcs of length at most `r`. Edges lying in none of the preferred balls
/// may use any ball of the subtree.
pub fn push_to_graph<T: Scalar>(
    ctx: &FillContext<'_, T>,
    geom: &SubtreeGeometry<T>,
    preferred: &[usize],
    r: T,
    z: &Chain,
) -> Result<PushResult> {
    let balls = &geom.covering.balls;
    let ball_for = |u: usize, v: usize, prev: Option<usize>| -> Result<usize> {
        let holds = |i: usize| balls[i].members.contains(&u) && balls[i].members.contains(&v);
        if let Some(p) = prev.filter(|p| holds(*p)) {
            return Ok(p);
        }
        preferred
            .iter()
            .copied()
            .find(|i| holds(*i))
            .or_else(|| (0..balls.len()).find(|i| holds(*i)))
            .ok_or_else(|| Error::Consistency(format!("edge {u}-{v} escapes every ball of the covering")))
    };
    let mut graph_chain = GraphChain::new();
    let mut filling = Chain::zero(2);
    let mut arcs = 0;
    let walks = closed_walks(z)?;
    for w in &walks {
        let n = w.len() - 1;
        let mut beta = Vec::with_capacity(n);
        for i in 0..n {
            let b = ball_for(w[i], w[i + 1], beta.last().copied())?;
            beta.push(b);
        }
        // arc starts: cut before an edge that would push the arc past r
        let mut starts = vec![0];
        let mut len = T::zero();
        for i in 0..n {
            let l = ctx.inst.complex.edge_length(w[i], w[i + 1])?;
            if i > *starts.last().unwrap() && len + l > r {
                starts.push(i);
                len = T::zero();
            }
            len += l;
        }
        arcs += starts.len();
        let sigma = |m: usize| -> Result<Chain> {
            let i = if m == starts.len() { 0 } else { starts[m] };
            let center = balls[beta[i]].center;
            let (path, _) = ctx.metric.shortest_path(center, w[i])?;
            Chain::from_walk(&path)
        };
        let mut sigma_m = sigma(0)?;
        for m in 0..starts.len() {
            let (a, b) = (starts[m], if m + 1 < starts.len() { starts[m + 1] } else { n });
            let x_next = if m + 1 < starts.len() { beta[b] } else { beta[0] };
            let mut seq: Vec<usize> = beta[a..b].to_vec();
            seq.push(x_next);
            seq.dedup();
            let alpha = GraphChain::from_walk(&loop_erase(&seq));
            let sigma_next = sigma(m + 1)?;
            let mut gamma = sigma_m.clone();
            gamma += &Chain::from_walk(&w[a..=b])?;
            gamma -= &sigma_next;
            gamma -= &alpha.to_complex_chain(&geom.graph)?;
            let center = balls[beta[a]].center;
            filling += &ctx.fill_local(&gamma, center, r, &geom.vertices)?;
            for ((i, j), c) in alpha.iter() {
                graph_chain.add_edge(i, j, c);
            }
            sigma_m = sigma_next;
        }
    }
    Ok(PushResult { graph_chain, filling, arcs, walks: walks.len() })
}
