//! The two fill branches and the full pipeline.
//!
//! Only exactness (`∂E = c`) is enforced as an error. The mass inequalities
//! of each stage are evaluated and recorded as [`Check`]s in the trace.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::homology::{nr_coefficient_bound, SearchConfig};
use crate::io::ChainJson;
use crate::nerve::{graph_cycle_to_nerve, nerve_filling_to_triangles};
use crate::scalar::Scalar;

use super::bounds::{bound_holds, log2_add, log2_rhs, BoundParams, Bounds};
use super::context::{FillContext, Instance, PipelineConfig, SubtreeGeometry};
use super::decompose::decompose_cycle;
use super::push::push_to_graph;

/// One inequality `lhs ≤ 2^rhs_log2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs_log2: f64,
    pub holds: bool,
}

impl Check {
    pub fn log(name: &str, lhs: f64, rhs_log2: f64) -> Self {
        let holds = lhs <= 0.0 || rhs_log2 == f64::INFINITY || lhs.log2() <= rhs_log2 + 1e-9;
        Check { name: name.to_string(), lhs, rhs_log2, holds }
    }

    pub fn linear(name: &str, lhs: f64, rhs: f64) -> Self {
        Check { name: name.to_string(), lhs, rhs_log2: rhs.log2(), holds: lhs <= rhs * (1.0 + 1e-9) }
    }
}

fn lg(x: f64) -> f64 {
    if x > 0.0 {
        x.log2()
    } else {
        f64::NEG_INFINITY
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FillBranch {
    /// The piece bounds inside its subtree.
    Body,
    /// It bounds there only after subtracting `representative` in `neck`.
    Neck { neck: String, representative: Chain },
}

/// Result of filling one cycle through a subtree's nerve.
#[derive(Clone, Debug)]
pub struct SubtreeFill {
    pub filling: Chain,
    pub arcs: usize,
    pub graph_length: i64,
    pub nerve_fallback: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub body: String,
    pub branch: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neck: Option<String>,
    pub piece_mass1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representative_mass1: Option<f64>,
    pub filling_mass: f64,
    pub arcs: usize,
    pub graph_length: i64,
    pub nerve_fallback: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug)]
pub struct FillingReport<T> {
    pub filling: Chain,
    pub mass: T,
    pub input_mass: T,
    pub params: BoundParams,
    pub bounds: Bounds,
    /// `log₂(f₁·mass₁(c) + f₂)`.
    pub rhs_log2: f64,
    pub bound_holds: bool,
    pub checks: Vec<Check>,
    pub trace: Vec<TraceEntry>,
}

impl<T: Scalar> FillingReport<T> {
    /// True when every recorded inequality held.
    pub fn all_checks_hold(&self) -> bool {
        self.checks.iter().chain(self.trace.iter().flat_map(|t| &t.checks)).all(|c| c.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillingReportJson {
    pub mass: f64,
    pub input_mass: f64,
    pub f1_log2: f64,
    pub f2_log2: f64,
    pub area_log2: f64,
    pub rhs_log2: f64,
    pub bound_holds: bool,
    pub params: BoundParams,
    pub checks: Vec<Check>,
    pub branch_trace: Vec<TraceEntry>,
    pub filling: ChainJson,
}

impl<T: Scalar> From<&FillingReport<T>> for FillingReportJson {
    fn from(r: &FillingReport<T>) -> Self {
        FillingReportJson {
            mass: r.mass.as_f64(),
            input_mass: r.input_mass.as_f64(),
            f1_log2: r.bounds.f1_log2,
            f2_log2: r.bounds.f2_log2,
            area_log2: r.bounds.area_log2,
            rhs_log2: r.rhs_log2,
            bound_holds: r.bound_holds,
            params: r.params.clone(),
            checks: r.checks.clone(),
            branch_trace: r.trace.clone(),
            filling: ChainJson::from(&r.filling),
        }
    }
}

/// Chooses the branch for a piece `z` lying in `body`.
pub fn classify_fill_branch<T: Scalar>(
    ctx: &FillContext<'_, T>,
    z: &Chain,
    body: &str,
) -> Result<FillBranch> {
    let tree = ctx.tree();
    let sub = ctx.solver_for(&tree.subtree_vertices(body)?)?;
    if sub.solver().fills_exist(z)? {
        return Ok(FillBranch::Body);
    }
    if tree.parent(body).is_none() {
        return Err(Error::Consistency(format!("cycle does not bound in the root subtree {body}")));
    }
    let cand = ctx.neck_candidates(body)?;
    let rep = cand.representative(z)?;
    Ok(FillBranch::Neck { neck: cand.neck.clone(), representative: rep })
}

fn fill_through_nerve<T: Scalar>(
    ctx: &FillContext<'_, T>,
    geom: &SubtreeGeometry<T>,
    preferred: &[usize],
    r: T,
    z: &Chain,
) -> Result<SubtreeFill> {
    let n = ctx.params.n_tilde as f64;
    let m1 = ctx.inst.complex.mass(z).as_f64();
    let push = push_to_graph(ctx, geom, preferred, r, z)?;
    let cg = &push.graph_chain;
    let cg_complex = cg.to_complex_chain(&geom.graph)?;
    let mut checks = vec![
        Check::linear("graph_length", cg.simplicial_length() as f64, n * n * push.arcs as f64),
        Check::linear("graph_mass", cg.mass(&geom.graph)?.as_f64(), 2.0 * n * n * m1),
        Check::linear(
            "push_filling_mass",
            ctx.inst.complex.mass(&push.filling).as_f64(),
            20.0 * r.as_f64() * (2.0 * n * n + 3.0) * m1,
        ),
    ];
    let mut e2 = Chain::zero(2);
    let mut nerve_fallback = false;
    if !cg.is_empty() {
        let cn = graph_cycle_to_nerve(cg, &geom.nerve)?;
        let ns = geom.nerve_solver.solver();
        if ns.fills_exist(&cn)? {
            let nb = nr_coefficient_bound(geom.covering.len() as u64, geom.nerve.complex.dim().max(1) as u64, cn.max_abs_coeff() as u64);
            let mut f = ns.some_filling(&cn)?.filling.expect("fills");
            if lg(f.max_abs_coeff() as f64) > nb {
                let cap = BigInt::one() << (nb.floor().max(0.0) as u64);
                f = ns
                    .bounded_filling(&cn, &cap, &SearchConfig::default())?
                    .and_then(|r| r.filling)
                    .ok_or_else(|| Error::Consistency("nerve filling exceeds the coefficient bound".into()))?;
            }
            checks.push(Check::log("nerve_coefficients", f.max_abs_coeff() as f64, nb));
            for t in nerve_filling_to_triangles(&f, &geom.graph)? {
                let v = t.balls.vertices();
                let loop_ = geom.graph.triangle_chain(&t.balls)?;
                let rt = v.iter().map(|i| geom.covering.balls[*i].radius).fold(T::zero(), T::max);
                let center = geom.covering.balls[v[0]].center;
                e2 += &ctx.fill_local(&loop_, center, rt, &geom.vertices)?.scale(t.multiplicity);
            }
        } else {
            nerve_fallback = true;
            let center = geom.covering.balls[cg.iter().next().expect("nonempty").0 .0].center;
            e2 = ctx.fill_local(&cg_complex, center, r, &geom.vertices)?;
        }
    }
    let mut filling = push.filling;
    filling += &e2;
    if filling.boundary()? != *z {
        return Err(Error::Consistency("subtree filling is not exact".into()));
    }
    Ok(SubtreeFill { filling, arcs: push.arcs, graph_length: cg.simplicial_length(), nerve_fallback, checks })
}

/// Fills a piece that bounds in the subtree of `body`.
pub fn fill_in_subtree<T: Scalar>(ctx: &FillContext<'_, T>, z: &Chain, body: &str) -> Result<SubtreeFill> {
    let geom = ctx.subtree(body)?;
    let r = T::lit(ctx.tree().scale(body)?);
    let mut f = fill_through_nerve(ctx, &geom, &geom.balls_of(body), r, z)?;
    let m1 = ctx.inst.complex.mass(z).as_f64();
    let m2 = ctx.inst.complex.mass(&f.filling).as_f64();
    f.checks.push(Check::log("subtree_mass", m2, ctx.bounds.g1_log2 + lg(m1)));
    Ok(f)
}

/// Fills `z − rep` in the subtree of `body` and `rep` in the whole complex.
pub fn fill_via_neck<T: Scalar>(ctx: &FillContext<'_, T>, z: &Chain, body: &str, rep: &Chain) -> Result<SubtreeFill> {
    let tree = ctx.tree();
    let parent = tree.parent(body).ok_or_else(|| Error::Consistency(format!("root {body} has no neck")))?;
    let neck = tree.neck_between(parent, body)?;
    let inner = fill_in_subtree(ctx, &(z - rep), body)?;
    let root = tree.root()?;
    let geom = ctx.subtree(root)?;
    let r = T::lit(tree.scale(parent)?);
    let outer = fill_through_nerve(ctx, &geom, &geom.balls_of(parent), r, rep)?;
    let mut filling = inner.filling;
    filling += &outer.filling;
    let m1 = ctx.inst.complex.mass(z).as_f64();
    let m2 = ctx.inst.complex.mass(&filling).as_f64();
    let h = ctx.bounds.h_log2;
    let diam = ctx.neck_metric(&neck.id)?.diameter_of(&neck.vertices)?.as_f64();
    let mut checks = inner.checks;
    checks.extend(outer.checks);
    checks.push(Check::log("representative_mass", ctx.inst.complex.mass(rep).as_f64(), h + lg(diam)));
    checks.push(Check::log("neck_mass", m2, log2_add(ctx.bounds.g1_log2 + lg(m1), ctx.bounds.g2_log2 + h)));
    Ok(SubtreeFill {
        filling,
        arcs: inner.arcs + outer.arcs,
        graph_length: inner.graph_length + outer.graph_length,
        nerve_fallback: inner.nerve_fallback || outer.nerve_fallback,
        checks,
    })
}

impl<'a, T: Scalar> FillContext<'a, T> {
    /// Decompose, classify, fill each piece, and sum.
    pub fn full_fill(&self, c: &Chain) -> Result<FillingReport<T>> {
        let pieces = decompose_cycle(self, c)?;
        let m1 = self.inst.complex.mass(c);
        let piece_sum: f64 = pieces.iter().map(|p| self.inst.complex.mass(&p.cycle).as_f64()).sum();
        let growth = self.params.k_depth as f64 * (2.0 * self.params.b + 1.0).log2();
        let mut checks = vec![Check::log("decomposition_mass", piece_sum, growth + lg(m1.as_f64()))];
        let mut filling = Chain::zero(2);
        let mut trace = Vec::new();
        for p in &pieces {
            let branch = classify_fill_branch(self, &p.cycle, &p.body)?;
            let (f, neck, rep_mass) = match &branch {
                FillBranch::Body => (fill_in_subtree(self, &p.cycle, &p.body)?, None, None),
                FillBranch::Neck { neck, representative } => (
                    fill_via_neck(self, &p.cycle, &p.body, representative)?,
                    Some(neck.clone()),
                    Some(self.inst.complex.mass(representative).as_f64()),
                ),
            };
            trace.push(TraceEntry {
                body: p.body.clone(),
                branch: if neck.is_some() { "neck" } else { "body" }.to_string(),
                neck,
                piece_mass1: self.inst.complex.mass(&p.cycle).as_f64(),
                representative_mass1: rep_mass,
                filling_mass: self.inst.complex.mass(&f.filling).as_f64(),
                arcs: f.arcs,
                graph_length: f.graph_length,
                nerve_fallback: f.nerve_fallback,
                checks: f.checks,
            });
            filling += &f.filling;
        }
        if filling.boundary()? != *c {
            return Err(Error::Consistency("assembled filling is not exact".into()));
        }
        let mass = self.inst.complex.mass(&filling);
        let rhs_log2 = log2_rhs(&self.bounds, m1.as_f64());
        let holds = bound_holds(&self.bounds, m1.as_f64(), mass.as_f64());
        checks.push(Check { name: "filling_bound".into(), lhs: mass.as_f64(), rhs_log2, holds });
        Ok(FillingReport {
            filling,
            mass,
            input_mass: m1,
            params: self.params.clone(),
            bounds: self.bounds.clone(),
            rhs_log2,
            bound_holds: holds,
            checks,
            trace,
        })
    }
}

/// One-shot pipeline run on `c`.
pub fn full_fill<T: Scalar>(inst: &Instance<T>, c: &Chain, config: PipelineConfig) -> Result<FillingReport<T>> {
    let ctx = FillContext::new(inst, config)?;
    ctx.full_fill(c)
}
