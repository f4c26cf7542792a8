//! Splitting a cycle into pieces that each lie in one body.
//!
//! At body `b`, the edges of the cycle that leave `b` are grouped by the
//! child subtree they lie in. Each group `c_q` has its boundary on the neck
//! between `b` and `q`; neck paths `γ` from those boundary points to one base
//! point close it up. The child receives `c_q + γ` and recurses, `b` keeps
//! the rest. The pieces sum to the input exactly.

use std::collections::BTreeMap;

use crate::chain::{Chain, Simplex};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::context::FillContext;

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub body: String,
    pub cycle: Chain,
}

/// Pieces in tree preorder, at most one per body, none empty.
pub fn decompose_cycle<T: Scalar>(ctx: &FillContext<'_, T>, c: &Chain) -> Result<Vec<Piece>> {
    if c.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, found: c.degree() });
    }
    ctx.inst.complex.check_chain(c)?;
    if !c.is_cycle() {
        return Err(Error::NotACycle);
    }
    let tree = ctx.tree();
    let mut acc: BTreeMap<String, Chain> = BTreeMap::new();
    split(ctx, c.clone(), tree.root()?, &mut acc)?;
    Ok(tree
        .subtree(tree.root()?)
        .into_iter()
        .filter_map(|b| acc.remove(b).filter(|z| !z.is_empty()).map(|z| Piece { body: b.to_string(), cycle: z }))
        .collect())
}

fn split<T: Scalar>(ctx: &FillContext<'_, T>, c: Chain, body: &str, acc: &mut BTreeMap<String, Chain>) -> Result<()> {
    if c.is_empty() {
        return Ok(());
    }
    let tree = ctx.tree();
    let supp = c.support_vertices();
    for q in tree.children(body) {
        if supp.is_subset(&tree.subtree_vertices(q)?) {
            return split(ctx, c, q, acc);
        }
    }
    let home = &tree.region(body)?.vertices;
    let inside = |s: &Simplex| s.vertices().iter().all(|v| home.contains(v));
    let mut rest = c.clone();
    for q in tree.children(body) {
        let sub = tree.subtree_vertices(q)?;
        let mut cq = Chain::zero(1);
        for (e, a) in c.iter() {
            if !inside(e) && e.vertices().iter().all(|v| sub.contains(v)) {
                cq.add_term(e.clone(), a);
            }
        }
        if cq.is_empty() {
            continue;
        }
        let neck = tree.neck_between(body, q)?;
        let metric = ctx.neck_metric(&neck.id)?;
        let bd = cq.boundary()?;
        let points: Vec<(usize, i64)> = bd.iter().map(|(s, a)| (s.vertices()[0], a)).collect();
        let mut piece = cq;
        if let Some(&(base, _)) = points.first() {
            for &(v, a) in &points {
                if !neck.vertices.contains(&v) {
                    return Err(Error::TreeInconsistent(format!(
                        "cycle crosses from {body} into {q} at vertex {v}, outside neck {}",
                        neck.id
                    )));
                }
                let (path, _) = metric.shortest_path(v, base)?;
                piece += &Chain::from_walk(&path)?.scale(a);
            }
        }
        rest -= &piece;
        split(ctx, piece, q, acc)?;
    }
    if let Some((e, _)) = rest.iter().find(|(e, _)| !inside(e)) {
        return Err(Error::TreeInconsistent(format!("edge {e} of the cycle lies in no subtree of {body}")));
    }
    *acc.entry(body.to_string()).or_insert_with(|| Chain::zero(1)) += &rest;
    Ok(())
}
