//! Bubble trees: bodies linked parent→child through necks.
//!
//! A neck's vertex set lies in both bodies it joins, and the vertices shared
//! between a child's subtree and the rest of the complex are exactly the
//! neck's. Decomposition relies on both facts; [`BubbleTree::validate`]
//! checks them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complex::WeightedComplex;
use crate::error::{Error, Result};
use crate::nerve::SkeletonMetric;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Body,
    Neck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    pub kind: RegionKind,
    pub vertices: BTreeSet<usize>,
    /// Harmonic radius; bodies only. Balls of the body have radius `r_h/20`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering: Option<String>,
    /// Order of `H₁` of a neck.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s1: Option<BTreeSet<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s2: Option<BTreeSet<usize>>,
}

impl Region {
    pub fn body(id: &str, vertices: BTreeSet<usize>, r_h: f64) -> Self {
        Region {
            id: id.to_string(),
            kind: RegionKind::Body,
            vertices,
            r_h: Some(r_h),
            chart: None,
            covering: None,
            group_order: None,
            s1: None,
            s2: None,
        }
    }

    pub fn neck(id: &str, vertices: BTreeSet<usize>, s1: BTreeSet<usize>, s2: BTreeSet<usize>, order: u64) -> Self {
        Region {
            id: id.to_string(),
            kind: RegionKind::Neck,
            vertices,
            r_h: None,
            chart: None,
            covering: None,
            group_order: Some(order),
            s1: Some(s1),
            s2: Some(s2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub parent: String,
    pub child: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incidence {
    pub neck: String,
    pub body: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BubbleTree {
    pub regions: Vec<Region>,
    pub edges: Vec<TreeEdge>,
    pub incidence: Vec<Incidence>,
}

fn inconsistent(m: impl Into<String>) -> Error {
    Error::TreeInconsistent(m.into())
}

impl BubbleTree {
    pub fn region(&self, id: &str) -> Result<&Region> {
        self.regions.iter().find(|r| r.id == id).ok_or_else(|| inconsistent(format!("no region {id}")))
    }

    pub fn bodies(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| r.kind == RegionKind::Body)
    }

    pub fn necks(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| r.kind == RegionKind::Neck)
    }

    pub fn parent(&self, id: &str) -> Option<&str> {
        self.edges.iter().find(|e| e.child == id).map(|e| e.parent.as_str())
    }

    pub fn children(&self, id: &str) -> Vec<&str> {
        self.edges.iter().filter(|e| e.parent == id).map(|e| e.child.as_str()).collect()
    }

    pub fn root(&self) -> Result<&str> {
        let roots: Vec<&str> = self.bodies().filter(|b| self.parent(&b.id).is_none()).map(|b| b.id.as_str()).collect();
        match roots.as_slice() {
            [r] => Ok(r),
            _ => Err(inconsistent(format!("expected one root body, found {roots:?}"))),
        }
    }

    /// The neck incident to both `a` and `b`.
    pub fn neck_between(&self, a: &str, b: &str) -> Result<&Region> {
        self.necks()
            .find(|n| {
                let inc = |x: &str| self.incidence.iter().any(|i| i.neck == n.id && i.body == x);
                inc(a) && inc(b)
            })
            .ok_or_else(|| inconsistent(format!("no neck joins {a} and {b}")))
    }

    /// Bodies of the subtree rooted at `id`, in preorder.
    pub fn subtree(&self, id: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(b) = stack.pop() {
            if let Ok(r) = self.region(b) {
                out.push(r.id.as_str());
            }
            let mut ch = self.children(b);
            ch.reverse();
            stack.extend(ch);
        }
        out
    }

    pub fn subtree_vertices(&self, id: &str) -> Result<BTreeSet<usize>> {
        let mut s = BTreeSet::new();
        for b in self.subtree(id) {
            s.extend(self.region(b)?.vertices.iter().copied());
        }
        Ok(s)
    }

    /// Root has depth 1.
    pub fn depth_of(&self, id: &str) -> usize {
        let mut d = 1;
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            d += 1;
            cur = p;
            if d > self.regions.len() {
                break;
            }
        }
        d
    }

    pub fn depth(&self) -> usize {
        self.bodies().map(|b| self.depth_of(&b.id)).max().unwrap_or(0)
    }

    /// Largest number of bodies on one level.
    pub fn width(&self) -> usize {
        let mut per: BTreeMap<usize, usize> = BTreeMap::new();
        for b in self.bodies() {
            *per.entry(self.depth_of(&b.id)).or_default() += 1;
        }
        per.values().copied().max().unwrap_or(0)
    }

    /// Ball radius `R = r_h/20` of a body.
    pub fn scale(&self, id: &str) -> Result<f64> {
        let r = self.region(id)?;
        r.r_h.map(|x| x / 20.0).ok_or_else(|| inconsistent(format!("body {id} has no harmonic radius")))
    }

    pub fn max_group_order(&self) -> u64 {
        self.necks().filter_map(|n| n.group_order).max().unwrap_or(1).max(1)
    }

    /// Structural checks against the complex.
    pub fn validate<T: Scalar>(&self, complex: &WeightedComplex<T>) -> Result<()> {
        let mut ids = BTreeSet::new();
        for r in &self.regions {
            if !ids.insert(r.id.as_str()) {
                return Err(inconsistent(format!("duplicate region id {}", r.id)));
            }
            if r.vertices.is_empty() {
                return Err(inconsistent(format!("region {} is empty", r.id)));
            }
            if let Some(v) = r.vertices.iter().find(|v| !complex.contains_vertex(**v)) {
                return Err(inconsistent(format!("region {} names vertex {v} outside the complex", r.id)));
            }
        }
        let kind = |id: &str| self.region(id).map(|r| r.kind);
        for e in &self.edges {
            if kind(&e.parent)? != RegionKind::Body || kind(&e.child)? != RegionKind::Body {
                return Err(inconsistent(format!("tree edge {} → {} must join bodies", e.parent, e.child)));
            }
            if self.edges.iter().filter(|f| f.child == e.child).count() > 1 {
                return Err(inconsistent(format!("body {} has two parents", e.child)));
            }
        }
        for i in &self.incidence {
            if kind(&i.neck)? != RegionKind::Neck || kind(&i.body)? != RegionKind::Body {
                return Err(inconsistent(format!("incidence {} ~ {} must pair a neck with a body", i.neck, i.body)));
            }
        }
        let root = self.root()?;
        let reached: BTreeSet<&str> = self.subtree(root).into_iter().collect();
        if reached.len() != self.bodies().count() || self.edges.len() + 1 != reached.len() {
            return Err(inconsistent("bodies do not form a single rooted tree"));
        }
        let labeled: BTreeSet<usize> = self.regions.iter().flat_map(|r| r.vertices.iter().copied()).collect();
        if let Some(v) = complex.vertices().find(|v| !labeled.contains(v)) {
            return Err(inconsistent(format!("vertex {v} belongs to no region")));
        }
        for e in complex.simplices(1) {
            let (u, v) = (e.vertices()[0], e.vertices()[1]);
            if !self.bodies().any(|b| b.vertices.contains(&u) && b.vertices.contains(&v)) {
                return Err(inconsistent(format!("edge {e} lies in no body")));
            }
        }
        for b in self.bodies() {
            match b.r_h {
                Some(r) if r > 0.0 && r.is_finite() => {}
                _ => return Err(inconsistent(format!("body {} needs a positive harmonic radius", b.id))),
            }
        }
        for e in &self.edges {
            if self.scale(&e.child)? >= self.scale(&e.parent)? {
                return Err(inconsistent(format!("child {} is not at a smaller scale than {}", e.child, e.parent)));
            }
            let neck = self.neck_between(&e.parent, &e.child)?;
            for b in [&e.parent, &e.child] {
                if !neck.vertices.is_subset(&self.region(b)?.vertices) {
                    return Err(inconsistent(format!("neck {} is not inside body {b}", neck.id)));
                }
            }
            let inside = self.subtree_vertices(&e.child)?;
            let sub: BTreeSet<&str> = self.subtree(&e.child).into_iter().collect();
            for b in self.bodies().filter(|b| !sub.contains(b.id.as_str())) {
                if let Some(v) = b.vertices.intersection(&inside).find(|v| !neck.vertices.contains(v)) {
                    return Err(inconsistent(format!(
                        "vertex {v} is shared by {} and the subtree of {} outside neck {}",
                        b.id, e.child, neck.id
                    )));
                }
            }
        }
        for n in self.necks() {
            let inc: Vec<&str> =
                self.incidence.iter().filter(|i| i.neck == n.id).map(|i| i.body.as_str()).collect();
            if inc.len() != 2 {
                return Err(inconsistent(format!("neck {} must meet exactly two bodies", n.id)));
            }
            for b in self.bodies() {
                let meets = !b.vertices.is_disjoint(&n.vertices);
                if meets != inc.contains(&b.id.as_str()) {
                    return Err(inconsistent(format!("neck {} and body {} disagree with the incidence", n.id, b.id)));
                }
            }
        }
        Ok(())
    }

    /// Depth and width within the limits of the bound parameters.
    pub fn check_limits(&self, k_depth: u64, n_width: u64) -> Result<()> {
        if self.depth() as u64 > k_depth || self.width() as u64 > n_width {
            return Err(inconsistent(format!(
                "tree of depth {} and width {} exceeds k = {k_depth}, N = {n_width}",
                self.depth(),
                self.width()
            )));
        }
        Ok(())
    }
}

/// Thickness, diameter and the check `diam ≤ B·thick` for one neck, measured
/// in the neck's own 1-skeleton.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeckGeometry {
    pub thick: f64,
    pub diam: f64,
    pub b: f64,
    pub holds: bool,
}

pub fn neck_thickness_and_diameter<T: Scalar>(
    complex: &WeightedComplex<T>,
    neck: &Region,
    b: f64,
) -> Result<NeckGeometry> {
    let (Some(s1), Some(s2)) = (&neck.s1, &neck.s2) else {
        return Err(Error::InvalidParams(format!("neck {} lacks boundary components", neck.id)));
    };
    if s1.is_empty() || s2.is_empty() || !s1.is_disjoint(s2) {
        return Err(Error::InvalidParams(format!("neck {} has degenerate boundary components", neck.id)));
    }
    if !s1.is_subset(&neck.vertices) || !s2.is_subset(&neck.vertices) {
        return Err(Error::InvalidParams(format!("boundary of neck {} leaves the neck", neck.id)));
    }
    let sub = complex.induced(&neck.vertices);
    let metric = SkeletonMetric::new(&sub);
    let mut thick = f64::INFINITY;
    for &u in s1 {
        for &v in s2 {
            let x = metric.dist(v, u)?.as_f64();
            if !x.is_finite() {
                return Err(Error::Disconnected(u, v));
            }
            thick = thick.min(x);
        }
    }
    let diam = metric.diameter_of(&neck.vertices)?.as_f64();
    Ok(NeckGeometry { thick, diam, b, holds: diam <= b * thick })
}
