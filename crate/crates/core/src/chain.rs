//! Oriented simplices and sparse integer chains.
//!
//! A simplex is stored with its vertex ids in strictly increasing order. An
//! oriented simplex given in some other vertex order is folded into a chain
//! term by multiplying its coefficient with the sign of the sorting
//! permutation, so chain addition stays a plain sparse-map merge.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simplex in canonical (sorted) vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Canonicalizes `vertices`, returning the sorted simplex and the sign of
    /// the sorting permutation.
    pub fn oriented(mut vertices: Vec<usize>) -> Result<(Self, i64)> {
        if vertices.is_empty() {
            return Err(Error::InvalidComplex("empty simplex".into()));
        }
        // insertion sort, counting transpositions
        let mut sign = 1i64;
        for i in 1..vertices.len() {
            let mut j = i;
            while j > 0 && vertices[j - 1] > vertices[j] {
                vertices.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DegenerateSimplex(vertices));
        }
        Ok((Simplex(vertices), sign))
    }

    /// Sorted simplex, ignoring orientation.
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        Self::oriented(vertices).map(|(s, _)| s)
    }

    /// Builds from vertices already known to be strictly increasing.
    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// The `i`-th face (vertex `i` removed) with its boundary sign `(-1)^i`.
    pub fn face(&self, i: usize) -> (Simplex, i64) {
        let mut v = self.0.clone();
        v.remove(i);
        (Simplex(v), if i % 2 == 0 { 1 } else { -1 })
    }

    pub fn faces(&self) -> impl Iterator<Item = (Simplex, i64)> + '_ {
        (0..self.0.len()).map(move |i| self.face(i))
    }

    /// Simplex key used in the JSON formats: sorted ids joined by `-`.
    pub fn key(&self) -> String {
        self.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-")
    }

    pub fn from_key(key: &str) -> Result<Self> {
        let ids = key
            .split('-')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|e| Error::Parse {
                    context: format!("simplex key {key:?}"),
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ids)
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.key().replace('-', ","))
    }
}

/// Degree-`k` integer chain: a sparse map from simplices to nonzero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    degree: usize,
    terms: BTreeMap<Simplex, i64>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain { degree, terms: BTreeMap::new() }
    }

    pub fn from_simplex(simplex: Simplex, coeff: i64) -> Self {
        let mut c = Chain::zero(simplex.dim());
        c.add_term(simplex, coeff);
        c
    }

    /// Chain `coeff · [v0, v1, ...]` with the orientation given by the vertex
    /// order.
    pub fn from_oriented(vertices: Vec<usize>, coeff: i64) -> Result<Self> {
        let (s, sign) = Simplex::oriented(vertices)?;
        Ok(Chain::from_simplex(s, sign * coeff))
    }

    /// Collects `(simplex, coeff)` pairs; all simplices must share a degree.
    pub fn from_terms<I>(degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Simplex, i64)>,
    {
        let mut c = Chain::zero(degree);
        for (s, a) in terms {
            if s.dim() != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: s.dim() });
            }
            c.add_term(s, a);
        }
        Ok(c)
    }

    /// The 1-chain of a vertex walk `v0 → v1 → … → vn`, each step one edge.
    pub fn from_walk(walk: &[usize]) -> Result<Self> {
        let mut c = Chain::zero(1);
        for w in walk.windows(2) {
            c += &Chain::from_oriented(vec![w[0], w[1]], 1)?;
        }
        Ok(c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, s: &Simplex) -> i64 {
        self.terms.get(s).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, i64)> {
        self.terms.iter().map(|(s, &a)| (s, a))
    }

    /// Adds `coeff · s`; zero results are removed.
    pub fn add_term(&mut self, s: Simplex, coeff: i64) {
        debug_assert_eq!(s.dim(), self.degree);
        if coeff == 0 {
            return;
        }
        match self.terms.entry(s) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let v = e.get() + coeff;
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn scale(&self, n: i64) -> Chain {
        if n == 0 {
            return Chain::zero(self.degree);
        }
        Chain {
            degree: self.degree,
            terms: self.terms.iter().map(|(s, &a)| (s.clone(), a * n)).collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> i64 {
        self.terms.values().map(|a| a.abs()).max().unwrap_or(0)
    }

    /// Σ |coefficients|.
    pub fn l1(&self) -> i64 {
        self.terms.values().map(|a| a.abs()).sum()
    }

    /// Vertices touched by the support.
    pub fn support_vertices(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|s| s.vertices().iter().copied()).collect()
    }

    /// Alternating face sum.
    pub fn boundary(&self) -> Result<Chain> {
        if self.degree == 0 {
            return Err(Error::DegreeZeroBoundary);
        }
        let mut out = Chain::zero(self.degree - 1);
        for (s, &a) in &self.terms {
            for (f, sign) in s.faces() {
                out.add_term(f, sign * a);
            }
        }
        Ok(out)
    }

    /// True iff the boundary vanishes. Every 0-chain is a cycle.
    pub fn is_cycle(&self) -> bool {
        match self.boundary() {
            Ok(b) => b.is_empty(),
            Err(_) => true,
        }
    }

    fn merge(&mut self, other: &Chain, sign: i64) {
        assert_eq!(self.degree, other.degree, "adding chains of different degree");
        for (s, &a) in &other.terms {
            self.add_term(s.clone(), sign * a);
        }
    }
}

impl AddAssign<&Chain> for Chain {
    fn add_assign(&mut self, rhs: &Chain) {
        self.merge(rhs, 1);
    }
}

impl SubAssign<&Chain> for Chain {
    fn sub_assign(&mut self, rhs: &Chain) {
        self.merge(rhs, -1);
    }
}

impl Add<&Chain> for &Chain {
    type Output = Chain;
    fn add(self, rhs: &Chain) -> Chain {
        let mut c = self.clone();
        c += rhs;
        c
    }
}

impl Sub<&Chain> for &Chain {
    type Output = Chain;
    fn sub(self, rhs: &Chain) -> Chain {
        let mut c = self.clone();
        c -= rhs;
        c
    }
}

impl Neg for &Chain {
    type Output = Chain;
    fn neg(self) -> Chain {
        self.scale(-1)
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if *a < 0 { '-' } else { '+' })?;
            } else if *a < 0 {
                write!(f, "-")?;
            }
            if a.abs() != 1 {
                write!(f, "{}·", a.abs())?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn triangle_boundary_is_alternating_face_sum() {
        let c = Chain::from_simplex(s(&[0, 1, 2]), 1);
        let b = c.boundary().unwrap();
        assert_eq!(b.coeff(&s(&[1, 2])), 1);
        assert_eq!(b.coeff(&s(&[0, 2])), -1);
        assert_eq!(b.coeff(&s(&[0, 1])), 1);
        assert_eq!(b.len(), 3);
        assert!(b.boundary().unwrap().is_empty());
    }

    #[test]
    fn coherent_triangles_cancel_shared_edge() {
        // [0,1,2] and [0,2,3] induce opposite orientations on [0,2]
        let mut c = Chain::from_oriented(vec![0, 1, 2], 1).unwrap();
        c += &Chain::from_oriented(vec![0, 2, 3], 1).unwrap();
        let b = c.boundary().unwrap();
        assert_eq!(b.coeff(&s(&[0, 2])), 0);
        assert_eq!(b.len(), 4);
    }

    #[test]
    fn degree_zero_has_no_boundary() {
        let c = Chain::from_simplex(s(&[3]), 2);
        assert_eq!(c.boundary(), Err(Error::DegreeZeroBoundary));
    }

    #[test]
    fn orientation_sign_from_permutation() {
        let (simplex, sign) = Simplex::oriented(vec![2, 0, 1]).unwrap();
        assert_eq!(simplex.vertices(), &[0, 1, 2]);
        assert_eq!(sign, 1);
        let (_, sign) = Simplex::oriented(vec![1, 0, 2]).unwrap();
        assert_eq!(sign, -1);
        assert!(matches!(Simplex::oriented(vec![1, 1]), Err(Error::DegenerateSimplex(_))));
    }

    #[test]
    fn cycles() {
        assert!(!Chain::from_simplex(s(&[0, 1]), 1).is_cycle());
        let loop3 = Chain::from_walk(&[0, 1, 2, 0]).unwrap();
        assert!(loop3.is_cycle());
        let doubled = &Chain::from_walk(&[0, 1]).unwrap() - &Chain::from_walk(&[0, 1]).unwrap();
        assert!(doubled.is_empty());
    }

    #[test]
    fn key_roundtrip() {
        let simplex = s(&[4, 1, 9]);
        assert_eq!(simplex.key(), "1-4-9");
        assert_eq!(Simplex::from_key("1-4-9").unwrap(), simplex);
    }
}
