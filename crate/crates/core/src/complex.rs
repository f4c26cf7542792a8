//! Finite simplicial complexes with per-simplex volumes.

use std::collections::{BTreeSet, HashMap};

use crate::chain::{Chain, Simplex};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest simplex dimension a complex may carry.
pub const MAX_DIM: usize = 4;

/// A closed family of simplices (dimension ≤ 4) with a volume per simplex.
///
/// Simplices of each dimension are kept sorted; their position in that list
/// is the simplex's index, which is also the row/column index used by the
/// boundary matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedComplex<T> {
    simplices: Vec<Vec<Simplex>>,
    volumes: Vec<Vec<T>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl<T: Scalar> WeightedComplex<T> {
    /// Builds a complex from simplices and their volumes. Faces missing from
    /// `entries` are added with a volume from `default_volume` (called with
    /// the face); vertices default to volume 1.
    pub fn from_simplices<I, F>(entries: I, mut default_volume: F) -> Result<Self>
    where
        I: IntoIterator<Item = (Simplex, Option<T>)>,
        F: FnMut(&Simplex) -> Option<T>,
    {
        let mut given: HashMap<Simplex, T> = HashMap::new();
        let mut all: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); MAX_DIM + 1];
        for (s, vol) in entries {
            if s.dim() > MAX_DIM {
                return Err(Error::InvalidComplex(format!(
                    "simplex {s} has dimension {} > {MAX_DIM}",
                    s.dim()
                )));
            }
            if let Some(v) = vol {
                given.insert(s.clone(), v);
            }
            all[s.dim()].insert(s);
        }
        // closure, top down
        for d in (1..=MAX_DIM).rev() {
            let faces: Vec<Simplex> =
                all[d].iter().flat_map(|s| s.faces().map(|(f, _)| f)).collect();
            all[d - 1].extend(faces);
        }
        while all.len() > 1 && all.last().is_some_and(|s| s.is_empty()) {
            all.pop();
        }
        let mut simplices = Vec::with_capacity(all.len());
        let mut volumes = Vec::with_capacity(all.len());
        for (d, set) in all.into_iter().enumerate() {
            let list: Vec<Simplex> = set.into_iter().collect();
            let mut vols = Vec::with_capacity(list.len());
            for s in &list {
                let v = match given.get(s) {
                    Some(&v) => v,
                    None if d == 0 => T::one(),
                    None => default_volume(s).ok_or_else(|| {
                        Error::InvalidComplex(format!("simplex {s} has no volume"))
                    })?,
                };
                vols.push(v);
            }
            simplices.push(list);
            volumes.push(vols);
        }
        let index = simplices
            .iter()
            .map(|l| l.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        let c = WeightedComplex { simplices, volumes, index };
        c.validate()?;
        Ok(c)
    }

    /// Checks volumes and per-triangle triangle inequalities.
    pub fn validate(&self) -> Result<()> {
        for d in 0..self.simplices.len() {
            for (s, &v) in self.simplices[d].iter().zip(&self.volumes[d]) {
                if !v.is_finite() || v < T::zero() || (d >= 1 && v <= T::zero()) {
                    return Err(Error::InvalidComplex(format!(
                        "simplex {s} has invalid volume {v}"
                    )));
                }
            }
        }
        if self.dim() >= 2 {
            let tol = T::lit(1e-9);
            for t in &self.simplices[2] {
                let v = t.vertices();
                let l = [
                    self.edge_length(v[0], v[1])?,
                    self.edge_length(v[1], v[2])?,
                    self.edge_length(v[0], v[2])?,
                ];
                let sum = l[0] + l[1] + l[2];
                let longest = l[0].max(l[1]).max(l[2]);
                if longest > sum - longest + tol * sum {
                    return Err(Error::InvalidComplex(format!(
                        "triangle inequality fails on {t}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.simplices.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.simplices(0).iter().map(|s| s.vertices()[0])
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s.dim()).and_then(|m| m.get(s).copied())
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.index.first().is_some_and(|m| m.contains_key(&Simplex::from_sorted(vec![v])))
    }

    pub fn volume(&self, s: &Simplex) -> Option<T> {
        self.index_of(s).map(|i| self.volumes[s.dim()][i])
    }

    pub fn volume_at(&self, k: usize, i: usize) -> T {
        self.volumes[k][i]
    }

    pub fn volumes(&self, k: usize) -> &[T] {
        self.volumes.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edge_length(&self, u: usize, v: usize) -> Result<T> {
        let e = Simplex::new(vec![u, v])?;
        self.volume(&e).ok_or_else(|| Error::MissingSimplex(e.vertices().to_vec()))
    }

    /// Replaces one simplex's volume and revalidates.
    pub fn set_volume(&mut self, s: &Simplex, v: T) -> Result<()> {
        let i = self.index_of(s).ok_or_else(|| Error::MissingSimplex(s.vertices().to_vec()))?;
        self.volumes[s.dim()][i] = v;
        self.validate()
    }

    /// Like [`set_volume`](Self::set_volume) but skips validation, for building
    /// negative fixtures.
    pub fn set_volume_unchecked(&mut self, s: &Simplex, v: T) {
        if let Some(i) = self.index_of(s) {
            self.volumes[s.dim()][i] = v;
        }
    }

    /// Errors unless every simplex of `c` lives in this complex.
    pub fn check_chain(&self, c: &Chain) -> Result<()> {
        for (s, _) in c.iter() {
            if !self.contains(s) {
                return Err(Error::MissingSimplex(s.vertices().to_vec()));
            }
        }
        Ok(())
    }

    /// Σ |coefficient(σ)| · volume(σ).
    pub fn mass(&self, c: &Chain) -> T {
        c.iter()
            .map(|(s, a)| {
                let v = self.volume(s).expect("chain simplex outside complex");
                T::from_int(a.abs()) * v
            })
            .sum()
    }

    /// Induced subcomplex on a vertex set: every simplex whose vertices all lie
    /// in `keep`. Vertex ids are preserved, so chains transfer unchanged.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> WeightedComplex<T> {
        let mut simplices = Vec::new();
        let mut volumes = Vec::new();
        for d in 0..self.simplices.len() {
            let mut l = Vec::new();
            let mut v = Vec::new();
            for (s, &vol) in self.simplices[d].iter().zip(&self.volumes[d]) {
                if s.vertices().iter().all(|x| keep.contains(x)) {
                    l.push(s.clone());
                    v.push(vol);
                }
            }
            if l.is_empty() && d > 0 {
                break;
            }
            simplices.push(l);
            volumes.push(v);
        }
        if simplices.is_empty() {
            simplices.push(Vec::new());
            volumes.push(Vec::new());
        }
        let index = simplices
            .iter()
            .map(|l: &Vec<Simplex>| l.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        WeightedComplex { simplices, volumes, index }
    }

    /// Neighbours of each vertex in the 1-skeleton with edge lengths.
    pub fn adjacency(&self) -> HashMap<usize, Vec<(usize, T)>> {
        let mut adj: HashMap<usize, Vec<(usize, T)>> =
            self.vertices().map(|v| (v, Vec::new())).collect();
        for (e, &l) in self.simplices(1).iter().zip(self.volumes(1)) {
            let (a, b) = (e.vertices()[0], e.vertices()[1]);
            adj.get_mut(&a).unwrap().push((b, l));
            adj.get_mut(&b).unwrap().push((a, l));
        }
        for n in adj.values_mut() {
            n.sort_by_key(|x| x.0);
        }
        adj
    }

    /// Converts every volume to another scalar type.
    pub fn cast<U: Scalar>(&self) -> WeightedComplex<U> {
        WeightedComplex {
            simplices: self.simplices.clone(),
            volumes: self
                .volumes
                .iter()
                .map(|l| l.iter().map(|v| U::lit(v.as_f64())).collect())
                .collect(),
            index: self.index.clone(),
        }
    }
}

/// Heron's formula, clamped at zero for round-off.
pub fn heron<T: Scalar>(a: T, b: T, c: T) -> T {
    let s = (a + b + c) / T::lit(2.0);
    let p = s * (s - a) * (s - b) * (s - c);
    p.max(T::zero()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra_boundary() -> WeightedComplex<f64> {
        let faces = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        WeightedComplex::from_simplices(
            faces.iter().map(|f| (Simplex::new(f.to_vec()).unwrap(), Some(1.0))),
            |_| Some(1.0),
        )
        .unwrap()
    }

    #[test]
    fn closure_adds_faces() {
        let c = tetra_boundary();
        assert_eq!(c.dim(), 2);
        assert_eq!((c.count(0), c.count(1), c.count(2)), (4, 6, 4));
    }

    #[test]
    fn mass_examples() {
        let c = tetra_boundary();
        let mut c2 = c.clone();
        let a = Simplex::new(vec![0, 1, 2]).unwrap();
        let b = Simplex::new(vec![0, 1, 3]).unwrap();
        c2.set_volume(&a, 0.5).unwrap();
        assert_eq!(c2.mass(&Chain::zero(2)), 0.0);
        assert_eq!(c2.mass(&Chain::from_simplex(a.clone(), 2)), 1.0);
        c2.set_volume(&a, 1.0).unwrap();
        c2.set_volume(&b, 0.25).unwrap();
        let mut ch = Chain::from_simplex(a, 3);
        ch.add_term(b, -2);
        assert_eq!(c2.mass(&ch), 3.5);
        let _ = c;
    }

    #[test]
    fn rejects_bad_volumes_and_triangle_inequality() {
        let tri = Simplex::new(vec![0, 1, 2]).unwrap();
        let e = |a, b| Simplex::new(vec![a, b]).unwrap();
        let bad = WeightedComplex::<f64>::from_simplices(
            vec![(tri.clone(), Some(1.0)), (e(0, 1), Some(1.0)), (e(1, 2), Some(1.0)), (e(0, 2), Some(5.0))],
            |_| None,
        );
        assert!(bad.is_err());
        let neg = WeightedComplex::<f64>::from_simplices(vec![(tri, Some(-1.0))], |_| Some(1.0));
        assert!(neg.is_err());
    }

    #[test]
    fn generic_over_f32() {
        let c: WeightedComplex<f32> = tetra_boundary().cast();
        let ch = Chain::from_simplex(Simplex::new(vec![1, 2, 3]).unwrap(), -3);
        assert_eq!(c.mass(&ch), 3.0f32);
    }
}
