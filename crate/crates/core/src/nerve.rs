//! Skeleton metric, ball coverings, nerves and the geodesic graph Γ.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::chain::{Chain, Simplex};
use crate::complex::WeightedComplex;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default top dimension of a nerve.
pub const NERVE_DIM_CAP: usize = 4;

#[derive(Clone, Copy, PartialEq)]
struct Key<T>(T, usize);

impl<T: Scalar> Eq for Key<T> {}

impl<T: Scalar> PartialOrd for Key<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Key<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.as_f64().total_cmp(&other.0.as_f64()).then(self.1.cmp(&other.1))
    }
}

/// Shortest-path distances on the 1-skeleton, weighted by edge length.
/// Single-source trees are computed on demand and cached.
pub struct SkeletonMetric<T> {
    ids: Vec<usize>,
    pos: HashMap<usize, usize>,
    adj: Vec<Vec<(usize, T)>>,
    cache: Mutex<HashMap<usize, Arc<Vec<T>>>>,
}

impl<T: Scalar> SkeletonMetric<T> {
    pub fn new(complex: &WeightedComplex<T>) -> Self {
        let ids: Vec<usize> = complex.vertices().collect();
        let pos: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for (e, &l) in complex.simplices(1).iter().zip(complex.volumes(1)) {
            let (a, b) = (pos[&e.vertices()[0]], pos[&e.vertices()[1]]);
            adj[a].push((b, l));
            adj[b].push((a, l));
        }
        for n in &mut adj {
            n.sort_by_key(|x| x.0);
        }
        SkeletonMetric { ids, pos, adj, cache: Mutex::new(HashMap::new()) }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.ids
    }

    pub fn contains(&self, v: usize) -> bool {
        self.pos.contains_key(&v)
    }

    fn index(&self, v: usize) -> Result<usize> {
        self.pos.get(&v).copied().ok_or(Error::MissingSimplex(vec![v]))
    }

    /// Distances from `source` to every vertex (`∞` when unreachable),
    /// indexed like [`vertices`](Self::vertices).
    pub fn distances_from(&self, source: usize) -> Result<Arc<Vec<T>>> {
        let s = self.index(source)?;
        if let Some(d) = self.cache.lock().unwrap().get(&s) {
            return Ok(d.clone());
        }
        let mut dist = vec![T::infinity(); self.ids.len()];
        dist[s] = T::zero();
        let mut heap = BinaryHeap::from([Reverse(Key(T::zero(), s))]);
        while let Some(Reverse(Key(d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(w, l) in &self.adj[u] {
                let nd = d + l;
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Reverse(Key(nd, w)));
                }
            }
        }
        let d = Arc::new(dist);
        self.cache.lock().unwrap().insert(s, d.clone());
        Ok(d)
    }

    pub fn dist(&self, u: usize, v: usize) -> Result<T> {
        let d = self.distances_from(v)?;
        Ok(d[self.index(u)?])
    }

    /// Length-minimal vertex path from `u` to `v`; among minimal paths the
    /// lexicographically smallest vertex sequence.
    pub fn shortest_path(&self, u: usize, v: usize) -> Result<(Vec<usize>, T)> {
        let dv = self.distances_from(v)?;
        let (mut cur, target) = (self.index(u)?, self.index(v)?);
        let total = dv[cur];
        if !total.is_finite() {
            return Err(Error::Disconnected(u, v));
        }
        let tol = |x: T| T::lit(1e-12) * (x.abs() + T::one());
        let mut path = vec![u];
        while cur != target {
            // smallest-id neighbour that stays on a shortest path
            let next = self.adj[cur]
                .iter()
                .filter(|(w, l)| (*l + dv[*w] - dv[cur]).abs() <= tol(dv[cur]) && dv[*w] < dv[cur])
                .map(|(w, _)| *w)
                .min_by_key(|w| self.ids[*w])
                .ok_or_else(|| Error::Consistency("shortest-path tree broken".into()))?;
            path.push(self.ids[next]);
            cur = next;
        }
        Ok((path, total))
    }

    /// Largest finite distance between vertices of `set`.
    pub fn diameter_of(&self, set: &BTreeSet<usize>) -> Result<T> {
        let mut best = T::zero();
        for &a in set {
            let d = self.distances_from(a)?;
            for &b in set {
                let x = d[self.index(b)?];
                if !x.is_finite() {
                    return Err(Error::Disconnected(a, b));
                }
                best = best.max(x);
            }
        }
        Ok(best)
    }

    /// Vertices at distance `< radius` from `center`.
    pub fn ball(&self, center: usize, radius: T) -> Result<BTreeSet<usize>> {
        let d = self.distances_from(center)?;
        Ok(self.ids.iter().zip(d.iter()).filter(|(_, x)| **x < radius).map(|(v, _)| *v).collect())
    }
}

/// One ball of a covering.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball<T> {
    pub center: usize,
    pub radius: T,
    pub region: String,
    pub members: BTreeSet<usize>,
}

/// A family of metric balls on the skeleton.
#[derive(Clone, Debug, PartialEq)]
pub struct Covering<T> {
    pub balls: Vec<Ball<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallJson {
    pub center: usize,
    pub radius: f64,
    #[serde(default)]
    pub region: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringJson {
    pub balls: Vec<BallJson>,
}

impl<T: Scalar> From<&Covering<T>> for CoveringJson {
    fn from(c: &Covering<T>) -> Self {
        CoveringJson {
            balls: c
                .balls
                .iter()
                .map(|b| BallJson { center: b.center, radius: b.radius.as_f64(), region: b.region.clone() })
                .collect(),
        }
    }
}

impl CoveringJson {
    /// Recomputes member sets; coverage is not checked here.
    pub fn to_covering<T: Scalar>(&self, metric: &SkeletonMetric<T>) -> Result<Covering<T>> {
        let balls = self
            .balls
            .iter()
            .map(|b| {
                let r = T::lit(b.radius);
                Ok(Ball { center: b.center, radius: r, region: b.region.clone(), members: metric.ball(b.center, r)? })
            })
            .collect::<Result<_>>()?;
        Ok(Covering { balls })
    }
}

/// Balls around `centers` with the given radii; every metric vertex must be
/// covered, otherwise the uncovered vertices are reported.
pub fn build_covering<T: Scalar>(
    metric: &SkeletonMetric<T>,
    centers: &[usize],
    radii: &[T],
    region: &str,
) -> Result<Covering<T>> {
    if centers.len() != radii.len() {
        return Err(Error::InvalidParams("centers and radii differ in length".into()));
    }
    let mut balls = Vec::with_capacity(centers.len());
    for (&c, &r) in centers.iter().zip(radii) {
        if !(r > T::zero()) {
            return Err(Error::InvalidParams(format!("radius {r} is not positive")));
        }
        balls.push(Ball { center: c, radius: r, region: region.to_string(), members: metric.ball(c, r)? });
    }
    let cov = Covering { balls };
    cov.check_covers(metric.vertices().iter().copied())?;
    Ok(cov)
}

impl<T: Scalar> Covering<T> {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn centers(&self) -> Vec<usize> {
        self.balls.iter().map(|b| b.center).collect()
    }

    pub fn check_covers(&self, vertices: impl IntoIterator<Item = usize>) -> Result<()> {
        let covered: BTreeSet<usize> = self.balls.iter().flat_map(|b| b.members.iter().copied()).collect();
        let missing: Vec<usize> = vertices.into_iter().filter(|v| !covered.contains(v)).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Uncovered(missing))
        }
    }

    /// Indices of the balls containing `v`.
    pub fn balls_containing(&self, v: usize) -> Vec<usize> {
        self.balls.iter().enumerate().filter(|(_, b)| b.members.contains(&v)).map(|(i, _)| i).collect()
    }
}

/// Nerve simplex spanned by exactly the balls that contain `v`.
pub fn natural_map<T: Scalar>(v: usize, cov: &Covering<T>) -> Result<Simplex> {
    let balls = cov.balls_containing(v);
    if balls.is_empty() {
        return Err(Error::Uncovered(vec![v]));
    }
    Simplex::new(balls)
}

/// The nerve as a simplicial complex on ball indices, unit volumes.
#[derive(Clone, Debug)]
pub struct Nerve<T> {
    pub complex: WeightedComplex<T>,
    pub cap: usize,
}

fn subsets_up_to(set: &[usize], max_len: usize, out: &mut BTreeSet<Simplex>) {
    fn rec(set: &[usize], start: usize, cur: &mut Vec<usize>, max_len: usize, out: &mut BTreeSet<Simplex>) {
        if !cur.is_empty() {
            out.insert(Simplex::new(cur.clone()).expect("distinct"));
        }
        if cur.len() == max_len {
            return;
        }
        for i in start..set.len() {
            cur.push(set[i]);
            rec(set, i + 1, cur, max_len, out);
            cur.pop();
        }
    }
    rec(set, 0, &mut Vec::new(), max_len, out);
}

/// Nerve up to dimension `min(Ñ − 1, cap)`. A simplex is present iff some
/// vertex lies in all of its balls.
pub fn build_nerve<T: Scalar>(cov: &Covering<T>, cap: usize) -> Result<Nerve<T>> {
    let cap = cap.min(crate::complex::MAX_DIM).min(cov.len().saturating_sub(1));
    let mut witness: BTreeSet<Vec<usize>> = BTreeSet::new();
    for b in &cov.balls {
        for &v in &b.members {
            witness.insert(cov.balls_containing(v));
        }
    }
    let mut simplices = BTreeSet::new();
    for i in 0..cov.len() {
        simplices.insert(Simplex::new(vec![i])?);
    }
    for w in &witness {
        subsets_up_to(w, cap + 1, &mut simplices);
    }
    let complex = WeightedComplex::from_simplices(simplices.into_iter().map(|s| (s, Some(T::one()))), |_| {
        Some(T::one())
    })?;
    Ok(Nerve { complex, cap })
}

/// Γ: ball centers joined by fixed shortest paths for every intersecting pair.
#[derive(Clone, Debug)]
pub struct GeodesicGraph<T> {
    pub centers: Vec<usize>,
    /// `(i, j)` with `i < j` ↦ vertex path from center i to center j and its length.
    pub edges: BTreeMap<(usize, usize), (Vec<usize>, T)>,
}

impl<T: Scalar> GeodesicGraph<T> {
    /// One Γ-edge per nerve 1-simplex.
    pub fn new(metric: &SkeletonMetric<T>, cov: &Covering<T>, nerve: &Nerve<T>) -> Result<Self> {
        let centers = cov.centers();
        let mut edges = BTreeMap::new();
        for e in nerve.complex.simplices(1) {
            let (i, j) = (e.vertices()[0], e.vertices()[1]);
            let p = metric.shortest_path(centers[i], centers[j])?;
            edges.insert((i, j), p);
        }
        Ok(GeodesicGraph { centers, edges })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The complex 1-chain of the oriented Γ-edge `i → j`.
    pub fn edge_chain(&self, i: usize, j: usize) -> Result<Chain> {
        let (a, b, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
        let (path, _) = self
            .edges
            .get(&(a, b))
            .ok_or_else(|| Error::Consistency(format!("no Γ-edge between balls {i} and {j}")))?;
        Ok(Chain::from_walk(path)?.scale(sign))
    }

    pub fn edge_length(&self, i: usize, j: usize) -> Option<T> {
        self.edges.get(&(i.min(j), i.max(j))).map(|e| e.1)
    }

    /// Complex 1-cycle of the geodesic triangle `P_ij + P_jk − P_ik`.
    pub fn triangle_chain(&self, tri: &Simplex) -> Result<Chain> {
        let v = tri.vertices();
        let mut c = self.edge_chain(v[0], v[1])?;
        c += &self.edge_chain(v[1], v[2])?;
        c -= &self.edge_chain(v[0], v[2])?;
        Ok(c)
    }
}

/// Integer combination of oriented Γ-edges, stored on `(i, j)` with `i < j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphChain {
    terms: BTreeMap<(usize, usize), i64>,
}

impl GraphChain {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coeff` copies of the edge `i → j`; loops `i → i` are dropped.
    pub fn add_edge(&mut self, i: usize, j: usize, coeff: i64) {
        if i == j || coeff == 0 {
            return;
        }
        let (k, c) = if i < j { ((i, j), coeff) } else { ((j, i), -coeff) };
        let e = self.terms.entry(k).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&k);
        }
    }

    /// The walk `b₀ → b₁ → …` over ball indices.
    pub fn from_walk(walk: &[usize]) -> Self {
        let mut g = GraphChain::new();
        for w in walk.windows(2) {
            g.add_edge(w[0], w[1], 1);
        }
        g
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of Γ-segments counted with multiplicity.
    pub fn simplicial_length(&self) -> i64 {
        self.terms.values().map(|a| a.abs()).sum()
    }

    pub fn is_cycle(&self) -> bool {
        let mut deg: BTreeMap<usize, i64> = BTreeMap::new();
        for (&(i, j), &a) in &self.terms {
            *deg.entry(i).or_default() -= a;
            *deg.entry(j).or_default() += a;
        }
        deg.values().all(|d| *d == 0)
    }

    /// Realizes the chain in the complex via the stored geodesics.
    pub fn to_complex_chain<T: Scalar>(&self, graph: &GeodesicGraph<T>) -> Result<Chain> {
        let mut c = Chain::zero(1);
        for (&(i, j), &a) in &self.terms {
            c += &graph.edge_chain(i, j)?.scale(a);
        }
        Ok(c)
    }

    pub fn mass<T: Scalar>(&self, graph: &GeodesicGraph<T>) -> Result<T> {
        let mut m = T::zero();
        for (&(i, j), &a) in &self.terms {
            let l = graph
                .edge_length(i, j)
                .ok_or_else(|| Error::Consistency(format!("no Γ-edge between balls {i} and {j}")))?;
            m += T::from_int(a.abs()) * l;
        }
        Ok(m)
    }
}

/// `E_ij ↦ {i, j}`; simplicial length is preserved.
pub fn graph_cycle_to_nerve<T: Scalar>(c: &GraphChain, nerve: &Nerve<T>) -> Result<Chain> {
    let mut out = Chain::zero(1);
    for ((i, j), a) in c.iter() {
        let e = Simplex::new(vec![i, j])?;
        if !nerve.complex.contains(&e) {
            return Err(Error::Consistency(format!("Γ-edge {i}-{j} has no nerve edge")));
        }
        out.add_term(e, a);
    }
    Ok(out)
}

/// A geodesic triangle of Γ with signed multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicTriangle {
    pub balls: Simplex,
    pub multiplicity: i64,
}

/// Each nerve 2-simplex `{i,j,k}` becomes the triangle `(E_ij, E_jk, E_ki)`.
pub fn nerve_filling_to_triangles<T: Scalar>(f: &Chain, graph: &GeodesicGraph<T>) -> Result<Vec<GeodesicTriangle>> {
    if f.degree() != 2 {
        return Err(Error::DegreeMismatch { expected: 2, found: f.degree() });
    }
    let mut out = Vec::with_capacity(f.len());
    for (s, a) in f.iter() {
        let v = s.vertices();
        for (x, y) in [(v[0], v[1]), (v[1], v[2]), (v[0], v[2])] {
            if graph.edge_length(x, y).is_none() {
                return Err(Error::Consistency(format!("nerve triangle {s} lacks Γ-edge {x}-{y}")));
            }
        }
        out.push(GeodesicTriangle { balls: s.clone(), multiplicity: a });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn graph(edges: &[(usize, usize, f64)]) -> WeightedComplex<f64> {
        WeightedComplex::from_simplices(edges.iter().map(|&(a, b, l)| (s(&[a, b]), Some(l))), |_| None).unwrap()
    }

    #[test]
    fn shortest_path_examples() {
        let c = graph(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 10.0)]);
        let m = SkeletonMetric::new(&c);
        assert_eq!(m.shortest_path(2, 2).unwrap(), (vec![2], 0.0));
        assert_eq!(m.shortest_path(0, 1).unwrap(), (vec![0, 1], 1.0));
        assert_eq!(m.shortest_path(0, 3).unwrap(), (vec![0, 1, 2, 3], 3.0));
        let d = graph(&[(0, 1, 1.0), (2, 3, 1.0)]);
        assert_eq!(SkeletonMetric::new(&d).shortest_path(0, 3), Err(Error::Disconnected(0, 3)));
    }

    #[test]
    fn lexicographic_tie_break() {
        // square 0-1-3, 0-2-3 of equal length
        let c = graph(&[(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)]);
        let m = SkeletonMetric::new(&c);
        assert_eq!(m.shortest_path(0, 3).unwrap().0, vec![0, 1, 3]);
        assert_eq!(m.shortest_path(3, 0).unwrap().0, vec![3, 1, 0]);
    }

    #[test]
    fn coverings_and_nerves() {
        let c = graph(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]);
        let m = SkeletonMetric::new(&c);
        let all = build_covering(&m, &[2], &[10.0], "B").unwrap();
        assert_eq!(all.balls[0].members.len(), 5);
        let tiny = build_covering(&m, &[0, 4], &[0.5, 0.5], "B");
        assert_eq!(tiny, Err(Error::Uncovered(vec![1, 2, 3])));

        let cov = Covering {
            balls: vec![
                Ball { center: 0, radius: 1.5, region: String::new(), members: m.ball(0, 1.5).unwrap() },
                Ball { center: 4, radius: 1.5, region: String::new(), members: m.ball(4, 1.5).unwrap() },
            ],
        };
        let n = build_nerve(&cov, NERVE_DIM_CAP).unwrap();
        assert_eq!((n.complex.count(0), n.complex.count(1)), (2, 0));

        let cov = build_covering(&m, &[0, 2, 4], &[1.5, 1.5, 1.5], "B").unwrap();
        let n = build_nerve(&cov, NERVE_DIM_CAP).unwrap();
        assert_eq!(n.complex.simplices(1), &[s(&[0, 1]), s(&[1, 2])]);
        assert_eq!(natural_map(1, &cov).unwrap(), s(&[0, 1]));
        assert_eq!(natural_map(0, &cov).unwrap(), s(&[0]));

        let cov = build_covering(&m, &[1, 2, 3], &[1.5, 1.5, 1.5], "B").unwrap();
        let n = build_nerve(&cov, NERVE_DIM_CAP).unwrap();
        assert_eq!(n.complex.simplices(2), &[s(&[0, 1, 2])]);
        assert_eq!(natural_map(2, &cov).unwrap(), s(&[0, 1, 2]));
        let g = GeodesicGraph::new(&m, &cov, &n).unwrap();
        assert!(g.edge_count() <= 9);
        let tris = nerve_filling_to_triangles(&Chain::from_simplex(s(&[0, 1, 2]), 2), &g).unwrap();
        assert_eq!(tris, vec![GeodesicTriangle { balls: s(&[0, 1, 2]), multiplicity: 2 }]);
        // the triangle loop in a tree degenerates to zero
        assert!(g.triangle_chain(&s(&[0, 1, 2])).unwrap().is_empty());
    }

    #[test]
    fn graph_chain_transfer() {
        let tri = GraphChain::from_walk(&[1, 2, 3, 1]);
        assert!(tri.is_cycle());
        assert_eq!(tri.simplicial_length(), 3);
        let mut d = GraphChain::from_walk(&[1, 2]);
        d.add_edge(1, 2, -1);
        assert!(d.is_empty());
        let n: Nerve<f64> = Nerve {
            complex: WeightedComplex::from_simplices([(s(&[1, 2, 3]), Some(1.0))], |_| Some(1.0)).unwrap(),
            cap: 4,
        };
        let nc = graph_cycle_to_nerve(&tri, &n).unwrap();
        assert!(nc.is_cycle());
        assert_eq!(nc.l1(), 3);
        assert!(graph_cycle_to_nerve(&GraphChain::new(), &n).unwrap().is_empty());
    }
}
