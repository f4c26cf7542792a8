//! Instances and the shared state of one pipeline run: the global metric,
//! per-subtree nerves and geodesic graphs, and SNF certificates cached per
//! vertex set.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use crate::chain::Chain;
use crate::chart::HarmonicChart;
use crate::complex::WeightedComplex;
use crate::error::{Error, Result};
use crate::homology::{h1_trivial, FillingSolver, SearchConfig, SnfCertificate};
use crate::nerve::{build_nerve, Covering, GeodesicGraph, Nerve, SkeletonMetric};
use crate::scalar::Scalar;

use super::bounds::{bound_calculator, BoundParams, Bounds};
use super::neck::NeckCandidates;
use super::tree::BubbleTree;

/// Everything the pipeline consumes. Coverings and charts are keyed by body id.
#[derive(Clone, Debug)]
pub struct Instance<T> {
    pub complex: WeightedComplex<T>,
    pub tree: BubbleTree,
    pub coverings: BTreeMap<String, Covering<T>>,
    pub charts: BTreeMap<String, HarmonicChart<T>>,
    pub epsilon: f64,
}

impl<T: Scalar> Instance<T> {
    pub fn validate(&self) -> Result<()> {
        self.complex.validate()?;
        self.tree.validate(&self.complex)?;
        for b in self.tree.bodies() {
            let cov = self
                .coverings
                .get(&b.id)
                .ok_or_else(|| Error::TreeInconsistent(format!("body {} has no covering", b.id)))?;
            if cov.is_empty() {
                return Err(Error::TreeInconsistent(format!("covering of body {} is empty", b.id)));
            }
            cov.check_covers(b.vertices.iter().copied())?;
        }
        Ok(())
    }

    pub fn ball_count(&self) -> usize {
        self.coverings.values().map(|c| c.len()).sum()
    }

    /// Bound parameters measured on the instance itself.
    pub fn bound_params(&self, metric: &SkeletonMetric<T>) -> Result<BoundParams> {
        let all: BTreeSet<usize> = metric.vertices().iter().copied().collect();
        Ok(BoundParams {
            n_tilde: self.ball_count() as u64,
            d: metric.diameter_of(&all)?.as_f64(),
            b: BoundParams::b_of_epsilon(self.epsilon),
            k_depth: self.tree.depth() as u64,
            n_width: self.tree.width() as u64,
            h1: self.tree.max_group_order(),
            epsilon: self.epsilon,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    /// Branch-and-bound budget for local minimal fillings.
    pub search: SearchConfig,
    /// Above this many triangles a fallback region is filled without
    /// minimization.
    pub minimize_max_triangles: usize,
    /// Nerves are built up to this dimension.
    pub nerve_cap: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            search: SearchConfig { node_budget: 200, ..SearchConfig::default() },
            minimize_max_triangles: 1500,
            nerve_cap: 2,
        }
    }
}

/// An owned subcomplex with its SNF certificate.
pub struct LocalSolver<T> {
    pub complex: WeightedComplex<T>,
    cert: Option<Arc<SnfCertificate>>,
}

impl<T: Scalar> LocalSolver<T> {
    pub fn new(complex: WeightedComplex<T>) -> Result<Self> {
        let cert = FillingSolver::new(&complex)?.shared_certificate();
        Ok(LocalSolver { complex, cert })
    }

    pub fn solver(&self) -> FillingSolver<'_, T> {
        FillingSolver::with_certificate(&self.complex, self.cert.clone())
    }

    pub fn certificate(&self) -> Option<&SnfCertificate> {
        self.cert.as_deref()
    }
}

/// Balls of one subtree with their nerve and geodesic graph. Ball indices
/// are local to the subtree.
pub struct SubtreeGeometry<T> {
    pub root: String,
    pub vertices: BTreeSet<usize>,
    pub covering: Covering<T>,
    pub ball_body: Vec<String>,
    pub nerve: Nerve<T>,
    pub graph: GeodesicGraph<T>,
    pub nerve_solver: LocalSolver<T>,
}

impl<T: Scalar> SubtreeGeometry<T> {
    pub fn balls_of(&self, body: &str) -> Vec<usize> {
        (0..self.ball_body.len()).filter(|i| self.ball_body[*i] == body).collect()
    }
}

pub struct FillContext<'a, T> {
    pub inst: &'a Instance<T>,
    pub config: PipelineConfig,
    pub metric: SkeletonMetric<T>,
    pub params: BoundParams,
    pub bounds: Bounds,
    all_vertices: BTreeSet<usize>,
    subtrees: Mutex<BTreeMap<String, Arc<SubtreeGeometry<T>>>>,
    solvers: Mutex<HashMap<Vec<usize>, Arc<LocalSolver<T>>>>,
    neck_metrics: Mutex<BTreeMap<String, Arc<SkeletonMetric<T>>>>,
    neck_candidates: Mutex<BTreeMap<String, Arc<NeckCandidates<T>>>>,
}

impl<'a, T: Scalar> FillContext<'a, T> {
    /// Validates the instance and checks `H₁ = 0`.
    pub fn new(inst: &'a Instance<T>, config: PipelineConfig) -> Result<Self> {
        inst.validate()?;
        if !h1_trivial(&inst.complex)? {
            return Err(Error::NontrivialH1);
        }
        let metric = SkeletonMetric::new(&inst.complex);
        let params = inst.bound_params(&metric)?;
        let bounds = bound_calculator(&params)?;
        Ok(FillContext {
            inst,
            config,
            metric,
            params,
            bounds,
            all_vertices: inst.complex.vertices().collect(),
            subtrees: Mutex::new(BTreeMap::new()),
            solvers: Mutex::new(HashMap::new()),
            neck_metrics: Mutex::new(BTreeMap::new()),
            neck_candidates: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn tree(&self) -> &BubbleTree {
        &self.inst.tree
    }

    pub fn all_vertices(&self) -> &BTreeSet<usize> {
        &self.all_vertices
    }

    /// Solver for the subcomplex induced on `vertices`, cached.
    pub fn solver_for(&self, vertices: &BTreeSet<usize>) -> Result<Arc<LocalSolver<T>>> {
        let key: Vec<usize> = vertices.iter().copied().collect();
        if let Some(s) = self.solvers.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let sub =
            if vertices.len() == self.all_vertices.len() { self.inst.complex.clone() } else { self.inst.complex.induced(vertices) };
        let s = Arc::new(LocalSolver::new(sub)?);
        self.solvers.lock().unwrap().insert(key, s.clone());
        Ok(s)
    }

    pub fn global_solver(&self) -> Result<Arc<LocalSolver<T>>> {
        self.solver_for(&self.all_vertices)
    }

    pub fn neck_metric(&self, neck: &str) -> Result<Arc<SkeletonMetric<T>>> {
        if let Some(m) = self.neck_metrics.lock().unwrap().get(neck) {
            return Ok(m.clone());
        }
        let r = self.tree().region(neck)?;
        let m = Arc::new(SkeletonMetric::new(&self.inst.complex.induced(&r.vertices)));
        self.neck_metrics.lock().unwrap().insert(neck.to_string(), m.clone());
        Ok(m)
    }

    /// Candidate neck loops for the child body `body`, cached.
    pub fn neck_candidates(&self, body: &str) -> Result<Arc<NeckCandidates<T>>> {
        if let Some(c) = self.neck_candidates.lock().unwrap().get(body) {
            return Ok(c.clone());
        }
        let c = Arc::new(NeckCandidates::build(self, body)?);
        self.neck_candidates.lock().unwrap().insert(body.to_string(), c.clone());
        Ok(c)
    }

    /// Nerve and geodesic graph of the balls of every body below `body`.
    pub fn subtree(&self, body: &str) -> Result<Arc<SubtreeGeometry<T>>> {
        if let Some(g) = self.subtrees.lock().unwrap().get(body) {
            return Ok(g.clone());
        }
        let tree = self.tree();
        let mut balls = Vec::new();
        let mut ball_body = Vec::new();
        for b in tree.subtree(body) {
            for ball in &self.inst.coverings[b].balls {
                balls.push(ball.clone());
                ball_body.push(b.to_string());
            }
        }
        let covering = Covering { balls };
        let nerve = build_nerve(&covering, self.config.nerve_cap)?;
        let graph = GeodesicGraph::new(&self.metric, &covering, &nerve)?;
        let nerve_solver = LocalSolver::new(nerve.complex.clone())?;
        let g = Arc::new(SubtreeGeometry {
            root: body.to_string(),
            vertices: tree.subtree_vertices(body)?,
            covering,
            ball_body,
            nerve,
            graph,
            nerve_solver,
        });
        self.subtrees.lock().unwrap().insert(body.to_string(), g.clone());
        Ok(g)
    }

    fn best_filling(&self, s: &LocalSolver<T>, z: &Chain) -> Result<Chain> {
        let solver = s.solver();
        let r = if s.complex.count(2) <= self.config.minimize_max_triangles {
            solver.minimal_mass_filling(z, &self.config.search)?
        } else {
            solver.some_filling(z)?
        };
        r.filling.ok_or(Error::DoesNotBound)
    }

    /// Exact filling of `z` in the smallest region that admits one: metric
    /// balls of radius 2r, 4r, 10r about `center`, then `scope`, then the
    /// whole complex.
    pub fn fill_local(&self, z: &Chain, center: usize, r: T, scope: &BTreeSet<usize>) -> Result<Chain> {
        if z.is_empty() {
            return Ok(Chain::zero(2));
        }
        let supp = z.support_vertices();
        for f in [2.0, 4.0, 10.0] {
            let region = self.metric.ball(center, r * T::lit(f))?;
            if region.len() >= scope.len() {
                break;
            }
            if !supp.is_subset(&region) {
                continue;
            }
            let s = self.solver_for(&region)?;
            if s.solver().fills_exist(z)? {
                return self.best_filling(&s, z);
            }
        }
        for region in [scope, &self.all_vertices] {
            if !supp.is_subset(region) {
                continue;
            }
            let s = self.solver_for(region)?;
            if s.solver().fills_exist(z)? {
                return self.best_filling(&s, z);
            }
        }
        Err(Error::DoesNotBound)
    }
}
