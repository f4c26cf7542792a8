//! JSON exchange formats and file helpers.
//!
//! Complex: `{"dim", "vertices", "simplices": {"1": [[u,v],..], ..},
//! "volumes": {"u-v": len, ..}}`. Chain: `{"degree", "terms": [{"simplex",
//! "coeff"}]}`. Both round-trip exactly.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::chain::{Chain, Simplex};
use crate::complex::WeightedComplex;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub dim: usize,
    pub vertices: Vec<usize>,
    pub simplices: BTreeMap<String, Vec<Vec<usize>>>,
    pub volumes: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub simplex: Vec<usize>,
    pub coeff: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainJson {
    pub degree: usize,
    pub terms: Vec<TermJson>,
}

pub fn chain_terms(c: &Chain) -> Vec<TermJson> {
    c.iter().map(|(s, a)| TermJson { simplex: s.vertices().to_vec(), coeff: a }).collect()
}

impl From<&Chain> for ChainJson {
    fn from(c: &Chain) -> Self {
        ChainJson { degree: c.degree(), terms: chain_terms(c) }
    }
}

impl ChainJson {
    /// Terms may list vertices in any order; the order sets the orientation.
    pub fn to_chain(&self) -> Result<Chain> {
        let mut c = Chain::zero(self.degree);
        for t in &self.terms {
            if t.simplex.len() != self.degree + 1 {
                return Err(Error::DegreeMismatch {
                    expected: self.degree,
                    found: t.simplex.len().saturating_sub(1),
                });
            }
            c += &Chain::from_oriented(t.simplex.clone(), t.coeff)?;
        }
        Ok(c)
    }
}

impl<T: Scalar> From<&WeightedComplex<T>> for ComplexJson {
    fn from(c: &WeightedComplex<T>) -> Self {
        let mut simplices = BTreeMap::new();
        let mut volumes = BTreeMap::new();
        for k in 1..=c.dim() {
            simplices.insert(k.to_string(), c.simplices(k).iter().map(|s| s.vertices().to_vec()).collect());
            for (s, v) in c.simplices(k).iter().zip(c.volumes(k)) {
                volumes.insert(s.key(), v.as_f64());
            }
        }
        for (s, v) in c.simplices(0).iter().zip(c.volumes(0)) {
            if v.as_f64() != 1.0 {
                volumes.insert(s.key(), v.as_f64());
            }
        }
        ComplexJson { dim: c.dim(), vertices: c.vertices().collect(), simplices, volumes }
    }
}

impl ComplexJson {
    pub fn to_complex<T: Scalar>(&self) -> Result<WeightedComplex<T>> {
        let mut entries = Vec::new();
        let parse_err = |m: String| Error::Parse { context: "complex".into(), message: m };
        for v in &self.vertices {
            entries.push(Simplex::new(vec![*v])?);
        }
        for (k, list) in &self.simplices {
            let k: usize = k.parse().map_err(|_| parse_err(format!("bad dimension key {k:?}")))?;
            for s in list {
                if s.len() != k + 1 {
                    return Err(parse_err(format!("simplex {s:?} listed under dimension {k}")));
                }
                entries.push(Simplex::new(s.clone())?);
            }
        }
        let mut vols: BTreeMap<Simplex, T> = BTreeMap::new();
        for (key, v) in &self.volumes {
            vols.insert(Simplex::from_key(key)?, T::lit(*v));
        }
        let c = WeightedComplex::from_simplices(
            entries.into_iter().map(|s| {
                let v = vols.get(&s).copied();
                (s, v)
            }),
            |s| vols.get(s).copied(),
        )?;
        if c.dim() != self.dim && !(self.dim > c.dim() && c.count(c.dim()) == 0) {
            return Err(parse_err(format!("declared dim {} but found {}", self.dim, c.dim())));
        }
        Ok(c)
    }
}

fn parse_err(context: &Path, e: impl ToString) -> Error {
    Error::Parse { context: context.display().to_string(), message: e.to_string() }
}

/// Reads and deserializes a JSON file; errors carry the path and the
/// line/column of the failure.
pub fn read_json<D: DeserializeOwned>(path: &Path) -> Result<D> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e))
}

/// Writes `bytes` via a temporary file in the same directory and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| parse_err(path, e))?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub fn read_complex<T: Scalar>(path: &Path) -> Result<WeightedComplex<T>> {
    read_json::<ComplexJson>(path)?.to_complex()
}

pub fn write_complex<T: Scalar>(path: &Path, c: &WeightedComplex<T>) -> Result<()> {
    write_json(path, &ComplexJson::from(c))
}

pub fn read_chain(path: &Path) -> Result<Chain> {
    read_json::<ChainJson>(path)?.to_chain()
}

pub fn write_chain(path: &Path, c: &Chain) -> Result<()> {
    write_json(path, &ChainJson::from(c))
}
