//! On-disk instance directories.
//!
//! ```text
//! complex.json  tree.json  params.json  manifest.json
//! charts/<body>.json  coverings/<body>.json
//! ```
//!
//! `manifest.json` maps every other file's relative path to its sha256.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chart::ChartJson;
use crate::error::{Error, Result};
use crate::io::{read_complex, read_json, write_complex, write_json};
use crate::nerve::{CoveringJson, SkeletonMetric};
use crate::pipeline::{BubbleTree, Instance};
use crate::scalar::Scalar;

use super::CorpusInstance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub generator: String,
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
    pub epsilon: f64,
    #[serde(default)]
    pub neck_generator: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: BTreeMap<String, String>,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Writes `inst` under `dir`, creating it if needed.
pub fn write_instance(dir: &Path, inst: &CorpusInstance) -> Result<()> {
    let mut files = Vec::new();
    write_complex(&dir.join("complex.json"), &inst.instance.complex)?;
    files.push("complex.json".to_string());
    write_json(&dir.join("tree.json"), &inst.instance.tree)?;
    files.push("tree.json".to_string());
    let p = ParamsJson {
        generator: inst.generator.clone(),
        params: inst.params.clone(),
        seed: inst.seed,
        epsilon: inst.instance.epsilon,
        neck_generator: inst.neck_generator.clone(),
    };
    write_json(&dir.join("params.json"), &p)?;
    files.push("params.json".to_string());
    for (id, c) in &inst.instance.charts {
        let rel = format!("charts/{id}.json");
        write_json(&dir.join(&rel), &ChartJson::from(c))?;
        files.push(rel);
    }
    for (id, c) in &inst.instance.coverings {
        let rel = format!("coverings/{id}.json");
        write_json(&dir.join(&rel), &CoveringJson::from(c))?;
        files.push(rel);
    }
    let mut manifest = Manifest { files: BTreeMap::new() };
    for rel in files {
        manifest.files.insert(rel.clone(), sha256_file(&dir.join(&rel))?);
    }
    write_json(&dir.join("manifest.json"), &manifest)
}

/// Files whose hash differs from the manifest, or that are missing.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let m: Manifest = read_json(&dir.join("manifest.json"))?;
    let mut bad = Vec::new();
    for (rel, hash) in &m.files {
        match sha256_file(&dir.join(rel)) {
            Ok(h) if &h == hash => {}
            _ => bad.push(rel.clone()),
        }
    }
    Ok(bad)
}

/// Reads an instance directory. Charts and coverings are looked up by the
/// paths recorded in the tree, relative to `dir`.
pub fn read_instance<T: Scalar>(dir: &Path) -> Result<(Instance<T>, ParamsJson)> {
    let complex = read_complex::<T>(&dir.join("complex.json"))?;
    let tree: BubbleTree = read_json(&dir.join("tree.json"))?;
    let params: ParamsJson = read_json(&dir.join("params.json"))?;
    let metric = SkeletonMetric::new(&complex);
    let mut coverings = BTreeMap::new();
    let mut charts = BTreeMap::new();
    for b in tree.bodies() {
        let missing = |what: &str| Error::TreeInconsistent(format!("body {} has no {what} path", b.id));
        let cov_path = b.covering.as_ref().ok_or_else(|| missing("covering"))?;
        let cj: CoveringJson = read_json(&dir.join(cov_path))?;
        coverings.insert(b.id.clone(), cj.to_covering(&metric)?);
        let chart_path = b.chart.as_ref().ok_or_else(|| missing("chart"))?;
        let ch: ChartJson = read_json(&dir.join(chart_path))?;
        charts.insert(b.id.clone(), ch.to_chart()?);
    }
    let inst = Instance { complex, tree, coverings, charts, epsilon: params.epsilon };
    inst.validate()?;
    Ok((inst, params))
}
