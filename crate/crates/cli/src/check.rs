//! Structural validation of an instance directory.

use std::collections::BTreeMap;
use std::path::Path;

use fillbound::chart::{validate_chart, ChartJson};
use fillbound::corpus::dir::{verify_manifest, ParamsJson};
use fillbound::homology::h1_trivial;
use fillbound::io::{read_json, ComplexJson};
use fillbound::nerve::{CoveringJson, SkeletonMetric};
use fillbound::pipeline::{neck_thickness_and_diameter, BoundParams, BubbleTree, RegionKind};
use fillbound::{Complex64, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Item {
    pub name: String,
    pub pass: bool,
    /// Failing items with `gating = false` are reported but do not change
    /// the exit code.
    pub gating: bool,
    pub witness: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub items: Vec<Item>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.pass || !i.gating)
    }

    fn push(&mut self, name: impl Into<String>, pass: bool, witness: impl Into<String>) {
        self.items.push(Item { name: name.into(), pass, gating: true, witness: witness.into() });
    }

    fn info(&mut self, name: impl Into<String>, pass: bool, witness: impl Into<String>) {
        self.items.push(Item { name: name.into(), pass, gating: false, witness: witness.into() });
    }
}

/// Runs every validator. Errors are reserved for unreadable or malformed
/// files; failed invariants land in the report.
pub fn check_dir(dir: &Path) -> Result<CheckReport> {
    let mut rep = CheckReport { items: Vec::new() };
    if dir.join("manifest.json").exists() {
        let bad = verify_manifest(dir)?;
        rep.push("manifest", bad.is_empty(), if bad.is_empty() { String::new() } else { format!("checksum mismatch: {}", bad.join(", ")) });
    }
    let params: ParamsJson = read_json(&dir.join("params.json"))?;
    let cj: ComplexJson = read_json(&dir.join("complex.json"))?;
    let tree: BubbleTree = read_json(&dir.join("tree.json"))?;
    let complex: Complex64 = match cj.to_complex() {
        Ok(c) => {
            rep.push("complex", true, format!("{} vertices, {} edges, {} triangles", c.count(0), c.count(1), c.count(2)));
            c
        }
        Err(e) => {
            rep.push("complex", false, e.to_string());
            return Ok(rep);
        }
    };
    match tree.validate(&complex) {
        Ok(()) => rep.push("tree", true, format!("{} regions, depth {}", tree.regions.len(), tree.depth())),
        Err(e) => rep.push("tree", false, e.to_string()),
    }
    let metric = SkeletonMetric::new(&complex);
    for b in tree.bodies() {
        match &b.covering {
            Some(p) => {
                let cov: CoveringJson = read_json(&dir.join(p))?;
                let r = cov.to_covering(&metric).and_then(|c| {
                    c.check_covers(b.vertices.iter().copied())?;
                    Ok(c.len())
                });
                match r {
                    Ok(n) => rep.push(format!("covering {}", b.id), true, format!("{n} balls")),
                    Err(e) => rep.push(format!("covering {}", b.id), false, e.to_string()),
                }
            }
            None => rep.push(format!("covering {}", b.id), false, "no covering path"),
        }
        match &b.chart {
            Some(p) => {
                let ch: ChartJson = read_json(&dir.join(p))?;
                match ch.to_chart::<f64>() {
                    Ok(ch) => {
                        let v = validate_chart(&ch);
                        let w = match v.worst_sample {
                            Some(i) => format!("metric deviation {:.3e} at sample {i}, bound 1e-3", v.worst_value),
                            None => format!("metric deviation {:.3e}, bound 1e-3", v.worst_value),
                        };
                        rep.push(format!("chart {}", b.id), v.valid, w);
                    }
                    Err(e) => rep.push(format!("chart {}", b.id), false, e.to_string()),
                }
            }
            None => rep.push(format!("chart {}", b.id), false, "no chart path"),
        }
    }
    let bconst = BoundParams::b_of_epsilon(params.epsilon);
    for n in tree.regions.iter().filter(|r| r.kind == RegionKind::Neck) {
        match neck_thickness_and_diameter(&complex, n, bconst) {
            Ok(g) => rep.push(
                format!("neck {}", n.id),
                g.holds,
                format!("diam {:.4} vs B·thick = {:.4}·{:.4}", g.diam, g.b, g.thick),
            ),
            Err(e) => rep.push(format!("neck {}", n.id), false, e.to_string()),
        }
    }
    match h1_trivial(&complex) {
        Ok(t) => rep.info("h1_trivial", t, if t { "H1 = 0" } else { "H1 is nontrivial; fill and hf1 will refuse" }),
        Err(e) => rep.info("h1_trivial", false, e.to_string()),
    }
    Ok(rep)
}

pub fn render_table(rep: &CheckReport) -> String {
    let mut out = String::new();
    let width = rep.items.iter().map(|i| i.name.len()).max().unwrap_or(0);
    for i in &rep.items {
        let status = match (i.pass, i.gating) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "note",
        };
        out += &format!("{status}  {:width$}  {}\n", i.name, i.witness);
    }
    out
}

pub fn render_csv(rep: &CheckReport) -> String {
    let mut out = String::from("name,pass,gating,witness\n");
    for i in &rep.items {
        out += &format!("{},{},{},\"{}\"\n", i.name, i.pass, i.gating, i.witness.replace('"', "'"));
    }
    out
}

/// Parameter map from repeated `key=value` flags.
pub fn parse_params(list: &[String]) -> std::result::Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for kv in list {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("expected key=value, got {kv:?}"))?;
        let x: f64 = v.parse().map_err(|_| format!("parameter {k}: {v:?} is not a number"))?;
        out.insert(k.to_string(), x);
    }
    Ok(out)
}
