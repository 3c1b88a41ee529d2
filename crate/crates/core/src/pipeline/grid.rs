//! Hyperparameter sweep over a JSON grid file.
//!
//! A grid file maps parameter names to value lists:
//!
//! ```json
//! { "algorithm": "gbt", "learning_rate": [0.05, 0.1, 0.2], "max_depth": [5, 8, 10] }
//! ```
//!
//! or, to sweep several algorithms at once, maps algorithm names to such
//! objects:
//!
//! ```json
//! {
//!   "dt":  { "max_depth": [6, 7, 10, 12], "criterion": ["gini", "entropy"] },
//!   "gbt": { "learning_rate": [0.05, 0.1, 0.2], "max_depth": [5, 8, 10] }
//! }
//! ```
//!
//! Parameters left out keep their base values. `lr`, `depth` and `rounds` are
//! accepted as short names.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{Map, Value};

use super::{encoded_dataset, AlignedSentence};
use crate::classifier::{cross_validate, Algorithm, Criterion, GbtParams, ModelParams, TreeParams};
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::ingest::EmbeddingTable;
use crate::pairgen::FilterRuleSet;

/// Every parameter combination of a grid file. Keys are expanded in name
/// order with the last key varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    cells: Vec<ModelParams>,
}

fn canonical(key: &str) -> &str {
    match key {
        "lr" => "learning_rate",
        "depth" => "max_depth",
        "rounds" => "n_rounds",
        "min_split" => "min_samples_split",
        other => other,
    }
}

fn config_err(msg: String) -> Error {
    Error::Config(format!("grid file: {msg}"))
}

fn as_usize(key: &str, v: &Value) -> Result<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| config_err(format!("{key} expects non-negative integers, got {v}")))
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| config_err(format!("{key} expects numbers, got {v}")))
}

fn set_param(params: &mut ModelParams, key: &str, v: &Value) -> Result<()> {
    match (params, key) {
        (ModelParams::Dt(p), "max_depth") => p.max_depth = as_usize(key, v)?,
        (ModelParams::Dt(p), "min_samples_split") => p.min_samples_split = as_usize(key, v)?,
        (ModelParams::Dt(p), "criterion") => {
            let s = v
                .as_str()
                .ok_or_else(|| config_err(format!("criterion expects strings, got {v}")))?;
            p.criterion = s.parse::<Criterion>()?;
        }
        (ModelParams::Gbt(p), "learning_rate") => p.learning_rate = as_f64(key, v)?,
        (ModelParams::Gbt(p), "max_depth") => p.max_depth = as_usize(key, v)?,
        (ModelParams::Gbt(p), "n_rounds") => p.n_rounds = as_usize(key, v)?,
        (ModelParams::Gbt(p), "l2_leaf_penalty") => p.l2_leaf_penalty = as_f64(key, v)?,
        (p, _) => {
            return Err(config_err(format!(
                "unknown parameter {key:?} for {}",
                p.algorithm()
            )))
        }
    }
    Ok(())
}

fn validate(p: &ModelParams) -> Result<()> {
    match p {
        ModelParams::Dt(t) => t.validate(),
        ModelParams::Gbt(g) => g.validate(),
    }
}

fn expand(algorithm: Algorithm, obj: &Map<String, Value>, dt: &TreeParams, gbt: &GbtParams) -> Result<Vec<ModelParams>> {
    algorithm.ensure_supported()?;
    let base = match algorithm {
        Algorithm::Dt => ModelParams::Dt(dt.clone()),
        _ => ModelParams::Gbt(gbt.clone()),
    };
    let mut cells = vec![base];
    for (key, values) in obj {
        if key == "algorithm" {
            continue;
        }
        let values: Vec<&Value> = match values {
            Value::Array(vs) => vs.iter().collect(),
            v => vec![v],
        };
        if values.is_empty() {
            return Err(config_err(format!("{key} has an empty value list")));
        }
        let key = canonical(key);
        let mut next = Vec::with_capacity(cells.len() * values.len());
        for cell in &cells {
            for v in &values {
                let mut c = cell.clone();
                set_param(&mut c, key, v)?;
                next.push(c);
            }
        }
        cells = next;
    }
    for c in &cells {
        validate(c)?;
    }
    Ok(cells)
}

impl GridSpec {
    /// Parses a grid file. `algorithm` applies to flat files without an
    /// `"algorithm"` key; `dt` and `gbt` supply values for parameters the
    /// file does not sweep.
    pub fn from_json(text: &str, algorithm: Algorithm, dt: &TreeParams, gbt: &GbtParams) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| config_err(format!("invalid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| config_err("top level must be an object".into()))?;
        let nested = !obj.is_empty() && obj.keys().all(|k| k.parse::<Algorithm>().is_ok());
        let mut cells = Vec::new();
        if nested {
            for (name, inner) in obj {
                let inner = inner
                    .as_object()
                    .ok_or_else(|| config_err(format!("{name} must map to an object")))?;
                cells.extend(expand(name.parse()?, inner, dt, gbt)?);
            }
        } else {
            let algorithm = match obj.get("algorithm") {
                Some(Value::String(s)) => s.parse()?,
                Some(v) => return Err(config_err(format!("algorithm must be a string, got {v}"))),
                None => algorithm,
            };
            cells = expand(algorithm, obj, dt, gbt)?;
        }
        Ok(GridSpec { cells })
    }

    pub fn cells(&self) -> &[ModelParams] {
        &self.cells
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridCell {
    pub rank: usize,
    /// Position in the grid expansion.
    pub cell: usize,
    pub params: ModelParams,
    pub accuracy: f64,
    pub f1_macro: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub k: usize,
    pub seed: u64,
    pub features: FeatureConfig,
    pub rules: String,
    /// Best mean F1-macro first; ties keep grid order.
    pub cells: Vec<GridCell>,
}

impl GridReport {
    pub fn best(&self) -> Option<&GridCell> {
        self.cells.first()
    }
}

/// Cross-validates every grid cell on the same folds and ranks them by mean
/// F1-macro.
pub fn run_grid(
    corpus: &[AlignedSentence],
    embeddings: Option<Arc<EmbeddingTable>>,
    rules: &FilterRuleSet,
    features: &FeatureConfig,
    grid: &GridSpec,
    k: usize,
    seed: u64,
) -> Result<GridReport> {
    let (_, _, ds) = encoded_dataset(corpus, rules, features, embeddings)?;
    let mut cells = Vec::with_capacity(grid.cells.len());
    for (i, params) in grid.cells.iter().enumerate() {
        let cv = cross_validate(&ds, params, k, seed)?;
        cells.push(GridCell {
            rank: 0,
            cell: i,
            params: params.clone(),
            accuracy: cv.mean_accuracy,
            f1_macro: cv.mean_f1_macro,
        });
    }
    cells.sort_by(|a, b| b.f1_macro.total_cmp(&a.f1_macro).then(a.cell.cmp(&b.cell)));
    for (r, c) in cells.iter_mut().enumerate() {
        c.rank = r + 1;
    }
    Ok(GridReport {
        k,
        seed,
        features: features.clone(),
        rules: rules.name(),
        cells,
    })
}

pub fn render_grid(r: &GridReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# features={} rules={} k={} seed={}", r.features, r.rules, r.k, r.seed);
    out.push_str("rank\tmodel\taccuracy\tf1_macro\n");
    for c in &r.cells {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6}",
            c.rank,
            c.params.describe(),
            c.accuracy,
            c.f1_macro
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<GridSpec> {
        GridSpec::from_json(text, Algorithm::Gbt, &TreeParams::default(), &GbtParams::default())
    }

    #[test]
    fn flat_grid_expands_to_the_product() {
        let g = parse(r#"{"lr": [0.05, 0.1], "depth": [5, 8]}"#).unwrap();
        assert_eq!(g.cells().len(), 4);
        let described: Vec<String> = g.cells().iter().map(ModelParams::describe).collect();
        assert_eq!(
            described,
            vec![
                "gbt(learning_rate=0.05,max_depth=5,n_rounds=100)",
                "gbt(learning_rate=0.1,max_depth=5,n_rounds=100)",
                "gbt(learning_rate=0.05,max_depth=8,n_rounds=100)",
                "gbt(learning_rate=0.1,max_depth=8,n_rounds=100)",
            ]
        );
    }

    #[test]
    fn nested_grid_covers_both_algorithms() {
        let g = parse(
            r#"{"dt": {"max_depth": [6, 7, 10, 12], "criterion": ["gini", "entropy"]},
                "gbt": {"learning_rate": [0.05, 0.1, 0.2], "max_depth": [5, 8, 10]}}"#,
        )
        .unwrap();
        assert_eq!(g.cells().len(), 8 + 9);
        assert_eq!(g.cells()[0].algorithm(), Algorithm::Dt);
        assert_eq!(g.cells()[16].algorithm(), Algorithm::Gbt);
    }

    #[test]
    fn bad_grids_are_config_errors() {
        for text in [
            "[1, 2]",
            "{\"lr\": []}",
            "{\"criterion\": [\"gini\"]}",
            "{\"algorithm\": \"dt\", \"lr\": [0.1]}",
            "{\"lr\": [2.0]}",
            "{\"ffnn\": {\"units\": [50]}}",
            "{",
        ] {
            let e = parse(text).unwrap_err();
            assert!(e.is_config(), "{text}: {e}");
        }
    }
}
