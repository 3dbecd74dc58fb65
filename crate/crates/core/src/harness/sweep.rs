//! Cross-product parameter sweeps over a base scenario.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::Value;

use crate::error::HarnessError;

use super::run::{execute, write_atomic};
use super::scenario::Scenario;

/// One swept parameter: a dotted path into the scenario document and the
/// values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub path: String,
    pub values: Vec<Value>,
}

/// Parses `path=v1,v2;path2=v3`. Values are JSON literals where they
/// parse as such, strings otherwise.
pub fn parse_grid(spec: &str) -> Result<Vec<Axis>, HarnessError> {
    let bad = |msg: String| HarnessError::Schema(format!("grid spec: {msg}"));
    let mut axes = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (path, values) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("{part:?} has no '='")))?;
        let path = path.trim();
        if path.is_empty() || path.split('.').any(str::is_empty) {
            return Err(bad(format!("bad path {path:?}")));
        }
        let values: Vec<Value> = values
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string())))
            .collect();
        if values.is_empty() {
            return Err(bad(format!("{path} has no values")));
        }
        axes.push(Axis {
            path: path.to_string(),
            values,
        });
    }
    if axes.is_empty() {
        return Err(bad("no axes".into()));
    }
    Ok(axes)
}

/// Every combination of axis values, first axis slowest.
pub fn cells(axes: &[Axis]) -> Vec<Vec<Value>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v.clone());
                    next
                })
            })
            .collect()
    })
}

/// Sets `path` (dotted) in `doc`, creating intermediate objects.
pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<(), HarnessError> {
    let mut cur = doc;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        if cur.is_null() {
            *cur = Value::Object(Default::default());
        }
        let obj = cur.as_object_mut().ok_or_else(|| {
            HarnessError::Schema(format!("{path}: {} is not an object", keys[..i].join(".")))
        })?;
        if i + 1 == keys.len() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        cur = obj.entry(key.to_string()).or_insert(Value::Null);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub index: usize,
    pub dir: PathBuf,
    pub values: Vec<Value>,
    pub exit_code: i32,
    pub error: Option<String>,
    pub summary: Option<super::metrics::Summary>,
}

impl CellResult {
    fn status(&self) -> &'static str {
        match self.exit_code {
            0 => "ok",
            1 => "assertion_failed",
            2 => "schema_error",
            _ => "runtime_error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub axes: Vec<Axis>,
    pub cells: Vec<CellResult>,
}

impl SweepOutput {
    /// Highest cell exit code: 0 only when every cell passed.
    pub fn exit_code(&self) -> i32 {
        self.cells.iter().map(|c| c.exit_code).max().unwrap_or(0)
    }

    pub fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = vec!["cell".into()];
        header.extend(self.axes.iter().map(|a| a.path.clone()));
        header.extend(
            [
                "status",
                "exit_code",
                "prediction_accuracy",
                "attention_accuracy",
                "path_accuracy",
                "mean_candidate_count",
                "node_count",
                "edge_count",
                "relocations",
                "fallbacks",
                "consolidated_edges",
                "max_phase_error",
                "error",
            ]
            .map(String::from),
        );
        w.write_record(&header).expect("in-memory csv write");
        for c in &self.cells {
            let mut rec: Vec<String> = vec![format!("{:03}", c.index)];
            rec.extend(c.values.iter().map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            }));
            rec.push(c.status().into());
            rec.push(c.exit_code.to_string());
            match &c.summary {
                Some(s) => rec.extend([
                    s.prediction_accuracy.to_string(),
                    s.attention_accuracy.to_string(),
                    s.path_accuracy.to_string(),
                    s.mean_candidate_count.to_string(),
                    s.node_count.to_string(),
                    s.edge_count.to_string(),
                    s.relocations.to_string(),
                    s.fallbacks.to_string(),
                    s.consolidated_edges.to_string(),
                    s.max_phase_error.to_string(),
                ]),
                None => rec.extend(std::iter::repeat_n(String::new(), 10)),
            }
            rec.push(c.error.clone().unwrap_or_default());
            w.write_record(&rec).expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }
}

fn run_cell(
    base: &Value,
    axes: &[Axis],
    index: usize,
    values: Vec<Value>,
    out: &Path,
) -> CellResult {
    let dir = out.join(format!("cell_{index:03}"));
    let mut result = CellResult {
        index,
        dir: dir.clone(),
        values: values.clone(),
        exit_code: 0,
        error: None,
        summary: None,
    };
    let attempt = || -> Result<super::run::RunOutput, HarnessError> {
        let mut doc = base.clone();
        for (axis, v) in axes.iter().zip(values.iter()) {
            set_path(&mut doc, &axis.path, v.clone())?;
        }
        let scenario = Scenario::from_value(doc)?;
        let output = execute(&scenario)?;
        output.write(&dir)?;
        Ok(output)
    };
    match attempt() {
        Ok(output) => {
            result.exit_code = output.exit_code();
            result.summary = Some(output.summary);
        }
        Err(e) => {
            result.exit_code = e.exit_code();
            result.error = Some(e.to_string());
        }
    }
    result
}

/// Runs every cell of the grid, at most `jobs` at a time, into
/// `out/cell_NNN/`, then writes `out/sweep.csv`. A failing cell does not
/// stop the others.
pub fn sweep(
    base: &Value,
    axes: Vec<Axis>,
    out: &Path,
    jobs: usize,
) -> Result<SweepOutput, HarnessError> {
    std::fs::create_dir_all(out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Runtime(format!("thread pool: {e}")))?;
    let combos = cells(&axes);
    let results: Vec<CellResult> = pool.install(|| {
        combos
            .into_par_iter()
            .enumerate()
            .map(|(i, values)| run_cell(base, &axes, i, values, out))
            .collect()
    });
    let output = SweepOutput {
        axes,
        cells: results,
    };
    write_atomic(&out.join("sweep.csv"), &output.csv())?;
    Ok(output)
}

/// [`sweep`] over a scenario file.
pub fn sweep_file(
    path: &Path,
    grid: &str,
    out: &Path,
    jobs: usize,
) -> Result<SweepOutput, HarnessError> {
    let base = Scenario::read_value(path)?;
    sweep(&base, parse_grid(grid)?, out, jobs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn grid_spec_parses_numbers_and_strings() {
        let axes = parse_grid("config.grid.period=2,4; config.strategy=with_reverse,null").unwrap();
        assert_eq!(axes.len(), 2);
        assert_eq!(axes[0].values, vec![json!(2), json!(4)]);
        assert_eq!(axes[1].values, vec![json!("with_reverse"), Value::Null]);
    }

    #[test]
    fn bad_grid_specs() {
        for s in ["", "seed", "seed=", "=1", "a..b=1"] {
            assert_eq!(parse_grid(s).unwrap_err().exit_code(), 2, "{s:?}");
        }
    }

    #[test]
    fn cross_product_order() {
        let axes = parse_grid("a=1,2;b=3,4,5").unwrap();
        let c = cells(&axes);
        assert_eq!(c.len(), 6);
        assert_eq!(c[0], vec![json!(1), json!(3)]);
        assert_eq!(c[5], vec![json!(2), json!(5)]);
    }

    #[test]
    fn set_path_creates_objects() {
        let mut doc = json!({"seed": 1});
        set_path(&mut doc, "config.grid.period", json!(4.0)).unwrap();
        assert_eq!(doc, json!({"seed": 1, "config": {"grid": {"period": 4.0}}}));
        assert!(set_path(&mut doc, "seed.x", json!(1)).is_err());
    }
}
