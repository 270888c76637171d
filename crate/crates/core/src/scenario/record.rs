//! Serialised phase traces.
//!
//! CSV layout: a header row with [`COLUMNS`], one row per grid point written
//! with 17 significant digits, then footer lines starting with `#`:
//!
//! ```text
//! # name fig1a
//! # diagnostic concurrence 1.1547005383792517e0
//! # diagnostic trace_powers 3.333e-1 1.111e-1 3.7037e-2
//! # warning grid.steps raised from 601 to 602 (must be even)
//! # cycle 2.0943951023931957e0 2.0943951023931957e0 2.0943951023931957e0 1e0 0 -
//! # continuum false
//! ```
//!
//! Cycle fields are `t_cycle phase unwrapped_phase overlap_mag n_A n_B`, with
//! `-` for an unresolved index.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use super::{ScenarioError, ScenarioResult};
use crate::phase::{CycleReport, CyclicEvent, PhaseTrace};

pub const COLUMNS: [&str; 7] = [
    "t",
    "re_overlap",
    "im_overlap",
    "abs_overlap",
    "total_phase",
    "dynamical_phase",
    "geometric_phase",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceRecord {
    pub name: String,
    /// One vector per entry of [`COLUMNS`].
    pub columns: Vec<Vec<f64>>,
    /// Named numeric diagnostics in insertion order.
    pub diagnostics: Vec<(String, Vec<f64>)>,
    pub warnings: Vec<String>,
    pub cycles: Vec<CyclicEvent>,
    pub continuum: bool,
}

fn bad(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Config(msg.into())
}

impl TraceRecord {
    pub fn from_trace(name: &str, trace: &PhaseTrace) -> Self {
        let columns = vec![
            trace.t.clone(),
            trace.overlap.iter().map(|o| o.re).collect(),
            trace.overlap.iter().map(|o| o.im).collect(),
            trace.overlap_mag.clone(),
            trace.total_phase.clone(),
            trace.dynamical_phase.clone(),
            trace.geometric_phase.clone(),
        ];
        Self {
            name: name.to_string(),
            columns,
            ..Self::default()
        }
    }

    pub fn with_cycles(mut self, report: &CycleReport) -> Self {
        self.cycles = report.events.clone();
        self.continuum = report.continuum;
        self
    }

    pub fn push_diagnostic(&mut self, key: &str, values: Vec<f64>) {
        self.diagnostics.push((key.to_string(), values));
    }

    pub fn diagnostic(&self, key: &str) -> Option<&[f64]> {
        self.diagnostics
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_slice())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        COLUMNS
            .iter()
            .position(|c| *c == name)
            .and_then(|i| self.columns.get(i))
            .map(Vec::as_slice)
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COLUMNS).expect("in-memory write");
        for i in 0..self.rows() {
            w.write_record(self.columns.iter().map(|c| format!("{:.16e}", c[i])))
                .expect("in-memory write");
        }
        let mut out = String::from_utf8(w.into_inner().expect("in-memory write")).expect("ascii");
        out.push_str(&format!("# name {}\n", self.name));
        for (key, values) in &self.diagnostics {
            let vals: Vec<String> = values.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&format!("# diagnostic {key} {}\n", vals.join(" ")));
        }
        for warning in &self.warnings {
            out.push_str(&format!("# warning {warning}\n"));
        }
        let index = |n: Option<usize>| n.map_or("-".to_string(), |n| n.to_string());
        for e in &self.cycles {
            out.push_str(&format!(
                "# cycle {:e} {:e} {:e} {:e} {} {}\n",
                e.t_cycle,
                e.phase,
                e.unwrapped_phase,
                e.overlap_mag,
                index(e.n_a),
                index(e.n_b)
            ));
        }
        out.push_str(&format!("# continuum {}\n", self.continuum));
        out
    }

    pub fn from_csv(text: &str) -> ScenarioResult<Self> {
        let mut record = TraceRecord {
            columns: vec![Vec::new(); COLUMNS.len()],
            ..Self::default()
        };
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| bad(format!("csv header: {e}")))?;
        if header.iter().ne(COLUMNS.iter().copied()) {
            return Err(bad(format!("unexpected csv header {header:?}")));
        }
        for (row, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| bad(format!("csv row {row}: {e}")))?;
            if rec.len() != COLUMNS.len() {
                return Err(bad(format!("csv row {row}: {} fields", rec.len())));
            }
            for (col, field) in rec.iter().enumerate() {
                let v = field
                    .parse::<f64>()
                    .map_err(|e| bad(format!("csv row {row}, {}: {e}", COLUMNS[col])))?;
                record.columns[col].push(v);
            }
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| bad(format!("footer value '{s}': {e}")))
        };
        let idx = |s: &str| -> ScenarioResult<Option<usize>> {
            if s == "-" {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|e| bad(format!("footer index '{s}': {e}")))
            }
        };
        for line in text.lines().filter_map(|l| l.strip_prefix("# ")) {
            let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
            match tag {
                "name" => record.name = rest.to_string(),
                "diagnostic" => {
                    let mut parts = rest.split_whitespace();
                    let key = parts.next().ok_or_else(|| bad("empty diagnostic line"))?;
                    let values = parts.map(num).collect::<ScenarioResult<_>>()?;
                    record.diagnostics.push((key.to_string(), values));
                }
                "warning" => record.warnings.push(rest.to_string()),
                "cycle" => {
                    let p: Vec<&str> = rest.split_whitespace().collect();
                    if p.len() != 6 {
                        return Err(bad(format!("cycle line has {} fields", p.len())));
                    }
                    record.cycles.push(CyclicEvent {
                        t_cycle: num(p[0])?,
                        phase: num(p[1])?,
                        unwrapped_phase: num(p[2])?,
                        overlap_mag: num(p[3])?,
                        n_a: idx(p[4])?,
                        n_b: idx(p[5])?,
                    });
                }
                "continuum" => record.continuum = rest == "true",
                other => return Err(bad(format!("unknown footer tag '{other}'"))),
            }
        }
        Ok(record)
    }

    pub fn to_json(&self) -> String {
        let mut columns = Map::new();
        for (name, col) in COLUMNS.iter().zip(&self.columns) {
            columns.insert(name.to_string(), json!(col));
        }
        let diagnostics: Map<String, Value> = self
            .diagnostics
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let cycles: Vec<Value> = self
            .cycles
            .iter()
            .map(|e| {
                json!({
                    "t_cycle": e.t_cycle,
                    "phase": e.phase,
                    "unwrapped_phase": e.unwrapped_phase,
                    "overlap_mag": e.overlap_mag,
                    "n_a": e.n_a,
                    "n_b": e.n_b,
                })
            })
            .collect();
        let doc = json!({
            "name": self.name,
            "columns": columns,
            "diagnostics": diagnostics,
            "warnings": self.warnings,
            "cycles": cycles,
            "continuum": self.continuum,
        });
        serde_json::to_string_pretty(&doc).expect("json values serialise")
    }

    /// Write atomically: a temporary file in the target directory is renamed
    /// over `path`.
    pub fn write(&self, path: &Path, format: Format) -> ScenarioResult<()> {
        let body = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        write_atomic(path, body.as_bytes())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> ScenarioResult<()> {
    let fail = |e: std::io::Error| bad(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.flush().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (csv or json)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TraceRecord {
        let awkward = [0.1, 1.0 / 3.0, -2.0f64.sqrt(), 1e-300, 5e-324, -0.0, 1e300];
        let mut r = TraceRecord {
            name: "sample run".into(),
            columns: (0..7)
                .map(|c| awkward.iter().map(|v| v * (c + 1) as f64).collect())
                .collect(),
            ..Default::default()
        };
        r.push_diagnostic("concurrence", vec![2.0f64.sqrt() / 3.0]);
        r.push_diagnostic("trace_powers", vec![0.1, 0.2 / 3.0, 0.7]);
        r.warnings
            .push("grid.steps raised from 3 to 4 (must be even)".into());
        r.cycles.push(CyclicEvent {
            t_cycle: 2.0 * std::f64::consts::PI / 3.0,
            phase: 0.3,
            unwrapped_phase: -5.9,
            overlap_mag: 1.0 - 1e-12,
            n_a: Some(1),
            n_b: None,
        });
        r
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let r = sample();
        let text = r.to_csv();
        assert!(text.starts_with(
            "t,re_overlap,im_overlap,abs_overlap,total_phase,dynamical_phase,geometric_phase\n"
        ));
        let back = TraceRecord::from_csv(&text).unwrap();
        assert_eq!(back.rows(), r.rows());
        for (a, b) in back
            .columns
            .iter()
            .flatten()
            .zip(r.columns.iter().flatten())
        {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back, r);
    }

    #[test]
    fn json_keys_columns_by_name() {
        let r = sample();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        for name in COLUMNS {
            assert_eq!(v["columns"][name].as_array().unwrap().len(), r.rows());
        }
        assert_eq!(v["cycles"][0]["n_a"], 1);
        assert!(v["cycles"][0]["n_b"].is_null());
    }

    #[test]
    fn rejects_bad_csv() {
        assert!(TraceRecord::from_csv("a,b\n1,2\n").is_err());
        let text = sample().to_csv().replace("# continuum", "# bogus");
        assert!(TraceRecord::from_csv(&text).is_err());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        std::fs::write(&path, "old").unwrap();
        sample().write(&path, Format::Csv).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(TraceRecord::from_csv(&text).unwrap(), sample());
        let missing = dir.path().join("no/such/dir/out.csv");
        assert_eq!(
            sample()
                .write(&missing, Format::Json)
                .unwrap_err()
                .exit_code(),
            2
        );
    }
}
