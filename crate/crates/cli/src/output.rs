//! CSV and JSON rendering plus atomic file output.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use qwalk_core::{CellCut, CellMap, PartitionOrientation, PhasePoint};

use crate::config::{ExperimentConfig, OutputFormat, OutputSpec, PhaseSpaceConfig, SweepParam};
use crate::error::CliError;

/// Observables of one sweep point at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub point: Vec<(SweepParam, f64)>,
    pub time: usize,
    pub msd: f64,
    pub entropy: f64,
    pub pr: f64,
    pub probs: Option<Vec<f64>>,
}

/// 17 significant digits, enough to round-trip any f64.
fn full(x: f64) -> String {
    format!("{x:.16e}")
}

fn map_line(map: &CellMap) -> String {
    match map {
        CellMap::Harper { g, tau } => format!("harper (g={g}, tau={tau})"),
        other => other.name().to_string(),
    }
}

fn experiment_echo(cfg: &ExperimentConfig) -> Vec<(String, String)> {
    let w = &cfg.walk;
    let mut lines = vec![
        ("coin".into(), w.coin.kind.name().to_string()),
        ("M".into(), w.coin.dim.to_string()),
        ("L".into(), w.sites.to_string()),
        ("g".into(), w.coin.g.to_string()),
        ("tau".into(), w.coin.tau.to_string()),
        ("phi".into(), w.coin.phi.to_string()),
        (
            "partition".into(),
            match w.cut {
                CellCut::Horizontal => "horizontal".into(),
                CellCut::Vertical => "vertical".into(),
            },
        ),
        ("t-max".into(), cfg.t_max.to_string()),
    ];
    for s in &cfg.sweep {
        let values: Vec<String> = s.values.iter().map(f64::to_string).collect();
        lines.push((format!("sweep.{}", s.param.name()), values.join(",")));
    }
    match &cfg.classical {
        Some(c) => {
            lines.push(("classical".into(), "true".into()));
            lines.push(("map".into(), map_line(&c.map)));
            let orientation = match c.partition.orientation {
                PartitionOrientation::Horizontal => "horizontal",
                PartitionOrientation::Vertical => "vertical",
            };
            lines.push(("cell-partition".into(), format!("{orientation} at {}", c.partition.threshold)));
            lines.push(("n-points".into(), c.n_points.to_string()));
            lines.push(("seed".into(), c.seed.to_string()));
        }
        None => lines.push(("classical".into(), "false".into())),
    }
    lines.push(("emit-distributions".into(), cfg.emit_distributions.to_string()));
    lines
}

/// Column names, shared by both formats.
pub fn columns(cfg: &ExperimentConfig) -> Vec<String> {
    let mut cols: Vec<String> = cfg.sweep.iter().map(|s| s.param.name().to_string()).collect();
    cols.extend(["time", "msd", "entropy", "pr"].map(String::from));
    if cfg.emit_distributions {
        cols.extend((0..cfg.walk.sites).map(|l| format!("p_{l}")));
    }
    cols
}

fn csv_rows(
    buf: &mut Vec<u8>,
    title: &str,
    echo: &[(String, String)],
    header: &[String],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    writeln!(buf, "# {title}")?;
    for (k, v) in echo {
        writeln!(buf, "# {k} = {v}")?;
    }
    let mut w = csv::Writer::from_writer(buf);
    let csv_err = |e: csv::Error| CliError::Runtime(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn render_experiment(cfg: &ExperimentConfig, records: &[Record]) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match cfg.output.format {
        OutputFormat::Csv => {
            let rows = records.iter().map(|r| {
                let mut row: Vec<String> = r.point.iter().map(|(_, v)| v.to_string()).collect();
                row.push(r.time.to_string());
                row.extend([r.msd, r.entropy, r.pr].map(full));
                if let Some(p) = &r.probs {
                    row.extend(p.iter().copied().map(full));
                }
                row
            });
            csv_rows(&mut buf, "qwalk run", &experiment_echo(cfg), &columns(cfg), rows)?;
        }
        OutputFormat::Json => {
            let recs: Vec<Value> = records
                .iter()
                .map(|r| {
                    let mut obj = Map::new();
                    for (param, v) in &r.point {
                        obj.insert(param.name().into(), json!(v));
                    }
                    obj.insert("time".into(), json!(r.time));
                    obj.insert("msd".into(), json!(r.msd));
                    obj.insert("entropy".into(), json!(r.entropy));
                    obj.insert("pr".into(), json!(r.pr));
                    if let Some(p) = &r.probs {
                        obj.insert("p".into(), json!(p));
                    }
                    Value::Object(obj)
                })
                .collect();
            let doc = json!({ "config": cfg, "columns": columns(cfg), "records": recs });
            serde_json::to_writer_pretty(&mut buf, &doc).map_err(|e| CliError::Runtime(format!("json: {e}")))?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

pub fn render_phase_space(cfg: &PhaseSpaceConfig, points: &[PhasePoint]) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match cfg.output.format {
        OutputFormat::Csv => {
            let echo = vec![
                ("map".to_string(), map_line(&cfg.map)),
                ("trajectories".to_string(), cfg.trajectories.to_string()),
                ("steps".to_string(), cfg.steps.to_string()),
                ("seed".to_string(), cfg.seed.to_string()),
            ];
            let header = vec!["q".to_string(), "p".to_string()];
            let rows = points.iter().map(|pt| vec![full(pt.q()), full(pt.p())]);
            csv_rows(&mut buf, "qwalk phase-space", &echo, &header, rows)?;
        }
        OutputFormat::Json => {
            let pts: Vec<[f64; 2]> = points.iter().map(|pt| [pt.q(), pt.p()]).collect();
            let doc = json!({ "config": cfg, "columns": ["q", "p"], "records": pts });
            serde_json::to_writer(&mut buf, &doc).map_err(|e| CliError::Runtime(format!("json: {e}")))?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

/// Write to the requested file via a temporary sibling so a failed run never
/// leaves a truncated file behind; without a path, write to stdout.
pub fn emit(spec: &OutputSpec, bytes: &[u8]) -> Result<(), CliError> {
    let Some(path) = &spec.path else {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)?;
        return Ok(out.flush()?);
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Runtime(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}
