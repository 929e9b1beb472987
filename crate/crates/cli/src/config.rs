//! Experiment configuration: a flat `key = value` file merged with
//! command-line overrides, resolved into typed settings.
//!
//! File syntax, one entry per line, `#` starts a comment:
//!
//! ```text
//! coin = harper
//! M = 40
//! L = 100
//! t-max = 40
//! sweep.g = 0.05, 2
//! sweep.phi = 0, 0.2
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use qwalk_core::{CellCut, CellMap, CellPartition, CoinKind, CoinSpec, PartitionOrientation, WalkConfig};

use crate::error::CliError;

/// Raw settings keyed by their command-line flag name (without `--`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawSettings {
    values: BTreeMap<String, String>,
    sweeps: Vec<(String, String)>,
}

impl RawSettings {
    pub fn parse_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let mut raw = RawSettings::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config("config", format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key.strip_prefix("sweep.") {
                Some(param) => raw.set_sweep(param, value),
                None => raw.set(key, value),
            }
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(normalize_key(key), value.into());
    }

    /// A sweep entry replaces any earlier entry for the same parameter.
    pub fn set_sweep(&mut self, param: &str, values: impl Into<String>) {
        let param = param.trim().to_string();
        let values = values.into();
        match self.sweeps.iter_mut().find(|(p, _)| *p == param) {
            Some(slot) => slot.1 = values,
            None => self.sweeps.push((param, values)),
        }
    }

    /// Parse a command-line `--sweep NAME=v1,v2,...` entry.
    pub fn add_sweep_arg(&mut self, arg: &str) -> Result<(), CliError> {
        let (param, values) = arg
            .split_once('=')
            .ok_or_else(|| CliError::config("sweep", format!("expected NAME=v1,v2,..., got `{arg}`")))?;
        self.set_sweep(param, values);
        Ok(())
    }

    /// Overlay `other` on top of `self`; `other` wins on conflicts.
    pub fn merge(mut self, other: RawSettings) -> Self {
        self.values.extend(other.values);
        for (p, v) in other.sweeps {
            self.set_sweep(&p, v);
        }
        self
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| CliError::config(key, format!("cannot parse `{v}`: {e}"))),
        }
    }

    fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.get(key) {
            None => Ok(false),
            Some("true" | "yes" | "1" | "") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(CliError::config(key, format!("expected true or false, got `{v}`"))),
        }
    }

    fn check_known(&self, known: &[&str]) -> Result<(), CliError> {
        match self.values.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(CliError::config(k, "unknown setting")),
            None => Ok(()),
        }
    }
}

fn normalize_key(key: &str) -> String {
    let key = key.trim().replace('_', "-");
    match key.as_str() {
        "m" => "M".to_string(),
        "l" => "L".to_string(),
        _ => key,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSpec {
    pub format: OutputFormat,
    /// `None` writes to standard output.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    #[serde(rename = "M")]
    CoinDim,
    #[serde(rename = "g")]
    Chaos,
    #[serde(rename = "phi")]
    Phase,
    #[serde(rename = "L")]
    Sites,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::CoinDim => "M",
            SweepParam::Chaos => "g",
            SweepParam::Phase => "phi",
            SweepParam::Sites => "L",
        }
    }

    fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "M" | "m" => Ok(SweepParam::CoinDim),
            "g" => Ok(SweepParam::Chaos),
            "phi" => Ok(SweepParam::Phase),
            "L" | "l" => Ok(SweepParam::Sites),
            other => Err(CliError::config("sweep", format!("cannot sweep `{other}` (M, g, phi or L)"))),
        }
    }

    fn check(self, v: f64) -> Result<(), String> {
        let ok = match self {
            SweepParam::CoinDim => v.fract() == 0.0 && v >= 2.0 && (v as usize).is_multiple_of(2),
            SweepParam::Chaos => v.is_finite() && v >= 0.0,
            SweepParam::Phase => (0.0..1.0).contains(&v),
            SweepParam::Sites => v.fract() == 0.0 && v >= 2.0,
        };
        if ok {
            return Ok(());
        }
        Err(match self {
            SweepParam::CoinDim => format!("{v} is not a positive even integer"),
            SweepParam::Chaos => format!("{v} is negative or not finite"),
            SweepParam::Phase => format!("{v} is outside [0, 1)"),
            SweepParam::Sites => format!("{v} is not an integer >= 2"),
        })
    }

    pub fn apply(self, walk: &mut WalkConfig, v: f64) {
        match self {
            SweepParam::CoinDim => walk.coin.dim = v as usize,
            SweepParam::Chaos => walk.coin.g = v,
            SweepParam::Phase => walk.coin.phi = v,
            SweepParam::Sites => walk.sites = v as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalSettings {
    pub map: CellMap,
    pub partition: CellPartition,
    pub n_points: usize,
    pub seed: u64,
}

/// Fully resolved settings for `run`/`sweep`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub walk: WalkConfig,
    pub t_max: usize,
    pub sweep: Vec<Sweep>,
    pub classical: Option<ClassicalSettings>,
    pub emit_distributions: bool,
    pub output: OutputSpec,
}

const RUN_KEYS: &[&str] = &[
    "coin",
    "M",
    "L",
    "g",
    "tau",
    "phi",
    "t-max",
    "partition",
    "format",
    "out",
    "seed",
    "classical",
    "n-points",
    "emit-distributions",
];

fn positive_real(raw: &RawSettings, key: &str, default: f64) -> Result<f64, CliError> {
    let v: f64 = raw.parse(key, default)?;
    if !(v.is_finite() && v > 0.0) {
        return Err(CliError::config(key, format!("must be positive, got {v}")));
    }
    Ok(v)
}

impl ExperimentConfig {
    pub fn resolve(raw: &RawSettings) -> Result<Self, CliError> {
        raw.check_known(RUN_KEYS)?;
        let kind: CoinKind = raw.parse("coin", CoinKind::Dft)?;
        let dim: usize = raw.parse("M", 2)?;
        let sites: usize = raw.parse("L", 100)?;
        let g: f64 = raw.parse("g", 0.0)?;
        let tau = positive_real(raw, "tau", 1.0)?;
        let default_phi = if kind == CoinKind::Baker { 0.5 } else { 0.0 };
        let phi: f64 = raw.parse("phi", default_phi)?;
        let cut: CellCut = raw.parse("partition", CellCut::Horizontal)?;
        let t_max: usize = raw.parse("t-max", 40)?;
        let format: OutputFormat = raw.parse("format", OutputFormat::Csv)?;
        let seed: u64 = raw.parse("seed", 0)?;
        let n_points: usize = raw.parse("n-points", 100_000)?;
        let classical = raw.flag("classical")?;
        let emit_distributions = raw.flag("emit-distributions")?;

        if dim < 2 || !dim.is_multiple_of(2) {
            return Err(CliError::config("M", format!("must be a positive even integer, got {dim}")));
        }
        if sites < 2 {
            return Err(CliError::config("L", format!("must be at least 2, got {sites}")));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(CliError::config("g", format!("must be non-negative, got {g}")));
        }
        if !(0.0..1.0).contains(&phi) {
            return Err(CliError::config("phi", format!("must lie in [0, 1), got {phi}")));
        }
        if t_max == 0 {
            return Err(CliError::config("t-max", "must be at least 1"));
        }
        if classical && n_points == 0 {
            return Err(CliError::config("n-points", "must be at least 1"));
        }

        let mut sweep = Vec::new();
        for (name, list) in &raw.sweeps {
            let param = SweepParam::parse(name)?;
            let field = format!("sweep.{}", param.name());
            if sweep.iter().any(|s: &Sweep| s.param == param) {
                return Err(CliError::config(&field, "given twice"));
            }
            let mut values = Vec::new();
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let v: f64 =
                    item.parse().map_err(|e| CliError::config(&field, format!("cannot parse `{item}`: {e}")))?;
                param.check(v).map_err(|msg| CliError::config(&field, msg))?;
                values.push(v);
            }
            if values.is_empty() {
                return Err(CliError::config(&field, "no values"));
            }
            values.sort_by(f64::total_cmp);
            values.dedup();
            sweep.push(Sweep { param, values });
        }
        if emit_distributions && sweep.iter().any(|s| s.param == SweepParam::Sites) {
            return Err(CliError::config("emit-distributions", "cannot be combined with a sweep over L"));
        }

        let coin = CoinSpec { kind, dim, g, tau, phi };
        let walk = WalkConfig::new(sites, coin).with_cut(cut);
        let classical = classical.then(|| ClassicalSettings {
            map: coin.classical_map(),
            partition: match cut {
                CellCut::Horizontal => CellPartition::default(),
                CellCut::Vertical => CellPartition { orientation: PartitionOrientation::Vertical, threshold: 0.5 },
            },
            n_points,
            seed,
        });
        let output = OutputSpec { format, path: raw.get("out").filter(|p| *p != "-").map(PathBuf::from) };
        Ok(ExperimentConfig { walk, t_max, sweep, classical, emit_distributions, output })
    }

    /// Every combination of sweep values, in lexicographic order of the
    /// sweeps as given with each value list ascending.
    pub fn sweep_points(&self) -> Vec<Vec<(SweepParam, f64)>> {
        let mut points: Vec<Vec<(SweepParam, f64)>> = vec![Vec::new()];
        for s in &self.sweep {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    s.values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push((s.param, v));
                        p
                    })
                })
                .collect();
        }
        points
    }

    pub fn walk_at(&self, point: &[(SweepParam, f64)]) -> WalkConfig {
        let mut walk = self.walk;
        for &(param, v) in point {
            param.apply(&mut walk, v);
        }
        walk
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapChoice {
    Rotation,
    Baker,
    Harper,
}

impl FromStr for MapChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rotation" | "dft" => Ok(MapChoice::Rotation),
            "baker" => Ok(MapChoice::Baker),
            "harper" => Ok(MapChoice::Harper),
            other => Err(format!("unknown map `{other}` (rotation, baker or harper)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSpaceConfig {
    pub map: CellMap,
    pub trajectories: usize,
    pub steps: usize,
    pub seed: u64,
    pub output: OutputSpec,
}

const PHASE_KEYS: &[&str] = &["map", "g", "tau", "trajectories", "steps", "seed", "format", "out"];

impl PhaseSpaceConfig {
    pub fn resolve(raw: &RawSettings) -> Result<Self, CliError> {
        raw.check_known(PHASE_KEYS)?;
        let choice: MapChoice = raw.parse("map", MapChoice::Harper)?;
        let g: f64 = raw.parse("g", 1.0)?;
        let tau = positive_real(raw, "tau", 1.0)?;
        if !(g.is_finite() && g >= 0.0) {
            return Err(CliError::config("g", format!("must be non-negative, got {g}")));
        }
        let trajectories: usize = raw.parse("trajectories", 100)?;
        let steps: usize = raw.parse("steps", 1000)?;
        if trajectories == 0 {
            return Err(CliError::config("trajectories", "must be at least 1"));
        }
        if steps == 0 {
            return Err(CliError::config("steps", "must be at least 1"));
        }
        let map = match choice {
            MapChoice::Rotation => CellMap::Rotation,
            MapChoice::Baker => CellMap::Baker,
            MapChoice::Harper => CellMap::Harper { g, tau },
        };
        Ok(PhaseSpaceConfig {
            map,
            trajectories,
            steps,
            seed: raw.parse("seed", 0)?,
            output: OutputSpec {
                format: raw.parse("format", OutputFormat::Csv)?,
                path: raw.get("out").filter(|p| *p != "-").map(PathBuf::from),
            },
        })
    }
}
