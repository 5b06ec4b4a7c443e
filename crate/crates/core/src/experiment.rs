//! Configuration-driven experiments and their report files.
//!
//! A config is one JSON document naming an experiment `kind`, a `seed`, an
//! optional tolerance and output directory, and a kind-specific `params`
//! object. Running it writes `report.json` and, for tabular kinds,
//! `table.csv` into the output directory. Both files start from the
//! artifact version and a SHA-256 digest of the resolved config, and are
//! byte-identical across runs with the same config.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::diagnostics::{self, DiscreteFrame, IndexSet, SpaceTag};
use crate::error::Error;
use crate::lp::CoordinateVector;
use crate::par::{self, Execution};
use crate::pettis::estimate_constants;
use crate::sampling::sampling_sweep;
use crate::stepfn::StepFunction;
use crate::translate_frame::{certify, young_check, Generator, GeneratorSpec, RademacherSpec};
use crate::wavelet_frame::{
    box_reconstruct_with, conjugated_reconstruction, convergence_study, WaveletSystem,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MAX_P: f64 = 16.0;
pub const MAX_WINDOW: i64 = 1 << 14;
pub const MAX_M: u32 = 8;
pub const MAX_N: u32 = 16;
pub const MAX_TRIALS: usize = 1_000_000;
pub const DEFAULT_OUT: &str = "framelab-report";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    ValidateGenerator,
    Reconstruct,
    Biorthogonality,
    SuppressionScan,
    YoungFuzz,
    WaveletReconstruct,
    WaveletIdentity,
    Counterexample,
    Diagnostics,
    SamplingSweep,
}

impl Kind {
    pub const ALL: [Kind; 10] = [
        Kind::ValidateGenerator,
        Kind::Reconstruct,
        Kind::Biorthogonality,
        Kind::SuppressionScan,
        Kind::YoungFuzz,
        Kind::WaveletReconstruct,
        Kind::WaveletIdentity,
        Kind::Counterexample,
        Kind::Diagnostics,
        Kind::SamplingSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::ValidateGenerator => "validate-generator",
            Kind::Reconstruct => "reconstruct",
            Kind::Biorthogonality => "biorthogonality",
            Kind::SuppressionScan => "suppression-scan",
            Kind::YoungFuzz => "young-fuzz",
            Kind::WaveletReconstruct => "wavelet-reconstruct",
            Kind::WaveletIdentity => "wavelet-identity",
            Kind::Counterexample => "counterexample",
            Kind::Diagnostics => "diagnostics",
            Kind::SamplingSweep => "sampling-sweep",
        }
    }

    /// Tolerance used when the config gives none.
    pub fn default_tol(self) -> f64 {
        match self {
            Kind::SuppressionScan => 1e-8,
            Kind::YoungFuzz => 1e-12,
            Kind::WaveletReconstruct | Kind::WaveletIdentity => 1e-9,
            _ => 1e-10,
        }
    }
}

impl FromStr for Kind {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| RunError::Config(format!("unknown experiment kind `{s}`")))
    }
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Record wall-clock columns; off by default so reports stay
    /// byte-identical between runs.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default = "empty_object")]
    pub params: Value,
}

impl ExperimentConfig {
    pub fn new(kind: Kind) -> Self {
        ExperimentConfig {
            kind,
            seed: 0,
            tol: None,
            out: None,
            record_timing: false,
            params: empty_object(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, RunError> {
        let text = fs::read_to_string(path).map_err(|source| RunError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            RunError::Config(msg) => RunError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or_else(|| self.kind.default_tol())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    /// 1 for unreadable or invalid configs, 2 for rejected inputs, 3 for a
    /// failed invariant, 4 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Rejected(_) => 2,
            RunError::Invariant(_) => 3,
            RunError::Io { .. } => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Rejected,
    InvariantBreach,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Locale-free number formatting shared by every CSV column.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".into()
    } else if (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KindResult {
    pub status: Status,
    pub message: Option<String>,
    pub summary: Value,
    pub table: Option<Table>,
    pub lines: Vec<String>,
}

impl KindResult {
    fn ok(summary: Value, table: Option<Table>, lines: Vec<String>) -> Self {
        KindResult {
            status: Status::Ok,
            message: None,
            summary,
            table,
            lines,
        }
    }

    fn rejected(message: String, summary: Value) -> Self {
        KindResult {
            status: Status::Rejected,
            lines: vec![format!("rejected: {message}")],
            message: Some(message),
            summary,
            table: None,
        }
    }

    /// Downgrades an ok result when `breach` names a violated assertion.
    fn check(mut self, breach: Option<String>) -> Self {
        if let Some(msg) = breach {
            self.status = Status::InvariantBreach;
            self.lines.push(format!("invariant violated: {msg}"));
            self.message = Some(msg);
        }
        self
    }
}

/// Paths written by a run and its human-readable summary.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub report: PathBuf,
    pub table: Option<PathBuf>,
    pub lines: Vec<String>,
}

fn default_generator() -> GeneratorSpec {
    let a: CoordinateVector = [(0, 0.6), (1, -0.8)].into_iter().collect();
    GeneratorSpec::Rademacher(RademacherSpec::new(a))
}

fn default_p_list() -> Vec<f64> {
    vec![1.5, 2.0, 3.0]
}

fn default_wavelet_x() -> StepFunction {
    StepFunction::indicator(0.0, 0.3).expect("valid interval")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateParams {
    pub generator: GeneratorSpec,
    pub lag_range: Option<u64>,
}

impl Default for ValidateParams {
    fn default() -> Self {
        ValidateParams {
            generator: default_generator(),
            lag_range: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructParams {
    pub generator: GeneratorSpec,
    pub p_list: Vec<f64>,
    pub vectors: usize,
    /// Random vectors are supported on `|n| <= window`.
    pub window: i64,
}

impl Default for ReconstructParams {
    fn default() -> Self {
        ReconstructParams {
            generator: default_generator(),
            p_list: default_p_list(),
            vectors: 100,
            window: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BiorthogonalityParams {
    pub generator: GeneratorSpec,
    pub window: i64,
}

impl Default for BiorthogonalityParams {
    fn default() -> Self {
        BiorthogonalityParams {
            generator: default_generator(),
            window: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuppressionParams {
    pub generator: GeneratorSpec,
    pub p_list: Vec<f64>,
    pub window: i64,
    pub trials: usize,
}

impl Default for SuppressionParams {
    fn default() -> Self {
        SuppressionParams {
            generator: default_generator(),
            p_list: default_p_list(),
            window: 8,
            trials: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct YoungParams {
    pub p_list: Vec<f64>,
    pub draws: usize,
    pub max_cells: usize,
    pub max_coefficients: usize,
}

impl Default for YoungParams {
    fn default() -> Self {
        YoungParams {
            p_list: default_p_list(),
            draws: 200,
            max_cells: 6,
            max_coefficients: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveletReconstructParams {
    pub p: f64,
    pub x: StepFunction,
    pub m_list: Vec<u32>,
    pub n_list: Vec<u32>,
}

impl Default for WaveletReconstructParams {
    fn default() -> Self {
        WaveletReconstructParams {
            p: 2.0,
            x: default_wavelet_x(),
            m_list: vec![1, 2, 3, 4, 5],
            n_list: vec![1, 2, 4],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveletIdentityParams {
    pub p_list: Vec<f64>,
    pub x: StepFunction,
    pub m_list: Vec<u32>,
    pub n_list: Vec<u32>,
}

impl Default for WaveletIdentityParams {
    fn default() -> Self {
        WaveletIdentityParams {
            p_list: default_p_list(),
            x: default_wavelet_x(),
            m_list: vec![1, 2, 3],
            n_list: vec![1, 2, 4],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleParams {
    pub k: u64,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        CounterexampleParams { k: 50 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum FrameSpec {
    UnitVectors { space: SpaceTag, lo: i64, hi: i64 },
    Counterexample { k: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsParams {
    pub frame: FrameSpec,
    /// Defaults to the all-ones functional on the frame window.
    pub functional: Option<CoordinateVector>,
    /// Defaults to the all-ones vector on the frame window.
    pub bidual: Option<CoordinateVector>,
    /// Defaults to eight nested blocks of labels, starting from the empty set.
    pub nesting: Option<Vec<IndexSet>>,
    pub samples: usize,
}

impl Default for DiagnosticsParams {
    fn default() -> Self {
        DiagnosticsParams {
            frame: FrameSpec::UnitVectors {
                space: SpaceTag::C0,
                lo: 1,
                hi: 32,
            },
            functional: None,
            bidual: None,
            nesting: None,
            samples: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingParams {
    pub generator: GeneratorSpec,
    pub window: i64,
    pub p: f64,
    pub h_list: Vec<f64>,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            generator: default_generator(),
            window: 8,
            p: 2.0,
            h_list: vec![0.5, 0.25, 0.125, 0.3, 0.15, 0.075],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Params {
    ValidateGenerator(ValidateParams),
    Reconstruct(ReconstructParams),
    Biorthogonality(BiorthogonalityParams),
    SuppressionScan(SuppressionParams),
    YoungFuzz(YoungParams),
    WaveletReconstruct(WaveletReconstructParams),
    WaveletIdentity(WaveletIdentityParams),
    Counterexample(CounterexampleParams),
    Diagnostics(DiagnosticsParams),
    SamplingSweep(SamplingParams),
}

fn decode<T: DeserializeOwned>(value: &Value) -> Result<T, RunError> {
    serde_json::from_value(value.clone()).map_err(|e| RunError::Config(format!("params: {e}")))
}

fn config_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

fn check_p(p: f64) -> Result<(), RunError> {
    if p > 1.0 && p <= MAX_P {
        Ok(())
    } else {
        Err(config_err(format!("p = {p} outside (1, {MAX_P}]")))
    }
}

fn check_p_list(ps: &[f64]) -> Result<(), RunError> {
    if ps.is_empty() {
        return Err(config_err("p_list must not be empty"));
    }
    ps.iter().try_for_each(|&p| check_p(p))
}

fn check_window(name: &str, k: i64) -> Result<(), RunError> {
    if (1..=MAX_WINDOW).contains(&k) {
        Ok(())
    } else {
        Err(config_err(format!(
            "{name} = {k} outside [1, {MAX_WINDOW}]"
        )))
    }
}

fn check_count(name: &str, n: usize) -> Result<(), RunError> {
    if (1..=MAX_TRIALS).contains(&n) {
        Ok(())
    } else {
        Err(config_err(format!(
            "{name} = {n} outside [1, {MAX_TRIALS}]"
        )))
    }
}

fn check_grid(m_list: &[u32], n_list: &[u32]) -> Result<(), RunError> {
    if m_list.is_empty() || n_list.is_empty() {
        return Err(config_err("m_list and n_list must not be empty"));
    }
    if let Some(m) = m_list.iter().find(|m| !(1..=MAX_M).contains(*m)) {
        return Err(config_err(format!("M = {m} outside [1, {MAX_M}]")));
    }
    if let Some(n) = n_list.iter().find(|n| !(1..=MAX_N).contains(*n)) {
        return Err(config_err(format!("N = {n} outside [1, {MAX_N}]")));
    }
    Ok(())
}

fn check_frame(frame: &FrameSpec) -> Result<(), RunError> {
    match frame {
        FrameSpec::UnitVectors { space, lo, hi } => {
            space.check().map_err(|e| config_err(e.to_string()))?;
            if let SpaceTag::Lp(p) = space {
                check_p(*p)?;
            }
            if lo > hi || hi - lo >= MAX_WINDOW {
                return Err(config_err(format!(
                    "frame window [{lo}, {hi}] is empty or too large"
                )));
            }
            Ok(())
        }
        FrameSpec::Counterexample { k } => check_counterexample_k(*k),
    }
}

fn check_counterexample_k(k: u64) -> Result<(), RunError> {
    if (1..=MAX_WINDOW as u64).contains(&k) {
        Ok(())
    } else {
        Err(config_err(format!("K = {k} outside [1, {MAX_WINDOW}]")))
    }
}

impl Params {
    fn parse(kind: Kind, value: &Value) -> Result<Self, RunError> {
        let params = match kind {
            Kind::ValidateGenerator => Params::ValidateGenerator(decode(value)?),
            Kind::Reconstruct => {
                let p: ReconstructParams = decode(value)?;
                check_p_list(&p.p_list)?;
                check_count("vectors", p.vectors)?;
                check_window("window", p.window)?;
                Params::Reconstruct(p)
            }
            Kind::Biorthogonality => {
                let p: BiorthogonalityParams = decode(value)?;
                check_window("window", p.window)?;
                Params::Biorthogonality(p)
            }
            Kind::SuppressionScan => {
                let p: SuppressionParams = decode(value)?;
                check_p_list(&p.p_list)?;
                check_window("window", p.window)?;
                check_count("trials", p.trials)?;
                Params::SuppressionScan(p)
            }
            Kind::YoungFuzz => {
                let p: YoungParams = decode(value)?;
                check_p_list(&p.p_list)?;
                check_count("draws", p.draws)?;
                check_count("max_cells", p.max_cells)?;
                check_count("max_coefficients", p.max_coefficients)?;
                Params::YoungFuzz(p)
            }
            Kind::WaveletReconstruct => {
                let p: WaveletReconstructParams = decode(value)?;
                check_p(p.p)?;
                check_grid(&p.m_list, &p.n_list)?;
                Params::WaveletReconstruct(p)
            }
            Kind::WaveletIdentity => {
                let p: WaveletIdentityParams = decode(value)?;
                check_p_list(&p.p_list)?;
                check_grid(&p.m_list, &p.n_list)?;
                Params::WaveletIdentity(p)
            }
            Kind::Counterexample => {
                let p: CounterexampleParams = decode(value)?;
                check_counterexample_k(p.k)?;
                Params::Counterexample(p)
            }
            Kind::Diagnostics => {
                let p: DiagnosticsParams = decode(value)?;
                check_frame(&p.frame)?;
                check_count("samples", p.samples)?;
                for set in p.nesting.iter().flatten() {
                    set.check().map_err(|e| config_err(e.to_string()))?;
                }
                Params::Diagnostics(p)
            }
            Kind::SamplingSweep => {
                let p: SamplingParams = decode(value)?;
                check_window("window", p.window)?;
                check_p(p.p)?;
                if let Some(h) = p.h_list.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
                    return Err(config_err(format!("lattice step h = {h} must be positive")));
                }
                Params::SamplingSweep(p)
            }
        };
        Ok(params)
    }

    fn to_value(&self) -> Value {
        let v = match self {
            Params::ValidateGenerator(p) => serde_json::to_value(p),
            Params::Reconstruct(p) => serde_json::to_value(p),
            Params::Biorthogonality(p) => serde_json::to_value(p),
            Params::SuppressionScan(p) => serde_json::to_value(p),
            Params::YoungFuzz(p) => serde_json::to_value(p),
            Params::WaveletReconstruct(p) => serde_json::to_value(p),
            Params::WaveletIdentity(p) => serde_json::to_value(p),
            Params::Counterexample(p) => serde_json::to_value(p),
            Params::Diagnostics(p) => serde_json::to_value(p),
            Params::SamplingSweep(p) => serde_json::to_value(p),
        };
        v.expect("params serialize")
    }
}

/// A parsed, range-checked config with every default filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct Prepared {
    config: ExperimentConfig,
    params: Params,
    tol: f64,
    digest: String,
}

impl Prepared {
    pub fn new(config: &ExperimentConfig) -> Result<Self, RunError> {
        let tol = config.tol();
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(config_err(format!("tol = {tol} must be positive")));
        }
        let params = Params::parse(config.kind, &config.params)?;
        // the output directory is not part of the experiment, so it stays
        // out of the digest
        let canonical = json!({
            "kind": config.kind,
            "seed": config.seed,
            "tol": tol,
            "record_timing": config.record_timing,
            "params": params.to_value(),
        });
        let bytes = Sha256::digest(canonical.to_string().as_bytes());
        let digest = bytes.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Ok(Prepared {
            config: config.clone(),
            params,
            tol,
            digest,
        })
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn resolved_params(&self) -> Value {
        self.params.to_value()
    }

    /// Runs the experiment without touching the filesystem.
    pub fn execute(&self) -> KindResult {
        let seed = self.config.seed;
        let tol = self.tol;
        let timing = self.config.record_timing;
        match &self.params {
            Params::ValidateGenerator(p) => run_validate(p, tol),
            Params::Reconstruct(p) => run_reconstruct(p, seed, tol),
            Params::Biorthogonality(p) => run_biorthogonality(p, tol),
            Params::SuppressionScan(p) => run_suppression(p, seed, tol),
            Params::YoungFuzz(p) => run_young(p, seed, tol),
            Params::WaveletReconstruct(p) => run_wavelet_reconstruct(p, tol, timing),
            Params::WaveletIdentity(p) => run_wavelet_identity(p, tol),
            Params::Counterexample(p) => run_counterexample(p),
            Params::Diagnostics(p) => run_diagnostics(p, seed, tol),
            Params::SamplingSweep(p) => run_sampling(p),
        }
    }

    fn header(&self) -> Vec<String> {
        vec![
            format!("framelab {VERSION} config-digest {}", self.digest),
            format!("kind {} seed {}", self.config.kind.name(), self.config.seed),
        ]
    }

    fn render_csv(&self, table: &Table) -> String {
        let mut out = String::new();
        for line in self.header() {
            out.push_str("# ");
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(&table.header.join(","));
        out.push('\n');
        for row in &table.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self, result: &KindResult) -> String {
        let report = json!({
            "framelab": VERSION,
            "config_digest": self.digest,
            "kind": self.config.kind,
            "seed": self.config.seed,
            "tol": self.tol,
            "params": self.params.to_value(),
            "status": result.status,
            "message": result.message,
            "summary": result.summary,
            "table": result.table.as_ref().map(|_| "table.csv"),
        });
        let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
        text.push('\n');
        text
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    fs::write(path, contents).map_err(|source| RunError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Runs `config`, writing its reports into the output directory. Rejections
/// and invariant breaches still write a report before returning the error.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let prepared = Prepared::new(config)?;
    let result = prepared.execute();
    let dir = config.out_dir();
    fs::create_dir_all(&dir).map_err(|source| RunError::Io {
        path: dir.clone(),
        source,
    })?;
    let report = dir.join("report.json");
    write_file(&report, &prepared.render_json(&result))?;
    let table = match &result.table {
        Some(t) => {
            let path = dir.join("table.csv");
            write_file(&path, &prepared.render_csv(t))?;
            Some(path)
        }
        None => None,
    };
    let message = result.message.clone().unwrap_or_default();
    match result.status {
        Status::Ok => Ok(RunOutcome {
            report,
            table,
            lines: result.lines,
        }),
        Status::Rejected => Err(RunError::Rejected(message)),
        Status::InvariantBreach => Err(RunError::Invariant(message)),
    }
}

fn build_generator(spec: &GeneratorSpec) -> Result<Generator, KindResult> {
    spec.build().map_err(|e| match e {
        Error::GeneratorRejected(report) => {
            let summary = serde_json::to_value(&*report).expect("report serializes");
            KindResult::rejected(report.to_string(), summary)
        }
        other => KindResult::rejected(other.to_string(), Value::Null),
    })
}

fn run_validate(p: &ValidateParams, tol: f64) -> KindResult {
    let f = match &p.generator {
        GeneratorSpec::Step(f) => f.clone(),
        spec @ GeneratorSpec::Rademacher(_) => match build_generator(spec) {
            Ok(g) => g.function().clone(),
            Err(r) => return r,
        },
    };
    let report = certify(&f, p.lag_range, tol);
    let summary = serde_json::to_value(&report).expect("report serializes");
    if !report.is_valid() {
        let mut r = KindResult::rejected(report.to_string(), summary);
        r.table = Some(lag_table(&report.lags));
        return r;
    }
    let lines = vec![
        format!(
            "generator valid: orthonormality residual {:e}",
            report.ortho_residual
        ),
        format!("suppression constant C_s = {}", report.suppression_constant),
    ];
    KindResult::ok(summary, Some(lag_table(&report.lags)), lines)
}

fn lag_table(lags: &[crate::translate_frame::LagInner]) -> Table {
    let mut t = Table::new(&["lag", "inner", "residual"]);
    for l in lags {
        t.push(vec![l.lag.to_string(), num(l.inner), num(l.residual)]);
    }
    t
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_reconstruct(p: &ReconstructParams, seed: u64, tol: f64) -> KindResult {
    let g = match build_generator(&p.generator) {
        Ok(g) => g,
        Err(r) => return r,
    };
    let reach = p.window + g.lag_range() as i64;
    let mut table = Table::new(&["p", "trial", "relative_error"]);
    let mut worst: f64 = 0.0;
    for (pi, &exp) in p.p_list.iter().enumerate() {
        let errors = par::map_range(Execution::default(), p.vectors, |i| {
            let mut rng = trial_rng(seed, (pi * p.vectors + i) as u64);
            let x = CoordinateVector::gaussian(&mut rng, p.window);
            let y = g.synthesis_full_line(&x, reach);
            x.sub(&y).norm(exp) / x.norm(exp)
        });
        for (i, e) in errors.into_iter().enumerate() {
            worst = worst.max(e);
            table.push(vec![num(exp), i.to_string(), num(e)]);
        }
    }
    let summary = json!({ "max_relative_error": worst, "vectors": p.vectors });
    let lines = vec![format!("max relative reconstruction error {worst:e}")];
    let breach = (worst > tol).then(|| format!("relative error {worst:e} exceeds {tol:e}"));
    KindResult::ok(summary, Some(table), lines).check(breach)
}

fn run_biorthogonality(p: &BiorthogonalityParams, tol: f64) -> KindResult {
    let g = match build_generator(&p.generator) {
        Ok(g) => g,
        Err(r) => return r,
    };
    let matrix = g.biorthogonality_matrix(p.window, Execution::default());
    let mut table = Table::new(&["n", "diagonal", "max_off_diagonal"]);
    let mut worst: f64 = 0.0;
    for (i, row) in matrix.iter().enumerate() {
        let off = row
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        worst = worst.max(off).max((row[i] - 1.0).abs());
        table.push(vec![
            (i as i64 - p.window).to_string(),
            num(row[i]),
            num(off),
        ]);
    }
    let size = matrix.len();
    let summary = json!({ "size": size, "max_deviation": worst });
    let lines = vec![format!(
        "{size}x{size} matrix, max deviation from identity {worst:e}"
    )];
    let breach = (worst > tol).then(|| format!("deviation {worst:e} exceeds {tol:e}"));
    KindResult::ok(summary, Some(table), lines).check(breach)
}

fn run_suppression(p: &SuppressionParams, seed: u64, tol: f64) -> KindResult {
    let g = match build_generator(&p.generator) {
        Ok(g) => g,
        Err(r) => return r,
    };
    let mut table = Table::new(&[
        "p",
        "suppression_lower",
        "unconditional_lower",
        "suppression_upper",
        "pairs_used",
    ]);
    let mut rows = Vec::new();
    let mut breach = None;
    for &exp in &p.p_list {
        let est = estimate_constants(&g, p.trials, p.window, exp, seed, Execution::default());
        let cs = est.suppression_upper;
        if est.suppression_lower > cs + tol {
            breach = Some(format!(
                "p = {exp}: B_s lower bound {} exceeds C_s = {cs}",
                est.suppression_lower
            ));
        } else if est.unconditional_lower > 2.0 * cs + tol {
            breach = Some(format!(
                "p = {exp}: B_u lower bound {} exceeds 2 C_s = {}",
                est.unconditional_lower,
                2.0 * cs
            ));
        }
        table.push(vec![
            num(exp),
            num(est.suppression_lower),
            num(est.unconditional_lower),
            num(cs),
            est.pairs_used.to_string(),
        ]);
        rows.push(est);
    }
    let lines = rows
        .iter()
        .zip(&p.p_list)
        .map(|(e, exp)| {
            format!(
                "p = {exp}: B_s in [{}, {}], B_u >= {}",
                e.suppression_lower, e.suppression_upper, e.unconditional_lower
            )
        })
        .collect();
    let summary = serde_json::to_value(&rows).expect("estimates serialize");
    KindResult::ok(summary, Some(table), lines).check(breach)
}

fn random_step_function(rng: &mut ChaCha8Rng, max_cells: usize) -> StepFunction {
    let cells = rng.random_range(1..=max_cells);
    let mut bp = vec![rng.random_range(-1.0..1.0)];
    for _ in 0..cells {
        let last = *bp.last().expect("nonempty");
        bp.push(last + rng.random_range(0.05..1.0));
    }
    let vals = (0..cells).map(|_| rng.random_range(-2.0..2.0)).collect();
    StepFunction::new(bp, vals).expect("increasing breakpoints")
}

fn random_coefficients(rng: &mut ChaCha8Rng, max_coefficients: usize) -> CoordinateVector {
    let count = rng.random_range(1..=max_coefficients);
    (0..count)
        .map(|_| {
            (
                rng.random_range(-4..=4),
                rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect()
}

fn run_young(p: &YoungParams, seed: u64, tol: f64) -> KindResult {
    let mut table = Table::new(&["p", "draw", "lhs", "rhs"]);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_equality: f64 = 0.0;
    for (pi, &exp) in p.p_list.iter().enumerate() {
        let checks = par::map_range(Execution::default(), p.draws, |d| {
            let mut rng = trial_rng(seed, (pi * p.draws + d) as u64);
            let f = random_step_function(&mut rng, p.max_cells);
            let a = random_coefficients(&mut rng, p.max_coefficients);
            young_check(&f, &a, exp)
        });
        for (d, c) in checks.iter().enumerate() {
            if c.rhs > 0.0 {
                worst_ratio = worst_ratio.max(c.lhs / c.rhs);
            }
            table.push(vec![num(exp), d.to_string(), num(c.lhs), num(c.rhs)]);
        }
        // a single indicator of unit length attains the bound
        let mut rng = trial_rng(seed, u64::MAX - pi as u64);
        let a = random_coefficients(&mut rng, p.max_coefficients);
        let eq = young_check(&StepFunction::indicator(0.0, 1.0).expect("valid"), &a, exp);
        worst_equality = worst_equality.max((eq.lhs - eq.rhs).abs() / eq.rhs);
        table.push(vec![num(exp), "indicator".into(), num(eq.lhs), num(eq.rhs)]);
    }
    let summary = json!({
        "max_lhs_over_rhs": worst_ratio,
        "indicator_relative_gap": worst_equality,
    });
    let lines = vec![
        format!("max lhs/rhs over random draws {worst_ratio}"),
        format!("indicator case relative gap {worst_equality:e}"),
    ];
    let breach = if worst_ratio > 1.0 + tol {
        Some(format!("lhs/rhs = {worst_ratio} exceeds 1"))
    } else if worst_equality > tol {
        Some(format!(
            "indicator case misses equality by {worst_equality:e}"
        ))
    } else {
        None
    };
    KindResult::ok(summary, Some(table), lines).check(breach)
}

fn haar_or_reject(p: f64) -> Result<WaveletSystem, KindResult> {
    WaveletSystem::haar(p).map_err(|e| KindResult::rejected(e.to_string(), Value::Null))
}

fn run_wavelet_reconstruct(p: &WaveletReconstructParams, tol: f64, timing: bool) -> KindResult {
    let ws = match haar_or_reject(p.p) {
        Ok(ws) => ws,
        Err(r) => return r,
    };
    let mut rows = convergence_study(&ws, &p.x, &p.m_list, &p.n_list, Execution::default());
    if !timing {
        rows.iter_mut().for_each(|r| r.runtime_ms = 0.0);
    }
    let mut table = Table::new(&["M", "N", "p", "error", "oracle_bound", "runtime_ms"]);
    let mut breach = None;
    for r in &rows {
        if r.error > r.oracle_bound + tol {
            breach = Some(format!(
                "(M, N) = ({}, {}): error {} exceeds oracle bound {}",
                r.m, r.n, r.error, r.oracle_bound
            ));
        }
        table.push(vec![
            r.m.to_string(),
            r.n.to_string(),
            num(r.p),
            num(r.error),
            num(r.oracle_bound),
            num(r.runtime_ms),
        ]);
    }
    let lines = rows
        .iter()
        .map(|r| {
            format!(
                "M = {} N = {}: error {} (bound {})",
                r.m, r.n, r.error, r.oracle_bound
            )
        })
        .collect();
    let summary = serde_json::to_value(&rows).expect("rows serialize");
    KindResult::ok(summary, Some(table), lines).check(breach)
}

fn run_wavelet_identity(p: &WaveletIdentityParams, tol: f64) -> KindResult {
    let mut table = Table::new(&["p", "M", "N", "difference"]);
    let mut worst: f64 = 0.0;
    for &exp in &p.p_list {
        let ws = match haar_or_reject(exp) {
            Ok(ws) => ws,
            Err(r) => return r,
        };
        for &m in &p.m_list {
            for &n in &p.n_list {
                let exec = Execution::default();
                let direct = box_reconstruct_with(&ws, &p.x, m, n, exec);
                let oracle = conjugated_reconstruction(&ws, &p.x, m, n, exec);
                let diff = direct.sub(&oracle).lp_norm(exp);
                worst = worst.max(diff);
                table.push(vec![num(exp), m.to_string(), n.to_string(), num(diff)]);
            }
        }
    }
    let summary = json!({ "max_difference": worst });
    let lines = vec![format!(
        "max L_p distance between the two evaluations {worst:e}"
    )];
    let breach = (worst > tol).then(|| format!("difference {worst:e} exceeds {tol:e}"));
    KindResult::ok(summary, Some(table), lines).check(breach)
}

fn run_counterexample(p: &CounterexampleParams) -> KindResult {
    let report = match diagnostics::counterexample_2_4(p.k) {
        Ok(r) => r,
        Err(e) => return KindResult::rejected(e.to_string(), Value::Null),
    };
    let every_third = IndexSet::Residue {
        modulus: 3,
        residue: 0,
    };
    let candidate =
        diagnostics::counterexample_restricted(p.k, &every_third, &diagnostics::IntVector::unit(1));
    let mut table = Table::new(&["n", "coordinate"]);
    for n in 1..=p.k {
        table.push(vec![n.to_string(), candidate.get(n).to_string()]);
    }
    let lines = vec![
        format!(
            "full-index reconstruction exact for e_1..e_{}: {}",
            p.k, report.full_reconstruction_exact
        ),
        format!(
            "every-third restriction of e_1: {} coordinates, all equal to 1: {}",
            report.restricted_coordinates, report.restricted_all_ones
        ),
        format!(
            "dual series matches direct sum in {}/{} cases",
            report.dual_cases.iter().filter(|c| c.matches).count(),
            report.dual_cases.len()
        ),
    ];
    let breach = (!report.holds()).then(|| "counterexample identities failed".to_string());
    let summary = serde_json::to_value(&report).expect("report serializes");
    KindResult::ok(summary, Some(table), lines).check(breach)
}

fn run_diagnostics(p: &DiagnosticsParams, seed: u64, tol: f64) -> KindResult {
    let built = match &p.frame {
        FrameSpec::UnitVectors { space, lo, hi } => DiscreteFrame::unit_vectors(*space, *lo, *hi),
        FrameSpec::Counterexample { k } => diagnostics::counterexample_frame(*k),
    };
    let frame = match built {
        Ok(f) => f,
        Err(e) => return KindResult::rejected(e.to_string(), Value::Null),
    };
    let (lo, hi) = frame.window().expect("frames here are nonempty");
    let labels: Vec<i64> = frame.pairs().iter().map(|q| q.label).collect();
    let ones: CoordinateVector = (lo..=hi).map(|n| (n, 1.0)).collect();
    let functional = p.functional.clone().unwrap_or_else(|| ones.clone());
    let bidual = p.bidual.clone().unwrap_or(ones);
    let nesting = p.nesting.clone().unwrap_or_else(|| {
        let first = labels[0];
        let width = (labels.len().div_ceil(7) as i64).max(1);
        (0..8)
            .map(|b| IndexSet::Range {
                from: first,
                to: first + b * width - 1,
            })
            .collect()
    });
    let shrinking = diagnostics::shrinking_probe(&frame, &functional, &nesting, tol);
    let cauchy = diagnostics::boundedly_complete_probe(&frame, &bidual, &nesting, tol);
    let (shrinking, cauchy) = match (shrinking, cauchy) {
        (Ok(s), Ok(c)) => (s, c),
        (Err(e), _) | (_, Err(e)) => return KindResult::rejected(e.to_string(), Value::Null),
    };
    let mut table = Table::new(&["set", "tail_dual_norm", "projection_norm", "increment"]);
    for (i, set) in nesting.iter().enumerate() {
        let projection = frame.estimate_projection_norm(set, p.samples, seed);
        let increment = if i == 0 {
            String::new()
        } else {
            num(cauchy.increments[i - 1])
        };
        table.push(vec![
            set.label(),
            num(shrinking.tail_dual_norms[i]),
            num(projection),
            increment,
        ]);
    }
    let reconstruction_error = frame.reconstruction_error(lo, hi);
    let suppression = frame.measured_suppression_constant(p.samples, seed, Execution::default());
    let summary = json!({
        "space": frame.space().label(),
        "pairs": frame.len(),
        "reconstruction_error": reconstruction_error,
        "measured_suppression_constant": suppression,
        "tail_dual_norms": shrinking.tail_dual_norms,
        "non_shrinking": shrinking.non_shrinking,
        "increments": cauchy.increments,
        "non_cauchy": cauchy.non_cauchy,
        "evidence": "finite window",
    });
    let lines = vec![
        format!("{} frame with {} pairs", frame.space().label(), frame.len()),
        format!(
            "tail dual norms {:?}; non-shrinking: {}",
            shrinking.tail_dual_norms, shrinking.non_shrinking
        ),
        format!(
            "increments {:?}; non-Cauchy: {}",
            cauchy.increments, cauchy.non_cauchy
        ),
    ];
    let breach = (reconstruction_error > tol)
        .then(|| format!("frame reconstruction residual {reconstruction_error:e} exceeds {tol:e}"));
    KindResult::ok(summary, Some(table), lines).check(breach)
}

fn run_sampling(p: &SamplingParams) -> KindResult {
    let g = match build_generator(&p.generator) {
        Ok(g) => g,
        Err(r) => return r,
    };
    let rows = match sampling_sweep(&g, &p.h_list, p.window, p.p, Execution::default()) {
        Ok(rows) => rows,
        Err(e) => return KindResult::rejected(e.to_string(), Value::Null),
    };
    let mut table = Table::new(&["h", "num_samples", "max_error", "exact_flag"]);
    for r in &rows {
        table.push(vec![
            num(r.h),
            r.num_samples.to_string(),
            num(r.max_error),
            r.exact.to_string(),
        ]);
    }
    let lines = rows
        .iter()
        .map(|r| {
            format!(
                "h = {}: {} samples, max error {:e}{}",
                r.h,
                r.num_samples,
                r.max_error,
                if r.exact { " (exact)" } else { "" }
            )
        })
        .collect();
    let summary = serde_json::to_value(&rows).expect("rows serialize");
    KindResult::ok(summary, Some(table), lines)
}
