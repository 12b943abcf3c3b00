//! `qtst` command-line front end: configuration, dispatch and artifact
//! writing. The binary in `main.rs` is a thin wrapper around [`run`].

pub mod artifact;
pub mod commands;
pub mod config;

use std::fmt;
use std::path::{Path, PathBuf};

pub use artifact::{config_hash, Artifact, Payload, Provenance};
pub use config::{Command, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad configuration or arguments; nothing was written.
    Validation(String),
    /// Numerical or I/O failure.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_FAILURE,
        }
    }

    /// Core errors that describe the inputs are validation errors; the rest
    /// are numerical failures. `section` names the config table involved.
    pub fn from_core(section: &str, e: qtst_core::Error) -> Self {
        use qtst_core::Error as E;
        let msg = format!("[{section}] {e}");
        match e {
            E::InvalidParameter { .. } | E::BeadCountMismatch { .. } | E::Unsupported(_) => {
                CliError::Validation(msg)
            }
            E::SingularSurface(_)
            | E::NonConvergence(_)
            | E::DivergentWindow(_)
            | E::GridNotConverged { .. } => CliError::Runtime(msg),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub command: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub command: Command,
    pub out_dir: PathBuf,
    pub written: Vec<PathBuf>,
    /// Set when the only problem is an HA divergence flag.
    pub divergence: bool,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.divergence {
            EXIT_DIVERGENCE
        } else {
            EXIT_OK
        }
    }
}

/// Loads the configuration, applies overrides and resolves defaults.
pub fn load_config(ov: &Overrides) -> Result<RunConfig, CliError> {
    let mut cfg = match &ov.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read config {}: {e}", path.display()))
            })?;
            RunConfig::from_toml(&text)
                .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(name) = &ov.command {
        cfg.command = Some(Command::parse(name).ok_or_else(|| {
            let names: Vec<&str> = Command::ALL.iter().map(|c| c.name()).collect();
            CliError::Validation(format!(
                "--command: unknown command `{name}`, expected one of {}",
                names.join(", ")
            ))
        })?);
    }
    if let Some(seed) = ov.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &ov.out {
        cfg.out = Some(out.clone());
    }
    if cfg.command.is_none() {
        return Err(CliError::Validation(
            "missing key `command` (set it in the config or pass --command)".into(),
        ));
    }
    cfg.resolve();
    Ok(cfg)
}

/// Runs the configured command and writes its artifacts. Nothing is written
/// unless the whole computation succeeded.
pub fn run(ov: &Overrides) -> Result<RunOutcome, CliError> {
    let cfg = load_config(ov)?;
    let command = cfg.command.expect("resolved config has a command");
    let out = commands::execute(&cfg)?;
    let out_dir = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let prov = Provenance::new(&cfg);
    let written = write_all(&out_dir, &out.artifacts, &prov)?;
    Ok(RunOutcome {
        command,
        out_dir,
        written,
        divergence: out.divergence,
    })
}

fn write_all(
    dir: &Path,
    artifacts: &[Artifact],
    prov: &Provenance,
) -> Result<Vec<PathBuf>, CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Runtime(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let path = dir.join(&a.file_name);
        std::fs::write(&path, a.render(prov)).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
