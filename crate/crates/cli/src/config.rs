//! Run configuration: defaults, optional TOML config file, flags on top.

use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use stakescope::{AllocationMode, PowerBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

/// Fully resolved settings for one invocation: built from defaults, then
/// the optional config file, then command-line flags (flags win).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub format: OutputFormat,
    pub top: Option<usize>,
    pub proxy_depth: usize,
    pub mode: AllocationMode,
    pub basis: PowerBasis,
    pub seed: u64,
    pub r_values: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            format: OutputFormat::Table,
            top: None,
            proxy_depth: 1,
            mode: AllocationMode::GlobalProportional,
            basis: PowerBasis::Stakeholder,
            seed: 42,
            r_values: vec![10, 20, 30],
        }
    }
}

/// Flag values as given on the command line; `None` means "not given".
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub format: Option<OutputFormat>,
    pub top: Option<usize>,
    pub proxy_depth: Option<usize>,
    pub mode: Option<String>,
    pub basis: Option<String>,
    pub seed: Option<u64>,
    pub r_values: Option<Vec<usize>>,
}

/// TOML mirror of the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    format: Option<String>,
    top: Option<usize>,
    proxy_depth: Option<usize>,
    mode: Option<String>,
    basis: Option<String>,
    seed: Option<u64>,
    r: Option<Vec<usize>>,
}

fn parse_basis(s: &str) -> Result<PowerBasis> {
    match s {
        "stakeholder" => Ok(PowerBasis::Stakeholder),
        "witness" => Ok(PowerBasis::Witness),
        other => bail!("unknown basis `{other}` (expected `stakeholder` or `witness`)"),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat> {
    match s {
        "table" => Ok(OutputFormat::Table),
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => bail!("unknown format `{other}` (expected `table`, `csv` or `json`)"),
    }
}

impl RunConfig {
    pub fn resolve(config_path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
        let mut config = RunConfig::default();

        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let file: FileConfig = toml::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?;
            if let Some(format) = &file.format {
                config.format = parse_format(format)?;
            }
            if let Some(top) = file.top {
                config.top = Some(top);
            }
            if let Some(depth) = file.proxy_depth {
                config.proxy_depth = depth;
            }
            if let Some(mode) = &file.mode {
                config.mode = AllocationMode::from_str(mode)?;
            }
            if let Some(basis) = &file.basis {
                config.basis = parse_basis(basis)?;
            }
            if let Some(seed) = file.seed {
                config.seed = seed;
            }
            if let Some(r) = file.r {
                config.r_values = r;
            }
        }

        if let Some(format) = overrides.format {
            config.format = format;
        }
        if let Some(top) = overrides.top {
            config.top = Some(top);
        }
        if let Some(depth) = overrides.proxy_depth {
            config.proxy_depth = depth;
        }
        if let Some(mode) = &overrides.mode {
            config.mode = AllocationMode::from_str(mode)?;
        }
        if let Some(basis) = &overrides.basis {
            config.basis = parse_basis(basis)?;
        }
        if let Some(seed) = overrides.seed {
            config.seed = seed;
        }
        if let Some(r) = &overrides.r_values {
            config.r_values = r.clone();
        }

        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<()> {
        if self.r_values.is_empty() {
            bail!("at least one r value is required");
        }
        if self.r_values.contains(&0) {
            bail!("r values must be positive");
        }
        let mut sorted = self.r_values.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != self.r_values {
            bail!(
                "r values must be sorted ascending without duplicates, got {:?}",
                self.r_values
            );
        }
        Ok(())
    }
}
