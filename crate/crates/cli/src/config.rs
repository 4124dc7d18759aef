//! Flag parsing, the `key = value` config file, and resolution into a
//! [`RunConfig`]. Flags always override the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use hardy_lab::geometry::{GroupSpec, NormKind, QuasiNormSpec};
use hardy_lab::quadrature::RadialGrid;
use hardy_lab::{Error, Result};

pub const DEFAULT_SEED: u64 = 20261016;
pub const DEFAULT_SAMPLES: usize = 200_000;
pub const DEFAULT_RANDOM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Euclid,
    Sup,
    Koranyi,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// r1, r2, rn:N, aniso:v1,..,vN or heis1
    #[arg(long)]
    pub group: Option<String>,
    /// Defaults to euclid for isotropic groups, sup for aniso, koranyi for heis1
    #[arg(long, value_enum)]
    pub norm: Option<NormArg>,
    /// Work on the half-line instead of a group
    #[arg(long = "1d")]
    pub one_d: bool,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Checked against the scaling relation; derived from alpha when absent
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub grid_nodes: Option<usize>,
    #[arg(long)]
    pub grid_min: Option<f64>,
    #[arg(long)]
    pub grid_max: Option<f64>,
    /// Monte Carlo samples for single-level estimators
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat `key = value` file; keys are the long flag names
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Homogeneous group selected on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupChoice {
    pub label: String,
    pub spec: GroupSpec,
    pub default_norm: NormKind,
}

pub fn parse_group(s: &str) -> Result<GroupChoice> {
    let s = s.trim();
    let (spec, default_norm) = match s {
        "r1" => (GroupSpec::euclidean(1)?, NormKind::EuclideanIsotropic),
        "r2" => (GroupSpec::euclidean(2)?, NormKind::EuclideanIsotropic),
        "heis1" => (GroupSpec::heisenberg(), NormKind::KoranyiH1),
        _ => {
            if let Some(n) = s.strip_prefix("rn:") {
                let n: usize = n.trim().parse().map_err(|_| {
                    Error::InvalidInput(format!("rn:N needs a positive integer, got `{s}`"))
                })?;
                (GroupSpec::euclidean(n)?, NormKind::EuclideanIsotropic)
            } else if let Some(v) = s.strip_prefix("aniso:") {
                let exps = v
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| {
                        Error::InvalidInput(format!(
                            "aniso: expects comma-separated numbers, got `{s}`"
                        ))
                    })?;
                (GroupSpec::new(exps)?, NormKind::AnisotropicSup)
            } else {
                return Err(Error::InvalidInput(format!(
                    "unknown group `{s}` (expected r1, r2, rn:N, aniso:v1,..,vN, heis1)"
                )));
            }
        }
    };
    Ok(GroupChoice {
        label: s.to_string(),
        spec,
        default_norm,
    })
}

/// Everything a command needs, after merging flags and config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub group: Option<GroupChoice>,
    pub norm: Option<QuasiNormSpec>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub grid: RadialGrid,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Remaining config-file keys, for command-specific settings.
    pub extra: BTreeMap<String, String>,
}

impl RunConfig {
    /// Homogeneous dimension of the selected group (1 on the half-line).
    pub fn q_dim(&self) -> f64 {
        self.group.as_ref().map_or(1.0, |g| g.spec.q())
    }

    pub fn require(&self, name: &str, v: Option<f64>) -> Result<f64> {
        v.ok_or_else(|| Error::InvalidInput(format!("--{name} is required")))
    }

    /// Command-specific value from the config file, parsed.
    pub fn extra<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.extra
            .get(key)
            .map(|v| {
                v.parse().map_err(|_| {
                    Error::InvalidInput(format!("config key `{key}` has invalid value `{v}`"))
                })
            })
            .transpose()
    }
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!("config line {}: expected `key = value`", i + 1))
        })?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

fn take<T: FromStr>(file: &mut BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match file.remove(key) {
        None => Ok(None),
        Some(v) => v.parse().map(Some).map_err(|_| {
            Error::InvalidInput(format!("config key `{key}` has invalid value `{v}`"))
        }),
    }
}

fn take_bool(file: &mut BTreeMap<String, String>, key: &str) -> Result<bool> {
    Ok(take::<bool>(file, key)?.unwrap_or(false))
}

fn norm_spec(arg: NormArg) -> QuasiNormSpec {
    match arg {
        NormArg::Euclid => QuasiNormSpec::euclidean(),
        NormArg::Sup => QuasiNormSpec::sup(),
        NormArg::Koranyi => QuasiNormSpec::koranyi(),
    }
}

fn parse_norm(s: &str) -> Result<NormArg> {
    NormArg::from_str(s, true).map_err(|_| Error::InvalidInput(format!("unknown norm `{s}`")))
}

fn parse_format(s: &str) -> Result<Format> {
    Format::from_str(s, true).map_err(|_| Error::InvalidInput(format!("unknown format `{s}`")))
}

impl CommonArgs {
    /// Merges flags over the config file. Without `--1d` the group defaults
    /// to `r2`.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let one_d = self.one_d || take_bool(&mut file, "1d")?;
        let group_str = self.group.clone().or(file.remove("group"));
        let norm_arg = match self.norm {
            Some(n) => Some(n),
            None => file.remove("norm").map(|s| parse_norm(&s)).transpose()?,
        };
        let (group, norm) = if one_d {
            if group_str.is_some() {
                return Err(Error::InvalidInput(
                    "--1d and --group are mutually exclusive".into(),
                ));
            }
            (None, None)
        } else {
            let g = parse_group(group_str.as_deref().unwrap_or("r2"))?;
            let n = match norm_arg {
                Some(a) => norm_spec(a),
                None => QuasiNormSpec::new(g.default_norm),
            };
            n.check(&g.spec)?;
            (Some(g), Some(n))
        };

        let p = self
            .p
            .map_or_else(|| take(&mut file, "p"), |v| Ok(Some(v)))?;
        let q = self
            .q
            .map_or_else(|| take(&mut file, "q"), |v| Ok(Some(v)))?
            .or(p);
        let alpha = self
            .alpha
            .map_or_else(|| take(&mut file, "alpha"), |v| Ok(Some(v)))?;
        let beta = self
            .beta
            .map_or_else(|| take(&mut file, "beta"), |v| Ok(Some(v)))?;
        let nodes = self
            .grid_nodes
            .map_or_else(|| take(&mut file, "grid-nodes"), |v| Ok(Some(v)))?
            .unwrap_or(RadialGrid::DEFAULT_NODES);
        let r_min = self
            .grid_min
            .map_or_else(|| take(&mut file, "grid-min"), |v| Ok(Some(v)))?
            .unwrap_or(RadialGrid::DEFAULT_R_MIN);
        let r_max = self
            .grid_max
            .map_or_else(|| take(&mut file, "grid-max"), |v| Ok(Some(v)))?
            .unwrap_or(RadialGrid::DEFAULT_R_MAX);
        let samples = self
            .samples
            .map_or_else(|| take(&mut file, "samples"), |v| Ok(Some(v)))?
            .unwrap_or(DEFAULT_SAMPLES);
        let seed = self
            .seed
            .map_or_else(|| take(&mut file, "seed"), |v| Ok(Some(v)))?
            .unwrap_or(DEFAULT_SEED);
        let out = self.out.clone().or(file.remove("out").map(PathBuf::from));
        let format = match self.format {
            Some(f) => f,
            None => file
                .remove("format")
                .map(|s| parse_format(&s))
                .transpose()?
                .unwrap_or(Format::Table),
        };
        Ok(RunConfig {
            group,
            norm,
            p,
            q,
            alpha,
            beta,
            grid: RadialGrid::new(r_min, r_max, nodes)?,
            samples,
            seed,
            out,
            format,
            extra: file,
        })
    }
}
