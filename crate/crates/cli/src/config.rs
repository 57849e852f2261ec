//! Run configuration from an optional `key = value` file and command-line
//! flags. Flags take precedence over the file.

use crate::error::{CliError, Result};
use clap::Args;
use mhdvem::mesh::{build_cube_mesh, build_tet_mesh, read_poly_mesh, PolyMesh};
use mhdvem::mhd::{MhdParams, PicardConfig};
use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSpec {
    Cube(usize),
    Tet(usize),
    File(PathBuf),
}

impl FromStr for MeshSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let level = |n: &str| match n.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("mesh level must be a positive integer, got `{n}`")),
        };
        match s.split_once(':') {
            Some(("cube", n)) => Ok(MeshSpec::Cube(level(n)?)),
            Some(("tet", n)) => Ok(MeshSpec::Tet(level(n)?)),
            Some(("file", p)) => Ok(MeshSpec::File(p.into())),
            _ if s == "cube" => Ok(MeshSpec::Cube(1)),
            _ if s == "tet" => Ok(MeshSpec::Tet(1)),
            _ if s.is_empty() => Err("empty mesh specification".into()),
            _ => Ok(MeshSpec::File(s.into())),
        }
    }
}

impl fmt::Display for MeshSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshSpec::Cube(n) => write!(f, "cube:{n}"),
            MeshSpec::Tet(n) => write!(f, "tet:{n}"),
            MeshSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl MeshSpec {
    pub fn family(&self) -> &'static str {
        match self {
            MeshSpec::Cube(_) => "cube",
            MeshSpec::Tet(_) => "tet",
            MeshSpec::File(_) => "file",
        }
    }

    pub fn with_level(&self, n: usize) -> Result<MeshSpec> {
        match self {
            MeshSpec::Cube(_) => Ok(MeshSpec::Cube(n)),
            MeshSpec::Tet(_) => Ok(MeshSpec::Tet(n)),
            MeshSpec::File(_) => Err(CliError::Config("levels need a generated mesh family (cube or tet)".into())),
        }
    }

    pub fn load(&self) -> Result<PolyMesh<f64>> {
        match self {
            MeshSpec::Cube(n) => Ok(build_cube_mesh(*n)?),
            MeshSpec::Tet(n) => Ok(build_tet_mesh(*n)?),
            MeshSpec::File(p) => {
                let file = File::open(p).map_err(|e| CliError::io(p.display(), e))?;
                Ok(read_poly_mesh(BufReader::new(file))?)
            }
        }
    }
}

/// Flags shared by the subcommands. Every flag is optional so that values
/// from `--config` can fill the gaps.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    /// `key = value` configuration file
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// cube:N, tet:N or file:PATH
    #[arg(long)]
    pub mesh: Option<String>,
    /// Time step
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Reynolds number
    #[arg(long)]
    pub re: Option<f64>,
    /// Magnetic Reynolds number
    #[arg(long)]
    pub rem: Option<f64>,
    /// Coupling coefficient of the Lorentz force
    #[arg(long)]
    pub hartmann: Option<f64>,
    /// Relative Picard increment at which a step is accepted
    #[arg(long)]
    pub picard_tol: Option<f64>,
    /// Picard iterations allowed per step
    #[arg(long)]
    pub picard_max: Option<usize>,
    /// Comma-separated refinement levels, e.g. 2,4,8
    #[arg(long)]
    pub levels: Option<String>,
    /// Output CSV path
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for assembly
    #[arg(long)]
    pub threads: Option<usize>,
    /// Solve the manufactured problem (the only built-in problem)
    #[arg(long)]
    pub manufactured: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mesh: MeshSpec,
    pub t_final: f64,
    pub dt: f64,
    pub params: MhdParams<f64>,
    pub picard: PicardConfig<f64>,
    pub levels: Vec<usize>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

const KEYS: [&str; 12] =
    ["mesh", "dt", "T", "re", "rem", "hartmann", "picard_tol", "picard_max", "levels", "out", "threads", "problem"];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`, got `{line}`", k + 1)))?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("line {}: unknown key `{key}`", k + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| CliError::Config(format!("{key}: cannot parse `{value}`")))
}

fn parse_levels(value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|v| match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!("levels: `{}` is not a positive integer", v.trim()))),
        })
        .collect()
}

impl RunConfig {
    pub fn resolve(flags: &Overrides) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p.display(), e))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let get = |key: &str| file.get(key).map(String::as_str);
        fn pick<T: FromStr>(flag: Option<T>, key: &str, file: Option<&str>, default: T) -> Result<T> {
            match (flag, file) {
                (Some(v), _) => Ok(v),
                (None, Some(s)) => parse_value(key, s),
                (None, None) => Ok(default),
            }
        }
        if let Some(p) = get("problem") {
            if p != "manufactured" {
                return Err(CliError::Config(format!("problem: only `manufactured` is built in, got `{p}`")));
            }
        }
        let mesh_text =
            flags.mesh.clone().or_else(|| get("mesh").map(str::to_owned)).unwrap_or_else(|| "cube:2".into());
        let mesh = mesh_text.parse::<MeshSpec>().map_err(|e| CliError::Config(format!("mesh: {e}")))?;
        let levels = match flags.levels.as_deref().or(get("levels")) {
            Some(v) => parse_levels(v)?,
            None => Vec::new(),
        };
        let threads = match (flags.threads, get("threads")) {
            (Some(n), _) => Some(n),
            (None, Some(s)) => Some(parse_value("threads", s)?),
            (None, None) => None,
        };
        let config = RunConfig {
            mesh,
            t_final: pick(flags.t_final, "T", get("T"), 1.0)?,
            dt: pick(flags.dt, "dt", get("dt"), 0.25)?,
            params: MhdParams {
                re: pick(flags.re, "re", get("re"), 1.0)?,
                rem: pick(flags.rem, "rem", get("rem"), 1.0)?,
                hartmann: pick(flags.hartmann, "hartmann", get("hartmann"), 1.0)?,
                nonlinear: true,
            },
            picard: PicardConfig {
                tol: pick(flags.picard_tol, "picard_tol", get("picard_tol"), 1e-8)?,
                max_iterations: pick(flags.picard_max, "picard_max", get("picard_max"), 20)?,
            },
            levels,
            out: flags.out.clone().or_else(|| get("out").map(PathBuf::from)),
            threads,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be a positive number, got {v}")))
            }
        };
        positive("T", self.t_final)?;
        positive("dt", self.dt)?;
        if self.dt > self.t_final {
            return Err(CliError::Config(format!("dt = {} exceeds T = {}", self.dt, self.t_final)));
        }
        positive("re", self.params.re)?;
        positive("rem", self.params.rem)?;
        positive("hartmann", self.params.hartmann)?;
        positive("picard_tol", self.picard.tol)?;
        if self.picard.max_iterations == 0 {
            return Err(CliError::Config("picard_max must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}
