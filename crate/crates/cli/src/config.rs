use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use lengthen::farey::{self, Slope};
use lengthen::markoff::{HalfTraceCoords, MarkoffTriple};
use lengthen::polygon::Chart;
use lengthen::real::{self, Real};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_DEPTH: usize = 6;
pub const DEPTH_CAP: usize = 16;

/// The deformed torus: a base triple or half-trace coordinates.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputArgs {
    /// Φ(1/0)
    #[arg(long = "A", allow_hyphen_values = true)]
    #[serde(rename = "A")]
    pub a: Option<String>,
    /// Φ(0/1)
    #[arg(long = "B", allow_hyphen_values = true)]
    #[serde(rename = "B")]
    pub b: Option<String>,
    /// Φ(1/1)
    #[arg(long = "C", allow_hyphen_values = true)]
    #[serde(rename = "C")]
    pub c: Option<String>,
    /// Half-length ℓ with Φ(region) = 2 cosh ℓ
    #[arg(long = "l", allow_hyphen_values = true)]
    #[serde(rename = "l")]
    pub ell: Option<String>,
    /// Shift x with Φ(R_n) = 2y cosh(nℓ − x)
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Region the coordinates and the L=1 chart refer to
    #[arg(long)]
    pub region: Option<String>,
    /// Neighbor of the region labelled R_0
    #[arg(long)]
    pub index0: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum ChartArg {
    #[value(name = "L1")]
    #[serde(rename = "L1")]
    L1,
    #[value(name = "octant")]
    #[serde(rename = "octant")]
    Octant,
}

#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Farey depth of the approximation
    #[arg(long)]
    pub depth: Option<usize>,
    /// Raise the depth cap
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Precision in bits (default from LENGTHEN_BITS, else 256)
    #[arg(long)]
    pub bits: Option<u32>,
    /// Affine chart: L = 1 around --region (default), or the octant triangle
    #[arg(long, value_enum)]
    pub chart: Option<ChartArg>,
    /// Tolerance of the verification suites
    #[arg(long)]
    pub tol: Option<String>,
    /// Report path; `.csv` selects CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Accept triples that classify as invalid
    #[arg(long)]
    pub allow_invalid: bool,
    /// TOML file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Displace the `+n` constant of the closed-form sides
    #[arg(long, hide = true, allow_hyphen_values = true)]
    pub inject_fault: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(flatten)]
    input: InputArgs,
    depth: Option<usize>,
    max_depth: Option<usize>,
    bits: Option<u32>,
    chart: Option<ChartArg>,
    tol: Option<String>,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
    workers: Option<usize>,
    allow_invalid: Option<bool>,
}

#[derive(Clone, Debug)]
pub enum Input {
    Triple(MarkoffTriple),
    Coords(HalfTraceCoords),
    None,
}

/// Flags merged over the config file, with numbers parsed at `bits`.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: Input,
    pub raw: InputArgs,
    pub depth: usize,
    pub bits: u32,
    pub chart: Chart,
    pub region: Slope,
    pub tol: Real,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub workers: Option<usize>,
    pub allow_invalid: bool,
    pub fault: Option<Real>,
}

impl RunConfig {
    pub fn triple(&self) -> Result<MarkoffTriple, CliError> {
        match &self.input {
            Input::Triple(t) => Ok(t.clone()),
            Input::Coords(c) => c.triple().map_err(CliError::from),
            Input::None => Err(CliError::Usage("give a triple (--A --B --C) or coordinates (--l --x --y)".into())),
        }
    }

    /// The real parsed from an optional flag value.
    pub fn number(&self, value: &Option<String>, name: &str) -> Result<Option<Real>, CliError> {
        value.as_deref().map(|v| parse(self.bits, v, name)).transpose()
    }
}

fn parse(bits: u32, v: &str, name: &str) -> Result<Real, CliError> {
    real::parse_real(bits, v).map_err(|_| CliError::Usage(format!("--{name}: cannot parse {v:?} as a number")))
}

fn parse_slope(v: &str) -> Result<Slope, CliError> {
    v.parse().map_err(|_| CliError::Usage(format!("cannot parse slope {v:?}")))
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn or<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

pub fn resolve(input: &InputArgs, common: &CommonArgs) -> Result<RunConfig, CliError> {
    let file = match &common.config {
        Some(p) => read_config(p)?,
        None => ConfigFile::default(),
    };
    let fi = file.input;
    let raw = InputArgs {
        a: or(input.a.clone(), fi.a),
        b: or(input.b.clone(), fi.b),
        c: or(input.c.clone(), fi.c),
        ell: or(input.ell.clone(), fi.ell),
        x: or(input.x.clone(), fi.x),
        y: or(input.y.clone(), fi.y),
        region: or(input.region.clone(), fi.region),
        index0: or(input.index0.clone(), fi.index0),
    };
    let env_bits = match std::env::var(real::BITS_ENV) {
        Ok(v) => Some(v.parse::<u32>().map_err(|_| CliError::Usage(format!("{}={v:?} is not a bit count", real::BITS_ENV)))?),
        Err(_) => None,
    };
    let bits = or(common.bits, file.bits).or(env_bits).unwrap_or(real::DEFAULT_BITS);
    real::check_bits(bits).map_err(|e| CliError::Usage(e.to_string()))?;
    let cap = or(common.max_depth, file.max_depth).unwrap_or(DEPTH_CAP);
    let depth = or(common.depth, file.depth).unwrap_or(DEFAULT_DEPTH);
    if depth > cap {
        return Err(CliError::Usage(format!("depth {depth} exceeds the cap {cap}; raise it with --max-depth")));
    }
    let region = match &raw.region {
        Some(r) => parse_slope(r)?,
        None => Slope::infinity(),
    };
    let chart = match or(common.chart, file.chart).unwrap_or(ChartArg::L1) {
        ChartArg::L1 => Chart::Local { region: region.clone() },
        ChartArg::Octant => Chart::Octant,
    };
    let tol = match or(common.tol.clone(), file.tol) {
        Some(t) => parse(bits, &t, "tol")?,
        None => real::pow10(bits, -20),
    };
    let fault = common.inject_fault.as_deref().map(|v| parse(bits, v, "inject-fault")).transpose()?;

    let mut config = RunConfig {
        input: Input::None,
        raw: raw.clone(),
        depth,
        bits,
        chart,
        region: region.clone(),
        tol,
        out: or(common.out.clone(), file.out),
        svg: or(common.svg.clone(), file.svg),
        workers: or(common.workers, file.workers),
        allow_invalid: common.allow_invalid || file.allow_invalid.unwrap_or(false),
        fault,
    };
    let has_triple = raw.a.is_some() || raw.b.is_some() || raw.c.is_some();
    let has_coords = raw.ell.is_some() || raw.x.is_some();
    config.input = match (has_triple, has_coords) {
        (true, true) => return Err(CliError::Usage("give either --A --B --C or --l --x --y, not both".into())),
        (true, false) => {
            let [a, b, c] = [(&raw.a, "A"), (&raw.b, "B"), (&raw.c, "C")].map(|(v, n)| {
                v.as_deref().ok_or_else(|| CliError::Usage(format!("missing --{n}"))).and_then(|v| parse(bits, v, n))
            });
            Input::Triple(MarkoffTriple::new(a?, b?, c?).map_err(|e| CliError::Usage(e.to_string()))?)
        }
        (false, true) => {
            let [l, x, y] = [(&raw.ell, "l"), (&raw.x, "x"), (&raw.y, "y")].map(|(v, n)| {
                v.as_deref().ok_or_else(|| CliError::Usage(format!("missing --{n}"))).and_then(|v| parse(bits, v, n))
            });
            let mut c = HalfTraceCoords::from_params(l?, x?, y?).map_err(|e| CliError::Usage(e.to_string()))?;
            let index0 = match &raw.index0 {
                Some(s) => parse_slope(s)?,
                None => farey::neighbor_frame(&region).0,
            };
            if !farey::is_neighbor(&region, &index0) {
                return Err(CliError::Usage(format!("{index0} is not a neighbor of {region}")));
            }
            c.region = region;
            c.index0 = index0;
            Input::Coords(c)
        }
        (false, false) => Input::None,
    };
    Ok(config)
}
