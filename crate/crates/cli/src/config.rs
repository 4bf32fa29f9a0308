//! Run configuration resolved from three layers: a flat `key = value`
//! config file, `MINSURF_*` environment variables, and command-line
//! flags, in increasing order of precedence.

use std::collections::BTreeMap;
use std::path::PathBuf;

use minsurf::{DomainRect, SurfaceSelector, SurfaceSpec};
use thiserror::Error;

pub const ENV_PREFIX: &str = "MINSURF_";

/// Recognised keys. Environment variables use the upper-case form with the
/// `MINSURF_` prefix; config files also accept `-` for `_`.
pub const KEYS: &[&str] = &[
    "degree",
    "omega",
    "conjugate",
    "phase",
    "domain",
    "grid",
    "format",
    "output",
    "tol_minimality",
    "tol_isothermal",
    "tol_symmetry",
    "tol_self_intersection",
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid --{flag}: {message}")]
    Invalid { flag: String, message: String },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("config file line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("cannot read config file {path}: {message}")]
    Unreadable { path: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        flag: key.replace('_', "-"),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Obj,
    Ply,
    Csv,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Obj => "obj",
            Format::Ply => "ply",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub minimality: f64,
    pub isothermal: f64,
    pub symmetry: f64,
    pub self_intersection: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            minimality: 1e-8,
            isothermal: 1e-10,
            symmetry: 1e-12,
            self_intersection: 1e-6,
        }
    }
}

/// Per-command defaults for the keys that differ between commands.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub domain: f64,
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: SurfaceSpec,
    pub selector: SurfaceSelector,
    /// Whether `--conjugate` or `--phase` was given explicitly.
    pub selector_explicit: bool,
    pub domain: DomainRect,
    pub grid: (usize, usize),
    pub format: Format,
    pub output: Option<PathBuf>,
    pub tolerances: Tolerances,
}

/// Raw `key -> value` layer.
pub type Layer = BTreeMap<String, String>;

fn check_key(key: &str) -> Result<(), ConfigError> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey(key.to_string()))
    }
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are
/// ignored; unknown keys are rejected.
pub fn parse_config_file(text: &str) -> Result<Layer, ConfigError> {
    let mut layer = Layer::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        };
        let key = k.trim().replace('-', "_");
        check_key(&key)?;
        layer.insert(key, v.trim().to_string());
    }
    Ok(layer)
}

/// Collects `MINSURF_*` variables, except `MINSURF_CONFIG` which names the
/// config file. Unknown `MINSURF_*` names are rejected.
pub fn env_layer<I>(vars: I) -> Result<Layer, ConfigError>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut layer = Layer::new();
    for (name, value) in vars {
        let Some(rest) = name.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let key = rest.to_ascii_lowercase();
        if key == "config" {
            continue;
        }
        check_key(&key)?;
        layer.insert(key, value);
    }
    Ok(layer)
}

/// Merges layers; later layers win.
pub fn merge(layers: &[&Layer]) -> Layer {
    let mut out = Layer::new();
    for layer in layers {
        for (k, v) in layer.iter() {
            out.insert(k.clone(), v.clone());
        }
    }
    out
}

fn parse_f64(key: &str, s: &str) -> Result<f64, ConfigError> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| invalid(key, format!("expected a number, got `{s}`")))?;
    if !x.is_finite() {
        return Err(invalid(key, format!("expected a finite number, got `{s}`")));
    }
    Ok(x)
}

fn parse_list<T: std::str::FromStr>(key: &str, s: &str) -> Result<Vec<T>, ConfigError> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| invalid(key, format!("cannot parse `{t}`")))
        })
        .collect()
}

fn parse_bool(key: &str, s: &str) -> Result<bool, ConfigError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" | "" => Ok(false),
        other => Err(invalid(key, format!("expected a boolean, got `{other}`"))),
    }
}

impl RunConfig {
    /// Validates a merged layer. Surface rules are checked here, before any
    /// command runs.
    pub fn from_layer(layer: &Layer, defaults: Defaults) -> Result<Self, ConfigError> {
        for key in layer.keys() {
            check_key(key)?;
        }
        let get = |k: &str| layer.get(k).map(String::as_str);

        let degree = match get("degree") {
            Some(s) => s
                .trim()
                .parse::<i64>()
                .map_err(|_| invalid("degree", format!("expected an integer, got `{s}`")))?,
            None => return Err(invalid("degree", "is required")),
        };
        let omega = get("omega").map_or(Ok(1.0), |s| parse_f64("omega", s))?;
        let spec = SurfaceSpec::new(degree, omega).map_err(|e| match e {
            minsurf::Error::NegativeOmega(_) | minsurf::Error::NonFinite(_) => {
                invalid("omega", e.to_string())
            }
            other => invalid("degree", other.to_string()),
        })?;

        let conjugate = get("conjugate").map_or(Ok(false), |s| parse_bool("conjugate", s))?;
        let phase = get("phase").map(|s| parse_f64("phase", s)).transpose()?;
        let selector = match (conjugate, phase) {
            (true, Some(_)) => return Err(invalid("phase", "cannot be combined with --conjugate")),
            (true, None) => SurfaceSelector::Conjugate,
            (false, Some(t)) => SurfaceSelector::Family(t),
            (false, None) => SurfaceSelector::Base,
        };

        let domain = match get("domain") {
            Some(s) => {
                let v: Vec<f64> = parse_list("domain", s)?;
                if v.len() != 4 {
                    return Err(invalid(
                        "domain",
                        format!("expected 4 values umin umax vmin vmax, got {}", v.len()),
                    ));
                }
                DomainRect::new(v[0], v[1], v[2], v[3])
                    .map_err(|e| invalid("domain", e.to_string()))?
            }
            None => DomainRect::square(defaults.domain).expect("default domain"),
        };

        let grid = match get("grid") {
            Some(s) => {
                let v: Vec<usize> = parse_list("grid", s)?;
                match v.as_slice() {
                    [n] => (*n, *n),
                    [nu, nv] => (*nu, *nv),
                    _ => return Err(invalid("grid", "expected N or NU NV")),
                }
            }
            None => (defaults.grid, defaults.grid),
        };
        if grid.0 == 0 || grid.1 == 0 {
            return Err(invalid("grid", "must be positive"));
        }

        let format = match get("format").map(|s| s.trim().to_ascii_lowercase()) {
            None => Format::Obj,
            Some(f) => match f.as_str() {
                "obj" => Format::Obj,
                "ply" => Format::Ply,
                "csv" => Format::Csv,
                other => {
                    return Err(invalid(
                        "format",
                        format!("expected obj|ply|csv, got `{other}`"),
                    ))
                }
            },
        };

        let mut tolerances = Tolerances::default();
        for (key, slot) in [
            ("tol_minimality", &mut tolerances.minimality),
            ("tol_isothermal", &mut tolerances.isothermal),
            ("tol_symmetry", &mut tolerances.symmetry),
            ("tol_self_intersection", &mut tolerances.self_intersection),
        ] {
            if let Some(s) = get(key) {
                let t = parse_f64(key, s)?;
                if t <= 0.0 {
                    return Err(invalid(key, "must be positive"));
                }
                *slot = t;
            }
        }

        Ok(RunConfig {
            spec,
            selector,
            selector_explicit: conjugate || phase.is_some(),
            domain,
            grid,
            format,
            output: get("output").map(PathBuf::from),
            tolerances,
        })
    }
}
