mod commands;
mod config;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use minsurf::ParamPoint;

use commands::{CliError, EvalExtras, Status};
use config::{env_layer, merge, parse_config_file, ConfigError, Defaults, Layer, RunConfig};

/// Explicit polynomial minimal surfaces: evaluation, certification,
/// shape analysis and mesh export.
#[derive(Debug, Parser)]
#[command(name = "minsurf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one parameter point.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'u', allow_negative_numbers = true)]
        u: f64,
        #[arg(short = 'v', allow_negative_numbers = true)]
        v: f64,
        /// Also print first and second partial derivatives.
        #[arg(long)]
        jet: bool,
        /// Also print the fundamental form coefficients.
        #[arg(long)]
        forms: bool,
        /// Also print mean and Gaussian curvature and the unit normal.
        #[arg(long)]
        curvature: bool,
    },
    /// Run the certification suites over a sample grid.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Classify the surface and check symmetries, lines and self-intersections.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Minimum parameter distance between the two sheets of a hit.
        #[arg(long, value_name = "D")]
        delta_param: Option<f64>,
        /// Spatial matching radius for candidate pairs.
        #[arg(long, value_name = "D")]
        delta_pos: Option<f64>,
    },
    /// Write a triangulated mesh.
    Mesh {
        #[command(flatten)]
        common: Common,
        /// Include per-vertex unit normals (OBJ and PLY).
        #[arg(long)]
        normals: bool,
    },
    /// Write the associate-family deformation frames as OBJ files.
    Frames {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(short = 'n', long, allow_negative_numbers = true)]
    degree: Option<String>,
    #[arg(short = 'w', long, allow_negative_numbers = true)]
    omega: Option<String>,
    /// Use the conjugate surface.
    #[arg(long)]
    conjugate: bool,
    /// Use the associate-family member at phase t.
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    phase: Option<String>,
    #[arg(long, num_args = 4, value_names = ["UMIN", "UMAX", "VMIN", "VMAX"], allow_negative_numbers = true)]
    domain: Option<Vec<String>>,
    /// Samples (verify), scan resolution (analyze) or cells (mesh, frames).
    #[arg(long, num_args = 1..=2, value_names = ["NU", "NV"])]
    grid: Option<Vec<String>>,
    /// obj, ply or csv.
    #[arg(long)]
    format: Option<String>,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    #[arg(long, value_name = "TOL")]
    tol_minimality: Option<String>,
    #[arg(long, value_name = "TOL")]
    tol_isothermal: Option<String>,
    #[arg(long, value_name = "TOL")]
    tol_symmetry: Option<String>,
    #[arg(long, value_name = "TOL")]
    tol_self_intersection: Option<String>,
    /// Flat key = value config file; also read from MINSURF_CONFIG.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

impl Common {
    fn flag_layer(&self) -> Layer {
        let mut layer = Layer::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                layer.insert(k.to_string(), v);
            }
        };
        put("degree", self.degree.clone());
        put("omega", self.omega.clone());
        put("conjugate", self.conjugate.then(|| "true".to_string()));
        put("phase", self.phase.clone());
        put("domain", self.domain.as_ref().map(|v| v.join(" ")));
        put("grid", self.grid.as_ref().map(|v| v.join(" ")));
        put("format", self.format.clone());
        put(
            "output",
            self.output.as_ref().map(|p| p.display().to_string()),
        );
        put("tol_minimality", self.tol_minimality.clone());
        put("tol_isothermal", self.tol_isothermal.clone());
        put("tol_symmetry", self.tol_symmetry.clone());
        put("tol_self_intersection", self.tol_self_intersection.clone());
        layer
    }

    /// Config file, then environment, then flags.
    fn resolve(&self, defaults: Defaults) -> Result<RunConfig, ConfigError> {
        let env: Vec<(String, String)> = std::env::vars().collect();
        let path = self.config.clone().or_else(|| {
            env.iter()
                .find(|(k, _)| k == "MINSURF_CONFIG")
                .map(|(_, v)| PathBuf::from(v))
        });
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p).map_err(|e| ConfigError::Unreadable {
                    path: p.display().to_string(),
                    message: e.to_string(),
                })?;
                parse_config_file(&text)?
            }
            None => Layer::new(),
        };
        let env = env_layer(env)?;
        RunConfig::from_layer(&merge(&[&file, &env, &self.flag_layer()]), defaults)
    }
}

const FIGURE_DEFAULTS: Defaults = Defaults {
    domain: 1.0,
    grid: 64,
};

fn run(cli: Cli, out: &mut dyn Write) -> Result<Status, CliError> {
    match cli.command {
        Command::Eval {
            common,
            u,
            v,
            jet,
            forms,
            curvature,
        } => {
            let cfg = common.resolve(FIGURE_DEFAULTS)?;
            let pt = ParamPoint::checked(u, v).map_err(|e| ConfigError::Invalid {
                flag: "u".into(),
                message: e.to_string(),
            })?;
            commands::cmd_eval(
                &cfg,
                pt,
                EvalExtras {
                    jet,
                    forms,
                    curvature,
                },
                out,
            )
        }
        Command::Verify { common } => {
            let cfg = common.resolve(Defaults {
                grid: 41,
                ..FIGURE_DEFAULTS
            })?;
            commands::cmd_verify(&cfg, out)
        }
        Command::Analyze {
            common,
            delta_param,
            delta_pos,
        } => {
            let cfg = common.resolve(Defaults {
                grid: 128,
                ..FIGURE_DEFAULTS
            })?;
            for (flag, d) in [("delta-param", delta_param), ("delta-pos", delta_pos)] {
                if d.is_some_and(|d| !(d.is_finite() && d > 0.0)) {
                    return Err(ConfigError::Invalid {
                        flag: flag.into(),
                        message: "must be a positive number".into(),
                    }
                    .into());
                }
            }
            commands::cmd_analyze(&cfg, delta_param, delta_pos, out)
        }
        Command::Mesh { common, normals } => {
            let cfg = common.resolve(FIGURE_DEFAULTS)?;
            commands::cmd_mesh(&cfg, normals, out)
        }
        Command::Frames { common } => {
            let cfg = common.resolve(Defaults {
                domain: 4.0,
                ..FIGURE_DEFAULTS
            })?;
            commands::cmd_frames(&cfg, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(status), Ok(())) => ExitCode::from(status.exit_code()),
        (Err(e), _) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        (Ok(_), Err(e)) => {
            eprintln!("error: cannot write output: {e}");
            ExitCode::from(3)
        }
    }
}
