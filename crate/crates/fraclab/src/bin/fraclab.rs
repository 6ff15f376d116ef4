//! Thin command-line front end over the fraclab library.
//!
//! Exit codes: 0 = all verdicts pass, 1 = some verdict failed,
//! 2 = configuration or usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fraclab::dimension::{self, Mode};
use fraclab::error::HarnessError;
use fraclab::fractals::{self, cover::DEFAULT_MAX_PRECISION};
use fraclab::geometry::Direction;
use fraclab::harness::{
    run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport, PointSourceKind,
};

#[derive(Parser)]
#[command(name = "fraclab", about = "fractal projection laboratory", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Experiment config JSON; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report base path; writes <out>.json and <out>.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    directions: Option<usize>,
    /// Regression window, two values: r_min r_max.
    #[arg(long, num_args = 2, value_names = ["R_MIN", "R_MAX"])]
    window: Option<Vec<u32>>,
    #[arg(long)]
    tol: Option<f64>,
    /// Catalog fractal name.
    #[arg(long)]
    fractal: Option<String>,
    /// IFS JSON file (overrides --fractal).
    #[arg(long)]
    ifs_file: Option<PathBuf>,
    #[arg(long)]
    instances: Option<usize>,
    /// Toy universe program-length bound.
    #[arg(long)]
    l_max: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the built-in attractors and their similarity dimensions.
    Catalog {
        #[command(flatten)]
        common: Common,
    },
    /// Generate a grid cover and export it as CSV.
    Cover {
        #[command(flatten)]
        common: Common,
        /// Cover precision (bits).
        #[arg(long)]
        r: u32,
    },
    /// Project a cover onto a line and export the 1-D cover as CSV.
    Project {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: u32,
        /// Direction components, comma separated (normalized); defaults to a
        /// seeded random direction.
        #[arg(long)]
        direction: Option<String>,
    },
    /// Box-counting dimension of an attractor, or effective dimension of a
    /// point source.
    Dim {
        #[command(flatten)]
        common: Common,
        /// ls | liminf | limsup (attractor estimates).
        #[arg(long, default_value = "ls")]
        mode: String,
        /// rational | seeded-random | fractal-sample: switches to the
        /// point-dimension experiment.
        #[arg(long)]
        point_source: Option<String>,
    },
    /// Projection sweep against the Hausdorff ground truth.
    Marstrand {
        #[command(flatten)]
        common: Common,
    },
    /// Projection sweep against the packing lower bound.
    Packing {
        #[command(flatten)]
        common: Common,
    },
    /// Exact verification sweep on the toy universe.
    ToyVerify {
        #[command(flatten)]
        common: Common,
    },
    /// Direction-recovery Monte Carlo with the frozen error bound.
    Recover {
        #[command(flatten)]
        common: Common,
        /// Approximation precision r.
        #[arg(long)]
        r: Option<u32>,
    },
}

fn build_config(common: &Common, kind: ExperimentKind) -> Result<ExperimentConfig, HarnessError> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    config.kind = kind;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.out = Some(out.clone());
    }
    if let Some(d) = common.directions {
        config.directions = d;
    }
    if let Some(w) = &common.window {
        config.window = (w[0], w[1]);
    }
    if let Some(t) = common.tol {
        config.tol = t;
    }
    if let Some(f) = &common.fractal {
        config.fractal = f.clone();
    }
    if let Some(p) = &common.ifs_file {
        config.ifs_file = Some(p.clone());
    }
    if let Some(i) = common.instances {
        config.instances = i;
    }
    if let Some(l) = common.l_max {
        config.l_max = l;
    }
    config.validate()?;
    Ok(config)
}

fn emit_report(report: &ExperimentReport, config: &ExperimentConfig) -> Result<(), HarnessError> {
    match &config.out {
        Some(base) => {
            report.write(base)?;
            for v in &report.verdicts {
                println!(
                    "{}: {} ({})",
                    v.name,
                    if v.pass { "PASS" } else { "FAIL" },
                    v.detail
                );
            }
            println!("report: {}.json / {}.csv", base.display(), base.display());
        }
        None => println!("{}", report.to_json()),
    }
    Ok(())
}

fn run_verdict_experiment(common: &Common, kind: ExperimentKind) -> Result<bool, HarnessError> {
    let config = build_config(common, kind)?;
    let report = run_experiment(&config)?;
    emit_report(&report, &config)?;
    Ok(report.all_pass())
}

fn parse_direction(spec: &str) -> Result<Direction, HarnessError> {
    let comps: Result<Vec<f64>, _> = spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let comps = comps.map_err(|e| HarnessError::Config(format!("bad direction: {e}")))?;
    Direction::normalized(comps).map_err(|e| HarnessError::Config(e.to_string()))
}

fn write_or_print(text: String, out: &Option<PathBuf>) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool, HarnessError> {
    match cli.cmd {
        Cmd::Catalog { common } => {
            let _ = &common;
            println!(
                "{:<12} {:>3} {:>5} {:>10}  exceptional",
                "name", "n", "maps", "moran-dim"
            );
            for f in fractals::catalog() {
                println!(
                    "{:<12} {:>3} {:>5} {:>10.5}  {}",
                    f.name,
                    f.dim(),
                    f.maps.len(),
                    f.similarity_dimension(),
                    f.exceptional.len()
                );
            }
            Ok(true)
        }
        Cmd::Cover { common, r } => {
            let config = build_config(&common, ExperimentKind::Marstrand)?;
            let ifs = config.ifs()?;
            let cover = fractals::cover::generate_cover(&ifs, r, DEFAULT_MAX_PRECISION)?;
            let mut buf = Vec::new();
            cover.write_csv(&mut buf).map_err(HarnessError::Io)?;
            write_or_print(String::from_utf8(buf).unwrap(), &config.out)?;
            Ok(true)
        }
        Cmd::Project {
            common,
            r,
            direction,
        } => {
            let config = build_config(&common, ExperimentKind::Marstrand)?;
            let ifs = config.ifs()?;
            let dir = match direction {
                Some(spec) => parse_direction(&spec)?,
                None => {
                    use rand::SeedableRng;
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
                    fraclab::geometry::sample_direction(ifs.dim(), &mut rng)
                }
            };
            if dir.dim() != ifs.dim() {
                return Err(HarnessError::Config(format!(
                    "direction has {} components but {} is {}-dimensional",
                    dir.dim(),
                    ifs.name,
                    ifs.dim()
                )));
            }
            let cover = fractals::cover::generate_cover(&ifs, r, DEFAULT_MAX_PRECISION)?;
            let projected = fractals::cover::project_cover(&cover, &dir);
            let mut buf = Vec::new();
            projected.write_csv(&mut buf).map_err(HarnessError::Io)?;
            write_or_print(String::from_utf8(buf).unwrap(), &config.out)?;
            Ok(true)
        }
        Cmd::Dim {
            common,
            mode,
            point_source,
        } => {
            if let Some(src) = point_source {
                let mut config = build_config(&common, ExperimentKind::DimPoint)?;
                config.point_source = match src.as_str() {
                    "rational" => PointSourceKind::Rational,
                    "seeded-random" | "random" => PointSourceKind::SeededRandom,
                    "fractal-sample" | "fractal" => PointSourceKind::FractalSample,
                    other => {
                        return Err(HarnessError::Config(format!(
                            "unknown point source {other}"
                        )))
                    }
                };
                let report = run_experiment(&config)?;
                emit_report(&report, &config)?;
                return Ok(report.all_pass());
            }
            let config = build_config(&common, ExperimentKind::Marstrand)?;
            let ifs = config.ifs()?;
            let mode = match mode.as_str() {
                "ls" => Mode::Ls,
                "liminf" => Mode::LimInf,
                "limsup" => Mode::LimSup,
                other => return Err(HarnessError::Config(format!("unknown mode {other}"))),
            };
            let est = dimension::ifs_box_dimension(&ifs, config.window, mode)?;
            let text = serde_json::to_string_pretty(&est)?;
            write_or_print(text + "\n", &config.out)?;
            Ok(true)
        }
        Cmd::Marstrand { common } => run_verdict_experiment(&common, ExperimentKind::Marstrand),
        Cmd::Packing { common } => run_verdict_experiment(&common, ExperimentKind::Packing),
        Cmd::ToyVerify { common } => run_verdict_experiment(&common, ExperimentKind::ToyVerify),
        Cmd::Recover { common, r } => {
            let mut config = build_config(&common, ExperimentKind::RecoverySweep)?;
            if let Some(r) = r {
                config.recovery_r = r;
            }
            if config.instances == ExperimentConfig::default().instances
                && common.instances.is_none()
            {
                config.instances = 1000;
            }
            let report = run_experiment(&config)?;
            emit_report(&report, &config)?;
            Ok(report.all_pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
