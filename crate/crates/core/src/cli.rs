//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrators::Method;
use crate::io::output::{read_csv, read_sidecar, sidecar_path, write_atomic, write_csv, SeriesKind, Sidecar};
use crate::io::scenario_file::{parse_scenario, write_scenario};
use crate::io::svg::render_svg;
use crate::io::sweep::parse_sweep;
use crate::observables::Channel;
use crate::params::{preset, preset_names, Backend, Scenario, Variant};
use crate::simulate::{run, RunOutput};

pub const OUT_DIR_ENV: &str = "QWCAVITY_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Parser)]
#[command(name = "qwcavity", version, about = "Exciton–cavity–mirror dynamics under modulation")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    ClassicalMirror,
    QuantizedMirror,
    ModulatedPump,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::ClassicalMirror => Variant::ClassicalMirror,
            VariantArg::QuantizedMirror => Variant::QuantizedMirror,
            VariantArg::ModulatedPump => Variant::ModulatedPump,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a preset, a scenario file (.toml) or a sidecar (.json) and write CSV output.
    Run {
        target: String,
        /// Output directory.
        #[arg(long, env = OUT_DIR_ENV)]
        out_dir: Option<PathBuf>,
        /// Worker threads for ensemble runs (results do not depend on it).
        #[arg(long)]
        workers: Option<usize>,
        /// Use the stochastic ensemble backend with Euler–Maruyama steps.
        #[arg(long)]
        ensemble: bool,
        #[arg(long)]
        n_traj: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every point of a sweep file.
    Sweep {
        file: PathBuf,
        #[arg(long, env = OUT_DIR_ENV)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// List the preset catalog.
    ListPresets,
    /// Render CSV channels to an SVG next to the CSV.
    Plot {
        csv: PathBuf,
        /// Channels to draw (default: A, B and, for models with a mirror, q).
        #[arg(long = "channel", value_delimiter = ',')]
        channels: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario or sweep file without running it.
    Validate { file: PathBuf },
    /// Print a scenario file with every key at its default.
    Defaults {
        #[arg(long, value_enum, default_value = "classical-mirror")]
        variant: VariantArg,
    },
}

/// Parses `args` (including the program name) and executes the command.
/// Returns the process exit code: 0 on success, 1 when a run fails, 2 for
/// usage or configuration errors.
pub fn run_command<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run {
            target,
            out_dir,
            workers,
            ensemble,
            n_traj,
            seed,
        } => {
            let mut jobs = resolve_target(&target)?;
            for (_, s) in jobs.iter_mut() {
                if ensemble {
                    s.backend = Backend::Ensemble;
                    s.integrator.method = Method::EulerMaruyama;
                }
                if let Some(n) = n_traj {
                    s.n_traj = n;
                }
                if let Some(seed) = seed {
                    s.seed = seed;
                }
                s.validate()?;
            }
            Ok(run_jobs(&jobs, &resolve_out_dir(out_dir), workers))
        }
        Command::Sweep {
            file,
            out_dir,
            workers,
        } => {
            let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            let dir = file.parent().unwrap_or(Path::new("."));
            let sweep = parse_sweep(&text, dir)?;
            let jobs = sweep.expand()?;
            let out = out_dir
                .or_else(|| sweep.out_dir.clone())
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
            Ok(run_jobs(&jobs, &out, workers))
        }
        Command::ListPresets => {
            for (name, description) in preset_names() {
                let p = preset(name)?;
                println!(
                    "{name:<7} {:<16} {:<5} sweep {}={:?}  {description}",
                    p.scenario.variant.name(),
                    p.channel,
                    p.sweep.key,
                    p.sweep.values
                );
            }
            Ok(0)
        }
        Command::Plot { csv, channels, out } => {
            let series = read_csv(&csv)?;
            let side = read_sidecar(&sidecar_path(&csv)).ok();
            let channels: Vec<Channel> = if channels.is_empty() {
                let mechanics = side
                    .as_ref()
                    .and_then(|s| s.scenario.variant)
                    .map(|v| v.has_mechanics())
                    .unwrap_or(false);
                let mut c = vec![Channel::A, Channel::B];
                if mechanics {
                    c.push(Channel::Q);
                }
                c
            } else {
                channels
                    .iter()
                    .map(|n| {
                        Channel::from_name(n)
                            .ok_or_else(|| Error::invalid("channel", format!("unknown channel `{n}`")))
                    })
                    .collect::<Result<_>>()?
            };
            let time_label = side
                .as_ref()
                .map(|s| s.reference_rate().time_label())
                .unwrap_or("t");
            let title = side.as_ref().map(|s| s.name.clone()).unwrap_or_default();
            let svg = render_svg(&series, &channels, time_label, &title);
            let out = out.unwrap_or_else(|| csv.with_extension("svg"));
            write_atomic(&out, svg.as_bytes())?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Validate { file } => {
            let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
                context: file.display().to_string(),
                message: e.to_string().trim().to_string(),
            })?;
            if table.contains_key("axes") || table.contains_key("base") {
                let dir = file.parent().unwrap_or(Path::new("."));
                let n = parse_sweep(&text, dir)?.expand()?.len();
                println!("ok: sweep with {n} points");
            } else {
                let s = parse_scenario(&text)?;
                println!("ok: {} scenario, {} backend", s.variant.name(), s.backend.name());
            }
            Ok(0)
        }
        Command::Defaults { variant } => {
            print!("{}", write_scenario(&Scenario::new(variant.into())));
            Ok(0)
        }
    }
}

/// Preset members, a scenario file, or the scenario recorded in a sidecar.
fn resolve_target(target: &str) -> Result<Vec<(String, Scenario)>> {
    if let Ok(p) = preset(target) {
        return Ok(p
            .members()
            .into_iter()
            .map(|(suffix, s)| (format!("{}_{suffix}", p.name), s))
            .collect());
    }
    let path = Path::new(target);
    if !path.exists() {
        return Err(Error::UnknownPreset(target.to_string()));
    }
    if path.extension().is_some_and(|e| e == "json") {
        let side = read_sidecar(path)?;
        let name = side
            .name
            .strip_suffix("_stderr")
            .unwrap_or(&side.name)
            .to_string();
        let s = side.scenario.to_scenario()?;
        s.validate()?;
        return Ok(vec![(name, s)]);
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    Ok(vec![(name, parse_scenario(&text)?)])
}

fn write_output(name: &str, scenario: &Scenario, output: &RunOutput, out_dir: &Path) -> Result<Vec<PathBuf>> {
    match output {
        RunOutput::Deterministic(s) => {
            let path = out_dir.join(format!("{name}.csv"));
            write_csv(s, &Sidecar::new(name, SeriesKind::Deterministic, s, scenario), &path)?;
            Ok(vec![path])
        }
        RunOutput::Ensemble(e) => {
            let mean_path = out_dir.join(format!("{name}.csv"));
            write_csv(
                &e.mean,
                &Sidecar::new(name, SeriesKind::EnsembleMean, &e.mean, scenario),
                &mean_path,
            )?;
            let err_name = format!("{name}_stderr");
            let err_path = out_dir.join(format!("{err_name}.csv"));
            write_csv(
                &e.stderr,
                &Sidecar::new(&err_name, SeriesKind::EnsembleStderr, &e.stderr, scenario),
                &err_path,
            )?;
            Ok(vec![mean_path, err_path])
        }
    }
}

/// Runs jobs in parallel; each job writes its own files. Failures are
/// reported per job and do not stop the others.
fn run_jobs(jobs: &[(String, Scenario)], out_dir: &Path, workers: Option<usize>) -> i32 {
    let results: Vec<Result<Vec<PathBuf>>> = jobs
        .par_iter()
        .map(|(name, s)| run(s, workers).and_then(|out| write_output(name, s, &out, out_dir)))
        .collect();
    let mut failed = 0;
    for ((name, _), r) in jobs.iter().zip(results) {
        match r {
            Ok(paths) => {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
            Err(e) => {
                failed += 1;
                eprintln!("error: {name}: {e}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} of {} runs failed", jobs.len());
        1
    } else {
        0
    }
}
