use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use percoflow::capacity::CapacityLaw;
use percoflow::continuum::{flat_cut_bound, i_omega, offset_grid, NuModel, PolyhedralCut};
use percoflow::cylinder::{estimate_nu, NuRequest};
use percoflow::geometry::Domain;
use percoflow::harness::{
    nu_rows, pool, run_converge, run_flow, run_phase, write_csv, write_json, ExperimentConfig,
    FlatCutRequest,
};
use percoflow::lattice::discretize;
use percoflow::{Error, Result};

#[derive(Parser)]
#[command(name = "percoflow", version, about = "Maximal flows in first passage percolation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discretize a domain and report the lattice.
    Discretize {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        n: u32,
        /// Include vertices, edges and marked sets.
        #[arg(long)]
        graph: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one random instance.
    Flow {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        law: LawArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate ν(v) from cylinder flows.
    Nu {
        /// Direction, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        v: Vec<f64>,
        #[command(flatten)]
        law: LawArg,
        #[arg(long, default_value_t = 4.0)]
        base: f64,
        /// Half height; defaults to base / 4.
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Mean normalized flow per mesh.
    Converge {
        #[arg(long)]
        domain: PathBuf,
        #[command(flatten)]
        law: LawArg,
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// ν model for a flat-cut bound.
        #[arg(long)]
        nu: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1,0")]
        axis: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Bernoulli sweep locating the positivity transition.
    Phase {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Evaluate the continuous capacity of a polyhedral cut.
    Cutval {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        cut: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best flat cut along an axis.
    Flatcut {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        axis: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LawArg {
    /// Capacity law: a JSON file or an inline JSON object.
    #[arg(long)]
    law: String,
}

impl LawArg {
    fn load(&self) -> Result<CapacityLaw> {
        if self.law.trim_start().starts_with('{') {
            CapacityLaw::from_json_str(&self.law)
        } else {
            CapacityLaw::from_path(&self.law)
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, env = "PERCOFLOW_THREADS")]
    threads: Option<usize>,
    /// Write 0 in the seconds column.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut w = sink(out)?;
    write_json(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Discretize { domain, n, graph, out } => {
            let lat = discretize(&Domain::from_path(domain)?, n)?;
            if graph {
                #[derive(Serialize)]
                struct Full {
                    summary: percoflow::lattice::LatticeSummary,
                    graph: percoflow::lattice::LatticeGraph,
                }
                emit_json(out.as_deref(), &Full { summary: lat.summary(), graph: lat.graph() })
            } else {
                emit_json(out.as_deref(), &lat.summary())
            }
        }
        Command::Flow { domain, n, law, seed, out } => {
            let report = run_flow(&Domain::from_path(domain)?, n, &law.load()?, seed)?;
            emit_json(out.as_deref(), &report)
        }
        Command::Nu { v, law, base, h, n, trials, seed, run } => {
            let req = NuRequest {
                direction: v,
                law: law.load()?,
                base_size: base,
                half_height: h,
                n_values: n,
                trials,
                seed,
            };
            let mut est = pool(run.threads)?.install(|| estimate_nu(&req))?;
            if run.no_timing {
                est.seconds.iter_mut().for_each(|s| *s = 0.0);
            }
            write_csv(sink(run.out.as_deref())?, &nu_rows(&est))
        }
        Command::Converge { domain, law, n, trials, seed, nu, axis, grid, json, run } => {
            let mut cfg = ExperimentConfig::new(Domain::from_path(domain)?, law.load()?, n, trials, seed);
            cfg.threads = run.threads;
            cfg.record_timing = !run.no_timing;
            if let Some(path) = nu {
                cfg.flat_cut = Some(FlatCutRequest { nu: NuModel::from_path(path)?, axis, grid });
            }
            let report = run_converge(&cfg)?;
            write_csv(sink(run.out.as_deref())?, &report.rows)?;
            if let Some(path) = json {
                emit_json(Some(&path), &report)?;
            }
            Ok(())
        }
        Command::Phase { domain, p, hi, threshold, n, trials, seed, json, run } => {
            let law = CapacityLaw::Bernoulli { p: 1.0, hi };
            let mut cfg = ExperimentConfig::new(Domain::from_path(domain)?, law, n, trials, seed);
            cfg.threads = run.threads;
            cfg.record_timing = !run.no_timing;
            let report = run_phase(&cfg, &p, hi, threshold)?;
            write_csv(sink(run.out.as_deref())?, &report.rows)?;
            if let Some(path) = json {
                emit_json(Some(&path), &report)?;
            }
            match report.transition {
                Some(p) => eprintln!("largest p with vanishing flow: {p}"),
                None => eprintln!("no p below threshold {}", report.threshold),
            }
            Ok(())
        }
        Command::Cutval { domain, cut, nu, out } => {
            let domain = Domain::from_path(domain)?;
            let value = i_omega(&PolyhedralCut::from_path(cut)?, &domain, &NuModel::from_path(nu)?)?;
            emit_json(out.as_deref(), &value)
        }
        Command::Flatcut { domain, nu, axis, grid, out } => {
            let domain = Domain::from_path(domain)?;
            if grid < 2 {
                return Err(Error::Config("grid must be at least 2".into()));
            }
            let offsets = offset_grid(&domain, &axis, grid);
            let bound = flat_cut_bound(&domain, &NuModel::from_path(nu)?, &axis, &offsets)?;
            emit_json(out.as_deref(), &bound)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
