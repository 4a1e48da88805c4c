//! `gilbert`: command-line front end for convex separation experiments.
//!
//! Exit status: 0 = inside within delta, 2 = separated, 3 = iteration budget
//! exhausted, 1 = error. Commands without a single separation outcome
//! (`bench`, `werner`, `steer`) exit 0 on success.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gilbert_core::bell::{optimize_measurements, WernerConfig};
use gilbert_core::experiments::{
    convergence_bench, ghz_pipeline, steering_table, write_json, write_trace, BenchParams, Certification,
    ExperimentSpec, GhzConfig, Shape, SteerConfig,
};
use gilbert_core::{run, Outcome, RunConfig};
use serde::de::DeserializeOwned;

#[derive(Parser, Debug)]
#[command(name = "gilbert", version, about = "Convex separation with Gilbert's algorithm")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each overrides the matching field of `--config`.
#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON configuration file for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Top-level seed for every randomized subroutine.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Iteration budget.
    #[arg(long, global = true)]
    iters: Option<usize>,
    /// Memory buffer size m (1 = plain iteration).
    #[arg(long, global = true)]
    memory: Option<usize>,
    /// Target accuracy: report "inside" once d_k < delta.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Worker threads for parallel oracles (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Separate one point from one set described by `--config`.
    Separate,
    /// Convergence benchmark on a set with known geometry.
    Bench {
        /// rectangle-exterior | rectangle-boundary | rectangle-interior | circle | hull-memory
        shape: Shape,
    },
    /// Visibility-descent loop bounding the Werner-state locality threshold.
    Werner {
        /// Measurement settings per party.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Separate a noisy GHZ correlation point from the tripartite local polytope.
    Ghz {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Steering distance table and certified bound for the buckyball directions.
    Steer {
        /// Certify the final inequality with see-saw restarts instead of exact enumeration.
        #[arg(long)]
        heuristic_only: bool,
    },
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// The configuration at `path`, or the defaults when no file is given.
fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    path.map_or_else(|| Ok(T::default()), read_json)
}

impl Common {
    fn apply(&self, run: &mut RunConfig) {
        if let Some(s) = self.seed {
            run.rng_seed = s;
        }
        if let Some(k) = self.iters {
            run.max_iterations = k;
        }
        if let Some(m) = self.memory {
            run.memory_capacity = m;
        }
        if let Some(d) = self.delta {
            run.delta = d;
        }
    }
}

fn exit_code(outcome: &Outcome) -> u8 {
    match outcome {
        Outcome::InsideWithinDelta => 0,
        Outcome::Separated(_) => 2,
        Outcome::IterationBudgetExhausted => 3,
    }
}

fn cmd_separate(common: &Common) -> Result<u8> {
    let Some(path) = common.config.as_deref() else {
        bail!("separate needs --config <spec.json>");
    };
    let mut spec: ExperimentSpec = read_json(path)?;
    common.apply(&mut spec.run);
    let r = spec.target.resolve()?;
    let oracle = spec.set.build()?;
    let record = run(&r, &oracle, &spec.run)?;
    write_trace(&record, &common.out.join("trace.csv"))?;
    println!(
        "outcome: {} after {} iterations, d = {:.17e}",
        record.outcome.name(),
        record.rows.last().map_or(0, |row| row.k),
        record.final_distance()
    );
    if let Outcome::Separated(w) = &record.outcome {
        write_json(w, &common.out.join("witness.json"))?;
        println!("local bound {:.17e}, margin {:.17e}", w.local_bound, w.margin);
    }
    Ok(exit_code(&record.outcome))
}

fn cmd_bench(common: &Common, shape: Shape) -> Result<u8> {
    let mut params: BenchParams = match common.config.as_deref() {
        Some(p) => read_json(p)?,
        None => BenchParams::for_shape(shape),
    };
    if let Some(k) = common.iters {
        params.iterations = k;
    }
    if let Some(m) = common.memory {
        params.memories = vec![m];
    }
    if let Some(s) = common.seed {
        params.seed = s;
    }
    let result = convergence_bench(shape, &params)?;
    let mut fits = Vec::new();
    for run in &result.runs {
        write_trace(&run.record, &common.out.join(format!("{shape}-m{}.csv", run.memory)))?;
        match &run.fit {
            Some(f) => println!(
                "{}: d* = {}, slope {:.6}, intercept {:.6}, r^2 {:.6} ({} points), final d - d* = {:.3e}",
                run.label,
                run.dstar,
                f.slope,
                f.intercept,
                f.r_squared,
                f.points,
                run.final_excess()
            ),
            None => println!(
                "{}: no fit (d - d* reached 0), final d - d* = {:.3e}",
                run.label,
                run.final_excess()
            ),
        }
        fits.push(serde_json::json!({
            "label": run.label,
            "memory": run.memory,
            "dstar": run.dstar,
            "final_excess": run.final_excess(),
            "fit": run.fit,
        }));
    }
    write_json(&fits, &common.out.join(format!("{shape}-fit.json")))?;
    Ok(0)
}

fn cmd_werner(common: &Common, n: Option<usize>) -> Result<u8> {
    let mut cfg: WernerConfig = load_config(common.config.as_deref())?;
    if let Some(n) = n {
        cfg.n = n;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    common.apply(&mut cfg.engine);
    let result = optimize_measurements(&cfg)?;
    write_json(&result.witness, &common.out.join("werner_witness.json"))?;
    write_json(&result.vectors, &common.out.join("measurements.json"))?;
    println!(
        "werner n={}: v <= {:.9} (last separated v = {:.4}, {} rounds)",
        cfg.n, result.bound, result.last_separated_v, result.rounds
    );
    Ok(0)
}

fn cmd_ghz(common: &Common, n: Option<usize>, p: Option<f64>) -> Result<u8> {
    let mut cfg: GhzConfig = load_config(common.config.as_deref())?;
    if let Some(n) = n {
        cfg.n = n;
    }
    if let Some(p) = p {
        cfg.p = p;
    }
    common.apply(&mut cfg.engine);
    let (result, record) = ghz_pipeline(&cfg)?;
    write_trace(&record, &common.out.join("trace.csv"))?;
    write_json(&result.witness, &common.out.join("ghz_witness.json"))?;
    println!("ghz n={}: p <= {:.12}", cfg.n, result.bound);
    Ok(exit_code(&record.outcome))
}

fn cmd_steer(common: &Common, heuristic_only: bool) -> Result<u8> {
    let mut cfg: SteerConfig = load_config(common.config.as_deref())?;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(m) = common.memory {
        cfg.memories = vec![m];
    }
    if let Some(k) = common.iters {
        cfg.checkpoints.retain(|&c| c < k);
        cfg.checkpoints.push(k);
    }
    if heuristic_only {
        cfg.certification = Certification::SeeSaw { restarts: 10_000 };
    }
    let (result, records) = steering_table(&cfg)?;
    let table_path = common.out.join("steering_table.csv");
    std::fs::create_dir_all(&common.out)?;
    let mut table = BufWriter::new(File::create(&table_path)?);
    writeln!(table, "m,k,d_k")?;
    for (row, record) in result.rows.iter().zip(&records) {
        write_trace(record, &common.out.join(format!("trace-m{}.csv", row.memory)))?;
        for (k, d) in &row.distances {
            writeln!(table, "{},{},{:.16e}", row.memory, k, d)?;
            println!("m={:<4} k={:<7} d={:.9}", row.memory, k, d);
        }
    }
    table.flush()?;
    if let Some(w) = &result.witness {
        write_json(w, &common.out.join("steering_witness.json"))?;
        println!(
            "unsteerable bound {:.9}, quantum value {:.9}: v <= {:.6}{}",
            w.unsteerable_bound,
            w.quantum_value,
            w.v_bound,
            if w.heuristic { " (heuristic)" } else { "" }
        );
    }
    Ok(0)
}

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which means "separated" here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = (|| -> Result<u8> {
        if let Some(t) = cli.common.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .context("configuring the thread pool")?;
        }
        match &cli.command {
            Command::Separate => cmd_separate(&cli.common),
            Command::Bench { shape } => cmd_bench(&cli.common, *shape),
            Command::Werner { n } => cmd_werner(&cli.common, *n),
            Command::Ghz { n, p } => cmd_ghz(&cli.common, *n, *p),
            Command::Steer { heuristic_only } => cmd_steer(&cli.common, *heuristic_only),
        }
    })();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
