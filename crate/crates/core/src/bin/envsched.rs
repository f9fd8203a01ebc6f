use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use envsched::io::{self, CoverageDoc, ScheduleDoc};
use envsched::oracle;
use envsched::pipeline::{self, pack_schedule};
use envsched::{
    check_schedule, validate_instance, Algorithm, Budget, Checkpoint, Error, Instance, RunConfig,
};

#[derive(Parser)]
#[command(
    version,
    about = "Design test-environment schedules over a compatibility graph"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and optimize a schedule.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Algorithm id from 1.1 to 3.6; several comma-separated ids need --parallel.
        #[arg(long, value_delimiter = ',', required = true)]
        algorithm: Vec<Algorithm>,
        /// Wall-clock budget in seconds.
        #[arg(long, conflicts_with = "iterations")]
        budget: Option<f64>,
        /// Annealing iterations or branch-and-bound expansions.
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        branch_factor: Option<usize>,
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        checkpoint_out: Option<PathBuf>,
        /// Schedule output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run every listed algorithm on its own thread. Output and checkpoint
        /// paths get the algorithm id appended.
        #[arg(long)]
        parallel: bool,
    },
    /// Duplicate configurations to fill each node's VM capacity.
    Pack {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a small instance exactly by enumeration.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a clique cover question on a general graph into an instance.
    Reduce {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an instance and report whether it admits a schedule.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    Ok(io::parse_instance(&read(path)?)?)
}

fn with_suffix(path: &Path, id: Algorithm) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(format!(".{id}"));
    if let Some(ext) = path.extension() {
        name.push(".");
        name.push(ext);
    }
    path.with_file_name(name)
}

struct SolveJob {
    algorithm: Algorithm,
    resume: Option<Checkpoint>,
    checkpoint_out: Option<PathBuf>,
    out: Option<PathBuf>,
}

fn run_job(inst: &Instance, job: &SolveJob, base: &RunConfig) -> anyhow::Result<()> {
    let cfg = RunConfig {
        algorithm: job.algorithm,
        ..base.clone()
    };
    let output = pipeline::run_pipeline(inst, &cfg, job.resume.as_ref())?;
    if let Some(p) = &job.checkpoint_out {
        let text = serde_json::to_string(&output.checkpoint)?;
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    let doc = ScheduleDoc::new(
        &output.schedule,
        &inst.graph,
        job.algorithm.to_string(),
        Some(cfg.seed),
        output.cost,
        CoverageDoc::new(&output.report, &output.required),
    );
    write_out(job.out.as_deref(), &doc.to_json())
}

#[allow(clippy::too_many_arguments)]
fn solve(
    instance: &Path,
    algorithms: Vec<Algorithm>,
    budget: Option<f64>,
    iterations: Option<u64>,
    seed: u64,
    branch_factor: Option<usize>,
    resume: Option<PathBuf>,
    checkpoint_out: Option<PathBuf>,
    out: Option<PathBuf>,
    parallel: bool,
) -> anyhow::Result<()> {
    let inst = load_instance(instance)?;
    let budget = match (budget, iterations) {
        (Some(secs), _) if secs.is_finite() && secs >= 0.0 => {
            Budget::time(Duration::from_secs_f64(secs))
        }
        (Some(secs), _) => bail!("invalid --budget {secs}"),
        (None, Some(k)) => Budget::iterations(k),
        (None, None) => Budget::unlimited(),
    };
    let base = RunConfig {
        algorithm: algorithms[0],
        seed,
        budget,
        branch_factor,
    };
    if algorithms.len() == 1 {
        let resume = match resume {
            Some(p) => Some(
                serde_json::from_str::<Checkpoint>(&read(&p)?)
                    .with_context(|| format!("parsing checkpoint {}", p.display()))?,
            ),
            None => None,
        };
        let job = SolveJob {
            algorithm: algorithms[0],
            resume,
            checkpoint_out,
            out,
        };
        return run_job(&inst, &job, &base);
    }
    if !parallel {
        bail!("several algorithms need --parallel");
    }
    if resume.is_some() {
        bail!("--resume takes a single algorithm");
    }
    let Some(out) = out else {
        bail!("--parallel needs --out");
    };
    let jobs: Vec<SolveJob> = algorithms
        .iter()
        .map(|&a| SolveJob {
            algorithm: a,
            resume: None,
            checkpoint_out: checkpoint_out.as_deref().map(|p| with_suffix(p, a)),
            out: Some(with_suffix(&out, a)),
        })
        .collect();
    let results: Vec<anyhow::Result<()>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|job| s.spawn(|| run_job(&inst, job, &base)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(anyhow::anyhow!("solver thread panicked")))
            })
            .collect()
    });
    // report the first failure; infeasibility is shared by every id
    results.into_iter().collect()
}

fn pack(schedule: &Path, instance: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let inst = load_instance(instance)?;
    let doc: ScheduleDoc = serde_json::from_str(&read(schedule)?)
        .with_context(|| format!("parsing {}", schedule.display()))?;
    let packed = pack_schedule(&doc.schedule(), inst.packing.as_ref());
    write_out(out, &doc.packed(&packed, &inst.graph).to_json())
}

fn run_oracle(instance: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let inst = load_instance(instance)?;
    let sol = oracle::brute_force(&inst)?;
    let report = check_schedule(&sol.schedule, &inst, &sol.required);
    let doc = ScheduleDoc::new(
        &sol.schedule,
        &inst.graph,
        "oracle".into(),
        None,
        sol.cost,
        CoverageDoc::new(&report, &sol.required),
    );
    write_out(out, &doc.to_json())
}

fn reduce(graph: &Path, n: usize, out: Option<&Path>) -> anyhow::Result<()> {
    let g = io::parse_graph(&read(graph)?)?;
    let inst = oracle::reduce(&g, n)?;
    write_out(out, &(io::instance_to_json(&inst) + "\n"))
}

fn validate(instance: &Path) -> anyhow::Result<()> {
    let inst = load_instance(instance)?;
    let violations = validate_instance(&inst);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("{v}");
        }
        bail!(Error::InvalidInstance(format!(
            "{} violation(s)",
            violations.len()
        )));
    }
    let space = pipeline::prepare(
        &inst,
        &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0),
    )?;
    println!(
        "ok: {} values in scope, clique cover of {} for n = {}",
        space.required.len(),
        space.cover.len(),
        inst.n
    );
    Ok(())
}

fn main() -> ExitCode {
    // usage errors share exit code 1 with every other non-infeasibility error
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Solve {
            instance,
            algorithm,
            budget,
            iterations,
            seed,
            branch_factor,
            resume,
            checkpoint_out,
            out,
            parallel,
        } => solve(
            &instance,
            algorithm,
            budget,
            iterations,
            seed,
            branch_factor,
            resume,
            checkpoint_out,
            out,
            parallel,
        ),
        Command::Pack {
            schedule,
            instance,
            out,
        } => pack(&schedule, &instance, out.as_deref()),
        Command::Oracle { instance, out } => run_oracle(&instance, out.as_deref()),
        Command::Reduce { graph, n, out } => reduce(&graph, n, out.as_deref()),
        Command::Validate { instance } => validate(&instance),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let infeasible = e
                .downcast_ref::<Error>()
                .is_some_and(Error::is_infeasibility);
            ExitCode::from(if infeasible { 2 } else { 1 })
        }
    }
}
