use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use bass_bench::analysis::fit_prz_scaling;
use bass_bench::config::{Arm, ExperimentConfig, SeedPolicy};
use bass_bench::output::write_all;
use bass_bench::runner::{run_arm, Instance};
use bass_bench::summary::Summary;
use bass_bench::verify::{Verifier, CRITERIA};
use bass_bench::{run_experiment, summarize};
use bass_core::{Circuit, Family, FamilyParams, Mode, SimConfig, TruncationRule};
use clap::{Parser, Subcommand};

const EXIT_PARTIAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "bass", version, about = "Adaptive-basis sparse-state simulator benchmarks")]
struct Cli {
    /// Worker threads for trial-level parallelism.
    #[arg(long, global = true, env = "BASS_THREADS")]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed; overrides the config document.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config document.
    Run { config: PathBuf },
    /// Simulate one circuit and print its run record as JSON.
    Simulate {
        #[arg(long, default_value = "brickwork")]
        family: Family,
        #[arg(long, required_unless_present = "circuit")]
        n: Option<usize>,
        #[arg(long)]
        k: usize,
        /// Simulate this circuit document instead of generating one.
        #[arg(long, conflicts_with_all = ["family", "n", "depth"])]
        circuit: Option<PathBuf>,
        /// Write the simulated circuit document here.
        #[arg(long)]
        save_circuit: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "adaptive")]
        mode: CliMode,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        two_qubit_pass: bool,
        #[arg(long, value_enum, default_value = "top-k")]
        truncation: CliTruncation,
    },
    /// Fit the exponent of the exact computational-basis PR against N.
    FitPrz {
        #[arg(long, default_value = "brickwork")]
        family: Family,
        #[arg(long, value_delimiter = ',', default_values_t = [8usize, 10, 12, 14])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Evaluate the acceptance criteria.
    Verify {
        /// Criterion ids; all when omitted. Prerequisites are added.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Compare top-k against Schmidt-weighted and random truncation in the fixed basis.
    SchmidtBench {
        #[arg(long, default_value = "brickwork")]
        family: Family,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 512)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 30)]
        trials: usize,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CliMode {
    Fixed,
    Adaptive,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CliTruncation {
    TopK,
    Schmidt1,
    Schmidt3,
    Random,
}

/// Distinguishes bad input (exit 2) from failed work (exit 1).
enum Failure {
    Config(anyhow::Error),
    Partial(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Partial(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Partial(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_PARTIAL)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run { config } => {
            let mut config = ExperimentConfig::load(config).map_err(|e| Failure::Config(e.into()))?;
            if let Some(seed) = cli.seed {
                config.seeds.base_seed = seed;
            }
            let out = cli
                .out
                .clone()
                .or_else(|| config.output.clone())
                .unwrap_or_else(|| PathBuf::from("results"));
            execute(&config, cli.threads, &out)
        }
        Command::Simulate {
            family,
            n,
            k,
            circuit,
            save_circuit,
            mode,
            depth,
            two_qubit_pass,
            truncation,
        } => {
            let source = match circuit {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))
                        .map_err(Failure::Config)?;
                    Source::Document(Circuit::from_json(&text).map_err(|e| Failure::Config(e.into()))?)
                }
                None => Source::Generated {
                    family: *family,
                    n: n.expect("clap requires --n without --circuit"),
                    depth: *depth,
                },
            };
            let options = SimulateOptions {
                k: *k,
                mode: *mode,
                two_qubit_pass: *two_qubit_pass,
                truncation: *truncation,
                save_circuit: save_circuit.clone(),
            };
            simulate(cli, source, &options)
        }
        Command::FitPrz { family, n, trials, depth } => {
            let params = FamilyParams {
                depth: *depth,
                ..FamilyParams::default()
            };
            let fit = fit_prz_scaling(*family, n, *trials, &params, cli.seed.unwrap_or(0))
                .map_err(Failure::Config)?;
            let text = serde_json::to_string_pretty(&fit).map_err(anyhow::Error::from)?;
            println!("{text}");
            if let Some(dir) = &cli.out {
                write_file(dir, &format!("fit_prz_{}.json", family.name()), &text)?;
            }
            Ok(())
        }
        Command::Verify { only } => {
            let ids: Vec<u8> = if only.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { only.clone() };
            if let Some(bad) = ids.iter().find(|&&id| !CRITERIA.iter().any(|c| c.0 == id)) {
                return Err(Failure::Config(anyhow::anyhow!("unknown criterion {bad}")));
            }
            let outcomes = Verifier::new(cli.threads).run(&ids, &mut std::io::stdout());
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
            if failed > 0 {
                return Err(Failure::Partial(anyhow::anyhow!("{failed} criteria failed")));
            }
            Ok(())
        }
        Command::SchmidtBench {
            family,
            n,
            k,
            depth,
            trials,
        } => {
            let config = ExperimentConfig {
                experiment_id: "schmidt_bench".into(),
                family: *family,
                family_params: FamilyParams::with_depth(*depth),
                n_qubits: vec![*n],
                k: vec![*k],
                arms: vec![
                    Arm::new("top_k", Mode::Fixed, TruncationRule::TopK),
                    Arm::new("schmidt1", Mode::Fixed, TruncationRule::Schmidt1),
                    Arm::new("schmidt3", Mode::Fixed, TruncationRule::Schmidt3),
                    Arm::new("random_k", Mode::Fixed, TruncationRule::Random),
                ],
                trials: *trials,
                seeds: SeedPolicy {
                    base_seed: cli.seed.unwrap_or(0),
                    trial_offset: 0,
                },
                sim: SimConfig::default(),
                stats: Default::default(),
                output: None,
            };
            config.validate().map_err(|e| Failure::Config(e.into()))?;
            execute(&config, cli.threads, cli.out.as_deref().unwrap_or(Path::new("results")))
        }
    }
}

fn execute(config: &ExperimentConfig, threads: Option<usize>, out: &Path) -> Result<(), Failure> {
    let rows = run_experiment(config, threads)?;
    let summary = summarize(config, &rows);
    let paths = write_all(out, &rows, &summary)?;
    print_summary(&summary);
    println!("rows: {}", paths.rows_jsonl.display());
    println!("summary: {}", paths.summary_json.display());
    for r in rows.iter().filter(|r| !r.succeeded()) {
        eprintln!(
            "trial failed: N={} k={} trial={} arm={}: {}",
            r.n_qubits,
            r.k,
            r.trial,
            r.arm,
            r.error.as_deref().unwrap_or("")
        );
    }
    if summary.failed_rows > 0 {
        return Err(Failure::Partial(anyhow::anyhow!("{} of {} runs failed", summary.failed_rows, summary.rows)));
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.4e}"))
}

fn print_summary(summary: &Summary) {
    let mut out = std::io::stdout().lock();
    for p in &summary.points {
        let _ = writeln!(out, "N={} k={} GM(PR_Z)={}", p.n_qubits, p.k, fmt_opt(p.gm_pr_z));
        for a in &p.arms {
            let _ = write!(
                out,
                "  {:<12} ok={:<4} GM(F)={} GM(γ²)={} violations={}",
                a.arm,
                a.trials_ok,
                fmt_opt(a.gm_fidelity),
                fmt_opt(a.gm_gamma2),
                a.violations
            );
            if let Some(c) = p.comparison(&a.arm) {
                let _ = write!(
                    out,
                    " ratio={} wins={}/{} p={}",
                    fmt_opt(c.gm_ratio),
                    c.arm_wins,
                    c.pairs,
                    fmt_opt(c.p_arm_greater)
                );
            }
            let _ = writeln!(out);
        }
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

enum Source {
    Generated { family: Family, n: usize, depth: Option<usize> },
    Document(Circuit),
}

struct SimulateOptions {
    k: usize,
    mode: CliMode,
    two_qubit_pass: bool,
    truncation: CliTruncation,
    save_circuit: Option<PathBuf>,
}

fn simulate(cli: &Cli, source: Source, options: &SimulateOptions) -> Result<(), Failure> {
    let mode = match options.mode {
        CliMode::Fixed => Mode::Fixed,
        CliMode::Adaptive => Mode::Adaptive,
    };
    let truncation = match options.truncation {
        CliTruncation::TopK => TruncationRule::TopK,
        CliTruncation::Schmidt1 => TruncationRule::Schmidt1,
        CliTruncation::Schmidt3 => TruncationRule::Schmidt3,
        CliTruncation::Random => TruncationRule::Random,
    };
    let (family, n, depth) = match &source {
        Source::Generated { family, n, depth } => (*family, *n, *depth),
        Source::Document(c) => (c.family, c.n_qubits, c.params.depth),
    };
    let k = options.k;
    let config = ExperimentConfig {
        experiment_id: "simulate".into(),
        family,
        family_params: FamilyParams {
            depth,
            ..FamilyParams::default()
        },
        n_qubits: vec![n],
        k: vec![k],
        arms: vec![Arm::new("simulate", mode, truncation)],
        trials: 1,
        seeds: SeedPolicy {
            base_seed: cli.seed.unwrap_or(0),
            trial_offset: 0,
        },
        sim: SimConfig {
            two_qubit_pass: options.two_qubit_pass,
            ..SimConfig::default()
        },
        stats: Default::default(),
        output: None,
    };
    let instance = match source {
        Source::Generated { .. } => {
            config.validate().map_err(|e| Failure::Config(e.into()))?;
            Instance::build(&config, n, 0).map_err(|e| Failure::Config(e.into()))?
        }
        Source::Document(circuit) => Instance::from_circuit(circuit).map_err(|e| Failure::Config(e.into()))?,
    };
    if let Some(path) = &options.save_circuit {
        std::fs::write(path, instance.circuit.to_json() + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let (row, _) = run_arm(&config, &config.arms[0], &instance, k, 0);
    let text = serde_json::to_string_pretty(&row).map_err(anyhow::Error::from)?;
    println!("{text}");
    if let Some(dir) = &cli.out {
        let name = format!("simulate_{}_{n}_{k}_{:?}.json", family.name(), mode).to_lowercase();
        write_file(dir, &name, &text)?;
    }
    match &row.error {
        Some(e) => Err(Failure::Partial(anyhow::anyhow!("run failed: {e}"))),
        None => Ok(()),
    }
}
