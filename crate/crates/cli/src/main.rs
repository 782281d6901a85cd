use std::fmt::Write as _;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fairalloc::experiments::{self, ExperimentError};
use fairalloc::flow::CycleFinder;
use fairalloc::format::{parse_instance, write_allocation, write_instance_with_header};
use fairalloc::mfmca::{solve_mfmca_with, solve_min_cost_with, SolveError, SolveOptions};
use fairalloc::mlmf::{imaxflow_with, CompanyOrder};
use fairalloc::model::{check_feasible, sorted_counts, Instance};
use fairalloc::oracle::{enumerate_with, OracleError, OracleOptions};
use fairalloc::scenario::{generate, BidGranularity, CapacityRounding, Scenario, ScenarioConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "fairalloc", version, about = "Fair minimum-cost allocation of time-windowed jobs to bidding companies")]
struct Cli {
    /// Report stage timings on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random scenario instance.
    Generate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance file.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Fair)]
        mode: Mode,
        #[command(flatten)]
        solver: SolverArgs,
        /// Permute the company processing order with this seed.
        #[arg(long)]
        order_seed: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check both solvers against exhaustive enumeration on a small instance.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Refuse instances whose search-space estimate exceeds this.
        #[arg(long, default_value_t = fairalloc::oracle::DEFAULT_GUARD)]
        guard: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run seeded batches through both solvers and write CSV tables.
    Experiment {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 100)]
        runs: u32,
        /// Base seed; run i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sweep job counts given as start:end:step instead of a single batch.
        #[arg(long, conflicts_with = "jobs")]
        jobs_sweep: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Finder::Howard)]
        finder: Finder,
        /// Start cycle cancelling from a plain maximum flow.
        #[arg(long)]
        no_greedy_start: bool,
    },
}

#[derive(clap::Args, Debug)]
struct ScenarioArgs {
    /// low|high|mix followed by hom|het, e.g. high-het.
    #[arg(long)]
    scenario: Scenario,
    #[arg(long, default_value_t = 10)]
    capacity_pct: u32,
    #[arg(long)]
    jobs: Option<u32>,
    #[arg(long, default_value_t = 50)]
    companies: u32,
    #[arg(long, default_value_t = 10)]
    periods: u32,
    #[arg(long, default_value_t = 3)]
    window: u32,
    #[arg(long, value_enum, default_value_t = Bidding::PerJob)]
    bidding: Bidding,
    #[arg(long, value_enum, default_value_t = Rounding::Nearest)]
    rounding: Rounding,
}

impl ScenarioArgs {
    fn config(&self, seed: u64) -> ScenarioConfig {
        let mut c = ScenarioConfig::new(self.scenario, self.capacity_pct, seed);
        c.jobs = self.jobs.unwrap_or(c.jobs);
        c.companies = self.companies;
        c.periods = self.periods;
        c.window = self.window;
        c.bidding = match self.bidding {
            Bidding::PerJob => BidGranularity::PerJob,
            Bidding::PerJobPeriod => BidGranularity::PerJobPeriod,
        };
        c.rounding = match self.rounding {
            Rounding::Nearest => CapacityRounding::Nearest,
            Rounding::Floor => CapacityRounding::Floor,
        };
        c
    }
}

#[derive(clap::Args, Debug)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = Finder::Karp)]
    finder: Finder,
    /// Start cycle cancelling from a greedy cheapest-bid flow.
    #[arg(long)]
    greedy_start: bool,
}

impl SolverArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            finder: self.finder.into(),
            greedy_start: self.greedy_start,
            ..Default::default()
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Fair,
    Mincost,
    FairnessVector,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Finder {
    Karp,
    Howard,
}

impl From<Finder> for CycleFinder {
    fn from(f: Finder) -> Self {
        match f {
            Finder::Karp => CycleFinder::Karp,
            Finder::Howard => CycleFinder::Howard,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Bidding {
    PerJob,
    PerJobPeriod,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Rounding {
    Nearest,
    Floor,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn invariant(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVARIANT,
            message: message.into(),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::InvalidInput(_) => Failure::input(e.to_string()),
            SolveError::Invariant(_) => Failure::invariant(e.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Invariant { .. } => Failure::invariant(e.to_string()),
            ExperimentError::InvalidInput(_) => Failure::usage(e.to_string()),
            ExperimentError::Io(_) => Failure::usage(e.to_string()),
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn check_writable(path: &Path) -> Result<(), Failure> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if parent.is_dir() {
        Ok(())
    } else {
        Err(Failure::usage(format!("output directory {} does not exist", parent.display())))
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn timed<T>(verbose: bool, label: &str, f: impl FnOnce() -> T) -> T {
    let start = std::time::Instant::now();
    let value = f();
    if verbose {
        eprintln!("{label}: {:.3} ms", start.elapsed().as_secs_f64() * 1000.0);
    }
    value
}

fn run(cli: Cli) -> Result<(), Failure> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Generate { scenario, seed, out } => {
            if let Some(path) = &out {
                check_writable(path)?;
            }
            let config = scenario.config(seed);
            config.validate().map_err(|e| Failure::usage(e.to_string()))?;
            let instance = timed(verbose, "generate", || generate(&config));
            emit(out.as_deref(), &write_instance_with_header(&instance, &config.describe()))
        }
        Command::Solve {
            input,
            mode,
            solver,
            order_seed,
            out,
        } => {
            if let Some(path) = &out {
                check_writable(path)?;
            }
            let instance = read_instance(&input)?;
            let mut options = solver.options();
            if let Some(seed) = order_seed {
                options.imaxflow.order = CompanyOrder::Seeded(seed);
            }
            let text = match mode {
                Mode::Fair => {
                    let sol = timed(verbose, "solve", || solve_mfmca_with(&instance, &options))?;
                    write_allocation(&sol.allocation, &sol.mlmf.fairness)
                }
                Mode::Mincost => {
                    let sol = timed(verbose, "solve", || solve_min_cost_with(&instance, &options));
                    write_allocation(&sol.allocation, &sorted_counts(&sol.allocation, &instance))
                }
                Mode::FairnessVector => {
                    let (res, _) = timed(verbose, "solve", || imaxflow_with(&instance, &options.imaxflow));
                    let mut text = format!("max_jobs {}\n", res.max_jobs);
                    for (company, cap) in &res.fixed_caps {
                        let _ = writeln!(text, "fixed_cap {company} {cap}");
                    }
                    let _ = writeln!(text, "fairness_vector {}", res.fairness);
                    text
                }
            };
            emit(out.as_deref(), &text)
        }
        Command::Verify { input, guard, solver } => verify(&read_instance(&input)?, guard, &solver.options(), verbose),
        Command::Experiment {
            scenario,
            runs,
            seed,
            jobs_sweep,
            out,
            finder,
            no_greedy_start,
        } => {
            let config = scenario.config(seed);
            config.validate().map_err(|e| Failure::usage(e.to_string()))?;
            fs::create_dir_all(&out).map_err(|e| Failure::usage(format!("{}: {e}", out.display())))?;
            let options = SolveOptions {
                finder: finder.into(),
                greedy_start: !no_greedy_start,
                ..Default::default()
            };
            match jobs_sweep {
                Some(range) => {
                    let jobs = experiments::parse_range(&range)?;
                    let points = timed(verbose, "experiment", || {
                        experiments::jobs_sweep(&config, &jobs, runs, seed, &options)
                    })?;
                    experiments::write_sweep(&out, &config, &points)?;
                    print!("{}", experiments::sweep_csv(&config.scenario.to_string(), config.capacity_pct, &points));
                }
                None => {
                    let records = timed(verbose, "experiment", || experiments::run_batch(&config, runs, seed, &options))?;
                    experiments::write_batch(&out, &records)?;
                    let s = experiments::aggregate(&records)?;
                    println!(
                        "{} runs={} mean_min_cost={:.2} mean_fair_cost={:.2} mean_pof={:.4} std_pof={:.4}",
                        config.scenario, s.runs, s.min_cost.mean, s.fair_cost.mean, s.pof_percent.mean, s.pof_percent.std
                    );
                }
            }
            Ok(())
        }
    }
}

fn verify(instance: &Instance, guard: u64, options: &SolveOptions, verbose: bool) -> Result<(), Failure> {
    let oracle_options = OracleOptions {
        guard,
        collect_maximal: false,
    };
    let report = timed(verbose, "oracle", || enumerate_with(instance, &oracle_options)).map_err(|e| match e {
        OracleError::TooLarge { .. } => Failure::usage(e.to_string()),
    })?;
    let (mlmf, _) = imaxflow_with(instance, &options.imaxflow);
    let fair = solve_mfmca_with(instance, options)?;
    let cheap = solve_min_cost_with(instance, options).allocation;

    println!("oracle max_jobs {}", report.max_jobs);
    println!("oracle best_fairness {}", report.best_fairness);
    println!("oracle min_fair_cost {}", report.min_fair_cost);
    println!("oracle min_cost {}", report.min_cost);
    println!("oracle maximal_allocations {}", report.maximal_count);

    let feasible = |a| check_feasible(instance, a).unwrap_or(false);
    let checks = [
        ("max_jobs", mlmf.max_jobs == report.max_jobs),
        ("fairness", mlmf.fairness == report.best_fairness),
        (
            "fair_cost",
            fair.allocation.total_cost() == report.min_fair_cost
                && sorted_counts(&fair.allocation, instance) == report.best_fairness
                && feasible(&fair.allocation),
        ),
        (
            "min_cost",
            cheap.total_cost() == report.min_cost
                && cheap.len() == report.max_jobs as usize
                && feasible(&cheap),
        ),
    ];
    let mut failed = Vec::new();
    for (name, ok) in checks {
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::invariant(format!("solver disagrees with oracle on {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match panic::catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
        Err(_) => {
            eprintln!("error: internal solver invariant violated");
            ExitCode::from(EXIT_INVARIANT)
        }
    }
}
