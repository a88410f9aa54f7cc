use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cascade_core::experiment::{
    r_squared_text, run_experiment, run_sweep, significance_text, standard_grid,
    write_sweep_outputs, ExperimentConfig, PiSummary, SweepGrid, SweepSummary, DEFAULT_GRID_SEED,
};
use cascade_core::rng::mix;
use cascade_core::stats::{analyze, AnalysisOptions, MissingPolicy};
use cascade_core::{Error, RunTable};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "cascade",
    version,
    about = "Threshold cascade experiments and their statistical analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Maximum number of worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress summary output.
    #[arg(short, long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment configuration and write its run table as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the configuration's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Analyse a run table and write the report as JSON.
    Analyze {
        /// Run table CSV.
        table: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Experiment configuration supplying population size and analysis options.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Population size, when no configuration is given.
        #[arg(long, default_value_t = 1000)]
        n_agents: usize,
        #[command(flatten)]
        analysis: AnalysisFlags,
    },
    /// Run and analyse a grid of configurations.
    Sweep {
        /// Grid file: `{"configs": [...]}` or a bare array of configurations.
        #[arg(
            long,
            required_unless_present = "standard_grid",
            conflicts_with = "standard_grid"
        )]
        config: Option<PathBuf>,
        /// Use the built-in 42-configuration grid.
        #[arg(long)]
        standard_grid: bool,
        #[arg(long)]
        out: PathBuf,
        /// Derive every configuration's master seed from this value.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of solutions per configuration.
        #[arg(long)]
        solutions: Option<usize>,
        #[command(flatten)]
        analysis: AnalysisFlags,
    },
    /// Print (and optionally rewrite) the aggregate tables of a finished sweep.
    Report {
        /// Sweep output directory or its `sweep.json`.
        input: PathBuf,
        /// Directory to write `table1.txt` and `table2.txt` into.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct AnalysisFlags {
    #[arg(long)]
    alpha_screen: Option<f64>,
    #[arg(long)]
    alpha_model: Option<f64>,
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long)]
    span: Option<f64>,
    /// Drop rows with imputed features instead of keeping them.
    #[arg(long)]
    drop_missing: bool,
}

impl AnalysisFlags {
    fn apply(self, mut opts: AnalysisOptions) -> AnalysisOptions {
        if let Some(v) = self.alpha_screen {
            opts.alpha_screen = v;
        }
        if let Some(v) = self.alpha_model {
            opts.alpha_model = v;
        }
        if let Some(v) = self.bootstrap {
            opts.bootstrap = v;
        }
        if let Some(v) = self.span {
            opts.span = v;
        }
        if self.drop_missing {
            opts.missing = MissingPolicy::Drop;
        }
        opts
    }
}

enum Failure {
    Validation(String),
    Data(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        if e.is_validation() {
            Failure::Validation(msg)
        } else if e.is_data() {
            Failure::Data(msg)
        } else {
            Failure::Internal(msg)
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read_input(path)?)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn parse_grid(path: &Path) -> Result<SweepGrid, Failure> {
    let text = read_input(path)?;
    if let Ok(grid) = serde_json::from_str::<SweepGrid>(&text) {
        return Ok(grid);
    }
    serde_json::from_str::<Vec<ExperimentConfig>>(&text)
        .map(|configs| SweepGrid { configs })
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn ensure_parent(path: &Path) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Internal(format!("cannot create {}: {e}", dir.display())))?;
    }
    Ok(())
}

fn cmd_run(config: &Path, out: &Path, seed: Option<u64>, quiet: bool) -> Result<(), Failure> {
    let mut cfg: ExperimentConfig = parse_json(config)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    let table = run_experiment(&cfg)?;
    ensure_parent(out)?;
    let file =
        fs::File::create(out).map_err(|e| Failure::Internal(format!("{}: {e}", out.display())))?;
    table.write_csv(BufWriter::new(file))?;
    if !quiet {
        let s = PiSummary::of(&table);
        println!(
            "{}: median pi {:.4}, max pi {:.4}, rows {}",
            cfg.label,
            s.median,
            s.max,
            table.len()
        );
    }
    Ok(())
}

fn cmd_analyze(
    table_path: &Path,
    out: &Path,
    config: Option<&Path>,
    n_agents: usize,
    flags: AnalysisFlags,
    quiet: bool,
) -> Result<(), Failure> {
    let (n_agents, base) = match config {
        Some(p) => {
            let cfg: ExperimentConfig = parse_json(p)?;
            (cfg.network.n_agents, cfg.analysis)
        }
        None => (n_agents, AnalysisOptions::default()),
    };
    let opts = flags.apply(base);
    let file = fs::File::open(table_path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", table_path.display())))?;
    let table = RunTable::read_csv(std::io::BufReader::new(file), n_agents)?;
    let report = analyze(&table, &opts)?;
    ensure_parent(out)?;
    let json =
        serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    fs::write(out, json + "\n")
        .map_err(|e| Failure::Internal(format!("{}: {e}", out.display())))?;
    if !quiet {
        let vars = report.preferred_variables();
        println!(
            "preferred: [{}]; R2 full {:.4}, R2 reduced {:.4}",
            vars.join(", "),
            report.r_squared_full,
            report.r_squared_reduced
        );
    }
    Ok(())
}

struct SweepArgs<'a> {
    config: Option<&'a Path>,
    standard: bool,
    out: &'a Path,
    seed: Option<u64>,
    solutions: Option<usize>,
    flags: AnalysisFlags,
}

fn cmd_sweep(args: SweepArgs<'_>, quiet: bool) -> Result<(), Failure> {
    let mut grid = if args.standard {
        standard_grid(args.seed.unwrap_or(DEFAULT_GRID_SEED))
    } else {
        let path = args
            .config
            .expect("clap requires --config without --standard-grid");
        let mut grid = parse_grid(path)?;
        if let Some(s) = args.seed {
            for (i, c) in grid.configs.iter_mut().enumerate() {
                c.master_seed = mix(s, i as u64);
            }
        }
        grid
    };
    for c in &mut grid.configs {
        c.analysis = args.flags.apply(c.analysis);
    }
    if let Some(n) = args.solutions {
        grid = grid.with_solutions(n);
    }
    let outcome = run_sweep(&grid)?;
    write_sweep_outputs(&outcome, args.out)?;
    for f in &outcome.failures {
        eprintln!("configuration {} failed: {}", f.label, f.error);
    }
    if !quiet {
        print!("{}", significance_text(&outcome.significance));
        println!();
        print!("{}", r_squared_text(&outcome.r_squared));
        println!(
            "{} configurations succeeded, {} failed",
            outcome.runs.len(),
            outcome.failures.len()
        );
    }
    Ok(())
}

fn cmd_report(input: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let path = if input.is_dir() {
        input.join("sweep.json")
    } else {
        input.to_path_buf()
    };
    let summary: SweepSummary = parse_json(&path)?;
    let t1 = significance_text(&summary.significance);
    let t2 = r_squared_text(&summary.r_squared);
    if let Some(dir) = out {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Internal(format!("{}: {e}", dir.display())))?;
        let write = |name: &str, text: &str| {
            fs::write(dir.join(name), text).map_err(|e| Failure::Internal(format!("{name}: {e}")))
        };
        write("table1.txt", &t1)?;
        write("table2.txt", &t2)?;
    }
    print!("{t1}\n{t2}");
    for c in &summary.configurations {
        println!(
            "{:<32} median pi {:.4}  R2 {:.3} / {:.3}  [{}]",
            c.label,
            c.pi.median,
            c.r_squared_full,
            c.r_squared_reduced,
            c.preferred_full.join(", ")
        );
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Run { config, out, seed } => cmd_run(&config, &out, seed, quiet),
        Command::Analyze {
            table,
            out,
            config,
            n_agents,
            analysis,
        } => cmd_analyze(&table, &out, config.as_deref(), n_agents, analysis, quiet),
        Command::Sweep {
            config,
            standard_grid,
            out,
            seed,
            solutions,
            analysis,
        } => cmd_sweep(
            SweepArgs {
                config: config.as_deref(),
                standard: standard_grid,
                out: &out,
                seed,
                solutions,
                flags: analysis,
            },
            quiet,
        ),
        Command::Report { input, out } => cmd_report(&input, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(4)
        }
    }
}
