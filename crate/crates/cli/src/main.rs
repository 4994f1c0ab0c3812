//! `surface-mcmc`: seeded decoding campaigns and deterministic self-checks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};

use clap::{Args, Parser, Subcommand};
use surface_mcmc::harness::{
    exit_code, fatal_pattern_suite, model_name, oracle_check, run_campaign, write_plot_files, write_results_csv,
    write_trial_log, Algorithm, ExperimentConfig, OracleCheckConfig, ScalingConfig, ScalingReport,
};
use surface_mcmc::noise::NoiseKind;
use surface_mcmc::Error;

static CANCEL: AtomicBool = AtomicBool::new(false);

#[derive(Parser)]
#[command(name = "surface-mcmc", version, about = "Surface-code decoding benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Logical error rates of the selected decoders over a grid of (L, p).
    Campaign(CampaignArgs),
    /// Low-weight patterns that separate standard from enhanced matching.
    FatalPatterns {
        #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
        distances: Vec<usize>,
    },
    /// Smallest sampler length that keeps up with matching, per distance.
    ScalingProbe(ScalingArgs),
    /// Compare decoders with exhaustive enumeration at distance 3.
    OracleCheck(OracleArgs),
}

/// Flags shared by commands that read an experiment file. Every flag
/// overrides the corresponding file key.
#[derive(Args)]
struct ConfigArgs {
    /// TOML file with experiment keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    distances: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_model)]
    model: Option<NoiseKind>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Relative X,Y,Z weights for the general model.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pauli_ratio: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; overrides SURFMC_WORKERS and the file.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct CampaignArgs {
    #[command(flatten)]
    common: ConfigArgs,
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm)]
    algorithms: Option<Vec<Algorithm>>,
    #[arg(long)]
    n_sample: Option<u64>,
    #[arg(long)]
    beta_star_factor: Option<f64>,
    #[arg(long)]
    free_energy_points: Option<usize>,
    #[arg(long)]
    free_energy_samples: Option<u64>,
    #[arg(long)]
    target_logical_errors: Option<u64>,
    #[arg(long)]
    max_trials: Option<u64>,
    #[arg(long)]
    batch_size: Option<u64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    plot_dir: Option<PathBuf>,
    #[arg(long)]
    trial_log: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    #[command(flatten)]
    common: ConfigArgs,
    /// Largest sampler length tried.
    #[arg(long, default_value_t = 1 << 20)]
    max_n_sample: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, default_value_t = 500)]
    syndromes: u64,
    /// Sampler steps per class in units of L^4.
    #[arg(long, default_value_t = 10)]
    n_sample_factor: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_model(s: &str) -> Result<NoiseKind, String> {
    [NoiseKind::Depolarizing, NoiseKind::IndependentXz, NoiseKind::GeneralPauli]
        .into_iter()
        .find(|k| model_name(*k) == s)
        .ok_or_else(|| format!("unknown model `{s}` (depolarizing, independent_xz, general_pauli)"))
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    Algorithm::from_name(s).map_err(|e| e.to_string())
}

impl ConfigArgs {
    /// File, then environment, then flags.
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.apply_env()?;
        if let Some(v) = &self.distances {
            cfg.distances = v.clone();
        }
        if let Some(m) = self.model {
            cfg.model = m;
        }
        if let Some(v) = &self.p {
            cfg.p = v.clone();
        }
        if let Some(r) = &self.pauli_ratio {
            cfg.pauli_ratio = Some([r[0], r[1], r[2]]);
        }
        if let Some(n) = self.trials {
            cfg.trials = Some(n);
            cfg.target_logical_errors = None;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        Ok(cfg)
    }
}

impl CampaignArgs {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = self.common.load()?;
        if let Some(v) = &self.algorithms {
            cfg.algorithms = v.clone();
        }
        if self.n_sample.is_some() {
            cfg.n_sample = self.n_sample;
        }
        if self.beta_star_factor.is_some() {
            cfg.beta_star_factor = self.beta_star_factor;
        }
        if let Some(n) = self.free_energy_points {
            cfg.free_energy_points = n;
        }
        if self.free_energy_samples.is_some() {
            cfg.free_energy_samples = self.free_energy_samples;
        }
        if let Some(t) = self.target_logical_errors {
            cfg.target_logical_errors = Some(t);
            cfg.trials = None;
        }
        if let Some(n) = self.max_trials {
            cfg.max_trials = n;
        }
        if let Some(n) = self.batch_size {
            cfg.batch_size = n;
        }
        if self.output.is_some() {
            cfg.output = self.output.clone();
        }
        if self.plot_dir.is_some() {
            cfg.plot_dir = self.plot_dir.clone();
        }
        if self.trial_log.is_some() {
            cfg.trial_log = self.trial_log.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn campaign(args: &CampaignArgs) -> Result<u8, Error> {
    let cfg = args.load()?;
    ctrlc::set_handler(|| {
        if CANCEL.swap(true, Ordering::SeqCst) {
            std::process::exit(130);
        }
        eprintln!("interrupted: finishing the current batch (press again to abort)");
    })
    .map_err(|e| Error::Config(e.to_string()))?;
    let result = run_campaign(&cfg, &CANCEL)?;
    let rows = result.rows();
    match &cfg.output {
        Some(path) => {
            let mut w = create(path)?;
            write_results_csv(&rows, result.truncated, &mut w)?;
            w.flush()?;
        }
        None => write_results_csv(&rows, result.truncated, io::stdout().lock())?,
    }
    if let Some(dir) = &cfg.plot_dir {
        std::fs::create_dir_all(dir)?;
        write_plot_files(&result, dir)?;
    }
    if let Some(path) = &cfg.trial_log {
        let mut w = create(path)?;
        write_trial_log(&result, &mut w)?;
        w.flush()?;
    }
    if result.truncated {
        eprintln!("campaign truncated; partial results written");
    }
    Ok(exit_code::SUCCESS as u8)
}

fn print_scaling(r: &ScalingReport) {
    println!("L,n_sample,lower,failures_best_matching,failures_sampler,trials");
    for p in &r.points {
        let n = p.n_sample.map_or_else(|| "unresolved".to_string(), |n| n.to_string());
        println!("{},{},{},{},{},{}", p.distance, n, p.lower, p.failures_best_matching, p.failures_sampler, p.trials);
    }
    match r.fit {
        Some(f) => println!("# fit n_sample = {:.4} * L^{:.3}", f.prefactor, f.exponent),
        None => println!("# no fit: fewer than two distances resolved"),
    }
}

fn scaling(args: &ScalingArgs) -> Result<u8, Error> {
    let cfg = args.common.load()?;
    if cfg.distances.is_empty() {
        return Err(Error::Config("no code distances given".into()));
    }
    let p = match cfg.p.as_slice() {
        [p] => *p,
        _ => return Err(Error::Config("the scaling probe takes exactly one error rate".into())),
    };
    let trials = match (cfg.trials, cfg.target_logical_errors) {
        (Some(t), _) if t > 0 => t,
        _ => return Err(Error::Config("the scaling probe needs a positive --trials".into())),
    };
    let seed = cfg.seed.ok_or_else(|| Error::Config("a master seed is required".into()))?;
    cfg.noise_model(p)?.beta_bar().map_err(|e| Error::Config(e.to_string()))?;
    let report = surface_mcmc::harness::scaling_probe(&ScalingConfig {
        model: cfg.model,
        p,
        distances: cfg.distances.clone(),
        trials,
        seed,
        max_n_sample: args.max_n_sample,
        workers: cfg.workers,
    })?;
    print_scaling(&report);
    Ok(exit_code::SUCCESS as u8)
}

fn verdict(passed: bool) -> u8 {
    if passed {
        exit_code::SUCCESS as u8
    } else {
        exit_code::ACCEPTANCE_FAILURE as u8
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Campaign(a) => campaign(&a),
        Command::FatalPatterns { distances } => {
            let r = fatal_pattern_suite(&distances).map_err(|e| Error::Config(e.to_string()))?;
            print!("{r}");
            Ok(verdict(r.passed()))
        }
        Command::ScalingProbe(a) => scaling(&a),
        Command::OracleCheck(a) => {
            let mut workers = a.workers;
            if workers.is_none() {
                let mut env = ExperimentConfig::default();
                env.apply_env()?;
                workers = env.workers;
            }
            let r = oracle_check(&OracleCheckConfig {
                p: a.p,
                syndromes: a.syndromes,
                n_sample_factor: a.n_sample_factor,
                seed: a.seed,
                workers,
            })?;
            print!("{r}");
            println!("minimality {}", if r.minimality_passed() { "PASS" } else { "FAIL" });
            println!("agreement  {}", if r.agreement_passed() { "PASS" } else { "FAIL" });
            Ok(verdict(r.passed()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit_code::CONFIG_ERROR as u8
            } else {
                exit_code::SUCCESS as u8
            });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code::CONFIG_ERROR as u8)
        }
    }
}
