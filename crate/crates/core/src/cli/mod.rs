//! Command-line front end: `ci`, `simulate`, `analyze` and `qq`.
//!
//! Exit codes: 0 success, 1 parse error (flags, data file, config syntax),
//! 2 validation error, 3 infeasible configuration.

pub mod data;
pub mod output;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    budget_ratio_priv_vs_pub, budget_ratio_str_vs_pop, extrinsic_variance, noisy_size_cv,
    private_size_warnings, sampling_weights, theoretical_width_ratio, twr_lower_bound,
};
use crate::budget::PrivacyBudget;
use crate::ci::{AlgorithmTag, CiResult};
use crate::design::Design;
use crate::dp_ci::{run_algorithm, DpOptions, PrivateStratumRelease};
use crate::error::{Error, Result};
use crate::random::RandomStream;
use crate::sim::{qq_data, Experiment, ExperimentConfig};

use data::StratumData;
use output::{fmt_f64, fmt_opt, to_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    #[value(name = "nonprivate")]
    NonPrivate,
    #[value(name = "str-pub")]
    StrPub,
    #[value(name = "pop-pub")]
    PopPub,
    #[value(name = "str-priv")]
    StrPriv,
}

impl From<AlgorithmArg> for AlgorithmTag {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::NonPrivate => AlgorithmTag::NonPrivate,
            AlgorithmArg::StrPub => AlgorithmTag::StrNzPubSz,
            AlgorithmArg::PopPub => AlgorithmTag::PopNzPubSz,
            AlgorithmArg::StrPriv => AlgorithmTag::StrNzPrivSz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "stratdp", version, about = "zCDP confidence intervals for stratified proportions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute an interval from a stratum data file.
    Ci {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        /// Total zCDP budget; required for private algorithms.
        #[arg(long)]
        rho: Option<f64>,
        /// Fraction of rho given to the first release.
        #[arg(long, default_value_t = 0.5)]
        split: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        clip_proportions: bool,
        #[arg(long)]
        clip_interval: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run a simulation config and write summary.json (and reps.csv).
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write one row per repetition and algorithm to reps.csv.
        #[arg(long)]
        reps: bool,
    },
    /// Extrinsic variances, budget ratios and width ratios as CSV.
    Analyze {
        #[arg(long, conflicts_with = "input")]
        population_size: Option<u64>,
        #[arg(long, conflicts_with = "input")]
        sample_size: Option<u64>,
        /// Stratum data file; counts supply `p_h` when `--p` is absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// True (or assumed) proportion, used for width ratios.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 0.5)]
        split: f64,
    },
    /// Paired theoretical and empirical quantiles of the point estimate.
    Qq {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 99)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::NonPrivate)]
        algorithm: AlgorithmArg,
    },
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Io(_) => 1,
        Error::Infeasible(_) => 3,
        _ => 2,
    }
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match execute(cli.command, stderr) {
        Ok(text) => match stdout.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                1
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command, stderr: &mut dyn Write) -> Result<String> {
    match command {
        Command::Ci {
            input,
            algorithm,
            rho,
            split,
            alpha,
            seed,
            clip_proportions,
            clip_interval,
            format,
        } => {
            let data = StratumData::from_path(&input)?;
            let opts = DpOptions {
                alpha,
                clip_proportions,
                clip_interval,
            };
            let (ci, releases) = cmd_ci(&data, algorithm.into(), rho, split, seed, &opts)?;
            if algorithm == AlgorithmArg::StrPriv {
                let (design, _) = data.to_design()?;
                let budget = PrivacyBudget::with_split(rho.unwrap_or(1.0), split)?;
                for w in private_size_warnings(&design, &budget) {
                    let _ = writeln!(stderr, "warning: {w}");
                }
            }
            Ok(match format {
                Format::Json => to_json(&CiOutput {
                    interval: &ci,
                    strata: &releases,
                }),
                Format::Csv => ci_csv(&ci, &releases),
            })
        }
        Command::Simulate { config, out, reps } => {
            let config = ExperimentConfig::from_path(&config)?;
            cmd_simulate(&config, &out, reps)?;
            Ok(String::new())
        }
        Command::Analyze {
            population_size,
            sample_size,
            input,
            p,
            rho,
            split,
        } => {
            let budget = PrivacyBudget::with_split(rho, split)?;
            let (design, p_h) = match input {
                Some(path) => {
                    let (design, counts) = StratumData::from_path(path)?.to_design()?;
                    let p_h: Vec<f64> = match p {
                        Some(p) => vec![p; design.len()],
                        None => counts
                            .counts()
                            .iter()
                            .zip(design.strata())
                            .map(|(&c, s)| c as f64 / s.sample_size() as f64)
                            .collect(),
                    };
                    (design, Some(p_h))
                }
                None => {
                    let (Some(big_n), Some(n)) = (population_size, sample_size) else {
                        return Err(Error::InvalidArgument(
                            "give --population-size and --sample-size, or --input".into(),
                        ));
                    };
                    (Design::from_sizes(&[(big_n, n)])?, p.map(|p| vec![p]))
                }
            };
            cmd_analyze(&design, p_h.as_deref(), &budget)
        }
        Command::Qq {
            config,
            grid,
            algorithm,
        } => {
            let config = ExperimentConfig::from_path(&config)?;
            let rows = qq_data(&config, grid, algorithm.into())?;
            let mut s = String::from("q,theoretical,empirical\n");
            for r in rows {
                let _ = writeln!(s, "{},{},{}", fmt_f64(r.q), fmt_f64(r.theoretical), fmt_f64(r.empirical));
            }
            Ok(s)
        }
    }
}

#[derive(Serialize)]
struct CiOutput<'a> {
    interval: &'a CiResult,
    strata: &'a [PrivateStratumRelease],
}

/// Run one algorithm on parsed data.
pub fn cmd_ci(
    data: &StratumData,
    algorithm: AlgorithmTag,
    rho: Option<f64>,
    split: f64,
    seed: u64,
    opts: &DpOptions,
) -> Result<(CiResult, Vec<PrivateStratumRelease>)> {
    let (design, counts) = data.to_design()?;
    let budget = match (algorithm, rho) {
        (AlgorithmTag::NonPrivate, None) => PrivacyBudget::new(1.0)?,
        (_, Some(rho)) => PrivacyBudget::with_split(rho, split)?,
        (_, None) => {
            return Err(Error::InvalidArgument(format!("--rho is required for {algorithm}")))
        }
    };
    if matches!(algorithm, AlgorithmTag::PopNzPubSz | AlgorithmTag::StrNzPrivSz) {
        budget
            .require_split()
            .map_err(|_| Error::Infeasible(format!("--split {split} leaves no budget for one release")))?;
    }
    run_algorithm(algorithm, &RandomStream::new(seed, 0), &design, &counts, &budget, opts)
}

fn ci_csv(ci: &CiResult, releases: &[PrivateStratumRelease]) -> String {
    let mut s = String::from("scope,field,value\n");
    let mut row = |scope: &str, field: &str, value: String| {
        let _ = writeln!(s, "{scope},{field},{value}");
    };
    row("interval", "algorithm", ci.algorithm.to_string());
    row("interval", "point_estimate", fmt_f64(ci.point_estimate));
    row("interval", "variance_estimate", fmt_f64(ci.variance_estimate));
    row("interval", "lower", fmt_f64(ci.lower));
    row("interval", "upper", fmt_f64(ci.upper));
    row("interval", "alpha", fmt_f64(ci.alpha));
    row("interval", "rho", fmt_opt(ci.budget_spent.map(|b| b.rho())));
    row("interval", "rho1", fmt_opt(ci.budget_spent.map(|b| b.rho1())));
    row("interval", "rho2", fmt_opt(ci.budget_spent.map(|b| b.rho2())));
    let c = &ci.clipped;
    for (name, flag) in [
        ("proportion_clipped", c.proportion_clipped),
        ("interval_clipped", c.interval_clipped),
        ("variance_floored", c.variance_floored),
        ("noisy_size_floored", c.noisy_size_floored),
        ("fpc_floored", c.fpc_floored),
    ] {
        row("interval", name, flag.to_string());
    }
    for r in releases {
        let scope = format!("stratum:{}", r.stratum);
        row(&scope, "p_tilde", fmt_f64(r.p_tilde));
        row(&scope, "v_tilde", fmt_f64(r.v_tilde));
        row(&scope, "c_tilde", fmt_opt(r.c_tilde));
        row(&scope, "n_tilde", fmt_opt(r.n_tilde));
    }
    s
}

/// Run a configuration and write `summary.json` (plus `reps.csv` when
/// `write_reps` is set) into `out`.
pub fn cmd_simulate(config: &ExperimentConfig, out: &std::path::Path, write_reps: bool) -> Result<()> {
    let exp = Experiment::new(config.clone())?;
    let (report, records) = exp.run(write_reps)?;
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("summary.json"), to_json(&report))?;
    if write_reps {
        let mut s = String::from("grid_index,rep,algorithm,covered,width,lower,upper\n");
        for rec in &records {
            for o in &rec.outcomes {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    rec.grid_index,
                    rec.repetition,
                    o.algorithm,
                    o.covered as u8,
                    fmt_f64(o.width()),
                    fmt_f64(o.lower),
                    fmt_f64(o.upper)
                );
            }
        }
        std::fs::write(out.join("reps.csv"), s)?;
    }
    Ok(())
}

/// Long-form CSV `quantity,algorithm,value`.
pub fn cmd_analyze(design: &Design, p_h: Option<&[f64]>, budget: &PrivacyBudget) -> Result<String> {
    let mut s = String::from("quantity,algorithm,value\n");
    let mut row = |q: &str, a: &str, v: f64| {
        let _ = writeln!(s, "{q},{a},{}", fmt_f64(v));
    };
    let u = sampling_weights(design);
    for (h, x) in u.iter().enumerate() {
        row(&format!("sampling_weight:{h}"), "", *x);
    }
    for alg in AlgorithmTag::PRIVATE {
        if alg == AlgorithmTag::StrNzPrivSz && p_h.is_none() {
            continue;
        }
        row("extrinsic_variance", alg.as_str(), extrinsic_variance(design, alg, budget, p_h)?);
    }
    row("budget_ratio_str_vs_pop", "", budget_ratio_str_vs_pop(&u)?);
    if let Some(p_h) = p_h {
        row("budget_ratio_priv_vs_pub", "", budget_ratio_priv_vs_pub(&u, p_h)?);
    }
    let single = design.strata().first().filter(|_| design.len() == 1);
    if let Some(st) = single {
        if let Some(&p) = p_h.and_then(|p| p.first()) {
            for alg in AlgorithmTag::PRIVATE {
                let t = theoretical_width_ratio(st.population_size(), st.sample_size(), p, budget, alg)?;
                row("twr", alg.as_str(), t);
            }
        }
        for alg in AlgorithmTag::PRIVATE {
            row("twr_lower_bound", alg.as_str(), twr_lower_bound(st.sample_size(), budget, alg)?);
        }
    }
    let max_cv = noisy_size_cv(design, budget).into_iter().fold(0.0, f64::max);
    row("noisy_size_cv_max", AlgorithmTag::StrNzPrivSz.as_str(), max_cv);
    Ok(s)
}
