use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use intercorr::estimators::{
    bayes_sign, bayes_sign_prob, estimate_panel, EstimateReport, DEFAULT_BIAS_SIMULATIONS,
};
use intercorr::model::simulate_panel;
use intercorr::rng::StreamKey;
use intercorr::study::{self, GridConfig, Statistic, StratVar};
use intercorr::{Estimator, PairModel, Panel, SectorParams};

#[derive(Parser)]
#[command(
    name = "intercorr",
    version,
    about = "Inter-sector default correlation from default-count panels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a two-sector panel and write it as CSV
    Simulate(SimulateArgs),
    /// Estimate γ from a panel CSV
    Estimate(EstimateArgs),
    /// Run a Monte Carlo study over a parameter grid
    Study(StudyArgs),
    /// Stratify study results into summary tables
    Tabulate(TabulateArgs),
    /// Posterior probability that one event rate exceeds another
    BayesSign(BayesArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Profile {
    Desk,
    Full,
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of observation dates
    #[arg(long = "T")]
    t: usize,
    /// Cohort size of the first sector at every date
    #[arg(long)]
    n: u64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    rho: f64,
    /// Cohort size of the second sector (defaults to --n)
    #[arg(long, visible_alias = "n2")]
    ntilde: Option<u64>,
    /// Default probability of the second sector (defaults to --p)
    #[arg(long, visible_alias = "p2")]
    ptilde: Option<f64>,
    /// Intra-sector correlation of the second sector (defaults to --rho)
    #[arg(long, visible_alias = "rho2")]
    rhotilde: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: f64,
    /// Random seed; drawn from the clock when absent
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Panel CSV with header t,n,d,n_tilde,d_tilde
    panel: PathBuf,
    /// Comma-separated estimators, or "all"
    #[arg(long, default_value = "IMM")]
    estimators: String,
    /// Simulated panels per IM2/IM3 correction step
    #[arg(long, default_value_t = DEFAULT_BIAS_SIMULATIONS)]
    m: usize,
    /// Seed for the IM2/IM3 simulations
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    /// TOML grid configuration; overrides --profile
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    profile: Profile,
    #[arg(long = "T", value_delimiter = ',')]
    t: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    rho: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    estimators: Option<String>,
    /// Worker threads (defaults to the number of CPUs)
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory: results.csv, config.toml and per-scenario files
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TabulateArgs {
    /// Result CSV written by `study`
    #[arg(long)]
    results: PathBuf,
    /// Stratification variable: T, n, p, rho or gamma
    #[arg(long)]
    strat: String,
    /// Keep only scenarios with this γ before stratifying
    #[arg(long, allow_hyphen_values = true)]
    filter_gamma: Option<f64>,
    /// Comma-separated statistics
    #[arg(long, default_value = "std,rmse")]
    stats: String,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BayesArgs {
    #[arg(allow_negative_numbers = true)]
    d1: i64,
    #[arg(allow_negative_numbers = true)]
    n1: i64,
    #[arg(allow_negative_numbers = true)]
    d2: i64,
    #[arg(allow_negative_numbers = true)]
    n2: i64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::Study(a) => run_study(a),
        Command::Tabulate(a) => tabulate(a),
        Command::BayesSign(a) => bayes(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn clock_seed() -> u64 {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_nanos() as u64);
    StreamKey::new(nanos ^ u64::from(std::process::id())).value()
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let sector_a = SectorParams::new(a.p, a.rho)?;
    let sector_b = SectorParams::new(a.ptilde.unwrap_or(a.p), a.rhotilde.unwrap_or(a.rho))?;
    let model = PairModel::new(sector_a, sector_b, a.gamma)?;
    let n_tilde = a.ntilde.unwrap_or(a.n);
    if a.n == 0 || n_tilde == 0 {
        bail!("cohort sizes must be positive");
    }
    let seed = a.seed.unwrap_or_else(clock_seed);
    eprintln!("seed: {seed}");

    let panel = simulate_panel(
        &model,
        &vec![(a.n, n_tilde); a.t],
        &mut StreamKey::new(seed).rng(),
    )?;
    let mut buf = Vec::new();
    panel.write_csv(&mut buf)?;
    emit(a.out.as_deref(), std::str::from_utf8(&buf)?)
}

const ESTIMATE_HEADER: [&str; 12] = [
    "estimator",
    "value",
    "clamped",
    "degenerate",
    "p_m",
    "p_m_tilde",
    "q_m",
    "p2_m",
    "p2_m_tilde",
    "rho_m",
    "rho_m_tilde",
    "delta_m",
];

fn estimate_row(r: &EstimateReport, num: impl Fn(f64) -> String) -> Vec<String> {
    let e = &r.estimate;
    let mut row = vec![
        e.method.to_string(),
        num(e.value),
        e.clamped.to_string(),
        e.degenerate.to_string(),
    ];
    match &r.dmm {
        Some(d) => row.extend(
            [
                d.p_m,
                d.p_m_tilde,
                d.q_m,
                d.p2_m,
                d.p2_m_tilde,
                d.rho_m,
                d.rho_m_tilde,
                d.delta_m,
            ]
            .map(&num),
        ),
        None => row.extend(std::iter::repeat_n(String::new(), 8)),
    }
    row
}

fn estimate(a: EstimateArgs) -> Result<()> {
    let file =
        fs::File::open(&a.panel).with_context(|| format!("opening {}", a.panel.display()))?;
    let panel = Panel::read_csv(file).with_context(|| format!("reading {}", a.panel.display()))?;
    let which = Estimator::parse_list(&a.estimators)?;
    if which
        .iter()
        .any(|e| matches!(e, Estimator::Im2 | Estimator::Im3))
    {
        if a.m == 0 {
            bail!("--m must be positive for IM2/IM3");
        }
        eprintln!("seed: {}", a.seed);
    }
    let reports = estimate_panel(&panel, &which, a.m, StreamKey::new(a.seed))?;

    let text = match a.format {
        Format::Csv => {
            let mut s = ESTIMATE_HEADER.join(",") + "\n";
            for r in &reports {
                s += &estimate_row(r, |v| v.to_string()).join(",");
                s.push('\n');
            }
            s
        }
        Format::Markdown => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| estimate_row(r, |v| format!("{v:.6}")))
                .collect();
            markdown(&ESTIMATE_HEADER.map(String::from), &rows)
        }
    };
    emit(a.out.as_deref(), &text)
}

fn markdown(header: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain([header[c].len(), 3])
                .max()
                .unwrap_or(3)
        })
        .collect();
    let line = |cells: &[String]| {
        let inner: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!(" {c:>w$} "))
            .collect();
        format!("|{}|\n", inner.join("|"))
    };
    let mut out = line(header);
    let rule: Vec<String> = widths
        .iter()
        .map(|w| format!(" {}: ", "-".repeat(w - 1)))
        .collect();
    out += &format!("|{}|\n", rule.join("|"));
    for r in rows {
        out += &line(r);
    }
    out
}

fn run_study(a: StudyArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            GridConfig::from_toml(&text)?
        }
        None => match a.profile {
            Profile::Desk => GridConfig::desk(),
            Profile::Full => GridConfig::full(),
        },
    };
    if let Some(v) = a.t {
        cfg.t = v;
    }
    if let Some(v) = a.n {
        cfg.n = v;
    }
    if let Some(v) = a.p {
        cfg.p = v;
    }
    if let Some(v) = a.rho {
        cfg.rho = v;
    }
    if let Some(v) = a.gamma {
        cfg.gamma = v;
    }
    if let Some(v) = a.reps {
        cfg.reps = v;
    }
    if let Some(v) = a.m {
        cfg.m = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.estimators {
        cfg.estimators = v.split(',').map(|s| s.trim().to_string()).collect();
    }
    let estimators = cfg.estimator_set()?;
    let grid = cfg.scenarios()?;
    let threads = a
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    fs::write(a.out.join("config.toml"), cfg.to_toml())?;
    eprintln!(
        "seed: {}  scenarios: {}  reps: {}  m: {}  threads: {threads}",
        cfg.seed,
        grid.len(),
        cfg.reps,
        cfg.m
    );

    let outcomes = study::run_grid(&grid, threads, &estimators, Some(&a.out.join("scenarios")))?;
    let mut done = Vec::with_capacity(outcomes.len());
    let mut failed = 0;
    for (spec, outcome) in grid.iter().zip(outcomes) {
        match outcome {
            Ok(s) => done.push(s),
            Err(e) => {
                failed += 1;
                eprintln!(
                    "scenario T={} n={} p={} rho={} gamma={}: {e}",
                    spec.t, spec.n, spec.p, spec.rho, spec.gamma
                );
            }
        }
    }
    let path = a.out.join("results.csv");
    study::write_results(fs::File::create(&path)?, &done)?;
    eprintln!("wrote {} scenarios to {}", done.len(), path.display());
    if failed > 0 {
        bail!("{failed} scenario(s) failed");
    }
    Ok(())
}

fn tabulate(a: TabulateArgs) -> Result<()> {
    let file =
        fs::File::open(&a.results).with_context(|| format!("opening {}", a.results.display()))?;
    let results = study::read_results(file)?;
    let var: StratVar = a.strat.parse()?;
    let stats = Statistic::parse_list(&a.stats)?;
    let table = study::stratify(&results, var, a.filter_gamma)?;
    let text = match a.format {
        Format::Csv => table.to_csv(&stats),
        Format::Markdown => table.to_markdown(&stats),
    };
    emit(a.out.as_deref(), &text)
}

/// Rounds to 12 significant digits and prints without trailing zeros.
fn sig12(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

fn bayes_usage_error(msg: String) -> ! {
    let mut cmd = Cli::command();
    cmd.build();
    let sub = cmd
        .find_subcommand_mut("bayes-sign")
        .expect("subcommand exists");
    sub.error(ErrorKind::ValueValidation, msg).exit()
}

fn bayes(a: BayesArgs) -> Result<()> {
    let counts = [("d1", a.d1), ("n1", a.n1), ("d2", a.d2), ("n2", a.n2)];
    if let Some((name, v)) = counts.iter().find(|(_, v)| *v < 0) {
        bayes_usage_error(format!("{name} = {v} must be nonnegative"));
    }
    for (d, n, label) in [(a.d1, a.n1, "1"), (a.d2, a.n2, "2")] {
        if d > n {
            bayes_usage_error(format!("d{label} = {d} exceeds n{label} = {n}"));
        }
    }
    let (d1, n1, d2, n2) = (a.d1 as u64, a.n1 as u64, a.d2 as u64, a.n2 as u64);
    println!("probability: {}", sig12(bayes_sign_prob(d1, n1, d2, n2)?));
    println!("sign: {}", sig12(bayes_sign(d1, n1, d2, n2)?));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.5), "0.5");
        assert_eq!(sig12(5.0 / 6.0), "0.833333333333");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(-1e-17), "-0.00000000000000001");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
