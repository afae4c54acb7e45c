//! Command-line interface: `fetch`, `extract`, `score`, `report`, and
//! `oracle` subcommands over a shared config file.
//!
//! Exit codes: 0 success, 1 configuration error, 2 partial failure
//! (failed days or oracle mismatches), 3 output error.

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use newsim::extract::{load_config_file, ConfigError};
use newsim::memento::{CacheStore, Fetcher, StoreTransport};
use newsim::pipeline::{
    self, build_fetcher, parse_month, parse_target_time, PipelineError, RunConfig, RunManifest,
};

#[derive(Parser)]
#[command(
    name = "newsim",
    version,
    about = "Measure day-by-day similarity of top news stories across archived homepages"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Populate the cache: crawl a date range, or import a local
    /// response store with --seed.
    Fetch(FetchArgs),
    /// Select mementos and extract ranked stories, without fetching
    /// story documents or scoring.
    Extract(ExtractArgs),
    /// Full per-day scoring over the date range.
    Score(ScoreArgs),
    /// Archival-density report (capture hours, selection offsets) for
    /// one month.
    Report(ReportArgs),
    /// Recompute all manifest scores with the brute-force oracle and
    /// compare.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the site/archive config file.
    #[arg(long)]
    config: PathBuf,
    /// Time of day (UTC) to aim the daily selection at, as HH:MMZ.
    #[arg(long, default_value = "01:00Z")]
    target_time: String,
    /// Fixed UTC offset in hours for report hour buckets.
    #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
    utc_offset: i32,
    /// Cache directory.
    #[arg(long)]
    cache: PathBuf,
    /// Serve everything from the cache; any miss is an error.
    #[arg(long)]
    offline: bool,
}

#[derive(Args)]
struct RangeArgs {
    /// First date of the range (inclusive), YYYY-MM-DD.
    #[arg(long)]
    from: NaiveDate,
    /// Last date of the range (inclusive), YYYY-MM-DD.
    #[arg(long)]
    to: NaiveDate,
    /// Story ranks to score, e.g. --k 1,3,10.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 3, 10])]
    k: Vec<usize>,
}

#[derive(Args)]
struct FetchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Import a response store (JSON index of canned responses)
    /// instead of crawling.
    #[arg(long)]
    seed: Option<PathBuf>,
    #[arg(long, required_unless_present = "seed")]
    from: Option<NaiveDate>,
    #[arg(long, required_unless_present = "seed")]
    to: Option<NaiveDate>,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 3, 10])]
    k: Vec<usize>,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    range: RangeArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    range: RangeArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Recompute days already present in the manifest.
    #[arg(long)]
    force: bool,
    /// Dump each day's similarity matrix under out/matrices/.
    #[arg(long)]
    dump_matrices: bool,
    /// Reject selections farther than this many minutes from the
    /// target time.
    #[arg(long)]
    max_offset: Option<f64>,
    /// Mask same-site pairs out of the collection score.
    #[arg(long)]
    mask_intra_site: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Month to report on, YYYY-MM.
    #[arg(long)]
    month: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Cache directory of the run to verify.
    #[arg(long)]
    cache: PathBuf,
    /// Output directory of the run to verify.
    #[arg(long)]
    out: PathBuf,
}

pub fn main_exit_code() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successes, everything else is a
            // usage/configuration error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 1,
            CliError::Pipeline(PipelineError::Config(_)) => 1,
            CliError::Pipeline(_) => 3,
        }
    }
}

fn build_run_config(
    common: &CommonArgs,
    from: NaiveDate,
    to: NaiveDate,
    k: &[usize],
    out: PathBuf,
) -> Result<RunConfig, CliError> {
    let file = load_config_file(&common.config)?;
    let mut cfg =
        RunConfig::from_config_file(file, from, to, common.cache.clone(), out)?;
    cfg.target_time = parse_target_time(&common.target_time).map_err(CliError::Input)?;
    cfg.utc_offset_hours = common.utc_offset;
    cfg.k_values = k.to_vec();
    cfg.normalize_k_values();
    cfg.offline = common.offline;
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Fetch(args) => fetch(args),
        Command::Extract(args) => extract(args),
        Command::Score(args) => score(args),
        Command::Report(args) => report(args),
        Command::Oracle(args) => oracle(args),
    }
}

fn fetch(args: FetchArgs) -> Result<i32, CliError> {
    if let Some(seed) = &args.seed {
        let store = StoreTransport::load(seed)
            .map_err(|e| CliError::Input(format!("cannot load store {}: {e}", seed.display())))?;
        let uris = store.uris();
        let cache = CacheStore::open(&args.common.cache).map_err(|e| {
            CliError::Pipeline(PipelineError::OutputUnwritable {
                path: args.common.cache.clone(),
                message: e.to_string(),
            })
        })?;
        let policy = newsim::memento::FetchPolicy {
            min_host_interval: std::time::Duration::ZERO,
            ..Default::default()
        };
        let fetcher = Fetcher::online(Box::new(store), cache, policy);
        for uri in &uris {
            // Error outcomes (404s, redirect loops) are cached too;
            // that is the point of seeding.
            let _ = fetcher.fetch(uri);
        }
        println!("seeded {} URIs into {}", uris.len(), args.common.cache.display());
        return Ok(0);
    }

    let (from, to) = (args.from.expect("clap enforces"), args.to.expect("clap enforces"));
    let cfg = build_run_config(&args.common, from, to, &args.k, args.common.cache.clone())?;
    let fetcher = build_fetcher(&cfg, None)?;
    let stories = pipeline::run_range_fetch(&cfg, &fetcher)?;
    println!("cache populated for {} day(s), {stories} story document(s)", cfg.dates().count());
    Ok(0)
}

fn extract(args: ExtractArgs) -> Result<i32, CliError> {
    let cfg = build_run_config(
        &args.common,
        args.range.from,
        args.range.to,
        &args.range.k,
        args.out.clone(),
    )?;
    let fetcher = build_fetcher(&cfg, None)?;
    let results = pipeline::run_range_extract(&cfg, &fetcher)?;

    std::fs::create_dir_all(&args.out).map_err(|e| {
        CliError::Pipeline(PipelineError::OutputUnwritable {
            path: args.out.clone(),
            message: e.to_string(),
        })
    })?;
    let mut manifest = RunManifest::new();
    let mut n_stories = 0;
    for day in &results {
        n_stories += day.sites.iter().map(|s| s.stories.len()).sum::<usize>();
        manifest.days.insert(day.date, day.clone());
    }
    let path = args.out.join("stories.json");
    manifest.save(&path).map_err(CliError::Pipeline)?;
    println!("extracted {n_stories} stories over {} day(s) -> {}", results.len(), path.display());
    Ok(0)
}

fn score(args: ScoreArgs) -> Result<i32, CliError> {
    let mut cfg = build_run_config(
        &args.common,
        args.range.from,
        args.range.to,
        &args.range.k,
        args.out.clone(),
    )?;
    cfg.force = args.force;
    cfg.dump_matrices = args.dump_matrices;
    cfg.max_offset_minutes = args.max_offset;
    cfg.mask_intra_site = args.mask_intra_site;

    let fetcher = build_fetcher(&cfg, None)?;
    let outcome = pipeline::run_range(&cfg, &fetcher)?;
    for day in &outcome.results {
        for kr in &day.per_k {
            match kr.score {
                Some(s) => println!(
                    "{} k={} s={s:.6} n={} excluded={}",
                    day.date,
                    kr.k,
                    kr.n_documents,
                    kr.excluded.len()
                ),
                None => println!(
                    "{} k={} skipped ({})",
                    day.date,
                    kr.k,
                    kr.skip_reason.as_deref().unwrap_or("no score")
                ),
            }
        }
    }
    eprintln!(
        "scored {} day(s) ({} run, {} resumed) -> {}",
        outcome.results.len(),
        outcome.days_run,
        outcome.days_skipped,
        cfg.out_dir.display()
    );
    Ok(if outcome.any_failed() { 2 } else { 0 })
}

fn report(args: ReportArgs) -> Result<i32, CliError> {
    let month = parse_month(&args.month).map_err(CliError::Input)?;
    let first = NaiveDate::from_ymd_opt(month.0, month.1, 1).unwrap();
    let cfg = build_run_config(&args.common, first, first, &[1], args.out.clone())?;
    let fetcher = build_fetcher(&cfg, None)?;
    let report = pipeline::report_archival(&cfg, &fetcher, month)?;
    println!(
        "{} site histogram row(s), {} offset row(s) -> {}",
        report.hours.len(),
        report.offsets.len(),
        cfg.out_dir.display()
    );
    Ok(0)
}

fn oracle(args: OracleArgs) -> Result<i32, CliError> {
    let comparisons = pipeline::verify_scores(&args.out, &args.cache)?;
    let mut mismatches = 0;
    for c in &comparisons {
        let verdict = if c.matches() { "ok" } else { "MISMATCH" };
        if !c.matches() {
            mismatches += 1;
        }
        let fmt = |v: Option<f64>| v.map(|s| format!("{s:.12}")).unwrap_or_else(|| "-".into());
        println!(
            "{} k={} pipeline={} oracle={} {verdict}",
            c.date,
            c.k,
            fmt(c.pipeline),
            fmt(c.oracle)
        );
    }
    if mismatches > 0 {
        eprintln!("{mismatches} mismatch(es) beyond {:e}", pipeline::TOLERANCE);
        Ok(2)
    } else {
        println!("all {} comparisons within {:e}", comparisons.len(), pipeline::TOLERANCE);
        Ok(0)
    }
}
