//! The `glnlab` command line: argument definitions and command drivers.
//!
//! Every command writes its result to a `Write` so that tests can capture
//! output; `main` only parses arguments, picks the sink and maps errors to
//! exit codes.

pub mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use glnlab_core::geometry::{self, DEFAULT_HEIGHT, DEFAULT_TRIALS};
use glnlab_core::grothendieck::{
    product_decomposition_with, square_report_with, MatrixCache, DEFAULT_BASIS_BOUND,
};
use glnlab_core::{
    kl_at_one, kl_polynomial, m_sigma, mu, CacheError, DecompositionError, DecompositionOptions,
    DecompositionReport, GeometryError, KlCache, KlError, Multisegment, PermError, Permutation,
    SegmentError, Tag, TwoToOneWord,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "glnlab",
    version,
    about = "Squares of irreducible GL_n representations via KL polynomials and graded commuting varieties"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory holding the on-disk KL cache
    #[arg(long, global = true, env = "GLNLAB_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Abort KL computations once the cache holds this much (e.g. 512M, 8G)
    #[arg(long, global = true, value_parser = parse_bytes)]
    pub memory_budget: Option<usize>,
    /// Largest support class decomposed without --force
    #[arg(long, global = true, default_value_t = DEFAULT_BASIS_BOUND)]
    pub basis_bound: usize,
    /// Decompose support classes above the basis bound
    #[arg(long, global = true)]
    pub force: bool,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Start from the cache found in --cache-dir
    #[arg(long, global = true)]
    pub resume: bool,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SamplingArgs {
    /// Random fiber points per deficiency estimate
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coefficients are drawn from [-height, height]
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    pub height: i64,
}

impl Default for SamplingArgs {
    fn default() -> Self {
        SamplingArgs {
            trials: DEFAULT_TRIALS,
            seed: 0,
            height: DEFAULT_HEIGHT,
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct InputArgs {
    /// A permutation, standing for m_σ
    #[arg(long, conflicts_with_all = ["mseg1", "mseg2"])]
    pub perm: Option<String>,
    /// First multisegment, e.g. 1-2+2-3 or (-1)-2
    #[arg(long)]
    pub mseg1: Option<String>,
    /// Second multisegment
    #[arg(long, requires = "mseg1")]
    pub mseg2: Option<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Classify the permutations of S_k (one row per equivalence class by default)
    Classify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
        k: u8,
        /// Skip the Grothendieck-group decomposition
        #[arg(long)]
        geometry_only: bool,
        /// One row per permutation instead of per class
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Decompose Z(m1) × Z(m2), or Z(m_σ) × Z(m_σ) with --perm and --square
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        square: bool,
    },
    /// Deficiency of the component attached to a multisegment
    Deficiency {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// The Kazhdan–Lusztig polynomial P_{x,w}
    Kl { x: String, w: String },
    /// List almost smooth squares (1) or wild squares (2) of S_k
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=8))]
        k: u8,
        #[arg(long)]
        geometry_only: bool,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Inspect or maintain the on-disk KL cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum CacheAction {
    Stats,
    /// Delete every cache file in --cache-dir
    Clear,
    /// Merge the cache files of another directory into --cache-dir
    Merge {
        from: PathBuf,
    },
}

fn parse_bytes(s: &str) -> Result<usize, String> {
    let s = s.trim();
    let (digits, mult) = match s.chars().last() {
        Some('k' | 'K') => (&s[..s.len() - 1], 1usize << 10),
        Some('m' | 'M') => (&s[..s.len() - 1], 1 << 20),
        Some('g' | 'G') => (&s[..s.len() - 1], 1 << 30),
        _ => (s, 1),
    };
    let n: usize = digits.parse().map_err(|_| format!("invalid size {s:?}"))?;
    if n == 0 {
        return Err("memory budget must be positive".into());
    }
    n.checked_mul(mult)
        .ok_or_else(|| format!("size {s:?} too large"))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Consistency(String),
    #[error("cache error: {0}")]
    Cache(#[from] CacheError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Consistency(_) => 4,
            CliError::Cache(_) => 5,
            CliError::Io(_) | CliError::Output(_) => 1,
        }
    }
}

impl From<PermError> for CliError {
    fn from(e: PermError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<SegmentError> for CliError {
    fn from(e: SegmentError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<KlError> for CliError {
    fn from(e: KlError) -> Self {
        match e {
            KlError::Perm(p) => p.into(),
            KlError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            KlError::Overflow { .. } | KlError::Inconsistent { .. } => {
                CliError::Consistency(e.to_string())
            }
        }
    }
}

impl From<DecompositionError> for CliError {
    fn from(e: DecompositionError) -> Self {
        match e {
            DecompositionError::Kl(k) => k.into(),
            DecompositionError::Segment(s) => s.into(),
            DecompositionError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            DecompositionError::Consistency(_) => CliError::Consistency(e.to_string()),
            DecompositionError::Juxtaposed(_) => CliError::Parse(e.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::NoTrials => CliError::Parse(e.to_string()),
            _ => CliError::Consistency(e.to_string()),
        }
    }
}

/// One line of a classification table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ClassificationRow {
    pub sigma: String,
    pub class_representative: String,
    pub smooth: bool,
    pub d: usize,
    pub l: Option<u64>,
    pub t: Option<usize>,
    pub tag: String,
}

/// Shared state for one invocation.
pub struct Session {
    pub kl: KlCache,
    pub matrices: MatrixCache,
    pub options: DecompositionOptions,
    cache_dir: Option<PathBuf>,
}

impl Session {
    pub fn new(common: &CommonArgs) -> Result<Self, CliError> {
        let kl = match common.memory_budget {
            Some(b) => KlCache::with_budget(b),
            None => KlCache::new(),
        };
        if let (Some(dir), true) = (&common.cache_dir, common.resume) {
            let n = kl.load_dir_into(dir)?;
            log::info!("resumed {n} cached entries from {}", dir.display());
        }
        Ok(Session {
            kl,
            matrices: MatrixCache::new(),
            options: DecompositionOptions {
                basis_bound: common.basis_bound,
                force: common.force,
                ..Default::default()
            },
            cache_dir: common.cache_dir.clone(),
        })
    }

    /// Writes the KL cache back to the cache directory, if there is one.
    pub fn checkpoint(&self) -> Result<(), CliError> {
        if let Some(dir) = &self.cache_dir {
            let files = self.kl.save_dir(dir)?;
            log::info!(
                "checkpointed {} cache files to {}",
                files.len(),
                dir.display()
            );
        }
        Ok(())
    }
}

/// Position of `sigma` in the lexicographic listing of `S_k`.
fn lex_index(sigma: &Permutation) -> u64 {
    let w = sigma.word();
    let n = w.len();
    let mut idx = 0u64;
    for i in 0..n {
        let smaller = w[i + 1..].iter().filter(|&&v| v < w[i]).count() as u64;
        idx = idx * (n - i) as u64 + smaller;
    }
    idx
}

struct Classified {
    row: ClassificationRow,
    report: Option<DecompositionReport>,
}

fn classify(
    k: usize,
    session: &Session,
    sampling: &SamplingArgs,
    decompose: bool,
    all: bool,
) -> Result<Vec<Classified>, CliError> {
    let perms: Vec<Permutation> = if all {
        Permutation::all(k).collect()
    } else {
        let reps: std::collections::BTreeSet<_> = Permutation::all(k)
            .map(|s| s.class_representative())
            .collect();
        reps.into_iter().collect()
    };
    let mut decompose = decompose;
    if decompose {
        let m = m_sigma(&Permutation::identity(k));
        if let Err(e) = session.matrices.get(&m.add(&m).support(), &session.options) {
            match e {
                DecompositionError::BudgetExceeded { .. } => {
                    log::warn!("{e}; omitting lengths");
                    decompose = false;
                }
                other => return Err(other.into()),
            }
        }
    }
    let total = perms.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let rows = perms
        .par_iter()
        .map(|sigma| -> Result<Classified, CliError> {
            let m = m_sigma(sigma);
            let def = geometry::deficiency(
                &m,
                sampling.trials,
                sampling.seed ^ lex_index(sigma),
                sampling.height,
            )?;
            let report = if decompose {
                Some(square_report_with(
                    sigma,
                    &session.kl,
                    &session.matrices,
                    &session.options,
                )?)
            } else {
                None
            };
            let smooth = sigma.is_smooth();
            let tag = match &report {
                Some(r) => r.tag.expect("square reports carry a tag"),
                None => match def.d {
                    0 => Tag::Smooth,
                    1 => Tag::AlmostSmooth,
                    _ => Tag::Wild,
                },
            };
            if (tag == Tag::Smooth) != smooth {
                return Err(CliError::Consistency(format!(
                    "{sigma}: tag {tag} disagrees with the pattern test (smooth = {smooth})"
                )));
            }
            let n = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
            if n % (total / 10).max(1) == 0 || n == total {
                log::info!("classified {n}/{total}");
            }
            Ok(Classified {
                row: ClassificationRow {
                    sigma: sigma.to_string(),
                    class_representative: sigma.class_representative().to_string(),
                    smooth,
                    d: def.d,
                    l: report.as_ref().map(|r| r.length),
                    t: report.as_ref().map(|r| r.distinct),
                    tag: tag.to_string(),
                },
                report,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(rows)
}

fn parse_perm(s: &str) -> Result<Permutation, CliError> {
    Ok(s.parse::<Permutation>()?)
}

fn parse_mseg(s: &str) -> Result<Multisegment, CliError> {
    Ok(s.parse::<Multisegment>()?)
}

#[derive(Serialize)]
struct KlOutput {
    x: String,
    w: String,
    polynomial: String,
    at_one: u64,
    mu: u64,
}

#[derive(Serialize)]
pub struct Table1Row {
    pub sigma: String,
    pub w: String,
}

#[derive(Serialize)]
pub struct Table2Row {
    pub sigma: String,
    pub l: Option<u64>,
    pub t: Option<usize>,
    pub d: usize,
}

#[derive(Serialize)]
struct CacheSummary {
    directory: String,
    files: usize,
    ranks: Vec<usize>,
    entries: u64,
    columns: u64,
    distinct_polynomials: u64,
}

fn cache_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "klc"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs one command, writing its output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.common.jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| CliError::Output(e.to_string()))?;
            let mut buf = Vec::new();
            let result = pool.install(|| dispatch(cli, &mut buf));
            out.write_all(&buf)?;
            result
        }
        None => dispatch(cli, out),
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let fmt = cli.common.format;
    if let Command::Cache { action } = &cli.command {
        return cmd_cache(action, &cli.common, out);
    }
    let session = Session::new(&cli.common)?;
    let result = match &cli.command {
        Command::Classify {
            k,
            geometry_only,
            all,
            sampling,
        } => cmd_classify(*k as usize, &session, sampling, !geometry_only, *all)
            .and_then(|rows| output::classification(&rows, fmt, out)),
        Command::Decompose { input, square } => {
            cmd_decompose(input, *square, &session).and_then(|r| output::report(&r, fmt, out))
        }
        Command::Deficiency { input, sampling } => {
            cmd_deficiency(input, sampling).and_then(|r| output::deficiency(&r, fmt, out))
        }
        Command::Kl { x, w } => cmd_kl(x, w, &session, fmt, out),
        Command::Table {
            which,
            k,
            geometry_only,
            sampling,
        } => cmd_table(
            *which,
            *k as usize,
            !geometry_only,
            &session,
            sampling,
            fmt,
            out,
        ),
        Command::Cache { .. } => unreachable!(),
    };
    // keep whatever was computed, also when the budget ran out
    let saved = session.checkpoint();
    result?;
    saved
}

pub fn cmd_classify(
    k: usize,
    session: &Session,
    sampling: &SamplingArgs,
    decompose: bool,
    all: bool,
) -> Result<Vec<ClassificationRow>, CliError> {
    Ok(classify(k, session, sampling, decompose, all)?
        .into_iter()
        .map(|c| c.row)
        .collect())
}

pub fn cmd_decompose(
    input: &InputArgs,
    square: bool,
    session: &Session,
) -> Result<DecompositionReport, CliError> {
    match (&input.perm, &input.mseg1, &input.mseg2) {
        (Some(p), None, None) => {
            let sigma = parse_perm(p)?;
            if !square {
                return Err(CliError::Parse("--perm needs --square".into()));
            }
            Ok(square_report_with(
                &sigma,
                &session.kl,
                &session.matrices,
                &session.options,
            )?)
        }
        (None, Some(a), b) => {
            let m1 = parse_mseg(a)?;
            let m2 = match (b, square) {
                (Some(b), false) => parse_mseg(b)?,
                (None, true) => m1.clone(),
                _ => return Err(CliError::Parse("give either --mseg2 or --square".into())),
            };
            Ok(product_decomposition_with(
                &m1,
                &m2,
                &session.kl,
                &session.matrices,
                &session.options,
            )?)
        }
        _ => Err(CliError::Parse(
            "give exactly one of --perm or --mseg1".into(),
        )),
    }
}

pub fn cmd_deficiency(
    input: &InputArgs,
    sampling: &SamplingArgs,
) -> Result<geometry::DeficiencyReport, CliError> {
    let m = match (&input.perm, &input.mseg1, &input.mseg2) {
        (Some(p), None, None) => m_sigma(&parse_perm(p)?),
        (None, Some(a), None) => parse_mseg(a)?,
        _ => {
            return Err(CliError::Parse(
                "give exactly one of --perm or --mseg1".into(),
            ))
        }
    };
    Ok(geometry::deficiency(
        &m,
        sampling.trials,
        sampling.seed,
        sampling.height,
    )?)
}

pub fn cmd_kl(
    x: &str,
    w: &str,
    session: &Session,
    fmt: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (x, w) = (parse_perm(x)?, parse_perm(w)?);
    let p = kl_polynomial(&x, &w, &session.kl)?;
    let result = KlOutput {
        x: x.to_string(),
        w: w.to_string(),
        polynomial: p.to_string(),
        at_one: kl_at_one(&x, &w, &session.kl)?,
        mu: mu(&x, &w, &session.kl)?,
    };
    match fmt {
        Format::Text => writeln!(
            out,
            "P_{{{},{}}} = {}   (value at 1: {}, mu: {})",
            result.x, result.w, result.polynomial, result.at_one, result.mu
        )?,
        _ => output::records(std::slice::from_ref(&result), fmt, out)?,
    }
    Ok(())
}

pub fn cmd_table(
    which: u8,
    k: usize,
    decompose: bool,
    session: &Session,
    sampling: &SamplingArgs,
    fmt: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if which == 1 && !decompose {
        return Err(CliError::Parse(
            "table 1 needs the decomposition; drop --geometry-only".into(),
        ));
    }
    let rows = classify(k, session, sampling, decompose, false)?;
    if which == 1 {
        if rows.iter().any(|c| c.report.is_none()) {
            return Err(CliError::Budget(
                "table 1 needs the decomposition; raise --basis-bound or pass --force".into(),
            ));
        }
        let mut table = Vec::new();
        for c in rows
            .iter()
            .filter(|c| c.row.tag == Tag::AlmostSmooth.to_string())
        {
            let report = c.report.as_ref().expect("checked above");
            let top = report.m1.add(&report.m2);
            let other = report
                .constituents
                .iter()
                .find(|(n, _)| *n != top)
                .ok_or_else(|| {
                    CliError::Consistency(format!("{}: no second constituent", c.row.sigma))
                })?;
            let w = TwoToOneWord::from_multisegment(&other.0).ok_or_else(|| {
                CliError::Consistency(format!(
                    "{}: {} is not of the form n_w",
                    c.row.sigma, other.0
                ))
            })?;
            table.push(Table1Row {
                sigma: c.row.sigma.clone(),
                w: w.to_string(),
            });
        }
        output::table1(&table, fmt, out)
    } else {
        let table: Vec<Table2Row> = rows
            .iter()
            .filter(|c| c.row.tag == Tag::Wild.to_string())
            .map(|c| Table2Row {
                sigma: c.row.sigma.clone(),
                l: c.row.l,
                t: c.row.t,
                d: c.row.d,
            })
            .collect();
        output::table2(&table, fmt, out)
    }
}

pub fn cmd_cache(
    action: &CacheAction,
    common: &CommonArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let dir = common.cache_dir.clone().ok_or_else(|| {
        CliError::Parse("cache commands need --cache-dir or GLNLAB_CACHE_DIR".into())
    })?;
    match action {
        CacheAction::Stats => {
            let cache = KlCache::new();
            cache.load_dir_into(&dir)?;
            let stats = cache.stats();
            let summary = CacheSummary {
                directory: dir.display().to_string(),
                files: cache_files(&dir)?.len(),
                ranks: cache.ranks(),
                entries: stats.entries,
                columns: stats.columns,
                distinct_polynomials: stats.distinct_polynomials,
            };
            match common.format {
                Format::Text => writeln!(
                    out,
                    "{}: {} files, ranks {:?}, {} columns, {} entries, {} distinct polynomials",
                    summary.directory,
                    summary.files,
                    summary.ranks,
                    summary.columns,
                    summary.entries,
                    summary.distinct_polynomials
                )?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut *out, &summary)
                        .map_err(|e| CliError::Output(e.to_string()))?;
                    writeln!(out)?;
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(&mut *out);
                    w.write_record([
                        "directory",
                        "files",
                        "ranks",
                        "entries",
                        "columns",
                        "distinct_polynomials",
                    ])
                    .map_err(|e| CliError::Output(e.to_string()))?;
                    let ranks: Vec<String> = summary.ranks.iter().map(|r| r.to_string()).collect();
                    w.write_record([
                        summary.directory.clone(),
                        summary.files.to_string(),
                        ranks.join(";"),
                        summary.entries.to_string(),
                        summary.columns.to_string(),
                        summary.distinct_polynomials.to_string(),
                    ])
                    .map_err(|e| CliError::Output(e.to_string()))?;
                    w.flush()?;
                }
            }
        }
        CacheAction::Clear => {
            let files = cache_files(&dir)?;
            for f in &files {
                std::fs::remove_file(f)?;
            }
            writeln!(
                out,
                "removed {} cache files from {}",
                files.len(),
                dir.display()
            )?;
        }
        CacheAction::Merge { from } => {
            let cache = KlCache::new();
            cache.load_dir_into(&dir)?;
            let added = cache.load_dir_into(from)?;
            let files = cache.save_dir(&dir)?;
            writeln!(
                out,
                "merged {added} entries from {}; {} now holds {} files",
                from.display(),
                dir.display(),
                files.len()
            )?;
        }
    }
    Ok(())
}

/// Counts of each tag, for the text summary.
pub fn tag_counts(rows: &[ClassificationRow]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for r in rows {
        *counts.entry(r.tag.clone()).or_insert(0) += 1;
    }
    counts
}
