//! The `besov` command line. Everything except process exit lives here so it
//! can be driven from tests.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 failed computation.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bernstein::bruteforce_bernstein;
use crate::classifier::{classify, embedding_flags, params, EmbeddingVerdict, Setting, Verdict};
use crate::error::{ComputeError, ParamError};
use crate::exponent::{Exponent, Real};
use crate::gliding_hump::{glide, random_sparse_basis, FiniteBasisOracle, FullSpaceOracle, SubspaceOracle};
use crate::haar::{besov_seq_norm, haar_analyze, support_index_sets, Interval, PiecewiseConstant};
use crate::spaces::{Level, SpaceParams, TruncatedMixedSpace, WeightFlavor};
use crate::witnesses::{
    basis_to_csv, basis_to_json, constant_block_witness, diagonal_witness_basis, rademacher_witness_lower_bound,
};

pub const THREADS_ENV: &str = "BESOV_ATLAS_THREADS";

#[derive(Parser, Debug, Serialize)]
#[command(name = "besov", version, about = "Strict singularity of Besov embeddings, with numerical witnesses")]
pub struct Cli {
    #[command(subcommand)]
    #[serde(flatten)]
    pub command: Command,
    /// Write the report to this file; file reports carry the full configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// json, csv or text; each command has its own default.
    #[arg(long, value_enum, global = true)]
    pub output: Option<OutputFormat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Classify one embedding B^{s0}_{p0 q0} -> B^{s1}_{p1 q1}.
    Classify(ClassifyArgs),
    /// Verdict table over a parameter grid.
    Atlas(AtlasArgs),
    /// Brute-force Bernstein numbers between two truncated mixed spaces.
    Bernstein(BernsteinArgs),
    /// Witness subspaces: rademacher, diagonal or constant-block.
    Witness(WitnessArgs),
    /// Gliding hump construction against a full or random subspace.
    Glide(GlideArgs),
    /// Haar coefficients, Besov sequence norm and support index sets.
    Haar(HaarArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub setting: Setting,
    #[arg(long)]
    pub p0: Exponent,
    #[arg(long)]
    pub q0: Exponent,
    #[arg(long, allow_hyphen_values = true)]
    pub s0: Real,
    #[arg(long)]
    pub p1: Exponent,
    #[arg(long)]
    pub q1: Exponent,
    #[arg(long, allow_hyphen_values = true)]
    pub s1: Real,
    #[arg(long)]
    pub n: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct AtlasArgs {
    /// Restrict to one setting (default: all three).
    #[arg(long)]
    pub setting: Option<Setting>,
    #[arg(long, value_delimiter = ',', default_value = "1/2,1,2,4,inf")]
    pub p: Vec<Exponent>,
    #[arg(long, value_delimiter = ',', default_value = "1/2,1,2,4,inf")]
    pub q: Vec<Exponent>,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub n: Vec<u32>,
    /// s0 - s1 minus its critical value (g on domains, n/p0 - n/p1 otherwise); s1 = 0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-1/2,0,1/2")]
    pub shifts: Vec<Real>,
    /// Keep only rows satisfying all of: d=g d<g d>g g=0 g>0 q0<q1 q0=q1 q0>q1 p0<inf p0=p1 p0<p1.
    #[arg(long, value_delimiter = ',')]
    pub filter: Vec<AtlasFilter>,
}

#[derive(Args, Debug, Serialize)]
pub struct BernsteinArgs {
    /// Source space, e.g. "l1(l1)", "l2(2^j*l1{4})" or "domain(1,2,1/2)".
    #[arg(long)]
    pub src: String,
    #[arg(long)]
    pub dst: String,
    #[arg(long, default_value_t = 2)]
    pub levels: usize,
    #[arg(long, default_value_t = 3)]
    pub block: usize,
    #[arg(long, default_value_t = 3)]
    pub nmax: usize,
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessFamily {
    Rademacher,
    Diagonal,
    ConstantBlock,
}

#[derive(Args, Debug, Serialize)]
pub struct WitnessArgs {
    #[arg(long, value_enum)]
    pub family: WitnessFamily,
    /// Rademacher: number of functions.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p0: Option<Exponent>,
    #[arg(long)]
    pub p1: Option<Exponent>,
    /// Rademacher, n >= 3: sampled directions.
    #[arg(long, default_value_t = 4096)]
    pub directions: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Diagonal: source and target spaces.
    #[arg(long)]
    pub src: Option<String>,
    #[arg(long)]
    pub dst: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, default_value_t = 4)]
    pub block: usize,
    /// Constant-block: inner exponent and ambient dimension.
    #[arg(long)]
    pub p: Option<Exponent>,
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceKind {
    Full,
    Random,
}

#[derive(Args, Debug, Serialize)]
pub struct GlideArgs {
    #[arg(long)]
    pub q0: Exponent,
    #[arg(long)]
    pub q1: Exponent,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "full")]
    pub subspace: SubspaceKind,
    /// Inner exponent shared by both spaces.
    #[arg(long, default_value = "1")]
    pub p: Exponent,
    #[arg(long, default_value_t = 40)]
    pub levels: usize,
    /// Level j has block size min(2^j, block).
    #[arg(long, default_value_t = 8)]
    pub block: usize,
    /// Random subspace: dimension.
    #[arg(long, default_value_t = 40)]
    pub dim: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct HaarArgs {
    /// {"breakpoints":[...],"values":[...]} with rational strings.
    #[arg(long)]
    pub function: Option<String>,
    /// Indicator of [a,b), given as "a,b".
    #[arg(long, allow_hyphen_values = true)]
    pub indicator: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub jmax: u32,
    /// p, q, s of the Besov norm to report.
    #[arg(long)]
    pub p: Option<Exponent>,
    #[arg(long)]
    pub q: Option<Exponent>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<Real>,
    /// Index sets R_j inside V and S_j meeting U, intervals as "a,b".
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AtlasFilter {
    #[serde(rename = "d=g")]
    DEqG,
    #[serde(rename = "d<g")]
    DLtG,
    #[serde(rename = "d>g")]
    DGtG,
    #[serde(rename = "g=0")]
    GZero,
    #[serde(rename = "g>0")]
    GPositive,
    #[serde(rename = "q0<q1")]
    QIncreasing,
    #[serde(rename = "q0=q1")]
    QEqual,
    #[serde(rename = "q0>q1")]
    QDecreasing,
    #[serde(rename = "p0<inf")]
    P0Finite,
    #[serde(rename = "p0=p1")]
    PEqual,
    #[serde(rename = "p0<p1")]
    PIncreasing,
}

impl std::str::FromStr for AtlasFilter {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use AtlasFilter::*;
        Ok(match s.trim() {
            "d=g" => DEqG,
            "d<g" => DLtG,
            "d>g" => DGtG,
            "g=0" => GZero,
            "g>0" => GPositive,
            "q0<q1" => QIncreasing,
            "q0=q1" => QEqual,
            "q0>q1" => QDecreasing,
            "p0<inf" => P0Finite,
            "p0=p1" => PEqual,
            "p0<p1" => PIncreasing,
            other => return Err(ParamError::OutOfRange(format!("unknown filter `{other}`"))),
        })
    }
}

/// What went wrong, and which exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Compute(m) => f.write_str(m),
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ComputeError> for CliError {
    fn from(e: ComputeError) -> Self {
        match e {
            ComputeError::Param(p) => p.into(),
            other => CliError::Compute(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (program name first), runs the command and writes the
/// report to `stdout` or to `--out`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &report).map_err(|e| format!("{}: {e}", path.display())),
                None => stdout.write_all(report.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    3
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs the parsed command and returns the full report text.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let config = cli.out.as_ref().map(|_| config_json(cli));
    let config = config.as_ref();
    let format = cli.output;
    match &cli.command {
        Command::Classify(a) => run_classify(a, format.unwrap_or(OutputFormat::Json), config),
        Command::Atlas(a) => run_atlas(a, format.unwrap_or(OutputFormat::Csv), config),
        Command::Bernstein(a) => run_bernstein(a, format.unwrap_or(OutputFormat::Json), config),
        Command::Witness(a) => run_witness(a, format.unwrap_or(OutputFormat::Json), config),
        Command::Glide(a) => run_glide(a, format.unwrap_or(OutputFormat::Json), config),
        Command::Haar(a) => run_haar(a, format.unwrap_or(OutputFormat::Json), config),
    }
}

/// The parsed command line as JSON, for replay.
pub fn config_json(cli: &Cli) -> Value {
    let mut v = serde_json::to_value(&cli.command).expect("arguments serialize");
    if let Some(f) = cli.output {
        v["output"] = json!(f);
    }
    v
}

fn json_line(mut v: Value, config: Option<&Value>) -> String {
    if let (Some(c), Value::Object(map)) = (config, &mut v) {
        map.insert("config".into(), c.clone());
    }
    format!("{v}\n")
}

fn csv_header(config: Option<&Value>) -> String {
    config.map(|c| format!("# config: {c}\n")).unwrap_or_default()
}

fn no_csv(command: &str) -> CliError {
    usage(format!("csv output is not available for `{command}`"))
}

fn run_classify(a: &ClassifyArgs, format: OutputFormat, config: Option<&Value>) -> Result<String, CliError> {
    let src = SpaceParams::new(a.p0, a.q0, a.s0, a.n)?;
    let dst = SpaceParams::new(a.p1, a.q1, a.s1, a.n)?;
    let v = classify(a.setting, &src, &dst)?;
    Ok(match format {
        OutputFormat::Json => json_line(serde_json::to_value(v).expect("plain data"), config),
        OutputFormat::Text => format!("{}: {} (witness: {})\n", v.setting, v.verdict, v.witness_hint),
        OutputFormat::Csv => {
            let mut out = csv_header(config);
            out.push_str("setting,verdict,embeds,compact,fss,ss,witness_hint\n");
            let f = v.flags;
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                v.setting, v.verdict, f.embeds, f.compact, f.fss, f.ss, v.witness_hint
            ));
            out
        }
    })
}

/// One atlas row.
#[derive(Clone, Debug, Serialize)]
pub struct AtlasRow {
    pub setting: Setting,
    pub n: u32,
    pub p0: Exponent,
    pub q0: Exponent,
    pub s0: Real,
    pub p1: Exponent,
    pub q1: Exponent,
    pub s1: Real,
    pub verdict: Verdict,
    pub embeds: bool,
    pub compact: bool,
    pub fss: bool,
    pub ss: bool,
    pub witness_hint: String,
    /// `ok` when exactly one verdict holds and the independent embedding
    /// check agrees with it.
    pub partition: String,
}

/// Exactly one of the five verdict predicates holds for these flags.
pub fn single_verdict(v: &EmbeddingVerdict) -> bool {
    let f = v.flags;
    let holds = [!f.embeds, f.compact, f.fss && !f.compact, f.ss && !f.fss, f.embeds && !f.ss];
    let implications = (!f.compact || f.fss) && (!f.fss || f.ss) && (!f.ss || f.embeds);
    implications && holds.iter().filter(|h| **h).count() == 1
}

struct GridPoint {
    setting: Setting,
    src: SpaceParams,
    dst: SpaceParams,
}

fn keep(filters: &[AtlasFilter], src: &SpaceParams, dst: &SpaceParams) -> bool {
    use std::cmp::Ordering::*;
    let gp = src.n_over_p().sub(dst.n_over_p());
    let g = gp.max(Real::zero());
    let d = src.s.sub(dst.s);
    filters.iter().all(|f| match f {
        AtlasFilter::DEqG => d.compare(g) == Equal,
        AtlasFilter::DLtG => d.compare(g) == Less,
        AtlasFilter::DGtG => d.compare(g) == Greater,
        AtlasFilter::GZero => g.sign() == Equal,
        AtlasFilter::GPositive => g.sign() == Greater,
        AtlasFilter::QIncreasing => src.q.compare(dst.q) == Less,
        AtlasFilter::QEqual => src.q.compare(dst.q) == Equal,
        AtlasFilter::QDecreasing => src.q.compare(dst.q) == Greater,
        AtlasFilter::P0Finite => !src.p.is_infinite(),
        AtlasFilter::PEqual => src.p.compare(dst.p) == Equal,
        AtlasFilter::PIncreasing => src.p.compare(dst.p) == Less,
    })
}

fn atlas_grid(a: &AtlasArgs) -> Result<Vec<GridPoint>, ParamError> {
    let settings: Vec<Setting> = a.setting.map_or_else(|| Setting::ALL.to_vec(), |s| vec![s]);
    let mut grid = Vec::new();
    for &setting in &settings {
        for &n in &a.n {
            for &p0 in &a.p {
                for &q0 in &a.q {
                    for &p1 in &a.p {
                        for &q1 in &a.q {
                            let probe = params(p0, q0, Real::zero(), n);
                            let probe1 = params(p1, q1, Real::zero(), n);
                            probe.validate()?;
                            let gp = probe.n_over_p().sub(probe1.n_over_p());
                            let critical = match setting {
                                Setting::Domain => gp.max(Real::zero()),
                                Setting::Rn | Setting::Homogeneous => gp,
                            };
                            for &shift in &a.shifts {
                                let src = params(p0, q0, critical.add(shift), n);
                                let dst = params(p1, q1, Real::zero(), n);
                                if keep(&a.filter, &src, &dst) {
                                    grid.push(GridPoint { setting, src, dst });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(grid)
}

fn atlas_row(pt: &GridPoint) -> Result<AtlasRow, ParamError> {
    let v = classify(pt.setting, &pt.src, &pt.dst)?;
    let e = embedding_flags(&pt.src, &pt.dst, pt.setting)?;
    let agrees = e.exists == v.flags.embeds && e.compact == v.flags.compact;
    Ok(AtlasRow {
        setting: pt.setting,
        n: pt.src.n,
        p0: pt.src.p,
        q0: pt.src.q,
        s0: pt.src.s,
        p1: pt.dst.p,
        q1: pt.dst.q,
        s1: pt.dst.s,
        verdict: v.verdict,
        embeds: v.flags.embeds,
        compact: v.flags.compact,
        fss: v.flags.fss,
        ss: v.flags.ss,
        witness_hint: v.witness_hint.to_string(),
        partition: if agrees && single_verdict(&v) { "ok" } else { "violated" }.into(),
    })
}

/// Worker count from the environment, if set.
fn atlas_threads() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(usage(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
        },
    }
}

/// The atlas rows, in grid order whatever the number of workers.
pub fn atlas_rows(a: &AtlasArgs) -> Result<Vec<AtlasRow>, CliError> {
    let grid = atlas_grid(a)?;
    if grid.is_empty() {
        return Err(usage("the grid is empty"));
    }
    let work = || grid.par_iter().map(atlas_row).collect::<Result<Vec<_>, _>>();
    let rows = match atlas_threads()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Compute(e.to_string()))?
            .install(work),
        None => work(),
    };
    Ok(rows?)
}

fn run_atlas(a: &AtlasArgs, format: OutputFormat, config: Option<&Value>) -> Result<String, CliError> {
    let rows = atlas_rows(a)?;
    Ok(match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(|e| CliError::Compute(e.to_string()))?;
            }
            let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Compute(e.to_string()))?)
                .expect("utf-8 fields");
            csv_header(config) + &body
        }
        OutputFormat::Json => json_line(json!({ "rows": rows }), config),
        OutputFormat::Text => {
            let mut out = String::new();
            for r in &rows {
                out.push_str(&format!(
                    "{} n={} ({},{},{}) -> ({},{},{}): {}\n",
                    r.setting, r.n, r.p0, r.q0, r.s0, r.p1, r.q1, r.s1, r.verdict
                ));
            }
            out
        }
    })
}

/// Parses the space mini-language.
///
/// * `l{q}(l{p})` or `l{q}(l{p}{m})`: unit weights, levels `0..levels`, block
///   size `m` (default `block`);
/// * `l{q}(w^j*l{p})`: level `j` weighted by `w^j`;
/// * `domain(p,q,s[,n])`, `rn(p,q,s[,n])`: wavelet weights `2^{j(s-n/p+n/2)}` on
///   levels `0..levels`;
/// * `homogeneous(p,q,s[,n])`: weights `2^{j(s-n/p)}` on `levels` levels
///   centred at 0.
///
/// Presets use blocks of size `min(2^{|j|n}, block)`.
pub fn parse_space(text: &str, levels: usize, block: usize) -> Result<TruncatedMixedSpace, ParamError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || ParamError::InvalidSpace(format!("cannot parse space `{text}`"));
    if levels == 0 || block == 0 {
        return Err(ParamError::InvalidSpace("levels and block must be positive".into()));
    }
    let open = s.find('(').ok_or_else(bad)?;
    let body = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
    let head = &s[..open];
    let preset = match head {
        "domain" | "rn" => Some(WeightFlavor::InhomogeneousWavelet),
        "homogeneous" => Some(WeightFlavor::Homogeneous),
        _ => None,
    };
    if let Some(flavor) = preset {
        let parts: Vec<&str> = body.split(',').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let n: u32 = match parts.get(3) {
            Some(t) => t.parse().map_err(|_| ParamError::Unparsable(t.to_string()))?,
            None => 1,
        };
        let sp = SpaceParams::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?, n)?;
        let js: Vec<i64> = if head == "homogeneous" {
            let lo = -((levels / 2) as i64);
            (lo..lo + levels as i64).collect()
        } else {
            (0..levels as i64).collect()
        };
        let cap = |j: i64| -> usize {
            let e = j.unsigned_abs().saturating_mul(u64::from(n));
            if e >= 63 { block } else { (1usize << e).min(block) }
        };
        return TruncatedMixedSpace::besov(&sp, flavor, js, cap);
    }
    let q: Exponent = head.strip_prefix('l').ok_or_else(bad)?.parse()?;
    let (log2_w, inner) = match body.split_once('*') {
        Some((w, rest)) => {
            let base: Real = w.strip_suffix("^j").ok_or_else(bad)?.parse()?;
            let base = base.to_f64();
            if !(base > 0.0 && base.is_finite()) {
                return Err(ParamError::InvalidSpace(format!("weight base {base} must be positive")));
            }
            (base.log2(), rest)
        }
        None => (0.0, body),
    };
    let inner = inner.strip_prefix('l').ok_or_else(bad)?;
    let (p_text, m) = match inner.split_once('{') {
        Some((p, m)) => {
            let m = m.strip_suffix('}').ok_or_else(bad)?;
            (p, m.parse::<usize>().map_err(|_| ParamError::Unparsable(m.to_string()))?)
        }
        None => (inner, block),
    };
    let p: Exponent = p_text.parse()?;
    let lv = (0..levels as i64).map(|j| Level::with_log2_weight(j, m, j as f64 * log2_w)).collect();
    TruncatedMixedSpace::new(lv, q, p)
}

fn run_bernstein(a: &BernsteinArgs, format: OutputFormat, config: Option<&Value>) -> Result<String, CliError> {
    let src = parse_space(&a.src, a.levels, a.block)?;
    let dst = parse_space(&a.dst, a.levels, a.block)?;
    if !src.same_structure(&dst) {
        return Err(usage("--src and --dst must have the same levels and block sizes"));
    }
    if a.nmax == 0 {
        return Err(usage("--nmax must be at least 1"));
    }
    let mut out = String::new();
    for n in 1..=a.nmax {
        let est = bruteforce_bernstein(&src, &dst, n, a.budget, a.seed)?;
        match format {
            OutputFormat::Json => {
                out.push_str(&est.to_json_with_config(config));
                out.push('\n');
            }
            OutputFormat::Text => out.push_str(&format!(
                "n={} lower={} oracle={} upper={}\n",
                est.n,
                est.lower,
                est.oracle.map_or("-".into(), |v| v.to_string()),
                est.upper.map_or("-".into(), |v| v.to_string())
            )),
            OutputFormat::Csv => return Err(no_csv("bernstein")),
        }
    }
    Ok(out)
}

fn require<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("--{flag} is required for the {family} family")))
}

fn run_witness(a: &WitnessArgs, format: OutputFormat, config: Option<&Value>) -> Result<String, CliError> {
    let basis = match a.family {
        WitnessFamily::Rademacher => {
            let n = require(a.n, "n", "rademacher")?;
            let p0 = require(a.p0, "p0", "rademacher")?;
            let p1 = require(a.p1, "p1", "rademacher")?;
            let seed = match (a.seed, n) {
                (Some(s), _) => s,
                (None, 0..=2) => 0,
                (None, _) => return Err(usage("--seed is required for sampled witnesses (n >= 3)")),
            };
            let bound = rademacher_witness_lower_bound(n, p0, p1, a.directions, seed)?;
            return match format {
                OutputFormat::Json => Ok(json_line(
                    json!({"family": "rademacher", "n": n, "p0": p0, "p1": p1, "lower_bound": bound}),
                    config,
                )),
                OutputFormat::Text => Ok(format!("b_{n} >= {bound}\n")),
                OutputFormat::Csv => Err(no_csv("witness --family rademacher")),
            };
        }
        WitnessFamily::Diagonal => {
            let (Some(s), Some(d)) = (&a.src, &a.dst) else {
                return Err(usage("--src and --dst are required for the diagonal family"));
            };
            let src = parse_space(s, a.levels, a.block)?;
            let dst = parse_space(d, a.levels, a.block)?;
            let units: Vec<Vec<f64>> = src
                .levels()
                .iter()
                .map(|l| {
                    let mut b = vec![0.0; l.block_size];
                    b[0] = 1.0 / l.weight();
                    b
                })
                .collect();
            diagonal_witness_basis(&src, &dst, &units)?.basis
        }
        WitnessFamily::ConstantBlock => {
            let p = require(a.p, "p", "constant-block")?;
            let levels: Vec<(i64, usize)> = (0..a.levels)
                .map(|j| {
                    let e = (j as u32).checked_mul(a.dim).filter(|e| *e < 24);
                    e.map(|e| (j as i64, 1usize << e))
                })
                .collect::<Option<_>>()
                .ok_or_else(|| usage("blocks of size 2^(j*dim) beyond 2^23 are not supported"))?;
            constant_block_witness(&levels, p, a.dim)?
        }
    };
    Ok(match format {
        OutputFormat::Json => {
            let v: Value = serde_json::from_str(&basis_to_json(&basis)).expect("valid json");
            json_line(v, config)
        }
        OutputFormat::Csv => csv_header(config) + &basis_to_csv(&basis),
        OutputFormat::Text => format!("{basis}"),
    })
}

fn run_glide(a: &GlideArgs, format: OutputFormat, config: Option<&Value>) -> Result<String, CliError> {
    if a.levels == 0 || a.block == 0 {
        return Err(usage("--levels and --block must be positive"));
    }
    let block = |j: i64| (1usize << j.min(30)).min(a.block);
    let src = TruncatedMixedSpace::unweighted(0..a.levels as i64, block, a.q0, a.p)?;
    let dst = TruncatedMixedSpace::unweighted(0..a.levels as i64, block, a.q1, a.p)?;
    let mut oracle: Box<dyn SubspaceOracle> = match a.subspace {
        SubspaceKind::Full => Box::new(FullSpaceOracle),
        SubspaceKind::Random => {
            let seed = a.seed.ok_or_else(|| usage("--seed is required for --subspace random"))?;
            Box::new(FiniteBasisOracle::new(random_sparse_basis(&src, a.dim, seed))?)
        }
    };
    let outcome = glide(oracle.as_mut(), a.eps, &src, &dst)?;
    Ok(match format {
        OutputFormat::Json => outcome.transcript_json(config) + "\n",
        OutputFormat::Text => format!(
            "N={} delta={} ratio={} cutoffs={:?}\n",
            outcome.params.n_humps, outcome.params.delta, outcome.ratio, outcome.cutoffs
        ),
        OutputFormat::Csv => return Err(no_csv("glide")),
    })
}

fn run_haar(a: &HaarArgs, format: OutputFormat, config: Option<&Value>) -> Result<String, CliError> {
    let f = match (&a.function, &a.indicator) {
        (Some(text), None) => {
            let v: Value = serde_json::from_str(text).map_err(|e| usage(format!("--function: {e}")))?;
            PiecewiseConstant::from_json(&v)?
        }
        (None, Some(text)) => {
            let iv: Interval = text.parse()?;
            PiecewiseConstant::indicator(iv.lo, iv.hi, 1.into())?
        }
        _ => return Err(usage("give exactly one of --function and --indicator")),
    };
    let coeffs = haar_analyze(&f, a.jmax);
    let mut doc = json!({
        "function": f.to_json(),
        "coefficients": coeffs.to_json(),
        "l2_squared": f.l2_squared().to_string(),
        "coefficient_squares": coeffs.sum_of_squares().to_string(),
    });
    match (a.p, a.q, a.s) {
        (Some(p), Some(q), Some(s)) => {
            let sp = SpaceParams::new(p, q, s, 1)?;
            doc["norm"] = json!(besov_seq_norm(&coeffs, &sp, WeightFlavor::InhomogeneousWavelet)?);
        }
        (None, None, None) => {}
        _ => return Err(usage("--p, --q and --s go together")),
    }
    match (&a.v, &a.u) {
        (Some(v), Some(u)) => {
            let sets = support_index_sets(v.parse()?, u.parse()?, a.jmax, 0)?;
            let listed: Vec<Value> = sets
                .iter()
                .map(|lv| {
                    json!({
                        "j": lv.j,
                        "r": lv.r.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                        "s": lv.s.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            doc["index_sets"] = Value::Array(listed);
        }
        (None, None) => {}
        _ => return Err(usage("--v and --u go together")),
    }
    Ok(match format {
        OutputFormat::Json => json_line(doc, config),
        OutputFormat::Text => {
            let mut out = String::new();
            for (idx, _) in coeffs.pruned().iter() {
                out.push_str(&format!("{} j={} m={} c={}\n", idx.g, idx.j, idx.m, coeffs.value(idx)));
            }
            out
        }
        OutputFormat::Csv => {
            let mut out = csv_header(config);
            out.push_str("j,m,g,c\n");
            for (idx, _) in coeffs.iter() {
                out.push_str(&format!("{},{},{},{}\n", idx.j, idx.m, idx.g, coeffs.value(idx)));
            }
            out
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::besov_log2_weight;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("besov").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn mini_language() {
        let sp = parse_space("l1(l2)", 2, 3).unwrap();
        assert_eq!(sp.block_sizes(), vec![3, 3]);
        assert_eq!(sp.outer_q(), Exponent::int(1));
        assert_eq!(sp.inner_p(), Exponent::int(2));
        let sp = parse_space("linf(2^j * l1/2{4})", 3, 3).unwrap();
        assert_eq!(sp.block_sizes(), vec![4, 4, 4]);
        assert_eq!(sp.levels()[2].weight(), 4.0);
        assert!(sp.outer_q().is_infinite());
        let sp = parse_space("domain(2, 1, 1/2)", 4, 4).unwrap();
        assert_eq!(sp.block_sizes(), vec![1, 2, 4, 4]);
        assert_eq!(sp.levels()[1].log2_weight(), besov_log2_weight(1, &params(Exponent::int(2), Exponent::int(1), Real::ratio(1, 2), 1), WeightFlavor::InhomogeneousWavelet));
        let sp = parse_space("homogeneous(1,1,0)", 4, 8).unwrap();
        assert_eq!(sp.levels().iter().map(|l| l.j).collect::<Vec<_>>(), vec![-2, -1, 0, 1]);
        for bad in ["l1", "l1(l2", "l0(l1)", "lx(l1)", "l1(3*l1)", "l1(l1{0})", "rn(1,1)", "l1(-2^j*l1)"] {
            assert!(parse_space(bad, 2, 2).is_err(), "{bad}");
        }
    }

    #[test]
    fn classify_examples() {
        let (code, out, _) = run_args(&[
            "classify", "--setting", "domain", "--p0", "1", "--q0", "1", "--s0", "1", "--p1", "inf", "--q1", "1",
            "--s1", "0", "--n", "1",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdict"], "NotSS");

        let (code, out, _) = run_args(&[
            "classify", "--setting", "rn", "--p0", "2", "--q0", "1", "--s0", "0", "--p1", "1", "--q1", "1", "--s1",
            "0", "--n", "1",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("\"NoEmbedding\""));

        let (code, _, err) = run_args(&[
            "classify", "--setting", "rn", "--p0", "2", "--q0", "1", "--s0", "0", "--p1", "1", "--q1", "1", "--s1",
            "0",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("--n"));

        let (code, _, err) = run_args(&[
            "classify", "--setting", "rn", "--p0", "-2", "--q0", "1", "--s0", "0", "--p1", "1", "--q1", "1", "--s1",
            "0", "--n", "1",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("p0"), "{err}");
    }

    #[test]
    fn atlas_partition_and_filters() {
        let (code, out, _) = run_args(&["atlas", "--setting", "rn"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("setting,n,p0"));
        assert_eq!(lines.len() - 1, 625 * 2 * 3);
        assert!(lines[1..].iter().all(|l| l.ends_with(",ok")));
        assert!(!lines[1..].iter().any(|l| l.contains("SSNotFSS")));

        let (code, out, _) = run_args(&[
            "atlas", "--setting", "domain", "--shifts", "0", "--filter", "d=g,g=0,q0<q1,p0<inf",
        ]);
        assert_eq!(code, 0);
        let rows: Vec<&str> = out.lines().skip(1).collect();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|l| l.contains(",SSNotFSS,")));

        let (code, _, _) = run_args(&["atlas", "--filter", "q0<q1,q0>q1"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn bernstein_witness_glide_examples() {
        let (code, out, _) = run_args(&[
            "bernstein", "--src", "l1(l1)", "--dst", "l2(l2)", "--levels", "2", "--block", "3", "--nmax", "2",
            "--budget", "16", "--seed", "7",
        ]);
        assert_eq!(code, 0);
        for line in out.lines() {
            let v: Value = serde_json::from_str(line).unwrap();
            assert!(v["oracle"].as_f64().unwrap() <= v["upper"].as_f64().unwrap() + 1e-6);
        }

        let (code, out, _) = run_args(&["witness", "--family", "rademacher", "--n", "2", "--p0", "4", "--p1", "2"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["lower_bound"].as_f64().unwrap() - 0.84090).abs() < 1e-5);

        let (code, _, _) = run_args(&["witness", "--family", "rademacher", "--n", "3", "--p0", "4", "--p1", "2"]);
        assert_eq!(code, 2);

        let (code, out, _) = run_args(&["glide", "--q0", "1", "--q1", "inf", "--eps", "0.1", "--subspace", "full"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["ratio"].as_f64().unwrap() - 1.0 / 21.0).abs() < 1e-12);

        let (code, _, err) = run_args(&["glide", "--q0", "1", "--q1", "2", "--eps", "0.1", "--levels", "10"]);
        assert_eq!(code, 3);
        assert!(err.contains("exhausted"));
    }

    #[test]
    fn haar_command() {
        let (code, out, _) = run_args(&["haar", "--indicator", "0,1/2", "--jmax", "2", "--p", "2", "--q", "2", "--s", "0"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["norm"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(v["l2_squared"], "1/2");
        assert_eq!(v["coefficient_squares"], "1/2");
        let (code, _, _) = run_args(&["haar", "--jmax", "2"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn file_reports_carry_config() {
        let dir = std::env::temp_dir().join(format!("besov-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("glide.json");
        let args = ["glide", "--q0", "1", "--q1", "inf", "--eps", "0.5", "--out", path.to_str().unwrap()];
        assert_eq!(run_args(&args).0, 0);
        let first = std::fs::read_to_string(&path).unwrap();
        let v: Value = serde_json::from_str(&first).unwrap();
        assert_eq!(v["config"]["command"], "glide");
        assert_eq!(v["config"]["eps"], 0.5);
        assert_eq!(run_args(&args).0, 0);
        assert_eq!(std::fs::read_to_string(&path).unwrap(), first);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
