//! Command-line front end: argument parsing, command dispatch, and
//! CSV / JSON / snapshot outputs. Every command writes `manifest.json`
//! into `--out-dir`.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::apps::{self, AttributeRow, PairedCountMin, PmiConfig, PmiStream};
use crate::baselines::DenseModel;
use crate::data::{format_libsvm_line, LibsvmReader, SyntheticSpec, SyntheticStream, WeightLaw};
use crate::error::{Error, Result};
use crate::eval::{self, ErrorTracker, MethodConfig, MethodKind};
use crate::hashing::{hash_string, FeatureId};
use crate::learner::{Learner, LearnerConfig};
use crate::model::{Loss, LrSchedule, OptimizerConfig};
use crate::sizing::{self, TheoryParams};
use crate::sparse::{Label, LabeledExample};
use crate::{AwmSketch, WmSketch};

const LONG_ABOUT: &str = "Memory-budgeted streaming linear classifiers with heavy-weight recovery.\n\
Every command writes manifest.json (config, seed, metrics) into --out-dir.";

#[derive(Debug, Parser)]
#[command(name = "wmsketch", version, about = LONG_ABOUT, arg_required_else_help = true)]
pub struct Cli {
    /// Master seed for every random sub-stream
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Directory for the manifest and all CSV / snapshot outputs
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Only write files, print nothing on success
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a learner on a LIBSVM file or a synthetic stream
    Train(TrainArgs),
    /// Evaluate saved outputs
    #[command(subcommand, arg_required_else_help = true)]
    Eval(EvalCommand),
    /// Sketch dimensions suggested by the recovery bound
    Size(SizeArgs),
    /// Stream applications
    #[command(subcommand, arg_required_else_help = true)]
    App(AppCommand),
    /// Write a synthetic LIBSVM stream and its true weights
    Gen(GenArgs),
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// RelErr of an estimated top-K against a dense reference snapshot
    Recovery(RecoveryArgs),
}

#[derive(Debug, Subcommand)]
pub enum AppCommand {
    /// Rank attributes of a CSV table by learned weight, with exact relative risks
    Explain(ExplainArgs),
    /// Items whose frequency ratio between two token files is large
    Deltoid(DeltoidArgs),
    /// Pointwise mutual information of co-occurring tokens
    Pmi(PmiArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossArg {
    Logistic,
    /// smoothed hinge
    Hinge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleArg {
    Constant,
    InverseSqrt,
    InverseStronglyConvex,
}

/// Method, memory shape and optimizer.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LearnerArgs {
    /// wm, awm, trunc, ptrunc, ss, hash, cmf or dense
    #[arg(long, default_value = "awm")]
    pub method: MethodKind,
    /// Memory budget under the 4-byte cost model (default 8192 unless a shape is given)
    #[arg(long)]
    pub budget_bytes: Option<usize>,
    #[arg(long)]
    pub heap_capacity: Option<usize>,
    /// Buckets per row
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, value_enum, default_value = "logistic")]
    pub loss: LossArg,
    #[arg(long, value_enum, default_value = "inverse-sqrt")]
    pub lr_schedule: ScheduleArg,
    #[arg(long, default_value_t = 1.0)]
    pub lr0: f64,
    /// l2 regularization strength
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
}

pub const DEFAULT_BUDGET: usize = 8192;

impl LearnerArgs {
    pub fn optimizer(&self) -> Result<OptimizerConfig> {
        let loss = match self.loss {
            LossArg::Logistic => Loss::Logistic,
            LossArg::Hinge => Loss::smoothed_hinge(),
        };
        let schedule = match self.lr_schedule {
            ScheduleArg::Constant => LrSchedule::constant(self.lr0),
            ScheduleArg::InverseSqrt => LrSchedule::inverse_sqrt(self.lr0),
            ScheduleArg::InverseStronglyConvex => LrSchedule::inverse_strongly_convex(self.lr0, self.lambda),
        };
        let opt = OptimizerConfig::new(loss, schedule, self.lambda);
        opt.validate()?;
        Ok(opt)
    }

    fn explicit_shape(&self) -> bool {
        self.heap_capacity.is_some() || self.width.is_some() || self.depth.is_some()
    }

    /// The config these flags describe, using the budget preset unless a
    /// shape is given explicitly.
    pub fn method_config(&self) -> Result<MethodConfig> {
        if self.explicit_shape() {
            if self.budget_bytes.is_some() {
                return Err(Error::usage("give either --budget-bytes or explicit capacities, not both"));
            }
            let sketch = self.method.has_sketch();
            return Ok(MethodConfig::new(
                self.method,
                self.heap_capacity.unwrap_or(0),
                self.width.unwrap_or(0),
                self.depth.unwrap_or(if sketch { 1 } else { 0 }),
            ));
        }
        eval::preset(self.method, self.budget_bytes.unwrap_or(DEFAULT_BUDGET))
    }
}

/// Largest top-k request the config can answer.
fn capped_k(cfg: &MethodConfig, k: usize) -> usize {
    match cfg.kind {
        MethodKind::Dense => k,
        _ => k.min(cfg.heap_capacity),
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 1 << 16)]
    pub dim: u64,
    /// Nonzeros per example
    #[arg(long, default_value_t = 10)]
    pub sparsity: usize,
    /// Number of nonzero true weights
    #[arg(long, default_value_t = 50)]
    pub planted: usize,
    #[arg(long, default_value_t = 1)]
    pub planted_per_example: usize,
    #[arg(long, default_value_t = 1.1)]
    pub zipf_exponent: f64,
    /// Label flip probability
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    /// Number of examples
    #[arg(long, default_value_t = 100_000)]
    pub length: u64,
}

impl SynthArgs {
    pub fn spec(&self, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            dim: self.dim,
            sparsity: self.sparsity,
            weights: WeightLaw::Planted {
                count: self.planted,
                low: 1.0,
                high: 2.0,
            },
            planted_per_example: self.planted_per_example,
            zipf_exponent: self.zipf_exponent,
            noise: self.noise,
            length: self.length,
            seed,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    /// LIBSVM input; a synthetic stream is generated when absent
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub synth: SynthArgs,
    /// Choose the shape by online error rate over the input among grid points using more than half the budget
    #[arg(long)]
    pub grid_search: bool,
    /// Number of weights written to topk.csv
    #[arg(long, default_value_t = 128)]
    pub top_k: usize,
    /// Also train an unbudgeted model on the same stream and report RelErr against it
    #[arg(long)]
    pub compare_dense: bool,
    /// Rerun the training recorded in a manifest and compare its metrics bit for bit
    #[arg(long)]
    #[serde(skip)]
    pub replay: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RecoveryArgs {
    #[arg(long, default_value_t = 128)]
    pub k: usize,
    /// Dense model snapshot holding the reference weights
    #[arg(long)]
    pub truth: PathBuf,
    /// CSV `feature_id,weight` of the estimated top-K
    #[arg(long)]
    pub estimate: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SizeArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub dim: u64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    /// Output file (default `<out-dir>/data.libsvm`)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExplainArgs {
    /// CSV with a header row; every column except the label is an attribute
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[command(flatten)]
    pub learner: LearnerArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DeltoidArgs {
    /// Whitespace-delimited token file
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 5.0)]
    pub phi: f64,
    #[arg(long, default_value_t = 128)]
    pub k: usize,
    /// Use the paired Count-Min baseline with this many bytes instead of a learner
    #[arg(long)]
    pub paired_count_min: Option<usize>,
    #[command(flatten)]
    pub learner: LearnerArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PmiArgs {
    /// Whitespace-delimited token file
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub window: usize,
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    #[arg(long, default_value_t = 4000)]
    pub reservoir: usize,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[command(flatten)]
    pub learner: LearnerArgs,
}

/// What every command records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub args: Value,
    /// Resolved configuration (learner shape, optimizer, generator spec)
    pub config: Value,
    pub metrics: Map<String, Value>,
    /// Files written next to the manifest
    pub outputs: Vec<String>,
}

impl Manifest {
    fn new(command: &str, seed: u64, args: &impl Serialize) -> Result<Self> {
        Ok(Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            args: serde_json::to_value(args)?,
            config: Value::Null,
            metrics: Map::new(),
            outputs: Vec::new(),
        })
    }

    fn metric(&mut self, name: &str, v: impl Serialize) -> Result<()> {
        self.metrics.insert(name.to_string(), serde_json::to_value(v)?);
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

struct Ctx {
    seed: u64,
    out_dir: PathBuf,
    quiet: bool,
}

impl Ctx {
    fn say(&self, text: impl std::fmt::Display) {
        if !self.quiet {
            println!("{text}");
        }
    }

    fn print_metrics(&self, m: &Manifest) -> Result<()> {
        if !self.quiet {
            println!("{}", serde_json::to_string_pretty(&m.metrics)?);
        }
        Ok(())
    }

    fn emit(&self, manifest: &mut Manifest, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.out_dir.join(name);
        write_atomic(&path, bytes)?;
        manifest.outputs.push(name.to_string());
        Ok(path)
    }

    fn finish(&self, manifest: &Manifest) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(manifest)?;
        bytes.push(b'\n');
        write_atomic(&self.out_dir.join("manifest.json"), &bytes)
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Parses `argv` (program name first), runs the command, returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("wmsketch: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        seed: cli.seed,
        out_dir: cli.out_dir,
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Train(a) => match &a.replay {
            Some(path) => replay(&ctx, path),
            None => train(&ctx, &a).map(|_| ()),
        },
        Command::Eval(EvalCommand::Recovery(a)) => recovery(&ctx, &a),
        Command::Size(a) => size(&ctx, &a),
        Command::Gen(a) => gen(&ctx, &a),
        Command::App(AppCommand::Explain(a)) => explain(&ctx, &a),
        Command::App(AppCommand::Deltoid(a)) => deltoid(&ctx, &a),
        Command::App(AppCommand::Pmi(a)) => pmi(&ctx, &a),
    }
}

fn load_examples(a: &TrainArgs, seed: u64) -> Result<(Vec<LabeledExample>, Value)> {
    match &a.input {
        Some(path) => {
            let reader = LibsvmReader::new(BufReader::new(File::open(path)?));
            let data = reader.collect::<Result<Vec<_>>>()?;
            Ok((data, json!({ "libsvm": path })))
        }
        None => {
            let spec = a.synth.spec(seed);
            let data = SyntheticStream::new(spec.clone())?.collect();
            Ok((data, serde_json::to_value(spec)?))
        }
    }
}

fn online_pass(learner: &mut dyn Learner, data: &[LabeledExample]) -> ErrorTracker {
    let mut t = ErrorTracker::default();
    for ex in data {
        let m = learner.update(&ex.features, ex.label);
        t.record(m, ex.label);
    }
    t
}

fn train(ctx: &Ctx, a: &TrainArgs) -> Result<Manifest> {
    let opt = a.learner.optimizer()?;
    let (data, source) = load_examples(a, ctx.seed)?;
    if data.is_empty() {
        return Err(Error::invalid("training stream is empty"));
    }
    let method = if a.grid_search {
        if a.learner.explicit_shape() {
            return Err(Error::usage("--grid-search needs a budget, not explicit capacities"));
        }
        let budget = a.learner.budget_bytes.unwrap_or(DEFAULT_BUDGET);
        let seed = ctx.seed;
        let mut score = |cfg: &MethodConfig| -> Result<f64> {
            let mut l = LearnerConfig::new(*cfg, opt, seed).build()?;
            online_pass(l.as_mut(), &data).rate()
        };
        eval::select_config(a.learner.method, budget, Some(&mut score))?
    } else {
        a.learner.method_config()?
    };
    let cfg = LearnerConfig::new(method, opt, ctx.seed);
    let mut learner = cfg.build()?;
    let tracker = online_pass(learner.as_mut(), &data);
    let k = capped_k(&method, a.top_k);
    let top = learner.top_k(k)?;

    let mut m = Manifest::new("train", ctx.seed, a)?;
    m.config = json!({ "learner": cfg, "source": source });
    m.metric("examples", tracker.examples)?;
    m.metric("mistakes", tracker.mistakes)?;
    m.metric("online_error_rate", tracker.rate()?)?;
    m.metric("memory_cost_bytes", learner.memory_cost())?;
    m.metric("top_k", top.len())?;
    m.metric("top_k_l2", top.entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt())?;
    if a.compare_dense {
        let mut dense = DenseModel::new(opt)?;
        let dt = online_pass(&mut dense, &data);
        m.metric("dense_online_error_rate", dt.rate()?)?;
        m.metric("rel_err_vs_dense", eval::rel_err(&top, &dense.weights(), k))?;
    }
    let rows = top.entries.iter().map(|(f, w)| vec![f.to_string(), w.to_string()]);
    ctx.emit(&mut m, "topk.csv", &csv_bytes(&["feature_id", "weight"], rows)?)?;
    if let Some(snap) = learner.snapshot() {
        ctx.emit(&mut m, "model.snap", &snap?)?;
    }
    ctx.finish(&m)?;
    ctx.print_metrics(&m)?;
    Ok(m)
}

fn replay(ctx: &Ctx, path: &Path) -> Result<()> {
    let old = Manifest::load(path)?;
    if old.command != "train" {
        return Err(Error::usage(format!("{} is not a train manifest", path.display())));
    }
    let args: TrainArgs = serde_json::from_value(old.args.clone())?;
    let new = train(
        &Ctx {
            seed: old.seed,
            out_dir: ctx.out_dir.clone(),
            quiet: ctx.quiet,
        },
        &args,
    )?;
    if new.metrics != old.metrics || new.config != old.config {
        let diff: Vec<&String> = old
            .metrics
            .keys()
            .chain(new.metrics.keys())
            .filter(|k| old.metrics.get(*k) != new.metrics.get(*k))
            .collect();
        return Err(Error::invalid(format!("replay differs from {} in {diff:?}", path.display())));
    }
    ctx.say(format!("replay matches {}", path.display()));
    Ok(())
}

fn read_estimate_csv(path: &Path) -> Result<Vec<(FeatureId, f64)>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |j: usize| rec.get(j).map(str::trim).unwrap_or("");
        let id = field(0).parse().map_err(|_| Error::Parse {
            line,
            column: 1,
            message: format!("bad feature id {:?}", field(0)),
        })?;
        let w: f64 = field(1).parse().map_err(|_| Error::Parse {
            line,
            column: 2,
            message: format!("bad weight {:?}", field(1)),
        })?;
        out.push((id, w));
    }
    Ok(out)
}

/// Loads any snapshot written by `train`.
pub fn load_snapshot(bytes: &[u8]) -> Result<Box<dyn Learner>> {
    match bytes.get(..4) {
        Some(b"DNS1") => Ok(Box::new(DenseModel::from_bytes(bytes)?)),
        Some(b"AWM1") => Ok(Box::new(AwmSketch::from_bytes(bytes)?)),
        Some(b"WMS1") => Ok(Box::new(WmSketch::from_bytes(bytes)?)),
        _ => Err(Error::Snapshot("unrecognized snapshot header".into())),
    }
}

fn recovery(ctx: &Ctx, a: &RecoveryArgs) -> Result<()> {
    let bytes = fs::read(&a.truth)?;
    if bytes.get(..4) != Some(b"DNS1") {
        return Err(Error::usage("--truth must be a dense snapshot (train --method dense)"));
    }
    let truth = DenseModel::from_bytes(&bytes)?.weights();
    let estimate = crate::learner::TopKEstimate::ranked(read_estimate_csv(&a.estimate)?, a.k);
    let err = eval::rel_err(&estimate, &truth, a.k);
    let true_top = eval::true_top_k(&truth, a.k);
    let mut m = Manifest::new("eval recovery", ctx.seed, a)?;
    m.metric("k", a.k)?;
    m.metric("estimate_entries", estimate.len())?;
    m.metric("rel_err", err)?;
    let overlap = estimate.ids().filter(|i| true_top.get(*i).is_some()).count();
    m.metric("top_k_overlap", overlap)?;
    let rows = true_top.entries.iter().map(|(f, w)| vec![f.to_string(), w.to_string()]);
    ctx.emit(&mut m, "true_topk.csv", &csv_bytes(&["feature_id", "weight"], rows)?)?;
    ctx.finish(&m)?;
    // JSON cannot hold infinity, print it here as well
    ctx.say(format!("rel_err = {err}"));
    ctx.print_metrics(&m)?;
    Ok(())
}

fn size(ctx: &Ctx, a: &SizeArgs) -> Result<()> {
    let p = TheoryParams {
        epsilon: a.epsilon,
        delta: a.delta,
        dim: a.dim,
        beta: a.beta,
        gamma: a.gamma,
        lambda: a.lambda,
        c1: a.c1,
        c2: a.c2,
    };
    let s = sizing::theoretical_size(&p)?;
    ctx.say(format!("k = {}", s.k));
    ctx.say(format!("s = {}", s.s));
    ctx.say(format!("width = {}", s.width()));
    ctx.say(format!("memory_bytes = {}", s.memory_bytes()));
    let mut m = Manifest::new("size", ctx.seed, a)?;
    m.config = serde_json::to_value(p)?;
    m.metric("k", s.k)?;
    m.metric("s", s.s)?;
    m.metric("k_exact", s.k_exact)?;
    m.metric("s_exact", s.s_exact)?;
    m.metric("memory_bytes", s.memory_bytes())?;
    ctx.finish(&m)
}

fn gen(ctx: &Ctx, a: &GenArgs) -> Result<()> {
    let spec = a.synth.spec(ctx.seed);
    let mut stream = SyntheticStream::new(spec.clone())?;
    let mut text = String::new();
    let mut positives = 0u64;
    for ex in stream.by_ref() {
        positives += (ex.label == Label::Positive) as u64;
        text.push_str(&format_libsvm_line(&ex));
        text.push('\n');
    }
    let mut m = Manifest::new("gen", ctx.seed, a)?;
    m.config = serde_json::to_value(&spec)?;
    let out = a.output.clone().unwrap_or_else(|| ctx.out_dir.join("data.libsvm"));
    write_atomic(&out, text.as_bytes())?;
    m.outputs.push(out.display().to_string());
    let mut w: Vec<(FeatureId, f64)> = stream.w_true().iter().map(|(&f, &v)| (f, v)).collect();
    w.sort_by_key(|e| e.0);
    let rows = w.iter().map(|(f, v)| vec![f.to_string(), v.to_string()]);
    ctx.emit(&mut m, "w_true.csv", &csv_bytes(&["feature_id", "weight"], rows)?)?;
    m.metric("examples", spec.length)?;
    m.metric("positives", positives)?;
    m.metric("label_flips", stream.flips())?;
    ctx.finish(&m)
}

fn parse_outlier_label(s: &str) -> Option<Label> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "+1" | "true" | "yes" => Some(Label::Positive),
        "0" | "-1" | "false" | "no" => Some(Label::Negative),
        _ => None,
    }
}

fn explain(ctx: &Ctx, a: &ExplainArgs) -> Result<()> {
    let mut r = csv::Reader::from_path(&a.input)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let label_col = header
        .iter()
        .position(|h| *h == a.label_column)
        .ok_or_else(|| Error::invalid(format!("no column named {:?}", a.label_column)))?;
    let mut names: HashMap<FeatureId, String> = HashMap::new();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let raw = rec.get(label_col).unwrap_or("");
        let label = parse_outlier_label(raw).ok_or_else(|| Error::Parse {
            line: i + 2,
            column: label_col + 1,
            message: format!("bad label {raw:?}"),
        })?;
        let mut attributes = Vec::with_capacity(header.len() - 1);
        for (j, v) in rec.iter().enumerate() {
            if j == label_col {
                continue;
            }
            let id = apps::explain::attribute_id(&header[j], v);
            names.entry(id).or_insert_with(|| format!("{}={}", header[j], v));
            attributes.push(id);
        }
        rows.push(AttributeRow { attributes, label });
    }
    let method = a.learner.method_config()?;
    let cfg = LearnerConfig::new(method, a.learner.optimizer()?, ctx.seed);
    let mut learner = cfg.build()?;
    let report = apps::explain_stream(rows, learner.as_mut(), capped_k(&method, a.k))?;
    let mut m = Manifest::new("app explain", ctx.seed, a)?;
    m.config = serde_json::to_value(&cfg)?;
    m.metric("rows", report.rows)?;
    m.metric("reported", report.entries.len())?;
    m.metric("correlation", report.correlation)?;
    m.metric("memory_cost_bytes", learner.memory_cost())?;
    let out = report.entries.iter().map(|e| {
        vec![
            e.feature.to_string(),
            names.get(&e.feature).cloned().unwrap_or_default(),
            e.weight.to_string(),
            opt_f64(e.relative_risk),
        ]
    });
    ctx.emit(
        &mut m,
        "explain.csv",
        &csv_bytes(&["feature_id", "attribute", "weight", "relative_risk"], out)?,
    )?;
    ctx.finish(&m)?;
    ctx.print_metrics(&m)?;
    Ok(())
}

fn read_tokens(path: &Path, names: &mut HashMap<FeatureId, String>) -> Result<Vec<FeatureId>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .split_whitespace()
        .map(|t| {
            let id = hash_string(t.as_bytes());
            names.entry(id).or_insert_with(|| t.to_string());
            id
        })
        .collect())
}

fn deltoid(ctx: &Ctx, a: &DeltoidArgs) -> Result<()> {
    if !(a.phi >= 1.0) {
        return Err(Error::usage("--phi must be at least 1"));
    }
    let mut names = HashMap::new();
    let sa = read_tokens(&a.a, &mut names)?;
    let sb = read_tokens(&a.b, &mut names)?;
    let mut m = Manifest::new("app deltoid", ctx.seed, a)?;
    let report = match a.paired_count_min {
        Some(budget) => {
            // half to the candidate heap, the rest to two depth-2 tables
            let cap = (budget / 2 / 8).max(1);
            let width = (budget.saturating_sub(8 * cap) / 16).max(1);
            let mut cm = PairedCountMin::new(cap, width, 2, crate::seed::derive_seed(ctx.seed, crate::seed::Stream::Hashing))?;
            m.config = json!({ "paired_count_min": { "capacity": cap, "width": width, "depth": 2 } });
            m.metric("memory_cost_bytes", cm.memory_cost())?;
            cm.detect(&sa, &sb, a.k.min(cap), a.phi)?
        }
        None => {
            let method = a.learner.method_config()?;
            let cfg = LearnerConfig::new(method, a.learner.optimizer()?, ctx.seed);
            let mut learner = cfg.build()?;
            m.config = serde_json::to_value(&cfg)?;
            let r = apps::deltoid_detect(&sa, &sb, learner.as_mut(), capped_k(&method, a.k), a.phi)?;
            m.metric("memory_cost_bytes", learner.memory_cost())?;
            r
        }
    };
    m.metric("true_deltoids", report.true_deltoids)?;
    m.metric("true_positives", report.true_positives)?;
    m.metric("recall", report.recall)?;
    let rows = report.detected.iter().map(|(f, w)| {
        vec![
            f.to_string(),
            names.get(f).cloned().unwrap_or_default(),
            w.to_string(),
        ]
    });
    ctx.emit(&mut m, "deltoids.csv", &csv_bytes(&["feature_id", "token", "weight"], rows)?)?;
    ctx.finish(&m)?;
    ctx.print_metrics(&m)?;
    Ok(())
}

fn pmi(ctx: &Ctx, a: &PmiArgs) -> Result<()> {
    let pcfg = PmiConfig {
        window: a.window,
        negatives: a.negatives,
        reservoir: a.reservoir,
    };
    let text = fs::read_to_string(&a.corpus)?;
    let method = a.learner.method_config()?;
    let cfg = LearnerConfig::new(method, a.learner.optimizer()?, ctx.seed);
    let mut learner = cfg.build()?;
    let mut stream = PmiStream::new(pcfg, learner.as_mut(), ctx.seed)?;
    for tok in text.split_whitespace() {
        stream.observe_token(tok);
    }
    if stream.positives() == 0 {
        return Err(Error::invalid("corpus has no co-occurring pairs"));
    }
    // the learner ranks by |weight|; the file lists those pairs by estimated PMI
    let mut top = stream.top_pairs(capped_k(&method, a.k))?;
    top.sort_by(|x, y| y.estimated_pmi.total_cmp(&x.estimated_pmi).then(x.feature.cmp(&y.feature)));
    let mut m = Manifest::new("app pmi", ctx.seed, a)?;
    m.config = json!({ "learner": cfg, "pmi": pcfg });
    m.metric("tokens", stream.tokens())?;
    m.metric("positives", stream.positives())?;
    m.metric("reported", top.len())?;
    let rows = top.iter().map(|e| {
        vec![
            e.u.clone(),
            e.v.clone(),
            e.feature.to_string(),
            e.weight.to_string(),
            e.estimated_pmi.to_string(),
            opt_f64(e.exact_pmi),
        ]
    });
    drop(stream);
    m.metric("memory_cost_bytes", learner.memory_cost())?;
    ctx.emit(
        &mut m,
        "pmi.csv",
        &csv_bytes(&["u", "v", "feature_id", "weight", "estimated_pmi", "exact_pmi"], rows)?,
    )?;
    ctx.finish(&m)?;
    ctx.print_metrics(&m)?;
    Ok(())
}
