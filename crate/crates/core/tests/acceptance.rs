//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wmsketch::apps::{
    deltoid_detect, explain_stream, AttributeSpec, DeltoidSpec, PairGeneratorSpec, PairedCountMin, PmiConfig,
    PmiStream,
};
use wmsketch::baselines::{DenseModel, ProbTruncatedModel};
use wmsketch::data::{SyntheticSpec, SyntheticStream, WeightLaw};
use wmsketch::eval::{
    enumerate_configs, memory_cost, preset, rel_err, true_top_k, ErrorTracker, GridConstraints, MethodConfig,
    MethodKind,
};
use wmsketch::hashing::{BucketScheme, FeatureId, HashFamily};
use wmsketch::model::{Loss, LrSchedule, OptimizerConfig};
use wmsketch::sketch::CountSketch;
use wmsketch::{AwmSketch, Label, LabeledExample, Learner, LearnerConfig, SparseVector, TopKEstimate, WmSketch};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-6)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn logistic(eta0: f64, lambda: f64) -> OptimizerConfig {
    OptimizerConfig::new(Loss::Logistic, LrSchedule::inverse_sqrt(eta0), lambda)
}

fn small_stream(seed: u64, length: u64) -> Vec<LabeledExample> {
    let spec = SyntheticSpec {
        dim: 64,
        sparsity: 8,
        weights: WeightLaw::Planted {
            count: 8,
            low: 1.0,
            high: 2.0,
        },
        planted_per_example: 2,
        length,
        seed,
        ..SyntheticSpec::default()
    };
    SyntheticStream::new(spec).unwrap().collect()
}

/// Runs both learners over the stream and compares margins at every step
/// and the final weights of features 0..dim.
fn lockstep(a: &mut dyn Learner, b: &mut dyn Learner, data: &[LabeledExample], dim: u32, tol: f64) -> (bool, f64) {
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut check = |x: f64, y: f64| {
        let scale = x.abs().max(y.abs()).max(1e-6);
        worst = worst.max((x - y).abs() / scale);
        ok &= rel_close(x, y, tol);
    };
    for ex in data {
        let ma = a.update(&ex.features, ex.label);
        let mb = b.update(&ex.features, ex.label);
        check(ma, mb);
    }
    for f in 0..dim {
        check(a.weight(f), b.weight(f));
    }
    (ok, worst)
}

fn c01_collision_free() -> Outcome {
    let data = small_stream(1, 5000);
    let mut all = true;
    let mut detail = Vec::new();
    for lambda in [0.0, 1e-3] {
        let opt = logistic(0.5, lambda);
        let family = HashFamily::with_scheme(3, 3, 64, BucketScheme::Modulo).unwrap();
        let mut wm = WmSketch::with_family(family, 0, opt).unwrap();
        let mut dense = DenseModel::new(opt).unwrap();
        let (ok, worst) = lockstep(&mut wm, &mut dense, &data, 64, 1e-9);
        all &= ok;
        detail.push(format!("lambda={lambda}: max rel diff {worst:.2e}"));
    }
    outcome(all, detail.join(", "))
}

fn c02_degenerate_awm() -> Outcome {
    let limit = Duration::from_secs(5);
    let t = Instant::now();
    let a = awm_cap0();
    let ta = t.elapsed();
    let t = Instant::now();
    let b = awm_full();
    let tb = t.elapsed();
    outcome(
        a.ok && b.ok && ta < limit && tb < limit,
        format!("capacity 0 vs WM: {} [{:.2} s]; full capacity vs dense: {} [{:.2} s]", a.detail, ta.as_secs_f64(), b.detail, tb.as_secs_f64()),
    )
}

fn awm_cap0() -> Outcome {
    let data = small_stream(2, 5000);
    let opt = logistic(0.5, 1e-3);
    let family = HashFamily::new(9, 3, 16).unwrap();
    let mut awm = AwmSketch::with_family(family.clone(), 0, opt).unwrap();
    let mut wm = WmSketch::with_family(family, 0, opt).unwrap();
    let (ok, worst) = lockstep(&mut awm, &mut wm, &data, 64, 1e-9);
    let bit_equal = (0..64).all(|f| awm.query(f).to_bits() == wm.query(f).to_bits());
    outcome(ok, format!("max rel diff {worst:.2e}, bit-identical queries: {bit_equal}"))
}

fn awm_full() -> Outcome {
    let data = small_stream(3, 5000);
    let opt = logistic(0.5, 1e-3);
    let mut awm = AwmSketch::new(48, 3, 64, 4, opt).unwrap();
    let mut dense = DenseModel::new(opt).unwrap();
    let (ok, worst) = lockstep(&mut awm, &mut dense, &data, 64, 1e-9);
    outcome(ok, format!("max rel diff {worst:.2e}"))
}

/// WM-Sketch with every bucket decayed explicitly at each step.
struct NaiveWm {
    family: HashFamily,
    z: Vec<Vec<f64>>,
    opt: OptimizerConfig,
    t: u64,
}

impl NaiveWm {
    fn new(family: HashFamily, opt: OptimizerConfig) -> Self {
        let z = vec![vec![0.0; family.width()]; family.depth()];
        Self { family, z, opt, t: 0 }
    }

    fn root_s(&self) -> f64 {
        (self.family.depth() as f64).sqrt()
    }

    fn margin(&self, x: &SparseVector) -> f64 {
        let mut dot = 0.0;
        for (f, v) in x.iter() {
            for j in 0..self.family.depth() {
                let h = self.family.bucket(j, f).unwrap();
                dot += v * self.family.sign(j, f).unwrap() * self.z[j][h];
            }
        }
        dot / self.root_s()
    }

    fn update(&mut self, x: &SparseVector, y: Label) -> f64 {
        let tau = self.margin(x);
        let eta = self.opt.schedule.rate(self.t);
        let g = self.opt.loss.grad(y.value() * tau).unwrap();
        for row in &mut self.z {
            for v in row.iter_mut() {
                *v *= 1.0 - eta * self.opt.lambda;
            }
        }
        let rs = self.root_s();
        for (f, v) in x.iter() {
            for j in 0..self.family.depth() {
                let h = self.family.bucket(j, f).unwrap();
                self.z[j][h] -= eta * y.value() * g * v * self.family.sign(j, f).unwrap() / rs;
            }
        }
        self.t += 1;
        tau
    }

    fn query(&self, f: FeatureId) -> f64 {
        let mut vals: Vec<f64> = (0..self.family.depth())
            .map(|j| self.family.sign(j, f).unwrap() * self.z[j][self.family.bucket(j, f).unwrap()])
            .collect();
        self.root_s() * median_of(&mut vals)
    }
}

fn median_of(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn c03_scale_trick() -> Outcome {
    let data = small_stream(4, 10_000);
    let opt = logistic(0.5, 1e-3);
    let family = HashFamily::new(5, 5, 16).unwrap();
    let mut lazy = WmSketch::with_family(family.clone(), 0, opt).unwrap();
    let mut naive = NaiveWm::new(family, opt);
    let mut ok = true;
    let mut worst = 0.0f64;
    for ex in &data {
        let a = lazy.update(&ex.features, ex.label);
        let b = naive.update(&ex.features, ex.label);
        worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1e-6));
        ok &= rel_close(a, b, 1e-6);
    }
    for f in 0..64 {
        let (a, b) = (lazy.query(f), naive.query(f));
        worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1e-6));
        ok &= rel_close(a, b, 1e-6);
    }
    outcome(
        ok,
        format!("{} updates, alpha {:.3e}, max rel diff {worst:.2e}", data.len(), lazy.alpha()),
    )
}

fn c04_count_sketch() -> Outcome {
    let (d, width, depth, trials) = (1024usize, 128usize, 7usize, 100u64);
    let mut failures = 0u64;
    let mut failed_trials = 0u64;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let mut cs = CountSketch::new(width * depth, depth, trial).unwrap();
        let mut x = vec![0.0; d];
        for i in index::sample(&mut rng, d, 10) {
            x[i] = rng.random_range(-1.0..1.0);
            cs.update(i as FeatureId, x[i]).unwrap();
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let bad = (0..d).filter(|&i| (cs.query(i as FeatureId) - x[i]).abs() > 0.3 * norm).count() as u64;
        failures += bad;
        failed_trials += (bad > 0) as u64;
    }
    let rate = failures as f64 / (trials as f64 * d as f64);
    outcome(
        rate <= 0.02,
        format!("failure rate {rate:.5} over (trial, coordinate) pairs; {failed_trials}/{trials} trials with any failure"),
    )
}

/// The synthetic family shared by criteria 5 and 6.
fn recovery_stream(seed: u64) -> Vec<LabeledExample> {
    let spec = SyntheticSpec {
        sparsity: 10,
        seed,
        ..SyntheticSpec::default()
    };
    SyntheticStream::new(spec).unwrap().collect()
}

const RECOVERY_OPT: (f64, f64) = (1.0, 1e-4);

fn train_preset(kind: MethodKind, budget: usize, seed: u64, data: &[LabeledExample]) -> (Box<dyn Learner>, f64) {
    let opt = logistic(RECOVERY_OPT.0, RECOVERY_OPT.1);
    let mut l = LearnerConfig::new(preset(kind, budget).unwrap(), opt, seed).build().unwrap();
    let mut t = ErrorTracker::default();
    for ex in data {
        let m = l.update(&ex.features, ex.label);
        t.record(m, ex.label);
    }
    (l, t.rate().unwrap())
}

fn c05_recovery_ordering() -> Outcome {
    let kinds = [MethodKind::Awm, MethodKind::Wm, MethodKind::SpaceSaving, MethodKind::Trunc];
    let mut errs: HashMap<MethodKind, Vec<f64>> = HashMap::new();
    let k = 128;
    for seed in 0..10 {
        let data = recovery_stream(seed);
        let mut dense = DenseModel::new(logistic(RECOVERY_OPT.0, RECOVERY_OPT.1)).unwrap();
        for ex in &data {
            dense.update(&ex.features, ex.label);
        }
        let w = dense.weights();
        for kind in kinds {
            let (l, _) = train_preset(kind, 8192, seed, &data);
            let e = rel_err(&l.top_k(k).unwrap(), &w, k);
            errs.entry(kind).or_default().push(e);
        }
    }
    let med: HashMap<MethodKind, f64> = errs.into_iter().map(|(k, v)| (k, median(v))).collect();
    let awm = med[&MethodKind::Awm];
    let ok = kinds[1..].iter().all(|k| awm <= med[k]);
    let detail = kinds.iter().map(|k| format!("{k} {:.3}", med[k])).collect::<Vec<_>>().join(", ");
    outcome(ok, format!("median RelErr: {detail}"))
}

fn c06_classification_ordering() -> Outcome {
    let (mut awm, mut hash) = (Vec::new(), Vec::new());
    for seed in 0..10 {
        let data = recovery_stream(seed);
        awm.push(train_preset(MethodKind::Awm, 8192, seed, &data).1);
        hash.push(train_preset(MethodKind::Hash, 8192, seed, &data).1);
    }
    let (a, h) = (median(awm), median(hash));
    outcome(a <= h + 0.01, format!("median online error: awm {a:.4}, hash {h:.4}"))
}

/// Cost by the formulas, independent of the library's cost function.
fn formula_cost(kind: MethodKind, heap: usize, width: usize, depth: usize) -> Option<usize> {
    match kind {
        MethodKind::Trunc => Some(8 * heap),
        MethodKind::Ptrunc | MethodKind::SpaceSaving => Some(12 * heap),
        MethodKind::Hash => Some(4 * width + 8 * heap),
        MethodKind::Wm | MethodKind::Awm | MethodKind::CmFrequent => Some(4 * width * depth + 8 * heap),
        MethodKind::Dense => None,
    }
}

fn brute_force(kind: MethodKind, budget: usize) -> Vec<MethodConfig> {
    let pows: Vec<usize> = (0..=24).map(|i| 1usize << i).collect();
    let heaps: Vec<usize> = match kind {
        MethodKind::Wm | MethodKind::Awm | MethodKind::Hash => std::iter::once(0).chain(pows.iter().copied()).collect(),
        _ => pows.clone(),
    };
    let (widths, depths): (Vec<usize>, Vec<usize>) = match kind {
        MethodKind::Trunc | MethodKind::Ptrunc | MethodKind::SpaceSaving => (vec![0], vec![0]),
        MethodKind::Hash => (pows.clone(), vec![1]),
        _ => (pows.clone(), (1..=31).collect()),
    };
    let mut out = Vec::new();
    for &h in &heaps {
        for &w in &widths {
            for &d in &depths {
                if formula_cost(kind, h, w, d).is_some_and(|c| c <= budget) {
                    out.push(MethodConfig::new(kind, h, w, d).with_budget(budget));
                }
            }
        }
    }
    out.sort_by(|a, b| {
        let (ca, cb) = (formula_cost(kind, a.heap_capacity, a.width, a.depth), formula_cost(kind, b.heap_capacity, b.width, b.depth));
        cb.cmp(&ca)
            .then(b.heap_capacity.cmp(&a.heap_capacity))
            .then(b.width.cmp(&a.width))
            .then(a.depth.cmp(&b.depth))
    });
    out
}

fn c07_cost_model() -> Outcome {
    let trunc = memory_cost(&MethodConfig::new(MethodKind::Trunc, 128, 0, 0));
    let awm = memory_cost(&MethodConfig::new(MethodKind::Awm, 128, 256, 1));
    let mut mismatches = Vec::new();
    let kinds = [
        MethodKind::Wm,
        MethodKind::Awm,
        MethodKind::Trunc,
        MethodKind::Ptrunc,
        MethodKind::SpaceSaving,
        MethodKind::Hash,
        MethodKind::CmFrequent,
    ];
    let mut compared = 0;
    for kind in kinds {
        for budget in [1, 100, 1024, 2048, 8192, 32768] {
            let got = enumerate_configs(kind, budget, GridConstraints::default());
            compared += got.len();
            if got != brute_force(kind, budget) {
                mismatches.push(format!("{kind}@{budget}"));
            }
        }
    }
    let ok = trunc == Some(1024) && awm == Some(2048) && mismatches.is_empty();
    outcome(
        ok,
        format!("trunc K=128 -> {trunc:?} B, awm (128,256,1) -> {awm:?} B, {compared} configs compared, mismatches {mismatches:?}"),
    )
}

fn c08_rel_err() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut min_seen = f64::INFINITY;
    let mut exact_ones = 0;
    let trials = 1000;
    for _ in 0..trials {
        let n = rng.random_range(1..60);
        let w: HashMap<FeatureId, f64> = (0..n).map(|_| (rng.random_range(0..100), rng.random_range(-5.0..5.0))).collect();
        let k = rng.random_range(1..20);
        let est: Vec<(FeatureId, f64)> = (0..rng.random_range(0..30))
            .map(|_| (rng.random_range(0..120), rng.random_range(-5.0..5.0)))
            .collect();
        let e = rel_err(&TopKEstimate::ranked(est, k), &w, k);
        min_seen = min_seen.min(e);
        exact_ones += (rel_err(&true_top_k(&w, k), &w, k) == 1.0) as u32;
    }
    outcome(
        min_seen >= 1.0 && exact_ones == trials,
        format!("min RelErr {min_seen:.4} over {trials} instances; RelErr(true top-K) == 1 in {exact_ones}/{trials}"),
    )
}

fn c09_pmi() -> Outcome {
    let opt = logistic(1.0, 0.0);
    let ln2 = std::f64::consts::LN_2;
    let (mut planted_est, mut indep_max, mut argmax_hits) = (Vec::new(), Vec::new(), 0);
    for seed in 0..10 {
        for planted in [Some((2, 7)), None] {
            let mut m = AwmSketch::new(1024, 1, 1024, seed, opt).unwrap();
            let mut s = PmiStream::new(PmiConfig::default(), &mut m, seed).unwrap();
            let spec = PairGeneratorSpec {
                vocabulary: 10,
                planted,
                pairs: 100_000,
                seed,
            };
            for (u, v) in spec.generate().unwrap() {
                s.observe_pair(&u, &v);
            }
            let all = s.all_positive_pairs();
            match planted {
                Some(_) => {
                    argmax_hits += (all[0].u == "t2" && all[0].v == "t7") as u32;
                    planted_est.push(all[0].estimated_pmi);
                }
                None => indep_max.push(all.iter().map(|e| e.estimated_pmi.abs()).fold(0.0, f64::max)),
            }
        }
    }
    let (p, q) = (median(planted_est), median(indep_max));
    outcome(
        (p - ln2).abs() <= 0.15 && q <= 0.3,
        format!("median argmax estimate {p:.3} (ln 2 = {ln2:.3}, planted pair is argmax in {argmax_hits}/10), median independent max |estimate| {q:.3}"),
    )
}

fn c10_deltoids() -> Outcome {
    let opt = logistic(1.0, 0.0);
    let (mut awm_r, mut cm_r) = (Vec::new(), Vec::new());
    let cfg = preset(MethodKind::Awm, 2048).unwrap();
    let mut costs = (0, 0);
    for seed in 0..10 {
        let (a, b) = DeltoidSpec {
            seed,
            ..DeltoidSpec::default()
        }
        .generate();
        let mut awm = LearnerConfig::new(cfg, opt, seed).build().unwrap();
        awm_r.push(deltoid_detect(&a, &b, awm.as_mut(), 128, 5.0).unwrap().recall.unwrap());
        let mut cm = PairedCountMin::new(128, 64, 2, seed).unwrap();
        cm_r.push(cm.detect(&a, &b, 128, 5.0).unwrap().recall.unwrap());
        costs = (awm.memory_cost(), cm.memory_cost());
    }
    let (a, c) = (median(awm_r), median(cm_r));
    outcome(
        a >= c && costs == (2048, 2048),
        format!("median recall awm {a:.3} vs paired count-min {c:.3} at {} / {} B", costs.0, costs.1),
    )
}

fn c11_explain() -> Outcome {
    let opt = logistic(1.0, 0.0);
    let k = 20;
    let mut corr = Vec::new();
    for seed in 0..5 {
        let spec = AttributeSpec {
            seed,
            ..AttributeSpec::default()
        };
        let (_, rows) = spec.generate().unwrap();
        let mut m = LearnerConfig::new(MethodConfig::new(MethodKind::Awm, k, 64, 1), opt, seed).build().unwrap();
        corr.push(explain_stream(rows, m.as_mut(), k).unwrap().correlation.unwrap_or(f64::NAN));
    }
    let shown = corr.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>().join(" ");
    let med = median(corr);
    outcome(med >= 0.9, format!("median Pearson correlation {med:.3} over 5 seeds [{shown}]"))
}

fn c12_ptrunc_survival() -> Outcome {
    let x = SparseVector::from_pairs(vec![(1, 9.0), (2, 1.0)]).unwrap();
    let opt = OptimizerConfig::new(Loss::Logistic, LrSchedule::constant(0.1), 0.0);
    let trials = 10_000;
    let mut heavy = 0;
    for seed in 0..trials {
        let mut m = ProbTruncatedModel::new(1, opt, 50_000 + seed).unwrap();
        m.update(&x, Label::Positive);
        heavy += m.contains(1) as u32;
    }
    let p = heavy as f64 / trials as f64;
    outcome((p - 0.9).abs() <= 0.03, format!("heavier key survived in {p:.4} of {trials} trials"))
}

fn c13_gradients() -> Outcome {
    let h = 1e-6;
    let mut worst = 0.0f64;
    for loss in [Loss::Logistic, Loss::smoothed_hinge()] {
        for t in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let fd = (loss.value(t + h).unwrap() - loss.value(t - h).unwrap()) / (2.0 * h);
            worst = worst.max((fd - loss.grad(t).unwrap()).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max |finite difference - gradient| {worst:.2e}"))
}

fn run_cli(args: &[&str]) -> i32 {
    let mut argv = vec!["wmsketch", "--quiet"];
    argv.extend_from_slice(args);
    wmsketch::cli::run(argv)
}

fn c14_replay() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 6] = [
        &["--method", "awm", "--budget-bytes", "2048"],
        &["--method", "wm", "--heap-capacity", "32", "--width", "64", "--depth", "3", "--lambda", "1e-3"],
        &["--method", "ptrunc", "--budget-bytes", "1200", "--loss", "hinge"],
        &["--method", "ss", "--budget-bytes", "1200", "--lr-schedule", "constant", "--lr0", "0.1"],
        &["--method", "cmf", "--budget-bytes", "4096", "--compare-dense"],
        &["--method", "hash", "--budget-bytes", "1024", "--grid-search"],
    ];
    let mut failures = Vec::new();
    for (i, extra) in runs.iter().enumerate() {
        let first = dir.path().join(format!("run{i}"));
        let second = dir.path().join(format!("replay{i}"));
        let mut args = vec!["--seed", "11", "--out-dir", first.to_str().unwrap(), "train", "--dim", "4096", "--length", "3000"];
        args.extend_from_slice(extra);
        let manifest = first.join("manifest.json");
        let code = run_cli(&args);
        let replay = run_cli(&["--out-dir", second.to_str().unwrap(), "train", "--replay", manifest.to_str().unwrap()]);
        let same = std::fs::read(&manifest).ok() == std::fs::read(second.join("manifest.json")).ok();
        if code != 0 || replay != 0 || !same {
            failures.push(format!("{extra:?}: exit {code}/{replay}, identical manifests {same}"));
        }
    }
    let n = runs.len();
    outcome(failures.is_empty(), format!("{} of {n} replays bit-exact {failures:?}", n - failures.len()))
}

type Criterion = (&'static str, &'static str, Option<u64>, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 14] = [
        ("1", "collision-free WM equals dense OGD", Some(5), c01_collision_free),
        ("2", "degenerate AWM equivalences", Some(10), c02_degenerate_awm),
        ("3", "global scale equals explicit decay", None, c03_scale_trick),
        ("4", "count-sketch coordinate recovery", Some(10), c04_count_sketch),
        ("5", "recovery error ordering", Some(60), c05_recovery_ordering),
        ("6", "classification error ordering", Some(60), c06_classification_ordering),
        ("7", "memory cost model", None, c07_cost_model),
        ("8", "RelErr properties", None, c08_rel_err),
        ("9", "PMI convergence", Some(60), c09_pmi),
        ("10", "deltoid recall", Some(60), c10_deltoids),
        ("11", "explanation correlation", Some(30), c11_explain),
        ("12", "probabilistic truncation survival", None, c12_ptrunc_survival),
        ("13", "loss gradient checks", None, c13_gradients),
        ("14", "manifest replay determinism", None, c14_replay),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|s| took < Duration::from_secs(s));
        let ok = out.ok && in_time;
        failed += !ok as u32;
        let limit_txt = limit.map(|s| format!(" (limit {s} s)")).unwrap_or_default();
        println!(
            "{} criterion {id}: {name}: {} [{:.2} s{limit_txt}]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
