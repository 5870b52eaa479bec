//! RelErr of every budgeted method at one memory budget, against an unbudgeted model.
//! Run with --release; pass a budget in bytes as the first argument (default 8192).

use wmsketch::baselines::DenseModel;
use wmsketch::data::{SyntheticSpec, SyntheticStream};
use wmsketch::eval::{preset, rel_err, ErrorTracker, MethodKind};
use wmsketch::model::{Loss, LrSchedule, OptimizerConfig};
use wmsketch::{Learner, LearnerConfig};

fn main() -> wmsketch::Result<()> {
    let budget: usize = std::env::args().nth(1).map_or(8192, |s| s.parse().expect("budget in bytes"));
    let spec = SyntheticSpec {
        sparsity: 10,
        length: 50_000,
        seed: 3,
        ..SyntheticSpec::default()
    };
    let data: Vec<_> = SyntheticStream::new(spec)?.collect();
    let opt = OptimizerConfig::new(Loss::Logistic, LrSchedule::inverse_sqrt(1.0), 1e-4);
    let mut dense = DenseModel::new(opt)?;
    for ex in &data {
        dense.update(&ex.features, ex.label);
    }
    let truth = dense.weights();
    let k = 128;
    println!("{:<7} {:>22} {:>8} {:>10}", "method", "shape (heap,width,depth)", "RelErr", "error");
    for kind in MethodKind::ALL {
        if kind == MethodKind::Dense {
            continue;
        }
        let cfg = preset(kind, budget)?;
        let mut l = LearnerConfig::new(cfg, opt, 3).build()?;
        let mut t = ErrorTracker::default();
        for ex in &data {
            let m = l.update(&ex.features, ex.label);
            t.record(m, ex.label);
        }
        let kk = k.min(cfg.heap_capacity);
        let shape = format!("({},{},{})", cfg.heap_capacity, cfg.width, cfg.depth);
        let re = if kk == 0 { f64::NAN } else { rel_err(&l.top_k(kk)?, &truth, kk) };
        println!("{:<7} {shape:>22} {re:>8.3} {:>10.4}", kind.name(), t.rate()?);
    }
    Ok(())
}
