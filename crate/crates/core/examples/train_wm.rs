//! Train a Weight-Median Sketch on a synthetic stream and list its heaviest weights.

use wmsketch::data::{SyntheticSpec, SyntheticStream};
use wmsketch::eval::ErrorTracker;
use wmsketch::model::{Loss, LrSchedule, OptimizerConfig};
use wmsketch::{Learner, WmSketch};

fn main() -> wmsketch::Result<()> {
    let spec = SyntheticSpec {
        sparsity: 10,
        length: 20_000,
        seed: 1,
        ..SyntheticSpec::default()
    };
    let stream = SyntheticStream::new(spec)?;
    let truth = stream.w_true().clone();
    let opt = OptimizerConfig::new(Loss::Logistic, LrSchedule::inverse_sqrt(1.0), 1e-4);
    // 1024 weights in 4 rows, heap of 32 candidates
    let mut wm = WmSketch::new(1024, 4, 32, 7, opt)?;
    let mut errors = ErrorTracker::default();
    for ex in stream {
        let margin = wm.update(&ex.features, ex.label);
        errors.record(margin, ex.label);
    }
    println!("online error rate {:.4}, memory {} B", errors.rate()?, wm.memory_cost());
    for (f, w) in wm.top_k(10)?.entries {
        let t = truth.get(&f).copied().unwrap_or(0.0);
        println!("feature {f:>6}  estimate {w:>8.4}  generating weight {t:>7.3}");
    }
    Ok(())
}
