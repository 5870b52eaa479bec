//! The active-set variant: heavy features live exactly in a heap, the rest in the sketch.

use wmsketch::data::{SyntheticSpec, SyntheticStream};
use wmsketch::eval::ErrorTracker;
use wmsketch::model::{Loss, LrSchedule, OptimizerConfig};
use wmsketch::{AwmSketch, Learner};

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
    // the 2 KB shape: 128 heap entries, one row of 256
    let mut awm = AwmSketch::new(256, 1, 128, 7, opt)?;
    let mut errors = ErrorTracker::default();
    for ex in stream {
        let margin = awm.update(&ex.features, ex.label);
        errors.record(margin, ex.label);
    }
    println!(
        "online error rate {:.4}, memory {} B, {} evictions",
        errors.rate()?,
        awm.memory_cost(),
        awm.evictions()
    );
    let top = awm.top_k(10)?;
    let planted_found = top.ids().filter(|f| truth.contains_key(f)).count();
    for (f, w) in &top.entries {
        println!("feature {f:>6}  weight {w:>8.4}  sketch residual {:>8.4}", awm.sketch_estimate(*f));
    }
    println!("{planted_found} of the top 10 are planted features");

    let bytes = awm.to_bytes()?;
    let back = AwmSketch::from_bytes(&bytes)?;
    assert_eq!(back.to_bytes()?, bytes);
    println!("snapshot: {} bytes, reloads bit-identically", bytes.len());
    Ok(())
}
