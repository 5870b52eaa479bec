//! Items much more frequent in one stream than the other, at equal 2 KB budgets.

use wmsketch::apps::{deltoid_detect, DeltoidSpec, PairedCountMin};
use wmsketch::model::{Loss, LrSchedule, OptimizerConfig};
use wmsketch::{AwmSketch, Learner};

fn main() -> wmsketch::Result<()> {
    let spec = DeltoidSpec { seed: 2, ..DeltoidSpec::default() };
    let (a, b) = spec.generate();
    let opt = OptimizerConfig::new(Loss::Logistic, LrSchedule::inverse_sqrt(1.0), 0.0);
    let mut awm = AwmSketch::new(256, 1, 128, 2, opt)?;
    let r = deltoid_detect(&a, &b, &mut awm, 128, 5.0)?;
    let mut cm = PairedCountMin::new(128, 64, 2, 2)?;
    let rc = cm.detect(&a, &b, 128, 5.0)?;
    println!("{} true deltoids at ratio 5", r.true_deltoids);
    println!("awm             ({} B): recall {:?}", awm.memory_cost(), r.recall);
    println!("paired count-min ({} B): recall {:?}", cm.memory_cost(), rc.recall);
    for (item, w) in r.detected.iter().take(5) {
        let side = if *w > 0.0 { "A" } else { "B" };
        println!("item {item:>5}  weight {w:>7.3}  heavier in {side}");
    }
    Ok(())
}
