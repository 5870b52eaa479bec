//! Rank attributes of a synthetic table by learned weight and compare with exact relative risk.

use wmsketch::apps::{explain_stream, AttributeSpec};
use wmsketch::model::{Loss, LrSchedule, OptimizerConfig};
use wmsketch::AwmSketch;

fn main() -> wmsketch::Result<()> {
    let spec = AttributeSpec { seed: 4, ..AttributeSpec::default() };
    let (planted, rows) = spec.generate()?;
    let opt = OptimizerConfig::new(Loss::Logistic, LrSchedule::inverse_sqrt(1.0), 0.0);
    let mut awm = AwmSketch::new(64, 1, 20, 4, opt)?;
    let report = explain_stream(rows, &mut awm, 20)?;
    println!("{} rows; correlation of weight with ln(relative risk): {:?}", report.rows, report.correlation);
    for e in report.entries.iter().take(10) {
        let m = planted.iter().find(|p| p.0 == e.feature).map_or(1.0, |p| p.1);
        println!(
            "attribute {:>3}  weight {:>7.3}  relative risk {:>6.3}  planted multiplier {m:.3}",
            e.feature,
            e.weight,
            e.relative_risk.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
