//! Parse LIBSVM lines from any reader and train on them as they arrive.

use std::io::Cursor;

use wmsketch::data::{format_libsvm_line, LibsvmReader, SyntheticSpec, SyntheticStream};
use wmsketch::eval::ErrorTracker;
use wmsketch::model::{Loss, LrSchedule, OptimizerConfig};
use wmsketch::{AwmSketch, Learner};

fn main() -> wmsketch::Result<()> {
    // a small file in memory: generated examples, a comment and a blank line
    let spec = SyntheticSpec { dim: 4096, length: 3000, seed: 9, ..SyntheticSpec::default() };
    let mut text = String::from("# generated\n\n");
    for ex in SyntheticStream::new(spec)? {
        text += &format_libsvm_line(&ex);
        text.push('\n');
    }
    let opt = OptimizerConfig::new(Loss::smoothed_hinge(), LrSchedule::inverse_sqrt(0.5), 1e-4);
    let mut awm = AwmSketch::new(512, 2, 64, 9, opt)?;
    let mut errors = ErrorTracker::default();
    for ex in LibsvmReader::new(Cursor::new(text)) {
        let ex = ex?;
        let m = awm.update(&ex.features, ex.label);
        errors.record(m, ex.label);
    }
    println!("{} examples, online error rate {:.4}", errors.examples, errors.rate()?);

    let bad = "+1 3:0.5\n-1 4:oops\n";
    match LibsvmReader::new(Cursor::new(bad)).collect::<wmsketch::Result<Vec<_>>>() {
        Err(e) => println!("malformed input: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
