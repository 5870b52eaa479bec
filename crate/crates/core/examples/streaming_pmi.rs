//! PMI of token pairs from a stream with one planted dependent pair.

use wmsketch::apps::{PairGeneratorSpec, PmiConfig, PmiStream};
use wmsketch::model::{Loss, LrSchedule, OptimizerConfig};
use wmsketch::AwmSketch;

fn main() -> wmsketch::Result<()> {
    let opt = OptimizerConfig::new(Loss::Logistic, LrSchedule::inverse_sqrt(1.0), 0.0);
    let mut awm = AwmSketch::new(1024, 1, 1024, 0, opt)?;
    let mut stream = PmiStream::new(PmiConfig::default(), &mut awm, 0)?;
    let spec = PairGeneratorSpec {
        vocabulary: 10,
        planted: Some((2, 7)),
        pairs: 100_000,
        seed: 0,
    };
    for (u, v) in spec.generate()? {
        stream.observe_pair(&u, &v);
    }
    println!("planted pair t2,t7 has PMI ln 2 = {:.3}", std::f64::consts::LN_2);
    for e in stream.all_positive_pairs().iter().take(5) {
        println!("{:>3} {:>3}  estimate {:>6.3}  exact {:>6.3}", e.u, e.v, e.estimated_pmi, e.exact_pmi.unwrap_or(f64::NAN));
    }
    Ok(())
}
