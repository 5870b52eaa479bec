//! Sketch sizes from the recovery bound for a few targets.

use wmsketch::sizing::{simplified_size, theoretical_size, TheoryParams};

fn main() -> wmsketch::Result<()> {
    println!("{:>5} {:>6} {:>8} {:>7} {:>12} {:>6}", "eps", "delta", "dim", "lambda", "k", "s");
    for (eps, delta, dim, lambda) in [(0.5, 0.01, 1024, 1.0), (0.25, 0.01, 1024, 1.0), (0.5, 0.01, 1 << 20, 1.0), (0.5, 0.01, 1024, 0.1)] {
        let s = theoretical_size(&TheoryParams::new(eps, delta, dim, lambda))?;
        println!("{eps:>5} {delta:>6} {dim:>8} {lambda:>7} {:>12} {:>6}", s.k, s.s);
    }
    let s = simplified_size(0.5, 0.01, 1024, 0.5)?;
    println!("simplified form at lambda 0.5: k {} s {} ({} B of weights)", s.k, s.s, s.memory_bytes());
    Ok(())
}
