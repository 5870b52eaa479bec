//! Sketch a sparse vector and read coordinates back with median queries.

use wmsketch::sketch::CountSketch;

fn main() -> wmsketch::Result<()> {
    // 7 rows of 128 buckets
    let mut cs = CountSketch::new(128 * 7, 7, 42)?;
    let x = [(3u32, 2.5), (17, -1.0), (400, 0.75), (1023, 4.0)];
    for &(i, v) in &x {
        cs.update(i, v)?;
    }
    for &(i, v) in &x {
        println!("x[{i}] = {v:>5}  estimate {:>8.4}", cs.query(i));
    }
    println!("x[5] = 0      estimate {:>8.4}", cs.query(5));

    // sketches with the same seed add up
    let mut other = CountSketch::new(128 * 7, 7, 42)?;
    other.update(3, -2.5)?;
    let merged = cs.merge(&other)?;
    println!("after merging a sketch of -2.5 e_3: x[3] estimate {:.4}", merged.query(3));
    Ok(())
}
