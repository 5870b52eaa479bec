//! Grid points that fit a budget, and the fixed preset per method.

use wmsketch::eval::{enumerate_configs, preset, GridConstraints, MethodKind};

fn main() -> wmsketch::Result<()> {
    let budget = 2048;
    for kind in [MethodKind::Awm, MethodKind::Wm, MethodKind::Trunc, MethodKind::SpaceSaving, MethodKind::Hash] {
        let all = enumerate_configs(kind, budget, GridConstraints::default());
        let full: Vec<_> = all.iter().filter(|c| c.cost() == Some(budget)).collect();
        let p = preset(kind, budget)?;
        println!(
            "{kind:<6} {:>5} configs fit, {:>4} use all {budget} B; preset heap {} width {} depth {} ({:?} B)",
            all.len(),
            full.len(),
            p.heap_capacity,
            p.width,
            p.depth,
            p.cost()
        );
    }
    Ok(())
}
