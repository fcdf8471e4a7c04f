use std::sync::Arc;

use profdyn::analysis::{analyze, pushforward_uniform};
use profdyn::{make_cyclic_tower, CompatibleFamily, PrecisionMap};

fn main() -> profdyn::Result<()> {
    let tower = Arc::new(make_cyclic_tower(3, 4)?);
    let plus_one = CompatibleFamily::from_polynomial(tower.clone(), &[1, 1])?;
    let report = analyze(&plus_one);
    assert!(report.ergodic && report.obstruction_period == Some(3));
    println!(
        "x + 1 on the base-3 tower: ergodic = {}, obstruction period = {:?}",
        report.ergodic, report.obstruction_period
    );

    let shift = PrecisionMap::shift(3, tower)?;
    let push = pushforward_uniform(&shift, 2)?;
    assert!(push.uniform);
    println!("digit shift pushforward at level 2 is uniform: {}", push.uniform);
    Ok(())
}
