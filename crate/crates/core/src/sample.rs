//! Random towers and random compatible families for property testing.
//!
//! Families are generated level by level: the level-1 map is chosen freely
//! and each higher level picks images inside the correct transition fiber,
//! so compatibility holds by construction. The bijective generator matches
//! fibers with random bijections instead; the minimal-biased generator
//! additionally rejection-samples for full-cycle levels.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::maps::CompatibleFamily;
use crate::quotient::Elem;
use crate::tower::{make_cyclic_tower, make_product_tower, Tower, TransitionMap};

/// A random tower with every level order at most `max_order`: a cyclic
/// tower, a product of two cyclic towers, or a table-backed rebuild of one
/// of those.
pub fn random_tower<R: Rng + ?Sized>(rng: &mut R, max_order: u64, max_depth: usize) -> Tower {
    let max_depth = max_depth.max(1);
    let tower = match rng.gen_range(0..3) {
        0 => random_cyclic(rng, max_order, max_depth),
        1 => {
            // leave room for a second factor of order >= 2
            let a = random_cyclic(rng, (max_order / 2).max(2), max_depth);
            let b = random_cyclic(rng, (max_order / a.top().order()).max(2), max_depth);
            make_product_tower(&[a, b]).expect("orders were budgeted")
        }
        _ => {
            let small = random_cyclic(rng, max_order.min(32), max_depth.min(3));
            table_backed(&small)
        }
    };
    debug_assert!(tower.verify().is_clean());
    tower
}

fn random_cyclic<R: Rng + ?Sized>(rng: &mut R, max_order: u64, max_depth: usize) -> Tower {
    let p = *[2u64, 3, 5, 6, 7].choose(rng).unwrap();
    let mut depth_cap = 0;
    let mut order = 1u64;
    while depth_cap < max_depth && order.saturating_mul(p) <= max_order {
        order *= p;
        depth_cap += 1;
    }
    if depth_cap == 0 {
        // even one level does not fit; fall back to the smallest base
        return make_cyclic_tower(2, 1).expect("depth-1 base-2 tower always fits");
    }
    let depth = rng.gen_range(1..=depth_cap);
    make_cyclic_tower(p, depth).expect("depth was capped against max_order")
}

fn table_backed(t: &Tower) -> Tower {
    let levels = t
        .levels()
        .iter()
        .map(|q| q.to_table_backed().expect("small orders only"))
        .collect();
    let transitions = (1..=t.depth())
        .map(|k| TransitionMap::new(k, k - 1, t.transition(k).table().to_vec()).unwrap())
        .collect();
    Tower::from_parts(levels, transitions).expect("same shape as the source tower")
}

/// A uniformly random compatible family: each element's image is drawn
/// uniformly from the fiber over the image of its projection. Level maps
/// are usually not bijective.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, tower: &Arc<Tower>) -> CompatibleFamily {
    let mut tables: Vec<Vec<Elem>> = vec![vec![0]];
    for level in 1..=tower.depth() {
        let fibers = tower.fibers(level);
        let t = tower.transition(level);
        let prev = &tables[level - 1];
        let table = tower
            .level(level)
            .elements()
            .map(|x| {
                let base_image = prev[t.apply(x) as usize];
                *fibers[base_image as usize].choose(rng).unwrap()
            })
            .collect();
        tables.push(table);
    }
    CompatibleFamily::from_level_tables(tower.clone(), tables)
        .expect("fiber-wise lifts are compatible by construction")
}

/// A random compatible family that is bijective at every level: fibers are
/// matched with uniformly random bijections above a random permutation.
pub fn random_bijective_family<R: Rng + ?Sized>(
    rng: &mut R,
    tower: &Arc<Tower>,
) -> CompatibleFamily {
    let tables = bijective_tables(rng, tower, |_, _| true);
    CompatibleFamily::from_level_tables(tower.clone(), tables)
        .expect("fiber bijections over a bijection are compatible and bijective")
}

/// A random bijective family biased toward minimality: every level is
/// rejection-sampled for a single full cycle (best effort, bounded tries).
pub fn random_minimal_family<R: Rng + ?Sized>(
    rng: &mut R,
    tower: &Arc<Tower>,
) -> CompatibleFamily {
    let tables = bijective_tables(rng, tower, |table, tries| {
        tries >= 60 || is_full_cycle(table)
    });
    CompatibleFamily::from_level_tables(tower.clone(), tables)
        .expect("fiber bijections over a bijection are compatible and bijective")
}

fn bijective_tables<R: Rng + ?Sized>(
    rng: &mut R,
    tower: &Arc<Tower>,
    accept: impl Fn(&[Elem], u32) -> bool,
) -> Vec<Vec<Elem>> {
    let mut tables: Vec<Vec<Elem>> = vec![vec![0]];
    for level in 1..=tower.depth() {
        let fibers = tower.fibers(level);
        let prev = tables[level - 1].clone();
        let mut tries = 0;
        let table = loop {
            let mut table = vec![0 as Elem; tower.level(level).order() as usize];
            for (base, fiber) in fibers.iter().enumerate() {
                let target = &fibers[prev[base] as usize];
                let mut images = target.clone();
                images.shuffle(rng);
                for (&x, &y) in fiber.iter().zip(&images) {
                    table[x as usize] = y;
                }
            }
            if accept(&table, tries) {
                break table;
            }
            tries += 1;
        };
        tables.push(table);
    }
    tables
}

fn is_full_cycle(table: &[Elem]) -> bool {
    // back at the start only after exactly n steps
    let n = table.len();
    let mut cur = table[0] as usize;
    let mut steps = 1usize;
    while cur != 0 && steps < n {
        cur = table[cur] as usize;
        steps += 1;
    }
    cur == 0 && steps == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{equivalence_report, is_ergodic};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_towers_are_clean_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let t = random_tower(&mut rng, 128, 4);
            assert!(t.verify().is_clean());
            assert!(t.levels().iter().all(|q| q.order() <= 128));
            assert!(t.depth() >= 1);
        }
    }

    #[test]
    fn random_families_are_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let tower = Arc::new(random_tower(&mut rng, 64, 3));
            let f = random_family(&mut rng, &tower);
            assert!(f.check_compatibility().is_ok());
        }
    }

    #[test]
    fn bijective_families_are_bijective_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let tower = Arc::new(random_tower(&mut rng, 64, 3));
            let f = random_bijective_family(&mut rng, &tower);
            let report = equivalence_report(&f);
            assert!(report.levels.iter().all(|l| l.bijective));
        }
    }

    #[test]
    fn minimal_bias_produces_ergodic_families_on_cyclic_towers() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let tower = Arc::new(make_cyclic_tower(2, 4).unwrap());
        let hits = (0..20)
            .filter(|_| is_ergodic(&random_minimal_family(&mut rng, &tower)).is_ergodic())
            .count();
        assert!(hits >= 15, "only {hits}/20 biased samples were ergodic");
    }
}
