//! Level-wise decision procedures: measure preservation, ergodicity, the
//! four-way equivalence of bijectivity / surjectivity / injectivity /
//! uniform pushforward, the total-ergodicity obstruction, orbits, and
//! pushforward measures.
//!
//! On a finite quotient with uniform measure, a level map preserves measure
//! exactly when it is a bijection, and is ergodic exactly when it is a
//! single full-length cycle (minimal). Verdicts are quantified over the
//! supplied tower's levels only; every report states the certified range.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{CompatibleFamily, Dynamics, PrecisionMap};
use crate::quotient::Elem;
use crate::tower::Tower;
use crate::Rational;

/// Cycle data of one level map: either the multiset of cycle lengths of a
/// permutation (sorted ascending) or a collision witnessing that the map is
/// not injective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleStructure {
    Permutation { cycle_lengths: Vec<u64> },
    NotPermutation { first: Elem, second: Elem },
}

impl CycleStructure {
    /// Single full-length cycle on a set of the given order.
    pub fn is_full_cycle(&self, order: u64) -> bool {
        matches!(self, CycleStructure::Permutation { cycle_lengths }
            if cycle_lengths.len() == 1 && cycle_lengths[0] == order)
    }
}

fn table_cycle_structure(table: &[Elem]) -> CycleStructure {
    let n = table.len();
    let mut first_preimage: Vec<Option<Elem>> = vec![None; n];
    for (x, &y) in table.iter().enumerate() {
        match first_preimage[y as usize] {
            Some(prev) => {
                return CycleStructure::NotPermutation {
                    first: prev,
                    second: x as Elem,
                }
            }
            None => first_preimage[y as usize] = Some(x as Elem),
        }
    }
    let mut seen = vec![false; n];
    let mut cycle_lengths = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            len += 1;
            cur = table[cur] as usize;
        }
        cycle_lengths.push(len);
    }
    cycle_lengths.sort_unstable();
    CycleStructure::Permutation { cycle_lengths }
}

/// Cycle decomposition of the level-`level` map, or a collision witness.
pub fn cycle_structure(f: &CompatibleFamily, level: usize) -> CycleStructure {
    table_cycle_structure(f.level_map(level))
}

/// Measure-preservation verdict: every level map bijective, or the first
/// collision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureVerdict {
    Preserving,
    NotPreserving {
        level: usize,
        first: Elem,
        second: Elem,
    },
}

impl MeasureVerdict {
    pub fn is_preserving(&self) -> bool {
        matches!(self, MeasureVerdict::Preserving)
    }
}

pub fn is_measure_preserving(f: &CompatibleFamily) -> MeasureVerdict {
    for level in 0..=f.tower().depth() {
        if let CycleStructure::NotPermutation { first, second } = cycle_structure(f, level) {
            return MeasureVerdict::NotPreserving {
                level,
                first,
                second,
            };
        }
    }
    MeasureVerdict::Preserving
}

/// Ergodicity verdict: every level map one full cycle, or the first level
/// whose cycle structure falls short.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErgodicVerdict {
    Ergodic,
    NotErgodic {
        level: usize,
        structure: CycleStructure,
    },
}

impl ErgodicVerdict {
    pub fn is_ergodic(&self) -> bool {
        matches!(self, ErgodicVerdict::Ergodic)
    }
}

pub fn is_ergodic(f: &CompatibleFamily) -> ErgodicVerdict {
    for level in 0..=f.tower().depth() {
        let s = cycle_structure(f, level);
        if !s.is_full_cycle(f.tower().level(level).order()) {
            return ErgodicVerdict::NotErgodic {
                level,
                structure: s,
            };
        }
    }
    ErgodicVerdict::Ergodic
}

/// Per-level results of the four independently computed criteria. They must
/// agree on every level; `agree` records whether they did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceLevel {
    pub order: u64,
    pub bijective: bool,
    pub surjective: bool,
    pub injective: bool,
    pub uniform_pushforward: bool,
    pub agree: bool,
}

/// Output of [`equivalence_report`]. `coherent` is false only on an
/// implementation bug: the four criteria coincide on finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub levels: Vec<EquivalenceLevel>,
    pub coherent: bool,
}

/// Independently compute, per level: bijectivity, surjectivity,
/// injectivity, and uniformity of the pushforward of the uniform measure.
/// Nonsingularity is not a separate predicate here: with uniform measure on
/// a finite set it collapses into surjectivity.
pub fn equivalence_report(f: &CompatibleFamily) -> EquivalenceReport {
    let mut levels = Vec::with_capacity(f.tower().depth() + 1);
    for level in 0..=f.tower().depth() {
        let table = f.level_map(level);
        let n = table.len();

        // bijectivity: single pass with a visited set
        let mut visited = vec![false; n];
        let mut bijective = true;
        for &y in table {
            if visited[y as usize] {
                bijective = false;
                break;
            }
            visited[y as usize] = true;
        }

        // surjectivity: image coverage
        let mut hit = vec![false; n];
        for &y in table {
            hit[y as usize] = true;
        }
        let surjective = hit.iter().all(|&h| h);

        // injectivity: sort and look for adjacent duplicates
        let mut sorted = table.to_vec();
        sorted.sort_unstable();
        let injective = sorted.windows(2).all(|w| w[0] != w[1]);

        // uniform pushforward: every preimage count equals 1, i.e. the
        // image of the uniform measure has weight 1/n everywhere
        let mut counts = vec![0u64; n];
        for &y in table {
            counts[y as usize] += 1;
        }
        let uniform_pushforward = counts.iter().all(|&c| c == 1);

        let agree = bijective == surjective
            && surjective == injective
            && injective == uniform_pushforward;
        levels.push(EquivalenceLevel {
            order: n as u64,
            bijective,
            surjective,
            injective,
            uniform_pushforward,
            agree,
        });
    }
    let coherent = levels.iter().all(|l| l.agree);
    debug_assert!(coherent, "equivalence criteria disagree: implementation bug");
    EquivalenceReport { levels, coherent }
}

/// A finite factor forcing some power of the map to project to the
/// identity: at `level`, the map is minimal, so its `period`-th power (the
/// level order) is the identity there and no `period`-th power can be
/// ergodic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub level: usize,
    pub period: u64,
    /// The certificate `T^period = id` at `level`, checked explicitly.
    pub power_is_identity: bool,
}

/// Find the smallest nontrivial level whose map is minimal and certify the
/// resulting obstruction to total ergodicity. `None` when no nontrivial
/// level is minimal (then this criterion is silent).
pub fn total_ergodicity_obstruction(f: &CompatibleFamily) -> Option<Obstruction> {
    for level in 0..=f.tower().depth() {
        let order = f.tower().level(level).order();
        if order <= 1 {
            continue;
        }
        if cycle_structure(f, level).is_full_cycle(order) {
            let power = permutation_power(f.level_map(level), order);
            let power_is_identity = power
                .iter()
                .enumerate()
                .all(|(x, &y)| x as Elem == y);
            debug_assert!(power_is_identity, "minimal level map whose order-th power is not the identity");
            return Some(Obstruction {
                level,
                period: order,
                power_is_identity,
            });
        }
    }
    None
}

/// `table` composed with itself `k` times, by repeated squaring.
pub fn permutation_power(table: &[Elem], k: u64) -> Vec<Elem> {
    let n = table.len();
    let mut result: Vec<Elem> = (0..n as Elem).collect();
    let mut base = table.to_vec();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = result.iter().map(|&x| base[x as usize]).collect();
        }
        base = base.iter().map(|&x| base[x as usize]).collect();
        k >>= 1;
    }
    result
}

/// The sequence `[pi_level(x), pi_level(Tx), ..., pi_level(T^(len-1) x)]`.
/// Precision accounting is done up front; the error reports the required
/// input level.
pub fn orbit<D: Dynamics + ?Sized>(
    d: &D,
    x: Elem,
    x_level: usize,
    level: usize,
    len: usize,
) -> Result<Vec<Elem>> {
    if len == 0 {
        return Ok(Vec::new());
    }
    let mut needs = vec![level; len];
    for t in (0..len - 1).rev() {
        needs[t] = d.input_level_for(needs[t + 1])?;
    }
    if x_level < needs[0] {
        return Err(Error::InsufficientPrecision {
            supplied: x_level,
            required: needs[0],
        });
    }
    let tower = d.tower();
    let mut cur = tower.project(x, x_level, needs[0])?;
    let mut out = Vec::with_capacity(len);
    out.push(tower.project(cur, needs[0], level)?);
    for t in 1..len {
        cur = d.eval(cur, needs[t - 1], needs[t])?;
        out.push(tower.project(cur, needs[t], level)?);
    }
    Ok(out)
}

/// Visit statistics of an orbit against the uniform measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equidistribution {
    /// Visit frequency of each level element, exact.
    pub frequencies: Vec<Rational>,
    /// Largest `|frequency - 1/order|`.
    pub max_deviation: Rational,
}

/// Exact visit frequencies of `orb` over the level-`level` quotient and the
/// worst deviation from uniform.
pub fn equidistribution_stats(
    orb: &[Elem],
    tower: &Tower,
    level: usize,
) -> Result<Equidistribution> {
    if level > tower.depth() {
        return Err(Error::InvalidLevel {
            level,
            depth: tower.depth(),
        });
    }
    let order = tower.level(level).order();
    let mut counts = vec![0u64; order as usize];
    for &s in orb {
        if s >= order {
            return Err(Error::ElementRange {
                element: s,
                order,
            });
        }
        counts[s as usize] += 1;
    }
    let len = orb.len() as u64;
    if len == 0 {
        return Ok(Equidistribution {
            frequencies: vec![Rational::new(0, 1); order as usize],
            max_deviation: Rational::new(1, order),
        });
    }
    let frequencies: Vec<Rational> = counts.iter().map(|&c| Rational::new(c, len)).collect();
    let max_deviation = counts
        .iter()
        .map(|&c| {
            // |c/len - 1/order| = |c * order - len| / (len * order)
            let num = (c as i128 * order as i128 - len as i128).unsigned_abs() as u64;
            Rational::new(num, len * order)
        })
        .max()
        .expect("order is positive");
    Ok(Equidistribution {
        frequencies,
        max_deviation,
    })
}

/// Image of the uniform measure on the contract level under one evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pushforward {
    pub level: usize,
    pub input_level: usize,
    /// Weight assigned to each level element, exact.
    pub weights: Vec<Rational>,
    /// True when every weight equals `1/order`, i.e. the map preserves the
    /// uniform measure at this level.
    pub uniform: bool,
}

/// Push the uniform measure on `G_{j(level)}` forward through one
/// evaluation of `m`.
pub fn pushforward_uniform(m: &PrecisionMap, level: usize) -> Result<Pushforward> {
    let input_level = m.contract(level)?;
    let tower = m.tower();
    let in_order = tower.level(input_level).order();
    let out_order = tower.level(level).order();
    let mut counts = vec![0u64; out_order as usize];
    for x in tower.level(input_level).elements() {
        counts[m.evaluate(x, input_level, level)? as usize] += 1;
    }
    let weights: Vec<Rational> = counts
        .iter()
        .map(|&c| Rational::new(c, in_order))
        .collect();
    let target = Rational::new(1, out_order);
    let uniform = weights.iter().all(|w| *w == target);
    Ok(Pushforward {
        level,
        input_level,
        weights,
        uniform,
    })
}

/// Aggregated verdicts with witnesses and the certified level range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub measure_preserving: bool,
    pub ergodic: bool,
    pub totally_ergodic_possible: bool,
    pub obstruction_period: Option<u64>,
    pub levels: Vec<LevelReport>,
    pub levels_checked: LevelRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelRange {
    pub from: usize,
    pub to: usize,
}

/// One level's contribution to the report. `cycle_type` is present for
/// bijective maps, `witness` carries the collision otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub order: u64,
    pub bijective: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_type: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(Elem, Elem)>,
}

/// Run the full battery on a family and assemble the report.
pub fn analyze(f: &CompatibleFamily) -> AnalysisReport {
    let depth = f.tower().depth();
    let mut levels = Vec::with_capacity(depth + 1);
    let mut measure_preserving = true;
    let mut ergodic = true;
    for level in 0..=depth {
        let order = f.tower().level(level).order();
        match cycle_structure(f, level) {
            CycleStructure::Permutation { cycle_lengths } => {
                if !(cycle_lengths.len() == 1 && cycle_lengths[0] == order) {
                    ergodic = false;
                }
                levels.push(LevelReport {
                    order,
                    bijective: true,
                    cycle_type: Some(cycle_lengths),
                    witness: None,
                });
            }
            CycleStructure::NotPermutation { first, second } => {
                measure_preserving = false;
                ergodic = false;
                levels.push(LevelReport {
                    order,
                    bijective: false,
                    cycle_type: None,
                    witness: Some((first, second)),
                });
            }
        }
    }
    let obstruction = total_ergodicity_obstruction(f);
    AnalysisReport {
        measure_preserving,
        ergodic,
        totally_ergodic_possible: obstruction.is_none(),
        obstruction_period: obstruction.map(|o| o.period),
        levels,
        levels_checked: LevelRange { from: 0, to: depth },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::CompatibleFamily;
    use crate::tower::make_cyclic_tower;
    use std::sync::Arc;

    fn poly(p: u64, depth: usize, coeffs: &[i64]) -> CompatibleFamily {
        let tower = Arc::new(make_cyclic_tower(p, depth).unwrap());
        CompatibleFamily::from_polynomial(tower, coeffs).unwrap()
    }

    #[test]
    fn cycle_structures() {
        let rot = poly(5, 1, &[1, 1]);
        assert_eq!(
            cycle_structure(&rot, 1),
            CycleStructure::Permutation { cycle_lengths: vec![5] }
        );

        let refl = poly(2, 2, &[1, 3]);
        assert_eq!(
            cycle_structure(&refl, 2),
            CycleStructure::Permutation { cycle_lengths: vec![2, 2] }
        );

        let triple = poly(5, 1, &[0, 3]);
        assert_eq!(
            cycle_structure(&triple, 1),
            CycleStructure::Permutation { cycle_lengths: vec![1, 4] }
        );
    }

    #[test]
    fn measure_preservation_verdicts() {
        assert!(is_measure_preserving(&poly(2, 8, &[1, 1])).is_preserving());

        let sq = poly(5, 3, &[0, 0, 1]);
        assert_eq!(
            is_measure_preserving(&sq),
            MeasureVerdict::NotPreserving {
                level: 1,
                first: 2,
                second: 3,
            }
        );

        let id = CompatibleFamily::identity(Arc::new(make_cyclic_tower(3, 3).unwrap()));
        assert!(is_measure_preserving(&id).is_preserving());
    }

    #[test]
    fn ergodicity_verdicts() {
        assert!(is_ergodic(&poly(3, 5, &[1, 1])).is_ergodic());
        assert!(is_ergodic(&poly(2, 1, &[1, 1])).is_ergodic());

        match is_ergodic(&poly(2, 2, &[1, 3])) {
            ErgodicVerdict::NotErgodic { level, structure } => {
                assert_eq!(level, 2);
                assert_eq!(
                    structure,
                    CycleStructure::Permutation { cycle_lengths: vec![2, 2] }
                );
            }
            other => panic!("expected a non-ergodic verdict, got {other:?}"),
        }
    }

    #[test]
    fn equivalence_report_examples() {
        let ok = equivalence_report(&poly(2, 6, &[1, 1]));
        assert!(ok.coherent);
        assert!(ok.levels.iter().all(|l| l.bijective
            && l.surjective
            && l.injective
            && l.uniform_pushforward));

        let bad = equivalence_report(&poly(5, 2, &[0, 0, 1]));
        assert!(bad.coherent);
        for l in &bad.levels[1..] {
            assert!(!l.bijective && !l.surjective && !l.injective && !l.uniform_pushforward);
        }

        let unit = equivalence_report(&poly(3, 3, &[0, 2]));
        assert!(unit.coherent);
        assert!(unit.levels.iter().all(|l| l.bijective));
    }

    #[test]
    fn obstruction_periods() {
        let t2 = total_ergodicity_obstruction(&poly(2, 5, &[1, 1])).unwrap();
        assert_eq!((t2.level, t2.period), (1, 2));
        assert!(t2.power_is_identity);

        let t3 = total_ergodicity_obstruction(&poly(3, 4, &[1, 1])).unwrap();
        assert_eq!(t3.period, 3);

        let id = CompatibleFamily::identity(Arc::new(make_cyclic_tower(2, 3).unwrap()));
        assert_eq!(total_ergodicity_obstruction(&id), None);
    }

    #[test]
    fn orbit_examples() {
        let f = poly(2, 2, &[1, 1]);
        assert_eq!(orbit(&f, 0, 2, 2, 5).unwrap(), vec![0, 1, 2, 3, 0]);

        let s = crate::maps::PrecisionMap::shift(
            2,
            Arc::new(make_cyclic_tower(2, 4).unwrap()),
        )
        .unwrap();
        assert_eq!(orbit(&s, 11, 4, 1, 4).unwrap(), vec![1, 1, 0, 1]);

        let g = poly(2, 3, &[1, 5]);
        assert_eq!(
            orbit(&g, 0, 3, 3, 8).unwrap(),
            vec![0, 1, 6, 7, 4, 5, 2, 3]
        );
    }

    #[test]
    fn orbit_precision_errors() {
        let s = crate::maps::PrecisionMap::shift(
            2,
            Arc::new(make_cyclic_tower(2, 3).unwrap()),
        )
        .unwrap();
        assert!(matches!(
            orbit(&s, 5, 3, 1, 4),
            Err(Error::PrecisionExhausted { .. })
        ));
        assert!(matches!(
            orbit(&s, 1, 2, 1, 3),
            Err(Error::InsufficientPrecision { supplied: 2, required: 3 })
        ));
        assert_eq!(orbit(&s, 5, 3, 1, 0).unwrap(), Vec::<Elem>::new());
    }

    #[test]
    fn equidistribution_examples() {
        let t = make_cyclic_tower(2, 3).unwrap();

        let full = equidistribution_stats(&[0, 1, 2, 3], &t, 2).unwrap();
        assert_eq!(full.max_deviation, Rational::new(0, 1));
        assert!(full.frequencies.iter().all(|f| *f == Rational::new(1, 4)));

        let halves = equidistribution_stats(&[0, 1, 0, 1], &t, 2).unwrap();
        assert_eq!(halves.frequencies[0], Rational::new(1, 2));
        assert_eq!(halves.frequencies[2], Rational::new(0, 1));
        assert_eq!(halves.max_deviation, Rational::new(1, 4));

        let eight = equidistribution_stats(&[0, 1, 2, 3, 4, 5, 6, 7], &t, 3).unwrap();
        assert_eq!(eight.max_deviation, Rational::new(0, 1));

        let empty = equidistribution_stats(&[], &t, 2).unwrap();
        assert_eq!(empty.max_deviation, Rational::new(1, 4));
        assert!(empty.frequencies.iter().all(|f| *f == Rational::new(0, 1)));
    }

    #[test]
    fn pushforward_examples() {
        let shift = crate::maps::PrecisionMap::shift(
            2,
            Arc::new(make_cyclic_tower(2, 3).unwrap()),
        )
        .unwrap();
        let p = pushforward_uniform(&shift, 1).unwrap();
        assert!(p.uniform);
        assert_eq!(p.weights, vec![Rational::new(1, 2), Rational::new(1, 2)]);

        let binom = crate::maps::PrecisionMap::binomial(
            2,
            Arc::new(make_cyclic_tower(2, 3).unwrap()),
        )
        .unwrap();
        let pb = pushforward_uniform(&binom, 1).unwrap();
        assert!(pb.uniform);

        let tower = Arc::new(make_cyclic_tower(2, 2).unwrap());
        let zero = crate::maps::PrecisionMap::from_tables(
            tower,
            vec![1, 2],
            vec![vec![0, 0], vec![0, 0, 0, 0]],
            "constant zero",
        )
        .unwrap();
        let pz = pushforward_uniform(&zero, 1).unwrap();
        assert!(!pz.uniform);
        assert_eq!(pz.weights, vec![Rational::new(1, 1), Rational::new(0, 1)]);
    }

    #[test]
    fn analyze_assembles_report() {
        let r = analyze(&poly(3, 4, &[1, 1]));
        assert!(r.measure_preserving && r.ergodic);
        assert_eq!(r.obstruction_period, Some(3));
        assert!(!r.totally_ergodic_possible);
        assert_eq!(r.levels_checked, LevelRange { from: 0, to: 4 });
        assert_eq!(r.levels[2].cycle_type, Some(vec![9]));

        let bad = analyze(&poly(5, 2, &[0, 0, 1]));
        assert!(!bad.measure_preserving && !bad.ergodic);
        assert_eq!(bad.levels[1].witness, Some((2, 3)));
    }
}
