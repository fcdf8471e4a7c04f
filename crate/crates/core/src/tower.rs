//! Chains of finite quotients with surjective transition homomorphisms.
//!
//! A [`Tower`] is a chain `G_0 <- G_1 <- ... <- G_D` with `G_0` trivial.
//! It realizes a nested base of open normal subgroups: the kernel of the
//! projection to level `k` plays the role of the `k`-th subgroup in the
//! base, and the uniform measure on each level is the finite-level Haar
//! measure. Towers are immutable after construction and safe to share.

use crate::error::{Error, Result};
use crate::quotient::{Elem, FiniteQuotient, QuotientViolation, MAX_LEVEL_ORDER};

/// A surjective homomorphism from one tower level down to a lower one,
/// stored as a dense table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMap {
    source_level: usize,
    target_level: usize,
    table: Vec<Elem>,
}

impl TransitionMap {
    /// Structural construction: arity and range are checked here, the
    /// homomorphism and surjectivity invariants by [`Tower::verify`].
    pub fn new(source_level: usize, target_level: usize, table: Vec<Elem>) -> Result<Self> {
        if target_level > source_level {
            return Err(Error::LevelOrder {
                from: source_level,
                to: target_level,
            });
        }
        Ok(TransitionMap {
            source_level,
            target_level,
            table,
        })
    }

    pub fn source_level(&self) -> usize {
        self.source_level
    }

    pub fn target_level(&self) -> usize {
        self.target_level
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.table[x as usize]
    }
}

/// Violation found by [`Tower::verify`]. Transition violations name the
/// upper level of the offending adjacent pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerViolation {
    LevelZeroNotTrivial { order: u64 },
    Quotient { level: usize, violation: QuotientViolation },
    NotHomomorphism { upper_level: usize, x: Elem, y: Elem },
    NotSurjective { upper_level: usize, missing: Elem },
    CompositionInconsistent { from: usize, via: usize, to: usize, x: Elem },
}

impl std::fmt::Display for TowerViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TowerViolation::LevelZeroNotTrivial { order } => {
                write!(f, "level 0 has order {order}, expected the trivial group")
            }
            TowerViolation::Quotient { level, violation } => {
                write!(f, "level {level}: {violation}")
            }
            TowerViolation::NotHomomorphism { upper_level, x, y } => write!(
                f,
                "transition {upper_level} -> {}: not a homomorphism at ({x}, {y})",
                upper_level - 1
            ),
            TowerViolation::NotSurjective { upper_level, missing } => write!(
                f,
                "transition {upper_level} -> {}: {missing} has no preimage",
                upper_level - 1
            ),
            TowerViolation::CompositionInconsistent { from, via, to, x } => write!(
                f,
                "projection {from} -> {to} disagrees with the route through {via} at {x}"
            ),
        }
    }
}

/// Result of [`Tower::verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerReport {
    pub violations: Vec<TowerViolation>,
}

impl TowerReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A chain of finite quotients joined by transition maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    levels: Vec<FiniteQuotient>,
    /// `transitions[k]` maps level `k + 1` down to level `k`.
    transitions: Vec<TransitionMap>,
}

impl Tower {
    /// The depth-0 tower consisting of the trivial group alone.
    pub fn trivial() -> Self {
        Tower {
            levels: vec![FiniteQuotient::trivial()],
            transitions: Vec::new(),
        }
    }

    /// Assemble a tower from levels and adjacent transitions. Only
    /// structural facts are enforced (counts, arities, element ranges);
    /// the semantic invariants are reported by [`Tower::verify`], so
    /// deliberately broken towers can be built and inspected.
    pub fn from_parts(levels: Vec<FiniteQuotient>, transitions: Vec<TransitionMap>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidInput("a tower needs at least level 0".into()));
        }
        if transitions.len() != levels.len() - 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} transitions for {} levels, got {}",
                levels.len() - 1,
                levels.len(),
                transitions.len()
            )));
        }
        for (k, t) in transitions.iter().enumerate() {
            if t.source_level != k + 1 || t.target_level != k {
                return Err(Error::InvalidInput(format!(
                    "transition {k} must map level {} to level {k}, got {} to {}",
                    k + 1,
                    t.source_level,
                    t.target_level
                )));
            }
            if t.table.len() as u64 != levels[k + 1].order() {
                return Err(Error::InvalidInput(format!(
                    "transition {} -> {k} table has length {}, expected {}",
                    k + 1,
                    t.table.len(),
                    levels[k + 1].order()
                )));
            }
            if let Some(&bad) = t.table.iter().find(|&&v| v >= levels[k].order()) {
                return Err(Error::ElementRange {
                    element: bad,
                    order: levels[k].order(),
                });
            }
        }
        Ok(Tower { levels, transitions })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[FiniteQuotient] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &FiniteQuotient {
        &self.levels[i]
    }

    pub fn top(&self) -> &FiniteQuotient {
        self.levels.last().expect("towers are never empty")
    }

    /// The adjacent transition out of `upper` (mapping to `upper - 1`).
    pub fn transition(&self, upper: usize) -> &TransitionMap {
        &self.transitions[upper - 1]
    }

    /// Project an element from level `from` down to level `to` by composing
    /// adjacent transitions.
    pub fn project(&self, x: Elem, from: usize, to: usize) -> Result<Elem> {
        if from > self.depth() {
            return Err(Error::InvalidLevel {
                level: from,
                depth: self.depth(),
            });
        }
        if to > from {
            return Err(Error::LevelOrder { from, to });
        }
        if x >= self.levels[from].order() {
            return Err(Error::ElementRange {
                element: x,
                order: self.levels[from].order(),
            });
        }
        let mut cur = x;
        for lvl in (to + 1..=from).rev() {
            cur = self.transition(lvl).apply(cur);
        }
        Ok(cur)
    }

    /// The composed transition `from -> to` as an explicit map.
    pub fn composed_transition(&self, from: usize, to: usize) -> Result<TransitionMap> {
        if from > self.depth() {
            return Err(Error::InvalidLevel {
                level: from,
                depth: self.depth(),
            });
        }
        let table = self
            .levels[from]
            .elements()
            .map(|x| self.project(x, from, to))
            .collect::<Result<Vec<_>>>()?;
        TransitionMap::new(from, to, table)
    }

    /// Elements of the given level grouped by their image one level down:
    /// `fibers(upper)[b]` lists the level-`upper` elements mapping to `b`.
    pub fn fibers(&self, upper: usize) -> Vec<Vec<Elem>> {
        let mut fibers = vec![Vec::new(); self.levels[upper - 1].order() as usize];
        for x in self.levels[upper].elements() {
            fibers[self.transition(upper).apply(x) as usize].push(x);
        }
        fibers
    }

    /// Top-level elements whose projection to `level` is the identity, i.e.
    /// the kernel of the projection from the top.
    pub fn kernel_at_top(&self, level: usize) -> Result<Vec<Elem>> {
        if level > self.depth() {
            return Err(Error::InvalidLevel {
                level,
                depth: self.depth(),
            });
        }
        let e = self.levels[level].identity();
        let top = self.depth();
        Ok(self
            .top()
            .elements()
            .filter(|&x| self.project(x, top, level).expect("range checked") == e)
            .collect())
    }

    /// For towers shaped like `Z/p^k` with mod-`p^k` transitions, the base
    /// `p`. Detection is structural, so table-backed rebuilds of such a
    /// tower qualify too.
    pub fn cyclic_base(&self) -> Option<u64> {
        if self.depth() == 0 {
            return None;
        }
        let p = self.level(1).order();
        if p < 2 {
            return None;
        }
        let mut expected = 1u64;
        for k in 0..=self.depth() {
            if self.level(k).order() != expected {
                return None;
            }
            if k > 0 {
                let lower = expected / p;
                let t = self.transition(k);
                if (0..expected).any(|x| t.apply(x) != x % lower) {
                    return None;
                }
            }
            if k < self.depth() {
                expected = expected.checked_mul(p)?;
            }
        }
        Some(p)
    }

    /// Exhaustive validation: quotient axioms at each level, every adjacent
    /// transition a surjective homomorphism, and composition consistency of
    /// projections across all level triples. Report-only.
    pub fn verify(&self) -> TowerReport {
        let mut violations = Vec::new();
        if self.levels[0].order() != 1 {
            violations.push(TowerViolation::LevelZeroNotTrivial {
                order: self.levels[0].order(),
            });
        }
        for (level, q) in self.levels.iter().enumerate() {
            for v in q.verify() {
                violations.push(TowerViolation::Quotient { level, violation: v });
            }
        }
        for upper in 1..=self.depth() {
            let hi = &self.levels[upper];
            let lo = &self.levels[upper - 1];
            let t = self.transition(upper);
            'hom: for x in hi.elements() {
                for y in hi.elements() {
                    if t.apply(hi.op(x, y)) != lo.op(t.apply(x), t.apply(y)) {
                        violations.push(TowerViolation::NotHomomorphism {
                            upper_level: upper,
                            x,
                            y,
                        });
                        break 'hom;
                    }
                }
            }
            let mut hit = vec![false; lo.order() as usize];
            for x in hi.elements() {
                hit[t.apply(x) as usize] = true;
            }
            if let Some(missing) = hit.iter().position(|&h| !h) {
                violations.push(TowerViolation::NotSurjective {
                    upper_level: upper,
                    missing: missing as Elem,
                });
            }
        }
        // Composition consistency over all i <= j' <= j, one witness per
        // triple.
        for from in 0..=self.depth() {
            for via in 0..=from {
                for to in 0..=via {
                    for x in self.levels[from].elements() {
                        let direct = self.project(x, from, to).expect("in range");
                        let mid = self.project(x, from, via).expect("in range");
                        let routed = self.project(mid, via, to).expect("in range");
                        if direct != routed {
                            violations.push(TowerViolation::CompositionInconsistent {
                                from,
                                via,
                                to,
                                x,
                            });
                            break;
                        }
                    }
                }
            }
        }
        TowerReport { violations }
    }
}

/// Build the tower of cyclic groups `Z/p^k` for `k = 0..=depth`, with
/// transitions given by reduction mod `p^k`. Composite `p` is allowed and
/// yields the corresponding ring-of-integers chain.
pub fn make_cyclic_tower(p: u64, depth: usize) -> Result<Tower> {
    if p < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let mut order = 1u128;
    let mut orders = vec![1u64];
    for _ in 0..depth {
        order *= p as u128;
        if order > MAX_LEVEL_ORDER as u128 {
            return Err(Error::Capacity {
                requested: order,
                max: MAX_LEVEL_ORDER,
            });
        }
        orders.push(order as u64);
    }
    let levels = orders
        .iter()
        .map(|&n| FiniteQuotient::cyclic(n))
        .collect::<Result<Vec<_>>>()?;
    let transitions = (1..=depth)
        .map(|k| {
            let table = (0..orders[k]).map(|x| x % orders[k - 1]).collect();
            TransitionMap::new(k, k - 1, table)
        })
        .collect::<Result<Vec<_>>>()?;
    Tower::from_parts(levels, transitions)
}

/// Build the componentwise product of the given towers. Shallower
/// components are padded by repeating their top level with identity
/// transitions, so the result has the depth of the deepest component.
pub fn make_product_tower(components: &[Tower]) -> Result<Tower> {
    if components.is_empty() {
        return Err(Error::EmptyProduct);
    }
    let depth = components.iter().map(Tower::depth).max().unwrap();
    fn level_at(t: &Tower, k: usize) -> &FiniteQuotient {
        t.level(k.min(t.depth()))
    }

    let mut levels = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        levels.push(FiniteQuotient::product(
            components.iter().map(|t| level_at(t, k).clone()).collect(),
        )?);
    }

    let mut transitions = Vec::with_capacity(depth);
    for k in 1..=depth {
        let hi = &levels[k];
        let lo = &levels[k - 1];
        let table = hi
            .elements()
            .map(|x| {
                let parts: Vec<Elem> = components
                    .iter()
                    .zip(hi.decode(x))
                    .map(|(t, a)| {
                        if k <= t.depth() {
                            t.transition(k).apply(a)
                        } else {
                            a // padded level: identity transition
                        }
                    })
                    .collect();
                lo.encode(&parts)
            })
            .collect();
        transitions.push(TransitionMap::new(k, k - 1, table)?);
    }
    Tower::from_parts(levels, transitions)
}

/// A subgroup of one tower level, held extensionally as a sorted element
/// set. Normality is computed once at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    level: usize,
    elements: Vec<Elem>,
    normal: bool,
}

impl Subgroup {
    /// Validate that `elements` is a subgroup of `q` (closed under the
    /// operation and inverses, containing the identity).
    pub fn new(q: &FiniteQuotient, level: usize, elements: &[Elem]) -> Result<Self> {
        let mut elems: Vec<Elem> = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        for &x in &elems {
            if x >= q.order() {
                return Err(Error::ElementRange {
                    element: x,
                    order: q.order(),
                });
            }
        }
        let contains = |v: &[Elem], x: Elem| v.binary_search(&x).is_ok();
        if !contains(&elems, q.identity()) {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        for &x in &elems {
            if !contains(&elems, q.inv(x)) {
                return Err(Error::NotSubgroup(format!("inverse of {x} missing")));
            }
            for &y in &elems {
                if !contains(&elems, q.op(x, y)) {
                    return Err(Error::NotSubgroup(format!("not closed: {x} * {y}")));
                }
            }
        }
        let normal = q.elements().all(|g| {
            elems
                .iter()
                .all(|&h| contains(&elems, q.op(q.op(g, h), q.inv(g))))
        });
        Ok(Subgroup {
            level,
            elements: elems,
            normal,
        })
    }

    /// The subgroup generated by the given elements, materialized by
    /// closure.
    pub fn generated(q: &FiniteQuotient, level: usize, generators: &[Elem]) -> Result<Self> {
        for &g in generators {
            if g >= q.order() {
                return Err(Error::ElementRange {
                    element: g,
                    order: q.order(),
                });
            }
        }
        let mut members = vec![false; q.order() as usize];
        members[q.identity() as usize] = true;
        let mut frontier = vec![q.identity()];
        while let Some(x) = frontier.pop() {
            for &g in generators {
                for y in [q.op(x, g), q.op(x, q.inv(g))] {
                    if !members[y as usize] {
                        members[y as usize] = true;
                        frontier.push(y);
                    }
                }
            }
        }
        let elements: Vec<Elem> = (0..q.order()).filter(|&x| members[x as usize]).collect();
        Subgroup::new(q, level, &elements)
    }

    pub fn trivial(q: &FiniteQuotient, level: usize) -> Self {
        Subgroup::new(q, level, &[q.identity()]).expect("trivial subgroup is always valid")
    }

    pub fn full(q: &FiniteQuotient, level: usize) -> Self {
        let all: Vec<Elem> = q.elements().collect();
        Subgroup::new(q, level, &all).expect("the whole group is always a subgroup")
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn is_normal(&self) -> bool {
        self.normal
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Intersection with another subgroup of the same level.
    pub fn intersect(&self, q: &FiniteQuotient, other: &Subgroup) -> Result<Subgroup> {
        if self.level != other.level {
            return Err(Error::InvalidInput(format!(
                "cannot intersect subgroups at levels {} and {}",
                self.level, other.level
            )));
        }
        let elems: Vec<Elem> = self
            .elements
            .iter()
            .copied()
            .filter(|&x| other.contains(x))
            .collect();
        Subgroup::new(q, self.level, &elems)
    }
}

/// Operation table of the symmetric group on three letters; test fixture
/// for the non-abelian paths.
#[cfg(test)]
pub(crate) fn symmetric_three_rows() -> Vec<Vec<Elem>> {
    // permutations of {0,1,2} in one-line notation
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 0, 2],
        [2, 1, 0],
        [0, 2, 1],
        [1, 2, 0],
        [2, 0, 1],
    ];
    let compose = |a: &[usize; 3], b: &[usize; 3]| -> [usize; 3] {
        // (a . b)(x) = a(b(x))
        [a[b[0]], a[b[1]], a[b[2]]]
    };
    let idx = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap() as Elem;
    perms
        .iter()
        .map(|a| perms.iter().map(|b| idx(&compose(a, b))).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_tower_orders_and_transitions() {
        let t = make_cyclic_tower(2, 3).unwrap();
        let orders: Vec<u64> = t.levels().iter().map(|q| q.order()).collect();
        assert_eq!(orders, vec![1, 2, 4, 8]);
        assert_eq!(t.transition(2).table(), &[0, 1, 0, 1]);
        assert!(t.verify().is_clean());
    }

    #[test]
    fn single_level_tower() {
        let t = make_cyclic_tower(5, 1).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(t.top().order(), 5);
    }

    #[test]
    fn project_reduces_mod_lower_order() {
        let t = make_cyclic_tower(3, 4).unwrap();
        assert_eq!(t.project(80, 4, 2).unwrap(), 80 % 9);
        let t2 = make_cyclic_tower(2, 3).unwrap();
        assert_eq!(t2.project(5, 3, 1).unwrap(), 1);
        assert_eq!(t2.project(5, 3, 0).unwrap(), 0);
        assert_eq!(t2.project(5, 3, 3).unwrap(), 5);
        let t3 = make_cyclic_tower(3, 3).unwrap();
        assert_eq!(t3.project(22, 3, 2).unwrap(), 4);
    }

    #[test]
    fn project_rejects_bad_levels() {
        let t = make_cyclic_tower(2, 3).unwrap();
        assert_eq!(
            t.project(1, 1, 2),
            Err(Error::LevelOrder { from: 1, to: 2 })
        );
        assert!(matches!(t.project(1, 9, 0), Err(Error::InvalidLevel { .. })));
        assert!(matches!(t.project(9, 2, 1), Err(Error::ElementRange { .. })));
    }

    #[test]
    fn capacity_error_on_deep_tower() {
        assert!(matches!(
            make_cyclic_tower(2, 40),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn product_tower_orders() {
        let a = make_cyclic_tower(2, 2).unwrap();
        let b = make_cyclic_tower(3, 2).unwrap();
        let p = make_product_tower(&[a, b]).unwrap();
        assert_eq!(p.top().order(), 36);
        assert!(p.verify().is_clean());

        let single = make_product_tower(&[make_cyclic_tower(2, 1).unwrap()]).unwrap();
        assert_eq!(single.top().order(), 2);
        assert_eq!(single.depth(), 1);

        let sq = make_product_tower(&[
            make_cyclic_tower(2, 3).unwrap(),
            make_cyclic_tower(2, 3).unwrap(),
        ])
        .unwrap();
        assert_eq!(sq.level(1).order(), 4);
    }

    #[test]
    fn product_tower_pads_shallow_components() {
        let a = make_cyclic_tower(2, 1).unwrap();
        let b = make_cyclic_tower(3, 3).unwrap();
        let p = make_product_tower(&[a, b]).unwrap();
        assert_eq!(p.depth(), 3);
        assert_eq!(p.top().order(), 2 * 27);
        assert!(p.verify().is_clean());
        // the padded component keeps projecting to the same residue
        let x = p.top().encode(&[1, 22]);
        let down = p.project(x, 3, 2).unwrap();
        assert_eq!(p.level(2).decode(down), vec![1, 4]);
    }

    #[test]
    fn empty_product_tower_rejected() {
        assert_eq!(make_product_tower(&[]), Err(Error::EmptyProduct));
    }

    #[test]
    fn verify_flags_non_surjective_transition() {
        let levels = vec![
            FiniteQuotient::trivial(),
            FiniteQuotient::cyclic(2).unwrap(),
            FiniteQuotient::cyclic(4).unwrap(),
        ];
        let transitions = vec![
            TransitionMap::new(1, 0, vec![0, 0]).unwrap(),
            TransitionMap::new(2, 1, vec![0, 0, 0, 0]).unwrap(),
        ];
        let t = Tower::from_parts(levels, transitions).unwrap();
        let report = t.verify();
        assert!(report
            .violations
            .contains(&TowerViolation::NotSurjective { upper_level: 2, missing: 1 }));
    }

    #[test]
    fn verify_flags_non_homomorphism() {
        let levels = vec![
            FiniteQuotient::trivial(),
            FiniteQuotient::cyclic(2).unwrap(),
            FiniteQuotient::cyclic(4).unwrap(),
        ];
        let transitions = vec![
            TransitionMap::new(1, 0, vec![0, 0]).unwrap(),
            TransitionMap::new(2, 1, vec![0, 1, 1, 0]).unwrap(),
        ];
        let t = Tower::from_parts(levels, transitions).unwrap();
        let report = t.verify();
        assert!(report
            .violations
            .contains(&TowerViolation::NotHomomorphism { upper_level: 2, x: 1, y: 1 }));
    }

    #[test]
    fn transitions_have_uniform_fibers() {
        let t = make_product_tower(&[
            make_cyclic_tower(2, 3).unwrap(),
            make_cyclic_tower(3, 2).unwrap(),
        ])
        .unwrap();
        for upper in 1..=t.depth() {
            let expected = t.level(upper).order() / t.level(upper - 1).order();
            for fiber in t.fibers(upper) {
                assert_eq!(fiber.len() as u64, expected);
            }
        }
    }

    #[test]
    fn kernel_at_top_matches_residues() {
        let t = make_cyclic_tower(2, 4).unwrap();
        assert_eq!(t.kernel_at_top(2).unwrap(), vec![0, 4, 8, 12]);
        assert_eq!(t.kernel_at_top(0).unwrap().len(), 16);
        assert_eq!(t.kernel_at_top(4).unwrap(), vec![0]);
    }

    #[test]
    fn subgroup_validation_and_generation() {
        let q = FiniteQuotient::cyclic(8).unwrap();
        let s = Subgroup::new(&q, 1, &[0, 2, 4, 6]).unwrap();
        assert!(s.is_normal());
        assert_eq!(s.order(), 4);
        assert!(matches!(
            Subgroup::new(&q, 1, &[0, 2]),
            Err(Error::NotSubgroup(_))
        ));
        let g = Subgroup::generated(&q, 1, &[6]).unwrap();
        assert_eq!(g.elements(), &[0, 2, 4, 6]);
    }

    #[test]
    fn subgroup_normality_in_nonabelian_table_group() {
        // S_3 as a table: elements 0..6 = e, (12), (13), (23), (123), (132)
        let q = FiniteQuotient::from_table(&symmetric_three_rows()).unwrap();
        let alt = Subgroup::new(&q, 1, &[0, 4, 5]).unwrap();
        assert!(alt.is_normal());
        let two = Subgroup::generated(&q, 1, &[1]).unwrap();
        assert_eq!(two.order(), 2);
        assert!(!two.is_normal());
    }
}
