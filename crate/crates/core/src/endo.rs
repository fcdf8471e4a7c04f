//! Continuous-homomorphism specializations: the unit-matrix criterion on
//! diagonal towers, the factor criterion `N <= T^-1(N)`, the
//! preimage-intersection closure, and the fixed-identity non-ergodicity
//! witness.
//!
//! Level maps are established as group homomorphisms by exhaustive check at
//! every level rather than trusted from any constructor.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::maps::{mod_inverse, CompatibleFamily};
use crate::quotient::{Elem, FiniteQuotient};
use crate::tower::Subgroup;

/// True iff `det(M)` is a unit mod `p` (zero `p`-valuation), equivalently
/// the induced family on the diagonal tower is level-wise bijective.
/// `p` must be prime: the elimination works over the field `Z/p`.
pub fn is_unit_matrix(entries: &[Vec<i64>], p: u64) -> Result<bool> {
    let k = entries.len();
    if k == 0 || entries.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidInput("matrix must be square and non-empty".into()));
    }
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("modulus {p} must be prime")));
    }
    // Gaussian elimination over Z/p
    let mut m: Vec<Vec<u64>> = entries
        .iter()
        .map(|row| row.iter().map(|&v| (v as i128).rem_euclid(p as i128) as u64).collect())
        .collect();
    for col in 0..k {
        let Some(pivot_row) = (col..k).find(|&r| m[r][col] % p != 0) else {
            return Ok(false);
        };
        m.swap(col, pivot_row);
        let inv = mod_inverse(m[col][col], p);
        for r in (col + 1)..k {
            let factor = m[r][col] as u128 * inv as u128 % p as u128;
            for c in col..k {
                let sub = factor * m[col][c] as u128 % p as u128;
                m[r][c] = ((m[r][c] as u128 + p as u128 - sub) % p as u128) as u64;
            }
        }
    }
    Ok(true)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Check that every level map respects the group operation, exhaustively.
pub fn verify_homomorphism(f: &CompatibleFamily) -> Result<()> {
    for level in 0..=f.tower().depth() {
        let q = f.tower().level(level);
        let map = f.level_map(level);
        for x in q.elements() {
            for y in q.elements() {
                if map[q.op(x, y) as usize] != q.op(map[x as usize], map[y as usize]) {
                    return Err(Error::NotHomomorphism { level, x, y });
                }
            }
        }
    }
    Ok(())
}

/// Outcome of the factor criterion at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorsVerdict {
    /// `N <= T^-1(N)`, i.e. the level map descends to the quotient by `N`.
    pub factors: bool,
    /// An element of `N` mapped outside `N`, when `factors` is false.
    pub witness: Option<Elem>,
    /// When the level map is surjective: whether `N = T^-1(N)` exactly.
    /// Must equal `factors` there; a mismatch is an implementation bug.
    pub preimage_equal: Option<bool>,
}

fn level_map_surjective(map: &[Elem]) -> bool {
    let mut hit = vec![false; map.len()];
    for &y in map {
        hit[y as usize] = true;
    }
    hit.iter().all(|&h| h)
}

fn preimage_set(map: &[Elem], members: &[bool]) -> Vec<bool> {
    map.iter().map(|&y| members[y as usize]).collect()
}

fn require_hom_and_subgroup<'a>(
    f: &'a CompatibleFamily,
    n: &Subgroup,
) -> Result<(&'a FiniteQuotient, &'a [Elem])> {
    verify_homomorphism(f)?;
    let level = n.level();
    if level > f.tower().depth() {
        return Err(Error::InvalidLevel {
            level,
            depth: f.tower().depth(),
        });
    }
    if !n.is_normal() {
        return Err(Error::NotNormal { level });
    }
    Ok((f.tower().level(level), f.level_map(level)))
}

/// Decide `N <= T^-1(N)` at the subgroup's level. Verifies first that the
/// family is a homomorphism level-wise and that `N` is normal. On
/// surjective level maps the second clause `N = T^-1(N)` is checked too.
pub fn factors_through(f: &CompatibleFamily, n: &Subgroup) -> Result<FactorsVerdict> {
    let (_, map) = require_hom_and_subgroup(f, n)?;
    let witness = n
        .elements()
        .iter()
        .copied()
        .find(|&h| !n.contains(map[h as usize]));
    let factors = witness.is_none();
    let preimage_equal = if level_map_surjective(map) {
        let equal = (0..map.len() as Elem)
            .all(|x| n.contains(map[x as usize]) == n.contains(x));
        if factors {
            debug_assert!(equal, "surjective map factoring through N must satisfy N = T^-1(N)");
        }
        Some(equal)
    } else {
        None
    };
    Ok(FactorsVerdict {
        factors,
        witness,
        preimage_equal,
    })
}

/// The largest subgroup of `N` invariant under preimages: iterates
/// `N, N n T^-1(N), N n T^-1(N) n T^-2(N), ...` until stabilization. The
/// level map must be surjective so that preimages preserve index; a safety
/// cap of one pass per group element bounds the loop.
pub fn finite_factor_closure(f: &CompatibleFamily, n: &Subgroup) -> Result<Subgroup> {
    let (q, map) = require_hom_and_subgroup(f, n)?;
    if !level_map_surjective(map) {
        let mut hit = vec![false; map.len()];
        for &y in map {
            hit[y as usize] = true;
        }
        let missing = hit.iter().position(|&h| !h).unwrap() as Elem;
        return Err(Error::NotSurjective {
            level: n.level(),
            missing,
        });
    }
    let mut members = vec![false; q.order() as usize];
    for &x in n.elements() {
        members[x as usize] = true;
    }
    for _ in 0..q.order() {
        let pre = preimage_set(map, &members);
        // surjective level maps preserve index under preimage
        debug_assert_eq!(
            pre.iter().filter(|&&b| b).count(),
            members.iter().filter(|&&b| b).count()
        );
        let next: Vec<bool> = members
            .iter()
            .zip(&pre)
            .map(|(&a, &b)| a && b)
            .collect();
        if next == members {
            break;
        }
        members = next;
    }
    let elements: Vec<Elem> = (0..q.order()).filter(|&x| members[x as usize]).collect();
    let closed = Subgroup::new(q, n.level(), &elements)?;
    debug_assert!(closed.is_normal());
    Ok(closed)
}

/// The identity fixed point certifying that a level-wise homomorphism with
/// a nontrivial level is never ergodic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomWitness {
    pub level: usize,
    pub identity: Elem,
}

/// Locate the first nontrivial level and certify `T(e) = e` there. Returns
/// `None` when every level is trivial.
pub fn hom_nonergodic_witness(f: &CompatibleFamily) -> Result<Option<HomWitness>> {
    verify_homomorphism(f)?;
    for level in 0..=f.tower().depth() {
        let q = f.tower().level(level);
        if q.order() > 1 {
            let e = q.identity();
            assert_eq!(
                f.level_map(level)[e as usize],
                e,
                "homomorphisms fix the identity"
            );
            return Ok(Some(HomWitness { level, identity: e }));
        }
    }
    Ok(None)
}

/// Every subgroup of `q`, found by closing generator extensions from the
/// trivial subgroup. Intended for desk-scale oracles.
pub fn enumerate_subgroups(q: &FiniteQuotient, level: usize) -> Vec<Subgroup> {
    let trivial: Vec<Elem> = vec![q.identity()];
    let mut seen: BTreeSet<Vec<Elem>> = BTreeSet::new();
    seen.insert(trivial.clone());
    let mut frontier = vec![trivial];
    while let Some(current) = frontier.pop() {
        for g in q.elements() {
            if current.binary_search(&g).is_ok() {
                continue;
            }
            let mut gens = current.clone();
            gens.push(g);
            let bigger = Subgroup::generated(q, level, &gens)
                .expect("closure of valid elements is a subgroup");
            let elems = bigger.elements().to_vec();
            if seen.insert(elems.clone()) {
                frontier.push(elems);
            }
        }
    }
    seen.into_iter()
        .map(|elems| Subgroup::new(q, level, &elems).expect("recorded sets are subgroups"))
        .collect()
}
