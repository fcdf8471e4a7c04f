//! Product dynamics: quotient-order sets, the coprimality criterion for
//! ergodicity of product maps, and the brute-force orbit oracle on finite
//! product sets.

use std::collections::BTreeSet;

use num_integer::Integer;

use crate::analysis::{is_ergodic, ErgodicVerdict};
use crate::error::{Error, Result};
use crate::maps::CompatibleFamily;

/// Cap on the product set size accepted by [`crt_minimality_oracle`].
pub const MAX_ORACLE_SIZE: u64 = 1_000_000;

/// The set of nontrivial level orders of a family's tower. Along a chain
/// each order divides the next, so this finite set determines all
/// divisibility the represented system can exhibit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientOrderSet {
    orders: BTreeSet<u64>,
}

impl QuotientOrderSet {
    pub fn orders(&self) -> &BTreeSet<u64> {
        &self.orders
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }
}

/// Collect the nontrivial level orders of the family's tower. Order 1 is
/// excluded: gcd with 1 never obstructs.
pub fn quotient_order_set(f: &CompatibleFamily) -> QuotientOrderSet {
    let orders = f
        .tower()
        .levels()
        .iter()
        .map(|q| q.order())
        .filter(|&n| n > 1)
        .collect();
    QuotientOrderSet { orders }
}

/// Verdict of the product-ergodicity criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProductErgodicity {
    Ergodic,
    /// A component fails level-wise minimality at the given level.
    ComponentNotErgodic { component: usize, level: usize },
    /// Two distinct components expose quotient orders with a common factor.
    CoprimalityFailure {
        first: usize,
        second: usize,
        first_order: u64,
        second_order: u64,
    },
}

impl ProductErgodicity {
    pub fn is_ergodic(&self) -> bool {
        matches!(self, ProductErgodicity::Ergodic)
    }
}

/// The product of the families is ergodic iff every component is ergodic
/// and the quotient orders of distinct components are pairwise coprime.
/// Components are checked in order, then order pairs in ascending order;
/// the first failure is the witness.
pub fn product_ergodicity(families: &[CompatibleFamily]) -> Result<ProductErgodicity> {
    if families.is_empty() {
        return Err(Error::EmptyProduct);
    }
    for (component, f) in families.iter().enumerate() {
        if let ErgodicVerdict::NotErgodic { level, .. } = is_ergodic(f) {
            return Ok(ProductErgodicity::ComponentNotErgodic { component, level });
        }
    }
    let order_sets: Vec<QuotientOrderSet> = families.iter().map(quotient_order_set).collect();
    for a in 0..families.len() {
        for b in (a + 1)..families.len() {
            for &n in order_sets[a].orders() {
                for &m in order_sets[b].orders() {
                    if n.gcd(&m) != 1 {
                        return Ok(ProductErgodicity::CoprimalityFailure {
                            first: a,
                            second: b,
                            first_order: n,
                            second_order: m,
                        });
                    }
                }
            }
        }
    }
    Ok(ProductErgodicity::Ergodic)
}

/// Brute-force minimality of the product of arbitrary self-maps on finite
/// sets, given as dense tables. The orbit of the all-zeros point is
/// followed directly on the product: the map is minimal exactly when that
/// orbit visits every point within `|S|` steps and closes up. Used as the
/// independent oracle for the coprimality criterion.
pub fn crt_minimality_oracle(tables: &[Vec<usize>]) -> Result<bool> {
    let mut size: u64 = 1;
    for t in tables {
        if t.is_empty() {
            return Err(Error::InvalidInput("component sets must be non-empty".into()));
        }
        if let Some(&bad) = t.iter().find(|&&v| v >= t.len()) {
            return Err(Error::InvalidInput(format!(
                "table entry {bad} out of range for a set of size {}",
                t.len()
            )));
        }
        size = size.saturating_mul(t.len() as u64);
        if size > MAX_ORACLE_SIZE {
            return Err(Error::Capacity {
                requested: size as u128,
                max: MAX_ORACLE_SIZE,
            });
        }
    }
    let size = size as usize;
    let step = |state: usize| -> usize {
        let mut rest = state;
        let mut next = 0usize;
        let mut radix = 1usize;
        for t in tables {
            let digit = rest % t.len();
            rest /= t.len();
            next += t[digit] * radix;
            radix *= t.len();
        }
        next
    };
    let mut visited = vec![false; size];
    let mut cur = 0usize;
    for _ in 0..size {
        if visited[cur] {
            // revisit before covering everything: some point is unreachable
            return Ok(false);
        }
        visited[cur] = true;
        cur = step(cur);
    }
    // all points visited in |S| steps; minimal iff the orbit closes
    Ok(cur == 0)
}
