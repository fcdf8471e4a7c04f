//! Finite-horizon symbol dynamics: the sequence of level-`i` projections of
//! the iterates of a point, the first-symbol determinism test, and exact
//! cylinder-word statistics.
//!
//! For a compatible family the whole symbol sequence is determined by its
//! first entry; a precision map generally breaks this, and the witness pair
//! exhibits the failure. All word statistics are exhaustive over residue
//! classes, never sampled, with exact rational frequencies.

use std::collections::BTreeMap;

use crate::analysis::orbit;
use crate::error::{Error, Result};
use crate::maps::Dynamics;
use crate::quotient::Elem;
use crate::Rational;

/// A finite prefix of the symbol sequence of one starting point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    /// Level whose quotient supplies the symbols.
    pub level: usize,
    /// `symbols[k]` is the level projection of the k-th iterate.
    pub symbols: Vec<Elem>,
    /// Label of the generating map.
    pub source: String,
    /// Starting element together with the precision level it was given at.
    pub start: (Elem, usize),
}

/// The length-`len` prefix of the symbol sequence of `x` at `level`.
pub fn phi_sequence<D: Dynamics + ?Sized>(
    d: &D,
    x: Elem,
    x_level: usize,
    level: usize,
    len: usize,
) -> Result<SymbolSequence> {
    let symbols = orbit(d, x, x_level, level, len)?;
    Ok(SymbolSequence {
        level,
        symbols,
        source: d.label().to_string(),
        start: (x, x_level),
    })
}

/// Whether equal first symbols force equal sequences at the given horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Determinism {
    Deterministic,
    /// Two top-level points with the same level projection whose sequences
    /// diverge.
    Witness { first: Elem, second: Elem },
}

impl Determinism {
    pub fn is_deterministic(&self) -> bool {
        matches!(self, Determinism::Deterministic)
    }
}

/// Check, over all top-level points, that equal projections to `level`
/// produce identical length-`horizon` symbol sequences. Always true for a
/// compatible family (the check doubles as a correctness test); precision
/// maps typically fail with a witness pair.
pub fn is_deterministic_factor<D: Dynamics + ?Sized>(
    d: &D,
    level: usize,
    horizon: usize,
) -> Result<Determinism> {
    let tower = d.tower().clone();
    let top = tower.depth();
    let order = tower.level(level).order();
    let mut representative: Vec<Option<(Elem, Vec<Elem>)>> = vec![None; order as usize];
    for x in tower.top().elements() {
        let class = tower.project(x, top, level)? as usize;
        let seq = orbit(d, x, top, level, horizon)?;
        match &representative[class] {
            Some((rep, rep_seq)) => {
                if *rep_seq != seq {
                    return Ok(Determinism::Witness {
                        first: *rep,
                        second: x,
                    });
                }
            }
            None => representative[class] = Some((x, seq)),
        }
    }
    Ok(Determinism::Deterministic)
}

/// Exact occurrence counts of length-`word_len` symbol words over all
/// inputs at a fixed precision level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderTable {
    pub level: usize,
    pub word_len: usize,
    pub input_level: usize,
    /// Number of inputs enumerated, the common denominator.
    pub denominator: u64,
    pub counts: BTreeMap<Vec<Elem>, u64>,
}

impl CylinderTable {
    pub fn frequency(&self, word: &[Elem]) -> Rational {
        Rational::new(self.counts.get(word).copied().unwrap_or(0), self.denominator)
    }

    pub fn frequencies(&self) -> impl Iterator<Item = (&Vec<Elem>, Rational)> {
        self.counts
            .iter()
            .map(|(w, &c)| (w, Rational::new(c, self.denominator)))
    }

    /// True when every one of the `symbol_count^word_len` words occurs with
    /// the same frequency, i.e. the word statistics are those of a uniform
    /// Bernoulli source on `symbol_count` symbols.
    pub fn is_uniform_bernoulli(&self, symbol_count: u64) -> bool {
        let word_count = symbol_count.pow(self.word_len as u32);
        if self.counts.len() as u64 != word_count {
            return false;
        }
        let expected = self.denominator / word_count;
        self.denominator % word_count == 0
            && self.counts.values().all(|&c| c == expected)
    }
}

/// Count every length-`word_len` word over all inputs at `input_level`,
/// exhaustively. Fails up front if that precision cannot support
/// `word_len - 1` iterations.
pub fn cylinder_frequencies<D: Dynamics + ?Sized>(
    d: &D,
    level: usize,
    word_len: usize,
    input_level: usize,
) -> Result<CylinderTable> {
    if word_len == 0 {
        return Err(Error::InvalidInput("word length must be positive".into()));
    }
    let tower = d.tower().clone();
    if input_level > tower.depth() {
        return Err(Error::InvalidLevel {
            level: input_level,
            depth: tower.depth(),
        });
    }
    let mut counts: BTreeMap<Vec<Elem>, u64> = BTreeMap::new();
    for x in tower.level(input_level).elements() {
        let word = orbit(d, x, input_level, level, word_len)?;
        *counts.entry(word).or_insert(0) += 1;
    }
    Ok(CylinderTable {
        level,
        word_len,
        input_level,
        denominator: tower.level(input_level).order(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{CompatibleFamily, PrecisionMap};
    use crate::tower::make_cyclic_tower;
    use std::sync::Arc;

    fn shift(p: u64, depth: usize) -> PrecisionMap {
        PrecisionMap::shift(p, Arc::new(make_cyclic_tower(p, depth).unwrap())).unwrap()
    }

    #[test]
    fn phi_sequence_examples() {
        let s = shift(2, 5);
        let seq = phi_sequence(&s, 13, 5, 1, 4).unwrap();
        assert_eq!(seq.symbols, vec![1, 0, 1, 1]);
        assert_eq!(seq.start, (13, 5));

        let f = CompatibleFamily::from_polynomial(
            Arc::new(make_cyclic_tower(2, 3).unwrap()),
            &[1, 1],
        )
        .unwrap();
        assert_eq!(phi_sequence(&f, 0, 3, 1, 4).unwrap().symbols, vec![0, 1, 0, 1]);

        let b = PrecisionMap::binomial(2, Arc::new(make_cyclic_tower(2, 3).unwrap())).unwrap();
        assert_eq!(phi_sequence(&b, 3, 3, 1, 2).unwrap().symbols, vec![1, 1]);
    }

    #[test]
    fn determinism_verdicts() {
        let f = CompatibleFamily::from_polynomial(
            Arc::new(make_cyclic_tower(2, 4).unwrap()),
            &[1, 1],
        )
        .unwrap();
        assert!(is_deterministic_factor(&f, 1, 8).unwrap().is_deterministic());

        let id = CompatibleFamily::identity(Arc::new(make_cyclic_tower(3, 2).unwrap()));
        for level in 0..=2 {
            assert!(is_deterministic_factor(&id, level, 5)
                .unwrap()
                .is_deterministic());
        }

        let s = shift(2, 3);
        match is_deterministic_factor(&s, 1, 2).unwrap() {
            Determinism::Witness { first, second } => {
                assert_eq!((first, second), (0, 2));
                // the witness pair genuinely has equal projections and
                // diverging sequences
                let a = orbit(&s, first, 3, 1, 2).unwrap();
                let b = orbit(&s, second, 3, 1, 2).unwrap();
                assert_eq!(a[0], b[0]);
                assert_ne!(a, b);
            }
            Determinism::Deterministic => panic!("the shift forgets digits"),
        }
    }

    #[test]
    fn shift_cylinders_are_uniform() {
        let s = shift(2, 4);
        let table = cylinder_frequencies(&s, 1, 3, 4).unwrap();
        assert_eq!(table.counts.len(), 8);
        assert!(table.is_uniform_bernoulli(2));
        assert_eq!(table.frequency(&[1, 0, 1]), Rational::new(1, 8));

        // every word length the depth supports, base 3
        let s3 = shift(3, 4);
        for w in 1..=3 {
            let table = cylinder_frequencies(&s3, 1, w, w + 1).unwrap();
            assert!(table.is_uniform_bernoulli(3), "w = {w}");
        }
    }

    #[test]
    fn binomial_single_symbol_split() {
        let b = PrecisionMap::binomial(2, Arc::new(make_cyclic_tower(2, 2).unwrap())).unwrap();
        let table = cylinder_frequencies(&b, 1, 1, 2).unwrap();
        assert_eq!(table.frequency(&[0]), Rational::new(1, 2));
        assert_eq!(table.frequency(&[1]), Rational::new(1, 2));
        assert!(table.is_uniform_bernoulli(2));
    }

    #[test]
    fn rotation_words_alternate() {
        let f = CompatibleFamily::from_polynomial(
            Arc::new(make_cyclic_tower(2, 2).unwrap()),
            &[1, 1],
        )
        .unwrap();
        let table = cylinder_frequencies(&f, 1, 2, 2).unwrap();
        assert_eq!(table.counts.len(), 2);
        assert_eq!(table.frequency(&[0, 1]), Rational::new(1, 2));
        assert_eq!(table.frequency(&[1, 0]), Rational::new(1, 2));
        assert_eq!(table.frequency(&[0, 0]), Rational::new(0, 1));
        assert!(!table.is_uniform_bernoulli(2));
    }

    #[test]
    fn shift_symbols_reconstruct_residues() {
        // the first k symbols of the shift determine x mod p^k
        for p in [2u64, 3] {
            let depth = 4;
            let s = shift(p, depth);
            let tower = s.tower().clone();
            for k in 1..depth {
                let mut by_word: BTreeMap<Vec<Elem>, Elem> = BTreeMap::new();
                for x in tower.top().elements() {
                    let word = orbit(&s, x, depth, 1, k).unwrap();
                    let residue = tower.project(x, depth, k).unwrap();
                    let prev = by_word.insert(word, residue);
                    if let Some(other) = prev {
                        assert_eq!(other, residue, "p={p} k={k}");
                    }
                }
                assert_eq!(by_word.len() as u64, p.pow(k as u32));
            }
        }
    }

    #[test]
    fn exhausted_cylinders_error() {
        let s = shift(2, 2);
        assert!(matches!(
            cylinder_frequencies(&s, 1, 4, 2),
            Err(Error::PrecisionExhausted { .. }) | Err(Error::InsufficientPrecision { .. })
        ));
    }
}
