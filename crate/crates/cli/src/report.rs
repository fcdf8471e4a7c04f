//! JSON and text report assembly. The JSON schema carries a top-level
//! `"schema": 1` version field and is byte-deterministic for a fixed spec
//! and version: struct fields serialize in declaration order and all maps
//! are ordered.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use profdyn::analysis::{AnalysisReport, EquivalenceReport};
use profdyn::metric::IsometryVerdict;
use profdyn::product::ProductErgodicity;
use profdyn::shift_factor::CylinderTable;
use profdyn::Rational;

pub const SCHEMA_VERSION: u32 = 1;

/// Report for a quotient-preserving map (compatible family).
#[derive(Debug, Serialize)]
pub struct FamilyReport {
    pub schema: u32,
    pub spec: String,
    pub kind: &'static str,
    #[serde(flatten)]
    pub analysis: AnalysisReport,
    pub equivalence: EquivalenceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric_isometry: Option<IsometryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_ergodicity: Option<ProductReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cylinders: Option<CylinderReport>,
}

/// Report for a precision-contracted map.
#[derive(Debug, Serialize)]
pub struct PrecisionReport {
    pub schema: u32,
    pub spec: String,
    pub kind: &'static str,
    /// Uniform pushforward at every available output level.
    pub measure_preserving: bool,
    pub max_output_level: usize,
    pub depth: usize,
    pub levels: Vec<PrecisionLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cylinders: Option<CylinderReport>,
}

#[derive(Debug, Serialize)]
pub struct PrecisionLevel {
    pub level: usize,
    pub order: u64,
    pub input_level: usize,
    pub uniform_pushforward: bool,
    /// Weights as exact rationals, element index order.
    pub weights: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct IsometryReport {
    pub isometry: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<IsometryWitness>,
}

#[derive(Debug, Serialize)]
pub struct IsometryWitness {
    pub first: u64,
    pub second: u64,
    pub distance: String,
    pub image_distance: String,
}

impl From<IsometryVerdict> for IsometryReport {
    fn from(v: IsometryVerdict) -> Self {
        match v {
            IsometryVerdict::Isometry => IsometryReport {
                isometry: true,
                witness: None,
            },
            IsometryVerdict::Violation {
                first,
                second,
                distance,
                image_distance,
            } => IsometryReport {
                isometry: false,
                witness: Some(IsometryWitness {
                    first,
                    second,
                    distance: distance.to_string(),
                    image_distance: image_distance.to_string(),
                }),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ProductReport {
    pub ergodic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ProductWitness>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum ProductWitness {
    ComponentNotErgodic { component: usize, level: usize },
    CoprimalityFailure {
        first: usize,
        second: usize,
        first_order: u64,
        second_order: u64,
    },
}

impl From<ProductErgodicity> for ProductReport {
    fn from(v: ProductErgodicity) -> Self {
        match v {
            ProductErgodicity::Ergodic => ProductReport {
                ergodic: true,
                witness: None,
            },
            ProductErgodicity::ComponentNotErgodic { component, level } => ProductReport {
                ergodic: false,
                witness: Some(ProductWitness::ComponentNotErgodic { component, level }),
            },
            ProductErgodicity::CoprimalityFailure {
                first,
                second,
                first_order,
                second_order,
            } => ProductReport {
                ergodic: false,
                witness: Some(ProductWitness::CoprimalityFailure {
                    first,
                    second,
                    first_order,
                    second_order,
                }),
            },
        }
    }
}

/// Word frequencies as `"a,b,c" -> "n/d"` with exact rationals.
#[derive(Debug, Serialize)]
pub struct CylinderReport {
    pub level: usize,
    pub word_length: usize,
    pub input_level: usize,
    pub frequencies: BTreeMap<String, String>,
}

pub fn rational_string(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl From<&CylinderTable> for CylinderReport {
    fn from(t: &CylinderTable) -> Self {
        let frequencies = t
            .frequencies()
            .map(|(word, freq)| {
                let key = word
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                (key, rational_string(freq))
            })
            .collect();
        CylinderReport {
            level: t.level,
            word_length: t.word_len,
            input_level: t.input_level,
            frequencies,
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn push_cylinders(out: &mut String, c: &CylinderReport) {
    let _ = writeln!(
        out,
        "cylinders: level {}, word length {}, inputs at level {}",
        c.level, c.word_length, c.input_level
    );
    for (word, freq) in &c.frequencies {
        let _ = writeln!(out, "  [{word}] {freq}");
    }
}

impl FamilyReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "spec: {}", self.spec);
        let _ = writeln!(out, "kind: quotient-preserving family");
        let _ = writeln!(
            out,
            "measure preserving: {}",
            yes_no(self.analysis.measure_preserving)
        );
        let _ = writeln!(out, "ergodic: {}", yes_no(self.analysis.ergodic));
        match self.analysis.obstruction_period {
            Some(m) => {
                let _ = writeln!(out, "totally ergodic possible: no (period {m} obstruction)");
            }
            None => {
                let _ = writeln!(out, "totally ergodic possible: not obstructed (no minimal level)");
            }
        }
        let _ = writeln!(
            out,
            "levels checked: {}..={}",
            self.analysis.levels_checked.from, self.analysis.levels_checked.to
        );
        for (i, l) in self.analysis.levels.iter().enumerate() {
            match (&l.cycle_type, &l.witness) {
                (Some(ct), _) => {
                    let _ = writeln!(
                        out,
                        "level {i}: order {}, bijective, cycle type {ct:?}",
                        l.order
                    );
                }
                (None, Some((a, b))) => {
                    let _ = writeln!(
                        out,
                        "level {i}: order {}, not bijective (collision {a} ~ {b})",
                        l.order
                    );
                }
                (None, None) => {
                    let _ = writeln!(out, "level {i}: order {}", l.order);
                }
            }
        }
        let _ = writeln!(
            out,
            "equivalence criteria: {}",
            if self.equivalence.coherent {
                "coherent"
            } else {
                "INTERNAL DISAGREEMENT (implementation bug)"
            }
        );
        if let Some(m) = &self.metric_isometry {
            match &m.witness {
                None => {
                    let _ = writeln!(out, "isometry: {}", yes_no(m.isometry));
                }
                Some(w) => {
                    let _ = writeln!(
                        out,
                        "isometry: no (d({}, {}) = {} but images are {} apart)",
                        w.first, w.second, w.distance, w.image_distance
                    );
                }
            }
        }
        if let Some(p) = &self.product_ergodicity {
            match &p.witness {
                None => {
                    let _ = writeln!(out, "product ergodicity: {}", yes_no(p.ergodic));
                }
                Some(ProductWitness::ComponentNotErgodic { component, level }) => {
                    let _ = writeln!(
                        out,
                        "product ergodicity: no (component {component} not ergodic at level {level})"
                    );
                }
                Some(ProductWitness::CoprimalityFailure {
                    first,
                    second,
                    first_order,
                    second_order,
                }) => {
                    let _ = writeln!(
                        out,
                        "product ergodicity: no (components {first} and {second} share a factor: \
                         gcd({first_order}, {second_order}) > 1)"
                    );
                }
            }
        }
        if let Some(c) = &self.cylinders {
            push_cylinders(&mut out, c);
        }
        out
    }
}

impl PrecisionReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "spec: {}", self.spec);
        let _ = writeln!(out, "kind: precision-contracted map");
        let _ = writeln!(
            out,
            "measure preserving (uniform pushforward at levels 0..={}): {}",
            self.max_output_level,
            yes_no(self.measure_preserving)
        );
        for l in &self.levels {
            let _ = writeln!(
                out,
                "level {}: order {}, inputs at level {}, uniform pushforward: {}",
                l.level,
                l.order,
                l.input_level,
                yes_no(l.uniform_pushforward)
            );
        }
        if let Some(c) = &self.cylinders {
            push_cylinders(&mut out, c);
        }
        out
    }
}
