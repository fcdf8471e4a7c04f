//! Serializable descriptions of towers and maps, and the builders that turn
//! them into live objects.
//!
//! Tower JSON: `{"kind":"cyclic","p":2,"depth":3}`,
//! `{"kind":"product","components":[...]}`, or
//! `{"kind":"table","levels":[<op tables>],"transitions":[<dense maps>]}`.
//! Map JSON: `{"type":"polynomial","coeffs":[1,1]}`,
//! `{"type":"tables","tables":[[0],[0,1]]}`,
//! `{"type":"matrix","entries":[[1,1],[1,0]]}`,
//! `{"type":"product","components":[...]}`, `{"type":"shift"}`, or
//! `{"type":"binomial"}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{CompatibleFamily, PrecisionMap};
use crate::quotient::{Elem, FiniteQuotient};
use crate::tower::{make_cyclic_tower, make_product_tower, Tower, TransitionMap};

/// Declarative tower description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TowerSpec {
    Cyclic {
        p: u64,
        depth: usize,
    },
    Product {
        components: Vec<TowerSpec>,
    },
    /// Generic tower: one row-major operation table per level and one dense
    /// transition table per adjacent pair (upper level to lower).
    Table {
        levels: Vec<Vec<Vec<Elem>>>,
        transitions: Vec<Vec<Elem>>,
    },
}

impl TowerSpec {
    pub fn build(&self) -> Result<Tower> {
        match self {
            TowerSpec::Cyclic { p, depth } => make_cyclic_tower(*p, *depth),
            TowerSpec::Product { components } => {
                let built = components
                    .iter()
                    .map(TowerSpec::build)
                    .collect::<Result<Vec<_>>>()?;
                make_product_tower(&built)
            }
            TowerSpec::Table { levels, transitions } => {
                let quotients = levels
                    .iter()
                    .map(|rows| FiniteQuotient::from_table(rows))
                    .collect::<Result<Vec<_>>>()?;
                let maps = transitions
                    .iter()
                    .enumerate()
                    .map(|(k, table)| TransitionMap::new(k + 1, k, table.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let tower = Tower::from_parts(quotients, maps)?;
                let report = tower.verify();
                if let Some(v) = report.violations.first() {
                    return Err(Error::InvalidInput(format!("invalid tower: {v}")));
                }
                Ok(tower)
            }
        }
    }
}

/// Declarative map description, interpreted against a tower description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MapSpec {
    Polynomial { coeffs: Vec<i64> },
    Tables { tables: Vec<Vec<Elem>> },
    Matrix { entries: Vec<Vec<i64>> },
    Product { components: Vec<MapSpec> },
    Shift,
    Binomial,
}

/// A built dynamical system: either a compatible family (with its
/// components retained when it came from a product) or a precision map.
#[derive(Debug, Clone)]
pub enum BuiltMap {
    Family {
        family: CompatibleFamily,
        /// Component families of a product spec; empty otherwise.
        components: Vec<CompatibleFamily>,
    },
    Precision(PrecisionMap),
}

impl BuiltMap {
    pub fn tower(&self) -> &Arc<Tower> {
        match self {
            BuiltMap::Family { family, .. } => family.tower(),
            BuiltMap::Precision(m) => m.tower(),
        }
    }
}

/// Build the system described by a tower and a map spec, checking that the
/// two fit together.
pub fn build_system(tower_spec: &TowerSpec, map_spec: &MapSpec) -> Result<BuiltMap> {
    match map_spec {
        MapSpec::Polynomial { coeffs } => {
            let tower = Arc::new(tower_spec.build()?);
            let family = CompatibleFamily::from_polynomial(tower, coeffs)?;
            Ok(BuiltMap::Family {
                family,
                components: Vec::new(),
            })
        }
        MapSpec::Tables { tables } => {
            let tower = Arc::new(tower_spec.build()?);
            let family = CompatibleFamily::from_level_tables(tower, tables.clone())?;
            Ok(BuiltMap::Family {
                family,
                components: Vec::new(),
            })
        }
        MapSpec::Shift => {
            let tower = Arc::new(tower_spec.build()?);
            let p = tower.cyclic_base().ok_or_else(|| {
                Error::UnsupportedTower("the shift map needs a cyclic tower".into())
            })?;
            Ok(BuiltMap::Precision(PrecisionMap::shift(p, tower)?))
        }
        MapSpec::Binomial => {
            let tower = Arc::new(tower_spec.build()?);
            let p = tower.cyclic_base().ok_or_else(|| {
                Error::UnsupportedTower("the binomial map needs a cyclic tower".into())
            })?;
            Ok(BuiltMap::Precision(PrecisionMap::binomial(p, tower)?))
        }
        MapSpec::Matrix { entries } => {
            let dim = entries.len();
            let family = match (tower_spec, dim) {
                (TowerSpec::Cyclic { p, depth }, 1) => {
                    let tower = Arc::new(tower_spec.build()?);
                    let _ = (p, depth);
                    CompatibleFamily::from_polynomial(tower, &[0, entries[0][0]])?
                }
                (TowerSpec::Product { components }, _) => {
                    let (p, depth) = diagonal_parameters(components, dim)?;
                    CompatibleFamily::from_matrix(p, dim, depth, entries)?
                }
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "a {dim} x {dim} matrix needs a product of {dim} identical \
                         cyclic towers"
                    )))
                }
            };
            Ok(BuiltMap::Family {
                family,
                components: Vec::new(),
            })
        }
        MapSpec::Product { components } => {
            let TowerSpec::Product { components: tower_components } = tower_spec else {
                return Err(Error::InvalidInput(
                    "a product map needs a product tower".into(),
                ));
            };
            if tower_components.len() != components.len() {
                return Err(Error::InvalidInput(format!(
                    "product map has {} components but the tower has {}",
                    components.len(),
                    tower_components.len()
                )));
            }
            let families = tower_components
                .iter()
                .zip(components)
                .map(|(t, m)| match build_system(t, m)? {
                    BuiltMap::Family { family, .. } => Ok(family),
                    BuiltMap::Precision(_) => Err(Error::InvalidInput(
                        "product components must be quotient-preserving maps".into(),
                    )),
                })
                .collect::<Result<Vec<_>>>()?;
            let family = CompatibleFamily::product(&families)?;
            Ok(BuiltMap::Family {
                family,
                components: families,
            })
        }
    }
}

fn diagonal_parameters(components: &[TowerSpec], dim: usize) -> Result<(u64, usize)> {
    if components.len() != dim {
        return Err(Error::InvalidInput(format!(
            "a {dim} x {dim} matrix needs {dim} tower components, found {}",
            components.len()
        )));
    }
    let mut params = None;
    for c in components {
        let TowerSpec::Cyclic { p, depth } = c else {
            return Err(Error::InvalidInput(
                "matrix maps need cyclic tower components".into(),
            ));
        };
        match params {
            None => params = Some((*p, *depth)),
            Some(prev) if prev == (*p, *depth) => {}
            Some(_) => {
                return Err(Error::InvalidInput(
                    "matrix maps need identical cyclic components (the diagonal tower)".into(),
                ))
            }
        }
    }
    params.ok_or_else(|| Error::EmptyProduct)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_spec_json_roundtrip() {
        let spec = TowerSpec::Product {
            components: vec![
                TowerSpec::Cyclic { p: 2, depth: 3 },
                TowerSpec::Cyclic { p: 3, depth: 3 },
            ],
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"kind\":\"product\""));
        let back: TowerSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);

        let cyclic: TowerSpec =
            serde_json::from_str(r#"{"kind":"cyclic","p":2,"depth":3}"#).unwrap();
        assert_eq!(cyclic, TowerSpec::Cyclic { p: 2, depth: 3 });
    }

    #[test]
    fn table_tower_spec_builds_and_validates() {
        let spec: TowerSpec = serde_json::from_str(
            r#"{
                "kind": "table",
                "levels": [[[0]], [[0,1],[1,0]]],
                "transitions": [[0,0]]
            }"#,
        )
        .unwrap();
        let tower = spec.build().unwrap();
        assert_eq!(tower.top().order(), 2);

        let broken: TowerSpec = serde_json::from_str(
            r#"{
                "kind": "table",
                "levels": [[[0]], [[0,1],[1,0]], [[0,1,2,3],[1,2,3,0],[2,3,0,1],[3,0,1,2]]],
                "transitions": [[0,0], [0,0,0,0]]
            }"#,
        )
        .unwrap();
        assert!(matches!(broken.build(), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn map_spec_variants_build() {
        let zp = TowerSpec::Cyclic { p: 2, depth: 3 };
        let poly = build_system(&zp, &MapSpec::Polynomial { coeffs: vec![1, 1] }).unwrap();
        assert!(matches!(poly, BuiltMap::Family { .. }));

        let shift = build_system(&zp, &MapSpec::Shift).unwrap();
        assert!(matches!(shift, BuiltMap::Precision(_)));

        let prod_tower = TowerSpec::Product {
            components: vec![
                TowerSpec::Cyclic { p: 2, depth: 2 },
                TowerSpec::Cyclic { p: 3, depth: 2 },
            ],
        };
        let prod = build_system(
            &prod_tower,
            &MapSpec::Product {
                components: vec![
                    MapSpec::Polynomial { coeffs: vec![1, 1] },
                    MapSpec::Polynomial { coeffs: vec![1, 1] },
                ],
            },
        )
        .unwrap();
        match prod {
            BuiltMap::Family { family, components } => {
                assert_eq!(components.len(), 2);
                assert_eq!(family.tower().top().order(), 36);
            }
            _ => panic!("expected a family"),
        }
    }

    #[test]
    fn matrix_spec_needs_the_diagonal_tower() {
        let diag = TowerSpec::Product {
            components: vec![
                TowerSpec::Cyclic { p: 2, depth: 2 },
                TowerSpec::Cyclic { p: 2, depth: 2 },
            ],
        };
        let m = MapSpec::Matrix {
            entries: vec![vec![1, 1], vec![1, 0]],
        };
        assert!(build_system(&diag, &m).is_ok());

        let skew = TowerSpec::Product {
            components: vec![
                TowerSpec::Cyclic { p: 2, depth: 2 },
                TowerSpec::Cyclic { p: 3, depth: 2 },
            ],
        };
        assert!(build_system(&skew, &m).is_err());

        let scalar = build_system(
            &TowerSpec::Cyclic { p: 3, depth: 2 },
            &MapSpec::Matrix { entries: vec![vec![2]] },
        )
        .unwrap();
        match scalar {
            BuiltMap::Family { family, .. } => assert_eq!(family.apply(4, 2), 8),
            _ => panic!("expected a family"),
        }
    }

    #[test]
    fn product_map_arity_mismatch_rejected() {
        let prod_tower = TowerSpec::Product {
            components: vec![TowerSpec::Cyclic { p: 2, depth: 1 }],
        };
        let err = build_system(
            &prod_tower,
            &MapSpec::Product {
                components: vec![
                    MapSpec::Polynomial { coeffs: vec![1, 1] },
                    MapSpec::Polynomial { coeffs: vec![1, 1] },
                ],
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }
}
