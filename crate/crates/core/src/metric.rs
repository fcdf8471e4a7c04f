//! The translation-invariant ultrametric induced by a tower.
//!
//! `d(x, y) = 2^(-l)` where `l` is the least level at which the projections
//! of `x` and `y` differ, and 0 when they agree everywhere. Agreement
//! propagates downward along the chain, so the disagreement levels form an
//! upper set and `l` is well defined. Radii are exact dyadic values; no
//! floating point is involved. The closed ball of radius `2^-(k+1)` around
//! the identity is exactly the kernel of the projection to level `k`.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::maps::CompatibleFamily;
use crate::quotient::Elem;
use crate::tower::Tower;

/// An exact dyadic radius: either 0 or `2^-k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distance {
    Zero,
    /// The value `2^-k`.
    Scale(u32),
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Distance::Zero, Distance::Zero) => Ordering::Equal,
            (Distance::Zero, Distance::Scale(_)) => Ordering::Less,
            (Distance::Scale(_), Distance::Zero) => Ordering::Greater,
            // larger exponent = smaller radius
            (Distance::Scale(a), Distance::Scale(b)) => b.cmp(a),
        }
    }
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Distance::Zero => write!(f, "0"),
            Distance::Scale(k) => write!(f, "2^-{k}"),
        }
    }
}

/// The ultrametric of a tower, measured between top-level elements.
#[derive(Debug, Clone)]
pub struct TowerMetric {
    tower: Arc<Tower>,
}

/// Construct the metric for a tower.
pub fn build_metric(tower: Arc<Tower>) -> TowerMetric {
    TowerMetric { tower }
}

impl TowerMetric {
    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    /// The radius value `2^-level` associated with a level.
    pub fn scale(&self, level: usize) -> Distance {
        Distance::Scale(level as u32)
    }

    /// The radius whose closed ball around the identity is exactly the
    /// kernel of the projection to `level`.
    pub fn kernel_ball_radius(&self, level: usize) -> Distance {
        Distance::Scale(level as u32 + 1)
    }

    /// Distance between two top-level elements.
    pub fn distance(&self, x: Elem, y: Elem) -> Distance {
        let top = self.tower.depth();
        let order = self.tower.top().order();
        assert!(x < order && y < order, "element out of range");
        if x == y {
            return Distance::Zero;
        }
        let mut xs = x;
        let mut ys = y;
        let mut least = top;
        // walk down; record the deepest level of agreement + 1
        for lvl in (1..=top).rev() {
            if lvl < top {
                xs = self.tower.transition(lvl + 1).apply(xs);
                ys = self.tower.transition(lvl + 1).apply(ys);
            }
            if xs == ys {
                break;
            }
            least = lvl;
        }
        Distance::Scale(least as u32)
    }

    /// Top-level elements within `radius` of `center` (closed ball).
    pub fn closed_ball(&self, center: Elem, radius: Distance) -> Vec<Elem> {
        self.tower
            .top()
            .elements()
            .filter(|&x| self.distance(center, x) <= radius)
            .collect()
    }
}

/// Isometry verdict over all top-level pairs, scanned lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsometryVerdict {
    Isometry,
    Violation {
        first: Elem,
        second: Elem,
        distance: Distance,
        image_distance: Distance,
    },
}

impl IsometryVerdict {
    pub fn is_isometry(&self) -> bool {
        matches!(self, IsometryVerdict::Isometry)
    }
}

/// Exhaustively check `d(Tx, Ty) = d(x, y)` at the top level.
pub fn verify_isometry(f: &CompatibleFamily, m: &TowerMetric) -> Result<IsometryVerdict> {
    if f.tower().as_ref() != m.tower().as_ref() {
        return Err(Error::InvalidInput(
            "metric was built on a different tower".into(),
        ));
    }
    let tower = m.tower();
    let top = tower.depth();
    let n = tower.top().order();
    // projections of every top element to every level, for cheap distances
    let mut proj: Vec<Vec<Elem>> = Vec::with_capacity(top + 1);
    proj.push(tower.top().elements().collect());
    for lvl in (0..top).rev() {
        let t = tower.transition(lvl + 1);
        let prev = &proj[proj.len() - 1];
        let next: Vec<Elem> = prev.iter().map(|&v| t.apply(v)).collect();
        proj.push(next);
    }
    proj.reverse(); // proj[lvl][x] = projection of x to lvl
    let least_disagreement = |a: Elem, b: Elem| -> Option<u32> {
        (1..=top).find(|&lvl| proj[lvl][a as usize] != proj[lvl][b as usize]).map(|l| l as u32)
    };
    let map = f.level_map(top);
    for x in 0..n {
        for y in (x + 1)..n {
            let before = least_disagreement(x, y);
            let after = least_disagreement(map[x as usize], map[y as usize]);
            if before != after {
                let to_dist = |l: Option<u32>| l.map_or(Distance::Zero, Distance::Scale);
                return Ok(IsometryVerdict::Violation {
                    first: x,
                    second: y,
                    distance: to_dist(before),
                    image_distance: to_dist(after),
                });
            }
        }
    }
    Ok(IsometryVerdict::Isometry)
}
