//! Finite groups appearing as one level of a quotient tower.
//!
//! Elements are dense integer indices `0..order`. Cyclic and product
//! quotients compute their operation arithmetically; table-backed quotients
//! carry an explicit operation table and are validated exhaustively.

use crate::error::{Error, Result};

/// Index of a group element within a finite quotient, in `0..order`.
pub type Elem = u64;

/// Largest admissible level order. Constructors fail loudly beyond it.
pub const MAX_LEVEL_ORDER: u64 = i32::MAX as u64;

/// Associativity of table-backed quotients is checked exhaustively only up
/// to this order; the check is cubic in the order.
pub const MAX_ASSOCIATIVITY_ORDER: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    /// Additive group of integers mod `n`; identity 0, op = addition.
    Cyclic { modulus: u64 },
    /// Direct product with mixed-radix element encoding. The first
    /// component is the least significant digit.
    Product { components: Vec<FiniteQuotient> },
    /// Explicit operation table, row-major: `op[x * n + y]`.
    Table {
        op: Vec<Elem>,
        identity: Elem,
        inv: Vec<Elem>,
    },
}

/// A finite group at one tower level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteQuotient {
    order: u64,
    kind: Kind,
}

/// Violation found by [`FiniteQuotient::verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuotientViolation {
    NotAssociative { x: Elem, y: Elem, z: Elem },
    IdentityNotNeutral { x: Elem },
    InverseInvalid { x: Elem },
}

impl std::fmt::Display for QuotientViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuotientViolation::NotAssociative { x, y, z } => {
                write!(f, "operation not associative at ({x}, {y}, {z})")
            }
            QuotientViolation::IdentityNotNeutral { x } => {
                write!(f, "identity is not neutral on {x}")
            }
            QuotientViolation::InverseInvalid { x } => {
                write!(f, "inverse of {x} is not two-sided")
            }
        }
    }
}

impl FiniteQuotient {
    /// The group with one element.
    pub fn trivial() -> Self {
        FiniteQuotient {
            order: 1,
            kind: Kind::Cyclic { modulus: 1 },
        }
    }

    /// Cyclic group of order `n` (integers mod `n` under addition).
    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("cyclic group order must be positive".into()));
        }
        if n > MAX_LEVEL_ORDER {
            return Err(Error::Capacity {
                requested: n as u128,
                max: MAX_LEVEL_ORDER,
            });
        }
        Ok(FiniteQuotient {
            order: n,
            kind: Kind::Cyclic { modulus: n },
        })
    }

    /// Direct product of the given components, in order.
    pub fn product(components: Vec<FiniteQuotient>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyProduct);
        }
        let order = components
            .iter()
            .try_fold(1u128, |acc, c| {
                let next = acc * c.order as u128;
                if next > MAX_LEVEL_ORDER as u128 {
                    Err(Error::Capacity {
                        requested: next,
                        max: MAX_LEVEL_ORDER,
                    })
                } else {
                    Ok(next)
                }
            })? as u64;
        Ok(FiniteQuotient {
            order,
            kind: Kind::Product { components },
        })
    }

    /// Group from an explicit row-major operation table. The identity and
    /// inverses are located by search; the full group axioms are verified
    /// (associativity exhaustively for orders up to
    /// [`MAX_ASSOCIATIVITY_ORDER`]).
    pub fn from_table(rows: &[Vec<Elem>]) -> Result<Self> {
        let n = rows.len() as u64;
        if n == 0 {
            return Err(Error::InvalidTable("empty operation table".into()));
        }
        if n > MAX_LEVEL_ORDER {
            return Err(Error::Capacity {
                requested: n as u128,
                max: MAX_LEVEL_ORDER,
            });
        }
        let mut op = Vec::with_capacity((n * n) as usize);
        for (x, row) in rows.iter().enumerate() {
            if row.len() as u64 != n {
                return Err(Error::InvalidTable(format!(
                    "row {x} has length {}, expected {n}",
                    row.len()
                )));
            }
            for (y, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::InvalidTable(format!(
                        "entry at ({x}, {y}) is {v}, out of range for order {n}"
                    )));
                }
                op.push(v);
            }
        }

        let identity = (0..n)
            .find(|&e| (0..n).all(|x| op[(e * n + x) as usize] == x && op[(x * n + e) as usize] == x))
            .ok_or_else(|| Error::InvalidTable("no two-sided identity".into()))?;

        let mut inv = Vec::with_capacity(n as usize);
        for x in 0..n {
            let y = (0..n)
                .find(|&y| op[(x * n + y) as usize] == identity && op[(y * n + x) as usize] == identity)
                .ok_or_else(|| Error::InvalidTable(format!("element {x} has no two-sided inverse")))?;
            inv.push(y);
        }

        let q = FiniteQuotient {
            order: n,
            kind: Kind::Table { op, identity, inv },
        };
        if let Some(v) = q.verify().into_iter().next() {
            return Err(Error::InvalidTable(v.to_string()));
        }
        Ok(q)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn identity(&self) -> Elem {
        match &self.kind {
            Kind::Cyclic { .. } => 0,
            // all-zero digits encode to 0
            Kind::Product { .. } => 0,
            Kind::Table { identity, .. } => *identity,
        }
    }

    /// Group operation. Panics if an argument is out of range.
    pub fn op(&self, x: Elem, y: Elem) -> Elem {
        assert!(x < self.order && y < self.order, "element out of range");
        match &self.kind {
            Kind::Cyclic { modulus } => (x + y) % modulus,
            Kind::Product { components } => {
                let xs = self.decode(x);
                let ys = self.decode(y);
                let parts: Vec<Elem> = components
                    .iter()
                    .zip(xs.iter().zip(ys.iter()))
                    .map(|(c, (&a, &b))| c.op(a, b))
                    .collect();
                self.encode(&parts)
            }
            Kind::Table { op, .. } => op[(x * self.order + y) as usize],
        }
    }

    /// Two-sided inverse. Panics if out of range.
    pub fn inv(&self, x: Elem) -> Elem {
        assert!(x < self.order, "element out of range");
        match &self.kind {
            Kind::Cyclic { modulus } => (modulus - x) % modulus,
            Kind::Product { components } => {
                let parts: Vec<Elem> = components
                    .iter()
                    .zip(self.decode(x))
                    .map(|(c, a)| c.inv(a))
                    .collect();
                self.encode(&parts)
            }
            Kind::Table { inv, .. } => inv[x as usize],
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order
    }

    /// Component quotients of a product; a single-component view otherwise.
    pub fn components(&self) -> &[FiniteQuotient] {
        match &self.kind {
            Kind::Product { components } => components,
            _ => std::slice::from_ref(self),
        }
    }

    /// Mixed-radix encode: the first component is the least significant digit.
    pub fn encode(&self, parts: &[Elem]) -> Elem {
        let comps = self.components();
        assert_eq!(parts.len(), comps.len(), "wrong number of components");
        let mut acc = 0u64;
        for (c, &p) in comps.iter().zip(parts).rev() {
            assert!(p < c.order, "component element out of range");
            acc = acc * c.order + p;
        }
        acc
    }

    /// Mixed-radix decode, inverse of [`FiniteQuotient::encode`].
    pub fn decode(&self, x: Elem) -> Vec<Elem> {
        assert!(x < self.order, "element out of range");
        let comps = self.components();
        let mut rest = x;
        let mut parts = Vec::with_capacity(comps.len());
        for c in comps {
            parts.push(rest % c.order);
            rest /= c.order;
        }
        parts
    }

    /// Exhaustively check the group axioms, returning every violation found.
    /// For table-backed quotients of order above
    /// [`MAX_ASSOCIATIVITY_ORDER`] the associativity pass is skipped.
    pub fn verify(&self) -> Vec<QuotientViolation> {
        let mut out = Vec::new();
        let e = self.identity();
        for x in self.elements() {
            if self.op(e, x) != x || self.op(x, e) != x {
                out.push(QuotientViolation::IdentityNotNeutral { x });
            }
            let ix = self.inv(x);
            if self.op(x, ix) != e || self.op(ix, x) != e {
                out.push(QuotientViolation::InverseInvalid { x });
            }
        }
        let check_assoc = match &self.kind {
            // computed arithmetically; associativity holds by construction
            Kind::Cyclic { .. } | Kind::Product { .. } => false,
            Kind::Table { .. } => self.order <= MAX_ASSOCIATIVITY_ORDER,
        };
        if check_assoc {
            'outer: for x in self.elements() {
                for y in self.elements() {
                    for z in self.elements() {
                        if self.op(self.op(x, y), z) != self.op(x, self.op(y, z)) {
                            out.push(QuotientViolation::NotAssociative { x, y, z });
                            break 'outer;
                        }
                    }
                }
            }
        }
        out
    }

    /// Rebuild this quotient as an explicit table-backed group with the same
    /// element indexing.
    pub fn to_table_backed(&self) -> Result<Self> {
        let rows: Vec<Vec<Elem>> = self
            .elements()
            .map(|x| self.elements().map(|y| self.op(x, y)).collect())
            .collect();
        FiniteQuotient::from_table(&rows)
    }

    /// Row-major operation table rows, materialized.
    pub fn op_rows(&self) -> Vec<Vec<Elem>> {
        self.elements()
            .map(|x| self.elements().map(|y| self.op(x, y)).collect())
            .collect()
    }
}
