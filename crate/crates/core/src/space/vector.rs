//! Finitely supported vectors over a lattice model.

use crate::error::{Error, Result};
use crate::graph::{GraphModel, Vertex};
use crate::space::scalar::Scalar;
use std::collections::BTreeMap;

/// A finitely supported function `V -> S`, tagged with its model.
///
/// Invariants: every supported vertex is admissible in the tagged
/// model, and no explicit zero is stored. Iteration order is the
/// vertex order (row-major), so serialization and reduction are
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<S> {
    model: GraphModel,
    entries: BTreeMap<Vertex, S>,
}

impl<S: Scalar> SparseVector<S> {
    pub fn zero(model: GraphModel) -> Self {
        SparseVector {
            model,
            entries: BTreeMap::new(),
        }
    }

    /// The basis vector `e_v`.
    pub fn unit(model: GraphModel, v: Vertex) -> Result<Self> {
        let mut out = Self::zero(model);
        out.add_assign_at(v, S::one())?;
        Ok(out)
    }

    pub fn from_entries<I>(model: GraphModel, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, S)>,
    {
        let mut out = Self::zero(model);
        for (v, c) in entries {
            out.add_assign_at(v, c)?;
        }
        Ok(out)
    }

    pub fn model(&self) -> GraphModel {
        self.model
    }

    /// Adds `c` to the coefficient at `v`, dropping the entry if the
    /// sum cancels to zero. Rejects inadmissible vertices.
    pub fn add_assign_at(&mut self, v: Vertex, c: S) -> Result<()> {
        self.model.check_admissible(v)?;
        if c.is_zero() {
            return Ok(());
        }
        match self.entries.remove(&v) {
            None => {
                self.entries.insert(v, c);
            }
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.entries.insert(v, sum);
                }
            }
        }
        Ok(())
    }

    /// Coefficient at `v` (zero off the support).
    pub fn get(&self, v: &Vertex) -> S {
        self.entries.get(v).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeff(&self, v: &Vertex) -> Option<&S> {
        self.entries.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vertex, &S)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Vertex> {
        self.entries.keys()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.model);
        }
        SparseVector {
            model: self.model,
            entries: self
                .entries
                .iter()
                .map(|(v, x)| (*v, c.clone() * x.clone()))
                .collect(),
        }
    }

    fn check_same_model(&self, other: &Self) -> Result<()> {
        if self.model == other.model {
            Ok(())
        } else {
            Err(Error::ModelMismatch {
                expected: self.model,
                found: other.model,
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_model(other)?;
        let mut out = self.clone();
        for (v, c) in other.iter() {
            out.add_assign_at(*v, c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_model(other)?;
        let mut out = self.clone();
        for (v, c) in other.iter() {
            out.add_assign_at(*v, -c.clone())?;
        }
        Ok(out)
    }

    /// Largest coefficient modulus, as `f64` (zero for the zero vector).
    pub fn max_abs(&self) -> f64 {
        self.entries
            .values()
            .map(Scalar::abs_f64)
            .fold(0.0, f64::max)
    }

    /// `max_v |self(v) - other(v)|` as `f64`; the discrepancy measure
    /// used by the oracle equivalence check.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cancellation_drops_entries() {
        let m = GraphModel::Quadrant;
        let mut v = SparseVector::unit(m, Vertex::grid(1, 2)).unwrap();
        v.add_assign_at(Vertex::grid(1, 2), rat(-1, 1)).unwrap();
        assert!(v.is_zero());
        assert_eq!(v.get(&Vertex::grid(1, 2)), rat(0, 1));
    }

    #[test]
    fn admissibility_is_enforced_on_insert() {
        let m = GraphModel::Strip { m: 2 };
        let mut v = SparseVector::<BigRational>::zero(m);
        assert!(v.add_assign_at(Vertex::grid(3, 1), rat(1, 1)).is_err());
        assert!(v.add_assign_at(Vertex::grid(2, 0), rat(1, 1)).is_err());
        assert!(v.is_zero());
    }

    #[test]
    fn model_mismatch_is_an_error() {
        let a =
            SparseVector::<BigRational>::unit(GraphModel::Quadrant, Vertex::grid(0, 0)).unwrap();
        let b =
            SparseVector::<BigRational>::unit(GraphModel::HalfPlane, Vertex::grid(0, 0)).unwrap();
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn arithmetic_and_max_abs() {
        let m = GraphModel::Quadrant;
        let a = SparseVector::from_entries(
            m,
            [
                (Vertex::grid(0, 0), rat(3, 2)),
                (Vertex::grid(1, 1), rat(-2, 1)),
            ],
        )
        .unwrap();
        let b = SparseVector::from_entries(
            m,
            [
                (Vertex::grid(0, 0), rat(1, 2)),
                (Vertex::grid(2, 0), rat(1, 3)),
            ],
        )
        .unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.get(&Vertex::grid(0, 0)), rat(2, 1));
        assert_eq!(s.support_len(), 3);
        let d = s.sub(&b).unwrap();
        assert_eq!(d, a);
        assert_eq!(a.max_abs(), 2.0);
        assert_eq!(a.max_abs_diff(&a).unwrap(), 0.0);
    }
}
