//! The backward shift `(Bf)(v) = sum_{u in Chi(v)} f(u)` and its
//! powers.
//!
//! `B^n` is available two ways: by iterating the one-step operator
//! ([`power_apply`]) and, on the strip/quadrant/half-plane/path-cycle
//! models, through closed binomial formulas ([`power_closed`]). The two
//! must agree exactly; the oracle module adds a third, matrix-based
//! route. Diagonal regrouping on the half-plane turns `B` into a
//! generalized shift on blocks, which [`generalized_shift_apply`]
//! implements directly.

use crate::combi::binomial;
use crate::error::{Error, Result};
use crate::graph::{parents, GraphModel, Vertex};
use crate::space::{Scalar, SparseVector};
use std::collections::BTreeMap;

/// One application of the backward shift.
///
/// Dually to the defining sum over children, `B e_u = sum_{p in
/// Par(u)} e_p`, which is how a sparse vector is pushed through.
pub fn apply<S: Scalar>(model: GraphModel, vec: &SparseVector<S>) -> Result<SparseVector<S>> {
    check_model(model, vec)?;
    let mut out = SparseVector::zero(model);
    for (u, c) in vec.iter() {
        for p in parents(model, *u)? {
            out.add_assign_at(p, c.clone())?;
        }
    }
    Ok(out)
}

/// `B^n` by iterating [`apply`] `n` times.
pub fn power_apply<S: Scalar>(
    model: GraphModel,
    vec: &SparseVector<S>,
    n: u32,
) -> Result<SparseVector<S>> {
    check_model(model, vec)?;
    let mut out = vec.clone();
    for _ in 0..n {
        out = apply(model, &out)?;
    }
    Ok(out)
}

/// `B^n` through the closed formulas.
///
/// On the grid models the image of `e_{(i,j)}` is the binomial fan
/// `sum_l C(n,l) e_{(i-l, j-(n-l))}` with `l` clipped to the rows and
/// columns the model admits; on the path-with-cycle the image splits
/// by the parity of `n` into two front sums plus a plain shift of the
/// tail. The skip path and the diamond chain have no closed form here
/// and report an unsupported-model error — use [`power_apply`] or the
/// oracle for those.
pub fn power_closed<S: Scalar>(
    model: GraphModel,
    vec: &SparseVector<S>,
    n: u32,
) -> Result<SparseVector<S>> {
    check_model(model, vec)?;
    if n == 0 {
        return Ok(vec.clone());
    }
    let n_i = i64::from(n);
    let mut out = SparseVector::zero(model);
    match model {
        GraphModel::Strip { .. }
        | GraphModel::BilateralStrip { .. }
        | GraphModel::Quadrant
        | GraphModel::HalfPlane => {
            for (v, c) in vec.iter() {
                let Vertex::Grid { i, j } = *v else {
                    unreachable!("grid models admit only grid vertices");
                };
                // Row drop `l` is limited by how far up the rows go and,
                // on the unilateral models, by how far left `j` may move.
                let (lo, hi) = match model {
                    GraphModel::Strip { .. } => ((n_i - j + 1).max(0), n_i.min(i - 1)),
                    GraphModel::BilateralStrip { .. } => (0, n_i.min(i - 1)),
                    GraphModel::Quadrant => ((n_i - j).max(0), n_i.min(i)),
                    GraphModel::HalfPlane => (0, n_i.min(i)),
                    _ => unreachable!(),
                };
                for l in lo..=hi {
                    let coeff = S::from_bigint(&binomial(n as u64, l as u64));
                    out.add_assign_at(Vertex::grid(i - l, j - (n_i - l)), coeff * c.clone())?;
                }
            }
        }
        GraphModel::PathCycle => {
            // Split n = 2q-1 (odd) or n = 2q (even). The first two
            // output coordinates absorb alternating front sums; past
            // index n+2 the input shifts down by n unchanged.
            for (v, c) in vec.iter() {
                let Vertex::Node { k } = *v else {
                    unreachable!("path models admit only node vertices");
                };
                if n % 2 == 1 {
                    if k % 2 == 0 && k <= n_i + 1 {
                        out.add_assign_at(Vertex::node(1), c.clone())?;
                    }
                    if k % 2 == 1 && k <= n_i + 2 {
                        out.add_assign_at(Vertex::node(2), c.clone())?;
                    }
                } else {
                    if k % 2 == 1 && k <= n_i + 1 {
                        out.add_assign_at(Vertex::node(1), c.clone())?;
                    }
                    if k % 2 == 0 && k <= n_i + 2 {
                        out.add_assign_at(Vertex::node(2), c.clone())?;
                    }
                }
                if k >= n_i + 3 {
                    out.add_assign_at(Vertex::node(k - n_i), c.clone())?;
                }
            }
        }
        GraphModel::SkipPath | GraphModel::DiamondChain => {
            return Err(Error::UnsupportedModel {
                model,
                operation: "closed-form power",
            })
        }
    }
    Ok(out)
}

/// Restriction to a sub-model whose vertex set is closed under
/// children: bilateral strip -> strip (same row count) and half-plane
/// -> quadrant. Coefficients outside the sub-model are dropped.
///
/// Because children never leave these sub-models, restriction
/// intertwines the two shifts: `restrict(B~ f) = B restrict(f)`.
pub fn restrict<S: Scalar>(vec: &SparseVector<S>, target: GraphModel) -> Result<SparseVector<S>> {
    let source = vec.model();
    let ok = matches!(
        (source, target),
        (GraphModel::BilateralStrip { m: a }, GraphModel::Strip { m: b }) if a == b
    ) || matches!(
        (source, target),
        (GraphModel::HalfPlane, GraphModel::Quadrant)
    );
    if !ok {
        return Err(Error::domain(format!(
            "no children-closed restriction from {source} to {target}"
        )));
    }
    SparseVector::from_entries(
        target,
        vec.iter()
            .filter(|(v, _)| target.admits(**v))
            .map(|(v, c)| (*v, c.clone())),
    )
}

/// A vector regrouped along the anti-diagonals `D_k = {(i, j) : i + j
/// = k}` of the half-plane or quadrant. Block `k` stores the layer
/// coefficients `i -> f(v_{i, k-i})`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalBlocks<S> {
    model: GraphModel,
    blocks: BTreeMap<i64, BTreeMap<i64, S>>,
}

impl<S: Scalar> DiagonalBlocks<S> {
    pub fn model(&self) -> GraphModel {
        self.model
    }

    /// Diagonal indices with a nonzero block, ascending.
    pub fn diagonals(&self) -> impl Iterator<Item = i64> + '_ {
        self.blocks.keys().copied()
    }

    pub fn block(&self, k: i64) -> Option<&BTreeMap<i64, S>> {
        self.blocks.get(&k)
    }

    /// Undoes the regrouping.
    pub fn to_vector(&self) -> Result<SparseVector<S>> {
        let mut out = SparseVector::zero(self.model);
        for (k, block) in &self.blocks {
            for (i, c) in block {
                out.add_assign_at(Vertex::grid(*i, k - i), c.clone())?;
            }
        }
        Ok(out)
    }
}

/// Regroups a half-plane or quadrant vector by anti-diagonals.
pub fn diagonal_regroup<S: Scalar>(vec: &SparseVector<S>) -> Result<DiagonalBlocks<S>> {
    let model = vec.model();
    if !matches!(model, GraphModel::HalfPlane | GraphModel::Quadrant) {
        return Err(Error::UnsupportedModel {
            model,
            operation: "diagonal regrouping",
        });
    }
    let mut blocks: BTreeMap<i64, BTreeMap<i64, S>> = BTreeMap::new();
    for (v, c) in vec.iter() {
        let Vertex::Grid { i, j } = *v else {
            unreachable!("grid models admit only grid vertices");
        };
        blocks.entry(i + j).or_default().insert(i, c.clone());
    }
    Ok(DiagonalBlocks { model, blocks })
}

/// The backward shift in diagonal coordinates on the half-plane:
/// `out_k(i) = in_{k+1}(i) + in_{k+1}(i+1)`, i.e. each block is pulled
/// down one diagonal and hit with `I + B_0` in the layer variable.
///
/// Round-tripping through [`diagonal_regroup`] reproduces [`apply`]
/// exactly; the identity is pinned by tests and the acceptance suite.
pub fn generalized_shift_apply<S: Scalar>(blocks: &DiagonalBlocks<S>) -> Result<DiagonalBlocks<S>> {
    if blocks.model != GraphModel::HalfPlane {
        return Err(Error::UnsupportedModel {
            model: blocks.model,
            operation: "generalized diagonal shift",
        });
    }
    let mut out: BTreeMap<i64, BTreeMap<i64, S>> = BTreeMap::new();
    for (k, block) in &blocks.blocks {
        let target = out.entry(k - 1).or_default();
        for (i, c) in block {
            // in_k(i) shows up in out_{k-1} at layers i and i-1.
            for t in [*i, *i - 1] {
                if t < 0 {
                    continue;
                }
                let slot = target.entry(t).or_insert_with(S::zero);
                *slot = slot.clone() + c.clone();
                if slot.is_zero() {
                    target.remove(&t);
                }
            }
        }
    }
    out.retain(|_, b| !b.is_empty());
    Ok(DiagonalBlocks {
        model: blocks.model,
        blocks: out,
    })
}

fn check_model<S: Scalar>(model: GraphModel, vec: &SparseVector<S>) -> Result<()> {
    if vec.model() == model {
        Ok(())
    } else {
        Err(Error::ModelMismatch {
            expected: model,
            found: vec.model(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn unit(model: GraphModel, v: Vertex) -> SparseVector<BigRational> {
        SparseVector::unit(model, v).unwrap()
    }

    #[test]
    fn one_step_images_match_parent_sets() {
        let m = GraphModel::Strip { m: 3 };
        let b = apply(m, &unit(m, Vertex::grid(2, 2))).unwrap();
        assert_eq!(b.get(&Vertex::grid(1, 2)), rat(1));
        assert_eq!(b.get(&Vertex::grid(2, 1)), rat(1));
        assert_eq!(b.support_len(), 2);

        // The corner is a root: its basis vector dies in one step.
        assert!(apply(m, &unit(m, Vertex::grid(1, 1))).unwrap().is_zero());

        let p = GraphModel::PathCycle;
        assert_eq!(
            apply(p, &unit(p, Vertex::node(1))).unwrap(),
            unit(p, Vertex::node(2))
        );
    }

    #[test]
    fn squared_shift_on_the_two_row_strip() {
        let m = GraphModel::Strip { m: 2 };
        let b2 = power_closed(m, &unit(m, Vertex::grid(2, 2)), 2).unwrap();
        assert_eq!(b2.get(&Vertex::grid(1, 1)), rat(2));
        assert_eq!(b2.support_len(), 1);
        assert_eq!(b2, power_apply(m, &unit(m, Vertex::grid(2, 2)), 2).unwrap());
    }

    #[test]
    fn quadrant_power_counts_lattice_paths() {
        let m = GraphModel::Quadrant;
        let b2 = power_closed(m, &unit(m, Vertex::grid(1, 1)), 2).unwrap();
        assert_eq!(b2.get(&Vertex::grid(0, 0)), rat(2));
        assert_eq!(b2.support_len(), 1);

        // Away from the axes the full binomial row survives.
        let b3 = power_closed(m, &unit(m, Vertex::grid(5, 7)), 3).unwrap();
        for (l, c) in [(0, 1), (1, 3), (2, 3), (3, 1)] {
            assert_eq!(b3.get(&Vertex::grid(5 - l, 7 - (3 - l))), rat(c));
        }
    }

    #[test]
    fn closed_and_iterated_powers_agree_on_samples() {
        let cases: Vec<(GraphModel, Vertex)> = vec![
            (GraphModel::Strip { m: 4 }, Vertex::grid(3, 2)),
            (GraphModel::BilateralStrip { m: 3 }, Vertex::grid(3, -5)),
            (GraphModel::Quadrant, Vertex::grid(4, 1)),
            (GraphModel::HalfPlane, Vertex::grid(2, -2)),
            (GraphModel::PathCycle, Vertex::node(7)),
        ];
        for (model, v) in cases {
            let f = unit(model, v);
            for n in 0..=9 {
                assert_eq!(
                    power_closed(model, &f, n).unwrap(),
                    power_apply(model, &f, n).unwrap(),
                    "{model}, start {v}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn path_cycle_front_sums() {
        let m = GraphModel::PathCycle;
        let f = SparseVector::from_entries(m, (1..=6).map(|k| (Vertex::node(k), rat(k)))).unwrap();
        let b3 = power_closed(m, &f, 3).unwrap();
        // Odd power 3 = 2*2-1: evens up to 4 land on v_1, odds up to 5
        // on v_2, and f_6 shifts down to v_3.
        assert_eq!(b3.get(&Vertex::node(1)), rat(2 + 4));
        assert_eq!(b3.get(&Vertex::node(2)), rat(1 + 3 + 5));
        assert_eq!(b3.get(&Vertex::node(3)), rat(6));
        assert_eq!(b3.support_len(), 3);

        let b4 = power_closed(m, &f, 4).unwrap();
        assert_eq!(b4.get(&Vertex::node(1)), rat(1 + 3 + 5));
        assert_eq!(b4.get(&Vertex::node(2)), rat(2 + 4 + 6));
        assert_eq!(b4.support_len(), 2);
    }

    #[test]
    fn skip_path_has_no_closed_power() {
        let m = GraphModel::SkipPath;
        let f = unit(m, Vertex::node(3));
        assert!(matches!(
            power_closed(m, &f, 2),
            Err(Error::UnsupportedModel { .. })
        ));
        // The iterated route still works.
        let b = power_apply(m, &f, 1).unwrap();
        assert_eq!(b.get(&Vertex::node(1)), rat(1));
        assert_eq!(b.get(&Vertex::node(2)), rat(1));
    }

    #[test]
    fn restriction_intertwines_with_the_shift() {
        let big = GraphModel::BilateralStrip { m: 2 };
        let small = GraphModel::Strip { m: 2 };
        let f = SparseVector::from_entries(
            big,
            [
                (Vertex::grid(1, -1), rat(5)),
                (Vertex::grid(2, 1), rat(2)),
                (Vertex::grid(2, 3), rat(-1)),
            ],
        )
        .unwrap();
        let lhs = restrict(&apply(big, &f).unwrap(), small).unwrap();
        let rhs = apply(small, &restrict(&f, small).unwrap()).unwrap();
        assert_eq!(lhs, rhs);

        assert!(restrict(&f, GraphModel::Quadrant).is_err());
    }

    #[test]
    fn regrouped_shift_reproduces_the_plain_one() {
        let m = GraphModel::HalfPlane;
        let f = SparseVector::from_entries(
            m,
            [
                (Vertex::grid(1, 2), rat(1)),
                (Vertex::grid(0, -4), rat(3)),
                (Vertex::grid(5, -2), rat(-2)),
            ],
        )
        .unwrap();
        let via_blocks = generalized_shift_apply(&diagonal_regroup(&f).unwrap())
            .unwrap()
            .to_vector()
            .unwrap();
        assert_eq!(via_blocks, apply(m, &f).unwrap());
    }

    #[test]
    fn regroup_round_trips() {
        let m = GraphModel::Quadrant;
        let f = SparseVector::from_entries(
            m,
            [(Vertex::grid(0, 3), rat(2)), (Vertex::grid(2, 1), rat(7))],
        )
        .unwrap();
        let blocks = diagonal_regroup(&f).unwrap();
        assert_eq!(blocks.diagonals().collect::<Vec<_>>(), vec![3]);
        assert_eq!(blocks.to_vector().unwrap(), f);
        // The generalized shift itself is a half-plane operation.
        assert!(generalized_shift_apply(&blocks).is_err());
    }
}
