//! Brute-force ground truth: the shift as a dense truncated matrix.
//!
//! Every closed-form power and right-inverse computation in the crate
//! is cross-checked against this module, which knows nothing about
//! closed forms: it assembles the 0/1 adjacency of the truncated graph
//! and multiplies. [`equivalence_check`] packages the comparison,
//! enlarging the truncation first so the matrix route suffers no
//! boundary effects.
//!
//! The matrix is stored as packed bit rows (the only possible entries
//! are 0 and 1), and instance sizes are capped: the oracle exists for
//! small-instance ground truth, not for performance work. Instances
//! are independent of each other; each build and apply is
//! single-threaded.

use crate::error::{Error, Result};
use crate::graph::{children, truncate, Extent, GraphModel, Vertex};
use crate::shift::{power_apply, power_closed};
use crate::space::{Scalar, SparseVector};
use std::collections::BTreeMap;

/// Largest vertex count the dense representation accepts.
pub const MAX_ORACLE_VERTICES: usize = 20_000;

/// The shift restricted to a finite box, as a dense 0/1 matrix over
/// the box's vertex list: entry `(row u, col v)` is set iff
/// `v ∈ children(u)` and both endpoints lie in the box.
///
/// For every built-in model without cycles the matrix is nilpotent —
/// repeated application drains any vector to zero within the box
/// diameter.
#[derive(Debug, Clone)]
pub struct TruncatedMatrix {
    model: GraphModel,
    extent: Extent,
    verts: Vec<Vertex>,
    index: BTreeMap<Vertex, usize>,
    /// Row-major packed bits; each row holds `words_per_row` u64s.
    bits: Vec<u64>,
    words_per_row: usize,
}

impl TruncatedMatrix {
    pub fn model(&self) -> GraphModel {
        self.model
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    /// The box's vertices in the deterministic truncation order that
    /// indexes the rows and columns.
    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// The 0/1 entry at (row, col).
    pub fn entry(&self, row: usize, col: usize) -> bool {
        let word = self.bits[row * self.words_per_row + col / 64];
        word >> (col % 64) & 1 == 1
    }

    fn set(&mut self, row: usize, col: usize) {
        self.bits[row * self.words_per_row + col / 64] |= 1 << (col % 64);
    }

    /// One matrix-vector product in the scalar type of `values`.
    fn apply_once<S: Scalar>(&self, values: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.len()];
        for (row, acc) in out.iter_mut().enumerate() {
            let words = &self.bits[row * self.words_per_row..(row + 1) * self.words_per_row];
            for (w, &word) in words.iter().enumerate() {
                let mut rest = word;
                while rest != 0 {
                    let col = w * 64 + rest.trailing_zeros() as usize;
                    *acc = acc.clone() + values[col].clone();
                    rest &= rest - 1;
                }
            }
        }
        out
    }
}

/// Assembles the dense truncated shift matrix over the given box.
///
/// The vertex order is the truncation order, so the matrix is
/// reproducible; boxes larger than [`MAX_ORACLE_VERTICES`] are
/// refused.
pub fn truncated_matrix(model: GraphModel, extent: Extent) -> Result<TruncatedMatrix> {
    let verts = truncate(model, extent)?;
    if verts.len() > MAX_ORACLE_VERTICES {
        return Err(Error::domain(format!(
            "truncation holds {} vertices; the dense oracle is capped at {MAX_ORACLE_VERTICES}",
            verts.len()
        )));
    }
    let index: BTreeMap<Vertex, usize> = verts.iter().enumerate().map(|(n, &v)| (v, n)).collect();
    let words_per_row = verts.len().div_ceil(64);
    let mut mat = TruncatedMatrix {
        model,
        extent,
        bits: vec![0; verts.len() * words_per_row],
        words_per_row,
        verts,
        index,
    };
    for row in 0..mat.len() {
        for child in children(model, mat.verts[row])? {
            if let Some(&col) = mat.index.get(&child) {
                mat.set(row, col);
            }
        }
    }
    Ok(mat)
}

/// `mat^n · vec`, computed by `n` blind matrix-vector products.
///
/// The vector's support must lie inside the box (anything else would
/// silently truncate), and its model must match the matrix's.
pub fn matrix_power_apply<S: Scalar>(
    mat: &TruncatedMatrix,
    vec: &SparseVector<S>,
    n: u32,
) -> Result<SparseVector<S>> {
    if vec.model() != mat.model {
        return Err(Error::ModelMismatch {
            expected: mat.model,
            found: vec.model(),
        });
    }
    let mut values = vec![S::zero(); mat.len()];
    for (v, c) in vec.iter() {
        match mat.index.get(v) {
            Some(&idx) => values[idx] = c.clone(),
            None => {
                return Err(Error::domain(format!(
                    "support vertex {v} escapes the oracle truncation"
                )))
            }
        }
    }
    for _ in 0..n {
        values = mat.apply_once(&values);
    }
    SparseVector::from_entries(
        mat.model,
        mat.verts
            .iter()
            .zip(values)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&v, c)| (v, c)),
    )
}

/// Grows a box far enough that `n` applications of the shift to a
/// vector supported inside the original box never touch the boundary:
/// the support of `B^t f` can march `n` steps toward smaller column
/// indices (and, on the path with the cycle, climb from node 1 back
/// up to node 2), so the box is padded by `n` on both band ends.
fn enlarge(extent: Extent, n: u32) -> Extent {
    let n = i64::from(n);
    match extent {
        Extent::Band { lo, hi } => Extent::Band {
            lo: lo - n,
            hi: hi + n,
        },
        Extent::Rect { i_max, lo, hi } => Extent::Rect {
            i_max,
            lo: lo - n,
            hi: hi + n,
        },
        // Diagonal boxes are closed under the shift's support motion.
        Extent::Diamond { depth } => Extent::Diamond { depth },
    }
}

/// Max absolute deviation between the matrix route and the closed
/// form for `B^n vec` (falling back to iterated application on models
/// without closed powers). Exact arithmetic is expected to return 0.
pub fn equivalence_check<S: Scalar>(
    model: GraphModel,
    vec: &SparseVector<S>,
    n: u32,
    extent: Extent,
) -> Result<f64> {
    let mat = truncated_matrix(model, enlarge(extent, n))?;
    let brute = matrix_power_apply(&mat, vec, n)?;
    let reference = match power_closed(model, vec, n) {
        Ok(closed) => closed,
        Err(Error::UnsupportedModel { .. }) => power_apply(model, vec, n)?,
        Err(e) => return Err(e),
    };
    brute.max_abs_diff(&reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn ones(model: GraphModel, extent: Extent) -> SparseVector<BigRational> {
        SparseVector::from_entries(
            model,
            truncate(model, extent)
                .unwrap()
                .into_iter()
                .map(|v| (v, rat(1))),
        )
        .unwrap()
    }

    #[test]
    fn single_row_strip_is_the_superdiagonal() {
        let mat =
            truncated_matrix(GraphModel::Strip { m: 1 }, Extent::Band { lo: 1, hi: 3 }).unwrap();
        assert_eq!(mat.len(), 3);
        for row in 0..3 {
            for col in 0..3 {
                assert_eq!(mat.entry(row, col), col == row + 1);
            }
        }
    }

    #[test]
    fn quadrant_origin_row_has_two_children() {
        let mat = truncated_matrix(GraphModel::Quadrant, Extent::Diamond { depth: 1 }).unwrap();
        let idx = |i, j| {
            mat.vertices()
                .iter()
                .position(|&v| v == Vertex::grid(i, j))
                .unwrap()
        };
        let origin = idx(0, 0);
        assert!(mat.entry(origin, idx(0, 1)));
        assert!(mat.entry(origin, idx(1, 0)));
        assert!(!mat.entry(origin, origin));
    }

    #[test]
    fn path_cycle_row_two_reads_nodes_one_and_three() {
        let mat = truncated_matrix(GraphModel::PathCycle, Extent::Band { lo: 1, hi: 4 }).unwrap();
        let idx = |k: i64| {
            mat.vertices()
                .iter()
                .position(|&v| v == Vertex::node(k))
                .unwrap()
        };
        assert!(mat.entry(idx(2), idx(1)));
        assert!(mat.entry(idx(2), idx(3)));
        assert!(!mat.entry(idx(2), idx(4)));
        // Ordinary nodes read only their successor.
        assert!(mat.entry(idx(1), idx(2)));
        assert!(mat.entry(idx(3), idx(4)));
        assert!(!mat.entry(idx(3), idx(1)));
    }

    #[test]
    fn power_apply_basics() {
        let model = GraphModel::Strip { m: 1 };
        let mat = truncated_matrix(model, Extent::Band { lo: 1, hi: 5 }).unwrap();
        let e3: SparseVector<BigRational> = SparseVector::unit(model, Vertex::grid(1, 3)).unwrap();
        let same = matrix_power_apply(&mat, &e3, 0).unwrap();
        assert_eq!(same, e3);
        let moved = matrix_power_apply(&mat, &e3, 2).unwrap();
        assert_eq!(
            moved,
            SparseVector::unit(model, Vertex::grid(1, 1)).unwrap()
        );
    }

    #[test]
    fn quadrant_fan_collapses_to_the_origin() {
        let mat = truncated_matrix(GraphModel::Quadrant, Extent::Diamond { depth: 4 }).unwrap();
        let e11: SparseVector<BigRational> =
            SparseVector::unit(GraphModel::Quadrant, Vertex::grid(1, 1)).unwrap();
        let out = matrix_power_apply(&mat, &e11, 2).unwrap();
        assert_eq!(out.support_len(), 1);
        assert_eq!(out.get(&Vertex::grid(0, 0)), rat(2));
    }

    #[test]
    fn support_outside_the_box_is_refused() {
        let model = GraphModel::Strip { m: 2 };
        let mat = truncated_matrix(model, Extent::Band { lo: 1, hi: 4 }).unwrap();
        let far: SparseVector<BigRational> = SparseVector::unit(model, Vertex::grid(1, 9)).unwrap();
        assert!(matrix_power_apply(&mat, &far, 1).is_err());
        let wrong_model: SparseVector<BigRational> =
            SparseVector::unit(GraphModel::Quadrant, Vertex::grid(0, 1)).unwrap();
        assert!(matches!(
            matrix_power_apply(&mat, &wrong_model, 1),
            Err(Error::ModelMismatch { .. })
        ));
    }

    #[test]
    fn oversized_boxes_are_refused() {
        let err = truncated_matrix(
            GraphModel::BilateralStrip { m: 60 },
            Extent::Band { lo: -200, hi: 200 },
        );
        assert!(err.is_err());
    }

    #[test]
    fn deep_quadrant_delta_lands_on_the_central_binomial() {
        let e55: SparseVector<BigRational> =
            SparseVector::unit(GraphModel::Quadrant, Vertex::grid(5, 5)).unwrap();
        let dev = equivalence_check(
            GraphModel::Quadrant,
            &e55,
            10,
            Extent::Diamond { depth: 12 },
        )
        .unwrap();
        assert_eq!(dev, 0.0);
        // The only surviving term is the origin with coefficient 252.
        let mat = truncated_matrix(GraphModel::Quadrant, Extent::Diamond { depth: 12 }).unwrap();
        let out = matrix_power_apply(&mat, &e55, 10).unwrap();
        assert_eq!(out.support_len(), 1);
        assert_eq!(out.get(&Vertex::grid(0, 0)), rat(252));
    }

    #[test]
    fn equivalence_on_strips_paths_and_planes() {
        // A deterministic spread-out vector on each model; randomized
        // sweeps live in the integration suites.
        let strip = GraphModel::Strip { m: 3 };
        let f = SparseVector::from_entries(
            strip,
            (1..=3i64).flat_map(|i| (1..=9i64).map(move |j| (Vertex::grid(i, j), rat(i * 10 + j)))),
        )
        .unwrap();
        assert_eq!(
            equivalence_check(strip, &f, 7, Extent::Band { lo: 1, hi: 9 }).unwrap(),
            0.0
        );

        let bilateral = GraphModel::BilateralStrip { m: 2 };
        let f = SparseVector::from_entries(
            bilateral,
            (1..=2i64).flat_map(|i| (-4..=4i64).map(move |j| (Vertex::grid(i, j), rat(i + j)))),
        )
        .unwrap();
        assert_eq!(
            equivalence_check(bilateral, &f, 5, Extent::Band { lo: -4, hi: 4 }).unwrap(),
            0.0
        );

        let cycle = GraphModel::PathCycle;
        let f = SparseVector::from_entries(cycle, (1..=8i64).map(|k| (Vertex::node(k), rat(k))))
            .unwrap();
        for n in [1u32, 3, 6] {
            assert_eq!(
                equivalence_check(cycle, &f, n, Extent::Band { lo: 1, hi: 8 }).unwrap(),
                0.0
            );
        }

        // No closed power on the skip path: the check falls back to
        // iterated application and still agrees.
        let skip = GraphModel::SkipPath;
        let f =
            SparseVector::from_entries(skip, (1..=10i64).map(|k| (Vertex::node(k), rat(11 - k))))
                .unwrap();
        assert_eq!(
            equivalence_check(skip, &f, 4, Extent::Band { lo: 1, hi: 10 }).unwrap(),
            0.0
        );

        let half = GraphModel::HalfPlane;
        let f = SparseVector::from_entries(
            half,
            (0..=2i64).flat_map(|i| (-3..=3i64).map(move |j| (Vertex::grid(i, j), rat(2 * i - j)))),
        )
        .unwrap();
        assert_eq!(
            equivalence_check(
                half,
                &f,
                6,
                Extent::Rect {
                    i_max: 2,
                    lo: -3,
                    hi: 3
                }
            )
            .unwrap(),
            0.0
        );
    }

    #[test]
    fn acyclic_truncations_are_nilpotent() {
        let cases = [
            (GraphModel::Strip { m: 2 }, Extent::Band { lo: 1, hi: 6 }),
            (
                GraphModel::BilateralStrip { m: 2 },
                Extent::Band { lo: -3, hi: 3 },
            ),
            (GraphModel::Quadrant, Extent::Diamond { depth: 5 }),
            (
                GraphModel::HalfPlane,
                Extent::Rect {
                    i_max: 3,
                    lo: -3,
                    hi: 3,
                },
            ),
            (GraphModel::SkipPath, Extent::Band { lo: 1, hi: 8 }),
            (GraphModel::DiamondChain, Extent::Diamond { depth: 7 }),
        ];
        for (model, extent) in cases {
            let mat = truncated_matrix(model, extent).unwrap();
            let drained = matrix_power_apply(&mat, &ones(model, extent), mat.len() as u32).unwrap();
            assert!(drained.is_zero(), "{model} truncation failed to drain");
        }

        // The path with the cycle is the exception: mass circulates
        // between the first two nodes forever.
        let model = GraphModel::PathCycle;
        let extent = Extent::Band { lo: 1, hi: 6 };
        let mat = truncated_matrix(model, extent).unwrap();
        let alive = matrix_power_apply(&mat, &ones(model, extent), mat.len() as u32).unwrap();
        assert!(!alive.is_zero());
    }
}
