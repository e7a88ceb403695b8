//! Right inverses of the backward shift, and the orbit approximants
//! built from them.
//!
//! On an `m`-row strip, `B^n` has an explicit right inverse: the image
//! of `e_{(i,j)}` is a combination of basis vectors along the
//! anti-diagonal `n` steps to the right, with integer coefficients
//! `alpha_{i,s}` determined row by row from a binomial recurrence
//! ([`AlphaTable`]). On the quadrant there is no such formula for basis
//! vectors, but the diagonal family `f_a^k = sum_j a^j e_{(k-j, j)}`
//! satisfies `B f_a^k = (1+a) f_a^{k-1}`, so inverting `B^n` on a
//! diagonal slice reduces to a Vandermonde decomposition in the
//! parameters `a` ([`right_inverse_quadrant`]).
//!
//! [`hc_approximant`] chains right inverses along a sparse schedule
//! `n_1 < n_2 < ...`: the resulting vector `f = sum_k R_{n_k} g_k` has
//! `B^{n_k} f` close to `g_k` (exactly equal at the last index once
//! the gaps clear the supports), which is the finite skeleton of a
//! dense-orbit construction.

use crate::combi::binomial;
use crate::error::{Error, Result};
use crate::graph::{GraphModel, Vertex};
use crate::shift::diagonal_regroup;
use crate::space::{pow_u, Scalar, SparseVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// The coefficients `alpha_{i,s}` (rows `1 <= s <= i <= m`) of the
/// strip right inverse of `B^n`:
///
/// `R_n e_{(i,j)} = sum_s alpha_{i,s} e_{(s, i+j-s+n)}`.
///
/// Determined by `alpha_{i,i} = 1` and, for `s < i`,
/// `alpha_{i,s} = -sum_{l=1}^{i-s} C(n,l) alpha_{i-l,s}`,
/// which is exactly the condition that `B^n` maps the combination back
/// to `e_{(i,j)}` with every lower-row leak cancelled. The entries are
/// integers; they are stored as rationals because that is what the
/// serialization and the exact norm layer consume.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaTable {
    rows: u32,
    shift_power: u32,
    /// `entries[i-1][s-1] = alpha_{i,s}`, row `i-1` has length `i`.
    entries: Vec<Vec<BigRational>>,
}

impl AlphaTable {
    /// Builds the table for strips with `rows` rows and the power
    /// `B^n`, `n = shift_power`.
    pub fn build(rows: u32, shift_power: u32) -> Result<Self> {
        if rows == 0 {
            return Err(Error::domain("alpha tables need at least one row"));
        }
        let n = u64::from(shift_power);
        let mut entries: Vec<Vec<BigRational>> = Vec::with_capacity(rows as usize);
        for i in 1..=rows as usize {
            let mut row = vec![BigRational::zero(); i];
            row[i - 1] = BigRational::one();
            for s in (1..i).rev() {
                let mut acc = BigRational::zero();
                for l in 1..=(i - s) {
                    let c = BigRational::from_integer(binomial(n, l as u64));
                    acc += c * &entries[i - l - 1][s - 1];
                }
                row[s - 1] = -acc;
            }
            entries.push(row);
        }
        Ok(AlphaTable {
            rows,
            shift_power,
            entries,
        })
    }

    /// Cached variant of [`AlphaTable::build`]; the table depends only
    /// on `(rows, shift_power)` and sweeps reuse it heavily.
    pub fn cached(rows: u32, shift_power: u32) -> Result<Arc<AlphaTable>> {
        type Cache = Mutex<HashMap<(u32, u32), Arc<AlphaTable>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("alpha cache poisoned");
        if let Some(t) = guard.get(&(rows, shift_power)) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(AlphaTable::build(rows, shift_power)?);
        guard.insert((rows, shift_power), Arc::clone(&t));
        Ok(t)
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn shift_power(&self) -> u32 {
        self.shift_power
    }

    /// `alpha_{i,s}` for `1 <= s <= i <= rows`.
    pub fn entry(&self, i: u32, s: u32) -> Result<&BigRational> {
        if !(1 <= s && s <= i && i <= self.rows) {
            return Err(Error::domain(format!(
                "alpha index (i, s) = ({i}, {s}) is outside 1 <= s <= i <= {}",
                self.rows
            )));
        }
        Ok(&self.entries[(i - 1) as usize][(s - 1) as usize])
    }

    /// `max_{s <= i} |alpha_{i,s}| / n^(i-s)` over the whole table —
    /// the normalized growth measure. It stays bounded in `n` (the
    /// normalized entries approach `1/(i-s)!`), which the acceptance
    /// suite checks by exact comparison at two far-apart powers.
    pub fn normalized_max(&self) -> BigRational {
        let n = BigRational::from_integer(BigInt::from(self.shift_power.max(1)));
        let mut best = BigRational::zero();
        for (i0, row) in self.entries.iter().enumerate() {
            for (s0, a) in row.iter().enumerate() {
                let scale = pow_u(&n, (i0 - s0) as u64);
                let val = a.abs() / scale;
                if val > best {
                    best = val;
                }
            }
        }
        best
    }
}

/// The strip right inverse: `R_n` with `B^n R_n = id` on finitely
/// supported vectors over `Strip(m)` or `BilateralStrip(m)`.
///
/// Columns only move right (`j -> i + j - s + n >= j`), so the image
/// stays admissible on the unilateral strip too.
pub fn right_inverse_strip<S: Scalar>(vec: &SparseVector<S>, n: u32) -> Result<SparseVector<S>> {
    let model = vec.model();
    let Some(m) = model.strip_rows() else {
        return Err(Error::UnsupportedModel {
            model,
            operation: "strip right inverse",
        });
    };
    let table = AlphaTable::cached(m, n)?;
    let mut out = SparseVector::zero(model);
    for (v, c) in vec.iter() {
        let Vertex::Grid { i, j } = *v else {
            unreachable!("strip models admit only grid vertices");
        };
        for s in 1..=i {
            let a = table.entry(i as u32, s as u32)?;
            let target = Vertex::grid(s, i + j - s + i64::from(n));
            out.add_assign_at(target, S::from_ratio(a) * c.clone())?;
        }
    }
    Ok(out)
}

/// Pairwise distinct parameters `a_0, ..., a_{K-1}` for the quadrant's
/// diagonal basis; each must be nonzero and different from `-1` (the
/// factor `(1+a)^{-n}` must exist and the basis vectors must span).
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalBasisParams<S> {
    values: Vec<S>,
}

/// Float solves above this parameter count get an ill-conditioning
/// warning: Vandermonde systems in doubles degrade quickly.
pub const FLOAT_PARAM_WARN_LIMIT: usize = 15;

impl<S: Scalar> DiagonalBasisParams<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("at least one diagonal parameter is required"));
        }
        let minus_one = -S::one();
        for (idx, a) in values.iter().enumerate() {
            if a.is_zero() || *a == minus_one {
                return Err(Error::domain(format!(
                    "diagonal parameter #{idx} must be nonzero and different from -1"
                )));
            }
            if values[..idx].contains(a) {
                return Err(Error::domain(format!(
                    "diagonal parameters must be pairwise distinct (#{idx} repeats)"
                )));
            }
        }
        Ok(DiagonalBasisParams { values })
    }

    /// The default ladder `a_t = 1/2 + t/(2K+3)`, which lies in
    /// `[1/2, 1)`: distinct, nonzero, far from `-1`, and with `1 + a_t`
    /// comfortably away from zero.
    pub fn default_ladder(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::domain("at least one diagonal parameter is required"));
        }
        let den = BigInt::from(2 * count as i64 + 3);
        let values = (0..count)
            .map(|t| {
                let r = BigRational::new(BigInt::from(t as i64), den.clone())
                    + BigRational::new(BigInt::from(1), BigInt::from(2));
                S::from_ratio(&r)
            })
            .collect();
        DiagonalBasisParams::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }
}

/// The diagonal basis vector `f_t^k = sum_{j=0}^k a_t^j e_{(k-j, j)}`
/// on the quadrant. Satisfies `B f_t^k = (1 + a_t) f_t^{k-1}`.
pub fn diagonal_basis_vector<S: Scalar>(
    params: &DiagonalBasisParams<S>,
    t: usize,
    k: i64,
) -> Result<SparseVector<S>> {
    let a = params
        .values
        .get(t)
        .ok_or_else(|| Error::domain(format!("no diagonal parameter #{t}")))?;
    if k < 0 {
        return Err(Error::domain("diagonal index k must be >= 0"));
    }
    let mut out = SparseVector::zero(GraphModel::Quadrant);
    let mut p = S::one();
    for j in 0..=k {
        out.add_assign_at(Vertex::grid(k - j, j), p.clone())?;
        p = p * a.clone();
    }
    Ok(out)
}

/// Closed-form right inverse on a diagonal basis vector:
/// `R_n f_t^k = (1 + a_t)^{-n} f_t^{k+n}`.
pub fn right_inverse_basis_closed<S: Scalar>(
    params: &DiagonalBasisParams<S>,
    t: usize,
    k: i64,
    n: u32,
) -> Result<SparseVector<S>> {
    let a = params
        .values
        .get(t)
        .cloned()
        .ok_or_else(|| Error::domain(format!("no diagonal parameter #{t}")))?;
    let scale = S::one() / pow_u(&(S::one() + a), u64::from(n));
    Ok(diagonal_basis_vector(params, t, k + i64::from(n))?.scaled(&scale))
}

/// Right inverse of `B^n` on the quadrant.
///
/// Each anti-diagonal slice of the input (a vector of `k+1`
/// coefficients) is decomposed over the basis `f_0^k, ..., f_k^k` by
/// solving the Vandermonde system `sum_t x_t a_t^j = c_j`, and each
/// basis component is inverted by the closed form above. Requires at
/// least `k+1` parameters for every occupied diagonal `k`; pass `None`
/// to use the default ladder of exactly that size.
pub fn right_inverse_quadrant<S: Scalar>(
    vec: &SparseVector<S>,
    n: u32,
    params: Option<&DiagonalBasisParams<S>>,
) -> Result<SparseVector<S>> {
    if vec.model() != GraphModel::Quadrant {
        return Err(Error::UnsupportedModel {
            model: vec.model(),
            operation: "diagonal-basis right inverse",
        });
    }
    let mut out = SparseVector::zero(GraphModel::Quadrant);
    if vec.is_zero() {
        return Ok(out);
    }
    let blocks = diagonal_regroup(vec)?;
    let needed = blocks.diagonals().max().expect("nonzero vector") as usize + 1;
    let default_params;
    let params = match params {
        Some(p) => p,
        None => {
            default_params = DiagonalBasisParams::default_ladder(needed)?;
            &default_params
        }
    };
    if params.len() < needed {
        return Err(Error::domain(format!(
            "diagonal {} needs {needed} parameters, only {} given",
            needed - 1,
            params.len()
        )));
    }
    if !S::EXACT && params.len() > FLOAT_PARAM_WARN_LIMIT {
        log::warn!(
            "solving a {}-parameter Vandermonde system in floats; results may be ill-conditioned",
            params.len()
        );
    }

    for k in blocks.diagonals().collect::<Vec<_>>() {
        let block = blocks.block(k).expect("listed diagonal");
        let size = (k + 1) as usize;
        // c_j = f(v_{k-j, j}); the block is keyed by the row i = k - j.
        let rhs: Vec<S> = (0..size)
            .map(|j| block.get(&(k - j as i64)).cloned().unwrap_or_else(S::zero))
            .collect();
        let matrix: Vec<Vec<S>> = (0..size)
            .map(|j| {
                params.values[..size]
                    .iter()
                    .map(|a| pow_u(a, j as u64))
                    .collect()
            })
            .collect();
        let x = solve_dense(matrix, rhs)?;
        for (t, coeff) in x.into_iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let part = right_inverse_basis_closed(params, t, k, n)?.scaled(&coeff);
            out = out.add(&part)?;
        }
    }
    Ok(out)
}

/// Dense linear solve with partial pivoting. The pivot is chosen by
/// modulus; on the exact route a zero pivot (singular system) is a
/// domain error rather than a numeric accident.
pub(crate) fn solve_dense<S: Scalar>(mut mat: Vec<Vec<S>>, mut rhs: Vec<S>) -> Result<Vec<S>> {
    let size = mat.len();
    for col in 0..size {
        let pivot_row = (col..size)
            .max_by(|a, b| {
                mat[*a][col]
                    .abs_f64()
                    .partial_cmp(&mat[*b][col].abs_f64())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("nonempty range");
        if mat[pivot_row][col].is_zero() {
            return Err(Error::domain(
                "singular linear system (diagonal parameters must be pairwise distinct)",
            ));
        }
        mat.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let pivot: Vec<S> = mat[col][col..].to_vec();
        for row in col + 1..size {
            if mat[row][col].is_zero() {
                continue;
            }
            let factor = mat[row][col].clone() / pivot[0].clone();
            for (entry, p) in mat[row][col..].iter_mut().zip(&pivot) {
                *entry = entry.clone() - factor.clone() * p.clone();
            }
            rhs[row] = rhs[row].clone() - factor * rhs[col].clone();
        }
    }
    let mut x = vec![S::zero(); size];
    for col in (0..size).rev() {
        let mut acc = rhs[col].clone();
        for c in col + 1..size {
            acc = acc - mat[col][c].clone() * x[c].clone();
        }
        x[col] = acc / mat[col][col].clone();
    }
    Ok(x)
}

/// Builds the orbit approximant `f = sum_k R_{n_k} g_k` for a strictly
/// increasing schedule `n_1 < n_2 < ...` of powers and targets `g_k`.
///
/// Supported on the strip models (via [`right_inverse_strip`]) and the
/// quadrant (via [`right_inverse_quadrant`]; `params` applies there and
/// must cover the deepest diagonal of any target). `B^{n_k} f` then
/// reproduces `g_k` up to terms the later schedule entries contribute,
/// and exactly for the last entry once the gaps exceed the supports.
pub fn hc_approximant<S: Scalar>(
    model: GraphModel,
    schedule: &[(u32, SparseVector<S>)],
    params: Option<&DiagonalBasisParams<S>>,
) -> Result<SparseVector<S>> {
    if schedule.is_empty() {
        return Err(Error::domain("the approximant schedule must be nonempty"));
    }
    for w in schedule.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::domain(format!(
                "schedule powers must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
    }
    let mut out = SparseVector::zero(model);
    for (n, g) in schedule {
        if g.model() != model {
            return Err(Error::ModelMismatch {
                expected: model,
                found: g.model(),
            });
        }
        let part = match model {
            GraphModel::Strip { .. } | GraphModel::BilateralStrip { .. } => {
                right_inverse_strip(g, *n)?
            }
            GraphModel::Quadrant => right_inverse_quadrant(g, *n, params)?,
            _ => {
                return Err(Error::UnsupportedModel {
                    model,
                    operation: "orbit approximant",
                })
            }
        };
        out = out.add(&part)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::{power_apply, power_closed};
    use num_complex::Complex64;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn alpha_values_for_three_rows_power_four() {
        let t = AlphaTable::build(3, 4).unwrap();
        assert_eq!(t.entry(1, 1).unwrap(), &rat(1));
        assert_eq!(t.entry(2, 1).unwrap(), &rat(-4));
        assert_eq!(t.entry(2, 2).unwrap(), &rat(1));
        assert_eq!(t.entry(3, 1).unwrap(), &rat(10));
        assert_eq!(t.entry(3, 2).unwrap(), &rat(-4));
        assert_eq!(t.entry(3, 3).unwrap(), &rat(1));
        assert!(t.entry(4, 1).is_err());
        assert!(t.entry(2, 3).is_err());
    }

    #[test]
    fn strip_right_inverse_inverts_the_power() {
        for (m, n, i, j) in [(3u32, 4u32, 3i64, 2i64), (5, 1, 4, 1), (2, 7, 2, 3)] {
            let model = GraphModel::Strip { m };
            let e = SparseVector::<BigRational>::unit(model, Vertex::grid(i, j)).unwrap();
            let r = right_inverse_strip(&e, n).unwrap();
            assert_eq!(power_closed(model, &r, n).unwrap(), e, "m={m} n={n}");
            assert_eq!(r.support_len(), i as usize);
        }
    }

    #[test]
    fn bilateral_right_inverse_handles_negative_columns() {
        let model = GraphModel::BilateralStrip { m: 4 };
        let g = SparseVector::from_entries(
            model,
            [
                (Vertex::grid(4, -3), rat(2)),
                (Vertex::grid(1, -9), rat(-1)),
            ],
        )
        .unwrap();
        let r = right_inverse_strip(&g, 5).unwrap();
        assert_eq!(power_apply(model, &r, 5).unwrap(), g);
    }

    #[test]
    fn diagonal_basis_steps_down_with_factor_one_plus_a() {
        let params = DiagonalBasisParams::<BigRational>::default_ladder(3).unwrap();
        let f4 = diagonal_basis_vector(&params, 1, 4).unwrap();
        let stepped = power_apply(GraphModel::Quadrant, &f4, 1).unwrap();
        let a = params.values()[1].clone();
        let expected = diagonal_basis_vector(&params, 1, 3)
            .unwrap()
            .scaled(&(BigRational::one() + a));
        assert_eq!(stepped, expected);
    }

    #[test]
    fn closed_basis_inverse_round_trips() {
        let params = DiagonalBasisParams::<BigRational>::default_ladder(2).unwrap();
        let f = diagonal_basis_vector(&params, 0, 2).unwrap();
        let r = right_inverse_basis_closed(&params, 0, 2, 6).unwrap();
        assert_eq!(power_closed(GraphModel::Quadrant, &r, 6).unwrap(), f);
    }

    #[test]
    fn quadrant_right_inverse_round_trips_exactly() {
        let model = GraphModel::Quadrant;
        let g = SparseVector::from_entries(
            model,
            [
                (Vertex::grid(0, 0), rat(2)),
                (Vertex::grid(1, 2), rat(-3)),
                (Vertex::grid(2, 1), rat(5)),
            ],
        )
        .unwrap();
        let r = right_inverse_quadrant(&g, 3, None).unwrap();
        assert_eq!(power_closed(model, &r, 3).unwrap(), g);
    }

    #[test]
    fn quadrant_right_inverse_float_route_is_close() {
        let model = GraphModel::Quadrant;
        let g = SparseVector::from_entries(
            model,
            [
                (Vertex::grid(0, 1), Complex64::new(1.0, -2.0)),
                (Vertex::grid(3, 0), Complex64::new(0.5, 0.0)),
            ],
        )
        .unwrap();
        let r = right_inverse_quadrant(&g, 2, None).unwrap();
        let back = power_closed(model, &r, 2).unwrap();
        assert!(back.max_abs_diff(&g).unwrap() < 1e-10);
    }

    #[test]
    fn parameter_validation() {
        assert!(DiagonalBasisParams::new(vec![rat(1), rat(1)]).is_err());
        assert!(DiagonalBasisParams::new(vec![rat(0)]).is_err());
        assert!(DiagonalBasisParams::new(vec![rat(-1)]).is_err());
        assert!(DiagonalBasisParams::new(vec![rat(2), rat(3)]).is_ok());

        // Too few parameters for the occupied diagonal.
        let params = DiagonalBasisParams::new(vec![rat(2)]).unwrap();
        let g =
            SparseVector::<BigRational>::unit(GraphModel::Quadrant, Vertex::grid(1, 1)).unwrap();
        assert!(right_inverse_quadrant(&g, 1, Some(&params)).is_err());
    }

    #[test]
    fn approximant_hits_the_last_target_exactly() {
        let model = GraphModel::Strip { m: 2 };
        let g1 = SparseVector::<BigRational>::unit(model, Vertex::grid(1, 1)).unwrap();
        let g2 = SparseVector::from_entries(
            model,
            [(Vertex::grid(2, 1), rat(1)), (Vertex::grid(1, 2), rat(4))],
        )
        .unwrap();
        let f = hc_approximant(model, &[(2, g1.clone()), (6, g2.clone())], None).unwrap();
        // The later block's contribution under B^6 is exactly g2: the
        // earlier one, pushed 6 steps left, falls off the strip.
        assert_eq!(power_closed(model, &f, 6).unwrap(), g2);
        // At the first index the target reappears plus the later tail.
        let b2 = power_closed(model, &f, 2).unwrap();
        assert_eq!(b2.get(&Vertex::grid(1, 1)), rat(1));

        assert!(hc_approximant(model, &[(3, g1.clone()), (3, g2)], None).is_err());
        assert!(hc_approximant(
            model,
            &[],
            Option::<&DiagonalBasisParams<BigRational>>::None
        )
        .is_err());
    }

    #[test]
    fn normalized_alpha_growth_is_tame() {
        let a = AlphaTable::build(4, 50).unwrap().normalized_max();
        let b = AlphaTable::build(4, 200).unwrap().normalized_max();
        assert!(b <= a * BigRational::new(BigInt::from(21), BigInt::from(20)));
    }
}
