//! Eigenvector families of the shift and the region scan built on
//! them.
//!
//! On the quadrant the functions `f_{r,s}(v_{i,j}) = r^(i+2j) s^(i+j)`
//! are eigenvectors of the shift with eigenvalue `s(r^2 + r)`; on the
//! skip path the geometric vectors `f_s(v_k) = s^k` are eigenvectors
//! with eigenvalue `s(1 + s)`. Large supplies of eigenvectors with
//! eigenvalues on both sides of the unit circle are the classical
//! route to mixing, so this module provides:
//!
//! * truncated members of both families ([`eigenvector_quadrant`],
//!   [`eigenvector_skip`]);
//! * an interior residual check that validates the eigen-identity on
//!   the truncation — exactly zero in rational arithmetic
//!   ([`eigen_residual`]);
//! * a parameter-region scan that marks, for each `(r, s)` on a grid,
//!   whether `f_{r,s}` plausibly lives in the weighted space and on
//!   which side of the unit circle its eigenvalue falls
//!   ([`gs_region_scan`]).
//!
//! Eigenvectors are stored truncated with their extent recorded; all
//! downstream checks are local to the interior, so nothing needs the
//! infinite tail. Each grid point of the region scan is computed
//! independently of the others.

use crate::criteria::quadrant_mixing_test;
use crate::error::{Error, Result};
use crate::graph::{GraphModel, Vertex};
use crate::shift::apply;
use crate::space::{pow_u, Scalar, SparseVector, WeightFamily};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Which closed-form family an [`EigenPair`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenFamily {
    /// `f_{r,s}` on the quadrant, eigenvalue `s(r^2 + r)`.
    QuadrantRS,
    /// `f_s` on the skip path, eigenvalue `s(1 + s)`.
    SkipS,
}

impl EigenFamily {
    /// The graph the family's vectors live on.
    pub fn model(self) -> GraphModel {
        match self {
            EigenFamily::QuadrantRS => GraphModel::Quadrant,
            EigenFamily::SkipS => GraphModel::SkipPath,
        }
    }
}

/// A truncated eigenvector with its eigenvalue.
///
/// `lambda` always equals the closed form of the family the pair was
/// built from; `extent` is the truncation depth (`i + j <= extent` on
/// the quadrant, `k <= extent` on the skip path).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<S: Scalar> {
    pub vec: SparseVector<S>,
    pub lambda: S,
    pub extent: i64,
    pub family: EigenFamily,
}

/// The truncation of `f_{r,s}(v_{i,j}) = r^(i+2j) s^(i+j)` to the
/// diagonals `i + j <= depth`, paired with its eigenvalue
/// `s(r^2 + r)`.
///
/// `r` must be a real scalar `>= 1`; `s = 0` is rejected because the
/// vector collapses to the point mass at the origin, which is only an
/// eigenvector in the degenerate `lambda = 0` sense.
pub fn eigenvector_quadrant<S: Scalar>(r: &S, s: &S, depth: i64) -> Result<EigenPair<S>> {
    match r.as_real() {
        Some(x) if x >= 1.0 => {}
        _ => {
            return Err(Error::domain(
                "the radial parameter r must be real and >= 1",
            ))
        }
    }
    if s.is_zero() {
        return Err(Error::domain(
            "s = 0 degenerates to the point mass at the origin; not an eigen-candidate",
        ));
    }
    if depth < 0 {
        return Err(Error::domain("truncation depth must be nonnegative"));
    }
    let mut vec = SparseVector::zero(GraphModel::Quadrant);
    for d in 0..=depth {
        let s_pow = pow_u(s, d as u64);
        for i in 0..=d {
            // i + 2j = 2d - i for j = d - i.
            let coeff = pow_u(r, (2 * d - i) as u64) * s_pow.clone();
            vec.add_assign_at(Vertex::grid(i, d - i), coeff)?;
        }
    }
    let r2_plus_r = r.clone() * r.clone() + r.clone();
    Ok(EigenPair {
        vec,
        lambda: s.clone() * r2_plus_r,
        extent: depth,
        family: EigenFamily::QuadrantRS,
    })
}

/// The truncation of `f_s(v_k) = s^k` (`1 <= k <= horizon`) on the
/// skip path, paired with its eigenvalue `s(1 + s)`.
///
/// `s = -1` is allowed: it is the kernel direction, eigenvalue zero.
/// `s = 0` is rejected (the truncation would be the zero vector).
pub fn eigenvector_skip<S: Scalar>(s: &S, horizon: i64) -> Result<EigenPair<S>> {
    if s.is_zero() {
        return Err(Error::domain(
            "s = 0 gives the zero vector; not an eigen-candidate",
        ));
    }
    if horizon < 1 {
        return Err(Error::domain("truncation horizon must be at least 1"));
    }
    let mut vec = SparseVector::zero(GraphModel::SkipPath);
    for k in 1..=horizon {
        vec.add_assign_at(Vertex::node(k), pow_u(s, k as u64))?;
    }
    let lambda = s.clone() * (S::one() + s.clone());
    Ok(EigenPair {
        vec,
        lambda,
        extent: horizon,
        family: EigenFamily::SkipS,
    })
}

/// The outcome of an interior eigen-identity check.
///
/// `max_residual` is the largest `|(B f)(v) - lambda f(v)|` over the
/// interior (times `|mu_v|` when a weight family is supplied);
/// `scale` is the largest magnitude the comparison touched, so
/// [`ResidualReport::relative`] is a meaningful float-tolerance
/// quantity even when the eigenvector entries are huge or tiny.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub scale: f64,
    pub interior: usize,
}

impl ResidualReport {
    /// `max_residual / scale`, or the raw residual when nothing
    /// nonzero was scanned.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_residual / self.scale
        } else {
            self.max_residual
        }
    }
}

/// Validates the eigen-identity `B f = lambda f` on the interior of
/// the truncation: all vertices at least `margin` away from the
/// truncation edge whose full children set lies inside it.
///
/// The comparison runs in the pair's scalar type, so for exact
/// truncations of the built-in families the residual is exactly zero.
/// A weight family, if supplied, scales each vertex's residual by
/// `|mu_v|`.
pub fn eigen_residual<S: Scalar>(
    model: GraphModel,
    pair: &EigenPair<S>,
    margin: i64,
    family: Option<&WeightFamily>,
) -> Result<ResidualReport> {
    let expected = pair.family.model();
    if model != expected {
        return Err(Error::ModelMismatch {
            expected,
            found: model,
        });
    }
    if margin < 1 {
        return Err(Error::domain("interior margin must be at least 1"));
    }
    if margin > pair.extent {
        return Err(Error::domain(format!(
            "interior margin {margin} exceeds the truncation extent {}",
            pair.extent
        )));
    }
    if let Some(f) = family {
        f.validate()?;
    }

    let shifted = apply(model, &pair.vec)?;
    let interior = |v: &Vertex| -> bool {
        match (pair.family, v) {
            (EigenFamily::QuadrantRS, Vertex::Grid { i, j }) => i + j <= pair.extent - margin,
            (EigenFamily::SkipS, Vertex::Node { k }) => {
                // A node's children are k+1 and k+2, so the last two
                // nodes never have their full fan inside.
                *k <= (pair.extent - margin).min(pair.extent - 2)
            }
            _ => false,
        }
    };

    let mut report = ResidualReport {
        max_residual: 0.0,
        scale: 0.0,
        interior: 0,
    };
    let support: BTreeSet<Vertex> = pair
        .vec
        .support()
        .chain(shifted.support())
        .copied()
        .filter(interior)
        .collect();
    for v in support {
        let want = pair.lambda.clone() * pair.vec.get(&v);
        let got = shifted.get(&v);
        let weight = match family {
            Some(f) => f.eval_abs(v)?,
            None => 1.0,
        };
        let resid = (got.clone() - want.clone()).abs_f64() * weight;
        report.max_residual = report.max_residual.max(resid);
        report.scale = report
            .scale
            .max(want.abs_f64() * weight)
            .max(got.abs_f64() * weight);
        report.interior += 1;
    }
    Ok(report)
}

/// Which side of the unit circle a grid point's eigenvalue falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionTag {
    SubUnit,
    SuperUnit,
    Neutral,
}

/// One `(r, s)` grid point of [`gs_region_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub r: f64,
    pub s_re: f64,
    pub s_im: f64,
    /// Whether `|s| q_hat r^2 < 1`, the growth condition under which
    /// the truncated norms of `f_{r,s}` stabilize in the weighted
    /// space.
    pub in_norm: bool,
    pub abs_lambda: f64,
    pub tag: RegionTag,
}

/// Outcome of [`gs_region_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    /// The weight growth-rate estimate the membership test used.
    pub q_hat: f64,
    pub points: Vec<RegionPoint>,
    /// True when the scan found norm-compatible eigenvalues both
    /// inside and outside the unit circle — the configuration that
    /// makes the shift mix.
    pub mixing_evidence: bool,
}

/// Scans an `(r, s)` parameter grid for the mixing configuration: a
/// supply of eigenvectors of the shift, compatible with the weighted
/// norm, whose eigenvalues straddle the unit circle.
///
/// For each pair of grid values the scan marks membership
/// (`|s| q_hat r^2 < 1`, where `q_hat` is the diagonal growth-rate
/// estimate of the weights up to `depth`) and the side of the unit
/// circle of `lambda = s(r^2 + r)`. Each point is independent of the
/// others; empty grids produce an empty (and non-mixing) report.
pub fn gs_region_scan(
    family: &WeightFamily,
    r_grid: &[f64],
    s_grid: &[Complex64],
    depth: i64,
) -> Result<RegionReport> {
    if depth < 1 {
        return Err(Error::domain(
            "the growth-rate estimate needs a positive diagonal depth",
        ));
    }
    if r_grid.iter().any(|r| !(r.is_finite() && *r >= 1.0)) {
        return Err(Error::domain(
            "every radial grid value must be real and >= 1",
        ));
    }
    let q_hat = quadrant_mixing_test(family, depth, 0.0)?
        .limsup_estimate
        .expect("positive depth always yields a growth estimate");

    let mut points = Vec::with_capacity(r_grid.len() * s_grid.len());
    let mut sub = false;
    let mut sup = false;
    for &r in r_grid {
        for &s in s_grid {
            let abs_lambda = s.norm() * (r * r + r);
            let in_norm = s.norm() * q_hat * r * r < 1.0;
            let tag = if abs_lambda < 1.0 {
                RegionTag::SubUnit
            } else if abs_lambda > 1.0 {
                RegionTag::SuperUnit
            } else {
                RegionTag::Neutral
            };
            sub |= in_norm && tag == RegionTag::SubUnit;
            sup |= in_norm && tag == RegionTag::SuperUnit;
            points.push(RegionPoint {
                r,
                s_re: s.re,
                s_im: s.im,
                in_norm,
                abs_lambda,
                tag,
            });
        }
    }
    Ok(RegionReport {
        q_hat,
        points,
        mixing_evidence: sub && sup,
    })
}
