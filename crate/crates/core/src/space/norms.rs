//! Norms of weighted sequence spaces, and the boundedness probe for
//! the backward shift on them.

use crate::error::{Error, Result};
use crate::graph::{children, truncate, Extent, GraphModel, Vertex};
use crate::space::scalar::Scalar;
use crate::space::vector::SparseVector;
use crate::space::weights::WeightFamily;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Which sequence space a norm lives in: `lp(V, mu)` with
/// `1 <= p < inf`, or `c0(V, mu)` with the weighted sup norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "kebab-case")]
pub enum SpaceSpec {
    Lp { p: f64 },
    C0,
}

impl SpaceSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceSpec::Lp { p } if !(p.is_finite() && *p >= 1.0) => Err(Error::domain(format!(
                "lp spaces need a finite exponent p >= 1, got {p}"
            ))),
            _ => Ok(()),
        }
    }
}

/// `||f||` in the given space: `(sum_v (|f(v)| |mu_v|)^p)^(1/p)` or
/// `max_v |f(v)| |mu_v|`, computed in doubles.
///
/// Finitely supported vectors lie in every such space, so this is a
/// finite sum either way.
pub fn norm<S: Scalar>(
    vec: &SparseVector<S>,
    family: &WeightFamily,
    spec: SpaceSpec,
) -> Result<f64> {
    spec.validate()?;
    family.validate()?;
    let mut acc = 0.0f64;
    for (v, c) in vec.iter() {
        let term = c.abs_f64() * family.eval_abs(*v)?;
        match spec {
            SpaceSpec::Lp { p } => acc += term.powf(p),
            SpaceSpec::C0 => acc = acc.max(term),
        }
    }
    Ok(match spec {
        SpaceSpec::Lp { p } => acc.powf(1.0 / p),
        SpaceSpec::C0 => acc,
    })
}

/// `||f||_p^p = sum_v (|f(v)| |mu_v|)^p` as an exact rational, for
/// integer `p >= 1` and exact weights.
///
/// The power is returned (not the root) so the result stays rational;
/// compare against `bound^p` to decide a norm inequality exactly.
pub fn norm_p_power_exact(
    vec: &SparseVector<BigRational>,
    family: &WeightFamily,
    p: u32,
) -> Result<BigRational> {
    if p == 0 {
        return Err(Error::domain("norm exponent must satisfy p >= 1"));
    }
    family.validate()?;
    let mut acc = BigRational::zero();
    for (v, c) in vec.iter() {
        let term = num_traits::Signed::abs(&(c * family.eval_abs_exact(*v)?));
        acc += num_traits::Pow::pow(term, p as i32);
    }
    Ok(acc)
}

/// `max_v |f(v)| |mu_v|` as an exact rational (the `c0(mu)` norm).
pub fn sup_norm_exact(
    vec: &SparseVector<BigRational>,
    family: &WeightFamily,
) -> Result<BigRational> {
    family.validate()?;
    let mut best = BigRational::zero();
    for (v, c) in vec.iter() {
        let term = num_traits::Signed::abs(&(c * family.eval_abs_exact(*v)?));
        if term > best {
            best = term;
        }
    }
    Ok(best)
}

/// Default growth factor for declaring unbounded-evidence in
/// [`boundedness_report`].
pub const DEFAULT_GROWTH_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundednessVerdict {
    /// The per-layer ratio maxima stabilize over the window.
    BoundedEvidence,
    /// The maxima grow monotonically and exceed `growth_factor` times
    /// the first-half maximum by the end of the window.
    UnboundedEvidence,
    /// Neither pattern is clear inside the window.
    Inconclusive,
}

/// One layer of the boundedness scan: the largest vertex ratio
/// `|mu_v| / min_{u in Chi(v)} |mu_u|` with `v` in that layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerRatio {
    pub layer: i64,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    /// `sup_v |mu_v| / min_{u in Chi(v)} |mu_u|` over the scanned window —
    /// the empirical operator-norm bound (up to the out-degree constant).
    pub empirical_bound: f64,
    pub verdict: BoundednessVerdict,
    pub layers: Vec<LayerRatio>,
    pub vertices_scanned: usize,
}

fn layer_of(extent: Extent, v: Vertex) -> i64 {
    match (extent, v) {
        (Extent::Diamond { .. }, Vertex::Grid { i, j }) => i + j,
        (_, Vertex::Grid { j, .. }) => j,
        (_, Vertex::Node { k }) => k,
    }
}

/// Scans `extent` for the shift's boundedness pattern on `lp(V, mu)` /
/// `c0(V, mu)`.
///
/// For each vertex the ratio `|mu_v| / min_{u in Chi(v)} |mu_u|` is the
/// local obstruction to `||B|| < inf`: the shift is bounded exactly
/// when these ratios are uniformly bounded. The report aggregates per
/// layer (the extent's free coordinate) and classifies the tail
/// behaviour; both verdicts are evidence over a finite window, not
/// certificates. Weights must evaluate on every child of the window,
/// which may reach one step past it.
pub fn boundedness_report(
    model: GraphModel,
    family: &WeightFamily,
    extent: Extent,
    growth_factor: f64,
) -> Result<BoundednessReport> {
    if growth_factor.is_nan() || growth_factor <= 1.0 {
        return Err(Error::domain("growth factor must exceed 1"));
    }
    family.validate()?;
    let mut layers: Vec<LayerRatio> = Vec::new();
    let mut scanned = 0usize;
    for v in truncate(model, extent)? {
        let kids = children(model, v)?;
        if kids.is_empty() {
            continue;
        }
        scanned += 1;
        let mut min_child = f64::INFINITY;
        for u in kids {
            min_child = min_child.min(family.eval_abs(u)?);
        }
        let ratio = family.eval_abs(v)? / min_child;
        let layer = layer_of(extent, v);
        match layers.iter_mut().find(|l| l.layer == layer) {
            Some(l) => l.max_ratio = l.max_ratio.max(ratio),
            None => layers.push(LayerRatio {
                layer,
                max_ratio: ratio,
            }),
        }
    }
    layers.sort_by_key(|l| l.layer);
    let empirical_bound = layers.iter().map(|l| l.max_ratio).fold(0.0, f64::max);

    let verdict = if layers.len() < 3 {
        BoundednessVerdict::Inconclusive
    } else {
        let half = layers.len() / 2;
        let c_half = layers[..half]
            .iter()
            .map(|l| l.max_ratio)
            .fold(0.0, f64::max);
        let tail_monotone = layers[half..]
            .windows(2)
            .all(|w| w[1].max_ratio >= w[0].max_ratio * (1.0 - 1e-12));
        if empirical_bound <= c_half * (1.0 + 1e-9) {
            BoundednessVerdict::BoundedEvidence
        } else if tail_monotone && empirical_bound >= growth_factor * c_half {
            BoundednessVerdict::UnboundedEvidence
        } else {
            BoundednessVerdict::Inconclusive
        }
    };

    Ok(BoundednessReport {
        empirical_bound,
        verdict,
        layers,
        vertices_scanned: scanned,
    })
}
