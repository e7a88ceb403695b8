//! Directed lattice graphs on which the backward shift acts.
//!
//! Every model is an infinite (or semi-infinite) directed graph with
//! uniformly bounded out-degree. Grid models live on integer pairs
//! `(i, j)`; path models live on integers `k >= 1`. Edges always move
//! "forward" (increase `j`, increase `i`, or advance along the path),
//! except for the single back edge of [`GraphModel::PathCycle`].
//!
//! The children/parents maps here are the single source of truth for
//! the edge sets; closed-form operator powers elsewhere in the crate
//! are tested against iterated application of these maps.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// A vertex of a lattice model: a grid point `(i, j)` or a path node `k`.
///
/// The coordinate shape is part of the value so that serialized vectors
/// are self-describing; whether a vertex actually belongs to a given
/// model is a separate admissibility check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Vertex {
    /// Two-dimensional vertex `(i, j)` of a strip, quadrant, half-plane
    /// or diamond-chain model.
    Grid { i: i64, j: i64 },
    /// One-dimensional vertex `v_k` of a path model.
    Node { k: i64 },
}

impl Vertex {
    pub fn grid(i: i64, j: i64) -> Self {
        Vertex::Grid { i, j }
    }

    pub fn node(k: i64) -> Self {
        Vertex::Node { k }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Grid { i, j } => write!(f, "v({i},{j})"),
            Vertex::Node { k } => write!(f, "v({k})"),
        }
    }
}

/// The supported lattice models.
///
/// * `Strip(m)`: rows `1 <= i <= m`, columns `j >= 1`; edges step right
///   `(i,j) -> (i,j+1)` and down `(i,j) -> (i+1,j)`.
/// * `BilateralStrip(m)`: the same rows with `j` ranging over all
///   integers.
/// * `Quadrant`: grid points `i >= 0`, `j >= 0` with the same two steps.
/// * `HalfPlane`: rows `i >= 0`, `j` over all integers.
/// * `PathCycle`: the path `v_1 -> v_2 -> v_3 -> ...` with one extra
///   back edge `v_2 -> v_1`.
/// * `SkipPath`: nodes `k >= 1` with edges to both `k+1` and `k+2`.
/// * `DiamondChain`: the chain of diamonds `{(1,1),(1,2)} ∪ {(i,i-1),
///   (i,i),(i,i+1) : i >= 2}` with the grid steps restricted to it, so
///   each centre `(i,i)` fans out to `(i,i+1)` and `(i+1,i)` and both
///   feed the next centre `(i+1,i+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphModel {
    Strip { m: u32 },
    BilateralStrip { m: u32 },
    Quadrant,
    HalfPlane,
    PathCycle,
    SkipPath,
    DiamondChain,
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphModel::Strip { m } => write!(f, "strip({m})"),
            GraphModel::BilateralStrip { m } => write!(f, "bilateral-strip({m})"),
            GraphModel::Quadrant => write!(f, "quadrant"),
            GraphModel::HalfPlane => write!(f, "half-plane"),
            GraphModel::PathCycle => write!(f, "path-cycle"),
            GraphModel::SkipPath => write!(f, "skip-path"),
            GraphModel::DiamondChain => write!(f, "diamond-chain"),
        }
    }
}

impl GraphModel {
    /// Row count for strip models; `None` elsewhere.
    pub fn strip_rows(&self) -> Option<u32> {
        match self {
            GraphModel::Strip { m } | GraphModel::BilateralStrip { m } => Some(*m),
            _ => None,
        }
    }

    /// Whether coordinates extend to `-inf` in the `j` direction.
    pub fn is_bilateral(&self) -> bool {
        matches!(
            self,
            GraphModel::BilateralStrip { .. } | GraphModel::HalfPlane
        )
    }

    /// Whether `v` is a vertex of this model.
    pub fn admits(&self, v: Vertex) -> bool {
        match (self, v) {
            (GraphModel::Strip { m }, Vertex::Grid { i, j }) => {
                1 <= i && i <= i64::from(*m) && j >= 1
            }
            (GraphModel::BilateralStrip { m }, Vertex::Grid { i, j: _ }) => {
                1 <= i && i <= i64::from(*m)
            }
            (GraphModel::Quadrant, Vertex::Grid { i, j }) => i >= 0 && j >= 0,
            (GraphModel::HalfPlane, Vertex::Grid { i, j: _ }) => i >= 0,
            (GraphModel::PathCycle | GraphModel::SkipPath, Vertex::Node { k }) => k >= 1,
            (GraphModel::DiamondChain, Vertex::Grid { i, j }) => {
                (i == 1 && (j == 1 || j == 2)) || (i >= 2 && (j - i).abs() <= 1)
            }
            _ => false,
        }
    }

    /// Admissibility as a `Result`, for precondition checks.
    pub fn check_admissible(&self, v: Vertex) -> Result<()> {
        if self.admits(v) {
            Ok(())
        } else {
            Err(Error::InadmissibleVertex {
                model: *self,
                vertex: v,
            })
        }
    }

    /// Validates model parameters (`m >= 1` for strips).
    pub fn validate(&self) -> Result<()> {
        match self {
            GraphModel::Strip { m } | GraphModel::BilateralStrip { m } if *m == 0 => {
                Err(Error::domain("strip models need at least one row (m >= 1)"))
            }
            _ => Ok(()),
        }
    }
}

/// Children `Chi(v)`: the heads of the edges leaving `v`, sorted.
///
/// Grid models all share the two candidate steps `(i, j+1)` and
/// `(i+1, j)`, filtered by admissibility; for the diamond chain this
/// filter is exactly what produces the fan-out/fan-in pattern.
pub fn children(model: GraphModel, v: Vertex) -> Result<Vec<Vertex>> {
    model.check_admissible(v)?;
    let out = match (model, v) {
        (GraphModel::PathCycle, Vertex::Node { k }) => {
            if k == 2 {
                vec![Vertex::node(1), Vertex::node(3)]
            } else {
                vec![Vertex::node(k + 1)]
            }
        }
        (GraphModel::SkipPath, Vertex::Node { k }) => {
            vec![Vertex::node(k + 1), Vertex::node(k + 2)]
        }
        (_, Vertex::Grid { i, j }) => {
            let mut out: Vec<Vertex> = [Vertex::grid(i, j + 1), Vertex::grid(i + 1, j)]
                .into_iter()
                .filter(|u| model.admits(*u))
                .collect();
            out.sort();
            out
        }
        _ => unreachable!("admissibility rules out mismatched coordinate shapes"),
    };
    Ok(out)
}

/// Parents `Par(v)`: the tails of the edges entering `v`, sorted.
pub fn parents(model: GraphModel, v: Vertex) -> Result<Vec<Vertex>> {
    model.check_admissible(v)?;
    let out = match (model, v) {
        (GraphModel::PathCycle, Vertex::Node { k }) => match k {
            1 => vec![Vertex::node(2)],
            2 => vec![Vertex::node(1)],
            _ => vec![Vertex::node(k - 1)],
        },
        (GraphModel::SkipPath, Vertex::Node { k }) => {
            let mut out: Vec<Vertex> = [k - 2, k - 1]
                .into_iter()
                .filter(|p| *p >= 1)
                .map(Vertex::node)
                .collect();
            out.sort();
            out
        }
        (_, Vertex::Grid { i, j }) => {
            let mut out: Vec<Vertex> = [Vertex::grid(i, j - 1), Vertex::grid(i - 1, j)]
                .into_iter()
                .filter(|u| model.admits(*u))
                .collect();
            out.sort();
            out
        }
        _ => unreachable!("admissibility rules out mismatched coordinate shapes"),
    };
    Ok(out)
}

/// `n`-th generation children `Chi^n(v)`, by iterating [`children`].
///
/// `n = 0` returns `{v}`. On `Strip(m)` the result agrees with the
/// closed form `{(i+t, j+n-t) : 0 <= t <= min(n, m-i)}`, which the
/// tests pin down.
pub fn children_n(model: GraphModel, v: Vertex, n: u32) -> Result<BTreeSet<Vertex>> {
    model.check_admissible(v)?;
    let mut front = BTreeSet::from([v]);
    for _ in 0..n {
        let mut next = BTreeSet::new();
        for u in &front {
            next.extend(children(model, *u)?);
        }
        front = next;
    }
    Ok(front)
}

/// A finite truncation window, used by the dense oracle, the
/// boundedness scan and the structural-obstruction search.
///
/// Which shapes make sense depends on the model: `Band` bounds the
/// free coordinate of strip and path models, `Diamond` bounds `i + j`
/// on the quadrant and the diamond chain, and `Rect` is the box
/// `0 <= i <= i_max`, `lo <= j <= hi` on the half-plane (also accepted
/// on the quadrant, intersected with `j >= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Extent {
    /// `lo <= j <= hi` on strips, `lo <= k <= hi` on paths.
    Band { lo: i64, hi: i64 },
    /// `i + j <= depth`.
    Diamond { depth: i64 },
    /// `0 <= i <= i_max` and `lo <= j <= hi`.
    Rect { i_max: i64, lo: i64, hi: i64 },
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extent::Band { lo, hi } => write!(f, "band {lo}..{hi}"),
            Extent::Diamond { depth } => write!(f, "diamond depth {depth}"),
            Extent::Rect { i_max, lo, hi } => write!(f, "rect i<={i_max}, j in {lo}..{hi}"),
        }
    }
}

/// All admissible vertices inside `extent`, in row-major order
/// (ascending `(i, j)`, or ascending `k`).
///
/// Empty windows yield empty vectors; an extent shape that does not
/// fit the model is a domain error.
pub fn truncate(model: GraphModel, extent: Extent) -> Result<Vec<Vertex>> {
    model.validate()?;
    let mut out = Vec::new();
    match (model, extent) {
        (GraphModel::Strip { m } | GraphModel::BilateralStrip { m }, Extent::Band { lo, hi }) => {
            let lo = if matches!(model, GraphModel::Strip { .. }) {
                lo.max(1)
            } else {
                lo
            };
            for i in 1..=i64::from(m) {
                for j in lo..=hi {
                    out.push(Vertex::grid(i, j));
                }
            }
        }
        (GraphModel::PathCycle | GraphModel::SkipPath, Extent::Band { lo, hi }) => {
            for k in lo.max(1)..=hi {
                out.push(Vertex::node(k));
            }
        }
        (GraphModel::Quadrant, Extent::Diamond { depth }) => {
            for i in 0..=depth {
                for j in 0..=depth - i {
                    out.push(Vertex::grid(i, j));
                }
            }
        }
        (GraphModel::Quadrant, Extent::Rect { i_max, lo, hi }) => {
            for i in 0..=i_max {
                for j in lo.max(0)..=hi {
                    out.push(Vertex::grid(i, j));
                }
            }
        }
        (GraphModel::HalfPlane, Extent::Rect { i_max, lo, hi }) => {
            for i in 0..=i_max {
                for j in lo..=hi {
                    out.push(Vertex::grid(i, j));
                }
            }
        }
        (GraphModel::DiamondChain, Extent::Diamond { depth }) => {
            for v in [Vertex::grid(1, 1), Vertex::grid(1, 2)] {
                if let Vertex::Grid { i, j } = v {
                    if i + j <= depth {
                        out.push(v);
                    }
                }
            }
            let mut i = 2;
            while 2 * i - 1 <= depth {
                for j in [i - 1, i, i + 1] {
                    if i + j <= depth {
                        out.push(Vertex::grid(i, j));
                    }
                }
                i += 1;
            }
        }
        (model, extent) => {
            return Err(Error::domain(format!(
                "extent `{extent}` does not apply to {model}"
            )))
        }
    }
    Ok(out)
}

/// Searches `extent` for a one-step bottleneck: a vertex `v` with more
/// than one parent whose parents have no children besides `v`.
///
/// Such a vertex forces `dim ker B >= 1` on every space over the model
/// (the parent difference `e_p - e_q` maps to zero even though `B` is
/// "onto" the fan-in), so it rules the backward shift out of any
/// transitivity-type property regardless of weights. Returns the first
/// witness in enumeration order, or `None` if the window has none.
pub fn structural_obstruction(model: GraphModel, extent: Extent) -> Result<Option<Vertex>> {
    for v in truncate(model, extent)? {
        let ps = parents(model, v)?;
        if ps.len() < 2 {
            continue;
        }
        let mut fan_out = BTreeSet::new();
        for p in &ps {
            fan_out.extend(children(model, *p)?);
        }
        if fan_out.len() == 1 && fan_out.contains(&v) {
            return Ok(Some(v));
        }
    }
    Ok(None)
}
