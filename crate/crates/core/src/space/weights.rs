//! Weight families: the functions `mu: V -> C \ {0}` that define the
//! weighted sequence spaces.
//!
//! A family is a closed-form rule (constant, geometric in `j`,
//! geometric in `i + j`, polynomial decay in `j`), a per-layer table
//! keyed by the first coordinate, or an explicit per-vertex table. All
//! evaluation goes through [`WeightFamily::eval`], which returns either
//! an exact rational or a complex double — the caller's scalar route
//! decides which one it can accept.

use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::space::scalar::pow_i;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A real family parameter: an exact rational or a double.
///
/// JSON form: exact values are strings (`"3/2"`, `"-7"`), approximate
/// values are numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamRepr", into = "ParamRepr")]
pub enum Param {
    Exact(BigRational),
    Approx(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ParamRepr {
    Text(String),
    Number(f64),
}

impl From<Param> for ParamRepr {
    fn from(p: Param) -> Self {
        match p {
            Param::Exact(r) => ParamRepr::Text(format_ratio(&r)),
            Param::Approx(x) => ParamRepr::Number(x),
        }
    }
}

impl TryFrom<ParamRepr> for Param {
    type Error = String;

    fn try_from(repr: ParamRepr) -> std::result::Result<Self, String> {
        match repr {
            ParamRepr::Text(s) => parse_ratio(&s).map(Param::Exact).map_err(|e| e.to_string()),
            ParamRepr::Number(x) => Ok(Param::Approx(x)),
        }
    }
}

/// Renders a rational as `num/den` (or just `num` for integers).
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `num` or `num/den` into a rational.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::parse(format!("`{s}` is not a rational (expected num or num/den)"));
    let mut parts = s.splitn(2, '/');
    let numer: BigInt = parts
        .next()
        .ok_or_else(bad)?
        .trim()
        .parse()
        .map_err(|_| bad())?;
    let denom: BigInt = match parts.next() {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::from(1),
    };
    if denom.is_zero() {
        return Err(Error::parse(format!("`{s}` has a zero denominator")));
    }
    Ok(BigRational::new(numer, denom))
}

impl Param {
    pub fn is_zero(&self) -> bool {
        match self {
            Param::Exact(r) => r.is_zero(),
            Param::Approx(x) => *x == 0.0,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Param::Exact(r) => r.to_f64().unwrap_or(f64::INFINITY),
            Param::Approx(x) => *x,
        }
    }

    /// Exact value, if this parameter carries one.
    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Param::Exact(r) => Some(r),
            Param::Approx(_) => None,
        }
    }

    /// `self^e`, staying on the exact route when possible. Negative
    /// exponents require a nonzero base (family validation enforces it).
    pub fn pow(&self, e: i64) -> WeightValue {
        match self {
            Param::Exact(r) => WeightValue::Exact(pow_i(r, e)),
            Param::Approx(x) => {
                let p = if e.unsigned_abs() <= i32::MAX as u64 {
                    x.powi(e as i32)
                } else {
                    x.powf(e as f64)
                };
                WeightValue::Approx(Complex64::new(p, 0.0))
            }
        }
    }

    pub fn to_value(&self) -> WeightValue {
        match self {
            Param::Exact(r) => WeightValue::Exact(r.clone()),
            Param::Approx(x) => WeightValue::Approx(Complex64::new(*x, 0.0)),
        }
    }
}

/// An evaluated weight `mu_v`: exact rational or complex double.
///
/// JSON form: exact values are strings, approximate values are
/// `{"re": .., "im": ..}` objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ValueRepr", into = "ValueRepr")]
pub enum WeightValue {
    Exact(BigRational),
    Approx(Complex64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueRepr {
    Text(String),
    Complex { re: f64, im: f64 },
}

impl From<WeightValue> for ValueRepr {
    fn from(v: WeightValue) -> Self {
        match v {
            WeightValue::Exact(r) => ValueRepr::Text(format_ratio(&r)),
            WeightValue::Approx(z) => ValueRepr::Complex { re: z.re, im: z.im },
        }
    }
}

impl TryFrom<ValueRepr> for WeightValue {
    type Error = String;

    fn try_from(repr: ValueRepr) -> std::result::Result<Self, String> {
        match repr {
            ValueRepr::Text(s) => parse_ratio(&s)
                .map(WeightValue::Exact)
                .map_err(|e| e.to_string()),
            ValueRepr::Complex { re, im } => Ok(WeightValue::Approx(Complex64::new(re, im))),
        }
    }
}

impl WeightValue {
    pub fn is_zero(&self) -> bool {
        match self {
            WeightValue::Exact(r) => r.is_zero(),
            WeightValue::Approx(z) => z.is_zero(),
        }
    }

    /// Modulus as a double.
    pub fn abs_f64(&self) -> f64 {
        match self {
            WeightValue::Exact(r) => r.abs().to_f64().unwrap_or(f64::INFINITY),
            WeightValue::Approx(z) => z.norm(),
        }
    }

    /// Exact modulus, available only on the exact route.
    pub fn abs_exact(&self) -> Result<BigRational> {
        match self {
            WeightValue::Exact(r) => Ok(r.abs()),
            WeightValue::Approx(_) => Err(Error::domain(
                "exact computation requested but the weight family evaluates to floats",
            )),
        }
    }
}

impl fmt::Display for WeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightValue::Exact(r) => write!(f, "{}", format_ratio(r)),
            WeightValue::Approx(z) => write!(f, "{}+{}i", z.re, z.im),
        }
    }
}

/// A layer-indexed weight list `mu_layer`, with a rule for layers past
/// the end of the list. The layer of a grid vertex is its first
/// coordinate `i`; the layer of a path node is its index `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerWeights {
    pub values: Vec<WeightValue>,
    pub tail: LayerTail,
}

/// What a layer lookup past the explicit list evaluates to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum LayerTail {
    /// Lookup misses are domain errors.
    None,
    /// `mu_layer = value` for every layer past the list.
    Constant { value: Param },
    /// `mu_layer = base^layer` (absolute rule, not continued from the
    /// last listed value).
    Geometric { base: Param },
}

/// An explicit per-vertex weight table with an optional fallback
/// family for vertices outside the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct WeightTable {
    map: BTreeMap<Vertex, WeightValue>,
    fallback: Option<Box<WeightFamily>>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    entries: Vec<TableEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fallback: Option<Box<WeightFamily>>,
}

#[derive(Serialize, Deserialize)]
struct TableEntry {
    vertex: Vertex,
    value: WeightValue,
}

impl From<WeightTable> for TableRepr {
    fn from(t: WeightTable) -> Self {
        TableRepr {
            entries: t
                .map
                .into_iter()
                .map(|(vertex, value)| TableEntry { vertex, value })
                .collect(),
            fallback: t.fallback,
        }
    }
}

impl TryFrom<TableRepr> for WeightTable {
    type Error = String;

    fn try_from(repr: TableRepr) -> std::result::Result<Self, String> {
        let mut map = BTreeMap::new();
        for e in repr.entries {
            if map.insert(e.vertex, e.value).is_some() {
                return Err(format!("duplicate table entry for {}", e.vertex));
            }
        }
        Ok(WeightTable {
            map,
            fallback: repr.fallback,
        })
    }
}

impl WeightTable {
    pub fn new(
        entries: impl IntoIterator<Item = (Vertex, WeightValue)>,
        fallback: Option<WeightFamily>,
    ) -> Self {
        WeightTable {
            map: entries.into_iter().collect(),
            fallback: fallback.map(Box::new),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// The explicit entries in vertex order (the fallback family, if
    /// any, is not enumerable).
    pub fn iter(&self) -> impl Iterator<Item = (&Vertex, &WeightValue)> {
        self.map.iter()
    }
}

/// The weight families understood by every scan and norm in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum WeightFamily {
    /// `mu_v = value`.
    Constant { value: Param },
    /// `mu_{i,j} = base^j` (path nodes use their index for `j`).
    GeometricJ { base: Param },
    /// `mu_{i,j} = base^(i+j)`.
    GeometricSum { base: Param },
    /// `mu_{i,j} = (j+1)^(-degree)`, defined for `j >= 0` only.
    PolynomialJ { degree: u32 },
    /// `mu_v = mu_layer(v)` from a per-layer list.
    OneCoordinate(LayerWeights),
    /// Explicit per-vertex table with optional fallback family.
    Table(WeightTable),
}

/// Layer and column coordinates used by the closed-form families: grid
/// vertices contribute `(i, j)`, path nodes `(k, k)`.
fn layer_and_column(v: Vertex) -> (i64, i64) {
    match v {
        Vertex::Grid { i, j } => (i, j),
        Vertex::Node { k } => (k, k),
    }
}

impl WeightFamily {
    pub fn constant_one() -> Self {
        WeightFamily::Constant {
            value: Param::Exact(BigRational::from_integer(BigInt::from(1))),
        }
    }

    /// Checks the no-vanishing invariant: weights must be nonzero
    /// everywhere, so every stored parameter and table value must be
    /// nonzero.
    pub fn validate(&self) -> Result<()> {
        let zero = |what: &str| Err(Error::domain(format!("{what} must be nonzero")));
        match self {
            WeightFamily::Constant { value } if value.is_zero() => zero("constant weight"),
            WeightFamily::GeometricJ { base } | WeightFamily::GeometricSum { base }
                if base.is_zero() =>
            {
                zero("geometric base")
            }
            WeightFamily::OneCoordinate(layers) => {
                if layers.values.iter().any(WeightValue::is_zero) {
                    return zero("layer weight");
                }
                match &layers.tail {
                    LayerTail::Constant { value } | LayerTail::Geometric { base: value }
                        if value.is_zero() =>
                    {
                        zero("layer tail parameter")
                    }
                    _ => Ok(()),
                }
            }
            WeightFamily::Table(t) => {
                if t.map.values().any(WeightValue::is_zero) {
                    return zero("table weight");
                }
                match &t.fallback {
                    Some(f) => f.validate(),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// Evaluates `mu_v`.
    ///
    /// Domain errors: polynomial decay at `j < 0`, layer lookups at
    /// negative layers or past a table with no tail rule, and table
    /// misses with no fallback.
    pub fn eval(&self, v: Vertex) -> Result<WeightValue> {
        let (layer, column) = layer_and_column(v);
        match self {
            WeightFamily::Constant { value } => Ok(value.to_value()),
            WeightFamily::GeometricJ { base } => Ok(base.pow(column)),
            WeightFamily::GeometricSum { base } => Ok(base.pow(layer + column)),
            WeightFamily::PolynomialJ { degree } => {
                if column < 0 {
                    return Err(Error::domain(format!(
                        "polynomial weight (j+1)^(-{degree}) is undefined at j = {column}"
                    )));
                }
                let den = BigInt::from(column + 1).pow(*degree);
                Ok(WeightValue::Exact(BigRational::new(BigInt::from(1), den)))
            }
            WeightFamily::OneCoordinate(layers) => {
                if layer < 0 {
                    return Err(Error::domain(format!(
                        "layer-indexed weights are undefined at layer {layer}"
                    )));
                }
                if let Some(value) = layers.values.get(layer as usize) {
                    return Ok(value.clone());
                }
                match &layers.tail {
                    LayerTail::None => Err(Error::domain(format!(
                        "layer {layer} is past the weight table and no tail rule is set"
                    ))),
                    LayerTail::Constant { value } => Ok(value.to_value()),
                    LayerTail::Geometric { base } => Ok(base.pow(layer)),
                }
            }
            WeightFamily::Table(t) => match t.map.get(&v) {
                Some(value) => Ok(value.clone()),
                None => match &t.fallback {
                    Some(f) => f.eval(v),
                    None => Err(Error::domain(format!(
                        "vertex {v} is not in the weight table and no fallback is set"
                    ))),
                },
            },
        }
    }

    /// `|mu_v|` as a double; the workhorse of the numeric scans.
    pub fn eval_abs(&self, v: Vertex) -> Result<f64> {
        Ok(self.eval(v)?.abs_f64())
    }

    /// `|mu_v|` as an exact rational; errors if the family evaluates
    /// to floats anywhere (mixing routes is not allowed).
    pub fn eval_abs_exact(&self, v: Vertex) -> Result<BigRational> {
        self.eval(v)?.abs_exact()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn geometric_j_handles_negative_columns_exactly() {
        let f = WeightFamily::GeometricJ {
            base: Param::Exact(rat(2, 1)),
        };
        assert_eq!(
            f.eval(Vertex::grid(1, -3)).unwrap(),
            WeightValue::Exact(rat(1, 8))
        );
        assert_eq!(
            f.eval(Vertex::node(4)).unwrap(),
            WeightValue::Exact(rat(16, 1))
        );
    }

    #[test]
    fn geometric_sum_uses_both_coordinates() {
        let f = WeightFamily::GeometricSum {
            base: Param::Exact(rat(1, 2)),
        };
        assert_eq!(
            f.eval(Vertex::grid(2, 3)).unwrap(),
            WeightValue::Exact(rat(1, 32))
        );
    }

    #[test]
    fn polynomial_decay_and_its_domain() {
        let f = WeightFamily::PolynomialJ { degree: 2 };
        assert_eq!(
            f.eval(Vertex::grid(5, 3)).unwrap(),
            WeightValue::Exact(rat(1, 16))
        );
        assert!(f.eval(Vertex::grid(1, -1)).is_err());
    }

    #[test]
    fn layer_weights_tail_rules() {
        let f = WeightFamily::OneCoordinate(LayerWeights {
            values: vec![WeightValue::Exact(rat(1, 1)), WeightValue::Exact(rat(1, 2))],
            tail: LayerTail::Geometric {
                base: Param::Exact(rat(1, 3)),
            },
        });
        assert_eq!(
            f.eval(Vertex::grid(1, 9)).unwrap(),
            WeightValue::Exact(rat(1, 2))
        );
        assert_eq!(
            f.eval(Vertex::grid(4, 0)).unwrap(),
            WeightValue::Exact(rat(1, 81))
        );

        let strict = WeightFamily::OneCoordinate(LayerWeights {
            values: vec![WeightValue::Exact(rat(1, 1))],
            tail: LayerTail::None,
        });
        assert!(strict.eval(Vertex::grid(3, 0)).is_err());
    }

    #[test]
    fn table_lookup_with_and_without_fallback() {
        let t = WeightFamily::Table(WeightTable::new(
            [(Vertex::grid(0, 0), WeightValue::Exact(rat(7, 2)))],
            Some(WeightFamily::constant_one()),
        ));
        assert_eq!(
            t.eval(Vertex::grid(0, 0)).unwrap(),
            WeightValue::Exact(rat(7, 2))
        );
        assert_eq!(
            t.eval(Vertex::grid(9, 9)).unwrap(),
            WeightValue::Exact(rat(1, 1))
        );

        let bare = WeightFamily::Table(WeightTable::new(
            [(
                Vertex::grid(0, 0),
                WeightValue::Approx(Complex64::new(0.5, -0.5)),
            )],
            None,
        ));
        assert!((bare.eval_abs(Vertex::grid(0, 0)).unwrap() - 0.5_f64.sqrt()).abs() < 1e-15);
        assert!(bare.eval(Vertex::grid(1, 1)).is_err());
        assert!(bare.eval_abs_exact(Vertex::grid(0, 0)).is_err());
    }

    #[test]
    fn validation_rejects_vanishing_weights() {
        assert!(WeightFamily::Constant {
            value: Param::Exact(rat(0, 1))
        }
        .validate()
        .is_err());
        assert!(WeightFamily::GeometricJ {
            base: Param::Approx(0.0)
        }
        .validate()
        .is_err());
        assert!(WeightFamily::constant_one().validate().is_ok());
    }

    #[test]
    fn family_json_round_trip() {
        let f = WeightFamily::GeometricJ {
            base: Param::Exact(rat(1, 2)),
        };
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"family":"geometric-j","base":"1/2"}"#);
        assert_eq!(serde_json::from_str::<WeightFamily>(&s).unwrap(), f);

        let f = WeightFamily::Table(WeightTable::new(
            [(
                Vertex::node(3),
                WeightValue::Approx(Complex64::new(1.0, 2.0)),
            )],
            Some(WeightFamily::PolynomialJ { degree: 1 }),
        ));
        let s = serde_json::to_string(&f).unwrap();
        let back: WeightFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);

        let p: Param = serde_json::from_str("0.25").unwrap();
        assert_eq!(p, Param::Approx(0.25));
        let p: Param = serde_json::from_str(r#""-5/3""#).unwrap();
        assert_eq!(p, Param::Exact(rat(-5, 3)));
    }
}
