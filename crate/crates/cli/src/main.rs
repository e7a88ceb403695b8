//! Command-line driver for the `latshift` library.
//!
//! Every subcommand runs one experiment — applying shift powers,
//! building right inverses, scanning weight families for dynamical
//! certificates — and writes a deterministic JSON or CSV report to
//! standard output (or `--out`). Errors are single-line JSON objects
//! on standard error; exit codes are 0 (success), 1 (usage), and
//! 2 (domain error from the underlying mathematics or input data).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use latshift::*;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "latshift",
    version,
    about = "Backward shifts on weighted lattice graphs: powers, right inverses, \
             hypercyclicity and mixing scans",
    after_help = "GRAMMARS:\n\
        model:   strip:M | bilateral:M | quadrant | halfplane | pathcycle | skippath | diamondchain\n\
        weight:  const:P | geomJ:P | geomSum:P | polyJ:D | onecoord:FILE | table:FILE\n\
        param P: exact rational (2, -3/4, 0.25) | approximate (~1.25) | phi\n\
        vector:  COEFF*e:I,J terms joined by + or - (node models use e:K); COEFF optional rational\n\
        extent:  band:LO..HI | diamond:D | box:IMAX,LO..HI\n\
        grid:    LO:HI:COUNT (inclusive linear spacing)"
)]
struct Cli {
    /// Report format; vector-valued reports are JSON-only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Seed for randomized sweeps (`oracle-check --samples`).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Closed form where the model has one, otherwise iterated.
    Auto,
    /// Binomial-coefficient closed form (errors on unsupported models).
    Closed,
    /// Repeated single applications.
    Iterated,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionKind {
    /// Witness scan on the strip: windowed decay of n^(m-i)|mu(i, j+n)|
    /// down the threshold ladder.
    Strip,
    /// The same scan on the bilateral strip, windows on both sides.
    BilateralStrip,
    /// Root test on the quadrant: limsup of diagonal maxima below
    /// 2 - margin yields mixing evidence.
    QuadrantMixing,
    /// Lower bound on the quadrant: inf of |mu|/2^(i+j) bounded away
    /// from zero certifies that no orbit is dense.
    QuadrantObstruction,
    /// Skip-path threshold test against the golden-ratio growth rate.
    SkipPath,
    /// Weight-independent bottleneck search: a vertex with two parents
    /// that are the only parents of anything they cover.
    Structural,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EigenKind {
    /// Two-parameter family on the quadrant with eigenvalue s(r^2 + r).
    Quadrant,
    /// One-parameter family on the skip path with eigenvalue s(1 + s).
    Skip,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply the backward shift once: (Bf)(v) sums f over the children of v.
    Apply {
        /// Graph model (see GRAMMARS).
        #[arg(long)]
        model: String,
        /// Inline vector, e.g. "3/2*e:1,2-e:2,1".
        #[arg(long, conflicts_with = "vec_file")]
        vec: Option<String>,
        /// Read the vector from a JSON file instead.
        #[arg(long, value_name = "FILE")]
        vec_file: Option<PathBuf>,
    },

    /// Apply the n-th shift power, by closed form or iteration.
    Power {
        #[arg(long)]
        model: String,
        #[arg(long, conflicts_with = "vec_file")]
        vec: Option<String>,
        #[arg(long, value_name = "FILE")]
        vec_file: Option<PathBuf>,
        /// Power to apply.
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },

    /// Build R_n f with B^n R_n = identity (strips and quadrant), or
    /// emit the strip coefficient table alpha_{i,s}.
    Rightinv {
        #[arg(long)]
        model: String,
        #[arg(long, conflicts_with = "vec_file")]
        vec: Option<String>,
        #[arg(long, value_name = "FILE")]
        vec_file: Option<PathBuf>,
        /// Power whose right inverse is taken.
        #[arg(long)]
        n: u32,
        /// Diagonal parameters for the quadrant basis, comma-joined
        /// rationals (defaults to a ladder inside (0, 1)).
        #[arg(long)]
        params: Option<String>,
        /// Emit the alpha coefficient table for the model's rows
        /// instead of applying to a vector.
        #[arg(long, conflicts_with_all = ["vec", "vec_file"])]
        emit_alpha: bool,
    },

    /// Assemble the orbit approximant f = sum over steps of R_{n_k} g_k;
    /// B^{n_k} f then reproduces g_k up to later-step cross terms.
    HcAssemble {
        #[arg(long)]
        model: String,
        /// One schedule step "N@VECTOR"; repeat the flag, powers
        /// strictly increasing.
        #[arg(long = "step", required = true)]
        steps: Vec<String>,
        #[arg(long)]
        params: Option<String>,
    },

    /// Run a hypercyclicity/mixing criterion scan over a weight family.
    Check {
        #[arg(long, value_enum)]
        criterion: CriterionKind,
        /// Weight family (required except for --criterion structural).
        #[arg(long)]
        weight: Option<String>,
        /// Number of rows for the strip criteria.
        #[arg(long)]
        m: Option<u32>,
        /// Scan horizon for the strip and skip-path criteria.
        #[arg(long, default_value_t = 100)]
        horizon: i64,
        /// Diagonal depth for the quadrant criteria.
        #[arg(long, default_value_t = 60)]
        depth: i64,
        /// Safety margin subtracted from the critical growth rate.
        #[arg(long)]
        margin: Option<f64>,
        /// Column window width for the strip witness scans.
        #[arg(long)]
        window: Option<i64>,
        /// Graph model for --criterion structural.
        #[arg(long)]
        model: Option<String>,
        /// Search bound (band width / diamond depth) for --criterion
        /// structural.
        #[arg(long, default_value_t = 100)]
        bound: i64,
    },

    /// Build an eigenvector of the shift and verify its residual on a
    /// truncation box.
    Eigen {
        #[arg(long, value_enum)]
        family: EigenKind,
        /// Radial parameter r >= 1 (quadrant family only).
        #[arg(long)]
        r: Option<String>,
        /// Eigen parameter s != 0.
        #[arg(long)]
        s: String,
        /// Truncation depth (diagonals or path length).
        #[arg(long, default_value_t = 15)]
        depth: i64,
        /// Interior margin: vertices this close to the truncation edge
        /// are excluded from the residual.
        #[arg(long, default_value_t = 1)]
        margin: i64,
        /// Weight family for a weighted residual.
        #[arg(long)]
        weight: Option<String>,
        /// Emit the eigenvector itself (JSON) instead of the residual
        /// report.
        #[arg(long)]
        emit_vector: bool,
    },

    /// Scan an (r, s) parameter grid: which eigenvectors lie in the
    /// weighted space, and whether eigenvalues land both inside and
    /// outside the unit circle (mixing evidence).
    GsScan {
        #[arg(long)]
        weight: String,
        /// r grid, "lo:hi:count".
        #[arg(long, default_value = "1:2:5")]
        r: String,
        /// Real part grid for s.
        #[arg(long, default_value = "0.1:0.9:5")]
        s_re: String,
        /// Imaginary part grid for s.
        #[arg(long, default_value = "0:0:1")]
        s_im: String,
        #[arg(long, default_value_t = 40)]
        depth: i64,
    },

    /// Cross-check shift powers against a dense truncated adjacency
    /// matrix; reports the maximum deviation (0 in exact arithmetic).
    OracleCheck {
        #[arg(long)]
        model: String,
        #[arg(long, conflicts_with_all = ["samples"])]
        vec: Option<String>,
        #[arg(long, value_name = "FILE", conflicts_with_all = ["vec", "samples"])]
        vec_file: Option<PathBuf>,
        #[arg(long)]
        n: u32,
        /// Truncation box the input support must fit in.
        #[arg(long)]
        extent: String,
        /// Check this many random vectors (seeded by --seed) instead of
        /// one given vector.
        #[arg(long)]
        samples: Option<u32>,
    },

    /// Evaluate the dual-exponent sum whose boundedness along n rules
    /// out dense orbits on the quadrant.
    NecSum {
        #[arg(long)]
        weight: String,
        /// Space exponent p > 1 (the sum uses the dual p/(p-1)).
        #[arg(long)]
        p: String,
        #[arg(long)]
        n: u32,
        /// Anchor vertex "i,j" with i, j >= 1.
        #[arg(long)]
        anchor: String,
    },
}

// ---------------------------------------------------------------------------
// Error plumbing
// ---------------------------------------------------------------------------

enum CliError {
    /// Malformed invocation or inline grammar: exit 1.
    Usage(String),
    /// Mathematical or data-level failure: exit 2.
    Domain(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let diag = serde_json::json!({
                "error": "usage",
                "message": e.to_string(),
            });
            eprintln!("{diag}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            let diag = serde_json::json!({ "error": "usage", "message": message });
            eprintln!("{diag}");
            ExitCode::from(1)
        }
        Err(CliError::Domain(message)) => {
            let diag = serde_json::json!({ "error": "domain", "message": message });
            eprintln!("{diag}");
            ExitCode::from(2)
        }
    }
}

// ---------------------------------------------------------------------------
// Inline grammars
// ---------------------------------------------------------------------------

fn parse_model(text: &str) -> CliResult<GraphModel> {
    let norm = text.trim().to_ascii_lowercase().replace(['-', '_'], "");
    let (head, arg) = match norm.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (norm.as_str(), None),
    };
    let rows = |arg: Option<&str>| -> CliResult<u32> {
        arg.ok_or_else(|| usage(format!("model '{head}' needs a row count, e.g. {head}:2")))?
            .parse::<u32>()
            .map_err(|_| usage(format!("bad row count in model '{text}'")))
    };
    let bare = |model: GraphModel| -> CliResult<GraphModel> {
        if arg.is_some() {
            return Err(usage(format!("model '{head}' takes no parameter")));
        }
        Ok(model)
    };
    match head {
        "strip" => Ok(GraphModel::Strip { m: rows(arg)? }),
        "bilateral" | "bistrip" | "bilateralstrip" => {
            Ok(GraphModel::BilateralStrip { m: rows(arg)? })
        }
        "quadrant" => bare(GraphModel::Quadrant),
        "halfplane" => bare(GraphModel::HalfPlane),
        "pathcycle" => bare(GraphModel::PathCycle),
        "skippath" => bare(GraphModel::SkipPath),
        "diamondchain" => bare(GraphModel::DiamondChain),
        _ => Err(usage(format!("unknown model '{text}'"))),
    }
}

/// Exact rational from "3/2", "-7", or a decimal literal "0.25".
fn parse_rational(text: &str) -> CliResult<BigRational> {
    let text = text.trim();
    let bad = || usage(format!("'{text}' is not a rational number"));
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(usage(format!("'{text}' has a zero denominator")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole: BigInt = if whole == "-" || whole.is_empty() {
            BigInt::ZERO
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let frac_part = BigRational::new(frac_num, scale);
        let whole_part = BigRational::from_integer(whole);
        return Ok(if negative {
            whole_part - frac_part
        } else {
            whole_part + frac_part
        });
    }
    let n: BigInt = text.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Family parameter: exact rational by default, `~x` for an explicit
/// float, `phi` for the golden ratio.
fn parse_param(text: &str) -> CliResult<Param> {
    let text = text.trim();
    if text.eq_ignore_ascii_case("phi") {
        return Ok(Param::Approx(GOLDEN_RATIO));
    }
    if let Some(rest) = text.strip_prefix('~') {
        let x: f64 = rest
            .trim()
            .parse()
            .map_err(|_| usage(format!("'{text}' is not an approximate number")))?;
        return Ok(Param::Approx(x));
    }
    Ok(Param::Exact(parse_rational(text)?))
}

fn parse_weight(text: &str) -> CliResult<WeightFamily> {
    let (kind, arg) = text
        .trim()
        .split_once(':')
        .ok_or_else(|| usage(format!("weight '{text}' is missing ':', e.g. geomJ:1/2")))?;
    let family = match kind {
        "const" => WeightFamily::Constant {
            value: parse_param(arg)?,
        },
        "geomJ" => WeightFamily::GeometricJ {
            base: parse_param(arg)?,
        },
        "geomSum" => WeightFamily::GeometricSum {
            base: parse_param(arg)?,
        },
        "polyJ" => WeightFamily::PolynomialJ {
            degree: arg
                .parse()
                .map_err(|_| usage(format!("bad degree in '{text}'")))?,
        },
        "onecoord" => {
            let text = std::fs::read_to_string(arg)?;
            WeightFamily::OneCoordinate(layer_weights_from_csv(&text)?)
        }
        "table" => {
            let text = std::fs::read_to_string(arg)?;
            WeightFamily::Table(weight_table_from_csv(&text)?)
        }
        _ => return Err(usage(format!("unknown weight kind '{kind}'"))),
    };
    family.validate()?;
    Ok(family)
}

fn parse_extent(text: &str) -> CliResult<Extent> {
    let bad = || {
        usage(format!(
            "extent '{text}' (expected band:LO..HI, diamond:D, or box:IMAX,LO..HI)"
        ))
    };
    let (kind, arg) = text.trim().split_once(':').ok_or_else(bad)?;
    let range = |s: &str| -> CliResult<(i64, i64)> {
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        Ok((
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
        ))
    };
    match kind {
        "band" => {
            let (lo, hi) = range(arg)?;
            Ok(Extent::Band { lo, hi })
        }
        "diamond" => Ok(Extent::Diamond {
            depth: arg.trim().parse().map_err(|_| bad())?,
        }),
        "box" => {
            let (i_max, rest) = arg.split_once(',').ok_or_else(bad)?;
            let (lo, hi) = range(rest)?;
            Ok(Extent::Rect {
                i_max: i_max.trim().parse().map_err(|_| bad())?,
                lo,
                hi,
            })
        }
        _ => Err(bad()),
    }
}

fn parse_vertex(model: GraphModel, text: &str) -> CliResult<Vertex> {
    let grid = !matches!(model, GraphModel::PathCycle | GraphModel::SkipPath);
    let bad = || {
        usage(format!(
            "vertex '{text}' (this model uses {})",
            if grid { "e:I,J" } else { "e:K" }
        ))
    };
    if grid {
        let (i, j) = text.split_once(',').ok_or_else(bad)?;
        Ok(Vertex::grid(
            i.trim().parse().map_err(|_| bad())?,
            j.trim().parse().map_err(|_| bad())?,
        ))
    } else {
        if text.contains(',') {
            return Err(bad());
        }
        Ok(Vertex::node(text.trim().parse().map_err(|_| bad())?))
    }
}

/// Inline vectors: `COEFF*e:IDX` terms joined by `+`/`-`. A sign starts
/// a new term unless it follows `,`, `:`, `*`, or `/` (where it belongs
/// to the number being read).
fn parse_vector(model: GraphModel, text: &str) -> CliResult<SparseVector<BigRational>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(usage("empty vector expression"));
    }
    let mut terms: Vec<(i8, String)> = Vec::new();
    let mut current = String::new();
    let mut sign = 1i8;
    let mut prev_meaningful = None::<char>;
    for (idx, ch) in text.char_indices() {
        if (ch == '+' || ch == '-')
            && idx > 0
            && !matches!(prev_meaningful, Some(',' | ':' | '*' | '/'))
        {
            terms.push((sign, std::mem::take(&mut current)));
            sign = if ch == '-' { -1 } else { 1 };
        } else if ch == '-' && idx == 0 {
            sign = -1;
        } else {
            current.push(ch);
        }
        if !ch.is_whitespace() {
            prev_meaningful = Some(ch);
        }
    }
    terms.push((sign, current));

    let mut entries = Vec::new();
    for (sign, term) in terms {
        let term = term.trim();
        let (coeff, atom) = match term.split_once('*') {
            Some((c, a)) => (parse_rational(c)?, a.trim()),
            None => (BigRational::from_integer(BigInt::from(1)), term),
        };
        let idx = atom
            .strip_prefix("e:")
            .ok_or_else(|| usage(format!("term '{term}' is not of the form COEFF*e:IDX")))?;
        let coeff = if sign < 0 { -coeff } else { coeff };
        entries.push((parse_vertex(model, idx)?, coeff));
    }
    Ok(SparseVector::from_entries(model, entries)?)
}

/// `lo:hi:count` with inclusive endpoints.
fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || usage(format!("grid '{text}' (expected LO:HI:COUNT)"));
    let parts: Vec<&str> = text.trim().split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|k| lo + step * k as f64).collect())
}

fn parse_params_list(text: &str) -> CliResult<DiagonalBasisParams<BigRational>> {
    let values = text
        .split(',')
        .map(parse_rational)
        .collect::<CliResult<Vec<_>>>()?;
    Ok(DiagonalBasisParams::new(values)?)
}

// ---------------------------------------------------------------------------
// Input vectors from either grammar or file
// ---------------------------------------------------------------------------

/// An input vector in whichever scalar domain the source provided.
enum AnyVector {
    Exact(SparseVector<BigRational>),
    Approx(SparseVector<Complex64>),
}

fn load_vector(
    model: GraphModel,
    inline: Option<&str>,
    file: Option<&PathBuf>,
) -> CliResult<AnyVector> {
    match (inline, file) {
        (Some(text), None) => Ok(AnyVector::Exact(parse_vector(model, text)?)),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            Ok(match vector_from_json(model, &text)? {
                VectorData::Exact(v) => AnyVector::Exact(v),
                VectorData::Approx(v) => AnyVector::Approx(v),
            })
        }
        _ => Err(usage("exactly one of --vec or --vec-file is required")),
    }
}

impl AnyVector {
    fn map<E, A>(self, exact: E, approx: A) -> CliResult<AnyVector>
    where
        E: FnOnce(SparseVector<BigRational>) -> latshift::Result<SparseVector<BigRational>>,
        A: FnOnce(SparseVector<Complex64>) -> latshift::Result<SparseVector<Complex64>>,
    {
        Ok(match self {
            AnyVector::Exact(v) => AnyVector::Exact(exact(v)?),
            AnyVector::Approx(v) => AnyVector::Approx(approx(v)?),
        })
    }

    fn to_json(&self) -> String {
        match self {
            AnyVector::Exact(v) => vector_to_json_exact(v),
            AnyVector::Approx(v) => vector_to_json_approx(v),
        }
    }
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

fn run(cli: Cli) -> CliResult<()> {
    let report = match cli.cmd {
        Cmd::Apply {
            ref model,
            ref vec,
            ref vec_file,
        } => {
            let model = parse_model(model)?;
            let input = load_vector(model, vec.as_deref(), vec_file.as_ref())?;
            let out = input.map(|v| apply(model, &v), |v| apply(model, &v))?;
            vector_report(cli.format, &out)?
        }

        Cmd::Power {
            ref model,
            ref vec,
            ref vec_file,
            n,
            method,
        } => {
            let model = parse_model(model)?;
            let input = load_vector(model, vec.as_deref(), vec_file.as_ref())?;
            let out = match method {
                Method::Closed => input.map(
                    |v| power_closed(model, &v, n),
                    |v| power_closed(model, &v, n),
                )?,
                Method::Iterated => {
                    input.map(|v| power_apply(model, &v, n), |v| power_apply(model, &v, n))?
                }
                Method::Auto => input.map(
                    |v| power_closed(model, &v, n).or_else(|_| power_apply(model, &v, n)),
                    |v| power_closed(model, &v, n).or_else(|_| power_apply(model, &v, n)),
                )?,
            };
            vector_report(cli.format, &out)?
        }

        Cmd::Rightinv {
            ref model,
            ref vec,
            ref vec_file,
            n,
            ref params,
            emit_alpha,
        } => {
            let model = parse_model(model)?;
            if emit_alpha {
                let rows = match model {
                    GraphModel::Strip { m } | GraphModel::BilateralStrip { m } => m,
                    _ => {
                        return Err(usage(
                            "--emit-alpha needs a strip model (the table is per-row)",
                        ))
                    }
                };
                let table = AlphaTable::build(rows, n)?;
                alpha_report(cli.format, &table)?
            } else {
                let params = params.as_deref().map(parse_params_list).transpose()?;
                let input = load_vector(model, vec.as_deref(), vec_file.as_ref())?;
                let out = match (model, input) {
                    (GraphModel::Strip { .. } | GraphModel::BilateralStrip { .. }, v) => v.map(
                        |v| right_inverse_strip(&v, n),
                        |v| right_inverse_strip(&v, n),
                    )?,
                    (GraphModel::Quadrant, AnyVector::Exact(v)) => {
                        AnyVector::Exact(right_inverse_quadrant(&v, n, params.as_ref())?)
                    }
                    (GraphModel::Quadrant, AnyVector::Approx(_)) => {
                        return Err(CliError::Domain(
                            "the quadrant right inverse needs exact input \
                             (the basis change is ill-conditioned in floats)"
                                .into(),
                        ))
                    }
                    (other, _) => {
                        return Err(CliError::Domain(format!(
                            "no right inverse is implemented for {other:?}"
                        )))
                    }
                };
                vector_report(cli.format, &out)?
            }
        }

        Cmd::HcAssemble {
            ref model,
            ref steps,
            ref params,
        } => {
            let model = parse_model(model)?;
            let params = params.as_deref().map(parse_params_list).transpose()?;
            let mut schedule = Vec::new();
            for step in steps {
                let (power, vec) = step
                    .split_once('@')
                    .ok_or_else(|| usage(format!("step '{step}' is not of the form N@VECTOR")))?;
                let power: u32 = power
                    .trim()
                    .parse()
                    .map_err(|_| usage(format!("bad power in step '{step}'")))?;
                schedule.push((power, parse_vector(model, vec)?));
            }
            let out = hc_approximant(model, &schedule, params.as_ref())?;
            vector_report(cli.format, &AnyVector::Exact(out))?
        }

        Cmd::Check {
            criterion,
            ref weight,
            m,
            horizon,
            depth,
            margin,
            window,
            ref model,
            bound,
        } => {
            let margin = margin.unwrap_or(DEFAULT_MARGIN);
            let mut config = WitnessConfig::default();
            if let Some(w) = window {
                config.window = w;
            }
            let need_weight = || -> CliResult<WeightFamily> {
                parse_weight(
                    weight
                        .as_deref()
                        .ok_or_else(|| usage("this criterion needs --weight"))?,
                )
            };
            let need_m =
                || -> CliResult<u32> { m.ok_or_else(|| usage("this criterion needs --m ROWS")) };
            let report = match criterion {
                CriterionKind::Strip => {
                    strip_criterion(&need_weight()?, need_m()?, horizon, &config)?
                }
                CriterionKind::BilateralStrip => {
                    strip_criterion_bilateral(&need_weight()?, need_m()?, horizon, &config)?
                }
                CriterionKind::QuadrantMixing => {
                    quadrant_mixing_test(&need_weight()?, depth, margin)?
                }
                CriterionKind::QuadrantObstruction => {
                    quadrant_obstruction_test(&need_weight()?, depth)?
                }
                CriterionKind::SkipPath => skip_graph_test(&need_weight()?, horizon, margin)?,
                CriterionKind::Structural => {
                    let model = parse_model(
                        model
                            .as_deref()
                            .ok_or_else(|| usage("--criterion structural needs --model"))?,
                    )?;
                    let extent = match model {
                        GraphModel::Quadrant | GraphModel::DiamondChain => {
                            Extent::Diamond { depth: bound }
                        }
                        GraphModel::BilateralStrip { .. } | GraphModel::HalfPlane => Extent::Band {
                            lo: -bound,
                            hi: bound,
                        },
                        _ => Extent::Band { lo: 1, hi: bound },
                    };
                    structural_report(model, extent)?
                }
            };
            match cli.format {
                Format::Json => one_line_json(&report)?,
                Format::Csv => trace_to_csv(&report.trace),
            }
        }

        Cmd::Eigen {
            family,
            ref r,
            ref s,
            depth,
            margin,
            ref weight,
            emit_vector,
        } => {
            let weight = weight.as_deref().map(parse_weight).transpose()?;
            eigen_report(
                cli.format,
                family,
                r.as_deref(),
                s,
                depth,
                margin,
                weight.as_ref(),
                emit_vector,
            )?
        }

        Cmd::GsScan {
            ref weight,
            ref r,
            ref s_re,
            ref s_im,
            depth,
        } => {
            let family = parse_weight(weight)?;
            let r_grid = parse_grid(r)?;
            let re = parse_grid(s_re)?;
            let im = parse_grid(s_im)?;
            let s_grid: Vec<Complex64> = re
                .iter()
                .flat_map(|&a| im.iter().map(move |&b| Complex64::new(a, b)))
                .collect();
            let report = gs_region_scan(&family, &r_grid, &s_grid, depth)?;
            match cli.format {
                Format::Json => one_line_json(&report)?,
                Format::Csv => region_to_csv(&report),
            }
        }

        Cmd::OracleCheck {
            ref model,
            ref vec,
            ref vec_file,
            n,
            ref extent,
            samples,
        } => {
            let model = parse_model(model)?;
            let extent = parse_extent(extent)?;
            let (max_dev, count) = match samples {
                Some(count) => {
                    if count == 0 {
                        return Err(usage("--samples must be at least 1"));
                    }
                    let verts = truncate(model, extent)?;
                    if verts.is_empty() {
                        return Err(CliError::Domain("the extent contains no vertices".into()));
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    let mut max_dev = 0.0f64;
                    for _ in 0..count {
                        let f = random_exact_vector(&mut rng, model, &verts);
                        max_dev = max_dev.max(equivalence_check(model, &f, n, extent)?);
                    }
                    (max_dev, count)
                }
                None => {
                    let input = load_vector(model, vec.as_deref(), vec_file.as_ref())?;
                    let dev = match input {
                        AnyVector::Exact(v) => equivalence_check(model, &v, n, extent)?,
                        AnyVector::Approx(v) => equivalence_check(model, &v, n, extent)?,
                    };
                    (dev, 1)
                }
            };
            if cli.format == Format::Csv {
                return Err(usage("oracle-check reports are JSON-only"));
            }
            one_line_json(&serde_json::json!({
                "op": "oracle-check",
                "model": model,
                "n": n,
                "samples": count,
                "max_deviation": max_dev,
            }))?
        }

        Cmd::NecSum {
            ref weight,
            ref p,
            n,
            ref anchor,
        } => {
            let family = parse_weight(weight)?;
            let p = parse_param(p)?;
            let anchor = parse_vertex(GraphModel::Quadrant, anchor)?;
            let value = necessary_sum(&family, &p, n, anchor)?;
            if cli.format == Format::Csv {
                return Err(usage("nec-sum reports are JSON-only"));
            }
            let (rendered, exact) = match &value {
                NecSumValue::Exact(v) => (serde_json::Value::String(render_rational(v)), true),
                NecSumValue::Approx(x) => (serde_json::to_value(x).expect("finite float"), false),
            };
            one_line_json(&serde_json::json!({
                "op": "nec-sum",
                "n": n,
                "anchor": anchor,
                "value": rendered,
                "float": value.as_f64(),
                "exact": exact,
            }))?
        }
    };

    match cli.out {
        Some(path) => std::fs::write(path, report)?,
        None => print!("{report}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

fn one_line_json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    let mut text = serde_json::to_string(value)
        .map_err(|e| CliError::Domain(format!("report serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn vector_report(format: Format, vec: &AnyVector) -> CliResult<String> {
    if format == Format::Csv {
        return Err(usage(
            "vector reports are JSON-only (use --format json or drop --format)",
        ));
    }
    let mut text = vec.to_json();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    Ok(text)
}

fn render_rational(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn alpha_report(format: Format, table: &AlphaTable) -> CliResult<String> {
    match format {
        Format::Csv => Ok(alpha_to_csv(table)),
        Format::Json => {
            let rows: Vec<Vec<String>> = (1..=table.rows())
                .map(|i| {
                    (1..=i)
                        .map(|s| render_rational(table.entry(i, s).expect("in range")))
                        .collect()
                })
                .collect();
            one_line_json(&serde_json::json!({
                "op": "alpha-table",
                "rows": table.rows(),
                "shift_power": table.shift_power(),
                "normalized_max": table.normalized_max().to_f64(),
                "entries": rows,
            }))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn eigen_report(
    format: Format,
    family: EigenKind,
    r: Option<&str>,
    s: &str,
    depth: i64,
    margin: i64,
    weight: Option<&WeightFamily>,
    emit_vector: bool,
) -> CliResult<String> {
    if format == Format::Csv {
        return Err(usage("eigen reports are JSON-only"));
    }
    let model = match family {
        EigenKind::Quadrant => GraphModel::Quadrant,
        EigenKind::Skip => GraphModel::SkipPath,
    };
    let r = match (family, r) {
        (EigenKind::Quadrant, Some(r)) => Some(parse_param(r)?),
        (EigenKind::Quadrant, None) => {
            return Err(usage("--family quadrant needs --r"));
        }
        (EigenKind::Skip, None) => None,
        (EigenKind::Skip, Some(_)) => {
            return Err(usage("--family skip takes no --r"));
        }
    };
    let s = parse_param(s)?;

    // Exact parameters keep exact arithmetic; any approximate parameter
    // drops the whole computation to floats.
    let all_exact = s.exact().is_some() && r.as_ref().is_none_or(|r| r.exact().is_some());
    if all_exact {
        let s = s.exact().expect("checked").clone();
        let pair = match family {
            EigenKind::Quadrant => {
                let r = r.expect("checked").exact().expect("checked").clone();
                eigenvector_quadrant(&r, &s, depth)?
            }
            EigenKind::Skip => eigenvector_skip(&s, depth)?,
        };
        if emit_vector {
            let mut text = vector_to_json_exact(&pair.vec);
            text.push('\n');
            return Ok(text);
        }
        let report = eigen_residual(model, &pair, margin, weight)?;
        one_line_json(&serde_json::json!({
            "op": "eigen",
            "family": pair.family,
            "depth": depth,
            "lambda": {
                "num": pair.lambda.numer().to_string(),
                "den": pair.lambda.denom().to_string(),
            },
            "support": pair.vec.support_len(),
            "residual": report,
            "relative": report.relative(),
        }))
    } else {
        let s = Complex64::new(s.as_f64(), 0.0);
        let pair = match family {
            EigenKind::Quadrant => {
                let r = Complex64::new(r.expect("checked").as_f64(), 0.0);
                eigenvector_quadrant(&r, &s, depth)?
            }
            EigenKind::Skip => eigenvector_skip(&s, depth)?,
        };
        if emit_vector {
            let mut text = vector_to_json_approx(&pair.vec);
            text.push('\n');
            return Ok(text);
        }
        let report = eigen_residual(model, &pair, margin, weight)?;
        one_line_json(&serde_json::json!({
            "op": "eigen",
            "family": pair.family,
            "depth": depth,
            "lambda": { "re": pair.lambda.re, "im": pair.lambda.im },
            "support": pair.vec.support_len(),
            "residual": report,
            "relative": report.relative(),
        }))
    }
}

fn random_exact_vector(
    rng: &mut ChaCha8Rng,
    model: GraphModel,
    verts: &[Vertex],
) -> SparseVector<BigRational> {
    let count = rng.random_range(0..=4usize);
    let entries = (0..count)
        .map(|_| {
            let v = verts[rng.random_range(0..verts.len())];
            let num = loop {
                let x = rng.random_range(-9i64..=9);
                if x != 0 {
                    break x;
                }
            };
            let den = rng.random_range(1..=9i64);
            (v, BigRational::new(BigInt::from(num), BigInt::from(den)))
        })
        .collect::<Vec<_>>();
    SparseVector::from_entries(model, entries).expect("sampled vertices are admissible")
}
