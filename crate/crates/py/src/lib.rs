//! Python bindings for the multivariate Laguerre library.
//!
//! Exact quantities cross the boundary as `fractions.Fraction`; rational
//! arguments accept `Fraction`, `int`, a string literal (`"3/4"`, `"0.25"`),
//! or `float` (converted exactly from its binary value). Domain and pole
//! errors raise `ValueError`; I/O errors raise `OSError`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mlaguerre::bounds::{self, AsymptoteForm, BoundReport};
use mlaguerre::dirichlet::{self, DirichletParams, McCheck};
use mlaguerre::laguerre_mv as mv;
use mlaguerre::laguerre_mv::{ChainVariant, CoefficientRule, EvalPoint, MultiIndex};
use mlaguerre::laguerre_uv as uv;
use mlaguerre::laguerre_uv::UnivariateQuery;
use mlaguerre::numerics::{self, Rational, Scalar};
use mlaguerre::verify;
use mlaguerre::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Accept Fraction | int | str | float as an exact rational.
fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(s) = obj.extract::<String>() {
        return numerics::parse_rational(&s).map_err(py_err);
    }
    if let Ok(r) = obj.extract::<Rational>() {
        return Ok(r);
    }
    if let Ok(f) = obj.extract::<f64>() {
        return Rational::from_float(f)
            .ok_or_else(|| PyValueError::new_err(format!("non-finite value {f}")));
    }
    Err(PyValueError::new_err(
        "expected Fraction, int, rational string, or float",
    ))
}

fn to_rational_vec(objs: Vec<Bound<'_, PyAny>>) -> PyResult<Vec<Rational>> {
    objs.iter().map(to_rational).collect()
}

fn parse_variant(variant: &str) -> PyResult<ChainVariant> {
    match variant {
        "theorem1" => Ok(ChainVariant::Theorem1),
        "theorem2" => Ok(ChainVariant::Theorem2),
        other => Err(PyValueError::new_err(format!(
            "variant must be \"theorem1\" or \"theorem2\", got {other:?}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// scalar special functions
// ---------------------------------------------------------------------------

/// Rising factorial (a)_n as an exact Fraction.
#[pyfunction]
fn pochhammer(a: &Bound<'_, PyAny>, n: usize) -> PyResult<Rational> {
    Ok(numerics::pochhammer(&to_rational(a)?, n))
}

/// Natural log of the Gamma function for x > 0.
#[pyfunction]
fn log_gamma(x: f64) -> PyResult<f64> {
    numerics::log_gamma(x).map_err(py_err)
}

/// log Gamma(a+n) - log Gamma(a) for a > 0.
#[pyfunction]
fn log_pochhammer(a: f64, n: usize) -> PyResult<f64> {
    numerics::log_pochhammer(a, n)
        .map(|v| v.ln_abs())
        .map_err(py_err)
}

/// The weight q_n: returns (exact square as Fraction, float value).
#[pyfunction]
fn q_value(n: usize) -> (Rational, f64) {
    let q = numerics::q_value(n);
    (q.square, q.float)
}

// ---------------------------------------------------------------------------
// univariate polynomials and bounds
// ---------------------------------------------------------------------------

/// L_n^{(alpha)}(x) through the explicit hypergeometric form, exactly.
/// Raises ValueError when alpha+1 is a non-positive integer > -n.
#[pyfunction]
fn laguerre_uv(n: usize, alpha: &Bound<'_, PyAny>, x: &Bound<'_, PyAny>) -> PyResult<Rational> {
    uv::laguerre_explicit_exact(n, &to_rational(alpha)?, &to_rational(x)?).map_err(py_err)
}

/// L_n^{(alpha)}(x) through the three-term recurrence (defined everywhere).
#[pyfunction]
fn laguerre_uv_recurrence(
    n: usize,
    alpha: &Bound<'_, PyAny>,
    x: &Bound<'_, PyAny>,
) -> PyResult<Rational> {
    Ok(uv::laguerre_recurrence_exact(
        n,
        &to_rational(alpha)?,
        &to_rational(x)?,
    ))
}

/// Truncated Kummer series 1F1(a; c; y) for a >= 0, c > 0, y >= 0.
#[pyfunction]
#[pyo3(signature = (a, c, y, tol=1e-15))]
fn kummer_1f1(a: f64, c: f64, y: f64, tol: f64) -> PyResult<f64> {
    uv::kummer_1f1(a, c, y, tol).map_err(py_err)
}

fn uv_query(n: usize, alpha: &Bound<'_, PyAny>, x: &Bound<'_, PyAny>) -> PyResult<UnivariateQuery> {
    Ok(UnivariateQuery::new(
        n,
        to_rational(alpha)?,
        to_rational(x)?,
    ))
}

/// Szegő's bound (alpha+1)_n/n! e^{x/2}, for alpha >= 0, x >= 0.
#[pyfunction]
fn szego_bound(n: usize, alpha: &Bound<'_, PyAny>, x: &Bound<'_, PyAny>) -> PyResult<f64> {
    uv::szego_bound(&uv_query(n, alpha, x)?).map_err(py_err)
}

/// Rooney's bound 2^{-alpha} e^{x/2}, for alpha <= 0, x >= 0.
#[pyfunction]
fn rooney_bound_1(n: usize, alpha: &Bound<'_, PyAny>, x: &Bound<'_, PyAny>) -> PyResult<f64> {
    uv::rooney_bound_1(&uv_query(n, alpha, x)?).map_err(py_err)
}

/// Rooney's refined bound q_n 2^{-alpha} e^{x/2}, for alpha <= -1/2, x >= 0.
#[pyfunction]
fn rooney_bound_2(n: usize, alpha: &Bound<'_, PyAny>, x: &Bound<'_, PyAny>) -> PyResult<f64> {
    uv::rooney_bound_2(&uv_query(n, alpha, x)?).map_err(py_err)
}

/// Lewandowski–Szynal polynomial bound, for alpha >= -1/2, x >= 0.
#[pyfunction]
fn lewandowski_szynal_bound(
    n: usize,
    alpha: &Bound<'_, PyAny>,
    x: &Bound<'_, PyAny>,
) -> PyResult<f64> {
    uv::lewandowski_szynal_bound(&uv_query(n, alpha, x)?).map_err(py_err)
}

// ---------------------------------------------------------------------------
// multivariate polynomials
// ---------------------------------------------------------------------------

/// L_{n_1,...,n_k}^{(alpha)}(x) through the explicit multivariate formula.
#[pyfunction]
fn laguerre_mv(
    n: Vec<usize>,
    alpha: &Bound<'_, PyAny>,
    x: Vec<Bound<'_, PyAny>>,
) -> PyResult<Rational> {
    mv::laguerre_mv_exact(
        &MultiIndex::new(n),
        &to_rational(alpha)?,
        &to_rational_vec(x)?,
    )
    .map_err(py_err)
}

/// The same coefficient through the independent generating-function formula.
#[pyfunction]
fn gf_expansion_coeff(
    n: Vec<usize>,
    alpha: &Bound<'_, PyAny>,
    x: Vec<Bound<'_, PyAny>>,
) -> PyResult<Rational> {
    Ok(mv::gf_expansion_coeff(
        &MultiIndex::new(n),
        &to_rational(alpha)?,
        &to_rational_vec(x)?,
    ))
}

/// Confluent Lauricella series Phi2[b_1,...,b_k; c; x], exactly.
/// `trunc` caps the total degree when the series is infinite.
#[pyfunction]
#[pyo3(signature = (b, c, x, trunc=None))]
fn phi2k(
    b: Vec<Bound<'_, PyAny>>,
    c: &Bound<'_, PyAny>,
    x: Vec<Bound<'_, PyAny>>,
    trunc: Option<usize>,
) -> PyResult<Rational> {
    mv::phi2k(
        &to_rational_vec(b)?,
        &to_rational(c)?,
        &to_rational_vec(x)?,
        trunc,
    )
    .map_err(py_err)
}

/// Exact diagonal sequence [L_{n,...,n}^{(alpha)}(x) for n = 0..=n_max].
#[pyfunction]
fn diagonal_sequence(
    alpha: &Bound<'_, PyAny>,
    x: Vec<Bound<'_, PyAny>>,
    n_max: usize,
) -> PyResult<Vec<Rational>> {
    mv::diagonal_sequence(
        &to_rational(alpha)?,
        &to_rational_vec(x)?,
        n_max,
        mv::DIAGONAL_DEFAULT_CAP,
    )
    .map_err(py_err)
}

/// Compare both sides of the multiple-to-single series reduction through
/// `degree_cap`. The rule is C = 1, or C(j) = 1/(inverse_base)_j when
/// `inverse_base` is given. Returns (equal, lhs_coeffs, rhs_coeffs).
#[pyfunction]
#[pyo3(signature = (alphas, degree_cap, inverse_base=None))]
fn panda_reduce_check(
    alphas: Vec<Bound<'_, PyAny>>,
    degree_cap: usize,
    inverse_base: Option<Bound<'_, PyAny>>,
) -> PyResult<(bool, Vec<Rational>, Vec<Rational>)> {
    let rule = match inverse_base {
        Some(base) => CoefficientRule::InversePochhammer {
            base: to_rational(&base)?,
        },
        None => CoefficientRule::One,
    };
    let check =
        mv::panda_reduce_check(&to_rational_vec(alphas)?, &rule, degree_cap).map_err(py_err)?;
    Ok((check.equal, check.multiple_series, check.single_series))
}

/// The majorization chain Phi2 <= 1F1 <= e^{||x||/2}; returns the three
/// values. `variant` is "theorem1" or "theorem2".
#[pyfunction]
fn chain_check(k: usize, alpha: f64, x: Vec<f64>, variant: &str) -> PyResult<(f64, f64, f64)> {
    let c = mv::chain_check(k, alpha, &x, parse_variant(variant)?).map_err(py_err)?;
    Ok((c.phi2, c.kummer, c.exponential))
}

// ---------------------------------------------------------------------------
// envelope bounds
// ---------------------------------------------------------------------------

fn report_dict<'py>(py: Python<'py>, report: &BoundReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("source", report.source.to_string())?;
    d.set_item("n", report.n.entries())?;
    d.set_item("alpha", report.alpha.to_string())?;
    d.set_item("x", report.x.f64_coords())?;
    d.set_item("bound", report.bound)?;
    d.set_item("ln_bound", report.ln_bound)?;
    d.set_item("tightness", report.tightness)?;
    Ok(d)
}

/// First main bound report: keys source, n, alpha, x, bound, ln_bound, tightness.
#[pyfunction]
fn theorem1_bound<'py>(
    py: Python<'py>,
    n: Vec<usize>,
    alpha: &Bound<'_, PyAny>,
    x: Vec<Bound<'_, PyAny>>,
) -> PyResult<Bound<'py, PyDict>> {
    let report = bounds::theorem1_bound(
        &MultiIndex::new(n),
        &Scalar::Exact(to_rational(alpha)?),
        &EvalPoint::exact(to_rational_vec(x)?),
    )
    .map_err(py_err)?;
    report_dict(py, &report)
}

/// Second main bound report; `extended=True` admits alpha in (-1, -1/2]
/// (reported range, not covered by the proof).
#[pyfunction]
#[pyo3(signature = (n, alpha, x, extended=false))]
fn theorem2_bound<'py>(
    py: Python<'py>,
    n: Vec<usize>,
    alpha: &Bound<'_, PyAny>,
    x: Vec<Bound<'_, PyAny>>,
    extended: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let report = bounds::theorem2_bound(
        &MultiIndex::new(n),
        &Scalar::Exact(to_rational(alpha)?),
        &EvalPoint::exact(to_rational_vec(x)?),
        extended,
    )
    .map_err(py_err)?;
    report_dict(py, &report)
}

/// ln(A_n/B_n): log of the ratio of the two diagonal envelopes (alpha-free).
#[pyfunction]
fn ab_ratio_ln(n: usize, k: usize) -> PyResult<f64> {
    bounds::ab_ratio_ln_at(&[n], k)
        .map(|v| v[0])
        .map_err(py_err)
}

/// Closed-form asymptote of A_n/B_n; `form` is "printed" or "derived".
#[pyfunction]
fn ratio_asymptote(n: usize, k: usize, form: &str) -> PyResult<f64> {
    let form = match form {
        "printed" => AsymptoteForm::Printed,
        "derived" => AsymptoteForm::Derived,
        other => {
            return Err(PyValueError::new_err(format!(
                "form must be \"printed\" or \"derived\", got {other:?}"
            )))
        }
    };
    bounds::ratio_asymptote(n, k, form).map_err(py_err)
}

/// Fit the diagonal ratio and adjudicate the asymptote constant; returns a
/// dict with slope, intercept, fitted/printed/derived constants, and verdict.
#[pyfunction]
fn adjudicate_asymptote<'py>(
    py: Python<'py>,
    k: usize,
    n_max: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let r = verify::adjudicate_asymptote(k, n_max).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("k", r.k)?;
    d.set_item("n_max", r.n_max)?;
    d.set_item("slope", r.slope)?;
    d.set_item("intercept", r.intercept)?;
    d.set_item("fitted_constant", r.fitted_constant)?;
    d.set_item("printed_constant", r.printed_constant)?;
    d.set_item("derived_constant", r.derived_constant)?;
    d.set_item("verdict", r.verdict.to_string())?;
    Ok(d)
}

// ---------------------------------------------------------------------------
// Dirichlet measure
// ---------------------------------------------------------------------------

fn dirichlet_params(
    b: Vec<Bound<'_, PyAny>>,
    beta: &Bound<'_, PyAny>,
) -> PyResult<DirichletParams> {
    DirichletParams::new(to_rational_vec(b)?, to_rational(beta)?).map_err(py_err)
}

/// Exact simplex moment: prod (b_l)_{j_l} / (b_1+...+b_k+beta)_{|j|}.
#[pyfunction]
fn dirichlet_moment(
    b: Vec<Bound<'_, PyAny>>,
    beta: &Bound<'_, PyAny>,
    j: Vec<usize>,
) -> PyResult<Rational> {
    let params = dirichlet_params(b, beta)?;
    Ok(dirichlet::dirichlet_moment(&params, &MultiIndex::new(j)))
}

/// Draw `count` simplex points of the Dirichlet measure, deterministically.
#[pyfunction]
fn dirichlet_sample(
    b: Vec<Bound<'_, PyAny>>,
    beta: &Bound<'_, PyAny>,
    seed: u64,
    count: usize,
) -> PyResult<Vec<Vec<f64>>> {
    let params = dirichlet_params(b, beta)?;
    Ok(dirichlet::dirichlet_sample(&params, seed, count)
        .map_err(py_err)?
        .into_iter()
        .map(|p| p.coords().to_vec())
        .collect())
}

fn mc_dict<'py>(py: Python<'py>, c: &McCheck) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("lhs", c.lhs)?;
    d.set_item("estimate", c.estimate)?;
    d.set_item("std_error", c.std_error)?;
    d.set_item("samples", c.samples)?;
    d.set_item("z_score", c.z_score())?;
    d.set_item("within_3_sigma", c.within_sigmas(3.0))?;
    Ok(d)
}

/// Monte-Carlo check of the product integral representation.
#[pyfunction]
#[pyo3(signature = (n, alphas, beta, x, samples=100_000, seed=0))]
fn integral_repr_check<'py>(
    py: Python<'py>,
    n: Vec<usize>,
    alphas: Vec<Bound<'_, PyAny>>,
    beta: &Bound<'_, PyAny>,
    x: Vec<Bound<'_, PyAny>>,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let c = dirichlet::integral_repr_check(
        &MultiIndex::new(n),
        &to_rational_vec(alphas)?,
        &to_rational(beta)?,
        &to_rational_vec(x)?,
        samples,
        seed,
    )
    .map_err(py_err)?;
    mc_dict(py, &c)
}

/// Monte-Carlo check of the proof specializations ("theorem1"/"theorem2").
#[pyfunction]
#[pyo3(signature = (n, alpha, x, variant, samples=100_000, seed=0))]
fn specialization_check<'py>(
    py: Python<'py>,
    n: Vec<usize>,
    alpha: &Bound<'_, PyAny>,
    x: Vec<Bound<'_, PyAny>>,
    variant: &str,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let c = dirichlet::specialization_check(
        &MultiIndex::new(n),
        &to_rational(alpha)?,
        &to_rational_vec(x)?,
        parse_variant(variant)?,
        samples,
        seed,
    )
    .map_err(py_err)?;
    mc_dict(py, &c)
}

// ---------------------------------------------------------------------------
// sweeps
// ---------------------------------------------------------------------------

/// Run a sweep from a JSON config string (the CLI's config schema); returns
/// (records_csv, summary_json). Byte-stable for identical configs.
#[pyfunction]
fn run_sweep(config_json: &str) -> PyResult<(String, String)> {
    let cfg = verify::SweepConfig::from_json(config_json).map_err(py_err)?;
    let outcome = verify::run_sweep(&cfg).map_err(py_err)?;
    let mut csv = Vec::new();
    verify::emit_records_csv(&outcome.records, &mut csv, "memory").map_err(py_err)?;
    let mut summary = Vec::new();
    verify::emit_summary_json(&outcome.summary, &mut summary, "memory").map_err(py_err)?;
    Ok((
        String::from_utf8(csv).expect("csv is utf-8"),
        String::from_utf8(summary).expect("json is utf-8"),
    ))
}

#[pymodule]
fn mlaguerre_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(log_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(log_pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(q_value, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre_uv, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre_uv_recurrence, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_1f1, m)?)?;
    m.add_function(wrap_pyfunction!(szego_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rooney_bound_1, m)?)?;
    m.add_function(wrap_pyfunction!(rooney_bound_2, m)?)?;
    m.add_function(wrap_pyfunction!(lewandowski_szynal_bound, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre_mv, m)?)?;
    m.add_function(wrap_pyfunction!(gf_expansion_coeff, m)?)?;
    m.add_function(wrap_pyfunction!(phi2k, m)?)?;
    m.add_function(wrap_pyfunction!(diagonal_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(panda_reduce_check, m)?)?;
    m.add_function(wrap_pyfunction!(chain_check, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_bound, m)?)?;
    m.add_function(wrap_pyfunction!(theorem2_bound, m)?)?;
    m.add_function(wrap_pyfunction!(ab_ratio_ln, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_asymptote, m)?)?;
    m.add_function(wrap_pyfunction!(adjudicate_asymptote, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_moment, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_sample, m)?)?;
    m.add_function(wrap_pyfunction!(integral_repr_check, m)?)?;
    m.add_function(wrap_pyfunction!(specialization_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
