//! Envelope bounds for the multivariate Laguerre polynomials.
//!
//! The two main bounds (for `alpha > 0` resp. an extended `alpha` range):
//!
//! ```text
//! |L_n(x)| <= 2^{k-1} (alpha+1)_{|n|} / ((1/k)_{n_1} ... (1/k)_{n_k}) * e^{||x||/2}
//! |L_n(x)| <= q_{n_1}...q_{n_k} 2^{k-1/2} (alpha+1)_{|n|} / ((1/(2k))_{n_1} ...) * e^{||x||/2}
//! ```
//!
//! plus their diagonal envelopes `A_n(alpha,k)`, `B_n(alpha,k)` at
//! `n_1 = ... = n_k = n`, the closed-form asymptote of `A_n/B_n` in both the
//! printed and the independently derived form (they differ by an inverted
//! Gamma ratio; [`fit_ratio_exponent`] adjudicates numerically), and an exact
//! comparator that certifies `|L| <= bound` in pure rational arithmetic by
//! raising the bound to an even power and bracketing the exponential with a
//! truncated Taylor series plus remainder bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::laguerre_mv::{laguerre_mv, EvalPoint, MultiIndex};
use crate::numerics::{
    log_gamma, log_pochhammer, pochhammer, q_ln_squared, q_ln_squared_at, q_squared, to_f64_lossy,
    LogValue, Rational, Scalar,
};

/// Which inequality a bound value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundSource {
    Szego,
    Rooney1,
    Rooney2,
    LewandowskiSzynal,
    Theorem1,
    Theorem2,
}

impl BoundSource {
    pub const ALL: [BoundSource; 6] = [
        BoundSource::Szego,
        BoundSource::Rooney1,
        BoundSource::Rooney2,
        BoundSource::LewandowskiSzynal,
        BoundSource::Theorem1,
        BoundSource::Theorem2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundSource::Szego => "szego",
            BoundSource::Rooney1 => "rooney1",
            BoundSource::Rooney2 => "rooney2",
            BoundSource::LewandowskiSzynal => "lewandowski_szynal",
            BoundSource::Theorem1 => "theorem1",
            BoundSource::Theorem2 => "theorem2",
        }
    }
}

impl std::fmt::Display for BoundSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BoundSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "szego" => Ok(BoundSource::Szego),
            "rooney1" => Ok(BoundSource::Rooney1),
            "rooney2" => Ok(BoundSource::Rooney2),
            "lewandowski_szynal" => Ok(BoundSource::LewandowskiSzynal),
            "theorem1" => Ok(BoundSource::Theorem1),
            "theorem2" => Ok(BoundSource::Theorem2),
            other => {
                let names: Vec<&str> = BoundSource::ALL.iter().map(|b| b.name()).collect();
                Err(Error::Parse(format!(
                    "unknown bound source {other:?} (expected one of {})",
                    names.join(", ")
                )))
            }
        }
    }
}

/// A bound split into exactly representable factors:
/// `bound = rational * 2^{pow2} * sqrt(q_square) * e^{exp_arg}`.
///
/// Keeping the pieces separate lets the comparator below certify
/// `|value| <= bound` (or a genuine violation) without ever rounding.
#[derive(Clone, Debug)]
pub struct ExactBoundExpr {
    pub rational: Rational,
    pub pow2: Rational,
    pub q_square: Rational,
    pub exp_arg: Rational,
}

/// Rational lower/upper brackets of `e^t` for rational `t >= 0`:
/// the truncated Taylor sum, and the sum plus a geometric remainder bound.
pub fn exp_bracket(t: &Rational) -> (Rational, Rational) {
    assert!(!t.is_negative(), "exp bracket needs t >= 0");
    let t_ceil = t.ceil().to_integer().to_usize().unwrap_or(0);
    let n_terms = 4 * t_ceil + 32;
    let mut sum = Rational::one();
    let mut term = Rational::one();
    for j in 1..=n_terms {
        term = term * t / Rational::from(BigInt::from(j as u64));
        sum += &term;
    }
    // remainder <= t^{N+1}/(N+1)! * 1/(1 - t/(N+2)), and t/(N+2) <= 1/4 here
    let next = &term * t / Rational::from(BigInt::from(n_terms as u64 + 1));
    let damping = Rational::one() - t / Rational::from(BigInt::from(n_terms as u64 + 2));
    let upper = &sum + next / damping;
    (sum, upper)
}

fn two_pow_int(e: &BigInt) -> Rational {
    let mag = e.magnitude().to_usize().expect("moderate exponent");
    if e.is_negative() {
        Rational::new(BigInt::one(), BigInt::one() << mag)
    } else {
        Rational::from(BigInt::one() << mag)
    }
}

fn power(base: &Rational, e: usize) -> Rational {
    let mut acc = Rational::one();
    let mut b = base.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

/// Outcome of an exact comparison of `|value|` against a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactComparison {
    /// Certified `|value| <= bound`.
    Holds,
    /// Certified `|value| > bound`.
    Violated,
    /// The brackets were too wide (or the exponents too wild) to separate
    /// the two sides.
    Undecided,
}

impl ExactBoundExpr {
    /// Natural log of the bound value.
    pub fn ln(&self) -> f64 {
        LogValue::from_rational(&self.rational).ln_abs()
            + to_f64_lossy(&self.pow2) * std::f64::consts::LN_2
            + 0.5 * LogValue::from_rational(&self.q_square).ln_abs()
            + to_f64_lossy(&self.exp_arg)
    }

    /// The bound as a float (`+inf` when out of range).
    pub fn to_f64(&self) -> f64 {
        self.ln().exp()
    }

    /// Exact three-way comparison of `|value|` against the bound.
    ///
    /// Both sides are raised to the even power `m = lcm(2, den(pow2))`, which
    /// clears the square root and the dyadic exponent; the exponential factor
    /// `e^{m t}` is bracketed rationally. Everything else is exact, so the
    /// only undecided window is the bracket width (~1e-25 relative).
    pub fn compare_abs(&self, abs_value: &Rational) -> ExactComparison {
        debug_assert!(!abs_value.is_negative());
        let den = self.pow2.denom().to_usize().unwrap_or(usize::MAX);
        if den > 64 {
            return ExactComparison::Undecided;
        }
        let m = 2usize.lcm(&den);
        let lhs = power(abs_value, m);
        let core = power(&self.rational, m)
            * two_pow_int(&(&self.pow2 * Rational::from(BigInt::from(m as u64))).to_integer())
            * power(&self.q_square, m / 2);
        let m_t = &self.exp_arg * Rational::from(BigInt::from(m as u64));
        let (exp_low, exp_high) = exp_bracket(&m_t);
        if lhs <= &core * exp_low {
            ExactComparison::Holds
        } else if lhs > core * exp_high {
            ExactComparison::Violated
        } else {
            ExactComparison::Undecided
        }
    }
}

/// A bound value with its provenance, inputs, and measured tightness.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub source: BoundSource,
    pub n: MultiIndex,
    pub alpha: Scalar,
    pub x: EvalPoint,
    /// The bound as a float; `+inf` when the coefficient leaves f64 range.
    pub bound: f64,
    /// Natural log of the bound (always finite).
    pub ln_bound: f64,
    /// `|L|/bound`, when evaluating the polynomial was feasible.
    pub tightness: Option<f64>,
    /// Exact factorization of the bound, available on exact inputs.
    pub exact: Option<ExactBoundExpr>,
}

/// Exact evaluations for tightness are attempted only up to this total degree.
const TIGHTNESS_TOTAL_CAP: usize = 60;

fn check_coords_nonneg(x: &EvalPoint) -> Result<()> {
    let ok = match x.exact_coords() {
        Some(coords) => coords.iter().all(|c| !c.is_negative()),
        None => x.f64_coords().iter().all(|&v| v >= 0.0),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain("bound requires all coordinates >= 0".into()))
    }
}

/// Exact coefficient pieces of the first main bound (exponential not yet set):
/// `rational = (alpha+1)_{|n|} / prod (1/k)_{n_j}`, `pow2 = k-1`.
pub fn theorem1_parts(n: &MultiIndex, alpha: &Rational) -> ExactBoundExpr {
    let k = n.k();
    let ap1 = alpha + Rational::one();
    let mut rational = pochhammer(&ap1, n.total());
    let inv_k = Rational::new(BigInt::one(), BigInt::from(k as u64));
    for &nj in n.entries() {
        rational /= pochhammer(&inv_k, nj);
    }
    ExactBoundExpr {
        rational,
        pow2: Rational::from(BigInt::from(k as i64 - 1)),
        q_square: Rational::one(),
        exp_arg: Rational::zero(),
    }
}

/// Exact coefficient pieces of the second main bound:
/// `rational = (alpha+1)_{|n|} / prod (1/(2k))_{n_j}`, `pow2 = k-1/2`,
/// `q_square = prod q_{n_j}^2`.
pub fn theorem2_parts(n: &MultiIndex, alpha: &Rational) -> ExactBoundExpr {
    let k = n.k();
    let ap1 = alpha + Rational::one();
    let mut rational = pochhammer(&ap1, n.total());
    let inv_2k = Rational::new(BigInt::one(), BigInt::from(2 * k as u64));
    let mut q_square = Rational::one();
    for &nj in n.entries() {
        rational /= pochhammer(&inv_2k, nj);
        q_square *= q_squared(nj);
    }
    ExactBoundExpr {
        rational,
        pow2: Rational::new(BigInt::from(2 * k as i64 - 1), BigInt::from(2)),
        q_square,
        exp_arg: Rational::zero(),
    }
}

fn theorem_domain_check(
    source: BoundSource,
    k: usize,
    alpha: &Scalar,
    extended: bool,
) -> Result<()> {
    let a = alpha.to_f64();
    match source {
        BoundSource::Theorem1 => {
            // at k = 1 this is exactly Szegő's inequality, whose domain
            // includes alpha = 0
            let ok = if k == 1 { a >= 0.0 } else { a > 0.0 };
            if !ok {
                return Err(Error::Domain(format!(
                    "first main bound requires alpha > 0 (alpha >= 0 at k = 1), got {alpha}"
                )));
            }
        }
        BoundSource::Theorem2 => {
            let limit_ok = if extended { a > -1.0 } else { a > -0.5 };
            if !limit_ok {
                return Err(Error::Domain(format!(
                    "second main bound requires alpha > {}, got {alpha}",
                    if extended {
                        "-1 (extended mode)"
                    } else {
                        "-1/2"
                    }
                )));
            }
        }
        _ => unreachable!("theorem_domain_check is for the two main bounds"),
    }
    Ok(())
}

fn finish_report(
    source: BoundSource,
    n: &MultiIndex,
    alpha: &Scalar,
    x: &EvalPoint,
    parts: Option<ExactBoundExpr>,
    ln_coeff_float: f64,
) -> Result<BoundReport> {
    let norm_half = x.max_norm_f64() / 2.0;
    let (ln_bound, exact) = match (parts, x.max_norm_exact()) {
        (Some(mut p), Some(norm)) => {
            p.exp_arg = norm / Rational::from(BigInt::from(2));
            let ln = p.ln();
            (ln, Some(p))
        }
        (Some(p), None) => (p.ln() + norm_half, None),
        (None, _) => (ln_coeff_float + norm_half, None),
    };
    let bound = ln_bound.exp();
    let tightness = if n.total() <= TIGHTNESS_TOTAL_CAP {
        match laguerre_mv(n, alpha, x) {
            Ok(Scalar::Exact(v)) => {
                let ln_v = LogValue::from_rational(&v).ln_abs();
                Some((ln_v - ln_bound).exp())
            }
            Ok(Scalar::Float(v)) => Some((v.abs().ln() - ln_bound).exp()),
            Err(_) => None,
        }
    } else {
        None
    };
    Ok(BoundReport {
        source,
        n: n.clone(),
        alpha: alpha.clone(),
        x: x.clone(),
        bound,
        ln_bound,
        tightness,
        exact,
    })
}

/// The first main bound
/// `2^{k-1} (alpha+1)_{|n|} / prod (1/k)_{n_j} * e^{||x||/2}`,
/// for `alpha > 0` (at `k = 1`, Szegő's domain `alpha >= 0`).
pub fn theorem1_bound(n: &MultiIndex, alpha: &Scalar, x: &EvalPoint) -> Result<BoundReport> {
    assert_eq!(n.k(), x.k());
    theorem_domain_check(BoundSource::Theorem1, n.k(), alpha, false)?;
    check_coords_nonneg(x)?;
    match alpha {
        Scalar::Exact(a) => finish_report(
            BoundSource::Theorem1,
            n,
            alpha,
            x,
            Some(theorem1_parts(n, a)),
            0.0,
        ),
        Scalar::Float(a) => {
            let k = n.k();
            let ln_coeff = (k as f64 - 1.0) * std::f64::consts::LN_2
                + log_pochhammer(a + 1.0, n.total())?.ln_abs()
                - n.entries()
                    .iter()
                    .map(|&nj| log_pochhammer(1.0 / k as f64, nj).map(|v| v.ln_abs()))
                    .sum::<Result<f64>>()?;
            finish_report(BoundSource::Theorem1, n, alpha, x, None, ln_coeff)
        }
    }
}

/// The second main bound
/// `q_{n_1}...q_{n_k} 2^{k-1/2} (alpha+1)_{|n|} / prod (1/(2k))_{n_j} * e^{||x||/2}`.
///
/// Default domain `alpha > -1/2` (what the proof supports); `extended` opts
/// into the stated `alpha > -1` range, which callers report without asserting.
pub fn theorem2_bound(
    n: &MultiIndex,
    alpha: &Scalar,
    x: &EvalPoint,
    extended: bool,
) -> Result<BoundReport> {
    assert_eq!(n.k(), x.k());
    theorem_domain_check(BoundSource::Theorem2, n.k(), alpha, extended)?;
    check_coords_nonneg(x)?;
    match alpha {
        Scalar::Exact(a) => finish_report(
            BoundSource::Theorem2,
            n,
            alpha,
            x,
            Some(theorem2_parts(n, a)),
            0.0,
        ),
        Scalar::Float(a) => {
            let k = n.k();
            let ln_coeff = (k as f64 - 0.5) * std::f64::consts::LN_2
                + log_pochhammer(a + 1.0, n.total())?.ln_abs()
                + n.entries()
                    .iter()
                    .map(|&nj| 0.5 * q_ln_squared(nj))
                    .sum::<f64>()
                - n.entries()
                    .iter()
                    .map(|&nj| log_pochhammer(1.0 / (2.0 * k as f64), nj).map(|v| v.ln_abs()))
                    .sum::<Result<f64>>()?;
            finish_report(BoundSource::Theorem2, n, alpha, x, None, ln_coeff)
        }
    }
}

/// Diagonal envelopes `A_n(alpha,k)` and `B_n(alpha,k)` in the log domain,
/// valid for any `n`. The exact cross-check route for desk-scale `n` is
/// [`theorem1_parts`]/[`theorem2_parts`] at the constant multi-index.
pub fn ab_coefficients(n: usize, alpha: f64, k: usize) -> Result<(LogValue, LogValue)> {
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!(
            "diagonal envelopes need alpha > -1, got {alpha}"
        )));
    }
    let ln2 = std::f64::consts::LN_2;
    let ln_poch_top = log_pochhammer(alpha + 1.0, k * n)?.ln_abs();
    let ln_a = (k as f64 - 1.0) * ln2 + ln_poch_top
        - k as f64 * log_pochhammer(1.0 / k as f64, n)?.ln_abs();
    let ln_b = (k as f64 - 0.5) * ln2 + ln_poch_top + k as f64 * 0.5 * q_ln_squared(n)
        - k as f64 * log_pochhammer(1.0 / (2.0 * k as f64), n)?.ln_abs();
    Ok((LogValue::new(1, ln_a), LogValue::new(1, ln_b)))
}

/// `ln(A_n/B_n)` for each requested `n`; independent of `alpha` (the
/// Pochhammer tops cancel exactly).
pub fn ab_ratio_ln_at(ns: &[usize], k: usize) -> Result<Vec<f64>> {
    let ln2 = std::f64::consts::LN_2;
    let q_lns = q_ln_squared_at(ns);
    let g_2k = log_gamma(1.0 / (2.0 * k as f64))?;
    let g_k = log_gamma(1.0 / k as f64)?;
    ns.iter()
        .zip(q_lns)
        .map(|(&n, q_ln)| {
            let poch_2k = log_gamma(1.0 / (2.0 * k as f64) + n as f64)? - g_2k;
            let poch_k = log_gamma(1.0 / k as f64 + n as f64)? - g_k;
            Ok(-0.5 * ln2 - k as f64 * 0.5 * q_ln + k as f64 * (poch_2k - poch_k))
        })
        .collect()
}

/// Exact sign of `A_n - B_n` (alpha-independent): compares
/// `(A/B)^2 = 2^{-1} q_n^{-2k} ((1/(2k))_n / (1/k)_n)^{2k}` against 1.
pub fn ab_compare_exact(n: usize, k: usize) -> std::cmp::Ordering {
    let inv_k = Rational::new(BigInt::one(), BigInt::from(k as u64));
    let inv_2k = Rational::new(BigInt::one(), BigInt::from(2 * k as u64));
    let poch_ratio = pochhammer(&inv_2k, n) / pochhammer(&inv_k, n);
    let ratio_sq =
        power(&poch_ratio, 2 * k) / (power(&q_squared(n), k) * Rational::from(BigInt::from(2)));
    ratio_sq.cmp(&Rational::one())
}

/// Which closed form of the `A_n/B_n` asymptote constant to use. The two
/// published candidates differ by an inverted Gamma ratio; the exact-ratio
/// oracle adjudicates between them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymptoteForm {
    /// Gamma ratio as printed in the literature: `(Gamma(1/(2k)) / Gamma(1/k))^k`.
    Printed,
    /// Inverted ratio from the Pochhammer-to-Gamma conversion:
    /// `(Gamma(1/k) / Gamma(1/(2k)))^k`.
    Derived,
}

impl std::fmt::Display for AsymptoteForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AsymptoteForm::Printed => write!(f, "printed"),
            AsymptoteForm::Derived => write!(f, "derived"),
        }
    }
}

/// Closed-form asymptote `c(k) * n^{k/4 - 1/2}` of `A_n/B_n`.
pub fn ratio_asymptote(n: usize, k: usize, form: AsymptoteForm) -> Result<f64> {
    assert!(n >= 1, "asymptote needs n >= 1");
    Ok(asymptote_constant(k, form)? * (n as f64).powf(k as f64 / 4.0 - 0.5))
}

/// The constant `2^{(k-1)/2} pi^{k/4} (gamma ratio)^k` of the asymptote.
pub fn asymptote_constant(k: usize, form: AsymptoteForm) -> Result<f64> {
    let ln_ratio = match form {
        AsymptoteForm::Printed => log_gamma(1.0 / (2.0 * k as f64))? - log_gamma(1.0 / k as f64)?,
        AsymptoteForm::Derived => log_gamma(1.0 / k as f64)? - log_gamma(1.0 / (2.0 * k as f64))?,
    };
    Ok(((k as f64 - 1.0) / 2.0 * std::f64::consts::LN_2
        + k as f64 / 4.0 * std::f64::consts::PI.ln()
        + k as f64 * ln_ratio)
        .exp())
}

/// Least-squares fit of `ln(A_n/B_n)` against `ln n` over the largest half of
/// `n_list`; the slope estimates the exponent `k/4 - 1/2`.
///
/// Requires at least four strictly increasing entries `>= 1`, capped at `10^6`.
pub fn fit_ratio_exponent(k: usize, n_list: &[usize]) -> Result<(f64, f64)> {
    if n_list.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "ratio-exponent fit needs >= 4 points, got {}",
            n_list.len()
        )));
    }
    if !n_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Domain("n_list must be strictly increasing".into()));
    }
    if *n_list.last().unwrap() > 1_000_000 {
        return Err(Error::CapExceeded("ratio fit capped at n = 10^6".into()));
    }
    if n_list[0] == 0 {
        return Err(Error::Domain("ratio fit needs n >= 1".into()));
    }
    let upper_half = &n_list[n_list.len() / 2..];
    let lns = ab_ratio_ln_at(upper_half, k)?;
    let xs: Vec<f64> = upper_half.iter().map(|&n| (n as f64).ln()).collect();
    let n_pts = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n_pts;
    let mean_y = lns.iter().sum::<f64>() / n_pts;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&lns) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    Ok((slope, intercept))
}
