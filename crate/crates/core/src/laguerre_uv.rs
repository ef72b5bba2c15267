//! Univariate Laguerre polynomials `L_n^{(alpha)}(x)` and their classical bounds.
//!
//! Two independent evaluation routes are provided and cross-checked:
//!
//! - [`laguerre_uv`]: the explicit confluent-hypergeometric form
//!   `L_n^{(alpha)}(x) = ((1+alpha)_n / n!) 1F1(-n; alpha+1; x)`,
//! - [`laguerre_uv_recurrence`]: the three-term recurrence
//!   `(m+1) L_{m+1} = (2m+1+alpha-x) L_m - (m+alpha) L_{m-1}`,
//!
//! plus the truncated Kummer series [`kummer_1f1`] used by the majorization
//! chain, and the four classical envelope bounds:
//!
//! - Szegő:               `(alpha+1)_n / n! * e^{x/2}`       for `alpha >= 0`,
//! - Rooney (first):      `2^{-alpha} e^{x/2}`               for `alpha <= 0`,
//! - Rooney (second):     `q_n 2^{-alpha} e^{x/2}`           for `alpha <= -1/2`,
//! - Lewandowski–Szynal:  `(alpha+1)_n / n! * sigma_n^{(alpha)}(e^x)` for `alpha >= -1/2`,
//!
//! where `sigma_n^{(alpha)}(e^x) = (n!/(alpha+1)_n) sum_{k=0}^{n} ((alpha+1)_{n-k}/(n-k)!) x^k/k!`.
//!
//! Both evaluators run exactly on rational inputs and in compensated floating
//! point otherwise; there is no mixed mode.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numerics::{pochhammer, q_float, to_f64_lossy, Rational, Scalar};

/// One univariate evaluation request: degree `n`, parameter `alpha`, argument `x`.
#[derive(Clone, Debug)]
pub struct UnivariateQuery {
    pub n: usize,
    pub alpha: Scalar,
    pub x: Scalar,
}

impl UnivariateQuery {
    pub fn new(n: usize, alpha: impl Into<Scalar>, x: impl Into<Scalar>) -> Self {
        UnivariateQuery {
            n,
            alpha: alpha.into(),
            x: x.into(),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.alpha.is_exact() && self.x.is_exact()
    }

    fn alpha_f64(&self) -> f64 {
        self.alpha.to_f64()
    }

    fn x_f64(&self) -> f64 {
        self.x.to_f64()
    }
}

/// Pole condition of the explicit form: `alpha+1` a non-positive integer in
/// `{0, -1, ..., -(n-1)}` makes a `(alpha+1)_j` denominator vanish before the
/// series terminates.
fn explicit_pole(n: usize, alpha_plus_1: &Rational) -> bool {
    if n == 0 || !alpha_plus_1.is_integer() {
        return false;
    }
    let v = alpha_plus_1.to_integer();
    !v.is_positive() && -v < BigInt::from(n as u64)
}

fn explicit_pole_f64(n: usize, alpha_plus_1: f64) -> bool {
    n > 0 && alpha_plus_1 <= 0.0 && alpha_plus_1.fract() == 0.0 && -alpha_plus_1 < n as f64
}

/// Explicit-formula evaluation on exact rational inputs.
pub fn laguerre_explicit_exact(n: usize, alpha: &Rational, x: &Rational) -> Result<Rational> {
    let ap1 = alpha + Rational::one();
    if explicit_pole(n, &ap1) {
        return Err(Error::Pole(format!(
            "L_n explicit form undefined: alpha+1 = {ap1} is a non-positive integer > -{n}"
        )));
    }
    // term recurrence of 1F1(-n; alpha+1; x)
    let mut sum = Rational::one();
    let mut term = Rational::one();
    for j in 0..n {
        let numer = Rational::from(BigInt::from(j as i64) - BigInt::from(n as i64)) * x;
        let denom = (&ap1 + Rational::from(BigInt::from(j as u64)))
            * Rational::from(BigInt::from(j as u64 + 1));
        term = term * numer / denom;
        sum += &term;
    }
    let mut prefactor = pochhammer(&ap1, n);
    for i in 1..=n {
        prefactor /= Rational::from(BigInt::from(i as u64));
    }
    Ok(prefactor * sum)
}

/// Explicit-formula evaluation in compensated (Kahan) floating point.
pub fn laguerre_explicit_f64(n: usize, alpha: f64, x: f64) -> Result<f64> {
    let ap1 = alpha + 1.0;
    if explicit_pole_f64(n, ap1) {
        return Err(Error::Pole(format!(
            "L_n explicit form undefined: alpha+1 = {ap1} is a non-positive integer > -{n}"
        )));
    }
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    for j in 0..n {
        term *= (j as f64 - n as f64) * x / ((ap1 + j as f64) * (j as f64 + 1.0));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let mut prefactor = 1.0f64;
    for i in 0..n {
        prefactor *= (ap1 + i as f64) / (i as f64 + 1.0);
    }
    Ok(prefactor * sum)
}

/// Three-term recurrence on exact rational inputs; total (no poles).
pub fn laguerre_recurrence_exact(n: usize, alpha: &Rational, x: &Rational) -> Rational {
    if n == 0 {
        return Rational::one();
    }
    let mut prev = Rational::one();
    let mut cur = alpha + Rational::one() - x;
    for m in 1..n {
        let mf = Rational::from(BigInt::from(m as u64));
        let a = (&mf + &mf + Rational::one() + alpha - x) * &cur;
        let b = (&mf + alpha) * &prev;
        let next = (a - b) / (mf + Rational::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Three-term recurrence in floats.
pub fn laguerre_recurrence_f64(n: usize, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0f64;
    let mut cur = alpha + 1.0 - x;
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + alpha - x) * cur - (mf + alpha) * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_n^{(alpha)}(x)` through the explicit confluent-hypergeometric form.
/// Exact on rational inputs; signals a pole when `alpha+1` is a non-positive
/// integer greater than `-n`.
pub fn laguerre_uv(q: &UnivariateQuery) -> Result<Scalar> {
    match (&q.alpha, &q.x) {
        (Scalar::Exact(a), Scalar::Exact(x)) => {
            Ok(Scalar::Exact(laguerre_explicit_exact(q.n, a, x)?))
        }
        _ => Ok(Scalar::Float(laguerre_explicit_f64(
            q.n,
            q.alpha_f64(),
            q.x_f64(),
        )?)),
    }
}

/// `L_n^{(alpha)}(x)` through the three-term recurrence; defined everywhere.
pub fn laguerre_uv_recurrence(q: &UnivariateQuery) -> Scalar {
    match (&q.alpha, &q.x) {
        (Scalar::Exact(a), Scalar::Exact(x)) => Scalar::Exact(laguerre_recurrence_exact(q.n, a, x)),
        _ => Scalar::Float(laguerre_recurrence_f64(q.n, q.alpha_f64(), q.x_f64())),
    }
}

/// Kummer's function `1F1(a; c; y)` as a truncated non-negative-term series.
///
/// Truncates once the next term falls below `tol` times the current partial
/// sum. Restricted to `a >= 0`, `c > 0`, `y >= 0` (all terms non-negative),
/// which covers every use in the majorization chain.
pub fn kummer_1f1(a: f64, c: f64, y: f64, tol: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("kummer_1f1 requires c > 0, got {c}")));
    }
    if !(a >= 0.0) {
        return Err(Error::Domain(format!(
            "kummer_1f1 requires a >= 0, got {a}"
        )));
    }
    if !(y >= 0.0) {
        return Err(Error::Domain(format!(
            "kummer_1f1 requires y >= 0, got {y}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "kummer_1f1 requires tol > 0, got {tol}"
        )));
    }
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    for j in 0..100_000u64 {
        let jf = j as f64;
        term *= (a + jf) * y / ((c + jf) * (jf + 1.0));
        if term < tol * sum {
            return Ok(sum + term);
        }
        sum += term;
    }
    Err(Error::CapExceeded(format!(
        "kummer_1f1({a}, {c}, {y}) did not stagnate within 100000 terms"
    )))
}

fn require_x_nonneg(q: &UnivariateQuery) -> Result<()> {
    let ok = match &q.x {
        Scalar::Exact(x) => !x.is_negative(),
        Scalar::Float(x) => *x >= 0.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "bound requires x >= 0, got x = {}",
            q.x
        )))
    }
}

fn alpha_cmp(q: &UnivariateQuery, threshold: &Rational) -> std::cmp::Ordering {
    match &q.alpha {
        Scalar::Exact(a) => a.cmp(threshold),
        Scalar::Float(a) => a
            .partial_cmp(&to_f64_lossy(threshold))
            .expect("alpha is not NaN"),
    }
}

/// Exact Szegő coefficient `(alpha+1)_n / n!`.
pub fn szego_coeff_exact(n: usize, alpha: &Rational) -> Rational {
    let mut c = pochhammer(&(alpha + Rational::one()), n);
    for i in 1..=n {
        c /= Rational::from(BigInt::from(i as u64));
    }
    c
}

/// Szegő's bound `(alpha+1)_n / n! * e^{x/2}`, valid for `alpha >= 0`, `x >= 0`.
pub fn szego_bound(q: &UnivariateQuery) -> Result<f64> {
    require_x_nonneg(q)?;
    if alpha_cmp(q, &Rational::zero()) == std::cmp::Ordering::Less {
        return Err(Error::Domain(format!(
            "Szegő bound requires alpha >= 0, got alpha = {}",
            q.alpha
        )));
    }
    let coeff = match &q.alpha {
        Scalar::Exact(a) => to_f64_lossy(&szego_coeff_exact(q.n, a)),
        Scalar::Float(a) => {
            let mut c = 1.0;
            for i in 0..q.n {
                c *= (a + 1.0 + i as f64) / (i as f64 + 1.0);
            }
            c
        }
    };
    Ok(coeff * (q.x_f64() / 2.0).exp())
}

/// Rooney's first bound `2^{-alpha} e^{x/2}`, valid for `alpha <= 0`, `x >= 0`.
pub fn rooney_bound_1(q: &UnivariateQuery) -> Result<f64> {
    require_x_nonneg(q)?;
    if alpha_cmp(q, &Rational::zero()) == std::cmp::Ordering::Greater {
        return Err(Error::Domain(format!(
            "Rooney's first bound requires alpha <= 0, got alpha = {}",
            q.alpha
        )));
    }
    Ok((q.x_f64() / 2.0 - q.alpha_f64() * std::f64::consts::LN_2).exp())
}

/// Rooney's second bound `q_n 2^{-alpha} e^{x/2}`, valid for `alpha <= -1/2`, `x >= 0`.
pub fn rooney_bound_2(q: &UnivariateQuery) -> Result<f64> {
    require_x_nonneg(q)?;
    let half = Rational::new(BigInt::from(-1), BigInt::from(2));
    if alpha_cmp(q, &half) == std::cmp::Ordering::Greater {
        return Err(Error::Domain(format!(
            "Rooney's second bound requires alpha <= -1/2, got alpha = {}",
            q.alpha
        )));
    }
    Ok(q_float(q.n) * (q.x_f64() / 2.0 - q.alpha_f64() * std::f64::consts::LN_2).exp())
}

/// Exact Lewandowski–Szynal bound value
/// `sum_{k=0}^{n} (alpha+1)_{n-k}/(n-k)! * x^k/k!` (a degree-`n` polynomial in `x`).
pub fn ls_bound_exact(n: usize, alpha: &Rational, x: &Rational) -> Rational {
    let ap1 = alpha + Rational::one();
    let mut total = Rational::zero();
    let mut x_pow_over_fact = Rational::one();
    for k in 0..=n {
        if k > 0 {
            x_pow_over_fact = x_pow_over_fact * x / Rational::from(BigInt::from(k as u64));
        }
        total += szego_coeff_term(&ap1, n - k) * &x_pow_over_fact;
    }
    total
}

fn szego_coeff_term(ap1: &Rational, m: usize) -> Rational {
    let mut c = pochhammer(ap1, m);
    for i in 1..=m {
        c /= Rational::from(BigInt::from(i as u64));
    }
    c
}

/// Lewandowski–Szynal bound `(alpha+1)_n/n! * sigma_n^{(alpha)}(e^x)`,
/// valid for `alpha >= -1/2`, `x >= 0`. Polynomial in `x` (no exponential),
/// hence sharper than Szegő for large `x`.
pub fn lewandowski_szynal_bound(q: &UnivariateQuery) -> Result<f64> {
    require_x_nonneg(q)?;
    let neg_half = Rational::new(BigInt::from(-1), BigInt::from(2));
    if alpha_cmp(q, &neg_half) == std::cmp::Ordering::Less {
        return Err(Error::Domain(format!(
            "Lewandowski–Szynal bound requires alpha >= -1/2, got alpha = {}",
            q.alpha
        )));
    }
    match (&q.alpha, &q.x) {
        (Scalar::Exact(a), Scalar::Exact(x)) => Ok(to_f64_lossy(&ls_bound_exact(q.n, a, x))),
        _ => {
            let a = q.alpha_f64();
            let x = q.x_f64();
            let mut total = 0.0;
            let mut x_pow_over_fact = 1.0;
            for k in 0..=q.n {
                if k > 0 {
                    x_pow_over_fact *= x / k as f64;
                }
                let m = q.n - k;
                let mut c = 1.0;
                for i in 0..m {
                    c *= (a + 1.0 + i as f64) / (i as f64 + 1.0);
                }
                total += c * x_pow_over_fact;
            }
            Ok(total)
        }
    }
}
