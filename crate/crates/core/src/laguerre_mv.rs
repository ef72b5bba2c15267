//! Multivariate Laguerre polynomials `L_{n_1,...,n_k}^{(alpha)}(x)` and the
//! series identities behind their envelope bounds.
//!
//! Three mutually independent evaluation routes are provided:
//!
//! - [`laguerre_mv`]: the explicit formula
//!   `L = ((alpha+1)_{|n|} / (n_1! ... n_k!)) Phi2[-n_1,...,-n_k; alpha+1; x]`
//!   through the confluent Lauricella series [`phi2k`],
//! - [`gf_expansion_coeff`]: the closed coefficient formula obtained by
//!   expanding `(1-s)^{-alpha-1-|p|}` and distributing powers of
//!   `s = z_1 + ... + z_k` multinomially,
//! - [`gf_truncated_series`]: brute-force Taylor expansion of the generating
//!   function `(1-s)^{-alpha-1} exp(-(x_1 z_1 + ... + x_k z_k)/(1-s))` by
//!   truncated multivariate series arithmetic — slow, maximally independent.
//!
//! plus [`diagonal_sequence`] (`n_1 = ... = n_k = n` extraction),
//! [`panda_reduce_check`] (the multiple-to-single series reduction used in
//! both bound proofs), and [`chain_check`] (the majorization chain
//! `Phi2 <= 1F1 <= e^{||x||/2}` that closes them).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::laguerre_uv::kummer_1f1;
use crate::numerics::{pochhammer, Rational, Scalar};

/// Vector of polynomial degrees `(n_1, ..., n_k)` with its cached total `|n|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: Vec<usize>,
    total: usize,
}

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        assert!(!entries.is_empty(), "multi-index needs k >= 1");
        let total = entries.iter().sum();
        MultiIndex { entries, total }
    }

    /// The constant index `(n, n, ..., n)` in `k` coordinates.
    pub fn constant(k: usize, n: usize) -> Self {
        MultiIndex::new(vec![n; k])
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Evaluation point `(x_1, ..., x_k)`; coordinates all exact or all float in
/// practice (mixed points are evaluated through the float path).
#[derive(Clone, Debug, PartialEq)]
pub struct EvalPoint {
    coords: Vec<Scalar>,
}

impl EvalPoint {
    pub fn new(coords: Vec<Scalar>) -> Self {
        assert!(!coords.is_empty(), "evaluation point needs k >= 1");
        EvalPoint { coords }
    }

    pub fn exact(coords: Vec<Rational>) -> Self {
        EvalPoint::new(coords.into_iter().map(Scalar::Exact).collect())
    }

    pub fn floats(coords: Vec<f64>) -> Self {
        EvalPoint::new(coords.into_iter().map(Scalar::Float).collect())
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn is_exact(&self) -> bool {
        self.coords.iter().all(Scalar::is_exact)
    }

    pub fn exact_coords(&self) -> Option<Vec<Rational>> {
        self.coords.iter().map(|c| c.as_exact().cloned()).collect()
    }

    pub fn f64_coords(&self) -> Vec<f64> {
        self.coords.iter().map(Scalar::to_f64).collect()
    }

    /// `||x|| = max_j |x_j|` in floats.
    pub fn max_norm_f64(&self) -> f64 {
        self.f64_coords().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `||x||` exactly, when all coordinates are exact.
    pub fn max_norm_exact(&self) -> Option<Rational> {
        let coords = self.exact_coords()?;
        let mut best = coords[0].abs();
        for c in &coords[1..] {
            let a = c.abs();
            if a > best {
                best = a;
            }
        }
        Some(best)
    }
}

/// `(c)_j` vanishes for some reachable `j <= max_j`?
fn denominator_pole(c: &Rational, max_j: usize) -> bool {
    if max_j == 0 || !c.is_integer() {
        return false;
    }
    let v = c.to_integer();
    !v.is_positive() && -v < BigInt::from(max_j as u64)
}

pub(crate) fn factorial(n: usize) -> Rational {
    let mut f = BigInt::one();
    for i in 2..=n {
        f *= BigInt::from(i as u64);
    }
    Rational::from(f)
}

/// Sum over `{j : j_l <= caps[l], |j| = remaining}` of `prod_l u[l][j_l]`,
/// walking coordinates recursively. Caps are the ladder lengths.
fn layer_sum_exact(u: &[Vec<Rational>], coord: usize, remaining: usize) -> Rational {
    if coord == u.len() - 1 {
        return match u[coord].get(remaining) {
            Some(v) => v.clone(),
            None => Rational::zero(),
        };
    }
    let mut acc = Rational::zero();
    let cap = u[coord].len() - 1;
    for j in 0..=remaining.min(cap) {
        let tail = layer_sum_exact(u, coord + 1, remaining - j);
        if !tail.is_zero() {
            acc += &u[coord][j] * tail;
        }
    }
    acc
}

fn layer_sum_f64(u: &[Vec<f64>], coord: usize, remaining: usize) -> f64 {
    if coord == u.len() - 1 {
        return u[coord].get(remaining).copied().unwrap_or(0.0);
    }
    let mut acc = 0.0;
    let cap = u[coord].len() - 1;
    for j in 0..=remaining.min(cap) {
        acc += u[coord][j] * layer_sum_f64(u, coord + 1, remaining - j);
    }
    acc
}

/// The confluent Lauricella series
/// `Phi2[b_1,...,b_k; c; x] = sum_j prod_l ((b_l)_{j_l} x_l^{j_l}/j_l!) / (c)_{|j|}`,
/// exactly.
///
/// When every `b_l` is a non-positive integer the series is a finite sum and
/// `trunc` is ignored; otherwise the sum runs through total degree `trunc`
/// (a missing cap is an error). A vanishing reachable denominator `(c)_j`
/// signals a pole.
pub fn phi2k(
    b: &[Rational],
    c: &Rational,
    x: &[Rational],
    trunc: Option<usize>,
) -> Result<Rational> {
    assert_eq!(b.len(), x.len(), "parameter/point dimension mismatch");
    let finite_caps: Option<Vec<usize>> = b
        .iter()
        .map(|bl| {
            if bl.is_integer() && !bl.to_integer().is_positive() {
                Some((-bl.to_integer()).try_into().expect("small cap"))
            } else {
                None
            }
        })
        .collect();
    let (caps, max_total): (Vec<usize>, usize) = match finite_caps {
        Some(caps) => {
            let total = caps.iter().sum();
            (caps, total)
        }
        None => {
            let d = trunc.ok_or_else(|| {
                Error::MissingTruncation(
                    "Phi2 with non-polynomial parameters needs a degree cap".into(),
                )
            })?;
            (vec![d; b.len()], d)
        }
    };
    if denominator_pole(c, max_total) {
        return Err(Error::Pole(format!(
            "Phi2 denominator (c)_j vanishes: c = {c} with reachable total degree {max_total}"
        )));
    }
    // per-coordinate term ladders u_l[j] = (b_l)_j x_l^j / j!
    let u: Vec<Vec<Rational>> = b
        .iter()
        .zip(x)
        .zip(&caps)
        .map(|((bl, xl), &cap)| {
            let mut ladder = Vec::with_capacity(cap + 1);
            ladder.push(Rational::one());
            let mut t = Rational::one();
            for j in 0..cap {
                t = t * (bl + Rational::from(BigInt::from(j as u64))) * xl
                    / Rational::from(BigInt::from(j as u64 + 1));
                ladder.push(t.clone());
            }
            ladder
        })
        .collect();
    let mut total = Rational::zero();
    let mut c_poch = Rational::one(); // (c)_d
    for d in 0..=max_total {
        if d > 0 {
            c_poch *= c + Rational::from(BigInt::from(d as u64 - 1));
        }
        let layer = layer_sum_exact(&u, 0, d);
        if !layer.is_zero() {
            total += layer / &c_poch;
        }
    }
    Ok(total)
}

/// Float route of [`phi2k`]. Finite series are summed fully; infinite series
/// are truncated by total degree with a stagnation rule: stop once three
/// consecutive degree layers each contribute less than `tol` times the
/// partial sum (tol defaults to 1e-14).
pub fn phi2k_f64(
    b: &[f64],
    c: f64,
    x: &[f64],
    trunc: Option<usize>,
    tol: Option<f64>,
) -> Result<f64> {
    assert_eq!(b.len(), x.len(), "parameter/point dimension mismatch");
    const HARD_CAP: usize = 2048;
    let tol = tol.unwrap_or(1e-14);
    let finite_caps: Option<Vec<usize>> = b
        .iter()
        .map(|&bl| {
            if bl <= 0.0 && bl.fract() == 0.0 {
                Some((-bl) as usize)
            } else {
                None
            }
        })
        .collect();
    let finite = finite_caps.is_some();
    let (caps, max_total): (Vec<usize>, usize) = match finite_caps {
        Some(caps) => {
            let total = caps.iter().sum();
            (caps, total)
        }
        None => {
            let d = trunc.unwrap_or(HARD_CAP);
            (vec![d; b.len()], d)
        }
    };
    if c <= 0.0 && c.fract() == 0.0 && ((-c) as usize) < max_total {
        return Err(Error::Pole(format!(
            "Phi2 denominator (c)_j vanishes: c = {c} with reachable total degree {max_total}"
        )));
    }
    let mut u: Vec<Vec<f64>> = b.iter().map(|_| vec![1.0]).collect();
    let mut total = 0.0f64;
    let mut c_poch = 1.0f64;
    let mut quiet_layers = 0usize;
    for d in 0..=max_total {
        if d > 0 {
            c_poch *= c + (d - 1) as f64;
            for (l, ladder) in u.iter_mut().enumerate() {
                if ladder.len() <= caps[l] {
                    let j = ladder.len() - 1;
                    let next = ladder[j] * (b[l] + j as f64) * x[l] / (j as f64 + 1.0);
                    ladder.push(next);
                }
            }
        }
        let layer = layer_sum_f64(&u, 0, d) / c_poch;
        total += layer;
        if !finite && trunc.is_none() {
            if layer.abs() < tol * total.abs() {
                quiet_layers += 1;
                if quiet_layers >= 3 {
                    return Ok(total);
                }
            } else {
                quiet_layers = 0;
            }
        }
    }
    if finite || trunc.is_some() {
        Ok(total)
    } else {
        Err(Error::CapExceeded(format!(
            "Phi2 series did not stagnate within {HARD_CAP} degree layers"
        )))
    }
}

fn laguerre_mv_pole(total: usize, alpha_plus_1: &Rational) -> Result<()> {
    if denominator_pole(alpha_plus_1, total) {
        return Err(Error::Pole(format!(
            "multivariate Laguerre undefined: alpha+1 = {alpha_plus_1} is a non-positive \
             integer of magnitude < |n| = {total}"
        )));
    }
    Ok(())
}

/// The explicit multivariate formula, exactly:
/// `L = ((alpha+1)_{|n|} / prod n_l!) Phi2[-n_1,...,-n_k; alpha+1; x]`.
pub fn laguerre_mv_exact(n: &MultiIndex, alpha: &Rational, x: &[Rational]) -> Result<Rational> {
    assert_eq!(n.k(), x.len(), "index/point dimension mismatch");
    let ap1 = alpha + Rational::one();
    laguerre_mv_pole(n.total(), &ap1)?;
    let b: Vec<Rational> = n
        .entries()
        .iter()
        .map(|&nl| Rational::from(-BigInt::from(nl as u64)))
        .collect();
    let phi = phi2k(&b, &ap1, x, None)?;
    let mut pref = pochhammer(&ap1, n.total());
    for &nl in n.entries() {
        pref /= factorial(nl);
    }
    Ok(pref * phi)
}

/// The explicit multivariate formula in floats.
pub fn laguerre_mv_f64(n: &MultiIndex, alpha: f64, x: &[f64]) -> Result<f64> {
    assert_eq!(n.k(), x.len(), "index/point dimension mismatch");
    let ap1 = alpha + 1.0;
    if ap1 <= 0.0 && ap1.fract() == 0.0 && ((-ap1) as usize) < n.total() {
        return Err(Error::Pole(format!(
            "multivariate Laguerre undefined: alpha+1 = {ap1} with |n| = {}",
            n.total()
        )));
    }
    let b: Vec<f64> = n.entries().iter().map(|&nl| -(nl as f64)).collect();
    let phi = phi2k_f64(&b, ap1, x, None, None)?;
    let mut pref = 1.0f64;
    for j in 0..n.total() {
        pref *= ap1 + j as f64;
    }
    for &nl in n.entries() {
        for i in 1..=nl {
            pref /= i as f64;
        }
    }
    Ok(pref * phi)
}

/// Dispatching front end: exact when `alpha` and every coordinate are exact,
/// floats otherwise (no mixed mode).
pub fn laguerre_mv(n: &MultiIndex, alpha: &Scalar, x: &EvalPoint) -> Result<Scalar> {
    match (alpha, x.exact_coords()) {
        (Scalar::Exact(a), Some(coords)) => Ok(Scalar::Exact(laguerre_mv_exact(n, a, &coords)?)),
        _ => Ok(Scalar::Float(laguerre_mv_f64(
            n,
            alpha.to_f64(),
            &x.f64_coords(),
        )?)),
    }
}

/// Coefficient of `z^n` in the generating function, by the closed formula
/// `sum_{p <= n} prod_l ((-x_l)^{p_l}/p_l!) (alpha+1+|p|)_{|n|-|p|} prod_l 1/(n_l-p_l)!`.
///
/// Polynomial in `alpha`, hence defined everywhere; agrees with
/// [`laguerre_mv_exact`] identically wherever both are defined.
pub fn gf_expansion_coeff(n: &MultiIndex, alpha: &Rational, x: &[Rational]) -> Rational {
    assert_eq!(n.k(), x.len(), "index/point dimension mismatch");
    let ap1 = alpha + Rational::one();
    // v_l[p] = (-x_l)^p / (p! (n_l - p)!)
    let v: Vec<Vec<Rational>> = n
        .entries()
        .iter()
        .zip(x)
        .map(|(&nl, xl)| {
            let mut ladder = Vec::with_capacity(nl + 1);
            let mut pow = Rational::one();
            for p in 0..=nl {
                if p > 0 {
                    pow = pow * -xl / Rational::from(BigInt::from(p as u64));
                }
                ladder.push(&pow / factorial(nl - p));
            }
            ladder
        })
        .collect();
    // tail[m] = (alpha+1+m)_{|n|-m}
    let total = n.total();
    let mut tail = vec![Rational::one(); total + 1];
    for m in (0..total).rev() {
        let factor = &ap1 + Rational::from(BigInt::from(m as u64));
        tail[m] = &tail[m + 1] * factor;
    }

    fn walk(
        v: &[Vec<Rational>],
        coord: usize,
        partial: Rational,
        depth: usize,
        tail: &[Rational],
        acc: &mut Rational,
    ) {
        if coord == v.len() {
            *acc += partial * &tail[depth];
            return;
        }
        for (p, vp) in v[coord].iter().enumerate() {
            if vp.is_zero() {
                continue;
            }
            walk(v, coord + 1, &partial * vp, depth + p, tail, acc);
        }
    }

    let mut acc = Rational::zero();
    walk(&v, 0, Rational::one(), 0, &tail, &mut acc);
    acc
}

/// Flattened float coefficient table of the polynomial `L_n^{(alpha)}`:
/// entry at odometer position `p` (last coordinate fastest) holds
/// `(-1)^{|p|} (alpha+1+|p|)_{|n|-|p|} / prod_l (p_l! (n_l-p_l)!)`,
/// so that `L(x) = sum_p c_p prod_l x_l^{p_l}`.
///
/// Built once per `(n, alpha)` and reused across many evaluation points,
/// this is the sweep engine's fast path.
pub fn coefficient_table_f64(n: &MultiIndex, alpha: &Rational) -> Vec<f64> {
    let total = n.total();
    let ap1 = alpha + Rational::one();
    let mut tail = vec![Rational::one(); total + 1];
    for m in (0..total).rev() {
        let factor = &ap1 + Rational::from(BigInt::from(m as u64));
        tail[m] = &tail[m + 1] * factor;
    }
    let caps = n.entries();
    let mut out = Vec::with_capacity(caps.iter().map(|c| c + 1).product());
    let mut p = vec![0usize; caps.len()];
    loop {
        let depth: usize = p.iter().sum();
        let mut c = tail[depth].clone();
        for (l, &pl) in p.iter().enumerate() {
            c /= factorial(pl) * factorial(caps[l] - pl);
        }
        if depth % 2 == 1 {
            c = -c;
        }
        out.push(crate::numerics::to_f64_lossy(&c));
        let mut coord = caps.len();
        loop {
            if coord == 0 {
                return out;
            }
            coord -= 1;
            p[coord] += 1;
            if p[coord] <= caps[coord] {
                break;
            }
            p[coord] = 0;
        }
    }
}

/// Evaluate a [`coefficient_table_f64`] table against per-coordinate power
/// ladders `pows[l][p] = x_l^p` (each ladder at least `caps[l]+1` long).
pub fn eval_coefficient_table(coeffs: &[f64], caps: &[usize], pows: &[&[f64]]) -> f64 {
    fn rec(coeffs: &[f64], caps: &[usize], pows: &[&[f64]], coord: usize, offset: usize) -> f64 {
        if coord == caps.len() - 1 {
            let mut acc = 0.0;
            for p in 0..=caps[coord] {
                acc += coeffs[offset + p] * pows[coord][p];
            }
            return acc;
        }
        let stride: usize = caps[coord + 1..].iter().map(|c| c + 1).product();
        let mut acc = 0.0;
        for p in 0..=caps[coord] {
            acc += pows[coord][p] * rec(coeffs, caps, pows, coord + 1, offset + p * stride);
        }
        acc
    }
    rec(coeffs, caps, pows, 0, 0)
}

/// A multivariate power series truncated at a total-degree cap, with exact
/// coefficients stored sparsely in lexicographic key order.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMvSeries {
    k: usize,
    degree_cap: usize,
    coeffs: BTreeMap<Vec<usize>, Rational>,
}

impl TruncatedMvSeries {
    pub fn zero(k: usize, degree_cap: usize) -> Self {
        TruncatedMvSeries {
            k,
            degree_cap,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(k: usize, degree_cap: usize, value: Rational) -> Self {
        let mut s = TruncatedMvSeries::zero(k, degree_cap);
        if !value.is_zero() {
            s.coeffs.insert(vec![0; k], value);
        }
        s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    /// Coefficient at `idx` (zero when absent). Panics on wrong arity.
    pub fn coeff(&self, idx: &[usize]) -> Rational {
        assert_eq!(idx.len(), self.k);
        self.coeffs.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.coeffs.iter()
    }

    fn insert(&mut self, idx: Vec<usize>, value: Rational) {
        if idx.iter().sum::<usize>() <= self.degree_cap && !value.is_zero() {
            self.coeffs.insert(idx, value);
        }
    }

    fn add_assign(&mut self, other: &TruncatedMvSeries) {
        for (idx, v) in &other.coeffs {
            let entry = self
                .coeffs
                .entry(idx.clone())
                .or_insert_with(Rational::zero);
            *entry += v;
            if entry.is_zero() {
                self.coeffs.remove(idx);
            }
        }
    }

    fn scaled(&self, factor: &Rational) -> TruncatedMvSeries {
        let mut out = TruncatedMvSeries::zero(self.k, self.degree_cap);
        if factor.is_zero() {
            return out;
        }
        for (idx, v) in &self.coeffs {
            out.coeffs.insert(idx.clone(), v * factor);
        }
        out
    }

    /// Truncated product: terms beyond the degree cap are dropped.
    pub fn mul(&self, other: &TruncatedMvSeries) -> TruncatedMvSeries {
        assert_eq!(self.k, other.k);
        let cap = self.degree_cap.min(other.degree_cap);
        let mut out = TruncatedMvSeries::zero(self.k, cap);
        for (ia, va) in &self.coeffs {
            let da: usize = ia.iter().sum();
            if da > cap {
                continue;
            }
            for (ib, vb) in &other.coeffs {
                let db: usize = ib.iter().sum();
                if da + db > cap {
                    continue;
                }
                let idx: Vec<usize> = ia.iter().zip(ib).map(|(a, b)| a + b).collect();
                let entry = out.coeffs.entry(idx).or_insert_with(Rational::zero);
                *entry += va * vb;
            }
        }
        out.coeffs.retain(|_, v| !v.is_zero());
        out
    }
}

/// Default safety cap for the brute-force generating-function expansion.
pub const GF_SERIES_DEFAULT_CAP: usize = 12;

/// Brute-force truncated Taylor expansion of
/// `(1 - s)^{-alpha-1} exp(-(x_1 z_1 + ... + x_k z_k)/(1 - s))`, `s = z_1 + ... + z_k`,
/// through total degree `degree_cap`.
///
/// The coefficient at each index equals the multivariate Laguerre value there;
/// this is the slow, maximally-independent oracle.
pub fn gf_truncated_series(
    alpha: &Rational,
    x: &[Rational],
    degree_cap: usize,
    safety_cap: usize,
) -> Result<TruncatedMvSeries> {
    if degree_cap > safety_cap {
        return Err(Error::CapExceeded(format!(
            "generating-function expansion capped at total degree {safety_cap}, asked {degree_cap}"
        )));
    }
    let k = x.len();
    let cap = degree_cap;
    let ap1 = alpha + Rational::one();

    // s = z_1 + ... + z_k
    let mut s = TruncatedMvSeries::zero(k, cap);
    for l in 0..k {
        let mut idx = vec![0; k];
        idx[l] = 1;
        s.insert(idx, Rational::one());
    }
    // w = -(x_1 z_1 + ... + x_k z_k)
    let mut w = TruncatedMvSeries::zero(k, cap);
    for (l, xl) in x.iter().enumerate() {
        let mut idx = vec![0; k];
        idx[l] = 1;
        w.insert(idx, -xl.clone());
    }

    // powers of s feed both (1-s)^{-alpha-1} and 1/(1-s)
    let mut binom = TruncatedMvSeries::constant(k, cap, Rational::one());
    let mut geom = TruncatedMvSeries::constant(k, cap, Rational::one());
    let mut s_pow = TruncatedMvSeries::constant(k, cap, Rational::one());
    let mut binom_coeff = Rational::one(); // (alpha+1)_m / m!
    for m in 1..=cap {
        s_pow = s_pow.mul(&s);
        binom_coeff = binom_coeff * (&ap1 + Rational::from(BigInt::from(m as u64 - 1)))
            / Rational::from(BigInt::from(m as u64));
        binom.add_assign(&s_pow.scaled(&binom_coeff));
        geom.add_assign(&s_pow);
    }

    // u = w / (1-s); exp(u) = sum u^m / m!
    let u = w.mul(&geom);
    let mut expo = TruncatedMvSeries::constant(k, cap, Rational::one());
    let mut u_pow = TruncatedMvSeries::constant(k, cap, Rational::one());
    let mut inv_fact = Rational::one();
    for m in 1..=cap {
        u_pow = u_pow.mul(&u);
        inv_fact /= Rational::from(BigInt::from(m as u64));
        expo.add_assign(&u_pow.scaled(&inv_fact));
    }

    Ok(binom.mul(&expo))
}

/// Default total-degree cap for exact diagonal extraction.
pub const DIAGONAL_DEFAULT_CAP: usize = 64;

/// The diagonal sequence `L_{n,...,n}^{(alpha)}(x)` for `n = 0..=n_max`,
/// exactly. Errors when `n_max * k` exceeds `total_degree_cap`.
pub fn diagonal_sequence(
    alpha: &Rational,
    x: &[Rational],
    n_max: usize,
    total_degree_cap: usize,
) -> Result<Vec<Rational>> {
    let k = x.len();
    if n_max * k > total_degree_cap {
        return Err(Error::CapExceeded(format!(
            "diagonal total degree {} exceeds cap {total_degree_cap}",
            n_max * k
        )));
    }
    (0..=n_max)
        .map(|n| laguerre_mv_exact(&MultiIndex::constant(k, n), alpha, x))
        .collect()
}

/// Coefficient rule `C(j)` of the Panda reduction.
#[derive(Clone, Debug)]
pub enum CoefficientRule {
    /// `C(j) = 1`.
    One,
    /// `C(j) = 1 / (base)_j`.
    InversePochhammer { base: Rational },
}

impl CoefficientRule {
    fn value(&self, j: usize) -> Result<Rational> {
        match self {
            CoefficientRule::One => Ok(Rational::one()),
            CoefficientRule::InversePochhammer { base } => {
                let p = pochhammer(base, j);
                if p.is_zero() {
                    return Err(Error::Pole(format!(
                        "coefficient rule 1/({base})_j hits a zero at j = {j}"
                    )));
                }
                Ok(p.recip())
            }
        }
    }
}

/// Outcome of the Panda-reduction identity check: both coefficient vectors
/// (degree 0..=cap of the common argument) and their equality verdict.
#[derive(Clone, Debug)]
pub struct PandaCheck {
    pub equal: bool,
    pub multiple_series: Vec<Rational>,
    pub single_series: Vec<Rational>,
}

/// Degree-by-degree comparison of the reduction
/// `sum_j C(|j|) prod_l (a_l)_{j_l} x^{|j|}/prod_l j_l!  =  sum_j C(j) (a_1+...+a_k)_j x^j/j!`,
/// exactly, through degree `degree_cap`.
pub fn panda_reduce_check(
    alphas: &[Rational],
    rule: &CoefficientRule,
    degree_cap: usize,
) -> Result<PandaCheck> {
    assert!(!alphas.is_empty());
    let mut lhs = Vec::with_capacity(degree_cap + 1);
    let mut rhs = Vec::with_capacity(degree_cap + 1);
    // per-coordinate ladders (a_l)_j / j!
    let u: Vec<Vec<Rational>> = alphas
        .iter()
        .map(|al| {
            let mut ladder = vec![Rational::one()];
            let mut t = Rational::one();
            for j in 0..degree_cap {
                t = t * (al + Rational::from(BigInt::from(j as u64)))
                    / Rational::from(BigInt::from(j as u64 + 1));
                ladder.push(t.clone());
            }
            ladder
        })
        .collect();
    let alpha_sum: Rational = alphas.iter().fold(Rational::zero(), |acc, a| acc + a);
    let mut single_poch = Rational::one();
    for d in 0..=degree_cap {
        if d > 0 {
            single_poch *= &alpha_sum + Rational::from(BigInt::from(d as u64 - 1));
        }
        let c = rule.value(d)?;
        lhs.push(&c * layer_sum_exact(&u, 0, d));
        rhs.push(c * &single_poch / factorial(d));
    }
    Ok(PandaCheck {
        equal: lhs == rhs,
        multiple_series: lhs,
        single_series: rhs,
    })
}

/// Which proof's parameter family a chain check runs under.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainVariant {
    /// Numerator parameters `1/k`, Kummer numerator 1; needs `alpha > 0`.
    Theorem1,
    /// Numerator parameters `1/(2k)`, Kummer numerator 1/2; needs `alpha > -1/2`.
    Theorem2,
}

impl std::fmt::Display for ChainVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChainVariant::Theorem1 => write!(f, "theorem1"),
            ChainVariant::Theorem2 => write!(f, "theorem2"),
        }
    }
}

/// The three ascending values of the majorization chain
/// `Phi2[b,...,b; alpha+1; x/2] <= 1F1(a; alpha+1; ||x||/2) <= e^{||x||/2}`.
#[derive(Clone, Copy, Debug)]
pub struct ChainValues {
    pub phi2: f64,
    pub kummer: f64,
    pub exponential: f64,
}

impl ChainValues {
    /// Both inequalities hold up to a relative guard.
    pub fn ascending(&self, rel_tol: f64) -> bool {
        self.phi2 <= self.kummer * (1.0 + rel_tol)
            && self.kummer <= self.exponential * (1.0 + rel_tol)
    }
}

/// Evaluate the majorization chain for `k` variables at `alpha`, `x`.
pub fn chain_check(k: usize, alpha: f64, x: &[f64], variant: ChainVariant) -> Result<ChainValues> {
    assert_eq!(x.len(), k);
    match variant {
        ChainVariant::Theorem1 if !(alpha > 0.0) => {
            return Err(Error::Domain(format!(
                "chain check (first variant) requires alpha > 0, got {alpha}"
            )));
        }
        ChainVariant::Theorem2 if !(alpha > -0.5) => {
            return Err(Error::Domain(format!(
                "chain check (second variant) requires alpha > -1/2, got {alpha}"
            )));
        }
        _ => {}
    }
    if x.iter().any(|&v| v < 0.0) {
        return Err(Error::Domain(
            "chain check requires non-negative coordinates".into(),
        ));
    }
    let (b_val, a_val) = match variant {
        ChainVariant::Theorem1 => (1.0 / k as f64, 1.0),
        ChainVariant::Theorem2 => (1.0 / (2.0 * k as f64), 0.5),
    };
    let b = vec![b_val; k];
    let half_x: Vec<f64> = x.iter().map(|v| v / 2.0).collect();
    let norm = x.iter().fold(0.0f64, |m, v| m.max(*v));
    let phi2 = phi2k_f64(&b, alpha + 1.0, &half_x, None, None)?;
    let kummer = kummer_1f1(a_val, alpha + 1.0, norm / 2.0, 1e-15)?;
    Ok(ChainValues {
        phi2,
        kummer,
        exponential: (norm / 2.0).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laguerre_uv::laguerre_recurrence_exact;
    use crate::numerics::ratio;
    use crate::numerics::to_f64_lossy;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn phi2_finite_example() {
        // b = (-1,-1), c = 2, x = (2,2): 1 - 1 - 1 + 2/3 = -1/3
        let v = phi2k(
            &[ratio(-1, 1), ratio(-1, 1)],
            &ratio(2, 1),
            &[ratio(2, 1), ratio(2, 1)],
            None,
        )
        .unwrap();
        assert_eq!(v, ratio(-1, 3));
    }

    #[test]
    fn phi2_zero_parameters() {
        let v = phi2k(
            &[ratio(0, 1), ratio(0, 1), ratio(0, 1)],
            &ratio(7, 3),
            &[ratio(5, 1), ratio(1, 2), ratio(9, 4)],
            None,
        )
        .unwrap();
        assert_eq!(v, Rational::one());
    }

    #[test]
    fn phi2_infinite_needs_cap() {
        let r = phi2k(
            &[ratio(1, 2), ratio(1, 2)],
            &ratio(2, 1),
            &[ratio(1, 2), ratio(1, 2)],
            None,
        );
        assert!(matches!(r, Err(Error::MissingTruncation(_))));
    }

    #[test]
    fn phi2_majorized_by_kummer() {
        // truncated Phi2[1/2,1/2; 2; (1/2,1/2)] stays below the single-series
        // majorant 1F1(1;2;1/2) = 2(sqrt(e)-1) ~ 1.29744
        let v = phi2k(
            &[ratio(1, 2), ratio(1, 2)],
            &ratio(2, 1),
            &[ratio(1, 2), ratio(1, 2)],
            Some(60),
        )
        .unwrap();
        let vf = to_f64_lossy(&v);
        let limit = kummer_1f1(1.0, 2.0, 0.5, 1e-15).unwrap();
        assert!(vf <= limit * (1.0 + 1e-13), "{vf} > {limit}");
        assert!(vf <= 1.29744 + 1e-5);
    }

    #[test]
    fn phi2_pole_detection() {
        // c = -2 reachable when total degree can hit 3
        let r = phi2k(
            &[ratio(-2, 1), ratio(-1, 1)],
            &ratio(-2, 1),
            &[ratio(1, 1), ratio(1, 1)],
            None,
        );
        assert!(matches!(r, Err(Error::Pole(_))));
        // not reachable when the series stops at total degree 2
        let r = phi2k(
            &[ratio(-1, 1), ratio(-1, 1)],
            &ratio(-2, 1),
            &[ratio(1, 1), ratio(1, 1)],
            None,
        );
        assert!(r.is_ok());
    }

    #[test]
    fn phi2_float_matches_exact() {
        let b = [ratio(1, 3), ratio(2, 5)];
        let c = ratio(3, 2);
        let x = [ratio(1, 2), ratio(3, 4)];
        let exact = phi2k(&b, &c, &x, Some(48)).unwrap();
        let fl = phi2k_f64(&[1.0 / 3.0, 0.4], 1.5, &[0.5, 0.75], None, None).unwrap();
        let e = to_f64_lossy(&exact);
        assert!((fl - e).abs() <= 1e-10 * e.abs(), "float {fl} vs exact {e}");
    }

    #[test]
    fn laguerre_mv_low_order_examples() {
        // all-zero index -> 1
        let n = MultiIndex::new(vec![0, 0, 0]);
        let v =
            laguerre_mv_exact(&n, &ratio(5, 7), &[ratio(1, 1), ratio(2, 1), ratio(3, 1)]).unwrap();
        assert_eq!(v, Rational::one());
        // k=2, n=(1,1), alpha=1, x=(2,2) -> -2
        let n = MultiIndex::new(vec![1, 1]);
        let v = laguerre_mv_exact(&n, &ratio(1, 1), &[ratio(2, 1), ratio(2, 1)]).unwrap();
        assert_eq!(v, ratio(-2, 1));
    }

    #[test]
    fn laguerre_mv_11_closed_form() {
        // L_{1,1} = (alpha+1)(alpha+2) - (alpha+2)(x1+x2) + x1 x2
        let n = MultiIndex::new(vec![1, 1]);
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..25 {
            let a = ratio(rng.random_range(-3..12), rng.random_range(1..7));
            let x1 = ratio(rng.random_range(0..30), rng.random_range(1..5));
            let x2 = ratio(rng.random_range(0..30), rng.random_range(1..5));
            let expect = (&a + ratio(1, 1)) * (&a + ratio(2, 1)) - (&a + ratio(2, 1)) * (&x1 + &x2)
                + &x1 * &x2;
            if let Ok(v) = laguerre_mv_exact(&n, &a, &[x1.clone(), x2.clone()]) {
                assert_eq!(v, expect, "alpha={a} x=({x1},{x2})");
            }
            assert_eq!(gf_expansion_coeff(&n, &a, &[x1, x2]), expect);
        }
    }

    #[test]
    fn univariate_collapse_ignores_zero_indexed_coords() {
        // (n,0,0) with arbitrary trailing coordinates equals L_n(x_1)
        for nn in 0..=6usize {
            let n = MultiIndex::new(vec![nn, 0, 0]);
            let a = ratio(1, 3);
            let x1 = ratio(7, 2);
            let v = laguerre_mv_exact(&n, &a, &[x1.clone(), ratio(99, 1), ratio(-4, 3)]).unwrap();
            assert_eq!(v, laguerre_recurrence_exact(nn, &a, &x1));
        }
    }

    #[test]
    fn value_at_origin_is_pochhammer_over_factorials() {
        let n = MultiIndex::new(vec![2, 3, 1]);
        let a = ratio(-2, 5);
        let v = laguerre_mv_exact(
            &n,
            &a,
            &[Rational::zero(), Rational::zero(), Rational::zero()],
        )
        .unwrap();
        let expect =
            pochhammer(&(&a + ratio(1, 1)), 6) / (factorial(2) * factorial(3) * factorial(1));
        assert_eq!(v, expect);
    }

    #[test]
    fn laguerre_mv_pole_detection() {
        let n = MultiIndex::new(vec![2, 1]);
        assert!(matches!(
            laguerre_mv_exact(&n, &ratio(-1, 1), &[ratio(1, 1), ratio(1, 1)]),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            laguerre_mv_exact(&n, &ratio(-3, 1), &[ratio(1, 1), ratio(1, 1)]),
            Err(Error::Pole(_))
        ));
        // magnitude |n| itself is fine: alpha+1 = -3 with |n| = 3
        assert!(laguerre_mv_exact(&n, &ratio(-4, 1), &[ratio(1, 1), ratio(1, 1)]).is_ok());
    }

    #[test]
    fn float_path_matches_exact() {
        let n = MultiIndex::new(vec![2, 3]);
        let exact = laguerre_mv_exact(&n, &ratio(1, 4), &[ratio(3, 2), ratio(7, 4)]).unwrap();
        let fl = laguerre_mv_f64(&n, 0.25, &[1.5, 1.75]).unwrap();
        let e = to_f64_lossy(&exact);
        assert!((fl - e).abs() <= 1e-10 * e.abs().max(1.0));
        // dispatch picks the exact path on exact inputs
        let v = laguerre_mv(
            &n,
            &Scalar::Exact(ratio(1, 4)),
            &EvalPoint::exact(vec![ratio(3, 2), ratio(7, 4)]),
        )
        .unwrap();
        assert!(v.is_exact());
    }

    #[test]
    fn gf_series_small_against_known_values() {
        // k=2, alpha=0, x=(1,1): coefficient at (1,1) is 2 - 2*2 + 1 = -1
        let s = gf_truncated_series(&ratio(0, 1), &[ratio(1, 1), ratio(1, 1)], 4, 12).unwrap();
        assert_eq!(s.coeff(&[0, 0]), Rational::one());
        assert_eq!(s.coeff(&[1, 1]), ratio(-1, 1));
        // k=1 column agrees with the univariate recurrence through degree 12
        let s = gf_truncated_series(&ratio(1, 2), &[ratio(5, 3)], 12, 12).unwrap();
        for n in 0..=12usize {
            assert_eq!(
                s.coeff(&[n]),
                laguerre_recurrence_exact(n, &ratio(1, 2), &ratio(5, 3)),
                "univariate column mismatch at n = {n}"
            );
        }
    }

    #[test]
    fn gf_series_cap_enforced() {
        let r = gf_truncated_series(&ratio(0, 1), &[ratio(1, 1)], 13, 12);
        assert!(matches!(r, Err(Error::CapExceeded(_))));
    }

    #[test]
    fn triple_oracle_agreement_sample() {
        let mut rng = ChaCha12Rng::seed_from_u64(1729);
        for _ in 0..12 {
            let k = rng.random_range(1..=3usize);
            let entries: Vec<usize> = (0..k).map(|_| rng.random_range(0..=3)).collect();
            let n = MultiIndex::new(entries);
            let a = ratio(rng.random_range(0..15), rng.random_range(1..4));
            let x: Vec<Rational> = (0..k)
                .map(|_| ratio(rng.random_range(0..20), rng.random_range(1..4)))
                .collect();
            let direct = laguerre_mv_exact(&n, &a, &x).unwrap();
            let coeff = gf_expansion_coeff(&n, &a, &x);
            let series = gf_truncated_series(&a, &x, n.total(), 12).unwrap();
            assert_eq!(direct, coeff, "n={n} alpha={a}");
            assert_eq!(direct, series.coeff(n.entries()), "n={n} alpha={a}");
        }
    }

    #[test]
    fn diagonal_examples() {
        // k=2, alpha=0, x=(1,1): entries 1, -1
        let d = diagonal_sequence(&ratio(0, 1), &[ratio(1, 1), ratio(1, 1)], 1, 64).unwrap();
        assert_eq!(d, vec![Rational::one(), ratio(-1, 1)]);
        // at the origin the diagonal entry is (2n)!/(n!)^2
        let d =
            diagonal_sequence(&ratio(0, 1), &[Rational::zero(), Rational::zero()], 5, 64).unwrap();
        for (n, v) in d.iter().enumerate() {
            let expect = factorial(2 * n) / (factorial(n) * factorial(n));
            assert_eq!(v, &expect, "origin diagonal at n = {n}");
        }
        // cap enforcement
        assert!(matches!(
            diagonal_sequence(&ratio(0, 1), &[ratio(1, 1), ratio(1, 1)], 40, 64),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn panda_reduction_examples() {
        // k=2, alphas=(1/2,1/2), C = 1: both sides give 1 at degree 2
        let check =
            panda_reduce_check(&[ratio(1, 2), ratio(1, 2)], &CoefficientRule::One, 6).unwrap();
        assert!(check.equal);
        assert_eq!(check.multiple_series[0], Rational::one());
        assert_eq!(check.multiple_series[2], Rational::one());
        // with the inverse-Pochhammer rule
        let check = panda_reduce_check(
            &[ratio(1, 3), ratio(1, 3), ratio(1, 3)],
            &CoefficientRule::InversePochhammer { base: ratio(7, 4) },
            10,
        )
        .unwrap();
        assert!(check.equal);
    }

    #[test]
    fn chain_examples() {
        // x = 0: all three values equal 1
        let c = chain_check(2, 1.0, &[0.0, 0.0], ChainVariant::Theorem1).unwrap();
        assert_eq!((c.phi2, c.kummer, c.exponential), (1.0, 1.0, 1.0));
        // k=2, alpha=1, x=(1,1): middle value 2(sqrt(e)-1), top sqrt(e)
        let c = chain_check(2, 1.0, &[1.0, 1.0], ChainVariant::Theorem1).unwrap();
        let mid = 2.0 * (0.5f64.exp() - 1.0);
        assert!((c.kummer - mid).abs() < 1e-12);
        assert!((c.exponential - 0.5f64.exp()).abs() < 1e-15);
        assert!(c.phi2 > 1.2 && c.phi2 < mid, "phi2 = {}", c.phi2);
        assert!(c.ascending(1e-12));
        // domain checks
        assert!(chain_check(2, 0.0, &[1.0, 1.0], ChainVariant::Theorem1).is_err());
        assert!(chain_check(2, -0.5, &[1.0, 1.0], ChainVariant::Theorem2).is_err());
        assert!(chain_check(2, 1.0, &[-1.0, 1.0], ChainVariant::Theorem1).is_err());
    }

    #[test]
    fn chain_monotone_in_coordinates() {
        let mut prev = 0.0f64;
        for step in 0..6 {
            let x = [0.7 * step as f64, 0.3 * step as f64];
            let c = chain_check(2, 0.5, &x, ChainVariant::Theorem2).unwrap();
            assert!(c.ascending(1e-12));
            assert!(c.phi2 >= prev, "phi2 not monotone at step {step}");
            prev = c.phi2;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn symmetry_under_simultaneous_permutation(
            n1 in 0usize..4, n2 in 0usize..4, n3 in 0usize..4,
            an in -2i64..10, ad in 1i64..5,
            x1 in 0i64..12, x2 in 0i64..12, x3 in 0i64..12,
        ) {
            let a = ratio(an, ad);
            let xs = [ratio(x1, 2), ratio(x2, 2), ratio(x3, 2)];
            let ns = [n1, n2, n3];
            let base = MultiIndex::new(ns.to_vec());
            prop_assume!(laguerre_mv_exact(&base, &a, &xs).is_ok());
            let v0 = laguerre_mv_exact(&base, &a, &xs).unwrap();
            for perm in [[1usize, 0, 2], [2, 1, 0], [1, 2, 0]] {
                let n_p = MultiIndex::new(perm.iter().map(|&i| ns[i]).collect());
                let x_p: Vec<Rational> = perm.iter().map(|&i| xs[i].clone()).collect();
                prop_assert_eq!(&laguerre_mv_exact(&n_p, &a, &x_p).unwrap(), &v0);
            }
        }

        #[test]
        fn explicit_equals_gf_coefficient(
            n1 in 0usize..4, n2 in 0usize..4,
            an in -2i64..10, ad in 1i64..5,
            x1 in 0i64..12, x2 in 0i64..12,
        ) {
            let a = ratio(an, ad);
            let n = MultiIndex::new(vec![n1, n2]);
            let x = [ratio(x1, 3), ratio(x2, 3)];
            prop_assume!(laguerre_mv_exact(&n, &a, &x).is_ok());
            prop_assert_eq!(
                laguerre_mv_exact(&n, &a, &x).unwrap(),
                gf_expansion_coeff(&n, &a, &x)
            );
        }
    }
}
