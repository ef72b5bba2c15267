//! Dirichlet measure on the standard simplex `E_k = {u : u_j >= 0, sum u_j <= 1}`
//! with density proportional to `u_1^{b_1-1} ... u_k^{b_k-1} (1 - sum u)^{beta-1}`.
//!
//! Provides exact rational moments, reproducible sampling by Gamma-variate
//! normalization (correct even for shape parameters below 1, where the density
//! is unbounded at the boundary and rejection sampling would be unusable), and
//! Monte-Carlo validation of the product integral representation
//!
//! ```text
//! L_{n}^{(a)}(x) = ((a+1)_{|n|} / prod (alpha_j+1)_{n_j})
//!                  * Int prod_j L_{n_j}^{(alpha_j)}(x_j u_j) dmu_{(alpha+1, beta+1)},
//! a = alpha_1 + ... + alpha_k + beta + k,
//! ```
//!
//! together with the two parameter specializations that open the envelope
//! bound proofs.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laguerre_mv::{laguerre_mv_exact, ChainVariant, MultiIndex};
use crate::laguerre_uv::laguerre_recurrence_f64;
use crate::numerics::{pochhammer, to_f64_lossy, Rational};

/// Dirichlet parameters `(b_1, ..., b_k, beta)`, all positive, kept exact.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletParams {
    b: Vec<Rational>,
    beta: Rational,
}

impl DirichletParams {
    pub fn new(b: Vec<Rational>, beta: Rational) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::Domain("Dirichlet needs k >= 1 parameters".into()));
        }
        if b.iter().any(|v| !v.is_positive()) || !beta.is_positive() {
            return Err(Error::Domain(
                "Dirichlet parameters must all be positive".into(),
            ));
        }
        Ok(DirichletParams { b, beta })
    }

    pub fn k(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    fn shapes_f64(&self) -> Vec<f64> {
        let mut shapes: Vec<f64> = self.b.iter().map(to_f64_lossy).collect();
        shapes.push(to_f64_lossy(&self.beta));
        shapes
    }
}

/// A sampled point of the open simplex: positive coordinates, sum below 1.
#[derive(Clone, Debug)]
pub struct SimplexPoint {
    u: Vec<f64>,
}

impl SimplexPoint {
    pub fn coords(&self) -> &[f64] {
        &self.u
    }
}

/// Exact moment `Int u_1^{j_1} ... u_k^{j_k} dmu = prod (b_l)_{j_l} / (b_1+...+b_k+beta)_{|j|}`.
pub fn dirichlet_moment(p: &DirichletParams, j: &MultiIndex) -> Rational {
    assert_eq!(p.k(), j.k(), "moment order has wrong arity");
    let mut numer = Rational::one();
    for (bl, &jl) in p.b.iter().zip(j.entries()) {
        numer *= pochhammer(bl, jl);
    }
    let total_param: Rational = p.b.iter().fold(p.beta.clone(), |acc, v| acc + v);
    numer / pochhammer(&total_param, j.total())
}

/// Truncated weighted moment sum `sum_{|j| <= cap} prod_l w_l^{j_l}/j_l! * moment(j)`.
///
/// Equals the truncated Lauricella value `Phi2[b; b_1+...+b_k+beta; w]` exactly;
/// the agreement of the two routes is one of the module's invariants.
pub fn moment_series_sum(p: &DirichletParams, w: &[Rational], cap: usize) -> Rational {
    assert_eq!(p.k(), w.len());
    // ladders w_l^{j}/j! * (b_l)_j reuse the moment factorization directly
    let ladders: Vec<Vec<Rational>> =
        p.b.iter()
            .zip(w)
            .map(|(bl, wl)| {
                let mut ladder = vec![Rational::one()];
                let mut t = Rational::one();
                for j in 0..cap {
                    t = t * (bl + Rational::from(BigInt::from(j as u64))) * wl
                        / Rational::from(BigInt::from(j as u64 + 1));
                    ladder.push(t.clone());
                }
                ladder
            })
            .collect();
    let total_param: Rational = p.b.iter().fold(p.beta.clone(), |acc, v| acc + v);
    let mut acc = Rational::zero();
    let mut denom_poch = Rational::one();
    for d in 0..=cap {
        if d > 0 {
            denom_poch *= &total_param + Rational::from(BigInt::from(d as u64 - 1));
        }
        let mut layer = Rational::zero();
        layer_walk(&ladders, 0, d, &Rational::one(), &mut layer);
        if !layer.is_zero() {
            acc += layer / &denom_poch;
        }
    }
    acc
}

fn layer_walk(
    ladders: &[Vec<Rational>],
    coord: usize,
    remaining: usize,
    partial: &Rational,
    acc: &mut Rational,
) {
    if coord == ladders.len() - 1 {
        if let Some(v) = ladders[coord].get(remaining) {
            *acc += partial * v;
        }
        return;
    }
    for j in 0..=remaining.min(ladders[coord].len() - 1) {
        let next = partial * &ladders[coord][j];
        layer_walk(ladders, coord + 1, remaining - j, &next, acc);
    }
}

fn sample_point<R: rand::Rng>(gammas: &[Gamma<f64>], rng: &mut R) -> SimplexPoint {
    // resample on the (measure-zero, float-underflow) degenerate draws so the
    // returned point is strictly interior
    for _ in 0..100 {
        let draws: Vec<f64> = gammas.iter().map(|g| g.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if !(total > 0.0) || draws.iter().any(|&v| v <= 0.0) {
            continue;
        }
        let u: Vec<f64> = draws[..draws.len() - 1].iter().map(|v| v / total).collect();
        if u.iter().sum::<f64>() < 1.0 {
            return SimplexPoint { u };
        }
    }
    // fall back to the barycenter; unreachable in practice
    let k = gammas.len() - 1;
    SimplexPoint {
        u: vec![1.0 / (k as f64 + 1.0); k],
    }
}

fn build_gammas(p: &DirichletParams) -> Result<Vec<Gamma<f64>>> {
    p.shapes_f64()
        .iter()
        .map(|&s| {
            Gamma::new(s, 1.0).map_err(|e| Error::Domain(format!("gamma shape {s} rejected: {e}")))
        })
        .collect()
}

/// Draw `count` points of `mu_{(b_1,...,b_k,beta)}`, deterministically from
/// `seed`: `k+1` independent Gamma variates with shapes `b_1,...,b_k,beta`,
/// normalized by their sum; the first `k` components are the point.
pub fn dirichlet_sample(p: &DirichletParams, seed: u64, count: usize) -> Result<Vec<SimplexPoint>> {
    if count == 0 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    let gammas = build_gammas(p)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| sample_point(&gammas, &mut rng))
        .collect())
}

/// Result of a Monte-Carlo check: the exact left side, the estimate, and the
/// standard error of the mean.
#[derive(Clone, Copy, Debug)]
pub struct McCheck {
    pub lhs: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McCheck {
    /// `|estimate - lhs|` in units of the standard error.
    pub fn z_score(&self) -> f64 {
        if self.std_error == 0.0 {
            if self.estimate == self.lhs {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate - self.lhs).abs() / self.std_error
        }
    }

    pub fn within_sigmas(&self, sigmas: f64) -> bool {
        self.z_score() <= sigmas
    }
}

/// Samples per deterministic substream; substream `s` is seeded `seed ^ s`.
const STREAM_LEN: usize = 1 << 14;

/// Running (count, mean, M2) statistics that merge associatively.
#[derive(Clone, Copy, Debug, Default)]
struct RunningStats {
    count: usize,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    fn push(&mut self, v: f64) {
        self.count += 1;
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(self, other: RunningStats) -> RunningStats {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * self.count as f64 * other.count as f64 / count as f64;
        RunningStats { count, mean, m2 }
    }
}

/// Mean of `f` over `samples` Dirichlet draws, computed in deterministic
/// parallel substreams and merged in stream order (the result is bit-stable
/// across thread counts).
fn parallel_mc_mean<F>(p: &DirichletParams, seed: u64, samples: usize, f: F) -> Result<RunningStats>
where
    F: Fn(&SimplexPoint) -> f64 + Sync,
{
    let gammas = build_gammas(p)?;
    let n_streams = samples.div_ceil(STREAM_LEN);
    let stats: Vec<RunningStats> = (0..n_streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed ^ s as u64);
            let len = STREAM_LEN.min(samples - s * STREAM_LEN);
            let mut st = RunningStats::default();
            for _ in 0..len {
                let point = sample_point(&gammas, &mut rng);
                st.push(f(&point));
            }
            st
        })
        .collect();
    Ok(stats
        .into_iter()
        .fold(RunningStats::default(), RunningStats::merge))
}

/// Monte-Carlo check of the product integral representation.
///
/// `lhs` is the exact multivariate value at the composite parameter
/// `a = alpha_1+...+alpha_k+beta+k`; the estimate is the prefactor times the
/// sample mean of `prod_j L_{n_j}^{(alpha_j)}(x_j u_j)` under
/// `mu_{(alpha_1+1,...,alpha_k+1,beta+1)}`. Requires `alpha_j > -1`,
/// `beta > -1`, and at least 10^4 samples.
pub fn integral_repr_check(
    n: &MultiIndex,
    alphas: &[Rational],
    beta: &Rational,
    x: &[Rational],
    samples: usize,
    seed: u64,
) -> Result<McCheck> {
    assert_eq!(n.k(), alphas.len());
    assert_eq!(n.k(), x.len());
    let minus_one = -Rational::one();
    if alphas.iter().any(|a| a <= &minus_one) || beta <= &minus_one {
        return Err(Error::Domain(
            "integral representation requires alpha_j > -1 and beta > -1".into(),
        ));
    }
    if samples < 10_000 {
        return Err(Error::Domain(format!(
            "integral representation check needs >= 10^4 samples, got {samples}"
        )));
    }
    let k = n.k();
    let composite: Rational = alphas
        .iter()
        .fold(beta + Rational::from(BigInt::from(k as u64)), |acc, a| {
            acc + a
        });
    let lhs = to_f64_lossy(&laguerre_mv_exact(n, &composite, x)?);
    // prefactor (a+1)_{|n|} / prod (alpha_j+1)_{n_j}
    let mut pref = pochhammer(&(&composite + Rational::one()), n.total());
    for (aj, &nj) in alphas.iter().zip(n.entries()) {
        pref /= pochhammer(&(aj + Rational::one()), nj);
    }
    let pref = to_f64_lossy(&pref);

    let measure = DirichletParams::new(
        alphas.iter().map(|a| a + Rational::one()).collect(),
        beta + Rational::one(),
    )?;
    let alpha_f: Vec<f64> = alphas.iter().map(to_f64_lossy).collect();
    let x_f: Vec<f64> = x.iter().map(to_f64_lossy).collect();
    let degrees: Vec<usize> = n.entries().to_vec();

    let stats = parallel_mc_mean(&measure, seed, samples, |point| {
        let mut prod = 1.0;
        for ((&nj, &aj), (&xj, &uj)) in degrees
            .iter()
            .zip(&alpha_f)
            .zip(x_f.iter().zip(point.coords()))
        {
            prod *= laguerre_recurrence_f64(nj, aj, xj * uj);
        }
        prod
    })?;
    let variance = if stats.count > 1 {
        stats.m2 / (stats.count as f64 - 1.0)
    } else {
        0.0
    };
    Ok(McCheck {
        lhs,
        estimate: pref * stats.mean,
        std_error: pref.abs() * (variance / stats.count as f64).sqrt(),
        samples,
    })
}

/// Monte-Carlo check of the specialized representations that open the two
/// bound proofs: `alpha_j = (1-k)/k, beta = alpha-1` (first variant,
/// `alpha > 0`) or `alpha_j = (1-2k)/(2k), beta = alpha-1/2` (second,
/// `alpha > -1/2`). The left side is `L_n^{(alpha)}(x)` either way.
pub fn specialization_check(
    n: &MultiIndex,
    alpha: &Rational,
    x: &[Rational],
    variant: ChainVariant,
    samples: usize,
    seed: u64,
) -> Result<McCheck> {
    let k = n.k();
    let (alpha_j, beta) = match variant {
        ChainVariant::Theorem1 => {
            if !alpha.is_positive() {
                return Err(Error::Domain(format!(
                    "first-variant specialization requires alpha > 0, got {alpha}"
                )));
            }
            (
                Rational::new(BigInt::from(1 - k as i64), BigInt::from(k as u64)),
                alpha - Rational::one(),
            )
        }
        ChainVariant::Theorem2 => {
            let neg_half = Rational::new(BigInt::from(-1), BigInt::from(2));
            if alpha <= &neg_half {
                return Err(Error::Domain(format!(
                    "second-variant specialization requires alpha > -1/2, got {alpha}"
                )));
            }
            (
                Rational::new(BigInt::from(1 - 2 * k as i64), BigInt::from(2 * k as u64)),
                alpha - Rational::new(BigInt::one(), BigInt::from(2)),
            )
        }
    };
    integral_repr_check(n, &vec![alpha_j; k], &beta, x, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laguerre_mv::phi2k;
    use crate::numerics::ratio;

    fn params(b: &[(i64, i64)], beta: (i64, i64)) -> DirichletParams {
        DirichletParams::new(
            b.iter().map(|&(n, d)| ratio(n, d)).collect(),
            ratio(beta.0, beta.1),
        )
        .unwrap()
    }

    #[test]
    fn moment_examples() {
        // zero order -> total mass 1
        let p = params(&[(1, 2), (1, 2)], (1, 1));
        assert_eq!(
            dirichlet_moment(&p, &MultiIndex::new(vec![0, 0])),
            Rational::one()
        );
        // k=1, b=1/2, beta=1/2, j=1 -> 1/2 (symmetric measure on [0,1])
        let p1 = params(&[(1, 2)], (1, 2));
        assert_eq!(
            dirichlet_moment(&p1, &MultiIndex::new(vec![1])),
            ratio(1, 2)
        );
        // k=2, b=(1/2,1/2), beta=1, j=(1,1) -> (1/4)/((2)_2) = 1/24
        assert_eq!(
            dirichlet_moment(&p, &MultiIndex::new(vec![1, 1])),
            ratio(1, 24)
        );
    }

    #[test]
    fn params_validation() {
        assert!(DirichletParams::new(vec![ratio(0, 1)], ratio(1, 1)).is_err());
        assert!(DirichletParams::new(vec![ratio(1, 2)], ratio(-1, 1)).is_err());
        assert!(DirichletParams::new(vec![], ratio(1, 1)).is_err());
    }

    #[test]
    fn samples_satisfy_invariants_and_are_deterministic() {
        let p = params(&[(1, 4), (1, 4)], (1, 2));
        let a = dirichlet_sample(&p, 99, 500).unwrap();
        let b = dirichlet_sample(&p, 99, 500).unwrap();
        for (pa, pb) in a.iter().zip(&b) {
            assert_eq!(pa.coords(), pb.coords(), "same seed, same stream");
        }
        for point in &a {
            assert!(point.coords().iter().all(|&u| u > 0.0));
            assert!(point.coords().iter().sum::<f64>() < 1.0);
        }
        let c = dirichlet_sample(&p, 100, 500).unwrap();
        assert!(a.iter().zip(&c).any(|(pa, pc)| pa.coords() != pc.coords()));
    }

    #[test]
    fn empirical_mean_matches_moment() {
        // k=1, b=1, beta=1: uniform on [0,1], mean 1/2
        let p = params(&[(1, 1)], (1, 1));
        let pts = dirichlet_sample(&p, 7, 100_000).unwrap();
        let mean: f64 = pts.iter().map(|pt| pt.coords()[0]).sum::<f64>() / pts.len() as f64;
        let var: f64 = pts
            .iter()
            .map(|pt| (pt.coords()[0] - mean).powi(2))
            .sum::<f64>()
            / (pts.len() as f64 - 1.0);
        let se = (var / pts.len() as f64).sqrt();
        assert!(
            (mean - 0.5).abs() <= 3.0 * se,
            "mean {mean} off 1/2 by more than 3 se = {se}"
        );
    }

    #[test]
    fn empirical_product_moment_matches_exact() {
        let p = params(&[(1, 2), (1, 2)], (1, 1));
        let expect = to_f64_lossy(&dirichlet_moment(&p, &MultiIndex::new(vec![1, 1])));
        let pts = dirichlet_sample(&p, 11, 200_000).unwrap();
        let vals: Vec<f64> = pts
            .iter()
            .map(|pt| pt.coords()[0] * pt.coords()[1])
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() as f64 - 1.0);
        let se = (var / vals.len() as f64).sqrt();
        assert!(
            (mean - expect).abs() <= 3.0 * se,
            "E[u1 u2] = {mean} vs exact {expect} (se {se})"
        );
    }

    #[test]
    fn moment_series_equals_truncated_lauricella() {
        let p = params(&[(1, 3), (2, 3)], (5, 4));
        let w = [ratio(1, 2), ratio(3, 4)];
        for cap in [0usize, 1, 4, 9] {
            let lhs = moment_series_sum(&p, &w, cap);
            let total = ratio(1, 3) + ratio(2, 3) + ratio(5, 4);
            let rhs = phi2k(p.b(), &total, &w, Some(cap)).unwrap();
            assert_eq!(lhs, rhs, "mismatch at cap {cap}");
        }
    }

    #[test]
    fn repr_check_uniform_closed_form() {
        // k=1, n=1, alpha=0, beta=0, x=1: lhs = L_1^{(1)}(1) = 1; the exact
        // integral is 2 * int_0^1 (1-u) du = 1
        let n = MultiIndex::new(vec![1]);
        let c = integral_repr_check(&n, &[ratio(0, 1)], &ratio(0, 1), &[ratio(1, 1)], 50_000, 3)
            .unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12);
        assert!(c.within_sigmas(3.0), "z = {}", c.z_score());
        // and at x=2 the left side is the root of L_1^{(1)}
        let c = integral_repr_check(&n, &[ratio(0, 1)], &ratio(0, 1), &[ratio(2, 1)], 50_000, 5)
            .unwrap();
        assert!((c.lhs - 0.0).abs() < 1e-12);
        assert!((c.estimate - 0.0).abs() <= 3.0 * c.std_error);
    }

    #[test]
    fn repr_check_bivariate() {
        // k=2, n=(1,1), alpha_j = -1/4, beta = 1/2, x=(1,2)
        let n = MultiIndex::new(vec![1, 1]);
        let c = integral_repr_check(
            &n,
            &[ratio(-1, 4), ratio(-1, 4)],
            &ratio(1, 2),
            &[ratio(1, 1), ratio(2, 1)],
            100_000,
            17,
        )
        .unwrap();
        assert!(c.within_sigmas(3.0), "z = {}", c.z_score());
    }

    #[test]
    fn repr_check_rejects_bad_inputs() {
        let n = MultiIndex::new(vec![1]);
        assert!(
            integral_repr_check(&n, &[ratio(-3, 2)], &ratio(0, 1), &[ratio(1, 1)], 50_000, 1)
                .is_err()
        );
        assert!(
            integral_repr_check(&n, &[ratio(0, 1)], &ratio(0, 1), &[ratio(1, 1)], 100, 1).is_err()
        );
    }

    #[test]
    fn specialization_reduces_correctly() {
        // k=1 first variant: alpha_1 = 0, beta = alpha-1; lhs = L_n^{(alpha)}(x)
        let n = MultiIndex::new(vec![2]);
        let c = specialization_check(
            &n,
            &ratio(2, 1),
            &[ratio(3, 2)],
            ChainVariant::Theorem1,
            50_000,
            23,
        )
        .unwrap();
        let direct = to_f64_lossy(&laguerre_mv_exact(&n, &ratio(2, 1), &[ratio(3, 2)]).unwrap());
        assert!((c.lhs - direct).abs() < 1e-12);
        assert!(c.within_sigmas(3.0), "z = {}", c.z_score());
        // k=2 univariate collapse: n=(1,0), alpha=1, x=(1,0): lhs = L_1^{(1)}(1) = 1
        let n = MultiIndex::new(vec![1, 0]);
        let c = specialization_check(
            &n,
            &ratio(1, 1),
            &[ratio(1, 1), ratio(0, 1)],
            ChainVariant::Theorem1,
            50_000,
            29,
        )
        .unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12);
        assert!(c.within_sigmas(3.0), "z = {}", c.z_score());
        // k=2 second variant at n=(1,1), alpha=1, x=(2,2): lhs = -2
        let n = MultiIndex::new(vec![1, 1]);
        let c = specialization_check(
            &n,
            &ratio(1, 1),
            &[ratio(2, 1), ratio(2, 1)],
            ChainVariant::Theorem2,
            100_000,
            31,
        )
        .unwrap();
        assert!((c.lhs + 2.0).abs() < 1e-12);
        assert!(c.within_sigmas(3.0), "z = {}", c.z_score());
        // domain gates
        assert!(specialization_check(
            &n,
            &ratio(0, 1),
            &[ratio(1, 1), ratio(1, 1)],
            ChainVariant::Theorem1,
            50_000,
            1
        )
        .is_err());
        assert!(specialization_check(
            &n,
            &ratio(-1, 2),
            &[ratio(1, 1), ratio(1, 1)],
            ChainVariant::Theorem2,
            50_000,
            1
        )
        .is_err());
    }

    #[test]
    fn parallel_mean_is_thread_count_independent() {
        let p = params(&[(1, 2), (1, 3)], (3, 4));
        let f = |pt: &SimplexPoint| pt.coords()[0] + 2.0 * pt.coords()[1];
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = pool1.install(|| parallel_mc_mean(&p, 42, 70_000, f).unwrap());
        let b = pool4.install(|| parallel_mc_mean(&p, 42, 70_000, f).unwrap());
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.m2.to_bits(), b.m2.to_bits());
    }
}
