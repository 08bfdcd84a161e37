//! Moments of the reciprocal of a normal variable conditioned on a symmetric
//! window, and the resulting expansion for a noisy-count / noisy-size ratio.
//!
//! `1/X` for normal `X` has no moments. Conditioning on
//! `S = {1 <= X <= 2 mu - 1}` restores them, and a Taylor expansion of `1/x`
//! around `mu` gives series in `sigma^2 / mu^2` whose coefficients are double
//! factorials of the normal's even central moments.

use std::f64::consts::PI;

use serde::Serialize;

use super::quadrature::integrate;
use crate::error::{Error, Result};

/// `(2j - 1)!!` for `j >= 0`, with `(-1)!! = 1`.
pub fn odd_double_factorial(j: u32) -> f64 {
    (1..=j).map(|i| (2 * i - 1) as f64).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReciprocalMoments {
    /// Truncated series for `E(1/X | S)`.
    pub mean: f64,
    /// Truncated series for `E(1/X^2 | S)`.
    pub second_moment: f64,
    /// `(sigma/mu)^(2k+2)`, the order of the omitted remainder.
    pub remainder_order: f64,
}

fn check_mu_sigma(mu: f64, sigma: f64) -> Result<()> {
    if !(mu > 1.0) || !mu.is_finite() {
        return Err(Error::arg(format!("mu must exceed 1, got {mu}")));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::arg(format!("sigma must be positive, got {sigma}")));
    }
    Ok(())
}

/// Series `sum_{j<=k} c_j r^j` with `r = sigma^2/mu^2` for
/// `c_j = (2j-1)!!` (first moment) and `c_j = (2j+1)!!` (second moment).
fn reciprocal_series(ratio_sq: f64, k: u32) -> (f64, f64) {
    let mut first = 0.0;
    let mut second = 0.0;
    let mut power = 1.0;
    for j in 0..=k {
        first += odd_double_factorial(j) * power;
        second += odd_double_factorial(j + 1) * power;
        power *= ratio_sq;
    }
    (first, second)
}

/// Order-`k` expansions of `E(1/X | S)` and `E(1/X^2 | S)` for
/// `X ~ N(mu, sigma^2)`, `S = {1 <= X <= 2 mu - 1}`.
pub fn reciprocal_normal_moments(mu: f64, sigma: f64, k: u32) -> Result<ReciprocalMoments> {
    check_mu_sigma(mu, sigma)?;
    let r = (sigma / mu).powi(2);
    let (first, second) = reciprocal_series(r, k);
    Ok(ReciprocalMoments {
        mean: first / mu,
        second_moment: second / (mu * mu),
        remainder_order: r.powi(k as i32 + 1),
    })
}

/// `E(1/X | S)` and `E(1/X^2 | S)` by adaptive quadrature of the normal
/// density over `S`, normalised by the quadrature mass of `S`.
///
/// The integration window is cut to `mu +/- 12 sigma`; the density outside
/// is below 1e-31 of its peak.
pub fn reciprocal_moments_by_quadrature(mu: f64, sigma: f64) -> Result<(f64, f64)> {
    check_mu_sigma(mu, sigma)?;
    let lo = (mu - 12.0 * sigma).max(1.0);
    let hi = (mu + 12.0 * sigma).min(2.0 * mu - 1.0);
    let density = |x: f64| {
        let z = (x - mu) / sigma;
        (-0.5 * z * z).exp()
    };
    // Split at mu so the peak sits on a segment boundary.
    let both = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        let left = integrate(f, lo, mu, 0.0, 1e-14)?;
        let right = integrate(f, mu, hi, 0.0, 1e-14)?;
        Ok(left.value + right.value)
    };
    let mass = both(&density)?;
    let first = both(&|x| density(x) / x)?;
    let second = both(&|x| density(x) / (x * x))?;
    Ok((first / mass, second / mass))
}

/// `E[(X - mu)^(2k) | mu - a <= X <= mu + a]` for `X ~ N(mu, sigma^2)`.
///
/// Computed exactly through the integration-by-parts recursion
/// `M_{j+1} = sigma^2 (2j+1) M_j - (2 sigma / sqrt(2 pi)) a^(2j+1) exp(-a^2 / (2 sigma^2))`
/// on the unnormalised moments `M_j = E[(X - mu)^(2j); S]`, starting from
/// `M_0 = P(S)`. As `a` grows this tends to `sigma^(2k) (2k-1)!!`.
pub fn truncated_even_moment(mu: f64, sigma: f64, a: f64, k: u32) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::arg(format!("half-width must be positive, got {a}")));
    }
    if !(sigma > 0.0) || !sigma.is_finite() || !mu.is_finite() {
        return Err(Error::arg(format!("invalid normal parameters ({mu}, {sigma})")));
    }
    let t = a / sigma;
    let mass = libm::erf(t / 2f64.sqrt());
    let boundary = 2.0 * sigma / (2.0 * PI).sqrt() * (-0.5 * t * t).exp();
    let mut m = mass;
    let mut a_pow = a;
    for j in 0..k {
        m = sigma * sigma * (2 * j + 1) as f64 * m - boundary * a_pow;
        a_pow *= a * a;
    }
    Ok(m / mass)
}

/// Leading term `sigma^(2k) (2k-1)!!` of [`truncated_even_moment`].
pub fn untruncated_even_moment(sigma: f64, k: u32) -> f64 {
    sigma.powi(2 * k as i32) * odd_double_factorial(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioApproximation {
    pub mean: f64,
    pub variance: f64,
}

/// Order-`k` expansion of the conditional mean and variance of
/// `p~ = c~ / n~` given `S = {1 <= n~ <= 2n - 1}`, where
/// `c~ = c + N(0, 1/(2 rho1))`, `n~ = n + N(0, 1/(2 rho2))` and `c` is the
/// hypergeometric count of a size-`n` sample from a population of `N` units
/// with proportion `p`.
///
/// With `m1`, `m2` the reciprocal series (scaled by `n`, `n^2`):
/// mean = `p m1`, variance = `Var(p_hat) m2 + p^2 (m2 - m1^2) + m2 / (2 rho1 n^2)`.
pub fn ratio_moment_expansion(
    p: f64,
    n: u64,
    population: u64,
    rho1: f64,
    rho2: f64,
    k: u32,
) -> Result<RatioApproximation> {
    if n < 2 || n > population {
        return Err(Error::arg(format!(
            "need 2 <= n <= N, got n={n}, N={population}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!("p must lie in [0, 1], got {p}")));
    }
    if !(rho1 > 0.0 && rho2 > 0.0) {
        return Err(Error::InvalidBudget(format!(
            "rho1 and rho2 must be positive, got ({rho1}, {rho2})"
        )));
    }
    let nf = n as f64;
    let ratio_sq = 1.0 / (2.0 * rho2 * nf * nf);
    let (m1, m2) = reciprocal_series(ratio_sq, k);
    let var_p_hat =
        (population - n) as f64 / (population - 1).max(1) as f64 * p * (1.0 - p) / nf;
    Ok(RatioApproximation {
        mean: p * m1,
        variance: var_p_hat * m2 + p * p * (m2 - m1 * m1) + m2 / (2.0 * rho1 * nf * nf),
    })
}

/// Second-order case of [`ratio_moment_expansion`].
pub fn alg3_k2_approximation(
    p: f64,
    n: u64,
    population: u64,
    rho1: f64,
    rho2: f64,
) -> Result<RatioApproximation> {
    ratio_moment_expansion(p, n, population, rho1, rho2, 2)
}

/// Leading bias `p / (2 n^2 rho2)` of the noisy-size ratio estimator.
pub fn ratio_bias(p: f64, n: u64, rho2: f64) -> f64 {
    let nf = n as f64;
    p / (2.0 * nf * nf * rho2)
}
