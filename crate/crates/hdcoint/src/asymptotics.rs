//! Wachter equilibrium measure and the deterministic constants of the test.
//!
//! In the proportional regime `N, T -> infinity` with `T/N -> tau`, the bulk
//! of both canonical-correlation spectra converges to the Wachter
//! distribution with parameters `(p_frak, q_frak) = (2, tau - k)`. This
//! module evaluates that measure (density, edges, edge constants), integrates
//! test-statistic integrands against it, and produces the centering and
//! scaling constants used to bring the log-likelihood statistic onto its
//! limiting edge distribution.
//!
//! All integrals use the substitution `x = lambda_minus + (lambda_plus -
//! lambda_minus) sin^2(theta)`, which removes the inverse-square-root edge
//! singularities of the density; the transformed integrands are smooth, so a
//! fixed-order Gauss-Legendre rule converges to near machine precision.

use serde::{Deserialize, Serialize};

use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// Number of Gauss-Legendre nodes for integrals against the bulk measure;
/// after the trigonometric substitution the integrands are analytic, so this
/// is far past the accuracy knee.
const QUAD_NODES: usize = 200;

/// Parameters and derived edge quantities of the Wachter distribution.
///
/// The density on `[lambda_minus, lambda_plus]` is
/// `((p_frak + q_frak) / 2 pi) sqrt((x - lambda_minus)(lambda_plus - x)) / (x (1 - x))`,
/// and near each edge it behaves like a square root with coefficient
/// `c_plus / pi` (resp. `c_minus / pi`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WachterParams {
    /// First shape parameter (`> 1`).
    pub p_frak: f64,
    /// Second shape parameter (`> 1`).
    pub q_frak: f64,
    /// Lower support edge, in `(0, 1)`.
    pub lambda_minus: f64,
    /// Upper support edge, in `(0, 1)`.
    pub lambda_plus: f64,
    /// Lower-edge square-root coefficient.
    pub c_minus: f64,
    /// Upper-edge square-root coefficient.
    pub c_plus: f64,
}

/// Construct the Wachter parameters for `p_frak, q_frak > 1`:
/// `lambda_pm = (sqrt(p_frak (p_frak + q_frak - 1)) pm sqrt(q_frak))^2 / (p_frak + q_frak)^2`
/// and `c_pm = ((p_frak + q_frak) / 2) sqrt(lambda_plus - lambda_minus) / (lambda_pm (1 - lambda_pm))`.
pub fn wachter_params(p_frak: f64, q_frak: f64) -> Result<WachterParams> {
    if !(p_frak > 1.0) || !(q_frak > 1.0) {
        return Err(Error::OutOfDomain(format!(
            "Wachter parameters must exceed 1 (got p = {p_frak}, q = {q_frak}); \
             the density degenerates at or below 1"
        )));
    }
    let s = p_frak + q_frak;
    let root = (p_frak * (s - 1.0)).sqrt();
    let lambda_minus = ((root - q_frak.sqrt()) / s).powi(2);
    let lambda_plus = ((root + q_frak.sqrt()) / s).powi(2);
    let width = lambda_plus - lambda_minus;
    let edge_c = |l: f64| (s / 2.0) * width.sqrt() / (l * (1.0 - l));
    Ok(WachterParams {
        p_frak,
        q_frak,
        lambda_minus,
        lambda_plus,
        c_minus: edge_c(lambda_minus),
        c_plus: edge_c(lambda_plus),
    })
}

/// Density of the Wachter distribution at `x`; zero outside the support.
pub fn wachter_pdf(x: f64, w: &WachterParams) -> f64 {
    if x <= w.lambda_minus || x >= w.lambda_plus {
        return 0.0;
    }
    let s = w.p_frak + w.q_frak;
    (s / (2.0 * std::f64::consts::PI)) * ((x - w.lambda_minus) * (w.lambda_plus - x)).sqrt()
        / (x * (1.0 - x))
}

/// Integrate `f` against the Wachter density over `[a, b]` (intersected with
/// the support), via the edge-desingularizing substitution.
fn integrate_against<F: Fn(f64) -> f64>(w: &WachterParams, a: f64, b: f64, f: F) -> f64 {
    let lo = a.max(w.lambda_minus);
    let hi = b.min(w.lambda_plus);
    if lo >= hi {
        return 0.0;
    }
    let width = w.lambda_plus - w.lambda_minus;
    let s = w.p_frak + w.q_frak;
    // x = lambda_minus + width sin^2(theta):
    //   pdf(x) dx = (s / pi) width^2 sin^2(theta) cos^2(theta) / (x (1 - x)) dtheta.
    let theta = |x: f64| ((x - w.lambda_minus) / width).clamp(0.0, 1.0).sqrt().asin();
    let rule = GaussLegendre::new(QUAD_NODES);
    rule.integrate(theta(lo), theta(hi), |th| {
        let (sin, cos) = th.sin_cos();
        let x = w.lambda_minus + width * sin * sin;
        (s / std::f64::consts::PI) * width * width * sin * sin * cos * cos / (x * (1.0 - x))
            * f(x)
    })
}

/// Tail mass `F(x)` of the Wachter distribution above `x`: `F(x) = 1` at or
/// below the lower edge, `0` at or above the upper edge, strictly decreasing
/// in between.
pub fn wachter_tail(x: f64, w: &WachterParams) -> f64 {
    if x <= w.lambda_minus {
        1.0
    } else if x >= w.lambda_plus {
        0.0
    } else {
        integrate_against(w, x, w.lambda_plus, |_| 1.0)
    }
}

/// Inverse of [`wachter_tail`] on `[0, 1]` by bracketed bisection to `1e-10`
/// in the argument; `rho = 0` maps to the upper edge, `rho = 1` to the lower.
pub fn wachter_tail_inverse(rho: f64, w: &WachterParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParam(format!(
            "tail mass must lie in [0, 1], got {rho}"
        )));
    }
    if rho == 0.0 {
        return Ok(w.lambda_plus);
    }
    if rho == 1.0 {
        return Ok(w.lambda_minus);
    }
    let (mut lo, mut hi) = (w.lambda_minus, w.lambda_plus); // F(lo) = 1 >= rho >= 0 = F(hi)
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if wachter_tail(mid, w) >= rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Limits in probability of the three spectral statistics, each normalized by
/// `N`, when the test keeps the eigenvalue indices between tail masses `rho1`
/// and `rho2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitStatistics {
    /// Limit of the log-likelihood sum `(1/N) sum ln(1 - lambda_i)`.
    pub lr_limit: f64,
    /// Limit of the eigenvalue sum `(1/N) sum lambda_i`.
    pub pb_limit: f64,
    /// Limit of `(1/N) sum lambda_i / (1 - lambda_i)`.
    pub hw_limit: f64,
    /// With `rho1 = 0` the extreme eigenvalues are not bulk-controlled, so
    /// the `lr` and `hw` values are one-sided bounds rather than limits.
    pub lr_hw_bounds_only: bool,
}

/// Integrate the three statistic integrands (`ln(1-x)`, `x`, `x/(1-x)`)
/// against the Wachter measure with parameters `(2, tau - k)` between the
/// quantiles at tail masses `rho1 <= rho2`.
///
/// Requires `tau > k + 1` (so that `q_frak > 1`). With `rho1 = rho2` all
/// limits are zero; with `rho1 = 0` the `lr`/`hw` values are flagged as
/// one-sided bounds.
pub fn limit_statistics(rho1: f64, rho2: f64, tau: f64, k: usize) -> Result<LimitStatistics> {
    if !(0.0..=1.0).contains(&rho1) || !(0.0..=1.0).contains(&rho2) || rho1 > rho2 {
        return Err(Error::InvalidParam(format!(
            "tail masses must satisfy 0 <= rho1 <= rho2 <= 1, got ({rho1}, {rho2})"
        )));
    }
    if tau <= k as f64 + 1.0 {
        return Err(Error::OutOfDomain(format!(
            "need T/N > k + 1 for a nondegenerate bulk, got tau = {tau} at k = {k}"
        )));
    }
    let w = wachter_params(2.0, tau - k as f64)?;
    let a = wachter_tail_inverse(rho2, &w)?;
    let b = wachter_tail_inverse(rho1, &w)?;
    Ok(LimitStatistics {
        lr_limit: integrate_against(&w, a, b, |x| (1.0 - x).ln()),
        pb_limit: integrate_against(&w, a, b, |x| x),
        hw_limit: integrate_against(&w, a, b, |x| x / (1.0 - x)),
        lr_hw_bounds_only: rho1 == 0.0,
    })
}

/// Centering and scaling constants for the rescaled log-likelihood statistic
/// at sample shape `(N, T)` and lag order `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    /// Centering per kept eigenvalue: `ln(1 - lambda_plus) < 0`.
    pub c1: f64,
    /// Scale of the `N^{-2/3}` fluctuations; negative, so rescaling flips
    /// orientation.
    pub c2: f64,
    /// Panel dimension the constants were built for.
    pub n: usize,
    /// Sample length the constants were built for.
    pub t: usize,
    /// Lag order the constants were built for.
    pub k: usize,
}

/// Compute the constants with `(p_frak, q_frak) = (2, T/N - k)`:
///
/// ```text
/// c1 = ln(1 - lambda_plus),
/// c2 = - 2^{2/3} lambda_plus^{2/3}
///      / ((1 - lambda_plus)^{1/3} (lambda_plus - lambda_minus)^{1/3})
///      * (p_frak + q_frak)^{-2/3}.
/// ```
///
/// Requires `T/N > k + 1`; at or below that ratio the upper edge reaches 1
/// and the centering diverges. The constants depend on `(N, T, k)` only
/// through `q_frak = T/N - k`.
pub fn test_constants(n: usize, t: usize, k: usize) -> Result<AsymptoticConstants> {
    if n == 0 {
        return Err(Error::InvalidParam("dimension N must be >= 1".into()));
    }
    let tau = t as f64 / n as f64;
    if tau <= (k + 1) as f64 {
        return Err(Error::OutOfDomain(format!(
            "need T/N > k + 1, got T/N = {tau} at k = {k}; the upper edge degenerates"
        )));
    }
    let w = wachter_params(2.0, tau - k as f64)?;
    let c1 = (1.0 - w.lambda_plus).ln();
    let c2 = -(2.0_f64).powf(2.0 / 3.0) * w.lambda_plus.powf(2.0 / 3.0)
        / ((1.0 - w.lambda_plus).powf(1.0 / 3.0)
            * (w.lambda_plus - w.lambda_minus).powf(1.0 / 3.0)
            * (w.p_frak + w.q_frak).powf(2.0 / 3.0));
    Ok(AsymptoticConstants { c1, c2, n, t, k })
}

/// Map Jacobi-ensemble exponents `(p, q)` at matrix dimension `N` to the
/// corresponding bulk-measure parameters: `p_frak = 2p/N + 1`,
/// `q_frak = 2q/N + 1`. Used to compare finite-`N` ensemble spectra with
/// their limiting measure.
pub fn frak_from_jacobi_exponents(n: usize, p: f64, q: f64) -> (f64, f64) {
    (2.0 * p / n as f64 + 1.0, 2.0 * q / n as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_rng;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn params_at_two_eight_are_exact() {
        // (sqrt(18) pm sqrt(8))^2 / 100 = (26 pm 24)/100.
        let w = wachter_params(2.0, 8.0).unwrap();
        assert_abs_diff_eq!(w.lambda_plus, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(w.lambda_minus, 0.02, epsilon = 1e-14);
        assert!(w.c_plus > 0.0 && w.c_minus > 0.0);
        // Edge relation holds to 1e-12: lambda_pm reproduce the closed form.
        let s = 10.0;
        let root = (2.0_f64 * 9.0).sqrt();
        assert_abs_diff_eq!(w.lambda_plus, ((root + 8.0_f64.sqrt()) / s).powi(2), epsilon = 1e-12);
    }

    #[test]
    fn upper_edge_decreases_in_q() {
        let mut prev = f64::INFINITY;
        for q in [1.5, 2.0, 4.0, 8.0, 16.0, 32.0, 100.0] {
            let w = wachter_params(2.0, q).unwrap();
            assert!(w.lambda_plus < prev);
            assert!(0.0 < w.lambda_minus && w.lambda_minus < w.lambda_plus && w.lambda_plus < 1.0);
            prev = w.lambda_plus;
        }
    }

    #[test]
    fn support_shrinks_for_large_q() {
        let w = wachter_params(2.0, 1e4).unwrap();
        assert!(w.lambda_plus - w.lambda_minus < 0.02);
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(matches!(wachter_params(1.0, 8.0), Err(Error::OutOfDomain(_))));
        assert!(matches!(wachter_params(2.0, 0.5), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn pdf_zero_outside_support_and_normalized() {
        for p in [1.5, 2.0, 5.0] {
            for q in [2.0, 8.0, 20.0] {
                let w = wachter_params(p, q).unwrap();
                assert_eq!(wachter_pdf(w.lambda_minus - 1e-3, &w), 0.0);
                assert_eq!(wachter_pdf(w.lambda_plus + 1e-3, &w), 0.0);
                assert_eq!(wachter_pdf(-0.2, &w), 0.0);
                let mass = integrate_against(&w, 0.0, 1.0, |_| 1.0);
                assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn pdf_has_square_root_upper_edge() {
        let w = wachter_params(2.0, 8.0).unwrap();
        let eps = 1e-6_f64;
        let approx_edge = (w.c_plus / std::f64::consts::PI) * eps.sqrt();
        let actual = wachter_pdf(w.lambda_plus - eps, &w);
        assert!(
            (actual / approx_edge - 1.0).abs() < 0.05,
            "edge ratio {}",
            actual / approx_edge
        );
    }

    #[test]
    fn tail_endpoints_and_round_trip() {
        let w = wachter_params(2.0, 8.0).unwrap();
        assert_eq!(wachter_tail(1.0, &w), 0.0);
        assert_eq!(wachter_tail(0.0, &w), 1.0);
        assert_eq!(wachter_tail(w.lambda_plus, &w), 0.0);
        for i in 1..=9 {
            let rho = i as f64 / 10.0;
            let x = wachter_tail_inverse(rho, &w).unwrap();
            assert_abs_diff_eq!(wachter_tail(x, &w), rho, epsilon = 1e-8);
        }
    }

    #[test]
    fn tail_inverse_is_monotone_decreasing() {
        let w = wachter_params(2.0, 4.0).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let x = wachter_tail_inverse(i as f64 / 10.0, &w).unwrap();
            assert!(x < prev || (i == 0 && x <= prev));
            prev = x;
        }
        assert!(wachter_tail_inverse(1.5, &w).is_err());
    }

    #[test]
    fn eigenvalue_sum_limit_matches_closed_form() {
        // Full-bulk mean: integral of x against the (2, tau - k) measure is
        // 2 / (tau + 2 - k).
        let lim = limit_statistics(0.0, 1.0, 10.0, 2).unwrap();
        assert_abs_diff_eq!(lim.pb_limit, 0.2, epsilon = 1e-9);
        assert!(lim.lr_hw_bounds_only);

        let lim = limit_statistics(0.0, 1.0, 12.0, 2).unwrap();
        assert_abs_diff_eq!(lim.pb_limit, 2.0 / 12.0, epsilon = 1e-6);

        let mut rng = stream_rng(17, 0);
        for _ in 0..10 {
            let k = rng.gen_range(1..=4usize);
            let tau = k as f64 + 2.0 + rng.gen_range(0.5..30.0);
            let lim = limit_statistics(0.0, 1.0, tau, k).unwrap();
            assert_abs_diff_eq!(lim.pb_limit, 2.0 / (tau + 2.0 - k as f64), epsilon = 1e-6);
        }
    }

    #[test]
    fn empty_tail_interval_gives_zero_limits() {
        let lim = limit_statistics(0.3, 0.3, 10.0, 1).unwrap();
        assert_eq!(lim.lr_limit, 0.0);
        assert_eq!(lim.pb_limit, 0.0);
        assert_eq!(lim.hw_limit, 0.0);
        assert!(!lim.lr_hw_bounds_only);
    }

    #[test]
    fn limit_statistics_signs_and_domain() {
        let lim = limit_statistics(0.0, 1.0, 8.0, 1).unwrap();
        assert!(lim.lr_limit < 0.0);
        assert!(lim.pb_limit > 0.0);
        assert!(lim.hw_limit > lim.pb_limit); // x/(1-x) > x on (0, 1)
        assert!(matches!(limit_statistics(0.0, 1.0, 3.0, 2), Err(Error::OutOfDomain(_))));
        assert!(limit_statistics(0.7, 0.2, 10.0, 1).is_err());
    }

    #[test]
    fn constants_match_closed_form_at_q_eight() {
        // N=100, T=1000, k=2: q_frak = 8, lambda_plus = 1/2, lambda_minus
        // = 1/50, so c1 = ln(1/2) and c2 = -(25/6)^{1/3} / 100^{1/3}.
        let c = test_constants(100, 1000, 2).unwrap();
        assert_abs_diff_eq!(c.c1, 0.5_f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(c.c2, -(25.0_f64 / 6.0).cbrt() / 100.0_f64.cbrt(), epsilon = 1e-12);
        assert_eq!((c.n, c.t, c.k), (100, 1000, 2));
    }

    #[test]
    fn constants_are_negative_on_a_grid() {
        for k in 1..=4usize {
            for mult in 2..=10usize {
                let t = 100 * (k + mult); // tau = k + mult > k + 1
                let c = test_constants(100, t, k).unwrap();
                assert!(c.c1 < 0.0, "c1 at k={k}, T={t}");
                assert!(c.c2 < 0.0, "c2 at k={k}, T={t}");
            }
        }
        assert!(matches!(test_constants(100, 200, 1), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn constants_depend_only_on_q() {
        // Fixed q_frak = T/N - k = 8 across different k.
        let base = test_constants(100, 900, 1).unwrap();
        for (t, k) in [(1000, 2), (1100, 3), (1300, 5)] {
            let c = test_constants(100, t, k).unwrap();
            assert_abs_diff_eq!(c.c1, base.c1, epsilon = 1e-14);
            assert_abs_diff_eq!(c.c2, base.c2, epsilon = 1e-14);
        }
    }

    #[test]
    fn constants_are_continuous_in_tau() {
        // Fine-grid monotone march (no sign flips, no blow-ups), plus a
        // refinement check: halving the tau step halves the increment, which
        // rules out jumps even where the centering is steep near tau = k+1.
        let k = 2;
        let n = 1000;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..940 {
            let t = (k + 1) * n + 50 + 50 * i; // tau from 3.05 to 50 in 0.05 steps
            let c = test_constants(n, t, k).unwrap();
            assert!(c.c1.is_finite() && c.c2.is_finite());
            assert!(c.c1 > prev, "c1 not increasing at T = {t}");
            prev = c.c1;
        }
        let n = 100_000; // fine tau resolution: one T step is 1e-5 in tau
        for t0 in [305_000usize, 350_000, 400_000, 700_000, 2_000_000, 4_900_000] {
            let c0 = test_constants(n, t0, k).unwrap();
            let c_half = test_constants(n, t0 + 1, k).unwrap();
            let c_full = test_constants(n, t0 + 2, k).unwrap();
            for (d_half, d_full) in [
                (c_half.c1 - c0.c1, c_full.c1 - c0.c1),
                (c_half.c2 - c0.c2, c_full.c2 - c0.c2),
            ] {
                assert!(d_full.abs() < 0.05, "increment too large at T = {t0}");
                assert!(
                    (d_half - d_full / 2.0).abs() < 0.3 * (d_full / 2.0).abs() + 1e-12,
                    "non-smooth step at T = {t0}: {d_half} vs {d_full}"
                );
            }
        }
    }

    #[test]
    fn jacobi_exponent_map_reproduces_test_parameters() {
        // The null-coupling ensemble at (N, T, k) has exponents p = N/2 and
        // q = (T - (k+1)N)/2; they must map back to (2, T/N - k).
        for (n, t, k) in [(100usize, 1000usize, 2usize), (50, 400, 1), (20, 300, 4)] {
            let p = n as f64 / 2.0;
            let q = (t as f64 - ((k + 1) * n) as f64) / 2.0;
            let (pf, qf) = frak_from_jacobi_exponents(n, p, q);
            assert_abs_diff_eq!(pf, 2.0, epsilon = 1e-14);
            assert_abs_diff_eq!(qf, t as f64 / n as f64 - k as f64, epsilon = 1e-12);
        }
    }
}
