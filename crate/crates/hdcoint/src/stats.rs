//! Small statistical utilities shared by tests and experiments:
//! Kolmogorov–Smirnov distances and empirical quantiles.

/// Sort a copy of `xs` ascending (NaNs are rejected by callers upstream).
fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    v
}

/// One-sample Kolmogorov–Smirnov distance between the empirical CDF of `xs`
/// and a reference CDF, `sup_x |F_n(x) - F(x)|`, evaluated at the sample
/// points from both sides of each jump.
pub fn ks_distance_cdf<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    let v = sorted(xs);
    let n = v.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i as f64 + 1.0) / n - f).abs());
    }
    d
}

/// Two-sample Kolmogorov–Smirnov distance `sup_x |F_n(x) - G_m(x)|`.
pub fn ks_distance_two_sample(xs: &[f64], ys: &[f64]) -> f64 {
    let x = sorted(xs);
    let y = sorted(ys);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0_f64;
    while i < n && j < m {
        let t = x[i].min(y[j]);
        while i < n && x[i] <= t {
            i += 1;
        }
        while j < m && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Empirical quantile with linear interpolation between order statistics
/// (Hyndman–Fan type 7, the NumPy/R default). `level` must lie in [0, 1].
pub fn quantile(xs: &[f64], level: f64) -> f64 {
    assert!(!xs.is_empty(), "quantile of empty sample");
    assert!((0.0..=1.0).contains(&level), "quantile level outside [0,1]");
    let v = sorted(xs);
    let h = level * (v.len() as f64 - 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        v[lo]
    } else {
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    }
}

/// Large-sample standard error of the `level` empirical quantile, estimated
/// as sqrt(level (1-level) / n) / f_hat(q) with a finite-difference density
/// estimate around the quantile. Returns 0 for degenerate samples.
pub fn quantile_stderr(xs: &[f64], level: f64) -> f64 {
    let n = xs.len();
    if n < 16 {
        return f64::NAN;
    }
    // Density estimated from the central difference of order statistics over
    // a bandwidth of ~n^(1/2) ranks around the quantile.
    let v = sorted(xs);
    let h = ((n as f64).sqrt() as usize).max(1);
    let pos = (level * (n as f64 - 1.0)).round() as usize;
    let lo = pos.saturating_sub(h);
    let hi = (pos + h).min(n - 1);
    let spread = v[hi] - v[lo];
    if spread <= 0.0 {
        return 0.0;
    }
    let density = (hi - lo) as f64 / (n as f64 * spread);
    (level * (1.0 - level) / n as f64).sqrt() / density
}

/// Mean of a sample.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Equal-width histogram of `xs` over `[lo, hi)` with `bins` bins. Values
/// outside the range are counted into the nearest end bin, so the counts
/// always sum to `xs.len()`. Returns the `bins + 1` edges and the counts.
pub fn histogram(xs: &[f64], lo: f64, hi: f64, bins: usize) -> (Vec<f64>, Vec<usize>) {
    assert!(bins >= 1, "histogram needs at least one bin");
    assert!(hi > lo, "histogram range must have positive width");
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let mut counts = vec![0usize; bins];
    for &x in xs {
        let idx = (((x - lo) / width).floor() as isize).clamp(0, bins as isize - 1);
        counts[idx as usize] += 1;
    }
    (edges, counts)
}

/// Standard error of a binomial proportion `p_hat` estimated from `n` trials.
pub fn binomial_stderr(p_hat: f64, n: usize) -> f64 {
    (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}
