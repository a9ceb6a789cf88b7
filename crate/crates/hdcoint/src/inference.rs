//! From a canonical spectrum to a test decision.
//!
//! Three classical functionals of the squared canonical correlations are
//! supported — the log-likelihood-ratio sum `Σ ln(1 - λ_i)`, the
//! Pillai–Bartlett sum `Σ λ_i`, and the Hotelling–Lawley sum
//! `Σ λ_i / (1 - λ_i)` — each over a window of the ordered spectrum. For the
//! sequential-correlation (modified) procedure, the likelihood-ratio sum over
//! the top `r` eigenvalues is centered and rescaled so that under the
//! no-cointegration null it converges to the sum of the top `r` points of the
//! Airy_1 ensemble; comparing it against Monte Carlo quantiles of that limit
//! yields the decision.
//!
//! Conventions, fixed here and documented on each item:
//! - an eigenvalue within `1e-12` of `1` makes the LR/HW sums infinite; the
//!   statistic carries a signed-infinity sentinel plus a `degenerate` flag,
//!   never a NaN;
//! - rejection uses strict `>` against the quantile, so an exact tie fails to
//!   reject (at Monte Carlo quantile resolution the convention is immaterial);
//! - the default report levels are `{0.90, 0.95, 0.975, 0.99}`.

use serde::{Deserialize, Serialize};

use crate::asymptotics::test_constants;
use crate::ensembles::AiryQuantileTable;
use crate::error::{Error, Result};
use crate::spectra::CanonicalSpectrum;
use crate::stats::binomial_stderr;

/// Eigenvalues at least this close to `1` are treated as exactly `1`.
const UNIT_TOL: f64 = 1e-12;

/// Quantile levels reported by default.
pub const DEFAULT_ALPHAS: [f64; 4] = [0.90, 0.95, 0.975, 0.99];

/// Which spectral functional a statistic is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatisticKind {
    /// Log-likelihood-ratio sum `Σ ln(1 - λ_i)`.
    #[serde(rename = "LR")]
    Lr,
    /// Pillai–Bartlett sum `Σ λ_i`.
    #[serde(rename = "PB")]
    Pb,
    /// Hotelling–Lawley sum `Σ λ_i / (1 - λ_i)`.
    #[serde(rename = "HW")]
    Hw,
    /// Likelihood-ratio sum on the sequential-correlation spectrum, destined
    /// for centering and rescaling.
    #[serde(rename = "modified_LR")]
    ModifiedLr,
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StatisticKind::Lr => "LR",
            StatisticKind::Pb => "PB",
            StatisticKind::Hw => "HW",
            StatisticKind::ModifiedLr => "modified_LR",
        };
        f.write_str(s)
    }
}

/// A spectral functional evaluated over a window, with degeneracy marked
/// explicitly instead of through NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralStatistic {
    /// Sum over the window; a signed infinity when an eigenvalue in the
    /// window equals `1` (LR: `-inf`, HW: `+inf`).
    pub value: f64,
    /// Whether an eigenvalue in the window was `1` to within `1e-12`.
    pub degenerate: bool,
}

/// Test outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// The rescaled statistic exceeded the null quantile.
    Reject,
    /// The rescaled statistic did not exceed the null quantile (ties fail to
    /// reject).
    FailToReject,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::Reject => "reject",
            Decision::FailToReject => "fail_to_reject",
        })
    }
}

/// Where a report's inputs came from. The sample dimensions are `None` when
/// the decision was made on a bare rescaled value without a spectrum
/// attached (see [`decide`]); [`modified_lr_report`] always fills them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportProvenance {
    /// Panel dimension `N`.
    pub n: Option<usize>,
    /// Sample length `T`.
    pub t: Option<usize>,
    /// Lag order `k`.
    pub k: Option<usize>,
    /// Identifier of the quantile table the decision used.
    pub table_id: String,
}

/// Everything about one test: the statistic, the threshold it was compared
/// against, the outcome, and a Monte Carlo p-value when the table retains its
/// raw samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    /// Functional the raw statistic is.
    pub statistic_kind: StatisticKind,
    /// Window start (eigenvalues `r1+1 ..= r2` in 1-based rank order). The
    /// rank-`r` test is the window `(0, r)`.
    pub r1: usize,
    /// Window end.
    pub r2: usize,
    /// Statistic on its original scale. For reports produced by [`decide`]
    /// alone this repeats the rescaled value, since the original scale is not
    /// known at that layer.
    pub raw: f64,
    /// Whether an eigenvalue in the window was `1` to within `1e-12`.
    pub degenerate: bool,
    /// Centered, rescaled value compared against the quantile
    /// (`modified_LR` only).
    pub centered_rescaled: Option<f64>,
    /// Null quantile the statistic was compared against.
    pub quantile_used: f64,
    /// Level of that quantile.
    pub alpha: f64,
    /// Outcome of the strict comparison.
    pub decision: Decision,
    /// Right-tail Monte Carlo p-value (fraction of stored null samples
    /// exceeding the rescaled value); `None` when the table was loaded from
    /// disk and no longer carries samples.
    pub p_value_mc: Option<f64>,
    /// Binomial standard error of `p_value_mc` at the table's replication
    /// count.
    pub p_value_stderr: Option<f64>,
    /// Sample dimensions and table identity.
    pub provenance: ReportProvenance,
}

/// Sum a spectral functional over the eigenvalue window `r1+1 ..= r2` (1-based
/// ranks; `values[r1..r2]` in storage order).
///
/// Requires `0 <= r1 < r2 <= N`. An eigenvalue equal to `1` (within `1e-12`)
/// makes the LR sum `-inf` and the HW sum `+inf`, with `degenerate` set; the
/// PB sum is unaffected by eigenvalues at `1`.
pub fn spectral_statistic(
    spectrum: &CanonicalSpectrum,
    kind: StatisticKind,
    r1: usize,
    r2: usize,
) -> Result<SpectralStatistic> {
    let n = spectrum.values.len();
    if r1 >= r2 || r2 > n {
        return Err(Error::InvalidParam(format!(
            "statistic window must satisfy 0 <= r1 < r2 <= N, got r1 = {r1}, r2 = {r2}, N = {n}"
        )));
    }
    let mut value = 0.0;
    let mut degenerate = false;
    for &lambda in &spectrum.values[r1..r2] {
        let gap = 1.0 - lambda;
        match kind {
            StatisticKind::Pb => value += lambda,
            StatisticKind::Lr | StatisticKind::ModifiedLr => {
                if gap <= UNIT_TOL {
                    degenerate = true;
                    value = f64::NEG_INFINITY;
                } else {
                    value += gap.ln();
                }
            }
            StatisticKind::Hw => {
                if gap <= UNIT_TOL {
                    degenerate = true;
                    value = f64::INFINITY;
                } else {
                    value += lambda / gap;
                }
            }
        }
    }
    Ok(SpectralStatistic { value, degenerate })
}

/// Center and rescale a rank-`r` likelihood-ratio sum from the
/// sequential-correlation spectrum: `(lr - r c1) / (N^{-2/3} c2)`.
///
/// Because `c2 < 0` the orientation flips: a larger top eigenvalue (more
/// negative `lr`) gives a larger rescaled value, and a degenerate `lr = -inf`
/// maps to `+inf` (overwhelming evidence against the null). Requires
/// `T/N > k + 1`.
pub fn rescale_modified_lr(lr: f64, r: usize, n: usize, t: usize, k: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParam("rank r must be >= 1".into()));
    }
    let constants = test_constants(n, t, k)?;
    let scale = (n as f64).powf(-2.0 / 3.0) * constants.c2;
    Ok((lr - r as f64 * constants.c1) / scale)
}

/// Compare a rescaled statistic against the null quantile for rank `r` at
/// level `alpha` and assemble the decision.
///
/// Rejects iff `rescaled > quantile(r, alpha)` (strict, so ties fail to
/// reject). When the table retains its raw samples the report carries the
/// right-tail Monte Carlo p-value with its binomial standard error. A table
/// that does not cover `(r, alpha)` is an error pointing at
/// `airy_sum_quantiles`.
///
/// The report's `raw` field repeats `rescaled` and its sample dimensions are
/// `None`, since this layer only sees the rescaled value;
/// [`modified_lr_report`] runs the full pipeline and fills both.
pub fn decide(rescaled: f64, r: usize, alpha: f64, table: &AiryQuantileTable) -> Result<TestReport> {
    let quantile_used = table.quantile(r, alpha)?;
    let decision = if rescaled > quantile_used { Decision::Reject } else { Decision::FailToReject };
    let p_value_mc = table.p_value(r, rescaled);
    let p_value_stderr = p_value_mc.map(|p| binomial_stderr(p, table.reps));
    Ok(TestReport {
        statistic_kind: StatisticKind::ModifiedLr,
        r1: 0,
        r2: r,
        raw: rescaled,
        degenerate: rescaled.is_infinite(),
        centered_rescaled: Some(rescaled),
        quantile_used,
        alpha,
        decision,
        p_value_mc,
        p_value_stderr,
        provenance: ReportProvenance { n: None, t: None, k: None, table_id: table.table_id() },
    })
}

/// Full rank-`r` test on a sequential-correlation spectrum: likelihood-ratio
/// sum over the top `r` eigenvalues, centering and rescaling with the
/// spectrum's own `(N, T, k)`, and the quantile comparison. The report carries
/// the raw sum and complete provenance.
pub fn modified_lr_report(
    spectrum: &CanonicalSpectrum,
    r: usize,
    alpha: f64,
    table: &AiryQuantileTable,
) -> Result<TestReport> {
    let stat = spectral_statistic(spectrum, StatisticKind::ModifiedLr, 0, r)?;
    let meta = spectrum.meta;
    let rescaled = rescale_modified_lr(stat.value, r, meta.n, meta.t, meta.k)?;
    let mut report = decide(rescaled, r, alpha, table)?;
    report.raw = stat.value;
    report.degenerate = stat.degenerate;
    report.provenance.n = Some(meta.n);
    report.provenance.t = Some(meta.t);
    report.provenance.k = Some(meta.k);
    Ok(report)
}
