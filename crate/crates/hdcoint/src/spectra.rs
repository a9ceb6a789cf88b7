//! Squared sample canonical correlation spectra for cointegration testing.
//!
//! Two pipelines share the same residualization and eigenvalue machinery:
//!
//! * the classical reduced-rank-regression spectrum ([`johansen_spectrum`]):
//!   regress changes `dX_t` and lagged levels `X_{t-k}` on lagged changes and
//!   deterministic terms over the non-cyclic sample range, then take squared
//!   canonical correlations of the two residual sets;
//! * the modified spectrum ([`modified_spectrum`]): detrend levels first,
//!   replace ordinary lags by cyclic lags so that all `T` columns stay in the
//!   sample, and use an intercept as the only deterministic regressor.
//!
//! Eigenvalues are computed through a symmetric whitening + SVD path rather
//! than a nonsymmetric eigensolve, which guarantees real values in `[0, 1]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::model::{deterministic_row, deterministic_width, difference, DeterministicTerm, PanelSeries};
use crate::{Error, Result};

/// Which residualization pipeline produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Procedure {
    /// Classical reduced-rank regression on the truncated sample.
    Johansen,
    /// Detrended, cyclically lagged variant on the full sample.
    Modified,
}

/// Provenance of a spectrum: panel shape, lag order, pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    /// Panel dimension `N`.
    pub n: usize,
    /// Panel sample length `T` (not the effective regression sample).
    pub t: usize,
    /// Lag order `k` used by the procedure.
    pub k: usize,
    /// Pipeline tag.
    pub procedure: Procedure,
}

/// The three regressand blocks entering the reduced-rank regression: changes
/// `Z0`, (detrended) levels `Zk`, and conditioning regressors `Z1` (lagged
/// changes plus deterministic terms). All share the same column count.
#[derive(Debug, Clone)]
pub struct RegressandSet {
    /// `N x T_eff` changes.
    pub z0: DMatrix<f64>,
    /// `N x T_eff` levels (detrended and cyclically shifted for the modified
    /// pipeline).
    pub zk: DMatrix<f64>,
    /// `m x T_eff` conditioning regressors; `m` may be zero.
    pub z1: DMatrix<f64>,
    /// Provenance carried through to the spectrum.
    pub meta: SpectrumMeta,
    /// Non-fatal diagnostics accumulated while building.
    pub warnings: Vec<String>,
}

/// Residuals of `Z0` and `Zk` after projecting off the rows of `Z1`.
#[derive(Debug, Clone)]
pub struct ResidualPair {
    /// `N x T_eff` residualized changes.
    pub r0: DMatrix<f64>,
    /// `N x T_eff` residualized levels.
    pub rk: DMatrix<f64>,
    /// Provenance carried through to the spectrum.
    pub meta: SpectrumMeta,
    /// Non-fatal diagnostics (e.g. rank-deficient regressors).
    pub warnings: Vec<String>,
}

/// Squared sample canonical correlations, descending, in `[0, 1]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CanonicalSpectrum {
    /// `N` eigenvalues, sorted descending, clamped to `[0, 1]`.
    pub values: Vec<f64>,
    /// Shape/pipeline provenance.
    pub meta: SpectrumMeta,
    /// Non-fatal diagnostics from the whole pipeline.
    pub warnings: Vec<String>,
}

/// Detrended levels: column `t` is `X_{t-1} - ((t-1)/T)(X_T - X_0)` for
/// `t = 1..T` (note the deliberate one-step time shift; the first column is
/// exactly `X_0`). A panel lying on an exact line through `X_0` detrends to a
/// constant, and a constant panel is left unchanged.
pub fn detrend(panel: &PanelSeries) -> DMatrix<f64> {
    let (n, t_len) = (panel.n(), panel.t_len());
    let span = panel.data.column(t_len - 1) - panel.x_at(0);
    let mut out = DMatrix::zeros(n, t_len);
    for t in 1..=t_len {
        let col = panel.x_at(t as isize - 1).into_owned() - &span * ((t - 1) as f64 / t_len as f64);
        out.set_column(t - 1, &col);
    }
    out
}

/// Cyclic column lag: column `t` of the output is column `t - lag` of the
/// input with indices wrapped into `1..T`. `lag = 0` and `lag = T` are both
/// the identity; one step maps `(a, b, c, d)` to `(d, a, b, c)`.
pub fn cyclic_lag(m: &DMatrix<f64>, lag: usize) -> DMatrix<f64> {
    let t_len = m.ncols();
    let lag = lag % t_len;
    let mut out = DMatrix::zeros(m.nrows(), t_len);
    for t in 0..t_len {
        out.set_column(t, &m.column((t + t_len - lag) % t_len));
    }
    out
}

/// Build the non-cyclic regressand blocks for the classical pipeline.
///
/// The sample range is `t = t0..T` with `t0 = max(1, k + 1 - k0)` where `k0`
/// is the number of stored pre-sample columns: a simulated panel (which
/// carries all `k` pre-sample values) keeps the full range `1..T`, while a
/// panel with only `X_0` starts at `t = k`, dropping rows whose lags are not
/// observable. Deterministic regressors are evaluated at the actual time
/// index `t`.
pub fn johansen_regressands(
    panel: &PanelSeries,
    k: usize,
    det_terms: &[DeterministicTerm],
) -> Result<RegressandSet> {
    if k == 0 {
        return Err(Error::InvalidParam("lag order k must be >= 1".into()));
    }
    let (n, t_len) = (panel.n(), panel.t_len());
    let k0 = panel.presample_len();
    let t0 = 1.max(k as isize + 1 - k0 as isize) as usize;
    if t0 > t_len {
        return Err(Error::InvalidParam(format!(
            "no usable samples: T = {t_len} with {k0} pre-sample columns at k = {k}"
        )));
    }
    let t_eff = t_len - t0 + 1;
    let d_d = deterministic_width(det_terms);
    let m = n * (k - 1) + d_d;

    let mut warnings = Vec::new();
    if t_eff < n + m {
        warnings.push(format!(
            "effective sample {t_eff} is below N + m = {}; spectrum is degenerate",
            n + m
        ));
    }
    if t_len <= (k + 1) * n {
        warnings.push(format!(
            "T = {t_len} does not exceed (k+1)N = {}; high-dimensional asymptotics do not apply",
            (k + 1) * n
        ));
    }

    let mut z0 = DMatrix::zeros(n, t_eff);
    let mut zk = DMatrix::zeros(n, t_eff);
    let mut z1 = DMatrix::zeros(m, t_eff);
    for (col, t) in (t0..=t_len).enumerate() {
        let ti = t as isize;
        let dx_t = panel.x_at(ti).into_owned() - panel.x_at(ti - 1);
        z0.set_column(col, &dx_t);
        zk.set_column(col, &panel.x_at(ti - k as isize).into_owned());
        for i in 1..k {
            let dx_lag = panel.x_at(ti - i as isize).into_owned() - panel.x_at(ti - i as isize - 1);
            z1.view_mut(((i - 1) * n, col), (n, 1)).copy_from(&dx_lag);
        }
        if d_d > 0 {
            z1.view_mut((n * (k - 1), col), (d_d, 1))
                .copy_from(&deterministic_row(det_terms, t));
        }
    }

    Ok(RegressandSet {
        z0,
        zk,
        z1,
        meta: SpectrumMeta { n, t: t_len, k, procedure: Procedure::Johansen },
        warnings,
    })
}

/// Build the cyclic regressand blocks for the modified pipeline: changes
/// `dX_t`, detrended levels shifted by `k - 1` cyclic steps, and `k - 1`
/// cyclic lags of the changes plus an intercept row. All `T` columns are
/// kept.
pub fn modified_regressands(panel: &PanelSeries, k: usize) -> Result<RegressandSet> {
    if k == 0 {
        return Err(Error::InvalidParam("lag order k must be >= 1".into()));
    }
    let (n, t_len) = (panel.n(), panel.t_len());
    if t_len <= (k + 1) * n {
        return Err(Error::SampleTooShort { t: t_len, n, k, min: (k + 1) * n });
    }
    let dx = difference(panel);
    let xt = detrend(panel);

    let m = n * (k - 1) + 1;
    let mut z1 = DMatrix::zeros(m, t_len);
    for i in 1..k {
        z1.view_mut(((i - 1) * n, 0), (n, t_len))
            .copy_from(&cyclic_lag(&dx, i));
    }
    z1.row_mut(m - 1).fill(1.0);

    Ok(RegressandSet {
        zk: cyclic_lag(&xt, k - 1),
        z0: dx,
        z1,
        meta: SpectrumMeta { n, t: t_len, k, procedure: Procedure::Modified },
        warnings: Vec::new(),
    })
}

/// Symmetric pseudo-inverse square root: eigenvalues at or below
/// `1e-12 * lambda_max` are dropped (their directions map to zero) and a
/// degeneracy note is appended to `warnings`.
fn inv_sqrt_psd(s: &DMatrix<f64>, label: &str, warnings: &mut Vec<String>) -> DMatrix<f64> {
    let eig = s.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let floor = 1e-12 * lmax;
    let scaled = DMatrix::from_fn(s.nrows(), s.ncols(), |i, j| {
        let l = eig.eigenvalues[j];
        if l <= floor {
            0.0
        } else {
            eig.eigenvectors[(i, j)] / l.sqrt()
        }
    });
    let dropped = eig.eigenvalues.iter().filter(|l| **l <= floor).count();
    if dropped > 0 {
        warnings.push(format!(
            "{label} is singular to working precision ({dropped} of {} directions dropped); spectrum is degenerate",
            s.nrows()
        ));
    }
    &scaled * eig.eigenvectors.transpose()
}

/// Project `Z0` and `Zk` off the row span of `Z1` by least squares.
///
/// Uses a Cholesky solve of the regressor Gram matrix; if that fails the
/// Gram matrix is pseudo-inverted (eigenvalue floor `1e-12 * lambda_max`)
/// and a rank-deficiency warning is recorded. With no regressors (`m = 0`)
/// the inputs pass through unchanged. Residualizing a second time is the
/// identity up to roundoff.
pub fn residualize(set: &RegressandSet) -> ResidualPair {
    let mut warnings = set.warnings.clone();
    let m = set.z1.nrows();
    if m == 0 {
        return ResidualPair {
            r0: set.z0.clone(),
            rk: set.zk.clone(),
            meta: set.meta,
            warnings,
        };
    }
    let gram = &set.z1 * set.z1.transpose();
    // A Cholesky factorization can "succeed" with a zero pivot on an exactly
    // singular Gram matrix, so judge rank by the pivots themselves.
    let chol = nalgebra::Cholesky::new(gram.clone());
    let dmax = gram.diagonal().iter().cloned().fold(0.0_f64, f64::max);
    let full_rank = chol.as_ref().is_some_and(|c| {
        let lmin = c.l().diagonal().iter().cloned().fold(f64::INFINITY, f64::min);
        lmin.is_finite() && lmin * lmin > 1e-12 * dmax
    });
    let pinv_sqrt = if full_rank {
        None
    } else {
        Some(inv_sqrt_psd(&gram, "regressor Gram matrix", &mut warnings))
    };
    let project = |z: &DMatrix<f64>| -> DMatrix<f64> {
        let cross = &set.z1 * z.transpose(); // m x N
        let coeffs = match &pinv_sqrt {
            None => chol.as_ref().unwrap().solve(&cross),
            Some(w) => w * (w * &cross),
        };
        z - coeffs.transpose() * &set.z1
    };
    let r0 = project(&set.z0);
    let rk = project(&set.zk);
    ResidualPair { r0, rk, meta: set.meta, warnings }
}

/// Squared sample canonical correlations of the residual rows.
///
/// Forms `S00`, `Skk`, `S0k` and takes the squared singular values of
/// `S00^{-1/2} S0k Skk^{-1/2}`, which are real and in `[0, 1]` by
/// construction; values are clamped to `[0, 1]` (tolerance `1e-10`) and
/// sorted descending. Singular `S` matrices fall back to pseudo-inverse
/// square roots with a degeneracy warning.
pub fn canonical_eigs(pair: &ResidualPair) -> Result<CanonicalSpectrum> {
    let mut warnings = pair.warnings.clone();
    let s00 = &pair.r0 * pair.r0.transpose();
    let skk = &pair.rk * pair.rk.transpose();
    let s0k = &pair.r0 * pair.rk.transpose();

    let w00 = inv_sqrt_psd(&s00, "S00", &mut warnings);
    let wkk = inv_sqrt_psd(&skk, "Skk", &mut warnings);
    let core = &w00 * s0k * wkk;
    let svd = core.svd(false, false);

    let mut values: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    for v in &values {
        if !(-1e-10..=1.0 + 1e-10).contains(v) {
            return Err(Error::NumericalFailure(format!(
                "canonical eigenvalue {v} outside [0, 1] beyond tolerance"
            )));
        }
    }
    for v in &mut values {
        *v = v.clamp(0.0, 1.0);
    }
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());

    Ok(CanonicalSpectrum { values, meta: pair.meta, warnings })
}

/// Classical reduced-rank-regression spectrum: compose
/// [`johansen_regressands`], [`residualize`], [`canonical_eigs`].
pub fn johansen_spectrum(
    panel: &PanelSeries,
    k: usize,
    det_terms: &[DeterministicTerm],
) -> Result<CanonicalSpectrum> {
    canonical_eigs(&residualize(&johansen_regressands(panel, k, det_terms)?))
}

/// Modified spectrum: compose [`modified_regressands`], [`residualize`],
/// [`canonical_eigs`]. Requires `T > (k+1)N`.
pub fn modified_spectrum(panel: &PanelSeries, k: usize) -> Result<CanonicalSpectrum> {
    canonical_eigs(&residualize(&modified_regressands(panel, k)?))
}
