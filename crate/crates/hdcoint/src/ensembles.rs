//! Random-matrix reference models backing the test's null distribution.
//!
//! * [`haar_orthogonal`]: uniformly random rotations (determinant `+1`);
//! * [`sample_jacobi_spectrum`]: the real Jacobi ensemble via the
//!   double-Wishart construction;
//! * [`projector_model_spectrum`]: the rotation-invariant three-projector
//!   model whose nonzero eigenvalue law coincides with a Jacobi ensemble —
//!   usable even when the double-Wishart degrees of freedom are fractional;
//! * [`goe_top_eigs`]: rescaled top eigenvalues of the Gaussian orthogonal
//!   ensemble through its tridiagonal representation, feeding
//! * [`airy_sum_quantiles`]: Monte Carlo quantile tables for partial sums of
//!   edge-eigenvalue fluctuations, which are the critical values of the test.
//!
//! Every sampler is a pure function of its seed; replication harnesses fan
//! out counter-derived sub-seeds so results never depend on scheduling.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seed::{derive, stream_rng};
use crate::stats::{quantile, quantile_stderr};
use crate::tridiag::top_eigenvalues;
use crate::{Error, Result};

/// Exponents of the real Jacobi ensemble on `[0, 1]^N`: density proportional
/// to `det(M)^{p-1} det(1 - M)^{q-1}` times the Vandermonde interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    /// Matrix dimension `N`.
    pub n: usize,
    /// First exponent, `p > 0`.
    pub p: f64,
    /// Second exponent, `q > 0`.
    pub q: f64,
}

/// Geometry of the three-projector model: a Haar rotation `O` of the ambient
/// space `R^{T_amb}`, the span `V` of the last `N` coordinates, and the
/// projectors built from `O V, ..., O^{k-1} V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorModelSpec {
    /// Number of rotated copies of `V` removed (the lag order analogue).
    pub k: usize,
    /// Dimension of the distinguished subspace `V`.
    pub n: usize,
    /// Ambient dimension; must be at least `(k + 1) N`.
    pub t_amb: usize,
    /// Sampler seed.
    pub seed: u64,
}

/// One draw of the projector model: the `N` leading eigenvalues of
/// `P1 P2 P1`, plus how many times the rotation had to be redrawn because
/// `1 + O` was numerically singular (a probability-zero event).
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorModelSample {
    /// Eigenvalues, descending, in `[0, 1]`.
    pub values: Vec<f64>,
    /// Number of rotation redraws (normally zero).
    pub resamples: u32,
}

/// One `(r, alpha)` cell of a quantile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryQuantileCell {
    /// Number of summed top eigenvalues.
    pub r: usize,
    /// Quantile level in `(0, 1)`.
    pub alpha: f64,
    /// Monte Carlo quantile of the partial sum.
    pub quantile: f64,
    /// Order-statistic standard error of the quantile estimate.
    pub stderr: f64,
}

/// Monte Carlo quantiles of partial sums of rescaled edge eigenvalues,
/// with full sampling provenance. When produced in-process the raw partial
/// sums are retained (enabling p-values); they are dropped by serialization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AiryQuantileTable {
    /// Cells sorted by `(r, alpha)`.
    pub cells: Vec<AiryQuantileCell>,
    /// Tridiagonal matrix dimension used for the draws.
    pub matrix_dim: usize,
    /// Number of Monte Carlo replications.
    pub reps: usize,
    /// Seed that reproduces the table exactly.
    pub seed: u64,
    /// Sorted partial-sum samples per `r` (index `r - 1`); not serialized.
    #[serde(skip)]
    pub partial_sums: Option<Vec<Vec<f64>>>,
}

impl AiryQuantileTable {
    /// Look up the quantile for `r` summed eigenvalues at level `alpha`
    /// (matched to `1e-9`).
    pub fn quantile(&self, r: usize, alpha: f64) -> Result<f64> {
        self.cells
            .iter()
            .find(|c| c.r == r && (c.alpha - alpha).abs() < 1e-9)
            .map(|c| c.quantile)
            .ok_or(Error::MissingQuantile { r, alpha })
    }

    /// Distinct `r` values present, ascending.
    pub fn r_values(&self) -> Vec<usize> {
        let mut rs: Vec<usize> = self.cells.iter().map(|c| c.r).collect();
        rs.sort_unstable();
        rs.dedup();
        rs
    }

    /// Distinct levels present, ascending.
    pub fn alphas(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self.cells.iter().map(|c| c.alpha).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        a.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
        a
    }

    /// Short identifier capturing the table's sampling provenance, used when
    /// tagging test reports with the table they were decided against.
    pub fn table_id(&self) -> String {
        format!("goe-dim{}-reps{}-seed{}", self.matrix_dim, self.reps, self.seed)
    }

    /// Right-tail Monte Carlo p-value of an observed partial sum, when the
    /// raw samples are available (`None` after a serialization round trip).
    pub fn p_value(&self, r: usize, observed: f64) -> Option<f64> {
        let sums = self.partial_sums.as_ref()?.get(r.checked_sub(1)?)?;
        // Samples are sorted ascending: count strictly greater by partition.
        let idx = sums.partition_point(|s| *s <= observed);
        Some((sums.len() - idx) as f64 / sums.len() as f64)
    }

    /// Reattach raw partial-sum samples (e.g. loaded from a sidecar file)
    /// so [`Self::p_value`] works again after deserialization.
    ///
    /// `sums[i]` must hold the `reps` partial sums for `r = i + 1`; the
    /// outer length must cover every `r` present in the cells. Samples are
    /// sorted in place, so any row order on disk is accepted.
    pub fn attach_samples(&mut self, mut sums: Vec<Vec<f64>>) -> Result<()> {
        let r_max = self.r_values().last().copied().unwrap_or(0);
        if sums.len() < r_max {
            return Err(Error::InvalidParam(format!(
                "sample sidecar covers r <= {}, but the table has cells up to r = {r_max}",
                sums.len()
            )));
        }
        for (i, row) in sums.iter_mut().enumerate() {
            if row.len() != self.reps {
                return Err(Error::InvalidParam(format!(
                    "sample sidecar has {} sums for r = {}, expected reps = {}",
                    row.len(),
                    i + 1,
                    self.reps
                )));
            }
            if row.iter().any(|s| !s.is_finite()) {
                return Err(Error::InvalidParam(format!(
                    "sample sidecar has a non-finite sum for r = {}",
                    i + 1
                )));
            }
            row.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        self.partial_sums = Some(sums);
        Ok(())
    }
}

/// Sample a Haar-distributed rotation: QR of an i.i.d. Gaussian matrix with
/// the R-diagonal sign normalization, then one column flip if needed to land
/// in determinant `+1`. Orthogonal to `1e-10` by construction.
pub fn haar_orthogonal(n: usize, seed: u64) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::InvalidParam("matrix dimension must be >= 1".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let r_diag = qr.r().diagonal().into_owned();
    let mut q = qr.q();
    for (j, d) in r_diag.iter().enumerate() {
        if *d < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    Ok(q)
}

/// Sample the spectrum of the real Jacobi ensemble through the double-Wishart
/// construction `M = (A + B)^{-1/2} A (A + B)^{-1/2}` with
/// `A ~ Wishart_N(2p + N - 1)` and `B ~ Wishart_N(2q + N - 1)`.
///
/// The degrees of freedom must be positive integers (they are for every
/// parameter set arising from the null coupling); otherwise this errors and
/// the caller should draw from the projector model instead, which realizes
/// arbitrary half-integer geometry.
pub fn sample_jacobi_spectrum(jp: &JacobiParams, seed: u64) -> Result<Vec<f64>> {
    if jp.n == 0 || jp.p <= 0.0 || jp.q <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "Jacobi parameters need N >= 1 and p, q > 0, got N = {}, p = {}, q = {}",
            jp.n, jp.p, jp.q
        )));
    }
    let df1 = 2.0 * jp.p + jp.n as f64 - 1.0;
    let df2 = 2.0 * jp.q + jp.n as f64 - 1.0;
    let as_count = |df: f64, which: &str| -> Result<usize> {
        if (df - df.round()).abs() > 1e-9 || df.round() < 1.0 {
            return Err(Error::InvalidParam(format!(
                "{which} Wishart degrees of freedom 2{which}+N-1 = {df} is not a positive \
                 integer; use the projector model sampler for fractional geometry"
            )));
        }
        Ok(df.round() as usize)
    };
    let n1 = as_count(df1, "p")?;
    let n2 = as_count(df2, "q")?;

    let mut rng = stream_rng(seed, 0);
    let mut wishart = |df: usize| -> DMatrix<f64> {
        let g = DMatrix::<f64>::from_fn(jp.n, df, |_, _| StandardNormal.sample(&mut rng));
        &g * g.transpose()
    };
    let a = wishart(n1);
    let b = wishart(n2);

    // (A+B)^{-1/2} via symmetric eigendecomposition; A + B is invertible
    // almost surely since n1 + n2 >= N.
    let eig = (&a + &b).symmetric_eigen();
    let inv_sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.max(1e-300).sqrt()))
        * eig.eigenvectors.transpose();
    let m = &inv_sqrt * a * &inv_sqrt;
    let mut values: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().cloned().collect();
    values.sort_by(|x, y| y.partial_cmp(x).unwrap());
    for v in &mut values {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(values)
}

/// Orthonormal basis of the column span of `m`, with rank decided by
/// column-pivoted QR at relative tolerance `1e-10`.
fn orthonormal_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = m.clone().col_piv_qr();
    let r = qr.r();
    let rmax = r.diagonal().iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
    let rank = r
        .diagonal()
        .iter()
        .take_while(|d| d.abs() > 1e-10 * rmax)
        .count();
    qr.q().columns(0, rank).into_owned()
}

/// Apply `I - Q Q^T` (projection off an orthonormal column span).
fn project_off(q: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    if q.ncols() == 0 {
        m.clone()
    } else {
        m - q * (q.transpose() * m)
    }
}

/// Sample the three-projector model: with `O` a Haar rotation of `R^{T_amb}`
/// and `V` the span of the last `N` coordinates, build the projector `P`
/// orthogonal to `O V, ..., O^{k-1} V`, the projector `P1` onto `P V`, and
/// the projector `P2` onto `P O^{k-1} (1 + O)^{-1} V`; return the `N`
/// leading eigenvalues of `P1 P2 P1` (squared canonical cosines of the two
/// subspaces), descending.
pub fn projector_model_spectrum(spec: &ProjectorModelSpec) -> Result<ProjectorModelSample> {
    if spec.n == 0 || spec.k == 0 {
        return Err(Error::InvalidParam("need k >= 1 and N >= 1".into()));
    }
    if spec.t_amb < (spec.k + 1) * spec.n {
        return Err(Error::InvalidParam(format!(
            "ambient dimension {} is below (k+1)N = {}",
            spec.t_amb,
            (spec.k + 1) * spec.n
        )));
    }
    let t = spec.t_amb;
    let n = spec.n;
    let mut resamples = 0u32;
    loop {
        let o = haar_orthogonal(t, derive(spec.seed, resamples as u64))?;

        // 1 + O is singular only if O has eigenvalue -1: redraw if so.
        let lu = (DMatrix::identity(t, t) + &o).lu();
        let umax = lu.u().diagonal().amax();
        let umin = lu
            .u()
            .diagonal()
            .iter()
            .fold(f64::INFINITY, |acc, d| acc.min(d.abs()));
        if !(umin > 1e-10 * umax) {
            resamples += 1;
            if resamples > 8 {
                return Err(Error::NumericalFailure(
                    "1 + O persistently singular across redraws".into(),
                ));
            }
            continue;
        }

        // V basis: last N coordinate vectors.
        let mut v = DMatrix::zeros(t, n);
        for j in 0..n {
            v[(t - n + j, j)] = 1.0;
        }

        // Span to remove: [O V | O^2 V | ... | O^{k-1} V].
        let removed = if spec.k == 1 {
            DMatrix::zeros(t, 0)
        } else {
            let mut cols = DMatrix::zeros(t, (spec.k - 1) * n);
            let mut power = o.clone(); // O^1
            for block in 0..spec.k - 1 {
                cols.view_mut((0, block * n), (t, n)).copy_from(&(&power * &v));
                if block + 1 < spec.k - 1 {
                    power = &o * power;
                }
            }
            cols
        };
        let q_removed = orthonormal_basis(&removed);

        // P1 spans P V; P2 spans P O^{k-1} (1 + O)^{-1} V.
        let u1 = orthonormal_basis(&project_off(&q_removed, &v));
        let mut w = lu.solve(&v).ok_or_else(|| {
            Error::NumericalFailure("failed to apply (1 + O)^{-1}".into())
        })?;
        for _ in 0..spec.k - 1 {
            w = &o * w;
        }
        let u2 = orthonormal_basis(&project_off(&q_removed, &w));

        // Nonzero eigenvalues of P1 P2 P1 are squared singular values of
        // U1^T U2; pad with zeros up to N if a span degenerated.
        let svd = (u1.transpose() * u2).svd(false, false);
        let mut values: Vec<f64> = svd
            .singular_values
            .iter()
            .map(|s| (s * s).clamp(0.0, 1.0))
            .collect();
        values.resize(n, 0.0);
        values.sort_by(|x, y| y.partial_cmp(x).unwrap());
        return Ok(ProjectorModelSample { values, resamples });
    }
}

/// Rescaled top `r` eigenvalues of an `n x n` GOE draw: sample the symmetric
/// tridiagonal representation (diagonal `N(0, 2)`, off-diagonal chi variables
/// with `n-1, ..., 1` degrees of freedom), extract the top `r` eigenvalues
/// `mu_i` by Sturm bisection, and return `n^{1/6} (mu_i - 2 sqrt(n))`,
/// strictly decreasing.
pub fn goe_top_eigs(n: usize, r: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 || r == 0 || r > n {
        return Err(Error::InvalidParam(format!(
            "need 1 <= r <= n, got r = {r}, n = {n}"
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let sqrt2 = std::f64::consts::SQRT_2;
    let diag: Vec<f64> = (0..n)
        .map(|_| sqrt2 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let off: Vec<f64> = (1..n)
        .rev()
        .map(|df| ChiSquared::new(df as f64).unwrap().sample(&mut rng).sqrt())
        .collect();
    let top = top_eigenvalues(&diag, &off, r, 1e-6);
    let center = 2.0 * (n as f64).sqrt();
    let scale = (n as f64).powf(1.0 / 6.0);
    Ok(top.into_iter().map(|mu| scale * (mu - center)).collect())
}

/// Monte Carlo quantile table for partial sums of the rescaled top
/// eigenvalues: for each `r = 1..r_max` and each level in `alphas`, the
/// empirical quantile of `sum_{i<=r}` over `reps` independent draws at
/// matrix dimension `n`, with order-statistic standard errors.
///
/// Requires `reps >= 1000`. Replications are distributed over worker threads
/// with counter-derived sub-seeds, so the table is identical for any thread
/// count.
pub fn airy_sum_quantiles(
    r_max: usize,
    alphas: &[f64],
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<AiryQuantileTable> {
    if r_max == 0 {
        return Err(Error::InvalidParam("need r_max >= 1".into()));
    }
    if reps < 1000 {
        return Err(Error::InvalidParam(format!(
            "need at least 1000 replications for stable quantiles, got {reps}"
        )));
    }
    if alphas.iter().any(|a| !(0.0 < *a && *a < 1.0)) {
        return Err(Error::InvalidParam("levels must lie strictly in (0, 1)".into()));
    }

    let draws: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|rep| goe_top_eigs(n, r_max, derive(seed, rep as u64)))
        .collect::<Result<_>>()?;

    let mut partial_sums: Vec<Vec<f64>> = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let mut sums: Vec<f64> = draws.iter().map(|d| d[..r].iter().sum()).collect();
        sums.sort_by(|a, b| a.partial_cmp(b).unwrap());
        partial_sums.push(sums);
    }

    let mut cells = Vec::with_capacity(r_max * alphas.len());
    let mut sorted_alphas = alphas.to_vec();
    sorted_alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (r, sums) in partial_sums.iter().enumerate() {
        for alpha in &sorted_alphas {
            cells.push(AiryQuantileCell {
                r: r + 1,
                alpha: *alpha,
                quantile: quantile(sums, *alpha),
                stderr: quantile_stderr(sums, *alpha),
            });
        }
    }

    Ok(AiryQuantileTable {
        cells,
        matrix_dim: n,
        reps,
        seed,
        partial_sums: Some(partial_sums),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{frak_from_jacobi_exponents, wachter_params, wachter_tail};
    use crate::stats::{ks_distance_cdf, ks_distance_two_sample, mean};
    use approx::assert_abs_diff_eq;

    #[test]
    fn haar_one_by_one_is_unit() {
        for seed in 0..20 {
            let o = haar_orthogonal(1, seed).unwrap();
            assert_abs_diff_eq!(o[(0, 0)], 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn haar_is_orthogonal_with_unit_determinant() {
        let o = haar_orthogonal(50, 7).unwrap();
        let gram = o.transpose() * &o;
        assert!((gram - DMatrix::identity(50, 50)).abs().max() < 1e-10);
        assert_abs_diff_eq!(o.determinant(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn haar_entry_second_moment_matches_uniform_law() {
        // E[O_11^2] = 1/n for Haar; n = 3 over 10^4 draws.
        let vals: Vec<f64> = (0..10_000)
            .map(|s| {
                let o = haar_orthogonal(3, derive(99, s)).unwrap();
                o[(0, 0)] * o[(0, 0)]
            })
            .collect();
        assert!((mean(&vals) - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn jacobi_scalar_unit_exponents_are_uniform() {
        let draws: Vec<f64> = (0..10_000)
            .map(|s| sample_jacobi_spectrum(&JacobiParams { n: 1, p: 1.0, q: 1.0 }, derive(3, s)).unwrap()[0])
            .collect();
        assert!(ks_distance_cdf(&draws, |x| x.clamp(0.0, 1.0)) < 0.02);
    }

    #[test]
    fn jacobi_scalar_matches_beta_moments() {
        // p=2, q=3 is Beta(2, 3): mean 0.4.
        let draws: Vec<f64> = (0..10_000)
            .map(|s| sample_jacobi_spectrum(&JacobiParams { n: 1, p: 2.0, q: 3.0 }, derive(4, s)).unwrap()[0])
            .collect();
        assert!((mean(&draws) - 0.4).abs() < 0.01);
    }

    #[test]
    fn jacobi_bulk_matches_limit_measure() {
        // Null-coupling exponents at N=50, T=500, k=1: p = N/2, q =
        // (T-(k+1)N)/2; pooled spectra vs the mapped bulk law.
        let n = 50usize;
        let (p, q) = (25.0, 200.0);
        let (pf, qf) = frak_from_jacobi_exponents(n, p, q);
        assert_abs_diff_eq!(pf, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(qf, 9.0, epsilon = 1e-12);
        let w = wachter_params(pf, qf).unwrap();
        let mut pooled = Vec::new();
        for s in 0..20 {
            pooled.extend(sample_jacobi_spectrum(&JacobiParams { n, p, q }, derive(5, s)).unwrap());
        }
        let ks = ks_distance_cdf(&pooled, |x| 1.0 - wachter_tail(x, &w));
        assert!(ks < 0.05, "KS = {ks}");
    }

    #[test]
    fn jacobi_rejects_fractional_degrees_of_freedom() {
        let err = sample_jacobi_spectrum(&JacobiParams { n: 2, p: 0.75, q: 1.0 }, 0).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("projector model"), "got: {msg}");
    }

    #[test]
    fn projector_values_lie_in_unit_interval_and_reproduce() {
        let spec = ProjectorModelSpec { k: 3, n: 2, t_amb: 12, seed: 11 };
        let a = projector_model_spectrum(&spec).unwrap();
        let b = projector_model_spectrum(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values.len(), 2);
        assert!(a.values.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(a.values[0] >= a.values[1]);
        assert_eq!(a.resamples, 0);
    }

    #[test]
    fn projector_scalar_law_matches_closed_form_beta() {
        // k=1, N=1, ambient 3: the eigenvalue follows Beta(1/2, 1), whose
        // CDF is sqrt(x).
        let draws: Vec<f64> = (0..20_000)
            .map(|s| {
                projector_model_spectrum(&ProjectorModelSpec { k: 1, n: 1, t_amb: 3, seed: derive(6, s) })
                    .unwrap()
                    .values[0]
            })
            .collect();
        let ks = ks_distance_cdf(&draws, |x| x.clamp(0.0, 1.0).sqrt());
        assert!(ks < 0.03, "KS = {ks}");
    }

    #[test]
    fn projector_largest_eigenvalue_matches_jacobi_sampler() {
        // k=2, N=2, ambient 10 -> Jacobi exponents p = 1, q = 2.5 (integer
        // double-Wishart degrees of freedom 3 and 6).
        let reps = 4000;
        let proj: Vec<f64> = (0..reps)
            .map(|s| {
                projector_model_spectrum(&ProjectorModelSpec { k: 2, n: 2, t_amb: 10, seed: derive(7, s) })
                    .unwrap()
                    .values[0]
            })
            .collect();
        let jac: Vec<f64> = (0..reps)
            .map(|s| sample_jacobi_spectrum(&JacobiParams { n: 2, p: 1.0, q: 2.5 }, derive(8, s)).unwrap()[0])
            .collect();
        let ks = ks_distance_two_sample(&proj, &jac);
        assert!(ks < 0.05, "KS = {ks}");
    }

    #[test]
    fn goe_values_strictly_decrease() {
        for seed in 0..5 {
            let vals = goe_top_eigs(2000, 4, seed).unwrap();
            assert_eq!(vals.len(), 4);
            for w in vals.windows(2) {
                assert!(w[0] > w[1]);
            }
        }
    }

    #[test]
    fn goe_top_matches_dense_eigensolver_at_small_n() {
        // The tridiagonal model's top eigenvalues equal a dense symmetric
        // solve of the same matrix.
        let n = 60;
        let mut rng = stream_rng(12, 0);
        let sqrt2 = std::f64::consts::SQRT_2;
        let diag: Vec<f64> = (0..n).map(|_| sqrt2 * rng.sample::<f64, _>(StandardNormal)).collect();
        let off: Vec<f64> = (1..n)
            .rev()
            .map(|df| ChiSquared::new(df as f64).unwrap().sample(&mut rng).sqrt())
            .collect();
        let mut dense = DMatrix::zeros(n, n);
        for i in 0..n {
            dense[(i, i)] = diag[i];
            if i + 1 < n {
                dense[(i, i + 1)] = off[i];
                dense[(i + 1, i)] = off[i];
            }
        }
        let mut eigs: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().cloned().collect();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let top = top_eigenvalues(&diag, &off, 3, 1e-10);
        for (a, b) in top.iter().zip(&eigs) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-8);
        }
    }

    #[test]
    fn quantile_table_shape_and_monotonicity() {
        let alphas = [0.9, 0.95, 0.975, 0.99];
        let table = airy_sum_quantiles(3, &alphas, 500, 1500, 21).unwrap();
        assert_eq!(table.cells.len(), 12);
        assert_eq!(table.r_values(), vec![1, 2, 3]);
        // Strictly increasing in alpha at fixed r.
        for r in 1..=3 {
            let mut prev = f64::NEG_INFINITY;
            for a in &alphas {
                let q = table.quantile(r, *a).unwrap();
                assert!(q > prev, "r = {r}");
                prev = q;
            }
        }
        // Decreasing in r at fixed alpha: each extra eigenvalue adds a
        // strongly negative term.
        for a in &alphas {
            let q1 = table.quantile(1, *a).unwrap();
            let q2 = table.quantile(2, *a).unwrap();
            let q3 = table.quantile(3, *a).unwrap();
            assert!(q1 > q2 && q2 > q3, "alpha = {a}");
        }
        // Standard errors present at this replication count.
        assert!(table.cells.iter().all(|c| c.stderr.is_finite() && c.stderr > 0.0));
        // Missing cells error.
        assert!(matches!(
            table.quantile(4, 0.9),
            Err(Error::MissingQuantile { r: 4, .. })
        ));
    }

    #[test]
    fn quantile_table_is_reproducible_and_guards_reps() {
        let a = airy_sum_quantiles(2, &[0.9, 0.95], 300, 1000, 5).unwrap();
        let b = airy_sum_quantiles(2, &[0.9, 0.95], 300, 1000, 5).unwrap();
        assert_eq!(a.cells, b.cells);
        assert!(airy_sum_quantiles(2, &[0.9], 300, 999, 5).is_err());
        assert!(airy_sum_quantiles(2, &[1.0], 300, 1000, 5).is_err());
    }

    #[test]
    fn p_values_come_from_retained_samples() {
        let table = airy_sum_quantiles(1, &[0.9], 300, 1000, 9).unwrap();
        let q = table.quantile(1, 0.9).unwrap();
        let p = table.p_value(1, q).unwrap();
        assert!((p - 0.1).abs() < 0.01, "p = {p}");
        assert_eq!(table.p_value(1, f64::NEG_INFINITY), Some(1.0));
        assert_eq!(table.p_value(1, f64::INFINITY), Some(0.0));
        assert_eq!(table.p_value(2, 0.0), None);

        // Serde round trip drops samples: p-values become unavailable.
        let json = serde_json::to_string(&table).unwrap();
        let back: AiryQuantileTable = serde_json::from_str(&json).unwrap();
        assert!(back.partial_sums.is_none());
        assert_eq!(back.cells, table.cells);
    }
}
