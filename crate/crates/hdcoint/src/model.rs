//! Vector error-correction data-generating processes and panel simulation.
//!
//! The process is a VAR(k) written in error-correction form,
//!
//! ```text
//! dX_t = Gamma_1 dX_{t-1} + ... + Gamma_{k-1} dX_{t-k+1} + Pi X_{t-k} + Phi D_t + eps_t,
//! ```
//!
//! with `eps_t ~ N(0, Lambda)` i.i.d., deterministic regressors `D_t`, and
//! fixed pre-sample values `X_{1-k}, ..., X_0`. Simulation is seeded and
//! bit-reproducible: each time column's innovation is drawn from its own
//! counter-derived generator (see [`crate::seed`]), so output does not depend
//! on evaluation order or worker count.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::seed::stream_rng;
use crate::{Error, Result};

/// Structured low-rank coefficient patterns used throughout the experiments:
/// single entries, filled columns, leading diagonal blocks, and scaled
/// identities. Indices are 0-based.
///
/// The serialized form is externally tagged with snake_case variant names,
/// e.g. `{"single_entry": {"row": 0, "col": 1, "scale": 0.95}}`; this is the
/// shape the CLI's simulation config files use.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SparsePattern {
    /// `scale` at `(row, col)`, zero elsewhere (rank 1 unless scale = 0).
    SingleEntry { row: usize, col: usize, scale: f64 },
    /// `scale` filling column `col`, zero elsewhere (rank 1 unless scale = 0).
    FilledColumn { col: usize, scale: f64 },
    /// `scale` on the first `rank` diagonal entries, zero elsewhere.
    LeadingBlock { rank: usize, scale: f64 },
    /// `scale` times the identity.
    ScaledIdentity { scale: f64 },
}

/// Materialize a [`SparsePattern`] as a dense `n x n` matrix.
///
/// Errors if an index or block rank exceeds the dimension.
pub fn realize_pattern(p: &SparsePattern, n: usize) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(n, n);
    match *p {
        SparsePattern::SingleEntry { row, col, scale } => {
            if row >= n || col >= n {
                return Err(Error::InvalidParam(format!(
                    "entry ({row}, {col}) outside a {n} x {n} matrix"
                )));
            }
            m[(row, col)] = scale;
        }
        SparsePattern::FilledColumn { col, scale } => {
            if col >= n {
                return Err(Error::InvalidParam(format!(
                    "column {col} outside a {n} x {n} matrix"
                )));
            }
            for i in 0..n {
                m[(i, col)] = scale;
            }
        }
        SparsePattern::LeadingBlock { rank, scale } => {
            if rank > n {
                return Err(Error::InvalidParam(format!(
                    "block rank {rank} exceeds dimension {n}"
                )));
            }
            for i in 0..rank {
                m[(i, i)] = scale;
            }
        }
        SparsePattern::ScaledIdentity { scale } => {
            for i in 0..n {
                m[(i, i)] = scale;
            }
        }
    }
    Ok(m)
}

/// One deterministic regressor family; a spec may stack several.
#[derive(Debug, Clone, PartialEq)]
pub enum DeterministicTerm {
    /// A single all-ones column.
    Constant,
    /// A single raw linear-trend column with value `t`.
    LinearTrend,
    /// `period - 1` zero/one indicator columns; the first season is the
    /// dropped baseline. Seasons cycle as `(t - 1) mod period`.
    SeasonalDummies { period: usize },
}

impl DeterministicTerm {
    /// Number of columns this term contributes.
    pub fn width(&self) -> usize {
        match self {
            DeterministicTerm::Constant | DeterministicTerm::LinearTrend => 1,
            DeterministicTerm::SeasonalDummies { period } => period - 1,
        }
    }
}

/// Total regressor count contributed by a term list.
pub fn deterministic_width(terms: &[DeterministicTerm]) -> usize {
    terms.iter().map(DeterministicTerm::width).sum()
}

/// Evaluate the stacked deterministic regressor vector `D_t` (length
/// [`deterministic_width`]) at time `t` (1-based).
pub fn deterministic_row(terms: &[DeterministicTerm], t: usize) -> DVector<f64> {
    let mut out = Vec::with_capacity(deterministic_width(terms));
    for term in terms {
        match term {
            DeterministicTerm::Constant => out.push(1.0),
            DeterministicTerm::LinearTrend => out.push(t as f64),
            DeterministicTerm::SeasonalDummies { period } => {
                let season = (t - 1) % period;
                for s in 1..*period {
                    out.push(if season == s { 1.0 } else { 0.0 });
                }
            }
        }
    }
    DVector::from_vec(out)
}

/// Deterministic part `Phi D_t` of the process.
#[derive(Debug, Clone, PartialEq)]
pub enum DeterministicTerms {
    /// No deterministic component.
    None,
    /// Constant drift `mu` (an `N`-vector): `Phi D_t = mu` for all `t`.
    Constant(DVector<f64>),
    /// General `Phi` (`N x d_D`) applied to the stacked regressors `D_t`
    /// generated by `terms`.
    General {
        phi: DMatrix<f64>,
        terms: Vec<DeterministicTerm>,
    },
}

impl DeterministicTerms {
    fn value_at(&self, n: usize, t: usize) -> DVector<f64> {
        match self {
            DeterministicTerms::None => DVector::zeros(n),
            DeterministicTerms::Constant(mu) => mu.clone(),
            DeterministicTerms::General { phi, terms } => phi * deterministic_row(terms, t),
        }
    }
}

/// Full specification of the error-correction DGP.
#[derive(Debug, Clone)]
pub struct VarKSpec {
    /// Panel dimension `N`.
    pub n: usize,
    /// VAR order `k >= 1`.
    pub k: usize,
    /// Sample length `T`.
    pub t: usize,
    /// Short-run coefficients `Gamma_1 .. Gamma_{k-1}` (exactly `k - 1`
    /// `N x N` matrices).
    pub gammas: Vec<DMatrix<f64>>,
    /// Error-correction coefficient `Pi` (`N x N`).
    pub pi: DMatrix<f64>,
    /// Deterministic component.
    pub det_terms: DeterministicTerms,
    /// Innovation covariance `Lambda` (`N x N`, symmetric positive-definite).
    pub noise_cov: DMatrix<f64>,
    /// Pre-sample values `X_{1-k}, ..., X_0` as the columns of an `N x k`
    /// matrix (last column is `X_0`).
    pub initial: DMatrix<f64>,
}

impl VarKSpec {
    /// A baseline spec: zero coefficients, no deterministic terms, identity
    /// innovation covariance, zero initial values. Under these defaults the
    /// panel is a pure Gaussian random walk.
    pub fn random_walk(n: usize, k: usize, t: usize) -> Self {
        VarKSpec {
            n,
            k,
            t,
            gammas: vec![DMatrix::zeros(n, n); k.saturating_sub(1)],
            pi: DMatrix::zeros(n, n),
            det_terms: DeterministicTerms::None,
            noise_cov: DMatrix::identity(n, n),
            initial: DMatrix::zeros(n, k),
        }
    }

    /// Check dimension and positivity invariants.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParam("dimension N must be >= 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidParam("VAR order k must be >= 1".into()));
        }
        if self.t == 0 {
            return Err(Error::InvalidParam("sample length T must be >= 1".into()));
        }
        if self.gammas.len() != self.k - 1 {
            return Err(Error::InvalidParam(format!(
                "expected {} short-run matrices for k = {}, got {}",
                self.k - 1,
                self.k,
                self.gammas.len()
            )));
        }
        for (i, g) in self.gammas.iter().enumerate() {
            if g.nrows() != self.n || g.ncols() != self.n {
                return Err(Error::InvalidParam(format!(
                    "Gamma_{} is {} x {}, expected {} x {}",
                    i + 1,
                    g.nrows(),
                    g.ncols(),
                    self.n,
                    self.n
                )));
            }
        }
        if self.pi.nrows() != self.n || self.pi.ncols() != self.n {
            return Err(Error::InvalidParam("Pi has wrong shape".into()));
        }
        match &self.det_terms {
            DeterministicTerms::None => {}
            DeterministicTerms::Constant(mu) => {
                if mu.len() != self.n {
                    return Err(Error::InvalidParam("drift vector has wrong length".into()));
                }
            }
            DeterministicTerms::General { phi, terms } => {
                if phi.nrows() != self.n || phi.ncols() != deterministic_width(terms) {
                    return Err(Error::InvalidParam(
                        "Phi shape inconsistent with deterministic terms".into(),
                    ));
                }
                if terms
                    .iter()
                    .any(|t| matches!(t, DeterministicTerm::SeasonalDummies { period } if *period < 2))
                {
                    return Err(Error::InvalidParam("seasonal period must be >= 2".into()));
                }
            }
        }
        if self.noise_cov.nrows() != self.n || self.noise_cov.ncols() != self.n {
            return Err(Error::InvalidParam("noise covariance has wrong shape".into()));
        }
        let asym = (&self.noise_cov - self.noise_cov.transpose()).abs().max();
        if asym > 1e-10 * self.noise_cov.abs().max().max(1.0) {
            return Err(Error::InvalidParam("noise covariance is not symmetric".into()));
        }
        if self.initial.nrows() != self.n || self.initial.ncols() != self.k {
            return Err(Error::InvalidParam(format!(
                "initial values must be {} x {}",
                self.n, self.k
            )));
        }
        Ok(())
    }
}

/// A simulated or ingested panel: columns of `data` are `X_1 .. X_T`, and
/// `initial` holds the pre-sample columns (at least `X_0`; a simulated panel
/// carries all `k` of them).
#[derive(Debug, Clone, PartialEq)]
pub struct PanelSeries {
    /// `N x T` observations.
    pub data: DMatrix<f64>,
    /// `N x k0` pre-sample values, last column `X_0` (`k0 >= 1`).
    pub initial: DMatrix<f64>,
    /// Optional series labels (length `N` when present).
    pub meta: Option<Vec<String>>,
}

impl PanelSeries {
    /// Construct a panel and check shape/finiteness invariants.
    pub fn new(data: DMatrix<f64>, initial: DMatrix<f64>, meta: Option<Vec<String>>) -> Result<Self> {
        if initial.nrows() != data.nrows() {
            return Err(Error::InvalidParam(
                "initial and data row counts differ".into(),
            ));
        }
        if initial.ncols() == 0 {
            return Err(Error::InvalidParam(
                "panel needs at least the X_0 pre-sample column".into(),
            ));
        }
        if data.ncols() == 0 {
            return Err(Error::InvalidParam("panel needs at least one observation".into()));
        }
        if let Some(labels) = &meta {
            if labels.len() != data.nrows() {
                return Err(Error::InvalidParam("label count differs from N".into()));
            }
        }
        if data.iter().chain(initial.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam("panel contains non-finite values".into()));
        }
        Ok(PanelSeries { data, initial, meta })
    }

    /// Panel dimension `N`.
    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    /// Sample length `T`.
    pub fn t_len(&self) -> usize {
        self.data.ncols()
    }

    /// Number of stored pre-sample columns.
    pub fn presample_len(&self) -> usize {
        self.initial.ncols()
    }

    /// The column `X_t` for `t` in `1-k0 ..= T` (0 and negatives address the
    /// pre-sample block).
    pub fn x_at(&self, t: isize) -> nalgebra::DVectorView<'_, f64> {
        let k0 = self.initial.ncols() as isize;
        if t >= 1 {
            self.data.column(t as usize - 1)
        } else {
            debug_assert!(t > -k0, "time index before stored pre-sample values");
            self.initial.column((t + k0 - 1) as usize)
        }
    }
}

/// The innovation panel `[eps_1 .. eps_T]` that [`simulate`] consumes for
/// `(spec, seed)`: column `t` is the Cholesky factor of `Lambda` applied to
/// standard normals from the counter-derived stream `t`. Exposed so callers
/// and tests can replay the exact noise behind a simulated panel.
pub fn noise_matrix(spec: &VarKSpec, seed: u64) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let chol = nalgebra::Cholesky::new(spec.noise_cov.clone()).ok_or_else(|| {
        Error::InvalidParam("noise covariance is not positive-definite".into())
    })?;
    let l = chol.l();
    let n = spec.n;
    let mut eps = DMatrix::zeros(n, spec.t);
    for t in 1..=spec.t {
        let mut rng = stream_rng(seed, t as u64);
        let z = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        eps.set_column(t - 1, &(&l * z));
    }
    Ok(eps)
}

/// Simulate the error-correction recursion exactly, given the seeded Gaussian
/// innovations of [`noise_matrix`]. Deterministic in `(spec, seed)`.
pub fn simulate(spec: &VarKSpec, seed: u64) -> Result<PanelSeries> {
    let eps = noise_matrix(spec, seed)?;
    let (n, k, t_len) = (spec.n, spec.k, spec.t);

    // Extended storage [X_{1-k} .. X_0 | X_1 .. X_T]; column k-1+t holds X_t.
    let mut x = DMatrix::zeros(n, k + t_len);
    x.view_mut((0, 0), (n, k)).copy_from(&spec.initial);

    // dX_s for s = 2-k .. 0 from the pre-sample block; dX_s for s >= 1 filled
    // as the recursion advances. Index dx column (k-2)+s for s >= 2-k.
    let mut dx = DMatrix::zeros(n, (k - 1) + t_len);
    for s in 0..k.saturating_sub(1) {
        let col = x.column(s + 1) - x.column(s);
        dx.set_column(s, &col);
    }

    for t in 1..=t_len {
        // dX_t = sum_i Gamma_i dX_{t-i} + Pi X_{t-k} + Phi D_t + eps_t.
        let mut delta = spec.det_terms.value_at(n, t) + eps.column(t - 1);
        for (i, gamma) in spec.gammas.iter().enumerate() {
            // dX_{t-(i+1)} sits at dx column (k-2) + t - (i+1).
            let col = dx.column(k - 2 + t - (i + 1));
            delta += gamma * col;
        }
        // X_{t-k} sits at x column (k-1) + t - k = t - 1.
        delta += &spec.pi * x.column(t - 1);

        let new_x = x.column(k - 1 + t - 1) + &delta;
        x.set_column(k - 1 + t, &new_x);
        dx.set_column(k - 1 + t - 1, &delta);
    }

    let data = x.view((0, k), (n, t_len)).into_owned();
    let initial = x.view((0, 0), (n, k)).into_owned();
    PanelSeries::new(data, initial, None)
}

/// First differences `dX_t = X_t - X_{t-1}` for `t = 1..T`, using the stored
/// `X_0` for the first column.
pub fn difference(panel: &PanelSeries) -> DMatrix<f64> {
    let (n, t_len) = (panel.n(), panel.t_len());
    let mut d = DMatrix::zeros(n, t_len);
    for t in 1..=t_len {
        let prev = panel.x_at(t as isize - 1).into_owned();
        let col = panel.data.column(t - 1) - prev;
        d.set_column(t - 1, &col);
    }
    d
}
