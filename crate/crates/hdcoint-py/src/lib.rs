//! Python bindings for the `hdcoint` crate.
//!
//! The module mirrors the library's main operations: panel simulation, the
//! two canonical-correlation spectra, the rank test with the bundled critical
//! values, the closed-form limit constants, and the reference ensemble
//! samplers. Matrices cross the boundary as plain lists of row lists, and DGP
//! configurations use the same JSON schema as the CLI's `simulate --config`.

use std::sync::OnceLock;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hdcoint::ensembles::{AiryQuantileTable, JacobiParams, ProjectorModelSpec};
use hdcoint::inference::TestReport;
use hdcoint::io::{read_airy_sums_reader, read_quantile_table_reader, SimulateConfig};
use hdcoint::model::{DeterministicTerm, PanelSeries, VarKSpec};
use hdcoint::spectra::CanonicalSpectrum;
use nalgebra::DMatrix;

const DEFAULT_TABLE_CSV: &str = include_str!("../../hdcoint/assets/airy-quantiles-default.csv");
const DEFAULT_SUMS_CSV: &str = include_str!("../../hdcoint/assets/airy-sums-default.csv");

fn err(e: hdcoint::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// The critical-value table bundled with the crate, with its raw partial-sum
/// samples attached so tests can report Monte Carlo p-values.
fn default_table() -> &'static AiryQuantileTable {
    static TABLE: OnceLock<AiryQuantileTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = read_quantile_table_reader(DEFAULT_TABLE_CSV.as_bytes())
            .expect("bundled quantile table parses");
        let sums = read_airy_sums_reader(DEFAULT_SUMS_CSV.as_bytes())
            .expect("bundled sum sidecar parses");
        table.attach_samples(sums).expect("bundled sidecar matches the table");
        table
    })
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> PyResult<DMatrix<f64>> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(PyValueError::new_err(format!("{what}: need at least one row")));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err(format!("{what}: rows have unequal lengths")));
    }
    Ok(DMatrix::from_row_iterator(nrows, ncols, rows.iter().flatten().copied()))
}

fn rows_from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// `"constant"`, `"trend"`, or `"seasonal:<period>"`.
fn parse_det(spec: &str) -> PyResult<DeterministicTerm> {
    match spec {
        "constant" => Ok(DeterministicTerm::Constant),
        "trend" => Ok(DeterministicTerm::LinearTrend),
        other => match other.strip_prefix("seasonal:").and_then(|p| p.parse().ok()) {
            Some(period) => Ok(DeterministicTerm::SeasonalDummies { period }),
            None => Err(PyValueError::new_err(format!(
                "unknown deterministic term {other:?}; use \"constant\", \"trend\", or \"seasonal:<period>\""
            ))),
        },
    }
}

/// An observed `N x T` panel plus the pre-sample columns the lagged
/// regressors draw on.
#[pyclass(frozen)]
struct Panel {
    inner: PanelSeries,
}

#[pymethods]
impl Panel {
    /// Build a panel from explicit rows: `data` is `N` rows of length `T`,
    /// `initial` is `N` rows of pre-sample values (last column is `X_0`).
    #[new]
    #[pyo3(signature = (data, initial, meta = None))]
    fn new(data: Vec<Vec<f64>>, initial: Vec<Vec<f64>>, meta: Option<Vec<String>>) -> PyResult<Self> {
        let data = matrix_from_rows(&data, "data")?;
        let initial = matrix_from_rows(&initial, "initial")?;
        Ok(Self { inner: PanelSeries::new(data, initial, meta).map_err(err)? })
    }

    /// Simulate the pure random-walk null: `Delta X_t = eps_t`.
    #[staticmethod]
    #[pyo3(signature = (n, k, t, seed = 0))]
    fn random_walk(n: usize, k: usize, t: usize, seed: u64) -> PyResult<Self> {
        let spec = VarKSpec::random_walk(n, k, t);
        Ok(Self { inner: hdcoint::model::simulate(&spec, seed).map_err(err)? })
    }

    /// Simulate from a JSON configuration with the same schema as the CLI's
    /// `simulate --config` file: `{"n", "t", "k", "gammas", "pi", "drift",
    /// "noise_diag"}` with sparse-pattern coefficient entries.
    #[staticmethod]
    #[pyo3(signature = (config_json, seed = 0))]
    fn simulate(config_json: &str, seed: u64) -> PyResult<Self> {
        let cfg: SimulateConfig = serde_json::from_str(config_json)
            .map_err(|e| PyValueError::new_err(format!("bad simulate config: {e}")))?;
        let spec = cfg.to_var_spec().map_err(err)?;
        Ok(Self { inner: hdcoint::model::simulate(&spec, seed).map_err(err)? })
    }

    /// Panel dimension `N`.
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Sample length `T`.
    #[getter]
    fn t_len(&self) -> usize {
        self.inner.t_len()
    }

    /// Number of pre-sample columns.
    #[getter]
    fn presample_len(&self) -> usize {
        self.inner.presample_len()
    }

    /// Optional series labels.
    #[getter]
    fn meta(&self) -> Option<Vec<String>> {
        self.inner.meta.clone()
    }

    /// Observations as `N` rows of length `T`.
    fn values(&self) -> Vec<Vec<f64>> {
        rows_from_matrix(&self.inner.data)
    }

    /// Pre-sample values as `N` rows (last column is `X_0`).
    fn initial(&self) -> Vec<Vec<f64>> {
        rows_from_matrix(&self.inner.initial)
    }

    fn __repr__(&self) -> String {
        format!(
            "Panel(n={}, t_len={}, presample_len={})",
            self.inner.n(),
            self.inner.t_len(),
            self.inner.presample_len()
        )
    }
}

/// Eigenvalues of the classical rank-test procedure at lag order `k`, sorted
/// descending. `det` lists deterministic regressors: `"constant"`, `"trend"`,
/// `"seasonal:<period>"`.
#[pyfunction]
#[pyo3(signature = (panel, k, det = Vec::new()))]
fn johansen_spectrum(panel: &Panel, k: usize, det: Vec<String>) -> PyResult<Vec<f64>> {
    let terms: Vec<DeterministicTerm> =
        det.iter().map(|s| parse_det(s)).collect::<PyResult<_>>()?;
    Ok(hdcoint::spectra::johansen_spectrum(&panel.inner, k, &terms).map_err(err)?.values)
}

/// Eigenvalues of the modified (cyclically lagged, endpoint-detrended)
/// procedure at lag order `k`, sorted descending.
#[pyfunction]
fn modified_spectrum(panel: &Panel, k: usize) -> PyResult<Vec<f64>> {
    Ok(hdcoint::spectra::modified_spectrum(&panel.inner, k).map_err(err)?.values)
}

fn report_dict<'py>(
    py: Python<'py>,
    report: &TestReport,
    spectrum: &CanonicalSpectrum,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("r", report.r2)?;
    d.set_item("raw", report.raw)?;
    d.set_item("degenerate", report.degenerate)?;
    d.set_item("rescaled", report.centered_rescaled)?;
    d.set_item("quantile", report.quantile_used)?;
    d.set_item("alpha", report.alpha)?;
    d.set_item("decision", report.decision.to_string())?;
    d.set_item("p_value", report.p_value_mc)?;
    d.set_item("p_value_stderr", report.p_value_stderr)?;
    d.set_item("n", report.provenance.n)?;
    d.set_item("t", report.provenance.t)?;
    d.set_item("k", report.provenance.k)?;
    d.set_item("table_id", report.provenance.table_id.clone())?;
    d.set_item("spectrum", spectrum.values.clone())?;
    d.set_item("warnings", spectrum.warnings.clone())?;
    Ok(d)
}

/// Rank-`r` test on the modified-procedure spectrum against the bundled
/// critical values: returns a dict with the raw and rescaled statistics, the
/// quantile compared against, the decision, and a Monte Carlo p-value.
#[pyfunction]
#[pyo3(signature = (panel, k, r = 1, alpha = 0.95))]
fn modified_lr_test<'py>(
    py: Python<'py>,
    panel: &Panel,
    k: usize,
    r: usize,
    alpha: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let spectrum = hdcoint::spectra::modified_spectrum(&panel.inner, k).map_err(err)?;
    let report =
        hdcoint::inference::modified_lr_report(&spectrum, r, alpha, default_table()).map_err(err)?;
    report_dict(py, &report, &spectrum)
}

/// Support edges and scaling constants of the limit spectral law with shape
/// `(p, q)`; both parameters must exceed 1.
#[pyfunction]
fn wachter_params<'py>(py: Python<'py>, p: f64, q: f64) -> PyResult<Bound<'py, PyDict>> {
    let w = hdcoint::asymptotics::wachter_params(p, q).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("p", w.p_frak)?;
    d.set_item("q", w.q_frak)?;
    d.set_item("lambda_minus", w.lambda_minus)?;
    d.set_item("lambda_plus", w.lambda_plus)?;
    d.set_item("c_minus", w.c_minus)?;
    d.set_item("c_plus", w.c_plus)?;
    Ok(d)
}

/// Density of the limit spectral law with shape `(p, q)` at `x`.
#[pyfunction]
fn wachter_pdf(x: f64, p: f64, q: f64) -> PyResult<f64> {
    let w = hdcoint::asymptotics::wachter_params(p, q).map_err(err)?;
    Ok(hdcoint::asymptotics::wachter_pdf(x, &w))
}

/// Centering and scaling constants `c1`, `c2` of the rescaled test statistic
/// at sample shape `(N, T, k)`.
#[pyfunction]
fn test_constants<'py>(py: Python<'py>, n: usize, t: usize, k: usize) -> PyResult<Bound<'py, PyDict>> {
    let c = hdcoint::asymptotics::test_constants(n, t, k).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("c1", c.c1)?;
    d.set_item("c2", c.c2)?;
    d.set_item("n", c.n)?;
    d.set_item("t", c.t)?;
    d.set_item("k", c.k)?;
    Ok(d)
}

/// Limits of the three spectral statistics integrated over the eigenvalue
/// quantile window `(rho1, rho2)` at aspect `tau = T/N` and lag order `k`.
#[pyfunction]
fn limit_statistics<'py>(
    py: Python<'py>,
    rho1: f64,
    rho2: f64,
    tau: f64,
    k: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let l = hdcoint::asymptotics::limit_statistics(rho1, rho2, tau, k).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lr_limit", l.lr_limit)?;
    d.set_item("pb_limit", l.pb_limit)?;
    d.set_item("hw_limit", l.hw_limit)?;
    d.set_item("lr_hw_bounds_only", l.lr_hw_bounds_only)?;
    Ok(d)
}

/// Top `r` rescaled eigenvalues of one tridiagonal GOE draw at matrix
/// dimension `dim`, descending.
#[pyfunction]
fn goe_top_eigs(dim: usize, r: usize, seed: u64) -> PyResult<Vec<f64>> {
    hdcoint::ensembles::goe_top_eigs(dim, r, seed).map_err(err)
}

/// One draw from the `n`-dimensional matrix-Beta spectrum with parameters
/// `(p, q)`, descending.
#[pyfunction]
fn sample_jacobi_spectrum(n: usize, p: f64, q: f64, seed: u64) -> PyResult<Vec<f64>> {
    hdcoint::ensembles::sample_jacobi_spectrum(&JacobiParams { n, p, q }, seed).map_err(err)
}

/// Nonzero eigenvalues of the three-projector model at `(k, n, t_amb)`,
/// descending.
#[pyfunction]
fn projector_model_spectrum(k: usize, n: usize, t_amb: usize, seed: u64) -> PyResult<Vec<f64>> {
    let spec = ProjectorModelSpec { k, n, t_amb, seed };
    Ok(hdcoint::ensembles::projector_model_spectrum(&spec).map_err(err)?.values)
}

/// Monte Carlo critical values for the summed-top-eigenvalue statistic:
/// a list of `{r, alpha, quantile, stderr}` cells.
#[pyfunction]
fn airy_sum_quantiles<'py>(
    py: Python<'py>,
    r_max: usize,
    alphas: Vec<f64>,
    dim: usize,
    reps: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let table = hdcoint::ensembles::airy_sum_quantiles(r_max, &alphas, dim, reps, seed).map_err(err)?;
    table
        .cells
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("r", c.r)?;
            d.set_item("alpha", c.alpha)?;
            d.set_item("quantile", c.quantile)?;
            d.set_item("stderr", c.stderr)?;
            Ok(d)
        })
        .collect()
}

/// Two-sample Kolmogorov-Smirnov distance.
#[pyfunction]
fn ks_distance_two_sample(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(PyValueError::new_err("both samples must be non-empty"));
    }
    Ok(hdcoint::stats::ks_distance_two_sample(&xs, &ys))
}

#[pymodule]
pub fn hdcoint_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Panel>()?;
    m.add_function(wrap_pyfunction!(johansen_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(modified_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(modified_lr_test, m)?)?;
    m.add_function(wrap_pyfunction!(wachter_params, m)?)?;
    m.add_function(wrap_pyfunction!(wachter_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(test_constants, m)?)?;
    m.add_function(wrap_pyfunction!(limit_statistics, m)?)?;
    m.add_function(wrap_pyfunction!(goe_top_eigs, m)?)?;
    m.add_function(wrap_pyfunction!(sample_jacobi_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(projector_model_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(airy_sum_quantiles, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance_two_sample, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_parses_with_samples() {
        let table = default_table();
        assert_eq!(table.matrix_dim, 10_000);
        assert_eq!(table.reps, 20_000);
        assert!(table.partial_sums.is_some(), "sidecar samples attached");
        let q = table.quantile(1, 0.95).unwrap();
        assert!((q - 0.97).abs() < 0.10, "r=1 95% cell {q}");
    }

    #[test]
    fn det_parsing_accepts_known_terms_only() {
        assert_eq!(parse_det("constant").unwrap(), DeterministicTerm::Constant);
        assert_eq!(parse_det("trend").unwrap(), DeterministicTerm::LinearTrend);
        assert_eq!(
            parse_det("seasonal:4").unwrap(),
            DeterministicTerm::SeasonalDummies { period: 4 }
        );
        assert!(parse_det("drift").is_err());
        assert!(parse_det("seasonal:x").is_err());
    }

    #[test]
    fn matrix_row_round_trip() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]];
        let m = matrix_from_rows(&rows, "data").unwrap();
        assert_eq!(m.nrows(), 2);
        assert_eq!(m[(1, 0)], 4.0);
        assert_eq!(rows_from_matrix(&m), rows);
        assert!(matrix_from_rows(&[vec![1.0], vec![1.0, 2.0]], "data").is_err());
        assert!(matrix_from_rows(&[], "data").is_err());
    }

    #[test]
    fn module_functions_round_trip_under_embedded_python() {
        Python::initialize();
        Python::attach(|py| {
            let panel = Panel::random_walk(4, 2, 60, 7).unwrap();
            let spec = modified_spectrum(&panel, 2).unwrap();
            assert_eq!(spec.len(), 4);
            assert!(spec.windows(2).all(|w| w[0] >= w[1]));

            let report = modified_lr_test(py, &panel, 2, 1, 0.95).unwrap();
            let decision: String =
                report.get_item("decision").unwrap().unwrap().extract().unwrap();
            assert!(decision == "reject" || decision == "fail_to_reject");
            let p: Option<f64> =
                report.get_item("p_value").unwrap().unwrap().extract().unwrap();
            assert!(p.is_some(), "bundled table keeps samples, so p-values exist");

            let w = wachter_params(py, 2.0, 8.0).unwrap();
            let lp: f64 = w.get_item("lambda_plus").unwrap().unwrap().extract().unwrap();
            assert!((lp - 0.5).abs() < 1e-12);

            let err = modified_spectrum(&Panel::random_walk(5, 1, 8, 0).unwrap(), 1)
                .unwrap_err();
            assert!(err.to_string().contains("sample too short"));
        });
    }
}
