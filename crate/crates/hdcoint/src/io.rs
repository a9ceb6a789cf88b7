//! Dataset ingestion and on-disk artifact formats.
//!
//! Everything that crosses the filesystem boundary lives here: CSV panel
//! ingestion and emission, the quantile-table CSV with its raw-sample
//! sidecar, JSON artifact helpers, and the simulation config format the
//! CLI consumes. The CSV dialect is comma-separated, `.` decimal, UTF-8,
//! with an optional header row. Floats are written with Rust's shortest
//! round-trip formatting, so write/read cycles are value-exact.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::ensembles::{AiryQuantileCell, AiryQuantileTable};
use crate::model::{realize_pattern, DeterministicTerms, PanelSeries, SparsePattern, VarKSpec};
use crate::{Error, Result};

/// Column transform applied during ingestion, before any differencing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    /// Use values as provided.
    #[default]
    None,
    /// Natural logarithm; every ingested value must be strictly positive.
    Log,
}

impl std::fmt::Display for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Transform::None => "none",
            Transform::Log => "log",
        })
    }
}

/// How to read a panel CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    /// CSV file to read.
    pub path: PathBuf,
    /// Whether the first row is a header of series names.
    pub has_header: bool,
    /// Optional 0-based column holding dates or labels. It is ignored for
    /// computation; callers echo it into report provenance.
    pub date_column: Option<usize>,
    /// Cell-wise value transform.
    pub transform: Transform,
    /// Free-text note about the sampling frequency (weekly, daily, ...);
    /// carried into provenance only.
    pub frequency_note: Option<String>,
}

impl DatasetConfig {
    /// Config for a headered file at `path` with no date column and no
    /// transform.
    pub fn new(path: impl Into<PathBuf>) -> Self {
        DatasetConfig {
            path: path.into(),
            has_header: true,
            date_column: None,
            transform: Transform::None,
            frequency_note: None,
        }
    }
}

/// 1-based file row for the `i`-th data record (the header, when present,
/// is file row 1).
fn file_row(data_idx: usize, has_header: bool) -> usize {
    data_idx + 1 + has_header as usize
}

/// Parse one cell, reporting failures with 1-based file coordinates.
fn parse_cell(raw: &str, transform: Transform, row: usize, col: usize) -> Result<f64> {
    let bad = |reason: String| Error::BadCell { row, col: col + 1, reason };
    if raw.is_empty() {
        return Err(bad("missing value".into()));
    }
    let v: f64 = raw
        .parse()
        .map_err(|_| bad(format!("not a number: {raw:?}")))?;
    if !v.is_finite() {
        return Err(bad(format!("not finite: {raw:?}")));
    }
    match transform {
        Transform::None => Ok(v),
        Transform::Log => {
            if v > 0.0 {
                Ok(v.ln())
            } else {
                Err(bad(format!("log transform needs a positive value, got {v}")))
            }
        }
    }
}

/// Read a panel from CSV: one row per time point, the first data row
/// becoming the pre-sample value `X_0` and the remaining `T` rows the
/// observations, so a file with `R` data rows yields `T = R - 1`.
///
/// Requires at least 2 value columns and 3 data rows. Missing, non-numeric,
/// non-finite, or (under the log transform) non-positive cells are rejected
/// with their 1-based file coordinates.
pub fn ingest(cfg: &DatasetConfig) -> Result<PanelSeries> {
    ingest_reader(fs::File::open(&cfg.path)?, cfg)
}

/// [`ingest`] from any reader (used for in-memory round trips and tests).
pub fn ingest_reader<R: std::io::Read>(reader: R, cfg: &DatasetConfig) -> Result<PanelSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(cfg.has_header)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let names: Option<Vec<String>> = if cfg.has_header {
        Some(rdr.headers()?.iter().map(str::to_string).collect())
    } else {
        None
    };
    let records: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>()?;

    let width = records.first().map_or(0, csv::StringRecord::len);
    if let Some(d) = cfg.date_column {
        if d >= width {
            return Err(Error::InvalidParam(format!(
                "date column {d} out of range for a {width}-column file"
            )));
        }
    }
    let value_cols: Vec<usize> = (0..width).filter(|c| Some(*c) != cfg.date_column).collect();
    if value_cols.len() < 2 {
        return Err(Error::InvalidParam(format!(
            "panel needs at least 2 value columns, found {}",
            value_cols.len()
        )));
    }
    if records.len() < 3 {
        return Err(Error::InvalidParam(format!(
            "panel needs at least 3 data rows (X_0 plus T >= 2), found {}",
            records.len()
        )));
    }

    let n = value_cols.len();
    let mut values = DMatrix::zeros(n, records.len());
    for (i, rec) in records.iter().enumerate() {
        for (j, &c) in value_cols.iter().enumerate() {
            let raw = rec.get(c).unwrap_or("");
            values[(j, i)] = parse_cell(raw, cfg.transform, file_row(i, cfg.has_header), c)?;
        }
    }

    let initial = values.columns(0, 1).into_owned();
    let data = values.columns(1, records.len() - 1).into_owned();
    let kept_names =
        names.map(|ns| value_cols.iter().map(|&c| ns[c].clone()).collect::<Vec<_>>());
    PanelSeries::new(data, initial, kept_names)
}

/// Write a panel in the ingestion layout: a header of series names
/// (`s1..sN` when the panel carries none), then `X_0` and `X_1 .. X_T` as
/// rows. Pre-sample columns before `X_0` are not written, so a round trip
/// preserves exactly what [`ingest`] consumes.
pub fn write_panel_csv(panel: &PanelSeries, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let names: Vec<String> = match &panel.meta {
        Some(ns) => ns.clone(),
        None => (1..=panel.n()).map(|j| format!("s{j}")).collect(),
    };
    w.write_record(&names)?;
    for t in 0..=panel.t_len() {
        let x = panel.x_at(t as isize);
        w.write_record(x.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct QuantileRow {
    r: usize,
    alpha: f64,
    quantile: f64,
    stderr: f64,
    matrix_dim: usize,
    reps: usize,
    seed: u64,
}

/// Write a quantile table as CSV with columns
/// `r,alpha,quantile,stderr,matrix_dim,reps,seed`; the provenance triple is
/// repeated on every row so the file is self-describing.
pub fn write_quantile_table_csv(table: &AiryQuantileTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for c in &table.cells {
        w.serialize(QuantileRow {
            r: c.r,
            alpha: c.alpha,
            quantile: c.quantile,
            stderr: c.stderr,
            matrix_dim: table.matrix_dim,
            reps: table.reps,
            seed: table.seed,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Read a quantile table written by [`write_quantile_table_csv`]. The raw
/// samples are not stored in this format; reattach them from a sidecar with
/// [`AiryQuantileTable::attach_samples`] if Monte Carlo p-values are needed.
pub fn read_quantile_table_csv(path: &Path) -> Result<AiryQuantileTable> {
    read_quantile_table_reader(fs::File::open(path)?)
}

/// [`read_quantile_table_csv`] from any reader.
pub fn read_quantile_table_reader<R: std::io::Read>(reader: R) -> Result<AiryQuantileTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let rows: Vec<QuantileRow> =
        rdr.deserialize().collect::<std::result::Result<_, csv::Error>>()?;
    let Some(first) = rows.first() else {
        return Err(Error::InvalidParam("quantile table file has no rows".into()));
    };
    let (matrix_dim, reps, seed) = (first.matrix_dim, first.reps, first.seed);
    if rows
        .iter()
        .any(|row| (row.matrix_dim, row.reps, row.seed) != (matrix_dim, reps, seed))
    {
        return Err(Error::InvalidParam(
            "quantile table file mixes provenance (matrix_dim, reps, seed) values".into(),
        ));
    }
    let mut cells: Vec<AiryQuantileCell> = rows
        .into_iter()
        .map(|row| AiryQuantileCell {
            r: row.r,
            alpha: row.alpha,
            quantile: row.quantile,
            stderr: row.stderr,
        })
        .collect();
    cells.sort_by(|a, b| a.r.cmp(&b.r).then(a.alpha.partial_cmp(&b.alpha).unwrap()));
    Ok(AiryQuantileTable { cells, matrix_dim, reps, seed, partial_sums: None })
}

#[derive(Serialize, Deserialize)]
struct SumRow {
    r: usize,
    sum: f64,
}

/// Write the raw partial-sum samples behind a quantile table as a CSV
/// sidecar with columns `r,sum` (`reps` rows per `r`). Errors if the table
/// has already been stripped of its samples.
pub fn write_airy_sums_csv(table: &AiryQuantileTable, path: &Path) -> Result<()> {
    let Some(sums) = &table.partial_sums else {
        return Err(Error::InvalidParam(
            "table carries no raw samples; only freshly generated tables can write a sidecar"
                .into(),
        ));
    };
    let mut w = csv::Writer::from_path(path)?;
    for (i, row) in sums.iter().enumerate() {
        for s in row {
            w.serialize(SumRow { r: i + 1, sum: *s })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a partial-sum sidecar into `sums[r - 1]` groups, accepting any row
/// order. Every `r` from 1 to the maximum present must be covered.
pub fn read_airy_sums_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    read_airy_sums_reader(fs::File::open(path)?)
}

/// [`read_airy_sums_csv`] from any reader.
pub fn read_airy_sums_reader<R: std::io::Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut sums: Vec<Vec<f64>> = Vec::new();
    for row in rdr.deserialize() {
        let row: SumRow = row?;
        if row.r == 0 {
            return Err(Error::InvalidParam("sum sidecar has a row with r = 0".into()));
        }
        if row.r > sums.len() {
            sums.resize(row.r, Vec::new());
        }
        sums[row.r - 1].push(row.sum);
    }
    if sums.is_empty() {
        return Err(Error::InvalidParam("sum sidecar file has no rows".into()));
    }
    if let Some(gap) = sums.iter().position(Vec::is_empty) {
        return Err(Error::InvalidParam(format!(
            "sum sidecar has no rows for r = {}",
            gap + 1
        )));
    }
    Ok(sums)
}

/// Serialize any artifact to pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Deserialize a JSON artifact.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Declarative simulation input consumed by the CLI: dimensions plus
/// structured sparse coefficient patterns, realized into a full
/// [`VarKSpec`]. Example:
///
/// ```json
/// {
///   "n": 100, "t": 500, "k": 2,
///   "gammas": [{"single_entry": {"row": 0, "col": 0, "scale": 0.95}}],
///   "pi": {"filled_column": {"col": 0, "scale": -0.1}},
///   "drift": 1.0
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    /// Panel dimension `N`.
    pub n: usize,
    /// Sample length `T`.
    pub t: usize,
    /// VAR order `k >= 1`.
    pub k: usize,
    /// Exactly `k - 1` short-run patterns, `gammas[i]` giving
    /// `Gamma_{i+1}`; `null` entries mean a zero matrix.
    #[serde(default)]
    pub gammas: Vec<Option<SparsePattern>>,
    /// Error-correction pattern; omitted means `Pi = 0`.
    #[serde(default)]
    pub pi: Option<SparsePattern>,
    /// Constant drift `mu = drift * 1_N`; omitted means no deterministic
    /// component.
    #[serde(default)]
    pub drift: Option<f64>,
    /// Innovation variances (length `N`); omitted means identity
    /// covariance.
    #[serde(default)]
    pub noise_diag: Option<Vec<f64>>,
}

impl SimulateConfig {
    /// Realize the patterns into dense matrices and validate the result.
    pub fn to_var_spec(&self) -> Result<VarKSpec> {
        if self.k == 0 {
            return Err(Error::InvalidParam("VAR order k must be >= 1".into()));
        }
        if self.gammas.len() != self.k - 1 {
            return Err(Error::InvalidParam(format!(
                "k = {} needs exactly {} gamma patterns, got {}",
                self.k,
                self.k - 1,
                self.gammas.len()
            )));
        }
        let mut spec = VarKSpec::random_walk(self.n, self.k, self.t);
        for (slot, pattern) in spec.gammas.iter_mut().zip(&self.gammas) {
            if let Some(p) = pattern {
                *slot = realize_pattern(p, self.n)?;
            }
        }
        if let Some(p) = &self.pi {
            spec.pi = realize_pattern(p, self.n)?;
        }
        if let Some(mu) = self.drift {
            spec.det_terms = DeterministicTerms::Constant(DVector::from_element(self.n, mu));
        }
        if let Some(diag) = &self.noise_diag {
            if diag.len() != self.n {
                return Err(Error::InvalidParam(format!(
                    "noise_diag has {} entries for N = {}",
                    diag.len(),
                    self.n
                )));
            }
            spec.noise_cov = DMatrix::from_diagonal(&DVector::from_vec(diag.clone()));
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::airy_sum_quantiles;
    use crate::model::simulate;
    use approx::assert_abs_diff_eq;

    fn ingest_str(csv: &str, cfg: &DatasetConfig) -> Result<PanelSeries> {
        ingest_reader(csv.as_bytes(), cfg)
    }

    fn base_cfg() -> DatasetConfig {
        DatasetConfig::new("unused.csv")
    }

    #[test]
    fn ingest_applies_shape_contract_and_log_transform() {
        // 3 series x 11 rows -> N = 3, T = 10, log prices.
        let mut csv = String::from("aa,bb,cc\n");
        for i in 0..11 {
            let row: Vec<String> =
                (0..3).map(|j| format!("{}", 1.0 + (i * 3 + j) as f64)).collect();
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        let cfg = DatasetConfig { transform: Transform::Log, ..base_cfg() };
        let panel = ingest_str(&csv, &cfg).unwrap();
        assert_eq!(panel.n(), 3);
        assert_eq!(panel.t_len(), 10);
        assert_eq!(panel.presample_len(), 1);
        assert_eq!(panel.meta.as_deref(), Some(&["aa".into(), "bb".into(), "cc".into()][..]));
        assert_abs_diff_eq!(panel.initial[(1, 0)], 2.0_f64.ln(), epsilon = 1e-15);
        // Data row i = 1 (second file data row): values 4, 5, 6.
        assert_abs_diff_eq!(panel.data[(2, 0)], 6.0_f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(panel.data[(0, 9)], 31.0_f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn ingest_skips_date_column_and_headerless_files() {
        let csv = "2020-01-03,1.0,2.0\n2020-01-10,3.0,4.0\n2020-01-17,5.0,6.0\n";
        let cfg = DatasetConfig {
            has_header: false,
            date_column: Some(0),
            ..base_cfg()
        };
        let panel = ingest_str(csv, &cfg).unwrap();
        assert_eq!(panel.n(), 2);
        assert_eq!(panel.t_len(), 2);
        assert_eq!(panel.meta, None);
        assert_eq!(panel.initial[(0, 0)], 1.0);
        assert_eq!(panel.data[(1, 1)], 6.0);
    }

    #[test]
    fn ingest_names_offending_cells_in_file_coordinates() {
        // Header is file row 1; the empty cell sits at file row 3, col 2.
        let csv = "a,b\n1.0,2.0\n3.0,\n5.0,6.0\n";
        let err = ingest_str(csv, &base_cfg()).unwrap_err();
        match err {
            Error::BadCell { row, col, ref reason } => {
                assert_eq!((row, col), (3, 2));
                assert!(reason.contains("missing"), "reason: {reason}");
            }
            other => panic!("expected BadCell, got {other:?}"),
        }

        let csv = "a,b\n1.0,2.0\nx7,4.0\n5.0,6.0\n";
        let err = ingest_str(csv, &base_cfg()).unwrap_err();
        assert!(matches!(err, Error::BadCell { row: 3, col: 1, .. }), "{err:?}");
        assert!(err.to_string().contains("not a number"));

        // Rust parses "NaN"/"inf" as floats; both must still be rejected.
        let csv = "a,b\n1.0,2.0\nNaN,4.0\n5.0,inf\n";
        let err = ingest_str(csv, &base_cfg()).unwrap_err();
        assert!(err.to_string().contains("not finite"), "{err}");

        let csv = "a,b\n1.0,2.0\n-3.0,4.0\n5.0,6.0\n";
        let cfg = DatasetConfig { transform: Transform::Log, ..base_cfg() };
        let err = ingest_str(csv, &cfg).unwrap_err();
        assert!(matches!(err, Error::BadCell { row: 3, col: 1, .. }), "{err:?}");
        assert!(err.to_string().contains("positive"));
    }

    #[test]
    fn ingest_rejects_too_small_files() {
        let err = ingest_str("a,b\n1.0,2.0\n3.0,4.0\n", &base_cfg()).unwrap_err();
        assert!(err.to_string().contains("at least 3 data rows"), "{err}");

        let csv = "d,a\nx,1.0\ny,2.0\nz,3.0\n";
        let cfg = DatasetConfig { date_column: Some(0), ..base_cfg() };
        let err = ingest_str(csv, &cfg).unwrap_err();
        assert!(err.to_string().contains("at least 2 value columns"), "{err}");

        let cfg = DatasetConfig { date_column: Some(7), ..base_cfg() };
        let err = ingest_str("a,b\n1,2\n3,4\n5,6\n", &cfg).unwrap_err();
        assert!(err.to_string().contains("date column 7 out of range"), "{err}");
    }

    #[test]
    fn panel_csv_round_trip_is_value_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("panel.csv");
        let spec = VarKSpec::random_walk(3, 2, 12);
        let panel = simulate(&spec, 41).unwrap();
        write_panel_csv(&panel, &path).unwrap();

        let cfg = DatasetConfig::new(&path);
        let back = ingest(&cfg).unwrap();
        assert_eq!(back.n(), 3);
        assert_eq!(back.t_len(), 12);
        // Only X_0 survives of the k = 2 pre-sample block.
        assert_eq!(back.presample_len(), 1);
        assert_eq!(back.data, panel.data);
        for j in 0..3 {
            assert_eq!(back.initial[(j, 0)], panel.x_at(0)[j]);
        }
        assert_eq!(back.meta.as_deref(), Some(&["s1".into(), "s2".into(), "s3".into()][..]));
    }

    #[test]
    fn quantile_table_csv_and_sidecar_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let table_path = dir.path().join("table.csv");
        let sums_path = dir.path().join("sums.csv");
        let table = airy_sum_quantiles(2, &[0.90, 0.95], 60, 1000, 9).unwrap();

        write_quantile_table_csv(&table, &table_path).unwrap();
        let mut back = read_quantile_table_csv(&table_path).unwrap();
        assert_eq!(back.cells, table.cells);
        assert_eq!(
            (back.matrix_dim, back.reps, back.seed),
            (table.matrix_dim, table.reps, table.seed)
        );
        assert!(back.partial_sums.is_none());

        write_airy_sums_csv(&table, &sums_path).unwrap();
        back.attach_samples(read_airy_sums_csv(&sums_path).unwrap()).unwrap();
        for observed in [-3.0, -1.3, 0.4] {
            assert_eq!(back.p_value(1, observed), table.p_value(1, observed));
            assert_eq!(back.p_value(2, observed), table.p_value(2, observed));
        }

        // A sample-stripped table cannot write a sidecar.
        let stripped = AiryQuantileTable { partial_sums: None, ..table.clone() };
        assert!(write_airy_sums_csv(&stripped, &sums_path).is_err());
    }

    #[test]
    fn sum_sidecar_rejects_gaps_and_mismatched_reps() {
        let err = read_airy_sums_reader("r,sum\n2,0.5\n2,0.7\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("no rows for r = 1"), "{err}");

        let err = read_airy_sums_reader("r,sum\n0,0.5\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("r = 0"), "{err}");

        let mut table = airy_sum_quantiles(1, &[0.9], 60, 1000, 9).unwrap();
        let err = table.attach_samples(vec![vec![0.0; 7]]).unwrap_err();
        assert!(err.to_string().contains("expected reps"), "{err}");
        let err = table.attach_samples(vec![]).unwrap_err();
        assert!(err.to_string().contains("covers r <="), "{err}");
    }

    #[test]
    fn quantile_table_reader_rejects_mixed_provenance() {
        let csv = "r,alpha,quantile,stderr,matrix_dim,reps,seed\n\
                   1,0.9,0.4,0.01,100,1000,7\n\
                   1,0.95,0.9,0.01,100,2000,7\n";
        let err = read_quantile_table_reader(csv.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("mixes provenance"), "{err}");

        let err = read_quantile_table_reader("r,alpha,quantile,stderr,matrix_dim,reps,seed\n".as_bytes())
            .unwrap_err();
        assert!(err.to_string().contains("no rows"), "{err}");
    }

    #[test]
    fn simulate_config_realizes_patterns_and_validates() {
        let json = r#"{
            "n": 4, "t": 50, "k": 2,
            "gammas": [{"single_entry": {"row": 0, "col": 1, "scale": 0.95}}],
            "pi": {"filled_column": {"col": 0, "scale": -0.1}},
            "drift": 1.0,
            "noise_diag": [1.0, 2.0, 3.0, 4.0]
        }"#;
        let cfg: SimulateConfig = serde_json::from_str(json).unwrap();
        let spec = cfg.to_var_spec().unwrap();
        assert_eq!(spec.gammas.len(), 1);
        assert_eq!(spec.gammas[0][(0, 1)], 0.95);
        assert_eq!(spec.gammas[0][(1, 1)], 0.0);
        for i in 0..4 {
            assert_eq!(spec.pi[(i, 0)], -0.1);
            assert_eq!(spec.pi[(i, 3)], 0.0);
        }
        assert_eq!(spec.det_terms, DeterministicTerms::Constant(DVector::from_element(4, 1.0)));
        assert_eq!(spec.noise_cov[(2, 2)], 3.0);

        // Gamma count must match k - 1.
        let short = SimulateConfig { gammas: vec![], ..cfg.clone() };
        assert!(short.to_var_spec().unwrap_err().to_string().contains("gamma patterns"));
        // Noise diagonal must have length N.
        let bad = SimulateConfig { noise_diag: Some(vec![1.0; 3]), ..cfg.clone() };
        assert!(bad.to_var_spec().unwrap_err().to_string().contains("noise_diag"));
        // Out-of-range pattern indices surface realize_pattern's error.
        let oob = SimulateConfig {
            pi: Some(SparsePattern::SingleEntry { row: 9, col: 0, scale: 1.0 }),
            ..cfg
        };
        assert!(oob.to_var_spec().is_err());
    }

    #[test]
    fn json_helpers_round_trip_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ref.json");
        let reference = crate::experiments::airy1_reference(32, 80, 5).unwrap();
        write_json(&reference, &path).unwrap();
        let back: crate::experiments::Airy1Reference = read_json(&path).unwrap();
        assert_eq!(back, reference);
        assert!(fs::read_to_string(&path).unwrap().ends_with('\n'));
    }
}
