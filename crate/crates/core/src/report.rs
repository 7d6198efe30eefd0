//! Deterministic report serialization: JSON with every float printed at 17
//! significant digits, row-major complex matrices as [re, im] pairs, CSV
//! curve and matrix files, and write-then-rename file output.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::Result;
use crate::grid::Grid;
use crate::grs::{ClassificationReport, QReconstruction, QuasiBasisResidual};
use crate::hamiltonians::{InverseIterationCheck, Ne1Report, SpectrumReport};
use crate::krein::Sign;

/// Resolved run configuration, embedded in every report.
pub type ConfigRecord = BTreeMap<String, String>;

/// Pretty JSON whose floats are always written as `{:.16e}`.
struct FixedPrecision<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for FixedPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Serializes `value` as pretty JSON with fixed float formatting and a
/// trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let formatter = FixedPrecision {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, formatter);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json_string(value)?.as_bytes())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridRecord {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: usize,
}

impl From<&Grid> for GridRecord {
    fn from(grid: &Grid) -> Self {
        Self {
            l: grid.half_width(),
            m: grid.points(),
        }
    }
}

/// Row-major list of [re, im] pairs.
pub fn complex_pairs(matrix: &DMatrix<Complex64>) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(matrix.len());
    for i in 0..matrix.nrows() {
        for j in 0..matrix.ncols() {
            let v = matrix[(i, j)];
            out.push([v.re, v.im]);
        }
    }
    out
}

fn pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|v| [v.re, v.im]).collect()
}

fn max_offdiagonal(matrix: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..matrix.nrows() {
        for j in 0..matrix.ncols() {
            if i != j {
                worst = worst.max(matrix[(i, j)].norm());
            }
        }
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    pub family: String,
    /// "ordinary", "indefinite" or "biorthogonality".
    pub kind: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub grid: GridRecord,
    pub tolerance: f64,
    pub gram: Vec<[f64; 2]>,
    pub max_offdiag: f64,
    /// max ||Gₙₙ| − 1|
    pub max_diag_deviation: f64,
    pub diag_signs: Vec<i8>,
    pub identity_within_tolerance: bool,
    pub config: ConfigRecord,
}

impl GramReport {
    pub fn new(
        family: &str,
        kind: &str,
        grid: &Grid,
        gram: &DMatrix<Complex64>,
        tolerance: f64,
        config: &ConfigRecord,
    ) -> Self {
        let n = gram.nrows();
        let max_diag_deviation = (0..n).map(|i| (gram[(i, i)].norm() - 1.0).abs()).fold(0.0, f64::max);
        let max_offdiag = max_offdiagonal(gram);
        Self {
            family: family.to_string(),
            kind: kind.to_string(),
            n,
            grid: grid.into(),
            tolerance,
            gram: complex_pairs(gram),
            max_offdiag,
            max_diag_deviation,
            diag_signs: (0..n).map(|i| Sign::of(gram[(i, i)].re).as_i8()).collect(),
            identity_within_tolerance: max_diag_deviation <= tolerance && max_offdiag <= tolerance,
            config: config.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationDocument {
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub verdict: String,
    pub anticommutator_residual: Option<f64>,
    pub j_eigen_residuals: Vec<f64>,
    pub parities: Vec<i8>,
    pub signs: Vec<i8>,
    pub tolerances: crate::grs::ClassifyOptions,
    pub details: ClassificationReport,
    pub config: ConfigRecord,
}

impl ClassificationDocument {
    pub fn new(report: &ClassificationReport, grid: &Grid, config: &ConfigRecord) -> Self {
        Self {
            family: report.family.clone(),
            n: report.n,
            l: grid.half_width(),
            m: grid.points(),
            verdict: report.verdict.as_str().to_string(),
            anticommutator_residual: report.anticommutator_residual,
            j_eigen_residuals: report.j_eigen_residuals.clone(),
            parities: report.predicted_parities.iter().map(|s| s.as_i8()).collect(),
            signs: report.signs.iter().map(|s| s.as_i8()).collect(),
            tolerances: report.tolerances,
            details: report.clone(),
            config: config.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QReconstructionDocument {
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub section_size: usize,
    pub gram_condition: f64,
    pub asymmetry: f64,
    pub min_eigenvalue: f64,
    pub orthonormality_defect: f64,
    /// ⟨Q̂ êₙ, êₘ⟩ on the trusted block, row-major.
    pub q_matrix: Vec<[f64; 2]>,
    pub config: ConfigRecord,
}

impl QReconstructionDocument {
    pub fn new(family: &str, recon: &QReconstruction, grid: &Grid, config: &ConfigRecord) -> Result<Self> {
        Ok(Self {
            family: family.to_string(),
            n: recon.trusted(),
            l: grid.half_width(),
            m: grid.points(),
            section_size: recon.total(),
            gram_condition: recon.gram_condition(),
            asymmetry: recon.asymmetry(),
            min_eigenvalue: recon.min_eigenvalue(),
            orthonormality_defect: recon.orthonormality_defect(),
            q_matrix: complex_pairs(&recon.q_in_e_basis(recon.trusted())?),
            config: config.clone(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumDocument {
    pub label: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub eigenvalues: Vec<[f64; 2]>,
    pub residuals: Vec<f64>,
    pub eigenvalue_defect: f64,
    pub grid: GridRecord,
}

impl SpectrumDocument {
    pub fn new(report: &SpectrumReport, grid: &Grid) -> Self {
        Self {
            label: report.label.clone(),
            n: report.n,
            eigenvalues: pairs(&report.eigenvalues),
            residuals: report.residuals.clone(),
            eigenvalue_defect: report.eigenvalue_defect,
            grid: grid.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckRecord {
    pub index: usize,
    pub lambda: [f64; 2],
    pub estimate: [f64; 2],
    pub defect: f64,
}

impl From<&InverseIterationCheck> for CrossCheckRecord {
    fn from(c: &InverseIterationCheck) -> Self {
        Self {
            index: c.index,
            lambda: [c.lambda.re, c.lambda.im],
            estimate: [c.estimate.re, c.estimate.im],
            defect: c.defect,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Ne1Document {
    pub family: String,
    pub lambdas: Vec<[f64; 2]>,
    pub forward: SpectrumDocument,
    pub dual: SpectrumDocument,
    pub cross_check: Vec<CrossCheckRecord>,
    pub metric_hermiticity_defect: Option<f64>,
    pub config: ConfigRecord,
}

impl Ne1Document {
    pub fn new(family: &str, lambdas: &[Complex64], report: &Ne1Report, grid: &Grid, config: &ConfigRecord) -> Self {
        Self {
            family: family.to_string(),
            lambdas: pairs(lambdas),
            forward: SpectrumDocument::new(&report.forward, grid),
            dual: SpectrumDocument::new(&report.dual, grid),
            cross_check: report.cross_check.iter().map(CrossCheckRecord::from).collect(),
            metric_hermiticity_defect: report.metric_hermiticity_defect,
            config: config.clone(),
        }
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    write_atomic(path, &bytes)
}

/// CSV with columns row, col, re, im.
pub fn write_matrix_csv(path: &Path, matrix: &DMatrix<Complex64>) -> Result<()> {
    let ncols = matrix.ncols();
    write_csv_rows(
        path,
        &["row", "col", "re", "im"],
        (0..matrix.len()).map(|k| {
            let (i, j) = (k / ncols, k % ncols);
            let v = matrix[(i, j)];
            vec![i.to_string(), j.to_string(), fmt_float(v.re), fmt_float(v.im)]
        }),
    )
}

/// CSV with columns k, phi_psi, psi_phi, ordering_gap.
pub fn write_quasi_basis_csv(path: &Path, curves: &QuasiBasisResidual) -> Result<()> {
    write_csv_rows(
        path,
        &["k", "phi_psi", "psi_phi", "ordering_gap"],
        (0..curves.phi_psi.len()).map(|k| {
            vec![
                k.to_string(),
                fmt_float(curves.phi_psi[k]),
                fmt_float(curves.psi_phi[k]),
                fmt_float(curves.ordering_gap[k]),
            ]
        }),
    )
}

/// CSV with columns n, re, im, residual.
pub fn write_spectrum_csv(path: &Path, report: &SpectrumReport) -> Result<()> {
    write_csv_rows(
        path,
        &["n", "re", "im", "residual"],
        report.eigenvalues.iter().zip(&report.residuals).enumerate().map(|(n, (v, r))| {
            vec![n.to_string(), fmt_float(v.re), fmt_float(v.im), fmt_float(*r)]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        x: f64,
        y: Vec<f64>,
        z: Option<f64>,
    }

    #[test]
    fn floats_use_seventeen_significant_digits() {
        let text = to_json_string(&Sample {
            x: 0.1,
            y: vec![1.0, -2.5e-300],
            z: None,
        })
        .unwrap();
        assert!(text.contains("\"x\": 1.0000000000000001e-1"), "{text}");
        assert!(text.contains("1.0000000000000000e0"));
        assert!(text.contains("-2.5000000000000000e-300"));
        assert!(text.contains("\"z\": null"));
        assert!(text.ends_with("}\n"));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn non_finite_values_become_null() {
        let text = to_json_string(&vec![f64::NAN, f64::INFINITY]).unwrap();
        assert_eq!(text.matches("null").count(), 2);
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = std::env::temp_dir().join(format!("kgrs-report-test-{}", std::process::id()));
        let path = dir.join("out.json");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "second");
        let leftovers: Vec<_> = fs::read_dir(&dir).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn gram_report_fields() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(1e-9, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 1e-12),
            ],
        );
        let grid = Grid::desk_default();
        let report = GramReport::new("f", "indefinite", &grid, &m, 1e-6, &ConfigRecord::new());
        assert_eq!(report.diag_signs, vec![1, -1]);
        assert_eq!(report.gram[3], [-1.0, 1e-12]);
        assert!(report.identity_within_tolerance);
        assert_eq!(report.max_offdiag, 1e-9);
    }
}
