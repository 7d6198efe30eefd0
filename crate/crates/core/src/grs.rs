//! Example families of biorthogonal systems, finite-section reconstruction
//! of the metric G = e^{−Q}, first-type classification and the quasi-basis,
//! expansion and extremality diagnostics.
//!
//! The finite section is built on more functions than are reported. Only the
//! leading block is trusted: the top rows of a Galerkin section carry the
//! truncation error, so a guard band of extra functions is appended and
//! discarded.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{fourier_multiplier_apply_with_floor, Grid, GridFunction, DEFAULT_SPECTRAL_FLOOR};
use crate::hamiltonians::{anharmonic_basis, MAX_ANHARMONIC_STATES};
use crate::krein::{
    indefinite_gram, indefinite_inner, BiorthogonalSystem, KreinStructure, Provenance, Sign,
    DEFAULT_CERTIFICATION_TOLERANCE, IMAGINARY_WARNING_LEVEL,
};
use crate::span::SpanBasis;
use crate::specfun::{hermite_functions, hermite_functions_real};

/// Span Gram condition numbers at or above this are rank deficient.
pub const MAX_GRAM_CONDITION: f64 = 1e10;

/// Sample magnitude of the underlying orthonormal functions allowed at the
/// outermost nodes.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Default number of extra functions in the finite section.
pub const DEFAULT_GUARD: usize = 20;

/// Step by which the guard band shrinks when the enlarged span is unusable.
pub const GUARD_STEP: usize = 4;

/// Allowed gap between grid-side and span coefficients in expansions.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-6;

const ODDNESS_TOLERANCE: f64 = 1e-12;

/// Odd perturbation p in φₙ = e^{p} eₙ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "preset", rename_all = "lowercase")]
pub enum Perturbation {
    /// A · x · e^{−x²/2}
    Xgauss { amplitude: f64 },
    /// A · tanh x
    Tanh { amplitude: f64 },
}

impl Perturbation {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Perturbation::Xgauss { amplitude } => amplitude * x * (-0.5 * x * x).exp(),
            Perturbation::Tanh { amplitude } => amplitude * x.tanh(),
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "xgauss" => Ok(Perturbation::Xgauss { amplitude: 0.3 }),
            "tanh" => Ok(Perturbation::Tanh { amplitude: 0.2 }),
            other => Err(Error::InvalidArgument(format!(
                "unknown perturbation preset '{other}' (expected xgauss or tanh)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Perturbation::Xgauss { .. } => "xgauss",
            Perturbation::Tanh { .. } => "tanh",
        }
    }
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation::Xgauss { amplitude: 0.3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// φₙ(x) = eₙ(x + ia), ψₙ(x) = eₙ(x − ia).
    ShiftedOscillator { a: f64 },
    /// φₙ = e^{−x²/4} eₙ, ψₙ = e^{x²/4} eₙ.
    GaussianDeformation,
    /// φₙ = e^{p} eₙ, ψₙ = e^{−p} eₙ with eₙ the eigenfunctions of
    /// −d²/dx² + |x|^β.
    AnharmonicDeformation { beta: f64, perturbation: Perturbation },
}

impl FamilyKind {
    pub fn label(&self) -> String {
        match self {
            FamilyKind::ShiftedOscillator { a } => format!("shifted(a={a})"),
            FamilyKind::GaussianDeformation => "example1".to_string(),
            FamilyKind::AnharmonicDeformation { beta, perturbation } => {
                format!("anharmonic(beta={beta},p={})", perturbation.name())
            }
        }
    }

    /// Largest family size the builder can serve.
    pub fn max_size(&self) -> usize {
        match self {
            FamilyKind::AnharmonicDeformation { .. } => MAX_ANHARMONIC_STATES,
            _ => usize::MAX,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
    pub grid: Grid,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, n: usize, grid: Grid) -> Result<Self> {
        let spec = Self { kind, n, grid };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("truncation order must be at least 1".into()));
        }
        if self.n > self.kind.max_size() {
            return Err(Error::InvalidArgument(format!(
                "{} supports at most {} functions, requested {}",
                self.kind,
                self.kind.max_size(),
                self.n
            )));
        }
        match self.kind {
            FamilyKind::ShiftedOscillator { a } => {
                if a == 0.0 || !a.is_finite() {
                    return Err(Error::InvalidArgument(format!("shift must be finite and nonzero, got {a}")));
                }
            }
            FamilyKind::GaussianDeformation => {}
            FamilyKind::AnharmonicDeformation { beta, perturbation } => {
                if !(beta > 2.0) || !beta.is_finite() {
                    return Err(Error::InvalidArgument(format!("anharmonic exponent must exceed 2, got {beta}")));
                }
                for x in self.grid.nodes() {
                    let (p, q) = (perturbation.eval(x), perturbation.eval(-x));
                    if !p.is_finite() || (p + q).abs() > ODDNESS_TOLERANCE {
                        return Err(Error::InvalidArgument(format!("perturbation is not odd at x = {x}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_size(&self, n: usize) -> Self {
        Self { n, ..*self }
    }
}

/// Samples φₙ and ψₙ for the family. The tail check applies to the
/// underlying orthonormal functions.
pub fn build_family(spec: &FamilySpec) -> Result<BiorthogonalSystem> {
    spec.validate()?;
    let grid = spec.grid;
    let label = spec.kind.label();
    match spec.kind {
        FamilyKind::ShiftedOscillator { a } => build_shifted(grid, spec.n, a, label),
        FamilyKind::GaussianDeformation => {
            let e = hermite_table(grid, spec.n)?;
            check_tail(&e, grid, spec.n, 0.0)?;
            let phi = e
                .par_iter()
                .map(|f| crate::grid::multiply_real(f, |x| (-0.25 * x * x).exp()))
                .collect::<Result<Vec<_>>>()?;
            let psi = e
                .par_iter()
                .map(|f| crate::grid::multiply_real(f, |x| (0.25 * x * x).exp()))
                .collect::<Result<Vec<_>>>()?;
            BiorthogonalSystem::new(label, phi, psi)
        }
        FamilyKind::AnharmonicDeformation { beta, perturbation } => {
            let states = anharmonic_basis(beta, spec.n, grid)?;
            let phi = states
                .par_iter()
                .map(|s| crate::grid::multiply_real(&s.function, |x| perturbation.eval(x).exp()))
                .collect::<Result<Vec<_>>>()?;
            let psi = states
                .par_iter()
                .map(|s| crate::grid::multiply_real(&s.function, |x| (-perturbation.eval(x)).exp()))
                .collect::<Result<Vec<_>>>()?;
            let mut provenance = Provenance::default();
            let max_defect = states.iter().map(|s| s.parity_defect).fold(0.0, f64::max);
            provenance
                .notes
                .push(format!("anharmonic basis: max parity defect {max_defect:e}"));
            Ok(BiorthogonalSystem::new(label, phi, psi)?.with_provenance(provenance))
        }
    }
}

fn hermite_table(grid: Grid, n: usize) -> Result<Vec<GridFunction>> {
    let rows = grid
        .nodes()
        .par_iter()
        .map(|&x| hermite_functions_real(n - 1, x))
        .collect::<Result<Vec<_>>>()?;
    (0..n)
        .map(|k| GridFunction::new(grid, rows.iter().map(|r| Complex64::new(r[k], 0.0)).collect()))
        .collect()
}

fn complex_hermite_table(grid: Grid, n: usize, a: f64) -> Result<Vec<GridFunction>> {
    let rows = grid
        .nodes()
        .par_iter()
        .map(|&x| hermite_functions(n - 1, Complex64::new(x, a)))
        .collect::<Result<Vec<_>>>()?;
    (0..n)
        .map(|k| GridFunction::new(grid, rows.iter().map(|r| r[k]).collect()))
        .collect()
}

/// Fails with a suggested half-width when some eₙ(· + ia), n < N, is still
/// above the tail tolerance at the outermost nodes.
fn check_tail(funcs: &[GridFunction], grid: Grid, n: usize, a: f64) -> Result<()> {
    let worst = funcs.iter().map(|f| f.edge_magnitude()).fold(0.0, f64::max);
    if worst < TAIL_TOLERANCE {
        return Ok(());
    }
    let mut l = grid.half_width();
    loop {
        l += 0.5;
        let values = hermite_functions(n - 1, Complex64::new(l, a))?;
        if values.iter().all(|v| v.norm() < TAIL_TOLERANCE) {
            return Err(Error::GridTooSmall {
                half_width: grid.half_width(),
                suggested: l,
            });
        }
    }
}

fn build_shifted(grid: Grid, n: usize, a: f64, label: String) -> Result<BiorthogonalSystem> {
    let phi = complex_hermite_table(grid, n, a)?;
    check_tail(&phi, grid, n, a)?;
    let psi = complex_hermite_table(grid, n, -a)?;
    let e = hermite_table(grid, n)?;
    let alternate = e
        .par_iter()
        .map(|f| fourier_multiplier_apply_with_floor(f, |xi| Complex64::new((-a * xi).exp(), 0.0), DEFAULT_SPECTRAL_FLOOR))
        .collect::<Result<Vec<_>>>()?;
    let window = grid.half_width() - 4.0;
    let defect = phi
        .iter()
        .zip(&alternate)
        .map(|(d, f)| d.max_abs_diff(f, Some(window)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let provenance = Provenance {
        alternate_phi: Some(alternate),
        cross_path_defect: Some(defect),
        notes: vec![format!("Fourier route compared on |x| <= {window}")],
    };
    Ok(BiorthogonalSystem::new(label, phi, psi)?.with_provenance(provenance))
}

/// Builds the family on N + guard functions, shrinking the guard in steps
/// of [`GUARD_STEP`] while the enlarged span is unusable (tail check, rank,
/// resolution). The result has at least `spec.n` functions.
pub fn build_guarded(spec: &FamilySpec, guard: usize) -> Result<BiorthogonalSystem> {
    spec.validate()?;
    let mut total = (spec.n + guard).min(spec.kind.max_size()).max(spec.n);
    loop {
        let attempt = build_family(&spec.with_size(total)).and_then(|system| {
            let condition = SpanBasis::new(system.phi())?.gram_condition();
            if condition >= MAX_GRAM_CONDITION {
                Err(Error::RankDeficientSpan { condition })
            } else {
                Ok(system)
            }
        });
        match attempt {
            Ok(system) => return Ok(system),
            Err(Error::RankDeficientSpan { .. } | Error::GridTooSmall { .. } | Error::Unresolved(_))
                if total > spec.n =>
            {
                total = total.saturating_sub(GUARD_STEP).max(spec.n);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Finite section of G = e^{−Q} on span{φₙ}.
#[derive(Clone, Debug)]
pub struct QReconstruction {
    span: SpanBasis,
    g_matrix: DMatrix<Complex64>,
    q_matrix: DMatrix<Complex64>,
    /// Column n: span coordinates of êₙ = G^{1/2} φₙ.
    e_coords: DMatrix<Complex64>,
    e_estimates: Vec<GridFunction>,
    trusted: usize,
    asymmetry: f64,
    min_eigenvalue: f64,
    orthonormality_defect: f64,
}

impl QReconstruction {
    pub fn span(&self) -> &SpanBasis {
        &self.span
    }

    pub fn total(&self) -> usize {
        self.span.dim()
    }

    pub fn trusted(&self) -> usize {
        self.trusted
    }

    /// G in orthonormal span coordinates.
    pub fn g_matrix(&self) -> &DMatrix<Complex64> {
        &self.g_matrix
    }

    /// Q̂ = −log G in orthonormal span coordinates.
    pub fn q_matrix(&self) -> &DMatrix<Complex64> {
        &self.q_matrix
    }

    pub fn e_coords(&self) -> &DMatrix<Complex64> {
        &self.e_coords
    }

    /// êₙ for the trusted indices.
    pub fn e_estimates(&self) -> &[GridFunction] {
        &self.e_estimates
    }

    /// ‖B − B*‖_F / 2 for the unsymmetrized section B.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// max |⟨êₙ, êₘ⟩ − δₙₘ| over the trusted block.
    pub fn orthonormality_defect(&self) -> f64 {
        self.orthonormality_defect
    }

    pub fn gram_condition(&self) -> f64 {
        self.span.gram_condition()
    }

    /// ⟨Q̂ êₙ, êₘ⟩ for m, n < k.
    pub fn q_in_e_basis(&self, k: usize) -> Result<DMatrix<Complex64>> {
        if k == 0 || k > self.trusted {
            return Err(Error::InvalidArgument(format!(
                "block size {k} outside 1..={}",
                self.trusted
            )));
        }
        let c = self.e_coords.columns(0, k);
        Ok(c.adjoint() * &self.q_matrix * c)
    }

    /// A span-coordinate operator compressed to the ê basis: C* A C on the
    /// leading k functions.
    pub fn to_e_basis(&self, op: &DMatrix<Complex64>, k: usize) -> DMatrix<Complex64> {
        let c = self.e_coords.columns(0, k);
        c.adjoint() * op * c
    }
}

/// Finite section with every function trusted.
pub fn reconstruct_q(system: &BiorthogonalSystem) -> Result<QReconstruction> {
    reconstruct_q_leading(system, system.len())
}

/// Finite section on all of `system`, with the leading `trusted` functions
/// reported.
pub fn reconstruct_q_leading(system: &BiorthogonalSystem, trusted: usize) -> Result<QReconstruction> {
    if trusted == 0 || trusted > system.len() {
        return Err(Error::InvalidArgument(format!(
            "trusted block {trusted} outside 1..={}",
            system.len()
        )));
    }
    let span = SpanBasis::new(system.phi())?;
    let condition = span.gram_condition();
    if !(condition < MAX_GRAM_CONDITION) {
        return Err(Error::RankDeficientSpan { condition });
    }
    let r = span.coords().clone();
    let r_inv = r
        .clone()
        .try_inverse()
        .ok_or(Error::RankDeficientSpan { condition: f64::INFINITY })?;
    // Bᵢⱼ = ⟨G₀ uⱼ, uᵢ⟩ with G₀ φₙ = ψₙ.
    let b = span.project_all(system.psi())? * r_inv;
    let half = Complex64::new(0.5, 0.0);
    let asymmetry = (&b - b.adjoint()).norm() * 0.5;
    let g = (&b + b.adjoint()) * half;
    let eig = g.clone().symmetric_eigen();
    let min_eigenvalue = eig.eigenvalues.min();
    if !(min_eigenvalue > 0.0) {
        return Err(Error::NonPositiveSection {
            eigenvalue: min_eigenvalue,
        });
    }
    let v = &eig.eigenvectors;
    let spectral = |f: &dyn Fn(f64) -> f64| {
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|mu| Complex64::new(f(mu), 0.0)));
        v * d * v.adjoint()
    };
    let q = spectral(&|mu| -mu.ln());
    let sqrt_g = spectral(&|mu| mu.sqrt());
    let e_coords = sqrt_g * &r;
    let gram_e = e_coords.columns(0, trusted).adjoint() * e_coords.columns(0, trusted);
    let mut orthonormality_defect: f64 = 0.0;
    for i in 0..trusted {
        for k in 0..trusted {
            let target = if i == k { 1.0 } else { 0.0 };
            orthonormality_defect = orthonormality_defect.max((gram_e[(i, k)] - target).norm());
        }
    }
    let e_estimates = (0..trusted)
        .into_par_iter()
        .map(|n| span.synthesize(&e_coords.column(n).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    Ok(QReconstruction {
        span,
        g_matrix: g,
        q_matrix: q,
        e_coords,
        e_estimates,
        trusted,
        asymmetry,
        min_eigenvalue,
        orthonormality_defect,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassifyOptions {
    /// Certification tolerance on [φₙ, φₘ] − δₙ δₙₘ.
    pub tol_cert: f64,
    /// Threshold on ‖J Q̂ + Q̂ J‖ in the trusted block.
    pub anticommutator_tol: f64,
    /// Threshold on minₛ ‖J êₙ − s êₙ‖.
    pub j_eigen_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            tol_cert: DEFAULT_CERTIFICATION_TOLERANCE,
            anticommutator_tol: 1e-4,
            j_eigen_tol: 1e-5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    FirstTypeEvidence,
    NotJOrthonormal,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::FirstTypeEvidence => "FirstTypeEvidence",
            Verdict::NotJOrthonormal => "NotJOrthonormal",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Entry of the indefinite Gram matrix that broke certification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CertificationFailure {
    pub row: usize,
    pub col: usize,
    pub value: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub family: String,
    /// Size of the trusted block.
    pub n: usize,
    /// Number of functions in the finite section.
    pub section_size: usize,
    pub involution: String,
    pub verdict: Verdict,
    /// max ||[φₙ, φₙ]| − 1|
    pub max_diagonal_deviation: f64,
    /// max |[φₙ, φₘ]| for n ≠ m
    pub max_offdiagonal: f64,
    pub failure: Option<CertificationFailure>,
    pub signs: Vec<Sign>,
    pub anticommutator_residual: Option<f64>,
    pub j_eigen_residuals: Vec<f64>,
    pub predicted_parities: Vec<Sign>,
    pub parities_match_signs: bool,
    pub gram_condition: Option<f64>,
    pub section_asymmetry: Option<f64>,
    pub section_min_eigenvalue: Option<f64>,
    pub e_orthonormality_defect: Option<f64>,
    pub tolerances: ClassifyOptions,
    pub warnings: Vec<String>,
}

/// Classifies the leading `trusted` functions of `system` under `j`.
pub fn classify_leading(
    system: &BiorthogonalSystem,
    j: &KreinStructure,
    opts: &ClassifyOptions,
    trusted: usize,
) -> Result<ClassificationReport> {
    let gram = indefinite_gram(j, system.phi())?;
    let size = system.len();
    let mut max_diagonal_deviation: f64 = 0.0;
    let mut max_offdiagonal: f64 = 0.0;
    let mut failure = None;
    let mut max_imaginary: f64 = 0.0;
    for row in 0..size {
        for col in 0..size {
            let value = gram[(row, col)];
            let deviation = if row == col {
                let d = (value.norm() - 1.0).abs();
                max_diagonal_deviation = max_diagonal_deviation.max(d);
                max_imaginary = max_imaginary.max(value.im.abs());
                d
            } else {
                max_offdiagonal = max_offdiagonal.max(value.norm());
                value.norm()
            };
            if failure.is_none() && !(deviation <= opts.tol_cert) {
                failure = Some(CertificationFailure { row, col, value });
            }
        }
    }
    let mut warnings = Vec::new();
    if max_imaginary > IMAGINARY_WARNING_LEVEL {
        warnings.push(format!("max |Im [phi_n, phi_n]| = {max_imaginary:e}"));
    }
    let mut report = ClassificationReport {
        family: system.family().to_string(),
        n: trusted,
        section_size: size,
        involution: j.label().to_string(),
        verdict: Verdict::NotJOrthonormal,
        max_diagonal_deviation,
        max_offdiagonal,
        failure,
        signs: Vec::new(),
        anticommutator_residual: None,
        j_eigen_residuals: Vec::new(),
        predicted_parities: Vec::new(),
        parities_match_signs: false,
        gram_condition: None,
        section_asymmetry: None,
        section_min_eigenvalue: None,
        e_orthonormality_defect: None,
        tolerances: *opts,
        warnings,
    };
    if report.failure.is_some() {
        return Ok(report);
    }
    let signs: Vec<Sign> = (0..size).map(|n| Sign::of(gram[(n, n)].re)).collect();

    let recon = reconstruct_q_leading(system, trusted)?;
    let j_span = recon.span().compress(|u| Ok(j.apply(u)))?;
    let j_e = recon.to_e_basis(&j_span, trusted);
    let q_e = recon.q_in_e_basis(trusted)?;
    let anticommutator = (&j_e * &q_e + &q_e * &j_e).singular_values().max();

    let (residuals, parities): (Vec<f64>, Vec<Sign>) = recon
        .e_estimates()
        .par_iter()
        .map(|e| {
            let je = j.apply(e);
            let plus = je.sub(e)?.norm();
            let minus = je.add(e)?.norm();
            Ok(if plus <= minus {
                (plus, Sign::Positive)
            } else {
                (minus, Sign::Negative)
            })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();

    report.parities_match_signs = parities[..] == signs[..trusted];
    let below = anticommutator < opts.anticommutator_tol && residuals.iter().all(|&r| r < opts.j_eigen_tol);
    report.verdict = if below && report.parities_match_signs {
        Verdict::FirstTypeEvidence
    } else {
        Verdict::Inconclusive
    };
    if below && !report.parities_match_signs {
        report
            .warnings
            .push("J-eigenvector parities disagree with the certified signs".into());
    }
    report.signs = signs[..trusted].to_vec();
    report.anticommutator_residual = Some(anticommutator);
    report.j_eigen_residuals = residuals;
    report.predicted_parities = parities;
    report.gram_condition = Some(recon.gram_condition());
    report.section_asymmetry = Some(recon.asymmetry());
    report.section_min_eigenvalue = Some(recon.min_eigenvalue());
    report.e_orthonormality_defect = Some(recon.orthonormality_defect());
    Ok(report)
}

/// Classifies every function of `system`.
pub fn classify(system: &BiorthogonalSystem, j: &KreinStructure, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    classify_leading(system, j, opts, system.len())
}

/// Builds the family with a guard band and classifies the leading `spec.n`
/// functions.
pub fn classify_family(
    spec: &FamilySpec,
    j: &KreinStructure,
    opts: &ClassifyOptions,
    guard: usize,
) -> Result<ClassificationReport> {
    let system = build_guarded(spec, guard)?;
    classify_leading(&system, j, opts, spec.n)
}

/// Reconstruction of the leading `spec.n` functions from a guarded section.
pub fn reconstruct_family(spec: &FamilySpec, guard: usize) -> Result<QReconstruction> {
    let system = build_guarded(spec, guard)?;
    reconstruct_q_leading(&system, spec.n)
}

/// Attaches certified signs δₙ = sign Re [φₙ, φₙ] to `system`, failing with
/// the first diagonal entry off by more than `tolerance`.
pub fn certify(system: BiorthogonalSystem, j: &KreinStructure, tolerance: f64) -> Result<BiorthogonalSystem> {
    system.certify_signs(j, tolerance)
}

/// Partial sums of ⟨f, g⟩ = Σ ⟨f, φₙ⟩⟨ψₙ, g⟩ in both orderings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiBasisResidual {
    pub exact: Complex64,
    /// |⟨f,g⟩ − Σ_{n<k} ⟨f,φₙ⟩⟨ψₙ,g⟩|, k = 0..=upto
    pub phi_psi: Vec<f64>,
    /// |⟨f,g⟩ − Σ_{n<k} ⟨f,ψₙ⟩⟨φₙ,g⟩|, k = 0..=upto
    pub psi_phi: Vec<f64>,
    /// |difference of the two partial sums| for each k
    pub ordering_gap: Vec<f64>,
}

pub fn quasi_basis_residual(
    system: &BiorthogonalSystem,
    f: &GridFunction,
    g: &GridFunction,
    upto: usize,
) -> Result<QuasiBasisResidual> {
    if upto > system.len() {
        return Err(Error::LengthMismatch {
            expected: system.len(),
            found: upto,
        });
    }
    let exact = f.inner(g)?;
    let terms = (0..upto)
        .into_par_iter()
        .map(|n| {
            let (phi, psi) = (&system.phi()[n], &system.psi()[n]);
            Ok((f.inner(phi)? * psi.inner(g)?, f.inner(psi)? * phi.inner(g)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut first = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    let mut out = QuasiBasisResidual {
        exact,
        phi_psi: vec![exact.norm()],
        psi_phi: vec![exact.norm()],
        ordering_gap: vec![0.0],
    };
    for (a, b) in terms {
        first += a;
        second += b;
        out.phi_psi.push((exact - first).norm());
        out.psi_phi.push((exact - second).norm());
        out.ordering_gap.push((first - second).norm());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    /// δₙ [f, φₙ] computed on the grid.
    pub grid_coefficients: Vec<Complex64>,
    /// max |grid coefficient − span coefficient|
    pub coefficient_defect: f64,
    /// ‖f − Σ_{n<k} δₙ[f,φₙ] φₙ‖_{−Q}, k = 0..=upto
    pub distances: Vec<f64>,
}

/// Expansion f = Σ δₙ [f, φₙ] φₙ for f = Σ cₙ φₙ, measured in the
/// coefficient norm of ⟨·,·⟩_{−Q}.
pub fn expansion_minus_q(
    system: &BiorthogonalSystem,
    j: &KreinStructure,
    coeffs: &[Complex64],
    upto: usize,
) -> Result<ExpansionReport> {
    let signs = system.signs().ok_or(Error::SignsAbsent)?;
    if coeffs.len() > system.len() || upto > system.len() {
        return Err(Error::LengthMismatch {
            expected: system.len(),
            found: coeffs.len().max(upto),
        });
    }
    let f = system.synthesize_phi(coeffs)?;
    let grid_coefficients = system
        .phi()
        .par_iter()
        .zip(signs)
        .map(|(phi, s)| Ok(indefinite_inner(j, &f, phi)? * s.value()))
        .collect::<Result<Vec<_>>>()?;
    let coefficient = |n: usize| coeffs.get(n).copied().unwrap_or_default();
    let coefficient_defect = grid_coefficients
        .iter()
        .enumerate()
        .map(|(n, a)| (a - coefficient(n)).norm())
        .fold(0.0, f64::max);
    if coefficient_defect > COEFFICIENT_TOLERANCE {
        return Err(Error::CoefficientMismatch {
            defect: coefficient_defect,
        });
    }
    let distances = (0..=upto)
        .map(|k| {
            (0..system.len())
                .map(|n| {
                    let residual = if n < k {
                        coefficient(n) - grid_coefficients[n]
                    } else {
                        coefficient(n)
                    };
                    residual.norm_sqr()
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    Ok(ExpansionReport {
        grid_coefficients,
        coefficient_defect,
        distances,
    })
}

/// min over φ in the span of ⟨Gφ, φ⟩ ‖g‖² / |⟨φ, g⟩|² for g = Σ gₙ φₙ,
/// which is ‖g‖² / (g* G⁻¹ g) in orthonormal span coordinates. The ‖g‖²
/// factor makes the value independent of the scale of g.
pub fn extremality_quotient(recon: &QReconstruction, g: &[Complex64]) -> Result<f64> {
    let dim = recon.total();
    if g.len() > dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            found: g.len(),
        });
    }
    if g.iter().all(|v| v.norm() == 0.0) {
        return Err(Error::ZeroVector);
    }
    let padded = nalgebra::DVector::from_fn(dim, |n, _| g.get(n).copied().unwrap_or_default());
    let g_u = recon.span().coords() * padded;
    let solved = recon
        .g_matrix()
        .clone()
        .cholesky()
        .ok_or(Error::NonPositiveSection {
            eigenvalue: recon.min_eigenvalue(),
        })?
        .solve(&g_u);
    let form = g_u.dotc(&solved).re;
    Ok(g_u.norm_squared() / form)
}
