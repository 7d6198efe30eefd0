//! Krein-space structure over grid functions: fundamental symmetries, the
//! indefinite inner product [f, g] = ⟨Jf, g⟩, biorthogonal systems with
//! certified signs, and the finite-rank C-symmetry operator they induce.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::span::SpanBasis;

/// Default tolerance on ||[φₙ, φₙ]| − 1| for sign certification.
pub const DEFAULT_CERTIFICATION_TOLERANCE: f64 = 1e-6;

/// Imaginary parts of [φₙ, φₙ] above this are flagged in the certification.
pub const IMAGINARY_WARNING_LEVEL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn of(value: f64) -> Self {
        if value < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.as_i8())
    }
}

/// Bounded self-adjoint involutions available as fundamental symmetries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Involution {
    /// (Pf)(x) = f(−x); an exact index reversal on the midpoint grid.
    Parity,
    /// J = I, which turns the Krein space back into the Hilbert space.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KreinStructure {
    involution: Involution,
    label: String,
}

impl KreinStructure {
    pub fn new(involution: Involution, label: impl Into<String>) -> Self {
        Self {
            involution,
            label: label.into(),
        }
    }

    pub fn parity() -> Self {
        Self::new(Involution::Parity, "parity")
    }

    pub fn identity() -> Self {
        Self::new(Involution::Identity, "identity")
    }

    pub fn involution(&self) -> Involution {
        self.involution
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, f: &GridFunction) -> GridFunction {
        match self.involution {
            Involution::Parity => f.parity(),
            Involution::Identity => f.clone(),
        }
    }
}

impl Default for KreinStructure {
    fn default() -> Self {
        Self::parity()
    }
}

/// [f, g] = ⟨Jf, g⟩.
pub fn indefinite_inner(j: &KreinStructure, f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    j.apply(f).inner(g)
}

/// Matrix of ⟨aᵢ, bⱼ⟩ (row i, column j); entries are computed in parallel.
pub fn gram_matrix(a: &[GridFunction], b: &[GridFunction]) -> Result<DMatrix<Complex64>> {
    let rows = a
        .par_iter()
        .map(|ai| b.iter().map(|bj| ai.inner(bj)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(a.len(), b.len(), |i, j| rows[i][j]))
}

/// Matrix of [φᵢ, φⱼ].
pub fn indefinite_gram(j: &KreinStructure, phi: &[GridFunction]) -> Result<DMatrix<Complex64>> {
    let images: Vec<GridFunction> = phi.iter().map(|f| j.apply(f)).collect();
    gram_matrix(&images, phi)
}

fn max_identity_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - target).norm());
        }
    }
    worst
}

/// Measured outcome of a sign certification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certification {
    pub involution: String,
    pub tolerance: f64,
    /// max ||[φₙ, φₙ]| − 1|
    pub max_deviation: f64,
    /// max |Im [φₙ, φₙ]|
    pub max_imaginary: f64,
    pub warnings: Vec<String>,
}

/// Cross-check artifacts retained by the family builders.
#[derive(Clone, Debug, Default)]
pub struct Provenance {
    /// φₙ obtained along an independent construction path, when one exists.
    pub alternate_phi: Option<Vec<GridFunction>>,
    /// Sup-norm disagreement between the two paths on the trusted window.
    pub cross_path_defect: Option<f64>,
    pub notes: Vec<String>,
}

/// Paired lists {φₙ}, {ψₙ} with ⟨φₙ, ψₘ⟩ ≈ δₙₘ.
#[derive(Clone, Debug)]
pub struct BiorthogonalSystem {
    family: String,
    grid: Grid,
    phi: Vec<GridFunction>,
    psi: Vec<GridFunction>,
    signs: Option<Vec<Sign>>,
    biorthogonality_defect: f64,
    certification: Option<Certification>,
    provenance: Provenance,
}

impl BiorthogonalSystem {
    /// Measures max |⟨φₙ, ψₘ⟩ − δₙₘ| and records it; the caller decides
    /// what defect is acceptable.
    pub fn new(family: impl Into<String>, phi: Vec<GridFunction>, psi: Vec<GridFunction>) -> Result<Self> {
        if phi.len() != psi.len() {
            return Err(Error::LengthMismatch {
                expected: phi.len(),
                found: psi.len(),
            });
        }
        let grid = *phi
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty biorthogonal system".into()))?
            .grid();
        if phi.iter().chain(&psi).any(|f| *f.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        let defect = max_identity_defect(&gram_matrix(&phi, &psi)?);
        Ok(Self {
            family: family.into(),
            grid,
            phi,
            psi,
            signs: None,
            biorthogonality_defect: defect,
            certification: None,
            provenance: Provenance::default(),
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn phi(&self) -> &[GridFunction] {
        &self.phi
    }

    pub fn psi(&self) -> &[GridFunction] {
        &self.psi
    }

    pub fn signs(&self) -> Option<&[Sign]> {
        self.signs.as_deref()
    }

    pub fn biorthogonality_defect(&self) -> f64 {
        self.biorthogonality_defect
    }

    pub fn certification(&self) -> Option<&Certification> {
        self.certification.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Leading `n` pairs; certified signs carry over.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate a system of {} functions to {n}",
                self.len()
            )));
        }
        let mut out = Self::new(self.family.clone(), self.phi[..n].to_vec(), self.psi[..n].to_vec())?;
        out.signs = self.signs.as_ref().map(|s| s[..n].to_vec());
        out.certification = self.certification.clone();
        out.provenance = Provenance {
            alternate_phi: self.provenance.alternate_phi.as_ref().map(|p| p[..n].to_vec()),
            cross_path_defect: self.provenance.cross_path_defect,
            notes: self.provenance.notes.clone(),
        };
        Ok(out)
    }

    /// Checks ||[φₙ, φₙ]| − 1| ≤ tolerance for every n and records
    /// δₙ = sign(Re [φₙ, φₙ]).
    pub fn certify_signs(mut self, j: &KreinStructure, tolerance: f64) -> Result<Self> {
        let (signs, certification) = certify_diagonal(j, &self.phi, tolerance)?;
        self.signs = Some(signs);
        self.certification = Some(certification);
        Ok(self)
    }

    /// Attaches externally known signs (used for systems whose signs come
    /// from a partner construction).
    pub fn with_signs(mut self, signs: Vec<Sign>, certification: Certification) -> Result<Self> {
        if signs.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: signs.len(),
            });
        }
        self.signs = Some(signs);
        self.certification = Some(certification);
        Ok(self)
    }

    fn require_signs(&self) -> Result<&[Sign]> {
        self.signs.as_deref().ok_or(Error::SignsAbsent)
    }

    /// Σ cₙ φₙ
    pub fn synthesize_phi(&self, coeffs: &[Complex64]) -> Result<GridFunction> {
        GridFunction::linear_combination(self.grid, coeffs, &self.phi)
    }
}

impl fmt::Display for BiorthogonalSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (N={}, {})", self.family, self.len(), self.grid)
    }
}

fn certify_diagonal(
    j: &KreinStructure,
    phi: &[GridFunction],
    tolerance: f64,
) -> Result<(Vec<Sign>, Certification)> {
    let diag = phi
        .par_iter()
        .map(|f| indefinite_inner(j, f, f))
        .collect::<Result<Vec<_>>>()?;
    let mut signs = Vec::with_capacity(diag.len());
    let mut max_deviation: f64 = 0.0;
    let mut max_imaginary: f64 = 0.0;
    let mut warnings = Vec::new();
    for (index, value) in diag.iter().enumerate() {
        let deviation = (value.norm() - 1.0).abs();
        if deviation > tolerance || !deviation.is_finite() {
            return Err(Error::NotJOrthonormal {
                index,
                value: *value,
                tolerance,
            });
        }
        if value.im.abs() > IMAGINARY_WARNING_LEVEL {
            warnings.push(format!("Im [phi_{index}, phi_{index}] = {:e}", value.im));
        }
        max_deviation = max_deviation.max(deviation);
        max_imaginary = max_imaginary.max(value.im.abs());
        signs.push(Sign::of(value.re));
    }
    Ok((
        signs,
        Certification {
            involution: j.label().to_string(),
            tolerance,
            max_deviation,
            max_imaginary,
            warnings,
        },
    ))
}

/// ψₙ = [φₙ, φₙ] J φₙ for a J-orthonormal list, with the signs and the
/// measured biorthogonality defect.
#[derive(Clone, Debug)]
pub struct PartnerSet {
    pub psi: Vec<GridFunction>,
    pub signs: Vec<Sign>,
    pub biorthogonality_defect: f64,
    pub certification: Certification,
}

pub fn biorthogonal_partner(j: &KreinStructure, phi: &[GridFunction], tolerance: f64) -> Result<PartnerSet> {
    let (signs, certification) = certify_diagonal(j, phi, tolerance)?;
    let psi: Vec<GridFunction> = phi
        .iter()
        .zip(&signs)
        .map(|(f, s)| j.apply(f).scaled(Complex64::new(s.value(), 0.0)))
        .collect();
    let biorthogonality_defect = max_identity_defect(&gram_matrix(phi, &psi)?);
    Ok(PartnerSet {
        psi,
        signs,
        biorthogonality_defect,
        certification,
    })
}

/// Indices with δₙ = +1 and δₙ = −1.
pub fn sign_split(system: &BiorthogonalSystem) -> Result<(Vec<usize>, Vec<usize>)> {
    let signs = system.require_signs()?;
    let (pos, neg): (Vec<_>, Vec<_>) = (0..signs.len()).partition(|&n| signs[n] == Sign::Positive);
    Ok((pos, neg))
}

/// C_N f = Σ δₙ ⟨f, ψₙ⟩ φₙ, kept as the function lists plus signs.
#[derive(Clone, Copy, Debug)]
pub struct CSymmetryOperator<'a> {
    system: &'a BiorthogonalSystem,
    signs: &'a [Sign],
}

impl<'a> CSymmetryOperator<'a> {
    pub fn build(system: &'a BiorthogonalSystem) -> Result<Self> {
        Ok(Self {
            system,
            signs: system.require_signs()?,
        })
    }

    pub fn rank(&self) -> usize {
        self.signs.len()
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        let coeffs = self
            .system
            .psi()
            .iter()
            .zip(self.signs)
            .map(|(psi, s)| Ok(f.inner(psi)? * s.value()))
            .collect::<Result<Vec<_>>>()?;
        self.system.synthesize_phi(&coeffs)
    }
}

pub fn c_symmetry_build(system: &BiorthogonalSystem) -> Result<CSymmetryOperator<'_>> {
    CSymmetryOperator::build(system)
}

/// ⟨f, g⟩_{−Q} for f = Σ cₙ φₙ, g = Σ dₙ φₙ, in which {φₙ} is orthonormal:
/// Σ cₙ conj(dₙ).
pub fn metric_inner_minus_q(system: &BiorthogonalSystem, c: &[Complex64], d: &[Complex64]) -> Result<Complex64> {
    if c.len() != d.len() {
        return Err(Error::LengthMismatch {
            expected: c.len(),
            found: d.len(),
        });
    }
    if c.len() > system.len() {
        return Err(Error::LengthMismatch {
            expected: system.len(),
            found: c.len(),
        });
    }
    Ok(c.iter().zip(d).map(|(a, b)| a * b.conj()).sum())
}

/// Grid-side evaluation [C_N f, g] of the same inner product.
pub fn metric_inner_grid(
    system: &BiorthogonalSystem,
    j: &KreinStructure,
    c: &[Complex64],
    d: &[Complex64],
) -> Result<Complex64> {
    if c.len() != d.len() {
        return Err(Error::LengthMismatch {
            expected: c.len(),
            found: d.len(),
        });
    }
    let op = CSymmetryOperator::build(system)?;
    let f = system.synthesize_phi(c)?;
    let g = system.synthesize_phi(d)?;
    indefinite_inner(j, &op.apply(&f)?, &g)
}

/// Smallest eigenvalue of the Hermitian part of ⟨J C_N u_j, u_i⟩ in an
/// orthonormal basis of span{φₙ}. Positive for systems whose JC is positive.
pub fn jc_min_eigenvalue(system: &BiorthogonalSystem, j: &KreinStructure) -> Result<f64> {
    let op = CSymmetryOperator::build(system)?;
    let span = SpanBasis::new(system.phi())?;
    let m = span.compress(|u| Ok(j.apply(&op.apply(u)?)))?;
    let hermitian = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(hermitian.symmetric_eigenvalues().min())
}
