//! Grid realizations of the example Hamiltonians, the anharmonic eigenbasis
//! and truncated operators H f = Σ λₙ ⟨f, ψₙ⟩ φₙ built from a biorthogonal
//! system.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{derivative, multiply_apply, second_derivative, Grid, GridFunction};
use crate::krein::{indefinite_inner, BiorthogonalSystem, CSymmetryOperator, KreinStructure, Sign};

/// Largest number of anharmonic eigenstates served.
pub const MAX_ANHARMONIC_STATES: usize = 40;

/// Parity defects above this are rejected.
pub const PARITY_TOLERANCE: f64 = 1e-8;

/// Relative spectral weight allowed in the outer quarter of the frequency band.
const RESOLUTION_TOLERANCE: f64 = 1e-10;

/// Sample magnitude allowed at the outermost nodes.
const DECAY_TOLERANCE: f64 = 1e-12;

/// Seed for the indices probed by inverse iteration.
pub const CROSS_CHECK_SEED: u64 = 7;

const INVERSE_ITERATION_STEPS: usize = 30;

/// −f'' + x² f + 2iax f.
pub fn shifted_oscillator_apply(a: f64, f: &GridFunction) -> Result<GridFunction> {
    let kinetic = second_derivative(f)?;
    let potential = multiply_apply(f, |x| Complex64::new(x * x, 2.0 * a * x))?;
    potential.sub(&kinetic)
}

/// ½(−f'' − x f' + ½(3x²/2 − 1) f).
pub fn example1_apply(f: &GridFunction) -> Result<GridFunction> {
    example1_family_apply(f, -1.0, -1.0)
}

/// ½(−f'' + x f' + ½(3x²/2 + 1) f), the formal adjoint of [`example1_apply`].
pub fn example1_adjoint_apply(f: &GridFunction) -> Result<GridFunction> {
    example1_family_apply(f, 1.0, 1.0)
}

fn example1_family_apply(f: &GridFunction, drift: f64, shift: f64) -> Result<GridFunction> {
    let d1 = derivative(f)?;
    let d2 = second_derivative(f)?;
    let drift_term = multiply_apply(&d1, |x| Complex64::new(drift * x, 0.0))?;
    let potential = multiply_apply(f, |x| Complex64::new(0.5 * (1.5 * x * x + shift), 0.0))?;
    let sum = potential.add(&drift_term)?.sub(&d2)?;
    Ok(sum.scaled(Complex64::new(0.5, 0.0)))
}

/// One eigenpair of −d²/dx² + |x|^β.
#[derive(Clone, Debug)]
pub struct AnharmonicState {
    pub energy: f64,
    pub function: GridFunction,
    pub parity: Sign,
    /// Measured ‖P e − s e‖.
    pub parity_defect: f64,
}

/// Lowest `n` eigenpairs of the spectral discretization of −d²/dx² + |x|^β.
pub fn anharmonic_basis(beta: f64, n: usize, grid: Grid) -> Result<Vec<AnharmonicState>> {
    if !(beta > 2.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("anharmonic exponent must exceed 2, got {beta}")));
    }
    even_potential_basis(beta, n, grid)
}

fn even_potential_basis(beta: f64, n: usize, grid: Grid) -> Result<Vec<AnharmonicState>> {
    if n == 0 || n > MAX_ANHARMONIC_STATES {
        return Err(Error::InvalidArgument(format!(
            "anharmonic basis size {n} outside 1..={MAX_ANHARMONIC_STATES}"
        )));
    }
    let m = grid.points();
    let half = m / 2;
    if n > half {
        return Err(Error::Unresolved(format!("{n} states requested from {m} grid points")));
    }
    let h = grid.spacing();
    let freqs = grid.frequencies();
    // Symmetric Toeplitz kernel of the −ξ² multiplier: t(d) = (1/M) Σ ξ² cos(ξ d h).
    let kernel: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|d| freqs.iter().map(|xi| xi * xi * (xi * d as f64 * h).cos()).sum::<f64>() / m as f64)
        .collect();
    let entry = |i: usize, j: usize| {
        let mut v = kernel[i.abs_diff(j)];
        if i == j {
            v += grid.node(i).abs().powf(beta);
        }
        v
    };
    // Upper-half index i' ↔ node half + i', mirror node half − 1 − i'.
    let block = |sign: f64| {
        DMatrix::from_fn(half, half, |a, b| {
            entry(half + a, half + b) + sign * entry(half + a, half - 1 - b)
        })
    };
    let mut states = Vec::with_capacity(2 * n);
    for parity in [Sign::Positive, Sign::Negative] {
        let eig = block(parity.value())
            .try_symmetric_eigen(1e-14, 0)
            .ok_or_else(|| Error::EigenSolver("symmetric eigensolver did not converge".into()))?;
        for (k, &energy) in eig.eigenvalues.iter().enumerate() {
            states.push((energy, parity, eig.eigenvectors.column(k).into_owned()));
        }
    }
    states.sort_by(|a, b| a.0.total_cmp(&b.0));
    states.truncate(n);

    let norm = (2.0 * h).sqrt().recip();
    states
        .into_iter()
        .enumerate()
        .map(|(index, (energy, parity, v))| {
            let anchor = v.iamax();
            let orient = if v[anchor] < 0.0 { -norm } else { norm };
            let mut samples = vec![Complex64::new(0.0, 0.0); m];
            for (a, &value) in v.iter().enumerate() {
                samples[half + a] = Complex64::new(orient * value, 0.0);
                samples[half - 1 - a] = Complex64::new(parity.value() * orient * value, 0.0);
            }
            let function = GridFunction::new(grid, samples)?;
            let parity_defect = function
                .parity()
                .sub(&function.scaled(Complex64::new(parity.value(), 0.0)))?
                .norm();
            if parity_defect > PARITY_TOLERANCE {
                return Err(Error::ParityDefect { index, defect: parity_defect });
            }
            check_resolved(&function, index)?;
            Ok(AnharmonicState {
                energy,
                function,
                parity,
                parity_defect,
            })
        })
        .collect()
}

fn check_resolved(f: &GridFunction, index: usize) -> Result<()> {
    let grid = f.grid();
    let spectrum = crate::grid::forward_transform(f);
    let band = grid.frequencies().iter().fold(0.0_f64, |acc, xi| acc.max(xi.abs()));
    let peak = spectrum.values.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()));
    let outer = spectrum
        .frequencies
        .iter()
        .zip(&spectrum.values)
        .filter(|(xi, _)| xi.abs() > 0.75 * band)
        .fold(0.0_f64, |acc, (_, v)| acc.max(v.norm()));
    if outer > RESOLUTION_TOLERANCE * peak {
        return Err(Error::Unresolved(format!(
            "state {index} keeps relative spectral weight {:e} near the band edge",
            outer / peak
        )));
    }
    if f.edge_magnitude() > DECAY_TOLERANCE {
        return Err(Error::GridTooSmall {
            half_width: grid.half_width(),
            suggested: 1.5 * grid.half_width(),
        });
    }
    Ok(())
}

/// H f = Σ λₙ ⟨f, ψₙ⟩ φₙ, or with the roles of φ and ψ exchanged.
#[derive(Clone, Copy, Debug)]
pub struct Ne1Operator<'a> {
    system: &'a BiorthogonalSystem,
    lambdas: &'a [Complex64],
    dual: bool,
}

impl<'a> Ne1Operator<'a> {
    pub fn new(system: &'a BiorthogonalSystem, lambdas: &'a [Complex64]) -> Result<Self> {
        if lambdas.len() != system.len() {
            return Err(Error::LengthMismatch {
                expected: system.len(),
                found: lambdas.len(),
            });
        }
        Ok(Self {
            system,
            lambdas,
            dual: false,
        })
    }

    /// The operator with φ and ψ exchanged.
    pub fn dual(self) -> Self {
        Self {
            dual: !self.dual,
            ..self
        }
    }

    /// Functions the operator maps onto (eigenvectors).
    pub fn range(&self) -> &'a [GridFunction] {
        if self.dual {
            self.system.psi()
        } else {
            self.system.phi()
        }
    }

    fn projectors(&self) -> &'a [GridFunction] {
        if self.dual {
            self.system.phi()
        } else {
            self.system.psi()
        }
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        let coeffs = self
            .projectors()
            .iter()
            .zip(self.lambdas)
            .map(|(p, l)| Ok(l * f.inner(p)?))
            .collect::<Result<Vec<_>>>()?;
        GridFunction::linear_combination(*self.system.grid(), &coeffs, self.range())
    }

    /// Matrix ⟨H rₙ, pₘ⟩ with rₙ the range functions and pₘ the projectors;
    /// diag(λ) up to biorthogonality defect.
    pub fn span_matrix(&self) -> Result<DMatrix<Complex64>> {
        let images = self
            .range()
            .par_iter()
            .map(|r| self.apply(r))
            .collect::<Result<Vec<_>>>()?;
        let projectors = self.projectors();
        let columns = images
            .par_iter()
            .map(|img| projectors.iter().map(|p| img.inner(p)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let n = images.len();
        Ok(DMatrix::from_fn(n, n, |m, k| columns[k][m]))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub label: String,
    pub n: usize,
    /// Recovered eigenvalues sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// ‖H rₙ − λₙ rₙ‖ / ‖rₙ‖ for each eigenvector rₙ.
    pub residuals: Vec<f64>,
    /// Largest distance between the recovered multiset and the input list.
    pub eigenvalue_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InverseIterationCheck {
    pub index: usize,
    pub lambda: Complex64,
    pub estimate: Complex64,
    pub defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ne1Report {
    pub forward: SpectrumReport,
    pub dual: SpectrumReport,
    pub cross_check: Vec<InverseIterationCheck>,
    /// max |K − K*| for K = ([C_N H φₙ, φₘ]); absent without certified signs.
    pub metric_hermiticity_defect: Option<f64>,
}

/// Assembles H_{φ,ψ} and H_{ψ,φ} for the given λ list and checks their
/// spectra, eigen-residuals and (for signed systems) metric Hermiticity.
pub fn build_truncated_ne1(system: &BiorthogonalSystem, lambdas: &[Complex64]) -> Result<Ne1Report> {
    let forward_op = Ne1Operator::new(system, lambdas)?;
    let dual_op = forward_op.dual();
    let forward_matrix = forward_op.span_matrix()?;
    let forward = spectrum_report(&forward_op, &forward_matrix, "H_phi_psi")?;
    let dual = spectrum_report(&dual_op, &dual_op.span_matrix()?, "H_psi_phi")?;
    let cross_check = inverse_iteration_checks(&forward_matrix, lambdas)?;
    let metric_hermiticity_defect = match system.signs() {
        Some(_) => Some(metric_hermiticity_defect(system, &KreinStructure::parity(), lambdas)?),
        None => None,
    };
    Ok(Ne1Report {
        forward,
        dual,
        cross_check,
        metric_hermiticity_defect,
    })
}

fn spectrum_report(op: &Ne1Operator<'_>, matrix: &DMatrix<Complex64>, label: &str) -> Result<SpectrumReport> {
    let mut eigenvalues = complex_eigenvalues(matrix)?;
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let eigenvalue_defect = multiset_distance(&eigenvalues, op.lambdas);
    let residuals = op
        .range()
        .par_iter()
        .zip(op.lambdas)
        .map(|(r, l)| {
            let image = op.apply(r)?;
            Ok(image.axpy(-l, r)?.norm() / r.norm())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumReport {
        label: label.to_string(),
        n: op.lambdas.len(),
        eigenvalues,
        residuals,
        eigenvalue_defect,
    })
}

/// Eigenvalues from the complex Schur form.
pub fn complex_eigenvalues(matrix: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = matrix.nrows();
    let schur = matrix
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| Error::EigenSolver("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let scale = t.iter().fold(0.0_f64, |acc, v| acc.max(v.norm())).max(f64::MIN_POSITIVE);
    let mut values = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].norm() > 1e-13 * scale {
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let mean = (a + d) * 0.5;
            let root = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
            values.push(mean + root);
            values.push(mean - root);
            i += 2;
        } else {
            values.push(t[(i, i)]);
            i += 1;
        }
    }
    Ok(values)
}

/// Greedy nearest matching of two equally long lists; the largest matched distance.
fn multiset_distance(found: &[Complex64], expected: &[Complex64]) -> f64 {
    let mut used = vec![false; found.len()];
    let mut worst: f64 = 0.0;
    for e in expected {
        let best = found
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .min_by(|a, b| (a.1 - e).norm().total_cmp(&(b.1 - e).norm()));
        match best {
            Some((k, v)) => {
                used[k] = true;
                worst = worst.max((v - e).norm());
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

fn inverse_iteration_checks(matrix: &DMatrix<Complex64>, lambdas: &[Complex64]) -> Result<Vec<InverseIterationCheck>> {
    let n = lambdas.len();
    let mut rng = ChaCha8Rng::seed_from_u64(CROSS_CHECK_SEED);
    let mut indices = sample(&mut rng, n, n.min(3)).into_vec();
    indices.sort_unstable();
    indices
        .into_iter()
        .map(|index| {
            let lambda = lambdas[index];
            let shift = lambda + Complex64::new(1e-6 * (1.0 + lambda.norm()), 0.0);
            let shifted = matrix - DMatrix::from_diagonal_element(n, n, shift);
            let lu = shifted.lu();
            let mut x = DVector::from_fn(n, |k, _| Complex64::new(1.0 + 0.1 * k as f64, 0.05 * k as f64));
            for _ in 0..INVERSE_ITERATION_STEPS {
                let y = lu
                    .solve(&x)
                    .ok_or_else(|| Error::EigenSolver("singular shifted matrix in inverse iteration".into()))?;
                let norm = y.norm();
                if !(norm.is_finite() && norm > 0.0) {
                    return Err(Error::EigenSolver("inverse iteration diverged".into()));
                }
                x = y.unscale(norm);
            }
            let estimate = (x.adjoint() * matrix * &x)[(0, 0)] / x.norm_squared();
            Ok(InverseIterationCheck {
                index,
                lambda,
                estimate,
                defect: (estimate - lambda).norm(),
            })
        })
        .collect()
}

/// max |K − K*| for Kₘₙ = [C_N H φₙ, φₘ] = ⟨H φₙ, φₘ⟩_{−Q}.
pub fn metric_hermiticity_defect(
    system: &BiorthogonalSystem,
    j: &KreinStructure,
    lambdas: &[Complex64],
) -> Result<f64> {
    let c = CSymmetryOperator::build(system)?;
    let op = Ne1Operator::new(system, lambdas)?;
    let phi = system.phi();
    let columns = phi
        .par_iter()
        .map(|f| {
            let image = c.apply(&op.apply(f)?)?;
            phi.iter().map(|g| indefinite_inner(j, &image, g)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let n = phi.len();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            worst = worst.max((columns[b][a] - columns[a][b].conj()).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krein::DEFAULT_CERTIFICATION_TOLERANCE;
    use crate::specfun::{hermite_function, hermite_functions_real};

    fn grid() -> Grid {
        Grid::desk_default()
    }

    fn hermite(n: usize) -> GridFunction {
        GridFunction::from_real_fn(grid(), |x| hermite_functions_real(n, x).unwrap()[n]).unwrap()
    }

    fn shifted(n: usize, a: f64) -> GridFunction {
        GridFunction::from_fn(grid(), |x| hermite_function(n, Complex64::new(x, a)).unwrap()).unwrap()
    }

    fn example1_phi(n: usize) -> GridFunction {
        GridFunction::from_real_fn(grid(), |x| hermite_functions_real(n, x).unwrap()[n] * (-0.25 * x * x).exp()).unwrap()
    }

    fn example1_psi(n: usize) -> GridFunction {
        GridFunction::from_real_fn(grid(), |x| hermite_functions_real(n, x).unwrap()[n] * (0.25 * x * x).exp()).unwrap()
    }

    fn relative_residual(h: &GridFunction, f: &GridFunction, lambda: f64, window: Option<f64>) -> f64 {
        let r = h.axpy(Complex64::new(-lambda, 0.0), f).unwrap();
        let zero = GridFunction::zeros(*f.grid());
        r.max_abs_diff(&zero, window).unwrap() / f.max_abs_diff(&zero, window).unwrap()
    }

    #[test]
    fn shifted_oscillator_eigenvalues() {
        let a = 0.5;
        let window = Some(grid().half_width() - 4.0);
        let phi0 = shifted(0, a);
        assert!(relative_residual(&shifted_oscillator_apply(a, &phi0).unwrap(), &phi0, 1.25, window) < 1e-7);
        let phi3 = shifted(3, a);
        assert!(relative_residual(&shifted_oscillator_apply(a, &phi3).unwrap(), &phi3, 7.25, window) < 1e-6);
        for n in 0..6 {
            let e = hermite(n);
            let he = shifted_oscillator_apply(0.0, &e).unwrap();
            assert!(he.axpy(Complex64::new(-((2 * n + 1) as f64), 0.0), &e).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn example1_eigenvalues_and_adjoint() {
        for n in [0usize, 2, 5] {
            let phi = example1_phi(n);
            let residual = example1_apply(&phi)
                .unwrap()
                .axpy(Complex64::new(-(n as f64 + 0.5), 0.0), &phi)
                .unwrap()
                .norm()
                / phi.norm();
            assert!(residual < 1e-7, "n={n}: {residual}");
        }
        let f = GridFunction::from_fn(grid(), |x| Complex64::new(1.0, 0.3 * x) * (-0.5 * (x - 0.4).powi(2)).exp()).unwrap();
        let g = GridFunction::from_fn(grid(), |x| Complex64::new(x, -0.2) * (-0.7 * (x + 0.2).powi(2)).exp()).unwrap();
        let lhs = example1_apply(&f).unwrap().inner(&g).unwrap();
        let rhs = f.inner(&example1_adjoint_apply(&g).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn harmonic_limit_of_anharmonic_solver() {
        let states = even_potential_basis(2.0, 10, grid()).unwrap();
        for (n, s) in states.iter().enumerate() {
            assert!((s.energy - (2 * n + 1) as f64).abs() < 1e-8, "n={n}: {}", s.energy);
            let e = hermite(n);
            let overlap = s.function.inner(&e).unwrap().norm();
            assert!((overlap - 1.0).abs() < 1e-8, "n={n}");
        }
        assert!(anharmonic_basis(2.0, 4, grid()).is_err());
    }

    #[test]
    fn quartic_ground_state_self_converges() {
        let coarse = anharmonic_basis(4.0, 4, grid()).unwrap();
        let fine = anharmonic_basis(4.0, 4, Grid::new(14.0, 2048).unwrap()).unwrap();
        let (e0, e0_fine) = (coarse[0].energy, fine[0].energy);
        assert!(((e0 - e0_fine) / e0_fine).abs() < 1e-6);
        // Independent high-precision value for the quartic oscillator.
        assert!((e0 - 1.060_362_090_484_182_9).abs() < 1e-8, "{e0}");
    }

    #[test]
    fn anharmonic_states_alternate_parity_and_are_orthonormal() {
        let states = anharmonic_basis(4.0, 12, grid()).unwrap();
        for (n, s) in states.iter().enumerate() {
            let expected = if n % 2 == 0 { Sign::Positive } else { Sign::Negative };
            assert_eq!(s.parity, expected, "n={n}");
            assert!(s.parity_defect <= 1e-14);
            for (m, t) in states.iter().enumerate() {
                let target = if n == m { 1.0 } else { 0.0 };
                assert!((s.function.inner(&t.function).unwrap() - target).norm() < 1e-12);
            }
        }
        assert!(states.windows(2).all(|w| w[0].energy < w[1].energy));
        assert!(anharmonic_basis(4.0, 41, grid()).is_err());
        assert!(anharmonic_basis(4.0, 0, grid()).is_err());
    }

    #[test]
    fn anharmonic_rejects_coarse_grids() {
        assert!(matches!(
            anharmonic_basis(4.0, 30, Grid::new(3.0, 256).unwrap()),
            Err(Error::GridTooSmall { .. })
        ));
        assert!(matches!(
            anharmonic_basis(4.0, 30, Grid::new(14.0, 64).unwrap()),
            Err(Error::Unresolved(_))
        ));
    }

    fn example1_system(n: usize) -> BiorthogonalSystem {
        BiorthogonalSystem::new("example1", (0..n).map(example1_phi).collect(), (0..n).map(example1_psi).collect()).unwrap()
    }

    fn shifted_system(n: usize, a: f64) -> BiorthogonalSystem {
        BiorthogonalSystem::new(
            "shifted",
            (0..n).map(|k| shifted(k, a)).collect(),
            (0..n).map(|k| shifted(k, -a)).collect(),
        )
        .unwrap()
        .certify_signs(&KreinStructure::parity(), DEFAULT_CERTIFICATION_TOLERANCE)
        .unwrap()
    }

    #[test]
    fn ne1_recovers_example1_spectrum() {
        let system = example1_system(12);
        let lambdas: Vec<_> = (0..12).map(|n| Complex64::new(n as f64 + 0.5, 0.0)).collect();
        let report = build_truncated_ne1(&system, &lambdas).unwrap();
        assert!(report.forward.eigenvalue_defect < 1e-8);
        assert!(report.dual.eigenvalue_defect < 1e-8);
        assert!((report.forward.eigenvalues[0] - 0.5).norm() < 1e-8);
        assert_eq!(report.cross_check.len(), 3);
        assert!(report.cross_check.iter().all(|c| c.defect < 1e-8));
        assert!(report.metric_hermiticity_defect.is_none());
    }

    #[test]
    fn ne1_zero_operator() {
        let system = shifted_system(5, 0.5);
        let zeros = vec![Complex64::new(0.0, 0.0); 5];
        let report = build_truncated_ne1(&system, &zeros).unwrap();
        assert!(report.forward.eigenvalues.iter().all(|v| v.norm() < 1e-14));
        assert!(report.forward.residuals.iter().all(|&r| r == 0.0));
        assert!(matches!(
            build_truncated_ne1(&system, &zeros[..3]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn ne1_matches_shifted_hamiltonian_on_span() {
        let a = 0.5;
        let system = shifted_system(10, a);
        let lambdas: Vec<_> = (0..10).map(|n| Complex64::new((2 * n + 1) as f64 + a * a, 0.0)).collect();
        let op = Ne1Operator::new(&system, &lambdas).unwrap();
        let window = Some(grid().half_width() - 4.0);
        for f in system.phi() {
            let direct = shifted_oscillator_apply(a, f).unwrap();
            let truncated = op.apply(f).unwrap();
            let zero = GridFunction::zeros(*f.grid());
            let scale = direct.max_abs_diff(&zero, window).unwrap();
            assert!(truncated.max_abs_diff(&direct, window).unwrap() < 1e-6 * scale);
        }
        let report = build_truncated_ne1(&system, &lambdas).unwrap();
        assert!(report.metric_hermiticity_defect.unwrap() < 1e-7);
    }

    #[test]
    fn adjoint_pairing_with_conjugated_eigenvalues() {
        let system = shifted_system(8, 0.5);
        let lambdas: Vec<_> = (0..8).map(|n| Complex64::new(n as f64, 0.3 * n as f64 - 1.0)).collect();
        let conj: Vec<_> = lambdas.iter().map(|l| l.conj()).collect();
        let forward = Ne1Operator::new(&system, &lambdas).unwrap();
        let dual = Ne1Operator::new(&system, &conj).unwrap().dual();
        let f = GridFunction::from_fn(grid(), |x| Complex64::new(1.0, x) * (-0.5 * x * x).exp()).unwrap();
        let g = GridFunction::from_fn(grid(), |x| Complex64::new(x * x, -1.0) * (-0.6 * (x - 0.3).powi(2)).exp()).unwrap();
        let lhs = forward.apply(&f).unwrap().inner(&g).unwrap();
        let rhs = f.inner(&dual.apply(&g).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-8);
    }

    #[test]
    fn complex_spectrum_is_recovered() {
        let system = shifted_system(6, 0.25);
        let lambdas: Vec<_> = (0..6).map(|n| Complex64::new(1.0 - n as f64, 0.5 * n as f64)).collect();
        let report = build_truncated_ne1(&system, &lambdas).unwrap();
        assert!(report.forward.eigenvalue_defect < 1e-8);
        let sorted = &report.forward.eigenvalues;
        assert!(sorted.windows(2).all(|w| w[0].re <= w[1].re));
    }
}
