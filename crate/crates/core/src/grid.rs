//! Uniform symmetric grids on [-L, L] and complex samples on them.
//!
//! Nodes sit at cell midpoints, x_k = (k − M/2 + 1/2) h, so the node set is
//! closed under negation and parity is an exact index reversal. Inner products
//! are plain Riemann sums, which are spectrally accurate for smooth integrands
//! that have decayed at ±L.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative spectral floor used when applying exponentially growing symbols.
pub const DEFAULT_SPECTRAL_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    points: usize,
}

impl Grid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "grid half-width must be positive, got {half_width}"
            )));
        }
        if points < 2 || !points.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "grid point count must be a positive even integer, got {points}"
            )));
        }
        Ok(Self { half_width, points })
    }

    /// L = 14, M = 1024: e₄₀ is below 1e-15 at |x| = 14.
    pub fn desk_default() -> Self {
        Self {
            half_width: 14.0,
            points: 1024,
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        // Odd integer times h/2, so x_{M−1−k} = −x_k exactly.
        (2 * k as i64 + 1 - self.points as i64) as f64 * (0.5 * self.spacing())
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.node(k)).collect()
    }

    /// Frequency of FFT bin `q`, mapped into j ∈ [−M/2, M/2).
    pub fn frequency_of_bin(&self, q: usize) -> f64 {
        let m = self.points as i64;
        let j = if (q as i64) < m / 2 { q as i64 } else { q as i64 - m };
        2.0 * PI * j as f64 / (self.points as f64 * self.spacing())
    }

    /// Discrete frequencies ξ_j = 2πj/(Mh), j = −M/2 … M/2−1, ascending.
    pub fn frequencies(&self) -> Vec<f64> {
        let m = self.points as i64;
        let dxi = 2.0 * PI / (self.points as f64 * self.spacing());
        (-m / 2..m / 2).map(|j| j as f64 * dxi).collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={} M={}", self.half_width, self.points)
    }
}

/// Complex samples of a function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.points() {
            return Err(Error::LengthMismatch {
                expected: grid.points(),
                found: samples.len(),
            });
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "sample",
                index,
            });
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Grid, f: F) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(grid: Grid, f: F) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// h Σ f(x_k) conj(g(x_k)); linear in the first argument.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.same_grid(other)?;
        let sum: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(sum * self.grid.spacing())
    }

    pub fn norm(&self) -> f64 {
        (self.grid.spacing() * self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// (Pf)(x) = f(−x).
    pub fn parity(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self {
            grid: self.grid,
            samples,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|v| v * factor).collect(),
        }
    }

    /// self + factor · other
    pub fn axpy(&self, factor: Complex64, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + factor * b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// Σ cₙ fₙ over functions sharing `grid`.
    pub fn linear_combination(grid: Grid, coeffs: &[Complex64], funcs: &[Self]) -> Result<Self> {
        if coeffs.len() > funcs.len() {
            return Err(Error::LengthMismatch {
                expected: funcs.len(),
                found: coeffs.len(),
            });
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.points()];
        for (c, f) in coeffs.iter().zip(funcs) {
            if f.grid != grid {
                return Err(Error::GridMismatch);
            }
            for (a, v) in acc.iter_mut().zip(&f.samples) {
                *a += c * v;
            }
        }
        Ok(Self { grid, samples: acc })
    }

    /// max_k |f(x_k) − g(x_k)| over nodes with |x_k| ≤ window (all nodes
    /// when `window` is `None`).
    pub fn max_abs_diff(&self, other: &Self, window: Option<f64>) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .enumerate()
            .filter(|(k, _)| window.is_none_or(|w| self.grid.node(*k).abs() <= w))
            .map(|(_, (a, b))| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest sample magnitude at the two outermost nodes.
    pub fn edge_magnitude(&self) -> f64 {
        self.samples[0].norm().max(self.samples[self.samples.len() - 1].norm())
    }

    /// CSV with a `# grid L=<L> M=<M>` header line and columns x, re, im.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# grid L={} M={}", self.grid.half_width(), self.grid.points())?;
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["x", "re", "im"])?;
        for (k, v) in self.samples.iter().enumerate() {
            writer.write_record([
                format!("{:.17e}", self.grid.node(k)),
                format!("{:.17e}", v.re),
                format!("{:.17e}", v.im),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self> {
        let mut header = String::new();
        input.read_line(&mut header)?;
        let grid = parse_grid_header(&header)?;
        let mut reader = csv::Reader::from_reader(input);
        let mut samples = Vec::with_capacity(grid.points());
        for record in reader.records() {
            let record = record?;
            if record.len() != 3 {
                return Err(Error::Parse(format!("expected 3 columns, got {}", record.len())));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
            };
            samples.push(Complex64::new(parse(&record[1])?, parse(&record[2])?));
        }
        Self::new(grid, samples)
    }
}

fn parse_grid_header(line: &str) -> Result<Grid> {
    let body = line
        .trim()
        .strip_prefix("# grid")
        .ok_or_else(|| Error::Parse(format!("missing grid header: {line:?}")))?;
    let mut half_width = None;
    let mut points = None;
    for token in body.split_whitespace() {
        match token.split_once('=') {
            Some(("L", v)) => half_width = v.parse::<f64>().ok(),
            Some(("M", v)) => points = v.parse::<usize>().ok(),
            _ => return Err(Error::Parse(format!("unexpected header token {token:?}"))),
        }
    }
    match (half_width, points) {
        (Some(l), Some(m)) => Grid::new(l, m),
        _ => Err(Error::Parse(format!("incomplete grid header: {line:?}"))),
    }
}

/// ⟨f, g⟩ as a Riemann sum.
pub fn inner(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    f.inner(g)
}

pub fn parity_apply(f: &GridFunction) -> GridFunction {
    f.parity()
}

/// Pointwise product with `weight`.
pub fn multiply_apply<W: Fn(f64) -> Complex64>(f: &GridFunction, weight: W) -> Result<GridFunction> {
    let grid = *f.grid();
    let mut samples = Vec::with_capacity(grid.points());
    for (k, v) in f.samples().iter().enumerate() {
        let w = weight(grid.node(k));
        if !w.is_finite() {
            return Err(Error::NonFinite { what: "weight", index: k });
        }
        samples.push(v * w);
    }
    GridFunction::new(grid, samples)
}

/// Real-weight convenience wrapper around [`multiply_apply`].
pub fn multiply_real<W: Fn(f64) -> f64>(f: &GridFunction, weight: W) -> Result<GridFunction> {
    multiply_apply(f, |x| Complex64::new(weight(x), 0.0))
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buffer: &mut [Complex64], inverse: bool) {
    PLANNER.with(|planner| {
        let mut planner = planner.borrow_mut();
        let plan = if inverse {
            planner.plan_fft_inverse(buffer.len())
        } else {
            planner.plan_fft_forward(buffer.len())
        };
        plan.process(buffer);
    });
}

/// Samples of the continuum transform (1/√(2π)) ∫ e^{-ixξ} f(x) dx at the
/// discrete frequencies, ascending from −π/h.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub grid: Grid,
    pub frequencies: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl Spectrum {
    /// Σ F(ξ_j) conj(G(ξ_j)) Δξ.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let dxi = 2.0 * PI / (self.grid.points() as f64 * self.grid.spacing());
        let sum: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(sum * dxi)
    }
}

/// Discrete analogue of the unitary Fourier transform, with the h/√(2π)
/// scaling and the e^{-i x_0 ξ} phase of the offset node layout.
pub fn forward_transform(f: &GridFunction) -> Spectrum {
    let grid = *f.grid();
    let m = grid.points();
    let h = grid.spacing();
    let x0 = grid.node(0);
    let mut buffer = f.samples().to_vec();
    fft_in_place(&mut buffer, false);
    let scale = h / (2.0 * PI).sqrt();
    let frequencies = grid.frequencies();
    let values = frequencies
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let q = (i + m / 2) % m;
            buffer[q] * Complex64::from_polar(scale, -x0 * xi)
        })
        .collect();
    Spectrum {
        grid,
        frequencies,
        values,
    }
}

pub fn inverse_transform(spectrum: &Spectrum) -> Result<GridFunction> {
    let grid = spectrum.grid;
    let m = grid.points();
    let h = grid.spacing();
    let x0 = grid.node(0);
    let mut buffer = vec![Complex64::new(0.0, 0.0); m];
    let scale = (2.0 * PI).sqrt() / (h * m as f64);
    for (i, (&xi, v)) in spectrum.frequencies.iter().zip(&spectrum.values).enumerate() {
        let q = (i + m / 2) % m;
        buffer[q] = v * Complex64::from_polar(scale, x0 * xi);
    }
    fft_in_place(&mut buffer, true);
    GridFunction::new(grid, buffer)
}

/// F⁻¹[symbol(ξ) · F f].
///
/// The continuum normalization and node-offset phases cancel between F and
/// F⁻¹, so the multiplier acts directly on FFT bins.
pub fn fourier_multiplier_apply<S: Fn(f64) -> Complex64>(
    f: &GridFunction,
    symbol: S,
) -> Result<GridFunction> {
    apply_multiplier(f, symbol, None)
}

/// [`fourier_multiplier_apply`] with modes whose magnitude is below
/// `floor · max|F f|` zeroed first. Needed for growing symbols such as
/// e^{−aξ}, which otherwise amplify round-off in the far spectrum by up to
/// e^{a π/h}.
pub fn fourier_multiplier_apply_with_floor<S: Fn(f64) -> Complex64>(
    f: &GridFunction,
    symbol: S,
    floor: f64,
) -> Result<GridFunction> {
    apply_multiplier(f, symbol, Some(floor))
}

fn apply_multiplier<S: Fn(f64) -> Complex64>(
    f: &GridFunction,
    symbol: S,
    floor: Option<f64>,
) -> Result<GridFunction> {
    let grid = *f.grid();
    let m = grid.points();
    let mut buffer = f.samples().to_vec();
    fft_in_place(&mut buffer, false);
    let cutoff = floor.map(|fl| fl * buffer.iter().map(|v| v.norm()).fold(0.0, f64::max));
    for (q, v) in buffer.iter_mut().enumerate() {
        if cutoff.is_some_and(|c| v.norm() < c) {
            *v = Complex64::new(0.0, 0.0);
            continue;
        }
        let s = symbol(grid.frequency_of_bin(q));
        if !s.is_finite() {
            return Err(Error::NonFinite { what: "symbol", index: q });
        }
        *v *= s / m as f64;
    }
    fft_in_place(&mut buffer, true);
    GridFunction::new(grid, buffer)
}

/// Spectral first derivative (symbol iξ).
pub fn derivative(f: &GridFunction) -> Result<GridFunction> {
    fourier_multiplier_apply(f, |xi| Complex64::new(0.0, xi))
}

/// Spectral second derivative (symbol −ξ²).
pub fn second_derivative(f: &GridFunction) -> Result<GridFunction> {
    fourier_multiplier_apply(f, |xi| Complex64::new(-xi * xi, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{hermite_function, hermite_functions_real};
    use proptest::prelude::*;

    fn hermite(grid: Grid, n: usize) -> GridFunction {
        GridFunction::from_real_fn(grid, |x| hermite_functions_real(n, x).unwrap()[n]).unwrap()
    }

    fn small_grid() -> Grid {
        Grid::new(12.0, 512).unwrap()
    }

    #[test]
    fn grid_layout_is_symmetric() {
        let grid = Grid::desk_default();
        let m = grid.points();
        for k in 0..m {
            assert_eq!(grid.node(k), -grid.node(m - 1 - k));
        }
        assert_eq!(grid.spacing() * m as f64, 2.0 * grid.half_width());
        assert!(Grid::new(1.0, 7).is_err());
        assert!(Grid::new(1.0, 0).is_err());
        assert!(Grid::new(-1.0, 8).is_err());
        assert!(Grid::new(f64::NAN, 8).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let grid = small_grid();
        let e0 = hermite(grid, 0);
        let e1 = hermite(grid, 1);
        let e3 = hermite(grid, 3);
        assert!((e0.inner(&e0).unwrap() - 1.0).norm() < 1e-10);
        assert!(e0.inner(&e1).unwrap().norm() < 1e-12);
        assert!((e3.inner(&e3).unwrap() - 1.0).norm() < 1e-10);
        let other = hermite(Grid::new(12.0, 256).unwrap(), 0);
        assert!(matches!(e0.inner(&other), Err(Error::GridMismatch)));
    }

    #[test]
    fn riemann_sum_converges_as_window_grows() {
        // Doubling L at fixed h: both sums agree with the exact value 1.
        let h = 28.0 / 1024.0;
        for n in [0usize, 10, 25, 40] {
            let a = Grid::new(14.0, 1024).unwrap();
            let b = Grid::new(28.0, 2048).unwrap();
            assert_eq!(a.spacing(), h);
            let va = hermite(a, n).inner(&hermite(a, n)).unwrap();
            let vb = hermite(b, n).inner(&hermite(b, n)).unwrap();
            assert!((va - vb).norm() < 1e-12, "n={n}");
            assert!((vb - 1.0).norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn parity_examples() {
        let grid = small_grid();
        let gauss = GridFunction::from_real_fn(grid, |x| (-0.5 * x * x).exp()).unwrap();
        assert_eq!(parity_apply(&gauss), gauss);
        let e1 = hermite(grid, 1);
        assert_eq!(parity_apply(&e1), e1.scaled(Complex64::new(-1.0, 0.0)));
    }

    proptest! {
        #[test]
        fn parity_is_an_exact_involution(values in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 16)) {
            let grid = Grid::new(3.0, 16).unwrap();
            let f = GridFunction::new(grid, values.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap();
            prop_assert_eq!(parity_apply(&parity_apply(&f)), f);
        }
    }

    #[test]
    fn identity_multiplier_returns_input() {
        let grid = small_grid();
        let f = GridFunction::from_fn(grid, |x| Complex64::new((-x * x).exp(), x * (-0.3 * x * x).exp())).unwrap();
        let g = fourier_multiplier_apply(&f, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(g.max_abs_diff(&f, None).unwrap() < 1e-12);
    }

    #[test]
    fn derivative_of_ground_state() {
        let grid = small_grid();
        let e0 = hermite(grid, 0);
        let d = derivative(&e0).unwrap();
        let exact = multiply_real(&e0, |x| -x).unwrap();
        assert!(d.max_abs_diff(&exact, None).unwrap() < 1e-8);
    }

    #[test]
    fn growing_symbol_realizes_complex_shift() {
        let grid = small_grid();
        let a = 0.4;
        let e2 = hermite(grid, 2);
        let shifted = fourier_multiplier_apply_with_floor(&e2, |xi| Complex64::new((-a * xi).exp(), 0.0), DEFAULT_SPECTRAL_FLOOR).unwrap();
        let exact = GridFunction::from_fn(grid, |x| hermite_function(2, Complex64::new(x, a)).unwrap()).unwrap();
        let window = grid.half_width() - 4.0;
        let err = shifted.max_abs_diff(&exact, Some(window)).unwrap();
        assert!(err < 1e-8, "err = {err:e}");
    }

    #[test]
    fn non_finite_symbol_and_weight_are_rejected() {
        let grid = small_grid();
        let e0 = hermite(grid, 0);
        assert!(matches!(
            fourier_multiplier_apply(&e0, |_| Complex64::new(f64::INFINITY, 0.0)),
            Err(Error::NonFinite { what: "symbol", .. })
        ));
        assert!(matches!(
            multiply_real(&e0, |x| if x > 0.0 { f64::NAN } else { 1.0 }),
            Err(Error::NonFinite { what: "weight", .. })
        ));
    }

    #[test]
    fn transform_of_hermite_function_is_an_eigenfunction() {
        // F eₙ = (−i)ⁿ eₙ checks the scaling and the offset phase.
        let grid = Grid::desk_default();
        for n in [0usize, 1, 2, 5, 9] {
            let spectrum = forward_transform(&hermite(grid, n));
            let phase = Complex64::new(0.0, -1.0).powu(n as u32);
            for (xi, v) in spectrum.frequencies.iter().zip(&spectrum.values) {
                let exact = phase * hermite_functions_real(n, *xi).unwrap()[n];
                assert!((v - exact).norm() < 1e-12, "n={n} xi={xi}");
            }
            let back = inverse_transform(&spectrum).unwrap();
            assert!(back.max_abs_diff(&hermite(grid, n), None).unwrap() < 1e-13);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn transform_is_unitary(
            ca in proptest::collection::vec(-1.0f64..1.0, 8),
            cb in proptest::collection::vec(-1.0f64..1.0, 8),
        ) {
            let grid = Grid::new(10.0, 256).unwrap();
            let build = |c: &[f64]| GridFunction::from_fn(grid, |x| {
                let e = hermite_functions_real(7, x).unwrap();
                Complex64::new(c[0] * e[0] + c[2] * e[2] + c[4] * e[4] + c[6] * e[6], c[1] * e[1] + c[3] * e[3] + c[5] * e[5] + c[7] * e[7])
            }).unwrap();
            let (f, g) = (build(&ca), build(&cb));
            let lhs = forward_transform(&f).inner(&forward_transform(&g)).unwrap();
            let rhs = f.inner(&g).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * f.norm().max(1e-300) * g.norm().max(1e-300) + 1e-15);
        }
    }

    #[test]
    fn parity_anticommutes_with_shift_generator() {
        // P e^{-aξ}(D) = e^{+aξ}(D) P on test functions.
        let grid = Grid::desk_default();
        let a = 0.5;
        let f = GridFunction::from_fn(grid, |x| Complex64::new((-(x - 0.7).powi(2)).exp(), 0.3 * x * (-0.5 * x * x).exp())).unwrap();
        let lhs = parity_apply(&fourier_multiplier_apply_with_floor(&f, |xi| Complex64::new((-a * xi).exp(), 0.0), DEFAULT_SPECTRAL_FLOOR).unwrap());
        let rhs = fourier_multiplier_apply_with_floor(&parity_apply(&f), |xi| Complex64::new((a * xi).exp(), 0.0), DEFAULT_SPECTRAL_FLOOR).unwrap();
        assert!(lhs.max_abs_diff(&rhs, None).unwrap() < 1e-10);
    }

    #[test]
    fn multiplication_examples() {
        let grid = small_grid();
        let e0 = hermite(grid, 0);
        assert_eq!(multiply_real(&e0, |_| 1.0).unwrap(), e0);
        let phi0 = multiply_real(&e0, |x| (-0.25 * x * x).exp()).unwrap();
        let expected = GridFunction::from_real_fn(grid, |x| PI.powf(-0.25) * (-0.75 * x * x).exp()).unwrap();
        assert!(phi0.max_abs_diff(&expected, None).unwrap() < 1e-12);
        let psi0 = multiply_real(&e0, |x| (0.25 * x * x).exp()).unwrap();
        let expected = GridFunction::from_real_fn(grid, |x| PI.powf(-0.25) * (-0.25 * x * x).exp()).unwrap();
        assert!(psi0.max_abs_diff(&expected, None).unwrap() < 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let grid = Grid::new(3.5, 8).unwrap();
        let f = GridFunction::from_fn(grid, |x| Complex64::new(x.sin(), (x * 0.3).exp())).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# grid L=3.5 M=8\nx,re,im\n"));
        let back = GridFunction::read_csv(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, f);
        assert!(GridFunction::read_csv(std::io::Cursor::new(b"x,re,im\n".to_vec())).is_err());
    }
}
