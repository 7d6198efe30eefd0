//! Orthonormal coordinates for the span of a finite list of grid functions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

#[derive(Clone, Debug)]
pub struct SpanBasis {
    grid: Grid,
    basis: Vec<GridFunction>,
    coords: DMatrix<Complex64>,
    gram_condition: f64,
}

impl SpanBasis {
    /// Householder QR of the sampled matrix √h [f₀ … f_{N−1}]; the Gram
    /// condition number is reported as cond(R)².
    pub fn new(funcs: &[GridFunction]) -> Result<Self> {
        let first = funcs
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty span".into()))?;
        let grid = *first.grid();
        if funcs.iter().any(|f| *f.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        let m = grid.points();
        let n = funcs.len();
        if n > m {
            return Err(Error::RankDeficientSpan {
                condition: f64::INFINITY,
            });
        }
        let sqrt_h = grid.spacing().sqrt();
        let a = DMatrix::from_fn(m, n, |k, j| funcs[j].samples()[k] * sqrt_h);
        let qr = a.qr();
        let q = qr.q();
        let r = qr.r();
        let singular = r.clone().singular_values();
        let smax = singular.max();
        let smin = singular.min();
        let gram_condition = if smin > 0.0 {
            (smax / smin).powi(2)
        } else {
            f64::INFINITY
        };
        let basis = (0..n)
            .map(|j| {
                GridFunction::new(grid, q.column(j).iter().map(|v| v / sqrt_h).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            basis,
            coords: r,
            gram_condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn basis(&self) -> &[GridFunction] {
        &self.basis
    }

    /// Column n holds the coordinates of the n-th spanning function.
    pub fn coords(&self) -> &DMatrix<Complex64> {
        &self.coords
    }

    pub fn gram_condition(&self) -> f64 {
        self.gram_condition
    }

    /// (⟨f, u_i⟩)_i
    pub fn project(&self, f: &GridFunction) -> Result<DVector<Complex64>> {
        let values = self
            .basis
            .iter()
            .map(|u| f.inner(u))
            .collect::<Result<Vec<_>>>()?;
        Ok(DVector::from_vec(values))
    }

    /// Σ c_i u_i
    pub fn synthesize(&self, coords: &DVector<Complex64>) -> Result<GridFunction> {
        GridFunction::linear_combination(self.grid, coords.as_slice(), &self.basis)
    }

    /// Matrix with entries ⟨op(u_j), u_i⟩.
    pub fn compress<F>(&self, op: F) -> Result<DMatrix<Complex64>>
    where
        F: Fn(&GridFunction) -> Result<GridFunction> + Sync,
    {
        let images = self
            .basis
            .par_iter()
            .map(&op)
            .collect::<Result<Vec<_>>>()?;
        self.project_all(&images)
    }

    /// Matrix whose column j holds the coordinates ⟨g_j, u_i⟩.
    pub fn project_all(&self, funcs: &[GridFunction]) -> Result<DMatrix<Complex64>> {
        let columns = funcs
            .par_iter()
            .map(|g| self.project(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_fn(self.dim(), funcs.len(), |i, j| columns[j][i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hermite_functions_real;

    #[test]
    fn qr_coordinates_reproduce_inputs() {
        let grid = Grid::new(10.0, 256).unwrap();
        let funcs: Vec<GridFunction> = (0..6)
            .map(|n| {
                GridFunction::from_fn(grid, |x| {
                    let e = hermite_functions_real(6, x).unwrap();
                    Complex64::new(e[n] + 0.3 * e[(n + 1) % 6], 0.1 * x * e[n])
                })
                .unwrap()
            })
            .collect();
        let span = SpanBasis::new(&funcs).unwrap();
        for (i, ui) in span.basis().iter().enumerate() {
            for (j, uj) in span.basis().iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ui.inner(uj).unwrap() - expected).norm() < 1e-13);
            }
        }
        for (n, f) in funcs.iter().enumerate() {
            let back = span.synthesize(&span.coords().column(n).into_owned()).unwrap();
            assert!(back.max_abs_diff(f, None).unwrap() < 1e-13);
            let projected = span.project(f).unwrap();
            assert!((projected - span.coords().column(n)).norm() < 1e-13);
        }
        assert!(span.gram_condition() >= 1.0);
    }

    #[test]
    fn dependent_functions_have_huge_condition() {
        let grid = Grid::new(8.0, 128).unwrap();
        let f = GridFunction::from_real_fn(grid, |x| (-x * x).exp()).unwrap();
        let g = f.scaled(Complex64::new(2.0, 0.0));
        let span = SpanBasis::new(&[f, g]).unwrap();
        assert!(span.gram_condition() > 1e20);
    }
}
