//! Special functions shared by every family: normalized Hermite functions,
//! Gauss–Hermite quadrature, terminating hypergeometric series and the
//! closed-form indefinite Gram entry of the Gaussian-deformed oscillator basis.

use std::f64::consts::{LN_2, PI, SQRT_2};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest Hermite order accepted by [`hermite_function`].
pub const MAX_HERMITE_ORDER: usize = 500;

/// Largest number of Gauss–Hermite nodes accepted by [`gauss_hermite_rule`].
pub const MAX_QUADRATURE_NODES: usize = 400;

/// Largest order accepted by [`indefinite_gram_closed_form`].
pub const MAX_CLOSED_FORM_ORDER: usize = 60;

const OVERFLOW_GUARD: f64 = 1e300;
const NEWTON_TOLERANCE: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// π^{-1/4}
pub const PI_POW_MINUS_QUARTER: f64 = 0.751_125_544_464_942_5;

/// Normalized Hermite function e_n(z) = (2^n n! √π)^{-1/2} H_n(z) e^{-z²/2}.
pub fn hermite_function(n: usize, z: Complex64) -> Result<Complex64> {
    let values = hermite_functions(n, z)?;
    Ok(values[n])
}

/// e_0(z), …, e_n(z) from the normalized three-term recurrence
///
/// e_{k+1} = z √(2/(k+1)) e_k − √(k/(k+1)) e_{k−1},
///
/// which never forms H_k or k! and so stays finite far beyond the range
/// where the polynomial route overflows.
pub fn hermite_functions(n: usize, z: Complex64) -> Result<Vec<Complex64>> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Hermite order {n} exceeds {MAX_HERMITE_ORDER}"
        )));
    }
    let mut out = Vec::with_capacity(n + 1);
    let e0 = PI_POW_MINUS_QUARTER * (-0.5 * z * z).exp();
    check_magnitude(0, e0)?;
    out.push(e0);
    if n == 0 {
        return Ok(out);
    }
    let mut prev = e0;
    let mut cur = SQRT_2 * z * e0;
    check_magnitude(1, cur)?;
    out.push(cur);
    for k in 1..n {
        let kf = k as f64;
        let next = z * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        check_magnitude(k + 1, next)?;
        out.push(next);
        prev = cur;
        cur = next;
    }
    Ok(out)
}

/// Real-argument variant of [`hermite_functions`].
pub fn hermite_functions_real(n: usize, x: f64) -> Result<Vec<f64>> {
    Ok(hermite_functions(n, Complex64::new(x, 0.0))?
        .into_iter()
        .map(|v| v.re)
        .collect())
}

fn check_magnitude(order: usize, value: Complex64) -> Result<()> {
    let magnitude = value.norm();
    if !magnitude.is_finite() || magnitude > OVERFLOW_GUARD {
        return Err(Error::HermiteOverflow { order, magnitude });
    }
    Ok(())
}

/// K-point Gauss–Hermite rule for ∫ f(x) e^{-x²} dx.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    /// Roots of H_K, strictly increasing and symmetric about zero.
    pub nodes: Vec<f64>,
    /// Classical weights; Σ wᵢ p(xᵢ) = ∫ p(x) e^{-x²} dx for deg p ≤ 2K−1.
    pub weights: Vec<f64>,
    /// wᵢ e^{xᵢ²}, for integrands that already carry their Gaussian decay.
    pub scaled_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ wᵢ f(xᵢ) ≈ ∫ f(x) e^{-x²} dx.
    pub fn integrate_weighted<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Σ wᵢ e^{xᵢ²} f(xᵢ) ≈ ∫ f(x) dx for Gaussian-decaying f.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Newton iteration on the normalized Hermite recurrence.
pub fn gauss_hermite_rule(k: usize) -> Result<QuadratureRule> {
    if k == 0 || k > MAX_QUADRATURE_NODES {
        return Err(Error::InvalidArgument(format!(
            "quadrature size {k} outside 1..={MAX_QUADRATURE_NODES}"
        )));
    }
    let kf = k as f64;
    let half = k.div_ceil(2);
    // Starting values from the symmetric Jacobi matrix, polished by Newton.
    let jacobi = nalgebra::DMatrix::from_fn(k, k, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut guesses: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    guesses.sort_by(|a, b| b.total_cmp(a));
    // Positive roots, largest first.
    let mut roots: Vec<f64> = Vec::with_capacity(half);
    let mut scaled: Vec<f64> = Vec::with_capacity(half);
    for (i, &guess) in guesses.iter().take(half).enumerate() {
        let mut z = guess;
        if k % 2 == 1 && i == half - 1 {
            z = 0.0;
        } else {
            for _ in 0..NEWTON_MAX_ITER {
                let (ek, ekm1) = top_two_hermite(k, z);
                let step = ek / ((2.0 * kf).sqrt() * ekm1);
                z -= step;
                if step.abs() <= NEWTON_TOLERANCE * z.abs().max(1.0) {
                    break;
                }
            }
        }
        let (_, ekm1) = top_two_hermite(k, z);
        roots.push(z);
        scaled.push(1.0 / (kf * ekm1 * ekm1));
    }

    let mut nodes = Vec::with_capacity(k);
    let mut scaled_weights = Vec::with_capacity(k);
    for (&x, &w) in roots.iter().zip(&scaled) {
        nodes.push(-x);
        scaled_weights.push(w);
    }
    let mirror_start = if k % 2 == 1 { half - 1 } else { half };
    for i in (0..mirror_start).rev() {
        nodes.push(roots[i]);
        scaled_weights.push(scaled[i]);
    }
    if k % 2 == 1 {
        nodes[half - 1] = 0.0;
    }
    let weights = nodes
        .iter()
        .zip(&scaled_weights)
        .map(|(&x, &w)| w * (-x * x).exp())
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        scaled_weights,
    })
}

/// (e_k(x), e_{k−1}(x)) for real x, k ≥ 1.
fn top_two_hermite(k: usize, x: f64) -> (f64, f64) {
    let mut prev = PI_POW_MINUS_QUARTER * (-0.5 * x * x).exp();
    let mut cur = SQRT_2 * x * prev;
    for j in 1..k {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Σ_{k=0}^{m} (−m)_k (b)_k / ((c)_k k!) z^k, summed left to right with
/// incremental Pochhammer updates.
pub fn hyp2f1_terminating(m: usize, b: f64, c: f64, z: f64) -> Result<f64> {
    let mf = m as f64;
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..m {
        let kf = k as f64;
        let ck = c + kf;
        if ck == 0.0 {
            return Err(Error::VanishingPochhammer { c, k: k + 1 });
        }
        term *= (kf - mf) * (b + kf) / (ck * (kf + 1.0)) * z;
        sum += term;
    }
    Ok(sum)
}

/// Same series in exact rational arithmetic; `None` if a Pochhammer factor of
/// c vanishes.
fn hyp2f1_terminating_exact(
    m: usize,
    b: &BigRational,
    c: &BigRational,
    z: &BigRational,
) -> Option<BigRational> {
    let mut sum = BigRational::from_integer(BigInt::from(1));
    let mut term = sum.clone();
    for k in 0..m {
        let kq = BigRational::from_integer(BigInt::from(k));
        let ck = c + &kq;
        if ck.is_zero() {
            return None;
        }
        let minus_m = BigRational::from_integer(BigInt::from(k) - BigInt::from(m));
        let k1 = BigRational::from_integer(BigInt::from(k + 1));
        term = term * minus_m * (b + &kq) * z / (ck * k1);
        sum += &term;
    }
    Some(sum)
}

/// |[φₙ, φₘ]| for φₙ = eₙ e^{-x²/4} under parity:
///
/// √(2^{n+m+1} / (3^{n+m+1} π n! m!)) Γ((n+m+1)/2) |₂F₁(−m, −n; (1−m−n)/2; 3/2)|.
///
/// The prefactor is evaluated in log-space. The alternating series at
/// z = 3/2 cancels by many orders of magnitude for large orders, so it is
/// summed exactly in rationals before rounding.
pub fn indefinite_gram_closed_form(n: usize, m: usize) -> Result<f64> {
    if n > MAX_CLOSED_FORM_ORDER || m > MAX_CLOSED_FORM_ORDER {
        return Err(Error::InvalidArgument(format!(
            "closed-form Gram entry supports orders up to {MAX_CLOSED_FORM_ORDER}, got ({n}, {m})"
        )));
    }
    if (n + m) % 2 == 1 {
        return Ok(0.0);
    }
    let s = (n + m) as f64;
    let log_prefactor = 0.5
        * ((s + 1.0) * (LN_2 - 3f64.ln())
            - PI.ln()
            - libm::lgamma(n as f64 + 1.0)
            - libm::lgamma(m as f64 + 1.0))
        + libm::lgamma(0.5 * (s + 1.0));
    let b = BigRational::from_integer(-BigInt::from(n));
    let c = BigRational::new(BigInt::from(1) - BigInt::from(n + m), BigInt::from(2));
    let z = BigRational::new(BigInt::from(3), BigInt::from(2));
    let series = hyp2f1_terminating_exact(m, &b, &c, &z)
        .and_then(|v| v.to_f64())
        .ok_or_else(|| Error::InvalidArgument(format!("series undefined at ({n}, {m})")))?;
    Ok((log_prefactor.exp() * series).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Integer coefficients of H_n (physicists'), lowest degree first.
    fn hermite_coefficients(n: usize) -> Vec<i128> {
        let mut prev = vec![1i128];
        if n == 0 {
            return prev;
        }
        let mut cur = vec![0i128, 2];
        for k in 1..n {
            let mut next = vec![0i128; k + 2];
            for (i, &a) in cur.iter().enumerate() {
                next[i + 1] += 2 * a;
            }
            for (i, &a) in prev.iter().enumerate() {
                next[i] -= 2 * k as i128 * a;
            }
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Explicit-polynomial oracle: value and a magnitude scale Σ|c_k||z|^k
    /// (times the same prefactor) bounding the cancellation in the sum.
    fn polynomial_oracle(n: usize, z: Complex64) -> (Complex64, f64) {
        let coeffs = hermite_coefficients(n);
        let mut value = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (k, &a) in coeffs.iter().enumerate() {
            value += a as f64 * z.powu(k as u32);
            scale += (a as f64).abs() * z.norm().powi(k as i32);
        }
        let log_norm = 0.5 * (n as f64 * LN_2 + libm::lgamma(n as f64 + 1.0) + 0.5 * PI.ln());
        let prefactor = (-0.5 * z * z).exp() * (-log_norm).exp();
        (value * prefactor, scale * prefactor.norm())
    }

    #[test]
    fn ground_state_at_origin() {
        let v = hermite_function(0, c(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.re, PI.powf(-0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(v.re, 0.751_125_544_4, epsilon = 1e-10);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn odd_order_vanishes_at_origin() {
        assert_eq!(hermite_function(1, c(0.0, 0.0)).unwrap().norm(), 0.0);
        assert_eq!(hermite_function(7, c(0.0, 0.0)).unwrap().norm(), 0.0);
    }

    #[test]
    fn complex_argument_matches_polynomial_and_extended_precision() {
        let z = c(0.7, 0.3);
        let v = hermite_function(5, z).unwrap();
        let (oracle, _) = polynomial_oracle(5, z);
        assert!((v - oracle).norm() < 1e-13 * oracle.norm());
        // 40-digit reference.
        let reference = c(0.493_960_547_390_783_84, -0.337_355_215_197_919_53);
        assert!((v - reference).norm() < 1e-13);
    }

    #[test]
    fn frozen_extended_precision_table() {
        // (n, z, e_n(z)) from 40-digit evaluation of the Hermite polynomial.
        let table = [
            (3, c(1.5, 0.0), c(0.316_776_627_187_735_05, 0.0)),
            (10, c(2.0, -1.0), c(11.692_085_618_660_150, -4.539_453_790_653_039)),
            (20, c(4.5, 1.5), c(-89.949_199_937_728_425, -184.637_546_051_995_48)),
            (15, c(-3.2, 2.0), c(-1_803.041_110_622_934, -1_533.316_407_897_526)),
            (40, c(6.0, 0.0), c(0.257_243_247_759_044_86, 0.0)),
            (12, c(0.3, 0.5), c(0.145_360_986_967_665_66, -2.151_658_747_387_210_8)),
        ];
        for (n, z, reference) in table {
            let v = hermite_function(n, z).unwrap();
            let rel = (v - reference).norm() / reference.norm();
            assert!(rel < 1e-10, "n={n} z={z}: {v} vs {reference} (rel {rel:e})");
        }
    }

    #[test]
    fn real_argument_values_are_real_and_bounded() {
        for &x in &[-12.0, -3.3, -0.1, 0.0, 0.7, 5.5, 20.0] {
            let values = hermite_functions_real(200, x).unwrap();
            for v in values {
                assert!(v.abs() <= 1.1);
            }
            let complex = hermite_functions(200, c(x, 0.0)).unwrap();
            assert!(complex.iter().all(|v| v.im == 0.0));
        }
    }

    #[test]
    fn overflow_guard_reports_order() {
        match hermite_function(500, c(0.0, 40.0)) {
            Err(Error::HermiteOverflow { .. }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
        assert!(matches!(
            hermite_function(501, c(0.0, 0.0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    proptest! {
        #[test]
        fn recurrence_matches_explicit_polynomial(
            n in 0usize..=20,
            re in -5.0f64..5.0,
            im in -2.0f64..2.0,
        ) {
            let z = c(re, im);
            prop_assume!(z.norm() <= 5.0);
            let v = hermite_function(n, z).unwrap();
            let (oracle, scale) = polynomial_oracle(n, z);
            let tol = 1e-10 * oracle.norm() + 1e-14 * scale;
            prop_assert!((v - oracle).norm() <= tol, "n={} z={} v={} oracle={}", n, z, v, oracle);
        }
    }

    #[test]
    fn one_point_rule() {
        let rule = gauss_hermite_rule(1).unwrap();
        assert_eq!(rule.nodes, vec![0.0]);
        assert_abs_diff_eq!(rule.weights[0], PI.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn two_point_rule_matches_moment_equations() {
        let rule = gauss_hermite_rule(2).unwrap();
        // Roots of 4x² − 2 and equal weights from the degree ≤ 3 moments.
        assert_abs_diff_eq!(rule.nodes[0], -0.707_106_781_186_547_5, epsilon = 1e-15);
        assert_abs_diff_eq!(rule.nodes[1], 0.707_106_781_186_547_5, epsilon = 1e-15);
        for w in &rule.weights {
            assert_abs_diff_eq!(*w, 0.886_226_925_452_758, epsilon = 1e-15);
        }
    }

    #[test]
    fn twenty_point_rule_integrates_fourth_moment() {
        let rule = gauss_hermite_rule(20).unwrap();
        let value = rule.integrate_weighted(|x| x.powi(4));
        assert_abs_diff_eq!(value, 0.75 * PI.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn rules_are_symmetric_positive_and_normalized() {
        for k in [1, 2, 3, 7, 20, 64, 101, 200, 300, 400] {
            let rule = gauss_hermite_rule(k).unwrap();
            assert_eq!(rule.len(), k);
            for i in 0..k {
                assert_eq!(rule.nodes[i], -rule.nodes[k - 1 - i], "K={k}");
                assert!(rule.scaled_weights[i] > 0.0);
                if k <= 300 {
                    assert!(rule.weights[i] > 0.0, "K={k} i={i}");
                }
            }
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]), "K={k}");
            let total: f64 = rule.weights.iter().sum();
            assert!((total - PI.sqrt()).abs() < 1e-12 * PI.sqrt(), "K={k}: {total}");
        }
        assert!(gauss_hermite_rule(0).is_err());
        assert!(gauss_hermite_rule(401).is_err());
    }

    #[test]
    fn exact_on_polynomials_up_to_degree_2k_minus_1() {
        let k = 12;
        let rule = gauss_hermite_rule(k).unwrap();
        for d in 0..2 * k {
            let exact = if d % 2 == 1 {
                0.0
            } else {
                libm::tgamma((d as f64 + 1.0) / 2.0)
            };
            let value = rule.integrate_weighted(|x| x.powi(d as i32));
            let scale = rule.integrate_weighted(|x| x.abs().powi(d as i32));
            assert!(
                (value - exact).abs() <= 1e-13 * scale,
                "degree {d}: {value} vs {exact}"
            );
        }
    }

    #[test]
    fn hermite_functions_orthonormal_under_quadrature() {
        let rule = gauss_hermite_rule(64).unwrap();
        let table: Vec<Vec<f64>> = rule
            .nodes
            .iter()
            .map(|&x| hermite_functions_real(40, x).unwrap())
            .collect();
        for n in 0..=40 {
            for m in 0..=40 {
                let value: f64 = table
                    .iter()
                    .zip(&rule.scaled_weights)
                    .map(|(row, w)| w * row[n] * row[m])
                    .sum();
                let expected = if n == m { 1.0 } else { 0.0 };
                assert!((value - expected).abs() < 1e-10, "({n},{m}): {value}");
            }
        }
    }

    #[test]
    fn hypergeometric_examples() {
        assert_eq!(hyp2f1_terminating(0, 3.0, -0.5, 1.5).unwrap(), 1.0);
        assert_eq!(hyp2f1_terminating(0, 7.0, 2.5, -4.0).unwrap(), 1.0);
        assert_eq!(hyp2f1_terminating(2, 0.0, -0.5, 1.5).unwrap(), 1.0);
        // 1 + 6 − 18 by hand.
        assert_abs_diff_eq!(hyp2f1_terminating(2, 1.0, -0.5, 1.5).unwrap(), -11.0, epsilon = 1e-13);
        // Sign of the second upper parameter matters.
        assert_abs_diff_eq!(hyp2f1_terminating(1, 1.0, -0.5, 1.5).unwrap(), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hyp2f1_terminating(1, -1.0, -0.5, 1.5).unwrap(), -2.0, epsilon = 1e-14);
    }

    #[test]
    fn vanishing_pochhammer_is_an_error() {
        assert!(matches!(
            hyp2f1_terminating(3, 1.0, -1.0, 0.5),
            Err(Error::VanishingPochhammer { k: 2, .. })
        ));
        assert!(matches!(
            hyp2f1_terminating(1, 1.0, 0.0, 0.5),
            Err(Error::VanishingPochhammer { k: 1, .. })
        ));
    }

    #[test]
    fn exact_and_floating_series_agree_for_small_orders() {
        let three_halves = BigRational::new(BigInt::from(3), BigInt::from(2));
        for n in 0..12usize {
            for m in 0..12usize {
                if (n + m) % 2 == 1 {
                    continue;
                }
                let cf = (1.0 - (n + m) as f64) / 2.0;
                let float = hyp2f1_terminating(m, -(n as f64), cf, 1.5).unwrap();
                let b = BigRational::from_integer(-BigInt::from(n));
                let cq = BigRational::new(BigInt::from(1) - BigInt::from(n + m), BigInt::from(2));
                let exact = hyp2f1_terminating_exact(m, &b, &cq, &three_halves)
                    .unwrap()
                    .to_f64()
                    .unwrap();
                assert!((float - exact).abs() <= 1e-9 * exact.abs().max(1.0), "({n},{m})");
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(indefinite_gram_closed_form(0, 1).unwrap(), 0.0);
        // π^{-1/2} ∫ e^{-3x²/2} dx
        assert_abs_diff_eq!(indefinite_gram_closed_form(0, 0).unwrap(), (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(indefinite_gram_closed_form(0, 0).unwrap(), 0.816_496_6, epsilon = 1e-7);
        // (8π)^{-1/2} |∫ (4x² − 2) e^{-3x²/2} dx|
        assert_abs_diff_eq!(
            indefinite_gram_closed_form(0, 2).unwrap(),
            1.0 / (3.0 * 3f64.sqrt()),
            epsilon = 1e-15
        );
        assert!(indefinite_gram_closed_form(61, 1).is_err());
    }

    #[test]
    fn closed_form_vanishes_exactly_for_odd_total_order() {
        for n in 0..=MAX_CLOSED_FORM_ORDER {
            for m in 0..=MAX_CLOSED_FORM_ORDER {
                let v = indefinite_gram_closed_form(n, m).unwrap();
                if (n + m) % 2 == 1 {
                    assert_eq!(v, 0.0);
                } else {
                    assert!(v > 0.0, "({n},{m})");
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        // ∫ eₙ eₘ e^{-x²/2} dx = s ∫ p̃ₙ(sy) p̃ₘ(sy) e^{-y²} dy with s = √(2/3),
        // p̃ₖ = eₖ e^{x²/2}; exact for the rule size used here.
        let rule = gauss_hermite_rule(40).unwrap();
        let s = (2.0f64 / 3.0).sqrt();
        let table: Vec<Vec<f64>> = rule
            .nodes
            .iter()
            .map(|&y| {
                let x = s * y;
                hermite_functions_real(30, x)
                    .unwrap()
                    .into_iter()
                    .map(|v| v * (0.5 * x * x).exp())
                    .collect()
            })
            .collect();
        for n in 0..=30usize {
            for m in 0..=(30 - n) {
                let quad: f64 = s * table
                    .iter()
                    .zip(&rule.weights)
                    .map(|(row, w)| w * row[n] * row[m])
                    .sum::<f64>();
                let closed = indefinite_gram_closed_form(n, m).unwrap();
                assert!((quad.abs() - closed).abs() < 1e-8, "({n},{m}): {quad} vs {closed}");
            }
        }
    }

    #[test]
    fn closed_form_is_symmetric_and_stable_at_high_order() {
        for (n, m) in [(3, 5), (20, 20), (7, 13), (44, 16)] {
            assert_eq!(
                indefinite_gram_closed_form(n, m).unwrap(),
                indefinite_gram_closed_form(m, n).unwrap()
            );
        }
        // 40-digit reference values.
        assert_abs_diff_eq!(indefinite_gram_closed_form(1, 1).unwrap(), 0.544_331_053_951_817_36, epsilon = 1e-15);
        assert_abs_diff_eq!(indefinite_gram_closed_form(20, 20).unwrap(), 0.126_200_392_616_340_01, epsilon = 1e-14);
        assert_abs_diff_eq!(indefinite_gram_closed_form(60, 60).unwrap(), 0.072_839_174_057_878_738, epsilon = 1e-13);
    }
}
