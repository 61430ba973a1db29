//! Hermite polynomials at complex arguments and the two holomorphic Hermite
//! systems: `psi_n^s` (orthonormal in `X_s`) and the elliptic
//! `Psi_n^{alpha,beta}` (orthogonal in `H_B`).

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::func::{exp_or_zero, safe_ln, PlaneFn};

pub const MAX_HERMITE_DEGREE: usize = 512;
pub const MAX_ELLIPSE_DEGREE: usize = 64;
pub const MAX_ORACLE_DEGREE: usize = 20;

/// Above this degree `psi_n^s` is assembled in the log domain.
const DIRECT_PSI_MAX: usize = 30;

/// `s` in the open interval `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SParam(f64);

impl SParam {
    pub fn new(s: f64) -> Result<Self> {
        if s > 0.0 && s < 1.0 {
            Ok(SParam(s))
        } else {
            Err(Error::param(format!("s must lie in (0, 1), got {s}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SParam {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        SParam::new(s)
    }
}

/// Physicists' Hermite polynomial `H_n(z)` by the three-term recurrence.
pub fn hermite_poly(n: usize, z: Complex64) -> Result<Complex64> {
    check_degree(n, MAX_HERMITE_DEGREE)?;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        if !(cur.re.is_finite() && cur.im.is_finite()) {
            return Err(Error::Overflow(format!("H_{n}({z}) at degree {}", k + 1)));
        }
    }
    Ok(cur)
}

/// `ln H_n(z)` (some branch), from a rescaled recurrence that never overflows.
pub fn ln_hermite_poly(n: usize, z: Complex64) -> Result<Complex64> {
    check_degree(n, MAX_HERMITE_DEGREE)?;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    let mut ln_scale = 0.0;
    for k in 0..n {
        let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        let m = cur.norm();
        if m > 1e100 {
            cur /= m;
            prev /= m;
            ln_scale += m.ln();
        }
        if !(cur.re.is_finite() && cur.im.is_finite()) {
            return Err(Error::Overflow(format!("ln H_{n}({z})")));
        }
    }
    Ok(safe_ln(cur) + ln_scale)
}

fn check_degree(n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::param(format!(
            "degree {n} exceeds the supported maximum {max}"
        )))
    } else {
        Ok(())
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// The squared norm `b_nn(s)` of `e^{-z^2/2} H_n(z)` in `X_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteNormalization {
    pub n: usize,
    pub s: SParam,
    pub b_nn: f64,
}

impl HermiteNormalization {
    pub fn new(n: usize, s: SParam) -> Self {
        HermiteNormalization {
            n,
            s,
            b_nn: ln_b_nn(n, s).exp(),
        }
    }
}

/// `ln b_nn(s) = ln(pi sqrt(s) / (1 - s)) + n ln(2 (1 + s) / (1 - s)) + ln n!`.
pub fn ln_b_nn(n: usize, s: SParam) -> f64 {
    let s = s.value();
    (PI * s.sqrt() / (1.0 - s)).ln()
        + n as f64 * (LN_2 + ((1.0 + s) / (1.0 - s)).ln())
        + ln_factorial(n)
}

/// `psi_n^s(z) = b_nn(s)^{-1/2} e^{-z^2/2} H_n(z)`.
pub fn psi_s(n: usize, s: SParam, z: Complex64) -> Result<Complex64> {
    if n <= DIRECT_PSI_MAX {
        let h = hermite_poly(n, z)?;
        return Ok(h * (-0.5 * z * z - 0.5 * ln_b_nn(n, s)).exp());
    }
    Ok(exp_or_zero(ln_psi_s(n, s, z)?))
}

/// `ln psi_n^s(z)`, finite wherever `psi_n^s(z) != 0`.
pub fn ln_psi_s(n: usize, s: SParam, z: Complex64) -> Result<Complex64> {
    Ok(ln_hermite_poly(n, z)? - 0.5 * z * z - 0.5 * ln_b_nn(n, s))
}

/// `psi_n^s` as a function handle carrying its logarithm.
pub fn psi_s_fn(n: usize, s: SParam) -> Result<PlaneFn> {
    check_degree(n, MAX_HERMITE_DEGREE)?;
    Ok(PlaneFn::with_log(
        move |z| psi_s(n, s, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        move |z| ln_psi_s(n, s, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
    ))
}

/// Parameters `(alpha, beta)` of the elliptic disks, with the derived
/// `mu`, `lambda` and the coefficients of `zeta = c1 z + c2 conj(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseParams {
    pub alpha: f64,
    pub beta: f64,
    pub mu: Complex64,
    pub lambda: Complex64,
    pub zeta_coeffs: (Complex64, Complex64),
}

pub fn ellipse_params(alpha: f64, beta: f64) -> Result<EllipseParams> {
    if !(alpha > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::param(format!(
            "ellipse parameters need alpha > 0 and finite beta, got ({alpha}, {beta})"
        )));
    }
    if alpha == 1.0 && beta == 0.0 {
        return Err(Error::param("(alpha, beta) = (1, 0) is the circular case"));
    }
    let r2 = alpha * alpha + beta * beta;
    let mu = Complex64::new(1.0 - r2, 2.0 * beta) / (1.0 + r2);
    let lambda = 2.0 * alpha * alpha / ((1.0 + r2) * Complex64::new(1.0 - r2, -2.0 * beta));
    let zeta_coeffs = (
        Complex64::new(alpha + 1.0, beta) / 2.0,
        Complex64::new(alpha - 1.0, beta) / 2.0,
    );
    Ok(EllipseParams {
        alpha,
        beta,
        mu,
        lambda,
        zeta_coeffs,
    })
}

impl EllipseParams {
    /// `1 + alpha^2 + beta^2`.
    pub fn radius_scale(&self) -> f64 {
        1.0 + self.alpha * self.alpha + self.beta * self.beta
    }
}

/// `zeta = alpha x + i (beta x + xi)` for `z = x + i xi`.
pub fn zeta_map(p: &EllipseParams, z: Complex64) -> Complex64 {
    p.zeta_coeffs.0 * z + p.zeta_coeffs.1 * z.conj()
}

/// `Psi_0(z) = exp(mu z^2 / 4)`.
pub fn psi0_ellipse(p: &EllipseParams, z: Complex64) -> Complex64 {
    (p.mu * z * z / 4.0).exp()
}

/// `Psi_n(z) = e^{lambda z^2 / 2} (d/dz)^n e^{-lambda z^2 / 2} Psi_0(z)`, in the
/// closed form `(-k)^n H_n(k z) Psi_0(z)` with `k` the principal root of
/// `lambda / 2`.
pub fn psi_n_ellipse(n: usize, p: &EllipseParams, z: Complex64) -> Result<Complex64> {
    psi_n_ellipse_with_root(n, p, z, (p.lambda / 2.0).sqrt())
}

/// [`psi_n_ellipse`] with an explicit square root `k` of `lambda / 2`.
/// Either root gives the same value.
pub fn psi_n_ellipse_with_root(
    n: usize,
    p: &EllipseParams,
    z: Complex64,
    k: Complex64,
) -> Result<Complex64> {
    check_degree(n, MAX_ELLIPSE_DEGREE)?;
    let v = (-k).powu(n as u32) * hermite_poly(n, k * z)? * psi0_ellipse(p, z);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("Psi_{n}({z})")))
    }
}

/// `ln Psi_n(z)`.
pub fn ln_psi_n_ellipse(n: usize, p: &EllipseParams, z: Complex64) -> Result<Complex64> {
    check_degree(n, MAX_ELLIPSE_DEGREE)?;
    let k = (p.lambda / 2.0).sqrt();
    Ok(n as f64 * safe_ln(-k) + ln_hermite_poly(n, k * z)? + p.mu * z * z / 4.0)
}

pub fn psi_n_ellipse_fn(n: usize, p: EllipseParams) -> Result<PlaneFn> {
    check_degree(n, MAX_ELLIPSE_DEGREE)?;
    Ok(PlaneFn::with_log(
        move |z| psi_n_ellipse(n, &p, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        move |z| ln_psi_n_ellipse(n, &p, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
    ))
}

/// The normalized Hermite function `h_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) e^{-x^2/2}`.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut h0 = PI.powf(-0.25) * (-x * x / 2.0).exp();
    let mut h1 = 0.0;
    for k in 0..n {
        let k = k as f64;
        let h2 = (2.0 / (k + 1.0)).sqrt() * x * h0 - (k / (k + 1.0)).sqrt() * h1;
        h1 = h0;
        h0 = h2;
    }
    h0
}

/// `e^{lambda z^2 / 2} (d/dz)^n e^{-lambda z^2 / 2}` by the Cauchy integral
/// formula on a circle about `z` (trapezoid rule, `64 (n + 1)` points).
///
/// The radius is `max(1, sqrt(n / |lambda|))`, near the saddle point of the
/// Cauchy integrand, so cancellation stays mild when `|lambda|` is small.
pub fn rodrigues_oracle(n: usize, lambda: Complex64, z: Complex64) -> Result<Complex64> {
    let radius = (n as f64 / lambda.norm()).sqrt().max(1.0);
    rodrigues_oracle_with_radius(n, lambda, z, radius)
}

pub fn rodrigues_oracle_with_radius(
    n: usize,
    lambda: Complex64,
    z: Complex64,
    radius: f64,
) -> Result<Complex64> {
    check_degree(n, MAX_ORACLE_DEGREE)?;
    if radius <= 0.0 || !radius.is_finite() {
        return Err(Error::param(format!(
            "contour radius must be positive, got {radius}"
        )));
    }
    let m = 64 * (n + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..m {
        let theta = 2.0 * PI * k as f64 / m as f64;
        let u = Complex64::from_polar(radius, theta);
        let w = z + u;
        // f(w) / f(z) with f = e^{-lambda w^2 / 2}, times e^{-i n theta}
        acc += (-0.5 * lambda * (w * w - z * z)).exp()
            * Complex64::from_polar(1.0, -(n as f64) * theta);
    }
    Ok(acc * ((ln_factorial(n) - n as f64 * radius.ln()).exp() / m as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let rule = crate::quadrature::gauss_hermite_rule(60).unwrap();
        for m in 0..8 {
            for n in 0..8 {
                // h_m h_n e^{x^2} is a polynomial times e^{-x^2}
                let v: f64 = rule
                    .nodes()
                    .iter()
                    .zip(rule.weights())
                    .map(|(&x, &w)| {
                        w * hermite_function(m, x) * hermite_function(n, x) * (x * x).exp()
                    })
                    .sum();
                let expect = if m == n { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-13, "{m} {n}: {v}");
            }
        }
        let x = 0.7;
        let h3 =
            (8.0 * x * x * x - 12.0 * x) / (8.0 * 6.0 * PI.sqrt()).sqrt() * (-x * x / 2.0).exp();
        assert!((hermite_function(3, x) - h3).abs() < 1e-15);
    }

    #[test]
    fn s_param_range() {
        assert!(SParam::new(0.0).is_err());
        assert!(SParam::new(1.0).is_err());
        assert!(SParam::new(f64::NAN).is_err());
        assert_eq!(SParam::new(0.5).unwrap().value(), 0.5);
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_poly(0, c(3.0, -2.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(hermite_poly(3, c(2.0, 0.0)).unwrap(), c(40.0, 0.0));
        assert_eq!(hermite_poly(5, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(hermite_poly(513, c(0.0, 0.0)).is_err());
        // H_4(z) = 16 z^4 - 48 z^2 + 12 at z = i: 16 + 48 + 12
        assert_eq!(hermite_poly(4, c(0.0, 1.0)).unwrap(), c(76.0, 0.0));
    }

    #[test]
    fn hermite_overflow_is_reported() {
        assert!(matches!(
            hermite_poly(512, c(1e3, 0.0)),
            Err(Error::Overflow(_))
        ));
        assert!(ln_hermite_poly(512, c(1e3, 0.0)).unwrap().re.is_finite());
    }

    #[test]
    fn log_hermite_agrees() {
        for n in [0, 1, 7, 20, 40] {
            let z = c(0.7, -0.4);
            let direct = hermite_poly(n, z).unwrap();
            let via_log = ln_hermite_poly(n, z).unwrap().exp();
            assert!((direct - via_log).norm() <= 1e-13 * direct.norm());
        }
    }

    #[test]
    fn psi_zero_at_origin() {
        let s = SParam::new(0.25).unwrap();
        let v = psi_s(0, s, c(0.0, 0.0)).unwrap();
        assert!((v.re - (0.75 / (PI * 0.5)).sqrt()).abs() < 1e-15);
        assert!((v.re - 0.6909882989).abs() < 1e-10);
        assert_eq!(psi_s(1, s, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn psi_direct_and_log_routes_agree() {
        let s = SParam::new(0.6).unwrap();
        for n in [0, 5, 30] {
            let z = c(0.4, 0.9);
            let direct = psi_s(n, s, z).unwrap();
            let via_log = ln_psi_s(n, s, z).unwrap().exp();
            assert!((direct - via_log).norm() <= 1e-12 * direct.norm());
        }
        assert!(psi_s(200, s, c(0.5, 0.5)).unwrap().norm().is_finite());
    }

    #[test]
    fn ellipse_examples() {
        let s: f64 = 0.3;
        let p = ellipse_params(s.sqrt(), 0.0).unwrap();
        assert!((p.mu - c((1.0 - s) / (1.0 + s), 0.0)).norm() < 1e-15);
        assert!((p.lambda - c(2.0 * s / (1.0 - s * s), 0.0)).norm() < 1e-15);

        let p = ellipse_params(0.5f64.sqrt(), 0.0).unwrap();
        assert!((p.mu - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((p.lambda - c(4.0 / 3.0, 0.0)).norm() < 1e-15);

        // (1, 1): mu = (-1 + 2i) / 3, lambda = 2 / (3 (-1 - 2i)) = (-2 + 4i) / 15
        let p = ellipse_params(1.0, 1.0).unwrap();
        assert!((p.mu - c(-1.0, 2.0) / 3.0).norm() < 1e-15);
        assert!((p.lambda - c(-2.0, 4.0) / 15.0).norm() < 1e-15);

        assert!(ellipse_params(1.0, 0.0).is_err());
        assert!(ellipse_params(0.0, 0.3).is_err());
        assert!(ellipse_params(-1.0, 0.3).is_err());
    }

    #[test]
    fn zeta_examples() {
        let p = ellipse_params(0.5, 0.0).unwrap();
        assert!((zeta_map(&p, c(1.0, 0.0)) - c(0.5, 0.0)).norm() < 1e-16);
        let p = ellipse_params(0.8, 0.4).unwrap();
        assert!((zeta_map(&p, c(0.0, 1.0)) - c(0.0, 1.0)).norm() < 1e-16);
        let p = ellipse_params(0.5, 0.3).unwrap();
        assert!((zeta_map(&p, c(1.0, 2.0)) - c(0.5, 2.3)).norm() < 1e-15);
    }

    #[test]
    fn psi0_examples() {
        let p = ellipse_params(0.8, 0.4).unwrap();
        assert_eq!(psi0_ellipse(&p, c(0.0, 0.0)), c(1.0, 0.0));
        let s: f64 = 0.4;
        let p = ellipse_params(s.sqrt(), 0.0).unwrap();
        let x = 1.7;
        let expect = ((1.0 - s) * x * x / (4.0 * (1.0 + s))).exp();
        assert!((psi0_ellipse(&p, c(x, 0.0)).re - expect).abs() < 1e-15 * expect);
    }

    #[test]
    fn psi_n_low_orders() {
        let p = ellipse_params(0.8, 0.4).unwrap();
        let z = c(0.3, -1.1);
        assert!((psi_n_ellipse(0, &p, z).unwrap() - psi0_ellipse(&p, z)).norm() < 1e-15);
        let one = psi_n_ellipse(1, &p, z).unwrap();
        assert!((one + p.lambda * z * psi0_ellipse(&p, z)).norm() < 1e-15);
    }

    #[test]
    fn oracle_low_orders() {
        let lambda = c(0.2, 0.83);
        let z = c(0.4, -0.3);
        assert!((rodrigues_oracle(0, lambda, z).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        assert!((rodrigues_oracle(1, lambda, z).unwrap() + lambda * z).norm() < 1e-12);
        let two = lambda * lambda * z * z - lambda;
        assert!((rodrigues_oracle(2, lambda, z).unwrap() - two).norm() < 1e-11);
        assert!(rodrigues_oracle(21, lambda, z).is_err());
    }

    #[test]
    fn hermite_matches_rodrigues_on_real_line() {
        // H_n(x) = (-1)^n e^{x^2} (d/dx)^n e^{-x^2}: the oracle with lambda = 2.
        for n in 0..=10 {
            for x in [-1.3, 0.0, 0.45, 1.9] {
                let h = hermite_poly(n, c(x, 0.0)).unwrap();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let o = sign * rodrigues_oracle(n, c(2.0, 0.0), c(x, 0.0)).unwrap();
                assert!((h - o).norm() <= 1e-10 * h.norm().max(1.0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn psi_n_matches_oracle_at_sample() {
        let p = ellipse_params(0.5f64.sqrt(), 0.0).unwrap();
        let z = c(0.7, 0.2);
        for n in 0..=6 {
            let closed = psi_n_ellipse(n, &p, z).unwrap();
            let oracle = rodrigues_oracle(n, p.lambda, z).unwrap() * psi0_ellipse(&p, z);
            assert!((closed - oracle).norm() <= 1e-10 * closed.norm(), "n={n}");
        }
    }
}
