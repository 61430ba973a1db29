//! Quadratic phases `phi(z, x) = a z^2 / 2 + b z x + c x^2 / 2` of
//! Bargmann-type transforms and the weights they induce.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::Decay;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A validated triple `(a, b, c)` with `b != 0` and `Im c > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseParams {
    a: Complex64,
    b: Complex64,
    c: Complex64,
}

impl PhaseParams {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        let finite = [a, b, c]
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite());
        if !finite {
            return Err(Error::param("phase coefficients must be finite"));
        }
        if b.norm() == 0.0 {
            return Err(Error::param("phase coefficient b must be nonzero"));
        }
        if c.im <= 0.0 {
            return Err(Error::param(format!(
                "phase coefficient c must have positive imaginary part, got {c}"
            )));
        }
        Ok(PhaseParams { a, b, c })
    }

    /// `(i/2, -i, i)`: the classical Bargmann transform.
    pub fn standard() -> Self {
        PhaseParams {
            a: Complex64::new(0.0, 0.5),
            b: Complex64::new(0.0, -1.0),
            c: Complex64::new(0.0, 1.0),
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    /// The normalizing constant `2^{-1/2} pi^{-3/4} |b| (Im c)^{-1/4}` of `T`.
    pub fn c_phi(&self) -> f64 {
        2f64.sqrt().recip() * PI.powf(-0.75) * self.b.norm() * self.c.im.powf(-0.25)
    }

    /// Prefactor `|b|^2 / (2 pi Im c)` of the projection kernel `T T*`.
    pub fn c_capital_phi(&self) -> f64 {
        self.b.norm_sqr() / (2.0 * PI * self.c.im)
    }

    /// The alternative prefactor `|b| / (2 pi Im c)`; kept for comparison only.
    pub fn c_capital_phi_modulus(&self) -> f64 {
        self.b.norm() / (2.0 * PI * self.c.im)
    }

    pub fn phase(&self, z: Complex64, x: f64) -> Complex64 {
        0.5 * self.a * z * z + self.b * z * x + 0.5 * self.c * x * x
    }

    /// `Phi(z)` as the quadratic form `xx x^2 + xy x y + yy y^2` in `z = x + i y`.
    pub fn phi_form(&self) -> Decay {
        let k = 1.0 / (4.0 * self.c.im);
        let bb = self.b * self.b;
        let nb = self.b.norm_sqr();
        Decay::new(
            k * (nb - bb.re) - 0.5 * self.a.im,
            2.0 * k * bb.im - self.a.re,
            k * (nb + bb.re) + 0.5 * self.a.im,
        )
    }

    /// `Phi(z)` from the complex expression; the imaginary part is rounding.
    pub fn phi_complex(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        let k = 1.0 / (4.0 * self.c.im);
        let bb = self.b * self.b;
        (self.b * z).norm_sqr() * k
            - (bb * z * z + bb.conj() * zb * zb) * (0.5 * k)
            - (self.a * z * z - self.a.conj() * zb * zb) / (4.0 * I)
    }

    /// The polarization `Psi(z, w)` of `Phi`, with `Psi(z, conj z) = Phi(z)`.
    pub fn psi(&self, z: Complex64, w: Complex64) -> Complex64 {
        let k = 1.0 / (4.0 * self.c.im);
        let bb = self.b * self.b;
        self.b.norm_sqr() * k * z * w
            - (bb * z * z + bb.conj() * w * w) * (0.5 * k)
            - (self.a * z * z - self.a.conj() * w * w) / (4.0 * I)
    }

    /// `T` maps `e^{-gamma x^2 / 2}` (times a polynomial) to `e^{q z^2}` (times
    /// a polynomial) with `q = i a / 2 + b^2 / (2 (i c - gamma))`.
    pub fn forward_gaussian(&self, gamma: Complex64) -> Complex64 {
        0.5 * I * self.a + self.b * self.b / (2.0 * (I * self.c - gamma))
    }

    /// Inverse of [`forward_gaussian`](Self::forward_gaussian): the width
    /// `gamma` of `T* e^{q z^2}`.
    pub fn adjoint_gaussian(&self, q: Complex64) -> Complex64 {
        I * self.c - self.b * self.b / (2.0 * q - I * self.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validation() {
        assert!(PhaseParams::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 1.0)).is_err());
        assert!(PhaseParams::new(c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(PhaseParams::new(c(0.0, 1.0), c(1.0, 0.0), c(1.0, -1.0)).is_err());
        assert!(PhaseParams::new(c(f64::NAN, 1.0), c(1.0, 0.0), c(0.0, 1.0)).is_err());
        assert!(PhaseParams::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1e-3)).is_ok());
    }

    #[test]
    fn standard_phase() {
        let p = PhaseParams::standard();
        let z = c(0.3, -0.7);
        let x = 1.3;
        let expect = c(0.0, 0.25) * z * z - c(0.0, 1.0) * z * x + c(0.0, 0.5) * x * x;
        assert!((p.phase(z, x) - expect).norm() < 1e-15);
        assert_eq!(p.phase(c(0.0, 0.0), 0.0), c(0.0, 0.0));
        assert!((p.c_phi() - 2f64.powf(-0.5) * PI.powf(-0.75)).abs() < 1e-16);
        assert!((p.c_capital_phi() - 1.0 / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn standard_phi_is_quarter_modulus() {
        let p = PhaseParams::standard();
        let f = p.phi_form();
        assert!((f.xx - 0.25).abs() < 1e-16 && f.xy.abs() < 1e-16 && (f.yy - 0.25).abs() < 1e-16);
        let z = c(0.9, 1.7);
        assert!((p.phi_complex(z) - c(z.norm_sqr() / 4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn phi_form_matches_complex_expression() {
        let p = PhaseParams::new(c(0.3, 0.8), c(-1.1, 0.4), c(0.7, 1.9)).unwrap();
        for z in [c(0.1, 0.2), c(-1.3, 0.5), c(2.0, -1.1)] {
            let v = p.phi_complex(z);
            assert!(v.im.abs() < 1e-14);
            assert!((v.re - p.phi_form().eval(z.re, z.im)).abs() < 1e-14);
            assert!((p.psi(z, z.conj()) - v).norm() < 1e-14);
        }
    }

    #[test]
    fn gaussian_maps_are_inverse() {
        let p = PhaseParams::new(c(0.3, 0.8), c(-1.1, 0.4), c(0.7, 1.9)).unwrap();
        let g = c(0.6, 0.1);
        assert!((p.adjoint_gaussian(p.forward_gaussian(g)) - g).norm() < 1e-14);
        // Classical Bargmann: e^{-x^2/2} maps to a constant.
        assert!(PhaseParams::standard().forward_gaussian(c(1.0, 0.0)).norm() < 1e-16);
    }
}
