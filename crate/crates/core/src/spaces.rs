//! Weighted measures on `C`, inner products, Gram matrices and the
//! reproducing / projection kernels of `X_s`, `H_B` and `H_Phi`.
//!
//! Kernels conjugate their second argument: `K(z, w)` stands for the customary
//! `K(z, conj w)` expression, so that `K(z, w) = conj K(w, z)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::func::{exp_or_zero, PlaneFn};
use crate::hermite::{psi_s, SParam};
use crate::phase::PhaseParams;
use crate::quadrature::{envelope_for, Decay, GaussianEnvelope, PlanarGrid};

/// Which weighted measure `e^{E(z)} L(dz)` a computation lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    Xs(SParam),
    StandardBargmann,
    PhiWeight(PhaseParams),
}

impl WeightSpec {
    /// `E(z)`.
    pub fn exponent(&self, z: Complex64) -> f64 {
        -self.decay().eval(z.re, z.im)
    }

    /// `-E` as a quadratic form. For `X_s` this is `-s x^2 + y^2 / s`.
    pub fn decay(&self) -> Decay {
        match self {
            WeightSpec::Xs(s) => {
                let s = s.value();
                Decay::axes(-s, 1.0 / s)
            }
            WeightSpec::StandardBargmann => Decay::axes(0.5, 0.5),
            WeightSpec::PhiWeight(p) => 2.0 * p.phi_form(),
        }
    }
}

/// `E(z)` computed from the defining complex expression of each weight.
pub fn weight_exponent(spec: &WeightSpec, z: Complex64) -> f64 {
    match spec {
        WeightSpec::Xs(s) => {
            let s = s.value();
            let zz = z * z;
            -(1.0 - s * s) / (2.0 * s) * z.norm_sqr()
                + (1.0 + s * s) / (4.0 * s) * (zz + zz.conj()).re
        }
        WeightSpec::StandardBargmann => -0.5 * z.norm_sqr(),
        WeightSpec::PhiWeight(p) => -2.0 * p.phi_complex(z).re,
    }
}

/// `Phi(z)`; fails if the defining expression is not real to rounding.
pub fn phi_weight(p: &PhaseParams, z: Complex64) -> Result<f64> {
    let v = p.phi_complex(z);
    if v.im.abs() >= 1e-10 * v.re.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "Phi({z}) has imaginary part {:.3e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// `Psi(z, w)` for the phase `p`.
pub fn psi_kernel(p: &PhaseParams, z: Complex64, w: Complex64) -> Complex64 {
    p.psi(z, w)
}

/// The grid for integrating against `spec` an integrand whose modulus
/// decays like `extra_decay`.
pub fn grid_for(
    spec: &WeightSpec,
    extra_decay: impl Into<Decay>,
    nodes: usize,
) -> Result<PlanarGrid> {
    PlanarGrid::with_nodes(nodes, envelope_for(spec, extra_decay)?)
}

/// `(f, g) = integral of f conj(g) e^{E}`. `decay_hint` is the decay of `f conj(g)`.
pub fn inner_product(
    f: &PlaneFn,
    g: &PlaneFn,
    spec: &WeightSpec,
    decay_hint: impl Into<Decay>,
    nodes: usize,
) -> Result<Complex64> {
    let grid = grid_for(spec, decay_hint, nodes)?;
    inner_product_on(f, g, spec, &grid)
}

pub fn inner_product_on(
    f: &PlaneFn,
    g: &PlaneFn,
    spec: &WeightSpec,
    grid: &PlanarGrid,
) -> Result<Complex64> {
    let values =
        grid.sample(|z| exp_or_zero(f.ln_eval(z) + g.ln_eval(z).conj() + spec.exponent(z)));
    grid.weighted_sum(&values)
}

/// Gram matrix of a finite family.
#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub dimension: usize,
    /// Row-major, `matrix[m][n] = (f_m, f_n)`.
    pub matrix: Vec<Vec<Complex64>>,
    pub max_off_diagonal: f64,
    /// Largest off-diagonal entry relative to `sqrt(G_mm G_nn)`.
    pub max_relative_off_diagonal: f64,
    /// `max |G_nn - 1|`.
    pub max_diagonal_deviation: f64,
    /// `max |G - I|`.
    pub max_identity_deviation: f64,
    /// `max |G_mn - conj(G_nm)|`.
    pub hermitian_defect: f64,
}

impl GramReport {
    pub fn from_matrix(matrix: Vec<Vec<Complex64>>) -> Self {
        let n = matrix.len();
        let mut report = GramReport {
            dimension: n,
            matrix,
            max_off_diagonal: 0.0,
            max_relative_off_diagonal: 0.0,
            max_diagonal_deviation: 0.0,
            max_identity_deviation: 0.0,
            hermitian_defect: 0.0,
        };
        let g = &report.matrix;
        let (mut off, mut rel, mut diag, mut id, mut herm) =
            (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for i in 0..n {
            for j in 0..n {
                let v = g[i][j];
                herm = herm.max((v - g[j][i].conj()).norm());
                if i == j {
                    let d = (v - 1.0).norm();
                    diag = diag.max(d);
                    id = id.max(d);
                } else {
                    off = off.max(v.norm());
                    id = id.max(v.norm());
                    let scale = (g[i][i].norm() * g[j][j].norm()).sqrt();
                    rel = rel.max(v.norm() / scale);
                }
            }
        }
        report.max_off_diagonal = off;
        report.max_relative_off_diagonal = rel;
        report.max_diagonal_deviation = diag;
        report.max_identity_deviation = id;
        report.hermitian_defect = herm;
        report
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dimension).map(|i| self.matrix[i][i]).collect()
    }
}

/// `G_mn = (f_m, f_n)` for `0 <= m, n < count`. `decay_hint` is the decay of
/// `f_m conj(f_n)` (all pairs).
pub fn gram_matrix<F>(
    family: F,
    count: usize,
    spec: &WeightSpec,
    decay_hint: impl Into<Decay>,
    nodes: usize,
) -> Result<GramReport>
where
    F: Fn(usize) -> Result<PlaneFn>,
{
    let grid = grid_for(spec, decay_hint, nodes)?;
    gram_matrix_on(family, count, spec, &grid)
}

/// [`gram_matrix`] on a given grid. Each member is sampled once as
/// `f_m e^{E/2}`, which makes the result exactly Hermitian.
pub fn gram_matrix_on<F>(
    family: F,
    count: usize,
    spec: &WeightSpec,
    grid: &PlanarGrid,
) -> Result<GramReport>
where
    F: Fn(usize) -> Result<PlaneFn>,
{
    let mut samples = Vec::with_capacity(count);
    for m in 0..count {
        let f = family(m)?;
        samples.push(grid.sample(|z| exp_or_zero(f.ln_eval(z) + 0.5 * spec.exponent(z))));
    }
    gram_from_samples(&samples, grid)
}

/// Gram matrix of functions given by their half-weighted samples on `grid`.
pub fn gram_from_samples(samples: &[Vec<Complex64>], grid: &PlanarGrid) -> Result<GramReport> {
    let count = samples.len();
    let mut matrix = vec![vec![Complex64::new(0.0, 0.0); count]; count];
    let mut products = vec![Complex64::new(0.0, 0.0); grid.len()];
    for m in 0..count {
        for n in m..count {
            for (k, p) in products.iter_mut().enumerate() {
                *p = samples[m][k] * samples[n][k].conj();
            }
            let v = grid.weighted_sum(&products)?;
            matrix[m][n] = v;
            matrix[n][m] = v.conj();
        }
    }
    Ok(GramReport::from_matrix(matrix))
}

/// An integral kernel `K(z, w)` given through its logarithm, together with the
/// Gaussian profile of `w -> |K(z, w)|` that quadrature needs.
pub trait Kernel: Send + Sync {
    /// `ln K(z, w)`.
    fn ln_eval(&self, z: Complex64, w: Complex64) -> Complex64;

    fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        exp_or_zero(self.ln_eval(z, w))
    }

    /// `ln |K(z, w)| = -d(w) + l . (Re w, Im w) + const`: returns `(d, l)`.
    fn profile(&self, z: Complex64) -> (Decay, [f64; 2]);
}

/// `K(z, w) = exp(ln_pref + cross z conj(w) + zz z^2 + ww conj(w)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel {
    pub ln_pref: Complex64,
    pub cross: Complex64,
    pub zz: Complex64,
    pub ww: Complex64,
}

impl GaussianKernel {
    pub fn prefactor(&self) -> Complex64 {
        self.ln_pref.exp()
    }

    /// The same kernel with its prefactor multiplied by `factor > 0`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.ln_pref += factor.ln();
        self
    }

    /// The reproducing kernel of `X_s`,
    /// `(1 - s^2)/(2 pi s) exp((1 - s^2)/(2s) z conj(w) - (1 + s^2)/(4s) (z^2 + conj(w)^2))`.
    pub fn k_s(s: SParam) -> Self {
        let s = s.value();
        let q = -(1.0 + s * s) / (4.0 * s);
        GaussianKernel {
            ln_pref: Complex64::new(((1.0 - s * s) / (2.0 * PI * s)).ln(), 0.0),
            cross: Complex64::new((1.0 - s * s) / (2.0 * s), 0.0),
            zz: Complex64::new(q, 0.0),
            ww: Complex64::new(q, 0.0),
        }
    }

    /// `e^{z conj(w) / 2} / (2 pi)`, the kernel of the projection onto `H_B`.
    pub fn projection_b() -> Self {
        GaussianKernel {
            ln_pref: Complex64::new(-(2.0 * PI).ln(), 0.0),
            cross: Complex64::new(0.5, 0.0),
            zz: Complex64::new(0.0, 0.0),
            ww: Complex64::new(0.0, 0.0),
        }
    }

    /// `C_Phi e^{2 Psi(z, conj w)}` with `C_Phi = |b|^2 / (2 pi Im c)`.
    pub fn phi_projection(p: &PhaseParams) -> Self {
        Self::phi_projection_with_prefactor(p, p.c_capital_phi())
    }

    pub fn phi_projection_with_prefactor(p: &PhaseParams, prefactor: f64) -> Self {
        let k = 1.0 / (4.0 * p.c().im);
        let i = Complex64::new(0.0, 1.0);
        let (a, b) = (p.a(), p.b());
        GaussianKernel {
            ln_pref: Complex64::new(prefactor.ln(), 0.0),
            cross: Complex64::new(2.0 * k * b.norm_sqr(), 0.0),
            zz: -k * b * b - a / (2.0 * i),
            ww: -k * (b * b).conj() + a.conj() / (2.0 * i),
        }
    }
}

impl Kernel for GaussianKernel {
    #[inline]
    fn ln_eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        let wb = w.conj();
        self.ln_pref + self.cross * z * wb + self.zz * z * z + self.ww * wb * wb
    }

    fn profile(&self, z: Complex64) -> (Decay, [f64; 2]) {
        let l = self.cross * z;
        (Decay::antiholomorphic_gaussian(self.ww), [l.re, l.im])
    }
}

/// `K_s(z, w)`.
pub fn k_s_kernel(s: SParam, z: Complex64, w: Complex64) -> Complex64 {
    GaussianKernel::k_s(s).eval(z, w)
}

/// `e^{z conj(w) / 2} / (2 pi)`.
pub fn projection_kernel_b(z: Complex64, w: Complex64) -> Complex64 {
    GaussianKernel::projection_b().eval(z, w)
}

/// `sum_{n <= count} psi_n^s(z) conj(psi_n^s(w))`.
pub fn mehler_partial_sum(
    s: SParam,
    count: usize,
    z: Complex64,
    w: Complex64,
) -> Result<Complex64> {
    if count > 64 {
        return Err(Error::param(format!(
            "Mehler partial sums are limited to N <= 64, got {count}"
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..=count {
        acc += psi_s(n, s, z)? * psi_s(n, s, w)?.conj();
    }
    if acc.re.is_finite() && acc.im.is_finite() {
        Ok(acc)
    } else {
        Err(Error::Overflow(format!("Mehler sum at ({z}, {w})")))
    }
}

/// Total decay and linear coefficients of `w -> K(z, w) F(w) e^{E(w)}`.
fn kernel_integrand_profile(
    kernel: &dyn Kernel,
    spec: &WeightSpec,
    f_decay: Decay,
    z: Complex64,
) -> (Decay, [f64; 2]) {
    let (kd, lin) = kernel.profile(z);
    (kd + spec.decay() + f_decay, lin)
}

/// `integral of K(z, w) F(w) e^{E(w)} L(dw)`. `decay_hint` is the decay of `F`.
pub fn apply_kernel(
    kernel: &dyn Kernel,
    spec: &WeightSpec,
    f: &PlaneFn,
    z: Complex64,
    decay_hint: impl Into<Decay>,
    nodes: usize,
) -> Result<Complex64> {
    let (decay, lin) = kernel_integrand_profile(kernel, spec, decay_hint.into(), z);
    let env = GaussianEnvelope::from_exponent(decay, lin)?;
    let grid = PlanarGrid::with_nodes(nodes, env)?;
    let values =
        grid.sample(|w| exp_or_zero(kernel.ln_eval(z, w) + f.ln_eval(w) + spec.exponent(w)));
    grid.weighted_sum(&values)
}

/// A kernel operator discretized on one fixed grid, for applying the same
/// operator at many points or to functions that are themselves expensive
/// to evaluate (nested integrals).
///
/// The grid is centered at the origin; `z` only shifts the peak of the
/// integrand by `O(|z|)`, which the Gauss-Hermite rule absorbs for the
/// moderate `|z|` this is meant for.
#[derive(Debug, Clone)]
pub struct KernelOperator<K: Kernel> {
    kernel: K,
    spec: WeightSpec,
    grid: PlanarGrid,
}

impl<K: Kernel> KernelOperator<K> {
    pub fn new(
        kernel: K,
        spec: WeightSpec,
        decay_hint: impl Into<Decay>,
        nodes: usize,
    ) -> Result<Self> {
        let (decay, _) =
            kernel_integrand_profile(&kernel, &spec, decay_hint.into(), Complex64::new(0.0, 0.0));
        let grid = PlanarGrid::with_nodes(nodes, GaussianEnvelope::from_decay(decay)?)?;
        Ok(KernelOperator { kernel, spec, grid })
    }

    pub fn grid(&self) -> &PlanarGrid {
        &self.grid
    }

    /// `ln F(w) + E(w)` on the grid.
    pub fn sample(&self, f: &PlaneFn) -> Vec<Complex64> {
        self.grid.sample(|w| f.ln_eval(w) + self.spec.exponent(w))
    }

    /// The operator applied at `z` to a function sampled by [`sample`](Self::sample).
    pub fn apply_sampled(&self, samples: &[Complex64], z: Complex64) -> Result<Complex64> {
        let pts = self.grid.points();
        let values: Vec<Complex64> = samples
            .iter()
            .zip(pts)
            .map(|(&ln_fw, &w)| exp_or_zero(self.kernel.ln_eval(z, w) + ln_fw))
            .collect();
        self.grid.weighted_sum(&values)
    }

    pub fn apply(&self, f: &PlaneFn, z: Complex64) -> Result<Complex64> {
        self.apply_sampled(&self.sample(f), z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn weight_exponent_examples() {
        let z = c(0.3, -1.2);
        assert_eq!(
            weight_exponent(&WeightSpec::StandardBargmann, z),
            -0.5 * z.norm_sqr()
        );
        let s = SParam::new(0.35).unwrap();
        let x = 1.4;
        assert!((weight_exponent(&WeightSpec::Xs(s), c(x, 0.0)) - 0.35 * x * x).abs() < 1e-14);
        assert!((weight_exponent(&WeightSpec::Xs(s), c(0.0, x)) + x * x / 0.35).abs() < 1e-14);
        for z in [c(0.3, -1.2), c(-2.0, 0.7)] {
            let spec = WeightSpec::Xs(s);
            assert!((weight_exponent(&spec, z) - spec.exponent(z)).abs() < 1e-13);
        }
    }

    #[test]
    fn phi_weight_examples() {
        let z = c(0.8, -0.5);
        let v = phi_weight(&PhaseParams::standard(), z).unwrap();
        assert!((v - z.norm_sqr() / 4.0).abs() < 1e-15);
        let s = 0.4f64;
        let p =
            PhaseParams::new(c(0.0, 1.0 / s), c(0.0, -(1.0 - s * s).sqrt()), c(0.0, s)).unwrap();
        let zz = z * z;
        let expect = (1.0 - s * s) / (4.0 * s) * z.norm_sqr()
            - (1.0 + s * s) / (8.0 * s) * (zz + zz.conj()).re;
        assert!((phi_weight(&p, z).unwrap() - expect).abs() < 1e-14);
        assert_eq!(phi_weight(&p, c(0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn kernel_examples() {
        let s = SParam::new(0.5).unwrap();
        let k0 = k_s_kernel(s, c(0.0, 0.0), c(0.0, 0.0));
        assert!((k0.re - 3.0 / (4.0 * PI)).abs() < 1e-16 && k0.im == 0.0);
        assert!((k0.re - 0.2387324146).abs() < 1e-10);

        assert!(
            (projection_kernel_b(c(0.0, 0.0), c(1.0, 2.0)).re - 1.0 / (2.0 * PI)).abs() < 1e-16
        );
        let v = projection_kernel_b(c(2.0, 0.0), c(2.0, 0.0));
        assert!((v.re - 2f64.exp() / (2.0 * PI)).abs() < 1e-15);
        assert!((v.re - 1.1760048029).abs() < 1e-10);

        let z = c(0.3, 0.9);
        let w = c(-0.4, 0.2);
        assert!((k_s_kernel(s, z, w) - k_s_kernel(s, w, z).conj()).norm() < 1e-15);
    }

    #[test]
    fn mehler_start() {
        let s = SParam::new(0.3).unwrap();
        let v = mehler_partial_sum(s, 0, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((v.re - 0.7 / (PI * 0.3f64.sqrt())).abs() < 1e-15);
        assert!(mehler_partial_sum(s, 65, c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn psi_kernel_polarizes_phi() {
        let p = PhaseParams::new(c(0.2, 1.3), c(0.5, -0.9), c(-0.3, 0.8)).unwrap();
        for z in [c(0.1, 0.0), c(-0.7, 1.1), c(1.5, -0.2)] {
            let phi = phi_weight(&p, z).unwrap();
            assert!((psi_kernel(&p, z, z.conj()) - c(phi, 0.0)).norm() < 1e-14);
        }
        assert_eq!(psi_kernel(&p, c(0.0, 0.0), c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn phi_projection_of_standard_triple_is_bargmann_projection() {
        let k = GaussianKernel::phi_projection(&PhaseParams::standard());
        let b = GaussianKernel::projection_b();
        assert!((k.ln_pref - b.ln_pref).norm() < 1e-15);
        assert!((k.cross - b.cross).norm() < 1e-15);
        assert!(k.zz.norm() < 1e-16 && k.ww.norm() < 1e-16);
    }
}
