//! The Bargmann transform, Bargmann-type transforms `T` with quadratic phase,
//! their adjoints, the explicit `X_s <-> H_B` isomorphisms and the kernels of
//! the composites `B T*`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::func::{exp_or_zero, mul_exp, LineFn, PlaneFn};
use crate::hermite::{ellipse_params, ln_b_nn, psi_n_ellipse, psi_s, SParam};
use crate::phase::PhaseParams;
use crate::quadrature::{
    cached_rule, integrate_line_centered, pairwise_sum, Decay, GaussianEnvelope, PlanarGrid,
};
use crate::spaces::{GaussianKernel, WeightSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `phi(z, x) = a z^2 / 2 + b z x + c x^2 / 2`.
pub fn phase(p: &PhaseParams, z: Complex64, x: f64) -> Complex64 {
    p.phase(z, x)
}

/// `Tf(z) = C_phi integral of e^{i phi(z, x)} f(x) dx`, for `|f(x)|` bounded
/// by a polynomial times `e^{-decay x^2}` (`decay >= 0`).
pub fn t_transform(
    p: &PhaseParams,
    f: &LineFn,
    z: Complex64,
    decay: f64,
    nodes: usize,
) -> Result<Complex64> {
    if !(decay >= 0.0 && decay.is_finite()) {
        return Err(Error::Envelope(format!(
            "input decay must be >= 0, got {decay}"
        )));
    }
    // |e^{i phi}| = exp(-Im(a z^2)/2 - Im(b z) x - Im(c) x^2 / 2)
    let sigma = 0.5 * p.c().im + decay;
    let center = -(p.b() * z).im / (2.0 * sigma);
    let rule = cached_rule(nodes)?;
    let c_phi = p.c_phi();
    let v = integrate_line_centered(
        |x| mul_exp(f.eval(x), I * p.phase(z, x)),
        &rule,
        sigma.sqrt(),
        center,
    )?;
    Ok(c_phi * v)
}

/// `Bf(z) = 2^{-1/2} pi^{-3/4} integral of e^{-z^2/4 + z x - x^2/2} f(x) dx`;
/// the standard-triple case of [`t_transform`].
pub fn bargmann(f: &LineFn, z: Complex64, decay: f64, nodes: usize) -> Result<Complex64> {
    t_transform(&PhaseParams::standard(), f, z, decay, nodes)
}

/// Decay and linear coefficients (in `z`) of `|e^{-i conj(phi(z, x))}|`.
fn adjoint_kernel_profile(p: &PhaseParams, x: f64) -> (Decay, [f64; 2]) {
    let (a, b) = (p.a(), p.b());
    (
        Decay::new(0.5 * a.im, a.re, -0.5 * a.im),
        [-x * b.im, -x * b.re],
    )
}

/// `T* phi(x) = C_phi integral of e^{-i conj(phi(z, x))} phi(z) e^{-2 Phi(z)} L(dz)`.
/// `decay_hint` is the decay of `phi` itself.
pub fn t_adjoint(
    p: &PhaseParams,
    phi: &PlaneFn,
    x: f64,
    decay_hint: impl Into<Decay>,
    nodes: usize,
) -> Result<Complex64> {
    let spec = WeightSpec::PhiWeight(*p);
    let (kd, lin) = adjoint_kernel_profile(p, x);
    let env = GaussianEnvelope::from_exponent(kd + spec.decay() + decay_hint.into(), lin)?;
    let grid = PlanarGrid::with_nodes(nodes, env)?;
    let ln_c = p.c_phi().ln();
    let values = grid.sample(|z| {
        exp_or_zero(ln_c - I * p.phase(z, x).conj() + phi.ln_eval(z) + spec.exponent(z))
    });
    grid.weighted_sum(&values)
}

/// `B* phi(x)`; the standard-triple case of [`t_adjoint`].
pub fn bargmann_adjoint(
    phi: &PlaneFn,
    x: f64,
    decay_hint: impl Into<Decay>,
    nodes: usize,
) -> Result<Complex64> {
    t_adjoint(&PhaseParams::standard(), phi, x, decay_hint, nodes)
}

/// Residuals of the conditions under which `Phi` equals the `X_s` weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcResidual {
    /// `(1 - s^2)/(4s) - |b|^2 / (4 Im c)`
    pub r1: f64,
    /// `(1 + s^2)/(4s) - b^2 / (4 Im c) - a / (2i)`
    pub r2: Complex64,
}

impl AbcResidual {
    pub fn max_abs(&self) -> f64 {
        self.r1.abs().max(self.r2.norm())
    }
}

pub fn check_abc(p: &PhaseParams, s: SParam) -> AbcResidual {
    let s = s.value();
    let k = 1.0 / (4.0 * p.c().im);
    AbcResidual {
        r1: (1.0 - s * s) / (4.0 * s) - k * p.b().norm_sqr(),
        r2: (1.0 + s * s) / (4.0 * s) - k * p.b() * p.b() - p.a() / (2.0 * I),
    }
}

/// `(i/s, sign * i sqrt(1 - s^2), re_c + i s)`.
pub fn solve_abc(s: SParam, im_b_sign: f64, re_c: f64) -> Result<PhaseParams> {
    if im_b_sign != 1.0 && im_b_sign != -1.0 {
        return Err(Error::param(format!(
            "sign must be +1 or -1, got {im_b_sign}"
        )));
    }
    let sv = s.value();
    PhaseParams::new(
        Complex64::new(0.0, 1.0 / sv),
        Complex64::new(0.0, im_b_sign * (1.0 - sv * sv).sqrt()),
        Complex64::new(re_c, sv),
    )
}

/// `(i/s, -i sqrt(1 - s^2), i s)`.
pub fn first_triple(s: SParam) -> PhaseParams {
    solve_abc(s, -1.0, 0.0).expect("valid for s in (0, 1)")
}

/// `(i s, sqrt(1 - s^2), i s)`.
pub fn second_triple(s: SParam) -> PhaseParams {
    let sv = s.value();
    PhaseParams::new(
        Complex64::new(0.0, sv),
        Complex64::new((1.0 - sv * sv).sqrt(), 0.0),
        Complex64::new(0.0, sv),
    )
    .expect("valid for s in (0, 1)")
}

/// `sqrt(s / (1 - s^2))`.
fn iso_scale(s: SParam) -> f64 {
    let s = s.value();
    (s / (1.0 - s * s)).sqrt()
}

/// `X_s -> H_B`: `phi -> k phi(k z) exp((1 + s^2) / (4 (1 - s^2)) z^2)`, `k = sqrt(s / (1 - s^2))`.
pub fn iso_x_to_b(s: SParam, phi: &PlaneFn) -> PlaneFn {
    let k = iso_scale(s);
    iso_x_to_b_scaled(s, phi, k, k)
}

/// The inverse map `H_B -> X_s`:
/// `psi -> psi(z / k) exp(-(1 + s^2) / (4s) z^2) / k`.
pub fn iso_b_to_x(s: SParam, psi: &PlaneFn) -> PlaneFn {
    let k = iso_scale(s);
    iso_b_to_x_scaled(s, psi, 1.0 / k, 1.0 / k)
}

/// The variant with argument scaling `s / (1 - s^2)` (no square root) and
/// the same amplitude. It is not an isometry; kept for comparison.
pub fn iso_x_to_b_unrooted(s: SParam, phi: &PlaneFn) -> PlaneFn {
    let sv = s.value();
    iso_x_to_b_scaled(s, phi, iso_scale(s), sv / (1.0 - sv * sv))
}

/// Inverse-direction counterpart of [`iso_x_to_b_unrooted`].
pub fn iso_b_to_x_unrooted(s: SParam, psi: &PlaneFn) -> PlaneFn {
    let sv = s.value();
    iso_b_to_x_scaled(s, psi, 1.0 / iso_scale(s), (1.0 - sv * sv) / sv)
}

fn iso_x_to_b_scaled(s: SParam, phi: &PlaneFn, amplitude: f64, arg: f64) -> PlaneFn {
    let sv = s.value();
    let q = (1.0 + sv * sv) / (4.0 * (1.0 - sv * sv));
    let ln_amp = amplitude.ln();
    let (f, lf) = (phi.clone(), phi.clone());
    PlaneFn::with_log(
        move |z| mul_exp(amplitude * f.eval(arg * z), q * z * z),
        move |z| ln_amp + lf.ln_eval(arg * z) + q * z * z,
    )
}

fn iso_b_to_x_scaled(s: SParam, psi: &PlaneFn, amplitude: f64, arg: f64) -> PlaneFn {
    let sv = s.value();
    let q = -(1.0 + sv * sv) / (4.0 * sv);
    let ln_amp = amplitude.ln();
    let (f, lf) = (psi.clone(), psi.clone());
    PlaneFn::with_log(
        move |z| mul_exp(amplitude * f.eval(arg * z), q * z * z),
        move |z| ln_amp + lf.ln_eval(arg * z) + q * z * z,
    )
}

/// `|LHS - RHS|` of the pointwise correspondence between `psi_n^s` and
/// `Psi_n^{sqrt s, 0}`:
///
/// `psi_n^s(z) exp(-(1 - s^2)/(4s) |z|^2 + (1 + s^2)/(4s) z^2)
///   = (-r)^n b_nn^{-1/2} Psi_n(r z) exp(-|r z|^2 / 4)`, `r = sqrt((1 - s^2)/s)`.
pub fn hermite_correspondence_residual(s: SParam, n: usize, z: Complex64) -> Result<f64> {
    if n > 20 {
        return Err(Error::param(format!(
            "correspondence is checked for n <= 20, got {n}"
        )));
    }
    let sv = s.value();
    let lhs = psi_s(n, s, z)?
        * (-(1.0 - sv * sv) / (4.0 * sv) * z.norm_sqr() + (1.0 + sv * sv) / (4.0 * sv) * z * z)
            .exp();
    let r = ((1.0 - sv * sv) / sv).sqrt();
    let p = ellipse_params(sv.sqrt(), 0.0)?;
    let rhs = (-r).powi(n as i32)
        * (-0.5 * ln_b_nn(n, s)).exp()
        * psi_n_ellipse(n, &p, r * z)?
        * (-0.25 * (r * z).norm_sqr()).exp();
    Ok((lhs - rhs).norm())
}

/// `sqrt(1 - s) / (2^{1/2} pi s^{1/4})`, the common prefactor of `G1` and `G2`.
pub fn g_prefactor(s: SParam) -> f64 {
    let s = s.value();
    (1.0 - s).sqrt() / (2f64.sqrt() * PI * s.powf(0.25))
}

impl GaussianKernel {
    /// Kernel of `B T*` on `X_s` for the first triple:
    /// `exp(sqrt((1-s)/(1+s)) z conj(w) + (1-s)/(4(1+s)) z^2 - (1-s+s^2)/(2s) conj(w)^2)`.
    pub fn g1(s: SParam) -> Self {
        let sv = s.value();
        GaussianKernel {
            ln_pref: Complex64::new(g_prefactor(s).ln(), 0.0),
            cross: Complex64::new(((1.0 - sv) / (1.0 + sv)).sqrt(), 0.0),
            zz: Complex64::new((1.0 - sv) / (4.0 * (1.0 + sv)), 0.0),
            ww: Complex64::new(-(1.0 - sv + sv * sv) / (2.0 * sv), 0.0),
        }
    }

    /// Kernel of `B T*` on `X_s` for the second triple:
    /// `exp(-i sqrt((1-s)/(1+s)) z conj(w) + (1-s)/(4(1+s)) z^2 - conj(w)^2 / 2)`.
    pub fn g2(s: SParam) -> Self {
        let sv = s.value();
        GaussianKernel {
            ln_pref: Complex64::new(g_prefactor(s).ln(), 0.0),
            cross: Complex64::new(0.0, -((1.0 - sv) / (1.0 + sv)).sqrt()),
            zz: Complex64::new((1.0 - sv) / (4.0 * (1.0 + sv)), 0.0),
            ww: Complex64::new(-0.5, 0.0),
        }
    }
}

pub fn g1_kernel(s: SParam, z: Complex64, w: Complex64) -> Complex64 {
    use crate::spaces::Kernel;
    GaussianKernel::g1(s).eval(z, w)
}

pub fn g2_kernel(s: SParam, z: Complex64, w: Complex64) -> Complex64 {
    use crate::spaces::Kernel;
    GaussianKernel::g2(s).eval(z, w)
}

/// Node counts for the nested evaluation of `B T* phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NestedNodes {
    /// Per axis of the planar grid of `T*`.
    pub inner: usize,
    /// Line rule of `B`.
    pub outer: usize,
}

impl NestedNodes {
    /// Node counts for images that are later integrated on a planar grid with
    /// `nodes` per axis. The outer rule gets half again as many nodes: for a
    /// grid point `z`, the integrand of `B` peaks near `x = Re z / (1 + gamma)`,
    /// and the outer nodes have to reach past the outermost grid points.
    pub fn for_grid(nodes: usize) -> Self {
        NestedNodes {
            inner: nodes,
            outer: nodes + nodes / 2,
        }
    }
}

impl Default for NestedNodes {
    fn default() -> Self {
        Self::for_grid(crate::DEFAULT_NODES)
    }
}

/// `B T* phi` by honest nested quadrature: `T* phi` is integrated over the
/// plane at every node of the line rule of `B`, once, and `B` is then
/// applied at any number of points.
///
/// `phi` must be `e^{q z^2}` times a polynomial; `q` fixes the envelopes.
#[derive(Debug, Clone)]
pub struct NestedComposition {
    outer_nodes: Vec<f64>,
    outer_weights: Vec<f64>,
    tstar_values: Vec<Complex64>,
    gamma: Complex64,
}

impl NestedComposition {
    pub fn new(p: &PhaseParams, phi: &PlaneFn, q: Complex64, nodes: NestedNodes) -> Result<Self> {
        let inner_nodes = nodes.inner;
        if inner_nodes > 301 {
            log::warn!(
                "nested composition with {inner_nodes}^2 inner nodes per outer node is expensive"
            );
        }
        let spec = WeightSpec::PhiWeight(*p);
        // T* e^{q z^2} = const * e^{-gamma x^2 / 2}
        let gamma = p.adjoint_gaussian(q);
        if gamma.re <= -1.0 || !gamma.re.is_finite() {
            return Err(Error::Envelope(format!(
                "T* of the input has width {gamma}; B is not defined on it"
            )));
        }
        // One grid for all x: the x-dependence of the kernel is linear in z
        // and only moves the peak by O(x), where the outer weight is already small.
        let (kd, _) = adjoint_kernel_profile(p, 0.0);
        let env = GaussianEnvelope::from_decay(kd + spec.decay() + Decay::holomorphic_gaussian(q))?;
        let grid = PlanarGrid::with_nodes(inner_nodes, env)?;
        let (a, b, c) = (p.a(), p.b(), p.c());
        let ln_c = p.c_phi().ln();
        let ln_p: Vec<Complex64> = grid.sample(|w| {
            let wb = w.conj();
            ln_c - 0.5 * I * a.conj() * wb * wb + phi.ln_eval(w) + spec.exponent(w)
        });
        let coeff_x = -I * b.conj();
        let coeff_xx = -0.5 * I * c.conj();

        let sigma = 0.5 * (1.0 + gamma.re);
        let rule = cached_rule(nodes.outer)?;
        let scale = sigma.sqrt();
        let outer_nodes: Vec<f64> = rule.nodes().iter().map(|t| t / scale).collect();
        let outer_weights: Vec<f64> = rule.scaled_weights().iter().map(|w| w / scale).collect();

        let exec = grid.execution();
        let pts = grid.points();
        let mut tstar_values = Vec::with_capacity(outer_nodes.len());
        for &x in &outer_nodes {
            let values = crate::quadrature::map_indexed(exec, pts.len(), |k| {
                exp_or_zero(ln_p[k] + coeff_x * pts[k].conj() * x + coeff_xx * x * x)
            });
            tstar_values.push(grid.weighted_sum(&values)?);
        }
        Ok(NestedComposition {
            outer_nodes,
            outer_weights,
            tstar_values,
            gamma,
        })
    }

    /// `T* phi` at the nodes of the outer rule.
    pub fn tstar_samples(&self) -> (&[f64], &[Complex64]) {
        (&self.outer_nodes, &self.tstar_values)
    }

    /// Width `gamma` of `T* phi ~ e^{-gamma x^2 / 2}`.
    pub fn tstar_width(&self) -> Complex64 {
        self.gamma
    }

    /// `B T* phi ~ e^{q z^2}` times a polynomial: returns `q`.
    pub fn image_gaussian(&self) -> Complex64 {
        -0.25 + 1.0 / (2.0 * (1.0 + self.gamma))
    }

    /// `B T* phi (z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let ln_c = PhaseParams::standard().c_phi().ln();
        let terms: Vec<Complex64> = self
            .outer_nodes
            .iter()
            .zip(&self.outer_weights)
            .zip(&self.tstar_values)
            .map(|((&x, &w), &t)| w * mul_exp(t, ln_c - 0.25 * z * z + z * x - 0.5 * x * x))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn into_fn(self) -> PlaneFn {
        PlaneFn::new(move |z| self.eval(z))
    }
}

/// `B(T* phi)(z)` by nested quadrature; see [`NestedComposition`].
pub fn compose_b_tstar(
    p: &PhaseParams,
    phi: &PlaneFn,
    q: Complex64,
    z: Complex64,
    nodes: NestedNodes,
) -> Result<Complex64> {
    Ok(NestedComposition::new(p, phi, q, nodes)?.eval(z))
}
