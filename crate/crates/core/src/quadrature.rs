//! Gauss-Hermite quadrature on the real line and on `C ~ R^2`.
//!
//! Every integrand in this crate is a Gaussian times something tame
//! (a polynomial, a slowly varying phase). Rules are built for the weight
//! `e^{-t^2}` and then affinely mapped onto the Gaussian envelope of the
//! integrand; the envelope is absorbed into the *scaled* weights
//! `w_i e^{t_i^2}`, so integrands are evaluated as plain functions and no
//! `e^{+t^2}` factor is ever formed.
//!
//! Sums are reduced pairwise in a fixed tree order. Evaluation may run on
//! the rayon pool (feature `parallel`), but the reduction never depends on
//! it, so results are bit-identical across execution modes.

use std::collections::HashMap;
use std::f64::consts::{LN_10, PI};
use std::ops::{Add, Mul, Neg};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::func::exp_or_zero;
use crate::spaces::WeightSpec;

pub const MAX_RULE_ORDER: usize = 2000;

/// Largest order for which the Golub-Welsch eigen route is used as fallback.
pub const EIGEN_FALLBACK_MAX: usize = 64;

/// An `n`-point Gauss-Hermite rule for the weight `e^{-x^2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule1D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scaled_weights: Vec<f64>,
}

impl QuadratureRule1D {
    /// Ascending, symmetric about zero.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights for `e^{-x^2}`; the outermost ones underflow to zero for large orders.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_i * exp(t_i^2)`, the weights for integrating a plain function.
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled_weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// The `n`-point Gauss-Hermite rule (`1 <= n <= 2000`).
///
/// Nodes come from safeguarded Newton iteration on the orthonormal Hermite
/// recurrence (rescaled as it runs, so it stays finite for every supported
/// order), each root bracketed first by a sign scan.
/// For `n <= 64` the Golub-Welsch eigenvalue route is the fallback should
/// Newton ever fail to isolate all roots.
pub fn gauss_hermite_rule(n: usize) -> Result<QuadratureRule1D> {
    if n == 0 || n > MAX_RULE_ORDER {
        return Err(Error::param(format!(
            "Gauss-Hermite order must be in 1..={MAX_RULE_ORDER}, got {n}"
        )));
    }
    match newton_rule(n) {
        Some(rule) => Ok(rule),
        None if n <= EIGEN_FALLBACK_MAX => gauss_hermite_rule_eigen(n),
        None => Err(Error::Consistency(format!(
            "Newton iteration failed to isolate the roots of H_{n}"
        ))),
    }
}

/// Shared, memoized rules; building a 201-point rule is cheap but grids are
/// built thousands of times.
pub fn cached_rule(n: usize) -> Result<Arc<QuadratureRule1D>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule1D>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&n) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(gauss_hermite_rule(n)?);
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(n, rule.clone());
    Ok(rule)
}

/// Orthonormal Hermite recurrence started from `p_0 = 1`; returns
/// `(p_n, p_{n-1}, ln_scale)` with the true values `pi^{-1/4} e^{ln_scale}`
/// times the returned ones.
fn orthonormal_pair(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut ln_scale = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let next = x * (2.0 / jf).sqrt() * cur - ((jf - 1.0) / jf).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            cur *= 1e-150;
            prev *= 1e-150;
            ln_scale += 150.0 * LN_10;
        }
    }
    (cur, prev, ln_scale)
}

fn newton_rule(n: usize) -> Option<QuadratureRule1D> {
    let nf = n as f64;
    let deriv_scale = (2.0 * nf).sqrt();
    // All roots lie below sqrt(2n + 1) and are at least pi / sqrt(2n + 1)
    // apart (the gap is smallest at the origin), so a scan at a quarter of
    // that spacing sees every root as one sign change.
    let edge = (2.0 * nf + 1.0).sqrt();
    let h = 0.25 * PI / edge;
    let mut x = if n % 2 == 1 { 0.5 * h } else { 0.0 };
    let mut pa = orthonormal_pair(n, x).0;
    let mut brackets = Vec::with_capacity(n / 2);
    while x < edge + 1.0 {
        let xn = x + h;
        let pb = orthonormal_pair(n, xn).0;
        if pa * pb < 0.0 {
            brackets.push((x, xn, pa));
        }
        x = xn;
        pa = pb;
    }
    if brackets.len() != n / 2 {
        return None;
    }

    // Largest root first.
    let mut roots: Vec<f64> = Vec::with_capacity(n.div_ceil(2));
    for &(lo, hi, p_lo) in brackets.iter().rev() {
        let (mut a, mut b) = (lo, hi);
        let mut x = 0.5 * (a + b);
        let mut converged = false;
        for _ in 0..200 {
            let (p, p_prev, _) = orthonormal_pair(n, x);
            if p == 0.0 {
                converged = true;
                break;
            }
            if (p > 0.0) == (p_lo > 0.0) {
                a = x;
            } else {
                b = x;
            }
            let mut next = x - p / (deriv_scale * p_prev);
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            let dx = next - x;
            x = next;
            // Rounding in the recurrence keeps |dx| near 1e-16 |x| at best, so
            // stop at a looser threshold and take one more polishing step.
            if dx.abs() <= 1e-12 * x.abs().max(1.0) {
                let (p, p_prev, _) = orthonormal_pair(n, x);
                x -= p / (deriv_scale * p_prev);
                converged = true;
                break;
            }
        }
        if !converged || !x.is_finite() {
            return None;
        }
        roots.push(x);
    }
    if n % 2 == 1 {
        roots.push(0.0);
    }
    if roots.windows(2).any(|w| w[1] >= w[0]) {
        return None;
    }
    let ln_weights = roots
        .iter()
        .map(|&x| {
            let (_, p_prev, ln_scale) = orthonormal_pair(n, x);
            // w = 1 / (n p_{n-1}^2) for the orthonormal p_{n-1}.
            -nf.ln() - 2.0 * (p_prev.abs().ln() + ln_scale) + 0.5 * PI.ln()
        })
        .collect::<Vec<_>>();
    Some(assemble_symmetric(n, &roots, &ln_weights))
}

/// Builds the ascending rule from the non-negative roots (largest first).
fn assemble_symmetric(n: usize, roots_desc: &[f64], ln_weights: &[f64]) -> QuadratureRule1D {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut scaled = vec![0.0; n];
    for (i, (&x, &ln_w)) in roots_desc.iter().zip(ln_weights).enumerate() {
        let lo = i;
        let hi = n - 1 - i;
        nodes[lo] = -x;
        nodes[hi] = x;
        let w = ln_w.exp();
        let ws = (ln_w + x * x).exp();
        weights[lo] = w;
        weights[hi] = w;
        scaled[lo] = ws;
        scaled[hi] = ws;
    }
    QuadratureRule1D {
        nodes,
        weights,
        scaled_weights: scaled,
    }
}

/// Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Hermite
/// recurrence. Accurate for moderate `n` only (weights underflow beyond ~100).
pub fn gauss_hermite_rule_eigen(n: usize) -> Result<QuadratureRule1D> {
    if n == 0 || n > MAX_RULE_ORDER {
        return Err(Error::param(format!(
            "Gauss-Hermite order must be in 1..={MAX_RULE_ORDER}, got {n}"
        )));
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = off;
        jacobi[(k - 1, k)] = off;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let half = n.div_ceil(2);
    let mut roots = Vec::with_capacity(half);
    let mut ln_weights = Vec::with_capacity(half);
    for i in 0..half {
        let (lo, hi) = (pairs[i], pairs[n - 1 - i]);
        let x = if lo.0 == hi.0 {
            0.0
        } else {
            0.5 * (hi.0 - lo.0)
        };
        roots.push(x);
        ln_weights.push((0.5 * (lo.1 + hi.1)).ln());
    }
    Ok(assemble_symmetric(n, &roots, &ln_weights))
}

/// Whether integrand evaluation may use the rayon pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential evaluation without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// `(0..n).map(f).collect()`, possibly on the rayon pool. Order is preserved.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Cascade summation with a fixed tree shape.
pub fn pairwise_sum(terms: &[Complex64]) -> Complex64 {
    const LEAF: usize = 16;
    if terms.len() <= LEAF {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in terms {
            acc += t;
        }
        return acc;
    }
    let mid = terms.len() / 2;
    pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
}

/// A real quadratic form `xx x^2 + xy x y + yy y^2`, used as the Gaussian
/// decay rate of `|F(x + i y)|`: a function "with decay `d`" satisfies
/// `|F| <= poly * exp(-d(x, y))`. Negative entries describe growth.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Decay {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Decay {
    pub const ZERO: Decay = Decay {
        xx: 0.0,
        xy: 0.0,
        yy: 0.0,
    };

    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Decay { xx, xy, yy }
    }

    pub const fn axes(xx: f64, yy: f64) -> Self {
        Decay { xx, xy: 0.0, yy }
    }

    /// Decay of `|exp(q z^2)|`: `Re(q z^2) = Re q (x^2 - y^2) - 2 Im q x y`.
    pub fn holomorphic_gaussian(q: Complex64) -> Self {
        Decay {
            xx: -q.re,
            xy: 2.0 * q.im,
            yy: q.re,
        }
    }

    /// Decay of `|exp(q conj(z)^2)|`.
    pub fn antiholomorphic_gaussian(q: Complex64) -> Self {
        Decay {
            xx: -q.re,
            xy: -2.0 * q.im,
            yy: q.re,
        }
    }

    /// Decay of `exp(-k |z|^2)`.
    pub fn radial(k: f64) -> Self {
        Decay::axes(k, k)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.xx * x * x + self.xy * x * y + self.yy * y * y
    }

    pub fn is_positive_definite(&self) -> bool {
        self.xx > 0.0 && self.yy > 0.0 && 4.0 * self.xx * self.yy - self.xy * self.xy > 0.0
    }
}

impl Add for Decay {
    type Output = Decay;
    fn add(self, o: Decay) -> Decay {
        Decay::new(self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)
    }
}

impl Neg for Decay {
    type Output = Decay;
    fn neg(self) -> Decay {
        Decay::new(-self.xx, -self.xy, -self.yy)
    }
}

impl Mul<Decay> for f64 {
    type Output = Decay;
    fn mul(self, d: Decay) -> Decay {
        Decay::new(self * d.xx, self * d.xy, self * d.yy)
    }
}

impl From<(f64, f64)> for Decay {
    fn from((xx, yy): (f64, f64)) -> Self {
        Decay::axes(xx, yy)
    }
}

/// `exp(-Q(x - cx, y - cy))` with `Q(u, v) = sigma_x u^2 + sigma_xy u v + sigma_y v^2`
/// positive definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEnvelope {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub sigma_xy: f64,
    pub center: [f64; 2],
}

impl GaussianEnvelope {
    pub fn new(sigma_x: f64, sigma_y: f64) -> Result<Self> {
        Self::from_decay(Decay::axes(sigma_x, sigma_y))
    }

    pub fn from_decay(d: Decay) -> Result<Self> {
        if !(d.xx.is_finite() && d.xy.is_finite() && d.yy.is_finite()) || !d.is_positive_definite()
        {
            return Err(Error::Envelope(format!(
                "quadratic form ({:.6}, {:.6}, {:.6}) is not positive definite",
                d.xx, d.xy, d.yy
            )));
        }
        Ok(GaussianEnvelope {
            sigma_x: d.xx,
            sigma_y: d.yy,
            sigma_xy: d.xy,
            center: [0.0, 0.0],
        })
    }

    /// The envelope of `exp(-d(x, y) + lx x + ly y)`: same form, centered at
    /// the maximum of the exponent.
    pub fn from_exponent(d: Decay, linear: [f64; 2]) -> Result<Self> {
        let env = Self::from_decay(d)?;
        // grad: [2xx, xy; xy, 2yy] c = l
        let (a, b, c) = (2.0 * d.xx, d.xy, 2.0 * d.yy);
        let det = a * c - b * b;
        let cx = (c * linear[0] - b * linear[1]) / det;
        let cy = (a * linear[1] - b * linear[0]) / det;
        Ok(env.centered_at([cx, cy]))
    }

    pub fn centered_at(mut self, center: [f64; 2]) -> Self {
        self.center = center;
        self
    }

    pub fn decay(&self) -> Decay {
        Decay::new(self.sigma_x, self.sigma_xy, self.sigma_y)
    }

    /// Upper Cholesky factor `U` with `Q = U^T U`: `(u11, u12, u22)`.
    fn cholesky(&self) -> (f64, f64, f64) {
        let u11 = self.sigma_x.sqrt();
        let u12 = 0.5 * self.sigma_xy / u11;
        let u22 = (self.sigma_y - u12 * u12).sqrt();
        (u11, u12, u22)
    }
}

/// A tensor Gauss-Hermite grid mapped onto a Gaussian envelope.
#[derive(Debug, Clone)]
pub struct PlanarGrid {
    rule_x: Arc<QuadratureRule1D>,
    rule_y: Arc<QuadratureRule1D>,
    envelope: GaussianEnvelope,
    points: Vec<Complex64>,
    weights: Vec<f64>,
    execution: Execution,
}

impl PlanarGrid {
    pub fn new(
        rule_x: Arc<QuadratureRule1D>,
        rule_y: Arc<QuadratureRule1D>,
        envelope: GaussianEnvelope,
    ) -> Result<Self> {
        if !envelope.decay().is_positive_definite() {
            return Err(Error::Envelope(
                "grid envelope is not positive definite".into(),
            ));
        }
        let (u11, u12, u22) = envelope.cholesky();
        let jac = 1.0 / (u11 * u22);
        let (nx, ny) = (rule_x.order(), rule_y.order());
        let mut points = Vec::with_capacity(nx * ny);
        let mut weights = Vec::with_capacity(nx * ny);
        for (&tx, &wx) in rule_x.nodes().iter().zip(rule_x.scaled_weights()) {
            for (&ty, &wy) in rule_y.nodes().iter().zip(rule_y.scaled_weights()) {
                let dy = ty / u22;
                let dx = (tx - u12 * dy) / u11;
                points.push(Complex64::new(
                    envelope.center[0] + dx,
                    envelope.center[1] + dy,
                ));
                weights.push(wx * wy * jac);
            }
        }
        Ok(PlanarGrid {
            rule_x,
            rule_y,
            envelope,
            points,
            weights,
            execution: Execution::default(),
        })
    }

    /// Same node count on both axes, rules from the shared cache.
    pub fn with_nodes(nodes: usize, envelope: GaussianEnvelope) -> Result<Self> {
        let rule = cached_rule(nodes)?;
        Self::new(rule.clone(), rule, envelope)
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    pub fn envelope(&self) -> &GaussianEnvelope {
        &self.envelope
    }

    pub fn node_counts(&self) -> (usize, usize) {
        (self.rule_x.order(), self.rule_y.order())
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Integration weights (scaled Gauss-Hermite weights times the Jacobian).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The grid with both node counts doubled.
    pub fn refined(&self) -> Result<Self> {
        let rx = cached_rule((2 * self.rule_x.order()).min(MAX_RULE_ORDER))?;
        let ry = cached_rule((2 * self.rule_y.order()).min(MAX_RULE_ORDER))?;
        Ok(Self::new(rx, ry, self.envelope)?.with_execution(self.execution))
    }

    /// Same node set with the axes' node counts exchanged.
    pub fn transposed_counts(&self) -> Result<Self> {
        Ok(
            Self::new(self.rule_y.clone(), self.rule_x.clone(), self.envelope)?
                .with_execution(self.execution),
        )
    }

    /// Evaluates `f` at every grid point, in grid order.
    pub fn sample<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Complex64) -> T + Sync + Send,
    {
        map_indexed(self.execution, self.points.len(), |k| f(self.points[k]))
    }

    /// `sum_k w_k v_k` for values sampled on this grid.
    pub fn weighted_sum(&self, values: &[Complex64]) -> Result<Complex64> {
        assert_eq!(values.len(), self.points.len(), "sample length mismatch");
        let mut terms = Vec::with_capacity(values.len());
        for (k, (&v, &w)) in values.iter().zip(&self.weights).enumerate() {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(self.non_finite(k));
            }
            terms.push(v * w);
        }
        Ok(pairwise_sum(&terms))
    }

    fn non_finite(&self, k: usize) -> Error {
        let ny = self.rule_y.order();
        Error::NonFinite {
            location: format!(
                "grid node ({}, {}) at z = {:.6e}{:+.6e}i",
                k / ny,
                k % ny,
                self.points[k].re,
                self.points[k].im
            ),
        }
    }
}

/// `integral of F over C` on the grid.
pub fn integrate_plane<F>(f: F, grid: &PlanarGrid) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync + Send,
{
    let values = grid.sample(f);
    grid.weighted_sum(&values)
}

/// Like [`integrate_plane`] with the integrand given by its logarithm.
pub fn integrate_plane_ln<F>(ln_f: F, grid: &PlanarGrid) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync + Send,
{
    let values = grid.sample(|z| exp_or_zero(ln_f(z)));
    grid.weighted_sum(&values)
}

/// Integrates on `grid` and on its refinement; returns the refined value
/// and the change between the two.
pub fn integrate_plane_converged<F>(f: F, grid: &PlanarGrid) -> Result<(Complex64, f64)>
where
    F: Fn(Complex64) -> Complex64 + Sync + Send,
{
    let coarse = integrate_plane(&f, grid)?;
    let fine = integrate_plane(&f, &grid.refined()?)?;
    Ok((fine, (fine - coarse).norm()))
}

/// `integral of f over R` for `f` decaying like `exp(-scale^2 x^2)`.
pub fn integrate_line<F>(f: F, rule: &QuadratureRule1D, envelope_scale: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    integrate_line_centered(f, rule, envelope_scale, 0.0)
}

/// As [`integrate_line`] for the envelope `exp(-scale^2 (x - center)^2)`.
pub fn integrate_line_centered<F>(
    f: F,
    rule: &QuadratureRule1D,
    envelope_scale: f64,
    center: f64,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(envelope_scale > 0.0 && envelope_scale.is_finite()) {
        return Err(Error::Envelope(format!(
            "line envelope scale must be positive, got {envelope_scale}"
        )));
    }
    let mut terms = Vec::with_capacity(rule.order());
    for (i, (&t, &w)) in rule.nodes().iter().zip(rule.scaled_weights()).enumerate() {
        let v = f(center + t / envelope_scale);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite {
                location: format!("line node {i} (x = {:.6e})", center + t / envelope_scale),
            });
        }
        terms.push(v * w);
    }
    // Mirror nodes are added first so odd integrands cancel exactly.
    let n = terms.len();
    let folded: Vec<Complex64> = (0..n.div_ceil(2))
        .map(|i| {
            if i == n - 1 - i {
                terms[i]
            } else {
                terms[i] + terms[n - 1 - i]
            }
        })
        .collect();
    Ok(pairwise_sum(&folded) / envelope_scale)
}

/// The Gaussian envelope of `integrand * weight` for an integrand with the
/// given decay. Fails when the combined exponent is not negative definite;
/// the bare `X_s` weight grows like `exp(s x^2)` along the real axis, so
/// integrability always has to come from the integrand.
pub fn envelope_for(
    spec: &WeightSpec,
    extra_quadratic_decay: impl Into<Decay>,
) -> Result<GaussianEnvelope> {
    let combined = spec.decay() + extra_quadratic_decay.into();
    GaussianEnvelope::from_decay(combined)
}
