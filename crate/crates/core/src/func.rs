//! Pointwise-evaluable function handles.
//!
//! Integrands over the plane routinely combine factors like `e^{+s x^2}` (the
//! `X_s` weight) with factors like `e^{-x^2}` whose product is harmless while
//! each factor alone over- or underflows at the outer quadrature nodes. A
//! [`PlaneFn`] can therefore carry a complex logarithm alongside its value,
//! and the integration code combines logarithms before exponentiating.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

type ComplexMap = dyn Fn(Complex64) -> Complex64 + Send + Sync;
type RealMap = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A map `C -> C`.
#[derive(Clone)]
pub struct PlaneFn {
    value: Arc<ComplexMap>,
    log: Option<Arc<ComplexMap>>,
}

impl PlaneFn {
    pub fn new(f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        PlaneFn {
            value: Arc::new(f),
            log: None,
        }
    }

    /// A function given together with a branch of its complex logarithm.
    /// Only `exp(ln_f(z)) == f(z)` is required; the branch is irrelevant.
    pub fn with_log(
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        ln_f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        PlaneFn {
            value: Arc::new(f),
            log: Some(Arc::new(ln_f)),
        }
    }

    /// A function known only through its logarithm.
    pub fn from_log(ln_f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        let ln_f: Arc<ComplexMap> = Arc::new(ln_f);
        let inner = ln_f.clone();
        PlaneFn {
            value: Arc::new(move |z| inner(z).exp()),
            log: Some(ln_f),
        }
    }

    pub fn zero() -> Self {
        PlaneFn::with_log(
            |_| Complex64::new(0.0, 0.0),
            |_| Complex64::new(f64::NEG_INFINITY, 0.0),
        )
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.value)(z)
    }

    /// Complex logarithm of the value. Zero maps to `-inf + 0i`, which
    /// exponentiates back to zero.
    #[inline]
    pub fn ln_eval(&self, z: Complex64) -> Complex64 {
        match &self.log {
            Some(ln_f) => ln_f(z),
            None => safe_ln(self.eval(z)),
        }
    }

    pub fn has_log(&self) -> bool {
        self.log.is_some()
    }

    /// `z -> f(z) * g(z)`.
    pub fn product(&self, other: &PlaneFn) -> PlaneFn {
        let (f, g) = (self.clone(), other.clone());
        let (lf, lg) = (self.clone(), other.clone());
        PlaneFn::with_log(
            move |z| f.eval(z) * g.eval(z),
            move |z| lf.ln_eval(z) + lg.ln_eval(z),
        )
    }

    /// `z -> c * f(z)`.
    pub fn scaled(&self, c: Complex64) -> PlaneFn {
        let (f, lf) = (self.clone(), self.clone());
        let ln_c = safe_ln(c);
        PlaneFn::with_log(move |z| c * f.eval(z), move |z| ln_c + lf.ln_eval(z))
    }
}

impl fmt::Debug for PlaneFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlaneFn")
            .field("has_log", &self.log.is_some())
            .finish()
    }
}

/// A map `R -> C`.
#[derive(Clone)]
pub struct LineFn(Arc<RealMap>);

impl LineFn {
    pub fn new(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        LineFn(Arc::new(f))
    }

    pub fn zero() -> Self {
        LineFn::new(|_| Complex64::new(0.0, 0.0))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> Complex64 {
        (self.0)(x)
    }
}

impl fmt::Debug for LineFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("LineFn")
    }
}

/// `ln z` with `ln 0 = -inf + 0i` (num-complex already does this, but the
/// imaginary part of `ln(-0.0 + 0i)` is `pi`; normalize it).
#[inline]
pub fn safe_ln(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        Complex64::new(f64::NEG_INFINITY, 0.0)
    } else {
        z.ln()
    }
}

/// `v * exp(e)` without forming `exp(e)` when it would overflow.
#[inline]
pub fn mul_exp(v: Complex64, e: Complex64) -> Complex64 {
    if v.re == 0.0 && v.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if e.re.abs() < 700.0 {
        v * e.exp()
    } else {
        (v.ln() + e).exp()
    }
}

/// `exp(e)` for an exponent whose real part may be `-inf`.
#[inline]
pub fn exp_or_zero(e: Complex64) -> Complex64 {
    if e.re == f64::NEG_INFINITY {
        Complex64::new(0.0, 0.0)
    } else {
        e.exp()
    }
}
