use std::f64::consts::PI;

use holoherm::quadrature::{
    cached_rule, gauss_hermite_rule, integrate_line, integrate_plane, integrate_plane_converged,
    Decay, Execution, GaussianEnvelope, PlanarGrid,
};
use holoherm::Complex64;
use proptest::prelude::*;

fn ln_gamma_half_int(k: usize) -> f64 {
    // ln Gamma(k + 1/2)
    let mut v = 0.5 * PI.ln();
    for j in 0..k {
        v += (j as f64 + 0.5).ln();
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn monomials_are_exact(n in 1usize..160, frac in 0.0f64..1.0) {
        let rule = gauss_hermite_rule(n).unwrap();
        let degree = ((2 * n - 1) as f64 * frac) as usize;
        let (x, w) = (rule.nodes(), rule.weights());
        // Mirror pairs first: the odd moments then vanish identically.
        let mut sum = 0.0;
        for i in 0..n.div_ceil(2) {
            let j = n - 1 - i;
            // w x^d in logs: x^260 alone overflows.
            let term = |k: usize| {
                if x[k] == 0.0 {
                    if degree == 0 { w[k] } else { 0.0 }
                } else {
                    let sign = if x[k] < 0.0 && degree % 2 == 1 { -1.0 } else { 1.0 };
                    sign * (w[k].ln() + degree as f64 * x[k].abs().ln()).exp()
                }
            };
            sum += if i == j { term(i) } else { term(i) + term(j) };
        }
        if degree % 2 == 1 {
            prop_assert!(sum.abs() < 1e-12, "odd degree {} gave {}", degree, sum);
        } else {
            let exact = ln_gamma_half_int(degree / 2).exp();
            prop_assert!(((sum - exact) / exact).abs() < 1e-12, "degree {}: {} vs {}", degree, sum, exact);
        }
    }

    #[test]
    fn axis_resolution_swap(nx in 20usize..90, ny in 20usize..90, k in 0.2f64..3.0, p in 0usize..4) {
        let env = GaussianEnvelope::new(k, k).unwrap();
        let rx = cached_rule(nx).unwrap();
        let ry = cached_rule(ny).unwrap();
        let a = PlanarGrid::new(rx.clone(), ry.clone(), env).unwrap();
        let b = PlanarGrid::new(ry, rx, env).unwrap();
        let f = move |z: Complex64| Complex64::new(z.norm_sqr().powi(p as i32) * (-k * z.norm_sqr()).exp(), 0.0);
        let va = integrate_plane(f, &a).unwrap();
        let vb = integrate_plane(f, &b).unwrap();
        prop_assert!((va - vb).norm() <= 1e-12 * va.norm());
    }

    #[test]
    fn doubling_nodes_is_stable(k in 0.3f64..2.0, q in -0.2f64..0.2) {
        let d = Decay::new(k, 0.0, k);
        let grid = PlanarGrid::with_nodes(41, GaussianEnvelope::from_decay(d).unwrap()).unwrap();
        let f = move |z: Complex64| (Complex64::new(0.0, q) * z * z - k * z.norm_sqr()).exp() * (1.0 + z * z.conj());
        let (v, change) = integrate_plane_converged(f, &grid).unwrap();
        prop_assert!(change < 1e-12 * v.norm().max(1.0));
    }
}

#[test]
fn repeated_calls_are_bit_identical() {
    let env = GaussianEnvelope::from_decay(Decay::new(0.7, 0.3, 1.1)).unwrap();
    let f = |z: Complex64| {
        (Complex64::new(0.2, 0.1) * z * z
            - 0.7 * z.re * z.re
            - 0.3 * z.re * z.im
            - 1.1 * z.im * z.im)
            .exp()
    };
    let grid = PlanarGrid::with_nodes(101, env).unwrap();
    let first = integrate_plane(f, &grid).unwrap();
    for _ in 0..3 {
        assert_eq!(
            integrate_plane(f, &PlanarGrid::with_nodes(101, env).unwrap()).unwrap(),
            first
        );
    }
    let seq = grid.clone().with_execution(Execution::Sequential);
    assert_eq!(integrate_plane(f, &seq).unwrap(), first);
}

#[test]
fn line_rule_at_default_order() {
    let rule = gauss_hermite_rule(201).unwrap();
    let v = integrate_line(
        |x| Complex64::new((-(x * x)).exp() * (1.0 + x * x), 0.0),
        &rule,
        1.0,
    )
    .unwrap();
    assert!((v.re - 1.5 * PI.sqrt()).abs() < 1e-14);
    let odd = integrate_line(
        |x| Complex64::new(x.powi(5) * (-(x * x)).exp(), 0.0),
        &rule,
        1.0,
    )
    .unwrap();
    assert_eq!(odd, Complex64::new(0.0, 0.0));
}
