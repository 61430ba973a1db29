use holoherm::hermite::{psi_s_fn, SParam};
use holoherm::quadrature::{Decay, GaussianEnvelope, PlanarGrid};
use holoherm::spaces::{
    apply_kernel, gram_from_samples, GaussianKernel, KernelOperator, WeightSpec,
};
use holoherm::transforms::{
    bargmann_adjoint, first_triple, second_triple, solve_abc, t_adjoint, t_transform,
    NestedComposition, NestedNodes,
};
use holoherm::{Complex64, LineFn, PhaseParams, PlaneFn};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn s(v: f64) -> SParam {
    SParam::new(v).unwrap()
}

fn hermite_function(n: usize) -> LineFn {
    LineFn::new(move |x| c(holoherm::hermite::hermite_function(n, x), 0.0))
}

#[test]
fn standard_adjoint_is_the_same_code_path() {
    let phi = PlaneFn::new(|z: Complex64| (1.0 + z * z) * 0.3);
    for x in [-1.2, 0.0, 0.7] {
        assert_eq!(
            bargmann_adjoint(&phi, x, Decay::ZERO, 101).unwrap(),
            t_adjoint(&PhaseParams::standard(), &phi, x, Decay::ZERO, 101).unwrap()
        );
    }
}

#[test]
fn t_is_an_isometry() {
    // The images are Gaussians times polynomials of degree <= 4: 41 nodes per
    // axis integrate the products exactly, and keep the grid where the line
    // integral defining T is well conditioned.
    let sv = 0.5;
    for p in [
        first_triple(s(sv)),
        second_triple(s(sv)),
        solve_abc(s(sv), 1.0, 1.5).unwrap(),
    ] {
        let spec = WeightSpec::PhiWeight(p);
        let q = p.forward_gaussian(c(1.0, 0.0));
        let env = GaussianEnvelope::from_decay(spec.decay() + 2.0 * Decay::holomorphic_gaussian(q))
            .unwrap();
        let grid = PlanarGrid::with_nodes(41, env).unwrap();
        let samples: Vec<Vec<Complex64>> = (0..5)
            .map(|n| {
                let h = hermite_function(n);
                grid.sample(|z| {
                    t_transform(&p, &h, z, 0.5, 201).unwrap() * (0.5 * spec.exponent(z)).exp()
                })
            })
            .collect();
        let g = gram_from_samples(&samples, &grid).unwrap();
        assert!(g.max_identity_deviation < 1e-7, "{p:?}: {:?}", g.matrix);
    }
}

#[test]
fn t_t_star_is_k_s_on_random_members() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let sp = s(0.25);
    let hint = Decay::new(0.5, 0.0, -0.5);
    for p in [
        first_triple(sp),
        second_triple(sp),
        solve_abc(sp, -1.0, -0.8).unwrap(),
    ] {
        for _ in 0..3 {
            let coeffs: Vec<Complex64> = (0..4)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let f = PlaneFn::new(move |z: Complex64| {
                coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &a| acc * z + a) * (-z * z / 2.0).exp()
            });
            let z = c(rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7));
            let phi = apply_kernel(
                &GaussianKernel::phi_projection(&p),
                &WeightSpec::PhiWeight(p),
                &f,
                z,
                hint,
                201,
            )
            .unwrap();
            let ks = apply_kernel(
                &GaussianKernel::k_s(sp),
                &WeightSpec::Xs(sp),
                &f,
                z,
                hint,
                201,
            )
            .unwrap();
            assert!((phi - ks).norm() < 1e-7, "{phi} vs {ks}");
        }
    }
}

#[test]
fn projection_is_idempotent_on_a_non_holomorphic_input() {
    let sv = 0.5;
    let sp = s(sv);
    let p = first_triple(sp);
    let spec = WeightSpec::PhiWeight(p);
    let kernel = GaussianKernel::phi_projection(&p);
    let f = PlaneFn::new(|z: Complex64| {
        z.conj() * (-z.conj() * z.conj() / 2.0 - z.norm_sqr() / 4.0).exp()
    });
    let hint = Decay::new(0.75, 0.0, -0.25);
    // P f is z e^{q z^2}; see the verification suite for the derivation of q.
    let (a_, b_) = ((1.0 - sv * sv) / (2.0 * sv), (1.0 + sv * sv) / (4.0 * sv));
    let a = a_ + 0.25;
    let q = -b_ + b_ * a_ * a_ / (a * a + 2.0 * b_);
    let op = KernelOperator::new(kernel, spec, Decay::holomorphic_gaussian(c(q, 0.0)), 41).unwrap();
    let samples: Vec<Complex64> = op
        .grid()
        .points()
        .iter()
        .map(|&w| {
            holoherm::func::safe_ln(apply_kernel(&kernel, &spec, &f, w, hint, 61).unwrap())
                + spec.exponent(w)
        })
        .collect();
    for z in [c(0.3, 0.2), c(-0.5, 0.6)] {
        let once = apply_kernel(&kernel, &spec, &f, z, hint, 201).unwrap();
        let twice = op.apply_sampled(&samples, z).unwrap();
        assert!((twice - once).norm() < 1e-6 * once.norm());
        // Not a fixed point: P moves the input.
        assert!((once - f.eval(z)).norm() > 1e-2 * once.norm());
    }
}

#[test]
fn nested_composition_agrees_with_g_kernels_and_rejects_the_other_sign() {
    let sp = s(0.5);
    let spec = WeightSpec::Xs(sp);
    let hint = Decay::new(0.5, 0.0, -0.5);
    let pts = [c(0.3, 0.2), c(-0.5, 0.6)];
    for n in [0, 1, 2] {
        let f = psi_s_fn(n, sp).unwrap();
        for (p, k) in [
            (first_triple(sp), GaussianKernel::g1(sp)),
            (second_triple(sp), GaussianKernel::g2(sp)),
        ] {
            let nested =
                NestedComposition::new(&p, &f, c(-0.5, 0.0), NestedNodes::default()).unwrap();
            for z in pts {
                let direct = apply_kernel(&k, &spec, &f, z, hint, 201).unwrap();
                assert!((nested.eval(z) - direct).norm() < 1e-6, "n={n} z={z}");
            }
        }
    }
    let f = psi_s_fn(1, sp).unwrap();
    let other = NestedComposition::new(
        &solve_abc(sp, 1.0, 0.0).unwrap(),
        &f,
        c(-0.5, 0.0),
        NestedNodes::default(),
    )
    .unwrap();
    let direct = apply_kernel(&GaussianKernel::g1(sp), &spec, &f, pts[1], hint, 201).unwrap();
    assert!((other.eval(pts[1]) - direct).norm() >= 1e-2);
}

#[test]
fn nested_zero_input() {
    let sp = s(0.75);
    let nested = NestedComposition::new(
        &first_triple(sp),
        &PlaneFn::zero(),
        c(-0.5, 0.0),
        NestedNodes::for_grid(41),
    )
    .unwrap();
    assert_eq!(nested.eval(c(0.2, 0.1)), c(0.0, 0.0));
}
