//! The verification suites. Each suite runs all of its checks to the end;
//! failures and errors are recorded per case.

use std::f64::consts::PI;
use std::time::Instant;

use holoherm::func::safe_ln;
use holoherm::hermite::{
    ellipse_params, hermite_function, psi0_ellipse, psi_n_ellipse_fn, psi_n_ellipse_with_root,
    psi_s_fn, rodrigues_oracle, zeta_map, EllipseParams, SParam, MAX_ORACLE_DEGREE,
};
use holoherm::quadrature::Decay;
use holoherm::spaces::{
    apply_kernel, gram_from_samples, gram_matrix, grid_for, inner_product, mehler_partial_sum,
    weight_exponent, GaussianKernel, Kernel, KernelOperator, WeightSpec,
};
use holoherm::transforms::{
    bargmann, check_abc, first_triple, g_prefactor, hermite_correspondence_residual, iso_b_to_x,
    iso_x_to_b, iso_x_to_b_unrooted, second_triple, solve_abc, NestedComposition, NestedNodes,
};
use holoherm::{Complex64, Error, LineFn, PhaseParams, PlaneFn, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SuiteConfig;
use crate::report::{CheckBuilder, CheckReport, Comparison, VerificationReport};

pub const ANCHOR_XS_BASIS: &str =
    "X_s: the holomorphic Hermite functions psi_n^s are a complete orthonormal system";
pub const ANCHOR_XS_KERNEL: &str = "X_s: reproducing kernel K_s";
pub const ANCHOR_MEHLER: &str = "X_s: Mehler summation of psi_n^s(z) conj(psi_n^s(w)) gives K_s";
pub const ANCHOR_HB_MONOMIALS: &str = "H_B: the normalized monomials are an orthonormal basis";
pub const ANCHOR_ABC: &str = "phase (a, b, c): the abc-condition";
pub const ANCHOR_PHI: &str = "phase (a, b, c): the weight Phi equals the X_s weight";
pub const ANCHOR_PROJECTION: &str = "T T* is the K_s projection of L^2_Phi onto X_s";
pub const ANCHOR_ELLIPSE: &str =
    "H_B: the elliptic Hermite system Psi_n^{alpha,beta} is a complete orthogonal system";
pub const ANCHOR_ELLIPSE_WEIGHT: &str =
    "ellipse: |Psi_0|^2 e^{-|z|^2/2} is the Gaussian of the elliptic disk";
pub const ANCHOR_ISO: &str = "X_s -> H_B isomorphism by dilation and a Gaussian factor";
pub const ANCHOR_ISO_SCALING: &str = "X_s -> H_B isomorphism: argument scaling of the dilation";
pub const ANCHOR_CORRESPONDENCE: &str =
    "psi_n^s correspond to Psi_n^{sqrt s, 0} under the isomorphism";
pub const ANCHOR_BARGMANN: &str = "Bargmann transform: Hermite functions to normalized monomials";
pub const ANCHOR_B_TSTAR: &str = "B T* is a Hilbert space isomorphism from X_s onto H_B";
pub const ANCHOR_G_KERNELS: &str = "B T* on X_s as an integral operator with kernel G1 or G2";

/// Pairs `(z, w)` per `s` for the Mehler check.
pub const MEHLER_PAIRS: usize = 32;
/// Terms of the Mehler partial sum.
pub const MEHLER_TERMS: usize = 60;
/// Random points for pointwise identities.
pub const POINTWISE_SAMPLES: usize = 1000;
/// Random members of `X_s` for the projection and round-trip checks.
pub const RANDOM_MEMBERS: usize = 20;

const STREAM_MEHLER: u64 = 1;
const STREAM_PHI_WEIGHT: u64 = 2;
const STREAM_PROJECTION: u64 = 3;
const STREAM_ELLIPSE_WEIGHT: u64 = 4;
const STREAM_ROUND_TRIP: u64 = 5;
const STREAM_CORRESPONDENCE: u64 = 6;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Nine fixed points in the unit disk: radii 0.35, 0.65, 0.95 at angles 0.6, 2.3, 4.1.
pub fn unit_disk_points() -> Vec<Complex64> {
    let mut v = Vec::with_capacity(9);
    for r in [0.35, 0.65, 0.95] {
        for t in [0.6, 2.3, 4.1] {
            v.push(Complex64::from_polar(r, t));
        }
    }
    v
}

/// The generator of one named stream of random points; streams are
/// independent of each other and of the order in which suites run.
fn rng(cfg: &SuiteConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

fn disk_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, 2.0 * PI * rng.random::<f64>())
}

/// `p(z) e^{-z^2/2}` with `p` of degree 4 and coefficients uniform in the unit square.
fn gaussian_polynomial(rng: &mut ChaCha8Rng) -> PlaneFn {
    let coeffs: Vec<Complex64> = (0..5)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    PlaneFn::new(move |z: Complex64| {
        let p = coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &a| acc * z + a);
        p * (-z * z / 2.0).exp()
    })
}

/// Decay of `e^{-z^2/2}` times a polynomial.
fn psi_decay() -> Decay {
    Decay::holomorphic_gaussian(c(-0.5, 0.0))
}

fn relative(value: Complex64, exact: Complex64) -> f64 {
    (value - exact).norm() / exact.norm()
}

fn k_s(cfg: &SuiteConfig, s: SParam) -> GaussianKernel {
    GaussianKernel::k_s(s).scaled(cfg.ks_prefactor_scale)
}

fn s_label(s: SParam) -> String {
    format!("s={}", s.value())
}

fn max_over<I>(iter: I) -> Result<f64>
where
    I: IntoIterator<Item = Result<f64>>,
{
    let mut m = 0.0f64;
    for r in iter {
        let v = r?;
        if v.is_nan() {
            return Err(Error::NonFinite {
                location: "residual".into(),
            });
        }
        m = m.max(v);
    }
    Ok(m)
}

/// `H_B` Gram matrix of functions with the given evaluation, all decaying
/// like `e^{q z^2}`.
fn h_b_gram<F>(members: &[F], q: Complex64, nodes: usize) -> Result<holoherm::spaces::GramReport>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let spec = WeightSpec::StandardBargmann;
    let grid = grid_for(&spec, 2.0 * Decay::holomorphic_gaussian(q), nodes)?;
    let samples: Vec<Vec<Complex64>> = members
        .iter()
        .map(|f| grid.sample(|z| f(z) * (0.5 * spec.exponent(z)).exp()))
        .collect();
    gram_from_samples(&samples, &grid)
}

fn normalized_monomial(n: usize, z: Complex64) -> Complex64 {
    let ln_norm = 0.5
        * (PI.ln() + (n + 1) as f64 * 2f64.ln() + (1..=n).map(|k| (k as f64).ln()).sum::<f64>());
    z.powu(n as u32) * (-ln_norm).exp()
}

fn report(
    suite: &str,
    cfg: &SuiteConfig,
    checks: Vec<CheckReport>,
    started: Instant,
) -> VerificationReport {
    VerificationReport::new(suite, cfg, checks, started.elapsed())
}

pub fn suite_orthonormal(cfg: &SuiteConfig) -> VerificationReport {
    let started = Instant::now();
    let count = cfg.n_max + 1;

    let mut gram = CheckBuilder::new(
        "orthonormal.gram",
        ANCHOR_XS_BASIS,
        "max |G - I| for the Gram matrix of psi_0^s..psi_{n_max}^s in X_s",
        Comparison::Below,
        cfg,
    );
    let mut herm = CheckBuilder::new(
        "orthonormal.hermitian",
        ANCHOR_XS_BASIS,
        "max |G_mn - conj(G_nm)| of the same Gram matrix",
        Comparison::Below,
        cfg,
    );
    for s in cfg.s_params() {
        let spec = WeightSpec::Xs(s);
        let hint = 2.0 * psi_decay();
        let single = gram_matrix(|n| psi_s_fn(n, s), 1, &spec, hint, cfg.nodes);
        gram.record(
            format!("{}/n<1", s_label(s)),
            single.map(|g| g.max_identity_deviation),
        );
        match gram_matrix(|n| psi_s_fn(n, s), count, &spec, hint, cfg.nodes) {
            Ok(g) => {
                gram.record(
                    format!("{}/n<{count}", s_label(s)),
                    Ok(g.max_identity_deviation),
                );
                herm.record(s_label(s), Ok(g.hermitian_defect));
            }
            Err(e) => {
                herm.record(s_label(s), Err(e.clone()));
                gram.record(format!("{}/n<{count}", s_label(s)), Err(e));
            }
        }
    }

    let mono_count = cfg.n_max.min(8) + 1;
    let mut mono = CheckBuilder::new(
        "orthonormal.monomials",
        ANCHOR_HB_MONOMIALS,
        "max |G - I| for z^n / sqrt(pi 2^{n+1} n!), n <= min(n_max, 8), in H_B",
        Comparison::Below,
        cfg,
    );
    let members: Vec<_> = (0..mono_count)
        .map(|n| move |z| normalized_monomial(n, z))
        .collect();
    mono.record(
        format!("n<{mono_count}"),
        h_b_gram(&members, c(0.0, 0.0), cfg.nodes).map(|g| g.max_identity_deviation),
    );

    report(
        "orthonormal",
        cfg,
        vec![gram.finish(), herm.finish(), mono.finish()],
        started,
    )
}

/// The closed form of `P f` for the idempotence input
/// `f(z) = conj(z) e^{-conj(z)^2/2} e^{-|z|^2/4}`: a constant times `z e^{q z^2}`.
///
/// With `K_s = C exp(A z conj(w) - B z^2 - B conj(w)^2)`, `A = (1 - s^2)/(2s)`,
/// `B = (1 + s^2)/(4s)` and the `X_s` weight, the integral is Gaussian in `w`
/// and gives `q = -B + B A^2 / ((A + 1/4)^2 + 2B)`.
pub fn idempotence_image_gaussian(s: SParam) -> f64 {
    let s = s.value();
    let a = (1.0 - s * s) / (2.0 * s);
    let b = (1.0 + s * s) / (4.0 * s);
    let d = a + 0.25;
    -b + b * a * a / (d * d + 2.0 * b)
}

fn idempotence_input() -> PlaneFn {
    PlaneFn::new(|z: Complex64| z.conj() * (-z.conj() * z.conj() / 2.0 - z.norm_sqr() / 4.0).exp())
}

fn idempotence_residual(
    p: &PhaseParams,
    s: SParam,
    cfg: &SuiteConfig,
    points: &[Complex64],
) -> Result<f64> {
    let spec = WeightSpec::PhiWeight(*p);
    let kernel = GaussianKernel::phi_projection(p);
    let f = idempotence_input();
    let hint = Decay::new(0.75, 0.0, -0.25);
    let q = c(idempotence_image_gaussian(s), 0.0);
    let op = KernelOperator::new(
        kernel,
        spec,
        Decay::holomorphic_gaussian(q),
        cfg.projection_nodes,
    )?;
    let mut samples = Vec::with_capacity(op.grid().len());
    for &w in op.grid().points() {
        let pf = apply_kernel(&kernel, &spec, &f, w, hint, cfg.projection_nodes)?;
        samples.push(safe_ln(pf) + spec.exponent(w));
    }
    max_over(points.iter().map(|&z| {
        let once = apply_kernel(&kernel, &spec, &f, z, hint, cfg.nodes)?;
        let twice = op.apply_sampled(&samples, z)?;
        Ok(relative(twice, once))
    }))
}

/// The triples checked against the `X_s` weight: both fixed triples and the
/// family `(i/s, +-i sqrt(1 - s^2), t + i s)`.
fn abc_triples(s: SParam) -> Vec<(String, PhaseParams)> {
    let mut v = vec![
        ("first".to_string(), first_triple(s)),
        ("second".to_string(), second_triple(s)),
    ];
    for t in [-2.0, -0.5, 0.5, 2.0] {
        for sign in [-1.0, 1.0] {
            v.push((
                format!("t={t},sign={sign}"),
                solve_abc(s, sign, t).expect("valid s"),
            ));
        }
    }
    v
}

pub fn suite_reproduce(cfg: &SuiteConfig) -> VerificationReport {
    let started = Instant::now();
    let points = unit_disk_points();
    let n_top = cfg.n_max.min(8);

    let mut kernel = CheckBuilder::new(
        "reproduce.kernel",
        ANCHOR_XS_KERNEL,
        "relative error of the K_s integral of psi_n^s against psi_n^s(z), max over 9 points in the unit disk",
        Comparison::Below,
        cfg,
    );
    let mut zero = CheckBuilder::new(
        "reproduce.zero",
        ANCHOR_XS_KERNEL,
        "|K_s applied to the zero function|",
        Comparison::Below,
        cfg,
    );
    let mut origin = CheckBuilder::new(
        "reproduce.k_s_origin",
        ANCHOR_XS_KERNEL,
        "K_s(0, 0), to be read against (1 - s^2) / (2 pi s)",
        Comparison::Report,
        cfg,
    );
    for s in cfg.s_params() {
        let spec = WeightSpec::Xs(s);
        let k = k_s(cfg, s);
        for n in 0..=n_top {
            let r = psi_s_fn(n, s).and_then(|f| {
                max_over(points.iter().map(|&z| {
                    let v = apply_kernel(&k, &spec, &f, z, psi_decay(), cfg.nodes)?;
                    Ok(relative(v, f.eval(z)))
                }))
            });
            kernel.record(format!("{}/n={n}", s_label(s)), r);
        }
        zero.record(
            s_label(s),
            apply_kernel(
                &k,
                &spec,
                &PlaneFn::zero(),
                points[4],
                psi_decay(),
                cfg.nodes,
            )
            .map(|v| v.norm()),
        );
        origin.record(s_label(s), Ok(k.eval(c(0.0, 0.0), c(0.0, 0.0)).re));
    }
    let origin = origin.note("expected (1 - s^2) / (2 pi s): 0.5968310 for s = 1/4, 0.2387324 for s = 1/2, 0.0928404 for s = 3/4");

    let mut mehler = CheckBuilder::new(
        "reproduce.mehler",
        ANCHOR_MEHLER,
        "|sum_{n <= 60} psi_n^s(z) conj(psi_n^s(w)) - K_s(z, w)| at random pairs in the unit disk",
        Comparison::Below,
        cfg,
    )
    .note(
        "the partial sum converges like ((1 - s)/(1 + s))^N only up to a factor exp(c sqrt(N) |Im|); \
         for s = 1/4 and points near the imaginary axis sixty terms are not enough for 1e-9",
    );
    let mut r = rng(cfg, STREAM_MEHLER);
    for s in cfg.s_params() {
        let k = k_s(cfg, s);
        for i in 0..MEHLER_PAIRS {
            let (z, w) = (disk_point(&mut r, 1.0), disk_point(&mut r, 1.0));
            let res = mehler_partial_sum(s, MEHLER_TERMS, z, w).map(|v| (v - k.eval(z, w)).norm());
            mehler.record(format!("{}/pair={i:02}", s_label(s)), res);
        }
    }

    let mut abc = CheckBuilder::new(
        "reproduce.abc",
        ANCHOR_ABC,
        "largest residual of the two abc equations",
        Comparison::Below,
        cfg,
    );
    let mut phi = CheckBuilder::new(
        "reproduce.phi_weight",
        ANCHOR_PHI,
        "max |E_Phi(z) - E_X_s(z)| of the weight exponents at 1000 random points, |z| <= 1.5",
        Comparison::Below,
        cfg,
    );
    for s in cfg.s_params() {
        let triples = abc_triples(s);
        for (label, p) in &triples {
            abc.record(
                format!("{}/{label}", s_label(s)),
                Ok(check_abc(p, s).max_abs()),
            );
        }
        let mut r = rng(cfg, STREAM_PHI_WEIGHT);
        let pts: Vec<Complex64> = (0..POINTWISE_SAMPLES)
            .map(|_| disk_point(&mut r, 1.5))
            .collect();
        for (label, p) in &triples {
            let res = max_over(pts.iter().map(|&z| {
                let xs = weight_exponent(&WeightSpec::Xs(s), z);
                let e = weight_exponent(&WeightSpec::PhiWeight(*p), z);
                Ok((e - xs).abs())
            }));
            phi.record(format!("{}/{label}", s_label(s)), res);
        }
    }

    let mut projection = CheckBuilder::new(
        "reproduce.projection",
        ANCHOR_PROJECTION,
        "|C_Phi e^{2 Psi} integral over L^2_Phi - K_s integral over X_s| on 20 random Gaussian polynomials, \
         3 random points each",
        Comparison::Below,
        cfg,
    );
    for s in cfg.s_params() {
        let triples = [
            ("first", first_triple(s)),
            ("second", second_triple(s)),
            ("t=1", solve_abc(s, -1.0, 1.0).expect("valid s")),
        ];
        let k = k_s(cfg, s);
        for (label, p) in triples {
            let mut r = rng(cfg, STREAM_PROJECTION);
            let kernel = GaussianKernel::phi_projection(&p);
            let res = max_over((0..RANDOM_MEMBERS).flat_map(|_| {
                let f = gaussian_polynomial(&mut r);
                let pts: Vec<Complex64> = (0..3).map(|_| disk_point(&mut r, 1.0)).collect();
                pts.into_iter()
                    .map(|z| {
                        let a = apply_kernel(
                            &kernel,
                            &WeightSpec::PhiWeight(p),
                            &f,
                            z,
                            psi_decay(),
                            cfg.nodes,
                        )?;
                        let b =
                            apply_kernel(&k, &WeightSpec::Xs(s), &f, z, psi_decay(), cfg.nodes)?;
                        Ok((a - b).norm())
                    })
                    .collect::<Vec<_>>()
            }));
            projection.record(format!("{}/{label}", s_label(s)), res);
        }
    }

    let mut idem = CheckBuilder::new(
        "reproduce.idempotence",
        ANCHOR_PROJECTION,
        "relative |P(P f) - P f| for f = conj(z) e^{-conj(z)^2/2} e^{-|z|^2/4}, at 3 points",
        Comparison::Below,
        cfg,
    );
    for s in cfg.s_params() {
        let pts = [points[0], points[4], points[8]];
        idem.record(
            s_label(s),
            idempotence_residual(&first_triple(s), s, cfg, &pts),
        );
    }

    report(
        "reproduce",
        cfg,
        vec![
            kernel.finish(),
            zero.finish(),
            origin.finish(),
            mehler.finish(),
            abc.finish(),
            phi.finish(),
            projection.finish(),
            idem.finish(),
        ],
        started,
    )
}

/// Ellipse parameters with `lambda` in each open quadrant.
pub fn quadrant_ellipse_params() -> [(f64, f64); 4] {
    [(0.8, 0.4), (1.2, 0.5), (1.2, -0.5), (0.8, -0.4)]
}

fn ellipse_label(a: f64, b: f64) -> String {
    format!("alpha={a},beta={b}")
}

fn rodrigues_residual(
    n: usize,
    p: &EllipseParams,
    root: Complex64,
    points: &[Complex64],
) -> Result<f64> {
    max_over(points.iter().map(|&z| {
        let oracle = rodrigues_oracle(n, p.lambda, z)? * psi0_ellipse(p, z);
        let closed = psi_n_ellipse_with_root(n, p, z, root)?;
        Ok(relative(closed, oracle))
    }))
}

pub fn suite_ellipse(cfg: &SuiteConfig) -> VerificationReport {
    let started = Instant::now();
    let points = unit_disk_points();
    let params = cfg.ellipse_list();

    let mut mu_lambda = CheckBuilder::new(
        "ellipse.mu_lambda",
        ANCHOR_ELLIPSE,
        "relative error of mu and lambda at (sqrt s, 0) against (1 - s)/(1 + s) and 2s/(1 - s^2)",
        Comparison::Below,
        cfg,
    );
    for s in cfg.s_params() {
        let sv = s.value();
        let res = ellipse_params(sv.sqrt(), 0.0).map(|p| {
            let mu = relative(p.mu, c((1.0 - sv) / (1.0 + sv), 0.0));
            let la = relative(p.lambda, c(2.0 * sv / (1.0 - sv * sv), 0.0));
            mu.max(la)
        });
        mu_lambda.record(s_label(s), res);
    }

    let mut weight = CheckBuilder::new(
        "ellipse.weight_identity",
        ANCHOR_ELLIPSE_WEIGHT,
        "max | |Psi_0|^2 e^{-|z|^2/2} - exp(-|zeta|^2 / (1 + alpha^2 + beta^2)) | at 1000 random points, |z| <= 1.5",
        Comparison::Below,
        cfg,
    );
    let mut gram = CheckBuilder::new(
        "ellipse.gram",
        ANCHOR_ELLIPSE,
        "largest |G_mn| / sqrt(G_mm G_nn), m != n, for Psi_0..Psi_{min(n_max, 6)} in H_B",
        Comparison::Below,
        cfg,
    );
    let mut norm0 = CheckBuilder::new(
        "ellipse.norm0",
        ANCHOR_ELLIPSE,
        "relative error of G_00 against |Psi_0|^2 = pi (1 + alpha^2 + beta^2) / alpha",
        Comparison::Below,
        cfg,
    );
    let mut norms = CheckBuilder::new(
        "ellipse.norms",
        ANCHOR_ELLIPSE,
        "the squared norms G_nn",
        Comparison::Report,
        cfg,
    );
    let mut rodrigues = CheckBuilder::new(
        "ellipse.rodrigues",
        ANCHOR_ELLIPSE,
        "relative error of the closed form of Psi_n against the Cauchy-integral oracle, max over 9 points",
        Comparison::Below,
        cfg,
    );
    let count = cfg.n_max.min(6) + 1;
    let n_oracle = cfg.n_max.min(MAX_ORACLE_DEGREE);
    for &(a, b) in &params {
        let label = ellipse_label(a, b);
        let p = match ellipse_params(a, b) {
            Ok(p) => p,
            Err(e) => {
                weight.record(label.clone(), Err(e));
                continue;
            }
        };
        let r2 = 1.0 + a * a + b * b;
        let mut r = rng(cfg, STREAM_ELLIPSE_WEIGHT);
        let res = max_over((0..POINTWISE_SAMPLES).map(|_| {
            let z = disk_point(&mut r, 1.5);
            let lhs = psi0_ellipse(&p, z).norm_sqr() * (-z.norm_sqr() / 2.0).exp();
            let rhs = (-zeta_map(&p, z).norm_sqr() / r2).exp();
            Ok((lhs - rhs).abs())
        }));
        weight.record(label.clone(), res);

        let spec = WeightSpec::StandardBargmann;
        let hint = 2.0 * Decay::holomorphic_gaussian(p.mu / 4.0);
        match gram_matrix(|n| psi_n_ellipse_fn(n, p), count, &spec, hint, cfg.nodes) {
            Ok(g) => {
                gram.record(label.clone(), Ok(g.max_relative_off_diagonal));
                let exact = PI * r2 / a;
                norm0.record(
                    label.clone(),
                    Ok((g.matrix[0][0].re - exact).abs() / exact + g.matrix[0][0].im.abs()),
                );
                for (n, d) in g.diagonal().iter().enumerate() {
                    norms.record(format!("{label}/n={n}"), Ok(d.re));
                }
            }
            Err(e) => {
                norm0.record(label.clone(), Err(e.clone()));
                gram.record(label.clone(), Err(e));
            }
        }

        for n in 0..=n_oracle {
            let root = (p.lambda / 2.0).sqrt();
            rodrigues.record(
                format!("{label}/n={n}"),
                rodrigues_residual(n, &p, root, &points),
            );
        }
    }

    let mut branch = CheckBuilder::new(
        "ellipse.branch",
        ANCHOR_ELLIPSE,
        "both square roots of lambda/2 against the oracle, lambda in all four quadrants, n <= 12",
        Comparison::Below,
        cfg,
    );
    for (a, b) in quadrant_ellipse_params() {
        let label = ellipse_label(a, b);
        match ellipse_params(a, b) {
            Ok(p) => {
                let root = (p.lambda / 2.0).sqrt();
                let res = max_over((0..=cfg.n_max.min(12)).flat_map(|n| {
                    [
                        rodrigues_residual(n, &p, root, &points),
                        rodrigues_residual(n, &p, -root, &points),
                    ]
                }));
                branch.record(format!("{label}/lambda={:.4}", p.lambda), res);
            }
            Err(e) => branch.record(label, Err(e)),
        }
    }

    report(
        "ellipse",
        cfg,
        vec![
            mu_lambda.finish(),
            weight.finish(),
            gram.finish(),
            norm0.finish(),
            norms.finish(),
            rodrigues.finish(),
            branch.finish(),
        ],
        started,
    )
}

/// `q` of the image `e^{q z^2}` of `e^{-z^2/2}` under the isomorphism whose
/// dilation factor is `arg`.
fn iso_image_gaussian(s: SParam, arg: f64) -> f64 {
    let sv = s.value();
    (1.0 + sv * sv) / (4.0 * (1.0 - sv * sv)) - 0.5 * arg * arg
}

fn nested_images(
    p: &PhaseParams,
    s: SParam,
    count: usize,
    nodes: usize,
) -> Result<Vec<NestedComposition>> {
    (0..count)
        .map(|n| {
            NestedComposition::new(
                p,
                &psi_s_fn(n, s)?,
                c(-0.5, 0.0),
                NestedNodes::for_grid(nodes),
            )
        })
        .collect()
}

pub fn suite_isomorphism(cfg: &SuiteConfig) -> VerificationReport {
    let started = Instant::now();

    let mut round_trip = CheckBuilder::new(
        "isomorphism.round_trip",
        ANCHOR_ISO,
        "max |f - inverse(forward(f))| / max(1, |f|) on 20 random Gaussian polynomials, 5 points each, |z| <= 1.5",
        Comparison::Below,
        cfg,
    );
    let mut zero = CheckBuilder::new(
        "isomorphism.zero",
        ANCHOR_ISO,
        "|image of the zero function|",
        Comparison::Below,
        cfg,
    );
    let mut isometry = CheckBuilder::new(
        "isomorphism.isometry",
        ANCHOR_ISO,
        "max |G - I| in H_B for the images of psi_0^s..psi_{min(n_max, 8)}^s",
        Comparison::Below,
        cfg,
    );
    let mut scaling = CheckBuilder::new(
        "isomorphism.scaling",
        ANCHOR_ISO_SCALING,
        "| |image of psi_0^s|^2 - 1 | for the dilation by s/(1 - s^2) instead of its square root",
        Comparison::Above,
        cfg,
    )
    .note("a residual of 1.7976931348623157e308 means the image is not square integrable in H_B");
    let mut corr = CheckBuilder::new(
        "isomorphism.correspondence",
        ANCHOR_CORRESPONDENCE,
        "max absolute residual of the pointwise psi_n^s / Psi_n^{sqrt s, 0} identity at 1000 random points, \
         |z| <= 1.5, n <= min(n_max, 20)",
        Comparison::Below,
        cfg,
    );
    let iso_count = cfg.n_max.min(8) + 1;
    for s in cfg.s_params() {
        let sv = s.value();
        let mut r = rng(cfg, STREAM_ROUND_TRIP);
        let res = max_over((0..RANDOM_MEMBERS).flat_map(|_| {
            let f = gaussian_polynomial(&mut r);
            let back = iso_b_to_x(s, &iso_x_to_b(s, &f));
            let pts: Vec<Complex64> = (0..5).map(|_| disk_point(&mut r, 1.5)).collect();
            pts.into_iter()
                .map(|z| {
                    let v = f.eval(z);
                    Ok((back.eval(z) - v).norm() / v.norm().max(1.0))
                })
                .collect::<Vec<_>>()
        }));
        round_trip.record(s_label(s), res);
        zero.record(
            s_label(s),
            Ok(iso_x_to_b(s, &PlaneFn::zero()).eval(c(0.4, -0.3)).norm()),
        );

        let q = iso_image_gaussian(s, (sv / (1.0 - sv * sv)).sqrt());
        let images: Result<Vec<PlaneFn>> = (0..iso_count)
            .map(|n| Ok(iso_x_to_b(s, &psi_s_fn(n, s)?)))
            .collect();
        let res = images.and_then(|imgs| {
            let members: Vec<_> = imgs.iter().map(|f| move |z| f.eval(z)).collect();
            h_b_gram(&members, c(q, 0.0), cfg.nodes)
        });
        isometry.record(s_label(s), res.map(|g| g.max_identity_deviation));

        let qu = iso_image_gaussian(s, sv / (1.0 - sv * sv));
        let hint = 2.0 * Decay::holomorphic_gaussian(c(qu, 0.0));
        let res = psi_s_fn(0, s).and_then(|f| {
            let img = iso_x_to_b_unrooted(s, &f);
            if (WeightSpec::StandardBargmann.decay() + hint).is_positive_definite() {
                let v = inner_product(&img, &img, &WeightSpec::StandardBargmann, hint, cfg.nodes)?;
                Ok((v.re - 1.0).abs())
            } else {
                Ok(f64::MAX)
            }
        });
        scaling.record(s_label(s), res);

        let mut r = rng(cfg, STREAM_CORRESPONDENCE);
        let pts: Vec<Complex64> = (0..POINTWISE_SAMPLES)
            .map(|_| disk_point(&mut r, 1.5))
            .collect();
        for n in 0..=cfg.n_max.min(20) {
            let res = max_over(
                pts.iter()
                    .map(|&z| hermite_correspondence_residual(s, n, z)),
            );
            corr.record(format!("{}/n={n}", s_label(s)), res);
        }
    }

    let mut bgram = CheckBuilder::new(
        "isomorphism.bargmann_gram",
        ANCHOR_BARGMANN,
        "max |G - I| in H_B for B h_0..B h_{min(n_max, 6)}, B by quadrature",
        Comparison::Below,
        cfg,
    );
    let mut bpoint = CheckBuilder::new(
        "isomorphism.bargmann_pointwise",
        ANCHOR_BARGMANN,
        "max |B h_n(z) - z^n / sqrt(pi 2^{n+1} n!)| over 9 points in the unit disk",
        Comparison::Below,
        cfg,
    );
    let b_count = cfg.n_max.min(6) + 1;
    let hfs: Vec<LineFn> = (0..b_count)
        .map(|n| LineFn::new(move |x| c(hermite_function(n, x), 0.0)))
        .collect();
    let members: Vec<_> = hfs
        .iter()
        .map(|h| move |z| bargmann(h, z, 0.5, cfg.nodes).unwrap_or(c(f64::NAN, f64::NAN)))
        .collect();
    let res = h_b_gram(&members, c(0.0, 0.0), cfg.nodes).and_then(|g| {
        if g.max_identity_deviation.is_nan() {
            Err(Error::NonFinite {
                location: "Bargmann images".into(),
            })
        } else {
            Ok(g.max_identity_deviation)
        }
    });
    bgram.record(format!("n<{b_count}"), res);
    for (n, h) in hfs.iter().enumerate() {
        let res = max_over(
            unit_disk_points()
                .into_iter()
                .map(|z| Ok((bargmann(h, z, 0.5, cfg.nodes)? - normalized_monomial(n, z)).norm())),
        );
        bpoint.record(format!("n={n}"), res);
    }

    let mut bt = CheckBuilder::new(
        "isomorphism.b_tstar_gram",
        ANCHOR_B_TSTAR,
        "max |G - I| in H_B for B T* psi_0^s..psi_{min(n_max, 4)}^s, T* and B by nested quadrature",
        Comparison::Below,
        cfg,
    );
    let bt_count = cfg.n_max.min(4) + 1;
    for s in cfg.s_params() {
        for (label, p) in [("first", first_triple(s)), ("second", second_triple(s))] {
            let res = nested_images(&p, s, bt_count, cfg.nodes).and_then(|imgs| {
                let q = imgs[0].image_gaussian();
                let members: Vec<_> = imgs.iter().map(|f| move |z| f.eval(z)).collect();
                h_b_gram(&members, q, cfg.nodes)
            });
            bt.record(
                format!("{}/{label}", s_label(s)),
                res.map(|g| g.max_identity_deviation),
            );
        }
    }

    report(
        "isomorphism",
        cfg,
        vec![
            round_trip.finish(),
            zero.finish(),
            isometry.finish(),
            scaling.finish(),
            corr.finish(),
            bgram.finish(),
            bpoint.finish(),
            bt.finish(),
        ],
        started,
    )
}

pub fn suite_kernels(cfg: &SuiteConfig) -> VerificationReport {
    let started = Instant::now();
    let points = unit_disk_points();
    let count = cfg.n_max.min(4) + 1;

    let mut nested = CheckBuilder::new(
        "kernels.nested",
        ANCHOR_G_KERNELS,
        "max |G integral of psi_n^s - nested B T* psi_n^s| over 9 points in the unit disk, n <= min(n_max, 4)",
        Comparison::Below,
        cfg,
    );
    let mut sign = CheckBuilder::new(
        "kernels.sign",
        ANCHOR_G_KERNELS,
        "max |G1 integral - nested B T* psi_n^s| with b = +i sqrt(1 - s^2), odd n",
        Comparison::Above,
        cfg,
    )
    .note("b and -b give the same weight; for even n the two images coincide, so only odd n discriminate");
    let mut prefactor = CheckBuilder::new(
        "kernels.prefactor",
        ANCHOR_G_KERNELS,
        "sqrt(1 - s) / (2^{1/2} pi s^{1/4}), the prefactor of G1 and G2",
        Comparison::Report,
        cfg,
    );
    let mut zero = CheckBuilder::new(
        "kernels.zero",
        ANCHOR_G_KERNELS,
        "|G1 integral and nested B T* of the zero function|",
        Comparison::Below,
        cfg,
    );
    let mut c_phi = CheckBuilder::new(
        "kernels.c_phi",
        ANCHOR_PROJECTION,
        "relative error of the Phi projection with C_Phi = |b|^2 / (2 pi Im c) applied to psi_0^s, 9 points",
        Comparison::Below,
        cfg,
    );
    let mut c_phi_modulus = CheckBuilder::new(
        "kernels.c_phi_modulus",
        ANCHOR_PROJECTION,
        "relative error of the same with C_Phi = |b| / (2 pi Im c), smallest over 9 points",
        Comparison::Above,
        cfg,
    );
    let mut c_phi_ratio = CheckBuilder::new(
        "kernels.c_phi_ratio",
        ANCHOR_PROJECTION,
        "| |b| (|b| version) / psi_0^s - 1 |: the |b| version is off by exactly 1 / |b|",
        Comparison::Below,
        cfg,
    );

    for s in cfg.s_params() {
        let spec = WeightSpec::Xs(s);
        for (label, p, k) in [
            ("G1", first_triple(s), GaussianKernel::g1(s)),
            ("G2", second_triple(s), GaussianKernel::g2(s)),
        ] {
            for n in 0..count {
                let res = psi_s_fn(n, s).and_then(|f| {
                    let comp = NestedComposition::new(
                        &p,
                        &f,
                        c(-0.5, 0.0),
                        NestedNodes::for_grid(cfg.nodes),
                    )?;
                    max_over(points.iter().map(|&z| {
                        let direct = apply_kernel(&k, &spec, &f, z, psi_decay(), cfg.nodes)?;
                        Ok((comp.eval(z) - direct).norm())
                    }))
                });
                nested.record(format!("{}/{label}/n={n}", s_label(s)), res);
            }
        }

        let other = solve_abc(s, 1.0, 0.0).expect("valid s");
        for n in (1..count).step_by(2) {
            let res = psi_s_fn(n, s).and_then(|f| {
                let comp = NestedComposition::new(
                    &other,
                    &f,
                    c(-0.5, 0.0),
                    NestedNodes::for_grid(cfg.nodes),
                )?;
                max_over(points.iter().map(|&z| {
                    let direct =
                        apply_kernel(&GaussianKernel::g1(s), &spec, &f, z, psi_decay(), cfg.nodes)?;
                    Ok((comp.eval(z) - direct).norm())
                }))
            });
            sign.record(format!("{}/n={n}", s_label(s)), res);
        }

        prefactor.record(s_label(s), Ok(g_prefactor(s)));

        let res = NestedComposition::new(
            &first_triple(s),
            &PlaneFn::zero(),
            c(-0.5, 0.0),
            NestedNodes::for_grid(cfg.nodes),
        )
        .and_then(|comp| {
            let direct = apply_kernel(
                &GaussianKernel::g1(s),
                &spec,
                &PlaneFn::zero(),
                points[0],
                psi_decay(),
                cfg.nodes,
            )?;
            Ok(comp.eval(points[0]).norm() + direct.norm())
        });
        zero.record(s_label(s), res);

        let p = first_triple(s);
        let phi_spec = WeightSpec::PhiWeight(p);
        let good = GaussianKernel::phi_projection(&p);
        let bad = GaussianKernel::phi_projection_with_prefactor(&p, p.c_capital_phi_modulus());
        let psi0 = psi_s_fn(0, s);
        let evals = psi0.and_then(|f| {
            points
                .iter()
                .map(|&z| {
                    let exact = f.eval(z);
                    let g = apply_kernel(&good, &phi_spec, &f, z, psi_decay(), cfg.nodes)?;
                    let b = apply_kernel(&bad, &phi_spec, &f, z, psi_decay(), cfg.nodes)?;
                    Ok((exact, g, b))
                })
                .collect::<Result<Vec<_>>>()
        });
        match evals {
            Ok(v) => {
                c_phi.record(
                    s_label(s),
                    max_over(v.iter().map(|&(e, g, _)| Ok(relative(g, e)))),
                );
                let min_bad = v
                    .iter()
                    .map(|&(e, _, b)| relative(b, e))
                    .fold(f64::INFINITY, f64::min);
                c_phi_modulus.record(s_label(s), Ok(min_bad));
                let factor = p.b().norm();
                c_phi_ratio.record(
                    s_label(s),
                    max_over(v.iter().map(|&(e, _, b)| Ok((b / e * factor - 1.0).norm()))),
                );
            }
            Err(e) => {
                c_phi.record(s_label(s), Err(e.clone()));
                c_phi_modulus.record(s_label(s), Err(e.clone()));
                c_phi_ratio.record(s_label(s), Err(e));
            }
        }
    }

    report(
        "kernels",
        cfg,
        vec![
            nested.finish(),
            sign.finish(),
            prefactor.finish(),
            zero.finish(),
            c_phi.finish(),
            c_phi_modulus.finish(),
            c_phi_ratio.finish(),
        ],
        started,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Orthonormal,
    Reproduce,
    Ellipse,
    Isomorphism,
    Kernels,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Orthonormal,
        Suite::Reproduce,
        Suite::Ellipse,
        Suite::Isomorphism,
        Suite::Kernels,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Orthonormal => "orthonormal",
            Suite::Reproduce => "reproduce",
            Suite::Ellipse => "ellipse",
            Suite::Isomorphism => "isomorphism",
            Suite::Kernels => "kernels",
        }
    }

    pub fn run(self, cfg: &SuiteConfig) -> VerificationReport {
        match self {
            Suite::Orthonormal => suite_orthonormal(cfg),
            Suite::Reproduce => suite_reproduce(cfg),
            Suite::Ellipse => suite_ellipse(cfg),
            Suite::Isomorphism => suite_isomorphism(cfg),
            Suite::Kernels => suite_kernels(cfg),
        }
    }
}

/// Every suite, in a fixed order.
pub fn run_all(cfg: &SuiteConfig) -> Vec<VerificationReport> {
    Suite::ALL.iter().map(|s| s.run(cfg)).collect()
}
