//! Acceptance suite: one test per top-level criterion, each printing a pass/fail
//! line with the measured quantity. Tolerances are stated inline; budgets are sized
//! for a single CPU core.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use wehrl::combinatorics::{
    a_const, c_alpha, c_tilde_sq_by_degree, incomplete_beta_primitive, Params,
};
use wehrl::geometry::{distance_to_v, geodesic_from_x0};
use wehrl::hessian::{
    d2g_closed_form, d2g_finite_difference_batch, h_tilde, HessianCoefficients,
};
use wehrl::measure::{entropy_g, QuadratureScheme};
use wehrl::phi::{parse_phi_spec, ConvexPhi};
use wehrl::stability::{
    deficit, far_field_bound, stability_scan, verify_far_field, Sampler,
};
use wehrl::state_space::{PolynomialState, TangentVector};

fn criterion(idx: usize, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {idx} [{name}]: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {idx} [{name}] failed: {detail}");
}

fn scheme_for(params: &Params, n_mc: u64, seed: u64) -> QuadratureScheme {
    if params.n() == 1 {
        QuadratureScheme::tensor_default(params.m())
    } else {
        QuadratureScheme::MonteCarlo { n: n_mc, seed }
    }
}

/// 1. Closed-form incomplete-beta primitive vs adaptive quadrature, rel ≤ 1e−10,
///    for N ≤ 4, M ≤ 6, 0 ≤ K ≤ M, s ∈ {0.1, 0.5, 1, 2, 10, ∞}.
#[test]
fn criterion_1_beta_primitive() {
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for n in 1..=4u32 {
        for m in 1..=6u32 {
            for k in 0..=m {
                for s in [0.1, 0.5, 1.0, 2.0, 10.0] {
                    let closed = incomplete_beta_primitive(m, n, k, s).unwrap();
                    let (q, _) = wehrl::quad::adaptive(
                        |sig| {
                            sig.powi((k + n) as i32 - 1)
                                * (1.0 + sig).powi(-((m + n + 1) as i32))
                        },
                        0.0,
                        s,
                        1e-15,
                        1e-13,
                    );
                    worst = worst.max((closed - q).abs() / q.abs());
                    cases += 1;
                }
                // s = ∞: substitute σ = x/(1−x); the integrand becomes the
                // polynomial x^{K+N−1} (1−x)^{M−K} on [0, 1].
                let closed = incomplete_beta_primitive(m, n, k, f64::INFINITY).unwrap();
                let (q, _) = wehrl::quad::adaptive(
                    |x| x.powi((k + n) as i32 - 1) * (1.0 - x).powi((m - k) as i32),
                    0.0,
                    1.0,
                    1e-15,
                    1e-13,
                );
                worst = worst.max((closed - q).abs() / q.abs());
                cases += 1;
            }
        }
    }
    criterion(
        1,
        "incomplete-beta primitive",
        worst <= 1e-10,
        &format!("max rel err {worst:.3e} over {cases} cases"),
    );
}

/// 2. c̃²_K = A_{M,N,K}/A_{M,N,0} to 1e−14, and c̃²_α = c_α²·E[|ω^α|²] over the
///    uniform unit sphere of C^N within 3σ at 10⁶ samples.
#[test]
fn criterion_2_normalization_constants() {
    // Deterministic identity across a parameter sweep.
    let mut worst_id = 0.0f64;
    for n in 1..=4u32 {
        for m in 1..=6u32 {
            for k in 0..=m {
                let lhs = c_tilde_sq_by_degree(k, m, n).unwrap();
                let rhs = a_const(m, n, k).unwrap() / a_const(m, n, 0).unwrap();
                worst_id = worst_id.max((lhs / rhs - 1.0).abs());
            }
        }
    }

    // Monte Carlo sphere integral at (N, M) = (2, 2) and (3, 2), all indices.
    let mut worst_sigma = 0.0f64;
    for (n, m, seed) in [(2u32, 2u32, 1001u64), (3, 2, 1002)] {
        let params = Params::new(n, m).unwrap();
        let dim = params.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = 1_000_000usize;
        let mut sums = vec![0.0f64; dim];
        let mut sumsq = vec![0.0f64; dim];
        let mut omega = vec![Complex64::ZERO; n as usize];
        for _ in 0..samples {
            let mut norm_sq = 0.0;
            for w in omega.iter_mut() {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *w = Complex64::new(re, im);
                norm_sq += w.norm_sqr();
            }
            let inv = 1.0 / norm_sq;
            for (i, alpha) in params.indices().iter().enumerate() {
                let mut v = 1.0f64;
                for (j, &aj) in alpha.components().iter().enumerate() {
                    for _ in 0..aj {
                        v *= omega[j].norm_sqr() * inv;
                    }
                }
                sums[i] += v;
                sumsq[i] += v * v;
            }
        }
        for (i, alpha) in params.indices().iter().enumerate() {
            let mean = sums[i] / samples as f64;
            let var = (sumsq[i] / samples as f64 - mean * mean).max(0.0);
            let se = (var / samples as f64).sqrt();
            let ca2 = c_alpha(alpha, m).unwrap().powi(2);
            let expect = c_tilde_sq_by_degree(alpha.degree(), m, n).unwrap();
            let sigmas = (ca2 * mean - expect).abs() / (ca2 * se).max(1e-300);
            if alpha.degree() > 0 {
                worst_sigma = worst_sigma.max(sigmas);
            }
        }
    }
    criterion(
        2,
        "normalization constants",
        worst_id <= 1e-14 && worst_sigma <= 3.0,
        &format!("identity dev {worst_id:.2e}, sphere MC worst {worst_sigma:.2} sigma"),
    );
}

/// 3. b_α vanishes at degree 1 (tol 1e−10) and is < −1e−6 for 2 ≤ |α| ≤ M, over
///    Φ ∈ {pow:2, pow:3, xlogx, mollified hinge}, N ≤ 3, M ≤ 5; b₍₂₎(1,2,pow:2) =
///    −4/15 within 1e−8.
#[test]
fn criterion_3_hessian_coefficient_signs() {
    let phis = [
        parse_phi_spec("pow:2").unwrap(),
        parse_phi_spec("pow:3").unwrap(),
        parse_phi_spec("xlogx").unwrap(),
        parse_phi_spec("mollify:0.05,hinge:0.5").unwrap(),
    ];
    let mut worst_b1 = 0.0f64;
    let mut max_high = f64::NEG_INFINITY;
    for n in 1..=3u32 {
        for m in 1..=5u32 {
            let params = Params::new(n, m).unwrap();
            for phi in &phis {
                let coeffs = HessianCoefficients::compute(&params, phi).unwrap();
                let (b1, _) = coeffs.by_degree(1).unwrap();
                worst_b1 = worst_b1.max(b1.abs());
                for k in 2..=m {
                    let (b, _) = coeffs.by_degree(k).unwrap();
                    max_high = max_high.max(b);
                }
            }
        }
    }
    let p12 = Params::new(1, 2).unwrap();
    let c12 = HessianCoefficients::compute(&p12, &phis[0]).unwrap();
    let (b2, _) = c12.by_degree(2).unwrap();
    let pinned_err = (b2 + 4.0 / 15.0).abs();
    criterion(
        3,
        "quadratic-form coefficients",
        worst_b1 <= 1e-10 && max_high < -1e-6 && pinned_err <= 1e-8,
        &format!(
            "max |b_1| {worst_b1:.2e}, max b_K (K≥2) {max_high:.3e}, |b_2 + 4/15| {pinned_err:.2e}"
        ),
    );
}

/// 4. Finite-difference second derivative vs 2Σ b_α |Y_α|² within 1e−3 relative,
///    20 random normal directions at (1,2), (1,3), (2,2), Φ = pow:2, noise < h².
#[test]
fn criterion_4_finite_difference_hessian() {
    let phi = ConvexPhi::pow(2.0).unwrap();
    let mut worst_rel = 0.0f64;
    let mut worst_noise_ratio = 0.0f64;
    for (n, m, h, samples) in [
        (1u32, 2u32, 1e-2, 0u64),
        (1, 3, 1e-2, 0),
        (2, 2, 5e-2, 16_000_000),
    ] {
        let params = Params::new(n, m).unwrap();
        let coeffs = HessianCoefficients::compute(&params, &phi).unwrap();
        let ys: Vec<TangentVector> = (0..20)
            .map(|i| TangentVector::random_normal_direction(&params, 2000 + i))
            .collect();
        let fds = d2g_finite_difference_batch(&phi, &ys, h, samples, 77).unwrap();
        for (y, fd) in ys.iter().zip(&fds) {
            let closed = coeffs.d2g_closed_form(y);
            worst_rel = worst_rel.max((fd.value - closed).abs() / closed.abs());
            worst_noise_ratio = worst_noise_ratio.max(fd.noise / (h * h));
            assert!(!fd.noisy, "({n},{m}): noise {} exceeds h²", fd.noise);
        }
    }
    criterion(
        4,
        "finite-difference cross-check",
        worst_rel <= 1e-3 && worst_noise_ratio < 1.0,
        &format!("max rel err {worst_rel:.2e}, max noise/h² {worst_noise_ratio:.2e}"),
    );
}

/// 5. ∫₀¹ Φ″(τ) h̃(τ, Y) dτ = d²G closed form within 1e−6 relative, Φ = pow:2 and a
///    mollified hinge, 10 random normal directions.
#[test]
fn criterion_5_kernel_identity() {
    let phis = [
        parse_phi_spec("pow:2").unwrap(),
        parse_phi_spec("mollify:0.08,hinge:0.45").unwrap(),
    ];
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (n, m) in [(1u32, 3u32), (2, 2)] {
        let params = Params::new(n, m).unwrap();
        for phi in &phis {
            for i in 0..5u64 {
                let y = TangentVector::random_normal_direction(&params, 3000 + i);
                let closed = d2g_closed_form(&params, phi, &y).unwrap();
                // h̃ aggregates 2|Y_α|² w_{|α|}(τ), so integrating Φ″ against it
                // reproduces 2 Σ b_α |Y_α|² directly.
                let (integral, _) = phi
                    .second_derivative()
                    .integrate(|tau| h_tilde(&params, tau, &y).unwrap(), 1e-12);
                worst = worst.max((integral - closed).abs() / closed.abs());
                cases += 1;
            }
        }
    }
    criterion(
        5,
        "curvature kernel identity",
        worst <= 1e-6,
        &format!("max rel err {worst:.2e} over {cases} cases"),
    );
}

/// 6. Coherent maximality: over 10⁴ uniform random states (N ≤ 2, M ≤ 4, pow:2),
///    deficit ≥ −(3·stderr + 1e−9).
#[test]
fn criterion_6_coherent_maximality() {
    let phi = ConvexPhi::pow(2.0).unwrap();
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0usize;
    for n in 1..=2u32 {
        for m in 1..=4u32 {
            let params = Params::new(n, m).unwrap();
            for i in 0..1250u64 {
                let state = PolynomialState::random_state(&params, 4000 + i);
                let scheme = scheme_for(&params, 20_000, 9000 + i);
                let (def, err) = deficit(&state, &phi, scheme).unwrap();
                worst = worst.max(-(def + 3.0 * err));
                count += 1;
            }
        }
    }
    criterion(
        6,
        "coherent maximality",
        worst <= 1e-9,
        &format!("worst −(deficit + 3·stderr) = {worst:.3e} over {count} states"),
    );
}

/// 7. Distance formula oracles: e₁ at (1,2) has T = 1/2 ± 1e−10 and dist = π/4 ±
///    1e−6; (e₀+e₂)/√2 has T = 1/2 ± 1e−8 despite a circle of maximizers.
#[test]
fn criterion_7_distance_oracles() {
    let p = Params::new(1, 2).unwrap();
    let e1 = PolynomialState::basis_state(&p, 1).unwrap();
    let r1 = distance_to_v(&e1, 32, 7).unwrap();
    let t_err = (r1.t_sup - 0.5).abs();
    let d_err = (r1.dist_geodesic - std::f64::consts::FRAC_PI_4).abs();

    let degenerate = PolynomialState::from_coefficients(
        &p,
        vec![
            Complex64::new(1.0, 0.0),
            Complex64::ZERO,
            Complex64::new(1.0, 0.0),
        ],
    )
    .unwrap();
    let r2 = distance_to_v(&degenerate, 32, 8).unwrap();
    let t2_err = (r2.t_sup - 0.5).abs();

    criterion(
        7,
        "distance oracles",
        t_err <= 1e-10 && d_err <= 1e-6 && t2_err <= 1e-8,
        &format!("e1: |T−1/2| {t_err:.2e}, |dist−π/4| {d_err:.2e}; degenerate |T−1/2| {t2_err:.2e}"),
    );
}

/// 8. Far-field bound: deficit ≥ bound(T) − 3·stderr for 10³ random states
///    (N ≤ 2, M ≤ 4, pow:2); bound(1/2) ≈ 0.02238 at (1,2) vs deficit(e₁) = 1/15.
#[test]
fn criterion_8_far_field_bound() {
    let phi = ConvexPhi::pow(2.0).unwrap();
    let p12 = Params::new(1, 2).unwrap();
    let bound_half = far_field_bound(&p12, &phi, 0.5).unwrap();
    let pinned = 0.25 - (2.0 / 15.0) * (1.0 + 0.5f64.sqrt());
    let bound_err = (bound_half - pinned).abs();
    let e1 = PolynomialState::basis_state(&p12, 1).unwrap();
    let (def_e1, _) = deficit(&e1, &phi, QuadratureScheme::tensor_default(2)).unwrap();
    let margin_ok = (def_e1 - 1.0 / 15.0).abs() <= 1e-10 && def_e1 > bound_half;

    let mut worst = f64::NEG_INFINITY;
    let mut count = 0usize;
    for n in 1..=2u32 {
        for m in 1..=4u32 {
            let params = Params::new(n, m).unwrap();
            for i in 0..125u64 {
                let state = PolynomialState::random_state(&params, 5000 + i);
                let scheme = scheme_for(&params, 20_000, 9500 + i);
                let rec = verify_far_field(&state, &phi, scheme, 8, 6000 + i).unwrap();
                worst = worst.max(rec.bound - 3.0 * rec.deficit_stderr - rec.deficit);
                count += 1;
            }
        }
    }
    criterion(
        8,
        "far-field bound",
        bound_err <= 1e-10 && margin_ok && worst <= 1e-12,
        &format!(
            "bound(1/2) err {bound_err:.2e}, deficit(e1) {def_e1:.6}, worst violation {worst:.3e} over {count} states"
        ),
    );
}

/// 9. Stability constant: geodesics from X₀ along the e₂ normal direction at
///    (1, 2, pow:2) give deficit/dist² → 4/15 within 10% for t ≤ 0.05; uniform
///    scans at N ≤ 2, M ≤ 4 report min_ratio > 0 with full seed provenance.
#[test]
fn criterion_9_stability_scans() {
    let p12 = Params::new(1, 2).unwrap();
    let phi = ConvexPhi::pow(2.0).unwrap();
    let e2 = TangentVector::new(
        &p12,
        vec![Complex64::ZERO, Complex64::ZERO, Complex64::new(1.0, 0.0)],
    )
    .unwrap();
    let target = 4.0 / 15.0;
    let mut worst_ratio_err = 0.0f64;
    for t in [0.05, 0.03, 0.015] {
        let state = geodesic_from_x0(&e2, t).unwrap();
        let (def, _) = entropy_g(&state, &phi, QuadratureScheme::tensor_default(2))
            .map(|(g, e)| (wehrl::measure::sup_g(&p12, &phi).0 - g, e))
            .unwrap();
        let r = distance_to_v(&state, 16, 9100).unwrap();
        let ratio = def / (r.dist_geodesic * r.dist_geodesic);
        worst_ratio_err = worst_ratio_err.max((ratio - target).abs() / target);
    }

    let mut min_ratios_ok = true;
    let mut provenance_ok = true;
    for n in 1..=2u32 {
        for m in 1..=4u32 {
            let params = Params::new(n, m).unwrap();
            if params.dim() <= n as usize + 1 {
                continue; // M = 1: every state is coherent, no normal directions.
            }
            let scheme = scheme_for(&params, 20_000, 0);
            let report = stability_scan(
                &params,
                &phi,
                40,
                Sampler::UniformSphere,
                scheme,
                8,
                7700 + (10 * n + m) as u64,
            )
            .unwrap();
            match report.min_ratio {
                Some(r) if r > 0.0 => {}
                _ => min_ratios_ok = false,
            }
            let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
            for key in ["seed", "sampler", "scheme", "count", "n_starts"] {
                if json[key].is_null() {
                    provenance_ok = false;
                }
            }
        }
    }
    criterion(
        9,
        "quadratic stability",
        worst_ratio_err <= 0.1 && min_ratios_ok && provenance_ok,
        &format!(
            "normal-direction ratio err {worst_ratio_err:.3} (vs 4/15), uniform scans min_ratio > 0: {min_ratios_ok}"
        ),
    );
}
