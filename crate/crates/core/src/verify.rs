//! Self-verification suites: named invariants from every module, run at a chosen
//! (N, M) and reported with measured values.
//!
//! `Quick` covers closed-form identities and deterministic quadrature in well under
//! a second; `Full` adds Monte Carlo cross-checks (closed forms vs sampling,
//! finite differences vs the Hessian, the far-field bound on random states) and
//! runs in seconds. Every check uses fixed seeds, so reports are reproducible.

use num_complex::Complex64;
use serde::Serialize;

use crate::combinatorics::{
    a_const, c_tilde_sq_by_degree, incomplete_beta_primitive, Params,
};
use crate::error::{Error, Result};
use crate::geometry::distance_to_v;
use crate::hessian::{d2g_closed_form, d2g_finite_difference, HessianCoefficients};
use crate::measure::{entropy_g, QuadratureScheme};
use crate::phi::{convexity_violation, parse_phi_spec, ConvexPhi};
use crate::quad;
use crate::stability::{stability_scan, verify_far_field, Sampler};
use crate::state_space::{PolynomialState, TangentVector};

/// How much verification to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    Quick,
    Full,
}

impl VerifyLevel {
    /// Parse `quick` or `full`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            _ => Err(Error::Parse(format!(
                "unknown verification level {s:?} (expected quick or full)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Quick => "quick",
            Self::Full => "full",
        }
    }
}

/// One named invariant with its measured value.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// The quantity the invariant bounds (violation magnitude, relative error, …).
    pub measured: f64,
    /// The bound it must satisfy (pass ⇔ measured ≤ tolerance).
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn bounded(name: &str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail,
        }
    }
}

/// Outcome of a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub n: u32,
    pub m: u32,
    pub level: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

fn default_scheme(params: &Params, n_mc: u64, seed: u64) -> QuadratureScheme {
    if params.n() == 1 {
        QuadratureScheme::tensor_default(params.m())
    } else {
        QuadratureScheme::MonteCarlo { n: n_mc, seed }
    }
}

/// Run the invariant suites at the given parameters.
pub fn run_verification(params: &Params, level: VerifyLevel) -> Result<VerifyReport> {
    let mut checks = vec![
        check_beta_primitive(params, level)?,
        check_normalization_ratio(params)?,
        check_phi_convexity()?,
        check_kernel_peak(params)?,
        check_husimi_mean(params)?,
        check_coherent_sup(params)?,
    ];
    if params.m() >= 2 {
        checks.push(check_degree_one_sup(params)?);
        checks.push(check_hessian_signs(params)?);
    }
    if level == VerifyLevel::Full {
        checks.push(check_coherent_entropy_mc(params)?);
        if params.n() == 1 {
            checks.push(check_tensor_mc_agreement(params)?);
            checks.push(check_optimizer_vs_grid(params)?);
        }
        if params.m() >= 2 {
            checks.push(check_fd_hessian(params)?);
        }
        checks.push(check_far_field(params)?);
        checks.push(check_deficit_nonnegative(params)?);
        checks.push(check_scan_determinism(params)?);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        n: params.n(),
        m: params.m(),
        level: level.as_str().to_string(),
        passed,
        checks,
    })
}

/// Closed-form incomplete-beta primitive vs adaptive quadrature.
fn check_beta_primitive(params: &Params, level: VerifyLevel) -> Result<CheckResult> {
    let (m, n) = (params.m(), params.n());
    let mut s_values = vec![0.5, 2.0];
    if level == VerifyLevel::Full {
        s_values.push(10.0);
    }
    let mut worst = 0.0f64;
    let mut cases = 0;
    for k in 0..=m {
        for &s in &s_values {
            let closed = incomplete_beta_primitive(m, n, k, s)?;
            let (quad_val, _) = quad::adaptive(
                |sig| sig.powi((k + n) as i32 - 1) * (1.0 + sig).powi(-((m + n + 1) as i32)),
                0.0,
                s,
                1e-14,
                1e-13,
            );
            worst = worst.max((closed - quad_val).abs() / quad_val.abs().max(1e-300));
            cases += 1;
        }
        // s = ∞ via the compactifying substitution σ = x/(1−x), which turns the
        // integrand into the polynomial x^{K+N−1}(1−x)^{M−K}.
        let closed = incomplete_beta_primitive(m, n, k, f64::INFINITY)?;
        let (quad_val, _) = quad::adaptive(
            |x| x.powi((k + n) as i32 - 1) * (1.0 - x).powi((m - k) as i32),
            0.0,
            1.0,
            1e-14,
            1e-13,
        );
        worst = worst.max((closed - quad_val).abs() / quad_val.abs());
        cases += 1;
    }
    Ok(CheckResult::bounded(
        "beta-primitive-vs-quadrature",
        worst,
        1e-10,
        format!("max relative error over {cases} (K, s) cases"),
    ))
}

/// c̃²_K = A_{M,N,K}/A_{M,N,0} (factorial formula vs normalization constants).
fn check_normalization_ratio(params: &Params) -> Result<CheckResult> {
    let (m, n) = (params.m(), params.n());
    let mut worst = 0.0f64;
    for k in 0..=m {
        let lhs = c_tilde_sq_by_degree(k, m, n)?;
        let rhs = a_const(m, n, k)? / a_const(m, n, 0)?;
        worst = worst.max((lhs / rhs - 1.0).abs());
    }
    Ok(CheckResult::bounded(
        "normalization-ratio-identity",
        worst,
        1e-14,
        format!("max relative deviation over degrees 0..={m}"),
    ))
}

/// Convexity of every built-in Φ on a 10⁴-point grid (midpoint chord defect).
fn check_phi_convexity() -> Result<CheckResult> {
    let specs = ["pow:2", "pow:3", "xlogx", "hinge:0.5", "mollify:0.05,hinge:0.5"];
    let mut worst = 0.0f64;
    for spec in specs {
        worst = worst.max(convexity_violation(&parse_phi_spec(spec)?, 10_000));
    }
    Ok(CheckResult::bounded(
        "phi-convexity-grid",
        worst,
        1e-12,
        format!("max chord defect over {} built-in functions", specs.len()),
    ))
}

fn fixed_points(params: &Params) -> Vec<Vec<Complex64>> {
    let n = params.n() as usize;
    let base = [
        Complex64::new(0.4, -0.7),
        Complex64::new(-1.2, 0.3),
        Complex64::new(0.05, 0.9),
    ];
    (0..3)
        .map(|i| (0..n).map(|j| base[(i + j) % 3]).collect())
        .collect()
}

/// Coherent states peak at their own label with Husimi value exactly 1.
fn check_kernel_peak(params: &Params) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for w in fixed_points(params) {
        let state = PolynomialState::coherent_state(params, &w)?;
        worst = worst.max((1.0 - state.husimi(&w)).abs());
    }
    Ok(CheckResult::bounded(
        "kernel-peak-normalization",
        worst,
        1e-12,
        "max |1 − u(w)| over 3 coherent states".into(),
    ))
}

/// ∫ u dν = 1/d for every state (checked on a fixed random state).
fn check_husimi_mean(params: &Params) -> Result<CheckResult> {
    let d = params.dim() as f64;
    let state = PolynomialState::random_state(params, 41);
    let identity = ConvexPhi::affine(0.0, 1.0);
    if params.n() == 1 {
        let (g, _) = entropy_g(&state, &identity, QuadratureScheme::tensor_default(params.m()))?;
        Ok(CheckResult::bounded(
            "husimi-mean-is-inverse-dimension",
            (g * d - 1.0).abs(),
            1e-10,
            "tensor quadrature of ∫u dν times d".into(),
        ))
    } else {
        let (mean, se) = entropy_g(
            &state,
            &identity,
            QuadratureScheme::MonteCarlo { n: 200_000, seed: 42 },
        )?;
        Ok(CheckResult::bounded(
            "husimi-mean-is-inverse-dimension",
            (mean - 1.0 / d).abs(),
            3.0 * se + 1e-12,
            "Monte Carlo mean of u vs 1/d (tolerance = 3·stderr)".into(),
        ))
    }
}

/// The Husimi sup of a coherent state is 1.
fn check_coherent_sup(params: &Params) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for w in fixed_points(params) {
        let state = PolynomialState::coherent_state(params, &w)?;
        let r = distance_to_v(&state, 8, 7)?;
        worst = worst.max(1.0 - r.t_sup);
    }
    Ok(CheckResult::bounded(
        "coherent-sup-unity",
        worst,
        1e-9,
        "max (1 − T) over 3 coherent states".into(),
    ))
}

/// T(e₁) = ((M−1)/M)^{M−1} for the degree-one basis state (M ≥ 2).
fn check_degree_one_sup(params: &Params) -> Result<CheckResult> {
    let m = params.m() as f64;
    let expect = ((m - 1.0) / m).powi(params.m() as i32 - 1);
    let e1 = PolynomialState::basis_state(params, 1)?;
    let r = distance_to_v(&e1, 16, 11)?;
    Ok(CheckResult::bounded(
        "degree-one-sup-closed-form",
        (r.t_sup / expect - 1.0).abs(),
        1e-8,
        format!("relative error of T(e₁) against {expect}"),
    ))
}

/// b coefficients: zero at degree 1, strictly negative at degrees 2..=M (pow:2).
fn check_hessian_signs(params: &Params) -> Result<CheckResult> {
    let phi = ConvexPhi::pow(2.0)?;
    let coeffs = HessianCoefficients::compute(params, &phi)?;
    let (b1, _) = coeffs.by_degree(1)?;
    if b1.abs() > 1e-12 {
        return Ok(CheckResult::bounded(
            "hessian-degree-signs",
            b1.abs(),
            1e-12,
            "degree-1 coefficient must vanish".into(),
        ));
    }
    let mut worst = f64::NEG_INFINITY;
    for k in 2..=params.m() {
        let (b, _) = coeffs.by_degree(k)?;
        worst = worst.max(b);
    }
    Ok(CheckResult::bounded(
        "hessian-degree-signs",
        worst,
        -1e-6,
        format!("max b over degrees 2..={} (must stay below −1e−6)", params.m()),
    ))
}

/// A coherent state's entropy equals sup G exactly; cross-check by Monte Carlo.
fn check_coherent_entropy_mc(params: &Params) -> Result<CheckResult> {
    let phi = ConvexPhi::pow(2.0)?;
    let w = &fixed_points(params)[0];
    let state = PolynomialState::coherent_state(params, w)?;
    let (sup, sup_err) = crate::measure::sup_g(params, &phi);
    let (g, se) = entropy_g(
        &state,
        &phi,
        QuadratureScheme::MonteCarlo { n: 200_000, seed: 43 },
    )?;
    Ok(CheckResult::bounded(
        "coherent-entropy-matches-closed-form",
        (g - sup).abs(),
        3.0 * se + sup_err + 1e-12,
        "Monte Carlo entropy of a coherent state vs closed-form sup G".into(),
    ))
}

/// Tensor quadrature and Monte Carlo agree on a random state's entropy (N = 1).
fn check_tensor_mc_agreement(params: &Params) -> Result<CheckResult> {
    let phi = ConvexPhi::pow(2.0)?;
    let state = PolynomialState::random_state(params, 47);
    let (gt, _) = entropy_g(&state, &phi, QuadratureScheme::tensor_default(params.m()))?;
    let (gm, se) = entropy_g(
        &state,
        &phi,
        QuadratureScheme::MonteCarlo { n: 500_000, seed: 48 },
    )?;
    Ok(CheckResult::bounded(
        "tensor-mc-cross-check",
        (gt - gm).abs(),
        3.0 * se + 1e-12,
        "tensor vs Monte Carlo entropy on a random state".into(),
    ))
}

/// The ascent never does worse than a coarse grid search (N = 1).
fn check_optimizer_vs_grid(params: &Params) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for seed in [51u64, 52] {
        let state = PolynomialState::random_state(params, seed);
        let r = distance_to_v(&state, 16, seed)?;
        let mut grid_best = 0.0f64;
        for i in 0..60 {
            let t = (i as f64 + 0.5) / 60.0;
            let rho = (t / (1.0 - t)).sqrt();
            for k in 0..60 {
                let theta = std::f64::consts::TAU * k as f64 / 60.0;
                grid_best = grid_best.max(state.husimi(&[Complex64::from_polar(rho, theta)]));
            }
        }
        worst = worst.max(grid_best - r.t_sup);
    }
    Ok(CheckResult::bounded(
        "optimizer-dominates-grid",
        worst,
        1e-12,
        "max (grid max − ascent max) over 2 random states".into(),
    ))
}

/// Finite-difference second derivative vs the closed form (pow:2, M ≥ 2).
fn check_fd_hessian(params: &Params) -> Result<CheckResult> {
    let phi = ConvexPhi::pow(2.0)?;
    let y = TangentVector::random_normal_direction(params, 53);
    let closed = d2g_closed_form(params, &phi, &y)?;
    let (h, samples, rel_tol): (f64, u64, f64) = if params.n() == 1 {
        (1e-2, 0, 1e-3)
    } else {
        (5e-2, 6_000_000, 2e-2)
    };
    let fd = d2g_finite_difference(&phi, &y, h, samples, 54)?;
    let rel = (fd.value - closed).abs() / closed.abs();
    Ok(CheckResult::bounded(
        "fd-hessian-cross-check",
        rel,
        rel_tol.max(3.0 * fd.noise / closed.abs()),
        format!("relative error vs closed form {closed:.6} (noise {:.2e})", fd.noise),
    ))
}

/// deficit ≥ far_field_bound(T) − 3·stderr on random states.
fn check_far_field(params: &Params) -> Result<CheckResult> {
    let phi = ConvexPhi::pow(2.0)?;
    let scheme = default_scheme(params, 100_000, 57);
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..20u64 {
        let state = PolynomialState::random_state(params, 100 + seed);
        let rec = verify_far_field(&state, &phi, scheme, 8, 200 + seed)?;
        worst = worst.max(rec.bound - 3.0 * rec.deficit_stderr - rec.deficit);
    }
    Ok(CheckResult::bounded(
        "far-field-bound-holds",
        worst,
        1e-12,
        "max (bound − 3·stderr − deficit) over 20 random states".into(),
    ))
}

/// Coherent maximality: deficits of random states are nonnegative up to noise.
fn check_deficit_nonnegative(params: &Params) -> Result<CheckResult> {
    let phi = ConvexPhi::pow(2.0)?;
    let scheme = default_scheme(params, 100_000, 61);
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..50u64 {
        let state = PolynomialState::random_state(params, 300 + seed);
        let (def, se) = crate::stability::deficit(&state, &phi, scheme)?;
        worst = worst.max(-def - 3.0 * se);
    }
    Ok(CheckResult::bounded(
        "deficit-nonnegative",
        worst,
        1e-9,
        "max (−deficit − 3·stderr) over 50 random states".into(),
    ))
}

/// Identical scan configs produce identical reports.
fn check_scan_determinism(params: &Params) -> Result<CheckResult> {
    let phi = ConvexPhi::pow(2.0)?;
    let scheme = default_scheme(params, 50_000, 0);
    let a = stability_scan(params, &phi, 6, Sampler::UniformSphere, scheme, 4, 71)?;
    let b = stability_scan(params, &phi, 6, Sampler::UniformSphere, scheme, 4, 71)?;
    let equal = a.to_csv() == b.to_csv() && a.to_json() == b.to_json();
    Ok(CheckResult::bounded(
        "scan-determinism",
        if equal { 0.0 } else { 1.0 },
        0.0,
        "byte equality of two identically-configured scans".into(),
    ))
}
