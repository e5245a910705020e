//! The second differential of G at the base point X₀ and its numerical cross-checks.
//!
//! In a tangent direction Y (Re Y₀ = 0), d²G(Y) = 2 Σ_{α≠0} b_α |Y_α|², where b_α
//! depends on α only through its degree K = |α|. Each coefficient is an integral of
//! Φ″ against an explicit weight: after the substitution τ = (1+s)^{−M},
//!
//!   b_K = ∫₀¹ Φ″(τ) w_K(τ) dτ,
//!   w_K(τ) = (N c̃_K² / M) · τ^{1+N/M} · q_K(s),  s = τ^{−1/M} − 1,
//!
//! with q_K(s) = s^{K+N−1} − (M/A_{M,N,K}) Σ_{j=N}^{K+N−1} C(M+N,j) s^j. The combined
//! coefficient of s^{K+N−1} is (A − M·C(M+N,K+N−1))/A: exactly zero for K = 1 (so
//! b vanishes identically on degree one) and strictly negative for K ≥ 2, as is the
//! whole polynomial on s > 0 — which makes every b_K with K ≥ 2 strictly negative
//! for strictly convex Φ.
//!
//! The same weights give the τ-resolved kernel h̃(τ,Y) = Σ_{α≠0} 2|Y_α|² w_{|α|}(τ)
//! with ∫₀¹ Φ″(τ) h̃(τ,Y) dτ = d²G(Y) by construction; the integral identity is the
//! self-check tying the two representations together.
//!
//! Working in τ keeps Φ″ in its native variable, so hinge atoms contribute exact
//! point evaluations, and the weight is evaluated through logarithms (s ranges over
//! (0,∞)) to stay finite near both endpoints.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::combinatorics::{
    a_const, a_const_exact, binomial, binomial_u128, c_tilde_sq_by_degree, MultiIndex, Params,
};
use crate::error::{Error, Result};
use crate::geometry::geodesic_from_x0;
use crate::measure::{block_rng, draw_nu_into, entropy_g, QuadratureScheme, MC_BLOCK};
use crate::phi::ConvexPhi;
use crate::state_space::{basis_scales, monomial, TangentVector};

/// Absolute error target for each b_K quadrature.
const B_ABS_TOL: f64 = 1e-12;

/// The degree-resolved weights w_K(τ), K = 1..=M, for fixed (N, M).
pub struct HessianKernel {
    params: Params,
    /// Per degree K: polynomial coefficients of q_K over the powers s^{N+i},
    /// i = 0..K, already divided by A, plus the prefactor N c̃_K²/M.
    brackets: Vec<(Vec<f64>, f64)>,
}

impl HessianKernel {
    pub fn new(params: &Params) -> Result<Self> {
        let (m, n) = (params.m(), params.n());
        let brackets = (1..=m)
            .map(|k| Ok((bracket_coefficients(m, n, k)?, n as f64 * c_tilde_sq_by_degree(k, m, n)? / m as f64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: params.clone(),
            brackets,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// w_K(τ) for τ ∈ (0,1]. Evaluated as Σ_j coeff_j exp(j ln s − (M+N)L) with
    /// L = −ln(τ)/M and s = e^L − 1, which underflows gracefully instead of
    /// overflowing as τ → 0 (the true weight tends to 0 there for K ≤ M).
    pub fn weight(&self, k: u32, tau: f64) -> Result<f64> {
        if k == 0 || k > self.params.m() {
            return Err(Error::InvalidParams(format!(
                "weight degree must lie in 1..=M, got {k}"
            )));
        }
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::Domain(format!("weight requires τ ∈ (0,1], got {tau}")));
        }
        let (coeffs, prefactor) = &self.brackets[(k - 1) as usize];
        let m = self.params.m() as f64;
        let n = self.params.n() as f64;
        let l = -tau.ln() / m;
        let s = l.exp_m1();
        if s <= 0.0 {
            return Ok(0.0);
        }
        let ln_s = s.ln();
        let damp = (m + n) * l;
        let mut acc = 0.0;
        for (i, &cj) in coeffs.iter().enumerate() {
            let j = n + i as f64;
            acc += cj * (j * ln_s - damp).exp();
        }
        Ok(prefactor * acc)
    }

    /// h̃(τ, Y) = Σ_{α≠0} 2 |Y_α|² w_{|α|}(τ); strictly negative for nonzero normal Y.
    pub fn h_tilde(&self, tau: f64, y: &TangentVector) -> Result<f64> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::Domain(format!("h̃ requires τ ∈ (0,1), got {tau}")));
        }
        let mut by_degree = vec![0.0f64; self.params.m() as usize + 1];
        for (yc, alpha) in y.components().iter().zip(self.params.indices()) {
            by_degree[alpha.degree() as usize] += yc.norm_sqr();
        }
        let mut acc = 0.0;
        for (k, &mass) in by_degree.iter().enumerate().skip(1) {
            if mass > 0.0 {
                acc += 2.0 * mass * self.weight(k as u32, tau)?;
            }
        }
        Ok(acc)
    }
}

/// Coefficients of q_K(s)/A over s^{N+i}, i = 0..K, computed in exact integer
/// arithmetic when it fits (so the K = 1 cancellation is exact) with a floating
/// fallback for large parameters.
fn bracket_coefficients(m: u32, n: u32, k: u32) -> Result<Vec<f64>> {
    if k == 0 || k > m {
        return Err(Error::InvalidParams(format!(
            "bracket degree must lie in 1..=M, got {k}"
        )));
    }
    let top = k + n - 1;
    let exact = a_const_exact(m, n, k).and_then(|a| {
        let mut coeffs = Vec::with_capacity(k as usize);
        for j in n..=top {
            let c = binomial_u128((m + n) as u64, j as u64)?;
            let mc = (m as i128).checked_mul(i128::try_from(c).ok()?)?;
            let num = if j == top {
                i128::try_from(a).ok()?.checked_sub(mc)?
            } else {
                -mc
            };
            coeffs.push(num as f64 / a as f64);
        }
        Some(coeffs)
    });
    if let Some(coeffs) = exact {
        return Ok(coeffs);
    }
    let a = a_const(m, n, k)?;
    Ok((n..=top)
        .map(|j| {
            let c = m as f64 * binomial((m + n) as u64, j as u64) / a;
            if j == top {
                1.0 - c
            } else {
                -c
            }
        })
        .collect())
}

/// The closed-form Hessian data: b_K per degree class with quadrature errors.
pub struct HessianCoefficients {
    kernel: HessianKernel,
    phi_id: String,
    /// (b_K, quadrature error) for K = 1..=M.
    by_degree: Vec<(f64, f64)>,
}

impl HessianCoefficients {
    /// Integrate Φ″ against each degree weight. Atoms of Φ″ contribute exact point
    /// values of w_K; density pieces go through adaptive quadrature.
    pub fn compute(params: &Params, phi: &ConvexPhi) -> Result<Self> {
        let kernel = HessianKernel::new(params)?;
        let by_degree = (1..=params.m())
            .map(|k| {
                // K = 1 has an identically zero weight (exact integer cancellation).
                if kernel.brackets[(k - 1) as usize].0.iter().all(|&c| c == 0.0) {
                    return Ok((0.0, 0.0));
                }
                let (value, err) = phi.second_derivative().integrate(
                    |tau| kernel.weight(k, tau).expect("τ stays inside (0,1)"),
                    B_ABS_TOL,
                );
                Ok((value, err))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kernel,
            phi_id: phi.id().to_string(),
            by_degree,
        })
    }

    pub fn params(&self) -> &Params {
        self.kernel.params()
    }

    pub fn phi_id(&self) -> &str {
        &self.phi_id
    }

    pub fn kernel(&self) -> &HessianKernel {
        &self.kernel
    }

    /// (b_K, quadrature error) for a degree class 1 ≤ K ≤ M.
    pub fn by_degree(&self, k: u32) -> Result<(f64, f64)> {
        if k == 0 || k > self.params().m() {
            return Err(Error::InvalidParams(format!(
                "degree must lie in 1..=M, got {k}"
            )));
        }
        Ok(self.by_degree[(k - 1) as usize])
    }

    /// b_α for a nonzero multi-index (depends only on |α|).
    pub fn b_alpha(&self, alpha: &MultiIndex) -> Result<f64> {
        Ok(self.by_degree(alpha.degree())?.0)
    }

    /// d²G(Y) = 2 Σ_{α≠0} b_{|α|} |Y_α|².
    pub fn d2g_closed_form(&self, y: &TangentVector) -> f64 {
        y.components()
            .iter()
            .zip(self.params().indices())
            .filter(|(_, alpha)| alpha.degree() > 0)
            .map(|(yc, alpha)| 2.0 * self.by_degree[(alpha.degree() - 1) as usize].0 * yc.norm_sqr())
            .sum()
    }
}

/// One-off b_α without keeping the coefficient table.
pub fn b_alpha(params: &Params, phi: &ConvexPhi, alpha: &MultiIndex) -> Result<f64> {
    if alpha.degree() == 0 {
        return Err(Error::InvalidParams(
            "b_α is defined for α ≠ 0 only".into(),
        ));
    }
    HessianCoefficients::compute(params, phi)?.b_alpha(alpha)
}

/// One-off closed-form second differential.
pub fn d2g_closed_form(params: &Params, phi: &ConvexPhi, y: &TangentVector) -> Result<f64> {
    Ok(HessianCoefficients::compute(params, phi)?.d2g_closed_form(y))
}

/// One-off h̃(τ, Y).
pub fn h_tilde(params: &Params, tau: f64, y: &TangentVector) -> Result<f64> {
    HessianKernel::new(params)?.h_tilde(tau, y)
}

/// Finite-difference estimate of d²G(Y) along the geodesic through Y.
#[derive(Debug, Clone, Copy)]
pub struct FdResult {
    pub value: f64,
    /// Estimated numerical noise (quadrature error for N = 1, standard error of the
    /// Monte Carlo estimator for N ≥ 2).
    pub noise: f64,
    pub h: f64,
    /// Set when the noise exceeds h² — the differencing is then untrustworthy.
    pub noisy: bool,
}

/// Second derivative of t ↦ G(cos t · X₀ + sin t · Y) at t = 0 by Richardson-
/// extrapolated central differences over steps {h, h/2}. Y must be a unit tangent
/// vector; h ∈ (0, 0.1].
///
/// For N = 1 each entropy value comes from the high-order tensor rule. For N ≥ 2
/// the whole five-point stencil is evaluated per Monte Carlo sample with common
/// random numbers, and the same stencil applied to the Husimi density itself (whose
/// mean is exactly 1/d for every t) serves as a regression control variate; `seed`
/// and `samples` control that run and are ignored when N = 1.
pub fn d2g_finite_difference(
    phi: &ConvexPhi,
    y: &TangentVector,
    h: f64,
    samples: u64,
    seed: u64,
) -> Result<FdResult> {
    Ok(d2g_finite_difference_batch(phi, std::slice::from_ref(y), h, samples, seed)?
        .pop()
        .expect("one direction in, one result out"))
}

/// Batch version sharing one ν-sample stream across all directions (common random
/// numbers also across directions, so differences between directions are far less
/// noisy than the individual values).
pub fn d2g_finite_difference_batch(
    phi: &ConvexPhi,
    ys: &[TangentVector],
    h: f64,
    samples: u64,
    seed: u64,
) -> Result<Vec<FdResult>> {
    let first = ys
        .first()
        .ok_or_else(|| Error::InvalidParams("no directions given".into()))?;
    let params = first.params().clone();
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::InvalidParams(format!(
            "step must lie in (0, 0.1], got {h}"
        )));
    }
    for y in ys {
        if (y.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "finite differencing needs unit directions, got norm {}",
                y.norm()
            )));
        }
        if y.params().dim() != params.dim() {
            return Err(Error::DimensionMismatch {
                expected: params.dim(),
                got: y.params().dim(),
            });
        }
    }
    if params.n() == 1 {
        return ys.iter().map(|y| fd_tensor(phi, y, h)).collect();
    }
    if samples == 0 {
        return Err(Error::InvalidParams(
            "Monte Carlo differencing needs at least one sample".into(),
        ));
    }
    fd_monte_carlo(phi, ys, h, samples, seed, &params)
}

fn richardson(stencil: [f64; 5], h: f64) -> f64 {
    let [fm, fmh, f0, fph, fp] = stencil;
    (16.0 * (fmh - 2.0 * f0 + fph) - (fm - 2.0 * f0 + fp)) / (3.0 * h * h)
}

fn fd_tensor(phi: &ConvexPhi, y: &TangentVector, h: f64) -> Result<FdResult> {
    let scheme = QuadratureScheme::Tensor { radial: 64, angular: 65 };
    let mut values = [0.0f64; 5];
    let mut errs = [0.0f64; 5];
    for (i, t) in [-h, -h / 2.0, 0.0, h / 2.0, h].into_iter().enumerate() {
        let state = geodesic_from_x0(y, t)?;
        let (v, e) = entropy_g(&state, phi, scheme)?;
        values[i] = v;
        errs[i] = e;
    }
    let value = richardson(values, h);
    let noise = (16.0 * (errs[1] + 2.0 * errs[2] + errs[3]) + (errs[0] + 2.0 * errs[2] + errs[4]))
        / (3.0 * h * h);
    Ok(FdResult {
        value,
        noise,
        h,
        noisy: noise > h * h,
    })
}

fn fd_monte_carlo(
    phi: &ConvexPhi,
    ys: &[TangentVector],
    h: f64,
    samples: u64,
    seed: u64,
    params: &Params,
) -> Result<Vec<FdResult>> {
    let dim_z = params.n() as usize;
    let d = params.dim();
    let m = params.m() as i32;
    let scales = basis_scales(params);
    let steps = [-h, -h / 2.0, h / 2.0, h];
    let trig: Vec<(f64, f64)> = steps.iter().map(|t| (t.cos(), t.sin())).collect();
    let n_dirs = ys.len();

    // Per direction: Σr, Σq, Σr², Σq², Σrq.
    let blocks = samples.div_ceil(MC_BLOCK);
    let partials: Vec<Vec<[f64; 5]>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = (samples - b * MC_BLOCK).min(MC_BLOCK);
            let mut z = vec![Complex64::ZERO; dim_z];
            let mut basis = vec![Complex64::ZERO; d];
            let mut acc = vec![[0.0f64; 5]; n_dirs];
            for _ in 0..count {
                draw_nu_into(&mut rng, &mut z);
                let s: f64 = z.iter().map(|c| c.norm_sqr()).sum();
                let inv = (1.0 + s).powi(-m);
                for ((slot, alpha), c) in
                    basis.iter_mut().zip(params.indices()).zip(&scales)
                {
                    *slot = c * monomial(&z, alpha);
                }
                // At t = 0 the state is X₀, so u = e₀ weight only.
                let u0 = inv;
                let phi0 = phi.value(u0);
                for (dir, sums) in ys.iter().zip(acc.iter_mut()) {
                    let w: Complex64 = dir
                        .components()
                        .iter()
                        .zip(&basis)
                        .map(|(yc, bv)| yc * bv)
                        .sum();
                    let mut phis = [0.0f64; 5];
                    let mut us = [0.0f64; 5];
                    phis[2] = phi0;
                    us[2] = u0;
                    for (slot, &(ct, st)) in [0usize, 1, 3, 4].iter().zip(&trig) {
                        let f = Complex64::new(ct, 0.0) + st * w;
                        let u = (f.norm_sqr() * inv).clamp(0.0, 1.0);
                        us[*slot] = u;
                        phis[*slot] = phi.value(u);
                    }
                    let r = richardson(phis, h);
                    let q = richardson(us, h);
                    sums[0] += r;
                    sums[1] += q;
                    sums[2] += r * r;
                    sums[3] += q * q;
                    sums[4] += r * q;
                }
            }
            acc
        })
        .collect();

    let mut totals = vec![[0.0f64; 5]; n_dirs];
    for block in &partials {
        for (tot, part) in totals.iter_mut().zip(block) {
            for i in 0..5 {
                tot[i] += part[i];
            }
        }
    }

    let nf = samples as f64;
    Ok(totals
        .into_iter()
        .map(|[sr, sq, sr2, sq2, srq]| {
            let (rm, qm) = (sr / nf, sq / nf);
            let var_r = ((sr2 - nf * rm * rm) / (nf - 1.0)).max(0.0);
            let var_q = ((sq2 - nf * qm * qm) / (nf - 1.0)).max(0.0);
            let cov = (srq - nf * rm * qm) / (nf - 1.0);
            // Regression control variate: E[q] = 0 exactly because ∫ u dν = 1/d for
            // every point of the geodesic. κ fitted from the same sums (the O(1/n)
            // fitting bias is far below the reported standard error).
            let kappa = if var_q > 0.0 { cov / var_q } else { 0.0 };
            let value = rm - kappa * qm;
            let var_res = (var_r - 2.0 * kappa * cov + kappa * kappa * var_q).max(0.0);
            let noise = (var_res / nf).sqrt();
            FdResult {
                value,
                noise,
                h,
                noisy: noise > h * h,
            }
        })
        .collect())
}
