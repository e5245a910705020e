//! The probability measure ν on C^N, sampling, quadrature schemes, and the entropy
//! functional G.
//!
//! dν = c_N (1+|z|²)^{−N−1} dA with c_N = N!/π^N. Under ν the variable
//! t = |z|²/(1+|z|²) is Beta(N, 1) and the angular part is uniform on S^{2N−1},
//! which gives an exact rejection-free sampler. G(X) = ∫ Φ(u) dν for the Husimi
//! density u of the state X, and sup G = ∫ Φ(u₀) dν over coherent states reduces to
//! the one-dimensional integral N ∫₀¹ Φ(τ^M) (1−τ)^{N−1} dτ.
//!
//! Monte Carlo accumulates in fixed-size blocks with one counter-mode RNG stream per
//! block, reduced in block order, so results are bit-identical for any thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::combinatorics::Params;
use crate::error::{Error, Result};
use crate::phi::ConvexPhi;
use crate::quad;
use crate::state_space::PolynomialState;

/// Samples per Monte Carlo block; the block is the unit of parallelism and of RNG
/// stream assignment, so totals are independent of the worker count.
pub(crate) const MC_BLOCK: u64 = 1 << 14;

/// Fallback Monte Carlo size/seed used by the tensor scheme when Φ has kinks (the
/// two-level refinement estimate is unreliable across a derivative jump, so the
/// scheme switches to a fixed, documented Monte Carlo run instead).
const KINK_FALLBACK_SAMPLES: u64 = 1_000_000;
const KINK_FALLBACK_SEED: u64 = 1_618_033_988;

/// How an integral over ν is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureScheme {
    /// Sample mean over `n` ν-draws; reports the standard error.
    MonteCarlo { n: u64, seed: u64 },
    /// N = 1 only: Gauss–Legendre in the radial variable τ (t = τ² ∈ (0,1)) times a
    /// uniform angular rectangle rule; reports a two-level refinement estimate.
    Tensor { radial: usize, angular: usize },
}

impl QuadratureScheme {
    /// Tensor orders exact for Φ = pow:2 at degree M: the radial integrand is a
    /// polynomial of degree ≤ 4M+1 in τ (Gauss–Legendre order 2M+2 suffices) and the
    /// angular integrand a trigonometric polynomial of degree ≤ 4M (4M+1 nodes).
    pub fn tensor_default(m: u32) -> Self {
        Self::Tensor {
            radial: 2 * m as usize + 2,
            angular: 4 * m as usize + 1,
        }
    }

    /// Parse `mc:<n>:<seed>` or `tensor:<radial>:<angular>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad scheme spec {spec:?} (expected mc:<n>:<seed> or tensor:<radial>:<angular>)"));
        let mut parts = spec.split(':');
        match parts.next() {
            Some("mc") => {
                let n: u64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                let seed: u64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                if parts.next().is_some() || n == 0 {
                    return Err(bad());
                }
                Ok(Self::MonteCarlo { n, seed })
            }
            Some("tensor") => {
                let radial: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                let angular: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                if parts.next().is_some() || radial == 0 || angular == 0 {
                    return Err(bad());
                }
                Ok(Self::Tensor { radial, angular })
            }
            _ => Err(bad()),
        }
    }

    /// Canonical spec string (round-trips through [`Self::parse`]).
    pub fn spec_string(&self) -> String {
        match self {
            Self::MonteCarlo { n, seed } => format!("mc:{n}:{seed}"),
            Self::Tensor { radial, angular } => format!("tensor:{radial}:{angular}"),
        }
    }
}

/// Draw one ν-distributed point into `buf` (length N): t = U^{1/N} is Beta(N,1),
/// s = t/(1−t), and the direction is uniform on the unit sphere of C^N.
pub fn draw_nu_into<R: Rng>(rng: &mut R, buf: &mut [Complex64]) {
    let n = buf.len() as f64;
    let u: f64 = rng.random();
    let t = u.powf(1.0 / n);
    let s = t / (1.0 - t);
    loop {
        let mut norm_sq = 0.0;
        for slot in buf.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *slot = Complex64::new(re, im);
            norm_sq += slot.norm_sqr();
        }
        if norm_sq > 0.0 {
            let scale = (s / norm_sq).sqrt();
            for slot in buf.iter_mut() {
                *slot *= scale;
            }
            return;
        }
    }
}

/// n i.i.d. ν-samples, deterministic in `seed` (blocked like the Monte Carlo mean).
pub fn sample_nu(params: &Params, seed: u64, n: u64) -> Vec<Vec<Complex64>> {
    let dim_z = params.n() as usize;
    let blocks = n.div_ceil(MC_BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = (n - b * MC_BLOCK).min(MC_BLOCK);
            let mut out = Vec::with_capacity(count as usize);
            let mut buf = vec![Complex64::ZERO; dim_z];
            for _ in 0..count {
                draw_nu_into(&mut rng, &mut buf);
                out.push(buf.clone());
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub(crate) fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Blocked Monte Carlo mean of `f` over ν: returns (mean, standard error). The
/// result is bit-identical for any rayon thread count.
pub fn mc_mean<F>(params: &Params, seed: u64, n: u64, f: F) -> (f64, f64)
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    let dim_z = params.n() as usize;
    let blocks = n.div_ceil(MC_BLOCK);
    let partials: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = (n - b * MC_BLOCK).min(MC_BLOCK);
            let mut buf = vec![Complex64::ZERO; dim_z];
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                draw_nu_into(&mut rng, &mut buf);
                let v = f(&buf);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partials
        .into_iter()
        .fold((0.0, 0.0), |(s, q), (bs, bq)| (s + bs, q + bq));
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

/// ν({u₀ > t}) = (1 − t^{1/M})^N, the distribution function of the coherent Husimi
/// density u₀(z) = (1+|z|²)^{−M}.
pub fn mu0(params: &Params, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("mu0 requires t in [0,1], got {t}")));
    }
    Ok((1.0 - t.powf(1.0 / params.m() as f64)).powi(params.n() as i32))
}

/// G(X) = ∫ Φ(u) dν. Returns (value, error estimate): standard error for Monte
/// Carlo, two-level refinement difference for the tensor scheme.
pub fn entropy_g(
    state: &PolynomialState,
    phi: &ConvexPhi,
    scheme: QuadratureScheme,
) -> Result<(f64, f64)> {
    match scheme {
        QuadratureScheme::MonteCarlo { n, seed } => {
            Ok(mc_mean(state.params(), seed, n, |z| phi.value(state.husimi(z))))
        }
        QuadratureScheme::Tensor { radial, angular } => {
            if state.params().n() != 1 {
                return Err(Error::Unsupported(format!(
                    "tensor quadrature is one-dimensional only (N = {})",
                    state.params().n()
                )));
            }
            if phi.second_derivative().has_atoms() {
                // Refinement across a kink of Φ′ is not a trustworthy error signal;
                // use the fixed fallback sample instead.
                return Ok(mc_mean(
                    state.params(),
                    KINK_FALLBACK_SEED,
                    KINK_FALLBACK_SAMPLES,
                    |z| phi.value(state.husimi(z)),
                ));
            }
            let coarse = tensor_entropy(state, phi, radial, angular);
            let fine = tensor_entropy(state, phi, 2 * radial, 2 * angular);
            Ok((fine, (fine - coarse).abs()))
        }
    }
}

/// One pass of the N = 1 tensor rule. Radial: ∫₀¹ dt with t = τ² (Gauss–Legendre in
/// τ removes the half-integer powers of t, so polynomial Φ∘u integrates exactly);
/// angular: uniform nodes on the circle.
fn tensor_entropy(state: &PolynomialState, phi: &ConvexPhi, radial: usize, angular: usize) -> f64 {
    let (nodes, weights) = quad::gauss_legendre_01(radial);
    let mut total = 0.0;
    let mut z = [Complex64::ZERO];
    for (&tau, &w) in nodes.iter().zip(&weights) {
        // t = τ², ρ = √(t/(1−t)) = τ/√(1−τ²); dt = 2τ dτ.
        let rho = tau / (1.0 - tau * tau).sqrt();
        let mut angular_mean = 0.0;
        for k in 0..angular {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / angular as f64;
            z[0] = Complex64::from_polar(rho, theta);
            angular_mean += phi.value(state.husimi(&z));
        }
        angular_mean /= angular as f64;
        total += w * 2.0 * tau * angular_mean;
    }
    total
}

/// sup G over the sphere = G of any coherent state = N ∫₀¹ Φ(τ^M) (1−τ)^{N−1} dτ
/// (the substitution t = τ^M removes the endpoint singularity of the density of
/// u₀). Returns (value, quadrature error); kinks of Φ are passed to the adaptive
/// rule as split points.
pub fn sup_g(params: &Params, phi: &ConvexPhi) -> (f64, f64) {
    let n = params.n() as f64;
    let m = params.m() as f64;
    let mut breaks = vec![0.0, 1.0];
    for atom in phi.second_derivative().atoms() {
        let tau = atom.at.powf(1.0 / m);
        if tau > 0.0 && tau < 1.0 {
            breaks.push(tau);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    quad::adaptive_split(
        |tau| n * (1.0 - tau).powf(n - 1.0) * phi.value(tau.powf(m)),
        &breaks,
        1e-12,
        1e-12,
    )
}
