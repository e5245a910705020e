//! States as points on the unit sphere of P_M and tangent vectors at the base point.
//!
//! A [`PolynomialState`] is a unit coefficient vector X over the monomial basis
//! e_α = c_α z^α in graded-lexicographic order; F(z) = Σ X_α e_α(z). Coherent states
//! are the normalized reproducing kernels k_w. A [`TangentVector`] at the base point
//! X₀ = e₀ has Re Y₀ = 0 and splits into the part along the coherent manifold
//! (degrees ≤ 1) and the normal part (degrees ≥ 2).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{c_alpha, MultiIndex, Params};
use crate::error::{Error, Result};

/// Basis scaling factors c_α for every multi-index of `params`, in index order.
pub fn basis_scales(params: &Params) -> Vec<f64> {
    params
        .indices()
        .iter()
        .map(|alpha| c_alpha(alpha, params.m()).expect("indices come from params"))
        .collect()
}

/// A normalized polynomial F = Σ X_α e_α, stored as its coefficient vector.
#[derive(Debug, Clone)]
pub struct PolynomialState {
    params: Params,
    coeffs: Vec<Complex64>,
    scales: Vec<f64>,
}

impl PolynomialState {
    /// Normalize a raw coefficient vector. Rejects length mismatches and the zero
    /// vector.
    pub fn from_coefficients(params: &Params, raw: Vec<Complex64>) -> Result<Self> {
        if raw.len() != params.dim() {
            return Err(Error::DimensionMismatch {
                expected: params.dim(),
                got: raw.len(),
            });
        }
        let norm = l2_norm(&raw);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParams(format!(
                "coefficient vector must have positive finite norm, got {norm}"
            )));
        }
        let coeffs = raw.into_iter().map(|c| c / norm).collect();
        Ok(Self {
            scales: basis_scales(params),
            params: params.clone(),
            coeffs,
        })
    }

    /// The basis state e_i (unit coefficient on index position `i`).
    pub fn basis_state(params: &Params, i: usize) -> Result<Self> {
        if i >= params.dim() {
            return Err(Error::InvalidParams(format!(
                "basis position {i} out of range for dimension {}",
                params.dim()
            )));
        }
        let mut raw = vec![Complex64::ZERO; params.dim()];
        raw[i] = Complex64::ONE;
        Self::from_coefficients(params, raw)
    }

    /// The coherent state k_w: X_α = c_α w̄^α / (1+|w|²)^{M/2}.
    pub fn coherent_state(params: &Params, w: &[Complex64]) -> Result<Self> {
        if w.len() != params.n() as usize {
            return Err(Error::DimensionMismatch {
                expected: params.n() as usize,
                got: w.len(),
            });
        }
        let w_conj: Vec<Complex64> = w.iter().map(|c| c.conj()).collect();
        let raw: Vec<Complex64> = params
            .indices()
            .iter()
            .map(|alpha| {
                c_alpha(alpha, params.m()).expect("indices come from params") * monomial(&w_conj, alpha)
            })
            .collect();
        // The analytic norm is (1+|w|²)^{M/2}; normalizing the computed vector keeps
        // the unit invariant to machine precision.
        Self::from_coefficients(params, raw)
    }

    /// Uniform draw from the unit sphere: standard complex Gaussian components,
    /// normalized. Deterministic for a given seed.
    pub fn random_state(params: &Params, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = standard_complex_gaussians(params.dim(), &mut rng);
        Self::from_coefficients(params, raw).expect("Gaussian vector is nonzero")
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// F(z) = Σ X_α c_α z^α.
    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.params.n() as usize);
        let mut acc = Complex64::ZERO;
        for ((x, alpha), c) in self
            .coeffs
            .iter()
            .zip(self.params.indices())
            .zip(&self.scales)
        {
            acc += x * c * monomial(z, alpha);
        }
        acc
    }

    /// Husimi density u(z) = |F(z)|² / (1+|z|²)^M ∈ [0, 1] (clamped against rounding
    /// at the coherent peak).
    pub fn husimi(&self, z: &[Complex64]) -> f64 {
        let f = self.evaluate(z);
        let s: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        (f.norm_sqr() / (1.0 + s).powi(self.params.m() as i32)).clamp(0.0, 1.0)
    }

    /// Parse a state file `{"N":..,"M":..,"coeffs":[[re,im],...]}` (graded-lex
    /// order). Returns the normalized state together with the input's deviation
    /// |‖X‖ − 1|; callers should warn when it exceeds 1e−6.
    pub fn from_json(text: &str) -> Result<(Self, f64)> {
        let repr: StateFile = serde_json::from_str(text)?;
        let params = Params::new(repr.n, repr.m)?;
        let raw: Vec<Complex64> = repr
            .coeffs
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        let deviation = (l2_norm(&raw) - 1.0).abs();
        Ok((Self::from_coefficients(&params, raw)?, deviation))
    }

    /// Serialize in the state-file format (normalized coefficients).
    pub fn to_json(&self) -> String {
        let repr = StateFile {
            n: self.params.n(),
            m: self.params.m(),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        };
        serde_json::to_string(&repr).expect("state serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    #[serde(rename = "N")]
    n: u32,
    #[serde(rename = "M")]
    m: u32,
    coeffs: Vec<[f64; 2]>,
}

/// A tangent vector at the base point X₀ = e₀: a coefficient vector Y with Re Y₀ = 0.
#[derive(Debug, Clone)]
pub struct TangentVector {
    params: Params,
    components: Vec<Complex64>,
}

impl TangentVector {
    pub fn new(params: &Params, components: Vec<Complex64>) -> Result<Self> {
        if components.len() != params.dim() {
            return Err(Error::DimensionMismatch {
                expected: params.dim(),
                got: components.len(),
            });
        }
        if components[0].re.abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "tangency at the base point requires Re Y₀ = 0, got {}",
                components[0].re
            )));
        }
        Ok(Self {
            params: params.clone(),
            components,
        })
    }

    /// Gaussian draw on the tangent space (Re Y₀ projected out), normalized.
    pub fn random(params: &Params, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut components = standard_complex_gaussians(params.dim(), &mut rng);
        components[0].re = 0.0;
        Self {
            params: params.clone(),
            components,
        }
        .normalized()
    }

    /// Gaussian draw supported on degrees ≥ 2 (the normal space to the coherent
    /// manifold at X₀), normalized.
    pub fn random_normal_direction(params: &Params, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gauss = standard_complex_gaussians(params.dim(), &mut rng);
        let components = gauss
            .into_iter()
            .zip(params.indices())
            .map(|(g, alpha)| if alpha.degree() >= 2 { g } else { Complex64::ZERO })
            .collect();
        Self {
            params: params.clone(),
            components,
        }
        .normalized()
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.components)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero tangent vector");
        Self {
            params: self.params.clone(),
            components: self.components.iter().map(|c| c / n).collect(),
        }
    }

    /// Real inner product Re⟨a, b⟩ = Re Σ ā_α b_α.
    pub fn re_inner(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Split into (part along the coherent manifold: degrees ≤ 1, part normal to it:
    /// degrees ≥ 2). The parts sum to the original and are Re⟨·,·⟩-orthogonal.
    pub fn split_at_base(&self) -> (Self, Self) {
        let mut tangent = vec![Complex64::ZERO; self.components.len()];
        let mut normal = vec![Complex64::ZERO; self.components.len()];
        for (i, (y, alpha)) in self.components.iter().zip(self.params.indices()).enumerate() {
            if alpha.degree() <= 1 {
                tangent[i] = *y;
            } else {
                normal[i] = *y;
            }
        }
        (
            Self {
                params: self.params.clone(),
                components: tangent,
            },
            Self {
                params: self.params.clone(),
                components: normal,
            },
        )
    }
}

/// z^α = Π z_j^{α_j}.
pub(crate) fn monomial(z: &[Complex64], alpha: &MultiIndex) -> Complex64 {
    z.iter()
        .zip(alpha.components())
        .map(|(zj, &aj)| zj.powu(aj))
        .product()
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn standard_complex_gaussians<R: rand::Rng>(d: usize, rng: &mut R) -> Vec<Complex64> {
    (0..d)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect()
}
