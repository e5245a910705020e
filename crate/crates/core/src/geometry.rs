//! Distance from a state to the coherent-state manifold V.
//!
//! The squared overlap with coherent directions is maximized in homogeneous
//! coordinates: F_h(v₀,…,v_N) = Σ_α X_α c_α v₀^{M−|α|} v^α on the unit sphere of
//! C^{N+1}, whose value at unit v equals the Husimi density at z = (v₁,…,v_N)/v₀.
//! This compactifies the search domain and covers maximizers at infinity (v₀ = 0).
//! From T = sup |F_h|² the chordal and geodesic distances follow in closed form:
//! D = √(2−2√T), dist = 2·arcsin(D/2).
//!
//! The maximizer search is multi-start projected gradient ascent with Armijo
//! backtracking and renormalization as the retraction; one start is placed at the
//! coherent direction suggested by the largest coefficient, the rest are uniform on
//! the sphere. Starts are scanned in a fixed order with a strict improvement
//! threshold, so results are deterministic for a given seed.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::state_space::{basis_scales, PolynomialState, TangentVector};

/// Gradient-norm threshold for declared convergence of one ascent run.
const GRAD_TOL: f64 = 1e-12;
/// Maximum ascent iterations per start.
const MAX_ITERS: usize = 500;
/// Two candidate maxima closer than this are treated as ties (first found wins).
const TIE_TOL: f64 = 1e-12;

/// Outcome of a distance computation.
#[derive(Debug, Clone)]
pub struct DistanceResult {
    /// T = sup_z u(z) ∈ (0, 1].
    pub t_sup: f64,
    /// Chordal distance to V: √(2−2√T).
    pub d_euclid: f64,
    /// Geodesic distance: 2·arcsin(D/2).
    pub dist_geodesic: f64,
    /// Unit vector in C^{N+1} achieving the best value found.
    pub argmax_v: Vec<Complex64>,
    /// Total ascent starts executed.
    pub n_starts_used: usize,
    /// Whether the best start reached the gradient tolerance.
    pub converged: bool,
}

struct Objective<'a> {
    state: &'a PolynomialState,
    scales: Vec<f64>,
    m: u32,
}

impl<'a> Objective<'a> {
    fn new(state: &'a PolynomialState) -> Self {
        Self {
            scales: basis_scales(state.params()),
            m: state.params().m(),
            state,
        }
    }

    /// F_h(v) = Σ_α X_α c_α v₀^{M−|α|} v^α.
    fn f_h(&self, v: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for ((x, alpha), c) in self
            .state
            .coeffs()
            .iter()
            .zip(self.state.params().indices())
            .zip(&self.scales)
        {
            let mut term = v[0].powu(self.m - alpha.degree());
            for (j, &aj) in alpha.components().iter().enumerate() {
                if aj > 0 {
                    term *= v[1 + j].powu(aj);
                }
            }
            acc += x * c * term;
        }
        acc
    }

    fn value(&self, v: &[Complex64]) -> f64 {
        self.f_h(v).norm_sqr()
    }

    /// Value and the real gradient of |F_h|² as a complex vector (2 ∂/∂v̄).
    fn value_and_grad(&self, v: &[Complex64]) -> (f64, Vec<Complex64>) {
        let f = self.f_h(v);
        let mut df = vec![Complex64::ZERO; v.len()];
        for ((x, alpha), c) in self
            .state
            .coeffs()
            .iter()
            .zip(self.state.params().indices())
            .zip(&self.scales)
        {
            let weight = x * c;
            let k0 = self.m - alpha.degree();
            // ∂/∂v₀.
            if k0 > 0 {
                let mut term = v[0].powu(k0 - 1) * k0 as f64;
                for (j, &aj) in alpha.components().iter().enumerate() {
                    if aj > 0 {
                        term *= v[1 + j].powu(aj);
                    }
                }
                df[0] += weight * term;
            }
            // ∂/∂v_j.
            for (j, &aj) in alpha.components().iter().enumerate() {
                if aj == 0 {
                    continue;
                }
                let mut term = v[0].powu(k0) * aj as f64 * v[1 + j].powu(aj - 1);
                for (l, &al) in alpha.components().iter().enumerate() {
                    if l != j && al > 0 {
                        term *= v[1 + l].powu(al);
                    }
                }
                df[1 + j] += weight * term;
            }
        }
        let grad = df.iter().map(|d| 2.0 * f * d.conj()).collect();
        (f.norm_sqr(), grad)
    }
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in v.iter_mut() {
        *c /= norm;
    }
}

/// Project the ambient gradient onto the tangent space of the unit sphere
/// (real-linear projection: remove the radial component Re⟨v, g⟩ v).
fn riemannian(v: &[Complex64], grad: &[Complex64]) -> Vec<Complex64> {
    let radial: f64 = v.iter().zip(grad).map(|(a, b)| (a.conj() * b).re).sum();
    v.iter()
        .zip(grad)
        .map(|(vi, gi)| gi - radial * vi)
        .collect()
}

/// One projected gradient ascent run; returns (value, point, converged).
fn ascend(obj: &Objective, mut v: Vec<Complex64>) -> (f64, Vec<Complex64>, bool) {
    normalize(&mut v);
    let mut g = obj.value(&v);
    for _ in 0..MAX_ITERS {
        let (_, grad) = obj.value_and_grad(&v);
        let rg = riemannian(&v, &grad);
        let rg_norm_sq: f64 = rg.iter().map(|c| c.norm_sqr()).sum();
        if rg_norm_sq.sqrt() <= GRAD_TOL {
            return (g, v, true);
        }
        // Armijo backtracking from a unit step; retraction = renormalization.
        // Once a step passes the sufficient-increase test, shorter steps are
        // probed while they improve further: plain backtracking can lock onto a
        // near-reflection step (overshooting the peak almost symmetrically, a
        // real failure mode at quadratic peaks of unit height) and then crawl.
        let mut step = 1.0;
        let mut accepted: Option<(f64, Vec<Complex64>)> = None;
        while step >= 1e-20 {
            let mut cand: Vec<Complex64> =
                v.iter().zip(&rg).map(|(vi, ri)| vi + step * ri).collect();
            normalize(&mut cand);
            let g_cand = obj.value(&cand);
            match &accepted {
                None if g_cand >= g + 1e-4 * step * rg_norm_sq => {
                    accepted = Some((g_cand, cand));
                }
                None => {}
                Some((g_acc, _)) if g_cand > *g_acc => accepted = Some((g_cand, cand)),
                Some(_) => break,
            }
            step *= 0.5;
        }
        match accepted {
            Some((g_new, cand)) => {
                v = cand;
                g = g_new;
            }
            // No representable step improves the objective: numerical summit.
            None => return (g, v, rg_norm_sq.sqrt() <= GRAD_TOL),
        }
    }
    let (_, grad) = obj.value_and_grad(&v);
    let rg = riemannian(&v, &grad);
    let rg_norm = rg.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    (g, v, rg_norm <= GRAD_TOL)
}

/// Start at the coherent direction matching the largest coefficient: for the peak
/// index α*, |v₀|² = (M−|α*|)/M and |v_j|² = α*_j/M (the critical-point profile for
/// a single-monomial state).
fn heuristic_start(state: &PolynomialState) -> Vec<Complex64> {
    let params = state.params();
    let (peak, _) = state
        .coeffs()
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .expect("states are non-empty");
    let alpha = params.index(peak);
    let m = params.m() as f64;
    let mut v = Vec::with_capacity(params.n() as usize + 1);
    v.push(Complex64::new(
        ((m - alpha.degree() as f64) / m).sqrt(),
        0.0,
    ));
    for &aj in alpha.components() {
        v.push(Complex64::new((aj as f64 / m).sqrt(), 0.0));
    }
    v
}

/// Maximize the Husimi density over coherent directions: multi-start ascent on the
/// unit sphere of C^{N+1}. `n_starts` uniform starts are added after the heuristic
/// one. Deterministic given `seed`; ties within 1e−12 go to the earliest start.
pub fn husimi_sup(state: &PolynomialState, n_starts: usize, seed: u64) -> Result<DistanceResult> {
    if n_starts < 1 {
        return Err(Error::InvalidParams(
            "at least one ascent start is required".into(),
        ));
    }
    let obj = Objective::new(state);
    let dim_v = state.params().n() as usize + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best: Option<(f64, Vec<Complex64>, bool)> = None;
    let mut used = 0;
    for start_idx in 0..=n_starts {
        let start = if start_idx == 0 {
            heuristic_start(state)
        } else {
            let v: Vec<Complex64> = (0..dim_v)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect();
            if v.iter().map(|c| c.norm_sqr()).sum::<f64>() == 0.0 {
                continue;
            }
            v
        };
        used += 1;
        let (g, v, conv) = ascend(&obj, start);
        let better = match &best {
            None => true,
            Some((g_best, _, _)) => g > g_best + TIE_TOL,
        };
        if better {
            best = Some((g, v, conv));
        }
    }
    let (t_raw, argmax_v, converged) = best.expect("at least the heuristic start ran");
    let t_sup = t_raw.clamp(0.0, 1.0);
    let d_euclid = (2.0 - 2.0 * t_sup.sqrt()).max(0.0).sqrt();
    Ok(DistanceResult {
        t_sup,
        d_euclid,
        dist_geodesic: chord_to_geodesic(d_euclid)?,
        argmax_v,
        n_starts_used: used,
        converged,
    })
}

/// Distance from a state to the coherent manifold: D = √(2−2√T) and its geodesic
/// counterpart, via [`husimi_sup`].
pub fn distance_to_v(state: &PolynomialState, n_starts: usize, seed: u64) -> Result<DistanceResult> {
    husimi_sup(state, n_starts, seed)
}

/// Unit-speed great circle from the base point X₀ = e₀: X(t) = cos(t)·X₀ + sin(t)·Y.
/// Requires a unit tangent vector.
pub fn geodesic_from_x0(y: &TangentVector, t: f64) -> Result<PolynomialState> {
    if (y.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParams(format!(
            "geodesic direction must be a unit vector, norm = {}",
            y.norm()
        )));
    }
    let (c, s) = (t.cos(), t.sin());
    let mut coeffs: Vec<Complex64> = y.components().iter().map(|yc| s * yc).collect();
    coeffs[0] += Complex64::new(c, 0.0);
    PolynomialState::from_coefficients(y.params(), coeffs)
}

/// Geodesic distance on the sphere from a chord length: 2·arcsin(D/2).
pub fn chord_to_geodesic(d: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&d) {
        return Err(Error::Domain(format!(
            "chord length must lie in [0,2], got {d}"
        )));
    }
    Ok(2.0 * (d / 2.0).asin())
}

/// Chord length from a geodesic distance in [0, π]: 2·sin(g/2).
pub fn geodesic_to_chord(g: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI + 1e-12).contains(&g) {
        return Err(Error::Domain(format!(
            "geodesic distance must lie in [0,π], got {g}"
        )));
    }
    Ok(2.0 * (g / 2.0).sin())
}
