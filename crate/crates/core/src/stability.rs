//! Entropy deficits, the far-field lower bound, and empirical stability scans.
//!
//! The deficit sup G − G(X) is nonnegative and vanishes exactly on coherent states;
//! the stability question is how fast it grows with the distance to the coherent
//! manifold V. Two quantitative handles are implemented: the far-field bound
//! (a closed one-dimensional integral in terms of T = sup u, valid for every state)
//! and empirical scans estimating the constant c in deficit ≥ c·dist(X,V)² as the
//! minimum observed ratio deficit/dist².
//!
//! Scans are deterministic: sample i draws its state from an RNG stream indexed by
//! i, and per-sample Monte Carlo seeds are derived from the same stream, so a scan
//! is reproducible from (seed, count) alone regardless of thread count.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::Params;
use crate::error::{Error, Result};
use crate::geometry::{distance_to_v, DistanceResult};
use crate::measure::{block_rng, draw_nu_into, entropy_g, sup_g, QuadratureScheme};
use crate::phi::ConvexPhi;
use crate::quad;
use crate::state_space::{basis_scales, PolynomialState};

/// sup G − G(X) with propagated error estimate (quadrature error of the sup plus
/// the entropy estimate's own error).
pub fn deficit(
    state: &PolynomialState,
    phi: &ConvexPhi,
    scheme: QuadratureScheme,
) -> Result<(f64, f64)> {
    let (sup, sup_err) = sup_g(state.params(), phi);
    let (g, g_err) = entropy_g(state, phi, scheme)?;
    Ok((sup - g, sup_err + g_err))
}

/// The far-field bound: for any state with Husimi sup T,
/// deficit ≥ ∫_T^1 (Φ′(t) − Φ′₋(T)) μ₀(t) dt with μ₀(t) = (1−t^{1/M})^N.
/// Nonnegative, and nonincreasing in T.
pub fn far_field_bound(params: &Params, phi: &ConvexPhi, t_sup: f64) -> Result<f64> {
    if !(t_sup > 0.0 && t_sup < 1.0) {
        return Err(Error::Domain(format!(
            "far-field bound needs T ∈ (0,1), got {t_sup}"
        )));
    }
    let slope_at_t = phi.d_left(t_sup);
    let n = params.n() as i32;
    let inv_m = 1.0 / params.m() as f64;
    let mut breaks = vec![t_sup, 1.0];
    for atom in phi.second_derivative().atoms() {
        if atom.at > t_sup && atom.at < 1.0 {
            breaks.push(atom.at);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (value, _) = quad::adaptive_split(
        |t| (phi.d_right(t) - slope_at_t) * (1.0 - t.powf(inv_m)).powi(n),
        &breaks,
        1e-12,
        1e-12,
    );
    // The integrand is pointwise nonnegative; clip quadrature jitter.
    Ok(value.max(0.0))
}

/// Result of checking one state against the far-field bound.
#[derive(Debug, Clone, Serialize)]
pub struct FarFieldRecord {
    pub deficit: f64,
    pub deficit_stderr: f64,
    pub t_sup: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Check deficit ≥ far_field_bound(T) − 3·stderr for one state.
pub fn verify_far_field(
    state: &PolynomialState,
    phi: &ConvexPhi,
    scheme: QuadratureScheme,
    n_starts: usize,
    seed: u64,
) -> Result<FarFieldRecord> {
    let (def, stderr) = deficit(state, phi, scheme)?;
    let r = distance_to_v(state, n_starts, seed)?;
    let bound = if r.t_sup < 1.0 {
        far_field_bound(state.params(), phi, r.t_sup)?
    } else {
        0.0
    };
    Ok(FarFieldRecord {
        deficit: def,
        deficit_stderr: stderr,
        t_sup: r.t_sup,
        bound,
        pass: def >= bound - 3.0 * stderr,
    })
}

/// How scan states are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    /// Uniform on the unit sphere of coefficient space.
    UniformSphere,
    /// Geodesic perturbation of a random coherent state: base k_w with w ~ ν, a
    /// random unit direction orthogonal to the manifold frame at k_w, and an arc
    /// length uniform in (0, t_max].
    NearV { t_max: f64 },
    /// Random coherent states themselves (deficits ≈ 0; ratio guard engages).
    Coherent,
}

impl Sampler {
    /// Parse `uniform`, `nearv:<t_max>`, or `coherent`.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec {
            "uniform" => return Ok(Self::UniformSphere),
            "coherent" => return Ok(Self::Coherent),
            _ => {}
        }
        if let Some(rest) = spec.strip_prefix("nearv:") {
            let t_max: f64 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad nearv arc length {rest:?}")))?;
            if !(t_max > 0.0 && t_max <= 1.5) {
                return Err(Error::Parse(format!(
                    "nearv arc length must lie in (0, 1.5], got {t_max}"
                )));
            }
            return Ok(Self::NearV { t_max });
        }
        Err(Error::Parse(format!(
            "unknown sampler {spec:?} (expected uniform, nearv:<t_max>, coherent)"
        )))
    }

    pub fn spec_string(&self) -> String {
        match self {
            Self::UniformSphere => "uniform".into(),
            Self::NearV { t_max } => format!("nearv:{t_max}"),
            Self::Coherent => "coherent".into(),
        }
    }

    fn draw<R: Rng>(&self, params: &Params, rng: &mut R) -> PolynomialState {
        match self {
            Self::UniformSphere => {
                let raw: Vec<Complex64> = (0..params.dim())
                    .map(|_| gaussian(rng))
                    .collect();
                PolynomialState::from_coefficients(params, raw)
                    .expect("Gaussian vector is nonzero")
            }
            Self::Coherent => {
                let mut w = vec![Complex64::ZERO; params.n() as usize];
                draw_nu_into(rng, &mut w);
                PolynomialState::coherent_state(params, &w).expect("w is finite")
            }
            Self::NearV { t_max } => {
                let mut w = vec![Complex64::ZERO; params.n() as usize];
                draw_nu_into(rng, &mut w);
                let base = PolynomialState::coherent_state(params, &w).expect("w is finite");
                let normal = random_normal_at(params, &w, base.coeffs(), rng);
                let t = rng.random::<f64>() * t_max;
                let (c, s) = (t.cos(), t.sin());
                let coeffs = base
                    .coeffs()
                    .iter()
                    .zip(&normal)
                    .map(|(k, y)| c * k + s * y)
                    .collect();
                PolynomialState::from_coefficients(params, coeffs)
                    .expect("unit combination of orthonormal vectors")
            }
        }
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// The tangent frame of the coherent manifold (as a subset of the unit sphere) at
/// k_w, in ambient coefficient coordinates: [k_w, i·k_w, ∂k_w/∂Re w_j, ∂k_w/∂Im w_j].
/// The first vector is the sphere normal; the rest span the manifold directions.
pub fn coherent_frame(params: &Params, w: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
    if w.len() != params.n() as usize {
        return Err(Error::DimensionMismatch {
            expected: params.n() as usize,
            got: w.len(),
        });
    }
    let scales = basis_scales(params);
    let m = params.m() as f64;
    let norm_sq = 1.0 + w.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let g = norm_sq.powf(-m / 2.0);
    let w_conj: Vec<Complex64> = w.iter().map(|c| c.conj()).collect();

    // k_w itself: X_α = c_α w̄^α g.
    let k: Vec<Complex64> = params
        .indices()
        .iter()
        .zip(&scales)
        .map(|(alpha, c)| c * crate::state_space::monomial(&w_conj, alpha) * g)
        .collect();
    let ik: Vec<Complex64> = k.iter().map(|x| Complex64::I * x).collect();

    let mut frame = vec![k.clone(), ik];
    for j in 0..w.len() {
        // ∂(w̄^α)/∂Re w_j = α_j w̄^{α−e_j}, ∂(w̄^α)/∂Im w_j = −i α_j w̄^{α−e_j};
        // ∂g/∂Re w_j = −M Re(w_j) g / (1+|w|²), similarly with Im.
        let partial = |is_im: bool| -> Vec<Complex64> {
            let dg_factor = -m / norm_sq * if is_im { w[j].im } else { w[j].re };
            params
                .indices()
                .iter()
                .zip(&scales)
                .zip(&k)
                .map(|((alpha, c), k_entry)| {
                    let aj = alpha.components()[j];
                    let mut dv = Complex64::ZERO;
                    if aj > 0 {
                        let mut reduced = alpha.components().to_vec();
                        reduced[j] -= 1;
                        let mono = crate::state_space::monomial(
                            &w_conj,
                            &crate::combinatorics::MultiIndex::new(reduced),
                        );
                        dv = c * aj as f64 * mono * g;
                        if is_im {
                            dv *= -Complex64::I;
                        }
                    }
                    dg_factor * k_entry + dv
                })
                .collect()
        };
        frame.push(partial(false));
        frame.push(partial(true));
    }
    Ok(frame)
}

/// A Gaussian direction orthogonalized (in the real inner product) against the
/// frame at k_w, normalized. Geodesics from k_w along such directions leave V
/// orthogonally, so their arc length bounds dist(·, V) from above.
fn random_normal_at<R: Rng>(
    params: &Params,
    w: &[Complex64],
    _base: &[Complex64],
    rng: &mut R,
) -> Vec<Complex64> {
    let frame = coherent_frame(params, w).expect("w has the right dimension");
    // Gram–Schmidt on the frame (real inner product on C^d ≅ R^{2d}).
    let mut ortho: Vec<Vec<Complex64>> = Vec::with_capacity(frame.len());
    for mut f in frame {
        for e in &ortho {
            let proj = re_dot(e, &f);
            for (fe, ee) in f.iter_mut().zip(e) {
                *fe -= proj * ee;
            }
        }
        let norm = norm_of(&f);
        if norm > 1e-10 {
            for fe in f.iter_mut() {
                *fe /= norm;
            }
            ortho.push(f);
        }
    }
    loop {
        let mut z: Vec<Complex64> = (0..params.dim()).map(|_| gaussian(rng)).collect();
        for e in &ortho {
            let proj = re_dot(e, &z);
            for (ze, ee) in z.iter_mut().zip(e) {
                *ze -= proj * ee;
            }
        }
        let norm = norm_of(&z);
        if norm > 1e-8 {
            for ze in z.iter_mut() {
                *ze /= norm;
            }
            return z;
        }
    }
}

fn re_dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

fn norm_of(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// One scan row.
#[derive(Debug, Clone, Serialize)]
pub struct ScanSample {
    pub seed_index: u64,
    pub deficit: f64,
    pub deficit_stderr: f64,
    pub t_sup: f64,
    pub d_euclid: f64,
    pub dist_geodesic: f64,
    /// deficit / dist², present only when dist > 1e−6 (guards noise-dominated
    /// quotients).
    pub ratio: Option<f64>,
}

/// Full scan output: per-sample rows plus the empirical stability constant.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub n: u32,
    pub m: u32,
    pub phi: String,
    pub scheme: String,
    pub sampler: String,
    pub n_starts: usize,
    pub seed: u64,
    pub count: usize,
    pub min_ratio: Option<f64>,
    pub argmin_index: Option<u64>,
    pub samples: Vec<ScanSample>,
}

impl ScanReport {
    /// Flat CSV, one row per sample; `ratio` is empty when the guard suppressed it.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("seed_index,deficit,deficit_stderr,t_sup,d_euclid,dist_geodesic,ratio\n");
        for s in &self.samples {
            let ratio = s.ratio.map(|r| r.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.seed_index, s.deficit, s.deficit_stderr, s.t_sup, s.d_euclid, s.dist_geodesic, ratio
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Run the deficit/distance pipeline over `count` sampled states. Deterministic in
/// `seed` and independent of thread count; per-sample Monte Carlo seeds and
/// optimizer seeds are derived from the per-sample stream.
pub fn stability_scan(
    params: &Params,
    phi: &ConvexPhi,
    count: usize,
    sampler: Sampler,
    scheme: QuadratureScheme,
    n_starts: usize,
    seed: u64,
) -> Result<ScanReport> {
    let samples: Vec<ScanSample> = (0..count as u64)
        .into_par_iter()
        .map(|i| -> Result<ScanSample> {
            let mut rng = block_rng(seed, i);
            let state = sampler.draw(params, &mut rng);
            let mc_seed: u64 = rng.random();
            let opt_seed: u64 = rng.random();
            let scheme_i = match scheme {
                QuadratureScheme::MonteCarlo { n, .. } => {
                    QuadratureScheme::MonteCarlo { n, seed: mc_seed }
                }
                t => t,
            };
            let (def, stderr) = deficit(&state, phi, scheme_i)?;
            let r: DistanceResult = distance_to_v(&state, n_starts, opt_seed)?;
            let ratio = (r.dist_geodesic > 1e-6)
                .then(|| def / (r.dist_geodesic * r.dist_geodesic));
            Ok(ScanSample {
                seed_index: i,
                deficit: def,
                deficit_stderr: stderr,
                t_sup: r.t_sup,
                d_euclid: r.d_euclid,
                dist_geodesic: r.dist_geodesic,
                ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (mut min_ratio, mut argmin) = (None::<f64>, None::<u64>);
    for s in &samples {
        if let Some(r) = s.ratio {
            if min_ratio.is_none_or(|m| r < m) {
                min_ratio = Some(r);
                argmin = Some(s.seed_index);
            }
        }
    }
    Ok(ScanReport {
        n: params.n(),
        m: params.m(),
        phi: phi.id().to_string(),
        scheme: scheme.spec_string(),
        sampler: sampler.spec_string(),
        n_starts,
        seed,
        count,
        min_ratio,
        argmin_index: argmin,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::geodesic_from_x0;
    use crate::phi::parse_phi_spec;
    use crate::state_space::TangentVector;
    use approx::assert_abs_diff_eq;

    fn params(n: u32, m: u32) -> Params {
        Params::new(n, m).unwrap()
    }

    #[test]
    fn deficit_examples() {
        let p = params(1, 2);
        let phi = parse_phi_spec("pow:2").unwrap();
        let tensor = QuadratureScheme::tensor_default(2);

        let coherent =
            PolynomialState::coherent_state(&p, &[Complex64::new(0.3, 0.9)]).unwrap();
        let (def, err) = deficit(&coherent, &phi, tensor).unwrap();
        assert!(def.abs() <= 3.0 * err + 1e-12, "coherent deficit {def}");

        let e1 = PolynomialState::basis_state(&p, 1).unwrap();
        let (def, _) = deficit(&e1, &phi, tensor).unwrap();
        assert_abs_diff_eq!(def, 1.0 / 15.0, epsilon = 1e-10);

        // Affine Φ: G is constant, so the deficit vanishes for every state.
        let affine = crate::phi::ConvexPhi::affine(0.1, 2.0);
        for seed in 0..3u64 {
            let state = PolynomialState::random_state(&p, seed);
            let (def, _) = deficit(&state, &affine, tensor).unwrap();
            assert_abs_diff_eq!(def, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn far_field_bound_examples() {
        let p = params(1, 2);
        let phi = parse_phi_spec("pow:2").unwrap();
        // ∫_{1/2}^1 (2t−1)(1−√t) dt = 1/4 − (2/15)(1+1/√2).
        let expect = 0.25 - (2.0 / 15.0) * (1.0 + 0.5f64.sqrt());
        assert_abs_diff_eq!(
            far_field_bound(&p, &phi, 0.5).unwrap(),
            expect,
            epsilon = 1e-10
        );
        assert!(far_field_bound(&p, &phi, 0.999_999).unwrap() < 1e-9);
        assert!(far_field_bound(&p, &phi, 0.0).is_err());
        assert!(far_field_bound(&p, &phi, 1.0).is_err());

        let affine = crate::phi::ConvexPhi::affine(0.0, 1.0);
        for t in [0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(far_field_bound(&p, &affine, t).unwrap(), 0.0, epsilon = 1e-14);
        }

        // Monotone nonincreasing in T, including across a kink of Φ.
        let hinge = parse_phi_spec("hinge:0.6").unwrap();
        for phi in [&phi, &hinge] {
            let mut prev = f64::INFINITY;
            for i in 1..20 {
                let t = i as f64 / 20.0;
                let b = far_field_bound(&p, phi, t).unwrap();
                assert!(b <= prev + 1e-12, "bound not monotone at T={t}");
                assert!(b >= 0.0);
                prev = b;
            }
        }
    }

    #[test]
    fn far_field_verification_passes() {
        let p = params(1, 2);
        let phi = parse_phi_spec("pow:2").unwrap();
        let tensor = QuadratureScheme::tensor_default(2);

        let e1 = PolynomialState::basis_state(&p, 1).unwrap();
        let rec = verify_far_field(&e1, &phi, tensor, 16, 1).unwrap();
        assert!(rec.pass);
        assert_abs_diff_eq!(rec.t_sup, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(rec.deficit, 1.0 / 15.0, epsilon = 1e-10);
        assert!(rec.deficit > rec.bound, "strict far-field margin expected");

        let coherent = PolynomialState::coherent_state(&p, &[Complex64::ONE]).unwrap();
        let rec = verify_far_field(&coherent, &phi, tensor, 16, 2).unwrap();
        assert!(rec.pass);

        for seed in 0..10u64 {
            let state = PolynomialState::random_state(&p, seed);
            let rec = verify_far_field(&state, &phi, tensor, 16, 100 + seed).unwrap();
            assert!(rec.pass, "seed {seed}: deficit {} < bound {}", rec.deficit, rec.bound);
        }
    }

    #[test]
    fn coherent_frame_matches_finite_differences() {
        let p = params(2, 3);
        let w = [Complex64::new(0.6, -0.2), Complex64::new(-0.1, 0.8)];
        let frame = coherent_frame(&p, &w).unwrap();
        let delta = 1e-5;
        let state_at = |w: &[Complex64]| {
            PolynomialState::coherent_state(&p, w)
                .unwrap()
                .coeffs()
                .to_vec()
        };
        for j in 0..2 {
            for (slot, is_im) in [(2 + 2 * j, false), (3 + 2 * j, true)] {
                let mut wp = w.to_vec();
                let mut wm = w.to_vec();
                if is_im {
                    wp[j].im += delta;
                    wm[j].im -= delta;
                } else {
                    wp[j].re += delta;
                    wm[j].re -= delta;
                }
                let (plus, minus) = (state_at(&wp), state_at(&wm));
                for (i, analytic) in frame[slot].iter().enumerate() {
                    let fd = (plus[i] - minus[i]) / (2.0 * delta);
                    assert_abs_diff_eq!(fd.re, analytic.re, epsilon = 1e-7);
                    assert_abs_diff_eq!(fd.im, analytic.im, epsilon = 1e-7);
                }
            }
        }
    }

    #[test]
    fn quadratic_regime_matches_hessian_ratio() {
        // Perturbing X₀ along e₂ at (N=1, M=2, pow:2): deficit/dist² → −d²G/2 = 4/15.
        let p = params(1, 2);
        let phi = parse_phi_spec("pow:2").unwrap();
        let tensor = QuadratureScheme::tensor_default(2);
        let c = Complex64::new;
        let e2 = TangentVector::new(&p, vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let target = 4.0 / 15.0;
        let mut errs = vec![];
        for t in [0.05, 0.02] {
            let state = geodesic_from_x0(&e2, t).unwrap();
            let (def, _) = deficit(&state, &phi, tensor).unwrap();
            let r = distance_to_v(&state, 16, 5).unwrap();
            assert_abs_diff_eq!(r.dist_geodesic, t, epsilon = 1e-9);
            let ratio = def / (r.dist_geodesic * r.dist_geodesic);
            errs.push((ratio - target).abs());
            assert!(
                (ratio - target).abs() <= 0.05 * target,
                "t={t}: ratio {ratio} vs {target}"
            );
        }
        assert!(errs[1] < errs[0], "ratio should converge as t shrinks");
    }

    #[test]
    fn uniform_scan_has_positive_ratios_and_is_deterministic() {
        let p = params(1, 2);
        let phi = parse_phi_spec("pow:2").unwrap();
        let scheme = QuadratureScheme::tensor_default(2);
        let report = stability_scan(&p, &phi, 40, Sampler::UniformSphere, scheme, 8, 99).unwrap();
        assert_eq!(report.samples.len(), 40);
        let min = report.min_ratio.expect("uniform states stay away from V");
        assert!(min > 0.0, "min ratio {min}");
        for s in &report.samples {
            if let Some(r) = s.ratio {
                assert!(r >= min);
            }
            assert!(s.deficit >= -1e-10);
        }

        let again = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| {
                stability_scan(&p, &phi, 40, Sampler::UniformSphere, scheme, 8, 99).unwrap()
            });
        assert_eq!(report.to_csv(), again.to_csv());
        assert_eq!(report.min_ratio, again.min_ratio);
    }

    #[test]
    fn coherent_scan_engages_ratio_guard() {
        let p = params(1, 2);
        let phi = parse_phi_spec("pow:2").unwrap();
        let report = stability_scan(
            &p,
            &phi,
            10,
            Sampler::Coherent,
            QuadratureScheme::tensor_default(2),
            8,
            5,
        )
        .unwrap();
        for s in &report.samples {
            assert!(s.deficit.abs() < 1e-8, "coherent deficit {}", s.deficit);
            assert!(s.dist_geodesic < 1e-6, "coherent dist {}", s.dist_geodesic);
            assert!(s.ratio.is_none(), "guard should suppress ratio at dist ≈ 0");
        }
        assert!(report.min_ratio.is_none());
        assert!(report.argmin_index.is_none());
    }

    #[test]
    fn near_v_scan_behaves() {
        let p = params(1, 2);
        let phi = parse_phi_spec("pow:2").unwrap();
        let report = stability_scan(
            &p,
            &phi,
            25,
            Sampler::NearV { t_max: 0.3 },
            QuadratureScheme::tensor_default(2),
            8,
            7,
        )
        .unwrap();
        let min = report.min_ratio.expect("perturbed states leave V");
        assert!(min > 0.0);
        for s in &report.samples {
            // The construction bounds the distance by the arc length drawn.
            assert!(s.dist_geodesic <= 0.3 + 1e-6);
        }
    }

    #[test]
    fn sampler_specs_parse_and_roundtrip() {
        assert_eq!(Sampler::parse("uniform").unwrap(), Sampler::UniformSphere);
        assert_eq!(Sampler::parse("coherent").unwrap(), Sampler::Coherent);
        assert_eq!(
            Sampler::parse("nearv:0.25").unwrap(),
            Sampler::NearV { t_max: 0.25 }
        );
        for bad in ["nearv:0", "nearv:2.0", "nearv:x", "spherical"] {
            assert!(Sampler::parse(bad).is_err(), "{bad} should fail");
        }
        for s in [Sampler::UniformSphere, Sampler::NearV { t_max: 0.25 }, Sampler::Coherent] {
            assert_eq!(Sampler::parse(&s.spec_string()).unwrap(), s);
        }
    }

    #[test]
    fn reports_serialize() {
        let p = params(1, 2);
        let phi = parse_phi_spec("pow:2").unwrap();
        let report = stability_scan(
            &p,
            &phi,
            5,
            Sampler::UniformSphere,
            QuadratureScheme::tensor_default(2),
            4,
            1,
        )
        .unwrap();
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.starts_with("seed_index,deficit"));
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["count"], 5);
        assert_eq!(json["samples"].as_array().unwrap().len(), 5);
        assert_eq!(json["sampler"], "uniform");
    }
}
