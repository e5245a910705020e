//! One-dimensional quadrature: adaptive Gauss–Kronrod 7/15 and Gauss–Legendre rules.
//!
//! The adaptive integrator drives every closed-form cross-check in this crate
//! (incomplete-beta oracles, Hessian coefficients, far-field bounds), so it is kept
//! deliberately small and transparent: bisect the interval with the largest
//! Gauss/Kronrod discrepancy until the summed error estimate meets the tolerance.
//! Kronrod nodes are interior, so integrable endpoint singularities are never
//! evaluated at the endpoints themselves.

/// 15-point Kronrod abscissae on [-1, 1] (positive half; symmetric).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// 7-point Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of one Gauss–Kronrod pass on a single interval: (kronrod value, |GK15 - G7|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = WGK[7] * f(c);
    let mut gauss = WG[3] * f(c);
    for i in 0..7 {
        let x = h * XGK[i];
        let pair = f(c - x) + f(c + x);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    ((kronrod * h), (kronrod - gauss).abs() * h.abs())
}

/// Adaptive integral of `f` over [a, b]. Returns (value, error estimate).
///
/// Subdivides the interval with the largest local error until the total estimate
/// drops below `max(abs_tol, rel_tol * |value|)` or `max_intervals` is reached;
/// the achieved estimate is returned either way.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> (f64, f64) {
    adaptive_split(f, &[a, b], abs_tol, rel_tol)
}

/// Adaptive integration over the union of consecutive intervals in `breaks`.
///
/// `breaks` must be strictly increasing; interior entries seed the subdivision so
/// known kinks or atom locations never sit inside a working interval.
pub fn adaptive_split<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> (f64, f64) {
    assert!(breaks.len() >= 2, "need at least one interval");
    const MAX_INTERVALS: usize = 20_000;
    // (error, a, b, value); a plain vec scanned for the max keeps this dependency-free
    // and the interval counts are small.
    let mut parts: Vec<(f64, f64, f64, f64)> = Vec::new();
    for w in breaks.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        parts.push((e, w[0], w[1], v));
    }
    loop {
        let value: f64 = parts.iter().map(|p| p.3).sum();
        let err: f64 = parts.iter().map(|p| p.0).sum();
        if err <= abs_tol.max(rel_tol * value.abs()) || parts.len() >= MAX_INTERVALS {
            return (value, err);
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
            .map(|(i, _)| i)
            .unwrap();
        let (_, a, b, _) = parts.swap_remove(worst);
        let m = 0.5 * (a + b);
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        parts.push((e1, a, m, v1));
        parts.push((e2, m, b, v2));
    }
}

/// Gauss–Legendre nodes and weights of order `n` on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; standard construction, accurate to
/// machine precision for the orders used here (n ≤ a few hundred).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_{n-1}(x) by upward recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to [0, 1].
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|v| 0.5 * v).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_are_exact() {
        // Kronrod-15 is exact through degree 22; a single pass must nail x^20.
        let (v, _) = adaptive(|x| x.powi(20), 0.0, 1.0, 1e-14, 0.0);
        assert_relative_eq!(v, 1.0 / 21.0, max_relative = 1e-14);
    }

    #[test]
    fn smooth_integrands() {
        let (v, e) = adaptive(f64::exp, 0.0, 1.0, 1e-13, 0.0);
        assert_relative_eq!(v, std::f64::consts::E - 1.0, max_relative = 1e-13);
        assert!(e < 1e-12);

        let (v, _) = adaptive(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-13, 0.0);
        assert_relative_eq!(v, std::f64::consts::FRAC_PI_4, max_relative = 1e-13);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let (v, _) = adaptive(|x| x.sqrt().recip(), 0.0, 1.0, 1e-11, 0.0);
        assert_relative_eq!(v, 2.0, epsilon = 1e-9);

        let (v, _) = adaptive(|x| -x.ln(), 0.0, 1.0, 1e-11, 0.0);
        assert_relative_eq!(v, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn split_points_handle_kinks() {
        // |x - 1/3| has a kink; seeding the breakpoint gives full accuracy.
        let f = |x: f64| (x - 1.0 / 3.0).abs();
        let (v, _) = adaptive_split(f, &[0.0, 1.0 / 3.0, 1.0], 1e-14, 0.0);
        let exact = (1.0 / 3.0f64).powi(2) / 2.0 + (2.0 / 3.0f64).powi(2) / 2.0;
        assert_relative_eq!(v, exact, max_relative = 1e-14);
    }

    #[test]
    fn gauss_legendre_degrees_of_exactness() {
        // Order n integrates degree 2n-1 exactly.
        for n in [1usize, 2, 3, 5, 8, 16, 64] {
            let (x, w) = gauss_legendre_01(n);
            let k = 2 * n - 1;
            let quad: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
            assert_relative_eq!(quad, 1.0 / (k as f64 + 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn gauss_legendre_weights_sum_to_interval() {
        for n in [3usize, 17, 120] {
            let (_, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-13);
        }
    }
}
