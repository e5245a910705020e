//! Convex weight functions Φ on [0, 1].
//!
//! A [`ConvexPhi`] carries its value, both one-sided derivatives, and a second
//! derivative represented structurally as absolutely-continuous density pieces plus
//! point atoms (a finite positive measure). Integrals against Φ″ — the backbone of
//! the Hessian coefficients — therefore treat hinges exactly instead of smearing the
//! atom through a quadrature rule.
//!
//! Builtins: `pow:p` (t^p, p > 1), `xlogx` (t log t), `hinge:T` (max(0, t−T)).
//! Transformations: tangent splitting at a threshold, affine continuation outside a
//! window, and mollification by a fixed C^∞ bump. Values are never renormalized at 0;
//! entropy deficits are invariant under affine changes of Φ because ∫ u dν is the
//! same for every state.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad;

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Point mass of a second-derivative measure.
#[derive(Clone)]
pub struct Atom {
    pub at: f64,
    pub mass: f64,
}

/// Absolutely continuous part of a second-derivative measure on an open interval.
#[derive(Clone)]
pub struct Piece {
    lo: f64,
    hi: f64,
    density: Func,
}

impl Piece {
    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Density value at an interior point.
    pub fn density_at(&self, t: f64) -> f64 {
        (self.density)(t)
    }
}

/// Second derivative of a convex function as a finite positive measure on (0, 1).
#[derive(Clone, Default)]
pub struct SecondDerivative {
    pieces: Vec<Piece>,
    atoms: Vec<Atom>,
}

impl SecondDerivative {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn has_atoms(&self) -> bool {
        !self.atoms.is_empty()
    }

    /// Smallest closed interval carrying all mass, or `None` for the zero measure.
    pub fn support(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.pieces {
            lo = lo.min(p.lo);
            hi = hi.max(p.hi);
        }
        for a in &self.atoms {
            lo = lo.min(a.at);
            hi = hi.max(a.at);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// ∫ g dΦ″ over (0,1): adaptive quadrature on each density piece plus Σ m·g(atom).
    /// Returns (value, quadrature error estimate).
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G, abs_tol: f64) -> (f64, f64) {
        let mut value = 0.0;
        let mut err = 0.0;
        for p in &self.pieces {
            let dens = Arc::clone(&p.density);
            let (v, e) = quad::adaptive(|t| dens(t) * g(t), p.lo, p.hi, abs_tol, 0.0);
            value += v;
            err += e;
        }
        for a in &self.atoms {
            value += a.mass * g(a.at);
        }
        (value, err)
    }

    /// Total mass on [lo, hi].
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let mut mass = 0.0;
        for p in &self.pieces {
            let (a, b) = (p.lo.max(lo), p.hi.min(hi));
            if a < b {
                let dens = Arc::clone(&p.density);
                let (v, _) = quad::adaptive(move |t| dens(t), a, b, 1e-12, 1e-12);
                mass += v;
            }
        }
        for a in &self.atoms {
            if a.at >= lo && a.at <= hi {
                mass += a.mass;
            }
        }
        mass
    }

    /// Clip to the open interval (lo, hi); atoms exactly at the cut points follow
    /// `keep_lo`/`keep_hi`.
    fn clipped(&self, lo: f64, hi: f64, keep_lo: bool, keep_hi: bool) -> Self {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| {
                let (a, b) = (p.lo.max(lo), p.hi.min(hi));
                (a < b).then(|| Piece {
                    lo: a,
                    hi: b,
                    density: Arc::clone(&p.density),
                })
            })
            .collect();
        let atoms = self
            .atoms
            .iter()
            .filter(|a| {
                (a.at > lo || (keep_lo && a.at == lo)) && (a.at < hi || (keep_hi && a.at == hi))
            })
            .cloned()
            .collect();
        Self { pieces, atoms }
    }
}

/// A convex function on [0, 1] with one-sided derivatives and a structural second
/// derivative. Immutable after construction; cloning shares the underlying closures.
#[derive(Clone)]
pub struct ConvexPhi {
    id: String,
    value: Func,
    d_left: Func,
    d_right: Func,
    second: SecondDerivative,
    strict_interval: Option<(f64, f64)>,
}

impl std::fmt::Debug for ConvexPhi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConvexPhi").field("id", &self.id).finish()
    }
}

impl ConvexPhi {
    /// The spec string this function was built from (stable across runs).
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    /// Left derivative on (0, 1]; at 0 returns the right derivative.
    pub fn d_left(&self, t: f64) -> f64 {
        if t <= 0.0 {
            (self.d_right)(0.0)
        } else {
            (self.d_left)(t)
        }
    }

    /// Right derivative on [0, 1); at 1 returns the left derivative.
    pub fn d_right(&self, t: f64) -> f64 {
        if t >= 1.0 {
            (self.d_left)(1.0)
        } else {
            (self.d_right)(t)
        }
    }

    pub fn second_derivative(&self) -> &SecondDerivative {
        &self.second
    }

    /// Open interval on which Φ is declared strictly convex, if any.
    pub fn strict_interval(&self) -> Option<(f64, f64)> {
        self.strict_interval
    }

    /// Φ(t) = t^p for p > 1.
    pub fn pow(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidPhi(format!("pow exponent must exceed 1, got {p}")));
        }
        Ok(Self {
            id: format!("pow:{p}"),
            value: Arc::new(move |t| t.powf(p)),
            d_left: Arc::new(move |t| p * t.powf(p - 1.0)),
            d_right: Arc::new(move |t| p * t.powf(p - 1.0)),
            second: SecondDerivative {
                pieces: vec![Piece {
                    lo: 0.0,
                    hi: 1.0,
                    density: Arc::new(move |t| p * (p - 1.0) * t.powf(p - 2.0)),
                }],
                atoms: vec![],
            },
            strict_interval: Some((0.0, 1.0)),
        })
    }

    /// Φ(t) = t log t (0 at t = 0). The derivative log t + 1 diverges at 0⁺.
    pub fn xlogx() -> Self {
        let d = |t: f64| t.ln() + 1.0;
        Self {
            id: "xlogx".into(),
            value: Arc::new(|t| if t == 0.0 { 0.0 } else { t * t.ln() }),
            d_left: Arc::new(d),
            d_right: Arc::new(d),
            second: SecondDerivative {
                pieces: vec![Piece {
                    lo: 0.0,
                    hi: 1.0,
                    density: Arc::new(|t| 1.0 / t),
                }],
                atoms: vec![],
            },
            strict_interval: Some((0.0, 1.0)),
        }
    }

    /// Φ(t) = max(0, t − T); second derivative is a unit atom at T.
    pub fn hinge(threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::InvalidPhi(format!(
                "hinge threshold must lie in (0,1), got {threshold}"
            )));
        }
        Ok(Self {
            id: format!("hinge:{threshold}"),
            value: Arc::new(move |t| (t - threshold).max(0.0)),
            d_left: Arc::new(move |t| if t <= threshold { 0.0 } else { 1.0 }),
            d_right: Arc::new(move |t| if t < threshold { 0.0 } else { 1.0 }),
            second: SecondDerivative {
                pieces: vec![],
                atoms: vec![Atom {
                    at: threshold,
                    mass: 1.0,
                }],
            },
            strict_interval: None,
        })
    }

    /// Affine Φ(t) = intercept + slope·t (weakly convex; useful as a null case since
    /// G is then constant over states).
    pub fn affine(intercept: f64, slope: f64) -> Self {
        Self {
            id: format!("affine:{intercept},{slope}"),
            value: Arc::new(move |t| intercept + slope * t),
            d_left: Arc::new(move |_| slope),
            d_right: Arc::new(move |_| slope),
            second: SecondDerivative::default(),
            strict_interval: None,
        }
    }

    /// Split at T into (Φ₁, Φ₂): Φ₁ follows Φ up to T and continues with the constant
    /// slope Φ′₋(T); Φ₂ = Φ − Φ₁ vanishes on [0, T]. Both summands are convex.
    pub fn hinge_split(&self, threshold: f64) -> Result<(Self, Self)> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::InvalidPhi(format!(
                "split threshold must lie in (0,1), got {threshold}"
            )));
        }
        let base = self.clone();
        let phi_t = self.value(threshold);
        let slope = self.d_left(threshold);

        let b1 = base.clone();
        let low = Self {
            id: format!("split-low:{threshold},{}", self.id),
            value: Arc::new(move |t| {
                if t <= threshold {
                    b1.value(t)
                } else {
                    phi_t + slope * (t - threshold)
                }
            }),
            d_left: {
                let b = base.clone();
                Arc::new(move |t| if t <= threshold { b.d_left(t) } else { slope })
            },
            d_right: {
                let b = base.clone();
                Arc::new(move |t| if t < threshold { b.d_right(t) } else { slope })
            },
            // The continuation keeps the left slope, so an atom at exactly T stays
            // in the upper part.
            second: self.second.clipped(0.0, threshold, false, false),
            strict_interval: intersect(self.strict_interval, (0.0, threshold)),
        };

        let b2 = base.clone();
        let high = Self {
            id: format!("split-high:{threshold},{}", self.id),
            value: Arc::new(move |t| {
                if t <= threshold {
                    0.0
                } else {
                    b2.value(t) - phi_t - slope * (t - threshold)
                }
            }),
            d_left: {
                let b = base.clone();
                Arc::new(move |t| if t <= threshold { 0.0 } else { b.d_left(t) - slope })
            },
            d_right: {
                let b = base.clone();
                Arc::new(move |t| if t < threshold { 0.0 } else { b.d_right(t) - slope })
            },
            second: self.second.clipped(threshold, 1.0, true, true),
            strict_interval: intersect(self.strict_interval, (threshold, 1.0)),
        };
        Ok((low, high))
    }

    /// Replace Φ outside [a, b] by its tangent continuations: slope Φ′₊(a) below a,
    /// slope Φ′₋(b) above b. Equals Φ on [a, b]; affine outside.
    pub fn affine_continuation(&self, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a < b && b < 1.0) {
            return Err(Error::InvalidPhi(format!(
                "affine continuation window must satisfy 0 < a < b < 1, got [{a}, {b}]"
            )));
        }
        let base = self.clone();
        let (va, vb) = (self.value(a), self.value(b));
        let (sa, sb) = (self.d_right(a), self.d_left(b));

        Ok(Self {
            id: format!("affcont:{a},{b},{}", self.id),
            value: {
                let bs = base.clone();
                Arc::new(move |t| {
                    if t < a {
                        va + sa * (t - a)
                    } else if t > b {
                        vb + sb * (t - b)
                    } else {
                        bs.value(t)
                    }
                })
            },
            d_left: {
                let bs = base.clone();
                Arc::new(move |t| {
                    if t <= a {
                        sa
                    } else if t > b {
                        sb
                    } else {
                        bs.d_left(t)
                    }
                })
            },
            d_right: {
                let bs = base.clone();
                Arc::new(move |t| {
                    if t < a {
                        sa
                    } else if t >= b {
                        sb
                    } else {
                        bs.d_right(t)
                    }
                })
            },
            // Tangent continuations remove any jump at exactly a or b.
            second: self.second.clipped(a, b, false, false),
            strict_interval: intersect(self.strict_interval, (a, b)),
        })
    }

    /// Convolve with a C^∞ bump of width η. Requires Φ affine outside [a, b] (so the
    /// affine tails are reproduced exactly) and η < min(a, 1−b)/2. The result is
    /// smooth, convex, has Φ″ supported in (a−η, b+η) with the total mass
    /// Φ′₋(b) − Φ′₊(a) preserved.
    pub fn mollify(&self, a: f64, b: f64, eta: f64) -> Result<Self> {
        if !(a > 0.0 && a <= b && b < 1.0) {
            return Err(Error::InvalidPhi(format!(
                "mollification window must satisfy 0 < a ≤ b < 1, got [{a}, {b}]"
            )));
        }
        if !(eta > 0.0 && eta < a.min(1.0 - b) / 2.0) {
            return Err(Error::InvalidPhi(format!(
                "mollifier width {eta} must lie in (0, min(a, 1−b)/2)"
            )));
        }
        if let Some((lo, hi)) = self.second.support() {
            if lo < a - 1e-12 || hi > b + 1e-12 {
                return Err(Error::InvalidPhi(format!(
                    "input is not affine outside [{a}, {b}] (curvature spans [{lo}, {hi}])"
                )));
            }
        }

        let kernel = MollifierKernel::get();
        let base = self.clone();

        let conv = move |f: Arc<dyn Fn(&ConvexPhi, f64) -> f64 + Send + Sync>| -> Func {
            let bs = base.clone();
            let k = kernel;
            Arc::new(move |t: f64| {
                let mut acc = 0.0;
                for (x, w) in k.points() {
                    acc += w * f(&bs, t - eta * x);
                }
                acc
            })
        };

        // Affine extension beyond [0,1] (exact: the tails are affine by precondition).
        let ext_value = Arc::new(|p: &ConvexPhi, u: f64| {
            if u < 0.0 {
                p.value(0.0) + p.d_right(0.0) * u
            } else if u > 1.0 {
                p.value(1.0) + p.d_left(1.0) * (u - 1.0)
            } else {
                p.value(u)
            }
        });
        let ext_dl = Arc::new(|p: &ConvexPhi, u: f64| {
            if u < 0.0 {
                p.d_right(0.0)
            } else if u > 1.0 {
                p.d_left(1.0)
            } else {
                p.d_left(u)
            }
        });
        let ext_dr = Arc::new(|p: &ConvexPhi, u: f64| {
            if u < 0.0 {
                p.d_right(0.0)
            } else if u > 1.0 {
                p.d_left(1.0)
            } else {
                p.d_right(u)
            }
        });

        let (lo, hi) = ((a - eta).max(0.0), (b + eta).min(1.0));
        let inner = self.clone();
        let density: Func = Arc::new(move |t: f64| {
            let mut acc = 0.0;
            // Atoms convolve to exact bump profiles.
            for atom in inner.second.atoms() {
                let x = (t - atom.at) / eta;
                acc += atom.mass / eta * kernel.bump(x);
            }
            // Densities convolve through the same fixed grid as the values.
            for piece in inner.second.pieces() {
                for (x, w) in kernel.points() {
                    let u = t - eta * x;
                    if u > piece.lo() && u < piece.hi() {
                        acc += w * piece.density_at(u);
                    }
                }
            }
            acc
        });

        Ok(Self {
            id: format!("mollify:{eta},{}", self.id),
            value: conv(ext_value),
            d_left: conv(ext_dl),
            d_right: conv(ext_dr),
            second: SecondDerivative {
                pieces: vec![Piece { lo, hi, density }],
                atoms: vec![],
            },
            strict_interval: Some((lo, hi)),
        })
    }
}

fn intersect(a: Option<(f64, f64)>, b: (f64, f64)) -> Option<(f64, f64)> {
    let (lo, hi) = a?;
    let (lo, hi) = (lo.max(b.0), hi.min(b.1));
    (lo < hi).then_some((lo, hi))
}

/// The fixed mollifier: ψ(x) = exp(−1/(1−x²)) on (−1,1), sampled on a 1001-point
/// uniform grid with trapezoid weights and normalized to unit discrete mass. ψ is
/// C^∞ with all derivatives vanishing at ±1, so the trapezoid rule is spectrally
/// accurate and the discrete and continuum normalizations agree to machine precision.
#[derive(Clone, Copy)]
struct MollifierKernel {
    grid: &'static [(f64, f64)],
    norm: f64,
}

impl MollifierKernel {
    const POINTS: usize = 1001;

    fn get() -> Self {
        use std::sync::OnceLock;
        static GRID: OnceLock<(Vec<(f64, f64)>, f64)> = OnceLock::new();
        let (grid, norm) = GRID.get_or_init(|| {
            let h = 2.0 / (Self::POINTS - 1) as f64;
            let mut grid = Vec::with_capacity(Self::POINTS);
            let mut norm = 0.0;
            for k in 0..Self::POINTS {
                let x = -1.0 + h * k as f64;
                let w = if k == 0 || k == Self::POINTS - 1 { h / 2.0 } else { h };
                let psi = raw_bump(x);
                norm += w * psi;
                grid.push((x, w * psi));
            }
            (grid, norm)
        });
        Self { grid, norm: *norm }
    }

    /// Normalized sample points: Σ weights = 1.
    fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.iter().map(move |&(x, wp)| (x, wp / self.norm))
    }

    /// Normalized continuum bump ψ(x)/∫ψ.
    fn bump(&self, x: f64) -> f64 {
        raw_bump(x) / self.norm
    }
}

fn raw_bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// Parse a CLI Φ spec: `pow:<p>`, `xlogx`, `hinge:<T>`, `affcont:<a>,<b>,<inner>`,
/// `mollify:<eta>,<inner>` (mollification window inferred from the inner curvature
/// support). Nested specs compose, e.g. `mollify:0.02,affcont:0.25,0.75,pow:2`.
pub fn parse_phi_spec(spec: &str) -> Result<ConvexPhi> {
    let bad = |msg: String| Error::Parse(msg);
    if spec == "xlogx" {
        return Ok(ConvexPhi::xlogx());
    }
    if let Some(rest) = spec.strip_prefix("pow:") {
        let p: f64 = rest
            .parse()
            .map_err(|_| bad(format!("bad pow exponent {rest:?}")))?;
        return ConvexPhi::pow(p);
    }
    if let Some(rest) = spec.strip_prefix("hinge:") {
        let t: f64 = rest
            .parse()
            .map_err(|_| bad(format!("bad hinge threshold {rest:?}")))?;
        return ConvexPhi::hinge(t);
    }
    if let Some(rest) = spec.strip_prefix("affcont:") {
        let mut parts = rest.splitn(3, ',');
        let a: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(format!("affcont needs <a>,<b>,<inner> in {spec:?}")))?;
        let b: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(format!("affcont needs <a>,<b>,<inner> in {spec:?}")))?;
        let inner = parts
            .next()
            .ok_or_else(|| bad(format!("affcont needs an inner spec in {spec:?}")))?;
        return parse_phi_spec(inner)?.affine_continuation(a, b);
    }
    if let Some(rest) = spec.strip_prefix("mollify:") {
        let mut parts = rest.splitn(2, ',');
        let eta: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(format!("mollify needs <eta>,<inner> in {spec:?}")))?;
        let inner = parts
            .next()
            .ok_or_else(|| bad(format!("mollify needs an inner spec in {spec:?}")))?;
        let phi = parse_phi_spec(inner)?;
        let (a, b) = phi
            .second_derivative()
            .support()
            .unwrap_or((0.5, 0.5));
        return phi.mollify(a, b, eta);
    }
    Err(bad(format!(
        "unknown phi spec {spec:?} (expected pow:<p>, xlogx, hinge:<T>, affcont:<a>,<b>,<inner>, mollify:<eta>,<inner>)"
    )))
}

/// Largest convexity defect on a uniform grid: for consecutive triples, the excess of
/// the middle value over the chord midpoint, max(Φ(tᵢ₊₁) − (Φ(tᵢ)+Φ(tᵢ₊₂))/2). This is
/// the difference-quotient monotonicity defect scaled to the value axis, where f64
/// rounding noise (~1e−16) sits far below the 1e−12 pass tolerance; comparing raw
/// quotients at spacing 1e−4 would amplify value rounding to ~4e−12 and flag even
/// exactly affine functions.
pub fn convexity_violation(phi: &ConvexPhi, grid_points: usize) -> f64 {
    let h = 1.0 / (grid_points - 1) as f64;
    let mut worst = 0.0f64;
    let mut v0 = phi.value(0.0);
    let mut v1 = phi.value(h);
    for k in 2..grid_points {
        let v2 = phi.value(k as f64 * h);
        worst = worst.max(v1 - 0.5 * (v0 + v2));
        v0 = v1;
        v1 = v2;
    }
    worst
}
