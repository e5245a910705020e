//! Multi-index bookkeeping and closed-form constants for P_M, the holomorphic
//! polynomials on C^N of degree ≤ M.
//!
//! The monomial basis is e_α = c_α z^α with c_α = √(M!/(α!(M−|α|)!)); coefficient
//! vectors everywhere in this crate follow the graded-lexicographic order produced by
//! [`enumerate_multi_indices`]. The integer constants
//!
//! > A_{M,N,K} = (M−K+1) · C(M+N, K+N−1)
//!
//! normalize both the angular averages c̃_α² = A_{M,N,|α|}/A_{M,N,0} and the
//! closed-form primitive
//!
//! > ∫₀^s σ^{K+N−1}(1+σ)^{−(M+N+1)} dσ
//! >   = (1+s)^{−(M+N)}/A_{M,N,K} · Σ_{j=K+N}^{M+N} C(M+N,j) s^j.
//!
//! Integer work stays in 128-bit arithmetic while M+N ≤ 60 and falls back to
//! log-space floats beyond that.

use crate::error::{Error, Result};

/// Largest M+N for which binomials are computed in integer arithmetic.
const INT_RANGE: u32 = 60;

/// A multi-index α ∈ ℕ^N.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    components: Vec<u32>,
}

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        Self { components }
    }

    /// |α| = Σ α_i.
    pub fn degree(&self) -> u32 {
        self.components.iter().sum()
    }

    pub fn components(&self) -> &[u32] {
        &self.components
    }

    /// Number of variables N.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Base dimension N, maximum degree M, and the canonical ordered basis of P_M.
#[derive(Debug, Clone)]
pub struct Params {
    n: u32,
    m: u32,
    indices: Vec<MultiIndex>,
}

impl Params {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("N must be at least 1".into()));
        }
        if m == 0 {
            return Err(Error::InvalidParams("M must be at least 1".into()));
        }
        if binomial_u128(m as u64 + n as u64, n as u64).is_none() {
            return Err(Error::InvalidParams(format!(
                "dimension C({}, {}) overflows",
                m + n,
                n
            )));
        }
        let indices = enumerate_multi_indices(n, m)?;
        Ok(Self { n, m, indices })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// d = dim P_M = C(M+N, N).
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Basis order: graded-lexicographic, zero index first.
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }
}

/// All α ∈ ℕ^N with |α| ≤ M in graded-lexicographic order (grade first, then
/// lexicographic with the leading component dominant), so position 0 is the zero index.
pub fn enumerate_multi_indices(n: u32, m: u32) -> Result<Vec<MultiIndex>> {
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    let mut out = Vec::new();
    let mut scratch = vec![0u32; n as usize];
    for degree in 0..=m {
        fill_degree(degree, 0, &mut scratch, &mut out);
    }
    Ok(out)
}

/// Emit all completions of `scratch[pos..]` summing to `remaining`, largest lead first.
fn fill_degree(remaining: u32, pos: usize, scratch: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if pos == scratch.len() - 1 {
        scratch[pos] = remaining;
        out.push(MultiIndex::new(scratch.clone()));
        return;
    }
    for lead in (0..=remaining).rev() {
        scratch[pos] = lead;
        fill_degree(remaining - lead, pos + 1, scratch, out);
    }
}

/// C(n, k) in exact integer arithmetic; `None` on overflow or when guards say no.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // C(n, i) = C(n, i-1) * (n - i + 1) / i stays integral at every step.
        acc = acc.checked_mul((n - i + 1) as u128)?;
        acc /= i as u128;
    }
    Some(acc)
}

/// C(n, k) as a float: exact integer path for n ≤ 60, log-space beyond.
pub fn binomial(n: u64, k: u64) -> f64 {
    if n <= INT_RANGE as u64 {
        return binomial_u128(n, k).expect("within integer range") as f64;
    }
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut log_sum = 0.0f64;
    for i in 1..=k {
        log_sum += ((n - i + 1) as f64).ln() - (i as f64).ln();
    }
    log_sum.exp()
}

/// c_α = √(M!/(α!·(M−|α|)!)), the normalization making e_α = c_α z^α a unit vector.
pub fn c_alpha(alpha: &MultiIndex, m: u32) -> Result<f64> {
    let deg = alpha.degree();
    if deg > m {
        return Err(Error::Domain(format!(
            "multi-index degree {deg} exceeds M = {m}"
        )));
    }
    // M!/(α! (M−|α|)!) as a product of binomials: choose α_1 of M, α_2 of the rest, ...
    let mut value = 1.0f64;
    let mut remaining = m as u64;
    for &a in alpha.components() {
        value *= binomial(remaining, a as u64);
        remaining -= a as u64;
    }
    Ok(value.sqrt())
}

/// A_{M,N,K} = (M−K+1)·C(M+N, K+N−1) in exact integers; `None` if out of u128 range.
pub fn a_const_exact(m: u32, n: u32, k: u32) -> Option<u128> {
    let c = binomial_u128((m + n) as u64, (k + n - 1) as u64)?;
    c.checked_mul((m - k + 1) as u128)
}

/// A_{M,N,K} = (M−K+1)·C(M+N, K+N−1).
pub fn a_const(m: u32, n: u32, k: u32) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParams("need N ≥ 1 and M ≥ 1".into()));
    }
    if k > m {
        return Err(Error::Domain(format!("K = {k} exceeds M = {m}")));
    }
    match a_const_exact(m, n, k) {
        Some(v) => Ok(v as f64),
        None => Ok((m - k + 1) as f64 * binomial((m + n) as u64, (k + n - 1) as u64)),
    }
}

/// c̃_α² = (N−1)!·M!/((N+|α|−1)!·(M−|α|)!), the angular average c_α²∫|ω^α|² over S^{2N−1}.
///
/// Depends on α only through |α| and equals A_{M,N,|α|}/A_{M,N,0}.
pub fn c_tilde_sq(alpha: &MultiIndex, m: u32, n: u32) -> Result<f64> {
    c_tilde_sq_by_degree(alpha.degree(), m, n)
}

/// [`c_tilde_sq`] by degree class K = |α|.
pub fn c_tilde_sq_by_degree(k: u32, m: u32, n: u32) -> Result<f64> {
    if k > m {
        return Err(Error::Domain(format!("degree {k} exceeds M = {m}")));
    }
    // (N−1)!M!/((N+K−1)!(M−K)!) = [M!/(M−K)!] / [(N+K−1)!/(N−1)!]
    if (m + n) <= INT_RANGE {
        let mut num: u128 = 1;
        for i in (m - k + 1)..=m {
            num *= i as u128;
        }
        let mut den: u128 = 1;
        for i in n..(n + k) {
            den *= i as u128;
        }
        Ok(num as f64 / den as f64)
    } else {
        let mut log = 0.0f64;
        for i in (m - k + 1)..=m {
            log += (i as f64).ln();
        }
        for i in n..(n + k) {
            log -= (i as f64).ln();
        }
        Ok(log.exp())
    }
}

/// Closed form of ∫₀^s σ^{K+N−1}(1+σ)^{−(M+N+1)} dσ; `s = +∞` is accepted and returns
/// the limit 1/A_{M,N,K}.
pub fn incomplete_beta_primitive(m: u32, n: u32, k: u32, s: f64) -> Result<f64> {
    if k > m {
        return Err(Error::Domain(format!("K = {k} exceeds M = {m}")));
    }
    if s < 0.0 || s.is_nan() {
        return Err(Error::Domain(format!("s = {s} must be nonnegative")));
    }
    let a = a_const(m, n, k)?;
    if s.is_infinite() || s > 1e60 {
        // (1+s)^{−(M+N)} Σ_j C(M+N,j) s^j → C(M+N, M+N) = 1 as s → ∞.
        return Ok(1.0 / a);
    }
    let mn = m + n;
    let mut sum = 0.0f64;
    let mut s_pow = s.powi((k + n) as i32);
    for j in (k + n)..=mn {
        sum += binomial(mn as u64, j as u64) * s_pow;
        s_pow *= s;
    }
    Ok((1.0 + s).powi(-(mn as i32)) / a * sum)
}
