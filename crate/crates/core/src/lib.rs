//! Numerical laboratory for Wehrl-type entropy of symmetric SU(N+1) coherent states,
//! formulated on holomorphic polynomials.
//!
//! The objects, in the order the modules build them:
//!
//! * [`combinatorics`] — the space P_M of holomorphic polynomials on C^N of degree ≤ M
//!   with orthonormal monomial basis e_α = c_α z^α, multi-index bookkeeping, the
//!   integer constants A_{M,N,K}, the squared kernel-expansion coefficients c̃_α², and
//!   a closed-form incomplete-beta primitive.
//! * [`phi`] — convex integrands Φ on [0,1] with one-sided derivatives and a second
//!   derivative represented as density pieces plus point atoms, so kinked Φ (hinges)
//!   integrate exactly; splitting, affine continuation and mollification operators.
//! * [`state_space`] — unit coefficient vectors X ∈ S^{2d−1} (states), coherent states
//!   k_w, Husimi functions u(z) = |F(z)|²/(1+|z|²)^M, tangent vectors at the base
//!   coherent point X₀, and a JSON state-file format.
//! * [`measure`] — the invariant measure dν = c_N (1+|z|²)^{−N−1} dA, exact sampling,
//!   the distribution function μ₀, and the entropy functional G(X) = ∫ Φ(u) dν with
//!   Monte Carlo and (N = 1) tensor-product quadratures, plus the coherent value sup G.
//! * [`geometry`] — the global Husimi supremum T via multistart projected gradient
//!   ascent over homogeneous coordinates on the unit sphere of C^{N+1}, and the
//!   chord/geodesic distance to the coherent family V.
//! * [`hessian`] — the diagonal coefficients b_α of the second differential of G at
//!   X₀, a finite-difference cross-check along geodesics, and the τ-space integrand
//!   h̃(τ, Y) tying the two together.
//! * [`stability`] — entropy deficits sup G − G(X), the far-field lower bound from the
//!   convex split of Φ, and randomized deficit/distance scans.
//! * [`verify`] — named invariant suites for the command-line `verify` subcommand.
//!
//! Everything randomized takes an explicit seed and is deterministic for a fixed seed,
//! independent of thread count.

pub mod combinatorics;
pub mod error;
pub mod geometry;
pub mod hessian;
pub mod measure;
pub mod phi;
pub mod quad;
pub mod stability;
pub mod state_space;
pub mod verify;

pub use error::{Error, Result};
