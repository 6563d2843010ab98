//! The k-Hessian operator restricted to radial functions.
//!
//! For a radial `u(r)` in dimension `N`, the Hessian `D²u` has eigenvalues
//! `u''(r)` (multiplicity 1, the radial direction) and `u'(r)/r`
//! (multiplicity `N−1`, tangential). The k-Hessian `S_k` is the k-th
//! elementary symmetric polynomial of that spectrum, which collapses to the
//! two-term closed form implemented by [`sigma_j`]. Independently, `S_k`
//! admits the divergence form
//!
//! ```text
//! S_k(λ(D²u)) = r^{1−N} · C(N−1, k−1) · [ (r^{N−k}/k) · (u')^k ]'
//! ```
//!
//! implemented by [`k_hessian_radial`]. The two routes agree up to
//! discretization error and are both exposed so each can check the other.
//!
//! Γ_k cone membership ([`gamma_k_status`], [`in_gamma_k`]) is what makes a
//! solution k-convex: every `S_j`, `j ≤ k`, must be strictly positive.

use serde::Serialize;

use crate::picard::{ProblemSpec, RadialGrid};
use crate::{Error, Result};

/// Exact binomial coefficient `C(n, j)` for `0 ≤ j ≤ n ≤ 64`.
///
/// The largest value in range, `C(64, 32) ≈ 1.8e18`, fits in `u64`;
/// intermediate products are carried in `u128` so every step stays exact.
pub fn binomial(n: u32, j: u32) -> Result<u64> {
    if j > n || n > 64 {
        return Err(Error::Invalid(format!(
            "binomial requires 0 <= j <= n <= 64, got n = {n}, j = {j}"
        )));
    }
    // C(n, j) = C(n, n−j); use the smaller upper index.
    let j = j.min(n - j);
    let mut acc: u128 = 1;
    for i in 1..=u128::from(j) {
        // acc · (n − j + i) / i is exact: after the multiplication the
        // value is C(n−j+i, i) · i!, divisible by i.
        acc = acc * (u128::from(n - j) + i) / i;
    }
    Ok(acc as u64)
}

/// Dimension and Hessian order, with the normalization constant
/// `c_binom = C(N−1, k−1)` from the radial divergence form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HessianParams {
    pub dimension: u32,
    pub k: u32,
    pub c_binom: u64,
}

impl HessianParams {
    pub fn new(dimension: u32, k: u32) -> Result<HessianParams> {
        if dimension < 3 {
            return Err(Error::Invalid(format!(
                "dimension must be at least 3, got {dimension}"
            )));
        }
        if k < 1 || k > dimension {
            return Err(Error::Invalid(format!(
                "k must lie in 1..={dimension}, got {k}"
            )));
        }
        Ok(HessianParams {
            dimension,
            k,
            c_binom: binomial(dimension - 1, k - 1)?,
        })
    }
}

/// Eigenvalue spectrum of `D²u` for radial `u`: `lambda_radial = u''` with
/// multiplicity 1 and `lambda_tangential = u'/r` with multiplicity `N−1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialSpectrum {
    pub lambda_radial: f64,
    pub lambda_tangential: f64,
    pub dimension: u32,
}

/// Builds the radial spectrum at radius `r` from `u' = du` and `u'' = d2u`.
///
/// At `r = 0` the tangential eigenvalue is the limit `u'(r)/r → u''(0)`,
/// which requires `du = 0` there.
pub fn radial_eigenvalues(du: f64, d2u: f64, r: f64, dimension: u32) -> Result<RadialSpectrum> {
    if dimension < 3 {
        return Err(Error::Invalid(format!(
            "dimension must be at least 3, got {dimension}"
        )));
    }
    if !(du.is_finite() && d2u.is_finite() && r.is_finite()) || r < 0.0 {
        return Err(Error::Invalid(format!(
            "radial_eigenvalues needs finite inputs with r >= 0, got du = {du}, d2u = {d2u}, r = {r}"
        )));
    }
    let lambda_tangential = if r > 0.0 {
        du / r
    } else {
        if du != 0.0 {
            return Err(Error::Invalid(format!(
                "at r = 0 the derivative must vanish, got du = {du}"
            )));
        }
        d2u
    };
    Ok(RadialSpectrum {
        lambda_radial: d2u,
        lambda_tangential,
        dimension,
    })
}

/// `S_j` of the radial spectrum `(a; b ×(N−1))`:
///
/// ```text
/// S_j = C(N−1, j)·b^j + C(N−1, j−1)·b^{j−1}·a
/// ```
///
/// (subsets avoiding the radial eigenvalue, plus subsets containing it).
pub fn sigma_j(spectrum: &RadialSpectrum, j: u32) -> Result<f64> {
    let n = spectrum.dimension;
    if j < 1 || j > n {
        return Err(Error::Invalid(format!(
            "sigma_j requires 1 <= j <= {n}, got j = {j}"
        )));
    }
    let a = spectrum.lambda_radial;
    let b = spectrum.lambda_tangential;
    let tangential_only = if j < n {
        binomial(n - 1, j)? as f64 * b.powi(j as i32)
    } else {
        0.0
    };
    let with_radial = binomial(n - 1, j - 1)? as f64 * b.powi(j as i32 - 1) * a;
    Ok(tangential_only + with_radial)
}

/// Magnitude scale of `sigma_j` (the same two terms in absolute value),
/// used to make the cone tolerance relative.
fn sigma_j_scale(spectrum: &RadialSpectrum, j: u32) -> Result<f64> {
    let n = spectrum.dimension;
    let a = spectrum.lambda_radial.abs();
    let b = spectrum.lambda_tangential.abs();
    let tangential_only = if j < n {
        binomial(n - 1, j)? as f64 * b.powi(j as i32)
    } else {
        0.0
    };
    Ok(tangential_only + binomial(n - 1, j - 1)? as f64 * b.powi(j as i32 - 1) * a)
}

/// Outcome of testing a spectrum against the Γ_k cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConeStatus {
    /// Every `S_j`, `j ≤ k`, is positive beyond tolerance: strictly inside.
    Interior,
    /// No `S_j` is negative beyond tolerance, but at least one sits inside
    /// the tolerance band around zero.
    Boundary,
    /// Some `S_j` is negative beyond tolerance.
    Outside,
}

/// Relative tolerance for Γ_k membership decisions.
const GAMMA_TOL: f64 = 1e-12;

/// Classifies the spectrum against Γ_k: all of `S_1, …, S_k` are tested
/// with a relative tolerance of `1e-12`.
pub fn gamma_k_status(spectrum: &RadialSpectrum, k: u32) -> Result<ConeStatus> {
    if k < 1 || k > spectrum.dimension {
        return Err(Error::Invalid(format!(
            "gamma_k_status requires 1 <= k <= {}, got k = {k}",
            spectrum.dimension
        )));
    }
    let mut boundary = false;
    for j in 1..=k {
        let s = sigma_j(spectrum, j)?;
        let tol = GAMMA_TOL * (1.0 + sigma_j_scale(spectrum, j)?);
        if s < -tol {
            return Ok(ConeStatus::Outside);
        }
        if s <= tol {
            boundary = true;
        }
    }
    Ok(if boundary {
        ConeStatus::Boundary
    } else {
        ConeStatus::Interior
    })
}

/// True iff the spectrum lies strictly inside the open cone Γ_k
/// (`S_j > 0` for every `j ≤ k`, beyond tolerance).
pub fn in_gamma_k(spectrum: &RadialSpectrum, k: u32) -> Result<bool> {
    Ok(gamma_k_status(spectrum, k)? == ConeStatus::Interior)
}

/// The k-th root for a provably nonnegative radicand.
pub(crate) fn kth_root_nonneg(x: f64, k: u32) -> f64 {
    match k {
        1 => x,
        2 => x.sqrt(),
        _ => x.powf(1.0 / f64::from(k)),
    }
}

/// Sign-preserving k-th root, equal to the true root for `x ≥ 0`; used on
/// quantities that are nonnegative in exact arithmetic but may round below
/// zero.
fn kth_root_signed(x: f64, k: u32) -> f64 {
    if x >= 0.0 {
        kth_root_nonneg(x, k)
    } else {
        -kth_root_nonneg(-x, k)
    }
}

// ---------------------------------------------------------------------------
// Finite differences on non-uniform grids
// ---------------------------------------------------------------------------

/// Width of the finite-difference stencil used by [`differentiate_grid`].
const STENCIL: usize = 5;

/// First-derivative weights at the point `z` for the given stencil nodes
/// (Fornberg's recurrence, specialized to derivative order 1).
fn fd_weights_first(z: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut c0 = vec![0.0f64; n]; // weights for derivative order 0
    let mut c = vec![0.0f64; n]; // weights for derivative order 1
    let mut c1 = 1.0f64;
    let mut c4 = x[0] - z;
    c0[0] = 1.0;
    for i in 1..n {
        let mut c2 = 1.0f64;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                c[i] = c1 * (c0[i - 1] - c5 * c[i - 1]) / c2;
                c0[i] = -c1 * c5 * c0[i - 1] / c2;
            }
            c[j] = (c4 * c[j] - c0[j]) / c3;
            c0[j] = c4 * c0[j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Differentiates grid data with 5-point Fornberg stencils (centered in the
/// interior, one-sided at the ends): 4th-order accurate on smooth data.
pub fn differentiate_grid(nodes: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    if n != values.len() {
        return Err(Error::Invalid(format!(
            "differentiate_grid needs matching lengths, got {n} nodes and {} values",
            values.len()
        )));
    }
    if n < STENCIL {
        return Err(Error::Invalid(format!(
            "differentiate_grid needs at least {STENCIL} nodes, got {n}"
        )));
    }
    for w in nodes.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Invalid(format!(
                "differentiate_grid nodes must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let start = i.saturating_sub(STENCIL / 2).min(n - STENCIL);
        let xs = &nodes[start..start + STENCIL];
        let ws = fd_weights_first(nodes[i], xs);
        let mut d = 0.0;
        for (w, v) in ws.iter().zip(&values[start..start + STENCIL]) {
            d += w * v;
        }
        out.push(d);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// S_k profiles and residuals on grids
// ---------------------------------------------------------------------------

/// Per-node `S_k` through the divergence form
/// `r^{1−N}·C(N−1,k−1)·[(r^{N−k}/k)(u')^k]'`. The flux is written as
/// `r^N·g(r)` with `g = (u'/r)^k/k`, so the derivative expands to
/// `S_k = C(N−1,k−1)·(N·g + r·g')`: the monomial factor is handled
/// analytically and only the smooth, even factor `g` is differentiated by
/// finite differences. This keeps the `r^{1−N}` prefactor from ever
/// amplifying discretization error near the origin, where all formulas use
/// their series limits (`u'/r → u''(0)`, and the `r = 0` node returns
/// `C(N,k)·u''(0)^k`).
///
/// The route never forms eigenvalues, and the numerical derivative acts on
/// different data than in [`sigma_k_profile`] (the profile of `g` rather
/// than of `u'`), so the two serve as genuine cross-checks of one another.
pub fn k_hessian_radial(u: &RadialGrid, params: &HessianParams) -> Result<Vec<f64>> {
    let n_dim = params.dimension;
    let k = params.k;
    let nodes = &u.nodes;
    let d2u = differentiate_grid(nodes, &u.derivatives)?;
    let b: Vec<f64> = nodes
        .iter()
        .zip(&u.derivatives)
        .enumerate()
        .map(|(i, (&r, &du))| if r > 0.0 { du / r } else { d2u[i] })
        .collect();
    let g: Vec<f64> = b
        .iter()
        .map(|&bi| bi.powi(k as i32) / f64::from(k))
        .collect();
    let g_prime = differentiate_grid(nodes, &g)?;
    let c = params.c_binom as f64;
    let mut out = Vec::with_capacity(nodes.len());
    for (i, &r) in nodes.iter().enumerate() {
        if r > 0.0 {
            out.push(c * (f64::from(n_dim) * g[i] + r * g_prime[i]));
        } else {
            out.push(binomial(n_dim, k)? as f64 * b[i].powi(k as i32));
        }
    }
    Ok(out)
}

/// Per-node `S_k` through the eigenvalue route: `u''` by finite differences
/// of the stored `u'`, then `sigma_j(radial_eigenvalues(·), k)`.
pub fn sigma_k_profile(u: &RadialGrid, params: &HessianParams) -> Result<Vec<f64>> {
    let d2u = differentiate_grid(&u.nodes, &u.derivatives)?;
    let mut out = Vec::with_capacity(u.nodes.len());
    for ((&r, &du), &d2) in u.nodes.iter().zip(&u.derivatives).zip(&d2u) {
        let spectrum = radial_eigenvalues(du, d2, r, params.dimension)?;
        out.push(sigma_j(&spectrum, params.k)?);
    }
    Ok(out)
}

/// Per-node cone status along a solution profile (eigenvalue route).
pub fn gamma_k_profile(u: &RadialGrid, params: &HessianParams) -> Result<Vec<ConeStatus>> {
    let d2u = differentiate_grid(&u.nodes, &u.derivatives)?;
    let mut out = Vec::with_capacity(u.nodes.len());
    for ((&r, &du), &d2) in u.nodes.iter().zip(&u.derivatives).zip(&d2u) {
        let spectrum = radial_eigenvalues(du, d2, r, params.dimension)?;
        out.push(gamma_k_status(&spectrum, params.k)?);
    }
    Ok(out)
}

/// Per-node defect `S_k^{1/k}(λ(D²u)) − rhs(i, r_i)` where `rhs` supplies
/// the equation's right-hand side at node `i`. `S_k` comes from the
/// eigenvalue route; its k-th root is taken sign-preservingly so that
/// rounding-level negatives do not poison the profile.
pub fn residual_profile_with<F>(
    u: &RadialGrid,
    params: &HessianParams,
    rhs: F,
) -> Result<Vec<f64>>
where
    F: Fn(usize, f64) -> Result<f64>,
{
    let sk = sigma_k_profile(u, params)?;
    let mut out = Vec::with_capacity(sk.len());
    for (i, &s) in sk.iter().enumerate() {
        out.push(kth_root_signed(s, params.k) - rhs(i, u.nodes[i])?);
    }
    Ok(out)
}

/// Per-node residual `S_k^{1/k}(λ(D²u)) − p(r)·h(u(r))` of the scalar
/// equation.
pub fn residual_profile(u: &RadialGrid, problem: &ProblemSpec) -> Result<Vec<f64>> {
    let params = problem.params()?;
    residual_profile_with(u, &params, |i, r| {
        Ok(problem.p.eval1(r)? * problem.h.eval1(u.values[i])?)
    })
}

/// Sup-norm of [`residual_profile`]: the fixed-point defect of a candidate
/// solution.
pub fn residual(u: &RadialGrid, problem: &ProblemSpec) -> Result<f64> {
    Ok(residual_profile(u, problem)?
        .iter()
        .fold(0.0f64, |m, &x| m.max(x.abs())))
}

// ---------------------------------------------------------------------------
