//! Successive approximation for the radial k-Hessian fixed point.
//!
//! The scalar problem `S_k^{1/k}(λ(D²u)) = p(|x|)·h(u)` with `u(0) = a`,
//! `u'(0) = 0` integrates to
//!
//! ```text
//! w(r) = a + ∫₀^r ( (k / t^{N−k}) ∫₀^t (s^{N−1}/C) p^k(s) h^k(w(s)) ds )^{1/k} dt
//! ```
//!
//! with `C = C(N−1, k−1)`. Iterating this operator from `w⁰ ≡ a` produces a
//! node-wise non-decreasing sequence; its limit (when the sequence
//! stabilizes) is a solution on `[0, r_max]`. The solver tracks the
//! iterates, decides between convergence / unbounded growth / iteration
//! budget, and runs the proof-derived diagnostics (monotonicity, the
//! a-priori bound, solution comparison).
//!
//! Systems couple two copies of the scheme through `f(u, v)` and `g(u, v)`
//! with both components updated from the previous pair (Jacobi-style), which
//! preserves the monotone induction.

use serde::Serialize;

use crate::conditions;
use crate::expr::{sample_monotone, FunctionSpec, MonotoneVerdict};
use crate::quad;
use crate::radial::{self, ConeStatus, HessianParams};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Problem descriptions
// ---------------------------------------------------------------------------

/// A scalar problem instance plus its numerical controls.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    /// Ambient dimension `N ≥ 3`.
    pub dimension: u32,
    /// Hessian order `k` in `1..=N`.
    pub k: u32,
    /// Center value `a = u(0) ≥ 0`.
    pub initial_value: f64,
    /// Radial weight `p(t)`, positive on `[0, r_max]`.
    pub p: FunctionSpec,
    /// Nonlinearity `h(u)` with `h(0) = 0`, `h ≥ 0`.
    pub h: FunctionSpec,
    /// Truncation radius of the computational domain.
    pub r_max: f64,
    /// Number of grid nodes (at least 64).
    pub grid_points: usize,
    /// Sup-norm convergence tolerance for the iteration.
    pub tol: f64,
    /// Iteration budget.
    pub max_iter: usize,
    /// End-value ceiling above which the iteration counts as growing.
    pub growth_ceiling: f64,
}

/// A two-component system instance plus its numerical controls.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub dimension: u32,
    pub k: u32,
    pub initial_value_u: f64,
    pub initial_value_v: f64,
    /// Weight multiplying `f` in the `u`-equation.
    pub p: FunctionSpec,
    /// Weight multiplying `g` in the `v`-equation.
    pub q: FunctionSpec,
    /// Nonlinearity of the `u`-equation, `f(u, v)`.
    pub f: FunctionSpec,
    /// Nonlinearity of the `v`-equation, `g(u, v)`.
    pub g: FunctionSpec,
    pub r_max: f64,
    pub grid_points: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub growth_ceiling: f64,
}

/// Tolerance for "vanishes at the origin" checks on nonlinearities.
const ORIGIN_TOL: f64 = 1e-12;

fn validate_controls(
    r_max: f64,
    grid_points: usize,
    tol: f64,
    max_iter: usize,
    growth_ceiling: f64,
) -> Result<()> {
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::Invalid(format!(
            "r_max must be positive and finite, got {r_max}"
        )));
    }
    if grid_points < 64 {
        return Err(Error::Invalid(format!(
            "grid_points must be at least 64, got {grid_points}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Invalid(format!("tol must be positive, got {tol}")));
    }
    if max_iter < 1 {
        return Err(Error::Invalid("max_iter must be at least 1".into()));
    }
    if !(growth_ceiling.is_finite() && growth_ceiling > 0.0) {
        return Err(Error::Invalid(format!(
            "growth_ceiling must be positive and finite, got {growth_ceiling}"
        )));
    }
    Ok(())
}

/// Checks that a weight is strictly positive on `[0, r_max]` by sampling.
fn validate_weight(p: &FunctionSpec, name: &str, r_max: f64) -> Result<()> {
    if p.arity() != 1 {
        return Err(Error::Invalid(format!("{name} must have arity 1")));
    }
    for i in 0..=64 {
        let r = r_max * i as f64 / 64.0;
        let v = p.eval1(r)?;
        if !(v > 0.0) {
            return Err(Error::Invalid(format!(
                "{name} must be positive on [0, r_max]: {name}({r}) = {v}"
            )));
        }
    }
    Ok(())
}

impl ProblemSpec {
    /// The derived Hessian parameters (validates `dimension` and `k`).
    pub fn params(&self) -> Result<HessianParams> {
        HessianParams::new(self.dimension, self.k)
    }

    /// Validates the spec: parameter ranges, positive weight, and the
    /// structural part of the nonlinearity condition (`h(0) = 0`, `h ≥ 0`
    /// on samples). Monotonicity and strict positivity are *not* enforced
    /// here — they are condition verdicts, not well-formedness; the solver
    /// accepts nonlinearities that fail them.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        validate_controls(
            self.r_max,
            self.grid_points,
            self.tol,
            self.max_iter,
            self.growth_ceiling,
        )?;
        if !(self.initial_value.is_finite() && self.initial_value >= 0.0) {
            return Err(Error::Invalid(format!(
                "initial_value must be nonnegative, got {}",
                self.initial_value
            )));
        }
        validate_weight(&self.p, "weight p", self.r_max)?;
        if self.h.arity() != 1 {
            return Err(Error::Invalid("nonlinearity h must have arity 1".into()));
        }
        let h0 = self.h.eval1(0.0)?;
        if h0.abs() > ORIGIN_TOL {
            return Err(Error::Invalid(format!(
                "nonlinearity h must vanish at 0, got h(0) = {h0}"
            )));
        }
        for i in 0..=64 {
            let s = 100.0 * i as f64 / 64.0;
            let v = self.h.eval1(s)?;
            if v < 0.0 {
                return Err(Error::Invalid(format!(
                    "nonlinearity h must be nonnegative, got h({s}) = {v}"
                )));
            }
        }
        Ok(())
    }
}

impl SystemSpec {
    pub fn params(&self) -> Result<HessianParams> {
        HessianParams::new(self.dimension, self.k)
    }

    /// Validates the spec, including the sampled structural conditions on
    /// `f` and `g`: vanishing at the origin, nonnegative everywhere
    /// sampled, strictly positive when both arguments are positive, and
    /// non-decreasing in each variable.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        validate_controls(
            self.r_max,
            self.grid_points,
            self.tol,
            self.max_iter,
            self.growth_ceiling,
        )?;
        for (a, name) in [
            (self.initial_value_u, "initial_value (u)"),
            (self.initial_value_v, "initial_value_v"),
        ] {
            if !(a.is_finite() && a >= 0.0) {
                return Err(Error::Invalid(format!(
                    "{name} must be nonnegative, got {a}"
                )));
            }
        }
        validate_weight(&self.p, "weight p", self.r_max)?;
        validate_weight(&self.q, "weight q", self.r_max)?;
        for (func, name) in [(&self.f, "nonlinearity f"), (&self.g, "nonlinearity g")] {
            if func.arity() != 2 {
                return Err(Error::Invalid(format!("{name} must have arity 2")));
            }
            let at_origin = func.eval2(0.0, 0.0)?;
            if at_origin.abs() > ORIGIN_TOL {
                return Err(Error::Invalid(format!(
                    "{name} must vanish at (0, 0), got {at_origin}"
                )));
            }
            let samples = [0.0, 0.001, 0.1, 0.5, 1.0, 5.0, 25.0, 100.0];
            for &x in &samples {
                for &y in &samples {
                    let v = func.eval2(x, y)?;
                    if v < 0.0 {
                        return Err(Error::Invalid(format!(
                            "{name} must be nonnegative, got {name}({x}, {y}) = {v}"
                        )));
                    }
                    if x > 0.0 && y > 0.0 && v == 0.0 {
                        return Err(Error::Invalid(format!(
                            "{name} must be positive for positive arguments, \
                             got {name}({x}, {y}) = 0"
                        )));
                    }
                }
            }
            for var in 0..2usize {
                for fixed in [0.0, 1.0, 10.0] {
                    match sample_monotone(func, var, Some(fixed), 0.0, 100.0, 128)? {
                        MonotoneVerdict::Violated { x_lo, f_lo, x_hi, f_hi } => {
                            return Err(Error::Invalid(format!(
                                "{name} must be non-decreasing in argument {var}: \
                                 value drops from {f_lo} at {x_lo} to {f_hi} at {x_hi} \
                                 (other argument fixed at {fixed})"
                            )));
                        }
                        // Gray-zone wobble is tolerated at validation time.
                        MonotoneVerdict::NonDecreasing | MonotoneVerdict::Inconclusive => {}
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

/// A radial profile sampled on a fixed node set: values and first
/// derivatives per node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

impl RadialGrid {
    /// The constant profile `w ≡ value` on `nodes`.
    pub fn constant(nodes: Vec<f64>, value: f64) -> RadialGrid {
        let n = nodes.len();
        RadialGrid {
            nodes,
            values: vec![value; n],
            derivatives: vec![0.0; n],
        }
    }

    /// Piecewise-linear evaluation at `r`, clamped to the grid range.
    pub fn value_at(&self, r: f64) -> f64 {
        let n = self.nodes.len();
        if r <= self.nodes[0] {
            return self.values[0];
        }
        if r >= self.nodes[n - 1] {
            return self.values[n - 1];
        }
        let j = self.nodes.partition_point(|&x| x <= r) - 1;
        let (t0, t1) = (self.nodes[j], self.nodes[j + 1]);
        let frac = (r - t0) / (t1 - t0);
        self.values[j] + frac * (self.values[j + 1] - self.values[j])
    }

    /// Linear interpolation inside panel `i` (no search; `s` must lie in
    /// `[nodes[i], nodes[i+1]]`).
    fn interp_panel(&self, i: usize, s: f64) -> f64 {
        let t0 = self.nodes[i];
        let t1 = self.nodes[i + 1];
        let frac = (s - t0) / (t1 - t0);
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Sup-norm distance of the value profiles (grids must share nodes).
    pub fn sup_delta(&self, other: &RadialGrid) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Value at the outermost node.
    pub fn end_value(&self) -> f64 {
        *self.values.last().expect("nonempty grid")
    }

    fn sup_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
    }
}

/// Builds the solver grid on `[0, r_max]`: node spacing shrinks
/// geometrically toward `r_max` (ratio ~1.02 per step, capped so the
/// largest spacing is at most 8× the smallest), concentrating resolution
/// where growth happens.
pub fn build_grid(r_max: f64, grid_points: usize) -> Result<Vec<f64>> {
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::Invalid(format!(
            "r_max must be positive and finite, got {r_max}"
        )));
    }
    if grid_points < 8 {
        return Err(Error::Invalid(format!(
            "grid needs at least 8 points, got {grid_points}"
        )));
    }
    let m = grid_points - 1;
    let rho = 1.02f64.min(8f64.powf(1.0 / (grid_points as f64 - 2.0)));
    let inv = 1.0 / rho;
    let h0 = r_max * (1.0 - inv) / (1.0 - inv.powi(m as i32));
    let mut nodes = Vec::with_capacity(grid_points);
    nodes.push(0.0);
    let mut h = h0;
    let mut acc = 0.0;
    for _ in 0..m {
        acc += h;
        h *= inv;
        nodes.push(acc);
    }
    *nodes.last_mut().expect("nonempty") = r_max;
    Ok(nodes)
}

// ---------------------------------------------------------------------------
// The integral operator
// ---------------------------------------------------------------------------

/// Gauss-7 abscissae on `[-1, 1]` in ascending order (the embedded rule of
/// the 15-point Kronrod set).
const G7_X: [f64; 7] = [
    -quad::XGK[1],
    -quad::XGK[3],
    -quad::XGK[5],
    0.0,
    quad::XGK[5],
    quad::XGK[3],
    quad::XGK[1],
];
/// Gauss-7 weights matching [`G7_X`].
const G7_W: [f64; 7] = [
    quad::WG[0],
    quad::WG[1],
    quad::WG[2],
    quad::WG[3],
    quad::WG[2],
    quad::WG[1],
    quad::WG[0],
];

/// Outer quadrature nodes per panel (15-point Kronrod, ascending).
const OUTER: usize = 15;
/// Inner sub-segments per panel: the gaps between consecutive outer nodes
/// plus the two panel-edge slivers.
const SEGS: usize = OUTER + 1;

/// Precomputed quadrature plumbing for one weight on one grid.
///
/// A step evaluates `w_next(r) = a + ∫₀^r (k·I(t)·t^{k−N})^{1/k} dt` where
/// `I(t) = ∫₀^t (s^{N−1}/C)·p^k(s)·rhs(s) ds` and `rhs` is the (iterate-
/// dependent) k-th power of the nonlinearity. The outer integral uses a
/// 15-point Kronrod rule per grid panel; the running inner integral `I` is
/// advanced across the gaps between consecutive outer nodes with a 7-point
/// Gauss rule each, so `I(t)` is available exactly at the outer nodes.
/// Everything independent of the iterate — abscissae, weights, the factors
/// `s^{N−1} p^k(s)/C`, and the powers `t^{k−N}` — is precomputed once per
/// solve.
struct PicardOperator {
    params: HessianParams,
    initial_value: f64,
    nodes: Vec<f64>,
    /// Per panel × outer node: Kronrod weight × panel half-length.
    outer_w: Vec<f64>,
    /// Per panel × outer node: `t^{k−N}` at the outer node.
    outer_invpow: Vec<f64>,
    /// Per panel: `t^{k−N}` at the panel's right edge (a grid node).
    end_invpow: Vec<f64>,
    /// Per panel × sub-segment × Gauss point: abscissa `s`.
    inner_s: Vec<f64>,
    /// Per panel × sub-segment × Gauss point: combined weight
    /// `gauss_w · sub_half_length · s^{N−1} · p^k(s) / C`.
    inner_cw: Vec<f64>,
}

impl PicardOperator {
    fn new(
        params: HessianParams,
        p: &FunctionSpec,
        initial_value: f64,
        nodes: &[f64],
    ) -> Result<PicardOperator> {
        if nodes.len() < 2 {
            return Err(Error::Invalid("grid needs at least 2 nodes".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::Invalid(format!(
                "grid must start at r = 0, got {}",
                nodes[0]
            )));
        }
        for w in nodes.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Invalid(format!(
                    "grid nodes must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let panels = nodes.len() - 1;
        let inv_exp = params.k as i32 - params.dimension as i32;
        let nm1 = (params.dimension - 1) as i32;
        let c = params.c_binom as f64;
        let k = params.k as i32;

        let mut outer_w = Vec::with_capacity(panels * OUTER);
        let mut outer_invpow = Vec::with_capacity(panels * OUTER);
        let mut end_invpow = Vec::with_capacity(panels);
        let mut inner_s = Vec::with_capacity(panels * SEGS * 7);
        let mut inner_cw = Vec::with_capacity(panels * SEGS * 7);

        for i in 0..panels {
            let (lo, hi) = (nodes[i], nodes[i + 1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (lo + hi);
            // Outer Kronrod nodes in ascending order; XGK holds the
            // positive abscissae in decreasing order with the center last.
            let mut bounds = [0.0f64; SEGS + 1];
            bounds[0] = lo;
            bounds[SEGS] = hi;
            for j in 0..OUTER {
                let (idx, sign) = if j < 7 { (j, -1.0) } else { (14 - j, 1.0) };
                let t = mid + sign * half * quad::XGK[idx];
                bounds[j + 1] = t;
                outer_w.push(quad::WGK[idx] * half);
                outer_invpow.push(t.powi(inv_exp));
            }
            end_invpow.push(hi.powi(inv_exp));
            for seg in 0..SEGS {
                let (a, b) = (bounds[seg], bounds[seg + 1]);
                let shalf = 0.5 * (b - a);
                let smid = 0.5 * (a + b);
                for m in 0..7 {
                    let s = smid + shalf * G7_X[m];
                    let pv = p.eval1(s)?;
                    if !(pv.is_finite() && pv > 0.0) {
                        return Err(Error::Invalid(format!(
                            "weight must be positive on the grid, got p({s}) = {pv}"
                        )));
                    }
                    inner_s.push(s);
                    inner_cw.push(G7_W[m] * shalf * s.powi(nm1) * pv.powi(k) / c);
                }
            }
        }
        Ok(PicardOperator {
            params,
            initial_value,
            nodes: nodes.to_vec(),
            outer_w,
            outer_invpow,
            end_invpow,
            inner_s,
            inner_cw,
        })
    }

    /// Applies the operator with `rhs(panel, s)` supplying the k-th power
    /// of the nonlinearity along the previous iterate. `rhs` must be
    /// nonnegative and finite; anything else aborts the step.
    fn step_with<F>(&self, mut rhs: F) -> Result<RadialGrid>
    where
        F: FnMut(usize, f64) -> Result<f64>,
    {
        let n = self.nodes.len();
        let k = self.params.k;
        let k_f = f64::from(k);
        let mut values = Vec::with_capacity(n);
        let mut derivatives = Vec::with_capacity(n);
        values.push(self.initial_value);
        derivatives.push(0.0);
        // Running inner integral I(t) = ∫₀^t (s^{N−1}/C) p^k rhs ds.
        let mut inner = 0.0f64;
        for i in 0..n - 1 {
            let mut acc = 0.0f64;
            for seg in 0..SEGS {
                let base = (i * SEGS + seg) * 7;
                for m in 0..7 {
                    let s = self.inner_s[base + m];
                    let v = rhs(i, s)?;
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(Error::Numeric(format!(
                            "nonlinearity produced an inadmissible value {v} at r = {s}"
                        )));
                    }
                    inner += self.inner_cw[base + m] * v;
                }
                if seg < OUTER {
                    let oj = i * OUTER + seg;
                    let g = radial::kth_root_nonneg(k_f * inner * self.outer_invpow[oj], k);
                    acc += self.outer_w[oj] * g;
                }
            }
            let value = values[i] + acc;
            if !value.is_finite() {
                return Err(Error::Numeric(format!(
                    "iterate overflowed near r = {}",
                    self.nodes[i + 1]
                )));
            }
            values.push(value);
            derivatives.push(radial::kth_root_nonneg(
                k_f * inner * self.end_invpow[i],
                k,
            ));
        }
        Ok(RadialGrid {
            nodes: self.nodes.clone(),
            values,
            derivatives,
        })
    }
}

/// The scalar right-hand side `h(ŵ(s))^k` along the previous iterate
/// (piecewise-linear between nodes), with the sign guard on `h`.
fn scalar_rhs<'a>(
    w_prev: &'a RadialGrid,
    h: &'a FunctionSpec,
    k: i32,
) -> impl FnMut(usize, f64) -> Result<f64> + 'a {
    move |panel, s| {
        let w = w_prev.interp_panel(panel, s);
        let hv = h.eval1(w)?;
        if hv < 0.0 {
            return Err(Error::Numeric(format!(
                "nonlinearity h went negative along the iterate: h({w}) = {hv}"
            )));
        }
        Ok(hv.powi(k))
    }
}

/// One application of the integral operator to `w_prev` for `problem`.
///
/// The result lives on the same nodes, starts at `a` with zero derivative,
/// and is non-decreasing with nonnegative derivative values (the
/// derivative is the k-th root of the accumulated inner integral, which
/// never goes negative).
pub fn picard_step(w_prev: &RadialGrid, problem: &ProblemSpec) -> Result<RadialGrid> {
    problem.validate()?;
    let params = problem.params()?;
    if w_prev.values.len() != w_prev.nodes.len()
        || w_prev.derivatives.len() != w_prev.nodes.len()
    {
        return Err(Error::Invalid(
            "w_prev value/derivative lengths must match its nodes".into(),
        ));
    }
    let op = PicardOperator::new(params, &problem.p, problem.initial_value, &w_prev.nodes)?;
    op.step_with(scalar_rhs(w_prev, &problem.h, problem.k as i32))
}

// ---------------------------------------------------------------------------
// Solve loop
// ---------------------------------------------------------------------------

/// How an iteration run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    /// Sup-norm deltas fell below tolerance (twice in a row, or exactly 0).
    Converged,
    /// The end value crossed the growth ceiling, kept growing while the
    /// deltas stopped shrinking, or overflowed outright.
    GrowthDetected,
    /// The iteration budget ran out first.
    MaxIterations,
}

/// Boundedness verdict attached to a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Bounded,
    LargeCandidate,
    Inconclusive,
}

/// Everything recorded along one iteration run.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    /// `w⁰, w¹, …` including the starting constant.
    pub iterates: Vec<RadialGrid>,
    /// `‖w^m − w^{m−1}‖_∞` for `m = 1, …`.
    pub sup_deltas: Vec<f64>,
    pub status: SolveStatus,
}

/// Solver outcome: the final profile plus diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub solution: RadialGrid,
    pub status: SolveStatus,
    /// Number of operator applications performed.
    pub iterations: usize,
    /// Per-iteration sup-norm deltas (the trace summary).
    pub sup_deltas: Vec<f64>,
    /// Largest solution value on the grid.
    pub sup_value: f64,
    /// Sup-norm fixed-point defect; only computed for converged runs.
    pub residual: Option<f64>,
    /// Whether the converged profile sits in Γ_k: strictly interior at
    /// every node with `r > 0` and positive derivative, and not outside
    /// anywhere else. `false` for non-converged runs.
    pub gamma_k_certified: bool,
    pub classification: Classification,
    /// Human-readable caveats (growth heuristics, classification context).
    pub notes: Vec<String>,
}

/// Deltas within this relative slack of the previous one count as
/// "not shrinking" for the growth heuristic.
const GROWTH_DELTA_SLACK: f64 = 1e-12;
/// Consecutive non-shrinking deltas (with increasing end values) that
/// trigger the growth verdict.
const GROWTH_STREAK: usize = 5;

/// True when the last [`GROWTH_STREAK`] deltas are non-shrinking and the
/// end values keep strictly increasing: the signature of a genuinely
/// growing iteration rather than slow convergence.
fn growth_streak(sup_deltas: &[f64], ends: &[f64]) -> bool {
    let n = sup_deltas.len();
    if n < GROWTH_STREAK {
        return false;
    }
    let deltas = &sup_deltas[n - GROWTH_STREAK..];
    if !deltas
        .windows(2)
        .all(|w| w[1] >= w[0] * (1.0 - GROWTH_DELTA_SLACK))
    {
        return false;
    }
    let tail = &ends[ends.len() - GROWTH_STREAK..];
    tail.windows(2).all(|w| w[1] > w[0])
}

/// True when end values were strictly increasing over the last recorded
/// steps — used to read an overflow inside a step as growth.
fn overflow_is_growth(ends: &[f64]) -> bool {
    ends.len() >= 3 && ends[ends.len() - 3..].windows(2).all(|w| w[1] > w[0])
}

struct LoopOutcome {
    status: SolveStatus,
    notes: Vec<String>,
}

/// The shared trichotomy loop over one or two coupled iterate sequences.
/// `step` maps the previous pair to the next pair (the second slot stays
/// `None` throughout scalar runs).
fn run_iteration<S>(
    tol: f64,
    max_iter: usize,
    growth_ceiling: f64,
    iterates: &mut Vec<RadialGrid>,
    mut iterates_second: Option<&mut Vec<RadialGrid>>,
    sup_deltas: &mut Vec<f64>,
    mut step: S,
) -> Result<LoopOutcome>
where
    S: FnMut(&RadialGrid, Option<&RadialGrid>) -> Result<(RadialGrid, Option<RadialGrid>)>,
{
    let mut notes = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let initial_end = match iterates_second.as_deref() {
        Some(sec) => iterates[0].end_value().max(sec[0].end_value()),
        None => iterates[0].end_value(),
    };
    let mut ends: Vec<f64> = vec![initial_end];
    for m in 1..=max_iter {
        let (next, next_second) = {
            let prev = iterates.last().expect("nonempty");
            let prev_second = iterates_second
                .as_deref()
                .map(|sec| sec.last().expect("nonempty"));
            match step(prev, prev_second) {
                Ok(pair) => pair,
                Err(Error::Numeric(msg)) => {
                    if overflow_is_growth(&ends) {
                        status = SolveStatus::GrowthDetected;
                        notes.push(format!(
                            "iteration {m} failed numerically ({msg}) while end values \
                             were strictly increasing; treated as unbounded growth"
                        ));
                        break;
                    }
                    return Err(Error::Numeric(msg));
                }
                Err(e) => return Err(e),
            }
        };
        let mut delta = next.sup_delta(iterates.last().expect("nonempty"));
        let mut end = next.end_value();
        if let (Some(ns), Some(sec)) = (&next_second, iterates_second.as_deref()) {
            delta = delta.max(ns.sup_delta(sec.last().expect("nonempty")));
            end = end.max(ns.end_value());
        }
        sup_deltas.push(delta);
        ends.push(end);
        iterates.push(next);
        if let (Some(sec), Some(ns)) = (iterates_second.as_deref_mut(), next_second) {
            sec.push(ns);
        }
        if delta == 0.0 {
            status = SolveStatus::Converged;
            break;
        }
        let len = sup_deltas.len();
        if len >= 2 && sup_deltas[len - 1] < tol && sup_deltas[len - 2] < tol {
            status = SolveStatus::Converged;
            break;
        }
        if end > growth_ceiling {
            status = SolveStatus::GrowthDetected;
            notes.push(format!(
                "end value {end} crossed the growth ceiling {growth_ceiling} at iteration {m}"
            ));
            break;
        }
        if growth_streak(sup_deltas, &ends) {
            status = SolveStatus::GrowthDetected;
            notes.push(format!(
                "sup-norm deltas stopped shrinking for {GROWTH_STREAK} consecutive \
                 iterations while the end value kept increasing (iteration {m})"
            ));
            break;
        }
    }
    if status == SolveStatus::MaxIterations {
        notes.push(format!(
            "iteration budget of {max_iter} exhausted before convergence or growth"
        ));
    }
    Ok(LoopOutcome { status, notes })
}

/// Γ_k certification of a profile: strictly interior wherever the profile
/// is genuinely increasing, and never outside the closed cone.
fn certify_gamma(solution: &RadialGrid, params: &HessianParams) -> Result<bool> {
    let profile = radial::gamma_k_profile(solution, params)?;
    Ok(solution
        .nodes
        .iter()
        .zip(&solution.derivatives)
        .zip(&profile)
        .all(|((&r, &du), &status)| {
            if r > 0.0 && du > 0.0 {
                status == ConeStatus::Interior
            } else {
                status != ConeStatus::Outside
            }
        }))
}

/// Has the iteration landed on the trivial fixed point `w ≡ a`?
fn is_trivial(solution: &RadialGrid) -> bool {
    solution.derivatives.iter().all(|&d| d == 0.0)
}

/// Classification of a converged run, with final authority delegated to
/// the weight-largeness condition: convergence on a truncated domain says
/// nothing about `r → ∞` by itself.
fn classify_converged(
    verdict: conditions::Verdict,
    trivial: bool,
    notes: &mut Vec<String>,
) -> Classification {
    if trivial {
        notes.push(
            "solution is the trivial fixed point (identically the initial value); \
             largeness statements concern nontrivial solutions"
                .into(),
        );
        return Classification::Bounded;
    }
    match verdict {
        conditions::Verdict::Holds => {
            notes.push(
                "converged on the truncated domain, but the weight-largeness \
                 condition holds: entire solutions of these data are large"
                    .into(),
            );
            Classification::LargeCandidate
        }
        conditions::Verdict::Fails => Classification::Bounded,
        conditions::Verdict::Inconclusive => Classification::Inconclusive,
    }
}

/// Runs the scalar iteration and returns the report plus the full trace.
pub fn solve_scalar_traced(problem: &ProblemSpec) -> Result<(SolveReport, IterationTrace)> {
    problem.validate()?;
    let params = problem.params()?;
    let nodes = build_grid(problem.r_max, problem.grid_points)?;
    let op = PicardOperator::new(params, &problem.p, problem.initial_value, &nodes)?;
    let mut iterates = vec![RadialGrid::constant(nodes, problem.initial_value)];
    let mut sup_deltas = Vec::new();
    let k = problem.k as i32;
    let outcome = run_iteration(
        problem.tol,
        problem.max_iter,
        problem.growth_ceiling,
        &mut iterates,
        None,
        &mut sup_deltas,
        |prev, _| Ok((op.step_with(scalar_rhs(prev, &problem.h, k))?, None)),
    )?;
    let mut notes = outcome.notes;
    let status = outcome.status;
    let solution = iterates.last().expect("nonempty").clone();
    let sup_value = solution.sup_value();

    let (residual, gamma_k_certified, classification) = match status {
        SolveStatus::Converged => {
            let res = radial::residual(&solution, problem)?;
            let gamma = certify_gamma(&solution, &params)?;
            let eq12 = conditions::check_weight_largeness_scalar(
                &problem.p,
                problem.k,
                problem.dimension,
            )?;
            let class = classify_converged(eq12.verdict, is_trivial(&solution), &mut notes);
            (Some(res), gamma, class)
        }
        SolveStatus::GrowthDetected => {
            notes.push(
                "growth on the truncated domain is a heuristic; largeness on [0, ∞) \
                 is governed by the weight-largeness condition"
                    .into(),
            );
            (None, false, Classification::LargeCandidate)
        }
        SolveStatus::MaxIterations => (None, false, Classification::Inconclusive),
    };

    let report = SolveReport {
        solution,
        status,
        iterations: sup_deltas.len(),
        sup_deltas: sup_deltas.clone(),
        sup_value,
        residual,
        gamma_k_certified,
        classification,
        notes,
    };
    let trace = IterationTrace {
        iterates,
        sup_deltas,
        status,
    };
    Ok((report, trace))
}

/// Runs the scalar iteration to a [`SolveReport`].
pub fn solve_scalar(problem: &ProblemSpec) -> Result<SolveReport> {
    solve_scalar_traced(problem).map(|(report, _)| report)
}

/// Sup-norm of a residual profile.
fn sup_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Runs the coupled system iteration and returns both reports with their
/// traces.
pub fn solve_system_traced(
    system: &SystemSpec,
) -> Result<(SolveReport, SolveReport, IterationTrace, IterationTrace)> {
    system.validate()?;
    let params = system.params()?;
    let nodes = build_grid(system.r_max, system.grid_points)?;
    let op_u = PicardOperator::new(params, &system.p, system.initial_value_u, &nodes)?;
    let op_v = PicardOperator::new(params, &system.q, system.initial_value_v, &nodes)?;
    let mut iterates_u = vec![RadialGrid::constant(nodes.clone(), system.initial_value_u)];
    let mut iterates_v = vec![RadialGrid::constant(nodes, system.initial_value_v)];
    let mut sup_deltas = Vec::new();
    let k = system.k as i32;

    let coupled_rhs = |func: &FunctionSpec,
                       u_prev: &RadialGrid,
                       v_prev: &RadialGrid,
                       panel: usize,
                       s: f64|
     -> Result<f64> {
        let u = u_prev.interp_panel(panel, s);
        let v = v_prev.interp_panel(panel, s);
        let val = func.eval2(u, v)?;
        if val < 0.0 {
            return Err(Error::Numeric(format!(
                "system nonlinearity went negative along the iterate at ({u}, {v})"
            )));
        }
        Ok(val.powi(k))
    };

    let outcome = run_iteration(
        system.tol,
        system.max_iter,
        system.growth_ceiling,
        &mut iterates_u,
        Some(&mut iterates_v),
        &mut sup_deltas,
        |u_prev, v_prev| {
            let v_prev = v_prev.expect("system run carries a second component");
            let u_next =
                op_u.step_with(|panel, s| coupled_rhs(&system.f, u_prev, v_prev, panel, s))?;
            let v_next =
                op_v.step_with(|panel, s| coupled_rhs(&system.g, u_prev, v_prev, panel, s))?;
            Ok((u_next, Some(v_next)))
        },
    )?;
    let status = outcome.status;
    let solution_u = iterates_u.last().expect("nonempty").clone();
    let solution_v = iterates_v.last().expect("nonempty").clone();

    let mut notes = outcome.notes;
    let (residuals, gammas, classification) = match status {
        SolveStatus::Converged => {
            let profile_u = radial::residual_profile_with(&solution_u, &params, |i, r| {
                Ok(system.p.eval1(r)?
                    * system.f.eval2(solution_u.values[i], solution_v.values[i])?)
            })?;
            let profile_v = radial::residual_profile_with(&solution_v, &params, |i, r| {
                Ok(system.q.eval1(r)?
                    * system.g.eval2(solution_u.values[i], solution_v.values[i])?)
            })?;
            let gamma_u = certify_gamma(&solution_u, &params)?;
            let gamma_v = certify_gamma(&solution_v, &params)?;
            let eq12 = conditions::check_weight_largeness_system(
                &system.p,
                &system.q,
                system.k,
                system.dimension,
            )?;
            let trivial = is_trivial(&solution_u) && is_trivial(&solution_v);
            let class = classify_converged(eq12.verdict, trivial, &mut notes);
            if class == Classification::Inconclusive && !eq12.evidence.detail.is_empty() {
                notes.push(eq12.evidence.detail.clone());
            }
            (
                (Some(sup_abs(&profile_u)), Some(sup_abs(&profile_v))),
                (gamma_u, gamma_v),
                class,
            )
        }
        SolveStatus::GrowthDetected => {
            notes.push(
                "growth on the truncated domain is a heuristic; largeness on [0, ∞) \
                 is governed by the weight-largeness condition"
                    .into(),
            );
            ((None, None), (false, false), Classification::LargeCandidate)
        }
        SolveStatus::MaxIterations => {
            ((None, None), (false, false), Classification::Inconclusive)
        }
    };

    let sup_u = solution_u.sup_value();
    let sup_v = solution_v.sup_value();
    let report_u = SolveReport {
        solution: solution_u,
        status,
        iterations: sup_deltas.len(),
        sup_deltas: sup_deltas.clone(),
        sup_value: sup_u,
        residual: residuals.0,
        gamma_k_certified: gammas.0,
        classification,
        notes: notes.clone(),
    };
    let report_v = SolveReport {
        solution: solution_v,
        status,
        iterations: sup_deltas.len(),
        sup_deltas: sup_deltas.clone(),
        sup_value: sup_v,
        residual: residuals.1,
        gamma_k_certified: gammas.1,
        classification,
        notes,
    };
    let trace_u = IterationTrace {
        iterates: iterates_u,
        sup_deltas: sup_deltas.clone(),
        status,
    };
    let trace_v = IterationTrace {
        iterates: iterates_v,
        sup_deltas,
        status,
    };
    Ok((report_u, report_v, trace_u, trace_v))
}

/// Runs the coupled system iteration to a pair of [`SolveReport`]s.
pub fn solve_system(system: &SystemSpec) -> Result<(SolveReport, SolveReport)> {
    solve_system_traced(system).map(|(u, v, _, _)| (u, v))
}

// ---------------------------------------------------------------------------
// Proof diagnostics
// ---------------------------------------------------------------------------

/// The a-priori bound evidence for one radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprioriBound {
    /// The cut radius the bound was evaluated at.
    #[serde(rename = "R")]
    pub r: f64,
    /// `max{p^k(s) : 0 ≤ s ≤ R}`.
    #[serde(rename = "phi_R")]
    pub phi_r: f64,
    /// Largest value over the recorded iterates of
    /// `∫₁^{w(R)} [∫₁^t h^k(s) ds]^{−1/(k+1)} dt`.
    pub lhs: f64,
    /// `((k+1)·phi_R / C(N−1,k−1))^{1/(k+1)} · R^{2k/(k+1)}`.
    pub rhs: f64,
    /// `lhs ≤ rhs + 1e-8` — the uniform-in-m boundedness certificate.
    pub holds: bool,
}

/// Acceptance slack for the a-priori bound comparison.
const APRIORI_SLACK: f64 = 1e-8;

/// Evaluates the a-priori growth bound over every iterate of `trace`.
///
/// The bound is stated for iterations anchored at `a = 1`. The left side
/// is an increasing function of `w(R)`, so its maximum over iterates is
/// attained at the largest recorded `w(R)`, where it is evaluated.
pub fn apriori_bound_check(
    trace: &IterationTrace,
    problem: &ProblemSpec,
    r_cut: f64,
) -> Result<AprioriBound> {
    problem.validate()?;
    if problem.initial_value != 1.0 {
        return Err(Error::Invalid(format!(
            "the a-priori bound is stated for initial value 1, got {}",
            problem.initial_value
        )));
    }
    if !(r_cut.is_finite() && r_cut > 0.0 && r_cut <= problem.r_max) {
        return Err(Error::Invalid(format!(
            "R must lie in (0, r_max], got {r_cut}"
        )));
    }
    if trace.iterates.is_empty() {
        return Err(Error::Invalid("trace has no iterates".into()));
    }
    let params = problem.params()?;
    let k = problem.k as i32;
    let k_f = f64::from(problem.k);

    let mut phi_r = 0.0f64;
    for i in 0..=256 {
        let s = r_cut * i as f64 / 256.0;
        phi_r = phi_r.max(problem.p.eval1(s)?.powi(k));
    }
    for &s in trace.iterates[0].nodes.iter().filter(|&&s| s <= r_cut) {
        phi_r = phi_r.max(problem.p.eval1(s)?.powi(k));
    }
    let rhs = ((k_f + 1.0) * phi_r / params.c_binom as f64).powf(1.0 / (k_f + 1.0))
        * r_cut.powf(2.0 * k_f / (k_f + 1.0));

    let w_star = trace
        .iterates
        .iter()
        .map(|it| it.value_at(r_cut))
        .fold(1.0f64, f64::max);

    let lhs = if w_star <= 1.0 + 1e-12 {
        0.0
    } else {
        // Work in the shifted variable τ = t − 1. The integrand is singular
        // at t = 1, and adaptive bisection toward that end would evaluate at
        // points where `1.0 + τ` rounds back to exactly 1; in the shifted
        // coordinate `0.0 + τ` keeps full resolution arbitrarily close to
        // the singularity.
        let span = w_star - 1.0;
        let hk_shift = |z: f64| -> Result<f64> {
            let v = problem.h.eval1(1.0 + z)?;
            if v < 0.0 {
                return Err(Error::Numeric(format!(
                    "nonlinearity went negative at {}: h = {v}",
                    1.0 + z
                )));
            }
            Ok(v.powi(k))
        };
        // Prefix table for H(τ) = ∫₀^τ h^k(1 + z) dz, quadratically
        // clustered at the singular end τ = 0.
        let m = 512usize;
        let table_nodes: Vec<f64> = (0..=m)
            .map(|i| {
                let frac = i as f64 / m as f64;
                span * frac * frac
            })
            .collect();
        let prefix = quad::cumulative_integral(hk_shift, &table_nodes, 1e-11)?;
        if !(*prefix.last().expect("nonempty") > 0.0) {
            return Err(Error::Degenerate(
                "the cumulative nonlinearity ∫₁^t h^k vanishes up to w(R); \
                 the a-priori bound is undefined"
                    .into(),
            ));
        }
        let h_cumulative = |tau: f64| -> Result<f64> {
            let j = table_nodes.partition_point(|&x| x <= tau).clamp(1, m) - 1;
            let rem = quad::integrate(hk_shift, table_nodes[j], tau, 1e-13)?.value;
            Ok(prefix[j] + rem)
        };
        let integrand = |tau: f64| -> Result<f64> {
            let v = h_cumulative(tau)?;
            if !(v > 0.0) {
                return Err(Error::Degenerate(format!(
                    "the cumulative nonlinearity vanishes at t = {}; \
                     the a-priori bound is undefined",
                    1.0 + tau
                )));
            }
            Ok(v.powf(-1.0 / (k_f + 1.0)))
        };
        match quad::integrate(integrand, 0.0, span, 1e-9) {
            Ok(est) => est.value,
            // The integrand is endpoint-singular; the best estimate is
            // still far more accurate than the slack used below.
            Err(Error::ToleranceNotReached { estimate }) => estimate.value,
            Err(e) => return Err(e),
        }
    };

    Ok(AprioriBound {
        r: r_cut,
        phi_r,
        lhs,
        rhs,
        holds: lhs <= rhs + APRIORI_SLACK,
    })
}

/// Numerical translation of the comparison step in the largeness proof:
/// with the same equation data and ordered initial values / weights, the
/// iteration preserves order.
///
/// Both specs must agree in everything except `initial_value`
/// (`low ≤ high`) and the weight (`p_low ≤ p_high` pointwise, checked by
/// sampling). Returns whether the low solution stays below the high one at
/// every node, comparing final solutions when both runs converged and the
/// last common iterate otherwise.
pub fn comparison_check(low: &ProblemSpec, high: &ProblemSpec) -> Result<bool> {
    low.validate()?;
    high.validate()?;
    if low.dimension != high.dimension
        || low.k != high.k
        || low.h.source() != high.h.source()
        || low.r_max != high.r_max
        || low.grid_points != high.grid_points
        || low.tol != high.tol
        || low.max_iter != high.max_iter
        || low.growth_ceiling != high.growth_ceiling
    {
        return Err(Error::Invalid(
            "comparable problems must share dimension, k, nonlinearity, and \
             numerical controls"
                .into(),
        ));
    }
    if !(low.initial_value <= high.initial_value) {
        return Err(Error::Invalid(format!(
            "initial values are not ordered: {} > {}",
            low.initial_value, high.initial_value
        )));
    }
    for i in 0..=256 {
        let r = low.r_max * i as f64 / 256.0;
        let (pl, ph) = (low.p.eval1(r)?, high.p.eval1(r)?);
        if pl > ph * (1.0 + 1e-12) {
            return Err(Error::Invalid(format!(
                "weights are not ordered at r = {r}: {pl} > {ph}"
            )));
        }
    }
    let (report_low, trace_low) = solve_scalar_traced(low)?;
    let (report_high, trace_high) = solve_scalar_traced(high)?;
    let (grid_low, grid_high) = if report_low.status == SolveStatus::Converged
        && report_high.status == SolveStatus::Converged
    {
        (&report_low.solution, &report_high.solution)
    } else {
        let m = trace_low.iterates.len().min(trace_high.iterates.len()) - 1;
        (&trace_low.iterates[m], &trace_high.iterates[m])
    };
    let sup_high = grid_high.values.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let slack = 1e-10f64.max(1e-10 * sup_high);
    Ok(grid_low
        .values
        .iter()
        .zip(&grid_high.values)
        .all(|(lo, hi)| *lo <= *hi + slack))
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn spec1(src: &str) -> FunctionSpec {
        FunctionSpec::parse(src, 1).unwrap()
    }

    fn spec2(src: &str) -> FunctionSpec {
        FunctionSpec::parse(src, 2).unwrap()
    }

    fn problem(n: u32, k: u32, p: &str, h: &str) -> ProblemSpec {
        ProblemSpec {
            dimension: n,
            k,
            initial_value: 1.0,
            p: spec1(p),
            h: spec1(h),
            r_max: 5.0,
            grid_points: 400,
            tol: 1e-8,
            max_iter: 200,
            growth_ceiling: 1e8,
        }
    }

    fn system(n: u32, k: u32, p: &str, q: &str, f: &str, g: &str) -> SystemSpec {
        SystemSpec {
            dimension: n,
            k,
            initial_value_u: 1.0,
            initial_value_v: 1.0,
            p: spec1(p),
            q: spec1(q),
            f: spec2(f),
            g: spec2(g),
            r_max: 5.0,
            grid_points: 400,
            tol: 1e-8,
            max_iter: 200,
            growth_ceiling: 1e8,
        }
    }

    #[test]
    fn grid_shape() {
        let nodes = build_grid(5.0, 800).unwrap();
        assert_eq!(nodes.len(), 800);
        assert_eq!(nodes[0], 0.0);
        assert_eq!(*nodes.last().unwrap(), 5.0);
        let spacings: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(spacings.iter().all(|&h| h > 0.0));
        // Spacing shrinks toward r_max and the total stretch is capped at 8.
        for w in spacings.windows(2) {
            assert!(w[1] < w[0]);
        }
        let stretch = spacings[0] / spacings[spacings.len() - 1];
        assert!(stretch > 6.0 && stretch < 8.5, "stretch {stretch}");
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let mut bad = problem(3, 1, "1", "u");
        bad.grid_points = 32;
        assert!(matches!(bad.validate(), Err(Error::Invalid(_))));
        let bad = problem(3, 1, "exp(-t) - 1", "u"); // weight nonpositive
        assert!(matches!(bad.validate(), Err(Error::Invalid(_))));
        let bad = problem(3, 1, "1", "u + 1"); // h(0) != 0
        assert!(matches!(bad.validate(), Err(Error::Invalid(_))));
        let bad = problem(3, 4, "1", "u"); // k > N
        assert!(matches!(bad.validate(), Err(Error::Invalid(_))));
        assert!(problem(3, 1, "1", "max(u-1,0)").validate().is_ok());
    }

    #[test]
    fn system_validation_enforces_structure() {
        assert!(system(3, 1, "1", "1", "(u+v)/2", "(u+v)/2").validate().is_ok());
        // Identically-zero nonlinearity: not positive for positive args.
        let bad = system(3, 1, "1", "1", "0", "(u+v)/2");
        assert!(matches!(bad.validate(), Err(Error::Invalid(_))));
        // Decreasing in the first variable.
        let bad = system(3, 1, "1", "1", "max(10 - u, 0) + v", "(u+v)/2");
        assert!(matches!(bad.validate(), Err(Error::Invalid(_))));
        // Nonvanishing at the origin.
        let bad = system(3, 1, "1", "1", "u + v + 1", "(u+v)/2");
        assert!(matches!(bad.validate(), Err(Error::Invalid(_))));
    }

    /// One operator application to w ≡ 1 for N=3, k=1, p ≡ 1, h(u) = u has
    /// the closed form 1 + r²/6 (inner integral t³/3, outer integrand t/3);
    /// the quadrature resolves polynomials exactly.
    #[test]
    fn closed_form_step_laplacian() {
        let prob = {
            let mut p = problem(3, 1, "1", "u");
            p.grid_points = 1000;
            p
        };
        let nodes = build_grid(5.0, 1000).unwrap();
        let w0 = RadialGrid::constant(nodes, 1.0);
        let w1 = picard_step(&w0, &prob).unwrap();
        for (i, &r) in w1.nodes.iter().enumerate() {
            let want = 1.0 + r * r / 6.0;
            assert!(
                (w1.values[i] - want).abs() <= 1e-12 * want,
                "value at r = {r}: {} vs {want}",
                w1.values[i]
            );
            let want_d = r / 3.0;
            assert!(
                (w1.derivatives[i] - want_d).abs() <= 1e-12 * (1.0 + want_d),
                "derivative at r = {r}"
            );
        }
    }

    /// Same shape for the full Monge–Ampère order k = N = 3 (C(2,2) = 1):
    /// the outer integrand collapses to t, so w₁ = 1 + r²/2.
    #[test]
    fn closed_form_step_full_order() {
        let prob = problem(3, 3, "1", "u");
        let nodes = build_grid(5.0, 400).unwrap();
        let w0 = RadialGrid::constant(nodes, 1.0);
        let w1 = picard_step(&w0, &prob).unwrap();
        for (i, &r) in w1.nodes.iter().enumerate() {
            let want = 1.0 + r * r / 2.0;
            assert!(
                (w1.values[i] - want).abs() <= 1e-12 * want,
                "value at r = {r}: {} vs {want}",
                w1.values[i]
            );
            assert!((w1.derivatives[i] - r).abs() <= 1e-12 * (1.0 + r));
        }
    }

    #[test]
    fn trivial_fixed_point_converges_immediately() {
        let prob = problem(3, 1, "1", "max(u-1,0)");
        let report = solve_scalar(&prob).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.residual, Some(0.0));
        assert_eq!(report.classification, Classification::Bounded);
        assert!(report.gamma_k_certified);
        assert!(report.solution.values.iter().all(|&v| v == 1.0));
    }

    fn sinh_oracle(r: f64) -> f64 {
        if r == 0.0 {
            1.0
        } else {
            r.sinh() / r
        }
    }

    #[test]
    fn laplacian_fixed_point_matches_sinh() {
        let mut prob = problem(3, 1, "1", "u");
        prob.grid_points = 800;
        let (report, trace) = solve_scalar_traced(&prob).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        let sol = &report.solution;
        let sup_err = sol
            .nodes
            .iter()
            .zip(&sol.values)
            .map(|(&r, &v)| (v - sinh_oracle(r)).abs())
            .fold(0.0f64, f64::max);
        assert!(sup_err <= 1e-4, "sup error {sup_err}");
        let end = *sol.values.last().unwrap();
        assert!((end - 5f64.sinh() / 5.0).abs() <= 1e-3, "u(5) = {end}");
        // Entire solutions of these data are large; the report must say so.
        assert_eq!(report.classification, Classification::LargeCandidate);
        assert!(report.gamma_k_certified);
        // Proof invariants along the trace.
        for grid in &trace.iterates {
            assert!(grid.values.iter().all(|&v| v >= 1.0));
            assert!(grid.derivatives.iter().all(|&d| d >= 0.0));
            assert!(grid.values.windows(2).all(|w| w[1] >= w[0]));
        }
        for pair in trace.iterates.windows(2) {
            let (prev, next) = (&pair[0], &pair[1]);
            assert!(
                prev.values
                    .iter()
                    .zip(&next.values)
                    .all(|(a, b)| *b >= *a - 1e-12),
                "iterates are not monotone in m"
            );
        }
    }

    #[test]
    fn residual_invariant_on_converged_fixtures() {
        // Residuals are reported through finite differences of the stored
        // derivative, so their floor is the grid's interpolation error;
        // these fixtures pair tolerances and grids so the documented bound
        // 10·tol·(1 + sup) holds honestly.
        let mut sinh_prob = problem(3, 1, "1", "u");
        sinh_prob.grid_points = 1500;
        sinh_prob.tol = 1e-5;
        let mut decaying = problem(3, 1, "exp(-t)", "u");
        decaying.grid_points = 1200;
        decaying.r_max = 10.0;
        decaying.tol = 1e-5;
        for prob in [sinh_prob, decaying] {
            let report = solve_scalar(&prob).unwrap();
            assert_eq!(report.status, SolveStatus::Converged);
            let residual = report.residual.unwrap();
            let bound = 10.0 * prob.tol * (1.0 + report.sup_value);
            assert!(
                residual <= bound,
                "residual {residual} exceeds {bound} for p = {}",
                prob.p.source()
            );
        }
    }

    #[test]
    fn decaying_weight_converges_to_bounded_solution() {
        // The domain stops at r = 10: beyond that the decayed weight pushes
        // S₁ of the true solution below what finite differences can resolve,
        // and the strict Γ-cone certificate could no longer distinguish
        // signal from rounding noise.
        let mut prob = problem(3, 1, "exp(-t)", "u");
        prob.r_max = 10.0;
        prob.grid_points = 800;
        let report = solve_scalar(&prob).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert_eq!(report.classification, Classification::Bounded);
        assert!(report.gamma_k_certified);
        assert!(report.sup_value < 3.0, "sup {}", report.sup_value);
        // The profile stabilizes: the last tenth of the domain is flat to
        // within a loose tolerance.
        let sol = &report.solution;
        let n = sol.values.len();
        assert!(sol.values[n - 1] - sol.values[n - n / 10] < 5e-2);
    }

    #[test]
    fn superlinear_growth_is_detected() {
        let mut prob = problem(3, 1, "1", "u^2");
        prob.max_iter = 80;
        let report = solve_scalar(&prob).unwrap();
        assert_eq!(report.status, SolveStatus::GrowthDetected);
        assert_eq!(report.classification, Classification::LargeCandidate);
        assert!(report.residual.is_none());
    }

    #[test]
    fn overflow_reads_as_growth() {
        let mut prob = problem(3, 1, "1", "exp(u) - 1");
        prob.max_iter = 60;
        let report = solve_scalar(&prob).unwrap();
        assert_eq!(report.status, SolveStatus::GrowthDetected);
        assert_eq!(report.classification, Classification::LargeCandidate);
    }

    #[test]
    fn symmetric_system_reduces_to_scalar() {
        let sys = system(3, 1, "1", "1", "(u+v)/2", "(u+v)/2");
        let (ru, rv) = solve_system(&sys).unwrap();
        assert_eq!(ru.status, SolveStatus::Converged);
        // Symmetry is exact in floating point: (w+w)/2 == w.
        assert_eq!(ru.solution.values, rv.solution.values);
        let scalar = {
            let mut p = problem(3, 1, "1", "u");
            p.grid_points = 400;
            p
        };
        let sr = solve_scalar(&scalar).unwrap();
        assert_eq!(ru.solution.values, sr.solution.values);
        assert_eq!(ru.classification, Classification::LargeCandidate);
    }

    #[test]
    fn decaying_system_is_bounded() {
        let mut sys = system(5, 2, "(1+t)^(-5/2)", "(1+t)^(-5/2)", "(u+v)/2", "(u+v)/2");
        sys.r_max = 20.0;
        let (ru, rv) = solve_system(&sys).unwrap();
        assert_eq!(ru.status, SolveStatus::Converged);
        assert_eq!(ru.classification, Classification::Bounded);
        assert_eq!(rv.classification, Classification::Bounded);
        assert!(ru.gamma_k_certified && rv.gamma_k_certified);
    }

    #[test]
    fn comparison_examples() {
        let base = problem(3, 1, "1", "u");
        // Identical problems compare true (with equality).
        assert!(comparison_check(&base, &base).unwrap());
        // Larger initial value dominates.
        let mut high = base.clone();
        high.initial_value = 2.0;
        assert!(comparison_check(&base, &high).unwrap());
        // Larger weight dominates.
        let low = problem(3, 1, "exp(-t)", "u");
        assert!(comparison_check(&low, &base).unwrap());
        // Unordered weights are incomparable.
        assert!(matches!(
            comparison_check(&base, &low),
            Err(Error::Invalid(_))
        ));
        // Different nonlinearities are incomparable.
        let other = problem(3, 1, "1", "sqrt(u)");
        assert!(matches!(
            comparison_check(&base, &other),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn apriori_bound_closed_form_case() {
        // N=3, k=1, p ≡ 1, h(u) = u, R = 1: the converged profile is
        // sinh(r)/r, so w(1) = sinh(1) and
        // lhs = ∫₁^{sinh 1} [(t²−1)/2]^{−1/2} dt = √2·acosh(sinh 1),
        // rhs = √2.
        let mut prob = problem(3, 1, "1", "u");
        prob.grid_points = 800;
        let (_, trace) = solve_scalar_traced(&prob).unwrap();
        let bound = apriori_bound_check(&trace, &prob, 1.0).unwrap();
        assert!((bound.rhs - 2f64.sqrt()).abs() <= 1e-12);
        assert!((bound.phi_r - 1.0).abs() <= 1e-12);
        let oracle = 2f64.sqrt() * 1f64.sinh().acosh();
        assert!(
            (bound.lhs - oracle).abs() <= 2e-4,
            "lhs {} vs oracle {oracle}",
            bound.lhs
        );
        assert!(bound.holds);
    }

    #[test]
    fn apriori_bound_on_every_iterate_of_decaying_case() {
        let mut prob = problem(3, 1, "exp(-t)", "u");
        prob.r_max = 10.0;
        let (_, trace) = solve_scalar_traced(&prob).unwrap();
        for r_cut in [1.0, 2.0, 5.0] {
            let bound = apriori_bound_check(&trace, &prob, r_cut).unwrap();
            assert!(bound.holds, "bound fails at R = {r_cut}: {bound:?}");
            assert!(bound.lhs >= 0.0);
        }
    }

    #[test]
    fn apriori_bound_trivial_iterate() {
        let prob = problem(3, 1, "1", "max(u-1,0)");
        let (_, trace) = solve_scalar_traced(&prob).unwrap();
        let bound = apriori_bound_check(&trace, &prob, 2.0).unwrap();
        assert_eq!(bound.lhs, 0.0);
        assert!(bound.holds);
    }

    #[test]
    fn apriori_bound_rejects_other_anchors() {
        let mut prob = problem(3, 1, "1", "u");
        prob.initial_value = 2.0;
        let (_, trace) = solve_scalar_traced(&prob).unwrap();
        assert!(matches!(
            apriori_bound_check(&trace, &prob, 1.0),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn monotone_step_preserves_order() {
        let prob = problem(3, 1, "1", "u");
        let nodes = build_grid(5.0, 400).unwrap();
        let w0 = RadialGrid::constant(nodes, 1.0);
        let w1 = picard_step(&w0, &prob).unwrap();
        let w2 = picard_step(&w1, &prob).unwrap();
        assert!(w1
            .values
            .iter()
            .zip(&w2.values)
            .all(|(a, b)| b >= a));
    }
}
