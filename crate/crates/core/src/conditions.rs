//! Numerical verdicts for the structural conditions behind the existence
//! and largeness classification: dimensional admissibility, weight
//! monotonicity and decay, nonlinearity shape, Keller–Osserman-type
//! integrals, and the weighted largeness integrals.
//!
//! Every check returns a [`ConditionReport`] carrying a three-valued
//! [`Verdict`] plus [`Evidence`] (tail classifications, witness pairs,
//! thresholds) so a caller — or a reader of the JSON output — can audit
//! how the verdict was reached. Checks are conservative: when the
//! numerical evidence sits inside the critical band they answer
//! [`Verdict::Inconclusive`] rather than guessing.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::expr::{sample_monotone, FunctionSpec, MonotoneVerdict};
use crate::quad::{self, Convergence, TailVerdict};
use crate::radial::{self, HessianParams};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

/// Three-valued outcome of a condition check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Identifier of a checkable condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionId {
    /// Scalar weight monotonicity: `r^{N + N/k − 2} p^k(r)` eventually
    /// non-decreasing.
    #[serde(rename = "P2")]
    P2,
    /// System weight monotonicity: same with `p^k + q^k`.
    #[serde(rename = "P3")]
    P3,
    /// Scalar nonlinearity shape: `h(0) = 0`, `h > 0` on `(0, ∞)`,
    /// non-decreasing.
    #[serde(rename = "C1")]
    C1,
    /// System nonlinearity shape for `f` and `g`.
    #[serde(rename = "C2")]
    C2,
    /// Scalar Keller–Osserman integral diverges.
    #[serde(rename = "C3")]
    C3,
    /// System Keller–Osserman integral diverges.
    #[serde(rename = "C4")]
    C4,
    /// Scalar weight decay: the weighted tail integral is finite for some
    /// epsilon.
    #[serde(rename = "EQ5")]
    Eq5,
    /// System weight decay.
    #[serde(rename = "EQ5S")]
    Eq5s,
    /// Scalar weight largeness integral diverges.
    #[serde(rename = "EQ12")]
    Eq12,
    /// System weight largeness: both integrals diverge.
    #[serde(rename = "EQ12S")]
    Eq12s,
    /// Dimensional admissibility `2k < N`.
    #[serde(rename = "GATE")]
    Gate,
    /// Necessary condition for largeness (scalar): decay fails for every
    /// epsilon, or the order exceeds the gate.
    #[serde(rename = "EQ13")]
    Eq13,
    /// Necessary condition for largeness (system).
    #[serde(rename = "EQ13S")]
    Eq13s,
}

impl ConditionId {
    /// All checkable conditions, in display order.
    pub const ALL: [ConditionId; 13] = [
        ConditionId::P2,
        ConditionId::P3,
        ConditionId::C1,
        ConditionId::C2,
        ConditionId::C3,
        ConditionId::C4,
        ConditionId::Eq5,
        ConditionId::Eq5s,
        ConditionId::Eq12,
        ConditionId::Eq12s,
        ConditionId::Gate,
        ConditionId::Eq13,
        ConditionId::Eq13s,
    ];

    /// Canonical name, matching the JSON encoding.
    pub fn name(self) -> &'static str {
        match self {
            ConditionId::P2 => "P2",
            ConditionId::P3 => "P3",
            ConditionId::C1 => "C1",
            ConditionId::C2 => "C2",
            ConditionId::C3 => "C3",
            ConditionId::C4 => "C4",
            ConditionId::Eq5 => "EQ5",
            ConditionId::Eq5s => "EQ5S",
            ConditionId::Eq12 => "EQ12",
            ConditionId::Eq12s => "EQ12S",
            ConditionId::Gate => "GATE",
            ConditionId::Eq13 => "EQ13",
            ConditionId::Eq13s => "EQ13S",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<ConditionId> {
        ConditionId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Invalid(format!(
                    "unknown condition '{s}'; expected one of {}",
                    ConditionId::ALL.map(|id| id.name()).join(", ")
                ))
            })
    }
}

/// A sampled pair witnessing a monotonicity violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessPair {
    pub r_lo: f64,
    pub g_lo: f64,
    pub r_hi: f64,
    pub g_hi: f64,
}

/// A labelled improper-integral classification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedTail {
    pub label: String,
    pub tail: TailVerdict,
}

/// A labelled sub-verdict (for conditions assembled from parts).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemVerdict {
    pub label: String,
    pub verdict: Verdict,
}

/// Everything a check recorded on the way to its verdict.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Evidence {
    /// Human-readable explanation of the verdict.
    pub detail: String,
    /// Improper-integral classifications that fed the verdict.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tails: Vec<NamedTail>,
    /// Witness of a monotonicity violation, when one was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessPair>,
    /// The epsilon certifying a decay condition, when one was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_found: Option<f64>,
    /// The sampled radius past which monotonicity holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_radius: Option<f64>,
    /// Sub-verdicts for compound conditions.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub items: Vec<ItemVerdict>,
}

impl Evidence {
    fn detail(text: impl Into<String>) -> Evidence {
        Evidence {
            detail: text.into(),
            ..Evidence::default()
        }
    }
}

/// Verdict plus evidence for one condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: ConditionId,
    pub verdict: Verdict,
    pub evidence: Evidence,
}

fn map_convergence_to_divergence_condition(c: Convergence) -> Verdict {
    match c {
        Convergence::Diverges => Verdict::Holds,
        Convergence::Converges => Verdict::Fails,
        Convergence::Inconclusive => Verdict::Inconclusive,
    }
}

// ---------------------------------------------------------------------------
// Shared numerical plumbing
// ---------------------------------------------------------------------------

/// Lower end of the prefix-integral table.
const PREFIX_LO: f64 = 1e-4;
/// Upper cap of the prefix-integral table (and of all cutoff ladders).
const PREFIX_MAX: f64 = 1e8;
/// Geometric resolution of the prefix table.
const PREFIX_PER_DECADE: usize = 25;
/// Number of decades covered by the prefix table.
const PREFIX_DECADES: usize = 12;
/// Accumulated tolerance for the prefix table.
const PREFIX_TABLE_TOL: f64 = 1e-10;
/// Tolerance for the per-evaluation remainder integral.
const PREFIX_EVAL_TOL: f64 = 1e-12;

/// A tabulated prefix integral `F(t) = ∫₀^t f` on `[0, 10^8]`: cumulative
/// values on a geometric node ladder plus an adaptive remainder integral
/// per evaluation, so `F` can be queried at arbitrary points inside
/// improper-integral classification without re-integrating from zero.
struct PrefixIntegral<F> {
    f: F,
    nodes: Vec<f64>,
    prefix: Vec<f64>,
}

impl<F: Fn(f64) -> Result<f64>> PrefixIntegral<F> {
    fn new(f: F) -> Result<PrefixIntegral<F>> {
        let steps = PREFIX_DECADES * PREFIX_PER_DECADE;
        let mut nodes = Vec::with_capacity(steps + 2);
        nodes.push(0.0);
        for i in 0..=steps {
            nodes.push(PREFIX_LO * 10f64.powf(i as f64 / PREFIX_PER_DECADE as f64));
        }
        *nodes.last_mut().expect("nonempty") = PREFIX_MAX;
        let prefix = quad::cumulative_integral(&f, &nodes, PREFIX_TABLE_TOL)?;
        Ok(PrefixIntegral { f, nodes, prefix })
    }

    fn eval(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Invalid(format!(
                "prefix integral argument must be nonnegative and finite, got {t}"
            )));
        }
        if t > PREFIX_MAX * (1.0 + 1e-9) {
            return Err(Error::Invalid(format!(
                "prefix integral argument {t} exceeds the table cap {PREFIX_MAX}"
            )));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let j = self.nodes.partition_point(|&x| x <= t) - 1;
        let rem = match quad::integrate(&self.f, self.nodes[j], t.min(PREFIX_MAX), PREFIX_EVAL_TOL)
        {
            Ok(est) => est.value,
            // Classification weighs trends; the best estimate suffices.
            Err(Error::ToleranceNotReached { estimate }) => estimate.value,
            Err(e) => return Err(e),
        };
        Ok(self.prefix[j] + rem)
    }
}

/// Geometric cutoff ladder from `max(lower, 1)` spanning at least four
/// decades, capped at the prefix-table range.
fn capped_cutoffs(lower: f64) -> Result<Vec<f64>> {
    let lo = lower.max(1.0);
    let hi = (lo * 1.0e4).clamp(1.0e6, PREFIX_MAX);
    if !(lo < hi) {
        return Err(Error::Degenerate(format!(
            "integral lower bound {lo} leaves no room below the table cap {PREFIX_MAX}"
        )));
    }
    let n = 16usize;
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    let mut out = Vec::with_capacity(n);
    let mut c = lo;
    for i in 0..n {
        out.push(if i + 1 == n { hi } else { c });
        c *= ratio;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Dimensional gate
// ---------------------------------------------------------------------------

/// Largest Hessian order the admissibility bound `2k < N` allows in
/// `dimension` ambient dimensions.
pub fn admissible_k_max(dimension: u32) -> Result<u32> {
    if dimension < 3 {
        return Err(Error::Invalid(format!(
            "dimension must be at least 3, got {dimension}"
        )));
    }
    Ok((dimension - 1) / 2)
}

/// Checks the dimensional admissibility gate `2k < N`.
pub fn dimension_gate(k: u32, dimension: u32) -> Result<ConditionReport> {
    HessianParams::new(dimension, k)?;
    let k_max = admissible_k_max(dimension)?;
    let (verdict, detail) = if k <= k_max {
        (
            Verdict::Holds,
            format!(
                "order k = {k} lies within the admissible range 1..={k_max} \
                 for dimension {dimension} (2k < N)"
            ),
        )
    } else {
        (
            Verdict::Fails,
            format!(
                "order k = {k} exceeds the largest admissible order {k_max} \
                 for dimension {dimension} (the gate requires 2k < N)"
            ),
        )
    };
    Ok(ConditionReport {
        condition: ConditionId::Gate,
        verdict,
        evidence: Evidence::detail(detail),
    })
}

// ---------------------------------------------------------------------------
// Weight monotonicity (P2 / P3)
// ---------------------------------------------------------------------------

/// Relative slack for consecutive-sample monotonicity comparisons.
const MONO_TOL: f64 = 1e-12;
/// Sample range and resolution for the weighted profile.
const MONO_LO: f64 = 1e-2;
const MONO_PER_DECADE: usize = 25;
const MONO_DECADES: usize = 6;
/// Violations that end past this radius leave too little sampled tail to
/// certify monotonicity-from-a-threshold.
const MONO_TAIL_START: f64 = 1e3;

/// Checks that `g(r) = r^{N + N/k − 2} · Σᵢ pᵢ^k(r)` is non-decreasing for
/// large `r` (one weight: P2; two weights: P3).
///
/// The profile is sampled geometrically over `[10⁻², 10⁴]`. With no sampled
/// decrease the condition holds from radius 0. With decreases that stop
/// before `10³` — and a tail that climbs back to the sampled maximum — it
/// holds from the first radius past the last decrease. A tail that is
/// net-decreasing over the final decade, or that underflows to zero (the
/// profile is positive by construction, so a zero sample means decay below
/// representable range), fails with the last violating pair as witness.
/// Anything else is inconclusive.
pub fn check_weight_monotonicity(
    weights: &[&FunctionSpec],
    k: u32,
    dimension: u32,
) -> Result<ConditionReport> {
    let condition = match weights.len() {
        1 => ConditionId::P2,
        2 => ConditionId::P3,
        n => {
            return Err(Error::Invalid(format!(
                "weight monotonicity takes 1 or 2 weights, got {n}"
            )))
        }
    };
    HessianParams::new(dimension, k)?;
    for w in weights {
        if w.arity() != 1 {
            return Err(Error::Invalid("weights must have arity 1".into()));
        }
    }
    let n_f = f64::from(dimension);
    let k_f = f64::from(k);
    let ki = k as i32;
    let expo = n_f + n_f / k_f - 2.0;

    let count = MONO_DECADES * MONO_PER_DECADE;
    let mut rs = Vec::with_capacity(count + 1);
    let mut gs = Vec::with_capacity(count + 1);
    for j in 0..=count {
        let r = MONO_LO * 10f64.powf(j as f64 / MONO_PER_DECADE as f64);
        let mut base = 0.0f64;
        for w in weights {
            let pv = w.eval1(r)?;
            if pv < 0.0 {
                return Err(Error::Invalid(format!(
                    "weights must be nonnegative, got {}({r}) = {pv}",
                    w.source()
                )));
            }
            base += pv.powi(ki);
        }
        rs.push(r);
        gs.push(r.powf(expo) * base);
    }

    let violations: Vec<usize> = (0..count)
        .filter(|&j| gs[j + 1] < gs[j] * (1.0 - MONO_TOL))
        .collect();

    if violations.is_empty() {
        return Ok(ConditionReport {
            condition,
            verdict: Verdict::Holds,
            evidence: Evidence {
                detail: format!(
                    "r^{expo} times the weight power sum is non-decreasing over \
                     the entire sampled range [{MONO_LO}, {}]",
                    rs[count]
                ),
                threshold_radius: Some(0.0),
                ..Evidence::default()
            },
        });
    }

    let last = *violations.last().expect("nonempty");
    let witness = WitnessPair {
        r_lo: rs[last],
        g_lo: gs[last],
        r_hi: rs[last + 1],
        g_hi: gs[last + 1],
    };
    let g_max = gs.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let end_is_max = gs[count] >= g_max * (1.0 - MONO_TOL);

    if end_is_max && rs[last + 1] < MONO_TAIL_START {
        return Ok(ConditionReport {
            condition,
            verdict: Verdict::Holds,
            evidence: Evidence {
                detail: format!(
                    "the weighted profile decreases last near r = {} and is \
                     non-decreasing from there to the end of the sampled range",
                    rs[last + 1]
                ),
                threshold_radius: Some(rs[last + 1]),
                ..Evidence::default()
            },
        });
    }

    let decade_start = count - MONO_PER_DECADE;
    let net_decreasing = gs[count] < gs[decade_start] * (1.0 - MONO_TOL);
    let underflowed = gs[count] <= g_max * 1e-15;
    if net_decreasing || underflowed {
        let reason = if net_decreasing {
            format!(
                "the weighted profile is net-decreasing over the final sampled \
                 decade [{}, {}]",
                rs[decade_start], rs[count]
            )
        } else {
            format!(
                "the weighted profile decays below representable range by \
                 r = {} while the weight is positive",
                rs[count]
            )
        };
        return Ok(ConditionReport {
            condition,
            verdict: Verdict::Fails,
            evidence: Evidence {
                detail: reason,
                witness: Some(witness),
                ..Evidence::default()
            },
        });
    }

    Ok(ConditionReport {
        condition,
        verdict: Verdict::Inconclusive,
        evidence: Evidence {
            detail: format!(
                "the weighted profile still oscillates near the end of the \
                 sampled range (last decrease at r = {}), without a net \
                 decrease over the final decade",
                rs[last + 1]
            ),
            witness: Some(witness),
            ..Evidence::default()
        },
    })
}

// ---------------------------------------------------------------------------
// Nonlinearity shape (C1 / C2)
// ---------------------------------------------------------------------------

/// Tolerance for "vanishes at the origin".
const ORIGIN_TOL: f64 = 1e-12;
/// Positivity sampling for scalar nonlinearities: geometric over
/// `[10⁻⁶, 10²]`.
const POSITIVITY_PER_DECADE: usize = 25;
const POSITIVITY_DECADES: usize = 8;
/// Upper end of the monotonicity sampling interval.
const MONOTONE_HI: f64 = 100.0;

/// Checks the scalar nonlinearity shape: `h(0) = 0`, `h(s) > 0` for
/// sampled `s > 0`, and `h` non-decreasing on `[0, 100]`.
pub fn check_nonlinearity_scalar(h: &FunctionSpec) -> Result<ConditionReport> {
    if h.arity() != 1 {
        return Err(Error::Invalid("nonlinearity h must have arity 1".into()));
    }
    let condition = ConditionId::C1;
    let h0 = h.eval1(0.0)?;
    if h0.abs() > ORIGIN_TOL {
        return Ok(ConditionReport {
            condition,
            verdict: Verdict::Fails,
            evidence: Evidence::detail(format!(
                "h must vanish at the origin, got h(0) = {h0}"
            )),
        });
    }
    let count = POSITIVITY_DECADES * POSITIVITY_PER_DECADE;
    for j in 0..=count {
        let s = 1e-6 * 10f64.powf(j as f64 / POSITIVITY_PER_DECADE as f64);
        let v = h.eval1(s)?;
        if !(v > 0.0) {
            return Ok(ConditionReport {
                condition,
                verdict: Verdict::Fails,
                evidence: Evidence::detail(format!(
                    "h must be positive for positive arguments, got h({s}) = {v}"
                )),
            });
        }
    }
    match sample_monotone(h, 0, None, 0.0, MONOTONE_HI, 256)? {
        MonotoneVerdict::Violated { x_lo, f_lo, x_hi, f_hi } => Ok(ConditionReport {
            condition,
            verdict: Verdict::Fails,
            evidence: Evidence {
                detail: format!(
                    "h must be non-decreasing: value drops from {f_lo} at \
                     {x_lo} to {f_hi} at {x_hi}"
                ),
                witness: Some(WitnessPair {
                    r_lo: x_lo,
                    g_lo: f_lo,
                    r_hi: x_hi,
                    g_hi: f_hi,
                }),
                ..Evidence::default()
            },
        }),
        MonotoneVerdict::Inconclusive => Ok(ConditionReport {
            condition,
            verdict: Verdict::Inconclusive,
            evidence: Evidence::detail(
                "h shows sub-tolerance decreases; monotonicity could not be \
                 certified either way",
            ),
        }),
        MonotoneVerdict::NonDecreasing => Ok(ConditionReport {
            condition,
            verdict: Verdict::Holds,
            evidence: Evidence::detail(
                "h vanishes at 0, is positive at all sampled positive \
                 arguments, and is non-decreasing on the sampled range",
            ),
        }),
    }
}

/// Per-component shape verdict for a system nonlinearity.
fn system_component_shape(
    func: &FunctionSpec,
    name: &str,
) -> Result<(Verdict, String, Option<WitnessPair>)> {
    if func.arity() != 2 {
        return Err(Error::Invalid(format!("{name} must have arity 2")));
    }
    let at_origin = func.eval2(0.0, 0.0)?;
    if at_origin.abs() > ORIGIN_TOL {
        return Ok((
            Verdict::Fails,
            format!("{name} must vanish at (0, 0), got {at_origin}"),
            None,
        ));
    }
    let samples = [0.0, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0];
    for &x in &samples {
        for &y in &samples {
            let v = func.eval2(x, y)?;
            if v < 0.0 {
                return Ok((
                    Verdict::Fails,
                    format!("{name} must be nonnegative, got {name}({x}, {y}) = {v}"),
                    None,
                ));
            }
            if x > 0.0 && y > 0.0 && v == 0.0 {
                return Ok((
                    Verdict::Fails,
                    format!(
                        "{name} must be positive when both arguments are \
                         positive, got {name}({x}, {y}) = 0"
                    ),
                    None,
                ));
            }
        }
    }
    let mut inconclusive = false;
    for var in 0..2usize {
        for fixed in [0.0, 1.0, 10.0] {
            match sample_monotone(func, var, Some(fixed), 0.0, MONOTONE_HI, 128)? {
                MonotoneVerdict::Violated { x_lo, f_lo, x_hi, f_hi } => {
                    return Ok((
                        Verdict::Fails,
                        format!(
                            "{name} must be non-decreasing in argument {var}: \
                             value drops from {f_lo} at {x_lo} to {f_hi} at \
                             {x_hi} (other argument fixed at {fixed})"
                        ),
                        Some(WitnessPair {
                            r_lo: x_lo,
                            g_lo: f_lo,
                            r_hi: x_hi,
                            g_hi: f_hi,
                        }),
                    ));
                }
                MonotoneVerdict::Inconclusive => inconclusive = true,
                MonotoneVerdict::NonDecreasing => {}
            }
        }
    }
    if inconclusive {
        Ok((
            Verdict::Inconclusive,
            format!("{name} shows sub-tolerance decreases in some direction"),
            None,
        ))
    } else {
        Ok((
            Verdict::Holds,
            format!(
                "{name} vanishes at the origin, is positive for positive \
                 arguments, and is non-decreasing in each argument"
            ),
            None,
        ))
    }
}

/// Checks the system nonlinearity shape for both components.
pub fn check_nonlinearity_system(
    f: &FunctionSpec,
    g: &FunctionSpec,
) -> Result<ConditionReport> {
    let (vf, df, wf) = system_component_shape(f, "f")?;
    let (vg, dg, wg) = system_component_shape(g, "g")?;
    let verdict = match (vf, vg) {
        (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::Holds,
    };
    let detail = match verdict {
        Verdict::Holds => "both f and g satisfy the shape requirements".to_string(),
        _ => {
            if vf != Verdict::Holds {
                df.clone()
            } else {
                dg.clone()
            }
        }
    };
    Ok(ConditionReport {
        condition: ConditionId::C2,
        verdict,
        evidence: Evidence {
            detail,
            witness: wf.or(wg),
            items: vec![
                ItemVerdict {
                    label: "f".into(),
                    verdict: vf,
                },
                ItemVerdict {
                    label: "g".into(),
                    verdict: vg,
                },
            ],
            ..Evidence::default()
        },
    })
}

// ---------------------------------------------------------------------------
// Keller–Osserman integrals (C3 / C4)
// ---------------------------------------------------------------------------

/// Shared Keller–Osserman pipeline: with `H(t) = ∫₀^t density`, classifies
/// `∫_lower^∞ ((k+1)·H(t))^{−1/(k+1)} dt` and maps divergence to `Holds`.
fn keller_osserman_report(
    condition: ConditionId,
    density: impl Fn(f64) -> Result<f64>,
    k: u32,
) -> Result<ConditionReport> {
    let k_f = f64::from(k);
    let table = PrefixIntegral::new(&density)?;
    let total = *table.prefix.last().expect("nonempty");
    if !(total > 0.0) {
        return Err(Error::Degenerate(
            "the nonlinearity density integrates to zero over the sampled \
             range; the Keller–Osserman integral is undefined"
                .into(),
        ));
    }
    let first_pos = table
        .nodes
        .iter()
        .zip(&table.prefix)
        .find(|(_, &p)| p > 0.0)
        .map(|(&t, _)| t)
        .expect("total is positive");
    let lower = first_pos.max(1.0);
    let cutoffs = capped_cutoffs(lower)?;
    let power = -1.0 / (k_f + 1.0);
    let integrand = |t: f64| -> Result<f64> {
        let cumulative = table.eval(t)?;
        if !(cumulative > 0.0) {
            return Err(Error::Degenerate(format!(
                "the cumulative nonlinearity vanishes at t = {t}; the \
                 Keller–Osserman integrand is undefined there"
            )));
        }
        Ok(((k_f + 1.0) * cumulative).powf(power))
    };
    let tail = quad::classify_improper(integrand, lower, &cutoffs)?;
    let verdict = map_convergence_to_divergence_condition(tail.verdict);
    let detail = match verdict {
        Verdict::Holds => format!(
            "the Keller–Osserman integral from {lower} diverges: the \
             nonlinearity grows slowly enough for entire solutions"
        ),
        Verdict::Fails => format!(
            "the Keller–Osserman integral from {lower} converges: the \
             nonlinearity grows too fast"
        ),
        Verdict::Inconclusive => format!(
            "the Keller–Osserman integral from {lower} sits in the critical \
             band; no verdict"
        ),
    };
    Ok(ConditionReport {
        condition,
        verdict,
        evidence: Evidence {
            detail,
            tails: vec![NamedTail {
                label: "keller-osserman".into(),
                tail,
            }],
            ..Evidence::default()
        },
    })
}

/// Checks the scalar Keller–Osserman condition with `H(t) = ∫₀^t h^k`.
pub fn check_keller_osserman_scalar(h: &FunctionSpec, k: u32) -> Result<ConditionReport> {
    if h.arity() != 1 {
        return Err(Error::Invalid("nonlinearity h must have arity 1".into()));
    }
    if k < 1 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    let ki = k as i32;
    let density = |z: f64| -> Result<f64> {
        let v = h.eval1(z)?;
        if v < 0.0 {
            return Err(Error::Numeric(format!(
                "nonlinearity h must be nonnegative, got h({z}) = {v}"
            )));
        }
        Ok(v.powi(ki))
    };
    keller_osserman_report(ConditionId::C3, density, k)
}

/// Checks the system Keller–Osserman condition with
/// `F(t) = ∫₀^t (f^k(z, z) + g^k(z, z)) dz`.
pub fn check_keller_osserman_system(
    f: &FunctionSpec,
    g: &FunctionSpec,
    k: u32,
) -> Result<ConditionReport> {
    if f.arity() != 2 || g.arity() != 2 {
        return Err(Error::Invalid(
            "system nonlinearities must have arity 2".into(),
        ));
    }
    if k < 1 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    let ki = k as i32;
    let density = |z: f64| -> Result<f64> {
        let fv = f.eval2(z, z)?;
        let gv = g.eval2(z, z)?;
        if fv < 0.0 || gv < 0.0 {
            return Err(Error::Numeric(format!(
                "system nonlinearities must be nonnegative on the diagonal, \
                 got f({z}, {z}) = {fv}, g({z}, {z}) = {gv}"
            )));
        }
        Ok(fv.powi(ki) + gv.powi(ki))
    };
    keller_osserman_report(ConditionId::C4, density, k)
}

// ---------------------------------------------------------------------------
// Weight decay (EQ5 / EQ5S)
// ---------------------------------------------------------------------------

/// Tail exponents at or above this are treated as decisively divergent.
const ALPHA_CLEARLY_DIVERGENT: f64 = -0.95;

/// Default epsilon ladder for the decay conditions.
pub const DEFAULT_EPSILON_GRID: [f64; 5] = [0.01, 0.05, 0.1, 0.5, 1.0];

/// Checks the weight decay condition: for some `ε > 0`,
/// `∫₀^∞ t^{1 + ε + 2(k−1)/(k+1)} (Σᵢ pᵢ^k(t))^{2/(k+1)} dt < ∞`
/// (one weight: EQ5; two weights: EQ5S).
///
/// The epsilon grid is walked in ascending order; the first certified
/// convergence decides `Holds`. The integrand grows with ε, so divergence
/// at every grid point — with the smallest-ε tail exponent clear of the
/// critical band — decides `Fails`. Mixed evidence is inconclusive.
pub fn check_weight_decay(
    weights: &[&FunctionSpec],
    k: u32,
    epsilon_grid: &[f64],
) -> Result<ConditionReport> {
    let condition = match weights.len() {
        1 => ConditionId::Eq5,
        2 => ConditionId::Eq5s,
        n => {
            return Err(Error::Invalid(format!(
                "weight decay takes 1 or 2 weights, got {n}"
            )))
        }
    };
    for w in weights {
        if w.arity() != 1 {
            return Err(Error::Invalid("weights must have arity 1".into()));
        }
    }
    if k < 1 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    if epsilon_grid.is_empty() {
        return Err(Error::Invalid("epsilon grid must be nonempty".into()));
    }
    let mut eps: Vec<f64> = epsilon_grid.to_vec();
    for &e in &eps {
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::Invalid(format!(
                "epsilon grid entries must be positive and finite, got {e}"
            )));
        }
    }
    eps.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    eps.dedup();

    let k_f = f64::from(k);
    let ki = k as i32;
    let base_pow = 2.0 / (k_f + 1.0);
    let cutoffs = quad::default_cutoffs(0.0);
    let mut tails = Vec::new();
    let mut verdicts = Vec::new();
    let mut found: Option<f64> = None;
    for &e in &eps {
        let t_exp = 1.0 + e + 2.0 * (k_f - 1.0) / (k_f + 1.0);
        let integrand = |t: f64| -> Result<f64> {
            let mut base = 0.0f64;
            for w in weights {
                let pv = w.eval1(t)?;
                if pv < 0.0 {
                    return Err(Error::Numeric(format!(
                        "weights must be nonnegative, got {}({t}) = {pv}",
                        w.source()
                    )));
                }
                base += pv.powi(ki);
            }
            Ok(t.powf(t_exp) * base.powf(base_pow))
        };
        let tail = quad::classify_improper(integrand, 0.0, &cutoffs)?;
        let v = tail.verdict;
        tails.push(NamedTail {
            label: format!("epsilon={e}"),
            tail,
        });
        verdicts.push(v);
        if v == Convergence::Converges {
            found = Some(e);
            break;
        }
    }

    if let Some(e) = found {
        return Ok(ConditionReport {
            condition,
            verdict: Verdict::Holds,
            evidence: Evidence {
                detail: format!("the decay integral converges at epsilon = {e}"),
                tails,
                epsilon_found: Some(e),
                ..Evidence::default()
            },
        });
    }
    let all_diverge = verdicts.iter().all(|&v| v == Convergence::Diverges);
    let clearly = tails[0]
        .tail
        .tail_exponent
        .is_some_and(|a| a >= ALPHA_CLEARLY_DIVERGENT);
    if all_diverge && clearly {
        return Ok(ConditionReport {
            condition,
            verdict: Verdict::Fails,
            evidence: Evidence {
                detail: format!(
                    "the decay integral diverges at every epsilon in the grid \
                     {eps:?}, with a decisively divergent tail at the \
                     smallest epsilon"
                ),
                tails,
                ..Evidence::default()
            },
        });
    }
    Ok(ConditionReport {
        condition,
        verdict: Verdict::Inconclusive,
        evidence: Evidence {
            detail: "the decay integral could not be certified convergent at \
                     any epsilon, nor decisively divergent at the smallest"
                .into(),
            tails,
            ..Evidence::default()
        },
    })
}

// ---------------------------------------------------------------------------
// Weight largeness (EQ12 / EQ12S)
// ---------------------------------------------------------------------------

/// Classifies the largeness integral
/// `∫₀^∞ (k · J(t) · t^{k−N})^{1/k} dt` with
/// `J(t) = ∫₀^t s^{N−1} p^k(s) / C(N−1, k−1) ds`.
fn largeness_tail(p: &FunctionSpec, params: &HessianParams) -> Result<TailVerdict> {
    let ki = params.k as i32;
    let k_f = f64::from(params.k);
    let nm1 = (params.dimension - 1) as i32;
    let inv_exp = ki - params.dimension as i32;
    let c = params.c_binom as f64;
    let density = |s: f64| -> Result<f64> {
        let pv = p.eval1(s)?;
        if pv < 0.0 {
            return Err(Error::Numeric(format!(
                "weights must be nonnegative, got {}({s}) = {pv}",
                p.source()
            )));
        }
        Ok(s.powi(nm1) * pv.powi(ki) / c)
    };
    let table = PrefixIntegral::new(&density)?;
    let integrand = |t: f64| -> Result<f64> {
        let j = table.eval(t)?;
        let arg = (k_f * j * t.powi(inv_exp)).max(0.0);
        Ok(radial::kth_root_nonneg(arg, params.k))
    };
    quad::classify_improper(integrand, 0.0, &quad::default_cutoffs(0.0))
}

fn largeness_detail(verdict: Verdict, label: &str) -> String {
    match verdict {
        Verdict::Holds => format!(
            "the largeness integral for {label} diverges: every entire \
             solution with these data is unbounded at infinity"
        ),
        Verdict::Fails => format!(
            "the largeness integral for {label} converges: bounded entire \
             solutions are possible"
        ),
        Verdict::Inconclusive => format!(
            "the largeness integral for {label} sits in the critical band; \
             no verdict"
        ),
    }
}

/// Checks the scalar weight largeness condition (EQ12).
pub fn check_weight_largeness_scalar(
    p: &FunctionSpec,
    k: u32,
    dimension: u32,
) -> Result<ConditionReport> {
    let params = HessianParams::new(dimension, k)?;
    if p.arity() != 1 {
        return Err(Error::Invalid("weight p must have arity 1".into()));
    }
    let tail = largeness_tail(p, &params)?;
    let verdict = map_convergence_to_divergence_condition(tail.verdict);
    Ok(ConditionReport {
        condition: ConditionId::Eq12,
        verdict,
        evidence: Evidence {
            detail: largeness_detail(verdict, "the weight p"),
            tails: vec![NamedTail {
                label: "weight-largeness".into(),
                tail,
            }],
            ..Evidence::default()
        },
    })
}

/// Checks the system weight largeness condition (EQ12S): both integrals
/// must diverge; one convergent integral names itself as blocking.
pub fn check_weight_largeness_system(
    p: &FunctionSpec,
    q: &FunctionSpec,
    k: u32,
    dimension: u32,
) -> Result<ConditionReport> {
    let params = HessianParams::new(dimension, k)?;
    if p.arity() != 1 || q.arity() != 1 {
        return Err(Error::Invalid("weights must have arity 1".into()));
    }
    let tail_p = largeness_tail(p, &params)?;
    let tail_q = largeness_tail(q, &params)?;
    let v_p = map_convergence_to_divergence_condition(tail_p.verdict);
    let v_q = map_convergence_to_divergence_condition(tail_q.verdict);
    let verdict = match (v_p, v_q) {
        (Verdict::Holds, Verdict::Holds) => Verdict::Holds,
        (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
        _ => Verdict::Inconclusive,
    };
    let detail = match verdict {
        Verdict::Holds => {
            "both largeness integrals diverge: every entire solution pair is \
             unbounded at infinity"
                .to_string()
        }
        Verdict::Fails => {
            if v_p == Verdict::Fails {
                "the largeness integral for weight p (first equation) \
                 converges, blocking system largeness"
                    .to_string()
            } else {
                "the largeness integral for weight q (second equation) \
                 converges, blocking system largeness"
                    .to_string()
            }
        }
        Verdict::Inconclusive => {
            let which = if v_p == Verdict::Inconclusive { "p" } else { "q" };
            format!(
                "the largeness integral for weight {which} sits in the \
                 critical band; no verdict"
            )
        }
    };
    Ok(ConditionReport {
        condition: ConditionId::Eq12s,
        verdict,
        evidence: Evidence {
            detail,
            tails: vec![
                NamedTail {
                    label: "weight-largeness[p]".into(),
                    tail: tail_p,
                },
                NamedTail {
                    label: "weight-largeness[q]".into(),
                    tail: tail_q,
                },
            ],
            items: vec![
                ItemVerdict {
                    label: "p".into(),
                    verdict: v_p,
                },
                ItemVerdict {
                    label: "q".into(),
                    verdict: v_q,
                },
            ],
            ..Evidence::default()
        },
    })
}

// ---------------------------------------------------------------------------
// Necessary condition for largeness (EQ13 / EQ13S)
// ---------------------------------------------------------------------------

fn invert(v: Verdict) -> Verdict {
    match v {
        Verdict::Holds => Verdict::Fails,
        Verdict::Fails => Verdict::Holds,
        Verdict::Inconclusive => Verdict::Inconclusive,
    }
}

/// Checks the necessary condition satisfied whenever all entire solutions
/// are large: either the decay integral diverges for every epsilon (the
/// decay condition fails), or the order `k` exceeds the dimensional gate.
pub fn necessary_condition(
    weights: &[&FunctionSpec],
    k: u32,
    dimension: u32,
    epsilon_grid: &[f64],
) -> Result<ConditionReport> {
    let condition = match weights.len() {
        1 => ConditionId::Eq13,
        2 => ConditionId::Eq13s,
        n => {
            return Err(Error::Invalid(format!(
                "the necessary condition takes 1 or 2 weights, got {n}"
            )))
        }
    };
    HessianParams::new(dimension, k)?;
    let decay = check_weight_decay(weights, k, epsilon_grid)?;
    let item1 = invert(decay.verdict);
    let k_max = admissible_k_max(dimension)?;
    let item2 = if k > k_max { Verdict::Holds } else { Verdict::Fails };
    let verdict = if item1 == Verdict::Holds || item2 == Verdict::Holds {
        Verdict::Holds
    } else if item1 == Verdict::Fails && item2 == Verdict::Fails {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };
    let detail = match verdict {
        Verdict::Holds => {
            if item1 == Verdict::Holds {
                "holds: the decay integral diverges for every sampled epsilon".to_string()
            } else {
                format!(
                    "holds: the order k = {k} exceeds the dimensional gate {k_max}"
                )
            }
        }
        Verdict::Fails => format!(
            "fails: the decay integral converges for some epsilon and \
             k = {k} lies within the dimensional gate {k_max}"
        ),
        Verdict::Inconclusive => {
            "the decay integral could not be classified and the gate alone \
             does not decide"
                .to_string()
        }
    };
    Ok(ConditionReport {
        condition,
        verdict,
        evidence: Evidence {
            detail,
            tails: decay.evidence.tails,
            items: vec![
                ItemVerdict {
                    label: "decay integral diverges for every epsilon".into(),
                    verdict: item1,
                },
                ItemVerdict {
                    label: format!("order k = {k} exceeds the dimensional gate {k_max}"),
                    verdict: item2,
                },
            ],
            ..Evidence::default()
        },
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn f1(src: &str) -> FunctionSpec {
        FunctionSpec::parse(src, 1).expect(src)
    }

    fn f2(src: &str) -> FunctionSpec {
        FunctionSpec::parse(src, 2).expect(src)
    }

    #[test]
    fn admissible_orders_by_dimension() {
        for (n, want) in [(3, 1), (4, 1), (5, 2), (6, 2), (7, 3)] {
            assert_eq!(admissible_k_max(n).unwrap(), want, "N = {n}");
        }
        assert!(admissible_k_max(2).is_err());
    }

    #[test]
    fn gate_verdicts() {
        assert_eq!(dimension_gate(1, 3).unwrap().verdict, Verdict::Holds);
        assert_eq!(dimension_gate(2, 3).unwrap().verdict, Verdict::Fails);
        assert_eq!(dimension_gate(2, 5).unwrap().verdict, Verdict::Holds);
        assert_eq!(dimension_gate(3, 6).unwrap().verdict, Verdict::Fails);
        assert_eq!(dimension_gate(3, 7).unwrap().verdict, Verdict::Holds);
        assert!(dimension_gate(0, 3).is_err());
        assert!(dimension_gate(5, 3).is_err());
    }

    #[test]
    fn condition_id_names_roundtrip() {
        for id in ConditionId::ALL {
            assert_eq!(id.name().parse::<ConditionId>().unwrap(), id);
            assert_eq!(
                serde_json::to_string(&id).unwrap(),
                format!("\"{}\"", id.name())
            );
            assert_eq!(format!("{id}"), id.name());
        }
        assert_eq!("eq5s".parse::<ConditionId>().unwrap(), ConditionId::Eq5s);
        assert!(" gate ".parse::<ConditionId>().is_ok());
        assert!("bogus".parse::<ConditionId>().is_err());
    }

    #[test]
    fn weight_monotonicity_truth_table() {
        let one = f1("1");
        let pow = f1("(1+t)^(-5/2)");
        let exp = f1("exp(-t)");
        for (n, k) in [(3u32, 1u32), (5, 2), (3, 2)] {
            let r = check_weight_monotonicity(&[&one], k, n).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "p=1, N={n}, k={k}");
            assert_eq!(r.evidence.threshold_radius, Some(0.0));
        }
        assert_eq!(
            check_weight_monotonicity(&[&pow], 1, 3).unwrap().verdict,
            Verdict::Holds
        );
        assert_eq!(
            check_weight_monotonicity(&[&pow], 2, 5).unwrap().verdict,
            Verdict::Holds
        );
        let fails = check_weight_monotonicity(&[&pow], 2, 3).unwrap();
        assert_eq!(fails.verdict, Verdict::Fails);
        assert!(fails.evidence.witness.is_some());
        for (n, k) in [(3u32, 1u32), (5, 2), (3, 2)] {
            let r = check_weight_monotonicity(&[&exp], k, n).unwrap();
            assert_eq!(r.verdict, Verdict::Fails, "p=exp(-t), N={n}, k={k}");
        }
    }

    #[test]
    fn weight_monotonicity_threshold_after_bump() {
        // A sharp bump near r = 1 makes the profile dip before resuming
        // growth; the condition holds from a positive threshold radius.
        let bump = f1("1 + 100*exp(-10*(t-1)^2)");
        let r = check_weight_monotonicity(&[&bump], 1, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let thr = r.evidence.threshold_radius.unwrap();
        assert!(thr > 0.0 && thr < 1e3, "threshold {thr}");
    }

    #[test]
    fn weight_monotonicity_system_id() {
        let one = f1("1");
        let r = check_weight_monotonicity(&[&one, &one], 1, 3).unwrap();
        assert_eq!(r.condition, ConditionId::P3);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn nonlinearity_scalar_truth_table() {
        assert_eq!(
            check_nonlinearity_scalar(&f1("u")).unwrap().verdict,
            Verdict::Holds
        );
        assert_eq!(
            check_nonlinearity_scalar(&f1("u^2")).unwrap().verdict,
            Verdict::Holds
        );
        assert_eq!(
            check_nonlinearity_scalar(&f1("sqrt(u)")).unwrap().verdict,
            Verdict::Holds
        );
        // Vanishes on (0, 1): not strictly positive.
        let r = check_nonlinearity_scalar(&f1("max(u-1,0)")).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.evidence.detail.contains("positive"));
        // Nonzero at the origin.
        assert_eq!(
            check_nonlinearity_scalar(&f1("u+1")).unwrap().verdict,
            Verdict::Fails
        );
        // Dips negative.
        let r = check_nonlinearity_scalar(&f1("u*(u-2)")).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
    }

    #[test]
    fn nonlinearity_system_truth_table() {
        let avg = f2("(u+v)/2");
        let r = check_nonlinearity_system(&avg, &avg).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.evidence.items.len(), 2);

        let zero = f2("0");
        let r = check_nonlinearity_system(&zero, &avg).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert_eq!(r.evidence.items[0].verdict, Verdict::Fails);
        assert_eq!(r.evidence.items[1].verdict, Verdict::Holds);

        // Clears the origin and positivity stages but dips in u, so the
        // report must carry a concrete monotonicity witness.
        let dipping = f2("v + u*max(1-u,0)");
        let r = check_nonlinearity_system(&dipping, &avg).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.evidence.witness.is_some());

        let shifted = f2("u+v+1");
        assert_eq!(
            check_nonlinearity_system(&shifted, &avg).unwrap().verdict,
            Verdict::Fails
        );

        let prod = f2("u*v");
        assert_eq!(
            check_nonlinearity_system(&prod, &prod).unwrap().verdict,
            Verdict::Holds
        );
    }

    #[test]
    fn keller_osserman_gamma_table() {
        // For h = t^γ the integral diverges exactly when γ ≤ 1.
        for k in [1u32, 2] {
            assert_eq!(
                check_keller_osserman_scalar(&f1("u^0.5"), k).unwrap().verdict,
                Verdict::Holds,
                "gamma=0.5, k={k}"
            );
            assert_eq!(
                check_keller_osserman_scalar(&f1("u"), k).unwrap().verdict,
                Verdict::Holds,
                "gamma=1, k={k}"
            );
            assert_eq!(
                check_keller_osserman_scalar(&f1("u^2"), k).unwrap().verdict,
                Verdict::Fails,
                "gamma=2, k={k}"
            );
        }
        assert!(matches!(
            check_keller_osserman_scalar(&f1("0"), 1),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn keller_osserman_system_cases() {
        let avg = f2("(u+v)/2");
        assert_eq!(
            check_keller_osserman_system(&avg, &avg, 1).unwrap().verdict,
            Verdict::Holds
        );
        let prod = f2("u*v");
        assert_eq!(
            check_keller_osserman_system(&prod, &prod, 1).unwrap().verdict,
            Verdict::Fails
        );
    }

    #[test]
    fn weight_decay_truth_table() {
        let one = f1("1");
        let pow = f1("(1+t)^(-5/2)");
        let exp = f1("exp(-t)");
        for k in [1u32, 2] {
            let r = check_weight_decay(&[&one], k, &DEFAULT_EPSILON_GRID).unwrap();
            assert_eq!(r.verdict, Verdict::Fails, "p=1, k={k}");
            assert!(r.evidence.epsilon_found.is_none());

            let r = check_weight_decay(&[&pow], k, &DEFAULT_EPSILON_GRID).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "p=(1+t)^(-5/2), k={k}");
            assert_eq!(r.evidence.epsilon_found, Some(0.01));

            let r = check_weight_decay(&[&exp], k, &DEFAULT_EPSILON_GRID).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "p=exp(-t), k={k}");
            assert_eq!(r.evidence.epsilon_found, Some(0.01));
        }
        // Two weights: the slower-decaying one dominates the sum.
        let r = check_weight_decay(&[&pow, &exp], 1, &DEFAULT_EPSILON_GRID).unwrap();
        assert_eq!(r.condition, ConditionId::Eq5s);
        assert_eq!(r.verdict, Verdict::Holds);
        let r = check_weight_decay(&[&one, &exp], 1, &DEFAULT_EPSILON_GRID).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
    }

    #[test]
    fn weight_largeness_truth_table() {
        let one = f1("1");
        let pow = f1("(1+t)^(-5/2)");
        let exp = f1("exp(-t)");
        let expect = [
            ((3u32, 1u32), [Verdict::Holds, Verdict::Fails, Verdict::Fails]),
            ((5, 2), [Verdict::Holds, Verdict::Fails, Verdict::Fails]),
            ((3, 2), [Verdict::Holds, Verdict::Holds, Verdict::Holds]),
        ];
        for ((n, k), wants) in expect {
            for (p, want) in [&one, &pow, &exp].into_iter().zip(wants) {
                let r = check_weight_largeness_scalar(p, k, n).unwrap();
                assert_eq!(
                    r.verdict,
                    want,
                    "p = {}, N = {n}, k = {k}",
                    p.source()
                );
            }
        }
    }

    #[test]
    fn weight_largeness_system_blocking() {
        let one = f1("1");
        let exp = f1("exp(-t)");
        let r = check_weight_largeness_system(&one, &exp, 1, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.evidence.detail.contains("weight q"));
        assert_eq!(r.evidence.items[0].verdict, Verdict::Holds);
        assert_eq!(r.evidence.items[1].verdict, Verdict::Fails);

        let r = check_weight_largeness_system(&one, &one, 2, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.evidence.tails.len(), 2);
    }

    #[test]
    fn necessary_condition_disjunction() {
        let one = f1("1");
        let pow = f1("(1+t)^(-5/2)");
        // Decay fails for p = 1, so the necessary condition holds.
        let r = necessary_condition(&[&one], 1, 3, &DEFAULT_EPSILON_GRID).unwrap();
        assert_eq!(r.condition, ConditionId::Eq13);
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.evidence.items[0].verdict, Verdict::Holds);
        // Decay holds and k sits inside the gate: both items fail.
        let r = necessary_condition(&[&pow], 1, 3, &DEFAULT_EPSILON_GRID).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        // k = 2 exceeds the gate for N = 3: the second item rescues it.
        let r = necessary_condition(&[&pow], 2, 3, &DEFAULT_EPSILON_GRID).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.evidence.items[1].verdict, Verdict::Holds);
        // Two weights use the system identifier.
        let r = necessary_condition(&[&pow, &pow], 1, 3, &DEFAULT_EPSILON_GRID).unwrap();
        assert_eq!(r.condition, ConditionId::Eq13s);
    }
}
