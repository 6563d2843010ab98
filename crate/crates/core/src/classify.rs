//! The theorem engine: combines condition verdicts into the strongest
//! existence/largeness statement the theory licenses for a given problem,
//! with a complete per-hypothesis ledger for every branch.
//!
//! Four families of statements are tracked, each in a scalar and a system
//! form:
//!
//! - **T1 / T3** — under the dimensional gate, eventual weight
//!   monotonicity, the nonlinearity shape conditions, a divergent
//!   Keller–Osserman integral, and the weight decay condition, the problem
//!   has a nonnegative nontrivial radial *bounded* solution.
//! - **T2-existence / T4-existence** — the shape and Keller–Osserman
//!   hypotheses alone already yield a nonnegative nontrivial *entire*
//!   radial solution, bounded or not.
//! - **T2-largeness / T4-largeness** — eventually monotone weights whose
//!   largeness integrals diverge force every nonnegative nontrivial entire
//!   solution to be large.
//! - **T2-converse / T4-converse** — when the caller *asserts* that a
//!   large solution exists, the necessary condition (the decay integral
//!   diverges for every ε, or the order k exceeds the gate) must hold;
//!   it is evaluated only on request.
//!
//! Inconclusive condition verdicts block applicability: the engine never
//! over-claims a theorem, and a three-valued check that cannot decide
//! leaves the branch `NotApplicable` with the blocking condition named.

use serde::Serialize;

use crate::conditions::{self, ConditionId, ConditionReport, Verdict, DEFAULT_EPSILON_GRID};
use crate::picard::{ProblemSpec, SystemSpec};
use crate::Result;

/// Identifier of one theorem branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TheoremId {
    /// Bounded radial solution for the scalar equation.
    T1,
    /// Entire radial solution for the scalar equation.
    #[serde(rename = "T2-existence")]
    T2Existence,
    /// Every nontrivial entire solution of the scalar equation is large.
    #[serde(rename = "T2-largeness")]
    T2Largeness,
    /// Necessary condition given a large scalar solution.
    #[serde(rename = "T2-converse")]
    T2Converse,
    /// Bounded radial solution pair for the system.
    T3,
    /// Entire radial solution pair for the system.
    #[serde(rename = "T4-existence")]
    T4Existence,
    /// Every nontrivial entire solution pair of the system is large.
    #[serde(rename = "T4-largeness")]
    T4Largeness,
    /// Necessary condition given a large system solution.
    #[serde(rename = "T4-converse")]
    T4Converse,
}

impl TheoremId {
    /// The wire/display name of the branch.
    pub fn name(self) -> &'static str {
        match self {
            TheoremId::T1 => "T1",
            TheoremId::T2Existence => "T2-existence",
            TheoremId::T2Largeness => "T2-largeness",
            TheoremId::T2Converse => "T2-converse",
            TheoremId::T3 => "T3",
            TheoremId::T4Existence => "T4-existence",
            TheoremId::T4Largeness => "T4-largeness",
            TheoremId::T4Converse => "T4-converse",
        }
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// What a theorem branch concludes when it applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Conclusion {
    /// A nonnegative nontrivial radial bounded solution exists.
    BoundedSolutionExists,
    /// A nonnegative nontrivial entire radial solution exists.
    EntireSolutionExists,
    /// Every nonnegative nontrivial entire solution is large.
    AllSolutionsLarge,
    /// The necessary conditions for largeness hold.
    NecessaryConditionsHold,
    /// The branch's hypotheses are not all certified.
    NotApplicable,
}

/// The outcome of one theorem branch on one problem.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremVerdict {
    /// Which branch this verdict is about.
    pub theorem: TheoremId,
    /// True exactly when every hypothesis in the ledger `Holds`.
    pub applicable: bool,
    /// The licensed conclusion, or `NotApplicable`.
    pub conclusion: Conclusion,
    /// First hypothesis that is not certified, when any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocking: Option<ConditionId>,
    /// Full report for every hypothesis of the branch, in statement order.
    pub hypotheses: Vec<ConditionReport>,
    /// Human-oriented context (e.g. why a branch was not evaluated).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Knobs for classification.
#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Assert that a large solution exists, enabling the converse branches.
    pub assume_large: bool,
    /// Epsilon ladder for the decay conditions; empty falls back to the
    /// default grid.
    pub epsilon_grid: Vec<f64>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            assume_large: false,
            epsilon_grid: DEFAULT_EPSILON_GRID.to_vec(),
        }
    }
}

impl ClassifyOptions {
    fn epsilons(&self) -> &[f64] {
        if self.epsilon_grid.is_empty() {
            &DEFAULT_EPSILON_GRID
        } else {
            &self.epsilon_grid
        }
    }
}

/// Builds a branch verdict from its hypothesis ledger: applicable exactly
/// when every hypothesis `Holds`, otherwise `NotApplicable` with the first
/// uncertified condition named.
fn theorem_verdict(
    theorem: TheoremId,
    conclusion_when_applicable: Conclusion,
    hypotheses: Vec<ConditionReport>,
    note: Option<String>,
) -> TheoremVerdict {
    let blocking = hypotheses
        .iter()
        .find(|h| h.verdict != Verdict::Holds)
        .map(|h| h.condition);
    let applicable = blocking.is_none();
    TheoremVerdict {
        theorem,
        applicable,
        conclusion: if applicable {
            conclusion_when_applicable
        } else {
            Conclusion::NotApplicable
        },
        blocking,
        hypotheses,
        note,
    }
}

/// Builds the converse branch: skipped (with a note) unless the caller
/// asserts a large solution, in which case the necessary condition is
/// evaluated and becomes the single ledger entry.
fn converse_verdict(
    theorem: TheoremId,
    assume_large: bool,
    necessary: impl FnOnce() -> Result<ConditionReport>,
) -> Result<TheoremVerdict> {
    if !assume_large {
        return Ok(TheoremVerdict {
            theorem,
            applicable: false,
            conclusion: Conclusion::NotApplicable,
            blocking: None,
            hypotheses: Vec::new(),
            note: Some(
                "evaluated only when a large solution is asserted; set \
                 assume_large to run the necessary-condition check"
                    .into(),
            ),
        });
    }
    Ok(theorem_verdict(
        theorem,
        Conclusion::NecessaryConditionsHold,
        vec![necessary()?],
        None,
    ))
}

/// Classifies a scalar problem against every scalar theorem branch.
///
/// The returned list always contains, in order: `T1`, `T2-existence`,
/// `T2-largeness`, and `T2-converse`.
pub fn classify_scalar(
    problem: &ProblemSpec,
    options: &ClassifyOptions,
) -> Result<Vec<TheoremVerdict>> {
    problem.validate()?;
    let (k, n) = (problem.k, problem.dimension);
    let eps = options.epsilons();

    let gate = conditions::dimension_gate(k, n)?;
    let p2 = conditions::check_weight_monotonicity(&[&problem.p], k, n)?;
    let c1 = conditions::check_nonlinearity_scalar(&problem.h)?;
    let c3 = conditions::check_keller_osserman_scalar(&problem.h, k)?;
    let eq5 = conditions::check_weight_decay(&[&problem.p], k, eps)?;
    let eq12 = conditions::check_weight_largeness_scalar(&problem.p, k, n)?;

    let t1 = theorem_verdict(
        TheoremId::T1,
        Conclusion::BoundedSolutionExists,
        vec![
            gate,
            p2.clone(),
            c1.clone(),
            c3.clone(),
            eq5,
        ],
        None,
    );
    let t2_existence = theorem_verdict(
        TheoremId::T2Existence,
        Conclusion::EntireSolutionExists,
        vec![c1, c3],
        None,
    );
    let existence_note = (!t2_existence.applicable).then(|| {
        "largeness presumes an entire solution exists, which the \
         T2-existence hypotheses did not certify here"
            .to_string()
    });
    let t2_largeness = theorem_verdict(
        TheoremId::T2Largeness,
        Conclusion::AllSolutionsLarge,
        vec![p2, eq12],
        existence_note,
    );
    let t2_converse = converse_verdict(TheoremId::T2Converse, options.assume_large, || {
        conditions::necessary_condition(&[&problem.p], k, n, eps)
    })?;
    Ok(vec![t1, t2_existence, t2_largeness, t2_converse])
}

/// Classifies a two-component system against every system theorem branch.
///
/// The returned list always contains, in order: `T3`, `T4-existence`,
/// `T4-largeness`, and `T4-converse`.
pub fn classify_system(
    system: &SystemSpec,
    options: &ClassifyOptions,
) -> Result<Vec<TheoremVerdict>> {
    system.validate()?;
    let (k, n) = (system.k, system.dimension);
    let eps = options.epsilons();

    let gate = conditions::dimension_gate(k, n)?;
    let p3 = conditions::check_weight_monotonicity(&[&system.p, &system.q], k, n)?;
    let c2 = conditions::check_nonlinearity_system(&system.f, &system.g)?;
    let c4 = conditions::check_keller_osserman_system(&system.f, &system.g, k)?;
    let eq5s = conditions::check_weight_decay(&[&system.p, &system.q], k, eps)?;
    let eq12s = conditions::check_weight_largeness_system(&system.p, &system.q, k, n)?;

    let t3 = theorem_verdict(
        TheoremId::T3,
        Conclusion::BoundedSolutionExists,
        vec![
            gate,
            p3.clone(),
            c2.clone(),
            c4.clone(),
            eq5s,
        ],
        None,
    );
    let t4_existence = theorem_verdict(
        TheoremId::T4Existence,
        Conclusion::EntireSolutionExists,
        vec![c2, c4],
        None,
    );
    let existence_note = (!t4_existence.applicable).then(|| {
        "largeness presumes an entire solution pair exists, which the \
         T4-existence hypotheses did not certify here"
            .to_string()
    });
    let t4_largeness = theorem_verdict(
        TheoremId::T4Largeness,
        Conclusion::AllSolutionsLarge,
        vec![p3, eq12s],
        existence_note,
    );
    let t4_converse = converse_verdict(TheoremId::T4Converse, options.assume_large, || {
        conditions::necessary_condition(&[&system.p, &system.q], k, n, eps)
    })?;
    Ok(vec![t3, t4_existence, t4_largeness, t4_converse])
}
