// Copyright 2026 The Bunching Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Correlator inequalities on pairwise scenarios, their bounds, and the
//! exclusivity checks.
//!
//! Inequalities are raw correlator sums `Σ c_k ⟨A_i A_j⟩_k + offset`. On the
//! `n`-cycle the plain sum is bounded below by `−(n − 2)` for odd `n` by
//! noncontextual assignments, so KCBS (`n = 5`) has classical minimum `−3`
//! and Specker's triangle (`n = 3`) has classical minimum `−1`. Specker's
//! inequality is used in exactly this triangle-correlator normalization. The
//! no-disturbance and arithmetic minimum of both is `−n`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, MeasurementContext, Outcome, OutcomeTable, Scenario};
use crate::hv::DeterministicAssignment;
use crate::lp::LinearProgram;
use crate::{Error, Result, PROB_TOL};

/// Largest scenario accepted by [`classical_bound`].
pub const MAX_CLASSICAL_OBSERVABLES: usize = 24;
/// Largest LP accepted by [`nd_bound`], in variables.
pub const MAX_LP_VARIABLES: usize = 1000;
/// Tolerance for comparing LP optima.
pub const BOUND_TOL: f64 = 1e-7;
/// Quantum minimum of the KCBS correlator sum, `5 − 4√5`. Reference value
/// only; nothing in this crate optimizes over quantum states.
pub const KCBS_QUANTUM_MIN: f64 = 5.0 - 4.0 * 2.236_067_977_499_79;

/// The `n`-cycle scenario: `n ≥ 3` observables, contexts `(A_i, A_{i+1 mod n})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleScenario {
    n: usize,
}

impl CycleScenario {
    pub fn new(n: usize) -> Result<Self> {
        Scenario::cycle(n)?;
        Ok(Self { n })
    }

    /// KCBS pentagon.
    pub fn kcbs() -> Self {
        Self { n: 5 }
    }

    /// Specker's triangle.
    ///
    /// Normalized as the plain correlator sum `E_12 + E_23 + E_31`, so the
    /// classical minimum is −1 and the algebraic minimum is −3. Other
    /// normalizations (e.g. the probability that two outcomes differ) are an
    /// affine rescaling of this one.
    pub fn specker() -> Self {
        Self { n: 3 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::cycle(self.n).expect("n validated at construction")
    }

    /// `Σ_i ⟨A_i A_{i+1}⟩`.
    pub fn correlator_sum(&self) -> InequalityExpr {
        InequalityExpr::sum_of_correlators(&self.scenario())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub context: MeasurementContext,
    pub coefficient: f64,
}

/// `Σ coefficient · ⟨A_i A_j⟩ + offset`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityExpr {
    pub terms: Vec<Term>,
    #[serde(default)]
    pub offset: f64,
}

impl InequalityExpr {
    pub fn new(terms: Vec<Term>, offset: f64) -> Self {
        Self { terms, offset }
    }

    /// Unit coefficient on every context of `scenario`.
    pub fn sum_of_correlators(scenario: &Scenario) -> Self {
        Self {
            terms: scenario
                .contexts()
                .iter()
                .map(|&context| Term {
                    context,
                    coefficient: 1.0,
                })
                .collect(),
            offset: 0.0,
        }
    }

    /// Checks that every term refers to a context of `scenario`.
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if !self.offset.is_finite() {
            return Err(Error::validation("inequality offset is not finite"));
        }
        for t in &self.terms {
            if !t.coefficient.is_finite() {
                return Err(Error::validation(format!("coefficient for {} is not finite", t.context)));
            }
            if scenario.find(&t.context).is_none() {
                return Err(Error::validation(format!(
                    "inequality term {} is not a context of the scenario",
                    t.context
                )));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, b: &Behavior) -> Result<f64> {
        let mut acc = self.offset;
        for t in &self.terms {
            acc += t.coefficient * correlator(b, &t.context)?;
        }
        Ok(acc)
    }

    /// Value on the point-mass behavior of `a`, without building it.
    pub fn evaluate_deterministic(&self, a: &DeterministicAssignment) -> Result<f64> {
        let mut acc = self.offset;
        for t in &self.terms {
            let [i, j] = t.context.observables();
            let (Some(vi), Some(vj)) = (a.get(i), a.get(j)) else {
                return Err(Error::Coverage {
                    observable: i.max(j) + 1,
                });
            };
            acc += t.coefficient * f64::from(vi.value() * vj.value());
        }
        Ok(acc)
    }
}

/// `⟨A_i A_j⟩ = p(++) + p(−−) − p(+−) − p(−+)`.
pub fn correlator(b: &Behavior, ctx: &MeasurementContext) -> Result<f64> {
    Ok(b.table(ctx)?.correlator().clamp(-1.0, 1.0))
}

/// Sum of the correlators along the edges of the cycle.
pub fn cycle_value(b: &Behavior, cycle: &CycleScenario) -> Result<f64> {
    cycle.correlator_sum().evaluate(b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBound {
    pub min: f64,
    pub max: f64,
    /// Lowest-index assignment attaining the minimum.
    pub argmin: DeterministicAssignment,
    pub argmax: DeterministicAssignment,
}

/// Extrema of `expr` over all `2^n` deterministic noncontextual assignments.
pub fn classical_bound(scenario: &Scenario, expr: &InequalityExpr) -> Result<ClassicalBound> {
    expr.validate(scenario)?;
    let n = scenario.observables();
    if n > MAX_CLASSICAL_OBSERVABLES {
        return Err(Error::SizeLimit {
            what: "observables for classical enumeration",
            actual: n,
            cap: MAX_CLASSICAL_OBSERVABLES,
        });
    }
    let terms: Vec<(usize, usize, f64)> = expr
        .terms
        .iter()
        .map(|t| (t.context.first(), t.context.second(), t.coefficient))
        .collect();
    let value = |index: u64| -> f64 {
        let v = |k: usize| if index >> k & 1 == 0 { 1.0 } else { -1.0 };
        terms.iter().fold(expr.offset, |acc, &(i, j, c)| acc + c * v(i) * v(j))
    };

    // (min, argmin, max, argmax); ties resolve to the lower index so the
    // reduction order does not matter.
    type Extrema = (f64, u64, f64, u64);
    let combine = |a: Extrema, b: Extrema| -> Extrema {
        let (min, argmin) = if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { (b.0, b.1) } else { (a.0, a.1) };
        let (max, argmax) = if b.2 > a.2 || (b.2 == a.2 && b.3 < a.3) { (b.2, b.3) } else { (a.2, a.3) };
        (min, argmin, max, argmax)
    };
    let (min, argmin, max, argmax) = (0..1u64 << n)
        .into_par_iter()
        .map(|i| {
            let v = value(i);
            (v, i, v, i)
        })
        .reduce(|| (f64::INFINITY, u64::MAX, f64::NEG_INFINITY, u64::MAX), combine);

    Ok(ClassicalBound {
        min,
        max,
        argmin: DeterministicAssignment::from_index(n, argmin),
        argmax: DeterministicAssignment::from_index(n, argmax),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdBound {
    pub min: f64,
    pub max: f64,
    pub min_behavior: Behavior,
    pub max_behavior: Behavior,
}

/// Builds the no-disturbance polytope LP for `expr`. Variables are the four
/// outcome probabilities of each context, in scenario order.
fn nd_program(scenario: &Scenario, expr: &InequalityExpr) -> Result<LinearProgram> {
    let contexts = scenario.contexts();
    let nvars = 4 * contexts.len();
    if nvars > MAX_LP_VARIABLES {
        return Err(Error::SizeLimit {
            what: "no-disturbance LP variables",
            actual: nvars,
            cap: MAX_LP_VARIABLES,
        });
    }
    let mut objective = vec![0.0; nvars];
    for t in &expr.terms {
        let k = scenario.find(&t.context).expect("validated");
        // pp, pm, mp, mm
        for (slot, sign) in [1.0, -1.0, -1.0, 1.0].into_iter().enumerate() {
            objective[4 * k + slot] += t.coefficient * sign;
        }
    }
    let mut lp = LinearProgram::new(objective);
    for k in 0..contexts.len() {
        let mut row = vec![0.0; nvars];
        row[4 * k..4 * k + 4].fill(1.0);
        lp.add_equality(row, 1.0)?;
    }
    // P(A = +1) agrees between consecutive contexts containing A.
    for obs in 0..scenario.observables() {
        let plus_slots: Vec<[usize; 2]> = contexts
            .iter()
            .enumerate()
            .filter_map(|(k, c)| {
                if c.first() == obs {
                    Some([4 * k, 4 * k + 1])
                } else if c.second() == obs {
                    Some([4 * k, 4 * k + 2])
                } else {
                    None
                }
            })
            .collect();
        for w in plus_slots.windows(2) {
            let mut row = vec![0.0; nvars];
            for s in w[0] {
                row[s] += 1.0;
            }
            for s in w[1] {
                row[s] -= 1.0;
            }
            lp.add_equality(row, 0.0)?;
        }
    }
    Ok(lp)
}

fn behavior_from_lp(scenario: &Scenario, x: &[f64]) -> Result<Behavior> {
    let tables = x
        .chunks(4)
        .map(|c| {
            let total: f64 = c.iter().map(|v| v.max(0.0)).sum();
            OutcomeTable {
                pp: c[0].max(0.0) / total,
                pm: c[1].max(0.0) / total,
                mp: c[2].max(0.0) / total,
                mm: c[3].max(0.0) / total,
            }
        })
        .collect();
    Behavior::new(scenario.clone(), tables)
}

/// Extrema of `expr` over the no-disturbance polytope, with the optimal
/// behaviors.
pub fn nd_bound(scenario: &Scenario, expr: &InequalityExpr) -> Result<NdBound> {
    expr.validate(scenario)?;
    let lp = nd_program(scenario, expr)?;
    let lo = lp.minimize()?;
    let hi = lp.maximize()?;
    Ok(NdBound {
        min: lo.objective + expr.offset,
        max: hi.objective + expr.offset,
        min_behavior: behavior_from_lp(scenario, &lo.x)?,
        max_behavior: behavior_from_lp(scenario, &hi.x)?,
    })
}

/// Term-wise extremes: `offset ∓ Σ |c|`.
pub fn arithmetic_bound(expr: &InequalityExpr) -> (f64, f64) {
    let spread: f64 = expr.terms.iter().map(|t| t.coefficient.abs()).sum();
    (expr.offset - spread, expr.offset + spread)
}

/// All six bounds of an inequality, with attaining assignments and behaviors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub classical_min: f64,
    pub classical_max: f64,
    pub nd_min: f64,
    pub nd_max: f64,
    pub arithmetic_min: f64,
    pub arithmetic_max: f64,
    pub classical_min_assignment: DeterministicAssignment,
    pub classical_max_assignment: DeterministicAssignment,
    pub nd_min_behavior: Behavior,
    pub nd_max_behavior: Behavior,
}

impl BoundsReport {
    pub fn compute(scenario: &Scenario, expr: &InequalityExpr) -> Result<Self> {
        let classical = classical_bound(scenario, expr)?;
        let nd = nd_bound(scenario, expr)?;
        let (arithmetic_min, arithmetic_max) = arithmetic_bound(expr);
        let report = Self {
            classical_min: classical.min,
            classical_max: classical.max,
            nd_min: nd.min,
            nd_max: nd.max,
            arithmetic_min,
            arithmetic_max,
            classical_min_assignment: classical.argmin,
            classical_max_assignment: classical.argmax,
            nd_min_behavior: nd.min_behavior,
            nd_max_behavior: nd.max_behavior,
        };
        if !report.ordering_holds() {
            return Err(Error::Internal(format!(
                "bound ordering violated: arithmetic [{}, {}], nd [{}, {}], classical [{}, {}]",
                report.arithmetic_min, report.arithmetic_max, report.nd_min, report.nd_max,
                report.classical_min, report.classical_max
            )));
        }
        Ok(report)
    }

    /// `arithmetic_min ≤ nd_min ≤ classical_min ≤ classical_max ≤ nd_max ≤ arithmetic_max`
    /// up to [`BOUND_TOL`].
    pub fn ordering_holds(&self) -> bool {
        let chain = [
            self.arithmetic_min,
            self.nd_min,
            self.classical_min,
            self.classical_max,
            self.nd_max,
            self.arithmetic_max,
        ];
        chain.windows(2).all(|w| w[0] <= w[1] + BOUND_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoDisturbanceReport {
    pub pass: bool,
    /// One-based label of the observable with the largest gap, if any
    /// observable appears in more than one context.
    pub worst_observable: Option<usize>,
    pub max_gap: f64,
}

/// Checks that every observable's marginal agrees across its contexts.
pub fn no_disturbance_check(b: &Behavior, tol: f64) -> NoDisturbanceReport {
    let mut worst: Option<(usize, f64)> = None;
    for obs in 0..b.scenario().observables() {
        let marginals = b.marginals(obs);
        if marginals.len() < 2 {
            continue;
        }
        let (lo, hi) = marginals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, m)| (lo.min(*m), hi.max(*m)));
        let gap = hi - lo;
        if worst.is_none_or(|(_, g)| gap > g) {
            worst = Some((obs, gap));
        }
    }
    let max_gap = worst.map_or(0.0, |(_, g)| g);
    NoDisturbanceReport {
        pass: max_gap <= tol,
        worst_observable: worst.map(|(o, _)| o + 1),
        max_gap,
    }
}

/// An outcome assignment to both observables of one context.
///
/// JSON: `{"context": [1, 2], "values": {"1": 1, "2": -1}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "EventJson", into = "EventJson")]
pub struct Event {
    context: MeasurementContext,
    values: (Outcome, Outcome),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventJson {
    context: MeasurementContext,
    values: BTreeMap<String, Outcome>,
}

impl Event {
    pub fn new(context: MeasurementContext, first: Outcome, second: Outcome) -> Self {
        Self {
            context,
            values: (first, second),
        }
    }

    pub fn context(&self) -> &MeasurementContext {
        &self.context
    }

    /// Value this event assigns to `observable`, if it measures it.
    pub fn value_of(&self, observable: usize) -> Option<Outcome> {
        if observable == self.context.first() {
            Some(self.values.0)
        } else if observable == self.context.second() {
            Some(self.values.1)
        } else {
            None
        }
    }

    pub fn probability(&self, b: &Behavior) -> Result<f64> {
        Ok(b.table(&self.context)?.get(self.values.0, self.values.1))
    }
}

impl TryFrom<EventJson> for Event {
    type Error = Error;

    fn try_from(j: EventJson) -> Result<Self> {
        let [a, b] = j.context.labels();
        if j.values.len() != 2 {
            return Err(Error::validation(format!(
                "event on {} must assign exactly its two observables",
                j.context
            )));
        }
        let get = |label: usize| {
            j.values
                .get(&label.to_string())
                .copied()
                .ok_or_else(|| Error::validation(format!("event on {} misses A_{label}", j.context)))
        };
        Ok(Self::new(j.context, get(a)?, get(b)?))
    }
}

impl From<Event> for EventJson {
    fn from(e: Event) -> Self {
        let [a, b] = e.context.labels();
        EventJson {
            context: e.context,
            values: BTreeMap::from([(a.to_string(), e.values.0), (b.to_string(), e.values.1)]),
        }
    }
}

/// Counterfactual exclusivity: the events share an observable and assign it
/// different values.
pub fn are_exclusive(e1: &Event, e2: &Event) -> bool {
    e1.context
        .observables()
        .iter()
        .any(|&o| matches!((e1.value_of(o), e2.value_of(o)), (Some(a), Some(b)) if a != b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusivitySum {
    pub sum: f64,
    pub pairwise_exclusive: bool,
    /// `sum ≤ 1` up to the probability tolerance.
    pub satisfies_e: bool,
}

pub fn exclusivity_sum(b: &Behavior, events: &[Event]) -> Result<ExclusivitySum> {
    let mut sum = 0.0;
    for e in events {
        sum += e.probability(b)?;
    }
    let pairwise_exclusive = events
        .iter()
        .enumerate()
        .all(|(k, e)| events[..k].iter().all(|f| are_exclusive(e, f)));
    Ok(ExclusivitySum {
        sum,
        pairwise_exclusive,
        satisfies_e: sum <= 1.0 + PROB_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorSum {
    pub sum: f64,
    pub orthogonal: bool,
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Σ ⟨ψ|P_k|ψ⟩` together with whether the projectors are pairwise
/// orthogonal (`P_i P_j = 0`).
pub fn projector_exclusivity_sum(state: &DVector<Complex64>, projectors: &[DMatrix<Complex64>]) -> Result<ProjectorSum> {
    let d = state.len();
    if d == 0 || (state.norm() - 1.0).abs() > PROB_TOL {
        return Err(Error::validation(format!(
            "state must be a unit vector, has norm {}",
            state.norm()
        )));
    }
    for (k, p) in projectors.iter().enumerate() {
        if p.shape() != (d, d) {
            return Err(Error::Shape(format!(
                "projector {k} is {}x{}, state has dimension {d}",
                p.nrows(),
                p.ncols()
            )));
        }
        let herm = max_abs(&(p - p.adjoint()));
        let idem = max_abs(&(p * p - p));
        if herm > PROB_TOL || idem > PROB_TOL {
            return Err(Error::NotProjector(format!(
                "projector {k}: |P - P†| = {herm:e}, |P² - P| = {idem:e}"
            )));
        }
    }
    let orthogonal = projectors
        .iter()
        .enumerate()
        .all(|(k, p)| projectors[..k].iter().all(|q| max_abs(&(p * q)) <= PROB_TOL));
    let sum = projectors
        .iter()
        .map(|p| state.dotc(&(p * state)).re)
        .sum();
    Ok(ProjectorSum { sum, orthogonal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::{deterministic_behavior, lambda_exact_behavior, LambdaLaw};

    fn ctx(a: usize, b: usize) -> MeasurementContext {
        MeasurementContext::labeled(a, b).unwrap()
    }

    fn single_edge() -> (Scenario, InequalityExpr) {
        let s = Scenario::new(2, vec![ctx(1, 2)]).unwrap();
        let e = InequalityExpr::sum_of_correlators(&s);
        (s, e)
    }

    #[test]
    fn correlator_examples() {
        let s = Scenario::cycle(3).unwrap();
        let lam = lambda_exact_behavior(&s, &LambdaLaw::Uniform).unwrap();
        assert_eq!(correlator(&lam, &ctx(1, 2)).unwrap(), -1.0);
        let plus = deterministic_behavior(&DeterministicAssignment::new(vec![Outcome::Plus; 3]), &s).unwrap();
        assert_eq!(correlator(&plus, &ctx(2, 3)).unwrap(), 1.0);
        let q = OutcomeTable { pp: 0.25, pm: 0.25, mp: 0.25, mm: 0.25 };
        let uni = Behavior::new(s.clone(), vec![q; 3]).unwrap();
        assert_eq!(correlator(&uni, &ctx(3, 1)).unwrap(), 0.0);
        assert!(matches!(correlator(&uni, &ctx(1, 4)), Err(Error::MissingContext { .. })));
    }

    #[test]
    fn cycle_values() {
        for (n, v) in [(5, -5.0), (3, -3.0)] {
            let c = CycleScenario::new(n).unwrap();
            let b = lambda_exact_behavior(&c.scenario(), &LambdaLaw::Uniform).unwrap();
            assert_eq!(cycle_value(&b, &c).unwrap(), v);
        }
        let c = CycleScenario::kcbs();
        let plus = deterministic_behavior(&DeterministicAssignment::new(vec![Outcome::Plus; 5]), &c.scenario()).unwrap();
        assert_eq!(cycle_value(&plus, &c).unwrap(), 5.0);
        let tri = lambda_exact_behavior(&Scenario::cycle(3).unwrap(), &LambdaLaw::Uniform).unwrap();
        assert!(cycle_value(&tri, &c).is_err());
        assert!(CycleScenario::new(2).is_err());
    }

    #[test]
    fn classical_examples() {
        let k = CycleScenario::kcbs();
        let b = classical_bound(&k.scenario(), &k.correlator_sum()).unwrap();
        assert_eq!((b.min, b.max), (-3.0, 5.0));
        let t = CycleScenario::specker();
        let b = classical_bound(&t.scenario(), &t.correlator_sum()).unwrap();
        assert_eq!((b.min, b.max), (-1.0, 3.0));
        let (s, e) = single_edge();
        let b = classical_bound(&s, &e).unwrap();
        assert_eq!((b.min, b.max), (-1.0, 1.0));
        // Attaining assignment reproduces the minimum.
        assert_eq!(e.evaluate_deterministic(&b.argmin).unwrap(), -1.0);
    }

    #[test]
    fn classical_cap() {
        let s = Scenario::new(25, vec![MeasurementContext::new(0, 1).unwrap()]).unwrap();
        let e = InequalityExpr::sum_of_correlators(&s);
        assert!(matches!(classical_bound(&s, &e), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn nd_examples() {
        let k = CycleScenario::kcbs();
        let b = nd_bound(&k.scenario(), &k.correlator_sum()).unwrap();
        assert!((b.min + 5.0).abs() < BOUND_TOL && (b.max - 5.0).abs() < BOUND_TOL);
        let t = CycleScenario::specker();
        let b = nd_bound(&t.scenario(), &t.correlator_sum()).unwrap();
        assert!((b.min + 3.0).abs() < BOUND_TOL);
        let (s, e) = single_edge();
        let b = nd_bound(&s, &e).unwrap();
        assert!((b.min + 1.0).abs() < BOUND_TOL && (b.max - 1.0).abs() < BOUND_TOL);
    }

    #[test]
    fn nd_respects_offset_and_reevaluates() {
        let k = CycleScenario::kcbs();
        let mut e = k.correlator_sum();
        e.offset = 3.0;
        e.terms[0].coefficient = -2.0;
        let b = nd_bound(&k.scenario(), &e).unwrap();
        assert!((e.evaluate(&b.min_behavior).unwrap() - b.min).abs() < BOUND_TOL);
        assert!((e.evaluate(&b.max_behavior).unwrap() - b.max).abs() < BOUND_TOL);
        assert!(no_disturbance_check(&b.min_behavior, 1e-9).pass);
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(arithmetic_bound(&CycleScenario::kcbs().correlator_sum()), (-5.0, 5.0));
        assert_eq!(arithmetic_bound(&CycleScenario::specker().correlator_sum()), (-3.0, 3.0));
        assert_eq!(arithmetic_bound(&InequalityExpr::new(vec![], 0.5)), (0.5, 0.5));
    }

    #[test]
    fn expr_validation() {
        let s = Scenario::cycle(3).unwrap();
        let e = InequalityExpr::new(vec![Term { context: ctx(1, 4), coefficient: 1.0 }], 0.0);
        assert!(classical_bound(&s, &e).is_err());
        // Reversed orientation is the same context.
        let e = InequalityExpr::new(vec![Term { context: ctx(2, 1), coefficient: 1.0 }], 0.0);
        assert!(e.validate(&s).is_ok());
    }

    #[test]
    fn no_disturbance_examples() {
        let s = Scenario::cycle(5).unwrap();
        let lam = lambda_exact_behavior(&s, &LambdaLaw::Uniform).unwrap();
        let r = no_disturbance_check(&lam, 1e-12);
        assert!(r.pass);
        assert_eq!(r.max_gap, 0.0);

        // A_2 has P(+1) = 0.6 in (1,2) and 0.4 in (2,3).
        let tri = Scenario::cycle(3).unwrap();
        let tables = vec![
            OutcomeTable { pp: 0.3, pm: 0.2, mp: 0.3, mm: 0.2 },
            OutcomeTable { pp: 0.2, pm: 0.2, mp: 0.3, mm: 0.3 },
            OutcomeTable { pp: 0.25, pm: 0.25, mp: 0.25, mm: 0.25 },
        ];
        let b = Behavior::new(tri, tables).unwrap();
        let r = no_disturbance_check(&b, 1e-12);
        assert!(!r.pass);
        assert_eq!(r.worst_observable, Some(2));
        assert!((r.max_gap - 0.2).abs() < 1e-12);

        let det = deterministic_behavior(&DeterministicAssignment::from_index(5, 11), &s).unwrap();
        let r = no_disturbance_check(&det, 0.0);
        assert!(r.pass && r.max_gap == 0.0);
    }

    #[test]
    fn exclusivity_examples() {
        use Outcome::{Minus, Plus};
        let e1 = Event::new(ctx(1, 2), Plus, Minus);
        let e2 = Event::new(ctx(1, 3), Minus, Plus);
        assert!(are_exclusive(&e1, &e2) && are_exclusive(&e2, &e1));
        assert!(!are_exclusive(&e1, &e1));
        let e3 = Event::new(ctx(3, 4), Plus, Plus);
        assert!(!are_exclusive(&e1, &e3));

        let tri = Scenario::cycle(3).unwrap();
        let lam = lambda_exact_behavior(&tri, &LambdaLaw::Uniform).unwrap();
        let both = [Event::new(ctx(1, 2), Plus, Minus), Event::new(ctx(1, 2), Minus, Plus)];
        let r = exclusivity_sum(&lam, &both).unwrap();
        assert_eq!(r.sum, 1.0);
        assert!(r.pairwise_exclusive && r.satisfies_e);

        let triple = [
            Event::new(ctx(1, 2), Plus, Minus),
            Event::new(ctx(2, 3), Plus, Minus),
            Event::new(ctx(3, 1), Plus, Minus),
        ];
        let r = exclusivity_sum(&lam, &triple).unwrap();
        assert_eq!(r.sum, 1.5);
        assert!(r.pairwise_exclusive);
        assert!(!r.satisfies_e);

        let missing = [Event::new(ctx(1, 5), Plus, Minus)];
        assert!(exclusivity_sum(&lam, &missing).is_err());
    }

    #[test]
    fn event_json() {
        let e: Event = serde_json::from_str(r#"{"context":[1,3],"values":{"1":-1,"3":1}}"#).unwrap();
        assert_eq!(e, Event::new(ctx(1, 3), Outcome::Minus, Outcome::Plus));
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"context":[1,3],"values":{"1":-1,"3":1}}"#);
        assert!(serde_json::from_str::<Event>(r#"{"context":[1,3],"values":{"1":-1,"2":1}}"#).is_err());
        assert!(serde_json::from_str::<Event>(r#"{"context":[1,3],"values":{"1":-1}}"#).is_err());
    }

    fn ket(v: &[(f64, f64)]) -> DVector<Complex64> {
        DVector::from_iterator(v.len(), v.iter().map(|&(r, i)| Complex64::new(r, i)))
    }

    #[test]
    fn projector_examples() {
        let d = 3;
        let basis: Vec<DMatrix<Complex64>> = (0..d)
            .map(|k| {
                let mut e = DVector::zeros(d);
                e[k] = Complex64::new(1.0, 0.0);
                &e * e.adjoint()
            })
            .collect();
        let n = (1.0f64 / 3.0).sqrt();
        let psi = ket(&[(n, 0.0), (0.0, n), (-n, 0.0)]);
        let r = projector_exclusivity_sum(&psi, &basis).unwrap();
        assert!(r.orthogonal);
        assert!((r.sum - 1.0).abs() < 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = ket(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let b = ket(&[(h, 0.0), (h, 0.0), (0.0, 0.0)]);
        let r = projector_exclusivity_sum(&a, &[&a * a.adjoint(), &b * b.adjoint()]).unwrap();
        assert!(!r.orthogonal);
        assert!(r.sum > 1.0);

        let not_proj = DMatrix::from_element(3, 3, Complex64::new(1.0, 0.0));
        assert!(matches!(projector_exclusivity_sum(&a, &[not_proj]), Err(Error::NotProjector(_))));
        let unnormalized = ket(&[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert!(projector_exclusivity_sum(&unnormalized, &basis).is_err());
    }

    #[test]
    fn bounds_report_kcbs() {
        let k = CycleScenario::kcbs();
        let r = BoundsReport::compute(&k.scenario(), &k.correlator_sum()).unwrap();
        assert_eq!(r.classical_min, -3.0);
        assert!((r.nd_min + 5.0).abs() < BOUND_TOL);
        assert_eq!(r.arithmetic_min, -5.0);
        assert!(r.ordering_holds());
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["nd_min_behavior"]["contexts"].is_array());
        assert_eq!(json["classical_min_assignment"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn quantum_reference_constant() {
        assert!((KCBS_QUANTUM_MIN - (5.0 - 4.0 * 5f64.sqrt())).abs() < 1e-14);
        let bound = KCBS_QUANTUM_MIN;
        assert!(bound < -3.0 && bound > -5.0);
    }
}
