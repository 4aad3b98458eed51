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

//! The consolidated reproduction report behind `bunching reproduce-reply`.
//!
//! Every row carries an expected value, a tolerance and where the expected
//! value comes from. A default run must be all `MATCH`.

use serde_json::json;

use crate::behavior::{MeasurementContext, Outcome, Scenario};
use crate::hv::{
    context_dependence_witness, deterministic_behavior, lambda_exact_behavior, lambda_model_outcome, lambda_sample_behavior,
    DeterministicAssignment, HiddenLambdaState, LambdaLaw,
};
use crate::inequalities::{
    cycle_value, exclusivity_sum, no_disturbance_check, projector_exclusivity_sum, BoundsReport,
    CycleScenario, Event, BOUND_TOL,
};
use crate::quantum::{
    no_signalling_report, output_distribution, per_photon_marginal, FockState, ModeUnitary,
};
use crate::report::{Rows, RunReport};
use crate::{Error, Result, PROB_TOL};

const CLAIM: &str = "claim";
const DERIVED: &str = "derived";
const DEFINITION: &str = "definition";

/// Tolerance on the sampled KCBS value.
pub const MC_VALUE_TOL: f64 = 0.02;

#[derive(Debug, Clone, Default)]
pub struct ReproduceOptions {
    /// Adds Monte Carlo rows with this many samples.
    pub samples: Option<u64>,
    pub seed: u64,
    /// Test hook: adds 1 to the named row's value before checking.
    pub inject_fault: Option<String>,
}

fn fs(v: &[usize]) -> FockState {
    FockState::new(v.to_vec())
}

fn ctx(a: usize, b: usize) -> MeasurementContext {
    MeasurementContext::labeled(a, b).expect("distinct labels")
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Largest `|P(A = +1) − 1/2|` over all observables and contexts.
fn max_marginal_deviation(b: &crate::behavior::Behavior) -> f64 {
    (0..b.scenario().observables())
        .flat_map(|o| b.marginals(o))
        .map(|(_, m)| (m - 0.5).abs())
        .fold(0.0, f64::max)
}

pub fn reproduce_reply(opts: &ReproduceOptions) -> Result<RunReport> {
    let mut rows = Rows::new();
    rows.op("reproduce_reply");
    let tol = PROB_TOL;

    // Balanced beam splitter: bunching and per-photon marginals.
    let bs = ModeUnitary::beam_splitter();
    let hom = output_distribution(&bs, &fs(&[1, 1]))?;
    rows.op("output_distribution");
    rows.op("transition_probability");
    rows.op("permanent");
    rows.expect("hom.p[(1,1)->(2,0)]", hom.probability(&fs(&[2, 0])), 0.5, tol, DERIVED);
    rows.expect("hom.p[(1,1)->(0,2)]", hom.probability(&fs(&[0, 2])), 0.5, tol, DERIVED);
    rows.expect("hom.p[(1,1)->(1,1)]", hom.probability(&fs(&[1, 1])), 0.0, tol, DERIVED);
    let single = output_distribution(&bs, &fs(&[1, 0]))?;
    rows.expect("bs.marginal[(1,0),mode=0]", per_photon_marginal(&single, 0)?, 0.5, tol, CLAIM);
    rows.expect("bs.marginal[(1,1),mode=0]", per_photon_marginal(&hom, 0)?, 0.5, tol, CLAIM);
    rows.op("per_photon_marginal");
    let ns_pair = no_signalling_report(&bs, &fs(&[1, 0]), &fs(&[1, 1]), 0)?;
    let ns_triple = no_signalling_report(&bs, &fs(&[1, 0]), &fs(&[2, 1]), 0)?;
    rows.op("no_signalling_report");
    rows.expect("bs.no_signalling[(1,0)->(1,1)].difference", ns_pair.difference, 0.0, tol, CLAIM);
    rows.expect("bs.no_signalling[(1,0)->(2,1)].difference", ns_triple.difference, 0.0, tol, DERIVED);

    // λ-ordering model: the worked example and its exact behavior.
    let state = HiddenLambdaState::new(vec![0.2, 0.5, 0.9])?;
    let (a2_in_23, _) = lambda_model_outcome(&state, &ctx(2, 3))?;
    let (_, a2_in_12) = lambda_model_outcome(&state, &ctx(1, 2))?;
    rows.op("lambda_model_outcome");
    rows.expect("lambda.outcome[A_2|2,3]", a2_in_23.value().into(), -1.0, 0.0, CLAIM);
    rows.expect("lambda.outcome[A_2|1,2]", a2_in_12.value().into(), 1.0, 0.0, CLAIM);
    let witness = context_dependence_witness(&state, 1, &ctx(2, 3), &ctx(1, 2))?;
    rows.op("context_dependence_witness");
    rows.expect("lambda.witness[A_2|2,3 vs 1,2]", flag(witness.is_some()), 1.0, 0.0, CLAIM);

    // A witness for A_2 exists exactly when λ_2 is the middle value.
    let values = [0.2, 0.5, 0.9];
    let orderings = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut consistent = 0;
    for p in orderings {
        let s = HiddenLambdaState::new(p.iter().map(|&k| values[k]).collect())?;
        let w = context_dependence_witness(&s, 1, &ctx(2, 3), &ctx(1, 2))?;
        if w.is_some() == (p[1] == 1) {
            consistent += 1;
        }
    }
    rows.expect("lambda.witness_iff_middle[orderings]", consistent as f64, 6.0, 0.0, DERIVED);

    let kcbs = CycleScenario::kcbs();
    let lam5 = lambda_exact_behavior(&kcbs.scenario(), &LambdaLaw::Uniform)?;
    rows.op("lambda_exact_behavior");
    let nd5 = no_disturbance_check(&lam5, 1e-12);
    rows.op("no_disturbance_check");
    rows.expect("lambda.exact.max_marginal_deviation", max_marginal_deviation(&lam5), 0.0, 1e-12, DERIVED);
    rows.expect("lambda.exact.nd_gap", nd5.max_gap, 0.0, 1e-12, DERIVED);

    // KCBS pentagon.
    let kcbs_value = cycle_value(&lam5, &kcbs)?;
    rows.op("cycle_value");
    rows.op("correlator");
    let kcbs_bounds = BoundsReport::compute(&kcbs.scenario(), &kcbs.correlator_sum())?;
    rows.op("classical_bound");
    rows.op("nd_bound");
    rows.op("arithmetic_bound");
    rows.expect("kcbs.lambda_value", kcbs_value, -5.0, tol, CLAIM);
    rows.expect("kcbs.classical_min", kcbs_bounds.classical_min, -3.0, tol, DERIVED);
    rows.expect("kcbs.classical_max", kcbs_bounds.classical_max, 5.0, tol, DERIVED);
    rows.expect("kcbs.nd_min", kcbs_bounds.nd_min, -5.0, BOUND_TOL, CLAIM);
    rows.expect("kcbs.nd_max", kcbs_bounds.nd_max, 5.0, BOUND_TOL, DERIVED);
    rows.expect("kcbs.arithmetic_min", kcbs_bounds.arithmetic_min, -5.0, tol, CLAIM);
    rows.expect("kcbs.arithmetic_max", kcbs_bounds.arithmetic_max, 5.0, tol, DEFINITION);
    rows.expect("kcbs.bound_ordering", flag(kcbs_bounds.ordering_holds()), 1.0, 0.0, DEFINITION);
    rows.expect("kcbs.lambda_nd_pass", flag(nd5.pass), 1.0, 0.0, DERIVED);
    rows.expect(
        "kcbs.lambda_below_classical",
        flag(kcbs_value < kcbs_bounds.classical_min - tol),
        1.0,
        0.0,
        DERIVED,
    );

    // Specker triangle.
    let tri = CycleScenario::specker();
    let lam3 = lambda_exact_behavior(&tri.scenario(), &LambdaLaw::Uniform)?;
    let tri_value = cycle_value(&lam3, &tri)?;
    let tri_bounds = BoundsReport::compute(&tri.scenario(), &tri.correlator_sum())?;
    rows.expect("specker.lambda_value", tri_value, -3.0, tol, DERIVED);
    rows.expect("specker.classical_min", tri_bounds.classical_min, -1.0, tol, DERIVED);
    rows.expect("specker.nd_min", tri_bounds.nd_min, -3.0, BOUND_TOL, DERIVED);
    rows.expect("specker.arithmetic_min", tri_bounds.arithmetic_min, -3.0, tol, DEFINITION);

    // Exclusivity: three pairwise exclusive events a̲_1a_2, a̲_2a_3, a̲_3a_1.
    use Outcome::{Minus, Plus};
    let triple = [
        Event::new(ctx(1, 2), Plus, Minus),
        Event::new(ctx(2, 3), Plus, Minus),
        Event::new(ctx(3, 1), Plus, Minus),
    ];
    let lam_triple = exclusivity_sum(&lam3, &triple)?;
    rows.op("exclusivity_sum");
    rows.op("are_exclusive");
    rows.expect("exclusivity.triangle.sum", lam_triple.sum, 1.5, tol, DERIVED);
    rows.expect("exclusivity.triangle.pairwise_exclusive", flag(lam_triple.pairwise_exclusive), 1.0, 0.0, DERIVED);
    rows.expect("exclusivity.triangle.satisfies_e", flag(lam_triple.satisfies_e), 0.0, 0.0, DERIVED);

    let in_context = [Event::new(ctx(1, 2), Plus, Minus), Event::new(ctx(1, 2), Minus, Plus)];
    let pair_sum = exclusivity_sum(&lam3, &in_context)?;
    rows.expect("exclusivity.context_pair.sum", pair_sum.sum, 1.0, tol, DEFINITION);

    let tri_scenario: Scenario = tri.scenario();
    let mut det_max: f64 = 0.0;
    for a in DeterministicAssignment::all(3) {
        let b = deterministic_behavior(&a, &tri_scenario)?;
        det_max = det_max.max(exclusivity_sum(&b, &triple)?.sum);
    }
    rows.op("deterministic_behavior");
    rows.expect("exclusivity.deterministic.max_sum", det_max, 1.0, tol, DERIVED);

    let basis: Vec<_> = (0..3)
        .map(|k| {
            let mut e = nalgebra::DVector::<num_complex::Complex64>::zeros(3);
            e[k] = num_complex::Complex64::new(1.0, 0.0);
            &e * e.adjoint()
        })
        .collect();
    let c = (1.0f64 / 3.0).sqrt();
    let psi = nalgebra::DVector::from_vec(vec![
        num_complex::Complex64::new(c, 0.0),
        num_complex::Complex64::new(0.0, c),
        num_complex::Complex64::new(-c, 0.0),
    ]);
    let proj = projector_exclusivity_sum(&psi, &basis)?;
    rows.op("projector_exclusivity_sum");
    rows.expect("exclusivity.projector_basis.sum", proj.sum, 1.0, tol, DEFINITION);
    rows.expect("exclusivity.projector_basis.orthogonal", flag(proj.orthogonal), 1.0, 0.0, DEFINITION);

    let mut monte_carlo = serde_json::Value::Null;
    if let Some(n) = opts.samples {
        let sampled = lambda_sample_behavior(&kcbs.scenario(), &LambdaLaw::Uniform, n, opts.seed)?;
        rows.op("lambda_sample_behavior");
        let sigma = 0.5 / (n as f64).sqrt();
        let value = cycle_value(&sampled, &kcbs)?;
        let nd = no_disturbance_check(&sampled, 10.0 * sigma);
        rows.expect("mc.kcbs.lambda_value", value, -5.0, MC_VALUE_TOL, DERIVED);
        rows.expect("mc.kcbs.max_marginal_deviation", max_marginal_deviation(&sampled), 0.0, 5.0 * sigma, DERIVED);
        rows.expect("mc.kcbs.nd_gap", nd.max_gap, 0.0, 10.0 * sigma, DERIVED);
        monte_carlo = json!({
            "samples": n,
            "seed": opts.seed,
            "behavior": sampled,
            "value": value,
            "no_disturbance": nd,
        });
    }

    if let Some(q) = &opts.inject_fault {
        rows.perturb(q, 1.0)
            .map_err(|_| Error::validation(format!("cannot inject fault: no row named `{q}`")))?;
    }

    let results = json!({
        "hom": {
            "interferometer": bs,
            "distribution": hom,
            "no_signalling": [
                {"base": [1, 0], "added": [1, 1], "mode": 0, "report": ns_pair},
                {"base": [1, 0], "added": [2, 1], "mode": 0, "report": ns_triple},
            ],
        },
        "lambda_model": {
            "behavior": lam5,
            "no_disturbance": nd5,
            "witness_state": state,
            "witness": witness,
        },
        "kcbs": {"value": kcbs_value, "bounds": kcbs_bounds},
        "specker": {"value": tri_value, "bounds": tri_bounds},
        "exclusivity": {
            "triangle": {"events": triple, "result": lam_triple},
            "context_pair": {"events": in_context, "result": pair_sum},
            "deterministic_max_sum": det_max,
            "projector_basis": proj,
        },
        "monte_carlo": monte_carlo,
    });
    let inputs = json!({
        "samples": opts.samples,
        "seed": opts.seed,
        "inject_fault": opts.inject_fault,
    });
    let seed = opts.samples.map(|_| opts.seed);
    Ok(RunReport::new("full-report", inputs, results, rows, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn default_run_all_match() {
        let r = reproduce_reply(&ReproduceOptions::default()).unwrap();
        for row in &r.rows {
            assert_eq!(row.status, Status::Match, "{row:?}");
        }
        assert!(r.all_match());
    }

    #[test]
    fn fault_injection_flips_row() {
        let opts = ReproduceOptions {
            inject_fault: Some("kcbs.classical_min".into()),
            ..Default::default()
        };
        let r = reproduce_reply(&opts).unwrap();
        assert_eq!(r.row("kcbs.classical_min").unwrap().status, Status::Mismatch);
        assert!(!r.all_match());
        let bad = ReproduceOptions {
            inject_fault: Some("nope".into()),
            ..Default::default()
        };
        assert!(reproduce_reply(&bad).is_err());
    }
}
