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

//! Scenario files and the runner behind `bunching run`.
//!
//! A scenario file is a JSON object with a `kind` field:
//!
//! * `quantum`: interferometer (default: balanced beam splitter), input Fock
//!   state, optional transition queries and a no-signalling comparison.
//! * `hidden-variable`: a pairwise scenario, a λ law, optional fixed λ values,
//!   context-dependence queries, deterministic assignments and events.
//! * `bounds`: a scenario (or `"cycle": n`), an inequality (default: the sum
//!   of all correlators), behaviors to evaluate it on, events and projector
//!   checks.
//! * `full-report`: the consolidated reproduction report.
//!
//! Every kind accepts `"expect": {"quantity": value}` and `"tolerance"`.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::behavior::{Behavior, MeasurementContext, Scenario};
use crate::hv::{
    context_dependence_witness, deterministic_behavior, lambda_exact_behavior, lambda_model_outcome,
    lambda_sample_behavior, DeterministicAssignment, HiddenLambdaState, LambdaLaw,
};
use crate::inequalities::{
    are_exclusive, correlator, exclusivity_sum, no_disturbance_check, projector_exclusivity_sum, BoundsReport, Event, InequalityExpr,
};
use crate::quantum::{
    no_signalling_report, output_distribution, per_photon_marginal, transition_probability, FockState,
    ModeUnitary,
};
use crate::report::{Rows, RunReport};
use crate::reproduce::{reproduce_reply, ReproduceOptions};
use crate::{Error, Result};

/// Default comparison tolerance for scenario expectations.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScenarioFile {
    Quantum(QuantumPayload),
    HiddenVariable(HiddenVariablePayload),
    Bounds(BoundsPayload),
    FullReport(FullReportPayload),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoSignallingQuery {
    pub base: FockState,
    pub added: FockState,
    pub mode: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumPayload {
    #[serde(default)]
    pub interferometer: Option<ModeUnitary>,
    pub input: FockState,
    #[serde(default)]
    pub transitions: Vec<FockState>,
    #[serde(default)]
    pub marginal_modes: Option<Vec<usize>>,
    #[serde(default)]
    pub no_signalling: Option<NoSignallingQuery>,
    #[serde(default)]
    pub expect: BTreeMap<String, f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessQuery {
    /// One-based label.
    pub observable: usize,
    pub contexts: [MeasurementContext; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HiddenVariablePayload {
    pub observables: usize,
    pub contexts: Vec<MeasurementContext>,
    #[serde(default)]
    pub law: LambdaLaw,
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub lambdas: Option<HiddenLambdaState>,
    #[serde(default)]
    pub witnesses: Vec<WitnessQuery>,
    #[serde(default)]
    pub assignments: Vec<DeterministicAssignment>,
    #[serde(default)]
    pub events: Vec<Event>,
    #[serde(default)]
    pub expect: BTreeMap<String, f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BehaviorSource {
    LambdaExact {
        #[serde(default)]
        law: LambdaLaw,
    },
    LambdaSampled {
        #[serde(default)]
        law: LambdaLaw,
        samples: u64,
        #[serde(default)]
        seed: Option<u64>,
    },
    Deterministic {
        values: DeterministicAssignment,
    },
    Explicit {
        behavior: Behavior,
    },
}

impl BehaviorSource {
    fn label(&self, index: usize) -> String {
        match self {
            BehaviorSource::LambdaExact { .. } => "lambda-exact".into(),
            BehaviorSource::LambdaSampled { .. } => "lambda-sampled".into(),
            BehaviorSource::Deterministic { .. } => format!("deterministic#{index}"),
            BehaviorSource::Explicit { .. } => format!("explicit#{index}"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexVectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorCheck {
    pub state: ComplexVectorJson,
    pub projectors: Vec<ComplexMatrixJson>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsPayload {
    #[serde(default)]
    pub cycle: Option<usize>,
    #[serde(default)]
    pub observables: Option<usize>,
    #[serde(default)]
    pub contexts: Option<Vec<MeasurementContext>>,
    #[serde(default)]
    pub inequality: Option<InequalityExpr>,
    #[serde(default)]
    pub behaviors: Vec<BehaviorSource>,
    #[serde(default)]
    pub events: Vec<Event>,
    #[serde(default)]
    pub projector_checks: Vec<ProjectorCheck>,
    #[serde(default)]
    pub expect: BTreeMap<String, f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullReportPayload {
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Command-line overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub tolerance: Option<f64>,
}

impl ScenarioFile {
    /// Parses a scenario. Malformed JSON is a [`Error::Parse`]; well-formed
    /// JSON that does not fit the schema is a [`Error::Validation`].
    pub fn parse(text: &str) -> Result<(Self, Value)> {
        let raw: Value = serde_json::from_str(text)?;
        let file = serde_json::from_value(raw.clone()).map_err(|e| Error::validation(e.to_string()))?;
        Ok((file, raw))
    }

    pub fn load(path: &Path) -> Result<(Self, Value)> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioFile::Quantum(_) => "quantum",
            ScenarioFile::HiddenVariable(_) => "hidden-variable",
            ScenarioFile::Bounds(_) => "bounds",
            ScenarioFile::FullReport(_) => "full-report",
        }
    }

    pub fn execute(&self, inputs: Value, opts: &RunOptions) -> Result<RunReport> {
        let mut report = self.dispatch(inputs, opts)?;
        if let Err(k) = report.operations.binary_search_by(|o| o.as_str().cmp("run")) {
            report.operations.insert(k, "run".into());
        }
        Ok(report)
    }

    fn dispatch(&self, inputs: Value, opts: &RunOptions) -> Result<RunReport> {
        match self {
            ScenarioFile::Quantum(p) => run_quantum(p, inputs, opts),
            ScenarioFile::HiddenVariable(p) => run_hidden_variable(p, inputs, opts),
            ScenarioFile::Bounds(p) => run_bounds(p, inputs, opts),
            ScenarioFile::FullReport(p) => {
                let ro = ReproduceOptions {
                    samples: opts.samples.or(p.samples),
                    seed: opts.seed.or(p.seed).unwrap_or(0),
                    inject_fault: None,
                };
                let mut report = reproduce_reply(&ro)?;
                report.inputs = inputs;
                Ok(report)
            }
        }
    }
}

/// Loads, validates and runs a scenario file.
pub fn run(path: &Path, opts: &RunOptions) -> Result<RunReport> {
    let (file, raw) = ScenarioFile::load(path)?;
    file.execute(raw, opts)
}

fn tolerance(file: Option<f64>, opts: &RunOptions) -> Result<f64> {
    let t = opts.tolerance.or(file).unwrap_or(DEFAULT_TOLERANCE);
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::validation(format!("tolerance must be a non-negative number, got {t}")));
    }
    Ok(t)
}

fn apply_expectations(rows: &mut Rows, expect: &BTreeMap<String, f64>, tol: f64) -> Result<()> {
    for (q, v) in expect {
        rows.set_expected(q, *v, tol, "scenario")?;
    }
    Ok(())
}

fn pair(c: &MeasurementContext) -> String {
    let [a, b] = c.labels();
    format!("{a},{b}")
}

fn run_quantum(p: &QuantumPayload, inputs: Value, opts: &RunOptions) -> Result<RunReport> {
    let tol = tolerance(p.tolerance, opts)?;
    let u = p.interferometer.clone().unwrap_or_else(ModeUnitary::beam_splitter);
    let mut rows = Rows::new();

    let dist = output_distribution(&u, &p.input)?;
    rows.op("output_distribution");
    rows.op("transition_probability");
    rows.op("permanent");
    for e in dist.entries() {
        rows.push(format!("p[{}->{}]", p.input, e.occupations), e.p);
    }
    rows.push("distribution.total", dist.entries().iter().map(|e| e.p).sum());

    for out in &p.transitions {
        let prob = transition_probability(&u, &p.input, out)?;
        let q = format!("transition[{}->{}]", p.input, out);
        rows.push(q, prob);
    }

    let modes: Vec<usize> = p.marginal_modes.clone().unwrap_or_else(|| (0..u.dim()).collect());
    let mut marginals = Vec::new();
    for &m in &modes {
        let v = per_photon_marginal(&dist, m)?;
        rows.push(format!("marginal[mode={m}]"), v);
        marginals.push(json!({"mode": m, "marginal": v}));
    }
    rows.op("per_photon_marginal");

    let mut results = json!({
        "interferometer": u,
        "input": p.input,
        "distribution": dist,
        "marginals": marginals,
    });
    if let Some(ns) = &p.no_signalling {
        let r = no_signalling_report(&u, &ns.base, &ns.added, ns.mode)?;
        rows.op("no_signalling_report");
        rows.push("no_signalling.before", r.marginal_before);
        rows.push("no_signalling.after", r.marginal_after);
        rows.push("no_signalling.difference", r.difference);
        results["no_signalling"] = json!({
            "base": ns.base, "added": ns.added, "mode": ns.mode, "report": r,
        });
    }
    apply_expectations(&mut rows, &p.expect, tol)?;
    Ok(RunReport::new("quantum", inputs, results, rows, None))
}

fn behavior_rows(rows: &mut Rows, prefix: &str, b: &Behavior) -> Result<Value> {
    for c in b.contexts() {
        rows.push(format!("{prefix}correlator[{}]", pair(c)), correlator(b, c)?);
    }
    for obs in 0..b.scenario().observables() {
        for (c, m) in b.marginals(obs) {
            rows.push(format!("{prefix}marginal[A_{}|{}]", obs + 1, pair(&c)), m);
        }
    }
    rows.op("correlator");
    let nd = no_disturbance_check(b, 0.0);
    rows.op("no_disturbance_check");
    rows.push(format!("{prefix}nd_gap"), nd.max_gap);
    Ok(json!({"behavior": b, "no_disturbance": nd}))
}

fn event_rows(rows: &mut Rows, prefix: &str, b: &Behavior, events: &[Event]) -> Result<Option<Value>> {
    if events.is_empty() {
        return Ok(None);
    }
    let r = exclusivity_sum(b, events)?;
    rows.op("exclusivity_sum");
    rows.op("are_exclusive");
    rows.push(format!("{prefix}exclusivity_sum"), r.sum);
    rows.push_flag(format!("{prefix}pairwise_exclusive"), r.pairwise_exclusive);
    rows.push_flag(format!("{prefix}satisfies_e"), r.satisfies_e);
    let pairs: Vec<Value> = events
        .iter()
        .enumerate()
        .flat_map(|(i, e)| events[..i].iter().enumerate().map(move |(j, f)| json!({"events": [j, i], "exclusive": are_exclusive(e, f)})))
        .collect();
    Ok(Some(json!({"events": events, "result": r, "pairs": pairs})))
}

fn run_hidden_variable(p: &HiddenVariablePayload, inputs: Value, opts: &RunOptions) -> Result<RunReport> {
    let tol = tolerance(p.tolerance, opts)?;
    let scenario = Scenario::new(p.observables, p.contexts.clone())?;
    let mut rows = Rows::new();
    let mut results = serde_json::Map::new();

    // Exact mode only covers i.i.d. laws; other laws go straight to sampling.
    match lambda_exact_behavior(&scenario, &p.law) {
        Ok(exact) => {
            rows.op("lambda_exact_behavior");
            let mut v = behavior_rows(&mut rows, "", &exact)?;
            if let Some(ev) = event_rows(&mut rows, "", &exact, &p.events)? {
                v["exclusivity"] = ev;
            }
            results.insert("exact".into(), v);
        }
        Err(Error::UnsupportedLaw(msg)) if p.samples.or(opts.samples).is_some() => {
            results.insert("exact".into(), json!({"unsupported": msg}));
        }
        Err(e) => return Err(e),
    }

    let seed = opts.seed.or(p.seed).unwrap_or(0);
    let samples = opts.samples.or(p.samples);
    if let Some(n) = samples {
        let sampled = lambda_sample_behavior(&scenario, &p.law, n, seed)?;
        rows.op("lambda_sample_behavior");
        let mut v = behavior_rows(&mut rows, "sampled.", &sampled)?;
        v["samples"] = json!(n);
        v["seed"] = json!(seed);
        if let Some(ev) = event_rows(&mut rows, "sampled.", &sampled, &p.events)? {
            v["exclusivity"] = ev;
        }
        results.insert("sampled".into(), v);
    }

    if let Some(state) = &p.lambdas {
        let mut outcomes = Vec::new();
        for c in scenario.contexts() {
            let (a, b) = lambda_model_outcome(state, c)?;
            let [la, lb] = c.labels();
            rows.push(format!("outcome[A_{la}|{}]", pair(c)), a.value().into());
            rows.push(format!("outcome[A_{lb}|{}]", pair(c)), b.value().into());
            outcomes.push(json!({"context": c, "values": [a, b]}));
        }
        rows.op("lambda_model_outcome");
        let mut witnesses = Vec::new();
        for w in &p.witnesses {
            if w.observable == 0 {
                return Err(Error::validation("observable labels start at 1"));
            }
            let [ca, cb] = &w.contexts;
            let found = context_dependence_witness(state, w.observable - 1, ca, cb)?;
            rows.push_flag(format!("witness[A_{}|{} vs {}]", w.observable, pair(ca), pair(cb)), found.is_some());
            witnesses.push(json!({"observable": w.observable, "contexts": w.contexts, "witness": found}));
        }
        if !p.witnesses.is_empty() {
            rows.op("context_dependence_witness");
        }
        results.insert("lambdas".into(), json!(state));
        results.insert("outcomes".into(), json!(outcomes));
        results.insert("witnesses".into(), json!(witnesses));
    } else if !p.witnesses.is_empty() {
        return Err(Error::validation("witness queries need fixed `lambdas`"));
    }

    let mut deterministic = Vec::new();
    for (k, a) in p.assignments.iter().enumerate() {
        let b = deterministic_behavior(a, &scenario)?;
        rows.op("deterministic_behavior");
        let v = behavior_rows(&mut rows, &format!("deterministic#{k}."), &b)?;
        deterministic.push(v);
    }
    if !deterministic.is_empty() {
        results.insert("deterministic".into(), Value::Array(deterministic));
    }

    apply_expectations(&mut rows, &p.expect, tol)?;
    let seed = samples.map(|_| seed);
    Ok(RunReport::new("hidden-variable", inputs, Value::Object(results), rows, seed))
}

fn complex_vector(v: &ComplexVectorJson) -> Result<DVector<Complex64>> {
    if v.re.len() != v.im.len() {
        return Err(Error::Shape("state re/im lengths differ".into()));
    }
    Ok(DVector::from_iterator(v.re.len(), v.re.iter().zip(&v.im).map(|(&r, &i)| Complex64::new(r, i))))
}

fn complex_matrix(m: &ComplexMatrixJson) -> Result<DMatrix<Complex64>> {
    let d = m.re.len();
    if m.im.len() != d || m.re.iter().chain(&m.im).any(|r| r.len() != d) {
        return Err(Error::Shape("projector re/im must both be square and equal-sized".into()));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| Complex64::new(m.re[i][j], m.im[i][j])))
}

fn run_bounds(p: &BoundsPayload, inputs: Value, opts: &RunOptions) -> Result<RunReport> {
    let tol = tolerance(p.tolerance, opts)?;
    let scenario = match (p.cycle, p.observables, &p.contexts) {
        (Some(n), None, None) => Scenario::cycle(n)?,
        (None, Some(n), Some(c)) => Scenario::new(n, c.clone())?,
        _ => {
            return Err(Error::validation(
                "bounds scenario needs either `cycle` or both `observables` and `contexts`",
            ))
        }
    };
    let expr = p
        .inequality
        .clone()
        .unwrap_or_else(|| InequalityExpr::sum_of_correlators(&scenario));
    expr.validate(&scenario)?;
    let mut rows = Rows::new();

    let report = BoundsReport::compute(&scenario, &expr)?;
    rows.op("classical_bound");
    rows.op("nd_bound");
    rows.op("arithmetic_bound");
    rows.push("classical_min", report.classical_min);
    rows.push("classical_max", report.classical_max);
    rows.push("nd_min", report.nd_min);
    rows.push("nd_max", report.nd_max);
    rows.push("arithmetic_min", report.arithmetic_min);
    rows.push("arithmetic_max", report.arithmetic_max);
    rows.push_flag("bound_ordering", report.ordering_holds());

    let is_cycle = p.cycle.is_some() && p.inequality.is_none();
    let mut evaluated = Vec::new();
    for (k, src) in p.behaviors.iter().enumerate() {
        let label = src.label(k);
        let b = match src {
            BehaviorSource::LambdaExact { law } => {
                rows.op("lambda_exact_behavior");
                lambda_exact_behavior(&scenario, law)?
            }
            BehaviorSource::LambdaSampled { law, samples, seed } => {
                rows.op("lambda_sample_behavior");
                let n = opts.samples.unwrap_or(*samples);
                lambda_sample_behavior(&scenario, law, n, opts.seed.or(*seed).unwrap_or(0))?
            }
            BehaviorSource::Deterministic { values } => {
                rows.op("deterministic_behavior");
                deterministic_behavior(values, &scenario)?
            }
            BehaviorSource::Explicit { behavior } => {
                if behavior.scenario() != &scenario {
                    return Err(Error::validation(format!("behavior {label} is defined on a different scenario")));
                }
                behavior.clone()
            }
        };
        let value = expr.evaluate(&b)?;
        rows.op("correlator");
        if is_cycle {
            rows.op("cycle_value");
        }
        rows.push(format!("value[{label}]"), value);
        let nd = no_disturbance_check(&b, tol);
        rows.op("no_disturbance_check");
        rows.push(format!("nd_gap[{label}]"), nd.max_gap);
        rows.push_flag(format!("nd_pass[{label}]"), nd.pass);
        rows.push_flag(format!("below_classical[{label}]"), value < report.classical_min - tol);
        let mut v = json!({"label": label, "behavior": b, "value": value, "no_disturbance": nd});
        if let Some(ev) = event_rows(&mut rows, &format!("{label}."), &b, &p.events)? {
            v["exclusivity"] = ev;
        }
        evaluated.push(v);
    }

    let mut projector_results = Vec::new();
    for (k, check) in p.projector_checks.iter().enumerate() {
        let state = complex_vector(&check.state)?;
        let projectors = check.projectors.iter().map(complex_matrix).collect::<Result<Vec<_>>>()?;
        let r = projector_exclusivity_sum(&state, &projectors)?;
        rows.op("projector_exclusivity_sum");
        rows.push(format!("projector_sum[{k}]"), r.sum);
        rows.push_flag(format!("projector_orthogonal[{k}]"), r.orthogonal);
        projector_results.push(json!(r));
    }

    let results = json!({
        "scenario": scenario,
        "inequality": expr,
        "bounds": report,
        "behaviors": evaluated,
        "projector_checks": projector_results,
    });
    apply_expectations(&mut rows, &p.expect, tol)?;
    Ok(RunReport::new("bounds", inputs, results, rows, opts.seed))
}
