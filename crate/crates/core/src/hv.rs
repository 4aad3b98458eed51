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

//! Hidden-variable models: the λ-ordering model and deterministic
//! noncontextual assignments.
//!
//! In the λ-ordering model every boson carries a hidden variable
//! `0 < λ_i < 1`. When `A_i` and `A_j` are measured together the boson with
//! the larger λ is reflected (`+1`) and the other transmitted (`−1`), so the
//! value of `A_i` depends on which partner it is measured with. The model is
//! only defined for pairwise contexts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Open01};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, MeasurementContext, Outcome, OutcomeTable, Scenario};
use crate::{Error, Result};


/// Number of Monte Carlo samples drawn from one RNG stream.
pub const SAMPLE_BATCH: u64 = 1 << 14;

/// Per-boson hidden variables, each strictly inside `(0, 1)` and pairwise
/// distinct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HiddenLambdaState(Vec<f64>);

impl HiddenLambdaState {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        for (i, &l) in lambdas.iter().enumerate() {
            if !(l > 0.0 && l < 1.0) {
                return Err(Error::validation(format!(
                    "λ_{} = {l} is not strictly between 0 and 1",
                    i + 1
                )));
            }
            if let Some(j) = lambdas[..i].iter().position(|&m| m == l) {
                return Err(Error::Tie {
                    first: j + 1,
                    second: i + 1,
                    value: l,
                });
            }
        }
        Ok(Self(lambdas))
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.0
    }

    fn get(&self, observable: usize) -> Result<f64> {
        self.0.get(observable).copied().ok_or(Error::IndexOutOfRange {
            what: "hidden-variable state",
            index: observable,
            len: self.0.len(),
        })
    }
}

impl TryFrom<Vec<f64>> for HiddenLambdaState {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<HiddenLambdaState> for Vec<f64> {
    fn from(s: HiddenLambdaState) -> Self {
        s.0
    }
}

fn order_outcome(li: f64, lj: f64, ctx: &MeasurementContext) -> Result<(Outcome, Outcome)> {
    if li > lj {
        Ok((Outcome::Plus, Outcome::Minus))
    } else if lj > li {
        Ok((Outcome::Minus, Outcome::Plus))
    } else {
        Err(Error::Tie {
            first: ctx.first() + 1,
            second: ctx.second() + 1,
            value: li,
        })
    }
}

/// Outcomes `(A_i, A_j)` for the context `(i, j)`: the larger λ gives `+1`.
pub fn lambda_model_outcome(state: &HiddenLambdaState, ctx: &MeasurementContext) -> Result<(Outcome, Outcome)> {
    let li = state.get(ctx.first())?;
    let lj = state.get(ctx.second())?;
    order_outcome(li, lj, ctx)
}

/// Distribution of the hidden variables.
///
/// JSON: `{"type": "uniform"}`, `{"type": "beta", "alpha": a, "beta": b}` or
/// `{"type": "independent", "marginals": [...]}` with one uniform/beta law
/// per observable.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LambdaLaw {
    /// i.i.d. `Uniform(0, 1)`.
    #[default]
    Uniform,
    /// i.i.d. `Beta(alpha, beta)`.
    Beta { alpha: f64, beta: f64 },
    /// Independent, possibly different, per-observable laws.
    Independent { marginals: Vec<LambdaLaw> },
}

enum Sampler {
    Uniform,
    Beta(Beta<f64>),
}

impl Sampler {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Uniform => Open01.sample(rng),
            Sampler::Beta(b) => b.sample(rng),
        }
    }
}

impl LambdaLaw {
    /// Whether every observable's λ is drawn i.i.d.
    fn is_iid(&self) -> bool {
        match self {
            LambdaLaw::Uniform | LambdaLaw::Beta { .. } => true,
            LambdaLaw::Independent { marginals } => {
                marginals.windows(2).all(|w| w[0] == w[1])
                    && marginals.first().is_none_or(|m| m.is_iid())
            }
        }
    }

    fn single(&self) -> Result<Sampler> {
        match self {
            LambdaLaw::Uniform => Ok(Sampler::Uniform),
            LambdaLaw::Beta { alpha, beta } => Beta::new(*alpha, *beta)
                .map(Sampler::Beta)
                .map_err(|e| Error::UnsupportedLaw(format!("beta({alpha}, {beta}): {e}"))),
            LambdaLaw::Independent { .. } => {
                Err(Error::UnsupportedLaw("nested independent laws".into()))
            }
        }
    }

    fn samplers(&self, observables: usize) -> Result<Vec<Sampler>> {
        match self {
            LambdaLaw::Independent { marginals } => {
                if marginals.len() != observables {
                    return Err(Error::UnsupportedLaw(format!(
                        "{} marginal laws for {observables} observables",
                        marginals.len()
                    )));
                }
                marginals.iter().map(LambdaLaw::single).collect()
            }
            law => (0..observables).map(|_| law.single()).collect(),
        }
    }
}

fn check_pairwise(scenario: &Scenario) -> Result<()> {
    // Contexts are pairs by construction; the scenario type cannot express
    // larger ones, so only emptiness needs checking here.
    if scenario.contexts().is_empty() {
        return Err(Error::validation("scenario has no contexts"));
    }
    Ok(())
}

/// Exact behavior of the λ-model under an exchangeable continuous law:
/// each context is perfectly anticorrelated with `P(+−) = P(−+) = 1/2`.
///
/// Only pairwise contexts exist. The marginal of every observable is 1/2 in
/// every context, and that common value is the one to use for an observable
/// measured alone.
pub fn lambda_exact_behavior(scenario: &Scenario, law: &LambdaLaw) -> Result<Behavior> {
    check_pairwise(scenario)?;
    if !law.is_iid() {
        return Err(Error::UnsupportedLaw(
            "exact mode covers i.i.d. continuous laws only; use sampling".into(),
        ));
    }
    law.samplers(scenario.observables())?;
    let half = OutcomeTable {
        pp: 0.0,
        pm: 0.5,
        mp: 0.5,
        mm: 0.0,
    };
    Behavior::new(scenario.clone(), vec![half; scenario.contexts().len()])
}

/// Monte Carlo estimate of the λ-model behavior.
///
/// Each sample draws a full λ vector and evaluates every context on it.
/// Samples are split into batches of [`SAMPLE_BATCH`]; batch `k` uses
/// ChaCha8 seeded with `seed` on stream `k`, so batches run in parallel and
/// the integer counts they return reduce to the same result in any order.
pub fn lambda_sample_behavior(scenario: &Scenario, law: &LambdaLaw, n_samples: u64, seed: u64) -> Result<Behavior> {
    check_pairwise(scenario)?;
    if n_samples == 0 {
        return Err(Error::validation("n_samples must be at least 1"));
    }
    let samplers = law.samplers(scenario.observables())?;
    let contexts = scenario.contexts();
    let batches = n_samples.div_ceil(SAMPLE_BATCH);

    let counts = (0..batches)
        .into_par_iter()
        .map(|batch| -> Result<Vec<[u64; 4]>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let len = SAMPLE_BATCH.min(n_samples - batch * SAMPLE_BATCH);
            let mut counts = vec![[0u64; 4]; contexts.len()];
            let mut lambdas = vec![0.0; samplers.len()];
            for _ in 0..len {
                for (l, s) in lambdas.iter_mut().zip(&samplers) {
                    *l = s.draw(&mut rng);
                }
                for (c, ctx) in counts.iter_mut().zip(contexts) {
                    let slot = match order_outcome(lambdas[ctx.first()], lambdas[ctx.second()], ctx)? {
                        (Outcome::Plus, Outcome::Minus) => 1,
                        _ => 2,
                    };
                    c[slot] += 1;
                }
            }
            Ok(counts)
        })
        .try_reduce(
            || vec![[0u64; 4]; contexts.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    for k in 0..4 {
                        x[k] += y[k];
                    }
                }
                Ok(a)
            },
        )?;

    let n = n_samples as f64;
    let tables = counts
        .into_iter()
        .map(|[pp, pm, mp, mm]| OutcomeTable {
            pp: pp as f64 / n,
            pm: pm as f64 / n,
            mp: mp as f64 / n,
            mm: mm as f64 / n,
        })
        .collect();
    Behavior::new(scenario.clone(), tables)
}

/// Context-independent values for every observable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeterministicAssignment(Vec<Outcome>);

impl DeterministicAssignment {
    pub fn new(values: Vec<Outcome>) -> Self {
        Self(values)
    }

    /// Assignment number `index` out of `2^n`: bit `k` clear means
    /// `A_{k+1} = +1`, set means `−1`.
    pub fn from_index(n: usize, index: u64) -> Self {
        Self(
            (0..n)
                .map(|k| if index >> k & 1 == 0 { Outcome::Plus } else { Outcome::Minus })
                .collect(),
        )
    }

    /// All `2^n` assignments in index order.
    pub fn all(n: usize) -> impl Iterator<Item = Self> {
        (0..1u64 << n).map(move |i| Self::from_index(n, i))
    }

    pub fn values(&self) -> &[Outcome] {
        &self.0
    }

    pub fn get(&self, observable: usize) -> Option<Outcome> {
        self.0.get(observable).copied()
    }
}

/// Point-mass behavior of a deterministic assignment.
pub fn deterministic_behavior(assignment: &DeterministicAssignment, scenario: &Scenario) -> Result<Behavior> {
    let n = scenario.observables();
    if assignment.0.len() < n {
        return Err(Error::Coverage {
            observable: assignment.0.len() + 1,
        });
    }
    if assignment.0.len() > n {
        return Err(Error::validation(format!(
            "assignment has {} values for {n} observables",
            assignment.0.len()
        )));
    }
    let tables = scenario
        .contexts()
        .iter()
        .map(|c| OutcomeTable::point_mass(assignment.0[c.first()], assignment.0[c.second()]))
        .collect();
    Behavior::new(scenario.clone(), tables)
}

/// The same observable yielding different values in two contexts for one
/// fixed hidden state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextWitness {
    /// One-based label.
    pub observable: usize,
    pub context_a: MeasurementContext,
    pub value_a: Outcome,
    pub context_b: MeasurementContext,
    pub value_b: Outcome,
}

/// Returns a witness when `observable` takes different λ-model values in
/// `ctx_a` and `ctx_b`, `None` when the values agree.
pub fn context_dependence_witness(
    state: &HiddenLambdaState,
    observable: usize,
    ctx_a: &MeasurementContext,
    ctx_b: &MeasurementContext,
) -> Result<Option<ContextWitness>> {
    let value_in = |ctx: &MeasurementContext| -> Result<Outcome> {
        if !ctx.contains(observable) {
            return Err(Error::validation(format!(
                "A_{} is not measured in context {ctx}",
                observable + 1
            )));
        }
        let (a, b) = lambda_model_outcome(state, ctx)?;
        Ok(if ctx.first() == observable { a } else { b })
    };
    let value_a = value_in(ctx_a)?;
    let value_b = value_in(ctx_b)?;
    Ok((value_a != value_b).then_some(ContextWitness {
        observable: observable + 1,
        context_a: *ctx_a,
        value_a,
        context_b: *ctx_b,
        value_b,
    }))
}
