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

//! Observables, pairwise contexts and behaviors (per-context outcome tables).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, PROB_TOL};

/// A dichotomic outcome. `Plus` is reflection, `Minus` transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

impl TryFrom<i8> for Outcome {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Outcome::Plus),
            -1 => Ok(Outcome::Minus),
            _ => Err(Error::validation(format!("outcome must be +1 or -1, got {v}"))),
        }
    }
}

impl From<Outcome> for i8 {
    fn from(o: Outcome) -> i8 {
        o.value()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        })
    }
}

/// An ordered pair of distinct observables measured jointly (zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeasurementContext {
    first: usize,
    second: usize,
}

impl MeasurementContext {
    pub fn new(first: usize, second: usize) -> Result<Self> {
        if first == second {
            return Err(Error::validation(format!(
                "context repeats observable A_{}",
                first + 1
            )));
        }
        Ok(Self { first, second })
    }

    /// Context from one-based labels, `labeled(2, 3)` is `(A_2, A_3)`.
    pub fn labeled(first: usize, second: usize) -> Result<Self> {
        if first == 0 || second == 0 {
            return Err(Error::validation("observable labels start at 1"));
        }
        Self::new(first - 1, second - 1)
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn second(&self) -> usize {
        self.second
    }

    pub fn observables(&self) -> [usize; 2] {
        [self.first, self.second]
    }

    pub fn contains(&self, observable: usize) -> bool {
        self.first == observable || self.second == observable
    }

    pub fn reversed(&self) -> Self {
        Self {
            first: self.second,
            second: self.first,
        }
    }

    /// Same unordered pair of observables.
    pub fn same_pair(&self, other: &Self) -> bool {
        self == other || *self == other.reversed()
    }

    /// One-based labels, as used in JSON.
    pub fn labels(&self) -> [usize; 2] {
        [self.first + 1, self.second + 1]
    }
}

impl fmt::Display for MeasurementContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(A_{}, A_{})", self.first + 1, self.second + 1)
    }
}

impl Serialize for MeasurementContext {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeasurementContext {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[usize; 2]>::deserialize(d)?;
        Self::labeled(a, b).map_err(serde::de::Error::custom)
    }
}

/// Compatibility structure: `observables` dichotomic observables and the
/// pairs measured jointly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioJson", into = "ScenarioJson")]
pub struct Scenario {
    observables: usize,
    contexts: Vec<MeasurementContext>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioJson {
    observables: usize,
    contexts: Vec<MeasurementContext>,
}

impl Scenario {
    pub fn new(observables: usize, contexts: Vec<MeasurementContext>) -> Result<Self> {
        if contexts.is_empty() {
            return Err(Error::validation("scenario has no contexts"));
        }
        for (k, c) in contexts.iter().enumerate() {
            for o in c.observables() {
                if o >= observables {
                    return Err(Error::validation(format!(
                        "context {c} references A_{} but the scenario has {observables} observables",
                        o + 1
                    )));
                }
            }
            if contexts[..k].iter().any(|p| p.same_pair(c)) {
                return Err(Error::validation(format!("context {c} listed twice")));
            }
        }
        Ok(Self {
            observables,
            contexts,
        })
    }

    /// The `n`-cycle: contexts `(A_i, A_{i+1})` with indices mod `n`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::validation(format!(
                "cycle scenarios need at least 3 observables, got {n}"
            )));
        }
        let contexts = (0..n)
            .map(|i| MeasurementContext::new(i, (i + 1) % n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, contexts)
    }

    pub fn observables(&self) -> usize {
        self.observables
    }

    pub fn contexts(&self) -> &[MeasurementContext] {
        &self.contexts
    }

    /// Position of the context covering the same pair, if any.
    pub fn find(&self, ctx: &MeasurementContext) -> Option<usize> {
        self.contexts.iter().position(|c| c.same_pair(ctx))
    }
}

impl TryFrom<ScenarioJson> for Scenario {
    type Error = Error;

    fn try_from(j: ScenarioJson) -> Result<Self> {
        Self::new(j.observables, j.contexts)
    }
}

impl From<Scenario> for ScenarioJson {
    fn from(s: Scenario) -> Self {
        ScenarioJson {
            observables: s.observables,
            contexts: s.contexts,
        }
    }
}

/// Joint outcome probabilities for one context, ordered like the context:
/// `pm` is `P(first = +1, second = −1)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OutcomeTable {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl OutcomeTable {
    pub fn point_mass(a: Outcome, b: Outcome) -> Self {
        let mut t = Self::default();
        *t.entry_mut(a, b) = 1.0;
        t
    }

    pub fn get(&self, a: Outcome, b: Outcome) -> f64 {
        match (a, b) {
            (Outcome::Plus, Outcome::Plus) => self.pp,
            (Outcome::Plus, Outcome::Minus) => self.pm,
            (Outcome::Minus, Outcome::Plus) => self.mp,
            (Outcome::Minus, Outcome::Minus) => self.mm,
        }
    }

    pub fn entry_mut(&mut self, a: Outcome, b: Outcome) -> &mut f64 {
        match (a, b) {
            (Outcome::Plus, Outcome::Plus) => &mut self.pp,
            (Outcome::Plus, Outcome::Minus) => &mut self.pm,
            (Outcome::Minus, Outcome::Plus) => &mut self.mp,
            (Outcome::Minus, Outcome::Minus) => &mut self.mm,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            pp: self.pp,
            pm: self.mp,
            mp: self.pm,
            mm: self.mm,
        }
    }

    pub fn total(&self) -> f64 {
        self.pp + self.pm + self.mp + self.mm
    }

    /// `⟨A B⟩ = p(++) + p(−−) − p(+−) − p(−+)`.
    pub fn correlator(&self) -> f64 {
        self.pp + self.mm - self.pm - self.mp
    }

    /// `P(first = +1)`.
    pub fn first_plus(&self) -> f64 {
        self.pp + self.pm
    }

    /// `P(second = +1)`.
    pub fn second_plus(&self) -> f64 {
        self.pp + self.mp
    }

    fn validate(&self, ctx: &MeasurementContext) -> Result<()> {
        let entries = [self.pp, self.pm, self.mp, self.mm];
        if entries.iter().any(|p| !p.is_finite() || *p < -PROB_TOL) {
            return Err(Error::validation(format!(
                "table for {ctx} has a negative or non-finite entry"
            )));
        }
        if (self.total() - 1.0).abs() > PROB_TOL {
            return Err(Error::validation(format!(
                "table for {ctx} sums to {}, not 1",
                self.total()
            )));
        }
        Ok(())
    }
}

/// One outcome table per context of a scenario.
///
/// JSON: `{"observables": n, "contexts": [{"context": [i, j], "pp": .., "pm": .., "mp": .., "mm": ..}, ...]}`
/// with one-based labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BehaviorJson", into = "BehaviorJson")]
pub struct Behavior {
    scenario: Scenario,
    tables: Vec<OutcomeTable>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BehaviorJson {
    observables: usize,
    contexts: Vec<ContextTableJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextTableJson {
    context: MeasurementContext,
    #[serde(flatten)]
    table: OutcomeTable,
}

impl Behavior {
    pub fn new(scenario: Scenario, tables: Vec<OutcomeTable>) -> Result<Self> {
        if tables.len() != scenario.contexts().len() {
            return Err(Error::validation(format!(
                "{} tables for {} contexts",
                tables.len(),
                scenario.contexts().len()
            )));
        }
        for (t, c) in tables.iter().zip(scenario.contexts()) {
            t.validate(c)?;
        }
        Ok(Self { scenario, tables })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn contexts(&self) -> &[MeasurementContext] {
        self.scenario.contexts()
    }

    pub fn tables(&self) -> &[OutcomeTable] {
        &self.tables
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MeasurementContext, &OutcomeTable)> {
        self.scenario.contexts().iter().zip(&self.tables)
    }

    /// The table for `ctx`, reoriented to `ctx`'s observable order.
    pub fn table(&self, ctx: &MeasurementContext) -> Result<OutcomeTable> {
        let k = self.scenario.find(ctx).ok_or(Error::MissingContext {
            first: ctx.first() + 1,
            second: ctx.second() + 1,
        })?;
        let stored = &self.scenario.contexts()[k];
        Ok(if stored == ctx {
            self.tables[k]
        } else {
            self.tables[k].swapped()
        })
    }

    /// `P(A = +1)` for `observable` in each context that contains it.
    pub fn marginals(&self, observable: usize) -> Vec<(MeasurementContext, f64)> {
        self.iter()
            .filter_map(|(c, t)| {
                if c.first() == observable {
                    Some((*c, t.first_plus()))
                } else if c.second() == observable {
                    Some((*c, t.second_plus()))
                } else {
                    None
                }
            })
            .collect()
    }
}

impl TryFrom<BehaviorJson> for Behavior {
    type Error = Error;

    fn try_from(j: BehaviorJson) -> Result<Self> {
        let (contexts, tables) = j.contexts.into_iter().map(|c| (c.context, c.table)).unzip();
        Self::new(Scenario::new(j.observables, contexts)?, tables)
    }
}

impl From<Behavior> for BehaviorJson {
    fn from(b: Behavior) -> Self {
        BehaviorJson {
            observables: b.scenario.observables(),
            contexts: b
                .scenario
                .contexts()
                .iter()
                .zip(b.tables)
                .map(|(c, table)| ContextTableJson { context: *c, table })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_json_is_one_based() {
        let s: Scenario = serde_json::from_str(r#"{"observables": 3, "contexts": [[1,2],[2,3],[3,1]]}"#).unwrap();
        assert_eq!(s, Scenario::cycle(3).unwrap());
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"observables":3,"contexts":[[1,2],[2,3],[3,1]]}"#);
    }

    #[test]
    fn scenario_rejects_bad_contexts() {
        for bad in [
            r#"{"observables": 3, "contexts": []}"#,
            r#"{"observables": 3, "contexts": [[1,4]]}"#,
            r#"{"observables": 3, "contexts": [[0,1]]}"#,
            r#"{"observables": 3, "contexts": [[2,2]]}"#,
            r#"{"observables": 3, "contexts": [[1,2],[2,1]]}"#,
        ] {
            assert!(serde_json::from_str::<Scenario>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn two_cycle_rejected() {
        assert!(Scenario::cycle(2).is_err());
        assert_eq!(Scenario::cycle(5).unwrap().contexts()[4], MeasurementContext::labeled(5, 1).unwrap());
    }

    #[test]
    fn behavior_json_and_reorientation() {
        let json = r#"{"observables":2,"contexts":[{"context":[1,2],"pp":0.1,"pm":0.2,"mp":0.3,"mm":0.4}]}"#;
        let b: Behavior = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&b).unwrap(), json);
        let rev = b.table(&MeasurementContext::labeled(2, 1).unwrap()).unwrap();
        assert_eq!((rev.pm, rev.mp), (0.3, 0.2));
        assert!(matches!(
            b.table(&MeasurementContext::new(0, 5).unwrap()),
            Err(Error::MissingContext { first: 1, second: 6 })
        ));
    }

    #[test]
    fn behavior_rejects_unnormalized() {
        let json = r#"{"observables":2,"contexts":[{"context":[1,2],"pp":0.1,"pm":0.2,"mp":0.3,"mm":0.5}]}"#;
        assert!(serde_json::from_str::<Behavior>(json).is_err());
        let neg = r#"{"observables":2,"contexts":[{"context":[1,2],"pp":-0.1,"pm":0.3,"mp":0.3,"mm":0.5}]}"#;
        assert!(serde_json::from_str::<Behavior>(neg).is_err());
    }

    #[test]
    fn outcome_serde() {
        assert_eq!(serde_json::to_string(&Outcome::Minus).unwrap(), "-1");
        assert!(serde_json::from_str::<Outcome>("0").is_err());
    }
}
