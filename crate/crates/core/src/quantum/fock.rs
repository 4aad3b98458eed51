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

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{permanent, ModeUnitary};
use crate::{Error, Result, PROB_TOL};

/// Photon-number cap for [`output_distribution`].
pub const MAX_PHOTONS: usize = 6;
/// Cap on the number of output patterns enumerated by [`output_distribution`].
pub const MAX_SUPPORT: usize = 1_000_000;

/// Occupation numbers of bosons over modes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockState(Vec<usize>);

impl FockState {
    pub fn new(occupations: Vec<usize>) -> Self {
        Self(occupations)
    }

    pub fn occupations(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total_photons(&self) -> usize {
        self.0.iter().sum()
    }

    /// `∏ n_i!` over modes.
    fn factorial_product(&self) -> f64 {
        self.0
            .iter()
            .map(|&n| (1..=n).map(|k| k as f64).product::<f64>())
            .product()
    }

    /// Mode index of every photon, in mode order, e.g. `(2, 0, 1)` → `[0, 0, 2]`.
    fn photon_modes(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(mode, &n)| std::iter::repeat_n(mode, n))
            .collect()
    }
}

impl From<Vec<usize>> for FockState {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionEntry {
    pub occupations: FockState,
    pub p: f64,
}

/// Output probabilities over Fock states, sorted lexicographically by
/// occupation vector. Serializes as `[{"occupations": [...], "p": x}, ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DistributionEntry>", into = "Vec<DistributionEntry>")]
pub struct OutcomeDistribution {
    entries: Vec<DistributionEntry>,
}

impl OutcomeDistribution {
    /// Validates and sorts a list of entries: every state has the same mode
    /// count and photon number, probabilities lie in `[0, 1]` and sum to one.
    pub fn new(mut entries: Vec<DistributionEntry>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::validation("distribution has no entries"))?;
        let (dim, total) = (first.occupations.dim(), first.occupations.total_photons());
        for e in &entries {
            if e.occupations.dim() != dim {
                return Err(Error::validation("distribution mixes mode counts"));
            }
            if e.occupations.total_photons() != total {
                return Err(Error::Conservation {
                    input: total,
                    output: e.occupations.total_photons(),
                });
            }
            if !(e.p >= -PROB_TOL && e.p <= 1.0 + PROB_TOL) {
                return Err(Error::validation(format!(
                    "probability {} of {} outside [0, 1]",
                    e.p, e.occupations
                )));
            }
        }
        entries.sort_by(|a, b| a.occupations.cmp(&b.occupations));
        if entries.windows(2).any(|w| w[0].occupations == w[1].occupations) {
            return Err(Error::validation("distribution lists a state twice"));
        }
        let sum: f64 = entries.iter().map(|e| e.p).sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::validation(format!(
                "distribution sums to {sum}, not 1"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[DistributionEntry] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries[0].occupations.dim()
    }

    pub fn total_photons(&self) -> usize {
        self.entries[0].occupations.total_photons()
    }

    /// Probability of `state`, zero when it is not in the support.
    pub fn probability(&self, state: &FockState) -> f64 {
        self.entries
            .binary_search_by(|e| e.occupations.cmp(state))
            .map(|k| self.entries[k].p)
            .unwrap_or(0.0)
    }
}

impl TryFrom<Vec<DistributionEntry>> for OutcomeDistribution {
    type Error = Error;

    fn try_from(entries: Vec<DistributionEntry>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<OutcomeDistribution> for Vec<DistributionEntry> {
    fn from(d: OutcomeDistribution) -> Self {
        d.entries
    }
}

fn check_dims(u: &ModeUnitary, state: &FockState) -> Result<()> {
    if state.dim() != u.dim() {
        return Err(Error::Shape(format!(
            "state {} has {} modes, interferometer has {}",
            state,
            state.dim(),
            u.dim()
        )));
    }
    Ok(())
}

/// Probability that `input` scatters into `output`:
/// `|Perm(U[t, s])|² / (∏ s_i! ∏ t_j!)`.
pub fn transition_probability(u: &ModeUnitary, input: &FockState, output: &FockState) -> Result<f64> {
    check_dims(u, input)?;
    check_dims(u, output)?;
    let n = input.total_photons();
    if output.total_photons() != n {
        return Err(Error::Conservation {
            input: n,
            output: output.total_photons(),
        });
    }
    if n == 0 {
        return Err(Error::validation("scattering needs at least one photon"));
    }
    let rows = output.photon_modes();
    let cols = input.photon_modes();
    let sub = DMatrix::from_fn(n, n, |k, l| u.amplitude(rows[k], cols[l]));
    let perm: Complex64 = permanent(&sub)?;
    let p = perm.norm_sqr() / (input.factorial_product() * output.factorial_product());
    Ok(p.clamp(0.0, 1.0))
}

/// All occupation vectors over `dim` modes holding `total` photons, in
/// lexicographic order.
fn compositions(dim: usize, total: usize) -> Vec<FockState> {
    fn rec(dim: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<FockState>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(FockState(prefix.clone()));
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(dim, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, total, &mut Vec::with_capacity(dim), &mut out);
    out
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Full output distribution of `input` through `u`, enumerated over every
/// occupation pattern with the same photon number.
pub fn output_distribution(u: &ModeUnitary, input: &FockState) -> Result<OutcomeDistribution> {
    check_dims(u, input)?;
    let n = input.total_photons();
    if n == 0 {
        return Err(Error::validation("scattering needs at least one photon"));
    }
    if n > MAX_PHOTONS {
        return Err(Error::SizeLimit {
            what: "photon number",
            actual: n,
            cap: MAX_PHOTONS,
        });
    }
    let d = u.dim();
    let support = binomial(n + d - 1, n).unwrap_or(usize::MAX);
    if support > MAX_SUPPORT {
        return Err(Error::SizeLimit {
            what: "output support size",
            actual: support,
            cap: MAX_SUPPORT,
        });
    }
    // Collecting an indexed parallel iterator keeps the lexicographic order.
    let entries = compositions(d, n)
        .into_par_iter()
        .map(|out| {
            let p = transition_probability(u, input, &out)?;
            Ok(DistributionEntry { occupations: out, p })
        })
        .collect::<Result<Vec<_>>>()?;
    OutcomeDistribution::new(entries)
}

/// Expected fraction of the photons found in `mode`.
pub fn per_photon_marginal(dist: &OutcomeDistribution, mode: usize) -> Result<f64> {
    if mode >= dist.dim() {
        return Err(Error::IndexOutOfRange {
            what: "mode",
            index: mode,
            len: dist.dim(),
        });
    }
    let n = dist.total_photons() as f64;
    let expected: f64 = dist
        .entries()
        .iter()
        .map(|e| e.p * e.occupations.occupations()[mode] as f64)
        .sum();
    Ok((expected / n).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoSignallingReport {
    pub marginal_before: f64,
    pub marginal_after: f64,
    pub difference: f64,
}

/// Compares the per-photon marginal of `mode` before and after extra photons
/// are fed into the interferometer. `added_input` must dominate
/// `base_input` mode by mode.
///
/// With the identity interferometer the marginal moves because the added
/// photons stay in their own port; this reflects which photons are counted,
/// not signalling.
pub fn no_signalling_report(
    u: &ModeUnitary,
    base_input: &FockState,
    added_input: &FockState,
    mode: usize,
) -> Result<NoSignallingReport> {
    if base_input.dim() != added_input.dim() {
        return Err(Error::Shape("base and added inputs have different mode counts".into()));
    }
    if base_input
        .occupations()
        .iter()
        .zip(added_input.occupations())
        .any(|(b, a)| a < b)
    {
        return Err(Error::validation(format!(
            "{added_input} does not extend {base_input} by added photons only"
        )));
    }
    let before = per_photon_marginal(&output_distribution(u, base_input)?, mode)?;
    let after = per_photon_marginal(&output_distribution(u, added_input)?, mode)?;
    Ok(NoSignallingReport {
        marginal_before: before,
        marginal_after: after,
        difference: (before - after).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(v: &[usize]) -> FockState {
        FockState::new(v.to_vec())
    }

    #[test]
    fn hom_null_and_bunching() {
        let bs = ModeUnitary::beam_splitter();
        let p11 = transition_probability(&bs, &fs(&[1, 1]), &fs(&[1, 1])).unwrap();
        let p20 = transition_probability(&bs, &fs(&[1, 1]), &fs(&[2, 0])).unwrap();
        assert!(p11 < 1e-15);
        assert!((p20 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_is_trivial() {
        let id = ModeUnitary::identity(2).unwrap();
        assert_eq!(transition_probability(&id, &fs(&[1, 0]), &fs(&[1, 0])).unwrap(), 1.0);
        let d = output_distribution(&id, &fs(&[2, 1])).unwrap();
        assert_eq!(d.probability(&fs(&[2, 1])), 1.0);
        let d30 = output_distribution(&id, &fs(&[3, 0])).unwrap();
        assert_eq!(per_photon_marginal(&d30, 0).unwrap(), 1.0);
    }

    #[test]
    fn conservation_error() {
        let bs = ModeUnitary::beam_splitter();
        let err = transition_probability(&bs, &fs(&[1, 1]), &fs(&[1, 0]));
        assert!(matches!(err, Err(Error::Conservation { input: 2, output: 1 })));
    }

    #[test]
    fn lexicographic_support() {
        let bs = ModeUnitary::beam_splitter();
        let d = output_distribution(&bs, &fs(&[1, 1])).unwrap();
        let states: Vec<_> = d.entries().iter().map(|e| e.occupations.clone()).collect();
        assert_eq!(states, vec![fs(&[0, 2]), fs(&[1, 1]), fs(&[2, 0])]);
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.starts_with(r#"[{"occupations":[0,2],"p":0.5"#), "{json}");
    }

    #[test]
    fn photon_cap() {
        let bs = ModeUnitary::beam_splitter();
        let err = output_distribution(&bs, &fs(&[4, 3]));
        assert!(matches!(err, Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn marginal_mode_out_of_range() {
        let bs = ModeUnitary::beam_splitter();
        let d = output_distribution(&bs, &fs(&[1, 0])).unwrap();
        assert!(matches!(per_photon_marginal(&d, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn no_signalling_examples() {
        let bs = ModeUnitary::beam_splitter();
        let r = no_signalling_report(&bs, &fs(&[1, 0]), &fs(&[1, 1]), 0).unwrap();
        assert!((r.marginal_before - 0.5).abs() < 1e-12);
        assert!((r.marginal_after - 0.5).abs() < 1e-12);
        assert!(r.difference < 1e-12);

        let id = ModeUnitary::identity(2).unwrap();
        let r = no_signalling_report(&id, &fs(&[1, 0]), &fs(&[1, 1]), 0).unwrap();
        assert_eq!((r.marginal_before, r.marginal_after, r.difference), (1.0, 0.5, 0.5));

        let r = no_signalling_report(&bs, &fs(&[1, 0]), &fs(&[2, 1]), 0).unwrap();
        assert!(r.difference < 1e-12);
    }

    #[test]
    fn no_signalling_rejects_removed_photons() {
        let bs = ModeUnitary::beam_splitter();
        let err = no_signalling_report(&bs, &fs(&[1, 1]), &fs(&[0, 2]), 0);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn distribution_validation() {
        let bad = r#"[{"occupations":[1,0],"p":0.5},{"occupations":[0,1],"p":0.4}]"#;
        assert!(serde_json::from_str::<OutcomeDistribution>(bad).is_err());
        let mixed = r#"[{"occupations":[1,0],"p":0.5},{"occupations":[1,1],"p":0.5}]"#;
        assert!(serde_json::from_str::<OutcomeDistribution>(mixed).is_err());
        let ok = r#"[{"occupations":[1,0],"p":0.5},{"occupations":[0,1],"p":0.5}]"#;
        let d: OutcomeDistribution = serde_json::from_str(ok).unwrap();
        assert_eq!(d.entries()[0].occupations, fs(&[0, 1]));
    }
}
