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

use std::collections::BTreeMap;

use bunching_core::quantum::{
    output_distribution, per_photon_marginal, transition_probability, Complex64, FockState, ModeUnitary,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent amplitude oracle: expand `∏_i (Σ_j U[j][i] a_j†)^{s_i} |0⟩`
/// term by term in creation-operator monomials, then normalize.
fn fock_expansion_probability(u: &ModeUnitary, input: &[usize], output: &[usize]) -> f64 {
    let d = u.dim();
    let mut poly: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
    poly.insert(vec![0; d], Complex64::new(1.0, 0.0));
    for (i, &count) in input.iter().enumerate() {
        for _ in 0..count {
            let mut next: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
            for (mono, c) in &poly {
                for j in 0..d {
                    let mut m = mono.clone();
                    m[j] += 1;
                    *next.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c * u.amplitude(j, i);
                }
            }
            poly = next;
        }
    }
    let fact = |v: &[usize]| v.iter().map(|&n| (1..=n).product::<usize>() as f64).product::<f64>();
    let coeff = poly.get(output).copied().unwrap_or_default();
    coeff.norm_sqr() * fact(output) / fact(input)
}

fn occupations(dim: usize, total: usize) -> Vec<Vec<usize>> {
    if dim == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|k| {
            occupations(dim - 1, total - k).into_iter().map(move |mut rest| {
                rest.insert(0, k);
                rest
            })
        })
        .collect()
}

#[test]
fn hom_examples_against_oracle() {
    let bs = ModeUnitary::beam_splitter();
    assert!(fock_expansion_probability(&bs, &[1, 1], &[1, 1]).abs() < 1e-15);
    assert!((fock_expansion_probability(&bs, &[1, 1], &[2, 0]) - 0.5).abs() < 1e-15);
    let d = output_distribution(&bs, &FockState::new(vec![1, 1])).unwrap();
    for (state, p) in [(vec![2, 0], 0.5), (vec![0, 2], 0.5), (vec![1, 1], 0.0)] {
        assert!((d.probability(&FockState::new(state)) - p).abs() < 1e-10);
    }
    let single = output_distribution(&bs, &FockState::new(vec![1, 0])).unwrap();
    assert!((single.probability(&FockState::new(vec![1, 0])) - 0.5).abs() < 1e-10);
    assert!((single.probability(&FockState::new(vec![0, 1])) - 0.5).abs() < 1e-10);
}

#[test]
fn oracle_equivalence_small_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for dim in 1..=3 {
        for _ in 0..10 {
            let u = ModeUnitary::random(dim, &mut rng).unwrap();
            for total in 1..=3 {
                for input in occupations(dim, total) {
                    for output in occupations(dim, total) {
                        let fast = transition_probability(
                            &u,
                            &FockState::new(input.clone()),
                            &FockState::new(output.clone()),
                        )
                        .unwrap();
                        let slow = fock_expansion_probability(&u, &input, &output);
                        assert!((fast - slow).abs() < 1e-10, "{input:?}->{output:?}: {fast} vs {slow}");
                    }
                }
            }
        }
    }
}

#[test]
fn three_port_bs_with_added_photons_keeps_marginal() {
    let bs = ModeUnitary::beam_splitter();
    for input in [[1, 0], [1, 1], [2, 1], [3, 3], [0, 4]] {
        let d = output_distribution(&bs, &FockState::new(input.to_vec())).unwrap();
        assert!((per_photon_marginal(&d, 0).unwrap() - 0.5).abs() < 1e-10, "{input:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_conservation_marginals(seed in any::<u64>(), dim in 1usize..5, occ in proptest::collection::vec(0usize..3, 4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = ModeUnitary::random(dim, &mut rng).unwrap();
        let mut input: Vec<usize> = occ[..dim].to_vec();
        if input.iter().sum::<usize>() == 0 {
            input[0] = 1;
        }
        let input = FockState::new(input);
        let d = output_distribution(&u, &input).unwrap();
        let total: f64 = d.entries().iter().map(|e| e.p).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for e in d.entries() {
            prop_assert_eq!(e.occupations.total_photons(), input.total_photons());
        }
        let msum: f64 = (0..dim).map(|m| per_photon_marginal(&d, m).unwrap()).sum();
        prop_assert!((msum - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hom_dip_any_phase_convention(phi in -3.2f64..3.2, chi in -3.2f64..3.2) {
        let u = ModeUnitary::beam_splitter_with(std::f64::consts::FRAC_PI_4, phi, chi).unwrap();
        let p = transition_probability(&u, &FockState::new(vec![1, 1]), &FockState::new(vec![1, 1])).unwrap();
        prop_assert!(p < 1e-10);
    }
}
