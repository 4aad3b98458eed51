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

//! Exact linear optics for indistinguishable bosons.
//!
//! A state with `s_i` photons in input mode `i` scatters through the
//! single-particle unitary `U` with amplitude `Perm(U[t, s]) / sqrt(∏ s_i! ∏ t_j!)`,
//! where `U[t, s]` repeats row `j` of `U` `t_j` times and column `i` `s_i`
//! times. No interaction term enters anywhere: the single-particle unitary is
//! the whole description.

mod fock;
mod permanent;
mod unitary;

pub use fock::{
    no_signalling_report, output_distribution, per_photon_marginal, transition_probability,
    DistributionEntry, FockState, NoSignallingReport, OutcomeDistribution, MAX_PHOTONS,
    MAX_SUPPORT,
};
pub use permanent::{permanent, MAX_PERMANENT_DIM};
pub use unitary::{ModeUnitary, UNITARY_TOL};

pub use num_complex::Complex64;
