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

//! Engines for auditing contextuality claims about bosonic bunching.
//!
//! The crate bundles three independent engines and a scenario runner on top:
//!
//! * [`quantum`]: exact multi-boson scattering through a linear interferometer,
//!   with transition amplitudes given by matrix permanents (Ryser's formula).
//! * [`hv`]: the λ-ordering hidden-variable model, where in every pairwise
//!   measurement the boson with the larger hidden variable is reflected, plus
//!   deterministic noncontextual assignments. Behaviors are produced exactly
//!   or by seeded Monte Carlo.
//! * [`inequalities`]: correlator sums on cycle scenarios (KCBS on five
//!   observables, Specker's triangle on three), their classical,
//!   no-disturbance and arithmetic bounds, and two notions of event
//!   exclusivity (counterfactual and projector orthogonality).
//! * [`scenario`] and [`report`]: JSON scenario files, the `bunching` CLI
//!   runner and the consolidated reproduction report.
//!
//! Observables are indexed from zero in the Rust API. The JSON formats use
//! one-based observable labels (`A_1`, `A_2`, ...) and zero-based mode indices.

pub mod behavior;
pub mod error;
pub mod hv;
pub mod inequalities;
pub mod lp;
pub mod quantum;
pub mod report;
pub mod reproduce;
pub mod scenario;

pub use error::{Error, Result};

/// Absolute tolerance used for every probability comparison.
pub const PROB_TOL: f64 = 1e-10;
