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

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size limit exceeded: {what} is {actual}, cap is {cap}")]
    SizeLimit {
        what: &'static str,
        actual: usize,
        cap: usize,
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is not unitary: max |UU† - I| entry is {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("photon number not conserved: input has {input}, output has {output}")]
    Conservation { input: usize, output: usize },

    #[error("index {index} out of range for {what} of size {len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("hidden variables of observables {first} and {second} are tied at {value}")]
    Tie {
        first: usize,
        second: usize,
        value: f64,
    },

    #[error("unsupported λ law: {0}")]
    UnsupportedLaw(String),

    #[error("assignment does not cover observable {observable}")]
    Coverage { observable: usize },

    #[error("context ({first}, {second}) is not part of the behavior")]
    MissingContext { first: usize, second: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("not a projector: {0}")]
    NotProjector(String),

    #[error("linear program: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Process exit status for the CLI: 2 for malformed JSON, 4 for resource
    /// caps, 3 for every other input error, 1 for internal and I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::SizeLimit { .. } => 4,
            Error::Internal(_) | Error::Io(_) => 1,
            _ => 3,
        }
    }
}
