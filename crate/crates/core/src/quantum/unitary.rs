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

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Maximum absolute entry of `U U† - I` accepted for a unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Single-particle interferometer matrix. Entry `(j, i)` is the amplitude for
/// a photon entering mode `i` to leave through mode `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UnitaryJson", into = "UnitaryJson")]
pub struct ModeUnitary {
    matrix: DMatrix<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitaryJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl ModeUnitary {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c || r == 0 {
            return Err(Error::Shape(format!(
                "interferometer must be a non-empty square matrix, got {r}x{c}"
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("interferometer has non-finite entries"));
        }
        let product = &matrix * matrix.adjoint();
        let deviation = (0..r)
            .flat_map(|i| (0..r).map(move |j| (i, j)))
            .map(|(i, j)| {
                let target = if i == j { 1.0 } else { 0.0 };
                (product[(i, j)] - Complex64::new(target, 0.0)).norm()
            })
            .fold(0.0_f64, f64::max);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    /// Builds a unitary from row-major real and imaginary parts.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let d = re.len();
        if im.len() != d || re.iter().chain(im).any(|row| row.len() != d) {
            return Err(Error::Shape(format!(
                "re/im must both be {d}x{d} row-major arrays"
            )));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| Complex64::new(re[i][j], im[i][j])))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    /// The default balanced beam splitter `(1/√2)·[[1, 1], [1, −1]]`.
    pub fn beam_splitter() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            matrix: DMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(h, 0.0),
                    Complex64::new(h, 0.0),
                    Complex64::new(h, 0.0),
                    Complex64::new(-h, 0.0),
                ],
            ),
        }
    }

    /// General two-mode beam splitter with transmission amplitude `cos θ` and
    /// free phases on the reflected paths.
    pub fn beam_splitter_with(theta: f64, phi: f64, chi: f64) -> Result<Self> {
        let (s, c) = theta.sin_cos();
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(c, 0.0),
                Complex64::from_polar(s, phi),
                Complex64::from_polar(-s, chi),
                Complex64::from_polar(c, phi + chi),
            ],
        );
        Self::new(m)
    }

    /// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
    /// `R`'s diagonal absorbed into `Q`.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be positive".into()));
        }
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        });
        let qr = g.qr();
        let (mut q, r) = qr.unpack();
        for j in 0..dim {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
        Self::new(q)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Amplitude for a single photon from `input` mode to `output` mode.
    pub fn amplitude(&self, output: usize, input: usize) -> Complex64 {
        self.matrix[(output, input)]
    }
}

impl TryFrom<UnitaryJson> for ModeUnitary {
    type Error = Error;

    fn try_from(j: UnitaryJson) -> Result<Self> {
        if j.re.len() != j.dim {
            return Err(Error::Shape(format!(
                "declared dim {} but {} rows given",
                j.dim,
                j.re.len()
            )));
        }
        Self::from_parts(&j.re, &j.im)
    }
}

impl From<ModeUnitary> for UnitaryJson {
    fn from(u: ModeUnitary) -> Self {
        let d = u.dim();
        UnitaryJson {
            dim: d,
            re: (0..d).map(|i| (0..d).map(|j| u.matrix[(i, j)].re).collect()).collect(),
            im: (0..d).map(|i| (0..d).map(|j| u.matrix[(i, j)].im).collect()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_unitary() {
        let err = ModeUnitary::from_parts(&[vec![1.0, 1.0], vec![0.0, 1.0]], &[vec![0.0; 2], vec![0.0; 2]]);
        assert!(matches!(err, Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn rejects_ragged() {
        let err = ModeUnitary::from_parts(&[vec![1.0], vec![0.0, 1.0]], &[vec![0.0], vec![0.0, 0.0]]);
        assert!(matches!(err, Err(Error::Shape(_))));
    }

    #[test]
    fn json_round_trip() {
        let u = ModeUnitary::beam_splitter();
        let s = serde_json::to_string(&u).unwrap();
        assert!(s.contains("\"dim\":2"));
        let back: ModeUnitary = serde_json::from_str(&s).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn dim_mismatch_in_json() {
        let s = r#"{"dim": 3, "re": [[1,0],[0,1]], "im": [[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<ModeUnitary>(s).is_err());
    }

    #[test]
    fn random_unitaries_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..=6 {
            let u = ModeUnitary::random(d, &mut rng).unwrap();
            assert_eq!(u.dim(), d);
        }
    }

    #[test]
    fn general_beam_splitter_is_unitary() {
        assert!(ModeUnitary::beam_splitter_with(0.3, 1.1, -0.4).is_ok());
    }
}
