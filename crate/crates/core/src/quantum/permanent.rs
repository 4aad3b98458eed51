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

use crate::{Error, Result};

/// Largest matrix accepted by [`permanent`].
pub const MAX_PERMANENT_DIM: usize = 16;

/// Permanent of a square complex matrix by Ryser's formula.
///
/// Subsets of columns are visited in Gray-code order so each step adds or
/// removes a single column from the running row sums, giving `O(2^n · n)`
/// work. The visiting order is fixed, so results are bit-for-bit
/// reproducible. The permanent of the empty matrix is 1.
pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::Shape(format!(
            "permanent needs a square matrix, got {rows}x{cols}"
        )));
    }
    let n = rows;
    if n > MAX_PERMANENT_DIM {
        return Err(Error::SizeLimit {
            what: "permanent dimension",
            actual: n,
            cap: MAX_PERMANENT_DIM,
        });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    for k in 1u32..(1u32 << n) {
        let bit = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        let added = gray & (1 << bit) != 0;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            if added {
                *sum += m[(i, bit)];
            } else {
                *sum -= m[(i, bit)];
            }
        }
        let product = row_sums
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s);
        if gray.count_ones() % 2 == 0 {
            total += product;
        } else {
            total -= product;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}
