//! Permanent kernels.
//!
//! [`per_ryser_glynn`] is Glynn's formula with the sign vector walked in
//! reflected binary Gray-code order, so every summation is performed in the
//! same order on every run. The sign vector ranges over columns, which makes
//! the result exactly zero whenever a row is exactly zero.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Largest size accepted by [`per_naive`].
pub const NAIVE_MAX: usize = 12;
/// Largest size accepted by [`per_ryser_glynn`].
pub const GLYNN_MAX: usize = 30;

fn require_square<S: Scalar>(m: &Matrix<S>) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::SizeMismatch(format!(
            "permanent of a non-square {}x{} matrix",
            m.n_rows(),
            m.n_cols()
        )));
    }
    Ok(m.n_rows())
}

/// Permanent by direct expansion over all permutations.
pub fn per_naive<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    let n = require_square(m)?;
    if n > NAIVE_MAX {
        return Err(Error::Capacity(format!(
            "per_naive limited to n <= {NAIVE_MAX}, got {n}"
        )));
    }
    fn expand<S: Scalar>(m: &Matrix<S>, row: usize, used: u32) -> S {
        if row == m.n_rows() {
            return S::one();
        }
        let mut acc = S::zero();
        for c in 0..m.n_cols() {
            if used & (1 << c) != 0 {
                continue;
            }
            let v = m.get(row, c);
            if v == S::zero() {
                continue;
            }
            acc += v * expand(m, row + 1, used | (1 << c));
        }
        acc
    }
    Ok(expand(m, 0, 0))
}

/// Permanent by Glynn's formula in Gray-code order, `O(n 2^n)`.
pub fn per_ryser_glynn<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    let n = require_square(m)?;
    if n > GLYNN_MAX {
        return Err(Error::Capacity(format!(
            "per_ryser_glynn limited to n <= {GLYNN_MAX}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(S::one());
    }
    // sums[i] = Σ_j δ_j a_ij with δ starting at all +1.
    let mut sums: Vec<S> = (0..n)
        .map(|i| m.row(i).iter().fold(S::zero(), |a, &v| a + v))
        .collect();
    let mut delta_neg = vec![false; n];
    let mut positive = true;
    let mut total = sums.iter().fold(S::one(), |a, &s| a * s);
    let steps: u64 = 1 << (n - 1);
    for g in 1..steps {
        let col = g.trailing_zeros() as usize + 1;
        let flip_to_neg = !delta_neg[col];
        delta_neg[col] = flip_to_neg;
        for (i, s) in sums.iter_mut().enumerate() {
            let a = m.get(i, col);
            if flip_to_neg {
                *s -= a + a;
            } else {
                *s += a + a;
            }
        }
        positive = !positive;
        let prod = sums.iter().fold(S::one(), |a, &s| a * s);
        if positive {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total / S::from_count(steps))
}

/// Permanent of a possibly rectangular matrix: 1 for the empty matrix and 0
/// when the dimensions differ.
pub fn per_rect<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    if m.n_rows() != m.n_cols() {
        return Ok(S::zero());
    }
    per_ryser_glynn(m)
}

/// Permanents of all column-deleted submatrices of a `(k-1) x k` matrix.
///
/// Element `j` is `per W` with column `j` removed. One Gray-code sweep over
/// row signs is shared by every `j`, with leave-one-out column products from
/// prefix and suffix products, for `O(k 2^k)` total work.
pub fn subpermanent_family<S: Scalar>(w: &Matrix<S>) -> Result<Vec<S>> {
    let k = w.n_cols();
    if w.n_rows() + 1 != k {
        return Err(Error::SizeMismatch(format!(
            "subpermanent family needs a (k-1) x k matrix, got {}x{}",
            w.n_rows(),
            k
        )));
    }
    let n = k - 1;
    if n > GLYNN_MAX {
        return Err(Error::Capacity(format!(
            "subpermanent family limited to k <= {}",
            GLYNN_MAX + 1
        )));
    }
    if n == 0 {
        return Ok(vec![S::one()]);
    }
    // col_sums[c] = Σ_i δ_i w_ic
    let mut col_sums: Vec<S> = (0..k)
        .map(|c| (0..n).fold(S::zero(), |a, i| a + w.get(i, c)))
        .collect();
    let mut delta_neg = vec![false; n];
    let mut positive = true;
    let mut acc = vec![S::zero(); k];
    let mut suffix = vec![S::one(); k + 1];

    let mut accumulate = |sums: &[S], positive: bool, acc: &mut [S]| {
        for c in (0..k).rev() {
            suffix[c] = suffix[c + 1] * sums[c];
        }
        let mut prefix = S::one();
        for j in 0..k {
            let term = prefix * suffix[j + 1];
            if positive {
                acc[j] += term;
            } else {
                acc[j] -= term;
            }
            prefix *= sums[j];
        }
    };

    accumulate(&col_sums, positive, &mut acc);
    let steps: u64 = 1 << (n - 1);
    for g in 1..steps {
        let row = g.trailing_zeros() as usize + 1;
        let flip_to_neg = !delta_neg[row];
        delta_neg[row] = flip_to_neg;
        for (c, s) in col_sums.iter_mut().enumerate() {
            let a = w.get(row, c);
            if flip_to_neg {
                *s -= a + a;
            } else {
                *s += a + a;
            }
        }
        positive = !positive;
        accumulate(&col_sums, positive, &mut acc);
    }
    let scale = S::from_count(steps);
    Ok(acc.into_iter().map(|v| v / scale).collect())
}

/// Laplace expansion along a new last row: `Σ_j coeff[j] · subperms[j]`.
pub fn laplace_extend<S: Scalar>(coeff_row: &[S], subperms: &[S]) -> Result<S> {
    if coeff_row.len() != subperms.len() {
        return Err(Error::SizeMismatch(format!(
            "{} coefficients for {} subpermanents",
            coeff_row.len(),
            subperms.len()
        )));
    }
    Ok(coeff_row
        .iter()
        .zip(subperms)
        .fold(S::zero(), |acc, (&a, &b)| acc + a * b))
}
