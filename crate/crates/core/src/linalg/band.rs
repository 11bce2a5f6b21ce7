use num_complex::Complex;
use rand::Rng;

use crate::linalg::Matrix;
use crate::scalar::{Real, Scalar};

/// Magnitude at or below which an entry counts as zero when no structural
/// mask is available.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

/// Lower and upper bandwidths: entry `(i, j)` vanishes whenever
/// `i - j > lower` or `j - i > upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Bandwidths {
    pub lower: usize,
    pub upper: usize,
}

impl Bandwidths {
    pub fn new(lower: usize, upper: usize) -> Self {
        Self { lower, upper }
    }

    /// `lower + upper + 1`, the number of diagonals spanned by the band.
    pub fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    /// Rows of the band in column `j` of a matrix with `n_rows` rows.
    pub fn rows_of_column(&self, j: usize, n_rows: usize) -> std::ops::Range<usize> {
        let lo = j.saturating_sub(self.upper);
        let hi = (j + self.lower + 1).min(n_rows);
        lo..hi.max(lo)
    }
}

/// Boolean pattern of structurally nonzero entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralMask {
    n_rows: usize,
    n_cols: usize,
    bits: Vec<bool>,
}

impl StructuralMask {
    pub fn empty(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            bits: vec![false; n_rows * n_cols],
        }
    }

    pub fn diagonal(n: usize) -> Self {
        let mut m = Self::empty(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Entries with magnitude above `tol`.
    pub fn from_matrix<S: Scalar>(m: &Matrix<S>, tol: f64) -> Self {
        Self {
            n_rows: m.n_rows(),
            n_cols: m.n_cols(),
            bits: m.data().iter().map(|v| v.magnitude() > tol).collect(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.n_cols + j] = v;
    }

    /// Pattern of the product `self · rhs`, assuming no accidental
    /// cancellation.
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.n_cols, rhs.n_rows, "mask dimensions");
        let mut out = Self::empty(self.n_rows, rhs.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                if !self.get(i, k) {
                    continue;
                }
                for j in 0..rhs.n_cols {
                    if rhs.get(k, j) {
                        out.set(i, j, true);
                    }
                }
            }
        }
        out
    }

    /// Rows that are nonzero in column `j`.
    pub fn column_support(&self, j: usize) -> Vec<usize> {
        (0..self.n_rows).filter(|&i| self.get(i, j)).collect()
    }

    pub fn bandwidths(&self) -> Bandwidths {
        let mut bw = Bandwidths::default();
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                if self.get(i, j) {
                    if i > j {
                        bw.lower = bw.lower.max(i - j);
                    } else {
                        bw.upper = bw.upper.max(j - i);
                    }
                }
            }
        }
        bw
    }

    /// Largest number of nonzeros in any single row or column.
    pub fn max_line_support(&self) -> usize {
        let rows = (0..self.n_rows).map(|i| (0..self.n_cols).filter(|&j| self.get(i, j)).count());
        let cols = (0..self.n_cols).map(|j| self.column_support(j).len());
        rows.chain(cols).max().unwrap_or(0)
    }
}

/// Minimal bandwidths such that every entry outside the band has magnitude
/// at most `tol`.
pub fn bandwidths_of<S: Scalar>(m: &Matrix<S>, tol: f64) -> Bandwidths {
    StructuralMask::from_matrix(m, tol).bandwidths()
}

/// Matrix whose entries inside the band are independent standard complex
/// Gaussians and whose entries outside are exactly zero.
pub fn random_banded_matrix<F: Real, R: Rng + ?Sized>(
    n_rows: usize,
    n_cols: usize,
    bw: Bandwidths,
    rng: &mut R,
) -> Matrix<Complex<F>> {
    let scale = F::FRAC_1_SQRT_2();
    let mut data = Vec::with_capacity(n_rows * n_cols);
    for i in 0..n_rows {
        for j in 0..n_cols {
            let inside = i <= j + bw.lower && j <= i + bw.upper;
            data.push(if inside {
                Complex::new(F::sample_normal(rng) * scale, F::sample_normal(rng) * scale)
            } else {
                Complex::new(F::zero(), F::zero())
            });
        }
    }
    Matrix::new(n_rows, n_cols, data).expect("gaussian entries are finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn diagonal_has_zero_bandwidths() {
        let m = Matrix::<f64>::identity(5);
        assert_eq!(bandwidths_of(&m, DEFAULT_ZERO_TOL), Bandwidths::new(0, 0));
        assert_eq!(
            StructuralMask::from_matrix(&m, DEFAULT_ZERO_TOL).max_line_support(),
            1
        );
    }

    #[test]
    fn tolerance_hides_noise() {
        let mut m = Matrix::<f64>::identity(4);
        m.set(3, 0, 1e-14);
        m.set(0, 2, 0.5);
        assert_eq!(bandwidths_of(&m, DEFAULT_ZERO_TOL), Bandwidths::new(0, 2));
        assert_eq!(bandwidths_of(&m, 0.0), Bandwidths::new(3, 2));
    }

    #[test]
    fn random_band_is_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let m = random_banded_matrix::<f64, _>(7, 6, Bandwidths::new(2, 1), &mut rng);
        assert_eq!(bandwidths_of(&m, 0.0), Bandwidths::new(2, 1));
    }

    #[test]
    fn band_rows_are_clipped() {
        let bw = Bandwidths::new(1, 2);
        assert_eq!(bw.rows_of_column(0, 6), 0..2);
        assert_eq!(bw.rows_of_column(2, 6), 0..4);
        assert_eq!(bw.rows_of_column(6, 6), 4..6);
    }
}
