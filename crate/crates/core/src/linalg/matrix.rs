use std::collections::HashMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Dense row-major matrix whose rows and columns carry identity labels.
///
/// Labels are the vertex names used by the bipartite graph and by tree
/// decompositions. A freshly constructed matrix is labelled `0..n`. Labels
/// are unique along each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    n_rows: usize,
    n_cols: usize,
    data: Vec<S>,
    row_labels: Vec<usize>,
    col_labels: Vec<usize>,
}

fn check_unique(labels: &[usize], axis: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::with_capacity(labels.len());
    for &l in labels {
        if !seen.insert(l) {
            return Err(Error::Domain(format!("duplicate {axis} label {l}")));
        }
    }
    Ok(())
}

impl<S: Scalar> Matrix<S> {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::SizeMismatch(format!(
                "{} entries for a {n_rows}x{n_cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.all_finite()) {
            return Err(Error::NonFinite {
                row: pos / n_cols.max(1),
                col: pos % n_cols.max(1),
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            data,
            row_labels: (0..n_rows).collect(),
            col_labels: (0..n_cols).collect(),
        })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::SizeMismatch("ragged rows".into()));
        }
        Self::new(n_rows, n_cols, rows.into_iter().flatten().collect())
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![S::zero(); n_rows * n_cols],
            row_labels: (0..n_rows).collect(),
            col_labels: (0..n_cols).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    /// Replaces the labels. Lengths must match and labels must be unique.
    pub fn with_labels(mut self, row_labels: Vec<usize>, col_labels: Vec<usize>) -> Result<Self> {
        if row_labels.len() != self.n_rows || col_labels.len() != self.n_cols {
            return Err(Error::SizeMismatch(
                "label count does not match dimensions".into(),
            ));
        }
        check_unique(&row_labels, "row")?;
        check_unique(&col_labels, "column")?;
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    /// Entry by position.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn row_labels(&self) -> &[usize] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[usize] {
        &self.col_labels
    }

    pub fn row_position(&self, id: usize) -> Option<usize> {
        self.row_labels.iter().position(|&l| l == id)
    }

    pub fn col_position(&self, id: usize) -> Option<usize> {
        self.col_labels.iter().position(|&l| l == id)
    }

    /// Entry addressed by labels.
    pub fn get_by_label(&self, row: usize, col: usize) -> Result<S> {
        let i = self.row_position(row).ok_or(Error::Lookup(row))?;
        let j = self.col_position(col).ok_or(Error::Lookup(col))?;
        Ok(self.get(i, j))
    }

    /// Label to position maps for both axes.
    pub fn label_index(&self) -> (HashMap<usize, usize>, HashMap<usize, usize>) {
        (
            self.row_labels
                .iter()
                .enumerate()
                .map(|(p, &l)| (l, p))
                .collect(),
            self.col_labels
                .iter()
                .enumerate()
                .map(|(p, &l)| (l, p))
                .collect(),
        )
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                t.data[j * self.n_rows + i] = self.get(i, j);
            }
        }
        t.row_labels = self.col_labels.clone();
        t.col_labels = self.row_labels.clone();
        t
    }

    /// Matrix product by position; labels are taken from the outer axes.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.n_cols != rhs.n_rows {
            return Err(Error::SizeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows, self.n_cols, rhs.n_rows, rhs.n_cols
            )));
        }
        let mut out = Self::zeros(self.n_rows, rhs.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self.get(i, k);
                if a == S::zero() {
                    continue;
                }
                for j in 0..rhs.n_cols {
                    out.data[i * rhs.n_cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out.row_labels = self.row_labels.clone();
        out.col_labels = rhs.col_labels.clone();
        Ok(out)
    }

    /// Label-preserving extraction of the requested rows and columns, in the
    /// requested order.
    ///
    /// A row or column id may be requested more than once (multiplicity
    /// copying). Copies are distinct vertices, so an axis containing a
    /// repeated id is relabelled by position `0..len`.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let (rmap, cmap) = self.label_index();
        let rpos = rows
            .iter()
            .map(|r| rmap.get(r).copied().ok_or(Error::Lookup(*r)))
            .collect::<Result<Vec<_>>>()?;
        let cpos = cols
            .iter()
            .map(|c| cmap.get(c).copied().ok_or(Error::Lookup(*c)))
            .collect::<Result<Vec<_>>>()?;
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in &rpos {
            for &j in &cpos {
                data.push(self.get(i, j));
            }
        }
        let relabel = |ids: &[usize]| {
            if check_unique(ids, "").is_ok() {
                ids.to_vec()
            } else {
                (0..ids.len()).collect()
            }
        };
        Ok(Self {
            n_rows: rows.len(),
            n_cols: cols.len(),
            data,
            row_labels: relabel(rows),
            col_labels: relabel(cols),
        })
    }

    /// Permutes rows and columns by position: `out[i][j] = self[rp[i]][cp[j]]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        let mut out = Self::zeros(row_perm.len(), col_perm.len());
        for (i, &ri) in row_perm.iter().enumerate() {
            for (j, &cj) in col_perm.iter().enumerate() {
                out.data[i * col_perm.len() + j] = self.get(ri, cj);
            }
        }
        out
    }

    /// Maps every entry through `f`, keeping labels.
    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Matrix<T> {
        Matrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
        }
    }
}

impl<F: Real> Matrix<Complex<F>> {
    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().map(|z| z.conj())
    }

    /// `max(‖U†U − I‖_max, ‖UU† − I‖_max)`; infinite for non-square input.
    pub fn unitarity_defect(&self) -> F {
        if !self.is_square() {
            return F::infinity();
        }
        let adj = self.adjoint();
        let id = Self::identity(self.n_rows);
        let mut worst = F::zero();
        for prod in [adj.matmul(self), self.matmul(&adj)] {
            let prod = prod.expect("square");
            for (a, b) in prod.data.iter().zip(id.data.iter()) {
                worst = worst.max((*a - *b).norm());
            }
        }
        worst
    }

    /// Largest entrywise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> F {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (*a - *b).norm())
            .fold(F::zero(), F::max)
    }
}
