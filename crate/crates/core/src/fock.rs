//! Occupation and qudit bookkeeping, the photon-copying matrix and exact
//! outcome probabilities.
//!
//! Modes are 0-based throughout. For an occupation `n` of `m` modes the
//! qudit vector lists every occupied mode once per photon in non-decreasing
//! order.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{per_rect, per_ryser_glynn, Matrix};
use crate::scalar::{norm_sqr, Real};

/// Photon count per mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationState(pub Vec<usize>);

impl OccupationState {
    /// `|1^n 0^(m-n)⟩`.
    pub fn standard_input(n: usize, m: usize) -> Self {
        Self((0..m).map(|i| usize::from(i < n)).collect())
    }

    pub fn photons(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    /// `Π_i n_i!`
    pub fn factorial_product<F: Real>(&self) -> F {
        self.0
            .iter()
            .fold(F::one(), |acc, &c| acc * factorial::<F>(c))
    }

    /// Dash-separated counts, e.g. `1-0-2`.
    pub fn dashed(&self) -> String {
        self.0
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// Output modes of individual photons, in sampling order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuditVector(pub Vec<usize>);

impl QuditVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_repeats(&self) -> bool {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.windows(2).any(|w| w[0] == w[1])
    }
}

/// Unordered set of input columns, stored ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColumnSelection(Vec<usize>);

impl ColumnSelection {
    pub fn new(mut cols: Vec<usize>) -> Self {
        cols.sort_unstable();
        cols.dedup();
        Self(cols)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn factorial<F: Real>(n: usize) -> F {
    (2..=n).fold(F::one(), |acc, k| acc * F::from_count(k as u64))
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n)
            .rev()
            .find(|&j| cur[j] > cur[i - 1])
            .expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

pub fn z_from_occupation(s: &OccupationState) -> QuditVector {
    QuditVector(
        s.0.iter()
            .enumerate()
            .flat_map(|(mode, &count)| std::iter::repeat_n(mode, count))
            .collect(),
    )
}

pub fn occupation_from_qudits(q: &QuditVector, m: usize) -> Result<OccupationState> {
    let mut counts = vec![0; m];
    for &r in &q.0 {
        *counts
            .get_mut(r)
            .ok_or_else(|| Error::Domain(format!("mode {r} outside 0..{m}")))? += 1;
    }
    Ok(OccupationState(counts))
}

fn check_modes<F: Real>(u: &Matrix<Complex<F>>, s: &OccupationState, what: &str) -> Result<()> {
    if s.modes() != u.n_rows() || s.modes() != u.n_cols() {
        return Err(Error::Domain(format!(
            "{what} state has {} modes but the unitary is {}x{}",
            s.modes(),
            u.n_rows(),
            u.n_cols()
        )));
    }
    Ok(())
}

/// `n x n` matrix with row `l` copied from the `l`-th output photon's mode
/// and column `h` from the `h`-th input photon's mode. Rows and columns are
/// labelled by position.
pub fn build_v<F: Real>(
    u: &Matrix<Complex<F>>,
    n_out: &OccupationState,
    n_in: &OccupationState,
) -> Result<Matrix<Complex<F>>> {
    check_modes(u, n_out, "output")?;
    check_modes(u, n_in, "input")?;
    if n_out.photons() != n_in.photons() {
        return Err(Error::Domain(format!(
            "photon number mismatch: {} out, {} in",
            n_out.photons(),
            n_in.photons()
        )));
    }
    let rows = z_from_occupation(n_out).0;
    let cols = z_from_occupation(n_in).0;
    let data = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
        .map(|(r, c)| u.get(r, c))
        .collect();
    Matrix::new(rows.len(), cols.len(), data)
}

/// Matrix with rows in sampling order (newest last) and columns in ascending
/// input order.
pub fn build_v_qudit<F: Real>(
    u: &Matrix<Complex<F>>,
    outs: &QuditVector,
    cols: &ColumnSelection,
) -> Result<Matrix<Complex<F>>> {
    if outs.len() != cols.len() {
        return Err(Error::Domain(format!(
            "{} output photons but {} input columns",
            outs.len(),
            cols.len()
        )));
    }
    if let Some(&bad) = outs.0.iter().find(|&&r| r >= u.n_rows()) {
        return Err(Error::Domain(format!("output mode {bad} out of range")));
    }
    if let Some(&bad) = cols.as_slice().iter().find(|&&c| c >= u.n_cols()) {
        return Err(Error::Domain(format!("input column {bad} out of range")));
    }
    u.submatrix(&outs.0, cols.as_slice())
}

/// `|per V|² / Π n_i! n'_i!`
pub fn outcome_probability<F: Real>(
    u: &Matrix<Complex<F>>,
    n_out: &OccupationState,
    n_in: &OccupationState,
) -> Result<F> {
    let v = build_v(u, n_out, n_in)?;
    let p = per_ryser_glynn(&v)?;
    Ok(norm_sqr(p) / (n_out.factorial_product::<F>() * n_in.factorial_product::<F>()))
}

/// Largest outcome space [`exact_distribution`] will enumerate.
pub const EXACT_OUTCOME_CAP: u128 = 1_000_000;

/// Every occupation of `n` photons in `m` modes, lexicographically ascending.
pub fn enumerate_occupations(n: usize, m: usize) -> Vec<OccupationState> {
    fn rec(
        remaining: usize,
        mode: usize,
        m: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<OccupationState>,
    ) {
        if mode + 1 == m {
            cur.push(remaining);
            out.push(OccupationState(cur.clone()));
            cur.pop();
            return;
        }
        for c in 0..=remaining {
            cur.push(c);
            rec(remaining - c, mode + 1, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        if n == 0 {
            out.push(OccupationState(vec![]));
        }
        return out;
    }
    rec(n, 0, m, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Full output distribution for the input occupation `n_in`.
pub fn exact_distribution<F: Real>(
    u: &Matrix<Complex<F>>,
    n_in: &OccupationState,
) -> Result<Vec<(OccupationState, F)>> {
    check_modes(u, n_in, "input")?;
    let (n, m) = (n_in.photons(), n_in.modes());
    let size = binomial(m + n - 1, n);
    if size > EXACT_OUTCOME_CAP {
        return Err(Error::Capacity(format!(
            "{size} outcomes exceeds the enumeration cap of {EXACT_OUTCOME_CAP}"
        )));
    }
    enumerate_occupations(n, m)
        .into_par_iter()
        .map(|out| outcome_probability(u, &out, n_in).map(|p| (out, p)))
        .collect()
}

/// CSV rendering: `occupation,probability` with 17 significant digits.
pub fn distribution_csv<F: Real>(dist: &[(OccupationState, F)]) -> String {
    let mut s = String::from("occupation,probability\n");
    for (occ, p) in dist {
        let p = p.to_f64().unwrap_or(f64::NAN);
        s.push_str(&format!("{},{:.16e}\n", occ.dashed(), p));
    }
    s
}

/// Largest number of column subsets [`marginal_pmf_a`] will sum over.
pub const MARGINAL_TERM_CAP: u128 = 100_000;

/// Marginal probability of the partial qudit outcome `prefix` for the input
/// `|1^n 0^(m-n)⟩`: `((n-k)!/n!) Σ_{|C|=k} |per Ṽ^{prefix, C}|²`.
pub fn marginal_pmf_a<F: Real>(
    u: &Matrix<Complex<F>>,
    prefix: &QuditVector,
    n: usize,
) -> Result<F> {
    let k = prefix.len();
    if k > n {
        return Err(Error::Domain(format!(
            "prefix of {k} photons but only {n} inputs"
        )));
    }
    if n > u.n_cols() {
        return Err(Error::Domain(format!(
            "{n} photons on {} modes",
            u.n_cols()
        )));
    }
    if binomial(n, k) > MARGINAL_TERM_CAP {
        return Err(Error::Capacity(format!("C({n},{k}) column subsets")));
    }
    let mut acc = F::zero();
    for cols in combinations(n, k) {
        let v = build_v_qudit(u, prefix, &ColumnSelection::new(cols))?;
        acc += norm_sqr(per_rect(&v)?);
    }
    Ok(acc * factorial::<F>(n - k) / factorial::<F>(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::per_naive;
    use crate::photonics::{beamsplitter_matrix, haar_unitary, BeamsplitterParams};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    fn haar(m: usize, seed: u64) -> Matrix<Complex64> {
        haar_unitary::<f64, _>(m, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn qudit_conversion() {
        assert_eq!(
            z_from_occupation(&OccupationState(vec![1, 1, 1, 0, 0])).0,
            vec![0, 1, 2]
        );
        assert_eq!(
            z_from_occupation(&OccupationState(vec![2, 0, 0, 1, 0])).0,
            vec![0, 0, 3]
        );
        assert!(z_from_occupation(&OccupationState(vec![0; 4])).is_empty());
        assert_eq!(
            occupation_from_qudits(&QuditVector(vec![2, 0, 0]), 4)
                .unwrap()
                .0,
            vec![2, 0, 1, 0]
        );
        assert!(occupation_from_qudits(&QuditVector(vec![4]), 4).is_err());
        let occ = OccupationState(vec![0, 3, 1, 2]);
        assert_eq!(
            occupation_from_qudits(&z_from_occupation(&occ), 4).unwrap(),
            occ
        );
    }

    #[test]
    fn v_matrix_copies_rows() {
        let u = haar(5, 1);
        let v = build_v(
            &u,
            &OccupationState(vec![2, 0, 0, 1, 0]),
            &OccupationState(vec![1, 1, 1, 0, 0]),
        )
        .unwrap();
        for (l, &r) in [0usize, 0, 3].iter().enumerate() {
            for c in 0..3 {
                assert_eq!(v.get(l, c), u.get(r, c));
            }
        }
        assert_eq!(v.row(0), v.row(1));

        let ones = OccupationState(vec![1; 5]);
        assert_eq!(build_v(&u, &ones, &ones).unwrap().data(), u.data());

        let mut single_in = OccupationState(vec![0; 5]);
        single_in.0[2] = 1;
        let mut single_out = OccupationState(vec![0; 5]);
        single_out.0[4] = 1;
        assert_eq!(
            build_v(&u, &single_out, &single_in).unwrap().data(),
            &[u.get(4, 2)]
        );

        assert!(build_v(&u, &OccupationState(vec![1, 0, 0, 0, 0]), &ones).is_err());
    }

    #[test]
    fn qudit_matrix_matches_occupation_matrix() {
        let u = haar(5, 2);
        let q = build_v_qudit(
            &u,
            &QuditVector(vec![3, 0, 0]),
            &ColumnSelection::new(vec![2, 0, 1]),
        )
        .unwrap();
        assert_eq!(q.row(1), q.row(2));
        let v = build_v(
            &u,
            &OccupationState(vec![2, 0, 0, 1, 0]),
            &OccupationState(vec![1, 1, 1, 0, 0]),
        )
        .unwrap();
        let (a, b) = (per_naive(&q).unwrap(), per_naive(&v).unwrap());
        assert!((a - b).norm() < 1e-13);
        assert!(
            build_v_qudit(&u, &QuditVector(vec![0]), &ColumnSelection::new(vec![0, 1])).is_err()
        );
    }

    #[test]
    fn single_photon_and_hong_ou_mandel() {
        let theta = 0.37;
        let u = beamsplitter_matrix::<f64>(&BeamsplitterParams::new(theta, 0.4, 1.1));
        let p = outcome_probability(
            &u,
            &OccupationState(vec![1, 0]),
            &OccupationState(vec![1, 0]),
        )
        .unwrap();
        assert!((p - theta.cos().powi(2)).abs() < 1e-15);

        let hom = beamsplitter_matrix::<f64>(&BeamsplitterParams::new(FRAC_PI_4, 0.0, 0.0));
        let both = OccupationState(vec![1, 1]);
        assert!(outcome_probability(&hom, &both, &both).unwrap().abs() < 1e-15);
        let bunched = outcome_probability(&hom, &OccupationState(vec![2, 0]), &both).unwrap();
        assert!((bunched - 0.5).abs() < 1e-15);

        let dist = exact_distribution(&hom, &both).unwrap();
        let outs: Vec<_> = dist.iter().map(|(o, _)| o.0.clone()).collect();
        assert_eq!(outs, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert!(
            (dist[0].1 - 0.5).abs() < 1e-15
                && dist[1].1.abs() < 1e-15
                && (dist[2].1 - 0.5).abs() < 1e-15
        );
    }

    #[test]
    fn single_photon_distribution_is_column_magnitudes() {
        let u = haar(4, 3);
        let mut inp = OccupationState(vec![0; 4]);
        inp.0[1] = 1;
        let dist = exact_distribution(&u, &inp).unwrap();
        for (occ, p) in dist {
            let mode = occ.0.iter().position(|&c| c == 1).unwrap();
            assert!((p - u.get(mode, 1).norm_sqr()).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_distribution_normalizes() {
        let u = haar(5, 4);
        let dist = exact_distribution(&u, &OccupationState::standard_input(3, 5)).unwrap();
        assert_eq!(dist.len(), 35);
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_distribution_capacity() {
        let u = Matrix::<Complex64>::identity(40);
        let inp = OccupationState::standard_input(10, 40);
        assert!(matches!(
            exact_distribution(&u, &inp),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn csv_format() {
        let csv = distribution_csv(&[(OccupationState(vec![1, 0, 2]), 0.25f64)]);
        assert_eq!(csv, "occupation,probability\n1-0-2,2.5000000000000000e-1\n");
    }

    #[test]
    fn first_marginal_is_mean_column_weight() {
        let (n, m) = (3, 6);
        let u = haar(m, 5);
        for r in 0..m {
            let p = marginal_pmf_a(&u, &QuditVector(vec![r]), n).unwrap();
            let expected = (0..n).map(|j| u.get(r, j).norm_sqr()).sum::<f64>() / n as f64;
            assert!((p - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn full_marginal_matches_outcome_probability() {
        let (n, m) = (3, 4);
        let u = haar(m, 6);
        let inp = OccupationState::standard_input(n, m);
        for (occ, p) in exact_distribution(&u, &inp).unwrap() {
            let z = z_from_occupation(&occ);
            let pz = marginal_pmf_a(&u, &z, n).unwrap();
            let multinomial = factorial::<f64>(n) / occ.factorial_product::<f64>();
            assert!((p - multinomial * pz).abs() < 1e-10);
        }
    }

    #[test]
    fn qudit_pmf_normalizes() {
        let (n, m) = (2, 4);
        let u = haar(m, 7);
        let mut total = 0.0;
        for a in 0..m {
            for b in 0..m {
                total += marginal_pmf_a(&u, &QuditVector(vec![a, b]), n).unwrap();
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginalization_identity() {
        let (n, m) = (3, 4);
        let u = haar(m, 8);
        for a in 0..m {
            for b in 0..m {
                let parent = marginal_pmf_a(&u, &QuditVector(vec![a, b]), n).unwrap();
                let summed: f64 = (0..m)
                    .map(|c| marginal_pmf_a(&u, &QuditVector(vec![a, b, c]), n).unwrap())
                    .sum();
                assert!((parent - summed).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(9, 3), 84);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(enumerate_occupations(3, 4).len(), 20);
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms[1], vec![0, 2, 1]);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }
}
