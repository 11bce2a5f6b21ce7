use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;

use super::{draw_from_weights, random_permutation, MarginalWeights, Sample, SamplerStats};
use crate::error::{Error, Result};
use crate::fock::{
    build_v_qudit, factorial, marginal_pmf_a, permutations, ColumnSelection, OccupationState,
    QuditVector,
};
use crate::linalg::{laplace_extend, per_ryser_glynn, subpermanent_family, Matrix};
use crate::scalar::{norm_sqr, Real};

/// Photon limit of [`sample_cc_a`].
pub const CC_A_MAX: usize = 6;
/// Photon limit of [`sample_cc_b`].
pub const CC_B_MAX: usize = 20;
/// Photon limit of [`sample_cc_c`].
pub const CC_C_MAX: usize = 25;

pub(crate) fn check_setting<F: Real>(u: &Matrix<Complex<F>>, n: usize, cap: usize) -> Result<()> {
    if !u.is_square() {
        return Err(Error::SizeMismatch(format!(
            "{}x{} unitary",
            u.n_rows(),
            u.n_cols()
        )));
    }
    if n == 0 || n > u.n_cols() {
        return Err(Error::Domain(format!(
            "{n} photons on {} modes",
            u.n_cols()
        )));
    }
    if n > cap {
        return Err(Error::Capacity(format!(
            "{n} photons exceeds the limit of {cap}"
        )));
    }
    Ok(())
}

fn check_step(prefix: &[usize], alpha: &[usize], k: usize) -> Result<()> {
    if k == 0 || k > alpha.len() || prefix.len() + 1 != k {
        return Err(Error::Domain(format!(
            "step {k} with a prefix of {} photons and {} columns",
            prefix.len(),
            alpha.len()
        )));
    }
    Ok(())
}

/// Exact chain rule over all column subsets.
pub fn sample_cc_a<F: Real, R: Rng + ?Sized>(
    u: &Matrix<Complex<F>>,
    n: usize,
    rng: &mut R,
) -> Result<Sample> {
    check_setting(u, n, CC_A_MAX)?;
    let m = u.n_rows();
    let mut prefix = QuditVector(Vec::with_capacity(n));
    for _ in 0..n {
        let mut weights = Vec::with_capacity(m);
        for i in 0..m {
            prefix.0.push(i);
            weights.push(marginal_pmf_a(u, &prefix, n)?);
            prefix.0.pop();
        }
        prefix
            .0
            .push(draw_from_weights(&MarginalWeights::dense(weights), rng)?);
    }
    Sample::new(prefix, Vec::new(), m)
}

/// Step-`k` weights `|per Ṽ^{(prefix, i), α(0..k)}|²` for every mode `i`.
pub fn cc_b_step_weights<F: Real>(
    u: &Matrix<Complex<F>>,
    prefix: &[usize],
    alpha: &[usize],
    k: usize,
) -> Result<Vec<F>> {
    check_step(prefix, alpha, k)?;
    let cols = ColumnSelection::new(alpha[..k].to_vec());
    let mut rows = QuditVector(prefix.to_vec());
    (0..u.n_rows())
        .map(|i| {
            rows.0.push(i);
            let v = build_v_qudit(u, &rows, &cols);
            rows.0.pop();
            Ok(norm_sqr(per_ryser_glynn(&v?)?))
        })
        .collect()
}

/// Same weights as [`cc_b_step_weights`], from one subpermanent family and
/// a Laplace expansion per candidate.
pub fn cc_c_step_weights<F: Real>(
    u: &Matrix<Complex<F>>,
    prefix: &[usize],
    alpha: &[usize],
    k: usize,
) -> Result<Vec<F>> {
    check_step(prefix, alpha, k)?;
    let cols = &alpha[..k];
    let family = subpermanent_family(&u.submatrix(prefix, cols)?)?;
    let mut coeff = vec![Complex::new(F::zero(), F::zero()); k];
    (0..u.n_rows())
        .map(|i| {
            for (c, &col) in coeff.iter_mut().zip(cols) {
                *c = u.get(i, col);
            }
            Ok(norm_sqr(laplace_extend(&coeff, &family)?))
        })
        .collect()
}

/// [`cc_c_step_weights`] with the modes already in `prefix` zeroed.
pub fn collision_free_step_weights<F: Real>(
    u: &Matrix<Complex<F>>,
    prefix: &[usize],
    alpha: &[usize],
    k: usize,
) -> Result<Vec<F>> {
    let mut w = cc_c_step_weights(u, prefix, alpha, k)?;
    for &r in prefix {
        w[r] = F::zero();
    }
    Ok(w)
}

fn chain_with_alpha<F, R, W>(
    u: &Matrix<Complex<F>>,
    n: usize,
    rng: &mut R,
    mut step: W,
) -> Result<Sample>
where
    F: Real,
    R: Rng + ?Sized,
    W: FnMut(&[usize], &[usize], usize) -> Result<Vec<F>>,
{
    let alpha = random_permutation(n, rng);
    let mut prefix = Vec::with_capacity(n);
    for k in 1..=n {
        let w = step(&prefix, &alpha, k)?;
        prefix.push(draw_from_weights(&MarginalWeights::dense(w), rng)?);
    }
    Sample::new(QuditVector(prefix), alpha, u.n_rows())
}

/// Chain rule over a random column permutation, one permanent per candidate.
pub fn sample_cc_b<F: Real, R: Rng + ?Sized>(
    u: &Matrix<Complex<F>>,
    n: usize,
    rng: &mut R,
) -> Result<Sample> {
    check_setting(u, n, CC_B_MAX)?;
    chain_with_alpha(u, n, rng, |p, a, k| cc_b_step_weights(u, p, a, k))
}

/// Chain rule over a random column permutation, one subpermanent family per
/// step.
pub fn sample_cc_c<F: Real, R: Rng + ?Sized>(
    u: &Matrix<Complex<F>>,
    n: usize,
    rng: &mut R,
) -> Result<Sample> {
    sample_cc_c_with_stats(u, n, rng, &mut SamplerStats::default())
}

pub fn sample_cc_c_with_stats<F: Real, R: Rng + ?Sized>(
    u: &Matrix<Complex<F>>,
    n: usize,
    rng: &mut R,
    stats: &mut SamplerStats,
) -> Result<Sample> {
    check_setting(u, n, CC_C_MAX)?;
    chain_with_alpha(u, n, rng, |p, a, k| {
        stats.family_evaluations += 1;
        cc_c_step_weights(u, p, a, k)
    })
}

/// [`sample_cc_c`] that never places two photons in one mode.
pub fn sample_cc_c_collision_free<F: Real, R: Rng + ?Sized>(
    u: &Matrix<Complex<F>>,
    n: usize,
    rng: &mut R,
) -> Result<Sample> {
    check_setting(u, n, CC_C_MAX)?;
    chain_with_alpha(u, n, rng, |p, a, k| collision_free_step_weights(u, p, a, k))
}

/// Largest number of drawing sequences [`collision_free_exact_distribution`]
/// will walk.
pub const COLLISION_FREE_SEQUENCE_CAP: u128 = 10_000_000;

/// Exact output law of [`sample_cc_c_collision_free`], by walking every
/// permutation and every sequence of distinct modes. Outcomes are listed in
/// ascending occupation order and only reachable ones appear.
pub fn collision_free_exact_distribution<F: Real>(
    u: &Matrix<Complex<F>>,
    n: usize,
) -> Result<Vec<(OccupationState, F)>> {
    check_setting(u, n, CC_A_MAX)?;
    let m = u.n_rows();
    let sequences =
        (0..n).fold(1u128, |acc, i| acc * (m - i) as u128) * (1..=n as u128).product::<u128>();
    if sequences > COLLISION_FREE_SEQUENCE_CAP {
        return Err(Error::Capacity(format!("{sequences} drawing sequences")));
    }

    fn walk<F: Real>(
        u: &Matrix<Complex<F>>,
        alpha: &[usize],
        prefix: &mut Vec<usize>,
        prob: F,
        out: &mut BTreeMap<Vec<usize>, F>,
    ) -> Result<()> {
        if prefix.len() == alpha.len() {
            let mut occ = vec![0; u.n_rows()];
            for &r in prefix.iter() {
                occ[r] += 1;
            }
            *out.entry(occ).or_insert(F::zero()) += prob;
            return Ok(());
        }
        let w = collision_free_step_weights(u, prefix, alpha, prefix.len() + 1)?;
        let total = w.iter().fold(F::zero(), |a, &x| a + x);
        if !(total > F::zero()) {
            return Ok(());
        }
        for (i, &wi) in w.iter().enumerate() {
            if wi > F::zero() {
                prefix.push(i);
                walk(u, alpha, prefix, prob * wi / total, out)?;
                prefix.pop();
            }
        }
        Ok(())
    }

    let mut out = BTreeMap::new();
    let share = F::one() / factorial::<F>(n);
    for alpha in permutations(n) {
        walk(u, &alpha, &mut Vec::with_capacity(n), share, &mut out)?;
    }
    Ok(out
        .into_iter()
        .map(|(occ, p)| (OccupationState(occ), p))
        .collect())
}
