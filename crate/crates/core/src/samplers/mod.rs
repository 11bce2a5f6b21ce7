//! Chain-rule samplers for the input `|1^n 0^(m-n)⟩`.
//!
//! Every sampler draws output modes one photon at a time from unnormalised
//! marginal weights. Randomness comes from a ChaCha stream selected by
//! `(seed, sample index)`, so a sample depends only on the unitary, the
//! seed and its index, never on scheduling.

mod chain;
mod shallow;

pub use chain::{
    cc_b_step_weights, cc_c_step_weights, collision_free_exact_distribution,
    collision_free_step_weights, sample_cc_a, sample_cc_b, sample_cc_c, sample_cc_c_collision_free,
    sample_cc_c_with_stats, CC_A_MAX, CC_B_MAX, CC_C_MAX,
};
pub use shallow::{
    sample_shallow, sample_shallow_with_stats, shallow_marginal_weights, shallow_prepare,
    PreparedShallow, ShallowPlan,
};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cp_permanent::TableStats;
use crate::error::{Error, Result};
use crate::fock::{occupation_from_qudits, QuditVector};
use crate::scalar::Real;

/// Candidate modes with nonnegative unnormalised weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalWeights<F> {
    pub support: Vec<usize>,
    pub weights: Vec<F>,
}

impl<F: Real> MarginalWeights<F> {
    /// Weights over modes `0..w.len()`.
    pub fn dense(weights: Vec<F>) -> Self {
        Self {
            support: (0..weights.len()).collect(),
            weights,
        }
    }

    /// Weight of `mode`, zero when it is not a candidate.
    pub fn weight_of(&self, mode: usize) -> F {
        self.support
            .iter()
            .position(|&s| s == mode)
            .map_or(F::zero(), |i| self.weights[i])
    }

    /// Weights spread over `0..m`.
    pub fn to_dense(&self, m: usize) -> Vec<F> {
        let mut out = vec![F::zero(); m];
        for (&s, &w) in self.support.iter().zip(&self.weights) {
            out[s] = w;
        }
        out
    }
}

/// Draw a candidate with probability proportional to its weight, by a
/// linear scan over the cumulative sum.
pub fn draw_from_weights<F: Real, R: Rng + ?Sized>(
    w: &MarginalWeights<F>,
    rng: &mut R,
) -> Result<usize> {
    let total = w.weights.iter().fold(F::zero(), |a, &x| a + x);
    if !(total > F::zero()) || !total.is_finite() {
        return Err(Error::DegenerateDistribution);
    }
    let target = F::sample_unit(rng) * total;
    let mut acc = F::zero();
    let mut last_positive = 0;
    for (i, &x) in w.weights.iter().enumerate() {
        if x > F::zero() {
            acc += x;
            last_positive = i;
            if target < acc {
                return Ok(w.support[i]);
            }
        }
    }
    Ok(w.support[last_positive])
}

/// Uniformly random permutation of `0..n`; `alpha[i]` is `α(i)`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut alpha: Vec<usize> = (0..n).collect();
    alpha.shuffle(rng);
    alpha
}

/// Independent stream for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One drawn sample: photon modes in drawing order, the column permutation
/// used (empty when the sampler has none) and the occupation counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub r: Vec<usize>,
    pub occupation: Vec<usize>,
    pub alpha: Vec<usize>,
}

impl Sample {
    pub fn new(r: QuditVector, alpha: Vec<usize>, m: usize) -> Result<Self> {
        let occupation = occupation_from_qudits(&r, m)?.0;
        Ok(Self {
            r: r.0,
            occupation,
            alpha,
        })
    }
}

/// Counters gathered while sampling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SamplerStats {
    pub family_evaluations: u64,
    pub tables: TableStats,
}

/// Draw samples `0..count` in parallel, each from its own stream, returned
/// in index order.
pub fn sample_batch<G>(count: usize, seed: u64, draw: G) -> Result<Vec<Sample>>
where
    G: Fn(&mut ChaCha8Rng) -> Result<Sample> + Sync,
{
    (0..count as u64)
        .into_par_iter()
        .map(|i| draw(&mut sample_rng(seed, i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frequencies(weights: Vec<f64>, draws: usize, seed: u64) -> Vec<f64> {
        let w = MarginalWeights::dense(weights);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0usize; w.weights.len()];
        for _ in 0..draws {
            counts[draw_from_weights(&w, &mut rng).unwrap()] += 1;
        }
        counts
            .into_iter()
            .map(|c| c as f64 / draws as f64)
            .collect()
    }

    #[test]
    fn single_positive_weight() {
        assert_eq!(
            frequencies(vec![0.0, 1.0, 0.0], 1000, 1),
            vec![0.0, 1.0, 0.0]
        );
    }

    #[test]
    fn empirical_frequencies() {
        let f = frequencies(vec![1.0, 1.0], 100_000, 2);
        assert!((f[0] - 0.5).abs() < 0.01);
        let f = frequencies(vec![2.0, 1.0, 1.0], 100_000, 3);
        for (got, want) in f.iter().zip([0.5, 0.25, 0.25]) {
            assert!((got - want).abs() < 0.01);
        }
    }

    #[test]
    fn degenerate_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = MarginalWeights::dense(vec![0.0f64; 3]);
        assert_eq!(
            draw_from_weights(&w, &mut rng),
            Err(Error::DegenerateDistribution)
        );
        let w = MarginalWeights::dense(Vec::<f64>::new());
        assert_eq!(
            draw_from_weights(&w, &mut rng),
            Err(Error::DegenerateDistribution)
        );
    }

    #[test]
    fn support_mapping() {
        let w = MarginalWeights {
            support: vec![4, 7],
            weights: vec![0.0f64, 2.0],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(draw_from_weights(&w, &mut rng).unwrap(), 7);
        assert_eq!(w.weight_of(7), 2.0);
        assert_eq!(w.weight_of(1), 0.0);
        assert_eq!(w.to_dense(8)[7], 2.0);
    }

    #[test]
    fn streams_are_independent_of_order() {
        let a: Vec<u64> = (0..4).map(|i| sample_rng(9, i).random()).collect();
        let b: Vec<u64> = (0..4).rev().map(|i| sample_rng(9, i).random()).collect();
        assert_eq!(a, b.into_iter().rev().collect::<Vec<_>>());
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn permutations_are_bijections() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut p = random_permutation(10, &mut rng);
        p.sort_unstable();
        assert_eq!(p, (0..10).collect::<Vec<_>>());
    }
}
