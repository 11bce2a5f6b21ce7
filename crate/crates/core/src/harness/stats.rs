//! Distances between discrete distributions over occupations.

use std::collections::BTreeMap;

use crate::fock::OccupationState;
use crate::samplers::Sample;

/// Probability per outcome.
pub type Distribution = BTreeMap<Vec<usize>, f64>;

pub fn distribution_from_pairs<F: Into<f64> + Copy>(
    pairs: &[(OccupationState, F)],
) -> Distribution {
    pairs
        .iter()
        .map(|(o, p)| (o.0.clone(), (*p).into()))
        .collect()
}

/// Observed count per occupation.
pub fn occupation_counts(samples: &[Sample]) -> BTreeMap<Vec<usize>, u64> {
    let mut counts = BTreeMap::new();
    for s in samples {
        *counts.entry(s.occupation.clone()).or_insert(0) += 1;
    }
    counts
}

pub fn empirical(counts: &BTreeMap<Vec<usize>, u64>) -> Distribution {
    let total: u64 = counts.values().sum();
    counts
        .iter()
        .map(|(k, &c)| (k.clone(), c as f64 / total.max(1) as f64))
        .collect()
}

/// `½ Σ |p − q|` over the union of both supports.
pub fn tvd(p: &Distribution, q: &Distribution) -> f64 {
    let mut sum = 0.0;
    for (k, &pk) in p {
        sum += (pk - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &qk) in q {
        if !p.contains_key(k) {
            sum += qk.abs();
        }
    }
    0.5 * sum
}

/// Pearson statistic over outcomes with positive expected probability, and
/// its degrees of freedom. Observations outside that support are ignored.
pub fn chi_square(expected: &Distribution, counts: &BTreeMap<Vec<usize>, u64>) -> (f64, usize) {
    let total: u64 = counts.values().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (k, &p) in expected {
        if p <= 0.0 {
            continue;
        }
        let e = p * total as f64;
        let o = counts.get(k).copied().unwrap_or(0) as f64;
        stat += (o - e) * (o - e) / e;
        cells += 1;
    }
    (stat, cells.saturating_sub(1))
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(pairs: &[(&[usize], f64)]) -> Distribution {
        pairs.iter().map(|(k, p)| (k.to_vec(), *p)).collect()
    }

    #[test]
    fn tvd_extremes() {
        let p = dist(&[(&[1, 0], 0.3), (&[0, 1], 0.7)]);
        assert_eq!(tvd(&p, &p), 0.0);
        let q = dist(&[(&[2, 0], 0.5), (&[0, 2], 0.5)]);
        assert!((tvd(&p, &q) - 1.0).abs() < 1e-15);
        let r = dist(&[(&[1, 0], 0.5), (&[0, 1], 0.5)]);
        assert!((tvd(&p, &r) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn chi_square_of_exact_counts() {
        let p = dist(&[(&[1, 0], 0.25), (&[0, 1], 0.75), (&[2, 0], 0.0)]);
        let counts: BTreeMap<Vec<usize>, u64> =
            [(vec![1, 0], 25), (vec![0, 1], 75)].into_iter().collect();
        assert_eq!(chi_square(&p, &counts), (0.0, 1));
        assert_eq!(
            empirical(&counts),
            dist(&[(&[1, 0], 0.25), (&[0, 1], 0.75)])
        );
    }

    #[test]
    fn slopes() {
        let xs = [1.0, 2.0, 3.0];
        assert!((fit_slope(&xs, &[3.0, 5.0, 7.0]) - 2.0).abs() < 1e-12);
    }
}
