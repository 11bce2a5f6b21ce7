//! Property checks across modules.

use bosonsim::cp_permanent::permanent_from_tree;
use bosonsim::fock::{
    enumerate_occupations, exact_distribution, occupation_from_qudits, z_from_occupation,
    OccupationState,
};
use bosonsim::harness::{format_matrix, parse_matrix, tvd};
use bosonsim::linalg::{per_naive, per_ryser_glynn, random_banded_matrix, Bandwidths};
use bosonsim::photonics::{compose_circuit, haar_unitary, random_shallow_circuit};
use bosonsim::samplers::{
    collision_free_step_weights, random_permutation, shallow_marginal_weights, shallow_prepare,
    ShallowPlan,
};
use bosonsim::treedec::{graph_of, linear_banded_decomposition, permute_columns, validate};
use bosonsim::{Complex, ComplexMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn banded(n: usize, lower: usize, upper: usize, seed: u64) -> ComplexMatrix {
    random_banded_matrix(
        n,
        n,
        Bandwidths::new(lower, upper),
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
}

fn close(a: Complex, b: Complex, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernels_agree(n in 1usize..7, lower in 0usize..4, upper in 0usize..4, seed: u64) {
        let m = banded(n, lower, upper, seed);
        let naive = per_naive(&m).unwrap();
        prop_assert!(close(per_ryser_glynn(&m).unwrap(), naive, 1e-10));
        let t = linear_banded_decomposition(&m, Bandwidths::new(lower, upper)).unwrap();
        prop_assert_eq!(validate(&t, &graph_of(&m, None)), Ok(()));
        prop_assert!(close(permanent_from_tree(&t, &m).unwrap(), naive, 1e-10));
    }

    #[test]
    fn permanent_ignores_row_and_column_order(n in 1usize..7, seed: u64) {
        let m = banded(n, n, n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let (rows, cols) = (random_permutation(n, &mut rng), random_permutation(n, &mut rng));
        let shuffled = m.submatrix(&rows, &cols).unwrap();
        prop_assert!(close(per_ryser_glynn(&shuffled).unwrap(), per_naive(&m).unwrap(), 1e-10));
    }

    #[test]
    fn permanent_is_homogeneous_in_each_row(n in 1usize..6, row in 0usize..6, seed: u64) {
        let m = banded(n, n, n, seed);
        let row = row % n;
        let c = Complex::new(0.3, -1.7);
        let mut scaled = m.clone();
        for j in 0..n {
            scaled.set(row, j, m.get(row, j) * c);
        }
        prop_assert!(close(per_naive(&scaled).unwrap(), per_naive(&m).unwrap() * c, 1e-10));
    }

    #[test]
    fn relabelled_trees_stay_valid(n in 2usize..7, bw in 0usize..3, seed: u64) {
        let m = banded(n, bw, bw, seed);
        let t = linear_banded_decomposition(&m, Bandwidths::new(bw, bw)).unwrap();
        let alpha = random_permutation(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let relabelled = permute_columns(&t, &alpha).unwrap();
        // Column i of the permuted matrix is column alpha[i] of the original.
        // Submatrices keep the original labels, so relabel positionally.
        let pm = m
            .submatrix(&(0..n).collect::<Vec<_>>(), &alpha)
            .unwrap()
            .with_labels((0..n).collect(), (0..n).collect())
            .unwrap();
        prop_assert_eq!(validate(&relabelled, &graph_of(&pm, None)), Ok(()));
        prop_assert!(close(permanent_from_tree(&relabelled, &pm).unwrap(), per_naive(&m).unwrap(), 1e-10));
    }

    #[test]
    fn circuits_are_unitary(m in 2usize..24, depth in 1usize..6, seed: u64) {
        let spec = random_shallow_circuit(m, depth, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let c = compose_circuit::<f64>(&spec).unwrap();
        prop_assert!(c.unitary.unitarity_defect() < 1e-12);
        prop_assert!(c.structural_width() <= (2 * depth).min(m));
    }

    #[test]
    fn exact_distribution_is_normalised(m in 2usize..6, n in 1usize..4, seed: u64) {
        prop_assume!(n <= m);
        let u = haar_unitary::<f64, _>(m, &mut ChaCha8Rng::seed_from_u64(seed));
        let dist = exact_distribution(&u, &OccupationState::standard_input(n, m)).unwrap();
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!(dist.iter().all(|(o, p)| *p >= 0.0 && o.photons() == n));
    }

    #[test]
    fn qudit_round_trip(m in 1usize..6, n in 0usize..4, pick: prop::sample::Index) {
        let all = enumerate_occupations(n, m);
        let occ = &all[pick.index(all.len())];
        prop_assert_eq!(&occupation_from_qudits(&z_from_occupation(occ), m).unwrap(), occ);
    }

    #[test]
    fn shallow_weights_match_dense(m in 6usize..14, depth in 1usize..3, n in 1usize..5, seed: u64) {
        prop_assume!(2 * depth < m && n <= m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_shallow_circuit(m, depth, &mut rng).unwrap();
        let c = compose_circuit::<f64>(&spec).unwrap();
        let plan = ShallowPlan::new(&c, n).unwrap();
        let alpha = random_permutation(n, &mut rng);
        let prepared = shallow_prepare(&plan, &alpha).unwrap();
        let prefix: Vec<usize> = random_permutation(m, &mut rng)[..n - 1].to_vec();
        let dense = collision_free_step_weights(&c.unitary, &prefix, &alpha, n).unwrap();
        let mut stats = Default::default();
        match shallow_marginal_weights(&prepared, &prefix, n, &mut stats) {
            Ok(w) => {
                for (&a, &b) in w.to_dense(m).iter().zip(&dense) {
                    prop_assert!((a - b).abs() <= 1e-9 * b + 1e-20);
                }
                prop_assert!(prefix.iter().all(|p| !w.support.contains(p)));
            }
            Err(_) => prop_assert!(dense.iter().all(|&b| b <= 1e-20)),
        }
    }

    #[test]
    fn matrix_text_round_trip(n in 1usize..5, seed: u64) {
        let m = banded(n, 1, 2, seed);
        prop_assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn tvd_is_a_metric(a in prop::collection::vec(0.0f64..1.0, 4), b in prop::collection::vec(0.0f64..1.0, 4)) {
        let norm = |v: &[f64]| {
            let s: f64 = v.iter().sum::<f64>().max(1e-12);
            v.iter().enumerate().map(|(i, x)| (vec![i], x / s)).collect()
        };
        let (p, q) = (norm(&a), norm(&b));
        let d = tvd(&p, &q);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert!((d - tvd(&q, &p)).abs() < 1e-15);
    }
}
