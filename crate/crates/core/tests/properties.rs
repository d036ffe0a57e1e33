use blockpos::complexity::{complexity_character_oracle, complexity_general, complexity_rectangular};
use blockpos::linalg::{hermitian_eigenvalues, max_abs_diff, random_hermitian, CMat};
use blockpos::partitions::{
    admissible_mus, complement_in_rectangle, contains, dim_specht, dim_unitary_irrep, enumerate_partitions,
    remove_first_column, Partition,
};
use blockpos::permutation::Permutation;
use blockpos::reduced_sdp::{solve_dense, SdpTolerances, TraceMode};
use blockpos::symfun::{pieri_one_box, schur_eval, Spectrum};
use blockpos::tensor_lab::{perm_matrix, FactorPair, HermitianOperator};
use blockpos::witness_search::{f_objective, schmidt_objective};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn partition_strategy(max_size: usize, max_rows: usize) -> impl Strategy<Value = Partition> {
    (1..=max_size).prop_flat_map(move |n| {
        let all = enumerate_partitions(n, max_rows);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

fn permutation_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(Permutation::from_images)
}

/// Standard Young tableaux counted by removing corners.
fn count_syt(parts: &mut Vec<usize>) -> u64 {
    if parts.iter().all(|&p| p == 0) {
        return 1;
    }
    let mut total = 0;
    for i in 0..parts.len() {
        let below = parts.get(i + 1).copied().unwrap_or(0);
        if parts[i] > below {
            parts[i] -= 1;
            total += count_syt(parts);
            parts[i] += 1;
        }
    }
    total
}

/// Semistandard tableaux with entries `< m`.
fn count_ssyt(lambda: &Partition, m: usize) -> u64 {
    let cells: Vec<(usize, usize)> = lambda.cells().map(|c| (c.row - 1, c.col - 1)).collect();
    let mut fill = vec![vec![0usize; lambda.part(0).max(1)]; lambda.len().max(1)];
    fn rec(i: usize, cells: &[(usize, usize)], fill: &mut Vec<Vec<usize>>, m: usize) -> u64 {
        if i == cells.len() {
            return 1;
        }
        let (r, c) = cells[i];
        let lo = (if c > 0 { fill[r][c - 1] } else { 0 }).max(if r > 0 { fill[r - 1][c] + 1 } else { 0 });
        (lo..m)
            .map(|v| {
                fill[r][c] = v;
                rec(i + 1, cells, fill, m)
            })
            .sum()
    }
    rec(0, &cells, &mut fill, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_is_involution(lambda in partition_strategy(12, 12)) {
        prop_assert_eq!(lambda.conjugate().conjugate(), lambda.clone());
        prop_assert_eq!(lambda.conjugate().size(), lambda.size());
        prop_assert_eq!(dim_specht(&lambda.conjugate()), dim_specht(&lambda));
    }

    #[test]
    fn hook_formula_counts_tableaux(lambda in partition_strategy(9, 9)) {
        let mut parts = lambda.parts().to_vec();
        prop_assert_eq!(dim_specht(&lambda), BigUint::from(count_syt(&mut parts)));
    }

    #[test]
    fn hook_content_counts_semistandard(lambda in partition_strategy(6, 4), m in 1usize..=4) {
        prop_assert_eq!(dim_unitary_irrep(&lambda, m), BigUint::from(count_ssyt(&lambda, m)));
    }

    #[test]
    fn admissible_matches_brute_force(lambda in partition_strategy(8, 4)) {
        let k = lambda.len();
        prop_assume!(lambda.size() >= k);
        let minus = remove_first_column(&lambda);
        let n = lambda.size() + 1 - k;
        let brute: Vec<Partition> = enumerate_partitions(n, k)
            .into_iter()
            .filter(|mu| contains(&minus, mu) && contains(mu, &lambda))
            .collect();
        let mut got = admissible_mus(&lambda, k).unwrap();
        got.sort();
        let mut brute = brute;
        brute.sort();
        prop_assert_eq!(got, brute);
    }

    #[test]
    fn complement_is_involution(n in 1usize..=5, d in 1usize..=5, seed in 0usize..1000) {
        let fits: Vec<Partition> = (0..=n * d)
            .flat_map(|s| enumerate_partitions(s, d))
            .filter(|mu| mu.part(0) <= n)
            .collect();
        let mu = &fits[seed % fits.len()];
        let comp = complement_in_rectangle(mu, n, d).unwrap();
        prop_assert_eq!(comp.size() + mu.size(), n * d);
        prop_assert_eq!(&complement_in_rectangle(&comp, n, d).unwrap(), mu);
    }

    #[test]
    fn sign_and_perm_matrices_are_homomorphisms(a in permutation_strategy(4), b in permutation_strategy(4)) {
        let ab = a.compose(&b);
        prop_assert_eq!(ab.sign(), a.sign() * b.sign());
        prop_assert_eq!(a.compose(&a.inverse()), Permutation::identity(4));
        let lhs = perm_matrix(&ab, 2).unwrap().matrix;
        let rhs = perm_matrix(&a, 2).unwrap().matrix * perm_matrix(&b, 2).unwrap().matrix;
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-15);
    }

    #[test]
    fn schur_is_symmetric_and_homogeneous(
        lambda in partition_strategy(5, 3),
        eta in proptest::collection::vec(0.05f64..2.0, 3),
        t in 0.2f64..3.0,
    ) {
        let base = schur_eval(&lambda, &Spectrum::new(eta.clone()).unwrap());
        let rev: Vec<f64> = eta.iter().rev().copied().collect();
        let swapped = schur_eval(&lambda, &Spectrum::new(rev).unwrap());
        prop_assert!((base - swapped).abs() <= 1e-9 * base.abs().max(1.0));
        let scaled: Vec<f64> = eta.iter().map(|e| e * t).collect();
        let s = schur_eval(&lambda, &Spectrum::new(scaled).unwrap());
        let expect = base * t.powi(lambda.size() as i32);
        prop_assert!((s - expect).abs() <= 1e-9 * expect.abs().max(1.0));
    }

    #[test]
    fn pieri_holds(lambda in partition_strategy(5, 3), eta in proptest::collection::vec(0.0f64..2.0, 3)) {
        let check = pieri_one_box(&lambda, 3, &Spectrum::new(eta).unwrap()).unwrap();
        prop_assert!(check.abs_diff <= 1e-9 * check.lhs.abs().max(1.0));
    }

    #[test]
    fn branching_sum_matches_characters(lambda in partition_strategy(7, 4), extra in 0usize..=1) {
        let k = lambda.len();
        prop_assume!(lambda.size() >= k);
        let n = lambda.size() + 1 - k;
        let d = k + extra;
        prop_assert_eq!(
            complexity_general(&lambda, d, k, n).unwrap(),
            complexity_character_oracle(&lambda, d, k, n).unwrap()
        );
    }

    #[test]
    fn solver_matches_eigenvalue(seed in 0u64..1000, n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_hermitian(n, &mut rng);
        let lo = hermitian_eigenvalues(&c)[0];
        let id = CMat::identity(n, n);
        let tol = SdpTolerances::default();
        let eq = solve_dense(&c, &id, TraceMode::Equality, &tol).unwrap();
        prop_assert!((eq.value - lo).abs() < 1e-6);
        prop_assert!(eq.dual_value <= lo + 1e-9 && eq.value >= lo - 1e-9);
        let ineq = solve_dense(&c, &id, TraceMode::Inequality, &tol).unwrap();
        prop_assert!((ineq.value - lo.min(0.0)).abs() < 1e-6);
    }

    #[test]
    fn objectives_are_scale_invariant_and_bounded(seed in 0u64..1000, s in 0.1f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = HermitianOperator::new(2, random_hermitian(4, &mut rng)).unwrap();
        let pair = FactorPair::new(
            blockpos::linalg::gaussian_matrix(2, 2, &mut rng),
            blockpos::linalg::gaussian_matrix(2, 2, &mut rng),
        ).unwrap();
        let scaled = FactorPair::new(pair.x.scale(s), pair.y.clone()).unwrap();
        let f = f_objective(&x, &pair).unwrap();
        prop_assert!((f - f_objective(&x, &scaled).unwrap()).abs() < 1e-9 * f.abs().max(1.0));
        let lo = hermitian_eigenvalues(x.matrix())[0];
        prop_assert!(schmidt_objective(&x, &pair).unwrap() >= lo - 1e-9);
    }

    #[test]
    fn operator_json_round_trip(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = HermitianOperator::new(2, random_hermitian(4, &mut rng)).unwrap();
        let back = HermitianOperator::from_json(&x.to_json()).unwrap();
        prop_assert!(max_abs_diff(back.matrix(), x.matrix()) < 1e-15);
    }
}

#[test]
fn rectangular_equals_general_exhaustive() {
    for d in 1..=5 {
        for k in 1..=d {
            for n in 1..=5 {
                let lambda = Partition::rectangle(n, k);
                assert_eq!(
                    complexity_rectangular(d, k, n).unwrap(),
                    complexity_general(&lambda, d, k, k * n - k + 1).unwrap(),
                    "d={d} k={k} n={n}"
                );
            }
        }
    }
}
