//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts, so `cargo test --test acceptance -- --nocapture` gives a
//! one-line-per-criterion summary.

use blockpos::complexity::{
    asymptotic_exponent, collapse_check, complexity_general, complexity_rectangular, hom_dimension_numeric,
    ratio_diagnostics, skew_dim_check,
};
use blockpos::linalg::{gaussian_matrix, random_hermitian, CMat};
use blockpos::partitions::{
    admissible_mus, complement_in_rectangle, dim_specht, dim_unitary_irrep, enumerate_partitions, Partition,
};
use blockpos::reduced_sdp::{
    build_reduced_problem, certify, min_over_blocks, solve_sdp, solve_unreduced, CertifyConfig, SdpTolerances,
    TraceMode, VerdictKind,
};
use blockpos::symfun::{class_weight, pieri_one_box, projected_trace, schur_eval, sn_character, CycleType, Spectrum};
use blockpos::tensor_lab::{
    central_projector, dualization_identity_error, f_lambda_mu, verify_projection_equality, FactorPair,
    HermitianOperator,
};
use blockpos::witness_search::{boundary_witness, minimize_f, minimize_schmidt_rank_k, SearchConfig};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("{} criterion {id:>2}: {name} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn p(v: &[usize]) -> Partition {
    Partition::new(v.to_vec()).unwrap()
}

fn fact(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

fn rand_op(d: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    HermitianOperator::new(d, random_hermitian(d * d, rng)).unwrap()
}

fn rows_k(size: usize, k: usize) -> Vec<Partition> {
    enumerate_partitions(size, k).into_iter().filter(|l| l.len() == k).collect()
}

#[test]
fn criterion_01_formula_fidelity() {
    let mut cases = 0;
    let mut bad = Vec::new();
    for d in 1..=5 {
        for k in 1..=d {
            for n in 1..=6 {
                cases += 1;
                let mut parts = vec![n];
                parts.extend(std::iter::repeat_n(n - 1, k - 1));
                let hook_route = dim_unitary_irrep(&Partition::new(parts).unwrap(), d) * d;
                if complexity_rectangular(d, k, n).unwrap() != hook_route {
                    bad.push(format!("({d},{k},{n})"));
                }
            }
        }
    }
    report(1, "rectangular formula = d·dim U_(n,(n-1)^(k-1))", bad.is_empty() && cases == 90, &format!("{cases} cases, mismatches {bad:?}"));
}

#[test]
fn criterion_02_hierarchy_collapse() {
    let mut ok = true;
    for d in 2..=5 {
        let r = collapse_check(d, 1..=8).unwrap();
        ok &= r.collapsed && r.values.iter().all(|v| *v == BigUint::from(d * d));
    }
    report(2, "C_(n^d) = d^2 for d in 2..5, n in 1..8", ok, "32 values");
}

#[test]
fn criterion_03_hom_dimension_oracle() {
    let mut lines = Vec::new();
    let mut ok = true;
    for (k, d, n) in [(2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 3, 2)] {
        for lambda in rows_k(n + k - 1, k) {
            let formula = complexity_general(&lambda, d, k, n).unwrap();
            let numeric = hom_dimension_numeric(&lambda, d, k, n).unwrap();
            ok &= formula == BigUint::from(numeric);
            lines.push(format!("k={k} d={d} N={n} {lambda}: {numeric}/{formula}"));
        }
    }
    report(3, "complexity_general = intertwiner rank", ok, &lines.join(", "));
}

#[test]
fn criterion_04_ratio_corollary() {
    let ns = [8, 16, 32, 64];
    let a = ratio_diagnostics(4, 3, 1, &ns).unwrap();
    let dev: Vec<f64> = a.rows.iter().map(|r| (r.value - 3.0).abs()).collect();
    let approach = dev.windows(2).all(|w| w[1] < w[0]) && dev[3] / 3.0 < 0.1;
    let b = ratio_diagnostics(4, 3, 2, &ns).unwrap();
    let zero = b.rows.last().unwrap().value < 0.05;
    let c = ratio_diagnostics(5, 2, 1, &ns).unwrap();
    let inf = c.rows.last().unwrap().value > 20.0;
    let detail = format!(
        "(4,3,1) {:?}; (4,3,2) at 64 = {:.4}; (5,2,1) at 64 = {:.2}",
        a.rows.iter().map(|r| format!("{:.4}", r.value)).collect::<Vec<_>>(),
        b.rows.last().unwrap().value,
        c.rows.last().unwrap().value
    );
    report(4, "limit ratios", approach && zero && inf, &detail);
}

#[test]
fn criterion_05_asymptotic_exponent() {
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, k) in [(4, 2), (5, 2), (5, 3)] {
        let slope = asymptotic_exponent(d, k, 32, 128).unwrap();
        let target = (k * (d - k)) as f64;
        ok &= (slope - target).abs() <= 0.1;
        parts.push(format!("(d={d},k={k}) slope {slope:.4} vs {target}"));
    }
    report(5, "log-log slope within 0.1 of k(d-k) on n in [32,128]", ok, &parts.join(", "));
}

#[test]
fn criterion_06_dualization_identity() {
    let errs: Vec<f64> = [2, 3].iter().map(|&k| dualization_identity_error(k).unwrap()).collect();
    report(6, "k E† Π_k E = |φ_k⟩⟨φ_k|", errs.iter().all(|e| *e <= 1e-12), &format!("max-norm errors {errs:?}"));
}

#[test]
fn criterion_07_projection_equality() {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (k, n) in [(2, 2), (2, 3), (3, 2)] {
        for lambda in rows_k(n + k - 1, k) {
            worst = worst.max(verify_projection_equality(&lambda, k).unwrap());
            count += 1;
        }
    }
    report(7, "Π_k ℙ_λ Π_k = Π_k ⊗ ℙ_λ⁻", worst <= 1e-10, &format!("{count} diagrams, worst {worst:.2e}"));
}

#[test]
fn criterion_08_objective_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, d, n) in [(2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 3, 2)] {
        let x = rand_op(d, &mut rng);
        for lambda in rows_k(n + k - 1, k) {
            for mu in admissible_mus(&lambda, k).unwrap() {
                let mut worst = 0.0f64;
                for _ in 0..50 {
                    let pair = FactorPair::new(gaussian_matrix(d, k, &mut rng), gaussian_matrix(d, k, &mut rng)).unwrap();
                    worst = worst.max(f_lambda_mu(&x, &lambda, &mu, &pair).unwrap().relative_gap());
                }
                ok &= worst <= 1e-9;
                parts.push(format!("k={k} d={d} N={n} λ={lambda} μ={mu}: {worst:.1e}"));
            }
        }
    }
    report(8, "matrix route = Schur-formula route of f_λμ", ok, &parts.join("; "));
}

#[test]
fn criterion_09_rectangular_specht_dims() {
    let mut ok = true;
    for k in 1..=4usize {
        for n in 1..=6usize {
            let mut prod = BigRational::one();
            for r in 1..=k {
                prod *= BigRational::new(BigInt::from(fact(k - r)), BigInt::from(fact(n + k - r - 1)));
            }
            let lower = BigRational::from_integer(BigInt::from(fact(k * n - k))) * &prod;
            let upper = BigRational::new(BigInt::from(fact(k * n - k + 1) * k), BigInt::from(n + k - 1)) * prod;
            let mut upper_shape = vec![n];
            upper_shape.extend(std::iter::repeat_n(n - 1, k - 1));
            ok &= lower == BigRational::from_integer(BigInt::from(dim_specht(&Partition::rectangle(n - 1, k))));
            ok &= upper == BigRational::from_integer(BigInt::from(dim_specht(&Partition::new(upper_shape).unwrap())));
        }
    }
    report(9, "hook-length dims match closed products", ok, "k ≤ 4, n ≤ 6");
}

#[test]
fn criterion_10_reduced_equals_unreduced() {
    let tol = SdpTolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let x = rand_op(2, &mut rng);
        for n in 1..=2 {
            let full = solve_unreduced(&x, 2, n, &tol).unwrap().value;
            let reduced = min_over_blocks(&x, 2, n, &tol).unwrap();
            worst = worst.max((full - reduced).abs());
        }
    }
    report(10, "min_λ S_λ = S_N, k=2, d=2, N in {1,2}", worst <= 1e-6, &format!("10 operators, worst gap {worst:.2e}"));
}

#[test]
fn criterion_11_bound_chain() {
    let tol = SdpTolerances::default();
    let search = SearchConfig { restarts: 32, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ops = vec![("-I".to_string(), HermitianOperator::identity(2).scaled(-1.0)), ("W_1".into(), boundary_witness(1, 2))];
    while ops.len() < 3 {
        let x = rand_op(2, &mut rng);
        if minimize_schmidt_rank_k(&x, 2, &search).unwrap().value < 0.0 {
            ops.push(("random".into(), x));
        }
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, x) in &ops {
        let s_n = solve_unreduced(x, 2, 1, &tol).unwrap().value;
        let prob = build_reduced_problem(x, &p(&[1, 1]), 2, 1, TraceMode::Inequality).unwrap();
        let w = solve_sdp(&prob, &tol).unwrap().value;
        let v_k = minimize_f(x, 2, &search).unwrap().value;
        let chain = [s_n, w, v_k / 4.0, 0.0];
        ok &= chain.windows(2).all(|c| c[0] <= c[1] + 1e-6);
        parts.push(format!("{name}: {s_n:.6} ≤ {w:.6} ≤ {:.6} ≤ 0", v_k / 4.0));
    }
    report(11, "S_N ≤ W ≤ V_k/k² ≤ 0 at k=2, d=2, n=1", ok, &parts.join("; "));
}

#[test]
fn criterion_12_witness_ground_truth() {
    let cfg = CertifyConfig { n_max: 3, restarts: 32, ..Default::default() };
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, d) in [(1, 2), (1, 3), (2, 3)] {
        let w = boundary_witness(k, d);
        let at_k = certify(&w, k, &cfg).unwrap();
        let s_values: Vec<String> = at_k.levels.iter().map(|l| format!("{:.4}", l.s.unwrap_or(f64::NAN))).collect();
        ok &= at_k.verdict == VerdictKind::Certified;
        let above = certify(&w, k + 1, &cfg).unwrap();
        let violation = above.witness.as_ref().map_or(f64::INFINITY, |w| w.violation);
        ok &= above.verdict == VerdictKind::Refuted && violation <= -1.0 / d as f64 + 1e-6;
        parts.push(format!(
            "W_{k} d={d}: at k {:?} S={s_values:?}; at k+1 {:?} violation {violation:.6}",
            at_k.verdict, above.verdict
        ));
    }
    report(12, "boundary witnesses certified at k, refuted at k+1", ok, &parts.join("; "));
}

#[test]
fn criterion_13_purification_relations() {
    let search = SearchConfig { restarts: 32, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut ok = true;
    let (mut neg, mut nonneg) = (0, 0);
    for _ in 0..20 {
        let x = rand_op(2, &mut rng);
        let v = minimize_schmidt_rank_k(&x, 2, &search).unwrap().value;
        let v_k = minimize_f(&x, 2, &search).unwrap().value;
        if v >= 0.0 {
            nonneg += 1;
            ok &= v_k.abs() <= 1e-6;
        } else {
            neg += 1;
            ok &= 2.0 * v_k - 1e-6 <= v && v <= v_k + 1e-6;
        }
    }
    report(13, "k V_k ≤ V ≤ V_k, and V ≥ 0 ⇒ V_k = 0", ok, &format!("{neg} negative, {nonneg} nonnegative"));
}

#[test]
fn criterion_14_recoupling_example() {
    let mut mus = admissible_mus(&p(&[3, 2, 1]), 3).unwrap();
    mus.sort();
    let mut want = vec![p(&[3, 1]), p(&[2, 2]), p(&[2, 1, 1])];
    want.sort();
    let total: BigUint = mus.iter().map(dim_specht).sum();
    report(14, "admissible μ of (3,2,1) and Σ dim 𝕐_μ = 8", mus == want && total == BigUint::from(8u32), &format!("{mus:?}, total {total}"));
}

/// `s_μ(η)` as a sum over semistandard tableaux with entries `< m`.
fn schur_by_tableaux(mu: &Partition, eta: &[f64]) -> f64 {
    let cells: Vec<(usize, usize)> = mu.cells().map(|c| (c.row - 1, c.col - 1)).collect();
    let mut fill = vec![vec![0usize; mu.part(0)]; mu.len()];
    fn rec(i: usize, cells: &[(usize, usize)], fill: &mut Vec<Vec<usize>>, eta: &[f64], weight: f64) -> f64 {
        if i == cells.len() {
            return weight;
        }
        let (r, c) = cells[i];
        let lo_row = if c > 0 { fill[r][c - 1] } else { 0 };
        let lo_col = if r > 0 { fill[r - 1][c] + 1 } else { 0 };
        let mut total = 0.0;
        for v in lo_row.max(lo_col)..eta.len() {
            fill[r][c] = v;
            total += rec(i + 1, cells, fill, eta, weight * eta[v]);
        }
        total
    }
    rec(0, &cells, &mut fill, eta, 1.0)
}

#[test]
fn criterion_15_representation_theory() {
    let mut failures = Vec::new();
    // Schur–Weyl count
    for m in 1..=4usize {
        for n in 1..=6usize {
            let total: BigUint = enumerate_partitions(n, m).iter().map(|mu| dim_specht(mu) * dim_unitary_irrep(mu, m)).sum();
            if total != BigUint::from(m).pow(n as u32) {
                failures.push(format!("Schur–Weyl m={m} N={n}"));
            }
        }
    }
    // character orthogonality
    for n in 1..=6 {
        let parts = enumerate_partitions(n, n);
        for a in &parts {
            for b in &parts {
                let mut s = BigRational::zero();
                for c in &parts {
                    let c = CycleType(c.clone());
                    let num = sn_character(a, &c).unwrap() * sn_character(b, &c).unwrap();
                    s += BigRational::new(BigInt::from(num), BigInt::from(class_weight(&c)));
                }
                let want = if a == b { BigRational::one() } else { BigRational::zero() };
                if s != want {
                    failures.push(format!("orthogonality {a} {b}"));
                }
            }
        }
    }
    // Frobenius vs tableaux, projected trace vs dense projector, Pieri
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for m in 1..=3usize {
        let eta: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..2.0)).collect();
        let spectrum = Spectrum::new(eta.clone()).unwrap();
        for n in 1..=5 {
            for mu in enumerate_partitions(n, m) {
                let a = schur_eval(&mu, &spectrum);
                let b = schur_by_tableaux(&mu, &eta);
                if (a - b).abs() > 1e-9 * b.abs().max(1.0) {
                    failures.push(format!("Schur {mu} m={m}: {a} vs {b}"));
                }
            }
        }
        for n in 1..=4usize {
            let dim = m.pow(n as u32);
            let dims = vec![m; n];
            let mut digits = vec![0; n];
            for mu in enumerate_partitions(n, m) {
                let proj: CMat = central_projector(&mu, m).unwrap().matrix;
                let dense: f64 = (0..dim)
                    .map(|i| {
                        blockpos::linalg::unravel(i, &dims, &mut digits);
                        proj[(i, i)].re * digits.iter().map(|&t| eta[t]).product::<f64>()
                    })
                    .sum();
                let formula = projected_trace(&mu, &spectrum);
                if (dense - formula).abs() > 1e-9 * dense.abs().max(1.0) {
                    failures.push(format!("projected trace {mu} m={m}"));
                }
            }
        }
        for size in 0..=4 {
            for lm in enumerate_partitions(size, m) {
                if pieri_one_box(&lm, m, &spectrum).unwrap().abs_diff > 1e-9 {
                    failures.push(format!("Pieri {lm} k={m}"));
                }
            }
        }
    }
    // skew-dimension lemma, exhaustive
    for d in 1..=5usize {
        for n in 1..=5usize {
            for size in 0..=n * d {
                for mu in enumerate_partitions(size, d).into_iter().filter(|mu| mu.part(0) <= n) {
                    let comp = complement_in_rectangle(&mu, n, d).unwrap();
                    if !skew_dim_check(&mu, n, d).unwrap() || dim_unitary_irrep(&mu, d) != dim_unitary_irrep(&comp, d) {
                        failures.push(format!("skew {mu} n={n} d={d}"));
                    }
                }
            }
        }
    }
    report(15, "representation-theory suites", failures.is_empty(), &format!("failures {failures:?}"));
}
