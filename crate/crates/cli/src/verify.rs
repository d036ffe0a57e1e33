//! Desk-scale verification suites exposed by `blockpos verify`.

use blockpos::complexity::{complexity_character_oracle, complexity_general, hom_dimension_numeric};
use blockpos::linalg::{gaussian_matrix, max_abs_diff, random_hermitian, CMat};
use blockpos::partitions::{admissible_mus, dim_specht, enumerate_partitions, Partition};
use blockpos::reduced_sdp::{build_schur_basis, certify, CertifyConfig};
use blockpos::tensor_lab::{
    central_projector, dualization_identity_error, f_lambda_mu, verify_projection_equality, FactorPair,
    HermitianOperator,
};
use blockpos::witness_search::{boundary_witness, check_bounds, minimize_f, minimize_schmidt_rank_k, SearchConfig};
use clap::ValueEnum;
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Projectors,
    Schur,
    Dualization,
    ObjectiveIdentity,
    Branching,
    ComplexityOracles,
    Bounds,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Projectors => "projectors",
            Suite::Schur => "schur",
            Suite::Dualization => "dualization",
            Suite::ObjectiveIdentity => "objective-identity",
            Suite::Branching => "branching",
            Suite::ComplexityOracles => "complexity-oracles",
            Suite::Bounds => "bounds",
            Suite::All => "all",
        }
    }
}

#[derive(Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{} [{}] {}: {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.detail
            ));
        }
        s.push_str(&format!(
            "{} of {} checks passed\n",
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        ));
        s
    }

    fn push(&mut self, suite: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { suite, name: name.into(), passed, detail: detail.into() });
    }

    fn push_result<T>(
        &mut self,
        suite: &'static str,
        name: impl Into<String>,
        r: blockpos::Result<T>,
        ok: impl FnOnce(&T) -> (bool, String),
    ) {
        match r {
            Ok(v) => {
                let (passed, detail) = ok(&v);
                self.push(suite, name, passed, detail);
            }
            Err(e) => self.push(suite, name, false, e.to_string()),
        }
    }
}

pub fn run(suite: Suite, seed: u64) -> Report {
    let mut report = Report::default();
    let all = [
        Suite::Projectors,
        Suite::Schur,
        Suite::Dualization,
        Suite::ObjectiveIdentity,
        Suite::Branching,
        Suite::ComplexityOracles,
        Suite::Bounds,
    ];
    let selected: Vec<Suite> = if suite == Suite::All { all.to_vec() } else { vec![suite] };
    for s in selected {
        match s {
            Suite::Projectors => projectors(&mut report),
            Suite::Schur => schur(&mut report),
            Suite::Dualization => dualization(&mut report),
            Suite::ObjectiveIdentity => objective_identity(&mut report, seed),
            Suite::Branching => branching(&mut report),
            Suite::ComplexityOracles => complexity_oracles(&mut report),
            Suite::Bounds => bounds(&mut report, seed),
            Suite::All => unreachable!(),
        }
    }
    report
}

fn projectors(r: &mut Report) {
    for (m, n) in [(2usize, 3usize), (3, 3), (2, 4)] {
        let dim = m.pow(n as u32);
        let mut sum = CMat::zeros(dim, dim);
        let mut idempotent = 0.0f64;
        for mu in enumerate_partitions(n, m) {
            let p = central_projector(&mu, m).expect("desk scale").matrix;
            idempotent = idempotent.max(max_abs_diff(&(&p * &p), &p));
            sum += p;
        }
        let err = max_abs_diff(&sum, &CMat::identity(dim, dim)).max(idempotent);
        r.push("projectors", format!("resolution of identity m={m} N={n}"), err < 1e-10, format!("{err:.2e}"));
    }
    for (k, n) in [(2, 2), (2, 3), (3, 2)] {
        for lambda in enumerate_partitions(n + k - 1, k).into_iter().filter(|l| l.len() == k) {
            r.push_result("projectors", format!("projection equality {lambda}"), verify_projection_equality(&lambda, k), |e| {
                (*e <= 1e-10, format!("{e:.2e}"))
            });
        }
    }
}

fn schur(r: &mut Report) {
    for (m, n) in [(2usize, 2usize), (2, 3), (3, 3)] {
        r.push_result("schur", format!("Schur basis m={m} N={n}"), build_schur_basis(m, n), |basis| {
            let dim = m.pow(n as u32);
            let total: usize = basis.blocks.iter().map(|b| b.vectors.ncols()).sum();
            let mut err = 0.0f64;
            for b in &basis.blocks {
                let p = central_projector(&b.mu, m).expect("desk scale").matrix;
                err = err.max(max_abs_diff(&(&b.vectors * b.vectors.adjoint()), &p));
            }
            (total == dim && err < 1e-10, format!("{total} vectors, projector error {err:.2e}"))
        });
    }
}

fn dualization(r: &mut Report) {
    for k in 2..=3 {
        r.push_result("dualization", format!("k E† Π_k E = |φ_k⟩⟨φ_k|, k={k}"), dualization_identity_error(k), |e| {
            (*e <= 1e-12, format!("{e:.2e}"))
        });
    }
}

fn random_pair(k: usize, d: usize, rng: &mut ChaCha8Rng) -> FactorPair {
    FactorPair { x: gaussian_matrix(d, k, rng), y: gaussian_matrix(d, k, rng) }
}

fn objective_identity(r: &mut Report, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // cases where λ⁻ has a single one-box extension within k rows
    for (k, d, n_level) in [(2, 2, 1), (2, 2, 2), (2, 3, 2), (3, 3, 1), (1, 3, 3)] {
        let lambda = Partition::rectangle(n_level, k);
        let big_n = k * n_level - k + 1;
        let mu = admissible_mus(&lambda, k).expect("valid")[0].clone();
        let x = HermitianOperator::new(d, random_hermitian(d * d, &mut rng)).expect("hermitian");
        let mut worst = 0.0f64;
        let mut failure = None;
        for _ in 0..20 {
            match f_lambda_mu(&x, &lambda, &mu, &random_pair(k, d, &mut rng)) {
                Ok(routes) => worst = worst.max(routes.relative_gap()),
                Err(e) => failure = Some(e.to_string()),
            }
        }
        let name = format!("matrix vs formula route k={k} d={d} N={big_n} λ={lambda}");
        match failure {
            Some(e) => r.push("objective-identity", name, false, e),
            None => r.push("objective-identity", name, worst <= 1e-9, format!("max relative gap {worst:.2e}")),
        }
    }
}

fn branching(r: &mut Report) {
    let lambda = Partition::new(vec![3, 2, 1]).unwrap();
    let expected: Vec<Partition> =
        [vec![3, 1], vec![2, 2], vec![2, 1, 1]].into_iter().map(|p| Partition::new(p).unwrap()).collect();
    r.push_result("branching", "admissible μ for (3,2,1), k=3", admissible_mus(&lambda, 3), |mus| {
        let total: BigUint = mus.iter().map(dim_specht).sum();
        let mut sorted = mus.clone();
        sorted.sort();
        let mut want = expected.clone();
        want.sort();
        (
            sorted == want && total == BigUint::from(8u32),
            format!("{} partitions, Σ dim 𝕐_μ = {total}", mus.len()),
        )
    });
}

fn complexity_oracles(r: &mut Report) {
    let mut mismatches = Vec::new();
    let mut count = 0;
    for size in 1..=7usize {
        for k in 1..=size.min(4) {
            let n = size + 1 - k;
            for lambda in enumerate_partitions(size, k).into_iter().filter(|l| l.len() == k) {
                for d in k..=k + 1 {
                    count += 1;
                    let a = complexity_general(&lambda, d, k, n);
                    let b = complexity_character_oracle(&lambda, d, k, n);
                    match (a, b) {
                        (Ok(a), Ok(b)) if a == b => {}
                        (a, b) => mismatches.push(format!("{lambda} d={d}: {a:?} vs {b:?}")),
                    }
                }
            }
        }
    }
    r.push(
        "complexity-oracles",
        "branching sum vs character oracle, |λ| ≤ 7",
        mismatches.is_empty(),
        if mismatches.is_empty() { format!("{count} cases agree") } else { mismatches.join("; ") },
    );
    for (k, d, n) in [(2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 3, 2)] {
        for lambda in enumerate_partitions(n + k - 1, k).into_iter().filter(|l| l.len() == k) {
            let expect = complexity_general(&lambda, d, k, n).expect("valid");
            r.push_result(
                "complexity-oracles",
                format!("intertwiner rank k={k} d={d} N={n} λ={lambda}"),
                hom_dimension_numeric(&lambda, d, k, n),
                |dim| (BigUint::from(*dim) == expect, format!("numeric {dim}, formula {expect}")),
            );
        }
    }
}

fn bounds(r: &mut Report, seed: u64) {
    let search = SearchConfig { restarts: 16, seed, ..Default::default() };
    let w1 = boundary_witness(1, 2);
    let v = minimize_schmidt_rank_k(&w1, 2, &search).map(|s| s.value);
    let v_k = minimize_f(&w1, 2, &search).map(|s| s.value);
    match (v, v_k) {
        (Ok(v), Ok(v_k)) => {
            let b = check_bounds(v, v_k, 2);
            r.push("bounds", "k V_k <= V <= V_k on W_1, k=2, d=2", b.all_hold(), format!("V = {v:.6}, V_k = {v_k:.6}"));
        }
        (a, b) => r.push("bounds", "k V_k <= V <= V_k on W_1, k=2, d=2", false, format!("{a:?} {b:?}")),
    }
    let cfg = CertifyConfig { n_max: 1, restarts: 16, seed, ..Default::default() };
    for (name, x) in [("-I", HermitianOperator::identity(2).scaled(-1.0)), ("W_1", w1)] {
        r.push_result("bounds", format!("hierarchy bound chain on {name}, k=2, d=2, n=1"), certify(&x, 2, &cfg), |v| {
            let ok = !v.bound_checks.is_empty() && v.bound_checks.iter().all(|c| c.holds);
            (ok, format!("{} relations checked", v.bound_checks.len()))
        });
    }
}
