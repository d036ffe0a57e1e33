//! Pure-state searches giving upper bounds on `𝒱_k` (the k-purified
//! objective `f(x,y)`) and on `𝒱` (Schmidt-rank-k expectation).
//!
//! Both searches alternate exact minimizations over one factor with the other
//! fixed; each half-step is a (generalized) minimal-eigenvector problem of
//! size `dk`. They are heuristics: a negative value found is a certificate of
//! violation, but a nonnegative one proves nothing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::linalg::{gaussian_matrix, generalized_min_eigenpair, min_eigenpair, real, CMat, CVec, ONE, ZERO};
use crate::tensor_lab::{FactorPair, HermitianOperator};

/// `f(x,y) = ⟨φ_k|(x⊗y)† X (x⊗y)|φ_k⟩ / (tr(x†x) tr(y†y))`.
pub fn f_objective(x: &HermitianOperator, pair: &FactorPair) -> Result<f64> {
    check_dims(x, pair)?;
    let nx = pair.x.norm_squared();
    let ny = pair.y.norm_squared();
    if nx == 0.0 || ny == 0.0 {
        return domain("f is undefined for a zero factor");
    }
    Ok(expectation(x, &pair.state()) / (nx * ny))
}

/// `⟨ψ|X|ψ⟩ / ⟨ψ|ψ⟩` for `ψ = Σ_i x_i ⊗ y_i`.
pub fn schmidt_objective(x: &HermitianOperator, pair: &FactorPair) -> Result<f64> {
    check_dims(x, pair)?;
    let psi = pair.state();
    let n = psi.norm_squared();
    if n < 1e-300 {
        return domain("the state Σ x_i ⊗ y_i vanishes");
    }
    Ok(expectation(x, &psi) / n)
}

fn check_dims(x: &HermitianOperator, pair: &FactorPair) -> Result<()> {
    if pair.d() != x.d() {
        return domain(format!("factor pair has d = {}, operator has d = {}", pair.d(), x.d()));
    }
    Ok(())
}

fn expectation(x: &HermitianOperator, psi: &CVec) -> f64 {
    psi.dotc(&(x.matrix() * psi)).re
}

/// `W_k = (k/d) 1 − |φ̂_d⟩⟨φ̂_d|` with `φ̂_d` the normalized maximally
/// entangled vector.
pub fn boundary_witness(k: usize, d: usize) -> HermitianOperator {
    let phi = crate::tensor_lab::max_entangled(d).unscale((d as f64).sqrt());
    let m = CMat::identity(d * d, d * d).scale(k as f64 / d as f64) - &phi * phi.adjoint();
    HermitianOperator::new(d, m).expect("witness is Hermitian")
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Stop once successive values differ by less than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { restarts: 64, seed: 0, tol: 1e-12, max_iter: 200 }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        SearchConfig { seed, ..Default::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub value: f64,
    /// The columns of `x` and `y` are the `k` pairs of vectors.
    pub argument: FactorPair,
    pub restarts: usize,
    /// Final value of each restart, in restart order.
    pub trace: Vec<f64>,
    /// Set when the value is an infimum approached only as `xy^⊤ → 0`.
    pub degenerate: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum Objective {
    Purified,
    Schmidt,
}

/// `L_y` with `ψ = L_y vec(x)`, `vec(x)[a·k + i] = x[a, i]`.
fn lift_for_x(y: &CMat) -> CMat {
    let (d, k) = y.shape();
    CMat::from_fn(d * d, d * k, |row, col| {
        let (a, b) = (row / d, row % d);
        let (a2, i) = (col / k, col % k);
        if a == a2 {
            y[(b, i)]
        } else {
            ZERO
        }
    })
}

/// `L_x` with `ψ = L_x vec(y)`.
fn lift_for_y(x: &CMat) -> CMat {
    let (d, k) = x.shape();
    CMat::from_fn(d * d, d * k, |row, col| {
        let (a, b) = (row / d, row % d);
        let (b2, i) = (col / k, col % k);
        if b == b2 {
            x[(a, i)]
        } else {
            ZERO
        }
    })
}

fn unvec(v: &CVec, d: usize, k: usize) -> CMat {
    CMat::from_fn(d, k, |a, i| v[a * k + i])
}

/// One exact half-step: the best factor for the given lift.
fn best_factor(x: &HermitianOperator, lift: &CMat, other_norm2: f64, obj: Objective) -> Option<CVec> {
    let a = lift.adjoint() * x.matrix() * lift;
    match obj {
        Objective::Purified => Some(min_eigenpair(&a.unscale(other_norm2)).1),
        Objective::Schmidt => {
            let g = lift.adjoint() * lift;
            generalized_min_eigenpair(&a, &g, 1e-10).map(|(_, v)| v)
        }
    }
}

fn evaluate(x: &HermitianOperator, pair: &FactorPair, obj: Objective) -> f64 {
    let r = match obj {
        Objective::Purified => f_objective(x, pair),
        Objective::Schmidt => schmidt_objective(x, pair),
    };
    r.unwrap_or(f64::INFINITY)
}

fn alternate(x: &HermitianOperator, k: usize, cfg: &SearchConfig, restart: usize, obj: Objective) -> (f64, FactorPair) {
    let d = x.d();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let mut pair = FactorPair { x: gaussian_matrix(d, k, &mut rng), y: gaussian_matrix(d, k, &mut rng) };
    let mut value = evaluate(x, &pair, obj);
    for _ in 0..cfg.max_iter {
        let prev = value;
        if let Some(v) = best_factor(x, &lift_for_x(&pair.y), pair.y.norm_squared(), obj) {
            pair.x = unvec(&v, d, k);
        }
        if let Some(v) = best_factor(x, &lift_for_y(&pair.x), pair.x.norm_squared(), obj) {
            pair.y = unvec(&v, d, k);
        }
        value = evaluate(x, &pair, obj);
        if (prev - value).abs() < cfg.tol {
            break;
        }
    }
    (value, pair)
}

fn search(x: &HermitianOperator, k: usize, cfg: &SearchConfig, obj: Objective) -> Result<SearchResult> {
    if k == 0 || k > x.d() {
        return domain(format!("need 1 <= k <= d, got k = {k}, d = {}", x.d()));
    }
    if cfg.restarts == 0 {
        return domain("at least one restart is required");
    }
    let runs: Vec<(f64, FactorPair)> =
        (0..cfg.restarts).into_par_iter().map(|r| alternate(x, k, cfg, r, obj)).collect();
    let trace: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let (mut value, mut argument) = runs
        .into_iter()
        .reduce(|best, cur| if cur.0 < best.0 { cur } else { best })
        .expect("at least one restart");
    let mut degenerate = false;
    if obj == Objective::Purified {
        if k >= 2 && value > 0.0 {
            // x_1 = e_1 and y_2 = e_1 give x y^⊤ = 0, so f = 0 exactly
            let d = x.d();
            let mut px = CMat::zeros(d, k);
            let mut py = CMat::zeros(d, k);
            px[(0, 0)] = ONE;
            py[(0, 1)] = ONE;
            argument = FactorPair { x: px, y: py };
            value = evaluate(x, &argument, obj);
        }
        let overlap = argument.state().norm_squared() / (argument.x.norm_squared() * argument.y.norm_squared());
        if overlap < 1e-8 && value.abs() < 1e-8 {
            degenerate = true;
            value = 0.0;
        }
    }
    Ok(SearchResult { value, argument, restarts: cfg.restarts, trace, degenerate })
}

/// Upper bound on `𝒱_k = min f(x,y)`.
pub fn minimize_f(x: &HermitianOperator, k: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    search(x, k, cfg, Objective::Purified)
}

/// Upper bound on `𝒱 = min ⟨ψ|X|ψ⟩` over unit `ψ` of Schmidt rank `≤ k`.
pub fn minimize_schmidt_rank_k(x: &HermitianOperator, k: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    search(x, k, cfg, Objective::Schmidt)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub relation: String,
    pub holds: bool,
    /// Positive when the relation holds with room to spare.
    pub slack: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub v: f64,
    pub v_k: f64,
    pub k: usize,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

pub const BOUND_TOL: f64 = 1e-6;

/// `k𝒱_k ≤ 𝒱 ≤ 𝒱_k < 0` when `𝒱 < 0`, and `𝒱_k = 0` when `𝒱 ≥ 0`.
pub fn check_bounds(v: f64, v_k: f64, k: usize) -> BoundsReport {
    let le = |relation: &str, lhs: f64, rhs: f64| BoundCheck {
        relation: relation.to_string(),
        holds: lhs <= rhs + BOUND_TOL,
        slack: rhs - lhs,
    };
    let checks = if v >= 0.0 {
        vec![BoundCheck {
            relation: "V >= 0 implies V_k = 0".into(),
            holds: v_k.abs() <= BOUND_TOL,
            slack: BOUND_TOL - v_k.abs(),
        }]
    } else {
        vec![
            le("k V_k <= V", k as f64 * v_k, v),
            le("V <= V_k", v, v_k),
            BoundCheck { relation: "V_k < 0".into(), holds: v_k < BOUND_TOL, slack: -v_k },
        ]
    };
    BoundsReport { v, v_k, k, checks }
}

/// A normalized Schmidt-rank-`k` state `Σ_i e_i ⊗ e_i / √k` as a factor pair.
pub fn diagonal_pair(d: usize, k: usize) -> FactorPair {
    let m = CMat::from_fn(d, k, |a, i| if a == i { real(1.0) } else { ZERO });
    FactorPair { x: m.clone(), y: m }
}
