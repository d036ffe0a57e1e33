//! Symmetric-group characters and numeric symmetric functions.
//!
//! Characters come from the Murnaghan–Nakayama rule on beta-sets and are
//! memoized process-wide. Schur polynomials are evaluated through the
//! Frobenius expansion `s_μ = Σ_c χ_μ(c) p_c / z_c` over cycle types.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::partitions::{add_one_box, dim_specht, enumerate_partitions, Partition};
use crate::permutation::Permutation;

/// A conjugacy class of `S_N`, given by its cycle lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleType(pub Partition);

impl CycleType {
    pub fn new(lengths: Vec<usize>) -> Result<Self> {
        let mut lengths = lengths;
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType(Partition::new(lengths)?))
    }

    pub fn of(pi: &Permutation) -> Self {
        CycleType(pi.cycle_type())
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }

    /// `(−1)^{N − #cycles}`.
    pub fn sign(&self) -> i64 {
        if (self.0.size() - self.0.len()) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Default clamp tolerance for slightly negative eigenvalues.
pub const SPECTRUM_TOL: f64 = 1e-9;

/// Nonnegative reals `(η_1, …, η_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(values, SPECTRUM_TOL)
    }

    /// Entries in `[−tol, 0)` are clamped to zero; anything more negative is
    /// rejected.
    pub fn with_tolerance(values: Vec<f64>, tol: f64) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| **v < -tol || !v.is_finite()) {
            return domain(format!("spectrum entry {v} is negative beyond {tol}"));
        }
        Ok(Spectrum { values: values.into_iter().map(|v| v.max(0.0)).collect() })
    }

    pub fn ones(k: usize) -> Self {
        Spectrum { values: vec![1.0; k] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

type CharKey = (Vec<usize>, Vec<usize>);

fn char_cache() -> &'static RwLock<HashMap<CharKey, i64>> {
    static CACHE: OnceLock<RwLock<HashMap<CharKey, i64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Irreducible character `χ_μ` on the class `c`.
pub fn sn_character(mu: &Partition, c: &CycleType) -> Result<i64> {
    if mu.size() != c.size() {
        return domain(format!("|{mu}| = {} but the class has size {}", mu.size(), c.size()));
    }
    Ok(mn(mu.parts(), c.0.parts()))
}

fn mn(lambda: &[usize], cycles: &[usize]) -> i64 {
    if cycles.is_empty() {
        return 1;
    }
    let key = (lambda.to_vec(), cycles.to_vec());
    if let Some(&v) = char_cache().read().unwrap().get(&key) {
        return v;
    }
    let r = cycles[0];
    let rest = &cycles[1..];
    let l = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &p)| p + (l - 1 - i)).collect();
    let mut total = 0i64;
    for &b in &beta {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        // removing a border strip of length r = moving bead b to b - r
        let height = beta.iter().filter(|&&c| b - r < c && c < b).count();
        let mut nb: Vec<usize> = beta.iter().map(|&c| if c == b { b - r } else { c }).collect();
        nb.sort_unstable_by(|a, b| b.cmp(a));
        let shape: Vec<usize> = nb
            .iter()
            .enumerate()
            .map(|(i, &c)| c - (l - 1 - i))
            .filter(|&p| p > 0)
            .collect();
        let sign = if height % 2 == 0 { 1 } else { -1 };
        total += sign * mn(&shape, rest);
    }
    char_cache().write().unwrap().insert(key, total);
    total
}

/// Centralizer order `z_c = ∏ i^{m_i} m_i!`.
pub fn class_weight(c: &CycleType) -> BigUint {
    c.0.multiplicities()
        .iter()
        .enumerate()
        .fold(BigUint::one(), |acc, (i, &m)| {
            acc * BigUint::from(i + 1).pow(m as u32) * crate::partitions::factorial(m)
        })
}

/// `p_c(η) = ∏_parts Σ_i η_i^part`.
pub fn power_sum_eval(c: &CycleType, eta: &Spectrum) -> f64 {
    c.0.parts()
        .iter()
        .map(|&r| eta.values.iter().map(|e| e.powi(r as i32)).sum::<f64>())
        .product()
}

/// Schur polynomial `s_μ(η)`; zero when `μ` has more rows than `η` entries.
pub fn schur_eval(mu: &Partition, eta: &Spectrum) -> f64 {
    if mu.len() > eta.len() {
        return 0.0;
    }
    let n = mu.size();
    enumerate_partitions(n, n)
        .into_iter()
        .map(|c| {
            let c = CycleType(c);
            let chi = mn(mu.parts(), c.0.parts());
            if chi == 0 {
                return 0.0;
            }
            let z = class_weight(&c).to_f64().unwrap();
            chi as f64 * power_sum_eval(&c, eta) / z
        })
        .sum()
}

/// `tr(ℙ_μ η^{⊗N}) = dim 𝕐_μ · s_μ(η)`.
pub fn projected_trace(mu: &Partition, eta: &Spectrum) -> f64 {
    dim_specht(mu).to_f64().unwrap() * schur_eval(mu, eta)
}

#[derive(Clone, Debug, Serialize)]
pub struct PieriCheck {
    /// `s_{λ⁻}(η) · p_1(η)`
    pub lhs: f64,
    /// `Σ_{ν ↘ λ⁻, ℓ(ν) ≤ k} s_ν(η)`
    pub rhs: f64,
    pub terms: Vec<Partition>,
    pub abs_diff: f64,
}

/// Both sides of the one-box Pieri rule.
pub fn pieri_one_box(lambda_minus: &Partition, k: usize, eta: &Spectrum) -> Result<PieriCheck> {
    if eta.len() != k {
        return domain(format!("spectrum has {} entries, expected {k}", eta.len()));
    }
    let p1: f64 = eta.values.iter().sum();
    let lhs = schur_eval(lambda_minus, eta) * p1;
    let terms = add_one_box(lambda_minus, k);
    let rhs = terms.iter().map(|nu| schur_eval(nu, eta)).sum();
    Ok(PieriCheck { lhs, rhs, abs_diff: (lhs - rhs).abs(), terms })
}
