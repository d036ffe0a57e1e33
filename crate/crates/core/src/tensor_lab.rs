//! Explicit dense constructions: permutation operators, central projectors,
//! the top antisymmetrizer `Π_k`, the dualization map `ℰ`, the lifted
//! operators `X_{k,N}` and `X_λ`, and the Bose-symmetric vectors `|φ_μ(x,y)⟩`.
//!
//! Global factor ordering: `[dual (k−1) | extension (N) | Alice | Bob (N)]`,
//! every factor of the first two groups of dimension `k`, the rest `d`.

use std::env;

use nalgebra::Complex;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{apply_local, kron, max_abs_diff, real, CMat, CVec, C64, ONE, ZERO};
use crate::partitions::{admissible_mus, dim_specht, factorial, remove_first_column, Partition};
use crate::permutation::{all_permutations, Permutation};
use crate::symfun::{schur_eval, sn_character, CycleType, Spectrum};

/// Default cap on the Hilbert-space dimension of any dense construction.
pub const DEFAULT_HILBERT_CAP: usize = 20_000;
/// Hard cap on the side length of an explicitly stored square matrix.
pub const DENSE_MATRIX_CAP: usize = 4096;
/// Tolerance of the hermiticity check applied to operator input.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Hilbert-dimension cap, overridable through `BLOCKPOS_CAP`.
pub fn hilbert_cap() -> usize {
    env::var("BLOCKPOS_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_HILBERT_CAP)
}

pub fn ensure_hilbert(needed: usize) -> Result<()> {
    let cap = hilbert_cap();
    if needed > cap {
        return Err(Error::Resource { needed, cap });
    }
    Ok(())
}

pub fn ensure_dense(needed: usize) -> Result<()> {
    let cap = hilbert_cap().min(DENSE_MATRIX_CAP);
    if needed > cap {
        return Err(Error::Resource { needed, cap });
    }
    Ok(())
}

/// `base^exp`, saturating at `usize::MAX`.
pub fn checked_pow(base: usize, exp: usize) -> usize {
    base.checked_pow(exp as u32).unwrap_or(usize::MAX)
}

#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub matrix: CMat,
    /// Local dimensions of the tensor factors, when meaningful.
    pub shape: Option<Vec<usize>>,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

#[derive(Clone, Debug)]
pub struct DenseVector {
    pub data: CVec,
    pub shape: Vec<usize>,
}

/// Row-major real/imaginary parts of a complex matrix, as stored in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect()
        };
        ComplexMatrixJson { re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        if self.im.len() != rows
            || self.re.iter().chain(&self.im).any(|r| r.len() != cols)
        {
            return Err(Error::InvalidOperator("ragged or mismatched re/im arrays".into()));
        }
        Ok(CMat::from_fn(rows, cols, |r, c| Complex::new(self.re[r][c], self.im[r][c])))
    }
}

/// Hermitian `X` on `ℂ^d ⊗ ℂ^d`.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    d: usize,
    matrix: CMat,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    d: usize,
    #[serde(flatten)]
    entries: ComplexMatrixJson,
}

impl HermitianOperator {
    /// Validates shape and hermiticity (max-entry tolerance 1e−10), then
    /// stores the exact Hermitian part.
    pub fn new(d: usize, matrix: CMat) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidOperator("local dimension must be positive".into()));
        }
        if matrix.shape() != (d * d, d * d) {
            return Err(Error::InvalidOperator(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                d * d,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidOperator("non-finite entry".into()));
        }
        let dev = max_abs_diff(&matrix, &matrix.adjoint());
        if dev > HERMITICITY_TOL {
            return Err(Error::InvalidOperator(format!("not Hermitian: max |X - X^†| = {dev:e}")));
        }
        Ok(HermitianOperator { d, matrix: crate::linalg::hermitian_part(&matrix) })
    }

    pub fn identity(d: usize) -> Self {
        HermitianOperator { d, matrix: CMat::identity(d * d, d * d) }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn scaled(&self, s: f64) -> Self {
        HermitianOperator { d: self.d, matrix: self.matrix.scale(s) }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: OperatorJson = serde_json::from_str(text)?;
        let m = raw.entries.to_matrix()?;
        HermitianOperator::new(raw.d, m)
    }

    pub fn to_json(&self) -> String {
        let raw = OperatorJson { d: self.d, entries: ComplexMatrixJson::from_matrix(&self.matrix) };
        serde_json::to_string(&raw).expect("operator serializes")
    }
}

/// `(x, y)`, both `d × k`.
#[derive(Clone, Debug)]
pub struct FactorPair {
    pub x: CMat,
    pub y: CMat,
}

#[derive(Serialize, Deserialize)]
struct FactorPairJson {
    x: ComplexMatrixJson,
    y: ComplexMatrixJson,
}

impl FactorPair {
    pub fn new(x: CMat, y: CMat) -> Result<Self> {
        if x.shape() != y.shape() {
            return domain(format!("x is {:?} but y is {:?}", x.shape(), y.shape()));
        }
        Ok(FactorPair { x, y })
    }

    pub fn d(&self) -> usize {
        self.x.nrows()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }

    /// `Σ_i x_i ⊗ y_i = (x ⊗ y)|φ_k⟩`, indexed `a·d + b`.
    pub fn state(&self) -> CVec {
        let d = self.d();
        let m = &self.x * self.y.transpose();
        CVec::from_fn(d * d, |i, _| m[(i / d, i % d)])
    }
}

impl Serialize for FactorPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FactorPairJson {
            x: ComplexMatrixJson::from_matrix(&self.x),
            y: ComplexMatrixJson::from_matrix(&self.y),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FactorPair {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = FactorPairJson::deserialize(de)?;
        let x = raw.x.to_matrix().map_err(serde::de::Error::custom)?;
        let y = raw.y.to_matrix().map_err(serde::de::Error::custom)?;
        FactorPair::new(x, y).map_err(serde::de::Error::custom)
    }
}

/// `Perm(π)` on `(ℂ^m)^{⊗N}`.
pub fn perm_matrix(pi: &Permutation, m: usize) -> Result<DenseOperator> {
    let n = pi.len();
    let dim = checked_pow(m, n);
    ensure_dense(dim)?;
    let mut mat = CMat::zeros(dim, dim);
    for_each_perm_entry(pi, m, |row, col| mat[(row, col)] = ONE);
    Ok(DenseOperator { matrix: mat, shape: Some(vec![m; n]) })
}

/// Calls `f(row, col)` for each unit entry of `Perm(π)` on `(ℂ^m)^{⊗N}`.
pub fn for_each_perm_entry(pi: &Permutation, m: usize, mut f: impl FnMut(usize, usize)) {
    let n = pi.len();
    let dims = vec![m; n];
    let dim = checked_pow(m, n);
    let mut digits = vec![0; n];
    let mut out = vec![0; n];
    for col in 0..dim {
        crate::linalg::unravel(col, &dims, &mut digits);
        pi.permute_slots(&digits, &mut out);
        f(crate::linalg::ravel(&out, &dims), col);
    }
}

/// `ℙ_μ = (dim 𝕐_μ / N!) Σ_π χ_μ(π) Perm(π)` on `(ℂ^m)^{⊗N}`.
pub fn central_projector(mu: &Partition, m: usize) -> Result<DenseOperator> {
    let n = mu.size();
    let dim = checked_pow(m, n);
    ensure_dense(dim)?;
    let scale = dim_specht(mu).to_f64().unwrap() / factorial(n).to_f64().unwrap();
    let mut mat = CMat::zeros(dim, dim);
    for pi in all_permutations(n) {
        let chi = sn_character(mu, &CycleType::of(&pi))?;
        if chi == 0 {
            continue;
        }
        let w = real(chi as f64 * scale);
        for_each_perm_entry(&pi, m, |row, col| mat[(row, col)] += w);
    }
    Ok(DenseOperator { matrix: mat, shape: Some(vec![m; n]) })
}

/// Levi-Civita symbol of a digit sequence over `0..len`.
fn levi_civita(digits: &[usize]) -> i64 {
    let mut seen = vec![false; digits.len()];
    for &d in digits {
        if d >= digits.len() || seen[d] {
            return 0;
        }
        seen[d] = true;
    }
    Permutation::from_images(digits.to_vec()).sign()
}

/// The unit top form `ε / √k!` in `(ℂ^k)^{⊗k}`.
fn top_form(k: usize) -> CVec {
    let dims = vec![k; k];
    let dim = checked_pow(k, k);
    let norm = factorial(k).to_f64().unwrap().sqrt();
    let mut digits = vec![0; k];
    CVec::from_fn(dim, |i, _| {
        crate::linalg::unravel(i, &dims, &mut digits);
        real(levi_civita(&digits) as f64 / norm)
    })
}

/// `Π_k`, the projector onto the top antisymmetric form.
pub fn antisymmetrizer_top(k: usize) -> Result<DenseOperator> {
    ensure_dense(checked_pow(k, k))?;
    let v = top_form(k);
    Ok(DenseOperator { matrix: &v * v.adjoint(), shape: Some(vec![k; k]) })
}

/// `ℰ : ℂ^k → (ℂ^k)^{⊗(k−1)}`, `ℰ|i⟩ = Σ ε_{a_2…a_k i} / √(k−1)! |a_2…a_k⟩`.
pub fn dualization_map(k: usize) -> Result<CMat> {
    if k == 0 {
        return domain("k must be positive");
    }
    let rows = checked_pow(k, k - 1);
    ensure_dense(rows)?;
    let norm = factorial(k - 1).to_f64().unwrap().sqrt();
    let dims = vec![k; k - 1];
    let mut digits = vec![0; k];
    Ok(CMat::from_fn(rows, k, |r, i| {
        crate::linalg::unravel(r, &dims, &mut digits[..k - 1]);
        digits[k - 1] = i;
        real(levi_civita(&digits) as f64 / norm)
    }))
}

/// `|φ_k⟩ = Σ_i |ii⟩` (unnormalized).
pub fn max_entangled(k: usize) -> CVec {
    CVec::from_fn(k * k, |i, _| if i / k == i % k { ONE } else { ZERO })
}

/// Max-entry deviation in `k (ℰ⊗1)† Π_k (ℰ⊗1) = |φ_k⟩⟨φ_k|`.
pub fn dualization_identity_error(k: usize) -> Result<f64> {
    let e = kron(&dualization_map(k)?, &CMat::identity(k, k));
    let pi = antisymmetrizer_top(k)?.matrix;
    let lhs = (e.adjoint() * pi * e).scale(k as f64);
    let phi = max_entangled(k);
    Ok(max_abs_diff(&lhs, &(&phi * phi.adjoint())))
}

fn validate_lambda(lambda: &Partition, k: usize, n: usize) -> Result<()> {
    if k == 0 || n == 0 {
        return domain("k and N must be positive");
    }
    if lambda.size() != n + k - 1 || lambda.len() != k {
        return domain(format!("{lambda} must have {} boxes in exactly {k} rows", n + k - 1));
    }
    Ok(())
}

/// `X_{k,N} = kΠ_k ⊗ 1_k^{⊗(N−1)} ⊗ X ⊗ 1_d^{⊗(N−1)}`.
pub fn build_x_kn(x: &HermitianOperator, k: usize, n: usize) -> Result<DenseOperator> {
    if k == 0 || n == 0 {
        return domain("k and N must be positive");
    }
    let d = x.d();
    let dim = checked_pow(k, k - 1 + n).saturating_mul(checked_pow(d, n + 1));
    ensure_dense(dim)?;
    let aux = kron(&antisymmetrizer_top(k)?.matrix.scale(k as f64), &CMat::identity(k.pow(n as u32 - 1), k.pow(n as u32 - 1)));
    let sys = kron(x.matrix(), &CMat::identity(d.pow(n as u32 - 1), d.pow(n as u32 - 1)));
    Ok(DenseOperator { matrix: kron(&aux, &sys), shape: Some(shape(k, d, n)) })
}

/// `X_λ = kΠ_k ⊗ ℙ_{λ⁻} ⊗ X ⊗ 1_d^{⊗(N−1)}`.
pub fn build_x_lambda(x: &HermitianOperator, lambda: &Partition, k: usize, n: usize) -> Result<DenseOperator> {
    validate_lambda(lambda, k, n)?;
    let d = x.d();
    let dim = checked_pow(k, k - 1 + n).saturating_mul(checked_pow(d, n + 1));
    ensure_dense(dim)?;
    let p_minus = central_projector(&remove_first_column(lambda), k)?.matrix;
    let aux = kron(&antisymmetrizer_top(k)?.matrix.scale(k as f64), &p_minus);
    let sys = kron(x.matrix(), &CMat::identity(d.pow(n as u32 - 1), d.pow(n as u32 - 1)));
    Ok(DenseOperator { matrix: kron(&aux, &sys), shape: Some(shape(k, d, n)) })
}

/// Factor dimensions in the global ordering.
pub fn shape(k: usize, d: usize, n: usize) -> Vec<usize> {
    let mut s = vec![k; k - 1 + n];
    s.extend(std::iter::repeat_n(d, n + 1));
    s
}

/// Max-entry deviation in `Π_k ⊗ ℙ_{λ⁻} = (Π_k ⊗ 1) ℙ_λ (Π_k ⊗ 1)` on the
/// `|λ|` auxiliary factors.
pub fn verify_projection_equality(lambda: &Partition, k: usize) -> Result<f64> {
    if lambda.len() != k {
        return domain(format!("{lambda} must have exactly {k} rows"));
    }
    let n = lambda.size() + 1 - k;
    let rest = checked_pow(k, n - 1);
    let pi = kron(&antisymmetrizer_top(k)?.matrix, &CMat::identity(rest, rest));
    let p_lambda = central_projector(lambda, k)?.matrix;
    let lhs = kron(&antisymmetrizer_top(k)?.matrix, &central_projector(&remove_first_column(lambda), k)?.matrix);
    Ok(max_abs_diff(&lhs, &(&pi * p_lambda * &pi)))
}

/// `Δ(π)|v⟩`: `π` permutes the extension factors and Bob's factors together.
pub fn apply_delta(v: &[C64], pi: &Permutation, k: usize, d: usize, n: usize) -> Vec<C64> {
    assert_eq!(pi.len(), n);
    let dims = shape(k, d, n);
    let ext0 = k - 1;
    let bob0 = k + n;
    let mut digits = vec![0; dims.len()];
    let mut out_digits = vec![0; dims.len()];
    let mut out = vec![ZERO; v.len()];
    for (i, z) in v.iter().enumerate() {
        crate::linalg::unravel(i, &dims, &mut digits);
        out_digits.copy_from_slice(&digits);
        pi.permute_slots(&digits[ext0..ext0 + n], &mut out_digits[ext0..ext0 + n]);
        pi.permute_slots(&digits[bob0..bob0 + n], &mut out_digits[bob0..bob0 + n]);
        out[crate::linalg::ravel(&out_digits, &dims)] = *z;
    }
    out
}

/// `|φ_μ(x,y)⟩ = Σ (ℰ ⊗ ℙ_μ)|i_0 i_1…i_N⟩ ⊗ (x ⊗ y^{⊗N})|i_0 i_1…i_N⟩`.
pub fn build_phi_mu(mu: &Partition, k: usize, pair: &FactorPair) -> Result<DenseVector> {
    let n = mu.size();
    if n == 0 {
        return domain("μ must be nonempty");
    }
    if mu.len() > k || pair.k() != k {
        return domain(format!("{mu} needs at most {k} rows and a d x {k} factor pair"));
    }
    let d = pair.d();
    let dims = shape(k, d, n);
    let total = dims.iter().fold(1usize, |a, &b| a.saturating_mul(b));
    ensure_hilbert(total)?;
    let kn = checked_pow(k, n);
    let dn = checked_pow(d, n);
    ensure_dense(kn)?;

    // dual ⊗ Alice block: Ev[a, r] = Σ_i ℰ[a, i] x[r, i]
    let ev = dualization_map(k)? * pair.x.transpose();
    // ext ⊗ Bob block: T[I, J] = Σ_{I'} ℙ_μ[I, I'] ∏_t y[J_t, I'_t]
    let mut yn = CMat::from_element(1, 1, ONE);
    for _ in 0..n {
        yn = kron(&yn, &pair.y);
    }
    let t = central_projector(mu, k)?.matrix * yn.transpose();

    let dual = ev.nrows();
    let mut data = CVec::zeros(total);
    for a in 0..dual {
        for big_i in 0..kn {
            for r in 0..d {
                let e = ev[(a, r)];
                if e == ZERO {
                    continue;
                }
                let base = ((a * kn + big_i) * d + r) * dn;
                for j in 0..dn {
                    data[base + j] = e * t[(big_i, j)];
                }
            }
        }
    }
    Ok(DenseVector { data, shape: dims })
}

/// The two evaluations of `⟨φ_μ|X_λ|φ_μ⟩ / ⟨φ_μ|φ_μ⟩`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ObjectiveRoutes {
    /// Explicit Rayleigh quotient with the dense vectors.
    pub matrix: f64,
    /// `f(x,y) · dim 𝕐_{λ⁻} s_{λ⁻}(η) tr(y†y) / (dim 𝕐_μ s_μ(η))`.
    pub formula: f64,
}

impl ObjectiveRoutes {
    pub fn relative_gap(&self) -> f64 {
        (self.matrix - self.formula).abs() / self.matrix.abs().max(self.formula.abs()).max(1e-300)
    }
}

pub fn f_lambda_mu(
    x: &HermitianOperator,
    lambda: &Partition,
    mu: &Partition,
    pair: &FactorPair,
) -> Result<ObjectiveRoutes> {
    let k = lambda.len();
    if !admissible_mus(lambda, k)?.contains(mu) {
        return domain(format!("{mu} is not admissible for {lambda}"));
    }
    if pair.d() != x.d() {
        return domain("factor pair and operator disagree on d");
    }
    let n = mu.size();
    let phi = build_phi_mu(mu, k, pair)?;
    let norm2 = phi.data.norm_squared();
    if norm2 < 1e-300 {
        return domain("|φ_μ(x,y)⟩ vanishes");
    }
    let dims = phi.shape.clone();
    let l = k - 1 + n;
    let mut w: Vec<C64> = phi.data.iter().copied().collect();
    let pi_k = antisymmetrizer_top(k)?.matrix.scale(k as f64);
    w = apply_local(&w, &dims, &pi_k, &(0..k).collect::<Vec<_>>());
    if n > 1 {
        let p_minus = central_projector(&remove_first_column(lambda), k)?.matrix;
        w = apply_local(&w, &dims, &p_minus, &(k..l).collect::<Vec<_>>());
    }
    w = apply_local(&w, &dims, x.matrix(), &[l, l + 1]);
    let matrix = phi.data.iter().zip(&w).map(|(a, b)| a.conj() * b).sum::<C64>().re / norm2;

    let gram = pair.y.adjoint() * &pair.y;
    let eta = Spectrum::new(crate::linalg::hermitian_eigenvalues(&gram))?;
    let lm = remove_first_column(lambda);
    let f = crate::witness_search::f_objective(x, pair)?;
    let formula = f * dim_specht(&lm).to_f64().unwrap() * schur_eval(&lm, &eta) * gram.trace().re
        / (dim_specht(mu).to_f64().unwrap() * schur_eval(mu, &eta));
    Ok(ObjectiveRoutes { matrix, formula })
}
