//! Block sizes `𝒞_λ` of the reduced hierarchy, their rectangular closed
//! form and its consequences (collapse at `k = d`, limit ratios, growth
//! exponent), plus two independent cross-checks of `𝒞_λ`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMat, ONE, ZERO};
use crate::partitions::{
    admissible_mus, complement_in_rectangle, contains, dim_specht, dim_unitary_irrep, enumerate_partitions,
    factorial, Partition,
};
use crate::permutation::Permutation;
use crate::symfun::{class_weight, sn_character, CycleType};
use crate::tensor_lab::{central_projector, checked_pow};

fn big(n: usize) -> BigInt {
    BigInt::from(n)
}

fn ratio_of(a: &BigUint, b: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(a.clone()), BigInt::from(b.clone()))
}

fn to_integer(r: BigRational) -> Result<BigUint> {
    if !r.is_integer() {
        return Err(Error::Numerical(format!("expected an integer, got {r}")));
    }
    r.to_integer()
        .to_biguint()
        .ok_or_else(|| Error::Numerical("expected a nonnegative integer".into()))
}

/// `𝒞_{(n^k)} = d · k(d+n−1)/(k+n−1) · ∏_{r=1}^{k} (d+n−r−1)!(k−r)! / ((k+n−r−1)!(d−r)!)`.
pub fn complexity_rectangular(d: usize, k: usize, n: usize) -> Result<BigUint> {
    if k == 0 || k > d {
        return domain(format!("need 1 <= k <= d, got k = {k}, d = {d}"));
    }
    if n == 0 {
        return domain("n must be at least 1");
    }
    let mut acc = BigRational::new(big(d * k * (d + n - 1)), big(k + n - 1));
    for r in 1..=k {
        let num = factorial(d + n - r - 1) * factorial(k - r);
        let den = factorial(k + n - r - 1) * factorial(d - r);
        acc *= ratio_of(&num, &den);
    }
    to_integer(acc)
}

fn check_shape(lambda: &Partition, k: usize, n: usize) -> Result<()> {
    if n == 0 || lambda.size() != n + k - 1 || lambda.len() != k {
        return domain(format!("{lambda} must have {} boxes in exactly {k} rows", n + k - 1));
    }
    Ok(())
}

/// `𝒞_λ = d · Σ_{μ ↘ λ⁻, μ ⊂ λ} dim 𝕌^d_μ`.
pub fn complexity_general(lambda: &Partition, d: usize, k: usize, n: usize) -> Result<BigUint> {
    check_shape(lambda, k, n)?;
    let sum: BigUint = admissible_mus(lambda, k)?.iter().map(|mu| dim_unitary_irrep(mu, d)).sum();
    Ok(sum * d)
}

/// Multiplicity of `sgn ⊗ 𝕐_μ` in `𝕐_λ` restricted to `S_{k−1} × S_N`,
/// by the character inner product over pairs of classes.
pub fn branching_multiplicity(lambda: &Partition, mu: &Partition, k: usize) -> Result<BigUint> {
    let n = mu.size();
    if lambda.size() != n + k - 1 {
        return domain(format!("|{lambda}| must equal |{mu}| + {}", k - 1));
    }
    let mut acc = BigRational::zero();
    for c1 in enumerate_partitions(k - 1, k - 1) {
        let c1 = CycleType(c1);
        for c2 in enumerate_partitions(n, n) {
            let c2 = CycleType(c2);
            let chi_mu = sn_character(mu, &c2)?;
            if chi_mu == 0 {
                continue;
            }
            let mut joint: Vec<usize> = c1.0.parts().to_vec();
            joint.extend_from_slice(c2.0.parts());
            let chi_lambda = sn_character(lambda, &CycleType::new(joint)?)?;
            let num = BigInt::from(chi_lambda * c1.sign() * chi_mu);
            let den = BigInt::from(class_weight(&c1) * class_weight(&c2));
            acc += BigRational::new(num, den);
        }
    }
    to_integer(acc)
}

/// `d · Σ_{μ ⊢ N} m(λ, μ) · dim 𝕌^d_μ` with `m` from characters.
pub fn complexity_character_oracle(lambda: &Partition, d: usize, k: usize, n: usize) -> Result<BigUint> {
    check_shape(lambda, k, n)?;
    let mut sum = BigUint::zero();
    for mu in enumerate_partitions(n, d) {
        sum += branching_multiplicity(lambda, &mu, k)? * dim_unitary_irrep(&mu, d);
    }
    Ok(sum * d)
}

/// Largest `d^{N+1} · dim M` the numeric intertwiner oracle accepts.
pub const HOM_ORACLE_CAP: usize = 10_000;

/// Dimension of `{K : (1 ⊗ Perm(π)) K = K ρ(π) ∀π}`, the exchangeable
/// intertwiners from the multiplicity space of `λ` into `ℂ^d ⊗ (ℂ^d)^{⊗N}`.
///
/// The multiplicity space is realized as the weight-λ slice of the range of
/// `ℙ_λ (P_alt ⊗ 1)` on `(ℂ^k)^{⊗(k−1+N)}`, with `S_N` acting on the last
/// `N` factors; the equations are imposed for adjacent transpositions.
pub fn hom_dimension_numeric(lambda: &Partition, d: usize, k: usize, n: usize) -> Result<usize> {
    check_shape(lambda, k, n)?;
    let l = k - 1 + n;
    let aux_dim = checked_pow(k, l);
    let proj = central_projector(lambda, k)?.matrix;
    let dims = vec![k; l];
    let alt = if k > 1 {
        let p = central_projector(&Partition::column(k - 1), k)?.matrix;
        let dual: Vec<usize> = (0..k - 1).collect();
        let cols: Vec<_> = (0..aux_dim)
            .map(|j| {
                let mut e = vec![ZERO; aux_dim];
                e[j] = ONE;
                crate::linalg::CVec::from_vec(crate::linalg::apply_local(&e, &dims, &p, &dual))
            })
            .collect();
        CMat::from_columns(&cols)
    } else {
        CMat::identity(aux_dim, aux_dim)
    };
    let weight: Vec<usize> = (0..aux_dim)
        .filter(|&i| {
            let mut digits = vec![0; l];
            crate::linalg::unravel(i, &dims, &mut digits);
            (0..k).all(|c| digits.iter().filter(|&&x| x == c).count() == lambda.part(c))
        })
        .collect();
    let op = proj * alt;
    let slice = CMat::from_fn(aux_dim, weight.len(), |r, c| op[(r, weight[c])]);
    let r = crate::linalg::range_basis(&(&slice * slice.adjoint()), 1e-9);
    let m = r.ncols();
    let sys = checked_pow(d, n + 1);
    if sys.saturating_mul(m) > HOM_ORACLE_CAP {
        return Err(Error::Resource { needed: sys * m, cap: HOM_ORACLE_CAP });
    }
    // unknown vec(K) indexed by (row of K) * m + (column of K)
    let unknowns = sys * m;
    let mut gram = CMat::zeros(unknowns, unknowns);
    for t in 0..n.saturating_sub(1) {
        let ext = Permutation::transposition(n, t, t + 1);
        let mut full_images: Vec<usize> = (0..l).collect();
        for s in 0..n {
            full_images[k - 1 + s] = k - 1 + ext.apply(s);
        }
        let aux_perm = crate::tensor_lab::perm_matrix(&Permutation::from_images(full_images), k)?.matrix;
        let rho = r.adjoint() * aux_perm * &r;
        let mut bob_images: Vec<usize> = (0..n + 1).collect();
        for s in 0..n {
            bob_images[1 + s] = 1 + ext.apply(s);
        }
        let sys_perm = crate::tensor_lab::perm_matrix(&Permutation::from_images(bob_images), d)?.matrix;
        // (P K − K ρ) as a linear map on vec(K)
        let mut a = CMat::zeros(unknowns, unknowns);
        for i in 0..sys {
            for j in 0..m {
                let col = i * m + j;
                for i2 in 0..sys {
                    let v = sys_perm[(i2, i)];
                    if v != ZERO {
                        a[(i2 * m + j, col)] += v;
                    }
                }
                for j2 in 0..m {
                    let v = rho[(j, j2)];
                    if v != ZERO {
                        a[(i * m + j2, col)] -= v;
                    }
                }
            }
        }
        gram += a.adjoint() * a;
    }
    let vals = hermitian_eigenvalues(&gram);
    Ok(vals.iter().filter(|v| **v < 1e-8).count())
}

/// `(kd)^{N+1}`, the size of the unreduced variable.
pub fn unreduced_complexity(d: usize, k: usize, n: usize) -> BigUint {
    BigUint::from(k * d).pow(n as u32 + 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapseReport {
    pub d: usize,
    pub n: Vec<usize>,
    #[serde(serialize_with = "ser_big_vec")]
    pub values: Vec<BigUint>,
    /// Every value equals `d²`.
    pub collapsed: bool,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_big_vec<S: serde::Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub fn collapse_check(d: usize, n_range: impl IntoIterator<Item = usize>) -> Result<CollapseReport> {
    let n: Vec<usize> = n_range.into_iter().collect();
    let values = n.iter().map(|&n| complexity_rectangular(d, d, n)).collect::<Result<Vec<_>>>()?;
    let target = BigUint::from(d * d);
    let collapsed = values.iter().all(|v| *v == target);
    Ok(CollapseReport { d, n, values, collapsed })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioLimit {
    /// Converges to `k/(d−k)`.
    Finite,
    Zero,
    Infinite,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub n: usize,
    /// Exact `p/q`.
    pub exact: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub d: usize,
    pub k: usize,
    pub k_prime: usize,
    pub rows: Vec<RatioRow>,
    pub limit: RatioLimit,
    pub target: Option<f64>,
    /// `|ratio − k/(d−k)|` per row, for the finite limit.
    pub deviations: Vec<f64>,
    pub monotone: bool,
}

/// `𝒞_{(n^k)} / 𝒞_{(n^{k′})}` along `n_list`.
pub fn ratio_diagnostics(d: usize, k: usize, k_prime: usize, n_list: &[usize]) -> Result<RatioReport> {
    if k_prime == 0 || k_prime > k || k > d {
        return domain(format!("need 1 <= k' <= k <= d, got k' = {k_prime}, k = {k}, d = {d}"));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let r = ratio_of(&complexity_rectangular(d, k, n)?, &complexity_rectangular(d, k_prime, n)?);
        let value = r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap();
        rows.push(RatioRow { n, exact: r.to_string(), value });
    }
    let sign = (k as i64 - k_prime as i64) * (d as i64 - k as i64 - k_prime as i64);
    let limit = match sign.signum() {
        0 => RatioLimit::Finite,
        1 => RatioLimit::Infinite,
        _ => RatioLimit::Zero,
    };
    let target = (limit == RatioLimit::Finite && d > k).then(|| k as f64 / (d - k) as f64);
    let target = if limit == RatioLimit::Finite && k == k_prime { Some(1.0) } else { target };
    let deviations: Vec<f64> = match target {
        Some(t) => rows.iter().map(|r| (r.value - t).abs()).collect(),
        None => Vec::new(),
    };
    let monotone = match limit {
        RatioLimit::Finite => deviations.windows(2).all(|w| w[1] <= w[0]),
        RatioLimit::Zero => rows.windows(2).all(|w| w[1].value <= w[0].value),
        RatioLimit::Infinite => rows.windows(2).all(|w| w[1].value >= w[0].value),
    };
    Ok(RatioReport { d, k, k_prime, rows, limit, target, deviations, monotone })
}

/// Least-squares slope of `log 𝒞_{(n^k)}` against `log n` on `n_lo..=n_hi`.
pub fn asymptotic_exponent(d: usize, k: usize, n_lo: usize, n_hi: usize) -> Result<f64> {
    if n_hi <= n_lo || n_lo < 8 {
        return domain(format!("need n_hi > n_lo >= 8, got {n_lo}..{n_hi}"));
    }
    let points = (n_lo..=n_hi)
        .map(|n| {
            let c = complexity_rectangular(d, k, n)?;
            Ok(((n as f64).ln(), log_big(&c)))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

fn log_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `dim 𝕌^d_μ = dim 𝕌^d_{(n^d)/μ}` for the rotated complement.
pub fn skew_dim_check(mu: &Partition, n: usize, d: usize) -> Result<bool> {
    if !contains(mu, &Partition::rectangle(n, d)) {
        return domain(format!("{mu} does not fit in ({n}^{d})"));
    }
    let comp = complement_in_rectangle(mu, n, d)?;
    Ok(dim_unitary_irrep(mu, d) == dim_unitary_irrep(&comp, d))
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexityRow {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    #[serde(rename = "C", serialize_with = "ser_big")]
    pub c: BigUint,
    #[serde(rename = "C_unreduced", serialize_with = "ser_big")]
    pub c_unreduced: BigUint,
    /// `k = d`, where the block size no longer depends on `n`.
    pub collapse: bool,
}

pub fn complexity_table(d: usize, k: usize, n_range: &[usize]) -> Result<Vec<ComplexityRow>> {
    n_range
        .par_iter()
        .map(|&n| {
            Ok(ComplexityRow {
                d,
                k,
                n,
                c: complexity_rectangular(d, k, n)?,
                c_unreduced: unreduced_complexity(d, k, k * n - k + 1),
                collapse: k == d,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexityReport {
    pub d: usize,
    pub k: usize,
    pub lambda: Partition,
    #[serde(serialize_with = "ser_big")]
    pub value: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub branching_sum: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub character_oracle: BigUint,
    pub collapse: bool,
}

impl ComplexityReport {
    pub fn consistent(&self) -> bool {
        self.value == self.branching_sum && self.value == self.character_oracle
    }
}

/// The rectangular value at level `n` with both cross-checks.
pub fn complexity_report(d: usize, k: usize, n: usize) -> Result<ComplexityReport> {
    let value = complexity_rectangular(d, k, n)?;
    let lambda = Partition::rectangle(n, k);
    let big_n = k * n - k + 1;
    Ok(ComplexityReport {
        d,
        k,
        branching_sum: complexity_general(&lambda, d, k, big_n)?,
        character_oracle: complexity_character_oracle(&lambda, d, k, big_n)?,
        lambda,
        value,
        collapse: k == d,
    })
}

/// `dim 𝕐_{((n−1)^k)}` and `dim 𝕐_{(n,(n−1)^{k−1})}` from the closed
/// products `(kn−k)! ∏ (k−r)!/(n+k−r−1)!` and `k(kn−k+1)!/(n+k−1) ∏ …`.
pub fn rectangular_specht_closed_forms(k: usize, n: usize) -> (BigUint, BigUint) {
    let mut prod = BigRational::one();
    for r in 1..=k {
        prod *= ratio_of(&factorial(k - r), &factorial(n + k - r - 1));
    }
    let lower = BigRational::from_integer(BigInt::from(factorial(k * n - k))) * &prod;
    let upper = BigRational::new(BigInt::from(factorial(k * n - k + 1) * k), big(n + k - 1)) * prod;
    (to_integer(lower).unwrap(), to_integer(upper).unwrap())
}

/// Same two dimensions via hook lengths.
pub fn rectangular_specht_hooks(k: usize, n: usize) -> (BigUint, BigUint) {
    let mut upper = vec![n];
    upper.extend(std::iter::repeat_n(n - 1, k - 1));
    (
        dim_specht(&Partition::rectangle(n - 1, k)),
        dim_specht(&Partition::new(upper).expect("weakly decreasing")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn binom(n: usize, r: usize) -> BigUint {
        factorial(n) / (factorial(r) * factorial(n - r))
    }

    #[test]
    fn rectangular_examples() {
        for d in 1..=5 {
            for n in 1..=6 {
                assert_eq!(complexity_rectangular(d, d, n).unwrap(), BigUint::from(d * d));
                assert_eq!(complexity_rectangular(d, 1, n).unwrap(), binom(d + n - 1, n) * d);
            }
        }
        assert_eq!(complexity_rectangular(3, 3, 2).unwrap(), BigUint::from(9u32));
        assert!(complexity_rectangular(2, 3, 1).is_err());
    }

    #[test]
    fn general_examples() {
        let expect = dim_unitary_irrep(&p(&[3, 1]), 3) + dim_unitary_irrep(&p(&[2, 2]), 3)
            + dim_unitary_irrep(&p(&[2, 1, 1]), 3);
        assert_eq!(complexity_general(&p(&[3, 2, 1]), 3, 3, 4).unwrap(), expect * 3u32);
        for d in 1..=4 {
            assert_eq!(complexity_general(&Partition::column(2), d, 2, 1).unwrap(), BigUint::from(d * d));
        }
        assert_eq!(
            complexity_general(&Partition::rectangle(3, 2), 3, 2, 5).unwrap(),
            complexity_rectangular(3, 2, 3).unwrap()
        );
        assert!(complexity_general(&p(&[2, 1]), 2, 3, 1).is_err());
    }

    #[test]
    fn character_oracle_small() {
        assert_eq!(branching_multiplicity(&p(&[3, 2, 1]), &p(&[3, 1]), 3).unwrap(), BigUint::one());
        assert_eq!(branching_multiplicity(&p(&[3, 2, 1]), &p(&[4]), 3).unwrap(), BigUint::zero());
        for lambda in enumerate_partitions(5, 3).into_iter().filter(|l| l.len() == 3) {
            assert_eq!(
                complexity_character_oracle(&lambda, 3, 3, 3).unwrap(),
                complexity_general(&lambda, 3, 3, 3).unwrap(),
                "{lambda}"
            );
        }
    }

    #[test]
    fn numeric_oracle_small() {
        assert_eq!(hom_dimension_numeric(&p(&[2, 1]), 2, 2, 2).unwrap(), 8);
        assert_eq!(hom_dimension_numeric(&Partition::column(2), 2, 2, 1).unwrap(), 4);
    }

    #[test]
    fn ratio_and_exponent() {
        let r = ratio_diagnostics(4, 3, 1, &[8, 16, 32, 64]).unwrap();
        assert_eq!(r.limit, RatioLimit::Finite);
        assert!(r.monotone && r.deviations.last().unwrap() / 3.0 < 0.1);
        assert_eq!(ratio_diagnostics(4, 3, 2, &[8]).unwrap().limit, RatioLimit::Zero);
        assert_eq!(ratio_diagnostics(5, 2, 1, &[8]).unwrap().limit, RatioLimit::Infinite);
        assert!(asymptotic_exponent(3, 3, 8, 20).unwrap().abs() < 1e-9);
        assert!(asymptotic_exponent(3, 3, 4, 20).is_err());
    }

    #[test]
    fn skew_examples() {
        assert!(skew_dim_check(&p(&[4, 3, 3]), 4, 5).unwrap());
        assert!(skew_dim_check(&Partition::empty(), 3, 4).unwrap());
        assert!(skew_dim_check(&p(&[5]), 4, 5).is_err());
    }

    #[test]
    fn unreduced_examples() {
        assert_eq!(unreduced_complexity(2, 2, 3), BigUint::from(256u32));
        assert_eq!(unreduced_complexity(3, 2, 5), BigUint::from(46656u32));
    }

    #[test]
    fn closed_forms_match_hooks() {
        for k in 1..=4 {
            for n in 1..=6 {
                assert_eq!(rectangular_specht_closed_forms(k, n), rectangular_specht_hooks(k, n));
            }
        }
    }
}
