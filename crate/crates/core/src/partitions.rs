//! Integer partitions (Young diagrams) and the combinatorics used to index
//! the reduced blocks: hook lengths, Specht and unitary irrep dimensions,
//! first-column removal, one-box branching and rectangle complements.
//!
//! Partitions are stored without zero parts; the empty partition is a valid
//! value of size 0. Cells are 1-based `(row, col)`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

impl Partition {
    /// Builds a partition from weakly decreasing parts. Trailing zeros are
    /// dropped; any other ordering violation is a domain error.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return domain(format!("parts {parts:?} are not weakly decreasing and positive"));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// The rectangle `(n^rows)`.
    pub fn rectangle(n: usize, rows: usize) -> Self {
        if n == 0 {
            return Partition::empty();
        }
        Partition(vec![n; rows])
    }

    /// A single column `(1^rows)`.
    pub fn column(rows: usize) -> Self {
        Partition::rectangle(1, rows)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of boxes.
    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Part `i` (0-based), zero beyond the last row.
    pub fn part(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.part(0);
        Partition((1..=cols).map(|j| self.0.iter().filter(|&&p| p >= j).count()).collect())
    }

    pub fn contains_cell(&self, c: Cell) -> bool {
        c.row >= 1 && c.col >= 1 && c.col <= self.part(c.row - 1)
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (1..=p).map(move |j| Cell::new(i + 1, j)))
    }

    /// Row multiplicities `m_1, …, m_N` (index 0 holds `m_1`).
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.part(0)];
        for &p in &self.0 {
            m[p - 1] += 1;
        }
        m
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `n` with at most `max_rows` rows, lexicographically
/// descending.
pub fn enumerate_partitions(n: usize, max_rows: usize) -> Vec<Partition> {
    fn rec(rem: usize, max_part: usize, rows_left: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if rows_left == 0 {
            return;
        }
        for p in (1..=max_part.min(rem)).rev() {
            cur.push(p);
            rec(rem - p, p, rows_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, max_rows, &mut Vec::new(), &mut out);
    out
}

/// Arm + leg + 1 of a cell.
pub fn hook_length(lambda: &Partition, c: Cell) -> Result<usize> {
    if !lambda.contains_cell(c) {
        return domain(format!("cell ({},{}) is outside {lambda}", c.row, c.col));
    }
    let arm = lambda.part(c.row - 1) - c.col;
    let leg = lambda.0[c.row..].iter().filter(|&&p| p >= c.col).count();
    Ok(arm + leg + 1)
}

fn hook_product(lambda: &Partition) -> BigUint {
    let conj = lambda.conjugate();
    lambda
        .cells()
        .map(|c| {
            let arm = lambda.part(c.row - 1) - c.col;
            let leg = conj.part(c.col - 1) - c.row;
            BigUint::from(arm + leg + 1)
        })
        .fold(BigUint::one(), |acc, h| acc * h)
}

pub(crate) fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Dimension of the Specht module, `N! / ∏ hooks`.
pub fn dim_specht(lambda: &Partition) -> BigUint {
    factorial(lambda.size()) / hook_product(lambda)
}

/// Dimension of the polynomial U(m) irrep of highest weight `lambda`
/// (hook-content formula); zero when `lambda` has more than `m` rows.
pub fn dim_unitary_irrep(lambda: &Partition, m: usize) -> BigUint {
    if lambda.len() > m {
        return BigUint::from(0u32);
    }
    let contents = lambda
        .cells()
        .map(|c| BigUint::from(m + c.col - c.row))
        .fold(BigUint::one(), |acc, x| acc * x);
    contents / hook_product(lambda)
}

/// `λ⁻`: the diagram with its first column removed.
pub fn remove_first_column(lambda: &Partition) -> Partition {
    Partition(lambda.0.iter().filter(|&&p| p > 1).map(|p| p - 1).collect())
}

/// `μ ⊆ λ` row by row.
pub fn contains(mu: &Partition, lambda: &Partition) -> bool {
    mu.len() <= lambda.len() && mu.0.iter().zip(&lambda.0).all(|(a, b)| a <= b)
}

/// `λ ↘ μ`: `λ` is `μ` with exactly one box appended.
pub fn covers(lambda: &Partition, mu: &Partition) -> bool {
    lambda.size() == mu.size() + 1 && contains(mu, lambda)
}

/// Partitions obtained from `μ` by appending one box, with at most
/// `max_rows` rows, ordered by the row receiving the box.
pub fn add_one_box(mu: &Partition, max_rows: usize) -> Vec<Partition> {
    let rows = (mu.len() + 1).min(max_rows);
    (0..rows)
        .filter(|&i| i == 0 || mu.part(i - 1) > mu.part(i))
        .map(|i| {
            let mut parts = mu.0.clone();
            if i == parts.len() {
                parts.push(1);
            } else {
                parts[i] += 1;
            }
            Partition(parts)
        })
        .collect()
}

/// The shapes `μ ⊂ λ` with `μ ↘ λ⁻` and at most `k` rows: `λ⁻` plus one box
/// in row `i ≤ k`, kept when the result is a partition contained in `λ`.
pub fn admissible_mus(lambda: &Partition, k: usize) -> Result<Vec<Partition>> {
    if lambda.len() != k {
        return domain(format!("{lambda} must have exactly {k} rows"));
    }
    let base: Vec<usize> = lambda.0.iter().map(|p| p - 1).collect();
    let mut out = Vec::new();
    for i in 0..k {
        let mut parts = base.clone();
        parts[i] += 1;
        if parts.windows(2).any(|w| w[0] < w[1]) {
            continue;
        }
        let mu = Partition::new(parts)?;
        if contains(&mu, lambda) {
            out.push(mu);
        }
    }
    Ok(out)
}

/// The 180°-rotated complement of `μ` inside the rectangle `(n^d)`.
pub fn complement_in_rectangle(mu: &Partition, n: usize, d: usize) -> Result<Partition> {
    if !contains(mu, &Partition::rectangle(n, d)) {
        return domain(format!("{mu} is not contained in ({n}^{d})"));
    }
    Partition::new((0..d).map(|i| n - mu.part(d - 1 - i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_increasing_parts() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(Partition::new(vec![2, 1, 0, 0]).unwrap(), p(&[2, 1]));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_partitions(3, 2), vec![p(&[3]), p(&[2, 1])]);
        assert_eq!(enumerate_partitions(0, 5), vec![Partition::empty()]);
        assert_eq!(enumerate_partitions(6, 3).len(), 7);
    }

    #[test]
    fn hooks() {
        assert_eq!(hook_length(&p(&[3, 2, 1]), Cell::new(1, 1)).unwrap(), 5);
        assert_eq!(hook_length(&p(&[1]), Cell::new(1, 1)).unwrap(), 1);
        assert_eq!(hook_length(&p(&[2, 2]), Cell::new(1, 1)).unwrap(), 3);
        assert!(hook_length(&p(&[2, 1]), Cell::new(2, 2)).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_specht(&p(&[2, 1])), BigUint::from(2u32));
        assert_eq!(dim_specht(&p(&[5])), BigUint::from(1u32));
        assert_eq!(dim_specht(&p(&[2, 2])), BigUint::from(2u32));
        assert_eq!(dim_specht(&Partition::empty()), BigUint::from(1u32));
        assert_eq!(dim_unitary_irrep(&p(&[1]), 2), BigUint::from(2u32));
        assert_eq!(dim_unitary_irrep(&p(&[2, 1]), 3), BigUint::from(8u32));
        assert_eq!(dim_unitary_irrep(&p(&[1, 1, 1]), 2), BigUint::from(0u32));
        assert_eq!(dim_unitary_irrep(&Partition::empty(), 4), BigUint::from(1u32));
    }

    #[test]
    fn first_column_removal() {
        assert_eq!(remove_first_column(&p(&[3, 2, 1])), p(&[2, 1]));
        assert_eq!(remove_first_column(&p(&[1, 1, 1])), Partition::empty());
        assert_eq!(remove_first_column(&Partition::rectangle(4, 3)), Partition::rectangle(3, 3));
    }

    #[test]
    fn admissible_examples() {
        assert_eq!(
            admissible_mus(&p(&[3, 2, 1]), 3).unwrap(),
            vec![p(&[3, 1]), p(&[2, 2]), p(&[2, 1, 1])]
        );
        for (n, k) in [(1, 1), (3, 2), (4, 3), (2, 4)] {
            let mut mu = vec![n];
            mu.extend(std::iter::repeat_n(n - 1, k - 1));
            assert_eq!(admissible_mus(&Partition::rectangle(n, k), k).unwrap(), vec![p(&mu)]);
        }
        assert_eq!(admissible_mus(&p(&[1, 1]), 2).unwrap(), vec![p(&[1])]);
        assert!(admissible_mus(&p(&[2, 1]), 3).is_err());
    }

    #[test]
    fn complements() {
        assert_eq!(complement_in_rectangle(&p(&[4, 3, 3]), 4, 5).unwrap(), p(&[4, 4, 1, 1]));
        assert_eq!(complement_in_rectangle(&Partition::rectangle(3, 2), 3, 2).unwrap(), Partition::empty());
        assert_eq!(complement_in_rectangle(&Partition::empty(), 3, 2).unwrap(), Partition::rectangle(3, 2));
        assert!(complement_in_rectangle(&p(&[4]), 3, 2).is_err());
    }

    #[test]
    fn containment_and_covering() {
        assert!(contains(&p(&[2, 1]), &p(&[3, 2, 1])));
        assert!(!contains(&p(&[2, 2]), &p(&[3, 1])));
        assert!(covers(&p(&[2, 1]), &p(&[2])));
        assert!(!covers(&p(&[2, 2]), &p(&[2])));
    }

    #[test]
    fn json_form() {
        assert_eq!(serde_json::to_string(&p(&[3, 2, 1])).unwrap(), "[3,2,1]");
        assert_eq!(serde_json::to_string(&Partition::empty()).unwrap(), "[]");
        let back: Partition = serde_json::from_str("[2,2]").unwrap();
        assert_eq!(back, p(&[2, 2]));
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    }
}
