//! Dense complex linear-algebra helpers shared by the tensor builders, the
//! reduced SDP and the witness searches.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenvalues ascending, with eigenvectors as matching columns.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = hermitian_part(a).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenpair(a: &CMat) -> (f64, CVec) {
    let (vals, vecs) = hermitian_eigen(a);
    (vals[0], vecs.column(0).into_owned())
}

/// Orthonormal basis of the span of `vectors`, dropping directions whose
/// residual norm falls below `tol`. Orthogonalization is done twice.
pub fn gram_schmidt<I>(vectors: I, tol: f64, max_rank: Option<usize>) -> Vec<CVec>
where
    I: IntoIterator<Item = CVec>,
{
    let mut basis: Vec<CVec> = Vec::new();
    for mut v in vectors {
        if max_rank.is_some_and(|r| basis.len() >= r) {
            break;
        }
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v.axpy(-proj, b, ONE);
            }
        }
        let norm = v.norm();
        if norm > tol {
            basis.push(v.unscale(norm));
        }
    }
    basis
}

pub fn columns_to_matrix(rows: usize, cols: &[CVec]) -> CMat {
    if cols.is_empty() {
        return CMat::zeros(rows, 0);
    }
    CMat::from_columns(cols)
}

/// Orthonormal basis of the range of a Hermitian PSD matrix: eigenvectors
/// with eigenvalue above `tol` times the largest one.
pub fn range_basis(a: &CMat, tol: f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(a);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > tol * top.max(1e-300)).collect();
    CMat::from_fn(a.nrows(), keep.len(), |r, c| vecs[(r, keep[c])])
}

/// `min ⟨x|A|x⟩ / ⟨x|G|x⟩` over `x` in the range of the PSD matrix `G`.
/// Returns `None` when `G` vanishes numerically.
pub fn generalized_min_eigenpair(a: &CMat, g: &CMat, tol: f64) -> Option<(f64, CVec)> {
    let (gv, gw) = hermitian_eigen(g);
    let top = gv.last().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return None;
    }
    let keep: Vec<usize> = (0..gv.len()).filter(|&i| gv[i] > tol * top).collect();
    let w = CMat::from_fn(g.nrows(), keep.len(), |r, c| gw[(r, keep[c])] / gv[keep[c]].sqrt());
    let reduced = w.adjoint() * a * &w;
    let (val, z) = min_eigenpair(&reduced);
    Some((val, w * z))
}

pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let qr = gaussian_matrix(n, n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let col = u.column(j) * phase;
        u.set_column(j, &col);
    }
    u
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE up to scaling).
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let a = gaussian_matrix(n, n, rng);
    hermitian_part(&a)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Row-major strides of a tensor with the given factor dimensions.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Flat offsets of all multi-indices over `factors` (row-major in the
/// listed order), given the global strides.
fn offsets(dims: &[usize], st: &[usize], factors: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for &o in &out {
            for i in 0..dims[f] {
                next.push(o + i * st[f]);
            }
        }
        out = next;
    }
    out
}

/// Applies `op` to the listed tensor factors (in the listed order) of a
/// vector with factor dimensions `dims`; other factors see the identity.
pub fn apply_local(v: &[C64], dims: &[usize], op: &CMat, factors: &[usize]) -> Vec<C64> {
    let st = strides(dims);
    let local = offsets(dims, &st, factors);
    assert_eq!(op.nrows(), local.len());
    assert_eq!(op.ncols(), local.len());
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !factors.contains(i)).collect();
    let bases = offsets(dims, &st, &rest);
    let mut out = vec![ZERO; v.len()];
    let mut buf = vec![ZERO; local.len()];
    for &b in &bases {
        for (j, &o) in local.iter().enumerate() {
            buf[j] = v[b + o];
        }
        for (i, &o) in local.iter().enumerate() {
            let mut acc = ZERO;
            for (j, x) in buf.iter().enumerate() {
                let m = op[(i, j)];
                if m != ZERO {
                    acc += m * x;
                }
            }
            out[b + o] = acc;
        }
    }
    out
}

/// Digits of `index` in the mixed radix `dims` (most significant first).
pub fn unravel(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for i in (0..dims.len()).rev() {
        out[i] = index % dims[i];
        index /= dims[i];
    }
}

pub fn ravel(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &m)| acc * m + d)
}
