use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Real eigenvalues sorted non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Sorts the values descending.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Values in `[floor, 0)` are set to zero; anything below `floor` is kept.
    pub fn clipped(&self, floor: f64) -> Spectrum {
        Spectrum(self.0.iter().map(|&v| if v < 0.0 && v >= floor { 0.0 } else { v }).collect())
    }

    /// Multiset comparison after zero-padding the shorter spectrum.
    pub fn matches(&self, other: &Spectrum, tol: f64) -> bool {
        let n = self.len().max(other.len());
        (0..n).all(|i| {
            let a = self.0.get(i).copied().unwrap_or(0.0);
            let b = other.0.get(i).copied().unwrap_or(0.0);
            (a - b).abs() <= tol
        })
    }

    /// Shannon entropy in bits with `0·log 0 = 0`.
    pub fn entropy_bits(&self) -> f64 {
        shannon_bits(&self.0)
    }
}

pub(crate) fn shannon_bits(values: &[f64]) -> f64 {
    values.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum::<f64>().max(0.0)
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn from_nalgebra(m: &DMatrix<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Hermitian eigendecomposition `m = U diag(λ) U†`, eigenvalues descending
/// and eigenvectors in the matching columns of `U`.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<(Spectrum, ComplexMatrix)> {
    eig_hermitian_with(m, &Tolerances::default())
}

pub fn eig_hermitian_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<(Spectrum, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::shape(format!("eig_hermitian needs a square matrix, got {:?}", m.shape())));
    }
    if !m.is_hermitian(tol.hermiticity) {
        return Err(Error::contract("eig_hermitian input is not Hermitian"));
    }
    Ok(eig_hermitian_unchecked(m))
}

pub(crate) fn eig_hermitian_unchecked(m: &ComplexMatrix) -> (Spectrum, ComplexMatrix) {
    let n = m.rows();
    if n == 0 {
        return (Spectrum(Vec::new()), ComplexMatrix::zeros(0, 0));
    }
    let eig = nalgebra::SymmetricEigen::new(to_nalgebra(&m.hermitian_part()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (Spectrum(values), vectors)
}

/// Eigenvalues only, for matrices already known to be Hermitian.
pub(crate) fn eigvalsh(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.rows();
    match n {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = m[(0, 1)];
            let mean = 0.5 * (a + d);
            let half = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            vec![mean + half, mean - half]
        }
        _ => {
            let mut v: Vec<f64> =
                nalgebra::SymmetricEigen::new(to_nalgebra(&m.hermitian_part())).eigenvalues.iter().copied().collect();
            v.sort_by(|a, b| b.total_cmp(a));
            v
        }
    }
}

/// Applies `f` to the spectrum of a Hermitian matrix: `U diag(f(λ)) U†`.
pub fn hermitian_function(m: &ComplexMatrix, f: impl Fn(f64) -> C64) -> ComplexMatrix {
    let (spec, u) = eig_hermitian_unchecked(m);
    let n = m.rows();
    let fv: Vec<C64> = spec.values().iter().map(|&l| f(l)).collect();
    ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| u[(i, k)] * fv[k] * u[(j, k)].conj()).sum())
}

/// Full singular value decomposition `m = U diag(s) V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v_adjoint: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let s = ComplexMatrix::from_real_diagonal(&self.singular_values);
        let u = ComplexMatrix::from_fn(self.u.rows(), k, |i, j| self.u[(i, j)]);
        let vt = ComplexMatrix::from_fn(k, self.v_adjoint.cols(), |i, j| self.v_adjoint[(i, j)]);
        u.matmul(&s).matmul(&vt)
    }
}

/// Thin SVD with singular values sorted descending.
pub fn svd(m: &ComplexMatrix) -> Svd {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Svd {
            u: ComplexMatrix::zeros(r, 0),
            singular_values: Vec::new(),
            v_adjoint: ComplexMatrix::zeros(0, c),
        };
    }
    let dec = nalgebra::SVD::new(to_nalgebra(m), true, true);
    let u = dec.u.expect("requested U");
    let vt = dec.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    let u_mat = from_nalgebra(&u);
    let vt_mat = from_nalgebra(&vt);
    Svd {
        u: ComplexMatrix::from_fn(r, k, |i, j| u_mat[(i, order[j])]),
        singular_values: order.iter().map(|&j| dec.singular_values[j]).collect(),
        v_adjoint: ComplexMatrix::from_fn(k, c, |i, j| vt_mat[(order[i], j)]),
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows().min(m.cols()) == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = to_nalgebra(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Determinant via LU with partial pivoting.
pub fn det(m: &ComplexMatrix) -> Result<C64> {
    if !m.is_square() {
        return Err(Error::shape(format!("det needs a square matrix, got {:?}", m.shape())));
    }
    Ok(det_unchecked(m))
}

pub(crate) fn det_unchecked(m: &ComplexMatrix) -> C64 {
    let n = m.rows();
    match n {
        0 => return ONE,
        1 => return m[(0, 0)],
        2 => return m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => {}
    }
    let mut a = m.as_slice().to_vec();
    let mut det = ONE;
    for k in 0..n {
        let (p, pivot_abs) =
            (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs == 0.0 {
            return ZERO;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for i in k + 1..n {
            let factor = a[i * n + k] / pivot;
            if factor == ZERO {
                continue;
            }
            for j in k + 1..n {
                let v = a[k * n + j];
                a[i * n + j] -= factor * v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eig_of_identity_and_diagonal() {
        let (s, _) = eig_hermitian(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 1.0]);
        let (s, _) = eig_hermitian(&ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(s.values(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = ONE;
        assert!(matches!(eig_hermitian(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn svd_identity_and_diagonal() {
        let d = svd(&ComplexMatrix::identity(3));
        assert_eq!(d.singular_values, vec![1.0, 1.0, 1.0]);
        let d = svd(&ComplexMatrix::from_real_diagonal(&[0.5, -2.0, 1.0]));
        for (a, b) in d.singular_values.iter().zip([2.0, 1.0, 0.5]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn det_cases() {
        assert_eq!(det(&ComplexMatrix::identity(4)).unwrap(), ONE);
        assert!(matches!(det(&ComplexMatrix::zeros(2, 3)), Err(Error::Shape(_))));
        let m = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, 0.0));
        assert!(det(&m).unwrap().norm() < 1e-12);
        // permutation with a single transposition
        let p = ComplexMatrix::from_fn(3, 3, |i, j| {
            if (i, j) == (0, 1) || (i, j) == (1, 0) || (i, j) == (2, 2) {
                ONE
            } else {
                ZERO
            }
        });
        assert_eq!(det(&p).unwrap(), -ONE);
    }

    #[test]
    fn spectrum_clip_and_entropy() {
        let s = Spectrum::new(vec![0.5, -1e-12, 0.5]);
        let c = s.clipped(-1e-10);
        assert_eq!(c.values(), &[0.5, 0.5, 0.0]);
        assert!((c.entropy_bits() - 1.0).abs() < 1e-15);
    }
}
