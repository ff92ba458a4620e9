//! Dense complex linear algebra sized for small bipartite systems.
//!
//! Basis convention throughout the crate: `|i⟩_A |j⟩_B ↦ i·d_B + j`.

mod decomp;
mod matrix;
mod random;

pub use decomp::{det, eig_hermitian, eig_hermitian_with, hermitian_function, singular_values, svd, Spectrum, Svd};
pub(crate) use decomp::{det_unchecked, eig_hermitian_unchecked, eigvalsh, shannon_bits};
pub use matrix::{ComplexMatrix, C64};
pub(crate) use matrix::{ONE, ZERO};
pub use random::{ginibre, haar_unitary, random_density_matrix, random_pure_vector, seeded_rng, sub_rng, Rng64};

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Which tensor factor an operation acts on or keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// Kronecker product, entry `(i·rows_b + k, j·cols_b + l) = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with(a, b, Tolerances::default().max_dim)
}

pub fn kron_with(a: &ComplexMatrix, b: &ComplexMatrix, max_dim: usize) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    match (rows, cols) {
        (Some(r), Some(c)) if r <= max_dim && c <= max_dim => Ok(kron_unchecked(a, b)),
        _ => Err(Error::Size { what: format!("kron of {:?} and {:?}", a.shape(), b.shape()), max: max_dim }),
    }
}

pub(crate) fn kron_unchecked(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    let cols = ac * bc;
    let data = out.as_mut_slice();
    for i in 0..ar {
        for j in 0..ac {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..br {
                let row = (i * br + k) * cols + j * bc;
                for l in 0..bc {
                    data[row + l] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

fn check_bipartite(rho: &ComplexMatrix, da: usize, db: usize) -> Result<()> {
    let n = da * db;
    if rho.shape() != (n, n) {
        return Err(Error::shape(format!("expected a {n}x{n} operator for dims ({da},{db}), got {:?}", rho.shape())));
    }
    Ok(())
}

/// Traces out the factor not named by `keep`.
pub fn partial_trace(rho: &ComplexMatrix, da: usize, db: usize, keep: Side) -> Result<ComplexMatrix> {
    check_bipartite(rho, da, db)?;
    Ok(partial_trace_unchecked(rho, da, db, keep))
}

pub(crate) fn partial_trace_unchecked(rho: &ComplexMatrix, da: usize, db: usize, keep: Side) -> ComplexMatrix {
    match keep {
        Side::A => ComplexMatrix::from_fn(da, da, |i, k| (0..db).map(|j| rho[(i * db + j, k * db + j)]).sum()),
        Side::B => ComplexMatrix::from_fn(db, db, |j, l| (0..da).map(|i| rho[(i * db + j, i * db + l)]).sum()),
    }
}

/// Transposes the chosen tensor factor.
pub fn partial_transpose(rho: &ComplexMatrix, da: usize, db: usize, side: Side) -> Result<ComplexMatrix> {
    check_bipartite(rho, da, db)?;
    Ok(partial_transpose_unchecked(rho, da, db, side))
}

pub(crate) fn partial_transpose_unchecked(rho: &ComplexMatrix, da: usize, db: usize, side: Side) -> ComplexMatrix {
    let n = da * db;
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        match side {
            Side::A => rho[(k * db + j, i * db + l)],
            Side::B => rho[(i * db + l, k * db + j)],
        }
    })
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_square() && m.is_hermitian(1e-12) {
        eigvalsh(m).iter().map(|v| v.abs()).sum()
    } else {
        singular_values(m).iter().sum()
    }
}

/// `½‖a − b‖₁`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::shape(format!("trace_distance of {:?} and {:?}", a.shape(), b.shape())));
    }
    Ok(0.5 * trace_norm(&(a - b)))
}

/// Nearest unitary in Frobenius norm (`U Σ W† ↦ U W†`).
pub(crate) fn polar_unitary(m: &ComplexMatrix) -> ComplexMatrix {
    let s = svd(m);
    s.u.matmul(&s.v_adjoint)
}

/// Extends the orthonormal columns of `w` (`n × k`, `k ≤ n`) to an `n × n`
/// unitary whose first `k` columns are `w`.
pub(crate) fn complete_to_unitary(w: &ComplexMatrix) -> ComplexMatrix {
    let n = w.rows();
    let mut cols: Vec<Vec<C64>> = (0..w.cols()).map(|j| (0..n).map(|i| w[(i, j)]).collect()).collect();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = vec![ZERO; n];
        v[e] = ONE;
        // two Gram-Schmidt passes for numerical orthogonality
        for _ in 0..2 {
            for c in &cols {
                let overlap: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(c) {
                    *x -= overlap * a;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Hermitian-only fast path used in optimizer inner loops.
pub(crate) fn trace_distance_hermitian(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    0.5 * eigvalsh(&(a - b)).iter().map(|v| v.abs()).sum::<f64>()
}
