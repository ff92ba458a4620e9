//! Bipartite states, Schmidt analysis, the worked example states and the
//! on-disk state format.

use std::borrow::Cow;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian_unchecked, eigvalsh, kron_unchecked, partial_trace_unchecked, svd, ComplexMatrix, Side, Spectrum,
    C64, ONE, ZERO,
};

pub const STATE_FORMAT: &str = "asymq-state/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

/// A state on `C^{d_A} ⊗ C^{d_B}`: either a unit column vector or a density
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    da: usize,
    db: usize,
    kind: StateKind,
    data: ComplexMatrix,
}

impl BipartiteState {
    pub fn pure(da: usize, db: usize, vector: Vec<C64>) -> Result<Self> {
        Self::pure_with(da, db, vector, &Tolerances::default())
    }

    pub fn pure_with(da: usize, db: usize, vector: Vec<C64>, tol: &Tolerances) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::shape("local dimensions must be at least 1"));
        }
        if vector.len() != da * db {
            return Err(Error::shape(format!(
                "pure state on {da}x{db} needs {} amplitudes, got {}",
                da * db,
                vector.len()
            )));
        }
        let data = ComplexMatrix::from_row_major(da * db, 1, vector)?;
        let state = BipartiteState { da, db, kind: StateKind::Pure, data };
        state.validate(tol)?;
        Ok(state)
    }

    pub fn mixed(da: usize, db: usize, rho: ComplexMatrix) -> Result<Self> {
        Self::mixed_with(da, db, rho, &Tolerances::default())
    }

    pub fn mixed_with(da: usize, db: usize, rho: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::shape("local dimensions must be at least 1"));
        }
        let n = da * db;
        if rho.shape() != (n, n) {
            return Err(Error::shape(format!("density matrix on {da}x{db} must be {n}x{n}, got {:?}", rho.shape())));
        }
        let state = BipartiteState { da, db, kind: StateKind::Mixed, data: rho };
        state.validate(tol)?;
        Ok(state)
    }

    /// Skips validation; for states produced by operations that preserve the
    /// invariants up to rounding.
    pub(crate) fn from_parts(da: usize, db: usize, kind: StateKind, data: ComplexMatrix) -> Self {
        BipartiteState { da, db, kind, data }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        match self.kind {
            StateKind::Pure => {
                let norm = self.data.frobenius_norm();
                if (norm - 1.0).abs() > tol.normalization {
                    return Err(Error::invariant("norm", format!("pure state has norm {norm}, expected 1")));
                }
            }
            StateKind::Mixed => {
                if !self.data.is_hermitian(tol.hermiticity) {
                    return Err(Error::invariant("hermiticity", "density matrix is not Hermitian"));
                }
                let tr = self.data.trace();
                if (tr.re - 1.0).abs() > tol.normalization || tr.im.abs() > tol.normalization {
                    return Err(Error::invariant("trace", format!("density matrix has trace {tr}, expected 1")));
                }
                let min = eigvalsh(&self.data).last().copied().unwrap_or(0.0);
                if min < tol.psd_floor {
                    return Err(Error::invariant("positivity", format!("density matrix has eigenvalue {min}")));
                }
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.da, self.db)
    }

    pub fn total_dim(&self) -> usize {
        self.da * self.db
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn is_pure(&self) -> bool {
        self.kind == StateKind::Pure
    }

    /// Amplitudes of a pure state.
    pub fn vector(&self) -> Option<&[C64]> {
        self.is_pure().then(|| self.data.as_slice())
    }

    pub fn raw(&self) -> &ComplexMatrix {
        &self.data
    }

    /// Density matrix; pure states are promoted to projectors.
    pub fn density(&self) -> Cow<'_, ComplexMatrix> {
        match self.kind {
            StateKind::Pure => Cow::Owned(ComplexMatrix::outer(self.data.as_slice())),
            StateKind::Mixed => Cow::Borrowed(&self.data),
        }
    }

    /// Same state with the dense density matrix as storage.
    pub fn to_mixed(&self) -> BipartiteState {
        BipartiteState { da: self.da, db: self.db, kind: StateKind::Mixed, data: self.density().into_owned() }
    }

    pub fn reduced(&self, keep: Side) -> ComplexMatrix {
        partial_trace_unchecked(&self.density(), self.da, self.db, keep)
    }

    /// Coefficient matrix `M[i][j] = ψ[i·d_B + j]` of a pure state.
    pub fn coefficient_matrix(&self) -> Result<ComplexMatrix> {
        let v = self.vector().ok_or_else(|| Error::contract("coefficient matrix needs a pure state"))?;
        Ok(coefficient_matrix(v, self.da, self.db))
    }
}

pub(crate) fn coefficient_matrix(v: &[C64], da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(da, db, |i, j| v[i * db + j])
}

/// Schmidt decomposition `ψ = Σ_k s_k |a_k⟩|b_k⟩`.
#[derive(Debug, Clone)]
pub struct SchmidtData {
    pub coefficients: Vec<f64>,
    /// Columns are the `|a_k⟩`.
    pub left: ComplexMatrix,
    /// Columns are the `|b_k⟩`.
    pub right: ComplexMatrix,
    pub rank: usize,
}

impl SchmidtData {
    pub fn reconstruct(&self) -> Vec<C64> {
        let (da, db) = (self.left.rows(), self.right.rows());
        let mut v = vec![ZERO; da * db];
        for (k, &s) in self.coefficients.iter().enumerate() {
            for i in 0..da {
                for j in 0..db {
                    v[i * db + j] += self.left[(i, k)] * self.right[(j, k)] * s;
                }
            }
        }
        v
    }
}

pub fn schmidt(psi: &BipartiteState) -> Result<SchmidtData> {
    schmidt_with_tol(psi, Tolerances::default().rank)
}

fn schmidt_with_tol(psi: &BipartiteState, rank_tol: f64) -> Result<SchmidtData> {
    let m = psi.coefficient_matrix()?;
    let dec = svd(&m);
    let k = dec.singular_values.len();
    let right = ComplexMatrix::from_fn(psi.db, k, |j, c| dec.v_adjoint[(c, j)]);
    let largest = dec.singular_values.first().copied().unwrap_or(0.0);
    let rank = dec.singular_values.iter().filter(|&&s| s > rank_tol * largest).count();
    Ok(SchmidtData { coefficients: dec.singular_values, left: dec.u, right, rank })
}

/// Number of Schmidt coefficients above `tol` times the largest one.
pub fn schmidt_rank(psi: &BipartiteState, tol: f64) -> Result<usize> {
    Ok(schmidt_with_tol(psi, tol)?.rank)
}

/// Spectra of `ρ_A` and `ρ_B`, each sorted descending with tiny negative
/// rounding clipped to zero.
pub fn local_spectra(state: &BipartiteState) -> (Spectrum, Spectrum) {
    let floor = Tolerances::default().psd_floor;
    let a = eig_hermitian_unchecked(&state.reduced(Side::A)).0.clipped(floor);
    let b = eig_hermitian_unchecked(&state.reduced(Side::B)).0.clipped(floor);
    (a, b)
}

/// Index map of the swap `V: C^{dA}⊗C^{dB} → C^{dB}⊗C^{dA}`:
/// basis vector `i·dB + j` goes to `j·dA + i`.
pub(crate) fn swap_index(da: usize, db: usize, idx: usize) -> usize {
    let (i, j) = (idx / db, idx % db);
    j * da + i
}

pub(crate) fn swap_vector(v: &[C64], da: usize, db: usize) -> Vec<C64> {
    let mut out = vec![ZERO; v.len()];
    for (idx, &z) in v.iter().enumerate() {
        out[swap_index(da, db, idx)] = z;
    }
    out
}

/// `V ρ V†` for an operator on `C^{dA}⊗C^{dB}`.
pub(crate) fn swap_operator_conjugate(rho: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let r2 = swap_index(da, db, r);
        for c in 0..n {
            out[(r2, swap_index(da, db, c))] = rho[(r, c)];
        }
    }
    out
}

/// Exchanges the subsystems; the result lives on `C^{dB}⊗C^{dA}`.
pub fn apply_swap(state: &BipartiteState) -> BipartiteState {
    let (da, db) = state.dims();
    let data = match state.kind {
        StateKind::Pure => ComplexMatrix::column(swap_vector(state.data.as_slice(), da, db)),
        StateKind::Mixed => swap_operator_conjugate(&state.data, da, db),
    };
    BipartiteState { da: db, db: da, kind: state.kind, data }
}

fn basis(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[i] = ONE;
    v
}

/// `Σ_i |ii⟩/√d`.
pub fn bell(d: usize) -> BipartiteState {
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    BipartiteState::from_parts(d, d, StateKind::Pure, ComplexMatrix::column(v))
}

/// `|a⟩⊗|b⟩` after normalizing both factors.
pub fn product(a: &[C64], b: &[C64]) -> Result<BipartiteState> {
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::contract("product state factors must be nonzero"));
    }
    let va = ComplexMatrix::column(a.iter().map(|z| z / na).collect());
    let vb = ComplexMatrix::column(b.iter().map(|z| z / nb).collect());
    BipartiteState::pure(a.len(), b.len(), kron_unchecked(&va, &vb).into_vec())
}

/// `p|01⟩⟨01| + (1−p)|Φ⁺⟩⟨Φ⁺|` on two qubits.
pub fn example_mix01_bell(p: f64) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::contract(format!("mixture weight {p} outside [0, 1]")));
    }
    let ket01 = ComplexMatrix::outer(&basis(4, 1));
    let phi = bell(2).density().into_owned();
    let rho = &ket01.scale_real(p) + &phi.scale_real(1.0 - p);
    BipartiteState::mixed(2, 2, rho)
}

/// Equal mixture of `(|00⟩+|11⟩)/√2` and `(|02⟩+|13⟩)/√2` on `C²⊗C⁴`.
pub fn example_2x4_mixture() -> BipartiteState {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut first = vec![ZERO; 8];
    first[0] = h; // |00⟩
    first[5] = h; // |11⟩
    let mut second = vec![ZERO; 8];
    second[2] = h; // |02⟩
    second[7] = h; // |13⟩
    let rho = &ComplexMatrix::outer(&first).scale_real(0.5) + &ComplexMatrix::outer(&second).scale_real(0.5);
    BipartiteState::from_parts(2, 4, StateKind::Mixed, rho)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    format: String,
    #[serde(rename = "dA")]
    da: usize,
    #[serde(rename = "dB")]
    db: usize,
    kind: StateKind,
    data: Vec<[f64; 2]>,
}

pub(crate) fn encode_entries(m: &[C64]) -> Vec<[f64; 2]> {
    m.iter().map(|z| [z.re, z.im]).collect()
}

pub(crate) fn decode_entries(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

impl BipartiteState {
    pub fn to_json(&self) -> String {
        self.to_json_as(self.kind)
    }

    /// Serializes with the given storage kind; a pure state may be written
    /// as its projector.
    pub fn to_json_as(&self, kind: StateKind) -> String {
        let (kind, data) = match (self.kind, kind) {
            (StateKind::Pure, StateKind::Pure) => (StateKind::Pure, encode_entries(self.data.as_slice())),
            _ => (StateKind::Mixed, encode_entries(self.density().as_slice())),
        };
        let file = StateFile { format: STATE_FORMAT.to_string(), da: self.da, db: self.db, kind, data };
        serde_json::to_string_pretty(&file).expect("state serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_with(text, &Tolerances::default())
    }

    pub fn from_json_with(text: &str, tol: &Tolerances) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        if file.format != STATE_FORMAT {
            return Err(Error::Parse(format!("unsupported state format '{}'", file.format)));
        }
        let entries = decode_entries(&file.data);
        match file.kind {
            StateKind::Pure => BipartiteState::pure_with(file.da, file.db, entries, tol),
            StateKind::Mixed => {
                let n = file.da * file.db;
                if entries.len() != n * n {
                    return Err(Error::shape(format!(
                        "mixed state on {}x{} needs {} entries, got {}",
                        file.da,
                        file.db,
                        n * n,
                        entries.len()
                    )));
                }
                let rho = ComplexMatrix::from_row_major(n, n, entries)?;
                BipartiteState::mixed_with(file.da, file.db, rho, tol)
            }
        }
    }
}

pub fn save_state(state: &BipartiteState, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, state.to_json())?;
    Ok(())
}

pub fn load_state(path: impl AsRef<Path>) -> Result<BipartiteState> {
    load_state_with(path, &Tolerances::default())
}

pub fn load_state_with(path: impl AsRef<Path>, tol: &Tolerances) -> Result<BipartiteState> {
    BipartiteState::from_json_with(&std::fs::read_to_string(path)?, tol)
}
