//! Separable instruments, product-unitary mixtures and one-way LOCC ansätze.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    det_unchecked, eigvalsh, ginibre, haar_unitary, hermitian_function, kron_unchecked, ComplexMatrix, Rng64, C64, ONE,
};
use crate::states::{decode_entries, encode_entries, BipartiteState, StateKind};

pub const INSTRUMENT_FORMAT: &str = "asymq-instrument/1";

/// Probabilities below this are reported with an undefined branch state.
pub const ZERO_BRANCH: f64 = 1e-12;

/// One product Kraus operator `A ⊗ B`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausPair {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
}

impl KrausPair {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Self {
        KrausPair { a, b }
    }

    pub fn operator(&self) -> ComplexMatrix {
        kron_unchecked(&self.a, &self.b)
    }
}

/// `Λ(ρ) = Σ_i (A_i⊗B_i) ρ (A_i⊗B_i)†`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableInstrument {
    branches: Vec<KrausPair>,
    trace_preserving: bool,
}

impl SeparableInstrument {
    /// Checks that every branch has the same input/output shapes. The
    /// trace-preservation flag is computed, not trusted.
    pub fn new(branches: Vec<KrausPair>) -> Result<Self> {
        Self::with_tolerances(branches, &Tolerances::default())
    }

    pub fn with_tolerances(branches: Vec<KrausPair>, tol: &Tolerances) -> Result<Self> {
        let first = branches.first().ok_or_else(|| Error::contract("instrument needs at least one branch"))?;
        let (sa, sb) = (first.a.shape(), first.b.shape());
        if branches.iter().any(|p| p.a.shape() != sa || p.b.shape() != sb) {
            return Err(Error::shape("all branches must share the same Kraus shapes"));
        }
        let mut ins = SeparableInstrument { branches, trace_preserving: false };
        ins.trace_preserving = ins.tp_defect() <= tol.trace_preserving;
        Ok(ins)
    }

    /// As [`SeparableInstrument::new`] but fails unless trace-preserving.
    pub fn trace_preserving(branches: Vec<KrausPair>) -> Result<Self> {
        let ins = Self::new(branches)?;
        if !ins.trace_preserving {
            return Err(Error::invariant("trace_preserving", format!("‖Σ X†X − I‖_F = {:.3e}", ins.tp_defect())));
        }
        Ok(ins)
    }

    pub fn branches(&self) -> &[KrausPair] {
        &self.branches
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn input_dims(&self) -> (usize, usize) {
        (self.branches[0].a.cols(), self.branches[0].b.cols())
    }

    pub fn output_dims(&self) -> (usize, usize) {
        (self.branches[0].a.rows(), self.branches[0].b.rows())
    }

    /// `‖Σ_i X_i†X_i − I‖_F`.
    pub fn tp_defect(&self) -> f64 {
        let (da, db) = self.input_dims();
        let mut sum = ComplexMatrix::zeros(da * db, da * db);
        for p in &self.branches {
            let x = p.operator();
            sum = &sum + &x.adjoint().matmul(&x);
        }
        (&sum - &ComplexMatrix::identity(da * db)).frobenius_norm()
    }

    pub fn identity(da: usize, db: usize) -> Self {
        SeparableInstrument {
            branches: vec![KrausPair::new(ComplexMatrix::identity(da), ComplexMatrix::identity(db))],
            trace_preserving: true,
        }
    }
}

/// Branch probability and normalized post-measurement state.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub probability: f64,
    /// `None` when the branch has (numerically) zero probability.
    pub state: Option<BipartiteState>,
}

fn check_input(ins: &SeparableInstrument, rho: &BipartiteState) -> Result<()> {
    if ins.input_dims() != rho.dims() {
        return Err(Error::shape(format!(
            "instrument acts on {:?} but state has dims {:?}",
            ins.input_dims(),
            rho.dims()
        )));
    }
    Ok(())
}

/// Applies each branch, returning `p_i = Tr(X_i ρ X_i†)` and `σ_i`.
/// Pure inputs give pure branch states.
pub fn apply_instrument(ins: &SeparableInstrument, rho: &BipartiteState) -> Result<Vec<BranchOutcome>> {
    check_input(ins, rho)?;
    let (oa, ob) = ins.output_dims();
    let out = ins
        .branches
        .iter()
        .map(|pair| {
            let x = pair.operator();
            let (p, data) = match rho.vector() {
                Some(v) => {
                    let phi = x.matmul(&ComplexMatrix::column(v.to_vec()));
                    let p = phi.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
                    (p, phi)
                }
                None => {
                    let m = x.conjugate(rho.raw()).hermitian_part();
                    (m.trace().re, m)
                }
            };
            let state = (p > ZERO_BRANCH).then(|| {
                let kind = rho.kind();
                let scaled = match kind {
                    StateKind::Pure => data.scale_real(1.0 / p.sqrt()),
                    StateKind::Mixed => data.scale_real(1.0 / p),
                };
                BipartiteState::from_parts(oa, ob, kind, scaled)
            });
            BranchOutcome { probability: p.max(0.0), state }
        })
        .collect();
    Ok(out)
}

/// `Σ_i X_i ρ X_i†` as a density matrix.
pub fn channel_output(ins: &SeparableInstrument, rho: &BipartiteState) -> Result<ComplexMatrix> {
    check_input(ins, rho)?;
    Ok(channel_output_matrix(ins, &rho.density()))
}

pub(crate) fn channel_output_matrix(ins: &SeparableInstrument, rho: &ComplexMatrix) -> ComplexMatrix {
    let (oa, ob) = ins.output_dims();
    let mut sum = ComplexMatrix::zeros(oa * ob, oa * ob);
    for pair in &ins.branches {
        sum = &sum + &pair.operator().conjugate(rho);
    }
    sum.hermitian_part()
}

/// `(|det A| · |det B|)^{2/d}`, which equals `det(X†X)^{1/d²}` for
/// `X = A ⊗ B` with `A, B` both `d × d`.
pub fn det_weight(a: &ComplexMatrix, b: &ComplexMatrix, d: usize) -> Result<f64> {
    if a.shape() != (d, d) || b.shape() != (d, d) {
        return Err(Error::contract(format!(
            "determinant weights need {d}x{d} Kraus factors, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let abs = det_unchecked(a).norm() * det_unchecked(b).norm();
    Ok(abs.powf(2.0 / d as f64))
}

/// `Σ_i (|det A_i| · |det B_i|)^{2/d}`; at most one for trace-preserving
/// instruments, with equality exactly for mixtures of product unitaries.
pub fn det_weight_sum(ins: &SeparableInstrument, d: usize) -> Result<f64> {
    ins.branches.iter().map(|p| det_weight(&p.a, &p.b, d)).sum()
}

/// Spread `λ_max − λ_min` of `X†X`; zero iff `X` is proportional to a
/// unitary.
pub fn branch_spread(pair: &KrausPair) -> f64 {
    let x = pair.operator();
    let ev = eigvalsh(&x.adjoint().matmul(&x));
    ev.first().copied().unwrap_or(0.0) - ev.last().copied().unwrap_or(0.0)
}

/// Random instrument `{M_i}` from `C^{d_in}` to `C^{d_out}` with
/// `Σ M_i†M_i = I`: Ginibre samples normalized by `(Σ G†G)^{-1/2}`.
pub fn random_local_instrument(d_in: usize, d_out: usize, k: usize, rng: &mut Rng64) -> Vec<ComplexMatrix> {
    let gs: Vec<ComplexMatrix> = (0..k).map(|_| ginibre(d_out, d_in, rng)).collect();
    let mut s = ComplexMatrix::zeros(d_in, d_in);
    for g in &gs {
        s = &s + &g.adjoint().matmul(g);
    }
    let inv_sqrt = hermitian_function(&s.hermitian_part(), |l| C64::new(1.0 / l.sqrt(), 0.0));
    gs.iter().map(|g| g.matmul(&inv_sqrt)).collect()
}

/// Random trace-preserving separable instrument with `k` branches on
/// `C^d ⊗ C^d`: a random local instrument on one side (chosen by a fair
/// coin) tensored with independent Haar unitaries on the other.
pub fn random_tp_separable_instrument(d: usize, k: usize, rng: &mut Rng64) -> SeparableInstrument {
    use rand::Rng;
    assert!(d >= 1 && k >= 1, "need d >= 1 and k >= 1");
    let alice_measures = rng.random_bool(0.5);
    let ms = random_local_instrument(d, d, k, rng);
    let branches = ms
        .into_iter()
        .map(|m| {
            let u = haar_unitary(d, rng);
            if alice_measures {
                KrausPair::new(m, u)
            } else {
                KrausPair::new(u, m)
            }
        })
        .collect();
    SeparableInstrument { branches, trace_preserving: true }
}

/// Random mixture of `k` product unitaries with Dirichlet(1,…,1) weights.
pub fn random_product_unitary_mixture(d: usize, k: usize, rng: &mut Rng64) -> SeparableInstrument {
    use rand_distr::{Distribution, Exp1};
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let us: Vec<(ComplexMatrix, ComplexMatrix)> =
        (0..k).map(|_| (haar_unitary(d, rng), haar_unitary(d, rng))).collect();
    product_unitary_mixture(&probs, &us).expect("sampled mixture is valid")
}

/// Branches `(√p_i U_A^i, U_B^i)`.
pub fn product_unitary_mixture(probs: &[f64], us: &[(ComplexMatrix, ComplexMatrix)]) -> Result<SeparableInstrument> {
    if probs.is_empty() || probs.len() != us.len() {
        return Err(Error::contract("need one probability per unitary pair"));
    }
    if probs.iter().any(|&p| p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::contract("mixture probabilities must be non-negative and sum to 1"));
    }
    for (ua, ub) in us {
        if !ua.is_square() || !ub.is_square() || ua.unitarity_defect() > 1e-9 || ub.unitarity_defect() > 1e-9 {
            return Err(Error::contract("mixture components must be unitary"));
        }
    }
    let branches =
        probs.iter().zip(us).map(|(&p, (ua, ub))| KrausPair::new(ua.scale_real(p.sqrt()), ub.clone())).collect();
    SeparableInstrument::trace_preserving(branches)
}

/// Which party measures in a one-way protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoccDirection {
    AliceToBob,
    BobToAlice,
}

/// One-way LOCC: the measuring party applies Kraus operators `M_i` and
/// the other party applies the isometry `W_i` conditioned on outcome `i`.
/// Isometries are unitaries when the local dimension is unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct OneWayLoccAnsatz {
    pub direction: LoccDirection,
    pub measurement: Vec<ComplexMatrix>,
    pub corrections: Vec<ComplexMatrix>,
}

impl OneWayLoccAnsatz {
    pub fn validate(&self) -> Result<()> {
        if self.measurement.is_empty() || self.measurement.len() != self.corrections.len() {
            return Err(Error::invariant("ansatz", "need one correction per measurement outcome"));
        }
        let d_in = self.measurement[0].cols();
        let mut sum = ComplexMatrix::zeros(d_in, d_in);
        for m in &self.measurement {
            if m.cols() != d_in || m.rows() != self.measurement[0].rows() {
                return Err(Error::invariant("ansatz", "measurement Kraus shapes differ"));
            }
            sum = &sum + &m.adjoint().matmul(m);
        }
        if (&sum - &ComplexMatrix::identity(d_in)).frobenius_norm() > 1e-9 {
            return Err(Error::invariant("ansatz", "measurement is not complete (Σ M†M ≠ I)"));
        }
        let shape = self.corrections[0].shape();
        for w in &self.corrections {
            if w.shape() != shape || w.unitarity_defect() > 1e-9 {
                return Err(Error::invariant("ansatz", "corrections must be isometries of equal shape"));
            }
        }
        Ok(())
    }

    /// Trivial measurement followed by identity corrections.
    pub fn identity(direction: LoccDirection, d_measure: usize, d_correct: usize) -> Self {
        OneWayLoccAnsatz {
            direction,
            measurement: vec![ComplexMatrix::identity(d_measure)],
            corrections: vec![ComplexMatrix::identity(d_correct)],
        }
    }

    /// The measuring party projects onto `m` consecutive computational-basis
    /// blocks of size `d_out` (relabelling each block as `C^{d_out}`), and
    /// the other party embeds its system into block `i` of `C^{m·d_in}`.
    /// Returns `None` unless the dimensions split into exactly `m` blocks.
    pub fn block_relabel(
        direction: LoccDirection,
        measure_in: usize,
        measure_out: usize,
        correct_in: usize,
        correct_out: usize,
    ) -> Option<Self> {
        if measure_out == 0 || correct_in == 0 || !measure_in.is_multiple_of(measure_out) {
            return None;
        }
        let m = measure_in / measure_out;
        if m < 2 || correct_out != m * correct_in {
            return None;
        }
        let measurement = (0..m)
            .map(|i| {
                ComplexMatrix::from_fn(measure_out, measure_in, |r, c| {
                    if c == i * measure_out + r {
                        ONE
                    } else {
                        C64::default()
                    }
                })
            })
            .collect();
        let corrections = (0..m)
            .map(|i| {
                ComplexMatrix::from_fn(correct_out, correct_in, |r, c| {
                    if r == i * correct_in + c {
                        ONE
                    } else {
                        C64::default()
                    }
                })
            })
            .collect();
        Some(OneWayLoccAnsatz { direction, measurement, corrections })
    }
}

pub fn ansatz_to_instrument(a: &OneWayLoccAnsatz) -> Result<SeparableInstrument> {
    a.validate()?;
    let branches = a
        .measurement
        .iter()
        .zip(&a.corrections)
        .map(|(m, w)| match a.direction {
            LoccDirection::AliceToBob => KrausPair::new(m.clone(), w.clone()),
            LoccDirection::BobToAlice => KrausPair::new(w.clone(), m.clone()),
        })
        .collect();
    SeparableInstrument::trace_preserving(branches)
}

#[derive(Debug, Serialize, Deserialize)]
struct BranchFile {
    #[serde(rename = "A")]
    a: Vec<[f64; 2]>,
    #[serde(rename = "B")]
    b: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstrumentFile {
    format: String,
    #[serde(rename = "dA")]
    da: usize,
    #[serde(rename = "dB")]
    db: usize,
    /// Output dimensions; omitted when equal to the input ones.
    #[serde(rename = "dA_out", default, skip_serializing_if = "Option::is_none")]
    da_out: Option<usize>,
    #[serde(rename = "dB_out", default, skip_serializing_if = "Option::is_none")]
    db_out: Option<usize>,
    branches: Vec<BranchFile>,
}

impl Serialize for SeparableInstrument {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl SeparableInstrument {
    pub fn to_json_value(&self) -> serde_json::Value {
        let (da, db) = self.input_dims();
        let (oa, ob) = self.output_dims();
        let file = InstrumentFile {
            format: INSTRUMENT_FORMAT.to_string(),
            da,
            db,
            da_out: (oa != da).then_some(oa),
            db_out: (ob != db).then_some(ob),
            branches: self
                .branches
                .iter()
                .map(|p| BranchFile { a: encode_entries(p.a.as_slice()), b: encode_entries(p.b.as_slice()) })
                .collect(),
        };
        serde_json::to_value(file).expect("instrument serialization is infallible")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("instrument serialization is infallible")
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let file: InstrumentFile = serde_json::from_value(value)?;
        if file.format != INSTRUMENT_FORMAT {
            return Err(Error::Parse(format!("unsupported instrument format '{}'", file.format)));
        }
        let oa = file.da_out.unwrap_or(file.da);
        let ob = file.db_out.unwrap_or(file.db);
        let branches = file
            .branches
            .iter()
            .map(|b| {
                Ok(KrausPair::new(
                    ComplexMatrix::from_row_major(oa, file.da, decode_entries(&b.a))?,
                    ComplexMatrix::from_row_major(ob, file.db, decode_entries(&b.b))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        SeparableInstrument::new(branches)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_value(serde_json::from_str(text)?)
    }
}

pub fn save_instrument(ins: &SeparableInstrument, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, ins.to_json())?;
    Ok(())
}

pub fn load_instrument(path: impl AsRef<Path>) -> Result<SeparableInstrument> {
    SeparableInstrument::from_json(&std::fs::read_to_string(path)?)
}
