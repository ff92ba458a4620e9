//! Entanglement measures: G-concurrence, entropy of entanglement,
//! entanglement of formation, negativity and hashing bounds, and the
//! symmetry bracket `E_D/E_c ≤ S ≤ 1`.

mod roof;
mod wootters;

pub(crate) use roof::g_unnormalized;
pub use roof::{ensemble_value, roof_search, PureFunctional, RoofOptions, RoofOutcome};
pub use wootters::{binary_entropy, eof_from_concurrence, wootters_concurrence, wootters_eof};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, partial_transpose_unchecked, shannon_bits, ComplexMatrix, Side};
use crate::states::{schmidt, BipartiteState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    Exact,
    UpperBound,
    LowerBound,
}

/// A measure value together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    pub direction: BoundDirection,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl MeasureResult {
    fn exact(value: f64) -> Self {
        MeasureResult {
            value,
            direction: BoundDirection::Exact,
            iterations: 0,
            restarts: 0,
            converged: true,
            seed: 0,
            note: None,
        }
    }

    fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }
}

const UNEQUAL_DIMS_NOTE: &str = "G-concurrence is defined as 0 when dA != dB";

fn require_pure(psi: &BipartiteState) -> Result<()> {
    if psi.is_pure() {
        Ok(())
    } else {
        Err(Error::contract("expected a pure state"))
    }
}

/// `d · (det ρ_A)^{1/d}`, with `det ρ_A` taken as the product of squared
/// Schmidt coefficients.
pub fn g_pure(psi: &BipartiteState) -> Result<MeasureResult> {
    require_pure(psi)?;
    let (da, db) = psi.dims();
    if da != db {
        return Ok(MeasureResult::exact(0.0).with_note(UNEQUAL_DIMS_NOTE));
    }
    let s = schmidt(psi)?;
    Ok(MeasureResult::exact(g_from_schmidt(&s.coefficients, da)))
}

fn g_from_schmidt(coefficients: &[f64], d: usize) -> f64 {
    if coefficients.len() < d || coefficients.iter().any(|&c| c <= 0.0) {
        return 0.0;
    }
    let log_det: f64 = coefficients.iter().map(|c| 2.0 * c.ln()).sum();
    d as f64 * (log_det / d as f64).exp()
}

/// G-concurrence of an unnormalized vector `φ`, i.e. `G(|φ⟩⟨φ|)` under
/// `G(αρ) = αG(ρ)`.
pub fn g_unnormalized_vector(phi: &[crate::C64], da: usize, db: usize) -> f64 {
    g_unnormalized(phi, da, db)
}

/// Convex-roof upper bound on `G(ρ)`; exact for pure inputs.
pub fn g_convex_roof(rho: &BipartiteState, opts: &RoofOptions) -> Result<MeasureResult> {
    let (da, db) = rho.dims();
    if da != db {
        return Ok(MeasureResult::exact(0.0).with_note(UNEQUAL_DIMS_NOTE));
    }
    if rho.is_pure() {
        return g_pure(rho);
    }
    let out = roof_search(&rho.density(), da, db, PureFunctional::GConcurrence, opts)?;
    let mut result = roof_result(&out, opts);
    if (da, db) == (2, 2) {
        let c = wootters_concurrence(rho)?;
        if (result.value - c).abs() <= 1e-6 {
            result.direction = BoundDirection::Exact;
            result.note = Some("matches the two-qubit closed form".into());
        }
    }
    Ok(result)
}

fn roof_result(out: &RoofOutcome, opts: &RoofOptions) -> MeasureResult {
    MeasureResult {
        value: out.value.max(0.0),
        direction: BoundDirection::UpperBound,
        iterations: out.sweeps,
        restarts: opts.restarts + opts.seed_ensembles.len(),
        converged: out.converged,
        seed: opts.seed,
        note: None,
    }
}

/// `S(ρ_A)` in bits for a pure state.
pub fn entropy_of_entanglement(psi: &BipartiteState) -> Result<MeasureResult> {
    require_pure(psi)?;
    let s = schmidt(psi)?;
    let probs: Vec<f64> = s.coefficients.iter().map(|c| c * c).collect();
    Ok(MeasureResult::exact(shannon_bits(&probs)))
}

/// Von Neumann entropy in bits; eigenvalues in `[−1e-10, 0)` count as zero.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> f64 {
    let probs: Vec<f64> = eigvalsh(rho).into_iter().map(|l| l.max(0.0)).collect();
    shannon_bits(&probs)
}

/// Convex-roof upper bound on the entanglement of formation.
pub fn eof_convex_roof(rho: &BipartiteState, opts: &RoofOptions) -> Result<MeasureResult> {
    if rho.is_pure() {
        return entropy_of_entanglement(rho);
    }
    let (da, db) = rho.dims();
    let out = roof_search(&rho.density(), da, db, PureFunctional::EntanglementEntropy, opts)?;
    Ok(roof_result(&out, opts))
}

/// `log₂ ‖ρ^{T_B}‖₁`.
pub fn log_negativity(rho: &BipartiteState) -> f64 {
    let (da, db) = rho.dims();
    let pt = partial_transpose_unchecked(&rho.density(), da, db, Side::B);
    let norm: f64 = eigvalsh(&pt).iter().map(|l| l.abs()).sum();
    norm.log2().max(0.0)
}

/// `max(S(ρ_A) − S(ρ_AB), S(ρ_B) − S(ρ_AB), 0)`; `S(ρ_AB) = 0` for pure
/// inputs.
pub fn hashing_lower_bound(rho: &BipartiteState) -> f64 {
    if rho.is_pure() {
        // both reductions share the Schmidt spectrum
        return entropy_of_entanglement(rho).map(|r| r.value).unwrap_or(0.0);
    }
    let sa = von_neumann_entropy(&rho.reduced(Side::A));
    let sb = von_neumann_entropy(&rho.reduced(Side::B));
    let sab = von_neumann_entropy(rho.raw());
    (sa - sab).max(sb - sab).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglementStatus {
    Entangled,
    Separable,
    /// PPT state beyond 2x2 / 2x3, where PPT does not certify separability.
    Undetermined,
}

/// Conservative bracket on the asymptotic symmetry of entanglement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryBracket {
    /// Hashing bound, `≤ E_D`.
    pub ed_lower: f64,
    /// Single-copy `E_F` upper bound, `≥ E_c`.
    pub ec_upper: f64,
    /// `ed_lower / ec_upper`; `None` for separable states, where the
    /// symmetry is infinite.
    pub s_lower: Option<f64>,
    pub s_upper: Option<f64>,
    pub asym_upper: Option<f64>,
    pub status: EntanglementStatus,
    pub log_negativity: f64,
}

fn entanglement_status(rho: &BipartiteState) -> Result<EntanglementStatus> {
    let (da, db) = rho.dims();
    if rho.is_pure() {
        let e = entropy_of_entanglement(rho)?.value;
        return Ok(if e > 1e-12 { EntanglementStatus::Entangled } else { EntanglementStatus::Separable });
    }
    if (da, db) == (2, 2) {
        let c = wootters_concurrence(rho)?;
        return Ok(if c > 1e-9 { EntanglementStatus::Entangled } else { EntanglementStatus::Separable });
    }
    let npt = log_negativity(rho) > 1e-9;
    Ok(if npt {
        EntanglementStatus::Entangled
    } else if da * db <= 6 {
        EntanglementStatus::Separable
    } else {
        EntanglementStatus::Undetermined
    })
}

pub fn symmetry_bracket(rho: &BipartiteState, opts: &RoofOptions) -> Result<SymmetryBracket> {
    let status = entanglement_status(rho)?;
    let ed_lower = hashing_lower_bound(rho);
    let ec_upper = eof_convex_roof(rho, opts)?.value;
    let log_neg = log_negativity(rho);
    if status == EntanglementStatus::Separable {
        return Ok(SymmetryBracket {
            ed_lower,
            ec_upper,
            s_lower: None,
            s_upper: None,
            asym_upper: None,
            status,
            log_negativity: log_neg,
        });
    }
    if ec_upper < 1e-9 {
        if status == EntanglementStatus::Entangled {
            return Err(Error::Inconsistent(format!(
                "entanglement-of-formation upper bound {ec_upper:.3e} on an entangled state"
            )));
        }
        // undetermined and numerically unentangled: no usable ratio
        return Ok(SymmetryBracket {
            ed_lower,
            ec_upper,
            s_lower: Some(0.0),
            s_upper: Some(1.0),
            asym_upper: Some(1.0),
            status,
            log_negativity: log_neg,
        });
    }
    let s_lower = if ed_lower <= 0.0 { 0.0 } else { (ed_lower / ec_upper).min(1.0) };
    Ok(SymmetryBracket {
        ed_lower,
        ec_upper,
        s_lower: Some(s_lower),
        s_upper: Some(1.0),
        asym_upper: Some(1.0 - s_lower),
        status,
        log_negativity: log_neg,
    })
}
