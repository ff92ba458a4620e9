//! Swap operator, LU-swapability, LOCC asymmetry bounds and the
//! nonsymmetric-measure estimator.

mod ansatz;
mod lu;
mod ppt;
mod search;

pub use ansatz::{
    asymmetry_upper_bound, channel_distance_upper_bound, class_fits, AnsatzClass, AsymmetryEstimate, AsymmetryOptions,
    DistanceKind,
};
pub use lu::{
    lu_swap_check, swap_operator, witness_residual, LuWitness, SwapCheckOptions, SwapStatus, SwapVerdict,
    FAIL_RESIDUAL, PASS_RESIDUAL, SPECTRAL_TOL,
};
pub use ppt::{
    negativity_distance_bound, nonsymmetric_measure_estimate, ppt_projection, NonsymmetricEstimate,
    NonsymmetricOptions, PptProjection,
};

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::linalg::Spectrum;
use crate::measures::{g_convex_roof, wootters_concurrence, BoundDirection, MeasureResult, RoofOptions};
use crate::states::{local_spectra, schmidt_rank, BipartiteState};

/// G values at or below this count as zero for the Theorem 1 test.
pub const G_THRESHOLD: f64 = 1e-4;
/// A one-way protocol reaching this distance counts as an explicit swap.
pub const PROTOCOL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoccVerdict {
    LuSwapable,
    NotLoccSwapable,
    InapplicableSwapable,
    InapplicableUndetermined,
    Undetermined,
}

impl LoccVerdict {
    pub fn label(self) -> &'static str {
        match self {
            LoccVerdict::LuSwapable => "LOCC-swapable (local unitaries)",
            LoccVerdict::NotLoccSwapable => "not LOCC-swapable (Theorem 1)",
            LoccVerdict::InapplicableSwapable => "Theorem 1 inapplicable / LOCC-swapable",
            LoccVerdict::InapplicableUndetermined => "Theorem 1 inapplicable / undetermined",
            LoccVerdict::Undetermined => "undetermined",
        }
    }
}

impl Serialize for LoccVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportOptions {
    pub swap: SwapCheckOptions,
    pub roof: RoofOptions,
    pub asymmetry: AsymmetryOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoccSwapabilityReport {
    pub local_spectra: (Spectrum, Spectrum),
    pub g: MeasureResult,
    /// `G > 0` is established (exact value above threshold), which Theorem 1
    /// needs; an upper bound alone does not establish it.
    pub g_positive_certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schmidt_rank: Option<usize>,
    pub lu: SwapVerdict,
    pub theorem1_applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<AsymmetryEstimate>,
    pub verdict: LoccVerdict,
}

fn g_value(rho: &BipartiteState, opts: &RoofOptions) -> Result<MeasureResult> {
    if rho.dims() == (2, 2) && !rho.is_pure() {
        // two-qubit G is the concurrence
        return Ok(MeasureResult {
            value: wootters_concurrence(rho)?,
            direction: BoundDirection::Exact,
            iterations: 0,
            restarts: 0,
            converged: true,
            seed: opts.seed,
            note: Some("two-qubit closed form".into()),
        });
    }
    g_convex_roof(rho, opts)
}

/// Runs the Theorem 1 pipeline: G, LU-swap check, and for `G = 0` a search
/// for an explicit one-way protocol.
pub fn locc_swapability_report(rho: &BipartiteState, opts: &ReportOptions) -> Result<LoccSwapabilityReport> {
    let g = g_value(rho, &opts.roof)?;
    let g_positive_certified = g.direction == BoundDirection::Exact && g.value > G_THRESHOLD;
    let g_zero = g.value <= G_THRESHOLD;
    let schmidt_rank = if rho.is_pure() { Some(schmidt_rank(rho, 1e-10)?) } else { None };
    let lu = lu_swap_check(rho, &opts.swap)?;
    let mut protocol = None;
    let verdict = if lu.status == SwapStatus::LuSwapable {
        LoccVerdict::LuSwapable
    } else if g_zero {
        for class in [AnsatzClass::OneWayAB(None), AnsatzClass::OneWayBA(None)] {
            if !class_fits(class, rho.dims(), (rho.dims().1, rho.dims().0)) {
                continue;
            }
            let est = asymmetry_upper_bound(rho, class, &opts.asymmetry)?;
            if protocol.as_ref().is_none_or(|p: &AsymmetryEstimate| est.value < p.value) {
                protocol = Some(est);
            }
        }
        if protocol.as_ref().is_some_and(|p| p.value <= PROTOCOL_TOL) {
            LoccVerdict::InapplicableSwapable
        } else {
            LoccVerdict::InapplicableUndetermined
        }
    } else if g_positive_certified && lu.status == SwapStatus::NotLuSwapable {
        LoccVerdict::NotLoccSwapable
    } else {
        LoccVerdict::Undetermined
    };
    Ok(LoccSwapabilityReport {
        local_spectra: local_spectra(rho),
        g,
        g_positive_certified,
        schmidt_rank,
        lu,
        theorem1_applicable: !g_zero,
        protocol,
        verdict,
    })
}
