//! Distance to the PPT set and the nonsymmetric-measure estimate.

use serde::Serialize;

use super::ansatz::{channel_distance_upper_bound, class_fits, AnsatzClass, AsymmetryEstimate, AsymmetryOptions};
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian_unchecked, eigvalsh, partial_transpose_unchecked, trace_distance, ComplexMatrix, Side, C64,
};
use crate::states::BipartiteState;

/// Euclidean projection of `v` onto the probability simplex.
fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (j + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn spectral_map(m: &ComplexMatrix, f: impl Fn(&[f64]) -> Vec<f64>) -> ComplexMatrix {
    let (spec, vecs) = eig_hermitian_unchecked(&m.hermitian_part());
    let lambdas = f(spec.values());
    let n = m.rows();
    ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| vecs[(i, k)] * vecs[(j, k)].conj() * lambdas[k]).sum::<C64>())
}

fn project_density(m: &ComplexMatrix) -> ComplexMatrix {
    spectral_map(m, simplex_projection)
}

fn project_ppt_cone(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let pt = partial_transpose_unchecked(m, da, db, Side::B);
    let clipped = spectral_map(&pt, |l| l.iter().map(|x| x.max(0.0)).collect());
    partial_transpose_unchecked(&clipped, da, db, Side::B)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PptProjection {
    /// Closest point found, a density matrix.
    #[serde(skip)]
    pub point: ComplexMatrix,
    /// Trace distance from the input to `point`.
    pub distance: f64,
    /// Most negative eigenvalue of the partial transpose of `point`.
    pub ppt_violation: f64,
    pub iterations: usize,
}

/// Dykstra alternating projections onto {PSD, unit trace} and
/// {partial transpose PSD}. The limit is the Frobenius-nearest PPT state, so
/// its trace distance is only a heuristic for the trace-distance minimum.
pub fn ppt_projection(sigma: &BipartiteState, max_iters: usize, tol: f64) -> PptProjection {
    let (da, db) = sigma.dims();
    let s = sigma.density().into_owned();
    let n = s.rows();
    let mut x = s.clone();
    let mut p = ComplexMatrix::zeros(n, n);
    let mut q = ComplexMatrix::zeros(n, n);
    let mut y = s.clone();
    let mut iterations = 0;
    for it in 1..=max_iters {
        iterations = it;
        let xp = &x + &p;
        y = project_density(&xp);
        p = &xp - &y;
        let yq = &y + &q;
        let x_new = project_ppt_cone(&yq, da, db);
        q = &yq - &x_new;
        let change = (&x_new - &x).frobenius_norm();
        x = x_new;
        if change < tol && (&x - &y).frobenius_norm() < tol {
            break;
        }
    }
    let pt = partial_transpose_unchecked(&y, da, db, Side::B);
    let ppt_violation = eigvalsh(&pt).into_iter().fold(0.0, f64::min).min(0.0).abs();
    let distance = trace_distance(&s, &y).expect("same shape");
    PptProjection { point: y, distance, ppt_violation, iterations }
}

/// `(‖σ^Γ‖₁ − 1) / (2·min(dA, dB))`, a certified lower bound on the trace
/// distance from `σ` to any PPT state.
pub fn negativity_distance_bound(sigma: &BipartiteState) -> f64 {
    let (da, db) = sigma.dims();
    let pt = partial_transpose_unchecked(&sigma.density(), da, db, Side::B);
    let norm: f64 = eigvalsh(&pt).iter().map(|l| l.abs()).sum();
    ((norm - 1.0) / (2.0 * da.min(db) as f64)).max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonsymmetricOptions {
    pub classes: Vec<AnsatzClass>,
    pub asymmetry: AsymmetryOptions,
    pub projection_iters: usize,
    pub projection_tol: f64,
}

impl Default for NonsymmetricOptions {
    fn default() -> Self {
        NonsymmetricOptions {
            classes: AnsatzClass::all(),
            asymmetry: AsymmetryOptions::default(),
            projection_iters: 5000,
            projection_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonsymmetricEstimate {
    /// Trace distance from `σ` to the Frobenius-nearest PPT state; a
    /// heuristic for the distance to the separable set.
    pub e_first_term: f64,
    /// Certified lower bound on the trace distance to the PPT set.
    pub e_first_term_certified_lower: f64,
    /// PPT coincides with separability (2x2 and 2x3).
    pub ppt_relaxation_exact: bool,
    /// Best `D(σ, Λ(ρ))` over the searched classes.
    pub inner_term_upper: f64,
    pub inner: AsymmetryEstimate,
    /// `e_first_term − inner_term_upper`; may be negative.
    pub e_sigma_lower: f64,
    pub projection: PptProjection,
}

/// Estimate of `E^D(σ) − inf_Λ D(σ, Λ(ρ))` with the separable set relaxed to
/// PPT and the channel infimum restricted to the given classes.
pub fn nonsymmetric_measure_estimate(
    sigma: &BipartiteState,
    rho: &BipartiteState,
    opts: &NonsymmetricOptions,
) -> Result<NonsymmetricEstimate> {
    let projection = ppt_projection(sigma, opts.projection_iters, opts.projection_tol);
    let mut inner: Option<AsymmetryEstimate> = None;
    for &class in &opts.classes {
        if !class_fits(class, rho.dims(), sigma.dims()) {
            continue;
        }
        let est = channel_distance_upper_bound(rho, sigma, class, &opts.asymmetry)?;
        if inner.as_ref().is_none_or(|b| est.value < b.value) {
            inner = Some(est);
        }
    }
    let inner = inner
        .ok_or_else(|| Error::shape(format!("no ansatz class maps dims {:?} onto {:?}", rho.dims(), sigma.dims())))?;
    let (da, db) = sigma.dims();
    Ok(NonsymmetricEstimate {
        e_first_term: projection.distance,
        e_first_term_certified_lower: negativity_distance_bound(sigma),
        ppt_relaxation_exact: da.min(db) <= 1 || (da.min(db) == 2 && da.max(db) <= 3),
        inner_term_upper: inner.value,
        e_sigma_lower: projection.distance - inner.value,
        inner,
        projection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection_cases() {
        assert_eq!(simplex_projection(&[0.5, 0.5]), vec![0.5, 0.5]);
        let p = simplex_projection(&[2.0, 0.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = simplex_projection(&[0.6, 0.6, -0.1]);
        assert!((p[0] - 0.5).abs() < 1e-15 && p[2] == 0.0);
    }
}
