//! Closed-form two-qubit concurrence and entanglement of formation.

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian_unchecked, singular_values, ComplexMatrix, C64};
use crate::states::BipartiteState;

/// `σ_y ⊗ σ_y` in the computational basis.
fn spin_flip() -> ComplexMatrix {
    let mut y = ComplexMatrix::zeros(4, 4);
    y[(0, 3)] = C64::new(-1.0, 0.0);
    y[(1, 2)] = C64::new(1.0, 0.0);
    y[(2, 1)] = C64::new(1.0, 0.0);
    y[(3, 0)] = C64::new(-1.0, 0.0);
    y
}

fn two_qubit_density(rho: &BipartiteState) -> Result<ComplexMatrix> {
    if rho.dims() != (2, 2) {
        return Err(Error::shape(format!("Wootters formulas need a 2x2 system, got {:?}", rho.dims())));
    }
    Ok(rho.density().into_owned())
}

/// `max(0, λ₁ − λ₂ − λ₃ − λ₄)` with `λ_i` the square roots of the
/// eigenvalues of `√ρ ρ̃ √ρ`, `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn wootters_concurrence(rho: &BipartiteState) -> Result<f64> {
    let rho = two_qubit_density(rho)?;
    Ok(concurrence_of_matrix(&rho))
}

/// The `λ_i` are the singular values of `Wᵀ (σ_y⊗σ_y) W` for any `W` with
/// `W W† = ρ`; this avoids square roots of roundoff-level eigenvalues.
pub(crate) fn concurrence_of_matrix(rho: &ComplexMatrix) -> f64 {
    let (spec, vecs) = eig_hermitian_unchecked(&rho.hermitian_part());
    let roots: Vec<f64> = spec.values().iter().map(|l| l.max(0.0).sqrt()).collect();
    let w = ComplexMatrix::from_fn(4, 4, |i, j| vecs[(i, j)] * roots[j]);
    let tau = w.transpose().matmul(&spin_flip()).matmul(&w);
    let mut lambdas = singular_values(&tau);
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    let h = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    h(x) + h(1.0 - x)
}

/// `h((1 + √(1 − C²))/2)`.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

pub fn wootters_eof(rho: &BipartiteState) -> Result<f64> {
    Ok(eof_from_concurrence(wootters_concurrence(rho)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell, example_mix01_bell};

    fn werner(p: f64) -> BipartiteState {
        let phi = bell(2).density().into_owned();
        let rho = &phi.scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
        BipartiteState::mixed(2, 2, rho).unwrap()
    }

    #[test]
    fn bell_has_unit_concurrence_and_eof() {
        assert!((wootters_concurrence(&bell(2)).unwrap() - 1.0).abs() < 1e-12);
        assert!((wootters_eof(&bell(2)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn werner_line() {
        assert!((wootters_concurrence(&werner(0.9)).unwrap() - 0.85).abs() < 1e-12);
        assert!(wootters_concurrence(&werner(0.3)).unwrap() < 1e-12);
    }

    #[test]
    fn separable_states_vanish() {
        let rho = example_mix01_bell(1.0).unwrap();
        assert_eq!(wootters_concurrence(&rho).unwrap(), 0.0);
        assert_eq!(wootters_eof(&rho).unwrap(), 0.0);
        let mixed = BipartiteState::mixed(2, 2, ComplexMatrix::identity(4).scale_real(0.25)).unwrap();
        assert_eq!(wootters_concurrence(&mixed).unwrap(), 0.0);
    }

    #[test]
    fn sigma_star_is_entangled() {
        // concurrence of p|01⟩⟨01| + (1−p)Φ⁺ is 1 − p: the spin-flip
        // spectrum is {(1−p)², 0, 0, 0}.
        let c = wootters_concurrence(&example_mix01_bell(0.5).unwrap()).unwrap();
        assert!((c - 0.5).abs() < 1e-7, "c = {c}");
    }

    #[test]
    fn rejects_wrong_dimension() {
        assert!(wootters_concurrence(&bell(3)).is_err());
    }
}
