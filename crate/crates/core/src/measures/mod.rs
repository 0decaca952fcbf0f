//! Concurrence, negativity, PPT separability and the relative entropy of
//! entanglement of two-qubit states.

mod ree;

pub use ree::{ree, ReeSolution, ReeSolverConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{
    herm_eig, kron, partial_trace, partial_transpose, pauli, von_neumann_entropy, ComplexMatrix,
    DensityMatrix, Qubit, C64,
};
use crate::randgen::RngStream;

/// A partial-transpose eigenvalue at or above `-SEPARABLE_TOL` counts as
/// non-negative.
pub const SEPARABLE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureTriple {
    pub concurrence: f64,
    pub negativity: f64,
    pub ree: f64,
    pub separable: bool,
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
///
/// The `λᵢ` (square roots of the eigenvalues of `ρ ρ̃`, `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`)
/// are the singular values of `τ = A† (σ_y⊗σ_y) A*` for any `ρ = A A†`. With
/// `A = V √P` they come out of the Hermitian dilation `[[0, τ], [τ†, 0]]`
/// whose spectrum is `±λᵢ`, which keeps small `λᵢ` accurate to roundoff
/// instead of to its square root.
pub fn concurrence(rho: &DensityMatrix) -> f64 {
    let spec = rho.spectrum();
    let yy = kron(&pauli::y(), &pauli::y());
    let n = 4;
    let scaled: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            spec.vector(i)
                .iter()
                .map(|z| z * spec.eigenvalues[i].sqrt())
                .collect()
        })
        .collect();
    let mut tau = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let conj_j: Vec<C64> = scaled[j].iter().map(|z| z.conj()).collect();
            tau[(i, j)] = yy.sandwich(&scaled[i], &conj_j);
        }
    }
    let mut dilation = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            dilation[(i, n + j)] = tau[(i, j)];
            dilation[(n + j, i)] = tau[(i, j)].conj();
        }
    }
    let lambdas: Vec<f64> = herm_eig(&dilation)
        .expect("8x8 Hermitian eigendecomposition converges")
        .eigenvalues
        .into_iter()
        .take(n)
        .map(|x| x.max(0.0))
        .collect();
    clamp_unit(lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3])
}

fn partial_transpose_spectrum(rho: &DensityMatrix) -> Vec<f64> {
    let pt = partial_transpose(rho, Qubit::B).expect("two-qubit state");
    herm_eig(&pt)
        .expect("4x4 Hermitian eigendecomposition converges")
        .eigenvalues
}

/// `2 Σ max(0, −μᵢ)` over the partial-transpose eigenvalues.
pub fn negativity(rho: &DensityMatrix) -> f64 {
    let n: f64 = partial_transpose_spectrum(rho)
        .iter()
        .map(|&mu| (-mu).max(0.0))
        .sum();
    clamp_unit(2.0 * n)
}

/// Peres–Horodecki test, exact for two qubits.
pub fn is_separable(rho: &DensityMatrix) -> bool {
    min_partial_transpose_eigenvalue(rho) >= -SEPARABLE_TOL
}

pub fn min_partial_transpose_eigenvalue(rho: &DensityMatrix) -> f64 {
    partial_transpose_spectrum(rho)
        .last()
        .copied()
        .unwrap_or(0.0)
}

pub fn measure_triple(
    rho: &DensityMatrix,
    cfg: &ReeSolverConfig,
    rng: &mut RngStream,
) -> MeasureTriple {
    MeasureTriple {
        concurrence: concurrence(rho),
        negativity: negativity(rho),
        ree: clamp_unit(ree(rho, cfg, rng).value),
        separable: is_separable(rho),
    }
}

/// REE of a pure state: the entropy of either reduced state.
pub fn ree_pure_oracle(psi: &[C64]) -> Result<f64> {
    if psi.len() != 4 {
        return Err(Error::InvalidState(format!(
            "expected 4 amplitudes, got {}",
            psi.len()
        )));
    }
    let rho = DensityMatrix::pure(psi)?;
    Ok(von_neumann_entropy(&partial_trace(&rho, Qubit::A)?))
}

/// `H₂(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// REE of a Bell-diagonal state whose largest Bell weight is `lambda_max`:
/// `1 − H₂(λ_max)`.
pub fn ree_bell_diagonal_oracle(lambda_max: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&lambda_max) {
        return Err(Error::InvalidState(format!(
            "largest Bell weight {lambda_max} outside [1/2, 1]"
        )));
    }
    Ok(1.0 - binary_entropy(lambda_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::states::*;
    use crate::qcore::{apply_local_unitary, ONE, ZERO};
    use crate::randgen::{derive_stream, haar_unitary, random_density_matrix};

    fn basis_vector(i: usize) -> [C64; 4] {
        let mut v = [ZERO; 4];
        v[i] = ONE;
        v
    }

    #[test]
    fn concurrence_fixtures() {
        assert!((concurrence(&phi_plus()) - 1.0).abs() < 1e-12);
        assert!(concurrence(&product_zero()).abs() < 1e-12);
        assert!((concurrence(&werner(0.5).unwrap()) - 0.25).abs() < 1e-12);
        assert!(concurrence(&DensityMatrix::maximally_mixed(4)).abs() < 1e-12);
    }

    #[test]
    fn concurrence_werner_curve() {
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let want = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!(
                (concurrence(&werner(p).unwrap()) - want).abs() < 1e-12,
                "p = {p}"
            );
        }
    }

    #[test]
    fn concurrence_matches_pure_state_formula() {
        // C(|ψ⟩) = 2 |ψ₀₀ψ₁₁ − ψ₀₁ψ₁₀|
        let mut rng = derive_stream(101, 0);
        for _ in 0..100 {
            let psi = rng.unit_vector(4);
            let rho = DensityMatrix::pure(&psi).unwrap();
            let want = 2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm();
            assert!((concurrence(&rho) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn negativity_fixtures() {
        assert!((negativity(&phi_plus()) - 1.0).abs() < 1e-12);
        assert!(negativity(&DensityMatrix::maximally_mixed(4)).abs() < 1e-12);
        assert!((negativity(&werner(0.5).unwrap()) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn separability_fixtures() {
        assert!(is_separable(&DensityMatrix::maximally_mixed(4)));
        assert!(!is_separable(&phi_plus()));
        assert!(is_separable(&werner(1.0 / 3.0).unwrap()));
        assert!(!is_separable(&werner(0.34).unwrap()));
    }

    #[test]
    fn negativity_never_exceeds_concurrence() {
        for i in 0..300 {
            let rho = random_density_matrix(&mut derive_stream(7, i));
            let c = concurrence(&rho);
            let n = negativity(&rho);
            assert!(n <= c + 1e-12, "N = {n} > C = {c}");
            let sep = is_separable(&rho);
            assert_eq!(sep, c <= 1e-9, "state {i}: C = {c}");
            assert_eq!(sep, n <= 1e-9, "state {i}: N = {n}");
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = derive_stream(8, 0);
        for i in 0..50 {
            let rho = random_density_matrix(&mut derive_stream(8, 1000 + i));
            let u = haar_unitary(&mut rng, 2);
            let v = haar_unitary(&mut rng, 2);
            let rot = apply_local_unitary(&rho, &u, &v).unwrap();
            assert!((concurrence(&rho) - concurrence(&rot)).abs() < 1e-9);
            assert!((negativity(&rho) - negativity(&rot)).abs() < 1e-9);
        }
    }

    #[test]
    fn pure_oracle_fixtures() {
        assert!(ree_pure_oracle(&basis_vector(0)).unwrap().abs() < 1e-12);
        assert!((ree_pure_oracle(&phi_plus_vector()).unwrap() - 1.0).abs() < 1e-12);
        let (c, s) = (
            std::f64::consts::FRAC_PI_8.cos(),
            std::f64::consts::FRAC_PI_8.sin(),
        );
        let psi = [ONE * c, ZERO, ZERO, ONE * s];
        let v = ree_pure_oracle(&psi).unwrap();
        assert!((v - binary_entropy(c * c)).abs() < 1e-12);
        assert!((v - 0.6009).abs() < 1e-4);
        assert!(ree_pure_oracle(&[ONE, ONE, ZERO, ZERO]).is_err());
    }

    #[test]
    fn bell_diagonal_oracle_fixtures() {
        assert!(ree_bell_diagonal_oracle(0.5).unwrap().abs() < 1e-15);
        assert!((ree_bell_diagonal_oracle(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((ree_bell_diagonal_oracle(0.75).unwrap() - 0.18872).abs() < 1e-5);
        assert!(ree_bell_diagonal_oracle(0.4).is_err());
        assert!(ree_bell_diagonal_oracle(1.1).is_err());
    }
}
