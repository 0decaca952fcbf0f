//! Density matrices and the state-level operations built on them.

use crate::error::{Error, Result};
use crate::qcore::eigen::{herm_eig, Spectrum};
use crate::qcore::matrix::{kron, ComplexMatrix, C64, ZERO};

/// Maximum entrywise `|M − M†|` accepted for a density matrix.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Maximum `|tr M − 1|` accepted for a density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted (and clamped to zero).
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exactly zero.
pub const ZERO_CUTOFF: f64 = 1e-12;
/// Maximum `|U†U − I|` accepted for a local unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Subsystem selector; qubit `A` is the left tensor factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Qubit {
    A,
    B,
}

/// A validated density operator. The spectrum is computed once at
/// construction and cached, with eigenvalues below [`ZERO_CUTOFF`] set to 0.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: Spectrum,
    clamped: bool,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidState(format!(
                "shape {}x{} is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {defect:.3e}"
            )));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {:.12} + {:.3e}i",
                tr.re, tr.im
            )));
        }
        let mut spectrum = herm_eig(&matrix)?;
        let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        let clamped = min < 0.0;
        for p in &mut spectrum.eigenvalues {
            if *p < ZERO_CUTOFF {
                *p = 0.0;
            }
        }
        let matrix = if clamped {
            spectrum.reconstruct()
        } else {
            matrix.hermitian_part()
        };
        Ok(Self {
            matrix,
            spectrum,
            clamped,
        })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector `ψ`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "state vector has squared norm {norm}"
            )));
        }
        Self::new(ComplexMatrix::outer(psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
            .expect("maximally mixed state is valid")
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Descending eigenvalues after the zero cutoff.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    /// Whether construction had to clamp slightly negative eigenvalues.
    pub fn was_clamped(&self) -> bool {
        self.clamped
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&p| p > 0.0).count()
    }
}

fn two_qubit_check(m: &ComplexMatrix) -> Result<()> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::InvalidState(format!(
            "expected a two-qubit 4x4 operator, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Partial transpose of any 4×4 operator on the chosen qubit.
pub fn partial_transpose_matrix(m: &ComplexMatrix, qubit: Qubit) -> Result<ComplexMatrix> {
    two_qubit_check(m)?;
    Ok(ComplexMatrix::from_fn(4, 4, |r, c| {
        let (a, b) = (r >> 1, r & 1);
        let (a2, b2) = (c >> 1, c & 1);
        match qubit {
            Qubit::A => m[((a2 << 1) | b, (a << 1) | b2)],
            Qubit::B => m[((a << 1) | b2, (a2 << 1) | b)],
        }
    }))
}

pub fn partial_transpose(rho: &DensityMatrix, qubit: Qubit) -> Result<ComplexMatrix> {
    partial_transpose_matrix(rho.matrix(), qubit)
}

/// Reduced state of the kept qubit.
pub fn partial_trace(rho: &DensityMatrix, keep: Qubit) -> Result<DensityMatrix> {
    let m = rho.matrix();
    two_qubit_check(m)?;
    let reduced = ComplexMatrix::from_fn(2, 2, |i, j| {
        (0..2)
            .map(|k| match keep {
                Qubit::A => m[((i << 1) | k, (j << 1) | k)],
                Qubit::B => m[((k << 1) | i, (k << 1) | j)],
            })
            .sum()
    });
    DensityMatrix::new(reduced)
}

/// `−Σ p log₂ p` with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_bits(rho.eigenvalues())
}

pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    let s: f64 = probs
        .iter()
        .filter(|&&p| p > ZERO_CUTOFF)
        .map(|&p| -p * p.log2())
        .sum();
    s.max(0.0)
}

/// `S(ρ‖σ) = tr ρ log₂ ρ − tr ρ log₂ σ`. Returns `f64::INFINITY` when the
/// support of `ρ` is not contained in the support of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    assert_eq!(
        rho.dim(),
        sigma.dim(),
        "dimension mismatch in relative entropy"
    );
    let n = rho.dim();
    let rs = rho.spectrum();
    let ss = sigma.spectrum();
    let mut cross = 0.0;
    for i in 0..n {
        let p = rs.eigenvalues[i];
        if p <= 0.0 {
            continue;
        }
        for j in 0..n {
            let overlap: C64 = (0..n)
                .map(|k| rs.eigenvectors[(k, i)].conj() * ss.eigenvectors[(k, j)])
                .sum();
            let w = p * overlap.norm_sqr();
            let s = ss.eigenvalues[j];
            if s <= 0.0 {
                if w > ZERO_CUTOFF {
                    return f64::INFINITY;
                }
                continue;
            }
            cross += w * s.log2();
        }
    }
    (-entropy_bits(&rs.eigenvalues) - cross).max(0.0)
}

/// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`.
pub fn apply_local_unitary(
    rho: &DensityMatrix,
    u_a: &ComplexMatrix,
    u_b: &ComplexMatrix,
) -> Result<DensityMatrix> {
    two_qubit_check(rho.matrix())?;
    for u in [u_a, u_b] {
        if u.rows() != 2 || u.cols() != 2 {
            return Err(Error::InvalidMatrix("local unitary must be 2x2".into()));
        }
        let deviation = u.unitarity_defect();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
    }
    let u = kron(u_a, u_b);
    DensityMatrix::new(rho.matrix().conjugate_by(&u))
}

/// Frequently used two-qubit states.
pub mod states {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;

    fn amp(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    /// `(|00⟩ + |11⟩)/√2`
    pub fn phi_plus_vector() -> [C64; 4] {
        [amp(FRAC_1_SQRT_2), ZERO, ZERO, amp(FRAC_1_SQRT_2)]
    }

    /// `(|01⟩ − |10⟩)/√2`
    pub fn psi_minus_vector() -> [C64; 4] {
        [ZERO, amp(FRAC_1_SQRT_2), amp(-FRAC_1_SQRT_2), ZERO]
    }

    pub fn phi_plus() -> DensityMatrix {
        DensityMatrix::pure(&phi_plus_vector()).expect("valid")
    }

    pub fn psi_minus() -> DensityMatrix {
        DensityMatrix::pure(&psi_minus_vector()).expect("valid")
    }

    /// `|00⟩⟨00|`
    pub fn product_zero() -> DensityMatrix {
        DensityMatrix::pure(&[amp(1.0), ZERO, ZERO, ZERO]).expect("valid")
    }

    /// `p |Φ+⟩⟨Φ+| + (1 − p) I/4`
    pub fn werner(p: f64) -> Result<DensityMatrix> {
        let bell = ComplexMatrix::outer(&phi_plus_vector()).scale_real(p);
        let noise = ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
        DensityMatrix::new(&bell + &noise)
    }

    /// The four Bell vectors `Φ+, Φ−, Ψ+, Ψ−`.
    pub fn bell_basis() -> [[C64; 4]; 4] {
        let h = FRAC_1_SQRT_2;
        [
            [amp(h), ZERO, ZERO, amp(h)],
            [amp(h), ZERO, ZERO, amp(-h)],
            [ZERO, amp(h), amp(h), ZERO],
            [ZERO, amp(h), amp(-h), ZERO],
        ]
    }

    /// `Σ_k w_k |B_k⟩⟨B_k|` over [`bell_basis`].
    pub fn bell_diagonal(weights: [f64; 4]) -> Result<DensityMatrix> {
        let mut m = ComplexMatrix::zeros(4, 4);
        for (w, v) in weights.iter().zip(bell_basis()) {
            m = &m + &ComplexMatrix::outer(&v).scale_real(*w);
        }
        DensityMatrix::new(m)
    }

    /// `ρ_A ⊗ ρ_B`.
    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(kron(a.matrix(), b.matrix()))
    }
}
