//! Quantum Fisher information of two qubits for collective spin rotations.
//!
//! With `ρ = Σ pᵢ |i⟩⟨i|` and `J_k` the collective spin components, the
//! 3×3 matrix
//! `C_kl = Σ_{i≠j} (pᵢ − pⱼ)²/(pᵢ + pⱼ) [⟨i|J_k|j⟩⟨j|J_l|i⟩ + ⟨i|J_l|j⟩⟨j|J_k|i⟩]`
//! gives the QFI along any unit direction as `nᵀ C n`. The mean QFI per
//! particle maximized over directions is `λ_max(C)/N` with `N = 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{kron, pauli, symmetric3_top, ComplexMatrix, DensityMatrix, ZERO_CUTOFF};

/// Number of particles.
pub const PARTICLES: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinDirection {
    pub n_x: f64,
    pub n_y: f64,
    pub n_z: f64,
}

impl SpinDirection {
    pub const X: Self = Self {
        n_x: 1.0,
        n_y: 0.0,
        n_z: 0.0,
    };
    pub const Y: Self = Self {
        n_x: 0.0,
        n_y: 1.0,
        n_z: 0.0,
    };
    pub const Z: Self = Self {
        n_x: 0.0,
        n_y: 0.0,
        n_z: 1.0,
    };

    /// Rejects vectors whose squared norm is off from 1 by more than 1e-12.
    pub fn new(n_x: f64, n_y: f64, n_z: f64) -> Result<Self> {
        let norm2 = n_x * n_x + n_y * n_y + n_z * n_z;
        if !norm2.is_finite() || (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("direction has squared norm {norm2}")));
        }
        Ok(Self { n_x, n_y, n_z })
    }

    /// Scales a nonzero vector to unit length.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Config("cannot normalize a zero direction".into()));
        }
        Ok(Self {
            n_x: v[0] / norm,
            n_y: v[1] / norm,
            n_z: v[2] / norm,
        })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.n_x, self.n_y, self.n_z]
    }
}

/// `J_n = Σ_α (n_α/2)(σ_α ⊗ I + I ⊗ σ_α)`.
pub fn collective_spin(direction: &SpinDirection) -> ComplexMatrix {
    let id = pauli::identity();
    let mut j = ComplexMatrix::zeros(4, 4);
    for (n, sigma) in direction.as_array().iter().zip(pauli::all()) {
        let term = &kron(&sigma, &id) + &kron(&id, &sigma);
        j = &j + &term.scale_real(0.5 * n);
    }
    j
}

fn axis_operators() -> [ComplexMatrix; 3] {
    [SpinDirection::X, SpinDirection::Y, SpinDirection::Z].map(|d| collective_spin(&d))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CMatrix(pub [[f64; 3]; 3]);

impl CMatrix {
    pub fn entry(&self, k: usize, l: usize) -> f64 {
        self.0[k][l]
    }

    /// `nᵀ C n`.
    pub fn quadratic_form(&self, n: &SpinDirection) -> f64 {
        let v = n.as_array();
        (0..3)
            .map(|k| (0..3).map(|l| v[k] * self.0[k][l] * v[l]).sum::<f64>())
            .sum()
    }
}

/// Pairs whose weights sum below this carry no information and are skipped.
const PAIR_CUTOFF: f64 = 1e-12;

pub fn c_matrix(rho: &DensityMatrix) -> CMatrix {
    let spec = rho.spectrum();
    let v = &spec.eigenvectors;
    let p = &spec.eigenvalues;
    let n = rho.dim();
    // ⟨i|J_k|j⟩ for every axis.
    let elements: Vec<ComplexMatrix> = axis_operators()
        .iter()
        .map(|j| &(&v.dagger() * j) * v)
        .collect();

    let mut c = [[0.0; 3]; 3];
    for i in 0..n {
        for j in 0..n {
            if i == j || p[i] + p[j] < PAIR_CUTOFF.max(ZERO_CUTOFF) {
                continue;
            }
            let weight = (p[i] - p[j]).powi(2) / (p[i] + p[j]);
            if weight == 0.0 {
                continue;
            }
            for k in 0..3 {
                for l in k..3 {
                    // The second bracket term is the conjugate of the first.
                    let term = elements[k][(i, j)] * elements[l][(j, i)];
                    c[k][l] += weight * 2.0 * term.re;
                }
            }
        }
    }
    for k in 0..3 {
        for l in 0..k {
            c[k][l] = c[l][k];
        }
    }
    CMatrix(c)
}

/// `F(ρ, J_n) = Σ_{i≠j} 2(pᵢ − pⱼ)²/(pᵢ + pⱼ) |⟨i|J_n|j⟩|²`, summed directly.
pub fn qfi_direction(rho: &DensityMatrix, n: &SpinDirection) -> f64 {
    let spec = rho.spectrum();
    let v = &spec.eigenvectors;
    let p = &spec.eigenvalues;
    let jn = &(&v.dagger() * &collective_spin(n)) * v;
    let mut f = 0.0;
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            if i == j || p[i] + p[j] < PAIR_CUTOFF {
                continue;
            }
            f += 2.0 * (p[i] - p[j]).powi(2) / (p[i] + p[j]) * jn[(i, j)].norm_sqr();
        }
    }
    f
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfiResult {
    /// `λ_max(C)/N`.
    pub mean_qfi: f64,
    pub optimal_direction: SpinDirection,
    pub c_matrix: CMatrix,
}

pub fn max_mean_qfi(rho: &DensityMatrix) -> QfiResult {
    let c = c_matrix(rho);
    let (lambda, mut dir) =
        symmetric3_top(&c.0).expect("3x3 symmetric eigendecomposition converges");
    // Sign convention: the largest-magnitude component is positive, first
    // index wins ties.
    let pivot = (0..3).fold(0, |best, k| {
        if dir[k].abs() > dir[best].abs() {
            k
        } else {
            best
        }
    });
    if dir[pivot] < 0.0 {
        dir.iter_mut().for_each(|x| *x = -*x);
    }
    QfiResult {
        mean_qfi: lambda.max(0.0) / PARTICLES,
        optimal_direction: SpinDirection {
            n_x: dir[0],
            n_y: dir[1],
            n_z: dir[2],
        },
        c_matrix: c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::states::*;
    use crate::qcore::{C64, ZERO};
    use crate::randgen::{derive_stream, random_density_matrix};

    fn assert_c(c: &CMatrix, want: [[f64; 3]; 3]) {
        for k in 0..3 {
            for l in 0..3 {
                assert!(
                    (c.entry(k, l) - want[k][l]).abs() < 1e-12,
                    "C[{k}][{l}] = {}",
                    c.entry(k, l)
                );
            }
        }
    }

    #[test]
    fn collective_spin_z_is_diagonal() {
        let jz = collective_spin(&SpinDirection::Z);
        assert!(jz.max_abs_diff(&ComplexMatrix::diag(&[1.0, 0.0, 0.0, -1.0])) < 1e-15);
    }

    #[test]
    fn collective_spin_is_traceless_hermitian() {
        let mut rng = derive_stream(4, 4);
        for _ in 0..20 {
            let d = SpinDirection::normalized([
                rng.next_normal(),
                rng.next_normal(),
                rng.next_normal(),
            ])
            .unwrap();
            let j = collective_spin(&d);
            assert!(j.trace().norm() < 1e-15);
            assert!(j.hermiticity_defect() < 1e-15);
        }
    }

    #[test]
    fn jx_moments_on_product_zero() {
        let jx = collective_spin(&SpinDirection::X);
        let zero = [C64::new(1.0, 0.0), ZERO, ZERO, ZERO];
        assert!(jx.sandwich(&zero, &zero).norm() < 1e-15);
        let jx2 = &jx * &jx;
        assert!((jx2.sandwich(&zero, &zero).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn direction_validation() {
        assert!(SpinDirection::new(1.0, 1.0, 0.0).is_err());
        assert!(SpinDirection::new(0.6, 0.8, 0.0).is_ok());
        assert!(SpinDirection::normalized([0.0; 3]).is_err());
    }

    #[test]
    fn c_matrix_fixtures() {
        assert_c(&c_matrix(&DensityMatrix::maximally_mixed(4)), [[0.0; 3]; 3]);
        assert_c(
            &c_matrix(&phi_plus()),
            [[4.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 4.0]],
        );
        assert_c(
            &c_matrix(&product_zero()),
            [[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 0.0]],
        );
    }

    #[test]
    fn qfi_direction_fixtures() {
        assert!(qfi_direction(&DensityMatrix::maximally_mixed(4), &SpinDirection::X).abs() < 1e-15);
        assert!((qfi_direction(&phi_plus(), &SpinDirection::Z) - 4.0).abs() < 1e-12);
        let mut rng = derive_stream(4, 5);
        for _ in 0..20 {
            let d = SpinDirection::normalized([
                rng.next_normal(),
                rng.next_normal(),
                rng.next_normal(),
            ])
            .unwrap();
            assert!(qfi_direction(&psi_minus(), &d).abs() < 1e-12);
        }
    }

    #[test]
    fn max_mean_qfi_fixtures() {
        assert!(
            max_mean_qfi(&DensityMatrix::maximally_mixed(4))
                .mean_qfi
                .abs()
                < 1e-15
        );
        assert!((max_mean_qfi(&phi_plus()).mean_qfi - 2.0).abs() < 1e-12);
        let zero = max_mean_qfi(&product_zero());
        assert!((zero.mean_qfi - 1.0).abs() < 1e-12);
        let d = zero.optimal_direction;
        assert!(
            d.n_z.abs() < 1e-12,
            "top eigenspace of diag(2,2,0) is the xy plane"
        );
    }

    #[test]
    fn direction_sign_convention() {
        for i in 0..50 {
            let rho = random_density_matrix(&mut derive_stream(31, i));
            let d = max_mean_qfi(&rho).optimal_direction.as_array();
            let pivot = (0..3).fold(0, |b, k| if d[k].abs() > d[b].abs() { k } else { b });
            assert!(d[pivot] > 0.0);
            assert!((d.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn optimal_direction_attains_lambda_max() {
        let mut rng = derive_stream(32, 0);
        for i in 0..50 {
            let rho = random_density_matrix(&mut derive_stream(32, i + 1));
            let res = max_mean_qfi(&rho);
            let lambda = res.mean_qfi * PARTICLES;
            let at_opt = qfi_direction(&rho, &res.optimal_direction);
            assert!((at_opt - lambda).abs() < 1e-9);
            for _ in 0..100 {
                let n = SpinDirection::normalized([
                    rng.next_normal(),
                    rng.next_normal(),
                    rng.next_normal(),
                ])
                .unwrap();
                assert!(qfi_direction(&rho, &n) <= at_opt + 1e-12);
            }
            assert!(res.mean_qfi <= 2.0 + 1e-9);
        }
    }
}
