//! Exhaustive search over local Euler rotations `U_x(α) U_z(β) U_x(γ)` of
//! each qubit for the largest and smallest mean QFI.
//!
//! A local unitary leaves the spectrum of `ρ` alone and maps its eigenvectors
//! `V → (U_A⊗U_B) V`, so the C-matrix of the rotated state only needs the
//! spin operators `U†σ_kU = Σ_m R_km σ_m` expressed in the fixed eigenbasis.
//! Each grid point then costs a 3×3 contraction and eigenvalue instead of a
//! 4×4 eigendecomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{kron, pauli, symmetric3_max, ComplexMatrix, DensityMatrix, C64, I, ONE, ZERO};
use crate::qfi::PARTICLES;

/// Slack used to decide whether the coarse grid moved the QFI at all.
pub const REFINE_TOL: f64 = 1e-9;

pub const DEFAULT_GRID_DIVISOR: usize = 4;
pub const DEFAULT_REFINE_DIVISOR: usize = 6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EulerAngleSet {
    pub alpha_a: f64,
    pub beta_a: f64,
    pub gamma_a: f64,
    pub alpha_b: f64,
    pub beta_b: f64,
    pub gamma_b: f64,
}

impl EulerAngleSet {
    pub fn from_array(a: [f64; 6]) -> Self {
        Self {
            alpha_a: a[0],
            beta_a: a[1],
            gamma_a: a[2],
            alpha_b: a[3],
            beta_b: a[4],
            gamma_b: a[5],
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.alpha_a,
            self.beta_a,
            self.gamma_a,
            self.alpha_b,
            self.beta_b,
            self.gamma_b,
        ]
    }

    /// `(U_A, U_B)`.
    pub fn unitaries(&self) -> (ComplexMatrix, ComplexMatrix) {
        (
            euler_unitary(self.alpha_a, self.beta_a, self.gamma_a),
            euler_unitary(self.alpha_b, self.beta_b, self.gamma_b),
        )
    }
}

/// `exp(−iθσ_x/2)`.
fn rot_x(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let data = vec![ONE * c, -I * s, -I * s, ONE * c];
    ComplexMatrix::new(2, 2, data).expect("finite angle")
}

/// `exp(−iθσ_z/2)`.
fn rot_z(theta: f64) -> ComplexMatrix {
    let h = theta / 2.0;
    let data = vec![
        C64::from_polar(1.0, -h),
        ZERO,
        ZERO,
        C64::from_polar(1.0, h),
    ];
    ComplexMatrix::new(2, 2, data).expect("finite angle")
}

/// `U_x(α) U_z(β) U_x(γ)`.
///
/// # Panics
/// On non-finite angles.
pub fn euler_unitary(alpha: f64, beta: f64, gamma: f64) -> ComplexMatrix {
    &(&rot_x(alpha) * &rot_z(beta)) * &rot_x(gamma)
}

/// `R` with `U† σ_k U = Σ_m R_km σ_m`.
fn bloch_rotation(u: &ComplexMatrix) -> [[f64; 3]; 3] {
    let sigmas = pauli::all();
    let mut r = [[0.0; 3]; 3];
    for (k, sk) in sigmas.iter().enumerate() {
        let rotated = sk.conjugate_by(&u.dagger());
        for (m, sm) in sigmas.iter().enumerate() {
            r[k][m] = 0.5 * (sm * &rotated).trace().re;
        }
    }
    r
}

/// Grid spacing `2π/k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridStep {
    divisor: usize,
}

impl GridStep {
    pub fn from_divisor(divisor: usize) -> Result<Self> {
        if divisor < 2 {
            return Err(Error::Config(format!(
                "grid divisor must be at least 2, got {divisor}"
            )));
        }
        Ok(Self { divisor })
    }

    /// Accepts only steps of the form `2π/k` (to within 1e-12).
    pub fn from_radians(step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::Config(format!(
                "grid step {step} is not a positive angle"
            )));
        }
        let k = (std::f64::consts::TAU / step).round();
        if !(2.0..=1e6).contains(&k) || (std::f64::consts::TAU / k - step).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "grid step {step} does not divide 2π"
            )));
        }
        Self::from_divisor(k as usize)
    }

    pub fn divisor(&self) -> usize {
        self.divisor
    }

    pub fn radians(&self) -> f64 {
        std::f64::consts::TAU / self.divisor as f64
    }

    /// `{0, step, …, 2π − step}`.
    pub fn angles(&self) -> Vec<f64> {
        let step = self.radians();
        (0..self.divisor).map(|i| i as f64 * step).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoccOptimum {
    pub max_value: f64,
    pub max_angles: EulerAngleSet,
    pub min_value: f64,
    pub min_angles: EulerAngleSet,
    /// Mean QFI of the unrotated state.
    pub raw_value: f64,
    /// Spacing of the finest pass that ran.
    pub step_used: f64,
    pub refined: bool,
    pub evaluations: u64,
    /// Results of the first pass alone.
    pub coarse_max: f64,
    pub coarse_min: f64,
}

impl LoccOptimum {
    pub fn max_improved(&self) -> bool {
        self.max_value - self.raw_value > REFINE_TOL
    }

    pub fn min_improved(&self) -> bool {
        self.raw_value - self.min_value > REFINE_TOL
    }

    /// Both directions moved away from the raw value.
    pub fn resolved(&self) -> bool {
        self.max_improved() && self.min_improved()
    }
}

/// Indices of the strict upper triangle of a 4×4 matrix.
const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `ρ` reduced to what the C-matrix needs: pair weights and the single-qubit
/// spin operators in its eigenbasis.
struct RotationEvaluator {
    /// `4 (pᵢ − pⱼ)²/(pᵢ + pⱼ)` per pair; the 4 folds both orderings of the
    /// pair and both bracket terms together.
    weights: [f64; 6],
    /// `⟨i|σ_m⊗I/2|j⟩` and `⟨i|I⊗σ_m/2|j⟩` on the pairs.
    spin_a: [[C64; 6]; 3],
    spin_b: [[C64; 6]; 3],
}

impl RotationEvaluator {
    fn new(rho: &DensityMatrix) -> Self {
        let spec = rho.spectrum();
        let v = &spec.eigenvectors;
        let p = &spec.eigenvalues;
        let mut weights = [0.0; 6];
        for (w, &(i, j)) in weights.iter_mut().zip(&PAIRS) {
            if p[i] + p[j] >= 1e-12 {
                *w = 4.0 * (p[i] - p[j]).powi(2) / (p[i] + p[j]);
            }
        }
        let id = pauli::identity();
        let mut spin_a = [[ZERO; 6]; 3];
        let mut spin_b = [[ZERO; 6]; 3];
        for (m, sigma) in pauli::all().iter().enumerate() {
            let a = &(&v.dagger() * &kron(sigma, &id).scale_real(0.5)) * v;
            let b = &(&v.dagger() * &kron(&id, sigma).scale_real(0.5)) * v;
            for (n, &(i, j)) in PAIRS.iter().enumerate() {
                spin_a[m][n] = a[(i, j)];
                spin_b[m][n] = b[(i, j)];
            }
        }
        Self {
            weights,
            spin_a,
            spin_b,
        }
    }

    /// `Σ_m R_km S_m` for each axis `k`.
    fn rotate(spin: &[[C64; 6]; 3], r: &[[f64; 3]; 3]) -> [[C64; 6]; 3] {
        let mut out = [[ZERO; 6]; 3];
        for k in 0..3 {
            for m in 0..3 {
                for n in 0..6 {
                    out[k][n] += spin[m][n] * r[k][m];
                }
            }
        }
        out
    }

    fn mean_qfi(&self, part_a: &[[C64; 6]; 3], part_b: &[[C64; 6]; 3]) -> f64 {
        let mut j = [[ZERO; 6]; 3];
        for k in 0..3 {
            for n in 0..6 {
                j[k][n] = part_a[k][n] + part_b[k][n];
            }
        }
        let mut c = [[0.0; 3]; 3];
        for k in 0..3 {
            for l in k..3 {
                let mut s = 0.0;
                for n in 0..6 {
                    s += self.weights[n] * (j[k][n] * j[l][n].conj()).re;
                }
                c[k][l] = s;
                c[l][k] = s;
            }
        }
        symmetric3_max(&c).max(0.0) / PARTICLES
    }
}

/// Mean QFI of `(U_A⊗U_B) ρ (U_A⊗U_B)†` maximized over spin directions, for
/// the rotation given by `angles`.
pub fn rotated_mean_qfi(rho: &DensityMatrix, angles: &EulerAngleSet) -> f64 {
    let eval = RotationEvaluator::new(rho);
    let (ua, ub) = angles.unitaries();
    let a = RotationEvaluator::rotate(&eval.spin_a, &bloch_rotation(&ua));
    let b = RotationEvaluator::rotate(&eval.spin_b, &bloch_rotation(&ub));
    eval.mean_qfi(&a, &b)
}

/// Evaluates every point of the six-angle grid and keeps the extremes.
/// Points are visited in lexicographic order and only a strict improvement
/// replaces the incumbent, so ties go to the smallest angle tuple.
pub fn grid_search(rho: &DensityMatrix, step: GridStep) -> LoccOptimum {
    let eval = RotationEvaluator::new(rho);
    let angles = step.angles();
    let k = angles.len();
    let mut triples = Vec::with_capacity(k * k * k);
    for &a in &angles {
        for &b in &angles {
            for &g in &angles {
                triples.push(([a, b, g], bloch_rotation(&euler_unitary(a, b, g))));
            }
        }
    }
    let rotated_b: Vec<[[C64; 6]; 3]> = triples
        .iter()
        .map(|(_, r)| RotationEvaluator::rotate(&eval.spin_b, r))
        .collect();

    let mut best_max = (f64::NEG_INFINITY, 0, 0);
    let mut best_min = (f64::INFINITY, 0, 0);
    let mut raw = f64::NAN;
    for (ia, (_, ra)) in triples.iter().enumerate() {
        let part_a = RotationEvaluator::rotate(&eval.spin_a, ra);
        for (ib, part_b) in rotated_b.iter().enumerate() {
            let value = eval.mean_qfi(&part_a, part_b);
            if ia == 0 && ib == 0 {
                raw = value;
            }
            if value > best_max.0 {
                best_max = (value, ia, ib);
            }
            if value < best_min.0 {
                best_min = (value, ia, ib);
            }
        }
    }
    let to_set = |ia: usize, ib: usize| {
        let (a, b) = (triples[ia].0, triples[ib].0);
        EulerAngleSet::from_array([a[0], a[1], a[2], b[0], b[1], b[2]])
    };
    LoccOptimum {
        max_value: best_max.0,
        max_angles: to_set(best_max.1, best_max.2),
        min_value: best_min.0,
        min_angles: to_set(best_min.1, best_min.2),
        raw_value: raw,
        step_used: step.radians(),
        refined: false,
        evaluations: (triples.len() * triples.len()) as u64,
        coarse_max: best_max.0,
        coarse_min: best_min.0,
    }
}

/// [`optimize_with_steps`] with the default π/2 then π/3 grids.
pub fn optimize_with_refinement(rho: &DensityMatrix) -> LoccOptimum {
    let coarse = GridStep {
        divisor: DEFAULT_GRID_DIVISOR,
    };
    let fine = GridStep {
        divisor: DEFAULT_REFINE_DIVISOR,
    };
    optimize_with_steps(rho, coarse, fine)
}

/// Searches the coarse grid, and if either extreme stays within
/// [`REFINE_TOL`] of the raw value, searches the fine grid as well and keeps
/// the better extreme of the two passes on each side.
pub fn optimize_with_steps(rho: &DensityMatrix, coarse: GridStep, fine: GridStep) -> LoccOptimum {
    let mut best = grid_search(rho, coarse);
    if best.resolved() {
        return best;
    }
    let second = grid_search(rho, fine);
    if second.max_value > best.max_value {
        best.max_value = second.max_value;
        best.max_angles = second.max_angles;
    }
    if second.min_value < best.min_value {
        best.min_value = second.min_value;
        best.min_angles = second.min_angles;
    }
    best.refined = true;
    best.step_used = fine.radians();
    best.evaluations += second.evaluations;
    best
}
