//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! For the ≤ 8×8 matrices used here Jacobi is both fast and accurate to a
//! few ulps of the Frobenius norm, including for tiny eigenvalues, which the
//! entropy and QFI formulas are sensitive to.

use crate::error::{Error, Result};
use crate::qcore::matrix::{ComplexMatrix, C64, ONE, ZERO};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.column(i)
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|x| x)
    }

    /// `V diag(f(λ)) V†`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += v[(r, k)] * v[(c, k)].conj() * fl[k];
                }
                out[(r, c)] = acc;
            }
        }
        out
    }
}

/// Full eigendecomposition of a Hermitian matrix. The input is replaced by
/// its Hermitian part `(M + M†)/2` first.
pub fn herm_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "eigendecomposition of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    let tol = f64::EPSILON * f64::EPSILON * scale * scale;
    let mut converged = n < 2 || scale == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_sqr(&a) <= tol;
    }
    if !converged {
        return Err(Error::EigenNonConvergence {
            sweeps,
            input: Box::new(m.clone()),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_sqr(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s
}

/// Annihilates `a[p][q]` with the unitary `G` acting on coordinates `p, q`:
/// `A ← G† A G`, `V ← V G`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Below this the rotation angle underflows and the update is a no-op.
    if mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.rows();
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * g_pp + arq * g_qp;
        a[(r, q)] = arp * g_pq + arq * g_qq;
    }
    for col in 0..n {
        let apc = a[(p, col)];
        let aqc = a[(q, col)];
        a[(p, col)] = g_pp.conj() * apc + g_qp.conj() * aqc;
        a[(q, col)] = g_pq.conj() * apc + g_qq.conj() * aqc;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * g_pp + vrq * g_qp;
        v[(r, q)] = vrp * g_pq + vrq * g_qq;
    }
}

/// Eigenvalues of a real symmetric 3×3 matrix together with the unit
/// eigenvector of the largest one, via the complex solver.
pub(crate) fn symmetric3_top(m: &[[f64; 3]; 3]) -> Result<(f64, [f64; 3])> {
    let cm = ComplexMatrix::from_fn(3, 3, |r, c| ONE * m[r][c]);
    let spec = herm_eig(&cm)?;
    let col = spec.vector(0);
    // A real symmetric input keeps every rotation real up to a sign, but
    // strip any residual global phase before taking the real part.
    let pivot = col.iter().copied().fold(
        ZERO,
        |best, z| if z.norm() > best.norm() { z } else { best },
    );
    let unphase = if pivot.norm() > 0.0 {
        pivot.conj() / pivot.norm()
    } else {
        ONE
    };
    let mut vec = [0.0; 3];
    for (dst, z) in vec.iter_mut().zip(&col) {
        *dst = (z * unphase).re;
    }
    let norm = vec.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut vec {
        *x /= norm;
    }
    Ok((spec.eigenvalues[0], vec))
}

/// Largest eigenvalue of a real symmetric 3×3 matrix by cyclic Jacobi.
pub(crate) fn symmetric3_max(m: &[[f64; 3]; 3]) -> f64 {
    let mut a = *m;
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum();
    for _ in 0..MAX_SWEEPS {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if off <= f64::EPSILON * f64::EPSILON * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let tau = s / (1.0 + c);
            a[p][p] -= t * apq;
            a[q][q] += t * apq;
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            let r = 3 - p - q;
            let (g, h) = (a[r][p], a[r][q]);
            a[r][p] = g - s * (h + g * tau);
            a[r][q] = h + s * (g - h * tau);
            a[p][r] = a[r][p];
            a[q][r] = a[r][q];
        }
    }
    a[0][0].max(a[1][1]).max(a[2][2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::I;

    fn check_decomposition(m: &ComplexMatrix, spec: &Spectrum) {
        let n = m.rows();
        for w in spec.eigenvalues.windows(2) {
            assert!(
                w[0] >= w[1],
                "eigenvalues not descending: {:?}",
                spec.eigenvalues
            );
        }
        assert!(spec.reconstruct().max_abs_diff(&m.hermitian_part()) < 1e-12);
        let gram = &spec.eigenvectors.dagger() * &spec.eigenvectors;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
    }

    #[test]
    fn scaled_identity() {
        let m = ComplexMatrix::identity(4).scale_real(0.25);
        let spec = herm_eig(&m).unwrap();
        assert_eq!(spec.eigenvalues, vec![0.25; 4]);
        check_decomposition(&m, &spec);
    }

    #[test]
    fn diagonal_input_keeps_canonical_basis() {
        let m = ComplexMatrix::diag(&[0.3, 0.5, 0.0, 0.2]);
        let spec = herm_eig(&m).unwrap();
        assert_eq!(spec.eigenvalues, vec![0.5, 0.3, 0.2, 0.0]);
        let expected_index = [1, 0, 3, 2];
        for (col, &idx) in expected_index.iter().enumerate() {
            let v = spec.vector(col);
            assert!((v[idx].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_projector() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        let m = ComplexMatrix::outer(&psi);
        let spec = herm_eig(&m).unwrap();
        let want = [1.0, 0.0, 0.0, 0.0];
        for (got, want) in spec.eigenvalues.iter().zip(want) {
            assert!((got - want).abs() < 1e-15);
        }
        check_decomposition(&m, &spec);
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 2 and 0.
        let m = ComplexMatrix::new(2, 2, vec![ONE, I, -I, ONE]).unwrap();
        let spec = herm_eig(&m).unwrap();
        assert!((spec.eigenvalues[0] - 2.0).abs() < 1e-15);
        assert!(spec.eigenvalues[1].abs() < 1e-15);
        check_decomposition(&m, &spec);
    }

    #[test]
    fn rejects_non_square() {
        assert!(herm_eig(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn symmetric3_top_vector() {
        let m = [[2.0, 0.0, 0.0], [0.0, 5.0, 0.0], [0.0, 0.0, 1.0]];
        let (l, v) = symmetric3_top(&m).unwrap();
        assert!((l - 5.0).abs() < 1e-15);
        assert!((v[1].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric3_max_matches_complex_solver() {
        let cases = [
            [[4.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 4.0]],
            [[1.0, 2.0, 3.0], [2.0, -1.0, 0.5], [3.0, 0.5, 2.0]],
            [[1e-9, 3e-10, 0.0], [3e-10, 2e-9, 1e-10], [0.0, 1e-10, 0.0]],
            [
                [2.0, 1e-13, 1e-13],
                [1e-13, 2.0, 1e-13],
                [1e-13, 1e-13, 2.0],
            ],
        ];
        for m in cases {
            let want = symmetric3_top(&m).unwrap().0;
            let got = symmetric3_max(&m);
            assert!(
                (got - want).abs() <= 1e-14 * want.abs().max(1e-9),
                "{got} vs {want}"
            );
        }
    }
}
