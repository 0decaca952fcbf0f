//! Seed-reproducible random two-qubit density matrices `ρ = V P V†` with a
//! flat spectrum on the probability simplex and a Haar-random eigenbasis.
//!
//! Stream `i` of master seed `s` is ChaCha20 keyed by `seed_from_u64(s)`
//! with stream id `i` (`rand_chacha` 0.3). Uniform doubles take the top 53
//! bits of each `u64`; Gaussians use Box–Muller, consuming two uniforms per
//! pair of normals. Regression fixtures depend on all three choices.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, DensityMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub count: usize,
    pub master_seed: u64,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Config("ensemble count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Deterministic pseudo-random stream.
#[derive(Clone, Debug)]
pub struct RngStream {
    rng: ChaCha20Rng,
    spare_normal: Option<f64>,
}

/// The stream for state `index` under `master_seed`. Streams with different
/// indices never overlap, and the result does not depend on which other
/// streams were derived before.
pub fn derive_stream(master_seed: u64, index: u64) -> RngStream {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    RngStream {
        rng,
        spare_normal: None,
    }
}

impl RngStream {
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - u lies in (0, 1], so the logarithm is finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Complex normal with unit variance split evenly over both parts.
    pub fn next_complex_normal(&mut self) -> C64 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let re = self.next_normal();
        let im = self.next_normal();
        C64::new(re * h, im * h)
    }

    /// Uniformly random unit vector in `C^dim`.
    pub fn unit_vector(&mut self, dim: usize) -> Vec<C64> {
        loop {
            let v: Vec<C64> = (0..dim).map(|_| self.next_complex_normal()).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-300 {
                return v.into_iter().map(|z| z / norm).collect();
            }
        }
    }
}

/// Four probabilities uniformly distributed on the 3-simplex, from the gaps
/// between three sorted uniforms.
pub fn simplex_eigenvalues(rng: &mut RngStream) -> [f64; 4] {
    let mut cuts = [rng.next_f64(), rng.next_f64(), rng.next_f64()];
    cuts.sort_by(f64::total_cmp);
    [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 1.0 - cuts[2]]
}

/// Haar-distributed `dim × dim` unitary.
///
/// Gram–Schmidt on the columns of a complex Ginibre matrix yields the QR
/// factor whose `R` has a positive real diagonal, which is the phase
/// convention that makes `Q` exactly Haar.
pub fn haar_unitary(rng: &mut RngStream, dim: usize) -> ComplexMatrix {
    assert!(dim >= 1, "unitary dimension must be positive");
    let mut g = vec![vec![C64::new(0.0, 0.0); dim]; dim]; // g[col][row]
    for r in 0..dim {
        for col in g.iter_mut() {
            col[r] = rng.next_complex_normal();
        }
    }
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for mut v in g {
        // Modified Gram–Schmidt, applied twice for orthogonality to ~1 ulp.
        for _ in 0..2 {
            for u in &q {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    let data = (0..dim)
        .flat_map(|r| q.iter().map(move |col| col[r]))
        .collect::<Vec<_>>();
    ComplexMatrix::new(dim, dim, data).expect("finite by construction")
}

/// One draw of `ρ = V diag(p) V†`: simplex spectrum first, then the Haar
/// eigenbasis.
pub fn random_density_matrix(rng: &mut RngStream) -> DensityMatrix {
    let p = simplex_eigenvalues(rng);
    let v = haar_unitary(rng, 4);
    let m = ComplexMatrix::diag(&p).conjugate_by(&v);
    DensityMatrix::new(m).expect("V P V† is a valid density matrix")
}

/// State `index` of the ensemble; independent of every other index.
pub fn ensemble_state(master_seed: u64, index: usize) -> (DensityMatrix, RngStream) {
    let mut rng = derive_stream(master_seed, index as u64);
    let rho = random_density_matrix(&mut rng);
    (rho, rng)
}

pub fn generate_ensemble(cfg: &EnsembleConfig) -> Result<Vec<DensityMatrix>> {
    cfg.validate()?;
    Ok((0..cfg.count)
        .into_par_iter()
        .map(|i| ensemble_state(cfg.master_seed, i).0)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::herm_eig;

    #[test]
    fn streams_are_deterministic() {
        let mut a = derive_stream(42, 0);
        let mut b = derive_stream(42, 0);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_differ_by_index_and_seed() {
        assert_ne!(
            derive_stream(42, 0).next_u64(),
            derive_stream(42, 1).next_u64()
        );
        assert_ne!(
            derive_stream(42, 0).next_u64(),
            derive_stream(43, 0).next_u64()
        );
    }

    #[test]
    fn stream_is_independent_of_derivation_order() {
        let _warmup: Vec<_> = (0..7).map(|i| derive_stream(42, i).next_u64()).collect();
        let (late, _) = ensemble_state(42, 7);
        let (fresh, _) = ensemble_state(42, 7);
        assert_eq!(late.matrix(), fresh.matrix());
    }

    #[test]
    fn uniform_range() {
        let mut rng = derive_stream(5, 5);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn normal_moments() {
        let mut rng = derive_stream(9, 0);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn simplex_membership() {
        let mut rng = derive_stream(1, 0);
        for _ in 0..1000 {
            let p = simplex_eigenvalues(&mut rng);
            assert!(p.iter().all(|&x| x >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn simplex_moments() {
        let mut rng = derive_stream(3, 0);
        let n = 100_000;
        let mut sum = [0.0; 4];
        let mut sq = 0.0;
        for _ in 0..n {
            let p = simplex_eigenvalues(&mut rng);
            for (s, x) in sum.iter_mut().zip(p) {
                *s += x;
            }
            sq += p[0] * p[0];
        }
        for s in sum {
            assert!((s / n as f64 - 0.25).abs() < 0.01);
        }
        let mean0 = sum[0] / n as f64;
        let var0 = sq / n as f64 - mean0 * mean0;
        // Dirichlet(1,1,1,1) marginal: p(1 − p)/(n + 1) with p = 1/4, n = 4.
        assert!((var0 - 3.0 / 80.0).abs() < 0.003, "var {var0}");
    }

    #[test]
    fn haar_unitarity() {
        let mut rng = derive_stream(11, 0);
        for dim in 1..=5 {
            for _ in 0..20 {
                assert!(haar_unitary(&mut rng, dim).unitarity_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn haar_mean_squared_modulus() {
        let mut rng = derive_stream(13, 0);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| haar_unitary(&mut rng, 4)[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.25).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn haar_dim2_marginal_is_uniform() {
        let mut rng = derive_stream(17, 0);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n)
            .map(|_| haar_unitary(&mut rng, 2)[(0, 0)].norm_sqr())
            .collect();
        xs.sort_by(f64::total_cmp);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let lo = i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64;
                (x - lo).abs().max((hi - x).abs())
            })
            .fold(0.0, f64::max);
        // Asymptotic 1% critical value 1.628/√n.
        assert!(ks < 1.628 / (n as f64).sqrt(), "KS statistic {ks}");
    }

    #[test]
    fn density_matrix_keeps_drawn_spectrum() {
        for i in 0..50 {
            let mut rng = derive_stream(21, i);
            let mut p = simplex_eigenvalues(&mut rng);
            let mut rng = derive_stream(21, i);
            let rho = random_density_matrix(&mut rng);
            p.sort_by(|a, b| b.total_cmp(a));
            let spec = herm_eig(rho.matrix()).unwrap();
            for (a, b) in spec.eigenvalues.iter().zip(p) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(!rho.was_clamped());
        }
    }

    #[test]
    fn ensemble_reproducible() {
        let cfg = EnsembleConfig {
            count: 8,
            master_seed: 99,
        };
        let a = generate_ensemble(&cfg).unwrap();
        let b = generate_ensemble(&cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.matrix(), y.matrix());
        }
        assert!(generate_ensemble(&EnsembleConfig {
            count: 0,
            master_seed: 1
        })
        .is_err());
    }
}
