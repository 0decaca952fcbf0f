//! Relative entropy of entanglement by descent over mixtures of product
//! states.
//!
//! The candidate separable state is
//! `σ = (1 − ε) Σₘ wₘ |aₘ⟩⟨aₘ| ⊗ |bₘ⟩⟨bₘ| + ε I/4`. Writing
//! `F(σ) = −tr ρ ln σ`, the gradient of `F` is `−D` with `D` the Fréchet
//! derivative of the matrix logarithm at `σ` applied to `ρ`. In the
//! eigenbasis of `σ`, `D_jk = ρ_jk (ln s_j − ln s_k)/(s_j − s_k)`; `D` is
//! positive semidefinite and `tr σD = 1`.
//!
//! Each sweep rescales the weights by `⟨aₘbₘ|D|aₘbₘ⟩` and moves each factor
//! towards the top eigenvector of `D` contracted with the other factor, with
//! a backtracking step so `F` never increases. Because `F` is convex, the
//! largest product-state expectation of `D` bounds the remaining
//! suboptimality: `F(σ) − F* ≤ max⟨ab|D|ab⟩ − 1`. When that bound is large
//! the lowest-weight component is replaced by the maximizing product state.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::is_separable;
use crate::error::{Error, Result};
use crate::qcore::{herm_eig, relative_entropy, ComplexMatrix, DensityMatrix, C64, ZERO};
use crate::randgen::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReeSolverConfig {
    /// Number of product states in the mixture.
    pub components: usize,
    /// Independent random initializations; the best result is kept.
    pub multistarts: usize,
    pub max_sweeps: usize,
    /// Stop once a sweep improves the objective by less than this (bits).
    pub threshold: f64,
    /// Identity admixture that keeps `S(ρ‖σ)` finite during iteration.
    pub mix: f64,
    /// A start counts as converged once the product-state bound on its
    /// remaining suboptimality drops below this (bits).
    pub gap_tolerance: f64,
}

impl Default for ReeSolverConfig {
    fn default() -> Self {
        Self {
            components: 16,
            multistarts: 5,
            max_sweeps: 10_000,
            threshold: 1e-7,
            mix: 1e-9,
            gap_tolerance: 1e-4,
        }
    }
}

impl ReeSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.components == 0 || self.multistarts == 0 || self.max_sweeps == 0 {
            return Err(Error::Config(
                "REE components, multistarts and max sweeps must be at least 1".into(),
            ));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::Config(format!(
                "REE threshold must be positive, got {}",
                self.threshold
            )));
        }
        if !(self.gap_tolerance.is_finite() && self.gap_tolerance > 0.0) {
            return Err(Error::Config(format!(
                "REE gap tolerance must be positive, got {}",
                self.gap_tolerance
            )));
        }
        if !(0.0..1.0).contains(&self.mix) {
            return Err(Error::Config(format!(
                "REE identity admixture must lie in [0, 1), got {}",
                self.mix
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ReeSolution {
    /// `S(ρ‖σ̄)` in bits.
    pub value: f64,
    /// The separable state `σ̄` attaining `value`.
    pub closest_state: DensityMatrix,
    /// Sweeps spent by the winning start.
    pub iterations: usize,
    pub converged: bool,
    /// Objective improvement of the last sweep of the winning start (bits).
    pub residual: f64,
}

type Vec2 = [C64; 2];

#[derive(Clone)]
struct Mixture {
    weights: Vec<f64>,
    a: Vec<Vec2>,
    b: Vec<Vec2>,
}

impl Mixture {
    fn random(rng: &mut RngStream, components: usize) -> Self {
        let mut unit = || {
            let v = rng.unit_vector(2);
            [v[0], v[1]]
        };
        let mut a = Vec::with_capacity(components);
        let mut b = Vec::with_capacity(components);
        for _ in 0..components {
            a.push(unit());
            b.push(unit());
        }
        Self {
            weights: vec![1.0 / components as f64; components],
            a,
            b,
        }
    }

    fn sigma(&self, mix: f64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        for ((w, a), b) in self.weights.iter().zip(&self.a).zip(&self.b) {
            if *w == 0.0 {
                continue;
            }
            let v = product(a, b);
            let scale = (1.0 - mix) * w;
            for r in 0..4 {
                for c in 0..4 {
                    m[(r, c)] += v[r] * v[c].conj() * scale;
                }
            }
        }
        for i in 0..4 {
            m[(i, i)] += C64::new(mix / 4.0, 0.0);
        }
        m
    }
}

fn product(a: &Vec2, b: &Vec2) -> [C64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

fn normalize2(v: Vec2) -> Option<Vec2> {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    (n > 1e-300 && n.is_finite()).then(|| [v[0] / n, v[1] / n])
}

/// Objective and gradient data at one candidate `σ`.
struct Evaluation {
    /// `−tr ρ ln σ` in nats.
    objective: f64,
    /// `D` in the computational basis.
    d: ComplexMatrix,
}

fn log_divided_difference(x: f64, y: f64) -> f64 {
    let hi = x.max(y);
    if (x - y).abs() <= 1e-9 * hi {
        2.0 / (x + y)
    } else {
        (x.ln() - y.ln()) / (x - y)
    }
}

fn evaluate(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Option<Evaluation> {
    let spec = herm_eig(sigma).ok()?;
    let s: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|&x| x.max(f64::MIN_POSITIVE))
        .collect();
    let u = &spec.eigenvectors;
    let r = &(&u.dagger() * rho) * u;
    let objective = -(0..4).map(|k| r[(k, k)].re * s[k].ln()).sum::<f64>();
    let mut dt = ComplexMatrix::zeros(4, 4);
    for j in 0..4 {
        for k in 0..4 {
            dt[(j, k)] = r[(j, k)] * log_divided_difference(s[j], s[k]);
        }
    }
    let d = dt.conjugate_by(u);
    objective.is_finite().then_some(Evaluation { objective, d })
}

fn expectation(d: &ComplexMatrix, a: &Vec2, b: &Vec2) -> f64 {
    let v = product(a, b);
    d.sandwich(&v, &v).re
}

/// `(I ⊗ ⟨b|) D (I ⊗ |b⟩)`
fn contract_b(d: &ComplexMatrix, b: &Vec2) -> [[C64; 2]; 2] {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in 0..2 {
                for l in 0..2 {
                    acc += b[k].conj() * d[(2 * i + k, 2 * j + l)] * b[l];
                }
            }
            *slot = acc;
        }
    }
    out
}

/// `(⟨a| ⊗ I) D (|a⟩ ⊗ I)`
fn contract_a(d: &ComplexMatrix, a: &Vec2) -> [[C64; 2]; 2] {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in 0..2 {
                for l in 0..2 {
                    acc += a[k].conj() * d[(2 * k + i, 2 * l + j)] * a[l];
                }
            }
            *slot = acc;
        }
    }
    out
}

/// Top eigenvector of a 2×2 Hermitian matrix, phase-aligned with `hint`.
fn top_eigenvector(m: &[[C64; 2]; 2], hint: &Vec2) -> Vec2 {
    let a = m[0][0].re;
    let d = m[1][1].re;
    let b = m[0][1];
    let half_gap = 0.5 * (a - d);
    let radius = (half_gap * half_gap + b.norm_sqr()).sqrt();
    if radius <= 1e-300 {
        return *hint;
    }
    let top = 0.5 * (a + d) + radius;
    // (M − top I) v = 0; pick the better conditioned of the two row equations.
    let v = if (a - top).abs() + b.norm() >= (d - top).abs() + b.norm() && b.norm() > 0.0 {
        [b, C64::new(top - a, 0.0)]
    } else if b.norm() > 0.0 {
        [C64::new(top - d, 0.0), b.conj()]
    } else if a >= d {
        [C64::new(1.0, 0.0), ZERO]
    } else {
        [ZERO, C64::new(1.0, 0.0)]
    };
    let v = normalize2(v).unwrap_or(*hint);
    align_phase(v, hint)
}

fn align_phase(v: Vec2, reference: &Vec2) -> Vec2 {
    let overlap = reference[0].conj() * v[0] + reference[1].conj() * v[1];
    if overlap.norm() > 1e-300 {
        let phase = overlap.conj() / overlap.norm();
        [v[0] * phase, v[1] * phase]
    } else {
        v
    }
}

/// Alternating maximization of `⟨ab|D|ab⟩` from a starting product state.
fn best_product(d: &ComplexMatrix, a0: &Vec2, b0: &Vec2) -> (f64, Vec2, Vec2) {
    let mut a = *a0;
    let mut b = *b0;
    let mut value = expectation(d, &a, &b);
    for _ in 0..50 {
        a = top_eigenvector(&contract_b(d, &b), &a);
        b = top_eigenvector(&contract_a(d, &a), &b);
        let next = expectation(d, &a, &b);
        let done = next - value <= 1e-14 * next.abs().max(1.0);
        value = next;
        if done {
            break;
        }
    }
    (value, a, b)
}

/// Blend of two unit vectors, `normalize((1 − t) from + t to)`.
fn blend(from: &Vec2, to: &Vec2, t: f64) -> Vec2 {
    let to = align_phase(*to, from);
    let v = [
        from[0] * (1.0 - t) + to[0] * t,
        from[1] * (1.0 - t) + to[1] * t,
    ];
    normalize2(v).unwrap_or(*from)
}

struct StartOutcome {
    mixture: Mixture,
    objective: f64,
    sweeps: usize,
    converged: bool,
    residual_bits: f64,
}

fn run_start(rho: &ComplexMatrix, cfg: &ReeSolverConfig, mut mix: Mixture) -> Option<StartOutcome> {
    let m = mix.weights.len();
    let mut eval = evaluate(rho, &mix.sigma(cfg.mix))?;
    let mut residual_bits = f64::INFINITY;
    let mut converged = false;
    let mut sweeps = 0;

    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let d = &eval.d;

        let g: Vec<f64> = (0..m)
            .map(|i| expectation(d, &mix.a[i], &mix.b[i]).max(0.0))
            .collect();
        let mut weights: Vec<f64> = mix.weights.iter().zip(&g).map(|(w, g)| w * g).collect();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            break;
        }
        weights.iter_mut().for_each(|w| *w /= total);

        let mut targets_a = Vec::with_capacity(m);
        let mut targets_b = Vec::with_capacity(m);
        for i in 0..m {
            let a = top_eigenvector(&contract_b(d, &mix.b[i]), &mix.a[i]);
            let b = top_eigenvector(&contract_a(d, &a), &mix.b[i]);
            targets_a.push(a);
            targets_b.push(b);
        }

        let mut accepted: Option<(Mixture, Evaluation)> = None;
        let mut step = 1.0;
        for _ in 0..12 {
            let trial = Mixture {
                weights: mix
                    .weights
                    .iter()
                    .zip(&weights)
                    .map(|(w0, w1)| (1.0 - step) * w0 + step * w1)
                    .collect(),
                a: mix
                    .a
                    .iter()
                    .zip(&targets_a)
                    .map(|(x, y)| blend(x, y, step))
                    .collect(),
                b: mix
                    .b
                    .iter()
                    .zip(&targets_b)
                    .map(|(x, y)| blend(x, y, step))
                    .collect(),
            };
            if let Some(e) = evaluate(rho, &trial.sigma(cfg.mix)) {
                if e.objective < eval.objective {
                    accepted = Some((trial, e));
                    break;
                }
            }
            step *= 0.5;
        }

        let improvement = accepted
            .as_ref()
            .map_or(0.0, |(_, e)| eval.objective - e.objective)
            / LN_2;
        if improvement < cfg.threshold {
            // Stalled: certify with the product-state bound or escape by
            // injecting the maximizer.
            let (mut best, mut best_a, mut best_b) = (f64::NEG_INFINITY, mix.a[0], mix.b[0]);
            for i in 0..m {
                let (v, a, b) = best_product(d, &mix.a[i], &mix.b[i]);
                if v > best {
                    (best, best_a, best_b) = (v, a, b);
                }
            }
            let gap_bits = (best - 1.0) / LN_2;
            if gap_bits <= cfg.gap_tolerance {
                if let Some((t, e)) = accepted {
                    mix = t;
                    eval = e;
                }
                residual_bits = improvement;
                converged = true;
                break;
            }
            let base = accepted.as_ref().map_or(&mix, |(t, _)| t);
            let base_objective = accepted
                .as_ref()
                .map_or(eval.objective, |(_, e)| e.objective);
            if let Some((t, e)) = inject(rho, cfg, base, best_a, best_b) {
                if e.objective < base_objective {
                    accepted = Some((t, e));
                }
            }
        }

        match accepted {
            Some((trial, e)) => {
                residual_bits = (eval.objective - e.objective) / LN_2;
                mix = trial;
                eval = e;
            }
            None => {
                residual_bits = 0.0;
                break;
            }
        }
    }
    Some(StartOutcome {
        mixture: mix,
        objective: eval.objective,
        sweeps,
        converged,
        residual_bits,
    })
}

/// Replaces the lightest component by `|ab⟩` and line-searches its weight.
fn inject(
    rho: &ComplexMatrix,
    cfg: &ReeSolverConfig,
    base: &Mixture,
    a: Vec2,
    b: Vec2,
) -> Option<(Mixture, Evaluation)> {
    let slot = base
        .weights
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)?;
    let mut best: Option<(Mixture, Evaluation)> = None;
    for gamma in [0.5, 0.25, 0.1, 0.03, 0.01, 0.003, 0.001] {
        let mut t = base.clone();
        let freed = t.weights[slot];
        t.weights[slot] = 0.0;
        let rest = 1.0 - freed;
        for w in &mut t.weights {
            *w = if rest > 0.0 {
                *w / rest * (1.0 - gamma)
            } else {
                0.0
            };
        }
        t.weights[slot] = gamma;
        t.a[slot] = a;
        t.b[slot] = b;
        if let Some(e) = evaluate(rho, &t.sigma(cfg.mix)) {
            if best
                .as_ref()
                .map_or(true, |(_, be)| e.objective < be.objective)
            {
                best = Some((t, e));
            }
        }
    }
    best
}

/// Numerically minimized relative entropy of entanglement (bits).
///
/// Separable inputs are their own closest separable state and return 0
/// without iterating.
pub fn ree(rho: &DensityMatrix, cfg: &ReeSolverConfig, rng: &mut RngStream) -> ReeSolution {
    if is_separable(rho) {
        return ReeSolution {
            value: 0.0,
            closest_state: rho.clone(),
            iterations: 0,
            converged: true,
            residual: 0.0,
        };
    }
    let components = cfg.components.max(1);
    let mut best: Option<StartOutcome> = None;
    for _ in 0..cfg.multistarts.max(1) {
        let start = Mixture::random(rng, components);
        if let Some(out) = run_start(rho.matrix(), cfg, start) {
            if best.as_ref().map_or(true, |b| out.objective < b.objective) {
                best = Some(out);
            }
        }
    }

    let fallback = || DensityMatrix::maximally_mixed(4);
    let Some(best) = best else {
        let closest = fallback();
        return ReeSolution {
            value: relative_entropy(rho, &closest),
            closest_state: closest,
            iterations: 0,
            converged: false,
            residual: f64::INFINITY,
        };
    };

    // Polish: drop the identity admixture when the support allows it.
    let mixed = DensityMatrix::new(best.mixture.sigma(cfg.mix)).unwrap_or_else(|_| fallback());
    let pure = DensityMatrix::new(best.mixture.sigma(0.0)).ok();
    let mut closest = mixed;
    let mut value = relative_entropy(rho, &closest);
    if let Some(p) = pure {
        let v = relative_entropy(rho, &p);
        if v <= value && is_separable(&p) {
            closest = p;
            value = v;
        }
    }
    ReeSolution {
        value,
        closest_state: closest,
        iterations: best.sweeps,
        converged: best.converged,
        residual: best.residual_bits,
    }
}
