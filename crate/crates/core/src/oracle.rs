//! Independent numerical routes used to cross-check the closed forms:
//! a fixed-step RK4 integration of the master equation, pure-state and
//! flip-spectrum concurrences, and an upper bound on the convex-roof
//! concurrence from sampled pure-state decompositions.

use std::ops::{Add, Mul};

use crate::bipartite::spin_flip;
use crate::error::{KaonError, Result};
use crate::linalg::{ensure_density, hermitian_eigenpairs, real, trace_re, Ket4, Mat2, Mat4, C64};
use crate::physics::PhysicalParams;
use crate::sampling::{random_unitary, seeded};
use crate::single::SingleKaonState;

/// Largest `step * gamma_S` accepted by the integrator.
pub const MAX_STEP_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub step: f64,
    pub max_time: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            max_time: 100.0,
        }
    }
}

impl IntegratorConfig {
    pub fn with_step(step: f64) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }

    fn validate(&self, params: &PhysicalParams) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(KaonError::IntegratorConfig(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if self.step * params.gamma_s() > MAX_STEP_RATE * (1.0 + 1e-12) {
            return Err(KaonError::IntegratorConfig(format!(
                "step {} too large for gamma_S = {} (step * gamma_S must be <= {MAX_STEP_RATE})",
                self.step,
                params.gamma_s()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Blocks {
    ss: Mat2,
    ff: Mat2,
}

impl Add for Blocks {
    type Output = Blocks;

    fn add(self, rhs: Blocks) -> Blocks {
        Blocks {
            ss: self.ss + rhs.ss,
            ff: self.ff + rhs.ff,
        }
    }
}

impl Mul<f64> for Blocks {
    type Output = Blocks;

    fn mul(self, k: f64) -> Blocks {
        Blocks {
            ss: self.ss * real(k),
            ff: self.ff * real(k),
        }
    }
}

/// Generator of the block master equation.
struct MasterEquation {
    hamiltonian: Mat2,
    decay: Mat2,
    /// `(rate, L)` with `L = |e_k><u_k|` mapping surviving to final space.
    jumps: Vec<(f64, Mat2)>,
}

impl MasterEquation {
    fn new(params: &PhysicalParams) -> Self {
        let jumps = params
            .decay_channels()
            .iter()
            .enumerate()
            .map(|(k, ch)| {
                let mut target = crate::linalg::Ket2::zeros();
                target[k] = real(1.0);
                (ch.rate, target * ch.direction.adjoint())
            })
            .collect();
        Self {
            hamiltonian: params.mass_matrix(),
            decay: params.decay_matrix(),
            jumps,
        }
    }

    // d tau_ss = -i[H, tau_ss] - 1/2 {Gamma, tau_ss}
    // d tau_ff = sum_k rate_k L_k tau_ss L_k†
    fn rhs(&self, b: &Blocks) -> Blocks {
        let h = &self.hamiltonian;
        let g = &self.decay;
        let comm = h * b.ss - b.ss * h;
        let anti = g * b.ss + b.ss * g;
        let ss = comm * (-C64::i()) - anti * real(0.5);
        let mut ff = Mat2::zeros();
        for (rate, l) in &self.jumps {
            ff += l * b.ss * l.adjoint() * real(*rate);
        }
        Blocks { ss, ff }
    }

    fn rk4_step(&self, b: Blocks, h: f64) -> Blocks {
        let k1 = self.rhs(&b);
        let k2 = self.rhs(&(b + k1 * (0.5 * h)));
        let k3 = self.rhs(&(b + k2 * (0.5 * h)));
        let k4 = self.rhs(&(b + k3 * h));
        b + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    }
}

/// Integrates the surviving and final blocks over `[0, t]` with classical
/// RK4. The step is shrunk so that an integer number of steps hits `t`.
pub fn integrate_master(
    params: &PhysicalParams,
    state0: &SingleKaonState,
    t: f64,
    config: &IntegratorConfig,
) -> Result<SingleKaonState> {
    config.validate(params)?;
    if !t.is_finite() || t < 0.0 {
        return Err(KaonError::NegativeTime(t));
    }
    if t > config.max_time {
        return Err(KaonError::IntegratorConfig(format!(
            "t = {t} exceeds max_time = {}",
            config.max_time
        )));
    }
    if t == 0.0 {
        return Ok(*state0);
    }
    let eq = MasterEquation::new(params);
    let n = (t / config.step - 1e-9).ceil().max(1.0) as usize;
    let h = t / n as f64;
    let mut b = Blocks {
        ss: *state0.surviving(),
        ff: *state0.decayed(),
    };
    for _ in 0..n {
        b = eq.rk4_step(b, h);
    }
    SingleKaonState::from_blocks(
        crate::linalg::hermitian_part(&b.ss),
        crate::linalg::hermitian_part(&b.ff),
        state0.time() + t,
    )
}

/// `|<psi*|sigma_y ⊗ sigma_y|psi>| / <psi|psi>` for a pair state in an
/// orthonormal product basis.
pub fn pure_concurrence_overlap(psi: &Ket4) -> Result<f64> {
    let norm_sq = psi.norm_squared();
    if !(norm_sq.is_finite() && norm_sq > 0.0) {
        return Err(KaonError::ZeroVector);
    }
    let flipped = spin_flip() * psi;
    Ok(psi.transpose().mul(&flipped)[0].norm() / norm_sq)
}

/// Concurrence from the spectrum of `rho rho~` directly (Schur
/// decomposition of the non-Hermitian product). Loses accuracy for
/// rank-deficient `rho`, where near-zero eigenvalues get square-rooted.
pub fn concurrence_from_flip_spectrum(rho: &Mat4) -> Result<f64> {
    ensure_density(rho)?;
    let y = spin_flip();
    let flipped = y * rho.map(|z| z.conj()) * y;
    let product = rho * flipped;
    let eig = product
        .eigenvalues()
        .ok_or_else(|| KaonError::NumericalDomain("Schur decomposition did not converge".into()))?;
    let mut lambdas: Vec<f64> = eig.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Smallest average pure-state concurrence found over `samples` sampled
/// decompositions of a trace-one `rho`.
///
/// Decompositions are `psi_i = sum_k U_ik sqrt(p_k) |v_k>` for unitary `U`
/// (`rho = sum_k p_k |v_k><v_k|`). The first candidate is the eigen
/// decomposition, half the budget goes to Haar-random `U`, the rest to
/// random perturbations of the best `U` so far. Every candidate is a valid
/// decomposition, so the result never drops below the true concurrence.
pub fn decomposition_upper_bound(rho: &Mat4, samples: usize, seed: u64) -> Result<f64> {
    ensure_density(rho)?;
    let tr = trace_re(rho);
    if (tr - 1.0).abs() > 1e-8 {
        return Err(KaonError::InvalidTrace(tr));
    }
    let mut w = Mat4::zeros();
    for (k, (value, vector)) in hermitian_eigenpairs(rho).iter().enumerate() {
        w.set_column(k, &(vector * real(value.max(0.0).sqrt())));
    }
    // (U X U^T)_ii = psi_i^T Y psi_i.
    let x = w.transpose() * spin_flip() * w;
    let average = |u: &Mat4| -> f64 {
        let m = u * x * u.transpose();
        (0..4).map(|i| m[(i, i)].norm()).sum()
    };

    let mut rng = seeded(seed);
    let mut best_u = Mat4::identity();
    let mut best = average(&best_u);
    let global = samples / 2;
    for _ in 0..global {
        let u: Mat4 = random_unitary(&mut rng);
        let value = average(&u);
        if value < best {
            best = value;
            best_u = u;
        }
    }
    let mut scale = 0.3;
    for _ in global..samples {
        let kick: Mat4 = random_unitary(&mut rng);
        // Unitary close to the identity: QR of 1 + scale * (kick - 1).
        let near = Mat4::identity() + (kick - Mat4::identity()) * real(scale);
        let u = unitary_part(&near) * best_u;
        let value = average(&u);
        if value < best {
            best = value;
            best_u = u;
            scale = (scale * 1.5).min(1.0);
        } else {
            scale = (scale * 0.98).max(1e-6);
        }
    }
    Ok(best)
}

fn unitary_part(m: &Mat4) -> Mat4 {
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..4 {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let mut col = q.column_mut(k);
            col *= d / real(d.norm());
        }
    }
    q
}
