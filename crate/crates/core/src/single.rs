//! Single-kaon states on the surviving ⊕ final space and their
//! complementarity quantities.
//!
//! The surviving block is propagated by the Wigner–Weisskopf operator
//! `V(t) = sum_i e^{-i lambda_i t} |K_i><~K_i|`, i.e. `tau_ss -> V tau_ss V†`.
//! The final block is kept diagonal in the decay-channel basis (eigenvectors
//! of the decay matrix, slow channel first) and receives exactly what leaves
//! the surviving block, so `Tr tau_ss + Tr tau_ff` stays at 1.

use crate::error::{KaonError, Result};
use crate::linalg::{
    ensure_density, ensure_hermitian, hermitian_part, outer2, real, trace_re, Ket2, Mat2, C64,
};
use crate::physics::{BasisChoice, PhysicalParams};

/// Allowed deviation from unit norm / unit trace for initial states.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Surviving traces at or below this are treated as fully decayed.
pub const DECAYED_TRACE_TOL: f64 = 1e-30;
/// Largest negative `M^2` radicand that is rounded up to zero.
pub const MIXEDNESS_RADICAND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleKaonState {
    surviving: Mat2,
    decayed: Mat2,
    time: f64,
}

impl SingleKaonState {
    /// `|psi><psi|` at `t = 0` with nothing decayed.
    pub fn pure(ket: &Ket2) -> Result<Self> {
        let norm = ket.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(KaonError::NotNormalized(norm));
        }
        Ok(Self {
            surviving: outer2(ket),
            decayed: Mat2::zeros(),
            time: 0.0,
        })
    }

    /// Arbitrary trace-one density matrix at `t = 0`.
    pub fn mixed(tau: Mat2) -> Result<Self> {
        ensure_density(&tau)?;
        let tr = trace_re(&tau);
        if (tr - 1.0).abs() > NORMALIZATION_TOL {
            return Err(KaonError::InvalidTrace(tr));
        }
        Ok(Self {
            surviving: hermitian_part(&tau),
            decayed: Mat2::zeros(),
            time: 0.0,
        })
    }

    /// Raw constructor for already-evolved blocks (used by the integrator).
    pub fn from_blocks(surviving: Mat2, decayed: Mat2, time: f64) -> Result<Self> {
        ensure_hermitian(&surviving)?;
        ensure_hermitian(&decayed)?;
        if !(time.is_finite() && time >= 0.0) {
            return Err(KaonError::NegativeTime(time));
        }
        Ok(Self {
            surviving,
            decayed,
            time,
        })
    }

    /// Surviving block `tau_ss`, strangeness coordinates.
    pub fn surviving(&self) -> &Mat2 {
        &self.surviving
    }

    /// Final block `tau_ff` in decay-channel coordinates (slow, fast).
    pub fn decayed(&self) -> &Mat2 {
        &self.decayed
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn trace_surviving(&self) -> f64 {
        trace_re(&self.surviving)
    }

    pub fn trace_decayed(&self) -> f64 {
        trace_re(&self.decayed)
    }

    /// Same state with the clock reset to zero.
    pub fn rebased(&self) -> Self {
        Self { time: 0.0, ..*self }
    }

    /// Propagates the state forward by `t`.
    pub fn evolve(&self, params: &PhysicalParams, t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(KaonError::NegativeTime(t));
        }
        let v = evolution_operator(params, t);
        let surviving = hermitian_part(&(v * self.surviving * v.adjoint()));

        let coeffs = lifetime_coefficients(params, &self.surviving);
        let (ks, kl) = params.lifetime_states();
        let kets = [ks, kl];
        let lambdas = params.lambdas();
        let mut decayed = self.decayed;
        for (k, channel) in params.decay_channels().iter().enumerate() {
            let proj: [C64; 2] = [
                channel.direction.dotc(&kets[0]),
                channel.direction.dotc(&kets[1]),
            ];
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    let z = C64::i() * (lambdas[i] - lambdas[j].conj());
                    acc += coeffs[(i, j)] * proj[i] * proj[j].conj() * integrated_exp(z, t);
                }
            }
            decayed[(k, k)] += real(channel.rate * acc.re);
        }

        Ok(Self {
            surviving,
            decayed,
            time: self.time + t,
        })
    }

    pub fn predictability(&self, choice: BasisChoice) -> f64 {
        predictability(&self.surviving, choice)
    }

    pub fn coherence(&self, choice: BasisChoice) -> f64 {
        coherence(&self.surviving, choice)
    }

    pub fn single_property(&self, choice: BasisChoice) -> f64 {
        single_property(&self.surviving, choice)
    }

    pub fn mixedness(&self) -> Result<f64> {
        mixedness(&self.surviving)
    }

    pub fn bohr_residual(&self, choice: BasisChoice) -> Result<f64> {
        bohr_residual(&self.surviving, choice)
    }

    /// `(sqrt(S^2 + M^2), Tr tau_ff)`; the two add up to one.
    pub fn info_balance(&self, choice: BasisChoice) -> Result<(f64, f64)> {
        let s = self.single_property(choice);
        let m = self.mixedness()?;
        Ok(((s * s + m * m).sqrt(), self.trace_decayed()))
    }
}

/// `int_0^t e^{-z s} ds`, accurate for small `|z t|`.
fn integrated_exp(z: C64, t: f64) -> C64 {
    let zt = z * t;
    if zt.norm() < 1e-4 {
        real(t) * (real(1.0) - zt / 2.0 + zt * zt / 6.0 - zt * zt * zt / 24.0)
    } else {
        (real(1.0) - (-zt).exp()) / z
    }
}

/// `V(t) = sum_i e^{-i lambda_i t} |K_i><~K_i|` in strangeness coordinates.
pub fn evolution_operator(params: &PhysicalParams, t: f64) -> Mat2 {
    let [ls, ll] = params.lambdas();
    let phases = Ket2::new((-C64::i() * ls * t).exp(), (-C64::i() * ll * t).exp());
    params.lifetime_matrix() * Mat2::from_diagonal(&phases) * params.lifetime_matrix_inverse()
}

/// Coefficients `c_ij` with `tau = sum_ij c_ij |K_i><K_j|`.
pub fn lifetime_coefficients(params: &PhysicalParams, tau: &Mat2) -> Mat2 {
    let inv = params.lifetime_matrix_inverse();
    inv * tau * inv.adjoint()
}

/// `|Tr(sigma_z tau)|`.
pub fn predictability(tau: &Mat2, choice: BasisChoice) -> f64 {
    let (sigma_z, _) = choice.pauli_ops();
    (sigma_z * tau).trace().norm()
}

/// `2 |Tr(sigma_+ tau)|`.
pub fn coherence(tau: &Mat2, choice: BasisChoice) -> f64 {
    let (_, sigma_plus) = choice.pauli_ops();
    2.0 * (sigma_plus * tau).trace().norm()
}

/// `sqrt(P^2 + V^2)`, the length of the (unnormalized) Bloch vector.
pub fn single_property(tau: &Mat2, choice: BasisChoice) -> f64 {
    predictability(tau, choice).hypot(coherence(tau, choice))
}

/// `M = sqrt(2((Tr tau)^2 - Tr(tau^2)))`.
pub fn mixedness(tau: &Mat2) -> Result<f64> {
    let tr = trace_re(tau);
    let purity = (tau * tau).trace().re;
    let radicand = 2.0 * (tr * tr - purity);
    if radicand < -MIXEDNESS_RADICAND_TOL {
        return Err(KaonError::NumericalDomain(format!(
            "negative mixedness radicand {radicand:e}"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// `(S^2 + M^2)/(Tr tau)^2 - 1`; zero for every physical state.
pub fn bohr_residual(tau: &Mat2, choice: BasisChoice) -> Result<f64> {
    let tr = trace_re(tau);
    if tr <= DECAYED_TRACE_TOL {
        return Err(KaonError::FullyDecayed(tr));
    }
    let s = single_property(tau, choice);
    let m = mixedness(tau)?;
    Ok((s * s + m * m) / (tr * tr) - 1.0)
}

/// All single-kaon quantities for one state and basis choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementarityReport {
    pub predictability: f64,
    pub coherence: f64,
    pub single_property: f64,
    pub mixedness: f64,
    pub trace_surviving: f64,
    pub trace_decayed: f64,
    pub basis: BasisChoice,
}

impl ComplementarityReport {
    pub fn evaluate(state: &SingleKaonState, basis: BasisChoice) -> Result<Self> {
        Ok(Self {
            predictability: state.predictability(basis),
            coherence: state.coherence(basis),
            single_property: state.single_property(basis),
            mixedness: state.mixedness()?,
            trace_surviving: state.trace_surviving(),
            trace_decayed: state.trace_decayed(),
            basis,
        })
    }

    /// P, V, S and M divided by the surviving trace (surviving-kaon
    /// normalization). Traces are left as they are.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace_surviving;
        if tr <= DECAYED_TRACE_TOL {
            return Err(KaonError::FullyDecayed(tr));
        }
        Ok(Self {
            predictability: self.predictability / tr,
            coherence: self.coherence / tr,
            single_property: self.single_property / tr,
            mixedness: self.mixedness / tr,
            ..*self
        })
    }

    pub fn bohr_residual(&self) -> f64 {
        let tr = self.trace_surviving;
        (self.single_property.powi(2) + self.mixedness.powi(2)) / (tr * tr) - 1.0
    }
}
