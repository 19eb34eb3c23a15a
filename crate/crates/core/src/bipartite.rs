//! Kaon pairs: lifetime-basis amplitudes, their surviving 4x4 density,
//! marginals, Wootters concurrence and the bipartite complementarity
//! relation `P_k^2 + V_k^2 + C^2 = (Tr rho_ssss)^2` for pure states.
//!
//! Pair states are written `psi = (1/N0) sum_ij r_ij |K_i> ⊗ |K_j>` with
//! index order `[SS, SL, LS, LL]`, left factor first. Each `r_ij` picks up
//! `e^{-i (lambda_i + lambda_j) t}`; `N0` stays fixed.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{KaonError, Result};
use crate::linalg::{
    ensure_hermitian, hermitian_eigenpairs, kron, kron_ket, outer4, real, trace_out_left,
    trace_out_right, trace_re, Ket4, Mat2, Mat4, C64,
};
use crate::physics::{BasisChoice, PhysicalParams};
use crate::single::{coherence, predictability, DECAYED_TRACE_TOL};

/// Power of `(1 - delta^2)` in the closed-form concurrence. With
/// `delta = <K_S|K_L>` this is exactly `|det B|^2` for the lifetime matrix `B`.
pub const CONCURRENCE_DELTA_EXPONENT: i32 = 1;

/// Eigenvalues of the pair density above `-PSD_TOL` are accepted.
const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// How pair and single quantities are scaled over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Normalization {
    /// Relative to all pairs produced at `t = 0`.
    #[default]
    Raw,
    /// Relative to pairs (or kaons) that survived until `t`.
    Surviving,
}

impl std::str::FromStr for Normalization {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(Normalization::Raw),
            "surviving" => Ok(Normalization::Surviving),
            other => Err(format!(
                "unknown mode '{other}' (expected raw or surviving)"
            )),
        }
    }
}

/// The four strangeness-basis Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellState {
    PsiMinus,
    PsiPlus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiMinus,
        BellState::PsiPlus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    /// Coordinates in `{K0 K0, K0 K0bar, K0bar K0, K0bar K0bar}`.
    pub fn strangeness_vector(self) -> Ket4 {
        let h = real(FRAC_1_SQRT_2);
        let z = real(0.0);
        match self {
            BellState::PsiMinus => Ket4::new(z, h, -h, z),
            BellState::PsiPlus => Ket4::new(z, h, h, z),
            BellState::PhiPlus => Ket4::new(h, z, z, h),
            BellState::PhiMinus => Ket4::new(h, z, z, -h),
        }
    }
}

/// Lifetime-basis amplitudes of a kaon pair, stored at `t = 0` together with
/// the elapsed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteAmplitudes {
    initial: [C64; 4],
    norm0: f64,
    time: f64,
}

impl BipartiteAmplitudes {
    /// Takes `r_ij(0)` as given and fixes `N0` so the strangeness-basis state
    /// has unit norm.
    pub fn from_lifetime(params: &PhysicalParams, coeffs: [C64; 4]) -> Result<Self> {
        let bb = pair_lifetime_matrix(params);
        let norm0 = (bb * Ket4::from(coeffs)).norm();
        if !(norm0.is_finite() && norm0 > 0.0) {
            return Err(KaonError::ZeroVector);
        }
        Ok(Self {
            initial: coeffs,
            norm0,
            time: 0.0,
        })
    }

    /// Re-expresses a strangeness-basis pair state (normalized on the way
    /// in) in lifetime coordinates with `N0 = 1`.
    pub fn from_strangeness(params: &PhysicalParams, psi: &Ket4) -> Result<Self> {
        let norm = psi.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(KaonError::ZeroVector);
        }
        let inv = kron(
            &params.lifetime_matrix_inverse(),
            &params.lifetime_matrix_inverse(),
        );
        let r = inv * (psi / real(norm));
        Ok(Self {
            initial: [r[0], r[1], r[2], r[3]],
            norm0: 1.0,
            time: 0.0,
        })
    }

    /// `(|K0 K0bar> - |K0bar K0>)/sqrt2`.
    pub fn singlet(params: &PhysicalParams) -> Self {
        Self::bell(params, BellState::PsiMinus)
    }

    pub fn bell(params: &PhysicalParams, which: BellState) -> Self {
        Self::from_strangeness(params, &which.strangeness_vector())
            .expect("Bell vectors are unit norm")
    }

    /// All four Bell states, in [`BellState::ALL`] order.
    pub fn bell_states(params: &PhysicalParams) -> [Self; 4] {
        BellState::ALL.map(|b| Self::bell(params, b))
    }

    /// Singlet superposed with `K_S ⊗ K_S`, renormalized at `t = 0` (the
    /// two components are not orthogonal once `epsilon != 0`).
    pub fn singlet_plus_short_short(params: &PhysicalParams) -> Self {
        let (ks, _) = params.lifetime_states();
        let psi =
            (BellState::PsiMinus.strangeness_vector() + kron_ket(&ks, &ks)) * real(FRAC_1_SQRT_2);
        Self::from_strangeness(params, &psi).expect("superposition is nonzero")
    }

    pub fn norm0(&self) -> f64 {
        self.norm0
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn initial_coefficients(&self) -> [C64; 4] {
        self.initial
    }

    /// `r_ij(t)` in `[SS, SL, LS, LL]` order.
    pub fn coefficients(&self, params: &PhysicalParams) -> [C64; 4] {
        self.propagated(params, self.time, self.time)
    }

    /// Coefficients with the left kaon propagated by `t_left` and the right
    /// one by `t_right`.
    fn propagated(&self, params: &PhysicalParams, t_left: f64, t_right: f64) -> [C64; 4] {
        let lambdas = params.lambdas();
        let mut out = self.initial;
        for i in 0..2 {
            for j in 0..2 {
                let phase = -C64::i() * (lambdas[i] * t_left + lambdas[j] * t_right);
                out[2 * i + j] *= phase.exp();
            }
        }
        out
    }

    pub fn evolve(&self, t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(KaonError::NegativeTime(t));
        }
        Ok(Self {
            time: self.time + t,
            ..*self
        })
    }

    /// `psi(t)` in strangeness ⊗ strangeness coordinates (not renormalized).
    pub fn strangeness_vector(&self, params: &PhysicalParams) -> Ket4 {
        self.vector_from(params, self.coefficients(params))
    }

    fn vector_from(&self, params: &PhysicalParams, coeffs: [C64; 4]) -> Ket4 {
        pair_lifetime_matrix(params) * Ket4::from(coeffs) / real(self.norm0)
    }

    /// `r r† / N0^2` read as if the lifetime basis were orthonormal. Not a
    /// physical density for `delta != 0`; its concurrence is the
    /// lifetime-coordinate value that the `(1 - delta^2)` factor corrects.
    pub fn lifetime_density(&self, params: &PhysicalParams) -> Mat4 {
        let r = Ket4::from(self.coefficients(params)) / real(self.norm0);
        outer4(&r)
    }

    /// Surviving pair density plus the weights of the three decayed sectors.
    pub fn to_density(&self, params: &PhysicalParams) -> BipartiteState {
        let t = self.time;
        let both = self.strangeness_vector(params).norm_squared();
        let left = self
            .vector_from(params, self.propagated(params, t, 0.0))
            .norm_squared();
        let right = self
            .vector_from(params, self.propagated(params, 0.0, t))
            .norm_squared();
        BipartiteState {
            rho: outer4(&self.strangeness_vector(params)),
            decayed_weights: [left - both, right - both, 1.0 - left - right + both],
            time: t,
        }
    }
}

/// `B ⊗ B`: lifetime pair coefficients to strangeness pair coordinates.
pub fn pair_lifetime_matrix(params: &PhysicalParams) -> Mat4 {
    let b = params.lifetime_matrix();
    kron(&b, &b)
}

/// Pair state restricted to the both-survived sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteState {
    rho: Mat4,
    /// `[left survives & right decayed, left decayed & right survives, both decayed]`.
    decayed_weights: [f64; 3],
    time: f64,
}

impl BipartiteState {
    pub fn new(rho: Mat4, decayed_weights: [f64; 3], time: f64) -> Result<Self> {
        ensure_hermitian(&rho)?;
        Ok(Self {
            rho,
            decayed_weights,
            time,
        })
    }

    pub fn rho(&self) -> &Mat4 {
        &self.rho
    }

    pub fn decayed_weights(&self) -> [f64; 3] {
        self.decayed_weights
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn trace_surviving(&self) -> f64 {
        trace_re(&self.rho)
    }

    pub fn total_trace(&self) -> f64 {
        self.trace_surviving() + self.decayed_weights.iter().sum::<f64>()
    }

    pub fn reduced(&self, side: Side) -> Mat2 {
        reduced_state(&self.rho, side)
    }

    pub fn concurrence(&self, normalization: Normalization) -> Result<f64> {
        concurrence(&self.rho, normalization)
    }
}

/// Marginal of one kaon: the other one is traced out.
pub fn reduced_state(rho: &Mat4, side: Side) -> Mat2 {
    match side {
        Side::Left => trace_out_right(rho),
        Side::Right => trace_out_left(rho),
    }
}

/// `sigma_y ⊗ sigma_y` in a product basis.
pub fn spin_flip() -> Mat4 {
    let one = real(1.0);
    let z = real(0.0);
    Mat4::new(
        z, z, z, -one, //
        z, z, one, z, //
        z, one, z, z, //
        -one, z, z, z,
    )
}

/// Wootters concurrence of a (possibly unnormalized) two-qubit density in an
/// orthonormal product basis.
///
/// The `lambda_i` are the singular values of `W^T (sigma_y ⊗ sigma_y) W` for
/// any `rho = W W†`, which equal the square roots of the eigenvalues of
/// `rho rho~` without taking square roots of near-zero eigenvalues. With
/// [`Normalization::Raw`] the result scales linearly with `rho`.
pub fn concurrence(rho: &Mat4, normalization: Normalization) -> Result<f64> {
    ensure_hermitian(rho)?;
    let pairs = hermitian_eigenpairs(rho);
    let lowest = pairs[0].0;
    if lowest < -PSD_TOL {
        return Err(KaonError::NotPositive(lowest));
    }
    let trace = trace_re(rho);
    let scale = match normalization {
        Normalization::Raw => 1.0,
        Normalization::Surviving => {
            if trace <= DECAYED_TRACE_TOL {
                return Err(KaonError::FullyDecayed(trace));
            }
            1.0 / trace
        }
    };
    let top = pairs[3].0.max(0.0);
    let cutoff = 64.0 * f64::EPSILON * top;
    let mut w = Mat4::zeros();
    for (k, (value, vector)) in pairs.iter().enumerate() {
        if *value > cutoff {
            w.set_column(k, &(vector * real(value.sqrt())));
        }
    }
    let x = w.transpose() * spin_flip() * w;
    let mut sv: Vec<f64> = x.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let value = sv[0] - sv[1] - sv[2] - sv[3];
    Ok(scale * value.max(0.0))
}

/// `(1 - delta^2)^k 2 |r_SS r_LL - r_SL r_LS| / N0^2` at the amplitudes'
/// current time.
pub fn closed_form_concurrence(params: &PhysicalParams, amps: &BipartiteAmplitudes) -> f64 {
    let r = amps.coefficients(params);
    let gap = (1.0 - params.delta().powi(2)).powi(CONCURRENCE_DELTA_EXPONENT);
    gap * 2.0 * (r[0] * r[3] - r[1] * r[2]).norm() / amps.norm0().powi(2)
}

/// `[P_k^2 + V_k^2 + C^2] / (Tr rho)^2 - 1` for marginal `k`. Zero for pure
/// pair states; nonpositive for mixed ones since `C <= M(rho_k)`.
pub fn jakob_bergou_residual(
    state: &BipartiteState,
    side: Side,
    choice: BasisChoice,
) -> Result<f64> {
    let tr = state.trace_surviving();
    if tr <= DECAYED_TRACE_TOL {
        return Err(KaonError::FullyDecayed(tr));
    }
    let marginal = state.reduced(side);
    let p = predictability(&marginal, choice);
    let v = coherence(&marginal, choice);
    let c = state.concurrence(Normalization::Raw)?;
    Ok((p * p + v * v + c * c) / (tr * tr) - 1.0)
}

/// `C(rho(t0 + t)) - C_lifetime(t0) (1 - delta^2)^k e^{-2 gamma_bar t}`,
/// both concurrences from [`concurrence`]; the second one is taken on the
/// lifetime-coordinate density.
pub fn concurrence_decay_residual(
    params: &PhysicalParams,
    amps: &BipartiteAmplitudes,
    t: f64,
) -> Result<f64> {
    let later = amps.evolve(t)?.to_density(params);
    let c_later = later.concurrence(Normalization::Raw)?;
    let c_start = concurrence(&amps.lifetime_density(params), Normalization::Raw)?;
    let gap = (1.0 - params.delta().powi(2)).powi(CONCURRENCE_DELTA_EXPONENT);
    Ok(c_later - c_start * gap * (-2.0 * params.gamma_bar() * t).exp())
}
