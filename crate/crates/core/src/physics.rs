//! Neutral-kaon parameters and the three bases the rest of the crate works in.
//!
//! All operators are stored in the orthonormal strangeness basis
//! `{K0, K0bar}` = `{(1, 0), (0, 1)}`. The lifetime states `K_S`, `K_L`
//! diagonalize the non-Hermitian effective Hamiltonian and are *not*
//! orthogonal once `epsilon != 0`; their overlap is `delta`.
//!
//! Masses enter only through `delta_m = m_L - m_S`, so `m_S = 0` throughout.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use nalgebra::{RowVector2, Vector3};

use crate::error::{KaonError, Result};
use crate::linalg::{c, ensure_hermitian, hermitian_eigenpairs, real, trace_re, Ket2, Mat2, C64};

/// Magnitude of epsilon used when nothing else is configured.
pub const EPSILON_MAGNITUDE: f64 = 2.28e-3;
/// Phase of epsilon used when nothing else is configured.
pub const EPSILON_PHASE: f64 = FRAC_PI_4;
/// `gamma_S / gamma_L` for the default parameter set.
pub const GAMMA_RATIO: f64 = 600.0;
/// `delta_m / gamma_S` for the default parameter set.
pub const DELTA_M_RATIO: f64 = 0.5;

/// Smallest `1 - delta^2` for which the lifetime basis is still usable.
const MIN_BASIS_GAP: f64 = 1e-10;

/// Physical constants of the neutral kaon system plus everything derived
/// from them. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    gamma_s: f64,
    gamma_l: f64,
    delta_m: f64,
    epsilon: C64,
    p: C64,
    q: C64,
    norm: f64,
    delta: f64,
    gamma_bar: f64,
    lambda_s: C64,
    lambda_l: C64,
}

impl PhysicalParams {
    /// Validates the rates and computes the derived constants.
    ///
    /// Degenerate lifetimes (`gamma_l == gamma_s`) are accepted; the
    /// complementarity relations do not need a rate hierarchy.
    pub fn new(gamma_s: f64, gamma_l: f64, delta_m: f64, epsilon: C64) -> Result<Self> {
        if !(gamma_s.is_finite() && gamma_s > 0.0) {
            return Err(KaonError::ParameterDomain(format!(
                "gamma_S must be positive and finite, got {gamma_s}"
            )));
        }
        if !(gamma_l.is_finite() && gamma_l > 0.0) {
            return Err(KaonError::ParameterDomain(format!(
                "gamma_L must be positive and finite, got {gamma_l}"
            )));
        }
        if gamma_l > gamma_s {
            return Err(KaonError::ParameterDomain(format!(
                "gamma_L ({gamma_l}) exceeds gamma_S ({gamma_s})"
            )));
        }
        if !delta_m.is_finite() {
            return Err(KaonError::ParameterDomain(format!(
                "delta_m is not finite: {delta_m}"
            )));
        }
        if !(epsilon.re.is_finite() && epsilon.im.is_finite()) {
            return Err(KaonError::ParameterDomain(format!(
                "epsilon is not finite: {epsilon}"
            )));
        }

        let p = real(1.0) + epsilon;
        let q = real(1.0) - epsilon;
        let norm_sq = p.norm_sqr() + q.norm_sqr();
        // |p|^2 - |q|^2 = 4 Re(epsilon), without the cancellation.
        let delta = 4.0 * epsilon.re / norm_sq;
        let gap = 1.0 - delta * delta;
        if gap < MIN_BASIS_GAP {
            return Err(KaonError::NearSingularBasis(gap));
        }

        Ok(Self {
            gamma_s,
            gamma_l,
            delta_m,
            epsilon,
            p,
            q,
            norm: norm_sq.sqrt(),
            delta,
            gamma_bar: 0.5 * (gamma_s + gamma_l),
            lambda_s: c(0.0, -0.5 * gamma_s),
            lambda_l: c(delta_m, -0.5 * gamma_l),
        })
    }

    /// Rates in units of `gamma_S`, with `gamma_L = gamma_S / gamma_ratio`,
    /// `delta_m = delta_m_ratio * gamma_S` and `epsilon = mag * e^{i phase}`.
    pub fn from_ratios(
        gamma_s: f64,
        gamma_ratio: f64,
        delta_m_ratio: f64,
        epsilon_mag: f64,
        epsilon_phase: f64,
    ) -> Result<Self> {
        if !(gamma_ratio.is_finite() && gamma_ratio > 0.0) {
            return Err(KaonError::ParameterDomain(format!(
                "gamma ratio must be positive, got {gamma_ratio}"
            )));
        }
        if !(epsilon_mag.is_finite() && epsilon_mag >= 0.0) {
            return Err(KaonError::ParameterDomain(format!(
                "epsilon magnitude must be nonnegative, got {epsilon_mag}"
            )));
        }
        Self::new(
            gamma_s,
            gamma_s / gamma_ratio,
            delta_m_ratio * gamma_s,
            C64::from_polar(epsilon_mag, epsilon_phase),
        )
    }

    /// Same rates, different CP-violation parameter.
    pub fn with_epsilon(&self, epsilon: C64) -> Result<Self> {
        Self::new(self.gamma_s, self.gamma_l, self.delta_m, epsilon)
    }

    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }

    pub fn gamma_l(&self) -> f64 {
        self.gamma_l
    }

    pub fn delta_m(&self) -> f64 {
        self.delta_m
    }

    pub fn epsilon(&self) -> C64 {
        self.epsilon
    }

    pub fn p(&self) -> C64 {
        self.p
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    /// `N = sqrt(|p|^2 + |q|^2)`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Overlap `<K_S|K_L>`; real for this parameterization.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Mean width `(gamma_S + gamma_L) / 2`.
    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    pub fn lambda_s(&self) -> C64 {
        self.lambda_s
    }

    pub fn lambda_l(&self) -> C64 {
        self.lambda_l
    }

    /// `[lambda_S, lambda_L]`, indexed like the lifetime basis.
    pub fn lambdas(&self) -> [C64; 2] {
        [self.lambda_s, self.lambda_l]
    }

    pub fn rates(&self) -> [f64; 2] {
        [self.gamma_s, self.gamma_l]
    }

    /// `K_S` and `K_L` as unit kets in strangeness coordinates.
    pub fn lifetime_states(&self) -> (Ket2, Ket2) {
        let n = real(self.norm);
        let ks = Ket2::new(self.p / n, -self.q / n);
        let kl = Ket2::new(self.p / n, self.q / n);
        (ks, kl)
    }

    /// Matrix whose columns are `K_S` and `K_L`. Maps lifetime coefficients
    /// to strangeness coordinates.
    pub fn lifetime_matrix(&self) -> Mat2 {
        let (ks, kl) = self.lifetime_states();
        Mat2::from_columns(&[ks, kl])
    }

    /// Inverse of [`Self::lifetime_matrix`]; its rows are the dual bras.
    pub fn lifetime_matrix_inverse(&self) -> Mat2 {
        // det = 2pq / N^2, nonzero whenever 1 - delta^2 > 0.
        let b = self.lifetime_matrix();
        let det = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)];
        Mat2::new(b[(1, 1)], -b[(0, 1)], -b[(1, 0)], b[(0, 0)]) / det
    }

    /// Dual bras `<~K_S|`, `<~K_L|` with `<~K_i|K_j> = delta_ij`.
    pub fn dual_lifetime_states(&self) -> (RowVector2<C64>, RowVector2<C64>) {
        let inv = self.lifetime_matrix_inverse();
        (inv.row(0).into_owned(), inv.row(1).into_owned())
    }

    /// `H_eff = sum_i lambda_i |K_i><~K_i|` in strangeness coordinates.
    pub fn effective_hamiltonian(&self) -> Mat2 {
        let b = self.lifetime_matrix();
        let diag = Mat2::from_diagonal(&Ket2::new(self.lambda_s, self.lambda_l));
        b * diag * self.lifetime_matrix_inverse()
    }

    /// Mass matrix `H = (H_eff + H_eff†)/2`.
    pub fn mass_matrix(&self) -> Mat2 {
        let h = self.effective_hamiltonian();
        (h + h.adjoint()) * real(0.5)
    }

    /// Decay matrix `Gamma = i (H_eff - H_eff†)`, so `H_eff = H - (i/2) Gamma`.
    pub fn decay_matrix(&self) -> Mat2 {
        let h = self.effective_hamiltonian();
        (h - h.adjoint()) * C64::i()
    }

    /// Spectral decomposition of the decay matrix, ascending by rate. At
    /// `epsilon = 0` these are `(gamma_L, K_L)` then `(gamma_S, K_S)`.
    pub fn decay_channels(&self) -> [DecayChannel; 2] {
        let pairs = hermitian_eigenpairs(&self.decay_matrix());
        [
            DecayChannel {
                rate: pairs[0].0,
                direction: pairs[0].1,
            },
            DecayChannel {
                rate: pairs[1].0,
                direction: pairs[1].1,
            },
        ]
    }

    /// Whether the decay matrix is positive semidefinite, i.e.
    /// `gamma_S gamma_L >= delta^2 (gamma_bar^2 + delta_m^2)`.
    ///
    /// When this fails the surviving-block dynamics are still well defined,
    /// but no completely positive decay map exists: the surviving trace may
    /// rise transiently and decay-sector weights may go negative.
    pub fn satisfies_unitarity_bound(&self) -> bool {
        self.gamma_s * self.gamma_l
            >= self.delta * self.delta * (self.gamma_bar.powi(2) + self.delta_m.powi(2))
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::from_ratios(
            1.0,
            GAMMA_RATIO,
            DELTA_M_RATIO,
            EPSILON_MAGNITUDE,
            EPSILON_PHASE,
        )
        .expect("default kaon parameters are valid")
    }
}

/// One eigen-direction of the decay matrix and its rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayChannel {
    pub rate: f64,
    pub direction: Ket2,
}

/// Which Pauli set predictability and coherence are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BasisChoice {
    #[default]
    Strangeness,
    Cp,
}

impl BasisChoice {
    pub const ALL: [BasisChoice; 2] = [BasisChoice::Strangeness, BasisChoice::Cp];

    /// Orthonormal pair `(up, down)` defining `sigma_z = |up><up| - |down><down|`
    /// and `sigma_+ = |up><down|`.
    pub fn basis(self) -> (Ket2, Ket2) {
        match self {
            BasisChoice::Strangeness => (
                Ket2::new(real(1.0), real(0.0)),
                Ket2::new(real(0.0), real(1.0)),
            ),
            // K1 = (K0 - K0bar)/sqrt2, K2 = (K0 + K0bar)/sqrt2.
            BasisChoice::Cp => (
                Ket2::new(real(FRAC_1_SQRT_2), real(-FRAC_1_SQRT_2)),
                Ket2::new(real(FRAC_1_SQRT_2), real(FRAC_1_SQRT_2)),
            ),
        }
    }

    /// `(sigma_z, sigma_+)` in strangeness coordinates.
    pub fn pauli_ops(self) -> (Mat2, Mat2) {
        let (up, down) = self.basis();
        let sigma_z = up * up.adjoint() - down * down.adjoint();
        let sigma_plus = up * down.adjoint();
        (sigma_z, sigma_plus)
    }

    pub fn name(self) -> &'static str {
        match self {
            BasisChoice::Strangeness => "strangeness",
            BasisChoice::Cp => "cp",
        }
    }
}

impl std::str::FromStr for BasisChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "strangeness" | "s" => Ok(BasisChoice::Strangeness),
            "cp" => Ok(BasisChoice::Cp),
            other => Err(format!(
                "unknown basis '{other}' (expected strangeness or cp)"
            )),
        }
    }
}

/// Trace and Bloch vector of a Hermitian 2x2 matrix, so that
/// `tau = (trace/2) 1 + (1/2) n . sigma`.
pub fn bloch_decompose(tau: &Mat2) -> Result<(f64, Vector3<f64>)> {
    ensure_hermitian(tau)?;
    let trace = trace_re(tau);
    let off = tau[(0, 1)] + tau[(1, 0)].conj();
    let n = Vector3::new(off.re, -off.im, (tau[(0, 0)] - tau[(1, 1)]).re);
    Ok((trace, n))
}

pub fn bloch_reconstruct(trace: f64, n: &Vector3<f64>) -> Mat2 {
    Mat2::new(
        real(0.5 * (trace + n.z)),
        c(0.5 * n.x, -0.5 * n.y),
        c(0.5 * n.x, 0.5 * n.y),
        real(0.5 * (trace - n.z)),
    )
}
