//! Neutral kaons as decaying two-level systems: Wigner–Weisskopf evolution
//! on the surviving ⊕ final space, predictability / coherence / mixedness
//! for single kaons, and concurrence plus the bipartite complementarity
//! relation for kaon pairs.
//!
//! Every density operator lives in the orthonormal strangeness basis
//! `{K0, K0bar}`; the (non-orthogonal) lifetime basis `{K_S, K_L}` only
//! shows up as amplitude coefficients.
//!
//! ```
//! use kaon_core::{BasisChoice, PhysicalParams, SingleKaonState};
//! use kaon_core::linalg::{real, Ket2};
//!
//! let params = PhysicalParams::default();
//! let k0 = SingleKaonState::pure(&Ket2::new(real(1.0), real(0.0))).unwrap();
//! let later = k0.evolve(&params, 2.0).unwrap();
//! assert!(later.bohr_residual(BasisChoice::Cp).unwrap().abs() < 1e-10);
//! ```

#![forbid(unsafe_code)]

pub mod bipartite;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod physics;
pub mod sampling;
pub mod single;

pub use bipartite::{
    closed_form_concurrence, concurrence, concurrence_decay_residual, jakob_bergou_residual,
    reduced_state, BellState, BipartiteAmplitudes, BipartiteState, Normalization, Side,
};
pub use error::{KaonError, Result};
pub use oracle::{
    concurrence_from_flip_spectrum, decomposition_upper_bound, integrate_master,
    pure_concurrence_overlap, IntegratorConfig,
};
pub use physics::{bloch_decompose, bloch_reconstruct, BasisChoice, DecayChannel, PhysicalParams};
pub use single::{ComplementarityReport, SingleKaonState};
