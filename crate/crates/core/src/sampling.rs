//! Seeded random states and unitaries.

use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, from_dynamic, real, to_dynamic, Ket2, Ket4, Mat2, Mat4, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

fn ginibre<const R: usize, const C: usize, G: Rng + ?Sized>(rng: &mut G) -> SMatrix<C64, R, C> {
    SMatrix::from_fn(|_, _| gaussian_c64(rng))
}

/// Haar-random unit vector.
pub fn random_ket<const N: usize, G: Rng + ?Sized>(rng: &mut G) -> SVector<C64, N> {
    let v: SVector<C64, N> = ginibre(rng);
    let norm = v.norm();
    v / real(norm)
}

pub fn random_ket2<G: Rng + ?Sized>(rng: &mut G) -> Ket2 {
    random_ket(rng)
}

pub fn random_ket4<G: Rng + ?Sized>(rng: &mut G) -> Ket4 {
    random_ket(rng)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<const N: usize, G: Rng + ?Sized>(rng: &mut G) -> SMatrix<C64, N, N> {
    let qr = to_dynamic(&ginibre::<N, N, G>(rng)).qr();
    let mut q: SMatrix<C64, N, N> = from_dynamic(&qr.q());
    let r = qr.r();
    for k in 0..N {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / real(d.norm())
        } else {
            real(1.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Trace-one density matrix `G G† / Tr(G G†)` with a Ginibre `G` of `rank`
/// columns (clamped to `1..=N`).
pub fn random_density<const N: usize, G: Rng + ?Sized>(
    rng: &mut G,
    rank: usize,
) -> SMatrix<C64, N, N> {
    let rank = rank.clamp(1, N);
    let mut acc = SMatrix::<C64, N, N>::zeros();
    for _ in 0..rank {
        let v: SVector<C64, N> = ginibre(rng);
        acc += v * v.adjoint();
    }
    let tr = acc.trace().re;
    acc / real(tr)
}

pub fn random_density2<G: Rng + ?Sized>(rng: &mut G) -> Mat2 {
    random_density(rng, 2)
}

pub fn random_density4<G: Rng + ?Sized>(rng: &mut G, rank: usize) -> Mat4 {
    random_density(rng, rank)
}

/// Single-kaon initial state: pure or mixed with equal odds.
pub fn random_single_density<G: Rng + ?Sized>(rng: &mut G) -> Mat2 {
    if rng.random_bool(0.5) {
        let k = random_ket2(rng);
        k * k.adjoint()
    } else {
        random_density2(rng)
    }
}

/// Four complex Gaussian lifetime coefficients.
pub fn random_coefficients<G: Rng + ?Sized>(rng: &mut G) -> [C64; 4] {
    [
        gaussian_c64(rng),
        gaussian_c64(rng),
        gaussian_c64(rng),
        gaussian_c64(rng),
    ]
}
