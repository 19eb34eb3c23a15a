//! Initial states by name or as comma-separated complex literals.

use kaon_core::linalg::{real, Ket2};
use kaon_core::{BellState, BipartiteAmplitudes, PhysicalParams};
use num_complex::Complex64;

use crate::error::CliError;

pub const SINGLE_NAMES: &str = "K0, K0bar, KS, KL or two complex amplitudes";
pub const PAIR_NAMES: &str =
    "singlet, psi_plus, phi_plus, phi_minus, fig2 or four complex lifetime amplitudes";

/// Parses `a+bi, c+di, ...`; whitespace inside a literal is ignored.
pub fn parse_complex_list(spec: &str) -> Result<Vec<Complex64>, CliError> {
    spec.split(',')
        .map(|token| {
            let compact: String = token.chars().filter(|ch| !ch.is_whitespace()).collect();
            compact.parse::<Complex64>().map_err(|_| {
                CliError::Usage(format!("'{}' is not a complex literal", token.trim()))
            })
        })
        .collect()
}

/// Single-kaon initial ket in strangeness coordinates. Custom amplitudes
/// are normalized.
pub fn single_initial(params: &PhysicalParams, spec: Option<&str>) -> Result<Ket2, CliError> {
    let spec = spec.unwrap_or("K0").trim();
    let (ks, kl) = params.lifetime_states();
    match spec.to_ascii_lowercase().as_str() {
        "k0" => return Ok(Ket2::new(real(1.0), real(0.0))),
        "k0bar" => return Ok(Ket2::new(real(0.0), real(1.0))),
        "ks" => return Ok(ks),
        "kl" => return Ok(kl),
        _ => {}
    }
    let values = parse_complex_list(spec).map_err(|e| {
        CliError::Usage(format!(
            "bad initial state '{spec}' ({e}); expected {SINGLE_NAMES}"
        ))
    })?;
    if values.len() != 2 {
        return Err(CliError::Usage(format!(
            "single-kaon spec needs 2 amplitudes, got {}",
            values.len()
        )));
    }
    let ket = Ket2::new(values[0], values[1]);
    let norm = ket.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(CliError::Usage(format!(
            "initial state '{spec}' has zero norm"
        )));
    }
    Ok(ket / real(norm))
}

/// Pair initial state. Custom specs are `r_SS, r_SL, r_LS, r_LL`.
pub fn pair_initial(
    params: &PhysicalParams,
    spec: Option<&str>,
) -> Result<BipartiteAmplitudes, CliError> {
    let spec = spec.unwrap_or("singlet").trim();
    let named = match spec.to_ascii_lowercase().as_str() {
        "singlet" | "psi_minus" => Some(BellState::PsiMinus),
        "psi_plus" => Some(BellState::PsiPlus),
        "phi_plus" => Some(BellState::PhiPlus),
        "phi_minus" => Some(BellState::PhiMinus),
        "fig2" => return Ok(BipartiteAmplitudes::singlet_plus_short_short(params)),
        _ => None,
    };
    if let Some(which) = named {
        return Ok(BipartiteAmplitudes::bell(params, which));
    }
    let values = parse_complex_list(spec).map_err(|e| {
        CliError::Usage(format!(
            "bad initial state '{spec}' ({e}); expected {PAIR_NAMES}"
        ))
    })?;
    let coeffs: [Complex64; 4] = values.try_into().map_err(|v: Vec<Complex64>| {
        CliError::Usage(format!("pair spec needs 4 amplitudes, got {}", v.len()))
    })?;
    BipartiteAmplitudes::from_lifetime(params, coeffs)
        .map_err(|e| CliError::Usage(format!("initial state '{spec}': {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use kaon_core::linalg::c;

    #[test]
    fn complex_literals() {
        let v = parse_complex_list("1+2i, -i, 0.5, 3 - 4i").unwrap();
        assert_eq!(
            v,
            vec![c(1.0, 2.0), c(0.0, -1.0), c(0.5, 0.0), c(3.0, -4.0)]
        );
        assert!(parse_complex_list("1+2i,").is_err());
        assert!(parse_complex_list("x").is_err());
    }

    #[test]
    fn named_single_states() {
        let p = PhysicalParams::default();
        assert_eq!(
            single_initial(&p, None).unwrap(),
            Ket2::new(real(1.0), real(0.0))
        );
        assert_eq!(
            single_initial(&p, Some("KS")).unwrap(),
            p.lifetime_states().0
        );
        assert_eq!(single_initial(&p, Some("k0bar")).unwrap()[1], real(1.0));
    }

    #[test]
    fn custom_single_is_normalized() {
        let k = single_initial(&PhysicalParams::default(), Some("3, 4i")).unwrap();
        assert!((k[0] - c(0.6, 0.0)).norm() < 1e-15);
        assert!((k[1] - c(0.0, 0.8)).norm() < 1e-15);
        assert!(single_initial(&PhysicalParams::default(), Some("0, 0")).is_err());
        assert!(single_initial(&PhysicalParams::default(), Some("1, 2, 3")).is_err());
        assert!(single_initial(&PhysicalParams::default(), Some("kaon")).is_err());
    }

    #[test]
    fn pair_specs() {
        let p = PhysicalParams::default();
        assert_eq!(
            pair_initial(&p, None).unwrap(),
            BipartiteAmplitudes::singlet(&p)
        );
        assert!(pair_initial(&p, Some("fig2")).is_ok());
        let custom = pair_initial(&p, Some("0, 1, -1, 0")).unwrap();
        assert_eq!(custom.initial_coefficients()[1], c(1.0, 0.0));
        assert!(pair_initial(&p, Some("1, 2")).is_err());
        assert!(pair_initial(&p, Some("0, 0, 0, 0")).is_err());
    }
}
