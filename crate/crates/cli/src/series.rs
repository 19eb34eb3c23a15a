//! `single`, `bipartite` and `params`: CSV time series and the resolved
//! parameter set.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use kaon_core::single::{coherence, predictability};
use kaon_core::{
    closed_form_concurrence, jakob_bergou_residual, ComplementarityReport, Normalization, Side,
    SingleKaonState,
};

use crate::config::{OutputTarget, RunConfig};
use crate::error::CliError;
use crate::states::{pair_initial, single_initial};

pub const SINGLE_HEADER: [&str; 8] = [
    "t",
    "P",
    "V",
    "S",
    "M",
    "trace_ss",
    "trace_ff",
    "bohr_residual",
];
pub const PAIR_HEADER: [&str; 7] = [
    "t",
    "P_left",
    "V_left",
    "C_closed",
    "C_wootters",
    "trace_ssss",
    "jb_residual",
];

pub fn open_output(target: &OutputTarget) -> Result<Box<dyn Write>, CliError> {
    Ok(match target {
        OutputTarget::Stdout => Box::new(BufWriter::new(io::stdout().lock())),
        OutputTarget::File(path) => Box::new(BufWriter::new(File::create(path)?)),
    })
}

/// Full double precision, `.` as decimal separator regardless of locale.
fn write_row(out: &mut dyn Write, values: &[f64]) -> io::Result<()> {
    let cells: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
    writeln!(out, "{}", cells.join(","))
}

pub fn single_rows(cfg: &RunConfig) -> Result<Vec<[f64; 8]>, CliError> {
    let params = cfg.params()?;
    let start = SingleKaonState::pure(&single_initial(&params, cfg.initial.as_deref())?)?;
    cfg.time_grid()
        .into_iter()
        .map(|t| {
            let state = start.evolve(&params, t)?;
            let raw = ComplementarityReport::evaluate(&state, cfg.basis)?;
            let shown = match cfg.mode {
                Normalization::Raw => raw,
                Normalization::Surviving => raw.normalized()?,
            };
            Ok([
                t,
                shown.predictability,
                shown.coherence,
                shown.single_property,
                shown.mixedness,
                raw.trace_surviving,
                raw.trace_decayed,
                state.bohr_residual(cfg.basis)?,
            ])
        })
        .collect()
}

pub fn pair_rows(cfg: &RunConfig) -> Result<Vec<[f64; 7]>, CliError> {
    let params = cfg.params()?;
    let start = pair_initial(&params, cfg.initial.as_deref())?;
    cfg.time_grid()
        .into_iter()
        .map(|t| {
            let amps = start.evolve(t)?;
            let state = amps.to_density(&params);
            let tr = state.trace_surviving();
            let marginal = state.reduced(Side::Left);
            let scale = match cfg.mode {
                Normalization::Raw => 1.0,
                Normalization::Surviving => {
                    if tr <= kaon_core::single::DECAYED_TRACE_TOL {
                        return Err(kaon_core::KaonError::FullyDecayed(tr).into());
                    }
                    1.0 / tr
                }
            };
            Ok([
                t,
                scale * predictability(&marginal, cfg.basis),
                scale * coherence(&marginal, cfg.basis),
                scale * closed_form_concurrence(&params, &amps),
                scale * state.concurrence(Normalization::Raw)?,
                tr,
                jakob_bergou_residual(&state, Side::Left, cfg.basis)?,
            ])
        })
        .collect()
}

fn emit<const N: usize>(
    cfg: &RunConfig,
    header: [&str; N],
    rows: &[[f64; N]],
) -> Result<(), CliError> {
    let mut out = open_output(&cfg.out)?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        write_row(out.as_mut(), row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn run_single(cfg: &RunConfig) -> Result<(), CliError> {
    let rows = single_rows(cfg)?;
    emit(cfg, SINGLE_HEADER, &rows)
}

pub fn run_bipartite(cfg: &RunConfig) -> Result<(), CliError> {
    let rows = pair_rows(cfg)?;
    emit(cfg, PAIR_HEADER, &rows)
}

pub fn run_params(cfg: &RunConfig) -> Result<(), CliError> {
    let p = cfg.params()?;
    let mut out = open_output(&cfg.out)?;
    let eps = p.epsilon();
    let lines = [
        ("gamma_S", format!("{:.16e}", p.gamma_s())),
        ("gamma_L", format!("{:.16e}", p.gamma_l())),
        ("delta_m", format!("{:.16e}", p.delta_m())),
        ("epsilon", format!("{:.16e}{:+.16e}i", eps.re, eps.im)),
        ("epsilon_abs_sq", format!("{:.16e}", eps.norm_sqr())),
        ("p", format!("{:.16e}{:+.16e}i", p.p().re, p.p().im)),
        ("q", format!("{:.16e}{:+.16e}i", p.q().re, p.q().im)),
        ("N", format!("{:.16e}", p.norm())),
        ("delta", format!("{:.16e}", p.delta())),
        ("gamma_bar", format!("{:.16e}", p.gamma_bar())),
        (
            "lambda_S",
            format!("{:.16e}{:+.16e}i", p.lambda_s().re, p.lambda_s().im),
        ),
        (
            "lambda_L",
            format!("{:.16e}{:+.16e}i", p.lambda_l().re, p.lambda_l().im),
        ),
        ("unitarity_bound", p.satisfies_unitarity_bound().to_string()),
    ];
    for (key, value) in lines {
        writeln!(out, "{key} = {value}")?;
    }
    out.flush()?;
    Ok(())
}
