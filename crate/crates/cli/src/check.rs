//! `check`: every invariant suite at the configured parameters, one report
//! line each.

use std::io::Write;

use kaon_core::linalg::{c, kron, max_abs_diff, min_eigenvalue, outer4, Mat2, Mat4};
use kaon_core::oracle::MAX_STEP_RATE;
use kaon_core::sampling::{
    random_coefficients, random_density4, random_ket4, random_single_density, random_unitary,
    seeded, SeededRng,
};
use kaon_core::{
    closed_form_concurrence, concurrence, concurrence_decay_residual, decomposition_upper_bound,
    integrate_master, jakob_bergou_residual, pure_concurrence_overlap, BasisChoice, BellState,
    BipartiteAmplitudes, BipartiteState, IntegratorConfig, Normalization, PhysicalParams, Side,
    SingleKaonState,
};
use rand::Rng;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::series::open_output;

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Skip(String),
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub outcome: Outcome,
}

struct Measure {
    samples: usize,
    max: f64,
}

impl Measure {
    fn new() -> Self {
        Self {
            samples: 0,
            max: 0.0,
        }
    }

    fn push(&mut self, residual: f64) {
        self.samples += 1;
        // NaN must not hide behind max().
        self.max = if residual.is_nan() {
            f64::NAN
        } else {
            self.max.max(residual.abs())
        };
    }
}

type SuiteFn = fn(&Context, &mut SeededRng) -> kaon_core::Result<Measure>;

struct Suite {
    name: &'static str,
    tolerance: f64,
    run: SuiteFn,
}

struct Context {
    params: PhysicalParams,
    /// Sample times spanning six K_S lifetimes.
    times: Vec<f64>,
}

const SINGLE_STATES: usize = 200;
const PAIR_STATES: usize = 100;

fn single_states(rng: &mut SeededRng, n: usize) -> kaon_core::Result<Vec<SingleKaonState>> {
    (0..n)
        .map(|_| SingleKaonState::mixed(random_single_density(rng)))
        .collect()
}

fn pair_states(ctx: &Context, rng: &mut SeededRng) -> kaon_core::Result<Vec<BipartiteAmplitudes>> {
    (0..PAIR_STATES)
        .map(|_| BipartiteAmplitudes::from_lifetime(&ctx.params, random_coefficients(rng)))
        .collect()
}

fn biorthogonality(ctx: &Context, _: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    let p = &ctx.params;
    let (ks, kl) = p.lifetime_states();
    let gram = p.lifetime_matrix_inverse() * p.lifetime_matrix();
    m.push(max_abs_diff(&gram, &Mat2::identity()));
    m.push((ks.dotc(&kl) - c(p.delta(), 0.0)).norm());
    m.push(ks.norm() - 1.0);
    m.push(kl.norm() - 1.0);
    Ok(m)
}

fn bohr_identity(ctx: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    for s in single_states(rng, SINGLE_STATES)? {
        for &t in &ctx.times {
            let later = s.evolve(&ctx.params, t)?;
            for choice in BasisChoice::ALL {
                m.push(later.bohr_residual(choice)?);
            }
        }
    }
    Ok(m)
}

fn information_balance(ctx: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    for s in single_states(rng, SINGLE_STATES)? {
        for &t in &ctx.times {
            let later = s.evolve(&ctx.params, t)?;
            for choice in BasisChoice::ALL {
                let (kept, lost) = later.info_balance(choice)?;
                m.push(kept + lost - 1.0);
            }
        }
    }
    Ok(m)
}

fn trace_balance(ctx: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    for s in single_states(rng, SINGLE_STATES)? {
        for &t in &ctx.times {
            let later = s.evolve(&ctx.params, t)?;
            m.push(later.trace_surviving() + later.trace_decayed() - 1.0);
        }
    }
    Ok(m)
}

/// Negative part of the smallest eigenvalue of either block.
fn block_positivity(ctx: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    for s in single_states(rng, SINGLE_STATES)? {
        for &t in &ctx.times {
            let later = s.evolve(&ctx.params, t)?;
            let lowest = min_eigenvalue(later.surviving()).min(min_eigenvalue(later.decayed()));
            m.push(lowest.min(0.0));
        }
    }
    Ok(m)
}

fn semigroup(ctx: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    let span = ctx.times[ctx.times.len() - 1] / 2.0;
    for s in single_states(rng, 50)? {
        let t1 = span * rng.random::<f64>();
        let t2 = span * rng.random::<f64>();
        let once = s.evolve(&ctx.params, t1 + t2)?;
        let twice = s.evolve(&ctx.params, t1)?.evolve(&ctx.params, t2)?;
        m.push(max_abs_diff(once.surviving(), twice.surviving()));
        m.push(max_abs_diff(once.decayed(), twice.decayed()));
    }
    Ok(m)
}

fn oracle_agreement(ctx: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    let step = 1e-3_f64.min(MAX_STEP_RATE / (10.0 * ctx.params.gamma_s()));
    let config = IntegratorConfig::with_step(step);
    let unit = 1.0 / ctx.params.gamma_s();
    for s in single_states(rng, 20)? {
        for t in [0.5 * unit, unit, 2.0 * unit] {
            let exact = s.evolve(&ctx.params, t)?;
            let numeric = integrate_master(&ctx.params, &s, t, &config)?;
            m.push(max_abs_diff(exact.surviving(), numeric.surviving()));
            m.push(max_abs_diff(exact.decayed(), numeric.decayed()));
        }
    }
    Ok(m)
}

fn pure_overlap(_: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    for _ in 0..200 {
        let psi = random_ket4(rng);
        m.push(concurrence(&outer4(&psi), Normalization::Raw)? - pure_concurrence_overlap(&psi)?);
    }
    Ok(m)
}

fn pair_sweep(
    ctx: &Context,
    rng: &mut SeededRng,
    mut each: impl FnMut(&BipartiteAmplitudes, &BipartiteState, &mut Measure) -> kaon_core::Result<()>,
) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    let stride = (ctx.times.len() / 10).max(1);
    for amps in pair_states(ctx, rng)? {
        for &t in ctx.times.iter().step_by(stride) {
            let later = amps.evolve(t)?;
            let state = later.to_density(&ctx.params);
            each(&later, &state, &mut m)?;
        }
    }
    Ok(m)
}

fn closed_form(ctx: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    pair_sweep(ctx, rng, |amps, state, m| {
        m.push(closed_form_concurrence(&ctx.params, amps) - state.concurrence(Normalization::Raw)?);
        Ok(())
    })
}

fn jakob_bergou(ctx: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    pair_sweep(ctx, rng, |_, state, m| {
        for side in [Side::Left, Side::Right] {
            for choice in BasisChoice::ALL {
                m.push(jakob_bergou_residual(state, side, choice)?);
            }
        }
        Ok(())
    })
}

fn concurrence_decay(ctx: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    for amps in pair_states(ctx, rng)? {
        for &t in ctx.times.iter().step_by((ctx.times.len() / 10).max(1)) {
            m.push(concurrence_decay_residual(&ctx.params, &amps, t)?);
        }
    }
    Ok(m)
}

/// Bell-state concurrence at the configured epsilon against epsilon = 0.
fn bell_cp_independence(ctx: &Context, _: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    let reference = ctx.params.with_epsilon(c(0.0, 0.0))?;
    for which in BellState::ALL {
        let here = BipartiteAmplitudes::bell(&ctx.params, which);
        let there = BipartiteAmplitudes::bell(&reference, which);
        m.push(
            here.to_density(&ctx.params)
                .concurrence(Normalization::Raw)?
                - 1.0,
        );
        for &t in &ctx.times {
            let a = here
                .evolve(t)?
                .to_density(&ctx.params)
                .concurrence(Normalization::Raw)?;
            let b = there
                .evolve(t)?
                .to_density(&reference)
                .concurrence(Normalization::Raw)?;
            m.push(a - b);
        }
    }
    Ok(m)
}

fn local_invariance(_: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    for k in 0..20 {
        let rho = random_density4(rng, 1 + k % 4);
        let base = concurrence(&rho, Normalization::Raw)?;
        for _ in 0..5 {
            let a: Mat2 = random_unitary(rng);
            let b: Mat2 = random_unitary(rng);
            let u = kron(&a, &b);
            let moved: Mat4 = u * rho * u.adjoint();
            m.push(concurrence(&moved, Normalization::Raw)? - base);
        }
    }
    Ok(m)
}

/// Amount by which the sampled bound undercuts the concurrence.
fn decomposition_bound(_: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    for k in 0..30 {
        let rho = random_density4(rng, 1 + k % 4);
        let exact = concurrence(&rho, Normalization::Raw)?;
        let bound = decomposition_upper_bound(&rho, 200, rng.random())?;
        m.push((exact - bound).max(0.0));
    }
    Ok(m)
}

/// Positive part of the complementarity residual for mixed pair densities.
fn mixed_pair_bound(_: &Context, rng: &mut SeededRng) -> kaon_core::Result<Measure> {
    let mut m = Measure::new();
    for k in 0..100 {
        let rho = random_density4(rng, 2 + k % 3);
        let state = BipartiteState::new(rho, [0.0; 3], 0.0)?;
        for side in [Side::Left, Side::Right] {
            for choice in BasisChoice::ALL {
                m.push(jakob_bergou_residual(&state, side, choice)?.max(0.0));
            }
        }
    }
    Ok(m)
}

const SUITES: [Suite; 15] = [
    Suite {
        name: "lifetime-biorthogonality",
        tolerance: 1e-12,
        run: biorthogonality,
    },
    Suite {
        name: "bohr-identity",
        tolerance: 1e-10,
        run: bohr_identity,
    },
    Suite {
        name: "information-balance",
        tolerance: 1e-10,
        run: information_balance,
    },
    Suite {
        name: "trace-balance",
        tolerance: 1e-10,
        run: trace_balance,
    },
    Suite {
        name: "block-positivity",
        tolerance: 1e-10,
        run: block_positivity,
    },
    Suite {
        name: "evolution-semigroup",
        tolerance: 1e-11,
        run: semigroup,
    },
    Suite {
        name: "oracle-agreement",
        tolerance: 1e-8,
        run: oracle_agreement,
    },
    Suite {
        name: "pure-concurrence-overlap",
        tolerance: 1e-10,
        run: pure_overlap,
    },
    Suite {
        name: "closed-form-concurrence",
        tolerance: 1e-9,
        run: closed_form,
    },
    Suite {
        name: "jakob-bergou",
        tolerance: 1e-9,
        run: jakob_bergou,
    },
    Suite {
        name: "concurrence-decay",
        tolerance: 1e-9,
        run: concurrence_decay,
    },
    Suite {
        name: "bell-cp-independence",
        tolerance: 1e-9,
        run: bell_cp_independence,
    },
    Suite {
        name: "wootters-local-invariance",
        tolerance: 1e-12,
        run: local_invariance,
    },
    Suite {
        name: "decomposition-bound",
        tolerance: 1e-6,
        run: decomposition_bound,
    },
    Suite {
        name: "mixed-pair-bound",
        tolerance: 1e-12,
        run: mixed_pair_bound,
    },
];

/// Runs every suite. Suites that do not apply to the parameters are
/// reported as skipped.
pub fn run_suites(cfg: &RunConfig) -> Result<Vec<SuiteReport>, CliError> {
    let params = cfg.params()?;
    let horizon = 6.0 / params.gamma_s();
    let ctx = Context {
        params,
        times: (0..20).map(|k| horizon * k as f64 / 19.0).collect(),
    };
    let reports = SUITES
        .iter()
        .enumerate()
        .map(|(index, suite)| {
            let mut report = SuiteReport {
                name: suite.name,
                samples: 0,
                max_residual: 0.0,
                tolerance: suite.tolerance,
                outcome: Outcome::Pass,
            };
            if suite.name == "block-positivity" && !ctx.params.satisfies_unitarity_bound() {
                report.outcome = Outcome::Skip(
                    "decay matrix is indefinite (unitarity bound violated), no positive decay map"
                        .into(),
                );
                return report;
            }
            let mut rng = seeded(cfg.seed.wrapping_add(index as u64));
            match (suite.run)(&ctx, &mut rng) {
                Ok(m) => {
                    report.samples = m.samples;
                    report.max_residual = m.max;
                    if m.max.is_nan() || m.max > suite.tolerance {
                        report.outcome = Outcome::Fail(format!(
                            "max residual {:.3e} exceeds {:.0e}",
                            m.max, suite.tolerance
                        ));
                    }
                }
                Err(e) => report.outcome = Outcome::Fail(e.to_string()),
            }
            report
        })
        .collect();
    Ok(reports)
}

pub fn run_check(cfg: &RunConfig) -> Result<(), CliError> {
    let reports = run_suites(cfg)?;
    let params = cfg.params()?;
    let mut out = open_output(&cfg.out)?;
    writeln!(
        out,
        "kaon check: gamma_S = {}, gamma_L = {:e}, delta_m = {}, epsilon = {:e} e^(i {}), delta = {:e}, seed = {}",
        params.gamma_s(),
        params.gamma_l(),
        params.delta_m(),
        cfg.epsilon_mag,
        cfg.epsilon_phase,
        params.delta(),
        cfg.seed
    )?;
    for r in &reports {
        match &r.outcome {
            Outcome::Skip(why) => writeln!(out, "SKIP  {:<26} {why}", r.name)?,
            outcome => {
                let tag = if *outcome == Outcome::Pass {
                    "PASS"
                } else {
                    "FAIL"
                };
                write!(
                    out,
                    "{tag}  {:<26} samples = {:>6}  max residual = {:.3e}  tolerance = {:.0e}",
                    r.name, r.samples, r.max_residual, r.tolerance
                )?;
                if let Outcome::Fail(why) = outcome {
                    write!(out, "  ({why})")?;
                }
                writeln!(out)?;
            }
        }
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| matches!(r.outcome, Outcome::Fail(_)))
        .map(|r| r.name.to_string())
        .collect();
    let skipped = reports
        .iter()
        .filter(|r| matches!(r.outcome, Outcome::Skip(_)))
        .count();
    if failed.is_empty() {
        writeln!(
            out,
            "all {} suites passed ({skipped} skipped)",
            reports.len()
        )?;
        out.flush()?;
        Ok(())
    } else {
        writeln!(out, "{} of {} suites failed", failed.len(), reports.len())?;
        out.flush()?;
        Err(CliError::CheckFailed(failed))
    }
}
