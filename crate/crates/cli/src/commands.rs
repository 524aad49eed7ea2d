use std::f64::consts::PI;

use qdm_core::analytic::{asymptotic_state, relaxation_time, stationary_fidelity};
use qdm_core::deutsch::{
    delta_p00_series, prepare_protected, published_delta_p00, readout_params, readout_times, run_deutsch_with,
    ProtocolOptions, TABLE_EPS_RATIOS,
};
use qdm_core::evolution::{evolve, fidelity, steady_state_numeric};
use qdm_core::model::{bloch_angles, normalize_phase, validate_params};
use qdm_core::{eigensystem, BinaryFunction, DensityMatrix, Error, OraclePhase, SystemParams, Tolerances};

use crate::config::{InitialState, RunConfig, Stage};
use crate::output::{Cell, Record, Table};

const DEFAULT_TOL: f64 = 1e-10;
const DEFAULT_PREP_T_END_PS: f64 = 100.0;
const SAMPLES_PER_RUN: f64 = 1000.0;
const FIDELITY_EPS_RATIOS: [f64; 4] = [1e-4, 1e-3, 1e-2, 1e-1];

pub enum Output {
    Table(Table),
    Record(Record),
}

fn checked(params: SystemParams) -> Result<SystemParams, Error> {
    let v = validate_params(params)?;
    for w in &v.warnings {
        eprintln!("warning: {w}");
    }
    Ok(v.params)
}

fn initial_state(kind: InitialState, params: &SystemParams) -> Result<DensityMatrix, Error> {
    Ok(match kind {
        InitialState::Ground => DensityMatrix::basis(0),
        InitialState::Direct => DensityMatrix::basis(1),
        InitialState::Indirect => DensityMatrix::basis(2),
        InitialState::Mixed => DensityMatrix::maximally_mixed(),
        InitialState::E0 => DensityMatrix::from_pure(&eigensystem(params)?.v_zero),
        InitialState::Analytic => asymptotic_state(params)?.rho_inf,
        InitialState::Steady => steady_state_numeric(params)?,
    })
}

/// Returns the oracle phase when `phi` is 0 or π modulo 2π.
fn oracle_phase_of(phi: f64) -> Option<OraclePhase> {
    let r = normalize_phase(phi);
    let near = |a: f64| (r - a).abs() < 1e-9 || (r - a - 2.0 * PI).abs() < 1e-9;
    if near(0.0) {
        Some(OraclePhase::Zero)
    } else if near(PI) {
        Some(OraclePhase::Pi)
    } else {
        None
    }
}

fn phase_label(phi: f64) -> String {
    oracle_phase_of(phi).map_or_else(|| format!("{phi:.6}"), |p| p.to_string())
}

fn eps_column(eps: f64) -> Option<usize> {
    TABLE_EPS_RATIOS.iter().position(|&e| ((e - eps) / e).abs() < 1e-12)
}

/// Populations, purity and trace error over time.
pub fn simulate(cfg: &RunConfig) -> Result<Output, Error> {
    let prep = checked(cfg.params)?;
    let initial = cfg.initial.unwrap_or(match cfg.stage {
        Stage::Prep => InitialState::Ground,
        Stage::Readout => InitialState::Analytic,
    });
    let rho0 = initial_state(initial, &prep)?;
    let (params, default_t_end) = match cfg.stage {
        Stage::Prep => (prep, DEFAULT_PREP_T_END_PS),
        Stage::Readout => (readout_params(&prep, cfg.readout_dissipation)?, readout_times(&prep, 8)?),
    };
    let t_end = cfg.t_end.unwrap_or(default_t_end);
    let dt = cfg.sample_dt.unwrap_or(t_end / SAMPLES_PER_RUN);
    let traj = evolve(&rho0, &params, cfg.frame, t_end, dt, cfg.tol.unwrap_or(DEFAULT_TOL))?;

    let mut table = Table::new(["t_ps", "p00", "p11", "p22", "purity", "trace_err"]);
    for ((t, rho), pops) in traj.times_ps().iter().zip(traj.states()).zip(traj.populations()) {
        table.push(vec![
            (*t).into(),
            pops[0].into(),
            pops[1].into(),
            pops[2].into(),
            rho.purity().into(),
            (rho.trace().re - 1.0).abs().into(),
        ]);
    }
    Ok(Output::Table(table))
}

fn add_state(rec: &mut Record, prefix: &str, rho: &DensityMatrix) {
    let m = rho.matrix();
    for k in 0..3 {
        rec.add(format!("{prefix}_rho{k}{k}"), m[(k, k)].re);
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        rec.add(format!("{prefix}_rho{i}{j}_re"), m[(i, j)].re);
        rec.add(format!("{prefix}_rho{i}{j}_im"), m[(i, j)].im);
    }
}

/// Closed-form and exact steady states side by side.
pub fn steady(cfg: &RunConfig) -> Result<Output, Error> {
    let p = checked(cfg.params)?;
    let numeric = steady_state_numeric(&p)?;
    let analytic = asymptotic_state(&p)?.rho_inf;
    let angles = bloch_angles(&p)?;
    let e0 = eigensystem(&p)?.v_zero;
    let t_ss = match relaxation_time(&p) {
        Err(Error::InfiniteRelaxation) => f64::INFINITY,
        r => r?,
    };

    let mut rec = Record::new();
    rec.add("omega", p.omega)
        .add("t_e", p.t_e)
        .add("gamma1", p.gamma1)
        .add("gamma2", p.gamma2)
        .add("theta", angles.theta)
        .add("phi", angles.phi)
        .add("fidelity_analytic", stationary_fidelity(&p)?)
        .add("fidelity_numeric", fidelity(&numeric, &e0))
        .add("frobenius_distance", analytic.frobenius_distance(&numeric))
        .add("t_ss_ps", t_ss);
    add_state(&mut rec, "analytic", &analytic);
    add_state(&mut rec, "numeric", &numeric);
    Ok(Output::Record(rec))
}

/// Stationary fidelity against Γ₂/Γ₁.
pub fn fidelity_scan(cfg: &RunConfig) -> Result<Output, Error> {
    let base = checked(cfg.params)?;
    let eps_list = cfg.eps_ratios.clone().unwrap_or_else(|| FIDELITY_EPS_RATIOS.to_vec());
    let e0 = eigensystem(&base)?.v_zero;
    let mut table = Table::new(["eps_ratio", "gamma2", "fidelity_analytic", "fidelity_numeric", "one_minus_eps"]);
    for eps in eps_list {
        let p = checked(base.with_eps_ratio(eps))?;
        let numeric = steady_state_numeric(&p)?;
        table.push(vec![
            eps.into(),
            p.gamma2.into(),
            stationary_fidelity(&p)?.into(),
            fidelity(&numeric, &e0).into(),
            (1.0 - eps).into(),
        ]);
    }
    Ok(Output::Table(table))
}

/// ΔP₀₀ grid with relative deviations from the published values.
pub fn tables(cfg: &RunConfig) -> Result<Output, Error> {
    let base = checked(cfg.params)?;
    let phis = cfg.phis.clone().unwrap_or_else(|| vec![0.0, PI]);
    let eps_list = cfg.eps_ratios.clone().unwrap_or_else(|| TABLE_EPS_RATIOS.to_vec());
    let ns = cfg.ns.clone().unwrap_or_else(|| vec![1, 2, 3, 4]);
    let n_max = ns.iter().copied().max().unwrap_or(0);
    if ns.contains(&0) {
        return Err(Error::InvalidArgument("table row n must be at least 1".into()));
    }

    let mut table = Table::new(["phi", "n", "eps_ratio", "delta_p00", "published", "rel_dev"]);
    for &phi in &phis {
        let series = eps_list
            .iter()
            .map(|&eps| delta_p00_series(&base, eps, phi, n_max))
            .collect::<Result<Vec<_>, _>>()?;
        for &n in &ns {
            for (k, &eps) in eps_list.iter().enumerate() {
                let value = series[k][n as usize - 1];
                let published = oracle_phase_of(phi)
                    .zip(eps_column(eps))
                    .and_then(|(phase, col)| published_delta_p00(phase, n as usize, col));
                table.push(vec![
                    Cell::Text(phase_label(phi)),
                    n.into(),
                    eps.into(),
                    value.into(),
                    published.into(),
                    published.map(|v| (value - v) / v).into(),
                ]);
            }
        }
    }
    Ok(Output::Table(table))
}

/// Readout dynamics for each phase, starting from the prepared state.
pub fn figure1(cfg: &RunConfig) -> Result<Output, Error> {
    let base = checked(cfg.params)?;
    let phis = cfg.phis.clone().unwrap_or_else(|| vec![0.0, PI]);
    let t_end = cfg.t_end.unwrap_or(readout_times(&base, 8)?);
    let dt = cfg.sample_dt.unwrap_or(t_end / SAMPLES_PER_RUN);
    let readout = readout_params(&base, cfg.readout_dissipation)?;
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);

    let mut header = vec!["t_ps".to_owned()];
    let mut columns = Vec::new();
    for &phi in &phis {
        let label = phase_label(phi).replace('.', "p").replace('-', "m");
        header.extend(["p00", "p11", "p22"].map(|c| format!("{c}_phi{label}")));
        let rho = prepare_protected(&base, phi, cfg.prep)?;
        columns.push(evolve(&rho, &readout, cfg.frame, t_end, dt, tol)?);
    }

    let mut table = Table::new(header);
    let times = columns.first().map_or(&[][..], |t| t.times_ps());
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![Cell::Num(t)];
        for traj in &columns {
            row.extend(traj.populations()[i].map(Cell::Num));
        }
        table.push(row);
    }
    Ok(Output::Table(table))
}

/// Runs the protocol for f; `Error::AmbiguousReadout` when P₀₀(t₁) is inconclusive.
pub fn deutsch(cfg: &RunConfig, f: BinaryFunction) -> Result<Output, Error> {
    let p = checked(cfg.params)?;
    let mut opts = ProtocolOptions {
        prep: cfg.prep,
        readout_dissipation: cfg.readout_dissipation,
        ..ProtocolOptions::default()
    };
    if let Some(tol) = cfg.tol {
        opts.tolerances = Tolerances::with_tol(tol);
    }
    let verdict = run_deutsch_with(f, &p, &opts)?;
    let mut table = Table::new(["f0", "f2", "answer", "p00_t1", "phase_inferred"]);
    table.push(vec![
        u32::from(f.f0()).into(),
        u32::from(f.f2()).into(),
        Cell::Text(verdict.answer.to_string()),
        verdict.p00_at_t1.into(),
        Cell::Text(verdict.phase_inferred.to_string()),
    ]);
    Ok(Output::Table(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_labels() {
        assert_eq!(phase_label(0.0), "0");
        assert_eq!(phase_label(PI), "pi");
        assert_eq!(phase_label(-PI), "pi");
        assert_eq!(phase_label(2.0 * PI), "0");
        assert_eq!(phase_label(1.0), "1.000000");
    }

    #[test]
    fn eps_columns() {
        assert_eq!(eps_column(1e-3), Some(1));
        assert_eq!(eps_column(2e-3), None);
    }
}
