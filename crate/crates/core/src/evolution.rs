//! Time integration of the master equation and exact steady states.
//!
//! States are integrated on their 9 real degrees of freedom (diagonal plus
//! the upper triangle), so every sample is Hermitian by construction.
//! Superoperators act on column-stacked matrices: vec(ρ)[3·col + row] = ρ[row, col].

use std::ops::ControlFlow;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::dynamics::{master_rhs, Frame};
use crate::error::{Error, Result};
use crate::integrator::{integrate, StepFailure, Tolerances};
use crate::model::{
    natural_to_ps, ps_to_natural, transition, ComplexMatrix3, DecayChannel, DensityMatrix,
    Physicality, PureState3, SystemParams, POSITIVITY_TOL,
};

/// Trace drift beyond which an integration is rejected.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-8;
/// Relative singular-value threshold for the superoperator null space.
pub const NULL_SPACE_TOL: f64 = 1e-11;
/// Residual ‖dρ/dt‖_F at which dissipative relaxation counts as converged.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-12;

pub type Vec9 = SVector<f64, 9>;
pub type CVec9 = SVector<Complex64, 9>;
pub type Matrix9 = SMatrix<Complex64, 9, 9>;

fn pack(m: &ComplexMatrix3) -> Vec9 {
    Vec9::from([
        m[(0, 0)].re,
        m[(1, 1)].re,
        m[(2, 2)].re,
        m[(0, 1)].re,
        m[(0, 1)].im,
        m[(0, 2)].re,
        m[(0, 2)].im,
        m[(1, 2)].re,
        m[(1, 2)].im,
    ])
}

fn unpack(v: &Vec9) -> ComplexMatrix3 {
    let c = Complex64::new;
    let (a01, a02, a12) = (c(v[3], v[4]), c(v[5], v[6]), c(v[7], v[8]));
    ComplexMatrix3::new(
        c(v[0], 0.0),
        a01,
        a02,
        a01.conj(),
        c(v[1], 0.0),
        a12,
        a02.conj(),
        a12.conj(),
        c(v[2], 0.0),
    )
}

/// Column-stacked vec(m).
pub fn stack(m: &ComplexMatrix3) -> CVec9 {
    CVec9::from_iterator(m.iter().copied())
}

pub fn unstack(v: &CVec9) -> ComplexMatrix3 {
    ComplexMatrix3::from_iterator(v.iter().copied())
}

/// Sampled density-matrix trajectory. Times are in picoseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times_ps: Vec<f64>,
    states: Vec<DensityMatrix>,
    populations: Vec<[f64; 3]>,
}

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        Self {
            times_ps: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            populations: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t_ps: f64, state: DensityMatrix) {
        let (p0, p1, p2) = populations(&state);
        self.times_ps.push(t_ps);
        self.states.push(state);
        self.populations.push([p0, p1, p2]);
    }

    pub fn len(&self) -> usize {
        self.times_ps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times_ps.is_empty()
    }

    pub fn times_ps(&self) -> &[f64] {
        &self.times_ps
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// (P₀₀, P₁₁, P₂₂) per sample.
    pub fn populations(&self) -> &[[f64; 3]] {
        &self.populations
    }

    pub fn last(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }

    /// Largest |tr ρ − 1| over the samples.
    pub fn max_trace_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.trace() - Complex64::new(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    /// Worst-case physicality over all samples.
    pub fn worst_physicality(&self) -> Physicality {
        self.states.iter().map(DensityMatrix::physicality).fold(
            Physicality {
                hermiticity: 0.0,
                trace_error: 0.0,
                min_eigenvalue: f64::INFINITY,
            },
            |acc, p| Physicality {
                hermiticity: acc.hermiticity.max(p.hermiticity),
                trace_error: acc.trace_error.max(p.trace_error),
                min_eigenvalue: acc.min_eigenvalue.min(p.min_eigenvalue),
            },
        )
    }
}

fn step_error(e: StepFailure) -> Error {
    match e {
        StepFailure::Underflow { t, h } | StepFailure::Exhausted { t, h } => Error::IntegrationFailure {
            t_ps: natural_to_ps(t),
            step: natural_to_ps(h),
        },
    }
}

fn check_sample(m: &ComplexMatrix3, trace0: f64, t_ps: f64) -> Result<()> {
    let drift = (m.trace().re - trace0).abs();
    if drift > TRACE_DRIFT_LIMIT {
        return Err(Error::InvariantViolation {
            t_ps,
            detail: format!("trace drift {drift:.3e}"),
        });
    }
    let p = Physicality::of(m);
    if p.min_eigenvalue < -POSITIVITY_TOL {
        return Err(Error::InvariantViolation {
            t_ps,
            detail: format!("negative eigenvalue {:.3e}", p.min_eigenvalue),
        });
    }
    Ok(())
}

/// Integrates the master equation and samples at every `sample_dt_ps` from 0
/// up to `t_end_ps` (the end point is always included). `tol` is the
/// relative local error tolerance.
pub fn evolve(
    rho0: &DensityMatrix,
    params: &SystemParams,
    frame: Frame,
    t_end_ps: f64,
    sample_dt_ps: f64,
    tol: f64,
) -> Result<Trajectory> {
    if !(t_end_ps > 0.0 && t_end_ps.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end_ps}")));
    }
    if !(sample_dt_ps > 0.0 && sample_dt_ps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sample_dt must be positive, got {sample_dt_ps}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    evolve_at(
        rho0,
        params,
        frame,
        &sample_grid(t_end_ps, sample_dt_ps),
        &Tolerances::with_tol(tol),
    )
}

/// 0, dt, 2dt, … ≤ t_end, with t_end appended unless it already lies on the grid.
pub fn sample_grid(t_end_ps: f64, sample_dt_ps: f64) -> Vec<f64> {
    let n = (t_end_ps / sample_dt_ps * (1.0 + 1e-12)).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|k| k as f64 * sample_dt_ps).collect();
    let last = *times.last().unwrap();
    if t_end_ps - last > 1e-9 * sample_dt_ps {
        times.push(t_end_ps);
    } else {
        *times.last_mut().unwrap() = t_end_ps;
    }
    times
}

/// Integrates from t = 0 and records the state at each of `times_ps`
/// (non-negative, strictly increasing).
pub fn evolve_at(
    rho0: &DensityMatrix,
    params: &SystemParams,
    frame: Frame,
    times_ps: &[f64],
    opts: &Tolerances,
) -> Result<Trajectory> {
    if times_ps.first().is_some_and(|&t| t < 0.0) || times_ps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "sample times must be non-negative and strictly increasing".into(),
        ));
    }
    let params = *params;
    let rhs = move |t: f64, y: &Vec9| pack(&master_rhs(&unpack(y), &params, frame, natural_to_ps(t)));
    let y0 = pack(rho0.matrix());
    let trace0 = rho0.trace().re;

    let mut traj = Trajectory::with_capacity(times_ps.len());
    let mut violation = None;
    integrate(
        rhs,
        0.0,
        y0,
        times_ps.iter().map(|&t| ps_to_natural(t)),
        opts,
        |_, y| {
            let t_ps = times_ps[traj.len()];
            let m = unpack(y);
            if let Err(e) = check_sample(&m, trace0, t_ps) {
                violation = Some(e);
                return ControlFlow::Break(());
            }
            traj.push(t_ps, DensityMatrix::from_raw(m));
            ControlFlow::Continue(())
        },
    )
    .map_err(step_error)?;

    match violation {
        Some(e) => Err(e),
        None => Ok(traj),
    }
}

/// Result of relaxing a state under the full dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxed {
    pub state: DensityMatrix,
    pub t_ps: f64,
    /// ‖dρ/dt‖_F at the stopping time, µeV.
    pub residual: f64,
}

/// Evolves `rho0` in the rotating frame until ‖master_rhs‖_F drops below
/// `residual_tol`, checking every `check_every_ps`.
pub fn relax_to_steady(
    rho0: &DensityMatrix,
    params: &SystemParams,
    residual_tol: f64,
    check_every_ps: f64,
    t_max_ps: f64,
    opts: &Tolerances,
) -> Result<Relaxed> {
    if !(check_every_ps > 0.0) {
        return Err(Error::InvalidArgument("check interval must be positive".into()));
    }
    let p = *params;
    let rhs = move |_t: f64, y: &Vec9| pack(&master_rhs(&unpack(y), &p, Frame::Rotating, 0.0));
    let residual_of = |m: &ComplexMatrix3| master_rhs(m, params, Frame::Rotating, 0.0).norm();

    let initial = residual_of(rho0.matrix());
    if initial < residual_tol {
        return Ok(Relaxed {
            state: *rho0,
            t_ps: 0.0,
            residual: initial,
        });
    }

    // Near the fixed point the error controller would grow the step up to the
    // stability limit, where local errors in the oscillating modes no longer
    // decay and the residual stalls near rtol·‖H‖.
    let rate_scale = params.coupling_norm() + params.gamma1 + params.gamma2;
    let opts = &Tolerances {
        max_step: opts.max_step.min(0.5 / rate_scale.max(f64::MIN_POSITIVE)),
        ..*opts
    };
    let trace0 = rho0.trace().re;
    let dt = ps_to_natural(check_every_ps);
    let t_max = ps_to_natural(t_max_ps);
    let targets = (1u64..)
        .map(move |k| k as f64 * dt)
        .take_while(move |&t| t <= t_max + dt);

    let mut outcome: Option<Result<Relaxed>> = None;
    let mut last = (0.0, initial);
    integrate(rhs, 0.0, pack(rho0.matrix()), targets, opts, |t, y| {
        let m = unpack(y);
        let t_ps = natural_to_ps(t);
        if let Err(e) = check_sample(&m, trace0, t_ps) {
            outcome = Some(Err(e));
            return ControlFlow::Break(());
        }
        let residual = residual_of(&m);
        last = (t_ps, residual);
        if residual < residual_tol {
            outcome = Some(Ok(Relaxed {
                state: DensityMatrix::from_raw(m),
                t_ps,
                residual,
            }));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })
    .map_err(step_error)?;

    outcome.unwrap_or(Err(Error::ConvergenceTimeout {
        t_ps: last.0,
        residual: last.1,
    }))
}

fn kron(a: &ComplexMatrix3, b: &ComplexMatrix3) -> Matrix9 {
    Matrix9::from_fn(|r, c| a[(r / 3, c / 3)] * b[(r % 3, c % 3)])
}

/// Linear generator acting on column-stacked 3×3 operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator {
    matrix: Matrix9,
}

impl Superoperator {
    /// Vectorizes −i[H, ·] + Σ_k (γ_k/2)(2O_k·O_k† − {O_k†O_k, ·}).
    pub fn from_generator(hamiltonian: Option<&ComplexMatrix3>, channels: &[DecayChannel]) -> Self {
        let id = ComplexMatrix3::identity();
        let mut m = Matrix9::zeros();
        if let Some(h) = hamiltonian {
            m += (kron(&id, h) - kron(&h.transpose(), &id)) * Complex64::new(0.0, -1.0);
        }
        for ch in channels {
            let o = ch.jump();
            let odo = o.adjoint() * o;
            let term = kron(&o.conjugate(), o) * Complex64::new(2.0, 0.0)
                - kron(&id, &odo)
                - kron(&odo.transpose(), &id);
            m += term * Complex64::new(0.5 * ch.rate(), 0.0);
        }
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &Matrix9 {
        &self.matrix
    }

    pub fn apply(&self, rho: &ComplexMatrix3) -> ComplexMatrix3 {
        unstack(&(self.matrix * stack(rho)))
    }

    /// All nine eigenvalues (unordered).
    pub fn spectrum(&self) -> Vec<Complex64> {
        self.matrix
            .schur()
            .eigenvalues()
            .expect("complex Schur form always yields eigenvalues")
            .iter()
            .copied()
            .collect()
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.matrix.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Number of singular values below `NULL_SPACE_TOL · σ_max`.
    pub fn nullity(&self) -> usize {
        let sv = self.singular_values();
        let cutoff = NULL_SPACE_TOL * sv[0].max(f64::MIN_POSITIVE);
        sv.iter().filter(|&&s| s <= cutoff).count()
    }

    /// The unique unit-trace Hermitian fixed point.
    pub fn steady_state(&self) -> Result<DensityMatrix> {
        let svd = self.matrix.svd(false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::SolveFailure("SVD did not return right singular vectors".into()))?;
        let sv = &svd.singular_values;
        let s_max = sv.max();
        let cutoff = NULL_SPACE_TOL * s_max.max(f64::MIN_POSITIVE);
        let nullity = sv.iter().filter(|&&s| s <= cutoff).count();
        if nullity > 1 {
            return Err(Error::NonUniqueSteadyState { nullity });
        }
        if nullity == 0 {
            return Err(Error::SolveFailure(format!(
                "no null vector: smallest singular value {:.3e} (σ_max {:.3e})",
                sv.min(),
                s_max
            )));
        }
        let k = sv.imin();
        let v = CVec9::from_iterator(v_t.row(k).iter().map(|z| z.conj()));
        let m = unstack(&v);
        let tr = m.trace();
        if tr.norm() < 1e-12 {
            return Err(Error::SolveFailure("null vector is traceless".into()));
        }
        // Fix the arbitrary phase so the trace is real and positive, then
        // remove residual anti-Hermitian rounding.
        let m = m / tr;
        let m = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        DensityMatrix::new(m)
    }
}

/// Superoperator of −i[H_int, ·] + L(·) in the rotating frame.
pub fn superoperator(params: &SystemParams) -> Superoperator {
    let h = crate::dynamics::interaction_hamiltonian(params);
    let channels = [
        DecayChannel::from_raw(params.gamma1, transition(0, 1)),
        DecayChannel::from_raw(params.gamma2, transition(0, 2)),
    ];
    Superoperator::from_generator(Some(&h), &channels)
}

/// Exact steady state from the superoperator null space.
pub fn steady_state_numeric(params: &SystemParams) -> Result<DensityMatrix> {
    if !(params.gamma1 > 0.0) {
        return Err(Error::RequiresDirectDecay);
    }
    superoperator(params).steady_state()
}

/// (P₀₀, P₁₁, P₂₂)
pub fn populations(rho: &DensityMatrix) -> (f64, f64, f64) {
    let m = rho.matrix();
    (m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re)
}

/// ⟨ψ|ρ|ψ⟩
pub fn fidelity(rho: &DensityMatrix, psi: &PureState3) -> f64 {
    let v = psi.amplitudes();
    (v.adjoint() * rho.matrix() * v)[(0, 0)].re
}
