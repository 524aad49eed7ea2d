//! Closed-form stationary results.

use num_complex::Complex64;

use crate::dynamics::{dissipator, interaction_hamiltonian};
use crate::error::{Error, Result};
use crate::model::{bloch_angles, ComplexMatrix3, DensityMatrix, PureState3, SystemParams, HBAR_UEV_PS};

/// Threshold for [`dark_state_check`].
pub const DARK_STATE_TOL: f64 = 1e-10;

/// Long-time density matrix in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticState {
    pub rho_inf: DensityMatrix,
    pub rho00: f64,
    pub rho11: f64,
    pub rho22: f64,
    pub rho02: Complex64,
}

pub fn asymptotic_state(params: &SystemParams) -> Result<AsymptoticState> {
    let SystemParams {
        omega,
        t_e,
        gamma1: g1,
        gamma2: g2,
        phi,
        ..
    } = *params;
    let (o2, t2) = (omega * omega, t_e * t_e);
    let (o4, t4) = (o2 * o2, t2 * t2);
    let s2 = t2 + o2;
    let denom = t2 * s2 * g1 + (t4 + 2.0 * o4) * g2;
    if !(denom > 0.0) || s2 == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let full = s2 * denom;

    let rho00 = (t4 * s2 * g1 + (t4 * t2 + o4 * o2) * g2) / full;
    let rho11 = o4 * g2 / denom;
    let rho22 = t2 * o2 * s2 * (g1 + g2) / full;
    let rho02 = -Complex64::from_polar(1.0, phi) * (t_e * omega * (t2 * s2 * g1 + (t4 - o4) * g2) / full);

    let zero = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let m = ComplexMatrix3::new(
        re(rho00),
        zero,
        rho02,
        zero,
        re(rho11),
        zero,
        rho02.conj(),
        zero,
        re(rho22),
    );
    Ok(AsymptoticState {
        rho_inf: DensityMatrix::from_raw(m),
        rho00,
        rho11,
        rho22,
        rho02,
    })
}

/// F(∞) = ⟨E₀|ρ(∞)|E₀⟩ in closed form.
pub fn stationary_fidelity(params: &SystemParams) -> Result<f64> {
    if !(params.gamma1 > 0.0) {
        return Err(Error::RequiresDirectDecay);
    }
    if params.t_e == 0.0 {
        return Err(Error::TeZeroSingularity);
    }
    let eps = params.gamma2 / params.gamma1;
    let (o2, t2) = (params.omega.powi(2), params.t_e.powi(2));
    let s2 = t2 + o2;
    let num = 1.0 + eps * t2 / s2;
    let den = 1.0 + eps * (t2 * t2 + 2.0 * o2 * o2) / (t2 * s2);
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkStateReport {
    pub is_eigenstate: bool,
    /// ⟨ψ|H_int|ψ⟩, µeV.
    pub eigenvalue: Complex64,
    /// ‖H_int ψ − ⟨ψ|H_int|ψ⟩ψ‖
    pub eigen_residual: f64,
    /// ‖L(|ψ⟩⟨ψ|)‖_F
    pub dissipator_norm: f64,
}

/// Tests whether `psi` is a dark state: an H_int eigenvector annihilated by
/// the dissipator.
pub fn dark_state_check(psi: &PureState3, params: &SystemParams) -> DarkStateReport {
    let h = interaction_hamiltonian(params);
    let v = psi.amplitudes();
    let hv = h * v;
    let eigenvalue = v.dotc(&hv);
    let eigen_residual = (hv - v * eigenvalue).norm();
    let dissipator_norm = dissipator(&psi.projector(), params).norm();
    DarkStateReport {
        is_eigenstate: eigen_residual < DARK_STATE_TOL && dissipator_norm < DARK_STATE_TOL,
        eigenvalue,
        eigen_residual,
        dissipator_norm,
    }
}

/// ħ / min(Γ₁ sin²(θ/2)/8, Γ₁ cos²(θ/2)/4), ps.
pub fn relaxation_time(params: &SystemParams) -> Result<f64> {
    if !(params.gamma1 > 0.0) {
        return Err(Error::RequiresDirectDecay);
    }
    let angles = bloch_angles(params)?;
    let (c, s) = (angles.half_cos(), angles.half_sin());
    let rate = (params.gamma1 * s * s / 8.0).min(params.gamma1 * c * c / 4.0);
    // cos(π/2) is ~6e−17, not zero.
    if rate <= params.gamma1 * 1e-30 || params.omega == 0.0 || params.t_e == 0.0 {
        return Err(Error::InfiniteRelaxation);
    }
    Ok(HBAR_UEV_PS / rate)
}
