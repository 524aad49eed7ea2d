//! Hamiltonians, the frame transformation, the closed-form eigensystem and
//! the Lindblad dissipator.

use num_complex::Complex64;

use crate::error::Result;
use crate::model::{
    bloch_angles, outer, ps_to_natural, transition, ComplexMatrix3, ComplexVector3, DecayChannel,
    PureState3, SystemParams,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    /// Explicitly time-dependent laser drive at ω_L.
    Lab,
    /// Frame co-rotating with the laser; the Hamiltonian is static.
    Rotating,
}

/// H(t) = Σⱼ ωⱼ|j⟩⟨j| + T_e(|1⟩⟨2| + h.c.) + Ω(e^{i(φ+ω_L t)}|0⟩⟨1| + h.c.)
/// with ω₀ = 0 and ω₁ = ω₂ = ω_L.
pub fn lab_hamiltonian(params: &SystemParams, t_ps: f64) -> ComplexMatrix3 {
    let phase = Complex64::from_polar(1.0, params.phi + params.omega_l * ps_to_natural(t_ps));
    let mut h = ComplexMatrix3::zeros();
    h[(1, 1)] = re(params.omega_l);
    h[(2, 2)] = re(params.omega_l);
    h[(0, 1)] = phase * params.omega;
    h[(1, 0)] = phase.conj() * params.omega;
    h[(1, 2)] = re(params.t_e);
    h[(2, 1)] = re(params.t_e);
    h
}

/// U(t) = exp[(iω_L t/2)(|1⟩⟨1| + |2⟩⟨2| − |0⟩⟨0|)].
///
/// States map into the rotating frame as ρ_rot = U ρ_lab U†; see
/// [`to_rotating_frame`].
pub fn rotating_frame_unitary(params: &SystemParams, t_ps: f64) -> ComplexMatrix3 {
    let half = 0.5 * params.omega_l * ps_to_natural(t_ps);
    ComplexMatrix3::from_diagonal(&ComplexVector3::new(
        Complex64::from_polar(1.0, -half),
        Complex64::from_polar(1.0, half),
        Complex64::from_polar(1.0, half),
    ))
}

/// Lab-frame state at `t_ps` expressed in the rotating frame.
pub fn to_rotating_frame(rho_lab: &ComplexMatrix3, params: &SystemParams, t_ps: f64) -> ComplexMatrix3 {
    let u = rotating_frame_unitary(params, t_ps);
    u * rho_lab * u.adjoint()
}

/// H_int = Ω(e^{iφ}|0⟩⟨1| + h.c.) + T_e(|1⟩⟨2| + h.c.)
pub fn interaction_hamiltonian(params: &SystemParams) -> ComplexMatrix3 {
    let phase = Complex64::from_polar(1.0, params.phi);
    let mut h = ComplexMatrix3::zeros();
    h[(0, 1)] = phase * params.omega;
    h[(1, 0)] = phase.conj() * params.omega;
    h[(1, 2)] = re(params.t_e);
    h[(2, 1)] = re(params.t_e);
    h
}

/// Eigenvalues and closed-form eigenvectors of H_int.
///
/// The phase convention is fixed: the e^{−iφ} factors sit on the |1⟩ and
/// |2⟩ components, so |E₀⟩ = cos(θ/2)|0⟩ − e^{−iφ} sin(θ/2)|2⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub e_plus: f64,
    pub e_zero: f64,
    pub e_minus: f64,
    pub v_plus: PureState3,
    pub v_zero: PureState3,
    pub v_minus: PureState3,
}

impl EigenSystem {
    /// Eigenvalues in the order (E₊, E₀, E₋).
    pub fn energies(&self) -> [f64; 3] {
        [self.e_plus, self.e_zero, self.e_minus]
    }

    /// Eigenvectors in the order (|E₊⟩, |E₀⟩, |E₋⟩).
    pub fn vectors(&self) -> [&PureState3; 3] {
        [&self.v_plus, &self.v_zero, &self.v_minus]
    }

    /// Unitary whose columns are (|E₊⟩, |E₀⟩, |E₋⟩).
    pub fn basis_change(&self) -> ComplexMatrix3 {
        ComplexMatrix3::from_columns(&[
            *self.v_plus.amplitudes(),
            *self.v_zero.amplitudes(),
            *self.v_minus.amplitudes(),
        ])
    }

    /// |E_i⟩⟨E_j| in the computational basis, index order (+, 0, −).
    pub fn projector(&self, i: usize, j: usize) -> ComplexMatrix3 {
        let v = self.vectors();
        outer(v[i].amplitudes(), v[j].amplitudes())
    }

    /// Matrix elements ⟨E_i|m|E_j⟩ in the order (+, 0, −).
    pub fn to_eigenbasis(&self, m: &ComplexMatrix3) -> ComplexMatrix3 {
        let b = self.basis_change();
        b.adjoint() * m * b
    }

    pub fn from_eigenbasis(&self, m: &ComplexMatrix3) -> ComplexMatrix3 {
        let b = self.basis_change();
        b * m * b.adjoint()
    }
}

pub fn eigensystem(params: &SystemParams) -> Result<EigenSystem> {
    let angles = bloch_angles(params)?;
    let norm = params.coupling_norm();
    // Exact ratios rather than trig of θ, so the vectors stay orthonormal to
    // rounding.
    let c = params.t_e / norm;
    let s = params.omega / norm;
    let e = Complex64::from_polar(1.0, -angles.phi);
    let r2 = std::f64::consts::FRAC_1_SQRT_2;

    let v_plus = ComplexVector3::new(re(s * r2), e * r2, e * (c * r2));
    let v_zero = ComplexVector3::new(re(c), Complex64::new(0.0, 0.0), -e * s);
    let v_minus = ComplexVector3::new(re(s * r2), -e * r2, e * (c * r2));

    Ok(EigenSystem {
        e_plus: norm,
        e_zero: 0.0,
        e_minus: -norm,
        v_plus: PureState3::normalized(v_plus)?,
        v_zero: PureState3::normalized(v_zero)?,
        v_minus: PureState3::normalized(v_minus)?,
    })
}

/// (γ/2)(2OρO† − O†Oρ − ρO†O)
pub fn lindblad_term(channel: &DecayChannel, rho: &ComplexMatrix3) -> ComplexMatrix3 {
    if channel.rate() == 0.0 {
        return ComplexMatrix3::zeros();
    }
    let o = channel.jump();
    let od = o.adjoint();
    let odo = od * o;
    (o * rho * od * re(2.0) - odo * rho - rho * odo) * re(0.5 * channel.rate())
}

/// The two radiative channels: (Γ₁, |0⟩⟨1|) and (Γ₂, |0⟩⟨2|).
pub fn decay_channels(params: &SystemParams) -> Result<[DecayChannel; 2]> {
    Ok([
        DecayChannel::new(params.gamma1, transition(0, 1))?,
        DecayChannel::new(params.gamma2, transition(0, 2))?,
    ])
}

/// L(ρ) = L₁(ρ) + L₂(ρ). Identical in the lab and rotating frames.
pub fn dissipator(rho: &ComplexMatrix3, params: &SystemParams) -> ComplexMatrix3 {
    let l1 = DecayChannel::from_raw(params.gamma1, transition(0, 1));
    let l2 = DecayChannel::from_raw(params.gamma2, transition(0, 2));
    lindblad_term(&l1, rho) + lindblad_term(&l2, rho)
}

/// −i[H, ρ]
pub fn commutator_rhs(h: &ComplexMatrix3, rho: &ComplexMatrix3) -> ComplexMatrix3 {
    (h * rho - rho * h) * (-I)
}

/// dρ/dt = −i[H, ρ] + L(ρ), derivative with respect to natural time ħ/µeV.
///
/// `t_ps` is only read in the lab frame.
pub fn master_rhs(
    rho: &ComplexMatrix3,
    params: &SystemParams,
    frame: Frame,
    t_ps: f64,
) -> ComplexMatrix3 {
    let h = match frame {
        Frame::Lab => lab_hamiltonian(params, t_ps),
        Frame::Rotating => interaction_hamiltonian(params),
    };
    commutator_rhs(&h, rho) + dissipator(rho, params)
}
