//! Domain types shared by every module.
//!
//! Units: ħ = 1 internally, energies and rates in µeV, so the natural time
//! unit is ħ/µeV. Public time arguments are in picoseconds and converted with
//! [`HBAR_UEV_PS`]. The basis order is always (|0⟩, |1⟩, |2⟩): ground state,
//! direct exciton, indirect exciton.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// ħ in µeV·ps.
pub const HBAR_UEV_PS: f64 = 658.2119569;

pub type ComplexMatrix3 = Matrix3<Complex64>;
pub type ComplexVector3 = Vector3<Complex64>;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-9;
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Experimentally accessible drive amplitudes, µeV.
pub const OMEGA_WINDOW: (f64, f64) = (50.0, 1000.0);
/// Experimentally accessible tunneling couplings, µeV.
pub const TUNNELING_WINDOW: (f64, f64) = (10.0, 10_000.0);

pub fn ps_to_natural(t_ps: f64) -> f64 {
    t_ps / HBAR_UEV_PS
}

pub fn natural_to_ps(t: f64) -> f64 {
    t * HBAR_UEV_PS
}

/// |k⟩ in the computational basis.
pub fn basis_ket(k: usize) -> ComplexVector3 {
    let mut v = ComplexVector3::zeros();
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// |i⟩⟨j|
pub fn transition(i: usize, j: usize) -> ComplexMatrix3 {
    let mut m = ComplexMatrix3::zeros();
    m[(i, j)] = Complex64::new(1.0, 0.0);
    m
}

/// |a⟩⟨b|
pub fn outer(a: &ComplexVector3, b: &ComplexVector3) -> ComplexMatrix3 {
    a * b.adjoint()
}

/// Physical knobs of the driven double dot.
///
/// The resonance convention ω₁ = ω₂ = ω_L, ω₀ = 0 is built in; `omega_l`
/// only enters the lab-frame Hamiltonian and has no effect on any rotating
/// frame quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Rabi coupling Ω, µeV.
    pub omega: f64,
    /// Tunneling coupling T_e, µeV.
    pub t_e: f64,
    /// Direct-exciton decay rate Γ₁, µeV.
    pub gamma1: f64,
    /// Indirect-exciton decay rate Γ₂, µeV.
    pub gamma2: f64,
    /// Laser phase φ, radians.
    pub phi: f64,
    /// Laser frequency ω_L, µeV.
    pub omega_l: f64,
}

impl SystemParams {
    /// Cosmetic under resonance; only visible in the lab frame.
    pub const DEFAULT_OMEGA_L: f64 = 1500.0;

    pub fn new(omega: f64, t_e: f64, gamma1: f64, gamma2: f64, phi: f64) -> Self {
        Self {
            omega,
            t_e,
            gamma1,
            gamma2,
            phi,
            omega_l: Self::DEFAULT_OMEGA_L,
        }
    }

    /// Ω = T_e = 200 µeV, Γ₁ = 3 µeV, Γ₂ = 10⁻⁴ Γ₁, φ = 0.
    pub fn reference() -> Self {
        Self::new(200.0, 200.0, 3.0, 3.0e-4, 0.0)
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_gamma2(mut self, gamma2: f64) -> Self {
        self.gamma2 = gamma2;
        self
    }

    /// Sets Γ₂ = ratio · Γ₁.
    pub fn with_eps_ratio(mut self, ratio: f64) -> Self {
        self.gamma2 = ratio * self.gamma1;
        self
    }

    /// Γ₂ / Γ₁ (NaN when Γ₁ = 0).
    pub fn eps_ratio(&self) -> f64 {
        self.gamma2 / self.gamma1
    }

    /// √(Ω² + T_e²), the magnitude of the non-zero H_int eigenvalues.
    pub fn coupling_norm(&self) -> f64 {
        self.omega.hypot(self.t_e)
    }

    pub fn validate(self) -> Result<Validated> {
        validate_params(self)
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::reference()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamWarning {
    OmegaOutsideWindow { omega: f64 },
    TunnelingOutsideWindow { t_e: f64 },
}

impl fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ParamWarning::OmegaOutsideWindow { omega } => write!(
                f,
                "omega = {omega} µeV is outside the experimental window [{}, {}] µeV",
                OMEGA_WINDOW.0, OMEGA_WINDOW.1
            ),
            ParamWarning::TunnelingOutsideWindow { t_e } => write!(
                f,
                "t_e = {t_e} µeV is outside the experimental window [{}, {}] µeV",
                TUNNELING_WINDOW.0, TUNNELING_WINDOW.1
            ),
        }
    }
}

/// Parameters that passed validation, with non-fatal warnings attached.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub params: SystemParams,
    pub warnings: Vec<ParamWarning>,
}

/// Rejects negative or non-finite rates; warns (without failing) when Ω or
/// T_e leave the experimentally accessible windows.
pub fn validate_params(raw: SystemParams) -> Result<Validated> {
    let fields = [
        ("omega", raw.omega),
        ("t_e", raw.t_e),
        ("gamma1", raw.gamma1),
        ("gamma2", raw.gamma2),
        ("phi", raw.phi),
        ("omega_l", raw.omega_l),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            return Err(Error::NonFinite { name });
        }
    }
    for (name, value) in &fields[..4] {
        if *value < 0.0 {
            return Err(Error::NegativeRate {
                name,
                value: *value,
            });
        }
    }

    let mut warnings = Vec::new();
    if raw.omega < OMEGA_WINDOW.0 || raw.omega > OMEGA_WINDOW.1 {
        warnings.push(ParamWarning::OmegaOutsideWindow { omega: raw.omega });
    }
    if raw.t_e < TUNNELING_WINDOW.0 || raw.t_e > TUNNELING_WINDOW.1 {
        warnings.push(ParamWarning::TunnelingOutsideWindow { t_e: raw.t_e });
    }
    Ok(Validated {
        params: raw,
        warnings,
    })
}

/// Position of the protected state on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    /// Polar angle θ ∈ [0, π].
    pub theta: f64,
    /// Azimuthal angle φ ∈ [0, 2π).
    pub phi: f64,
}

impl BlochAngles {
    pub fn half_cos(&self) -> f64 {
        (self.theta / 2.0).cos()
    }

    pub fn half_sin(&self) -> f64 {
        (self.theta / 2.0).sin()
    }
}

/// cos(θ/2) = T_e / √(Ω² + T_e²), φ taken from the laser phase.
pub fn bloch_angles(params: &SystemParams) -> Result<BlochAngles> {
    let norm = params.coupling_norm();
    if norm == 0.0 {
        return Err(Error::DegenerateAngles("omega = t_e = 0"));
    }
    // atan2 keeps full precision near both poles, unlike acos.
    let theta = 2.0 * params.omega.atan2(params.t_e);
    Ok(BlochAngles {
        theta,
        phi: normalize_phase(params.phi),
    })
}

/// Maps an angle into [0, 2π).
pub fn normalize_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(2.0 * PI);
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// A normalized pure state over (|0⟩, |1⟩, |2⟩).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState3 {
    amplitudes: ComplexVector3,
}

impl PureState3 {
    pub fn new(amplitudes: ComplexVector3) -> Result<Self> {
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `v` to unit norm.
    pub fn normalized(v: ComplexVector3) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: n * n });
        }
        Ok(Self { amplitudes: v / Complex64::new(n, 0.0) })
    }

    pub fn basis(k: usize) -> Self {
        Self {
            amplitudes: basis_ket(k),
        }
    }

    pub fn amplitudes(&self) -> &ComplexVector3 {
        &self.amplitudes
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &PureState3) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// |ψ⟩⟨ψ|
    pub fn projector(&self) -> ComplexMatrix3 {
        outer(&self.amplitudes, &self.amplitudes)
    }
}

/// Deviation of a 3×3 operator from being a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    /// max |ρ − ρ†|
    pub hermiticity: f64,
    /// |tr ρ − 1|
    pub trace_error: f64,
    /// smallest eigenvalue of the Hermitian part
    pub min_eigenvalue: f64,
}

impl Physicality {
    pub fn of(m: &ComplexMatrix3) -> Self {
        let hermiticity = (m - m.adjoint()).camax();
        let trace_error = (m.trace() - Complex64::new(1.0, 0.0)).norm();
        let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let min_eigenvalue = herm
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        Self {
            hermiticity,
            trace_error,
            min_eigenvalue,
        }
    }

    pub fn is_physical(&self) -> bool {
        self.hermiticity <= HERMITICITY_TOL
            && self.trace_error <= TRACE_TOL
            && self.min_eigenvalue >= -POSITIVITY_TOL
    }
}

/// Hermitian, unit-trace, positive semidefinite 3×3 state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    entries: ComplexMatrix3,
}

impl DensityMatrix {
    pub fn new(entries: ComplexMatrix3) -> Result<Self> {
        let p = Physicality::of(&entries);
        if !p.is_physical() {
            return Err(Error::InvalidDensityMatrix {
                hermiticity: p.hermiticity,
                trace_error: p.trace_error,
                min_eigenvalue: p.min_eigenvalue,
            });
        }
        Ok(Self { entries })
    }

    /// Skips validation; callers apply their own (looser) tolerances.
    pub(crate) fn from_raw(entries: ComplexMatrix3) -> Self {
        Self { entries }
    }

    pub fn from_pure(psi: &PureState3) -> Self {
        Self {
            entries: psi.projector(),
        }
    }

    pub fn basis(k: usize) -> Self {
        Self {
            entries: transition(k, k),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            entries: ComplexMatrix3::identity() * Complex64::new(1.0 / 3.0, 0.0),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix3 {
        &self.entries
    }

    pub fn physicality(&self) -> Physicality {
        Physicality::of(&self.entries)
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// tr ρ²
    pub fn purity(&self) -> f64 {
        (self.entries * self.entries).trace().re
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        (self.entries - other.entries).norm()
    }
}

/// A decay channel: rate γ (µeV) and jump operator O.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayChannel {
    rate: f64,
    jump: ComplexMatrix3,
}

impl DecayChannel {
    pub fn new(rate: f64, jump: ComplexMatrix3) -> Result<Self> {
        if !rate.is_finite() {
            return Err(Error::NonFinite { name: "rate" });
        }
        if rate < 0.0 {
            return Err(Error::NegativeRate { name: "rate", value: rate });
        }
        Ok(Self { rate, jump })
    }

    pub(crate) fn from_raw(rate: f64, jump: ComplexMatrix3) -> Self {
        Self { rate, jump }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn jump(&self) -> &ComplexMatrix3 {
        &self.jump
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_params_validate_cleanly() {
        let v = validate_params(SystemParams::reference()).unwrap();
        assert!(v.warnings.is_empty());
        assert_eq!(v.params, SystemParams::reference());
    }

    #[test]
    fn negative_rate_is_rejected() {
        let p = SystemParams::reference();
        let mut bad = p;
        bad.gamma1 = -1.0;
        assert_eq!(
            validate_params(bad),
            Err(Error::NegativeRate {
                name: "gamma1",
                value: -1.0
            })
        );
        for (field, name) in [(0, "omega"), (1, "t_e"), (3, "gamma2")] {
            let mut bad = p;
            match field {
                0 => bad.omega = -0.5,
                1 => bad.t_e = -0.5,
                _ => bad.gamma2 = -0.5,
            }
            match validate_params(bad) {
                Err(Error::NegativeRate { name: n, .. }) => assert_eq!(n, name),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn nan_is_rejected() {
        let p = SystemParams::reference().with_phi(f64::NAN);
        assert_eq!(validate_params(p), Err(Error::NonFinite { name: "phi" }));
    }

    #[test]
    fn zero_omega_warns_but_passes() {
        let v = validate_params(SystemParams::reference().with_omega(0.0)).unwrap();
        assert_eq!(v.warnings, vec![ParamWarning::OmegaOutsideWindow { omega: 0.0 }]);
    }

    #[test]
    fn limiting_angles() {
        let p = SystemParams::reference();
        let a = bloch_angles(&p).unwrap();
        assert_abs_diff_eq!(a.theta, PI / 2.0, epsilon = 1e-15);

        let strong = bloch_angles(&p.with_omega(1e9)).unwrap();
        assert!(PI - strong.theta < 1e-6);

        let weak = bloch_angles(&p.with_omega(1e-9)).unwrap();
        assert!(weak.theta < 1e-10);

        let zero = SystemParams::new(0.0, 0.0, 3.0, 0.0, 0.0);
        assert!(matches!(bloch_angles(&zero), Err(Error::DegenerateAngles(_))));
    }

    #[test]
    fn phase_is_normalized() {
        let a = bloch_angles(&SystemParams::reference().with_phi(-PI / 2.0)).unwrap();
        assert_abs_diff_eq!(a.phi, 1.5 * PI, epsilon = 1e-15);
        let b = bloch_angles(&SystemParams::reference().with_phi(2.0 * PI)).unwrap();
        assert_eq!(b.phi, 0.0);
        assert!(normalize_phase(-1e-18) < 2.0 * PI);
    }

    #[test]
    fn pure_state_requires_unit_norm() {
        let v = ComplexVector3::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        assert!(matches!(PureState3::new(v), Err(Error::NotNormalized { .. })));
        let psi = PureState3::normalized(v).unwrap();
        assert_abs_diff_eq!(psi.amplitudes().norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(transition(1, 1)).is_ok());
        assert!(DensityMatrix::new(transition(0, 1)).is_err());
        let not_positive = transition(0, 0) * Complex64::new(1.5, 0.0)
            - transition(1, 1) * Complex64::new(0.5, 0.0);
        match DensityMatrix::new(not_positive) {
            Err(Error::InvalidDensityMatrix { min_eigenvalue, .. }) => {
                assert_abs_diff_eq!(min_eigenvalue, -0.5, epsilon = 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        let mixed = DensityMatrix::maximally_mixed();
        assert_abs_diff_eq!(mixed.purity(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn decay_channel_rejects_negative_rate() {
        assert!(DecayChannel::new(-1e-3, transition(0, 1)).is_err());
        assert!(DecayChannel::new(0.0, transition(0, 1)).is_ok());
    }

    proptest! {
        #[test]
        fn theta_round_trip(omega in 1e-3f64..1e4, t_e in 1e-3f64..1e4) {
            let p = SystemParams::new(omega, t_e, 3.0, 0.0, 0.0);
            let a = bloch_angles(&p).unwrap();
            let back = a.half_cos() * p.coupling_norm();
            prop_assert!((back - t_e).abs() <= 1e-12 * t_e.max(1.0));
            prop_assert!((0.0..=PI).contains(&a.theta));
        }

        #[test]
        fn theta_monotone_in_drive_ratio(t_e in 1.0f64..1e3, r1 in 1e-3f64..1e3, dr in 1e-3f64..10.0) {
            let lo = bloch_angles(&SystemParams::new(r1 * t_e, t_e, 3.0, 0.0, 0.0)).unwrap();
            let hi = bloch_angles(&SystemParams::new((r1 + dr) * t_e, t_e, 3.0, 0.0, 0.0)).unwrap();
            prop_assert!(hi.theta > lo.theta);
        }
    }
}
