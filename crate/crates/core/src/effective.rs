//! Effective (rotating-wave) master equation in the H_int eigenbasis.
//!
//! Jump operators are built from |E_i⟩⟨E_j| and stored in the computational
//! basis, so [`lindblad_term`] applies unchanged.

use num_complex::Complex64;

use crate::dynamics::{eigensystem, lindblad_term, EigenSystem};
use crate::error::{Error, Result};
use crate::evolution::{steady_state_numeric, Superoperator};
use crate::model::{bloch_angles, ComplexMatrix3, DecayChannel, DensityMatrix, SystemParams};

// Index order of EigenSystem::projector.
const PLUS: usize = 0;
const ZERO: usize = 1;
const MINUS: usize = 2;

/// One rate/operator pair Γ_{α,i}, O_{α,i}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveChannel {
    /// 1 for the direct exciton, 2 for the indirect one.
    pub alpha: usize,
    /// 1..=5
    pub index: usize,
    pub channel: DecayChannel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveChannelSet {
    channels: [EffectiveChannel; 10],
}

impl EffectiveChannelSet {
    pub fn channels(&self) -> &[EffectiveChannel; 10] {
        &self.channels
    }

    pub fn get(&self, alpha: usize, index: usize) -> Option<&EffectiveChannel> {
        self.channels.iter().find(|c| c.alpha == alpha && c.index == index)
    }

    /// Γ_{α,i}; panics on indices outside α ∈ {1,2}, i ∈ 1..=5.
    pub fn rate(&self, alpha: usize, index: usize) -> f64 {
        self.get(alpha, index).expect("channel index out of range").channel.rate()
    }

    /// O_{α,i}; panics on indices outside α ∈ {1,2}, i ∈ 1..=5.
    pub fn jump(&self, alpha: usize, index: usize) -> &ComplexMatrix3 {
        self.get(alpha, index).expect("channel index out of range").channel.jump()
    }

    pub fn decay_channels(&self) -> impl Iterator<Item = &DecayChannel> {
        self.channels.iter().map(|c| &c.channel)
    }
}

pub fn effective_channels(params: &SystemParams) -> Result<EffectiveChannelSet> {
    if params.omega == 0.0 {
        return Err(Error::DegenerateAngles("theta = 0 (omega = 0)"));
    }
    if params.t_e == 0.0 {
        return Err(Error::DegenerateAngles("theta = pi (t_e = 0)"));
    }
    for (name, v) in [("gamma1", params.gamma1), ("gamma2", params.gamma2)] {
        if !v.is_finite() {
            return Err(Error::NonFinite { name });
        }
        if v < 0.0 {
            return Err(Error::NegativeRate { name, value: v });
        }
    }
    let angles = bloch_angles(params)?;
    let es = eigensystem(params)?;
    let (c, s) = (angles.half_cos(), angles.half_sin());
    let (cot, tan) = (c / s, s / c);
    let p = |i, j| es.projector(i, j);
    let k = |x: f64| Complex64::new(x, 0.0);

    let g11 = params.gamma1 / 8.0 * s * s;
    let g14 = params.gamma1 / 4.0 * c * c;
    let g21 = params.gamma2 / 8.0 * s * s * c * c;
    let g24 = 2.0 * g21;

    let table: [(usize, usize, f64, ComplexMatrix3); 10] = [
        (1, 1, g11, p(PLUS, PLUS) - p(MINUS, MINUS)),
        (1, 2, g11, p(MINUS, PLUS)),
        (1, 3, g11, p(PLUS, MINUS)),
        (1, 4, g14, p(ZERO, MINUS)),
        (1, 5, g14, p(ZERO, PLUS)),
        (2, 1, g21, p(PLUS, PLUS) - p(ZERO, ZERO) * k(2.0) + p(MINUS, MINUS)),
        (2, 2, g21, p(MINUS, PLUS)),
        (2, 3, g21, p(PLUS, MINUS)),
        (2, 4, g24, p(ZERO, PLUS) * k(cot) - p(MINUS, ZERO) * k(tan)),
        (2, 5, g24, p(ZERO, MINUS) * k(cot) - p(PLUS, ZERO) * k(tan)),
    ];
    Ok(EffectiveChannelSet {
        channels: table.map(|(alpha, index, rate, jump)| EffectiveChannel {
            alpha,
            index,
            channel: DecayChannel::from_raw(rate, jump),
        }),
    })
}

/// L_eff(ρ); there is no Hamiltonian part.
pub fn effective_rhs(rho: &DensityMatrix, params: &SystemParams) -> Result<ComplexMatrix3> {
    let set = effective_channels(params)?;
    Ok(set
        .decay_channels()
        .fold(ComplexMatrix3::zeros(), |acc, ch| acc + lindblad_term(ch, rho.matrix())))
}

pub fn effective_superoperator(params: &SystemParams) -> Result<Superoperator> {
    let set = effective_channels(params)?;
    let channels: Vec<DecayChannel> = set.decay_channels().copied().collect();
    Ok(Superoperator::from_generator(None, &channels))
}

/// Null-space steady state of L_eff.
pub fn effective_steady_state(params: &SystemParams) -> Result<DensityMatrix> {
    effective_superoperator(params)?.steady_state()
}

/// Phase factors picked up under Ũ(t) = exp(−iH_int t/ħ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationPhases {
    /// |E₊⟩⟨E₀|: e^{iE₊t/ħ}
    pub plus_zero: Complex64,
    /// |E₋⟩⟨E₀|: e^{−iE₊t/ħ}
    pub minus_zero: Complex64,
    /// |E₊⟩⟨E₋|: e^{2iE₊t/ħ}
    pub plus_minus: Complex64,
}

pub fn oscillation_phases(params: &SystemParams, t_ps: f64) -> OscillationPhases {
    let x = params.coupling_norm() * crate::model::ps_to_natural(t_ps);
    OscillationPhases {
        plus_zero: Complex64::from_polar(1.0, x),
        minus_zero: Complex64::from_polar(1.0, -x),
        plus_minus: Complex64::from_polar(1.0, 2.0 * x),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaReport {
    /// Γ₁ / E₊
    pub ratio: f64,
    /// max_i |⟨E_i|ρ_full − ρ_eff|E_i⟩|
    pub steady_population_gap: f64,
}

pub fn rwa_validity(params: &SystemParams) -> Result<RwaReport> {
    let es = eigensystem(params)?;
    let full = steady_state_numeric(params)?;
    let eff = effective_steady_state(params)?;
    let gap = eigen_populations(&es, &full)
        .iter()
        .zip(eigen_populations(&es, &eff))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(RwaReport {
        ratio: params.gamma1 / es.e_plus,
        steady_population_gap: gap,
    })
}

/// (⟨E₊|ρ|E₊⟩, ⟨E₀|ρ|E₀⟩, ⟨E₋|ρ|E₋⟩)
pub fn eigen_populations(es: &EigenSystem, rho: &DensityMatrix) -> [f64; 3] {
    let m = es.to_eigenbasis(rho.matrix());
    [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::asymptotic_state;
    use crate::dynamics::{dissipator, interaction_hamiltonian};
    use crate::model::{ps_to_natural, transition};
    use crate::testutil::{random_density, random_params};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn k(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn at_theta(theta: f64, gamma2: f64) -> SystemParams {
        let w = 300.0;
        SystemParams::new(w * (theta / 2.0).sin(), w * (theta / 2.0).cos(), 3.0, gamma2, 0.6)
    }

    #[test]
    fn rates_at_quarter_turn() {
        let set = effective_channels(&SystemParams::reference()).unwrap();
        assert_relative_eq!(set.rate(1, 1), 0.1875, max_relative = 1e-14);
        assert_relative_eq!(set.rate(1, 4), 0.375, max_relative = 1e-14);
        assert_relative_eq!(set.rate(2, 1), 3e-4 / 32.0, max_relative = 1e-14);
    }

    #[test]
    fn rate_identities_hold_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let set = effective_channels(&random_params(&mut rng)).unwrap();
            assert_eq!(set.rate(1, 1), set.rate(1, 2));
            assert_eq!(set.rate(1, 1), set.rate(1, 3));
            assert_eq!(set.rate(1, 4), set.rate(1, 5));
            assert_eq!(set.rate(2, 1), set.rate(2, 2));
            assert_eq!(set.rate(2, 1), set.rate(2, 3));
            assert_eq!(set.rate(2, 4), 2.0 * set.rate(2, 1));
            assert_eq!(set.rate(2, 5), 2.0 * set.rate(2, 1));
            assert!(set.channels().iter().all(|c| c.channel.rate() >= 0.0));
        }
    }

    #[test]
    fn degenerate_angles_rejected() {
        assert!(matches!(
            effective_channels(&SystemParams::reference().with_omega(0.0)),
            Err(Error::DegenerateAngles(_))
        ));
        let mut p = SystemParams::reference();
        p.t_e = 0.0;
        assert!(matches!(effective_channels(&p), Err(Error::DegenerateAngles(_))));
        assert!(matches!(
            effective_channels(&SystemParams::reference().with_gamma2(-1.0)),
            Err(Error::NegativeRate { .. })
        ));
    }

    #[test]
    fn direct_operators_annihilate_dark_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let set = effective_channels(&p).unwrap();
            let e0 = eigensystem(&p).unwrap().v_zero;
            for i in 1..=5 {
                assert!((set.jump(1, i) * e0.amplitudes()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn indirect_operator_rotates_into_dark_state() {
        let p = at_theta(1.1, 1e-3);
        let es = eigensystem(&p).unwrap();
        let set = effective_channels(&p).unwrap();
        let cot = 1.0 / (1.1f64 / 2.0).tan();
        let out = set.jump(2, 4) * es.v_plus.amplitudes();
        assert!((out - es.v_zero.amplitudes() * k(cot)).norm() < 1e-13);
    }

    #[test]
    fn effective_rhs_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_params(&mut rng).with_gamma2(0.0);
            let e0 = DensityMatrix::from_pure(&eigensystem(&p).unwrap().v_zero);
            assert!(effective_rhs(&e0, &p).unwrap().norm() < 1e-13);
            let rho = random_density(&mut rng);
            assert!(effective_rhs(&rho, &p).unwrap().trace().norm() < 1e-13);
            let ss = effective_steady_state(&p).unwrap();
            assert!(ss.frobenius_distance(&e0) < 1e-10);
        }
    }

    #[test]
    fn dark_state_is_the_only_protected_eigenprojector() {
        let p = SystemParams::reference().with_gamma2(0.0);
        let es = eigensystem(&p).unwrap();
        let norms: Vec<f64> = es
            .vectors()
            .iter()
            .map(|v| effective_rhs(&DensityMatrix::from_pure(v), &p).unwrap().norm())
            .collect();
        assert!(norms[ZERO] < 1e-13);
        assert!(norms[PLUS] > 0.01 && norms[MINUS] > 0.01);
    }

    #[test]
    fn closed_form_is_the_effective_null_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let eff = effective_steady_state(&p).unwrap();
            let closed = asymptotic_state(&p).unwrap().rho_inf;
            assert!(eff.frobenius_distance(&closed) < 1e-10, "{p:?}");
        }
        let p = SystemParams::reference();
        let s = effective_superoperator(&p).unwrap();
        let v = crate::evolution::stack(asymptotic_state(&p).unwrap().rho_inf.matrix());
        let residual = (s.matrix() * v).norm();
        assert!(residual < 1e-10 * s.matrix().norm());
    }

    #[test]
    fn indirect_rates_are_small_at_reference_point() {
        for k in 0..=40 {
            let theta = PI / 6.0 + (2.0 * PI / 3.0) * k as f64 / 40.0;
            let set = effective_channels(&at_theta(theta, 3e-4)).unwrap();
            let max1 = (1..=5).map(|i| set.rate(1, i)).fold(0.0, f64::max);
            let max2 = (1..=5).map(|i| set.rate(2, i)).fold(0.0, f64::max);
            assert!(max2 < 1e-3 * max1, "theta = {theta}");
        }
    }

    #[test]
    fn phases_examples() {
        let p = SystemParams::reference();
        let ph = oscillation_phases(&p, 0.0);
        assert_eq!(ph.plus_zero, k(1.0));
        assert_eq!(ph.minus_zero, k(1.0));
        assert_eq!(ph.plus_minus, k(1.0));
        let half = PI * crate::model::HBAR_UEV_PS / p.coupling_norm();
        let ph = oscillation_phases(&p, half);
        assert!((ph.plus_zero - k(-1.0)).norm() < 1e-14);
        assert!((ph.minus_zero - k(-1.0)).norm() < 1e-14);
        assert!((ph.plus_minus - k(1.0)).norm() < 1e-14);
    }

    #[test]
    fn phases_match_matrix_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = SystemParams::reference().with_phi(0.8);
        let es = eigensystem(&p).unwrap();
        let h = interaction_hamiltonian(&p);
        for _ in 0..20 {
            let t_ps: f64 = rng.random_range(0.0..50.0);
            let u = (h * Complex64::new(0.0, -ps_to_natural(t_ps))).exp();
            let rot = |m: ComplexMatrix3| u.adjoint() * m * u;
            let ph = oscillation_phases(&p, t_ps);
            let pz = es.projector(PLUS, ZERO);
            let mz = es.projector(MINUS, ZERO);
            let pm = es.projector(PLUS, MINUS);
            assert!((rot(pz) - pz * ph.plus_zero).camax() < 1e-12);
            assert!((rot(mz) - mz * ph.minus_zero).camax() < 1e-12);
            assert!((rot(pm) - pm * ph.plus_minus).camax() < 1e-12);
        }
    }

    /// The direct-exciton dissipator written out in the eigenbasis holds at
    /// every mixing angle.
    #[test]
    fn direct_dissipator_eigenbasis_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = random_params(&mut rng).with_gamma2(0.0);
            let es = eigensystem(&p).unwrap();
            let a = bloch_angles(&p).unwrap();
            let (c, s) = (a.half_cos(), a.half_sin());
            let e = |i, j| es.projector(i, j);
            let r2cot = k(2f64.sqrt() * c / s);
            let left = (e(ZERO, PLUS) - e(ZERO, MINUS)) * r2cot + e(PLUS, PLUS) - e(MINUS, MINUS)
                + e(MINUS, PLUS)
                - e(PLUS, MINUS);
            let right = (e(PLUS, ZERO) - e(MINUS, ZERO)) * r2cot + e(PLUS, PLUS) - e(MINUS, MINUS)
                - e(MINUS, PLUS)
                + e(PLUS, MINUS);
            assert!((right - left.adjoint()).norm() < 1e-13);
            let anti = e(PLUS, PLUS) + e(MINUS, MINUS) - e(MINUS, PLUS) - e(PLUS, MINUS);
            let rho = random_density(&mut rng);
            let r = rho.matrix();
            let display = (left * r * right * k(s * s) - (r * anti + anti * r)) * k(p.gamma1 / 4.0);
            assert!((display - dissipator(r, &p)).norm() < 1e-12, "{p:?}");
        }
    }

    fn indirect_display(p: &SystemParams, rho: &ComplexMatrix3, printed: bool) -> ComplexMatrix3 {
        let es = eigensystem(p).unwrap();
        let a = bloch_angles(p).unwrap();
        let (c, s) = (a.half_cos(), a.half_sin());
        let (cot, tan) = (c / s, s / c);
        let e = |i, j| es.projector(i, j);
        let r2 = 2f64.sqrt();
        let y = e(PLUS, PLUS) + e(MINUS, MINUS) - e(ZERO, ZERO) * k(2.0) + e(MINUS, PLUS) + e(PLUS, MINUS);
        let (left, right) = if printed {
            let x = (e(ZERO, MINUS) - e(MINUS, ZERO) - e(PLUS, ZERO) + e(ZERO, PLUS)) * k(r2 * cot);
            (x + y, -x + y)
        } else {
            let x = (e(ZERO, MINUS) + e(ZERO, PLUS)) * k(r2 * cot) - (e(MINUS, ZERO) + e(PLUS, ZERO)) * k(r2 * tan);
            (x + y, (x + y).adjoint())
        };
        let z = e(PLUS, PLUS) + e(MINUS, MINUS) + e(MINUS, PLUS) + e(PLUS, MINUS)
            - (e(ZERO, MINUS) + e(MINUS, ZERO) + e(PLUS, ZERO) + e(ZERO, PLUS)) * k(r2 * tan)
            + e(ZERO, ZERO) * k(2.0 * tan * tan);
        (left * rho * right * k(s * s * c * c) - (rho * z + z * rho) * k(c * c)) * k(p.gamma2 / 4.0)
    }

    #[test]
    fn indirect_dissipator_eigenbasis_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let l2 = |p: &SystemParams, r: &ComplexMatrix3| {
            lindblad_term(&DecayChannel::from_raw(p.gamma2, transition(0, 2)), r)
        };
        for _ in 0..20 {
            let p = random_params(&mut rng).with_gamma2(0.3);
            let r = *random_density(&mut rng).matrix();
            assert!((indirect_display(&p, &r, false) - l2(&p, &r)).norm() < 1e-12);
        }
        // The cot-only form agrees at θ = π/2, where cot = tan = 1.
        let p = SystemParams::reference().with_gamma2(0.3).with_phi(0.4);
        let r = *random_density(&mut rng).matrix();
        assert!((indirect_display(&p, &r, true) - l2(&p, &r)).norm() < 1e-12);
        let q = at_theta(1.0, 0.3);
        assert!((indirect_display(&q, &r, true) - l2(&q, &r)).norm() > 1e-3);
    }

    #[test]
    fn rwa_report_at_reference() {
        let r = rwa_validity(&SystemParams::reference()).unwrap();
        assert_relative_eq!(r.ratio, 3.0 / 200.0 / 2f64.sqrt(), max_relative = 1e-12);
        assert!((r.ratio - 0.0106).abs() < 1e-4);
        assert!(r.steady_population_gap <= 3.0 * r.ratio);
        assert!(r.steady_population_gap <= 0.02);
    }

    #[test]
    fn rwa_gap_grows_as_decay_approaches_splitting() {
        let gaps: Vec<f64> = [1.0, 10.0, 50.0, 200.0, 500.0]
            .iter()
            .map(|&g1| {
                let p = SystemParams::new(200.0, 200.0, g1, 0.1 * g1, 0.0);
                rwa_validity(&p).unwrap().steady_population_gap
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] > w[0]), "{gaps:?}");
    }

    proptest! {
        #[test]
        fn effective_dynamics_preserve_trace_and_hermiticity(theta in 0.05..3.09f64, eps in 0.0..0.1f64, seed in 0u64..1000) {
            let p = at_theta(theta, 3.0 * eps);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = effective_rhs(&random_density(&mut rng), &p).unwrap();
            prop_assert!(d.trace().norm() < 1e-12);
            prop_assert!((d - d.adjoint()).norm() < 1e-12);
        }
    }
}
