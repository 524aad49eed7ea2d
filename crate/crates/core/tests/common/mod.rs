#![allow(dead_code)]

use qdm_core::SystemParams;

pub const GRID_COUPLINGS: [f64; 5] = [50.0, 100.0, 200.0, 500.0, 1000.0];
pub const GRID_EPS: [f64; 3] = [1e-4, 1e-3, 1e-2];
pub const GAMMA1: f64 = 3.0;

/// Ω = T_e = 200 µeV, Γ₁ = 3 µeV.
pub fn fig1() -> SystemParams {
    SystemParams::reference()
}

/// (Ω, T_e, ε) grid with Γ₁ = 3 µeV.
pub fn grid() -> Vec<SystemParams> {
    let mut out = Vec::new();
    for &omega in &GRID_COUPLINGS {
        for &t_e in &GRID_COUPLINGS {
            for &eps in &GRID_EPS {
                out.push(SystemParams::new(omega, t_e, GAMMA1, GAMMA1 * eps, 0.0));
            }
        }
    }
    out
}

pub fn rel_dev(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}
