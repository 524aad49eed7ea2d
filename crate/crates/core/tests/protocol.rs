mod common;

use common::{fig1, rel_dev};
use qdm_core::deutsch::{
    delta_p00_series, published_delta_p00, readout_times, readout_trajectory, run_deutsch_with, ProtocolOptions,
    TABLE_EPS_RATIOS,
};
use qdm_core::{evolve, prepare_protected, BinaryFunction, DensityMatrix, Frame, OraclePhase, PrepMode};
use std::f64::consts::PI;

#[test]
fn tables_reproduced() {
    for phase in [OraclePhase::Zero, OraclePhase::Pi] {
        for (col, &eps) in TABLE_EPS_RATIOS.iter().enumerate() {
            let series = delta_p00_series(&fig1(), eps, phase.radians(), 4).unwrap();
            for (row, value) in series.into_iter().enumerate() {
                let published = published_delta_p00(phase, row + 1, col).unwrap();
                assert!(rel_dev(value, published) < 0.02, "{phase} row {} eps {eps}", row + 1);
                assert_eq!(value.signum(), published.signum());
            }
        }
    }
}

#[test]
fn figure_one_dynamics() {
    let p = fig1();
    let t1 = readout_times(&p, 1).unwrap();
    let times: Vec<f64> = (0..=400).map(|k| 10.0 * t1 * k as f64 / 400.0).collect();
    let opts = ProtocolOptions::default();
    let pi = readout_trajectory(&prepare_protected(&p, PI, PrepMode::Analytic).unwrap(), &p, &times, &opts).unwrap();
    // Odd multiples of t₁ send the φ = π branch to |0⟩; even ones return it
    // towards the balanced start, with contrast slowly lost to dissipation.
    let p00 = |k: usize| pi.populations()[40 * k][0];
    assert!(p00(1) > 0.99);
    for k in [3usize, 5, 7, 9] {
        assert!(p00(k) > 0.94 && p00(k) < p00(k - 2), "t{k}: {}", p00(k));
    }
    for k in [2usize, 4, 6, 8] {
        assert!((p00(k) - 0.5).abs() < 0.05, "t{k}: {}", p00(k));
    }
}

#[test]
fn protocol_with_dissipative_preparation() {
    let opts = ProtocolOptions {
        prep: PrepMode::Dissipative,
        ..Default::default()
    };
    for f in BinaryFunction::all() {
        let v = run_deutsch_with(f, &fig1(), &opts).unwrap();
        assert_eq!(v.phase_inferred, qdm_core::oracle_phase(f));
    }
}

#[test]
fn simulate_is_deterministic() {
    let p = fig1();
    let a = evolve(&DensityMatrix::basis(1), &p, Frame::Lab, 20.0, 0.1, 1e-10).unwrap();
    let b = evolve(&DensityMatrix::basis(1), &p, Frame::Lab, 20.0, 0.1, 1e-10).unwrap();
    assert_eq!(a, b);
}
