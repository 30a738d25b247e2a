use std::f64::consts::PI;

use wgqed_core::chain::{chain_transport, collective_modes, EmitterChain};
use wgqed_core::emitter::{self, transport, Drive, TwoLevelEmitter, EXCITED, GROUND};
use wgqed_core::lindblad::{build_liouvillian, propagate, steady_state, vectorize, DensityMatrix};
use wgqed_core::multilevel::{pump_probe_spectrum, PumpField};
use wgqed_core::statistics::{g2_analytic, g2_numeric, Port};
use wgqed_core::trace::linspace;

const DEPH: [f64; 5] = [0.0, 0.05, 0.3, 1.0, 4.0];
const DELTA: [f64; 5] = [-7.0, -0.8, 0.0, 1.3, 12.0];
const RABI: [f64; 5] = [0.0, 1e-3, 0.2, 1.5, 9.0];
const GAMMA: [f64; 5] = [0.25, 0.8, 1.0, 2.0, 5.0];

#[test]
fn master_equation_reproduces_closed_form_grid() {
    for &gamma in &GAMMA {
        for &deph in &DEPH {
            for &delta in &DELTA {
                for &rabi in &RABI {
                    let e = TwoLevelEmitter::new(gamma, 0.5, deph).unwrap();
                    let d = Drive::new(delta, rabi).unwrap();
                    let l = build_liouvillian(&e.level_system(&d)).unwrap();
                    let rho = steady_state(&l).unwrap();
                    let closed = emitter::steady_state(&e, &d);
                    assert!((rho.population(EXCITED) - closed.rho_ee).abs() < 1e-9);
                    assert!((rho.element(GROUND, EXCITED) - closed.rho_ge).norm() < 1e-9);
                    assert!(vectorize(&l.apply(rho.matrix())).norm() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn long_time_propagation_reaches_steady_state() {
    for &deph in &[0.0, 0.4] {
        for &rabi in &[0.3, 2.0] {
            let e = TwoLevelEmitter::natural(0.7, deph).unwrap();
            let l = build_liouvillian(&e.level_system(&Drive::new(0.6, rabi).unwrap())).unwrap();
            let late = propagate(&l, &DensityMatrix::pure(2, EXCITED), &[50.0]).unwrap();
            let ss = steady_state(&l).unwrap();
            assert!((late[0].matrix() - ss.matrix()).norm() < 1e-6);
        }
    }
}

#[test]
fn numeric_g2_long_delay_and_reality() {
    let grid = [0.0, 1.0, 50.0];
    for &(beta, deph) in &[(0.3, 0.0), (0.9, 0.2), (0.6, 1.0)] {
        let e = TwoLevelEmitter::natural(beta, deph).unwrap();
        let g = g2_numeric(&e, &Drive::resonant(0.4).unwrap(), Port::Transmitted, &grid).unwrap();
        assert!(g.values().iter().all(|v| v.im.abs() < 1e-9));
        assert!((g.values()[2].re - 1.0).abs() < 1e-6);
        let a = g2_analytic(&e, &grid).unwrap();
        assert!((a.values()[2] - 1.0).abs() < 1e-6);
    }
}

#[test]
fn pump_probe_without_pump_matches_chain_of_one() {
    let e = TwoLevelEmitter::natural(0.75, 0.0).unwrap();
    let grid = linspace(-6.0, 6.0, 61);
    let pp = pump_probe_spectrum(&e, &PumpField::new(0.0, 0.0).unwrap(), &grid, 1e-3).unwrap();
    let ch = chain_transport(&EmitterChain::new(vec![0.0], 0.75, 1.0).unwrap(), &grid).unwrap();
    for (p, t) in pp.values().iter().zip(ch.transmittance()) {
        assert!((p.transmittance - t).abs() < 1e-10);
    }
}

#[test]
fn chain_energy_and_modes() {
    let c = EmitterChain::regular(6, PI, 1.0, 1.0).unwrap();
    let grid = linspace(-5.0, 5.0, 101);
    let tr = chain_transport(&c, &grid).unwrap();
    for ((t, r), flagged) in tr.transmittance().iter().zip(tr.reflectance()).zip(&tr.flagged) {
        if !flagged {
            assert!((t + r - 1.0).abs() < 1e-9);
        }
    }
    let modes = collective_modes(&c).unwrap();
    // a perfect Bragg array has one bright mode carrying all of NΓ
    assert!((modes.decay_rates[5] - 6.0).abs() < 1e-9);
    assert!(modes.decay_rates[..5].iter().all(|r| r.abs() < 1e-9));

    let single = TwoLevelEmitter::natural(1.0, 0.0).unwrap();
    let t = transport(&single, &Drive::resonant(0.0).unwrap());
    assert_eq!(t.transmittance, 0.0);
}
