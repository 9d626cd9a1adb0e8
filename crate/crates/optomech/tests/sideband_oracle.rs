//! First-order fields and friction against a ladder of Doppler sidebands.

mod common;

use common::{moment_response, sideband_response, SidebandResponse};
use num_complex::Complex64 as C64;
use optomech::mim::{build_mim, MimConfig};
use optomech::{
    force_with_velocity, solve_dynamic, static_force, Chain, Element, FieldSet, PumpSpec,
};

const LAMBDA: f64 = 1064e-9;
const V_OVER_C: f64 = 1e-9;

fn k0() -> f64 {
    2.0 * std::f64::consts::PI / LAMBDA
}

fn small_cavity(zm: f64, z: f64, x: f64, dl: f64) -> Chain {
    let m = Element::scatterer(zm, 0.0).unwrap();
    Chain::new(
        vec![
            m,
            Element::segment(0.005 - x + dl).unwrap(),
            Element::scatterer(z, 0.0).unwrap(),
            Element::segment(0.005 + x).unwrap(),
            m,
        ],
        2,
        k0(),
    )
    .unwrap()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn assert_fields_match(f: &FieldSet, o: &SidebandResponse, tol: f64) {
    for (closed, oracle, name) in [
        (f.a0, o.a0, "A0"),
        (f.b0, o.b0, "B0"),
        (f.c0, o.c0, "C0"),
        (f.d0, o.d0, "D0"),
        (f.a1, o.a1, "A1"),
        (f.b1, o.b1, "B1"),
        (f.c1, o.c1, "C1"),
        (f.d1, o.d1, "D1"),
    ] {
        assert!(
            rel(oracle, closed) < tol,
            "{name}: closed {closed}, oracle {oracle}"
        );
    }
}

#[test]
fn first_order_amplitudes_match_explicit_sideband_ladder() {
    let chain = small_cavity(-5.0, -0.3, 5e-8, -2e-8);
    let pump = PumpSpec::split(1.0, LAMBDA, 1.0.into(), C64::new(0.3, 0.0)).unwrap();
    let f = solve_dynamic(&chain, &pump).unwrap();
    let o = sideband_response(&chain, &pump, V_OVER_C);
    assert_fields_match(&f, &o, 1e-4);
    let rep = force_with_velocity(&f, chain.mobile_zeta(), k0());
    assert!((rep.friction - o.friction(k0())).abs() < 1e-4 * rep.friction.abs());
}

#[test]
fn moment_closure_reproduces_explicit_ladder() {
    for (zm, z, x, dl) in [
        (-5.0, -0.3, 5e-8, -2e-8),
        (-3.0, -2.0, -1e-7, 4e-8),
        (-8.0, -0.7, 2.2e-7, 0.0),
    ] {
        let chain = small_cavity(zm, z, x, dl);
        let pump = PumpSpec::left(1.0, LAMBDA).unwrap();
        let ladder = sideband_response(&chain, &pump, V_OVER_C);
        let moments = moment_response(&chain, &pump, V_OVER_C);
        for (a, b) in [
            (ladder.a1, moments.a1),
            (ladder.b1, moments.b1),
            (ladder.c1, moments.c1),
            (ladder.d1, moments.d1),
        ] {
            assert!(rel(a, b) < 1e-8, "{a} vs {b}");
        }
        assert!(
            (ladder.force(k0()) - moments.force(k0())).abs() < 1e-10 * moments.force(k0()).abs()
        );
    }
}

#[test]
fn membrane_in_the_middle_fields_match_sidebands() {
    let cfg = MimConfig::default();
    let pump = cfg.pump().unwrap();
    // On a resonance, on its flank and far from it.
    let (res, _) = cfg.resonance_dlc(3e-8);
    for dlc in [res, res + 1e-10, res + 1e-7] {
        let chain = build_mim(&cfg, 3e-8, dlc).unwrap();
        let f = solve_dynamic(&chain, &pump).unwrap();
        let o = moment_response(&chain, &pump, V_OVER_C);
        assert_fields_match(&f, &o, 1e-4);
        let f0 = static_force(&f.zeroth(), chain.mobile_zeta(), k0());
        assert!((f0 - o.force(k0())).abs() < 1e-9 * f0.abs());
    }
}
