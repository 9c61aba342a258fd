//! Scenario generators and property checks shared by the test targets.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use std::f64::consts::PI;
use xducer::circuit_model::Topology;
use xducer::cli_io::scenario::{Coupling, MechLoss, OpticalLoss, ScenarioSpec};
use xducer::designer::{design, DesignMode, DesignRequest};
use xducer::figures::{eta_from_cooperativities, figures_of_merit, Direction, OpticalLoading};
use xducer::optomech::{default_omega_o, KappaExtRule};
use xducer::{MatchingNetwork, TransducerScenario};

pub const CASES: u32 = 1000;
pub const TP: f64 = 2.0 * PI;

pub fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

pub fn topology() -> impl Strategy<Value = Topology> {
    (0..4u8, log_uniform(1e-9, 1e-5), log_uniform(1e-16, 1e-12)).prop_map(|(k, l, c_t)| match k {
        0 => Topology::Bare,
        1 => Topology::Rc { c_t },
        2 => Topology::Rl { l },
        _ => Topology::Rlc { l, c_t },
    })
}

/// Valid scenario specs spanning the device classes of interest.
pub fn spec_with(topology: BoxedStrategy<Topology>, r_l: BoxedStrategy<f64>) -> impl Strategy<Value = ScenarioSpec> {
    let device = (
        1e9..5e9f64,
        log_uniform(1e3, 1e6),
        log_uniform(1e-16, 1e-14),
        log_uniform(1e-2, 20.0),
        topology,
        r_l,
    );
    let optics = (
        log_uniform(1e4, 1e7),
        log_uniform(0.01, 100.0),
        log_uniform(1e4, 1e6),
        log_uniform(1.0, 1e4),
        log_uniform(0.01, 1.0),
        prop::option::of(-1.5..-0.5f64),
        any::<bool>(),
    );
    (device, optics).prop_map(
        |((f_s, q_m, c_0, k2_pct, topology, r_l), (q_i, kext_ratio, g0, n_phot, t_k, detune, reverse))| {
            let f_o = default_omega_o() / TP;
            ScenarioSpec {
                f_s_hz: f_s,
                loss: MechLoss::Q(q_m),
                m_eff_kg: None,
                c_0_f: c_0,
                coupling: Coupling::K2Pct(k2_pct),
                topology,
                r_l_ohm: r_l,
                z_tx_ohm: 50.0,
                optical_loss: OpticalLoss::Q(q_i),
                f_o_hz: None,
                kappa_ext_hz: Some(kext_ratio * f_o / q_i),
                delta_hz: detune.map(|d| d * f_s),
                g0_hz: g0,
                n_phot,
                n_phot_cap: None,
                t_k,
                direction: if reverse {
                    Direction::OpticalToElectrical
                } else {
                    Direction::ElectricalToOptical
                },
                label: None,
                kappa_ext_rule: KappaExtRule::Optimize,
            }
        },
    )
}

pub fn any_spec() -> impl Strategy<Value = ScenarioSpec> {
    spec_with(topology().boxed(), (0.0..5.0f64).boxed())
}

pub fn lossless_bare_spec() -> impl Strategy<Value = ScenarioSpec> {
    spec_with(Just(Topology::Bare).boxed(), Just(0.0).boxed())
}

pub fn loading() -> impl Strategy<Value = (f64, OpticalLoading)> {
    (0.01..=1.0f64, 0.01..=1.0f64, log_uniform(1e-4, 1e4), 0.01..=1.0f64, 0.0..1.0f64).prop_map(
        |(eta_e, eta_o, c_om, lp2, frac)| {
            (
                eta_e,
                OpticalLoading {
                    eta_o,
                    c_om,
                    lp2,
                    lm2: lp2 * frac,
                },
            )
        },
    )
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn check_reciprocal(spec: &ScenarioSpec) -> Result<(), TestCaseError> {
    let s = spec.to_scenario().unwrap();
    let fwd = figures_of_merit(&s.with_direction(Direction::ElectricalToOptical));
    let rev = figures_of_merit(&s.with_direction(Direction::OpticalToElectrical));
    prop_assert!(rel(fwd.eta_peak, rev.eta_peak) <= 1e-12);
    prop_assert!(rev.reverse.is_some() && fwd.reverse.is_none());
    Ok(())
}

pub fn check_no_gain(eta_e: f64, l: OpticalLoading, c_em: f64) -> Result<(), TestCaseError> {
    let l = OpticalLoading { lm2: 0.0, ..l };
    let eta = eta_from_cooperativities(eta_e, c_em, &l);
    prop_assert!(eta >= 0.0);
    prop_assert!(eta <= eta_e * l.eta_o * (1.0 + 1e-12), "{eta} > {}", eta_e * l.eta_o);
    Ok(())
}

pub fn check_matched_cooperativity_argmax(eta_e: f64, l: OpticalLoading) -> Result<(), TestCaseError> {
    let target = 1.0 + l.c_om * (l.lp2 - l.lm2);
    let n = 10_000;
    let (lo, hi) = ((target / 100.0).ln(), (target * 100.0).ln());
    let best = (0..=n)
        .map(|i| (lo + (hi - lo) * i as f64 / n as f64).exp())
        .map(|c| (eta_from_cooperativities(eta_e, c, &l), c))
        .fold((f64::MIN, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    prop_assert!(rel(best.1, target) < 1e-3, "grid argmax {} vs {target}", best.1);
    Ok(())
}

pub fn check_designed_rlc_matched(spec: &ScenarioSpec) -> Result<(), TestCaseError> {
    let s = spec.to_scenario().unwrap();
    let r = design(&DesignRequest::from_scenario(&s, DesignMode::MaximizeEta)).unwrap();
    prop_assert!(r.n_phot <= s.optics.n_phot_cap);
    if let Topology::Rlc { c_t, .. } = r.network.topology {
        prop_assert!(r.fom.s11_at_wm < 1e-4, "S11 {}", r.fom.s11_at_wm);
        prop_assert!(rel(r.omega_m, xducer::circuit_model::effective_resonance(&s.bvd, c_t)) < 1e-9);
    } else {
        prop_assert!(r.feasibility_notes.iter().any(|n| n.contains("RC fallback")));
    }
    Ok(())
}

pub fn check_noise_sum(spec: &ScenarioSpec) -> Result<(), TestCaseError> {
    let f = figures_of_merit(&spec.to_scenario().unwrap());
    prop_assert!(f.n_o >= 0.0 && f.n_mech >= 0.0 && f.eta_peak >= 0.0);
    prop_assert_eq!(f.n_total, f.n_o + f.n_mech);
    if let Some(r) = f.reverse {
        prop_assert_eq!(r.n_total, r.n_o + r.n_mech);
    }
    Ok(())
}

pub fn check_representations(spec: &ScenarioSpec, x: f64, r_l: f64) -> Result<(), TestCaseError> {
    let bare = TransducerScenario {
        network: MatchingNetwork::new(Topology::Bare, r_l, 50.0).unwrap(),
        ..spec.to_scenario().unwrap()
    };
    let w = bare.omega_m() * x;
    let z_bare = bare.input_impedance(w).unwrap();
    let f_bare = figures_of_merit(&bare);
    for t in [Topology::Rc { c_t: 0.0 }, Topology::Rlc { l: 0.0, c_t: 0.0 }] {
        let s = TransducerScenario { network: MatchingNetwork::new(t, r_l, 50.0).unwrap(), ..bare };
        let z = s.input_impedance(w).unwrap();
        prop_assert!((z - z_bare).norm() <= 1e-9 * z_bare.norm(), "{t:?}: {z} vs {z_bare}");
        let f = figures_of_merit(&s);
        prop_assert!(rel(f.eta_peak, f_bare.eta_peak) <= 1e-9);
        prop_assert!(rel(f.n_total, f_bare.n_total) <= 1e-9);
        prop_assert!(rel(f.omega_m, f_bare.omega_m) <= 1e-12);
    }
    Ok(())
}
