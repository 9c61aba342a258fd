//! Matching-network synthesis for the two operating regimes.

use crate::circuit_model::{
    effective_resonance, thermal_occupancy, BvdParams, Environment, MatchingNetwork, MechanicalMode, Topology,
};
use crate::error::{Error, Result};
use crate::figures::{figures_of_merit, Direction, FiguresOfMerit, TransducerScenario};
use crate::optomech::{
    cooperativity_om, enhanced_coupling, kappa_ext_max_eta, kappa_ext_min_noise, sideband_amplitudes,
    KappaExtRule, OpticalSubsystem,
};

pub const FIXED_POINT_TOL: f64 = 1e-10;
pub const FIXED_POINT_MAX_ITER: usize = 100;

/// Amplification-noise sideband weight below which the cooperativity
/// target of the noise regime is trusted.
pub const LM2_RESOLVED: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignMode {
    MaximizeEta,
    MinimizeNoise,
}

/// Device, cavity and line to design a network for. The cavity's external
/// coupling and photon number are outputs; only its photon cap is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignRequest {
    pub mechanical: MechanicalMode,
    pub bvd: BvdParams,
    pub optics: OpticalSubsystem,
    pub env: Environment,
    pub mode: DesignMode,
    pub z_tx: f64,
    pub r_l: f64,
    pub kappa_ext_rule: KappaExtRule,
    pub direction: Direction,
}

impl DesignRequest {
    pub fn from_scenario(s: &TransducerScenario, mode: DesignMode) -> Self {
        DesignRequest {
            mechanical: s.mechanical,
            bvd: s.bvd,
            optics: s.optics,
            env: s.env,
            mode,
            z_tx: s.network.z_tx,
            r_l: s.network.r_l,
            kappa_ext_rule: KappaExtRule::Optimize,
            direction: s.direction,
        }
    }

    pub fn with_rule(mut self, rule: KappaExtRule) -> Self {
        self.kappa_ext_rule = rule;
        self
    }

    fn r_series(&self) -> f64 {
        self.z_tx + self.r_l
    }

    fn gamma_m(&self) -> f64 {
        self.mechanical.gamma_m
    }

    fn scenario(&self, topology: Topology, kappa_ext: f64, n_phot: f64) -> Result<TransducerScenario> {
        let network = MatchingNetwork::new(topology, self.r_l, self.z_tx)?;
        let optics = OpticalSubsystem {
            kappa_ext,
            n_phot,
            ..self.optics
        };
        TransducerScenario::new(self.mechanical, self.bvd, network, optics, self.env, self.direction)
    }

    /// Optical quantities at the cap for a given frequency and coupling.
    fn optical_at(&self, omega_m: f64, kappa_ext: f64, n_phot: f64) -> (f64, f64, f64) {
        let ko = self.optics.kappa_i + kappa_ext;
        let (lp2, lm2) = sideband_amplitudes(ko, self.optics.detuning(omega_m), omega_m);
        let c_om = cooperativity_om(enhanced_coupling(self.optics.g0, n_phot), self.gamma_m(), ko);
        (c_om, lp2, lm2)
    }

    /// Electrical load that matches the cooperativities at `omega_m`.
    fn optimal_load(&self, omega_m: f64) -> Result<(f64, f64)> {
        let cav = self.capped_optics();
        let kext = kappa_ext_max_eta(&cav, self.gamma_m(), omega_m, self.kappa_ext_rule)?;
        let (c_om, lp2, lm2) = self.optical_at(omega_m, kext, cav.n_phot);
        Ok((self.bvd.r_m * (1.0 + c_om * (lp2 - lm2)), kext))
    }

    fn capped_optics(&self) -> OpticalSubsystem {
        OpticalSubsystem {
            n_phot: self.optics.n_phot_cap,
            ..self.optics
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub network: MatchingNetwork,
    pub kappa_ext: f64,
    pub n_phot: f64,
    pub omega_m: f64,
    pub scenario: TransducerScenario,
    pub fom: FiguresOfMerit,
    pub feasibility_notes: Vec<String>,
}

impl DesignResult {
    fn from_scenario(scenario: TransducerScenario, notes: Vec<String>) -> Self {
        DesignResult {
            network: scenario.network,
            kappa_ext: scenario.optics.kappa_ext,
            n_phot: scenario.optics.n_phot,
            omega_m: scenario.omega_m(),
            fom: figures_of_merit(&scenario),
            scenario,
            feasibility_notes: notes,
        }
    }
}

/// Total capacitance that resonates with the loaded motional arm at the
/// frequency where it uptransforms the series resistance to `r_opt`.
fn closed_form_capacitance(bvd: &BvdParams, r_opt: f64, r_series: f64) -> f64 {
    let ws2 = bvd.omega_s().powi(2);
    0.5 * bvd.c_m * ((1.0 + 4.0 / (r_opt * ws2 * bvd.c_m * bvd.c_m * r_series)).sqrt() - 1.0)
}

fn uptransform_feasible(bvd: &BvdParams, r_opt: f64, r_series: f64) -> Result<()> {
    let ws2 = bvd.omega_s().powi(2);
    let cond = r_opt * ws2 * bvd.c_0 * (bvd.c_m + bvd.c_0) * r_series;
    if cond > 1.0 {
        return Err(Error::InfeasibleUptransform(format!(
            "target load {r_opt:.4e} ohm needs negative tuning capacitance (condition {cond:.4e} > 1)"
        )));
    }
    if r_opt < r_series {
        return Err(Error::InfeasibleUptransform(format!(
            "target load {r_opt:.4e} ohm is below the series resistance {r_series:.4e} ohm"
        )));
    }
    Ok(())
}

/// Fixed-point iteration on the mechanical frequency. `step` maps a
/// frequency to the next estimate.
fn fixed_point<F: FnMut(f64) -> Result<f64>>(start: f64, mut step: F, what: &str) -> Result<f64> {
    let mut w = start;
    let mut last_delta = f64::INFINITY;
    let mut damping = 1.0;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let next = step(w)?;
        let delta = next - w;
        if delta.abs() <= FIXED_POINT_TOL * w.abs() {
            return Ok(next);
        }
        if delta.abs() > last_delta.abs() && delta.signum() != last_delta.signum() {
            damping = 0.5;
        }
        w += damping * delta;
        last_delta = delta;
    }
    Err(Error::NoConvergence {
        what: what.to_string(),
        iterations: FIXED_POINT_MAX_ITER,
    })
}

/// RLC network matching both cooperativities and the line impedance.
pub fn design_rlc_max_eta(req: &DesignRequest) -> Result<DesignResult> {
    let bvd = req.bvd;
    let r = req.r_series();
    let w = fixed_point(
        bvd.omega_s(),
        |w| {
            let (r_opt, _) = req.optimal_load(w)?;
            uptransform_feasible(&bvd, r_opt, r)?;
            let c = closed_form_capacitance(&bvd, r_opt, r);
            Ok(effective_resonance(&bvd, c - bvd.c_0))
        },
        "RLC self-consistency",
    )?;
    let (r_opt, kext) = req.optimal_load(w)?;
    uptransform_feasible(&bvd, r_opt, r)?;
    let c = closed_form_capacitance(&bvd, r_opt, r);
    let c_t = c - bvd.c_0;
    let w_m = effective_resonance(&bvd, c_t);
    let l = 1.0 / (w_m * w_m * c);
    let s = req.scenario(Topology::Rlc { l, c_t }, kext, req.optics.n_phot_cap)?;
    Ok(DesignResult::from_scenario(s, Vec::new()))
}

/// Tuning capacitance and resonance of an RC network presenting `target`
/// to the motional arm.
fn rc_elements(bvd: &BvdParams, r_series: f64, target: f64) -> Result<(f64, f64)> {
    let ws = bvd.omega_s();
    if !(target > 0.0 && target <= r_series) {
        return Err(Error::InfeasibleDowntransform(format!(
            "target load {target:.4e} ohm outside (0, {r_series:.4e}]"
        )));
    }
    let x = (r_series / target - 1.0).sqrt();
    let a = ws * ws * target * bvd.c_m * x;
    let w = 0.5 * (a + (a * a + 4.0 * ws * ws).sqrt());
    let c_t = x / (w * r_series) - bvd.c_0;
    let at_zero = r_series / (1.0 + (r_series * bvd.c_0 * w).powi(2));
    if c_t < 0.0 || at_zero < target {
        return Err(Error::InfeasibleDowntransform(format!(
            "bare load {at_zero:.4e} ohm already below target {target:.4e} ohm"
        )));
    }
    Ok((c_t, w))
}

/// RC network presenting a fixed load `target_r_em` to the motional arm.
/// The cavity coupling follows the efficiency rule at the resulting
/// resonance.
pub fn design_rc(req: &DesignRequest, target_r_em: f64) -> Result<DesignResult> {
    let (c_t, w) = rc_elements(&req.bvd, req.r_series(), target_r_em)?;
    let kext = kappa_ext_max_eta(&req.capped_optics(), req.gamma_m(), w, req.kappa_ext_rule)?;
    let s = req.scenario(Topology::Rc { c_t }, kext, req.optics.n_phot_cap)?;
    Ok(DesignResult::from_scenario(s, Vec::new()))
}

/// RC network matching the cooperativities, iterated to self-consistency.
fn design_rc_max_eta(req: &DesignRequest) -> Result<DesignResult> {
    let r = req.r_series();
    let w = fixed_point(
        req.bvd.omega_s(),
        |w| {
            let (r_opt, _) = req.optimal_load(w)?;
            Ok(rc_elements(&req.bvd, r, r_opt)?.1)
        },
        "RC self-consistency",
    )?;
    let (r_opt, _) = req.optimal_load(w)?;
    design_rc(req, r_opt)
}

/// RL network with the largest electromechanical cooperativity.
pub fn design_rl_min_noise(req: &DesignRequest) -> Result<DesignResult> {
    let bvd = req.bvd;
    let w = effective_resonance(&bvd, 0.0);
    let l = 1.0 / (w * w * bvd.c_0);
    let n_m = thermal_occupancy(w, req.env.t);
    let cap = req.optics.n_phot_cap;
    let c_em_max = bvd.k2() / (req.gamma_m() * bvd.c_0 * req.r_series());
    let mut notes = Vec::new();

    let ki = req.optics.kappa_i;
    let (c_cap, lp2, lm2) = req.optical_at(w, ki, cap);
    let c_target = (1.0 + c_em_max) / (lp2 - lm2);
    let (kext, n_phot) = if lp2 > lm2 && c_target <= c_cap && lm2 < LM2_RESOLVED && c_target * lm2 <= n_m {
        notes.push("optomechanical cooperativity set to its noise optimum".to_string());
        (ki, cap * c_target / c_cap)
    } else {
        let (kext, n) = kappa_ext_min_noise(&req.optics, req.gamma_m(), w, n_m);
        if kext < ki {
            notes.push(format!(
                "amplification noise dominates: undercoupled cavity, photon number reduced to {n:.4}"
            ));
        }
        (kext, n)
    };
    let s = req.scenario(Topology::Rl { l }, kext, n_phot)?;
    Ok(DesignResult::from_scenario(s, notes))
}

/// Design flow for a request. Never fails for a valid request: an
/// infeasible uptransform falls back to an RC network, and an infeasible
/// RC network to the bare device.
pub fn design(req: &DesignRequest) -> Result<DesignResult> {
    match req.mode {
        DesignMode::MinimizeNoise => design_rl_min_noise(req),
        DesignMode::MaximizeEta => match design_rlc_max_eta(req) {
            Ok(r) => Ok(r),
            Err(Error::InfeasibleUptransform(why)) => match design_rc_max_eta(req) {
                Ok(mut r) => {
                    r.feasibility_notes.push(format!("RC fallback: {why}"));
                    Ok(r)
                }
                Err(Error::InfeasibleDowntransform(why2)) => {
                    let kext = kappa_ext_max_eta(
                        &req.capped_optics(),
                        req.gamma_m(),
                        req.bvd.omega_s(),
                        req.kappa_ext_rule,
                    )?;
                    let s = req.scenario(Topology::Bare, kext, req.optics.n_phot_cap)?;
                    Ok(DesignResult::from_scenario(
                        s,
                        vec![format!("RC fallback: {why}"), format!("bare device kept: {why2}")],
                    ))
                }
                Err(e) => Err(e),
            },
            Err(e) => Err(e),
        },
    }
}

/// Figures of merit of a scenario.
pub fn evaluate(scenario: &TransducerScenario) -> FiguresOfMerit {
    figures_of_merit(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit_model::{bvd_from_motional, bvd_from_physical};
    use crate::optomech::default_omega_o;
    use std::f64::consts::PI;

    const TP: f64 = 2.0 * PI;

    fn request(bvd: BvdParams, gamma_hz: f64, q_i: f64, g0_hz: f64, n: f64, mode: DesignMode) -> DesignRequest {
        let mechanical = MechanicalMode::new(bvd.omega_s(), TP * gamma_hz, None).unwrap();
        DesignRequest {
            mechanical,
            bvd,
            optics: OpticalSubsystem {
                omega_o: default_omega_o(),
                kappa_i: default_omega_o() / q_i,
                kappa_ext: 0.0,
                delta: None,
                g0: TP * g0_hz,
                n_phot: n,
                n_phot_cap: n,
            },
            env: Environment::new(0.1).unwrap(),
            mode,
            z_tx: 50.0,
            r_l: 0.0,
            kappa_ext_rule: KappaExtRule::Optimize,
            direction: Direction::ElectricalToOptical,
        }
    }

    fn gaas(mode: DesignMode) -> DesignRequest {
        let bvd = bvd_from_motional(TP * 2.328e9, TP * 240e3, 0.6e-15, 0.128e-18).unwrap();
        request(bvd, 240e3, 77_000.0, 300e3, 280.0, mode)
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() <= rel
    }

    #[test]
    fn gaas_rlc_design() {
        let r = design_rlc_max_eta(&gaas(DesignMode::MaximizeEta)).unwrap();
        let Topology::Rlc { l, c_t } = r.network.topology else { panic!() };
        assert!(close(c_t, 39.41e-15, 0.02), "{c_t}");
        assert!(close(l, 117e-9, 0.02), "{l}");
        assert!(close(r.fom.eta_peak, 0.039, 0.03));
        assert!(close(r.fom.n_total, 0.48, 0.05));
        assert!(r.fom.s11_at_wm < 1e-6);
        let target = 1.0 + r.fom.c_om * (r.fom.lp2 - r.fom.lm2);
        assert!(close(r.fom.c_em, target, 1e-6));
        assert!(close(r.omega_m, effective_resonance(&r.scenario.bvd, c_t), 1e-9));
        assert!(r.scenario.matched());
    }

    #[test]
    fn closed_form_capacitance_is_self_consistent() {
        let b = bvd_from_motional(TP * 2.328e9, TP * 240e3, 0.6e-15, 0.128e-18).unwrap();
        let r_opt = 60e3;
        let c = closed_form_capacitance(&b, r_opt, 50.0);
        let w = effective_resonance(&b, c - b.c_0);
        assert!(close(c, 1.0 / (w * (r_opt * 50.0f64).sqrt()), 1e-12));
    }

    #[test]
    fn low_impedance_device_falls_back_to_rc() {
        let bvd = bvd_from_physical(TP * 2.4e9, TP * 65e3, 2e-15, 0.1).unwrap();
        let req = request(bvd, 65e3, 1e6, 40e3, 1000.0, DesignMode::MaximizeEta);
        assert!(matches!(design_rlc_max_eta(&req), Err(Error::InfeasibleUptransform(_))));
        let r = design(&req).unwrap();
        assert!(matches!(r.network.topology, Topology::Rc { .. }));
        assert!(r.feasibility_notes.iter().any(|n| n.contains("RC fallback")));
        assert!(close(r.network.c_t(), 2.666e-12, 0.05), "{}", r.network.c_t());
        assert!(close(r.fom.eta_peak, 0.103, 0.05));
        let target = 1.0 + r.fom.c_om * (r.fom.lp2 - r.fom.lm2);
        assert!(close(r.fom.c_em, target, 1e-6));
    }

    #[test]
    fn rc_design_reaches_target_and_rejects_unreachable() {
        let bvd = bvd_from_physical(TP * 2.4e9, TP * 65e3, 2e-15, 0.1).unwrap();
        let req = request(bvd, 65e3, 1e6, 40e3, 1000.0, DesignMode::MaximizeEta);
        let r = design_rc(&req, 10.0).unwrap();
        assert!(close(r.fom.r_em, 10.0, 1e-6));
        assert!(matches!(design_rc(&req, 60.0), Err(Error::InfeasibleDowntransform(_))));
    }

    #[test]
    fn short_time_constant_degenerates_to_bare() {
        let bvd = bvd_from_physical(TP * 2.4e9, TP * 65e3, 1e-21, 0.1).unwrap();
        let req = request(bvd, 65e3, 1e6, 40e3, 1000.0, DesignMode::MaximizeEta);
        let target = 50.0 * (1.0 - 1e-12);
        let r = design_rc(&req, target).unwrap();
        let c_total = (50.0 / target - 1.0).sqrt() / (r.omega_m * 50.0);
        assert!(close(r.network.c_t() + bvd.c_0, c_total, 1e-3), "{}", r.network.c_t());
    }

    #[test]
    fn gaas_min_noise_design() {
        let bvd = bvd_from_physical(TP * 2.328e9, TP * 240e3, 0.6e-15, 0.022e-2).unwrap();
        let req = request(bvd, 240e3, 77_000.0, 300e3, 280.0, DesignMode::MinimizeNoise);
        let r = design_rl_min_noise(&req).unwrap();
        assert!(close(r.fom.c_em, 4860.0, 0.02));
        let max = bvd.k2() / (bvd.gamma_m() * bvd.c_0 * 50.0);
        assert!(close(r.fom.c_em, max, 1e-6));
        assert!(close(r.fom.n_total, 1e-4, 0.1), "{}", r.fom.n_total);
        assert!(close(r.fom.eta_peak, 3.4e-5, 0.05), "{}", r.fom.eta_peak);
        assert!(r.fom.bandwidth.value().is_none());
        assert_eq!(r.fom.eta_o, 0.5);
    }

    #[test]
    fn vanishing_coupling_gives_unbounded_noise() {
        let bvd = bvd_from_physical(TP * 2.328e9, TP * 240e3, 0.6e-15, 1e-30).unwrap();
        let req = request(bvd, 240e3, 77_000.0, 300e3, 280.0, DesignMode::MinimizeNoise);
        let r = design_rl_min_noise(&req).unwrap();
        assert!(r.fom.c_em < 1e-15);
        assert!(r.fom.n_total > 1e15);
    }

    #[test]
    fn min_noise_beats_max_eta_on_noise() {
        let a = design(&gaas(DesignMode::MinimizeNoise)).unwrap();
        let b = design(&gaas(DesignMode::MaximizeEta)).unwrap();
        assert!(a.fom.n_total <= b.fom.n_total);
    }
}
