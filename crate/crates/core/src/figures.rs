//! Figures of merit: efficiency, added noise, bandwidth and spectra.

use crate::circuit_model::{
    electrical_summary, input_impedance_with_arm, network_resonance, reflection_s11,
    thermal_occupancy, BvdParams, DecayKind, ElectricalSummary, Environment, MatchingNetwork,
    MechanicalMode,
};
use crate::error::{domain, Error, Result};
use crate::optomech::{cooperativity_om, eta_optical, om_resistances, sideband_amplitudes, OpticalSubsystem};
use num_complex::Complex64;

/// Relative mismatch between LC and mechanical resonances below which a
/// tank network counts as matched.
pub const MATCH_TOL: f64 = 1e-6;

/// Bandwidth is taken as adiabatic below this fraction of the electrical
/// linewidth.
pub const ADIABATIC_FRACTION: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ElectricalToOptical,
    OpticalToElectrical,
}

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::ElectricalToOptical => "forward",
            Direction::OpticalToElectrical => "reverse",
        }
    }
}

/// A fully specified transducer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransducerScenario {
    pub mechanical: MechanicalMode,
    pub bvd: BvdParams,
    pub network: MatchingNetwork,
    pub optics: OpticalSubsystem,
    pub env: Environment,
    pub direction: Direction,
}

impl TransducerScenario {
    pub fn new(
        mechanical: MechanicalMode,
        bvd: BvdParams,
        network: MatchingNetwork,
        optics: OpticalSubsystem,
        env: Environment,
        direction: Direction,
    ) -> Result<Self> {
        optics.validate()?;
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        if rel(bvd.omega_s(), mechanical.omega_s) > 1e-9 || rel(bvd.gamma_m(), mechanical.gamma_m) > 1e-9 {
            return domain("BVD elements inconsistent with the mechanical mode");
        }
        Ok(TransducerScenario {
            mechanical,
            bvd,
            network,
            optics,
            env,
            direction,
        })
    }

    pub fn omega_m(&self) -> f64 {
        network_resonance(&self.bvd, &self.network)
    }

    pub fn omega_lc(&self) -> Option<f64> {
        self.network.omega_lc(&self.bvd)
    }

    /// True for a tank network tuned to the mechanical resonance, and for
    /// networks without an inductor, which resonate by construction.
    pub fn matched(&self) -> bool {
        match self.omega_lc() {
            Some(w_lc) => ((w_lc - self.omega_m()) / self.omega_m()).abs() < MATCH_TOL,
            None => true,
        }
    }

    pub fn optical_loading(&self) -> OpticalLoading {
        let w = self.omega_m();
        let ko = self.optics.kappa_o();
        let (lp2, lm2) = sideband_amplitudes(ko, self.optics.detuning(w), w);
        OpticalLoading {
            eta_o: eta_optical(self.optics.kappa_ext, self.optics.kappa_i),
            c_om: cooperativity_om(self.optics.g_om(), self.mechanical.gamma_m, ko),
            lp2,
            lm2,
        }
    }

    pub fn operating_point(&self) -> OperatingPoint {
        OperatingPoint::new(self.bvd, self.network, self.env, self.optical_loading())
    }

    pub fn input_impedance(&self, omega: f64) -> Result<Complex64> {
        self.operating_point().input_impedance(omega)
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }
}

/// Optical side reduced to what the mechanical loop sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalLoading {
    pub eta_o: f64,
    pub c_om: f64,
    pub lp2: f64,
    pub lm2: f64,
}

/// Circuit plus optical loading at the mechanical resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub bvd: BvdParams,
    pub network: MatchingNetwork,
    pub env: Environment,
    pub loading: OpticalLoading,
    pub omega_m: f64,
}

/// Spectral quantities at one Fourier frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub eta: f64,
    pub n_mech: f64,
    pub n_opt: f64,
}

impl SpectralPoint {
    pub fn n(&self) -> f64 {
        self.n_mech + self.n_opt
    }
}

impl OperatingPoint {
    pub fn new(bvd: BvdParams, network: MatchingNetwork, env: Environment, loading: OpticalLoading) -> Self {
        OperatingPoint {
            bvd,
            network,
            env,
            loading,
            omega_m: network_resonance(&bvd, &network),
        }
    }

    pub fn gamma_m(&self) -> f64 {
        self.bvd.gamma_m()
    }

    pub fn r_om(&self) -> (f64, f64) {
        om_resistances(self.bvd.r_m, self.loading.c_om, self.loading.lp2, self.loading.lm2)
    }

    pub fn electrical(&self) -> ElectricalSummary {
        electrical_summary(&self.network, &self.bvd, self.omega_m)
            .expect("operating point frequency is positive")
    }

    pub fn c_em(&self) -> f64 {
        self.electrical().r_em / self.bvd.r_m
    }

    /// Net optical broadening C_OM (L+^2 - L-^2).
    pub fn optical_broadening(&self) -> f64 {
        self.loading.c_om * (self.loading.lp2 - self.loading.lm2)
    }

    pub fn n_m(&self) -> f64 {
        thermal_occupancy(self.omega_m, self.env.t)
    }

    pub fn matched(&self) -> bool {
        match self.network.omega_lc(&self.bvd) {
            Some(w_lc) => ((w_lc - self.omega_m) / self.omega_m).abs() < MATCH_TOL,
            None => true,
        }
    }

    pub fn input_impedance(&self, omega: f64) -> Result<Complex64> {
        let (rp, rm) = self.r_om();
        input_impedance_with_arm(&self.bvd, &self.network, rp - rm, omega)
    }

    /// Electromechanical coupling rate; defined only with an LC tank.
    pub fn g_em(&self) -> Option<f64> {
        let w_lc = self.network.omega_lc(&self.bvd)?;
        let kt2 = self.bvd.c_m / (self.bvd.c_m + self.bvd.c_0 + self.network.c_t());
        Some(g_em_general(kt2, self.omega_m, w_lc))
    }

    /// Linewidth of the electrical circuit: kappa_e with a tank, the
    /// inverse RC time constant without.
    pub fn electrical_linewidth(&self) -> f64 {
        let e = self.electrical();
        match e.kind {
            DecayKind::Tank => e.kappa,
            DecayKind::Transmission => {
                1.0 / (self.network.r_series() * (self.bvd.c_0 + self.network.c_t()))
            }
        }
    }

    /// Closed-form peak efficiency at the resonance.
    pub fn eta_closed_form(&self) -> f64 {
        let e = self.electrical();
        eta_from_cooperativities(e.eta_e, e.r_em / self.bvd.r_m, &self.loading)
    }

    /// Closed-form forward noise (N_o, N_m).
    pub fn noise_closed_form(&self) -> (f64, f64) {
        let e = self.electrical();
        let c_em = e.r_em / self.bvd.r_m;
        if c_em == 0.0 {
            return (f64::INFINITY, f64::INFINITY);
        }
        let n_o = self.loading.c_om * self.loading.lm2 / (e.eta_e * c_em);
        let n_m = self.n_m() / (e.eta_e * c_em);
        (n_o, n_m)
    }

    /// Exact circuit solution at Fourier frequency `omega`.
    pub fn spectral_point(&self, omega: f64) -> SpectralPoint {
        let c = self.bvd.c_0 + self.network.c_t();
        let r = self.network.r_series();
        let (rp, rm) = self.r_om();
        let x_c = 1.0 / (omega * c);
        let z_e = Complex64::new(r, x_c - omega * self.network.l());
        let z_om = self.bvd.motional_impedance(omega, rp - rm);
        let z_meff = z_om + Complex64::new(0.0, x_c) + x_c * x_c / z_e;
        let wcz = omega * c * z_e;
        let eta_e = self.network.z_tx / r;
        let eta = eta_e * self.loading.eta_o * 4.0 * r * rp * (self.omega_m / omega)
            / (wcz * z_meff).norm_sqr();
        let pref = wcz.norm_sqr() / (eta_e * omega * r);
        SpectralPoint {
            eta,
            n_mech: pref * thermal_occupancy(omega, self.env.t) * self.bvd.r_m * omega,
            n_opt: pref * self.omega_m * rm,
        }
    }

    /// Peak efficiency and forward noise at the resonance; exact circuit
    /// solution when a tank is detuned from the mechanics.
    pub fn resonant_values(&self) -> (f64, f64, f64) {
        if self.matched() {
            let (n_o, n_m) = self.noise_closed_form();
            (self.eta_closed_form(), n_o, n_m)
        } else {
            let p = self.spectral_point(self.omega_m);
            (p.eta, p.n_opt, p.n_mech)
        }
    }

    pub fn bandwidth(&self) -> Bandwidth {
        bandwidth_from(
            self.gamma_m() * (1.0 + self.c_em() + self.optical_broadening()),
            self.g_em(),
            self.electrical_linewidth(),
        )
    }

    pub fn spectrum(&self, omega_grid: &[f64]) -> Result<Spectrum> {
        validate_grid(omega_grid, self.omega_m)?;
        let mut out = Spectrum::default();
        for &w in omega_grid {
            let p = self.spectral_point(w);
            let z = self.input_impedance(w)?;
            out.omega.push(w);
            out.eta.push(p.eta);
            out.n.push(p.n());
            out.z.push(z);
            out.s11.push(reflection_s11(z, self.network.z_tx));
        }
        Ok(out)
    }
}

/// Electromechanical coupling rate from the reduced coupling coefficient.
pub fn g_em(kt2: f64, omega_m: f64) -> f64 {
    kt2.max(0.0).sqrt() * omega_m / 2.0
}

/// Electromechanical coupling rate with detuned LC and mechanical resonances.
pub fn g_em_general(kt2: f64, omega_m: f64, omega_lc: f64) -> f64 {
    (omega_m * omega_lc).sqrt() * kt2.max(0.0).sqrt() / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// Broadened mechanical linewidth, well inside the electrical linewidth.
    Adiabatic(f64),
    /// Broadened mechanical linewidth, but comparable to the electrical
    /// linewidth so the value is only indicative.
    NonAdiabatic(f64),
    /// Normal-mode splitting; no single bandwidth.
    ModeSplitting,
}

impl Bandwidth {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Bandwidth::Adiabatic(v) | Bandwidth::NonAdiabatic(v) => Some(v),
            Bandwidth::ModeSplitting => None,
        }
    }
}

fn bandwidth_from(delta_omega: f64, g_em: Option<f64>, linewidth: f64) -> Bandwidth {
    if let Some(g) = g_em {
        if 2.0 * g > linewidth {
            return Bandwidth::ModeSplitting;
        }
    }
    if delta_omega < ADIABATIC_FRACTION * linewidth {
        Bandwidth::Adiabatic(delta_omega)
    } else {
        Bandwidth::NonAdiabatic(delta_omega)
    }
}

/// Sampled spectra over a frequency grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub eta: Vec<f64>,
    pub n: Vec<f64>,
    pub z: Vec<Complex64>,
    pub s11: Vec<f64>,
}

fn validate_grid(grid: &[f64], omega_m: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Grid("empty frequency grid".into()));
    }
    if grid.iter().any(|&w| !(w > 0.0 && w < 2.0 * omega_m)) {
        return Err(Error::Grid("grid must lie within (0, 2 omega_m)".into()));
    }
    if grid.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::Grid("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Every figure of merit for a scenario at its mechanical resonance.
#[derive(Debug, Clone, PartialEq)]
pub struct FiguresOfMerit {
    pub direction: Direction,
    pub omega_m: f64,
    pub omega_lc: Option<f64>,
    pub matched: bool,
    pub n_m: f64,
    pub eta_e: f64,
    pub eta_o: f64,
    pub kappa_el: f64,
    pub decay_kind: DecayKind,
    pub g_em: Option<f64>,
    pub r_em: f64,
    pub c_em: f64,
    pub c_om: f64,
    pub lp2: f64,
    pub lm2: f64,
    pub kappa_ext: f64,
    pub kappa_o: f64,
    pub q_o: f64,
    pub n_phot: f64,
    pub g_om: f64,
    pub z_at_wm: Complex64,
    pub s11_at_wm: f64,
    pub eta_peak: f64,
    pub bandwidth: Bandwidth,
    pub n_total: f64,
    pub n_o: f64,
    pub n_mech: f64,
    /// Added noise for optical-to-electrical conversion, if requested.
    pub reverse: Option<ReverseNoise>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReverseNoise {
    pub n_total: f64,
    pub n_o: f64,
    pub n_mech: f64,
}

/// Peak transfer efficiency for given cooperativities and sideband weights.
pub fn eta_from_cooperativities(eta_e: f64, c_em: f64, loading: &OpticalLoading) -> f64 {
    let l = loading;
    let d = 1.0 + c_em + l.c_om * (l.lp2 - l.lm2);
    eta_e * l.eta_o * 4.0 * c_em * l.c_om * l.lp2 / (d * d)
}

/// Peak transfer efficiency at the mechanical resonance.
pub fn eta_peak(scenario: &TransducerScenario) -> f64 {
    scenario.operating_point().resonant_values().0
}

/// Forward added noise (N, N_o, N_m).
pub fn added_noise(scenario: &TransducerScenario) -> (f64, f64, f64) {
    let (_, n_o, n_m) = scenario.operating_point().resonant_values();
    (n_o + n_m, n_o, n_m)
}

/// Added noise for optical-to-electrical conversion.
pub fn reverse_noise(scenario: &TransducerScenario) -> ReverseNoise {
    let op = scenario.operating_point();
    reverse_noise_of(&op)
}

fn reverse_noise_of(op: &OperatingPoint) -> ReverseNoise {
    let l = &op.loading;
    let n_o = l.lm2 / (l.eta_o * l.lp2);
    let n_mech = if l.c_om == 0.0 {
        f64::INFINITY
    } else {
        op.n_m() / (l.eta_o * l.lp2 * l.c_om)
    };
    ReverseNoise {
        n_total: n_o + n_mech,
        n_o,
        n_mech,
    }
}

pub fn bandwidth(scenario: &TransducerScenario) -> Bandwidth {
    scenario.operating_point().bandwidth()
}

pub fn cooperativity_em(network: &MatchingNetwork, bvd: &BvdParams, omega_m: f64) -> Result<f64> {
    Ok(electrical_summary(network, bvd, omega_m)?.r_em / bvd.r_m)
}

pub fn spectrum(scenario: &TransducerScenario, omega_grid: &[f64]) -> Result<Spectrum> {
    scenario.operating_point().spectrum(omega_grid)
}

/// Limits approached for strong optical pumping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationLimits {
    pub eta_sat: f64,
    pub n_o_sat: f64,
}

pub fn amplification_limits(eta_e: f64, loading: &OpticalLoading) -> Result<AmplificationLimits> {
    let d = loading.lp2 - loading.lm2;
    if !(d > 0.0) {
        return Err(Error::Degenerate("L+^2 must exceed L-^2".into()));
    }
    Ok(AmplificationLimits {
        eta_sat: eta_e * loading.eta_o * loading.lp2 / d,
        n_o_sat: loading.lm2 / (eta_e * d),
    })
}

/// Evaluates every figure of merit of a scenario.
pub fn figures_of_merit(scenario: &TransducerScenario) -> FiguresOfMerit {
    let op = scenario.operating_point();
    let e = op.electrical();
    let (eta, n_o, n_mech) = op.resonant_values();
    let z = op
        .input_impedance(op.omega_m)
        .expect("operating point frequency is positive");
    let mut warnings = Vec::new();
    if !op.matched() {
        warnings.push("LC resonance detuned from the mechanical resonance".to_string());
    }
    if 1.0 + op.c_em() + op.optical_broadening() <= 0.0 {
        warnings.push("net mechanical damping is not positive: unstable".to_string());
    }
    let bw = op.bandwidth();
    if let Bandwidth::NonAdiabatic(_) = bw {
        warnings.push("bandwidth comparable to the electrical linewidth".to_string());
    }
    let reverse = match scenario.direction {
        Direction::OpticalToElectrical => Some(reverse_noise_of(&op)),
        Direction::ElectricalToOptical => None,
    };
    FiguresOfMerit {
        direction: scenario.direction,
        omega_m: op.omega_m,
        omega_lc: scenario.omega_lc(),
        matched: op.matched(),
        n_m: op.n_m(),
        eta_e: e.eta_e,
        eta_o: op.loading.eta_o,
        kappa_el: e.kappa,
        decay_kind: e.kind,
        g_em: op.g_em(),
        r_em: e.r_em,
        c_em: e.r_em / op.bvd.r_m,
        c_om: op.loading.c_om,
        lp2: op.loading.lp2,
        lm2: op.loading.lm2,
        kappa_ext: scenario.optics.kappa_ext,
        kappa_o: scenario.optics.kappa_o(),
        q_o: scenario.optics.q_o(),
        n_phot: scenario.optics.n_phot,
        g_om: scenario.optics.g_om(),
        z_at_wm: z,
        s11_at_wm: reflection_s11(z, scenario.network.z_tx),
        eta_peak: eta,
        bandwidth: bw,
        n_total: n_o + n_mech,
        n_o,
        n_mech,
        reverse,
        warnings,
    }
}
