//! Electrical side of the transducer: the Butterworth-van Dyke resonator,
//! the matching network and the impedances seen from the transmission line.
//!
//! All quantities are SI with angular frequencies in rad/s. The phasor
//! convention is `exp(-i w t)`, so a capacitor has impedance `1/(-i w C)`.

use crate::error::{domain, Result};
use num_complex::Complex64;

/// CODATA constants used throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        k_b: 1.380_649e-23,
        c: 299_792_458.0,
    };
}

pub const HBAR: f64 = PhysicalConstants::CODATA.hbar;
pub const K_B: f64 = PhysicalConstants::CODATA.k_b;
pub const C_LIGHT: f64 = PhysicalConstants::CODATA.c;

/// Mechanical mode of the hybridized resonator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalMode {
    /// Series resonance in rad/s.
    pub omega_s: f64,
    /// Energy loss rate in rad/s.
    pub gamma_m: f64,
    /// Effective mass in kg, carried for reference only.
    pub m_eff: Option<f64>,
}

impl MechanicalMode {
    pub fn new(omega_s: f64, gamma_m: f64, m_eff: Option<f64>) -> Result<Self> {
        if !(omega_s > 0.0 && omega_s.is_finite()) {
            return domain("omega_s must be positive and finite");
        }
        if !(gamma_m > 0.0 && gamma_m.is_finite()) {
            return domain("gamma_m must be positive and finite");
        }
        if let Some(m) = m_eff {
            if !(m > 0.0) {
                return domain("m_eff must be positive");
            }
        }
        Ok(MechanicalMode {
            omega_s,
            gamma_m,
            m_eff,
        })
    }

    pub fn q_m(&self) -> f64 {
        self.omega_s / self.gamma_m
    }
}

/// Butterworth-van Dyke equivalent circuit: motional R_m, L_m, C_m in
/// parallel with the static capacitance C_0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvdParams {
    pub r_m: f64,
    pub l_m: f64,
    pub c_m: f64,
    pub c_0: f64,
}

impl BvdParams {
    pub fn k2(&self) -> f64 {
        self.c_m / (self.c_m + self.c_0)
    }

    pub fn omega_s(&self) -> f64 {
        1.0 / (self.l_m * self.c_m).sqrt()
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_s() / (1.0 - self.k2()).sqrt()
    }

    pub fn gamma_m(&self) -> f64 {
        self.r_m / self.l_m
    }

    /// Series impedance of the motional arm, with `extra_r` added in series.
    pub fn motional_impedance(&self, omega: f64, extra_r: f64) -> Complex64 {
        Complex64::new(self.r_m + extra_r, -omega * self.l_m) + capacitor(self.c_m, omega)
    }
}

/// Impedance `1/(-i w C)` of a capacitor.
pub fn capacitor(c: f64, omega: f64) -> Complex64 {
    Complex64::new(0.0, 1.0 / (omega * c))
}

/// BVD parameters from the canonical physical inputs.
pub fn bvd_from_physical(omega_s: f64, gamma_m: f64, c_0: f64, k2: f64) -> Result<BvdParams> {
    if !(k2 > 0.0 && k2 < 1.0) {
        return domain(format!("k2 out of (0,1): {k2}"));
    }
    let c_m = c_0 * k2 / (1.0 - k2);
    bvd_from_motional(omega_s, gamma_m, c_0, c_m)
}

/// BVD parameters from a given motional capacitance.
pub fn bvd_from_motional(omega_s: f64, gamma_m: f64, c_0: f64, c_m: f64) -> Result<BvdParams> {
    for (name, v) in [
        ("omega_s", omega_s),
        ("gamma_m", gamma_m),
        ("C_0", c_0),
        ("C_m", c_m),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return domain(format!("{name} must be positive and finite"));
        }
    }
    let l_m = 1.0 / (omega_s * omega_s * c_m);
    Ok(BvdParams {
        r_m: gamma_m * l_m,
        l_m,
        c_m,
        c_0,
    })
}

/// Impedance of the bare resonator from its pole-zero form.
pub fn bvd_impedance(bvd: &BvdParams, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) {
        return domain("omega must be positive");
    }
    let ws2 = bvd.omega_s().powi(2);
    let wp2 = bvd.omega_p().powi(2);
    let damp = Complex64::new(0.0, -omega * bvd.r_m / bvd.l_m);
    let num = Complex64::new(ws2 - omega * omega, 0.0) + damp;
    let den = Complex64::new(wp2 - omega * omega, 0.0) + damp;
    Ok(capacitor(bvd.c_0, omega) * num / den)
}

/// Topology of the matching network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology {
    Bare,
    Rc { c_t: f64 },
    Rl { l: f64 },
    Rlc { l: f64, c_t: f64 },
}

impl Topology {
    pub fn name(&self) -> &'static str {
        match self {
            Topology::Bare => "bare",
            Topology::Rc { .. } => "rc",
            Topology::Rl { .. } => "rl",
            Topology::Rlc { .. } => "rlc",
        }
    }
}

/// Matching network between the transmission line and the resonator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingNetwork {
    pub topology: Topology,
    /// Series loss resistance.
    pub r_l: f64,
    /// Line impedance.
    pub z_tx: f64,
}

impl MatchingNetwork {
    pub fn new(topology: Topology, r_l: f64, z_tx: f64) -> Result<Self> {
        if !(z_tx > 0.0 && z_tx.is_finite()) {
            return domain("Z_tx must be positive");
        }
        if !(r_l >= 0.0 && r_l.is_finite()) {
            return domain("R_L must be non-negative");
        }
        let n = MatchingNetwork {
            topology,
            r_l,
            z_tx,
        };
        if !(n.c_t() >= 0.0 && n.c_t().is_finite() && n.l() >= 0.0 && n.l().is_finite()) {
            return domain("network element values must be non-negative");
        }
        Ok(n)
    }

    pub fn bare(z_tx: f64) -> Self {
        MatchingNetwork {
            topology: Topology::Bare,
            r_l: 0.0,
            z_tx,
        }
    }

    pub fn c_t(&self) -> f64 {
        match self.topology {
            Topology::Rc { c_t } | Topology::Rlc { c_t, .. } => c_t,
            _ => 0.0,
        }
    }

    pub fn l(&self) -> f64 {
        match self.topology {
            Topology::Rl { l } | Topology::Rlc { l, .. } => l,
            _ => 0.0,
        }
    }

    /// Total series resistance Z_tx + R_L.
    pub fn r_series(&self) -> f64 {
        self.z_tx + self.r_l
    }

    pub fn has_inductor(&self) -> bool {
        self.l() > 0.0
    }

    /// Electrical resonance of the LC tank, if there is an inductor.
    pub fn omega_lc(&self, bvd: &BvdParams) -> Option<f64> {
        self.has_inductor()
            .then(|| 1.0 / (self.l() * (bvd.c_0 + self.c_t())).sqrt())
    }
}

/// Bath temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    pub t: f64,
}

impl Environment {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return domain("temperature must be positive");
        }
        Ok(Environment { t })
    }
}

/// Mechanical resonance shifted by the open-circuited capacitance C_0 + C_T.
pub fn effective_resonance(bvd: &BvdParams, c_t: f64) -> f64 {
    ((1.0 / bvd.l_m) * (1.0 / bvd.c_m + 1.0 / (c_t + bvd.c_0))).sqrt()
}

/// Resonance of the motional arm loaded by `r_series` in parallel with the
/// capacitance `c_total`, i.e. the frequency at which the loaded arm has no
/// reactance. Positive root of a quadratic in `w^2`.
pub fn rc_resonance(bvd: &BvdParams, c_total: f64, r_series: f64) -> f64 {
    let ws2 = bvd.omega_s().powi(2);
    let tau = r_series * c_total;
    let a = tau * tau / ws2;
    let b = 1.0 / ws2 - tau * tau - r_series * tau * bvd.c_m;
    if a == 0.0 {
        return (1.0 / b).sqrt();
    }
    // Stable form of the positive root of a u^2 + b u - 1 = 0.
    let disc = (b * b + 4.0 * a).sqrt();
    let u = if b >= 0.0 {
        2.0 / (b + disc)
    } else {
        (disc - b) / (2.0 * a)
    };
    u.sqrt()
}

/// Effective mechanical resonance for a given network: the LC-tank form
/// with an inductor, the loaded-RC form without.
pub fn network_resonance(bvd: &BvdParams, network: &MatchingNetwork) -> f64 {
    if network.has_inductor() {
        effective_resonance(bvd, network.c_t())
    } else {
        rc_resonance(bvd, bvd.c_0 + network.c_t(), network.r_series())
    }
}

/// Bose-Einstein occupancy.
pub fn thermal_occupancy(omega: f64, t: f64) -> f64 {
    let x = HBAR * omega / (K_B * t);
    if x > 700.0 {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// Impedance seen from the line terminals: R_L and L in series with the
/// parallel combination of C_0 + C_T and the motional arm, which carries an
/// additional series resistance `arm_extra_r`.
pub fn input_impedance_with_arm(
    bvd: &BvdParams,
    network: &MatchingNetwork,
    arm_extra_r: f64,
    omega: f64,
) -> Result<Complex64> {
    if !(omega > 0.0) {
        return domain("omega must be positive");
    }
    let c = bvd.c_0 + network.c_t();
    let y = Complex64::new(0.0, -omega * c) + bvd.motional_impedance(omega, arm_extra_r).inv();
    Ok(Complex64::new(network.r_l, -omega * network.l()) + y.inv())
}

/// Magnitude of the reflection coefficient. Not clamped: an active load
/// with negative resistance reflects more than it receives.
pub fn reflection_s11(z: Complex64, z_tx: f64) -> f64 {
    ((z - z_tx) / (z + z_tx)).norm()
}

/// How the electrical decay rate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayKind {
    /// LC tank: kappa_e = (Z_tx + R_L)/L.
    Tank,
    /// No inductor: kappa_tx = R_EM/L_m.
    Transmission,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectricalSummary {
    pub eta_e: f64,
    /// kappa_e or kappa_tx depending on `kind`, rad/s.
    pub kappa: f64,
    pub kind: DecayKind,
    pub q_lc: Option<f64>,
    pub z_lc: Option<f64>,
    pub r_em: f64,
}

pub fn electrical_summary(
    network: &MatchingNetwork,
    bvd: &BvdParams,
    omega_m: f64,
) -> Result<ElectricalSummary> {
    if !(omega_m > 0.0) {
        return domain("omega_m must be positive");
    }
    let r = network.r_series();
    let c = bvd.c_0 + network.c_t();
    let eta_e = network.z_tx / r;
    if network.has_inductor() {
        let l = network.l();
        let z_lc = (l / c).sqrt();
        let r_em = z_lc * z_lc / r;
        Ok(ElectricalSummary {
            eta_e,
            kappa: r / l,
            kind: DecayKind::Tank,
            q_lc: Some(z_lc / r),
            z_lc: Some(z_lc),
            r_em,
        })
    } else {
        let tau = r * c;
        let r_em = r / (1.0 + (tau * omega_m).powi(2));
        Ok(ElectricalSummary {
            eta_e,
            kappa: r_em / bvd.l_m,
            kind: DecayKind::Transmission,
            q_lc: None,
            z_lc: None,
            r_em,
        })
    }
}
