//! Optical cavity, pump and optomechanical coupling.

use crate::circuit_model::C_LIGHT;
use crate::error::{domain, Error, Result};
use std::f64::consts::PI;

/// Telecom cavity resonance used when none is given.
pub fn default_omega_o() -> f64 {
    2.0 * PI * C_LIGHT / 1550e-9
}

/// Optical cavity, pump and single-photon coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalSubsystem {
    pub omega_o: f64,
    pub kappa_i: f64,
    pub kappa_ext: f64,
    /// Pump detuning from the cavity. `None` tracks the red sideband,
    /// `Delta = -omega_m`.
    pub delta: Option<f64>,
    pub g0: f64,
    pub n_phot: f64,
    pub n_phot_cap: f64,
}

impl OpticalSubsystem {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_o > 0.0 && self.omega_o.is_finite()) {
            return domain("omega_o must be positive");
        }
        if !(self.kappa_i > 0.0 && self.kappa_i.is_finite()) {
            return domain("kappa_i must be positive");
        }
        if !(self.kappa_ext >= 0.0 && self.kappa_ext.is_finite()) {
            return domain("kappa_ext must be non-negative");
        }
        if !(self.g0 >= 0.0 && self.g0.is_finite()) {
            return domain("g0 must be non-negative");
        }
        if !(self.n_phot >= 0.0 && self.n_phot <= self.n_phot_cap) {
            return domain("n_phot must lie in [0, n_phot_cap]");
        }
        if let Some(d) = self.delta {
            if !d.is_finite() {
                return domain("detuning must be finite");
            }
        }
        Ok(())
    }

    pub fn kappa_o(&self) -> f64 {
        self.kappa_i + self.kappa_ext
    }

    pub fn q_o(&self) -> f64 {
        self.omega_o / self.kappa_o()
    }

    pub fn q_i(&self) -> f64 {
        self.omega_o / self.kappa_i
    }

    pub fn detuning(&self, omega_m: f64) -> f64 {
        self.delta.unwrap_or(-omega_m)
    }

    pub fn g_om(&self) -> f64 {
        enhanced_coupling(self.g0, self.n_phot)
    }
}

/// Lorentzian weights of the cavity at the upper and lower motional sidebands.
pub fn sideband_amplitudes(kappa_o: f64, delta: f64, omega_m: f64) -> (f64, f64) {
    let h2 = (kappa_o / 2.0).powi(2);
    let lp2 = h2 / (h2 + (delta + omega_m).powi(2));
    let lm2 = h2 / (h2 + (delta - omega_m).powi(2));
    (lp2, lm2)
}

/// Pump-enhanced coupling rate.
pub fn enhanced_coupling(g0: f64, n_phot: f64) -> f64 {
    g0 * n_phot.sqrt()
}

pub fn cooperativity_om(g_om: f64, gamma_m: f64, kappa_o: f64) -> f64 {
    4.0 * g_om * g_om / (gamma_m * kappa_o)
}

/// Equivalent resistances of optomechanical damping and anti-damping.
pub fn om_resistances(r_m: f64, c_om: f64, lp2: f64, lm2: f64) -> (f64, f64) {
    (r_m * c_om * lp2, r_m * c_om * lm2)
}

pub fn eta_optical(kappa_ext: f64, kappa_i: f64) -> f64 {
    kappa_ext / (kappa_ext + kappa_i)
}

/// Peak efficiency at cooperativity matching, per unit electrical
/// efficiency, as a function of the external coupling rate.
pub fn eta_matched(cavity: &OpticalSubsystem, gamma_m: f64, omega_m: f64, kappa_ext: f64) -> f64 {
    let kappa_o = cavity.kappa_i + kappa_ext;
    let (lp2, lm2) = sideband_amplitudes(kappa_o, cavity.detuning(omega_m), omega_m);
    let c_om = cooperativity_om(cavity.g_om(), gamma_m, kappa_o);
    eta_optical(kappa_ext, cavity.kappa_i) * c_om * lp2 / (1.0 + c_om * (lp2 - lm2))
}

/// Closed-form external coupling maximizing efficiency in the resolved
/// sideband limit.
pub fn kappa_ext_closed_form(cavity: &OpticalSubsystem, gamma_m: f64) -> f64 {
    let c_om_i = cooperativity_om(cavity.g_om(), gamma_m, cavity.kappa_i);
    cavity.kappa_i * (1.0 + c_om_i).sqrt()
}

/// Rule used to choose the external coupling in the efficiency regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KappaExtRule {
    /// Bounded numeric maximization of the exact matched efficiency.
    #[default]
    Optimize,
    /// Resolved-sideband closed form.
    ClosedForm,
}

impl KappaExtRule {
    pub fn name(&self) -> &'static str {
        match self {
            KappaExtRule::Optimize => "optimize",
            KappaExtRule::ClosedForm => "closed_form",
        }
    }
}

pub const GOLDEN_REL_TOL: f64 = 1e-6;
pub const GOLDEN_MAX_ITER: usize = 200;

/// Search bracket for the external coupling, relative to kappa_i.
pub const KAPPA_EXT_SPAN: f64 = 100.0;

/// Maximizes a unimodal function on `[lo, hi]` by golden-section search.
/// Terminates when the bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            let x = 0.5 * (a + b);
            return Ok(x);
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    Err(Error::NoConvergence {
        what: "golden-section search".into(),
        iterations: max_iter,
    })
}

/// Smallest `x` in `[lo, hi]` where `f` crosses `level`, assuming
/// `f(lo) <= level < f(hi)`.
fn lower_crossing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, level: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs() {
            break;
        }
    }
    lo
}

/// External coupling maximizing the matched peak efficiency at fixed pump
/// power. Amplifying operating points (matched efficiency above unity) are
/// excluded; when the unconstrained optimum amplifies, the lowest coupling
/// reaching unit efficiency is returned.
pub fn kappa_ext_max_eta(
    cavity: &OpticalSubsystem,
    gamma_m: f64,
    omega_m: f64,
    rule: KappaExtRule,
) -> Result<f64> {
    let ki = cavity.kappa_i;
    let obj = |ln_k: f64| eta_matched(cavity, gamma_m, omega_m, ln_k.exp());
    let lo = (ki / KAPPA_EXT_SPAN).ln();
    let hi = (ki * KAPPA_EXT_SPAN).ln();
    let ln_best = match rule {
        KappaExtRule::ClosedForm => kappa_ext_closed_form(cavity, gamma_m).ln(),
        KappaExtRule::Optimize => golden_section_max(obj, lo, hi, GOLDEN_REL_TOL, GOLDEN_MAX_ITER)?,
    };
    if obj(ln_best) <= 1.0 || obj(lo) > 1.0 {
        return Ok(ln_best.exp());
    }
    Ok(lower_crossing(obj, lo, ln_best, 1.0).exp())
}

/// External coupling and photon number for the noise-minimizing regime.
/// Critical coupling at the photon cap unless amplification noise would
/// exceed the thermal occupancy, in which case the cavity is undercoupled to
/// kappa_i/2 and the pump reduced until both noise sources balance.
pub fn kappa_ext_min_noise(
    cavity: &OpticalSubsystem,
    gamma_m: f64,
    omega_m: f64,
    n_m: f64,
) -> (f64, f64) {
    let ki = cavity.kappa_i;
    let delta = cavity.detuning(omega_m);
    let amp_noise = |kext: f64, n: f64| {
        let ko = ki + kext;
        let (_, lm2) = sideband_amplitudes(ko, delta, omega_m);
        cooperativity_om(enhanced_coupling(cavity.g0, n), gamma_m, ko) * lm2
    };
    let cap = cavity.n_phot_cap;
    if amp_noise(ki, cap) < n_m {
        return (ki, cap);
    }
    let kext = 0.5 * ki;
    let per_photon = amp_noise(kext, 1.0);
    let n = if per_photon > 0.0 {
        (n_m / per_photon).min(cap)
    } else {
        cap
    };
    (kext, n)
}
