//! Heat-transfer coefficients of the glass/cell/Tedlar/water stack and the
//! per-step temperature chain: tank water, Tedlar back surface, cell.
//!
//! Temperatures are in °C except where a function says kelvin. Only the
//! radiative terms work in kelvin internally.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{to_kelvin, CollectorDesign, CONSTANTS, KELVIN_OFFSET};

/// Which loss-model refinements are active. `PREVIOUS` reproduces the
/// hourly model without edge losses or the sky-radiation correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LossModel {
    pub radiative_correction: bool,
    pub edge_loss: bool,
}

impl LossModel {
    pub const IMPROVED: LossModel = LossModel {
        radiative_correction: true,
        edge_loss: true,
    };
    pub const PREVIOUS: LossModel = LossModel {
        radiative_correction: false,
        edge_loss: false,
    };
}

impl Default for LossModel {
    fn default() -> Self {
        LossModel::IMPROVED
    }
}

/// Every coefficient derived from a design at one operating condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedCoefficients {
    /// Top loss, cell to ambient through the glass, W/m²·K.
    pub u_t: f64,
    /// Cell to Tedlar conduction, W/m²·K.
    pub u_tedlar: f64,
    pub u_b: f64,
    pub u_e: f64,
    /// Glass to Tedlar overall, W/m²·K.
    pub u_tt: f64,
    /// Glass to water overall, W/m²·K.
    pub u_tw: f64,
    pub u_l: f64,
    pub h_p1: f64,
    pub h_p2: f64,
    pub alpha_tau_eff: f64,
    pub fin_efficiency: f64,
    pub f_prime: f64,
    pub f_dblprime: f64,
    pub f_r: f64,
    /// Tank relaxation rate, 1/s.
    pub m_decay: f64,
}

pub fn conduction_coefficient(thickness: f64, conductivity: f64) -> Result<f64> {
    if !(thickness > 0.0 && conductivity > 0.0) {
        return Err(Error::Argument(format!(
            "thickness ({thickness}) and conductivity ({conductivity}) must be positive"
        )));
    }
    Ok(conductivity / thickness)
}

/// Insulation conduction in series with back-surface convection.
pub fn back_loss_coefficient(design: &CollectorDesign) -> f64 {
    1.0 / (design.insulation_thickness / design.insulation_conductivity + 1.0 / design.h_back)
}

/// Effective sky temperature in kelvin for an ambient temperature in °C.
pub fn sky_temperature(t_a: f64) -> Result<f64> {
    if !(t_a > -KELVIN_OFFSET) {
        return Err(Error::Argument(format!(
            "ambient temperature {t_a} °C is at or below absolute zero"
        )));
    }
    let t_a = to_kelvin(t_a);
    Ok(0.037_563_6 * t_a.powf(1.5) + 0.32 * t_a)
}

fn sky_linearization(t_c_k: f64, t_sky: f64, emissivity: f64) -> f64 {
    CONSTANTS.sigma * emissivity * (t_c_k * t_c_k + t_sky * t_sky) * (t_c_k + t_sky)
}

/// Radiative coefficient from the cell to the sky, referenced to the
/// ambient temperature difference so it can sit in parallel with wind
/// convection. Errors when `t_c <= t_a`, where that reference degenerates.
pub fn radiative_coefficient(t_c: f64, t_sky: f64, t_a: f64, emissivity: f64) -> Result<f64> {
    if !(t_c > t_a) {
        return Err(Error::DegenerateReference { t_c, t_a });
    }
    let t_c_k = to_kelvin(t_c);
    let t_a_k = to_kelvin(t_a);
    Ok(sky_linearization(t_c_k, t_sky, emissivity) * (t_c_k - t_sky) / (t_c_k - t_a_k))
}

/// Sky-referenced linearization used when the ambient reference fails.
pub fn sky_referenced_radiative_coefficient(t_c: f64, t_sky: f64, emissivity: f64) -> f64 {
    sky_linearization(to_kelvin(t_c), t_sky, emissivity)
}

pub fn wind_convection_coefficient(wind_speed: f64) -> f64 {
    5.7 + 3.8 * wind_speed
}

/// Glass conduction in series with wind convection, plus sky radiation in
/// parallel with the convection when the correction is enabled.
pub fn top_loss_coefficient(design: &CollectorDesign, loss: LossModel, t_c: f64, t_a: f64) -> Result<f64> {
    let glass = conduction_coefficient(design.glass_thickness, design.glass_conductivity)?;
    let mut outer = wind_convection_coefficient(design.wind_speed);
    if loss.radiative_correction {
        let t_sky = sky_temperature(t_a)?;
        outer += match radiative_coefficient(t_c, t_sky, t_a, design.emissivity) {
            Ok(h) => h,
            Err(Error::DegenerateReference { .. }) => {
                sky_referenced_radiative_coefficient(t_c, t_sky, design.emissivity)
            }
            Err(e) => return Err(e),
        };
    }
    Ok(1.0 / (1.0 / glass + 1.0 / outer))
}

pub fn edge_loss_coefficient(design: &CollectorDesign) -> f64 {
    design.ua_edge / design.area
}

/// `tanh(x)/x` for a straight fin with `x = μ(W−D)/2`.
pub fn fin_efficiency(u_l: f64, plate_conductance: f64, tube_spacing: f64, tube_diameter: f64) -> f64 {
    let mu = (u_l / plate_conductance).sqrt();
    let x = mu * (tube_spacing - tube_diameter) / 2.0;
    if x < 1e-8 {
        return 1.0;
    }
    x.tanh() / x
}

pub fn alpha_tau_effective(design: &CollectorDesign) -> f64 {
    design.tau_g
        * (design.alpha_c * design.beta_c + design.alpha_t * (1.0 - design.beta_c)
            - design.eta_c_ref * design.beta_c)
}

/// Derives the full coefficient set. `t_c_guess` and `t_a` only matter when
/// the radiative correction is on.
pub fn derive_coefficients(
    design: &CollectorDesign,
    loss: LossModel,
    t_c_guess: f64,
    t_a: f64,
) -> Result<DerivedCoefficients> {
    let u_t = top_loss_coefficient(design, loss, t_c_guess, t_a)?;
    let u_tedlar = conduction_coefficient(design.tedlar_thickness, design.tedlar_conductivity)?;
    let u_b = back_loss_coefficient(design);
    let u_e = if loss.edge_loss {
        edge_loss_coefficient(design)
    } else {
        0.0
    };
    let h_t = design.h_tedlar_water;

    let u_tt = u_t * u_tedlar / (u_t + u_tedlar);
    let u_tw = h_t * u_tt / (h_t + u_tt);
    let u_l = u_tw + u_b + u_e;
    let h_p1 = u_tedlar / (u_t + u_tedlar);
    let h_p2 = h_t / (h_t + u_tt);

    let (w, d) = (design.tube_spacing, design.tube_diameter);
    let fin = fin_efficiency(u_l, design.plate_conductivity * design.plate_thickness, w, d);
    let f_prime =
        (1.0 / u_l) / (w * (1.0 / (u_l * (d + (w - d) * fin)) + 1.0 / (PI * d * h_t)));

    let capacity_rate = design.mass_flow * design.water_heat_capacity;
    let ntu = design.area * u_l * f_prime / capacity_rate;
    let f_dblprime = -(-ntu).exp_m1() / ntu;
    let f_r = f_prime * f_dblprime;
    let m_decay = (design.ua_tank + design.area * f_r * u_l) / design.tank_capacity();

    let coeffs = DerivedCoefficients {
        u_t,
        u_tedlar,
        u_b,
        u_e,
        u_tt,
        u_tw,
        u_l,
        h_p1,
        h_p2,
        alpha_tau_eff: alpha_tau_effective(design),
        fin_efficiency: fin,
        f_prime,
        f_dblprime,
        f_r,
        m_decay,
    };
    coeffs.check()?;
    Ok(coeffs)
}

impl DerivedCoefficients {
    fn check(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::InternalConsistency(what.to_string()));
        let positive = [
            self.u_t,
            self.u_tedlar,
            self.u_b,
            self.u_tt,
            self.u_tw,
            self.u_l,
            self.alpha_tau_eff,
            self.m_decay,
        ];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return fail("all coefficients positive");
        }
        if !(self.u_e >= 0.0) {
            return fail("U_e >= 0");
        }
        if !(self.h_p1 > 0.0 && self.h_p1 < 1.0) {
            return fail("0 < h_p1 < 1");
        }
        if !(self.h_p2 > 0.0 && self.h_p2 < 1.0) {
            return fail("0 < h_p2 < 1");
        }
        if !(self.f_prime > 0.0 && self.f_prime <= 1.0) {
            return fail("0 < F' <= 1");
        }
        if !(self.f_dblprime > 0.0 && self.f_dblprime < 1.0) {
            return fail("0 < F'' < 1");
        }
        if !(self.f_r < self.f_prime) {
            return fail("F_R < F'");
        }
        if !(self.u_tt < self.u_t.min(self.u_tedlar)) {
            return fail("U_tT < min(U_t, U_T)");
        }
        if !(self.u_tw < self.u_tt) {
            return fail("U_tw < U_tT");
        }
        Ok(())
    }

    /// Absorbed flux reaching the water per unit irradiance.
    pub fn transmitted_gain(&self) -> f64 {
        self.h_p1 * self.h_p2 * self.alpha_tau_eff
    }
}

/// Right-hand side `f` of `dT_w/dt + m·T_w = f` for interval-averaged
/// irradiance and ambient temperature, °C/s.
pub fn tank_forcing(coeffs: &DerivedCoefficients, design: &CollectorDesign, g_avg: f64, t_a_avg: f64) -> f64 {
    let a_fr = design.area * coeffs.f_r;
    (a_fr * coeffs.transmitted_gain() * g_avg + t_a_avg * (design.ua_tank + a_fr * coeffs.u_l))
        / design.tank_capacity()
}

/// Exact solution of the tank equation over `dt` with constant forcing.
pub fn step_tank(t_w_prev: f64, f_bar: f64, m_decay: f64, dt: f64) -> f64 {
    let decay = (-m_decay * dt).exp();
    // -expm1 keeps 1 - e^{-m dt} accurate for small m dt
    (f_bar / m_decay) * -(-m_decay * dt).exp_m1() + t_w_prev * decay
}

pub fn back_surface_temperature(coeffs: &DerivedCoefficients, design: &CollectorDesign, g: f64, t_a: f64, t_w: f64) -> f64 {
    let h_t = design.h_tedlar_water;
    (coeffs.h_p1 * coeffs.alpha_tau_eff * g + coeffs.u_tt * t_a + h_t * t_w) / (coeffs.u_tt + h_t)
}

/// Absorbed flux in the cell layer net of electrical output, W/m².
pub fn cell_heat_source(design: &CollectorDesign, g: f64) -> f64 {
    design.tau_g * (design.alpha_c * g * design.beta_c + (1.0 - design.beta_c) * design.alpha_t * g)
        - design.eta_c_ref * design.tau_g * g * design.beta_c
}

pub fn cell_temperature(coeffs: &DerivedCoefficients, design: &CollectorDesign, g: f64, t_a: f64, t_bs: f64) -> f64 {
    (cell_heat_source(design, g) + coeffs.u_t * t_a + coeffs.u_tedlar * t_bs)
        / (coeffs.u_t + coeffs.u_tedlar)
}

/// Useful heat delivered to the water, W. Negative when losses exceed gain.
pub fn useful_energy(coeffs: &DerivedCoefficients, design: &CollectorDesign, g: f64, t_a: f64, t_in: f64) -> f64 {
    design.area * coeffs.f_r * (coeffs.transmitted_gain() * g - coeffs.u_l * (t_in - t_a))
}

pub fn instantaneous_efficiency(q_u: f64, area: f64, g: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::UndefinedEfficiency(format!(
            "irradiance is {g} W/m²"
        )));
    }
    Ok(q_u / (area * g))
}
