//! Single-diode PV module model: datasheet parameter extraction, the
//! implicit current–voltage relation, I–V curves and the maximum power point.
//!
//! Everything is at module level. The modified ideality factor `a` folds
//! the diode quality factor, thermal voltage and series cell count into
//! one voltage.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::{to_kelvin, DatasheetSpec, CONSTANTS};

/// Residual bound every solved current satisfies, A.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Voltage tolerance of the maximum-power search, V.
pub const MPP_VOLTAGE_TOLERANCE: f64 = 1e-4;

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_MAX_HALVINGS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CircuitVariant {
    /// Current source and diode only.
    Ideal,
    /// Adds a series resistance.
    Series,
    /// Adds series and shunt resistances.
    #[default]
    SeriesShunt,
}

impl std::str::FromStr for CircuitVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(CircuitVariant::Ideal),
            "series" => Ok(CircuitVariant::Series),
            "series_shunt" | "series-shunt" => Ok(CircuitVariant::SeriesShunt),
            other => Err(Error::Argument(format!("unknown circuit variant `{other}`"))),
        }
    }
}

/// Constants extracted once from the datasheet at reference conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceParams {
    pub a_ref: f64,
    #[serde(rename = "I_RS_ref")]
    pub i_rs_ref: f64,
    #[serde(rename = "R_s")]
    pub r_s: f64,
    #[serde(rename = "R_sh")]
    pub r_sh: f64,
}

impl ReferenceParams {
    pub fn extract(ds: &DatasheetSpec) -> Result<Self> {
        let a_ref = ideality_factor(ds)?;
        let r_s = match ds.r_s_override {
            Some(r_s) => r_s,
            None => series_resistance(ds, a_ref)?,
        };
        Ok(ReferenceParams {
            a_ref,
            i_rs_ref: reverse_saturation_current(ds, a_ref),
            r_s,
            r_sh: ds.r_sh_fixed,
        })
    }
}

pub fn ideality_factor(ds: &DatasheetSpec) -> Result<f64> {
    if !(ds.i_mp_ref < ds.i_sc_ref) {
        return Err(Error::DegenerateDatasheet(
            "I_mp must be strictly below I_sc".into(),
        ));
    }
    let ratio = ds.i_mp_ref / ds.i_sc_ref;
    let denominator = ds.i_mp_ref / (ds.i_sc_ref - ds.i_mp_ref) + (1.0 - ratio).ln();
    if !denominator.is_finite() || denominator.abs() < 1e-12 {
        return Err(Error::DegenerateDatasheet(format!(
            "ideality factor denominator is {denominator}"
        )));
    }
    Ok((2.0 * ds.v_mp_ref - ds.v_oc_ref) / denominator)
}

pub fn reverse_saturation_current(ds: &DatasheetSpec, a_ref: f64) -> f64 {
    ds.i_sc_ref * (-ds.v_oc_ref / a_ref).exp()
}

/// Series resistance implied by the maximum-power point. Values within
/// 1 mΩ below zero are clamped to zero.
pub fn series_resistance(ds: &DatasheetSpec, a_ref: f64) -> Result<f64> {
    if !(ds.i_mp_ref < ds.i_sc_ref) {
        return Err(Error::DegenerateDatasheet(
            "I_mp must be strictly below I_sc".into(),
        ));
    }
    let r_s = (a_ref * (1.0 - ds.i_mp_ref / ds.i_sc_ref).ln() - ds.v_mp_ref + ds.v_oc_ref)
        / ds.i_mp_ref;
    if r_s < -1e-3 {
        return Err(Error::InconsistentDatasheet(format!(
            "extracted series resistance is negative ({r_s:.4} Ω)"
        )));
    }
    Ok(r_s.max(0.0))
}

pub fn photocurrent(ds: &DatasheetSpec, g: f64, t_c: f64) -> f64 {
    (ds.i_sc_ref + ds.k_i * (t_c - ds.t_ref)) * (g / ds.g_ref)
}

/// Diode saturation current at cell temperature `t_c` (°C): cubic
/// temperature law times the band-gap activation term, with the per-cell
/// thermal scale recovered from `a_ref` and the series cell count.
pub fn saturation_current(reference: &ReferenceParams, ds: &DatasheetSpec, t_c: f64) -> f64 {
    let t = to_kelvin(t_c);
    let t_ref = to_kelvin(ds.t_ref);
    // n·k_B per cell, J/K
    let n_k = reference.a_ref * CONSTANTS.q_e / (f64::from(ds.cells_in_series) * t_ref);
    let activation = CONSTANTS.q_e * CONSTANTS.e_g / n_k * (1.0 / t_ref - 1.0 / t);
    reference.i_rs_ref * (t / t_ref).powi(3) * activation.exp()
}

/// Single-diode parameters at one operating condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiodeModel {
    pub i_ph: f64,
    pub i_s: f64,
    pub a: f64,
    pub r_s: f64,
    pub r_sh: f64,
    pub variant: CircuitVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub v: f64,
    pub i: f64,
    pub p: f64,
}

impl OperatingPoint {
    pub fn new(v: f64, i: f64) -> Self {
        OperatingPoint { v, i, p: v * i }
    }
}

impl DiodeModel {
    pub fn new(i_ph: f64, i_s: f64, a: f64, r_s: f64, r_sh: f64, variant: CircuitVariant) -> Result<Self> {
        if !(i_ph >= 0.0 && i_s > 0.0 && a > 0.0 && r_s >= 0.0 && r_sh > 0.0) {
            return Err(Error::Argument(format!(
                "invalid diode parameters: I_ph={i_ph}, I_s={i_s}, a={a}, R_s={r_s}, R_sh={r_sh}"
            )));
        }
        Ok(DiodeModel {
            i_ph,
            i_s,
            a,
            r_s,
            r_sh,
            variant,
        })
    }

    /// Module model at irradiance `g` (W/m²) and cell temperature `t_c` (°C).
    pub fn at_conditions(
        ds: &DatasheetSpec,
        reference: &ReferenceParams,
        g: f64,
        t_c: f64,
        variant: CircuitVariant,
    ) -> Result<Self> {
        if !(g >= 0.0) {
            return Err(Error::Argument(format!("irradiance must be >= 0, got {g}")));
        }
        let a = reference.a_ref * to_kelvin(t_c) / to_kelvin(ds.t_ref);
        DiodeModel::new(
            photocurrent(ds, g, t_c).max(0.0),
            saturation_current(reference, ds, t_c),
            a,
            reference.r_s,
            reference.r_sh,
            variant,
        )
    }

    pub fn effective_series_resistance(&self) -> f64 {
        match self.variant {
            CircuitVariant::Ideal => 0.0,
            _ => self.r_s,
        }
    }

    pub fn effective_shunt_resistance(&self) -> f64 {
        match self.variant {
            CircuitVariant::SeriesShunt => self.r_sh,
            _ => f64::INFINITY,
        }
    }

    /// `g(I) = I − [I_ph − I_s(exp((V+I·R_s)/a) − 1) − (V+I·R_s)/R_sh]`.
    pub fn residual(&self, v: f64, i: f64) -> f64 {
        let vd = v + i * self.effective_series_resistance();
        i - self.i_ph + self.i_s * (vd / self.a).exp_m1() + vd / self.effective_shunt_resistance()
    }

    fn residual_slope(&self, v: f64, i: f64) -> f64 {
        let r_s = self.effective_series_resistance();
        let vd = v + i * r_s;
        1.0 + self.i_s * r_s / self.a * (vd / self.a).exp() + r_s / self.effective_shunt_resistance()
    }

    /// Terminal current at voltage `v`. Damped Newton from `I_ph`, with a
    /// bisection fallback; the residual is strictly increasing in `I`, so
    /// the root is unique.
    pub fn solve_current(&self, v: f64) -> Result<f64> {
        if let Some(i) = self.newton(v) {
            return Ok(i);
        }
        self.bisect(v)
    }

    fn newton(&self, v: f64) -> Option<f64> {
        let mut i = self.i_ph;
        let mut g = self.residual(v, i);
        for _ in 0..NEWTON_MAX_ITER {
            if !g.is_finite() {
                return None;
            }
            if g.abs() <= 1e-13 * (1.0 + i.abs()) {
                return Some(i);
            }
            let step = g / self.residual_slope(v, i);
            if !step.is_finite() {
                return None;
            }
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..=NEWTON_MAX_HALVINGS {
                let candidate = i - lambda * step;
                let g_candidate = self.residual(v, candidate);
                if g_candidate.is_finite() && g_candidate.abs() < g.abs() {
                    accepted = Some((candidate, g_candidate));
                    break;
                }
                lambda *= 0.5;
            }
            match accepted {
                Some((next, g_next)) => {
                    let moved = (next - i).abs();
                    i = next;
                    g = g_next;
                    if moved <= 1e-15 * (1.0 + i.abs()) {
                        break;
                    }
                }
                None => break,
            }
        }
        (g.abs() < RESIDUAL_TOLERANCE).then_some(i)
    }

    fn bisect(&self, v: f64) -> Result<f64> {
        let span = self.i_ph.max(1e-3);
        let (mut lo, mut hi) = (-span, 2.0 * span);
        let mut widened = 0;
        while self.residual(v, lo) > 0.0 {
            lo *= 2.0;
            widened += 1;
            if widened > 200 {
                return Err(Error::Solver(format!("no lower bracket at V = {v}")));
            }
        }
        while self.residual(v, hi) < 0.0 {
            hi *= 2.0;
            widened += 1;
            if widened > 200 {
                return Err(Error::Solver(format!("no upper bracket at V = {v}")));
            }
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            let g = self.residual(v, mid);
            if g.abs() < 1e-3 * RESIDUAL_TOLERANCE || hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
                lo = mid;
                hi = mid;
                break;
            }
            if g > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let i = 0.5 * (lo + hi);
        let g = self.residual(v, i);
        if g.abs() < RESIDUAL_TOLERANCE {
            Ok(i)
        } else {
            Err(Error::Solver(format!(
                "residual {g:e} A at V = {v} exceeds tolerance"
            )))
        }
    }

    /// Voltage at which the terminal current vanishes. With `I = 0` the
    /// series drop disappears, so this is a scalar root in `V`.
    pub fn open_circuit_voltage(&self) -> f64 {
        if self.i_ph <= 0.0 {
            return 0.0;
        }
        let r_sh = self.effective_shunt_resistance();
        let h = |v: f64| self.i_ph - self.i_s * (v / self.a).exp_m1() - v / r_sh;
        // the shunt-free root bounds the root from above
        let mut hi = self.a * (self.i_ph / self.i_s).ln_1p();
        if r_sh.is_infinite() {
            return hi;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 1e-13 * hi {
                break;
            }
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `n_points` operating points evenly spaced in voltage from short
    /// circuit to open circuit.
    pub fn iv_curve(&self, n_points: usize) -> Result<Vec<OperatingPoint>> {
        if n_points < 2 {
            return Err(Error::Argument(format!(
                "an I-V curve needs at least 2 points, got {n_points}"
            )));
        }
        if self.i_ph <= 0.0 {
            return Err(Error::Argument("no photocurrent: irradiance is zero".into()));
        }
        let v_oc = self.open_circuit_voltage();
        let last = (n_points - 1) as f64;
        (0..n_points)
            .map(|k| {
                let v = if k + 1 == n_points { v_oc } else { v_oc * k as f64 / last };
                self.solve_current(v).map(|i| OperatingPoint::new(v, i))
            })
            .collect()
    }

    /// Golden-section search for the maximum of `V·I(V)` on `[0, V_oc]`.
    pub fn max_power_point(&self) -> Result<OperatingPoint> {
        if self.i_ph <= 0.0 {
            return Ok(OperatingPoint::new(0.0, 0.0));
        }
        let power = |v: f64| -> Result<f64> { Ok(v * self.solve_current(v)?) };
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (0.0, self.open_circuit_voltage());
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut pc = power(c)?;
        let mut pd = power(d)?;
        while b - a > MPP_VOLTAGE_TOLERANCE {
            if pc > pd {
                b = d;
                d = c;
                pd = pc;
                c = b - inv_phi * (b - a);
                pc = power(c)?;
            } else {
                a = c;
                c = d;
                pc = pd;
                d = a + inv_phi * (b - a);
                pd = power(d)?;
            }
        }
        let v = 0.5 * (a + b);
        Ok(OperatingPoint::new(v, self.solve_current(v)?))
    }
}

pub fn electrical_efficiency(mpp: &OperatingPoint, area: f64, g: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::UndefinedEfficiency(format!("irradiance is {g} W/m²")));
    }
    if !(area > 0.0) {
        return Err(Error::Argument(format!("area must be > 0, got {area}")));
    }
    Ok(mpp.v * mpp.i / (area * g))
}

/// One I–V curve of a family, tagged with its operating condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub t_c: f64,
    pub g: f64,
    pub points: Vec<OperatingPoint>,
}

/// I–V curves for every `(t_c, g)` condition, computed independently.
pub fn curve_family(
    ds: &DatasheetSpec,
    reference: &ReferenceParams,
    variant: CircuitVariant,
    conditions: &[(f64, f64)],
    n_points: usize,
    exec: Execution,
) -> Result<Vec<Curve>> {
    exec.try_map(conditions, |&(t_c, g)| {
        let model = DiodeModel::at_conditions(ds, reference, g, t_c, variant)?;
        let points = model.iv_curve(n_points).map_err(|e| {
            Error::Solver(format!("curve at T_c = {t_c} °C, G = {g} W/m²: {e}"))
        })?;
        Ok(Curve { t_c, g, points })
    })
}

/// Maximum power points for every `(t_c, g)` condition.
pub fn mpp_sweep(
    ds: &DatasheetSpec,
    reference: &ReferenceParams,
    variant: CircuitVariant,
    conditions: &[(f64, f64)],
    exec: Execution,
) -> Result<Vec<OperatingPoint>> {
    exec.try_map(conditions, |&(t_c, g)| {
        DiodeModel::at_conditions(ds, reference, g, t_c, variant)?.max_power_point()
    })
}
