//! Input records: collector design, module datasheet, weather series and
//! physical constants, with JSON/CSV loaders that validate on the way in.

use std::io::Read;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{invalid, Error, Result};

/// Physical constants used by the radiative and diode models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Stefan–Boltzmann constant, W/m²·K⁴.
    pub sigma: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Elementary charge, C.
    pub q_e: f64,
    /// Band gap of crystalline silicon, eV.
    pub e_g: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    sigma: 5.670_374_419e-8,
    k_b: 1.380_649e-23,
    q_e: 1.602_176_634e-19,
    e_g: 1.12,
};

pub const KELVIN_OFFSET: f64 = 273.15;

pub fn to_kelvin(celsius: f64) -> f64 {
    celsius + KELVIN_OFFSET
}

fn default_ua_edge() -> f64 {
    0.12
}
fn default_alpha_c() -> f64 {
    0.85
}
fn default_emissivity() -> f64 {
    0.88
}
fn default_plate_conductivity() -> f64 {
    385.0
}
fn default_plate_thickness() -> f64 {
    0.0006
}

/// Geometric, optical and material description of the PV/T panel and its
/// storage tank. SI units throughout, temperatures in °C.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectorDesign {
    #[serde(rename = "A_c")]
    pub area: f64,
    #[serde(rename = "b")]
    pub breadth: f64,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "W")]
    pub tube_spacing: f64,
    #[serde(rename = "D")]
    pub tube_diameter: f64,
    /// Mass flow rate through the collector, kg/s.
    #[serde(rename = "m_dot")]
    pub mass_flow: f64,
    #[serde(rename = "M_w")]
    pub tank_mass: f64,
    #[serde(rename = "C_w")]
    pub water_heat_capacity: f64,
    /// Tank loss conductance, W/K.
    #[serde(rename = "UA_tank")]
    pub ua_tank: f64,
    /// Edge loss conductance, W/K. Not given numerically in the source
    /// experiment; tune per installation.
    #[serde(rename = "UA_edge", default = "default_ua_edge")]
    pub ua_edge: f64,
    #[serde(rename = "L_g")]
    pub glass_thickness: f64,
    #[serde(rename = "K_g")]
    pub glass_conductivity: f64,
    #[serde(rename = "L_c")]
    pub cell_thickness: f64,
    #[serde(rename = "K_c")]
    pub cell_conductivity: f64,
    #[serde(rename = "L_T")]
    pub tedlar_thickness: f64,
    #[serde(rename = "K_T")]
    pub tedlar_conductivity: f64,
    #[serde(rename = "L_i")]
    pub insulation_thickness: f64,
    #[serde(rename = "K_i")]
    pub insulation_conductivity: f64,
    /// Convective coefficient on the insulated back, W/m²·K.
    #[serde(rename = "h_i")]
    pub h_back: f64,
    /// Tedlar-to-water convective coefficient, W/m²·K.
    #[serde(rename = "h_T")]
    pub h_tedlar_water: f64,
    /// Wind speed, m/s.
    #[serde(rename = "v")]
    pub wind_speed: f64,
    #[serde(rename = "tau_g")]
    pub tau_g: f64,
    #[serde(rename = "alpha_c", default = "default_alpha_c")]
    pub alpha_c: f64,
    #[serde(rename = "alpha_T")]
    pub alpha_t: f64,
    #[serde(rename = "beta_c")]
    pub beta_c: f64,
    #[serde(rename = "eta_c_ref")]
    pub eta_c_ref: f64,
    #[serde(rename = "emissivity", default = "default_emissivity")]
    pub emissivity: f64,
    /// Initial tank temperature, °C.
    #[serde(rename = "T_w0")]
    pub t_w0: f64,
    /// Absorber plate conductivity (copper), W/m·K.
    #[serde(rename = "K_p", default = "default_plate_conductivity")]
    pub plate_conductivity: f64,
    /// Absorber plate thickness, m.
    #[serde(rename = "delta_p", default = "default_plate_thickness")]
    pub plate_thickness: f64,
}

const COLLECTOR_REQUIRED: &[&str] = &[
    "A_c", "b", "L", "W", "D", "m_dot", "M_w", "C_w", "UA_tank", "L_g", "K_g", "L_c", "K_c",
    "L_T", "K_T", "L_i", "K_i", "h_i", "h_T", "v", "tau_g", "alpha_T", "beta_c", "eta_c_ref",
    "T_w0",
];

impl CollectorDesign {
    /// The MSX-60 based PV/T panel and tank used as the reference rig.
    pub fn reference() -> Self {
        CollectorDesign {
            area: 0.516,
            breadth: 0.467,
            length: 1.105,
            tube_spacing: 0.04,
            tube_diameter: 0.006,
            mass_flow: 0.016,
            tank_mass: 45.0,
            water_heat_capacity: 4190.0,
            ua_tank: 0.44,
            ua_edge: default_ua_edge(),
            glass_thickness: 0.003,
            glass_conductivity: 1.0,
            cell_thickness: 0.0003,
            cell_conductivity: 0.039,
            tedlar_thickness: 0.0005,
            tedlar_conductivity: 0.033,
            insulation_thickness: 0.05,
            insulation_conductivity: 0.035,
            h_back: 5.8,
            h_tedlar_water: 500.0,
            wind_speed: 1.0,
            tau_g: 0.95,
            alpha_c: default_alpha_c(),
            alpha_t: 0.5,
            beta_c: 0.9,
            eta_c_ref: 0.09,
            emissivity: default_emissivity(),
            t_w0: 28.0,
            plate_conductivity: default_plate_conductivity(),
            plate_thickness: default_plate_thickness(),
        }
    }

    /// Heat capacity of the tank water, J/K.
    pub fn tank_capacity(&self) -> f64 {
        self.tank_mass * self.water_heat_capacity
    }

    /// Same design with a different cell efficiency.
    pub fn with_cell_efficiency(&self, eta_c: f64) -> Self {
        CollectorDesign {
            eta_c_ref: eta_c,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("A_c", self.area),
            ("b", self.breadth),
            ("L", self.length),
            ("W", self.tube_spacing),
            ("D", self.tube_diameter),
            ("m_dot", self.mass_flow),
            ("M_w", self.tank_mass),
            ("C_w", self.water_heat_capacity),
            ("UA_tank", self.ua_tank),
            ("L_g", self.glass_thickness),
            ("K_g", self.glass_conductivity),
            ("L_c", self.cell_thickness),
            ("K_c", self.cell_conductivity),
            ("L_T", self.tedlar_thickness),
            ("K_T", self.tedlar_conductivity),
            ("L_i", self.insulation_thickness),
            ("K_i", self.insulation_conductivity),
            ("h_i", self.h_back),
            ("h_T", self.h_tedlar_water),
            ("K_p", self.plate_conductivity),
            ("delta_p", self.plate_thickness),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(name, format!("must be > 0, got {value}")));
            }
        }
        let non_negative = [
            ("UA_edge", self.ua_edge),
            ("v", self.wind_speed),
            ("emissivity", self.emissivity),
        ];
        for (name, value) in non_negative {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(invalid(name, format!("must be >= 0, got {value}")));
            }
        }
        let fractions = [
            ("beta_c", self.beta_c),
            ("tau_g", self.tau_g),
            ("alpha_c", self.alpha_c),
            ("alpha_T", self.alpha_t),
        ];
        for (name, value) in fractions {
            if !(value > 0.0 && value <= 1.0) {
                return Err(invalid(name, format!("must lie in (0, 1], got {value}")));
            }
        }
        if !(0.0..1.0).contains(&self.eta_c_ref) {
            return Err(invalid(
                "eta_c_ref",
                format!("must lie in [0, 1), got {}", self.eta_c_ref),
            ));
        }
        if self.emissivity > 1.0 {
            return Err(invalid(
                "emissivity",
                format!("must be <= 1, got {}", self.emissivity),
            ));
        }
        if self.tube_diameter >= self.tube_spacing {
            return Err(invalid(
                "D",
                format!(
                    "tube diameter {} must be smaller than spacing W = {}",
                    self.tube_diameter, self.tube_spacing
                ),
            ));
        }
        if !self.t_w0.is_finite() {
            return Err(invalid("T_w0", "must be finite"));
        }
        Ok(())
    }
}

fn read_object(mut source: impl Read) -> Result<Map<String, Value>> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    match serde_json::from_str::<Value>(&text)? {
        Value::Object(map) => Ok(map),
        _ => Err(Error::Argument("expected a flat JSON object".into())),
    }
}

fn require_fields(map: &Map<String, Value>, fields: &[&str]) -> Result<()> {
    match fields.iter().find(|f| !map.contains_key(**f)) {
        Some(missing) => Err(Error::MissingField((*missing).to_string())),
        None => Ok(()),
    }
}

/// Reads a collector design from a flat JSON object.
pub fn load_collector_config(source: impl Read) -> Result<CollectorDesign> {
    let map = read_object(source)?;
    require_fields(&map, COLLECTOR_REQUIRED)?;
    let design: CollectorDesign = serde_json::from_value(Value::Object(map))?;
    design.validate()?;
    Ok(design)
}

fn default_cells_in_series() -> u32 {
    36
}

/// Manufacturer ratings of a PV module at reference conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasheetSpec {
    #[serde(rename = "I_sc_ref")]
    pub i_sc_ref: f64,
    #[serde(rename = "V_oc_ref")]
    pub v_oc_ref: f64,
    #[serde(rename = "I_mp_ref")]
    pub i_mp_ref: f64,
    #[serde(rename = "V_mp_ref")]
    pub v_mp_ref: f64,
    /// Short-circuit current temperature coefficient, A/°C.
    #[serde(rename = "K_I")]
    pub k_i: f64,
    /// Open-circuit voltage temperature coefficient, V/°C. Informational.
    #[serde(rename = "K_V")]
    pub k_v: f64,
    #[serde(rename = "NOCT")]
    pub noct: f64,
    #[serde(rename = "T_ref")]
    pub t_ref: f64,
    #[serde(rename = "G_ref")]
    pub g_ref: f64,
    #[serde(rename = "R_sh_fixed")]
    pub r_sh_fixed: f64,
    /// Cells in series; scales the band-gap term of the saturation current.
    #[serde(rename = "N_s", default = "default_cells_in_series")]
    pub cells_in_series: u32,
    /// Replaces the extracted series resistance when set.
    #[serde(
        rename = "R_s_override",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub r_s_override: Option<f64>,
}

const DATASHEET_REQUIRED: &[&str] = &[
    "I_sc_ref",
    "V_oc_ref",
    "I_mp_ref",
    "V_mp_ref",
    "K_V",
    "NOCT",
    "T_ref",
    "G_ref",
    "R_sh_fixed",
];

impl DatasheetSpec {
    /// Solarex MSX-60 typical ratings.
    pub fn msx60() -> Self {
        DatasheetSpec {
            i_sc_ref: 3.8,
            v_oc_ref: 21.1,
            i_mp_ref: 3.5,
            v_mp_ref: 17.1,
            k_i: 0.000_65 * 3.8,
            k_v: -0.08,
            noct: 49.0,
            t_ref: 25.0,
            g_ref: 1000.0,
            r_sh_fixed: 300.0,
            cells_in_series: 36,
            r_s_override: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.i_mp_ref > 0.0) {
            return Err(invalid("I_mp_ref", "must be > 0"));
        }
        if !(self.i_mp_ref < self.i_sc_ref) {
            return Err(invalid(
                "I_mp_ref",
                format!("must be below I_sc_ref = {}", self.i_sc_ref),
            ));
        }
        if !(self.v_mp_ref > 0.0) {
            return Err(invalid("V_mp_ref", "must be > 0"));
        }
        if !(self.v_mp_ref < self.v_oc_ref) {
            return Err(invalid(
                "V_mp_ref",
                format!("must be below V_oc_ref = {}", self.v_oc_ref),
            ));
        }
        if !(self.g_ref > 0.0) {
            return Err(invalid("G_ref", "must be > 0"));
        }
        if !(self.r_sh_fixed > 0.0) {
            return Err(invalid("R_sh_fixed", "must be > 0"));
        }
        if self.t_ref <= -KELVIN_OFFSET {
            return Err(invalid("T_ref", "must be above absolute zero"));
        }
        if self.cells_in_series == 0 {
            return Err(invalid("N_s", "must be at least 1"));
        }
        if let Some(r_s) = self.r_s_override {
            if !(r_s >= 0.0) {
                return Err(invalid("R_s_override", "must be >= 0"));
            }
        }
        for (name, value) in [("K_I", self.k_i), ("K_V", self.k_v), ("NOCT", self.noct)] {
            if !value.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }
}

/// Reads a datasheet from a flat JSON object. The current temperature
/// coefficient may be given as `K_I` (A/°C) or as `K_I_percent`
/// (%/°C of I_sc_ref), which is converted on load.
pub fn load_datasheet(source: impl Read) -> Result<DatasheetSpec> {
    let mut map = read_object(source)?;
    require_fields(&map, DATASHEET_REQUIRED)?;
    if let Some(percent) = map.remove("K_I_percent") {
        if map.contains_key("K_I") {
            return Err(invalid("K_I", "give either K_I or K_I_percent, not both"));
        }
        let percent = percent
            .as_f64()
            .ok_or_else(|| invalid("K_I_percent", "must be a number"))?;
        let i_sc = map
            .get("I_sc_ref")
            .and_then(Value::as_f64)
            .ok_or_else(|| invalid("I_sc_ref", "must be a number"))?;
        map.insert("K_I".into(), Value::from(percent / 100.0 * i_sc));
    }
    require_fields(&map, &["K_I"])?;
    let ds: DatasheetSpec = serde_json::from_value(Value::Object(map))?;
    ds.validate()?;
    Ok(ds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeatherSample {
    /// Seconds; clock-time inputs count from midnight.
    pub t: f64,
    /// Plane-of-array irradiance, W/m².
    pub g: f64,
    /// Ambient temperature, °C.
    pub t_a: f64,
}

/// Time-ordered irradiance and ambient temperature samples.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    samples: Vec<WeatherSample>,
}

impl WeatherSeries {
    pub fn new(samples: Vec<WeatherSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Size {
                found: samples.len(),
                required: 2,
            });
        }
        for (row, s) in samples.iter().enumerate() {
            if !(s.t.is_finite() && s.t_a.is_finite()) {
                return Err(invalid("time/ambient", format!("non-finite value in row {row}")));
            }
            if !(s.g >= 0.0 && s.g.is_finite()) {
                return Err(invalid(
                    "irradiance",
                    format!("must be >= 0, got {} in row {row}", s.g),
                ));
            }
        }
        for (row, pair) in samples.windows(2).enumerate() {
            if !(pair[1].t > pair[0].t) {
                return Err(Error::Ordering {
                    row: row + 1,
                    prev: pair[0].t,
                    next: pair[1].t,
                });
            }
        }
        Ok(WeatherSeries { samples })
    }

    /// Constant conditions sampled every `step` seconds over `[start, end]`.
    pub fn constant(start: f64, end: f64, step: f64, g: f64, t_a: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::Argument(format!("step must be > 0, got {step}")));
        }
        let n = ((end - start) / step + 1e-9).floor() as usize + 1;
        let samples = (0..n)
            .map(|k| WeatherSample {
                t: start + k as f64 * step,
                g,
                t_a,
            })
            .collect();
        WeatherSeries::new(samples)
    }

    pub fn samples(&self) -> &[WeatherSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn span(&self) -> f64 {
        self.end() - self.start()
    }

    /// Linear interpolation at `t`, clamped to the end samples.
    pub fn at(&self, t: f64) -> WeatherSample {
        let s = &self.samples;
        if t <= s[0].t {
            return WeatherSample { t, ..s[0] };
        }
        if t >= s[s.len() - 1].t {
            return WeatherSample {
                t,
                ..s[s.len() - 1]
            };
        }
        let hi = s.partition_point(|x| x.t <= t);
        let (a, b) = (&s[hi - 1], &s[hi]);
        if a.t == t {
            return *a;
        }
        let w = (t - a.t) / (b.t - a.t);
        WeatherSample {
            t,
            g: a.g + w * (b.g - a.g),
            t_a: a.t_a + w * (b.t_a - a.t_a),
        }
    }
}

/// Parses integer/decimal seconds, `HH:MM` or `HH:MM:SS` into seconds.
pub fn parse_time(field: &str) -> Result<f64> {
    let field = field.trim();
    if field.contains(':') {
        let parts: Vec<&str> = field.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(invalid("time", format!("cannot parse `{field}`")));
        }
        let mut seconds = 0.0;
        for (i, part) in parts.iter().enumerate() {
            let value: f64 = part
                .trim()
                .parse()
                .map_err(|_| invalid("time", format!("cannot parse `{field}`")))?;
            seconds += value * [3600.0, 60.0, 1.0][i];
        }
        Ok(seconds)
    } else {
        field
            .parse()
            .map_err(|_| invalid("time", format!("cannot parse `{field}`")))
    }
}

fn column_index(headers: &csv::StringRecord, names: &[&str]) -> Result<usize> {
    headers
        .iter()
        .position(|h| names.iter().any(|n| h.trim().eq_ignore_ascii_case(n)))
        .ok_or_else(|| Error::MissingField(names[0].to_string()))
}

/// Reads a `time,irradiance,ambient` CSV.
pub fn load_weather_csv(source: impl Read) -> Result<WeatherSeries> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = reader.headers()?.clone();
    let i_t = column_index(&headers, &["time"])?;
    let i_g = column_index(&headers, &["irradiance"])?;
    let i_a = column_index(&headers, &["ambient"])?;
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record?;
        let number = |i: usize, name: &str| -> Result<f64> {
            record
                .get(i)
                .unwrap_or("")
                .parse()
                .map_err(|_| invalid(name, format!("cannot parse row {}", samples.len() + 1)))
        };
        samples.push(WeatherSample {
            t: parse_time(record.get(i_t).unwrap_or(""))?,
            g: number(i_g, "irradiance")?,
            t_a: number(i_a, "ambient")?,
        });
    }
    WeatherSeries::new(samples)
}

/// Linearly resamples onto a uniform grid starting at the first timestamp.
/// The last grid point is the largest multiple of `step` not past the end.
pub fn resample_weather(series: &WeatherSeries, step: f64) -> Result<WeatherSeries> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Argument(format!("step must be > 0, got {step}")));
    }
    if step > series.span() * (1.0 + 1e-12) {
        return Err(Error::Argument(format!(
            "step {step} s exceeds the series span {} s",
            series.span()
        )));
    }
    let start = series.start();
    let n = (series.span() / step + 1e-9).floor() as usize + 1;
    let samples = (0..n).map(|k| series.at(start + k as f64 * step)).collect();
    WeatherSeries::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_json() -> String {
        serde_json::to_string(&CollectorDesign::reference()).unwrap()
    }

    #[test]
    fn loads_reference_design() {
        let design = load_collector_config(reference_json().as_bytes()).unwrap();
        assert_eq!(design.area, 0.516);
        assert_eq!(design.mass_flow, 0.016);
        assert_eq!(design.tank_mass, 45.0);
        assert_eq!(design, CollectorDesign::reference());
    }

    #[test]
    fn rejects_zero_packing_factor() {
        let mut v: Value = serde_json::from_str(&reference_json()).unwrap();
        v["beta_c"] = Value::from(0.0);
        let err = load_collector_config(v.to_string().as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "beta_c"));
    }

    #[test]
    fn names_missing_field() {
        let mut v: Value = serde_json::from_str(&reference_json()).unwrap();
        v.as_object_mut().unwrap().remove("h_T");
        let err = load_collector_config(v.to_string().as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MissingField(ref f) if f == "h_T"));
        assert!(err.to_string().contains("h_T"));
    }

    #[test]
    fn optional_fields_take_defaults() {
        let mut v: Value = serde_json::from_str(&reference_json()).unwrap();
        for key in ["UA_edge", "alpha_c", "emissivity", "K_p", "delta_p"] {
            v.as_object_mut().unwrap().remove(key);
        }
        let design = load_collector_config(v.to_string().as_bytes()).unwrap();
        assert_eq!(design.ua_edge, 0.12);
        assert_eq!(design.alpha_c, 0.85);
        assert_eq!(design.plate_conductivity * design.plate_thickness, 385.0 * 0.0006);
    }

    #[test]
    fn tube_must_fit_spacing() {
        let mut design = CollectorDesign::reference();
        design.tube_diameter = 0.05;
        assert!(matches!(design.validate(), Err(Error::Validation { ref field, .. }) if field == "D"));
    }

    const MSX60: &str = r#"{"I_sc_ref": 3.8, "V_oc_ref": 21.1, "I_mp_ref": 3.5, "V_mp_ref": 17.1,
        "K_I_percent": 0.065, "K_V": -0.08, "NOCT": 49, "T_ref": 25, "G_ref": 1000,
        "R_sh_fixed": 300}"#;

    #[test]
    fn loads_msx60_and_converts_percent_coefficient() {
        let ds = load_datasheet(MSX60.as_bytes()).unwrap();
        assert_eq!(ds.i_sc_ref, 3.8);
        assert_eq!(ds.noct, 49.0);
        assert!((ds.k_i - 0.00247).abs() < 1e-12);
        assert_eq!(ds.cells_in_series, 36);
        assert_eq!(ds, DatasheetSpec::msx60());
    }

    #[test]
    fn rejects_i_mp_above_i_sc() {
        let text = MSX60.replace("\"I_mp_ref\": 3.5", "\"I_mp_ref\": 3.9");
        let err = load_datasheet(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "I_mp_ref"));
    }

    #[test]
    fn weather_csv_well_formed() {
        let csv = "time,irradiance,ambient\n0,800,28\n60,810,28.1\n120,805,28.2\n";
        let w = load_weather_csv(csv.as_bytes()).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.samples()[1].g, 810.0);
    }

    #[test]
    fn weather_csv_clock_time() {
        let csv = "time,irradiance,ambient\n08:00,500,28\n08:01,510,28\n08:02:30,520,28\n";
        let w = load_weather_csv(csv.as_bytes()).unwrap();
        assert_eq!(w.start(), 8.0 * 3600.0);
        assert_eq!(w.end(), 8.0 * 3600.0 + 150.0);
    }

    #[test]
    fn weather_csv_errors() {
        let unordered = "time,irradiance,ambient\n60,800,28\n0,810,28\n";
        assert!(matches!(
            load_weather_csv(unordered.as_bytes()),
            Err(Error::Ordering { .. })
        ));
        let duplicate = "time,irradiance,ambient\n0,800,28\n0,810,28\n";
        assert!(matches!(
            load_weather_csv(duplicate.as_bytes()),
            Err(Error::Ordering { .. })
        ));
        let negative = "time,irradiance,ambient\n0,800,28\n60,-5,28\n";
        assert!(matches!(
            load_weather_csv(negative.as_bytes()),
            Err(Error::Validation { .. })
        ));
        let short = "time,irradiance,ambient\n0,800,28\n";
        assert!(matches!(
            load_weather_csv(short.as_bytes()),
            Err(Error::Size { found: 1, .. })
        ));
    }

    #[test]
    fn resample_constant_and_midpoint() {
        let w = WeatherSeries::new(vec![
            WeatherSample { t: 0.0, g: 1000.0, t_a: 30.0 },
            WeatherSample { t: 120.0, g: 1000.0, t_a: 30.0 },
        ])
        .unwrap();
        let r = resample_weather(&w, 60.0).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.samples().iter().all(|s| s.g == 1000.0 && s.t_a == 30.0));
        assert_eq!(r.samples()[1].t, 60.0);

        let w = WeatherSeries::new(vec![
            WeatherSample { t: 0.0, g: 0.0, t_a: 20.0 },
            WeatherSample { t: 100.0, g: 100.0, t_a: 30.0 },
        ])
        .unwrap();
        let r = resample_weather(&w, 50.0).unwrap();
        assert_eq!(r.samples()[1], WeatherSample { t: 50.0, g: 50.0, t_a: 25.0 });
    }

    #[test]
    fn resample_hourly_count() {
        // 8h to 15h at one-minute resolution
        let w = WeatherSeries::constant(8.0 * 3600.0, 15.0 * 3600.0, 60.0, 700.0, 30.0).unwrap();
        let hourly = resample_weather(&w, 3600.0).unwrap();
        let expected = (0..)
            .map(|k| w.start() + k as f64 * 3600.0)
            .take_while(|t| *t <= w.end())
            .count();
        assert_eq!(expected, 8);
        assert_eq!(hourly.len(), expected);
    }

    #[test]
    fn resample_rejects_bad_step() {
        let w = WeatherSeries::constant(0.0, 600.0, 60.0, 0.0, 20.0).unwrap();
        assert!(matches!(resample_weather(&w, 0.0), Err(Error::Argument(_))));
        assert!(matches!(resample_weather(&w, -1.0), Err(Error::Argument(_))));
        assert!(matches!(resample_weather(&w, 601.0), Err(Error::Argument(_))));
    }
}
