//! Time march of the coupled collector/tank/module model over a weather
//! series, plus efficiency aggregation and validation against measurements.

mod efficiency;
mod output;
mod validation;

pub use efficiency::{overall_efficiency, thermal_efficiency};
pub use output::{format_significant, write_records_csv, RESULT_HEADER, RESULT_HEADER_ELECTRICAL};
pub use validation::{read_trace, rms_deviation, ResidualPair, ValidationReport};

use serde::Serialize;

use crate::electrical::{CircuitVariant, DiodeModel, ReferenceParams};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::{resample_weather, CollectorDesign, DatasheetSpec, WeatherSample, WeatherSeries};
use crate::thermal::{self, DerivedCoefficients, LossModel};

/// How the electrical model takes part in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ElectricalMode {
    /// Thermal model only.
    Off,
    /// MPP evaluated at each step from the simulated cell temperature; the
    /// thermal model keeps the constant reference cell efficiency.
    #[default]
    PostProcess,
    /// As `PostProcess`, and the MPP efficiency of each step replaces the
    /// cell efficiency used by the next step's energy balance.
    Feedback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationOptions {
    /// Time step, s.
    pub step: f64,
    pub radiative_correction: bool,
    pub edge_loss: bool,
    pub electrical: ElectricalMode,
    /// Treat negative useful gain as the pump being off.
    pub clamp_negative_qu: bool,
    pub variant: CircuitVariant,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            step: 60.0,
            radiative_correction: true,
            edge_loss: true,
            electrical: ElectricalMode::PostProcess,
            clamp_negative_qu: false,
            variant: CircuitVariant::SeriesShunt,
        }
    }
}

impl SimulationOptions {
    pub fn with_step(self, step: f64) -> Self {
        SimulationOptions { step, ..self }
    }

    pub fn loss_model(&self) -> LossModel {
        LossModel {
            radiative_correction: self.radiative_correction,
            edge_loss: self.edge_loss,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Argument(format!("step must be > 0, got {}", self.step)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElectricalState {
    /// `None` when irradiance is zero.
    pub eta_e: Option<f64>,
    pub p_mp: f64,
    pub v_mp: f64,
    pub i_mp: f64,
}

/// Model state at one weather grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationRecord {
    pub t: f64,
    pub g: f64,
    pub t_a: f64,
    pub t_w: f64,
    pub t_bs: f64,
    pub t_c: f64,
    pub q_u: f64,
    /// `None` when irradiance is zero.
    pub eta_i: Option<f64>,
    /// Cell efficiency used in this step's cell energy balance.
    pub eta_c: f64,
    pub electrical: Option<ElectricalState>,
}

struct Stepper<'a> {
    design: &'a CollectorDesign,
    datasheet: &'a DatasheetSpec,
    reference: Option<ReferenceParams>,
    opts: SimulationOptions,
}

impl Stepper<'_> {
    fn coefficients(&self, design: &CollectorDesign, t_c_guess: f64, t_a: f64) -> Result<DerivedCoefficients> {
        thermal::derive_coefficients(design, self.opts.loss_model(), t_c_guess, t_a)
    }

    fn record(
        &self,
        design: &CollectorDesign,
        coeffs: &DerivedCoefficients,
        s: &WeatherSample,
        t_w: f64,
    ) -> Result<SimulationRecord> {
        let t_bs = thermal::back_surface_temperature(coeffs, design, s.g, s.t_a, t_w);
        let t_c = thermal::cell_temperature(coeffs, design, s.g, s.t_a, t_bs);
        let mut q_u = thermal::useful_energy(coeffs, design, s.g, s.t_a, t_w);
        if self.opts.clamp_negative_qu {
            q_u = q_u.max(0.0);
        }
        let eta_i = (s.g > 0.0)
            .then(|| thermal::instantaneous_efficiency(q_u, design.area, s.g))
            .transpose()?;
        let electrical = match self.reference {
            Some(reference) if s.g > 0.0 => {
                let model =
                    DiodeModel::at_conditions(self.datasheet, &reference, s.g, t_c, self.opts.variant)?;
                let mpp = model.max_power_point()?;
                Some(ElectricalState {
                    eta_e: Some(crate::electrical::electrical_efficiency(&mpp, design.area, s.g)?),
                    p_mp: mpp.p,
                    v_mp: mpp.v,
                    i_mp: mpp.i,
                })
            }
            Some(_) => Some(ElectricalState {
                eta_e: None,
                p_mp: 0.0,
                v_mp: 0.0,
                i_mp: 0.0,
            }),
            None => None,
        };
        Ok(SimulationRecord {
            t: s.t,
            g: s.g,
            t_a: s.t_a,
            t_w,
            t_bs,
            t_c,
            q_u,
            eta_i,
            eta_c: design.eta_c_ref,
            electrical,
        })
    }

    /// Cell efficiency for the next step under feedback coupling: the MPP
    /// output expressed per unit of light reaching the cells.
    fn next_cell_efficiency(&self, current: f64, record: &SimulationRecord) -> f64 {
        if self.opts.electrical != ElectricalMode::Feedback {
            return current;
        }
        match record.electrical.and_then(|e| e.eta_e) {
            Some(eta_e) => eta_e / (self.design.tau_g * self.design.beta_c),
            None => current,
        }
    }
}

/// Marches the model over `weather` resampled to `opts.step`. One record per
/// grid point, starting from the design's initial tank temperature.
pub fn run_simulation(
    design: &CollectorDesign,
    datasheet: &DatasheetSpec,
    weather: &WeatherSeries,
    opts: &SimulationOptions,
) -> Result<Vec<SimulationRecord>> {
    opts.validate()?;
    design.validate()?;
    let reference = match opts.electrical {
        ElectricalMode::Off => None,
        _ => {
            datasheet.validate()?;
            Some(ReferenceParams::extract(datasheet)?)
        }
    };
    let stepper = Stepper {
        design,
        datasheet,
        reference,
        opts: *opts,
    };
    let grid = resample_weather(weather, opts.step)?;
    let samples = grid.samples();
    let at_step = |step: usize, t: f64| move |e: Error| Error::Step {
        step,
        t,
        source: Box::new(e),
    };

    let mut eta_c = design.eta_c_ref;
    let mut records = Vec::with_capacity(samples.len());

    let first = &samples[0];
    let stage = design.with_cell_efficiency(eta_c);
    let record = stepper
        .coefficients(&stage, first.t_a, first.t_a)
        .and_then(|c| stepper.record(&stage, &c, first, design.t_w0))
        .map_err(at_step(0, first.t))?;
    eta_c = stepper.next_cell_efficiency(eta_c, &record);
    records.push(record);

    for (k, pair) in samples.windows(2).enumerate() {
        let (prev, cur) = (&pair[0], &pair[1]);
        let last = records[k];
        let step = k + 1;
        let stage = design.with_cell_efficiency(eta_c);
        let dt = cur.t - prev.t;
        let g_avg = 0.5 * (prev.g + cur.g);
        let t_a_avg = 0.5 * (prev.t_a + cur.t_a);

        let record = (|| {
            let coeffs = stepper.coefficients(&stage, last.t_c, t_a_avg)?;
            let (mut forcing, mut decay) = (
                thermal::tank_forcing(&coeffs, &stage, g_avg, t_a_avg),
                coeffs.m_decay,
            );
            if opts.clamp_negative_qu
                && thermal::useful_energy(&coeffs, &stage, g_avg, t_a_avg, last.t_w) < 0.0
            {
                decay = stage.ua_tank / stage.tank_capacity();
                forcing = decay * t_a_avg;
            }
            let t_w = thermal::step_tank(last.t_w, forcing, decay, dt);
            stepper.record(&stage, &coeffs, cur, t_w)
        })()
        .map_err(at_step(step, cur.t))?;

        eta_c = stepper.next_cell_efficiency(eta_c, &record);
        records.push(record);
    }
    Ok(records)
}

/// One run per step size over the same weather, fanned out with `exec`.
pub fn step_size_study(
    design: &CollectorDesign,
    datasheet: &DatasheetSpec,
    weather: &WeatherSeries,
    steps: &[f64],
    opts: &SimulationOptions,
    exec: Execution,
) -> Result<Vec<(f64, Vec<SimulationRecord>)>> {
    let span = weather.span();
    for &step in steps {
        if !(step > 0.0) {
            return Err(Error::Argument(format!("step must be > 0, got {step}")));
        }
        let ratio = span / step;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Argument(format!(
                "step {step} s does not divide the weather span {span} s"
            )));
        }
    }
    exec.try_map(steps, |&step| {
        run_simulation(design, datasheet, weather, &opts.with_step(step)).map(|r| (step, r))
    })
}

/// Records falling on whole hours of the time axis.
pub fn hourly_records(records: &[SimulationRecord]) -> Vec<SimulationRecord> {
    records
        .iter()
        .filter(|r| (r.t / 3600.0 - (r.t / 3600.0).round()).abs() < 1e-9)
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn thermal_only() -> SimulationOptions {
        SimulationOptions {
            radiative_correction: false,
            electrical: ElectricalMode::Off,
            ..SimulationOptions::default()
        }
    }

    #[test]
    fn equilibrium_stays_put() {
        let mut design = CollectorDesign::reference();
        design.t_w0 = 28.0;
        let weather = WeatherSeries::constant(0.0, 600.0, 60.0, 0.0, 28.0).unwrap();
        let records =
            run_simulation(&design, &DatasheetSpec::msx60(), &weather, &SimulationOptions::default()).unwrap();
        assert_eq!(records.len(), 11);
        for r in &records {
            for t in [r.t_w, r.t_bs, r.t_c] {
                assert!((t - 28.0).abs() < 1e-9, "{r:?}");
            }
            assert_eq!(r.eta_i, None);
        }
    }

    #[test]
    fn night_decay_matches_closed_form() {
        let mut design = CollectorDesign::reference();
        design.t_w0 = 50.0;
        let weather = WeatherSeries::constant(0.0, 7200.0, 60.0, 0.0, 30.0).unwrap();
        let records = run_simulation(&design, &DatasheetSpec::msx60(), &weather, &thermal_only()).unwrap();
        let m = thermal::derive_coefficients(&design, thermal_only().loss_model(), 30.0, 30.0)
            .unwrap()
            .m_decay;
        for r in &records {
            let expected = 30.0 + 20.0 * (-m * r.t).exp();
            assert!((r.t_w - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn clamping_switches_pump_off() {
        let mut design = CollectorDesign::reference();
        design.t_w0 = 50.0;
        let weather = WeatherSeries::constant(0.0, 3600.0, 60.0, 0.0, 30.0).unwrap();
        let opts = SimulationOptions {
            clamp_negative_qu: true,
            ..thermal_only()
        };
        let records = run_simulation(&design, &DatasheetSpec::msx60(), &weather, &opts).unwrap();
        let m = design.ua_tank / design.tank_capacity();
        let last = records.last().unwrap();
        assert_relative_eq!(last.t_w, 30.0 + 20.0 * (-m * 3600.0).exp(), epsilon = 1e-9);
        assert!(records.iter().all(|r| r.q_u >= 0.0));
    }

    #[test]
    fn rejects_non_positive_step() {
        let weather = WeatherSeries::constant(0.0, 600.0, 60.0, 500.0, 30.0).unwrap();
        let err = run_simulation(
            &CollectorDesign::reference(),
            &DatasheetSpec::msx60(),
            &weather,
            &SimulationOptions::default().with_step(0.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
    }

    #[test]
    fn study_empty_and_divisibility() {
        let weather = WeatherSeries::constant(0.0, 7200.0, 60.0, 500.0, 30.0).unwrap();
        let d = CollectorDesign::reference();
        let ds = DatasheetSpec::msx60();
        let out = step_size_study(&d, &ds, &weather, &[], &thermal_only(), Execution::Parallel).unwrap();
        assert!(out.is_empty());
        assert!(step_size_study(&d, &ds, &weather, &[700.0], &thermal_only(), Execution::Parallel).is_err());
    }

    #[test]
    fn hourly_filter() {
        let weather = WeatherSeries::constant(8.0 * 3600.0, 10.0 * 3600.0, 60.0, 500.0, 30.0).unwrap();
        let records =
            run_simulation(&CollectorDesign::reference(), &DatasheetSpec::msx60(), &weather, &thermal_only())
                .unwrap();
        let hours: Vec<f64> = hourly_records(&records).iter().map(|r| r.t / 3600.0).collect();
        assert_eq!(hours, vec![8.0, 9.0, 10.0]);
    }
}
