use crate::error::{Error, Result};
use crate::params::CollectorDesign;

use super::SimulationRecord;

/// Tank energy gain over the run divided by the insolation on the
/// collector. Insolation is integrated per interval with the interval-mean
/// irradiance, the same forcing the tank integrator sees.
pub fn thermal_efficiency(records: &[SimulationRecord], design: &CollectorDesign) -> Result<f64> {
    if records.len() < 2 {
        return Err(Error::Size {
            found: records.len(),
            required: 2,
        });
    }
    let insolation: f64 = records
        .windows(2)
        .map(|w| 0.5 * (w[0].g + w[1].g) * (w[1].t - w[0].t))
        .sum::<f64>()
        * design.area;
    if !(insolation > 0.0) {
        return Err(Error::UndefinedEfficiency("no insolation over the run".into()));
    }
    let first = records[0].t_w;
    let last = records[records.len() - 1].t_w;
    Ok(design.tank_capacity() * (last - first) / insolation)
}

pub fn overall_efficiency(eta_th: f64, eta_e: f64) -> Result<f64> {
    for (name, value) in [("eta_th", eta_th), ("eta_e", eta_e)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Argument(format!("{name} must lie in [0, 1], got {value}")));
        }
    }
    Ok(eta_th + eta_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn record(t: f64, g: f64, t_w: f64) -> SimulationRecord {
        SimulationRecord {
            t,
            g,
            t_a: 30.0,
            t_w,
            t_bs: t_w,
            t_c: t_w,
            q_u: 0.0,
            eta_i: None,
            eta_c: 0.09,
            electrical: None,
        }
    }

    #[test]
    fn no_temperature_change_is_zero() {
        let d = CollectorDesign::reference();
        let r = vec![record(0.0, 800.0, 28.0), record(60.0, 800.0, 28.0)];
        assert_eq!(thermal_efficiency(&r, &d).unwrap(), 0.0);
    }

    #[test]
    fn reported_daily_value() {
        // 45 kg × 4190 J/kg·K × 17.3905 K over 8.0406 MJ of insolation
        let d = CollectorDesign::reference();
        let gain = d.tank_capacity() * 17.3905;
        let g = gain / 0.4078 / d.area / 25200.0;
        let r = vec![record(0.0, g, 28.0), record(25200.0, g, 45.3905)];
        assert_relative_eq!(thermal_efficiency(&r, &d).unwrap(), 0.4078, epsilon = 1e-12);
    }

    #[test]
    fn invariant_under_regridding() {
        let d = CollectorDesign::reference();
        let fine: Vec<_> = (0..=60).map(|k| record(k as f64 * 60.0, 700.0, 28.0 + k as f64 * 0.01)).collect();
        let coarse: Vec<_> = fine.iter().step_by(2).copied().collect();
        assert_relative_eq!(
            thermal_efficiency(&fine, &d).unwrap(),
            thermal_efficiency(&coarse, &d).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn dark_run_is_undefined() {
        let d = CollectorDesign::reference();
        let r = vec![record(0.0, 0.0, 28.0), record(60.0, 0.0, 28.0)];
        assert!(matches!(thermal_efficiency(&r, &d), Err(Error::UndefinedEfficiency(_))));
        assert!(matches!(thermal_efficiency(&r[..1], &d), Err(Error::Size { .. })));
    }

    #[test]
    fn overall_is_sum() {
        assert_relative_eq!(overall_efficiency(0.4078, 0.09).unwrap(), 0.4978, epsilon = 1e-15);
        assert_eq!(overall_efficiency(0.0, 0.12).unwrap(), 0.12);
        assert!(overall_efficiency(1.2, 0.1).is_err());
    }
}
