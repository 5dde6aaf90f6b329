#![allow(dead_code)]

use pvt_core::{DiodeModel, WeatherSample, WeatherSeries};

/// Synthetic 08:00–15:00 minute-resolution day: a clear-sky arch with
/// deterministic cloud dips and a warming afternoon. Not measured data.
pub fn synthetic_day() -> WeatherSeries {
    let start = 8.0 * 3600.0;
    let samples = (0..=420)
        .map(|k| {
            let t = start + k as f64 * 60.0;
            let hour = t / 3600.0;
            let clear = 980.0 * (std::f64::consts::PI * (hour - 5.5) / 13.0).sin();
            let cloud = 1.0 - 0.3 * ((0.37 * k as f64).sin() * (0.011 * k as f64).sin()).max(0.0);
            let t_a = 27.0 + 5.0 * (std::f64::consts::PI * (hour - 8.0) / 10.0).sin();
            WeatherSample { t, g: (clear * cloud).max(0.0), t_a }
        })
        .collect();
    WeatherSeries::new(samples).unwrap()
}

/// Plain bisection on the single-diode current equation, written out
/// directly from the circuit law and independent of the library solver.
pub fn bisection_current(m: &DiodeModel, v: f64) -> f64 {
    let (r_s, r_sh) = match m.variant {
        pvt_core::CircuitVariant::Ideal => (0.0, f64::INFINITY),
        pvt_core::CircuitVariant::Series => (m.r_s, f64::INFINITY),
        pvt_core::CircuitVariant::SeriesShunt => (m.r_s, m.r_sh),
    };
    let f = |i: f64| {
        let vd = v + i * r_s;
        i - (m.i_ph - m.i_s * ((vd / m.a).exp() - 1.0) - vd / r_sh)
    };
    let (mut lo, mut hi) = (-1000.0, 1000.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
