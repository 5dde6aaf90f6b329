mod common;

use proptest::prelude::*;
use pvt_core::electrical::{ideality_factor, series_resistance, RESIDUAL_TOLERANCE};
use pvt_core::{CircuitVariant, DatasheetSpec, DiodeModel, ReferenceParams};

fn model(g: f64, t_c: f64, variant: CircuitVariant) -> DiodeModel {
    let ds = DatasheetSpec::msx60();
    let r = ReferenceParams::extract(&ds).unwrap();
    DiodeModel::at_conditions(&ds, &r, g, t_c, variant).unwrap()
}

proptest! {
    #[test]
    fn residual_contract(g in 0.0f64..1200.0, t_c in -10.0f64..90.0, frac in -0.01f64..1.5) {
        for variant in [CircuitVariant::Ideal, CircuitVariant::Series, CircuitVariant::SeriesShunt] {
            let m = model(g, t_c, variant);
            let v = frac * 21.1;
            let i = m.solve_current(v).unwrap();
            prop_assert!(m.residual(v, i).abs() < RESIDUAL_TOLERANCE);
        }
    }
}

#[test]
fn agrees_with_bisection_oracle() {
    for variant in [CircuitVariant::Ideal, CircuitVariant::Series, CircuitVariant::SeriesShunt] {
        let m = model(1000.0, 25.0, variant);
        for k in 0..50 {
            let v = 21.1 * k as f64 / 49.0;
            let oracle = common::bisection_current(&m, v);
            let solved = m.solve_current(v).unwrap();
            assert!((oracle - solved).abs() < 1e-9, "{variant:?} V={v}: {solved} vs {oracle}");
        }
    }
}

#[test]
fn stc_short_circuit_from_oracle() {
    let m = model(1000.0, 25.0, CircuitVariant::SeriesShunt);
    let i = common::bisection_current(&m, 0.0);
    assert!((3.79..=3.80).contains(&i));
}

#[test]
fn shunt_free_limit_matches_ideal() {
    let ideal = model(1000.0, 25.0, CircuitVariant::Ideal);
    let limit = DiodeModel { r_s: 0.0, r_sh: 1e12, variant: CircuitVariant::SeriesShunt, ..ideal };
    for k in 0..50 {
        let v = 21.0 * k as f64 / 49.0;
        let d = (ideal.solve_current(v).unwrap() - limit.solve_current(v).unwrap()).abs();
        assert!(d < 1e-6, "V={v}: {d}");
    }
}

#[test]
fn curves_decrease_and_have_one_power_peak() {
    for (g, t_c) in [(1000.0, 25.0), (250.0, 25.0), (1000.0, 75.0), (600.0, 0.0)] {
        let pts = model(g, t_c, CircuitVariant::SeriesShunt).iv_curve(200).unwrap();
        assert!(pts.windows(2).all(|w| w[1].i < w[0].i));
        let slopes: Vec<f64> = pts.windows(2).map(|w| w[1].p - w[0].p).collect();
        let sign_changes = slopes.windows(2).filter(|s| (s[0] > 0.0) != (s[1] > 0.0)).count();
        assert_eq!(sign_changes, 1, "G={g} T_c={t_c}");
    }
}

#[test]
fn extraction_is_bit_stable() {
    let ds = DatasheetSpec::msx60();
    let first = ReferenceParams::extract(&ds).unwrap();
    for _ in 0..10 {
        let again = ReferenceParams::extract(&ds).unwrap();
        assert_eq!(first.a_ref.to_bits(), again.a_ref.to_bits());
        assert_eq!(first.i_rs_ref.to_bits(), again.i_rs_ref.to_bits());
        assert_eq!(first.r_s.to_bits(), again.r_s.to_bits());
    }
    assert_eq!(first.a_ref, ideality_factor(&ds).unwrap());
    assert_eq!(first.r_s, series_resistance(&ds, first.a_ref).unwrap());
}

#[test]
fn temperature_trends() {
    let mut prev: Option<(f64, f64)> = None;
    for t_c in [0.0, 25.0, 50.0, 75.0] {
        let m = model(1000.0, t_c, CircuitVariant::SeriesShunt);
        let v_oc = m.open_circuit_voltage();
        let i_sc = m.solve_current(0.0).unwrap();
        if let Some((v_prev, i_prev)) = prev {
            assert!(v_oc < v_prev);
            assert!(i_sc >= i_prev);
        }
        prev = Some((v_oc, i_sc));
    }
}

#[test]
fn open_circuit_slope_matches_datasheet_coefficient() {
    // −(80 ± 10) mV/°C
    let v25 = model(1000.0, 25.0, CircuitVariant::SeriesShunt).open_circuit_voltage();
    let v75 = model(1000.0, 75.0, CircuitVariant::SeriesShunt).open_circuit_voltage();
    let slope = (v75 - v25) / 50.0;
    assert!((-0.09..=-0.07).contains(&slope), "{slope}");
}

#[test]
fn irradiance_trends() {
    let i_ref = model(1000.0, 25.0, CircuitVariant::SeriesShunt).solve_current(0.0).unwrap();
    for g in [250.0, 500.0, 750.0] {
        let i = model(g, 25.0, CircuitVariant::SeriesShunt).solve_current(0.0).unwrap();
        let ratio = i / i_ref / (g / 1000.0);
        assert!((ratio - 1.0).abs() < 0.005, "G={g}: {ratio}");
    }
    let p_full = model(1000.0, 25.0, CircuitVariant::SeriesShunt).max_power_point().unwrap().p;
    let p_half = model(500.0, 25.0, CircuitVariant::SeriesShunt).max_power_point().unwrap().p;
    assert!((p_half / p_full - 0.5).abs() < 0.05);
    let p_hot = model(1000.0, 75.0, CircuitVariant::SeriesShunt).max_power_point().unwrap().p;
    assert!(p_hot < p_full);
}
