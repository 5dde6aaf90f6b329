use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::parse_time;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualPair {
    pub t: f64,
    pub sim: f64,
    pub exp: f64,
    /// `100·(sim − exp)/sim`.
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rms_percent: f64,
    pub n: usize,
    pub pairs: Vec<ResidualPair>,
}

/// RMS percentage deviation of measurements from simulation, normalised by
/// the simulated value. Each measurement is paired with the nearest
/// simulated sample no more than `max_gap` seconds away; unpaired
/// measurements are skipped.
pub fn rms_deviation(sim: &[(f64, f64)], exp: &[(f64, f64)], max_gap: f64) -> Result<ValidationReport> {
    let mut sorted = sim.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut pairs = Vec::new();
    for &(t, measured) in exp {
        let idx = sorted.partition_point(|s| s.0 < t);
        let nearest = [idx.checked_sub(1), Some(idx)]
            .into_iter()
            .flatten()
            .filter_map(|i| sorted.get(i))
            .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()));
        let Some(&(t_sim, simulated)) = nearest else { continue };
        if (t_sim - t).abs() > max_gap {
            continue;
        }
        if simulated == 0.0 {
            return Err(Error::ZeroSimulated { t: t_sim });
        }
        pairs.push(ResidualPair {
            t,
            sim: simulated,
            exp: measured,
            percent: 100.0 * (simulated - measured) / simulated,
        });
    }
    if pairs.is_empty() {
        return Err(Error::Size {
            found: 0,
            required: 1,
        });
    }
    let n = pairs.len();
    let sum_sq: f64 = pairs.iter().map(|p| p.percent * p.percent).sum();
    Ok(ValidationReport {
        rms_percent: (sum_sq / n as f64).sqrt(),
        n,
        pairs,
    })
}

/// Reads `(time, value)` pairs from a CSV with a `t` or `time` column and
/// the named value column. Rows with an empty value are skipped.
pub fn read_trace(source: impl Read, column: &str) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = reader.headers()?.clone();
    let find = |names: &[&str]| headers.iter().position(|h| names.contains(&h));
    let i_t = find(&["t", "time"]).ok_or_else(|| Error::MissingField("t".into()))?;
    let i_v = find(&[column]).ok_or_else(|| Error::MissingField(column.to_string()))?;
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let raw = record.get(i_v).unwrap_or("");
        if raw.is_empty() {
            continue;
        }
        let value: f64 = raw.parse().map_err(|_| Error::Validation {
            field: column.to_string(),
            reason: format!("cannot parse `{raw}` in row {}", row + 1),
        })?;
        out.push((parse_time(record.get(i_t).unwrap_or(""))?, value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn symmetric_ten_percent() {
        let r = rms_deviation(&[(0.0, 10.0), (60.0, 10.0)], &[(0.0, 9.0), (60.0, 11.0)], 30.0).unwrap();
        assert_relative_eq!(r.rms_percent, 10.0, epsilon = 1e-12);
        assert_eq!(r.n, 2);
    }

    #[test]
    fn identical_is_zero() {
        let s = [(0.0, 31.2), (60.0, 32.5), (120.0, 33.0)];
        assert_eq!(rms_deviation(&s, &s, 30.0).unwrap().rms_percent, 0.0);
    }

    #[test]
    fn single_pair() {
        let r = rms_deviation(&[(0.0, 50.0)], &[(0.0, 49.0)], 30.0).unwrap();
        assert_relative_eq!(r.rms_percent, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn pairs_nearest_within_gap() {
        let sim = [(0.0, 10.0), (60.0, 20.0), (120.0, 30.0)];
        let exp = [(55.0, 20.0), (100.0, 30.0), (500.0, 1.0)];
        let r = rms_deviation(&sim, &exp, 30.0).unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(r.pairs[1].sim, 30.0);
    }

    #[test]
    fn zero_simulated_value_names_time() {
        let err = rms_deviation(&[(60.0, 0.0)], &[(60.0, 1.0)], 30.0).unwrap_err();
        assert!(matches!(err, Error::ZeroSimulated { t } if t == 60.0));
    }

    #[test]
    fn no_pairs_is_error() {
        assert!(rms_deviation(&[(0.0, 1.0)], &[(1000.0, 1.0)], 30.0).is_err());
    }

    #[test]
    fn reads_trace_columns() {
        let csv = "time,T_w,T_c\n08:00,28.1,31\n08:01,,31.5\n08:02,28.3,32\n";
        let tw = read_trace(csv.as_bytes(), "T_w").unwrap();
        assert_eq!(tw, vec![(28800.0, 28.1), (28920.0, 28.3)]);
        assert!(matches!(read_trace(csv.as_bytes(), "T_x"), Err(Error::MissingField(_))));
    }
}
