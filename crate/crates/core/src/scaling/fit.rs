//! Log-log least-squares fits of `|value| ~ C R^e`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct PowerLawFit {
    pub exponent: f64,
    /// `log C`.
    pub intercept: f64,
    /// Root-mean-square residual of the retained points, in log units.
    pub rms: f64,
    /// Whether the smallest-R point was dropped as transient.
    pub excluded_first: bool,
    pub points: usize,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn rms(xs: &[f64], ys: &[f64], slope: f64, intercept: f64) -> f64 {
    let s: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (s / xs.len() as f64).sqrt()
}

/// Fits `log|v|` against `log R` over points with `|v| > floor`. The smallest-R
/// point is dropped when its deviation from the fit through the remaining
/// points exceeds both `1e-6` and three times their RMS residual.
/// Returns `None` with fewer than two usable points.
pub fn fit_power_law(rs: &[f64], values: &[f64], floor: f64) -> Option<PowerLawFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rs
        .iter()
        .zip(values)
        .filter(|(_, v)| v.abs() > floor && v.is_finite())
        .map(|(r, v)| (r.ln(), v.abs().ln()))
        .unzip();
    if xs.len() < 2 {
        return None;
    }
    let (slope, intercept) = least_squares(&xs, &ys);
    if xs.len() >= 4 {
        let (s2, i2) = least_squares(&xs[1..], &ys[1..]);
        let rest = rms(&xs[1..], &ys[1..], s2, i2);
        let r0 = (ys[0] - i2 - s2 * xs[0]).abs();
        if r0 > 3.0 * rest && r0 > 1e-6 {
            return Some(PowerLawFit { exponent: s2, intercept: i2, rms: rest, excluded_first: true, points: xs.len() - 1 });
        }
    }
    Some(PowerLawFit { exponent: slope, intercept, rms: rms(&xs, &ys, slope, intercept), excluded_first: false, points: xs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let rs: Vec<f64> = (0..7).map(|i| 8.0 * 2f64.powi(i)).collect();
        let vs: Vec<f64> = rs.iter().map(|r| 3.0 * r.powf(-0.5)).collect();
        let fit = fit_power_law(&rs, &vs, 1e-300).unwrap();
        assert!((fit.exponent + 0.5).abs() < 1e-13);
        assert!(!fit.excluded_first);
    }

    #[test]
    fn transient_first_point_is_dropped() {
        let rs: Vec<f64> = (0..7).map(|i| 8.0 * 2f64.powi(i)).collect();
        let mut vs: Vec<f64> = rs.iter().map(|r| r.powf(1.0) * (1.0 + 1e-4 * r.sin())).collect();
        vs[0] *= 5.0;
        let fit = fit_power_law(&rs, &vs, 1e-300).unwrap();
        assert!(fit.excluded_first);
        assert!((fit.exponent - 1.0).abs() < 1e-3);
    }

    #[test]
    fn below_floor() {
        assert!(fit_power_law(&[1.0, 2.0, 4.0], &[0.0, 0.0, 1e-40], 1e-30).is_none());
    }
}
