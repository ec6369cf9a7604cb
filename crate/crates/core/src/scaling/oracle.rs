//! Position-space quadrature of windowed correlators on the line, used as an
//! independent check of the momentum-space engine and as the evaluator for
//! weights without a closed-form transform.
//!
//! With `f_R(x) = f(x/R)` and `y_i = x_i - x_{i+1}`,
//! `⟨A_R ⋯ A_R⟩^T = R^{-lα} ∫ W_l(y) B_R(y) dy`, where `B_R` is the overlap of
//! the shifted windows.

use crate::exec::{map_indices, Parallelism};
use crate::quadrature::{gauss_legendre, Rule};
use crate::window::RadialProfile;

/// Support radius of every admissible profile.
const SUPPORT: f64 = 2.0;
/// Profile breakpoints on the half-line.
const KNOTS: [f64; 2] = [1.0, 2.0];

/// Quadrature settings for the position-space integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionOracle {
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Uniform panel width in the scaled difference variable `v = y/R`.
    pub panel: f64,
    /// Smallest geometric panel near `v = 0`, in units of `1/R`.
    pub finest: f64,
    /// Half-width of the `y` box for three points; `W_3` is assumed
    /// negligible beyond it.
    pub extent: f64,
    pub mode: Parallelism,
}

impl Default for PositionOracle {
    fn default() -> Self {
        PositionOracle { nodes: 20, panel: 0.125, finest: 1e-3, extent: 12.0, mode: Parallelism::Parallel }
    }
}

fn line_rule(mut points: Vec<f64>, gl: &[(f64, f64)]) -> Rule {
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut rule = Rule { nodes: Vec::new(), weights: Vec::new() };
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for &(x, wt) in gl {
            rule.nodes.push(mid + half * x);
            rule.weights.push(half * wt);
        }
    }
    rule
}

/// Overlap `∫ Π_j f(u + c_j) du` of windows centred at `-c_j`.
fn overlap(profile: &RadialProfile, centres: &[f64], gl: &[(f64, f64)]) -> f64 {
    let lo = centres.iter().map(|c| -SUPPORT - c).fold(f64::NEG_INFINITY, f64::max);
    let hi = centres.iter().map(|c| SUPPORT - c).fold(f64::INFINITY, f64::min);
    if hi <= lo {
        return 0.0;
    }
    let mut pts = vec![lo, hi];
    for c in centres {
        for k in KNOTS {
            for x in [k - c, -k - c] {
                if x > lo && x < hi {
                    pts.push(x);
                }
            }
        }
    }
    let rule = line_rule(pts, gl);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&u, &w)| w * centres.iter().map(|c| profile.value(u + c)).product::<f64>())
        .sum()
}

impl PositionOracle {
    /// Breakpoints on `[0, 2·SUPPORT]` for `v`: uniform panels plus a
    /// geometric refinement down to `finest / R`.
    fn half_line(&self, r: f64) -> Vec<f64> {
        let top = 2.0 * SUPPORT;
        let count = (top / self.panel).ceil() as usize;
        let mut pts: Vec<f64> = (0..=count).map(|i| (i as f64 * self.panel).min(top)).collect();
        let mut x = self.panel / 2.0;
        while x > self.finest / r {
            pts.push(x);
            x /= 2.0;
        }
        pts
    }

    /// `R^{-2α} ∬ f_R(x) f_R(x') W(x - x') dx dx'` for an even `W`.
    pub fn two_point(&self, profile: &RadialProfile, w: impl Fn(f64) -> f64 + Sync, r: f64, alpha: f64) -> f64 {
        let gl = gauss_legendre(self.nodes);
        let rule = line_rule(self.half_line(r), &gl);
        let terms = map_indices(self.mode, rule.len(), |i| {
            let v = rule.nodes[i];
            rule.weights[i] * w(r * v) * overlap(profile, &[0.0, v], &gl)
        });
        // v = y/R, B_R(y) = R A(y/R), W even
        2.0 * r.powf(2.0 - 2.0 * alpha) * terms.into_iter().sum::<f64>()
    }

    /// `R^{-3α} ∭ f_R(x_1) f_R(x_2) f_R(x_3) W(x_1 - x_2, x_2 - x_3) dx`.
    pub fn three_point(
        &self,
        profile: &RadialProfile,
        w: impl Fn(f64, f64) -> f64 + Sync,
        r: f64,
        alpha: f64,
    ) -> f64 {
        let gl = gauss_legendre(self.nodes);
        let y_max = self.extent.min(2.0 * SUPPORT * r);
        let step = self.panel * r.min(4.0);
        let count = (y_max / step).ceil() as usize;
        let mut pts: Vec<f64> = (0..=count).map(|i| (i as f64 * step).min(y_max)).collect();
        pts.extend(pts.clone().iter().map(|x| -x));
        let rule = line_rule(pts, &gl);
        let m = rule.len();
        let rows = map_indices(self.mode, m, |i| {
            let y1 = rule.nodes[i];
            let mut acc = 0.0;
            for j in 0..m {
                let y2 = rule.nodes[j];
                let wv = w(y1, y2);
                if wv != 0.0 {
                    // B_R(y) = R ∫ f(u + (y_1+y_2)/R) f(u + y_2/R) f(u) du
                    acc += rule.weights[j] * wv * overlap(profile, &[(y1 + y2) / r, y2 / r, 0.0], &gl);
                }
            }
            rule.weights[i] * acc
        });
        r.powf(1.0 - 3.0 * alpha) * rows.into_iter().sum::<f64>()
    }
}
