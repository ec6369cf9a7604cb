//! Correlators of poorly clustering states, `W_l = (1+|y|²)^{α_l/2} F_l`, with
//! the weight moved onto the window product.
//!
//! For `α_l = 2m`, integrating by parts after `s = R q` gives
//!
//! `C_l(R) = (2π)^{n(1-l/2)} R^{ln-lγ-(l-1)n+α_l} ∫ F̂_l(s/R) (R^{-2} - Δ_s)^m [Π_j f̂(L_j·s)] ds`
//!
//! where `L_j·s = s_j - s_{j-1}` and `L_l·s = -s_{l-1}`. Only the window
//! product is differentiated, so the tabulated derivatives of `f̂` suffice.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::exec::map_indices;
use crate::model::{even_power, norm, OrderCorrelator, Spectrum, TruncatedHierarchy};
use crate::quadrature::{QuadratureSpec, Rule};
use crate::special::sphere_area;
use crate::window::{WindowProfile, MAX_DERIVATIVE};
use crate::{Error, Result};

use super::{summarize, CorrelatorValue, ScalingConfig, ScalingReport};

/// Largest tensor grid, in points.
const POINT_LIMIT: usize = 50_000_000;
/// Dyadic refinements at the origin for the radial integral.
const RADIAL_GRADING: usize = 40;

/// Exponent `γ = (n + α_2)/2` that keeps the 2-point function finite, and
/// the largest `α_l = lγ - n` for which the order-`l` function stays bounded.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize, schemars::JsonSchema)]
pub struct WeightedExponents {
    pub gamma: f64,
    pub order: usize,
    pub alpha_bound: f64,
}

pub fn weighted_gamma(n: usize, alpha2: f64, order: usize) -> Result<WeightedExponents> {
    if !(alpha2.is_finite() && alpha2 >= 0.0) {
        return Err(Error::Config(format!("alpha_2 must be >= 0 (got {alpha2})")));
    }
    if order < 2 {
        return Err(Error::Config(format!("order {order} < 2")));
    }
    let gamma = (n as f64 + alpha2) / 2.0;
    Ok(WeightedExponents { gamma, order, alpha_bound: order as f64 * gamma - n as f64 })
}

/// Monomials `Π_j d_j^{k_j}` with coefficients; `d_j` differentiates factor `j`.
type Poly = BTreeMap<Vec<usize>, f64>;

/// `(R^{-2} - Σ_{jk} G_{jk} d_j d_k)^m` with `G_{jk} = L_j·L_k`.
fn weight_operator(l: usize, m: u32, r: f64) -> Poly {
    let lin = |j: usize, c: usize| -> f64 {
        // coefficient of s_c in L_j·s
        if j + 1 == l {
            if c + 1 == l - 1 { -1.0 } else { 0.0 }
        } else if c == j {
            1.0
        } else if c + 1 == j {
            -1.0
        } else {
            0.0
        }
    };
    let g = |j: usize, k: usize| -> f64 { (0..l - 1).map(|c| lin(j, c) * lin(k, c)).sum() };
    let mut poly: Poly = BTreeMap::from([(vec![0; l], 1.0)]);
    for _ in 0..m {
        let mut next: Poly = BTreeMap::new();
        for (exps, coef) in &poly {
            *next.entry(exps.clone()).or_default() += coef / (r * r);
            for j in 0..l {
                for k in 0..l {
                    let gjk = g(j, k);
                    if gjk != 0.0 {
                        let mut e = exps.clone();
                        e[j] += 1;
                        e[k] += 1;
                        *next.entry(e).or_default() -= coef * gjk;
                    }
                }
            }
        }
        next.retain(|_, c| *c != 0.0);
        poly = next;
    }
    poly
}

struct Setup<'a> {
    factor: Spectrum,
    m: u32,
    window: &'a WindowProfile,
}

fn setup<'a>(state: &TruncatedHierarchy, window: &'a WindowProfile, l: usize) -> Result<Setup<'a>> {
    let (corr, _) = state.truncated(l);
    let OrderCorrelator::Weighted { correlator, .. } = corr else {
        return Err(Error::Config(format!("order {l} of the state is not a weighted correlator")));
    };
    let n = window.dim();
    let Some(m) = even_power(correlator.alpha) else {
        return Err(Error::Unsupported(format!(
            "weight exponent {} is not an even integer; use the position-space oracle path",
            correlator.alpha
        )));
    };
    if 2 * m as usize > MAX_DERIVATIVE {
        return Err(Error::Unsupported(format!(
            "weight exponent {} needs window derivatives beyond order {MAX_DERIVATIVE}; use the position-space oracle path",
            correlator.alpha
        )));
    }
    if l > 2 && n != 1 {
        return Err(Error::Unsupported(format!(
            "derivative path for order {l} is implemented on the line only; use the position-space oracle path"
        )));
    }
    Ok(Setup { factor: correlator.factor_spectrum(), m, window })
}

impl Setup<'_> {
    /// `∫ F̂(|s|/R) (R^{-2} - Δ)^m h(|s|) ds` for `h = f̂²` on `R^n`.
    fn radial(&self, rule: &Rule, r: f64) -> Complex64 {
        let n = self.window.dim();
        let nm1 = n as f64 - 1.0;
        let inv = 1.0 / (r * r);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&p, &w) in rule.nodes.iter().zip(&rule.weights) {
            let d: Vec<f64> = (0..=2 * self.m as usize).map(|j| self.window.radial_derivative(j, p)).collect();
            let h0 = d[0] * d[0];
            let h = [
                h0,
                2.0 * d[0] * d.get(1).copied().unwrap_or(0.0),
                if self.m >= 1 { 2.0 * (d[1] * d[1] + d[0] * d[2]) } else { 0.0 },
                if self.m >= 2 { 2.0 * (3.0 * d[1] * d[2] + d[0] * d[3]) } else { 0.0 },
                if self.m >= 2 { 2.0 * (3.0 * d[2] * d[2] + 4.0 * d[1] * d[3] + d[0] * d[4]) } else { 0.0 },
            ];
            let lap = h[2] + nm1 / p * h[1];
            let bilap = h[4] + 2.0 * nm1 / p * h[3] + nm1 * (nm1 - 2.0) / (p * p) * (h[2] - h[1] / p);
            let g = match self.m {
                0 => h0,
                1 => inv * h0 - lap,
                _ => inv * inv * h0 - 2.0 * inv * lap + bilap,
            };
            acc += self.factor.eval(p / r) * (w * g * p.powi(n as i32 - 1));
        }
        acc * sphere_area(n)
    }

    /// Same integral for `l >= 3` on the line by tensor quadrature.
    fn tensor(&self, rule: &Rule, l: usize, r: f64, cfg: &ScalingConfig) -> Complex64 {
        let vars = l - 1;
        let m1 = rule.len();
        let inner = m1.pow(vars as u32 - 1);
        let ops: Vec<(Vec<usize>, f64)> = weight_operator(l, self.m, r).into_iter().collect();
        let parts = map_indices(cfg.parallelism, m1, |first| {
            let mut idx = vec![0usize; vars];
            idx[0] = first;
            let mut s = vec![0.0; vars];
            let mut args = vec![0.0; l];
            let mut derivs = vec![[0.0; MAX_DERIVATIVE + 1]; l];
            let mut acc = Complex64::new(0.0, 0.0);
            for rest in 0..inner {
                let mut code = rest;
                for slot in idx.iter_mut().skip(1) {
                    *slot = code % m1;
                    code /= m1;
                }
                let mut weight = 1.0;
                for (c, &i) in idx.iter().enumerate() {
                    s[c] = rule.nodes[i];
                    weight *= rule.weights[i];
                }
                args[0] = s[0];
                for j in 1..vars {
                    args[j] = s[j] - s[j - 1];
                }
                args[l - 1] = -s[vars - 1];
                for (j, &a) in args.iter().enumerate() {
                    for (k, slot) in derivs[j].iter_mut().enumerate().take(2 * self.m as usize + 1) {
                        *slot = self.window.radial_derivative(k, a);
                    }
                }
                let g: f64 = ops
                    .iter()
                    .map(|(exps, coef)| coef * exps.iter().enumerate().map(|(j, &k)| derivs[j][k]).product::<f64>())
                    .sum();
                acc += self.factor.eval(norm(&s) / r) * (g * weight);
            }
            acc
        });
        parts.into_iter().sum()
    }

    fn integral(&self, spec: &QuadratureSpec, l: usize, r: f64, cfg: &ScalingConfig) -> Result<Complex64> {
        if l == 2 {
            // derivatives of the window decay and oscillate more slowly in
            // relative terms, so the one-dimensional box is widened and refined
            let rule =
                Rule::radial_graded(3.0 * spec.p_max, 3 * spec.panels, 2 * spec.nodes, spec.grading.max(RADIAL_GRADING));
            return Ok(self.radial(&rule, r));
        }
        let rule = spec.rule();
        if (rule.len() as f64).powi(l as i32 - 1) > POINT_LIMIT as f64 {
            return Err(Error::Unsupported(format!("derivative path for order {l} exceeds the point budget")));
        }
        Ok(self.tensor(&rule, l, r, cfg))
    }
}

/// Order-`l` correlator of a weighted state at exponent `γ` and scale `R`.
pub fn weighted_correlator(
    state: &TruncatedHierarchy,
    window: &WindowProfile,
    cfg: &ScalingConfig,
    l: usize,
    gamma: f64,
    r: f64,
) -> Result<CorrelatorValue> {
    cfg.validate()?;
    let s = setup(state, window, l)?;
    let spec = cfg.quadrature_for(window.dim(), l);
    let tail = window.tail_certificate(spec.p_max, l);
    if tail > cfg.tail_tol {
        return Err(Error::accuracy(format!("integration box p_max = {} too small for order {l}", spec.p_max), tail));
    }
    let (nf, lf) = (window.dim() as f64, l as f64);
    let pre = (2.0 * PI).powf(nf * (1.0 - lf / 2.0))
        * r.powf(lf * nf - lf * gamma - (lf - 1.0) * nf + 2.0 * s.m as f64);
    let fine = s.integral(&spec, l, r, cfg)?;
    let coarse = s.integral(&spec.coarse(), l, r, cfg)?;
    let reach = spec.p_max * if l == 2 { 3.0 } else { 2.0 };
    Ok(CorrelatorValue {
        r,
        value: fine * pre,
        error_estimate: (fine - coarse).norm() * pre,
        tail_certificate: tail,
        extrapolated: reach > window.kappa_max(),
    })
}

/// `weighted_correlator` over the grid, with fit and verdict.
pub fn weighted_sweep(
    state: &TruncatedHierarchy,
    window: &WindowProfile,
    cfg: &ScalingConfig,
    l: usize,
    gamma: f64,
) -> Result<ScalingReport> {
    cfg.validate_sweep()?;
    let values = cfg
        .r_grid
        .iter()
        .map(|&r| weighted_correlator(state, window, cfg, l, gamma, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(format!("l={l} weighted"), l, gamma, values, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_for_two_points_is_the_radial_laplacian() {
        // l = 2 on the line: L_1 = 1, L_2 = -1, G = [[1,-1],[-1,1]]
        let p = weight_operator(2, 1, 2.0);
        assert_eq!(p[&vec![0, 0]], 0.25);
        assert_eq!(p[&vec![2, 0]], -1.0);
        assert_eq!(p[&vec![0, 2]], -1.0);
        assert_eq!(p[&vec![1, 1]], 2.0);
    }

    #[test]
    fn gamma_and_bound() {
        let e = weighted_gamma(1, 0.0, 3).unwrap();
        assert_eq!(e.gamma, 0.5);
        let e = weighted_gamma(3, 1.0, 3).unwrap();
        assert_eq!((e.gamma, e.alpha_bound), (2.0, 3.0));
        assert!(weighted_gamma(1, -1.0, 2).is_err());
    }
}
