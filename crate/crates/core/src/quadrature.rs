//! Composite Gauss–Legendre rules on intervals and their tensor products.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

/// A one-dimensional rule: nodes with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let m = NonZeroUsize::new(m.max(1)).expect("nonzero");
    let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(m).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Concatenates `m`-point Gauss–Legendre rules on consecutive breakpoints.
    pub fn on_breakpoints(breaks: &[f64], m: usize) -> Self {
        let base = gauss_legendre(m);
        let mut nodes = Vec::with_capacity(base.len() * breaks.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for &(x, wt) in &base {
                nodes.push(mid + half * x);
                weights.push(half * wt);
            }
        }
        Rule { nodes, weights }
    }

    /// `panels` equal panels on `[a, b]`.
    pub fn composite(a: f64, b: f64, panels: usize, m: usize) -> Self {
        let panels = panels.max(1);
        let breaks: Vec<f64> =
            (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
        Self::on_breakpoints(&breaks, m)
    }

    /// Symmetric rule on `[-p, p]` with `panels` equal panels (rounded up to
    /// even) and the two panels touching the origin split dyadically `grading`
    /// times, for integrands with an integrable singularity at zero.
    pub fn symmetric_graded(p: f64, panels: usize, m: usize, grading: usize) -> Self {
        let half = panels.div_ceil(2).max(1);
        let pos = radial_breaks(p, half, grading);
        let mut breaks: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
        breaks.extend_from_slice(&pos[1..]);
        Self::on_breakpoints(&breaks, m)
    }

    /// Rule on `[0, p]` with geometric refinement towards zero.
    pub fn radial_graded(p: f64, panels: usize, m: usize, grading: usize) -> Self {
        Self::on_breakpoints(&radial_breaks(p, panels.max(1), grading), m)
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn radial_breaks(p: f64, panels: usize, grading: usize) -> Vec<f64> {
    let width = p / panels as f64;
    let mut breaks = vec![0.0];
    for g in (1..=grading).rev() {
        breaks.push(width / f64::powi(2.0, g as i32));
    }
    for i in 1..=panels {
        breaks.push(width * i as f64);
    }
    breaks
}

/// Integrates a smooth function on `[a, b]` with `panels` panels of `m` nodes.
pub fn integrate<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, m: usize, f: F) -> f64 {
    Rule::composite(a, b, panels, m).integrate(f)
}

/// Resolution of the momentum-space integration box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Half-width of the box in scaled momentum.
    pub p_max: f64,
    /// Number of panels across `[-p_max, p_max]`.
    pub panels: usize,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Dyadic refinements of the panels adjacent to the origin.
    #[serde(default)]
    pub grading: usize,
}

impl QuadratureSpec {
    /// Default box for a given spatial dimension and number of momentum
    /// variables; coarser in higher total dimension to bound the cost. The
    /// half-width grows with the number of variables so that the tail
    /// certificate at `p_max/variables` stays below `1e-6`.
    pub fn default_for(n: usize, variables: usize) -> Self {
        match n * variables {
            0..=1 => QuadratureSpec { p_max: 64.0, panels: 32, nodes: 16, grading: 0 },
            2 => QuadratureSpec { p_max: 64.0, panels: 32, nodes: 12, grading: 0 },
            3 if variables == 1 => QuadratureSpec { p_max: 32.0, panels: 16, nodes: 8, grading: 0 },
            total => {
                let edge = match n {
                    1 => 24.0,
                    2 => 16.0,
                    _ => 12.0,
                };
                let p_max = edge * variables as f64;
                let panels = (p_max / 4.0).ceil() as usize;
                QuadratureSpec { p_max, panels, nodes: if total == 3 { 8 } else { 6 }, grading: 0 }
            }
        }
    }

    pub fn rule(&self) -> Rule {
        Rule::symmetric_graded(self.p_max, self.panels, self.nodes, self.grading)
    }

    /// The embedded coarse rule used for the error estimate.
    pub fn coarse(&self) -> Self {
        QuadratureSpec { nodes: (self.nodes / 2).max(2), ..*self }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.p_max.is_finite() && self.p_max > 0.0) || self.panels == 0 || self.nodes < 2 {
            return Err(crate::Error::Config(format!(
                "quadrature needs p_max > 0, panels >= 1, nodes >= 2 (got {:?})",
                self
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_degree_2m_minus_1() {
        let rule = gauss_legendre(5);
        let v: f64 = rule.iter().map(|&(x, w)| w * x.powi(8)).sum();
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn graded_rule_integrates_endpoint_singularity() {
        let rule = Rule::symmetric_graded(1.0, 2, 16, 30);
        let v = rule.integrate(|x| x.abs().powf(-0.5));
        assert!((v - 4.0).abs() < 1e-5, "{v}");
        let plain = Rule::symmetric_graded(1.0, 2, 16, 0);
        assert!((plain.integrate(|x| x * x) - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn radial_rule_covers_interval() {
        let rule = Rule::radial_graded(3.0, 6, 8, 4);
        assert!((rule.weights.iter().sum::<f64>() - 3.0).abs() < 1e-13);
    }
}
