//! Momentum-space evaluation of order-`l` fluctuation correlators.
//!
//! After substituting `s = R q`, the order-`l` correlator of the fluctuation
//! operators is
//!
//! `C_l(R) = (2π)^{n(1-l/2)} R^{l(n-α)-(l-1)n} ∫ Π_{i<l} w_i(s_i - s_{i-1}) w_l(-s_{l-1}) Ŵ_l(Q̄ + s/R) ds`
//!
//! with `s_0 = 0`, `Q̄_j` the partial sums of the slot offsets, and window
//! factors `w_i(u) = f̂(u) e^{-i a_i·u/R}` for `i < l`,
//! `w_l(u) = f̂(u - RΣQ) e^{-i a_l·(u/R - ΣQ)}`. The window factors do not
//! depend on `R`; only the argument of `Ŵ_l` shrinks.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::{map_indices, Parallelism};
use crate::model::{norm, OrderCorrelator};
use crate::quadrature::{QuadratureSpec, Rule};
use crate::special::sphere_area;
use crate::window::WindowProfile;
use crate::{Error, Result};

/// Largest kernel matrix stored explicitly, in entries.
const KERNEL_LIMIT: usize = 8_000_000;
/// Largest number of tensor-product points per evaluation.
const TENSOR_LIMIT: usize = 400_000_000;
/// Dyadic refinements at the origin for the radial path, which also serves
/// singular two-point spectra.
const RADIAL_GRADING: usize = 40;

/// Integration strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum EvalPath {
    /// Radial for unshifted radial 2-point functions, chain for factorized
    /// correlators, tensor otherwise.
    #[default]
    Auto,
    /// One-dimensional radial integral; `l = 2`, radial `Ŵ`, no offsets or shifts.
    Radial,
    /// Iterated quadrature along the chain of difference variables;
    /// requires a factorized correlator.
    Chain,
    /// Full tensor-product quadrature over `(l-1)n <= 4` dimensions.
    Tensor,
}

/// Per-slot momentum offsets and position shifts.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, schemars::JsonSchema)]
pub struct SlotData {
    /// One momentum vector per slot; empty means all zero.
    #[serde(default)]
    pub offsets: Vec<Vec<f64>>,
    /// One position shift per slot; empty means all zero.
    #[serde(default)]
    pub shifts: Vec<Vec<f64>>,
}

impl SlotData {
    fn resolved(&self, l: usize, n: usize) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let fill = |v: &Vec<Vec<f64>>, what: &str| -> Result<Vec<Vec<f64>>> {
            if v.is_empty() {
                return Ok(vec![vec![0.0; n]; l]);
            }
            if v.len() != l || v.iter().any(|x| x.len() != n) {
                return Err(Error::Config(format!("{what} need {l} vectors of dimension {n}")));
            }
            Ok(v.clone())
        };
        Ok((fill(&self.offsets, "offsets")?, fill(&self.shifts, "shifts")?))
    }

    pub fn is_trivial(&self) -> bool {
        self.offsets.iter().chain(&self.shifts).all(|v| v.iter().all(|x| *x == 0.0))
    }
}

/// One prepared integration rule for a fixed correlator, window and slot data.
pub(crate) struct Plan<'a> {
    n: usize,
    l: usize,
    corr: &'a OrderCorrelator,
    window: &'a WindowProfile,
    path: EvalPath,
    /// Radial path: 1-D nodes and weights on `[0, P]`.
    radial: Rule,
    /// Chain/tensor: vector nodes (flattened, `n` per node) and weights.
    pts: Vec<f64>,
    wts: Vec<f64>,
    /// `f̂(|s|)` at each node.
    fhat: Vec<f64>,
    kernel: Option<Vec<f64>>,
    shifts: Vec<Vec<f64>>,
    cum_q: Vec<Vec<f64>>,
    total_q: Vec<f64>,
    p_max: f64,
    mode: Parallelism,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cis(phase: f64) -> Complex64 {
    let (s, c) = phase.sin_cos();
    Complex64::new(c, s)
}

impl<'a> Plan<'a> {
    pub(crate) fn new(
        corr: &'a OrderCorrelator,
        window: &'a WindowProfile,
        l: usize,
        slots: &SlotData,
        spec: QuadratureSpec,
        requested: EvalPath,
        mode: Parallelism,
    ) -> Result<Self> {
        spec.validate()?;
        let n = window.dim();
        if l < 2 {
            return Err(Error::Config(format!("correlator order {l} < 2")));
        }
        if !corr.has_spectrum() {
            return Err(Error::Unsupported(format!(
                "order-{l} correlator has no momentum-space form; use the position-space oracle path"
            )));
        }
        let (offsets, shifts) = slots.resolved(l, n)?;
        let mut cum_q = Vec::with_capacity(l - 1);
        let mut acc = vec![0.0; n];
        for q in offsets.iter().take(l - 1) {
            for (a, b) in acc.iter_mut().zip(q) {
                *a += b;
            }
            cum_q.push(acc.clone());
        }
        let total_q: Vec<f64> = acc.iter().zip(&offsets[l - 1]).map(|(a, b)| a + b).collect();
        let radial_ok = l == 2 && matches!(corr, OrderCorrelator::Radial(_) | OrderCorrelator::Weighted { .. })
            && slots.is_trivial();
        let path = match requested {
            EvalPath::Auto if matches!(corr, OrderCorrelator::Zero) => EvalPath::Tensor,
            EvalPath::Auto if radial_ok => EvalPath::Radial,
            EvalPath::Auto if matches!(corr, OrderCorrelator::Product(_)) => EvalPath::Chain,
            EvalPath::Auto => EvalPath::Tensor,
            EvalPath::Radial if !radial_ok => {
                return Err(Error::Unsupported("radial path needs an unshifted radial 2-point function".into()))
            }
            EvalPath::Chain if !matches!(corr, OrderCorrelator::Product(_)) => {
                return Err(Error::Unsupported("chain path needs a factorized correlator".into()))
            }
            p => p,
        };
        if path == EvalPath::Tensor && (l - 1) * n > 4 && !matches!(corr, OrderCorrelator::Zero) {
            return Err(Error::Unsupported(format!(
                "tensor quadrature over {} dimensions exceeds the cap of 4",
                (l - 1) * n
            )));
        }
        let mut plan = Plan {
            n,
            l,
            corr,
            window,
            path,
            radial: Rule { nodes: Vec::new(), weights: Vec::new() },
            pts: Vec::new(),
            wts: Vec::new(),
            fhat: Vec::new(),
            kernel: None,
            shifts,
            cum_q,
            total_q,
            p_max: spec.p_max,
            mode,
        };
        if path == EvalPath::Radial {
            // one dimension is cheap, so refine beyond the tensor defaults
            plan.radial = Rule::radial_graded(spec.p_max, spec.panels, 2 * spec.nodes, spec.grading.max(RADIAL_GRADING));
            return Ok(plan);
        }
        let rule = spec.rule();
        let m1 = rule.len();
        let m = m1.pow(n as u32);
        if path == EvalPath::Tensor && (m as f64).powi(l as i32 - 1) > TENSOR_LIMIT as f64 {
            return Err(Error::Unsupported(format!(
                "tensor quadrature with {m} nodes per variable and {} variables exceeds the point budget",
                l - 1
            )));
        }
        plan.pts = Vec::with_capacity(m * n);
        plan.wts = Vec::with_capacity(m);
        for idx in 0..m {
            let mut rest = idx;
            let mut w = 1.0;
            for _ in 0..n {
                let j = rest % m1;
                rest /= m1;
                plan.pts.push(rule.nodes[j]);
                w *= rule.weights[j];
            }
            plan.wts.push(w);
        }
        plan.fhat = (0..m).map(|i| window.fourier(norm(plan.node(i)))).collect();
        if l >= 3 && m * m <= KERNEL_LIMIT {
            let pts = &plan.pts;
            let rows = map_indices(mode, m, |a| {
                let sa = &pts[a * n..(a + 1) * n];
                (0..m)
                    .map(|b| {
                        let sb = &pts[b * n..(b + 1) * n];
                        let d: f64 = sa.iter().zip(sb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                        window.fourier(d)
                    })
                    .collect::<Vec<f64>>()
            });
            plan.kernel = Some(rows.concat());
        }
        Ok(plan)
    }

    pub(crate) fn path(&self) -> EvalPath {
        self.path
    }

    #[inline]
    fn node(&self, i: usize) -> &[f64] {
        &self.pts[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    fn kernel(&self, a: usize, b: usize) -> f64 {
        match &self.kernel {
            Some(k) => k[a * self.wts.len() + b],
            None => {
                let (sa, sb) = (self.node(a), self.node(b));
                let d: f64 = sa.iter().zip(sb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                self.window.fourier(d)
            }
        }
    }

    /// Whether some window argument falls beyond the tabulated transform.
    pub(crate) fn extrapolates(&self, r: f64) -> bool {
        let reach = self.p_max * (self.n as f64).sqrt();
        let last = reach + r * norm(&self.total_q);
        2.0 * reach > self.window.kappa_max() || last > self.window.kappa_max()
    }

    /// `(2π)^{n(1-l/2)} R^{l(n-α)-(l-1)n}`.
    pub(crate) fn prefactor(&self, r: f64, alpha: f64) -> f64 {
        let (n, l) = (self.n as f64, self.l as f64);
        (2.0 * PI).powf(n * (1.0 - l / 2.0)) * r.powf(l * (n - alpha) - (l - 1.0) * n)
    }

    /// The integral without prefactor.
    pub(crate) fn integral(&self, r: f64) -> Complex64 {
        if matches!(self.corr, OrderCorrelator::Zero) {
            return Complex64::new(0.0, 0.0);
        }
        match self.path {
            EvalPath::Radial => self.radial_integral(r),
            EvalPath::Chain => self.chain_integral(r),
            _ => self.tensor_integral(r),
        }
    }

    fn radial_integral(&self, r: f64) -> Complex64 {
        let n = self.n;
        let mut q = vec![0.0; n];
        let mut acc = Complex64::new(0.0, 0.0);
        for (&s, &w) in self.radial.nodes.iter().zip(&self.radial.weights) {
            let f = self.window.fourier(s);
            q[0] = s / r;
            acc += self.corr.momentum(n, &q) * (w * f * f * s.powi(n as i32 - 1));
        }
        acc * sphere_area(n)
    }

    /// `w_l(-s)` at every node.
    fn last_window(&self, r: f64) -> Vec<Complex64> {
        let n = self.n;
        let a = &self.shifts[self.l - 1];
        (0..self.wts.len())
            .map(|i| {
                let s = self.node(i);
                let mut arg = 0.0;
                let mut phase = 0.0;
                for c in 0..n {
                    let u = -s[c];
                    arg += (u - r * self.total_q[c]).powi(2);
                    phase -= a[c] * (u / r - self.total_q[c]);
                }
                cis(phase) * self.window.fourier(arg.sqrt())
            })
            .collect()
    }

    fn chain_integral(&self, r: f64) -> Complex64 {
        let OrderCorrelator::Product(factors) = self.corr else { unreachable!("chain path on non-product") };
        let n = self.n;
        let m = self.wts.len();
        let factor_at = |j: usize, i: usize| -> Complex64 {
            let s = self.node(i);
            let q: Vec<f64> = (0..n).map(|c| self.cum_q[j][c] + s[c] / r).collect();
            factors[j].eval(norm(&q))
        };
        // v_1(s) = w_1(s) ĝ_1(Q̄_1 + s/R)
        let a1 = &self.shifts[0];
        let mut v: Vec<Complex64> = (0..m)
            .map(|i| cis(-dot(a1, self.node(i)) / r) * self.fhat[i] * factor_at(0, i))
            .collect();
        for j in 1..self.l - 1 {
            let a = &self.shifts[j];
            let src: Vec<Complex64> =
                (0..m).map(|i| v[i] * (self.wts[i] * cis(dot(a, self.node(i)) / r))).collect();
            v = map_indices(self.mode, m, |t| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, x) in src.iter().enumerate() {
                    acc += x * self.kernel(t, i);
                }
                acc * cis(-dot(a, self.node(t)) / r) * factor_at(j, t)
            });
        }
        let last = self.last_window(r);
        (0..m).map(|i| v[i] * last[i] * self.wts[i]).sum()
    }

    fn tensor_integral(&self, r: f64) -> Complex64 {
        let (n, l) = (self.n, self.l);
        let m = self.wts.len();
        let vars = l - 1;
        let last = self.last_window(r);
        let inner_count = m.pow(vars as u32 - 1);
        let partial = map_indices(self.mode, m, |first| {
            let mut idx = vec![0usize; vars];
            idx[0] = first;
            let mut q = vec![0.0; vars * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for rest in 0..inner_count {
                let mut code = rest;
                for slot in idx.iter_mut().skip(1) {
                    *slot = code % m;
                    code /= m;
                }
                let mut weight = 1.0;
                let mut win = Complex64::new(self.fhat[idx[0]], 0.0);
                let mut phase = -dot(&self.shifts[0], self.node(idx[0])) / r;
                for j in 0..vars {
                    weight *= self.wts[idx[j]];
                    let s = self.node(idx[j]);
                    for c in 0..n {
                        q[j * n + c] = self.cum_q[j][c] + s[c] / r;
                    }
                    if j >= 1 {
                        win *= self.kernel(idx[j], idx[j - 1]);
                        let prev = self.node(idx[j - 1]);
                        let a = &self.shifts[j];
                        phase -= (0..n).map(|c| a[c] * (s[c] - prev[c])).sum::<f64>() / r;
                    }
                }
                win *= last[idx[vars - 1]];
                acc += win * cis(phase) * self.corr.momentum(n, &q) * weight;
            }
            acc
        });
        partial.into_iter().sum()
    }
}
