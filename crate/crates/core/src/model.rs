//! Translation-invariant model states, given by their truncated correlators
//! in difference variables. Each order carries a closed-form momentum-space
//! evaluator `Ŵ_l(q) = ∫ W_l(y) e^{+i q·y} dy` where one exists, and a
//! position-space evaluator for the oracles.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::{bessel_k, gamma, matern_hat, matern_hat_origin};
use crate::window::{RadialProfile, WindowKind};
use crate::{Error, Result};

/// Decay class of a correlator, which selects the admissible scaling exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum DecayClass {
    /// Integrable in the difference variables.
    L1,
    /// Square integrable with position decay `|y|^{-beta}`, `n/2 < beta <= n`.
    L2 { beta: f64, boundary: bool },
    /// Momentum singularity `|k|^{-s}` at the origin.
    PowerLaw { s: f64 },
    /// Polynomially weighted: `W = (1+|y|²)^{alpha/2} F` with `F` integrable.
    Weighted { alpha: f64 },
    Zero,
}

/// Unit-amplitude radial momentum profile in `d` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `e^{-σ²k²/2}`; position form `(2πσ²)^{-d/2} e^{-|y|²/(2σ²)}`.
    Gaussian { width: f64 },
    /// `1/(1 + k²/κ²)`.
    Lorentzian { kappa: f64 },
    /// Transform of `e^{-κ|y|}`.
    Exponential { rate: f64 },
    /// Transform of `(1+|y|²)^{-β/2}`.
    Matern { beta: f64 },
    /// `|k|^{-s} χ(|k|/Λ)` with `χ` a window profile.
    PowerCutoff { exponent: f64, scale: f64, cutoff: RadialProfile },
    /// `p(|k|²) e^{-σ²k²/2}`; position form `(1+|y|²)^m (2πσ²)^{-d/2} e^{-|y|²/(2σ²)}`.
    PolyGaussian { width: f64, power: u32, coeffs: Vec<f64> },
}

impl Shape {
    pub fn eval(&self, d: usize, k: f64) -> f64 {
        let df = d as f64;
        match self {
            Shape::Gaussian { width } => (-0.5 * width * width * k * k).exp(),
            Shape::Lorentzian { kappa } => 1.0 / (1.0 + (k / kappa).powi(2)),
            Shape::Exponential { rate } => {
                gamma((df + 1.0) / 2.0) * PI.powf((df - 1.0) / 2.0) * 2f64.powi(d as i32) * rate
                    / (rate * rate + k * k).powf((df + 1.0) / 2.0)
            }
            Shape::Matern { beta } => {
                if k == 0.0 {
                    if *beta > df {
                        matern_hat_origin(*beta, d)
                    } else {
                        f64::INFINITY
                    }
                } else {
                    matern_hat(*beta, d, k)
                }
            }
            Shape::PowerCutoff { exponent, scale, cutoff } => {
                if k == 0.0 {
                    return f64::INFINITY;
                }
                k.powf(-exponent) * cutoff.value(k / scale)
            }
            Shape::PolyGaussian { width, coeffs, .. } => {
                let t = k * k;
                let p = coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
                p * (-0.5 * width * width * t).exp()
            }
        }
    }

    /// Position-space form at `|y| = r`, where a closed form exists.
    pub fn position(&self, d: usize, r: f64) -> Option<f64> {
        let df = d as f64;
        match self {
            Shape::Gaussian { width } => {
                let s2 = width * width;
                Some((2.0 * PI * s2).powf(-df / 2.0) * (-r * r / (2.0 * s2)).exp())
            }
            Shape::Lorentzian { kappa } => match d {
                1 => Some(0.5 * kappa * (-kappa * r).exp()),
                2 => Some(kappa * kappa * bessel_k(0.0, kappa * r) / (2.0 * PI)),
                3 => Some(kappa * kappa * (-kappa * r).exp() / (4.0 * PI * r)),
                _ => None,
            },
            Shape::Exponential { rate } => Some((-rate * r).exp()),
            Shape::Matern { beta } => Some((1.0 + r * r).powf(-beta / 2.0)),
            Shape::PowerCutoff { .. } => None,
            Shape::PolyGaussian { width, power, .. } => {
                let s2 = width * width;
                Some(
                    (1.0 + r * r).powi(*power as i32)
                        * (2.0 * PI * s2).powf(-df / 2.0)
                        * (-r * r / (2.0 * s2)).exp(),
                )
            }
        }
    }

    /// `(1 - Δ_q)^m` applied to the Gaussian `e^{-σ²|q|²/2}` in `d` dimensions,
    /// as a polynomial in `t = |q|²` times the same Gaussian.
    pub fn poly_gaussian(width: f64, power: u32, d: usize) -> Shape {
        let a = 0.5 * width * width;
        let df = d as f64;
        let mut p = vec![1.0];
        for _ in 0..power {
            // Δ(p e^{-at}) = [4t(p'' - 2a p' + a² p) + 2d(p' - a p)] e^{-at}
            let deriv = |c: &[f64]| -> Vec<f64> { c.iter().enumerate().skip(1).map(|(i, v)| i as f64 * v).collect() };
            let p1 = deriv(&p);
            let p2 = deriv(&p1);
            let mut lap = vec![0.0; p.len() + 1];
            for (i, v) in p2.iter().enumerate() {
                lap[i + 1] += 4.0 * v;
            }
            for (i, v) in p1.iter().enumerate() {
                lap[i + 1] -= 8.0 * a * v;
                lap[i] += 2.0 * df * v;
            }
            for (i, v) in p.iter().enumerate() {
                lap[i + 1] += 4.0 * a * a * v;
                lap[i] -= 2.0 * df * a * v;
            }
            let mut next = lap.iter().map(|v| -v).collect::<Vec<_>>();
            for (i, v) in p.iter().enumerate() {
                next[i] += v;
            }
            p = next;
        }
        Shape::PolyGaussian { width, power, coeffs: p }
    }
}

/// Linear combination of radial shapes in a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub dim: usize,
    pub terms: Vec<(Complex64, Shape)>,
}

impl Spectrum {
    pub fn single(dim: usize, amp: f64, shape: Shape) -> Self {
        Spectrum { dim, terms: vec![(Complex64::new(amp, 0.0), shape)] }
    }

    #[inline]
    pub fn eval(&self, k: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, s) in &self.terms {
            acc += c * s.eval(self.dim, k);
        }
        acc
    }

    pub fn position(&self, r: f64) -> Option<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, s) in &self.terms {
            acc += c * s.position(self.dim, r)?;
        }
        Some(acc)
    }

    /// `self - other`, both in the same dimension.
    pub fn minus(&self, other: &Spectrum) -> Spectrum {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(c, s)| (-c, s.clone())));
        Spectrum { dim: self.dim, terms }
    }

    pub fn scaled(&self, factor: Complex64) -> Spectrum {
        Spectrum { dim: self.dim, terms: self.terms.iter().map(|(c, s)| (c * factor, s.clone())).collect() }
    }

    /// True when the spectrum is finite at the origin.
    pub fn regular_at_origin(&self) -> bool {
        self.eval(0.0).norm().is_finite()
    }
}

/// Difference-variable profile of one factor in the product ansatz, in position space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FactorProfile {
    /// `amp · e^{-|y|²/(2 width²)}`.
    Gaussian { amp: f64, width: f64 },
    /// `amp · e^{-rate |y|}`.
    Exponential { amp: f64, rate: f64 },
}

impl FactorProfile {
    fn spectrum(&self, n: usize) -> Result<Spectrum> {
        match *self {
            FactorProfile::Gaussian { amp, width } => {
                positive("width", width)?;
                let norm = (2.0 * PI * width * width).powf(n as f64 / 2.0);
                Ok(Spectrum::single(n, amp * norm, Shape::Gaussian { width }))
            }
            FactorProfile::Exponential { amp, rate } => {
                positive("rate", rate)?;
                Ok(Spectrum::single(n, amp, Shape::Exponential { rate }))
            }
        }
    }
}

/// Integrable factor `F` of a weighted correlator, in position space over
/// the `(l-1)n` difference variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightFactor {
    /// `amp · e^{-|y|²/(2 width²)}`.
    Gaussian { amp: f64, width: f64 },
    /// `amp · (1+|y|²)^{-(d+delta)/2}` with `d = (l-1)n`; integrable for `delta > 0`.
    PowerTail { amp: f64, delta: f64 },
}

/// `W_l = (1+|y|²)^{α_l/2} F_l`, the correlator of a poorly clustering state.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCorrelator {
    pub order: usize,
    pub alpha: f64,
    pub factor: WeightFactor,
    /// Dimension of the difference space, `(order-1) n`.
    pub diff_dim: usize,
}

/// Even integer `α` as the power `m = α/2`, if it is one.
pub fn even_power(alpha: f64) -> Option<u32> {
    let m = alpha / 2.0;
    (alpha >= 0.0 && (m - m.round()).abs() < 1e-12).then(|| m.round() as u32)
}

impl WeightedCorrelator {
    pub fn new(order: usize, alpha: f64, factor: WeightFactor, n: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::ModelValidation(format!("weighted correlator order {order} < 2")));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::ModelValidation(format!("weight exponent {alpha} must be >= 0")));
        }
        match factor {
            WeightFactor::Gaussian { width, .. } => positive("width", width)?,
            WeightFactor::PowerTail { delta, .. } => {
                if !(delta > 0.0) {
                    return Err(Error::ModelValidation(format!(
                        "power-tail factor needs delta > 0 to be integrable (got {delta})"
                    )));
                }
            }
        }
        Ok(WeightedCorrelator { order, alpha, factor, diff_dim: (order - 1) * n })
    }

    /// `P(y) = (1+|y|²)^{α/2}`.
    pub fn weight(&self, r: f64) -> f64 {
        (1.0 + r * r).powf(self.alpha / 2.0)
    }

    /// `F(y)` at `|y| = r`.
    pub fn factor_value(&self, r: f64) -> f64 {
        match self.factor {
            WeightFactor::Gaussian { amp, width } => amp * (-r * r / (2.0 * width * width)).exp(),
            WeightFactor::PowerTail { amp, delta } => {
                amp * (1.0 + r * r).powf(-(self.diff_dim as f64 + delta) / 2.0)
            }
        }
    }

    /// `W(y) = P(y) F(y)` at `|y| = r`.
    pub fn position(&self, r: f64) -> f64 {
        self.weight(r) * self.factor_value(r)
    }

    /// `F̂` as a radial spectrum over the difference space.
    pub fn factor_spectrum(&self) -> Spectrum {
        let d = self.diff_dim;
        match self.factor {
            WeightFactor::Gaussian { amp, width } => {
                let norm = (2.0 * PI * width * width).powf(d as f64 / 2.0);
                Spectrum::single(d, amp * norm, Shape::Gaussian { width })
            }
            WeightFactor::PowerTail { amp, delta } => {
                Spectrum::single(d, amp, Shape::Matern { beta: d as f64 + delta })
            }
        }
    }

    /// Closed-form `Ŵ` over the difference space, when one exists: the
    /// Gaussian factor with even `α`, or the power tail with
    /// `β = d + δ - α > 0`.
    pub fn spectrum(&self) -> Option<Spectrum> {
        let d = self.diff_dim;
        match self.factor {
            WeightFactor::Gaussian { amp, width } => {
                let m = even_power(self.alpha)?;
                let norm = (2.0 * PI * width * width).powf(d as f64 / 2.0);
                Some(Spectrum::single(d, amp * norm, Shape::poly_gaussian(width, m, d)))
            }
            WeightFactor::PowerTail { amp, delta } => {
                let beta = d as f64 + delta - self.alpha;
                (beta > 0.0).then(|| Spectrum::single(d, amp, Shape::Matern { beta }))
            }
        }
    }
}

/// The order-`l` truncated correlator of a state.
#[derive(Debug, Clone, PartialEq)]
pub enum OrderCorrelator {
    Zero,
    /// Radial in the full difference space `R^{(l-1)n}`.
    Radial(Spectrum),
    /// `Ŵ_l(q) = Π_i ĝ_i(q_i)`, one radial factor per difference variable.
    Product(Vec<Spectrum>),
    Weighted { correlator: WeightedCorrelator, spectrum: Option<Spectrum> },
}

impl OrderCorrelator {
    /// Whether a momentum-space evaluator exists.
    pub fn has_spectrum(&self) -> bool {
        !matches!(self, OrderCorrelator::Weighted { spectrum: None, .. })
    }

    /// `Ŵ_l` at `q ∈ (R^n)^{l-1}`, flattened.
    pub fn momentum(&self, n: usize, q: &[f64]) -> Complex64 {
        match self {
            OrderCorrelator::Zero => Complex64::new(0.0, 0.0),
            OrderCorrelator::Radial(s) | OrderCorrelator::Weighted { spectrum: Some(s), .. } => s.eval(norm(q)),
            OrderCorrelator::Product(factors) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for (j, f) in factors.iter().enumerate() {
                    acc *= f.eval(norm(&q[j * n..(j + 1) * n]));
                }
                acc
            }
            OrderCorrelator::Weighted { spectrum: None, .. } => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    /// `W_l` at `y ∈ (R^n)^{l-1}`, flattened, where a closed form exists.
    pub fn position(&self, n: usize, y: &[f64]) -> Option<Complex64> {
        match self {
            OrderCorrelator::Zero => Some(Complex64::new(0.0, 0.0)),
            OrderCorrelator::Radial(s) => s.position(norm(y)),
            OrderCorrelator::Product(factors) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for (j, f) in factors.iter().enumerate() {
                    acc *= f.position(norm(&y[j * n..(j + 1) * n]))?;
                }
                Some(acc)
            }
            OrderCorrelator::Weighted { correlator, .. } => Some(Complex64::new(correlator.position(norm(y)), 0.0)),
        }
    }
}

#[inline]
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A state's truncated correlators up to a maximal order.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHierarchy {
    dim: usize,
    orders: BTreeMap<usize, (OrderCorrelator, DecayClass)>,
}

impl TruncatedHierarchy {
    fn new(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::ModelValidation(format!("dimension must be 1, 2 or 3 (got {dim})")));
        }
        Ok(TruncatedHierarchy { dim, orders: BTreeMap::new() })
    }

    /// Builds a hierarchy from explicit parts, validating only the 2-point
    /// function's hermiticity and positivity when `check_positivity` is set.
    pub fn from_parts(
        dim: usize,
        orders: Vec<(usize, OrderCorrelator, DecayClass)>,
        check_positivity: bool,
    ) -> Result<Self> {
        let mut h = Self::new(dim)?;
        for (l, c, class) in orders {
            if l < 2 || l > crate::partition::MAX_ORDER {
                return Err(Error::ModelValidation(format!("order {l} outside 2..=12")));
            }
            h.orders.insert(l, (c, class));
        }
        if check_positivity {
            h.check_two_point()?;
        }
        h.check_hermitian()?;
        Ok(h)
    }

    /// Auxiliary evaluator without any state checks: cross correlators of
    /// distinct observables and commutator functions are neither hermitian
    /// nor positive.
    pub fn unchecked(dim: usize, orders: Vec<(usize, OrderCorrelator, DecayClass)>) -> Result<Self> {
        let mut h = Self::new(dim)?;
        for (l, c, class) in orders {
            if l < 2 || l > crate::partition::MAX_ORDER {
                return Err(Error::ModelValidation(format!("order {l} outside 2..=12")));
            }
            h.orders.insert(l, (c, class));
        }
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest order with a nonzero correlator.
    pub fn max_order(&self) -> usize {
        self.orders.keys().next_back().copied().unwrap_or(2)
    }

    pub fn orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.orders.keys().copied()
    }

    /// Order-`l` correlator; orders not set are zero.
    pub fn truncated(&self, l: usize) -> (&OrderCorrelator, DecayClass) {
        static ZERO: OrderCorrelator = OrderCorrelator::Zero;
        match self.orders.get(&l) {
            Some((c, class)) => (c, *class),
            None => (&ZERO, DecayClass::Zero),
        }
    }

    /// `Ŵ_2` must be real and non-negative on a sampled grid.
    fn check_two_point(&self) -> Result<()> {
        let (c, _) = self.truncated(2);
        for i in 1..=400 {
            let k = 1e-3 * 1.03f64.powi(i);
            let mut q = vec![0.0; self.dim];
            q[0] = k;
            let v = c.momentum(self.dim, &q);
            if v.re.is_nan() {
                return Err(Error::ModelValidation(
                    "2-point function has no momentum-space form to verify positivity".into(),
                ));
            }
            let scale = v.norm().max(1e-300);
            if v.im.abs() > 1e-12 * scale {
                return Err(Error::ModelValidation(format!("2-point transform not real at |k| = {k:.3e}")));
            }
            if v.re < -1e-12 {
                return Err(Error::ModelValidation(format!(
                    "2-point transform negative ({:.3e}) at |k| = {k:.3e}",
                    v.re
                )));
            }
        }
        Ok(())
    }

    /// `Ŵ_l(-q) = conj Ŵ_l(q)` on sampled points.
    fn check_hermitian(&self) -> Result<()> {
        let n = self.dim;
        for (&l, (c, _)) in &self.orders {
            if !c.has_spectrum() {
                continue;
            }
            let d = (l - 1) * n;
            for s in 0..8 {
                let q: Vec<f64> = (0..d).map(|i| 0.37 * (s as f64 + 1.0) * ((i as f64 + 1.3) * 0.71).sin()).collect();
                let neg: Vec<f64> = q.iter().map(|x| -x).collect();
                let a = c.momentum(n, &q);
                let b = c.momentum(n, &neg).conj();
                if (a - b).norm() > 1e-12 * (1.0 + a.norm()) {
                    return Err(Error::ModelValidation(format!("order {l} correlator is not hermitian")));
                }
            }
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::ModelValidation(format!("{name} must be positive and finite (got {v})")));
    }
    Ok(())
}

/// Quasi-free state with `Ŵ_2(k) = amp · e^{-width² k²/2}`.
pub fn gaussian_state(n: usize, amp: f64, width: f64) -> Result<TruncatedHierarchy> {
    positive("amp", amp)?;
    positive("width", width)?;
    TruncatedHierarchy::from_parts(
        n,
        vec![(2, OrderCorrelator::Radial(Spectrum::single(n, amp, Shape::Gaussian { width })), DecayClass::L1)],
        true,
    )
}

/// Quasi-free state with `Ŵ_2(k) = amp / (1 + k²/κ²)`.
pub fn lorentzian_state(n: usize, amp: f64, kappa: f64) -> Result<TruncatedHierarchy> {
    positive("amp", amp)?;
    positive("kappa", kappa)?;
    TruncatedHierarchy::from_parts(
        n,
        vec![(2, OrderCorrelator::Radial(Spectrum::single(n, amp, Shape::Lorentzian { kappa })), DecayClass::L1)],
        true,
    )
}

/// State whose order-`l` correlators factor over difference variables,
/// `W_l(y) = Π_i g_{l,i}(y_i)`. Each entry lists `l-1` profiles.
pub fn product_ansatz_state(n: usize, orders: &[(usize, Vec<FactorProfile>)]) -> Result<TruncatedHierarchy> {
    let mut parts = Vec::new();
    for (l, profiles) in orders {
        if profiles.len() + 1 != *l {
            return Err(Error::ModelValidation(format!(
                "order {l} needs {} profiles (got {})",
                l - 1,
                profiles.len()
            )));
        }
        let factors = profiles.iter().map(|p| p.spectrum(n)).collect::<Result<Vec<_>>>()?;
        parts.push((*l, OrderCorrelator::Product(factors), DecayClass::L1));
    }
    if !orders.iter().any(|(l, _)| *l == 2) {
        return Err(Error::ModelValidation("product ansatz needs a 2-point profile".into()));
    }
    TruncatedHierarchy::from_parts(n, parts, true)
}

/// Quasi-free state with `W_2(y) = amp (1+|y|²)^{-β/2}`; square integrable
/// but not integrable for `n/2 < β <= n`.
pub fn powerlaw_state(n: usize, amp: f64, beta: f64) -> Result<TruncatedHierarchy> {
    positive("amp", amp)?;
    let nf = n as f64;
    if !(beta > nf / 2.0) {
        return Err(Error::ModelValidation(format!(
            "power-law decay beta = {beta} is not square integrable in dimension {n} (need beta > {})",
            nf / 2.0
        )));
    }
    let class = if beta > nf { DecayClass::L1 } else { DecayClass::L2 { beta, boundary: beta == nf } };
    TruncatedHierarchy::from_parts(
        n,
        vec![(2, OrderCorrelator::Radial(Spectrum::single(n, amp, Shape::Matern { beta })), class)],
        true,
    )
}

/// Quasi-free state with an infrared singularity `Ŵ_2(k) = amp |k|^{-s} χ(|k|/Λ)`.
pub fn goldstone_state(n: usize, amp: f64, s: f64, cutoff_scale: f64, cutoff: WindowKind) -> Result<TruncatedHierarchy> {
    positive("amp", amp)?;
    positive("cutoff scale", cutoff_scale)?;
    if !(s > 0.0 && s < n as f64) {
        return Err(Error::ModelValidation(format!(
            "singularity exponent s = {s} must lie in (0, {n}) to be locally integrable"
        )));
    }
    let shape = Shape::PowerCutoff { exponent: s, scale: cutoff_scale, cutoff: RadialProfile::new(cutoff) };
    TruncatedHierarchy::from_parts(
        n,
        vec![(2, OrderCorrelator::Radial(Spectrum::single(n, amp, shape)), DecayClass::PowerLaw { s })],
        true,
    )
}

/// Poorly clustering state from per-order weighted correlators; the order-2
/// entry is required.
pub fn weighted_state(n: usize, orders: &[(usize, f64, WeightFactor)]) -> Result<TruncatedHierarchy> {
    let mut parts = Vec::new();
    for &(l, alpha, factor) in orders {
        let correlator = WeightedCorrelator::new(l, alpha, factor, n)?;
        let spectrum = correlator.spectrum();
        if l == 2 && spectrum.is_none() {
            return Err(Error::ModelValidation(format!(
                "weighted 2-point function with alpha = {alpha} has no closed-form transform"
            )));
        }
        parts.push((l, OrderCorrelator::Weighted { correlator, spectrum }, DecayClass::Weighted { alpha }));
    }
    if !orders.iter().any(|o| o.0 == 2) {
        return Err(Error::ModelValidation("weighted state needs an order-2 entry".into()));
    }
    TruncatedHierarchy::from_parts(n, parts, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_gaussian_of_power_one() {
        // (1 - Δ) e^{-k²/2} in d = 1 is (2 - k²) e^{-k²/2}
        let s = Shape::poly_gaussian(1.0, 1, 1);
        for &k in &[0.0, 0.7, 2.0] {
            let want = (2.0 - k * k) * (-0.5 * k * k as f64).exp();
            assert!((s.eval(1, k) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn exponential_transform_in_one_dimension() {
        let s = Shape::Exponential { rate: 2.0 };
        assert!((s.eval(1, 1.0) - 4.0 / 5.0).abs() < 1e-14);
    }

    #[test]
    fn even_powers() {
        assert_eq!(even_power(4.0), Some(2));
        assert_eq!(even_power(0.0), Some(0));
        assert_eq!(even_power(3.0), None);
        assert_eq!(even_power(1.25), None);
    }
}
