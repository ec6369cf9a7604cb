//! Scaling of truncated correlators of fluctuation operators with the window
//! scale `R`: per-`R` evaluation, exponent sweeps, q-mode correlators and the
//! exponent windows of the square-integrable and weighted regimes.

pub mod engine;
pub mod fit;
pub mod oracle;
pub mod weighted;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::Parallelism;
use crate::model::TruncatedHierarchy;
use crate::quadrature::QuadratureSpec;
use crate::window::WindowProfile;
use crate::{Error, Result};

pub use engine::{EvalPath, SlotData};
pub use fit::{fit_power_law, PowerLawFit};

/// Geometric grid `start · ratio^i`, `i < count`.
pub fn geometric_grid(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start * ratio.powi(i as i32)).collect()
}

/// Numerical settings shared by every sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    /// Strictly increasing window scales.
    pub r_grid: Vec<f64>,
    /// Integration box; chosen from the dimension when absent.
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
    /// Absolute floor `ε_v` below which a value counts as vanishing.
    pub vanishing_tol: f64,
    /// Half-width of the exponent band read as "finite".
    pub exponent_band: f64,
    /// Largest admissible relative truncation certificate.
    pub tail_tol: f64,
    /// Values at or below this modulus are excluded from fits.
    pub value_floor: f64,
    /// Treat window queries beyond the table as errors.
    #[serde(default)]
    pub strict_window: bool,
    #[serde(default)]
    pub path: EvalPath,
    #[serde(default)]
    pub parallelism: Parallelism,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            r_grid: geometric_grid(8.0, 64f64.powf(1.0 / 7.0), 8),
            quadrature: None,
            vanishing_tol: 1e-8,
            exponent_band: 0.1,
            tail_tol: 1e-6,
            value_floor: 1e-30,
            strict_window: false,
            path: EvalPath::Auto,
            parallelism: Parallelism::Parallel,
        }
    }
}

impl ScalingConfig {
    pub fn with_grid(r_grid: Vec<f64>) -> Self {
        ScalingConfig { r_grid, ..Default::default() }
    }

    pub fn quadrature_for(&self, n: usize, l: usize) -> QuadratureSpec {
        self.quadrature.unwrap_or_else(|| QuadratureSpec::default_for(n, l - 1))
    }

    /// Grid and tolerance invariants.
    pub fn validate(&self) -> Result<()> {
        if self.r_grid.len() < 2 || self.r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Config("R grid needs at least two positive scales".into()));
        }
        if self.r_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("R grid must be strictly increasing".into()));
        }
        for (name, v) in [
            ("vanishing_tol", self.vanishing_tol),
            ("exponent_band", self.exponent_band),
            ("tail_tol", self.tail_tol),
            ("value_floor", self.value_floor),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive (got {v})")));
            }
        }
        if let Some(q) = &self.quadrature {
            q.validate()?;
        }
        Ok(())
    }

    /// Sweep preconditions: at least six scales spanning a factor of 64.
    pub fn validate_sweep(&self) -> Result<()> {
        self.validate()?;
        let span = self.r_grid.last().unwrap() / self.r_grid[0];
        if self.r_grid.len() < 6 || span < 64.0 * (1.0 - 1e-12) {
            return Err(Error::Config(format!(
                "an exponent sweep needs at least 6 scales spanning a factor of 64 (got {} spanning {span:.1})",
                self.r_grid.len()
            )));
        }
        Ok(())
    }
}

/// One evaluated correlator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct CorrelatorValue {
    pub r: f64,
    #[schemars(with = "[f64; 2]")]
    pub value: Complex64,
    /// `|I_fine - I_coarse|` times the prefactor.
    pub error_estimate: f64,
    /// Relative truncation certificate of the integration box.
    pub tail_certificate: f64,
    /// Some window argument lay beyond the transform table.
    pub extrapolated: bool,
}

/// Qualitative large-`R` behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Vanishing,
    FiniteNonzero,
    Diverging,
}

/// Result of a sweep over the `R` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct ScalingReport {
    pub label: String,
    pub order: usize,
    pub alpha: f64,
    pub values: Vec<CorrelatorValue>,
    pub fit: Option<PowerLawFit>,
    /// `None` when every value is below the floor.
    pub exponent: Option<f64>,
    pub verdict: Verdict,
    /// Value at the largest scale.
    #[schemars(with = "[f64; 2]")]
    pub limit_estimate: Complex64,
    /// Extrapolation assuming `O(R^{-2})` corrections, for finite verdicts.
    #[schemars(with = "Option<[f64; 2]>")]
    pub richardson: Option<Complex64>,
}

/// Builds a report from per-`R` values.
pub fn summarize(label: String, order: usize, alpha: f64, values: Vec<CorrelatorValue>, cfg: &ScalingConfig) -> ScalingReport {
    let rs: Vec<f64> = values.iter().map(|v| v.r).collect();
    let mods: Vec<f64> = values.iter().map(|v| v.value.norm()).collect();
    let fit = fit_power_law(&rs, &mods, cfg.value_floor);
    let last = values.last().map(|v| v.value).unwrap_or_default();
    let exponent = fit.as_ref().map(|f| f.exponent);
    let verdict = classify(exponent, last.norm(), cfg);
    let richardson = (verdict == Verdict::FiniteNonzero && values.len() >= 2).then(|| {
        let (a, b) = (&values[values.len() - 2], &values[values.len() - 1]);
        let rho2 = (b.r / a.r).powi(2);
        (b.value * rho2 - a.value) / (rho2 - 1.0)
    });
    ScalingReport { label, order, alpha, values, fit, exponent, verdict, limit_estimate: last, richardson }
}

/// Diverging above the band; vanishing below it or when the last value is
/// under `ε_v`; finite otherwise.
pub fn classify(exponent: Option<f64>, last_modulus: f64, cfg: &ScalingConfig) -> Verdict {
    match exponent {
        None => Verdict::Vanishing,
        Some(e) if e > cfg.exponent_band => Verdict::Diverging,
        Some(e) if e < -cfg.exponent_band || last_modulus < cfg.vanishing_tol => Verdict::Vanishing,
        Some(_) => Verdict::FiniteNonzero,
    }
}

/// Prepared evaluator for one order, window and slot configuration.
pub struct Correlator<'a> {
    fine: engine::Plan<'a>,
    coarse: engine::Plan<'a>,
    window: &'a WindowProfile,
    cfg: &'a ScalingConfig,
    order: usize,
    p_max: f64,
}

impl<'a> Correlator<'a> {
    pub fn new(
        state: &'a TruncatedHierarchy,
        window: &'a WindowProfile,
        cfg: &'a ScalingConfig,
        l: usize,
        slots: &SlotData,
    ) -> Result<Self> {
        cfg.validate()?;
        if state.dim() != window.dim() {
            return Err(Error::Config(format!(
                "state dimension {} differs from window dimension {}",
                state.dim(),
                window.dim()
            )));
        }
        if l > crate::partition::MAX_ORDER {
            return Err(Error::OrderTooLarge(l));
        }
        let spec = cfg.quadrature_for(window.dim(), l);
        let (corr, _) = state.truncated(l);
        let fine = engine::Plan::new(corr, window, l, slots, spec, cfg.path, cfg.parallelism)?;
        let coarse = engine::Plan::new(corr, window, l, slots, spec.coarse(), fine.path(), cfg.parallelism)?;
        Ok(Correlator { fine, coarse, window, cfg, order: l, p_max: spec.p_max })
    }

    pub fn path(&self) -> EvalPath {
        self.fine.path()
    }

    /// `⟨A_R(1) ⋯ A_R(l)⟩^T` at one scale.
    pub fn eval(&self, r: f64, alpha: f64) -> Result<CorrelatorValue> {
        let extrapolated = self.fine.extrapolates(r);
        if extrapolated && self.cfg.strict_window {
            return Err(Error::accuracy(
                format!("window transform needed beyond |κ| = {} at R = {r}", self.window.kappa_max()),
                self.window.tail_sup(self.window.kappa_max()),
            ));
        }
        let tail = self.window.tail_certificate(self.p_max, self.order);
        if tail > self.cfg.tail_tol {
            return Err(Error::accuracy(
                format!("integration box p_max = {} too small for order {}", self.p_max, self.order),
                tail,
            ));
        }
        let pre = self.fine.prefactor(r, alpha);
        let fine = self.fine.integral(r);
        let coarse = self.coarse.integral(r);
        Ok(CorrelatorValue {
            r,
            value: fine * pre,
            error_estimate: (fine - coarse).norm() * pre.abs(),
            tail_certificate: tail,
            extrapolated,
        })
    }
}

/// `⟨A_R(1) ⋯ A_R(l)⟩^T` with `A_R = R^{-α} ∫ A(x) f_R(x) dx` at one scale.
pub fn fluctuation_correlator(
    state: &TruncatedHierarchy,
    window: &WindowProfile,
    cfg: &ScalingConfig,
    l: usize,
    alpha: f64,
    slots: &SlotData,
    r: f64,
) -> Result<CorrelatorValue> {
    Correlator::new(state, window, cfg, l, slots)?.eval(r, alpha)
}

/// Evaluates the correlator on every scale of the grid and fits the exponent.
pub fn exponent_sweep(
    state: &TruncatedHierarchy,
    window: &WindowProfile,
    cfg: &ScalingConfig,
    l: usize,
    alpha: f64,
    slots: &SlotData,
) -> Result<ScalingReport> {
    cfg.validate_sweep()?;
    let c = Correlator::new(state, window, cfg, l, slots)?;
    let values = cfg.r_grid.iter().map(|&r| c.eval(r, alpha)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(format!("l={l}"), l, alpha, values, cfg))
}

/// Correlators of `A_R(q_i) = R^{-n/2} ∫ A(x) e^{i q_i·x} f_R(x) dx`; for
/// two slots with `q_1 = -q_2 = q` and an integrable state the limit is
/// `Ŵ_2(q) ∫ f̂(k) f̂(-k) dk`.
pub fn qmode_correlator(
    state: &TruncatedHierarchy,
    window: &WindowProfile,
    cfg: &ScalingConfig,
    l: usize,
    offsets: Vec<Vec<f64>>,
) -> Result<ScalingReport> {
    let alpha = window.dim() as f64 / 2.0;
    let mut report = exponent_sweep(state, window, cfg, l, alpha, &SlotData { offsets: offsets.clone(), shifts: Vec::new() })?;
    report.label = format!("l={l} q={offsets:?}");
    Ok(report)
}

/// Bisection on the sign of the fitted 2-point exponent for the scaling
/// exponent that makes the 2-point function finite.
pub fn critical_alpha(
    state: &TruncatedHierarchy,
    window: &WindowProfile,
    cfg: &ScalingConfig,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    cfg.validate_sweep()?;
    let c = Correlator::new(state, window, cfg, 2, &SlotData::default())?;
    // the fitted exponent is affine in α, so one sweep of raw values suffices
    let raw = cfg.r_grid.iter().map(|&r| c.eval(r, 0.0)).collect::<Result<Vec<_>>>()?;
    let exponent_at = |alpha: f64| -> Option<f64> {
        let vals: Vec<CorrelatorValue> = raw
            .iter()
            .map(|v| CorrelatorValue { value: v.value * v.r.powf(-2.0 * alpha), ..v.clone() })
            .collect();
        summarize(String::new(), 2, alpha, vals, cfg).exponent
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match exponent_at(mid) {
            Some(e) if e > 0.0 => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Half-open interval `(lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct AlphaInterval {
    pub lower: f64,
    pub upper: f64,
}

impl AlphaInterval {
    pub fn contains(&self, a: f64) -> bool {
        a > self.lower && a <= self.upper
    }
}

/// Scaling exponents admissible for square-integrable, non-integrable
/// 2-point functions: `(n/2, 3n/4]`.
pub fn l2_alpha_window(n: usize) -> AlphaInterval {
    let nf = n as f64;
    AlphaInterval { lower: nf / 2.0, upper: 0.75 * nf }
}

/// What the square-integrability bound says about order `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum OrderBound {
    /// `l(2α - n) > n`: the order-`l` limit vanishes.
    Vanishing,
    /// `l(2α - n) = n`: the bound keeps the limit finite.
    Finite,
    /// The bound allows growth; nothing is guaranteed.
    NotGuaranteed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Threshold {
    /// Smallest `l >= 3` with `l(2α - n) > n`.
    pub first_vanishing: usize,
    /// Verdicts for `l = 3 ..= first_vanishing`.
    pub orders: Vec<(usize, OrderBound)>,
}

/// Per-order consequences of the bound at exponent `α` in the L² window.
pub fn l2_vanishing_threshold(n: usize, alpha: f64) -> Result<Threshold> {
    let window = l2_alpha_window(n);
    if !window.contains(alpha) {
        return Err(Error::Config(format!(
            "alpha = {alpha} outside the square-integrable window ({}, {}]",
            window.lower, window.upper
        )));
    }
    let nf = n as f64;
    let tol = 1e-12 * nf;
    let bound = |l: usize| -> OrderBound {
        let lhs = l as f64 * (2.0 * alpha - nf);
        if lhs > nf + tol {
            OrderBound::Vanishing
        } else if (lhs - nf).abs() <= tol {
            OrderBound::Finite
        } else {
            OrderBound::NotGuaranteed
        }
    };
    let mut orders = Vec::new();
    let mut l = 3;
    loop {
        let b = bound(l);
        orders.push((l, b));
        if b == OrderBound::Vanishing {
            return Ok(Threshold { first_vanishing: l, orders });
        }
        l += 1;
    }
}
