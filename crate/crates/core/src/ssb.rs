//! Spectral models for spontaneously broken continuous symmetries: growth of
//! autocorrelations, the double commutator with the Hamiltonian, the
//! Bogoliubov bound between them, the mean-ergodic projector and the
//! conservation of the order parameter in the presence of a gap.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::map_indices;
use crate::model::norm;
use crate::quadrature::{QuadratureSpec, Rule};
use crate::scaling::{summarize, CorrelatorValue, ScalingConfig, ScalingReport};
use crate::special::sphere_area;
use crate::window::{smoothstep, RadialProfile, WindowKind, WindowProfile};
use crate::{Error, Result};

/// Dyadic refinements at the origin, where the spectral weights are singular.
const GRADING: usize = 40;
/// Slack of the Bogoliubov comparison.
const BOGOLIUBOV_SLACK: f64 = 1e-9;

/// Energy of a mode with momentum `|k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Dispersion {
    /// `ω = c|k|`.
    Linear { speed: f64 },
    /// `ω = c k²`.
    Quadratic { coefficient: f64 },
    /// `ω = √(Δ² + c² k²)`.
    Gapped { gap: f64, speed: f64 },
}

impl Dispersion {
    pub fn energy(&self, k: f64) -> f64 {
        match *self {
            Dispersion::Linear { speed } => speed * k,
            Dispersion::Quadratic { coefficient } => coefficient * k * k,
            Dispersion::Gapped { gap, speed } => (gap * gap + speed * speed * k * k).sqrt(),
        }
    }

    /// Infimum of the energy over nonzero momenta.
    pub fn gap(&self) -> f64 {
        match *self {
            Dispersion::Gapped { gap, .. } => gap,
            _ => 0.0,
        }
    }
}

/// Which autocorrelation to sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    /// The symmetry-breaking observable `A`.
    A,
    /// The generator density `q`.
    Q,
}

/// Spectral weights `ρ_A = c_A |k|^{-s} χ`, `ρ_Q = c_Q |k|^{t_Q} χ` and
/// `ρ_QA = i c_QA χ`, with `χ` a radial cutoff at scale `Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct GoldstoneModel {
    pub dim: usize,
    pub dispersion: Dispersion,
    pub c_a: f64,
    /// Infrared exponent of `ρ_A`.
    pub s: f64,
    pub c_q: f64,
    /// Infrared exponent of `ρ_Q` (a zero of order `t_Q`).
    pub t_q: f64,
    pub c_qa: f64,
    pub cutoff_scale: f64,
    pub cutoff: WindowKind,
}

impl Default for GoldstoneModel {
    fn default() -> Self {
        GoldstoneModel {
            dim: 3,
            dispersion: Dispersion::Linear { speed: 1.0 },
            c_a: 1.0,
            s: 2.0,
            c_q: 1.0,
            t_q: 1.0,
            c_qa: 0.5,
            cutoff_scale: 1.0,
            cutoff: WindowKind::MollifiedStep,
        }
    }
}

/// A model with its cutoff profile prepared.
pub struct PreparedModel {
    pub model: GoldstoneModel,
    chi: RadialProfile,
}

impl GoldstoneModel {
    /// Checks integrability and the pointwise bounds
    /// `|ρ_QA|² <= ρ_Q ρ_A` and `|ρ_QA|² <= ω ρ_Q ρ_A / 2`.
    pub fn validate(&self) -> Result<PreparedModel> {
        let n = self.dim as f64;
        if self.dim == 0 {
            return Err(Error::ModelValidation("dimension must be at least 1".into()));
        }
        for (name, v) in [("c_a", self.c_a), ("c_q", self.c_q), ("c_qa", self.c_qa)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::ModelValidation(format!("{name} must be finite and >= 0 (got {v})")));
            }
        }
        if !(self.cutoff_scale.is_finite() && self.cutoff_scale > 0.0) {
            return Err(Error::ModelValidation("cutoff scale must be positive".into()));
        }
        if !(self.s >= 0.0 && self.s < n) {
            return Err(Error::ModelValidation(format!(
                "rho_A exponent s = {} must lie in [0, {n}) to be integrable",
                self.s
            )));
        }
        if !(self.t_q > -n) {
            return Err(Error::ModelValidation(format!("rho_Q exponent {} must exceed -{n}", self.t_q)));
        }
        let speed_ok = match self.dispersion {
            Dispersion::Linear { speed } => speed >= 0.0,
            Dispersion::Quadratic { coefficient } => coefficient >= 0.0,
            Dispersion::Gapped { gap, speed } => gap > 0.0 && speed >= 0.0,
        };
        if !speed_ok {
            return Err(Error::ModelValidation(format!("invalid dispersion {:?}", self.dispersion)));
        }
        let prepared = PreparedModel { model: *self, chi: RadialProfile::new(self.cutoff) };
        // χ vanishes beyond twice the cutoff scale
        for i in 0..=600 {
            let k = 2.0 * self.cutoff_scale * 10f64.powf(-6.0 + 6.0 * i as f64 / 600.0);
            let cross = prepared.rho_qa(k).norm_sqr();
            let prod = prepared.rho_q(k) * prepared.rho_a(k);
            if cross > prod * (1.0 + 1e-12) {
                return Err(Error::ModelValidation(format!(
                    "cross density violates |rho_QA|^2 <= rho_Q rho_A at |k| = {k:.3e}"
                )));
            }
            if cross > 0.5 * self.dispersion.energy(k) * prod * (1.0 + 1e-12) {
                return Err(Error::ModelValidation(format!(
                    "cross density violates |rho_QA|^2 <= omega rho_Q rho_A / 2 at |k| = {k:.3e}"
                )));
            }
        }
        Ok(prepared)
    }
}

impl PreparedModel {
    fn chi(&self, k: f64) -> f64 {
        self.chi.value(k / self.model.cutoff_scale)
    }

    pub fn rho_a(&self, k: f64) -> f64 {
        if self.model.c_a == 0.0 {
            return 0.0;
        }
        self.model.c_a * k.powf(-self.model.s) * self.chi(k)
    }

    pub fn rho_q(&self, k: f64) -> f64 {
        if self.model.c_q == 0.0 {
            return 0.0;
        }
        self.model.c_q * k.powf(self.model.t_q) * self.chi(k)
    }

    pub fn rho_qa(&self, k: f64) -> Complex64 {
        Complex64::new(0.0, self.model.c_qa * self.chi(k))
    }
}

/// `∫ f̂(p)² g(|p|) d^n p` on the radial rule.
fn radial<T>(window: &WindowProfile, rule: &Rule, g: impl Fn(f64) -> T) -> T
where
    T: std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
{
    let n = window.dim();
    let area = sphere_area(n);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&p, &w)| {
            let f = window.fourier(p);
            g(p) * (w * f * f * p.powi(n as i32 - 1) * area)
        })
        .sum()
}

struct Radial {
    fine: Rule,
    coarse: Rule,
    tail: f64,
}

fn radial_rules(window: &WindowProfile, cfg: &ScalingConfig) -> Result<Radial> {
    let spec: QuadratureSpec = cfg.quadrature_for(window.dim(), 2);
    let tail = window.tail_certificate(spec.p_max, 2);
    if tail > cfg.tail_tol {
        return Err(Error::accuracy(format!("integration box p_max = {} too small", spec.p_max), tail));
    }
    let grading = spec.grading.max(GRADING);
    Ok(Radial {
        fine: Rule::radial_graded(spec.p_max, spec.panels, 2 * spec.nodes, grading),
        coarse: Rule::radial_graded(spec.p_max, spec.panels, spec.nodes, grading),
        tail,
    })
}

/// Sweeps `R^n ∫ f̂(p)² ρ(p/R) dp`, one value per scale.
fn sweep(
    window: &WindowProfile,
    cfg: &ScalingConfig,
    label: &str,
    rho: impl Fn(f64) -> f64 + Sync,
) -> Result<ScalingReport> {
    cfg.validate_sweep()?;
    let rules = radial_rules(window, cfg)?;
    let n = window.dim() as i32;
    let values = map_indices(cfg.parallelism, cfg.r_grid.len(), |i| {
        let r = cfg.r_grid[i];
        let fine = radial(window, &rules.fine, |p| rho(p / r));
        let coarse = radial(window, &rules.coarse, |p| rho(p / r));
        let pre = r.powi(n);
        CorrelatorValue {
            r,
            value: Complex64::new(fine * pre, 0.0),
            error_estimate: (fine - coarse).abs() * pre,
            tail_certificate: rules.tail,
            extrapolated: false,
        }
    });
    Ok(summarize(label.into(), 2, 0.0, values, cfg))
}

fn check_dim(model: &GoldstoneModel, window: &WindowProfile) -> Result<()> {
    if model.dim != window.dim() {
        return Err(Error::Config(format!("model dimension {} differs from window dimension {}", model.dim, window.dim())));
    }
    Ok(())
}

/// `⟨X_R X_R⟩ = ∫ |f̂_R(k)|² ρ_X(k) dk` over the grid.
pub fn autocorrelation_growth(
    model: &GoldstoneModel,
    window: &WindowProfile,
    cfg: &ScalingConfig,
    which: Observable,
) -> Result<ScalingReport> {
    check_dim(model, window)?;
    let m = model.validate()?;
    match which {
        Observable::A => sweep(window, cfg, "autocorrelation A", |k| m.rho_a(k)),
        Observable::Q => sweep(window, cfg, "autocorrelation Q", |k| m.rho_q(k)),
    }
}

/// `⟨[Q_R, [Q_R, H]]⟩ = 2 ∫ ω(k) |f̂_R(k)|² ρ_Q(k) dk` over the grid.
pub fn double_commutator_scaling(
    model: &GoldstoneModel,
    window: &WindowProfile,
    cfg: &ScalingConfig,
) -> Result<ScalingReport> {
    check_dim(model, window)?;
    let m = model.validate()?;
    sweep(window, cfg, "double commutator", |k| 2.0 * model.dispersion.energy(k) * m.rho_q(k))
}

/// Both sides of `|⟨[Q_R, A_R/V_R]⟩|² <= ⟨A_R A_R⟩/V_R² · ⟨[Q_R, [Q_R, H]]⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct BogoliubovCheck {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn bogoliubov_check(model: &GoldstoneModel, window: &WindowProfile, cfg: &ScalingConfig, r: f64) -> Result<BogoliubovCheck> {
    check_dim(model, window)?;
    let m = model.validate()?;
    let rules = radial_rules(window, cfg)?;
    let n = window.dim() as f64;
    // V_R = (2π)^{n/2} R^n f̂(0); the powers of R cancel after p = R k
    let vol = (2.0 * PI).powf(n / 2.0) * window.fourier(0.0);
    let x: Complex64 = radial(window, &rules.fine, |p| m.rho_qa(p / r)) / vol;
    let lhs = 4.0 * x.im * x.im;
    let auto = radial(window, &rules.fine, |p| m.rho_a(p / r));
    let dc = radial(window, &rules.fine, |p| 2.0 * model.dispersion.energy(p / r) * m.rho_q(p / r));
    let rhs = auto * dc / (vol * vol);
    Ok(BogoliubovCheck { r, lhs, rhs, holds: lhs <= rhs * (1.0 + BOGOLIUBOV_SLACK) })
}

/// Largest exponent for the generator slot and whether the limit
/// fluctuations must be classical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct CanonicalPair {
    pub alpha_max: f64,
    pub q_growth: f64,
    pub classical: bool,
}

/// `α_max = (n-2)/2`; classical when `⟨Q_R Q_R⟩` grows faster than `R^{2α_max}`.
pub fn canonical_pair_exponents(n: usize, q_growth: f64) -> CanonicalPair {
    let alpha_max = (n as f64 - 2.0) / 2.0;
    CanonicalPair { alpha_max, q_growth, classical: q_growth > 2.0 * alpha_max }
}

/// One spectral sample `(E_j, p_j, a_j)` of a vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SpectralSample {
    pub energy: f64,
    pub momentum: Vec<f64>,
    pub amplitude: [f64; 2],
}

/// A vector with finitely many spectral samples plus its invariant part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SpectralVectorModel {
    pub invariant: [f64; 2],
    pub samples: Vec<SpectralSample>,
}

impl SpectralVectorModel {
    fn validate(&self, n: usize) -> Result<()> {
        for (j, s) in self.samples.iter().enumerate() {
            if s.momentum.len() != n {
                return Err(Error::ModelValidation(format!("sample {j} has momentum of dimension {}", s.momentum.len())));
            }
            if norm(&s.momentum) == 0.0 && s.energy == 0.0 {
                return Err(Error::ModelValidation(format!(
                    "sample {j} sits at (E, p) = (0, 0); the invariant component is unique"
                )));
            }
            if !s.amplitude.iter().chain(&s.momentum).all(|x| x.is_finite()) {
                return Err(Error::ModelValidation(format!("sample {j} is not finite")));
            }
        }
        Ok(())
    }

    /// `‖non-invariant part‖`.
    pub fn non_invariant_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.amplitude[0].powi(2) + s.amplitude[1].powi(2)).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct ProjectorReport {
    pub report: ScalingReport,
    /// Residual decreases at every step after the first scale.
    pub monotone: bool,
    /// Residual never exceeds `max_j |f̂(R p_j)|/f̂(0) · ‖non-invariant part‖`.
    pub bounded: bool,
}

/// `‖f̂(0)^{-1} Σ_j f̂(R p_j) a_j e_j - P_Ω ψ‖` over the grid.
pub fn mean_projector_convergence(
    vector: &SpectralVectorModel,
    window: &WindowProfile,
    cfg: &ScalingConfig,
) -> Result<ProjectorReport> {
    cfg.validate()?;
    vector.validate(window.dim())?;
    let f0 = window.fourier(0.0);
    let total = vector.non_invariant_norm();
    let mut bounded = true;
    let values: Vec<CorrelatorValue> = cfg
        .r_grid
        .iter()
        .map(|&r| {
            let mut sq = 0.0;
            let mut worst = 0.0f64;
            for s in &vector.samples {
                let ratio = window.fourier(r * norm(&s.momentum)) / f0;
                sq += ratio * ratio * (s.amplitude[0].powi(2) + s.amplitude[1].powi(2));
                worst = worst.max(ratio.abs());
            }
            let residual = sq.sqrt();
            bounded &= residual <= worst * total * (1.0 + 1e-12);
            CorrelatorValue {
                r,
                value: Complex64::new(residual, 0.0),
                error_estimate: 0.0,
                tail_certificate: 0.0,
                extrapolated: r * vector.samples.iter().map(|s| norm(&s.momentum)).fold(0.0, f64::max)
                    > window.kappa_max(),
            }
        })
        .collect();
    let monotone = values.windows(2).skip(1).all(|w| w[1].value.re < w[0].value.re)
        || values.iter().skip(1).all(|v| v.value.re == 0.0);
    let report = summarize("projector residual".into(), 1, 0.0, values, cfg);
    Ok(ProjectorReport { report, monotone, bounded })
}

/// Time-smearing filter `ĝ(E)` with `ĝ(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GapFilter {
    /// `exp(1 - 1/(1 - (E/w)²))` on `|E| < w`.
    Bump { half_width: f64 },
    /// One on `|E| <= flat`, a C³ smoothstep down to zero at `half_width`.
    Plateau { flat: f64, half_width: f64 },
}

impl GapFilter {
    pub fn half_width(&self) -> f64 {
        match *self {
            GapFilter::Bump { half_width } | GapFilter::Plateau { half_width, .. } => half_width,
        }
    }

    pub fn value(&self, e: f64) -> f64 {
        let e = e.abs();
        match *self {
            GapFilter::Bump { half_width } => {
                let u = e / half_width;
                if u >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - u * u)).exp()
                }
            }
            GapFilter::Plateau { flat, half_width } => {
                if e <= flat {
                    1.0
                } else if e >= half_width {
                    0.0
                } else {
                    1.0 - smoothstep(3, (e - flat) / (half_width - flat))
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            GapFilter::Bump { half_width } => half_width > 0.0,
            GapFilter::Plateau { flat, half_width } => flat >= 0.0 && half_width > flat,
        };
        if !ok {
            return Err(Error::Config(format!("invalid filter {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct GapCheck {
    pub r: f64,
    /// Time-smeared order parameter `2 Im ∫ ĝ(ω) f̂_R f̂_R^V ρ_QA`.
    pub estimate: f64,
    /// `|estimate| < ε_v`.
    pub conserved: bool,
}

/// Order parameter after smearing in time with `g`; with a gap larger than
/// the filter support it vanishes identically.
pub fn gap_conservation_check(
    model: &GoldstoneModel,
    filter: GapFilter,
    window: &WindowProfile,
    cfg: &ScalingConfig,
    r: f64,
) -> Result<GapCheck> {
    check_dim(model, window)?;
    filter.validate()?;
    let m = model.validate()?;
    let gap = model.dispersion.gap();
    if gap > 0.0 && filter.half_width() >= gap {
        return Err(Error::Config(format!(
            "filter support (-{w}, {w}) overlaps the spectrum above the gap {gap}",
            w = filter.half_width()
        )));
    }
    let rules = radial_rules(window, cfg)?;
    let n = window.dim() as f64;
    let vol = (2.0 * PI).powf(n / 2.0) * window.fourier(0.0);
    let x: Complex64 =
        radial(window, &rules.fine, |p| m.rho_qa(p / r) * filter.value(model.dispersion.energy(p / r))) / vol;
    let estimate = 2.0 * x.im;
    Ok(GapCheck { r, estimate, conserved: estimate.abs() < cfg.vanishing_tol })
}
