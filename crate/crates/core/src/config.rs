//! Run configurations: TOML text with a model, window, analysis list,
//! numeric settings and output options. Parsing fills every default into
//! the returned value, so the echoed configuration reproduces the run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::exec::Parallelism;
use crate::limit::ObservableSet;
use crate::model::{
    gaussian_state, lorentzian_state, powerlaw_state, product_ansatz_state, weighted_state, goldstone_state,
    DecayClass, FactorProfile, OrderCorrelator, Shape, Spectrum, TruncatedHierarchy, WeightFactor,
};
use crate::quadrature::QuadratureSpec;
use crate::scaling::{l2_alpha_window, EvalPath, ScalingConfig};
use crate::ssb::{Dispersion, GapFilter, GoldstoneModel, SpectralSample, SpectralVectorModel};
use crate::window::{WindowKind, DEFAULT_RESOLUTION};
use crate::{Error, Result};
use num_complex::Complex64;

fn one() -> f64 {
    1.0
}

/// A full run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct RunConfig {
    /// Absent for analyses that need no model (cumulant round trips, Weyl series).
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub window: WindowBlock,
    #[serde(default)]
    pub analysis: Vec<Analysis>,
    #[serde(default)]
    pub numeric: NumericBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

/// Model class and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum ModelSpec {
    /// Quasi-free, `Ŵ_2(k) = amp e^{-width² k²/2}`.
    Gaussian {
        dim: usize,
        #[serde(default = "one")]
        amp: f64,
        #[serde(default = "one")]
        width: f64,
    },
    /// Quasi-free, `Ŵ_2(k) = amp/(1 + k²/κ²)`.
    Lorentzian {
        dim: usize,
        #[serde(default = "one")]
        amp: f64,
        #[serde(default = "one")]
        kappa: f64,
    },
    /// Correlators factorized over difference variables.
    ProductAnsatz { dim: usize, orders: Vec<ProductOrder> },
    /// Quasi-free, `W_2(y) = amp (1+|y|²)^{-β/2}`.
    PowerLaw {
        dim: usize,
        #[serde(default = "one")]
        amp: f64,
        beta: f64,
    },
    /// `W_l = (1+|y|²)^{α_l/2} F_l`.
    Weighted { dim: usize, orders: Vec<WeightedOrder> },
    Zero { dim: usize },
    /// Spectral densities of an order parameter and a charge density.
    Goldstone(GoldstoneModel),
    /// Finitely many observables with cross spectra `Ŵ_ij`; unset entries are zero.
    Observables {
        dim: usize,
        labels: Vec<String>,
        #[serde(default)]
        cross: Vec<CrossEntry>,
        #[serde(default)]
        alpha: Option<f64>,
    },
    /// A vector given by its spectral samples.
    SpectralVector {
        dim: usize,
        invariant: [f64; 2],
        samples: Vec<SpectralSample>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct ProductOrder {
    pub order: usize,
    pub factors: Vec<FactorProfile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct WeightedOrder {
    pub order: usize,
    pub alpha: f64,
    pub factor: WeightFactor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct CrossEntry {
    pub row: usize,
    pub col: usize,
    pub terms: Vec<TermSpec>,
}

/// `(re + i im) · shape(|k|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct TermSpec {
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub shape: ShapeSpec,
}

/// Radial momentum profiles available in configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShapeSpec {
    Gaussian { width: f64 },
    Lorentzian { kappa: f64 },
    Exponential { rate: f64 },
    Matern { beta: f64 },
}

impl ShapeSpec {
    fn shape(self) -> Result<Shape> {
        let (name, v) = match self {
            ShapeSpec::Gaussian { width } => ("width", width),
            ShapeSpec::Lorentzian { kappa } => ("kappa", kappa),
            ShapeSpec::Exponential { rate } => ("rate", rate),
            ShapeSpec::Matern { beta } => ("beta", beta),
        };
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::ModelValidation(format!("shape parameter {name} must be positive (got {v})")));
        }
        Ok(match self {
            ShapeSpec::Gaussian { width } => Shape::Gaussian { width },
            ShapeSpec::Lorentzian { kappa } => Shape::Lorentzian { kappa },
            ShapeSpec::Exponential { rate } => Shape::Exponential { rate },
            ShapeSpec::Matern { beta } => Shape::Matern { beta },
        })
    }
}

/// Builds a spectrum from configured terms.
pub fn spectrum_from_terms(dim: usize, terms: &[TermSpec]) -> Result<Spectrum> {
    let terms = terms
        .iter()
        .map(|t| Ok((Complex64::new(t.re, t.im), t.shape.shape()?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum { dim, terms })
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::Gaussian { dim, .. }
            | ModelSpec::Lorentzian { dim, .. }
            | ModelSpec::ProductAnsatz { dim, .. }
            | ModelSpec::PowerLaw { dim, .. }
            | ModelSpec::Weighted { dim, .. }
            | ModelSpec::Zero { dim }
            | ModelSpec::Observables { dim, .. }
            | ModelSpec::SpectralVector { dim, .. } => *dim,
            ModelSpec::Goldstone(m) => m.dim,
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            ModelSpec::Gaussian { .. } => "gaussian",
            ModelSpec::Lorentzian { .. } => "lorentzian",
            ModelSpec::ProductAnsatz { .. } => "product-ansatz",
            ModelSpec::PowerLaw { .. } => "power-law",
            ModelSpec::Weighted { .. } => "weighted",
            ModelSpec::Zero { .. } => "zero",
            ModelSpec::Goldstone(_) => "goldstone",
            ModelSpec::Observables { .. } => "observables",
            ModelSpec::SpectralVector { .. } => "spectral-vector",
        }
    }

    /// The truncated hierarchy of a state model; `None` for the other classes.
    /// A Goldstone model yields the quasi-free state of its order parameter.
    pub fn state(&self) -> Result<Option<TruncatedHierarchy>> {
        Ok(Some(match self {
            ModelSpec::Gaussian { dim, amp, width } => gaussian_state(*dim, *amp, *width)?,
            ModelSpec::Lorentzian { dim, amp, kappa } => lorentzian_state(*dim, *amp, *kappa)?,
            ModelSpec::ProductAnsatz { dim, orders } => {
                let orders: Vec<_> = orders.iter().map(|o| (o.order, o.factors.clone())).collect();
                product_ansatz_state(*dim, &orders)?
            }
            ModelSpec::PowerLaw { dim, amp, beta } => powerlaw_state(*dim, *amp, *beta)?,
            ModelSpec::Weighted { dim, orders } => {
                let orders: Vec<_> = orders.iter().map(|o| (o.order, o.alpha, o.factor)).collect();
                weighted_state(*dim, &orders)?
            }
            ModelSpec::Zero { dim } => {
                TruncatedHierarchy::from_parts(*dim, vec![(2, OrderCorrelator::Zero, DecayClass::Zero)], true)?
            }
            ModelSpec::Goldstone(m) => goldstone_state(m.dim, m.c_a, m.s, m.cutoff_scale, m.cutoff)?,
            _ => return Ok(None),
        }))
    }

    pub fn observable_set(&self) -> Result<Option<ObservableSet>> {
        let ModelSpec::Observables { dim, labels, cross, alpha } = self else {
            return Ok(None);
        };
        let m = labels.len();
        let mut table = vec![vec![Spectrum { dim: *dim, terms: Vec::new() }; m]; m];
        for e in cross {
            if e.row >= m || e.col >= m {
                return Err(Error::Config(format!("cross entry ({}, {}) outside {m} observables", e.row, e.col)));
            }
            table[e.row][e.col] = spectrum_from_terms(*dim, &e.terms)?;
        }
        Ok(Some(ObservableSet { labels: labels.clone(), cross: table, alpha: *alpha }))
    }

    pub fn spectral_vector(&self) -> Option<SpectralVectorModel> {
        match self {
            ModelSpec::SpectralVector { invariant, samples, .. } => {
                Some(SpectralVectorModel { invariant: *invariant, samples: samples.clone() })
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum WindowFamily {
    #[default]
    MollifiedStep,
    Smoothstep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct WindowBlock {
    #[serde(default)]
    pub kind: WindowFamily,
    /// Smoothness order of the smoothstep family.
    #[serde(default)]
    pub order: Option<u32>,
    /// Filled from the model when absent.
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

impl Default for WindowBlock {
    fn default() -> Self {
        WindowBlock { kind: WindowFamily::MollifiedStep, order: None, dim: None, resolution: DEFAULT_RESOLUTION }
    }
}

impl WindowBlock {
    pub fn window_kind(&self) -> Result<WindowKind> {
        match (self.kind, self.order) {
            (WindowFamily::MollifiedStep, None) => Ok(WindowKind::MollifiedStep),
            (WindowFamily::MollifiedStep, Some(_)) => {
                Err(Error::Config("window.order only applies to the smoothstep family".into()))
            }
            (WindowFamily::Smoothstep, Some(order)) => Ok(WindowKind::Smoothstep { order }),
            (WindowFamily::Smoothstep, None) => Err(Error::Config("smoothstep window needs window.order".into())),
        }
    }
}

/// Window scales, either listed or geometric from `start` with `count`
/// points and either a `ratio` or a final scale `stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Geometric {
        start: f64,
        count: usize,
        #[serde(default)]
        ratio: Option<f64>,
        #[serde(default)]
        stop: Option<f64>,
    },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Geometric { start: 8.0, count: 8, ratio: None, stop: Some(512.0) }
    }
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::List(v) => Ok(v.clone()),
            GridSpec::Geometric { start, count, ratio, stop } => match (ratio, stop) {
                (Some(ratio), None) => Ok(crate::scaling::geometric_grid(*start, *ratio, *count)),
                (None, Some(stop)) => {
                    if *count < 2 {
                        return Err(Error::Config("a grid with a stop value needs count >= 2".into()));
                    }
                    let span = stop / start;
                    let last = (*count - 1) as f64;
                    Ok((0..*count)
                        .map(|i| if i + 1 == *count { *stop } else { start * span.powf(i as f64 / last) })
                        .collect())
                }
                _ => Err(Error::Config("numeric.r_grid needs exactly one of ratio and stop".into())),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct NumericBlock {
    #[serde(default)]
    pub r_grid: GridSpec,
    /// Integration box; the default depends on dimension and order.
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default = "defaults::vanishing_tol")]
    pub vanishing_tol: f64,
    #[serde(default = "defaults::exponent_band")]
    pub exponent_band: f64,
    #[serde(default = "defaults::tail_tol")]
    pub tail_tol: f64,
    #[serde(default = "defaults::value_floor")]
    pub value_floor: f64,
    #[serde(default)]
    pub strict_window: bool,
    #[serde(default)]
    pub path: EvalPath,
    #[serde(default)]
    pub parallelism: Parallelism,
}

mod defaults {
    pub fn vanishing_tol() -> f64 {
        1e-8
    }
    pub fn exponent_band() -> f64 {
        0.1
    }
    pub fn tail_tol() -> f64 {
        1e-6
    }
    pub fn value_floor() -> f64 {
        1e-30
    }
}

impl Default for NumericBlock {
    fn default() -> Self {
        NumericBlock {
            r_grid: GridSpec::default(),
            quadrature: None,
            vanishing_tol: defaults::vanishing_tol(),
            exponent_band: defaults::exponent_band(),
            tail_tol: defaults::tail_tol(),
            value_floor: defaults::value_floor(),
            strict_window: false,
            path: EvalPath::Auto,
            parallelism: Parallelism::Parallel,
        }
    }
}

impl NumericBlock {
    pub fn scaling_config(&self) -> Result<ScalingConfig> {
        let cfg = ScalingConfig {
            r_grid: self.r_grid.points()?,
            quadrature: self.quadrature,
            vanishing_tol: self.vanishing_tol,
            exponent_band: self.exponent_band,
            tail_tol: self.tail_tol,
            value_floor: self.value_floor,
            strict_window: self.strict_window,
            path: self.path,
            parallelism: self.parallelism,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
    PlotData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct OutputBlock {
    /// Directory for report files; the command line may override it.
    #[serde(default)]
    pub dir: Option<String>,
    /// File name stem; defaults to the config file stem.
    #[serde(default)]
    pub stem: Option<String>,
    #[serde(default = "all_formats")]
    pub formats: Vec<OutputFormat>,
}

fn all_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Json, OutputFormat::Csv, OutputFormat::PlotData]
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { dir: None, stem: None, formats: all_formats() }
    }
}

/// How a scaling sweep picks its exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema, Default)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum AlphaMode {
    /// `α = n/2`; resolved to an explicit value.
    #[default]
    Canonical,
    Explicit { value: f64 },
    /// `γ = (n + α_2)/2` with `α_2` from the weighted model.
    Weighted,
    /// Bisection on the sign of the 2-point exponent.
    Bisect {
        #[serde(default)]
        lower: f64,
        upper: f64,
        #[serde(default = "default_bisect_tol")]
        tol: f64,
    },
}

fn default_bisect_tol() -> f64 {
    1e-4
}

fn default_orders() -> Vec<usize> {
    vec![2]
}

fn default_cumulant_order() -> usize {
    6
}

fn default_labels() -> usize {
    2
}

fn default_pairing_max() -> usize {
    6
}

fn default_weyl_terms() -> usize {
    8
}

fn default_ccr_terms() -> usize {
    6
}

fn default_gap_r() -> f64 {
    2048.0
}

/// `F` and `G` spectra of a pair with `⟨A(x) B(0)⟩ = F(x)`, `⟨B(0) A(x)⟩ = G(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct PairSpec {
    pub label: String,
    pub f: Vec<TermSpec>,
    pub g: Vec<TermSpec>,
}

/// One analysis of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Analysis {
    /// Exponent sweeps of the listed orders.
    ScalingSweep {
        #[serde(default = "default_orders")]
        orders: Vec<usize>,
        #[serde(default)]
        alpha: AlphaMode,
        /// Per-slot spatial shifts.
        #[serde(default)]
        shifts: Vec<Vec<f64>>,
        /// Scales at which to compare against position-space quadrature (n = 1, l <= 3).
        #[serde(default)]
        oracle_r: Vec<f64>,
    },
    /// 2-point q-mode sweeps, with `q_1 = -q_2 = q` along the first axis and
    /// for the listed unbalanced pairs `(q_1, q_2)`.
    Qmode {
        q_values: Vec<f64>,
        #[serde(default)]
        unbalanced: Vec<[f64; 2]>,
    },
    /// Moment/cumulant round trip on a seeded random table, pairing counts
    /// and the Gaussian cumulant check.
    CumulantRoundtrip {
        #[serde(default = "default_cumulant_order")]
        order: usize,
        #[serde(default = "default_labels")]
        labels: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_pairing_max")]
        pairing_max: usize,
    },
    /// Limit state of an observables model, Weyl series for given variances
    /// and commutator criteria for constructed pairs.
    LimitState {
        #[serde(default)]
        weyl_variances: Vec<f64>,
        #[serde(default = "default_weyl_terms")]
        weyl_terms: usize,
        #[serde(default)]
        ccr_pairs: Vec<[usize; 2]>,
        #[serde(default = "default_ccr_terms")]
        ccr_terms: usize,
        #[serde(default)]
        commutator_pairs: Vec<PairSpec>,
    },
    /// Anomalous-scaling bounds of a Goldstone model.
    SsbBound {
        /// Growth exponent of `⟨Q_R Q_R⟩`; fitted when absent.
        #[serde(default)]
        q_growth: Option<f64>,
    },
    /// Convergence of the mean projector on a spectral vector.
    Projector {},
    /// Time-smeared order parameter for several filters, with and without a gap.
    GapCheck {
        filters: Vec<GapFilter>,
        #[serde(default = "default_gap_r")]
        r: f64,
        /// Replaces the dispersion for the gapped comparison.
        #[serde(default)]
        gapped: Option<Dispersion>,
    },
}

impl Analysis {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Analysis::ScalingSweep { .. } => "scaling-sweep",
            Analysis::Qmode { .. } => "qmode",
            Analysis::CumulantRoundtrip { .. } => "cumulant-roundtrip",
            Analysis::LimitState { .. } => "limit-state",
            Analysis::SsbBound { .. } => "ssb-bound",
            Analysis::Projector {} => "projector",
            Analysis::GapCheck { .. } => "gap-check",
        }
    }

    fn needs_window(&self) -> bool {
        match self {
            Analysis::CumulantRoundtrip { .. } => false,
            Analysis::LimitState { commutator_pairs, .. } => !commutator_pairs.is_empty(),
            _ => true,
        }
    }
}

/// Paths of keys present in `input` but absent from `known`.
fn collect_unknown(input: &toml::Value, known: &toml::Value, path: &str, out: &mut Vec<String>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match (input, known) {
        (toml::Value::Table(a), toml::Value::Table(b)) => {
            for (k, v) in a {
                match b.get(k) {
                    Some(w) => collect_unknown(v, w, &join(k), out),
                    None => out.push(join(k)),
                }
            }
        }
        (toml::Value::Array(a), toml::Value::Array(b)) => {
            for (i, (v, w)) in a.iter().zip(b).enumerate() {
                collect_unknown(v, w, &format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}

/// Parses, lists unknown keys and resolves defaults and compatibility.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: toml::Table = toml::from_str(text).map_err(|e| Error::Config(format!("parse error: {e}")))?;
    let input = toml::Value::Table(raw);
    let config: RunConfig =
        input.clone().try_into().map_err(|e: toml::de::Error| Error::Config(format!("invalid config: {e}")))?;
    let known = toml::Value::try_from(&config).map_err(|e| Error::Config(format!("cannot re-encode config: {e}")))?;
    let mut unknown = Vec::new();
    collect_unknown(&input, &known, "", &mut unknown);
    if !unknown.is_empty() {
        return Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))));
    }
    config.resolve()
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_config(&text)
}

impl RunConfig {
    /// Fills model-dependent defaults and checks that every analysis fits the model.
    pub fn resolve(mut self) -> Result<Self> {
        self.numeric.scaling_config()?;
        if let Some(model) = &self.model {
            let n = model.dim();
            match self.window.dim {
                Some(d) if d != n => {
                    return Err(Error::Config(format!("window dimension {d} differs from model dimension {n}")));
                }
                _ => self.window.dim = Some(n),
            }
        }
        self.window.window_kind()?;
        let state = match &self.model {
            Some(m) => m.state()?,
            None => None,
        };
        let class = state.as_ref().map(|s| s.truncated(2).1);
        let model_name = self.model.as_ref().map_or("none", |m| m.class_name());
        for (i, a) in self.analysis.iter_mut().enumerate() {
            let kind = a.kind_name();
            let incompatible =
                |what: &str| Error::Config(format!("analysis {i} ({kind}) {what}; model class is {model_name}"));
            if a.needs_window() && self.window.dim.is_none() {
                return Err(Error::Config(format!(
                    "analysis {i} ({kind}) needs a window dimension (set window.dim or a model)"
                )));
            }
            match a {
                Analysis::ScalingSweep { orders, alpha, oracle_r, .. } => {
                    let Some(class) = class else {
                        return Err(incompatible("needs a state model"));
                    };
                    if orders.is_empty() || orders.iter().any(|&l| l < 2) {
                        return Err(Error::Config(format!("analysis {i}: orders must be >= 2 and non-empty")));
                    }
                    let n = self.window.dim.unwrap_or(1);
                    if matches!(alpha, AlphaMode::Canonical) {
                        *alpha = AlphaMode::Explicit { value: n as f64 / 2.0 };
                    }
                    match alpha {
                        AlphaMode::Explicit { value } => {
                            if let DecayClass::L2 { .. } = class {
                                let w = l2_alpha_window(n);
                                if !w.contains(*value) {
                                    return Err(Error::Config(format!(
                                        "analysis {i}: alpha = {value} lies outside the square-integrable window ({}, {}] of the L2 model",
                                        w.lower, w.upper
                                    )));
                                }
                            }
                        }
                        AlphaMode::Weighted => {
                            if !matches!(self.model, Some(ModelSpec::Weighted { .. })) {
                                return Err(incompatible("uses weighted exponents"));
                            }
                        }
                        AlphaMode::Bisect { lower, upper, tol } => {
                            if !(upper > lower && *tol > 0.0) {
                                return Err(Error::Config(format!("analysis {i}: bisection needs lower < upper and tol > 0")));
                            }
                        }
                        AlphaMode::Canonical => unreachable!("resolved above"),
                    }
                    if !oracle_r.is_empty() && (n != 1 || orders.iter().any(|&l| l > 3)) {
                        return Err(Error::Unsupported(format!(
                            "analysis {i}: the position-space comparison covers n = 1 and orders 2 and 3"
                        )));
                    }
                }
                Analysis::Qmode { q_values, .. } => {
                    if class != Some(DecayClass::L1) {
                        return Err(incompatible("needs an integrable 2-point function"));
                    }
                    if q_values.is_empty() {
                        return Err(Error::Config(format!("analysis {i}: q_values is empty")));
                    }
                }
                Analysis::CumulantRoundtrip { order, labels, pairing_max, .. } => {
                    if *order < 1 || *order > crate::partition::MAX_ORDER || *labels == 0 {
                        return Err(Error::Config(format!(
                            "analysis {i}: need 1 <= order <= {} and labels >= 1",
                            crate::partition::MAX_ORDER
                        )));
                    }
                    if 2 * *pairing_max > crate::partition::MAX_ORDER {
                        return Err(Error::OrderTooLarge(2 * *pairing_max));
                    }
                }
                Analysis::LimitState { weyl_variances, ccr_pairs, .. } => {
                    if weyl_variances.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
                        return Err(Error::Config(format!("analysis {i}: Weyl variances must be >= 0")));
                    }
                    if !ccr_pairs.is_empty() && !matches!(self.model, Some(ModelSpec::Observables { .. })) {
                        return Err(incompatible("checks product relations of an observables model"));
                    }
                }
                Analysis::SsbBound { .. } | Analysis::GapCheck { .. } => {
                    if !matches!(self.model, Some(ModelSpec::Goldstone(_))) {
                        return Err(incompatible("needs a goldstone model"));
                    }
                }
                Analysis::Projector {} => {
                    if !matches!(self.model, Some(ModelSpec::SpectralVector { .. })) {
                        return Err(incompatible("needs a spectral-vector model"));
                    }
                }
            }
        }
        if let Some(m) = &self.model {
            m.observable_set()?;
            if let ModelSpec::Goldstone(g) = m {
                g.validate()?;
            }
        }
        Ok(self)
    }

    /// Window kind, dimension and resolution; `None` without a dimension.
    pub fn window_spec(&self) -> Result<Option<(WindowKind, usize, usize)>> {
        let Some(d) = self.window.dim else {
            return Ok(None);
        };
        Ok(Some((self.window.window_kind()?, d, self.window.resolution)))
    }

    pub fn scaling_config(&self) -> Result<ScalingConfig> {
        self.numeric.scaling_config()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_eight_points_from_8_to_512() {
        let g = GridSpec::default().points().unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], 8.0);
        assert_eq!(*g.last().unwrap(), 512.0);
    }
}
