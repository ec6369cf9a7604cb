//! Executes a resolved configuration. Analyses run in order and each result
//! depends only on the configuration, so reports are reproducible.

use std::time::Instant;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{spectrum_from_terms, AlphaMode, Analysis, ModelSpec, RunConfig};
use crate::cumulants::{cumulants_from_moments, moments_from_cumulants, pairing_sum, CorrelatorTable, CumulantTable, MomentTable};
use crate::limit::{build_limit_state, LimitState, ObservablePair};
use crate::model::{DecayClass, TruncatedHierarchy};
use crate::partition::{enumerate_pairings, pairing_count};
use crate::report::{
    AnalysisResult, AnalysisTiming, CcrEntry, CommutatorEntry, CumulantResult, FilterCheck, GapResult, LimitReference,
    LimitResult, OracleComparison, PairingCount, QmodePoint, QmodeResult, RunReport, SsbResult, SweepResult, Timings,
    WeylPoint, SCHEMA_ID,
};
use crate::scaling::oracle::PositionOracle;
use crate::scaling::weighted::{weighted_gamma, weighted_sweep};
use crate::scaling::{
    critical_alpha, exponent_sweep, fluctuation_correlator, l2_alpha_window, l2_vanishing_threshold, qmode_correlator,
    ScalingConfig, SlotData,
};
use crate::ssb::{
    autocorrelation_growth, bogoliubov_check, canonical_pair_exponents, double_commutator_scaling,
    gap_conservation_check, mean_projector_convergence, GoldstoneModel, Observable,
};
use crate::window::WindowProfile;
use crate::{Error, Result};

/// Prefixes the message of `e` with `context`, keeping its kind.
fn qualify(e: Error, context: &str) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("{context}: {m}")),
        Error::ModelValidation(m) => Error::ModelValidation(format!("{context}: {m}")),
        Error::NumericalAccuracy { message, bound } => {
            Error::NumericalAccuracy { message: format!("{context}: {message}"), bound }
        }
        Error::Unsupported(m) => Error::Unsupported(format!("{context}: {m}")),
        Error::InvalidLimitState(m) => Error::InvalidLimitState(format!("{context}: {m}")),
        Error::Consistency(m) => Error::Consistency(format!("{context}: {m}")),
        other => other,
    }
}

struct Context<'a> {
    config: &'a RunConfig,
    cfg: ScalingConfig,
    window: Option<std::sync::Arc<WindowProfile>>,
    state: Option<TruncatedHierarchy>,
}

impl Context<'_> {
    fn window(&self) -> Result<&WindowProfile> {
        self.window.as_deref().ok_or_else(|| Error::Config("this analysis needs a window dimension".into()))
    }

    fn state(&self) -> Result<&TruncatedHierarchy> {
        self.state.as_ref().ok_or_else(|| Error::Config("this analysis needs a state model".into()))
    }

    fn goldstone(&self) -> Result<&GoldstoneModel> {
        match &self.config.model {
            Some(ModelSpec::Goldstone(m)) => Ok(m),
            _ => Err(Error::Config("this analysis needs a goldstone model".into())),
        }
    }
}

/// Runs every analysis of a resolved configuration.
pub fn run(config: &RunConfig) -> Result<(RunReport, Timings)> {
    let start = Instant::now();
    let cfg = config.scaling_config()?;
    let window = match config.window_spec()? {
        Some((kind, dim, res)) if !config.analysis.is_empty() => Some(WindowProfile::shared(kind, dim, res)?),
        _ => None,
    };
    let state = match &config.model {
        Some(m) => m.state()?,
        None => None,
    };
    let ctx = Context { config, cfg, window, state };
    let mut results = Vec::with_capacity(config.analysis.len());
    let mut analyses = Vec::with_capacity(config.analysis.len());
    for (index, analysis) in config.analysis.iter().enumerate() {
        let t = Instant::now();
        let label = format!("analysis {index} ({})", analysis.kind_name());
        log::info!("running {label}");
        let result = run_one(&ctx, analysis).map_err(|e| qualify(e, &label))?;
        results.push(result);
        analyses.push(AnalysisTiming { index, kind: analysis.kind_name().into(), seconds: t.elapsed().as_secs_f64() });
    }
    let report = RunReport { schema: SCHEMA_ID.into(), config: config.clone(), results };
    Ok((report, Timings { total_seconds: start.elapsed().as_secs_f64(), analyses }))
}

fn run_one(ctx: &Context, analysis: &Analysis) -> Result<AnalysisResult> {
    Ok(match analysis {
        Analysis::ScalingSweep { orders, alpha, shifts, oracle_r } => {
            AnalysisResult::ScalingSweep(scaling_sweep(ctx, orders, alpha, shifts, oracle_r)?)
        }
        Analysis::Qmode { q_values, unbalanced } => AnalysisResult::Qmode(qmode(ctx, q_values, unbalanced)?),
        Analysis::CumulantRoundtrip { order, labels, seed, pairing_max } => {
            AnalysisResult::CumulantRoundtrip(cumulant_roundtrip(ctx, *order, *labels, *seed, *pairing_max)?)
        }
        Analysis::LimitState { weyl_variances, weyl_terms, ccr_pairs, ccr_terms, commutator_pairs } => {
            let mut out =
                LimitResult { state: None, observable_weyl: Vec::new(), weyl: Vec::new(), ccr: Vec::new(), commutators: Vec::new() };
            if let Some(set) = ctx.config.model.as_ref().map(|m| m.observable_set()).transpose()?.flatten() {
                let state = build_limit_state(&set, ctx.window()?, &ctx.cfg)?;
                for i in 0..state.len() {
                    out.observable_weyl.push(state.weyl_expectation(i, *weyl_terms)?);
                }
                for &[i, j] in ccr_pairs {
                    out.ccr.push(CcrEntry { i, j, check: state.ccr_product_check(i, j, *ccr_terms)? });
                }
                out.state = Some(state);
            }
            for &s in weyl_variances {
                let single = LimitState::new(vec!["a".into()], vec![vec![Complex64::new(s, 0.0)]])?;
                let series = single.weyl_expectation(0, *weyl_terms)?;
                out.weyl.push(WeylPoint { variance: s, terms: *weyl_terms, series, within_bound: series.within_bound() });
            }
            for p in commutator_pairs {
                let w = ctx.window()?;
                let pair =
                    ObservablePair { f: spectrum_from_terms(w.dim(), &p.f)?, g: spectrum_from_terms(w.dim(), &p.g)? };
                let criterion = pair.commutator_criterion(w, ctx.cfg.vanishing_tol)?;
                let mut sweep = pair.commutator_sweep(w, &ctx.cfg)?;
                sweep.label = format!("commutator {}", p.label);
                out.commutators.push(CommutatorEntry { label: p.label.clone(), criterion, sweep });
            }
            AnalysisResult::LimitState(out)
        }
        Analysis::SsbBound { q_growth } => {
            let (m, w, cfg) = (ctx.goldstone()?, ctx.window()?, &ctx.cfg);
            let autocorrelation_a = autocorrelation_growth(m, w, cfg, Observable::A)?;
            let autocorrelation_q = autocorrelation_growth(m, w, cfg, Observable::Q)?;
            let double_commutator = double_commutator_scaling(m, w, cfg)?;
            let bogoliubov = cfg.r_grid.iter().map(|&r| bogoliubov_check(m, w, cfg, r)).collect::<Result<Vec<_>>>()?;
            let growth = match q_growth {
                Some(g) => *g,
                None => autocorrelation_q.exponent.ok_or_else(|| {
                    Error::ModelValidation("charge autocorrelation vanishes; set q_growth explicitly".into())
                })?,
            };
            AnalysisResult::SsbBound(SsbResult {
                bogoliubov_holds: bogoliubov.iter().all(|b| b.holds),
                canonical: canonical_pair_exponents(m.dim, growth),
                autocorrelation_a,
                autocorrelation_q,
                double_commutator,
                bogoliubov,
            })
        }
        Analysis::Projector {} => {
            let vector = ctx.config.model.as_ref().and_then(|m| m.spectral_vector()).ok_or_else(|| {
                Error::Config("this analysis needs a spectral-vector model".into())
            })?;
            AnalysisResult::Projector(mean_projector_convergence(&vector, ctx.window()?, &ctx.cfg)?)
        }
        Analysis::GapCheck { filters, r, gapped } => {
            let (m, w, cfg) = (ctx.goldstone()?, ctx.window()?, &ctx.cfg);
            let gapless = filters
                .iter()
                .map(|&filter| Ok(FilterCheck { filter, check: gap_conservation_check(m, filter, w, cfg, *r)? }))
                .collect::<Result<Vec<_>>>()?;
            let est: Vec<f64> = gapless.iter().map(|c| c.check.estimate.abs()).collect();
            let max = est.iter().copied().fold(0.0, f64::max);
            let min = est.iter().copied().fold(f64::INFINITY, f64::min);
            let relative_variation = if max > 0.0 { (max - min) / max } else { 0.0 };
            let gapped_checks = match gapped {
                Some(d) => {
                    let gm = GoldstoneModel { dispersion: *d, ..*m };
                    filters
                        .iter()
                        .map(|&filter| Ok(FilterCheck { filter, check: gap_conservation_check(&gm, filter, w, cfg, *r)? }))
                        .collect::<Result<Vec<_>>>()?
                }
                None => Vec::new(),
            };
            AnalysisResult::GapCheck(GapResult {
                r: *r,
                gapless,
                relative_variation,
                gapped_dispersion: *gapped,
                gapped: gapped_checks,
            })
        }
    })
}

/// `Ŵ(q) ∫ f̂²` from the closed-form spectrum, compared with a value.
fn reference(state: &TruncatedHierarchy, window: &WindowProfile, q: f64, value: f64) -> Result<Option<LimitReference>> {
    let n = window.dim();
    let (corr, class) = state.truncated(2);
    if class != DecayClass::L1 || !corr.has_spectrum() {
        return Ok(None);
    }
    let mut qv = vec![0.0; n];
    qv[0] = q;
    let spectral_weight = corr.momentum(n, &qv).re;
    let window_norm = window.hat_l2_squared();
    let want = spectral_weight * window_norm;
    Ok(Some(LimitReference {
        spectral_weight,
        window_norm,
        value: want,
        relative_error: if want != 0.0 { (value - want).abs() / want.abs() } else { value.abs() },
    }))
}

fn scaling_sweep(
    ctx: &Context,
    orders: &[usize],
    mode: &AlphaMode,
    shifts: &[Vec<f64>],
    oracle_r: &[f64],
) -> Result<SweepResult> {
    let (state, w, cfg) = (ctx.state()?, ctx.window()?, &ctx.cfg);
    let n = w.dim();
    let slots = SlotData { offsets: Vec::new(), shifts: shifts.to_vec() };
    let mut weighted = Vec::new();
    let mut bisected_alpha = None;
    let mut sweeps = Vec::with_capacity(orders.len());
    let alpha = match mode {
        AlphaMode::Explicit { value } => *value,
        AlphaMode::Bisect { lower, upper, tol } => {
            let a = critical_alpha(state, w, cfg, *lower, *upper, *tol)?;
            bisected_alpha = Some(a);
            a
        }
        AlphaMode::Weighted => {
            let alpha2 = match &ctx.config.model {
                Some(ModelSpec::Weighted { orders, .. }) => orders.iter().find(|o| o.order == 2).map(|o| o.alpha),
                _ => None,
            }
            .ok_or_else(|| Error::Config("weighted exponents need a weighted model with an order-2 entry".into()))?;
            for &l in orders {
                weighted.push(weighted_gamma(n, alpha2, l)?);
            }
            weighted_gamma(n, alpha2, 2)?.gamma
        }
        AlphaMode::Canonical => n as f64 / 2.0,
    };
    for &l in orders {
        let (corr, _) = state.truncated(l);
        let report = if matches!(mode, AlphaMode::Weighted) && !corr.has_spectrum() {
            weighted_sweep(state, w, cfg, l, alpha)?
        } else {
            exponent_sweep(state, w, cfg, l, alpha, &slots)?
        };
        sweeps.push(report);
    }
    let canonical = (alpha - n as f64 / 2.0).abs() < 1e-12;
    let reference = match sweeps.iter().find(|s| s.order == 2) {
        Some(s) if canonical && shifts.is_empty() => reference(state, w, 0.0, s.limit_estimate.re)?,
        _ => None,
    };
    let threshold = match state.truncated(2).1 {
        DecayClass::L2 { .. } if l2_alpha_window(n).contains(alpha) => Some(l2_vanishing_threshold(n, alpha)?),
        _ => None,
    };
    let mut oracle = Vec::new();
    if !oracle_r.is_empty() {
        let pos = PositionOracle { mode: cfg.parallelism, ..Default::default() };
        let profile = w.radial_profile();
        for &l in orders {
            let (corr, _) = state.truncated(l);
            let position_of = |y: &[f64]| -> Result<f64> {
                corr.position(n, y).map(|z| z.re).ok_or_else(|| {
                    Error::Unsupported(format!("order {l} has no position-space form for the comparison"))
                })
            };
            position_of(&vec![0.5; l - 1])?;
            for &r in oracle_r {
                let spectral = fluctuation_correlator(state, w, cfg, l, alpha, &slots, r)?.value.re;
                let position = match l {
                    2 => pos.two_point(profile, |y| position_of(&[y]).unwrap_or(f64::NAN), r, alpha),
                    3 => pos.three_point(profile, |a, b| position_of(&[a, b]).unwrap_or(f64::NAN), r, alpha),
                    _ => return Err(Error::Unsupported(format!("no position-space comparison for order {l}"))),
                };
                oracle.push(OracleComparison {
                    order: l,
                    r,
                    spectral,
                    position,
                    relative_difference: (spectral - position).abs() / position.abs(),
                });
            }
        }
    }
    Ok(SweepResult { alpha, bisected_alpha, weighted, sweeps, reference, threshold, oracle })
}

fn qmode(ctx: &Context, q_values: &[f64], unbalanced: &[[f64; 2]]) -> Result<QmodeResult> {
    let (state, w, cfg) = (ctx.state()?, ctx.window()?, &ctx.cfg);
    let n = w.dim();
    let axis = |q: f64| -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[0] = q;
        v
    };
    let balanced = q_values
        .iter()
        .map(|&q| {
            let mut report = qmode_correlator(state, w, cfg, 2, vec![axis(q), axis(-q)])?;
            report.label = format!("q={q}");
            let reference = reference(state, w, q, report.limit_estimate.re)?
                .ok_or_else(|| Error::Unsupported("q-mode limits need an integrable 2-point spectrum".into()))?;
            Ok(QmodePoint { q, reference, report })
        })
        .collect::<Result<Vec<_>>>()?;
    let unbalanced = unbalanced
        .iter()
        .map(|&[a, b]| {
            let mut report = qmode_correlator(state, w, cfg, 2, vec![axis(a), axis(b)])?;
            report.label = format!("q1={a} q2={b}");
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QmodeResult { balanced, unbalanced })
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))
}

fn cumulant_roundtrip(ctx: &Context, order: usize, labels: usize, seed: u64, pairing_max: usize) -> Result<CumulantResult> {
    let mode = ctx.cfg.parallelism;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = CorrelatorTable::new(labels, order);
    for k in 1..=order {
        for code in 0..labels.pow(k as u32) {
            let seq = table.decode(k, code);
            let v = if k == 1 { Complex64::new(0.0, 0.0) } else { random_complex(&mut rng) };
            table.set(&seq, v);
        }
    }
    let cumulants = CumulantTable(table);
    let moments = moments_from_cumulants(&cumulants, order, mode)?;
    let back = cumulants_from_moments(&moments, order, mode)?;
    let roundtrip_error = back.0.max_abs_diff(&cumulants.0, order);

    let pairing_counts = (1..=pairing_max)
        .map(|p| {
            Ok(PairingCount {
                pairs: p,
                enumerated: enumerate_pairings(2 * p)?.len() as u64,
                double_factorial: pairing_count(2 * p),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // quasi-free moments from a random covariance
    let cov: Vec<Vec<Complex64>> =
        (0..labels).map(|_| (0..labels).map(|_| random_complex(&mut rng)).collect()).collect();
    let mut gm = CorrelatorTable::new(labels, order);
    for k in 1..=order {
        for code in 0..labels.pow(k as u32) {
            let seq = gm.decode(k, code);
            gm.set(&seq, pairing_sum(&cov, &seq));
        }
    }
    let gc = cumulants_from_moments(&MomentTable(gm), order, mode)?;
    let mut gaussian_higher_cumulant = 0.0f64;
    let mut gaussian_two_point_error = 0.0f64;
    for k in 2..=order {
        for (code, v) in gc.0.order_entries(k).iter().enumerate() {
            let v = v.expect("complete table");
            if k == 2 {
                let seq = gc.0.decode(2, code);
                gaussian_two_point_error = gaussian_two_point_error.max((v - cov[seq[0]][seq[1]]).norm());
            } else {
                gaussian_higher_cumulant = gaussian_higher_cumulant.max(v.norm());
            }
        }
    }
    Ok(CumulantResult {
        order,
        labels,
        seed,
        roundtrip_error,
        pairing_counts,
        gaussian_higher_cumulant,
        gaussian_two_point_error,
    })
}

