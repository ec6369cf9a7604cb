//! The quasi-free limit state of the fluctuation operators: covariance,
//! Wick moments, Weyl expectations and the commutator criterion.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cumulants::pairing_sum;
use crate::model::{DecayClass, OrderCorrelator, Spectrum, TruncatedHierarchy};
use crate::scaling::{exponent_sweep, l2_alpha_window, ScalingConfig, ScalingReport, SlotData};
use crate::window::WindowProfile;
use crate::{Error, Result};

/// Longest sequence accepted by [`LimitState::wick_moment`].
pub const MAX_WICK_LENGTH: usize = 16;
/// Largest Weyl series truncation.
pub const MAX_WEYL_TERMS: usize = 8;
/// Largest truncation of the product series.
pub const MAX_CCR_TERMS: usize = 6;
/// Relative eigenvalue floor for positivity of the symmetric part.
const PSD_FLOOR: f64 = 1e-10;
/// Relative slack in the hermiticity and uncertainty checks.
const CHECK_TOL: f64 = 1e-10;

/// Outcome of the structural checks on a covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct LimitChecks {
    /// Smallest eigenvalue of `s_F`.
    pub min_eigenvalue: f64,
    /// Smallest eigenvalue of the hermitian matrix `C`.
    pub min_eigenvalue_c: f64,
    pub symmetric_psd: bool,
    pub antisymmetric: bool,
    /// `σ(i,j)²/4 <= s(i,i) s(j,j)` for every pair.
    pub uncertainty: bool,
}

/// Quasi-free state on the limit observables, `C = s + (i/2) σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct LimitState {
    pub labels: Vec<String>,
    #[schemars(with = "Vec<Vec<[f64; 2]>>")]
    pub covariance: Vec<Vec<Complex64>>,
    pub symmetric: Vec<Vec<f64>>,
    pub symplectic: Vec<Vec<f64>>,
    pub checks: LimitChecks,
}

fn min_eigenvalue(m: DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

impl LimitState {
    /// Validates `C` and splits it into its symmetric and symplectic parts.
    pub fn new(labels: Vec<String>, covariance: Vec<Vec<Complex64>>) -> Result<Self> {
        let m = labels.len();
        if covariance.len() != m || covariance.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidLimitState(format!("covariance must be {m}x{m}")));
        }
        let scale = covariance.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for i in 0..m {
            for j in 0..m {
                if (covariance[i][j] - covariance[j][i].conj()).norm() > CHECK_TOL * scale {
                    return Err(Error::InvalidLimitState(format!(
                        "covariance is not hermitian at ({}, {})",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        let symmetric: Vec<Vec<f64>> =
            (0..m).map(|i| (0..m).map(|j| 0.5 * (covariance[i][j].re + covariance[j][i].re)).collect()).collect();
        let symplectic: Vec<Vec<f64>> =
            (0..m).map(|i| (0..m).map(|j| covariance[i][j].im - covariance[j][i].im).collect()).collect();
        let s = DMatrix::from_fn(m, m, |i, j| symmetric[i][j]);
        let trace: f64 = (0..m).map(|i| symmetric[i][i].abs()).sum();
        let min_s = min_eigenvalue(s);
        // hermitian C as the real symmetric block matrix [[S, -T], [T, S]] with C = S + iT
        let block = DMatrix::from_fn(2 * m, 2 * m, |a, b| {
            let (i, j) = (a % m, b % m);
            let (re, im) = (covariance[i][j].re, covariance[i][j].im);
            match (a < m, b < m) {
                (true, true) | (false, false) => re,
                (true, false) => -im,
                (false, true) => im,
            }
        });
        let min_c = min_eigenvalue(block);
        let floor = -PSD_FLOOR * trace.max(f64::MIN_POSITIVE);
        let antisymmetric = (0..m).all(|i| (0..m).all(|j| symplectic[i][j] == -symplectic[j][i]));
        let uncertainty = (0..m).all(|i| {
            (0..m).all(|j| {
                let lhs = 0.25 * symplectic[i][j].powi(2);
                let rhs = symmetric[i][i] * symmetric[j][j];
                lhs <= rhs * (1.0 + CHECK_TOL) + CHECK_TOL * scale * scale
            })
        });
        let checks = LimitChecks {
            min_eigenvalue: min_s,
            min_eigenvalue_c: min_c,
            symmetric_psd: min_s >= floor,
            antisymmetric,
            uncertainty,
        };
        if !(checks.symmetric_psd && min_c >= floor) {
            return Err(Error::InvalidLimitState(format!(
                "covariance is not positive (smallest eigenvalues {min_s:.3e} and {min_c:.3e})"
            )));
        }
        if !checks.uncertainty {
            return Err(Error::InvalidLimitState("uncertainty bound violated".into()));
        }
        Ok(LimitState { labels, covariance, symmetric, symplectic, checks })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn check_label(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::Config(format!("unknown observable index {i} (have {})", self.len())));
        }
        Ok(())
    }

    /// `ω_F(A_{i_1} ⋯ A_{i_m})` as a sum over ordered pairings.
    pub fn wick_moment(&self, seq: &[usize]) -> Result<Complex64> {
        if seq.len() > MAX_WICK_LENGTH {
            return Err(Error::OrderTooLarge(seq.len()));
        }
        for &i in seq {
            self.check_label(i)?;
        }
        Ok(pairing_sum(&self.covariance, seq))
    }

    /// `ω_F(e^{iA_i})` from the moment series truncated after `(A_i)^{2N}`,
    /// with its closed form `e^{-s(i,i)/2}`.
    pub fn weyl_expectation(&self, i: usize, terms: usize) -> Result<WeylSeries> {
        self.check_label(i)?;
        if terms > MAX_WEYL_TERMS {
            return Err(Error::OrderTooLarge(2 * terms));
        }
        let mut partial = 0.0;
        let mut fact = 1.0;
        for k in 0..=terms {
            if k > 0 {
                fact *= ((2 * k - 1) * 2 * k) as f64;
            }
            let moment = self.wick_moment(&vec![i; 2 * k])?.re;
            partial += if k % 2 == 0 { 1.0 } else { -1.0 } * moment / fact;
        }
        let x = 0.5 * self.symmetric[i][i];
        let closed = (-x).exp();
        // Lagrange remainder of the exponential series
        let tail_bound = x.powi(terms as i32 + 1) / factorial(terms + 1);
        Ok(WeylSeries { partial_sum: partial, closed_form: closed, tail_bound })
    }

    /// `ω_F(e^{iA_i} e^{iA_j})` from the double moment series through total
    /// order `2N`, against `e^{-s(A_i+A_j, A_i+A_j)/2} e^{-(i/2) σ(i,j)}`.
    pub fn ccr_product_check(&self, i: usize, j: usize, terms: usize) -> Result<CcrCheck> {
        self.check_label(i)?;
        self.check_label(j)?;
        if terms > MAX_CCR_TERMS {
            return Err(Error::OrderTooLarge(2 * terms));
        }
        let mut series = Complex64::new(0.0, 0.0);
        for total in (0..=2 * terms).step_by(2) {
            for a in 0..=total {
                let b = total - a;
                let mut seq = vec![i; a];
                seq.extend(std::iter::repeat_n(j, b));
                let phase = Complex64::i().powu(total as u32);
                series += phase * self.wick_moment(&seq)? / (factorial(a) * factorial(b));
            }
        }
        let s = &self.symmetric;
        let s_sum = s[i][i] + s[j][j] + 2.0 * s[i][j];
        let closed = Complex64::from_polar((-0.5 * s_sum).exp(), -0.5 * self.symplectic[i][j]);
        let c = [self.covariance[i][i], self.covariance[j][j], self.covariance[i][j], self.covariance[j][i]]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let tail_bound = exp_tail(2.0 * c, terms);
        let discrepancy = (series - closed).norm();
        let result = CcrCheck { series, closed_form: closed, discrepancy, tail_bound };
        if discrepancy > tail_bound * (1.0 + CHECK_TOL) + 1e-14 {
            return Err(Error::Consistency(format!(
                "product series differs from the Weyl relation by {discrepancy:.3e}, above the tail bound {tail_bound:.3e}"
            )));
        }
        Ok(result)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// `Σ_{k>N} x^k/k!`.
fn exp_tail(x: f64, n: usize) -> f64 {
    let mut term = x.powi(n as i32 + 1) / factorial(n + 1);
    let mut total = 0.0f64;
    let mut k = n + 1;
    while term > 1e-17 * total.max(f64::MIN_POSITIVE) && k < 400 {
        total += term;
        k += 1;
        term *= x / k as f64;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct WeylSeries {
    pub partial_sum: f64,
    pub closed_form: f64,
    pub tail_bound: f64,
}

impl WeylSeries {
    pub fn within_bound(&self) -> bool {
        (self.partial_sum - self.closed_form).abs() <= self.tail_bound * (1.0 + CHECK_TOL) + 1e-15
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct CcrCheck {
    #[schemars(with = "[f64; 2]")]
    pub series: Complex64,
    #[schemars(with = "[f64; 2]")]
    pub closed_form: Complex64,
    pub discrepancy: f64,
    pub tail_bound: f64,
}

/// Two observables with `⟨A(x) B(0)⟩ = F(x)` and `⟨B(0) A(x)⟩ = G(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservablePair {
    pub f: Spectrum,
    pub g: Spectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct CommutatorResult {
    /// `(F̂(0) - Ĝ(0)) ∫ |f̂|²`.
    #[schemars(with = "[f64; 2]")]
    pub value: Complex64,
    pub trivial: bool,
}

impl ObservablePair {
    fn check(&self) -> Result<()> {
        if self.f.dim != self.g.dim {
            return Err(Error::Config("pair spectra live in different dimensions".into()));
        }
        if !(self.f.regular_at_origin() && self.g.regular_at_origin()) {
            return Err(Error::Unsupported("commutator criterion needs integrable pair correlators".into()));
        }
        Ok(())
    }

    /// Limit of `⟨[A_R, B_R]⟩` at `α = n/2`; trivial below `ε_v`.
    pub fn commutator_criterion(&self, window: &WindowProfile, vanishing_tol: f64) -> Result<CommutatorResult> {
        self.check()?;
        let value = (self.f.eval(0.0) - self.g.eval(0.0)) * window.hat_l2_squared();
        Ok(CommutatorResult { value, trivial: value.norm() < vanishing_tol })
    }

    /// `⟨[A_R, B_R]⟩` over the grid, from the antisymmetrized 2-point function.
    pub fn commutator_sweep(&self, window: &WindowProfile, cfg: &ScalingConfig) -> Result<ScalingReport> {
        self.check()?;
        let diff = self.f.minus(&self.g);
        let state = TruncatedHierarchy::unchecked(diff.dim, vec![(2, OrderCorrelator::Radial(diff), DecayClass::L1)])?;
        let n = window.dim() as f64;
        let mut report = exponent_sweep(&state, window, cfg, 2, n / 2.0, &SlotData::default())?;
        report.label = "commutator".into();
        Ok(report)
    }
}

/// Observables `A_1, …, A_m` with cross spectra `Ŵ_{ij}` of `⟨A_i(x) A_j(0)⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    pub labels: Vec<String>,
    pub cross: Vec<Vec<Spectrum>>,
    /// Scaling exponent; `n/2` when absent. Other values need square-integrable
    /// pair correlators and must lie in the corresponding window.
    pub alpha: Option<f64>,
}

/// Covariance of the limit state from the largest-`R` pair correlators.
pub fn build_limit_state(set: &ObservableSet, window: &WindowProfile, cfg: &ScalingConfig) -> Result<LimitState> {
    let m = set.labels.len();
    if set.cross.len() != m || set.cross.iter().any(|r| r.len() != m) {
        return Err(Error::Config(format!("cross spectra must form a {m}x{m} table")));
    }
    let n = window.dim();
    let alpha = set.alpha.unwrap_or(n as f64 / 2.0);
    let canonical = (alpha - n as f64 / 2.0).abs() < 1e-12;
    if !canonical && !l2_alpha_window(n).contains(alpha) {
        return Err(Error::Config(format!("alpha = {alpha} is neither n/2 nor in the square-integrable window")));
    }
    let mut covariance = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for i in 0..m {
        for j in 0..m {
            let spectrum = &set.cross[i][j];
            if spectrum.dim != n {
                return Err(Error::Config(format!("spectrum ({i}, {j}) has dimension {}", spectrum.dim)));
            }
            if canonical && !spectrum.regular_at_origin() {
                return Err(Error::Unsupported(format!(
                    "pair ({}, {}) is not integrable; choose alpha in the square-integrable window",
                    set.labels[i], set.labels[j]
                )));
            }
            let state = TruncatedHierarchy::unchecked(n, vec![(2, OrderCorrelator::Radial(spectrum.clone()), DecayClass::L1)])?;
            let report = exponent_sweep(&state, window, cfg, 2, alpha, &SlotData::default())?;
            // the R^{-2} extrapolation only applies to integrable correlators
            covariance[i][j] = match report.richardson {
                Some(v) if canonical => v,
                _ => report.limit_estimate,
            };
        }
    }
    LimitState::new(set.labels.clone(), covariance)
}
