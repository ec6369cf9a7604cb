//! Radial smoothing windows `f_R(x) = f(|x|/R)` and their Fourier transforms.
//!
//! Transforms use `f̂(k) = (2π)^{-n/2} ∫ e^{-ik·x} f(x) dx`, so that
//! `f̂_R(k) = R^n f̂(Rk)` with constant one. The transform of a radial
//! profile equals the one-dimensional cosine transform of its projection
//! onto a line, which is even and as smooth as the profile; the trapezoid
//! rule on that projection therefore converges spectrally.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::exec::{map_indices, Parallelism};
use crate::quadrature::{gauss_legendre, Rule};
use crate::special::{binomial, sphere_area};
use crate::{Error, Result};

/// Environment variable naming the directory for cached Fourier tables.
pub const CACHE_DIR_ENV: &str = "FLUCTLAB_CACHE_DIR";
/// Bumped whenever the table layout or the sampling changes.
pub const CACHE_VERSION: u32 = 1;
/// Smallest accepted number of radial samples.
pub const MIN_RESOLUTION: usize = 1 << 10;
pub const DEFAULT_RESOLUTION: usize = 1 << 11;

/// Radial extent of the sampling grid; profiles vanish beyond 2.
const SAMPLE_EXTENT: f64 = 2.5;
const KAPPA_MAX: f64 = 320.0;
const KAPPA_STEP: f64 = 1.0 / 32.0;
/// Derivative orders stored per node; interpolation of order `j` uses `j..=j+2`.
const STORED_ORDERS: usize = 7;
pub const MAX_DERIVATIVE: usize = STORED_ORDERS - 3;

/// Fourier sign and normalization in force for windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct FourierConvention {
    /// Sign of the exponent in the forward transform of a window.
    pub window_sign: i8,
    /// Sign of the exponent in the (unnormalized) transform of a correlator.
    pub correlator_sign: i8,
    /// Power of `2π` multiplying the window transform, per dimension.
    pub window_norm_exponent: f64,
    /// Constant in `f̂_R(k) = c R^n f̂(Rk)`.
    pub scaling_constant: f64,
}

pub const FOURIER_CONVENTION: FourierConvention = FourierConvention {
    window_sign: -1,
    correlator_sign: 1,
    window_norm_exponent: -0.5,
    scaling_constant: 1.0,
};

/// Profile family. Every family equals one on `[0, 1]` and vanishes on `[2, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WindowKind {
    /// Unit step at 1.5 convolved with a unit-mass bump of width one; C^∞.
    MollifiedStep,
    /// Polynomial smoothstep of the given order on `[1, 2]`; C^order.
    Smoothstep { order: u32 },
}

impl Default for WindowKind {
    fn default() -> Self {
        WindowKind::MollifiedStep
    }
}

impl WindowKind {
    fn tag(&self) -> String {
        match self {
            WindowKind::MollifiedStep => "mollified".to_string(),
            WindowKind::Smoothstep { order } => format!("smoothstep{order}"),
        }
    }
}

/// Cumulative distribution of the normalized bump `exp(-1/(1-4u²))` on `[-1/2, 1/2]`.
#[derive(Debug, Clone)]
struct BumpCdf {
    cells: usize,
    cumulative: Vec<f64>,
    mass: f64,
    gl: Vec<(f64, f64)>,
}

fn bump(u: f64) -> f64 {
    let d = 1.0 - 4.0 * u * u;
    if d <= 0.0 {
        0.0
    } else {
        (-1.0 / d).exp()
    }
}

impl BumpCdf {
    fn new() -> Self {
        let cells = 256;
        let gl = gauss_legendre(20);
        let h = 1.0 / cells as f64;
        let mut cumulative = Vec::with_capacity(cells + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for c in 0..cells {
            let a = -0.5 + c as f64 * h;
            acc += gl_segment(&gl, a, a + h);
            cumulative.push(acc);
        }
        BumpCdf { cells, mass: acc, cumulative, gl }
    }

    fn cdf(&self, u: f64) -> f64 {
        if u <= -0.5 {
            return 0.0;
        }
        if u >= 0.5 {
            return 1.0;
        }
        let h = 1.0 / self.cells as f64;
        let c = (((u + 0.5) / h) as usize).min(self.cells - 1);
        let a = -0.5 + c as f64 * h;
        (self.cumulative[c] + gl_segment(&self.gl, a, u)) / self.mass
    }
}

fn gl_segment(gl: &[(f64, f64)], a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gl.iter().map(|&(x, w)| w * bump(mid + half * x)).sum::<f64>() * half
}

/// Smoothstep polynomial `S_k` rising from 0 to 1 on `[0, 1]`, with `k`
/// vanishing derivatives at both ends.
pub fn smoothstep(k: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let k64 = k as u64;
    let mut sum = 0.0;
    for j in 0..=k64 {
        sum += binomial(k64 + j, j) * binomial(2 * k64 + 1, k64 - j) * (-x).powi(j as i32);
    }
    x.powi(k as i32 + 1) * sum
}

/// Tabulated Fourier transform with derivatives, sampled on a uniform κ grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct FourierTable {
    version: u32,
    kind: WindowKind,
    dim: usize,
    resolution: usize,
    kappa_step: f64,
    kappa_max: f64,
    /// `values[i][m] = f̂^{(m)}(i · kappa_step)`.
    values: Vec<[f64; STORED_ORDERS]>,
}

/// The radial profile `f(s)` of a window family, without any transform data.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    kind: WindowKind,
    cdf: Option<BumpCdf>,
}

impl PartialEq for RadialProfile {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl RadialProfile {
    pub fn new(kind: WindowKind) -> Self {
        RadialProfile { kind, cdf: matches!(kind, WindowKind::MollifiedStep).then(BumpCdf::new) }
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    /// `f(s)`: one on `[0, 1]`, zero on `[2, ∞)`.
    pub fn value(&self, s: f64) -> f64 {
        let s = s.abs();
        if s <= 1.0 {
            return 1.0;
        }
        if s >= 2.0 {
            return 0.0;
        }
        match self.kind {
            WindowKind::MollifiedStep => 1.0 - self.cdf.as_ref().expect("bump cdf").cdf(s - 1.5),
            WindowKind::Smoothstep { order } => 1.0 - smoothstep(order, s - 1.0),
        }
    }
}

/// A window profile with its cached transform.
#[derive(Debug, Clone)]
pub struct WindowProfile {
    kind: WindowKind,
    dim: usize,
    resolution: usize,
    profile: RadialProfile,
    table: FourierTable,
    /// `tail[i] = max_{j >= i} |f̂(κ_j)|`.
    tail: Vec<f64>,
}

/// A transform value with a flag for queries beyond the tabulated range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierValue {
    pub value: f64,
    pub extrapolated: bool,
}

static MEMO: Lazy<Mutex<HashMap<(WindowKind, usize, usize), Arc<WindowProfile>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

impl WindowProfile {
    /// Builds the profile and its transform table from scratch.
    pub fn new(kind: WindowKind, dim: usize, resolution: usize) -> Result<Self> {
        Self::validate(kind, dim, resolution)?;
        let mut profile = WindowProfile {
            kind,
            dim,
            resolution,
            profile: RadialProfile::new(kind),
            table: FourierTable {
                version: CACHE_VERSION,
                kind,
                dim,
                resolution,
                kappa_step: KAPPA_STEP,
                kappa_max: KAPPA_MAX,
                values: Vec::new(),
            },
            tail: Vec::new(),
        };
        profile.table.values = profile.build_table();
        profile.finish();
        Ok(profile)
    }

    fn validate(kind: WindowKind, dim: usize, resolution: usize) -> Result<()> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Config(format!("window dimension must be 1, 2 or 3 (got {dim})")));
        }
        if resolution < MIN_RESOLUTION {
            return Err(Error::Config(format!(
                "window resolution {resolution} below the minimum {MIN_RESOLUTION}"
            )));
        }
        if let WindowKind::Smoothstep { order } = kind {
            if order == 0 || order > 8 {
                return Err(Error::Config(format!("smoothstep order must be in 1..=8 (got {order})")));
            }
        }
        Ok(())
    }

    /// Process-wide shared instance, also persisted under `$FLUCTLAB_CACHE_DIR`
    /// when that variable is set.
    pub fn shared(kind: WindowKind, dim: usize, resolution: usize) -> Result<Arc<Self>> {
        Self::validate(kind, dim, resolution)?;
        let key = (kind, dim, resolution);
        if let Some(p) = MEMO.lock().expect("window memo").get(&key) {
            return Ok(p.clone());
        }
        let dir = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from);
        let profile = match &dir {
            Some(dir) => Self::load_or_build(kind, dim, resolution, dir)?,
            None => Self::new(kind, dim, resolution)?,
        };
        let profile = Arc::new(profile);
        MEMO.lock().expect("window memo").insert(key, profile.clone());
        Ok(profile)
    }

    /// Loads a cached table from `dir` if present and current, else builds
    /// and writes it. Failure to write the cache is not an error.
    pub fn load_or_build(kind: WindowKind, dim: usize, resolution: usize, dir: &Path) -> Result<Self> {
        Self::validate(kind, dim, resolution)?;
        let path = dir.join(format!("window-{}-n{}-r{}.json", kind.tag(), dim, resolution));
        if let Ok(text) = std::fs::read_to_string(&path) {
            match serde_json::from_str::<FourierTable>(&text) {
                Ok(table)
                    if table.version == CACHE_VERSION
                        && table.kind == kind
                        && table.dim == dim
                        && table.resolution == resolution =>
                {
                    let mut p = WindowProfile {
                        kind,
                        dim,
                        resolution,
                        profile: RadialProfile::new(kind),
                        table,
                        tail: Vec::new(),
                    };
                    p.finish();
                    return Ok(p);
                }
                _ => log::warn!("ignoring stale window cache {}", path.display()),
            }
        }
        let p = Self::new(kind, dim, resolution)?;
        let written = std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(&path, serde_json::to_string(&p.table).expect("table json")));
        if let Err(e) = written {
            log::warn!("could not write window cache {}: {e}", path.display());
        }
        Ok(p)
    }

    fn finish(&mut self) {
        let mut tail = vec![0.0; self.table.values.len()];
        let mut running: f64 = 0.0;
        for i in (0..tail.len()).rev() {
            running = running.max(self.table.values[i][0].abs());
            tail[i] = running;
        }
        self.tail = tail;
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn kappa_max(&self) -> f64 {
        self.table.kappa_max
    }

    /// Radial profile `f(s)`.
    pub fn value(&self, s: f64) -> f64 {
        self.profile.value(s)
    }

    pub fn radial_profile(&self) -> &RadialProfile {
        &self.profile
    }

    /// `f_R(x) = f(|x|/R)` for a point given by its norm.
    pub fn scaled_value(&self, r: f64, norm: f64) -> f64 {
        self.value(norm / r)
    }

    /// Projection of the profile onto a line:
    /// `P(t) = ∫_{R^{n-1}} f(√(t² + |u|²)) du`.
    pub fn projection(&self, t: f64) -> f64 {
        let t = t.abs();
        if self.dim == 1 {
            return self.value(t);
        }
        if t >= 2.0 {
            return 0.0;
        }
        let weight = (self.dim - 2) as i32;
        let area = sphere_area(self.dim - 1);
        let u1 = (1.0 - t * t).max(0.0).sqrt();
        let u2 = (4.0 - t * t).sqrt();
        let flat = u1.powi(weight + 1) / (weight + 1) as f64;
        let rule = Rule::composite(u1, u2, 8, 20);
        let ramp = rule.integrate(|u| self.value((t * t + u * u).sqrt()) * u.powi(weight));
        area * (flat + ramp)
    }

    fn build_table(&self) -> Vec<[f64; STORED_ORDERS]> {
        let dt = SAMPLE_EXTENT / self.resolution as f64;
        // samples t_j = j dt; the profile vanishes beyond 2, so stop there.
        let last = ((2.0 / dt).ceil() as usize).min(self.resolution);
        let mut weighted = vec![[0.0; STORED_ORDERS]; last + 1];
        let mut ts = vec![0.0; last + 1];
        for j in 0..=last {
            let t = j as f64 * dt;
            let w = if j == 0 { 0.5 * dt } else { dt };
            let p = w * self.projection(t);
            let mut tm = 1.0;
            for m in 0..STORED_ORDERS {
                weighted[j][m] = p * tm;
                tm *= t;
            }
            ts[j] = t;
        }
        let norm = 2.0 * (2.0 * PI).powf(-(self.dim as f64) / 2.0);
        let count = (KAPPA_MAX / KAPPA_STEP).round() as usize + 1;
        map_indices(Parallelism::Parallel, count, |i| {
            let kappa = i as f64 * KAPPA_STEP;
            let mut c = [0.0; STORED_ORDERS];
            let mut s = [0.0; STORED_ORDERS];
            for j in 0..=last {
                let (sn, cs) = (kappa * ts[j]).sin_cos();
                for m in 0..STORED_ORDERS {
                    c[m] += weighted[j][m] * cs;
                    s[m] += weighted[j][m] * sn;
                }
            }
            // d^m/dκ^m cos(κt) = t^m cos(κt + mπ/2): cos, -sin, -cos, sin, …
            let mut out = [0.0; STORED_ORDERS];
            for m in 0..STORED_ORDERS {
                out[m] = norm
                    * match m % 4 {
                        0 => c[m],
                        1 => -s[m],
                        2 => -c[m],
                        _ => s[m],
                    };
            }
            out
        })
    }

    /// `f̂^{(j)}(κ)` along a ray, for `j <= MAX_DERIVATIVE`, with a flag set
    /// when `|κ|` lies beyond the table (the value is then zero).
    pub fn radial_derivative_checked(&self, j: usize, kappa: f64) -> FourierValue {
        assert!(j <= MAX_DERIVATIVE, "derivative order {j} not tabulated");
        let sign = if kappa < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 };
        let k = kappa.abs();
        if k > self.table.kappa_max {
            return FourierValue { value: 0.0, extrapolated: true };
        }
        let h = self.table.kappa_step;
        let last = self.table.values.len() - 1;
        let i = ((k / h) as usize).min(last - 1);
        let u = k / h - i as f64;
        let a = &self.table.values[i];
        let b = &self.table.values[i + 1];
        let (u2, u3) = (u * u, u * u * u);
        let (u4, u5) = (u3 * u, u3 * u2);
        let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
        let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
        let h2 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
        let g0 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
        let g1 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
        let g2 = 0.5 * (u3 - 2.0 * u4 + u5);
        let value = a[j] * h0
            + h * a[j + 1] * h1
            + h * h * a[j + 2] * h2
            + b[j] * g0
            + h * b[j + 1] * g1
            + h * h * b[j + 2] * g2;
        FourierValue { value: sign * value, extrapolated: false }
    }

    pub fn radial_derivative(&self, j: usize, kappa: f64) -> f64 {
        self.radial_derivative_checked(j, kappa).value
    }

    /// `f̂(κ)` for `|κ| = kappa`; zero beyond the table.
    #[inline]
    pub fn fourier(&self, kappa: f64) -> f64 {
        self.radial_derivative_checked(0, kappa).value
    }

    pub fn fourier_checked(&self, kappa: f64) -> FourierValue {
        self.radial_derivative_checked(0, kappa)
    }

    /// Strict variant: queries beyond the table are an accuracy error.
    pub fn fourier_strict(&self, kappa: f64) -> Result<f64> {
        let v = self.fourier_checked(kappa);
        if v.extrapolated {
            return Err(Error::accuracy(
                format!("window transform queried at |κ| = {kappa} beyond the table"),
                self.tail_sup(self.kappa_max()),
            ));
        }
        Ok(v.value)
    }

    /// `f̂_R(k) = R^n f̂(R|k|)`.
    pub fn scaled_fourier(&self, r: f64, k_norm: f64) -> f64 {
        r.powi(self.dim as i32) * self.fourier(r * k_norm)
    }

    /// `sup_{|κ| >= p} |f̂(κ)|` over the table nodes.
    pub fn tail_sup(&self, p: f64) -> f64 {
        let i = (p / self.table.kappa_step).ceil() as usize;
        self.tail.get(i).copied().unwrap_or(0.0)
    }

    /// Relative truncation certificate for an order-`l` correlator on the box
    /// `[-p, p]^{l-1}`: outside the box at least two window arguments exceed
    /// `p/(l-1)`, so the neglected mass is bounded by the square of the
    /// relative tail there.
    pub fn tail_certificate(&self, p: f64, l: usize) -> f64 {
        let edge = p / (l.max(2) - 1) as f64;
        let rel = self.tail_sup(edge) / self.fourier(0.0).abs();
        rel * rel
    }

    /// `∫ |f̂(κ)|² d^nκ` from the table.
    pub fn hat_l2_squared(&self) -> f64 {
        let rule = Rule::radial_graded(self.kappa_max(), 320, 16, 0);
        let n = self.dim as i32;
        sphere_area(self.dim) * rule.integrate(|k| self.fourier(k).powi(2) * k.powi(n - 1))
    }

    /// `∫ |f(x)|² d^nx` in position space.
    pub fn l2_squared(&self) -> f64 {
        let n = self.dim as i32;
        let inner = 1.0 / n as f64;
        let outer = Rule::composite(1.0, 2.0, 16, 20).integrate(|s| self.value(s).powi(2) * s.powi(n - 1));
        sphere_area(self.dim) * (inner + outer)
    }

    /// `∫ f(x) d^nx`.
    pub fn volume(&self) -> f64 {
        let n = self.dim as i32;
        let inner = 1.0 / n as f64;
        let outer = Rule::composite(1.0, 2.0, 16, 20).integrate(|s| self.value(s) * s.powi(n - 1));
        sphere_area(self.dim) * (inner + outer)
    }
}

/// Sharp-cutoff windows, used only by position-space oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SharpWindow {
    /// Indicator of the ball of radius `R`.
    Indicator,
    /// One on the ball of radius `R`, linear to zero over a fixed width.
    FixedEdge { width: f64 },
}

impl SharpWindow {
    pub fn value(&self, r: f64, norm: f64) -> f64 {
        match *self {
            SharpWindow::Indicator => {
                if norm <= r {
                    1.0
                } else {
                    0.0
                }
            }
            SharpWindow::FixedEdge { width } => (1.0 - (norm - r) / width).clamp(0.0, 1.0),
        }
    }

    /// Outer support radius at scale `r`.
    pub fn support(&self, r: f64) -> f64 {
        match *self {
            SharpWindow::Indicator => r,
            SharpWindow::FixedEdge { width } => r + width,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_endpoints() {
        for k in 1..=5 {
            assert!(smoothstep(k, 0.0).abs() < 1e-15);
            assert!((smoothstep(k, 1.0) - 1.0).abs() < 1e-15);
            assert!((smoothstep(k, 0.5) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn bump_cdf_is_symmetric() {
        let cdf = BumpCdf::new();
        for &u in &[-0.4, -0.1, 0.0, 0.23] {
            assert!((cdf.cdf(u) + cdf.cdf(-u) - 1.0).abs() < 1e-14);
        }
    }
}
