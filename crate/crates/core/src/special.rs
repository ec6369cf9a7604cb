//! Special functions not covered by `statrs`.

use std::f64::consts::PI;

pub use statrs::function::gamma::gamma;

/// Modified Bessel function of the second kind `K_nu(x)` for real order and
/// `x > 0`, from the trapezoid rule on `∫_0^∞ exp(-x cosh t) cosh(nu t) dt`.
/// The integrand is analytic in a strip, so the rule converges geometrically.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k needs x > 0");
    let nu = nu.abs();
    let h = (0.2f64).min(0.6 / x.sqrt());
    // exp(-x (cosh t - 1)) < 1e-300 beyond t_max.
    let t_max = (1.0 + 700.0 / x).acosh();
    let t_max = t_max.max(4.0 * h);
    let steps = (t_max / h).ceil() as usize;
    let mut sum = 0.5;
    for j in 1..=steps {
        let t = j as f64 * h;
        sum += (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
    }
    sum * h * (-x).exp()
}

/// Fourier transform `∫ (1+|y|²)^{-beta/2} e^{i k·y} d^d y` as a function of
/// `|k| > 0`. Finite at the origin only for `beta > d`, see [`matern_hat_origin`].
pub fn matern_hat(beta: f64, d: usize, k: f64) -> f64 {
    let df = d as f64;
    let nu = (df - beta) / 2.0;
    (2.0 * PI).powf(df / 2.0) * 2f64.powf(1.0 - beta / 2.0) / gamma(beta / 2.0)
        * k.powf((beta - df) / 2.0)
        * bessel_k(nu, k)
}

/// Value of [`matern_hat`] at `k = 0` when `beta > d`.
pub fn matern_hat_origin(beta: f64, d: usize) -> f64 {
    let df = d as f64;
    PI.powf(df / 2.0) * gamma((beta - df) / 2.0) / gamma(beta / 2.0)
}

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * PI.powf(nf / 2.0) / gamma(nf / 2.0)
}

/// Binomial coefficient as a float.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_orders_match_closed_forms() {
        for &x in &[1e-6, 1e-3, 0.1, 1.0, 7.5, 40.0, 300.0] {
            let base = (PI / (2.0 * x)).sqrt() * (-x).exp();
            let k12 = bessel_k(0.5, x);
            let k32 = bessel_k(1.5, x);
            assert!((k12 / base - 1.0).abs() < 1e-13, "x={x} {k12} {base}");
            assert!((k32 / (base * (1.0 + 1.0 / x)) - 1.0).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn matern_in_one_dimension_with_beta_two_is_exponential() {
        for &k in &[0.01, 0.5, 3.0] {
            assert!((matern_hat(2.0, 1, k) - PI * (-k).exp()).abs() < 1e-12);
        }
        assert!((matern_hat_origin(2.0, 1) - PI).abs() < 1e-12);
        assert!((matern_hat(4.0, 3, 1e-7) - matern_hat_origin(4.0, 3)).abs() < 1e-6);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    }
}
