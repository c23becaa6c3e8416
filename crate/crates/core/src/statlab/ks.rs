//! Kolmogorov–Smirnov tests with asymptotic p-values.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Kolmogorov survival function `Q(λ) = P(K > λ)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda.is_nan() {
        return f64::NAN;
    }
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form, converges fast for small λ.
        let c = PI * PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=20).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum();
        (1.0 - (2.0 * PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let mut s = 0.0;
        for k in 1..=100 {
            let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
            s += if k % 2 == 1 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// p-value with Stephens' small-sample correction.
fn p_value(d: f64, effective_n: f64) -> f64 {
    let en = effective_n.sqrt();
    kolmogorov_q((en + 0.12 + 0.11 / en) * d)
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return domain("KS test input contains NaN");
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    Ok(v)
}

/// Two-sample statistic `sup |F_a - F_b|` and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return domain("KS test needs two nonempty samples");
    }
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] == x {
            i += 1;
        }
        while j < m && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64) / (n + m) as f64;
    Ok((d, p_value(d, ne)))
}

/// One-sample statistic against a continuous CDF and its p-value.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    if xs.is_empty() {
        return domain("KS test needs a nonempty sample");
    }
    let v = sorted(xs)?;
    let n = v.len() as f64;
    let d = v.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    });
    Ok((d, p_value(d, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randkit::RngState;

    #[test]
    fn q_function_values() {
        assert_eq!(kolmogorov_q(0.0), 1.0);
        // standard critical values
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_q(1.6276) - 0.01).abs() < 1e-3);
        // both branches agree at the switch point
        let lo = {
            let c = PI * PI / (8.0 * 1.18 * 1.18);
            1.0 - (2.0 * PI).sqrt() / 1.18 * (1..=20).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum::<f64>()
        };
        assert!((lo - kolmogorov_q(1.18)).abs() < 1e-12);
    }

    #[test]
    fn identical_samples() {
        let a = [3.0, 1.0, 2.0, 2.0];
        let (d, p) = ks_two_sample(&a, &a).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn empty_input_errors() {
        assert!(ks_two_sample(&[], &[1.0]).is_err());
        assert!(ks_one_sample(&[], |x| x).is_err());
    }

    #[test]
    fn power_against_shift() {
        let mut r = RngState::from_seed(2);
        let a: Vec<f64> = (0..10_000).map(|_| r.sample_normal()).collect();
        let b: Vec<f64> = (0..10_000).map(|_| 1.0 + r.sample_normal()).collect();
        let (_, p) = ks_two_sample(&a, &b).unwrap();
        assert!(p < 1e-6);
    }

    #[test]
    fn uniform_one_sample() {
        let mut r = RngState::from_seed(4);
        let xs: Vec<f64> = (0..20_000).map(|_| r.next_uniform()).collect();
        let (_, p) = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(p > 0.001);
        let (_, p_bad) = ks_one_sample(&xs, |x| (x * x).clamp(0.0, 1.0)).unwrap();
        assert!(p_bad < 1e-10);
    }
}
