use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Significance level of the Kolmogorov–Smirnov checks.
pub const KS_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub samples: usize,
    pub pass: bool,
}

/// `Q(λ) = 2 Σ_{j≥1} (−1)^{j−1} e^{−2j²λ²}`, the Kolmogorov tail.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value with the usual small-sample correction to `λ`.
fn p_value(d: f64, effective_n: f64) -> f64 {
    let root = effective_n.sqrt();
    kolmogorov_q((root + 0.12 + 0.11 / root) * d)
}

/// One-sample test of `samples` against a continuous CDF.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("KS test needs samples".into()));
    }
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let m = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let f = cdf(v);
        d = d
            .max(((i + 1) as f64 / m - f).abs())
            .max((f - i as f64 / m).abs());
    }
    let p = p_value(d, m);
    Ok(KsResult {
        statistic: d,
        p_value: p,
        samples: x.len(),
        pass: p >= KS_ALPHA,
    })
}

/// Two-sample test that `a` and `b` share a distribution.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("KS test needs samples".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let p = p_value(d, na * nb / (na + nb));
    Ok(KsResult {
        statistic: d,
        p_value: p,
        samples: a.len() + b.len(),
        pass: p >= KS_ALPHA,
    })
}

/// `Pr{|⟨φ|ψ⟩|² ≤ β} = 1 − (1−β)^{2^n−1}` for Haar `ψ` and any fixed `φ`.
pub fn overlap_cdf(n: usize, beta: f64) -> f64 {
    let b = beta.clamp(0.0, 1.0);
    1.0 - (1.0 - b).powf(2f64.powi(n as i32) - 1.0)
}

/// `exp(0.54·n² − 2^{n−γ})`, the large-`n` tail estimate for
/// `Pr{dmin ≤ γ}`.
pub fn dmin_tail_curve(n: usize, gamma: f64) -> f64 {
    let nf = n as f64;
    (0.54 * nf * nf - 2f64.powf(nf - gamma)).exp()
}

/// `|STAB_n|·(1 − 2^{−γ})^{2^n−1}`, the union bound the curve above
/// approximates. `stab_count` is the number of pure stabilizer states.
pub fn dmin_union_bound(n: usize, stab_count: f64, gamma: f64) -> f64 {
    stab_count * (1.0 - 2f64.powf(-gamma)).powf(2f64.powi(n as i32) - 1.0)
}
