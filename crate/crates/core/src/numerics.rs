//! Stick-breaking, Beta-function ratios and log-domain sampling helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{NsbmError, Result};
use crate::netcore::SymMatrix;

/// Generator used by every chain and simulator.
pub type ChainRng = ChaCha8Rng;

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stick-breaking map: `w_k = v_k ∏_{l<k} (1 − v_l)`.
///
/// When the final stick is 1 the last weight is set to the complement of the
/// sequential sum of the others, so the weights sum to exactly 1.0.
pub fn stick_break(sticks: &[f64]) -> Result<Vec<f64>> {
    check_sticks(sticks)?;
    let mut remaining = 1.0;
    let mut weights: Vec<f64> = sticks
        .iter()
        .map(|&v| {
            let w = v * remaining;
            remaining *= 1.0 - v;
            w
        })
        .collect();
    if let Some((last, head)) = weights.split_last_mut() {
        if sticks[sticks.len() - 1] == 1.0 {
            // Once the remainder is below an ulp the rounded head can exceed 1;
            // take the excess from the largest weight so the last stays >= 0.
            let mut total: f64 = head.iter().sum();
            while total > 1.0 {
                let big = head.iter_mut().max_by(|a, b| a.total_cmp(b)).expect("total > 1 implies a head");
                *big -= total - 1.0;
                total = head.iter().sum();
            }
            *last = 1.0 - total;
        }
    }
    Ok(weights)
}

/// Log of the stick-breaking weights, accumulated as `ln v_k + Σ_{l<k} ln(1 − v_l)`
/// so long sticks do not underflow. Zero weights map to `-inf`.
pub fn log_stick_break(sticks: &[f64]) -> Result<Vec<f64>> {
    check_sticks(sticks)?;
    let mut log_remaining = 0.0;
    Ok(sticks
        .iter()
        .map(|&v| {
            let lw = v.ln() + log_remaining;
            log_remaining += (-v).ln_1p();
            lw
        })
        .collect())
}

fn check_sticks(sticks: &[f64]) -> Result<()> {
    match sticks.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        Some(v) => Err(NsbmError::Domain(format!("stick proportion {v} outside [0, 1]"))),
        None => Ok(()),
    }
}

/// `ln x^{(d)} = Σ_{i<d} ln(x + i)`; zero for `d = 0`.
pub fn log_rising_factorial(x: f64, d: u64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(NsbmError::Domain(format!("rising factorial base {x} must be positive")));
    }
    Ok(log_rising(x, d))
}

// Longer products switch to a log-gamma difference, which is accurate once
// the result is large and costs O(1) instead of O(d).
const PRODUCT_LIMIT: u64 = 64;

// Multiplies terms in blocks and takes one logarithm per block; the partial
// product is flushed before it can leave the normal range.
#[inline]
fn log_rising(x: f64, d: u64) -> f64 {
    if d > PRODUCT_LIMIT {
        return libm::lgamma(x + d as f64) - libm::lgamma(x);
    }
    let mut total = 0.0;
    let mut prod = 1.0f64;
    for i in 0..d {
        prod *= x + i as f64;
        if !(1e-250..=1e250).contains(&prod) {
            total += prod.ln();
            prod = 1.0;
        }
    }
    total + prod.ln()
}

/// `ln Γ(a + d) / Γ(a)` for any integer `d` with `a + d > 0`.
#[inline]
fn log_gamma_ratio(a: f64, d: i64) -> f64 {
    if d >= 0 {
        log_rising(a, d as u64)
    } else {
        -log_rising(a + d as f64, d.unsigned_abs())
    }
}

/// `ln [B(α + d, β + d̄) / B(α, β)]` through rising factorials.
pub fn log_beta_ratio(alpha: f64, beta: f64, d: i64, d_bar: i64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(NsbmError::Domain(format!(
            "Beta shapes ({alpha}, {beta}) must be positive"
        )));
    }
    if !(alpha + d as f64 > 0.0 && beta + d_bar as f64 > 0.0) {
        return Err(NsbmError::Domain(format!(
            "shifted Beta shapes ({}, {}) must be positive",
            alpha + d as f64,
            beta + d_bar as f64
        )));
    }
    Ok(log_beta_ratio_unchecked(alpha, beta, d, d_bar))
}

/// [`log_beta_ratio`] without argument validation, for sampler inner loops.
#[inline]
pub fn log_beta_ratio_unchecked(alpha: f64, beta: f64, d: i64, d_bar: i64) -> f64 {
    if d == 0 && d_bar == 0 {
        return 0.0;
    }
    log_gamma_ratio(alpha, d) + log_gamma_ratio(beta, d_bar) - log_gamma_ratio(alpha + beta, d + d_bar)
}

/// `ln B(a, b)`.
pub fn log_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Log density of Beta(a, b) at `x`.
pub fn log_beta_pdf(x: f64, a: f64, b: f64) -> f64 {
    let mut out = -log_beta(a, b);
    if a != 1.0 {
        out += (a - 1.0) * x.ln();
    }
    if b != 1.0 {
        out += (b - 1.0) * (-x).ln_1p();
    }
    out
}

/// Sum of `logF[x][y]` over the upper-triangle entries lying in rows or
/// columns `r` and `r2` of a symmetric matrix.
pub fn sym_prod_logs(log_f: &SymMatrix<f64>, r: usize, r2: usize) -> f64 {
    sym_prod_logs_with(log_f.dim(), r, r2, |x, y| log_f.get(x, y))
}

/// [`sym_prod_logs`] over a symmetric function evaluated lazily. Each
/// touched entry is visited exactly once: all of row `r`, then row `r2`
/// without the shared entry `(r2, r)`.
#[inline]
pub fn sym_prod_logs_with<F>(dim: usize, r: usize, r2: usize, mut f: F) -> f64
where
    F: FnMut(usize, usize) -> f64,
{
    let mut total = 0.0;
    for y in 0..dim {
        total += f(r, y);
    }
    if r2 != r {
        for y in (0..dim).filter(|&y| y != r) {
            total += f(r2, y);
        }
    }
    total
}

/// `ln Σ exp(x_i)` with max-shift; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|&v| (v - max).exp()).sum::<f64>().ln()
}

/// Normalizes log weights into probabilities.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(logits);
    logits.iter().map(|&l| (l - lse).exp()).collect()
}

/// Draws index `k` with probability proportional to `exp(logw[k])`.
pub fn sample_categorical_logits<R: Rng + ?Sized>(logw: &[f64], rng: &mut R) -> Result<usize> {
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return Err(NsbmError::Domain("no finite log weight to sample from".into()));
    }
    let total: f64 = logw.iter().map(|&l| (l - max).exp()).sum();
    let mut target = rng.random::<f64>() * total;
    let mut last = 0;
    for (k, &l) in logw.iter().enumerate() {
        let p = (l - max).exp();
        if p > 0.0 {
            if target < p {
                return Ok(k);
            }
            target -= p;
            last = k;
        }
    }
    // Rounding left a sliver past the final positive weight.
    Ok(last)
}

pub fn sample_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    let dist = Beta::new(a, b)
        .map_err(|e| NsbmError::Domain(format!("Beta({a}, {b}): {e}")))?;
    Ok(dist.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    macro_rules! assert_close {
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!((a - b).abs() <= $tol, "{a} vs {b}");
        }};
    }

    #[test]
    fn stick_break_examples() {
        assert_eq!(stick_break(&[1.0, 0.7]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(stick_break(&[0.5, 0.5, 0.5]).unwrap(), vec![0.5, 0.25, 0.125]);
        let w = stick_break(&[0.2, 0.3, 1.0]).unwrap();
        assert_close!(w[0], 0.2, 1e-15);
        assert_close!(w[1], 0.24, 1e-15);
        assert_close!(w[2], 0.56, 1e-15);
        assert_close!(w.iter().sum::<f64>(), 1.0, 1e-15);
        assert!(stick_break(&[0.5, 1.5]).is_err());
        assert!(stick_break(&[-0.1]).is_err());
    }

    #[test]
    fn log_stick_break_matches_linear() {
        let v = [0.3, 0.9, 0.0, 0.5, 1.0];
        let w = stick_break(&v).unwrap();
        let lw = log_stick_break(&v).unwrap();
        for (a, b) in w.iter().zip(&lw) {
            if *a == 0.0 {
                assert_eq!(*b, f64::NEG_INFINITY);
            } else {
                assert_close!(a.ln(), *b, 1e-14);
            }
        }
    }

    #[test]
    fn rising_factorial_examples() {
        assert_close!(log_rising_factorial(1.0, 3).unwrap(), 6f64.ln(), 1e-15);
        assert_eq!(log_rising_factorial(2.5, 0).unwrap(), 0.0);
        assert_close!(log_rising_factorial(0.5, 2).unwrap(), 0.75f64.ln(), 1e-15);
        assert!(log_rising_factorial(0.0, 2).is_err());
        assert!(log_rising_factorial(-1.0, 2).is_err());
    }

    #[test]
    fn beta_ratio_examples() {
        assert_close!(log_beta_ratio(1.0, 1.0, 1, 0).unwrap(), 0.5f64.ln(), 1e-15);
        assert_eq!(log_beta_ratio(2.3, 0.7, 0, 0).unwrap(), 0.0);
        assert!(log_beta_ratio(0.0, 1.0, 1, 1).is_err());
        assert!(log_beta_ratio(1.0, 1.0, -1, 0).is_err());
        // B(1,1)/B(3,2) = 12
        assert_close!(log_beta_ratio(3.0, 2.0, -2, -1).unwrap(), 12f64.ln(), 1e-14);
    }

    #[test]
    fn sym_prod_examples() {
        let zeros = SymMatrix::<f64>::zeros(4);
        assert_eq!(sym_prod_logs(&zeros, 1, 3), 0.0);
        let rows = vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 10.0, 20.0],
            vec![3.0, 20.0, 100.0],
        ];
        let m = SymMatrix::from_upper(&rows);
        assert_eq!(sym_prod_logs(&m, 1, 1), 2.0 + 10.0 + 20.0);
        // rows 0 and 2: (0,0) (0,1) (0,2) (1,2) (2,2)
        assert_eq!(sym_prod_logs(&m, 0, 2), 1.0 + 2.0 + 3.0 + 20.0 + 100.0);
    }

    #[test]
    fn log_sum_exp_handles_infinities() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 2]), f64::NEG_INFINITY);
        assert_close!(log_sum_exp(&[1000.0, 1000.0]), 1000.0 + 2f64.ln(), 1e-12);
    }

    #[test]
    fn categorical_examples() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..1000 {
            assert_eq!(sample_categorical_logits(&[0.0, f64::NEG_INFINITY], &mut rng).unwrap(), 0);
            assert_eq!(sample_categorical_logits(&[f64::NEG_INFINITY, 5.0], &mut rng).unwrap(), 1);
        }
        assert!(sample_categorical_logits(&[f64::NEG_INFINITY; 3], &mut rng).is_err());
        assert!(sample_categorical_logits(&[], &mut rng).is_err());

        let draws = 200_000;
        let mut hits = [0usize; 2];
        for _ in 0..draws {
            hits[sample_categorical_logits(&[-700.0, -700.0], &mut rng).unwrap()] += 1;
        }
        let f0 = hits[0] as f64 / draws as f64;
        assert!((f0 - 0.5).abs() < 4.0 * (0.25 / draws as f64).sqrt());

        let mut hits = [0usize; 2];
        for _ in 0..draws {
            hits[sample_categorical_logits(&[0.0, 3f64.ln()], &mut rng).unwrap()] += 1;
        }
        let f1 = hits[1] as f64 / draws as f64;
        assert!((f1 - 0.75).abs() < 4.0 * (0.75 * 0.25 / draws as f64).sqrt());
    }

    fn beta_moments(a: f64, b: f64, draws: usize) -> (f64, f64) {
        let mut rng = stream_rng(99, (a * 10.0 + b) as u64);
        let xs: Vec<f64> = (0..draws).map(|_| sample_beta(a, b, &mut rng).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        (mean, var)
    }

    #[test]
    fn beta_moment_checks() {
        let n = 100_000;
        for (a, b) in [(1.0, 1.0), (4.0, 2.0), (3.0, 2.0)] {
            let (mean, var) = beta_moments(a, b, n);
            let true_mean = a / (a + b);
            let true_var = a * b / ((a + b).powi(2) * (a + b + 1.0));
            assert!((mean - true_mean).abs() < 3.0 * (true_var / n as f64).sqrt(), "{a},{b}");
            assert!((var - true_var).abs() < 0.02 * true_var + 1e-4, "{a},{b}: {var}");
        }
        assert_close!(3.0 * 2.0 / (25.0 * 6.0), 0.04, 1e-15);
        let mut rng = stream_rng(0, 0);
        assert!(sample_beta(0.0, 1.0, &mut rng).is_err());
        assert!(sample_beta(1.0, -2.0, &mut rng).is_err());
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: Vec<u64> = (0..4).map(|_| stream_rng(5, 0).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut s0 = stream_rng(5, 0);
        let mut s1 = stream_rng(5, 1);
        assert_ne!(s0.random::<u64>(), s1.random::<u64>());
    }
}
