use crate::error::{Error, Result};

/// Population standard deviation.
pub(crate) fn std_dev(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Approximate entropy `ApEn(m, r)` with `r = r_tol * std(x)`.
///
/// Pincus' definition: `phi_m - phi_{m+1}`, where `phi_m` is the mean log fraction
/// of length-`m` templates within Chebyshev distance `r` of each template,
/// self-matches included. A constant window is perfectly regular and returns 0.
pub fn approximate_entropy(x: &[f64], m: usize, r_tol: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::input("approximate entropy embedding dimension must be >= 1"));
    }
    if x.len() <= m + 1 {
        return Err(Error::input(format!(
            "approximate entropy with m={m} needs more than {} samples, got {}",
            m + 1,
            x.len()
        )));
    }
    if !(r_tol > 0.0) {
        return Err(Error::input(format!("tolerance fraction must be positive, got {r_tol}")));
    }
    let sd = std_dev(x);
    if sd == 0.0 {
        return Ok(0.0);
    }
    let r = r_tol * sd;

    let n = x.len();
    let short = n - m + 1;
    let long = n - m;
    // Self-matches.
    let mut c_short = vec![1u32; short];
    let mut c_long = vec![1u32; long];

    for i in 0..short {
        for j in (i + 1)..short {
            if (0..m).any(|d| (x[i + d] - x[j + d]).abs() > r) {
                continue;
            }
            c_short[i] += 1;
            c_short[j] += 1;
            if j < long && (x[i + m] - x[j + m]).abs() <= r {
                c_long[i] += 1;
                c_long[j] += 1;
            }
        }
    }

    let phi = |counts: &[u32]| {
        let total = counts.len() as f64;
        counts.iter().map(|&c| (c as f64 / total).ln()).sum::<f64>() / total
    };
    Ok(phi(&c_short) - phi(&c_long))
}
