use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

/// Root mean square of the samples.
pub fn rms(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::input("rms of an empty window"));
    }
    let sum_sq: f64 = samples.iter().map(|x| x * x).sum();
    Ok((sum_sq / samples.len() as f64).sqrt())
}

/// One-sided power spectrum `|X_k|^2` for `k = 0..=N/2`.
pub(crate) fn power_spectrum(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let fft = FftPlanner::new().plan_fft_forward(n);
    fft.process(&mut buf);
    buf[..n / 2 + 1].iter().map(|c| c.norm_sqr()).collect()
}

/// Normalized Shannon entropy of the one-sided power spectrum.
///
/// The bins `0..=N/2` (DC included) are normalized to a probability mass and the
/// entropy is divided by `ln(bins)`, so the result lies in `[0, 1]`: 0 when all
/// power sits in a single bin, 1 when the spectrum is flat. An all-zero window
/// has no spectrum to speak of and yields 0.
pub fn spectral_entropy(samples: &[f64]) -> Result<f64> {
    if samples.len() < 4 {
        return Err(Error::input(format!(
            "spectral entropy needs at least 4 samples, got {}",
            samples.len()
        )));
    }
    let psd = power_spectrum(samples);
    let total: f64 = psd.iter().sum();
    if !(total > 0.0) {
        return Ok(0.0);
    }
    let h: f64 = psd
        .iter()
        .map(|&p| p / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    Ok((h / (psd.len() as f64).ln()).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn on_bin(n: usize, bin: usize, amp: f64) -> Vec<f64> {
        (0..n)
            .map(|i| amp * (2.0 * PI * bin as f64 * i as f64 / n as f64).sin())
            .collect()
    }

    #[test]
    fn rms_constant_and_alternating() {
        assert_eq!(rms(&[2.0; 37]).unwrap(), 2.0);
        let v = rms(&[3.0, -4.0, 3.0, -4.0]).unwrap();
        assert!((v - 12.5f64.sqrt()).abs() < 1e-15);
        assert!(rms(&[]).is_err());
    }

    #[test]
    fn entropy_of_single_bin_is_zero() {
        let x = on_bin(256, 17, 1.5);
        assert!(spectral_entropy(&x).unwrap() < 1e-6);
    }

    #[test]
    fn entropy_of_two_equal_bins() {
        let n = 512;
        let a = on_bin(n, 20, 1.0);
        let b = on_bin(n, 75, 1.0);
        let x: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        let bins = n / 2 + 1;
        let expected = 2f64.ln() / (bins as f64).ln();
        assert!((spectral_entropy(&x).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn entropy_degenerate_inputs() {
        assert_eq!(spectral_entropy(&[0.0; 64]).unwrap(), 0.0);
        assert!(spectral_entropy(&[1.0, 2.0, 3.0]).is_err());
    }
}
