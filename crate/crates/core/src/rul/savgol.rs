use log::warn;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

fn check(order: usize, frame: usize) -> Result<()> {
    if frame.is_multiple_of(2) {
        return Err(Error::config(format!("Savitzky-Golay frame must be odd, got {frame}")));
    }
    if frame <= order {
        return Err(Error::config(format!(
            "Savitzky-Golay frame {frame} must exceed the polynomial order {order}"
        )));
    }
    Ok(())
}

/// Convolution weights that evaluate the least-squares polynomial fitted over
/// a frame at `offset` samples from the frame center (0 is the center).
pub fn savgol_coefficients(order: usize, frame: usize, offset: isize) -> Result<Vec<f64>> {
    check(order, frame)?;
    let half = (frame / 2) as f64;
    // Positions scaled to [-1, 1] keep the Vandermonde matrix well conditioned.
    let vander = DMatrix::from_fn(frame, order + 1, |i, q| ((i as f64 - half) / half).powi(q as i32));
    let pinv = vander
        .pseudo_inverse(1e-14)
        .map_err(|e| Error::input(format!("Savitzky-Golay fit failed: {e}")))?;
    let t = offset as f64 / half;
    let basis = DVector::from_fn(order + 1, |q, _| t.powi(q as i32));
    Ok((pinv.transpose() * basis).iter().copied().collect())
}

/// Savitzky-Golay smoothing with output length equal to input length.
///
/// Interior points use the centered frame. The first and last `frame / 2`
/// points take the polynomial fitted to the first (last) full frame,
/// evaluated off-center at their own position. Series shorter than one frame
/// are returned unchanged.
pub fn savitzky_golay(series: &[f64], order: usize, frame: usize) -> Result<Vec<f64>> {
    check(order, frame)?;
    let n = series.len();
    if n < frame {
        warn!("series of {n} points is shorter than the {frame}-point smoothing frame; left unsmoothed");
        return Ok(series.to_vec());
    }
    let half = frame / 2;
    let apply = |coef: &[f64], start: usize| -> f64 {
        coef.iter().zip(&series[start..start + frame]).map(|(c, x)| c * x).sum()
    };

    let mut out = vec![0.0; n];
    let center = savgol_coefficients(order, frame, 0)?;
    for (i, o) in out.iter_mut().enumerate().take(n - half).skip(half) {
        *o = apply(&center, i - half);
    }
    for i in 0..half {
        let coef = savgol_coefficients(order, frame, i as isize - half as isize)?;
        out[i] = apply(&coef, 0);
        let coef = savgol_coefficients(order, frame, (half - i) as isize)?;
        out[n - 1 - i] = apply(&coef, n - frame);
    }
    Ok(out)
}
