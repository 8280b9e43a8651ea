use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Savitzky–Golay smoothing: every output point is the value, at that
/// point, of the degree-`order` least-squares polynomial fitted to a window
/// of `window` consecutive samples.
///
/// Interior points use the window centred on them. The first and last
/// `window / 2` points reuse the first (last) full window and evaluate its
/// polynomial off-centre, so the output has the same length as the input
/// and no padding values are invented.
pub fn savgol_smooth(series: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    if window % 2 == 0 {
        return Err(Error::contract(format!("smoothing window must be odd, got {window}")));
    }
    if order >= window {
        return Err(Error::contract(format!(
            "polynomial order {order} must be below the window length {window}"
        )));
    }
    if series.len() < window {
        return Err(Error::contract(format!(
            "series of length {} is shorter than the window {window}",
            series.len()
        )));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::contract("series contains a non-finite value"));
    }

    let hat = projection(window, order);
    let half = window / 2;
    let last_start = series.len() - window;
    let smoothed = (0..series.len())
        .map(|i| {
            let start = i.saturating_sub(half).min(last_start);
            let row = hat.row(i - start);
            row.iter()
                .zip(&series[start..start + window])
                .map(|(h, y)| h * y)
                .sum()
        })
        .collect();
    Ok(smoothed)
}

/// Orthogonal projection onto polynomials of degree ≤ `order` sampled at
/// `window` points. Row `j` maps a window of samples to the fitted value at
/// its `j`-th position.
fn projection(window: usize, order: usize) -> DMatrix<f64> {
    let half = (window / 2) as f64;
    // Positions scaled into [-1, 1] keep the Vandermonde matrix well conditioned.
    let basis = DMatrix::from_fn(window, order + 1, |r, c| {
        let x = if half == 0.0 { 0.0 } else { (r as f64 - half) / half };
        x.powi(c as i32)
    });
    let q = basis.qr().q();
    &q * q.transpose()
}
