//! Orthonormal 2D wavelet transform with periodic boundaries and
//! full-depth decomposition (Haar or Daubechies-4).

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::WaveletFamily;

const SQRT2_INV: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn analysis_filters(family: WaveletFamily) -> (Vec<f64>, Vec<f64>) {
    match family {
        WaveletFamily::Haar => {
            let h = vec![SQRT2_INV, SQRT2_INV];
            let g = vec![SQRT2_INV, -SQRT2_INV];
            (h, g)
        }
        WaveletFamily::Db4 => {
            let s3 = 3.0_f64.sqrt();
            let norm = 4.0 * 2.0_f64.sqrt();
            let h = vec![
                (1.0 + s3) / norm,
                (3.0 + s3) / norm,
                (3.0 - s3) / norm,
                (1.0 - s3) / norm,
            ];
            // Quadrature mirror: g[k] = (-1)^k h[L-1-k].
            let l = h.len();
            let g = (0..l).map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] }).collect();
            (h, g)
        }
    }
}

fn is_power_of_two(n: usize) -> bool {
    n >= 2 && n & (n - 1) == 0
}

/// One periodic analysis step on `x[..s]`: first half approximation,
/// second half detail.
fn analyze_1d(x: &mut [f64], s: usize, h: &[f64], g: &[f64], buf: &mut [f64]) {
    let half = s / 2;
    for i in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for (k, (&hk, &gk)) in h.iter().zip(g.iter()).enumerate() {
            let v = x[(2 * i + k) % s];
            a += hk * v;
            d += gk * v;
        }
        buf[i] = a;
        buf[half + i] = d;
    }
    x[..s].copy_from_slice(&buf[..s]);
}

/// Inverse of `analyze_1d` (transpose of the orthonormal step).
fn synthesize_1d(x: &mut [f64], s: usize, h: &[f64], g: &[f64], buf: &mut [f64]) {
    let half = s / 2;
    buf[..s].fill(0.0);
    for i in 0..half {
        let a = x[i];
        let d = x[half + i];
        for (k, (&hk, &gk)) in h.iter().zip(g.iter()).enumerate() {
            buf[(2 * i + k) % s] += hk * a + gk * d;
        }
    }
    x[..s].copy_from_slice(&buf[..s]);
}

/// Full-depth 2D wavelet decomposition of a square power-of-two matrix.
pub fn wavelet_fwd(pixels: &Array2<f64>, family: WaveletFamily) -> Result<Array2<f64>> {
    let n = pixels.nrows();
    if pixels.ncols() != n {
        return Err(Error::NonSquareImage { height: n, width: pixels.ncols() });
    }
    if !is_power_of_two(n) {
        return Err(Error::NonPowerOfTwoSize(n));
    }
    let (h, g) = analysis_filters(family);
    let mut out = pixels.clone();
    let mut line = vec![0.0; n];
    let mut buf = vec![0.0; n];
    let mut s = n;
    while s >= 2 {
        for r in 0..s {
            for c in 0..s {
                line[c] = out[(r, c)];
            }
            analyze_1d(&mut line, s, &h, &g, &mut buf);
            for c in 0..s {
                out[(r, c)] = line[c];
            }
        }
        for c in 0..s {
            for r in 0..s {
                line[r] = out[(r, c)];
            }
            analyze_1d(&mut line, s, &h, &g, &mut buf);
            for r in 0..s {
                out[(r, c)] = line[r];
            }
        }
        s /= 2;
    }
    Ok(out)
}

/// Inverse full-depth 2D wavelet transform.
pub fn wavelet_inv(coeffs: &Array2<f64>, family: WaveletFamily) -> Result<Array2<f64>> {
    let n = coeffs.nrows();
    if coeffs.ncols() != n {
        return Err(Error::NonSquareImage { height: n, width: coeffs.ncols() });
    }
    if !is_power_of_two(n) {
        return Err(Error::NonPowerOfTwoSize(n));
    }
    let (h, g) = analysis_filters(family);
    let mut out = coeffs.clone();
    let mut line = vec![0.0; n];
    let mut buf = vec![0.0; n];
    let mut s = 2;
    while s <= n {
        for c in 0..s {
            for r in 0..s {
                line[r] = out[(r, c)];
            }
            synthesize_1d(&mut line, s, &h, &g, &mut buf);
            for r in 0..s {
                out[(r, c)] = line[r];
            }
        }
        for r in 0..s {
            for c in 0..s {
                line[c] = out[(r, c)];
            }
            synthesize_1d(&mut line, s, &h, &g, &mut buf);
            for c in 0..s {
                out[(r, c)] = line[c];
            }
        }
        s *= 2;
    }
    Ok(out)
}
