//! Shepp-Logan ellipse phantom rasterizer with an optional circular
//! "tumor" perturbation for the follow-up image.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::Image;

/// Circular intensity perturbation applied to the follow-up only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TumorSpec {
    pub row: usize,
    pub col: usize,
    /// Radius in pixels; 0 perturbs at most a single pixel.
    pub radius: usize,
    pub delta: f64,
}

/// Phantom size and optional follow-up perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhantomSpec {
    pub n: usize,
    pub tumor: Option<TumorSpec>,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        PhantomSpec {
            n: 32,
            tumor: Some(TumorSpec { row: 22, col: 18, radius: 2, delta: 0.4 }),
        }
    }
}

/// Standard Shepp-Logan ellipses: (intensity, a, b, x0, y0, phi_degrees).
const ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.98, 0.6624, 0.8740, 0.0, -0.0184, 0.0),
    (-0.02, 0.1100, 0.3100, 0.22, 0.0, -18.0),
    (-0.02, 0.1600, 0.4100, -0.22, 0.0, 18.0),
    (0.01, 0.2100, 0.2500, 0.0, 0.35, 0.0),
    (0.01, 0.0460, 0.0460, 0.0, 0.1, 0.0),
    (0.01, 0.0460, 0.0460, 0.0, -0.1, 0.0),
    (0.01, 0.0460, 0.0230, -0.08, -0.605, 0.0),
    (0.01, 0.0230, 0.0230, 0.0, -0.606, 0.0),
    (0.01, 0.0230, 0.0460, 0.06, -0.605, 0.0),
];

fn rasterize(n: usize) -> Array2<f64> {
    let half = n as f64 / 2.0;
    Array2::from_shape_fn((n, n), |(r, c)| {
        // Pixel center in [-1, 1] coordinates, y up.
        let x = (c as f64 + 0.5 - half) / half;
        let y = (half - r as f64 - 0.5) / half;
        let mut v = 0.0;
        for &(a_int, a, b, x0, y0, phi) in &ELLIPSES {
            let th = phi.to_radians();
            let (s, co) = th.sin_cos();
            let dx = x - x0;
            let dy = y - y0;
            let u = dx * co + dy * s;
            let w = -dx * s + dy * co;
            if (u / a).powi(2) + (w / b).powi(2) <= 1.0 {
                v += a_int;
            }
        }
        v.max(0.0)
    })
}

/// Builds the tumor-free reference and the follow-up phantom. Without a
/// tumor the two images are identical.
pub fn shepp_logan(spec: &PhantomSpec) -> Result<(Image, Image)> {
    let n = spec.n;
    let reference = rasterize(n);
    let mut followup = reference.clone();
    if let Some(t) = spec.tumor {
        let r = t.radius as i64;
        let (row, col) = (t.row as i64, t.col as i64);
        if row - r < 0 || col - r < 0 || row + r >= n as i64 || col + r >= n as i64 {
            return Err(Error::TumorOutOfBounds);
        }
        for dr in -r..=r {
            for dc in -r..=r {
                if dr * dr + dc * dc <= r * r {
                    followup[((row + dr) as usize, (col + dc) as usize)] += t.delta;
                }
            }
        }
    }
    Ok((Image::new(reference)?, Image::new(followup)?))
}
