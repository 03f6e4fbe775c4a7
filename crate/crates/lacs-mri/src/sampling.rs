//! Sampling probability densities over k-space lines, their mixture, and
//! without-replacement line drawing.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{centered_to_row, Image, KSpaceData, LinePdf, SamplingMask};
use crate::transforms::{fft2_centered, MeasuredLines, Sparsifier};

/// Grid-size guard for the dense relaxed-design solve (and the per-entry
/// discrepancy density, which shares the cost profile).
pub const DENSE_DESIGN_LIMIT: usize = 64;

/// Triangular variable density: prob(k_y) proportional to
/// (1 - (2/n)|k_y|)^p, maximal at k_y = 0.
pub fn pdf_vd(n: usize, p: f64) -> LinePdf {
    assert!(p >= 0.0, "exponent must be nonnegative");
    let half = n as i64 / 2;
    let weights = (-half..half)
        .map(|ky| {
            let base = 1.0 - (2.0 / n as f64) * ky.unsigned_abs() as f64;
            // 0^0 = 1: p = 0 yields the uniform density.
            base.max(0.0).powf(p)
        })
        .collect();
    LinePdf::from_weights(weights)
}

/// Capped power-law 2D density q(k1, k2) = min(C, 1/(k1^2+k2^2)^p) with the
/// origin cell pinned at C, marginalized over k_x to a line density.
pub fn pdf_vds(n: usize, p: f64, c: f64) -> LinePdf {
    assert!(p >= 0.0 && c > 0.0);
    let half = n as i64 / 2;
    let weights = (-half..half)
        .map(|ky| {
            (-half..half)
                .map(|kx| {
                    let r2 = (ky * ky + kx * kx) as f64;
                    if r2 == 0.0 {
                        c
                    } else {
                        c.min(r2.powf(-p))
                    }
                })
                .sum()
        })
        .collect();
    LinePdf::from_weights(weights)
}

/// Reference density: line mass proportional to the summed moduli of the
/// reference spectrum on that line.
pub fn pdf_r(ref_k: &KSpaceData) -> Result<LinePdf> {
    let n = ref_k.n();
    let weights: Vec<f64> = (0..n)
        .map(|r| ref_k.grid().row(r).iter().map(|v| v.norm()).sum())
        .collect();
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::AllZeroReference);
    }
    Ok(LinePdf::from_weights(weights))
}

/// Discrepancy density: per-entry relative difference between the current
/// estimate's spectrum and a proxy for the true spectrum, summed per line.
/// The 0/0 convention is 0; an all-zero discrepancy falls back to uniform.
pub fn pdf_nd(est_k: &KSpaceData, proxy_k: &KSpaceData) -> Result<LinePdf> {
    let n = est_k.n();
    if proxy_k.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: proxy_k.n() });
    }
    let weights: Vec<f64> = (0..n)
        .map(|r| {
            est_k
                .grid()
                .row(r)
                .iter()
                .zip(proxy_k.grid().row(r).iter())
                .map(|(a, b)| {
                    let denom = a.norm() + b.norm();
                    if denom == 0.0 {
                        0.0
                    } else {
                        (a - b).norm() / denom
                    }
                })
                .sum()
        })
        .collect();
    Ok(LinePdf::from_weights(weights))
}

/// Proxy for the unknown true spectrum: acquired measurements on sampled
/// lines, the reference spectrum elsewhere.
pub fn proxy_spectrum(ref_k: &KSpaceData, meas: &MeasuredLines) -> KSpaceData {
    let mut grid = ref_k.grid().clone();
    for (ky, row) in meas.iter() {
        let r = centered_to_row(ky, ref_k.n());
        for (c, v) in row.iter().enumerate() {
            grid[(r, c)] = *v;
        }
    }
    KSpaceData::new(grid).expect("square by construction")
}

/// Support for the relaxed-design density: indices of the largest-modulus
/// sparsifier coefficients of the reference image (5% of the pixel count).
pub fn design_support(sparsifier: &Sparsifier, x0: &Image) -> Vec<(usize, usize)> {
    let n = x0.n();
    let count = ((0.05 * (n * n) as f64).ceil() as usize).max(1);
    let coeffs = sparsifier.coeffs(x0.pixels());
    let mut indexed: Vec<((usize, usize), f64)> =
        coeffs.indexed_iter().map(|(idx, v)| (idx, v.abs())).collect();
    indexed.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    indexed.into_iter().take(count).map(|(idx, _)| idx).collect()
}

fn project_capped_simplex(s: &mut [f64], budget: f64) {
    for v in s.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let sum: f64 = s.iter().sum();
    if sum <= budget {
        return;
    }
    let mut sorted: Vec<f64> = s.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cum += u;
        let t = (cum - budget) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    for v in s.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// tr((B^H diag(s) B)^-1) and the inverse, or None when singular.
fn design_objective(b: &DMatrix<Complex64>, s: &[f64]) -> Option<(f64, DMatrix<Complex64>)> {
    let (rows, l) = (b.nrows(), b.ncols());
    let mut sb = b.clone();
    for i in 0..rows {
        for j in 0..l {
            sb[(i, j)] *= Complex64::new(s[i], 0.0);
        }
    }
    let m = b.adjoint() * sb;
    let inv = m.lu().try_inverse()?;
    let trace: f64 = (0..l).map(|i| inv[(i, i)].re).sum();
    if trace.is_finite() && trace > 0.0 {
        Some((trace, inv))
    } else {
        None
    }
}

fn design_matrix(sparsifier: &Sparsifier, support: &[(usize, usize)]) -> DMatrix<Complex64> {
    let n = sparsifier.n();
    let mut b = DMatrix::zeros(n * n, support.len());
    for (j, &idx) in support.iter().enumerate() {
        let basis = Image::new(sparsifier.synthesize_basis(idx)).expect("finite basis");
        let ksp = fft2_centered(&basis);
        for (i, v) in ksp.grid().iter().enumerate() {
            b[(i, j)] = *v;
        }
    }
    b
}

/// Relaxed adaptive design: projected-gradient minimization of the inverse
/// Gram trace over nonnegative diagonal selections with a trace budget,
/// aggregated per k-space line. Returns the density and the achieved
/// objective value.
pub fn pdf_a_detailed(
    n: usize,
    sparsifier: &Sparsifier,
    support: &[(usize, usize)],
    eps_tr: f64,
    max_iters: usize,
) -> Result<(LinePdf, f64)> {
    if n > DENSE_DESIGN_LIMIT {
        return Err(Error::GridTooLarge { n, limit: DENSE_DESIGN_LIMIT });
    }
    assert!(!support.is_empty(), "support must be non-empty");
    assert!(support.len() <= n * n, "support cannot exceed the row count");
    assert!(eps_tr > 0.0);

    let b = design_matrix(sparsifier, support);
    let points = n * n;
    let mut s = vec![eps_tr / points as f64; points];

    let (mut obj, mut inv) = match design_objective(&b, &s) {
        Some(v) => v,
        None => return Err(Error::SingularDesign),
    };

    let mut step = eps_tr;
    for _ in 0..max_iters {
        // grad_i = -|| M^-1 beta_i ||^2 with beta_i the conjugated i-th row of B.
        let x = &inv * b.adjoint();
        let grad: Vec<f64> = (0..points)
            .map(|i| -x.column(i).iter().map(|v| v.norm_sqr()).sum::<f64>())
            .collect();
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax == 0.0 {
            break;
        }

        let mut accepted = false;
        for _ in 0..40 {
            let mut cand: Vec<f64> =
                s.iter().zip(grad.iter()).map(|(v, g)| v - step * g).collect();
            project_capped_simplex(&mut cand, eps_tr);
            if let Some((cand_obj, cand_inv)) = design_objective(&b, &cand) {
                if cand_obj <= obj {
                    let rel = (obj - cand_obj) / obj;
                    s = cand;
                    obj = cand_obj;
                    inv = cand_inv;
                    accepted = true;
                    step *= 1.5;
                    if rel < 1e-6 {
                        return Ok((aggregate_lines(n, &s), obj));
                    }
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((aggregate_lines(n, &s), obj))
}

fn aggregate_lines(n: usize, s: &[f64]) -> LinePdf {
    let weights = (0..n).map(|r| s[r * n..(r + 1) * n].iter().sum()).collect();
    LinePdf::from_weights(weights)
}

/// Relaxed adaptive design density with the default iteration budget.
pub fn pdf_a(
    n: usize,
    sparsifier: &Sparsifier,
    support: &[(usize, usize)],
    eps_tr: f64,
) -> Result<LinePdf> {
    pdf_a_detailed(n, sparsifier, support, eps_tr, 200).map(|(pdf, _)| pdf)
}

/// Convex mixture gamma * adaptive + (1 - gamma) * variable density.
pub fn mix_pdf(adaptive: &LinePdf, vd: &LinePdf, gamma: f64) -> Result<LinePdf> {
    assert!((0.0..=1.0).contains(&gamma), "gamma must lie in [0, 1]");
    if adaptive.n() != vd.n() {
        return Err(Error::DimensionMismatch { expected: vd.n(), got: adaptive.n() });
    }
    let weights = adaptive
        .prob()
        .iter()
        .zip(vd.prob().iter())
        .map(|(a, v)| gamma * a + (1.0 - gamma) * v)
        .collect();
    Ok(LinePdf::from_weights(weights))
}

/// Mean of the similarity weights; the mixture weight of adaptive sampling.
pub fn update_gamma(w2: &[f64]) -> f64 {
    assert!(!w2.is_empty());
    let mean = w2.iter().sum::<f64>() / w2.len() as f64;
    mean.clamp(0.0, 1.0)
}

/// Mutable sampler state: acquired lines, the current mixture weight and
/// the owned RNG stream. Never shared across trials.
#[derive(Debug, Clone)]
pub struct SamplerState {
    acquired: SamplingMask,
    gamma: f64,
    rng: ChaCha8Rng,
}

impl SamplerState {
    pub fn new(n: usize, seed: u64) -> Self {
        SamplerState {
            acquired: SamplingMask::empty(n),
            gamma: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn acquired(&self) -> &SamplingMask {
        &self.acquired
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn set_gamma(&mut self, gamma: f64) {
        assert!((0.0..=1.0).contains(&gamma));
        self.gamma = gamma;
    }
}

/// Draws `k` distinct unacquired lines without replacement from the pdf
/// restricted to unacquired lines. Zero restricted mass falls back to the
/// uniform density over what remains.
pub fn draw_lines(pdf: &LinePdf, k: usize, state: &mut SamplerState) -> Result<Vec<i64>> {
    let mut remaining = state.acquired.unacquired();
    if k > remaining.len() {
        return Err(Error::NotEnoughLines { requested: k, available: remaining.len() });
    }
    let mut drawn = Vec::with_capacity(k);
    for _ in 0..k {
        let mut weights: Vec<f64> = remaining.iter().map(|&ky| pdf.prob_at(ky)).collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            weights.fill(1.0);
        }
        let total: f64 = weights.iter().sum();
        let u = state.rng.gen::<f64>() * total;
        let mut cum = 0.0;
        let mut pick = remaining.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            cum += w;
            if u < cum {
                pick = i;
                break;
            }
        }
        let ky = remaining.swap_remove(pick);
        state.acquired.insert(ky);
        drawn.push(ky);
    }
    Ok(drawn)
}
