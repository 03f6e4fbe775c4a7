//! Linear operators: centered 2D DFT, subsampled measurement operator,
//! orthonormal wavelets and the discrete gradient, plus the sparsifier
//! abstraction the solvers run through.

mod fft;
mod gradient;
mod wavelet;

pub use fft::{fft2_centered, ifft2_centered, measure, restrict, MeasuredLines};
pub use gradient::{gradient_adjoint, gradient_fwd, gradient_matrix, GradientPair};
pub use wavelet::{wavelet_fwd, wavelet_inv};

use ndarray::{s, Array2};

use crate::error::Result;
use crate::model::{SparsifierKind, WaveletFamily};

/// Dual ascent step of the gradient-sparsity proximal solve; the composed
/// operator adj(fwd(.)) has spectral norm at most 8.
const GRADIENT_STEP: f64 = 0.125;

/// Dual iterations per gradient proximal solve.
const GRADIENT_PROX_ITERS: usize = 60;

pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Sparsifying transform used by the reconstruction solvers. Wavelet
/// coefficients live on an n x n grid; gradient coefficients stack the
/// horizontal differences on top of the vertical ones (2n x n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sparsifier {
    kind: SparsifierKind,
    family: WaveletFamily,
    n: usize,
}

impl Sparsifier {
    pub fn new(kind: SparsifierKind, family: WaveletFamily, n: usize) -> Result<Self> {
        if kind == SparsifierKind::Wavelet {
            // Validate eagerly so later calls cannot fail on shape.
            wavelet_fwd(&Array2::zeros((n, n)), family)?;
        }
        Ok(Sparsifier { kind, family, n })
    }

    pub fn kind(&self) -> SparsifierKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff_shape(&self) -> (usize, usize) {
        match self.kind {
            SparsifierKind::Wavelet => (self.n, self.n),
            SparsifierKind::Gradient => (2 * self.n, self.n),
        }
    }

    /// Forward transform into the coefficient layout.
    pub fn coeffs(&self, pixels: &Array2<f64>) -> Array2<f64> {
        assert_eq!(pixels.dim(), (self.n, self.n));
        match self.kind {
            SparsifierKind::Wavelet => {
                wavelet_fwd(pixels, self.family).expect("validated at construction")
            }
            SparsifierKind::Gradient => {
                let gp = gradient_fwd(pixels);
                let mut out = Array2::zeros((2 * self.n, self.n));
                out.slice_mut(s![..self.n, ..]).assign(&gp.dx);
                out.slice_mut(s![self.n.., ..]).assign(&gp.dy);
                out
            }
        }
    }

    fn split_pair(&self, coeffs: &Array2<f64>) -> GradientPair {
        GradientPair {
            dx: coeffs.slice(s![..self.n, ..]).to_owned(),
            dy: coeffs.slice(s![self.n.., ..]).to_owned(),
        }
    }

    /// One sparsity-promoting step with per-coefficient thresholds.
    ///
    /// Wavelet: exact inverse of the soft-thresholded coefficients.
    /// Gradient: the proximal map of the weighted anisotropic total
    /// variation, solved by projected dual ascent with the dual variable
    /// clipped to the per-coefficient threshold box.
    pub fn shrink_step(&self, pixels: &Array2<f64>, thresholds: &Array2<f64>) -> Array2<f64> {
        assert_eq!(thresholds.dim(), self.coeff_shape());
        match self.kind {
            SparsifierKind::Wavelet => {
                let mut c = self.coeffs(pixels);
                for (v, t) in c.iter_mut().zip(thresholds.iter()) {
                    *v = soft_threshold(*v, *t);
                }
                wavelet_inv(&c, self.family).expect("validated at construction")
            }
            SparsifierKind::Gradient => {
                let mut dual = Array2::<f64>::zeros(self.coeff_shape());
                let mut primal = pixels.clone();
                for _ in 0..GRADIENT_PROX_ITERS {
                    let ascent = self.coeffs(&primal);
                    for ((p, g), t) in
                        dual.iter_mut().zip(ascent.iter()).zip(thresholds.iter())
                    {
                        *p = (*p + GRADIENT_STEP * g).clamp(-t, *t);
                    }
                    let spread = gradient_adjoint(&self.split_pair(&dual))
                        .expect("shapes fixed by coeffs");
                    primal = pixels - &spread;
                }
                primal
            }
        }
    }

    /// Image-domain synthesis of a single coefficient basis element,
    /// used to assemble dense design matrices. For the (non-orthogonal)
    /// gradient the adjoint serves as the synthesis operator.
    pub fn synthesize_basis(&self, idx: (usize, usize)) -> Array2<f64> {
        let mut unit = Array2::zeros(self.coeff_shape());
        unit[idx] = 1.0;
        match self.kind {
            SparsifierKind::Wavelet => {
                wavelet_inv(&unit, self.family).expect("validated at construction")
            }
            SparsifierKind::Gradient => {
                gradient_adjoint(&self.split_pair(&unit)).expect("shapes fixed")
            }
        }
    }
}
