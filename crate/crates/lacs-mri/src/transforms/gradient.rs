//! Discrete gradient operator and its adjoint. The boundary convention
//! keeps the raw pixel value on the last index of each direction, so the
//! forward operator equals multiplication by the upper-bidiagonal matrix
//! G (ones on the diagonal, minus ones on the superdiagonal, bare one in
//! the last row): dy = G X, dx = X G^T.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Horizontal and vertical difference fields, both the shape of the
/// source image.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair {
    pub dx: Array2<f64>,
    pub dy: Array2<f64>,
}

impl GradientPair {
    pub fn zeros(shape: (usize, usize)) -> Self {
        GradientPair { dx: Array2::zeros(shape), dy: Array2::zeros(shape) }
    }

    pub fn l1_norm(&self) -> f64 {
        self.dx.iter().map(|v| v.abs()).sum::<f64>()
            + self.dy.iter().map(|v| v.abs()).sum::<f64>()
    }
}

/// Forward differences with identity on the boundary index.
pub fn gradient_fwd(pixels: &Array2<f64>) -> GradientPair {
    let (rows, cols) = pixels.dim();
    let mut dx = Array2::zeros((rows, cols));
    let mut dy = Array2::zeros((rows, cols));
    for j in 0..rows {
        for k in 0..cols {
            dx[(j, k)] = if k + 1 < cols {
                pixels[(j, k)] - pixels[(j, k + 1)]
            } else {
                pixels[(j, k)]
            };
            dy[(j, k)] = if j + 1 < rows {
                pixels[(j, k)] - pixels[(j + 1, k)]
            } else {
                pixels[(j, k)]
            };
        }
    }
    GradientPair { dx, dy }
}

/// Adjoint of `gradient_fwd`: G^T dy + dx G.
pub fn gradient_adjoint(gp: &GradientPair) -> Result<Array2<f64>> {
    if gp.dx.dim() != gp.dy.dim() {
        return Err(Error::DimensionMismatch {
            expected: gp.dy.nrows(),
            got: gp.dx.nrows(),
        });
    }
    let (rows, cols) = gp.dy.dim();
    let mut out = Array2::zeros((rows, cols));
    for j in 0..rows {
        for k in 0..cols {
            // (G^T V)[j,k] = V[j,k] - V[j-1,k]  (V[0,k] at j = 0)
            let vert = if j > 0 { gp.dy[(j, k)] - gp.dy[(j - 1, k)] } else { gp.dy[(j, k)] };
            // (U G)[j,k] = U[j,k] - U[j,k-1]  (U[j,0] at k = 0)
            let horz = if k > 0 { gp.dx[(j, k)] - gp.dx[(j, k - 1)] } else { gp.dx[(j, k)] };
            out[(j, k)] = vert + horz;
        }
    }
    Ok(out)
}

/// Dense difference matrix G, used by tests and the design-density module.
pub fn gradient_matrix(n: usize) -> Array2<f64> {
    let mut g = Array2::zeros((n, n));
    for j in 0..n {
        g[(j, j)] = 1.0;
        if j + 1 < n {
            g[(j, j + 1)] = -1.0;
        }
    }
    g
}
