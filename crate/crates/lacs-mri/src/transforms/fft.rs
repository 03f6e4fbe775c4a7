//! Unitary centered 2D discrete Fourier transform and the subsampled
//! line-measurement operator.

use std::collections::BTreeMap;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::model::{Image, KSpaceData, SamplingMask};

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft(n, direction)
}

/// In-place 2D FFT over rows then columns. No normalization.
fn fft2_inplace(grid: &mut Array2<Complex64>, direction: FftDirection) {
    let n = grid.nrows();
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for mut row in grid.rows_mut() {
        let slice = row.as_slice_mut().expect("contiguous row");
        fft.process_with_scratch(slice, &mut scratch);
    }
    let mut col_buf = vec![Complex64::default(); n];
    for c in 0..n {
        for r in 0..n {
            col_buf[r] = grid[(r, c)];
        }
        fft.process_with_scratch(&mut col_buf, &mut scratch);
        for r in 0..n {
            grid[(r, c)] = col_buf[r];
        }
    }
}

/// Swaps half-spaces on both axes so the zero frequency moves between the
/// corner and the grid center. Self-inverse for even n.
fn fftshift(grid: &Array2<Complex64>) -> Array2<Complex64> {
    let n = grid.nrows();
    let h = n / 2;
    Array2::from_shape_fn((n, n), |(r, c)| grid[((r + h) % n, (c + h) % n)])
}

/// Unitary centered 2D DFT of a real image. The zero frequency lands at
/// storage index (n/2, n/2), i.e. centered coordinate (0, 0).
pub fn fft2_centered(img: &Image) -> KSpaceData {
    let n = img.n();
    let mut grid = img.pixels().mapv(|v| Complex64::new(v, 0.0));
    fft2_inplace(&mut grid, FftDirection::Forward);
    let scale = 1.0 / n as f64;
    let shifted = fftshift(&grid).mapv(|v| v * scale);
    KSpaceData::new(shifted).expect("square by construction")
}

/// Inverse of `fft2_centered`; returns the complex image-domain grid.
pub fn ifft2_centered(ksp: &KSpaceData) -> Array2<Complex64> {
    let n = ksp.n();
    let mut grid = fftshift(ksp.grid());
    fft2_inplace(&mut grid, FftDirection::Inverse);
    let scale = 1.0 / n as f64;
    grid.mapv(|v| v * scale)
}

/// Acquired k-space lines: full rows of the centered spectrum keyed by
/// centered line index.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredLines {
    n: usize,
    rows: BTreeMap<i64, Array1<Complex64>>,
}

impl MeasuredLines {
    pub fn empty(n: usize) -> Self {
        MeasuredLines { n, rows: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn insert(&mut self, ky: i64, row: Array1<Complex64>) {
        assert_eq!(row.len(), self.n);
        self.rows.insert(ky, row);
    }

    pub fn get(&self, ky: i64) -> Option<&Array1<Complex64>> {
        self.rows.get(&ky)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Array1<Complex64>)> {
        self.rows.iter().map(|(k, v)| (*k, v))
    }

    /// Merges another measurement set; overlapping lines keep the new rows.
    pub fn extend(&mut self, other: MeasuredLines) {
        assert_eq!(self.n, other.n);
        self.rows.extend(other.rows);
    }

    pub fn mask(&self) -> SamplingMask {
        SamplingMask::from_lines(self.n, self.rows.keys().copied())
            .expect("keys validated on insert")
    }

    /// Sum of all sampled complex entries.
    pub fn complex_sum(&self) -> Complex64 {
        self.rows.values().flat_map(|r| r.iter()).sum()
    }

    /// Sum of moduli of all sampled entries.
    pub fn modulus_sum(&self) -> f64 {
        self.rows.values().flat_map(|r| r.iter()).map(|v| v.norm()).sum()
    }
}

/// Restriction of a centered spectrum to a set of lines.
pub fn restrict(ksp: &KSpaceData, mask: &SamplingMask) -> Result<MeasuredLines> {
    if mask.n() != ksp.n() {
        return Err(Error::DimensionMismatch { expected: ksp.n(), got: mask.n() });
    }
    let mut out = MeasuredLines::empty(ksp.n());
    for ky in mask.lines() {
        let row = ksp.grid().row(ksp.row_of(ky)).to_owned();
        out.insert(ky, row);
    }
    Ok(out)
}

/// The sampling operator: exactly the rows of the centered spectrum of
/// `img` indexed by the mask lines.
pub fn measure(img: &Image, mask: &SamplingMask) -> Result<MeasuredLines> {
    if mask.n() != img.n() {
        return Err(Error::DimensionMismatch { expected: img.n(), got: mask.n() });
    }
    restrict(&fft2_centered(img), mask)
}
