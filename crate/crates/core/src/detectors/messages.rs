use std::ops::{Index, IndexMut};

use super::DetectionResult;

/// Bound applied to bit-to-factor messages before they feed any nonlinearity.
pub const ALPHA_CLAMP: f64 = 30.0;

/// Dense row-major matrix of LLR messages.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl LlrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "LLR matrix shape");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for LlrMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for LlrMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Messages on every edge of the factor graph.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    /// Bit-to-factor messages, indexed `(bit, factor)`.
    pub alpha: LlrMatrix,
    /// Factor-to-bit messages, indexed `(factor, bit)`.
    pub beta: LlrMatrix,
}

impl MessageState {
    pub fn zeros(n_bits: usize, n_rx: usize) -> Self {
        Self {
            alpha: LlrMatrix::zeros(n_bits, n_rx),
            beta: LlrMatrix::zeros(n_rx, n_bits),
        }
    }
}

/// Extrinsic bit update: `alpha[i][j] = sum_{t != j} beta[t][i]`, clamped.
pub fn alpha_update(beta: &LlrMatrix) -> LlrMatrix {
    let (n_rx, n_bits) = (beta.rows(), beta.cols());
    let mut alpha = LlrMatrix::zeros(n_bits, n_rx);
    for i in 0..n_bits {
        for j in 0..n_rx {
            let mut acc = 0.0;
            for t in (0..n_rx).filter(|&t| t != j) {
                acc += beta[(t, i)];
            }
            alpha[(i, j)] = acc.clamp(-ALPHA_CLAMP, ALPHA_CLAMP);
        }
    }
    alpha
}

/// Per-bit posterior LLR `sum_t beta[t][i]`.
pub fn soft_output(beta: &LlrMatrix) -> Vec<f64> {
    (0..beta.cols())
        .map(|i| (0..beta.rows()).map(|t| beta[(t, i)]).sum())
        .collect()
}

impl From<&LlrMatrix> for DetectionResult {
    fn from(beta: &LlrMatrix) -> Self {
        DetectionResult::from_soft(soft_output(beta), 0)
    }
}
