//! Dense row-major matrices and the handful of products network training needs.
//!
//! Shapes follow the batched convention used everywhere in this crate: data
//! matrices are `(batch × dim)`, layer weights are `(out_dim × in_dim)`.
//! The three GEMM variants map onto the forward pass (`x · Wᵀ`), the input
//! gradient (`δ · W`), and the weight gradient (`δᵀ · x`) without ever
//! materializing a transpose.

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must equal rows*cols");
        Matrix { rows, cols, data }
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Borrow a contiguous block of rows as its own matrix view (copy-free
    /// is not possible with owned `Vec`s, so this copies; used only in tests).
    pub fn rows_slice(&self, start: usize, count: usize) -> Matrix {
        Matrix::from_vec(count, self.cols, self.data[start * self.cols..(start + count) * self.cols].to_vec())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

unsafe fn dgemm_rowmajor(
    m: usize,
    k: usize,
    n: usize,
    a: *const f64,
    rsa: isize,
    csa: isize,
    b: *const f64,
    rsb: isize,
    csb: isize,
    c: &mut Matrix,
) {
    debug_assert_eq!(c.rows, m);
    debug_assert_eq!(c.cols, n);
    matrixmultiply::dgemm(m, k, n, 1.0, a, rsa, csa, b, rsb, csb, 0.0, c.data.as_mut_ptr(), n as isize, 1);
}

/// `a · b`, shapes `(m,k) × (k,n) → (m,n)`.
pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols, b.rows, "matmul inner dimension mismatch");
    let mut out = Matrix::zeros(a.rows, b.cols);
    unsafe {
        dgemm_rowmajor(
            a.rows, a.cols, b.cols,
            a.data.as_ptr(), a.cols as isize, 1,
            b.data.as_ptr(), b.cols as isize, 1,
            &mut out,
        );
    }
    out
}

/// `a · bᵀ`, shapes `(m,k) × (n,k) → (m,n)`. Forward pass: `x · Wᵀ`.
pub fn matmul_nt(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols, b.cols, "matmul_nt inner dimension mismatch");
    let mut out = Matrix::zeros(a.rows, b.rows);
    unsafe {
        dgemm_rowmajor(
            a.rows, a.cols, b.rows,
            a.data.as_ptr(), a.cols as isize, 1,
            b.data.as_ptr(), 1, b.cols as isize,
            &mut out,
        );
    }
    out
}

/// `aᵀ · b`, shapes `(k,m) × (k,n) → (m,n)`. Weight gradient: `δᵀ · x`.
pub fn matmul_tn(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.rows, b.rows, "matmul_tn inner dimension mismatch");
    let mut out = Matrix::zeros(a.cols, b.cols);
    unsafe {
        dgemm_rowmajor(
            a.cols, a.rows, b.cols,
            a.data.as_ptr(), 1, a.cols as isize,
            b.data.as_ptr(), b.cols as isize, 1,
            &mut out,
        );
    }
    out
}

/// Add a bias row vector to every row of `m` in place.
pub fn add_bias_rows(m: &mut Matrix, bias: &[f64]) {
    assert_eq!(m.cols, bias.len(), "bias length mismatch");
    for r in 0..m.rows {
        for (v, b) in m.row_mut(r).iter_mut().zip(bias) {
            *v += b;
        }
    }
}

/// Column sums of `m` (used for bias gradients).
pub fn col_sums(m: &Matrix) -> Vec<f64> {
    let mut out = vec![0.0; m.cols];
    for r in 0..m.rows {
        for (o, v) in out.iter_mut().zip(m.row(r)) {
            *o += v;
        }
    }
    out
}

/// Compensated (Neumaier) sum of a slice: exact enough that pooling results
/// do not depend on harmless reorderings at the 1e-12 level.
pub fn neumaier_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Streaming Neumaier accumulator for column-wise pooling.
#[derive(Debug, Clone)]
pub struct NeumaierAcc {
    sum: Vec<f64>,
    comp: Vec<f64>,
}

impl NeumaierAcc {
    pub fn new(dim: usize) -> Self {
        NeumaierAcc { sum: vec![0.0; dim], comp: vec![0.0; dim] }
    }

    #[inline]
    pub fn add_row(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.sum.len());
        for i in 0..row.len() {
            let x = row[i];
            let s = self.sum[i];
            let t = s + x;
            if s.abs() >= x.abs() {
                self.comp[i] += (s - t) + x;
            } else {
                self.comp[i] += (x - t) + s;
            }
            self.sum[i] = t;
        }
    }

    pub fn finish(&self) -> Vec<f64> {
        self.sum.iter().zip(&self.comp).map(|(s, c)| s + c).collect()
    }
}
