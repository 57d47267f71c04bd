//! Flat-slice vector kernels for the dense layers.
//!
//! Summation order is fixed, so results are bit-reproducible regardless of
//! optimization level or thread count. The multi-accumulator dot product
//! breaks the FP dependency chain so LLVM can vectorize it.

/// Dot product over 16 independent fused-multiply-add lanes. `mul_add`
/// compiles to the hardware FMA instruction, which is itself a fully
/// specified IEEE operation, so results stay bit-reproducible on a given
/// target.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut acc = [0.0f64; 16];
    for (xc, yc) in a.chunks_exact(16).zip(b.chunks_exact(16)) {
        for l in 0..16 {
            acc[l] = xc[l].mul_add(yc[l], acc[l]);
        }
    }
    let mut tail = 0.0;
    for i in (n - n % 16)..n {
        tail = a[i].mul_add(b[i], tail);
    }
    let mut lanes8 = [0.0f64; 8];
    for l in 0..8 {
        lanes8[l] = acc[l] + acc[l + 8];
    }
    ((lanes8[0] + lanes8[1]) + (lanes8[2] + lanes8[3]))
        + ((lanes8[4] + lanes8[5]) + (lanes8[6] + lanes8[7]))
        + tail
}

/// `y += alpha * x`, branchless fused multiply-add.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = alpha.mul_add(*xi, *yi);
    }
}

/// `y = X·Wᵀ + b` for row-major `x: [rows × in]`, `w: [out × in]`,
/// `b: [out]`, producing `[rows × out]`.
pub fn linear_forward(x: &[f64], rows: usize, w: &[f64], b: &[f64], in_dim: usize, out_dim: usize) -> Vec<f64> {
    debug_assert_eq!(x.len(), rows * in_dim);
    debug_assert_eq!(w.len(), out_dim * in_dim);
    debug_assert_eq!(b.len(), out_dim);
    let mut y = vec![0.0; rows * out_dim];
    for r in 0..rows {
        let xr = &x[r * in_dim..(r + 1) * in_dim];
        let yr = &mut y[r * out_dim..(r + 1) * out_dim];
        for (o, yo) in yr.iter_mut().enumerate() {
            *yo = b[o] + dot(xr, &w[o * in_dim..(o + 1) * in_dim]);
        }
    }
    y
}

/// Transpose a row-major `[rows × cols]` matrix into `[cols × rows]`.
pub fn transpose(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    debug_assert_eq!(a.len(), rows * cols);
    let mut t = vec![0.0; a.len()];
    for r in 0..rows {
        for c in 0..cols {
            t[c * rows + r] = a[r * cols + c];
        }
    }
    t
}
