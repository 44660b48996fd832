//! Small numeric kernels for the hot loops.
//!
//! Strict float semantics keep LLVM from vectorizing a naive `acc += a*b`
//! reduction (it is one serial dependency chain), so the dot product here
//! runs four independent accumulators and combines them in a fixed order.
//! Results are deterministic; they just use a different (fixed) summation
//! order than the naive loop.

/// Dot product over the common prefix of `a` and `b`.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (xa, xb) in (&mut ca).zip(&mut cb) {
        acc[0] += xa[0] * xb[0];
        acc[1] += xa[1] * xb[1];
        acc[2] += xa[2] * xb[2];
        acc[3] += xa[3] * xb[3];
    }
    let mut tail = 0.0;
    for (xa, xb) in ca.remainder().iter().zip(cb.remainder()) {
        tail += xa * xb;
    }
    (acc[0] + acc[2]) + (acc[1] + acc[3]) + tail
}

/// Sum of squares of `a`.
#[inline]
pub(crate) fn sum_sq(a: &[f64]) -> f64 {
    dot(a, a)
}
