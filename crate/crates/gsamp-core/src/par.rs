//! Feature-gated data-parallel helpers.
//!
//! Every helper here has a sequential twin with identical semantics; the
//! `parallel` feature only decides which body compiles. All call sites are
//! embarrassingly parallel with per-slot outputs (no cross-slot reductions),
//! so results are bitwise independent of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many elements a parallel fill is not worth the scheduling
/// overhead (a CSR row dot product is tens of flops).
pub(crate) const FILL_PAR_MIN: usize = 2048;

/// Computes `f(i)` for `i in 0..n`, collecting results in index order.
pub fn map_indexed<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Applies `f` to each `col_len`-sized contiguous chunk of a flat buffer —
/// the columns of a column-major block, or equally the rows of a row-major
/// one. Chunks are disjoint, so this parallelizes without any coordination.
pub fn for_each_col<F: Fn(usize, &mut [f64]) + Sync>(data: &mut [f64], col_len: usize, f: F) {
    assert!(col_len > 0 && data.len() % col_len == 0, "ragged column buffer");
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_exact_mut(col_len)
            .enumerate()
            .for_each(|(j, col)| f(j, col));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_exact_mut(col_len)
            .enumerate()
            .for_each(|(j, col)| f(j, col));
    }
}

/// Applies `f(i, a_i, b_i)` to aligned `chunk_len`-sized chunks of two
/// equal-length buffers — paired rows of two row-major blocks. Chunk pairs
/// are disjoint, so this parallelizes without any coordination.
pub fn for_each_col2<F: Fn(usize, &mut [f64], &mut [f64]) + Sync>(
    a: &mut [f64],
    b: &mut [f64],
    chunk_len: usize,
    f: F,
) {
    assert!(
        chunk_len > 0 && a.len() == b.len() && a.len() % chunk_len == 0,
        "ragged paired chunk buffers"
    );
    #[cfg(feature = "parallel")]
    {
        a.par_chunks_exact_mut(chunk_len)
            .zip(b.par_chunks_exact_mut(chunk_len))
            .enumerate()
            .for_each(|(i, (ca, cb))| f(i, ca, cb));
    }
    #[cfg(not(feature = "parallel"))]
    {
        a.chunks_exact_mut(chunk_len)
            .zip(b.chunks_exact_mut(chunk_len))
            .enumerate()
            .for_each(|(i, (ca, cb))| f(i, ca, cb));
    }
}

/// Fills `out[i] = f(i)`, parallelizing only when the slice is long enough to
/// amortize the fork-join cost.
pub fn fill_indexed<F: Fn(usize) -> f64 + Sync>(out: &mut [f64], f: F) {
    #[cfg(feature = "parallel")]
    {
        if out.len() >= FILL_PAR_MIN {
            out.par_iter_mut()
                .enumerate()
                .for_each(|(i, slot)| *slot = f(i));
            return;
        }
    }
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}
