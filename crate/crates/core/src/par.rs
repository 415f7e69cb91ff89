//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the per-element loops run on the rayon pool.
//! Reductions are always split into fixed-size chunks whose partial sums are
//! combined left to right, so results are bitwise identical with and without
//! the feature and independent of the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length used by every reduction.
pub const CHUNK: usize = 1024;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let partial = |(x, y): (&[f64], &[f64])| -> f64 { x.iter().zip(y).map(|(p, q)| p * q).sum() };
    #[cfg(feature = "parallel")]
    let parts: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(partial)
        .collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<f64> = a.chunks(CHUNK).zip(b.chunks(CHUNK)).map(partial).collect();
    parts.iter().sum()
}

pub fn sum(a: &[f64]) -> f64 {
    let partial = |x: &[f64]| -> f64 { x.iter().sum() };
    #[cfg(feature = "parallel")]
    let parts: Vec<f64> = a.par_chunks(CHUNK).map(partial).collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<f64> = a.chunks(CHUNK).map(partial).collect();
    parts.iter().sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `out[i] = f(i)` for every index.
pub fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
    #[cfg(not(feature = "parallel"))]
    out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
}

/// Collects `f(i)` for `i in 0..n`.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return (0..n).into_par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return (0..n).map(f).collect();
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    #[cfg(feature = "parallel")]
    y.par_iter_mut().zip(x.par_iter()).for_each(|(yi, xi)| *yi += alpha * xi);
    #[cfg(not(feature = "parallel"))]
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

/// `y = x + beta * y`
pub fn xpby(x: &[f64], beta: f64, y: &mut [f64]) {
    #[cfg(feature = "parallel")]
    y.par_iter_mut().zip(x.par_iter()).for_each(|(yi, xi)| *yi = xi + beta * *yi);
    #[cfg(not(feature = "parallel"))]
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi = xi + beta * *yi);
}

/// Sizes the global worker pool used by the data-parallel kernels. Has no
/// effect without the `parallel` feature or once the pool exists.
pub fn set_threads(jobs: usize) {
    #[cfg(feature = "parallel")]
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
        log::debug!("global pool already configured: {e}");
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}

/// Runs independent jobs, on at most `jobs` worker threads when parallel.
/// Output order matches input order.
pub fn run_jobs<I, T, F>(inputs: Vec<I>, jobs: usize, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        let jobs = jobs.max(1);
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| inputs.into_par_iter().map(&f).collect()),
            Err(e) => {
                log::warn!("worker pool unavailable ({e}); running jobs sequentially");
                inputs.into_iter().map(f).collect()
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        inputs.into_iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_dot_matches_chunked_serial_order() {
        let a: Vec<f64> = (0..5000).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..5000).map(|i| (i as f64 * 0.11).cos()).collect();
        let expected: f64 = a
            .chunks(CHUNK)
            .zip(b.chunks(CHUNK))
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
            .collect::<Vec<_>>()
            .iter()
            .sum();
        assert_eq!(dot(&a, &b).to_bits(), expected.to_bits());
    }

    #[test]
    fn run_jobs_keeps_order() {
        let out = run_jobs((0..16).collect(), 3, |i: usize| i * i);
        assert_eq!(out, (0..16).map(|i| i * i).collect::<Vec<_>>());
    }
}
