//! Kernel timings on a single worker versus the full pool.
//!
//! `cargo bench -p miscible-core` compares both pool sizes;
//! `cargo bench -p miscible-core --no-default-features` times the sequential
//! fallback build.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use miscible::linalg::{neumann_laplacian, solve_cg, spmv};
use miscible::presets;

type Runner = Box<dyn Fn(&mut (dyn FnMut() + Send))>;

fn pools() -> Vec<(String, Runner)> {
    #[cfg(feature = "parallel")]
    {
        let mut v: Vec<(String, Runner)> = Vec::new();
        let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        let mut sizes = vec![1];
        if threads > 1 {
            sizes.push(threads);
        }
        for t in sizes {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
            v.push((format!("rayon-{t}"), Box::new(move |f: &mut (dyn FnMut() + Send)| pool.install(f))));
        }
        v
    }
    #[cfg(not(feature = "parallel"))]
    {
        vec![("sequential".to_string(), Box::new(|f: &mut (dyn FnMut() + Send)| f()))]
    }
}

fn kernels(c: &mut Criterion) {
    let a = neumann_laplacian(256, 256);
    let x: Vec<f64> = (0..a.n()).map(|i| (i as f64 * 0.1).sin()).collect();
    let mut b = x.clone();
    let mean = b.iter().sum::<f64>() / b.len() as f64;
    b.iter_mut().for_each(|v| *v -= mean);
    let a_small = neumann_laplacian(64, 64);
    let b_small: Vec<f64> = b[..a_small.n()].to_vec();

    let cfg = presets::preset("quarter-five-spot-32").unwrap();
    let (problem, c0) = cfg.build().unwrap();
    let state = problem.init_state(c0).unwrap();

    for (name, pool) in pools() {
        let mut g = c.benchmark_group(name);
        g.bench_function("spmv_256x256", |bch| pool(&mut || bch.iter(|| spmv(black_box(&a), black_box(&x)).unwrap())));
        g.bench_function("cg_64x64", |bch| {
            pool(&mut || bch.iter(|| solve_cg(black_box(&a_small), black_box(&b_small[..]), 1e-10, 10_000, true).unwrap()))
        });
        g.sample_size(20);
        g.bench_function("step_five_spot_32", |bch| pool(&mut || bch.iter(|| problem.step(black_box(&state), 0.0025).unwrap())));
        g.finish();
    }
}

criterion_group!(benches, kernels);
criterion_main!(benches);
