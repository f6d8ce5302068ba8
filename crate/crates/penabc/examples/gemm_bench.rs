use penabc::linalg::{matmul, Matrix};
use std::time::Instant;

fn bench(m: usize, k: usize, n: usize, reps: usize) {
    let a = Matrix::from_vec(m, k, (0..m * k).map(|i| (i % 7) as f64 * 0.1).collect());
    let b = Matrix::from_vec(k, n, (0..k * n).map(|i| (i % 5) as f64 * 0.1).collect());
    let t = Instant::now();
    let mut acc = 0.0;
    for _ in 0..reps {
        let c = matmul(&a, &b);
        acc += c.data[0];
    }
    let dt = t.elapsed().as_secs_f64();
    let flops = 2.0 * (m * k * n) as f64 * reps as f64;
    println!("{}x{}x{} reps={} -> {:.2} GFLOP/s (acc {:.1})", m, k, n, reps, flops / dt / 1e9, acc);
}

fn main() {
    bench(199800, 100, 50, 5);  // PEN inner hidden layer, batch 200 of M=1000 windows... (g-and-k scale)
    bench(19800, 100, 50, 50);  // PEN inner hidden, batch 200 of M=100
    bench(100, 199800, 50, 5);  // backward dW = X^T dY, huge k
    bench(50, 19800, 100, 50);  // backward dW smaller
    bench(2000, 1000, 100, 10); // batched MLP forward, batch 2000
}
