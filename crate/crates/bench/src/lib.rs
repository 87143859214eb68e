//! Benchmark inputs shared by the criterion harness.

use cyclav::weil::make_context_i64;
use cyclav::{BigInt, IntMatrix, WeilContext};

/// Ordinary simple contexts of increasing cost, highest degree first.
pub fn contexts() -> Vec<(&'static str, WeilContext)> {
    [
        ("q2_t2+t+2", 2, 1, vec![1, 1, 2]),
        ("q5_t2-2t+5", 5, 1, vec![1, -2, 5]),
        ("q9_t2+t+9", 3, 2, vec![1, 1, 9]),
        ("q2_quartic", 2, 1, vec![1, 1, 1, 2, 4]),
        ("q3_quartic", 3, 1, vec![1, 1, 2, 3, 9]),
    ]
    .into_iter()
    .map(|(name, p, r, desc)| {
        let g = (desc.len() - 1) / 2;
        (name, make_context_i64(p, r, g, &desc).expect("benchmark context"))
    })
    .collect()
}

/// Deterministic dense `n×n` matrix with entries in `[-50, 50]`.
pub fn dense_matrix(n: usize, seed: u64) -> IntMatrix {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let data = (0..n * n)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            BigInt::from(((state >> 33) % 101) as i64 - 50)
        })
        .collect();
    IntMatrix::new(n, data).expect("square")
}
