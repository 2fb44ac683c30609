//! Simulation helpers shared by the integration tests.
#![allow(dead_code)]

use coopcast::Dimension;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

fn shell(dim: Dimension, d: f64, j: u32) -> (f64, f64, f64) {
    let (lo, hi) = (d * 2f64.powi(j as i32), d * 2f64.powi(j as i32 + 1));
    let measure = match dim {
        Dimension::One => hi - lo,
        Dimension::Two => std::f64::consts::PI * (hi * hi - lo * lo),
    };
    (lo, hi, measure)
}

/// Sum of `r^-alpha` over one Poisson draw of nodes in the shell `[lo, hi)`.
fn shell_power(rng: &mut ChaCha8Rng, dim: Dimension, count: &Poisson<f64>, lo: f64, hi: f64, alpha: f64) -> f64 {
    let n = count.sample(rng) as usize;
    (0..n)
        .map(|_| {
            let r = match dim {
                Dimension::One => rng.random_range(lo..hi),
                Dimension::Two => rng.random_range(lo * lo..hi * hi).sqrt(),
            };
            r.powf(-alpha)
        })
        .sum()
}

/// Simulated mean of `Z(d) = sum |x|^-alpha` over Poisson nodes beyond `d`
/// (one side of the line, or every direction in the plane). The outside of
/// the disk is cut into shells `[d 2^j, d 2^(j+1))`, each simulated from its
/// own realizations; far shells vary little and get fewer of them.
pub fn simulated_tail_mean(dim: Dimension, lambda: f64, alpha: f64, d: f64, shells: u32, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut mean, mut var) = (0.0, 0.0);
    for j in 0..shells {
        let (lo, hi, measure) = shell(dim, d, j);
        let count = Poisson::new(lambda * measure).unwrap();
        let reps = (10_000.0 / 8f64.powi(j as i32)).max(4.0) as usize;
        let mut values = Vec::with_capacity(reps);
        for _ in 0..reps {
            values.push(shell_power(&mut rng, dim, &count, lo, hi, alpha));
        }
        let m = values.iter().sum::<f64>() / reps as f64;
        let v = values.iter().map(|z| (z - m).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
        mean += m;
        var += v / reps as f64;
    }
    (mean, var.sqrt())
}

/// Independent draws of `Z(d)` restricted to `d <= r < d 2^shells`.
pub fn simulated_tail_draws(dim: Dimension, lambda: f64, alpha: f64, d: f64, shells: u32, draws: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts: Vec<_> = (0..shells)
        .map(|j| {
            let (lo, hi, measure) = shell(dim, d, j);
            (lo, hi, Poisson::new(lambda * measure).unwrap())
        })
        .collect();
    (0..draws)
        .map(|_| counts.iter().map(|(lo, hi, count)| shell_power(&mut rng, dim, count, *lo, *hi, alpha)).sum())
        .collect()
}
