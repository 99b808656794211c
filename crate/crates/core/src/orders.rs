//! Permutation helpers shared by the Shapley and mechanism modules.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Draws `samples` uniform permutations of `0..agents`, sequentially from
/// one seeded stream, so the list does not depend on how it is consumed.
pub(crate) fn draw_orders(agents: usize, samples: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let mut order: Vec<usize> = (0..agents).collect();
            order.shuffle(&mut rng);
            order
        })
        .collect()
}

/// Rearranges `order` into the next permutation in lexicographic order;
/// returns false after the last one.
pub(crate) fn next_permutation(order: &mut [usize]) -> bool {
    if order.len() < 2 {
        return false;
    }
    let mut i = order.len() - 1;
    while i > 0 && order[i - 1] >= order[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = order.len() - 1;
    while order[j] <= order[i - 1] {
        j -= 1;
    }
    order.swap(i - 1, j);
    order[i..].reverse();
    true
}

/// Mean and standard error of the mean (sample standard deviation over
/// `sqrt(n)`; zero for a single sample).
pub(crate) fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
