//! Small numeric helpers shared across modules.

/// Pairwise (cascade) summation. Deterministic for a fixed slice and much
/// better conditioned than a running sum on long arrays.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 64;
    if xs.len() <= BASE {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Max-norm of a slice.
pub fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Relative sup-norm error of `got` against `want`, with an absolute floor so
/// that comparisons against (near) zero references stay meaningful.
pub fn rel_inf_error(got: &[f64], want: &[f64]) -> f64 {
    debug_assert_eq!(got.len(), want.len());
    let scale = max_abs(want).max(1e-300);
    let mut worst = 0.0f64;
    for (a, b) in got.iter().zip(want) {
        worst = worst.max((a - b).abs());
    }
    worst / scale
}

/// Deterministic per-point seed derivation from a master seed and an index.
/// SplitMix64 finalizer over the combined value.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_ones() {
        let xs = vec![1.0; 1 << 12];
        assert_eq!(pairwise_sum(&xs), 4096.0);
    }

    #[test]
    fn rel_error_scales() {
        let a = [1.0, 2.0];
        let b = [1.0, 2.0 + 1e-8];
        assert!((rel_inf_error(&a, &b) - 0.5e-8).abs() < 1e-12);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(7, 0), derive_seed(7, 1));
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
