//! Seeded random number generation with a fully specified algorithm, so the
//! same seed yields the same trace in any implementation of this toolkit.
//!
//! The generator is a 64-bit linear congruential generator with Knuth's MMIX
//! constants:
//!
//! ```text
//! state := state * 6364136223846793005 + 1442695040888963407  (mod 2^64)
//! ```
//!
//! Each `next_u64` advances the state once and returns it. Uniform doubles in
//! [0, 1) take the top 53 bits: `(x >> 11) * 2^-53`. Gaussians use the basic
//! Box–Muller transform on two fresh uniforms, one deviate per call:
//!
//! ```text
//! z = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
//! ```

const MULTIPLIER: u64 = 6364136223846793005;
const INCREMENT: u64 = 1442695040888963407;

/// Deterministic 64-bit LCG. Cheap to create; each consumer owns its own.
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    /// Seeds the generator. The seed is advanced once so that small seeds do
    /// not leak directly into the first output.
    pub fn new(seed: u64) -> Lcg64 {
        let mut rng = Lcg64 { state: seed };
        rng.next_u64();
        rng
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        self.state
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n) by modulo reduction. The tiny modulo bias is
    /// acceptable here and keeps the algorithm trivially portable.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    /// Standard normal deviate via Box–Muller.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        // 1 - u1 lies in (0, 1], keeping the log finite.
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_stream() {
        let mut a = Lcg64::new(42);
        let mut b = Lcg64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn seeds_differ() {
        let mut a = Lcg64::new(1);
        let mut b = Lcg64::new(2);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn uniforms_in_unit_interval() {
        let mut rng = Lcg64::new(7);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn gaussian_moments_are_sane() {
        let mut rng = Lcg64::new(9);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z = rng.next_gaussian();
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn next_below_stays_in_range() {
        let mut rng = Lcg64::new(3);
        for _ in 0..1000 {
            assert!(rng.next_below(3) < 3);
        }
    }
}
