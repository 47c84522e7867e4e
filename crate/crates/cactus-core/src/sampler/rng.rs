//! Seeded random source. The generator is splitmix64: tiny, splittable, and
//! stable across platforms, so identical seeds give identical sample streams
//! everywhere. Statistical heroics are out of scope; uniformity of the
//! samplers is what the chi-square tests check.

use num_bigint::BigUint;
use num_traits::Zero;

pub const RNG_ALGORITHM: &str = "splitmix64";

#[derive(Debug, Clone)]
pub struct RandomSource {
    state: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Independent child stream.
    pub fn split(&mut self) -> RandomSource {
        RandomSource::new(self.next_u64())
    }

    /// Uniform value in `0..n` by rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        if n == 1 {
            return 0;
        }
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Uniform big integer in `0..n` by rejection on the bit length of `n`.
    pub fn below_big(&mut self, n: &BigUint) -> BigUint {
        assert!(!n.is_zero(), "below_big(0)");
        let bits = n.bits();
        let words = bits.div_ceil(64) as usize;
        let top_mask = if bits % 64 == 0 {
            u64::MAX
        } else {
            (1u64 << (bits % 64)) - 1
        };
        loop {
            let mut digits: Vec<u64> = (0..words).map(|_| self.next_u64()).collect();
            if let Some(last) = digits.last_mut() {
                *last &= top_mask;
            }
            let candidate = BigUint::from_slice(
                &digits
                    .iter()
                    .flat_map(|&d| [d as u32, (d >> 32) as u32])
                    .collect::<Vec<u32>>(),
            );
            if candidate < *n {
                return candidate;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinism() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn below_in_range() {
        let mut r = RandomSource::new(7);
        for n in [1u64, 2, 3, 10, 1000] {
            for _ in 0..100 {
                assert!(r.below(n) < n);
            }
        }
    }

    #[test]
    fn below_big_in_range() {
        let mut r = RandomSource::new(9);
        let n = BigUint::from(123456789012345678901234567890u128);
        for _ in 0..50 {
            assert!(r.below_big(&n) < n);
        }
    }
}
