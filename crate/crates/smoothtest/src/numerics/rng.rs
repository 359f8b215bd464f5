//! Counter-based random number streams.
//!
//! A stream is a pure function of `(seed, stream_id, counter)`, so identical
//! parameters reproduce identical sequences bit-for-bit regardless of thread
//! count or call site. Parallel code never shares a stream: each replicate
//! derives its own child stream by index.

/// splitmix64 finalizer; full-avalanche mixing of a 64-bit word.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// A seeded, counter-based random stream.
///
/// Output `i` of a stream is `mix(base + i * GOLDEN)` where `base` mixes the
/// seed and the stream id, i.e. splitmix64 with a per-stream start state.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    base: u64,
    counter: u64,
    spare_gaussian: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let base = mix(seed ^ mix(stream_id.wrapping_mul(GOLDEN) ^ 0x5851_f42d_4c95_7f2d));
        RngStream {
            seed,
            stream_id,
            base,
            counter: 0,
            spare_gaussian: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A child stream addressed by `index`. Derivation depends only on
    /// `(seed, stream_id, index)`, never on how much of the parent has been
    /// consumed, so replicate `i` sees the same stream at any parallelism
    /// width.
    pub fn derive(&self, index: u64) -> RngStream {
        let child = mix(self.stream_id ^ GOLDEN.wrapping_mul(index.wrapping_add(1)));
        RngStream::new(self.seed, child)
    }

    fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.base.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform variate in [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate by the polar (Marsaglia) method, caching the
    /// spare deviate of each accepted pair.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(g) = self.spare_gaussian.take() {
            return g;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare_gaussian = Some(v * f);
                return u * f;
            }
        }
    }

    /// `n` gaussian variates appended into a fresh vector.
    pub fn gaussian_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.gaussian()).collect()
    }

    /// Uniform integer in [0, bound). The modulo bias is ~bound/2^64 and
    /// irrelevant at the sizes used here.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        (self.next_u64() % bound as u64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_bit_for_bit() {
        let mut a = RngStream::new(42, 7);
        let mut b = RngStream::new(42, 7);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut a = RngStream::new(42, 7);
        let mut b = RngStream::new(42, 7);
        for _ in 0..1000 {
            assert!(a.gaussian() == b.gaussian());
        }
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 1);
        let collisions = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(collisions, 0);
    }

    #[test]
    fn derive_is_counter_independent() {
        let parent = RngStream::new(9, 3);
        let mut consumed = parent.clone();
        for _ in 0..17 {
            consumed.uniform();
        }
        let mut c1 = parent.derive(5);
        let mut c2 = consumed.derive(5);
        for _ in 0..100 {
            assert_eq!(c1.next_u64(), c2.next_u64());
        }
    }

    #[test]
    fn uniform_range_and_moments() {
        let mut s = RngStream::new(2024, 0);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        let mean = sum / n as f64;
        // 4 standard errors of a mean of U(0,1)
        let band = 4.0 * (1.0 / 12.0_f64).sqrt() / (n as f64).sqrt();
        assert!((mean - 0.5).abs() < band, "mean {mean}");
    }

    #[test]
    fn gaussian_moments() {
        let mut s = RngStream::new(2024, 1);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let g = s.gaussian();
            sum += g;
            sumsq += g * g;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
        // se of the sample variance of a normal is sqrt(2/n)
        assert!((var - 1.0).abs() < 4.0 * (2.0 / n as f64).sqrt(), "var {var}");
    }

    #[test]
    fn equidistribution_across_streams() {
        // 16-bin chi-square on two sibling streams plus cross-correlation;
        // a crude independence check, not a PRNG test battery.
        let n = 40_000;
        let parent = RngStream::new(7, 0);
        let mut s1 = parent.derive(0);
        let mut s2 = parent.derive(1);
        let mut bins = [0usize; 16];
        let mut cross = 0.0;
        for _ in 0..n {
            let u1 = s1.uniform();
            let u2 = s2.uniform();
            bins[(u1 * 16.0) as usize] += 1;
            bins[(u2 * 16.0) as usize] += 1;
            cross += (u1 - 0.5) * (u2 - 0.5);
        }
        let expect = (2 * n) as f64 / 16.0;
        let chi2: f64 = bins
            .iter()
            .map(|&c| {
                let d = c as f64 - expect;
                d * d / expect
            })
            .sum();
        // chi^2_15 at the 1e-6 level is ~ 55
        assert!(chi2 < 55.0, "chi2 = {chi2}");
        let corr = cross / n as f64 / (1.0 / 12.0);
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "corr = {corr}");
    }
}
