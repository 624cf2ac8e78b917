//! Binary erasure channel.
//!
//! Each use draws exactly one uniform and erases iff it falls below `epsilon`.
//! The number of draws never depends on `epsilon` or on the transmitted bit,
//! so two runs from the same rng state at different `epsilon` see coupled
//! erasure events (common random numbers).

use rand::Rng;
use thiserror::Error;

pub use crate::bitlinalg::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("erasure probability {0} is outside [0, 1)")]
pub struct InvalidErasureProbability(pub f64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    epsilon: f64,
}

impl ChannelParams {
    pub fn new(epsilon: f64) -> Result<Self, InvalidErasureProbability> {
        if (0.0..1.0).contains(&epsilon) {
            Ok(Self { epsilon })
        } else {
            Err(InvalidErasureProbability(epsilon))
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

#[inline]
fn erased(ch: ChannelParams, rng: &mut impl Rng) -> bool {
    rng.random::<f64>() < ch.epsilon
}

/// True iff `t` independent uses all erase. Always consumes `t` draws.
#[inline]
pub fn repeated_erasure(t: u32, ch: ChannelParams, rng: &mut impl Rng) -> bool {
    debug_assert!(t >= 1);
    let mut all = true;
    for _ in 0..t {
        all &= erased(ch, rng);
    }
    all
}

pub fn transmit(bit: bool, ch: ChannelParams, rng: &mut impl Rng) -> Symbol {
    if erased(ch, rng) {
        Symbol::Erased
    } else {
        Symbol::from_bit(bit)
    }
}

/// Sends `bit` `t` times; the receiver sees `e` only if every copy is lost.
pub fn transmit_repeated(bit: bool, t: u32, ch: ChannelParams, rng: &mut impl Rng) -> Symbol {
    assert!(t >= 1, "at least one transmission is required");
    if repeated_erasure(t, ch, rng) {
        Symbol::Erased
    } else {
        Symbol::from_bit(bit)
    }
}

/// `t` broadcast rounds of `bit` to every out-neighbour. Each directed edge is
/// its own erasure channel. Returns `(target, received)` in the order of
/// `targets`.
pub fn broadcast_round_set(
    bit: bool,
    targets: impl IntoIterator<Item = usize>,
    t: u32,
    ch: ChannelParams,
    rng: &mut impl Rng,
) -> Vec<(usize, Symbol)> {
    targets
        .into_iter()
        .map(|v| (v, transmit_repeated(bit, t, ch, rng)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TRIALS: usize = 100_000;

    fn three_sigma(p: f64, n: usize) -> f64 {
        3.0 * (p * (1.0 - p) / n as f64).sqrt()
    }

    fn erasure_rate(mut f: impl FnMut() -> Symbol) -> f64 {
        (0..TRIALS).filter(|_| f().is_erased()).count() as f64 / TRIALS as f64
    }

    #[test]
    fn params_validated() {
        assert!(ChannelParams::new(1.0).is_err());
        assert!(ChannelParams::new(-0.1).is_err());
        assert!(ChannelParams::new(f64::NAN).is_err());
        assert!(ChannelParams::new(0.0).is_ok());
    }

    #[test]
    fn noiseless_channel_is_identity() {
        let ch = ChannelParams::new(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for i in 0..1000 {
            let bit = i % 3 == 0;
            assert_eq!(transmit(bit, ch, &mut rng), Symbol::from_bit(bit));
            assert_eq!(transmit_repeated(bit, 5, ch, &mut rng), Symbol::from_bit(bit));
        }
    }

    #[test]
    fn erasure_frequency_matches_epsilon() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for eps in [0.5, 0.999] {
            let ch = ChannelParams::new(eps).unwrap();
            let rate = erasure_rate(|| transmit(true, ch, &mut rng));
            assert!((rate - eps).abs() < three_sigma(eps, TRIALS), "eps {eps} rate {rate}");
        }
    }

    #[test]
    fn outputs_never_flip() {
        let ch = ChannelParams::new(0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..10_000 {
            let bit = i % 2 == 0;
            let s = transmit_repeated(bit, 2, ch, &mut rng);
            assert!(s == Symbol::from_bit(bit) || s.is_erased());
        }
    }

    #[test]
    fn repetition_erases_with_epsilon_to_the_t() {
        let ch = ChannelParams::new(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rate = erasure_rate(|| transmit_repeated(false, 3, ch, &mut rng));
        assert!((rate - 0.125).abs() < three_sigma(0.125, TRIALS), "rate {rate}");
    }

    #[test]
    fn single_round_equals_transmit() {
        let ch = ChannelParams::new(0.3).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(4);
        let mut b = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            assert_eq!(transmit(true, ch, &mut a), transmit_repeated(true, 1, ch, &mut b));
        }
    }

    #[test]
    fn erasure_independent_of_bit() {
        let ch = ChannelParams::new(0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r0 = erasure_rate(|| transmit(false, ch, &mut rng));
        let r1 = erasure_rate(|| transmit(true, ch, &mut rng));
        let sigma_diff = (2.0 * 0.3 * 0.7 / TRIALS as f64).sqrt();
        assert!((r0 - r1).abs() < 3.0 * sigma_diff);
    }

    #[test]
    fn broadcast_edge_cases() {
        let ch = ChannelParams::new(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert!(broadcast_round_set(true, std::iter::empty(), 3, ch, &mut rng).is_empty());

        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let out = broadcast_round_set(true, [2], 3, ch, &mut a);
            assert_eq!(out, vec![(2, transmit_repeated(true, 3, ch, &mut b))]);
        }
    }

    #[test]
    fn broadcast_edges_are_uncorrelated() {
        let ch = ChannelParams::new(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
        for _ in 0..TRIALS {
            let out = broadcast_round_set(false, [0, 1], 1, ch, &mut rng);
            let a = f64::from(u8::from(out[0].1.is_erased()));
            let b = f64::from(u8::from(out[1].1.is_erased()));
            sa += a;
            sb += b;
            sab += a * b;
        }
        let n = TRIALS as f64;
        let cov = sab / n - (sa / n) * (sb / n);
        let corr = cov / 0.25;
        // Under independence the sample correlation has standard error ~ 1/sqrt(n).
        assert!(corr.abs() < 3.0 / n.sqrt(), "corr {corr}");
    }
}
