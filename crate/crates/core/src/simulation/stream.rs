//! Counter-based random streams.
//!
//! Replicate `i` of a run seeded with `s` always draws from ChaCha8 stream `i`
//! of key `s`, so results do not depend on which worker ran it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for a labelled sub-run. FNV-1a over the labels, mixed with the
/// base seed; stable across platforms and releases.
pub fn derive_seed(base: u64, labels: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for label in labels {
        for b in label.bytes().chain(std::iter::once(0xff)) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    splitmix64(base ^ splitmix64(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn draws(seed: u64, index: u64) -> Vec<u64> {
        let mut r = replicate_rng(seed, index);
        (0..4).map(|_| r.random()).collect()
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        assert_eq!(draws(7, 3), draws(7, 3));
        assert_ne!(draws(7, 3), draws(7, 4));
        assert_ne!(draws(7, 3), draws(8, 3));
    }

    #[test]
    fn derived_seeds_are_pinned() {
        // FNV-1a + SplitMix64 computed independently; changing it would
        // silently change every tabulated result.
        assert_eq!(derive_seed(1, &["null", "weibull"]), 0x6710_10d0_7bac_b12f);
        assert_ne!(derive_seed(1, &["null", "weibull"]), derive_seed(1, &["nullweibull"]));
        assert_ne!(derive_seed(1, &["a"]), derive_seed(2, &["a"]));
    }
}
