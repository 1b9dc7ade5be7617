//! Counter-based random numbers: every draw is a pure function of its key, so
//! results never depend on evaluation order or thread count.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64 random bits keyed by `(seed, index, entry)`.
#[inline]
pub fn counter_bits(seed: u64, index: u64, entry: u64) -> u64 {
    let a = mix(seed.wrapping_add(GOLDEN));
    let b = mix(a ^ index.wrapping_mul(GOLDEN).wrapping_add(0x632B_E59B_D9B4_E019));
    mix(b ^ entry.wrapping_mul(0xD6E8_FEB8_6659_FD93).wrapping_add(GOLDEN))
}

/// Uniform draw in `[0, 1)` keyed by `(seed, index, entry)`.
#[inline]
pub fn counter_uniform(seed: u64, index: u64, entry: u64) -> f64 {
    (counter_bits(seed, index, entry) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal draw keyed by `(seed, index, entry)` (Box-Muller).
pub fn counter_normal(seed: u64, index: u64, entry: u64) -> f64 {
    let u1 = counter_uniform(seed, index, 2 * entry);
    let u2 = counter_uniform(seed, index, 2 * entry + 1);
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    r * (2.0 * std::f64::consts::PI * u2).cos()
}
