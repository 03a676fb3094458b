//! Seeded sampling of rational points on fixed denominator grids.
//!
//! Sampling never touches floating point: a sample is a uniformly chosen
//! integer numerator over a fixed denominator, so runs are reproducible
//! bit-for-bit across platforms for a given seed.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::BoxDomain;
use crate::rational::Rational;

/// Default grid denominator for sampled points.
pub const DEFAULT_DENOMINATOR: u64 = 64;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample from `{k/denom : lo <= k/denom <= hi}`.
///
/// Panics if the interval contains no grid point scaled by `denom`
/// (impossible for `lo <= hi` with `denom >= 1` only when the interval is
/// shorter than a grid step and straddles no grid point).
pub fn sample_rational<R: Rng>(rng: &mut R, lo: &Rational, hi: &Rational, denom: u64) -> Rational {
    let d = BigInt::from(denom);
    let k_lo = (lo * Rational::from_integer(d.clone())).ceil().to_integer();
    let k_hi = (hi * Rational::from_integer(d.clone())).floor().to_integer();
    let k_lo = k_lo.to_i128().expect("grid bound fits in i128");
    let k_hi = k_hi.to_i128().expect("grid bound fits in i128");
    assert!(k_lo <= k_hi, "no grid point of denominator {denom} in [{lo}, {hi}]");
    let k = rng.gen_range(k_lo..=k_hi);
    Rational::new(BigInt::from(k), d)
}

/// Uniform sample from the grid points of a box.
pub fn sample_point<R: Rng>(rng: &mut R, domain: &BoxDomain, denom: u64) -> Vec<Rational> {
    domain
        .lo()
        .iter()
        .zip(domain.hi())
        .map(|(l, h)| sample_rational(rng, l, h, denom))
        .collect()
}
