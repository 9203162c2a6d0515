//! Seeded random substreams.
//!
//! Every stochastic routine draws sample `i` from its own ChaCha stream derived
//! from `(seed, tag, i)`, so results do not depend on how work is scheduled
//! across threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent generator for item `index` of the stream labelled `tag`.
pub fn substream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(tag)));
    rng.set_stream(index);
    rng
}

/// Derive a child seed, e.g. one per radius of a ladder.
pub fn child_seed(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix(splitmix(seed ^ splitmix(tag)).wrapping_add(index))
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniform point on the unit sphere of C^n (Haar direction).
pub fn unit_sphere<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let norm = crate::linalg::norm(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Uniform point in the ball of radius `r` in C^n (real dimension 2n).
pub fn uniform_ball<R: Rng + ?Sized>(rng: &mut R, n: usize, r: f64) -> Vec<Complex64> {
    let dir = unit_sphere(rng, n);
    let u: f64 = rng.random::<f64>();
    let rho = r * u.powf(1.0 / (2 * n) as f64);
    dir.into_iter().map(|c| c * rho).collect()
}

pub const TAG_SAMPLE: u64 = 1;
pub const TAG_SLICE: u64 = 2;
pub const TAG_UNITARY: u64 = 3;
pub const TAG_CALIBRATION: u64 = 4;
pub const TAG_PROJECTIVE: u64 = 5;
pub const TAG_LADDER: u64 = 6;
pub const TAG_NODES: u64 = 7;
