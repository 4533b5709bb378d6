//! Lacunary boundary data of prescribed smoothness: a Weierstrass-type
//! cosine series over the octave frequencies. Such a function lies in the
//! Holder class of exponent `alpha` and in no better one, which makes it the
//! sharp probe for how the solver behaves at the edge of its hypotheses.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boundary::BoundaryFunction;
use crate::error::{Error, Result};

/// `H(theta) = sum_j 2^{-alpha j} cos(2^j theta + phase_j)` truncated to
/// frequencies `2^j <= modes`, with seeded phases.
pub fn holder_boundary(alpha: f64, modes: usize, seed: u64) -> Result<BoundaryFunction> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidParam {
            name: "alpha",
            value: alpha,
            reason: "holder exponent must lie in (0, 1)",
        });
    }
    if modes < 1 {
        return Err(Error::InvalidParam {
            name: "modes",
            value: modes as f64,
            reason: "need at least one frequency",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    let mut j = 0u32;
    while (1usize << j) <= modes {
        let freq = 1i64 << j;
        let amp = 0.5 * 2f64.powf(-alpha * j as f64);
        let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        // cos(k theta + phase) = (e^{i phase} e^{ik theta} + c.c.) / 2
        pairs.push((freq, Complex64::from_polar(amp, phase)));
        pairs.push((-freq, Complex64::from_polar(amp, -phase)));
        j += 1;
    }
    BoundaryFunction::from_modes(modes, &pairs)
}
