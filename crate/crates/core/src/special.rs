//! Bernoulli function, weight function and the constant-coefficient Green's
//! function for the flux.
//!
//! `B(z) = z / (e^z - 1)` and `W(z) = (1 - B(z)) / z`. Both have removable
//! singularities at zero and lose accuracy under the direct formula for small
//! `|z|`, so each switches to a truncated series near the origin. For large
//! `|z|` the exponential is either negligible or handled through the identity
//! `B(-z) = z + B(z)`.

use crate::error::{Error, Result};
use libm::{exp, expm1, log, log1p};

/// Below this `|z|` the Bernoulli function uses its Taylor series.
const BERNOULLI_SERIES_CUTOFF: f64 = 1e-4;
/// Below this `|z|` the weight function uses its Taylor series. The direct
/// formula `(1 - B)/z` cancels to roughly `2e-16 / |z|` relative accuracy.
const WEIGHT_SERIES_CUTOFF: f64 = 0.5;
/// Beyond this `|z|` the asymptotic forms are exact to double precision.
const ASYMPTOTIC_CUTOFF: f64 = 35.0;

/// Odd Taylor coefficients of `1/2 - W(z)`, i.e. `B_{2k} / (2k)!` for
/// `k = 1..=7` (coefficients of `z, z^3, ..., z^13`).
const HALF_MINUS_WEIGHT_SERIES: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
];

/// Bernoulli function `B(z) = z / (e^z - 1)`, with `B(0) = 1`.
pub fn bernoulli(z: f64) -> f64 {
    let abs = z.abs();
    if abs < BERNOULLI_SERIES_CUTOFF {
        let z2 = z * z;
        1.0 - 0.5 * z + z2 / 12.0 - z2 * z2 / 720.0
    } else if abs <= ASYMPTOTIC_CUTOFF {
        z / expm1(z)
    } else if z > 0.0 {
        // underflows to zero gracefully
        z * exp(-z)
    } else {
        -z + bernoulli(-z)
    }
}

/// `1/2 - W(z)`. Positive for `z > 0`, negative for `z < 0`, zero at zero.
pub fn half_minus_weight(z: f64) -> f64 {
    if z.abs() < WEIGHT_SERIES_CUTOFF {
        let z2 = z * z;
        let mut acc = 0.0;
        for c in HALF_MINUS_WEIGHT_SERIES.iter().rev() {
            acc = acc * z2 + c;
        }
        acc * z
    } else {
        0.5 - (1.0 - bernoulli(z)) / z
    }
}

/// Weight function `W(z) = (e^z - 1 - z) / (z (e^z - 1))`, with `W(0) = 1/2`.
/// Always in `[0, 1]`.
pub fn weight(z: f64) -> f64 {
    if z.abs() < WEIGHT_SERIES_CUTOFF {
        0.5 - half_minus_weight(z)
    } else {
        (1.0 - bernoulli(z)) / z
    }
}

/// `(1/2 - W(z)) / z`, continuous through `z = 0` where it equals `1/12`.
pub fn half_minus_weight_over_z(z: f64) -> f64 {
    if z == 0.0 {
        HALF_MINUS_WEIGHT_SERIES[0]
    } else {
        half_minus_weight(z) / z
    }
}

/// `ln B(z)`, finite for all finite `z` (no underflow for large positive `z`).
pub fn ln_bernoulli(z: f64) -> f64 {
    if z.abs() <= ASYMPTOTIC_CUTOFF {
        log(bernoulli(z))
    } else if z > 0.0 {
        // B(z) = z e^{-z} / (1 - e^{-z})
        log(z) - z - log1p(-exp(-z))
    } else {
        log(bernoulli(z))
    }
}

/// Which one-sided limit to take where the flux Green's function jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenSide {
    /// `sigma -> 1/2` from below (branch valid on `[0, 1/2]`).
    Left,
    /// `sigma -> 1/2` from above (branch valid on `[1/2, 1]`).
    Right,
}

/// Green's function for the flux with constant Péclet number `p`:
///
/// ```text
/// G(sigma; P) =  (1 - e^{-P sigma}) / (1 - e^{-P}),        0 <= sigma <= 1/2
/// G(sigma; P) = -(1 - e^{P (1 - sigma)}) / (1 - e^{P}),    1/2 <= sigma <= 1
/// ```
///
/// `side` is only consulted at `sigma == 0.5`, where `G` has a unit jump.
/// At `p == 0` the continuous limit (`sigma` or `sigma - 1`) is returned.
pub fn green_flux(sigma: f64, p: f64, side: GreenSide) -> Result<f64> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::SigmaOutOfRange { sigma });
    }
    let left = sigma < 0.5 || (sigma == 0.5 && side == GreenSide::Left);
    Ok(if left {
        green_left(sigma, p)
    } else {
        -green_left(1.0 - sigma, -p)
    })
}

/// `(1 - e^{-P s}) / (1 - e^{-P})` for `s` in `[0, 1]`, without overflow.
fn green_left(s: f64, p: f64) -> f64 {
    if p == 0.0 {
        return s;
    }
    if p > 0.0 {
        expm1(-p * s) / expm1(-p)
    } else {
        // rescale by e^{|P|} so that only non-positive exponents appear
        let a = -p;
        exp(a * (s - 1.0)) * (expm1(-a * s) / expm1(-a))
    }
}
