//! Centered modular remainders and GKP lattice periods.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `sqrt(pi)`, the qubit GKP logical shift.
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// `R_s(x) = x - s * round(x / s)`, landing in `[-s/2, s/2)`.
///
/// Ties go to `-s/2`. `s` must be positive; see [`checked_remainder`].
#[inline]
pub fn remainder(x: f64, s: f64) -> f64 {
    debug_assert!(s > 0.0);
    let mut r = x - s * (x / s + 0.5).floor();
    // Floating round-off can leave r a hair outside the window.
    let half = 0.5 * s;
    if r >= half {
        r -= s;
    } else if r < -half {
        r += s;
    }
    r
}

pub fn checked_remainder(x: f64, s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Period(s));
    }
    Ok(remainder(x, s))
}

pub fn remainder_vec(v: &[f64], s: f64) -> Result<Vec<f64>> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Period(s));
    }
    Ok(v.iter().map(|&x| remainder(x, s)).collect())
}

/// True iff `|R_{2 sqrt(pi)}(x)| >= sqrt(pi)/2`, i.e. the residual shift
/// lands in an odd logical window.
#[inline]
pub fn is_logical_error(x: f64) -> bool {
    remainder(x, 2.0 * SQRT_PI).abs() >= 0.5 * SQRT_PI
}

/// Per-entry logical flags for a residual `(q1..qk, p1..pk)` on square qubit
/// GKP modes.
pub fn logical_error_flags(residual: &[f64]) -> Vec<bool> {
    residual.iter().map(|&x| is_logical_error(x)).collect()
}

/// Rectangular GKP lattice with stabilizer periods `sqrt(2 pi alpha)` in q and
/// `sqrt(2 pi / alpha)` in p. `alpha = 2` is the square qubit code, `alpha = 1`
/// the canonical single-state code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkpLattice {
    pub alpha: f64,
}

impl GkpLattice {
    pub const SQUARE_QUBIT: GkpLattice = GkpLattice { alpha: 2.0 };
    pub const CANONICAL: GkpLattice = GkpLattice { alpha: 1.0 };

    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("lattice alpha must be positive, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn q_period(&self) -> f64 {
        (2.0 * PI * self.alpha).sqrt()
    }

    pub fn p_period(&self) -> f64 {
        (2.0 * PI / self.alpha).sqrt()
    }

    /// Syndrome periods when the mode carries a qubit: the logical X shift
    /// halves the q period.
    pub fn qubit_syndrome_periods(&self) -> (f64, f64) {
        (0.5 * self.q_period(), self.p_period())
    }

    /// Logical shift sizes `(q, p)` of a qubit on this lattice.
    pub fn qubit_logical_shifts(&self) -> (f64, f64) {
        self.qubit_syndrome_periods()
    }
}

/// Lattice carried by a mode before encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeLattice {
    /// A qubit GKP mode (logical modes, or every mode in the stabilizer-GKP scheme).
    Qubit(GkpLattice),
    /// A single-state GKP ancilla.
    Ancilla(GkpLattice),
    /// The infinitely squeezed position-eigenstate limit: no p syndrome and an
    /// unreduced q syndrome.
    PositionEigenstate,
}

/// Logical error test for a residual on qubit modes with shifts `(lq, lp)`:
/// flag iff the residual lies in an odd window of the corresponding logical
/// shift.
#[inline]
pub fn is_logical_error_with_shift(x: f64, shift: f64) -> bool {
    remainder(x, 2.0 * shift).abs() >= 0.5 * shift
}
