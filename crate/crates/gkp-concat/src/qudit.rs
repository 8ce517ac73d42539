//! Two-qudit GKP-repetition code at the level of Pauli exponents.
//!
//! The data qudit is copied onto an ancilla qudit-GKP state (stabilised by
//! `X^r`, `Z^r`) with a CNOT, hit by `X₁^{a₁} Z₁^{c₁} X₂^{a₂} Z₂^{c₂}`, and
//! decoded with the inverse CNOT. That leaves the data with
//! `X^{a₁} Z^{c₁+c₂}` and the ancilla shifted by `a₂ − a₁` with phase `c₂`,
//! both readable modulo `r`.

use crate::error::{Error, Result};
use crate::noise::NoiseStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuditParams {
    d: i64,
    r: i64,
}

impl QuditParams {
    /// Requires `d ≥ 2`, `r ≥ 1`, `r | d` and `r² ≡ 0 (mod d)`.
    pub fn new(d: i64, r: i64) -> Result<Self> {
        if d < 2 || r < 1 || d % r != 0 || (r * r) % d != 0 {
            return Err(Error::QuditParams { d, r });
        }
        Ok(Self { d, r })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    /// Representative of `x mod d` in `(−d/2, d/2]`.
    pub fn center(&self, x: i64) -> i64 {
        center(x, self.d)
    }

    /// Syndrome value `x mod r` read in the window `(−r/2, r/2]`.
    pub fn syndrome(&self, x: i64) -> i64 {
        center(x, self.r)
    }

    /// Whether `x` (taken mod `d`, centred) lies strictly inside `r/2`.
    pub fn in_window(&self, x: i64) -> bool {
        2 * self.center(x).abs() < self.r
    }
}

fn center(x: i64, m: i64) -> i64 {
    let y = x.rem_euclid(m);
    if 2 * y > m {
        y - m
    } else {
        y
    }
}

/// Pauli exponents `(a₁, c₁, a₂, c₂)` stored modulo `d` in `[0, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuditError {
    pub a1: i64,
    pub c1: i64,
    pub a2: i64,
    pub c2: i64,
}

impl QuditError {
    pub fn new(params: &QuditParams, a1: i64, c1: i64, a2: i64, c2: i64) -> Self {
        let d = params.d;
        Self {
            a1: a1.rem_euclid(d),
            c1: c1.rem_euclid(d),
            a2: a2.rem_euclid(d),
            c2: c2.rem_euclid(d),
        }
    }
}

/// Outcome of one encode, error, decode and recovery round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuditOutcome {
    /// Ancilla X syndrome, estimate of `a₂ − a₁`.
    pub x_syndrome: i64,
    /// Ancilla Z syndrome, estimate of `c₂`.
    pub z_syndrome: i64,
    /// Data X exponent after applying `X^{half(x_syndrome)}`, centred mod d.
    pub x_residual: i64,
    /// Same with the exact half-integer correction.
    pub x_residual_continuum: f64,
    /// Data Z exponent after applying `Z^{−z_syndrome}`, centred mod d.
    pub z_residual: i64,
    /// Part of `z_residual` propagated from the ancilla error: `c₂ − ĉ₂`.
    pub z_leak: i64,
    /// Both true ancilla exponents were strictly inside `r/2`.
    pub recovered: bool,
}

/// Nearest integer to `s/2`, ties toward zero.
pub fn half(s: i64) -> i64 {
    // Integer division truncates toward zero, which is the tie rule.
    s / 2
}

pub fn qudit_round(params: &QuditParams, err: &QuditError) -> QuditOutcome {
    let shift = err.a2 - err.a1;
    let x_syndrome = params.syndrome(shift);
    let z_syndrome = params.syndrome(err.c2);
    let a1 = params.center(err.a1);
    let z_leak = params.center(err.c2 - z_syndrome);
    QuditOutcome {
        x_syndrome,
        z_syndrome,
        x_residual: params.center(a1 + half(x_syndrome)),
        x_residual_continuum: a1 as f64 + x_syndrome as f64 / 2.0,
        z_residual: params.center(err.c1 + err.c2 - z_syndrome),
        z_leak,
        recovered: params.in_window(shift) && params.in_window(err.c2),
    }
}

/// Exhaustive sweep over every error whose ancilla exponents are inside
/// the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepSummary {
    pub cases: u64,
    pub recovered: u64,
    /// Cases where the ancilla Z error leaked onto the data.
    pub z_leaks: u64,
    /// Cases where the X syndrome differs from the true centred `a₂ − a₁`.
    pub x_syndrome_mismatches: u64,
}

pub fn sweep(params: &QuditParams) -> SweepSummary {
    let d = params.d;
    let mut s = SweepSummary::default();
    for a1 in 0..d {
        for a2 in 0..d {
            if !params.in_window(a2 - a1) {
                continue;
            }
            for c2 in 0..d {
                if !params.in_window(c2) {
                    continue;
                }
                for c1 in 0..d {
                    let o = qudit_round(params, &QuditError::new(params, a1, c1, a2, c2));
                    s.cases += 1;
                    s.recovered += o.recovered as u64;
                    s.z_leaks += (o.z_leak != 0) as u64;
                    s.x_syndrome_mismatches += (o.x_syndrome != params.center(a2 - a1)) as u64;
                }
            }
        }
    }
    s
}

/// X-residual statistics over i.i.d. rounded-Gaussian exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub draws: u64,
    pub recovered: u64,
    pub var_a1: f64,
    /// Variance of the integer-bookkeeping X residual.
    pub var_residual: f64,
    /// Variance of the half-integer X residual.
    pub var_residual_continuum: f64,
}

impl SampleSummary {
    pub fn ratio(&self) -> f64 {
        self.var_residual / self.var_a1
    }

    pub fn ratio_continuum(&self) -> f64 {
        self.var_residual_continuum / self.var_a1
    }
}

fn variance(sum: f64, sq: f64, n: f64) -> f64 {
    let mean = sum / n;
    (sq / n - mean * mean) * n / (n - 1.0)
}

pub fn sample(params: &QuditParams, sigma: f64, draws: u64, seed: u64) -> Result<SampleSummary> {
    if !(sigma > 0.0) || draws < 2 {
        return Err(Error::Parameter("need sigma > 0 and at least two draws".into()));
    }
    let mut rng = NoiseStream::new(seed, 0);
    let draw = |rng: &mut NoiseStream| (sigma * rng.standard_normal()).round() as i64;
    let (mut s0, mut q0, mut s1, mut q1, mut s2, mut q2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let mut recovered = 0;
    for _ in 0..draws {
        let (a1, c1, a2, c2) = (draw(&mut rng), draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let o = qudit_round(params, &QuditError::new(params, a1, c1, a2, c2));
        recovered += o.recovered as u64;
        let a = params.center(a1) as f64;
        let x = o.x_residual as f64;
        let xc = o.x_residual_continuum;
        s0 += a;
        q0 += a * a;
        s1 += x;
        q1 += x * x;
        s2 += xc;
        q2 += xc * xc;
    }
    let n = draws as f64;
    Ok(SampleSummary {
        draws,
        recovered,
        var_a1: variance(s0, q0, n),
        var_residual: variance(s1, q1, n),
        var_residual_continuum: variance(s2, q2, n),
    })
}
