//! Logical error rates of the 3-repetition code from Gaussian window sums,
//! plus a sample-based estimator for arbitrary residual distributions.

use std::f64::consts::{PI, SQRT_2};

use libm::{erf, erfc};

use crate::lattice::{remainder, SQRT_PI};

/// Cutoffs for lattice sums and the numeric integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    /// Lattice sums keep every cell within this many deviations of the mean.
    pub radius_sigmas: f64,
    /// Lower bound on the lattice-sum half-range.
    pub min_cutoff: i64,
    /// Absolute tolerance for adaptive integration.
    pub tolerance: f64,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self {
            radius_sigmas: 8.0,
            min_cutoff: 5,
            tolerance: 1e-10,
        }
    }
}

impl QuadratureGrid {
    fn cutoff(&self, sigma: f64, window: f64, spacing: f64) -> i64 {
        (((self.radius_sigmas * sigma + window) / spacing).ceil() as i64 + 1).max(self.min_cutoff)
    }
}

/// Which lattice points carry a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterParity {
    /// Centers at `2 m s`.
    Even,
    /// Centers at `m s`.
    All,
}

/// Mass of `N(0, sigma^2)` in `[a, b)`, computed without cancellation in
/// the tails.
pub fn normal_interval_mass(a: f64, b: f64, sigma: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let k = 1.0 / (SQRT_2 * sigma);
    let (x, y) = (a * k, b * k);
    if x >= 0.0 {
        0.5 * (erfc(x) - erfc(y))
    } else if y <= 0.0 {
        0.5 * (erfc(-y) - erfc(-x))
    } else {
        0.5 * (erf(y) - erf(x))
    }
}

/// `Σ_c P(c − w ≤ X < c + w)` for `X ~ N(mean, sigma^2)` over the selected
/// lattice centers `c`.
pub fn gaussian_window_mass_at(mean: f64, sigma: f64, s: f64, w: f64, parity: CenterParity) -> f64 {
    let spacing = match parity {
        CenterParity::Even => 2.0 * s,
        CenterParity::All => s,
    };
    let grid = QuadratureGrid::default();
    let reach = grid.cutoff(sigma, w, spacing);
    let mid = (mean / spacing).round() as i64;
    let mut total = 0.0;
    // Sum from the outside in so small tail terms are accumulated first.
    let mut terms: Vec<f64> = ((mid - reach)..=(mid + reach))
        .map(|m| {
            let c = m as f64 * spacing - mean;
            normal_interval_mass(c - w, c + w, sigma)
        })
        .collect();
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for t in terms {
        total += t;
    }
    total.min(1.0)
}

/// [`gaussian_window_mass_at`] for a centered Gaussian.
pub fn gaussian_window_mass(sigma: f64, s: f64, w: f64, parity: CenterParity) -> f64 {
    gaussian_window_mass_at(0.0, sigma, s, w, parity)
}

/// Probability that a centered Gaussian displacement on a square qubit GKP
/// leaves no logical error: even `sqrt(pi)` windows of half-width
/// `sqrt(pi)/2`.
pub fn no_error_probability(sigma: f64) -> f64 {
    no_error_probability_at(0.0, sigma)
}

fn no_error_probability_at(mean: f64, sigma: f64) -> f64 {
    gaussian_window_mass_at(mean, sigma, SQRT_PI, 0.5 * SQRT_PI, CenterParity::Even)
}

/// Rate breakdown with the success probability of each logical quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBreakdown {
    pub rate: f64,
    pub q_correct: f64,
    pub p_correct: f64,
    /// Estimated mass dropped by lattice truncation.
    pub truncation_error: f64,
    pub warning: Option<String>,
}

/// Stabilizer-GKP 3-repetition:
/// `1 − (p0³ + 3p0(1−p0)²)(p0³ + 3p0²(1−p0))`.
pub fn scheme1_rep3_rate(sigma: f64) -> f64 {
    let p0 = no_error_probability(sigma);
    let a = p0.powi(3) + 3.0 * p0 * (1.0 - p0).powi(2);
    let b = p0.powi(3) + 3.0 * p0 * p0 * (1.0 - p0);
    (1.0 - a * b).clamp(0.0, 1.0)
}

/// GKP-analog 3-repetition: the logical q residual is the mean of three
/// displacements, the logical p residual their sum.
pub fn scheme2_rep3_breakdown(sigma: f64) -> RateBreakdown {
    let q = no_error_probability(sigma / 3f64.sqrt());
    let p = no_error_probability(sigma * 3f64.sqrt());
    RateBreakdown {
        rate: (1.0 - q * p).clamp(0.0, 1.0),
        q_correct: q,
        p_correct: p,
        truncation_error: 0.0,
        warning: None,
    }
}

pub fn scheme2_rep3_rate(sigma: f64) -> f64 {
    scheme2_rep3_breakdown(sigma).rate
}

/// GKP-stabilizer 3-repetition with canonical ancillas.
///
/// Momentum: the residual is `p1 + sqrt(2 pi)(n2 + n3)` where `n_j` is the
/// ancilla cell index of `p_j`. Position: the residual is
/// `x − (sqrt(2 pi)/3)(n_y + n_z)` with `x` the mean of the three positions
/// and `n_y`, `n_z` the cell indices of `q2 − q1`, `q3 − q1`.
pub fn scheme3_rep3_breakdown(sigma: f64, grid: QuadratureGrid) -> RateBreakdown {
    let cell = (2.0 * PI).sqrt();

    // Momentum side.
    let reach = grid.cutoff(sigma, 0.5 * cell, cell);
    let w: Vec<f64> = (-reach..=reach)
        .map(|n| normal_interval_mass((n as f64 - 0.5) * cell, (n as f64 + 0.5) * cell, sigma))
        .collect();
    let mut p_correct = 0.0;
    for (i, wi) in w.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            let t = (i + j) as i64 - 2 * reach;
            let weight = wi * wj;
            if weight < 1e-300 {
                continue;
            }
            p_correct += weight * no_error_probability_at(cell * t as f64, sigma);
        }
    }
    let w_total: f64 = w.iter().sum();
    let mut truncation = 2.0 * (1.0 - w_total).max(0.0);

    // Position side.
    let sy = SQRT_2 * sigma;
    let sc = (1.5f64).sqrt() * sigma;
    let reach_y = grid.cutoff(sy, 0.5 * cell, cell);
    let mut q_correct = 0.0;
    let mut q_total = 0.0;
    let mut worst_err: f64 = 0.0;
    for a in -reach_y..=reach_y {
        let (ylo, yhi) = ((a as f64 - 0.5) * cell, (a as f64 + 0.5) * cell);
        if normal_interval_mass(ylo, yhi, sy) < 1e-300 {
            continue;
        }
        for b in -reach_y..=reach_y {
            let (zlo, zhi) = ((b as f64 - 0.5) * cell, (b as f64 + 0.5) * cell);
            let integrand = |y: f64| {
                let density = (-(y * y) / (2.0 * sy * sy)).exp() / (sy * (2.0 * PI).sqrt());
                density * normal_interval_mass(zlo - 0.5 * y, zhi - 0.5 * y, sc)
            };
            let (mass, err) = integrate_adaptive(&integrand, ylo, yhi, grid.tolerance);
            worst_err = worst_err.max(err);
            if mass == 0.0 {
                continue;
            }
            q_total += mass;
            let shift = cell / 3.0 * (a + b) as f64;
            q_correct += mass * no_error_probability_at(shift, sigma / 3f64.sqrt());
        }
    }
    truncation += (1.0 - q_total).max(0.0) + worst_err;

    let warning = (truncation > 1e-8).then(|| format!("estimated truncation error {truncation:.2e} exceeds 1e-8"));
    RateBreakdown {
        rate: (1.0 - q_correct * p_correct).clamp(0.0, 1.0),
        q_correct: q_correct.min(1.0),
        p_correct: p_correct.min(1.0),
        truncation_error: truncation,
        warning,
    }
}

pub fn scheme3_rep3_rate(sigma: f64) -> f64 {
    scheme3_rep3_breakdown(sigma, QuadratureGrid::default()).rate
}

/// Fraction of residual samples landing in even logical windows, i.e. the
/// empirical no-error probability of one logical quadrature with logical
/// shift `shift`.
pub fn displacement_distribution_rate(samples: &[f64], shift: f64) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let ok = samples
        .iter()
        .filter(|&&x| remainder(x, 2.0 * shift).abs() < 0.5 * shift)
        .count();
    ok as f64 / samples.len() as f64
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let s = f(c - dx) + f(c + dx);
        kronrod += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive 7/15-point Gauss-Kronrod quadrature on `[a, b]` by bisection
/// until each panel's error estimate meets its share of `tol`. Returns the
/// integral and the summed error estimate.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, whole: (f64, f64), depth: u32) -> (f64, f64) {
        let (v, e) = whole;
        if e <= tol || depth >= 50 {
            return (v, e);
        }
        let m = 0.5 * (a + b);
        let left = gauss_kronrod_15(f, a, m);
        let right = gauss_kronrod_15(f, m, b);
        let (lv, le) = rec(f, a, m, 0.5 * tol, left, depth + 1);
        let (rv, re) = rec(f, m, b, 0.5 * tol, right, depth + 1);
        (lv + rv, le + re)
    }
    let whole = gauss_kronrod_15(f, a, b);
    rec(f, a, b, tol, whole, 0)
}
