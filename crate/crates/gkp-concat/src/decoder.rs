//! Two-layer maximum-likelihood decoders and the least-norm linear algebra
//! they share.
//!
//! [`Decoder`] precomputes every operator a code needs once; its
//! [`Decoder::run`] path is allocation-free and is what the Monte Carlo
//! harness calls. [`Decoder::decode`] additionally rebuilds the full residual
//! vector and syndrome record for inspection.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::codes::{CodeFamily, CodeInstance, PauliStabilizer, Scheme, SyndromeTable};
use crate::error::{Error, Result};
use crate::lattice::{is_logical_error_with_shift, remainder, ModeLattice, SQRT_PI};
use crate::linalg::{gram_inverse, FlatMatrix};
use crate::symplectic::{reduce_generator_rows, vstack};

/// `ξ* = Aᵀ (A Aᵀ)⁻¹ z`, the shortest `ξ` with `A ξ = z`.
pub fn least_norm_solve(a: &DMatrix<f64>, z: &DVector<f64>) -> Result<DVector<f64>> {
    if z.len() != a.nrows() {
        return Err(Error::Dimension {
            expected: a.nrows(),
            got: z.len(),
        });
    }
    Ok(pseudo_inverse(a)? * z)
}

/// `P = I − Aᵀ (A Aᵀ)⁻¹ A`, the orthogonal projector onto `ker A`.
pub fn kernel_projection(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let c = a.ncols();
    Ok(DMatrix::identity(c, c) - pseudo_inverse(a)? * a)
}

/// Right pseudo-inverse `Aᵀ (A Aᵀ)⁻¹` of a full-row-rank matrix.
pub fn pseudo_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(a.transpose() * gram_inverse(a)?)
}

/// Syndromes seen by one decode.
#[derive(Debug, Clone, PartialEq)]
pub struct SyndromeRecord {
    /// Scheme I: per-mode GKP remainders (2n). Scheme II: unreduced nullifier
    /// values (n−k). Scheme III: generator remainders (2(n−k)).
    pub layer1: Vec<f64>,
    /// Period of each `layer1` entry; infinite for unreduced entries.
    pub layer1_periods: Vec<f64>,
    /// Scheme I: qubit stabilizer values ±1. Otherwise the 2k logical GKP
    /// remainders.
    pub layer2: Vec<f64>,
    /// Period of each `layer2` entry; empty for scheme I.
    pub layer2_periods: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Residual noise after decoding, expressed in the decoded frame
    /// `A_enc (ξ − correction)`; the logical rows come first in each half.
    pub residual: Vec<f64>,
    /// Logical entries `(q1..qk, p1..pk)` of `residual`.
    pub logical: Vec<f64>,
    /// Logical residual after the first layer only.
    pub layer1_logical: Vec<f64>,
    pub flags: Vec<bool>,
    pub syndromes: SyndromeRecord,
}

impl DecodeResult {
    pub fn logical_error(&self) -> bool {
        self.flags.iter().any(|&f| f)
    }
}

/// Scratch buffers for [`Decoder::run`].
#[derive(Debug, Clone)]
pub struct Workspace {
    layer1: Vec<f64>,
    ints: Vec<i64>,
    ints_out: Vec<i64>,
    syndrome_bits: u64,
    layer1_logical: Vec<f64>,
    layer2: Vec<f64>,
    logical: Vec<f64>,
}

impl Workspace {
    /// Logical residual before the logical GKP recovery.
    pub fn layer1_logical(&self) -> &[f64] {
        &self.layer1_logical
    }

    /// Logical residual after the full decode.
    pub fn logical(&self) -> &[f64] {
        &self.logical
    }
}

#[derive(Debug, Clone)]
struct Scheme1Plan {
    /// Physical-to-square-frame factor per quadrature.
    scale: Vec<f64>,
    stabilizers: Vec<PauliStabilizer>,
    table: SyndromeTable,
    /// Row-major integer encoder.
    encoder: Vec<i64>,
}

#[derive(Debug, Clone)]
struct Scheme2Plan {
    a1: FlatMatrix,
    /// `A₂ P⊥`.
    logical_op: FlatMatrix,
    a1_pinv: DMatrix<f64>,
    /// `P⊥ Mᵀ (M Mᵀ)⁻¹` with `M = A₂ P⊥`.
    correction: DMatrix<f64>,
}

#[derive(Debug, Clone)]
struct Scheme3Plan {
    /// Generator rows in units where every syndrome has period `sqrt(2 pi)`.
    generators: FlatMatrix,
    a2: FlatMatrix,
    /// `A₂ H⁺`.
    coupling: FlatMatrix,
    pinv: DMatrix<f64>,
    /// `A₂ᵀ (A₂ A₂ᵀ)⁻¹`.
    a2_pinv: DMatrix<f64>,
}

#[derive(Debug, Clone)]
struct UnbiasedPlan {
    pairs: usize,
}

#[derive(Debug, Clone)]
enum Plan {
    I(Scheme1Plan),
    II(Scheme2Plan),
    III(Scheme3Plan),
    Unbiased(UnbiasedPlan),
}

/// Precomputed decoder for one code instance.
#[derive(Debug, Clone)]
pub struct Decoder {
    n: usize,
    k: usize,
    scheme: Scheme,
    encoder: DMatrix<f64>,
    /// Logical shift size per logical entry.
    shifts: Vec<f64>,
    plan: Plan,
}

fn sqrt_2pi() -> f64 {
    (2.0 * PI).sqrt()
}

impl Decoder {
    pub fn new(code: &CodeInstance) -> Result<Self> {
        Self::with_plan(code, None)
    }

    /// Scheme III decoder that ignores any closed-form specialisation the
    /// code offers.
    pub fn generic(code: &CodeInstance) -> Result<Self> {
        Self::with_plan(code, Some(false))
    }

    fn with_plan(code: &CodeInstance, special: Option<bool>) -> Result<Self> {
        let (n, k) = (code.n, code.k);
        let logical = match code.lattices[0] {
            ModeLattice::Qubit(l) => l,
            _ => return Err(Error::InvalidSpec("logical mode must carry a qubit lattice".into())),
        };
        let (lq, lp) = logical.qubit_logical_shifts();
        let shifts: Vec<f64> = std::iter::repeat(lq).take(k).chain(std::iter::repeat(lp).take(k)).collect();
        let blocks = &code.blocks;
        let plan = match code.spec.scheme {
            Scheme::I => {
                let mut scale = vec![0.0; 2 * n];
                for (j, l) in code.lattices.iter().enumerate() {
                    let ModeLattice::Qubit(g) = l else {
                        return Err(Error::InvalidSpec("scheme I needs qubit lattices on every mode".into()));
                    };
                    let (sq, sp) = g.qubit_syndrome_periods();
                    scale[j] = SQRT_PI / sq;
                    scale[n + j] = SQRT_PI / sp;
                }
                let table = code
                    .syndrome_table
                    .clone()
                    .ok_or_else(|| Error::InvalidSpec("scheme I code without a syndrome table".into()))?;
                // Column-major iteration of the transpose is row-major order.
                let encoder = code
                    .encoder
                    .matrix()
                    .transpose()
                    .iter()
                    .map(|&x| x.round() as i64)
                    .collect();
                Plan::I(Scheme1Plan {
                    scale,
                    stabilizers: code.pauli_stabilizers.clone(),
                    table,
                    encoder,
                })
            }
            Scheme::II => {
                let a1 = blocks.a1();
                let a2 = blocks.a2();
                let a1_pinv = pseudo_inverse(&a1)?;
                let pperp = DMatrix::identity(2 * n, 2 * n) - &a1_pinv * &a1;
                let m = &a2 * &pperp;
                let correction = &pperp * m.transpose() * gram_inverse(&m)?;
                Plan::II(Scheme2Plan {
                    a1: FlatMatrix::from_dmatrix(&a1),
                    logical_op: FlatMatrix::from_dmatrix(&m),
                    a1_pinv,
                    correction,
                })
            }
            Scheme::III => {
                if let (CodeFamily::UnbiasedGkpRepetition(pairs), None) = (code.spec.family, special) {
                    if (logical.alpha - 2.0).abs() > 1e-12
                        || code.lattices[1..].iter().any(|l| *l != ModeLattice::Ancilla(crate::lattice::GkpLattice::CANONICAL))
                    {
                        return Err(Error::InvalidSpec(
                            "the closed-form unbiased decoder assumes square logical and canonical ancilla lattices".into(),
                        ));
                    }
                    Plan::Unbiased(UnbiasedPlan { pairs })
                } else {
                    let a3 = blocks.a3();
                    let mut scaled = a3.clone();
                    for i in 0..a3.nrows() {
                        let mode = k + i % (n - k);
                        let ModeLattice::Ancilla(g) = code.lattices[mode] else {
                            return Err(Error::InvalidSpec("scheme III needs ancilla lattices".into()));
                        };
                        let period = if i < n - k { g.q_period() } else { g.p_period() };
                        let f = sqrt_2pi() / period;
                        scaled.row_mut(i).scale_mut(f);
                    }
                    let generators = if code.spec.reduce_generators {
                        reduce_generator_rows(&scaled)?
                    } else {
                        scaled
                    };
                    let pinv = pseudo_inverse(&generators)?;
                    let a2 = blocks.a2();
                    let a2_pinv = pseudo_inverse(&a2)?;
                    let coupling = &a2 * &pinv;
                    Plan::III(Scheme3Plan {
                        generators: FlatMatrix::from_dmatrix(&generators),
                        a2: FlatMatrix::from_dmatrix(&a2),
                        coupling: FlatMatrix::from_dmatrix(&coupling),
                        pinv,
                        a2_pinv,
                    })
                }
            }
        };
        Ok(Self {
            n,
            k,
            scheme: code.spec.scheme,
            encoder: code.encoder.matrix().clone(),
            shifts,
            plan,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Logical shift per entry of [`Workspace::logical`]. Scheme I reports
    /// logical values in the square frame, where the shift is `sqrt(pi)`.
    pub fn logical_shifts(&self) -> Vec<f64> {
        match self.plan {
            Plan::I(_) => vec![SQRT_PI; 2 * self.k],
            _ => self.shifts.clone(),
        }
    }

    /// Generator rows used by the first scheme-III layer, scaled so every
    /// syndrome has period `sqrt(2 pi)`.
    pub fn scheme3_generators(&self) -> Option<DMatrix<f64>> {
        match &self.plan {
            Plan::III(p) => Some(DMatrix::from_row_slice(p.generators.rows, p.generators.cols, &p.generators.data)),
            _ => None,
        }
    }

    pub fn workspace(&self) -> Workspace {
        let (n, k) = (self.n, self.k);
        let l1 = match &self.plan {
            Plan::I(_) => 2 * n,
            Plan::II(p) => p.a1.rows,
            Plan::III(p) => p.generators.rows,
            Plan::Unbiased(u) => 4 * u.pairs,
        };
        Workspace {
            layer1: vec![0.0; l1],
            ints: vec![0; 2 * n],
            ints_out: vec![0; 2 * n],
            syndrome_bits: 0,
            layer1_logical: vec![0.0; 2 * k],
            layer2: vec![0.0; 2 * k],
            logical: vec![0.0; 2 * k],
        }
    }

    /// Decodes `xi` into `ws` and returns the logical flags as a bit mask
    /// (bit `i` for logical entry `i`). Allocation-free.
    pub fn run(&self, xi: &[f64], ws: &mut Workspace) -> u32 {
        debug_assert_eq!(xi.len(), 2 * self.n);
        match &self.plan {
            Plan::I(p) => self.run_scheme1(p, xi, ws),
            Plan::II(p) => {
                p.a1.mul_into(xi, &mut ws.layer1);
                p.logical_op.mul_into(xi, &mut ws.layer1_logical);
                self.finish_layer2(ws)
            }
            Plan::III(p) => {
                p.generators.mul_into(xi, &mut ws.layer1);
                let s = sqrt_2pi();
                for z in ws.layer1.iter_mut() {
                    *z = remainder(*z, s);
                }
                p.a2.mul_into(xi, &mut ws.layer1_logical);
                p.coupling.mul_into(&ws.layer1, &mut ws.layer2);
                for (f, c) in ws.layer1_logical.iter_mut().zip(&ws.layer2) {
                    *f -= c;
                }
                self.finish_layer2(ws)
            }
            Plan::Unbiased(u) => {
                unbiased_layer1(u.pairs, xi, &mut ws.layer1, &mut ws.layer1_logical);
                self.finish_layer2(ws)
            }
        }
    }

    fn finish_layer2(&self, ws: &mut Workspace) -> u32 {
        let mut flags = 0;
        for (i, &f) in ws.layer1_logical.iter().enumerate() {
            let l = self.shifts[i];
            let z = remainder(f, l);
            ws.layer2[i] = z;
            ws.logical[i] = f - z;
            if is_logical_error_with_shift(ws.logical[i], l) {
                flags |= 1 << i;
            }
        }
        flags
    }

    fn run_scheme1(&self, p: &Scheme1Plan, xi: &[f64], ws: &mut Workspace) -> u32 {
        let (n, k) = (self.n, self.k);
        for i in 0..2 * n {
            let u = p.scale[i] * xi[i];
            let m = (u / SQRT_PI + 0.5).floor();
            ws.ints[i] = m as i64;
            ws.layer1[i] = u - SQRT_PI * m;
        }
        // Logical readout before the qubit-code correction.
        let logical_rows = (0..k).chain(n..n + k);
        for (slot, row) in logical_rows.clone().enumerate() {
            ws.layer1_logical[slot] = SQRT_PI * encoder_row_dot(&p.encoder, 2 * n, row, &ws.ints) as f64;
        }
        let bits = crate::codes::syndrome_bits(&p.stabilizers, &ws.ints);
        ws.syndrome_bits = bits;
        for (m, c) in ws.ints.iter_mut().zip(p.table.shift(bits)) {
            *m -= c;
        }
        let mut flags = 0;
        for (slot, row) in logical_rows.enumerate() {
            let v = encoder_row_dot(&p.encoder, 2 * n, row, &ws.ints);
            ws.logical[slot] = SQRT_PI * v as f64;
            ws.layer2[slot] = 0.0;
            if v.rem_euclid(2) == 1 {
                flags |= 1 << slot;
            }
        }
        flags
    }

    /// Full decode with the residual vector and syndrome record.
    pub fn decode(&self, xi: &[f64]) -> Result<DecodeResult> {
        if xi.len() != 2 * self.n {
            return Err(Error::Dimension {
                expected: 2 * self.n,
                got: xi.len(),
            });
        }
        let (n, k) = (self.n, self.k);
        let mut ws = self.workspace();
        let bits = self.run(xi, &mut ws);
        let flags = (0..2 * k).map(|i| bits & (1 << i) != 0).collect();
        let xi_v = DVector::from_column_slice(xi);
        let (residual, syndromes) = match &self.plan {
            Plan::I(p) => {
                for j in 0..2 * n {
                    ws.ints_out[j] = encoder_row_dot(&p.encoder, 2 * n, j, &ws.ints);
                }
                let residual = ws.ints_out.iter().map(|&v| SQRT_PI * v as f64).collect();
                let layer1_periods = p.scale.iter().map(|s| SQRT_PI / s).collect();
                let layer1 = ws.layer1.iter().zip(&p.scale).map(|(r, s)| r / s).collect();
                let layer2 = (0..p.stabilizers.len())
                    .map(|i| if ws.syndrome_bits & (1 << i) != 0 { -1.0 } else { 1.0 })
                    .collect();
                (
                    residual,
                    SyndromeRecord {
                        layer1,
                        layer1_periods,
                        layer2,
                        layer2_periods: Vec::new(),
                    },
                )
            }
            Plan::II(p) => {
                let z2 = DVector::from_column_slice(&ws.layer2);
                let total = &p.a1_pinv * DVector::from_column_slice(&ws.layer1) + &p.correction * z2;
                (
                    self.decoded_frame(&xi_v, &total),
                    SyndromeRecord {
                        layer1: ws.layer1.clone(),
                        layer1_periods: vec![f64::INFINITY; ws.layer1.len()],
                        layer2: ws.layer2.clone(),
                        layer2_periods: self.shifts.clone(),
                    },
                )
            }
            Plan::III(p) => {
                let z = DVector::from_column_slice(&ws.layer1);
                let xi_star = &p.pinv * &z;
                let a2 = DMatrix::from_row_slice(p.a2.rows, p.a2.cols, &p.a2.data);
                let total = &p.a2_pinv * (DVector::from_column_slice(&ws.layer2) + &a2 * xi_star);
                (
                    self.decoded_frame(&xi_v, &total),
                    SyndromeRecord {
                        layer1: ws.layer1.clone(),
                        layer1_periods: vec![sqrt_2pi(); ws.layer1.len()],
                        layer2: ws.layer2.clone(),
                        layer2_periods: self.shifts.clone(),
                    },
                )
            }
            Plan::Unbiased(_) => {
                // Only the logical residual is defined by the closed form; the
                // ancilla rows are reported uncorrected.
                let mut residual: Vec<f64> = (&self.encoder * &xi_v).iter().copied().collect();
                residual[0] = ws.logical[0];
                residual[n] = ws.logical[1];
                (
                    residual,
                    SyndromeRecord {
                        layer1: ws.layer1.clone(),
                        layer1_periods: vec![sqrt_2pi(); ws.layer1.len()],
                        layer2: ws.layer2.clone(),
                        layer2_periods: self.shifts.clone(),
                    },
                )
            }
        };
        Ok(DecodeResult {
            residual,
            logical: ws.logical.clone(),
            layer1_logical: ws.layer1_logical.clone(),
            flags,
            syndromes,
        })
    }

    fn decoded_frame(&self, xi: &DVector<f64>, correction: &DVector<f64>) -> Vec<f64> {
        (&self.encoder * (xi - correction)).iter().copied().collect()
    }
}

#[inline]
fn encoder_row_dot(encoder: &[i64], dim: usize, row: usize, m: &[i64]) -> i64 {
    encoder[row * dim..(row + 1) * dim].iter().zip(m).map(|(a, b)| a * b).sum()
}

/// First-layer syndromes and logical residual of the unbiased code in closed
/// form. `layer1` receives `(z_jq | z_lq | z_jp | z_lp)` and `logical` the
/// residual `(Qξ − z̄_q, Pξ − z̄_p)`.
fn unbiased_layer1(pairs: usize, xi: &[f64], layer1: &mut [f64], logical: &mut [f64]) {
    let modes = 2 * pairs + 1;
    let (q, p) = xi.split_at(modes);
    let s = sqrt_2pi();
    let low_p: f64 = p[1..=pairs].iter().sum();
    let high_p: f64 = p[pairs + 1..].iter().sum();
    let (mut sum_jq, mut sum_lq, mut sum_jp, mut sum_lp) = (0.0, 0.0, 0.0, 0.0);
    for j in 1..=pairs {
        let z = remainder(q[j] + q[0], s);
        layer1[j - 1] = z;
        sum_jq += z;
    }
    for (slot, l) in (pairs + 1..modes).enumerate() {
        let z = remainder(q[l] + low_p - p[0], s);
        layer1[pairs + slot] = z;
        sum_lq += z;
    }
    for j in 1..=pairs {
        let z = remainder(p[j], s);
        layer1[2 * pairs + j - 1] = z;
        sum_jp += z;
    }
    for (slot, l) in (pairs + 1..modes).enumerate() {
        let z = remainder(p[l], s);
        layer1[3 * pairs + slot] = z;
        sum_lp += z;
    }
    let np1 = (pairs + 1) as f64;
    let zbar_q = (sum_jp + sum_lq) / np1;
    let zbar_p = -(np1 * sum_lp - sum_jq) / np1;
    logical[0] = (low_p - p[0]) - zbar_q;
    logical[1] = (q[0] - high_p) - zbar_p;
}

fn expect_scheme(code: &CodeInstance, scheme: Scheme) -> Result<()> {
    if code.spec.scheme != scheme {
        return Err(Error::InvalidSpec(format!(
            "decoder for scheme {scheme} called on a scheme {} code",
            code.spec.scheme
        )));
    }
    Ok(())
}

pub fn decode_scheme1(xi: &[f64], code: &CodeInstance) -> Result<DecodeResult> {
    expect_scheme(code, Scheme::I)?;
    Decoder::new(code)?.decode(xi)
}

pub fn decode_scheme2(xi: &[f64], code: &CodeInstance) -> Result<DecodeResult> {
    expect_scheme(code, Scheme::II)?;
    Decoder::new(code)?.decode(xi)
}

pub fn decode_scheme3(xi: &[f64], code: &CodeInstance) -> Result<DecodeResult> {
    expect_scheme(code, Scheme::III)?;
    Decoder::generic(code)?.decode(xi)
}

pub fn decode_unbiased(xi: &[f64], code: &CodeInstance) -> Result<DecodeResult> {
    if !matches!(code.spec.family, CodeFamily::UnbiasedGkpRepetition(_)) {
        return Err(Error::InvalidSpec("not an unbiased GKP-repetition code".into()));
    }
    Decoder::new(code)?.decode(xi)
}

/// Scheme II logical residual when the first-layer syndrome `z` is held
/// fixed in the second-layer optimisation instead of substituted by `A₁ξ`:
/// the correction is `A₂ᵀ(A₂A₂ᵀ)⁻¹z' − P⊥_{A₂} A₁ᵀ(A₁A₁ᵀ)⁻¹z`.
pub fn scheme2_fixed_syndrome_logical(xi: &[f64], code: &CodeInstance) -> Result<Vec<f64>> {
    expect_scheme(code, Scheme::II)?;
    let a1 = code.blocks.a1();
    let a2 = code.blocks.a2();
    let xi = DVector::from_column_slice(xi);
    let z = &a1 * &xi;
    let a1_pinv = pseudo_inverse(&a1)?;
    let xi_prime = &xi - &a1_pinv * &z;
    let logical = &a2 * &xi_prime;
    let lq = code.lattices[0];
    let ModeLattice::Qubit(l) = lq else {
        return Err(Error::InvalidSpec("logical mode must carry a qubit lattice".into()));
    };
    let (sq, sp) = l.qubit_logical_shifts();
    let k = code.k;
    let z2 = DVector::from_iterator(
        2 * k,
        logical
            .iter()
            .enumerate()
            .map(|(i, &f)| remainder(f, if i < k { sq } else { sp })),
    );
    let correction = pseudo_inverse(&a2)? * &z2 - kernel_projection(&a2)? * &a1_pinv * &z;
    Ok((&a2 * (xi_prime - correction)).iter().copied().collect())
}

/// Nearest-lattice reading of the pseudo-inverse estimate for a scheme I
/// code: given a `sqrt(pi)`-shift pattern `m`, returns the shift pattern
/// closest to `A₁ᵀ(A₁A₁ᵀ)⁻¹ A₁ m`.
pub fn pseudo_inverse_shift_estimate(code: &CodeInstance, m: &[i64]) -> Result<Vec<i64>> {
    let a1 = code.blocks.a1();
    let v = DVector::from_iterator(m.len(), m.iter().map(|&x| x as f64 * SQRT_PI));
    let z = &a1 * v;
    let est = least_norm_solve(&a1, &z)?;
    Ok(est
        .iter()
        .map(|&x| ((x - remainder(x, SQRT_PI)) / SQRT_PI).round() as i64)
        .collect())
}

/// `[A₁; A₂]`, the combined nullifier and logical rows.
pub fn stacked_rows(code: &CodeInstance) -> DMatrix<f64> {
    vstack(&[&code.blocks.a1(), &code.blocks.a2()])
}
