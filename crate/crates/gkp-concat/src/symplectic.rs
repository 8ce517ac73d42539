//! Gaussian gate algebra on quadrature vectors ordered `(q1..qn, p1..pn)`.
//!
//! A gate `U` is represented by the matrix `A` with `U r U† = A r`. Applying
//! `U1` and then `U2` gives `(U2 U1) r (U2 U1)† = A1 A2 r`, so a circuit listed
//! in temporal order composes as `A_first · … · A_last`.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

const SYMPLECTIC_TOL: f64 = 1e-9;

/// One gate of the encoder gate set. Mode indices are 1-based, matching the
/// circuit text format.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussianGate {
    /// `q_t -> q_t - q_c`, `p_c -> p_c + p_t`.
    Cnot { control: usize, target: usize },
    /// `p_c -> p_c - q_t`, `p_t -> p_t - q_c`.
    Cz { control: usize, target: usize },
    /// `q -> p`, `p -> -q`.
    Hadamard { mode: usize },
    /// `q -> q / sqrt(alpha)`, `p -> sqrt(alpha) p`.
    Squeeze { mode: usize, alpha: f64 },
}

impl GaussianGate {
    fn validate(&self, n: usize) -> Result<()> {
        let check = |m: usize| {
            if m == 0 || m > n {
                Err(Error::ModeIndex { index: m, n })
            } else {
                Ok(())
            }
        };
        match *self {
            GaussianGate::Cnot { control, target } | GaussianGate::Cz { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::RepeatedMode(control));
                }
                Ok(())
            }
            GaussianGate::Hadamard { mode } => check(mode),
            GaussianGate::Squeeze { mode, alpha } => {
                check(mode)?;
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::SqueezeParameter(alpha));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for GaussianGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GaussianGate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            GaussianGate::Cz { control, target } => write!(f, "CZ {control} {target}"),
            GaussianGate::Hadamard { mode } => write!(f, "H {mode}"),
            GaussianGate::Squeeze { mode, alpha } => write!(f, "SQZ {mode} {alpha:?}"),
        }
    }
}

/// A `2n x 2n` matrix acting on `(q1..qn, p1..pn)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    entries: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            entries: DMatrix::identity(2 * n, 2 * n),
        }
    }

    /// Wraps a matrix after checking its shape and the symplectic condition.
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        let (r, c) = entries.shape();
        if r != c || r % 2 != 0 {
            return Err(Error::Dimension {
                expected: r + r % 2,
                got: c,
            });
        }
        if !check_symplectic(&entries) {
            return Err(Error::InvalidSpec("matrix is not symplectic".into()));
        }
        Ok(Self { n: r / 2, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn is_symplectic(&self) -> bool {
        check_symplectic(&self.entries)
    }

    /// The matrix of "this circuit, then `next`".
    pub fn then(&self, next: &SymplecticMatrix) -> SymplecticMatrix {
        assert_eq!(self.n, next.n, "mode count mismatch");
        SymplecticMatrix {
            n: self.n,
            entries: &self.entries * &next.entries,
        }
    }

    /// `A⁻¹ = -Ω Aᵀ Ω`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let omega = omega(self.n);
        SymplecticMatrix {
            n: self.n,
            entries: -(&omega * self.entries.transpose() * &omega),
        }
    }
}

/// `Ω = [[0, I], [-I, 0]]`.
pub fn omega(n: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        o[(i, n + i)] = 1.0;
        o[(n + i, i)] = -1.0;
    }
    o
}

/// True iff `‖A Ω Aᵀ − Ω‖_max ≤ 1e-9`.
pub fn check_symplectic(a: &DMatrix<f64>) -> bool {
    let (r, c) = a.shape();
    if r != c || r % 2 != 0 {
        return false;
    }
    let o = omega(r / 2);
    let diff = a * &o * a.transpose() - &o;
    diff.amax() <= SYMPLECTIC_TOL
}

/// Heisenberg matrix of a single gate on `n` modes.
pub fn gate_symplectic(gate: &GaussianGate, n: usize) -> Result<SymplecticMatrix> {
    gate.validate(n)?;
    let mut a = DMatrix::identity(2 * n, 2 * n);
    match *gate {
        GaussianGate::Cnot { control, target } => {
            let (j, k) = (control - 1, target - 1);
            a[(k, j)] -= 1.0;
            a[(n + j, n + k)] += 1.0;
        }
        GaussianGate::Cz { control, target } => {
            let (j, k) = (control - 1, target - 1);
            a[(n + j, k)] -= 1.0;
            a[(n + k, j)] -= 1.0;
        }
        GaussianGate::Hadamard { mode } => {
            let j = mode - 1;
            a[(j, j)] = 0.0;
            a[(n + j, n + j)] = 0.0;
            a[(j, n + j)] = 1.0;
            a[(n + j, j)] = -1.0;
        }
        GaussianGate::Squeeze { mode, alpha } => {
            let j = mode - 1;
            let s = alpha.sqrt();
            a[(j, j)] = 1.0 / s;
            a[(n + j, n + j)] = s;
        }
    }
    Ok(SymplecticMatrix { n, entries: a })
}

/// An ordered gate list on `n` modes, first gate applied first.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianCircuit {
    n: usize,
    gates: Vec<GaussianGate>,
}

impl GaussianCircuit {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n: usize, gates: Vec<GaussianGate>) -> Result<Self> {
        for g in &gates {
            g.validate(n)?;
        }
        Ok(Self { n, gates })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[GaussianGate] {
        &self.gates
    }

    pub fn push(&mut self, gate: GaussianGate) -> Result<()> {
        gate.validate(self.n)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend_from(&mut self, other: &GaussianCircuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Parses the line format: `CNOT j k`, `CZ j k`, `H j`, `SQZ j alpha`.
    /// Blank lines and `#` comments are skipped.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut circuit = Self::new(n);
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let mode = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| err(format!("bad mode index `{t}`")))
            };
            let gate = match (tokens[0].to_ascii_uppercase().as_str(), tokens.len()) {
                ("CNOT", 3) => GaussianGate::Cnot {
                    control: mode(tokens[1])?,
                    target: mode(tokens[2])?,
                },
                ("CZ", 3) => GaussianGate::Cz {
                    control: mode(tokens[1])?,
                    target: mode(tokens[2])?,
                },
                ("H", 2) => GaussianGate::Hadamard {
                    mode: mode(tokens[1])?,
                },
                ("SQZ", 3) => GaussianGate::Squeeze {
                    mode: mode(tokens[1])?,
                    alpha: tokens[2]
                        .parse::<f64>()
                        .map_err(|_| err(format!("bad squeeze parameter `{}`", tokens[2])))?,
                },
                _ => return Err(err(format!("unrecognised gate line `{line}`"))),
            };
            gate.validate(n).map_err(|e| err(e.to_string()))?;
            circuit.gates.push(gate);
        }
        Ok(circuit)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }
}

/// Product of the gate matrices, `A_first · … · A_last`.
pub fn compose(circuit: &GaussianCircuit) -> Result<SymplecticMatrix> {
    let n = circuit.n;
    let mut a = SymplecticMatrix::identity(n);
    for g in &circuit.gates {
        a = a.then(&gate_symplectic(g, n)?);
    }
    Ok(a)
}

/// Row blocks of an encoder matrix: `Q` (logical q), `G` (stabilizer
/// nullifiers), `P` (logical p), `D` (their conjugates).
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderBlocks {
    pub n: usize,
    pub k: usize,
    pub q: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl EncoderBlocks {
    pub fn a1(&self) -> DMatrix<f64> {
        self.g.clone()
    }

    pub fn a2(&self) -> DMatrix<f64> {
        vstack(&[&self.q, &self.p])
    }

    pub fn a3(&self) -> DMatrix<f64> {
        vstack(&[&self.g, &self.d])
    }

    /// `[Q; G; P; D]`, the original matrix.
    pub fn restack(&self) -> DMatrix<f64> {
        vstack(&[&self.q, &self.g, &self.p, &self.d])
    }
}

pub fn split_blocks(a: &SymplecticMatrix, k: usize) -> Result<EncoderBlocks> {
    let n = a.n;
    if k == 0 || k >= n {
        return Err(Error::LogicalCount { k, n });
    }
    let m = &a.entries;
    Ok(EncoderBlocks {
        n,
        k,
        q: m.rows(0, k).into_owned(),
        g: m.rows(k, n - k).into_owned(),
        p: m.rows(n, k).into_owned(),
        d: m.rows(n + k, n - k).into_owned(),
    })
}

pub(crate) fn vstack(parts: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let cols = parts.first().map_or(0, |p| p.ncols());
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r = 0;
    for p in parts {
        out.rows_mut(r, p.nrows()).copy_from(*p);
        r += p.nrows();
    }
    out
}

/// Greedy pairwise reduction of generator rows. Repeatedly subtracts
/// `round(<ri,rj>/<rj,rj>) rj` from `ri` whenever that shortens `ri`, until
/// no such subtraction helps. The row lattice is unchanged.
pub fn reduce_generator_rows(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let rows = a.nrows();
    let rank = linalg::row_rank(a);
    if rank < rows {
        return Err(Error::RankDeficient { rank, rows });
    }
    let mut m = a.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..rows {
            for j in 0..rows {
                if i == j {
                    continue;
                }
                let rj = m.row(j).into_owned();
                let nj = rj.norm_squared();
                let c = (m.row(i).dot(&rj) / nj).round();
                if c == 0.0 {
                    continue;
                }
                let candidate = m.row(i) - rj * c;
                if candidate.norm_squared() < m.row(i).norm_squared() - 1e-9 {
                    m.set_row(i, &candidate);
                    changed = true;
                }
            }
        }
    }
    Ok(m)
}
