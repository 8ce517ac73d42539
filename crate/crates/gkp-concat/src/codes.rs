//! Catalog of concatenated codes: encoder circuits, decoder blocks, qubit
//! stabilizers and syndrome tables.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::{GkpLattice, ModeLattice};
use crate::noise::NoiseVector;
use crate::symplectic::{compose, split_blocks, EncoderBlocks, GaussianCircuit, GaussianGate, SymplecticMatrix};

const FIVE_QUBIT_CIRCUIT: &str = include_str!("circuits/five_qubit.txt");
const STEANE_CIRCUIT: &str = include_str!("circuits/steane.txt");
const SHOR_CIRCUIT: &str = include_str!("circuits/shor.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeFamily {
    Repetition(usize),
    FiveQubit,
    Steane,
    Shor,
    /// Two ancilla pairs per unit of `n`; `2n + 1` modes in total.
    UnbiasedGkpRepetition(usize),
}

impl CodeFamily {
    pub fn id(&self) -> String {
        match self {
            CodeFamily::Repetition(n) => format!("rep{n}"),
            CodeFamily::FiveQubit => "513".into(),
            CodeFamily::Steane => "steane".into(),
            CodeFamily::Shor => "shor".into(),
            CodeFamily::UnbiasedGkpRepetition(n) => format!("unbiased-gkp-rep:{n}"),
        }
    }

    pub fn modes(&self) -> usize {
        match *self {
            CodeFamily::Repetition(n) => n,
            CodeFamily::FiveQubit => 5,
            CodeFamily::Steane => 7,
            CodeFamily::Shor => 9,
            CodeFamily::UnbiasedGkpRepetition(n) => 2 * n + 1,
        }
    }

    /// Qubit-code distance (for the repetition code, against the error type
    /// it protects).
    pub fn distance(&self) -> usize {
        match *self {
            CodeFamily::Repetition(n) => n,
            CodeFamily::UnbiasedGkpRepetition(_) => 1,
            _ => 3,
        }
    }

    pub fn circuit(&self) -> Result<GaussianCircuit> {
        let n = self.modes();
        match *self {
            CodeFamily::Repetition(r) => {
                let gates = (2..=r)
                    .map(|j| GaussianGate::Cnot {
                        control: 1,
                        target: j,
                    })
                    .collect();
                GaussianCircuit::from_gates(n, gates)
            }
            CodeFamily::FiveQubit => GaussianCircuit::parse(n, FIVE_QUBIT_CIRCUIT),
            CodeFamily::Steane => GaussianCircuit::parse(n, STEANE_CIRCUIT),
            CodeFamily::Shor => GaussianCircuit::parse(n, SHOR_CIRCUIT),
            CodeFamily::UnbiasedGkpRepetition(pairs) => {
                // Mode 1 is the data mode, 2..=pairs+1 the position-coupled
                // ancillas and the rest the momentum-coupled ones.
                let h = GaussianGate::Hadamard { mode: 1 };
                let mut gates = vec![h, h];
                for l in pairs + 2..=2 * pairs + 1 {
                    gates.push(GaussianGate::Cnot {
                        control: 1,
                        target: l,
                    });
                }
                gates.extend([h, h, h]);
                for j in 2..=pairs + 1 {
                    gates.push(GaussianGate::Cnot {
                        control: 1,
                        target: j,
                    });
                }
                gates.extend([h, h]);
                GaussianCircuit::from_gates(n, gates)
            }
        }
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for CodeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "rep3" => return Ok(CodeFamily::Repetition(3)),
            "rep5" => return Ok(CodeFamily::Repetition(5)),
            "rep7" => return Ok(CodeFamily::Repetition(7)),
            "513" | "five-qubit" => return Ok(CodeFamily::FiveQubit),
            "steane" => return Ok(CodeFamily::Steane),
            "shor" => return Ok(CodeFamily::Shor),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("unbiased-gkp-rep:") {
            let n: usize = rest
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad ancilla pair count in `{s}`")))?;
            if n == 0 {
                return Err(Error::InvalidSpec("unbiased code needs at least one pair".into()));
            }
            return Ok(CodeFamily::UnbiasedGkpRepetition(n));
        }
        Err(Error::InvalidSpec(format!("unknown code id `{s}`")))
    }
}

/// Stabilizer-GKP (I), GKP-analog (II) and GKP-stabilizer (III).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    I,
    II,
    III,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::I => "I",
            Scheme::II => "II",
            Scheme::III => "III",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Scheme::I),
            "II" | "2" => Ok(Scheme::II),
            "III" | "3" => Ok(Scheme::III),
            other => Err(Error::InvalidSpec(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeSpec {
    pub family: CodeFamily,
    pub scheme: Scheme,
    /// Auxiliary-mode lattice. `None` picks the scheme default: 2 for I,
    /// position eigenstates for II, 1 for III.
    pub aux_alpha: Option<f64>,
    pub logical_alpha: f64,
    /// Greedy reduction of the scheme-III generator rows before decoding.
    pub reduce_generators: bool,
}

impl CodeSpec {
    pub fn new(family: CodeFamily, scheme: Scheme) -> Self {
        Self {
            family,
            scheme,
            aux_alpha: None,
            logical_alpha: 2.0,
            reduce_generators: true,
        }
    }

    pub fn with_aux_alpha(mut self, alpha: f64) -> Self {
        self.aux_alpha = Some(alpha);
        self
    }

    pub fn with_logical_alpha(mut self, alpha: f64) -> Self {
        self.logical_alpha = alpha;
        self
    }

    pub fn with_reduction(mut self, on: bool) -> Self {
        self.reduce_generators = on;
        self
    }

    /// Parses a catalog id plus scheme, e.g. `("513", "III")`.
    pub fn parse(code: &str, scheme: &str) -> Result<Self> {
        Ok(Self::new(code.parse()?, scheme.parse()?))
    }

    pub fn validate(&self) -> Result<()> {
        if let CodeFamily::Repetition(r) = self.family {
            if ![3, 5, 7].contains(&r) {
                return Err(Error::InvalidSpec(format!("repetition length {r} is not 3, 5 or 7")));
            }
        }
        if matches!(self.family, CodeFamily::UnbiasedGkpRepetition(_)) && self.scheme != Scheme::III {
            return Err(Error::InvalidSpec(
                "the unbiased GKP-repetition code only exists in scheme III".into(),
            ));
        }
        GkpLattice::new(self.logical_alpha)?;
        if let Some(a) = self.aux_alpha {
            if self.scheme == Scheme::II {
                return Err(Error::InvalidSpec(
                    "scheme II ancillas are position eigenstates; no auxiliary alpha applies".into(),
                ));
            }
            GkpLattice::new(a)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A Pauli operator on `n` qubit GKP modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self(vec![Pauli::I; n])
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Displacement in units of `sqrt(pi)`: X shifts q, Z shifts p.
    pub fn shift(&self) -> Vec<i64> {
        let n = self.0.len();
        let mut m = vec![0; 2 * n];
        for (j, p) in self.0.iter().enumerate() {
            if matches!(p, Pauli::X | Pauli::Y) {
                m[j] = 1;
            }
            if matches!(p, Pauli::Z | Pauli::Y) {
                m[n + j] = 1;
            }
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::Parameter(format!("bad Pauli symbol `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

/// A qubit stabilizer `exp(i sqrt(pi) s·r)` stored as its signed integer
/// quadrature support `s = (s_q | s_p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliStabilizer {
    pub support: Vec<i64>,
}

impl PauliStabilizer {
    pub fn n(&self) -> usize {
        self.support.len() / 2
    }

    /// The Pauli it acts as: odd q coefficient is Z, odd p coefficient is X.
    pub fn pauli(&self) -> PauliString {
        let n = self.n();
        PauliString(
            (0..n)
                .map(|j| {
                    let z = self.support[j].rem_euclid(2) == 1;
                    let x = self.support[n + j].rem_euclid(2) == 1;
                    match (x, z) {
                        (false, false) => Pauli::I,
                        (true, false) => Pauli::X,
                        (true, true) => Pauli::Y,
                        (false, true) => Pauli::Z,
                    }
                })
                .collect(),
        )
    }

    /// True when a shift `sqrt(pi) m` anticommutes with this stabilizer.
    #[inline]
    pub fn flips(&self, m: &[i64]) -> bool {
        let dot: i64 = self.support.iter().zip(m).map(|(a, b)| a * b).sum();
        dot.rem_euclid(2) == 1
    }

    /// Symbolic form, e.g. `-q1+q2+p3`.
    pub fn expression(&self) -> String {
        linear_form(&self.support.iter().map(|&v| v as f64).collect::<Vec<_>>())
    }
}

/// Syndrome bits (bit `i` set = stabilizer `i` reads -1) of a shift.
pub fn syndrome_bits(stabilizers: &[PauliStabilizer], m: &[i64]) -> u64 {
    stabilizers
        .iter()
        .enumerate()
        .filter(|(_, s)| s.flips(m))
        .fold(0, |acc, (i, _)| acc | (1 << i))
}

/// Minimum-weight lookup from syndrome bits to a Pauli correction.
#[derive(Debug, Clone, PartialEq)]
pub struct SyndromeTable {
    n: usize,
    entries: Vec<Option<PauliString>>,
    shifts: Vec<Vec<i64>>,
}

impl SyndromeTable {
    /// Enumerates Pauli errors by weight, modes in lexicographic order and
    /// X < Y < Z within a mode; the first error reaching a syndrome owns it.
    /// Stops once every syndrome is reached.
    pub fn build(stabilizers: &[PauliStabilizer], n: usize) -> Self {
        let r = stabilizers.len();
        assert!(r < 24, "too many stabilizers for a dense table");
        let size = 1usize << r;
        let mut entries: Vec<Option<PauliString>> = vec![None; size];
        let mut filled = 0;
        for e in all_paulis_up_to(n, n) {
            let s = syndrome_bits(stabilizers, &e.shift()) as usize;
            if entries[s].is_none() {
                entries[s] = Some(e);
                filled += 1;
                if filled == size {
                    break;
                }
            }
        }
        let shifts = entries
            .iter()
            .map(|e| e.as_ref().map_or_else(|| vec![0; 2 * n], |e| e.shift()))
            .collect();
        Self { n, entries, shifts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Correction for a syndrome; identity for unreachable syndromes.
    pub fn lookup(&self, bits: u64) -> PauliString {
        self.entries[bits as usize]
            .clone()
            .unwrap_or_else(|| PauliString::identity(self.n))
    }

    #[inline]
    pub fn shift(&self, bits: u64) -> &[i64] {
        &self.shifts[bits as usize]
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }

    /// Whether every Pauli error of weight at most `t` is corrected up to a
    /// stabilizer, i.e. its correction has the same syndrome. Checked by
    /// enumeration.
    pub fn corrects_all_up_to(&self, stabilizers: &[PauliStabilizer], t: usize) -> bool {
        all_paulis_up_to(self.n, t).all(|e| {
            let s = syndrome_bits(stabilizers, &e.shift());
            self.entries[s as usize].is_some()
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &PauliString)> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(s, e)| e.as_ref().map(|e| (s as u64, e)))
    }
}

fn combinations(n: usize, w: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(w);
    fn rec(start: usize, n: usize, w: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == w {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, w, cur, out);
            cur.pop();
        }
    }
    rec(0, n, w, &mut cur, &mut out);
    out
}

/// Every Pauli string of weight at most `t` on `n` qubits.
pub fn all_paulis_up_to(n: usize, t: usize) -> impl Iterator<Item = PauliString> {
    (0..=t.min(n)).flat_map(move |w| {
        combinations(n, w).into_iter().flat_map(move |modes| {
            let count = 3usize.pow(w as u32);
            (0..count).map(move |mut c| {
                let mut e = PauliString::identity(n);
                for &m in modes.iter().rev() {
                    e.0[m] = [Pauli::X, Pauli::Y, Pauli::Z][c % 3];
                    c /= 3;
                }
                e
            })
        })
    })
}

/// A fully built concatenated code.
#[derive(Debug, Clone)]
pub struct CodeInstance {
    pub spec: CodeSpec,
    pub n: usize,
    pub k: usize,
    pub circuit: GaussianCircuit,
    pub encoder: SymplecticMatrix,
    pub blocks: EncoderBlocks,
    /// Scheme I only.
    pub pauli_stabilizers: Vec<PauliStabilizer>,
    /// Scheme I only.
    pub syndrome_table: Option<SyndromeTable>,
    pub lattices: Vec<ModeLattice>,
}

impl CodeInstance {
    pub fn build(spec: CodeSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.family.modes();
        let k = 1;
        let circuit = spec.family.circuit()?;
        let encoder = compose(&circuit)?;
        if !encoder.is_symplectic() {
            return Err(Error::InvalidSpec(format!("{} encoder is not symplectic", spec.family)));
        }
        let blocks = split_blocks(&encoder, k)?;

        let logical = ModeLattice::Qubit(GkpLattice::new(spec.logical_alpha)?);
        let aux = match spec.scheme {
            Scheme::I => ModeLattice::Qubit(GkpLattice::new(spec.aux_alpha.unwrap_or(2.0))?),
            Scheme::II => ModeLattice::PositionEigenstate,
            Scheme::III => ModeLattice::Ancilla(GkpLattice::new(spec.aux_alpha.unwrap_or(1.0))?),
        };
        let lattices = (0..n).map(|j| if j < k { logical } else { aux }).collect();

        let (pauli_stabilizers, syndrome_table) = if spec.scheme == Scheme::I {
            let stabs = integer_rows(&blocks.g)?
                .into_iter()
                .map(|support| PauliStabilizer { support })
                .collect::<Vec<_>>();
            let table = SyndromeTable::build(&stabs, n);
            (stabs, Some(table))
        } else {
            (Vec::new(), None)
        };

        Ok(Self {
            spec,
            n,
            k,
            circuit,
            encoder,
            blocks,
            pauli_stabilizers,
            syndrome_table,
            lattices,
        })
    }

    pub fn id(&self) -> String {
        self.spec.family.id()
    }

    pub fn scheme(&self) -> Scheme {
        self.spec.scheme
    }

    /// Human-readable dump of matrices, stabilizers and lattices.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "code {} scheme {} (n={}, k={})", self.id(), self.scheme(), self.n, self.k);
        let _ = writeln!(s, "\nencoder circuit:");
        for g in self.circuit.gates() {
            let _ = writeln!(s, "  {g}");
        }
        let names = ["Q", "G", "P", "D"];
        let blocks = [&self.blocks.q, &self.blocks.g, &self.blocks.p, &self.blocks.d];
        let _ = writeln!(s, "\nencoder rows:");
        for (name, b) in names.iter().zip(blocks) {
            for i in 0..b.nrows() {
                let row: Vec<f64> = b.row(i).iter().copied().collect();
                let _ = writeln!(s, "  {name}{}: {}", i + 1, linear_form(&row));
            }
        }
        if !self.pauli_stabilizers.is_empty() {
            let _ = writeln!(s, "\nqubit stabilizers:");
            for st in &self.pauli_stabilizers {
                let _ = writeln!(s, "  {}  exp(i sqrt(pi) ({}))", st.pauli(), st.expression());
            }
        }
        if let Some(t) = &self.syndrome_table {
            let _ = writeln!(s, "\nsyndrome table ({} entries):", t.len());
            for (bits, e) in t.iter() {
                let _ = writeln!(s, "  {:0width$b} -> {}", bits, e, width = self.pauli_stabilizers.len());
            }
        }
        let _ = writeln!(s, "\nmode lattices:");
        for (j, l) in self.lattices.iter().enumerate() {
            let desc = match l {
                ModeLattice::Qubit(g) => format!("qubit GKP, alpha = {}", g.alpha),
                ModeLattice::Ancilla(g) => format!("ancilla GKP, alpha = {}", g.alpha),
                ModeLattice::PositionEigenstate => "position eigenstate".to_string(),
            };
            let _ = writeln!(s, "  mode {}: {desc}", j + 1);
        }
        s
    }
}

/// Convenience wrapper for [`CodeInstance::build`].
pub fn build(spec: CodeSpec) -> Result<CodeInstance> {
    CodeInstance::build(spec)
}

/// Syndrome table over a stabilizer list, see [`SyndromeTable::build`].
pub fn syndrome_table_build(stabilizers: &[PauliStabilizer], n: usize) -> SyndromeTable {
    SyndromeTable::build(stabilizers, n)
}

fn integer_rows(m: &nalgebra::DMatrix<f64>) -> Result<Vec<Vec<i64>>> {
    (0..m.nrows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|&x| {
                    if (x - x.round()).abs() > 1e-12 {
                        Err(Error::InvalidSpec("stabilizer rows must be integer for qubit GKP codes".into()))
                    } else {
                        Ok(x.round() as i64)
                    }
                })
                .collect()
        })
        .collect()
}

/// The `4n + 2` syndromes of the unbiased GKP-repetition code read off
/// directly from the noise: `(z0q, z0p | z_jq (j<=n), z_lq (l>n) | z_sp)`.
/// Logical entries are reduced modulo `sqrt(pi)`, ancilla entries modulo
/// `sqrt(2 pi)`.
pub fn unbiased_syndrome_map(pairs: usize, xi: &NoiseVector) -> Result<Vec<f64>> {
    let modes = 2 * pairs + 1;
    if xi.n() != modes {
        return Err(Error::Dimension {
            expected: 2 * modes,
            got: xi.as_slice().len(),
        });
    }
    let forms = unbiased_linear_forms(pairs, xi.as_slice());
    let sp = crate::lattice::SQRT_PI;
    let s2p = (2.0 * std::f64::consts::PI).sqrt();
    Ok(forms
        .iter()
        .enumerate()
        .map(|(i, &f)| crate::lattice::remainder(f, if i < 2 { sp } else { s2p }))
        .collect())
}

/// Unreduced linear forms behind [`unbiased_syndrome_map`].
pub fn unbiased_linear_forms(pairs: usize, xi: &[f64]) -> Vec<f64> {
    let modes = 2 * pairs + 1;
    let q = &xi[..modes];
    let p = &xi[modes..];
    let low_p: f64 = p[1..=pairs].iter().sum();
    let high_p: f64 = p[pairs + 1..].iter().sum();
    let mut out = Vec::with_capacity(4 * pairs + 2);
    out.push(low_p - p[0]);
    out.push(q[0] - high_p);
    for &qj in &q[1..=pairs] {
        out.push(qj + q[0]);
    }
    for &ql in &q[pairs + 1..] {
        out.push(ql + low_p - p[0]);
    }
    out.extend_from_slice(&p[1..]);
    out
}

/// Renders a coefficient row over `(q1..qn, p1..pn)` as `-q1+q2+2p3`.
pub fn linear_form(row: &[f64]) -> String {
    let n = row.len() / 2;
    let mut s = String::new();
    for (i, &c) in row.iter().enumerate() {
        if c.abs() < 1e-12 {
            continue;
        }
        let var = if i < n { format!("q{}", i + 1) } else { format!("p{}", i - n + 1) };
        let sign = if c < 0.0 { "-" } else if s.is_empty() { "" } else { "+" };
        let mag = c.abs();
        if (mag - 1.0).abs() < 1e-12 {
            let _ = write!(s, "{sign}{var}");
        } else {
            let _ = write!(s, "{sign}{mag}{var}");
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}
