//! Plain Monte Carlo estimation of logical error rates.
//!
//! Samples are split into fixed batches of [`BATCH_SIZE`]. Batch `b` of cell
//! `c` draws from ChaCha8 stream `(c << 40) | b` keyed by the seed, keeps its
//! own tally, and tallies are merged in batch order. The result therefore
//! does not depend on how many worker threads ran the batches.

use std::fmt;
use std::time::{Duration, Instant};

use crate::codes::{CodeFamily, CodeInstance, CodeSpec, Scheme};
use crate::decoder::Decoder;
use crate::error::{Error, Result};
use crate::noise::{NoiseModel, NoiseStream};

pub const BATCH_SIZE: u64 = 1 << 16;

/// Batches per round when a stopping rule is active.
const ROUND_BATCHES: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// The global rayon pool. Falls back to sequential execution when the
    /// `parallel` feature is off.
    #[default]
    Parallel,
    /// A dedicated pool of this many workers.
    Threads(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    pub samples: u64,
    pub seed: u64,
    /// Selects an independent family of substreams.
    pub cell: u64,
    pub execution: Execution,
    /// Stop once `stderr / p_emp` drops below this (checked every 16
    /// batches, and only after at least one error).
    pub target_relative_stderr: Option<f64>,
}

impl MonteCarloConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            cell: 0,
            execution: Execution::default(),
            target_relative_stderr: None,
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_cell(mut self, cell: u64) -> Self {
        self.cell = cell;
        self
    }

    pub fn with_target_relative_stderr(mut self, target: Option<f64>) -> Self {
        self.target_relative_stderr = target;
        self
    }
}

/// Counts and moments gathered over a set of samples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tally {
    pub samples: u64,
    /// Samples with any logical flag after the full decode.
    pub errors: u64,
    /// Per logical entry, flags after the full decode.
    pub entry_errors: Vec<u64>,
    /// Per logical entry, flags read directly off the first-layer residual.
    pub layer1_entry_errors: Vec<u64>,
    /// Sums of the first-layer logical residual.
    pub sum: Vec<f64>,
    pub sum_sq: Vec<f64>,
}

impl Tally {
    fn new(entries: usize) -> Self {
        Self {
            samples: 0,
            errors: 0,
            entry_errors: vec![0; entries],
            layer1_entry_errors: vec![0; entries],
            sum: vec![0.0; entries],
            sum_sq: vec![0.0; entries],
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.samples += other.samples;
        self.errors += other.errors;
        for i in 0..self.entry_errors.len() {
            self.entry_errors[i] += other.entry_errors[i];
            self.layer1_entry_errors[i] += other.layer1_entry_errors[i];
            self.sum[i] += other.sum[i];
            self.sum_sq[i] += other.sum_sq[i];
        }
    }

    pub fn error_rate(&self) -> f64 {
        self.errors as f64 / self.samples as f64
    }

    /// Sample variance of first-layer logical entry `i`.
    pub fn variance(&self, i: usize) -> f64 {
        let m = self.samples as f64;
        let mean = self.sum[i] / m;
        (self.sum_sq[i] / m - mean * mean) * m / (m - 1.0)
    }
}

fn run_batch(decoder: &Decoder, model: &NoiseModel, cfg: &MonteCarloConfig, batch: u64) -> Result<Tally> {
    let start = batch * BATCH_SIZE;
    let count = BATCH_SIZE.min(cfg.samples - start);
    let entries = 2 * decoder.k();
    let mut tally = Tally::new(entries);
    let mut stream = NoiseStream::new(cfg.seed, (cfg.cell << 40) | batch);
    let mut ws = decoder.workspace();
    let mut xi = vec![0.0; 2 * decoder.n()];
    let shifts = decoder.logical_shifts();
    for i in 0..count {
        model.sample_into(&mut stream, &mut xi);
        let flags = decoder.run(&xi, &mut ws);
        let l1 = ws.layer1_logical();
        if !l1.iter().all(|v| v.is_finite()) {
            return Err(Error::Decode {
                seed: cfg.seed,
                index: start + i,
                source: Box::new(Error::Parameter("non-finite residual".into())),
            });
        }
        tally.samples += 1;
        if flags != 0 {
            tally.errors += 1;
        }
        for (e, &v) in l1.iter().enumerate() {
            if flags & (1 << e) != 0 {
                tally.entry_errors[e] += 1;
            }
            if crate::lattice::is_logical_error_with_shift(v, shifts[e]) {
                tally.layer1_entry_errors[e] += 1;
            }
            tally.sum[e] += v;
            tally.sum_sq[e] += v * v;
        }
    }
    Ok(tally)
}

fn run_batches(
    decoder: &Decoder,
    model: &NoiseModel,
    cfg: &MonteCarloConfig,
    batches: std::ops::Range<u64>,
) -> Result<Vec<Tally>> {
    match cfg.execution {
        Execution::Sequential => batches.map(|b| run_batch(decoder, model, cfg, b)).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            batches
                .into_par_iter()
                .map(|b| run_batch(decoder, model, cfg, b))
                .collect()
        }
        #[cfg(feature = "parallel")]
        Execution::Threads(t) => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
            pool.install(|| {
                batches
                    .into_par_iter()
                    .map(|b| run_batch(decoder, model, cfg, b))
                    .collect()
            })
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel | Execution::Threads(_) => {
            batches.map(|b| run_batch(decoder, model, cfg, b)).collect()
        }
    }
}

/// Decodes `cfg.samples` noise draws and tallies the outcomes.
pub fn tally(decoder: &Decoder, sigma: f64, cfg: &MonteCarloConfig) -> Result<Tally> {
    if cfg.samples == 0 {
        return Err(Error::Parameter("sample count must be at least 1".into()));
    }
    let model = NoiseModel::new(sigma, decoder.n())?;
    let total_batches = cfg.samples.div_ceil(BATCH_SIZE);
    let mut acc = Tally::new(2 * decoder.k());
    let round = if cfg.target_relative_stderr.is_some() {
        ROUND_BATCHES
    } else {
        total_batches
    };
    let mut next = 0;
    while next < total_batches {
        let end = (next + round).min(total_batches);
        for t in run_batches(decoder, &model, cfg, next..end)? {
            acc.merge(&t);
        }
        next = end;
        if let Some(target) = cfg.target_relative_stderr {
            if acc.errors > 0 {
                let p = acc.error_rate();
                let se = (p * (1.0 - p) / acc.samples as f64).sqrt();
                if se / p <= target {
                    break;
                }
            }
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MonteCarlo,
    Analytic,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::MonteCarlo => "montecarlo",
            Method::Analytic => "analytic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRateEstimate {
    pub code: String,
    pub scheme: Scheme,
    pub sigma: f64,
    pub samples: u64,
    pub errors: u64,
    pub p_emp: f64,
    pub stderr: f64,
    pub seed: u64,
    pub method: Method,
    pub wall_time: Duration,
}

impl ErrorRateEstimate {
    pub fn from_counts(code: String, scheme: Scheme, sigma: f64, samples: u64, errors: u64, seed: u64) -> Self {
        let p = errors as f64 / samples as f64;
        Self {
            code,
            scheme,
            sigma,
            samples,
            errors,
            p_emp: p,
            stderr: (p * (1.0 - p) / samples as f64).sqrt(),
            seed,
            method: Method::MonteCarlo,
            wall_time: Duration::ZERO,
        }
    }

    pub fn analytic(code: String, scheme: Scheme, sigma: f64, rate: f64) -> Self {
        Self {
            code,
            scheme,
            sigma,
            samples: 0,
            errors: 0,
            p_emp: rate,
            stderr: 0.0,
            seed: 0,
            method: Method::Analytic,
            wall_time: Duration::ZERO,
        }
    }

    pub const CSV_HEADER: &'static str = "code,scheme,sigma,samples,p_emp,stderr,seed,method";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.code,
            self.scheme,
            sig6(self.sigma),
            self.samples,
            sig6(self.p_emp),
            sig6(self.stderr),
            self.seed,
            self.method
        )
    }
}

/// Decimal rendering with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.999995 -> 10.00000).
    let digits = s.chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count();
    if digits > 6 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

/// Estimates the logical error rate of `code` at noise `sigma`.
pub fn estimate(code: &CodeInstance, sigma: f64, samples: u64, seed: u64) -> Result<ErrorRateEstimate> {
    estimate_with(code, sigma, &MonteCarloConfig::new(samples, seed))
}

pub fn estimate_with(code: &CodeInstance, sigma: f64, cfg: &MonteCarloConfig) -> Result<ErrorRateEstimate> {
    let decoder = Decoder::new(code)?;
    estimate_decoder(&decoder, &code.id(), sigma, cfg)
}

pub fn estimate_decoder(decoder: &Decoder, code_id: &str, sigma: f64, cfg: &MonteCarloConfig) -> Result<ErrorRateEstimate> {
    let start = Instant::now();
    let t = tally(decoder, sigma, cfg)?;
    let mut e = ErrorRateEstimate::from_counts(code_id.to_string(), decoder.scheme(), sigma, t.samples, t.errors, cfg.seed);
    e.wall_time = start.elapsed();
    Ok(e)
}

/// Cartesian sweep over codes, schemes and noise levels. Cell `i` (in
/// code-major, then scheme, then sigma order) uses substream family `i`.
/// Invalid code/scheme pairs are reported per cell.
pub fn sweep(
    codes: &[CodeFamily],
    schemes: &[Scheme],
    sigmas: &[f64],
    cfg: &MonteCarloConfig,
    customize: impl Fn(CodeSpec) -> CodeSpec,
) -> Vec<Result<ErrorRateEstimate>> {
    let mut out = Vec::new();
    let mut cell = 0;
    for &family in codes {
        for &scheme in schemes {
            let built = CodeInstance::build(customize(CodeSpec::new(family, scheme))).and_then(|c| Decoder::new(&c).map(|d| (c, d)));
            for &sigma in sigmas {
                let cell_cfg = cfg.with_cell(cell);
                cell += 1;
                out.push(match &built {
                    Ok((c, d)) => estimate_decoder(d, &c.id(), sigma, &cell_cfg),
                    Err(e) => Err(e.clone()),
                });
            }
        }
    }
    out
}
