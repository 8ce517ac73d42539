//! I.i.d. Gaussian displacement noise on all `2n` quadratures.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Noise stream for one Monte Carlo batch: the ChaCha8 stream `stream` of the
/// generator keyed by `seed`.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }
}

/// Displacements `(ξ_1q..ξ_nq, ξ_1p..ξ_np)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseVector(Vec<f64>);

impl NoiseVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() % 2 != 0 {
            return Err(Error::Dimension {
                expected: entries.len() + 1,
                got: entries.len(),
            });
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; 2 * n])
    }

    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn q(&self) -> &[f64] {
        &self.0[..self.n()]
    }

    pub fn p(&self) -> &[f64] {
        &self.0[self.n()..]
    }
}

impl AsRef<[f64]> for NoiseVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma: f64,
    pub n: usize,
}

impl NoiseModel {
    pub fn new(sigma: f64, n: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { sigma, n })
    }

    pub fn sample(&self, stream: &mut NoiseStream) -> NoiseVector {
        let mut v = vec![0.0; 2 * self.n];
        self.sample_into(stream, &mut v);
        NoiseVector(v)
    }

    /// Fills `out` (length `2n`) without allocating.
    #[inline]
    pub fn sample_into(&self, stream: &mut NoiseStream, out: &mut [f64]) {
        debug_assert_eq!(out.len(), 2 * self.n);
        for x in out.iter_mut() {
            *x = self.sigma * stream.standard_normal();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_streams_differ() {
        let m = NoiseModel::new(0.3, 3).unwrap();
        let a = m.sample(&mut NoiseStream::new(5, 0));
        let b = m.sample(&mut NoiseStream::new(5, 0));
        let c = m.sample(&mut NoiseStream::new(5, 1));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.n(), 3);
        assert_eq!(a.q().len(), 3);
    }

    #[test]
    fn tiny_sigma_is_tiny() {
        let m = NoiseModel::new(1e-12, 2).unwrap();
        let v = m.sample(&mut NoiseStream::new(1, 0));
        assert!(v.as_slice().iter().all(|x| x.abs() < 1e-10));
        assert!(NoiseModel::new(0.0, 2).is_err());
    }

    #[test]
    fn moments() {
        let sigma = 0.7;
        let m = NoiseModel::new(sigma, 1).unwrap();
        let mut s = NoiseStream::new(42, 3);
        let draws = 1_000_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        let mut buf = [0.0; 2];
        for _ in 0..draws {
            m.sample_into(&mut s, &mut buf);
            sum += buf[0];
            sq += buf[0] * buf[0];
        }
        let mean = sum / draws as f64;
        let var = sq / draws as f64 - mean * mean;
        assert!(mean.abs() < 4.0 * sigma / 1e3, "mean {mean}");
        assert!((var / (sigma * sigma) - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn entries_uncorrelated() {
        let n = 3;
        let m = NoiseModel::new(1.0, n).unwrap();
        let mut s = NoiseStream::new(9, 0);
        let draws = 100_000;
        let d = 2 * n;
        let mut sum = vec![0.0; d];
        let mut cross = vec![0.0; d * d];
        let mut buf = vec![0.0; d];
        for _ in 0..draws {
            m.sample_into(&mut s, &mut buf);
            for i in 0..d {
                sum[i] += buf[i];
                for j in 0..d {
                    cross[i * d + j] += buf[i] * buf[j];
                }
            }
        }
        let nf = draws as f64;
        let cov = |i: usize, j: usize| cross[i * d + j] / nf - sum[i] * sum[j] / (nf * nf);
        for i in 0..d {
            for j in 0..i {
                let r = cov(i, j) / (cov(i, i) * cov(j, j)).sqrt();
                assert!(r.abs() < 0.01, "corr({i},{j}) = {r}");
            }
        }
    }
}
