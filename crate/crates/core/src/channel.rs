//! BPSK over the binary-input AWGN channel and symbol priors.
//!
//! Symbol `b` is sent as its `m` polynomial-basis bits, constant term first;
//! bit 0 maps to +1 and bit 1 to -1.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::galois::FieldTable;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    pub rate: f64,
    pub m: u32,
    pub sigma2: f64,
}

impl ChannelConfig {
    /// Noise variance `1 / (2 R 10^(Eb/N0 / 10))`.
    pub fn new(ebn0_db: f64, rate: f64, m: u32) -> Self {
        let sigma2 = 1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0));
        ChannelConfig {
            ebn0_db,
            rate,
            m,
            sigma2,
        }
    }

    /// A channel with an explicit noise variance (used for limits in tests).
    pub fn with_sigma2(sigma2: f64, m: u32) -> Self {
        ChannelConfig {
            ebn0_db: f64::NAN,
            rate: f64::NAN,
            m,
            sigma2,
        }
    }
}

/// Probability vector over GF(q) for one received symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPrior {
    pub probs: Vec<f64>,
}

impl SymbolPrior {
    pub fn uniform(q: usize) -> Self {
        SymbolPrior {
            probs: vec![1.0 / q as f64; q],
        }
    }

    /// All mass on `b`.
    pub fn certain(q: usize, b: u8) -> Self {
        let mut probs = vec![0.0; q];
        probs[b as usize] = 1.0;
        SymbolPrior { probs }
    }
}

/// Modulates `symbols` and adds white Gaussian noise of variance `sigma2`.
pub fn modulate_awgn<R: Rng>(symbols: &[u8], field: &FieldTable, cfg: &ChannelConfig, rng: &mut R) -> Vec<f64> {
    let m = field.m();
    let sigma = cfg.sigma2.sqrt();
    let mut out = Vec::with_capacity(symbols.len() * m as usize);
    for &s in symbols {
        for i in 0..m {
            let x = if field.bit(s, i) == 0 { 1.0 } else { -1.0 };
            let n: f64 = rng.sample(StandardNormal);
            out.push(x + sigma * n);
        }
    }
    out
}

/// Writes the posterior probability of bit value 1 for each received sample.
#[inline]
fn bit_one_prob(y: f64, sigma2: f64) -> f64 {
    1.0 / (1.0 + (2.0 * y / sigma2).exp())
}

/// Prior over GF(q) for one symbol from its `m` received samples.
pub fn symbol_priors(y: &[f64], cfg: &ChannelConfig, field: &FieldTable) -> Result<SymbolPrior, Error> {
    let m = field.m() as usize;
    if y.len() != m {
        return Err(Error::Dimension {
            expected: m,
            got: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) || !(cfg.sigma2 > 0.0) {
        return Err(Error::Invalid("non-finite channel output".into()));
    }
    let mut probs = vec![0.0; field.q()];
    fill_symbol_prior(y, cfg.sigma2, &mut probs);
    Ok(SymbolPrior { probs })
}

/// Unchecked inner loop of [`symbol_priors`]; `out.len()` must be `2^y.len()`.
pub(crate) fn fill_symbol_prior(y: &[f64], sigma2: f64, out: &mut [f64]) {
    let mut p1 = [0.0f64; 8];
    for (i, &v) in y.iter().enumerate() {
        p1[i] = bit_one_prob(v, sigma2);
    }
    // The per-bit posteriors multiply to a normalized distribution.
    for (b, o) in out.iter_mut().enumerate() {
        let mut p = 1.0;
        for (i, &pi) in p1.iter().enumerate().take(y.len()) {
            p *= if (b >> i) & 1 == 1 { pi } else { 1.0 - pi };
        }
        *o = p;
    }
    let s: f64 = out.iter().sum();
    if s > 0.0 && (s - 1.0).abs() > 1e-15 {
        out.iter_mut().for_each(|v| *v /= s);
    }
}

/// Priors for a whole received frame, flattened as `symbols x q`.
pub fn frame_priors(y: &[f64], sigma2: f64, field: &FieldTable) -> Vec<f64> {
    let (m, q) = (field.m() as usize, field.q());
    let n = y.len() / m;
    let mut out = vec![0.0; n * q];
    for (ys, o) in y.chunks_exact(m).zip(out.chunks_exact_mut(q)) {
        fill_symbol_prior(ys, sigma2, o);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn gaussian(y: f64, x: f64, s2: f64) -> f64 {
        (-(y - x) * (y - x) / (2.0 * s2)).exp()
    }

    #[test]
    fn sigma2_from_ebn0() {
        let c = ChannelConfig::new(0.0, 0.5, 3);
        assert!((c.sigma2 - 1.0).abs() < 1e-15);
        let c = ChannelConfig::new(3.0, 0.5, 3);
        assert!((c.sigma2 - 1.0 / 10f64.powf(0.3)).abs() < 1e-15);
    }

    #[test]
    fn noiseless_all_zero() {
        let f = FieldTable::new(3).unwrap();
        let cfg = ChannelConfig::with_sigma2(0.0, 3);
        let y = modulate_awgn(&[0; 100], &f, &cfg, &mut rng::substream(1, 2, 3));
        assert_eq!(y.len(), 300);
        assert!(y.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn bit_order_is_lsb_first() {
        let f = FieldTable::new(3).unwrap();
        let cfg = ChannelConfig::with_sigma2(0.0, 3);
        let y = modulate_awgn(&[0b001, 0b110], &f, &cfg, &mut rng::substream(1, 2, 3));
        assert_eq!(y, vec![-1.0, 1.0, 1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn noise_variance() {
        let f = FieldTable::new(1).unwrap();
        let cfg = ChannelConfig::with_sigma2(0.7, 1);
        let y = modulate_awgn(&vec![0; 1_000_000], &f, &cfg, &mut rng::substream(42, 2, 0));
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        assert!((var / 0.7 - 1.0).abs() < 0.01, "{var}");
    }

    #[test]
    fn symmetric_evidence() {
        let f = FieldTable::new(1).unwrap();
        let p = symbol_priors(&[0.0], &ChannelConfig::with_sigma2(0.5, 1), &f).unwrap();
        assert_eq!(p.probs, vec![0.5, 0.5]);
    }

    #[test]
    fn near_noiseless_limit() {
        let f = FieldTable::new(1).unwrap();
        let p = symbol_priors(&[1.0], &ChannelConfig::with_sigma2(1e-4, 1), &f).unwrap();
        assert_eq!(p.probs, vec![1.0, 0.0]);
    }

    #[test]
    fn two_bit_prior_matches_gaussian_likelihoods() {
        let f = FieldTable::new(2).unwrap();
        let (y, s2) = ([0.8, -0.3], 0.5);
        let p = symbol_priors(&y, &ChannelConfig::with_sigma2(s2, 2), &f).unwrap();
        let mut lik = [0.0; 4];
        for (b, l) in lik.iter_mut().enumerate() {
            *l = (0..2)
                .map(|i| gaussian(y[i], if (b >> i) & 1 == 0 { 1.0 } else { -1.0 }, s2))
                .product();
        }
        let s: f64 = lik.iter().sum();
        for b in 0..4 {
            assert!((p.probs[b] - lik[b] / s).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let f = FieldTable::new(2).unwrap();
        let c = ChannelConfig::with_sigma2(0.5, 2);
        assert!(symbol_priors(&[0.1], &c, &f).is_err());
        assert!(symbol_priors(&[0.1, f64::NAN], &c, &f).is_err());
    }

    #[test]
    fn sign_flip_complements_symbol() {
        let f = FieldTable::new(3).unwrap();
        let c = ChannelConfig::with_sigma2(0.8, 3);
        let y = [0.3, -1.2, 0.5];
        let neg = [-0.3, 1.2, -0.5];
        let a = symbol_priors(&y, &c, &f).unwrap();
        let b = symbol_priors(&neg, &c, &f).unwrap();
        for s in 0..8 {
            assert!((a.probs[s] - b.probs[s ^ 7]).abs() < 1e-15);
        }
    }

    #[test]
    fn binary_prior_is_sigmoid() {
        let f = FieldTable::new(1).unwrap();
        let c = ChannelConfig::with_sigma2(0.6, 1);
        for &y in &[-2.0, -0.4, 0.0, 0.9, 3.1] {
            let p = symbol_priors(&[y], &c, &f).unwrap();
            assert!((p.probs[0] - 1.0 / (1.0 + (-2.0 * y / 0.6f64).exp())).abs() < 1e-15);
        }
    }
}
