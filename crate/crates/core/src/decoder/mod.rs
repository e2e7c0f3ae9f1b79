//! FFT-QSPA belief propagation in the probability domain.
//!
//! The check-node convolution over the additive group of GF(2^m) is computed
//! with the Walsh-Hadamard transform. Two drivers share one flooding engine:
//! [`BlockDecoder`] runs the whole graph and stops on a zero syndrome;
//! [`WindowDecoder`] slides a window along a coupled chain and stops each
//! window on the soft BER estimate of its target symbols.

mod graph;
pub mod kernels;
mod window;

use serde::{Deserialize, Serialize};

use crate::channel::SymbolPrior;
use crate::galois::FieldTable;
use crate::metrics::OpLedger;
use crate::sparse::QaryParityCheck;
use crate::Error;

pub use graph::{Flooding, TannerGraph};
pub use window::{decode_stream, StreamOutcome, WindowDecoder};

/// Default iteration cap.
pub const DEFAULT_IMAX: usize = 100;
/// Default soft-BER target for the window stopping rule.
pub const DEFAULT_STOP_BER: f64 = 1e-6;

/// Probability vector over GF(q).
#[derive(Debug, Clone, PartialEq)]
pub struct MessageVector {
    pub probs: Vec<f64>,
}

impl MessageVector {
    pub fn new(probs: Vec<f64>) -> Self {
        MessageVector { probs }
    }

    pub fn uniform(q: usize) -> Self {
        MessageVector {
            probs: vec![1.0 / q as f64; q],
        }
    }

    pub fn q(&self) -> usize {
        self.probs.len()
    }
}

impl From<SymbolPrior> for MessageVector {
    fn from(p: SymbolPrior) -> Self {
        MessageVector { probs: p.probs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    SyndromeZero,
    SoftBerMet,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub decisions: Vec<u8>,
    pub iterations: usize,
    pub stop_reason: StopReason,
}

/// Unnormalized Walsh-Hadamard transform,
/// `out[u] = sum_b (-1)^popcount(u & b) v[b]`.
pub fn wht(v: &[f64]) -> Vec<f64> {
    assert!(v.len().is_power_of_two(), "length must be a power of two");
    let mut out = v.to_vec();
    kernels::wht_in_place(&mut out);
    out
}

fn mul_table(field: &FieldTable) -> Vec<u8> {
    let q = field.q();
    let mut mul = vec![0u8; q * q];
    for a in 0..q {
        for b in 0..q {
            mul[a * q + b] = field.mul(a as u8, b as u8);
        }
    }
    mul
}

/// Check-node update for one check with the given incoming messages and
/// nonzero labels. Output `k` is the distribution of edge `k`'s symbol that
/// satisfies `sum_j h_j v_j = 0` given the other incoming messages.
pub fn check_update(
    incoming: &[MessageVector],
    labels: &[u8],
    field: &FieldTable,
) -> Result<Vec<MessageVector>, Error> {
    let q = field.q();
    if incoming.len() != labels.len() {
        return Err(Error::Dimension {
            expected: labels.len(),
            got: incoming.len(),
        });
    }
    if incoming.len() < 2 {
        return Err(Error::Invalid("check degree must be at least 2".into()));
    }
    if labels.iter().any(|&h| h == 0 || h as usize >= q) {
        return Err(Error::Invalid("check labels must be nonzero field elements".into()));
    }
    if incoming.iter().any(|m| m.q() != q) {
        return Err(Error::Invalid("message length differs from field size".into()));
    }
    let flat: Vec<f64> = incoming.iter().flat_map(|m| m.probs.iter().copied()).collect();
    let mut out = vec![0.0; flat.len()];
    let mut ledger = OpLedger::default();
    kernels::check_node(
        q,
        &mul_table(field),
        &flat,
        labels,
        0,
        &mut out,
        &mut kernels::Scratch::default(),
        &mut ledger,
    );
    Ok(out.chunks_exact(q).map(|c| MessageVector::new(c.to_vec())).collect())
}

/// Variable-node update: extrinsic outputs and the posterior.
pub fn var_update(prior: &SymbolPrior, incoming: &[MessageVector]) -> (Vec<MessageVector>, MessageVector) {
    let (out, post, _) = var_update_counted(prior, incoming);
    (out, post)
}

/// [`var_update`] together with the operations it performed.
pub fn var_update_counted(prior: &SymbolPrior, incoming: &[MessageVector]) -> (Vec<MessageVector>, MessageVector, OpLedger) {
    let q = prior.probs.len();
    let flat: Vec<f64> = incoming.iter().flat_map(|m| m.probs.iter().copied()).collect();
    let mut out = vec![0.0; flat.len()];
    let mut post = vec![0.0; q];
    let mut ledger = OpLedger::default();
    kernels::var_node(
        q,
        &prior.probs,
        &flat,
        &mut out,
        &mut post,
        &mut kernels::Scratch::default(),
        &mut ledger,
    );
    (
        out.chunks_exact(q).map(|c| MessageVector::new(c.to_vec())).collect(),
        MessageVector::new(post),
        ledger,
    )
}

/// Most probable symbol; ties go to the smallest element.
pub fn hard_decision(posterior: &MessageVector) -> u8 {
    kernels::argmax(&posterior.probs) as u8
}

/// Soft BER estimate: mean over targets of `1 - max_b P(b)`.
pub fn soft_ber_estimate(target_posteriors: &[MessageVector]) -> f64 {
    if target_posteriors.is_empty() {
        return 0.0;
    }
    let s: f64 = target_posteriors
        .iter()
        .map(|p| 1.0 - p.probs.iter().copied().fold(f64::MIN, f64::max))
        .sum();
    s / target_posteriors.len() as f64
}

/// Syndrome of `v` under `h`; returns whether it is all zero and the vector.
pub fn syndrome(h: &QaryParityCheck, v: &[u8]) -> Result<(bool, Vec<u8>), Error> {
    if v.len() != h.n_cols() {
        return Err(Error::Dimension {
            expected: h.n_cols(),
            got: v.len(),
        });
    }
    let f = h.field();
    let s: Vec<u8> = h
        .rows()
        .iter()
        .map(|row| row.iter().fold(0u8, |acc, &(c, l)| acc ^ f.mul(l, v[c as usize])))
        .collect();
    Ok((s.iter().all(|&x| x == 0), s))
}

/// Full-block flooding decoder with the parity-check stopping rule.
#[derive(Debug, Clone)]
pub struct BlockDecoder {
    engine: Flooding,
    decisions: Vec<u8>,
}

impl BlockDecoder {
    pub fn new(h: &QaryParityCheck) -> Self {
        BlockDecoder {
            engine: Flooding::new(TannerGraph::new(h)),
            decisions: Vec::new(),
        }
    }

    pub fn q(&self) -> usize {
        self.engine.graph.q
    }

    pub fn n_vars(&self) -> usize {
        self.engine.graph.n_vars
    }

    /// Decodes from flattened priors (`n_vars x q`).
    pub fn decode(&mut self, priors: &[f64], imax: usize) -> Result<DecodeOutcome, Error> {
        let (n, q) = (self.engine.graph.n_vars, self.engine.graph.q);
        if priors.len() != n * q {
            return Err(Error::Dimension {
                expected: n * q,
                got: priors.len(),
            });
        }
        if imax == 0 {
            return Err(Error::Invalid("iteration cap must be at least 1".into()));
        }
        self.engine.reset(priors);
        let checks = 0..self.engine.graph.n_checks;
        for it in 1..=imax {
            self.engine.iterate(checks.clone(), 0..n);
            self.decisions.clear();
            self.engine.decide(0..n, &mut self.decisions);
            let ok = {
                let x = std::mem::take(&mut self.decisions);
                let ok = self.engine.checks_satisfied(checks.clone(), &x, 0);
                self.decisions = x;
                ok
            };
            if ok {
                return Ok(self.outcome(it, StopReason::SyndromeZero));
            }
        }
        Ok(self.outcome(imax, StopReason::MaxIterations))
    }

    /// Runs exactly `iterations` flooding iterations with no stopping rule
    /// and returns the posteriors.
    pub fn run_fixed(&mut self, priors: &[f64], iterations: usize) -> Result<Vec<MessageVector>, Error> {
        let (n, q) = (self.engine.graph.n_vars, self.engine.graph.q);
        if priors.len() != n * q {
            return Err(Error::Dimension {
                expected: n * q,
                got: priors.len(),
            });
        }
        self.engine.reset(priors);
        for _ in 0..iterations {
            self.engine.iterate(0..self.engine.graph.n_checks, 0..n);
        }
        Ok(self.posteriors())
    }

    fn outcome(&self, iterations: usize, stop_reason: StopReason) -> DecodeOutcome {
        DecodeOutcome {
            decisions: self.decisions.clone(),
            iterations,
            stop_reason,
        }
    }

    /// Posteriors after the last decode.
    pub fn posteriors(&self) -> Vec<MessageVector> {
        self.engine
            .posteriors
            .chunks_exact(self.engine.graph.q)
            .map(|c| MessageVector::new(c.to_vec()))
            .collect()
    }

    pub fn ledger(&self) -> OpLedger {
        self.engine.ledger
    }

    pub fn take_ledger(&mut self) -> OpLedger {
        std::mem::take(&mut self.engine.ledger)
    }
}

/// Flattens per-symbol priors into the `n x q` layout used by the decoders.
pub fn flatten_priors(priors: &[SymbolPrior]) -> Vec<f64> {
    priors.iter().flat_map(|p| p.probs.iter().copied()).collect()
}

/// Decodes one block from per-symbol priors.
pub fn decode_block(h: &QaryParityCheck, priors: &[SymbolPrior], imax: usize) -> Result<DecodeOutcome, Error> {
    if priors.len() != h.n_cols() {
        return Err(Error::Dimension {
            expected: h.n_cols(),
            got: priors.len(),
        });
    }
    if priors.iter().any(|p| p.probs.len() != h.field().q()) {
        return Err(Error::Invalid("prior length differs from field size".into()));
    }
    BlockDecoder::new(h).decode(&flatten_priors(priors), imax)
}
