//! Sliding window decoding of a terminated coupled chain.
//!
//! The window at position `t` covers row blocks `t..t+W` and column blocks
//! `t..t+W`, both truncated at the end of the chain. Column block `t - 1`
//! has already been decided: its outgoing messages into row block `t` stay
//! fixed at their last values. Messages on edges that remain inside the
//! window after a shift are kept; edges entering for the first time start
//! from the channel prior.

use super::graph::{Flooding, TannerGraph};
use super::StopReason;
use crate::construction::{ScChain, MS};
use crate::metrics::OpLedger;
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct StreamOutcome {
    /// Decisions for all `L M c` symbols.
    pub decisions: Vec<u8>,
    /// Iterations spent at each window position.
    pub iterations: Vec<usize>,
    pub stop_reasons: Vec<StopReason>,
    /// Soft BER estimate of the targets when each window shifted.
    pub soft_ber: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct WindowDecoder {
    engine: Flooding,
    len: usize,
    window: usize,
    rows_per_block: usize,
    cols_per_block: usize,
}

impl WindowDecoder {
    pub fn new(chain: &ScChain, window: usize) -> Result<Self, Error> {
        if window < MS + 1 {
            return Err(Error::Invalid(format!("window size {window} < {}", MS + 1)));
        }
        let h = chain.to_matrix()?;
        Ok(WindowDecoder {
            engine: Flooding::new(TannerGraph::new(&h)),
            len: chain.len(),
            window,
            rows_per_block: chain.blueprint().checks_per_block(),
            cols_per_block: chain.blueprint().symbols_per_block(),
        })
    }

    pub fn q(&self) -> usize {
        self.engine.graph.q
    }

    pub fn n_vars(&self) -> usize {
        self.engine.graph.n_vars
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Decodes a whole frame from flattened priors (`L M c x q`).
    pub fn decode(&mut self, priors: &[f64], imax: usize, target_ber: f64) -> Result<StreamOutcome, Error> {
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
        let (rb, cb, w) = (self.rows_per_block, self.cols_per_block, self.window);
        let mut out = StreamOutcome {
            decisions: Vec::with_capacity(n),
            iterations: Vec::with_capacity(self.len),
            stop_reasons: Vec::with_capacity(self.len),
            soft_ber: Vec::with_capacity(self.len),
        };
        for t in 0..self.len {
            let checks = t * rb..(t + w).min(self.len + MS) * rb;
            let vars = t * cb..(t + w).min(self.len) * cb;
            let targets = t * cb..(t + 1) * cb;
            let mut reason = StopReason::MaxIterations;
            let mut iters = imax;
            let mut est = 1.0;
            for it in 1..=imax {
                self.engine.iterate(checks.clone(), vars.clone());
                est = self.engine.soft_ber(targets.clone());
                if est < target_ber {
                    reason = StopReason::SoftBerMet;
                    iters = it;
                    break;
                }
            }
            self.engine.decide(targets, &mut out.decisions);
            out.iterations.push(iters);
            out.stop_reasons.push(reason);
            out.soft_ber.push(est);
        }
        Ok(out)
    }

    pub fn ledger(&self) -> OpLedger {
        self.engine.ledger
    }

    pub fn take_ledger(&mut self) -> OpLedger {
        std::mem::take(&mut self.engine.ledger)
    }
}

/// Window-decodes one frame of `chain` from flattened priors.
pub fn decode_stream(
    chain: &ScChain,
    priors: &[f64],
    window: usize,
    imax: usize,
    target_ber: f64,
) -> Result<StreamOutcome, Error> {
    if !(target_ber >= 0.0) {
        return Err(Error::Invalid("target BER must be non-negative".into()));
    }
    WindowDecoder::new(chain, window)?.decode(priors, imax, target_ber)
}
