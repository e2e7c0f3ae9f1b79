//! Decoding latency, formula complexity estimates and instrumented
//! operation counting.
//!
//! Counting convention, in real add/multiply equivalents on probability
//! values: a length-`q` Walsh-Hadamard transform costs `q log2 q`, an
//! entry-wise product of two length-`q` vectors costs `q`, and a
//! normalization costs `2q`. Label permutations, hard decisions and syndrome
//! checks are reported separately and excluded from the headline total.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatencyKind {
    Block,
    ScWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub kind: LatencyKind,
    pub bits: usize,
    pub lifting: usize,
    pub m: u32,
    pub c: usize,
    pub window: Option<usize>,
}

/// Decoding latency in bits.
///
/// A paired block code spans two protograph copies, `2 M m c`; a window
/// decoder must hold `W M m c` bits.
pub fn latency_bits(kind: LatencyKind, lifting: usize, m: u32, c: usize, window: Option<usize>) -> Result<LatencyReport, Error> {
    if lifting == 0 || m == 0 || c == 0 {
        return Err(Error::Invalid("latency parameters must be positive".into()));
    }
    let per_block = lifting * m as usize * c;
    let bits = match (kind, window) {
        (LatencyKind::Block, _) => 2 * per_block,
        (LatencyKind::ScWindow, Some(w)) if w > 0 => w * per_block,
        (LatencyKind::ScWindow, _) => {
            return Err(Error::Invalid("window size required for sliding window latency".into()))
        }
    };
    Ok(LatencyReport {
        kind,
        bits,
        lifting,
        m,
        c,
        window: if kind == LatencyKind::ScWindow { window } else { None },
    })
}

/// Order-of-magnitude complexity per decoded bit, `(dv/m + dv) q I`, times
/// `W` for a window decoder.
pub fn complexity_formula(dv: usize, m: u32, q: usize, iterations: f64, window: Option<usize>) -> f64 {
    let per_iter = (dv as f64 / m as f64 + dv as f64) * q as f64;
    per_iter * iterations * window.unwrap_or(1) as f64
}

#[inline]
pub fn wht_cost(q: usize) -> u64 {
    (q * q.trailing_zeros() as usize) as u64
}

#[inline]
pub fn product_cost(q: usize) -> u64 {
    q as u64
}

#[inline]
pub fn normalization_cost(q: usize) -> u64 {
    2 * q as u64
}

/// Cost of one check-node update of degree `d` whose first `frozen` edges
/// lead to already decided symbols and receive no output.
pub fn check_node_cost(d: usize, frozen: usize, q: usize) -> OpLedger {
    let mut l = OpLedger::default();
    let emitted = d.saturating_sub(frozen) as u64;
    if d <= 1 {
        l.normalization_ops = emitted * normalization_cost(q);
        return l;
    }
    let interior = (frozen..d).filter(|&j| j > 0 && j + 1 < d).count() as u64;
    l.wht_ops = (d as u64 + emitted) * wht_cost(q);
    l.product_ops = (2 * (d as u64 - 2) + interior) * product_cost(q);
    l.normalization_ops = emitted * normalization_cost(q);
    l
}

/// Cost of one variable-node update of degree `d` (outputs plus posterior).
pub fn var_node_cost(d: usize, q: usize) -> OpLedger {
    let mut l = OpLedger::default();
    if d == 0 {
        return l;
    }
    let products = d + d.saturating_sub(2) + (d - 1);
    l.product_ops = products as u64 * product_cost(q);
    l.normalization_ops = (d + 1) as u64 * normalization_cost(q);
    l
}

/// Operations per code bit for one flooding iteration over a fully
/// `(dv, dc)`-regular graph.
pub fn regular_iteration_ops_per_bit(dv: usize, dc: usize, m: u32) -> f64 {
    let q = 1usize << m;
    let checks_per_var = dv as f64 / dc as f64;
    let per_symbol = var_node_cost(dv, q).total() as f64 + checks_per_var * check_node_cost(dc, 0, q).total() as f64;
    per_symbol / m as f64
}

/// Window estimate that treats every node in the window as full degree.
pub fn regular_window_estimate(dv: usize, dc: usize, m: u32, window: usize, iterations: f64) -> f64 {
    regular_iteration_ops_per_bit(dv, dc, m) * window as f64 * iterations
}

/// Instrumented operation counters. Merging is associative and commutative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpLedger {
    pub wht_ops: u64,
    pub product_ops: u64,
    pub normalization_ops: u64,
    /// Hard-decision and syndrome work; not part of [`OpLedger::total`].
    pub compare_ops: u64,
}

impl OpLedger {
    pub fn total(&self) -> u64 {
        self.wht_ops + self.product_ops + self.normalization_ops
    }
}

impl Add for OpLedger {
    type Output = OpLedger;
    fn add(self, o: OpLedger) -> OpLedger {
        OpLedger {
            wht_ops: self.wht_ops + o.wht_ops,
            product_ops: self.product_ops + o.product_ops,
            normalization_ops: self.normalization_ops + o.normalization_ops,
            compare_ops: self.compare_ops + o.compare_ops,
        }
    }
}

impl AddAssign for OpLedger {
    fn add_assign(&mut self, o: OpLedger) {
        *self = *self + o;
    }
}

/// Measured operations per decoded bit.
pub fn complexity_measured(ledger: &OpLedger, decoded_bits: u64) -> Result<f64, Error> {
    if decoded_bits == 0 {
        return Err(Error::Invalid("no decoded bits".into()));
    }
    Ok(ledger.total() as f64 / decoded_bits as f64)
}

/// Measured and estimated complexity for one operating point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexityLedger {
    pub ops: OpLedger,
    pub decoded_bits: u64,
    /// Decoded blocks (block mode) or windows (window mode).
    pub decodes: u64,
    pub iterations: u64,
}

impl ComplexityLedger {
    pub fn avg_iterations(&self) -> f64 {
        if self.decodes == 0 {
            0.0
        } else {
            self.iterations as f64 / self.decodes as f64
        }
    }

    pub fn ops_per_bit(&self) -> f64 {
        complexity_measured(&self.ops, self.decoded_bits).unwrap_or(0.0)
    }
}

impl Add for ComplexityLedger {
    type Output = ComplexityLedger;
    fn add(self, o: ComplexityLedger) -> ComplexityLedger {
        ComplexityLedger {
            ops: self.ops + o.ops,
            decoded_bits: self.decoded_bits + o.decoded_bits,
            decodes: self.decodes + o.decodes,
            iterations: self.iterations + o.iterations,
        }
    }
}

impl AddAssign for ComplexityLedger {
    fn add_assign(&mut self, o: ComplexityLedger) {
        *self = *self + o;
    }
}
