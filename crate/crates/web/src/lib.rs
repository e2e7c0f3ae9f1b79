//! WebAssembly bindings for a small interactive page: coupled-chain matrix
//! structure, a check-node message explorer and a quick BER curve.
//!
//! Every export returns a JSON string. The `*_json` functions hold the logic
//! and also run natively, which is how the tests exercise them.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qldpc::construction::{build_sc_chain, CodeBlueprint};
use qldpc::decoder::{check_update, MessageVector};
use qldpc::harness::{Mode, SimConfig, Simulator};
use qldpc::oracle::naive_check_update;
use qldpc::{Error, FieldTable};

/// Largest chain the structure view will serialize.
const MAX_STRUCTURE_EDGES: usize = 200_000;
/// Frame cap per point for the in-browser simulation.
const MAX_DEMO_FRAMES: u64 = 2_000;

#[derive(Serialize)]
struct Structure {
    rows: usize,
    cols: usize,
    rows_per_block: usize,
    cols_per_block: usize,
    row_weights: Vec<usize>,
    col_weights: Vec<usize>,
    fingerprint: String,
    /// `[row, col, label]` for every nonzero entry.
    entries: Vec<[u32; 3]>,
}

pub fn sc_structure_json(dv: usize, dc: usize, lifting: usize, q: usize, chain_len: usize, seed: u64) -> Result<String, Error> {
    if !q.is_power_of_two() {
        return Err(Error::UnsupportedField(q as u32));
    }
    let bp = CodeBlueprint::new(dv, dc, lifting, q.trailing_zeros(), seed)?;
    let h = build_sc_chain(&bp, chain_len)?.to_matrix()?;
    if h.n_edges() > MAX_STRUCTURE_EDGES {
        return Err(Error::Budget(format!("{} nonzeros is too many to draw", h.n_edges())));
    }
    let s = Structure {
        rows: h.n_rows(),
        cols: h.n_cols(),
        rows_per_block: bp.checks_per_block(),
        cols_per_block: bp.symbols_per_block(),
        row_weights: h.row_weights(),
        col_weights: h.col_weights(),
        fingerprint: format!("{:016x}", h.fingerprint()),
        entries: h.triples().map(|(r, c, l)| [r as u32, c as u32, l as u32]).collect(),
    };
    Ok(serde_json::to_string(&s)?)
}

#[derive(Serialize)]
struct CheckExplorer {
    fft: Vec<Vec<f64>>,
    naive: Vec<Vec<f64>>,
    max_deviation: f64,
}

/// `probs` holds one unnormalized row of `q` weights per edge.
pub fn check_node_json(q: usize, labels: &[u8], probs: &[f64]) -> Result<String, Error> {
    if !q.is_power_of_two() || q < 2 {
        return Err(Error::UnsupportedField(q as u32));
    }
    let field = FieldTable::new(q.trailing_zeros())?;
    if probs.len() != labels.len() * q {
        return Err(Error::Dimension {
            expected: labels.len() * q,
            got: probs.len(),
        });
    }
    let incoming = probs
        .chunks_exact(q)
        .map(|row| {
            let s: f64 = row.iter().sum();
            if row.iter().any(|&p| !(p >= 0.0)) || !(s > 0.0) {
                return Err(Error::Invalid("each message needs non-negative weights with positive sum".into()));
            }
            Ok(MessageVector::new(row.iter().map(|p| p / s).collect()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let fft = check_update(&incoming, labels, &field)?;
    let naive = naive_check_update(&incoming, labels, &field)?;
    let max_deviation = fft
        .iter()
        .zip(&naive)
        .flat_map(|(a, b)| a.probs.iter().zip(&b.probs).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    let out = CheckExplorer {
        fft: fft.into_iter().map(|m| m.probs).collect(),
        naive: naive.into_iter().map(|m| m.probs).collect(),
        max_deviation,
    };
    Ok(serde_json::to_string(&out)?)
}

#[derive(Serialize)]
struct CurvePoint {
    ebn0_db: f64,
    frames: u64,
    bits: u64,
    bit_errors: u64,
    ber: f64,
    avg_iters: f64,
    ops_per_bit: f64,
}

#[derive(Serialize)]
struct Curve {
    latency_bits: usize,
    points: Vec<CurvePoint>,
}

#[allow(clippy::too_many_arguments)]
pub fn ber_curve_json(
    dv: usize,
    dc: usize,
    lifting: usize,
    q: usize,
    window: usize,
    chain_len: usize,
    ebn0_db: &[f64],
    frames: u64,
    seed: u64,
) -> Result<String, Error> {
    let cfg = SimConfig {
        dv,
        dc,
        lifting,
        q,
        chain_len,
        mode: if window == 0 { Mode::Block } else { Mode::ScWindow },
        window,
        seed,
        max_frames: frames.min(MAX_DEMO_FRAMES),
        ..SimConfig::default()
    };
    let mut sim = Simulator::new(&cfg)?;
    let points = ebn0_db
        .iter()
        .map(|&x| {
            let r = sim.run_point(x)?;
            Ok(CurvePoint {
                ebn0_db: r.ebn0_db,
                frames: r.frames,
                bits: r.bits,
                bit_errors: r.bit_errors,
                ber: r.ber,
                avg_iters: r.avg_iters,
                ops_per_bit: r.ops_per_bit,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(serde_json::to_string(&Curve {
        latency_bits: sim.latency().bits,
        points,
    })?)
}

fn js(r: Result<String, Error>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Nonzero pattern of a terminated coupled chain.
#[wasm_bindgen]
pub fn sc_structure(dv: usize, dc: usize, lifting: usize, q: usize, chain_len: usize, seed: u64) -> Result<String, JsValue> {
    js(sc_structure_json(dv, dc, lifting, q, chain_len, seed))
}

/// FFT and brute-force check-node outputs for the given messages.
#[wasm_bindgen]
pub fn check_node(q: usize, labels: Vec<u8>, probs: Vec<f64>) -> Result<String, JsValue> {
    js(check_node_json(q, &labels, &probs))
}

/// Short BER simulation; `window = 0` selects the block code.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn ber_curve(
    dv: usize,
    dc: usize,
    lifting: usize,
    q: usize,
    window: usize,
    chain_len: usize,
    ebn0_db: Vec<f64>,
    frames: u64,
    seed: u64,
) -> Result<String, JsValue> {
    js(ber_curve_json(dv, dc, lifting, q, window, chain_len, &ebn0_db, frames, seed))
}
