//! Monte Carlo experiment driver.
//!
//! Every frame sends the all-zero codeword through its own noise stream
//! keyed by `(seed, Eb/N0, frame index)`, so a point is a pure function of
//! the configuration and the operating point.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::channel::{frame_priors, modulate_awgn, ChannelConfig};
use crate::construction::{build_block_code, build_sc_chain, CodeBlueprint, ScChain, DEFAULT_CHAIN_LEN, MS};
use crate::decoder::{BlockDecoder, WindowDecoder, DEFAULT_IMAX, DEFAULT_STOP_BER};
use crate::metrics::{
    complexity_formula, latency_bits, regular_window_estimate, ComplexityLedger, LatencyKind, LatencyReport,
};
use crate::rng;
use crate::sparse::QaryParityCheck;
use crate::Error;

/// Smallest error count accepted as a stopping threshold.
pub const MIN_ERRORS_FLOOR: u64 = 50;
pub const DEFAULT_MIN_ERRORS: u64 = 100;
pub const DEFAULT_MAX_FRAMES: u64 = 200_000;
/// Bisection stops once the bracket is this narrow.
pub const SNR_RESOLUTION_DB: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Block,
    ScWindow,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "block" | "bc" => Ok(Mode::Block),
            "sc" | "sc_window" | "window" => Ok(Mode::ScWindow),
            _ => Err(Error::Invalid(format!("unknown mode '{s}' (block or sc)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub dv: usize,
    pub dc: usize,
    /// Lifting factor `M`.
    pub lifting: usize,
    pub q: usize,
    /// Coupled chain length `L`; ignored in block mode.
    pub chain_len: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Window size `W`; ignored in block mode.
    pub window: usize,
    pub imax: usize,
    /// Soft-BER target of the window stopping rule.
    pub stop_ber: f64,
    pub ebn0_db: Vec<f64>,
    pub min_errors: u64,
    pub max_frames: u64,
    /// Optional cap on simulated bits per point.
    pub max_bits: Option<u64>,
    /// CSV output path; the manifest goes next to it with a `.json` extension.
    pub out: Option<PathBuf>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dv: 3,
            dc: 6,
            lifting: 64,
            q: 8,
            chain_len: DEFAULT_CHAIN_LEN,
            seed: 1,
            mode: Mode::Block,
            window: 6,
            imax: DEFAULT_IMAX,
            stop_ber: DEFAULT_STOP_BER,
            ebn0_db: Vec::new(),
            min_errors: DEFAULT_MIN_ERRORS,
            max_frames: DEFAULT_MAX_FRAMES,
            max_bits: None,
            out: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(2..=32).contains(&self.q) || !self.q.is_power_of_two() {
            return Err(Error::UnsupportedField(self.q as u32));
        }
        if self.imax == 0 {
            return Err(Error::Invalid("imax must be at least 1".into()));
        }
        if !(self.stop_ber >= 0.0) {
            return Err(Error::Invalid("stop BER must be non-negative".into()));
        }
        if self.min_errors < MIN_ERRORS_FLOOR {
            return Err(Error::Invalid(format!(
                "min errors {} below the floor of {MIN_ERRORS_FLOOR}",
                self.min_errors
            )));
        }
        if self.ebn0_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("Eb/N0 values must be finite".into()));
        }
        if self.mode == Mode::ScWindow {
            if self.window < MS + 1 {
                return Err(Error::Invalid(format!("window size {} < {}", self.window, MS + 1)));
            }
            if self.chain_len == 0 {
                return Err(Error::Invalid("chain length must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn blueprint(&self) -> Result<CodeBlueprint, Error> {
        CodeBlueprint::new(self.dv, self.dc, self.lifting, self.q.trailing_zeros(), self.seed)
    }

    pub fn latency(&self) -> Result<LatencyReport, Error> {
        let m = self.q.trailing_zeros();
        let c = crate::construction::component_matrices(self.dv, self.dc)?.c();
        match self.mode {
            Mode::Block => latency_bits(LatencyKind::Block, self.lifting, m, c, None),
            Mode::ScWindow => latency_bits(LatencyKind::ScWindow, self.lifting, m, c, Some(self.window)),
        }
    }
}

/// Results at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    /// Iterations per block (block mode) or per window position.
    pub avg_iters: f64,
    pub ops_per_bit: f64,
    pub latency_bits: usize,
    /// False when the frame or bit budget ran out before `min_errors`.
    pub reliable: bool,
    pub ledger: ComplexityLedger,
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub avg_iters: f64,
    pub ops_per_bit: f64,
    pub latency_bits: usize,
    pub reliable: bool,
}

pub const CSV_COLUMNS: [&str; 9] = [
    "ebn0_db",
    "frames",
    "bits",
    "bit_errors",
    "ber",
    "avg_iters",
    "ops_per_bit",
    "latency_bits",
    "reliable",
];

impl From<&SimRecord> for CsvRow {
    fn from(r: &SimRecord) -> Self {
        CsvRow {
            ebn0_db: r.ebn0_db,
            frames: r.frames,
            bits: r.bits,
            bit_errors: r.bit_errors,
            ber: r.ber,
            avg_iters: r.avg_iters,
            ops_per_bit: r.ops_per_bit,
            latency_bits: r.latency_bits,
            reliable: r.reliable,
        }
    }
}

enum Engine {
    Block(BlockDecoder),
    Window(Box<WindowDecoder>),
}

/// A constructed code and decoder, reusable across operating points.
pub struct Simulator {
    cfg: SimConfig,
    blueprint: CodeBlueprint,
    engine: Engine,
    n_symbols: usize,
    fingerprint: u64,
    latency: LatencyReport,
    chain: Option<ScChain>,
}

impl Simulator {
    pub fn new(cfg: &SimConfig) -> Result<Self, Error> {
        cfg.validate()?;
        let blueprint = cfg.blueprint()?;
        let latency = cfg.latency()?;
        let (engine, n_symbols, fingerprint, chain) = match cfg.mode {
            Mode::Block => {
                let h = build_block_code(&blueprint)?;
                (Engine::Block(BlockDecoder::new(&h)), h.n_cols(), h.fingerprint(), None)
            }
            Mode::ScWindow => {
                let chain = build_sc_chain(&blueprint, cfg.chain_len)?;
                let h = chain.to_matrix()?;
                let dec = WindowDecoder::new(&chain, cfg.window)?;
                (Engine::Window(Box::new(dec)), h.n_cols(), h.fingerprint(), Some(chain))
            }
        };
        Ok(Simulator {
            cfg: cfg.clone(),
            blueprint,
            engine,
            n_symbols,
            fingerprint,
            latency,
            chain,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn blueprint(&self) -> &CodeBlueprint {
        &self.blueprint
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn frame_bits(&self) -> usize {
        self.n_symbols * self.blueprint.m() as usize
    }

    pub fn latency(&self) -> LatencyReport {
        self.latency
    }

    /// Rate after termination; equals the design rate in block mode.
    pub fn effective_rate(&self) -> f64 {
        match &self.chain {
            None => self.blueprint.rate(),
            Some(ch) => 1.0 - ch.n_rows() as f64 / ch.n_cols() as f64,
        }
    }

    /// The full parity-check matrix of the simulated code.
    pub fn matrix(&self) -> Result<QaryParityCheck, Error> {
        match &self.chain {
            None => build_block_code(&self.blueprint),
            Some(ch) => ch.to_matrix(),
        }
    }

    /// Simulates frames at one point until `min_errors` bit errors, the
    /// frame budget or the optional bit budget is reached.
    pub fn run_point(&mut self, ebn0_db: f64) -> Result<SimRecord, Error> {
        self.run_point_capped(ebn0_db, self.cfg.max_bits)
    }

    pub fn run_point_capped(&mut self, ebn0_db: f64, max_bits: Option<u64>) -> Result<SimRecord, Error> {
        if !ebn0_db.is_finite() {
            return Err(Error::Invalid("Eb/N0 must be finite".into()));
        }
        let field = self.blueprint.field.clone();
        let chan = ChannelConfig::new(ebn0_db, self.blueprint.rate(), field.m());
        let zeros = vec![0u8; self.n_symbols];
        let frame_bits = self.frame_bits() as u64;
        let bit_cap = max_bits.unwrap_or(u64::MAX);
        let (imax, stop_ber) = (self.cfg.imax, self.cfg.stop_ber);

        let mut ledger = ComplexityLedger::default();
        let (mut frames, mut errors, mut frame_errors) = (0u64, 0u64, 0u64);
        while frames < self.cfg.max_frames && errors < self.cfg.min_errors && frames * frame_bits < bit_cap {
            let mut noise = rng::frame_stream(self.cfg.seed, ebn0_db, frames);
            let y = modulate_awgn(&zeros, &field, &chan, &mut noise);
            let priors = frame_priors(&y, chan.sigma2, &field);
            let e: u64 = match &mut self.engine {
                Engine::Block(dec) => {
                    let out = dec.decode(&priors, imax)?;
                    ledger.ops += dec.take_ledger();
                    ledger.decodes += 1;
                    ledger.iterations += out.iterations as u64;
                    out.decisions.iter().map(|d| d.count_ones() as u64).sum()
                }
                Engine::Window(dec) => {
                    let out = dec.decode(&priors, imax, stop_ber)?;
                    ledger.ops += dec.take_ledger();
                    ledger.decodes += out.iterations.len() as u64;
                    ledger.iterations += out.iterations.iter().sum::<usize>() as u64;
                    out.decisions.iter().map(|d| d.count_ones() as u64).sum()
                }
            };
            ledger.decoded_bits += frame_bits;
            errors += e;
            frame_errors += (e > 0) as u64;
            frames += 1;
        }
        let bits = frames * frame_bits;
        Ok(SimRecord {
            ebn0_db,
            frames,
            bits,
            bit_errors: errors,
            frame_errors,
            ber: if bits == 0 { 0.0 } else { errors as f64 / bits as f64 },
            avg_iters: ledger.avg_iterations(),
            ops_per_bit: ledger.ops_per_bit(),
            latency_bits: self.latency.bits,
            reliable: errors >= self.cfg.min_errors,
            ledger,
        })
    }
}

/// Builds the configured code and simulates one point.
pub fn run_point(cfg: &SimConfig, ebn0_db: f64) -> Result<SimRecord, Error> {
    Simulator::new(cfg)?.run_point(ebn0_db)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointTiming {
    pub ebn0_db: f64,
    pub wall_time_s: f64,
}

/// Run description written next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: SimConfig,
    pub field_poly: u32,
    /// Hex FNV-1a hash of the sparse triples.
    pub fingerprint: String,
    pub n_symbols: usize,
    pub design_rate: f64,
    pub effective_rate: f64,
    pub latency_bits: usize,
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    pub timings: Vec<PointTiming>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SimRecord>,
    pub manifest: Manifest,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Path of the manifest belonging to a CSV path.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Runs every configured point and writes the CSV and manifest when an
/// output path is set.
pub fn sweep(cfg: &SimConfig) -> Result<SweepResult, Error> {
    if cfg.ebn0_db.is_empty() {
        return Err(Error::Invalid("sweep needs at least one Eb/N0 point".into()));
    }
    let started = unix_now();
    let mut sim = Simulator::new(cfg)?;
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let mut warnings = Vec::new();
    if cfg.max_frames > 0 {
        for &x in &cfg.ebn0_db {
            let t0 = Instant::now();
            let rec = sim.run_point(x)?;
            timings.push(PointTiming {
                ebn0_db: x,
                wall_time_s: t0.elapsed().as_secs_f64(),
            });
            if let Some(prev) = rows.last().map(|r: &SimRecord| (r.ebn0_db, r.ber)) {
                if x > prev.0 && rec.ber > prev.1 {
                    warnings.push(format!("BER rises from {:e} at {} dB to {:e} at {} dB", prev.1, prev.0, rec.ber, x));
                }
            }
            rows.push(rec);
        }
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let manifest = Manifest {
        config: cfg.clone(),
        field_poly: sim.blueprint().field.prim_poly(),
        fingerprint: format!("{:016x}", sim.fingerprint()),
        n_symbols: sim.n_symbols,
        design_rate: sim.blueprint().rate(),
        effective_rate: sim.effective_rate(),
        latency_bits: sim.latency().bits,
        started_unix_s: started,
        finished_unix_s: unix_now(),
        timings,
        warnings,
    };
    if let Some(path) = &cfg.out {
        write_csv(path, &rows)?;
        std::fs::write(manifest_path(path), serde_json::to_string_pretty(&manifest)?)?;
    }
    Ok(SweepResult { rows, manifest })
}

pub fn write_csv(path: &Path, rows: &[SimRecord]) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    }
    for r in rows {
        w.serialize(CsvRow::from(r)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>, Error> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Invalid(format!("csv: {other:?}")),
    }
}

/// Bisection on a BER curve that decreases in Eb/N0.
///
/// Requires `ber(lo) > target > ber(hi)`. The bracket is halved until it is
/// at most `resolution` wide, then the crossing is interpolated linearly in
/// `log10 BER` between the final endpoints.
pub fn bisect_snr<F>(mut ber: F, target: f64, lo: f64, hi: f64, resolution: f64) -> Result<f64, Error>
where
    F: FnMut(f64) -> Result<f64, Error>,
{
    if !(target > 0.0 && target < 1.0) || !(lo < hi) || !(resolution > 0.0) {
        return Err(Error::Invalid("need 0 < target < 1, lo < hi and a positive resolution".into()));
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut b_lo = ber(lo)?;
    if !(b_lo > target) {
        return Err(Error::Bracket { lo, hi });
    }
    let mut b_hi = ber(hi)?;
    if !(b_hi < target) {
        return Err(Error::Bracket { lo, hi });
    }
    while hi - lo > resolution + 1e-9 {
        let mid = 0.5 * (lo + hi);
        let b = ber(mid)?;
        if b > target {
            lo = mid;
            b_lo = b;
        } else {
            hi = mid;
            b_hi = b;
        }
    }
    if b_hi <= 0.0 {
        return Ok(0.5 * (lo + hi));
    }
    let (l0, l1, lt) = (b_lo.log10(), b_hi.log10(), target.log10());
    Ok(lo + (hi - lo) * (l0 - lt) / (l0 - l1))
}

/// Outcome of a required-Eb/N0 search with every evaluated point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrSearch {
    pub target_ber: f64,
    pub ebn0_db: f64,
    pub points: Vec<SimRecord>,
}

/// Required Eb/N0 for `target_ber`, searched with a built simulator.
///
/// Each point stops after `min_errors` errors or `min_errors / target_ber`
/// bits. A point that exhausts the bit budget has fewer than `min_errors`
/// errors and so an estimated BER below the target; it counts as below the
/// target even though it is flagged unreliable.
pub fn search_required_snr(sim: &mut Simulator, target_ber: f64, lo_db: f64, hi_db: f64) -> Result<SnrSearch, Error> {
    let cap = (sim.config().min_errors as f64 / target_ber).ceil() as u64;
    let cap = sim.config().max_bits.map_or(cap, |b| b.min(cap));
    let mut points = Vec::new();
    let ebn0_db = bisect_snr(
        |x| {
            let rec = sim.run_point_capped(x, Some(cap))?;
            let b = rec.ber;
            points.push(rec);
            Ok(b)
        },
        target_ber,
        lo_db,
        hi_db,
        SNR_RESOLUTION_DB,
    )?;
    Ok(SnrSearch {
        target_ber,
        ebn0_db,
        points,
    })
}

/// Required Eb/N0 (dB) for `target_ber` within `[lo_db, hi_db]`.
pub fn required_snr(cfg: &SimConfig, target_ber: f64, lo_db: f64, hi_db: f64) -> Result<f64, Error> {
    let mut sim = Simulator::new(cfg)?;
    Ok(search_required_snr(&mut sim, target_ber, lo_db, hi_db)?.ebn0_db)
}

/// Measured and formula complexity at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub record: SimRecord,
    pub measured_ops_per_bit: f64,
    /// `(dv/m + dv) q I`, times `W` for windows, at the measured `I`.
    pub formula: f64,
    /// Window mode: every node at full degree for `W I` iterations.
    pub regular_window_estimate: Option<f64>,
}

pub fn complexity_report(cfg: &SimConfig, ebn0_db: f64) -> Result<ComplexityReport, Error> {
    let record = run_point(cfg, ebn0_db)?;
    Ok(complexity_from_record(cfg, record))
}

pub fn complexity_from_record(cfg: &SimConfig, record: SimRecord) -> ComplexityReport {
    let m = cfg.q.trailing_zeros();
    let window = (cfg.mode == Mode::ScWindow).then_some(cfg.window);
    let formula = complexity_formula(cfg.dv, m, cfg.q, record.avg_iters, window);
    let estimate = window.map(|w| regular_window_estimate(cfg.dv, cfg.dc, m, w, record.avg_iters));
    ComplexityReport {
        measured_ops_per_bit: record.ops_per_bit,
        formula,
        regular_window_estimate: estimate,
        record,
    }
}
