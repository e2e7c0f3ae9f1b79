use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qldpc::harness::{self, Mode, SimConfig, Simulator};
use qldpc::Error;

#[derive(Parser)]
#[command(name = "qldpc", version, about = "q-ary LDPC block and spatially coupled code simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a code and print its dimensions and fingerprint.
    Construct {
        #[command(flatten)]
        common: Common,
        /// Also compute the Tanner graph girth (slow for large codes).
        #[arg(long)]
        girth: bool,
    },
    /// BER sweep over a list of Eb/N0 points.
    Ber {
        #[command(flatten)]
        common: Common,
    },
    /// Required Eb/N0 for a target BER by bisection.
    Reqsnr {
        #[command(flatten)]
        common: Common,
        #[arg(long = "target-ber", default_value_t = 1e-5)]
        target_ber: f64,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 4.0)]
        hi: f64,
    },
    /// Measured and formula complexity at each Eb/N0 point.
    Complexity {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dv: Option<usize>,
    #[arg(long)]
    dc: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    /// Lifting factor.
    #[arg(long = "M")]
    lifting: Option<usize>,
    /// Coupled chain length.
    #[arg(long = "L")]
    chain_len: Option<usize>,
    /// block or sc
    #[arg(long)]
    mode: Option<Mode>,
    /// Window size.
    #[arg(long = "W")]
    window: Option<usize>,
    #[arg(long)]
    imax: Option<usize>,
    #[arg(long = "stop-ber")]
    stop_ber: Option<f64>,
    /// Comma separated Eb/N0 points in dB.
    #[arg(long, value_delimiter = ',')]
    ebn0: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "min-errors")]
    min_errors: Option<u64>,
    #[arg(long = "max-frames")]
    max_frames: Option<u64>,
    #[arg(long = "max-bits")]
    max_bits: Option<u64>,
    /// Output path (CSV for `ber`, triples for `construct`, JSON otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<SimConfig, Error> {
        let mut c = match &self.config {
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
            None => SimConfig::default(),
        };
        macro_rules! set {
            ($($f:ident => $g:ident),*) => { $( if let Some(v) = self.$f.clone() { c.$g = v; } )* };
        }
        set!(dv => dv, dc => dc, q => q, lifting => lifting, chain_len => chain_len, mode => mode,
             window => window, imax => imax, stop_ber => stop_ber, ebn0 => ebn0_db, seed => seed,
             min_errors => min_errors, max_frames => max_frames);
        if self.max_bits.is_some() {
            c.max_bits = self.max_bits;
        }
        c.validate()?;
        Ok(c)
    }
}

fn write_json<T: serde::Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Construct { common, girth } => {
            let cfg = common.config()?;
            let sim = Simulator::new(&cfg)?;
            let h = sim.matrix()?;
            println!("rows {} cols {} edges {}", h.n_rows(), h.n_cols(), h.n_edges());
            println!("field GF({}) poly {:#b}", cfg.q, h.field().prim_poly());
            println!("design rate {:.4} effective rate {:.4}", sim.blueprint().rate(), sim.effective_rate());
            println!("latency {} bits", sim.latency().bits);
            println!("fingerprint {:016x}", sim.fingerprint());
            if girth {
                match h.girth() {
                    Some(g) => println!("girth {g}"),
                    None => println!("girth none (cycle-free)"),
                }
            }
            if let Some(p) = &common.out {
                std::fs::write(p, h.to_triples_text())?;
            }
        }
        Cmd::Ber { common } => {
            let mut cfg = common.config()?;
            cfg.out = common.out.clone();
            let res = harness::sweep(&cfg)?;
            println!("{}", harness::CSV_COLUMNS.join(","));
            for r in &res.rows {
                println!(
                    "{},{},{},{},{:e},{:.3},{:.1},{},{}",
                    r.ebn0_db, r.frames, r.bits, r.bit_errors, r.ber, r.avg_iters, r.ops_per_bit, r.latency_bits, r.reliable
                );
            }
        }
        Cmd::Reqsnr {
            common,
            target_ber,
            lo,
            hi,
        } => {
            let cfg = common.config()?;
            let mut sim = Simulator::new(&cfg)?;
            let s = harness::search_required_snr(&mut sim, target_ber, lo, hi)?;
            for p in &s.points {
                eprintln!(
                    "  {:.3} dB: {} errors / {} bits, BER {:.3e}, {:.2} it",
                    p.ebn0_db, p.bit_errors, p.bits, p.ber, p.avg_iters
                );
            }
            println!("required Eb/N0 for BER {:e}: {:.2} dB", target_ber, s.ebn0_db);
            if let Some(p) = &common.out {
                write_json(&s, Some(p))?;
            }
        }
        Cmd::Complexity { common } => {
            let cfg = common.config()?;
            if cfg.ebn0_db.is_empty() {
                return Err(Error::Invalid("give at least one --ebn0 point".into()));
            }
            let mut sim = Simulator::new(&cfg)?;
            let reports = cfg
                .ebn0_db
                .iter()
                .map(|&x| Ok(harness::complexity_from_record(&cfg, sim.run_point(x)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            write_json(&reports, common.out.as_ref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
