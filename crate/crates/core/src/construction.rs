//! Protograph lifting, edge spreading and the paired block / spatially
//! coupled parity-check matrices.
//!
//! Both codes are assembled from the same four lifted and labelled
//! submatrices `H0(0)`, `H1(1)`, `H0(1)` and `H1(2)`:
//!
//! ```text
//! H_BC = | H0(0)  H1(2) |        H_SC = | H0(0)                        |
//!        | H1(1)  H0(1) |               | H1(1)  H0(1)                 |
//!                                       |        H1(2)  H0(0)          |
//!                                       |               H1(1)  H0(1)   |
//!                                       |                      ...     |
//! ```
//!
//! The chain is terminated after `L` column blocks by one extra row block
//! holding only the `H1` part, so every column has full degree.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::galois::FieldTable;
use crate::rng::{self, Stream};
use crate::sparse::{BinarySparse, QaryParityCheck};
use crate::Error;

/// Syndrome-former memory. Only `m_s = 1` is supported.
pub const MS: usize = 1;

/// Default number of coupled time instants in a terminated frame.
pub const DEFAULT_CHAIN_LEN: usize = 50;

const PERM_ATTEMPTS: usize = 100;
const BLOCK_ATTEMPTS: usize = 100;

/// Supported `(d_v, d_c)` pairs.
pub const SUPPORTED_DEGREES: [(usize, usize); 4] = [(2, 4), (3, 6), (3, 9), (3, 12)];

/// Protograph bi-adjacency matrix with non-negative edge multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl BaseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self, Error> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Invalid(format!(
                "base matrix {rows}x{cols} with {} entries",
                entries.len()
            )));
        }
        Ok(BaseMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    pub fn max_entry(&self) -> u32 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.entries.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u32> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }

    /// Design rate `b / c`.
    pub fn design_rate(&self) -> f64 {
        (self.cols - self.rows) as f64 / self.cols as f64
    }

    /// Entry-wise sum of two equally sized matrices.
    pub fn sum(&self, other: &BaseMatrix) -> BaseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        BaseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Edge spreading of a base matrix into `B0 + B1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSpreading {
    pub b0: BaseMatrix,
    pub b1: BaseMatrix,
}

impl EdgeSpreading {
    pub fn ms(&self) -> usize {
        MS
    }

    /// The underlying block base matrix `B = B0 + B1`.
    pub fn base(&self) -> BaseMatrix {
        self.b0.sum(&self.b1)
    }

    /// Number of protograph variable nodes `c`.
    pub fn c(&self) -> usize {
        self.b0.cols
    }

    /// Number of protograph check nodes `c - b`.
    pub fn checks(&self) -> usize {
        self.b0.rows
    }
}

/// Component matrices for the supported regular ensembles.
pub fn component_matrices(dv: usize, dc: usize) -> Result<EdgeSpreading, Error> {
    let (b0, b1): (&[u32], &[u32]) = match (dv, dc) {
        (2, 4) => (&[1, 1], &[1, 1]),
        (3, 6) => (&[2, 1], &[1, 2]),
        (3, 9) => (&[1, 2, 2], &[2, 1, 1]),
        (3, 12) => (&[1, 1, 2, 2], &[2, 2, 1, 1]),
        _ => return Err(Error::UnsupportedDegrees { dv, dc }),
    };
    Ok(EdgeSpreading {
        b0: BaseMatrix::new(1, b0.len(), b0.to_vec())?,
        b1: BaseMatrix::new(1, b1.len(), b1.to_vec())?,
    })
}

/// Draws `k` pairwise nonoverlapping random permutations of `0..m`.
fn nonoverlapping_perms(k: usize, m: usize, rng: &mut Stream) -> Result<Vec<Vec<usize>>, Error> {
    'block: for _ in 0..BLOCK_ATTEMPTS {
        let mut perms: Vec<Vec<usize>> = Vec::with_capacity(k);
        while perms.len() < k {
            let mut placed = false;
            for _ in 0..PERM_ATTEMPTS {
                let mut p: Vec<usize> = (0..m).collect();
                p.shuffle(rng);
                if perms.iter().all(|q| q.iter().zip(&p).all(|(a, b)| a != b)) {
                    perms.push(p);
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'block;
            }
        }
        return Ok(perms);
    }
    Err(Error::Construction(format!(
        "could not draw {k} nonoverlapping {m}x{m} permutations"
    )))
}

/// Lifts a base matrix by factor `m`: each entry `B_ij` becomes a sum of
/// `B_ij` nonoverlapping random `m x m` permutation matrices.
pub fn lift_binary(base: &BaseMatrix, m: usize, rng: &mut Stream) -> Result<BinarySparse, Error> {
    if m < 1 || (base.max_entry() as usize) > m {
        return Err(Error::Construction(format!(
            "lifting factor {m} smaller than base entry {}",
            base.max_entry()
        )));
    }
    let mut h = BinarySparse::zeros(base.rows * m, base.cols * m);
    for i in 0..base.rows {
        for j in 0..base.cols {
            let k = base.get(i, j) as usize;
            if k == 0 {
                continue;
            }
            for perm in nonoverlapping_perms(k, m, rng)? {
                for (r, &c) in perm.iter().enumerate() {
                    let fresh = h.set(i * m + r, j * m + c);
                    debug_assert!(fresh);
                }
            }
        }
    }
    Ok(h)
}

/// Replaces every one of `h` by a uniformly drawn nonzero field element.
pub fn assign_labels(h: &BinarySparse, field: &FieldTable, rng: &mut Stream) -> QaryParityCheck {
    let q = field.q() as u8;
    let rows = (0..h.n_rows())
        .map(|r| h.row(r).iter().map(|&c| (c, rng.gen_range(1..q))).collect())
        .collect();
    QaryParityCheck::from_rows(h.n_cols(), rows, field.clone())
        .expect("labels are nonzero and positions unique")
}

/// Serializable description of a code family member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlueprintConfig {
    pub dv: usize,
    pub dc: usize,
    /// Lifting factor `M`.
    pub lifting: usize,
    pub q: usize,
    pub seed: u64,
}

/// Everything needed to build the paired block and coupled codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeBlueprint {
    pub dv: usize,
    pub dc: usize,
    pub spreading: EdgeSpreading,
    pub lifting: usize,
    pub field: FieldTable,
    pub seed: u64,
}

impl CodeBlueprint {
    pub fn new(dv: usize, dc: usize, lifting: usize, m: u32, seed: u64) -> Result<Self, Error> {
        let spreading = component_matrices(dv, dc)?;
        let field = FieldTable::new(m)?;
        if lifting < 2 {
            return Err(Error::Invalid(format!("lifting factor {lifting} < 2")));
        }
        Ok(CodeBlueprint {
            dv,
            dc,
            spreading,
            lifting,
            field,
            seed,
        })
    }

    pub fn from_config(cfg: &BlueprintConfig) -> Result<Self, Error> {
        if !cfg.q.is_power_of_two() {
            return Err(Error::UnsupportedField(0));
        }
        CodeBlueprint::new(cfg.dv, cfg.dc, cfg.lifting, cfg.q.trailing_zeros(), cfg.seed)
    }

    pub fn config(&self) -> BlueprintConfig {
        BlueprintConfig {
            dv: self.dv,
            dc: self.dc,
            lifting: self.lifting,
            q: self.field.q(),
            seed: self.seed,
        }
    }

    pub fn m(&self) -> u32 {
        self.field.m()
    }

    pub fn c(&self) -> usize {
        self.spreading.c()
    }

    /// Design rate `b / c`.
    pub fn rate(&self) -> f64 {
        self.spreading.base().design_rate()
    }

    /// Symbols per coupled time instant, `M c`.
    pub fn symbols_per_block(&self) -> usize {
        self.lifting * self.c()
    }

    /// Checks per coupled time instant, `M (c - b)`.
    pub fn checks_per_block(&self) -> usize {
        self.lifting * self.spreading.checks()
    }

    /// Block length of the paired block code in bits, `2 M m c`.
    pub fn block_length_bits(&self) -> usize {
        2 * self.lifting * self.m() as usize * self.c()
    }

    /// Constraint length in symbols, `(m_s + 1) M c`.
    pub fn constraint_length_symbols(&self) -> usize {
        (MS + 1) * self.symbols_per_block()
    }

    pub fn constraint_length_bits(&self) -> usize {
        self.constraint_length_symbols() * self.m() as usize
    }

    /// The four lifted, labelled submatrices drawn from the construction
    /// substreams of the seed.
    pub fn submatrix_pool(&self) -> Result<SubmatrixPool, Error> {
        let build = |base: &BaseMatrix, index: u64| -> Result<QaryParityCheck, Error> {
            let mut rng = rng::substream(self.seed, rng::CONSTRUCTION, index);
            let bin = lift_binary(base, self.lifting, &mut rng)?;
            Ok(assign_labels(&bin, &self.field, &mut rng))
        };
        let s = &self.spreading;
        Ok(SubmatrixPool {
            h0_0: build(&s.b0, 0)?,
            h1_1: build(&s.b1, 1)?,
            h0_1: build(&s.b0, 2)?,
            h1_2: build(&s.b1, 3)?,
        })
    }
}

/// The submatrices `H0(0)`, `H1(1)`, `H0(1)`, `H1(2)`, each `(c-b)M x cM`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmatrixPool {
    pub h0_0: QaryParityCheck,
    pub h1_1: QaryParityCheck,
    pub h0_1: QaryParityCheck,
    pub h1_2: QaryParityCheck,
}

impl SubmatrixPool {
    /// `H0` block used by coupled column block `t`.
    pub fn h0_for(&self, t: usize) -> &QaryParityCheck {
        if t % 2 == 0 {
            &self.h0_0
        } else {
            &self.h0_1
        }
    }

    /// `H1` block used by coupled column block `t` (placed one row block lower).
    pub fn h1_for(&self, t: usize) -> &QaryParityCheck {
        if t % 2 == 0 {
            &self.h1_1
        } else {
            &self.h1_2
        }
    }
}

/// The `2(c-b)M x 2cM` block code of the blueprint.
pub fn build_block_code(bp: &CodeBlueprint) -> Result<QaryParityCheck, Error> {
    let pool = bp.submatrix_pool()?;
    block_code_from_pool(bp, &pool)
}

pub fn block_code_from_pool(bp: &CodeBlueprint, pool: &SubmatrixPool) -> Result<QaryParityCheck, Error> {
    let (rb, cb) = (bp.checks_per_block(), bp.symbols_per_block());
    let mut h = QaryParityCheck::zeros(2 * rb, 2 * cb, bp.field.clone());
    h.place(&pool.h0_0, 0, 0)?;
    h.place(&pool.h1_2, 0, cb)?;
    h.place(&pool.h1_1, rb, 0)?;
    h.place(&pool.h0_1, rb, cb)?;
    Ok(h)
}

/// Terminated period-2 spatially coupled chain of `len` time instants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScChain {
    blueprint: CodeBlueprint,
    len: usize,
    pool: SubmatrixPool,
}

impl ScChain {
    pub fn blueprint(&self) -> &CodeBlueprint {
        &self.blueprint
    }

    /// Number of coupled time instants `L`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn pool(&self) -> &SubmatrixPool {
        &self.pool
    }

    /// Row blocks including the termination block.
    pub fn row_blocks(&self) -> usize {
        self.len + MS
    }

    pub fn n_cols(&self) -> usize {
        self.len * self.blueprint.symbols_per_block()
    }

    pub fn n_rows(&self) -> usize {
        self.row_blocks() * self.blueprint.checks_per_block()
    }

    pub fn constraint_length_symbols(&self) -> usize {
        self.blueprint.constraint_length_symbols()
    }

    /// Submatrix of the chain with row blocks `rows` and column blocks `cols`.
    fn block_range(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Result<QaryParityCheck, Error> {
        let (rb, cb) = (self.blueprint.checks_per_block(), self.blueprint.symbols_per_block());
        let mut h = QaryParityCheck::zeros(rows.len() * rb, cols.len() * cb, self.blueprint.field.clone());
        for t in cols.clone() {
            let col_off = (t - cols.start) * cb;
            if rows.contains(&t) {
                h.place(self.pool.h0_for(t), (t - rows.start) * rb, col_off)?;
            }
            if rows.contains(&(t + 1)) {
                h.place(self.pool.h1_for(t), (t + 1 - rows.start) * rb, col_off)?;
            }
        }
        Ok(h)
    }

    /// The full terminated parity-check matrix.
    pub fn to_matrix(&self) -> Result<QaryParityCheck, Error> {
        self.block_range(0..self.row_blocks(), 0..self.len)
    }
}

/// Builds the terminated coupled chain sharing the blueprint's submatrices.
pub fn build_sc_chain(bp: &CodeBlueprint, len: usize) -> Result<ScChain, Error> {
    if len < 1 {
        return Err(Error::Invalid("chain length must be at least 1".into()));
    }
    Ok(ScChain {
        blueprint: bp.clone(),
        len,
        pool: bp.submatrix_pool()?,
    })
}

/// Local view of the chain seen by a sliding window decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowView {
    /// Window position `t` (first column block).
    pub position: usize,
    pub first_row_block: usize,
    pub row_blocks: usize,
    pub col_blocks: usize,
    /// Number of target symbols `M c` at the start of the window.
    pub targets: usize,
    /// In-window submatrix; edges to already decided columns are not included.
    pub h: QaryParityCheck,
}

/// Window of `w` row and column blocks starting at time `t`, truncated at the
/// end of the terminated chain.
pub fn window_view(chain: &ScChain, t: usize, w: usize) -> Result<WindowView, Error> {
    if w < MS + 1 {
        return Err(Error::Invalid(format!("window size {w} < {}", MS + 1)));
    }
    if t >= chain.len() {
        return Err(Error::Range(format!("window position {t} beyond chain of length {}", chain.len())));
    }
    let cols = t..(t + w).min(chain.len());
    let rows = t..(t + w).min(chain.row_blocks());
    let h = chain.block_range(rows.clone(), cols.clone())?;
    Ok(WindowView {
        position: t,
        first_row_block: rows.start,
        row_blocks: rows.len(),
        col_blocks: cols.len(),
        targets: chain.blueprint.symbols_per_block(),
        h,
    })
}
