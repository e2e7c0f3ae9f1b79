//! Sparse binary and GF(q)-labelled parity-check matrices.

use std::fmt::Write as _;
use std::io::{self, BufRead};

use crate::galois::FieldTable;
use crate::Error;

/// Binary sparse matrix stored as sorted column lists per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarySparse {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<u32>>,
}

impl BinarySparse {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        BinarySparse {
            n_rows,
            n_cols,
            rows: vec![Vec::new(); n_rows],
        }
    }

    /// Sets entry `(r, c)` to one. Returns false if it already was one.
    pub fn set(&mut self, r: usize, c: usize) -> bool {
        assert!(r < self.n_rows && c < self.n_cols);
        let row = &mut self.rows[r];
        match row.binary_search(&(c as u32)) {
            Ok(_) => false,
            Err(pos) => {
                row.insert(pos, c as u32);
                true
            }
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.rows[r]
    }

    pub fn n_ones(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.n_cols];
        for row in &self.rows {
            for &c in row {
                w[c as usize] += 1;
            }
        }
        w
    }

    /// All one-positions in row-major order.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&c| (r, c as usize)))
    }
}

/// Sparse parity-check matrix over GF(q) with nonzero edge labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QaryParityCheck {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<(u32, u8)>>,
    field: FieldTable,
}

impl QaryParityCheck {
    pub fn zeros(n_rows: usize, n_cols: usize, field: FieldTable) -> Self {
        QaryParityCheck {
            n_rows,
            n_cols,
            rows: vec![Vec::new(); n_rows],
            field,
        }
    }

    /// Builds a matrix from per-row `(column, label)` lists, validating labels
    /// and rejecting duplicate positions.
    pub fn from_rows(
        n_cols: usize,
        rows: Vec<Vec<(u32, u8)>>,
        field: FieldTable,
    ) -> Result<Self, Error> {
        let mut h = QaryParityCheck::zeros(rows.len(), n_cols, field);
        for (r, row) in rows.into_iter().enumerate() {
            for (c, label) in row {
                h.insert(r, c as usize, label)?;
            }
        }
        Ok(h)
    }

    /// Inserts a nonzero label at `(r, c)`.
    pub fn insert(&mut self, r: usize, c: usize, label: u8) -> Result<(), Error> {
        if r >= self.n_rows || c >= self.n_cols {
            return Err(Error::Range(format!(
                "({r}, {c}) outside {}x{}",
                self.n_rows, self.n_cols
            )));
        }
        if label == 0 || label as usize >= self.field.q() {
            return Err(Error::Invalid(format!("label {label} is not a nonzero element of GF({})", self.field.q())));
        }
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&(c as u32), |&(col, _)| col) {
            Ok(_) => Err(Error::Construction(format!("duplicate edge at ({r}, {c})"))),
            Err(pos) => {
                row.insert(pos, (c as u32, label));
                Ok(())
            }
        }
    }

    /// Copies `block` into this matrix with its origin at `(row_off, col_off)`.
    pub fn place(&mut self, block: &QaryParityCheck, row_off: usize, col_off: usize) -> Result<(), Error> {
        for (r, row) in block.rows.iter().enumerate() {
            for &(c, label) in row {
                self.insert(row_off + r, col_off + c as usize, label)?;
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    /// Entries of row `r` sorted by column.
    pub fn row(&self, r: usize) -> &[(u32, u8)] {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[Vec<(u32, u8)>] {
        &self.rows
    }

    pub fn n_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.n_cols];
        for row in &self.rows {
            for &(c, _) in row {
                w[c as usize] += 1;
            }
        }
        w
    }

    /// `(row, col, label)` triples in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, l)| (r, c as usize, l)))
    }

    /// Same positions with every label replaced by one.
    pub fn support(&self) -> BinarySparse {
        let mut b = BinarySparse::zeros(self.n_rows, self.n_cols);
        for (r, c, _) in self.triples() {
            b.set(r, c);
        }
        b
    }

    /// Sparse text export: one `row col label` triple per line, 0-indexed.
    pub fn to_triples_text(&self) -> String {
        let mut s = String::with_capacity(self.n_edges() * 12);
        for (r, c, l) in self.triples() {
            let _ = writeln!(s, "{r} {c} {l}");
        }
        s
    }

    /// Parses the triple format. Dimensions are supplied by the caller since
    /// trailing all-zero rows or columns leave no trace in the text.
    pub fn from_triples_text<R: BufRead>(
        reader: R,
        n_rows: usize,
        n_cols: usize,
        field: FieldTable,
    ) -> Result<Self, Error> {
        let mut h = QaryParityCheck::zeros(n_rows, n_cols, field);
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Io(io::Error::new(io::ErrorKind::InvalidData, format!("bad triple line: {line}")));
            if parts.len() != 3 {
                return Err(bad());
            }
            let r: usize = parts[0].parse().map_err(|_| bad())?;
            let c: usize = parts[1].parse().map_err(|_| bad())?;
            let l: u8 = parts[2].parse().map_err(|_| bad())?;
            h.insert(r, c, l)?;
        }
        Ok(h)
    }

    /// 64-bit FNV-1a hash over the dimensions and sparse triples.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut feed = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        feed(&(self.n_rows as u64).to_le_bytes());
        feed(&(self.n_cols as u64).to_le_bytes());
        feed(&(self.field.q() as u64).to_le_bytes());
        for (r, c, l) in self.triples() {
            feed(&(r as u64).to_le_bytes());
            feed(&(c as u64).to_le_bytes());
            feed(&[l]);
        }
        h
    }

    /// Length of the shortest cycle in the Tanner graph, if any cycle exists.
    ///
    /// Breadth-first search from every variable node; O(V * E).
    pub fn girth(&self) -> Option<usize> {
        let n = self.n_cols;
        let mut var_checks: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (r, c, _) in self.triples() {
            var_checks[c].push(r);
        }
        let n_nodes = n + self.n_rows;
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; n_nodes];
        let mut parent = vec![usize::MAX; n_nodes];
        let mut queue = std::collections::VecDeque::new();
        for start in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[start] = 0;
            parent[start] = usize::MAX;
            queue.clear();
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                if 2 * dist[u] + 1 >= best {
                    break;
                }
                let neighbours: Vec<usize> = if u < n {
                    var_checks[u].iter().map(|&r| n + r).collect()
                } else {
                    self.rows[u - n].iter().map(|&(c, _)| c as usize).collect()
                };
                for w in neighbours {
                    if w == parent[u] {
                        continue;
                    }
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else {
                        best = best.min(dist[u] + dist[w] + 1);
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }
}
