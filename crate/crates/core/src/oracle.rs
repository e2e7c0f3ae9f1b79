//! Brute-force references for checking the decoder on tiny instances:
//! direct check-node marginalization, codeword enumeration and exact
//! symbol-wise posteriors.

use rand::Rng;

use crate::channel::SymbolPrior;
use crate::decoder::MessageVector;
use crate::galois::FieldTable;
use crate::sparse::QaryParityCheck;
use crate::Error;

pub const MAX_CHECK_DEGREE: usize = 6;
pub const MAX_CHECK_Q: usize = 16;
pub const MAX_COLS: usize = 12;
pub const MAX_WORDS: usize = 2_000_000;

/// Check-node output by summing over every assignment of the other edges.
pub fn naive_check_update(
    incoming: &[MessageVector],
    labels: &[u8],
    field: &FieldTable,
) -> Result<Vec<MessageVector>, Error> {
    let (d, q) = (labels.len(), field.q());
    if d > MAX_CHECK_DEGREE || q > MAX_CHECK_Q {
        return Err(Error::Budget(format!("degree {d} over GF({q})")));
    }
    if incoming.len() != d || d < 2 {
        return Err(Error::Invalid("need one message per edge and degree >= 2".into()));
    }
    let mut outs = Vec::with_capacity(d);
    let others = d - 1;
    let total = q.pow(others as u32);
    for k in 0..d {
        let hk_inv = field.inv(labels[k])?;
        let mut out = vec![0.0; q];
        let idx: Vec<usize> = (0..d).filter(|&j| j != k).collect();
        for code in 0..total {
            let mut rest = code;
            let mut sum = 0u8;
            let mut p = 1.0;
            for &j in &idx {
                let v = (rest % q) as u8;
                rest /= q;
                sum ^= field.mul(labels[j], v);
                p *= incoming[j].probs[v as usize];
            }
            // h_k b = sum  =>  b = h_k^-1 sum
            out[field.mul(hk_inv, sum) as usize] += p;
        }
        let s: f64 = out.iter().sum();
        if s > 0.0 {
            out.iter_mut().for_each(|x| *x /= s);
        }
        outs.push(MessageVector::new(out));
    }
    Ok(outs)
}

/// A small code together with all of its codewords.
#[derive(Debug, Clone, PartialEq)]
pub struct TinyCode {
    pub h: QaryParityCheck,
    pub rank: usize,
    pub codewords: Vec<Vec<u8>>,
}

/// Row-reduces `h` over GF(q). Returns the rank and a nullspace basis.
pub fn nullspace(h: &QaryParityCheck) -> Result<(usize, Vec<Vec<u8>>), Error> {
    let f = h.field();
    let n = h.n_cols();
    let mut a: Vec<Vec<u8>> = (0..h.n_rows())
        .map(|r| {
            let mut row = vec![0u8; n];
            for &(c, l) in h.row(r) {
                row[c as usize] = l;
            }
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..a.len()).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let inv = f.inv(a[rank][col])?;
        for x in a[rank].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for r in 0..a.len() {
            if r != rank && a[r][col] != 0 {
                let factor = a[r][col];
                for c in 0..n {
                    let t = f.mul(factor, a[rank][c]);
                    a[r][c] ^= t;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0u8; n];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = a[i][fc];
            }
            v
        })
        .collect();
    Ok((rank, basis))
}

/// All codewords, spanned from a nullspace basis.
pub fn enumerate_codewords(h: &QaryParityCheck) -> Result<TinyCode, Error> {
    let q = h.field().q();
    if h.n_cols() > MAX_COLS {
        return Err(Error::Budget(format!("{} columns", h.n_cols())));
    }
    let (rank, basis) = nullspace(h)?;
    let k = basis.len();
    let count = (q as f64).powi(k as i32);
    if count > MAX_WORDS as f64 {
        return Err(Error::Budget(format!("{q}^{k} codewords")));
    }
    let f = h.field();
    let count = count as usize;
    let mut words = Vec::with_capacity(count);
    for code in 0..count {
        let mut w = vec![0u8; h.n_cols()];
        let mut rest = code;
        for b in &basis {
            let coef = (rest % q) as u8;
            rest /= q;
            for (x, &y) in w.iter_mut().zip(b) {
                *x ^= f.mul(coef, y);
            }
        }
        words.push(w);
    }
    words.sort();
    Ok(TinyCode {
        h: h.clone(),
        rank,
        codewords: words,
    })
}

/// All zero-syndrome words by scanning `q^n` vectors.
pub fn scan_codewords(h: &QaryParityCheck) -> Result<Vec<Vec<u8>>, Error> {
    let (q, n) = (h.field().q(), h.n_cols());
    let total = (q as f64).powi(n as i32);
    if n > MAX_COLS || total > MAX_WORDS as f64 {
        return Err(Error::Budget(format!("{q}^{n} words")));
    }
    let f = h.field();
    let mut out = Vec::new();
    for code in 0..total as usize {
        let mut rest = code;
        let w: Vec<u8> = (0..n)
            .map(|_| {
                let v = (rest % q) as u8;
                rest /= q;
                v
            })
            .collect();
        let ok = h
            .rows()
            .iter()
            .all(|row| row.iter().fold(0u8, |s, &(c, l)| s ^ f.mul(l, w[c as usize])) == 0);
        if ok {
            out.push(w);
        }
    }
    out.sort();
    Ok(out)
}

/// Exact symbol-wise posteriors `P(v_j = b)` over the codeword list.
pub fn exhaustive_posteriors(code: &TinyCode, priors: &[SymbolPrior]) -> Result<Vec<MessageVector>, Error> {
    let (n, q) = (code.h.n_cols(), code.h.field().q());
    if priors.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: priors.len(),
        });
    }
    let mut marg = vec![vec![0.0; q]; n];
    for w in &code.codewords {
        let p: f64 = w.iter().zip(priors).map(|(&v, pr)| pr.probs[v as usize]).product();
        for (j, &v) in w.iter().enumerate() {
            marg[j][v as usize] += p;
        }
    }
    Ok(marg
        .into_iter()
        .map(|mut m| {
            let s: f64 = m.iter().sum();
            if s > 0.0 {
                m.iter_mut().for_each(|x| *x /= s);
            }
            MessageVector::new(m)
        })
        .collect())
}

/// Random cycle-free code on `n` symbols: every new check joins one symbol
/// already in the tree with one or two fresh symbols.
pub fn random_tree_code<R: Rng>(n: usize, field: &FieldTable, rng: &mut R) -> QaryParityCheck {
    let q = field.q() as u8;
    let mut rows: Vec<Vec<(u32, u8)>> = Vec::new();
    let mut placed = 1usize;
    while placed < n {
        let anchor = rng.gen_range(0..placed);
        let fresh = rng.gen_range(1..=2).min(n - placed);
        let mut row = vec![(anchor as u32, rng.gen_range(1..q))];
        for i in 0..fresh {
            row.push(((placed + i) as u32, rng.gen_range(1..q)));
        }
        placed += fresh;
        rows.push(row);
    }
    QaryParityCheck::from_rows(n, rows, field.clone()).expect("tree edges are unique")
}

/// Random probability vector with entries bounded away from zero.
pub fn random_message<R: Rng>(q: usize, rng: &mut R) -> MessageVector {
    let mut v: Vec<f64> = (0..q).map(|_| rng.gen_range(0.01..1.0)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    MessageVector::new(v)
}
