//! Node-update kernels on flat `f64` buffers.
//!
//! Both kernels count the operations they perform into an [`OpLedger`].

use crate::metrics::{normalization_cost, product_cost, wht_cost, OpLedger};

/// Floor applied to every normalized message entry.
pub const FLOOR: f64 = 1e-30;

/// In-place unnormalized Walsh-Hadamard transform; `v.len()` must be a power of two.
#[inline]
pub fn wht_in_place(v: &mut [f64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Normalizes to unit sum, floors at [`FLOOR`] and renormalizes. A vector
/// without positive mass becomes uniform. Returns false in that case.
#[inline]
pub fn normalize(v: &mut [f64]) -> bool {
    let s: f64 = v.iter().sum();
    if !(s > 0.0) || !s.is_finite() {
        let u = 1.0 / v.len() as f64;
        v.iter_mut().for_each(|x| *x = u);
        return false;
    }
    let inv = 1.0 / s;
    let mut floored = false;
    for x in v.iter_mut() {
        *x *= inv;
        if *x < FLOOR {
            *x = FLOOR;
            floored = true;
        }
    }
    if floored {
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
    }
    true
}

#[inline]
fn mul_into(dst: &mut [f64], a: &[f64], b: &[f64]) {
    for ((d, x), y) in dst.iter_mut().zip(a).zip(b) {
        *d = x * y;
    }
}

/// Reusable buffers sized for the largest node degree seen so far.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    fourier: Vec<f64>,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
    tmp: Vec<f64>,
}

impl Scratch {
    fn reserve(&mut self, d: usize, q: usize) {
        let n = (d + 1) * q;
        if self.fourier.len() < n {
            self.fourier.resize(n, 0.0);
            self.prefix.resize(n, 0.0);
            self.suffix.resize(n, 0.0);
        }
        if self.tmp.len() < q {
            self.tmp.resize(q, 0.0);
        }
    }
}

/// Check-node update.
///
/// `inputs` holds `d` messages of length `q`, `labels` the nonzero edge
/// labels and `mul` the `q x q` field multiplication table. Outputs are
/// written for edges `frozen..d` only.
#[allow(clippy::too_many_arguments)]
pub fn check_node(
    q: usize,
    mul: &[u8],
    inputs: &[f64],
    labels: &[u8],
    frozen: usize,
    out: &mut [f64],
    scratch: &mut Scratch,
    ledger: &mut OpLedger,
) {
    let d = labels.len();
    if d == 0 {
        return;
    }
    if d == 1 {
        // The lone symbol must be zero.
        for o in out[frozen * q..q].chunks_exact_mut(q) {
            o.iter_mut().for_each(|x| *x = 0.0);
            o[0] = 1.0;
            normalize(o);
            ledger.normalization_ops += normalization_cost(q);
        }
        return;
    }
    scratch.reserve(d, q);
    let Scratch {
        fourier,
        prefix,
        suffix,
        tmp,
    } = scratch;
    let tmp = &mut tmp[..q];

    // Forward: permute by label then transform.
    for j in 0..d {
        let row = &mul[labels[j] as usize * q..(labels[j] as usize + 1) * q];
        let f = &mut fourier[j * q..(j + 1) * q];
        let inp = &inputs[j * q..(j + 1) * q];
        for b in 0..q {
            f[row[b] as usize] = inp[b];
        }
        wht_in_place(f);
    }
    ledger.wht_ops += d as u64 * wht_cost(q);

    // prefix[j] = F0 .. Fj, suffix[j] = Fj .. F(d-1)
    prefix[..q].copy_from_slice(&fourier[..q]);
    for j in 1..d - 1 {
        let (done, rest) = prefix.split_at_mut(j * q);
        mul_into(&mut rest[..q], &done[(j - 1) * q..], &fourier[j * q..(j + 1) * q]);
    }
    suffix[(d - 1) * q..d * q].copy_from_slice(&fourier[(d - 1) * q..d * q]);
    for j in (1..d - 1).rev() {
        let (head, done) = suffix.split_at_mut((j + 1) * q);
        mul_into(&mut head[j * q..], &done[..q], &fourier[j * q..(j + 1) * q]);
    }
    ledger.product_ops += 2 * (d as u64 - 2) * product_cost(q);

    for j in frozen..d {
        if j == 0 {
            tmp.copy_from_slice(&suffix[q..2 * q]);
        } else if j == d - 1 {
            tmp.copy_from_slice(&prefix[(d - 2) * q..(d - 1) * q]);
        } else {
            mul_into(tmp, &prefix[(j - 1) * q..j * q], &suffix[(j + 1) * q..(j + 2) * q]);
            ledger.product_ops += product_cost(q);
        }
        wht_in_place(tmp);
        ledger.wht_ops += wht_cost(q);
        let row = &mul[labels[j] as usize * q..(labels[j] as usize + 1) * q];
        let o = &mut out[j * q..(j + 1) * q];
        for b in 0..q {
            let x = tmp[row[b] as usize];
            o[b] = if x > 0.0 { x } else { 0.0 };
        }
        normalize(o);
        ledger.normalization_ops += normalization_cost(q);
    }
}

/// Variable-node update of degree `d = inputs.len() / q`.
///
/// Writes `d` extrinsic messages to `out` and the posterior to `posterior`.
/// An output whose product has no mass falls back to the prior.
pub fn var_node(
    q: usize,
    prior: &[f64],
    inputs: &[f64],
    out: &mut [f64],
    posterior: &mut [f64],
    scratch: &mut Scratch,
    ledger: &mut OpLedger,
) {
    let d = inputs.len() / q;
    if d == 0 {
        posterior.copy_from_slice(prior);
        return;
    }
    scratch.reserve(d, q);
    let Scratch { prefix, suffix, .. } = scratch;

    // prefix[j] = prior * in0 .. in(j-1), so prefix[d] is the posterior.
    prefix[..q].copy_from_slice(prior);
    for j in 1..=d {
        let (done, rest) = prefix.split_at_mut(j * q);
        mul_into(&mut rest[..q], &done[(j - 1) * q..], &inputs[(j - 1) * q..j * q]);
    }
    // suffix[j] = in_j .. in(d-1)
    suffix[(d - 1) * q..d * q].copy_from_slice(&inputs[(d - 1) * q..d * q]);
    for j in (1..d.saturating_sub(1)).rev() {
        let (head, done) = suffix.split_at_mut((j + 1) * q);
        mul_into(&mut head[j * q..], &done[..q], &inputs[j * q..(j + 1) * q]);
    }
    ledger.product_ops += (d + d.saturating_sub(2)) as u64 * product_cost(q);

    for j in 0..d {
        let o = &mut out[j * q..(j + 1) * q];
        if j + 1 < d {
            mul_into(o, &prefix[j * q..(j + 1) * q], &suffix[(j + 1) * q..(j + 2) * q]);
            ledger.product_ops += product_cost(q);
        } else {
            o.copy_from_slice(&prefix[j * q..(j + 1) * q]);
        }
        if !normalize(o) {
            o.copy_from_slice(prior);
            normalize(o);
        }
        ledger.normalization_ops += normalization_cost(q);
    }
    posterior.copy_from_slice(&prefix[d * q..(d + 1) * q]);
    if !normalize(posterior) {
        posterior.copy_from_slice(prior);
        normalize(posterior);
    }
    ledger.normalization_ops += normalization_cost(q);
}

/// Index of the largest entry; ties go to the smallest index.
#[inline]
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}
