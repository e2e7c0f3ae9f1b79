//! Tanner graph with flat edge storage and a flooding-schedule engine that
//! can be restricted to a band of checks and variables.

use std::ops::Range;

use super::kernels::{self, Scratch};
use crate::metrics::OpLedger;
use crate::sparse::QaryParityCheck;

#[derive(Debug, Clone)]
pub struct TannerGraph {
    pub q: usize,
    pub n_vars: usize,
    pub n_checks: usize,
    /// Edge range of each check; edges are numbered check-major.
    pub check_ptr: Vec<usize>,
    pub edge_var: Vec<u32>,
    pub edge_label: Vec<u8>,
    /// Edge ids of each variable, in increasing check order.
    pub var_ptr: Vec<usize>,
    pub var_edges: Vec<u32>,
    pub edge_check: Vec<u32>,
    /// `mul[a * q + b] = a * b` in GF(q).
    pub mul: Vec<u8>,
}

impl TannerGraph {
    pub fn new(h: &QaryParityCheck) -> Self {
        let field = h.field();
        let q = field.q();
        let mut check_ptr = Vec::with_capacity(h.n_rows() + 1);
        let mut edge_var = Vec::with_capacity(h.n_edges());
        let mut edge_label = Vec::with_capacity(h.n_edges());
        let mut edge_check = Vec::with_capacity(h.n_edges());
        check_ptr.push(0);
        for r in 0..h.n_rows() {
            for &(c, l) in h.row(r) {
                edge_var.push(c);
                edge_label.push(l);
                edge_check.push(r as u32);
            }
            check_ptr.push(edge_var.len());
        }
        let mut deg = vec![0usize; h.n_cols()];
        for &v in &edge_var {
            deg[v as usize] += 1;
        }
        let mut var_ptr = Vec::with_capacity(h.n_cols() + 1);
        var_ptr.push(0);
        for d in &deg {
            var_ptr.push(var_ptr.last().unwrap() + d);
        }
        let mut fill = var_ptr.clone();
        let mut var_edges = vec![0u32; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v as usize]] = e as u32;
            fill[v as usize] += 1;
        }
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                mul[a * q + b] = field.mul(a as u8, b as u8);
            }
        }
        TannerGraph {
            q,
            n_vars: h.n_cols(),
            n_checks: h.n_rows(),
            check_ptr,
            edge_var,
            edge_label,
            var_ptr,
            var_edges,
            edge_check,
            mul,
        }
    }

    pub fn n_edges(&self) -> usize {
        self.edge_var.len()
    }

    pub fn check_edges(&self, c: usize) -> Range<usize> {
        self.check_ptr[c]..self.check_ptr[c + 1]
    }

    pub fn var_edge_ids(&self, v: usize) -> &[u32] {
        &self.var_edges[self.var_ptr[v]..self.var_ptr[v + 1]]
    }
}

/// Message state for flooding belief propagation on one graph.
#[derive(Debug, Clone)]
pub struct Flooding {
    pub graph: TannerGraph,
    pub priors: Vec<f64>,
    pub v2c: Vec<f64>,
    pub c2v: Vec<f64>,
    pub posteriors: Vec<f64>,
    pub ledger: OpLedger,
    scratch: Scratch,
    gather: Vec<f64>,
    spread: Vec<f64>,
}

impl Flooding {
    pub fn new(graph: TannerGraph) -> Self {
        let (q, e, n) = (graph.q, graph.n_edges(), graph.n_vars);
        Flooding {
            priors: vec![0.0; n * q],
            v2c: vec![0.0; e * q],
            c2v: vec![0.0; e * q],
            posteriors: vec![0.0; n * q],
            ledger: OpLedger::default(),
            scratch: Scratch::default(),
            gather: Vec::new(),
            spread: Vec::new(),
            graph,
        }
    }

    /// Loads channel priors: variable-to-check messages start at the prior,
    /// check-to-variable messages at uniform.
    pub fn reset(&mut self, priors: &[f64]) {
        let q = self.graph.q;
        assert_eq!(priors.len(), self.graph.n_vars * q);
        self.priors.copy_from_slice(priors);
        self.posteriors.copy_from_slice(priors);
        for (e, &v) in self.graph.edge_var.iter().enumerate() {
            let v = v as usize;
            self.v2c[e * q..(e + 1) * q].copy_from_slice(&priors[v * q..(v + 1) * q]);
        }
        let u = 1.0 / q as f64;
        self.c2v.iter_mut().for_each(|x| *x = u);
    }

    /// One flooding iteration: all checks in `checks`, then all variables in
    /// `vars`. Variables below `vars.start` are treated as decided: their
    /// outgoing messages are held fixed and they receive nothing. Variable
    /// updates use only edges to checks inside `checks`.
    pub fn iterate(&mut self, checks: Range<usize>, vars: Range<usize>) {
        let q = self.graph.q;
        let g = &self.graph;
        for c in checks.clone() {
            let edges = g.check_edges(c);
            if edges.is_empty() {
                continue;
            }
            let frozen = g.edge_var[edges.clone()]
                .iter()
                .take_while(|&&v| (v as usize) < vars.start)
                .count();
            kernels::check_node(
                q,
                &g.mul,
                &self.v2c[edges.start * q..edges.end * q],
                &g.edge_label[edges.clone()],
                frozen,
                &mut self.c2v[edges.start * q..edges.end * q],
                &mut self.scratch,
                &mut self.ledger,
            );
        }
        for v in vars {
            let ids: &[u32] = g.var_edge_ids(v);
            let d = ids
                .iter()
                .take_while(|&&e| checks.contains(&(g.edge_check[e as usize] as usize)))
                .count();
            // Edges of a variable are sorted by check, so in-band edges form
            // a prefix whenever the band starts at or before the variable's
            // first check.
            debug_assert!(ids[d..].iter().all(|&e| !checks.contains(&(g.edge_check[e as usize] as usize))));
            let ids = &ids[..d];
            if self.gather.len() < d * q {
                self.gather.resize(d * q, 0.0);
                self.spread.resize(d * q, 0.0);
            }
            for (k, &e) in ids.iter().enumerate() {
                let e = e as usize;
                self.gather[k * q..(k + 1) * q].copy_from_slice(&self.c2v[e * q..(e + 1) * q]);
            }
            kernels::var_node(
                q,
                &self.priors[v * q..(v + 1) * q],
                &self.gather[..d * q],
                &mut self.spread[..d * q],
                &mut self.posteriors[v * q..(v + 1) * q],
                &mut self.scratch,
                &mut self.ledger,
            );
            for (k, &e) in ids.iter().enumerate() {
                let e = e as usize;
                self.v2c[e * q..(e + 1) * q].copy_from_slice(&self.spread[k * q..(k + 1) * q]);
            }
        }
    }

    /// Hard decisions for `vars` appended to `out`.
    pub fn decide(&mut self, vars: Range<usize>, out: &mut Vec<u8>) {
        let q = self.graph.q;
        for v in vars {
            out.push(kernels::argmax(&self.posteriors[v * q..(v + 1) * q]) as u8);
            self.ledger.compare_ops += q as u64;
        }
    }

    /// Mean of `1 - max posterior` over `vars`.
    pub fn soft_ber(&self, vars: Range<usize>) -> f64 {
        let q = self.graph.q;
        let n = vars.len();
        let s: f64 = vars
            .map(|v| {
                let p = &self.posteriors[v * q..(v + 1) * q];
                1.0 - p.iter().copied().fold(f64::MIN, f64::max)
            })
            .sum();
        s / n as f64
    }

    /// True if the hard decisions `x` satisfy every check in `checks`.
    pub fn checks_satisfied(&mut self, checks: Range<usize>, x: &[u8], x_offset: usize) -> bool {
        let g = &self.graph;
        let q = g.q;
        for c in checks {
            let mut s = 0u8;
            for e in g.check_edges(c) {
                let v = g.edge_var[e] as usize - x_offset;
                s ^= g.mul[g.edge_label[e] as usize * q + x[v] as usize];
            }
            self.ledger.compare_ops += g.check_edges(c).len() as u64;
            if s != 0 {
                return false;
            }
        }
        true
    }
}
