//! Plane-wave spinor bases on flat tori and a small column-sparse complex
//! matrix type for operators acting on them.

use std::collections::HashMap;

use num_complex::Complex64;

/// Momentum in half-units: entry `j` is `2 k_j`, so half-integer momenta of
/// antiperiodic directions stay exact.
pub type Momentum = [i32; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub momentum: Momentum,
    pub spin: u8,
}

impl Mode {
    pub fn k(&self, axis: usize) -> f64 {
        self.momentum[axis] as f64 / 2.0
    }

    /// `|k|^2`, the eigenvalue of `D^2` on this plane wave.
    pub fn k_squared(&self) -> f64 {
        self.momentum
            .iter()
            .map(|&m| (m as f64 / 2.0).powi(2))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct ModeBasis {
    axes: usize,
    spin_rank: usize,
    antiperiodic: Vec<bool>,
    cutoff: u32,
    modes: Vec<Mode>,
    lookup: HashMap<Mode, usize>,
}

impl ModeBasis {
    /// All modes with `|k_j| <= cutoff` on every axis. Periodic axes carry
    /// integer momenta, antiperiodic axes half-integers. Modes are listed in
    /// lexicographic order of (momentum, spin).
    pub fn new(antiperiodic: &[bool], spin_rank: usize, cutoff: u32) -> Self {
        let axes = antiperiodic.len();
        assert!((1..=3).contains(&axes), "1 to 3 axes supported");
        let ranges: Vec<Vec<i32>> = antiperiodic
            .iter()
            .map(|&anti| axis_momenta(anti, cutoff))
            .collect();
        let mut modes = Vec::new();
        let mut idx = vec![0usize; axes];
        loop {
            let mut momentum = [0i32; 3];
            for a in 0..axes {
                momentum[a] = ranges[a][idx[a]];
            }
            for spin in 0..spin_rank {
                modes.push(Mode {
                    momentum,
                    spin: spin as u8,
                });
            }
            // odometer, last axis fastest
            let mut a = axes;
            loop {
                if a == 0 {
                    let lookup = modes.iter().enumerate().map(|(i, m)| (*m, i)).collect();
                    return ModeBasis {
                        axes,
                        spin_rank,
                        antiperiodic: antiperiodic.to_vec(),
                        cutoff,
                        modes,
                        lookup,
                    };
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < ranges[a].len() {
                    break;
                }
                idx[a] = 0;
            }
        }
    }

    pub fn axes(&self) -> usize {
        self.axes
    }

    pub fn spin_rank(&self) -> usize {
        self.spin_rank
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn antiperiodic(&self) -> &[bool] {
        &self.antiperiodic
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode(&self, i: usize) -> Mode {
        self.modes[i]
    }

    pub fn index_of(&self, mode: &Mode) -> Option<usize> {
        self.lookup.get(mode).copied()
    }

    /// Whether a mode lies inside the box `|k_j| <= cutoff`.
    pub fn within(mode: &Mode, cutoff: u32) -> bool {
        mode.momentum.iter().all(|&m| m.unsigned_abs() <= 2 * cutoff)
    }

    /// `(2π)^axes`.
    pub fn volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powi(self.axes as i32)
    }
}

fn axis_momenta(antiperiodic: bool, cutoff: u32) -> Vec<i32> {
    let k = cutoff as i32;
    if antiperiodic {
        // n + 1/2 with |n + 1/2| <= K
        (-k..k).map(|n| 2 * n + 1).collect()
    } else {
        (-k..=k).map(|n| 2 * n).collect()
    }
}

/// Sparse vector: `(index, value)` pairs sorted by index.
pub type SparseVec = Vec<(usize, Complex64)>;

/// Column-compressed complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    cols: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix {
            dim,
            cols: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        SparseMatrix {
            dim,
            cols: (0..dim).map(|j| vec![(j, Complex64::new(1.0, 0.0))]).collect(),
        }
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (j, v) in values.iter().enumerate() {
            m.push(j, j, *v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `value` at `(row, col)`.
    pub fn push(&mut self, row: usize, col: usize, value: Complex64) {
        if value == Complex64::new(0.0, 0.0) {
            return;
        }
        let c = &mut self.cols[col];
        match c.binary_search_by_key(&row, |(r, _)| *r) {
            Ok(pos) => {
                c[pos].1 += value;
                if c[pos].1 == Complex64::new(0.0, 0.0) {
                    c.remove(pos);
                }
            }
            Err(pos) => c.insert(pos, (row, value)),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let c = &self.cols[col];
        c.binary_search_by_key(&row, |(r, _)| *r)
            .map(|p| c[p].1)
            .unwrap_or_default()
    }

    pub fn column(&self, col: usize) -> &[(usize, Complex64)] {
        &self.cols[col]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                out.cols[i].push((j, v.conj()));
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        SparseMatrix {
            dim: self.dim,
            cols: self
                .cols
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|&(i, v)| (i, v * s))
                        .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (j, col) in other.cols.iter().enumerate() {
            for &(i, v) in col {
                out.push(i, j, v);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut scratch = Scratch::new(self.dim);
        let cols = other
            .cols
            .iter()
            .map(|col| self.apply_with(col, &mut scratch))
            .collect();
        SparseMatrix {
            dim: self.dim,
            cols,
        }
    }

    /// `self * v` for a sparse vector.
    pub fn apply(&self, v: &[(usize, Complex64)]) -> SparseVec {
        let mut scratch = Scratch::new(self.dim);
        self.apply_with(v, &mut scratch)
    }

    pub fn apply_with(&self, v: &[(usize, Complex64)], scratch: &mut Scratch) -> SparseVec {
        for &(j, x) in v {
            for &(i, a) in &self.cols[j] {
                scratch.add(i, a * x);
            }
        }
        scratch.drain()
    }

    /// Entrywise map `(row, col, value) -> value'`, used for iterated commutators
    /// with diagonal operators.
    pub fn map_entries(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let mut out = Self::zeros(self.dim);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                out.push(i, j, f(i, j, v));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.cols
            .iter()
            .flatten()
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Dense accumulator with a touched list, reused across sparse products.
#[derive(Debug)]
pub struct Scratch {
    values: Vec<Complex64>,
    touched: Vec<usize>,
    flag: Vec<bool>,
}

impl Scratch {
    pub fn new(dim: usize) -> Self {
        Scratch {
            values: vec![Complex64::default(); dim],
            touched: Vec::new(),
            flag: vec![false; dim],
        }
    }

    fn add(&mut self, i: usize, v: Complex64) {
        if !self.flag[i] {
            self.flag[i] = true;
            self.touched.push(i);
        }
        self.values[i] += v;
    }

    fn drain(&mut self) -> SparseVec {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            let v = std::mem::take(&mut self.values[i]);
            self.flag[i] = false;
            if v != Complex64::new(0.0, 0.0) {
                out.push((i, v));
            }
        }
        self.touched.clear();
        out
    }
}

/// `sum conj(a_i) b_i` over the common support.
pub fn inner(a: &[(usize, Complex64)], b: &[(usize, Complex64)]) -> Complex64 {
    let (mut i, mut j) = (0, 0);
    let mut acc = Complex64::default();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1.conj() * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}
