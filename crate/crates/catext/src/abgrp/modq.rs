//! Elimination over `Z/p^k` with valuation pivoting.
//!
//! Finite p-groups stay finite p-groups under every construction in this
//! crate, so once a group is certified as one, kernels, cokernels, solves,
//! and canonical forms can all run in `u64` arithmetic mod `q = p^k`
//! instead of arbitrary-precision Smith reduction. Requires `q <= 2^32` so
//! products fit in `u64`.

use super::mat::Mat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

/// Dense matrix over `Z/q`, row-major.
#[derive(Clone, Debug)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<u64>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Reduce an integer matrix mod `q`.
    pub fn from_mat(m: &Mat, q: u64) -> Self {
        let mut out = QMat::zero(m.rows, m.cols);
        let qb = BigInt::from(q);
        for i in 0..m.rows {
            for j in 0..m.cols {
                let r = m.get(i, j).mod_floor(&qb).to_u64().expect("reduced residue fits u64");
                out.set(i, j, r % q.max(1));
            }
        }
        out
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, x: &[u64], q: u64) -> Vec<u64> {
        assert_eq!(self.cols, x.len());
        let mut out = vec![0u64; self.rows];
        for i in 0..self.rows {
            let mut acc = 0u64;
            for j in 0..self.cols {
                acc = (acc + self.get(i, j) * x[j]) % q;
            }
            out[i] = acc;
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn scale_row(&mut self, a: usize, c: u64, q: u64) {
        for j in 0..self.cols {
            let x = (self.get(a, j) * c) % q;
            self.set(a, j, x);
        }
    }

    fn scale_col(&mut self, a: usize, c: u64, q: u64) {
        for i in 0..self.rows {
            let x = (self.get(i, a) * c) % q;
            self.set(i, a, x);
        }
    }

    /// `row[a] -= f * row[b]` mod `q`.
    fn sub_row_mul(&mut self, a: usize, b: usize, f: u64, q: u64) {
        if f == 0 {
            return;
        }
        for j in 0..self.cols {
            let sub = (f * self.get(b, j)) % q;
            let x = (self.get(a, j) + q - sub) % q;
            self.set(a, j, x);
        }
    }

    /// `col[a] += f * col[b]` mod `q`.
    fn add_col_mul(&mut self, a: usize, b: usize, f: u64, q: u64) {
        if f == 0 {
            return;
        }
        for i in 0..self.rows {
            let x = (self.get(i, a) + f * self.get(i, b)) % q;
            self.set(i, a, x);
        }
    }

    fn sub_col_mul(&mut self, a: usize, b: usize, f: u64, q: u64) {
        self.add_col_mul(a, b, (q - f % q) % q, q);
    }
}

pub fn powu(p: u64, e: u32) -> u64 {
    p.pow(e)
}

/// p-adic valuation of a residue, with `val(0) = k`.
fn val_p(x: u64, p: u64, k: u32) -> u32 {
    if x == 0 {
        return k;
    }
    let mut v = 0;
    let mut x = x;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Inverse of a unit mod `q`.
fn inv_mod(a: u64, q: u64) -> u64 {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (q as i128, (a % q) as i128);
    while new_r != 0 {
        let quot = r / new_r;
        (t, new_t) = (new_t, t - quot * new_t);
        (r, new_r) = (new_r, r - quot * new_r);
    }
    assert_eq!(r, 1, "not a unit mod q");
    (t.rem_euclid(q as i128)) as u64
}

/// Diagonalization `u * m * v = diag(p^vals)` over `Z/p^k`, valuations
/// ascending, `u`/`v` invertible mod `q`, `ui = u^-1`.
#[derive(Clone, Debug)]
pub struct QElim {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    pub rows: usize,
    pub cols: usize,
    pub diag_len: usize,
    pub vals: Vec<u32>,
    pub u: QMat,
    pub ui: QMat,
    pub v: QMat,
}

pub fn eliminate(m: &QMat, p: u64, k: u32) -> QElim {
    let q = powu(p, k);
    let rows = m.rows;
    let cols = m.cols;
    let mut d = m.clone();
    let mut u = QMat::identity(rows);
    let mut ui = QMat::identity(rows);
    let mut v = QMat::identity(cols);
    let mut vals = Vec::new();
    let bound = rows.min(cols);
    let mut t = 0;
    while t < bound && q > 1 {
        // Minimum-valuation pivot in the trailing submatrix. A unit can
        // never be beaten, so stop scanning at the first one.
        let mut best: Option<(usize, usize, u32)> = None;
        'scan: for i in t..rows {
            for j in t..cols {
                let x = d.get(i, j);
                if x == 0 {
                    continue;
                }
                let val = val_p(x, p, k);
                if best.map_or(true, |(_, _, bv)| val < bv) {
                    best = Some((i, j, val));
                    if val == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((pi, pj, pv)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        ui.swap_cols(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        // Normalize the pivot to exactly p^pv.
        let pvq = powu(p, pv);
        let unit = d.get(t, t) / pvq;
        let uinv = inv_mod(unit, q);
        d.scale_row(t, uinv, q);
        u.scale_row(t, uinv, q);
        ui.scale_col(t, unit, q);
        // Every remaining entry has valuation >= pv, so clearing is exact.
        for i in t + 1..rows {
            let x = d.get(i, t);
            if x != 0 {
                let f = x / pvq;
                d.sub_row_mul(i, t, f, q);
                u.sub_row_mul(i, t, f, q);
                ui.add_col_mul(t, i, f, q);
            }
        }
        for j in t + 1..cols {
            let x = d.get(t, j);
            if x != 0 {
                let f = x / pvq;
                d.sub_col_mul(j, t, f, q);
                v.sub_col_mul(j, t, f, q);
            }
        }
        vals.push(pv);
        t += 1;
    }
    QElim { p, k, q, rows, cols, diag_len: t, vals, u, ui, v }
}

impl QElim {
    fn val_at(&self, t: usize) -> u32 {
        if t < self.diag_len {
            self.vals[t]
        } else {
            self.k
        }
    }

    /// Generators of `{x : m x = 0 mod q}` as a Z/q-module, as columns.
    /// Unit-pivot columns contribute nothing and are dropped.
    pub fn kernel_gens(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        for t in 0..self.cols {
            let v = self.val_at(t);
            if v == 0 {
                continue;
            }
            let f = powu(self.p, self.k - v) % self.q.max(1);
            let col = self.v.col(t);
            out.push(col.into_iter().map(|x| (x * f) % self.q).collect());
        }
        out
    }

    /// Least solution of `m x = y mod q` (free coordinates zero), if any.
    pub fn solve(&self, y: &[u64]) -> Option<Vec<u64>> {
        let uy = self.u.mul_vec(y, self.q);
        let mut w = vec![0u64; self.cols];
        for t in 0..self.diag_len {
            let pv = powu(self.p, self.vals[t]);
            if uy[t] % pv != 0 {
                return None;
            }
            w[t] = uy[t] / pv;
        }
        for t in self.diag_len..self.rows {
            if uy[t] != 0 {
                return None;
            }
        }
        Some(self.v.mul_vec(&w, self.q))
    }

    /// Reduce `x` to the canonical representative of its class mod the
    /// column span of `m` (requires `q Z^rows` inside that span).
    pub fn canon(&self, x: &[u64]) -> Vec<u64> {
        let mut w = self.u.mul_vec(x, self.q);
        for t in 0..self.diag_len {
            w[t] %= powu(self.p, self.vals[t]);
        }
        self.ui.mul_vec(&w, self.q)
    }
}
