//! Smith normal form over the integers with unimodular transform tracking.

use super::mat::{abs, Mat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Smith normal form data: `u * m * v = d` with `u`, `v` unimodular,
/// `d` diagonal with non-negative entries `d[0] | d[1] | ...`.
/// `ui` is the inverse of `u`, maintained alongside.
#[derive(Clone, Debug)]
pub struct Snf {
    pub d: Mat,
    pub u: Mat,
    pub ui: Mat,
    pub v: Mat,
    /// Number of nonzero diagonal entries (the rank).
    pub rank: usize,
}

impl Snf {
    /// Diagonal entries, including zeros, padded/truncated to `min(rows, cols)`.
    pub fn diag(&self) -> Vec<BigInt> {
        let n = self.d.rows.min(self.d.cols);
        (0..n).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct Work {
    d: Mat,
    u: Mat,
    ui: Mat,
    v: Mat,
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.ui.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
    }

    /// `row[a] -= q * row[b]` on `d`, with transform bookkeeping.
    fn sub_row_mul(&mut self, a: usize, b: usize, q: &BigInt) {
        let neg = -q.clone();
        self.d.add_row_mul(a, b, &neg);
        self.u.add_row_mul(a, b, &neg);
        self.ui.add_col_mul(b, a, q);
    }

    /// `col[a] -= q * col[b]` on `d`.
    fn sub_col_mul(&mut self, a: usize, b: usize, q: &BigInt) {
        let neg = -q.clone();
        self.d.add_col_mul(a, b, &neg);
        self.v.add_col_mul(a, b, &neg);
    }

    fn negate_row(&mut self, a: usize) {
        self.d.negate_row(a);
        self.u.negate_row(a);
        self.ui.negate_col(a);
    }
}

/// Compute the Smith normal form of `m`.
pub fn smith(m: &Mat) -> Snf {
    let rows = m.rows;
    let cols = m.cols;
    let mut w = Work {
        d: m.clone(),
        u: Mat::identity(rows),
        ui: Mat::identity(rows),
        v: Mat::identity(cols),
    };
    let bound = rows.min(cols);
    let mut t = 0;
    while t < bound {
        if !place_pivot(&mut w, t) {
            break;
        }
        clear_cross(&mut w, t);
        // Divisibility: the pivot must divide every remaining entry. Pull an
        // offending row into row t and restart the clearing pass.
        if let Some((i, _)) = find_nondivisible(&w.d, t) {
            w.sub_row_mul(t, i, &-BigInt::one());
            continue;
        }
        t += 1;
    }
    for i in 0..bound {
        if w.d.get(i, i).is_negative() {
            w.negate_row(i);
        }
    }
    let rank = (0..bound).take_while(|&i| !w.d.get(i, i).is_zero()).count();
    Snf { d: w.d, u: w.u, ui: w.ui, v: w.v, rank }
}

/// Move the smallest-magnitude nonzero entry of the trailing submatrix to
/// `(t, t)`. Returns false if the submatrix is zero.
fn place_pivot(w: &mut Work, t: usize) -> bool {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..w.d.rows {
        for j in t..w.d.cols {
            let x = w.d.get(i, j);
            if x.is_zero() {
                continue;
            }
            let a = abs(x);
            match &best {
                Some((_, _, cur)) if *cur <= a => {}
                _ => best = Some((i, j, a)),
            }
        }
    }
    match best {
        Some((i, j, _)) => {
            w.swap_rows(t, i);
            w.swap_cols(t, j);
            true
        }
        None => false,
    }
}

/// Reduce row `t` and column `t` against the pivot until both are zero off
/// the diagonal, reselecting a smaller pivot whenever a division leaves a
/// remainder.
fn clear_cross(w: &mut Work, t: usize) {
    loop {
        let mut dirty = false;
        for i in t + 1..w.d.rows {
            if !w.d.get(i, t).is_zero() {
                let q = div_round(w.d.get(i, t), w.d.get(t, t));
                w.sub_row_mul(i, t, &q);
                if !w.d.get(i, t).is_zero() {
                    dirty = true;
                }
            }
        }
        for j in t + 1..w.d.cols {
            if !w.d.get(t, j).is_zero() {
                let q = div_round(w.d.get(t, j), w.d.get(t, t));
                w.sub_col_mul(j, t, &q);
                if !w.d.get(t, j).is_zero() {
                    dirty = true;
                }
            }
        }
        if !dirty {
            return;
        }
        // Some remainder is smaller in magnitude than the pivot; promote it.
        place_pivot(w, t);
    }
}

/// Rounded division: quotient minimizing |a - q*b|.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let two_r = BigInt::from(2) * r.abs();
    if two_r > b.abs() {
        if (a.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn find_nondivisible(d: &Mat, t: usize) -> Option<(usize, usize)> {
    let p = d.get(t, t);
    for i in t + 1..d.rows {
        for j in t + 1..d.cols {
            if !d.get(i, j).mod_floor(p).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}
