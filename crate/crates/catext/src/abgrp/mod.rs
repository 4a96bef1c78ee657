//! Finitely presented abelian groups and their homomorphisms.
//!
//! Everything reduces to exact integer linear algebra: Smith normal form
//! over `BigInt` in general, with a `u64` elimination fast path once a group
//! is certified as a finite p-group. Both engines produce valid (not
//! necessarily identical) witnesses; which engine runs depends only on the
//! groups involved, never on timing, so outputs are reproducible.

mod mat;
mod modq;
mod snf;

pub use mat::{vec_i64, AbVec, Mat};
pub use snf::{smith as smith_normal_form, Snf};

use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::{Arc, OnceLock};

const MAX_ENUM: u64 = 1 << 20;

/// An abelian group presented as `Z^ngens` modulo the integer span of
/// relation columns. Elements are integer column vectors of length `ngens`;
/// two vectors name the same element when their difference lies in the
/// relation span. Cheap to clone.
#[derive(Clone)]
pub struct PresentedAbGroup {
    inner: Arc<Inner>,
}

struct Inner {
    ngens: usize,
    rels: Mat,
    /// `Some((p, k))` certifies a finite p-group of exponent dividing `p^k`
    /// with `p^k <= 2^32`; `k = 0` means the group is trivial.
    flag: Option<(u64, u32)>,
    snf: OnceLock<Snf>,
    qelim: OnceLock<modq::QElim>,
}

impl PartialEq for PresentedAbGroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.ngens == other.inner.ngens && self.inner.rels == other.inner.rels)
    }
}
impl Eq for PresentedAbGroup {}

impl std::fmt::Debug for PresentedAbGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fs: Vec<String> = self.invariant_factors().iter().map(|d| d.to_string()).collect();
        write!(f, "PresentedAbGroup(ngens={}, factors=[{}])", self.inner.ngens, fs.join(", "))
    }
}

impl PresentedAbGroup {
    /// Group with `ngens` generators and the columns of `rels` as relations.
    pub fn new(ngens: usize, rels: Mat) -> Self {
        assert_eq!(rels.rows, ngens, "relation rows must equal generator count");
        let flag = detect_flag(ngens, &rels);
        Self::build(ngens, rels, flag)
    }

    pub fn from_relation_cols(ngens: usize, cols: &[AbVec]) -> Self {
        Self::new(ngens, Mat::from_cols(ngens, cols))
    }

    /// `Z/f1 + Z/f2 + ...`, one generator per factor; `0` means `Z`.
    pub fn from_invariant_factors(factors: &[u64]) -> Self {
        let ds: Vec<BigInt> = factors.iter().map(|&f| BigInt::from(f)).collect();
        let n = factors.len();
        Self::new(n, Mat::diagonal(&ds, n, n))
    }

    pub fn free(rank: usize) -> Self {
        Self::from_invariant_factors(&vec![0; rank])
    }

    pub fn trivial() -> Self {
        Self::from_invariant_factors(&[])
    }

    pub(crate) fn with_flag(ngens: usize, rels: Mat, flag: Option<(u64, u32)>) -> Self {
        assert_eq!(rels.rows, ngens);
        let flag = flag.or_else(|| detect_flag(ngens, &rels));
        Self::build(ngens, rels, flag)
    }

    fn build(ngens: usize, rels: Mat, flag: Option<(u64, u32)>) -> Self {
        PresentedAbGroup {
            inner: Arc::new(Inner { ngens, rels, flag, snf: OnceLock::new(), qelim: OnceLock::new() }),
        }
    }

    /// Direct sum, generators concatenated in argument order.
    pub fn direct_sum(parts: &[&PresentedAbGroup]) -> Self {
        let mut rels = Mat::zero(0, 0);
        let mut flag = Some((2u64, 0u32));
        let mut ngens = 0;
        for part in parts {
            rels = rels.block_diag(&part.inner.rels);
            ngens += part.inner.ngens;
            flag = merge_flags(flag, part.inner.flag);
        }
        Self::build(ngens, rels, flag)
    }

    pub fn ngens(&self) -> usize {
        self.inner.ngens
    }

    pub fn relations(&self) -> &Mat {
        &self.inner.rels
    }

    pub(crate) fn pflag(&self) -> Option<(u64, u32)> {
        self.inner.flag
    }

    fn snf(&self) -> &Snf {
        self.inner.snf.get_or_init(|| snf::smith(&self.inner.rels))
    }

    fn qelim(&self) -> &modq::QElim {
        let (p, k) = self.inner.flag.expect("qelim requires a p-group flag");
        self.inner.qelim.get_or_init(|| {
            let q = modq::powu(p, k);
            modq::eliminate(&modq::QMat::from_mat(&self.inner.rels, q), p, k)
        })
    }

    pub fn zero(&self) -> AbVec {
        vec![BigInt::zero(); self.inner.ngens]
    }

    /// Canonical representative of the class of `x`.
    pub fn canon(&self, x: &[BigInt]) -> AbVec {
        assert_eq!(x.len(), self.inner.ngens, "element length mismatch");
        if let Some((p, k)) = self.inner.flag {
            let q = modq::powu(p, k);
            let e = self.qelim();
            let xq = reduce_vec(x, q);
            return e.canon(&xq).into_iter().map(BigInt::from).collect();
        }
        let s = self.snf();
        let mut y = s.u.mul_vec(x);
        let diag = s.diag();
        for (i, d) in diag.iter().enumerate() {
            if !d.is_zero() {
                y[i] = y[i].mod_floor(d);
            }
        }
        s.ui.mul_vec(&y)
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.canon(x).iter().all(|c| c.is_zero())
    }

    pub fn eq_elems(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        self.canon(x) == self.canon(y)
    }

    pub fn add(&self, x: &[BigInt], y: &[BigInt]) -> AbVec {
        let sum: AbVec = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.canon(&sum)
    }

    pub fn neg(&self, x: &[BigInt]) -> AbVec {
        let n: AbVec = x.iter().map(|a| -a).collect();
        self.canon(&n)
    }

    pub fn sub(&self, x: &[BigInt], y: &[BigInt]) -> AbVec {
        let d: AbVec = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.canon(&d)
    }

    pub fn smul(&self, c: &BigInt, x: &[BigInt]) -> AbVec {
        let m: AbVec = x.iter().map(|a| c * a).collect();
        self.canon(&m)
    }

    /// Invariant factors in ascending divisibility order, trivial factors
    /// dropped, one `0` per infinite cyclic summand at the end.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        if let Some((p, _)) = self.inner.flag {
            let e = self.qelim();
            let mut out: Vec<BigInt> = Vec::new();
            for t in 0..self.inner.ngens {
                let v = if t < e.diag_len { e.vals[t] } else { e.k };
                if v > 0 {
                    out.push(BigInt::from(modq::powu(p, v)));
                }
            }
            out.sort();
            return out;
        }
        let s = self.snf();
        let mut out: Vec<BigInt> = Vec::new();
        let mut free = self.inner.ngens - s.diag().len();
        for d in s.diag() {
            if d.is_zero() {
                free += 1;
            } else if !d.is_one() {
                out.push(d);
            }
        }
        out.extend(std::iter::repeat(BigInt::zero()).take(free));
        out
    }

    /// `None` when the group is infinite.
    pub fn order(&self) -> Option<BigInt> {
        let mut n = BigInt::one();
        for d in self.invariant_factors() {
            if d.is_zero() {
                return None;
            }
            n *= d;
        }
        Some(n)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors().is_empty()
    }

    /// One element per nontrivial cyclic summand of the normal form, paired
    /// with the summand order (`0` for an infinite summand), in the same
    /// order as [`Self::invariant_factors`].
    pub fn smith_generators(&self) -> Vec<(BigInt, AbVec)> {
        let mut out = Vec::new();
        if let Some((p, _)) = self.inner.flag {
            let e = self.qelim();
            for t in 0..self.inner.ngens {
                let v = if t < e.diag_len { e.vals[t] } else { e.k };
                if v > 0 {
                    let col: AbVec = e.ui.col(t).into_iter().map(BigInt::from).collect();
                    out.push((BigInt::from(modq::powu(p, v)), col));
                }
            }
            out.sort_by(|a, b| a.0.cmp(&b.0));
            return out;
        }
        let s = self.snf();
        let diag = s.diag();
        for (i, d) in diag.iter().enumerate() {
            if !d.is_one() {
                out.push((d.clone(), s.ui.col(i)));
            }
        }
        for i in diag.len()..self.inner.ngens {
            out.push((BigInt::zero(), s.ui.col(i)));
        }
        // Match invariant_factors: finite factors ascending, zeros last.
        out.sort_by(|a, b| match (a.0.is_zero(), b.0.is_zero()) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Greater,
            (false, true) => std::cmp::Ordering::Less,
            (false, false) => a.0.cmp(&b.0),
        });
        out
    }

    /// Order of the class of `x`; `None` when infinite.
    pub fn element_order(&self, x: &[BigInt]) -> Option<BigInt> {
        if self.is_zero(x) {
            return Some(BigInt::one());
        }
        let mut exponent = BigInt::one();
        for d in self.invariant_factors() {
            if !d.is_zero() {
                exponent = exponent.lcm(&d);
            }
        }
        // Scaling by the torsion exponent kills x iff x is torsion; a
        // surviving free coordinate shows up here as a nonzero result.
        if !self.is_zero(&self.smul(&exponent, x)) {
            return None;
        }
        let mut order = exponent.clone();
        let mut m = exponent.clone();
        let mut primes = Vec::new();
        let mut d = BigInt::from(2);
        while &d * &d <= m {
            if m.mod_floor(&d).is_zero() {
                primes.push(d.clone());
                while m.mod_floor(&d).is_zero() {
                    m = m / &d;
                }
            }
            d += 1;
        }
        if m > BigInt::one() {
            primes.push(m);
        }
        for f in primes {
            loop {
                if order.mod_floor(&f).is_zero() {
                    let cand = &order / &f;
                    if self.is_zero(&self.smul(&cand, x)) {
                        order = cand;
                        continue;
                    }
                }
                break;
            }
        }
        Some(order)
    }

    /// All elements as canonical representatives, in a fixed deterministic
    /// order. Refuses infinite groups and orders above 2^20.
    pub fn elements(&self) -> Result<Vec<AbVec>> {
        let order = self
            .order()
            .ok_or_else(|| Error::Refused("cannot enumerate an infinite group".into()))?;
        let order = order
            .to_u64()
            .filter(|&n| n <= MAX_ENUM)
            .ok_or_else(|| Error::Refused(format!("group order exceeds {MAX_ENUM}")))?;
        let mut out = Vec::with_capacity(order as usize);
        if let Some((p, k)) = self.inner.flag {
            let e = self.qelim();
            let radix: Vec<u64> = (0..self.inner.ngens)
                .map(|t| if t < e.diag_len { modq::powu(p, e.vals[t]) } else { modq::powu(p, k) })
                .collect();
            let mut w = vec![0u64; self.inner.ngens];
            loop {
                let rep = e.ui.mul_vec(&w, modq::powu(p, k).max(1));
                out.push(rep.into_iter().map(BigInt::from).collect());
                if !incr_mixed(&mut w, &radix) {
                    break;
                }
            }
            return Ok(out);
        }
        let s = self.snf();
        let diag = s.diag();
        let radix: Vec<u64> = (0..self.inner.ngens)
            .map(|i| if i < diag.len() { diag[i].to_u64().unwrap() } else { 0 })
            .collect();
        debug_assert!(radix.iter().all(|&r| r > 0));
        let mut w = vec![0u64; self.inner.ngens];
        loop {
            let wv: AbVec = w.iter().map(|&x| BigInt::from(x)).collect();
            out.push(s.ui.mul_vec(&wv));
            if !incr_mixed(&mut w, &radix) {
                break;
            }
        }
        Ok(out)
    }
}

fn incr_mixed(w: &mut [u64], radix: &[u64]) -> bool {
    for i in (0..w.len()).rev() {
        w[i] += 1;
        if w[i] < radix[i] {
            return true;
        }
        w[i] = 0;
    }
    false
}

fn reduce_vec(x: &[BigInt], q: u64) -> Vec<u64> {
    let qb = BigInt::from(q.max(1));
    x.iter().map(|a| a.mod_floor(&qb).to_u64().unwrap() % q.max(1)).collect()
}

fn detect_flag(ngens: usize, rels: &Mat) -> Option<(u64, u32)> {
    let mut caps: Vec<Option<u64>> = vec![None; ngens];
    for j in 0..rels.cols {
        let mut nz: Option<usize> = None;
        let mut single = true;
        for i in 0..ngens {
            if !rels.get(i, j).is_zero() {
                if nz.is_some() {
                    single = false;
                    break;
                }
                nz = Some(i);
            }
        }
        if let (true, Some(i)) = (single, nz) {
            let c = rels.get(i, j).abs().to_u64()?;
            caps[i] = Some(caps[i].map_or(c, |old| old.min(c)));
        }
    }
    let mut p: Option<u64> = None;
    let mut kmax = 0u32;
    for cap in caps {
        let c = cap?;
        if c == 1 {
            continue;
        }
        let (cp, ce) = prime_power(c)?;
        match p {
            None => p = Some(cp),
            Some(q) if q == cp => {}
            _ => return None,
        }
        kmax = kmax.max(ce);
    }
    let p = p.unwrap_or(2);
    if p.checked_pow(kmax)? > 1 << 32 {
        return None;
    }
    Some((p, kmax))
}

fn prime_power(c: u64) -> Option<(u64, u32)> {
    let mut p = 0;
    for cand in 2.. {
        if cand * cand > c {
            break;
        }
        if c % cand == 0 {
            p = cand;
            break;
        }
    }
    if p == 0 {
        p = c;
    }
    let mut x = c;
    let mut e = 0;
    while x % p == 0 {
        x /= p;
        e += 1;
    }
    (x == 1).then_some((p, e))
}

fn merge_flags(a: Option<(u64, u32)>, b: Option<(u64, u32)>) -> Option<(u64, u32)> {
    match (a, b) {
        (Some((_, 0)), x) => x,
        (x, Some((_, 0))) => x,
        (Some((p1, k1)), Some((p2, k2))) if p1 == p2 => {
            if p1.checked_pow(k1.max(k2))? > 1 << 32 {
                None
            } else {
                Some((p1, k1.max(k2)))
            }
        }
        _ => None,
    }
}

/// A homomorphism between presented groups: a `dst.ngens x src.ngens`
/// integer matrix acting on column vectors by left multiplication.
#[derive(Clone)]
pub struct AbHom {
    src: PresentedAbGroup,
    dst: PresentedAbGroup,
    mat: Mat,
}

impl std::fmt::Debug for AbHom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AbHom({:?} -> {:?}, {:?})", self.src, self.dst, self.mat)
    }
}

impl AbHom {
    /// Checked constructor: verifies the matrix sends every relation of the
    /// source into the relation span of the destination.
    pub fn new(src: PresentedAbGroup, dst: PresentedAbGroup, mat: Mat) -> Result<Self> {
        if mat.rows != dst.ngens() || mat.cols != src.ngens() {
            return Err(Error::Malformed(format!(
                "hom matrix is {}x{}, expected {}x{}",
                mat.rows,
                mat.cols,
                dst.ngens(),
                src.ngens()
            )));
        }
        let h = AbHom { src, dst, mat };
        for j in 0..h.src.relations().cols {
            let img = h.mat.mul_vec(&h.src.relations().col(j));
            if !h.dst.is_zero(&img) {
                return Err(Error::Invalid(format!(
                    "matrix does not kill source relation {j}, so the map is not well-defined"
                )));
            }
        }
        Ok(h)
    }

    /// Caller guarantees well-definedness.
    pub fn new_unchecked(src: PresentedAbGroup, dst: PresentedAbGroup, mat: Mat) -> Self {
        assert_eq!(mat.rows, dst.ngens());
        assert_eq!(mat.cols, src.ngens());
        AbHom { src, dst, mat }
    }

    pub fn from_images(src: PresentedAbGroup, dst: PresentedAbGroup, images: &[AbVec]) -> Result<Self> {
        if images.len() != src.ngens() {
            return Err(Error::Malformed(format!(
                "expected {} generator images, got {}",
                src.ngens(),
                images.len()
            )));
        }
        let mat = Mat::from_cols(dst.ngens(), images);
        Self::new(src, dst, mat)
    }

    pub fn identity(g: &PresentedAbGroup) -> Self {
        AbHom { src: g.clone(), dst: g.clone(), mat: Mat::identity(g.ngens()) }
    }

    pub fn zero_hom(src: &PresentedAbGroup, dst: &PresentedAbGroup) -> Self {
        AbHom { src: src.clone(), dst: dst.clone(), mat: Mat::zero(dst.ngens(), src.ngens()) }
    }

    pub fn src(&self) -> &PresentedAbGroup {
        &self.src
    }

    pub fn dst(&self) -> &PresentedAbGroup {
        &self.dst
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn apply(&self, x: &[BigInt]) -> AbVec {
        self.dst.canon(&self.mat.mul_vec(x))
    }

    /// `next . self`.
    pub fn then(&self, next: &AbHom) -> Result<AbHom> {
        if self.dst != next.src {
            return Err(Error::Malformed("composition endpoint mismatch".into()));
        }
        Ok(AbHom {
            src: self.src.clone(),
            dst: next.dst.clone(),
            mat: next.mat.mul(&self.mat),
        })
    }

    /// Equality as maps (images of generators agree in the destination).
    pub fn same_hom(&self, other: &AbHom) -> bool {
        self.src == other.src
            && self.dst == other.dst
            && (0..self.mat.cols)
                .all(|j| self.dst.eq_elems(&self.mat.col(j), &other.mat.col(j)))
    }

    /// Kernel subgroup with its inclusion.
    pub fn kernel(&self) -> (PresentedAbGroup, AbHom) {
        let n = self.src.ngens();
        let ra = self.src.relations();
        let rb = self.dst.relations();
        let w = self.mat.hstack(rb);
        let flag = merge_flags(self.src.pflag(), self.dst.pflag());
        if let Some((p, k)) = flag {
            let q = modq::powu(p, k);
            let e = modq::eliminate(&modq::QMat::from_mat(&w, q), p, k);
            let gens: Vec<AbVec> = e
                .kernel_gens()
                .iter()
                .map(|g| g[..n].iter().map(|&x| BigInt::from(x)).collect::<AbVec>())
                .filter(|g: &AbVec| !g.iter().all(|x| x.is_zero()))
                .collect();
            let s = gens.len();
            let gmat = Mat::from_cols(n, &gens);
            let w2 = gmat.hstack(ra);
            let e2 = modq::eliminate(&modq::QMat::from_mat(&w2, q), p, k);
            let mut rel_cols: Vec<AbVec> = e2
                .kernel_gens()
                .iter()
                .map(|g| g[..s].iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            // The mod-q kernel generators span the relation lattice only
            // together with q*Z^s; append explicit caps.
            for i in 0..s {
                let mut cap = vec![BigInt::zero(); s];
                cap[i] = BigInt::from(q);
                rel_cols.push(cap);
            }
            let kgrp = PresentedAbGroup::with_flag(s, Mat::from_cols(s, &rel_cols), Some((p, k)));
            let incl = AbHom::new_unchecked(kgrp.clone(), self.src.clone(), gmat);
            return (kgrp, incl);
        }
        let sw = snf::smith(&w);
        let gens: Vec<AbVec> = (sw.rank..w.cols)
            .map(|t| {
                let col = sw.v.col(t);
                col[..n].to_vec()
            })
            .filter(|g| !g.iter().all(|x| x.is_zero()))
            .collect();
        let s = gens.len();
        let gmat = Mat::from_cols(n, &gens);
        let w2 = gmat.hstack(ra);
        let sw2 = snf::smith(&w2);
        let rel_cols: Vec<AbVec> = (sw2.rank..w2.cols).map(|t| sw2.v.col(t)[..s].to_vec()).collect();
        let kgrp =
            PresentedAbGroup::with_flag(s, Mat::from_cols(s, &rel_cols), self.src.pflag());
        let incl = AbHom::new_unchecked(kgrp.clone(), self.src.clone(), gmat);
        (kgrp, incl)
    }

    /// Cokernel with its projection.
    pub fn cokernel(&self) -> (PresentedAbGroup, AbHom) {
        let rels = self.mat.hstack(self.dst.relations());
        let coker = PresentedAbGroup::with_flag(self.dst.ngens(), rels, self.dst.pflag());
        let proj =
            AbHom::new_unchecked(self.dst.clone(), coker.clone(), Mat::identity(self.dst.ngens()));
        (coker, proj)
    }

    /// Reusable preimage solver for this map.
    pub fn solver(&self) -> PreimageSolver {
        let w = self.mat.hstack(self.dst.relations());
        let engine = match merge_flags(self.src.pflag(), self.dst.pflag()) {
            Some((p, k)) => {
                let q = modq::powu(p, k);
                Engine::Q(modq::eliminate(&modq::QMat::from_mat(&w, q), p, k), q)
            }
            None => Engine::Big(snf::smith(&w)),
        };
        PreimageSolver { n: self.src.ngens(), src: self.src.clone(), engine }
    }

    /// One-shot preimage: any `x` with `f(x) = y`, canonicalized; `None`
    /// when `y` is outside the image. `y` may be any representative.
    pub fn solve(&self, y: &[BigInt]) -> Option<AbVec> {
        self.solver().solve(y)
    }
}

enum Engine {
    Big(Snf),
    Q(modq::QElim, u64),
}

/// Preimage solver built once per map; free solver coordinates are pinned
/// to zero and the result is canonicalized in the source group, so repeated
/// calls are deterministic.
pub struct PreimageSolver {
    n: usize,
    src: PresentedAbGroup,
    engine: Engine,
}

impl PreimageSolver {
    pub fn solve(&self, y: &[BigInt]) -> Option<AbVec> {
        match &self.engine {
            Engine::Q(e, q) => {
                let yq = reduce_vec(y, *q);
                let full = e.solve(&yq)?;
                let x: AbVec = full[..self.n].iter().map(|&v| BigInt::from(v)).collect();
                Some(self.src.canon(&x))
            }
            Engine::Big(s) => {
                let uy = s.u.mul_vec(y);
                let diag = s.diag();
                let mut w = vec![BigInt::zero(); s.d.cols];
                for (t, item) in uy.iter().enumerate() {
                    if t < diag.len() && !diag[t].is_zero() {
                        let (quot, rem) = item.div_rem(&diag[t]);
                        if !rem.is_zero() {
                            return None;
                        }
                        w[t] = quot;
                    } else if !item.is_zero() {
                        return None;
                    }
                }
                let full = s.v.mul_vec(&w);
                Some(self.src.canon(&full[..self.n]))
            }
        }
    }
}
