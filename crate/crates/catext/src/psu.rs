//! Monomial-matrix models in the special unitary group on `2p` strands.
//!
//! Matrix entries are abstract powers of a primitive `p^K`-th root of unity
//! `ζ`, stored as exponents, so every computation here is exact permutation
//! and exponent bookkeeping. The basic pair on `p` strands is
//! `A = diag(1, ζ_p, ζ_p², …)` and the cycle `B: e_i ↦ e_{i-1}`; their
//! commutator `ABA⁻¹B⁻¹` is the scalar matrix `ζ_p⁻¹·I`, a primitive p-th
//! root of unity either way the cycle is oriented. Diagonal-block placements
//! of `A` and `B` on `2p` strands together with the determinant-one scalar
//! pairs `diag(uI, vI)`, `uᵖvᵖ = 1`, generate the group modelled by
//! [`build_q`]; its image in the projective group is taken modulo the
//! scalar subgroup `⟨ζ_p·I⟩`, which is exactly the set of determinant-one
//! scalars in this class when `p` is odd.
//!
//! The point of the model: with `X = Ā⁽¹⁾B̄⁽²⁾` and `Y = B̄⁽¹⁾Ā⁽²⁾`, every
//! torus shift of the lifts has the same commutator
//! `[X·Ū, Y·V̄] = [X, Y] ≠ 1`, so the projection onto the component group
//! admits no section over `⟨x̄, ȳ⟩`; [`section_obstruction`] certifies this
//! by exhaustion and [`restricted_class_obstruction`] re-derives it as a
//! nonzero degree-2 class of the corresponding extension.

use num_bigint::BigInt;
use serde::Serialize;

use crate::abgrp::{AbVec, Mat};
use crate::adams::PToralData;
use crate::cobar::CohomologyClass;
use crate::padic::is_prime;
use crate::{Error, Result};

/// Largest matrix size any placement constructor will produce.
const MAX_DIM: usize = 1 << 14;

/// Largest number of torus pairs a section sweep will enumerate.
const MAX_PAIRS: u64 = 1 << 20;

/// Largest prime whose restricted extension class gets computed; the
/// degree-3 cochain matrices are dense over `p⁶` chains.
const MAX_CLASS_P: u64 = 3;

fn checked_root_order(p: u64, k: u32) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::Malformed(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(Error::Malformed("root-of-unity precision must be at least 1".into()));
    }
    p.checked_pow(k)
        .filter(|q| *q <= u64::from(u32::MAX))
        .ok_or_else(|| Error::Malformed(format!("root order {p}^{k} is out of range")))
}

fn odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::Malformed("the construction needs an odd prime".into()));
    }
    if !is_prime(p) {
        return Err(Error::Malformed(format!("{p} is not prime")));
    }
    Ok(())
}

/// `true` for even permutations.
fn perm_is_even(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut even = true;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            even = !even;
        }
    }
    even
}

/// Square matrix with exactly one nonzero entry in every row and column,
/// each a power of the fixed primitive `p^K`-th root of unity `ζ`: row `i`
/// carries `ζ^exps[i]` in column `perm[i]`. Products, inverses, and
/// determinants stay in this class, so the arithmetic never leaves exact
/// exponent bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialMatrix {
    n: usize,
    p: u64,
    k: u32,
    perm: Vec<usize>,
    exps: Vec<u64>,
}

impl MonomialMatrix {
    pub fn new(p: u64, k: u32, perm: Vec<usize>, exps: Vec<u64>) -> Result<Self> {
        let q = checked_root_order(p, k)?;
        let n = perm.len();
        if n == 0 {
            return Err(Error::Malformed("empty matrix".into()));
        }
        if exps.len() != n {
            return Err(Error::Malformed("one exponent per row is required".into()));
        }
        let mut seen = vec![false; n];
        for &j in &perm {
            if j >= n || seen[j] {
                return Err(Error::Malformed("row targets are not a permutation".into()));
            }
            seen[j] = true;
        }
        let exps = exps.into_iter().map(|e| e % q).collect();
        Ok(MonomialMatrix { n, p, k, perm, exps })
    }

    pub fn identity(n: usize, p: u64, k: u32) -> Result<Self> {
        MonomialMatrix::new(p, k, (0..n).collect(), vec![0; n])
    }

    /// `ζ^e · I`.
    pub fn scalar(n: usize, p: u64, k: u32, e: i64) -> Result<Self> {
        let q = checked_root_order(p, k)? as i64;
        let r = (e % q + q) % q;
        MonomialMatrix::new(p, k, (0..n).collect(), vec![r as u64; n])
    }

    /// Block-diagonal assembly; the blocks must share the root of unity.
    pub fn from_blocks(blocks: &[&MonomialMatrix]) -> Result<Self> {
        let first = *blocks.first().ok_or_else(|| Error::Malformed("no blocks".into()))?;
        let mut perm = Vec::new();
        let mut exps = Vec::new();
        let mut offset = 0usize;
        for b in blocks {
            if b.p != first.p || b.k != first.k {
                return Err(Error::Malformed("blocks use different roots of unity".into()));
            }
            if offset + b.n > MAX_DIM {
                return Err(Error::Refused(format!("block sum exceeds {MAX_DIM} strands")));
            }
            perm.extend(b.perm.iter().map(|j| j + offset));
            exps.extend_from_slice(&b.exps);
            offset += b.n;
        }
        MonomialMatrix::new(first.p, first.k, perm, exps)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    /// Order `p^K` of the root of unity the entries live in.
    pub fn root_order(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.p != other.p || self.k != other.k {
            return Err(Error::Malformed("matrices live in different groups".into()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let q = self.root_order();
        let mut perm = Vec::with_capacity(self.n);
        let mut exps = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mid = self.perm[i];
            perm.push(other.perm[mid]);
            exps.push((self.exps[i] + other.exps[mid]) % q);
        }
        Ok(MonomialMatrix { n: self.n, p: self.p, k: self.k, perm, exps })
    }

    pub fn inverse(&self) -> Self {
        let q = self.root_order();
        let mut perm = vec![0usize; self.n];
        let mut exps = vec![0u64; self.n];
        for i in 0..self.n {
            perm[self.perm[i]] = i;
            exps[self.perm[i]] = (q - self.exps[i]) % q;
        }
        MonomialMatrix { n: self.n, p: self.p, k: self.k, perm, exps }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = MonomialMatrix {
            n: self.n,
            p: self.p,
            k: self.k,
            perm: (0..self.n).collect(),
            exps: vec![0; self.n],
        };
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same shape");
            }
            base = base.mul(&base).expect("same shape");
            e >>= 1;
        }
        acc
    }

    /// `self · other · self⁻¹ · other⁻¹`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.mul(&self.inverse())?.mul(&other.inverse())
    }

    /// Determinant as a sign and an exponent: `det = ±ζ^e`.
    pub fn det(&self) -> (bool, u64) {
        let q = self.root_order();
        let e = self.exps.iter().fold(0u64, |a, &x| (a + x) % q);
        (perm_is_even(&self.perm), e)
    }

    pub fn det_is_one(&self) -> bool {
        self.det() == (true, 0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_scalar(&self) -> bool {
        self.is_diagonal() && self.exps.iter().all(|&e| e == self.exps[0])
    }

    /// Kronecker placement of a size-`n` matrix into the given factor of an
    /// `n^total`-dimensional tensor power, slot 0 being the most significant
    /// digit of the strand index.
    pub fn tensor_slot(&self, slot: usize, total: usize) -> Result<Self> {
        if total == 0 || slot >= total {
            return Err(Error::Malformed(format!("slot {slot} is out of range for {total} factors")));
        }
        let mut dim = 1usize;
        for _ in 0..total {
            dim = dim
                .checked_mul(self.n)
                .filter(|d| *d <= MAX_DIM)
                .ok_or_else(|| {
                    Error::Refused(format!("tensor power {}^{total} exceeds {MAX_DIM} strands", self.n))
                })?;
        }
        let stride = self.n.pow((total - 1 - slot) as u32);
        let mut perm = Vec::with_capacity(dim);
        let mut exps = Vec::with_capacity(dim);
        for r in 0..dim {
            let d = (r / stride) % self.n;
            perm.push(r - d * stride + self.perm[d] * stride);
            exps.push(self.exps[d]);
        }
        MonomialMatrix::new(self.p, self.k, perm, exps)
    }
}

/// `A = diag(1, ζ_p, …, ζ_p^{p-1})` on `p` strands at precision `K`, so the
/// diagonal entries are the `p^{K-1}`-fold powers of `ζ`.
pub fn build_a(p: u64, k: u32) -> Result<MonomialMatrix> {
    odd_prime(p)?;
    let q = checked_root_order(p, k)?;
    let step = q / p;
    let n = p as usize;
    MonomialMatrix::new(p, k, (0..n).collect(), (0..n as u64).map(|i| (i * step) % q).collect())
}

/// The cycle `B: e_i ↦ e_{i-1}` on `p` strands; its determinant is `+1`
/// because a p-cycle is even for odd `p`.
pub fn build_b(p: u64, k: u32) -> Result<MonomialMatrix> {
    odd_prime(p)?;
    checked_root_order(p, k)?;
    let n = p as usize;
    MonomialMatrix::new(p, k, (0..n).map(|i| (i + 1) % n).collect(), vec![0; n])
}

/// Generators of the determinant-one monomial group on `2p` strands: `A`
/// and `B` placed in each diagonal block, one generator `diag(ζI, ζ⁻¹I)`
/// of the torus direction, and the leftover scalar `diag(ζ_p·I, I)`. The
/// scalar pairs `diag(ζ^a I, ζ^b I)` with determinant one are exactly those
/// with `p·(a + b) ≡ 0`, and the two scalar generators span them.
#[derive(Clone, Debug, Serialize)]
pub struct QGenerators {
    pub a1: MonomialMatrix,
    pub b1: MonomialMatrix,
    pub a2: MonomialMatrix,
    pub b2: MonomialMatrix,
    pub torus: MonomialMatrix,
    pub scalar_p: MonomialMatrix,
}

pub fn build_q(p: u64, k: u32) -> Result<QGenerators> {
    let a = build_a(p, k)?;
    let b = build_b(p, k)?;
    let n = p as usize;
    let q = checked_root_order(p, k)?;
    let id = MonomialMatrix::identity(n, p, k)?;
    let gens = QGenerators {
        a1: MonomialMatrix::from_blocks(&[&a, &id])?,
        b1: MonomialMatrix::from_blocks(&[&b, &id])?,
        a2: MonomialMatrix::from_blocks(&[&id, &a])?,
        b2: MonomialMatrix::from_blocks(&[&id, &b])?,
        torus: MonomialMatrix::from_blocks(&[
            &MonomialMatrix::scalar(n, p, k, 1)?,
            &MonomialMatrix::scalar(n, p, k, -1)?,
        ])?,
        scalar_p: MonomialMatrix::from_blocks(&[
            &MonomialMatrix::scalar(n, p, k, (q / p) as i64)?,
            &id,
        ])?,
    };
    for (name, m) in [
        ("a1", &gens.a1),
        ("b1", &gens.b1),
        ("a2", &gens.a2),
        ("b2", &gens.b2),
        ("torus", &gens.torus),
        ("scalar_p", &gens.scalar_p),
    ] {
        if !m.det_is_one() {
            return Err(Error::Invalid(format!("generator {name} does not have determinant one")));
        }
    }
    Ok(gens)
}

/// Element of the projective group: a determinant-one monomial matrix
/// modulo the scalar subgroup `⟨ζ_p·I⟩`, stored as the canonical coset
/// representative with the top base-p digit of the first row's exponent
/// zeroed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PSUElement {
    rep: MonomialMatrix,
}

/// Quotient map onto the projective group. Only determinant-one matrices
/// on a strand count divisible by `p` are accepted; for those the scalars
/// `⟨ζ_p·I⟩` are exactly what dies.
pub fn project_psu(m: &MonomialMatrix) -> Result<PSUElement> {
    if !m.det_is_one() {
        return Err(Error::Invalid("projection needs a determinant-one matrix".into()));
    }
    if m.n % (m.p as usize) != 0 {
        return Err(Error::Invalid(format!(
            "scalar p-th roots are not determinant-one on {} strands",
            m.n
        )));
    }
    let q = m.root_order();
    let step = q / m.p;
    let shift = (m.exps[0] / step) * step;
    let exps = m.exps.iter().map(|&e| (e + q - shift) % q).collect();
    Ok(PSUElement { rep: MonomialMatrix { exps, ..m.clone() } })
}

impl PSUElement {
    pub fn representative(&self) -> &MonomialMatrix {
        &self.rep
    }

    pub fn mul(&self, other: &PSUElement) -> Result<PSUElement> {
        project_psu(&self.rep.mul(&other.rep)?)
    }

    pub fn inverse(&self) -> PSUElement {
        project_psu(&self.rep.inverse()).expect("inverse of a determinant-one matrix")
    }

    pub fn pow(&self, e: u64) -> PSUElement {
        project_psu(&self.rep.pow(e)).expect("power of a determinant-one matrix")
    }

    pub fn commutator(&self, other: &PSUElement) -> Result<PSUElement> {
        project_psu(&self.rep.commutator(&other.rep)?)
    }

    pub fn is_identity(&self) -> bool {
        self.rep.is_diagonal() && self.rep.exps.iter().all(|&e| e == 0)
    }

    /// Coordinate `a ∈ Z/p^K` of a projective torus element, the unique
    /// representative of its coset with the shape `diag(ζ^a I, ζ^{-a} I)`.
    pub fn torus_coordinate(&self) -> Result<u64> {
        let m = &self.rep;
        let q = m.root_order();
        let step = q / m.p;
        if m.n % 2 != 0 || !m.is_diagonal() {
            return Err(Error::Invalid("not a torus element".into()));
        }
        let half = m.n / 2;
        let a = m.exps[0];
        let b = m.exps[half];
        if m.exps[..half].iter().any(|&e| e != a) || m.exps[half..].iter().any(|&e| e != b) {
            return Err(Error::Invalid("not a torus element".into()));
        }
        let s = (a + b) % q;
        if s % step != 0 {
            return Err(Error::Invalid("not a torus element".into()));
        }
        // shift by ζ_p^c·I into the diag(uI, u⁻¹I) gauge: 2c ≡ -s/step mod p
        let inv2 = (m.p + 1) / 2;
        let c = ((m.p - s / step % m.p) % m.p * inv2) % m.p;
        Ok((a + c * step) % q)
    }
}

/// The projective torus element `diag(ζ^a I, ζ^{-a} I)` on `2·half` strands.
pub fn torus_element(half: usize, p: u64, k: u32, a: i64) -> Result<PSUElement> {
    project_psu(&MonomialMatrix::from_blocks(&[
        &MonomialMatrix::scalar(half, p, k, a)?,
        &MonomialMatrix::scalar(half, p, k, -a)?,
    ])?)
}

/// The pair `X = Ā⁽¹⁾B̄⁽²⁾`, `Y = B̄⁽¹⁾Ā⁽²⁾` in the projective group.
pub fn xy_generators(p: u64, k: u32) -> Result<(PSUElement, PSUElement)> {
    let g = build_q(p, k)?;
    Ok((project_psu(&g.a1.mul(&g.b2)?)?, project_psu(&g.b1.mul(&g.a2)?)?))
}

/// `[X, Y]`: the projective image of `diag(ζ_p⁻¹·I, ζ_p·I)`, a torus
/// element that is not killed by the scalars because `ζ_p ≠ ζ_p⁻¹` for odd
/// `p`.
pub fn xy_commutator(p: u64, k: u32) -> Result<PSUElement> {
    let (x, y) = xy_generators(p, k)?;
    x.commutator(&y)
}

/// Outcome of a full sweep over torus shifts of a lift pair.
#[derive(Clone, Debug, Serialize)]
pub struct SectionReport {
    pub checked_pairs: u64,
    pub all_nontrivial: bool,
    /// Every commutator `[x·U, y·V]` equalled `[x, y]` exactly.
    pub commutator_constant: bool,
}

/// Sweeps every pair `U, V` of level-K torus elements and records whether
/// some shifted lift pair `(x·U, y·V)` commutes. A section of the projection
/// onto the component group would have to produce such a pair, so an
/// all-nontrivial sweep certifies that no section exists over `⟨x̄, ȳ⟩`.
pub fn section_obstruction(x: &PSUElement, y: &PSUElement) -> Result<SectionReport> {
    x.rep.same_shape(&y.rep)?;
    if x.rep.n % 2 != 0 {
        return Err(Error::Malformed("the torus needs two equal blocks".into()));
    }
    let (p, k) = (x.rep.p, x.rep.k);
    let q = x.rep.root_order();
    let pairs = q * q;
    if pairs > MAX_PAIRS {
        return Err(Error::Refused(format!("would sweep {pairs} torus pairs, more than {MAX_PAIRS}")));
    }
    let half = x.rep.n / 2;
    let base = x.commutator(y)?;
    let shifts: Vec<PSUElement> =
        (0..q).map(|a| torus_element(half, p, k, a as i64)).collect::<Result<_>>()?;
    let mut all_nontrivial = true;
    let mut commutator_constant = true;
    for u in &shifts {
        let xu = x.mul(u)?;
        for v in &shifts {
            let c = xu.commutator(&y.mul(v)?)?;
            all_nontrivial &= !c.is_identity();
            commutator_constant &= c == base;
        }
    }
    Ok(SectionReport { checked_pairs: pairs, all_nontrivial, commutator_constant })
}

/// [`section_obstruction`] applied to the canonical pair `X̄, Ȳ`.
pub fn no_section_check(p: u64, k: u32) -> Result<SectionReport> {
    let (x, y) = xy_generators(p, k)?;
    section_obstruction(&x, &y)
}

/// Cocycle presentation of the subgroup generated by the projective torus
/// together with `x^i y^j`, `0 ≤ i, j < p`: the pullback of the extension
/// by the level-K torus along `(Z/p)² → ⟨x̄, ȳ⟩`. Requires the images of
/// `x` and `y` in the component group to commute, their p-th powers to be
/// torus elements, and conjugation by either to fix the torus pointwise;
/// violations surface as errors when a coset product fails to reduce.
pub fn coset_extension_data(x: &PSUElement, y: &PSUElement) -> Result<PToralData> {
    x.rep.same_shape(&y.rep)?;
    if x.rep.n % 2 != 0 {
        return Err(Error::Malformed("the torus needs two equal blocks".into()));
    }
    let (p, k) = (x.rep.p, x.rep.k);
    let half = x.rep.n / 2;
    let t = torus_element(half, p, k, 1)?;
    for s in [x, y] {
        if s.mul(&t)?.mul(&s.inverse())? != t {
            return Err(Error::Invalid("conjugation moves the torus".into()));
        }
    }
    let pu = p as usize;
    let npi = pu * pu;
    let sect: Vec<PSUElement> = (0..npi)
        .map(|g| x.pow((g / pu) as u64).mul(&y.pow((g % pu) as u64)))
        .collect::<Result<_>>()?;
    let mut table = vec![vec![0usize; npi]; npi];
    let mut coc = vec![vec![AbVec::new(); npi]; npi];
    for g in 0..npi {
        for h in 0..npi {
            let prod = (g / pu + h / pu) % pu * pu + (g % pu + h % pu) % pu;
            table[g][h] = prod;
            let diff = sect[g].mul(&sect[h])?.mul(&sect[prod].inverse())?;
            coc[g][h] = vec![BigInt::from(diff.torus_coordinate()?)];
        }
    }
    PToralData::new(p, k, 1, table, vec![Mat::identity(1); npi], coc)
}

/// Degree-2 class of the extension of `⟨x̄, ȳ⟩` by the level-K torus for
/// the canonical pair; a nonzero class certifies that the extension does
/// not split, in agreement with [`no_section_check`].
pub fn restricted_class_obstruction(p: u64, k: u32) -> Result<CohomologyClass> {
    if p > MAX_CLASS_P {
        return Err(Error::Refused(format!(
            "degree-3 cochains over {} chains get dense; p ≤ {MAX_CLASS_P} is supported",
            (p * p).pow(3)
        )));
    }
    let (x, y) = xy_generators(p, k)?;
    coset_extension_data(&x, &y)?.extension_class()
}
