//! Truncated discrete p-toral groups and their normal Adams automorphisms.
//!
//! A group `S` with a finite p-group of components `pi` and torus truncation
//! `T = (Z/p^k)^r` is stored as cocycle data: an action of `pi` on `T` and a
//! regular 2-cocycle. Pairs `(t, x)` multiply by
//! `(t, x)(t', x') = (t + action(x)·t' + coc(x, x'), xx')`, so the normal
//! Adams automorphisms `(t, x) ↦ (ζ·t + d(x), x)` are exactly the solutions
//! of the linear condition `δd = (ζ − 1)·coc`. Everything here funnels that
//! condition through the cochain complex of the one-object category on `pi`.
//!
//! The divisible torus is out of reach at a fixed truncation; statements
//! about it are recovered by the stabilization protocol: compute the image
//! of the inclusion-induced map between consecutive truncation levels
//! (multiplication by p) and escalate the level until two consecutive
//! images agree.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::abgrp::{smith_normal_form, AbHom, AbVec, Mat, PresentedAbGroup};
use crate::cobar::{Budget, Cochain, CochainComplex, Cohomology};
use crate::fincat::{one_object_cat, AbFunctor, FinCat, NatTrans};
use crate::padic::{is_prime, UnitModPk};
use crate::{Error, Result};

/// Largest total group order `|pi|·p^{k·r}` that enumeration-style
/// operations will touch.
const MAX_TOTAL_ORDER: u64 = 4096;

/// Largest number of automorphisms `enumerate_ad` will emit.
const MAX_AD_OUTPUT: u64 = 16384;

fn modq_big(x: &BigInt, q: &BigInt) -> BigInt {
    let r = x % q;
    if r.is_negative() {
        r + q
    } else {
        r
    }
}

fn mat_mod(m: &Mat, q: &BigInt) -> Mat {
    let mut out = Mat::zero(m.rows, m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            out.set(i, j, modq_big(m.get(i, j), q));
        }
    }
    out
}

fn scaled_identity(n: usize, c: &BigInt) -> Mat {
    let mut m = Mat::zero(n, n);
    for i in 0..n {
        m.set(i, i, c.clone());
    }
    m
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn unit_at_level(z: &UnitModPk, m: u32) -> Result<UnitModPk> {
    let r = z.residue_mod(m)?;
    let r = i64::try_from(r)
        .map_err(|_| Error::Malformed("unit residue does not fit the constructor range".into()))?;
    UnitModPk::new(z.p, m, r)
}

/// Reads a classical group 2-cocycle table into a degree-2 cochain on a
/// one-object complex. The chain `(c0, c1)` applies `c0` first, so its value
/// is `coc[c1][c0]`; this flip lives here and in [`cochain_to_cocycle`] only.
pub fn cocycle_to_cochain(cx: &CochainComplex, coc: &[Vec<AbVec>]) -> Result<Cochain> {
    let cat = cx.coeff().base();
    if cat.nobjects() != 1 {
        return Err(Error::Malformed("group cocycles need a one-object category".into()));
    }
    let n = cat.nmorphisms();
    if coc.len() != n || coc.iter().any(|row| row.len() != n) {
        return Err(Error::Malformed("cocycle table does not match the group order".into()));
    }
    let chains = cx.chains(2)?;
    let values: Vec<AbVec> = chains.iter().map(|ch| coc[ch[1]][ch[0]].clone()).collect();
    cx.cochain_from_values(2, values)
}

/// Inverse of [`cocycle_to_cochain`]: tabulates a degree-2 cochain on a
/// one-object complex as a classical cocycle, `coc[x][y]` = value at the
/// chain `(y, x)`.
pub fn cochain_to_cocycle(z: &Cochain) -> Result<Vec<Vec<AbVec>>> {
    if z.degree() != 2 {
        return Err(Error::Malformed("only 2-cochains tabulate as group cocycles".into()));
    }
    let cat = z.complex().coeff().base();
    if cat.nobjects() != 1 {
        return Err(Error::Malformed("group cocycles need a one-object category".into()));
    }
    let n = cat.nmorphisms();
    let mut out = vec![vec![AbVec::new(); n]; n];
    for (x, row) in out.iter_mut().enumerate() {
        for (y, entry) in row.iter_mut().enumerate() {
            *entry = z.value_on_chain(&[y, x])?.clone();
        }
    }
    Ok(out)
}

/// A discrete p-toral group truncated at level `k`: components `pi`, torus
/// `(Z/p^k)^rank`, an action of `pi` on the torus, and a regular 2-cocycle.
#[derive(Clone)]
pub struct PToralData {
    p: u64,
    k: u32,
    rank: usize,
    q: u64,
    pi: Vec<Vec<usize>>,
    e: usize,
    action: Vec<Mat>,
    coc: Vec<Vec<AbVec>>,
    torus: PresentedAbGroup,
    cat: FinCat,
    cx: OnceLock<Result<CochainComplex>>,
}

impl PartialEq for PToralData {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.k == other.k
            && self.rank == other.rank
            && self.pi == other.pi
            && self.action == other.action
            && self.coc == other.coc
    }
}

impl std::fmt::Debug for PToralData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "PToralData(p={}, k={}, rank={}, |pi|={})",
            self.p,
            self.k,
            self.rank,
            self.pi.len()
        )
    }
}

impl PToralData {
    /// Shape-checks and canonicalizes the data; semantic checks (action
    /// homomorphism, cocycle identity) live in [`Self::validate`].
    pub fn new(
        p: u64,
        k: u32,
        rank: usize,
        pi: Vec<Vec<usize>>,
        action: Vec<Mat>,
        coc: Vec<Vec<AbVec>>,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Malformed(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::Malformed("truncation level must be at least 1".into()));
        }
        let q = p
            .checked_pow(k)
            .ok_or_else(|| Error::Malformed("torus modulus p^k overflows".into()))?;
        let cat = one_object_cat(&pi)?;
        let mut m = pi.len() as u64;
        while m % p == 0 {
            m /= p;
        }
        if m != 1 {
            return Err(Error::Malformed(format!(
                "component group order {} is not a power of {p}",
                pi.len()
            )));
        }
        if action.len() != pi.len() {
            return Err(Error::Malformed("one action matrix per component element required".into()));
        }
        if action.iter().any(|a| a.rows != rank || a.cols != rank) {
            return Err(Error::Malformed(format!("action matrices must be {rank}x{rank}")));
        }
        if coc.len() != pi.len() || coc.iter().any(|row| row.len() != pi.len()) {
            return Err(Error::Malformed("cocycle table must be square over the components".into()));
        }
        if coc.iter().flatten().any(|v| v.len() != rank) {
            return Err(Error::Malformed(format!("cocycle values must have length {rank}")));
        }
        let torus = PresentedAbGroup::from_invariant_factors(&vec![q; rank]);
        let qb = BigInt::from(q);
        let action: Vec<Mat> = action.iter().map(|a| mat_mod(a, &qb)).collect();
        let coc: Vec<Vec<AbVec>> =
            coc.iter().map(|row| row.iter().map(|v| torus.canon(v)).collect()).collect();
        let e = cat.identity_of(0);
        Ok(PToralData { p, k, rank, q, pi, e, action, coc, torus, cat, cx: OnceLock::new() })
    }

    /// Splits a raw multiplication table along a prescribed torus subgroup.
    ///
    /// `torus` lists the element indices of a normal abelian subgroup that
    /// must be homocyclic of exponent `p^k`. Coset representatives are the
    /// least member of each coset, except that the torus coset is
    /// represented by the identity so the extracted cocycle is regular. Also
    /// returns the decomposition `s = t·σ(x)` of every raw element as
    /// `(torus coordinates of t, component index x)`.
    pub fn from_raw(
        p: u64,
        k: u32,
        table: &[Vec<usize>],
        torus: &[usize],
    ) -> Result<(Self, Vec<(AbVec, usize)>)> {
        let cat = one_object_cat(table)?;
        let n = table.len();
        let e = cat.identity_of(0);
        let inv: Vec<usize> = (0..n)
            .map(|x| (0..n).find(|&y| table[x][y] == e).expect("group has inverses"))
            .collect();
        let tset: BTreeSet<usize> = torus.iter().copied().collect();
        if tset.is_empty() {
            return Err(Error::Malformed("torus subgroup cannot be empty".into()));
        }
        if let Some(&bad) = tset.iter().find(|&&t| t >= n) {
            return Err(Error::Malformed(format!("torus element {bad} is out of range")));
        }
        for &a in &tset {
            for &b in &tset {
                if !tset.contains(&table[a][b]) {
                    return Err(Error::Malformed(format!(
                        "torus subset is not closed: {a}*{b} escapes"
                    )));
                }
                if table[a][b] != table[b][a] {
                    return Err(Error::Malformed(format!(
                        "torus subgroup is not abelian at ({a},{b})"
                    )));
                }
            }
        }
        for s in 0..n {
            for &t in &tset {
                if !tset.contains(&table[table[s][t]][inv[s]]) {
                    return Err(Error::Malformed(format!(
                        "torus subgroup is not normal: conjugating {t} by {s} escapes"
                    )));
                }
            }
        }
        if k == 0 {
            return Err(Error::Malformed("truncation level must be at least 1".into()));
        }
        let q = p
            .checked_pow(k)
            .ok_or_else(|| Error::Malformed("torus modulus p^k overflows".into()))?;
        let mut sz = tset.len() as u64;
        let mut val = 0u32;
        while sz % p == 0 {
            sz /= p;
            val += 1;
        }
        if sz != 1 || val % k != 0 {
            return Err(Error::Malformed(format!(
                "torus order {} is not p^(k·r) for p={p}, k={k}",
                tset.len()
            )));
        }
        let rank = (val / k) as usize;

        // Greedy homocyclic basis: an element of order p^k is independent of
        // the current span exactly when its p^(k-1) power stays outside.
        let pow_elem = |x: usize, mut e_: u64| {
            let mut acc = e;
            let mut b = x;
            while e_ > 0 {
                if e_ & 1 == 1 {
                    acc = table[acc][b];
                }
                b = table[b][b];
                e_ >>= 1;
            }
            acc
        };
        let mut span: HashMap<usize, Vec<u64>> = HashMap::new();
        span.insert(e, Vec::new());
        let mut basis: Vec<usize> = Vec::new();
        while span.len() < tset.len() {
            let next = tset
                .iter()
                .copied()
                .find(|&t| !span.contains_key(&pow_elem(t, q / p)))
                .ok_or_else(|| {
                    Error::Malformed(format!(
                        "torus subgroup is not homocyclic of exponent {p}^{k}"
                    ))
                })?;
            if pow_elem(next, q) != e {
                return Err(Error::Malformed(format!(
                    "torus subgroup is not homocyclic of exponent {p}^{k}"
                )));
            }
            let mut grown = HashMap::with_capacity(span.len() * q as usize);
            for (&s, co) in &span {
                let mut cur = s;
                for j in 0..q {
                    let mut c = co.clone();
                    c.push(j);
                    if grown.insert(cur, c).is_some() {
                        return Err(Error::Malformed(format!(
                            "torus subgroup is not homocyclic of exponent {p}^{k}"
                        )));
                    }
                    cur = table[cur][next];
                }
            }
            span = grown;
            basis.push(next);
        }
        debug_assert_eq!(basis.len(), rank);
        let coords = |x: usize| -> AbVec {
            let mut c: AbVec = span[&x].iter().map(|&j| BigInt::from(j)).collect();
            c.resize(rank, BigInt::zero());
            c
        };

        // Right cosets T·s keyed by their least member; the torus coset is
        // represented by the identity so that the cocycle comes out regular.
        let mut coset_key: Vec<Option<usize>> = vec![None; n];
        for s in 0..n {
            if coset_key[s].is_some() {
                continue;
            }
            let members: Vec<usize> = tset.iter().map(|&t| table[t][s]).collect();
            let key = *members.iter().min().expect("coset is nonempty");
            for mem in members {
                coset_key[mem] = Some(key);
            }
        }
        let keys: BTreeSet<usize> = coset_key.iter().map(|c| c.expect("coset assigned")).collect();
        let key_index: HashMap<usize, usize> =
            keys.iter().enumerate().map(|(i, &key)| (key, i)).collect();
        let npi = keys.len();
        let torus_key = coset_key[e].expect("identity has a coset");
        let sigma: Vec<usize> =
            keys.iter().map(|&key| if key == torus_key { e } else { key }).collect();
        let class_of = |s: usize| key_index[&coset_key[s].expect("coset assigned")];
        let pi: Vec<Vec<usize>> = (0..npi)
            .map(|i| (0..npi).map(|j| class_of(table[sigma[i]][sigma[j]])).collect())
            .collect();
        let action: Vec<Mat> = (0..npi)
            .map(|x| {
                let cols: Vec<AbVec> = basis
                    .iter()
                    .map(|&b| coords(table[table[sigma[x]][b]][inv[sigma[x]]]))
                    .collect();
                Mat::from_cols(rank, &cols)
            })
            .collect();
        let coc: Vec<Vec<AbVec>> = (0..npi)
            .map(|x| {
                (0..npi)
                    .map(|y| {
                        let xy = class_of(table[sigma[x]][sigma[y]]);
                        coords(table[table[sigma[x]][sigma[y]]][inv[sigma[xy]]])
                    })
                    .collect()
            })
            .collect();
        let data = PToralData::new(p, k, rank, pi, action, coc)?;
        let violations = data.validate();
        if let Some(first) = violations.first() {
            return Err(Error::Invalid(format!("extracted data fails validation: {first}")));
        }
        let decomp: Vec<(AbVec, usize)> = (0..n)
            .map(|s| {
                let x = class_of(s);
                (coords(table[s][inv[sigma[x]]]), x)
            })
            .collect();
        Ok((data, decomp))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The torus modulus `p^k`.
    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn pi_table(&self) -> &[Vec<usize>] {
        &self.pi
    }

    pub fn pi_order(&self) -> usize {
        self.pi.len()
    }

    pub fn identity_index(&self) -> usize {
        self.e
    }

    pub fn action_of(&self, x: usize) -> &Mat {
        &self.action[x]
    }

    pub fn coc_entry(&self, x: usize, y: usize) -> &AbVec {
        &self.coc[x][y]
    }

    pub fn torus(&self) -> &PresentedAbGroup {
        &self.torus
    }

    pub fn component_cat(&self) -> &FinCat {
        &self.cat
    }

    pub fn total_order(&self) -> BigInt {
        BigInt::from(self.pi.len()) * BigInt::from(self.q).pow(self.rank as u32)
    }

    /// Exhaustive semantic checks: invertible action matrices, the action
    /// homomorphism law, cocycle regularity, and the full cocycle identity
    /// (equivalently, associativity of the pair product).
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let qb = BigInt::from(self.q);
        let pb = BigInt::from(self.p);
        for (x, a) in self.action.iter().enumerate() {
            if (a.det() % &pb).is_zero() {
                out.push(format!("action matrix at {x} is not invertible mod p^k"));
            }
        }
        if self.action[self.e] != scaled_identity(self.rank, &BigInt::one()) {
            out.push("action at the identity component is not the identity matrix".into());
        }
        let npi = self.pi.len();
        for x in 0..npi {
            for y in 0..npi {
                let prod = mat_mod(&self.action[x].mul(&self.action[y]), &qb);
                if prod != self.action[self.pi[x][y]] {
                    out.push(format!("action fails the homomorphism law at ({x},{y})"));
                }
            }
        }
        for x in 0..npi {
            if !self.torus.is_zero(&self.coc[self.e][x]) || !self.torus.is_zero(&self.coc[x][self.e]) {
                out.push(format!("cocycle is not regular at component {x}"));
            }
        }
        for x in 0..npi {
            for y in 0..npi {
                for z in 0..npi {
                    let lhs = self.torus.add(
                        &self.action[x].mul_vec(&self.coc[y][z]),
                        &self.coc[x][self.pi[y][z]],
                    );
                    let rhs = self.torus.add(&self.coc[self.pi[x][y]][z], &self.coc[x][y]);
                    if lhs != rhs {
                        out.push(format!("cocycle identity fails at ({x},{y},{z})"));
                    }
                }
            }
        }
        out
    }

    /// The cochain complex of the one-object category on `pi` with torus
    /// coefficients twisted by the action. Built once, shared by clones.
    pub fn complex(&self) -> Result<&CochainComplex> {
        self.cx
            .get_or_init(|| {
                let homs: Vec<AbHom> = self
                    .action
                    .iter()
                    .map(|a| AbHom::new(self.torus.clone(), self.torus.clone(), a.clone()))
                    .collect::<Result<_>>()?;
                let phi = AbFunctor::new(self.cat.clone(), vec![self.torus.clone()], homs)?;
                CochainComplex::new(phi, Budget::default())
            })
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// The defining cocycle as a degree-2 cochain on [`Self::complex`].
    pub fn cocycle_cochain(&self) -> Result<Cochain> {
        cocycle_to_cochain(self.complex()?, &self.coc)
    }

    /// The class of the defining cocycle in `H²(pi, T)`.
    pub fn extension_class(&self) -> Result<crate::cobar::CohomologyClass> {
        let h2 = self.complex()?.cohomology(2)?;
        h2.class_of(&self.cocycle_cochain()?)
    }

    /// Order `p^m` of the extension class, with `m`.
    pub fn extension_class_order(&self) -> Result<(BigInt, u32)> {
        let ord = self
            .extension_class()?
            .order()
            .ok_or_else(|| Error::Invalid("extension class has infinite order".into()))?;
        let pb = BigInt::from(self.p);
        let mut m = 0u32;
        let mut t = ord.clone();
        while t > BigInt::one() {
            if (&t % &pb).is_zero() {
                t /= &pb;
                m += 1;
            } else {
                return Err(Error::Invalid("extension class order is not a power of p".into()));
            }
        }
        Ok((ord, m))
    }

    /// The normal Adams automorphism of degree `zeta` with the least
    /// 1-cochain witness, if the degree condition `δd = (ζ−1)·coc` has a
    /// solution; `None` exactly when `ζ − 1` fails to kill the extension
    /// class. The degree's precision must reach the torus level.
    pub fn adams_of_degree(&self, zeta: &UnitModPk) -> Result<Option<AdamsAut>> {
        if zeta.p != self.p {
            return Err(Error::Malformed("degree lives at a different prime".into()));
        }
        if zeta.k < self.k {
            return Err(Error::Malformed(format!(
                "degree precision {} is below the torus level {}",
                zeta.k, self.k
            )));
        }
        let cx = self.complex()?;
        let z = self.cocycle_cochain()?;
        let c = BigInt::from(zeta.residue_mod(self.k)?) - BigInt::one();
        let target = z.smul(&c);
        let zero = cx.zero_cochain(2)?;
        match cx.cohomologous(&zero, &target)? {
            None => Ok(None),
            Some(u) => {
                let d: Vec<AbVec> = (0..self.pi.len())
                    .map(|x| u.value_on_chain(&[x]).cloned())
                    .collect::<Result<_>>()?;
                Ok(Some(AdamsAut::new(self.clone(), zeta.clone(), d)?))
            }
        }
    }

    /// All normal Adams automorphisms at this truncation, ordered by degree
    /// residue and then by the 1-cochain lexicographically.
    pub fn enumerate_ad(&self) -> Result<Vec<AdamsAut>> {
        let total = self.total_order();
        if total > BigInt::from(MAX_TOTAL_ORDER) {
            return Err(Error::Refused(format!(
                "total group order {total} exceeds the enumeration bound {MAX_TOTAL_ORDER}"
            )));
        }
        let cx = self.complex()?;
        let (zgrp, zincl) = cx.delta(1)?.kernel();
        let zord = zgrp.order().ok_or_else(|| Error::Invalid("cocycle group is infinite".into()))?;
        let units: Vec<u64> = (1..self.q).filter(|r| gcd_u64(*r, self.p) == 1).collect();
        let estimate = &zord * BigInt::from(units.len());
        if estimate > BigInt::from(MAX_AD_OUTPUT) {
            return Err(Error::Refused(format!(
                "about {estimate} automorphisms would be enumerated, above the bound {MAX_AD_OUTPUT}"
            )));
        }
        let shifts: Vec<Vec<AbVec>> = zgrp
            .elements()?
            .iter()
            .map(|ze| {
                let flat = zincl.apply(ze);
                (0..self.pi.len())
                    .map(|x| flat[x * self.rank..(x + 1) * self.rank].to_vec())
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        for r in units {
            let zeta = UnitModPk::new(self.p, self.k, r as i64)?;
            let Some(base) = self.adams_of_degree(&zeta)? else { continue };
            let mut fiber: Vec<AdamsAut> = shifts
                .iter()
                .map(|shift| {
                    let d: Vec<AbVec> = base
                        .d
                        .iter()
                        .zip(shift.iter())
                        .map(|(a, b)| self.torus.add(a, b))
                        .collect();
                    AdamsAut::new(self.clone(), zeta.clone(), d)
                })
                .collect::<Result<_>>()?;
            fiber.sort_by(|a, b| a.d.cmp(&b.d));
            out.extend(fiber);
        }
        Ok(out)
    }

    /// The automorphisms induced by conjugation with torus elements: degree
    /// 1 with the principal 1-cochain `d_t(x) = t − action(x)·t`, one per
    /// distinct cochain.
    pub fn aut_t(&self) -> Result<Vec<AdamsAut>> {
        let one = UnitModPk::one(self.p, self.k)?;
        let mut seen: HashSet<Vec<AbVec>> = HashSet::new();
        let mut out = Vec::new();
        for t in self.torus.elements()? {
            let d: Vec<AbVec> = (0..self.pi.len())
                .map(|x| self.torus.sub(&t, &self.action[x].mul_vec(&t)))
                .collect();
            if seen.insert(d.clone()) {
                out.push(AdamsAut::new(self.clone(), one.clone(), d)?);
            }
        }
        Ok(out)
    }

    /// Every element `(t, x)`, component-major: index `x·|T| + i` with `i`
    /// the torus enumeration position.
    pub fn elements(&self) -> Result<Vec<(AbVec, usize)>> {
        let telems = self.torus.elements()?;
        let mut out = Vec::with_capacity(telems.len() * self.pi.len());
        for x in 0..self.pi.len() {
            for t in &telems {
                out.push((t.clone(), x));
            }
        }
        Ok(out)
    }

    /// Group product of decomposed elements.
    pub fn compose_elements(
        &self,
        a: (&[BigInt], usize),
        b: (&[BigInt], usize),
    ) -> Result<(AbVec, usize)> {
        let (ta, xa) = a;
        let (tb, xb) = b;
        if xa >= self.pi.len() || xb >= self.pi.len() || ta.len() != self.rank || tb.len() != self.rank
        {
            return Err(Error::Malformed("element out of range".into()));
        }
        let t = self.torus.add(ta, &self.torus.add(&self.action[xa].mul_vec(tb), &self.coc[xa][xb]));
        Ok((t, self.pi[xa][xb]))
    }

    /// Degrees of the listed automorphisms that are normal Adams
    /// automorphisms, closed under multiplication. Maps are permutations of
    /// [`Self::elements`] order; a listed map that is not an automorphism is
    /// an error, one that is not normal Adams is skipped.
    pub fn degree_image_given_auts(&self, auts: &[Vec<usize>]) -> Result<Vec<UnitModPk>> {
        let total = self.total_order();
        if total > BigInt::from(MAX_TOTAL_ORDER) {
            return Err(Error::Refused(format!(
                "total group order {total} exceeds the enumeration bound {MAX_TOTAL_ORDER}"
            )));
        }
        let elems = self.elements()?;
        let n = elems.len();
        let index: HashMap<(AbVec, usize), usize> =
            elems.iter().cloned().zip(0..).collect();
        let mut tab = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                let prod = self.compose_elements((&elems[i].0, elems[i].1), (&elems[j].0, elems[j].1))?;
                tab[i][j] = index[&prod];
            }
        }
        let tsize = n / self.pi.len();
        let mut degrees: BTreeSet<u64> = BTreeSet::new();
        for (ai, f) in auts.iter().enumerate() {
            if f.len() != n {
                return Err(Error::Malformed(format!(
                    "map {ai} has length {}, expected {n}",
                    f.len()
                )));
            }
            let mut seen = vec![false; n];
            for &img in f {
                if img >= n || seen[img] {
                    return Err(Error::Invalid(format!("map {ai} is not a bijection")));
                }
                seen[img] = true;
            }
            for i in 0..n {
                for j in 0..n {
                    if f[tab[i][j]] != tab[f[i]][f[j]] {
                        return Err(Error::Invalid(format!(
                            "map {ai} is not an automorphism: fails at ({i},{j})"
                        )));
                    }
                }
            }
            if (0..n).any(|i| elems[f[i]].1 != elems[i].1) {
                continue;
            }
            // Restriction to the torus fiber must be a common scalar.
            let fiber0 = self.e * tsize;
            let mut zeta: Option<BigInt> = None;
            if self.rank > 0 {
                let gen_pos = (0..tsize)
                    .find(|&i| {
                        let t = &elems[fiber0 + i].0;
                        t[0].is_one() && t[1..].iter().all(|c| c.is_zero())
                    })
                    .expect("torus enumerates its first generator");
                let img = &elems[f[fiber0 + gen_pos]].0;
                if !img[1..].iter().all(|c| c.is_zero()) {
                    continue;
                }
                let cand = img[0].clone();
                let scalar = (0..tsize).all(|i| {
                    let t = &elems[fiber0 + i].0;
                    elems[f[fiber0 + i]].0 == self.torus.smul(&cand, t)
                });
                if !scalar {
                    continue;
                }
                zeta = Some(cand);
            }
            let z = zeta.unwrap_or_else(BigInt::one);
            let zu = u64::try_from(modq_big(&z, &BigInt::from(self.q)))
                .expect("canonical residue fits u64");
            if gcd_u64(zu, self.p) != 1 {
                continue;
            }
            degrees.insert(zu);
        }
        // Multiplicative closure.
        loop {
            let snapshot: Vec<u64> = degrees.iter().copied().collect();
            let before = degrees.len();
            for &a in &snapshot {
                for &b in &snapshot {
                    degrees.insert((a as u128 * b as u128 % self.q as u128) as u64);
                }
            }
            if degrees.len() == before {
                break;
            }
        }
        degrees
            .into_iter()
            .map(|r| UnitModPk::new(self.p, self.k, r as i64))
            .collect()
    }
}

/// A normal Adams automorphism `(t, x) ↦ (ζ·t + d(x), x)` of a
/// [`PToralData`]; the defining condition `δd = (ζ−1)·coc` is verified on
/// construction. The degree may carry precision above the torus level and
/// acts through its residue.
#[derive(Clone)]
pub struct AdamsAut {
    host: PToralData,
    zeta: UnitModPk,
    d: Vec<AbVec>,
}

impl std::fmt::Debug for AdamsAut {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AdamsAut(zeta={}/{}^{}, d={:?})", self.zeta.residue, self.zeta.p, self.zeta.k, self.d)
    }
}

impl AdamsAut {
    pub fn new(host: PToralData, zeta: UnitModPk, d: Vec<AbVec>) -> Result<Self> {
        if zeta.p != host.p {
            return Err(Error::Malformed("degree lives at a different prime".into()));
        }
        if zeta.k < host.k {
            return Err(Error::Malformed(format!(
                "degree precision {} is below the torus level {}",
                zeta.k, host.k
            )));
        }
        if d.len() != host.pi.len() || d.iter().any(|v| v.len() != host.rank) {
            return Err(Error::Malformed("one torus value per component element required".into()));
        }
        let d: Vec<AbVec> = d.iter().map(|v| host.torus.canon(v)).collect();
        let c = BigInt::from(zeta.residue_mod(host.k)?) - BigInt::one();
        for x in 0..host.pi.len() {
            for y in 0..host.pi.len() {
                let lhs = host.torus.add(
                    &host.torus.sub(&host.action[x].mul_vec(&d[y]), &d[host.pi[x][y]]),
                    &d[x],
                );
                let rhs = host.torus.smul(&c, &host.coc[x][y]);
                if lhs != rhs {
                    return Err(Error::Invalid(format!(
                        "the 1-cochain does not solve the degree condition at ({x},{y})"
                    )));
                }
            }
        }
        Ok(AdamsAut { host, zeta, d })
    }

    pub fn identity(host: &PToralData) -> Self {
        let zeta = UnitModPk::one(host.p, host.k).expect("valid prime and level");
        let d = vec![host.torus.zero(); host.pi.len()];
        AdamsAut { host: host.clone(), zeta, d }
    }

    pub fn host(&self) -> &PToralData {
        &self.host
    }

    pub fn degree(&self) -> &UnitModPk {
        &self.zeta
    }

    pub fn cochain_values(&self) -> &[AbVec] {
        &self.d
    }

    pub fn apply(&self, t: &[BigInt], x: usize) -> Result<(AbVec, usize)> {
        if x >= self.host.pi.len() || t.len() != self.host.rank {
            return Err(Error::Malformed("element out of range".into()));
        }
        let z = BigInt::from(self.zeta.residue_mod(self.host.k)?);
        Ok((self.host.torus.add(&self.host.torus.smul(&z, t), &self.d[x]), x))
    }

    /// Equality as maps on the truncated group: same host, same degree
    /// residue at the torus level, same 1-cochain.
    pub fn same_map(&self, other: &AdamsAut) -> bool {
        self.host == other.host
            && self.zeta.residue_mod(self.host.k).ok() == other.zeta.residue_mod(self.host.k).ok()
            && self.d == other.d
    }

    /// `self` followed by `next`; degrees multiply at their common
    /// precision.
    pub fn then(&self, next: &AdamsAut) -> Result<AdamsAut> {
        if self.host != next.host {
            return Err(Error::Invalid("the automorphisms act on different groups".into()));
        }
        let m = self.zeta.k.min(next.zeta.k);
        let zeta = unit_at_level(&self.zeta, m)?.mul(&unit_at_level(&next.zeta, m)?)?;
        let z2 = BigInt::from(next.zeta.residue_mod(self.host.k)?);
        let d: Vec<AbVec> = self
            .d
            .iter()
            .zip(next.d.iter())
            .map(|(a, b)| self.host.torus.add(&self.host.torus.smul(&z2, a), b))
            .collect();
        AdamsAut::new(self.host.clone(), zeta, d)
    }

    pub fn inverse(&self) -> Result<AdamsAut> {
        let zi = self.zeta.inv();
        let r = BigInt::from(zi.residue_mod(self.host.k)?);
        let d: Vec<AbVec> = self
            .d
            .iter()
            .map(|v| self.host.torus.smul(&-&r, v))
            .collect();
        AdamsAut::new(self.host.clone(), zi, d)
    }

    pub fn pow(&self, e: u64) -> Result<AdamsAut> {
        let mut acc = AdamsAut::identity(&self.host);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.then(&base)?;
            }
        }
        Ok(acc)
    }
}

/// Least `r ≤ k` with `ψ1^(p^r) = ψ2^(p^r)` as maps, for automorphisms of
/// equal degree `ζ ≡ 1 mod p` with `ζ ≠ 1` at its own precision. Whether a
/// degree that is 1 at the working precision differs from 1 beyond it is
/// undecidable here, so such degrees are rejected.
pub fn power_stabilize(psi1: &AdamsAut, psi2: &AdamsAut) -> Result<u32> {
    if psi1.host != psi2.host {
        return Err(Error::Invalid("the automorphisms act on different groups".into()));
    }
    let m = psi1.zeta.k.min(psi2.zeta.k);
    if psi1.zeta.residue_mod(m)? != psi2.zeta.residue_mod(m)? {
        return Err(Error::Invalid("degrees differ".into()));
    }
    if !psi1.zeta.gamma_membership(1)? {
        return Err(Error::Invalid("degree is not congruent to 1 mod p".into()));
    }
    if psi1.zeta.is_one() || psi2.zeta.is_one() {
        return Err(Error::Invalid(
            "degree equals 1 at the working precision; the power bound needs ζ ≠ 1".into(),
        ));
    }
    let p = psi1.host.p;
    for r in 0..=psi1.host.k {
        let e = p.pow(r);
        if psi1.pow(e)?.same_map(&psi2.pow(e)?) {
            return Ok(r);
        }
    }
    Err(Error::Invalid("powers did not agree within the torsion bound".into()))
}

/// Least `n ≤ |N|` with `g^n = h^n`, for `g, h` in the same coset of the
/// normal subgroup `N` given by element indices in a group multiplication
/// table.
pub fn coset_power(table: &[Vec<usize>], normal: &[usize], g: usize, h: usize) -> Result<usize> {
    let cat = one_object_cat(table)?;
    let n = table.len();
    let e = cat.identity_of(0);
    if g >= n || h >= n {
        return Err(Error::Malformed("element out of range".into()));
    }
    let nset: BTreeSet<usize> = normal.iter().copied().collect();
    if nset.is_empty() {
        return Err(Error::Malformed("subgroup cannot be empty".into()));
    }
    if let Some(&bad) = nset.iter().find(|&&x| x >= n) {
        return Err(Error::Malformed(format!("subgroup element {bad} is out of range")));
    }
    for &a in &nset {
        for &b in &nset {
            if !nset.contains(&table[a][b]) {
                return Err(Error::Malformed(format!("subgroup is not closed: {a}*{b} escapes")));
            }
        }
    }
    let inv: Vec<usize> = (0..n)
        .map(|x| (0..n).find(|&y| table[x][y] == e).expect("group has inverses"))
        .collect();
    for s in 0..n {
        for &t in &nset {
            if !nset.contains(&table[table[s][t]][inv[s]]) {
                return Err(Error::Malformed(format!(
                    "subgroup is not normal: conjugating {t} by {s} escapes"
                )));
            }
        }
    }
    if !nset.contains(&table[inv[g]][h]) {
        return Err(Error::Invalid("elements lie in different cosets".into()));
    }
    let (mut gp, mut hp) = (e, e);
    for step in 1..=nset.len() {
        gp = table[gp][g];
        hp = table[hp][h];
        if gp == hp {
            return Ok(step);
        }
    }
    Err(Error::Invalid("no power agreement within the subgroup order".into()))
}

/// The coefficient functor of a one-object category acting on `coeff`
/// through the given matrices, validated for functoriality.
pub fn action_functor(
    cat: &FinCat,
    coeff: &PresentedAbGroup,
    action: &[Mat],
) -> Result<AbFunctor> {
    if action.len() != cat.nmorphisms() {
        return Err(Error::Malformed("one action matrix per group element required".into()));
    }
    let ng = coeff.ngens();
    if action.iter().any(|a| a.rows != ng || a.cols != ng) {
        return Err(Error::Malformed(format!("action matrices must be {ng}x{ng}")));
    }
    let homs: Vec<AbHom> = action
        .iter()
        .map(|a| AbHom::new(coeff.clone(), coeff.clone(), a.clone()))
        .collect::<Result<_>>()?;
    let phi = AbFunctor::new(cat.clone(), vec![coeff.clone()], homs)?;
    let errs = phi.validate();
    if let Some(first) = errs.first() {
        return Err(Error::Invalid(format!("action is not functorial: {first}")));
    }
    Ok(phi)
}

/// `H^n` of a finite group acting on a presented abelian group, computed on
/// the one-object cochain complex (degrees up to the default budget).
pub fn group_cohomology(
    table: &[Vec<usize>],
    coeff: &PresentedAbGroup,
    action: &[Mat],
    n: usize,
) -> Result<PresentedAbGroup> {
    let cat = one_object_cat(table)?;
    let phi = action_functor(&cat, coeff, action)?;
    let cx = CochainComplex::new(phi, Budget::default())?;
    Ok(cx.cohomology(n)?.group().clone())
}

fn group_from_factors(factors: &[BigInt]) -> PresentedAbGroup {
    PresentedAbGroup::new(factors.len(), Mat::diagonal(factors, factors.len(), factors.len()))
}

/// Invariant factors of the image of the map on cohomology induced by a
/// coefficient map, computed as generator-by-generator pushforward.
fn induced_image_factors(
    from: &Cohomology,
    to: &Cohomology,
    to_cx: &CochainComplex,
    link: &NatTrans,
) -> Result<Vec<BigInt>> {
    let src = from.group().clone();
    let mut cols = Vec::with_capacity(src.ngens());
    for j in 0..src.ngens() {
        let mut coords = src.zero();
        coords[j] = BigInt::one();
        let rep = from.rep_of_coords(&coords)?;
        let pushed = to_cx.pushforward(link, &rep)?;
        cols.push(to.class_of(&pushed)?.coords().clone());
    }
    let h = AbHom::new(src, to.group().clone(), Mat::from_cols(to.group().ngens(), &cols))?;
    let (_kernel, incl) = h.kernel();
    let (image, _proj) = incl.cokernel();
    Ok(image.invariant_factors())
}

/// Stabilization driver: images of `H^n(level j) → H^n(level j+1)` along the
/// provided links, escalating `j` until two consecutive images agree.
fn stabilized_factors(
    n: usize,
    k0: u32,
    max_level: u32,
    level: &mut dyn FnMut(u32) -> Result<CochainComplex>,
    link: &mut dyn FnMut(u32, &CochainComplex, &CochainComplex) -> Result<NatTrans>,
) -> Result<Vec<BigInt>> {
    if max_level < k0 + 2 {
        return Err(Error::Malformed(
            "stabilization needs at least two levels above the starting one".into(),
        ));
    }
    let mut cx_cur = level(k0)?;
    let mut coh_cur = cx_cur.cohomology(n)?;
    let mut prev: Option<Vec<BigInt>> = None;
    for j in k0..max_level {
        let cx_next = level(j + 1)?;
        let coh_next = cx_next.cohomology(n)?;
        let eta = link(j, &cx_cur, &cx_next)?;
        let factors = induced_image_factors(&coh_cur, &coh_next, &cx_next, &eta)?;
        if prev.as_ref() == Some(&factors) {
            return Ok(factors);
        }
        prev = Some(factors);
        cx_cur = cx_next;
        coh_cur = coh_next;
    }
    Err(Error::Refused(format!(
        "cohomology images did not stabilize by level {max_level}"
    )))
}

/// `H^n` of a finite group on the divisible torus of the given rank,
/// realized as the stable image of `H^n` at truncation level `k` under the
/// inclusions `T_j → T_(j+1)` (multiplication by p). The action matrices
/// are integer matrices reduced at each level. Refuses if the images do not
/// agree by `max_level`.
pub fn stable_group_cohomology(
    table: &[Vec<usize>],
    p: u64,
    k: u32,
    rank: usize,
    action: &[Mat],
    n: usize,
    max_level: u32,
) -> Result<PresentedAbGroup> {
    if !is_prime(p) {
        return Err(Error::Malformed(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(Error::Malformed("truncation level must be at least 1".into()));
    }
    p.checked_pow(max_level)
        .ok_or_else(|| Error::Malformed("torus modulus p^max_level overflows".into()))?;
    let cat = one_object_cat(table)?;
    if action.len() != table.len() || action.iter().any(|a| a.rows != rank || a.cols != rank) {
        return Err(Error::Malformed(format!(
            "need one {rank}x{rank} action matrix per group element"
        )));
    }
    let mut level = |j: u32| -> Result<CochainComplex> {
        let qj = BigInt::from(p.pow(j));
        let coeff = PresentedAbGroup::from_invariant_factors(&vec![p.pow(j); rank]);
        let mats: Vec<Mat> = action.iter().map(|a| mat_mod(a, &qj)).collect();
        let phi = action_functor(&cat, &coeff, &mats)?;
        CochainComplex::new(phi, Budget::default())
    };
    let mut link = |_j: u32, a: &CochainComplex, b: &CochainComplex| -> Result<NatTrans> {
        let ga = a.coeff().group(0).clone();
        let gb = b.coeff().group(0).clone();
        let comp = AbHom::new(ga, gb, scaled_identity(rank, &BigInt::from(p)))?;
        NatTrans::new(a.coeff().clone(), b.coeff().clone(), vec![comp])
    };
    let factors = stabilized_factors(n, k, max_level, &mut level, &mut link)?;
    Ok(group_from_factors(&factors))
}

/// What the vanishing conditions for `H¹(W, T)` found on a concrete Weyl
/// group action. `h1_factors` is the raw level-k group,
/// `h1_stable_factors` the stabilized one (`None` if stabilization was
/// refused); the three condition fields follow the hypothesis list: odd
/// prime with nontrivial scalars, even prime with vanishing
/// quotient-on-fixed-points cohomology, odd prime with pseudo-reflection
/// generation.
#[derive(Clone, Debug)]
pub struct WeylReport {
    pub scalar_order: usize,
    pub condition_scalars_odd: bool,
    pub condition_quotient_even: Option<bool>,
    pub condition_reflections: bool,
    pub quotient_h1_factors: Option<Vec<BigInt>>,
    pub pseudo_reflections: Vec<usize>,
    pub any_condition: bool,
    pub h1_factors: Vec<BigInt>,
    pub h1_stable_factors: Option<Vec<BigInt>>,
    pub h1_vanishes_stably: Option<bool>,
}

/// Flags `w` as a pseudo-reflection when exactly one invariant factor of
/// `w − 1` is nonzero mod `p^k` (the truncation of "rank one over the
/// p-adics"; exact when the action lifts integrally).
fn is_pseudo_reflection(a: &Mat, rank: usize, q: &BigInt) -> bool {
    let mut m = a.clone();
    for i in 0..rank {
        m.set(i, i, m.get(i, i) - BigInt::one());
    }
    let nonzero = smith_normal_form(&m)
        .diag()
        .iter()
        .filter(|d| !modq_big(d, q).is_zero())
        .count();
    nonzero == 1
}

fn subgroup_span(table: &[Vec<usize>], e: usize, gens: &[usize]) -> BTreeSet<usize> {
    let mut span: BTreeSet<usize> = BTreeSet::new();
    span.insert(e);
    let mut frontier: Vec<usize> = vec![e];
    while let Some(s) = frontier.pop() {
        for &g in gens {
            let t = table[s][g];
            if span.insert(t) {
                frontier.push(t);
            }
        }
    }
    span
}

/// Evaluates the `H¹(W, T) = 0` hypotheses for a Weyl group given by a
/// multiplication table and integer action matrices, with `scalars` the
/// element indices of a central scalar subgroup of the action. Computes the
/// raw and stabilized `H¹` alongside.
pub fn h1_weyl_vanishing(
    table: &[Vec<usize>],
    action: &[Mat],
    scalars: &[usize],
    p: u64,
    k: u32,
    max_level: u32,
) -> Result<WeylReport> {
    if !is_prime(p) {
        return Err(Error::Malformed(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(Error::Malformed("truncation level must be at least 1".into()));
    }
    let cat = one_object_cat(table)?;
    let e = cat.identity_of(0);
    let nw = table.len();
    if action.is_empty() || action.len() != nw {
        return Err(Error::Malformed("one action matrix per group element required".into()));
    }
    let rank = action[0].rows;
    if action.iter().any(|a| a.rows != rank || a.cols != rank) {
        return Err(Error::Malformed("action matrices must share one square shape".into()));
    }
    let q = BigInt::from(
        p.checked_pow(k)
            .ok_or_else(|| Error::Malformed("torus modulus p^k overflows".into()))?,
    );
    let dset: BTreeSet<usize> = scalars.iter().copied().collect();
    if let Some(&bad) = dset.iter().find(|&&x| x >= nw) {
        return Err(Error::Malformed(format!("scalar subgroup element {bad} is out of range")));
    }
    if dset.is_empty() || !dset.contains(&e) {
        return Err(Error::Malformed("scalar subgroup must contain the identity".into()));
    }
    for &a in &dset {
        for &b in &dset {
            if !dset.contains(&table[a][b]) {
                return Err(Error::Malformed(format!(
                    "scalar subgroup is not closed: {a}*{b} escapes"
                )));
            }
        }
    }
    for &d in &dset {
        let lam = if rank == 0 { BigInt::one() } else { modq_big(action[d].get(0, 0), &q) };
        if mat_mod(&action[d], &q) != mat_mod(&scaled_identity(rank, &lam), &q) {
            return Err(Error::Malformed(format!("action at {d} is not scalar mod p^k")));
        }
    }

    let condition_scalars_odd = p != 2 && dset.len() > 1;

    let reflections: Vec<usize> = (0..nw)
        .filter(|&w| w != e && is_pseudo_reflection(&action[w], rank, &q))
        .collect();
    let generated = subgroup_span(table, e, &reflections).len() == nw;
    let condition_reflections = p != 2 && generated;

    let h1_factors = group_cohomology(
        table,
        &PresentedAbGroup::from_invariant_factors(&vec![p.pow(k); rank]),
        &action.iter().map(|a| mat_mod(a, &q)).collect::<Vec<_>>(),
        1,
    )?
    .invariant_factors();

    let mut level = |j: u32| -> Result<CochainComplex> {
        let qj = BigInt::from(p.pow(j));
        let coeff = PresentedAbGroup::from_invariant_factors(&vec![p.pow(j); rank]);
        let mats: Vec<Mat> = action.iter().map(|a| mat_mod(a, &qj)).collect();
        let phi = action_functor(&cat, &coeff, &mats)?;
        CochainComplex::new(phi, Budget::default())
    };
    let mut link = |_j: u32, a: &CochainComplex, b: &CochainComplex| -> Result<NatTrans> {
        let comp = AbHom::new(
            a.coeff().group(0).clone(),
            b.coeff().group(0).clone(),
            scaled_identity(rank, &BigInt::from(p)),
        )?;
        NatTrans::new(a.coeff().clone(), b.coeff().clone(), vec![comp])
    };
    let h1_stable_factors = match stabilized_factors(1, k, max_level, &mut level, &mut link) {
        Ok(f) => Some(f),
        Err(Error::Refused(_)) => None,
        Err(err) => return Err(err),
    };

    // Condition for the even prime: H¹ of W modulo the scalars acting on the
    // fixed points of the scalars, stabilized across levels.
    let (quotient_h1_factors, condition_quotient_even) = if dset.len() > 1 {
        let nontrivial: Vec<usize> = dset.iter().copied().filter(|&d| d != e).collect();
        let mut coset_key: Vec<Option<usize>> = vec![None; nw];
        for s in 0..nw {
            if coset_key[s].is_some() {
                continue;
            }
            let members: Vec<usize> = dset.iter().map(|&d| table[s][d]).collect();
            let key = *members.iter().min().expect("coset is nonempty");
            for mem in members {
                coset_key[mem] = Some(key);
            }
        }
        let keys: BTreeSet<usize> = coset_key.iter().map(|c| c.expect("assigned")).collect();
        let key_index: HashMap<usize, usize> =
            keys.iter().enumerate().map(|(i, &key)| (key, i)).collect();
        let reps: Vec<usize> = keys.iter().copied().collect();
        let class_of = |s: usize| key_index[&coset_key[s].expect("assigned")];
        let q_table: Vec<Vec<usize>> = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| class_of(table[a][b])).collect())
            .collect();
        let qcat = one_object_cat(&q_table)?;
        let incls: std::cell::RefCell<HashMap<u32, AbHom>> = std::cell::RefCell::new(HashMap::new());
        let mut level_q = |j: u32| -> Result<CochainComplex> {
            let qj = BigInt::from(p.pow(j));
            let torus_j = PresentedAbGroup::from_invariant_factors(&vec![p.pow(j); rank]);
            let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(rank * nontrivial.len());
            for &d in &nontrivial {
                let md = mat_mod(&action[d], &qj);
                for i in 0..rank {
                    rows.push((0..rank)
                        .map(|c| {
                            let mut v = md.get(i, c).clone();
                            if i == c {
                                v -= BigInt::one();
                            }
                            v
                        })
                        .collect());
                }
            }
            let target = PresentedAbGroup::from_invariant_factors(&vec![
                p.pow(j);
                rank * nontrivial.len()
            ]);
            let h = AbHom::new(torus_j.clone(), target, Mat::from_rows(rows))?;
            let (fixed, incl) = h.kernel();
            let homs: Vec<AbHom> = reps
                .iter()
                .map(|&w| {
                    let aw = mat_mod(&action[w], &qj);
                    let cols: Vec<AbVec> = (0..fixed.ngens())
                        .map(|gi| {
                            let mut basis = fixed.zero();
                            basis[gi] = BigInt::one();
                            let y = aw.mul_vec(&incl.apply(&basis));
                            incl.solve(&y).ok_or_else(|| {
                                Error::Invalid(
                                    "action does not preserve the scalar fixed points".into(),
                                )
                            })
                        })
                        .collect::<Result<_>>()?;
                    AbHom::new(fixed.clone(), fixed.clone(), Mat::from_cols(fixed.ngens(), &cols))
                })
                .collect::<Result<_>>()?;
            let phi = AbFunctor::new(qcat.clone(), vec![fixed], homs)?;
            incls.borrow_mut().insert(j, incl);
            CochainComplex::new(phi, Budget::default())
        };
        let mut link_q = |j: u32, a: &CochainComplex, b: &CochainComplex| -> Result<NatTrans> {
            let (inc_a, inc_b) = {
                let map = incls.borrow();
                (map[&j].clone(), map[&(j + 1)].clone())
            };
            let ga = a.coeff().group(0).clone();
            let gb = b.coeff().group(0).clone();
            let cols: Vec<AbVec> = (0..ga.ngens())
                .map(|gi| {
                    let mut basis = ga.zero();
                    basis[gi] = BigInt::one();
                    let y: AbVec =
                        inc_a.apply(&basis).iter().map(|c| c * BigInt::from(p)).collect();
                    inc_b.solve(&y).ok_or_else(|| {
                        Error::Invalid("inclusion does not lift to the next level".into())
                    })
                })
                .collect::<Result<_>>()?;
            let comp = AbHom::new(ga.clone(), gb.clone(), Mat::from_cols(gb.ngens(), &cols))?;
            NatTrans::new(a.coeff().clone(), b.coeff().clone(), vec![comp])
        };
        match stabilized_factors(1, k, max_level, &mut level_q, &mut link_q) {
            Ok(f) => {
                let trivial = f.is_empty();
                (Some(f), Some(p == 2 && trivial))
            }
            Err(Error::Refused(_)) => (None, None),
            Err(err) => return Err(err),
        }
    } else {
        (None, Some(false))
    };

    let any_condition = condition_scalars_odd
        || condition_reflections
        || condition_quotient_even == Some(true);
    let h1_vanishes_stably = h1_stable_factors.as_ref().map(|f| f.is_empty());
    Ok(WeylReport {
        scalar_order: dset.len(),
        condition_scalars_odd,
        condition_quotient_even,
        condition_reflections,
        quotient_h1_factors,
        pseudo_reflections: reflections,
        any_condition,
        h1_factors,
        h1_stable_factors,
        h1_vanishes_stably,
    })
}

/// Both sides of the dimension-shifting comparison `H^n(G, lattice)` vs
/// `H^(n−1)(G, torus)`: invariant factors of the lattice cohomology over Z
/// and of the stabilized torus cohomology (`None` with `agree = None` when
/// stabilization was refused).
#[derive(Clone, Debug)]
pub struct DimShiftReport {
    pub degree: usize,
    pub lattice_factors: Vec<BigInt>,
    pub torus_factors: Option<Vec<BigInt>>,
    pub agree: Option<bool>,
}

/// Compares `H^n(G, Z^rank)` (integer action) with the stabilized
/// `H^(n−1)(G, (Z/p^j)^rank)` for `n` in 2..=3.
pub fn dimension_shift_check(
    table: &[Vec<usize>],
    rank: usize,
    action: &[Mat],
    n: usize,
    p: u64,
    k: u32,
    max_level: u32,
) -> Result<DimShiftReport> {
    if !(2..=3).contains(&n) {
        return Err(Error::Malformed("the shift comparison is defined for degrees 2 and 3".into()));
    }
    let lattice = PresentedAbGroup::free(rank);
    let lattice_factors = group_cohomology(table, &lattice, action, n)?.invariant_factors();
    let torus_factors =
        match stable_group_cohomology(table, p, k, rank, action, n - 1, max_level) {
            Ok(g) => Some(g.invariant_factors()),
            Err(Error::Refused(_)) => None,
            Err(err) => return Err(err),
        };
    let agree = torus_factors.as_ref().map(|t| *t == lattice_factors);
    Ok(DimShiftReport { degree: n, lattice_factors, torus_factors, agree })
}
