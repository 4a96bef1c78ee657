//! Finite categories, functors between them, functors into abelian groups,
//! and natural transformations.
//!
//! Morphisms carry dense integer ids and every deterministic ordering in the
//! crate derives from those ids. Categories are immutable once built;
//! semantic validation is explicit so callers can report violations instead
//! of aborting.

use crate::abgrp::{AbHom, Mat, PresentedAbGroup};
use crate::{Error, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

pub type ObjId = usize;
pub type MorId = usize;

/// JSON shape of a finite category.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatSpec {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorSpec>,
    pub identity: BTreeMap<String, MorId>,
    pub comp: Vec<[MorId; 3]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorSpec {
    pub id: MorId,
    pub src: String,
    pub dst: String,
}

struct CatInner {
    objects: Vec<String>,
    mor_src: Vec<ObjId>,
    mor_dst: Vec<ObjId>,
    identity: Vec<MorId>,
    /// `comp[g * nmor + f] = g . f` for composable `(g, f)`.
    comp: Vec<Option<MorId>>,
    /// `homsets[x * nobj + y]`: ids of morphisms `x -> y`, ascending.
    homsets: Vec<Vec<MorId>>,
}

/// A finite category. Cheap to clone.
#[derive(Clone)]
pub struct FinCat {
    inner: Arc<CatInner>,
}

impl PartialEq for FinCat {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.objects == other.inner.objects
                && self.inner.mor_src == other.inner.mor_src
                && self.inner.mor_dst == other.inner.mor_dst
                && self.inner.identity == other.inner.identity
                && self.inner.comp == other.inner.comp)
    }
}
impl Eq for FinCat {}

impl std::fmt::Debug for FinCat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FinCat({} objects, {} morphisms)", self.nobjects(), self.nmorphisms())
    }
}

impl FinCat {
    /// Build from raw tables. Shape problems (unknown names, out-of-range
    /// ids, duplicate composition entries) are errors; semantic law
    /// violations are left for [`FinCat::validate`].
    pub fn new(
        objects: Vec<String>,
        morphisms: &[(MorId, ObjId, ObjId)],
        identity: &[(ObjId, MorId)],
        comp: &[(MorId, MorId, MorId)],
    ) -> Result<Self> {
        let nobj = objects.len();
        let nmor = morphisms.len();
        let mut mor_src = vec![usize::MAX; nmor];
        let mut mor_dst = vec![usize::MAX; nmor];
        for &(id, s, d) in morphisms {
            if id >= nmor {
                return Err(Error::Malformed(format!(
                    "morphism id {id} is not dense (expected ids 0..{nmor})"
                )));
            }
            if mor_src[id] != usize::MAX {
                return Err(Error::Malformed(format!("duplicate morphism id {id}")));
            }
            if s >= nobj || d >= nobj {
                return Err(Error::Malformed(format!("morphism {id} references unknown object")));
            }
            mor_src[id] = s;
            mor_dst[id] = d;
        }
        let mut ident = vec![usize::MAX; nobj];
        for &(x, f) in identity {
            if x >= nobj {
                return Err(Error::Malformed(format!("identity entry for unknown object {x}")));
            }
            if f >= nmor {
                return Err(Error::Malformed(format!("identity of object {x} is unknown morphism {f}")));
            }
            ident[x] = f;
        }
        if let Some(x) = ident.iter().position(|&f| f == usize::MAX) {
            return Err(Error::Malformed(format!("object {:?} has no identity entry", objects[x])));
        }
        let mut table = vec![None; nmor * nmor];
        for &(g, f, gf) in comp {
            if g >= nmor || f >= nmor || gf >= nmor {
                return Err(Error::Malformed(format!("comp entry ({g},{f},{gf}) out of range")));
            }
            let slot = &mut table[g * nmor + f];
            if let Some(old) = *slot {
                if old != gf {
                    return Err(Error::Malformed(format!(
                        "conflicting comp entries for ({g},{f}): {old} and {gf}"
                    )));
                }
            }
            *slot = Some(gf);
        }
        let mut homsets = vec![Vec::new(); nobj * nobj];
        for id in 0..nmor {
            homsets[mor_src[id] * nobj + mor_dst[id]].push(id);
        }
        Ok(FinCat {
            inner: Arc::new(CatInner { objects, mor_src, mor_dst, identity: ident, comp: table, homsets }),
        })
    }

    pub fn from_spec(spec: &CatSpec) -> Result<Self> {
        let obj_index = |name: &str| -> Result<ObjId> {
            spec.objects
                .iter()
                .position(|o| o == name)
                .ok_or_else(|| Error::Malformed(format!("unknown object {name:?}")))
        };
        let mut morphisms = Vec::new();
        for m in &spec.morphisms {
            morphisms.push((m.id, obj_index(&m.src)?, obj_index(&m.dst)?));
        }
        let mut identity = Vec::new();
        for (name, &f) in &spec.identity {
            identity.push((obj_index(name)?, f));
        }
        let comp: Vec<(MorId, MorId, MorId)> = spec.comp.iter().map(|&[g, f, gf]| (g, f, gf)).collect();
        Self::new(spec.objects.clone(), &morphisms, &identity, &comp)
    }

    pub fn to_spec(&self) -> CatSpec {
        let morphisms = (0..self.nmorphisms())
            .map(|id| MorSpec {
                id,
                src: self.inner.objects[self.inner.mor_src[id]].clone(),
                dst: self.inner.objects[self.inner.mor_dst[id]].clone(),
            })
            .collect();
        let identity = self
            .inner
            .objects
            .iter()
            .enumerate()
            .map(|(x, name)| (name.clone(), self.inner.identity[x]))
            .collect();
        let nmor = self.nmorphisms();
        let mut comp = Vec::new();
        for g in 0..nmor {
            for f in 0..nmor {
                if let Some(gf) = self.inner.comp[g * nmor + f] {
                    comp.push([g, f, gf]);
                }
            }
        }
        CatSpec { objects: self.inner.objects.clone(), morphisms, identity, comp }
    }

    pub fn nobjects(&self) -> usize {
        self.inner.objects.len()
    }

    pub fn nmorphisms(&self) -> usize {
        self.inner.mor_src.len()
    }

    pub fn object_name(&self, x: ObjId) -> &str {
        &self.inner.objects[x]
    }

    pub fn object_named(&self, name: &str) -> Option<ObjId> {
        self.inner.objects.iter().position(|o| o == name)
    }

    pub fn src(&self, f: MorId) -> ObjId {
        self.inner.mor_src[f]
    }

    pub fn dst(&self, f: MorId) -> ObjId {
        self.inner.mor_dst[f]
    }

    pub fn identity_of(&self, x: ObjId) -> MorId {
        self.inner.identity[x]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.inner.identity.contains(&f)
    }

    /// `g . f` when `dst(f) = src(g)` and the table has the entry.
    pub fn comp(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.inner.comp[g * self.nmorphisms() + f]
    }

    pub fn hom_set(&self, x: ObjId, y: ObjId) -> &[MorId] {
        &self.inner.homsets[x * self.nobjects() + y]
    }

    /// Composable `(f, g)` pairs are those with `dst(f) = src(g)`.
    pub fn is_composable(&self, g: MorId, f: MorId) -> bool {
        self.dst(f) == self.src(g)
    }

    /// Category-law violations, each as a human-readable line. Empty means
    /// the tables really form a category.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let nmor = self.nmorphisms();
        for x in 0..self.nobjects() {
            let e = self.identity_of(x);
            if self.src(e) != x || self.dst(e) != x {
                out.push(format!(
                    "identity of {:?} is morphism {e} with endpoints {} -> {}",
                    self.object_name(x),
                    self.src(e),
                    self.dst(e)
                ));
            }
        }
        for g in 0..nmor {
            for f in 0..nmor {
                match (self.is_composable(g, f), self.comp(g, f)) {
                    (true, None) => out.push(format!("comp({g},{f}) is undefined for a composable pair")),
                    (false, Some(_)) => out.push(format!("comp({g},{f}) is defined for a non-composable pair")),
                    (true, Some(gf)) => {
                        if self.src(gf) != self.src(f) || self.dst(gf) != self.dst(g) {
                            out.push(format!("comp({g},{f}) = {gf} has wrong endpoints"));
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for f in 0..nmor {
            let (el, er) = (self.identity_of(self.dst(f)), self.identity_of(self.src(f)));
            if self.comp(el, f) != Some(f) {
                out.push(format!("left unit law fails: comp({el},{f}) != {f}"));
            }
            if self.comp(f, er) != Some(f) {
                out.push(format!("right unit law fails: comp({f},{er}) != {f}"));
            }
        }
        for h in 0..nmor {
            for g in 0..nmor {
                let Some(hg) = self.comp(h, g) else { continue };
                for f in 0..nmor {
                    let Some(gf) = self.comp(g, f) else { continue };
                    if self.comp(h, gf) != self.comp(hg, f) {
                        out.push(format!("associativity fails on triple ({h},{g},{f})"));
                    }
                }
            }
        }
        out
    }

    /// All composable `n`-tuples `(c_0, ..., c_(n-1))` listing the first
    /// arrow first, ordered lexicographically by morphism ids. `n >= 1`.
    pub fn chains(&self, n: usize) -> Vec<Vec<MorId>> {
        assert!(n >= 1, "use objects() for 0-chains");
        let nmor = self.nmorphisms();
        let mut out: Vec<Vec<MorId>> = (0..nmor).map(|f| vec![f]).collect();
        for _ in 1..n {
            let mut next = Vec::new();
            for chain in &out {
                let tail = *chain.last().unwrap();
                for g in 0..nmor {
                    if self.src(g) == self.dst(tail) {
                        let mut c = chain.clone();
                        c.push(g);
                        next.push(c);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Number of `n`-chains without materializing them; 0-chains are
    /// objects.
    pub fn chain_count(&self, n: usize) -> u128 {
        if n == 0 {
            return self.nobjects() as u128;
        }
        let nobj = self.nobjects();
        let mut counts = vec![0u128; nobj * nobj];
        for f in 0..self.nmorphisms() {
            counts[self.src(f) * nobj + self.dst(f)] += 1;
        }
        let mut acc = counts.clone();
        for _ in 1..n {
            let mut next = vec![0u128; nobj * nobj];
            for x in 0..nobj {
                for y in 0..nobj {
                    if acc[x * nobj + y] == 0 {
                        continue;
                    }
                    for z in 0..nobj {
                        next[x * nobj + z] += acc[x * nobj + y] * counts[y * nobj + z];
                    }
                }
            }
            acc = next;
        }
        acc.iter().sum()
    }
}

/// Build the one-object category of a finite group given by its
/// multiplication table (`table[g][f]` is the product `g*f`); morphism ids
/// are the element indices and composition is the group product.
pub fn one_object_cat(table: &[Vec<usize>]) -> Result<FinCat> {
    let n = table.len();
    if n == 0 {
        return Err(Error::Invalid("empty multiplication table".into()));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Malformed(format!("row {i} has length {}, expected {n}", row.len())));
        }
        if let Some(&bad) = row.iter().find(|&&x| x >= n) {
            return Err(Error::Malformed(format!("row {i} contains out-of-range element {bad}")));
        }
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or_else(|| Error::Invalid("table has no two-sided identity".into()))?;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::Invalid(format!(
                        "table is not associative at ({a},{b},{c})"
                    )));
                }
            }
        }
    }
    for a in 0..n {
        if !(0..n).any(|b| table[a][b] == e && table[b][a] == e) {
            return Err(Error::Invalid(format!("element {a} has no inverse")));
        }
    }
    let morphisms: Vec<(MorId, ObjId, ObjId)> = (0..n).map(|i| (i, 0, 0)).collect();
    let mut comp = Vec::with_capacity(n * n);
    for (g, row) in table.iter().enumerate() {
        for (f, &gf) in row.iter().enumerate() {
            comp.push((g, f, gf));
        }
    }
    FinCat::new(vec!["*".to_string()], &morphisms, &[(0, e)], &comp)
}

/// A functor between finite categories: object and morphism tables.
#[derive(Clone, Debug)]
pub struct CatFunctor {
    src: FinCat,
    dst: FinCat,
    on_obj: Vec<ObjId>,
    on_mor: Vec<MorId>,
}

impl CatFunctor {
    pub fn new(src: FinCat, dst: FinCat, on_obj: Vec<ObjId>, on_mor: Vec<MorId>) -> Result<Self> {
        if on_obj.len() != src.nobjects() || on_mor.len() != src.nmorphisms() {
            return Err(Error::Malformed("functor table sizes do not match the source category".into()));
        }
        if on_obj.iter().any(|&x| x >= dst.nobjects()) || on_mor.iter().any(|&f| f >= dst.nmorphisms()) {
            return Err(Error::Malformed("functor table references unknown targets".into()));
        }
        Ok(CatFunctor { src, dst, on_obj, on_mor })
    }

    pub fn identity(cat: &FinCat) -> Self {
        CatFunctor {
            src: cat.clone(),
            dst: cat.clone(),
            on_obj: (0..cat.nobjects()).collect(),
            on_mor: (0..cat.nmorphisms()).collect(),
        }
    }

    pub fn src(&self) -> &FinCat {
        &self.src
    }

    pub fn dst(&self) -> &FinCat {
        &self.dst
    }

    pub fn ob(&self, x: ObjId) -> ObjId {
        self.on_obj[x]
    }

    pub fn mor(&self, f: MorId) -> MorId {
        self.on_mor[f]
    }

    /// `next . self`.
    pub fn then(&self, next: &CatFunctor) -> Result<CatFunctor> {
        if self.dst != next.src {
            return Err(Error::Malformed("functor composition endpoint mismatch".into()));
        }
        Ok(CatFunctor {
            src: self.src.clone(),
            dst: next.dst.clone(),
            on_obj: self.on_obj.iter().map(|&x| next.on_obj[x]).collect(),
            on_mor: self.on_mor.iter().map(|&f| next.on_mor[f]).collect(),
        })
    }

    /// Functor-law violations.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for f in 0..self.src.nmorphisms() {
            let img = self.mor(f);
            if self.dst.src(img) != self.ob(self.src.src(f)) || self.dst.dst(img) != self.ob(self.src.dst(f)) {
                out.push(format!("morphism {f} maps to {img} with mismatched endpoints"));
            }
        }
        for x in 0..self.src.nobjects() {
            if self.mor(self.src.identity_of(x)) != self.dst.identity_of(self.ob(x)) {
                out.push(format!("identity of object {x} is not sent to an identity"));
            }
        }
        for g in 0..self.src.nmorphisms() {
            for f in 0..self.src.nmorphisms() {
                if let Some(gf) = self.src.comp(g, f) {
                    let want = self.dst.comp(self.mor(g), self.mor(f));
                    if want != Some(self.mor(gf)) {
                        out.push(format!("composition of ({g},{f}) is not preserved"));
                    }
                }
            }
        }
        out
    }
}

/// A functor from a finite category into abelian groups.
#[derive(Clone)]
pub struct AbFunctor {
    base: FinCat,
    on_obj: Vec<PresentedAbGroup>,
    on_mor: Vec<AbHom>,
}

impl AbFunctor {
    pub fn new(base: FinCat, on_obj: Vec<PresentedAbGroup>, on_mor: Vec<AbHom>) -> Result<Self> {
        if on_obj.len() != base.nobjects() || on_mor.len() != base.nmorphisms() {
            return Err(Error::Malformed("coefficient tables do not match the category".into()));
        }
        Ok(AbFunctor { base, on_obj, on_mor })
    }

    /// Constant coefficients with identity action.
    pub fn constant(base: &FinCat, group: &PresentedAbGroup) -> Self {
        let on_obj = vec![group.clone(); base.nobjects()];
        let on_mor = (0..base.nmorphisms()).map(|_| AbHom::identity(group)).collect();
        AbFunctor { base: base.clone(), on_obj, on_mor }
    }

    pub fn base(&self) -> &FinCat {
        &self.base
    }

    pub fn group(&self, x: ObjId) -> &PresentedAbGroup {
        &self.on_obj[x]
    }

    pub fn hom(&self, f: MorId) -> &AbHom {
        &self.on_mor[f]
    }

    /// Precompose with a functor into this functor's base: the coefficient
    /// system `self ∘ psi` on `psi`'s source.
    pub fn precompose(&self, psi: &CatFunctor) -> Result<AbFunctor> {
        if psi.dst() != &self.base {
            return Err(Error::Malformed(
                "functor target differs from the coefficient base".into(),
            ));
        }
        let on_obj = (0..psi.src().nobjects()).map(|x| self.group(psi.ob(x)).clone()).collect();
        let on_mor = (0..psi.src().nmorphisms()).map(|f| self.hom(psi.mor(f)).clone()).collect();
        Ok(AbFunctor { base: psi.src().clone(), on_obj, on_mor })
    }

    /// Same base, equal groups, and pointwise equal maps.
    pub fn same_functor(&self, other: &AbFunctor) -> bool {
        self.base == other.base
            && self.on_obj == other.on_obj
            && self
                .on_mor
                .iter()
                .zip(other.on_mor.iter())
                .all(|(a, b)| a.same_hom(b))
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for f in 0..self.base.nmorphisms() {
            let h = &self.on_mor[f];
            if h.src() != self.group(self.base.src(f)) || h.dst() != self.group(self.base.dst(f)) {
                out.push(format!("value on morphism {f} has mismatched endpoint groups"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for x in 0..self.base.nobjects() {
            let e = self.base.identity_of(x);
            if !self.on_mor[e].same_hom(&AbHom::identity(self.group(x))) {
                out.push(format!("value on identity of object {x} is not the identity map"));
            }
        }
        for g in 0..self.base.nmorphisms() {
            for f in 0..self.base.nmorphisms() {
                if let Some(gf) = self.base.comp(g, f) {
                    match self.on_mor[f].then(&self.on_mor[g]) {
                        Ok(composed) => {
                            if !composed.same_hom(&self.on_mor[gf]) {
                                out.push(format!("value on composite ({g},{f}) disagrees with the composite of values"));
                            }
                        }
                        Err(_) => out.push(format!("values on ({g},{f}) do not compose")),
                    }
                }
            }
        }
        out
    }
}

/// A natural transformation between two abelian-group-valued functors over
/// the same base.
#[derive(Clone)]
pub struct NatTrans {
    from_f: AbFunctor,
    to_f: AbFunctor,
    components: Vec<AbHom>,
}

impl NatTrans {
    pub fn new(from_f: AbFunctor, to_f: AbFunctor, components: Vec<AbHom>) -> Result<Self> {
        if from_f.base() != to_f.base() {
            return Err(Error::Malformed("natural transformation endpoints live over different categories".into()));
        }
        if components.len() != from_f.base().nobjects() {
            return Err(Error::Malformed("one component per object required".into()));
        }
        Ok(NatTrans { from_f, to_f, components })
    }

    /// Identity transformation of a functor.
    pub fn identity(phi: &AbFunctor) -> Self {
        let components = (0..phi.base().nobjects()).map(|x| AbHom::identity(phi.group(x))).collect();
        NatTrans { from_f: phi.clone(), to_f: phi.clone(), components }
    }

    pub fn from_f(&self) -> &AbFunctor {
        &self.from_f
    }

    pub fn to_f(&self) -> &AbFunctor {
        &self.to_f
    }

    pub fn component(&self, x: ObjId) -> &AbHom {
        &self.components[x]
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let base = self.from_f.base();
        for x in 0..base.nobjects() {
            let c = &self.components[x];
            if c.src() != self.from_f.group(x) || c.dst() != self.to_f.group(x) {
                out.push(format!("component at object {x} has mismatched endpoints"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for f in 0..base.nmorphisms() {
            let (x, y) = (base.src(f), base.dst(f));
            let left = self.from_f.hom(f).then(&self.components[y]).unwrap();
            let right = self.components[x].then(self.to_f.hom(f)).unwrap();
            if !left.same_hom(&right) {
                out.push(format!("naturality square fails at morphism {f}"));
            }
        }
        out
    }
}

/// Multiplication by `zeta` as a natural transformation from `phi` to
/// itself; naturality is automatic.
pub fn scalar_nat_trans(phi: &AbFunctor, zeta: i64) -> NatTrans {
    let components = (0..phi.base().nobjects())
        .map(|x| {
            let g = phi.group(x);
            let mut m = Mat::zero(g.ngens(), g.ngens());
            for i in 0..g.ngens() {
                m.set(i, i, BigInt::from(zeta));
            }
            AbHom::new_unchecked(g.clone(), g.clone(), m)
        })
        .collect();
    NatTrans { from_f: phi.clone(), to_f: phi.clone(), components }
}

/// The cyclic group table of order `n` (used by fixtures and the CLI).
pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

/// Direct product of two group tables, elements ordered `a * |B| + b`.
pub fn product_table(ta: &[Vec<usize>], tb: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let (na, nb) = (ta.len(), tb.len());
    let mut out = vec![vec![0; na * nb]; na * nb];
    for a1 in 0..na {
        for b1 in 0..nb {
            for a2 in 0..na {
                for b2 in 0..nb {
                    out[a1 * nb + b1][a2 * nb + b2] = ta[a1][a2] * nb + tb[b1][b2];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_cat_is_valid() {
        let c = one_object_cat(&cyclic_table(4)).unwrap();
        assert_eq!(c.nmorphisms(), 4);
        assert!(c.validate().is_empty());
    }

    #[test]
    fn chains_counts() {
        let c3 = one_object_cat(&cyclic_table(3)).unwrap();
        assert_eq!(c3.chains(2).len(), 9);
        assert_eq!(c3.chain_count(2), 9);
        let c2 = one_object_cat(&cyclic_table(2)).unwrap();
        assert_eq!(c2.chains(3).len(), 8);
    }

    #[test]
    fn non_group_tables_rejected() {
        assert!(one_object_cat(&[vec![0, 1], vec![1, 1]]).is_err());
        assert!(one_object_cat(&[vec![1, 0], vec![0, 1]]).is_ok());
    }
}
