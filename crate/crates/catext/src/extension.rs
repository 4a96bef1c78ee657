//! Extensions of a finite category by an abelian-group-valued functor on it:
//! validation with witnesses, section choice, cocycle extraction and
//! classification, reconstruction from a regular 2-cocycle, equivalence and
//! splitness decisions, morphisms of extensions, and the automorphism group
//! over the identity modulo inner automorphisms.
//!
//! Throughout, a morphism `d` of the total category decomposes uniquely as
//! `⟨g⟩∘σ(c)` with `c` its image in the base, `σ` the canonical section and
//! `⟨g⟩` the fiber automorphism attached to `g`; operations work in these
//! coordinates.

use crate::abgrp::{AbHom, AbVec, PresentedAbGroup};
use crate::cobar::{Budget, Cochain, CochainComplex, Cohomology, CohomologyClass};
use crate::fincat::{AbFunctor, CatFunctor, FinCat, MorId, NatTrans, ObjId};
use crate::{Error, Result};
use num_bigint::BigInt;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

const MAX_BUILT_MORPHISMS: u128 = 10_000;

/// A choice of lift for every base morphism; regular sections send
/// identities to identities.
#[derive(Clone, Debug)]
pub struct Section {
    lift: Vec<MorId>,
    regular: bool,
}

impl Section {
    pub fn lift(&self, c: MorId) -> MorId {
        self.lift[c]
    }

    pub fn lifts(&self) -> &[MorId] {
        &self.lift
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }
}

struct ExtInner {
    total: FinCat,
    base: FinCat,
    coeff: AbFunctor,
    proj: CatFunctor,
    delta: Vec<HashMap<AbVec, MorId>>,
    delta_inv: Vec<HashMap<MorId, AbVec>>,
    section: OnceLock<std::result::Result<Section, Error>>,
    complex: OnceLock<std::result::Result<CochainComplex, Error>>,
    h2: OnceLock<std::result::Result<Arc<Cohomology>, Error>>,
    decomp: OnceLock<std::result::Result<Vec<(AbVec, MorId)>, Error>>,
}

/// An extension: a total category over a base with the same objects, a
/// projection functor, and per-object fiber automorphisms indexed by the
/// coefficient groups. Cheap to clone.
#[derive(Clone)]
pub struct Extension {
    inner: Arc<ExtInner>,
}

impl std::fmt::Debug for Extension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Extension({} over {} morphisms)",
            self.inner.total.nmorphisms(),
            self.inner.base.nmorphisms()
        )
    }
}

impl Extension {
    /// Assembles an extension from its parts. Shape problems are rejected
    /// here; the semantic conditions are reported by [`Extension::validate`].
    pub fn new(
        total: FinCat,
        base: FinCat,
        coeff: AbFunctor,
        proj: CatFunctor,
        delta: &[Vec<(AbVec, MorId)>],
    ) -> Result<Self> {
        if proj.src() != &total || proj.dst() != &base {
            return Err(Error::Malformed("projection endpoints do not match".into()));
        }
        if coeff.base() != &base {
            return Err(Error::Malformed("coefficients live over a different category".into()));
        }
        if total.nobjects() != base.nobjects() {
            return Err(Error::Malformed("total and base have different object counts".into()));
        }
        if delta.len() != base.nobjects() {
            return Err(Error::Malformed("one fiber table per object required".into()));
        }
        let mut maps = Vec::with_capacity(delta.len());
        let mut inv_maps = Vec::with_capacity(delta.len());
        for (x, entries) in delta.iter().enumerate() {
            let g = coeff.group(x);
            let mut map = HashMap::new();
            let mut inv: HashMap<MorId, AbVec> = HashMap::new();
            for (elem, d) in entries {
                if elem.len() != g.ngens() {
                    return Err(Error::Malformed(format!(
                        "fiber table at object {x} has an element of wrong length"
                    )));
                }
                if *d >= total.nmorphisms() {
                    return Err(Error::Malformed(format!(
                        "fiber table at object {x} references unknown morphism {d}"
                    )));
                }
                let key = g.canon(elem);
                if map.insert(key.clone(), *d).is_some() {
                    return Err(Error::Malformed(format!(
                        "fiber table at object {x} lists an element twice"
                    )));
                }
                inv.entry(*d).or_insert(key);
            }
            maps.push(map);
            inv_maps.push(inv);
        }
        Ok(Extension {
            inner: Arc::new(ExtInner {
                total,
                base,
                coeff,
                proj,
                delta: maps,
                delta_inv: inv_maps,
                section: OnceLock::new(),
                complex: OnceLock::new(),
                h2: OnceLock::new(),
                decomp: OnceLock::new(),
            }),
        })
    }

    pub fn total(&self) -> &FinCat {
        &self.inner.total
    }

    pub fn base(&self) -> &FinCat {
        &self.inner.base
    }

    pub fn coeff(&self) -> &AbFunctor {
        &self.inner.coeff
    }

    pub fn proj(&self) -> &CatFunctor {
        &self.inner.proj
    }

    /// The fiber automorphism attached to `g` at object `x`.
    pub fn delta_of(&self, x: ObjId, g: &[BigInt]) -> Result<MorId> {
        let key = self.inner.coeff.group(x).canon(g);
        self.inner.delta[x].get(&key).copied().ok_or_else(|| {
            Error::Invalid(format!("fiber table at object {x} does not cover {key:?}"))
        })
    }

    /// Reverse lookup: which coefficient element a fiber endomorphism names.
    pub fn delta_elem(&self, x: ObjId, d: MorId) -> Option<&AbVec> {
        self.inner.delta_inv[x].get(&d)
    }

    /// Total morphisms lying over the base morphism `c`.
    pub fn fiber_over(&self, c: MorId) -> Vec<MorId> {
        (0..self.inner.total.nmorphisms())
            .filter(|&d| self.inner.proj.mor(d) == c)
            .collect()
    }

    /// Checks the defining conditions, reporting each failure with a
    /// witness: the projection must be an identity-on-objects quotient by a
    /// free fiber action, and fiber automorphisms must commute past every
    /// morphism through the coefficient action.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let total = &self.inner.total;
        let base = &self.inner.base;
        let coeff = &self.inner.coeff;
        let proj = &self.inner.proj;
        for v in proj.validate() {
            out.push(format!("projection: {v}"));
        }
        for v in coeff.validate() {
            out.push(format!("coefficients: {v}"));
        }
        for x in 0..base.nobjects() {
            if proj.ob(x) != x {
                out.push(format!("projection moves object {x}"));
            }
        }
        if !out.is_empty() {
            return out;
        }

        // fiber tables: total, injective, homomorphic, and over identities
        let mut elems = Vec::new();
        for x in 0..base.nobjects() {
            let g = coeff.group(x);
            match g.elements() {
                Ok(es) => elems.push(es),
                Err(e) => {
                    out.push(format!("coefficient group at object {x} is not enumerable: {e}"));
                    return out;
                }
            }
        }
        for x in 0..base.nobjects() {
            let g = coeff.group(x);
            let map = &self.inner.delta[x];
            for e in &elems[x] {
                if !map.contains_key(e) {
                    out.push(format!("fiber table at object {x} misses element {e:?}"));
                }
            }
            if map.len() != elems[x].len() {
                out.push(format!("fiber table at object {x} has extra entries"));
            }
            let mut seen = HashMap::new();
            for (e, &d) in map {
                if let Some(prev) = seen.insert(d, e.clone()) {
                    out.push(format!(
                        "fiber table at object {x} is not injective: {prev:?} and {e:?} share morphism {d}"
                    ));
                }
                if total.src(d) != x || total.dst(d) != x {
                    out.push(format!("fiber morphism {d} at object {x} is not an endomorphism"));
                } else if proj.mor(d) != base.identity_of(x) {
                    out.push(format!("fiber morphism {d} at object {x} does not project to the identity"));
                }
            }
            if !out.is_empty() {
                continue;
            }
            let zero = g.zero();
            if map.get(&zero) != Some(&total.identity_of(x)) {
                out.push(format!("fiber table at object {x} does not send zero to the identity"));
            }
            for a in &elems[x] {
                for b in &elems[x] {
                    let sum = g.canon(&g.add(a, b));
                    let lhs = map[&sum];
                    let rhs = total.comp(map[a], map[b]);
                    if rhs != Some(lhs) {
                        out.push(format!(
                            "fiber table at object {x} is not a homomorphism at ({a:?}, {b:?})"
                        ));
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }

        // hom-set structure: surjectivity and free-orbit quotient
        for x in 0..base.nobjects() {
            for y in 0..base.nobjects() {
                let up = total.hom_set(x, y);
                let down = base.hom_set(x, y);
                for &c in down {
                    if !up.iter().any(|&d| proj.mor(d) == c) {
                        out.push(format!(
                            "hom-set ({x},{y}): base morphism {c} has no lift"
                        ));
                    }
                }
                let fiber_size = elems[y].len();
                if up.len() != down.len() * fiber_size {
                    out.push(format!(
                        "hom-set ({x},{y}): {} total morphisms over {} base ones with fiber of size {}",
                        up.len(),
                        down.len(),
                        fiber_size
                    ));
                }
                for &d in up {
                    let mut orbit = Vec::with_capacity(fiber_size);
                    for e in &elems[y] {
                        match total.comp(self.inner.delta[y][e], d) {
                            Some(od) => orbit.push(od),
                            None => out.push(format!(
                                "hom-set ({x},{y}): fiber action undefined on morphism {d}"
                            )),
                        }
                    }
                    let mut sorted = orbit.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if sorted.len() != fiber_size {
                        out.push(format!(
                            "hom-set ({x},{y}): fiber action is not free on morphism {d}"
                        ));
                    }
                    if orbit.iter().any(|&od| proj.mor(od) != proj.mor(d)) {
                        out.push(format!(
                            "hom-set ({x},{y}): the orbit of morphism {d} leaves its projection fiber"
                        ));
                    }
                }
                // distinct morphisms in one projection fiber must be related
                // by the action
                for &d in up {
                    for &d2 in up {
                        if d < d2 && proj.mor(d) == proj.mor(d2) {
                            let related = elems[y]
                                .iter()
                                .any(|e| total.comp(self.inner.delta[y][e], d) == Some(d2));
                            if !related {
                                out.push(format!(
                                    "hom-set ({x},{y}): morphisms {d} and {d2} share a projection but no fiber automorphism relates them"
                                ));
                            }
                        }
                    }
                }
            }
        }

        // fiber automorphisms commute past arbitrary morphisms through the
        // coefficient action
        for d in 0..total.nmorphisms() {
            let x = total.src(d);
            let y = total.dst(d);
            let c = proj.mor(d);
            for g in &elems[x] {
                let lhs = total.comp(d, self.inner.delta[x][g]);
                let pushed = coeff.group(y).canon(&coeff.hom(c).apply(g));
                let rhs = self.inner.delta[y]
                    .get(&pushed)
                    .and_then(|&dg| total.comp(dg, d));
                if lhs != rhs || lhs.is_none() {
                    out.push(format!(
                        "compatibility fails at morphism {d} with fiber element {g:?}"
                    ));
                }
            }
        }
        out
    }

    /// The regular section choosing the least-id lift for every non-identity
    /// base morphism and the identity lift for identities.
    pub fn canonical_section(&self) -> Result<&Section> {
        self.inner
            .section
            .get_or_init(|| {
                let base = &self.inner.base;
                let total = &self.inner.total;
                let mut lift = Vec::with_capacity(base.nmorphisms());
                for c in 0..base.nmorphisms() {
                    if base.is_identity(c) {
                        lift.push(total.identity_of(base.src(c)));
                        continue;
                    }
                    match (0..total.nmorphisms()).find(|&d| self.inner.proj.mor(d) == c) {
                        Some(d) => lift.push(d),
                        None => {
                            return Err(Error::Invalid(format!(
                                "base morphism {c} has no lift"
                            )))
                        }
                    }
                }
                Ok(Section { lift, regular: true })
            })
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// Builds a section from explicit lifts, checking that each lift
    /// projects back onto its base morphism.
    pub fn section_from_lifts(&self, lifts: Vec<MorId>) -> Result<Section> {
        if lifts.len() != self.inner.base.nmorphisms() {
            return Err(Error::Malformed("one lift per base morphism required".into()));
        }
        for (c, &d) in lifts.iter().enumerate() {
            if d >= self.inner.total.nmorphisms() || self.inner.proj.mor(d) != c {
                return Err(Error::Malformed(format!(
                    "lift of base morphism {c} does not project back to it"
                )));
            }
        }
        let regular = (0..self.inner.base.nobjects())
            .all(|x| lifts[self.inner.base.identity_of(x)] == self.inner.total.identity_of(x));
        Ok(Section { lift: lifts, regular })
    }

    /// The cochain complex of the base with the extension's coefficients.
    pub fn complex(&self) -> Result<CochainComplex> {
        self.inner
            .complex
            .get_or_init(|| CochainComplex::new(self.inner.coeff.clone(), Budget::default()))
            .as_ref()
            .map(|cx| cx.clone())
            .map_err(|e| e.clone())
    }

    fn cohomology2(&self) -> Result<Arc<Cohomology>> {
        self.inner
            .h2
            .get_or_init(|| self.complex()?.cohomology(2).map(Arc::new))
            .as_ref()
            .map(Arc::clone)
            .map_err(|e| e.clone())
    }

    /// The 2-cochain measuring failure of a regular section to be a functor:
    /// its value at the chain `(c0, c1)` is the unique `g` with
    /// `σ(c1)∘σ(c0) = ⟨g⟩∘σ(c1∘c0)`.
    pub fn cocycle_of_section(&self, sigma: &Section) -> Result<Cochain> {
        if !sigma.regular {
            return Err(Error::Malformed("a regular section is required".into()));
        }
        if sigma.lift.len() != self.inner.base.nmorphisms() {
            return Err(Error::Malformed("section does not match the base".into()));
        }
        let cx = self.complex()?;
        let total = &self.inner.total;
        let base = &self.inner.base;
        let chains: Vec<Vec<MorId>> = cx.chains(2)?.to_vec();
        let mut values = Vec::with_capacity(chains.len());
        for chain in &chains {
            let (c0, c1) = (chain[0], chain[1]);
            let y = base.dst(c1);
            let m = total
                .comp(sigma.lift(c1), sigma.lift(c0))
                .ok_or_else(|| Error::Invalid("section lifts do not compose".into()))?;
            let c10 = base.comp(c1, c0).expect("composable chain");
            let m0 = sigma.lift(c10);
            let mut found = None;
            for (e, &de) in &self.inner.delta[y] {
                if total.comp(de, m0) == Some(m) {
                    if found.is_some() {
                        return Err(Error::Invalid(
                            "fiber action is not free; the section cocycle is ambiguous".into(),
                        ));
                    }
                    found = Some(e.clone());
                }
            }
            values.push(found.ok_or_else(|| {
                Error::Invalid(format!(
                    "no fiber element relates the lifts over the chain ({c0},{c1})"
                ))
            })?);
        }
        cx.cochain_from_values(2, values)
    }

    /// The section cocycle for the canonical section.
    pub fn cocycle(&self) -> Result<Cochain> {
        let sigma = self.canonical_section()?.clone();
        self.cocycle_of_section(&sigma)
    }

    /// The extension's cohomology class; independent of the section choice.
    pub fn class(&self) -> Result<CohomologyClass> {
        let z = self.cocycle()?;
        self.cohomology2()?.class_of(&z)
    }

    fn decomposition(&self) -> Result<&Vec<(AbVec, MorId)>> {
        self.inner
            .decomp
            .get_or_init(|| {
                let total = &self.inner.total;
                let base = &self.inner.base;
                let sigma = self.canonical_section()?.clone();
                let mut table: Vec<Option<(AbVec, MorId)>> = vec![None; total.nmorphisms()];
                for c in 0..base.nmorphisms() {
                    let y = base.dst(c);
                    for (e, &de) in &self.inner.delta[y] {
                        let d = total.comp(de, sigma.lift(c)).ok_or_else(|| {
                            Error::Invalid("fiber action undefined on a section lift".into())
                        })?;
                        if table[d].is_some() {
                            return Err(Error::Invalid(format!(
                                "morphism {d} has two fiber decompositions; the extension is invalid"
                            )));
                        }
                        table[d] = Some((e.clone(), c));
                    }
                }
                table
                    .into_iter()
                    .enumerate()
                    .map(|(d, t)| {
                        t.ok_or_else(|| {
                            Error::Invalid(format!(
                                "morphism {d} has no fiber decomposition; the extension is invalid"
                            ))
                        })
                    })
                    .collect()
            })
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// Writes a total morphism as `⟨g⟩∘σ(c)`: returns `(g, c)`.
    pub fn decompose(&self, d: MorId) -> Result<(AbVec, MorId)> {
        if d >= self.inner.total.nmorphisms() {
            return Err(Error::Malformed(format!("unknown morphism {d}")));
        }
        Ok(self.decomposition()?[d].clone())
    }

    /// The total morphism `⟨g⟩∘σ(c)`.
    pub fn assemble(&self, g: &[BigInt], c: MorId) -> Result<MorId> {
        if c >= self.inner.base.nmorphisms() {
            return Err(Error::Malformed(format!("unknown base morphism {c}")));
        }
        let y = self.inner.base.dst(c);
        let de = self.delta_of(y, g)?;
        let sigma = self.canonical_section()?;
        self.inner
            .total
            .comp(de, sigma.lift(c))
            .ok_or_else(|| Error::Invalid("fiber action undefined on a section lift".into()))
    }

    /// Rebuilds a total category from a regular 2-cocycle: morphisms are
    /// pairs of a coefficient element and a base morphism, composed with the
    /// cocycle as carry term.
    pub fn build_from_cocycle(coeff: &AbFunctor, z: &Cochain) -> Result<Extension> {
        if z.degree() != 2 {
            return Err(Error::Malformed("a 2-cochain is required".into()));
        }
        if !z.complex().coeff().same_functor(coeff) {
            return Err(Error::Malformed(
                "the cochain lives over different coefficients".into(),
            ));
        }
        let cx = z.complex();
        if !cx.is_cocycle(z)? {
            return Err(Error::Invalid("the cochain is not a cocycle".into()));
        }
        let base = coeff.base().clone();
        // regularity: zero on every chain containing an identity
        for c in 0..base.nmorphisms() {
            let x = base.src(c);
            let y = base.dst(c);
            let left = z.value_on_chain(&[base.identity_of(x), c])?;
            let right = z.value_on_chain(&[c, base.identity_of(y)])?;
            if !coeff.group(y).is_zero(left) || !coeff.group(y).is_zero(right) {
                return Err(Error::Invalid(
                    "the cocycle is not regular; regularize it first".into(),
                ));
            }
        }
        let mut elems = Vec::new();
        for x in 0..base.nobjects() {
            elems.push(coeff.group(x).elements()?);
        }
        let mut count: u128 = 0;
        for c in 0..base.nmorphisms() {
            count += elems[base.dst(c)].len() as u128;
        }
        if count > MAX_BUILT_MORPHISMS {
            return Err(Error::Refused(format!(
                "the rebuilt category would have {count} morphisms, over the limit of {MAX_BUILT_MORPHISMS}"
            )));
        }
        let elem_index: Vec<HashMap<AbVec, usize>> = elems
            .iter()
            .map(|es| es.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect())
            .collect();

        // pair ids in base-morphism-major order
        let mut pair_id = vec![0usize; base.nmorphisms()];
        let mut morphisms = Vec::new();
        let mut proj_mor = Vec::new();
        for c in 0..base.nmorphisms() {
            pair_id[c] = morphisms.len();
            for _ in 0..elems[base.dst(c)].len() {
                morphisms.push((morphisms.len(), base.src(c), base.dst(c)));
                proj_mor.push(c);
            }
        }
        let id_of = |c: usize, gi: usize| pair_id[c] + gi;

        let mut identity = Vec::new();
        let mut delta: Vec<Vec<(AbVec, MorId)>> = Vec::new();
        for x in 0..base.nobjects() {
            let e = base.identity_of(x);
            let zero_idx = elems[x]
                .iter()
                .position(|g| coeff.group(x).is_zero(g))
                .expect("zero is enumerated");
            identity.push((x, id_of(e, zero_idx)));
            delta.push(
                elems[x]
                    .iter()
                    .enumerate()
                    .map(|(gi, g)| (g.clone(), id_of(e, gi)))
                    .collect(),
            );
        }

        let mut comp = Vec::new();
        for c1 in 0..base.nmorphisms() {
            for c0 in 0..base.nmorphisms() {
                let c10 = match base.comp(c1, c0) {
                    Some(c) => c,
                    None => continue,
                };
                let y = base.dst(c1);
                let zv = z.value_on_chain(&[c0, c1])?;
                for (g1i, g1) in elems[y].iter().enumerate() {
                    for (g0i, g0) in elems[base.dst(c0)].iter().enumerate() {
                        let moved = coeff.hom(c1).apply(g0);
                        let sum = coeff.group(y).canon(&coeff
                            .group(y)
                            .add(&coeff.group(y).add(g1, &moved), zv));
                        let gi = elem_index[y][&sum];
                        comp.push((id_of(c1, g1i), id_of(c0, g0i), id_of(c10, gi)));
                    }
                }
            }
        }

        let names: Vec<String> = (0..base.nobjects()).map(|x| base.object_name(x).to_string()).collect();
        let total = FinCat::new(names, &morphisms, &identity, &comp)?;
        let proj = CatFunctor::new(
            total.clone(),
            base.clone(),
            (0..base.nobjects()).collect(),
            proj_mor,
        )?;
        Extension::new(total, base, coeff.clone(), proj, &delta)
    }

    /// Decides equivalence over the identity of base and coefficients; the
    /// witness shifts fiber coordinates by a 1-cochain.
    pub fn are_equivalent(&self, other: &Extension) -> Result<Option<ExtMorphism>> {
        if self.inner.base != other.inner.base {
            return Err(Error::Malformed("the extensions have different bases".into()));
        }
        if !self.inner.coeff.same_functor(&other.inner.coeff) {
            return Err(Error::Malformed("the extensions have different coefficients".into()));
        }
        let cx = self.complex()?;
        let z = self.cocycle()?;
        let zp = other.cocycle()?;
        let u = match cx.cohomologous(&zp, &z)? {
            None => return Ok(None),
            Some(u) => u,
        };
        let total_map = self.shifted_functor(other, None, &u)?;
        Ok(Some(ExtMorphism {
            src: self.clone(),
            dst: other.clone(),
            total_map,
            base_map: CatFunctor::identity(&self.inner.base),
            eta: NatTrans::identity(&self.inner.coeff),
        }))
    }

    /// The functor `⟨g⟩∘σ(c) ↦ ⟨t(g) + u(c)⟩∘σ'(m(c))` into `other`, where
    /// `(m, t)` is the optional base functor with matching transformation
    /// and `u` a 1-cochain over the target coefficients.
    fn shifted_functor(
        &self,
        other: &Extension,
        along: Option<(&CatFunctor, &NatTrans)>,
        u: &Cochain,
    ) -> Result<CatFunctor> {
        let total = &self.inner.total;
        let mut on_mor = Vec::with_capacity(total.nmorphisms());
        for d in 0..total.nmorphisms() {
            let (g, c) = self.decompose(d)?;
            let (tc, tg) = match along {
                None => (c, g),
                Some((psi, eta)) => {
                    let x = self.inner.base.dst(c);
                    (psi.mor(c), eta.component(x).apply(&g))
                }
            };
            let y = other.inner.base.dst(tc);
            let uval = u.value_on_chain(&[c])?;
            let shifted = other.inner.coeff.group(y).add(&tg, uval);
            on_mor.push(other.assemble(&shifted, tc)?);
        }
        let on_obj = match along {
            None => (0..total.nobjects()).collect(),
            Some((psi, _)) => (0..total.nobjects()).map(|x| psi.ob(x)).collect(),
        };
        CatFunctor::new(total.clone(), other.inner.total.clone(), on_obj, on_mor)
    }

    /// A functorial right inverse of the projection, when one exists; absent
    /// exactly when the class is nonzero.
    pub fn is_split(&self) -> Result<Option<CatFunctor>> {
        let cx = self.complex()?;
        let z = self.cocycle()?;
        let zero = cx.zero_cochain(2)?;
        let u = match cx.cohomologous(&z, &zero)? {
            None => return Ok(None),
            Some(u) => u,
        };
        let base = &self.inner.base;
        let mut on_mor = Vec::with_capacity(base.nmorphisms());
        for c in 0..base.nmorphisms() {
            on_mor.push(self.assemble(u.value_on_chain(&[c])?, c)?);
        }
        let s = CatFunctor::new(
            base.clone(),
            self.inner.total.clone(),
            (0..base.nobjects()).collect(),
            on_mor,
        )?;
        Ok(Some(s))
    }

    /// Looks for a morphism of extensions inducing the prescribed base
    /// functor and coefficient transformation. Exists iff pushing the source
    /// cocycle forward along `eta` and pulling the target cocycle back along
    /// `psi` gives cohomologous cochains.
    pub fn morphism_exists(
        &self,
        other: &Extension,
        psi: &CatFunctor,
        eta: &NatTrans,
    ) -> Result<Option<ExtMorphism>> {
        if psi.src() != &self.inner.base || psi.dst() != &other.inner.base {
            return Err(Error::Malformed("base functor endpoints do not match".into()));
        }
        if !psi.validate().is_empty() {
            return Err(Error::Invalid("the base map is not a functor".into()));
        }
        let pulled_coeff = other.inner.coeff.precompose(psi)?;
        if !eta.from_f().same_functor(&self.inner.coeff) || !eta.to_f().same_functor(&pulled_coeff)
        {
            return Err(Error::Malformed(
                "the transformation must go from the source coefficients to the pulled-back target coefficients"
                    .into(),
            ));
        }
        if !eta.validate().is_empty() {
            return Err(Error::Invalid("the coefficient transformation is not natural".into()));
        }
        let cxp = CochainComplex::new(pulled_coeff, Budget::default())?;
        let pushed = cxp.pushforward(eta, &self.cocycle()?)?;
        let pulled = cxp.pullback(psi, &other.cocycle()?)?;
        let u = match cxp.cohomologous(&pulled, &pushed)? {
            None => return Ok(None),
            Some(u) => u,
        };
        let total_map = self.shifted_functor(other, Some((psi, eta)), &u)?;
        Ok(Some(ExtMorphism {
            src: self.clone(),
            dst: other.clone(),
            total_map,
            base_map: psi.clone(),
            eta: eta.clone(),
        }))
    }

    /// Recovers the coefficient transformation induced by a morphism of
    /// extensions from its action on fiber automorphisms, verifying it is a
    /// well-defined natural homomorphism family.
    pub fn eta_of(m: &ExtMorphism) -> Result<NatTrans> {
        let src = &m.src;
        let dst = &m.dst;
        let base = &src.inner.base;
        let mut components = Vec::with_capacity(base.nobjects());
        for x in 0..base.nobjects() {
            let gx = src.inner.coeff.group(x);
            let tx = m.base_map.ob(x);
            let gy = dst.inner.coeff.group(tx);
            let mut images = Vec::with_capacity(gx.ngens());
            for i in 0..gx.ngens() {
                let mut e = gx.zero();
                e[i] = BigInt::from(1);
                let d = src.delta_of(x, &e)?;
                let image = m.total_map.mor(d);
                let g2 = dst.delta_elem(tx, image).ok_or_else(|| {
                    Error::Invalid(format!(
                        "the image of a fiber automorphism at object {x} is not a fiber automorphism"
                    ))
                })?;
                images.push(g2.clone());
            }
            let hom = AbHom::from_images(gx.clone(), gy.clone(), &images)?;
            for g in gx.elements()? {
                let d = src.delta_of(x, &g)?;
                let image = m.total_map.mor(d);
                let expect = dst.delta_elem(tx, image).ok_or_else(|| {
                    Error::Invalid(format!(
                        "the image of a fiber automorphism at object {x} is not a fiber automorphism"
                    ))
                })?;
                if !gy.eq_elems(&hom.apply(&g), expect) {
                    return Err(Error::Invalid(format!(
                        "the fiber action of the morphism at object {x} is not additive"
                    )));
                }
            }
            components.push(hom);
        }
        let eta = NatTrans::new(
            src.inner.coeff.clone(),
            dst.inner.coeff.precompose(&m.base_map)?,
            components,
        )?;
        if !eta.validate().is_empty() {
            return Err(Error::Invalid("the recovered transformation is not natural".into()));
        }
        Ok(eta)
    }

    /// Conjugation by the fiber automorphisms `⟨u(X)⟩`: an automorphism over
    /// the identity base functor with identity coefficient transformation.
    pub fn inner_automorphism(&self, u: &[AbVec]) -> Result<ExtMorphism> {
        let total = &self.inner.total;
        if u.len() != total.nobjects() {
            return Err(Error::Malformed("one coefficient element per object required".into()));
        }
        let mut on_mor = Vec::with_capacity(total.nmorphisms());
        for d in 0..total.nmorphisms() {
            let x = total.src(d);
            let y = total.dst(d);
            let gx = self.inner.coeff.group(x);
            let left = self.delta_of(y, &u[y])?;
            let right = self.delta_of(x, &gx.neg(&u[x]))?;
            let td = total
                .comp(d, right)
                .and_then(|dr| total.comp(left, dr))
                .ok_or_else(|| Error::Invalid("conjugation left the category".into()))?;
            on_mor.push(td);
        }
        let total_map = CatFunctor::new(
            total.clone(),
            total.clone(),
            (0..total.nobjects()).collect(),
            on_mor,
        )?;
        Ok(ExtMorphism {
            src: self.clone(),
            dst: self.clone(),
            total_map,
            base_map: CatFunctor::identity(&self.inner.base),
            eta: NatTrans::identity(&self.inner.coeff),
        })
    }

    /// The automorphism attached to a 1-cocycle: `d ↦ ⟨z([d])⟩∘d`.
    pub fn automorphism_from_one_cocycle(&self, z: &Cochain) -> Result<ExtMorphism> {
        if z.degree() != 1 {
            return Err(Error::Malformed("a 1-cochain is required".into()));
        }
        let cx = self.complex()?;
        if !cx.is_cocycle(z)? {
            return Err(Error::Invalid("the cochain is not a cocycle".into()));
        }
        let total = &self.inner.total;
        let mut on_mor = Vec::with_capacity(total.nmorphisms());
        for d in 0..total.nmorphisms() {
            let c = self.inner.proj.mor(d);
            let y = total.dst(d);
            let zd = self.delta_of(y, z.value_on_chain(&[c])?)?;
            let td = total
                .comp(zd, d)
                .ok_or_else(|| Error::Invalid("fiber action undefined".into()))?;
            on_mor.push(td);
        }
        let total_map = CatFunctor::new(
            total.clone(),
            total.clone(),
            (0..total.nobjects()).collect(),
            on_mor,
        )?;
        Ok(ExtMorphism {
            src: self.clone(),
            dst: self.clone(),
            total_map,
            base_map: CatFunctor::identity(&self.inner.base),
            eta: NatTrans::identity(&self.inner.coeff),
        })
    }

    /// First cohomology of the base with one explicit automorphism over the
    /// identity per cyclic summand; the automorphisms represent the classes
    /// of such automorphisms modulo inner ones.
    pub fn aut_id_id_mod_inner(
        &self,
    ) -> Result<(PresentedAbGroup, Vec<(CohomologyClass, ExtMorphism)>)> {
        let cx = self.complex()?;
        let h1 = cx.cohomology(1)?;
        let mut gens = Vec::new();
        for class in h1.generators() {
            let aut = self.automorphism_from_one_cocycle(class.representative())?;
            gens.push((class.clone(), aut));
        }
        Ok((h1.group().clone(), gens))
    }

    /// The full-subcategory extension on a subset of objects, with the
    /// inclusion functor of the restricted base.
    pub fn restrict(&self, objs: &[ObjId]) -> Result<(Extension, CatFunctor)> {
        if objs.is_empty() {
            return Err(Error::Malformed("a nonempty object subset is required".into()));
        }
        let base = &self.inner.base;
        let total = &self.inner.total;
        let mut keep = objs.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if *keep.last().unwrap() >= base.nobjects() {
            return Err(Error::Malformed("unknown object in the subset".into()));
        }
        let obj_new: HashMap<ObjId, ObjId> =
            keep.iter().enumerate().map(|(n, &o)| (o, n)).collect();

        let restrict_cat = |cat: &FinCat| -> (FinCat, Vec<MorId>, HashMap<MorId, MorId>) {
            let mut old_of = Vec::new();
            let mut new_of = HashMap::new();
            for f in 0..cat.nmorphisms() {
                if obj_new.contains_key(&cat.src(f)) && obj_new.contains_key(&cat.dst(f)) {
                    new_of.insert(f, old_of.len());
                    old_of.push(f);
                }
            }
            let names: Vec<String> =
                keep.iter().map(|&o| cat.object_name(o).to_string()).collect();
            let morphisms: Vec<(MorId, ObjId, ObjId)> = old_of
                .iter()
                .enumerate()
                .map(|(n, &f)| (n, obj_new[&cat.src(f)], obj_new[&cat.dst(f)]))
                .collect();
            let identity: Vec<(ObjId, MorId)> = keep
                .iter()
                .enumerate()
                .map(|(n, &o)| (n, new_of[&cat.identity_of(o)]))
                .collect();
            let mut comp = Vec::new();
            for (gn, &g) in old_of.iter().enumerate() {
                for (fn_, &f) in old_of.iter().enumerate() {
                    if let Some(gf) = cat.comp(g, f) {
                        comp.push((gn, fn_, new_of[&gf]));
                    }
                }
            }
            let sub = FinCat::new(names, &morphisms, &identity, &comp).expect("full subcategory");
            (sub, old_of, new_of)
        };

        let (sub_base, base_old_of, _base_new_of) = restrict_cat(base);
        let (sub_total, total_old_of, total_new_of) = restrict_cat(total);

        let on_obj: Vec<ObjId> = (0..keep.len()).collect();
        let incl = CatFunctor::new(sub_base.clone(), base.clone(), keep.clone(), base_old_of.clone())?;

        let groups: Vec<PresentedAbGroup> =
            keep.iter().map(|&o| self.inner.coeff.group(o).clone()).collect();
        let homs: Vec<AbHom> =
            base_old_of.iter().map(|&f| self.inner.coeff.hom(f).clone()).collect();
        let sub_coeff = AbFunctor::new(sub_base.clone(), groups, homs)?;

        let base_new: HashMap<MorId, MorId> =
            base_old_of.iter().enumerate().map(|(n, &f)| (f, n)).collect();
        let proj_mor: Vec<MorId> = total_old_of
            .iter()
            .map(|&d| base_new[&self.inner.proj.mor(d)])
            .collect();
        let sub_proj = CatFunctor::new(sub_total.clone(), sub_base.clone(), on_obj, proj_mor)?;

        let delta: Vec<Vec<(AbVec, MorId)>> = keep
            .iter()
            .map(|&o| {
                self.inner.delta[o]
                    .iter()
                    .map(|(e, &d)| (e.clone(), total_new_of[&d]))
                    .collect()
            })
            .collect();

        let ext = Extension::new(sub_total, sub_base, sub_coeff, sub_proj, &delta)?;
        Ok((ext, incl))
    }
}

/// A morphism of extensions: a functor of totals lying over a base functor,
/// with the coefficient transformation it induces on fibers.
#[derive(Clone)]
pub struct ExtMorphism {
    src: Extension,
    dst: Extension,
    total_map: CatFunctor,
    base_map: CatFunctor,
    eta: NatTrans,
}

impl ExtMorphism {
    pub fn identity(e: &Extension) -> ExtMorphism {
        ExtMorphism {
            src: e.clone(),
            dst: e.clone(),
            total_map: CatFunctor::identity(e.total()),
            base_map: CatFunctor::identity(e.base()),
            eta: NatTrans::identity(e.coeff()),
        }
    }

    pub fn src(&self) -> &Extension {
        &self.src
    }

    pub fn dst(&self) -> &Extension {
        &self.dst
    }

    pub fn total_map(&self) -> &CatFunctor {
        &self.total_map
    }

    pub fn base_map(&self) -> &CatFunctor {
        &self.base_map
    }

    pub fn eta(&self) -> &NatTrans {
        &self.eta
    }

    /// Functor laws, projection compatibility, and the fiber condition
    /// relating the stored transformation to the total functor.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for v in self.total_map.validate() {
            out.push(format!("total map: {v}"));
        }
        for v in self.base_map.validate() {
            out.push(format!("base map: {v}"));
        }
        for v in self.eta.validate() {
            out.push(format!("transformation: {v}"));
        }
        if !out.is_empty() {
            return out;
        }
        let total = self.src.total();
        for x in 0..total.nobjects() {
            if self.total_map.ob(x) != self.base_map.ob(x) {
                out.push(format!("object {x} maps differently upstairs and downstairs"));
            }
        }
        for d in 0..total.nmorphisms() {
            let down_then_map = self.base_map.mor(self.src.proj().mor(d));
            let map_then_down = self.dst.proj().mor(self.total_map.mor(d));
            if down_then_map != map_then_down {
                out.push(format!("morphism {d} does not commute with the projections"));
            }
        }
        for x in 0..total.nobjects() {
            let gx = match self.src.coeff().group(x).elements() {
                Ok(es) => es,
                Err(_) => {
                    out.push(format!("coefficient group at object {x} is not enumerable"));
                    continue;
                }
            };
            let tx = self.base_map.ob(x);
            for g in gx {
                let lhs = self.src.delta_of(x, &g).ok().map(|d| self.total_map.mor(d));
                let pushed = self.eta.component(x).apply(&g);
                let rhs = self.dst.delta_of(tx, &pushed).ok();
                if lhs.is_none() || lhs != rhs {
                    out.push(format!(
                        "fiber automorphism for {g:?} at object {x} does not map along the transformation"
                    ));
                }
            }
        }
        out
    }

    /// Composition: `self` followed by `next`.
    pub fn then(&self, next: &ExtMorphism) -> Result<ExtMorphism> {
        if next.src.total() != self.dst.total() || next.src.base() != self.dst.base() {
            return Err(Error::Malformed("morphisms do not compose".into()));
        }
        let total_map = self.total_map.then(&next.total_map)?;
        let base_map = self.base_map.then(&next.base_map)?;
        let components = (0..self.src.base().nobjects())
            .map(|x| {
                self.eta
                    .component(x)
                    .then(next.eta.component(self.base_map.ob(x)))
            })
            .collect::<Result<Vec<AbHom>>>()?;
        let eta = NatTrans::new(
            self.src.coeff().clone(),
            next.dst.coeff().precompose(&base_map)?,
            components,
        )?;
        Ok(ExtMorphism {
            src: self.src.clone(),
            dst: next.dst.clone(),
            total_map,
            base_map,
            eta,
        })
    }
}

impl std::fmt::Debug for ExtMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ExtMorphism({:?} -> {:?})", self.src, self.dst)
    }
}
