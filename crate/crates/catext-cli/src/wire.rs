//! JSON wire formats and their conversions into library values.
//!
//! Numbers stay integers end to end; invariant factors and other values that
//! could outgrow `i64` fall back to decimal strings on output.

use catext::abgrp::{AbHom, AbVec, Mat, PresentedAbGroup};
use catext::adams::PToralData;
use catext::cobar::{Cochain, CochainComplex};
use catext::extension::Extension;
use catext::fincat::{AbFunctor, CatFunctor, CatSpec, FinCat, MorId};
use catext::{Error, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// `{"ngens": n, "relations": [[...], ...]}` with relator columns of length
/// `ngens`; `cached_invariants` is checked against the computed factors when
/// present (0 encodes an infinite cyclic factor).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupSpec {
    pub ngens: usize,
    pub relations: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cached_invariants: Option<Vec<u64>>,
}

/// One abelian group per object and one matrix per morphism, both in id
/// order. A matrix for `f: x -> y` has `groups[y].ngens` rows and
/// `groups[x].ngens` columns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctorSpec {
    pub groups: Vec<GroupSpec>,
    pub maps: Vec<Vec<Vec<i64>>>,
}

/// `{"chain": [morphism ids], "value": [coefficient coordinates]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainValue {
    pub chain: Vec<MorId>,
    pub value: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CochainSpec {
    pub degree: usize,
    pub values: Vec<ChainValue>,
}

/// `proj[d]` is the base morphism under total morphism `d`; `delta[x]`
/// lists `{"elem": coefficient vector, "mor": fiber automorphism id}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionSpec {
    pub total: CatSpec,
    pub base: CatSpec,
    pub phi: FunctorSpec,
    pub proj: Vec<MorId>,
    pub delta: Vec<Vec<DeltaEntry>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaEntry {
    pub elem: Vec<i64>,
    pub mor: MorId,
}

/// The truncated toral datum: component multiplication table, one action
/// matrix per component, and `coc[x][y]` the torus part of `σ(x)σ(y)σ(xy)⁻¹`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PToralSpec {
    pub p: u64,
    pub k: u32,
    pub rank: usize,
    pub pi: Vec<Vec<usize>>,
    pub action: Vec<Vec<Vec<i64>>>,
    pub coc: Vec<Vec<Vec<i64>>>,
}

/// Payload of `validate`, tagged by what is being checked.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValidatePayload {
    Category { category: CatSpec },
    Functor { category: CatSpec, coefficients: FunctorSpec },
    Extension { extension: ExtensionSpec },
    Ptoral { ptoral: PToralSpec },
}

#[derive(Clone, Debug, Deserialize)]
pub struct CohomPayload {
    pub category: CatSpec,
    pub coefficients: FunctorSpec,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ExtBuildPayload {
    pub category: CatSpec,
    pub coefficients: FunctorSpec,
    pub cocycle: CochainSpec,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ExtPairPayload {
    pub first: ExtensionSpec,
    pub second: ExtensionSpec,
}

#[derive(Clone, Debug, Deserialize)]
pub struct GroupCohomPayload {
    pub table: Vec<Vec<usize>>,
    pub coefficients: GroupSpec,
    pub action: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct WeylPayload {
    pub table: Vec<Vec<usize>>,
    pub action: Vec<Vec<Vec<i64>>>,
    pub scalars: Vec<usize>,
    pub p: u64,
    pub k: u32,
    #[serde(default)]
    pub max_level: Option<u32>,
}

pub fn vec_big(xs: &[i64]) -> AbVec {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn group_from_spec(spec: &GroupSpec) -> Result<PresentedAbGroup> {
    let mut cols = Vec::with_capacity(spec.relations.len());
    for col in &spec.relations {
        if col.len() != spec.ngens {
            return Err(Error::Malformed(format!(
                "a relator column has length {}, expected {}",
                col.len(),
                spec.ngens
            )));
        }
        cols.push(vec_big(col));
    }
    let g = PresentedAbGroup::from_relation_cols(spec.ngens, &cols);
    if let Some(cached) = &spec.cached_invariants {
        let computed: Vec<BigInt> = g.invariant_factors();
        let given: Vec<BigInt> = cached.iter().map(|&f| BigInt::from(f)).collect();
        if computed != given {
            return Err(Error::Invalid(format!(
                "cached invariants {given:?} disagree with the computed {computed:?}"
            )));
        }
    }
    Ok(g)
}

pub fn mat_from_rows(rows: &[Vec<i64>], nrows: usize, ncols: usize) -> Result<Mat> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Malformed(format!(
            "expected a {nrows}x{ncols} matrix"
        )));
    }
    if nrows == 0 || ncols == 0 {
        return Ok(Mat::zero(nrows, ncols));
    }
    Ok(Mat::from_rows_i64(rows))
}

pub fn functor_from_spec(cat: &FinCat, spec: &FunctorSpec) -> Result<AbFunctor> {
    if spec.groups.len() != cat.nobjects() {
        return Err(Error::Malformed(format!(
            "{} coefficient groups for {} objects",
            spec.groups.len(),
            cat.nobjects()
        )));
    }
    if spec.maps.len() != cat.nmorphisms() {
        return Err(Error::Malformed(format!(
            "{} coefficient maps for {} morphisms",
            spec.maps.len(),
            cat.nmorphisms()
        )));
    }
    let groups: Vec<PresentedAbGroup> =
        spec.groups.iter().map(group_from_spec).collect::<Result<_>>()?;
    let mut homs = Vec::with_capacity(spec.maps.len());
    for f in 0..cat.nmorphisms() {
        let src = &groups[cat.src(f)];
        let dst = &groups[cat.dst(f)];
        let m = mat_from_rows(&spec.maps[f], dst.ngens(), src.ngens())?;
        homs.push(AbHom::new(src.clone(), dst.clone(), m)?);
    }
    AbFunctor::new(cat.clone(), groups, homs)
}

pub fn extension_from_spec(spec: &ExtensionSpec) -> Result<Extension> {
    let total = FinCat::from_spec(&spec.total)?;
    let base = FinCat::from_spec(&spec.base)?;
    let phi = functor_from_spec(&base, &spec.phi)?;
    if spec.proj.len() != total.nmorphisms() {
        return Err(Error::Malformed(format!(
            "projection lists {} morphisms, the total category has {}",
            spec.proj.len(),
            total.nmorphisms()
        )));
    }
    let proj = CatFunctor::new(
        total.clone(),
        base.clone(),
        (0..total.nobjects()).collect(),
        spec.proj.clone(),
    )?;
    let delta: Vec<Vec<(AbVec, MorId)>> = spec
        .delta
        .iter()
        .map(|entries| entries.iter().map(|e| (vec_big(&e.elem), e.mor)).collect())
        .collect();
    Extension::new(total, base, phi, proj, &delta)
}

pub fn ptoral_from_spec(spec: &PToralSpec) -> Result<PToralData> {
    let action: Vec<Mat> = spec
        .action
        .iter()
        .map(|rows| mat_from_rows(rows, spec.rank, spec.rank))
        .collect::<Result<_>>()?;
    let coc: Vec<Vec<AbVec>> = spec
        .coc
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| {
                    if v.len() != spec.rank {
                        return Err(Error::Malformed(format!(
                            "a cocycle value has length {}, expected {}",
                            v.len(),
                            spec.rank
                        )));
                    }
                    Ok(vec_big(v))
                })
                .collect::<Result<Vec<AbVec>>>()
        })
        .collect::<Result<_>>()?;
    PToralData::new(spec.p, spec.k, spec.rank, spec.pi.clone(), action, coc)
}

/// Matches the listed chains against the complex's enumeration order.
pub fn cochain_from_spec(cx: &CochainComplex, spec: &CochainSpec) -> Result<Cochain> {
    if spec.degree == 0 {
        return Err(Error::Malformed(
            "degree-0 cochains are not accepted as input".into(),
        ));
    }
    let chains = cx.chains(spec.degree)?;
    if spec.values.len() != chains.len() {
        return Err(Error::Malformed(format!(
            "{} values for {} chains at degree {}",
            spec.values.len(),
            chains.len(),
            spec.degree
        )));
    }
    let mut slots: Vec<Option<AbVec>> = vec![None; chains.len()];
    for cv in &spec.values {
        let at = chains
            .iter()
            .position(|c| c == &cv.chain)
            .ok_or_else(|| Error::Malformed(format!("{:?} is not a chain", cv.chain)))?;
        if slots[at].is_some() {
            return Err(Error::Malformed(format!("chain {:?} listed twice", cv.chain)));
        }
        slots[at] = Some(vec_big(&cv.value));
    }
    let values = slots.into_iter().map(|s| s.unwrap()).collect();
    cx.cochain_from_values(spec.degree, values)
}

pub fn big_value(v: &BigInt) -> Value {
    i64::try_from(v).map(Value::from).unwrap_or_else(|_| Value::from(v.to_string()))
}

pub fn bigs_value(vs: &[BigInt]) -> Value {
    Value::from(vs.iter().map(big_value).collect::<Vec<_>>())
}

pub fn factors_value(g: &PresentedAbGroup) -> Value {
    bigs_value(&g.invariant_factors())
}

pub fn functor_map_value(f: &CatFunctor) -> Value {
    let on_mor: Vec<MorId> = (0..f.src().nmorphisms()).map(|m| f.mor(m)).collect();
    json!(on_mor)
}

fn group_to_spec(g: &PresentedAbGroup) -> Result<GroupSpec> {
    let rels = g.relations();
    let mut relations = Vec::with_capacity(rels.cols);
    for j in 0..rels.cols {
        let col = rels
            .col(j)
            .iter()
            .map(i64::try_from)
            .collect::<std::result::Result<Vec<i64>, _>>()
            .map_err(|_| Error::Refused("a relator entry does not fit in 64 bits".into()))?;
        relations.push(col);
    }
    let cached = g
        .invariant_factors()
        .iter()
        .map(u64::try_from)
        .collect::<std::result::Result<Vec<u64>, _>>()
        .ok();
    Ok(GroupSpec { ngens: g.ngens(), relations, cached_invariants: cached })
}

fn functor_to_spec(phi: &AbFunctor) -> Result<FunctorSpec> {
    let cat = phi.base();
    let groups = (0..cat.nobjects())
        .map(|x| group_to_spec(phi.group(x)))
        .collect::<Result<_>>()?;
    let maps = (0..cat.nmorphisms())
        .map(|f| {
            phi.hom(f)
                .mat()
                .to_rows_i64()
                .ok_or_else(|| Error::Refused("a matrix entry does not fit in 64 bits".into()))
        })
        .collect::<Result<_>>()?;
    Ok(FunctorSpec { groups, maps })
}

/// Serializes a built extension, enumerating each fiber table in the
/// coefficient group's element order.
pub fn extension_to_spec(ext: &Extension) -> Result<ExtensionSpec> {
    let total = ext.total();
    let base = ext.base();
    let proj: Vec<MorId> = (0..total.nmorphisms()).map(|d| ext.proj().mor(d)).collect();
    let mut delta = Vec::with_capacity(base.nobjects());
    for x in 0..base.nobjects() {
        let mut entries = Vec::new();
        for g in ext.coeff().group(x).elements()? {
            let mor = ext.delta_of(x, &g)?;
            let elem = g
                .iter()
                .map(i64::try_from)
                .collect::<std::result::Result<Vec<i64>, _>>()
                .map_err(|_| Error::Refused("a coefficient entry does not fit in 64 bits".into()))?;
            entries.push(DeltaEntry { elem, mor });
        }
        delta.push(entries);
    }
    Ok(ExtensionSpec {
        total: total.to_spec(),
        base: base.to_spec(),
        phi: functor_to_spec(ext.coeff())?,
        proj,
        delta,
    })
}

pub fn cochain_to_spec(z: &Cochain) -> Result<CochainSpec> {
    let mut values = Vec::new();
    for (chain, value) in z.entries()? {
        let v = value
            .iter()
            .map(i64::try_from)
            .collect::<std::result::Result<Vec<i64>, _>>()
            .map_err(|_| Error::Refused("a cochain entry does not fit in 64 bits".into()))?;
        values.push(ChainValue { chain, value: v });
    }
    Ok(CochainSpec { degree: z.degree(), values })
}
