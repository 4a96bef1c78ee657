//! One function per subcommand. Each returns the result payload plus any
//! witnesses; semantic law violations are flagged so the driver can exit 1
//! while still emitting the full report.

use catext::adams::{action_functor, h1_weyl_vanishing};
use catext::cobar::{Budget, CochainComplex};
use catext::extension::Extension;
use catext::fincat::{one_object_cat, scalar_nat_trans, CatFunctor, FinCat};
use catext::padic::UnitModPk;
use catext::psu;
use catext::{Error, Result};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::wire::*;

pub struct CmdOut {
    pub result: Value,
    pub witnesses: Vec<String>,
    pub violated: bool,
}

impl CmdOut {
    fn ok(result: Value) -> Self {
        CmdOut { result, witnesses: Vec::new(), violated: false }
    }

    fn with_witnesses(result: Value, witnesses: Vec<String>) -> Self {
        CmdOut { result, witnesses, violated: false }
    }

    fn checked(result: Value, violations: Vec<String>) -> Self {
        let violated = !violations.is_empty();
        CmdOut { result, witnesses: violations, violated }
    }
}

/// Refuses before any chain enumeration if a needed degree would overflow
/// the cell budget. Degrees up to `top` are probed (cohomology in degree n
/// touches chains in degree n + 1).
fn guard_cells(cx: &CochainComplex, top: usize, max_cells: u64) -> Result<()> {
    for n in 0..=top {
        let est = cx.cell_estimate(n);
        if est > max_cells as u128 {
            return Err(Error::Refused(format!(
                "the flattened cochain group at degree {n} needs {est} generator \
                 columns, over the cell budget of {max_cells}"
            )));
        }
    }
    Ok(())
}

fn parse<T: serde::de::DeserializeOwned>(payload: &str) -> Result<T> {
    serde_json::from_str(payload).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn validate(payload: &str) -> Result<CmdOut> {
    let (kind, violations) = match parse::<ValidatePayload>(payload)? {
        ValidatePayload::Category { category } => {
            ("category", FinCat::from_spec(&category)?.validate())
        }
        ValidatePayload::Functor { category, coefficients } => {
            let cat = FinCat::from_spec(&category)?;
            ("functor", functor_from_spec(&cat, &coefficients)?.validate())
        }
        ValidatePayload::Extension { extension } => {
            ("extension", extension_from_spec(&extension)?.validate())
        }
        ValidatePayload::Ptoral { ptoral } => {
            ("ptoral", ptoral_from_spec(&ptoral)?.validate())
        }
    };
    let result = json!({ "kind": kind, "violations": violations });
    Ok(CmdOut::checked(result, violations.clone()))
}

pub fn cohom(payload: &str, degree: usize, max_cells: u64) -> Result<CmdOut> {
    let p: CohomPayload = parse(payload)?;
    let cat = FinCat::from_spec(&p.category)?;
    let phi = functor_from_spec(&cat, &p.coefficients)?;
    let cx = CochainComplex::new(phi, Budget { max_degree: degree, max_cells })?;
    guard_cells(&cx, degree + 1, max_cells)?;
    let mut degrees = Vec::with_capacity(degree + 1);
    for n in 0..=degree {
        let h = cx.cohomology(n)?;
        degrees.push(json!({ "n": n, "invariants": factors_value(h.group()) }));
    }
    Ok(CmdOut::ok(json!({ "degrees": degrees })))
}

fn class_value(ext: &Extension) -> Result<Value> {
    let class = ext.class()?;
    let order = class.order().ok_or_else(|| Error::Invalid("class of infinite order".into()))?;
    Ok(json!({
        "h2_invariants": factors_value(class.group()),
        "coordinates": bigs_value(class.coords()),
        "order": big_value(&order),
        "is_zero": class.is_zero(),
    }))
}

pub fn ext_class(payload: &str, max_cells: u64) -> Result<CmdOut> {
    let spec: ExtensionSpec = parse(payload)?;
    let ext = extension_from_spec(&spec)?;
    guard_cells(&ext.complex()?, 3, max_cells)?;
    let class = class_value(&ext)?;
    let z = ext.cocycle()?;
    Ok(CmdOut::ok(json!({
        "class": class,
        "cocycle": serde_json::to_value(cochain_to_spec(&z)?)
            .map_err(|e| Error::Malformed(e.to_string()))?,
    })))
}

pub fn ext_build(payload: &str, max_cells: u64) -> Result<CmdOut> {
    let p: ExtBuildPayload = parse(payload)?;
    let cat = FinCat::from_spec(&p.category)?;
    let phi = functor_from_spec(&cat, &p.coefficients)?;
    let cx = CochainComplex::new(phi.clone(), Budget { max_degree: 3, max_cells })?;
    guard_cells(&cx, 3, max_cells)?;
    let z = cochain_from_spec(&cx, &p.cocycle)?;
    let ext = Extension::build_from_cocycle(&phi, &z)?;
    let spec = extension_to_spec(&ext)?;
    Ok(CmdOut::ok(json!({
        "extension": serde_json::to_value(spec).map_err(|e| Error::Malformed(e.to_string()))?,
        "total_morphisms": ext.total().nmorphisms(),
    })))
}

pub fn ext_equiv(payload: &str, max_cells: u64) -> Result<CmdOut> {
    let p: ExtPairPayload = parse(payload)?;
    let first = extension_from_spec(&p.first)?;
    let second = extension_from_spec(&p.second)?;
    guard_cells(&first.complex()?, 3, max_cells)?;
    guard_cells(&second.complex()?, 3, max_cells)?;
    match first.are_equivalent(&second)? {
        Some(m) => Ok(CmdOut::ok(json!({
            "equivalent": true,
            "total_map": functor_map_value(m.total_map()),
        }))),
        None => Ok(CmdOut::ok(json!({ "equivalent": false }))),
    }
}

pub fn ext_split(payload: &str, max_cells: u64) -> Result<CmdOut> {
    let spec: ExtensionSpec = parse(payload)?;
    let ext = extension_from_spec(&spec)?;
    guard_cells(&ext.complex()?, 3, max_cells)?;
    let class = ext.class()?;
    let witness = format!(
        "class coordinates {:?} in H2 with invariants {:?}",
        class.coords(),
        class.group().invariant_factors()
    );
    match ext.is_split()? {
        Some(section) => Ok(CmdOut::with_witnesses(
            json!({
                "split": true,
                "class": class_value(&ext)?,
                "section": functor_map_value(&section),
            }),
            vec![witness],
        )),
        None => Ok(CmdOut::with_witnesses(
            json!({ "split": false, "class": class_value(&ext)? }),
            vec![witness],
        )),
    }
}

pub fn ext_aut(payload: &str, max_cells: u64) -> Result<CmdOut> {
    let spec: ExtensionSpec = parse(payload)?;
    let ext = extension_from_spec(&spec)?;
    guard_cells(&ext.complex()?, 2, max_cells)?;
    let (h1, gens) = ext.aut_id_id_mod_inner()?;
    let reps: Vec<Value> = gens
        .iter()
        .map(|(class, aut)| {
            json!({
                "class_coordinates": bigs_value(class.coords()),
                "total_map": functor_map_value(aut.total_map()),
            })
        })
        .collect();
    Ok(CmdOut::ok(json!({
        "h1_invariants": factors_value(&h1),
        "generators": reps,
    })))
}

pub fn ext_scalar_aut(payload: &str, zeta: i64, max_cells: u64) -> Result<CmdOut> {
    let spec: ExtensionSpec = parse(payload)?;
    let ext = extension_from_spec(&spec)?;
    guard_cells(&ext.complex()?, 3, max_cells)?;
    let class = ext.class()?;
    let fixes = class.smul(&(BigInt::from(zeta) - BigInt::from(1))).is_zero();
    let psi = CatFunctor::identity(ext.base());
    let eta = scalar_nat_trans(ext.coeff(), zeta);
    let found = ext.morphism_exists(&ext, &psi, &eta)?;
    let result = json!({
        "zeta": zeta,
        "fixes_class": fixes,
        "morphism_exists": found.is_some(),
        "total_map": found.as_ref().map(|m| functor_map_value(m.total_map())),
    });
    if fixes != found.is_some() {
        return Ok(CmdOut::checked(
            result,
            vec!["the scalar criterion and the morphism search disagree".into()],
        ));
    }
    Ok(CmdOut::ok(result))
}

pub fn adams(payload: &str, degree: Option<i64>, precision: Option<u32>, max_cells: u64) -> Result<CmdOut> {
    let spec: PToralSpec = parse(payload)?;
    let data = ptoral_from_spec(&spec)?;
    let violations = data.validate();
    if !violations.is_empty() {
        return Ok(CmdOut::checked(json!({ "violations": violations }), violations.clone()));
    }
    guard_cells(data.complex()?, 3, max_cells)?;
    let (class_order, level) = data.extension_class_order()?;
    let mut result = json!({
        "order": big_value(&data.total_order()),
        "class": { "order": big_value(&class_order), "level": level },
    });
    let obj = result.as_object_mut().unwrap();
    match degree {
        Some(z) => {
            let prec = precision.unwrap_or(data.level());
            let unit = UnitModPk::new(spec.p, prec, z)?;
            let found = data.adams_of_degree(&unit)?;
            obj.insert(
                "degree".into(),
                json!({
                    "residue": unit.residue,
                    "precision": prec,
                    "realized": found.is_some(),
                }),
            );
        }
        None => {
            let auts = data.enumerate_ad()?;
            let mut degrees: Vec<u64> =
                auts.iter().map(|a| a.degree().residue_mod(data.level()).unwrap()).collect();
            degrees.sort_unstable();
            degrees.dedup();
            obj.insert("count".into(), json!(auts.len()));
            obj.insert("degrees".into(), json!(degrees));
        }
    }
    Ok(CmdOut::ok(result))
}

pub fn group_cohom(payload: &str, degree: usize, max_cells: u64) -> Result<CmdOut> {
    let p: GroupCohomPayload = parse(payload)?;
    let cat = one_object_cat(&p.table)?;
    let coeff = group_from_spec(&p.coefficients)?;
    let action = p
        .action
        .iter()
        .map(|rows| mat_from_rows(rows, coeff.ngens(), coeff.ngens()))
        .collect::<Result<Vec<_>>>()?;
    let phi = action_functor(&cat, &coeff, &action)?;
    let cx = CochainComplex::new(phi, Budget { max_degree: degree, max_cells })?;
    guard_cells(&cx, degree + 1, max_cells)?;
    let mut degrees = Vec::with_capacity(degree + 1);
    for n in 0..=degree {
        let h = cx.cohomology(n)?;
        degrees.push(json!({ "n": n, "invariants": factors_value(h.group()) }));
    }
    Ok(CmdOut::ok(json!({ "degrees": degrees })))
}

pub fn weyl_h1(payload: &str) -> Result<CmdOut> {
    let p: WeylPayload = parse(payload)?;
    let rank = p.action.first().map_or(0, |m| m.len());
    let action = p
        .action
        .iter()
        .map(|rows| mat_from_rows(rows, rank, rank))
        .collect::<Result<Vec<_>>>()?;
    let max_level = p.max_level.unwrap_or(p.k);
    let report = h1_weyl_vanishing(&p.table, &action, &p.scalars, p.p, p.k, max_level)?;
    Ok(CmdOut::ok(json!({
        "scalar_order": report.scalar_order,
        "condition_scalars_odd": report.condition_scalars_odd,
        "condition_quotient_even": report.condition_quotient_even,
        "condition_reflections": report.condition_reflections,
        "quotient_h1_factors": report.quotient_h1_factors.as_deref().map(bigs_value),
        "pseudo_reflections": report.pseudo_reflections,
        "any_condition": report.any_condition,
        "h1_factors": bigs_value(&report.h1_factors),
        "h1_stable_factors": report.h1_stable_factors.as_deref().map(bigs_value),
        "h1_vanishes_stably": report.h1_vanishes_stably,
    })))
}

/// Labels a commutator of two of the block generators.
fn commutator_label(c: &psu::MonomialMatrix, p: u64, k: u32) -> Result<&'static str> {
    let n = p as usize;
    let s = (p.pow(k) / p) as i64;
    let one = psu::MonomialMatrix::identity(n, p, k)?;
    let fwd = psu::MonomialMatrix::scalar(n, p, k, -s)?;
    let bwd = psu::MonomialMatrix::scalar(n, p, k, s)?;
    let first = psu::MonomialMatrix::from_blocks(&[&fwd, &one])?;
    let first_inv = psu::MonomialMatrix::from_blocks(&[&bwd, &one])?;
    let second = psu::MonomialMatrix::from_blocks(&[&one, &fwd])?;
    let second_inv = psu::MonomialMatrix::from_blocks(&[&one, &bwd])?;
    Ok(if *c == psu::MonomialMatrix::identity(2 * n, p, k)? {
        "1"
    } else if *c == first {
        "zeta_1"
    } else if *c == first_inv {
        "zeta_1_inv"
    } else if *c == second {
        "zeta_2"
    } else if *c == second_inv {
        "zeta_2_inv"
    } else if c.is_scalar() {
        "scalar"
    } else {
        "other"
    })
}

pub fn psu_demo(p: u64, k: u32) -> Result<CmdOut> {
    let g = psu::build_q(p, k)?;
    let names = ["A1", "B1", "A2", "B2", "torus", "scalar_p"];
    let gens = [&g.a1, &g.b1, &g.a2, &g.b2, &g.torus, &g.scalar_p];
    let mut table = Vec::with_capacity(names.len());
    for m in gens {
        let mut row = Vec::with_capacity(names.len());
        for n in gens {
            row.push(commutator_label(&m.commutator(n)?, p, k)?);
        }
        table.push(row);
    }

    let q = p.pow(k);
    let step = q / p;
    let xy = psu::xy_commutator(p, k)?;
    let report = psu::no_section_check(p, k)?;
    let verdict = report.all_nontrivial;

    let restricted = match psu::restricted_class_obstruction(p, k) {
        Ok(class) => {
            let order = class
                .order()
                .ok_or_else(|| Error::Invalid("class of infinite order".into()))?;
            json!({
                "status": "ok",
                "h2_invariants": factors_value(class.group()),
                "coordinates": bigs_value(class.coords()),
                "order": big_value(&order),
                "nonzero": !class.is_zero(),
            })
        }
        Err(Error::Refused(msg)) => json!({ "status": "refused", "note": msg }),
        Err(e) => return Err(e),
    };

    let result = json!({
        "p": p,
        "K": k,
        "root_order": q,
        "generators": names,
        "commutators": table,
        "xy": {
            "torus_coordinate": xy.torus_coordinate()?,
            "expected_coordinate": q - step,
            "is_identity": xy.is_identity(),
        },
        "no_section": {
            "checked_pairs": report.checked_pairs,
            "commutator_constant": report.commutator_constant,
            "verdict": verdict,
        },
        "restricted_class": restricted,
    });
    if !verdict {
        return Ok(CmdOut::checked(result, vec!["a commuting lift pair exists".into()]));
    }
    Ok(CmdOut::ok(result))
}
