//! Cochains on a finite category with functorial abelian coefficients.
//!
//! An n-chain is a composable tuple `(c0, .., c_{n-1})` with the
//! first-applied arrow written first; 0-chains are the objects. An n-cochain
//! assigns to every n-chain an element of the coefficient group at the
//! chain's final object, and the differential is the alternating sum that
//! twists by the functor on the last arrow. Cohomology is kernel modulo
//! image, computed with the exact engines from [`crate::abgrp`].

use crate::abgrp::{AbHom, AbVec, Mat, PresentedAbGroup, PreimageSolver};
use crate::fincat::{AbFunctor, CatFunctor, MorId, NatTrans, ObjId};
use crate::{Error, Result};
use num_bigint::BigInt;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

/// Resource limits for a [`CochainComplex`]. `max_cells` bounds the number
/// of generator columns materialized at any single degree.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_degree: usize,
    pub max_cells: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_degree: 3, max_cells: 1 << 18 }
    }
}

struct DegreeData {
    /// Composable tuples in lexicographic order; empty tuples stand in for
    /// the objects at degree 0.
    chains: Vec<Vec<MorId>>,
    index: HashMap<Vec<MorId>, usize>,
    /// Final object of each chain.
    ends: Vec<ObjId>,
    /// Direct sum of the coefficient groups at `ends`, in chain order.
    group: PresentedAbGroup,
    /// Start of each chain's generator block; one extra entry at the end.
    offsets: Vec<usize>,
}

struct CxInner {
    coeff: AbFunctor,
    budget: Budget,
    degrees: Vec<OnceLock<std::result::Result<DegreeData, Error>>>,
    deltas: Vec<OnceLock<std::result::Result<AbHom, Error>>>,
}

/// The cochain complex of a finite category with coefficients in an
/// [`AbFunctor`] on it. Cheap to clone; per-degree data is built on first
/// use and cached.
#[derive(Clone)]
pub struct CochainComplex {
    inner: Arc<CxInner>,
}

impl CochainComplex {
    pub fn new(coeff: AbFunctor, budget: Budget) -> Result<Self> {
        if budget.max_degree > 16 {
            return Err(Error::Malformed(
                "maximum degree above 16 is not supported".into(),
            ));
        }
        let slots = budget.max_degree + 2;
        Ok(CochainComplex {
            inner: Arc::new(CxInner {
                coeff,
                budget,
                degrees: (0..slots).map(|_| OnceLock::new()).collect(),
                deltas: (0..slots - 1).map(|_| OnceLock::new()).collect(),
            }),
        })
    }

    pub fn coeff(&self) -> &AbFunctor {
        &self.inner.coeff
    }

    pub fn budget(&self) -> Budget {
        self.inner.budget
    }

    /// Exact number of generator columns the flattened cochain group at
    /// degree `n` would need, without enumerating chains.
    pub fn cell_estimate(&self, n: usize) -> u128 {
        let cat = self.inner.coeff.base();
        let nobj = cat.nobjects();
        // counts[y] = number of n-chains ending at y
        let mut counts = vec![1u128; nobj];
        let mut adj = vec![0u128; nobj * nobj];
        for x in 0..nobj {
            for y in 0..nobj {
                adj[x * nobj + y] = cat.hom_set(x, y).len() as u128;
            }
        }
        for _ in 0..n {
            let mut next = vec![0u128; nobj];
            for x in 0..nobj {
                for y in 0..nobj {
                    next[y] += counts[x] * adj[x * nobj + y];
                }
            }
            counts = next;
        }
        counts
            .iter()
            .enumerate()
            .map(|(y, c)| c * self.inner.coeff.group(y).ngens() as u128)
            .sum()
    }

    fn degree_data(&self, n: usize) -> Result<&DegreeData> {
        if n > self.inner.budget.max_degree + 1 {
            return Err(Error::Refused(format!(
                "degree {} is beyond the configured maximum {}; raise the \
                 degree budget to proceed (the flattened cochain group there \
                 would need {} generator columns)",
                n,
                self.inner.budget.max_degree,
                self.cell_estimate(n)
            )));
        }
        self.inner.degrees[n]
            .get_or_init(|| self.build_degree(n))
            .as_ref()
            .map_err(|e| e.clone())
    }

    fn build_degree(&self, n: usize) -> std::result::Result<DegreeData, Error> {
        let est = self.cell_estimate(n);
        if est > self.inner.budget.max_cells as u128 {
            return Err(Error::Refused(format!(
                "the flattened cochain group at degree {} needs {} generator \
                 columns, over the budget of {}",
                n, est, self.inner.budget.max_cells
            )));
        }
        let cat = self.inner.coeff.base();
        let (chains, ends) = if n == 0 {
            let ends: Vec<ObjId> = (0..cat.nobjects()).collect();
            (vec![Vec::new(); cat.nobjects()], ends)
        } else {
            let chains = cat.chains(n);
            let ends: Vec<ObjId> = chains.iter().map(|c| cat.dst(*c.last().unwrap())).collect();
            (chains, ends)
        };
        let index: HashMap<Vec<MorId>, usize> = if n == 0 {
            HashMap::new()
        } else {
            chains.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect()
        };
        let parts: Vec<&PresentedAbGroup> =
            ends.iter().map(|&y| self.inner.coeff.group(y)).collect();
        let group = PresentedAbGroup::direct_sum(&parts);
        let mut offsets = Vec::with_capacity(ends.len() + 1);
        let mut at = 0usize;
        for p in &parts {
            offsets.push(at);
            at += p.ngens();
        }
        offsets.push(at);
        Ok(DegreeData { chains, index, ends, group, offsets })
    }

    /// Flattened cochain group at degree `n`.
    pub fn group_at(&self, n: usize) -> Result<&PresentedAbGroup> {
        Ok(&self.degree_data(n)?.group)
    }

    /// Chains indexing degree `n >= 1`, in enumeration order.
    pub fn chains(&self, n: usize) -> Result<&[Vec<MorId>]> {
        if n == 0 {
            return Err(Error::Malformed("chains are indexed from degree 1".into()));
        }
        Ok(&self.degree_data(n)?.chains)
    }

    /// The differential as a homomorphism of flattened groups.
    pub fn delta(&self, n: usize) -> Result<&AbHom> {
        if n + 1 > self.inner.budget.max_degree + 1 {
            return Err(Error::Refused(format!(
                "the differential out of degree {} lands beyond the \
                 configured maximum degree {}",
                n, self.inner.budget.max_degree
            )));
        }
        self.inner.deltas[n]
            .get_or_init(|| self.build_delta(n))
            .as_ref()
            .map_err(|e| e.clone())
    }

    fn build_delta(&self, n: usize) -> std::result::Result<AbHom, Error> {
        let dome = self.degree_data(n)?;
        let target = self.degree_data(n + 1)?;
        let cat = self.inner.coeff.base();
        let mut mat = Mat::zero(target.group.ngens(), dome.group.ngens());
        let add_identity = |mat: &mut Mat, row: usize, col: usize, len: usize, sign: i64| {
            for t in 0..len {
                let cur = mat.get(row + t, col + t).clone();
                mat.set(row + t, col + t, cur + BigInt::from(sign));
            }
        };
        let add_block = |mat: &mut Mat, row: usize, col: usize, block: &Mat, sign: i64| {
            let s = BigInt::from(sign);
            for i in 0..block.rows {
                for j in 0..block.cols {
                    let cur = mat.get(row + i, col + j).clone();
                    mat.set(row + i, col + j, cur + &s * block.get(i, j));
                }
            }
        };
        for (t, chain) in target.chains.iter().enumerate() {
            let row = target.offsets[t];
            if n == 0 {
                // value on a single arrow c: X0 -> X1 is F(c)(u(X0)) - u(X1)
                let c = chain[0];
                let x0 = cat.src(c);
                let x1 = cat.dst(c);
                add_block(&mut mat, row, dome.offsets[x0], self.inner.coeff.hom(c).mat(), 1);
                add_identity(&mut mat, row, dome.offsets[x1], dome.offsets[x1 + 1] - dome.offsets[x1], -1);
                continue;
            }
            // drop the first arrow
            let head = chain[1..].to_vec();
            let hidx = dome.index[&head];
            add_identity(
                &mut mat,
                row,
                dome.offsets[hidx],
                dome.offsets[hidx + 1] - dome.offsets[hidx],
                1,
            );
            // fuse adjacent arrows
            for i in 1..=n {
                let mut fused = Vec::with_capacity(n);
                fused.extend_from_slice(&chain[..i - 1]);
                fused.push(cat.comp(chain[i], chain[i - 1]).expect("composable chain"));
                fused.extend_from_slice(&chain[i + 1..]);
                let fidx = dome.index[&fused];
                let sign = if i % 2 == 0 { 1 } else { -1 };
                add_identity(
                    &mut mat,
                    row,
                    dome.offsets[fidx],
                    dome.offsets[fidx + 1] - dome.offsets[fidx],
                    sign,
                );
            }
            // drop the last arrow and push its value forward
            let tail = chain[..n].to_vec();
            let tidx = dome.index[&tail];
            let sign = if (n + 1) % 2 == 0 { 1 } else { -1 };
            add_block(
                &mut mat,
                row,
                dome.offsets[tidx],
                self.inner.coeff.hom(chain[n]).mat(),
                sign,
            );
        }
        Ok(AbHom::new_unchecked(dome.group.clone(), target.group.clone(), mat))
    }

    pub fn zero_cochain(&self, degree: usize) -> Result<Cochain> {
        let data = self.degree_data(degree)?;
        let values = data.ends.iter().map(|&y| self.inner.coeff.group(y).zero()).collect();
        Ok(Cochain { cx: self.clone(), degree, values })
    }

    /// Builds a cochain from per-cell values given in chain enumeration
    /// order (object order at degree 0). Values are canonicalized.
    pub fn cochain_from_values(&self, degree: usize, values: Vec<AbVec>) -> Result<Cochain> {
        let data = self.degree_data(degree)?;
        if values.len() != data.ends.len() {
            return Err(Error::Malformed(format!(
                "expected {} values at degree {}, got {}",
                data.ends.len(),
                degree,
                values.len()
            )));
        }
        let mut canon = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            let g = self.inner.coeff.group(data.ends[i]);
            if v.len() != g.ngens() {
                return Err(Error::Malformed(format!(
                    "value {} has length {}, coefficient group there has {} generators",
                    i,
                    v.len(),
                    g.ngens()
                )));
            }
            canon.push(g.canon(&v));
        }
        Ok(Cochain { cx: self.clone(), degree, values: canon })
    }

    /// Builds a degree `n >= 1` cochain from sparse `(chain, value)` entries;
    /// unlisted chains get zero.
    pub fn cochain_from_entries(&self, degree: usize, entries: &[(Vec<MorId>, AbVec)]) -> Result<Cochain> {
        if degree == 0 {
            return Err(Error::Malformed(
                "degree-0 cochains are indexed by objects, not chains".into(),
            ));
        }
        let data = self.degree_data(degree)?;
        let mut values: Vec<AbVec> =
            data.ends.iter().map(|&y| self.inner.coeff.group(y).zero()).collect();
        for (chain, v) in entries {
            let idx = *data.index.get(chain).ok_or_else(|| {
                Error::Malformed(format!("{:?} is not a composable {}-chain", chain, degree))
            })?;
            values[idx] = v.clone();
        }
        self.cochain_from_values(degree, values)
    }

    /// Builds a degree-0 cochain from sparse `(object, value)` entries.
    pub fn cochain_from_object_entries(&self, entries: &[(ObjId, AbVec)]) -> Result<Cochain> {
        let data = self.degree_data(0)?;
        let mut values: Vec<AbVec> =
            data.ends.iter().map(|&y| self.inner.coeff.group(y).zero()).collect();
        for (x, v) in entries {
            if *x >= values.len() {
                return Err(Error::Malformed(format!("no object {}", x)));
            }
            values[*x] = v.clone();
        }
        self.cochain_from_values(0, values)
    }

    fn flatten(&self, u: &Cochain) -> Result<AbVec> {
        let data = self.degree_data(u.degree)?;
        let mut out = Vec::with_capacity(*data.offsets.last().unwrap());
        for v in &u.values {
            out.extend_from_slice(v);
        }
        Ok(out)
    }

    fn unflatten(&self, degree: usize, x: &[BigInt]) -> Result<Cochain> {
        let data = self.degree_data(degree)?;
        let values = (0..data.ends.len())
            .map(|i| x[data.offsets[i]..data.offsets[i + 1]].to_vec())
            .collect();
        self.cochain_from_values(degree, values)
    }

    /// Applies the differential to `u`.
    pub fn differential(&self, u: &Cochain) -> Result<Cochain> {
        let d = self.delta(u.degree)?;
        let y = d.apply(&self.flatten(u)?);
        self.unflatten(u.degree + 1, &y)
    }

    pub fn is_cocycle(&self, u: &Cochain) -> Result<bool> {
        Ok(self.differential(u)?.is_zero())
    }

    /// Kernel modulo image at degree `n`, with representative cocycles for
    /// each cyclic summand of the answer.
    pub fn cohomology(&self, n: usize) -> Result<Cohomology> {
        if n > self.inner.budget.max_degree {
            return Err(Error::Refused(format!(
                "cohomology in degree {} is beyond the configured maximum {}; \
                 the complex would need about {} generator columns at degree {}",
                n,
                self.inner.budget.max_degree,
                self.cell_estimate(n + 1),
                n + 1
            )));
        }
        let dn = self.delta(n)?.clone();
        let (kgrp, incl) = dn.kernel();
        let h = if n == 0 {
            AbHom::zero_hom(&PresentedAbGroup::trivial(), &kgrp)
        } else {
            let dprev = self.delta(n - 1)?;
            let solver = incl.solver();
            let mut cols = Vec::with_capacity(dprev.src().ngens());
            for j in 0..dprev.src().ngens() {
                let y = dprev.mat().col(j);
                let x = solver.solve(&y).ok_or_else(|| {
                    Error::Invalid(
                        "coefficient functor is not functorial: a coboundary \
                         fell outside the cocycle group"
                            .into(),
                    )
                })?;
                cols.push(x);
            }
            AbHom::new_unchecked(
                dprev.src().clone(),
                kgrp.clone(),
                Mat::from_cols(kgrp.ngens(), &cols),
            )
        };
        let (hgrp, proj) = h.cokernel();
        let mut gens = Vec::new();
        for (_order, xh) in hgrp.smith_generators() {
            let rep = self.unflatten(n, &incl.apply(&xh))?;
            gens.push(CohomologyClass {
                degree: n,
                group: hgrp.clone(),
                coords: hgrp.canon(&xh),
                rep,
            });
        }
        Ok(Cohomology {
            cx: self.clone(),
            degree: n,
            group: hgrp,
            incl_solver: incl.solver(),
            incl,
            proj,
            gens,
        })
    }

    /// Finds `u` of degree `n - 1` with `du = b - a`, if one exists. The
    /// witness is the solver's canonical one: free coordinates zero, pivot
    /// coordinates least nonnegative.
    pub fn cohomologous(&self, a: &Cochain, b: &Cochain) -> Result<Option<Cochain>> {
        if a.degree != b.degree {
            return Err(Error::Malformed(format!(
                "degree mismatch: {} vs {}",
                a.degree, b.degree
            )));
        }
        if a.degree == 0 {
            return Err(Error::Malformed(
                "cohomologous needs degree at least 1".into(),
            ));
        }
        if !self.is_cocycle(a)? || !self.is_cocycle(b)? {
            return Err(Error::Invalid("both inputs must be cocycles".into()));
        }
        let dprev = self.delta(a.degree - 1)?;
        let fa = self.flatten(a)?;
        let fb = self.flatten(b)?;
        let diff: AbVec = fb.iter().zip(fa.iter()).map(|(x, y)| x - y).collect();
        match dprev.solve(&diff) {
            None => Ok(None),
            Some(u) => Ok(Some(self.unflatten(a.degree - 1, &u)?)),
        }
    }

    /// Pulls `z` back along `psi` into this complex, whose coefficients must
    /// be `z`'s coefficients precomposed with `psi`: the value at a chain is
    /// `z`'s value at the image chain.
    pub fn pullback(&self, psi: &CatFunctor, z: &Cochain) -> Result<Cochain> {
        if psi.src() != self.inner.coeff.base() || psi.dst() != z.cx.inner.coeff.base() {
            return Err(Error::Malformed("functor endpoints do not match the complexes".into()));
        }
        let n = z.degree;
        let data = self.degree_data(n)?;
        let mut values = Vec::with_capacity(data.ends.len());
        if n == 0 {
            for x in 0..data.ends.len() {
                values.push(z.value_on_object(psi.ob(x))?.clone());
            }
        } else {
            for chain in &data.chains {
                let image: Vec<MorId> = chain.iter().map(|&c| psi.mor(c)).collect();
                values.push(z.value_on_chain(&image)?.clone());
            }
        }
        self.cochain_from_values(n, values)
    }

    /// Applies a natural transformation to `z` valuewise; this complex must
    /// sit over the same base with `eta`'s target coefficients.
    pub fn pushforward(&self, eta: &NatTrans, z: &Cochain) -> Result<Cochain> {
        if z.cx.inner.coeff.base() != self.inner.coeff.base() {
            return Err(Error::Malformed("cochain lives over a different base category".into()));
        }
        let n = z.degree;
        let data = self.degree_data(n)?;
        let values = z
            .values
            .iter()
            .zip(data.ends.iter())
            .map(|(v, &y)| eta.component(y).apply(v))
            .collect();
        self.cochain_from_values(n, values)
    }

    /// Shifts a 2-cocycle by a coboundary so that it vanishes on every chain
    /// containing an identity. Returns the shifted cocycle and the shifting
    /// 1-cochain `u` with `z' = z + du`; `u` is determined by the values of
    /// `z` on identity pairs, so an already regular cocycle comes back
    /// unchanged with `u = 0`.
    pub fn regularize_2cocycle(&self, z: &Cochain) -> Result<(Cochain, Cochain)> {
        if z.degree != 2 {
            return Err(Error::Malformed("regularization applies to 2-cochains".into()));
        }
        if !self.is_cocycle(z)? {
            return Err(Error::Invalid("input is not a cocycle".into()));
        }
        let cat = self.inner.coeff.base();
        let d1 = self.degree_data(1)?;
        let d2 = self.degree_data(2)?;
        let mut uvals: Vec<AbVec> = Vec::with_capacity(d1.ends.len());
        for chain in &d1.chains {
            let y = cat.dst(chain[0]);
            let idy = cat.identity_of(y);
            let pair = d2.index[&vec![idy, idy]];
            let g = self.inner.coeff.group(y);
            uvals.push(g.neg(&z.values[pair]));
        }
        let u = self.cochain_from_values(1, uvals)?;
        let zp = z.add(&self.differential(&u)?)?;
        for (t, chain) in d2.chains.iter().enumerate() {
            if cat.is_identity(chain[0]) || cat.is_identity(chain[1]) {
                debug_assert!(
                    self.inner.coeff.group(d2.ends[t]).is_zero(&zp.values[t]),
                    "regularized cocycle still hits an identity pair"
                );
            }
        }
        Ok((zp, u))
    }
}

/// A single cochain: one canonical coefficient value per chain, stored in
/// chain enumeration order (object order at degree 0).
#[derive(Clone)]
pub struct Cochain {
    cx: CochainComplex,
    degree: usize,
    values: Vec<AbVec>,
}

impl Cochain {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.cx
    }

    pub fn values(&self) -> &[AbVec] {
        &self.values
    }

    pub fn value_on_chain(&self, chain: &[MorId]) -> Result<&AbVec> {
        if self.degree == 0 {
            return Err(Error::Malformed(
                "degree-0 cochains are indexed by objects".into(),
            ));
        }
        let data = self.cx.degree_data(self.degree)?;
        let idx = data.index.get(chain).ok_or_else(|| {
            Error::Malformed(format!(
                "{:?} is not a composable {}-chain",
                chain, self.degree
            ))
        })?;
        Ok(&self.values[*idx])
    }

    pub fn value_on_object(&self, x: ObjId) -> Result<&AbVec> {
        if self.degree != 0 {
            return Err(Error::Malformed("only degree-0 cochains are indexed by objects".into()));
        }
        self.values.get(x).ok_or_else(|| Error::Malformed(format!("no object {}", x)))
    }

    pub fn is_zero(&self) -> bool {
        let data = self.cx.degree_data(self.degree).expect("own degree is built");
        self.values
            .iter()
            .enumerate()
            .all(|(i, v)| self.cx.inner.coeff.group(data.ends[i]).is_zero(v))
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.combine(other, |g, a, b| g.add(a, b))
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.combine(other, |g, a, b| g.sub(a, b))
    }

    fn combine(
        &self,
        other: &Cochain,
        op: impl Fn(&PresentedAbGroup, &[BigInt], &[BigInt]) -> AbVec,
    ) -> Result<Cochain> {
        if self.degree != other.degree {
            return Err(Error::Malformed(format!(
                "degree mismatch: {} vs {}",
                self.degree, other.degree
            )));
        }
        let data = self.cx.degree_data(self.degree)?;
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .enumerate()
            .map(|(i, (a, b))| op(self.cx.inner.coeff.group(data.ends[i]), a, b))
            .collect();
        Ok(Cochain { cx: self.cx.clone(), degree: self.degree, values })
    }

    pub fn smul(&self, c: &BigInt) -> Cochain {
        let data = self.cx.degree_data(self.degree).expect("own degree is built");
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| self.cx.inner.coeff.group(data.ends[i]).smul(c, v))
            .collect();
        Cochain { cx: self.cx.clone(), degree: self.degree, values }
    }

    /// Nonzero entries as `(chain, value)` pairs in chain order; degree 0
    /// reports `(object id, value)` through [`Self::object_entries`] instead.
    pub fn entries(&self) -> Result<Vec<(Vec<MorId>, AbVec)>> {
        if self.degree == 0 {
            return Err(Error::Malformed(
                "degree-0 cochains are indexed by objects".into(),
            ));
        }
        let data = self.cx.degree_data(self.degree)?;
        Ok(data
            .chains
            .iter()
            .zip(self.values.iter())
            .enumerate()
            .filter(|(i, (_, v))| !self.cx.inner.coeff.group(data.ends[*i]).is_zero(v))
            .map(|(_, (c, v))| (c.clone(), v.clone()))
            .collect())
    }

    pub fn object_entries(&self) -> Result<Vec<(ObjId, AbVec)>> {
        if self.degree != 0 {
            return Err(Error::Malformed("only degree-0 cochains are indexed by objects".into()));
        }
        let data = self.cx.degree_data(0)?;
        Ok(self
            .values
            .iter()
            .enumerate()
            .filter(|(i, v)| !self.cx.inner.coeff.group(data.ends[*i]).is_zero(v))
            .map(|(i, v)| (i, v.clone()))
            .collect())
    }
}

/// Values are stored canonically, so cochains over the same complex compare
/// by content.
impl PartialEq for Cochain {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.values == other.values
    }
}
impl Eq for Cochain {}

impl std::fmt::Debug for Cochain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cochain(deg {}, {:?})", self.degree, self.values)
    }
}

/// Cohomology at one degree: the group, representative cocycles for its
/// cyclic summands, and a classifier for arbitrary cocycles.
pub struct Cohomology {
    cx: CochainComplex,
    degree: usize,
    group: PresentedAbGroup,
    incl: AbHom,
    incl_solver: PreimageSolver,
    proj: AbHom,
    gens: Vec<CohomologyClass>,
}

impl Cohomology {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn group(&self) -> &PresentedAbGroup {
        &self.group
    }

    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.group.invariant_factors()
    }

    pub fn is_trivial(&self) -> bool {
        self.group.is_trivial()
    }

    /// One class per cyclic summand, matching
    /// [`PresentedAbGroup::invariant_factors`] order.
    pub fn generators(&self) -> &[CohomologyClass] {
        &self.gens
    }

    /// The class of a cocycle. Rejects non-cocycles.
    pub fn class_of(&self, z: &Cochain) -> Result<CohomologyClass> {
        if z.degree != self.degree {
            return Err(Error::Malformed(format!(
                "degree mismatch: cocycle has {}, cohomology is in {}",
                z.degree, self.degree
            )));
        }
        let flat = self.cx.flatten(z)?;
        let k = self
            .incl_solver
            .solve(&flat)
            .ok_or_else(|| Error::Invalid("input is not a cocycle".into()))?;
        Ok(CohomologyClass {
            degree: self.degree,
            group: self.group.clone(),
            coords: self.proj.apply(&k),
            rep: z.clone(),
        })
    }

    pub fn zero_class(&self) -> Result<CohomologyClass> {
        let z = self.cx.zero_cochain(self.degree)?;
        Ok(CohomologyClass {
            degree: self.degree,
            group: self.group.clone(),
            coords: self.group.zero(),
            rep: z,
        })
    }

    /// A cocycle representing prescribed coordinates in the cohomology
    /// group's presentation.
    pub fn rep_of_coords(&self, coords: &[BigInt]) -> Result<Cochain> {
        if coords.len() != self.group.ngens() {
            return Err(Error::Malformed(format!(
                "expected {} coordinates, got {}",
                self.group.ngens(),
                coords.len()
            )));
        }
        self.cx.unflatten(self.degree, &self.incl.apply(coords))
    }
}

/// An element of a cohomology group, carrying its canonical coordinates and
/// one representative cocycle.
#[derive(Clone)]
pub struct CohomologyClass {
    degree: usize,
    group: PresentedAbGroup,
    coords: AbVec,
    rep: Cochain,
}

impl CohomologyClass {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn group(&self) -> &PresentedAbGroup {
        &self.group
    }

    pub fn coords(&self) -> &AbVec {
        &self.coords
    }

    pub fn representative(&self) -> &Cochain {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.group.is_zero(&self.coords)
    }

    /// Order of the class, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.group.element_order(&self.coords)
    }

    /// The class multiplied by the integer scalar `c`.
    pub fn smul(&self, c: &BigInt) -> CohomologyClass {
        CohomologyClass {
            degree: self.degree,
            group: self.group.clone(),
            coords: self.group.canon(&self.group.smul(c, &self.coords)),
            rep: self.rep.smul(c),
        }
    }
}

impl PartialEq for CohomologyClass {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.coords == other.coords
    }
}
impl Eq for CohomologyClass {}

impl std::fmt::Debug for CohomologyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CohomologyClass(deg {}, coords {:?})", self.degree, self.coords)
    }
}
