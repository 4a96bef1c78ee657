//! Truncated p-adic unit arithmetic: congruence filtration membership,
//! Teichmuller representatives, torsion units, and class orders.
//!
//! Every value carries its precision `k` explicitly. Operations that would
//! need more precision than their inputs carry fail loudly instead of
//! extending silently.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A unit of `Z/p^k`: an integer in `[1, p^k)` coprime to `p`, tagged with
/// its prime and precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnitModPk {
    pub p: u64,
    pub k: u32,
    pub residue: u64,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_u64(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("modulus overflow")
}

fn powmod(b: u64, mut e: u64, q: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut bb: u128 = (b % q) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % q as u128;
        }
        bb = bb * bb % q as u128;
        e >>= 1;
    }
    acc as u64
}

impl UnitModPk {
    /// Checked constructor; `residue` is reduced mod `p^k` first.
    pub fn new(p: u64, k: u32, residue: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Malformed(format!("p = {p} is not prime")));
        }
        if k == 0 {
            return Err(Error::Malformed("precision k must be at least 1".into()));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= 1 << 32)
            .ok_or_else(|| Error::Malformed(format!("p^k = {p}^{k} is out of range")))?;
        let residue = residue.rem_euclid(q as i64) as u64;
        if residue % p == 0 {
            return Err(Error::Malformed(format!("{residue} is not a unit mod {p}^{k}")));
        }
        Ok(UnitModPk { p, k, residue })
    }

    pub fn one(p: u64, k: u32) -> Result<Self> {
        Self::new(p, k, 1)
    }

    pub fn modulus(&self) -> u64 {
        pow_u64(self.p, self.k)
    }

    pub fn is_one(&self) -> bool {
        self.residue == 1
    }

    /// The residue at a coarser precision `m <= k`.
    pub fn residue_mod(&self, m: u32) -> Result<u64> {
        if m > self.k {
            return Err(Error::Refused(format!(
                "cannot decide at precision {m}: value only carries precision {}",
                self.k
            )));
        }
        Ok(self.residue % pow_u64(self.p, m))
    }

    pub fn mul(&self, other: &UnitModPk) -> Result<UnitModPk> {
        if self.p != other.p || self.k != other.k {
            return Err(Error::Malformed("unit precision mismatch".into()));
        }
        let q = self.modulus();
        Ok(UnitModPk { residue: (self.residue as u128 * other.residue as u128 % q as u128) as u64, ..*self })
    }

    pub fn pow(&self, e: u64) -> UnitModPk {
        UnitModPk { residue: powmod(self.residue, e, self.modulus()), ..*self }
    }

    pub fn inv(&self) -> UnitModPk {
        // The unit group mod p^k has order phi = p^(k-1)(p-1).
        let phi = pow_u64(self.p, self.k - 1) * (self.p - 1);
        self.pow(phi - 1)
    }

    /// Largest `m <= k` with `residue = 1 mod p^m`.
    pub fn gamma_level(&self) -> u32 {
        let mut m = 0;
        while m < self.k && (self.residue - 1) % pow_u64(self.p, m + 1) == 0 {
            m += 1;
        }
        m
    }

    /// Is the unit congruent to 1 mod `p^m`? Needs `m <= k`.
    pub fn gamma_membership(&self, m: u32) -> Result<bool> {
        if m > self.k {
            return Err(Error::Refused(format!(
                "cannot decide membership at depth {m} from precision {}",
                self.k
            )));
        }
        Ok(self.residue % pow_u64(self.p, m) == 1 % pow_u64(self.p, m))
    }

    /// Multiplicative order of the class mod `p^m`, `m <= k`.
    pub fn class_order(&self, m: u32) -> Result<u64> {
        if m > self.k {
            return Err(Error::Refused(format!(
                "cannot decide order at depth {m} from precision {}",
                self.k
            )));
        }
        if m == 0 {
            return Ok(1);
        }
        let q = pow_u64(self.p, m);
        let u = self.residue % q;
        let phi = pow_u64(self.p, m - 1) * (self.p - 1);
        let mut order = phi;
        for f in prime_factors(phi) {
            while order % f == 0 && powmod(u, order / f, q) == 1 {
                order /= f;
            }
        }
        Ok(order)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Teichmuller representative of `a mod p` at precision `k`, for odd `p`:
/// the unique unit congruent to `a` mod `p` with `w^(p-1) = 1 mod p^k`,
/// computed as `a^(p^(k-1))`.
pub fn teichmuller(a: i64, p: u64, k: u32) -> Result<UnitModPk> {
    if p == 2 {
        return Err(Error::Malformed(
            "teichmuller lifting requires odd p; the torsion units at p = 2 are just 1 and -1".into(),
        ));
    }
    let u = UnitModPk::new(p, k, a)?;
    Ok(u.pow(pow_u64(p, k - 1)))
}

/// The torsion subgroup of the truncated units: `{1, -1}` for `p = 2`, the
/// `p - 1` Teichmuller representatives for odd `p`. Ascending residues.
pub fn torsion_units(p: u64, k: u32) -> Result<Vec<UnitModPk>> {
    if p == 2 {
        let one = UnitModPk::new(2, k, 1)?;
        let minus = UnitModPk::new(2, k, -1)?;
        let mut out = vec![one];
        if minus.residue != 1 {
            out.push(minus);
        }
        return Ok(out);
    }
    let mut out: Vec<UnitModPk> = (1..p as i64).map(|a| teichmuller(a, p, k)).collect::<Result<_>>()?;
    out.sort_by_key(|u| u.residue);
    Ok(out)
}
