//! Fixture builders shared by the integration test targets.
#![allow(dead_code)]

use catext::fincat::FinCat;

/// Total order 0 < 1 < ... < n-1 as a category; morphism ids enumerate the
/// pairs (x, y) with x <= y in lexicographic order.
pub fn chain_poset(n: usize) -> FinCat {
    let objects: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in x..n {
            pairs.push((x, y));
        }
    }
    let idx = |x: usize, y: usize| pairs.iter().position(|&p| p == (x, y)).unwrap();
    let morphisms: Vec<(usize, usize, usize)> =
        pairs.iter().enumerate().map(|(i, &(x, y))| (i, x, y)).collect();
    let identity: Vec<(usize, usize)> = (0..n).map(|x| (x, idx(x, x))).collect();
    let mut comp = Vec::new();
    for (g, &(y2, z)) in pairs.iter().enumerate() {
        for (f, &(x, y)) in pairs.iter().enumerate() {
            if y == y2 {
                comp.push((g, f, idx(x, z)));
            }
        }
    }
    FinCat::new(objects, &morphisms, &identity, &comp).unwrap()
}

/// Multiplication table of the symmetric group on three letters, elements in
/// lexicographic one-line order, (g*f)(x) = g(f(x)).
pub fn s3_table() -> Vec<Vec<usize>> {
    let perms: Vec<[usize; 3]> =
        vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let compose = |g: &[usize; 3], f: &[usize; 3]| -> [usize; 3] { [g[f[0]], g[f[1]], g[f[2]]] };
    perms
        .iter()
        .map(|g| {
            perms
                .iter()
                .map(|f| {
                    let gf = compose(g, f);
                    perms.iter().position(|p| *p == gf).unwrap()
                })
                .collect()
        })
        .collect()
}

/// Dihedral group of order 8: element r^a s^b stored as id 2a + b.
pub fn d4_table() -> Vec<Vec<usize>> {
    let e = |a: usize, b: usize| 2 * (a % 4) + (b % 2);
    let mut t = vec![vec![0usize; 8]; 8];
    for a1 in 0..4 {
        for b1 in 0..2 {
            for a0 in 0..4 {
                for b0 in 0..2 {
                    let a = if b1 == 1 { (a1 + 4 - a0) % 4 } else { (a1 + a0) % 4 };
                    t[e(a1, b1)][e(a0, b0)] = e(a, b1 + b0);
                }
            }
        }
    }
    t
}

/// Quaternion group of order 8: element i^a j^b stored as id 2a + b.
pub fn q8_table() -> Vec<Vec<usize>> {
    let e = |a: usize, b: usize| 2 * (a % 4) + (b % 2);
    let mut t = vec![vec![0usize; 8]; 8];
    for a1 in 0..4 {
        for b1 in 0..2 {
            for a0 in 0..4 {
                for b0 in 0..2 {
                    let mut a = if b1 == 1 { a1 + 4 - a0 } else { a1 + a0 };
                    if b1 == 1 && b0 == 1 {
                        a += 2;
                    }
                    t[e(a1, b1)][e(a0, b0)] = e(a % 4, b1 + b0);
                }
            }
        }
    }
    t
}

/// Identity and inverse tables of a group given by its multiplication table.
pub fn group_identity(table: &[Vec<usize>]) -> usize {
    let n = table.len();
    (0..n).find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x)).unwrap()
}

pub fn group_inverses(table: &[Vec<usize>]) -> Vec<usize> {
    let e = group_identity(table);
    (0..table.len())
        .map(|x| (0..table.len()).find(|&y| table[x][y] == e).unwrap())
        .collect()
}

fn raw_pow(table: &[Vec<usize>], e: usize, x: usize, n: u64) -> usize {
    let mut acc = e;
    for _ in 0..n {
        acc = table[acc][x];
    }
    acc
}

/// Enumerates, straight off the multiplication table, every automorphism
/// that is the identity on the quotient by `torus` and restricts to the
/// torus as a power map `t -> t^zeta` with `zeta` prime to `p`. Candidates
/// are generated by choosing images of `gens` inside their own torus
/// cosets (forced by triviality on the quotient), closing multiplicatively,
/// and checking the homomorphism property on all pairs. Returns the
/// automorphisms as permutations of the element indices.
pub fn raw_normal_adams_perms(
    table: &[Vec<usize>],
    torus: &[usize],
    gens: &[usize],
    p: u64,
) -> Vec<Vec<usize>> {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
        }
        a
    }
    let n = table.len();
    let e = group_identity(table);
    let inv = group_inverses(table);
    let exponent = torus.iter().fold(1u64, |m, &t| {
        let mut ord = 1u64;
        let mut cur = t;
        while cur != e {
            cur = table[cur][t];
            ord += 1;
        }
        m / gcd(m, ord) * ord
    });
    let tset: std::collections::HashSet<usize> = torus.iter().copied().collect();
    let choices: Vec<Vec<usize>> =
        gens.iter().map(|&g| torus.iter().map(|&t| table[t][g]).collect()).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; gens.len()];
    loop {
        let images: Vec<usize> = pick.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        // Close the partial map multiplicatively from the identity.
        let mut f: Vec<Option<usize>> = vec![None; n];
        f[e] = Some(e);
        let mut frontier = vec![e];
        let mut consistent = true;
        while let Some(s) = frontier.pop() {
            for (gi, &g) in gens.iter().enumerate() {
                let sg = table[s][g];
                let img = table[f[s].unwrap()][images[gi]];
                match f[sg] {
                    None => {
                        f[sg] = Some(img);
                        frontier.push(sg);
                    }
                    Some(prev) if prev != img => consistent = false,
                    _ => {}
                }
            }
        }
        if consistent && f.iter().all(|v| v.is_some()) {
            let f: Vec<usize> = f.into_iter().map(|v| v.unwrap()).collect();
            let mut seen = vec![false; n];
            let bijective = f.iter().all(|&img| !std::mem::replace(&mut seen[img], true));
            let hom =
                bijective && (0..n).all(|a| (0..n).all(|b| f[table[a][b]] == table[f[a]][f[b]]));
            let quotient_ok = hom && (0..n).all(|s| tset.contains(&table[f[s]][inv[s]]));
            let scalar = quotient_ok
                && (1..=exponent)
                    .filter(|&z| gcd(z, p) == 1)
                    .any(|z| torus.iter().all(|&t| f[t] == raw_pow(table, e, t, z)));
            if scalar {
                out.push(f);
            }
        }
        // Odometer over the choice vectors.
        let mut i = 0;
        loop {
            if i == pick.len() {
                return out;
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}
