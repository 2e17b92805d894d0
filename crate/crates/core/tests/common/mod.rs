//! Brute-force oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls into the library's linear algebra.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use abcentral::groupcoh::TableGroup;

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `(p, n)` with `p ≤ bound` prime and `n ≥ 2` dividing `p − 1`.
pub fn prime_field_matrix(bound: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for p in (3..=bound).filter(|&p| is_prime(p)) {
        for n in (2..p).filter(|n| (p - 1) % n == 0) {
            out.push((p, n));
        }
    }
    out
}

/// Subgroup of `(Z/n)^k` generated by `gens`, by breadth-first search.
pub fn closure_znk(n: u64, k: usize, gens: &[Vec<u64>]) -> HashSet<Vec<u64>> {
    let zero = vec![0; k];
    let mut seen = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(v) = queue.pop_front() {
        for g in gens {
            let w: Vec<u64> = v.iter().zip(g).map(|(a, b)| (a + b) % n).collect();
            if seen.insert(w.clone()) {
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Number of elements killed by `d`, counted directly.
pub fn killed_by(set: &HashSet<Vec<u64>>, n: u64, d: u64) -> usize {
    set.iter().filter(|v| v.iter().all(|&x| (x * d).is_multiple_of(n))).count()
}

/// Same count read off invariant factors: `Π gcd(d, a_i)`.
pub fn killed_by_factors(factors: &[u64], d: u64) -> usize {
    factors.iter().map(|&a| gcd(d, a) as usize).product()
}

/// Every vector of `(Z/n)^k`.
pub fn all_vectors(n: u64, k: usize) -> Vec<Vec<u64>> {
    let total = (n as usize).pow(k as u32);
    (0..total)
        .map(|mut i| {
            (0..k)
                .map(|_| {
                    let d = (i % n as usize) as u64;
                    i /= n as usize;
                    d
                })
                .collect()
        })
        .collect()
}

/// All 2-cocycles of the form `ξ(σ,τ) = u(σ) + u(τ) − u(στ)` over `Z/m`,
/// from every cochain `u : G → Z/m`.
pub fn all_coboundaries(g: &TableGroup, m: u64) -> HashSet<Vec<u8>> {
    let order = g.order();
    let total = (m as usize).pow(order as u32);
    let mut out = HashSet::new();
    let mut u = vec![0u64; order];
    for mut i in 0..total {
        for slot in u.iter_mut() {
            *slot = (i % m as usize) as u64;
            i /= m as usize;
        }
        out.insert(coboundary_of(g, m, &u));
    }
    out
}

pub fn coboundary_of(g: &TableGroup, m: u64, u: &[u64]) -> Vec<u8> {
    let order = g.order();
    let mut xi = Vec::with_capacity(order * order);
    for s in 0..order {
        for t in 0..order {
            xi.push(((u[s] + u[t] + m - u[g.mul(s, t)] % m) % m) as u8);
        }
    }
    xi
}

/// `u(στ) = u(σ) + u(τ) − ξ(σ,τ)` at every pair.
pub fn solves(g: &TableGroup, m: u64, xi: &[u64], u: &[u64]) -> bool {
    let order = g.order();
    (0..order).all(|s| (0..order).all(|t| u[g.mul(s, t)] % m == (u[s] + u[t] + m - xi[s * order + t] % m) % m))
}

fn cyclic(m: usize) -> TableGroup {
    TableGroup::from_fn(m, |a, b| (a + b) % m).unwrap()
}

fn product(a: &TableGroup, b: &TableGroup) -> TableGroup {
    let nb = b.order();
    TableGroup::from_fn(a.order() * nb, |x, y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb)).unwrap()
}

/// Dihedral group of order `2m`: element `r^i s^j` stored as `i + m·j`.
fn dihedral(m: usize) -> TableGroup {
    TableGroup::from_fn(2 * m, |x, y| {
        let (i, j) = (x % m, x / m);
        let (k, l) = (y % m, y / m);
        let rot = if j == 0 { (i + k) % m } else { (i + m - k) % m };
        rot + m * ((j + l) % 2)
    })
    .unwrap()
}

/// Quaternion group from unit quaternions `±1, ±i, ±j, ±k`.
fn quaternion() -> TableGroup {
    // (sign, unit) with unit 0..4 = 1, i, j, k
    let mult = |a: usize, b: usize| -> (usize, usize) {
        match (a, b) {
            (0, u) | (u, 0) => (0, u),
            (x, y) if x == y => (1, 0),
            (1, 2) => (0, 3),
            (2, 3) => (0, 1),
            (3, 1) => (0, 2),
            (2, 1) => (1, 3),
            (3, 2) => (1, 1),
            (1, 3) => (1, 2),
            _ => unreachable!(),
        }
    };
    TableGroup::from_fn(8, |x, y| {
        let (s, u) = (x / 4, x % 4);
        let (t, v) = (y / 4, y % 4);
        let (sign, w) = mult(u, v);
        ((s + t + sign) % 2) * 4 + w
    })
    .unwrap()
}

/// Unitriangular 3×3 matrices over `Z/n`, index `(a·n + b)·n + c`.
pub fn heisenberg(n: usize) -> TableGroup {
    TableGroup::from_fn(n * n * n, |x, y| {
        let (a, b, c) = (x / (n * n), (x / n) % n, x % n);
        let (a2, b2, c2) = (y / (n * n), (y / n) % n, y % n);
        (((a + a2) % n) * n + (b + b2) % n) * n + (c + c2 + a * b2) % n
    })
    .unwrap()
}

/// A spread of groups of order at most 16.
pub fn small_groups() -> Vec<(&'static str, TableGroup)> {
    let z2 = cyclic(2);
    let z4 = cyclic(4);
    vec![
        ("Z/2", cyclic(2)),
        ("Z/3", cyclic(3)),
        ("Z/4", cyclic(4)),
        ("(Z/2)^2", product(&z2, &z2)),
        ("S3", dihedral(3)),
        ("Z/6", cyclic(6)),
        ("Z/8", cyclic(8)),
        ("Z/2xZ/4", product(&z2, &z4)),
        ("(Z/2)^3", product(&z2, &product(&z2, &z2))),
        ("D4", dihedral(4)),
        ("Q8", quaternion()),
        ("D6", dihedral(6)),
        ("Z/4xZ/4", product(&z4, &z4)),
        ("(Z/2)^4", product(&product(&z2, &z2), &product(&z2, &z2))),
        ("Z/2xD4", product(&z2, &dihedral(4))),
        ("Z/2xQ8", product(&z2, &quaternion())),
        ("D8", dihedral(8)),
        ("Z/16", cyclic(16)),
    ]
}
