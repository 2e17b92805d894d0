//! Dense polynomials over `F_p`, coefficients stored low degree first.

use crate::modring::inv_mod;

pub(crate) type Poly = Vec<u64>;

pub(crate) fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo `m` (`m` non-zero).
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Poly {
    let mut a = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p).expect("nonzero leading coefficient");
    while a.len() > dm {
        let da = a.len() - 1;
        let c = a[da] * lead_inv % p;
        if c != 0 {
            for i in 0..=dm {
                let idx = da - dm + i;
                a[idx] = (a[idx] + p - c * m[i] % p) % p;
            }
        }
        a.pop();
        a = trim(a);
    }
    a
}

pub(crate) fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Poly {
    let mut acc = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &b, m, p);
        }
        b = mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            out.push(d);
            while x.is_multiple_of(d) {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

/// Rabin's test: a monic `f` of degree `k` is irreducible over `F_p` iff
/// `x^(p^k) ≡ x (mod f)` and `gcd(x^(p^(k/r)) - x, f) = 1` for every prime
/// `r | k`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    if f.len() < 2 {
        return false;
    }
    let k = (f.len() - 1) as u64;
    if k == 1 {
        return true;
    }
    let x: Poly = vec![0, 1];
    // frob[i] = x^(p^i) mod f
    let mut frob = vec![rem(&x, &f, p)];
    for i in 1..=k as usize {
        let next = powmod(&frob[i - 1], p, &f, p);
        frob.push(next);
    }
    if sub(&frob[k as usize], &x, p) != Vec::<u64>::new() {
        return false;
    }
    prime_factors(k).into_iter().all(|r| {
        let h = sub(&frob[(k / r) as usize], &x, p);
        let g = gcd(&h, &f, p);
        g.len() == 1
    })
}

/// Evaluates `f` at a constant `x ∈ F_p`.
#[cfg(test)]
pub(crate) fn eval_const(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| (acc * x + c) % p)
}

pub(crate) fn monic_from_lower(lower: &[u64]) -> Poly {
    let mut f = lower.to_vec();
    f.push(1);
    f
}
