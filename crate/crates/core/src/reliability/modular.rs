//! Residue arithmetic for exact cut-set counts.
//!
//! Counts are bounded by `2^m`, so they are recovered from residues modulo
//! `2^128` (plain wrapping `u128`) and, for `m > 127`, a handful of primes
//! just below `2^62`, glued back together by CRT.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// A coefficient ring: wrapping `u128` or `Z/pZ` for a prime `p < 2^63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Modulus {
    Pow2_128,
    Prime(u64),
}

impl Modulus {
    #[inline]
    pub fn add(self, a: u128, b: u128) -> u128 {
        match self {
            Modulus::Pow2_128 => a.wrapping_add(b),
            Modulus::Prime(p) => {
                let s = a + b;
                if s >= p as u128 {
                    s - p as u128
                } else {
                    s
                }
            }
        }
    }

    #[inline]
    pub fn mul(self, a: u128, b: u128) -> u128 {
        match self {
            Modulus::Pow2_128 => a.wrapping_mul(b),
            Modulus::Prime(p) => (a * b) % p as u128,
        }
    }

    pub fn to_biguint(self) -> BigUint {
        match self {
            Modulus::Pow2_128 => BigUint::one() << 128u32,
            Modulus::Prime(p) => BigUint::from(p),
        }
    }

    /// Pascal triangle rows `0..=m` reduced by this modulus.
    pub fn binomials(self, m: usize) -> Vec<Vec<u128>> {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(m + 1);
        for r in 0..=m {
            let mut row = vec![1u128; r + 1];
            for k in 1..r {
                row[k] = self.add(rows[r - 1][k - 1], rows[r - 1][k]);
            }
            rows.push(row);
        }
        rows
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub(crate) fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Moduli whose product exceeds `2^m`.
pub(crate) fn moduli_for(m: usize) -> Vec<Modulus> {
    let mut out = vec![Modulus::Pow2_128];
    let mut bits = 128usize;
    let mut candidate = (1u64 << 62) - 1;
    while bits <= m {
        while !is_prime(candidate) {
            candidate -= 2;
        }
        out.push(Modulus::Prime(candidate));
        bits += 61;
        candidate -= 2;
    }
    out
}

/// Combines residues `r[i] mod moduli[i]` into the unique value below the
/// product of the moduli.
pub(crate) fn crt(residues: &[u128], moduli: &[Modulus]) -> BigUint {
    let mut value = BigUint::from(residues[0]);
    let mut product = moduli[0].to_biguint();
    for (&r, &m) in residues.iter().zip(moduli).skip(1) {
        let Modulus::Prime(p) = m else {
            unreachable!("only the first modulus is a power of two")
        };
        let big_p = BigUint::from(p);
        let current = (&value % &big_p).iter_u64_digits().next().unwrap_or(0);
        let prod_mod = (&product % &big_p).iter_u64_digits().next().unwrap_or(0);
        let inv = pow_mod(prod_mod, p - 2, p);
        let diff = (r as u64 + p - current) % p;
        let step = mul_mod(diff, inv, p);
        value += &product * BigUint::from(step);
        product *= big_p;
    }
    debug_assert!(value < product || product.is_zero());
    value
}
