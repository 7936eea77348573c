//! Optimal embedding numbers e_{D,N}(disc) of quadratic orders into Eichler
//! orders, and the congruence deciders for simultaneous embeddings.
//!
//! D and N here are the discriminant and level of the order; D may have
//! either parity of prime count, callers enforce which one they need.
//! The deciders return the 1-based index of the first clause that holds,
//! so certificates can name it.

use std::fmt;

use num_integer::Integer;

use crate::arith::{is_squarefree, kronecker, prime_divisors};
use crate::error::{invalid, Result};
use crate::quad::{class_data, eichler_symbol};

/// A squarefree coprime pair (D, N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EichlerPair {
    d: u64,
    n: u64,
}

impl EichlerPair {
    pub fn new(d: u64, n: u64) -> Result<Self> {
        if d == 0 || n == 0 || !is_squarefree(d as i64) || !is_squarefree(n as i64) {
            return invalid(format!("D = {d} and N = {n} must be positive and squarefree"));
        }
        if d.gcd(&n) != 1 {
            return invalid(format!("D = {d} and N = {n} must be coprime"));
        }
        Ok(Self { d, n })
    }

    pub fn disc(&self) -> u64 {
        self.d
    }

    pub fn level(&self) -> u64 {
        self.n
    }
}

impl fmt::Display for EichlerPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(D={}, N={})", self.d, self.n)
    }
}

/// e/w as an exact multiple of 1/12.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EmbeddingWeight {
    twelfths: u64,
}

impl EmbeddingWeight {
    pub fn new(e: u64, w: u64) -> Self {
        debug_assert!(matches!(w, 2 | 4 | 6));
        Self { twelfths: e * (12 / w) }
    }

    pub fn twelfths(self) -> u64 {
        self.twelfths
    }

    pub fn is_integral(self) -> bool {
        self.twelfths % 12 == 0
    }
}

impl std::ops::Add for EmbeddingWeight {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { twelfths: self.twelfths + rhs.twelfths }
    }
}

impl fmt::Display for EmbeddingWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.twelfths.gcd(&12).max(1);
        if self.twelfths % 12 == 0 {
            write!(f, "{}", self.twelfths / 12)
        } else {
            write!(f, "{}/{}", self.twelfths / g, 12 / g)
        }
    }
}

/// h(disc) * prod_{p|D} (1 - {disc/p}) * prod_{q|N} (1 + {disc/q}).
pub fn e_weight(pair: EichlerPair, disc: i64) -> Result<u64> {
    let mut e = class_data(disc)?.h;
    for p in prime_divisors(pair.d) {
        e *= (1 - eichler_symbol(disc, p)? as i64) as u64;
        if e == 0 {
            return Ok(0);
        }
    }
    for q in prime_divisors(pair.n) {
        e *= (1 + eichler_symbol(disc, q)? as i64) as u64;
        if e == 0 {
            return Ok(0);
        }
    }
    Ok(e)
}

/// e_{D,N}(disc) from raw integers; validates the pair.
pub fn embeddings(d: u64, n: u64, disc: i64) -> Result<u64> {
    e_weight(EichlerPair::new(d, n)?, disc)
}

/// e/w for the same data.
pub fn embedding_weight(pair: EichlerPair, disc: i64) -> Result<EmbeddingWeight> {
    Ok(EmbeddingWeight::new(e_weight(pair, disc)?, class_data(disc)?.w))
}

fn odd_prime_count(n: u64) -> bool {
    prime_divisors(n).len() % 2 == 1
}

fn check_definite(d: u64, n: u64, m: u64) -> Result<()> {
    EichlerPair::new(d, n)?;
    if !odd_prime_count(d) {
        return invalid(format!("D' = {d} must have an odd number of prime factors"));
    }
    if m <= 1 || (d * n) % m != 0 {
        return invalid(format!("m = {m} must exceed 1 and divide D'N' = {}", d * n));
    }
    Ok(())
}

fn all_primes(n: u64, pred: impl Fn(u64) -> bool) -> bool {
    prime_divisors(n).into_iter().all(pred)
}

/// Whether Z[i] and Z[sqrt(-m)] (Z[zeta_4] when m = 2) embed in a common
/// Eichler order of level N' in the definite algebra of discriminant D'.
pub fn zeta4_coexist(d: u64, n: u64, m: u64) -> Result<bool> {
    check_definite(d, n, m)?;
    let dn = d * n;
    let shape = m == dn || (dn % 2 == 0 && m == dn / 2);
    Ok(shape
        && all_primes(d, |q| q == 2 || q % 4 == 3)
        && all_primes(n, |q| q == 2 || q % 4 == 1))
}

/// The Z[zeta_6] analogue of `zeta4_coexist`; m = 3 is excluded.
pub fn zeta6_coexist(d: u64, n: u64, m: u64) -> Result<bool> {
    check_definite(d, n, m)?;
    if m == 3 {
        return invalid("m = 3 is excluded for the zeta_6 criterion");
    }
    let dn = d * n;
    let shape = m == dn || (dn % 3 == 0 && m == dn / 3);
    Ok(shape
        && all_primes(d, |q| q == 3 || q % 3 == 2)
        && all_primes(n, |q| q == 3 || q % 3 == 1))
}

fn check_indefinite(d: u64, n: u64, p: u64, m: u64, min_m: u64) -> Result<()> {
    EichlerPair::new(d, n)?;
    if odd_prime_count(d) {
        return invalid(format!("D = {d} must have an even number of prime factors"));
    }
    if !crate::arith::is_prime(p) || (d * n) % p == 0 {
        return invalid(format!("p = {p} must be a prime not dividing DN = {}", d * n));
    }
    if m < min_m || (d * n) % m != 0 {
        return invalid(format!("m = {m} must be at least {min_m} and divide DN = {}", d * n));
    }
    Ok(())
}

/// (-p/q) = want for every prime q | n other than those in `skip`.
fn kron_all(p: u64, n: u64, want: i8, skip: u64) -> bool {
    all_primes(n, |q| q == skip || kronecker(-(p as i64), q) == want)
}

/// Simultaneous embeddings of Z[sqrt(-p)] and Z[sqrt(-m)] into an Eichler
/// order of level N in the algebra ramified at Dp, m > 1. Returns the
/// satisfied case number (cases 2a and 2b both report 2).
pub fn simult_good(d: u64, n: u64, p: u64, m: u64) -> Result<Option<usize>> {
    check_indefinite(d, n, p, m, 2)?;
    let dn = d * n;
    let k = |a: u64| kronecker(-(a as i64), p);
    let hit = if p == 2 {
        (m == dn
            && matches!(dn % 8, 3 | 5)
            && all_primes(d, |q| kronecker(-2, q) == -1)
            && all_primes(n, |q| kronecker(-2, q) == 1))
        .then_some(5)
    } else if dn % 2 == 1 {
        (m == dn && kron_all(p, d, -1, 0) && kron_all(p, n, 1, 0) && k(dn) == -1).then_some(1)
    } else if n % 2 == 0 {
        let common = kron_all(p, d, -1, 0) && kron_all(p, n / 2, 1, 0);
        let a = m == dn && k(dn) == -1;
        let b = m == dn / 2 && k(dn / 2) == -1;
        (common && (a || b)).then_some(2)
    } else if k(dn) == -1 {
        (m == dn && kron_all(p, d / 2, -1, 0) && p % 8 != 7 && kron_all(p, n, 1, 0))
            .then_some(3)
    } else {
        (m == dn / 2
            && matches!(dn % 16, 2 | 6 | 10)
            && kron_all(p, d / 2, -1, 0)
            && p % 8 != 7
            && kron_all(p, n, 1, 0))
        .then_some(4)
    };
    Ok(hit)
}

/// Existence of a superspecial surface over F_p fixed by w_m, for p not
/// dividing DN and any m | DN. Clause numbers: 1..=2 when p = 2, 1..=4
/// otherwise.
pub fn superspecial_fixed_fp(d: u64, n: u64, p: u64, m: u64) -> Result<Option<usize>> {
    check_indefinite(d, n, p, m, 1)?;
    let dn = d * n;
    let k = |a: u64| kronecker(-(a as i64), p);
    if p == 2 {
        if m == dn && all_primes(d, |q| q % 4 == 3) && all_primes(n, |q| q % 4 == 1) {
            return Ok(Some(1));
        }
        if m == dn
            && matches!(dn % 8, 3 | 5)
            && all_primes(d, |q| kronecker(-2, q) == -1)
            && all_primes(n, |q| kronecker(-2, q) == 1)
        {
            return Ok(Some(2));
        }
        return Ok(None);
    }
    let pm3 = matches!(p % 8, 3 | 5);
    let clauses = [
        d % 2 == 1 && m == dn && k(dn) == -1 && kron_all(p, d, -1, 0) && kron_all(p, n, 1, 2),
        n % 2 == 0
            && m == dn / 2
            && k(dn / 2) == -1
            && kron_all(p, d, -1, 0)
            && kron_all(p, n, 1, 2),
        d % 2 == 0
            && m == dn
            && pm3
            && k(dn) == -1
            && kron_all(p, d / 2, -1, 0)
            && kron_all(p, n, 1, 0),
        d % 2 == 0
            && m == dn / 2
            && matches!(dn % 16, 2 | 6 | 10)
            && pm3
            && k(dn / 2) == -1
            && kron_all(p, d, -1, 0)
            && kron_all(p, n, 1, 0),
    ];
    Ok(clauses.iter().position(|&c| c).map(|i| i + 1))
}
