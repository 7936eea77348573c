//! Integer primitives: primality, factoring, Kronecker symbols and the
//! splitting of rational primes in quadratic fields.
//!
//! Everything here works on machine integers. Inputs are desk-scale, so
//! factoring is trial division to 10^6 followed by Brent's variant of
//! Pollard rho, with a deterministic Miller-Rabin test for 64-bit inputs.

use std::fmt;

use crate::error::{invalid, Error, Result};

/// Largest integer `factor` accepts.
pub const FACTOR_BOUND: u64 = 1 << 63;

const TRIAL_LIMIT: u64 = 1_000_000;

/// A positive integer with its prime factorization, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    primes: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.primes
    }

    /// The distinct primes, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().map(|&(p, _)| p)
    }

    pub fn omega(&self) -> u32 {
        self.primes.len() as u32
    }

    pub fn is_squarefree(&self) -> bool {
        self.primes.iter().all(|&(_, e)| e == 1)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.primes.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.primes.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// How a rational prime decomposes in a quadratic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplittingType::Split => "split",
            SplittingType::Inert => "inert",
            SplittingType::Ramified => "ramified",
        })
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic for all `u64`: the first twelve primes are a known
/// witness set below 3.3 * 10^24.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's cycle-finding rho. `n` is odd, composite and has no factor
/// below the trial limit.
fn rho(n: u64) -> u64 {
    for c in 1.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho iterates over all increments")
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Prime factorization of `1 <= n < 2^63`.
pub fn factor(n: u64) -> Result<Factorization> {
    if n == 0 {
        return invalid("cannot factor 0");
    }
    if n >= FACTOR_BOUND {
        return Err(Error::OutOfRange(format!("factor({n})"), FACTOR_BOUND));
    }
    let mut primes = Vec::new();
    let mut m = n;
    let mut push = |p: u64, m: &mut u64| {
        let mut e = 0;
        while *m % p == 0 {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            primes.push((p, e));
        }
    };
    push(2, &mut m);
    let mut p = 3;
    while p <= TRIAL_LIMIT && p * p <= m {
        push(p, &mut m);
        p += 2;
    }
    if m > 1 {
        if m < TRIAL_LIMIT * TRIAL_LIMIT || is_prime(m) {
            primes.push((m, 1));
        } else {
            let mut big = Vec::new();
            split_large(m, &mut big);
            big.sort_unstable();
            for q in big {
                match primes.last_mut() {
                    Some((last, e)) if *last == q => *e += 1,
                    _ => primes.push((q, 1)),
                }
            }
        }
    }
    Ok(Factorization { n, primes })
}

/// Distinct prime divisors of `n >= 1`, ascending.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor(n).map(|f| f.primes().collect()).unwrap_or_default()
}

/// False for 0; otherwise true iff no prime square divides `n`.
pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factor(n.unsigned_abs()).is_ok_and(|f| f.is_squarefree())
}

/// All positive divisors, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let f = match factor(n) {
        Ok(f) => f,
        Err(_) => return Vec::new(),
    };
    let mut ds = vec![1u64];
    for &(p, e) in f.pairs() {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// Sum of the positive divisors of `n`.
pub fn sigma1(n: u64) -> u64 {
    divisors(n).iter().sum()
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= n) {
        x += 1;
    }
    x
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Primes `p <= n` by sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut t = 1i8;
    a %= n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        (a, n) = (n, a);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// The Kronecker symbol (a/n) for n >= 1. At 2 it is 0 for even `a` and
/// (-1)^((a^2-1)/8) otherwise; (a/1) = 1.
pub fn kronecker(a: i64, n: u64) -> i8 {
    assert!(n >= 1, "kronecker symbol needs a positive modulus");
    let v = n.trailing_zeros();
    let odd = n >> v;
    let mut t = 1i8;
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            t = -t;
        }
    }
    let a_mod = (a as i128).rem_euclid(odd as i128) as u64;
    t * jacobi(a_mod, odd)
}

/// Discriminant of Q(sqrt d) for squarefree d.
pub fn field_discriminant(d: i64) -> Result<i64> {
    if d == 0 || d == 1 || !is_squarefree(d) {
        return invalid(format!("d = {d} must be squarefree and not 0 or 1"));
    }
    Ok(if d.rem_euclid(4) == 1 { d } else { 4 * d })
}

/// Decomposition of the prime `p` in Q(sqrt d).
pub fn splitting_type(d: i64, p: u64) -> Result<SplittingType> {
    let disc = field_discriminant(d)?;
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    Ok(match kronecker(disc, p) {
        0 => SplittingType::Ramified,
        1 => SplittingType::Split,
        _ => SplittingType::Inert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_examples() {
        assert!(factor(1).unwrap().pairs().is_empty());
        assert_eq!(factor(26).unwrap().pairs(), &[(2, 1), (13, 1)]);
        assert_eq!(factor(312).unwrap().pairs(), &[(2, 3), (3, 1), (13, 1)]);
        assert!(factor(0).is_err());
        assert!(factor(1 << 63).is_err());
    }

    #[test]
    fn factor_beyond_trial_division() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        assert_eq!(factor(p * q).unwrap().pairs(), &[(q, 1), (p, 1)]);
        let big = 4_611_686_018_427_387_847u64; // prime just below 2^62
        assert!(is_prime(big));
        assert_eq!(factor(big).unwrap().pairs(), &[(big, 1)]);
        assert_eq!(factor(3 * 3 * p * p).unwrap().pairs(), &[(3, 2), (p, 2)]);
    }

    #[test]
    fn squarefree_examples() {
        assert!(is_squarefree(1));
        assert!(!is_squarefree(12));
        assert!(is_squarefree(-67));
        assert!(!is_squarefree(0));
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-19, 2), -1);
        assert_eq!(kronecker(-3, 13), 1);
        assert_eq!(kronecker(7, 1), 1);
        assert_eq!(kronecker(-1, 4), 1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in primes_up_to(200).into_iter().filter(|&p| p > 2) {
            for a in -300i64..300 {
                let r = pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
                let euler = match r {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(kronecker(a, p), euler, "({a}/{p})");
            }
        }
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(splitting_type(-67, 2).unwrap(), SplittingType::Inert);
        assert_eq!(splitting_type(5, 5).unwrap(), SplittingType::Ramified);
        assert_eq!(splitting_type(13, 3).unwrap(), SplittingType::Split);
        assert_eq!(splitting_type(3, 2).unwrap(), SplittingType::Ramified);
        assert!(splitting_type(1, 3).is_err());
        assert!(splitting_type(12, 3).is_err());
    }

    #[test]
    fn small_helpers() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(sigma1(6), 12);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert!(is_square(49) && !is_square(50));
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
