//! Helpers shared by the integration targets. Nothing here calls into the
//! library except for prime lists and divisor enumeration.
#![allow(dead_code)]

use num_integer::Integer;
use shimura_local::arith::{is_squarefree, kronecker, prime_divisors};

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Euler's criterion, p odd.
pub fn legendre(a: i64, p: u64) -> i64 {
    let a = a.rem_euclid(p as i64) as u64;
    match pow_mod(a, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

fn eval(coeffs: &[i64], x: i64, p: u64) -> i64 {
    coeffs.iter().rev().fold(0i64, |acc, &c| (acc * x + c).rem_euclid(p as i64))
}

/// Affine solutions of y^2 + h(x) y = f(x) over F_p (coefficients low first).
pub fn affine_count(h: &[i64], f: &[i64], p: u64) -> u64 {
    if p == 2 {
        let mut n = 0;
        for x in 0..2 {
            for y in 0..2 {
                if (y * y + eval(h, x, p) * y - eval(f, x, p)).rem_euclid(2) == 0 {
                    n += 1;
                }
            }
        }
        return n;
    }
    (0..p as i64)
        .map(|x| {
            let hx = eval(h, x, p);
            (1 + legendre(hx * hx + 4 * eval(f, x, p), p)) as u64
        })
        .sum()
}

/// #X_0(23)(F_p) from y^2 + (x^3 + x + 1) y = -2x^5 - 3x^2 + 2x - 2,
/// which has two points at infinity in every characteristic.
pub fn x0_23_model_count(p: u64) -> u64 {
    affine_count(&[1, 1, 0, 1], &[-2, 2, -3, 0, 0, -2], p) + 2
}

/// Primitive reduced forms of discriminant `disc`, by direct search.
pub fn brute_class_number(disc: i64) -> u64 {
    let n = -disc;
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            let num = b * b + n;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    h
}

pub fn field_disc(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 { d } else { 4 * d }
}

/// The first squarefree d (by |d|) in which p splits.
pub fn split_field(p: u64) -> i64 {
    (2..)
        .flat_map(|k: i64| [k, -k])
        .find(|&d| is_squarefree(d) && d % p as i64 != 0 && kronecker(field_disc(d), p) == 1)
        .unwrap()
}

/// Classical criterion for X^D_0(N)(Q_p) when p | D.
pub fn classical_pd_criterion(big_d: u64, big_n: u64, p: u64) -> bool {
    let all = |n: u64, r: u64| prime_divisors(n).into_iter().all(|q| q % 4 == r);
    (p == 2 && all(big_d / 2, 3) && all(big_n, 1)) || (p % 4 == 1 && big_d == 2 * p && big_n == 1)
}

/// All (D, N) with D > 0 a product of an even number of primes, N coprime,
/// DN squarefree and at most `max`.
pub fn curve_pairs(max: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for dn in 1..=max {
        if !is_squarefree(dn as i64) {
            continue;
        }
        for big_d in shimura_local::arith::divisors(dn) {
            if prime_divisors(big_d).len() % 2 == 0 {
                out.push((big_d, dn / big_d));
            }
        }
    }
    out
}
