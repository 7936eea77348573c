//! Per-place deciders. Clause lists are evaluated in order and the first
//! clause that holds names the verdict; when none holds the list's
//! catch-all id is emitted with status Empty.

use crate::arith::{field_discriminant, is_prime, prime_divisors};
use crate::error::{invalid, Result};

use super::facts::{Facts, Live};
use super::{Certificate, Place, PlaceVerdict, Status, TwistSpec};

type Outcome = (Status, &'static str);

const fn yes(clause: &'static str) -> Outcome {
    (Status::Nonempty, clause)
}

const fn no(clause: &'static str) -> Outcome {
    (Status::Empty, clause)
}

const fn gap(clause: &'static str) -> Outcome {
    (Status::Unknown, clause)
}

fn all_primes(n: u64, pred: impl Fn(u64) -> bool) -> bool {
    prime_divisors(n).into_iter().all(pred)
}

/// (a / q) = want for every prime q | n, skipping q = 2 when asked.
fn kron_all(f: &mut dyn Facts, a: i64, n: u64, want: i64, skip_two: bool) -> Result<bool> {
    for q in prime_divisors(n) {
        if skip_two && q == 2 {
            continue;
        }
        if f.kron(a, q)? != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// +1 split, -1 inert, 0 ramified, recorded as a witness.
fn splitting(spec: &TwistSpec, p: u64, f: &mut dyn Facts) -> Result<i64> {
    f.kron(field_discriminant(spec.d)?, p)
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        invalid(format!("{p} is not prime"))
    }
}

fn finish(place: Place, (status, clause): Outcome, f: &mut dyn Facts) -> PlaceVerdict {
    PlaceVerdict {
        place,
        status,
        certificate: Certificate { clause: clause.to_string(), witnesses: f.take_witnesses() },
    }
}

fn real(spec: &TwistSpec, f: &mut dyn Facts) -> Result<Outcome> {
    let (dd, n, m, dn) = (spec.big_d, spec.big_n, spec.m, spec.dn());
    if m == 1 || spec.d > 0 {
        // The twist is isomorphic to X^D_0(N) over R.
        return Ok(if dd == 1 { yes("Real.split") } else { no("Real.split") });
    }
    if dd == 1 {
        return Ok(yes("Real.D1"));
    }
    if m == dn && f.e(dd, n, -4 * dn as i64)? > 0 {
        return Ok(yes("Real.fullAL"));
    }
    Ok(gap("Gap.real"))
}

/// p does not divide DN; `split` also covers the trivial twist m = 1.
fn good(spec: &TwistSpec, p: u64, split: bool, f: &mut dyn Facts) -> Result<Outcome> {
    let (dd, n, m, dn) = (spec.big_d, spec.big_n, spec.m, spec.dn());
    let g = f.genus(dd, n)? as u64;
    let weil = p > 4 * g * g;
    if split {
        if weil {
            return Ok(yes("Good.WeilBound"));
        }
        let c = f.count_x(dd, n, p)?;
        return Ok(if c > 0 { yes("Good.count") } else { no("Good.count") });
    }
    if m == dn {
        return Ok(yes("Good.SSFull"));
    }
    let mp = m * p;
    let disc = -4 * mp as i64;
    if mp % 4 != 3 && f.e(dd * p, n, disc)? != 0 {
        return Ok(yes("Good.SS.1"));
    }
    if mp % 4 == 3 && (f.e(dd * p, n, disc)? != 0 || f.e(dd * p, n, -(mp as i64))? != 0) {
        return Ok(yes("Good.SS.2"));
    }
    if weil {
        return Ok(yes("Good.WeilBound"));
    }
    let c = f.count_twist(dd, n, m, p)?;
    Ok(if c > 0 { yes("Good.twist") } else { no("Good.twist") })
}

fn has_root(f: &mut dyn Facts, disc: i64, p: u64) -> Result<bool> {
    Ok(!f.roots(disc, p)?.is_empty())
}

/// p odd, p not dividing DN, ramified in Q(sqrt d), m > 1.
fn ramified(spec: &TwistSpec, p: u64, f: &mut dyn Facts) -> Result<Outcome> {
    let (dd, n, m, dn) = (spec.big_d, spec.big_n, spec.m, spec.dn());
    let (mi, dni, pi) = (m as i64, dn as i64, p as i64);
    if f.kron(-mi, p)? == 1 {
        if f.e(dd, n, -4 * mi)? != 0 && has_root(f, -4 * mi, p)? {
            return Ok(yes("Ram.1"));
        }
        if m % 4 == 3 && f.e(dd, n, -mi)? != 0 && has_root(f, -mi, p)? {
            return Ok(yes("Ram.2"));
        }
    }
    if m == dn
        && dd % 2 == 1
        && f.kron(-dni, p)? == -1
        && kron_all(f, -pi, dd, -1, false)?
        && kron_all(f, -pi, n, 1, true)?
    {
        return Ok(yes("Ram.3"));
    }
    let pm8 = matches!(p % 8, 3 | 5);
    if n % 2 == 0
        && m == dn / 2
        && f.kron(-dni / 2, p)? == -1
        && kron_all(f, -pi, dd, -1, false)?
        && kron_all(f, -pi, n, 1, true)?
    {
        return Ok(yes("Ram.4"));
    }
    if dd % 2 == 0
        && m == dn
        && pm8
        && f.kron(-dni, p)? == -1
        && kron_all(f, -pi, dd / 2, -1, false)?
        && kron_all(f, -pi, n, 1, false)?
    {
        return Ok(yes("Ram.5"));
    }
    if dd % 2 == 0
        && m == dn / 2
        && matches!(dn % 16, 2 | 6 | 10)
        && pm8
        && f.kron(-dni / 2, p)? == -1
        && kron_all(f, -pi, dd, -1, false)?
        && kron_all(f, -pi, n, 1, false)?
    {
        return Ok(yes("Ram.6"));
    }
    Ok(no("Ram.none"))
}

/// p | D, p not ramified (or m = 1, treated as split).
fn divd(spec: &TwistSpec, p: u64, split: bool, f: &mut dyn Facts) -> Result<Outcome> {
    let (dd, n, m, dn) = (spec.big_d, spec.big_n, spec.m, spec.dn());
    let zeta4_cond = |dd: u64| all_primes(dd / 2, |q| q % 4 == 3) && all_primes(n, |q| q % 4 == 1);
    let dp = dd / p;
    let mod4_cond = || all_primes(dp, |q| q % 4 != 1) && all_primes(n, |q| q % 4 != 3);
    if split {
        if p == 2 && zeta4_cond(dd) {
            return Ok(yes("pD.split.1"));
        }
        if p % 4 == 1 && dd == 2 * p && n == 1 {
            return Ok(yes("pD.split.2"));
        }
        return Ok(no("pD.split"));
    }
    if m % p == 0 {
        let mq = m / p;
        let mqi = mq as i64;
        if m == p {
            if f.e(dp, n, -4)? != 0 {
                return Ok(yes("pD.inert.pm.1"));
            }
            if f.e(dp, n, -3)? != 0 {
                return Ok(yes("pD.inert.pm.2"));
            }
            return Ok(no("pD.inert.pm"));
        }
        if m == 2 * p && (f.e(dp, n, -4)? != 0 || f.e(dp, n, -8)? != 0) {
            return Ok(yes("pD.inert.pm.3"));
        }
        if mq % 4 != 3 {
            if f.e(dp, n, -4 * mqi)? != 0 {
                return Ok(yes("pD.inert.pm.4"));
            }
        } else if f.e(dp, n, -4 * mqi)? != 0 || f.e(dp, n, -mqi)? != 0 {
            return Ok(yes("pD.inert.pm.5"));
        }
        return Ok(no("pD.inert.pm"));
    }
    if p == 2 && m == 1 && zeta4_cond(dd) {
        return Ok(yes("pD.inert.pn.1"));
    }
    if p % 4 == 1 && dn % (2 * p) == 0 && m == dn / (2 * p) && mod4_cond() {
        return Ok(yes("pD.inert.pn.2"));
    }
    if p == 2 && m == dn / 2 && zeta4_cond(dd) {
        return Ok(yes("pD.inert.pn.3"));
    }
    if p % 4 == 1 && m == dn / p && mod4_cond() {
        return Ok(yes("pD.inert.pn.4"));
    }
    Ok(no("pD.inert.pn"))
}

/// p | N, p not ramified (or m = 1, treated as split).
fn divn(spec: &TwistSpec, p: u64, split: bool, f: &mut dyn Facts) -> Result<Outcome> {
    let (dd, n, m, dn) = (spec.big_d, spec.big_n, spec.m, spec.dn());
    let np = n / p;
    let zeta4 = || all_primes(dd, |q| q % 4 == 3) && all_primes(n / 2, |q| q % 4 == 1);
    let zeta6 = || all_primes(dd, |q| q % 3 == 2) && all_primes(n / 3, |q| q % 3 == 1);
    let not4 = || all_primes(dd, |q| q % 4 != 1) && all_primes(np, |q| q % 4 != 3);
    let not3 = || all_primes(dd, |q| q % 3 != 1) && all_primes(np, |q| q % 3 != 2);
    if split {
        if dd == 1 {
            return Ok(yes("pN.a.cusp"));
        }
        if p == 2 && zeta4() {
            return Ok(yes("pN.a.zeta4"));
        }
        if p == 3 && zeta6() {
            return Ok(yes("pN.a.zeta6"));
        }
        if f.tf_prime(dd, n, 1, p)? > 0 {
            return Ok(yes("pN.a.tf"));
        }
        return Ok(no("pN.a"));
    }
    if m % p == 0 {
        if p == 2 && (m == 2 || m == dn) && zeta4() {
            return Ok(yes("pN.b.i.1"));
        }
        if p % 4 == 3 && (m == p || m == 2 * p) && not4() {
            return Ok(yes("pN.b.i.2"));
        }
        return Ok(no("pN.b.i"));
    }
    let rest = dn / p;
    if m == 1 && dd == 1 {
        return Ok(yes("pN.b.ii.1"));
    }
    if p == 2 && m == 1 && zeta4() {
        return Ok(yes("pN.b.ii.2"));
    }
    if p == 3 && m == 1 && zeta6() {
        return Ok(yes("pN.b.ii.3"));
    }
    if p % 4 == 3 && rest % 2 == 0 && m == rest / 2 && not4() {
        return Ok(yes("pN.b.ii.4"));
    }
    if p % 3 == 2 && rest % 3 == 0 && m == rest / 3 && not3() {
        return Ok(yes("pN.b.ii.5"));
    }
    if m == rest && p % 4 != 1 && not4() {
        return Ok(yes("pN.b.ii.6"));
    }
    if m == rest && p % 3 != 1 && not3() {
        return Ok(yes("pN.b.ii.7"));
    }
    if f.tf_prime(dd, n, m, p)? > 0 {
        return Ok(yes("pN.b.ii.8"));
    }
    Ok(no("pN.b.ii"))
}

/// Route a place to its decider, recording facts in `f`.
pub fn decide_place_with(spec: &TwistSpec, place: Place, f: &mut dyn Facts) -> Result<PlaceVerdict> {
    let outcome = match place {
        Place::Real => real(spec, f)?,
        Place::Rest { bound } => {
            // Primes of 2dDN above the bound are listed separately by the caller.
            let g = f.genus(spec.big_d, spec.big_n)? as u64;
            if bound < 4 * g * g {
                return invalid(format!("bound {bound} is below 4g^2 = {} for {spec}", 4 * g * g));
            }
            yes("Good.WeilBound")
        }
        Place::Prime(p) => {
            check_prime(p)?;
            let at_d = spec.big_d % p == 0;
            let at_n = spec.big_n % p == 0;
            let s = if spec.m == 1 { 1 } else { splitting(spec, p, f)? };
            match s {
                0 if at_d || at_n => gap("Gap.ramified-divides-DN"),
                0 if p == 2 => gap("Gap.p2ramified"),
                0 => ramified(spec, p, f)?,
                _ if at_d => divd(spec, p, s == 1, f)?,
                _ if at_n => divn(spec, p, s == 1, f)?,
                _ => good(spec, p, s == 1, f)?,
            }
        }
    };
    Ok(finish(place, outcome, f))
}

pub fn decide_place(spec: &TwistSpec, place: Place) -> Result<PlaceVerdict> {
    decide_place_with(spec, place, &mut Live::new())
}

pub fn decide_real(spec: &TwistSpec) -> Result<PlaceVerdict> {
    decide_place(spec, Place::Real)
}

/// Split status at p for the public deciders; the trivial twist counts as split.
fn unramified(spec: &TwistSpec, p: u64, f: &mut dyn Facts) -> Result<bool> {
    check_prime(p)?;
    if spec.m == 1 {
        return Ok(true);
    }
    match splitting(spec, p, f)? {
        0 => invalid(format!("{p} ramifies in Q(sqrt {})", spec.d)),
        s => Ok(s == 1),
    }
}

pub fn decide_good(spec: &TwistSpec, p: u64) -> Result<PlaceVerdict> {
    let f = &mut Live::new();
    if spec.dn() % p == 0 {
        return invalid(format!("{p} divides DN = {}", spec.dn()));
    }
    let split = unramified(spec, p, f)?;
    let o = good(spec, p, split, f)?;
    Ok(finish(Place::Prime(p), o, f))
}

pub fn decide_ramified(spec: &TwistSpec, p: u64) -> Result<PlaceVerdict> {
    let f = &mut Live::new();
    check_prime(p)?;
    if p == 2 || spec.dn() % p == 0 {
        return invalid(format!("p = {p} must not divide 2DN = {}", 2 * spec.dn()));
    }
    if spec.m == 1 || splitting(spec, p, f)? != 0 {
        return invalid(format!("{p} must ramify in Q(sqrt {}) and m must exceed 1", spec.d));
    }
    let o = ramified(spec, p, f)?;
    Ok(finish(Place::Prime(p), o, f))
}

pub fn decide_divd(spec: &TwistSpec, p: u64) -> Result<PlaceVerdict> {
    let f = &mut Live::new();
    if spec.big_d % p != 0 {
        return invalid(format!("{p} does not divide D = {}", spec.big_d));
    }
    let split = unramified(spec, p, f)?;
    let o = divd(spec, p, split, f)?;
    Ok(finish(Place::Prime(p), o, f))
}

pub fn decide_divn(spec: &TwistSpec, p: u64) -> Result<PlaceVerdict> {
    let f = &mut Live::new();
    if spec.big_n % p != 0 {
        return invalid(format!("{p} does not divide N = {}", spec.big_n));
    }
    let split = unramified(spec, p, f)?;
    let o = divn(spec, p, split, f)?;
    Ok(finish(Place::Prime(p), o, f))
}
