//! Imaginary quadratic orders: class number, conductor and unit count,
//! read off from reduced primitive binary quadratic forms.

use std::sync::OnceLock;

use dashmap::DashMap;
use num_integer::Integer;

use crate::arith::{factor, kronecker};
use crate::error::{invalid, Error, Result};

/// Largest |disc| accepted by `class_data`.
pub const CLASS_DATA_BOUND: u64 = 10_000_000;

/// h, f and w for the order of discriminant `disc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassData {
    pub disc: i64,
    /// Class number.
    pub h: u64,
    /// Conductor relative to the maximal order.
    pub f: u64,
    /// Number of units: 6, 4 or 2.
    pub w: u64,
}

/// A reduced primitive form (a, b, c) with b^2 - 4ac = disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

pub fn is_discriminant(disc: i64) -> bool {
    disc < 0 && matches!(disc.rem_euclid(4), 0 | 1)
}

pub(crate) fn check_disc(disc: i64) -> Result<()> {
    if !is_discriminant(disc) {
        return invalid(format!("{disc} is not a negative discriminant (0 or 1 mod 4)"));
    }
    if disc.unsigned_abs() > CLASS_DATA_BOUND {
        return Err(Error::OutOfRange(format!("|{disc}|"), CLASS_DATA_BOUND));
    }
    Ok(())
}

/// Reduced primitive forms: |b| <= a <= c, and b >= 0 when |b| = a or a = c.
/// Sorted by (a, b, c).
pub fn reduced_forms(disc: i64) -> Result<Vec<Form>> {
    check_disc(disc)?;
    let mut forms = Vec::new();
    let mut b = disc.rem_euclid(2);
    while 3 * b * b <= -disc {
        let t = (b * b - disc) / 4;
        let mut a = b.max(1);
        while a * a <= t {
            if t % a == 0 {
                let c = t / a;
                if a.gcd(&b).gcd(&c) == 1 {
                    forms.push(Form { a, b, c });
                    if b != 0 && b != a && a != c {
                        forms.push(Form { a, b: -b, c });
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    forms.sort_unstable();
    Ok(forms)
}

/// Conductor of `disc`: the largest f with disc/f^2 still a discriminant.
pub fn conductor(disc: i64) -> Result<u64> {
    check_disc(disc)?;
    let mut f = 1u64;
    let mut rest = disc;
    for &(q, e) in factor(disc.unsigned_abs())?.pairs() {
        if q == 2 {
            continue;
        }
        let qk = q.pow(e / 2);
        f *= qk;
        rest /= (qk * qk) as i64;
    }
    while rest % 4 == 0 && matches!((rest / 4).rem_euclid(4), 0 | 1) {
        rest /= 4;
        f *= 2;
    }
    Ok(f)
}

fn cache() -> &'static DashMap<i64, ClassData> {
    static CACHE: OnceLock<DashMap<i64, ClassData>> = OnceLock::new();
    CACHE.get_or_init(DashMap::new)
}

pub fn units(disc: i64) -> u64 {
    match disc {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// Class number, conductor and unit count, memoized.
pub fn class_data(disc: i64) -> Result<ClassData> {
    if let Some(cd) = cache().get(&disc) {
        return Ok(*cd);
    }
    let h = reduced_forms(disc)?.len() as u64;
    let cd = ClassData { disc, h, f: conductor(disc)?, w: units(disc) };
    cache().insert(disc, cd);
    Ok(cd)
}

/// Every memoized entry, sorted by discriminant descending (|disc| ascending).
pub fn cached_class_data() -> Vec<ClassData> {
    let mut v: Vec<ClassData> = cache().iter().map(|e| *e.value()).collect();
    v.sort_unstable_by_key(|cd| std::cmp::Reverse(cd.disc));
    v
}

/// Seed the memo with externally persisted values. Entries are checked
/// for internal consistency but not recomputed.
pub fn seed_class_data(cd: ClassData) -> Result<()> {
    check_disc(cd.disc)?;
    if cd.h == 0 || cd.f == 0 || cd.w != units(cd.disc) {
        return Err(Error::Cache(format!("inconsistent class data record for {}", cd.disc)));
    }
    let f2 = (cd.f * cd.f) as i64;
    if cd.disc % f2 != 0 || !is_discriminant(cd.disc / f2) {
        return Err(Error::Cache(format!("conductor {} does not fit {}", cd.f, cd.disc)));
    }
    cache().insert(cd.disc, cd);
    Ok(())
}

/// The Eichler symbol: 1 when p divides the conductor, else (disc/p).
pub fn eichler_symbol(disc: i64, p: u64) -> Result<i8> {
    let f = class_data(disc)?.f;
    Ok(if f % p == 0 { 1 } else { kronecker(disc, p) })
}

/// disc/f'^2 for each divisor f' of the conductor, in increasing f'.
pub fn conductor_divisor_discs(disc: i64) -> Result<Vec<i64>> {
    let f = class_data(disc)?.f;
    Ok(crate::arith::divisors(f).into_iter().map(|g| disc / (g * g) as i64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_data_examples() {
        let cd = |d| {
            let c = class_data(d).unwrap();
            (c.h, c.f, c.w)
        };
        assert_eq!(cd(-3), (1, 1, 6));
        assert_eq!(cd(-4), (1, 1, 4));
        assert_eq!(cd(-23), (3, 1, 2));
        assert_eq!(cd(-16), (1, 2, 2));
        assert_eq!(cd(-52), (2, 1, 2));
        assert_eq!(cd(-12), (1, 2, 2));
        assert_eq!(cd(-92), (3, 2, 2));
        assert_eq!(cd(-99), (2, 3, 2));
    }

    #[test]
    fn forms_of_minus_23_and_minus_52() {
        let f = |a, b, c| Form { a, b, c };
        assert_eq!(reduced_forms(-23).unwrap(), vec![f(1, 1, 6), f(2, -1, 3), f(2, 1, 3)]);
        assert_eq!(reduced_forms(-52).unwrap(), vec![f(1, 0, 13), f(2, 2, 7)]);
    }

    #[test]
    fn rejects_non_discriminants() {
        assert!(class_data(-5).is_err());
        assert!(class_data(0).is_err());
        assert!(class_data(5).is_err());
    }

    #[test]
    fn eichler_symbol_examples() {
        assert_eq!(eichler_symbol(-16, 2).unwrap(), 1);
        assert_eq!(eichler_symbol(-4, 2).unwrap(), 0);
        assert_eq!(eichler_symbol(-3, 3).unwrap(), 0);
    }

    #[test]
    fn conductor_ladder() {
        assert_eq!(conductor_divisor_discs(-16).unwrap(), vec![-16, -4]);
        assert_eq!(conductor_divisor_discs(-3).unwrap(), vec![-3]);
        assert_eq!(conductor_divisor_discs(-52).unwrap(), vec![-52]);
        assert_eq!(conductor_divisor_discs(-144).unwrap(), vec![-144, -36, -16, -4]);
    }
}
