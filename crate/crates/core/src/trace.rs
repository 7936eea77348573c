//! Genus, Hecke traces and F_p point counts of X^D_0(N), its twists and
//! Atkin-Lehner quotients.
//!
//! Every count is a sum of e_{D,N}(disc)/w(disc) over discriminants
//! disc = (s^2 - 4M)/f^2, accumulated in twelfths so the result is exact.
//! Integrality after summation is checked, never assumed.

use crate::arith::{divisors, is_prime, is_square, isqrt, prime_divisors, sigma1};
use crate::embed::{embedding_weight, EichlerPair};
use crate::error::{invalid, Error, Result};
use crate::quad::conductor_divisor_discs;

/// X^D_0(N) with D a product of an even number of primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Curve {
    pair: EichlerPair,
}

impl Curve {
    pub fn new(d: u64, n: u64) -> Result<Self> {
        let pair = EichlerPair::new(d, n)?;
        if prime_divisors(d).len() % 2 == 1 {
            return invalid(format!("D = {d} must have an even number of prime factors"));
        }
        Ok(Self { pair })
    }

    pub fn pair(&self) -> EichlerPair {
        self.pair
    }

    pub fn d(&self) -> u64 {
        self.pair.disc()
    }

    pub fn n(&self) -> u64 {
        self.pair.level()
    }

    fn dn(&self) -> u64 {
        self.d() * self.n()
    }

    /// Cusps of X_0(N), all rational for squarefree N; none when D > 1.
    pub fn cusps(&self) -> u64 {
        if self.d() == 1 {
            1 << prime_divisors(self.n()).len()
        } else {
            0
        }
    }

    pub fn genus(&self) -> u64 {
        let phi: u64 = prime_divisors(self.d()).iter().map(|p| p - 1).product();
        let psi: u64 = prime_divisors(self.n()).iter().map(|q| q + 1).product();
        let e4 = crate::embed::e_weight(self.pair, -4).expect("-4 is a discriminant");
        let e3 = crate::embed::e_weight(self.pair, -3).expect("-3 is a discriminant");
        // 12g = 12 + phi psi - 3 e(-4) - 4 e(-3) - 6 * #cusps
        let twelve_g = (12 + phi * psi) as i64 - (3 * e4 + 4 * e3 + 6 * self.cusps()) as i64;
        debug_assert!(twelve_g >= 0 && twelve_g % 12 == 0, "genus formula gave {twelve_g}/12");
        (twelve_g / 12) as u64
    }

    /// tr T_n on weight-2 cusp forms, for n coprime to DN and not a square.
    pub fn trace_hecke(&self, n: u64) -> Result<i64> {
        if n == 0 || is_square(n) {
            return invalid(format!("n = {n} must be a positive non-square"));
        }
        if num_integer::gcd(n, self.dn()) != 1 {
            return invalid(format!("n = {n} must be coprime to DN = {}", self.dn()));
        }
        let class_terms = self.weighted_sum(n, 1, |_| true)?;
        let mut twelfths = 12 * sigma1(n) as i64 - class_terms as i64;
        if self.d() == 1 {
            // Eisenstein part; 2^omega(N) cusps, each pairing d with n/d.
            let mins: u64 = divisors(n).iter().map(|&d| d.min(n / d)).sum();
            twelfths -= (6 * self.cusps() * mins) as i64;
        }
        integral(format!("tr T_{n} on {}", self.pair), twelfths)
    }

    /// #X(F_p) for p not dividing DN.
    pub fn count_x(&self, p: u64) -> Result<u64> {
        self.count_twist(1, p)
    }

    /// #C(F_p) for the twist by w_m and any quadratic field inert at p:
    /// the fixed points of w_m composed with Frobenius. Only s divisible
    /// by m contribute; the s = 0 terms are the superspecial ones.
    pub fn count_twist(&self, m: u64, p: u64) -> Result<u64> {
        self.check_good(m, p)?;
        let twelfths = self.weighted_sum(m * p, m, |_| true)? + 12 * self.twist_cusps(m);
        integral(format!("#C(F_{p}) for {} twisted by w_{m}", self.pair), twelfths as i64)
            .map(|v| v as u64)
    }

    /// #(X/w_m)(F_p) = (count_x + count_twist) / 2.
    pub fn count_quotient(&self, m: u64, p: u64) -> Result<u64> {
        let total = self.count_x(p)? + self.count_twist(m, p)?;
        if total % 2 != 0 {
            return Err(Error::NonIntegral {
                what: format!("#(X/w_{m})(F_{p}) for {}", self.pair),
                twelfths: 6 * total as i64,
            });
        }
        Ok(total / 2)
    }

    /// The s = 0 part of count_twist: superspecial points fixed by w_{mp}.
    fn superspecial_twelfths(&self, m: u64, p: u64) -> Result<u64> {
        self.weighted_sum(m * p, m, |s| s == 0)
    }

    fn twist_cusps(&self, m: u64) -> u64 {
        if m == 1 {
            self.cusps()
        } else {
            0
        }
    }

    fn check_good(&self, m: u64, p: u64) -> Result<()> {
        if !is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        if self.dn() % p == 0 {
            return invalid(format!("p = {p} divides DN = {}", self.dn()));
        }
        if m == 0 || self.dn() % m != 0 {
            return invalid(format!("m = {m} must divide DN = {}", self.dn()));
        }
        Ok(())
    }

    /// sum over s >= 0-symmetric, step | s, s^2 < 4M, keep(s), of
    /// sum over f' of 12 e(disc/f'^2)/w.
    fn weighted_sum(&self, big_m: u64, step: u64, keep: impl Fn(u64) -> bool) -> Result<u64> {
        let mut total = 0u64;
        let four_m = 4 * big_m;
        let mut s = 0u64;
        while s * s < four_m {
            if keep(s) {
                let disc = (s * s) as i64 - four_m as i64;
                let mut inner = 0u64;
                for sub in conductor_divisor_discs(disc)? {
                    inner += embedding_weight(self.pair, sub)?.twelfths();
                }
                total += if s == 0 { inner } else { 2 * inner };
            }
            s += step;
        }
        Ok(total)
    }
}

fn integral(what: String, twelfths: i64) -> Result<i64> {
    if twelfths % 12 != 0 {
        return Err(Error::NonIntegral { what, twelfths });
    }
    Ok(twelfths / 12)
}

/// p + 1 - tr(T_{pm}): equal to count_twist.
pub fn tf(d: u64, n: u64, m: u64, p: u64) -> Result<u64> {
    Curve::new(d, n)?.count_twist(m, p)
}

/// For p | N: tf(D, N/p, m, p) without its s = 0 terms. For m = 1 and
/// p in {2, 3} the s = +-p terms are supersingular too, but they are nonzero
/// only when the zeta_4 / zeta_6 clauses already hold, so they are kept.
pub fn tf_prime(d: u64, n: u64, m: u64, p: u64) -> Result<u64> {
    if !is_prime(p) || n % p != 0 {
        return invalid(format!("p = {p} must be a prime dividing N = {n}"));
    }
    let lower = Curve::new(d, n / p)?;
    if m == 0 || lower.dn() % m != 0 {
        return invalid(format!("m = {m} must divide DN/p = {}", lower.dn()));
    }
    let total = lower.count_twist(m, p)?;
    let ss = lower.superspecial_twelfths(m, p)?;
    let ordinary = 12 * total as i64 - ss as i64;
    let v = integral(format!("TF'({d},{n},{m},{p})"), ordinary)?;
    if v < 0 {
        return Err(Error::NonIntegral { what: format!("TF'({d},{n},{m},{p}) < 0"), twelfths: ordinary });
    }
    Ok(v as u64)
}

/// The Weil interval for a genus-g curve over F_p, clipped at 0.
pub fn weil_interval(g: u64, p: u64) -> (u64, u64) {
    // 2g sqrt(p) bracketed through integer square roots of 4 g^2 p.
    let r = 4 * g * g * p;
    let lo_root = isqrt(r);
    let hi_root = if lo_root * lo_root == r { lo_root } else { lo_root + 1 };
    ((p + 1).saturating_sub(hi_root), p + 1 + lo_root)
}

/// Primes at or below 4 g^2, where the Weil bound does not guarantee a point.
pub fn weil_threshold(g: u64) -> u64 {
    4 * g * g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(d: u64, n: u64) -> Curve {
        Curve::new(d, n).unwrap()
    }

    #[test]
    fn genus_pins() {
        assert_eq!(c(26, 1).genus(), 2);
        assert_eq!(c(1, 23).genus(), 2);
        assert_eq!(c(6, 1).genus(), 0);
        assert_eq!(c(10, 1).genus(), 0);
        assert_eq!(c(1, 1).genus(), 0);
        assert_eq!(c(1, 11).genus(), 1);
    }

    #[test]
    fn odd_prime_count_rejected() {
        assert!(Curve::new(2, 1).is_err());
        assert!(Curve::new(30, 1).is_err());
    }

    #[test]
    fn count_pins() {
        assert_eq!(c(6, 1).count_x(5).unwrap(), 6);
        assert_eq!(c(6, 1).trace_hecke(5).unwrap(), 0);
        assert_eq!(c(6, 1).trace_hecke(13).unwrap(), 0);
        assert_eq!(c(1, 23).count_x(2).unwrap(), 4);
        assert_eq!(c(6, 1).count_twist(1, 5).unwrap(), 6);
        assert_eq!(c(6, 1).count_quotient(1, 5).unwrap(), 6);
        assert_eq!(tf(6, 1, 1, 5).unwrap(), 6);
    }

    #[test]
    fn x0_11_traces() {
        let x = c(1, 11);
        assert_eq!(x.trace_hecke(2).unwrap(), -2);
        assert_eq!(x.trace_hecke(3).unwrap(), -1);
        assert_eq!(x.trace_hecke(6).unwrap(), 2);
        assert_eq!(x.count_x(2).unwrap(), 5);
    }

    #[test]
    fn trace_preconditions() {
        assert!(c(6, 1).trace_hecke(4).is_err());
        assert!(c(6, 1).trace_hecke(3).is_err());
        assert!(c(6, 1).count_x(3).is_err());
        assert!(c(6, 1).count_twist(5, 7).is_err());
    }

    #[test]
    fn tf_prime_pin() {
        assert!(tf_prime(6, 11, 1, 11).unwrap() > 0);
        assert!(tf_prime(6, 11, 1, 7).is_err());
        assert!(tf_prime(6, 11, 11, 11).is_err());
    }

    #[test]
    fn weil_interval_contains_p_plus_one() {
        assert_eq!(weil_interval(0, 7), (8, 8));
        assert_eq!(weil_interval(1, 4), (1, 9));
        let (lo, hi) = weil_interval(2, 3);
        assert!(lo <= 4 && hi >= 4);
    }
}
