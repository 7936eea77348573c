//! Hilbert class polynomials over Z and their roots modulo primes.
//!
//! H_disc is the product of (X - j(tau_Q)) over reduced forms Q = (a, b, c),
//! tau_Q = (-b + sqrt(disc)) / 2a. j is evaluated from the eta quotient
//! f = Delta(2 tau) / Delta(tau) = q (P(q^2) / P(q))^24, with P the pentagonal
//! series, via j = (256 f + 1)^3 / f. The product is formed in floating
//! point and rounded; a coefficient farther than 1/4 from an integer
//! doubles the working precision, at most three times.

use std::fmt;
use std::sync::{Arc, OnceLock};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use dashmap::DashMap;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{is_prime, kronecker, prime_divisors};
use crate::error::{invalid, Error, Result};
use crate::quad::{check_disc, reduced_forms, Form};

/// Largest |disc| accepted by `hilbert_classpoly`.
pub const CLASSPOLY_BOUND: u64 = 100_000;

/// Below this, roots modulo p are found by evaluating at every residue.
pub const EXHAUSTIVE_ROOT_BOUND: u64 = 100_000;

const RETRIES: u32 = 3;
const RM: RoundingMode = RoundingMode::ToEven;

/// A monic integer polynomial, coefficients from the constant term up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPolynomial {
    disc: i64,
    coeffs: Vec<BigInt>,
}

impl ClassPolynomial {
    /// Rebuild from stored coefficients; checks only that it is monic.
    pub fn from_coeffs(disc: i64, coeffs: Vec<BigInt>) -> Result<Self> {
        match coeffs.last() {
            Some(c) if *c == BigInt::from(1) => Ok(Self { disc, coeffs }),
            _ => Err(Error::Cache(format!("class polynomial for {disc} is not monic"))),
        }
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficients reduced into [0, p).
    pub fn reduce(&self, p: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        self.coeffs.iter().map(|c| c.mod_floor(&pb).to_u64().expect("residue below p")).collect()
    }
}

impl fmt::Display for ClassPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.sign() == num_bigint::Sign::Minus;
            let mag = c.magnitude();
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let unit = *mag == BigUint::from(1u8);
            match i {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "X")?,
                1 => write!(f, "{mag}*X")?,
                _ if unit => write!(f, "X^{i}")?,
                _ => write!(f, "{mag}*X^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Cx {
    re: BigFloat,
    im: BigFloat,
}

impl Cx {
    fn real(re: BigFloat, p: usize) -> Self {
        Cx { re, im: BigFloat::from_u8(0, p) }
    }

    fn mul(&self, o: &Cx, p: usize) -> Cx {
        let re = self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM);
        Cx { re, im }
    }

    fn add(&self, o: &Cx, p: usize) -> Cx {
        Cx { re: self.re.add(&o.re, p, RM), im: self.im.add(&o.im, p, RM) }
    }

    fn sub(&self, o: &Cx, p: usize) -> Cx {
        Cx { re: self.re.sub(&o.re, p, RM), im: self.im.sub(&o.im, p, RM) }
    }

    fn scale(&self, k: u64, p: usize) -> Cx {
        let k = BigFloat::from_u64(k, p);
        Cx { re: self.re.mul(&k, p, RM), im: self.im.mul(&k, p, RM) }
    }

    fn div(&self, o: &Cx, p: usize) -> Cx {
        let den = o.re.mul(&o.re, p, RM).add(&o.im.mul(&o.im, p, RM), p, RM);
        let conj = Cx { re: o.re.clone(), im: o.im.neg() };
        let num = self.mul(&conj, p);
        Cx { re: num.re.div(&den, p, RM), im: num.im.div(&den, p, RM) }
    }

    fn sqr(&self, p: usize) -> Cx {
        self.mul(self, p)
    }
}

/// Pentagonal series 1 + sum_{k>=1} (-1)^k (x^{k(3k-1)/2} + x^{k(3k+1)/2}),
/// truncated once |x|^e < 2^-(bits + 16). `log2_abs` is log2 |x| < 0.
fn pentagonal(x: &Cx, log2_abs: f64, bits: usize) -> Cx {
    let p = bits;
    let limit = (bits + 16) as f64;
    let one = BigFloat::from_u8(1, p);
    let mut sum = Cx::real(one, p);
    let mut xk = x.clone();
    let mut e1 = x.clone();
    for k in 1u64.. {
        if (k * (3 * k - 1) / 2) as f64 * -log2_abs > limit {
            break;
        }
        let e2 = e1.mul(&xk, p);
        let pair = e1.add(&e2, p);
        sum = if k % 2 == 1 { sum.sub(&pair, p) } else { sum.add(&pair, p) };
        let xk1 = xk.mul(x, p);
        e1 = e2.mul(&xk, p).mul(&xk1, p);
        xk = xk1;
    }
    sum
}

/// j((-b + i sqrt|disc|) / 2a) at `bits` of working precision.
fn j_value(disc: i64, form: Form, bits: usize, cc: &mut Consts) -> Cx {
    let p = bits;
    let pi = cc.pi(p, RM);
    let root = BigFloat::from_u64(disc.unsigned_abs(), p).sqrt(p, RM);
    let a = BigFloat::from_i64(form.a, p);
    let radius = pi.mul(&root, p, RM).div(&a, p, RM).neg().exp(p, RM, cc);
    let theta = pi.mul(&BigFloat::from_i64(form.b, p), p, RM).div(&a, p, RM);
    let q = Cx {
        re: radius.mul(&theta.cos(p, RM, cc), p, RM),
        im: radius.mul(&theta.sin(p, RM, cc), p, RM).neg(),
    };
    let log2_q = -std::f64::consts::PI * (disc.unsigned_abs() as f64).sqrt()
        / (form.a as f64 * std::f64::consts::LN_2);
    let q2 = q.sqr(p);
    let ratio = pentagonal(&q2, 2.0 * log2_q, bits).div(&pentagonal(&q, log2_q, bits), p);
    let r2 = ratio.sqr(p);
    let r4 = r2.sqr(p);
    let r8 = r4.sqr(p);
    let r16 = r8.sqr(p);
    let r24 = r16.mul(&r8, p);
    let f = q.mul(&r24, p);
    let one = Cx::real(BigFloat::from_u8(1, p), p);
    let g = f.scale(256, p).add(&one, p);
    g.sqr(p).mul(&g, p).div(&f, p)
}

fn poly_mul(a: &[BigFloat], b: &[BigFloat], p: usize) -> Vec<BigFloat> {
    let mut out = vec![BigFloat::from_u8(0, p); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y, p, RM), p, RM);
        }
    }
    out
}

/// Nearest integer to `x` if it lies within 1/4 of one.
fn round_quarter(x: &BigFloat, p: usize) -> Option<BigInt> {
    let r = x.round(0, RM);
    let gap = x.sub(&r, p, RM).abs();
    let quarter = BigFloat::from_f64(0.25, p);
    if gap.cmp(&quarter)? > 0 {
        return None;
    }
    to_bigint(&r)
}

/// Exact conversion of an integral BigFloat.
fn to_bigint(x: &BigFloat) -> Option<BigInt> {
    if x.is_zero() {
        return Some(BigInt::zero());
    }
    let (words, _, sign, exp, _) = x.as_raw_parts()?;
    let mut digits = Vec::with_capacity(words.len() * 2);
    for w in words {
        digits.push(*w as u32);
        digits.push((*w >> 32) as u32);
    }
    let mant = BigUint::new(digits);
    let width = (words.len() * 64) as i64;
    let exp = exp as i64;
    let mag = if exp >= width { mant << (exp - width) as usize } else { mant >> (width - exp) as usize };
    let s = if sign == Sign::Neg { num_bigint::Sign::Minus } else { num_bigint::Sign::Plus };
    Some(BigInt::from_biguint(s, mag))
}

/// The starting precision: the bit size of the constant term plus 32.
pub fn initial_bits(disc: i64, forms: &[Form]) -> usize {
    let s: f64 = forms.iter().map(|f| 1.0 / f.a as f64).sum();
    let bits = std::f64::consts::PI * (disc.unsigned_abs() as f64).sqrt() * s / std::f64::consts::LN_2;
    bits.ceil() as usize + 32
}

/// One attempt at a fixed working precision; None if rounding fails.
pub fn classpoly_at_bits(disc: i64, bits: usize) -> Result<Option<ClassPolynomial>> {
    check_disc(disc)?;
    let forms = reduced_forms(disc)?;
    let p = bits;
    let mut cc = Consts::new().map_err(|e| Error::InvalidInput(format!("float constants: {e:?}")))?;
    let one = BigFloat::from_u8(1, p);
    let mut prod = vec![one.clone()];
    for form in forms.iter().filter(|f| f.b >= 0) {
        let j = j_value(disc, *form, bits, &mut cc);
        let factor = if form.b == 0 || form.b == form.a || form.a == form.c {
            vec![j.re.neg(), one.clone()]
        } else {
            let norm = j.re.mul(&j.re, p, RM).add(&j.im.mul(&j.im, p, RM), p, RM);
            let trace = j.re.mul(&BigFloat::from_u8(2, p), p, RM).neg();
            vec![norm, trace, one.clone()]
        };
        prod = poly_mul(&prod, &factor, p);
    }
    let mut coeffs = Vec::with_capacity(prod.len());
    for c in &prod {
        match round_quarter(c, p) {
            Some(z) => coeffs.push(z),
            None => return Ok(None),
        }
    }
    Ok(Some(ClassPolynomial { disc, coeffs }))
}

fn cache() -> &'static DashMap<i64, Arc<ClassPolynomial>> {
    static CACHE: OnceLock<DashMap<i64, Arc<ClassPolynomial>>> = OnceLock::new();
    CACHE.get_or_init(DashMap::new)
}

/// H_disc, memoized.
pub fn hilbert_classpoly(disc: i64) -> Result<Arc<ClassPolynomial>> {
    if let Some(h) = cache().get(&disc) {
        return Ok(h.clone());
    }
    check_disc(disc)?;
    if disc.unsigned_abs() > CLASSPOLY_BOUND {
        return Err(Error::OutOfRange(format!("|{disc}|"), CLASSPOLY_BOUND));
    }
    let mut bits = initial_bits(disc, &reduced_forms(disc)?);
    for attempt in 0..=RETRIES {
        if let Some(h) = classpoly_at_bits(disc, bits)? {
            let h = Arc::new(h);
            cache().insert(disc, h.clone());
            return Ok(h);
        }
        if attempt < RETRIES {
            bits *= 2;
        }
    }
    Err(Error::Precision { disc, bits })
}

/// Every memoized polynomial, |disc| ascending.
pub fn cached_classpolys() -> Vec<Arc<ClassPolynomial>> {
    let mut v: Vec<_> = cache().iter().map(|e| e.value().clone()).collect();
    v.sort_unstable_by_key(|h| std::cmp::Reverse(h.disc));
    v
}

/// Seed the memo from persisted data. The degree must equal h(disc).
pub fn seed_classpoly(h: ClassPolynomial) -> Result<()> {
    let cd = crate::quad::class_data(h.disc)?;
    if h.degree() as u64 != cd.h {
        return Err(Error::Cache(format!("class polynomial for {} has wrong degree", h.disc)));
    }
    cache().insert(h.disc, Arc::new(h));
    Ok(())
}

/// Polynomials over F_p, coefficients from the constant term up, no
/// trailing zeros (the zero polynomial is empty).
pub mod fp {
    fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        let (mut r, mut b, mut e) = (1u64, a % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = mul_mod(r, b, p);
            }
            b = mul_mod(b, b, p);
            e >>= 1;
        }
        r
    }

    pub fn trim(mut f: Vec<u64>) -> Vec<u64> {
        while f.last() == Some(&0) {
            f.pop();
        }
        f
    }

    pub fn eval(f: &[u64], x: u64, p: u64) -> u64 {
        f.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
    }

    /// Quotient of f by (X - r); f(r) must be 0.
    pub fn deflate(f: &[u64], r: u64, p: u64) -> Vec<u64> {
        let n = f.len() - 1;
        let mut q = vec![0; n];
        let mut carry = 0;
        for i in (0..n).rev() {
            carry = (f[i + 1] + mul_mod(carry, r, p)) % p;
            q[i] = carry;
        }
        q
    }

    pub fn rem(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
        let mut r = f.to_vec();
        let lead = inv(*g.last().expect("nonzero divisor"), p);
        while r.len() >= g.len() {
            let c = mul_mod(*r.last().unwrap(), lead, p);
            let shift = r.len() - g.len();
            for (i, &gi) in g.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - mul_mod(c, gi, p)) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn gcd(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(f.to_vec()), trim(g.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        if let Some(&l) = a.last() {
            let li = inv(l, p);
            for c in a.iter_mut() {
                *c = mul_mod(*c, li, p);
            }
        }
        a
    }

    pub fn mul(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
        if f.is_empty() || g.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; f.len() + g.len() - 1];
        for (i, &a) in f.iter().enumerate() {
            for (j, &b) in g.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        trim(out)
    }

    pub fn derivative(f: &[u64], p: u64) -> Vec<u64> {
        trim(f.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect())
    }

    /// base^e mod m.
    pub fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut r = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = rem(&mul(&r, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        r
    }

    /// Distinct roots of f in F_p.
    pub fn roots(f: &[u64], p: u64) -> Vec<u64> {
        let f = trim(f.to_vec());
        if f.len() <= 1 {
            return Vec::new();
        }
        if p < super::EXHAUSTIVE_ROOT_BOUND {
            return (0..p).filter(|&x| eval(&f, x, p) == 0).collect();
        }
        // gcd with X^p - X isolates the product of distinct linear factors.
        let xp = pow_mod(&[0, 1], p, &f, p);
        let mut diff = xp;
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = gcd(&f, &trim(diff), p);
        let mut out = Vec::new();
        split(&g, p, &mut out);
        out.sort_unstable();
        out
    }

    /// Equal-degree splitting of a product of distinct linear factors, p odd.
    fn split(g: &[u64], p: u64, out: &mut Vec<u64>) {
        match g.len() {
            0 | 1 => {}
            2 => out.push((p - mul_mod(g[0], inv(g[1], p), p)) % p),
            _ => {
                for a in 1u64.. {
                    let mut h = pow_mod(&[a % p, 1], (p - 1) / 2, g, p);
                    h.resize(h.len().max(1), 0);
                    h[0] = (h[0] + p - 1) % p;
                    let d = gcd(g, &trim(h), p);
                    if d.len() > 1 && d.len() < g.len() {
                        let (q, _) = divrem(g, &d, p);
                        split(&d, p, out);
                        split(&q, p, out);
                        return;
                    }
                }
            }
        }
    }

    pub fn divrem(f: &[u64], g: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = f.to_vec();
        let lead = inv(*g.last().expect("nonzero divisor"), p);
        let mut q = vec![0; f.len().saturating_sub(g.len()) + 1];
        while r.len() >= g.len() && !r.is_empty() {
            let c = mul_mod(*r.last().unwrap(), lead, p);
            let shift = r.len() - g.len();
            q[shift] = c;
            for (i, &gi) in g.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - mul_mod(c, gi, p)) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }
}

/// Roots of H_disc modulo p with multiplicity, and the remaining factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootReport {
    pub disc: i64,
    pub p: u64,
    /// (root, multiplicity), ascending by root.
    pub roots: Vec<(u64, u32)>,
    /// What is left after removing every linear factor; monic.
    pub cofactor: Vec<u64>,
}

impl RootReport {
    pub fn has_root(&self) -> bool {
        !self.roots.is_empty()
    }

    pub fn distinct_roots(&self) -> Vec<u64> {
        self.roots.iter().map(|&(r, _)| r).collect()
    }
}

impl fmt::Display for RootReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        let mut parts = Vec::new();
        for &(r, k) in &self.roots {
            let base = if r == 0 { "X".to_string() } else { format!("(X + {})", p - r) };
            parts.push(if k == 1 { base } else { format!("{base}^{k}") });
        }
        if self.cofactor.len() > 1 {
            let mut terms = Vec::new();
            for (i, &c) in self.cofactor.iter().enumerate().rev() {
                if c == 0 {
                    continue;
                }
                let mono = match i {
                    0 => String::new(),
                    1 => "X".to_string(),
                    _ => format!("X^{i}"),
                };
                terms.push(match (c, i) {
                    (_, 0) => c.to_string(),
                    (1, _) => mono,
                    _ => format!("{c}*{mono}"),
                });
            }
            parts.push(format!("({})", terms.join(" + ")));
        }
        if parts.is_empty() {
            parts.push("1".to_string());
        }
        write!(f, "{}", parts.join(""))
    }
}

/// Factor H_disc mod p into its linear part and the rest.
pub fn roots_mod(disc: i64, p: u64) -> Result<RootReport> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    let h = hilbert_classpoly(disc)?;
    let mut rest = h.reduce(p);
    let mut roots = Vec::new();
    for r in fp::roots(&rest, p) {
        let mut k = 0;
        while rest.len() > 1 && fp::eval(&rest, r, p) == 0 {
            rest = fp::deflate(&rest, r, p);
            k += 1;
        }
        roots.push((r, k));
    }
    Ok(RootReport { disc, p, roots, cofactor: rest })
}

/// Whether H_disc has a root in F_p.
pub fn has_root_mod(disc: i64, p: u64) -> Result<bool> {
    Ok(roots_mod(disc, p)?.has_root())
}

/// Whether H_disc mod p is squarefree, i.e. p does not divide disc(H_disc).
pub fn separable_mod(disc: i64, p: u64) -> Result<bool> {
    let f = hilbert_classpoly(disc)?.reduce(p);
    let g = fp::gcd(&f, &fp::derivative(&f, p), p);
    Ok(g.len() == 1)
}

/// The congruence criterion for a root of H_{-4N} mod p when (-N/p) = -1:
/// every odd prime q | N has (-p/q) = 1.
pub fn criterion_4n_root(n: u64, p: u64) -> Result<bool> {
    if p == 2 || !is_prime(p) {
        return invalid(format!("p = {p} must be an odd prime"));
    }
    if n == 0 || !crate::arith::is_squarefree(n as i64) {
        return invalid(format!("N = {n} must be squarefree"));
    }
    if kronecker(-(n as i64), p) != -1 {
        return invalid(format!("the criterion needs (-{n}/{p}) = -1"));
    }
    Ok(prime_divisors(n).into_iter().filter(|&q| q != 2).all(|q| kronecker(-(p as i64), q) == 1))
}
