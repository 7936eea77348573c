//! Prime scans over example families described in TOML.

use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;

use crate::arith::{is_prime, kronecker, primes_up_to};
use crate::error::{invalid, Error, Result};
use crate::local::{everywhere_local, GlobalReport, TwistSpec};
use crate::trace::Curve;

/// The families shipped with the crate.
pub const BUILTIN_FAMILIES: &str = include_str!("../data/families.toml");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    family: Vec<Family>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Family {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub q: u64,
    spec: Template,
    require: Vec<Condition>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Template {
    #[serde(rename = "D")]
    big_d: String,
    #[serde(rename = "N")]
    big_n: String,
    d: String,
    m: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Condition {
    Residue { modulus: u64, residues: Vec<u64> },
    Kronecker { top: String, over: Over, equals: i64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Over {
    Q,
    #[serde(rename = "odd_primes_below_4g2")]
    OddPrimesBelow4g2,
}

/// `[-][k][p|q]`, at least one of k and the variable.
fn eval(expr: &str, p: u64, q: u64) -> Result<i64> {
    let bad = || Error::InvalidInput(format!("bad template term {expr:?}"));
    let e = expr.trim();
    let (sign, e) = match e.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, e),
    };
    let (digits, var) = match e.chars().last() {
        Some('p') => (&e[..e.len() - 1], Some(p)),
        Some('q') => (&e[..e.len() - 1], Some(q)),
        _ => (e, None),
    };
    let k: i64 = match (digits.is_empty(), var) {
        (true, Some(_)) => 1,
        (true, None) => return Err(bad()),
        (false, _) => digits.parse().map_err(|_| bad())?,
    };
    Ok(sign * k * var.map_or(1, |v| v as i64))
}

fn positive(expr: &str, p: u64, q: u64) -> Result<u64> {
    let v = eval(expr, p, q)?;
    u64::try_from(v).map_err(|_| Error::InvalidInput(format!("{expr} = {v} must be positive")))
}

impl Family {
    pub fn instantiate(&self, p: u64) -> Result<TwistSpec> {
        let t = &self.spec;
        let q = self.q;
        TwistSpec::new(positive(&t.big_d, p, q)?, positive(&t.big_n, p, q)?, eval(&t.d, p, q)?, positive(&t.m, p, q)?)
    }

    /// Whether p meets every congruence of the family.
    pub fn admits(&self, p: u64) -> Result<bool> {
        for c in &self.require {
            let ok = match c {
                Condition::Residue { modulus, residues } => residues.contains(&(p % modulus)),
                Condition::Kronecker { top, over, equals } => {
                    let a = eval(top, p, self.q)?;
                    let ls: Vec<u64> = match over {
                        Over::Q => vec![self.q],
                        Over::OddPrimesBelow4g2 => {
                            let s = self.instantiate(p)?;
                            let g = Curve::new(s.big_d, s.big_n)?.genus();
                            primes_up_to(4 * g * g).into_iter().filter(|&l| l != 2 && l < 4 * g * g).collect()
                        }
                    };
                    ls.into_iter().all(|l| kronecker(a, l) as i64 == *equals)
                }
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn parse_families(text: &str) -> Result<Vec<Family>> {
    let f: FamilyFile = toml::from_str(text).map_err(|e| Error::InvalidInput(format!("family file: {e}")))?;
    for fam in &f.family {
        if !is_prime(fam.q) {
            return invalid(format!("family {}: q = {} is not prime", fam.name, fam.q));
        }
    }
    Ok(f.family)
}

pub fn load_families(path: &Path) -> Result<Vec<Family>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    parse_families(&text)
}

pub fn builtin_families() -> Vec<Family> {
    parse_families(BUILTIN_FAMILIES).expect("shipped family file parses")
}

pub fn find_family(name: &str) -> Result<Family> {
    builtin_families()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown family {name:?}")))
}

#[derive(Debug, Clone)]
pub struct ScanHit {
    pub p: u64,
    pub report: GlobalReport,
}

/// Primes p <= pmax admitted by the family, each with its report, ascending.
pub fn scan(family: &Family, pmax: u64) -> Result<Vec<ScanHit>> {
    let mut admitted = Vec::new();
    for p in primes_up_to(pmax) {
        if family.admits(p)? {
            admitted.push(p);
        }
    }
    let mut hits = admitted
        .into_par_iter()
        .map(|p| Ok(ScanHit { p, report: everywhere_local(&family.instantiate(p)?)? }))
        .collect::<Result<Vec<_>>>()?;
    hits.sort_by_key(|h| h.p);
    Ok(hits)
}
