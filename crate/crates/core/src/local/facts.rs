//! Arithmetic facts consulted by the deciders.
//!
//! A decider never calls the lower modules directly; it asks a `Facts`
//! source. `Live` computes and records, `Replay` answers only from a stored
//! certificate. Running the same decider against both is the replay check.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest magnitude emitted as a JSON number; beyond it, a decimal string.
const JSON_SAFE: u64 = 1 << 53;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Int(i64),
    List(Vec<i64>),
}

impl Witness {
    fn int(&self, key: &Key) -> Result<i64> {
        match self {
            Witness::Int(v) => Ok(*v),
            Witness::List(_) => Err(Error::Replay(format!("witness {key} should be an integer"))),
        }
    }

    fn list(&self, key: &Key) -> Result<Vec<i64>> {
        match self {
            Witness::List(v) => Ok(v.clone()),
            Witness::Int(_) => Err(Error::Replay(format!("witness {key} should be a list"))),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Int(v) => write!(f, "{v}"),
            Witness::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

struct Scalar(i64);

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.unsigned_abs() > JSON_SAFE {
            s.serialize_str(&self.0.to_string())
        } else {
            s.serialize_i64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Scalar(v)),
            Raw::Str(s) => s.parse().map(Scalar).map_err(serde::de::Error::custom),
        }
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Witness::Int(v) => Scalar(*v).serialize(s),
            Witness::List(v) => s.collect_seq(v.iter().map(|x| Scalar(*x))),
        }
    }
}

impl<'de> Deserialize<'de> for Witness {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(Scalar),
            Many(Vec<Scalar>),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::One(x) => Witness::Int(x.0),
            Raw::Many(v) => Witness::List(v.into_iter().map(|x| x.0).collect()),
        })
    }
}

/// What a witness is a value of. The string form is the certificate key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Key {
    /// (a / n)
    Kron(i64, u64),
    /// e_{D,N}(disc)
    Embed(u64, u64, i64),
    /// Distinct roots of H_disc mod p.
    Roots(i64, u64),
    Genus(u64, u64),
    /// #X^D_0(N)(F_p)
    CountX(u64, u64, u64),
    /// #C^D(N, d, m)(F_p), p inert in Q(sqrt d)
    Twist(u64, u64, u64, u64),
    TfPrime(u64, u64, u64, u64),
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Key::Kron(a, n) => write!(f, "kron:{a}:{n}"),
            Key::Embed(d, n, disc) => write!(f, "e:{d}:{n}:{disc}"),
            Key::Roots(disc, p) => write!(f, "roots:{disc}:{p}"),
            Key::Genus(d, n) => write!(f, "genus:{d}:{n}"),
            Key::CountX(d, n, p) => write!(f, "countx:{d}:{n}:{p}"),
            Key::Twist(d, n, m, p) => write!(f, "twist:{d}:{n}:{m}:{p}"),
            Key::TfPrime(d, n, m, p) => write!(f, "tfprime:{d}:{n}:{m}:{p}"),
        }
    }
}

impl FromStr for Key {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Replay(format!("malformed witness key {s:?}"));
        let mut it = s.split(':');
        let tag = it.next().ok_or_else(bad)?;
        let rest: Vec<&str> = it.collect();
        let u = |i: usize| rest.get(i).and_then(|x| x.parse::<u64>().ok()).ok_or_else(bad);
        let i = |i: usize| rest.get(i).and_then(|x| x.parse::<i64>().ok()).ok_or_else(bad);
        let arity = |n: usize| if rest.len() == n { Ok(()) } else { Err(bad()) };
        let key = match tag {
            "kron" => arity(2).and_then(|_| Ok(Key::Kron(i(0)?, u(1)?))),
            "e" => arity(3).and_then(|_| Ok(Key::Embed(u(0)?, u(1)?, i(2)?))),
            "roots" => arity(2).and_then(|_| Ok(Key::Roots(i(0)?, u(1)?))),
            "genus" => arity(2).and_then(|_| Ok(Key::Genus(u(0)?, u(1)?))),
            "countx" => arity(3).and_then(|_| Ok(Key::CountX(u(0)?, u(1)?, u(2)?))),
            "twist" => arity(4).and_then(|_| Ok(Key::Twist(u(0)?, u(1)?, u(2)?, u(3)?))),
            "tfprime" => arity(4).and_then(|_| Ok(Key::TfPrime(u(0)?, u(1)?, u(2)?, u(3)?))),
            _ => Err(bad()),
        }?;
        Ok(key)
    }
}

impl Key {
    /// Evaluate from scratch.
    pub fn compute(&self) -> Result<Witness> {
        use crate::trace::Curve;
        let as_i = |v: u64| Witness::Int(v as i64);
        Ok(match *self {
            Key::Kron(a, n) => {
                if n == 0 {
                    return Err(Error::InvalidInput(format!("kronecker symbol with n = 0 in {self}")));
                }
                Witness::Int(crate::arith::kronecker(a, n) as i64)
            }
            Key::Embed(d, n, disc) => as_i(crate::embed::embeddings(d, n, disc)?),
            Key::Roots(disc, p) => Witness::List(
                crate::classpoly::roots_mod(disc, p)?.distinct_roots().into_iter().map(|r| r as i64).collect(),
            ),
            Key::Genus(d, n) => as_i(Curve::new(d, n)?.genus()),
            Key::CountX(d, n, p) => as_i(Curve::new(d, n)?.count_x(p)?),
            Key::Twist(d, n, m, p) => as_i(Curve::new(d, n)?.count_twist(m, p)?),
            Key::TfPrime(d, n, m, p) => as_i(crate::trace::tf_prime(d, n, m, p)?),
        })
    }
}

/// A source of arithmetic facts. The typed helpers all go through `lookup`.
pub trait Facts {
    fn lookup(&mut self, key: Key) -> Result<Witness>;

    /// Everything looked up so far, keyed by its string form.
    fn take_witnesses(&mut self) -> BTreeMap<String, Witness>;

    fn kron(&mut self, a: i64, n: u64) -> Result<i64> {
        let k = Key::Kron(a, n);
        self.lookup(k)?.int(&k)
    }

    fn e(&mut self, d: u64, n: u64, disc: i64) -> Result<i64> {
        let k = Key::Embed(d, n, disc);
        self.lookup(k)?.int(&k)
    }

    fn roots(&mut self, disc: i64, p: u64) -> Result<Vec<i64>> {
        let k = Key::Roots(disc, p);
        self.lookup(k)?.list(&k)
    }

    fn genus(&mut self, d: u64, n: u64) -> Result<i64> {
        let k = Key::Genus(d, n);
        self.lookup(k)?.int(&k)
    }

    fn count_x(&mut self, d: u64, n: u64, p: u64) -> Result<i64> {
        let k = Key::CountX(d, n, p);
        self.lookup(k)?.int(&k)
    }

    fn count_twist(&mut self, d: u64, n: u64, m: u64, p: u64) -> Result<i64> {
        let k = Key::Twist(d, n, m, p);
        self.lookup(k)?.int(&k)
    }

    fn tf_prime(&mut self, d: u64, n: u64, m: u64, p: u64) -> Result<i64> {
        let k = Key::TfPrime(d, n, m, p);
        self.lookup(k)?.int(&k)
    }
}

/// Computes every fact and records it.
#[derive(Debug, Default)]
pub struct Live {
    seen: BTreeMap<String, Witness>,
}

impl Live {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Facts for Live {
    fn lookup(&mut self, key: Key) -> Result<Witness> {
        let name = key.to_string();
        if let Some(w) = self.seen.get(&name) {
            return Ok(w.clone());
        }
        let w = key.compute()?;
        self.seen.insert(name, w.clone());
        Ok(w)
    }

    fn take_witnesses(&mut self) -> BTreeMap<String, Witness> {
        std::mem::take(&mut self.seen)
    }
}

/// Answers only from a stored witness map; anything else is a replay error.
#[derive(Debug)]
pub struct Replay {
    stored: BTreeMap<String, Witness>,
    seen: BTreeMap<String, Witness>,
}

impl Replay {
    pub fn new(stored: BTreeMap<String, Witness>) -> Self {
        Self { stored, seen: BTreeMap::new() }
    }
}

impl Facts for Replay {
    fn lookup(&mut self, key: Key) -> Result<Witness> {
        let name = key.to_string();
        let w = self
            .stored
            .get(&name)
            .cloned()
            .ok_or_else(|| Error::Replay(format!("certificate lacks witness {name}")))?;
        self.seen.insert(name, w.clone());
        Ok(w)
    }

    fn take_witnesses(&mut self) -> BTreeMap<String, Witness> {
        std::mem::take(&mut self.seen)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_round_trip() {
        for k in [
            Key::Kron(-67, 13),
            Key::Embed(13, 1, -52),
            Key::Roots(-92, 13),
            Key::Genus(26, 1),
            Key::CountX(26, 1, 3),
            Key::Twist(26, 1, 26, 3),
            Key::TfPrime(6, 11, 1, 11),
        ] {
            assert_eq!(k.to_string().parse::<Key>().unwrap(), k);
        }
        for bad in ["kron:1", "e:1:2", "nope:1", "kron:x:3", "genus:1:2:3"] {
            assert!(bad.parse::<Key>().is_err(), "{bad}");
        }
    }

    #[test]
    fn big_witnesses_become_strings() {
        let big = Witness::Int(1 << 60);
        let s = serde_json::to_string(&big).unwrap();
        assert_eq!(s, format!("\"{}\"", 1u64 << 60));
        assert_eq!(serde_json::from_str::<Witness>(&s).unwrap(), big);
        let list = Witness::List(vec![3, -(1 << 55)]);
        let s = serde_json::to_string(&list).unwrap();
        assert_eq!(serde_json::from_str::<Witness>(&s).unwrap(), list);
    }

    #[test]
    fn replay_refuses_unknown_facts() {
        let mut live = Live::new();
        assert_eq!(live.kron(-67, 13).unwrap(), -1);
        let mut rp = Replay::new(live.take_witnesses());
        assert_eq!(rp.kron(-67, 13).unwrap(), -1);
        assert!(rp.kron(-67, 11).is_err());
    }
}
