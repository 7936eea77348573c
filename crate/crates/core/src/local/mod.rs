//! Local solubility of Atkin-Lehner twists C^D(N, d, m) at every place.
//!
//! Each verdict names the clause that decided it and carries the arithmetic
//! facts the clause consulted, so it can be replayed without recomputing.
//! Empty is only ever emitted from a biconditional clause list; sufficient
//! conditions give Nonempty; places no theorem covers give Unknown.

mod decide;
mod facts;
mod report;

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use crate::arith::{is_squarefree, prime_divisors};
use crate::error::{invalid, Result};

pub use decide::{
    decide_divd, decide_divn, decide_good, decide_place, decide_place_with, decide_ramified, decide_real,
};
pub use facts::{Facts, Key, Live, Replay, Witness};
pub use report::{everywhere_local, places, replay, verify_witnesses, GlobalReport, Overall};

/// The twist of X^D_0(N) by Q(sqrt d) and w_m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwistSpec {
    /// Quaternion discriminant D.
    pub big_d: u64,
    /// Level N.
    pub big_n: u64,
    pub d: i64,
    pub m: u64,
}

impl TwistSpec {
    pub fn new(big_d: u64, big_n: u64, d: i64, m: u64) -> Result<Self> {
        if big_d == 0 || !is_squarefree(big_d as i64) || prime_divisors(big_d).len() % 2 == 1 {
            return invalid(format!("D = {big_d} must be squarefree with an even number of prime factors"));
        }
        if big_n == 0 || !is_squarefree(big_n as i64) {
            return invalid(format!("N = {big_n} must be positive and squarefree"));
        }
        if big_d.gcd(&big_n) != 1 {
            return invalid(format!("gcd(D, N) = gcd({big_d}, {big_n}) must be 1"));
        }
        if d == 0 || d == 1 || !is_squarefree(d) {
            return invalid(format!("d = {d} must be squarefree and not 0 or 1"));
        }
        if m == 0 || (big_d * big_n) % m != 0 {
            return invalid(format!("m = {m} must be a positive divisor of DN = {}", big_d * big_n));
        }
        Ok(Self { big_d, big_n, d, m })
    }

    pub fn dn(&self) -> u64 {
        self.big_d * self.big_n
    }
}

impl fmt::Display for TwistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C^{}({}, {}, {})", self.big_d, self.big_n, self.d, self.m)
    }
}

/// A place of Q. `Rest` stands for every prime above `bound` that is not
/// listed separately in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Prime(u64),
    Rest { bound: u64 },
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "real"),
            Place::Prime(p) => write!(f, "{p}"),
            Place::Rest { bound } => write!(f, "p>{bound}"),
        }
    }
}

impl std::str::FromStr for Place {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || crate::Error::InvalidInput(format!("unrecognised place {s:?}"));
        if s == "real" {
            Ok(Place::Real)
        } else if let Some(b) = s.strip_prefix("p>") {
            Ok(Place::Rest { bound: b.parse().map_err(|_| bad())? })
        } else {
            Ok(Place::Prime(s.parse().map_err(|_| bad())?))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Nonempty,
    Empty,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Nonempty => "nonempty",
            Status::Empty => "empty",
            Status::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Status {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonempty" => Ok(Status::Nonempty),
            "empty" => Ok(Status::Empty),
            "unknown" => Ok(Status::Unknown),
            _ => invalid(format!("unrecognised status {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub clause: String,
    pub witnesses: BTreeMap<String, Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceVerdict {
    pub place: Place,
    pub status: Status,
    pub certificate: Certificate,
}

/// Every clause id the engine can emit, with the condition it stands for.
pub const CLAUSES: &[(&str, &str)] = &[
    ("Real.split", "d > 0 or m = 1: real points iff D = 1"),
    ("Real.D1", "d < 0, D = 1: real points of X_0(N) map onto the twist"),
    ("Real.fullAL", "d < 0, m = DN: e_{D,N}(-4DN) > 0 gives a real fixed point of w_DN"),
    ("Gap.real", "d < 0, D > 1, m < DN: no criterion"),
    ("Good.WeilBound", "p unramified and p > 4g^2"),
    ("Good.count", "#X(F_p) > 0, exact count"),
    ("Good.SSFull", "p inert, m = DN"),
    ("Good.SS.1", "p inert, mp != 3 mod 4, e_{Dp,N}(-4mp) != 0"),
    ("Good.SS.2", "p inert, mp = 3 mod 4, e_{Dp,N}(-4mp) or e_{Dp,N}(-mp) != 0"),
    ("Good.twist", "p inert, #C(F_p) > 0, exact count"),
    ("Ram.1", "(-m/p) = 1, e_{D,N}(-4m) != 0, H_{-4m} has a root mod p"),
    ("Ram.2", "(-m/p) = 1, m = 3 mod 4, e_{D,N}(-m) != 0, H_{-m} has a root mod p"),
    ("Ram.3", "(-DN/p) = -1, m = DN, D odd, (-p/q) = -1 on D, = 1 on odd q | N"),
    ("Ram.4", "N even, (-DN/2 / p) = -1, m = DN/2, (-p/q) = -1 on D, = 1 on odd q | N"),
    ("Ram.5", "D even, (-DN/p) = -1, m = DN, p = +-3 mod 8, (-p/q) = -1 on D/2, = 1 on N"),
    ("Ram.6", "D even, (-DN/2 / p) = -1, m = DN/2, DN = 2,6,10 mod 16, p = +-3 mod 8, (-p/q) = -1 on D, = 1 on N"),
    ("Ram.none", "p ramified, p not dividing 2DN: no clause holds"),
    ("Gap.p2ramified", "p = 2 ramified in Q(sqrt d), m > 1: no criterion"),
    ("Gap.ramified-divides-DN", "p | DN ramified in Q(sqrt d), m > 1: no criterion"),
    ("pD.split.1", "p | D split: p = 2, q = 3 mod 4 on D/2, q = 1 mod 4 on N"),
    ("pD.split.2", "p | D split: p = 1 mod 4, D = 2p, N = 1"),
    ("pD.split", "p | D split: neither clause holds"),
    ("pD.inert.pm.1", "p | D inert, m = p, e_{D/p,N}(-4) != 0"),
    ("pD.inert.pm.2", "p | D inert, m = p, e_{D/p,N}(-3) != 0"),
    ("pD.inert.pm.3", "p | D inert, m = 2p, e_{D/p,N}(-4) or e_{D/p,N}(-8) != 0"),
    ("pD.inert.pm.4", "p | D inert, m/p != 3 mod 4, e_{D/p,N}(-4m/p) != 0"),
    ("pD.inert.pm.5", "p | D inert, m/p = 3 mod 4, e_{D/p,N}(-4m/p) or e_{D/p,N}(-m/p) != 0"),
    ("pD.inert.pm", "p | D inert, p | m: no clause holds"),
    ("pD.inert.pn.1", "p | D inert, p = 2, m = 1, q = 3 mod 4 on D/2, q = 1 mod 4 on N"),
    ("pD.inert.pn.2", "p | D inert, p = 1 mod 4, m = DN/2p, q != 1 mod 4 on D/p, q != 3 mod 4 on N"),
    ("pD.inert.pn.3", "p | D inert, p = 2, m = DN/2, q = 3 mod 4 on D/2, q = 1 mod 4 on N"),
    ("pD.inert.pn.4", "p | D inert, p = 1 mod 4, m = DN/p, q != 1 mod 4 on D/p, q != 3 mod 4 on N"),
    ("pD.inert.pn", "p | D inert, p not dividing m: no clause holds"),
    ("pN.a.cusp", "p | N split or m = 1: D = 1, rational cusp"),
    ("pN.a.zeta4", "p | N split: p = 2, q = 3 mod 4 on D, q = 1 mod 4 on N/2"),
    ("pN.a.zeta6", "p | N split: p = 3, q = 2 mod 3 on D, q = 1 mod 3 on N/3"),
    ("pN.a.tf", "p | N split: TF'(D,N,1,p) > 0"),
    ("pN.a", "p | N split: no clause holds"),
    ("pN.b.i.1", "p | N inert, p | m: p = 2, m in {2, DN}, q = 3 mod 4 on D, q = 1 mod 4 on N/2"),
    ("pN.b.i.2", "p | N inert, p | m: p = 3 mod 4, m in {p, 2p}, q != 1 mod 4 on D, q != 3 mod 4 on N/p"),
    ("pN.b.i", "p | N inert, p | m: no clause holds"),
    ("pN.b.ii.1", "p | N inert: m = D = 1"),
    ("pN.b.ii.2", "p | N inert: p = 2, m = 1, q = 3 mod 4 on D, q = 1 mod 4 on N/2"),
    ("pN.b.ii.3", "p | N inert: p = 3, m = 1, q = 2 mod 3 on D, q = 1 mod 3 on N/3"),
    ("pN.b.ii.4", "p | N inert: p = 3 mod 4, m = DN/2p, q != 1 mod 4 on D, q != 3 mod 4 on N/p"),
    ("pN.b.ii.5", "p | N inert: p = 2 mod 3, m = DN/3p, q != 1 mod 3 on D, q != 2 mod 3 on N/p"),
    ("pN.b.ii.6", "p | N inert: m = DN/p, p != 1 mod 4, q != 1 mod 4 on D, q != 3 mod 4 on N/p"),
    ("pN.b.ii.7", "p | N inert: m = DN/p, p != 1 mod 3, q != 1 mod 3 on D, q != 2 mod 3 on N/p"),
    ("pN.b.ii.8", "p | N inert: TF'(D,N,m,p) > 0"),
    ("pN.b.ii", "p | N inert, p not dividing m: no clause holds"),
];

/// The gap clauses: the only ones allowed to carry Unknown.
pub const GAP_CLAUSES: [&str; 3] = ["Gap.p2ramified", "Gap.ramified-divides-DN", "Gap.real"];

pub fn is_registered(clause: &str) -> bool {
    CLAUSES.iter().any(|(id, _)| *id == clause)
}

pub fn clause_description(clause: &str) -> Option<&'static str> {
    CLAUSES.iter().find(|(id, _)| *id == clause).map(|(_, d)| *d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(TwistSpec::new(26, 1, -67, 26).is_ok());
        assert!(TwistSpec::new(2, 1, 5, 1).is_err());
        assert!(TwistSpec::new(6, 3, 5, 1).is_err());
        assert!(TwistSpec::new(6, 1, 4, 1).is_err());
        assert!(TwistSpec::new(6, 1, 1, 1).is_err());
        assert!(TwistSpec::new(6, 1, 5, 4).is_err());
        assert!(TwistSpec::new(1, 4, 5, 1).is_err());
    }

    #[test]
    fn place_strings_round_trip() {
        for p in [Place::Real, Place::Prime(67), Place::Rest { bound: 16 }] {
            assert_eq!(p.to_string().parse::<Place>().unwrap(), p);
        }
        assert!("x".parse::<Place>().is_err());
    }

    #[test]
    fn registry_ids_are_unique() {
        let mut ids: Vec<_> = CLAUSES.iter().map(|c| c.0).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), CLAUSES.len());
        assert!(GAP_CLAUSES.iter().all(|g| is_registered(g)));
    }
}
