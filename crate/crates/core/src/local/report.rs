//! Everywhere-local aggregation and certificate checking.

use std::collections::BTreeSet;
use std::str::FromStr;

use rayon::prelude::*;

use crate::arith::{prime_divisors, primes_up_to};
use crate::error::{Error, Result};
use crate::trace::Curve;

use super::decide::{decide_place, decide_place_with};
use super::facts::{Key, Replay};
use super::{Place, PlaceVerdict, Status, TwistSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Overall {
    EverywhereLocal,
    /// Exactly the places whose verdict is Empty.
    FailsAt(Vec<Place>),
    Undetermined,
}

impl Overall {
    pub fn name(&self) -> &'static str {
        match self {
            Overall::EverywhereLocal => "EverywhereLocal",
            Overall::FailsAt(_) => "FailsAt",
            Overall::Undetermined => "Undetermined",
        }
    }

    pub fn from_verdicts(verdicts: &[PlaceVerdict]) -> Self {
        let empty: Vec<Place> =
            verdicts.iter().filter(|v| v.status == Status::Empty).map(|v| v.place).collect();
        if !empty.is_empty() {
            Overall::FailsAt(empty)
        } else if verdicts.iter().any(|v| v.status == Status::Unknown) {
            Overall::Undetermined
        } else {
            Overall::EverywhereLocal
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalReport {
    pub spec: TwistSpec,
    /// Real place first, then primes ascending, then the Weil tail.
    pub verdicts: Vec<PlaceVerdict>,
    pub overall: Overall,
}

impl GlobalReport {
    pub fn verdict(&self, place: Place) -> Option<&PlaceVerdict> {
        self.verdicts.iter().find(|v| v.place == place)
    }
}

/// The places a report lists: real, primes of 2dDN, primes up to 4g^2,
/// and one tail entry for all remaining primes.
pub fn places(spec: &TwistSpec) -> Result<Vec<Place>> {
    let g = Curve::new(spec.big_d, spec.big_n)?.genus();
    let bound = 4 * g * g;
    let mut primes: BTreeSet<u64> = prime_divisors(2 * spec.d.unsigned_abs() * spec.dn()).into_iter().collect();
    primes.extend(primes_up_to(bound));
    let mut out = vec![Place::Real];
    out.extend(primes.into_iter().map(Place::Prime));
    out.push(Place::Rest { bound });
    Ok(out)
}

pub fn everywhere_local(spec: &TwistSpec) -> Result<GlobalReport> {
    let verdicts = places(spec)?
        .into_par_iter()
        .map(|place| decide_place(spec, place))
        .collect::<Result<Vec<_>>>()?;
    let overall = Overall::from_verdicts(&verdicts);
    Ok(GlobalReport { spec: *spec, verdicts, overall })
}

/// Rerun the decider on the stored witnesses only. The clause, the status
/// and the set of consulted witnesses must all come out the same.
pub fn replay(spec: &TwistSpec, verdict: &PlaceVerdict) -> Result<()> {
    let mut facts = Replay::new(verdict.certificate.witnesses.clone());
    let again = decide_place_with(spec, verdict.place, &mut facts)?;
    let cert = &verdict.certificate;
    if again.status != verdict.status || again.certificate.clause != cert.clause {
        return Err(Error::Replay(format!(
            "{} at {}: stored {} / {}, replayed {} / {}",
            spec, verdict.place, verdict.status, cert.clause, again.status, again.certificate.clause
        )));
    }
    if again.certificate.witnesses.len() != cert.witnesses.len() {
        return Err(Error::Replay(format!("{} at {}: unused witnesses", spec, verdict.place)));
    }
    Ok(())
}

/// Recompute every witness from scratch and compare.
pub fn verify_witnesses(verdict: &PlaceVerdict) -> Result<()> {
    for (name, stored) in &verdict.certificate.witnesses {
        let fresh = Key::from_str(name)?.compute()?;
        if &fresh != stored {
            return Err(Error::Replay(format!("witness {name}: stored {stored}, computed {fresh}")));
        }
    }
    Ok(())
}
