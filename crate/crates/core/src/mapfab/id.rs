use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harmonic::CircleArc;

use super::families::*;
use super::params::ParamSequence;
use super::MapSequence;

/// `<family>[:<param>=<value>[,...]]`, e.g. `ex8.3:a=1-1/n` or `thmD:theta=pi/8`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceId {
    pub family: String,
    pub params: Vec<(String, String)>,
}

impl SequenceId {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn bad(&self, reason: impl Into<String>) -> Error {
        Error::BadSequenceId { id: self.to_string(), reason: reason.into() }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.params {
            if !allowed.contains(&k.as_str()) {
                return Err(self.bad(format!("unknown parameter {k:?} for family {}", self.family)));
            }
        }
        Ok(())
    }
}

impl FromStr for SequenceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadSequenceId { id: s.to_string(), reason: reason.to_string() };
        let (family, rest) = match s.split_once(':') {
            Some((f, r)) => (f, Some(r)),
            None => (s, None),
        };
        if family.is_empty() {
            return Err(bad("empty family"));
        }
        let mut params = Vec::new();
        if let Some(rest) = rest {
            for part in rest.split(',') {
                let (k, v) = part.split_once('=').ok_or_else(|| bad("expected <param>=<value>"))?;
                if k.is_empty() || v.is_empty() {
                    return Err(bad("empty parameter name or value"));
                }
                if params.iter().any(|(p, _): &(String, String)| p == k) {
                    return Err(bad("duplicate parameter"));
                }
                params.push((k.to_string(), v.to_string()));
            }
        }
        Ok(SequenceId { family: family.to_string(), params })
    }
}

impl fmt::Display for SequenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

/// Half-width of `S` in turns from `pi/k`, `<c>*pi` or plain radians.
fn parse_theta(v: &str) -> Option<f64> {
    if let Some(k) = v.strip_prefix("pi/") {
        let k: f64 = k.parse().ok()?;
        return Some(0.5 / k);
    }
    if let Some(c) = v.strip_suffix("*pi") {
        let c: f64 = c.parse().ok()?;
        return Some(c / 2.0);
    }
    v.parse::<f64>().ok().map(|r| r / std::f64::consts::TAU)
}

/// Builds a sequence from its string ID.
pub fn build_sequence(id: &str) -> Result<MapSequence> {
    let sid: SequenceId = id.parse()?;
    let param = |default: ParamSequence| -> Result<ParamSequence> {
        match sid.get("a") {
            Some(v) => ParamSequence::parse(v).map_err(|e| sid.bad(e.to_string())),
            None => Ok(default),
        }
    };
    match sid.family.as_str() {
        "ex8.3" => {
            sid.check_keys(&["a"])?;
            Ok(power_pull_family(param(ParamSequence::one_minus_reciprocal())?))
        }
        "ex8.1" => {
            sid.check_keys(&["a"])?;
            Ok(pull_family(param(ParamSequence::one_minus_reciprocal())?))
        }
        "ex8.2" => {
            sid.check_keys(&[])?;
            Ok(joukowski_family())
        }
        "ex4.3" => {
            sid.check_keys(&[])?;
            Ok(cardioid_family())
        }
        "ex7.3" => {
            sid.check_keys(&["model"])?;
            match sid.get("model").unwrap_or("halfplane") {
                "halfplane" => Ok(sweep_family()),
                "disc" => Ok(sweep_family_disc()),
                other => Err(sid.bad(format!("unknown model {other:?}"))),
            }
        }
        "thmD" => {
            sid.check_keys(&["theta", "a"])?;
            let theta = sid.get("theta").unwrap_or("pi/8");
            let half = parse_theta(theta).ok_or_else(|| sid.bad(format!("bad theta {theta:?}")))?;
            let arc = CircleArc::centered(0.0, 2.0 * half).map_err(|e| sid.bad(e.to_string()))?;
            rotated_pull_family(param(ParamSequence::OneMinusReciprocal { offset: 1 })?, &arc)
        }
        "doubling" => {
            sid.check_keys(&[])?;
            Ok(doubling_family())
        }
        other => Err(sid.bad(format!("unknown family {other:?}"))),
    }
}

/// Families accepted by [`build_sequence`], with their parameters.
pub const GRAMMAR_HELP: &str = "\
<family>[:<param>=<value>[,...]]
  ex8.3[:a=<seq>]          B_n(z) = M_n(z^(2^n))           (default a=1-1/n)
  ex8.1[:a=<seq>]          pure pulls M_n                  (default a=1-1/n)
  ex8.2                    half-plane b_n(z) = (λ_n z + 1/(λ_n z))/2
  ex7.3[:model=halfplane|disc]
  ex4.3                    cardioid self-maps, a_n = 1-1/n
  thmD[:theta=pi/k,a=<seq>] empty Denjoy-Wolff set       (default theta=pi/8, a=1-1/(n+1))
  doubling                 z -> z^2
<seq>: 1-1/n | 1-1/(n+<k>) | 1-2^-n | 1-<q>^n";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapfab::Family;

    #[test]
    fn ids_round_trip() {
        for s in ["ex8.3:a=1-1/n", "thmD:theta=pi/8", "ex8.2", "ex7.3:model=disc"] {
            assert_eq!(s.parse::<SequenceId>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn builds_every_family() {
        assert_eq!(build_sequence("ex8.3:a=1-2^-n").unwrap().family(), Family::PowerPull);
        assert_eq!(build_sequence("thmD:theta=pi/8").unwrap().family(), Family::RotatedPulls);
        assert_eq!(build_sequence("ex7.3").unwrap().family(), Family::ScalingSweep);
        assert_eq!(build_sequence("ex4.3").unwrap().family(), Family::CardioidPowerPull);
        assert_eq!(build_sequence("ex8.1").unwrap().family(), Family::Pulls);
        assert_eq!(build_sequence("ex8.2").unwrap().family(), Family::Joukowski);
    }

    #[test]
    fn rejects_malformed_ids() {
        for s in ["", "ex8.3:a", "ex8.3:b=1", "nope", "thmD:theta=pi/2", "ex8.3:a=1-1/n,a=1-2^-n"] {
            assert!(build_sequence(s).is_err(), "{s}");
        }
    }
}
