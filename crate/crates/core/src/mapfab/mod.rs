//! Map families and forward-composition sequences.
//!
//! A [`MapSequence`] produces step maps `f_n` (for `n >= 1`) and, where a
//! closed form exists, the composites `F_n = f_n ∘ ... ∘ f_1 ∘ F_0`.
//! `F_0` is the closed form at index 0 when there is one, else the identity.

mod atoms;
mod families;
mod id;
mod ledger;
mod params;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use atoms::{Map, MapAtom};
pub use families::{
    cardioid_family, doubling_family, joukowski_disc_step, joukowski_family, power_pull_family, pull_family,
    rotated_pull_family, sweep_family, sweep_family_disc, sweep_flat_index, sweep_indices, sweep_map, SWEEP_GAP_FILL,
};
pub use id::{build_sequence, SequenceId, GRAMMAR_HELP};
pub use ledger::{ThetaLedger, LEDGER_PREC};
pub use params::{hp_multiplier, hp_multiplier_float, ExactReal, ParamSequence};

use crate::error::{Error, Result};
use crate::hypgeo::{DomainSpec, HoloMap, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RotatedPulls,
    ScalingSweep,
    Pulls,
    Joukowski,
    PowerPull,
    CardioidPowerPull,
    Custom,
}

pub type MapGen = Arc<dyn Fn(usize) -> Map + Send + Sync>;
pub type DomainGen = Arc<dyn Fn(usize) -> DomainSpec + Send + Sync>;

/// Result of an interior evaluation that may have left the f64 range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrbitValue {
    Finite(C64),
    /// `exp(log_modulus + i arg)`
    LogScale {
        log_modulus: f64,
        arg: f64,
    },
}

const LOG_SCALE_SWITCH: f64 = 1e100;

#[derive(Clone)]
pub struct MapSequence {
    id: String,
    family: Family,
    step: MapGen,
    closed: Option<MapGen>,
    domain: DomainGen,
    params: Option<ParamSequence>,
    ledger: Option<Arc<ThetaLedger>>,
}

impl fmt::Debug for MapSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapSequence")
            .field("id", &self.id)
            .field("family", &self.family)
            .field("closed_form", &self.closed.is_some())
            .finish_non_exhaustive()
    }
}

impl MapSequence {
    pub fn custom(
        id: impl Into<String>,
        step: impl Fn(usize) -> Map + Send + Sync + 'static,
        closed: Option<MapGen>,
        domain: DomainSpec,
    ) -> Self {
        Self {
            id: id.into(),
            family: Family::Custom,
            step: Arc::new(step),
            closed,
            domain: Arc::new(move |_| domain.clone()),
            params: None,
            ledger: None,
        }
    }

    pub(crate) fn from_parts(
        id: String,
        family: Family,
        step: MapGen,
        closed: Option<MapGen>,
        domain: DomainGen,
        params: Option<ParamSequence>,
        ledger: Option<Arc<ThetaLedger>>,
    ) -> Self {
        Self { id, family, step, closed, domain, params, ledger }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> Option<&ParamSequence> {
        self.params.as_ref()
    }

    pub fn ledger(&self) -> Option<&Arc<ThetaLedger>> {
        self.ledger.as_ref()
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed.is_some()
    }

    /// Step map `f_n`, `n >= 1`.
    pub fn step(&self, n: usize) -> Map {
        assert!(n >= 1, "step maps start at index 1");
        (self.step)(n)
    }

    pub fn closed_form(&self, n: usize) -> Option<Map> {
        self.closed.as_ref().map(|c| c(n))
    }

    /// `F_0`.
    pub fn initial(&self) -> Map {
        self.closed_form(0).unwrap_or_default()
    }

    /// Domain `U_n`.
    pub fn domain(&self, n: usize) -> DomainSpec {
        (self.domain)(n)
    }

    /// `F_n(z)` through the closed form when present, else by composition.
    pub fn evaluate_interior(&self, n: usize, z: C64) -> Result<C64> {
        match self.closed_form(n) {
            Some(m) => finite(m.eval(z)?, n),
            None => self.evaluate_by_composition(n, z),
        }
    }

    /// `F_n(z) = f_n(...f_1(F_0(z)))`.
    pub fn evaluate_by_composition(&self, n: usize, z: C64) -> Result<C64> {
        let mut w = self.initial().eval(z)?;
        for k in 1..=n {
            w = finite(self.step(k).eval(w)?, k)?;
        }
        Ok(w)
    }

    /// `[F_0(z), ..., F_N(z)]`, reusing the previous point when composing.
    pub fn orbit(&self, z: C64, horizon: usize) -> Result<Vec<C64>> {
        if self.closed.is_some() {
            return (0..=horizon).map(|n| self.evaluate_interior(n, z)).collect();
        }
        let mut out = Vec::with_capacity(horizon + 1);
        let mut w = self.initial().eval(z)?;
        out.push(w);
        for k in 1..=horizon {
            w = finite(self.step(k).eval(w)?, k)?;
            out.push(w);
        }
        Ok(out)
    }

    /// Composition that switches to `(log|w|, arg w)` once `|w| > 1e100`.
    /// Only affine and Joukowski steps are supported past the switch, which
    /// covers the half-plane families whose orbits grow without bound.
    pub fn evaluate_tracked(&self, n: usize, z: C64) -> Result<OrbitValue> {
        let mut w = self.initial().eval(z)?;
        let mut log: Option<(f64, f64)> = None;
        for k in 1..=n {
            let step = self.step(k);
            if let Some((lm, arg)) = log.as_mut() {
                for atom in step.atoms() {
                    match atom {
                        MapAtom::Affine { mul, .. } => {
                            *lm += mul.norm().ln();
                            *arg += mul.arg();
                        }
                        MapAtom::Joukowski => *lm -= std::f64::consts::LN_2,
                        _ => return Err(Error::Overflow(k)),
                    }
                }
                continue;
            }
            w = step.eval(w)?;
            if !w.is_finite() {
                return Err(Error::Overflow(k));
            }
            if w.norm() > LOG_SCALE_SWITCH {
                log = Some((w.norm().ln(), w.arg()));
            }
        }
        Ok(match log {
            Some((log_modulus, arg)) => OrbitValue::LogScale { log_modulus, arg },
            None => OrbitValue::Finite(w),
        })
    }
}

fn finite(w: C64, n: usize) -> Result<C64> {
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::Overflow(n))
    }
}
