//! Harmonic measure: exact on the disc via Möbius invariance, exact arc
//! algebra and preimages, and walk-on-spheres for other domains.

mod arcs;
mod wos;

use rug::Float;
use serde::{Deserialize, Serialize};

pub use arcs::{
    fixed_to_float, fixed_to_turns, float_to_fixed, overlap_bound_holds, turns_to_fixed, ArcSet, CircleArc, TURN,
    TURN_BITS,
};
pub(crate) use wos::with_workers;
pub use wos::{
    alpha_exponent_probe, walk_on_spheres, AlphaFit, ProbeGeometry, SectorComplement, Truncated, WalkConfig, WalkDomain,
};

use crate::circle::{atom_boundary, Chart};
use crate::error::{Error, Result};
use crate::hypgeo::{HoloMap, C64};
use crate::mapfab::{Map, MapAtom};
use crate::mp::{frac, CFloat};

/// Precision used for arc endpoints.
pub const ARC_PREC: u32 = 192;
/// Largest arc set produced by a power preimage.
pub const MAX_SEGMENTS: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    WalkOnSpheres,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HMEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub method: Method,
    pub seed: Option<u64>,
}

impl HMEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, n_samples: 0, method: Method::Exact, seed: None }
    }
}

/// `ω(z, A, D)`: push every arc through `w -> (w - z)/(1 - conj(z) w)` and
/// add up the image lengths.
pub fn harmonic_measure_disc(z: C64, set: &ArcSet) -> Result<HMEstimate> {
    if !(z.norm() < 1.0) {
        return Err(Error::OutsideDomain(format!("{z} (unit-disc)")));
    }
    if set.is_full() {
        return Ok(HMEstimate::exact(1.0));
    }
    let p = ARC_PREC;
    let zc = CFloat::from_f64(p, z.re, z.im);
    let one = CFloat::from_f64(p, 1.0, 0.0);
    let image = |x: u128| -> Float {
        let w = CFloat::unit(&fixed_to_float(x, p), p);
        let num = w.sub(&zc);
        let den = one.sub(&zc.conj().mul(&w));
        num.mul(&den.conj()).arg_turns()
    };
    let mut total = Float::new(p);
    for arc in set.arcs() {
        let s = image(arc.start());
        let e = image((arc.start() + arc.length()) % TURN);
        total += frac(Float::with_val(p, &e - &s));
    }
    Ok(HMEstimate::exact(total.to_f64().clamp(0.0, 1.0)))
}

fn inverse_atom(atom: &MapAtom) -> Result<MapAtom> {
    Ok(match atom {
        MapAtom::Pull(e) => MapAtom::PullInverse(e.clone()),
        MapAtom::PullInverse(e) => MapAtom::Pull(e.clone()),
        MapAtom::Rotate(r) => MapAtom::Rotate(r.neg()),
        MapAtom::Moebius(m) => MapAtom::Moebius(m.inverse()),
        MapAtom::CardioidForward => MapAtom::CardioidInverse,
        MapAtom::CardioidInverse => MapAtom::CardioidForward,
        other => return Err(Error::NotCirclePreserving(format!("{other:?} has no boundary inverse"))),
    })
}

fn preimage_atom(atom: &MapAtom, set: &ArcSet) -> Result<ArcSet> {
    match atom {
        MapAtom::Power(p) => power_preimage(set, *p as u128),
        MapAtom::PowerOfTwo(k) => {
            if *k >= 64 {
                return Err(Error::TooManyArcs(usize::MAX));
            }
            power_preimage(set, 1u128 << k)
        }
        _ => {
            let reversing = match atom {
                MapAtom::Moebius(m) => {
                    if m.is_disc_automorphism(1e-9) {
                        false
                    } else if m.inverse().apply(C64::new(0.0, 0.0)).map(|w| w.norm() > 1.0).unwrap_or(false)
                        && [0.0, 1.0 / 3.0, 2.0 / 3.0].iter().all(|t| {
                            let z = C64::from_polar(1.0, std::f64::consts::TAU * t);
                            matches!(m.apply(z), Ok(w) if (w.norm() - 1.0).abs() < 1e-9)
                        })
                    {
                        true
                    } else {
                        return Err(Error::NotCirclePreserving(format!("{m:?}")));
                    }
                }
                _ => false,
            };
            let inv = inverse_atom(atom)?;
            if set.is_full() || set.is_empty() {
                return Ok(set.clone());
            }
            let g = |x: u128| -> Result<u128> {
                let (y, _) = atom_boundary(&inv, Chart::Circle, &fixed_to_float(x, ARC_PREC), ARC_PREC)?;
                Ok(float_to_fixed(&y))
            };
            let mut arcs = Vec::new();
            for arc in set.arcs() {
                let (s, e) = (g(arc.start())?, g((arc.start() + arc.length()) % TURN)?);
                let (s, e) = if reversing { (e, s) } else { (s, e) };
                let len = (e + TURN - s) % TURN;
                if len > 0 {
                    arcs.push(CircleArc::from_fixed(s, len)?);
                }
            }
            Ok(ArcSet::from_arcs(arcs))
        }
    }
}

/// Preimage of `set` under `z -> z^p`: `p` copies scaled by `1/p`.
fn power_preimage(set: &ArcSet, p: u128) -> Result<ArcSet> {
    if p == 0 {
        return Err(Error::InvalidParam("power 0".into()));
    }
    let count = set.segments().len().saturating_mul(p as usize);
    if count > MAX_SEGMENTS {
        return Err(Error::TooManyArcs(count));
    }
    let (q, r) = (TURN / p, TURN % p);
    // floor((j TURN + x) / p) = j q + floor((j r + x) / p)
    let scaled = |j: u128, x: u128| j * q + (j * r + x) / p;
    let mut segs = Vec::with_capacity(count);
    for j in 0..p {
        for &(s, e) in set.segments() {
            segs.push((scaled(j, s), scaled(j, e)));
        }
    }
    Ok(ArcSet::from_segments(segs))
}

/// Preimage of `set` under the boundary action of `map`, chained right to left.
pub fn preimage_arcset(map: &Map, set: &ArcSet) -> Result<ArcSet> {
    map.atoms().iter().rev().try_fold(set.clone(), |acc, atom| preimage_atom(atom, &acc))
}

/// `ω(f(z), S) - ω(z, f^{-1}(S))`, nonnegative by Löwner's lemma and zero
/// for Möbius maps and powers.
pub fn loewner_check(map: &Map, z: C64, set: &ArcSet) -> Result<f64> {
    let fz = map.eval(z)?;
    let lhs = harmonic_measure_disc(fz, set)?.value;
    let rhs = harmonic_measure_disc(z, &preimage_arcset(map, set)?)?.value;
    Ok(lhs - rhs)
}

/// `(4/π) u_max atan(sqrt(|z| / r))`.
pub fn milloux_schmidt_bound(u_max: f64, r: f64, z_abs: f64) -> Result<f64> {
    if !(z_abs > 0.0 && z_abs < r) {
        return Err(Error::InvalidParam(format!("need 0 < |z| < r, got |z| = {z_abs}, r = {r}")));
    }
    Ok(4.0 / std::f64::consts::PI * u_max * (z_abs / r).sqrt().atan())
}

/// `I = [1/2 - ε/2, 1/2 + ε/2)`, with `ε = 1` giving the full circle.
pub fn shrinking_target_interval(eps: f64) -> Result<ArcSet> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParam(format!("target size {eps} outside (0, 1]")));
    }
    if eps == 1.0 {
        return Ok(ArcSet::full());
    }
    let half = TURN / 2;
    let h = ((eps * half as f64) as u128).max(1);
    Ok(ArcSet::from_segments(vec![(half - h, half + h)]))
}

/// `A_n`: preimage of the target interval of size `ε` under `z^(2^n)`.
pub fn shrinking_target_preimage(n: u32, eps: f64) -> Result<ArcSet> {
    preimage_arcset(&Map::new(vec![MapAtom::PowerOfTwo(n)]), &shrinking_target_interval(eps)?)
}
