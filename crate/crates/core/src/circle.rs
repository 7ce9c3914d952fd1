//! Multiprecision boundary orbits.
//!
//! Angles are kept in turns so that squaring is an exact shift. Each step
//! carries a first-order error bound: an atom with boundary derivative
//! modulus `d` maps an input error `e` to `d (e + 4u) + 4u`, where `u` is
//! the unit roundoff of the working precision.

use std::io::{self, Write};

use rand::RngCore;
use rug::float::Constant;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::ArcSet;
use crate::hypgeo::{DomainSpec, MoebiusTransform};
use crate::mapfab::{Map, MapAtom, MapSequence};
use crate::mp::{circular_distance, frac, CFloat};

/// Largest tolerated error bound, in turns (or relative units on the imaginary axis).
pub const MAX_ERROR: f64 = 1.0 / 4294967296.0;
/// Precision floor for every plan.
pub const MIN_PLAN_BITS: u32 = 105;

/// Coordinate used on the boundary of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    /// Angle in turns on the unit circle (disc, and the cardioid through its chart).
    Circle,
    /// `y` for the boundary point `iy` of the right half-plane.
    ImaginaryAxis,
}

pub fn chart_for(domain: &DomainSpec) -> Chart {
    match domain {
        DomainSpec::RightHalfPlane => Chart::ImaginaryAxis,
        _ => Chart::Circle,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitKind {
    /// Contains `z^p`, which loses `log2 p` bits per step.
    Squaring,
    Moebius,
}

pub fn orbit_kind(seq: &MapSequence) -> OrbitKind {
    if seq.step(1).contains_power() {
        OrbitKind::Squaring
    } else {
        OrbitKind::Moebius
    }
}

/// Mantissa bits needed for a horizon of `horizon` steps.
pub fn precision_plan(kind: OrbitKind, horizon: usize, target_error: f64) -> u32 {
    let n = horizon.max(1) as f64;
    match kind {
        OrbitKind::Squaring => {
            let target_bits = (1.0 / target_error).log2().ceil().max(0.0) as u32;
            (horizon as u32 + 64 + target_bits).max(MIN_PLAN_BITS)
        }
        OrbitKind::Moebius => (128 + (4.0 * n.log2()).ceil() as u32).max(MIN_PLAN_BITS),
    }
}

/// A point `exp(2πiθ)` of the unit circle with `θ` in `[0, 1)` turns.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryAngle {
    value: Float,
}

impl BoundaryAngle {
    pub fn new(value: Float) -> Result<Self> {
        if value.prec() < 64 {
            return Err(Error::InvalidParam(format!("angle precision {} below 64 bits", value.prec())));
        }
        if !value.is_finite() {
            return Err(Error::InvalidParam("angle must be finite".into()));
        }
        Ok(Self { value: frac(value) })
    }

    pub fn from_f64(turns: f64, prec: u32) -> Result<Self> {
        Self::new(Float::with_val(prec, turns))
    }

    /// Uniform angle with `bits` random binary digits.
    pub fn random(rng: &mut impl RngCore, bits: u32) -> Self {
        let words = bits.div_ceil(64) as usize;
        let digits: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        let int = Integer::from_digits(&digits, rug::integer::Order::Msf);
        let value = Float::with_val(bits.max(64) + 64, int) >> (64 * words as u32);
        Self { value: Float::with_val(bits.max(64), value) }
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn precision(&self) -> u32 {
        self.value.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

fn check_real_axis(w: &CFloat) -> Result<()> {
    let re = w.re.to_f64().abs();
    let im = w.im.to_f64().abs();
    if re > 1e-9 * (1.0 + im) {
        return Err(Error::NotCirclePreserving(format!("image leaves the imaginary axis (re = {re:e})")));
    }
    Ok(())
}

fn moebius_coeffs(m: &MoebiusTransform, prec: u32) -> [CFloat; 4] {
    m.coefficients().map(|c| CFloat::from_f64(prec, c.re, c.im))
}

/// Boundary action of one atom: new coordinate and derivative modulus.
pub fn atom_boundary(atom: &MapAtom, chart: Chart, x: &Float, prec: u32) -> Result<(Float, f64)> {
    match chart {
        Chart::Circle => circle_atom(atom, x, prec),
        Chart::ImaginaryAxis => axis_atom(atom, x, prec),
    }
}

fn circle_atom(atom: &MapAtom, theta: &Float, prec: u32) -> Result<(Float, f64)> {
    let pi = || Float::with_val(prec, Constant::Pi);
    Ok(match atom {
        MapAtom::Moebius(m) => {
            let [a, b, c, d] = moebius_coeffs(m, prec);
            let z = CFloat::unit(theta, prec);
            let num = a.mul(&z).add(&b);
            let den = c.mul(&z).add(&d);
            let (nn, dd) = (num.norm_sqr().to_f64(), den.norm_sqr().to_f64());
            if (nn - dd).abs() > 1e-9 * dd {
                return Err(Error::NotCirclePreserving(format!("|num|^2 = {nn:e}, |den|^2 = {dd:e}")));
            }
            (num.mul(&den.conj()).arg_turns(), 1.0 / dd)
        }
        MapAtom::Pull(eps) | MapAtom::PullInverse(eps) => {
            let e = eps.to_float(prec);
            let two_minus = Float::with_val(prec, 2 - &e);
            let half = Float::with_val(prec, theta * pi());
            let (s, c) = half.sin_cos(Float::new(prec));
            let (y, x) = match atom {
                MapAtom::Pull(_) => (Float::with_val(prec, &e * &s), Float::with_val(prec, &two_minus * &c)),
                _ => (Float::with_val(prec, &two_minus * &s), Float::with_val(prec, &e * &c)),
            };
            let turns = frac(Float::with_val(prec, y.atan2_ref(&x)) / pi());
            let (ef, sf, cf) = (e.to_f64(), s.to_f64(), c.to_f64());
            let a = 1.0 - ef;
            let den = match atom {
                MapAtom::Pull(_) => ef * ef + 4.0 * a * cf * cf,
                _ => ef * ef + 4.0 * a * sf * sf,
            };
            (turns, ef * (2.0 - ef) / den)
        }
        MapAtom::Rotate(r) => (frac(Float::with_val(prec, theta + r.to_float(prec))), 1.0),
        MapAtom::Power(p) => (frac(Float::with_val(prec, theta * *p)), *p as f64),
        MapAtom::PowerOfTwo(k) => (frac(Float::with_val(prec, theta << *k)), 2f64.powi(*k as i32)),
        MapAtom::CardioidForward | MapAtom::CardioidInverse => (Float::with_val(prec, theta), 1.0),
        MapAtom::Affine { .. } | MapAtom::Joukowski => {
            return Err(Error::NotCirclePreserving(format!("{atom:?} on the unit circle")))
        }
    })
}

fn axis_atom(atom: &MapAtom, y: &Float, prec: u32) -> Result<(Float, f64)> {
    Ok(match atom {
        MapAtom::Affine { mul, add } => {
            if mul.im != 0.0 || mul.re <= 0.0 || add.re != 0.0 {
                return Err(Error::NotCirclePreserving(format!("affine map {mul}z + {add} moves the imaginary axis")));
            }
            let v = Float::with_val(prec, y * mul.re) + add.im;
            (v, mul.re)
        }
        MapAtom::Joukowski => {
            if y.is_zero() {
                return Err(Error::Pole(0.0));
            }
            let inv = Float::with_val(prec, y.recip_ref());
            let v = Float::with_val(prec, y - &inv) / 2u32;
            let yf = y.to_f64();
            (v, 0.5 * (1.0 + 1.0 / (yf * yf)))
        }
        MapAtom::Moebius(m) => {
            let [a, b, c, d] = moebius_coeffs(m, prec);
            let z = CFloat::new(Float::new(prec), Float::with_val(prec, y));
            let num = a.mul(&z).add(&b);
            let den = c.mul(&z).add(&d);
            let dd = den.norm_sqr();
            let w = num.mul(&den.conj()).scale(&Float::with_val(prec, dd.recip_ref()));
            check_real_axis(&w)?;
            (w.im, 1.0 / dd.to_f64())
        }
        MapAtom::Rotate(_) | MapAtom::CardioidForward | MapAtom::CardioidInverse => {
            return Err(Error::NotCirclePreserving(format!("{atom:?} on the imaginary axis")))
        }
        other => return Err(Error::NotCirclePreserving(format!("{other:?} on the imaginary axis"))),
    })
}

/// Applies `map` to a boundary coordinate, propagating the error bound `err`.
pub fn apply_boundary(map: &Map, chart: Chart, x: &Float, err: f64, prec: u32) -> Result<(Float, f64)> {
    let u = 2f64.powi(-(prec as i32));
    let mut x = Float::with_val(prec, x);
    let mut err = err;
    for atom in map.atoms() {
        let (next, d) = atom_boundary(atom, chart, &x, prec)?;
        let scale = match chart {
            Chart::Circle => 1.0,
            Chart::ImaginaryAxis => next.to_f64().abs().max(1.0),
        };
        err = d * (err + 4.0 * u * scale) + 4.0 * u * scale;
        x = next;
    }
    Ok((x, err))
}

/// Boundary action of the step map `f_n`.
pub fn boundary_step(seq: &MapSequence, n: usize, theta: &BoundaryAngle) -> Result<BoundaryAngle> {
    let prec = theta.precision();
    let (x, _) = apply_boundary(&seq.step(n), Chart::Circle, theta.value(), 0.0, prec)?;
    BoundaryAngle::new(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub chart: Chart,
    /// `F_0(ζ), ..., F_N(ζ)` as boundary coordinates.
    pub coords: Vec<Float>,
    pub horizon: usize,
    pub precision: u32,
    /// Nondecreasing error bound per index.
    pub err_bounds: Vec<f64>,
}

impl OrbitTrace {
    pub fn last(&self) -> &Float {
        self.coords.last().expect("trace is never empty")
    }
}

/// Orbit of a boundary coordinate under the step maps, computed at the
/// precision of `x0`. For sequences with a closed form every index is
/// recomputed directly and both paths must agree within their bounds.
pub fn boundary_orbit(seq: &MapSequence, x0: &Float, horizon: usize) -> Result<OrbitTrace> {
    orbit_impl(seq, x0, horizon, true)
}

/// As [`boundary_orbit`] without the closed-form cross-check.
pub fn boundary_orbit_unchecked(seq: &MapSequence, x0: &Float, horizon: usize) -> Result<OrbitTrace> {
    orbit_impl(seq, x0, horizon, false)
}

fn orbit_impl(seq: &MapSequence, x0: &Float, horizon: usize, cross_check: bool) -> Result<OrbitTrace> {
    let chart = chart_for(&seq.domain(0));
    let prec = x0.prec();
    let (mut x, mut err) = apply_boundary(&seq.initial(), chart, x0, 0.0, prec)?;
    let mut coords = Vec::with_capacity(horizon + 1);
    let mut err_bounds = Vec::with_capacity(horizon + 1);
    coords.push(x.clone());
    err_bounds.push(err);
    let slack = 2f64.powi(8 - prec as i32);
    for n in 1..=horizon {
        let (next, e) = apply_boundary(&seq.step(n), chart, &x, err, prec)?;
        err = e.max(err);
        if !(err <= MAX_ERROR) {
            return Err(Error::PrecisionExhausted { step: n, bound: err, bits: prec });
        }
        if cross_check {
            if let Some(closed) = seq.closed_form(n) {
                let (direct, e2) = apply_boundary(&closed, chart, x0, 0.0, prec)?;
                let diff = match chart {
                    Chart::Circle => circular_distance(&direct, &next).to_f64(),
                    Chart::ImaginaryAxis => {
                        Float::with_val(prec, &direct - &next).to_f64().abs() / next.to_f64().abs().max(1.0)
                    }
                };
                let bound = err + e2 + slack;
                if diff > bound {
                    return Err(Error::PathDisagreement { step: n, diff, bound });
                }
            }
        }
        x = next;
        coords.push(x.clone());
        err_bounds.push(err);
    }
    Ok(OrbitTrace { chart, coords, horizon, precision: prec, err_bounds })
}

/// Recomputes the orbit at twice the precision and returns the largest
/// coordinate difference; fails when it exceeds `2^-32` turns.
pub fn precision_adequacy(seq: &MapSequence, x0: &Float, horizon: usize) -> Result<f64> {
    let base = boundary_orbit_unchecked(seq, x0, horizon)?;
    let fine_x0 = Float::with_val(2 * x0.prec(), x0);
    let fine = boundary_orbit_unchecked(seq, &fine_x0, horizon)?;
    let mut worst = 0.0f64;
    for (n, (a, b)) in base.coords.iter().zip(&fine.coords).enumerate() {
        let d = match base.chart {
            Chart::Circle => circular_distance(a, b).to_f64(),
            Chart::ImaginaryAxis => Float::with_val(b.prec(), a - b).to_f64().abs() / b.to_f64().abs().max(1.0),
        };
        if d > MAX_ERROR {
            return Err(Error::PrecisionExhausted { step: n, bound: d, bits: x0.prec() });
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Indices `n` with `F_n(ζ) ∈ A`.
pub fn arc_visits(trace: &OrbitTrace, set: &ArcSet) -> Vec<usize> {
    assert_eq!(trace.chart, Chart::Circle, "arc visits need circle coordinates");
    trace.coords.iter().enumerate().filter(|(_, x)| set.contains_float(x)).map(|(n, _)| n).collect()
}

/// Fraction of the `k` equal arcs `[j/k, (j+1)/k)` visited by `F_1, ..., F_N`.
pub fn density_score(trace: &OrbitTrace, k: usize) -> f64 {
    assert!(k >= 2, "need at least two arcs");
    let mut seen = vec![false; k];
    let points = if trace.coords.len() > 1 { &trace.coords[1..] } else { &trace.coords[..] };
    for x in points {
        let idx = ((x.to_f64() * k as f64).floor() as usize).min(k - 1);
        seen[idx] = true;
    }
    seen.iter().filter(|&&s| s).count() as f64 / k as f64
}

/// Truncates `x` in `[0, 1)` to 40 decimals.
fn decimal_40(x: &Float) -> String {
    let ten40 = Integer::from(Integer::u_pow_u(10, 40));
    let scaled = Float::with_val(x.prec() + 160, x) * &ten40;
    let (int, _) = scaled.to_integer_round(rug::float::Round::Down).expect("finite");
    if int < 0 {
        return format!("{}", x.to_f64());
    }
    let (whole, rem) = int.div_rem(ten40);
    format!("{whole}.{:0>40}", rem.to_string())
}

/// Writes `n,angle_turns,err_bound` rows.
pub fn write_csv(trace: &OrbitTrace, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "n,angle_turns,err_bound")?;
    for (n, (x, e)) in trace.coords.iter().zip(&trace.err_bounds).enumerate() {
        writeln!(out, "{n},{},{e:e}", decimal_40(x))?;
    }
    Ok(())
}
