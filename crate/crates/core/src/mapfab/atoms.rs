use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::hypgeo::{cardioid_forward, cardioid_inverse, HoloMap, MoebiusTransform, C64, POLE_EPS};

use super::params::ExactReal;

/// Elementary building block of the built-in map families.
#[derive(Debug, Clone, PartialEq)]
pub enum MapAtom {
    Moebius(MoebiusTransform),
    /// `z -> (z + a) / (1 + a z)` with `a = 1 - eps` real.
    Pull(ExactReal),
    /// `z -> (z - a) / (1 - a z)` with `a = 1 - eps` real.
    PullInverse(ExactReal),
    /// Rotation by the given number of turns.
    Rotate(ExactReal),
    Power(u32),
    /// `z -> z^(2^k)`, evaluated through the exponent.
    PowerOfTwo(u32),
    Affine {
        mul: C64,
        add: C64,
    },
    /// `z -> (z + 1/z) / 2`
    Joukowski,
    /// `w -> (w - 1)^2`, disc onto cardioid.
    CardioidForward,
    /// `z -> 1 - sqrt(z)`, cardioid onto disc.
    CardioidInverse,
}

impl MapAtom {
    pub fn pull_parameter(&self) -> Option<&ExactReal> {
        match self {
            MapAtom::Pull(e) | MapAtom::PullInverse(e) => Some(e),
            _ => None,
        }
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        Ok(match self {
            MapAtom::Moebius(m) => m.apply(z)?,
            MapAtom::Pull(eps) => {
                let e = eps.to_f64();
                div((z + 1.0) - e, (1.0 + z) - e * z)?
            }
            MapAtom::PullInverse(eps) => {
                let e = eps.to_f64();
                div((z - 1.0) + e, (1.0 - z) + e * z)?
            }
            MapAtom::Rotate(t) => z * C64::from_polar(1.0, TAU * t.to_f64()),
            MapAtom::Power(p) => z.powu(*p),
            MapAtom::PowerOfTwo(k) => pow_two(z, *k).0,
            MapAtom::Affine { mul, add } => mul * z + add,
            MapAtom::Joukowski => 0.5 * (z + div(C64::new(1.0, 0.0), z)?),
            MapAtom::CardioidForward => cardioid_forward(z),
            MapAtom::CardioidInverse => cardioid_inverse(z)?,
        })
    }

    pub fn derivative(&self, z: C64) -> Result<C64> {
        Ok(match self {
            MapAtom::Moebius(m) => m.deriv(z)?,
            MapAtom::Pull(eps) => {
                let e = eps.to_f64();
                let den = (1.0 + z) - e * z;
                div(C64::new(e * (2.0 - e), 0.0), den * den)?
            }
            MapAtom::PullInverse(eps) => {
                let e = eps.to_f64();
                let den = (1.0 - z) + e * z;
                div(C64::new(e * (2.0 - e), 0.0), den * den)?
            }
            MapAtom::Rotate(t) => C64::from_polar(1.0, TAU * t.to_f64()),
            MapAtom::Power(0) => C64::new(0.0, 0.0),
            MapAtom::Power(p) => *p as f64 * z.powu(p - 1),
            MapAtom::PowerOfTwo(k) => pow_two(z, *k).1,
            MapAtom::Affine { mul, .. } => *mul,
            MapAtom::Joukowski => 0.5 * (1.0 - div(C64::new(1.0, 0.0), z * z)?),
            MapAtom::CardioidForward => 2.0 * (z - 1.0),
            MapAtom::CardioidInverse => {
                cardioid_inverse(z)?;
                -0.5 / z.sqrt()
            }
        })
    }
}

fn div(num: C64, den: C64) -> Result<C64> {
    if den.norm() < POLE_EPS {
        return Err(Error::Pole(den.norm()));
    }
    Ok(num / den)
}

/// `(z^(2^k), d/dz z^(2^k))` in polar form, so that the modulus is
/// `exp(2^k log|z|)` and the argument is an exact multiple mod one turn.
fn pow_two(z: C64, k: u32) -> (C64, C64) {
    if k == 0 {
        return (z, C64::new(1.0, 0.0));
    }
    if z.norm() == 0.0 {
        return (z, C64::new(0.0, 0.0));
    }
    let scale = 2f64.powi(k.min(1100) as i32);
    let log_r = z.norm().ln();
    let turns = z.arg() / TAU;
    let frac = |x: f64| x - x.floor();
    let arg = frac(frac(turns) * scale);
    let value = C64::from_polar((scale * log_r).exp(), TAU * arg);
    // 2^k z^(2^k - 1)
    let dlog = (k as f64) * std::f64::consts::LN_2 + (scale - 1.0) * log_r;
    let darg = arg - frac(turns);
    let deriv = C64::from_polar(dlog.exp(), TAU * darg);
    (value, deriv)
}

/// A composition of atoms, applied left to right.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Map {
    atoms: Vec<MapAtom>,
}

impl Map {
    pub fn identity() -> Self {
        Self { atoms: Vec::new() }
    }

    pub fn new(atoms: Vec<MapAtom>) -> Self {
        Self { atoms }
    }

    pub fn atoms(&self) -> &[MapAtom] {
        &self.atoms
    }

    /// `other ∘ self`: apply `self`, then `other`.
    pub fn then(mut self, other: &Map) -> Map {
        self.atoms.extend(other.atoms.iter().cloned());
        self
    }

    pub fn contains_power(&self) -> bool {
        self.atoms
            .iter()
            .any(|a| matches!(a, MapAtom::Power(p) if *p > 1) || matches!(a, MapAtom::PowerOfTwo(k) if *k > 0))
    }
}

impl HoloMap for Map {
    fn eval(&self, z: C64) -> Result<C64> {
        self.atoms.iter().try_fold(z, |w, a| a.eval(w))
    }

    fn derivative(&self, z: C64) -> Result<C64> {
        let mut w = z;
        let mut d = C64::new(1.0, 0.0);
        for a in &self.atoms {
            d *= a.derivative(w)?;
            w = a.eval(w)?;
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric_derivative(a: &MapAtom, z: C64) -> C64 {
        let h = 1e-6;
        (a.eval(z + h).unwrap() - a.eval(z - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn atom_derivatives_match_finite_differences() {
        let z = C64::new(0.31, -0.22);
        let atoms = [
            MapAtom::Pull(ExactReal::Value(0.3)),
            MapAtom::PullInverse(ExactReal::Reciprocal(7)),
            MapAtom::Rotate(ExactReal::Value(0.17)),
            MapAtom::Power(3),
            MapAtom::PowerOfTwo(3),
            MapAtom::Affine { mul: C64::new(2.0, 1.0), add: C64::new(0.0, -1.0) },
            MapAtom::Joukowski,
            MapAtom::CardioidForward,
            MapAtom::CardioidInverse,
        ];
        for a in &atoms {
            let exact = a.derivative(z).unwrap();
            let approx = numeric_derivative(a, z);
            assert!((exact - approx).norm() < 1e-7 * (1.0 + exact.norm()), "{a:?}: {exact} vs {approx}");
        }
    }

    #[test]
    fn power_of_two_matches_repeated_squaring() {
        let z = C64::new(0.6, 0.7);
        let mut w = z;
        for _ in 0..5 {
            w = w * w;
        }
        let v = MapAtom::PowerOfTwo(5).eval(z).unwrap();
        assert!((v - w).norm() < 1e-13);
    }

    #[test]
    fn pull_and_inverse_cancel() {
        let m = Map::new(vec![MapAtom::Pull(ExactReal::Value(0.01)), MapAtom::PullInverse(ExactReal::Value(0.01))]);
        let z = C64::new(-0.4, 0.5);
        assert!((m.eval(z).unwrap() - z).norm() < 1e-13);
    }

    #[test]
    fn cardioid_inverse_refuses_the_cut() {
        assert!(matches!(MapAtom::CardioidInverse.eval(C64::new(-0.5, 0.0)), Err(Error::Branch(_))));
    }
}
