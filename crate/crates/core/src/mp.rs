//! Multiprecision complex numbers as pairs of MPFR floats.

use rug::float::Constant;
use rug::{Assign, Float};

#[derive(Debug, Clone, PartialEq)]
pub struct CFloat {
    pub re: Float,
    pub im: Float,
}

impl CFloat {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// `exp(2πi θ)` for an angle in turns.
    pub fn unit(turns: &Float, prec: u32) -> Self {
        let angle = Float::with_val(prec, turns * Float::with_val(prec, Constant::Pi)) * 2u32;
        let (s, c) = angle.sin_cos(Float::new(prec));
        Self { re: c, im: s }
    }

    pub fn mul(&self, o: &CFloat) -> CFloat {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        CFloat { re, im }
    }

    pub fn add(&self, o: &CFloat) -> CFloat {
        let p = self.prec();
        CFloat { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }

    pub fn sub(&self, o: &CFloat) -> CFloat {
        let p = self.prec();
        CFloat { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }

    pub fn conj(&self) -> CFloat {
        CFloat { re: self.re.clone(), im: Float::with_val(self.prec(), -&self.im) }
    }

    pub fn scale(&self, s: &Float) -> CFloat {
        let p = self.prec();
        CFloat { re: Float::with_val(p, &self.re * s), im: Float::with_val(p, &self.im * s) }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    /// Argument in turns, reduced to `[0, 1)`.
    pub fn arg_turns(&self) -> Float {
        let p = self.prec();
        let a = Float::with_val(p, self.im.atan2_ref(&self.re));
        let t = a / Float::with_val(p, Constant::Pi) / 2u32;
        frac(t)
    }
}

/// `x - floor(x)`.
pub fn frac(mut x: Float) -> Float {
    let f = Float::with_val(x.prec(), x.floor_ref());
    x -= f;
    if x >= 1 {
        x.assign(0);
    }
    x
}

/// Circular distance between two angles in turns, in `[0, 1/2]`.
pub fn circular_distance(a: &Float, b: &Float) -> Float {
    let p = a.prec().max(b.prec());
    let d = frac(Float::with_val(p, a - b));
    let other = Float::with_val(p, 1 - &d);
    if d < other {
        d
    } else {
        other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_and_arg_round_trip() {
        for t in [0.0, 0.1, 0.25, 0.5, 0.9] {
            let theta = Float::with_val(128, t);
            let back = CFloat::unit(&theta, 128).arg_turns();
            assert!(circular_distance(&back, &theta).to_f64() < 1e-35);
        }
    }

    #[test]
    fn frac_is_in_unit_interval() {
        assert_eq!(frac(Float::with_val(64, -0.25)).to_f64(), 0.75);
        assert_eq!(frac(Float::with_val(64, 3.5)).to_f64(), 0.5);
    }
}
