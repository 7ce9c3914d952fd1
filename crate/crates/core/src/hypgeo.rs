//! Hyperbolic geometry of the disc, the right half-plane and conformal images
//! of the disc, plus the Möbius algebra everything else is built on.
//!
//! The disc density is normalised as `2 / (1 - |z|^2)`, so that
//! `dist(0, r) = log((1 + r) / (1 - r))`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Values of `|cz + d|` below this are treated as a pole.
pub const POLE_EPS: f64 = 1e-300;

/// A holomorphic map that can report its value and derivative.
pub trait HoloMap {
    fn eval(&self, z: C64) -> Result<C64>;
    fn derivative(&self, z: C64) -> Result<C64>;
}

/// `(az + b) / (cz + d)` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusTransform {
    a: C64,
    b: C64,
    c: C64,
    d: C64,
}

impl MoebiusTransform {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() == 0.0 || !det.is_finite() {
            return Err(Error::Degenerate);
        }
        let s = det.sqrt();
        Ok(Self { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    /// The pull `z -> (z + a) / (1 + conj(a) z)`, which sends 0 to `a`.
    pub fn pull(a: C64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::InvalidParam(format!("pull parameter {a} must lie in the disc")));
        }
        Self::new(C64::new(1.0, 0.0), a, a.conj(), C64::new(1.0, 0.0))
    }

    /// Rotation by `turns` full turns.
    pub fn rotation(turns: f64) -> Self {
        let w = C64::from_polar(1.0, std::f64::consts::TAU * turns);
        let h = w.sqrt();
        Self { a: h, b: C64::new(0.0, 0.0), c: C64::new(0.0, 0.0), d: h.conj() }
    }

    /// The Cayley map `z -> (1 + z) / (1 - z)` from the disc onto the right half-plane.
    pub fn cayley() -> Self {
        let one = C64::new(1.0, 0.0);
        Self::new(one, one, -one, one).expect("Cayley map is non-degenerate")
    }

    /// Affine map `mul * z + add`.
    pub fn affine(mul: C64, add: C64) -> Result<Self> {
        Self::new(mul, add, C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn coefficients(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn apply(&self, z: C64) -> Result<C64> {
        let den = self.c * z + self.d;
        if den.norm() < POLE_EPS {
            return Err(Error::Pole(den.norm()));
        }
        Ok((self.a * z + self.b) / den)
    }

    /// `T'(z) = 1 / (cz + d)^2` for a unit-determinant matrix.
    pub fn deriv(&self, z: C64) -> Result<C64> {
        let den = self.c * z + self.d;
        if den.norm() < POLE_EPS {
            return Err(Error::Pole(den.norm()));
        }
        Ok(1.0 / (den * den))
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Self) -> Self {
        let (a1, b1, c1, d1) = (self.a, self.b, self.c, self.d);
        let (a2, b2, c2, d2) = (inner.a, inner.b, inner.c, inner.d);
        Self::new(a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)
            .unwrap_or_else(|_| Self::identity())
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Checks that the map sends the disc onto itself: `|T(0)| < 1` and the
    /// three angles 0, 1/3, 2/3 turns land on the unit circle.
    pub fn is_disc_automorphism(&self, tol: f64) -> bool {
        match self.apply(C64::new(0.0, 0.0)) {
            Ok(w) if w.norm() < 1.0 => {}
            _ => return false,
        }
        [0.0, 1.0 / 3.0, 2.0 / 3.0].iter().all(|t| {
            let z = C64::from_polar(1.0, std::f64::consts::TAU * t);
            matches!(self.apply(z), Ok(w) if (w.norm() - 1.0).abs() <= tol)
        })
    }

    /// Equality as projective maps (matrices agree up to sign).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let s = self.coefficients();
        let o = other.coefficients();
        let plus = s.iter().zip(&o).all(|(x, y)| (x - y).norm() <= tol);
        let minus = s.iter().zip(&o).all(|(x, y)| (x + y).norm() <= tol);
        plus || minus
    }
}

impl HoloMap for MoebiusTransform {
    fn eval(&self, z: C64) -> Result<C64> {
        self.apply(z)
    }
    fn derivative(&self, z: C64) -> Result<C64> {
        self.deriv(z)
    }
}

type ComplexFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// A conformal map `φ: D -> U` given explicitly with its derivative and inverse.
#[derive(Clone)]
pub struct RiemannMap {
    pub name: String,
    pub forward: ComplexFn,
    pub derivative: ComplexFn,
    pub inverse: ComplexFn,
    /// Approximate Euclidean diameter of the image domain.
    pub diameter: f64,
}

impl fmt::Debug for RiemannMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RiemannMap").field("name", &self.name).finish_non_exhaustive()
    }
}

/// The cardioid chart `w -> (w - 1)^2`.
pub fn cardioid_forward(w: C64) -> C64 {
    let t = w - 1.0;
    t * t
}

/// Inverse of the cardioid chart, `z -> 1 - sqrt(z)`, with the cut on `(-inf, 0]`.
pub fn cardioid_inverse(z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::Branch(format!("{z}")));
    }
    Ok(1.0 - z.sqrt())
}

#[derive(Debug, Clone)]
pub enum DomainSpec {
    UnitDisc,
    RightHalfPlane,
    /// `φ(D)` with `φ(w) = (w - 1)^2`.
    Cardioid,
    RiemannMapped(RiemannMap),
}

impl DomainSpec {
    pub fn name(&self) -> &str {
        match self {
            DomainSpec::UnitDisc => "unit-disc",
            DomainSpec::RightHalfPlane => "right-half-plane",
            DomainSpec::Cardioid => "cardioid",
            DomainSpec::RiemannMapped(m) => &m.name,
        }
    }

    /// Preimage of `z` in the disc for the chart-based kinds.
    fn chart_preimage(&self, z: C64) -> Option<(C64, C64)> {
        match self {
            DomainSpec::Cardioid => {
                let w = cardioid_inverse(z).ok()?;
                Some((w, 2.0 * (w - 1.0)))
            }
            DomainSpec::RiemannMapped(m) => {
                let w = (m.inverse)(z);
                Some((w, (m.derivative)(w)))
            }
            _ => None,
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        if !z.is_finite() {
            return false;
        }
        match self {
            DomainSpec::UnitDisc => z.norm() < 1.0,
            DomainSpec::RightHalfPlane => z.re > 0.0,
            DomainSpec::Cardioid => matches!(cardioid_inverse(z), Ok(w) if w.norm() < 1.0),
            DomainSpec::RiemannMapped(m) => {
                let w = (m.inverse)(z);
                w.norm() < 1.0 && ((m.forward)(w) - z).norm() <= 1e-9 * (1.0 + z.norm())
            }
        }
    }

    fn require(&self, z: C64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!("{z} ({})", self.name())))
        }
    }

    /// Hyperbolic density at `z`.
    pub fn density(&self, z: C64) -> Result<f64> {
        self.require(z)?;
        Ok(match self {
            DomainSpec::UnitDisc => disc_density(z),
            DomainSpec::RightHalfPlane => 1.0 / z.re,
            _ => {
                let (w, dphi) = self.chart_preimage(z).expect("chart domain");
                disc_density(w) / dphi.norm()
            }
        })
    }

    pub fn hyperbolic_distance(&self, z: C64, w: C64) -> Result<f64> {
        self.require(z)?;
        self.require(w)?;
        Ok(match self {
            DomainSpec::UnitDisc => disc_distance(z, w),
            DomainSpec::RightHalfPlane => 2.0 * ((z - w).norm() / (2.0 * (z.re * w.re).sqrt())).asinh(),
            _ => {
                let (a, _) = self.chart_preimage(z).expect("chart domain");
                let (b, _) = self.chart_preimage(w).expect("chart domain");
                disc_distance(a, b)
            }
        })
    }

    /// Euclidean distance from `z` to the boundary.
    pub fn boundary_distance(&self, z: C64) -> Result<f64> {
        self.require(z)?;
        Ok(match self {
            DomainSpec::UnitDisc => 1.0 - z.norm(),
            DomainSpec::RightHalfPlane => z.re,
            DomainSpec::Cardioid => sampled_boundary_distance(z, |t| cardioid_forward(C64::from_polar(1.0, t))),
            DomainSpec::RiemannMapped(m) => {
                let f = m.forward.clone();
                sampled_boundary_distance(z, move |t| f(C64::from_polar(1.0, t)))
            }
        })
    }

    /// Approximate Euclidean diameter, `None` when unbounded.
    pub fn diameter(&self) -> Option<f64> {
        match self {
            DomainSpec::UnitDisc => Some(2.0),
            DomainSpec::RightHalfPlane => None,
            DomainSpec::Cardioid => Some(4.0),
            DomainSpec::RiemannMapped(m) => Some(m.diameter),
        }
    }

    /// Point where a walk standing at `z` is absorbed: the boundary point
    /// nearest to `z` (exactly for disc and half-plane, via the chart otherwise).
    pub fn exit_point(&self, z: C64) -> C64 {
        match self {
            DomainSpec::UnitDisc => z / z.norm(),
            DomainSpec::RightHalfPlane => C64::new(0.0, z.im),
            DomainSpec::Cardioid => match cardioid_inverse(z) {
                Ok(w) => cardioid_forward(w / w.norm()),
                Err(_) => C64::new(0.0, 0.0),
            },
            DomainSpec::RiemannMapped(m) => {
                let w = (m.inverse)(z);
                (m.forward)(w / w.norm())
            }
        }
    }

    /// Radius of a disc about `z` that is certainly inside the domain.
    /// Chart domains use the Koebe quarter bound `|φ'(w)| (1 - |w|^2) / 4`.
    pub fn safe_radius(&self, z: C64) -> f64 {
        match self {
            DomainSpec::UnitDisc => (1.0 - z.norm()).max(0.0),
            DomainSpec::RightHalfPlane => z.re.max(0.0),
            _ => match self.chart_preimage(z) {
                Some((w, dphi)) if w.norm() < 1.0 => 0.25 * dphi.norm() * (1.0 - w.norm_sqr()),
                _ => 0.0,
            },
        }
    }
}

pub fn disc_density(z: C64) -> f64 {
    2.0 / (1.0 - z.norm_sqr())
}

fn disc_distance(z: C64, w: C64) -> f64 {
    let num = (z - w).norm();
    let den = ((1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr())).sqrt();
    2.0 * (num / den).asinh()
}

const BOUNDARY_SAMPLES: usize = 4096;

/// Distance from `z` to the closed curve `t -> curve(t)`, `t` in `[0, 2π)`:
/// coarse sampling followed by golden-section refinement of the best minima.
fn sampled_boundary_distance(z: C64, curve: impl Fn(f64) -> C64) -> f64 {
    let h = std::f64::consts::TAU / BOUNDARY_SAMPLES as f64;
    let dist = |t: f64| (curve(t) - z).norm();
    let samples: Vec<f64> = (0..BOUNDARY_SAMPLES).map(|k| dist(k as f64 * h)).collect();
    let mut minima: Vec<usize> = (0..BOUNDARY_SAMPLES)
        .filter(|&k| {
            let prev = samples[(k + BOUNDARY_SAMPLES - 1) % BOUNDARY_SAMPLES];
            let next = samples[(k + 1) % BOUNDARY_SAMPLES];
            samples[k] <= prev && samples[k] <= next
        })
        .collect();
    minima.sort_by(|&a, &b| samples[a].total_cmp(&samples[b]));
    minima.truncate(4);

    let mut best = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for k in minima {
        let (mut lo, mut hi) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (dist(x1), dist(x2));
        while hi - lo > 1e-13 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = dist(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = dist(x2);
            }
        }
        best = best.min(f1).min(f2);
    }
    best
}

/// `ρ_codom(f(z)) |f'(z)| / ρ_dom(z)`.
pub fn hyperbolic_distortion(f: &dyn HoloMap, z: C64, dom: &DomainSpec, codom: &DomainSpec) -> Result<f64> {
    let rho_z = dom.density(z)?;
    let fz = f.eval(z)?;
    if !codom.contains(fz) {
        return Err(Error::BoundaryProximity(format!("{fz}")));
    }
    let df = f.derivative(z)?;
    Ok(codom.density(fz)? * df.norm() / rho_z)
}

/// Upper bound `2 d e^{2d} δ` on `|F_n(z) - F_n(z0)|` when `d = dist(z, z0)`
/// and `δ` is the distance from `F_n(z0)` to the boundary.
pub fn euclidean_proximity_bound(d: f64, delta: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    2.0 * d * (2.0 * d).exp() * delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pull_sends_zero_to_parameter() {
        let m = MoebiusTransform::pull(c(0.5, 0.0)).unwrap();
        assert_relative_eq!(m.apply(c(0.0, 0.0)).unwrap().re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn cayley_fixes_i() {
        let w = MoebiusTransform::cayley().apply(c(0.0, 1.0)).unwrap();
        assert!((w - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_matrix_rejected() {
        let one = c(1.0, 0.0);
        assert_eq!(MoebiusTransform::new(one, one, one, one), Err(Error::Degenerate));
    }

    #[test]
    fn pole_reported() {
        let t = MoebiusTransform::cayley();
        assert!(matches!(t.apply(c(1.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn inverse_of_pull_matches_formula() {
        let a = 0.3;
        let inv = MoebiusTransform::pull(c(a, 0.0)).unwrap().inverse();
        let z = C64::from_polar(1.0, 0.7);
        let expected = (z - a) / (1.0 - a * z);
        assert!((inv.apply(z).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn densities_at_reference_points() {
        assert_eq!(DomainSpec::UnitDisc.density(c(0.0, 0.0)).unwrap(), 2.0);
        assert_eq!(DomainSpec::RightHalfPlane.density(c(1.0, 0.0)).unwrap(), 1.0);
        assert_relative_eq!(DomainSpec::Cardioid.density(c(1.0, 0.0)).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn boundary_distances() {
        assert_relative_eq!(DomainSpec::UnitDisc.boundary_distance(c(0.9, 0.0)).unwrap(), 0.1, epsilon = 1e-15);
        assert_eq!(DomainSpec::RightHalfPlane.boundary_distance(c(3.0, 4.0)).unwrap(), 3.0);
        for n in [2.0, 5.0, 10.0, 40.0] {
            let z = c(1.0 / (n * n), 0.0);
            let d = DomainSpec::Cardioid.boundary_distance(z).unwrap();
            assert_relative_eq!(d, 1.0 / (n * n), max_relative = 1e-10);
        }
    }

    #[test]
    fn outside_points_rejected() {
        assert!(DomainSpec::UnitDisc.density(c(1.0, 0.0)).is_err());
        assert!(DomainSpec::Cardioid.density(c(-0.1, 0.0)).is_err());
        assert!(DomainSpec::RightHalfPlane.boundary_distance(c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn squaring_has_zero_distortion_at_origin() {
        struct Square;
        impl HoloMap for Square {
            fn eval(&self, z: C64) -> Result<C64> {
                Ok(z * z)
            }
            fn derivative(&self, z: C64) -> Result<C64> {
                Ok(2.0 * z)
            }
        }
        let d = hyperbolic_distortion(&Square, c(0.0, 0.0), &DomainSpec::UnitDisc, &DomainSpec::UnitDisc);
        assert_eq!(d.unwrap(), 0.0);
    }

    #[test]
    fn automorphism_has_unit_distortion() {
        let m = MoebiusTransform::pull(c(0.2, -0.6)).unwrap().compose(&MoebiusTransform::rotation(0.3));
        let d = hyperbolic_distortion(&m, c(0.1, 0.4), &DomainSpec::UnitDisc, &DomainSpec::UnitDisc).unwrap();
        assert_relative_eq!(d, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn proximity_bound_values() {
        assert_eq!(euclidean_proximity_bound(0.0, 5.0), 0.0);
        assert_relative_eq!(euclidean_proximity_bound(1.0, 0.1), 2.0 * 1f64.exp().powi(2) * 0.1, epsilon = 1e-15);
    }

    #[test]
    fn riemann_mapped_disc_matches_disc() {
        let id: ComplexFn = Arc::new(|w| w);
        let dom = DomainSpec::RiemannMapped(RiemannMap {
            name: "identity".into(),
            forward: id.clone(),
            derivative: Arc::new(|_| c(1.0, 0.0)),
            inverse: id,
            diameter: 2.0,
        });
        let z = c(0.3, -0.2);
        assert_relative_eq!(dom.density(z).unwrap(), DomainSpec::UnitDisc.density(z).unwrap(), epsilon = 1e-14);
        assert_relative_eq!(dom.boundary_distance(z).unwrap(), 1.0 - z.norm(), epsilon = 1e-10);
    }
}
