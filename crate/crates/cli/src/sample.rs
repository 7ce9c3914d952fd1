//! Seeded random points in the built-in domains.

use std::f64::consts::TAU;

use dwset::hypgeo::{cardioid_forward, DomainSpec, C64};
use rand::Rng;

/// Uniform point of the disc of radius `r`.
pub fn disc_point(rng: &mut impl Rng, r: f64) -> C64 {
    C64::from_polar(r * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>())
}

/// A point of `domain` at moderate distance from its boundary.
pub fn domain_point(domain: &DomainSpec, rng: &mut impl Rng) -> C64 {
    match domain {
        DomainSpec::RightHalfPlane => {
            let w = disc_point(rng, 0.95);
            (1.0 + w) / (1.0 - w)
        }
        DomainSpec::Cardioid => cardioid_forward(disc_point(rng, 0.9)),
        _ => disc_point(rng, 0.95),
    }
}
