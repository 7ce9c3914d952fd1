//! Walk-on-spheres estimates of harmonic measure.
//!
//! Walks are grouped in fixed-size blocks; block `b` draws from ChaCha8
//! stream `b` of the configured seed, so estimates do not depend on how
//! blocks are scheduled across threads.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeo::{DomainSpec, C64};

use super::{HMEstimate, Method};

pub trait WalkDomain: Send + Sync {
    /// Radius of a disc about `z` contained in the domain (0 outside).
    fn safe_radius(&self, z: C64) -> f64;
    /// Boundary point at which a walk stopped near `z` is absorbed.
    fn exit_point(&self, z: C64) -> C64;
    fn contains(&self, z: C64) -> bool;
    fn diameter(&self) -> Option<f64>;
}

impl WalkDomain for DomainSpec {
    fn safe_radius(&self, z: C64) -> f64 {
        DomainSpec::safe_radius(self, z)
    }
    fn exit_point(&self, z: C64) -> C64 {
        DomainSpec::exit_point(self, z)
    }
    fn contains(&self, z: C64) -> bool {
        DomainSpec::contains(self, z)
    }
    fn diameter(&self) -> Option<f64> {
        DomainSpec::diameter(self)
    }
}

impl<T: WalkDomain + ?Sized> WalkDomain for Box<T> {
    fn safe_radius(&self, z: C64) -> f64 {
        (**self).safe_radius(z)
    }
    fn exit_point(&self, z: C64) -> C64 {
        (**self).exit_point(z)
    }
    fn contains(&self, z: C64) -> bool {
        (**self).contains(z)
    }
    fn diameter(&self) -> Option<f64> {
        (**self).diameter()
    }
}

/// The plane minus a closed sector with vertex `vertex`, bisector direction
/// `axis` (unit) and half-opening `half_opening` radians (at most π/2).
#[derive(Debug, Clone, Copy)]
pub struct SectorComplement {
    pub vertex: C64,
    pub axis: C64,
    pub half_opening: f64,
}

impl SectorComplement {
    fn rays(&self) -> [C64; 2] {
        let rot = C64::from_polar(1.0, self.half_opening);
        [self.axis * rot, self.axis * rot.conj()]
    }

    fn in_sector(&self, z: C64) -> bool {
        let v = z - self.vertex;
        if v.norm() == 0.0 {
            return true;
        }
        (v / self.axis).arg().abs() <= self.half_opening
    }

    fn nearest(&self, z: C64) -> (f64, C64) {
        let v = z - self.vertex;
        self.rays()
            .iter()
            .map(|u| {
                let t = (v * u.conj()).re.max(0.0);
                let p = self.vertex + u * t;
                ((z - p).norm(), p)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("two rays")
    }
}

impl WalkDomain for SectorComplement {
    fn safe_radius(&self, z: C64) -> f64 {
        if self.in_sector(z) {
            0.0
        } else {
            self.nearest(z).0
        }
    }
    fn exit_point(&self, z: C64) -> C64 {
        self.nearest(z).1
    }
    fn contains(&self, z: C64) -> bool {
        !self.in_sector(z)
    }
    fn diameter(&self) -> Option<f64> {
        None
    }
}

/// `base ∩ D(center, radius)`.
#[derive(Debug, Clone)]
pub struct Truncated<D> {
    pub base: D,
    pub center: C64,
    pub radius: f64,
}

impl<D: WalkDomain> Truncated<D> {
    /// True for exit points on the circular cut `|p - center| = radius`.
    pub fn on_cut(&self, p: C64) -> bool {
        (p - self.center).norm() >= self.radius * (1.0 - 1e-9)
    }
}

impl<D: WalkDomain> WalkDomain for Truncated<D> {
    fn safe_radius(&self, z: C64) -> f64 {
        let to_cut = self.radius - (z - self.center).norm();
        self.base.safe_radius(z).min(to_cut).max(0.0)
    }
    fn exit_point(&self, z: C64) -> C64 {
        let v = z - self.center;
        let to_cut = self.radius - v.norm();
        if to_cut <= self.base.safe_radius(z) {
            self.center + v * (self.radius / v.norm())
        } else {
            self.base.exit_point(z)
        }
    }
    fn contains(&self, z: C64) -> bool {
        self.base.contains(z) && (z - self.center).norm() < self.radius
    }
    fn diameter(&self) -> Option<f64> {
        Some(match self.base.diameter() {
            Some(d) => d.min(2.0 * self.radius),
            None => 2.0 * self.radius,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Absorbing shell width as a fraction of the domain diameter.
    pub shell_rel: f64,
    /// Absolute shell width; required for unbounded domains.
    pub shell_abs: Option<f64>,
    /// Steps allowed per walk.
    pub step_cap: u64,
    pub seed: u64,
    /// Walks per RNG stream.
    pub block: u64,
    /// Thread cap; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self { shell_rel: 1e-6, shell_abs: None, step_cap: 100_000, seed: 0, block: 4096, workers: None }
    }
}

pub(crate) fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map(|pool| pool.install(f))
            .unwrap_or_else(|_| panic!("could not build a pool of {w} threads")),
        None => f(),
    }
}

fn walk(
    domain: &dyn WalkDomain,
    start: C64,
    shell: f64,
    cap: u64,
    target: &(dyn Fn(C64) -> bool + Sync),
    rng: &mut ChaCha8Rng,
) -> Result<bool> {
    let mut x = start;
    let mut steps = 0u64;
    loop {
        let r = domain.safe_radius(x);
        if r <= shell {
            return Ok(target(domain.exit_point(x)));
        }
        steps += 1;
        if steps > cap {
            return Err(Error::NonConvergence(cap));
        }
        let u: f64 = rng.gen::<f64>() * TAU;
        x += C64::from_polar(r, u);
    }
}

/// Fraction of walks from `z` absorbed at a boundary point satisfying `target`.
pub fn walk_on_spheres(
    domain: &dyn WalkDomain,
    z: C64,
    target: &(dyn Fn(C64) -> bool + Sync),
    n_walks: u64,
    cfg: &WalkConfig,
) -> Result<HMEstimate> {
    if !domain.contains(z) {
        return Err(Error::OutsideDomain(format!("{z}")));
    }
    if n_walks == 0 || cfg.block == 0 {
        return Err(Error::InvalidParam("need at least one walk".into()));
    }
    let shell = match (cfg.shell_abs, domain.diameter()) {
        (Some(s), _) => s,
        (None, Some(d)) => cfg.shell_rel * d,
        (None, None) => return Err(Error::InvalidParam("unbounded domain needs an absolute shell".into())),
    };
    if !(shell > 0.0) {
        return Err(Error::InvalidParam(format!("shell width {shell} must be positive")));
    }
    let blocks = n_walks.div_ceil(cfg.block);
    let run_block = |b: u64| -> Result<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(b);
        let count = cfg.block.min(n_walks - b * cfg.block);
        let mut hits = 0;
        for _ in 0..count {
            if walk(domain, z, shell, cfg.step_cap, target, &mut rng)? {
                hits += 1;
            }
        }
        Ok(hits)
    };
    let per_block: Vec<Result<u64>> =
        with_workers(cfg.workers, || (0..blocks).into_par_iter().map(run_block).collect());
    let mut hits = 0u64;
    for r in per_block {
        hits += r?;
    }
    let p = hits as f64 / n_walks as f64;
    Ok(HMEstimate {
        value: p,
        std_error: (p * (1.0 - p) / n_walks as f64).sqrt(),
        n_samples: n_walks,
        method: Method::WalkOnSpheres,
        seed: Some(cfg.seed),
    })
}

/// A truncated domain `V = U ∩ D(ζ, r)` with an access direction into `U` at `ζ`.
pub struct ProbeGeometry {
    pub name: String,
    pub domain: Truncated<Box<dyn WalkDomain>>,
    pub zeta: C64,
    pub direction: C64,
    /// Default sampling window for `x / r`.
    pub window: (f64, f64),
}

impl ProbeGeometry {
    /// The disc at the boundary point 1, approached along the radius.
    pub fn disc(r: f64) -> Self {
        Self {
            name: "disc".into(),
            domain: Truncated { base: Box::new(DomainSpec::UnitDisc), center: C64::new(1.0, 0.0), radius: r },
            zeta: C64::new(1.0, 0.0),
            direction: C64::new(-1.0, 0.0),
            window: (0.005, 0.3),
        }
    }

    /// The cardioid at its cusp 0, approached along the positive axis.
    pub fn cardioid_cusp(r: f64) -> Self {
        Self {
            name: "cardioid".into(),
            domain: Truncated { base: Box::new(DomainSpec::Cardioid), center: C64::new(0.0, 0.0), radius: r },
            zeta: C64::new(0.0, 0.0),
            direction: C64::new(1.0, 0.0),
            window: (0.003, 0.1),
        }
    }

    /// Complement of a closed sector of opening `beta` with vertex 0, pointing left.
    pub fn sector_complement(beta: f64, r: f64) -> Self {
        let sector =
            SectorComplement { vertex: C64::new(0.0, 0.0), axis: C64::new(-1.0, 0.0), half_opening: beta / 2.0 };
        Self {
            name: "sector".into(),
            domain: Truncated { base: Box::new(sector), center: C64::new(0.0, 0.0), radius: r },
            zeta: C64::new(0.0, 0.0),
            direction: C64::new(1.0, 0.0),
            window: (0.005, 0.3),
        }
    }

    /// `count` log-spaced distances over the default window.
    pub fn default_distances(&self, count: usize) -> Vec<f64> {
        let (lo, hi) = self.window;
        let r = self.domain.radius;
        (0..count)
            .map(|i| {
                let t = i as f64 / (count - 1) as f64;
                r * (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaFit {
    pub geometry: String,
    pub alpha: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub distances: Vec<f64>,
    pub estimates: Vec<HMEstimate>,
}

/// Least-squares slope of `log ω(x)` against `log x`, where `ω(x)` is the
/// harmonic measure of the circular cut seen from `ζ + x · direction`.
pub fn alpha_exponent_probe(
    geom: &ProbeGeometry,
    distances: &[f64],
    n_walks: u64,
    cfg: &WalkConfig,
) -> Result<AlphaFit> {
    if distances.len() < 4 {
        return Err(Error::InvalidParam("need at least 4 distances".into()));
    }
    let (lo, hi) = distances.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    if !(lo > 0.0) || (hi / lo).log10() < 1.5 {
        return Err(Error::InvalidParam("distances must be positive and span at least 1.5 decades".into()));
    }
    let cut = |p: C64| geom.domain.on_cut(p);
    let mut estimates = Vec::with_capacity(distances.len());
    for (i, &x) in distances.iter().enumerate() {
        let c = WalkConfig { seed: cfg.seed.wrapping_add(i as u64), ..*cfg };
        estimates.push(walk_on_spheres(&geom.domain, geom.zeta + geom.direction * x, &cut, n_walks, &c)?);
    }
    let pts: Vec<(f64, f64)> = distances
        .iter()
        .zip(&estimates)
        .filter(|(_, e)| e.value > 0.0 && e.value < 1.0)
        .map(|(&x, e)| (x.ln(), e.value.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} usable measures out of {}", pts.len(), distances.len())));
    }
    let (slope, intercept, residual) = least_squares(&pts);
    Ok(AlphaFit {
        geometry: geom.name.clone(),
        alpha: slope,
        intercept,
        residual,
        distances: distances.to_vec(),
        estimates,
    })
}

/// Slope, intercept and RMS residual of a straight-line fit.
pub(crate) fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_distances() {
        let s = SectorComplement {
            vertex: C64::new(0.0, 0.0),
            axis: C64::new(-1.0, 0.0),
            half_opening: std::f64::consts::FRAC_PI_4,
        };
        assert!((s.safe_radius(C64::new(1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert_eq!(s.safe_radius(C64::new(-1.0, 0.1)), 0.0);
        let d = s.safe_radius(C64::new(0.0, 1.0));
        assert!((d - (0.5f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn deterministic_under_worker_count() {
        let target = |p: C64| p.re > 0.0;
        let mut cfg = WalkConfig { seed: 7, block: 500, ..WalkConfig::default() };
        cfg.workers = Some(1);
        let a = walk_on_spheres(&DomainSpec::UnitDisc, C64::new(0.2, 0.1), &target, 3000, &cfg).unwrap();
        cfg.workers = Some(4);
        let b = walk_on_spheres(&DomainSpec::UnitDisc, C64::new(0.2, 0.1), &target, 3000, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unbounded_domain_needs_absolute_shell() {
        let r = walk_on_spheres(&DomainSpec::RightHalfPlane, C64::new(1.0, 0.0), &|_| true, 10, &WalkConfig::default());
        assert!(r.is_err());
    }

    #[test]
    fn probe_rejects_narrow_windows() {
        let g = ProbeGeometry::disc(0.5);
        let r = alpha_exponent_probe(&g, &[0.01, 0.02, 0.03, 0.04], 10, &WalkConfig::default());
        assert!(matches!(r, Err(Error::InvalidParam(_))));
    }
}
