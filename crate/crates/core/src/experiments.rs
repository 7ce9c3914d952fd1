//! End-to-end experiments on boundary orbits: Denjoy-Wolff fractions, orbit
//! density, shrinking targets, the escape ledger of the rotated pulls and the growth
//! and invariance checks of the Möbius and half-plane examples.
//!
//! Every sampled experiment draws sample `i` from its own ChaCha stream
//! (`seed`, stream `i`), so results do not depend on the worker count.

use std::fmt;
use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::circle::{
    apply_boundary, boundary_orbit, orbit_kind, precision_plan, BoundaryAngle, Chart, OrbitTrace, MAX_ERROR,
};
use crate::classify::{convergence_report, BoundaryBehaviour};
use crate::error::{Error, Result};
use crate::harmonic::{overlap_bound_holds, shrinking_target_interval, shrinking_target_preimage, ArcSet};
use crate::hypgeo::C64;
use crate::mapfab::{hp_multiplier_float, Family, MapSequence, LEDGER_PREC};
use crate::mp::{circular_distance, frac, CFloat};

pub const DEFAULT_TOL: f64 = 1e-3;
pub const DEFAULT_HORIZON: usize = 100;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_VISITS: usize = 3;

/// Number of per-sample gap curves kept in a [`DWEstimate`] for plotting.
const KEPT_CURVES: usize = 8;

fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn run_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    crate::harmonic::with_workers(workers, f)
}

/// Bits for the boundary orbits of `seq` up to `horizon`.
///
/// On top of the plan for the orbit kind, sequences built from pulls get
/// one bit per step plus the worst expansion `(2 - ε)/ε` of a pull: the
/// first-order bound charges every rounding at absolute scale, and a pull
/// inverse applied next to its fixed point magnifies that charge.
pub fn planned_precision(seq: &MapSequence, horizon: usize) -> u32 {
    let base = precision_plan(orbit_kind(seq), horizon, MAX_ERROR);
    let slack = match seq.params() {
        Some(p) => {
            let expansion = (0..=horizon)
                .map(|n| {
                    let e = p.eps(n).to_f64();
                    ((2.0 - e) / e).log2().ceil().max(0.0) as u32
                })
                .max()
                .unwrap_or(0);
            horizon as u32 + expansion
        }
        None => 0,
    };
    base + slack + 8
}

/// Boundary orbit of `x0` with the boundary point of the interior orbit
/// compared index by index.
fn gaps(trace: &OrbitTrace, interior: &[C64]) -> Vec<f64> {
    trace
        .coords
        .iter()
        .zip(interior)
        .map(|(x, w)| {
            // wrap to [-1/2, 1/2) before rounding so angles just below one turn keep their size
            let t = Float::with_val(x.prec(), x - x.clone().round()).to_f64();
            (C64::from_polar(1.0, std::f64::consts::TAU * t) - w).norm()
        })
        .collect()
}

/// Finite-horizon convergence: the gap stays below `tol` on `[3N/4, N]` and
/// its least-squares log-slope there is not positive.
fn converged(gap: &[f64], tol: f64) -> bool {
    let n = gap.len() - 1;
    let window = &gap[(3 * n) / 4..];
    if !window.iter().all(|g| *g < tol) {
        return false;
    }
    let pts: Vec<(f64, f64)> =
        window.iter().enumerate().map(|(i, g)| (i as f64, g.max(f64::MIN_POSITIVE).ln())).collect();
    if pts.len() < 2 {
        return true;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy <= 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DWEstimate {
    pub sequence_id: String,
    /// Share of sampled angles whose orbit converges to the interior limit.
    pub fraction: f64,
    /// Binomial standard error of `fraction`.
    pub std_error: f64,
    pub successes: usize,
    pub n_samples: usize,
    pub horizon: usize,
    pub tol: f64,
    pub seed: u64,
    pub precision_bits: u32,
    pub z0: [f64; 2],
    /// Whether the orbit of `ζ = 1` passes the same test.
    pub one_converges: bool,
    /// `|F_N(ζ) - F_N(z0)|` per sample.
    pub final_gaps: Vec<f64>,
    /// Full gap curves of the first few samples.
    pub gap_curves: Vec<Vec<f64>>,
}

/// Share of boundary angles `ζ` with `F_n(ζ)` following `F_n(z0)`.
///
/// Requires the interior orbit of `z0` to converge to the boundary.
pub fn dw_fraction(
    seq: &MapSequence,
    z0: C64,
    n_samples: usize,
    horizon: usize,
    tol: f64,
    seed: u64,
    workers: Option<usize>,
) -> Result<DWEstimate> {
    dw_fraction_at(seq, z0, n_samples, horizon, tol, seed, workers, planned_precision(seq, horizon))
}

/// [`dw_fraction`] at an explicit working precision.
#[allow(clippy::too_many_arguments)]
pub fn dw_fraction_at(
    seq: &MapSequence,
    z0: C64,
    n_samples: usize,
    horizon: usize,
    tol: f64,
    seed: u64,
    workers: Option<usize>,
    prec: u32,
) -> Result<DWEstimate> {
    if n_samples == 0 || horizon == 0 {
        return Err(Error::InvalidParam("need at least one sample and a positive horizon".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParam(format!("tolerance {tol} must be positive")));
    }
    if chart_of(seq) != Chart::Circle {
        return Err(Error::NotCirclePreserving(format!("{} is not a disc sequence", seq.id())));
    }
    let report = convergence_report(seq, z0, horizon)?;
    if report.behaviour != BoundaryBehaviour::Converges {
        return Err(Error::DwUndefined(format!(
            "interior orbit of {z0} under {} is {:?} at N = {horizon}",
            seq.id(),
            report.behaviour
        )));
    }
    let interior = seq.orbit(z0, horizon)?;
    let one = boundary_orbit(seq, &Float::with_val(prec, 0), horizon)?;
    let one_converges = converged(&gaps(&one, &interior), tol);

    let per_sample: Vec<Vec<f64>> = run_pool(workers, || {
        (0..n_samples)
            .into_par_iter()
            .map(|i| {
                let theta = BoundaryAngle::random(&mut sample_rng(seed, i), prec);
                let trace = boundary_orbit(seq, theta.value(), horizon)?;
                Ok(gaps(&trace, &interior))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let successes = per_sample.iter().filter(|g| converged(g, tol)).count();
    let fraction = successes as f64 / n_samples as f64;
    Ok(DWEstimate {
        sequence_id: seq.id().to_string(),
        fraction,
        std_error: (fraction * (1.0 - fraction) / n_samples as f64).sqrt(),
        successes,
        n_samples,
        horizon,
        tol,
        seed,
        precision_bits: prec,
        z0: [z0.re, z0.im],
        one_converges,
        final_gaps: per_sample.iter().map(|g| g[horizon]).collect(),
        gap_curves: per_sample.into_iter().take(KEPT_CURVES).collect(),
    })
}

fn chart_of(seq: &MapSequence) -> Chart {
    crate::circle::chart_for(&seq.domain(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityStats {
    pub sequence_id: String,
    pub n_samples: usize,
    pub arcs: usize,
    pub horizon: usize,
    pub min_visits: usize,
    pub seed: u64,
    pub precision_bits: u32,
    /// Share of the `K` arcs visited at least `min_visits` times, per sample.
    pub scores: Vec<f64>,
    pub mean_score: f64,
    /// Share of samples visiting every arc.
    pub fraction_full: f64,
    /// Visits per arc summed over samples and indices `1..=N`.
    pub visit_histogram: Vec<u64>,
    pub initial_angles: Vec<f64>,
    pub final_angles: Vec<f64>,
}

/// Orbit density over `K` equal arcs `[j/K, (j+1)/K)`.
pub fn orbit_density_experiment(
    seq: &MapSequence,
    n_samples: usize,
    arcs: usize,
    horizon: usize,
    min_visits: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<DensityStats> {
    orbit_density_experiment_at(
        seq,
        n_samples,
        arcs,
        horizon,
        min_visits,
        seed,
        workers,
        planned_precision(seq, horizon),
    )
}

/// [`orbit_density_experiment`] at an explicit working precision.
#[allow(clippy::too_many_arguments)]
pub fn orbit_density_experiment_at(
    seq: &MapSequence,
    n_samples: usize,
    arcs: usize,
    horizon: usize,
    min_visits: usize,
    seed: u64,
    workers: Option<usize>,
    prec: u32,
) -> Result<DensityStats> {
    if n_samples == 0 || arcs < 2 || horizon == 0 || min_visits == 0 {
        return Err(Error::InvalidParam("need samples, at least two arcs, a horizon and min_visits >= 1".into()));
    }
    if chart_of(seq) != Chart::Circle {
        return Err(Error::NotCirclePreserving(format!("{} is not a disc sequence", seq.id())));
    }
    let rows: Vec<(Vec<u64>, f64, f64)> = run_pool(workers, || {
        (0..n_samples)
            .into_par_iter()
            .map(|i| {
                let theta = BoundaryAngle::random(&mut sample_rng(seed, i), prec);
                let trace = boundary_orbit(seq, theta.value(), horizon)?;
                let mut counts = vec![0u64; arcs];
                for x in &trace.coords[1..] {
                    let j = ((x.to_f64() * arcs as f64).floor() as usize).min(arcs - 1);
                    counts[j] += 1;
                }
                Ok((counts, theta.to_f64(), trace.last().to_f64()))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let scores: Vec<f64> = rows
        .iter()
        .map(|(c, _, _)| c.iter().filter(|&&v| v >= min_visits as u64).count() as f64 / arcs as f64)
        .collect();
    let mut visit_histogram = vec![0u64; arcs];
    for (c, _, _) in &rows {
        for (h, v) in visit_histogram.iter_mut().zip(c) {
            *h += v;
        }
    }
    Ok(DensityStats {
        sequence_id: seq.id().to_string(),
        n_samples,
        arcs,
        horizon,
        min_visits,
        seed,
        precision_bits: prec,
        mean_score: scores.iter().sum::<f64>() / n_samples as f64,
        fraction_full: scores.iter().filter(|s| **s >= 1.0).count() as f64 / n_samples as f64,
        scores,
        visit_histogram,
        initial_angles: rows.iter().map(|r| r.1).collect(),
        final_angles: rows.iter().map(|r| r.2).collect(),
    })
}

/// Target sizes `ε_n` for the shrinking-target experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TargetSizes {
    /// `ε_n = 1/n`
    Reciprocal,
    /// `ε_n = 2^-n`
    Dyadic,
    /// `ε_n = c`
    Constant { size: f64 },
}

impl TargetSizes {
    pub fn eps(&self, n: usize) -> f64 {
        match self {
            TargetSizes::Reciprocal => 1.0 / n.max(1) as f64,
            TargetSizes::Dyadic => 0.5f64.powi(n as i32),
            TargetSizes::Constant { size } => *size,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "1/n" => Ok(TargetSizes::Reciprocal),
            "2^-n" => Ok(TargetSizes::Dyadic),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|c| *c > 0.0 && *c <= 1.0)
                .map(|size| TargetSizes::Constant { size })
                .ok_or_else(|| {
                    Error::InvalidParam(format!("target sizes {other:?}: expected 1/n, 2^-n or c in (0, 1]"))
                }),
        }
    }
}

impl fmt::Display for TargetSizes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSizes::Reciprocal => write!(f, "1/n"),
            TargetSizes::Dyadic => write!(f, "2^-n"),
            TargetSizes::Constant { size } => write!(f, "{size}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapEntry {
    pub m: usize,
    pub n: usize,
    /// `|A_m ∩ A_n|` in turns.
    pub measure: f64,
    /// `|A_m ∩ A_n| <= 3 |A_m| |A_n|`, decided in exact integer arithmetic.
    pub bound_holds: bool,
    /// `2^-(n-m+1) >= ε_m`, where the intersection must be empty.
    pub disjoint_required: bool,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkingTargetReport {
    pub epsilon: String,
    pub max_index: usize,
    pub overlaps: Vec<OverlapEntry>,
    pub bound_violations: usize,
    pub disjointness_violations: usize,
    pub horizon: usize,
    pub n_samples: usize,
    pub min_visits: usize,
    pub seed: u64,
    /// Share of samples with `2^n ζ ∈ I_n` for at least `min_visits` indices `n <= N`.
    pub limsup_fraction: f64,
    /// Share of samples with at least `j` visits, `j = 0..=min_visits`.
    pub visit_tail: Vec<f64>,
    /// Mean number of visits per sample.
    pub mean_visits: f64,
}

/// Exact overlaps of the sets `A_n` for `1 <= m < n <= M`, and visit counts
/// of sampled doubling orbits to the targets `I_n` up to `N`.
#[allow(clippy::too_many_arguments)]
pub fn shrinking_target_report(
    sizes: TargetSizes,
    max_index: usize,
    horizon: usize,
    n_samples: usize,
    min_visits: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<ShrinkingTargetReport> {
    let mut prev = f64::INFINITY;
    for n in 1..=max_index.max(horizon) {
        let e = sizes.eps(n);
        if !(e > 0.0 && e <= 1.0 && e <= prev) {
            return Err(Error::InvalidParam(format!("ε_{n} = {e} breaks 1 >= ε_n > 0 decreasing")));
        }
        prev = e;
    }
    let sets: Vec<ArcSet> =
        (1..=max_index).map(|n| shrinking_target_preimage(n as u32, sizes.eps(n))).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (1..=max_index).flat_map(|m| (m + 1..=max_index).map(move |n| (m, n))).collect();
    let overlaps: Vec<OverlapEntry> = run_pool(workers, || {
        pairs
            .par_iter()
            .map(|&(m, n)| {
                let (a, b) = (&sets[m - 1], &sets[n - 1]);
                let inter = a.intersection(b);
                let gap = (n - m + 1) as i32;
                OverlapEntry {
                    m,
                    n,
                    measure: inter.measure(),
                    bound_holds: overlap_bound_holds(&inter, a, b, 3),
                    disjoint_required: gap < 128 && 0.5f64.powi(gap) >= sizes.eps(m),
                    empty: inter.is_empty(),
                }
            })
            .collect()
    });
    let bound_violations = overlaps.iter().filter(|o| !o.bound_holds).count();
    let disjointness_violations = overlaps.iter().filter(|o| o.disjoint_required && !o.empty).count();

    let targets: Vec<ArcSet> = (1..=horizon).map(|n| shrinking_target_interval(sizes.eps(n))).collect::<Result<_>>()?;
    // `horizon + 128` random bits keep every shifted angle exact.
    let bits = horizon as u32 + 128;
    let visits: Vec<usize> = run_pool(workers, || {
        (0..n_samples)
            .into_par_iter()
            .map(|i| {
                let theta = BoundaryAngle::random(&mut sample_rng(seed, i), bits);
                (1..=horizon)
                    .filter(|&n| {
                        let x = frac(Float::with_val(bits, theta.value() << n as u32));
                        targets[n - 1].contains_float(&x)
                    })
                    .count()
            })
            .collect()
    });
    let tail_of = |j: usize| visits.iter().filter(|&&v| v >= j).count() as f64 / n_samples.max(1) as f64;
    Ok(ShrinkingTargetReport {
        epsilon: sizes.to_string(),
        max_index,
        overlaps,
        bound_violations,
        disjointness_violations,
        horizon,
        n_samples,
        min_visits,
        seed,
        limsup_fraction: tail_of(min_visits),
        visit_tail: (0..=min_visits).map(tail_of).collect(),
        mean_visits: visits.iter().sum::<usize>() as f64 / n_samples.max(1) as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeRecord {
    pub angle_turns: f64,
    /// Indices `n` whose ledger interval contains the angle mod 1.
    pub escape_indices: Vec<usize>,
    /// Circular distance of `F_n(ζ)` from angle 0 at each escape index.
    pub escape_distances: Vec<f64>,
    /// Escape indices where `F_n(ζ)` was found inside `S`.
    pub failures: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeLedger {
    pub sequence_id: String,
    pub horizon: usize,
    pub half_width_turns: f64,
    /// `θ_{N+1}` in turns.
    pub total_angle_turns: f64,
    /// `⌊θ_{N+1}⌋`, the number of full turns covered by `I_0, ..., I_N`.
    pub wraps: u64,
    /// `F_n(0) = a_n` for `n = 0..=N`.
    pub interior: Vec<f64>,
    /// `ζ = 1` first, then the random samples.
    pub samples: Vec<EscapeRecord>,
    pub min_escapes: usize,
    pub failures: usize,
    /// Samples with fewer escapes than wraps.
    pub under_covered: usize,
}

/// For every sampled angle and every `n <= N` with the angle in `I_n` mod 1,
/// checks that `F_n(ζ)` lies outside `S`.
///
/// Membership and the final comparison are carried out at the ledger
/// precision; a margin of `2^-200` turns separates the closed interval and
/// the closed complement of `S` from rounding.
pub fn escape_ledger_check(
    seq: &MapSequence,
    extra_samples: usize,
    horizon: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<EscapeLedger> {
    let ledger = seq.ledger().ok_or_else(|| Error::LedgerMissing(seq.id().to_string()))?.clone();
    let p = LEDGER_PREC;
    let margin = Float::with_val(p, Float::i_exp(1, -200));
    let half = Float::with_val(p, ledger.half_width());
    // Extend the ledger once before going parallel.
    let _ = ledger.theta(horizon + 1);
    let intervals: Vec<(Float, Float)> = (0..=horizon)
        .map(|n| {
            let (lo, hi) = ledger.interval(n);
            let width = Float::with_val(p, &hi - &lo);
            (lo, width)
        })
        .collect();
    let closed: Vec<_> = (0..=horizon).map(|n| seq.closed_form(n).expect("theorem D has a closed form")).collect();

    let mut angles = vec![Float::with_val(p, 0)];
    angles.extend((0..extra_samples).map(|i| BoundaryAngle::random(&mut sample_rng(seed, i), p).value().clone()));
    let samples: Vec<EscapeRecord> = run_pool(workers, || {
        angles
            .par_iter()
            .map(|phi| {
                let mut rec = EscapeRecord {
                    angle_turns: phi.to_f64(),
                    escape_indices: Vec::new(),
                    escape_distances: Vec::new(),
                    failures: Vec::new(),
                };
                for (n, (lo, width)) in intervals.iter().enumerate() {
                    let offset = frac(Float::with_val(p, phi - lo));
                    let inside =
                        offset <= Float::with_val(p, width + &margin) || Float::with_val(p, 1 - offset) <= margin;
                    if !inside {
                        continue;
                    }
                    let (image, _) = apply_boundary(&closed[n], Chart::Circle, phi, 0.0, p)?;
                    let dist = circular_distance(&image, &Float::new(p));
                    rec.escape_indices.push(n);
                    rec.escape_distances.push(dist.to_f64());
                    if Float::with_val(p, &dist + &margin) < half {
                        rec.failures.push(n);
                    }
                }
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let wraps = ledger.wraps(horizon);
    let params = ledger.params().clone();
    Ok(EscapeLedger {
        sequence_id: seq.id().to_string(),
        horizon,
        half_width_turns: ledger.half_width(),
        total_angle_turns: ledger.theta(horizon + 1).to_f64(),
        wraps,
        interior: (0..=horizon).map(|n| params.a(n)).collect(),
        min_escapes: samples.iter().map(|s| s.escape_indices.len()).min().unwrap_or(0),
        failures: samples.iter().map(|s| s.failures.len()).sum(),
        under_covered: samples.iter().filter(|s| (s.escape_indices.len() as u64) < wraps).count(),
        samples,
    })
}

/// Working precision of the half-plane recursions.
pub const GROWTH_PREC: u32 = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthLedger {
    pub start_index: usize,
    pub horizon: usize,
    pub y0: f64,
    /// `y_n` for `n = start..=N`.
    pub values: Vec<f64>,
    /// First `n` with `y_n > n^{3/4}`.
    pub first_above: Option<usize>,
    /// `y_n > n^{3/4}` for every `n` from `first_above` to `N`.
    pub persists: bool,
}

/// Iterates `y_{n+1} = (λ_n y_n - 1/(λ_n y_n)) / 2` from `y_start = y0`.
pub fn joukowski_growth_check(horizon: usize, y0: f64, start_index: usize) -> Result<GrowthLedger> {
    if !(y0 > 0.0) {
        return Err(Error::InvalidParam(format!("y0 = {y0} must be positive")));
    }
    if start_index == 0 || start_index > horizon {
        return Err(Error::InvalidParam(format!("start index {start_index} outside 1..={horizon}")));
    }
    let p = GROWTH_PREC;
    let mut y = Float::with_val(p, y0);
    let mut values = vec![y0];
    for n in start_index..horizon {
        let ly = Float::with_val(p, &y * hp_multiplier_float(n, p));
        let inv = Float::with_val(p, ly.recip_ref());
        y = Float::with_val(p, &ly - &inv) / 2u32;
        if !(y.is_sign_positive() && !y.is_zero()) {
            return Err(Error::SignLoss { index: n + 1, value: y.to_f64() });
        }
        values.push(y.to_f64());
    }
    let above = |i: usize| values[i] > ((start_index + i) as f64).powf(0.75);
    let first = (0..values.len()).find(|&i| above(i));
    Ok(GrowthLedger {
        start_index,
        horizon,
        y0,
        first_above: first.map(|i| start_index + i),
        persists: first.map(|f| (f..values.len()).all(above)).unwrap_or(false),
        values,
    })
}

/// Positive fixed point `(λ_n (λ_n - 2))^{-1/2}` of `y -> (λ_n y - 1/(λ_n y))/2`.
pub fn joukowski_fixed_point(n: usize) -> f64 {
    let l = hp_multiplier_float(n, GROWTH_PREC);
    let prod = Float::with_val(GROWTH_PREC, &l - 2u32) * &l;
    prod.recip_sqrt().to_f64()
}

/// `max_{n <= N} |B_n(1) - (n + 1)| / (n + 1)` with `B_n(1)` computed by the
/// half-plane recursion at 128 bits.
pub fn joukowski_identity_residual(horizon: usize) -> f64 {
    let p = GROWTH_PREC;
    let mut x = Float::with_val(p, 1);
    let mut worst = 0.0f64;
    for n in 1..=horizon {
        let lx = Float::with_val(p, &x * hp_multiplier_float(n, p));
        let inv = Float::with_val(p, lx.recip_ref());
        x = Float::with_val(p, &lx + &inv) / 2u32;
        let rel = Float::with_val(p, &x - (n as u64 + 1)).abs() / (n as f64 + 1.0);
        worst = worst.max(rel.to_f64());
    }
    worst
}

/// `max_n |(1 - a_n)(M_n(ζ) + 1) / ((1 + a_n)(1 - M_n(ζ))) - (ζ + 1)/(1 - ζ)|`
/// for the pull sequence. At `ζ = 1` both sides are infinite; the
/// orbit is checked to stay at 1 and the residual is 0.
pub fn cross_ratio_residual(seq: &MapSequence, zeta_turns: f64, horizon: usize) -> Result<f64> {
    if seq.family() != Family::Pulls {
        return Err(Error::InvalidParam(format!("{} is not a pull sequence", seq.id())));
    }
    let params = seq.params().ok_or_else(|| Error::InvalidParam("sequence has no parameters".into()))?.clone();
    let p = 192;
    let phi = frac(Float::with_val(p, zeta_turns));
    if phi == 0.5 {
        return Err(Error::ExcludedPoint("ζ = -1 is the repelling fixed point".into()));
    }
    let fixed = phi.is_zero();
    let one = CFloat::from_f64(p, 1.0, 0.0);
    let zeta = CFloat::unit(&phi, p);
    let ratio = |w: &CFloat, scale: &Float| -> CFloat {
        let num = w.add(&one).scale(scale);
        let den = one.sub(w);
        let d = den.norm_sqr();
        num.mul(&den.conj()).scale(&Float::with_val(p, d.recip_ref()))
    };
    let target = if fixed { None } else { Some(ratio(&zeta, &Float::with_val(p, 1))) };
    let mut worst = 0.0f64;
    for n in 0..=horizon {
        let closed = seq.closed_form(n).expect("pulls have a closed form");
        let (theta, _) = apply_boundary(&closed, Chart::Circle, &phi, 0.0, p)?;
        match &target {
            None => {
                if !theta.is_zero() && circular_distance(&theta, &Float::new(p)).to_f64() > 1e-50 {
                    return Err(Error::ExcludedPoint(format!(
                        "orbit of 1 moved to {} turns at n = {n}",
                        theta.to_f64()
                    )));
                }
            }
            Some(t) => {
                let a = params.a_float(n, p);
                let scale = Float::with_val(p, 1 - &a) / Float::with_val(p, 1 + &a);
                let w = CFloat::unit(&theta, p);
                let r = ratio(&w, &scale).sub(t);
                worst = worst.max(r.norm_sqr().sqrt().to_f64());
            }
        }
    }
    Ok(worst)
}

/// `(ζ + 1)/(1 - ζ)` for `ζ = exp(2πi t)`, the invariant of [`cross_ratio_residual`].
pub fn cross_ratio_invariant(zeta_turns: f64) -> C64 {
    let z = C64::from_polar(1.0, std::f64::consts::TAU * zeta_turns);
    (z + 1.0) / (1.0 - z)
}

/// One line of the append-only run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: String,
    pub sequence_id: String,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub results: serde_json::Value,
    /// Seconds.
    pub wall_time: f64,
}

/// Appends `record` as one JSON document per line.
pub fn append_run_log(path: &Path, record: &RunRecord) -> io::Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    let line = serde_json::to_string(record).map_err(io::Error::other)?;
    writeln!(f, "{line}")
}

/// Writes `index,angle_turns,value` rows for per-sample data.
pub fn write_samples_csv(angles: &[f64], values: &[f64], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "index,angle_turns,value")?;
    for (i, (a, v)) in angles.iter().zip(values).enumerate() {
        writeln!(out, "{i},{a:.17},{v:e}")?;
    }
    Ok(())
}
