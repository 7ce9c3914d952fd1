//! Finite-horizon diagnostics: hyperbolic classification of a sequence,
//! boundary convergence of interior orbits and the condition sums.
//!
//! Every verdict is backed by explicit margins; when none is met the
//! verdict is `Inconclusive`.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hypgeo::{euclidean_proximity_bound, hyperbolic_distortion, DomainSpec, C64};
use crate::mapfab::MapSequence;

/// Margins for [`classify_hyperbolic`] and [`series_verdict`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `S_N - S_{N/2}` above this (with a good log fit) means divergence.
    pub divergence_increment: f64,
    /// Minimum R² of the `S_n ~ c log n` fit over `[N/2, N]`.
    pub divergence_r2: f64,
    /// Tail sum over `[N/2, N]` below this means convergence.
    pub tail_sum: f64,
    /// Power-law decay exponent of the terms at or above this means convergence.
    pub min_decay_exponent: f64,
    /// Minimum R² of the power-law or geometric fit of the terms.
    pub decay_r2: f64,
    /// `|1 - λ_n|` allowed for an isometric step.
    pub isometry_tol: f64,
    /// Pairwise distance below which orbits count as merged.
    pub pair_tol: f64,
    /// Slack for the Schwarz-Pick monotonicity check of pairwise distances.
    pub monotone_slack: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            divergence_increment: 0.2,
            divergence_r2: 0.9,
            tail_sum: 1e-6,
            min_decay_exponent: 1.1,
            decay_r2: 0.99,
            isometry_tol: 1e-12,
            pair_tol: 1e-6,
            monotone_slack: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Contracting,
    SemiContracting,
    EventuallyIsometric,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesBehaviour {
    Converges,
    Diverges,
    Inconclusive,
}

/// Evidence about `Σ t_n` at a finite horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesVerdict {
    pub behaviour: SeriesBehaviour,
    pub total: f64,
    /// `S_N - S_{N/2}`.
    pub late_increment: f64,
    /// Slope and R² of `S_n` against `log n` over `[N/2, N]`.
    pub log_growth_slope: f64,
    pub log_growth_r2: f64,
    /// Fitted `p` in `t_n ~ C n^{-p}` over `[N/2, N]`, with R².
    pub decay_exponent: Option<f64>,
    pub decay_r2: Option<f64>,
    /// Fitted ratio in `t_n ~ C r^n` over `[N/2, N]`, with R².
    pub geometric_ratio: Option<f64>,
    pub geometric_r2: Option<f64>,
    /// Estimated remainder past `N` from the better of the two fits.
    pub remainder_estimate: Option<f64>,
}

fn fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if sxx > 0.0 && syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Classifies `Σ terms[k]` where `terms[k]` is the term of index `k + 1`.
pub fn series_verdict(terms: &[f64], th: &Thresholds) -> SeriesVerdict {
    let n = terms.len();
    let mut partial = Vec::with_capacity(n);
    let mut s = 0.0;
    for t in terms {
        s += t;
        partial.push(s);
    }
    let half = n / 2;
    let total = s;
    let at_half = if half > 0 { partial[half - 1] } else { 0.0 };
    let late_increment = total - at_half;
    let window: Vec<usize> = (half.max(1)..=n).collect();

    let growth: Vec<(f64, f64)> = window.iter().map(|&k| ((k as f64).ln(), partial[k - 1])).collect();
    let (log_growth_slope, _, log_growth_r2) = if growth.len() >= 2 { fit(&growth) } else { (0.0, 0.0, 0.0) };

    let positive: Vec<(usize, f64)> = window.iter().map(|&k| (k, terms[k - 1])).filter(|(_, t)| *t > 0.0).collect();
    let (mut decay_exponent, mut decay_r2, mut geometric_ratio, mut geometric_r2, mut remainder) =
        (None, None, None, None, None);
    if positive.len() >= 3 && positive.len() * 2 >= window.len() {
        let pw: Vec<(f64, f64)> = positive.iter().map(|&(k, t)| ((k as f64).ln(), t.ln())).collect();
        let (slope, _, r2) = fit(&pw);
        let p = -slope;
        decay_exponent = Some(p);
        decay_r2 = Some(r2);
        let geo: Vec<(f64, f64)> = positive.iter().map(|&(k, t)| (k as f64, t.ln())).collect();
        let (gs, _, gr2) = fit(&geo);
        let r = gs.exp();
        geometric_ratio = Some(r);
        geometric_r2 = Some(gr2);
        let last = positive.last().map(|p| p.1).unwrap_or(0.0);
        let nn = n as f64;
        remainder = if r < 1.0 && gr2 >= th.decay_r2 && gr2 >= r2 {
            Some(last * r / (1.0 - r))
        } else if p > 1.0 {
            Some(last * nn / (p - 1.0))
        } else {
            None
        };
    }
    let tail_sum = late_increment;

    let behaviour = if late_increment > th.divergence_increment && log_growth_r2 > th.divergence_r2 {
        SeriesBehaviour::Diverges
    } else if tail_sum < th.tail_sum
        || matches!((decay_exponent, decay_r2), (Some(p), Some(r2)) if p >= th.min_decay_exponent && r2 >= th.decay_r2)
        || matches!((geometric_ratio, geometric_r2), (Some(r), Some(r2)) if r < 0.99 && r2 >= th.decay_r2)
    {
        SeriesBehaviour::Converges
    } else {
        SeriesBehaviour::Inconclusive
    };
    SeriesVerdict {
        behaviour,
        total,
        late_increment,
        log_growth_slope,
        log_growth_r2,
        decay_exponent,
        decay_r2,
        geometric_ratio,
        geometric_r2,
        remainder_estimate: remainder,
    }
}

/// `λ_n(z)`, `n = 1..=N`: distortion of `f_n` at `F_{n-1}(z)`, clamped to `[0, 1]`.
pub fn distortion_series(seq: &MapSequence, z: C64, horizon: usize) -> Result<Vec<f64>> {
    let orbit = seq.orbit(z, horizon.saturating_sub(1))?;
    let mut out = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        let w = orbit[n - 1];
        let lam = hyperbolic_distortion(&seq.step(n), w, &seq.domain(n - 1), &seq.domain(n))?;
        if lam > 1.0 + 1e-9 {
            warn!("Schwarz-Pick violation in {} at n = {n}: distortion {lam}", seq.id());
        }
        out.push(lam.clamp(0.0, 1.0));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSeries {
    pub first: usize,
    pub second: usize,
    /// `dist_{U_n}(F_n(z), F_n(z'))`, `n = 0..=N`.
    pub distances: Vec<f64>,
    /// Orbits met within the pair tolerance while the distortion sums stayed bounded.
    pub collided: bool,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub sequence_id: String,
    pub verdict: Verdict,
    pub summary: String,
    pub horizon: usize,
    pub sample_points: Vec<[f64; 2]>,
    pub distortion_series: Vec<Vec<f64>>,
    pub partial_sums: Vec<Vec<f64>>,
    pub series: Vec<SeriesVerdict>,
    pub pairwise_distance_series: Vec<PairSeries>,
    /// Largest `|1 - λ_n|` over `[N/2, N]` and all sample points.
    pub late_isometry_defect: f64,
    pub schwarz_pick_violations: usize,
    pub thresholds: Thresholds,
}

/// Contracting / semi-contracting / eventually isometric at horizon `N`.
pub fn classify_hyperbolic(
    seq: &MapSequence,
    points: &[C64],
    horizon: usize,
    th: &Thresholds,
) -> Result<ClassificationReport> {
    assert!(points.len() >= 2, "classification needs at least two sample points");
    let mut distortion = Vec::new();
    let mut partial = Vec::new();
    let mut series = Vec::new();
    for &z in points {
        let lam = distortion_series(seq, z, horizon)?;
        let terms: Vec<f64> = lam.iter().map(|l| 1.0 - l).collect();
        let mut s = 0.0;
        partial.push(
            terms
                .iter()
                .map(|t| {
                    s += t;
                    s
                })
                .collect::<Vec<_>>(),
        );
        series.push(series_verdict(&terms, th));
        distortion.push(lam);
    }
    let late = horizon / 2;
    let late_isometry_defect = distortion
        .iter()
        .flat_map(|l| l[late.saturating_sub(1)..].iter().map(|x| (1.0 - x).abs()))
        .fold(0.0f64, f64::max);

    let orbits: Vec<Vec<C64>> = points.iter().map(|&z| seq.orbit(z, horizon)).collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    let mut violations = 0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let distances: Vec<f64> = (0..=horizon)
                .map(|n| seq.domain(n).hyperbolic_distance(orbits[i][n], orbits[j][n]))
                .collect::<Result<_>>()?;
            let monotone = distances.windows(2).all(|w| w[1] <= w[0] + th.monotone_slack);
            if !monotone {
                violations += 1;
            }
            pairs.push(PairSeries { first: i, second: j, distances, collided: false, monotone });
        }
    }

    let all_diverge = series.iter().all(|s| s.behaviour == SeriesBehaviour::Diverges);
    let all_converge = series.iter().all(|s| s.behaviour == SeriesBehaviour::Converges);
    for p in &mut pairs {
        p.collided = all_converge && *p.distances.last().unwrap() < th.pair_tol;
    }
    let final_small = pairs.iter().all(|p| *p.distances.last().unwrap() < th.pair_tol);
    let separated: Vec<&PairSeries> = pairs.iter().filter(|p| !p.collided).collect();
    let final_positive = !separated.is_empty() && separated.iter().all(|p| *p.distances.last().unwrap() >= th.pair_tol);

    let verdict = if late_isometry_defect <= th.isometry_tol {
        Verdict::EventuallyIsometric
    } else if all_diverge && final_small {
        Verdict::Contracting
    } else if all_converge && final_positive {
        Verdict::SemiContracting
    } else {
        Verdict::Inconclusive
    };
    let summary = match verdict {
        Verdict::EventuallyIsometric => format!(
            "{}: eventually isometric (|1 - λ_n| <= {:e} on [N/2, N], N = {horizon})",
            seq.id(),
            late_isometry_defect
        ),
        Verdict::Contracting => {
            format!("{}: contracting (Σ(1 - λ_n) diverges, final pairwise distance < {:e})", seq.id(), th.pair_tol)
        }
        Verdict::SemiContracting => {
            format!("{}: semi-contracting (Σ(1 - λ_n) converges, orbits stay apart)", seq.id())
        }
        Verdict::Inconclusive => format!("{}: inconclusive at N = {horizon}", seq.id()),
    };
    Ok(ClassificationReport {
        sequence_id: seq.id().to_string(),
        verdict,
        summary,
        horizon,
        sample_points: points.iter().map(|z| [z.re, z.im]).collect(),
        distortion_series: distortion,
        partial_sums: partial,
        series,
        pairwise_distance_series: pairs,
        late_isometry_defect,
        schwarz_pick_violations: violations,
        thresholds: *th,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryBehaviour {
    StaysAway,
    Oscillates,
    Converges,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub sequence_id: String,
    pub z0: [f64; 2],
    pub horizon: usize,
    /// `δ_n = dist(F_n(z0), ∂U_n)`, `n = 0..=N`.
    pub dist_series: Vec<f64>,
    /// Partial sums of `1 - |F_n(z0)|` (of `δ_n` off the disc).
    pub gap_sums: Vec<f64>,
    /// Partial sums of `δ_n^{1/2}`.
    pub sqrt_gap_sums: Vec<f64>,
    pub gap_series: SeriesVerdict,
    pub sqrt_gap_series: SeriesVerdict,
    pub behaviour: BoundaryBehaviour,
}

fn partial_sums(terms: &[f64]) -> Vec<f64> {
    let mut s = 0.0;
    terms
        .iter()
        .map(|t| {
            s += t;
            s
        })
        .collect()
}

/// Boundary behaviour of `δ_n` over the horizon: compares the last quarter
/// against the first quarter.
pub fn boundary_behaviour(dist: &[f64]) -> BoundaryBehaviour {
    let n = dist.len();
    if n < 8 {
        return BoundaryBehaviour::Inconclusive;
    }
    let q = n / 4;
    let early = &dist[..=q];
    let tail = &dist[n - 1 - q..];
    let early_max = early.iter().copied().fold(0.0f64, f64::max);
    let early_min = early.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_max = tail.iter().copied().fold(0.0f64, f64::max);
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    if tail_max < 0.1 * early_max && tail[tail.len() - 1] <= tail[0] {
        BoundaryBehaviour::Converges
    } else if early_min > 0.0 && tail_min >= 0.5 * early_min {
        BoundaryBehaviour::StaysAway
    } else if tail_min < 0.1 * early_max && tail_max >= 0.5 * early_max {
        BoundaryBehaviour::Oscillates
    } else {
        BoundaryBehaviour::Inconclusive
    }
}

/// Boundary distance that reads a disc iterate rounded onto the unit circle
/// as distance zero: `a_n = 1 - 2^-n` is exactly 1 in f64 once `n > 53`.
fn saturated_distance(domain: &DomainSpec, w: C64) -> Result<f64> {
    match domain {
        DomainSpec::UnitDisc if w.norm() <= 1.0 + 4.0 * f64::EPSILON => Ok((1.0 - w.norm()).max(0.0)),
        _ => domain.boundary_distance(w),
    }
}

pub fn convergence_report(seq: &MapSequence, z0: C64, horizon: usize) -> Result<ConvergenceReport> {
    convergence_report_with(seq, z0, horizon, &Thresholds::default())
}

pub fn convergence_report_with(
    seq: &MapSequence,
    z0: C64,
    horizon: usize,
    th: &Thresholds,
) -> Result<ConvergenceReport> {
    let orbit = seq.orbit(z0, horizon)?;
    let dist: Vec<f64> =
        orbit.iter().enumerate().map(|(n, w)| saturated_distance(&seq.domain(n), *w)).collect::<Result<_>>()?;
    let b_terms: Vec<f64> = orbit
        .iter()
        .enumerate()
        .map(|(n, w)| match seq.domain(n) {
            DomainSpec::UnitDisc => 1.0 - w.norm(),
            _ => dist[n],
        })
        .collect();
    let c_terms: Vec<f64> = dist.iter().map(|d| d.sqrt()).collect();
    Ok(ConvergenceReport {
        sequence_id: seq.id().to_string(),
        z0: [z0.re, z0.im],
        horizon,
        gap_sums: partial_sums(&b_terms),
        sqrt_gap_sums: partial_sums(&c_terms),
        gap_series: series_verdict(&b_terms[1..], th),
        sqrt_gap_series: series_verdict(&c_terms[1..], th),
        behaviour: boundary_behaviour(&dist),
        dist_series: dist,
    })
}

/// `max_n |F_n(z) - F_n(z0)| - 2 d e^{2d} δ_n` over `n = 0..=N`.
pub fn proximity_residual(seq: &MapSequence, z: C64, z0: C64, horizon: usize) -> Result<f64> {
    let d = seq.domain(0).hyperbolic_distance(z, z0)?;
    let a = seq.orbit(z, horizon)?;
    let b = seq.orbit(z0, horizon)?;
    let mut worst = f64::NEG_INFINITY;
    for n in 0..=horizon {
        let delta = seq.domain(n).boundary_distance(b[n])?;
        let r = (a[n] - b[n]).norm() - euclidean_proximity_bound(d, delta);
        worst = worst.max(r);
    }
    Ok(worst)
}
