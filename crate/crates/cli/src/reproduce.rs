//! `reproduce <id>`: fixed-parameter runs with built-in pass/fail checks.

use std::f64::consts::{FRAC_PI_2, TAU};

use dwset::classify::{
    classify_hyperbolic, convergence_report, proximity_residual, series_verdict, SeriesBehaviour, Thresholds, Verdict,
};
use dwset::experiments::{
    cross_ratio_invariant, cross_ratio_residual, dw_fraction, escape_ledger_check, joukowski_fixed_point,
    joukowski_growth_check, joukowski_identity_residual, orbit_density_experiment, shrinking_target_report, DWEstimate,
    TargetSizes,
};
use dwset::harmonic::{alpha_exponent_probe, loewner_check, AlphaFit, ArcSet, CircleArc, ProbeGeometry, WalkConfig};
use dwset::hypgeo::C64;
use dwset::mapfab::{build_sequence, ExactReal, Map, MapAtom};
use dwset::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::Artifacts;
use crate::sample::{disc_point, domain_point};
use crate::svg::{bar_chart, Chart, Series};

pub const IDS: [&str; 12] = [
    "thmA",
    "thmB",
    "thmC-cardioid",
    "thmD",
    "ex7.3",
    "ex8.1",
    "ex8.2",
    "ex8.3",
    "shrinking-target",
    "alpha-probe",
    "loewner",
    "classification",
];

pub fn describe(id: &str) -> &'static str {
    match id {
        "thmA" => "proximity bound |F_n(z) - F_n(z0)| <= 2d e^{2d} δ_n on every family",
        "thmB" => "summable 1 - |F_n(0)| and a full Denjoy-Wolff set (a_n = 1 - 2^-n)",
        "thmC-cardioid" => "cardioid maps with dist = 1/n^2: square-root sum diverges, null Denjoy-Wolff set",
        "thmD" => "rotated pulls: interior orbit tends to 1, every sampled boundary orbit escapes S",
        "ex7.3" => "scaling sweep on the half-plane is eventually isometric",
        "ex8.1" => "pure pulls: cross-ratio invariant, boundary orbits tend to 1",
        "ex8.2" => "half-plane Joukowski maps: B_n(1) = n + 1, semi-contracting",
        "ex8.3" => "power pulls: Denjoy-Wolff fractions for both parameter choices, orbit density",
        "shrinking-target" => "overlap bounds and visit counts for shrinking targets of z^2",
        "alpha-probe" => "harmonic-measure exponents at disc, cusp and sector boundary points",
        "loewner" => "Löwner defect is nonnegative, zero for Möbius maps and powers",
        "classification" => "hyperbolic classification of the three anchor families",
        _ => "",
    }
}

/// Runs `id`; `None` for an unknown ID.
pub fn reproduce(id: &str, workers: Option<usize>) -> Option<Result<Artifacts>> {
    let run = match id {
        "thmA" => proximity,
        "thmB" => full_set,
        "thmC-cardioid" => cardioid,
        "thmD" => empty_set,
        "ex7.3" => sweep,
        "ex8.1" => pulls,
        "ex8.2" => joukowski,
        "ex8.3" => power_pulls,
        "shrinking-target" => shrinking_targets,
        "alpha-probe" => alpha_probes,
        "loewner" => loewner,
        "classification" => classification,
        _ => return None,
    };
    Some(run(id, workers))
}

fn origin() -> C64 {
    C64::new(0.0, 0.0)
}

fn gap_chart(title: &str, estimates: &[(&str, &DWEstimate)]) -> String {
    let mut series = Vec::new();
    for (label, e) in estimates {
        for (k, curve) in e.gap_curves.iter().take(4).enumerate() {
            let pts = curve.iter().enumerate().map(|(n, g)| (n as f64, *g)).collect();
            series.push(Series::line(format!("{label} #{k}"), pts));
        }
    }
    Chart::new(title, "n", "|F_n(ζ) - F_n(z0)|").log_y().render(&series)
}

fn proximity(id: &str, _workers: Option<usize>) -> Result<Artifacts> {
    let (pairs, horizon, seed) = (100, 200, 2);
    let mut a = Artifacts::new(id, "all", json!({"pairs": pairs, "horizon": horizon, "seed": seed}));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for family in ["ex8.3", "ex8.1", "ex8.2", "ex4.3", "ex7.3", "thmD"] {
        let seq = build_sequence(family)?;
        let dom = seq.domain(0);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..pairs {
            let (z, z0) = (domain_point(&dom, &mut rng), domain_point(&dom, &mut rng));
            worst = worst.max(proximity_residual(&seq, z, z0, horizon)?);
        }
        a.check(&format!("{} residual", seq.id()), worst <= 1e-9, format!("max residual {worst:.3e} <= 1e-9"));
        rows.push((seq.id().to_string(), worst));
    }
    a.result("max_residual", &rows);
    let labels: Vec<String> = rows.iter().map(|r| r.0.split(':').next().unwrap_or("").to_string()).collect();
    let values: Vec<f64> = rows.iter().map(|r| r.1).collect();
    a.plot("residuals.svg", bar_chart("largest proximity residual per family", "residual", &labels, &values));
    Ok(a)
}

fn full_set(id: &str, workers: Option<usize>) -> Result<Artifacts> {
    let seq = build_sequence("ex8.3:a=1-2^-n")?;
    let (samples, horizon, tol, seed) = (1000, 100, 1e-3, 9);
    let mut a = Artifacts::new(
        id,
        seq.id(),
        json!({"samples": samples, "horizon": horizon, "tol": tol, "seed": seed, "z0": [0.0, 0.0]}),
    );
    let conv = convergence_report(&seq, origin(), horizon)?;
    a.check(
        "sum of 1 - |F_n(0)| converges",
        conv.gap_series.behaviour == SeriesBehaviour::Converges,
        format!("partial sum {:.6} at N = {horizon}, verdict {:?}", conv.gap_series.total, conv.gap_series.behaviour),
    );
    let dw = dw_fraction(&seq, origin(), samples, horizon, tol, seed, workers)?;
    a.check(
        "Denjoy-Wolff fraction",
        dw.fraction >= 0.99,
        format!("{:.3} >= 0.99 ({} bits)", dw.fraction, dw.precision_bits),
    );
    a.plot("gaps.svg", gap_chart("gap to the interior orbit, a_n = 1 - 2^-n", &[("ζ", &dw)]));
    let sums: Vec<(f64, f64)> = conv.gap_sums.iter().enumerate().map(|(n, s)| (n as f64, *s)).collect();
    a.plot("sums.svg", Chart::new("partial sums of 1 - |F_n(0)|", "n", "sum").render(&[Series::line("sum", sums)]));
    a.result("convergence", &conv);
    a.result("dw", &dw);
    Ok(a)
}

fn cardioid(id: &str, workers: Option<usize>) -> Result<Artifacts> {
    let seq = build_sequence("ex4.3")?;
    let (horizon, samples, seed) = (1000, 200, 4);
    let z0 = C64::new(1.0, 0.0);
    let mut a =
        Artifacts::new(id, seq.id(), json!({"horizon": horizon, "samples": samples, "seed": seed, "z0": [1.0, 0.0]}));
    let conv = convergence_report(&seq, z0, horizon)?;
    let worst = (1..=horizon).map(|n| (conv.dist_series[n] * (n * n) as f64 - 1.0).abs()).fold(0.0f64, f64::max);
    a.check("dist(F_n(1), ∂U) = 1/n^2", worst <= 1e-9, format!("max relative error {worst:.2e} <= 1e-9"));
    a.check(
        "sum of dist^(1/2) diverges",
        conv.sqrt_gap_series.behaviour == SeriesBehaviour::Diverges,
        format!("{:?}, partial sum {:.3}", conv.sqrt_gap_series.behaviour, conv.sqrt_gap_series.total),
    );
    let powered: Vec<f64> = conv.dist_series[1..].iter().map(|d| d.powf(0.6)).collect();
    let v = series_verdict(&powered, &Thresholds::default());
    a.check(
        "sum of dist^0.6 converges",
        v.behaviour == SeriesBehaviour::Converges,
        format!("{:?}, fitted decay exponent {:.3}", v.behaviour, v.decay_exponent.unwrap_or(f64::NAN)),
    );
    let dw = dw_fraction(&seq, z0, samples, 100, 1e-3, seed, workers)?;
    a.check("Denjoy-Wolff fraction", dw.fraction <= 0.05, format!("{:.3} <= 0.05 at N = 100", dw.fraction));
    let cfg = WalkConfig { seed, workers, ..WalkConfig::default() };
    let geom = ProbeGeometry::cardioid_cusp(0.5);
    let fit = alpha_exponent_probe(&geom, &geom.default_distances(8), 100_000, &cfg)?;
    a.check("cusp exponent", (fit.alpha - 0.5).abs() <= 0.1, format!("α = {:.3}, want 0.5 ± 0.1", fit.alpha));
    let sq: Vec<(f64, f64)> = conv.sqrt_gap_sums.iter().enumerate().skip(1).map(|(n, s)| (n as f64, *s)).collect();
    a.plot("sums.svg", Chart::new("partial sums of dist^(1/2)", "n", "sum").render(&[Series::line("dist^(1/2)", sq)]));
    a.plot("alpha.svg", alpha_chart(&[&fit]));
    a.result("convergence", &conv);
    a.result("dw", &dw);
    a.result("alpha", &fit);
    Ok(a)
}

fn empty_set(id: &str, workers: Option<usize>) -> Result<Artifacts> {
    let seq = build_sequence("thmD:theta=pi/8")?;
    let (samples, horizon, seed) = (1000, 1000, 10);
    let mut a = Artifacts::new(id, seq.id(), json!({"samples": samples, "horizon": horizon, "seed": seed}));
    let ledger = escape_ledger_check(&seq, samples, horizon, seed, workers)?;
    a.check(
        "interior orbit F_n(0) = a_n tends to 1",
        ledger.interior.windows(2).all(|w| w[1] > w[0]) && ledger.interior[horizon] > 0.999,
        format!("a_N = {:.6}", ledger.interior[horizon]),
    );
    a.check("no escape failures", ledger.failures == 0, format!("{} failures", ledger.failures));
    a.check(
        "every orbit escapes once per wrap",
        ledger.under_covered == 0 && ledger.min_escapes as u64 >= ledger.wraps,
        format!("{} wraps, fewest escapes {}", ledger.wraps, ledger.min_escapes),
    );
    let dw = dw_fraction(&seq, origin(), samples, 100, 1e-3, seed, workers)?;
    a.check(
        "Denjoy-Wolff fraction is zero",
        dw.fraction == 0.0 && !dw.one_converges,
        format!("fraction {:.3}, ζ = 1 converges: {}", dw.fraction, dw.one_converges),
    );
    a.result("one_escapes", &ledger.samples[0]);
    let counts: Vec<f64> = ledger.samples.iter().map(|s| s.escape_indices.len() as f64).collect();
    let (lo, hi) = (ledger.min_escapes, counts.iter().copied().fold(0.0, f64::max) as usize);
    let labels: Vec<String> = (lo..=hi).map(|k| k.to_string()).collect();
    let hist: Vec<f64> = (lo..=hi).map(|k| counts.iter().filter(|&&c| c as usize == k).count() as f64).collect();
    a.plot("escapes.svg", bar_chart("escapes per sampled orbit", "samples", &labels, &hist));
    a.plot("gaps.svg", gap_chart("gap to the interior orbit, rotated pulls", &[("ζ", &dw)]));
    a.result("ledger", &ledger);
    a.result("dw", &dw);
    Ok(a)
}

fn half_plane_points() -> [C64; 3] {
    [C64::new(1.0, 0.0), C64::new(2.0, 1.0), C64::new(0.5, -0.7)]
}

fn disc_points() -> [C64; 3] {
    [origin(), C64::new(0.0, 0.3), C64::new(-0.2, 0.1)]
}

fn sweep(id: &str, _workers: Option<usize>) -> Result<Artifacts> {
    let seq = build_sequence("ex7.3")?;
    let horizon = 1000;
    let mut a =
        Artifacts::new(id, seq.id(), json!({"horizon": horizon, "points": [[1.0, 0.0], [2.0, 1.0], [0.5, -0.7]]}));
    let r = classify_hyperbolic(&seq, &half_plane_points(), horizon, &Thresholds::default())?;
    a.check("eventually isometric", r.verdict == Verdict::EventuallyIsometric, r.summary.clone());
    let series: Vec<Series> = r
        .pairwise_distance_series
        .iter()
        .map(|p| {
            let pts = p.distances.iter().enumerate().map(|(n, d)| (n as f64, *d)).collect();
            Series::line(format!("pair {}-{}", p.first, p.second), pts)
        })
        .collect();
    a.plot("distances.svg", Chart::new("pairwise hyperbolic distances", "n", "distance").render(&series));
    a.result("classification", &r);
    Ok(a)
}

fn pulls(id: &str, _workers: Option<usize>) -> Result<Artifacts> {
    let seq = build_sequence("ex8.1:a=1-1/n")?;
    let (angles, horizon) = (64, 200);
    let mut a = Artifacts::new(id, seq.id(), json!({"angles": angles, "horizon": horizon}));
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for k in 0..angles {
        let t = k as f64 / angles as f64;
        if k == angles / 2 {
            continue;
        }
        let r = cross_ratio_residual(&seq, t, horizon)?;
        let scale = 1.0 + cross_ratio_invariant(t).norm();
        worst = worst.max(r / scale);
        rows.push(json!({"angle_turns": t, "residual": r}));
    }
    a.check("cross ratio is invariant", worst <= 1e-9, format!("max scaled residual {worst:.2e} <= 1e-9"));
    let mut series = Vec::new();
    let mut monotone = true;
    for t in [0.125, 0.25, 0.375, 0.45] {
        let orbit: Vec<f64> = (0..=horizon)
            .map(|n| seq.evaluate_interior(n, C64::from_polar(1.0, TAU * t)).map(|w| (1.0 - w).norm()))
            .collect::<Result<_>>()?;
        monotone &= orbit.windows(2).skip(1).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        series.push(Series::line(
            format!("ζ at {t} turn"),
            orbit.iter().enumerate().map(|(n, d)| (n as f64, *d)).collect(),
        ));
    }
    a.check("boundary orbits approach 1", monotone, "|1 - M_n(ζ)| is nonincreasing for four angles".into());
    a.plot("approach.svg", Chart::new("|1 - M_n(ζ)|", "n", "distance").log_y().render(&series));
    a.result("cross_ratio", rows);
    Ok(a)
}

fn joukowski(id: &str, _workers: Option<usize>) -> Result<Artifacts> {
    let seq = build_sequence("ex8.2")?;
    let horizon = 1000;
    let mut a = Artifacts::new(id, seq.id(), json!({"identity_horizon": 10_000, "horizon": horizon}));
    let residual = joukowski_identity_residual(10_000);
    a.check("B_n(1) = n + 1", residual < 1e-8, format!("max relative error {residual:.2e} < 1e-8 for n <= 1e4"));
    let r = classify_hyperbolic(&seq, &half_plane_points(), horizon, &Thresholds::default())?;
    a.check("semi-contracting", r.verdict == Verdict::SemiContracting, r.summary.clone());
    let scaled: Vec<f64> =
        r.distortion_series[0].iter().enumerate().map(|(i, l)| ((i + 1) as f64).powi(2) * (1.0 - l)).collect();
    let half = scaled.len() / 2;
    let early = scaled[..half].iter().copied().fold(0.0f64, f64::max);
    let late = scaled[half..].iter().copied().fold(0.0f64, f64::max);
    a.check(
        "n^2 (1 - λ_n) bounded at z = 1",
        late <= early.max(1.0),
        format!("max {early:.4} on the first half, {late:.4} on the second"),
    );
    let growth = joukowski_growth_check(10_000, 100.0, 100)?;
    a.check(
        "imaginary-axis orbit from 100i outgrows n^(3/4)",
        growth.persists,
        format!("first above at n = {:?}, persists to N = 10^4", growth.first_above),
    );
    let fixed = joukowski_fixed_point(10_000);
    a.check(
        "repelling fixed point near sqrt(n)/2",
        (fixed / 50.0 - 1.0).abs() < 0.05,
        format!("{fixed:.4} at n = 10^4"),
    );
    a.plot(
        "distortion.svg",
        Chart::new("n^2 (1 - λ_n) at z = 1", "n", "scaled defect")
            .render(&[Series::line("z = 1", scaled.iter().enumerate().map(|(i, v)| ((i + 1) as f64, *v)).collect())]),
    );
    let g: Vec<(f64, f64)> =
        growth.values.iter().enumerate().map(|(i, v)| ((growth.start_index + i) as f64, *v)).step_by(10).collect();
    a.plot(
        "growth.svg",
        Chart::new("imaginary-axis orbit y_n", "n", "y_n").log_log().render(&[Series::line("y_n", g)]),
    );
    a.result("classification", &r);
    a.result("growth_first_above", growth.first_above);
    a.result("fixed_point_at_1e4", fixed);
    Ok(a)
}

fn power_pulls(id: &str, workers: Option<usize>) -> Result<Artifacts> {
    let (samples, tol, seed, arcs) = (1000, 1e-3, 9, 16);
    let fast = build_sequence("ex8.3:a=1-2^-n")?;
    let slow = build_sequence("ex8.3:a=1-1/n")?;
    let mut a = Artifacts::new(
        id,
        "ex8.3",
        json!({"samples": samples, "tol": tol, "seed": seed, "arcs": arcs, "horizon_fast": 100, "horizon_slow": 150}),
    );
    let dw_fast = dw_fraction(&fast, origin(), samples, 100, tol, seed, workers)?;
    a.check("a_n = 1 - 2^-n: full set", dw_fast.fraction >= 0.99, format!("fraction {:.3} >= 0.99", dw_fast.fraction));
    let dw_slow = dw_fraction(&slow, origin(), samples, 150, tol, seed, workers)?;
    a.check("a_n = 1 - 1/n: null set", dw_slow.fraction <= 0.05, format!("fraction {:.3} <= 0.05", dw_slow.fraction));
    let density = orbit_density_experiment(&slow, samples, arcs, 150, 1, seed, workers)?;
    a.check(
        "a_n = 1 - 1/n: dense orbits",
        density.mean_score > 0.9,
        format!("mean share of {arcs} arcs visited {:.3} > 0.9 at N = 150", density.mean_score),
    );
    let mut band = Vec::new();
    for (label, e) in [("1-2^-n", dw_fast.fraction), ("1-1/n", dw_slow.fraction)] {
        band.push((label.to_string(), e));
    }
    for label in ["1-1/(n+1)", "1-0.7^n", "1-0.9^n"] {
        let seq = build_sequence(&format!("ex8.3:a={label}"))?;
        band.push((label.to_string(), dw_fraction(&seq, origin(), samples, 100, tol, seed + 2, workers)?.fraction));
    }
    let inside: Vec<&(String, f64)> = band.iter().filter(|(_, f)| *f > 0.05 && *f < 0.95).collect();
    a.check(
        "zero-one band",
        inside.is_empty(),
        format!("{} of {} fractions inside (0.05, 0.95)", inside.len(), band.len()),
    );
    a.plot("gaps.svg", gap_chart("gap to the interior orbit", &[("2^-n", &dw_fast), ("1/n", &dw_slow)]));
    let labels: Vec<String> = (0..arcs).map(|j| j.to_string()).collect();
    let hist: Vec<f64> = density.visit_histogram.iter().map(|&v| v as f64).collect();
    a.plot("density.svg", bar_chart("visits per arc, a_n = 1 - 1/n", "visits", &labels, &hist));
    a.result("band", &band);
    a.result("dw_fast", &dw_fast);
    a.result("dw_slow", &dw_slow);
    a.result("density", &density);
    Ok(a)
}

fn shrinking_targets(id: &str, workers: Option<usize>) -> Result<Artifacts> {
    let (max_index, horizon, samples, visits, seed) = (20, 200, 1000, 3, 7);
    let mut a = Artifacts::new(
        id,
        "doubling",
        json!({"targets": "1/n", "max_index": max_index, "horizon": horizon, "samples": samples, "min_visits": visits, "seed": seed}),
    );
    let r = shrinking_target_report(TargetSizes::Reciprocal, max_index, horizon, samples, visits, seed, workers)?;
    a.check(
        "overlap bound with C = 3",
        r.bound_violations == 0,
        format!("{} violations over {} pairs", r.bound_violations, r.overlaps.len()),
    );
    a.check(
        "forced disjointness",
        r.disjointness_violations == 0,
        format!("{} non-empty pairs among those required empty", r.disjointness_violations),
    );
    let labels: Vec<String> = (0..r.visit_tail.len()).map(|k| format!(">= {k}")).collect();
    a.plot("visits.svg", bar_chart("share of orbits with at least k target visits", "share", &labels, &r.visit_tail));
    a.result("report", &r);
    Ok(a)
}

fn alpha_chart(fits: &[&AlphaFit]) -> String {
    let mut series = Vec::new();
    for f in fits {
        let pts: Vec<(f64, f64)> = f.distances.iter().zip(&f.estimates).map(|(x, e)| (*x, e.value)).collect();
        series.push(Series::markers(format!("{} estimates", f.geometry), pts));
        let line = f.distances.iter().map(|x| (*x, (f.intercept + f.alpha * x.ln()).exp())).collect();
        series.push(Series::line(format!("{} α = {:.3}", f.geometry, f.alpha), line));
    }
    Chart::new("harmonic measure of the cut against distance", "x", "ω").log_log().render(&series)
}

fn alpha_probes(id: &str, workers: Option<usize>) -> Result<Artifacts> {
    let walks = 100_000;
    let mut a = Artifacts::new(id, "none", json!({"walks": walks, "distances": 8, "seed": 600}));
    let cases = [
        (ProbeGeometry::disc(0.5), 1.0),
        (ProbeGeometry::cardioid_cusp(0.5), 0.5),
        (ProbeGeometry::sector_complement(FRAC_PI_2, 1.0), 2.0 / 3.0),
    ];
    let mut fits = Vec::new();
    for (i, (geom, want)) in cases.iter().enumerate() {
        let cfg = WalkConfig { seed: 600 + i as u64, workers, ..WalkConfig::default() };
        let fit = alpha_exponent_probe(geom, &geom.default_distances(8), walks, &cfg)?;
        a.check(
            &format!("{} exponent", geom.name),
            (fit.alpha - want).abs() <= 0.1,
            format!("α = {:.3}, want {want:.3} ± 0.1", fit.alpha),
        );
        fits.push(fit);
    }
    a.plot("alpha.svg", alpha_chart(&fits.iter().collect::<Vec<_>>()));
    a.result("fits", &fits);
    Ok(a)
}

fn random_arcs(rng: &mut ChaCha8Rng) -> Result<ArcSet> {
    let k = rng.gen_range(1..=3);
    let arcs =
        (0..k).map(|_| CircleArc::new(rng.gen::<f64>(), 0.02 + 0.3 * rng.gen::<f64>())).collect::<Result<Vec<_>>>()?;
    Ok(ArcSet::from_arcs(arcs))
}

fn loewner(id: &str, _workers: Option<usize>) -> Result<Artifacts> {
    let (cases, seed) = (200, 5);
    let mut a = Artifacts::new(id, "none", json!({"cases": cases, "seed": seed}));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_kind = [(f64::INFINITY, 0.0f64); 3];
    for i in 0..cases {
        let z = disc_point(&mut rng, 0.9);
        let set = random_arcs(&mut rng)?;
        let e = ExactReal::Value(0.01 + 0.98 * rng.gen::<f64>());
        let p = rng.gen_range(2..=5u32);
        let map = match i % 3 {
            0 => Map::new(vec![MapAtom::Pull(e), MapAtom::Rotate(ExactReal::Value(rng.gen()))]),
            1 => Map::new(vec![MapAtom::Power(p)]),
            _ => Map::new(vec![MapAtom::PullInverse(e.clone()), MapAtom::Power(p), MapAtom::Pull(e)]),
        };
        let d = loewner_check(&map, z, &set)?;
        let slot = &mut by_kind[i % 3];
        *slot = (slot.0.min(d), slot.1.max(d));
    }
    let min = by_kind.iter().map(|k| k.0).fold(f64::INFINITY, f64::min);
    a.check("defect is nonnegative", min >= -1e-12, format!("smallest defect {min:.2e} (rounding allowance 1e-12)"));
    let equality = by_kind[..2].iter().map(|k| k.0.abs().max(k.1.abs())).fold(0.0f64, f64::max);
    a.check(
        "equality for Möbius maps and powers",
        equality <= 1e-10,
        format!("largest |defect| {equality:.2e} <= 1e-10"),
    );
    let labels = vec!["Möbius".to_string(), "z^p".to_string(), "conjugated z^p".to_string()];
    a.plot("defects.svg", bar_chart("largest Löwner defect by map kind", "defect", &labels, &by_kind.map(|k| k.1)));
    a.result(
        "defects",
        labels.iter().zip(&by_kind).map(|(l, k)| json!({"kind": l, "min": k.0, "max": k.1})).collect::<Vec<_>>(),
    );
    Ok(a)
}

fn classification(id: &str, _workers: Option<usize>) -> Result<Artifacts> {
    let horizon = 1000;
    let th = Thresholds::default();
    let mut a = Artifacts::new(id, "anchors", json!({"horizon": horizon}));
    let mut series = Vec::new();
    for (seq_id, points, want) in [
        ("ex7.3", half_plane_points(), Verdict::EventuallyIsometric),
        ("ex8.2", half_plane_points(), Verdict::SemiContracting),
        ("ex8.3", disc_points(), Verdict::Contracting),
    ] {
        let seq = build_sequence(seq_id)?;
        let r = classify_hyperbolic(&seq, &points, horizon, &th)?;
        a.check(&format!("{seq_id} is {want:?}"), r.verdict == want, r.summary.clone());
        let pts = r.partial_sums[0].iter().enumerate().map(|(n, s)| ((n + 1) as f64, *s)).collect();
        series.push(Series::line(seq_id, pts));
        a.result(seq_id, &r);
    }
    a.plot("sums.svg", Chart::new("partial sums of 1 - λ_n at the first sample point", "n", "sum").render(&series));
    Ok(a)
}
