//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runs without the libtest harness so every line is shown.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::{Duration, Instant};

use dwset::classify::{classify_hyperbolic, proximity_residual, Thresholds, Verdict};
use dwset::experiments::{
    dw_fraction, escape_ledger_check, joukowski_identity_residual, orbit_density_experiment, shrinking_target_report,
    TargetSizes,
};
use dwset::harmonic::{
    alpha_exponent_probe, harmonic_measure_disc, loewner_check, walk_on_spheres, ArcSet, CircleArc, ProbeGeometry,
    WalkConfig,
};
use dwset::hypgeo::{cardioid_forward, DomainSpec, C64};
use dwset::mapfab::{build_sequence, ExactReal, Map, MapAtom};
use dwset::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(t: Instant, budget: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e <= budget, format!("{:.2} s of {} s", e.as_secs_f64(), budget.as_secs()))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_disc_point(r: &mut ChaCha8Rng, max: f64) -> C64 {
    C64::from_polar(max * r.gen::<f64>().sqrt(), TAU * r.gen::<f64>())
}

fn random_arc_set(r: &mut ChaCha8Rng) -> ArcSet {
    let k = r.gen_range(1..=3);
    ArcSet::from_arcs((0..k).map(|_| CircleArc::new(r.gen::<f64>(), 0.02 + 0.3 * r.gen::<f64>()).unwrap()))
}

/// Criterion 1.
fn half_plane_identity() -> Outcome {
    let t = Instant::now();
    let worst = joukowski_identity_residual(10_000);
    let (fast, time) = within(t, Duration::from_secs(1));
    outcome(worst < 1e-8 && fast, format!("max rel err of B_n(1) vs n+1 over n <= 1e4 = {worst:.2e} (< 1e-8); {time}"))
}

fn point_for(domain: &DomainSpec, r: &mut ChaCha8Rng) -> C64 {
    match domain {
        DomainSpec::RightHalfPlane => C64::new(0.05 + 5.0 * r.gen::<f64>(), -3.0 + 6.0 * r.gen::<f64>()),
        DomainSpec::Cardioid => cardioid_forward(random_disc_point(r, 0.9)),
        _ => random_disc_point(r, 0.95),
    }
}

/// Criterion 2.
fn proximity_suite() -> Outcome {
    let t = Instant::now();
    let mut r = rng(2);
    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    for id in ["ex8.3", "ex8.1", "ex8.2", "ex4.3", "ex7.3", "thmD"] {
        let seq = build_sequence(id).unwrap();
        let dom = seq.domain(0);
        for _ in 0..100 {
            let (z, z0) = (point_for(&dom, &mut r), point_for(&dom, &mut r));
            match proximity_residual(&seq, z, z0, 200) {
                Ok(res) => worst = worst.max(res),
                Err(e) => failures.push(format!("{id}: {e}")),
            }
        }
    }
    let (fast, time) = within(t, Duration::from_secs(30));
    outcome(
        worst <= 1e-9 && failures.is_empty() && fast,
        format!(
            "6 families x 100 pairs, N = 200: max residual {worst:.3e} (<= 1e-9), {} errors; {time}",
            failures.len()
        ),
    )
}

/// Disc distance from `2 artanh |z - w| / |1 - conj(w) z|`, independent of the library formula.
fn oracle_disc_distance(z: C64, w: C64) -> f64 {
    2.0 * ((z - w).norm() / (1.0 - w.conj() * z).norm()).atanh()
}

/// Criterion 3.
fn density_ratio_bounds() -> Outcome {
    let t = Instant::now();
    let mut r = rng(3);
    let mut violations = 0;
    let mut mismatch = 0.0f64;
    let mut check = |dom: &DomainSpec, z: C64, w: C64, d: f64| {
        let ratio = dom.density(w).unwrap() / dom.density(z).unwrap();
        if !(ratio >= (-2.0 * d).exp() * (1.0 - 1e-12) && ratio <= (2.0 * d).exp() * (1.0 + 1e-12)) {
            violations += 1;
        }
    };
    for _ in 0..10_000 {
        let (z, w) = (random_disc_point(&mut r, 0.999), random_disc_point(&mut r, 0.999));
        let d = oracle_disc_distance(z, w);
        mismatch = mismatch.max((d - DomainSpec::UnitDisc.hyperbolic_distance(z, w).unwrap()).abs() / (1.0 + d));
        check(&DomainSpec::UnitDisc, z, w, d);
    }
    for _ in 0..1_000 {
        let (a, b) = (random_disc_point(&mut r, 0.99), random_disc_point(&mut r, 0.99));
        let (z, w) = (cardioid_forward(a), cardioid_forward(b));
        // preimages by hand: 1 - sqrt(z) with the principal root
        let (pa, pb) = (1.0 - z.sqrt(), 1.0 - w.sqrt());
        let d = oracle_disc_distance(pa, pb);
        mismatch = mismatch.max((d - DomainSpec::Cardioid.hyperbolic_distance(z, w).unwrap()).abs() / (1.0 + d));
        check(&DomainSpec::Cardioid, z, w, d);
    }
    let (fast, time) = within(t, Duration::from_secs(10));
    outcome(
        violations == 0 && mismatch < 1e-8 && fast,
        format!(
            "1e4 disc + 1e3 cardioid pairs: {violations} violations, distance oracle mismatch {mismatch:.1e}; {time}"
        ),
    )
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

/// `∫_A P(z, e^{2πis}) ds` over the arcs of `A`, `s` in turns.
fn poisson_quadrature(z: C64, set: &ArcSet) -> f64 {
    let kernel = |s: f64| (1.0 - z.norm_sqr()) / (C64::from_polar(1.0, TAU * s) - z).norm_sqr();
    set.arcs()
        .iter()
        .map(|a| {
            let s = a.start_turns();
            simpson(&kernel, s, s + a.length_turns(), 1e-14)
        })
        .sum()
}

/// Criterion 4.
fn harmonic_measure_exactness() -> Outcome {
    let t = Instant::now();
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = random_disc_point(&mut r, 0.9);
        let set = random_arc_set(&mut r);
        let exact = harmonic_measure_disc(z, &set).unwrap().value;
        worst = worst.max((exact - poisson_quadrature(z, &set)).abs());
    }
    let mut agree = 0;
    for i in 0..50 {
        let z = random_disc_point(&mut r, 0.8);
        let set = random_arc_set(&mut r);
        let exact = harmonic_measure_disc(z, &set).unwrap().value;
        let target = |p: C64| set.contains_turns((p.arg() / TAU).rem_euclid(1.0));
        let cfg = WalkConfig { seed: 400 + i, ..WalkConfig::default() };
        let est = walk_on_spheres(&DomainSpec::UnitDisc, z, &target, 100_000, &cfg).unwrap();
        if (est.value - exact).abs() <= 3.0 * est.std_error.max(1e-12) {
            agree += 1;
        }
    }
    let (fast, time) = within(t, Duration::from_secs(120));
    outcome(
        worst < 1e-10 && agree >= 48 && fast,
        format!(
            "Möbius vs Poisson quadrature max diff {worst:.1e} (< 1e-10); walk-on-spheres within 3σ in {agree}/50 (>= 48); {time}"
        ),
    )
}

/// Criterion 5.
fn loewner_defects() -> Outcome {
    let t = Instant::now();
    let mut r = rng(5);
    let (mut min_defect, mut max_equality) = (f64::INFINITY, 0.0f64);
    for i in 0..200 {
        let z = random_disc_point(&mut r, 0.9);
        let set = random_arc_set(&mut r);
        let e = ExactReal::Value(0.01 + 0.98 * r.gen::<f64>());
        let p = r.gen_range(2..=5u32);
        let (map, equality) = match i % 3 {
            0 => (Map::new(vec![MapAtom::Pull(e), MapAtom::Rotate(ExactReal::Value(r.gen()))]), true),
            1 => (Map::new(vec![MapAtom::Power(p)]), true),
            _ => (Map::new(vec![MapAtom::PullInverse(e.clone()), MapAtom::Power(p), MapAtom::Pull(e)]), false),
        };
        let d = loewner_check(&map, z, &set).unwrap();
        min_defect = min_defect.min(d);
        if equality {
            max_equality = max_equality.max(d.abs());
        }
    }
    let (fast, time) = within(t, Duration::from_secs(10));
    outcome(
        min_defect >= -1e-12 && max_equality <= 1e-10 && fast,
        format!(
            "200 cases: min defect {min_defect:.2e} (>= 0 up to 1e-12 rounding), max |defect| for Möbius and z^p {max_equality:.1e} (<= 1e-10); {time}"
        ),
    )
}

/// Criterion 6.
fn alpha_probes() -> Outcome {
    let t = Instant::now();
    let cases = [
        (ProbeGeometry::disc(0.5), 1.0),
        (ProbeGeometry::cardioid_cusp(0.5), 0.5),
        (ProbeGeometry::sector_complement(FRAC_PI_2, 1.0), 2.0 / 3.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (geom, expected)) in cases.iter().enumerate() {
        let cfg = WalkConfig { seed: 600 + i as u64, ..WalkConfig::default() };
        match alpha_exponent_probe(geom, &geom.default_distances(8), 100_000, &cfg) {
            Ok(fit) => {
                pass &= (fit.alpha - expected).abs() <= 0.1;
                parts.push(format!("{} {:.3} (want {:.3} ± 0.1)", geom.name, fit.alpha, expected));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{} error: {e}", geom.name));
            }
        }
    }
    let (fast, time) = within(t, Duration::from_secs(300));
    outcome(pass && fast, format!("{}; {time}", parts.join(", ")))
}

/// `|A_m ∩ A_n|` with exact rationals: `A_n` is the union of the arcs of
/// length `ε_n / 2^n` centred at `(2k + 1) / 2^(n+1)`.
fn oracle_overlap(m: u32, n: u32, hm: &Rational, hn: &Rational) -> Rational {
    let mut total = Rational::new();
    let (sm, sn) = (Rational::from((1, Integer::from(1) << (m + 1))), Rational::from((1, Integer::from(1) << (n + 1))));
    for k in 0..(1u64 << m) {
        let cm = Rational::from(&sm * (2 * k + 1));
        let (lo, hi) = (Rational::from(&cm - hm), Rational::from(&cm + hm));
        // arcs of A_n near [lo, hi): indices j with centre within hi + hn
        let ratio = Rational::from(&lo / &sn) / 2u32;
        let first = ratio.floor().numer().to_i64().unwrap() - 1;
        let mut j = first;
        loop {
            let cn = Rational::from(&sn * (2 * j + 1));
            if cn > Rational::from(&hi + hn) {
                break;
            }
            let a = Rational::from(&cn - hn).max(lo.clone());
            let b = Rational::from(&cn + hn).min(hi.clone());
            if b > a {
                total += b - a;
            }
            j += 1;
        }
    }
    total
}

/// Criterion 7.
fn shrinking_target_overlaps() -> Outcome {
    let t = Instant::now();
    let report = shrinking_target_report(TargetSizes::Reciprocal, 20, 20, 0, 1, 0, None).unwrap();
    let required = report.overlaps.iter().filter(|o| o.disjoint_required).count();
    // Independent check of the exact measures for m < n <= 10, in rationals.
    let turn = Rational::from(Integer::from(1) << 127);
    let half = |n: u32| {
        // half-width used by the library: floor(ε 2^126) / 2^127, times 2^-n
        let h = Integer::from(((1.0 / n as f64) * 2f64.powi(126)) as u128);
        Rational::from(h) / &turn / Rational::from(Integer::from(1) << n)
    };
    let mut oracle_mismatch = 0usize;
    for o in report.overlaps.iter().filter(|o| o.n <= 10) {
        let exact = oracle_overlap(o.m as u32, o.n as u32, &half(o.m as u32), &half(o.n as u32));
        if (exact.to_f64() - o.measure).abs() > 1e-15 * (1.0 + o.measure) {
            oracle_mismatch += 1;
        }
    }
    let (fast, time) = within(t, Duration::from_secs(5));
    outcome(
        report.bound_violations == 0 && report.disjointness_violations == 0 && oracle_mismatch == 0 && fast,
        format!(
            "{} pairs m < n <= 20: {} C = 3 violations, {} of {} required-empty pairs non-empty, {} rational-oracle mismatches; {time}",
            report.overlaps.len(),
            report.bound_violations,
            report.disjointness_violations,
            required,
            oracle_mismatch
        ),
    )
}

/// Criterion 8.
fn classification_anchors() -> Outcome {
    let t = Instant::now();
    let th = Thresholds::default();
    let hp = [C64::new(1.0, 0.0), C64::new(2.0, 1.0), C64::new(0.5, -0.7)];
    let disc = [C64::new(0.0, 0.0), C64::new(0.0, 0.3), C64::new(-0.2, 0.1)];
    let ex73 = classify_hyperbolic(&build_sequence("ex7.3").unwrap(), &hp, 1000, &th).unwrap();
    let ex82 = classify_hyperbolic(&build_sequence("ex8.2").unwrap(), &hp, 1000, &th).unwrap();
    let ex83 = classify_hyperbolic(&build_sequence("ex8.3").unwrap(), &disc, 1000, &th).unwrap();
    // n^2 (1 - λ_n) at z = 1: bounded, with the late half no larger than the early half
    let scaled: Vec<f64> =
        ex82.distortion_series[0].iter().enumerate().map(|(i, l)| ((i + 1) as f64).powi(2) * (1.0 - l)).collect();
    let early = scaled[..500].iter().copied().fold(0.0f64, f64::max);
    let late = scaled[500..].iter().copied().fold(0.0f64, f64::max);
    let bounded = late.is_finite() && late <= early.max(1.0);
    let (fast, time) = within(t, Duration::from_secs(30));
    outcome(
        ex73.verdict == Verdict::EventuallyIsometric
            && ex82.verdict == Verdict::SemiContracting
            && ex83.verdict == Verdict::Contracting
            && bounded
            && fast,
        format!(
            "N = 1000: ex7.3 {:?}, ex8.2 {:?} (max n^2(1-λ_n) {:.3} early, {:.3} late), ex8.3 {:?}; {time}",
            ex73.verdict, ex82.verdict, early, late, ex83.verdict
        ),
    )
}

/// Criteria 9 and 11 share their runs.
fn dw_dichotomy_and_band() -> (Outcome, Outcome) {
    let t = Instant::now();
    let z0 = C64::new(0.0, 0.0);
    let geo = dw_fraction(&build_sequence("ex8.3:a=1-2^-n").unwrap(), z0, 1000, 100, 1e-3, 9, None).unwrap();
    let rec_seq = build_sequence("ex8.3:a=1-1/n").unwrap();
    let rec = dw_fraction(&rec_seq, z0, 1000, 150, 1e-3, 9, None).unwrap();
    let density = orbit_density_experiment(&rec_seq, 1000, 16, 150, 1, 9, None).unwrap();
    let elapsed_9 = t.elapsed();
    let nine = outcome(
        geo.fraction >= 0.99 && rec.fraction <= 0.05 && density.mean_score > 0.9 && elapsed_9 <= Duration::from_secs(600),
        format!(
            "a=1-2^-n N=100 ({} bits): fraction {:.3} (>= 0.99); a=1-1/n N=150 ({} bits): fraction {:.3} (<= 0.05), mean density over 16 arcs {:.3} (> 0.9); {:.1} s of 600 s",
            geo.precision_bits,
            geo.fraction,
            rec.precision_bits,
            rec.fraction,
            density.mean_score,
            elapsed_9.as_secs_f64()
        ),
    );

    let mut fractions = vec![("ex8.3:a=1-2^-n".to_string(), geo.fraction), ("ex8.3:a=1-1/n".to_string(), rec.fraction)];
    let mut excluded: Vec<String> = Vec::new();
    // The contracting built-ins are the power-pull Blaschke products; the
    // pull sequences and the empty-set construction are automorphisms.
    for id in ["ex8.3:a=1-1/(n+1)", "ex8.3:a=1-0.7^n", "ex8.3:a=1-0.9^n"] {
        let seq = build_sequence(id).unwrap();
        match dw_fraction(&seq, z0, 1000, 100, 1e-3, 11, None) {
            Ok(e) => fractions.push((id.to_string(), e.fraction)),
            Err(Error::DwUndefined(_)) => excluded.push(id.to_string()),
            Err(e) => excluded.push(format!("{id} ({e})")),
        }
    }
    let in_band: Vec<&(String, f64)> = fractions.iter().filter(|(_, f)| *f > 0.05 && *f < 0.95).collect();
    let (fast, time) = within(t, Duration::from_secs(600));
    let eleven = outcome(
        in_band.is_empty() && fast,
        format!(
            "{}; none in (0.05, 0.95): {}; excluded as not converging: [{}]; {time}",
            fractions.iter().map(|(id, f)| format!("{id} {f:.3}")).collect::<Vec<_>>().join(", "),
            in_band.is_empty(),
            excluded.join(", ")
        ),
    );
    (nine, eleven)
}

/// Criterion 10.
fn escape_ledger() -> Outcome {
    let t = Instant::now();
    let seq = build_sequence("thmD:theta=pi/8").unwrap();
    let horizon = 1000;
    let ledger = escape_ledger_check(&seq, 1000, horizon, 10, None).unwrap();
    let interior_ok = (0..=horizon).all(|n| {
        let w = seq.evaluate_interior(n, C64::new(0.0, 0.0)).unwrap();
        (w - C64::new(ledger.interior[n], 0.0)).norm() < 1e-12
    }) && ledger.interior.windows(2).all(|w| w[1] > w[0])
        && ledger.interior[horizon] > 0.999;
    let one = &ledger.samples[0];
    let (fast, time) = within(t, Duration::from_secs(120));
    outcome(
        interior_ok && ledger.failures == 0 && ledger.under_covered == 0 && ledger.wraps >= 1 && one.escape_indices.len() as u64 >= ledger.wraps && fast,
        format!(
            "N = {horizon}, Θ = {:.3} turns ({} wraps): F_n(0) = a_n -> {:.4}; 1001 samples, min escapes {}, ζ = 1 escapes {}, failures {}, under-covered {}; {time}",
            ledger.total_angle_turns,
            ledger.wraps,
            ledger.interior[horizon],
            ledger.min_escapes,
            one.escape_indices.len(),
            ledger.failures,
            ledger.under_covered
        ),
    )
}

/// Criterion 12.
fn determinism() -> Outcome {
    let t = Instant::now();
    let run = |workers| {
        let seq = build_sequence("ex8.3:a=1-1/n").unwrap();
        let dw = dw_fraction(&seq, C64::new(0.0, 0.0), 200, 60, 1e-3, 12, Some(workers)).unwrap();
        let st = shrinking_target_report(TargetSizes::Reciprocal, 8, 60, 200, 3, 12, Some(workers)).unwrap();
        let cfg = WalkConfig { seed: 12, workers: Some(workers), block: 1000, ..WalkConfig::default() };
        let wos =
            walk_on_spheres(&DomainSpec::UnitDisc, C64::new(0.3, 0.2), &|p: C64| p.im > 0.0, 20_000, &cfg).unwrap();
        serde_json::to_string(&(dw, st, wos)).unwrap()
    };
    let (a, b, c) = (run(1), run(1), run(4));
    let (fast, time) = within(t, Duration::from_secs(120));
    outcome(
        a == b && a == c && fast,
        format!(
            "report of {} bytes identical across repeats and worker counts 1/4: {}; {time}",
            a.len(),
            a == b && a == c
        ),
    )
}

fn report(k: u32, name: &str, o: Outcome, failed: &mut usize) {
    println!("criterion {k:>2} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    if !o.pass {
        *failed += 1;
    }
}

fn main() {
    let start = Instant::now();
    let mut failed = 0;
    report(1, "half-plane identity B_n(1) = n+1", half_plane_identity(), &mut failed);
    report(2, "proximity inequality suite", proximity_suite(), &mut failed);
    report(3, "density-ratio bounds", density_ratio_bounds(), &mut failed);
    report(4, "harmonic-measure exactness", harmonic_measure_exactness(), &mut failed);
    report(5, "Löwner defect", loewner_defects(), &mut failed);
    report(6, "α-exponent probes", alpha_probes(), &mut failed);
    report(7, "shrinking-target overlaps", shrinking_target_overlaps(), &mut failed);
    report(8, "classification anchors", classification_anchors(), &mut failed);
    let (nine, eleven) = dw_dichotomy_and_band();
    report(9, "Denjoy-Wolff dichotomy proxy", nine, &mut failed);
    report(10, "empty Denjoy-Wolff ledger", escape_ledger(), &mut failed);
    report(11, "zero-one band", eleven, &mut failed);
    report(12, "determinism", determinism(), &mut failed);
    println!("acceptance: {} passed, {failed} failed in {:.1} s", 12 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
