use dwset::circle::{arc_visits, boundary_orbit, precision_adequacy, BoundaryAngle};
use dwset::classify::{distortion_series, proximity_residual};
use dwset::harmonic::{harmonic_measure_disc, loewner_check, preimage_arcset, ArcSet, CircleArc, TURN};
use dwset::hypgeo::{cardioid_forward, DomainSpec, HoloMap, MoebiusTransform, C64};
use dwset::mapfab::{
    build_sequence, doubling_family, power_pull_family, rotated_pull_family, Map, MapAtom, MapSequence, ParamSequence,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;

const FAMILIES: [&str; 6] = ["ex8.3", "ex8.1", "ex8.2", "ex4.3", "ex7.3", "thmD"];

fn disc_point() -> impl Strategy<Value = C64> {
    (0.0..0.95f64, 0.0..1.0f64).prop_map(|(r, t)| C64::from_polar(r, std::f64::consts::TAU * t))
}

fn half_plane_point() -> impl Strategy<Value = C64> {
    (0.05..5.0f64, -3.0..3.0f64).prop_map(|(x, y)| C64::new(x, y))
}

fn cardioid_point() -> impl Strategy<Value = C64> {
    (0.0..0.9f64, 0.0..1.0f64).prop_map(|(r, t)| cardioid_forward(C64::from_polar(r, std::f64::consts::TAU * t)))
}

/// A point of the initial domain of `seq`.
fn point_in(seq: &MapSequence, u: (f64, f64)) -> C64 {
    match seq.domain(0) {
        DomainSpec::RightHalfPlane => C64::new(0.05 + 4.95 * u.0, -3.0 + 6.0 * u.1),
        DomainSpec::Cardioid => cardioid_forward(C64::from_polar(0.9 * u.0, std::f64::consts::TAU * u.1)),
        _ => C64::from_polar(0.95 * u.0, std::f64::consts::TAU * u.1),
    }
}

fn arc() -> impl Strategy<Value = CircleArc> {
    (0.0..1.0f64, 1e-6..0.999f64).prop_map(|(s, l)| CircleArc::new(s, l).unwrap())
}

fn ratio_within(dom: &DomainSpec, z: C64, w: C64) -> bool {
    let d = dom.hyperbolic_distance(z, w).unwrap();
    let ratio = dom.density(w).unwrap() / dom.density(z).unwrap();
    let slack = 1e-12;
    ratio >= (-2.0 * d).exp() * (1.0 - slack) && ratio <= (2.0 * d).exp() * (1.0 + slack)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn density_ratio_disc(z in disc_point(), w in disc_point()) {
        prop_assert!(ratio_within(&DomainSpec::UnitDisc, z, w));
    }

    #[test]
    fn density_ratio_cardioid(z in cardioid_point(), w in cardioid_point()) {
        prop_assert!(ratio_within(&DomainSpec::Cardioid, z, w));
    }

    #[test]
    fn density_against_boundary_distance(z in disc_point(), h in half_plane_point(), c in cardioid_point()) {
        for (dom, p) in [(DomainSpec::UnitDisc, z), (DomainSpec::RightHalfPlane, h), (DomainSpec::Cardioid, c)] {
            let rho = dom.density(p).unwrap();
            let delta = dom.boundary_distance(p).unwrap();
            prop_assert!(rho * delta >= 0.5 * (1.0 - 1e-9) && rho * delta <= 2.0 * (1.0 + 1e-9),
                "{} at {p}: rho delta = {}", dom.name(), rho * delta);
        }
    }

    #[test]
    fn automorphisms_preserve_distance(z in disc_point(), w in disc_point(), a in disc_point(), t in 0.0..1.0f64) {
        let m = MoebiusTransform::rotation(t).compose(&MoebiusTransform::pull(a).unwrap());
        let before = DomainSpec::UnitDisc.hyperbolic_distance(z, w).unwrap();
        let (fz, fw) = (m.apply(z).unwrap(), m.apply(w).unwrap());
        prop_assume!(fz.norm() < 1.0 - 1e-6 && fw.norm() < 1.0 - 1e-6);
        let after = DomainSpec::UnitDisc.hyperbolic_distance(fz, fw).unwrap();
        prop_assert!((before - after).abs() <= 1e-10 * (1.0 + before), "{before} vs {after}");
    }

    #[test]
    fn steps_do_not_expand_distances(fam in 0..6usize, n in 1..40usize, u in (0.0..1.0f64, 0.0..1.0f64), v in (0.0..1.0f64, 0.0..1.0f64)) {
        let seq = build_sequence(FAMILIES[fam]).unwrap();
        let (z, w) = (seq.evaluate_interior(n - 1, point_in(&seq, u)).unwrap(), seq.evaluate_interior(n - 1, point_in(&seq, v)).unwrap());
        let (dom, codom) = (seq.domain(n - 1), seq.domain(n));
        let f = seq.step(n);
        let (fz, fw) = (f.eval(z).unwrap(), f.eval(w).unwrap());
        prop_assume!(codom.contains(fz) && codom.contains(fw));
        let before = dom.hyperbolic_distance(z, w).unwrap();
        let after = codom.hyperbolic_distance(fz, fw).unwrap();
        prop_assert!(after <= before + 1e-9 * (1.0 + before), "{}: {after} > {before}", seq.id());
    }

    #[test]
    fn proximity_bound_holds(fam in 0..6usize, u in (0.0..1.0f64, 0.0..1.0f64), v in (0.0..1.0f64, 0.0..1.0f64)) {
        let seq = build_sequence(FAMILIES[fam]).unwrap();
        let r = proximity_residual(&seq, point_in(&seq, u), point_in(&seq, v), 60).unwrap();
        prop_assert!(r <= 1e-9, "{}: residual {r}", seq.id());
    }

    #[test]
    fn closed_form_matches_composition(fam in 0..6usize, n in 0..=25usize, u in (0.0..1.0f64, 0.0..0.8f64)) {
        let seq = build_sequence(FAMILIES[fam]).unwrap();
        prop_assume!(seq.has_closed_form());
        let z = point_in(&seq, u);
        let a = seq.evaluate_interior(n, z).unwrap();
        let b = seq.evaluate_by_composition(n, z).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()), "{} n={n}: {a} vs {b}", seq.id());
    }

    #[test]
    fn interior_orbits_stay_inside(fam in 0..6usize, n in 0..60usize, u in (0.0..1.0f64, 0.0..1.0f64)) {
        let seq = build_sequence(FAMILIES[fam]).unwrap();
        let w = seq.evaluate_interior(n, point_in(&seq, u)).unwrap();
        prop_assert!(seq.domain(n).contains(w), "{} n={n}: {w}", seq.id());
    }

    #[test]
    fn distortion_is_a_contraction(fam in 0..6usize, u in (0.0..1.0f64, 0.0..1.0f64)) {
        let seq = build_sequence(FAMILIES[fam]).unwrap();
        let lam = distortion_series(&seq, point_in(&seq, u), 40).unwrap();
        prop_assert!(lam.iter().all(|l| (0.0..=1.0).contains(l)));
    }

    #[test]
    fn arc_measure_inclusion_exclusion(a in arc(), b in arc(), c in arc()) {
        let x = ArcSet::from_arc(a).union(&ArcSet::from_arc(c));
        let y = ArcSet::from_arc(b);
        let lhs = x.union(&y).measure_fixed() + x.intersection(&y).measure_fixed();
        prop_assert_eq!(lhs, x.measure_fixed() + y.measure_fixed());
        prop_assert_eq!(x.complement().measure_fixed() + x.measure_fixed(), TURN);
        prop_assert!(x.intersection(&y).measure_fixed() <= x.measure_fixed().min(y.measure_fixed()));
    }

    #[test]
    fn harmonic_measure_is_a_probability(z in disc_point(), a in arc(), b in arc()) {
        let (sa, sb) = (ArcSet::from_arc(a), ArcSet::from_arc(b));
        let w = |s: &ArcSet| harmonic_measure_disc(z, s).unwrap().value;
        let (ua, ub) = (sa.union(&sb), sa.intersection(&sb));
        prop_assert!((w(&ua) + w(&ub) - w(&sa) - w(&sb)).abs() < 1e-12);
        prop_assert!((w(&sa) + w(&sa.complement()) - 1.0).abs() < 1e-12);
        prop_assert!(w(&ub) <= w(&sa) + 1e-15 && w(&sa) <= w(&ua) + 1e-15);
    }

    #[test]
    fn harmonic_measure_mean_value(r in 0.0..0.8f64, t in 0.0..1.0f64, a in arc()) {
        let z = C64::from_polar(r, std::f64::consts::TAU * t);
        let set = ArcSet::from_arc(a);
        let centre = harmonic_measure_disc(z, &set).unwrap().value;
        let rad = 1e-3;
        let k = 64;
        let mean: f64 = (0..k)
            .map(|j| {
                let p = z + C64::from_polar(rad, std::f64::consts::TAU * j as f64 / k as f64);
                harmonic_measure_disc(p, &set).unwrap().value
            })
            .sum::<f64>()
            / k as f64;
        prop_assert!((mean - centre).abs() < 1e-8, "{mean} vs {centre}");
    }

    #[test]
    fn loewner_defect_is_nonnegative(z in disc_point(), a in arc(), p in 2u32..5, e in 0.01..1.0f64) {
        let set = ArcSet::from_arc(a);
        let blaschke = Map::new(vec![MapAtom::PullInverse(dwset::mapfab::ExactReal::Value(e)), MapAtom::Power(p), MapAtom::Pull(dwset::mapfab::ExactReal::Value(e))]);
        prop_assert!(loewner_check(&blaschke, z, &set).unwrap() >= -1e-12);
        let power = Map::new(vec![MapAtom::Power(p)]);
        prop_assert!(loewner_check(&power, z, &set).unwrap().abs() <= 1e-10);
        let moebius = Map::new(vec![MapAtom::Pull(dwset::mapfab::ExactReal::Value(e)), MapAtom::Rotate(dwset::mapfab::ExactReal::Value(0.3))]);
        prop_assert!(loewner_check(&moebius, z, &set).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn doubling_visits_match_preimages(seed in any::<u64>(), a in arc()) {
        let seq = doubling_family();
        let theta = BoundaryAngle::random(&mut ChaCha8Rng::seed_from_u64(seed), 256);
        let trace = boundary_orbit(&seq, theta.value(), 16).unwrap();
        let set = ArcSet::from_arc(a);
        let visits = arc_visits(&trace, &set);
        for n in 0..=16u32 {
            let pre = preimage_arcset(&Map::new(vec![MapAtom::PowerOfTwo(n)]), &set).unwrap();
            prop_assert_eq!(visits.contains(&(n as usize)), pre.contains_float(theta.value()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boundary_orbit_paths_agree(seed in any::<u64>(), q in 0.3..0.9f64) {
        for params in [ParamSequence::one_minus_reciprocal(), ParamSequence::geometric(q).unwrap()] {
            let seq = power_pull_family(params);
            let bits = dwset::experiments::planned_precision(&seq, 100);
            let theta = BoundaryAngle::random(&mut ChaCha8Rng::seed_from_u64(seed), bits);
            // boundary_orbit fails with PathDisagreement if the two paths differ
            let trace = boundary_orbit(&seq, theta.value(), 100).unwrap();
            prop_assert!(trace.err_bounds.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(precision_adequacy(&seq, theta.value(), 100).unwrap() < 2f64.powi(-32));
        }
    }
}

#[test]
fn ledger_intervals_tile() {
    let s = CircleArc::centered(0.0, 0.125).unwrap();
    let seq = rotated_pull_family(ParamSequence::OneMinusReciprocal { offset: 1 }, &s).unwrap();
    let ledger = seq.ledger().unwrap();
    assert_eq!(ledger.theta(0), 0);
    let mut prev_hi = Float::with_val(256, 0);
    for n in 0..500 {
        let (lo, hi) = ledger.interval(n);
        assert_eq!(lo, prev_hi);
        assert!(hi > lo);
        prev_hi = hi;
    }
    assert!((ledger.width(0).to_f64() - 0.875).abs() < 1e-15);
}
