//! `run -c <file>`: one parameterised experiment from a configuration.

use dwset::classify::{classify_hyperbolic, convergence_report, proximity_residual, Thresholds};
use dwset::experiments::{
    dw_fraction_at, escape_ledger_check, orbit_density_experiment_at, planned_precision, shrinking_target_report,
    TargetSizes,
};
use dwset::hypgeo::C64;
use dwset::mapfab::build_sequence;
use dwset::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Experiment, RunConfig};
use crate::report::Artifacts;
use crate::sample::domain_point;
use crate::svg::{bar_chart, Chart, Series};

fn point(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

pub fn run(cfg: &RunConfig) -> Result<Artifacts> {
    let mut a = experiment(cfg)?;
    a.attach("config.toml", cfg.canonical());
    Ok(a)
}

fn experiment(cfg: &RunConfig) -> Result<Artifacts> {
    // thread count and output location never change results, so they stay out of the report
    let mut params = serde_json::to_value(cfg).expect("configurations serialise");
    if let Some(map) = params.as_object_mut() {
        map.remove("workers");
        map.remove("out_dir");
    }
    let z0 = point(cfg.z0.unwrap_or([0.0, 0.0]));
    if cfg.experiment == Experiment::ShrinkingTarget {
        let sizes = TargetSizes::parse(&cfg.targets)?;
        let mut a = Artifacts::new(cfg.experiment.name(), "doubling", params);
        let r = shrinking_target_report(
            sizes,
            cfg.max_index,
            cfg.horizon,
            cfg.samples,
            cfg.min_visits,
            cfg.seed,
            cfg.workers,
        )?;
        a.check("overlap bound with C = 3", r.bound_violations == 0, format!("{} violations", r.bound_violations));
        a.check(
            "forced disjointness",
            r.disjointness_violations == 0,
            format!("{} violations", r.disjointness_violations),
        );
        let labels: Vec<String> = (0..r.visit_tail.len()).map(|k| format!(">= {k}")).collect();
        a.plot(
            "visits.svg",
            bar_chart("share of orbits with at least k target visits", "share", &labels, &r.visit_tail),
        );
        a.result("report", &r);
        return Ok(a);
    }

    let seq = build_sequence(&cfg.sequence)?;
    let mut a = Artifacts::new(cfg.experiment.name(), seq.id(), params);
    let prec = cfg.precision.unwrap_or_else(|| planned_precision(&seq, cfg.horizon));
    match cfg.experiment {
        Experiment::DwFraction => {
            let e = dw_fraction_at(&seq, z0, cfg.samples, cfg.horizon, cfg.tol, cfg.seed, cfg.workers, prec)?;
            let series: Vec<Series> = e
                .gap_curves
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    Series::line(format!("sample {k}"), c.iter().enumerate().map(|(n, g)| (n as f64, *g)).collect())
                })
                .collect();
            a.plot("gaps.svg", Chart::new("gap to the interior orbit", "n", "gap").log_y().render(&series));
            a.result("fraction", e.fraction);
            a.result("estimate", &e);
        }
        Experiment::Density => {
            let d = orbit_density_experiment_at(
                &seq,
                cfg.samples,
                cfg.arcs,
                cfg.horizon,
                cfg.min_visits,
                cfg.seed,
                cfg.workers,
                prec,
            )?;
            let labels: Vec<String> = (0..cfg.arcs).map(|j| j.to_string()).collect();
            let hist: Vec<f64> = d.visit_histogram.iter().map(|&v| v as f64).collect();
            a.plot("density.svg", bar_chart("visits per arc", "visits", &labels, &hist));
            a.result("mean_score", d.mean_score);
            a.result("density", &d);
        }
        Experiment::Classify => {
            let pts: Vec<C64> = match &cfg.points {
                Some(p) => p.iter().copied().map(point).collect(),
                None => vec![z0],
            };
            let r = classify_hyperbolic(&seq, &pts, cfg.horizon, &Thresholds::default())?;
            a.result("verdict", r.verdict);
            a.result("classification", &r);
        }
        Experiment::Convergence => {
            let r = convergence_report(&seq, z0, cfg.horizon)?;
            let dist = r.dist_series.iter().enumerate().map(|(n, d)| (n as f64, *d)).collect();
            a.plot(
                "distance.svg",
                Chart::new("distance to the boundary", "n", "δ_n").log_y().render(&[Series::line("δ_n", dist)]),
            );
            a.result("behaviour", r.behaviour);
            a.result("convergence", &r);
        }
        Experiment::EscapeLedger => {
            let l = escape_ledger_check(&seq, cfg.samples, cfg.horizon, cfg.seed, cfg.workers)?;
            a.check("no escape failures", l.failures == 0, format!("{} failures", l.failures));
            a.check("one escape per wrap", l.under_covered == 0, format!("{} under-covered samples", l.under_covered));
            a.result("ledger", &l);
        }
        Experiment::Proximity => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let dom = seq.domain(0);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..cfg.samples {
                let (z, w) = (domain_point(&dom, &mut rng), domain_point(&dom, &mut rng));
                worst = worst.max(proximity_residual(&seq, z, w, cfg.horizon)?);
            }
            a.check("proximity bound", worst <= 1e-9, format!("max residual {worst:.3e} <= 1e-9"));
            a.result("max_residual", worst);
        }
        Experiment::ShrinkingTarget => unreachable!("handled above"),
    }
    Ok(a)
}
