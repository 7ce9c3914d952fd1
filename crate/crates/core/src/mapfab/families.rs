use std::sync::Arc;

use rug::Float;

use crate::error::{Error, Result};
use crate::harmonic::CircleArc;
use crate::hypgeo::{DomainSpec, MoebiusTransform, C64};

use super::atoms::{Map, MapAtom};
use super::ledger::{ThetaLedger, LEDGER_PREC};
use super::params::{hp_multiplier, ExactReal, ParamSequence};
use super::{Family, MapGen, MapSequence};

fn constant_domain(d: DomainSpec) -> super::DomainGen {
    Arc::new(move |_| d.clone())
}

/// `B_n(z) = M_n(z^(2^n))` with `M_n` the pull by `a_n`.
pub fn power_pull_family(a: ParamSequence) -> MapSequence {
    let (sa, ca) = (a.clone(), a.clone());
    let step: MapGen = Arc::new(move |n| {
        Map::new(vec![MapAtom::PullInverse(sa.eps(n - 1)), MapAtom::Power(2), MapAtom::Pull(sa.eps(n))])
    });
    let closed: MapGen = Arc::new(move |n| Map::new(vec![MapAtom::PowerOfTwo(n as u32), MapAtom::Pull(ca.eps(n))]));
    MapSequence::from_parts(
        format!("ex8.3:a={a}"),
        Family::PowerPull,
        step,
        Some(closed),
        constant_domain(DomainSpec::UnitDisc),
        Some(a),
        None,
    )
}

/// Pure pulls `M_n`, with steps `m_n = M_n ∘ M_{n-1}^{-1}`.
pub fn pull_family(a: ParamSequence) -> MapSequence {
    let (sa, ca) = (a.clone(), a.clone());
    let step: MapGen = Arc::new(move |n| Map::new(vec![MapAtom::PullInverse(sa.eps(n - 1)), MapAtom::Pull(sa.eps(n))]));
    let closed: MapGen = Arc::new(move |n| Map::new(vec![MapAtom::Pull(ca.eps(n))]));
    MapSequence::from_parts(
        format!("ex8.1:a={a}"),
        Family::Pulls,
        step,
        Some(closed),
        constant_domain(DomainSpec::UnitDisc),
        Some(a),
        None,
    )
}

/// Cardioid self-maps `φ ∘ B_n ∘ φ^{-1}` with `a_n = 1 - 1/n`.
pub fn cardioid_family() -> MapSequence {
    let a = ParamSequence::one_minus_reciprocal();
    let (sa, ca) = (a.clone(), a.clone());
    let step: MapGen = Arc::new(move |n| {
        Map::new(vec![
            MapAtom::CardioidInverse,
            MapAtom::PullInverse(sa.eps(n - 1)),
            MapAtom::Power(2),
            MapAtom::Pull(sa.eps(n)),
            MapAtom::CardioidForward,
        ])
    });
    let closed: MapGen = Arc::new(move |n| {
        Map::new(vec![
            MapAtom::CardioidInverse,
            MapAtom::PowerOfTwo(n as u32),
            MapAtom::Pull(ca.eps(n)),
            MapAtom::CardioidForward,
        ])
    });
    MapSequence::from_parts(
        "ex4.3".into(),
        Family::CardioidPowerPull,
        step,
        Some(closed),
        constant_domain(DomainSpec::Cardioid),
        Some(a),
        None,
    )
}

/// Half-plane maps `b_n(z) = (λ_n z + 1/(λ_n z)) / 2`. No closed form; `B_n(1) = n + 1`.
pub fn joukowski_family() -> MapSequence {
    let step: MapGen = Arc::new(|n| {
        Map::new(vec![
            MapAtom::Affine { mul: C64::new(hp_multiplier(n), 0.0), add: C64::new(0.0, 0.0) },
            MapAtom::Joukowski,
        ])
    });
    MapSequence::from_parts(
        "ex8.2".into(),
        Family::Joukowski,
        step,
        None,
        constant_domain(DomainSpec::RightHalfPlane),
        None,
        None,
    )
}

/// Disc conjugate `α^{-1} ∘ b_n ∘ α` of the Joukowski step, `α(z) = (1 + z)/(1 - z)`.
pub fn joukowski_disc_step(n: usize) -> Map {
    let cayley = MoebiusTransform::cayley();
    Map::new(vec![
        MapAtom::Moebius(cayley),
        MapAtom::Affine { mul: C64::new(hp_multiplier(n), 0.0), add: C64::new(0.0, 0.0) },
        MapAtom::Joukowski,
        MapAtom::Moebius(cayley.inverse()),
    ])
}

/// Flat index `j(j+1)/2 + k` of the pair `(j, k)`, `0 <= k < j`.
pub fn sweep_flat_index(j: usize, k: usize) -> usize {
    j * (j + 1) / 2 + k
}

/// Inverse of the flat index. The indices `j(j+1)/2 + j` are not hit by any
/// pair; they repeat the previous pair `(j, j-1)` (see [`SWEEP_GAP_FILL`]).
/// Index 0 decodes to `(0, 0)`, the identity.
pub fn sweep_indices(n: usize) -> (usize, usize) {
    let mut j = 0;
    while (j + 1) * (j + 2) / 2 <= n {
        j += 1;
    }
    let k = n - j * (j + 1) / 2;
    (j, k.min(j.saturating_sub(1)))
}

/// How the unused flat indices of the sweep are filled.
pub const SWEEP_GAP_FILL: &str = "repeat-previous";

/// `M̂_{j,k}(z) = j (z - ζ_{j,k}) + ζ_{j,k}`, `ζ_{j,k} = (-1 + (2k+1)/j) i`, as `(mul, add)`.
fn sweep_affine(n: usize) -> (C64, C64) {
    let (j, k) = sweep_indices(n);
    if j == 0 {
        return (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    }
    let jf = j as f64;
    let zeta = C64::new(0.0, -1.0 + (2 * k + 1) as f64 / jf);
    (C64::new(jf, 0.0), (1.0 - jf) * zeta)
}

/// The half-plane map `M̂_n` as a single atom.
pub fn sweep_map(n: usize) -> Map {
    let (mul, add) = sweep_affine(n);
    Map::new(vec![MapAtom::Affine { mul, add }])
}

fn sweep_affine_step(n: usize) -> (C64, C64) {
    // M̂_n ∘ M̂_{n-1}^{-1}: z -> m' (z - b) / m + b'
    let (m0, b0) = sweep_affine(n - 1);
    let (m1, b1) = sweep_affine(n);
    (m1 / m0, b1 - m1 * b0 / m0)
}

/// Scaling sweep on the right half-plane: `F_n = M̂_n`.
pub fn sweep_family() -> MapSequence {
    let step: MapGen = Arc::new(|n| {
        let (mul, add) = sweep_affine_step(n);
        Map::new(vec![MapAtom::Affine { mul, add }])
    });
    let closed: MapGen = Arc::new(sweep_map);
    MapSequence::from_parts(
        "ex7.3:model=halfplane".into(),
        Family::ScalingSweep,
        step,
        Some(closed),
        constant_domain(DomainSpec::RightHalfPlane),
        None,
        None,
    )
}

fn disc_conjugate(mul: C64, add: C64) -> MoebiusTransform {
    let beta = MoebiusTransform::cayley();
    let hat = MoebiusTransform::affine(mul, add).expect("nonzero multiplier");
    beta.inverse().compose(&hat).compose(&beta)
}

/// Scaling sweep on the disc: `M_n = β^{-1} ∘ M̂_n ∘ β` with `β` the Cayley map.
pub fn sweep_family_disc() -> MapSequence {
    let step: MapGen = Arc::new(|n| {
        let (mul, add) = sweep_affine_step(n);
        Map::new(vec![MapAtom::Moebius(disc_conjugate(mul, add))])
    });
    let closed: MapGen = Arc::new(|n| {
        let (mul, add) = sweep_affine(n);
        Map::new(vec![MapAtom::Moebius(disc_conjugate(mul, add))])
    });
    MapSequence::from_parts(
        "ex7.3:model=disc".into(),
        Family::ScalingSweep,
        step,
        Some(closed),
        constant_domain(DomainSpec::UnitDisc),
        None,
        None,
    )
}

/// Rotated pulls with an empty Denjoy-Wolff set: `F_n(z) = (λ_n z + a_n)/(1 + λ_n a_n z)` with
/// rotations chosen so that `F_n` sends the ledger interval `I_n` outside `S`.
/// `S` must be the arc centred at angle 0 with half-width in `(0, 1/8)` turns.
pub fn rotated_pull_family(a: ParamSequence, s: &CircleArc) -> Result<MapSequence> {
    let len = s.length_turns();
    let half = len / 2.0;
    let centred = (s.start_turns() + half - 1.0).abs() < 1e-15 || (s.start_turns() + half).abs() < 1e-15;
    if !centred || !(half > 0.0 && half < 0.125) {
        return Err(Error::ArcConstraint(format!(
            "S must be centred at angle 0 with half-width in (0, 1/8) turn, got start {} length {}",
            s.start_turns(),
            len
        )));
    }
    let ledger = Arc::new(ThetaLedger::new(half, a.clone()));
    let rot = |l: &ThetaLedger, n: usize| ExactReal::Big(Arc::new(l.rotation_turns(n)));
    let (sl, cl) = (ledger.clone(), ledger.clone());
    let (sa, ca) = (a.clone(), a.clone());
    let step: MapGen = Arc::new(move |n| {
        let diff: Float = Float::with_val(LEDGER_PREC, sl.rotation_turns(n) - sl.rotation_turns(n - 1));
        Map::new(vec![
            MapAtom::PullInverse(sa.eps(n - 1)),
            MapAtom::Rotate(ExactReal::Big(Arc::new(diff))),
            MapAtom::Pull(sa.eps(n)),
        ])
    });
    let closed: MapGen = Arc::new(move |n| Map::new(vec![MapAtom::Rotate(rot(&cl, n)), MapAtom::Pull(ca.eps(n))]));
    let id = format!("thmD:theta={},a={a}", theta_label(half));
    Ok(MapSequence::from_parts(
        id,
        Family::RotatedPulls,
        step,
        Some(closed),
        constant_domain(DomainSpec::UnitDisc),
        Some(a),
        Some(ledger),
    ))
}

/// Writes a half-width in turns as a multiple of π radians when it is `1/(2k)`.
fn theta_label(half_turns: f64) -> String {
    let k = 0.5 / half_turns;
    if (k - k.round()).abs() < 1e-12 {
        format!("pi/{}", k.round() as u64)
    } else {
        format!("{}", half_turns * std::f64::consts::TAU)
    }
}

/// The squaring map `z -> z^2` as a sequence, `F_n(z) = z^(2^n)`.
pub fn doubling_family() -> MapSequence {
    let closed: MapGen = Arc::new(|n| Map::new(vec![MapAtom::PowerOfTwo(n as u32)]));
    MapSequence::from_parts(
        "doubling".into(),
        Family::Custom,
        Arc::new(|_| Map::new(vec![MapAtom::Power(2)])),
        Some(closed),
        constant_domain(DomainSpec::UnitDisc),
        None,
        None,
    )
}
