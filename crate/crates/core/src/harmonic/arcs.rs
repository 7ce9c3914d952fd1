//! Circular arcs and finite unions of arcs in fixed point.
//!
//! Angles are integers in units of `2^-127` turn, so one turn is `TURN = 2^127`
//! and all set operations are exact. An arc crossing angle 0 is stored as
//! two segments `[s, TURN)` and `[0, e)`.

use rug::float::Round;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TURN_BITS: u32 = 127;
pub const TURN: u128 = 1 << TURN_BITS;

pub fn turns_to_fixed(x: f64) -> u128 {
    let r = x.rem_euclid(1.0);
    ((r * (TURN as f64)) as u128).min(TURN - 1)
}

pub fn fixed_to_turns(x: u128) -> f64 {
    x as f64 / TURN as f64
}

/// Floor of `θ · 2^127` after reducing `θ` mod 1.
pub fn float_to_fixed(theta: &Float) -> u128 {
    let t = crate::mp::frac(theta.clone()) << TURN_BITS;
    let (i, _) = t.to_integer_round(Round::Down).expect("finite angle");
    i.to_u128().unwrap_or(TURN - 1).min(TURN - 1)
}

pub fn fixed_to_float(x: u128, prec: u32) -> Float {
    Float::with_val(prec.max(TURN_BITS + 1), x) >> TURN_BITS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleArc {
    start: u128,
    length: u128,
}

impl CircleArc {
    pub fn from_fixed(start: u128, length: u128) -> Result<Self> {
        if length == 0 || length > TURN {
            return Err(Error::InvalidParam(format!("arc length {length} outside (0, TURN]")));
        }
        if length == TURN {
            return Ok(Self::full());
        }
        Ok(Self { start: start % TURN, length })
    }

    pub fn new(start_turns: f64, length_turns: f64) -> Result<Self> {
        if !(length_turns > 0.0 && length_turns <= 1.0) {
            return Err(Error::InvalidParam(format!("arc length {length_turns} outside (0, 1]")));
        }
        let length = if length_turns == 1.0 { TURN } else { ((length_turns * TURN as f64) as u128).max(1) };
        Self::from_fixed(turns_to_fixed(start_turns), length)
    }

    /// The arc of the given length centred at `center_turns`.
    pub fn centered(center_turns: f64, length_turns: f64) -> Result<Self> {
        Self::new(center_turns - length_turns / 2.0, length_turns)
    }

    pub fn full() -> Self {
        Self { start: 0, length: TURN }
    }

    pub fn start(&self) -> u128 {
        self.start
    }

    pub fn length(&self) -> u128 {
        self.length
    }

    pub fn start_turns(&self) -> f64 {
        fixed_to_turns(self.start)
    }

    pub fn length_turns(&self) -> f64 {
        fixed_to_turns(self.length)
    }

    pub fn is_full(&self) -> bool {
        self.length == TURN
    }

    pub fn contains_fixed(&self, x: u128) -> bool {
        (x % TURN + TURN - self.start) % TURN < self.length
    }
}

/// A normalised finite union of half-open arcs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ArcSet {
    segs: Vec<(u128, u128)>,
}

impl ArcSet {
    pub fn empty() -> Self {
        Self { segs: Vec::new() }
    }

    pub fn full() -> Self {
        Self { segs: vec![(0, TURN)] }
    }

    pub fn from_arc(arc: CircleArc) -> Self {
        Self::from_arcs([arc])
    }

    pub fn from_arcs(arcs: impl IntoIterator<Item = CircleArc>) -> Self {
        let mut segs = Vec::new();
        for a in arcs {
            push_wrapped(&mut segs, a.start, a.length);
        }
        Self::from_segments(segs)
    }

    /// Builds from raw `[start, end)` segments within `[0, TURN]`.
    pub fn from_segments(mut segs: Vec<(u128, u128)>) -> Self {
        segs.retain(|&(s, e)| s < e);
        segs.sort_unstable();
        let mut out: Vec<(u128, u128)> = Vec::with_capacity(segs.len());
        for (s, e) in segs {
            match out.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => out.push((s, e)),
            }
        }
        Self { segs: out }
    }

    pub fn segments(&self) -> &[(u128, u128)] {
        &self.segs
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.segs == [(0, TURN)]
    }

    /// Total measure in units of `2^-127` turn.
    pub fn measure_fixed(&self) -> u128 {
        self.segs.iter().map(|(s, e)| e - s).sum()
    }

    pub fn measure(&self) -> f64 {
        fixed_to_turns(self.measure_fixed())
    }

    /// Arcs with the segment crossing angle 0 joined back together.
    pub fn arcs(&self) -> Vec<CircleArc> {
        if self.is_full() {
            return vec![CircleArc::full()];
        }
        let mut segs = self.segs.clone();
        if segs.len() >= 2 && segs[0].0 == 0 && segs[segs.len() - 1].1 == TURN {
            let (s, _) = segs.pop().unwrap();
            segs[0].0 = s;
            segs[0].1 += TURN;
        }
        segs.into_iter().map(|(s, e)| CircleArc { start: s, length: e - s }).collect()
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut segs = self.segs.clone();
        segs.extend_from_slice(&other.segs);
        Self::from_segments(segs)
    }

    pub fn intersection(&self, other: &ArcSet) -> ArcSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.segs.len() && j < other.segs.len() {
            let (a0, a1) = self.segs[i];
            let (b0, b1) = other.segs[j];
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if lo < hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_segments(out)
    }

    pub fn complement(&self) -> ArcSet {
        let mut out = Vec::with_capacity(self.segs.len() + 1);
        let mut cursor = 0u128;
        for &(s, e) in &self.segs {
            if s > cursor {
                out.push((cursor, s));
            }
            cursor = e;
        }
        if cursor < TURN {
            out.push((cursor, TURN));
        }
        Self { segs: out }
    }

    pub fn contains_fixed(&self, x: u128) -> bool {
        let x = x % TURN;
        let idx = self.segs.partition_point(|&(s, _)| s <= x);
        idx > 0 && x < self.segs[idx - 1].1
    }

    pub fn contains_turns(&self, x: f64) -> bool {
        self.contains_fixed(turns_to_fixed(x))
    }

    pub fn contains_float(&self, x: &Float) -> bool {
        self.contains_fixed(float_to_fixed(x))
    }

    /// The set rotated by `shift` (fixed units, counter-clockwise).
    pub fn rotate(&self, shift: u128) -> ArcSet {
        let shift = shift % TURN;
        let mut segs = Vec::with_capacity(self.segs.len() + 1);
        for &(s, e) in &self.segs {
            push_wrapped(&mut segs, (s + shift) % TURN, e - s);
        }
        Self::from_segments(segs)
    }
}

fn push_wrapped(segs: &mut Vec<(u128, u128)>, start: u128, length: u128) {
    if length >= TURN {
        segs.push((0, TURN));
        return;
    }
    let end = start + length;
    if end <= TURN {
        segs.push((start, end));
    } else {
        segs.push((start, TURN));
        segs.push((0, end - TURN));
    }
}

/// Checks `|X ∩ Y| · TURN <= c · |X| · |Y|` exactly.
pub fn overlap_bound_holds(inter: &ArcSet, a: &ArcSet, b: &ArcSet, c: u32) -> bool {
    let lhs = Integer::from(inter.measure_fixed()) * Integer::from(TURN);
    let rhs = Integer::from(a.measure_fixed()) * Integer::from(b.measure_fixed()) * c;
    lhs <= rhs
}
