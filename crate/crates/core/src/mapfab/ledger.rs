use parking_lot::RwLock;
use rug::float::Constant;
use rug::Float;

use super::params::ParamSequence;

/// Working precision of the interval ledger.
pub const LEDGER_PREC: u32 = 256;

/// Cumulative angles `θ_0 = 0 < θ_1 < ...` (in turns) of the rotated-pull
/// construction. Interval `I_n = [θ_n, θ_{n+1}]` has the length of the
/// preimage of `S^c` under the pull with parameter `a_n`, where `S` is the
/// arc of half-width `half_width` turns centred at angle 0.
///
/// Values are computed on demand and memoised; concurrent readers either
/// see a computed prefix or extend it under the write lock.
#[derive(Debug)]
pub struct ThetaLedger {
    half_width: f64,
    params: ParamSequence,
    thetas: RwLock<Vec<Float>>,
}

impl ThetaLedger {
    pub fn new(half_width: f64, params: ParamSequence) -> Self {
        Self { half_width, params, thetas: RwLock::new(vec![Float::with_val(LEDGER_PREC, 0)]) }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn params(&self) -> &ParamSequence {
        &self.params
    }

    /// `|M_a^{-1}(S^c)|` in turns for `a = a_n`:
    /// `(2/π) atan(ε / ((2 - ε) tan(π w)))`, the exact length between the
    /// preimages of the endpoints of `S`.
    pub fn width(&self, n: usize) -> Float {
        let p = LEDGER_PREC;
        let eps = self.params.eps(n).to_float(p);
        let pi = Float::with_val(p, Constant::Pi);
        let t = (Float::with_val(p, &pi * self.half_width)).tan();
        let two_minus = Float::with_val(p, 2 - &eps);
        let ratio = eps / (two_minus * t);
        ratio.atan() * 2u32 / pi
    }

    fn ensure(&self, n: usize) {
        if self.thetas.read().len() > n {
            return;
        }
        let mut guard = self.thetas.write();
        while guard.len() <= n {
            let k = guard.len() - 1;
            let next = Float::with_val(LEDGER_PREC, &guard[k] + self.width(k));
            guard.push(next);
        }
    }

    /// `θ_n` in turns (not reduced mod 1).
    pub fn theta(&self, n: usize) -> Float {
        self.ensure(n);
        self.thetas.read()[n].clone()
    }

    /// `I_n = [θ_n, θ_{n+1}]`.
    pub fn interval(&self, n: usize) -> (Float, Float) {
        self.ensure(n + 1);
        let g = self.thetas.read();
        (g[n].clone(), g[n + 1].clone())
    }

    /// Rotation angle of `λ_n = -exp(-i(θ_n + θ_{n+1})/2)` in turns, reduced to `[0, 1)`.
    pub fn rotation_turns(&self, n: usize) -> Float {
        let (lo, hi) = self.interval(n);
        let mut r = Float::with_val(LEDGER_PREC, 0.5) - (lo + hi) / 2u32;
        let fl = Float::with_val(LEDGER_PREC, r.floor_ref());
        r -= fl;
        r
    }

    /// Number of whole turns covered by `I_0 ∪ ... ∪ I_n`.
    pub fn wraps(&self, n: usize) -> u64 {
        let t = self.theta(n + 1);
        t.to_f64().floor() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals_tile_without_gaps() {
        let l = ThetaLedger::new(1.0 / 16.0, ParamSequence::OneMinusReciprocal { offset: 1 });
        for n in 0..50 {
            let (_, hi) = l.interval(n);
            let (lo, _) = l.interval(n + 1);
            assert_eq!(hi, lo);
            assert!(l.width(n) > 0);
        }
    }

    #[test]
    fn first_width_covers_complement() {
        // a_0 = 0: the preimage of S^c is S^c itself.
        let l = ThetaLedger::new(1.0 / 16.0, ParamSequence::OneMinusReciprocal { offset: 1 });
        assert!((l.width(0).to_f64() - 7.0 / 8.0).abs() < 1e-15);
    }
}
