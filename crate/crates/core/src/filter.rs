//! The 2-tap analysis/synthesis filter banks.
//!
//! The analysis matrix is `[[c, c], [c, -c]]` (sum row feeds the
//! approximation, difference row the detail). The gain is
//! `c = 2*sqrt(2)/sqrt(pi)` for the second kind and `c = sqrt(2)/sqrt(pi)`
//! for the third: exactly the values the basis functions take at
//! (k=2, r=1, s=0) and (k=1, r=1, s=0). The synthesis bank is the exact
//! matrix inverse, which makes reconstruction exact despite the non-unit
//! gain `2c^2`.

use std::f64::consts::PI;

use crate::chebyshev::WaveletKind;

/// Analysis/synthesis pair for one wavelet kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterBank {
    pub kind: WaveletKind,
    /// Gain constant shared by all four analysis taps.
    pub c: f64,
    /// Sum row: approx = c*x0 + c*x1.
    pub analysis_low: [f64; 2],
    /// Difference row: detail = c*x0 - c*x1.
    pub analysis_high: [f64; 2],
    /// Even-sample row of the inverse: x0 = s*a + s*d with s = 1/(2c).
    pub synthesis_low: [f64; 2],
    /// Odd-sample row of the inverse: x1 = s*a - s*d.
    pub synthesis_high: [f64; 2],
}

/// Builds the filter bank for a wavelet kind.
pub fn make_filter_bank(kind: WaveletKind) -> FilterBank {
    let c = match kind {
        WaveletKind::SecondChebyshev => 2.0 * 2.0_f64.sqrt() / PI.sqrt(),
        WaveletKind::ThirdChebyshev => 2.0_f64.sqrt() / PI.sqrt(),
    };
    let s = 1.0 / (2.0 * c);
    FilterBank {
        kind,
        c,
        analysis_low: [c, c],
        analysis_high: [c, -c],
        synthesis_low: [s, s],
        synthesis_high: [s, -s],
    }
}

impl FilterBank {
    /// Forward transform of one sample pair.
    #[inline]
    pub fn analyze(&self, x0: f64, x1: f64) -> (f64, f64) {
        (self.c * (x0 + x1), self.c * (x0 - x1))
    }

    /// Inverse transform of one (approx, detail) pair.
    #[inline]
    pub fn synthesize(&self, approx: f64, detail: f64) -> (f64, f64) {
        let s = self.synthesis_low[0];
        (s * (approx + detail), s * (approx - detail))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KINDS: [WaveletKind; 2] = [WaveletKind::SecondChebyshev, WaveletKind::ThirdChebyshev];

    #[test]
    fn gain_constants() {
        let second = make_filter_bank(WaveletKind::SecondChebyshev);
        let third = make_filter_bank(WaveletKind::ThirdChebyshev);
        assert!((second.c - 1.595769121605731).abs() < 1e-12);
        assert!((third.c - 0.7978845608028654).abs() < 1e-12);
        assert_eq!(second.analysis_high, [second.c, -second.c]);
        assert_eq!(second.analysis_low, [second.c, second.c]);
    }

    #[test]
    fn synthesis_inverts_analysis() {
        for kind in KINDS {
            let bank = make_filter_bank(kind);
            for (x0, x1) in [(1.0, 0.0), (0.0, 1.0), (3.5, -2.25), (1e6, 1e-6)] {
                let (a, d) = bank.analyze(x0, x1);
                let (y0, y1) = bank.synthesize(a, d);
                // Cancellation error scales with the pair magnitude.
                let scale = x0.abs().max(x1.abs()).max(1.0);
                assert!((y0 - x0).abs() < 1e-12 * scale);
                assert!((y1 - x1).abs() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn synthesis_matrix_times_analysis_is_identity() {
        for kind in KINDS {
            let bank = make_filter_bank(kind);
            let a = [bank.analysis_low, bank.analysis_high];
            let s = [bank.synthesis_low, bank.synthesis_high];
            for i in 0..2 {
                for j in 0..2 {
                    // product[i][j] = sum_k s[i][k] * a[k][j]
                    let got: f64 = (0..2).map(|k| s[i][k] * a[k][j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((got - want).abs() < 1e-12, "{kind:?} [{i}][{j}] = {got}");
                }
            }
        }
    }

    #[test]
    fn analysis_is_scaled_orthogonal() {
        // M^T * M = 2 c^2 * I
        for kind in KINDS {
            let bank = make_filter_bank(kind);
            let m = [bank.analysis_low, bank.analysis_high];
            let scale = 2.0 * bank.c * bank.c;
            for i in 0..2 {
                for j in 0..2 {
                    let got: f64 = (0..2).map(|k| m[k][i] * m[k][j]).sum();
                    let want = if i == j { scale } else { 0.0 };
                    assert!((got - want).abs() < 1e-12);
                }
            }
        }
    }
}
