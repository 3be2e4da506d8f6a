//! Chebyshev polynomials of the second and third kind and the wavelet basis
//! functions built from them on [0,1).
//!
//! Both families share the three-term recurrence `W_{n+1} = 2t·W_n − W_{n−1}`;
//! they differ only in the degree-one seed (`2t` vs `2t−1`) and in the
//! normalization constant carried by the basis function.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Which polynomial family a transform is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveletKind {
    SecondChebyshev,
    ThirdChebyshev,
}

impl WaveletKind {
    /// Normalization applied to the raw polynomial inside the basis function:
    /// `sqrt(2/pi)` for the second kind, `1/sqrt(pi)` for the third.
    pub fn polynomial_norm(self) -> f64 {
        match self {
            WaveletKind::SecondChebyshev => (2.0 / PI).sqrt(),
            WaveletKind::ThirdChebyshev => 1.0 / PI.sqrt(),
        }
    }
}

impl std::fmt::Display for WaveletKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WaveletKind::SecondChebyshev => write!(f, "second"),
            WaveletKind::ThirdChebyshev => write!(f, "third"),
        }
    }
}

/// Evaluates the degree-`s` Chebyshev polynomial of the given kind at `t`
/// by the three-term recurrence. Stable for |t| <= 1.
pub fn cheb_poly(kind: WaveletKind, s: u32, t: f64) -> f64 {
    if s == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = match kind {
        WaveletKind::SecondChebyshev => 2.0 * t,
        WaveletKind::ThirdChebyshev => 2.0 * t - 1.0,
    };
    for _ in 1..s {
        (prev, cur) = (cur, 2.0 * t * cur - prev);
    }
    cur
}

/// Indices of one wavelet basis function: dilation level `k`, translation
/// index `r` and polynomial degree `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChebyshevWaveletParams {
    pub kind: WaveletKind,
    pub k: u32,
    pub r: u32,
    pub s: u32,
}

impl ChebyshevWaveletParams {
    /// Validates the translation range: `1 <= r <= 2^(k-1)` for the second
    /// kind, `1 <= r <= 2^k` for the third, so the support stays in [0,1).
    pub fn new(kind: WaveletKind, k: u32, r: u32, s: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidWaveletParams(
                "dilation level k must be positive".into(),
            ));
        }
        if k > 30 {
            return Err(Error::InvalidWaveletParams(format!(
                "dilation level k={k} is too deep"
            )));
        }
        let r_max = match kind {
            WaveletKind::SecondChebyshev => 1u32 << (k - 1),
            WaveletKind::ThirdChebyshev => 1u32 << k,
        };
        if r == 0 || r > r_max {
            return Err(Error::InvalidWaveletParams(format!(
                "translation r={r} outside 1..={r_max} for k={k}"
            )));
        }
        Ok(Self { kind, k, r, s })
    }

    /// Half-open support interval [lo, hi) of this basis function.
    pub fn support(&self) -> (f64, f64) {
        let denom = match self.kind {
            WaveletKind::SecondChebyshev => (1u64 << (self.k - 1)) as f64,
            WaveletKind::ThirdChebyshev => (1u64 << self.k) as f64,
        };
        ((self.r - 1) as f64 / denom, self.r as f64 / denom)
    }
}

/// Evaluates the wavelet basis function at `t` in [0,1).
///
/// Inside the support this is `2^(k/2) · norm · W_s(arg)` where the argument
/// maps the support onto [-1,1): `2^k·t − 2r + 1` for the second kind and
/// `2^(k+1)·t − 2r + 1` for the third. Outside the support the value is
/// exactly zero.
pub fn eval_wavelet(p: &ChebyshevWaveletParams, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::ArgOutOfRange(t));
    }
    let (lo, hi) = p.support();
    if t < lo || t >= hi {
        return Ok(0.0);
    }
    let arg = match p.kind {
        WaveletKind::SecondChebyshev => (1u64 << p.k) as f64 * t - 2.0 * p.r as f64 + 1.0,
        WaveletKind::ThirdChebyshev => (1u64 << (p.k + 1)) as f64 * t - 2.0 * p.r as f64 + 1.0,
    };
    let dilation_gain = ((1u64 << p.k) as f64).sqrt();
    Ok(dilation_gain * p.kind.polynomial_norm() * cheb_poly(p.kind, p.s, arg))
}
