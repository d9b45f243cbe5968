//! Small numerical utilities shared across the crate: reproducible pairwise
//! summation, log-space gamma-family helpers, and a scaled accumulator for
//! summing series whose terms overflow `f64` in linear space.

use statrs::function::gamma::ln_gamma;

/// Pairwise (cascade) summation.
///
/// Used for every reduction whose value feeds a determinism or tolerance
/// contract: the result is independent of chunking decisions made by callers
/// (parallel maps collect into a `Vec` first, then reduce through here) and
/// its rounding error grows like O(log n) rather than O(n).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Natural log of the Beta function, `ln B(p, q)`.
pub fn ln_beta(p: f64, q: f64) -> f64 {
    ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)
}

/// The Beta function `B(p, q)` for positive arguments.
pub fn beta(p: f64, q: f64) -> f64 {
    ln_beta(p, q).exp()
}

/// Rising factorial (Pochhammer symbol) `(a)_k = a (a+1) ⋯ (a+k−1)`.
///
/// Small orders are multiplied directly; large orders with positive `a` go
/// through log-gamma to avoid overflow. `(a)_0 = 1` by convention.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k <= 20 || a <= 0.0 {
        let mut prod = 1.0;
        for j in 0..k {
            prod *= a + j as f64;
        }
        prod
    } else {
        (ln_gamma(a + k as f64) - ln_gamma(a)).exp()
    }
}

/// Accumulator for `Σ sᵢ·exp(lᵢ)` terms that may individually overflow or
/// underflow `f64`: the running value is kept as `acc · exp(scale)` and the
/// scale is shifted whenever an incoming term dwarfs it.
#[derive(Debug, Clone, Copy)]
pub struct ScaledSum {
    scale: f64,
    acc: f64,
}

impl ScaledSum {
    /// An empty sum (value zero).
    pub fn new() -> Self {
        ScaledSum {
            scale: f64::NEG_INFINITY,
            acc: 0.0,
        }
    }

    /// Add a term given as `sign · exp(ln_abs)`.
    pub fn add_ln(&mut self, ln_abs: f64, sign: f64) {
        if ln_abs == f64::NEG_INFINITY || sign == 0.0 {
            return;
        }
        if self.acc == 0.0 {
            self.scale = ln_abs;
            self.acc = sign;
            return;
        }
        if ln_abs > self.scale + 250.0 {
            // Incoming term dominates: rebase the scale onto it.
            self.acc *= (self.scale - ln_abs).exp();
            self.scale = ln_abs;
            self.acc += sign;
        } else {
            self.acc += sign * (ln_abs - self.scale).exp();
            if self.acc.abs() > 1e280 {
                self.scale += 200.0;
                self.acc *= (-200.0f64).exp();
            }
        }
    }

    /// Natural log of the absolute value of the current sum
    /// (−∞ for an empty or exactly cancelled sum).
    pub fn ln_abs(&self) -> f64 {
        if self.acc == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.scale + self.acc.abs().ln()
        }
    }

    /// Sign of the current sum (0.0 when the sum is zero).
    pub fn sign(&self) -> f64 {
        if self.acc == 0.0 {
            0.0
        } else {
            self.acc.signum()
        }
    }

    /// The sum as a plain `f64`; infinite if it overflows.
    pub fn value(&self) -> f64 {
        if self.acc == 0.0 {
            0.0
        } else {
            self.sign() * (self.ln_abs()).exp()
        }
    }
}

impl Default for ScaledSum {
    fn default() -> Self {
        Self::new()
    }
}
