//! Compound confluent hypergeometric (CCH) distribution.
//!
//! The CCH law with parameters `(p, q, r, s, ν, θ)` lives on `(0, 1/ν)` and
//! has density proportional to
//!
//! ```text
//! x^{p−1} (1−νx)^{q−1} {θ + (1−θ)νx}^{−r} e^{−sx},
//! ```
//!
//! with normalizing constant `B(p,q)·H(p,q,r,s,ν,θ)`. Its role here: under a
//! horseshoe prior the shrinkage weight of one orthogonalized regression
//! component, `Z = 1/(1 + τ²λ²d²)`, follows `CCH(1, 1/2, 1, s, 1, θ)` with
//! `s = α̂²d²/2σ²` and `θ = 1/(τ²d²)`, so posterior means and unbiased risk
//! estimates reduce to the first two moments of this distribution.
//!
//! Evaluation contract: the authoritative value of `B(p,q)·H` is the integral
//! above, computed by adaptive Gauss–Kronrod quadrature after the
//! substitution `νx = sin²w`. That map simultaneously removes the endpoint
//! singularities of `x^{p−1}` and `(1−νx)^{q−1}` for `p, q ≥ 1/2`, and —
//! because the exponential becomes `exp(−(s/ν)sin²w)` with peak value exactly
//! 1 at `w = 0` — keeps the integrand scaled sensibly however large `s` gets.
//! Scale-aware initial break points resolve the boundary layers that appear
//! for extreme `s` or `θ` before adaptive refinement begins.
//!
//! The classical double-series route
//! `H = ν^{−p} e^{−s/ν} Φ₁(q, r, p+q, s/ν, 1−θ)` is implemented as an
//! independent cross-check, valid on the series' convergence region
//! `|1−θ| < 1`. Here `Φ₁` is the two-variable confluent hypergeometric
//! function
//!
//! ```text
//! Φ₁(a, b, g, x₁, x₂) = Σ_{m,n ≥ 0} (a)_{m+n} (b)_n / ((g)_{m+n} m! n!) · x₁^m x₂^n,
//! ```
//!
//! the form under which the series and the defining integral agree term by
//! term (expand `e^{−sx}` and the bracket around the upper endpoint and
//! integrate against the Beta kernel).

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::numeric::{beta, pochhammer, ScaledSum};
use crate::quad::{self, MAX_PANELS};

/// Relative tolerance requested from the quadrature path.
const QUAD_REL_TOL: f64 = 1e-10;

/// Parameters of a CCH distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CchParams {
    /// Power of `x` plus one; `p > 0`.
    pub p: f64,
    /// Power of `(1 − νx)` plus one; `q > 0`.
    pub q: f64,
    /// Exponent of the bracket term; any real.
    pub r: f64,
    /// Exponential tilt; any real (for `ν = 0` the law only exists for `s > 0`).
    pub s: f64,
    /// Support scale; `ν ∈ [0, 1]`, support is `(0, 1/ν)` (all of `(0, ∞)` at `ν = 0`).
    pub nu: f64,
    /// Bracket mixing parameter; `θ > 0`.
    pub theta: f64,
}

impl CchParams {
    /// Validate and construct a parameter set.
    pub fn new(p: f64, q: f64, r: f64, s: f64, nu: f64, theta: f64) -> Result<Self> {
        let params = CchParams { p, q, r, s, nu, theta };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<()> {
        let all_finite = [self.p, self.q, self.r, self.s, self.nu, self.theta]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidInput(
                "CCH parameters must all be finite".into(),
            ));
        }
        if !(self.p > 0.0) {
            return Err(Error::InvalidInput(format!("p must be > 0, got {}", self.p)));
        }
        if !(self.q > 0.0) {
            return Err(Error::InvalidInput(format!("q must be > 0, got {}", self.q)));
        }
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(Error::InvalidInput(format!(
                "nu must lie in [0, 1], got {}",
                self.nu
            )));
        }
        if !(self.theta > 0.0) {
            return Err(Error::InvalidInput(format!(
                "theta must be > 0, got {}",
                self.theta
            )));
        }
        Ok(())
    }

    /// Same distribution with `p` shifted by `k` (used by the moment formula).
    fn with_p_shift(&self, k: f64) -> CchParams {
        CchParams {
            p: self.p + k,
            ..*self
        }
    }

    /// Same distribution with `q` shifted by `k` (used by survival moments).
    fn with_q_shift(&self, k: f64) -> CchParams {
        CchParams {
            q: self.q + k,
            ..*self
        }
    }
}

/// Truncation control for the Φ₁ series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesControl {
    /// Stop when three consecutive anti-diagonal sums each fall below
    /// `rel_tol` times the partial sum.
    pub rel_tol: f64,
    /// Hard budget on total terms summed.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-12,
            max_terms: 1_000_000,
        }
    }
}

/// The CCH law of the shrinkage weight `Z = 1/(1 + τ²λ²d²)` for one
/// component under the horseshoe prior: `CCH(1, 1/2, 1, s, 1, θ)`.
pub fn shrinkage_z_params(s: f64, theta: f64) -> Result<CchParams> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::InvalidInput(format!(
            "signal strength s must be finite and >= 0, got {s}"
        )));
    }
    CchParams::new(1.0, 0.5, 1.0, s, 1.0, theta)
}

/// Knots for one half-interval `[0, π/4]`, with a geometric ladder rising
/// from each boundary-layer scale so that no layer can hide inside a panel.
fn half_knots(scales: &[f64]) -> Vec<f64> {
    let half = 0.5 * FRAC_PI_2;
    let mut ks = vec![0.0, half];
    for &a in scales {
        let mut t = (0.25 * a).max(1e-15);
        while t < 0.5 * half {
            ks.push(t);
            t *= 4.0;
        }
    }
    ks.sort_by(f64::total_cmp);
    ks.dedup_by(|a, b| (*a - *b).abs() < 1e-16);
    ks
}

/// `∫₀^{1/ν} f(x) · x^{p−1}(1−νx)^{q−1}{θ+(1−θ)νx}^{−r}e^{−sx} dx`
/// via the `νx = sin²w` substitution, `w ∈ [0, π/2]`. Requires `ν > 0`.
///
/// The interval is split at `w = π/4` and the upper half is reflected to
/// `φ = π/2 − w` so the trig factors are always evaluated at a small angle
/// with full relative precision — essential because boundary layers live at
/// the endpoints: for `s > 0` the exponential concentrates near `w = 0` on
/// the scale `√(ν/s)` (for `s < 0` near `π/2` on `√(ν/|s|)`), and the
/// bracket develops a layer of width `√θ` at `w = 0` when `θ ≪ 1` and of
/// width `1/√θ` at `w = π/2` when `θ ≫ 1` (θ can reach ~10²² on tuning
/// grids, putting the layer far below the f64 spacing around π/2).
fn weighted_integral<F: Fn(f64) -> f64>(params: &CchParams, f: F) -> Result<f64> {
    let CchParams { p, q, r, s, nu, theta } = *params;
    debug_assert!(nu > 0.0);
    let sin_pow = 2.0 * p - 1.0;
    let cos_pow = 2.0 * q - 1.0;
    let decay = s / nu;
    let kernel = |sin_w: f64, cos_w: f64| -> f64 {
        let z = sin_w * sin_w; // νx
        // θ + (1−θ)z rewritten as θcos²w + sin²w: both terms nonnegative, so
        // no cancellation even when θ is many orders of magnitude from 1.
        let bracket = theta * cos_w * cos_w + z;
        sin_w.powf(sin_pow)
            * cos_w.powf(cos_pow)
            * bracket.powf(-r)
            * (-decay * z).exp()
            * f(z / nu)
    };
    let lower = |w: f64| {
        let (sin_w, cos_w) = w.sin_cos();
        kernel(sin_w, cos_w)
    };
    let upper = |phi: f64| {
        // w = π/2 − φ ⇒ sin w = cos φ, cos w = sin φ.
        let (sin_phi, cos_phi) = phi.sin_cos();
        kernel(cos_phi, sin_phi)
    };

    let mut lower_scales: Vec<f64> = Vec::new();
    let mut upper_scales: Vec<f64> = Vec::new();
    if s > 4.0 {
        lower_scales.push((nu / s).sqrt());
    }
    if s < -4.0 {
        upper_scales.push((nu / -s).sqrt());
    }
    if theta < 0.25 {
        lower_scales.push(theta.sqrt());
    }
    if theta > 4.0 {
        upper_scales.push(theta.powf(-0.5));
    }

    let a = quad::integrate(
        lower,
        &half_knots(&lower_scales),
        QUAD_REL_TOL,
        0.0,
        MAX_PANELS,
    )?;
    let b = quad::integrate(
        upper,
        &half_knots(&upper_scales),
        QUAD_REL_TOL,
        0.0,
        MAX_PANELS,
    )?;
    Ok(2.0 * nu.powf(-p) * (a.value + b.value))
}

/// The normalizing integral `B(p,q)·H(p,q,r,s,ν,θ)` (quadrature path).
fn bh(params: &CchParams) -> Result<f64> {
    weighted_integral(params, |_| 1.0)
}

/// Gordy's normalizing function `H(p, q, r, s, ν, θ)`.
///
/// Defined through the contract `B(p,q)·H = ∫₀^{1/ν} x^{p−1}(1−νx)^{q−1}
/// {θ+(1−θ)νx}^{−r} e^{−sx} dx`, which is evaluated by adaptive quadrature
/// (the authoritative path; see [`h_function_series`] for the series route).
/// At `ν = 0` the support becomes `(0, ∞)` and the integral has the closed
/// form `Γ(p)·θ^{−r}/s^p`, requiring `s > 0`.
pub fn h_function(params: &CchParams, _ctrl: &SeriesControl) -> Result<f64> {
    params.validate()?;
    if params.nu == 0.0 {
        return h_nu_zero(params);
    }
    Ok(bh(params)? / beta(params.p, params.q))
}

fn h_nu_zero(params: &CchParams) -> Result<f64> {
    if !(params.s > 0.0) {
        return Err(Error::Domain(format!(
            "for nu = 0 the defining integral only converges for s > 0, got s = {}",
            params.s
        )));
    }
    // B(p,q)·H = Γ(p)·θ^{−r}/s^p  ⇒  H = θ^{−r} s^{−p} / B'(..)·Γ(p)/B(p,q)
    let ln_h = statrs::function::gamma::ln_gamma(params.p)
        - params.r * params.theta.ln()
        - params.p * params.s.ln()
        - crate::numeric::ln_beta(params.p, params.q);
    Ok(ln_h.exp())
}

/// Series evaluation of `H` via `ν^{−p} e^{−s/ν} Φ₁(q, r, p+q, s/ν, 1−θ)`.
///
/// Only valid on the Φ₁ convergence region `|1−θ| < 1`; used as an
/// independent cross-check of the quadrature path.
pub fn h_function_series(params: &CchParams, ctrl: &SeriesControl) -> Result<f64> {
    params.validate()?;
    if params.nu == 0.0 {
        return Err(Error::Domain(
            "series route for H requires nu > 0".into(),
        ));
    }
    let x1 = params.s / params.nu;
    let x2 = 1.0 - params.theta;
    let (ln_phi, sign) = phi1_ln(params.q, params.r, params.p + params.q, x1, x2, ctrl)?;
    if sign <= 0.0 {
        return Err(Error::NonFinite(
            "series produced a nonpositive value for H".into(),
        ));
    }
    let ln_h = -params.p * params.nu.ln() - x1 + ln_phi;
    if ln_h > 709.0 {
        return Err(Error::NonFinite(format!(
            "H overflows f64 (ln H = {ln_h:.3})"
        )));
    }
    Ok(ln_h.exp())
}

/// Two-variable confluent hypergeometric function `Φ₁(a, b, g, x₁, x₂)`.
///
/// Summed along anti-diagonals `m + n = T` with terms carried in log space;
/// converges for `|x₂| < 1` and any real `x₁`. Stops once three consecutive
/// anti-diagonal sums each fall below `ctrl.rel_tol` times the partial sum.
pub fn phi1(a: f64, b: f64, g: f64, x1: f64, x2: f64, ctrl: &SeriesControl) -> Result<f64> {
    let (ln_abs, sign) = phi1_ln(a, b, g, x1, x2, ctrl)?;
    if ln_abs > 709.0 {
        return Err(Error::NonFinite(format!(
            "phi1 overflows f64 (ln |Φ₁| = {ln_abs:.3})"
        )));
    }
    Ok(sign * ln_abs.exp())
}

/// Log-space Φ₁: returns `(ln|Φ₁|, sign)`.
fn phi1_ln(a: f64, b: f64, g: f64, x1: f64, x2: f64, ctrl: &SeriesControl) -> Result<(f64, f64)> {
    for (name, v) in [("a", a), ("b", b), ("g", g), ("x1", x1), ("x2", x2)] {
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!(
                "phi1 argument {name} must be finite, got {v}"
            )));
        }
    }
    if !(g > 0.0) {
        return Err(Error::InvalidInput(format!("phi1 requires g > 0, got {g}")));
    }
    if x2.abs() >= 1.0 {
        return Err(Error::OutsideConvergenceRegion { abs_x2: x2.abs() });
    }
    if ctrl.max_terms == 0 || !(ctrl.rel_tol > 0.0) {
        return Err(Error::InvalidInput(
            "series control needs rel_tol > 0 and max_terms >= 1".into(),
        ));
    }

    let ln_x1 = x1.abs().ln();
    let sgn_x1: f64 = if x1 < 0.0 { -1.0 } else { 1.0 };
    let ln_x2 = x2.abs().ln();
    let sgn_x2: f64 = if x2 < 0.0 { -1.0 } else { 1.0 };

    // Incrementally extended log-Pochhammer tables: index T holds (a)_T etc.
    // A factor crossing zero makes every later entry exactly zero (sign 0,
    // ln = −∞), which the scaled accumulator skips naturally.
    let mut ln_a = vec![0.0f64];
    let mut sgn_a = vec![1.0f64];
    let mut ln_b = vec![0.0f64];
    let mut sgn_b = vec![1.0f64];
    let mut ln_g = vec![0.0f64];
    let mut ln_fact = vec![0.0f64];

    let mut total = ScaledSum::new();
    let mut small_streak = 0usize;
    let mut terms_used = 0usize;
    let mut last_rel;

    for t in 0usize.. {
        if t > 0 {
            let fa = a + (t - 1) as f64;
            ln_a.push(ln_a[t - 1] + fa.abs().ln());
            sgn_a.push(sgn_a[t - 1] * if fa == 0.0 { 0.0 } else { fa.signum() });
            let fb = b + (t - 1) as f64;
            ln_b.push(ln_b[t - 1] + fb.abs().ln());
            sgn_b.push(sgn_b[t - 1] * if fb == 0.0 { 0.0 } else { fb.signum() });
            ln_g.push(ln_g[t - 1] + (g + (t - 1) as f64).ln());
            ln_fact.push(ln_fact[t - 1] + (t as f64).ln());
        }

        let mut diag = ScaledSum::new();
        for n in 0..=t {
            let m = t - n;
            terms_used += 1;
            let mut ln_term = ln_a[t] + ln_b[n] - ln_g[t] - ln_fact[m] - ln_fact[n];
            if m > 0 {
                ln_term += m as f64 * ln_x1;
            }
            if n > 0 {
                ln_term += n as f64 * ln_x2;
            }
            let sgn = sgn_a[t]
                * sgn_b[n]
                * if m % 2 == 1 { sgn_x1 } else { 1.0 }
                * if n % 2 == 1 { sgn_x2 } else { 1.0 };
            diag.add_ln(ln_term, sgn);
        }
        total.add_ln(diag.ln_abs(), diag.sign());

        last_rel = if total.ln_abs() == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            (diag.ln_abs() - total.ln_abs()).exp()
        };
        if last_rel < ctrl.rel_tol {
            small_streak += 1;
            if small_streak >= 3 {
                return Ok((total.ln_abs(), total.sign()));
            }
        } else {
            small_streak = 0;
        }
        if terms_used >= ctrl.max_terms {
            return Err(Error::SeriesBudget {
                max_terms: ctrl.max_terms,
                last_rel,
            });
        }
    }
    unreachable!("loop exits via return");
}

/// Raw moment `E(X^k)` of a CCH distribution (`k ≥ 1`), via the shifted-`H`
/// identity `E(X^k) = ((p)_k / (p+q)_k) · H(p+k, q, r, s, ν, θ) / H(p, …)`.
pub fn cch_moment(params: &CchParams, k: u32, ctrl: &SeriesControl) -> Result<f64> {
    params.validate()?;
    if k == 0 {
        return Err(Error::InvalidInput("moment order k must be >= 1".into()));
    }
    let hk = h_function(&params.with_p_shift(k as f64), ctrl)?;
    let h0 = h_function(params, ctrl)?;
    if h0 == 0.0 || !h0.is_finite() || !hk.is_finite() {
        return Err(Error::NonFinite(format!(
            "H-ratio degenerate: H(p) = {h0:e}, H(p+k) = {hk:e}"
        )));
    }
    Ok(pochhammer(params.p, k) / pochhammer(params.p + params.q, k) * hk / h0)
}

/// Central moment `E{(X − μ)^k}` for `k ∈ {2, 3, 4}`, with `μ = E(X)`.
///
/// Computed by quadrature of the centered integrand directly (never by
/// raw-moment differencing, which cancels catastrophically for large `s`).
pub fn cch_central_moment(params: &CchParams, k: u32, ctrl: &SeriesControl) -> Result<f64> {
    params.validate()?;
    if !(2..=4).contains(&k) {
        return Err(Error::InvalidInput(format!(
            "central moment order must be 2, 3 or 4, got {k}"
        )));
    }
    let mu = cch_moment(params, 1, ctrl)?;
    if params.nu == 0.0 {
        // Gamma(shape p, rate s) limit: closed-form central moments.
        let p = params.p;
        let s2 = params.s * params.s;
        return Ok(match k {
            2 => p / s2,
            3 => 2.0 * p / (s2 * params.s),
            _ => 3.0 * p * (p + 2.0) / (s2 * s2),
        });
    }
    let num = weighted_integral(params, |x| (x - mu).powi(k as i32))?;
    let den = bh(params)?;
    Ok(num / den)
}

/// Density of the CCH distribution at `x`.
///
/// `x` must lie strictly inside the support `(0, 1/ν)` (or `(0, ∞)` at
/// `ν = 0`); outside it a domain error is returned.
pub fn cch_pdf(x: f64, params: &CchParams, ctrl: &SeriesControl) -> Result<f64> {
    params.validate()?;
    let upper = if params.nu == 0.0 {
        f64::INFINITY
    } else {
        1.0 / params.nu
    };
    if !(x > 0.0 && x < upper) {
        return Err(Error::Domain(format!(
            "pdf argument {x} outside the open support (0, {upper})"
        )));
    }
    let CchParams { p, q, r, s, nu, theta } = *params;
    let norm = if nu == 0.0 {
        h_nu_zero(params)? * beta(p, q)
    } else {
        bh(params)?
    };
    // θ + (1−θ)νx written as θ(1−νx) + νx to avoid cancellation at extreme θ.
    let kernel = x.powf(p - 1.0)
        * (1.0 - nu * x).powf(q - 1.0)
        * (theta * (1.0 - nu * x) + nu * x).powf(-r)
        * (-s * x).exp();
    let _ = ctrl;
    Ok(kernel / norm)
}

/// First moment `E(Z)` of the shrinkage weight `Z ~ CCH(1, 1/2, 1, s, 1, θ)`.
///
/// Cheaper than [`shrinkage_moments`] (two weighted integrals instead of
/// three); the posterior mean `α̃ = α̂ (1 − E(Z))` needs only this.
pub fn shrinkage_mean(s: f64, theta: f64) -> Result<f64> {
    let params = shrinkage_z_params(s, theta)?;
    let b1 = bh(&params)?;
    let b2 = bh(&params.with_p_shift(1.0))?;
    if !(b1 > 0.0) {
        return Err(Error::NonFinite(format!(
            "normalizer vanished at s = {s}, theta = {theta}"
        )));
    }
    Ok(b2 / b1)
}

/// Survival moment `E(1 − Z)` of the shrinkage weight
/// `Z ~ CCH(1, 1/2, 1, s, 1, θ)`, via the `q`-shift identity
/// `E(1 − Z) = BH(p, q+1, r)/BH(p, q, r)`.
///
/// This is the horseshoe shrinkage *factor* itself. Computing it directly
/// keeps full relative precision even deep in the strong-shrinkage regime
/// (θ ≫ 1, where `1 − E(Z)` as a subtraction would cancel to noise).
pub fn shrinkage_survival(s: f64, theta: f64) -> Result<f64> {
    let params = shrinkage_z_params(s, theta)?;
    let b1 = bh(&params)?;
    let b2 = bh(&params.with_q_shift(1.0))?;
    if !(b1 > 0.0) {
        return Err(Error::NonFinite(format!(
            "normalizer vanished at s = {s}, theta = {theta}"
        )));
    }
    Ok(b2 / b1)
}

/// First two moments `(E(Z), E(Z²))` of the shrinkage weight
/// `Z ~ CCH(1, 1/2, 1, s, 1, θ)` — the hot path behind every horseshoe
/// posterior mean and SURE evaluation.
pub fn shrinkage_moments(s: f64, theta: f64) -> Result<(f64, f64)> {
    let params = shrinkage_z_params(s, theta)?;
    let b1 = bh(&params)?;
    let b2 = bh(&params.with_p_shift(1.0))?;
    let b3 = bh(&params.with_p_shift(2.0))?;
    if !(b1 > 0.0) {
        return Err(Error::NonFinite(format!(
            "normalizer vanished at s = {s}, theta = {theta}"
        )));
    }
    Ok((b2 / b1, b3 / b1))
}
