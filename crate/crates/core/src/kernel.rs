//! The singular integral `I(φ; ε) = ∫₀^φ dx / √(sinh²(x/2) + ε²)` and its
//! matched-asymptotic approximations.
//!
//! Exact values are computed in a stretched variable. With `s = sinh(x/2)`
//! the integrand becomes `2 / (√(1+s²) √(s²+ε²))`, and the second
//! substitution `s = ε sinh t` removes the remaining inner scale:
//!
//! ```text
//! I(φ; ε) = ∫₀^T 2 / √(1 + ε² sinh² t) dt,   T = asinh(sinh(φ/2) / ε)
//! ```
//!
//! The new integrand is smooth on unit scale with a single transition near
//! `t = ln(2/ε)`, so ε can be as small as `exp(-10⁴)` when carried in log form.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, IntegralResult, QuadOptions};

/// Asymptotic formulas are flagged as outside their validity range above this ε.
pub const VALIDITY_LIMIT: f64 = 0.1;

/// The small parameter `ε = φ_x(0) / (2√α)`, stored as its logarithm so that
/// exponentially small values (ε ~ e^{-L/2}) do not underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eps {
    ln: f64,
}

impl Eps {
    pub fn new(value: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "eps must be finite and non-negative, got {value}"
            )));
        }
        Ok(Self { ln: value.ln() })
    }

    pub fn from_ln(ln: f64) -> Self {
        Self { ln }
    }

    /// ε itself; underflows to 0 below ~1e-308.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    fn require_positive(self) -> Result<()> {
        if self.is_zero() || self.ln.is_nan() {
            Err(Error::Domain("eps must be strictly positive".into()))
        } else {
            Ok(())
        }
    }
}

/// Choice of matching point between the inner (arcsinh) and outer (arccoth) branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxVariant {
    /// η = ε^{3/4}, error O(√ε).
    Crude,
    /// η = √ε, error O(ε).
    Refined,
}

impl ApproxVariant {
    pub fn matching_point(self, eps: f64) -> f64 {
        match self {
            ApproxVariant::Crude => eps.powf(0.75),
            ApproxVariant::Refined => eps.sqrt(),
        }
    }
}

/// Value of an asymptotic formula together with its small-ε validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approximation {
    pub value: f64,
    pub within_validity: bool,
}

/// `ln sinh(φ/2)` for φ > 0, without overflow for large φ.
pub(crate) fn ln_sinh_half(phi: f64) -> f64 {
    let y = 0.5 * phi;
    if y > 20.0 {
        y - LN_2 + (-(-phi).exp()).ln_1p()
    } else {
        y.sinh().ln()
    }
}

/// `ln tanh(y)` for y > 0.
pub(crate) fn ln_tanh(y: f64) -> f64 {
    if y < 1.0 {
        y.tanh().ln()
    } else {
        (-2.0 / ((2.0 * y).exp() + 1.0)).ln_1p()
    }
}

/// `arccoth(e^{φ/2})` in the cancellation-free form `-½ ln tanh(φ/4)`.
pub fn arccoth_exp_half(phi: f64) -> f64 {
    -0.5 * ln_tanh(0.25 * phi)
}

/// Stretched coordinate `t = asinh(sinh(φ/2) / ε)` for φ ≥ 0.
pub(crate) fn stretched_coordinate(phi: f64, eps: Eps) -> f64 {
    if phi <= 0.0 {
        return 0.0;
    }
    let r = ln_sinh_half(phi) - eps.ln;
    if r > 20.0 {
        r + LN_2 + 0.25 * (-2.0 * r).exp()
    } else {
        r.exp().asinh()
    }
}

/// `u = ε sinh t`, equal to `sinh(φ/2)` at the corresponding φ.
pub(crate) fn scaled_sinh(t: f64, eps: Eps) -> f64 {
    if t > 20.0 {
        (t - LN_2 + eps.ln).exp()
    } else {
        eps.ln.exp() * t.sinh()
    }
}

/// Potential φ at stretched coordinate t.
pub(crate) fn phi_at(t: f64, eps: Eps) -> f64 {
    2.0 * scaled_sinh(t, eps).asinh()
}

/// Integrand of I in the stretched variable.
#[inline]
pub(crate) fn stretched_kernel(t: f64, eps: Eps) -> f64 {
    2.0 / scaled_sinh(t, eps).hypot(1.0)
}

/// Integrand of `∫ cosh φ / √(sinh²(φ/2)+ε²) dφ` in the stretched variable,
/// using `cosh φ = 1 + 2 sinh²(φ/2)`.
#[inline]
pub(crate) fn stretched_cosh_kernel(t: f64, eps: Eps) -> f64 {
    let u = scaled_sinh(t, eps);
    2.0 * (1.0 + 2.0 * u * u) / u.hypot(1.0)
}

/// Breakpoints bracketing the transition at `u = ε sinh t ≈ 1`; the flat
/// region below it can be thousands of units long, and an unsplit panel
/// would not see the exponentially localized tail.
fn transition_points(eps: Eps) -> [f64; 11] {
    let t0 = LN_2 - eps.ln;
    [-40.0, -20.0, -10.0, -5.0, -2.0, 0.0, 2.0, 5.0, 10.0, 20.0, 40.0].map(|d| t0 + d)
}

/// Integrates `g(t)` over the stretched image of `[phi_a, phi_b]`.
pub(crate) fn stretched_integral<G: Fn(f64) -> f64>(
    g: G,
    phi_a: f64,
    phi_b: f64,
    eps: Eps,
    opts: QuadOptions,
) -> Result<IntegralResult> {
    let ta = stretched_coordinate(phi_a, eps);
    let tb = stretched_coordinate(phi_b, eps);
    integrate(g, ta, tb, &transition_points(eps), opts)
}

/// The integrand `1 / √(sinh²(x/2) + ε²)`.
pub fn kernel(x: f64, eps: Eps) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::InvalidArgument(format!("kernel requires x >= 0, got {x}")));
    }
    if x == 0.0 && eps.is_zero() {
        return Err(Error::Domain("kernel is singular at x = 0 when eps = 0".into()));
    }
    Ok(1.0 / (0.5 * x).sinh().hypot(eps.value()))
}

pub(crate) fn i_exact_with(phi: f64, eps: Eps, opts: QuadOptions) -> Result<IntegralResult> {
    if !(phi >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "I(phi; eps) requires phi >= 0, got {phi}"
        )));
    }
    eps.require_positive()?;
    stretched_integral(|t| stretched_kernel(t, eps), 0.0, phi, eps, opts)
}

/// Exact value of `I(φ; ε)` to absolute tolerance `tol`.
pub fn i_exact(phi: f64, eps: Eps, tol: f64) -> Result<IntegralResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    i_exact_with(phi, eps, QuadOptions::absolute(tol))
}

/// Exact `I(φ_k; ε)` at every node of a non-decreasing grid, accumulated
/// segment by segment so the result is monotone by construction.
pub fn i_exact_cumulative(phis: &[f64], eps: Eps, tol: f64) -> Result<Vec<f64>> {
    eps.require_positive()?;
    let seg_tol = tol / (phis.len().max(1) as f64);
    let mut out = Vec::with_capacity(phis.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &phi in phis {
        if phi < prev {
            return Err(Error::InvalidArgument("phi grid must be non-decreasing".into()));
        }
        if phi > prev {
            let seg = stretched_integral(
                |t| stretched_kernel(t, eps),
                prev,
                phi,
                eps,
                QuadOptions::absolute(seg_tol).with_rel(1e-15),
            )?;
            acc += seg.value;
        }
        out.push(acc);
        prev = phi;
    }
    Ok(out)
}

/// Matched-asymptotic approximation of `I(φ; ε)`:
/// `2 asinh(φ/2ε)` for φ ≤ η(ε), else `2 ln(4/ε) − 4 arccoth(e^{φ/2})`.
pub fn i_approx(phi: f64, eps: Eps, variant: ApproxVariant) -> Approximation {
    let e = eps.value();
    let within_validity = e <= VALIDITY_LIMIT;
    let value = if phi <= 0.0 {
        0.0
    } else if phi <= variant.matching_point(e) {
        2.0 * (phi / (2.0 * e)).asinh()
    } else {
        outer_branch(phi, eps)
    };
    Approximation { value, within_validity }
}

/// Outer branch `2 ln(4/ε) − 4 arccoth(e^{φ/2})`.
pub fn outer_branch(phi: f64, eps: Eps) -> f64 {
    2.0 * (2.0 * LN_2 - eps.ln) - 4.0 * arccoth_exp_half(phi)
}

/// Leading-order error scale of the refined approximation.
pub fn refined_error_model(phi: f64, eps: Eps) -> f64 {
    let e = eps.value();
    if phi <= e.sqrt() {
        phi * phi / 24.0
    } else {
        let s = (0.5 * phi).sinh();
        0.5 * e * e * (0.5 * phi).cosh() / (s * s)
    }
}

/// Jump of the approximation across its matching point.
pub fn matching_jump(eps: Eps, variant: ApproxVariant) -> f64 {
    let e = eps.value();
    let eta = variant.matching_point(e);
    (2.0 * (eta / (2.0 * e)).asinh() - outer_branch(eta, eps)).abs()
}

/// Location and size of the largest approximation error over `[0, phi_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupError {
    pub sup: f64,
    pub argmax: f64,
}

/// `sup_φ |I_exact − I_approx|` over `[0, phi_max]`, sampled on a
/// logarithmic grid with both sides of the matching point included.
pub fn sup_approx_error(eps: Eps, variant: ApproxVariant, phi_max: f64, points: usize, tol: f64) -> Result<SupError> {
    eps.require_positive()?;
    let e = eps.value();
    let eta = variant.matching_point(e);
    let lo = (e * 1e-3).min(phi_max * 1e-6);
    let ratio = (phi_max / lo).ln();
    let mut phis: Vec<f64> = (0..points)
        .map(|k| lo * (ratio * k as f64 / (points - 1) as f64).exp())
        .collect();
    if eta < phi_max {
        phis.push(eta);
        phis.push(eta * (1.0 + 1e-12));
    }
    phis.sort_by(f64::total_cmp);
    let exact = i_exact_cumulative(&phis, eps, tol)?;
    let mut best = SupError { sup: 0.0, argmax: 0.0 };
    for (&phi, &ex) in phis.iter().zip(&exact) {
        let err = (ex - i_approx(phi, eps, variant).value).abs();
        if err > best.sup {
            best = SupError { sup: err, argmax: phi };
        }
    }
    Ok(best)
}
