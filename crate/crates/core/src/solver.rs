//! Self-consistent CCPB steady states in the inverse formulation.
//!
//! On `0 ≤ x ≤ L/2` the profile satisfies
//!
//! ```text
//! x(φ) = I(φ; ε) / (2√α),    √α = L / J(φ_b; ε),    J(φ; ε) = ∫₀^φ cosh ξ / √(sinh²(ξ/2)+ε²) dξ
//! ```
//!
//! and the boundary condition `x(φ_b) = L/2` becomes the scalar equation
//! `I(φ_b; ε) − L²/J(φ_b; ε) = 0`, solved for ln ε by bracketed Brent.
//! Negative voltages are mapped through the oddness of the solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    self, i_exact_with, ln_tanh, phi_at, stretched_coordinate, stretched_cosh_kernel, stretched_integral,
    stretched_kernel, Eps,
};
use crate::quadrature::{integrate, QuadOptions};
use crate::roots::{brent_with_values, expand_bracket, RootOptions};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLES: usize = 400;

/// Admissible range of ln ε for the root search.
const LN_EPS_MIN: f64 = -1.0e5;
const LN_EPS_MAX: f64 = 23.0;

/// Nondimensional problem setup: domain `[-L/2, L/2]`, boundary potentials
/// `±V`, optional Stern layer of width δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    /// Domain size L in Debye lengths.
    pub length: f64,
    /// Boundary potential V in thermal units.
    pub voltage: f64,
    /// Normalized Stern width δ.
    pub stern_delta: f64,
}

impl ProblemParams {
    pub fn new(length: f64, voltage: f64) -> Result<Self> {
        Self::with_stern(length, voltage, 0.0)
    }

    pub fn with_stern(length: f64, voltage: f64, stern_delta: f64) -> Result<Self> {
        let p = Self {
            length,
            voltage,
            stern_delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "L must be positive, got {}",
                self.length
            )));
        }
        if !self.voltage.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "V must be finite, got {}",
                self.voltage
            )));
        }
        if !(self.stern_delta >= 0.0 && self.stern_delta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Stern width must be non-negative, got {}",
                self.stern_delta
            )));
        }
        Ok(())
    }
}

/// Closed-form large-domain solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSolution {
    pub alpha_tilde: f64,
    pub eps_tilde: f64,
    /// ln ε̃; finite even when `eps_tilde` underflows, `-inf` when V = 0.
    pub ln_eps_tilde: f64,
    pub voltage: f64,
    pub length: f64,
    pub predicted_error: f64,
    /// False when the predicted error exceeds 0.1.
    pub valid: bool,
}

impl AsymptoticSolution {
    pub fn sqrt_alpha_tilde(&self) -> f64 {
        self.alpha_tilde.sqrt()
    }

    pub fn eps(&self) -> Eps {
        Eps::from_ln(self.ln_eps_tilde)
    }
}

/// `4 sinh²(V/4) / L`, the finite-domain correction ratio.
pub fn correction_ratio(voltage: f64, length: f64) -> f64 {
    let s = (0.25 * voltage).sinh();
    4.0 * s * s / length
}

/// `2 tanh(|V|/4) exp(2 sinh²(V/4) − L/2)`, the predicted error of the
/// closed-form solution.
pub fn predicted_error(voltage: f64, length: f64) -> f64 {
    let s = (0.25 * voltage).sinh();
    2.0 * (0.25 * voltage.abs()).tanh() * (2.0 * s * s - 0.5 * length).exp()
}

/// Closed-form α̃ and ε̃.
pub fn solve_asymptotic(params: &ProblemParams) -> Result<AsymptoticSolution> {
    params.validate()?;
    if params.stern_delta > 0.0 {
        return Err(Error::InvalidArgument(
            "the closed-form solution applies to Dirichlet boundaries (stern_delta = 0)".into(),
        ));
    }
    let (v, l) = (params.voltage, params.length);
    let r = correction_ratio(v, l);
    // √(1+r²) − r without cancellation for large r.
    let sqrt_alpha = 1.0 / ((1.0 + r * r).sqrt() + r);
    let ln_eps = if v == 0.0 {
        f64::NEG_INFINITY
    } else {
        4f64.ln() - 0.5 * l * sqrt_alpha + ln_tanh(0.25 * v.abs())
    };
    let predicted = predicted_error(v, l);
    Ok(AsymptoticSolution {
        alpha_tilde: sqrt_alpha * sqrt_alpha,
        eps_tilde: ln_eps.exp(),
        ln_eps_tilde: ln_eps,
        voltage: v,
        length: l,
        predicted_error: predicted,
        valid: predicted <= 0.1,
    })
}

/// Explicit approximate inverse profile `x^approx(φ)`, odd in φ.
pub fn x_approx(phi: f64, asym: &AsymptoticSolution) -> Result<f64> {
    let vmag = asym.voltage.abs();
    let m = phi.abs();
    if m > vmag * (1.0 + 1e-14) {
        return Err(Error::Domain(format!("|phi| = {m} exceeds |V| = {vmag}")));
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    if phi.signum() != asym.voltage.signum() {
        return Ok(-x_approx(-phi, asym)?);
    }
    let inv_sqrt_alpha = 1.0 / asym.sqrt_alpha_tilde();
    let ln_eps = asym.ln_eps_tilde;
    let x = if m <= (0.5 * ln_eps).exp() {
        inv_sqrt_alpha * (0.5 * m * (-ln_eps).exp()).asinh()
    } else {
        inv_sqrt_alpha * (4f64.ln() - ln_eps + ln_tanh(0.25 * m))
    };
    Ok(x.copysign(phi))
}

/// Half-space Gouy-Chapman inverse profile anchored at `x(V) = L/2`.
/// Returns a signed infinity at φ = 0, where the profile diverges.
pub fn gouy_chapman_x(phi: f64, voltage: f64, length: f64) -> Result<f64> {
    if voltage == 0.0 {
        return Err(Error::Domain("Gouy-Chapman profile needs V != 0".into()));
    }
    if phi != 0.0 && phi.signum() != voltage.signum() {
        return Err(Error::Domain("phi and V must have the same sign".into()));
    }
    let m = phi.abs();
    if m > voltage.abs() * (1.0 + 1e-14) {
        return Err(Error::Domain(format!("|phi| = {m} exceeds |V| = {}", voltage.abs())));
    }
    if m == 0.0 {
        return Ok(f64::NEG_INFINITY * voltage.signum());
    }
    let x = 0.5 * length - (ln_tanh(0.25 * voltage.abs()) - ln_tanh(0.25 * m));
    Ok(x.copysign(voltage))
}

/// Infinite-domain (α = 1) profile next to a single wall, optionally behind a
/// Stern layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfiniteProfile {
    /// Potential at the diffuse-layer edge (equals V without a Stern layer).
    pub phi_wall: f64,
}

impl InfiniteProfile {
    pub fn new(voltage: f64, stern_delta: f64) -> Result<Self> {
        if stern_delta == 0.0 || voltage == 0.0 {
            return Ok(Self { phi_wall: voltage });
        }
        let vm = voltage.abs();
        // φ + 2δ sinh(φ/2) = |V|, monotone in φ.
        let h = |p: f64| Ok(p + 2.0 * stern_delta * (0.5 * p).sinh() - vm);
        let root = brent_with_values(h, 0.0, -vm, vm, h(vm)?, RootOptions::default())?;
        Ok(Self {
            phi_wall: root.x.copysign(voltage),
        })
    }

    /// φ at distance `d ≥ 0` from the wall.
    pub fn phi_at_distance(&self, d: f64) -> f64 {
        let m = self.phi_wall.abs();
        (4.0 * ((0.25 * m).tanh() * (-d).exp()).atanh()).copysign(self.phi_wall)
    }
}

/// Boltzmann concentrations `p = α e^{−φ}`, `n = α e^{φ}`.
pub fn concentrations(phi: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    Ok((alpha * (-phi).exp(), alpha * phi.exp()))
}

fn quad_opts(tol: f64) -> QuadOptions {
    QuadOptions::absolute(tol).with_rel(1e-14)
}

/// J(φ; ε) = ∫₀^φ cosh ξ / √(sinh²(ξ/2)+ε²) dξ.
fn cosh_moment(phi: f64, eps: Eps, tol: f64) -> Result<f64> {
    Ok(stretched_integral(|t| stretched_cosh_kernel(t, eps), 0.0, phi, eps, quad_opts(tol))?.value)
}

/// √α as a function of ε: `√α = L / ∫₀^V cosh φ / √(sinh²(φ/2)+ε²) dφ`.
pub fn sqrt_alpha_of_eps(voltage: f64, length: f64, eps: Eps, tol: f64) -> Result<f64> {
    if voltage == 0.0 {
        return Err(Error::InvalidArgument("V must be non-zero".into()));
    }
    if eps.is_zero() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    Ok(length / cosh_moment(voltage.abs(), eps, tol)?)
}

#[derive(Debug, Clone, Copy)]
struct Core {
    eps: Eps,
    sqrt_alpha: f64,
    /// |x(φ_b) − L/2|.
    boundary_mismatch: f64,
}

/// Boundary-condition residual `I(φ_b; ε) − L²/J(φ_b; ε)` at ε = e^u.
fn boundary_residual(phi_b: f64, length: f64, u: f64, tol: f64) -> Result<f64> {
    let eps = Eps::from_ln(u);
    let i = i_exact_with(phi_b, eps, quad_opts(tol))?.value;
    let j = cosh_moment(phi_b, eps, tol)?;
    Ok(i - length * length / j)
}

fn solve_core(phi_b: f64, length: f64, guess_ln_eps: f64, tol: f64) -> Result<Core> {
    let qtol = 1e-3 * tol;
    let g = |u: f64| boundary_residual(phi_b, length, u, qtol);
    let guess = if guess_ln_eps.is_finite() {
        guess_ln_eps.clamp(LN_EPS_MIN + 1.0, LN_EPS_MAX - 1.0)
    } else {
        0.0
    };
    let bracket = expand_bracket(g, guess, 0.5, LN_EPS_MIN, LN_EPS_MAX).map_err(|e| match e {
        Error::Bracketing(_) => Error::Bracketing(format!(
            "no ε in [exp({LN_EPS_MIN}), exp({LN_EPS_MAX})] satisfies x(phi_b) = L/2 \
             for phi_b = {phi_b}, L = {length}"
        )),
        other => other,
    })?;
    let opts = RootOptions {
        xtol: 1e-15 * bracket.lo.abs().max(1.0),
        ftol: 0.0,
        max_iter: 300,
    };
    let root = brent_with_values(g, bracket.lo, bracket.f_lo, bracket.hi, bracket.f_hi, opts)?;
    let eps = Eps::from_ln(root.x);
    let sqrt_alpha = length / cosh_moment(phi_b, eps, qtol)?;
    let mismatch = root.fx.abs() / (2.0 * sqrt_alpha);
    let floor = 1e-13 * length.max(1.0) / sqrt_alpha.min(1.0);
    if mismatch > tol.max(floor) {
        return Err(Error::RootNonConvergence {
            iterations: root.iterations,
            residual: mismatch,
        });
    }
    Ok(Core {
        eps,
        sqrt_alpha,
        boundary_mismatch: mismatch,
    })
}

/// One node of the monotone (φ, x) table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub phi: f64,
    pub x: f64,
}

/// Exact self-consistent steady state with an evaluator for `x(φ)` and `φ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CcpbSolution {
    pub params: ProblemParams,
    /// ε; may underflow to 0 for very large domains, see `ln_eps`.
    pub eps: f64,
    pub ln_eps: f64,
    pub alpha: f64,
    /// φ_x(0) = 2√α ε, signed like V.
    pub phi_x0: f64,
    /// φ(L/2); equals V without a Stern layer.
    pub phi_boundary: f64,
    /// Table on `0 ≤ x ≤ L/2`, φ signed like V.
    pub samples: Vec<ProfileSample>,
    pub residual: f64,
    /// Stretched coordinate of each sample.
    t_nodes: Vec<f64>,
    tol: f64,
}

impl CcpbSolution {
    fn trivial(params: ProblemParams, tol: f64) -> Self {
        Self {
            params,
            eps: 0.0,
            ln_eps: f64::NEG_INFINITY,
            alpha: 1.0,
            phi_x0: 0.0,
            phi_boundary: 0.0,
            samples: vec![
                ProfileSample { phi: 0.0, x: 0.0 },
                ProfileSample {
                    phi: 0.0,
                    x: 0.5 * params.length,
                },
            ],
            residual: 0.0,
            t_nodes: vec![0.0, 0.0],
            tol,
        }
    }

    /// φ ≡ 0 (V = 0).
    pub fn is_trivial(&self) -> bool {
        self.phi_boundary == 0.0
    }

    pub fn eps_value(&self) -> Eps {
        Eps::from_ln(self.ln_eps)
    }

    pub fn sqrt_alpha(&self) -> f64 {
        self.alpha.sqrt()
    }

    fn polarity(&self) -> f64 {
        if self.phi_boundary < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Electric field magnitude `|φ_x| = 2√α √(sinh²(φ/2) + ε²)` at potential φ.
    pub fn slope_at_phi(&self, phi: f64) -> f64 {
        2.0 * self.sqrt_alpha() * (0.5 * phi.abs()).sinh().hypot(self.eps)
    }

    fn segment_integral(&self, ta: f64, tb: f64) -> Result<f64> {
        let eps = self.eps_value();
        let opts = QuadOptions::absolute(1e-3 * self.tol).with_rel(1e-15);
        Ok(integrate(|t| stretched_kernel(t, eps), ta, tb, &[], opts)?.value / (2.0 * self.sqrt_alpha()))
    }

    /// Exact inverse profile x(φ) for `|φ| ≤ |φ_b|`, odd in φ.
    pub fn x_of_phi(&self, phi: f64) -> Result<f64> {
        let m = phi.abs();
        let pb = self.phi_boundary.abs();
        if self.is_trivial() {
            return if m == 0.0 {
                Ok(0.0)
            } else {
                Err(Error::Domain("trivial solution: phi is identically 0".into()))
            };
        }
        if m > pb * (1.0 + 1e-14) {
            return Err(Error::Domain(format!("|phi| = {m} exceeds boundary value {pb}")));
        }
        let sign = if phi * self.polarity() < 0.0 { -1.0 } else { 1.0 };
        let idx = self.samples.partition_point(|s| s.phi.abs() <= m).saturating_sub(1);
        let base = self.samples[idx];
        if base.phi.abs() == m {
            return Ok(sign * base.x);
        }
        let t = stretched_coordinate(m, self.eps_value());
        Ok(sign * (base.x + self.segment_integral(self.t_nodes[idx], t)?))
    }

    /// φ(x) for `|x| ≤ L/2`, by safeguarded Newton on the exact inverse
    /// profile within the bracketing table segment.
    pub fn phi_of_x(&self, x: f64) -> Result<f64> {
        let half = 0.5 * self.params.length;
        let m = x.abs();
        if !(m <= half * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("|x| = {m} outside [0, L/2 = {half}]")));
        }
        if self.is_trivial() || m == 0.0 {
            return Ok(0.0);
        }
        let sign = x.signum() * self.polarity();
        let n = self.samples.len();
        let idx = self.samples.partition_point(|s| s.x <= m);
        if idx >= n {
            return Ok(sign * self.phi_boundary.abs());
        }
        let i = idx - 1;
        let (lo, hi) = (self.samples[i], self.samples[idx]);
        if lo.x == m {
            return Ok(sign * lo.phi.abs());
        }
        let (ta, tb) = (self.t_nodes[i], self.t_nodes[idx]);
        let eps = self.eps_value();
        let scale = 1.0 / (2.0 * self.sqrt_alpha());
        let target = m - lo.x;
        let (mut a, mut b) = (ta, tb);
        let mut t = ta + (tb - ta) * target / (hi.x - lo.x);
        let xtol = 1e-14 * half.max(1.0);
        for _ in 0..100 {
            let f = self.segment_integral(ta, t)? - target;
            if f.abs() <= xtol {
                break;
            }
            if f > 0.0 {
                b = t;
            } else {
                a = t;
            }
            let deriv = scale * stretched_kernel(t, eps);
            let mut next = t - f / deriv;
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if (next - t).abs() <= 1e-16 * t.abs().max(1.0) {
                t = next;
                break;
            }
            t = next;
        }
        Ok(sign * phi_at(t, eps))
    }
}

/// Options for [`solve_exact_with`] and [`solve_stern_with`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    pub samples: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            samples: DEFAULT_SAMPLES,
        }
    }
}

/// Sample nodes in |φ|: geometric below √ε (resolving the inner arcsinh
/// scale), uniform above.
fn sample_nodes(phi_b: f64, eps: Eps, count: usize) -> Vec<f64> {
    let count = count.max(8);
    let ln_eta = 0.5 * eps.ln();
    let mut nodes = vec![0.0];
    let eta = ln_eta.exp();
    if eta < 0.5 * phi_b {
        let n_geo = count / 4;
        let ln_lo = eps.ln() + 0.01f64.ln();
        for k in 0..n_geo {
            let p = (ln_lo + (ln_eta - ln_lo) * k as f64 / n_geo as f64).exp();
            if p > *nodes.last().unwrap() {
                nodes.push(p);
            }
        }
        let start = eta.max(*nodes.last().unwrap());
        let n_uni = count - nodes.len();
        for k in 0..n_uni {
            nodes.push(start + (phi_b - start) * k as f64 / (n_uni - 1) as f64);
        }
    } else {
        for k in 1..count {
            nodes.push(phi_b * k as f64 / (count - 1) as f64);
        }
    }
    nodes.dedup();
    nodes
}

fn build_solution(
    params: ProblemParams,
    phi_b: f64,
    core: Core,
    residual: f64,
    opts: SolveOptions,
) -> Result<CcpbSolution> {
    let eps = core.eps;
    let phis = sample_nodes(phi_b, eps, opts.samples);
    let t_nodes: Vec<f64> = phis.iter().map(|&p| stretched_coordinate(p, eps)).collect();
    let xs = kernel::i_exact_cumulative(&phis, eps, 1e-3 * opts.tol)?;
    let scale = 1.0 / (2.0 * core.sqrt_alpha);
    let polarity = params.voltage.signum();
    let last = phis.len() - 1;
    let samples = phis
        .iter()
        .zip(&xs)
        .enumerate()
        .map(|(k, (&p, &i))| ProfileSample {
            phi: polarity * p,
            x: if k == last { 0.5 * params.length } else { scale * i },
        })
        .collect();
    let eps_value = eps.value();
    Ok(CcpbSolution {
        params,
        eps: eps_value,
        ln_eps: eps.ln(),
        alpha: core.sqrt_alpha * core.sqrt_alpha,
        phi_x0: polarity * 2.0 * core.sqrt_alpha * eps_value,
        phi_boundary: polarity * phi_b,
        samples,
        residual,
        t_nodes,
        tol: opts.tol,
    })
}

/// Exact CCPB steady state with Dirichlet boundaries `φ(±L/2) = ±V`.
pub fn solve_exact(params: &ProblemParams, tol: f64) -> Result<CcpbSolution> {
    solve_exact_with(
        params,
        SolveOptions {
            tol,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_exact_with(params: &ProblemParams, opts: SolveOptions) -> Result<CcpbSolution> {
    params.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let dirichlet = ProblemParams {
        stern_delta: 0.0,
        ..*params
    };
    if params.voltage == 0.0 {
        return Ok(CcpbSolution::trivial(dirichlet, opts.tol));
    }
    let asym = solve_asymptotic(&dirichlet)?;
    let vm = params.voltage.abs();
    let core = solve_core(vm, params.length, asym.ln_eps_tilde, opts.tol)?;
    build_solution(dirichlet, vm, core, core.boundary_mismatch, opts)
}

/// Steady state with Stern boundary conditions `φ(±L/2) ± δ φ_x(±L/2) = ±V`.
///
/// Solved as nested scalar problems: Brent on the diffuse-layer potential φ_s,
/// with the Dirichlet inverse problem for `(ε, α)` solved at each trial φ_s.
pub fn solve_stern(params: &ProblemParams, tol: f64) -> Result<CcpbSolution> {
    solve_stern_with(
        params,
        SolveOptions {
            tol,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_stern_with(params: &ProblemParams, opts: SolveOptions) -> Result<CcpbSolution> {
    params.validate()?;
    let delta = params.stern_delta;
    if delta == 0.0 || params.voltage == 0.0 {
        return solve_exact_with(params, opts).map(|mut s| {
            s.params = *params;
            s
        });
    }
    let vm = params.voltage.abs();
    let length = params.length;
    let mut last_ln_eps = f64::NAN;
    let mut robin = |phi_s: f64| -> Result<f64> {
        let guess = if last_ln_eps.is_finite() {
            last_ln_eps
        } else {
            solve_asymptotic(&ProblemParams::new(length, phi_s)?)?.ln_eps_tilde
        };
        let core = solve_core(phi_s, length, guess, 1e-2 * opts.tol)?;
        last_ln_eps = core.eps.ln();
        let field = 2.0 * core.sqrt_alpha * (0.5 * phi_s).sinh().hypot(core.eps.value());
        Ok(phi_s + delta * field - vm)
    };
    let f_hi = robin(vm)?;
    let root = brent_with_values(
        &mut robin,
        0.0,
        -vm,
        vm,
        f_hi,
        RootOptions {
            xtol: 1e-3 * opts.tol,
            ftol: 0.0,
            max_iter: 200,
        },
    )?;
    let phi_s = root.x;
    let guess = solve_asymptotic(&ProblemParams::new(length, phi_s)?)?.ln_eps_tilde;
    let core = solve_core(phi_s, length, guess, 1e-2 * opts.tol)?;
    let field = 2.0 * core.sqrt_alpha * (0.5 * phi_s).sinh().hypot(core.eps.value());
    let robin_residual = (phi_s + delta * field - vm).abs();
    if robin_residual > 1e3 * opts.tol.max(1e-13 * vm) {
        return Err(Error::RootNonConvergence {
            iterations: root.iterations,
            residual: robin_residual,
        });
    }
    build_solution(*params, phi_s, core, core.boundary_mismatch.max(robin_residual), opts)
}

/// Dispatches to [`solve_exact_with`] or [`solve_stern_with`] on `stern_delta`.
pub fn solve(params: &ProblemParams, opts: SolveOptions) -> Result<CcpbSolution> {
    if params.stern_delta > 0.0 {
        solve_stern_with(params, opts)
    } else {
        solve_exact_with(params, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymptotic_trivial_and_limits() {
        let a = solve_asymptotic(&ProblemParams::new(10.0, 0.0).unwrap()).unwrap();
        assert_eq!(a.alpha_tilde, 1.0);
        assert_eq!(a.eps_tilde, 0.0);
        assert_eq!(a.predicted_error, 0.0);
        let far = solve_asymptotic(&ProblemParams::new(1e6, 3.0).unwrap()).unwrap();
        assert!((far.alpha_tilde - 1.0).abs() < 1e-5);
        assert_eq!(far.eps_tilde, 0.0);
        assert!(far.ln_eps_tilde.is_finite());
        assert!(solve_asymptotic(&ProblemParams::with_stern(10.0, 1.0, 0.1).unwrap()).is_err());
    }

    #[test]
    fn asymptotic_closed_form_values() {
        // V = 10, L = 100: r = 4 sinh²(2.5)/100.
        let a = solve_asymptotic(&ProblemParams::new(100.0, 10.0).unwrap()).unwrap();
        let r = 4.0 * 2.5f64.sinh().powi(2) / 100.0;
        let sa = (1.0 + r * r).sqrt() - r;
        assert!((a.alpha_tilde.sqrt() - sa).abs() < 1e-14);
        let e = 4.0 * (-100.0 * sa / 2.0).exp() * 2.5f64.tanh();
        assert!((a.eps_tilde / e - 1.0).abs() < 1e-12);
        assert!(a.alpha_tilde > 0.0 && a.alpha_tilde <= 1.0);
    }

    #[test]
    fn x_approx_basics() {
        let a = solve_asymptotic(&ProblemParams::new(15.0, 5.0).unwrap()).unwrap();
        assert_eq!(x_approx(0.0, &a).unwrap(), 0.0);
        assert!((x_approx(-2.0, &a).unwrap() + x_approx(2.0, &a).unwrap()).abs() < 1e-15);
        assert!(matches!(x_approx(5.1, &a), Err(Error::Domain(_))));
        // ε̃ is chosen so that the outer branch meets the wall exactly.
        assert!((x_approx(5.0, &a).unwrap() - 7.5).abs() <= 1e-13);
    }

    #[test]
    fn gouy_chapman_anchor_and_limit() {
        assert!((gouy_chapman_x(4.0, 4.0, 30.0).unwrap() - 15.0).abs() < 1e-14);
        assert_eq!(gouy_chapman_x(0.0, 4.0, 30.0).unwrap(), f64::NEG_INFINITY);
        assert!(gouy_chapman_x(-1.0, 4.0, 30.0).is_err());
        // α̃ = 1 limit of x_approx coincides with Gouy-Chapman on the outer branch.
        let l = 2000.0;
        let a = solve_asymptotic(&ProblemParams::new(l, 3.0).unwrap()).unwrap();
        let a1 = AsymptoticSolution {
            alpha_tilde: 1.0,
            ln_eps_tilde: 4f64.ln() - 0.5 * l + ln_tanh(0.75),
            ..a
        };
        for &p in &[0.1, 1.0, 2.9] {
            let gc = gouy_chapman_x(p, 3.0, l).unwrap();
            assert!((x_approx(p, &a1).unwrap() - gc).abs() < 1e-10);
        }
    }

    #[test]
    fn gouy_chapman_finite_correction() {
        // Expanding 1/√α̃ = 1 + r + O(r²) in the outer branch gives
        // x_approx(φ) − x_GC(φ) = r ln(tanh(φ/4)/tanh(V/4)) + O(r²).
        let (v, l) = (4.0f64, 400.0);
        let a = solve_asymptotic(&ProblemParams::new(l, v).unwrap()).unwrap();
        let r = correction_ratio(v, l);
        for &p in &[0.5f64, 1.5, 3.0] {
            let diff = x_approx(p, &a).unwrap() - gouy_chapman_x(p, v, l).unwrap();
            let lead = r * (ln_tanh(p / 4.0) - ln_tanh(v / 4.0));
            assert!((diff - lead).abs() < 20.0 * r * r, "phi={p}: {diff} vs {lead}");
        }
    }

    #[test]
    fn concentrations_identity() {
        assert_eq!(concentrations(0.0, 0.7).unwrap(), (0.7, 0.7));
        let (p, n) = concentrations(3.0, 1.0).unwrap();
        assert!((p - (-3f64).exp()).abs() < 1e-16 && (n - 3f64.exp()).abs() < 1e-13);
        assert!(concentrations(1.0, 0.0).is_err());
    }

    #[test]
    fn sqrt_alpha_large_eps_limit() {
        // ε ≫ sinh(V/2): the integral tends to sinh(V)/ε.
        let (v, l, e) = (1.0f64, 3.0, 1e4);
        let sa = sqrt_alpha_of_eps(v, l, Eps::new(e).unwrap(), 1e-12).unwrap();
        let limit = l * e / v.sinh();
        assert!((sa / limit - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sqrt_alpha_dual_quadrature() {
        // Raw-variable composite Simpson with a graded mesh as the second route.
        let (v, e) = (1.0f64, 0.01f64);
        let f = |p: f64| p.cosh() / ((0.5 * p).sinh().powi(2) + e * e).sqrt();
        let mut edges = vec![0.0];
        let mut h = e * 1e-3;
        while edges.last().unwrap() + h < v {
            let next = edges.last().unwrap() + h;
            edges.push(next);
            h = (h * 1.01).min(2e-4);
        }
        edges.push(v);
        let mut j = 0.0;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let m = 0.5 * (a + b);
            j += (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
        }
        let sa = sqrt_alpha_of_eps(v, 1.0, Eps::new(e).unwrap(), 1e-13).unwrap();
        assert!((sa - 1.0 / j).abs() < 1e-10, "{sa} vs {}", 1.0 / j);
    }

    #[test]
    fn exact_solution_invariants() {
        let p = ProblemParams::new(15.0, 5.0).unwrap();
        let s = solve_exact(&p, 1e-10).unwrap();
        assert!(s.residual <= 1e-10);
        assert_eq!(s.samples[0], ProfileSample { phi: 0.0, x: 0.0 });
        let last = s.samples.last().unwrap();
        assert_eq!(last.x, 7.5);
        assert_eq!(last.phi, 5.0);
        assert!(s.samples.windows(2).all(|w| w[1].phi > w[0].phi && w[1].x > w[0].x));
        assert!((s.phi_x0 - 2.0 * s.alpha.sqrt() * s.eps).abs() <= 1e-15 * s.phi_x0.abs());
        // Close to the closed form in the large-domain regime.
        let a = solve_asymptotic(&p).unwrap();
        assert!((s.eps / a.eps_tilde - 1.0).abs() < 3.0 * a.eps_tilde);
        assert!((s.alpha.sqrt() - a.alpha_tilde.sqrt()).abs() < 3.0 * a.eps_tilde);
    }

    #[test]
    fn confined_domain_has_order_one_center_field() {
        let s = solve_exact(&ProblemParams::new(15.0, 6.0).unwrap(), 1e-10).unwrap();
        assert!(s.phi_x0 > 0.1, "phi_x(0) = {}", s.phi_x0);
    }

    #[test]
    fn negative_voltage_is_odd_image() {
        let pos = solve_exact(&ProblemParams::new(12.0, 3.0).unwrap(), 1e-10).unwrap();
        let neg = solve_exact(&ProblemParams::new(12.0, -3.0).unwrap(), 1e-10).unwrap();
        assert_eq!(pos.alpha, neg.alpha);
        assert_eq!(pos.phi_x0, -neg.phi_x0);
        for (a, b) in pos.samples.iter().zip(&neg.samples) {
            assert_eq!(a.phi, -b.phi);
            assert_eq!(a.x, b.x);
        }
        for &x in &[-5.0, 0.3, 4.0] {
            assert!((pos.phi_of_x(x).unwrap() + neg.phi_of_x(x).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn trivial_voltage() {
        let s = solve_exact(&ProblemParams::new(10.0, 0.0).unwrap(), 1e-10).unwrap();
        assert!(s.is_trivial());
        assert_eq!(s.alpha, 1.0);
        assert_eq!(s.phi_of_x(3.0).unwrap(), 0.0);
    }

    #[test]
    fn phi_of_x_round_trip() {
        let s = solve_exact(&ProblemParams::new(20.0, 7.0).unwrap(), 1e-10).unwrap();
        assert_eq!(s.phi_of_x(0.0).unwrap(), 0.0);
        assert!((s.phi_of_x(10.0).unwrap() - 7.0).abs() < 1e-12);
        for k in 0..100 {
            let x = -10.0 + 20.0 * (k as f64 + 0.5) / 100.0;
            let phi = s.phi_of_x(x).unwrap();
            let back = s.x_of_phi(phi).unwrap();
            assert!((back - x).abs() < 1e-8, "x={x}: back {back}");
        }
        assert!(s.phi_of_x(10.5).is_err());
        assert!(s.x_of_phi(7.5).is_err());
    }

    #[test]
    fn stern_reduces_to_dirichlet() {
        let p0 = ProblemParams::new(20.0, 4.0).unwrap();
        let a = solve_exact(&p0, 1e-10).unwrap();
        let b = solve_stern(&p0, 1e-10).unwrap();
        assert_eq!(a.alpha, b.alpha);
        assert_eq!(a.eps, b.eps);
    }

    #[test]
    fn stern_boundary_condition_holds() {
        let p = ProblemParams::with_stern(50.0, 10.0, 0.05).unwrap();
        let s = solve_stern(&p, 1e-10).unwrap();
        assert!(s.phi_boundary < 10.0 && s.phi_boundary > 0.0);
        let field = s.slope_at_phi(s.phi_boundary);
        assert!((s.phi_boundary + 0.05 * field - 10.0).abs() < 1e-8);
        // Thick Stern layers take up nearly all of the voltage.
        let thick = solve_stern(&ProblemParams::with_stern(50.0, 10.0, 1e4).unwrap(), 1e-10).unwrap();
        assert!(thick.phi_boundary < 0.01);
    }

    #[test]
    fn infinite_profile_with_stern() {
        let inf = InfiniteProfile::new(6.0, 0.0).unwrap();
        assert!((inf.phi_at_distance(0.0) - 6.0).abs() < 1e-12);
        let st = InfiniteProfile::new(6.0, 0.05).unwrap();
        let p = st.phi_wall;
        assert!((p + 0.1 * (0.5 * p).sinh() - 6.0).abs() < 1e-12);
        assert!(st.phi_at_distance(1.0) < inf.phi_at_distance(1.0));
    }
}
