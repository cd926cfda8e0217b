//! Finite-difference reference solver for the nonlocal boundary value problem
//!
//! ```text
//! φ'' = α sinh φ,    α (1/L) ∫ e^φ dx = 1,    φ(±L/2) ± δ φ'(±L/2) = ±V
//! ```
//!
//! discretized on a wall-clustered grid and solved by damped Newton on the
//! joint unknowns `(φ_0, …, φ_{n−1}, α)`. It shares no code with the
//! quadrature-based inverse solver and serves as a cross-check for it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{brent, RootOptions};
use crate::solver::{InfiniteProfile, ProblemParams};

/// Tuning knobs for [`solve_fd_oracle_with`].
#[derive(Debug, Clone, Copy)]
pub struct FdOptions {
    /// Grid spacing at the walls; `None` picks one from the wall field
    /// strength of the half-space profile.
    pub wall_spacing: Option<f64>,
    /// Convergence threshold on the row-scaled residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self {
            wall_spacing: None,
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// Converged grid solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSolution {
    pub params: ProblemParams,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub alpha: f64,
    /// Max row-scaled residual of the final iterate.
    pub newton_residual: f64,
    pub iterations: usize,
}

impl GridSolution {
    fn trapezoid(&self, f: impl Fn(f64) -> f64) -> f64 {
        let vals: Vec<f64> = self.phi.iter().map(|&p| f(p)).collect();
        trapezoid(&self.x, &vals) / self.params.length
    }

    /// Discrete mean of `p = α e^{−φ}`.
    pub fn mean_p(&self) -> f64 {
        self.trapezoid(|p| self.alpha * (-p).exp())
    }

    /// Discrete mean of `n = α e^{φ}`.
    pub fn mean_n(&self) -> f64 {
        self.trapezoid(|p| self.alpha * p.exp())
    }

    /// Centered-difference slope at the middle node.
    pub fn phi_x0(&self) -> f64 {
        let c = self.x.len() / 2;
        (self.phi[c + 1] - self.phi[c - 1]) / (self.x[c + 1] - self.x[c - 1])
    }

    pub fn phi_boundary(&self) -> f64 {
        *self.phi.last().unwrap()
    }
}

fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(xs, fs)| 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1]))
        .sum()
}

fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = x[i + 1] - x[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Default wall spacing: a small fraction of the distance over which the
/// half-space profile drops by one thermal unit at the wall.
fn default_wall_spacing(voltage: f64) -> f64 {
    0.01 / (0.5 * voltage.abs()).sinh().max(1.0)
}

/// Symmetric grid `x = sign(ξ) (L/2) (1 − sinh(κ(1 − |ξ|)) / sinh κ)` on a
/// uniform ξ-grid in `[−1, 1]`, with κ chosen to hit the requested wall
/// spacing; uniform when that spacing is not below `L/(n−1)`.
pub fn stretched_grid(length: f64, n_nodes: usize, wall_spacing: f64) -> Result<Vec<f64>> {
    let half = 0.5 * length;
    let uniform = length / (n_nodes - 1) as f64;
    let m = (n_nodes - 1) / 2;
    let xi = |k: usize| k as f64 / m as f64;
    if wall_spacing >= uniform {
        return Ok((0..n_nodes).map(|i| -half + uniform * i as f64).collect());
    }
    // Spacing at the wall is (L/2)(κ / sinh κ)/m to first order.
    let target = (wall_spacing / uniform).ln();
    let f = |k: f64| Ok((k / k.sinh()).ln() - target);
    let kappa = brent(f, 1e-6, 700.0, RootOptions::default())?.x;
    let map = |s: f64| half * (1.0 - (kappa * (1.0 - s)).sinh() / kappa.sinh());
    let mut right: Vec<f64> = (0..=m).map(|k| map(xi(k))).collect();
    right[0] = 0.0;
    right[m] = half;
    let mut x: Vec<f64> = right.iter().rev().map(|&v| -v).collect();
    x.extend_from_slice(&right[1..]);
    Ok(x)
}

/// Thomas algorithm for `a_i x_{i−1} + b_i x_i + c_i x_{i+1} = d_i`.
fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

struct Discretization<'a> {
    x: &'a [f64],
    weights: Vec<f64>,
    voltage: f64,
    delta: f64,
    length: f64,
}

/// Residuals and Jacobian pieces at one iterate.
struct Linearization {
    f: Vec<f64>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    /// ∂F/∂α.
    d_alpha: Vec<f64>,
    /// Constraint residual and its gradient.
    g: f64,
    g_phi: Vec<f64>,
    g_alpha: f64,
}

impl Linearization {
    fn scaled_residual(&self) -> f64 {
        let rows = self
            .f
            .iter()
            .zip(&self.diag)
            .map(|(f, d)| (f / d).abs())
            .fold(0.0, f64::max);
        rows.max(self.g.abs())
    }
}

impl Discretization<'_> {
    fn linearize(&self, phi: &[f64], alpha: f64) -> Linearization {
        let n = phi.len();
        let x = self.x;
        let mut out = Linearization {
            f: vec![0.0; n],
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            d_alpha: vec![0.0; n],
            g: 0.0,
            g_phi: vec![0.0; n],
            g_alpha: 0.0,
        };
        for i in 1..n - 1 {
            let hm = x[i] - x[i - 1];
            let hp = x[i + 1] - x[i];
            let s = 2.0 / (hm + hp);
            out.f[i] = s * ((phi[i + 1] - phi[i]) / hp - (phi[i] - phi[i - 1]) / hm) - alpha * phi[i].sinh();
            out.lower[i] = s / hm;
            out.upper[i] = s / hp;
            out.diag[i] = -s / hm - s / hp - alpha * phi[i].cosh();
            out.d_alpha[i] = -phi[i].sinh();
        }
        if self.delta == 0.0 {
            out.f[0] = phi[0] + self.voltage;
            out.diag[0] = 1.0;
            out.f[n - 1] = phi[n - 1] - self.voltage;
            out.diag[n - 1] = 1.0;
        } else {
            // Ghost node eliminated with the centered Robin condition.
            let d = self.delta;
            let h = x[n - 1] - x[n - 2];
            let hh = h * h;
            let p = phi[n - 1];
            out.f[n - 1] = (2.0 * phi[n - 2] - 2.0 * p + 2.0 * h * (self.voltage - p) / d) / hh - alpha * p.sinh();
            out.lower[n - 1] = 2.0 / hh;
            out.diag[n - 1] = -2.0 / hh - 2.0 / (h * d) - alpha * p.cosh();
            out.d_alpha[n - 1] = -p.sinh();
            let h = x[1] - x[0];
            let hh = h * h;
            let p = phi[0];
            out.f[0] = (2.0 * phi[1] - 2.0 * p + 2.0 * h * (-self.voltage - p) / d) / hh - alpha * p.sinh();
            out.upper[0] = 2.0 / hh;
            out.diag[0] = -2.0 / hh - 2.0 / (h * d) - alpha * p.cosh();
            out.d_alpha[0] = -p.sinh();
        }
        let mut mean = 0.0;
        for ((g, &p), &w) in out.g_phi.iter_mut().zip(phi).zip(&self.weights) {
            let e = p.exp() * w / self.length;
            mean += e;
            *g = alpha * e;
        }
        out.g = alpha * mean - 1.0;
        out.g_alpha = mean;
        out
    }
}

/// Reference grid solution with `n_nodes` nodes (odd, at least 101).
pub fn solve_fd_oracle(params: &ProblemParams, n_nodes: usize) -> Result<GridSolution> {
    solve_fd_oracle_with(params, n_nodes, FdOptions::default())
}

pub fn solve_fd_oracle_with(params: &ProblemParams, n_nodes: usize, opts: FdOptions) -> Result<GridSolution> {
    params.validate()?;
    if n_nodes < 101 || n_nodes.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "n_nodes must be odd and >= 101, got {n_nodes}"
        )));
    }
    let (l, v, delta) = (params.length, params.voltage, params.stern_delta);
    let h_wall = opts
        .wall_spacing
        .unwrap_or_else(|| default_wall_spacing(v).min(0.5 * delta.max(1.0)));
    if !(h_wall > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "wall spacing must be positive, got {h_wall}"
        )));
    }
    let x = stretched_grid(l, n_nodes, h_wall)?;
    if v == 0.0 {
        return Ok(GridSolution {
            params: *params,
            phi: vec![0.0; n_nodes],
            x,
            alpha: 1.0,
            newton_residual: 0.0,
            iterations: 0,
        });
    }

    // Superposed half-space profiles anchored at both walls.
    let inf = InfiniteProfile::new(v, delta)?;
    let half = 0.5 * l;
    let mut phi: Vec<f64> = x
        .iter()
        .map(|&xi| inf.phi_at_distance(half - xi) - inf.phi_at_distance(half + xi))
        .collect();
    if delta == 0.0 {
        phi[0] = -v;
        phi[n_nodes - 1] = v;
    }
    let disc = Discretization {
        weights: trapezoid_weights(&x),
        x: &x,
        voltage: v,
        delta,
        length: l,
    };
    let mean_e: f64 = phi.iter().zip(&disc.weights).map(|(p, w)| p.exp() * w).sum::<f64>() / l;
    let mut alpha = 1.0 / mean_e;

    let mut lin = disc.linearize(&phi, alpha);
    let mut residual = lin.scaled_residual();
    for iter in 0..opts.max_iter {
        let (d_phi, d_alpha) = lin.correction(&lin.f, lin.g);
        let size = step_size(&d_phi, d_alpha, alpha);
        if residual <= opts.tol && size <= 1e-9 {
            return Ok(GridSolution {
                params: *params,
                x,
                phi,
                alpha,
                newton_residual: residual,
                iterations: iter,
            });
        }
        // Natural-level damping: the simplified correction at the trial point,
        // computed with the current Jacobian, must shrink.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial_alpha = alpha + step * d_alpha;
            if trial_alpha > 0.0 {
                let trial: Vec<f64> = phi.iter().zip(&d_phi).map(|(p, d)| p + step * d).collect();
                let trial_lin = disc.linearize(&trial, trial_alpha);
                let (b_phi, b_alpha) = lin.correction(&trial_lin.f, trial_lin.g);
                let trial_size = step_size(&b_phi, b_alpha, trial_alpha);
                if trial_size.is_finite() && (trial_size <= (1.0 - 0.25 * step) * size || size <= 1e-13) {
                    accepted = Some((trial, trial_alpha, trial_lin));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((p, a, l)) => {
                phi = p;
                alpha = a;
                lin = l;
                residual = lin.scaled_residual();
            }
            None => {
                return Err(Error::NewtonDivergence {
                    iterations: iter,
                    residual,
                })
            }
        }
    }
    Err(Error::NewtonDivergence {
        iterations: opts.max_iter,
        residual,
    })
}

/// Max-norm of a Newton correction, with α measured relatively.
fn step_size(d_phi: &[f64], d_alpha: f64, alpha: f64) -> f64 {
    d_phi.iter().fold((d_alpha / alpha).abs(), |m, d| m.max(d.abs()))
}

impl Linearization {
    /// Solves the bordered system `[T b; gᵀ g_α] (Δφ, Δα) = −(f, g)`.
    fn correction(&self, f: &[f64], g: f64) -> (Vec<f64>, f64) {
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let y = solve_tridiagonal(&self.lower, &self.diag, &self.upper, &rhs);
        let z = solve_tridiagonal(&self.lower, &self.diag, &self.upper, &self.d_alpha);
        let gy: f64 = self.g_phi.iter().zip(&y).map(|(a, b)| a * b).sum();
        let gz: f64 = self.g_phi.iter().zip(&z).map(|(a, b)| a * b).sum();
        let d_alpha = (-g - gy) / (self.g_alpha - gz);
        let d_phi = y.iter().zip(&z).map(|(yi, zi)| yi - zi * d_alpha).collect();
        (d_phi, d_alpha)
    }
}
