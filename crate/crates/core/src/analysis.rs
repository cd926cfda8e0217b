//! Finite-domain effects: regime classification, boundary curves, screening
//! length inflation and comparison against the infinite-domain profile.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{brent, RootOptions};
use crate::solver::{solve_asymptotic, x_approx, CcpbSolution, InfiniteProfile, ProblemParams};

pub use crate::solver::{correction_ratio, predicted_error};

/// Parameter regime of a finite-domain steady state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// No electroneutral bulk.
    #[serde(rename = "A_confined")]
    Confined,
    /// Electroneutral bulk, finite-domain effects visible near the walls.
    #[serde(rename = "B_intermediate")]
    Intermediate,
    /// Finite-domain effects negligible.
    #[serde(rename = "C_effectively_infinite")]
    EffectivelyInfinite,
}

impl Regime {
    pub fn code(self) -> &'static str {
        match self {
            Regime::Confined => "A_confined",
            Regime::Intermediate => "B_intermediate",
            Regime::EffectivelyInfinite => "C_effectively_infinite",
        }
    }

    fn from_criteria(confined_measure: f64, infinite_measure: f64, tol: f64) -> Self {
        if confined_measure >= tol {
            Regime::Confined
        } else if infinite_measure <= tol {
            Regime::EffectivelyInfinite
        } else {
            Regime::Intermediate
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Classification together with both criterion values.
///
/// For the analytic criteria `e_value` is the predicted error and
/// `ratio_value` is `4 sinh²(V/4)/L`; for the generalized criteria they are
/// `|φ_x(0)|` and the profile deviation measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub label: Regime,
    pub e_value: f64,
    pub ratio_value: f64,
    pub tol: f64,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tol must lie in (0, 1), got {tol}")))
    }
}

pub fn classify_regime(voltage: f64, length: f64, tol: f64) -> Result<RegimeReport> {
    ProblemParams::new(length, voltage)?;
    check_tol(tol)?;
    let e_value = predicted_error(voltage, length);
    let ratio_value = correction_ratio(voltage, length);
    Ok(RegimeReport {
        label: Regime::from_criteria(e_value, ratio_value, tol),
        e_value,
        ratio_value,
        tol,
    })
}

/// Domain sizes separating the regimes at one voltage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeBoundary {
    pub voltage: f64,
    /// Solves `E(V, L) = tol`; below it the domain is confined. Non-positive
    /// (or `-inf` at V = 0) when no L > 0 is confined.
    pub l_ab: f64,
    /// Solves `4 sinh²(V/4)/L = tol`.
    pub l_bc: f64,
}

pub fn regime_boundary(voltage: f64, tol: f64) -> Result<RegimeBoundary> {
    check_tol(tol)?;
    if !voltage.is_finite() {
        return Err(Error::InvalidArgument(format!("V must be finite, got {voltage}")));
    }
    let s = (0.25 * voltage).sinh();
    let s2 = s * s;
    Ok(RegimeBoundary {
        voltage,
        l_ab: 4.0 * s2 + 2.0 * (2.0 * (0.25 * voltage.abs()).tanh() / tol).ln(),
        l_bc: 4.0 * s2 / tol,
    })
}

pub fn regime_boundaries(voltages: &[f64], tol: f64) -> Result<Vec<RegimeBoundary>> {
    voltages.iter().map(|&v| regime_boundary(v, tol)).collect()
}

/// `L_AB` by root-finding on `ln E(V, L) − ln tol`, independent of the closed form.
pub fn l_ab_numeric(voltage: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let f = |l: f64| Ok(predicted_error(voltage, l).ln() - tol.ln());
    let span = 4.0 * (0.25 * voltage).sinh().powi(2) + 100.0;
    Ok(brent(f, -span, span, RootOptions::default())?.x)
}

/// Sup-norm error of the closed-form inverse profile against an exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileError {
    pub sup: f64,
    pub argmax: f64,
    pub predicted: f64,
}

/// `sup_φ |x_exact(φ) − x_approx(φ)|` over `0 ≤ φ ≤ V` on a uniform grid of
/// `points` nodes, refined geometrically near 0 and on both sides of the
/// branch switch at `√ε̃`.
pub fn explicit_solution_error(sol: &CcpbSolution, points: usize) -> Result<ProfileError> {
    let params = sol.params;
    if params.stern_delta > 0.0 {
        return Err(Error::InvalidArgument(
            "closed-form profile needs stern_delta = 0".into(),
        ));
    }
    let asym = solve_asymptotic(&params)?;
    let predicted = asym.predicted_error;
    if sol.is_trivial() {
        return Ok(ProfileError {
            sup: 0.0,
            argmax: 0.0,
            predicted,
        });
    }
    let v = params.voltage.abs();
    let points = points.max(2);
    let mut phis: Vec<f64> = (0..points).map(|k| v * k as f64 / (points - 1) as f64).collect();
    let ln_lo = asym.ln_eps_tilde - 2.0;
    let n_geo = points / 4;
    for k in 0..=n_geo {
        let p = (ln_lo + (v.ln() - ln_lo) * k as f64 / n_geo.max(1) as f64).exp();
        if p > 0.0 && p < v {
            phis.push(p);
        }
    }
    let eta = (0.5 * asym.ln_eps_tilde).exp();
    if eta < v {
        phis.push(eta);
        phis.push((eta * (1.0 + 1e-12)).min(v));
    }
    let signed = params.voltage.signum();
    let mut best = ProfileError {
        sup: 0.0,
        argmax: 0.0,
        predicted,
    };
    for p in phis {
        let phi = signed * p;
        let d = (sol.x_of_phi(phi)? - x_approx(phi, &asym)?).abs();
        if d > best.sup {
            best.sup = d;
            best.argmax = phi;
        }
    }
    Ok(best)
}

/// Screening length and its inflation over the half-space value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreeningResult {
    /// `x(V) − x(V/e)` in Debye lengths.
    pub lambda_s: f64,
    /// `λ_s(L) / λ_s(∞)`.
    pub ratio_to_infinite: f64,
    pub alpha_used: f64,
}

/// Half-space screening length `ln(tanh(V/4) / tanh(V/(4e)))`; tends to 1
/// as V → 0.
pub fn infinite_screening_length(voltage: f64) -> f64 {
    let v = voltage.abs();
    if v == 0.0 {
        return 1.0;
    }
    let a = 0.25 * v;
    let b = a / std::f64::consts::E;
    (a.tanh() / b.tanh()).ln()
}

pub fn screening_length(sol: &CcpbSolution) -> Result<ScreeningResult> {
    let v = sol.params.voltage;
    if sol.params.stern_delta > 0.0 || sol.phi_boundary != v {
        return Err(Error::InvalidArgument(
            "screening length needs a Dirichlet solution with phi(L/2) = V".into(),
        ));
    }
    if sol.is_trivial() {
        return Ok(ScreeningResult {
            lambda_s: 1.0,
            ratio_to_infinite: 1.0,
            alpha_used: sol.alpha,
        });
    }
    let lambda_s = (sol.x_of_phi(v)? - sol.x_of_phi(v / std::f64::consts::E)?).abs();
    Ok(ScreeningResult {
        lambda_s,
        ratio_to_infinite: lambda_s / infinite_screening_length(v),
        alpha_used: sol.alpha,
    })
}

/// Distance between a finite-domain profile and the half-space profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeviationMeasure {
    /// `sup |φ(x; L) − φ_∞(L/2 − x)|` over `x ∈ [L/2 − width, L/2]`.
    BoundaryWindow { width: f64, points: usize },
    /// `|φ(0; L) − φ_∞(L/2)|`: the half-space profile anchored at the wall,
    /// evaluated at the domain center.
    CenterPoint,
}

impl Default for DeviationMeasure {
    fn default() -> Self {
        DeviationMeasure::BoundaryWindow {
            width: 10.0,
            points: 201,
        }
    }
}

pub fn profile_deviation(sol: &CcpbSolution, inf: &InfiniteProfile, measure: DeviationMeasure) -> Result<f64> {
    let half = 0.5 * sol.params.length;
    match measure {
        DeviationMeasure::CenterPoint => Ok((sol.phi_of_x(0.0)? - inf.phi_at_distance(half)).abs()),
        DeviationMeasure::BoundaryWindow { width, points } => {
            if !(width > 0.0) || points < 2 {
                return Err(Error::InvalidArgument(
                    "window needs positive width and >= 2 points".into(),
                ));
            }
            let lo = (half - width).max(0.0);
            let mut sup = 0.0f64;
            for k in 0..points {
                let x = lo + (half - lo) * k as f64 / (points - 1) as f64;
                let d = (sol.phi_of_x(x)? - inf.phi_at_distance(half - x)).abs();
                sup = sup.max(d);
            }
            Ok(sup)
        }
    }
}

/// Model-agnostic classification from computed profiles: A when
/// `|φ_x(0)| ≥ tol`, C when the deviation from the half-space profile is at
/// most tol, B otherwise.
pub fn generalized_criteria(
    sol: &CcpbSolution,
    inf: &InfiniteProfile,
    tol: f64,
    measure: DeviationMeasure,
) -> Result<RegimeReport> {
    check_tol(tol)?;
    let e_value = sol.phi_x0.abs();
    let ratio_value = profile_deviation(sol, inf, measure)?;
    Ok(RegimeReport {
        label: Regime::from_criteria(e_value, ratio_value, tol),
        e_value,
        ratio_value,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve, solve_exact, SolveOptions};

    #[test]
    fn predicted_error_examples() {
        assert_eq!(predicted_error(0.0, 10.0), 0.0);
        assert!(predicted_error(6.0, 15.0) >= 1.0);
        assert!(predicted_error(5.0, 20.0) < predicted_error(5.0, 15.0));
        assert!(predicted_error(-6.0, 20.0) > predicted_error(5.0, 20.0));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_regime(6.0, 15.0, 0.05).unwrap().label, Regime::Confined);
        let r = classify_regime(6.0, 100.0, 0.05).unwrap();
        assert_eq!(r.label, Regime::Intermediate);
        assert!((r.ratio_value - 0.181353).abs() < 1e-6);
        assert_eq!(
            classify_regime(1e-6, 1.0, 0.05).unwrap().label,
            Regime::EffectivelyInfinite
        );
        assert!(classify_regime(1.0, 10.0, 1.5).is_err());
        assert!(classify_regime(1.0, -1.0, 0.5).is_err());
    }

    #[test]
    fn labels_are_monotone_in_length() {
        let rank = |r: Regime| match r {
            Regime::Confined => 0,
            Regime::Intermediate => 1,
            Regime::EffectivelyInfinite => 2,
        };
        for k in 0..40 {
            let v = 0.25 * k as f64;
            let mut prev = 0;
            for j in 0..200 {
                let l = 0.5 * 1.05f64.powi(j);
                let now = rank(classify_regime(v, l, 0.05).unwrap().label);
                assert!(now >= prev, "V={v} L={l}");
                prev = now;
            }
        }
    }

    #[test]
    fn boundaries_closed_form_matches_root() {
        for &v in &[1.0, 2.0, 5.0, 10.0] {
            let b = regime_boundary(v, 0.05).unwrap();
            assert!((b.l_ab - l_ab_numeric(v, 0.05).unwrap()).abs() < 1e-10);
            assert!((predicted_error(v, b.l_ab) - 0.05).abs() < 1e-12);
        }
        let b = regime_boundary(2.0, 0.05).unwrap();
        assert_eq!(b.l_bc, 4.0 * 0.5f64.sinh().powi(2) / 0.05);
        assert_eq!(regime_boundary(0.0, 0.05).unwrap().l_ab, f64::NEG_INFINITY);
    }

    #[test]
    fn explicit_error_trivial_and_small() {
        let s = solve_exact(&ProblemParams::new(10.0, 0.0).unwrap(), 1e-10).unwrap();
        assert_eq!(explicit_solution_error(&s, 100).unwrap().sup, 0.0);
        let s = solve_exact(&ProblemParams::new(40.0, 5.0).unwrap(), 1e-12).unwrap();
        let e = explicit_solution_error(&s, 2000).unwrap();
        assert!(e.sup < 2.0 * e.predicted && e.sup > 0.5 * e.predicted);
    }

    #[test]
    fn screening_limits() {
        assert!((infinite_screening_length(1e-8) - 1.0).abs() < 1e-12);
        let t = solve_exact(&ProblemParams::new(10.0, 0.0).unwrap(), 1e-10).unwrap();
        assert_eq!(screening_length(&t).unwrap().ratio_to_infinite, 1.0);
        let mut prev = f64::INFINITY;
        for &l in &[20.0, 100.0, 300.0] {
            let s = solve_exact(&ProblemParams::new(l, 10.0).unwrap(), 1e-10).unwrap();
            let r = screening_length(&s).unwrap();
            assert!(r.ratio_to_infinite > 1.0 && r.ratio_to_infinite < prev);
            prev = r.ratio_to_infinite;
        }
    }

    #[test]
    fn generalized_trivial_and_stern_shift() {
        let t = solve_exact(&ProblemParams::new(20.0, 0.0).unwrap(), 1e-10).unwrap();
        let inf = InfiniteProfile::new(0.0, 0.0).unwrap();
        let r = generalized_criteria(&t, &inf, 0.05, DeviationMeasure::default()).unwrap();
        assert_eq!(r.label, Regime::EffectivelyInfinite);
        // A Stern layer absorbs voltage, so the same (V, L) looks less confined.
        let p0 = ProblemParams::new(15.0, 6.0).unwrap();
        let p1 = ProblemParams::with_stern(15.0, 6.0, 0.05).unwrap();
        let s0 = solve(&p0, SolveOptions::default()).unwrap();
        let s1 = solve(&p1, SolveOptions::default()).unwrap();
        assert!(s1.phi_x0 < s0.phi_x0);
        let c0 = generalized_criteria(
            &s0,
            &InfiniteProfile::new(6.0, 0.0).unwrap(),
            0.05,
            DeviationMeasure::CenterPoint,
        )
        .unwrap();
        assert_eq!(c0.label, Regime::Confined);
    }
}
