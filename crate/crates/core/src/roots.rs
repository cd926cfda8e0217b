//! Bracketed scalar root finding (Brent's method) and bracket expansion.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Absolute tolerance on the root location.
    pub xtol: f64,
    /// Stop as soon as `|f(x)| <= ftol`.
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            xtol: 1e-14,
            ftol: 0.0,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Brent's method on `[a, b]` given precomputed `fa = f(a)` and `fb = f(b)`
/// of opposite sign.
pub fn brent_with_values<F>(mut f: F, a: f64, fa: f64, b: f64, fb: f64, opts: RootOptions) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            fx: fa,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            fx: fb,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracketing(format!(
            "f({a:e}) = {fa:e} and f({b:e}) = {fb:e} have the same sign"
        )));
    }

    let (mut a, mut fa, mut b, mut fb) = (a, fa, b, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=opts.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * opts.xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb.abs() <= opts.ftol {
            return Ok(Root {
                x: b,
                fx: fb,
                iterations: iter,
            });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::RootNonConvergence {
        iterations: opts.max_iter,
        residual: fb.abs(),
    })
}

pub fn brent<F>(mut f: F, a: f64, b: f64, opts: RootOptions) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    brent_with_values(f, a, fa, b, fb, opts)
}

/// A sign-change bracket `[lo, hi]` with the function values at its ends.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub f_lo: f64,
    pub hi: f64,
    pub f_hi: f64,
}

/// Grows `[guess - step, guess + step]` geometrically until `f` changes sign,
/// never leaving `[min, max]`.
pub fn expand_bracket<F>(mut f: F, guess: f64, step: f64, min: f64, max: f64) -> Result<Bracket>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut lo = (guess - step).max(min);
    let mut hi = (guess + step).min(max);
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    let mut width = step;
    for _ in 0..100 {
        if f_lo.signum() != f_hi.signum() || f_lo == 0.0 || f_hi == 0.0 {
            return Ok(Bracket { lo, f_lo, hi, f_hi });
        }
        if lo <= min && hi >= max {
            break;
        }
        width *= 2.0;
        // Move the end that is "downhill" toward the root first.
        let toward_hi = f_hi.abs() < f_lo.abs();
        if (toward_hi && hi < max) || lo <= min {
            lo = hi;
            f_lo = f_hi;
            hi = (hi + width).min(max);
            f_hi = f(hi)?;
        } else {
            hi = lo;
            f_hi = f_lo;
            lo = (lo - width).max(min);
            f_lo = f(lo)?;
        }
    }
    Err(Error::Bracketing(format!(
        "no sign change in [{min:e}, {max:e}] around {guess:e}"
    )))
}
