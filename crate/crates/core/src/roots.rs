//! Scalar root finding and bounded maximisation.

use crate::error::{Error, Result};

/// Stopping rule for [`find_root`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Stop when `|f(x)| <= f_abs`.
    pub f_abs: f64,
    /// Stop when the bracket is narrower than `x_abs + x_rel * |x|`.
    pub x_abs: f64,
    pub x_rel: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            f_abs: 1e-10,
            x_abs: 0.0,
            x_rel: 4.0 * f64::EPSILON,
            max_iter: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Root of `f` on a sign-changing bracket `[lo, hi]`.
///
/// Regula falsi with the Illinois weight, falling back to bisection whenever
/// an interpolated step fails to halve the bracket.
///
/// ```
/// use orbit_commons::roots::{find_root, Tolerance};
/// let r = find_root(|x| x * x - 2.0, 0.0, 2.0, Tolerance::default()).unwrap();
/// assert!((r.x - 2f64.sqrt()).abs() < 1e-10);
/// ```
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::domain("function is NaN at a bracket end"));
    }
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { lo: a, hi: b });
    }
    // side of the last retained endpoint: -1 for a, +1 for b
    let mut side = 0i8;
    let mut width = b - a;
    for it in 1..=tol.max_iter {
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::domain(format!("function is NaN at {x:e}")));
        }
        if fx.abs() <= tol.f_abs {
            return Ok(Root { x, fx, iterations: it });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        let new_width = b - a;
        if new_width > 0.5 * width {
            // poor progress: force a bisection
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm.abs() <= tol.f_abs {
                return Ok(Root { x: m, fx: fm, iterations: it });
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
            side = 0;
        }
        width = b - a;
        let mid = 0.5 * (a + b);
        if width <= tol.x_abs + tol.x_rel * mid.abs() {
            let (x, fx) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
            return Ok(Root { x, fx, iterations: it });
        }
    }
    Err(Error::Convergence {
        what: "bracketed root".into(),
        iterations: tol.max_iter,
        last_change: b - a,
    })
}

/// Plain bisection to a bracket width of `x_tol`; returns the midpoint.
///
/// Used where `f` may be discontinuous and only the location of the sign
/// change matters.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        return Err(Error::NoBracket { lo, hi });
    }
    let neg_left = fa < 0.0;
    for _ in 0..300 {
        if (b - a).abs() <= x_tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == neg_left {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Doubles `hi` until `f(hi)` has the opposite sign of `f(lo)`.
pub fn expand_upper<F>(mut f: F, lo: f64, mut hi: f64, max_doublings: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let flo = f(lo);
    for _ in 0..max_doublings {
        let fhi = f(hi);
        if fhi.signum() != flo.signum() || fhi == 0.0 {
            return Ok(hi);
        }
        hi = lo + 2.0 * (hi - lo);
    }
    Err(Error::NoBracket { lo, hi })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximiser of `f` on `[lo, hi]` by golden-section search.
///
/// Returns `(x, f(x))`. Assumes unimodality inside the bracket.
pub fn golden_max<F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > x_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Vertex of the parabola through three points, if it opens downward.
pub fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<f64> {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d2 - d1) / (x[2] - x[0]);
    if !(curv < 0.0) || !curv.is_finite() {
        return None;
    }
    // derivative of the Newton form is zero at the vertex
    let v = 0.5 * (x[0] + x[1]) - d1 / (2.0 * curv);
    v.is_finite().then_some(v)
}

/// Maximiser of a possibly multimodal `f` on `[lo, hi]`.
///
/// Coarse scan over `n_scan + 1` points, golden section around the best
/// sample, then one parabolic refinement that is kept only if it improves.
pub fn scan_golden_max<F>(mut f: F, lo: f64, hi: f64, n_scan: usize, x_tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    if hi <= lo {
        return (lo, f(lo));
    }
    let n = n_scan.max(2);
    let h = (hi - lo) / n as f64;
    let mut best_i = 0;
    let mut best_f = f64::NEG_INFINITY;
    for i in 0..=n {
        let fx = f(lo + h * i as f64);
        if fx > best_f {
            best_f = fx;
            best_i = i;
        }
    }
    let a = lo + h * best_i.saturating_sub(1) as f64;
    let b = (lo + h * (best_i + 1) as f64).min(hi);
    let (mut x, mut fx) = golden_max(&mut f, a, b, x_tol);
    let x_best = lo + h * best_i as f64;
    if best_f > fx {
        x = x_best;
        fx = best_f;
    }
    let dx = x_tol.max(1e-3 * h);
    if x - dx >= lo && x + dx <= hi {
        let ys = [f(x - dx), fx, f(x + dx)];
        if let Some(v) = parabola_vertex([x - dx, x, x + dx], ys) {
            if (v - x).abs() <= dx && v >= lo && v <= hi {
                let fv = f(v);
                if fv > fx {
                    x = v;
                    fx = fv;
                }
            }
        }
    }
    (x, fx)
}

/// `n` points spaced evenly in log between `lo` and `hi` (both positive).
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}
