//! Adaptive Simpson quadrature for the diagnostic (non-certified) scheme.

use crate::bounds::Interval;
use crate::error::Result;
use crate::func::Fn1D;

const MAX_DEPTH: u32 = 48;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integral and evaluation count. The tolerance is absolute and is split
/// evenly between halves on each refinement.
pub fn adaptive_simpson(f: &Fn1D, iv: Interval, tol: f64) -> Result<(f64, usize)> {
    let (a, b) = (iv.lo(), iv.hi());
    let fa = f.eval(a)?;
    let fm = f.eval(iv.midpoint())?;
    let fb = f.eval(b)?;
    let mut evals = 3;
    let panel = Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(a, b, fa, fm, fb),
    };
    let value = refine(f, panel, tol, MAX_DEPTH, &mut evals)?;
    Ok((value, evals))
}

fn refine(f: &Fn1D, p: Panel, tol: f64, depth: u32, evals: &mut usize) -> Result<f64> {
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let flm = f.eval(lm)?;
    let frm = f.eval(rm)?;
    *evals += 2;
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    let l = Panel {
        a: p.a,
        b: m,
        fa: p.fa,
        fm: flm,
        fb: p.fm,
        whole: left,
    };
    let r = Panel {
        a: m,
        b: p.b,
        fa: p.fm,
        fm: frm,
        fb: p.fb,
        whole: right,
    };
    Ok(refine(f, l, 0.5 * tol, depth - 1, evals)? + refine(f, r, 0.5 * tol, depth - 1, evals)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_and_kinked_functions() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let (v, _) = adaptive_simpson(&Fn1D::new(f64::exp), iv, 1e-12).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-11);

        let (v, evals) = adaptive_simpson(&Fn1D::new(|t: f64| (t - 0.3).abs()), iv, 1e-12).unwrap();
        assert!((v - (0.5 * 0.09 + 0.5 * 0.49)).abs() < 1e-11);
        assert!(evals > 5);

        let (v, evals) = adaptive_simpson(&Fn1D::new(|t| t * t * t), iv, 1e-10).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        assert_eq!(evals, 5);
    }
}
