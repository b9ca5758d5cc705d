//! One-dimensional composite midpoint and trapezoid bounds.
//!
//! For a convex `F` on `[lo, hi]` and a uniform partition with `n` cells the
//! composite midpoint sum is a lower bound and the composite trapezoid sum an
//! upper bound of the integral. Convexity is a precondition here; use
//! [`crate::convexity`] to check it on demand.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::func::Fn1D;

/// Roundoff allowance `1e-12 * max(1, |values|...)` used for orderings that
/// hold exactly over the reals.
pub fn tol_machine(values: &[f64]) -> f64 {
    1e-12 * values.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()))
}

/// A closed, non-degenerate interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!(
                "interval endpoints must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo >= hi {
            return Err(Error::Domain(format!(
                "interval must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }
}

/// Uniform partition `x_k = lo + k (hi - lo) / n`, `k = 0..=n`.
///
/// Every node is computed directly from its index, and `x_n` is `hi` itself,
/// so no accumulated drift can push a node outside the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partition1D {
    iv: Interval,
    n: usize,
}

impl Partition1D {
    pub fn new(iv: Interval, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "partition needs at least one cell".into(),
            ));
        }
        Ok(Self { iv, n })
    }

    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn interval(&self) -> Interval {
        self.iv
    }

    pub fn step(&self) -> f64 {
        self.iv.len() / self.n as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        debug_assert!(k <= self.n);
        if k == self.n {
            self.iv.hi
        } else {
            self.iv.lo + k as f64 * self.iv.len() / self.n as f64
        }
    }

    /// Midpoint of cell `k` for `k = 1..=n`, i.e. `(x_{k-1} + x_k) / 2`.
    pub fn cell_midpoint(&self, k: usize) -> f64 {
        debug_assert!(k >= 1 && k <= self.n);
        0.5 * (self.node(k - 1) + self.node(k))
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |k| self.node(k))
    }

    /// Interior nodes `x_1..x_{n-1}`.
    pub fn interior_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (1..self.n).map(move |k| self.node(k))
    }

    pub fn cell_midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n).map(move |k| self.cell_midpoint(k))
    }
}

/// A lower/upper enclosure of an integral together with its cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
    pub n: usize,
    pub evals: usize,
}

impl BoundPair {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    /// `lower <= upper` up to [`tol_machine`].
    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper + tol_machine(&[self.lower, self.upper])
    }

    /// Whether `value` lies inside the enclosure with an absolute slack `tol`.
    pub fn contains(&self, value: f64, tol: f64) -> bool {
        self.lower - tol <= value && value <= self.upper + tol
    }
}

/// `h * sum_k F((x_{k-1} + x_k) / 2)`; a lower bound of the integral for convex `F`.
pub fn midpoint_lower(f: &Fn1D, iv: Interval, n: usize) -> Result<f64> {
    let part = Partition1D::new(iv, n)?;
    let mut sum = 0.0;
    for t in part.cell_midpoints() {
        sum += f.eval(t)?;
    }
    Ok(part.step() * sum)
}

/// `(h / 2) [F(lo) + 2 sum_{k=1}^{n-1} F(x_k) + F(hi)]`; an upper bound of
/// the integral for convex `F`.
pub fn trapezoid_upper(f: &Fn1D, iv: Interval, n: usize) -> Result<f64> {
    let part = Partition1D::new(iv, n)?;
    let mut interior = 0.0;
    for t in part.interior_nodes() {
        interior += f.eval(t)?;
    }
    let ends = f.eval(iv.lo)? + f.eval(iv.hi)?;
    Ok(0.5 * part.step() * (ends + 2.0 * interior))
}

/// Both sides of the composite Hermite-Hadamard double inequality.
pub fn lemma1_bounds(f: &Fn1D, iv: Interval, n: usize) -> Result<BoundPair> {
    let lower = midpoint_lower(f, iv, n)?;
    let upper = trapezoid_upper(f, iv, n)?;
    Ok(BoundPair {
        lower,
        upper,
        n,
        evals: 2 * n + 1,
    })
}

/// Upper bound on `∫F - (hi - lo) F(t)` for a non-negative convex `F`.
///
/// The returned value is the composite trapezoid sum and does not depend on
/// `t`; `t` is still validated against the interval.
pub fn lemma2_upper(f: &Fn1D, iv: Interval, t: f64, n: usize) -> Result<f64> {
    if !iv.contains(t) {
        return Err(Error::Domain(format!(
            "t = {t} lies outside [{}, {}]",
            iv.lo, iv.hi
        )));
    }
    if !f.is_positive() {
        return Err(Error::Precondition(
            "lemma 2 bound requires a function flagged as non-negative".into(),
        ));
    }
    trapezoid_upper(f, iv, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn square() -> Fn1D {
        Fn1D::new(|t| t * t)
    }

    #[test]
    fn degenerate_intervals_are_rejected() {
        assert!(matches!(Interval::new(1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(Interval::new(2.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(Interval::new(0.0, f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(Interval::new(f64::NAN, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn last_node_is_exactly_hi() {
        let iv = Interval::new(0.1, 0.7).unwrap();
        for n in 1..200 {
            let p = Partition1D::new(iv, n).unwrap();
            assert_eq!(p.node(0), 0.1);
            assert_eq!(p.node(n), 0.7);
            let nodes: Vec<f64> = p.nodes().collect();
            assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(Partition1D::new(iv, 0).is_err());
    }

    #[test]
    fn midpoint_examples() {
        let id = Fn1D::new(|t| t);
        assert_relative_eq!(midpoint_lower(&id, unit(), 3).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(midpoint_lower(&square(), unit(), 1).unwrap(), 0.25);
        // (1/2)(1/16 + 9/16)
        let direct = 0.5 * (0.25f64.powi(2) + 0.75f64.powi(2));
        assert_eq!(direct, 0.3125);
        assert_eq!(midpoint_lower(&square(), unit(), 2).unwrap(), direct);
    }

    #[test]
    fn trapezoid_examples() {
        let id = Fn1D::new(|t| t);
        assert_relative_eq!(trapezoid_upper(&id, unit(), 5).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(trapezoid_upper(&square(), unit(), 1).unwrap(), 0.5);
        let direct = 0.25 * (0.0 + 2.0 * 0.25 + 1.0);
        assert_eq!(direct, 0.375);
        assert_eq!(trapezoid_upper(&square(), unit(), 2).unwrap(), direct);
    }

    #[test]
    fn lemma1_examples() {
        let b = lemma1_bounds(&square(), unit(), 2).unwrap();
        assert_eq!((b.lower, b.upper), (0.3125, 0.375));
        assert!(b.contains(1.0 / 3.0, 0.0));
        assert_eq!(b.evals, 5);

        let iv = Interval::new(-1.5, 2.5).unwrap();
        for n in [1, 2, 7] {
            let b = lemma1_bounds(&Fn1D::new(|_| 3.0), iv, n).unwrap();
            assert_relative_eq!(b.lower, 12.0, max_relative = 1e-15);
            assert_relative_eq!(b.upper, 12.0, max_relative = 1e-15);
        }

        let kink = Fn1D::new(|t: f64| (t - 0.5).abs());
        let b = lemma1_bounds(&kink, unit(), 2).unwrap();
        assert_eq!((b.lower, b.upper), (0.25, 0.25));
    }

    #[test]
    fn lemma2_examples() {
        let sq = square().with_positive(true);
        let v = lemma2_upper(&sq, unit(), 1.0, 1).unwrap();
        assert_eq!(v, 0.5);
        assert!(1.0 / 3.0 - 1.0 <= v);

        let v = lemma2_upper(&sq, unit(), 0.0, 2).unwrap();
        assert_eq!(v, 0.375);
        assert!(1.0 / 3.0 <= v);

        let one = Fn1D::new(|_| 1.0).with_positive(true);
        let iv = Interval::new(0.0, 2.0).unwrap();
        for t in [0.0, 0.3, 2.0] {
            let v = lemma2_upper(&one, iv, t, 1).unwrap();
            assert_eq!(v, 2.0);
            assert!(2.0 - 2.0 * 1.0 <= v);
        }
    }

    #[test]
    fn lemma2_rejects_bad_inputs() {
        let sq = square().with_positive(true);
        assert!(matches!(lemma2_upper(&sq, unit(), 1.5, 1), Err(Error::Domain(_))));
        assert!(matches!(
            lemma2_upper(&square(), unit(), 0.5, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn evaluation_failure_names_the_node() {
        let f = Fn1D::new(|t| 1.0 / (t - 0.25));
        match midpoint_lower(&f, unit(), 2) {
            Err(Error::Evaluation { at, .. }) => {
                assert_eq!(at, crate::error::Location::Point1D(0.25))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn affine_functions_are_integrated_exactly() {
        let iv = Interval::new(-0.3, 1.9).unwrap();
        let (alpha, beta) = (1.7, -0.4);
        let exact = 0.5 * alpha * (1.9f64.powi(2) - 0.09) + beta * iv.len();
        let f = Fn1D::new(move |t| alpha * t + beta);
        for n in 1..=40 {
            let b = lemma1_bounds(&f, iv, n).unwrap();
            assert_relative_eq!(b.lower, exact, max_relative = 1e-12);
            assert_relative_eq!(b.upper, exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn gap_ratio_tends_to_a_quarter() {
        let f = Fn1D::new(f64::exp);
        for n in [32, 64, 128] {
            let g1 = lemma1_bounds(&f, unit(), n).unwrap().gap();
            let g2 = lemma1_bounds(&f, unit(), 2 * n).unwrap().gap();
            let ratio = g2 / g1;
            assert!((0.2..=0.3).contains(&ratio), "n = {n}: ratio {ratio}");
        }
    }
}
