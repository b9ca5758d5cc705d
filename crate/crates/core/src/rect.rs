//! Inequality chains for coordinate-convex functions on a rectangle.
//!
//! Every bound expression contains one-dimensional integrals of partial
//! mappings `x -> f(x, y0)` or `y -> f(x0, y)`. How those are resolved is an
//! [`InnerScheme`]:
//!
//! * `NestedDiscrete(m)` replaces each inner integral by a composite midpoint
//!   or trapezoid sum, choosing the side that keeps the surrounding inequality
//!   true. A bound with partition parameter `n` refines each of its `n` cells
//!   into `m` subintervals, so inner sums use `n * m` subintervals. Results are
//!   certified up to floating-point roundoff.
//! * `Quadrature(tol)` uses adaptive Simpson. Its error is not one-sided, so
//!   reports produced with it are diagnostic only.
//!
//! The double integral appearing in the chains is always taken from the
//! Simpson reference in [`crate::oracle`].

use serde::Serialize;

use crate::bounds::{midpoint_lower, trapezoid_upper, tol_machine, BoundPair, Interval, Partition1D};
use crate::convexity::grid_minimum;
use crate::error::{Error, Result};
use crate::func::{Fn1D, Fn2D};
use crate::oracle::{reference_integral_2d, DEFAULT_GRID};
use crate::quadrature::adaptive_simpson;

/// Side length of the spot-check grid used for the positivity hypothesis.
pub const POSITIVITY_GRID: usize = 33;

/// The integration domain `[a, b] x [c, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Rect {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let x = Interval::new(a, b).map_err(|e| Error::Domain(format!("x side: {e}")))?;
        let y = Interval::new(c, d).map_err(|e| Error::Domain(format!("y side: {e}")))?;
        Ok(Self::from_sides(x, y))
    }

    pub fn from_sides(x: Interval, y: Interval) -> Self {
        Self {
            a: x.lo(),
            b: x.hi(),
            c: y.lo(),
            d: y.hi(),
        }
    }

    pub fn unit() -> Self {
        Self {
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn x_side(&self) -> Interval {
        Interval::new(self.a, self.b).expect("validated on construction")
    }

    pub fn y_side(&self) -> Interval {
        Interval::new(self.c, self.d).expect("validated on construction")
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.d - self.c
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.a + self.b), 0.5 * (self.c + self.d))
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// How inner one-dimensional integrals are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InnerScheme {
    NestedDiscrete { m: usize },
    Quadrature { tol: f64 },
}

impl Default for InnerScheme {
    fn default() -> Self {
        InnerScheme::NestedDiscrete { m: 16 }
    }
}

impl InnerScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InnerScheme::NestedDiscrete { m: 0 } => Err(Error::InvalidParameter(
                "nested scheme needs m >= 1".into(),
            )),
            InnerScheme::Quadrature { tol } if !(tol > 0.0 && tol.is_finite()) => Err(
                Error::InvalidParameter(format!("quadrature tolerance must be > 0, got {tol}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, InnerScheme::NestedDiscrete { .. })
    }

    pub fn label(&self) -> String {
        match *self {
            InnerScheme::NestedDiscrete { m } => format!("nested-discrete(m={m})"),
            InnerScheme::Quadrature { tol } => {
                format!("quadrature(tol={tol:e}): diagnostic, not certified")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Lower,
    Upper,
}

/// Resolves inner integrals for one bound computation and counts evaluations.
struct Inner {
    scheme: InnerScheme,
    cells: usize,
    evals: usize,
}

impl Inner {
    fn new(scheme: InnerScheme, cells: usize) -> Result<Self> {
        scheme.validate()?;
        if cells == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        Ok(Self {
            scheme,
            cells,
            evals: 0,
        })
    }

    fn integrate(&mut self, g: &Fn1D, iv: Interval, side: Side) -> Result<f64> {
        match self.scheme {
            InnerScheme::NestedDiscrete { m } => {
                let sub = self.cells * m;
                match side {
                    Side::Lower => {
                        self.evals += sub;
                        midpoint_lower(g, iv, sub)
                    }
                    Side::Upper => {
                        self.evals += sub + 1;
                        trapezoid_upper(g, iv, sub)
                    }
                }
            }
            InnerScheme::Quadrature { tol } => {
                let (v, evals) = adaptive_simpson(g, iv, tol)?;
                self.evals += evals;
                Ok(v)
            }
        }
    }

    /// `∫_a^b f(x, y) dx`
    fn along_x(&mut self, f: &Fn2D, r: &Rect, y: f64, side: Side) -> Result<f64> {
        self.integrate(&f.along_x(y), r.x_side(), side)
    }

    /// `∫_c^d f(x, y) dy`
    fn along_y(&mut self, f: &Fn2D, r: &Rect, x: f64, side: Side) -> Result<f64> {
        self.integrate(&f.along_y(x), r.y_side(), side)
    }

    fn point(&mut self, f: &Fn2D, x: f64, y: f64) -> Result<f64> {
        self.evals += 1;
        f.eval(x, y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainTerm {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingCheck {
    pub i: usize,
    pub j: usize,
    pub satisfied: bool,
    /// `value_j - value_i`
    pub slack: f64,
}

/// Ordered terms of an inequality chain with a verdict for each adjacent pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub terms: Vec<ChainTerm>,
    pub orderings: Vec<OrderingCheck>,
    pub tolerance: f64,
    pub scheme: String,
}

impl ChainReport {
    /// Builds the report with the default tolerance `1e-9 * max(1, max |term|)`.
    pub fn new(terms: Vec<ChainTerm>, scheme: String) -> Self {
        let scale = terms.iter().fold(1.0_f64, |acc, t| acc.max(t.value.abs()));
        Self::with_tolerance(terms, scheme, 1e-9 * scale)
    }

    pub fn with_tolerance(terms: Vec<ChainTerm>, scheme: String, tolerance: f64) -> Self {
        let orderings = terms
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let slack = w[1].value - w[0].value;
                OrderingCheck {
                    i,
                    j: i + 1,
                    satisfied: slack >= -tolerance,
                    slack,
                }
            })
            .collect();
        Self {
            terms,
            orderings,
            tolerance,
            scheme,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.value).collect()
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    pub fn all_satisfied(&self) -> bool {
        self.orderings.iter().all(|o| o.satisfied)
    }

    pub fn worst_slack(&self) -> f64 {
        self.orderings
            .iter()
            .map(|o| o.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

fn term(name: &str, value: f64) -> ChainTerm {
    ChainTerm {
        name: name.to_string(),
        value,
    }
}

/// Two sides of a single inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Sides {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// `lhs <= rhs + rel * max(1, |rhs|)`
    pub fn holds(&self, rel: f64) -> bool {
        self.lhs <= self.rhs + rel * self.rhs.abs().max(1.0)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    Ok(())
}

/// The lower and upper sides of the composite two-sided bound, unnormalised.
fn theorem3_sides(f: &Fn2D, r: &Rect, n: usize, inner: &mut Inner) -> Result<(f64, f64)> {
    check_n(n)?;
    let px = Partition1D::new(r.x_side(), n)?;
    let py = Partition1D::new(r.y_side(), n)?;
    let nf = n as f64;

    let mut mid_x = 0.0;
    for y in py.cell_midpoints() {
        mid_x += inner.along_x(f, r, y, Side::Lower)?;
    }
    let mut mid_y = 0.0;
    for x in px.cell_midpoints() {
        mid_y += inner.along_y(f, r, x, Side::Lower)?;
    }
    let lower = r.height() / (2.0 * nf) * mid_x + r.width() / (2.0 * nf) * mid_y;

    let edge_x = inner.along_x(f, r, r.c, Side::Upper)? + inner.along_x(f, r, r.d, Side::Upper)?;
    let edge_y = inner.along_y(f, r, r.a, Side::Upper)? + inner.along_y(f, r, r.b, Side::Upper)?;
    let mut node_x = 0.0;
    for y in py.interior_nodes() {
        node_x += inner.along_x(f, r, y, Side::Upper)?;
    }
    let mut node_y = 0.0;
    for x in px.interior_nodes() {
        node_y += inner.along_y(f, r, x, Side::Upper)?;
    }
    let upper = r.height() / (4.0 * nf) * edge_x
        + r.width() / (4.0 * nf) * edge_y
        + r.height() / (2.0 * nf) * node_x
        + r.width() / (2.0 * nf) * node_y;
    Ok((lower, upper))
}

fn default_reference(f: &Fn2D, r: Rect) -> Result<f64> {
    Ok(reference_integral_2d(f, r, DEFAULT_GRID)?.value)
}

/// Terms `(L_n, ∬f, U_n)` of the composite two-sided bound with `n` cells per axis.
pub fn theorem3_terms(f: &Fn2D, r: Rect, n: usize, scheme: InnerScheme) -> Result<ChainReport> {
    check_n(n)?;
    scheme.validate()?;
    let reference = default_reference(f, r)?;
    theorem3_terms_with_reference(f, r, n, scheme, reference)
}

/// As [`theorem3_terms`], with a precomputed value for the double integral.
pub fn theorem3_terms_with_reference(
    f: &Fn2D,
    r: Rect,
    n: usize,
    scheme: InnerScheme,
    reference: f64,
) -> Result<ChainReport> {
    let mut inner = Inner::new(scheme, n)?;
    let (lower, upper) = theorem3_sides(f, &r, n, &mut inner)?;
    Ok(ChainReport::new(
        vec![
            term("midline_lower", lower),
            term("double_integral", reference),
            term("boundary_upper", upper),
        ],
        scheme.label(),
    ))
}

/// Fully discrete enclosure of `∬f` built from point evaluations only.
///
/// Inner integrals of the lower side use midpoint sums and those of the upper
/// side trapezoid sums, each with `m` subintervals per partition cell.
pub fn theorem3_discrete_bounds(f: &Fn2D, r: Rect, n: usize, m: usize) -> Result<BoundPair> {
    let mut inner = Inner::new(InnerScheme::NestedDiscrete { m }, n)?;
    let (lower, upper) = theorem3_sides(f, &r, n, &mut inner)?;
    Ok(BoundPair {
        lower,
        upper,
        n,
        evals: inner.evals,
    })
}

/// Midline point sums against midline integrals.
pub fn theorem4_terms(f: &Fn2D, r: Rect, n: usize, scheme: InnerScheme) -> Result<Sides> {
    let mut inner = Inner::new(scheme, n)?;
    theorem4_with(f, &r, n, &mut inner)
}

fn theorem4_with(f: &Fn2D, r: &Rect, n: usize, inner: &mut Inner) -> Result<Sides> {
    let px = Partition1D::new(r.x_side(), n)?;
    let py = Partition1D::new(r.y_side(), n)?;
    let (cx, cy) = r.center();
    let nf = n as f64;

    let mut lhs = 0.0;
    for y in py.cell_midpoints() {
        lhs += inner.point(f, cx, y)?;
    }
    for x in px.cell_midpoints() {
        lhs += inner.point(f, x, cy)?;
    }
    let rhs = nf / r.height() * inner.along_y(f, r, cx, Side::Upper)?
        + nf / r.width() * inner.along_x(f, r, cy, Side::Upper)?;
    Ok(Sides { lhs, rhs })
}

/// Boundary integrals against boundary point sums.
pub fn theorem5_terms(f: &Fn2D, r: Rect, n: usize, scheme: InnerScheme) -> Result<Sides> {
    let mut inner = Inner::new(scheme, n)?;
    theorem5_with(f, &r, n, &mut inner)
}

fn theorem5_with(f: &Fn2D, r: &Rect, n: usize, inner: &mut Inner) -> Result<Sides> {
    let px = Partition1D::new(r.x_side(), n)?;
    let py = Partition1D::new(r.y_side(), n)?;
    let nf = n as f64;

    let lhs = nf / r.height()
        * (inner.along_y(f, r, r.a, Side::Lower)? + inner.along_y(f, r, r.b, Side::Lower)?)
        + nf / r.width()
            * (inner.along_x(f, r, r.c, Side::Lower)? + inner.along_x(f, r, r.d, Side::Lower)?);

    let mut rhs = inner.point(f, r.a, r.c)?
        + inner.point(f, r.a, r.d)?
        + inner.point(f, r.b, r.c)?
        + inner.point(f, r.b, r.d)?;
    for k in 1..n {
        let (x, y) = (px.node(k), py.node(k));
        rhs += inner.point(f, r.a, y)?
            + inner.point(f, r.b, y)?
            + inner.point(f, x, r.c)?
            + inner.point(f, x, r.d)?;
    }
    Ok(Sides { lhs, rhs })
}

/// Upper bound on `∬f` for a non-negative coordinate-convex `f`.
///
/// Requires `f.is_positive()`; additionally rejects any negative value on a
/// [`POSITIVITY_GRID`] x [`POSITIVITY_GRID`] spot-check grid.
pub fn theorem6_upper(f: &Fn2D, r: Rect, n: usize, scheme: InnerScheme) -> Result<f64> {
    let mut inner = Inner::new(scheme, n)?;
    if !f.is_positive() {
        return Err(Error::Precondition(
            "bound requires a function flagged as non-negative".into(),
        ));
    }
    let (min, (x, y)) = grid_minimum(f, r, POSITIVITY_GRID)?;
    if min < 0.0 {
        return Err(Error::Precondition(format!(
            "function is negative at ({x}, {y}): {min}"
        )));
    }

    let px = Partition1D::new(r.x_side(), n)?;
    let py = Partition1D::new(r.y_side(), n)?;
    let nf = n as f64;
    let edge_weight = nf + 1.0;

    let mut node_y = 0.0;
    for x in px.interior_nodes() {
        node_y += inner.along_y(f, &r, x, Side::Upper)?;
    }
    let y_part = edge_weight * inner.along_y(f, &r, r.a, Side::Upper)?
        + edge_weight * inner.along_y(f, &r, r.b, Side::Upper)?
        + 2.0 * node_y;

    let mut node_x = 0.0;
    for y in py.interior_nodes() {
        node_x += inner.along_x(f, &r, y, Side::Upper)?;
    }
    let x_part = edge_weight * inner.along_x(f, &r, r.c, Side::Upper)?
        + edge_weight * inner.along_x(f, &r, r.d, Side::Upper)?
        + 2.0 * node_x;

    Ok(r.width() / (4.0 * nf) * y_part + r.height() / (4.0 * nf) * x_part)
}

/// Terms shared by both classical five-term chains.
struct ChainHead {
    center: f64,
    midline_mean: f64,
    double_integral_mean: f64,
}

fn chain_head(f: &Fn2D, r: &Rect, inner: &mut Inner, reference: f64) -> Result<ChainHead> {
    let (cx, cy) = r.center();
    let center = inner.point(f, cx, cy)?;
    let midline_mean = 0.5
        * (inner.along_x(f, r, cy, Side::Lower)? / r.width()
            + inner.along_y(f, r, cx, Side::Lower)? / r.height());
    Ok(ChainHead {
        center,
        midline_mean,
        double_integral_mean: reference / r.area(),
    })
}

fn corners(f: &Fn2D, r: &Rect, inner: &mut Inner) -> Result<f64> {
    Ok(inner.point(f, r.a, r.c)?
        + inner.point(f, r.a, r.d)?
        + inner.point(f, r.b, r.c)?
        + inner.point(f, r.b, r.d)?)
}

/// The classical five-term chain of means, from the centre value to the
/// corner average.
pub fn dragomir_chain(f: &Fn2D, r: Rect, scheme: InnerScheme) -> Result<ChainReport> {
    scheme.validate()?;
    let reference = default_reference(f, r)?;
    dragomir_chain_with_reference(f, r, scheme, reference)
}

pub fn dragomir_chain_with_reference(
    f: &Fn2D,
    r: Rect,
    scheme: InnerScheme,
    reference: f64,
) -> Result<ChainReport> {
    let mut inner = Inner::new(scheme, 1)?;
    let head = chain_head(f, &r, &mut inner, reference)?;
    let boundary_mean = (inner.along_x(f, &r, r.c, Side::Upper)?
        + inner.along_x(f, &r, r.d, Side::Upper)?)
        / (4.0 * r.width())
        + (inner.along_y(f, &r, r.a, Side::Upper)? + inner.along_y(f, &r, r.b, Side::Upper)?)
            / (4.0 * r.height());
    let corner_mean = corners(f, &r, &mut inner)? / 4.0;
    Ok(ChainReport::new(
        vec![
            term("center", head.center),
            term("midline_mean", head.midline_mean),
            term("double_integral_mean", head.double_integral_mean),
            term("boundary_mean", boundary_mean),
            term("corner_mean", corner_mean),
        ],
        scheme.label(),
    ))
}

/// The refined chain whose last two terms also weigh the midlines and the
/// edge midpoints.
pub fn bakula_chain(f: &Fn2D, r: Rect, scheme: InnerScheme) -> Result<ChainReport> {
    scheme.validate()?;
    let reference = default_reference(f, r)?;
    bakula_chain_with_reference(f, r, scheme, reference)
}

pub fn bakula_chain_with_reference(
    f: &Fn2D,
    r: Rect,
    scheme: InnerScheme,
    reference: f64,
) -> Result<ChainReport> {
    let mut inner = Inner::new(scheme, 1)?;
    let head = chain_head(f, &r, &mut inner, reference)?;
    let (cx, cy) = r.center();

    let x_lines = inner.along_x(f, &r, r.c, Side::Upper)?
        + inner.along_x(f, &r, r.d, Side::Upper)?
        + 2.0 * inner.along_x(f, &r, cy, Side::Upper)?;
    let y_lines = inner.along_y(f, &r, r.a, Side::Upper)?
        + inner.along_y(f, &r, r.b, Side::Upper)?
        + 2.0 * inner.along_y(f, &r, cx, Side::Upper)?;
    let refined_boundary = x_lines / (8.0 * r.width()) + y_lines / (8.0 * r.height());

    let edge_mids = inner.point(f, cx, r.c)?
        + inner.point(f, cx, r.d)?
        + inner.point(f, r.a, cy)?
        + inner.point(f, r.b, cy)?;
    let refined_corner =
        corners(f, &r, &mut inner)? / 16.0 + head.center / 4.0 + edge_mids / 8.0;

    Ok(ChainReport::new(
        vec![
            term("center", head.center),
            term("midline_mean", head.midline_mean),
            term("double_integral_mean", head.double_integral_mean),
            term("refined_boundary_mean", refined_boundary),
            term("refined_corner_mean", refined_corner),
        ],
        scheme.label(),
    ))
}

/// Rebuilds the five classical chain terms from the `n = 1` instances of the
/// composite bound and the two single-inequality results.
///
/// Returns `[center, midline_mean, double_integral_mean, boundary_mean,
/// corner_mean]`, obtained respectively from half the midline point sum, the
/// normalised lower side, the normalised double integral, the normalised upper
/// side and a quarter of the corner sum.
pub fn recapture_classical_chain(
    f: &Fn2D,
    r: Rect,
    scheme: InnerScheme,
    reference: f64,
) -> Result<[f64; 5]> {
    let three = theorem3_terms_with_reference(f, r, 1, scheme, reference)?;
    let four = theorem4_terms(f, r, 1, scheme)?;
    let five = theorem5_terms(f, r, 1, scheme)?;
    let area = r.area();
    Ok([
        four.lhs / 2.0,
        three.terms[0].value / area,
        three.terms[1].value / area,
        three.terms[2].value / area,
        five.rhs / 4.0,
    ])
}

/// Whether two routes to the same quantity agree to `rel` relative error.
pub fn agrees(x: f64, y: f64, rel: f64) -> bool {
    x == y || (x - y).abs() <= rel * x.abs().max(y.abs())
}

/// Tolerance used by the chain tightening comparison.
pub fn tightening_tolerance(bakula: f64, dragomir: f64) -> f64 {
    tol_machine(&[bakula, dragomir])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const QUAD: InnerScheme = InnerScheme::Quadrature { tol: 1e-13 };

    fn xy() -> Fn2D {
        Fn2D::new(|x, y| x * y).with_positive(true)
    }

    fn sumsq() -> Fn2D {
        Fn2D::new(|x, y| x * x + y * y).with_positive(true)
    }

    #[test]
    fn rect_validation() {
        assert!(Rect::new(0.0, 1.0, 0.0, 1.0).is_ok());
        assert!(matches!(Rect::new(1.0, 1.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(Rect::new(0.0, 1.0, 2.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(Rect::new(0.0, f64::NAN, 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn scheme_validation() {
        assert!(InnerScheme::NestedDiscrete { m: 0 }.validate().is_err());
        assert!(InnerScheme::Quadrature { tol: 0.0 }.validate().is_err());
        assert!(InnerScheme::Quadrature { tol: f64::NAN }.validate().is_err());
        assert!(InnerScheme::default().validate().is_ok());
        assert!(QUAD.label().contains("not certified"));
    }

    #[test]
    fn chain_report_orderings() {
        let rep = ChainReport::with_tolerance(
            vec![term("a", 1.0), term("b", 0.5), term("c", 0.5 - 1e-10)],
            "test".into(),
            1e-9,
        );
        assert_eq!(rep.orderings.len(), 2);
        assert!(!rep.orderings[0].satisfied);
        assert_eq!(rep.orderings[0].slack, -0.5);
        assert!(rep.orderings[1].satisfied);
        assert!(!rep.all_satisfied());
    }

    #[test]
    fn theorem3_equality_for_xy() {
        for scheme in [InnerScheme::default(), QUAD] {
            let rep = theorem3_terms(&xy(), Rect::unit(), 2, scheme).unwrap();
            for v in rep.values() {
                assert!((v - 0.25).abs() < 1e-12, "{v}");
            }
            assert!(rep.all_satisfied());
        }
    }

    #[test]
    fn theorem3_constant_gives_area() {
        let one = Fn2D::new(|_, _| 1.0);
        let r = Rect::new(-1.0, 2.0, 0.5, 1.0).unwrap();
        for n in [1, 3] {
            let rep = theorem3_terms(&one, r, n, InnerScheme::default()).unwrap();
            for v in rep.values() {
                assert_relative_eq!(v, 1.5, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn theorem3_sumsq_closed_form() {
        let rep = theorem3_terms(&sumsq(), Rect::unit(), 1, QUAD).unwrap();
        // L_1 = ∫(x² + 1/4) dx, U_1 = (1/2)(∫x² dx + ∫(x² + 1) dx)
        let (l, u) = (1.0 / 3.0 + 0.25, 0.5 * (1.0 / 3.0 + 4.0 / 3.0));
        assert_relative_eq!(l, 7.0 / 12.0);
        assert_relative_eq!(u, 5.0 / 6.0);
        assert_relative_eq!(rep.terms[0].value, l, max_relative = 1e-12);
        assert_relative_eq!(rep.terms[1].value, 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(rep.terms[2].value, u, max_relative = 1e-12);
    }

    #[test]
    fn discrete_bounds_examples() {
        let b = theorem3_discrete_bounds(&xy(), Rect::unit(), 2, 2).unwrap();
        assert!((b.lower - 0.25).abs() < 1e-12 && (b.upper - 0.25).abs() < 1e-12);

        let five = Fn2D::new(|_, _| 5.0);
        let r = Rect::new(0.0, 2.0, 0.0, 3.0).unwrap();
        let b = theorem3_discrete_bounds(&five, r, 1, 1).unwrap();
        assert_relative_eq!(b.lower, 30.0, max_relative = 1e-15);
        assert_relative_eq!(b.upper, 30.0, max_relative = 1e-15);
    }

    #[test]
    fn discrete_bounds_sumsq_hand_expansion() {
        // n = m = 1: lower = (1/2) M[f(., 1/2)] + (1/2) M[f(1/2, .)] = f(1/2, 1/2),
        // upper = (1/4)(T[f(., 0)] + T[f(., 1)]) + (1/4)(T[f(0, .)] + T[f(1, .)]).
        let f = |x: f64, y: f64| x * x + y * y;
        let lower = 0.5 * f(0.5, 0.5) + 0.5 * f(0.5, 0.5);
        let trap = |g: &dyn Fn(f64) -> f64| 0.5 * (g(0.0) + g(1.0));
        let upper = 0.25 * (trap(&|x| f(x, 0.0)) + trap(&|x| f(x, 1.0)))
            + 0.25 * (trap(&|y| f(0.0, y)) + trap(&|y| f(1.0, y)));
        assert_eq!((lower, upper), (0.5, 1.0));

        let b = theorem3_discrete_bounds(&sumsq(), Rect::unit(), 1, 1).unwrap();
        assert_eq!((b.lower, b.upper), (lower, upper));
        assert!(b.contains(2.0 / 3.0, 0.0));
    }

    #[test]
    fn discrete_bounds_count_evaluations() {
        // lower: 2n inner sums of n*m points; upper: 2(n+1) sums of n*m+1 points
        let (n, m) = (3, 2);
        let b = theorem3_discrete_bounds(&sumsq(), Rect::unit(), n, m).unwrap();
        assert_eq!(b.evals, 2 * n * (n * m) + 2 * (n + 1) * (n * m + 1));
    }

    #[test]
    fn theorem4_examples() {
        let s = theorem4_terms(&xy(), Rect::unit(), 2, QUAD).unwrap();
        assert_relative_eq!(s.lhs, 1.0, max_relative = 1e-14);
        assert_relative_eq!(s.rhs, 1.0, max_relative = 1e-12);

        let c = Fn2D::new(|_, _| -2.5);
        let r = Rect::new(0.0, 3.0, 1.0, 2.0).unwrap();
        let s = theorem4_terms(&c, r, 4, InnerScheme::default()).unwrap();
        assert_relative_eq!(s.lhs, -20.0, max_relative = 1e-14);
        assert_relative_eq!(s.rhs, -20.0, max_relative = 1e-13);

        let s = theorem4_terms(&sumsq(), Rect::unit(), 1, QUAD).unwrap();
        assert_relative_eq!(s.lhs, 1.0, max_relative = 1e-14);
        assert_relative_eq!(s.rhs, 7.0 / 6.0, max_relative = 1e-12);
        assert!(s.holds(1e-9));
    }

    #[test]
    fn theorem5_examples() {
        let s = theorem5_terms(&xy(), Rect::unit(), 1, QUAD).unwrap();
        assert_relative_eq!(s.lhs, 1.0, max_relative = 1e-12);
        assert_eq!(s.rhs, 1.0);

        let c = Fn2D::new(|_, _| 0.5);
        let s = theorem5_terms(&c, Rect::unit(), 3, InnerScheme::default()).unwrap();
        assert_relative_eq!(s.lhs, 6.0, max_relative = 1e-13);
        assert_relative_eq!(s.rhs, 6.0, max_relative = 1e-13);

        // lhs = 2(∫y² + ∫(1+y²)) + 2(∫x² + ∫(x²+1)) = 20/3
        // rhs = corners 0+1+1+2 plus f(0,½)+f(1,½)+f(½,0)+f(½,1) = 3
        let s = theorem5_terms(&sumsq(), Rect::unit(), 2, QUAD).unwrap();
        assert_relative_eq!(s.lhs, 20.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(s.rhs, 7.0, max_relative = 1e-14);
        assert!(s.holds(1e-9));
    }

    #[test]
    fn theorem6_examples() {
        let v = theorem6_upper(&xy(), Rect::unit(), 1, QUAD).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-12);

        let one = Fn2D::new(|_, _| 1.0).with_positive(true);
        let v = theorem6_upper(&one, Rect::unit(), 1, InnerScheme::default()).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-14);

        // n = 2 weights: (1/8)∫[3f(x,0) + 2f(x,½) + 3f(x,1)]dx + symmetric
        let x_part = 3.0 / 3.0 + 2.0 * (1.0 / 3.0 + 0.25) + 3.0 * (4.0 / 3.0);
        let expected = 2.0 * x_part / 8.0;
        assert_relative_eq!(expected, 37.0 / 24.0, max_relative = 1e-15);
        let v = theorem6_upper(&sumsq(), Rect::unit(), 2, QUAD).unwrap();
        assert_relative_eq!(v, expected, max_relative = 1e-12);
        assert!(2.0 / 3.0 <= v);
    }

    #[test]
    fn theorem6_requires_positivity() {
        let unflagged = Fn2D::new(|x, y| x * y);
        assert!(matches!(
            theorem6_upper(&unflagged, Rect::unit(), 1, QUAD),
            Err(Error::Precondition(_))
        ));
        let lying = Fn2D::new(|x, y| x * y - 0.1).with_positive(true);
        assert!(matches!(
            theorem6_upper(&lying, Rect::unit(), 1, QUAD),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn classical_chains_for_xy() {
        for scheme in [InnerScheme::default(), QUAD] {
            let d = dragomir_chain(&xy(), Rect::unit(), scheme).unwrap();
            let b = bakula_chain(&xy(), Rect::unit(), scheme).unwrap();
            for v in d.values().into_iter().chain(b.values()) {
                assert!((v - 0.25).abs() < 1e-12, "{v}");
            }
        }
    }

    #[test]
    fn classical_chains_for_constants_are_flat() {
        let c = Fn2D::new(|_, _| 1.75);
        let r = Rect::new(0.0, 2.0, -1.0, 3.0).unwrap();
        for rep in [
            dragomir_chain(&c, r, InnerScheme::default()).unwrap(),
            bakula_chain(&c, r, InnerScheme::default()).unwrap(),
        ] {
            for v in rep.values() {
                assert_relative_eq!(v, 1.75, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn classical_chains_for_sumsq() {
        let d = dragomir_chain(&sumsq(), Rect::unit(), QUAD).unwrap();
        let expected = [0.5, 7.0 / 12.0, 2.0 / 3.0, 5.0 / 6.0, 1.0];
        for (v, e) in d.values().iter().zip(expected) {
            assert_relative_eq!(*v, e, max_relative = 1e-12);
        }
        assert!(d.orderings.iter().all(|o| o.slack > 0.0));

        // refined boundary: (1/8)(∫x² + ∫(x²+1) + 2∫(x²+¼)) twice = 17/24
        // refined corners: 4/16 + (1/2)/4 + (¼ + 5/4 + ¼ + 5/4)/8 = 3/4
        let b = bakula_chain(&sumsq(), Rect::unit(), QUAD).unwrap();
        assert_relative_eq!(b.terms[3].value, 17.0 / 24.0, max_relative = 1e-12);
        assert_relative_eq!(b.terms[4].value, 0.75, max_relative = 1e-14);
        assert!(b.all_satisfied());
        assert!(b.terms[3].value <= d.terms[3].value);
    }

    #[test]
    fn recaptured_chain_matches_for_sumsq() {
        let r = Rect::new(-0.5, 1.0, 0.25, 2.0).unwrap();
        for scheme in [InnerScheme::default(), QUAD] {
            let reference = 1.234;
            let d = dragomir_chain_with_reference(&sumsq(), r, scheme, reference).unwrap();
            let rc = recapture_classical_chain(&sumsq(), r, scheme, reference).unwrap();
            for (a, b) in d.values().iter().zip(rc) {
                assert!(agrees(*a, b, 1e-12), "{a} vs {b}");
            }
        }
    }
}
