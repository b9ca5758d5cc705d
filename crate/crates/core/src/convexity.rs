//! Sampling check of coordinate convexity and a generator of random
//! coordinate-convex test functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::Interval;
use crate::error::{Error, Result};
use crate::func::{Fn1D, Fn2D};
use crate::rect::Rect;

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// The free variable is `x`; `y` is held fixed.
    X,
    Y,
}

/// The sample with the most negative convexity slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub axis: Axis,
    /// Value of the coordinate held fixed.
    pub fixed: f64,
    pub u1: f64,
    pub u2: f64,
    pub lambda: f64,
    /// `(x, y)` of the convex combination `lambda u1 + (1 - lambda) u2`.
    pub point: (f64, f64),
    pub sample_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub samples: usize,
    /// Smallest slack `lambda f(u1) + (1 - lambda) f(u2) - f(lambda u1 + (1 - lambda) u2)`.
    pub max_violation: f64,
    pub witness: Option<Witness>,
    pub passed: bool,
}

/// Draws `samples` random convex combinations along each axis and reports the
/// smallest slack. Deterministic for a given seed.
pub fn check_coordinate_convexity(
    f: &Fn2D,
    r: Rect,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<ConvexityReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidParameter(format!("tol must be >= 0, got {tol}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut witness = None;

    for (axis_idx, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
        let (free, fixed_side) = match axis {
            Axis::X => (r.x_side(), r.y_side()),
            Axis::Y => (r.y_side(), r.x_side()),
        };
        let at = |u: f64, fixed: f64| match axis {
            Axis::X => (u, fixed),
            Axis::Y => (fixed, u),
        };
        for s in 0..samples {
            let fixed = uniform(&mut rng, fixed_side);
            let u1 = uniform(&mut rng, free);
            let u2 = uniform(&mut rng, free);
            let lambda: f64 = rng.random_range(0.0..=1.0);
            let mix = (lambda * u1 + (1.0 - lambda) * u2).clamp(free.lo(), free.hi());

            let (x1, y1) = at(u1, fixed);
            let (x2, y2) = at(u2, fixed);
            let point = at(mix, fixed);
            let slack = lambda * f.eval(x1, y1)? + (1.0 - lambda) * f.eval(x2, y2)?
                - f.eval(point.0, point.1)?;
            if slack < worst {
                worst = slack;
                witness = Some(Witness {
                    axis,
                    fixed,
                    u1,
                    u2,
                    lambda,
                    point,
                    sample_index: axis_idx * samples + s,
                });
            }
        }
    }

    Ok(ConvexityReport {
        samples: 2 * samples,
        max_violation: worst,
        witness: if worst < 0.0 { witness } else { None },
        passed: worst >= -tol,
    })
}

fn uniform(rng: &mut ChaCha8Rng, iv: Interval) -> f64 {
    rng.random_range(iv.lo()..=iv.hi())
}

/// Minimum of `f` over a `k x k` grid spanning `r` (edges included) and where
/// it occurs.
pub fn grid_minimum(f: &Fn2D, r: Rect, k: usize) -> Result<(f64, (f64, f64))> {
    if k < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points per side".into()));
    }
    let coord = |lo: f64, hi: f64, i: usize| {
        if i == k - 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (k - 1) as f64
        }
    };
    let mut best = (f64::INFINITY, (r.a(), r.c()));
    for i in 0..k {
        let x = coord(r.a(), r.b(), i);
        for j in 0..k {
            let y = coord(r.c(), r.d(), j);
            let v = f.eval(x, y)?;
            if v < best.0 {
                best = (v, (x, y));
            }
        }
    }
    Ok(best)
}

/// A one-variable convex building block, written in the side's normalised
/// coordinate `t = (u - lo) / (hi - lo)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexAtomSpec {
    Square { center: f64 },
    AbsShift { center: f64 },
    Exp { rate: f64 },
    /// Only generated with `intercept >= max(0, -slope)`, i.e. non-negative on `[0, 1]`.
    Affine { slope: f64, intercept: f64 },
}

impl ConvexAtomSpec {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ConvexAtomSpec::Square { center } => (t - center) * (t - center),
            ConvexAtomSpec::AbsShift { center } => (t - center).abs(),
            ConvexAtomSpec::Exp { rate } => (rate * t).exp(),
            ConvexAtomSpec::Affine { slope, intercept } => slope * t + intercept,
        }
    }

    fn random(rng: &mut ChaCha8Rng) -> Self {
        match rng.random_range(0..4) {
            0 => ConvexAtomSpec::Square {
                center: rng.random_range(-0.25..=1.25),
            },
            1 => ConvexAtomSpec::AbsShift {
                center: rng.random_range(0.0..=1.0),
            },
            2 => ConvexAtomSpec::Exp {
                rate: rng.random_range(-2.0..=2.0),
            },
            _ => {
                let slope: f64 = rng.random_range(-1.0..=1.0);
                ConvexAtomSpec::Affine {
                    slope,
                    intercept: (-slope).max(0.0) + rng.random_range(0.0..=0.5),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductTerm {
    pub weight: f64,
    pub along_x: ConvexAtomSpec,
    pub along_y: ConvexAtomSpec,
}

/// `beta + slope_x s + slope_y t + sum_i w_i g_i(s) h_i(t)` with `(s, t)` the
/// normalised coordinates of `(x, y)` in the rectangle.
///
/// Each product term is a non-negative convex function of one coordinate
/// scaled by a non-negative function of the other, so the sum is convex on the
/// coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordinateConvexSpec {
    pub rect: Rect,
    pub beta: f64,
    pub slope_x: f64,
    pub slope_y: f64,
    pub terms: Vec<ProductTerm>,
}

impl CoordinateConvexSpec {
    pub fn generate(seed: u64, rect: Rect, atom_count: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta = rng.random_range(-1.0..=2.0);
        let slope_x = rng.random_range(-1.0..=1.0);
        let slope_y = rng.random_range(-1.0..=1.0);
        let terms = (0..atom_count)
            .map(|_| ProductTerm {
                weight: rng.random_range(0.0..=2.0),
                along_x: ConvexAtomSpec::random(&mut rng),
                along_y: ConvexAtomSpec::random(&mut rng),
            })
            .collect();
        Self {
            rect,
            beta,
            slope_x,
            slope_y,
            terms,
        }
    }

    /// Exact minimum of the affine part over the rectangle.
    pub fn affine_minimum(&self) -> f64 {
        self.beta + self.slope_x.min(0.0) + self.slope_y.min(0.0)
    }

    /// Product terms are non-negative, so a positive affine minimum certifies
    /// positivity everywhere on the rectangle.
    pub fn is_positive(&self) -> bool {
        self.affine_minimum() > 0.0
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let s = (x - self.rect.a()) / self.rect.width();
        let t = (y - self.rect.c()) / self.rect.height();
        let mut v = self.beta + self.slope_x * s + self.slope_y * t;
        for term in &self.terms {
            v += term.weight * term.along_x.eval(s) * term.along_y.eval(t);
        }
        v
    }

    pub fn to_fn(&self) -> Fn2D {
        let positive = self.is_positive();
        let spec = self.clone();
        Fn2D::new(move |x, y| spec.eval(x, y)).with_positive(positive)
    }
}

/// A random function convex on the coordinates of `r`; see [`CoordinateConvexSpec`].
pub fn random_coordinate_convex(seed: u64, r: Rect, atom_count: usize) -> Fn2D {
    CoordinateConvexSpec::generate(seed, r, atom_count).to_fn()
}

/// `beta + slope t + sum_i w_i a_i(t)` on an interval, `t` normalised.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexSpec1D {
    pub interval: Interval,
    pub beta: f64,
    pub slope: f64,
    pub atoms: Vec<(f64, ConvexAtomSpec)>,
}

impl ConvexSpec1D {
    /// With `positive` set, `beta` is shifted so the affine part (and hence
    /// the whole function) stays above a positive floor.
    pub fn generate(seed: u64, interval: Interval, atom_count: usize, positive: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slope: f64 = rng.random_range(-1.0..=1.0);
        let mut beta = rng.random_range(-1.0..=2.0);
        if positive {
            beta = (-slope).max(0.0) + rng.random_range(0.01..=1.0);
        }
        let atoms = (0..atom_count)
            .map(|_| (rng.random_range(0.0..=2.0), ConvexAtomSpec::random(&mut rng)))
            .collect();
        Self {
            interval,
            beta,
            slope,
            atoms,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.beta + self.slope.min(0.0) > 0.0
    }

    pub fn eval(&self, u: f64) -> f64 {
        let t = (u - self.interval.lo()) / self.interval.len();
        self.beta
            + self.slope * t
            + self.atoms.iter().map(|(w, a)| w * a.eval(t)).sum::<f64>()
    }

    pub fn to_fn(&self) -> Fn1D {
        let positive = self.is_positive();
        let spec = self.clone();
        Fn1D::new(move |u| spec.eval(u)).with_positive(positive)
    }
}
