//! Black-box integrands.
//!
//! Both function types wrap a shared, thread-safe callback. Callbacks may fail
//! (for instance when a parsed expression divides by zero); a successful but
//! non-finite value is also reported as an evaluation error carrying the point.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Location, Result};

type Callback1 = dyn Fn(f64) -> std::result::Result<f64, String> + Send + Sync;
type Callback2 = dyn Fn(f64, f64) -> std::result::Result<f64, String> + Send + Sync;

/// Where a one-variable function sits when it is a partial mapping of an
/// `Fn2D`; used to report failures at the full `(x, y)` point.
#[derive(Clone, Copy)]
enum Embedding {
    Line,
    AlongX { y: f64 },
    AlongY { x: f64 },
}

/// A real function of one variable.
#[derive(Clone)]
pub struct Fn1D {
    eval: Arc<Callback1>,
    positive: bool,
    embedding: Embedding,
}

impl Fn1D {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::fallible(move |t| Ok(f(t)))
    }

    pub fn fallible<F>(f: F) -> Self
    where
        F: Fn(f64) -> std::result::Result<f64, String> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            positive: false,
            embedding: Embedding::Line,
        }
    }

    /// Asserts that the range of the function lies in the non-negative reals.
    pub fn with_positive(mut self, positive: bool) -> Self {
        self.positive = positive;
        self
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let at = match self.embedding {
            Embedding::Line => Location::Point1D(t),
            Embedding::AlongX { y } => Location::Point2D(t, y),
            Embedding::AlongY { x } => Location::Point2D(x, t),
        };
        match (self.eval)(t) {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(v) => Err(Error::Evaluation {
                at,
                detail: format!("non-finite value {v}"),
            }),
            Err(detail) => Err(Error::Evaluation { at, detail }),
        }
    }
}

impl fmt::Debug for Fn1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fn1D")
            .field("positive", &self.positive)
            .finish_non_exhaustive()
    }
}

/// A real function on a rectangle.
#[derive(Clone)]
pub struct Fn2D {
    eval: Arc<Callback2>,
    positive: bool,
}

impl Fn2D {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::fallible(move |x, y| Ok(f(x, y)))
    }

    pub fn fallible<F>(f: F) -> Self
    where
        F: Fn(f64, f64) -> std::result::Result<f64, String> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            positive: false,
        }
    }

    pub fn with_positive(mut self, positive: bool) -> Self {
        self.positive = positive;
        self
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let at = Location::Point2D(x, y);
        match (self.eval)(x, y) {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(v) => Err(Error::Evaluation {
                at,
                detail: format!("non-finite value {v}"),
            }),
            Err(detail) => Err(Error::Evaluation { at, detail }),
        }
    }

    /// The partial mapping `x -> f(x, y)` at a fixed `y`.
    pub fn along_x(&self, y: f64) -> Fn1D {
        let eval = Arc::clone(&self.eval);
        Fn1D {
            eval: Arc::new(move |x| eval(x, y)),
            positive: self.positive,
            embedding: Embedding::AlongX { y },
        }
    }

    /// The partial mapping `y -> f(x, y)` at a fixed `x`.
    pub fn along_y(&self, x: f64) -> Fn1D {
        let eval = Arc::clone(&self.eval);
        Fn1D {
            eval: Arc::new(move |y| eval(x, y)),
            positive: self.positive,
            embedding: Embedding::AlongY { x },
        }
    }
}

impl fmt::Debug for Fn2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fn2D")
            .field("positive", &self.positive)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_values_carry_location() {
        let f = Fn2D::new(|x, y| 1.0 / (x - y));
        let err = f.eval(0.5, 0.5).unwrap_err();
        assert_eq!(
            err,
            Error::Evaluation {
                at: Location::Point2D(0.5, 0.5),
                detail: "non-finite value inf".into()
            }
        );
    }

    #[test]
    fn partial_mappings_curry_the_right_argument() {
        let f = Fn2D::new(|x, y| 10.0 * x + y).with_positive(true);
        assert_eq!(f.along_x(2.0).eval(3.0).unwrap(), 32.0);
        assert_eq!(f.along_y(2.0).eval(3.0).unwrap(), 23.0);
        assert!(f.along_x(0.0).is_positive());
    }

    #[test]
    fn partial_mapping_failures_report_the_plane_point() {
        let f = Fn2D::new(|x, y| 1.0 / (x - y));
        match f.along_y(0.25).eval(0.25) {
            Err(Error::Evaluation { at, .. }) => assert_eq!(at, Location::Point2D(0.25, 0.25)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn callback_failures_are_wrapped() {
        let f = Fn1D::fallible(|_| Err("boom".to_string()));
        assert!(matches!(f.eval(1.0), Err(Error::Evaluation { .. })));
    }
}
