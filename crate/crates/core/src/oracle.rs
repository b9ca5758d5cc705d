//! Reference integrators used as ground truth in tests and reports.
//!
//! Composite Simpson on a uniform grid, evaluated at `grid` and `grid / 2`
//! subintervals, with the Richardson estimate `|S_N - S_{N/2}| / 15`. The
//! node layout and summation here are deliberately separate from
//! [`crate::bounds`] so that enclosure tests do not check code against itself.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::Interval;
use crate::error::{Error, Result};
use crate::func::{Fn1D, Fn2D};
use crate::rect::Rect;

pub const DEFAULT_GRID: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub error_estimate: f64,
    pub grid: usize,
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < 64 || !grid.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "oracle grid must be a power of two >= 64, got {grid}"
        )));
    }
    Ok(())
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct Accumulator {
    sum: f64,
    carry: f64,
}

impl Accumulator {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.carry
    }
}

fn simpson_weight(i: usize, last: usize) -> f64 {
    if i == 0 || i == last {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

fn grid_point(lo: f64, hi: f64, i: usize, grid: usize) -> f64 {
    if i == grid {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / grid as f64)
    }
}

/// Weighted sums over a line of `grid + 1` samples at full and half resolution.
fn line_sums(values: &[f64]) -> (f64, f64) {
    let grid = values.len() - 1;
    let half = grid / 2;
    let mut full = Accumulator::default();
    let mut coarse = Accumulator::default();
    for (i, &v) in values.iter().enumerate() {
        full.add(simpson_weight(i, grid) * v);
        if i % 2 == 0 {
            coarse.add(simpson_weight(i / 2, half) * v);
        }
    }
    (full.total(), coarse.total())
}

fn finish(full: f64, coarse: f64, grid: usize) -> OracleResult {
    OracleResult {
        value: full,
        error_estimate: (full - coarse).abs() / 15.0,
        grid,
    }
}

pub fn reference_integral_1d(f: &Fn1D, iv: Interval, grid: usize) -> Result<OracleResult> {
    check_grid(grid)?;
    let (lo, hi) = (iv.lo(), iv.hi());
    let values = (0..=grid)
        .map(|i| f.eval(grid_point(lo, hi, i, grid)))
        .collect::<Result<Vec<_>>>()?;
    let (s_full, s_coarse) = line_sums(&values);
    let h = (hi - lo) / grid as f64;
    Ok(finish(h / 3.0 * s_full, 2.0 * h / 3.0 * s_coarse, grid))
}

/// Tensor-product composite Simpson over the rectangle.
///
/// Rows are summed in parallel and reduced in index order, so the result does
/// not depend on the thread count.
pub fn reference_integral_2d(f: &Fn2D, r: Rect, grid: usize) -> Result<OracleResult> {
    check_grid(grid)?;
    let rows = (0..=grid)
        .into_par_iter()
        .map(|i| {
            let x = grid_point(r.a(), r.b(), i, grid);
            let values = (0..=grid)
                .map(|j| f.eval(x, grid_point(r.c(), r.d(), j, grid)))
                .collect::<Result<Vec<_>>>()?;
            Ok(line_sums(&values))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let half = grid / 2;
    let mut full = Accumulator::default();
    let mut coarse = Accumulator::default();
    for (i, &(row_full, row_coarse)) in rows.iter().enumerate() {
        full.add(simpson_weight(i, grid) * row_full);
        if i % 2 == 0 {
            coarse.add(simpson_weight(i / 2, half) * row_coarse);
        }
    }
    let hx = (r.b() - r.a()) / grid as f64;
    let hy = (r.d() - r.c()) / grid as f64;
    Ok(finish(
        hx * hy / 9.0 * full.total(),
        4.0 * hx * hy / 9.0 * coarse.total(),
        grid,
    ))
}
