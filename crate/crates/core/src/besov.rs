//! Shifted differences, cutoff-weighted increment functionals and log-log
//! regularity fits.

use crate::error::{Error, Result};
use crate::fields::{map_rows, pairwise_sum, Cutoff, Grid2D, SpaceTimeField};
use crate::flux_entropy::least_squares;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    X,
    T,
}

impl Direction {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::X => "x",
            Self::T => "t",
        }
    }

    pub fn spacing(&self, grid: &Grid2D) -> f64 {
        match self {
            Self::X => grid.dx(),
            Self::T => grid.dt(),
        }
    }
}

/// Converts a shift to a whole number of cells.
pub fn shift_cells(grid: &Grid2D, dir: Direction, h: f64) -> Result<isize> {
    let s = h / dir.spacing(grid);
    let r = s.round();
    if r == 0.0 || (s - r).abs() > 1e-9 * r.abs().max(1.0) {
        return Err(Error::NonCommensurateShift);
    }
    Ok(r as isize)
}

/// `D^h u = u(· + h) − u`, with `u` extended by zero outside the grid.
pub fn diff(field: &SpaceTimeField, dir: Direction, h: f64) -> Result<SpaceTimeField> {
    let grid = *field.grid();
    let s = shift_cells(&grid, dir, h)?;
    let rows = map_rows(grid.nt, |n| {
        (0..grid.nx)
            .map(|j| shifted(field, dir, s, n, j) - field.get(n, j))
            .collect::<Vec<_>>()
    });
    SpaceTimeField::new(grid, rows.concat())
}

#[inline]
fn shifted(field: &SpaceTimeField, dir: Direction, s: isize, n: usize, j: usize) -> f64 {
    let grid = field.grid();
    let (nn, jj) = match dir {
        Direction::X => (n as isize, j as isize + s),
        Direction::T => (n as isize + s, j as isize),
    };
    if nn < 0 || jj < 0 || nn >= grid.nt as isize || jj >= grid.nx as isize {
        0.0
    } else {
        field.get(nn as usize, jj as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IncrementFunctional {
    pub direction: Direction,
    pub h: f64,
    pub p: f64,
    /// `∬ χ² |D^h u|^p dx dt`.
    pub value: f64,
}

/// Checks that the cutoff support, and its translate by `h`, lie in the grid.
fn check_shifted_support(grid: &Grid2D, cutoff: &Cutoff, dir: Direction, h: f64) -> Result<()> {
    let b = cutoff.txbox;
    let (lo, hi, glo, ghi) = match dir {
        Direction::X => (b.xa, b.xb, grid.x0, grid.x1),
        Direction::T => (b.ta, b.tb, grid.t0, grid.t1),
    };
    let (olo, ohi, oglo, oghi) = match dir {
        Direction::X => (b.ta, b.tb, grid.t0, grid.t1),
        Direction::T => (b.xa, b.xb, grid.x0, grid.x1),
    };
    let tol = 1e-12 * (1.0 + ghi.abs() + glo.abs());
    if olo < oglo - tol || ohi > oghi + tol || lo.min(lo + h) < glo - tol || hi.max(hi + h) > ghi + tol {
        return Err(Error::SupportEscape(format!(
            "cutoff shifted by {h} in {} leaves the grid",
            dir.tag()
        )));
    }
    Ok(())
}

/// Midpoint quadrature of `χ² |D^h u|^p` on the field grid.
pub fn increment_functional(
    field: &SpaceTimeField,
    dir: Direction,
    h: f64,
    p: f64,
    cutoff: &Cutoff,
) -> Result<IncrementFunctional> {
    let grid = *field.grid();
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("exponent p = {p} must be >= 1")));
    }
    let s = shift_cells(&grid, dir, h)?;
    check_shifted_support(&grid, cutoff, dir, h)?;
    let value = weighted_increment(field, dir, s, p, |t, x| {
        let c = cutoff.eval(t, x);
        c * c
    });
    Ok(IncrementFunctional { direction: dir, h, p, value })
}

/// `Σ w(t, x) |D^s u|^p dt dx` over all cells where `w` is nonzero.
pub(crate) fn weighted_increment(
    field: &SpaceTimeField,
    dir: Direction,
    s: isize,
    p: f64,
    w: impl Fn(f64, f64) -> f64 + Sync + Send,
) -> f64 {
    let grid = *field.grid();
    let int_p = if p.fract() == 0.0 && p <= 16.0 { Some(p as i32) } else { None };
    let rows = map_rows(grid.nt, |n| {
        let t = grid.t_center(n);
        let terms: Vec<f64> = (0..grid.nx)
            .map(|j| {
                let c = w(t, grid.x_center(j));
                if c == 0.0 {
                    return 0.0;
                }
                let d = (shifted(field, dir, s, n, j) - field.get(n, j)).abs();
                c * match int_p {
                    Some(k) => d.powi(k),
                    None => d.powf(p),
                }
            })
            .collect();
        pairwise_sum(&terms)
    });
    pairwise_sum(&rows) * grid.dt() * grid.dx()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BesovReport {
    pub direction: Direction,
    pub p: f64,
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// `slope / p`.
    pub exponent: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// `slope >= 1 − 0.1`.
    pub consistent: bool,
}

pub const FIT_TOLERANCE: f64 = 0.1;

/// Default shift cap: a tenth of the smaller side of the cutoff support.
pub fn default_eps(cutoff: &Cutoff) -> f64 {
    0.1 * cutoff.txbox.width_t().min(cutoff.txbox.width_x())
}

/// Dyadic multiples `2^k · spacing` with `2^k` in `[min_cells, max_cells]`.
pub fn dyadic_shifts(spacing: f64, min_cells: usize, max_cells: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut c = min_cells.max(1).next_power_of_two();
    while c <= max_cells {
        out.push(c as f64 * spacing);
        c *= 2;
    }
    out
}

/// Least-squares slope of `log value` against `log h` over the admissible shifts.
pub fn besov_fit(
    field: &SpaceTimeField,
    dir: Direction,
    p: f64,
    cutoff: &Cutoff,
    h_set: &[f64],
) -> Result<BesovReport> {
    let grid = *field.grid();
    let spacing = dir.spacing(&grid);
    let eps = default_eps(cutoff);
    let floor = 4.0 * spacing * (1.0 - 1e-9);
    let admissible: Vec<f64> = h_set
        .iter()
        .copied()
        .filter(|h| h.abs() >= floor && h.abs() <= eps * (1.0 + 1e-9))
        .collect();
    let values: Vec<IncrementFunctional> = admissible
        .iter()
        .map(|&h| increment_functional(field, dir, h, p, cutoff))
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = values
        .iter()
        .filter(|v| v.value > 0.0)
        .map(|v| (v.h.abs(), v.value))
        .collect();
    if points.len() < 4 {
        return Err(Error::TooFewShifts(points.len()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let h_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let h_max = points.iter().map(|p| p.0).fold(0.0, f64::max);
    Ok(BesovReport {
        direction: dir,
        p,
        points,
        slope,
        intercept,
        exponent: slope / p,
        h_min,
        h_max,
        consistent: slope >= 1.0 - FIT_TOLERANCE,
    })
}
