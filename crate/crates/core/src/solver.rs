//! Bounded weak solutions of `∂_t u + ∂_x a(u) = 0`: first-order
//! finite-volume schemes, exact Riemann solutions, and non-entropic shocks.
//!
//! Rows of every record are cell-centred in time, `t_n = t0 + (n + 1/2) dt`.
//! Finite-volume records reach the first row with a half step and then take
//! exactly one scheme step of `dt` per row, so two consecutive rows are always
//! related by a single application of the scheme.

use crate::error::{Error, Result};
use crate::fields::{gauss_legendre_composite, map_rows, Cutoff, Grid2D, SpaceTimeField};
use crate::flux_entropy::FluxFunction;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// `u_l` for `x < 0`, `u_r` for `x >= 0`.
    Riemann { ul: f64, ur: f64 },
    /// `amplitude * sin(2π x / period)`.
    Sine { amplitude: f64, period: f64 },
    /// One value per grid cell.
    Custom { values: Vec<f64> },
}

impl InitialData {
    /// Parses `riemann:UL,UR` or `sine:AMPLITUDE,PERIOD`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (tag, params) = spec.split_once(':').unwrap_or((spec, ""));
        let nums: Vec<f64> = params
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("bad number '{s}' in init spec")))
            })
            .collect::<Result<_>>()?;
        let need2 = |name: &str| -> Result<(f64, f64)> {
            match nums.as_slice() {
                [a, b] if a.is_finite() && b.is_finite() => Ok((*a, *b)),
                _ => Err(Error::InvalidInput(format!("{name} init needs two finite numbers"))),
            }
        };
        match tag.trim() {
            "riemann" => {
                let (ul, ur) = need2("riemann")?;
                Ok(Self::Riemann { ul, ur })
            }
            "sine" => {
                let (amplitude, period) = need2("sine")?;
                if period <= 0.0 {
                    return Err(Error::InvalidInput("sine period must be positive".into()));
                }
                Ok(Self::Sine { amplitude, period })
            }
            other => Err(Error::InvalidInput(format!("unknown init '{other}'"))),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Self::Riemann { ul, ur } => format!("riemann:{ul},{ur}"),
            Self::Sine { amplitude, period } => format!("sine:{amplitude},{period}"),
            Self::Custom { .. } => "custom".into(),
        }
    }

    pub fn range(&self) -> (f64, f64) {
        match self {
            Self::Riemann { ul, ur } => (ul.min(*ur), ul.max(*ur)),
            Self::Sine { amplitude, .. } => (-amplitude.abs(), amplitude.abs()),
            Self::Custom { values } => values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v))),
        }
    }

    pub fn supnorm(&self) -> f64 {
        let (lo, hi) = self.range();
        lo.abs().max(hi.abs())
    }

    pub fn default_boundary(&self) -> Boundary {
        match self {
            Self::Sine { .. } => Boundary::Periodic,
            _ => Boundary::Outflow,
        }
    }

    fn cell_averages(&self, grid: &Grid2D) -> Result<Vec<f64>> {
        let dx = grid.dx();
        match self {
            Self::Riemann { ul, ur } => Ok((0..grid.nx)
                .map(|j| {
                    let xa = grid.x0 + j as f64 * dx;
                    let frac_left = ((0.0 - xa) / dx).clamp(0.0, 1.0);
                    frac_left * ul + (1.0 - frac_left) * ur
                })
                .collect()),
            Self::Sine { amplitude, period } => {
                let k = 2.0 * std::f64::consts::PI / period;
                Ok((0..grid.nx)
                    .map(|j| {
                        let xa = grid.x0 + j as f64 * dx;
                        let xb = xa + dx;
                        amplitude * ((k * xa).cos() - (k * xb).cos()) / (k * dx)
                    })
                    .collect())
            }
            Self::Custom { values } => {
                if values.len() != grid.nx {
                    return Err(Error::InvalidInput(format!(
                        "custom init has {} values, grid has {} cells",
                        values.len(),
                        grid.nx
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite);
                }
                Ok(values.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    LaxFriedrichs,
    Godunov,
    ExactRiemann,
    NonentropicShock,
}

impl Scheme {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::LaxFriedrichs => "lax_friedrichs",
            Self::Godunov => "godunov",
            Self::ExactRiemann => "exact_riemann",
            Self::NonentropicShock => "nonentropic_shock",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "lax_friedrichs" | "lf" => Ok(Self::LaxFriedrichs),
            "godunov" => Ok(Self::Godunov),
            "exact_riemann" | "exact" => Ok(Self::ExactRiemann),
            "nonentropic_shock" | "nonentropic" => Ok(Self::NonentropicShock),
            other => Err(Error::InvalidInput(format!("unknown scheme '{other}'"))),
        }
    }

    pub fn is_finite_volume(&self) -> bool {
        matches!(self, Self::LaxFriedrichs | Self::Godunov)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Outflow,
}

impl Boundary {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Periodic => "periodic",
            Self::Outflow => "outflow",
        }
    }
}

/// A sampled solution together with what is needed to interpret it.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub field: SpaceTimeField,
    pub flux: FluxFunction,
    pub scheme: Scheme,
    /// Courant number `max|a'| dt / dx` actually used.
    pub cfl: f64,
    pub boundary: Boundary,
    /// Left and right states for closed-form records (jump at `x = 0`, `t = 0`).
    pub riemann_states: Option<(f64, f64)>,
    /// Range of the initial data.
    pub init_range: (f64, f64),
}

impl SolutionRecord {
    pub fn grid(&self) -> &Grid2D {
        self.field.grid()
    }
}

/// Interface state of the exact Riemann solution at `x/t = 0` for a convex flux.
pub fn godunov_state(flux: &FluxFunction, ul: f64, ur: f64) -> f64 {
    if ul <= ur {
        if flux.da(ul) >= 0.0 {
            ul
        } else if flux.da(ur) <= 0.0 {
            ur
        } else {
            flux.inverse_speed(0.0, ul, ur)
        }
    } else if flux.shock_speed(ul, ur) >= 0.0 {
        ul
    } else {
        ur
    }
}

/// Godunov flux for a convex flux: min of `a` over `[ul, ur]` when `ul <= ur`,
/// max of the end values otherwise.
pub fn godunov_flux(flux: &FluxFunction, ul: f64, ur: f64) -> f64 {
    if ul <= ur {
        flux.a(godunov_state(flux, ul, ur))
    } else {
        flux.a(ul).max(flux.a(ur))
    }
}

pub fn lax_friedrichs_flux(flux: &FluxFunction, ul: f64, ur: f64, dx_over_dt: f64) -> f64 {
    0.5 * (flux.a(ul) + flux.a(ur)) - 0.5 * dx_over_dt * (ur - ul)
}

/// Value of cell `j + offset` with ghost cells per the boundary rule.
#[inline]
pub(crate) fn ghost(u: &[f64], j: isize, boundary: Boundary) -> f64 {
    let n = u.len() as isize;
    let idx = match boundary {
        Boundary::Periodic => j.rem_euclid(n),
        Boundary::Outflow => j.clamp(0, n - 1),
    };
    u[idx as usize]
}

/// Advances one scheme step of length `dt`.
pub(crate) fn fv_step(
    u: &[f64],
    flux: &FluxFunction,
    scheme: Scheme,
    boundary: Boundary,
    dt: f64,
    dx: f64,
) -> Vec<f64> {
    let nx = u.len();
    let face = |j: isize| -> f64 {
        let ul = ghost(u, j - 1, boundary);
        let ur = ghost(u, j, boundary);
        match scheme {
            Scheme::LaxFriedrichs => lax_friedrichs_flux(flux, ul, ur, dx / dt),
            _ => godunov_flux(flux, ul, ur),
        }
    };
    let faces: Vec<f64> = (0..=nx as isize).map(face).collect();
    let r = dt / dx;
    (0..nx).map(|j| u[j] - r * (faces[j + 1] - faces[j])).collect()
}

/// Number of time cells giving Courant number `cfl` for speeds up to `smax`.
pub fn nt_for_cfl(t0: f64, t1: f64, dx: f64, cfl: f64, smax: f64) -> usize {
    let dt = cfl * dx / smax.max(1e-12);
    (((t1 - t0) / dt).ceil() as usize).max(4)
}

/// Max wave speed over the initial range for a convex flux.
pub fn max_speed(flux: &FluxFunction, lo: f64, hi: f64) -> f64 {
    flux.da(lo).abs().max(flux.da(hi).abs())
}

/// Finite-volume solve with boundary chosen from the initial data.
pub fn solve_fv(
    init: &InitialData,
    flux: &FluxFunction,
    grid: Grid2D,
    scheme: Scheme,
    cfl: f64,
) -> Result<SolutionRecord> {
    solve_fv_with_boundary(init, flux, grid, scheme, cfl, init.default_boundary())
}

pub fn solve_fv_with_boundary(
    init: &InitialData,
    flux: &FluxFunction,
    grid: Grid2D,
    scheme: Scheme,
    cfl: f64,
    boundary: Boundary,
) -> Result<SolutionRecord> {
    if !(cfl > 0.0 && cfl < 1.0) {
        return Err(Error::CflExceeded);
    }
    if !scheme.is_finite_volume() {
        return Err(Error::InvalidInput(format!(
            "scheme {} is not a finite-volume scheme",
            scheme.tag()
        )));
    }
    let (lo, hi) = init.range();
    if !flux.is_convex_on(lo, hi, 200) {
        return Err(Error::FluxNotConvex);
    }
    let dt = grid.dt();
    let dx = grid.dx();
    let courant = max_speed(flux, lo, hi) * dt / dx;
    if courant >= 1.0 {
        return Err(Error::CflExceeded);
    }
    let mut u = init.cell_averages(&grid)?;
    u = fv_step(&u, flux, scheme, boundary, 0.5 * dt, dx);
    let mut values = Vec::with_capacity(grid.len());
    for n in 0..grid.nt {
        if n > 0 {
            u = fv_step(&u, flux, scheme, boundary, dt, dx);
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Blowup);
        }
        values.extend_from_slice(&u);
    }
    Ok(SolutionRecord {
        field: SpaceTimeField::new(grid, values)?,
        flux: flux.clone(),
        scheme,
        cfl: courant,
        boundary,
        riemann_states: None,
        init_range: (lo, hi),
    })
}

/// Average of the self-similar Riemann solution over `[xa, xb]` at time `t`.
fn riemann_cell_average(flux: &FluxFunction, ul: f64, ur: f64, fan: bool, t: f64, xa: f64, xb: f64) -> f64 {
    let w = xb - xa;
    if ul == ur {
        return ul;
    }
    if !fan {
        let xs = flux.shock_speed(ul, ur) * t;
        let frac_left = ((xs - xa) / w).clamp(0.0, 1.0);
        return frac_left * ul + (1.0 - frac_left) * ur;
    }
    let xl = flux.da(ul) * t;
    let xr = flux.da(ur) * t;
    let left = (xl.min(xb) - xa).max(0.0);
    let right = (xb - xr.max(xa)).max(0.0);
    let fa = xa.max(xl);
    let fb = xb.min(xr);
    let mut total = left * ul + right * ur;
    if fb > fa {
        let g = |x: f64| flux.inverse_speed(x / t, ul, ur);
        total += gauss_legendre_composite(&g, fa, fb, 4);
    }
    total / w
}

fn closed_form_record(
    ul: f64,
    ur: f64,
    flux: &FluxFunction,
    grid: Grid2D,
    scheme: Scheme,
) -> Result<SolutionRecord> {
    if !(ul.is_finite() && ur.is_finite()) {
        return Err(Error::NonFinite);
    }
    if grid.t0 < 0.0 {
        return Err(Error::InvalidInput("closed-form records need t0 >= 0".into()));
    }
    let (lo, hi) = (ul.min(ur), ul.max(ur));
    if !flux.is_convex_on(lo, hi, 400) {
        return Err(Error::FluxNotConvex);
    }
    let fan = scheme == Scheme::ExactRiemann && ul < ur;
    let dx = grid.dx();
    let rows = map_rows(grid.nt, |n| {
        let t = grid.t_center(n);
        (0..grid.nx)
            .map(|j| {
                let xa = grid.x0 + j as f64 * dx;
                riemann_cell_average(flux, ul, ur, fan, t, xa, xa + dx)
            })
            .collect::<Vec<_>>()
    });
    Ok(SolutionRecord {
        field: SpaceTimeField::new(grid, rows.concat())?,
        flux: flux.clone(),
        scheme,
        cfl: 0.0,
        boundary: Boundary::Outflow,
        riemann_states: Some((ul, ur)),
        init_range: (lo, hi),
    })
}

/// Exact entropy solution of the Riemann problem, cell-averaged in `x`.
pub fn exact_riemann(ul: f64, ur: f64, flux: &FluxFunction, grid: Grid2D) -> Result<SolutionRecord> {
    closed_form_record(ul, ur, flux, grid, Scheme::ExactRiemann)
}

/// The entropy-violating jump `(ul, ur)` with `ul < ur`, moving at the
/// Rankine-Hugoniot speed.
pub fn nonentropic_shock(ul: f64, ur: f64, flux: &FluxFunction, grid: Grid2D) -> Result<SolutionRecord> {
    if ul >= ur {
        return Err(Error::EntropicData);
    }
    closed_form_record(ul, ur, flux, grid, Scheme::NonentropicShock)
}

pub(crate) fn check_support_inside(grid: &Grid2D, cutoff: &Cutoff) -> Result<()> {
    let b = cutoff.txbox;
    let tol = 1e-12 * (1.0 + grid.t1.abs().max(grid.x1.abs()));
    if b.ta < grid.t0 - tol || b.tb > grid.t1 + tol || b.xa < grid.x0 - tol || b.xb > grid.x1 + tol {
        return Err(Error::SupportEscape(format!(
            "cutoff box [{},{}]x[{},{}] leaves grid [{},{}]x[{},{}]",
            b.ta, b.tb, b.xa, b.xb, grid.t0, grid.t1, grid.x0, grid.x1
        )));
    }
    Ok(())
}

/// `∬ (u ∂_t χ + a(u) ∂_x χ) dx dt` with `u` constant on each grid cell and
/// the derivatives of the tensor cutoff integrated exactly over each cell.
pub fn weak_residual(rec: &SolutionRecord, flux: &FluxFunction, testfn: &Cutoff) -> Result<f64> {
    let grid = *rec.grid();
    check_support_inside(&grid, testfn)?;
    if testfn.txbox.ta <= grid.t0 {
        return Err(Error::SupportEscape("cutoff must vanish near the initial time".into()));
    }
    let (dt, dx) = (grid.dt(), grid.dx());
    let (bt, bx) = (testfn.profile_t(), testfn.profile_x());
    let x_edges: Vec<f64> = (0..=grid.nx).map(|j| bx.value(grid.x0 + j as f64 * dx)).collect();
    let x_ints: Vec<f64> = (0..grid.nx)
        .map(|j| bx.integral(grid.x0 + j as f64 * dx, grid.x0 + (j + 1) as f64 * dx))
        .collect();
    let rows = map_rows(grid.nt, |n| {
        let ta = grid.t0 + n as f64 * dt;
        let d_bt = bt.value(ta + dt) - bt.value(ta);
        let int_bt = bt.integral(ta, ta + dt);
        if d_bt == 0.0 && int_bt == 0.0 {
            return 0.0;
        }
        let row = rec.field.row(n);
        let cells: Vec<f64> = (0..grid.nx)
            .map(|j| {
                let u = row[j];
                u * d_bt * x_ints[j] + flux.a(u) * int_bt * (x_edges[j + 1] - x_edges[j])
            })
            .collect();
        crate::fields::pairwise_sum(&cells)
    });
    Ok(crate::fields::pairwise_sum(&rows))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OleinikReport {
    pub max_violation: f64,
    pub at_row: usize,
    pub at_col: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Forward-difference slopes against the one-sided bound `1/(α t)`.
pub fn oleinik_check(rec: &SolutionRecord, alpha: f64) -> Result<OleinikReport> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha = {alpha} must be positive")));
    }
    let grid = *rec.grid();
    let dx = grid.dx();
    let mut worst = (f64::NEG_INFINITY, 0, 0);
    for n in 0..grid.nt {
        let t = grid.t_center(n);
        let bound = 1.0 / (alpha * t);
        let row = rec.field.row(n);
        for j in 0..grid.nx - 1 {
            let v = (row[j + 1] - row[j]) / dx - bound;
            if v > worst.0 {
                worst = (v, n, j);
            }
        }
    }
    let tolerance = 10.0 * dx;
    Ok(OleinikReport {
        max_violation: worst.0,
        at_row: worst.1,
        at_col: worst.2,
        tolerance,
        pass: worst.0 <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_bump_cutoff, TxBox};

    fn sine_grid(nx: usize, tmax: f64) -> Grid2D {
        let nt = nt_for_cfl(0.0, tmax, 1.0 / nx as f64, 0.45, 1.0);
        Grid2D::new(0.0, tmax, 0.0, 1.0, nt, nx).unwrap()
    }

    #[test]
    fn sine_maximum_principle_and_conservation() {
        let init = InitialData::Sine { amplitude: 1.0, period: 1.0 };
        let grid = sine_grid(256, 1.2);
        for scheme in [Scheme::Godunov, Scheme::LaxFriedrichs] {
            let rec = solve_fv(&init, &FluxFunction::burgers(), grid, scheme, 0.45).unwrap();
            assert!(rec.field.supnorm() <= 1.0);
            for n in 0..grid.nt {
                let mass: f64 = rec.field.row(n).iter().sum::<f64>() * grid.dx();
                assert!(mass.abs() < 1e-12, "{} row {n}: {mass}", scheme.tag());
            }
        }
    }

    #[test]
    fn cfl_violations_are_rejected() {
        let init = InitialData::Sine { amplitude: 1.0, period: 1.0 };
        let grid = Grid2D::new(0.0, 1.0, 0.0, 1.0, 10, 100).unwrap();
        let err = solve_fv(&init, &FluxFunction::burgers(), grid, Scheme::Godunov, 0.45).unwrap_err();
        assert_eq!(err.to_string(), "cfl exceeded");
        let ok_grid = sine_grid(64, 0.5);
        let err = solve_fv(&init, &FluxFunction::burgers(), ok_grid, Scheme::Godunov, 1.5).unwrap_err();
        assert_eq!(err.to_string(), "cfl exceeded");
    }

    #[test]
    fn godunov_shock_moves_at_rankine_hugoniot_speed() {
        let nx = 800;
        let dx = 2.0 / nx as f64;
        let nt = nt_for_cfl(0.0, 1.0, dx, 0.45, 1.0);
        let grid = Grid2D::new(0.0, 1.0, -1.0, 1.0, nt, nx).unwrap();
        let rec = solve_fv(&InitialData::Riemann { ul: 1.0, ur: 0.0 }, &FluxFunction::burgers(), grid, Scheme::Godunov, 0.45)
            .unwrap();
        let n = nt - 1;
        let t = grid.t_center(n);
        let row = rec.field.row(n);
        let j = row.iter().position(|&v| v < 0.5).unwrap();
        // linear interpolation of the u = 1/2 crossing
        let x = grid.x_center(j - 1) + (row[j - 1] - 0.5) / (row[j - 1] - row[j]) * dx;
        assert!((x / t - 0.5).abs() <= 2.0 * dx / t, "speed {}", x / t);
    }

    #[test]
    fn godunov_rarefaction_matches_fan() {
        let nx = 800;
        let dx = 2.0 / nx as f64;
        let nt = nt_for_cfl(0.0, 1.0, dx, 0.45, 1.0);
        let grid = Grid2D::new(0.0, 1.0, -1.0, 1.0, nt, nx).unwrap();
        let rec = solve_fv(&InitialData::Riemann { ul: 0.0, ur: 1.0 }, &FluxFunction::burgers(), grid, Scheme::Godunov, 0.45)
            .unwrap();
        let n = nt - 1;
        let t = grid.t_center(n);
        let mut l1 = 0.0;
        for j in 0..nx {
            let x = grid.x_center(j);
            let exact = (x / t).clamp(0.0, 1.0);
            l1 += (rec.field.get(n, j) - exact).abs() * dx;
        }
        assert!(l1 < 5.0 * dx.sqrt() * dx.sqrt() + 0.02, "L1 error {l1}");
    }

    #[test]
    fn exact_riemann_samples() {
        let grid = Grid2D::new(0.0, 2.0, -1.0, 2.0, 200, 300).unwrap();
        let f = FluxFunction::burgers();
        let shock = exact_riemann(1.0, 0.0, &f, grid).unwrap();
        // t = 1 falls between rows; take the row with t_n = 0.99 and 1.01
        let n = (1.0 / grid.dt()) as usize;
        let t = grid.t_center(n);
        let j_left = ((0.5 * t - 0.02 - grid.x0) / grid.dx()) as usize;
        let j_right = ((0.5 * t + 0.02 - grid.x0) / grid.dx()) as usize;
        assert_eq!(shock.field.get(n, j_left), 1.0);
        assert_eq!(shock.field.get(n, j_right), 0.0);
        let fan = exact_riemann(0.0, 1.0, &f, grid).unwrap();
        let j = ((0.5 * t - grid.x0) / grid.dx()) as usize;
        let x = grid.x_center(j);
        assert!((fan.field.get(n, j) - x / t).abs() < 1e-12);
        let c = exact_riemann(0.3, 0.3, &f, grid).unwrap();
        assert!(c.field.values().iter().all(|&v| v == 0.3));
    }

    #[test]
    fn nonentropic_orientation_is_enforced() {
        let grid = Grid2D::new(0.0, 1.0, -1.0, 1.0, 50, 50).unwrap();
        let err = nonentropic_shock(1.0, 0.0, &FluxFunction::burgers(), grid).unwrap_err();
        assert_eq!(err.to_string(), "use exact_riemann for entropic data");
        let rec = nonentropic_shock(-1.0, 1.0, &FluxFunction::burgers(), grid).unwrap();
        assert_eq!(rec.field.get(40, 10), -1.0);
        assert_eq!(rec.field.get(40, 40), 1.0);
    }

    #[test]
    fn weak_residual_small_for_exact_records() {
        let f = FluxFunction::burgers();
        let cut = make_bump_cutoff(TxBox::new(0.2, 0.9, -0.6, 0.8), 0.4).unwrap();
        let mut prev = f64::INFINITY;
        for nx in [100, 200, 400] {
            let grid = Grid2D::new(0.0, 1.0, -1.0, 1.0, nx, nx).unwrap();
            let rec = nonentropic_shock(0.0, 1.0, &f, grid).unwrap();
            let r = weak_residual(&rec, &f, &cut).unwrap().abs();
            assert!(r <= 2.0 / nx as f64, "nx={nx}: {r}");
            assert!(r <= prev);
            prev = r;
            let ex = exact_riemann(1.0, 0.0, &f, grid).unwrap();
            assert!(weak_residual(&ex, &f, &cut).unwrap().abs() <= 2.0 / nx as f64);
        }
        let grid = Grid2D::new(0.0, 1.0, -1.0, 1.0, 64, 64).unwrap();
        let c = exact_riemann(0.4, 0.4, &f, grid).unwrap();
        let r = weak_residual(&c, &f, &cut).unwrap();
        assert!(r.abs() < 1e-13, "{r}");
    }

    #[test]
    fn oleinik_examples() {
        let init = InitialData::Sine { amplitude: 1.0, period: 1.0 };
        let grid = sine_grid(256, 1.0);
        let rec = solve_fv(&init, &FluxFunction::burgers(), grid, Scheme::Godunov, 0.45).unwrap();
        assert!(oleinik_check(&rec, 1.0).unwrap().pass);
        let g2 = Grid2D::new(0.0, 1.0, -1.0, 1.0, 64, 64).unwrap();
        let ne = nonentropic_shock(0.0, 1.0, &FluxFunction::burgers(), g2).unwrap();
        assert!(!oleinik_check(&ne, 1.0).unwrap().pass);
        let c = exact_riemann(0.2, 0.2, &FluxFunction::burgers(), g2).unwrap();
        assert!(oleinik_check(&c, 1.0).unwrap().pass);
    }
}
