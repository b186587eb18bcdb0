//! Kinetic formulation: the density `f = M_u(v)`, the kinetic measure `m` of
//! `∂_t f + a'(v) ∂_x f = ∂_v m`, entropy-production measures, the
//! monotonicity hypothesis on `f`, and the quantity `Δ(u, ū)`.
//!
//! # Measure extraction
//!
//! Integrating the kinetic equation in `v` up to a level `v` gives
//! `∂_t Φ_v(u) + ∂_x Ψ_v(u) = m(v)` with
//! `Φ_v(u) = ∫_{-∞}^v M_u` and `Ψ_v(u) = ∫_{-∞}^v a' M_u`.
//! Each space-time box (between two consecutive rows, one space cell wide)
//! carries the discrete residual of that pair, built from the same numerical
//! flux that produced the record. For closed-form records the measure is the
//! exact line mass on the shock. In both cases `m(·)` is a finite combination
//! of `Φ_·(u_i)` and `Ψ_·(u_i)`, so its integral over each velocity cell is
//! computed exactly (piecewise polynomial in `v` for polynomial fluxes).

use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::{gauss_legendre, map_rows, pairwise_sum, Cutoff, Grid2D, SpaceTimeField, TestWeight, TxBox, VelocityGrid};
use crate::flux_entropy::{EntropyPair, FluxFunction, FluxKind};
use crate::solver::{check_support_inside, ghost, godunov_state, Scheme, SolutionRecord};

/// `M_u(v)`: `+1` on `[0, u]` for `u >= 0`, `−1` on `[u, 0]` for `u < 0`.
pub fn m_indicator(u: f64, v: f64) -> f64 {
    if u >= 0.0 {
        if v >= 0.0 && v <= u && u > 0.0 {
            1.0
        } else {
            0.0
        }
    } else if v >= u && v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `Φ_v(u) = ∫_{-∞}^v M_u = min(u, v) − min(0, v)`.
#[inline]
pub fn phi(v: f64, u: f64) -> f64 {
    u.min(v) - v.min(0.0)
}

/// `Ψ_v(u) = ∫_{-∞}^v a'(w) M_u(w) dw`.
#[inline]
pub fn psi(flux: &FluxFunction, v: f64, u: f64) -> f64 {
    if u >= 0.0 {
        flux.a(v.clamp(0.0, u)) - flux.a(0.0)
    } else {
        -(flux.a(v.clamp(u, 0.0)) - flux.a(u))
    }
}

/// Velocity-dependent density on the record grid.
pub trait VelocityDensity: Sync {
    fn grid(&self) -> &Grid2D;
    fn vgrid(&self) -> &VelocityGrid;
    fn value(&self, n: usize, j: usize, k: usize) -> f64;
    /// Sup norm of the density.
    fn linf(&self) -> f64;
}

/// `f(t, x, v)` lifted from a solution record; stored implicitly through `u`.
#[derive(Debug, Clone)]
pub struct KineticDensity {
    pub rec: Arc<SolutionRecord>,
    pub vgrid: VelocityGrid,
    /// Order of the `v` derivative on the source (1 for the kinetic formulation).
    pub gamma: u8,
}

impl KineticDensity {
    pub fn u(&self, n: usize, j: usize) -> f64 {
        self.rec.field.get(n, j)
    }
}

impl VelocityDensity for KineticDensity {
    fn grid(&self) -> &Grid2D {
        self.rec.grid()
    }

    fn vgrid(&self) -> &VelocityGrid {
        &self.vgrid
    }

    /// Exact cell average of `M_u` over velocity cell `k`.
    fn value(&self, n: usize, j: usize, k: usize) -> f64 {
        let u = self.u(n, j);
        let lo = self.vgrid.edge(k);
        let hi = self.vgrid.edge(k + 1);
        (phi(hi, u) - phi(lo, u)) / self.vgrid.dv()
    }

    fn linf(&self) -> f64 {
        if self.rec.field.supnorm() > 0.0 {
            1.0
        } else {
            0.0
        }
    }
}

/// Lifts a record to its kinetic density.
pub fn lift(rec: &SolutionRecord, vgrid: VelocityGrid) -> Result<KineticDensity> {
    lift_shared(Arc::new(rec.clone()), vgrid)
}

pub fn lift_shared(rec: Arc<SolutionRecord>, vgrid: VelocityGrid) -> Result<KineticDensity> {
    let u = rec.field.supnorm();
    let dv = vgrid.dv();
    let tol = 1e-12 * (1.0 + u);
    if vgrid.vmin > -u - dv + tol || vgrid.vmax < u + dv - tol {
        return Err(Error::VelocitySupportExceeded);
    }
    Ok(KineticDensity { rec, vgrid, gamma: 1 })
}

/// Monotone profile `W` for `f = W(ρ − v)`.
#[derive(Clone)]
pub enum Profile {
    Heaviside,
    Tanh { scale: f64 },
    Constant(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Heaviside => write!(f, "Heaviside"),
            Self::Tanh { scale } => write!(f, "Tanh({scale})"),
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Profile {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Self::Heaviside => {
                if s >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Tanh { scale } => (s / scale).tanh(),
            Self::Constant(c) => *c,
            Self::Custom(w) => w(s),
        }
    }
}

/// `f(t, x, v) = W(ρ(t, x) − v)` sampled at velocity cell centres.
#[derive(Debug, Clone)]
pub struct ProfileDensity {
    pub rho: SpaceTimeField,
    pub profile: Profile,
    pub vgrid: VelocityGrid,
    linf: f64,
}

pub fn monotone_profile_density(rho: &SpaceTimeField, profile: Profile, vgrid: VelocityGrid) -> ProfileDensity {
    let (lo, hi) = rho.min_max();
    let probe = [lo - vgrid.vmax, lo - vgrid.vmin, hi - vgrid.vmax, hi - vgrid.vmin, 0.0];
    let linf = probe.iter().map(|&s| profile.eval(s).abs()).fold(0.0, f64::max);
    ProfileDensity { rho: rho.clone(), profile, vgrid, linf }
}

impl VelocityDensity for ProfileDensity {
    fn grid(&self) -> &Grid2D {
        self.rho.grid()
    }

    fn vgrid(&self) -> &VelocityGrid {
        &self.vgrid
    }

    fn value(&self, n: usize, j: usize, k: usize) -> f64 {
        self.profile.eval(self.rho.get(n, j) - self.vgrid.center(k))
    }

    fn linf(&self) -> f64 {
        self.linf
    }
}

/// Dense `(t, x, v)` array, row-major in `(n, j, k)`.
#[derive(Debug, Clone)]
pub struct DenseDensity {
    pub grid: Grid2D,
    pub vgrid: VelocityGrid,
    pub values: Vec<f64>,
}

impl DenseDensity {
    /// Independent random signs in `{−1, +1}`: violates the monotonicity hypothesis.
    pub fn random_signs(grid: Grid2D, vgrid: VelocityGrid, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len() * vgrid.nv)
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        Self { grid, vgrid, values }
    }
}

impl VelocityDensity for DenseDensity {
    fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn vgrid(&self) -> &VelocityGrid {
        &self.vgrid
    }

    fn value(&self, n: usize, j: usize, k: usize) -> f64 {
        self.values[(n * self.grid.nx + j) * self.vgrid.nv + k]
    }

    fn linf(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HypFReport {
    /// Most negative `(δf(v))(δf(w))` found; 0 when none is negative.
    pub worst_violation: f64,
    pub violations: usize,
    pub points_checked: usize,
    pub pass: bool,
}

/// Checks `(f(t+s, x+y, v) − f(t, x, v))(f(t+s, x+y, w) − f(t, x, w)) ≥ 0`
/// for every velocity pair at every `stride`-th space-time point.
/// Shifts are in cells: `(rows, columns)`, with `rows >= 0`.
pub fn check_hyp_f(kd: &dyn VelocityDensity, shifts: &[(usize, isize)], stride: usize) -> HypFReport {
    let grid = *kd.grid();
    let nv = kd.vgrid().nv;
    let stride = stride.max(1);
    let mut worst = 0.0_f64;
    let mut violations = 0usize;
    let mut checked = 0usize;
    for &(s, y) in shifts {
        let rows: Vec<(f64, usize, usize)> = map_rows(grid.nt.div_ceil(stride), |r| {
            let n = r * stride;
            let mut w = 0.0_f64;
            let mut bad = 0;
            let mut count = 0;
            if n + s >= grid.nt {
                return (0.0, 0, 0);
            }
            for j in (0..grid.nx).step_by(stride) {
                let jj = j as isize + y;
                if jj < 0 || jj >= grid.nx as isize {
                    continue;
                }
                let (mut dmin, mut dmax) = (f64::INFINITY, f64::NEG_INFINITY);
                for k in 0..nv {
                    let d = kd.value(n + s, jj as usize, k) - kd.value(n, j, k);
                    dmin = dmin.min(d);
                    dmax = dmax.max(d);
                }
                let p = (dmin * dmax).min(0.0);
                if p < 0.0 {
                    bad += 1;
                }
                w = w.min(p);
                count += 1;
            }
            (w, bad, count)
        });
        for (w, b, c) in rows {
            worst = worst.min(w);
            violations += b;
            checked += c;
        }
    }
    HypFReport { worst_violation: worst, violations, points_checked: checked, pass: violations == 0 }
}

/// `∫ f ψ dv` by midpoint quadrature over the velocity cells.
pub fn velocity_average(kd: &dyn VelocityDensity, psi: &TestWeight) -> Result<SpaceTimeField> {
    let vg = *kd.vgrid();
    if psi.support > vg.vmax.min(-vg.vmin) + 1e-12 {
        return Err(Error::VelocitySupportExceeded);
    }
    let grid = *kd.grid();
    let weights: Vec<f64> = (0..vg.nv).map(|k| psi.eval(vg.center(k)) * vg.dv()).collect();
    let rows = map_rows(grid.nt, |n| {
        (0..grid.nx)
            .map(|j| {
                let terms: Vec<f64> = (0..vg.nv).map(|k| kd.value(n, j, k) * weights[k]).collect();
                pairwise_sum(&terms)
            })
            .collect::<Vec<_>>()
    });
    SpaceTimeField::new(grid, rows.concat())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum AtomKind {
    /// `Φ_v(u)` (kinetic) or `η(u)` (entropy).
    Density,
    /// `Ψ_v(u)` (kinetic) or `q(u)` (entropy).
    Flux,
}

#[derive(Debug, Clone, Copy)]
struct Atom {
    coef: f64,
    kind: AtomKind,
    u: f64,
}

/// Residual of one space-time box as a combination of density and flux atoms.
#[derive(Debug, Clone, Copy)]
struct BoxResidual {
    atoms: [Atom; 8],
    len: usize,
}

impl BoxResidual {
    fn new() -> Self {
        Self { atoms: [Atom { coef: 0.0, kind: AtomKind::Density, u: 0.0 }; 8], len: 0 }
    }

    fn push(&mut self, coef: f64, kind: AtomKind, u: f64) {
        if coef != 0.0 {
            self.atoms[self.len] = Atom { coef, kind, u };
            self.len += 1;
        }
    }

    fn atoms(&self) -> &[Atom] {
        &self.atoms[..self.len]
    }

    fn span(&self) -> Option<(f64, f64)> {
        let a = self.atoms();
        if a.is_empty() {
            return None;
        }
        let lo = a.iter().map(|x| x.u).fold(f64::INFINITY, f64::min);
        let hi = a.iter().map(|x| x.u).fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            Some((lo, hi))
        } else {
            None
        }
    }

    fn kinetic(&self, flux: &FluxFunction, v: f64) -> f64 {
        self.atoms()
            .iter()
            .map(|a| {
                a.coef
                    * match a.kind {
                        AtomKind::Density => phi(v, a.u),
                        AtomKind::Flux => psi(flux, v, a.u),
                    }
            })
            .sum()
    }

    fn entropy(&self, pair: &EntropyPair) -> f64 {
        let terms: Vec<f64> = self
            .atoms()
            .iter()
            .map(|a| {
                a.coef
                    * match a.kind {
                        AtomKind::Density => pair.eta(a.u),
                        AtomKind::Flux => pair.q(a.u),
                    }
            })
            .collect();
        pairwise_sum(&terms)
    }
}

/// Number of time boxes: one between each pair of consecutive rows.
fn n_tboxes(grid: &Grid2D) -> usize {
    grid.nt - 1
}

/// Time length of `{t in [ta, tb] : σ t in [xa, xb)}`.
fn line_time_in_box(sigma: f64, ta: f64, tb: f64, xa: f64, xb: f64) -> f64 {
    if sigma == 0.0 {
        return if xa <= 0.0 && 0.0 < xb { tb - ta } else { 0.0 };
    }
    let (t1, t2) = if sigma > 0.0 { (xa / sigma, xb / sigma) } else { (xb / sigma, xa / sigma) };
    (tb.min(t2) - ta.max(t1)).max(0.0)
}

/// Builds the residual atoms for box `(n, j)` of a record.
fn box_residual(rec: &SolutionRecord, flux: &FluxFunction, n: usize, j: usize) -> BoxResidual {
    let grid = rec.grid();
    let dt = grid.dt();
    let dx = grid.dx();
    let mut b = BoxResidual::new();
    match rec.scheme {
        Scheme::Godunov | Scheme::LaxFriedrichs => {
            let row0 = rec.field.row(n);
            let row1 = rec.field.row(n + 1);
            let j_i = j as isize;
            let um = ghost(row0, j_i - 1, rec.boundary);
            let u0 = row0[j];
            let up = ghost(row0, j_i + 1, rec.boundary);
            b.push(dx, AtomKind::Density, row1[j]);
            if rec.scheme == Scheme::Godunov {
                b.push(-dx, AtomKind::Density, u0);
                b.push(dt, AtomKind::Flux, godunov_state(flux, u0, up));
                b.push(-dt, AtomKind::Flux, godunov_state(flux, um, u0));
            } else {
                b.push(-0.5 * dx, AtomKind::Density, um);
                b.push(-0.5 * dx, AtomKind::Density, up);
                b.push(0.5 * dt, AtomKind::Flux, up);
                b.push(-0.5 * dt, AtomKind::Flux, um);
            }
        }
        Scheme::ExactRiemann | Scheme::NonentropicShock => {
            let Some((ul, ur)) = rec.riemann_states else {
                return b;
            };
            if ul == ur || (rec.scheme == Scheme::ExactRiemann && ul < ur) {
                return b;
            }
            let sigma = flux.shock_speed(ul, ur);
            let ta = grid.t_center(n);
            let xa = grid.x0 + j as f64 * dx;
            let len = line_time_in_box(sigma, ta, ta + dt, xa, xa + dx);
            if len > 0.0 {
                b.push(len, AtomKind::Flux, ur);
                b.push(-len, AtomKind::Flux, ul);
                b.push(-len * sigma, AtomKind::Density, ur);
                b.push(len * sigma, AtomKind::Density, ul);
            }
        }
    }
    b
}

fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static NODES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    NODES.get_or_init(|| gauss_legendre(8))
}

/// `(∫ g, ∫ |a'| g)` over `[lo, hi]` by 8-point Gauss-Legendre; exact when `g`
/// and `a'` are polynomials of modest degree without kinks inside.
fn gl_pair(g: &dyn Fn(f64) -> f64, flux: &FluxFunction, lo: f64, hi: f64) -> (f64, f64) {
    let (x, w) = gl8();
    let h = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut s = 0.0;
    let mut sa = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let v = mid + h * xi;
        let gv = g(v);
        s += wi * gv;
        sa += wi * gv * flux.da(v).abs();
    }
    (s * h, sa * h)
}

/// Velocity-cell masses of one box: `(k_lo, masses, |a'|-weighted masses)`.
fn box_cell_masses(b: &BoxResidual, flux: &FluxFunction, vg: &VelocityGrid) -> Option<(u32, Vec<f64>, Vec<f64>)> {
    let (lo, hi) = b.span()?;
    let dv = vg.dv();
    let k_lo = (((lo - vg.vmin) / dv).floor().max(0.0) as usize).min(vg.nv - 1);
    let k_hi = (((hi - vg.vmin) / dv).floor().max(0.0) as usize).min(vg.nv - 1);
    let mut breaks: Vec<f64> = b.atoms().iter().map(|a| a.u).collect();
    breaks.push(0.0);
    if !matches!(flux.kind, FluxKind::Burgers) || lo < 0.0 {
        let sonic = flux.inverse_speed(0.0, lo, hi);
        breaks.push(sonic);
    }
    breaks.sort_by(|a, b| a.total_cmp(b));
    let g = |v: f64| b.kinetic(flux, v);
    let mut masses = Vec::with_capacity(k_hi - k_lo + 1);
    let mut amasses = Vec::with_capacity(k_hi - k_lo + 1);
    for k in k_lo..=k_hi {
        let a = vg.edge(k).max(lo);
        let z = vg.edge(k + 1).min(hi);
        let (mut s, mut sa) = (0.0, 0.0);
        if z > a {
            let mut left = a;
            for &bp in breaks.iter().filter(|&&p| p > a && p < z) {
                if bp > left {
                    let (p, q) = gl_pair(&g, flux, left, bp);
                    s += p;
                    sa += q;
                    left = bp;
                }
            }
            let (p, q) = gl_pair(&g, flux, left, z);
            s += p;
            sa += q;
        }
        masses.push(s);
        amasses.push(sa);
    }
    Some((k_lo as u32, masses, amasses))
}

/// Window over boxes (by box centre) and velocities (by overlap).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Window {
    pub ta: f64,
    pub tb: f64,
    pub xa: f64,
    pub xb: f64,
    pub vlo: f64,
    pub vhi: f64,
}

impl Window {
    pub fn new(ta: f64, tb: f64, xa: f64, xb: f64, vlo: f64, vhi: f64) -> Self {
        Self { ta, tb, xa, xb, vlo, vhi }
    }

    pub fn everything() -> Self {
        let inf = f64::INFINITY;
        Self::new(-inf, inf, -inf, inf, -inf, inf)
    }

    pub fn from_box(b: &TxBox, vlo: f64, vhi: f64) -> Self {
        Self::new(b.ta, b.tb, b.xa, b.xb, vlo, vhi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct WindowTotals {
    pub positive: f64,
    /// Magnitude of the negative part.
    pub negative: f64,
    pub total_variation: f64,
    pub net: f64,
    /// `∫ |a'(v)| d|m|`.
    pub aprime_weighted: f64,
}

/// Signed measure stored as cell masses on `(t, x, v)` boxes (sparse in `v`),
/// or on `(t, x)` boxes when it comes from a single entropy pair.
#[derive(Debug, Clone)]
pub struct SignedMeasure {
    pub grid: Grid2D,
    pub vgrid: Option<VelocityGrid>,
    offsets: Vec<usize>,
    k_lo: Vec<u32>,
    mass: Vec<f64>,
    amass: Vec<f64>,
    /// Largest `|m(v_max)|` over boxes divided by the box area.
    pub closure_defect: f64,
    pub closure_flag: bool,
}

impl SignedMeasure {
    pub fn n_tboxes(&self) -> usize {
        n_tboxes(&self.grid)
    }

    /// Centre of box `(n, j)`.
    pub fn box_center(&self, n: usize, j: usize) -> (f64, f64) {
        (self.grid.t_center(n) + 0.5 * self.grid.dt(), self.grid.x_center(j))
    }

    fn box_index(&self, n: usize, j: usize) -> usize {
        n * self.grid.nx + j
    }

    /// Velocity-cell masses of box `(n, j)` as `(first cell index, masses)`.
    pub fn box_masses(&self, n: usize, j: usize) -> (usize, &[f64]) {
        let b = self.box_index(n, j);
        let (s, e) = (self.offsets[b], self.offsets[b + 1]);
        (self.k_lo[b] as usize, &self.mass[s..e])
    }

    fn v_overlap(&self, k: usize, w: &Window) -> f64 {
        match &self.vgrid {
            None => 1.0,
            Some(vg) => {
                let a = vg.edge(k);
                let b = vg.edge(k + 1);
                ((b.min(w.vhi) - a.max(w.vlo)) / (b - a)).clamp(0.0, 1.0)
            }
        }
    }

    pub fn totals(&self, w: &Window) -> WindowTotals {
        let nx = self.grid.nx;
        let rows = map_rows(self.n_tboxes(), |n| {
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            let mut aw = Vec::new();
            let (t, _) = self.box_center(n, 0);
            if t < w.ta || t > w.tb {
                return (0.0, 0.0, 0.0);
            }
            for j in 0..nx {
                let x = self.grid.x_center(j);
                if x < w.xa || x > w.xb {
                    continue;
                }
                let b = self.box_index(n, j);
                let k0 = self.k_lo[b] as usize;
                for (i, idx) in (self.offsets[b]..self.offsets[b + 1]).enumerate() {
                    let frac = self.v_overlap(k0 + i, w);
                    if frac == 0.0 {
                        continue;
                    }
                    let m = self.mass[idx] * frac;
                    if m >= 0.0 {
                        pos.push(m);
                    } else {
                        neg.push(-m);
                    }
                    aw.push(self.amass[idx].abs() * frac);
                }
            }
            (pairwise_sum(&pos), pairwise_sum(&neg), pairwise_sum(&aw))
        });
        let p = pairwise_sum(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
        let q = pairwise_sum(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
        let a = pairwise_sum(&rows.iter().map(|r| r.2).collect::<Vec<_>>());
        WindowTotals { positive: p, negative: q, total_variation: p + q, net: p - q, aprime_weighted: a }
    }

    /// Nonzero cell masses inside the window as `(n, j, k, mass)`.
    pub fn triplets(&self, w: &Window) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for n in 0..self.n_tboxes() {
            for j in 0..self.grid.nx {
                let (t, x) = self.box_center(n, j);
                if t < w.ta || t > w.tb || x < w.xa || x > w.xb {
                    continue;
                }
                let (k0, ms) = self.box_masses(n, j);
                for (i, &m) in ms.iter().enumerate() {
                    if m != 0.0 && self.v_overlap(k0 + i, w) > 0.0 {
                        out.push((n, j, k0 + i, m));
                    }
                }
            }
        }
        out
    }

    /// `Σ_boxes χ(centre) · mass`, the measure tested against a cutoff.
    pub fn tested(&self, chi: &Cutoff) -> f64 {
        let rows = map_rows(self.n_tboxes(), |n| {
            let terms: Vec<f64> = (0..self.grid.nx)
                .map(|j| {
                    let (t, x) = self.box_center(n, j);
                    let c = chi.eval(t, x);
                    if c == 0.0 {
                        return 0.0;
                    }
                    let (_, ms) = self.box_masses(n, j);
                    c * pairwise_sum(ms)
                })
                .collect();
            pairwise_sum(&terms)
        });
        pairwise_sum(&rows)
    }
}

/// Builds a measure from per-box sparse rows computed in parallel.
fn assemble(
    grid: Grid2D,
    vgrid: Option<VelocityGrid>,
    rows: Vec<Vec<Option<(u32, Vec<f64>, Vec<f64>)>>>,
    closure_defect: f64,
    closure_flag: bool,
) -> SignedMeasure {
    let nb = grid.nx * n_tboxes(&grid);
    let mut offsets = Vec::with_capacity(nb + 1);
    let mut k_lo = Vec::with_capacity(nb);
    let mut mass = Vec::new();
    let mut amass = Vec::new();
    offsets.push(0);
    for row in rows {
        for cell in row {
            match cell {
                Some((k, m, a)) => {
                    k_lo.push(k);
                    mass.extend_from_slice(&m);
                    amass.extend_from_slice(&a);
                }
                None => k_lo.push(0),
            }
            offsets.push(mass.len());
        }
    }
    SignedMeasure { grid, vgrid, offsets, k_lo, mass, amass, closure_defect, closure_flag }
}

/// Kinetic measure `m` of a lifted record.
pub fn extract_measure(kd: &KineticDensity, flux: &FluxFunction) -> Result<SignedMeasure> {
    let rec = &*kd.rec;
    let grid = *rec.grid();
    let vg = kd.vgrid;
    let area = grid.dt() * grid.dx();
    let rows = map_rows(n_tboxes(&grid), |n| {
        let mut defect = 0.0_f64;
        let cells: Vec<_> = (0..grid.nx)
            .map(|j| {
                let b = box_residual(rec, flux, n, j);
                defect = defect.max(b.kinetic(flux, vg.vmax).abs());
                box_cell_masses(&b, flux, &vg)
            })
            .collect();
        (cells, defect)
    });
    let defect = rows.iter().map(|r| r.1).fold(0.0, f64::max) / area;
    let flag = defect > 10.0 * (grid.dx() + grid.dt());
    Ok(assemble(grid, Some(vg), rows.into_iter().map(|r| r.0).collect(), defect, flag))
}

/// Entropy-production residual `∂_t η(u) + ∂_x q(u)` (that is, `−μ`) binned to boxes.
#[derive(Debug, Clone)]
pub struct EntropyProduction {
    /// Residual masses per box; their sign convention is that of `−μ`.
    pub residual: SignedMeasure,
    /// Window of the cutoff the production was requested against.
    pub window: TxBox,
    /// `|direct residual − (−∫η'' dm)|` over the window, when computed.
    pub cross_check: Option<f64>,
}

impl EntropyProduction {
    /// Total residual mass in the cutoff window (negative for dissipating shocks).
    pub fn window_mass(&self) -> f64 {
        self.residual.totals(&Window::from_box(&self.window, f64::NEG_INFINITY, f64::INFINITY)).net
    }

    /// Total `μ` mass in the cutoff window.
    pub fn mu_total(&self) -> f64 {
        -self.window_mass()
    }

    /// `∫ |μ|` over a window.
    pub fn mu_abs(&self, w: &Window) -> f64 {
        self.residual.totals(w).total_variation
    }
}

/// Entropy-production residual of `(η, q)` along the record, plus the
/// cross-check against `−∫ η'' dm` when a velocity grid is supplied.
pub fn entropy_production(
    rec: &SolutionRecord,
    pair: &EntropyPair,
    testfn: &Cutoff,
    cross_check_vgrid: Option<VelocityGrid>,
) -> Result<EntropyProduction> {
    let grid = *rec.grid();
    check_support_inside(&grid, testfn)?;
    let flux = &pair.flux;
    let rows = map_rows(n_tboxes(&grid), |n| {
        (0..grid.nx)
            .map(|j| {
                let b = box_residual(rec, flux, n, j);
                if b.len == 0 {
                    return None;
                }
                let r = b.entropy(pair);
                Some((0u32, vec![r], vec![0.0]))
            })
            .collect::<Vec<_>>()
    });
    let residual = assemble(grid, None, rows, 0.0, false);
    let window = testfn.txbox;
    let cross_check = match cross_check_vgrid {
        None => None,
        Some(vg) => {
            let kd = lift(rec, vg)?;
            let m = extract_measure(&kd, flux)?;
            let w = Window::from_box(&window, f64::NEG_INFINITY, f64::INFINITY);
            let direct = residual.totals(&w).net;
            let via_m = -eta2_weighted(&m, pair, &w);
            Some((direct - via_m).abs())
        }
    };
    Ok(EntropyProduction { residual, window, cross_check })
}

/// `∫ η''(v) dm` over a window, with η'' taken at velocity cell centres.
pub fn eta2_weighted(m: &SignedMeasure, pair: &EntropyPair, w: &Window) -> f64 {
    let Some(vg) = m.vgrid else { return 0.0 };
    let rows = map_rows(m.n_tboxes(), |n| {
        let mut terms = Vec::new();
        for j in 0..m.grid.nx {
            let (t, x) = m.box_center(n, j);
            if t < w.ta || t > w.tb || x < w.xa || x > w.xb {
                continue;
            }
            let (k0, ms) = m.box_masses(n, j);
            for (i, &mass) in ms.iter().enumerate() {
                terms.push(pair.d2eta(vg.center(k0 + i)) * mass);
            }
        }
        pairwise_sum(&terms)
    });
    pairwise_sum(&rows)
}

/// `Δ(u, ū) = ∬_{v>w} (a'(v) − a'(w)) (M_u − M_ū)(v) (M_u − M_ū)(w) dv dw`
/// by tensor Gauss-Legendre quadrature over the ordered pairs, with panel
/// breaks at `u`, `ū` and 0.
pub fn delta(u: f64, ubar: f64, flux: &FluxFunction, vgrid: &VelocityGrid) -> Result<f64> {
    let tol = 1e-12;
    for s in [u, ubar] {
        if s < vgrid.vmin - tol || s > vgrid.vmax + tol {
            return Err(Error::VelocitySupportExceeded);
        }
    }
    if u == ubar {
        return Ok(0.0);
    }
    let g = |v: f64| m_indicator(u, v) - m_indicator(ubar, v);
    let mut breaks = vec![vgrid.vmin, vgrid.vmax, u, ubar, 0.0];
    breaks.retain(|b| *b >= vgrid.vmin && *b <= vgrid.vmax);
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    let (x, wts) = gl8();
    // integrate over panels [p, q] each split in two halves
    let panels = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut pts: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
        pts.insert(0, lo);
        pts.push(hi);
        for p in pts.windows(2) {
            let m = 0.5 * (p[0] + p[1]);
            out.push((p[0], m));
            out.push((m, p[1]));
        }
        out
    };
    let inner = |w: f64| -> f64 {
        let gw = g(w);
        if gw == 0.0 {
            return 0.0;
        }
        let daw = flux.da(w);
        let mut s = 0.0;
        for (a, b) in panels(w, vgrid.vmax) {
            let h = 0.5 * (b - a);
            let c = 0.5 * (a + b);
            for (xi, wi) in x.iter().zip(wts) {
                let v = c + h * xi;
                s += wi * h * (flux.da(v) - daw) * g(v);
            }
        }
        s * gw
    };
    let mut total = 0.0;
    for (a, b) in panels(vgrid.vmin, vgrid.vmax) {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        for (xi, wi) in x.iter().zip(wts) {
            total += wi * h * inner(c + h * xi);
        }
    }
    Ok(total)
}

/// Closed form of `Δ` for tagged fluxes:
/// `∫_lo^hi a'(v)(2v − lo − hi) dv` with `[lo, hi]` the state interval.
pub fn closed_form_delta(u: f64, ubar: f64, flux: &FluxFunction) -> Option<f64> {
    let (lo, hi) = (u.min(ubar), u.max(ubar));
    match flux.kind {
        FluxKind::Burgers => Some((hi - lo).powi(3) / 6.0),
        FluxKind::EvenPower(n) => {
            let p = (2 * n - 1) as i32;
            let i1 = (hi.powi(p + 2) - lo.powi(p + 2)) / (p + 2) as f64;
            let i0 = (hi.powi(p + 1) - lo.powi(p + 1)) / (p + 1) as f64;
            Some(2.0 * i1 - (lo + hi) * i0)
        }
        FluxKind::Polynomial(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_bump_cutoff;
    use crate::flux_entropy::{make_entropy_pair, EntropySpec};
    use crate::solver::{exact_riemann, nonentropic_shock, nt_for_cfl, solve_fv, InitialData};
    use proptest::prelude::*;

    fn vg(u: f64) -> VelocityGrid {
        VelocityGrid::covering(u, 64).unwrap()
    }

    #[test]
    fn indicator_and_primitives() {
        assert_eq!(m_indicator(2.0, 1.0), 1.0);
        assert_eq!(m_indicator(-1.0, -0.5), -1.0);
        assert_eq!(m_indicator(0.0, 0.0), 0.0);
        assert_eq!(m_indicator(0.0, -0.1), 0.0);
        let f = FluxFunction::burgers();
        // Φ_v and Ψ_v at v above every state reduce to u and a(u) − a(0)
        assert_eq!(phi(5.0, -0.7), -0.7);
        assert!((psi(&f, 5.0, -0.7) - 0.245).abs() < 1e-15);
        assert_eq!(phi(-5.0, 0.3), 0.0);
    }

    fn constant_record(c: f64, nx: usize) -> SolutionRecord {
        let grid = Grid2D::new(0.0, 1.0, -1.0, 1.0, nx, nx).unwrap();
        exact_riemann(c, c, &FluxFunction::burgers(), grid).unwrap()
    }

    #[test]
    fn lift_cell_values() {
        let grid = Grid2D::new(0.0, 1.0, 0.0, 1.0, 4, 4).unwrap();
        let mut vals = vec![0.0; 16];
        vals[0] = 2.0;
        vals[1] = -1.0;
        let rec = SolutionRecord {
            field: SpaceTimeField::new(grid, vals).unwrap(),
            flux: FluxFunction::burgers(),
            scheme: Scheme::Godunov,
            cfl: 0.4,
            boundary: crate::solver::Boundary::Outflow,
            riemann_states: None,
            init_range: (-1.0, 2.0),
        };
        let v = VelocityGrid::new(-3.0, 3.0, 6).unwrap();
        let kd = lift(&rec, v).unwrap();
        // cell 4 is centred at 1.0
        assert_eq!(kd.value(0, 0, 4), 1.0);
        // cell 2 is centred at −0.5
        assert_eq!(kd.value(0, 1, 2), -1.0);
        assert!((0..6).all(|k| kd.value(0, 2, k) == 0.0));
        let small = VelocityGrid::new(-2.0, 2.0, 8).unwrap();
        assert_eq!(lift(&rec, small).unwrap_err().to_string(), "velocity support exceeded");
    }

    #[test]
    fn constant_state_has_zero_measure() {
        let rec = constant_record(0.6, 32);
        let kd = lift(&rec, vg(0.6)).unwrap();
        let m = extract_measure(&kd, &FluxFunction::burgers()).unwrap();
        assert_eq!(m.totals(&Window::everything()).total_variation, 0.0);
        let init = InitialData::Riemann { ul: 0.3, ur: 0.3 };
        let grid = Grid2D::new(0.0, 1.0, -1.0, 1.0, 64, 64).unwrap();
        let fv = solve_fv(&init, &FluxFunction::burgers(), grid, Scheme::Godunov, 0.45).unwrap();
        let m = extract_measure(&lift(&fv, vg(0.3)).unwrap(), &FluxFunction::burgers()).unwrap();
        assert!(m.totals(&Window::everything()).total_variation < 1e-15);
    }

    fn riemann_grid(nx: usize) -> Grid2D {
        let dx = 2.0 / nx as f64;
        Grid2D::new(0.0, 1.0, -1.0, 1.0, nt_for_cfl(0.0, 1.0, dx, 0.45, 1.0), nx).unwrap()
    }

    #[test]
    fn godunov_shock_measure_is_nonnegative_and_on_the_line() {
        let f = FluxFunction::burgers();
        let rec = solve_fv(&InitialData::Riemann { ul: 1.0, ur: 0.0 }, &f, riemann_grid(200), Scheme::Godunov, 0.45).unwrap();
        let m = extract_measure(&lift(&rec, vg(1.0)).unwrap(), &f).unwrap();
        let tot = m.totals(&Window::everything());
        assert!(tot.negative <= 1e-12 * tot.total_variation);
        // the shock dissipates ∫ v(1−v)/2 dv = 1/12 of m per unit time
        let t_span = rec.grid().dt() * (rec.grid().nt - 1) as f64;
        assert!((tot.positive / t_span - 1.0 / 12.0).abs() < 0.02, "{}", tot.positive / t_span);
        let near = m.totals(&Window::new(0.2, 1.0, -10.0, 10.0, -2.0, 2.0));
        let off = Window { xa: -1.0, xb: 0.0, ..Window::new(0.2, 1.0, 0.0, 0.0, -2.0, 2.0) };
        assert!(m.totals(&off).total_variation < 1e-3 * near.total_variation);
        assert!(!m.closure_flag);
    }

    #[test]
    fn lax_friedrichs_measure_is_nonnegative() {
        let f = FluxFunction::burgers();
        let init = InitialData::Sine { amplitude: 1.0, period: 1.0 };
        let nx = 128;
        let grid = Grid2D::new(0.0, 0.5, 0.0, 1.0, nt_for_cfl(0.0, 0.5, 1.0 / nx as f64, 0.45, 1.0), nx).unwrap();
        let rec = solve_fv(&init, &f, grid, Scheme::LaxFriedrichs, 0.45).unwrap();
        let m = extract_measure(&lift(&rec, vg(1.0)).unwrap(), &f).unwrap();
        let tot = m.totals(&Window::everything());
        assert!(tot.positive > 0.0);
        assert!(tot.negative <= 1e-12 * tot.positive);
    }

    #[test]
    fn nonentropic_shock_measure_is_nonpositive() {
        let f = FluxFunction::burgers();
        let rec = nonentropic_shock(0.0, 1.0, &f, riemann_grid(100)).unwrap();
        let m = extract_measure(&lift(&rec, vg(1.0)).unwrap(), &f).unwrap();
        let tot = m.totals(&Window::everything());
        assert_eq!(tot.positive, 0.0);
        assert!(tot.negative > 0.0);
        let t_span = rec.grid().dt() * (rec.grid().nt - 1) as f64;
        assert!((tot.negative / t_span - 1.0 / 12.0).abs() < 1e-9);
    }

    #[test]
    fn entropy_production_signs_and_cross_check() {
        let f = FluxFunction::burgers();
        let pair = make_entropy_pair(EntropySpec::Quadratic, &f, 1.0).unwrap();
        let cut = make_bump_cutoff(TxBox::new(0.1, 0.9, -0.8, 0.8), 0.5).unwrap();
        let grid = riemann_grid(200);
        let shock = solve_fv(&InitialData::Riemann { ul: 1.0, ur: 0.0 }, &f, grid, Scheme::Godunov, 0.45).unwrap();
        let ep = entropy_production(&shock, &pair, &cut, Some(vg(1.0))).unwrap();
        assert!(ep.window_mass() < 0.0);
        assert!(ep.cross_check.unwrap() < 1e-12);
        let ex = exact_riemann(1.0, 0.0, &f, grid).unwrap();
        let ep = entropy_production(&ex, &pair, &cut, None).unwrap();
        // dissipation rate 1/12 over the window's time span 0.8
        assert!((ep.window_mass() + 0.8 / 12.0).abs() < 0.01);
        let ne = nonentropic_shock(0.0, 1.0, &f, grid).unwrap();
        let ep = entropy_production(&ne, &pair, &cut, None).unwrap();
        assert!(ep.mu_total() < 0.0);
    }

    #[test]
    fn velocity_average_recovers_u() {
        let f = FluxFunction::burgers();
        let init = InitialData::Sine { amplitude: 0.8, period: 1.0 };
        let grid = Grid2D::new(0.0, 0.3, 0.0, 1.0, 40, 64).unwrap();
        let rec = solve_fv(&init, &f, grid, Scheme::Godunov, 0.45).unwrap();
        let kd = lift(&rec, VelocityGrid::covering(1.0, 40).unwrap()).unwrap();
        let psi = TestWeight::plateau(1.04, 0.96, |v| v).unwrap();
        let avg = velocity_average(&kd, &psi).unwrap();
        for (a, b) in avg.values().iter().zip(rec.field.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let far = TestWeight::custom(0.02, |_| 1.0, |_| 0.0, |v| v).unwrap();
        let zero_rec = exact_riemann(0.0, 0.0, &f, grid).unwrap();
        let z = velocity_average(&lift(&zero_rec, VelocityGrid::covering(1.0, 40).unwrap()).unwrap(), &far).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn velocity_average_against_riemann_sum() {
        let f = FluxFunction::burgers();
        let grid = Grid2D::new(0.0, 1.0, -1.0, 1.0, 16, 16).unwrap();
        let rec = exact_riemann(0.7, -0.4, &f, grid).unwrap();
        let v = VelocityGrid::covering(1.0, 200).unwrap();
        let kd = lift(&rec, v).unwrap();
        let w = |s: f64| (1.0 - s * s).max(0.0).powi(2);
        let psi = TestWeight::custom(1.0, w, |s| -4.0 * s * (1.0 - s * s), |s| s).unwrap();
        let avg = velocity_average(&kd, &psi).unwrap();
        let u = rec.field.get(3, 2);
        // independent fine Riemann sum of ∫ M_u ψ
        let n = 200_000;
        let h = 2.0 / n as f64;
        let oracle: f64 = (0..n).map(|i| {
            let s = -1.0 + (i as f64 + 0.5) * h;
            m_indicator(u, s) * w(s) * h
        }).sum();
        assert!((avg.get(3, 2) - oracle).abs() < 1e-4, "{} vs {oracle}", avg.get(3, 2));
    }

    #[test]
    fn hyp_f_fixtures() {
        let f = FluxFunction::burgers();
        let init = InitialData::Sine { amplitude: 1.0, period: 1.0 };
        let grid = Grid2D::new(0.0, 0.4, 0.0, 1.0, 80, 64).unwrap();
        let rec = solve_fv(&init, &f, grid, Scheme::Godunov, 0.45).unwrap();
        let v = VelocityGrid::covering(1.0, 32).unwrap();
        let shifts = [(0, 1), (0, -3), (2, 0), (3, 5)];
        assert!(check_hyp_f(&lift(&rec, v).unwrap(), &shifts, 1).pass);
        let tanh = monotone_profile_density(&rec.field, Profile::Tanh { scale: 0.3 }, v);
        assert!(check_hyp_f(&tanh, &shifts, 1).pass);
        let cst = monotone_profile_density(&rec.field, Profile::Constant(0.5), v);
        assert!(check_hyp_f(&cst, &shifts, 1).pass);
        let adv = DenseDensity::random_signs(grid, v, 7);
        let r = check_hyp_f(&adv, &shifts, 1);
        assert!(!r.pass && r.worst_violation < 0.0);
    }

    #[test]
    fn heaviside_profile_reproduces_indicator() {
        let grid = Grid2D::new(0.0, 1.0, 0.0, 1.0, 4, 4).unwrap();
        let rho = SpaceTimeField::from_fn(grid, |t, x| 0.3 + 0.5 * t * x).unwrap();
        let v = VelocityGrid::new(-1.0, 1.0, 40).unwrap();
        let d = monotone_profile_density(&rho, Profile::Heaviside, v);
        for k in 0..40 {
            let expect = if v.center(k) <= rho.get(1, 2) { 1.0 } else { 0.0 };
            assert_eq!(d.value(1, 2, k), expect);
        }
    }

    #[test]
    fn delta_closed_forms() {
        let b = FluxFunction::burgers();
        let v = VelocityGrid::covering(1.0, 64).unwrap();
        assert!((delta(1.0, 0.0, &b, &v).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(closed_form_delta(1.0, 0.0, &b), Some(1.0 / 6.0));
        assert_eq!(delta(0.3, 0.3, &b, &v).unwrap(), 0.0);
        let q = FluxFunction::even_power(2);
        assert!((delta(1.0, 0.0, &q, &v).unwrap() - 0.15).abs() < 1e-12);
        assert!((delta(1.0, -1.0, &q, &v).unwrap() - 0.8).abs() < 1e-12);
        assert!((closed_form_delta(1.0, -1.0, &q).unwrap() - 0.8).abs() < 1e-14);
    }

    #[test]
    fn delta_matches_nested_midpoint_oracle() {
        let q = FluxFunction::polynomial(vec![0.0, 0.2, 0.5, 0.0, 0.25]);
        let v = VelocityGrid::covering(1.0, 64).unwrap();
        let (u, ub) = (0.7, -0.45);
        let n = 2000;
        let h = (u - ub) / n as f64;
        let mut oracle = 0.0;
        for i in 0..n {
            let w = ub + (i as f64 + 0.5) * h;
            for k in i + 1..n {
                let s = ub + (k as f64 + 0.5) * h;
                oracle += (q.da(s) - q.da(w)) * h * h;
            }
        }
        let d = delta(u, ub, &q, &v).unwrap();
        assert!((d - oracle).abs() < 1e-5, "{d} vs {oracle}");
    }

    proptest! {
        #[test]
        fn delta_symmetric(u in -1.0f64..1.0, ub in -1.0f64..1.0) {
            let q = FluxFunction::even_power(2);
            let v = VelocityGrid::covering(1.0, 16).unwrap();
            let a = delta(u, ub, &q, &v).unwrap();
            let b = delta(ub, u, &q, &v).unwrap();
            prop_assert!((a - b).abs() <= 1e-13);
            prop_assert!((a - closed_form_delta(u, ub, &q).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn lift_zeroth_moment_is_u(u in -1.0f64..1.0) {
            let v = VelocityGrid::covering(1.0, 24).unwrap();
            let s: f64 = (0..24).map(|k| {
                phi(v.edge(k + 1), u) - phi(v.edge(k), u)
            }).sum();
            prop_assert!((s - u).abs() < 1e-14);
        }
    }
}
