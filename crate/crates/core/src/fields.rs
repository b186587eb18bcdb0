//! Uniform grids, sampled space-time fields, smooth cutoffs and the
//! quadrature primitives every other module builds on.
//!
//! All reductions go through [`pairwise_sum`] so that results are bit-identical
//! regardless of how many worker threads evaluated the summands.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Sequential pairwise (tree) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 16;
    if xs.len() <= BASE {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Evaluates `f` for every row index in parallel and returns the results in
/// row order. Combined with [`pairwise_sum`] on the returned vector this gives
/// a reduction whose value does not depend on the thread count.
pub fn map_rows<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Builds the global rayon pool, honouring `BESOVCLAW_THREADS` when set.
/// Calling it twice is harmless; the second call is ignored.
pub fn init_thread_pool_from_env() {
    let threads = std::env::var("BESOVCLAW_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let _ = builder.build_global();
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Grid2D {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
    pub nt: usize,
    pub nx: usize,
}

impl Grid2D {
    pub fn new(t0: f64, t1: f64, x0: f64, x1: f64, nt: usize, nx: usize) -> Result<Self> {
        let all_finite = [t0, t1, x0, x1].iter().all(|v| v.is_finite());
        if !all_finite || t1 <= t0 || x1 <= x0 {
            return Err(Error::InvalidInput(format!(
                "grid box [{t0},{t1}]x[{x0},{x1}] is empty"
            )));
        }
        if nt < 4 || nx < 4 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 4 cells per axis (nt={nt}, nx={nx})"
            )));
        }
        Ok(Self { t0, t1, x0, x1, nt, nx })
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.nt as f64
    }

    pub fn dx(&self) -> f64 {
        (self.x1 - self.x0) / self.nx as f64
    }

    /// Time of row `n` (cell centre).
    pub fn t_center(&self, n: usize) -> f64 {
        self.t0 + (n as f64 + 0.5) * self.dt()
    }

    /// Abscissa of column `j` (cell centre).
    pub fn x_center(&self, j: usize) -> f64 {
        self.x0 + (j as f64 + 0.5) * self.dx()
    }

    pub fn len(&self) -> usize {
        self.nt * self.nx
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VelocityGrid {
    pub vmin: f64,
    pub vmax: f64,
    pub nv: usize,
}

impl VelocityGrid {
    pub fn new(vmin: f64, vmax: f64, nv: usize) -> Result<Self> {
        if !(vmin.is_finite() && vmax.is_finite()) || vmin >= vmax {
            return Err(Error::InvalidInput(format!(
                "velocity range [{vmin},{vmax}] is empty"
            )));
        }
        if nv < 4 {
            return Err(Error::InvalidInput(format!(
                "velocity grid needs at least 4 cells (nv={nv})"
            )));
        }
        Ok(Self { vmin, vmax, nv })
    }

    /// Symmetric grid whose outermost cells lie entirely beyond `[-u, u]`,
    /// i.e. it spans `[-u-dv, u+dv]`.
    pub fn covering(u: f64, nv: usize) -> Result<Self> {
        if nv < 4 {
            return Err(Error::InvalidInput(format!(
                "velocity grid needs at least 4 cells (nv={nv})"
            )));
        }
        let u = if u > 0.0 { u } else { 1.0 };
        let vmax = u * nv as f64 / (nv as f64 - 2.0);
        Self::new(-vmax, vmax, nv)
    }

    pub fn dv(&self) -> f64 {
        (self.vmax - self.vmin) / self.nv as f64
    }

    pub fn center(&self, k: usize) -> f64 {
        self.vmin + (k as f64 + 0.5) * self.dv()
    }

    /// Left edge of cell `k`; `edge(nv)` is `vmax`.
    pub fn edge(&self, k: usize) -> f64 {
        if k == self.nv {
            self.vmax
        } else {
            self.vmin + k as f64 * self.dv()
        }
    }
}

/// Cell-centred samples `u(t_n, x_j)` stored row-major (time-major).
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: Grid2D,
    values: Vec<f64>,
    supnorm: f64,
}

impl SpaceTimeField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} samples, grid expects {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let supnorm = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(Self { grid, values, supnorm })
    }

    /// Samples `f(t, x)` at every cell centre.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64 + Sync + Send) -> Result<Self> {
        let rows = map_rows(grid.nt, |n| {
            let t = grid.t_center(n);
            (0..grid.nx).map(|j| f(t, grid.x_center(j))).collect::<Vec<_>>()
        });
        Self::new(grid, rows.concat())
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![0.0; grid.len()], supnorm: 0.0 }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn supnorm(&self) -> f64 {
        self.supnorm
    }

    #[inline]
    pub fn get(&self, n: usize, j: usize) -> f64 {
        self.values[n * self.grid.nx + j]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        let nx = self.grid.nx;
        &self.values[n * nx..(n + 1) * nx]
    }

    /// Pointwise map into a new field on the same grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

/// Rectangle `[ta, tb] x [xa, xb]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TxBox {
    pub ta: f64,
    pub tb: f64,
    pub xa: f64,
    pub xb: f64,
}

impl TxBox {
    pub fn new(ta: f64, tb: f64, xa: f64, xb: f64) -> Self {
        Self { ta, tb, xa, xb }
    }

    pub fn width_t(&self) -> f64 {
        self.tb - self.ta
    }

    pub fn width_x(&self) -> f64 {
        self.xb - self.xa
    }

    pub fn contains(&self, t: f64, x: f64) -> bool {
        t >= self.ta && t <= self.tb && x >= self.xa && x <= self.xb
    }
}

fn edge_weight(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

fn edge_weight_deriv(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp() / (s * s)
    }
}

/// C-infinity step: 0 for `r <= 0`, 1 for `r >= 1`.
pub fn smooth_step(r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if r >= 1.0 {
        return 1.0;
    }
    let g0 = edge_weight(r);
    let g1 = edge_weight(1.0 - r);
    g0 / (g0 + g1)
}

pub fn smooth_step_deriv(r: f64) -> f64 {
    if r <= 0.0 || r >= 1.0 {
        return 0.0;
    }
    let g0 = edge_weight(r);
    let g1 = edge_weight(1.0 - r);
    let d0 = edge_weight_deriv(r);
    let d1 = edge_weight_deriv(1.0 - r);
    let den = g0 + g1;
    (d0 * g1 + g0 * d1) / (den * den)
}

/// One-dimensional smooth plateau: equal to 1 on the central
/// `plateau` fraction of `[lo, hi]`, vanishing outside `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PlateauProfile {
    pub lo: f64,
    pub hi: f64,
    pub plateau: f64,
}

impl PlateauProfile {
    pub fn new(lo: f64, hi: f64, plateau: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::EmptySupport);
        }
        if !(plateau > 0.0 && plateau < 1.0) {
            return Err(Error::InvalidInput(format!(
                "plateau fraction {plateau} must lie in (0,1)"
            )));
        }
        Ok(Self { lo, hi, plateau })
    }

    fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn half(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    fn ramp(&self) -> f64 {
        (1.0 - self.plateau) * self.half()
    }

    pub fn value(&self, s: f64) -> f64 {
        let d = (s - self.center()).abs();
        let half = self.half();
        if d >= half {
            return 0.0;
        }
        smooth_step((half - d) / self.ramp())
    }

    pub fn deriv(&self, s: f64) -> f64 {
        let off = s - self.center();
        let d = off.abs();
        let half = self.half();
        if d >= half {
            return 0.0;
        }
        let r = (half - d) / self.ramp();
        -off.signum() * smooth_step_deriv(r) / self.ramp()
    }

    /// `∫_a^b profile`, clipped to the support.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(self.lo), b.min(self.hi));
        if b <= a {
            return 0.0;
        }
        gauss_legendre_composite(&|s| self.value(s), a, b, 2)
    }

    /// Composite Gauss-Legendre integral of `g(profile(s), s)` over the support.
    fn integrate(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let plateau_lo = self.center() - self.plateau * self.half();
        let plateau_hi = self.center() + self.plateau * self.half();
        let f = |s: f64| g(self.value(s), s);
        gauss_legendre_composite(&f, self.lo, plateau_lo, 64)
            + gauss_legendre_composite(&f, plateau_lo, plateau_hi, 16)
            + gauss_legendre_composite(&f, plateau_hi, self.hi, 64)
    }
}

/// Cached norms of a [`Cutoff`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CutoffNorms {
    pub linf: f64,
    pub chi_l1: f64,
    pub chi2_l1: f64,
    pub dt_l1: f64,
    pub dx_l1: f64,
}

/// Tensor-product cutoff `chi(t,x) = b_t(t) b_x(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cutoff {
    pub txbox: TxBox,
    pub plateau: f64,
    bt: PlateauProfile,
    bx: PlateauProfile,
    norms: CutoffNorms,
}

/// Builds the smooth cutoff equal to 1 on the central `plateau_fraction` of
/// `txbox` (in each direction) and vanishing outside it.
pub fn make_bump_cutoff(txbox: TxBox, plateau_fraction: f64) -> Result<Cutoff> {
    Cutoff::new(txbox, plateau_fraction)
}

impl Cutoff {
    pub fn new(txbox: TxBox, plateau_fraction: f64) -> Result<Self> {
        let bt = PlateauProfile::new(txbox.ta, txbox.tb, plateau_fraction)?;
        let bx = PlateauProfile::new(txbox.xa, txbox.xb, plateau_fraction)?;
        let int_t = bt.integrate(|b, _| b);
        let int_x = bx.integrate(|b, _| b);
        let int_t2 = bt.integrate(|b, _| b * b);
        let int_x2 = bx.integrate(|b, _| b * b);
        // each profile rises monotonically from 0 to 1 and falls back: total variation 2
        let norms = CutoffNorms {
            linf: 1.0,
            chi_l1: int_t * int_x,
            chi2_l1: int_t2 * int_x2,
            dt_l1: 2.0 * int_x,
            dx_l1: 2.0 * int_t,
        };
        Ok(Self { txbox, plateau: plateau_fraction, bt, bx, norms })
    }

    pub fn norms(&self) -> &CutoffNorms {
        &self.norms
    }

    /// Time factor `b_t`.
    pub fn profile_t(&self) -> &PlateauProfile {
        &self.bt
    }

    /// Space factor `b_x`.
    pub fn profile_x(&self) -> &PlateauProfile {
        &self.bx
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.bt.value(t) * self.bx.value(x)
    }

    #[inline]
    pub fn dt(&self, t: f64, x: f64) -> f64 {
        self.bt.deriv(t) * self.bx.value(x)
    }

    #[inline]
    pub fn dx(&self, t: f64, x: f64) -> f64 {
        self.bt.value(t) * self.bx.deriv(x)
    }

    /// Same cutoff multiplied by a constant; norms scale accordingly.
    pub fn scaled(&self, lambda: f64) -> ScaledCutoff<'_> {
        ScaledCutoff { base: self, lambda }
    }

    /// `∫∫∫ |∂_t chi + a'(v) ∂_x chi| weight(v) dt dx dv` over `v in [vlo, vhi]`,
    /// by composite midpoint on a `nq x nq x nvq` tensor grid over the support.
    pub fn transport_l1(
        &self,
        aprime: &(dyn Fn(f64) -> f64 + Sync),
        weight: &(dyn Fn(f64) -> f64 + Sync),
        vlo: f64,
        vhi: f64,
        nq: usize,
        nvq: usize,
    ) -> f64 {
        if vhi <= vlo {
            return 0.0;
        }
        let dv = (vhi - vlo) / nvq as f64;
        let speeds: Vec<(f64, f64)> = (0..nvq)
            .map(|k| {
                let v = vlo + (k as f64 + 0.5) * dv;
                (aprime(v), weight(v).abs())
            })
            .collect();
        let tb = self.txbox;
        let ht = tb.width_t() / nq as f64;
        let hx = tb.width_x() / nq as f64;
        let rows = map_rows(nq, |i| {
            let t = tb.ta + (i as f64 + 0.5) * ht;
            let cells: Vec<f64> = (0..nq)
                .map(|j| {
                    let x = tb.xa + (j as f64 + 0.5) * hx;
                    let p = self.dt(t, x);
                    let q = self.dx(t, x);
                    if p == 0.0 && q == 0.0 {
                        return 0.0;
                    }
                    let terms: Vec<f64> =
                        speeds.iter().map(|&(c, w)| (p + c * q).abs() * w).collect();
                    pairwise_sum(&terms)
                })
                .collect();
            pairwise_sum(&cells)
        });
        pairwise_sum(&rows) * ht * hx * dv
    }
}

/// `lambda * chi`, used to check scale covariance of ledger entries.
#[derive(Debug, Clone, Copy)]
pub struct ScaledCutoff<'a> {
    pub base: &'a Cutoff,
    pub lambda: f64,
}

impl ScaledCutoff<'_> {
    pub fn norms(&self) -> CutoffNorms {
        let n = self.base.norms();
        let l = self.lambda.abs();
        CutoffNorms {
            linf: l * n.linf,
            chi_l1: l * n.chi_l1,
            chi2_l1: l * l * n.chi2_l1,
            dt_l1: l * n.dt_l1,
            dx_l1: l * n.dx_l1,
        }
    }
}

/// Cached norms of a velocity test weight (both γ = 0 and γ = 1 variants).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TestWeightNorms {
    pub l1: f64,
    pub linf: f64,
    pub v_l1: f64,
    pub aprime_l1: f64,
    pub v_aprime_l1: f64,
    /// `sup |∂^γ ψ|` for γ = 0, 1.
    pub d_linf: [f64; 2],
    /// `sup |∂^γ (v ψ)|` for γ = 0, 1.
    pub dv_linf: [f64; 2],
}

type WeightFn = std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Velocity weight ψ supported in `[-V, V]`.
#[derive(Clone)]
pub struct TestWeight {
    pub support: f64,
    psi: WeightFn,
    dpsi: WeightFn,
    norms: TestWeightNorms,
}

impl std::fmt::Debug for TestWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestWeight")
            .field("support", &self.support)
            .field("norms", &self.norms)
            .finish()
    }
}

impl TestWeight {
    /// Smooth plateau weight: 1 on `[-plateau*V, plateau*V]`, 0 outside `(-V, V)`.
    pub fn plateau(
        support: f64,
        plateau_fraction: f64,
        aprime: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let prof = PlateauProfile::new(-support, support, plateau_fraction)?;
        Self::custom(support, move |v| prof.value(v), move |v| prof.deriv(v), aprime)
    }

    /// Arbitrary weight given with its derivative. Values outside the support
    /// are ignored (treated as zero).
    pub fn custom(
        support: f64,
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dpsi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        aprime: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if !(support.is_finite() && support > 0.0) {
            return Err(Error::EmptySupport);
        }
        let v = support;
        let psi_c = move |s: f64| if s.abs() < v { psi(s) } else { 0.0 };
        let dpsi_c = move |s: f64| if s.abs() < v { dpsi(s) } else { 0.0 };
        let l1 = gauss_legendre_composite(&|s| psi_c(s).abs(), -v, v, 256);
        let v_l1 = gauss_legendre_composite(&|s| (s * psi_c(s)).abs(), -v, v, 256);
        let aprime_l1 = gauss_legendre_composite(&|s| (aprime(s) * psi_c(s)).abs(), -v, v, 256);
        let v_aprime_l1 =
            gauss_legendre_composite(&|s| (s * aprime(s) * psi_c(s)).abs(), -v, v, 256);
        let sup = |g: &dyn Fn(f64) -> f64| {
            let n = 20_000;
            (0..=n)
                .map(|i| g(-v + 2.0 * v * i as f64 / n as f64).abs())
                .fold(0.0_f64, f64::max)
        };
        let linf = sup(&psi_c);
        let d1 = sup(&dpsi_c);
        let dv0 = sup(&|s| s * psi_c(s));
        let dv1 = sup(&|s| psi_c(s) + s * dpsi_c(s));
        let norms = TestWeightNorms {
            l1,
            linf,
            v_l1,
            aprime_l1,
            v_aprime_l1,
            d_linf: [linf, d1],
            dv_linf: [dv0, dv1],
        };
        Ok(Self {
            support,
            psi: std::sync::Arc::new(psi_c),
            dpsi: std::sync::Arc::new(dpsi_c),
            norms,
        })
    }

    pub fn eval(&self, v: f64) -> f64 {
        (self.psi)(v)
    }

    pub fn deriv(&self, v: f64) -> f64 {
        (self.dpsi)(v)
    }

    pub fn norms(&self) -> &TestWeightNorms {
        &self.norms
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / dp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

thread_local! {
    static GL8: (Vec<f64>, Vec<f64>) = gauss_legendre(8);
}

/// Composite 8-point Gauss-Legendre rule with `panels` equal panels.
pub fn gauss_legendre_composite(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if b == a {
        return 0.0;
    }
    GL8.with(|(x, w)| {
        let h = (b - a) / panels as f64;
        let parts: Vec<f64> = (0..panels)
            .map(|p| {
                let lo = a + p as f64 * h;
                let mid = lo + 0.5 * h;
                let terms: Vec<f64> =
                    x.iter().zip(w).map(|(&xi, &wi)| wi * f(mid + 0.5 * h * xi)).collect();
                0.5 * h * pairwise_sum(&terms)
            })
            .collect();
        pairwise_sum(&parts)
    })
}

/// Composite midpoint rule over the cells of `grid`.
pub fn integrate2d(f: impl Fn(f64, f64) -> f64 + Sync + Send, grid: &Grid2D) -> Result<f64> {
    let rows = map_rows(grid.nt, |n| {
        let t = grid.t_center(n);
        let cells: Vec<f64> = (0..grid.nx).map(|j| f(t, grid.x_center(j))).collect();
        if cells.iter().any(|v| !v.is_finite()) {
            None
        } else {
            Some(pairwise_sum(&cells))
        }
    });
    let rows: Option<Vec<f64>> = rows.into_iter().collect();
    let rows = rows.ok_or(Error::NonFinite)?;
    Ok(pairwise_sum(&rows) * grid.dt() * grid.dx())
}

/// One-dimensional composite midpoint rule with `n` cells.
pub fn integrate1d(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Result<f64> {
    let h = (b - a) / n as f64;
    let cells: Vec<f64> = (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).collect();
    if cells.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(pairwise_sum(&cells) * h)
}
