//! Interaction identities for a pair of balance laws
//! `∂_t A + ∂_x B = C`, `∂_t D + ∂_x E = F`:
//!
//! * space: `∬(AE − DB) = −∬ C(t,x) ∫_x^∞ D(t,y) dy − ∬ F(t,y) ∫_{−∞}^y A(t,x) dx`
//! * time:  `∬(AE − DB) = ∬ C(s,z) ∫_s^∞ E(t,z) dt + ∬ F(t,z) ∫_{−∞}^t B(s,z) ds`
//!
//! Inner integrals are cell-centred suffix/prefix sums (half of the current
//! cell plus every cell beyond it), which keeps the discrete identity at the
//! order of the midpoint rule.

use crate::error::{Error, Result};
use crate::fields::{map_rows, pairwise_sum, Grid2D, PlateauProfile, SpaceTimeField};

#[derive(Debug, Clone)]
pub struct BalanceFields {
    pub a: SpaceTimeField,
    pub b: SpaceTimeField,
    pub c: SpaceTimeField,
    pub d: SpaceTimeField,
    pub e: SpaceTimeField,
    pub f: SpaceTimeField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityTag {
    Space,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IdentityReport {
    pub tag: IdentityTag,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub dt: f64,
    pub dx: f64,
    /// L¹ norms of the discrete system residuals of the two balance laws.
    pub system_residual: (f64, f64),
}

impl BalanceFields {
    pub fn new(
        a: SpaceTimeField,
        b: SpaceTimeField,
        c: SpaceTimeField,
        d: SpaceTimeField,
        e: SpaceTimeField,
        f: SpaceTimeField,
    ) -> Result<Self> {
        let g = *a.grid();
        if [&b, &c, &d, &e, &f].iter().any(|s| *s.grid() != g) {
            return Err(Error::InvalidInput("balance fields live on different grids".into()));
        }
        Ok(Self { a, b, c, d, e, f })
    }

    pub fn grid(&self) -> &Grid2D {
        self.a.grid()
    }

    /// Scales the first balance law `(A, B, C)` by `lambda`.
    pub fn scale_first(&self, lambda: f64) -> Result<Self> {
        Ok(Self {
            a: self.a.map(|v| lambda * v)?,
            b: self.b.map(|v| lambda * v)?,
            c: self.c.map(|v| lambda * v)?,
            ..self.clone()
        })
    }

    fn check_support(&self) -> Result<()> {
        let g = self.grid();
        let margin = 4;
        for (name, fld) in [("A", &self.a), ("B", &self.b), ("C", &self.c), ("D", &self.d), ("E", &self.e), ("F", &self.f)] {
            let scale = fld.supnorm().max(1e-300);
            for n in 0..g.nt {
                for j in 0..g.nx {
                    let inside = n >= margin && n < g.nt - margin && j >= margin && j < g.nx - margin;
                    if !inside && fld.get(n, j).abs() > 1e-12 * scale {
                        return Err(Error::SupportEscape(format!(
                            "{name} is nonzero within {margin} cells of the boundary"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// L¹ norms of `D_t A/dt + D_x B/dx − C` and the same for `(D, E, F)`,
    /// with centred differences.
    pub fn system_residual(&self) -> (f64, f64) {
        let g = *self.grid();
        let one = |p: &SpaceTimeField, q: &SpaceTimeField, s: &SpaceTimeField| {
            let rows = map_rows(g.nt, |n| {
                let terms: Vec<f64> = (0..g.nx)
                    .map(|j| {
                        let at = |m: isize| if m < 0 || m >= g.nt as isize { 0.0 } else { p.get(m as usize, j) };
                        let ax = |k: isize| if k < 0 || k >= g.nx as isize { 0.0 } else { q.get(n, k as usize) };
                        let dpt = (at(n as isize + 1) - at(n as isize - 1)) / (2.0 * g.dt());
                        let dqx = (ax(j as isize + 1) - ax(j as isize - 1)) / (2.0 * g.dx());
                        (dpt + dqx - s.get(n, j)).abs()
                    })
                    .collect();
                pairwise_sum(&terms)
            });
            pairwise_sum(&rows) * g.dt() * g.dx()
        };
        (one(&self.a, &self.b, &self.c), one(&self.d, &self.e, &self.f))
    }

    fn lhs(&self) -> f64 {
        let g = *self.grid();
        let rows = map_rows(g.nt, |n| {
            let terms: Vec<f64> = (0..g.nx)
                .map(|j| self.a.get(n, j) * self.e.get(n, j) - self.d.get(n, j) * self.b.get(n, j))
                .collect();
            pairwise_sum(&terms)
        });
        pairwise_sum(&rows) * g.dt() * g.dx()
    }
}

/// Half-cell-corrected suffix sums: `out[i] ≈ ∫_{x_i}^∞` in units of the spacing.
fn suffix(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    let mut acc = 0.0;
    for i in (0..v.len()).rev() {
        out[i] = acc + 0.5 * v[i];
        acc += v[i];
    }
    out
}

/// Half-cell-corrected prefix sums: `out[i] ≈ ∫_{−∞}^{x_i}` in units of the spacing.
fn prefix(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    let mut acc = 0.0;
    for i in 0..v.len() {
        out[i] = acc + 0.5 * v[i];
        acc += v[i];
    }
    out
}

/// Space identity.
pub fn check_identity_space(bf: &BalanceFields) -> Result<IdentityReport> {
    bf.check_support()?;
    let g = *bf.grid();
    let (dt, dx) = (g.dt(), g.dx());
    let lhs = bf.lhs();
    let rows = map_rows(g.nt, |n| {
        let d_tail = suffix(bf.d.row(n));
        let a_head = prefix(bf.a.row(n));
        let terms: Vec<f64> = (0..g.nx)
            .map(|j| -bf.c.get(n, j) * d_tail[j] * dx - bf.f.get(n, j) * a_head[j] * dx)
            .collect();
        pairwise_sum(&terms)
    });
    let rhs = pairwise_sum(&rows) * dt * dx;
    Ok(IdentityReport {
        tag: IdentityTag::Space,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        dt,
        dx,
        system_residual: bf.system_residual(),
    })
}

/// Time identity.
pub fn check_identity_time(bf: &BalanceFields) -> Result<IdentityReport> {
    bf.check_support()?;
    let g = *bf.grid();
    let (dt, dx) = (g.dt(), g.dx());
    let lhs = bf.lhs();
    let cols = map_rows(g.nx, |j| {
        let e_col: Vec<f64> = (0..g.nt).map(|n| bf.e.get(n, j)).collect();
        let b_col: Vec<f64> = (0..g.nt).map(|n| bf.b.get(n, j)).collect();
        let e_tail = suffix(&e_col);
        let b_head = prefix(&b_col);
        let terms: Vec<f64> = (0..g.nt)
            .map(|n| bf.c.get(n, j) * e_tail[n] * dt + bf.f.get(n, j) * b_head[n] * dt)
            .collect();
        pairwise_sum(&terms)
    });
    let rhs = pairwise_sum(&cols) * dt * dx;
    Ok(IdentityReport {
        tag: IdentityTag::Time,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        dt,
        dx,
        system_residual: bf.system_residual(),
    })
}

/// Manufactured smooth fields on `[0,1]²`: distinct compactly supported bumps
/// for `A, B, D, E` and the exact sources `C = ∂_t A + ∂_x B`, `F = ∂_t D + ∂_x E`.
pub fn manufactured_bump(nt: usize, nx: usize) -> Result<BalanceFields> {
    let grid = Grid2D::new(0.0, 1.0, 0.0, 1.0, nt, nx)?;
    let p = |lo: f64, hi: f64| PlateauProfile::new(lo, hi, 0.3);
    let (at, ax) = (p(0.15, 0.7)?, p(0.2, 0.65)?);
    let (bt, bx) = (p(0.2, 0.8)?, p(0.25, 0.75)?);
    let (dt_, dx_) = (p(0.3, 0.85)?, p(0.35, 0.8)?);
    let (et, ex) = (p(0.25, 0.75)?, p(0.3, 0.9)?);
    let sb = 0.7;
    let se = -0.4;
    let a = SpaceTimeField::from_fn(grid, |t, x| at.value(t) * ax.value(x))?;
    let b = SpaceTimeField::from_fn(grid, |t, x| sb * bt.value(t) * bx.value(x))?;
    let c = SpaceTimeField::from_fn(grid, |t, x| {
        at.deriv(t) * ax.value(x) + sb * bt.value(t) * bx.deriv(x)
    })?;
    let d = SpaceTimeField::from_fn(grid, |t, x| dt_.value(t) * dx_.value(x))?;
    let e = SpaceTimeField::from_fn(grid, |t, x| se * et.value(t) * ex.value(x))?;
    let f = SpaceTimeField::from_fn(grid, |t, x| {
        dt_.deriv(t) * dx_.value(x) + se * et.value(t) * ex.deriv(x)
    })?;
    BalanceFields::new(a, b, c, d, e, f)
}
