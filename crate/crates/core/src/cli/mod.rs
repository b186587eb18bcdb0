//! Command-line front end.
//!
//! Exit codes: 0 when every hard check passes, 1 when a theorem or lemma
//! assertion fails, 2 for usage and input errors.

pub mod config;
pub mod io;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::besov::{besov_fit, default_eps, dyadic_shifts, increment_functional, Direction};
use crate::error::{Error, Result};
use crate::fields::{make_bump_cutoff, Cutoff, Grid2D, TestWeight, TxBox, VelocityGrid};
use crate::flux_entropy::{
    certify_hyp_a, certify_hyp_a_with, make_entropy_pair_with, CertificateMode, EntropySpec, FluxFunction,
};
use crate::interaction::{check_identity_space, check_identity_time, manufactured_bump};
use crate::kinetic::{check_hyp_f, entropy_production, extract_measure, lift, VelocityDensity, Window};
use crate::solver::{
    exact_riemann, max_speed, nonentropic_shock, nt_for_cfl, oleinik_check, solve_fv_with_boundary, Boundary,
    InitialData, Scheme, SolutionRecord,
};
use crate::verify::{
    random_pairs, verify_lemma_delta, verify_lemma_tartar, verify_main_theorem, verify_one_entropy,
    verify_velocity_averaging, VerifyOutcome, HYP_F_SHIFTS,
};
use config::{parse_box, parse_shifts, ConfigFile, RunConfig};
use io::{read_solution, write_json, write_solution, write_text, SCHEMA_VERSION};
use report::{parse_verdicts_csv, verdict_plot, verdicts_csv, write_manifest, Series, VerdictRow};

#[derive(Debug, Parser)]
#[command(name = "besovclaw", version, about = "Regularity diagnostics for 1D scalar conservation laws")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a Cauchy problem and write solution.json.
    Solve(Common),
    /// Lift a solution to its kinetic density and check the monotonicity hypothesis.
    Lift(WithInput),
    /// Extract the kinetic measure and entropy production.
    Measure(WithInput),
    /// Increment functionals and the log–log regularity fit.
    Besov(BesovArgs),
    /// Check a theorem, lemma or identity.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Collect verdict CSV and fit JSON files into a plot and a summary.
    Report(ReportArgs),
}

#[derive(Debug, Subcommand)]
pub enum VerifyKind {
    /// Space and time regularity inequalities from the kinetic measure.
    MainTheorem(WithInput),
    /// The same inequalities driven by a single entropy pair.
    OneEntropy(WithInput),
    /// Regularity of velocity averages of the kinetic density.
    VelocityAveraging(VaArgs),
    /// Interaction identities on manufactured fields under refinement.
    Interaction(InteractionArgs),
    /// Lower bound for the kinetic defect on random state pairs.
    LemmaDelta(LemmaArgs),
    /// Tartar gap lower bound on random state pairs.
    LemmaTartar(LemmaArgs),
    /// One-sided gradient bound.
    Oleinik(WithInput),
}

/// Flags shared by every stage; they override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tag: Option<String>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long)]
    pub nv: Option<usize>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub x1: Option<f64>,
    #[arg(long)]
    pub flux: Option<String>,
    #[arg(long)]
    pub entropy: Option<String>,
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub boundary: Option<String>,
    /// Cutoff support box `ta,tb,xa,xb`.
    #[arg(long)]
    pub cutoff: Option<String>,
    #[arg(long)]
    pub plateau: Option<f64>,
    /// Shift set, `dyadic:MIN,MAX` in cells.
    #[arg(long)]
    pub shifts: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct WithInput {
    #[command(flatten)]
    pub common: Common,
    /// Solution file; solved from the configuration when absent.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BesovArgs {
    #[command(flatten)]
    pub with: WithInput,
    #[arg(long, default_value = "x")]
    pub direction: String,
    #[arg(long, default_value_t = 3.0)]
    pub p: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VaArgs {
    #[command(flatten)]
    pub with: WithInput,
    /// Support half-width V of the velocity weight (defaults to the sup of u).
    #[arg(long)]
    pub psi_support: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub psi_plateau: f64,
}

#[derive(Debug, Clone, Args)]
pub struct InteractionArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "bump")]
    pub manufactured: String,
    /// Number of refinement levels starting at 128 cells.
    #[arg(long, default_value_t = 4)]
    pub refine: usize,
}

#[derive(Debug, Clone, Args)]
pub struct LemmaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    /// Range `[-V, V]` of the sampled pairs.
    #[arg(long, default_value_t = 1.0)]
    pub range: f64,
    /// Use the analytic sufficient-condition certificate instead of the sharp one.
    #[arg(long)]
    pub analytic: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Verdict CSV files and fit JSON files.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
    #[arg(long, default_value = "report")]
    pub title: String,
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Solve(c) => cmd_solve(&c),
        Command::Lift(w) => cmd_lift(&w),
        Command::Measure(w) => cmd_measure(&w),
        Command::Besov(b) => cmd_besov(&b),
        Command::Verify { kind } => cmd_verify(kind),
        Command::Report(r) => cmd_report(&r),
    }
}

/// Defaults, then the config file, then explicit flags.
pub fn resolve_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(p) = &c.config {
        cfg.apply_file(&ConfigFile::load(p)?)?;
    }
    macro_rules! over {
        ($($field:ident => $target:expr),* $(,)?) => {
            $(if let Some(v) = c.$field.clone() { $target = v.into(); })*
        };
    }
    over!(out => cfg.out, seed => cfg.seed, tag => cfg.tag, nx => cfg.nx, cfl => cfg.cfl,
          tmax => cfg.t1, flux => cfg.flux, entropy => cfg.entropy, init => cfg.init,
          scheme => cfg.scheme, nv => cfg.nv, plateau => cfg.plateau);
    if let Some(v) = c.nt {
        cfg.nt = Some(v);
    }
    if let Some(v) = c.x0 {
        cfg.x0 = Some(v);
    }
    if let Some(v) = c.x1 {
        cfg.x1 = Some(v);
    }
    if let Some(v) = &c.boundary {
        cfg.boundary = Some(v.clone());
    }
    if let Some(v) = &c.cutoff {
        cfg.cutoff = Some(parse_box(v)?);
    }
    if let Some(v) = &c.shifts {
        cfg.shifts = Some(parse_shifts(v)?);
    }
    Ok(cfg)
}

fn parse_boundary(s: &str) -> Result<Boundary> {
    match s {
        "periodic" => Ok(Boundary::Periodic),
        "outflow" => Ok(Boundary::Outflow),
        o => Err(Error::InvalidInput(format!("unknown boundary '{o}'"))),
    }
}

/// Solves the configured problem.
pub fn solve_from_config(cfg: &RunConfig) -> Result<SolutionRecord> {
    let flux = FluxFunction::parse(&cfg.flux)?;
    let init = InitialData::parse(&cfg.init)?;
    let scheme = Scheme::parse(&cfg.scheme)?;
    let (dx0, dx1) = match &init {
        InitialData::Sine { period, .. } => (0.0, *period),
        InitialData::Riemann { .. } => (-1.0, 1.0),
        InitialData::Custom { .. } => (0.0, 1.0),
    };
    let (x0, x1) = (cfg.x0.unwrap_or(dx0), cfg.x1.unwrap_or(dx1));
    let dx = (x1 - x0) / cfg.nx as f64;
    let nt = match cfg.nt {
        Some(n) => n,
        None => {
            if !(cfg.cfl > 0.0 && cfg.cfl < 1.0) {
                return Err(Error::CflExceeded);
            }
            let (lo, hi) = init.range();
            nt_for_cfl(cfg.t0, cfg.t1, dx, cfg.cfl, max_speed(&flux, lo, hi))
        }
    };
    let grid = Grid2D::new(cfg.t0, cfg.t1, x0, x1, nt, cfg.nx)?;
    let riemann = |what: &str| match init {
        InitialData::Riemann { ul, ur } => Ok((ul, ur)),
        _ => Err(Error::InvalidInput(format!("scheme {what} needs riemann initial data"))),
    };
    match scheme {
        Scheme::ExactRiemann => {
            let (ul, ur) = riemann("exact")?;
            exact_riemann(ul, ur, &flux, grid)
        }
        Scheme::NonentropicShock => {
            let (ul, ur) = riemann("nonentropic")?;
            nonentropic_shock(ul, ur, &flux, grid)
        }
        _ => {
            let b = match &cfg.boundary {
                Some(s) => parse_boundary(s)?,
                None => init.default_boundary(),
            };
            solve_fv_with_boundary(&init, &flux, grid, scheme, cfg.cfl, b)
        }
    }
}

fn load_or_solve(w: &WithInput, cfg: &RunConfig) -> Result<SolutionRecord> {
    match &w.input {
        Some(p) => read_solution(p),
        None => solve_from_config(cfg),
    }
}

/// Configured cutoff, or the default box covering the central part of the grid.
pub fn cutoff_for(cfg: &RunConfig, grid: &Grid2D) -> Result<Cutoff> {
    let b = match cfg.cutoff {
        Some([ta, tb, xa, xb]) => TxBox::new(ta, tb, xa, xb),
        None => {
            let (lt, lx) = (grid.t1 - grid.t0, grid.x1 - grid.x0);
            TxBox::new(grid.t0 + 0.2 * lt, grid.t0 + 0.8 * lt, grid.x0 + 0.2 * lx, grid.x1 - 0.2 * lx)
        }
    };
    make_bump_cutoff(b, cfg.plateau)
}

/// Dyadic shifts in one direction: the configured cell range (default from
/// 8 cells) capped at the cutoff's ε.
pub fn shifts_for(cfg: &RunConfig, grid: &Grid2D, cutoff: &Cutoff, dir: Direction) -> Vec<f64> {
    let spacing = dir.spacing(grid);
    let cap = (default_eps(cutoff) / spacing * (1.0 + 1e-9)).floor() as usize;
    let (lo, hi) = cfg.shifts.unwrap_or((8, cap));
    dyadic_shifts(spacing, lo, hi.min(cap))
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: Vec::new() }
    }

    fn json<T: serde::Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        write_json(&self.dir.join(name), v)?;
        self.files.push(name.into());
        Ok(())
    }

    fn text(&mut self, name: &str, s: &str) -> Result<()> {
        write_text(&self.dir.join(name), s)?;
        self.files.push(name.into());
        Ok(())
    }

    fn finish(self, command: &str, cfg: &RunConfig) -> Result<()> {
        let echo = serde_json::to_value(cfg).map_err(|e| Error::InvalidInput(e.to_string()))?;
        write_manifest(&self.dir, command, echo, &self.files)
    }
}

fn cmd_solve(c: &Common) -> Result<i32> {
    let cfg = resolve_config(c)?;
    let rec = solve_from_config(&cfg)?;
    let mut out = Outputs::new(&cfg.out);
    write_solution(&cfg.out.join("solution.json"), &rec)?;
    out.files.push("solution.json".into());
    out.finish("solve", &cfg)?;
    let g = rec.grid();
    println!(
        "solve: {} {} nx={} nt={} courant={:.4} supnorm={}",
        rec.flux.tag(),
        rec.scheme.tag(),
        g.nx,
        g.nt,
        rec.cfl,
        rec.field.supnorm()
    );
    Ok(0)
}

fn vgrid_for(rec: &SolutionRecord, nv: usize) -> Result<VelocityGrid> {
    VelocityGrid::covering(rec.field.supnorm(), nv)
}

fn cmd_lift(w: &WithInput) -> Result<i32> {
    let cfg = resolve_config(&w.common)?;
    let rec = load_or_solve(w, &cfg)?;
    let kd = lift(&rec, vgrid_for(&rec, cfg.nv)?)?;
    let stride = (rec.grid().nx / 256).max(1);
    let hyp = check_hyp_f(&kd, &HYP_F_SHIFTS, stride);
    let g = *rec.grid();
    let dv = kd.vgrid.dv();
    let mut moment_err = 0.0_f64;
    for n in (0..g.nt).step_by(stride) {
        for j in (0..g.nx).step_by(stride) {
            let s: f64 = (0..kd.vgrid.nv).map(|k| kd.value(n, j, k) * dv).sum();
            moment_err = moment_err.max((s - rec.field.get(n, j)).abs());
        }
    }
    let mut out = Outputs::new(&cfg.out);
    out.json(
        "lift.json",
        &serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "vgrid": kd.vgrid,
            "hyp_f": hyp,
            "zeroth_moment_max_error": moment_err,
        }),
    )?;
    out.finish("lift", &cfg)?;
    println!("lift: nv={} hyp_f violations={} moment error={:e}", kd.vgrid.nv, hyp.violations, moment_err);
    Ok(0)
}

fn cmd_measure(w: &WithInput) -> Result<i32> {
    let cfg = resolve_config(&w.common)?;
    let rec = load_or_solve(w, &cfg)?;
    let kd = lift(&rec, vgrid_for(&rec, cfg.nv)?)?;
    let m = extract_measure(&kd, &rec.flux)?;
    let cutoff = cutoff_for(&cfg, rec.grid())?;
    let all = m.totals(&Window::everything());
    let inner = m.totals(&Window::from_box(&cutoff.txbox, f64::NEG_INFINITY, f64::INFINITY));
    let u = rec.field.supnorm().max(1e-300);
    let pair = make_entropy_pair_with(EntropySpec::parse(&cfg.entropy)?, &rec.flux, u, CertificateMode::Analytic)?;
    let ep = entropy_production(&rec, &pair, &cutoff, None)?;
    let mut out = Outputs::new(&cfg.out);
    out.json(
        "measure.json",
        &serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "vgrid": kd.vgrid,
            "totals": all,
            "cutoff_window_totals": inner,
            "closure_defect": m.closure_defect,
            "closure_flag": m.closure_flag,
            "entropy": pair.spec.tag(),
            "entropy_residual_window": ep.window_mass(),
            "mu_window": ep.mu_total(),
        }),
    )?;
    out.finish("measure", &cfg)?;
    println!(
        "measure: positive={:e} negative={:e} mu(window)={:e}",
        all.positive,
        all.negative,
        ep.mu_total()
    );
    Ok(0)
}

fn parse_direction(s: &str) -> Result<Direction> {
    match s {
        "x" => Ok(Direction::X),
        "t" => Ok(Direction::T),
        o => Err(Error::InvalidInput(format!("unknown direction '{o}' (x or t)"))),
    }
}

fn cmd_besov(b: &BesovArgs) -> Result<i32> {
    let cfg = resolve_config(&b.with.common)?;
    let dir = parse_direction(&b.direction)?;
    let rec = load_or_solve(&b.with, &cfg)?;
    let grid = *rec.grid();
    let cutoff = cutoff_for(&cfg, &grid)?;
    let hs = {
        let spacing = dir.spacing(&grid);
        let cap = (default_eps(&cutoff) / spacing * (1.0 + 1e-9)).floor() as usize;
        let (lo, hi) = cfg.shifts.unwrap_or((4, cap));
        dyadic_shifts(spacing, lo, hi.min(cap))
    };
    let mut out = Outputs::new(&cfg.out);
    let mut csv = String::from("h,value\n");
    for &h in &hs {
        let v = increment_functional(&rec.field, dir, h, b.p, &cutoff)?;
        csv.push_str(&format!("{:e},{:e}\n", h, v.value));
    }
    out.text("besov.csv", &csv)?;
    let rep = besov_fit(&rec.field, dir, b.p, &cutoff, &hs)?;
    let mut json = serde_json::to_value(&rep).map_err(|e| Error::InvalidInput(e.to_string()))?;
    json["schema_version"] = SCHEMA_VERSION.into();
    out.json("besov.json", &json)?;
    let svg = report::loglog_svg(
        &format!("increment functional, p = {}", b.p),
        &[Series { name: format!("{} direction", dir.tag()), points: rep.points.clone(), dashed: false }],
        &[format!("fitted slope {:.3} (p = {})", rep.slope, b.p)],
    );
    out.text("besov.svg", &svg)?;
    out.finish("besov", &cfg)?;
    println!(
        "besov: direction={} p={} slope={:.4} exponent={:.4} consistent={}",
        dir.tag(),
        b.p,
        rep.slope,
        rep.exponent,
        rep.consistent
    );
    Ok(0)
}

fn emit_outcome(out: &mut Outputs, name: &str, o: &VerifyOutcome) -> Result<i32> {
    let csv = verdicts_csv(&o.verdicts);
    out.text("verdicts.csv", &csv)?;
    out.json(
        "ledger.json",
        &serde_json::json!({ "schema_version": SCHEMA_VERSION, "theorem": name, "ledger": o.ledger }),
    )?;
    let rows = parse_verdicts_csv(&csv)?;
    out.text("verdicts.svg", &verdict_plot(name, &rows))?;
    let hard: Vec<_> = o.verdicts.iter().filter(|v| v.hard).collect();
    let failed = hard.iter().filter(|v| !v.pass).count();
    let max_ratio = hard
        .iter()
        .filter(|v| v.rhs > 0.0)
        .map(|v| v.lhs / v.rhs)
        .fold(0.0_f64, f64::max);
    println!("{name}: {} verdicts, {failed} hard failures, max lhs/rhs = {max_ratio:.4}", o.verdicts.len());
    Ok(if o.pass() { 0 } else { 1 })
}

fn cmd_verify(kind: VerifyKind) -> Result<i32> {
    match kind {
        VerifyKind::MainTheorem(w) => {
            let cfg = resolve_config(&w.common)?;
            let rec = load_or_solve(&w, &cfg)?;
            let grid = *rec.grid();
            let cutoff = cutoff_for(&cfg, &grid)?;
            let u = rec.field.supnorm().max(1e-300);
            let cert = certify_hyp_a(&rec.flux, u, 1000)?;
            let o = verify_main_theorem(
                &rec,
                &rec.flux.clone(),
                Some(&cert),
                &cutoff,
                &shifts_for(&cfg, &grid, &cutoff, Direction::X),
                &shifts_for(&cfg, &grid, &cutoff, Direction::T),
                cfg.nv,
            )?;
            let mut out = Outputs::new(&cfg.out);
            let code = emit_outcome(&mut out, "main-theorem", &o)?;
            out.finish("verify main-theorem", &cfg)?;
            Ok(code)
        }
        VerifyKind::OneEntropy(w) => {
            let cfg = resolve_config(&w.common)?;
            let rec = load_or_solve(&w, &cfg)?;
            let grid = *rec.grid();
            let cutoff = cutoff_for(&cfg, &grid)?;
            let u = rec.field.supnorm().max(1e-300);
            let cert = certify_hyp_a(&rec.flux, u, 1000)?;
            let pair = make_entropy_pair_with(EntropySpec::parse(&cfg.entropy)?, &rec.flux, u, CertificateMode::Analytic)?;
            let o = verify_one_entropy(
                &rec,
                &rec.flux.clone(),
                Some(&cert),
                &pair,
                &cutoff,
                &shifts_for(&cfg, &grid, &cutoff, Direction::X),
                &shifts_for(&cfg, &grid, &cutoff, Direction::T),
            )?;
            let mut out = Outputs::new(&cfg.out);
            let code = emit_outcome(&mut out, "one-entropy", &o)?;
            out.finish("verify one-entropy", &cfg)?;
            Ok(code)
        }
        VerifyKind::VelocityAveraging(a) => {
            let cfg = resolve_config(&a.with.common)?;
            let rec = load_or_solve(&a.with, &cfg)?;
            let grid = *rec.grid();
            let cutoff = cutoff_for(&cfg, &grid)?;
            let u = rec.field.supnorm();
            let v = a.psi_support.unwrap_or(u);
            let mut kd = lift(&rec, VelocityGrid::covering(u.max(v), cfg.nv)?)?;
            kd.gamma = 1;
            let m = extract_measure(&kd, &rec.flux)?;
            let cert = certify_hyp_a(&rec.flux, u.max(v), 1000)?;
            let flux = rec.flux.clone();
            let psi = TestWeight::plateau(v, a.psi_plateau, move |s| flux.da(s))?;
            let o = verify_velocity_averaging(
                &kd,
                &m,
                &rec.flux,
                Some(&cert),
                &cutoff,
                &psi,
                &shifts_for(&cfg, &grid, &cutoff, Direction::X),
                &shifts_for(&cfg, &grid, &cutoff, Direction::T),
            )?;
            let mut out = Outputs::new(&cfg.out);
            let code = emit_outcome(&mut out, "velocity-averaging", &o)?;
            out.finish("verify velocity-averaging", &cfg)?;
            Ok(code)
        }
        VerifyKind::Interaction(a) => cmd_interaction(&a),
        VerifyKind::LemmaDelta(a) => cmd_lemma(&a, false),
        VerifyKind::LemmaTartar(a) => cmd_lemma(&a, true),
        VerifyKind::Oleinik(w) => {
            let cfg = resolve_config(&w.common)?;
            let rec = load_or_solve(&w, &cfg)?;
            let (lo, hi) = rec.field.min_max();
            let n = 1000;
            let alpha = (0..=n)
                .map(|i| rec.flux.d2a(lo + (hi - lo) * i as f64 / n as f64))
                .fold(f64::INFINITY, f64::min);
            if !(alpha > 0.0) {
                return Err(Error::NotUniformlyConvex);
            }
            let r = oleinik_check(&rec, alpha)?;
            let mut out = Outputs::new(&cfg.out);
            out.json("oleinik.json", &serde_json::json!({ "schema_version": SCHEMA_VERSION, "alpha": alpha, "report": r }))?;
            out.finish("verify oleinik", &cfg)?;
            println!("oleinik: max violation {:e} (tolerance {:e}) pass={}", r.max_violation, r.tolerance, r.pass);
            Ok(if r.pass { 0 } else { 1 })
        }
    }
}

fn cmd_interaction(a: &InteractionArgs) -> Result<i32> {
    let cfg = resolve_config(&a.common)?;
    if a.manufactured != "bump" {
        return Err(Error::InvalidInput(format!("unknown manufactured fixture '{}'", a.manufactured)));
    }
    if a.refine < 2 {
        return Err(Error::InvalidInput("--refine needs at least 2 levels".into()));
    }
    let mut csv = String::from("n,dx,dt,space_lhs,space_rhs,space_residual,time_lhs,time_rhs,time_residual\n");
    let mut prev: Option<(f64, f64)> = None;
    let mut ok = true;
    for i in 0..a.refine {
        let n = 128usize << i;
        let bf = manufactured_bump(n, n)?;
        let s = check_identity_space(&bf)?;
        let t = check_identity_time(&bf)?;
        csv.push_str(&format!(
            "{n},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            s.dx, s.dt, s.lhs, s.rhs, s.residual, t.lhs, t.rhs, t.residual
        ));
        if let Some((ps, pt)) = prev {
            ok &= ps / s.residual >= 1.6 && pt / t.residual >= 1.6;
        }
        prev = Some((s.residual, t.residual));
    }
    let mut out = Outputs::new(&cfg.out);
    out.text("interaction.csv", &csv)?;
    out.finish("verify interaction", &cfg)?;
    println!("interaction: {} levels, residual decrease >= 1.6 per level: {ok}", a.refine);
    Ok(if ok { 0 } else { 1 })
}

fn cmd_lemma(a: &LemmaArgs, tartar: bool) -> Result<i32> {
    let cfg = resolve_config(&a.common)?;
    let flux = FluxFunction::parse(&cfg.flux)?;
    let mode = if a.analytic { CertificateMode::Analytic } else { CertificateMode::Sharp };
    let cert = certify_hyp_a_with(&flux, a.range, 1000, mode)?;
    let pairs = random_pairs(a.pairs, a.range, cfg.seed);
    let (name, rep) = if tartar {
        let pair = make_entropy_pair_with(EntropySpec::parse(&cfg.entropy)?, &flux, a.range, mode)?;
        ("lemma-tartar", verify_lemma_tartar(&pair, &flux, &cert, &pairs)?)
    } else {
        ("lemma-delta", verify_lemma_delta(&flux, &cert, &pairs)?)
    };
    let mut out = Outputs::new(&cfg.out);
    out.json(
        "lemma.json",
        &serde_json::json!({ "schema_version": SCHEMA_VERSION, "certificate": cert, "report": rep }),
    )?;
    out.finish(&format!("verify {name}"), &cfg)?;
    println!(
        "{name}: {} pairs, corrected violations {}, worst ratio {:.6} (stated constant: {:.6}, {} violations)",
        rep.pairs, rep.violations_corrected, rep.worst_ratio_corrected, rep.worst_ratio_stated, rep.violations_stated
    );
    Ok(if rep.pass { 0 } else { 1 })
}

fn cmd_report(r: &ReportArgs) -> Result<i32> {
    let mut rows: Vec<VerdictRow> = Vec::new();
    let mut notes = Vec::new();
    let mut fits: Vec<Series> = Vec::new();
    let mut summary = String::from("file,kind,entries,hard_failures,slope\n");
    for p in &r.inputs {
        let text = std::fs::read_to_string(p)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", p.display())))?;
        let name = p.display().to_string();
        if p.extension().and_then(|e| e.to_str()) == Some("json") {
            let v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidInput(format!("{name}: malformed JSON: {e}")))?;
            if let Some(ver) = v.get("schema_version").and_then(|s| s.as_str()) {
                io::check_schema(ver)?;
            }
            let (Some(slope), Some(pv), Some(pts)) =
                (v.get("slope").and_then(|s| s.as_f64()), v.get("p").and_then(|s| s.as_f64()), v.get("points").and_then(|s| s.as_array()))
            else {
                return Err(Error::InvalidInput(format!("{name}: not a fit report")));
            };
            let points = pts
                .iter()
                .map(|q| match (q.get(0).and_then(|x| x.as_f64()), q.get(1).and_then(|x| x.as_f64())) {
                    (Some(a), Some(b)) => Ok((a, b)),
                    _ => Err(Error::InvalidInput(format!("{name}: malformed point"))),
                })
                .collect::<Result<Vec<_>>>()?;
            notes.push(format!("fitted slope {slope:.3} for p = {pv}"));
            summary.push_str(&format!("{name},fit,{},0,{slope:e}\n", points.len()));
            fits.push(Series { name: format!("fit p = {pv}"), points, dashed: false });
        } else {
            let v = parse_verdicts_csv(&text).map_err(|e| Error::InvalidInput(format!("{name}: {e}")))?;
            let failed = v.iter().filter(|x| x.hard && !x.pass).count();
            summary.push_str(&format!("{name},verdicts,{},{failed},\n", v.len()));
            rows.extend(v);
        }
    }
    std::fs::create_dir_all(&r.out).map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", r.out.display())))?;
    let mut out = Outputs::new(&r.out);
    out.text("summary.csv", &summary)?;
    out.text("verdicts.svg", &verdict_plot(&r.title, &rows))?;
    if !fits.is_empty() {
        out.text("fits.svg", &report::loglog_svg(&r.title, &fits, &notes))?;
    }
    let inputs: Vec<String> = r.inputs.iter().map(|p| p.display().to_string()).collect();
    let mut files = Vec::new();
    for f in &out.files {
        files.push(f.clone());
    }
    write_manifest(&r.out, "report", serde_json::json!({ "inputs": inputs, "title": r.title }), &files)?;
    println!("report: {} verdicts, {} fits", rows.len(), fits.len());
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.ini");
        std::fs::write(&p, "[grid]\nnx = 64\n[flux]\nspec = even_power:2\n").unwrap();
        let c = Common { config: Some(p), nx: Some(32), ..Default::default() };
        let cfg = resolve_config(&c).unwrap();
        assert_eq!(cfg.nx, 32);
        assert_eq!(cfg.flux, "even_power:2");
    }

    #[test]
    fn solve_from_defaults() {
        let cfg = RunConfig { nx: 32, t1: 0.5, ..Default::default() };
        let rec = solve_from_config(&cfg).unwrap();
        assert!(rec.field.supnorm() <= 1.0 + 1e-12);
        assert_eq!(rec.grid().x1, 1.0);
    }

    #[test]
    fn default_cutoff_and_shifts_fit() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 400, 512).unwrap();
        let cfg = RunConfig::default();
        let c = cutoff_for(&cfg, &g).unwrap();
        let hs = shifts_for(&cfg, &g, &c, Direction::X);
        assert!(!hs.is_empty());
        assert!(hs.iter().all(|h| *h <= default_eps(&c) + 1e-12 && *h >= 8.0 * g.dx() - 1e-12));
    }
}
