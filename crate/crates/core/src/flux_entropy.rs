//! Flux functions with quantitative convexity certificates, entropy /
//! entropy-flux pairs, and the Tartar quantity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::gauss_legendre_composite;

#[derive(Debug, Clone, PartialEq)]
pub enum FluxKind {
    /// `a(v) = v²/2`.
    Burgers,
    /// `a(v) = v^{2n}/(2n)`.
    EvenPower(u32),
    /// `a(v) = Σ c_k v^k`.
    Polynomial(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxFunction {
    pub kind: FluxKind,
}

fn poly_eval(c: &[f64], v: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * v + ck)
}

fn poly_deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &ck)| k as f64 * ck).collect()
}

fn parse_params(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number '{p}'")))
        })
        .collect()
}

fn parse_order(tag: &str, params: &str) -> Result<u32> {
    let n: u32 = params
        .trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("{tag}: bad order '{params}'")))?;
    if n == 0 {
        return Err(Error::InvalidInput(format!("{tag}: order must be >= 1")));
    }
    Ok(n)
}

impl FluxFunction {
    pub fn burgers() -> Self {
        Self { kind: FluxKind::Burgers }
    }

    pub fn even_power(n: u32) -> Self {
        assert!(n >= 1, "even_power order must be >= 1");
        Self { kind: FluxKind::EvenPower(n) }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self { kind: FluxKind::Polynomial(coeffs) }
    }

    /// Parses `burgers`, `even_power:N` or `poly:c0,c1,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (tag, params) = spec.split_once(':').unwrap_or((spec, ""));
        match tag.trim() {
            "burgers" => Ok(Self::burgers()),
            "even_power" => Ok(Self::even_power(parse_order(tag, params)?)),
            "poly" => {
                let c = parse_params(params)?;
                if c.is_empty() {
                    return Err(Error::InvalidInput("poly flux needs coefficients".into()));
                }
                Ok(Self::polynomial(c))
            }
            other => Err(Error::InvalidInput(format!("unknown flux '{other}'"))),
        }
    }

    pub fn tag(&self) -> String {
        match &self.kind {
            FluxKind::Burgers => "burgers".into(),
            FluxKind::EvenPower(n) => format!("even_power:{n}"),
            FluxKind::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|x| format!("{x}")).collect();
                format!("poly:{}", parts.join(","))
            }
        }
    }

    pub fn a(&self, v: f64) -> f64 {
        match &self.kind {
            FluxKind::Burgers => 0.5 * v * v,
            FluxKind::EvenPower(n) => v.powi(2 * *n as i32) / (2 * n) as f64,
            FluxKind::Polynomial(c) => poly_eval(c, v),
        }
    }

    pub fn da(&self, v: f64) -> f64 {
        match &self.kind {
            FluxKind::Burgers => v,
            FluxKind::EvenPower(n) => v.powi(2 * *n as i32 - 1),
            FluxKind::Polynomial(c) => poly_eval(&poly_deriv(c), v),
        }
    }

    pub fn d2a(&self, v: f64) -> f64 {
        match &self.kind {
            FluxKind::Burgers => 1.0,
            FluxKind::EvenPower(n) => (2 * n - 1) as f64 * v.powi(2 * *n as i32 - 2),
            FluxKind::Polynomial(c) => poly_eval(&poly_deriv(&poly_deriv(c)), v),
        }
    }

    /// `a''` is nonnegative at `n` equispaced samples of `[lo, hi]`.
    pub fn is_convex_on(&self, lo: f64, hi: f64, n: usize) -> bool {
        (0..=n).all(|i| {
            let v = lo + (hi - lo) * i as f64 / n as f64;
            self.d2a(v) >= -1e-12
        })
    }

    /// Solves `a'(v) = s` for `v`, clamped to `[lo, hi]`. Assumes `a'` is
    /// nondecreasing there.
    pub fn inverse_speed(&self, s: f64, lo: f64, hi: f64) -> f64 {
        let v = match &self.kind {
            FluxKind::Burgers => s,
            FluxKind::EvenPower(n) => s.signum() * s.abs().powf(1.0 / (2 * n - 1) as f64),
            FluxKind::Polynomial(_) => {
                let (mut a, mut b) = (lo, hi);
                if self.da(a) >= s {
                    return lo;
                }
                if self.da(b) <= s {
                    return hi;
                }
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if self.da(m) < s {
                        a = m;
                    } else {
                        b = m;
                    }
                    if b - a <= 1e-15 * (1.0 + a.abs()) {
                        break;
                    }
                }
                0.5 * (a + b)
            }
        };
        v.clamp(lo, hi)
    }

    /// Rankine-Hugoniot speed of the jump `(ul, ur)`.
    pub fn shock_speed(&self, ul: f64, ur: f64) -> f64 {
        if ul == ur {
            self.da(ul)
        } else {
            (self.a(ur) - self.a(ul)) / (ur - ul)
        }
    }

    /// `‖a'‖_{L¹(lo,hi)}`, split at the sonic point so the kink of `|a'|`
    /// falls on a panel edge.
    pub fn aprime_l1(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let f = |v: f64| self.da(v).abs();
        let sonic = self.inverse_speed(0.0, lo, hi);
        if sonic > lo && sonic < hi && self.da(sonic).abs() < 1e-12 {
            gauss_legendre_composite(&f, lo, sonic, 64) + gauss_legendre_composite(&f, sonic, hi, 64)
        } else {
            gauss_legendre_composite(&f, lo, hi, 128)
        }
    }
}

/// Literal certificate `d(v) − d(w) ≥ alpha_m (v−w)^beta` on `−M ≤ w < v ≤ M`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConvexityCertificate {
    pub m: f64,
    pub alpha_m: f64,
    pub beta: f64,
}

impl ConvexityCertificate {
    pub fn holds(&self, d: impl Fn(f64) -> f64, v: f64, w: f64) -> bool {
        let (lo, hi) = if v < w { (v, w) } else { (w, v) };
        let lhs = d(hi) - d(lo);
        lhs >= self.alpha_m * (hi - lo).powf(self.beta) * (1.0 - 1e-12) - 1e-15
    }
}

/// Which certificate to produce for a tagged family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateMode {
    /// The sufficient-condition formula with ρ = M/2.
    Analytic,
    /// The exact infimum of `(d(v)−d(w))/(v−w)^β`.
    Sharp,
}

/// Shape of an increasing function `d` (either `a'` or `η'`), enough to
/// certify it.
#[derive(Clone, Copy)]
enum Shape {
    Linear(f64),
    OddPower(u32),
    General,
}

fn certify_shape(
    d: &dyn Fn(f64) -> f64,
    shape: Shape,
    m: f64,
    n_samples: usize,
    mode: CertificateMode,
    seed: u64,
) -> Result<ConvexityCertificate> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidInput(format!("probe radius {m} must be positive")));
    }
    if n_samples < 100 {
        return Err(Error::InvalidInput(format!("n_samples = {n_samples} < 100")));
    }
    let cert = match shape {
        Shape::Linear(slope) => ConvexityCertificate { m, alpha_m: slope, beta: 1.0 },
        Shape::OddPower(n) => {
            let k = 2 * n - 1;
            let alpha = match mode {
                CertificateMode::Analytic => {
                    // λ = min of the 2n-th derivative of v^{2n}/(2n) = (2n−1)!
                    let lambda = factorial(k);
                    let rho = 0.5 * m;
                    lambda / (2f64.powi(k as i32) * factorial(k)) * (rho / m).powi(k as i32)
                }
                CertificateMode::Sharp => 2f64.powi(2 - 2 * n as i32),
            };
            ConvexityCertificate { m, alpha_m: alpha, beta: k as f64 }
        }
        Shape::General => empirical_certificate(d, m, n_samples, seed)?,
    };
    if !(cert.alpha_m > 0.0) {
        return Err(Error::NotUniformlyConvex);
    }
    revalidate(d, &cert, seed ^ 0x9e37_79b9_7f4a_7c15)
}

fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

fn empirical_certificate(
    d: &dyn Fn(f64) -> f64,
    m: f64,
    n: usize,
    _seed: u64,
) -> Result<ConvexityCertificate> {
    let pts: Vec<f64> = (0..=n).map(|i| -m + 2.0 * m * i as f64 / n as f64).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &w) in pts.iter().enumerate() {
        for &v in &pts[i + 1..] {
            let inc = d(v) - d(w);
            if inc <= 0.0 {
                return Err(Error::NotUniformlyConvex);
            }
            xs.push((v - w).ln());
            ys.push(inc.ln());
        }
    }
    let (slope, _) = least_squares(&xs, &ys);
    let beta = slope.max(1.0);
    let mut alpha = f64::INFINITY;
    for (i, &w) in pts.iter().enumerate() {
        for &v in &pts[i + 1..] {
            alpha = alpha.min((d(v) - d(w)) / (v - w).powf(beta));
        }
    }
    Ok(ConvexityCertificate { m, alpha_m: alpha, beta })
}

/// Lowers `alpha_m` to the smallest ratio seen on 10⁴ fresh random pairs,
/// so the returned certificate is a literal inequality on every probe made.
fn revalidate(
    d: &dyn Fn(f64) -> f64,
    cert: &ConvexityCertificate,
    seed: u64,
) -> Result<ConvexityCertificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alpha = cert.alpha_m;
    for _ in 0..10_000 {
        let v: f64 = rng.gen_range(-cert.m..=cert.m);
        let w: f64 = rng.gen_range(-cert.m..=cert.m);
        let (lo, hi) = if v < w { (v, w) } else { (w, v) };
        if hi - lo < 1e-9 {
            continue;
        }
        let ratio = (d(hi) - d(lo)) / (hi - lo).powf(cert.beta);
        if ratio < alpha * (1.0 - 1e-12) {
            alpha = ratio;
        }
    }
    if !(alpha > 0.0) {
        return Err(Error::NotUniformlyConvex);
    }
    Ok(ConvexityCertificate { alpha_m: alpha, ..*cert })
}

pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn flux_shape(flux: &FluxFunction) -> Shape {
    match flux.kind {
        FluxKind::Burgers => Shape::Linear(1.0),
        FluxKind::EvenPower(1) => Shape::Linear(1.0),
        FluxKind::EvenPower(n) => Shape::OddPower(n),
        FluxKind::Polynomial(_) => Shape::General,
    }
}

/// Convexity certificate on `[−M, M]` using the analytic formula for
/// tagged fluxes and an empirical infimum otherwise.
pub fn certify_hyp_a(flux: &FluxFunction, m: f64, n_samples: usize) -> Result<ConvexityCertificate> {
    certify_hyp_a_with(flux, m, n_samples, CertificateMode::Analytic)
}

pub fn certify_hyp_a_with(
    flux: &FluxFunction,
    m: f64,
    n_samples: usize,
    mode: CertificateMode,
) -> Result<ConvexityCertificate> {
    if !flux.is_convex_on(-m, m, n_samples) {
        return Err(Error::NotUniformlyConvex);
    }
    certify_shape(&|v| flux.da(v), flux_shape(flux), m, n_samples, mode, 0x5eed_a)
}

#[derive(Debug, Clone, PartialEq)]
pub enum EntropySpec {
    /// `η(v) = v²/2`.
    Quadratic,
    /// `η(v) = v`.
    Linear,
    /// `η(v) = v^{2n}/(2n)`.
    EvenPower(u32),
    /// `η(v) = Σ c_k v^k`.
    Polynomial(Vec<f64>),
}

impl EntropySpec {
    /// Parses `quadratic`, `linear`, `even_power:N` or `poly:c0,c1,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (tag, params) = spec.split_once(':').unwrap_or((spec, ""));
        match tag.trim() {
            "quadratic" => Ok(Self::Quadratic),
            "linear" => Ok(Self::Linear),
            "even_power" => Ok(Self::EvenPower(parse_order(tag, params)?)),
            "poly" => {
                let c = parse_params(params)?;
                if c.is_empty() {
                    return Err(Error::InvalidInput("poly entropy needs coefficients".into()));
                }
                Ok(Self::Polynomial(c))
            }
            other => Err(Error::InvalidInput(format!("unknown entropy '{other}'"))),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Self::Quadratic => "quadratic".into(),
            Self::Linear => "linear".into(),
            Self::EvenPower(n) => format!("even_power:{n}"),
            Self::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|x| format!("{x}")).collect();
                format!("poly:{}", parts.join(","))
            }
        }
    }

    pub fn eta(&self, v: f64) -> f64 {
        match self {
            Self::Quadratic => 0.5 * v * v,
            Self::Linear => v,
            Self::EvenPower(n) => v.powi(2 * *n as i32) / (2 * n) as f64,
            Self::Polynomial(c) => poly_eval(c, v),
        }
    }

    pub fn deta(&self, v: f64) -> f64 {
        match self {
            Self::Quadratic => v,
            Self::Linear => 1.0,
            Self::EvenPower(n) => v.powi(2 * *n as i32 - 1),
            Self::Polynomial(c) => poly_eval(&poly_deriv(c), v),
        }
    }

    pub fn d2eta(&self, v: f64) -> f64 {
        match self {
            Self::Quadratic => 1.0,
            Self::Linear => 0.0,
            Self::EvenPower(n) => (2 * n - 1) as f64 * v.powi(2 * *n as i32 - 2),
            Self::Polynomial(c) => poly_eval(&poly_deriv(&poly_deriv(c)), v),
        }
    }

    fn shape(&self) -> Option<Shape> {
        match self {
            Self::Quadratic | Self::EvenPower(1) => Some(Shape::Linear(1.0)),
            Self::Linear => None,
            Self::EvenPower(n) => Some(Shape::OddPower(*n)),
            Self::Polynomial(_) => Some(Shape::General),
        }
    }
}

/// Entropy `η` with flux `q(v) = ∫_0^v η'a'` and, when η is uniformly
/// convex, its convexity certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyPair {
    pub spec: EntropySpec,
    pub flux: FluxFunction,
    pub v_range: f64,
    pub certificate: Option<ConvexityCertificate>,
}

/// Builds the pair on `[−V, V]` with the analytic certificate for tagged
/// entropies.
pub fn make_entropy_pair(spec: EntropySpec, flux: &FluxFunction, v: f64) -> Result<EntropyPair> {
    make_entropy_pair_with(spec, flux, v, CertificateMode::Analytic)
}

pub fn make_entropy_pair_with(
    spec: EntropySpec,
    flux: &FluxFunction,
    v: f64,
    mode: CertificateMode,
) -> Result<EntropyPair> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidInput(format!("entropy range {v} must be positive")));
    }
    let n = 1000;
    let convex = (0..=n).all(|i| spec.d2eta(-v + 2.0 * v * i as f64 / n as f64) >= -1e-12);
    if !convex {
        return Err(Error::EntropyNotConvex);
    }
    let certificate = match spec.shape() {
        None => None,
        Some(shape) => {
            let s = spec.clone();
            match certify_shape(&move |x| s.deta(x), shape, v, 400, mode, 0x5eed_e) {
                Ok(c) => Some(c),
                Err(Error::NotUniformlyConvex) => None,
                Err(e) => return Err(e),
            }
        }
    };
    Ok(EntropyPair { spec, flux: flux.clone(), v_range: v, certificate })
}

impl EntropyPair {
    pub fn eta(&self, v: f64) -> f64 {
        self.spec.eta(v)
    }

    pub fn deta(&self, v: f64) -> f64 {
        self.spec.deta(v)
    }

    pub fn d2eta(&self, v: f64) -> f64 {
        self.spec.d2eta(v)
    }

    /// Entropy flux anchored at `q(0) = 0`.
    pub fn q(&self, v: f64) -> f64 {
        if v == 0.0 {
            return 0.0;
        }
        let f = |w: f64| self.spec.deta(w) * self.flux.da(w);
        let panels = 2 + (v.abs().ceil() as usize).min(64);
        gauss_legendre_composite(&f, 0.0, v, panels)
    }
}

/// `(w−v)(q(w)−q(v)) − (a(w)−a(v))(η(w)−η(v))`.
pub fn tartar_gap(pair: &EntropyPair, flux: &FluxFunction, v: f64, w: f64) -> f64 {
    (w - v) * (pair.q(w) - pair.q(v)) - (flux.a(w) - flux.a(v)) * (pair.eta(w) - pair.eta(v))
}

/// Lower-bound constant for the Tartar gap produced by the integration chain.
pub fn tartar_constant_corrected(alpha: f64, eta0: f64, beta: f64, beta_prime: f64) -> f64 {
    let k = beta + beta_prime;
    alpha * eta0 / ((k + 1.0) * (k + 2.0))
}

/// Lower-bound constant for the Tartar gap as stated in the lemma.
pub fn tartar_constant_stated(alpha: f64, eta0: f64, beta: f64, beta_prime: f64) -> f64 {
    let k = beta + beta_prime;
    alpha * eta0 * k / ((k + 1.0) * (k + 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn burgers_certificate_is_exact() {
        let c = certify_hyp_a(&FluxFunction::burgers(), 1.0, 200).unwrap();
        assert_eq!((c.alpha_m, c.beta), (1.0, 1.0));
    }

    #[test]
    fn quartic_certificate_beta_three() {
        let f = FluxFunction::even_power(2);
        let c = certify_hyp_a(&f, 1.0, 200).unwrap();
        assert_eq!(c.beta, 3.0);
        assert!((c.alpha_m - 1.0 / 64.0).abs() < 1e-15);
        let s = certify_hyp_a_with(&f, 1.0, 200, CertificateMode::Sharp).unwrap();
        assert!((s.alpha_m - 0.25).abs() < 1e-15);
    }

    #[test]
    fn quartic_alpha_below_dense_scan_infimum() {
        let n = 1200;
        let mut inf = f64::INFINITY;
        for i in 0..=n {
            let w = -1.0 + 2.0 * i as f64 / n as f64;
            for j in i + 1..=n {
                let v = -1.0 + 2.0 * j as f64 / n as f64;
                inf = inf.min((v.powi(3) - w.powi(3)) / (v - w).powi(3));
            }
        }
        assert!((inf - 0.25).abs() < 1e-6, "scan infimum {inf}");
        let f = FluxFunction::even_power(2);
        for mode in [CertificateMode::Analytic, CertificateMode::Sharp] {
            let c = certify_hyp_a_with(&f, 1.0, 200, mode).unwrap();
            assert!(c.alpha_m <= inf + 1e-12);
        }
    }

    #[test]
    fn custom_polynomial_certificate_holds() {
        let f = FluxFunction::polynomial(vec![0.0, 0.0, 0.5, 0.0, 0.25]);
        let c = certify_hyp_a(&f, 1.0, 150).unwrap();
        assert!(c.alpha_m > 0.0 && c.beta >= 1.0);
    }

    #[test]
    fn non_convex_flux_is_rejected() {
        let f = FluxFunction::polynomial(vec![0.0, 0.0, 0.0, 1.0]);
        let err = certify_hyp_a(&f, 1.0, 200).unwrap_err();
        assert_eq!(err.to_string(), "flux not uniformly convex at exponent β");
        let lin = FluxFunction::polynomial(vec![0.0, 2.0]);
        assert!(certify_hyp_a(&lin, 1.0, 200).is_err());
    }

    #[test]
    fn quadratic_entropy_flux_is_cubic_over_three() {
        let p = make_entropy_pair(EntropySpec::Quadratic, &FluxFunction::burgers(), 2.0).unwrap();
        for &v in &[-2.0, -0.7, 0.0, 0.3, 1.9] {
            assert!((p.q(v) - v * v * v / 3.0).abs() < 1e-8);
        }
        let c = p.certificate.unwrap();
        assert_eq!((c.alpha_m, c.beta), (1.0, 1.0));
    }

    #[test]
    fn linear_entropy_flux_is_flux() {
        let f = FluxFunction::even_power(2);
        let p = make_entropy_pair(EntropySpec::Linear, &f, 1.5).unwrap();
        for &v in &[-1.5, -0.2, 0.9] {
            assert!((p.q(v) - (f.a(v) - f.a(0.0))).abs() < 1e-12);
        }
        assert!(p.certificate.is_none());
    }

    #[test]
    fn concave_entropy_is_rejected() {
        let err = make_entropy_pair(EntropySpec::Polynomial(vec![0.0, 0.0, -1.0]), &FluxFunction::burgers(), 1.0)
            .unwrap_err();
        assert_eq!(err.to_string(), "entropy not convex");
    }

    #[test]
    fn q_derivative_matches_eta_prime_a_prime() {
        let f = FluxFunction::polynomial(vec![0.0, 0.3, 0.5, 0.1, 0.2]);
        let p = make_entropy_pair(EntropySpec::EvenPower(2), &f, 1.0).unwrap();
        for &v in &[-0.9, -0.3, 0.2, 0.8] {
            let h = 1e-5;
            let fd = (p.q(v + h) - p.q(v - h)) / (2.0 * h);
            let exact = p.deta(v) * f.da(v);
            assert!(((fd - exact) / exact).abs() < 1e-6);
        }
    }

    #[test]
    fn tartar_gap_arithmetic() {
        let f = FluxFunction::burgers();
        let p = make_entropy_pair(EntropySpec::Quadratic, &f, 1.0).unwrap();
        assert!((tartar_gap(&p, &f, 0.0, 1.0) - 1.0 / 12.0).abs() < 1e-14);
        assert!((tartar_gap(&p, &f, -1.0, 1.0) - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(tartar_gap(&p, &f, 0.4, 0.4), 0.0);
        assert!((tartar_constant_corrected(1.0, 1.0, 1.0, 1.0) - 1.0 / 12.0).abs() < 1e-15);
        assert!((tartar_constant_stated(1.0, 1.0, 1.0, 1.0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_speed_roundtrip() {
        for f in [FluxFunction::burgers(), FluxFunction::even_power(2), FluxFunction::polynomial(vec![0.0, 0.1, 0.5, 0.0, 0.25])] {
            for &v in &[-0.8, -0.1, 0.0, 0.45, 0.9] {
                let back = f.inverse_speed(f.da(v), -1.0, 1.0);
                assert!((back - v).abs() < 1e-9, "{} at {v}: {back}", f.tag());
            }
        }
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["burgers", "even_power:2", "poly:0,0,0.5"] {
            assert_eq!(FluxFunction::parse(s).unwrap().tag(), s);
        }
        assert!(FluxFunction::parse("cubic").is_err());
        assert_eq!(EntropySpec::parse("even_power:3").unwrap(), EntropySpec::EvenPower(3));
    }

    #[test]
    fn aprime_l1_of_burgers() {
        let f = FluxFunction::burgers();
        assert!((f.aprime_l1(-1.0, 1.0) - 1.0).abs() < 1e-13);
        assert!((f.aprime_l1(0.5, 1.0) - 0.375).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn certificates_hold_on_random_pairs(v in -1.0f64..1.0, w in -1.0f64..1.0, n in 1u32..4) {
            let f = FluxFunction::even_power(n);
            for mode in [CertificateMode::Analytic, CertificateMode::Sharp] {
                let c = certify_hyp_a_with(&f, 1.0, 120, mode).unwrap();
                prop_assert!(c.holds(|x| f.da(x), v, w));
            }
        }

        #[test]
        fn tartar_gap_symmetric_and_nonnegative(v in -1.0f64..1.0, w in -1.0f64..1.0) {
            let f = FluxFunction::even_power(2);
            let p = make_entropy_pair(EntropySpec::Quadratic, &f, 1.0).unwrap();
            let g1 = tartar_gap(&p, &f, v, w);
            let g2 = tartar_gap(&p, &f, w, v);
            prop_assert!((g1 - g2).abs() <= 1e-14 * (1.0 + g1.abs()));
            prop_assert!(g1 >= -1e-14);
        }
    }
}
