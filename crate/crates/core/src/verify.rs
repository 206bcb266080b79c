//! Executable checks of the lemma functions `F`, `G`, `H` and of the
//! comparison inequalities between hyperbolic and Euclidean energies.
//!
//! `F`, `G` and `H` are differences of terms that grow like `e^(n(n-1)t)`,
//! so they are evaluated in normalized form:
//!
//! ```text
//! F / S^(n(n-1))       = 1 - Q^(n-1) - h R^n
//! G / (S^(n(n-2)) C)   = 1 - Q^(n-2) / C - h' R^(n-1) tanh t
//! H / S^((n-1)(n-2))   = 1 + a (S^-2 - R^(n-3) S^-(n-1)) - h'' R^(n-2)
//! ```
//!
//! with `S = sinh t`, `C = cosh t`, `R = Phi / S^(n-1)`, `Q = R / S`,
//! `h = ((n-1)/n)^n`, `h' = ((n-1)/n)^(n-1)`, `h'' = ((n-1)/n)^(n-2)` and
//! `a = n(n-2)/(n-1)^2`. The leading term of each form is 1, so a check
//! against zero with an absolute tolerance is a check scaled by the largest
//! intermediate magnitude.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{domain, Error, Result};
use crate::functionals::{self, elementary_gap};
use crate::geometry::{self, DimensionContext};
use crate::profiles::{self, RadialProfile};
use crate::quad::HasRule;
use crate::Precision;

/// Double-precision values of the normalized `F` below this are recomputed
/// in extended precision.
pub const ESCALATE_BELOW: f64 = 1e-8;
/// Radius beyond which `F` is always evaluated in extended precision.
pub const ESCALATE_RADIUS: f64 = 10.0;

/// Relative tolerance of the comparison checks.
pub const COMPARISON_TOL: f64 = 1e-8;
/// Relative tolerance of the elementary inequality.
pub const ELEMENTARY_TOL: f64 = 1e-12;

/// Identifying parameters carried by every check record.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckContext {
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_id: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheckResult {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub context: CheckContext,
}

impl InequalityCheckResult {
    pub fn new(name: &str, lhs: f64, rhs: f64, tolerance: f64, context: CheckContext) -> Self {
        let slack = lhs - rhs;
        InequalityCheckResult {
            name: name.to_string(),
            lhs,
            rhs,
            slack,
            tolerance,
            pass: slack >= -tolerance,
            context,
        }
    }

    /// One JSON object on a single line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("check records always serialize")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl LemmaGrid {
    pub fn new(t_min: f64, t_max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        let grid = LemmaGrid {
            t_min,
            t_max,
            count,
            spacing,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn log(t_min: f64, t_max: f64, count: usize) -> Result<Self> {
        Self::new(t_min, t_max, count, Spacing::Log)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(domain("count", self.count as f64, "count >= 2"));
        }
        let lo_ok = match self.spacing {
            Spacing::Log => self.t_min > 0.0,
            Spacing::Linear => self.t_min >= 0.0,
        };
        if !lo_ok || !self.t_min.is_finite() {
            return Err(domain("t_min", self.t_min, "t_min > 0 (log) or >= 0 (linear)"));
        }
        if !(self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(domain("t_max", self.t_max, "finite t_max > t_min"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let m = (self.count - 1) as f64;
        let mut out: Vec<f64> = (0..self.count)
            .map(|i| {
                let f = i as f64 / m;
                match self.spacing {
                    Spacing::Log => (self.t_min.ln() + f * (self.t_max / self.t_min).ln()).exp(),
                    Spacing::Linear => self.t_min + f * (self.t_max - self.t_min),
                }
            })
            .collect();
        out[0] = self.t_min;
        out[self.count - 1] = self.t_max;
        out
    }
}

/// Normalized lemma values at one radius, with the precision actually used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaValues {
    pub t: f64,
    pub f_hat: f64,
    /// `None` for n = 2, where `G` and `H` are not defined.
    pub g_hat: Option<f64>,
    pub h_hat: Option<f64>,
    /// `F / Phi^n`, finite without cancellation at small `t`.
    pub f_over_phi_n: f64,
    pub precision: Precision,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaSweepReport {
    pub n: u32,
    pub grid: LemmaGrid,
    /// Minimum of the normalized `F` and where it occurs.
    pub min_f: f64,
    pub argmin_f: f64,
    pub min_g: Option<f64>,
    pub min_h: Option<f64>,
    /// n = 2 only: `max |F| / max(1, sinh(t)^2)`.
    pub equality_deviation: Option<f64>,
    /// `F / Phi^n` at the smallest grid radius.
    pub f_over_phi_n_at_t_min: f64,
    pub extended_points: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Precision-dependent constants of the normalized forms.
struct Coefficients<T> {
    h: T,
    h1: T,
    h2: T,
    a: T,
}

impl<T: HasRule> Coefficients<T> {
    fn new(n: u32) -> Self {
        let q = T::from_f64(f64::from(n - 1)) / T::from_f64(f64::from(n));
        let nf = T::from_f64(f64::from(n));
        let n1 = T::from_f64(f64::from(n - 1));
        let two = T::from_f64(2.0);
        Coefficients {
            h: q.powi(n as i32),
            h1: q.powi(n as i32 - 1),
            h2: q.powi(n as i32 - 2),
            a: nf * (nf - two) / (n1 * n1),
        }
    }
}

/// `Phi(t)` in precision `T`; closed form for n = 2.
fn phi_in<T: HasRule>(ctx: &DimensionContext, t: T) -> Result<T> {
    if ctx.n() == 2 {
        let h = (t * T::from_f64(0.5)).sinh();
        return Ok(T::from_f64(4.0) * h * h);
    }
    geometry::volume_fn(ctx, t)
}

struct Normalized<T> {
    f: T,
    g: Option<T>,
    h: Option<T>,
    f_over_phi_n: T,
}

fn normalized<T: HasRule>(ctx: &DimensionContext, t: T) -> Result<Normalized<T>> {
    let n = ctx.n();
    let k = n as i32;
    let c = Coefficients::<T>::new(n);
    let s = t.sinh();
    let ch = t.cosh();
    let phi = phi_in(ctx, t)?;
    let one = T::one();
    let r = phi / s.powi(k - 1);
    let q = r / s;
    let f = one - q.powi(k - 1) - c.h * r.powi(k);
    let (g, h) = if n >= 3 {
        let g = one - q.powi(k - 2) / ch - c.h1 * r.powi(k - 1) * (s / ch);
        let h = one + c.a * (s.powi(-2) - r.powi(k - 3) * s.powi(-(k - 1))) - c.h2 * r.powi(k - 2);
        (Some(g), Some(h))
    } else {
        (None, None)
    };
    // F / Phi^n = F_hat * S^(n(n-1)) / Phi^n = F_hat / R^n
    let f_over_phi_n = f / r.powi(k);
    Ok(Normalized {
        f,
        g,
        h,
        f_over_phi_n,
    })
}

fn to_values<T: HasRule>(t: f64, v: Normalized<T>, precision: Precision) -> LemmaValues {
    LemmaValues {
        t,
        f_hat: v.f.to_f64(),
        g_hat: v.g.map(|x| x.to_f64()),
        h_hat: v.h.map(|x| x.to_f64()),
        f_over_phi_n: v.f_over_phi_n.to_f64(),
        precision,
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain("t", t, "finite t > 0"))
    }
}

/// Normalized lemma values in the requested precision.
pub fn lemma_values_in(ctx: &DimensionContext, t: f64, precision: Precision) -> Result<LemmaValues> {
    check_t(t)?;
    match precision {
        Precision::Double => Ok(to_values(t, normalized::<f64>(ctx, t)?, precision)),
        Precision::Extended => Ok(to_values(t, normalized::<Dd>(ctx, Dd::from(t))?, precision)),
    }
}

/// Normalized lemma values, escalating to extended precision where the
/// double-precision result is dominated by cancellation.
pub fn lemma_values(ctx: &DimensionContext, t: f64) -> Result<LemmaValues> {
    check_t(t)?;
    if t <= ESCALATE_RADIUS {
        let d = lemma_values_in(ctx, t, Precision::Double)?;
        let small = |x: Option<f64>| x.is_some_and(|x| x < ESCALATE_BELOW);
        if d.f_hat >= ESCALATE_BELOW && !small(d.g_hat) && !small(d.h_hat) {
            return Ok(d);
        }
    }
    lemma_values_in(ctx, t, Precision::Extended)
}

/// `F(t) = sinh(t)^(n(n-1)) - Phi^(n-1) - ((n-1)/n)^n Phi^n`.
///
/// Returned unnormalized; this overflows for large `n t`, where
/// [`lemma_values`] should be used instead.
pub fn lemma_f(ctx: &DimensionContext, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let v = lemma_values(ctx, t)?;
    let n = ctx.n();
    Ok(v.f_hat * geometry::sinh_pow(t, n * (n - 1)))
}

fn require_n3(ctx: &DimensionContext) -> Result<()> {
    if ctx.n() < 3 {
        Err(domain("n", f64::from(ctx.n()), "G and H need n >= 3"))
    } else {
        Ok(())
    }
}

/// `G(t)` with `F' = n(n-1) sinh(t)^(n-1) G`.
pub fn lemma_g(ctx: &DimensionContext, t: f64) -> Result<f64> {
    require_n3(ctx)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let v = lemma_values(ctx, t)?;
    let n = ctx.n();
    Ok(v.g_hat.expect("n >= 3") * geometry::sinh_pow(t, n * (n - 2)) * t.cosh())
}

/// `H(t)` with `G' = (n-1)^2 sinh(t)^(n-1) H`.
pub fn lemma_h(ctx: &DimensionContext, t: f64) -> Result<f64> {
    require_n3(ctx)?;
    let n = ctx.n();
    if t == 0.0 {
        return Ok(0.0);
    }
    let v = lemma_values(ctx, t)?;
    Ok(v.h_hat.expect("n >= 3") * geometry::sinh_pow(t, (n - 1) * (n - 2)))
}

/// Unnormalized `(F, G, H)` in extended precision, for derivative checks.
pub fn lemma_raw_extended(ctx: &DimensionContext, t: Dd) -> Result<(Dd, Dd, Dd)> {
    require_n3(ctx)?;
    let n = ctx.n();
    let k = n as i32;
    let c = Coefficients::<Dd>::new(n);
    let s = t.sinh();
    let ch = t.cosh();
    let phi = phi_in(ctx, t)?;
    let f = s.powi(k * (k - 1)) - phi.powi(k - 1) - c.h * phi.powi(k);
    let g = s.powi(k * (k - 2)) * ch - phi.powi(k - 2) - c.h1 * phi.powi(k - 1);
    let n1 = Dd::from(f64::from(n - 1));
    let nf = Dd::from(f64::from(n));
    // G' / sinh^(n-1), divided by (n-1)^2
    let h = (nf * (nf - Dd::from(2.0)) * s.powi(k * (k - 2) - k) * ch * ch + s.powi(k * (k - 2) - k + 2)
        - (nf - Dd::from(2.0)) * nf * phi.powi(k - 3)
        - c.h1 * n1 * nf * phi.powi(k - 2))
        / (n1 * n1);
    Ok((f, g, h))
}

/// Relative mismatch of the two derivative identities at `t`, using central
/// differences of the extended-precision `F` and `G` with step `step * t`.
pub fn derivative_chain_errors(ctx: &DimensionContext, t: f64, step: f64) -> Result<(f64, f64)> {
    require_n3(ctx)?;
    check_t(t)?;
    let n = ctx.n();
    let td = Dd::from(t);
    let dt = Dd::from(step * t);
    let (fp, gp, _) = lemma_raw_extended(ctx, td + dt)?;
    let (fm, gm, _) = lemma_raw_extended(ctx, td - dt)?;
    let (_, g, h) = lemma_raw_extended(ctx, td)?;
    let two_dt = dt * Dd::from(2.0);
    let f_prime = (fp - fm) / two_dt;
    let g_prime = (gp - gm) / two_dt;
    let sn1 = td.sinh().powi(n as i32 - 1);
    let nf = Dd::from(f64::from(n));
    let n1 = Dd::from(f64::from(n - 1));
    let f_expect = nf * n1 * sn1 * g;
    let g_expect = n1 * n1 * sn1 * h;
    let rel = |x: Dd, y: Dd| f64::from(((x - y) / y).abs());
    Ok((rel(f_prime, f_expect), rel(g_prime, g_expect)))
}

/// Evaluates the normalized lemma functions over `grid` in parallel.
pub fn sweep_lemma(ctx: &DimensionContext, grid: &LemmaGrid) -> Result<LemmaSweepReport> {
    sweep_lemma_values(ctx, grid, None).map(|(report, _)| report)
}

/// Like [`sweep_lemma`], also returning the per-point values. `precision`
/// forces one precision everywhere; `None` escalates automatically.
pub fn sweep_lemma_values(
    ctx: &DimensionContext,
    grid: &LemmaGrid,
    precision: Option<Precision>,
) -> Result<(LemmaSweepReport, Vec<LemmaValues>)> {
    grid.validate()?;
    let points = grid.points();
    let values: Vec<LemmaValues> = points
        .par_iter()
        .map(|&t| match precision {
            Some(p) => lemma_values_in(ctx, t, p),
            None => lemma_values(ctx, t),
        })
        .collect::<Result<_>>()?;
    let report = summarize_sweep(ctx, grid, &values)?;
    Ok((report, values))
}

/// Tolerance on the normalized `F`, `G`, `H`: the functions are compared
/// against 0 on a scale where the leading term is 1.
pub const LEMMA_TOL: f64 = 1e-12;
/// Cap on `max |F| / max(1, sinh^2)` for n = 2.
pub const EQUALITY_TOL: f64 = 1e-10;

fn summarize_sweep(ctx: &DimensionContext, grid: &LemmaGrid, values: &[LemmaValues]) -> Result<LemmaSweepReport> {
    let mut min_f = f64::INFINITY;
    let mut argmin_f = f64::NAN;
    let mut min_g: Option<f64> = None;
    let mut min_h: Option<f64> = None;
    let mut deviation: f64 = 0.0;
    let mut extended = 0;
    for v in values {
        for x in [Some(v.f_hat), v.g_hat, v.h_hat].into_iter().flatten() {
            if !x.is_finite() {
                return Err(Error::NonFinite {
                    what: "lemma value",
                    at: v.t,
                });
            }
        }
        if v.f_hat < min_f {
            min_f = v.f_hat;
            argmin_f = v.t;
        }
        if let Some(g) = v.g_hat {
            min_g = Some(min_g.map_or(g, |m| m.min(g)));
        }
        if let Some(h) = v.h_hat {
            min_h = Some(min_h.map_or(h, |m| m.min(h)));
        }
        // F / max(1, S^2) = F_hat * S^2 / max(1, S^2)
        let s2 = v.t.sinh().powi(2);
        deviation = deviation.max(v.f_hat.abs() * s2 / s2.max(1.0));
        if v.precision == Precision::Extended {
            extended += 1;
        }
    }
    let equality_deviation = (ctx.n() == 2).then_some(deviation);
    let pass = match equality_deviation {
        Some(d) => d <= EQUALITY_TOL,
        None => {
            min_f >= -LEMMA_TOL
                && min_g.is_none_or(|g| g > -LEMMA_TOL)
                && min_h.is_none_or(|h| h > -LEMMA_TOL)
        }
    };
    Ok(LemmaSweepReport {
        n: ctx.n(),
        grid: *grid,
        min_f,
        argmin_f,
        min_g,
        min_h,
        equality_deviation,
        f_over_phi_n_at_t_min: values[0].f_over_phi_n,
        extended_points: extended,
        tolerance: if ctx.n() == 2 { EQUALITY_TOL } else { LEMMA_TOL },
        pass,
    })
}

/// Hyperbolic energy minus `hardy * ln_norm` against the Euclidean energy,
/// plus the extra term when `strong`.
pub fn check_comparison(ctx: &DimensionContext, v: &RadialProfile, strong: bool) -> Result<InequalityCheckResult> {
    check_comparison_with(ctx, v, strong, CheckContext::default())
}

pub fn check_comparison_with(
    ctx: &DimensionContext,
    v: &RadialProfile,
    strong: bool,
    context: CheckContext,
) -> Result<InequalityCheckResult> {
    let hyp = functionals::hyperbolic_energy(ctx, v)?;
    let norm = functionals::ln_norm(v, ctx.n());
    let lhs = hyp.value - ctx.hardy() * norm;
    let mut rhs = functionals::euclidean_energy(ctx, v);
    if strong {
        rhs += functionals::extra_term(ctx, v);
    }
    let name = if strong { "comparison_strong" } else { "comparison" };
    Ok(InequalityCheckResult::new(
        name,
        lhs,
        rhs,
        COMPARISON_TOL * (1.0 + lhs.abs()),
        CheckContext { n: ctx.n(), ..context },
    ))
}

/// Hyperbolic energy against `hardy * ln_norm`.
pub fn check_hardy(ctx: &DimensionContext, v: &RadialProfile, context: CheckContext) -> Result<InequalityCheckResult> {
    let lhs = functionals::hyperbolic_energy(ctx, v)?.value;
    let rhs = ctx.hardy() * functionals::ln_norm(v, ctx.n());
    Ok(InequalityCheckResult::new(
        "hardy",
        lhs,
        rhs,
        COMPARISON_TOL * (1.0 + lhs.abs()),
        CheckContext { n: ctx.n(), ..context },
    ))
}

/// Weak, strong and Hardy checks for every profile of a seeded corpus.
pub fn comparison_sweep(ctx: &DimensionContext, seed: u64, count: usize) -> Result<Vec<InequalityCheckResult>> {
    let corpus = profiles::random_corpus(seed, count, 1.0)?;
    let nested: Vec<Vec<InequalityCheckResult>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let cx = CheckContext {
                n: ctx.n(),
                t: None,
                profile_id: Some(i),
                seed: Some(seed),
            };
            Ok(vec![
                check_comparison_with(ctx, v, false, cx.clone())?,
                check_comparison_with(ctx, v, true, cx.clone())?,
                check_hardy(ctx, v, cx)?,
            ])
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

fn check_lambda(ctx: &DimensionContext, lambda: f64) -> Result<()> {
    if (0.0..=ctx.hardy()).contains(&lambda) {
        Ok(())
    } else {
        Err(domain("lambda", lambda, "0 <= lambda <= ((n-1)/n)^n"))
    }
}

/// `||grad_g u||^n - lambda ||u||^n` of the hyperbolic realization of `v`.
pub fn check_constraint_norm(ctx: &DimensionContext, v: &RadialProfile, lambda: f64) -> Result<f64> {
    check_lambda(ctx, lambda)?;
    let hyp = functionals::hyperbolic_energy(ctx, v)?.value;
    Ok(hyp - lambda * functionals::ln_norm(v, ctx.n()))
}

/// Rescales `v` so that its constraint norm equals 1.
pub fn normalize_constraint(ctx: &DimensionContext, v: &RadialProfile, lambda: f64) -> Result<RadialProfile> {
    let q = check_constraint_norm(ctx, v, lambda)?;
    if !(q > 0.0) {
        return Err(Error::ZeroProfile("constraint normalization"));
    }
    v.scaled(q.powf(-1.0 / ctx.nf()))
}

/// `|a-b|^n - |a|^n - |b|^n + n a b^(n-1) >= 0` for `a <= b`, `b >= 0`.
pub fn elementary_inequality_slack(n: u32, a: f64, b: f64) -> Result<InequalityCheckResult> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if !(a <= b && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(domain("(a, b)", a - b, "a <= b and b >= 0"));
    }
    let gap = elementary_gap(n, a, b);
    let scale = a.abs().max(b.abs()).powi(n as i32);
    Ok(InequalityCheckResult::new(
        "elementary",
        gap,
        0.0,
        ELEMENTARY_TOL * scale,
        CheckContext {
            n,
            ..CheckContext::default()
        },
    ))
}
