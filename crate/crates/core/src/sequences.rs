//! Explicit test families: the `psi_k` family behind the lower bound and the
//! Moser sequence `u_k` that concentrates at the origin.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::functionals::ln_phi_n;
use crate::geometry::{self, ln_sinh, sinh_pow, DimensionContext};
use crate::profiles::{HyperbolicRadialFunction, RadialProfile};
use crate::quad::{self, QuadOptions};

/// Ratios above this are reported as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

fn check_beta_args(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain("a", a, "finite a > 0"));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(domain("b", b, "finite b > 0"));
    }
    Ok(())
}

/// `ln B(a, b)` through log-gamma.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    check_beta_args(a, b)?;
    Ok(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))
}

/// Euler beta function `Gamma(a) Gamma(b) / Gamma(a + b)`.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    ln_beta(a, b).map(f64::exp)
}

/// `B(eps, b1) / B(eps, b2)` with the common `Gamma(eps)` cancelled.
pub fn beta_ratio(eps: f64, b1: f64, b2: f64) -> Result<f64> {
    check_beta_args(eps, b1)?;
    check_beta_args(eps, b2)?;
    Ok((ln_gamma(b1) - ln_gamma(eps + b1) - ln_gamma(b2) + ln_gamma(eps + b2)).exp())
}

fn check_k(k: f64, min: f64) -> Result<()> {
    if k >= min && k.is_finite() {
        Ok(())
    } else {
        Err(domain("k", k, "finite k in the admissible range"))
    }
}

fn check_lambda_open(ctx: &DimensionContext, lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda < ctx.hardy() {
        Ok(())
    } else {
        Err(domain("lambda", lambda, "0 <= lambda < ((n-1)/n)^n"))
    }
}

/// Closed-form quantities of `psi_k(x) = (1 - |x|^2)^c`, `c = (n-1)/n + 1/(nk)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiKRecord {
    pub n: u32,
    pub k: f64,
    pub lambda: f64,
    /// `int psi_k^n dVol_g`.
    pub ln_norm_closed: f64,
    /// `int |grad_g psi_k|^n dVol_g`.
    pub energy_closed: f64,
    /// `a_k^n`, fixing the constraint norm of `a_k psi_k` at 1.
    pub a_k_n: f64,
    /// `a_k^n int psi_k^n dVol_g`.
    pub product: f64,
    /// Its limit `1 / (hardy - lambda)`.
    pub limit_target: f64,
}

fn psi_exponent(n: u32, k: f64) -> f64 {
    let nf = f64::from(n);
    (nf - 1.0) / nf + 1.0 / (nf * k)
}

pub fn psi_k_closed_forms(ctx: &DimensionContext, k: f64, lambda: f64) -> Result<PsiKRecord> {
    check_k(k, 1.0)?;
    check_lambda_open(ctx, lambda)?;
    let n = ctx.n();
    let nf = ctx.nf();
    let eps = 1.0 / k;
    let scale = ctx.omega() * 2f64.powi(n as i32 - 1);
    let cn = psi_exponent(n, k).powi(n as i32);
    let ln_norm_closed = scale * beta(eps, nf / 2.0)?;
    let energy_closed = scale * cn * beta(eps, nf)?;
    let denom = cn * beta_ratio(eps, nf, nf / 2.0)? - lambda;
    let product = 1.0 / denom;
    Ok(PsiKRecord {
        n,
        k,
        lambda,
        ln_norm_closed,
        energy_closed,
        a_k_n: product / ln_norm_closed,
        product,
        limit_target: 1.0 / (ctx.hardy() - lambda),
    })
}

/// `int psi_k^n dVol_g` and `int |grad_g psi_k|^n dVol_g` by quadrature of
/// the radial integrals over `r in [0, 1)`.
///
/// `psi_k = (1 - r^2)^c`, `|grad_g psi_k|_g = c r (1 - r^2)^c` and
/// `dVol_g = omega (2 / (1 - r^2))^n r^(n-1) dr`. Both integrands behave like
/// `(1 - r^2)^(1/k - 1)` at `r = 1`; the substitution `1 - r^2 = x^k` turns
/// that into a bounded integrand on `x in [0, 1]`, evaluated in log space.
pub fn psi_k_norms_quadrature(ctx: &DimensionContext, k: f64) -> Result<(f64, f64)> {
    check_k(k, 1.0)?;
    let n = ctx.n();
    let nf = ctx.nf();
    let c = psi_exponent(n, k);
    let ln2 = std::f64::consts::LN_2;
    // common factor: volume density times the Jacobian dr = k x^(k-1) dx / (2 r)
    let density = |x: f64, extra_r: i32, extra_c: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let ln_u = k * x.ln(); // ln(1 - r^2)
        let r2 = -ln_u.exp_m1(); // r^2 = 1 - x^k
        if r2 <= 0.0 {
            return 0.0;
        }
        let ln_r = 0.5 * r2.ln();
        let ln_val = c * nf * ln_u + extra_c // psi^n or |grad psi|^n without r^n
            + nf * (ln2 - ln_u)              // (2 / (1 - r^2))^n
            + f64::from(n as i32 - 1 + extra_r) * ln_r
            + k.ln() + (k - 1.0) * x.ln() - ln2 - ln_r;
        ln_val.exp()
    };
    let opts = QuadOptions::for_precision::<f64>().rel(1e-13);
    let breaks = quad::graded_breaks(1.0, 0.0, 0.5, 30);
    let norm = quad::integrate_with_breaks(|x| density(x, 0, 0.0), 0.0, 1.0, &breaks, opts)?;
    let energy = quad::integrate_with_breaks(|x| density(x, n as i32, nf * c.ln()), 0.0, 1.0, &breaks, opts)?;
    Ok((ctx.omega() * norm.value, ctx.omega() * energy.value))
}

/// `psi_k` as a function of the geodesic radius: `sech(t/2)^(2c)`.
pub fn psi_k_radial(n: u32, k: f64, t: f64) -> f64 {
    (-2.0 * psi_exponent(n, k) * (t / 2.0).cosh().ln()).exp()
}

/// Piecewise-linear measure profile sampling `psi_k` on `t in [0, t_max]`
/// at `points` radii, dropping to zero at the last one.
pub fn psi_k_profile(ctx: &DimensionContext, k: f64, t_max: f64, points: usize) -> Result<RadialProfile> {
    check_k(k, 1.0)?;
    if points < 2 {
        return Err(domain("points", points as f64, "points >= 2"));
    }
    let mut knots = Vec::with_capacity(points + 1);
    let mut values = Vec::with_capacity(points + 1);
    for i in 0..points {
        let t = t_max * i as f64 / (points - 1) as f64;
        knots.push(ctx.sigma() * geometry::phi(ctx, t)?);
        values.push(psi_k_radial(ctx.n(), k, t));
    }
    *values.last_mut().expect("points >= 2") = 0.0;
    RadialProfile::new(knots, values)
}

/// `alpha_n^(n-1) / (n-1)! * (hardy - lambda)^-1`.
pub fn lower_bound(ctx: &DimensionContext, lambda: f64) -> Result<f64> {
    check_lambda_open(ctx, lambda)?;
    let n = ctx.n();
    let fact: f64 = (1..n).map(f64::from).product();
    Ok(ctx.alpha().powi(n as i32 - 1) / fact / (ctx.hardy() - lambda))
}

/// Least-squares fit of `y = A x^e` on a log-log scale; returns `(e, A)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(domain("points", xs.len() as f64, "at least two paired points"));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(domain("data", f64::NAN, "positive finite data"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let e = sxy / sxx;
    Ok((e, (my - e * mx).exp()))
}

/// The three integrals that fix `C_k`:
/// `a = (1/k) int_{e^-k}^1 t^-n sinh^(n-1)`,
/// `b = k^(n-1) int_0^{e^-k} sinh^(n-1)` and
/// `d = (1/k) int_{e^-k}^1 (-ln t)^n sinh^(n-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoserIntegrals {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

/// Moser-sequence data at one `k`, before any exponential functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoserFunction {
    pub n: u32,
    pub k: f64,
    pub c_k: f64,
    pub integrals: MoserIntegrals,
    /// Value on the inner ball `rho < e^-k`.
    pub plateau: f64,
}

/// Computes the integrals after `t = e^-x`, which maps `[e^-k, 1]` to
/// `[0, k]` with smooth integrands.
pub fn moser_integrals(ctx: &DimensionContext, k: f64) -> Result<MoserIntegrals> {
    check_k(k, 2.0)?;
    let n = ctx.n();
    let p = n - 1;
    let nf = ctx.nf();
    // (sinh t / t)^(n-1) at t = e^-x
    let a = quad::integrate_f64(
        |x| {
            let t = (-x).exp();
            (t.sinh() / t).powi(p as i32)
        },
        0.0,
        k,
    )?;
    // x^n sinh(e^-x)^(n-1) e^-x
    let d = quad::integrate_f64(
        |x| {
            let t = (-x).exp();
            (nf * x.ln() + f64::from(p) * ln_sinh(t) - x).exp()
        },
        0.0,
        k,
    )?;
    let b = k.powi(p as i32) * geometry::phi(ctx, (-k).exp())? / nf;
    Ok(MoserIntegrals {
        a: a.value / k,
        b,
        d: d.value / k,
    })
}

/// `C_k` and the shape of `u_k`.
pub fn moser_function(ctx: &DimensionContext, k: f64) -> Result<MoserFunction> {
    let ints = moser_integrals(ctx, k)?;
    let bracket = ints.a - ctx.hardy() * (ints.b + ints.d);
    if !(bracket > 0.0) {
        return Err(Error::NonFinite {
            what: "C_k bracket",
            at: k,
        });
    }
    let c_k = bracket.powf(-1.0 / ctx.nf());
    let plateau = ctx.omega().powf(-1.0 / ctx.nf()) * c_k * k.powf((ctx.nf() - 1.0) / ctx.nf());
    Ok(MoserFunction {
        n: ctx.n(),
        k,
        c_k,
        integrals: ints,
        plateau,
    })
}

pub fn moser_c_k(ctx: &DimensionContext, k: f64) -> Result<f64> {
    moser_function(ctx, k).map(|m| m.c_k)
}

impl MoserFunction {
    /// `u_k` at geodesic radius `rho`.
    pub fn eval(&self, rho: f64) -> f64 {
        if rho < (-self.k).exp() {
            self.plateau
        } else if rho < 1.0 {
            self.plateau * (-rho.ln()) / self.k
        } else {
            0.0
        }
    }

    /// `|du_k / d rho|`.
    pub fn gradient(&self, rho: f64) -> f64 {
        if rho > (-self.k).exp() && rho < 1.0 {
            self.plateau / (self.k * rho)
        } else {
            0.0
        }
    }

    /// `||u_k||^n = C_k^n (b + d)`.
    pub fn ln_norm(&self) -> f64 {
        self.c_k.powi(self.n as i32) * (self.integrals.b + self.integrals.d)
    }
}

/// `u_k` sampled at radii graded toward the plateau edge, as a piecewise
/// linear function of the geodesic radius.
pub fn moser_profile(ctx: &DimensionContext, k: f64, points: usize) -> Result<HyperbolicRadialFunction> {
    let m = moser_function(ctx, k)?;
    profile_knots(&m, points).map(|(t, v)| HyperbolicRadialFunction::new(t, v))?
}

fn profile_knots(m: &MoserFunction, points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if points < 2 {
        return Err(domain("points", points as f64, "points >= 2"));
    }
    // geometric in rho from e^-k to 1, so -ln rho is uniform
    let mut radii = vec![0.0];
    let mut values = vec![m.plateau];
    for i in 0..points {
        let x = m.k * (1.0 - i as f64 / (points - 1) as f64);
        let rho = (-x).exp();
        radii.push(rho);
        values.push(if i + 1 == points { 0.0 } else { m.eval(rho) });
    }
    Ok((radii, values))
}

/// Measure-line profile through the samples of `u_k` used by
/// [`moser_profile`]; exact at the knots, linear in `s` between them.
pub fn moser_measure_profile(ctx: &DimensionContext, k: f64, points: usize) -> Result<RadialProfile> {
    let m = moser_function(ctx, k)?;
    let (radii, values) = profile_knots(&m, points)?;
    let knots = radii
        .iter()
        .map(|&t| geometry::phi(ctx, t).map(|p| ctx.sigma() * p))
        .collect::<Result<Vec<_>>>()?;
    RadialProfile::new(knots, values)
}

/// `||grad_g u_k||^n - hardy ||u_k||^n` by direct quadrature in `rho`, with
/// break points at `e^-j`; independent of the substituted integrals that
/// define `C_k`.
pub fn moser_constraint_direct(ctx: &DimensionContext, m: &MoserFunction) -> Result<f64> {
    let n = ctx.n();
    let p = n - 1;
    let k = m.k;
    let inner = (-k).exp();
    let mut breaks: Vec<f64> = (1..k.ceil() as i32).map(|j| (-f64::from(j)).exp()).collect();
    breaks.reverse();
    let opts = QuadOptions::for_precision::<f64>();
    let grad = quad::integrate_with_breaks(
        |r| m.gradient(r).powi(n as i32) * sinh_pow(r, p),
        inner,
        1.0,
        &breaks,
        opts,
    )?;
    let outer = quad::integrate_with_breaks(|r| m.eval(r).powi(n as i32) * sinh_pow(r, p), inner, 1.0, &breaks, opts)?;
    let core = quad::integrate_f64(|r| sinh_pow(r, p), 0.0, inner)?;
    let norm = outer.value + m.plateau.powi(n as i32) * core.value;
    Ok(ctx.omega() * (grad.value - ctx.hardy() * norm))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Finite,
    Diverged,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoserKRecord {
    pub n: u32,
    pub k: f64,
    pub c_k: f64,
    /// `ratio` is `+inf` when it exceeds the floating-point range; `ln_ratio`
    /// stays finite.
    pub ratio: f64,
    pub ln_ratio: f64,
    pub alpha: f64,
    pub p: f64,
    pub ln_norm: f64,
    pub outcome: Outcome,
}

fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `(1 / ||u_k||^n) int Phi_n(alpha |u_k|^(n/(n-1))) / (1 + |u_k|)^p dVol_g`
/// by polar quadrature of the exact piecewise `u_k`, in log space.
pub fn blowup_ratio(ctx: &DimensionContext, k: f64, alpha: f64, p: f64) -> Result<MoserKRecord> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain("alpha", alpha, "finite alpha > 0"));
    }
    if !(p >= 0.0 && p.is_finite()) {
        return Err(domain("p", p, "finite p >= 0"));
    }
    let m = moser_function(ctx, k)?;
    let n = ctx.n();
    let q = ctx.conjugate();
    let u0 = m.plateau;
    let top = alpha * u0.powf(q);
    // inner ball: constant integrand over a volume sigma Phi(e^-k)
    let ln_inner = ln_phi_n(n, top) - p * u0.ln_1p() + ctx.sigma().ln() + geometry::phi(ctx, (-k).exp())?.ln();
    // outer shell, rho = e^-x: omega int_0^k Phi_n(top (x/k)^q) (1 + u0 x/k)^-p sinh(e^-x)^(n-1) e^-x dx
    let ln_density = |x: f64| -> f64 {
        let y = x / k;
        ln_phi_n(n, top * y.powf(q)) - p * (u0 * y).ln_1p() + f64::from(n - 1) * ln_sinh((-x).exp()) - x
    };
    let shift = ln_density(k).max(ln_density(0.5 * k)).max(ln_density(1e-3 * k));
    let mut breaks: Vec<f64> = (0..8).map(|j| k - 2f64.powi(j)).filter(|&x| x > 0.0).collect();
    breaks.reverse();
    let outer = quad::integrate_with_breaks(
        |x| if x <= 0.0 { 0.0 } else { (ln_density(x) - shift).exp() },
        0.0,
        k,
        &breaks,
        QuadOptions::for_precision::<f64>(),
    )?;
    let ln_outer = if outer.value > 0.0 {
        ctx.omega().ln() + outer.value.ln() + shift
    } else {
        f64::NEG_INFINITY
    };
    let ln_norm = m.ln_norm();
    let ln_ratio = ln_add_exp(ln_inner, ln_outer) - ln_norm.ln();
    if !ln_ratio.is_finite() {
        return Err(Error::NonFinite {
            what: "blow-up ratio",
            at: k,
        });
    }
    let ratio = ln_ratio.exp();
    let outcome = if ratio > DIVERGENCE_THRESHOLD {
        Outcome::Diverged
    } else {
        Outcome::Finite
    };
    Ok(MoserKRecord {
        n,
        k,
        c_k: m.c_k,
        ratio,
        ln_ratio,
        alpha,
        p,
        ln_norm,
        outcome,
    })
}

/// [`blowup_ratio`] over several `k`, in parallel; output ordered as `ks`.
pub fn blowup_sweep(ctx: &DimensionContext, ks: &[f64], alpha: f64, p: f64) -> Result<Vec<MoserKRecord>> {
    ks.par_iter().map(|&k| blowup_ratio(ctx, k, alpha, p)).collect()
}

/// [`psi_k_closed_forms`] over several `k`, in parallel; output ordered as `ks`.
pub fn psi_k_sweep(ctx: &DimensionContext, ks: &[f64], lambda: f64) -> Result<Vec<PsiKRecord>> {
    ks.par_iter().map(|&k| psi_k_closed_forms(ctx, k, lambda)).collect()
}

/// `t^(n-1) / (n-1)!`, the lower estimate of `Phi_n` behind [`lower_bound`].
pub fn phi_n_lower_estimate(n: u32, t: f64) -> f64 {
    let fact: f64 = (1..n).map(f64::from).product();
    t.powi(n as i32 - 1) / fact
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_context;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn beta_simple_values() {
        assert_relative_eq!(beta(1.0, 1.0).unwrap(), 1.0, max_relative = 1e-15);
        for n in 1..8 {
            assert_relative_eq!(beta(1.0, f64::from(n)).unwrap(), 1.0 / f64::from(n), max_relative = 1e-13);
        }
        assert!(beta(0.0, 1.0).is_err());
        assert!(beta(1.0, -1.0).is_err());
    }

    #[test]
    fn beta_small_argument_against_series() {
        // B(e, 3) = 1/e - gamma - psi(3) + e [gamma^2/2 + pi^2/12 + gamma psi(3) + (psi(3)^2 - psi'(3))/2]
        let eps = 1e-6;
        let psi3 = 1.5 - EULER_GAMMA;
        let trigamma3 = PI * PI / 6.0 - 1.25;
        let oracle = 1.0 / eps - EULER_GAMMA - psi3
            + eps
                * (EULER_GAMMA * EULER_GAMMA / 2.0 + PI * PI / 12.0 + EULER_GAMMA * psi3
                    + (psi3 * psi3 - trigamma3) / 2.0);
        assert_relative_eq!(beta(eps, 3.0).unwrap(), oracle, max_relative = 1e-10);
    }

    #[test]
    fn product_has_closed_form_for_n2() {
        // n = 2, lambda = 0: product = 4 / (1 + 1/k)
        let ctx = make_context(2).unwrap();
        for k in [1.0, 3.0, 1e3, 1e6] {
            let r = psi_k_closed_forms(&ctx, k, 0.0).unwrap();
            assert_relative_eq!(r.product, 4.0 / (1.0 + 1.0 / k), max_relative = 1e-12);
        }
    }

    #[test]
    fn psi_k_rejects_hardy() {
        let ctx = make_context(3).unwrap();
        assert!(psi_k_closed_forms(&ctx, 5.0, ctx.hardy()).is_err());
        assert!(lower_bound(&ctx, ctx.hardy()).is_err());
    }

    #[test]
    fn psi_k_quadrature_matches_closed_forms() {
        for n in [2, 3] {
            let ctx = make_context(n).unwrap();
            for k in [2.0, 5.0, 20.0, 100.0] {
                let rec = psi_k_closed_forms(&ctx, k, 0.0).unwrap();
                let (norm, energy) = psi_k_norms_quadrature(&ctx, k).unwrap();
                assert_relative_eq!(norm, rec.ln_norm_closed, max_relative = 1e-8);
                assert_relative_eq!(energy, rec.energy_closed, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn lower_bound_values() {
        let c2 = make_context(2).unwrap();
        assert_relative_eq!(lower_bound(&c2, 0.0).unwrap(), 16.0 * PI, max_relative = 1e-12);
        let c3 = make_context(3).unwrap();
        let a3 = 3.0 * (4.0 * PI).sqrt();
        assert_relative_eq!(lower_bound(&c3, 0.0).unwrap(), a3 * a3 * 27.0 / 16.0, max_relative = 1e-12);
        let mut prev = 0.0;
        for i in 0..50 {
            let lam = c3.hardy() * (1.0 - 0.8f64.powi(i));
            let v = lower_bound(&c3, lam).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn power_law_fit_recovers_exponent() {
        let xs = [1.0, 10.0, 100.0, 1000.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        let (e, a) = fit_power_law(&xs, &ys).unwrap();
        assert_relative_eq!(e, -1.5, max_relative = 1e-12);
        assert_relative_eq!(a, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn moser_constraint_is_one() {
        for n in [2, 3] {
            let ctx = make_context(n).unwrap();
            for k in [5.0, 12.0, 40.0] {
                let m = moser_function(&ctx, k).unwrap();
                let c = moser_constraint_direct(&ctx, &m).unwrap();
                assert!((c - 1.0).abs() < 1e-6, "n={n} k={k}: {c}");
            }
        }
    }

    #[test]
    fn moser_a_integral_against_direct_form() {
        let ctx = make_context(3).unwrap();
        let k = 6.0;
        let ints = moser_integrals(&ctx, k).unwrap();
        let direct = quad::integrate_with_breaks(
            |t: f64| t.powi(-3) * t.sinh().powi(2),
            (-k).exp(),
            1.0,
            &quad::graded_breaks((-k as f64).exp(), 1.0, 0.5, 20),
            QuadOptions::for_precision::<f64>(),
        )
        .unwrap();
        assert_relative_eq!(ints.a, direct.value / k, max_relative = 1e-11);
    }

    #[test]
    fn moser_profile_is_monotone() {
        let ctx = make_context(2).unwrap();
        let u = moser_profile(&ctx, 5.0, 50).unwrap();
        assert!(u.values().windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*u.values().last().unwrap(), 0.0);
        assert_eq!(*u.radius_knots().last().unwrap(), 1.0);
    }

    #[test]
    fn blowup_ratio_matches_layer_cake_on_dense_profile() {
        let ctx = make_context(2).unwrap();
        let exact = blowup_ratio(&ctx, 5.0, ctx.alpha(), 2.0).unwrap();
        let v = moser_measure_profile(&ctx, 5.0, 4000).unwrap();
        let approx = crate::functionals::exact_growth_ratio_with(&ctx, &v, ctx.alpha(), 2.0).unwrap();
        assert_relative_eq!(approx.value, exact.ratio, max_relative = 1e-4);
    }

    #[test]
    fn blowup_rejects_bad_parameters() {
        let ctx = make_context(2).unwrap();
        assert!(blowup_ratio(&ctx, 5.0, 0.0, 2.0).is_err());
        assert!(blowup_ratio(&ctx, 5.0, 1.0, -1.0).is_err());
        assert!(blowup_ratio(&ctx, 1.0, 1.0, 1.0).is_err());
    }
}
