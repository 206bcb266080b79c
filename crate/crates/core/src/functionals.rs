//! Scalar functionals of a rearrangement profile.
//!
//! Everything is expressed on the measure half-line. The Euclidean energy,
//! the L^n norm and the `w`-term are integrated exactly segment by segment;
//! the hyperbolic energy and the exponential functionals go through adaptive
//! quadrature and carry an error estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, sinh_pow, DimensionContext};
use crate::profiles::{RadialProfile, Segment};
use crate::quad::{self, QuadOptions};

/// A value with its quadrature error estimate (zero for exact evaluations).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub hyperbolic_energy: f64,
    pub euclidean_energy: f64,
    pub ln_norm: f64,
    pub extra_term: f64,
    pub quad_error_estimate: f64,
}

/// `int_a^b |L|^n` for `L` linear with endpoint values `la`, `lb`.
fn abs_linear_pow_integral(la: f64, lb: f64, width: f64, n: u32) -> f64 {
    let n1 = f64::from(n + 1);
    if la == 0.0 && lb == 0.0 {
        return 0.0;
    }
    if la * lb >= 0.0 {
        let (a, b) = (la.abs(), lb.abs());
        // (b^(n+1) - a^(n+1)) / (b - a) expanded to avoid cancellation
        let mut sum = 0.0;
        for j in 0..=n {
            sum += a.powi(j as i32) * b.powi((n - j) as i32);
        }
        width * sum / n1
    } else {
        let theta = la / (la - lb);
        width * (theta * la.abs().powi(n as i32) + (1.0 - theta) * lb.abs().powi(n as i32)) / n1
    }
}

/// `int_0^inf v(s)^n ds`, exact for piecewise-linear `v`.
pub fn ln_norm(v: &RadialProfile, n: u32) -> f64 {
    v.segments()
        .map(|seg| abs_linear_pow_integral(seg.v0, seg.v1, seg.width(), n))
        .sum()
}

/// `(n sigma)^n int |v'|^n (s / sigma)^(n-1) ds`, exact per segment.
pub fn euclidean_energy(ctx: &DimensionContext, v: &RadialProfile) -> f64 {
    let n = ctx.n();
    let mut acc = 0.0;
    for seg in v.segments() {
        let m = seg.slope().abs();
        if m == 0.0 {
            continue;
        }
        // s1^n - s0^n = (s1 - s0) * sum_j s1^j s0^(n-1-j)
        let mut diff = 0.0;
        for j in 0..n {
            diff += seg.s1.powi(j as i32) * seg.s0.powi((n - 1 - j) as i32);
        }
        acc += m.powi(n as i32) * seg.width() * diff;
    }
    ctx.nf().powi(n as i32 - 1) * ctx.sigma() * acc
}

/// `(n-1)^n int_0^inf |(v(s) s^(1/n))'|^n s^(n-1) ds`.
///
/// On a linear piece with slope `m` the integrand is `|m s + v(s)/n|^n`,
/// so each segment integrates exactly.
pub fn extra_term(ctx: &DimensionContext, v: &RadialProfile) -> f64 {
    let n = ctx.n();
    let sum: f64 = v.segments().map(|seg| extra_term_segment(&seg, n)).sum();
    (ctx.nf() - 1.0).powi(n as i32) * sum
}

/// Contribution of one segment to the extra term, without the `(n-1)^n`.
pub fn extra_term_segment(seg: &Segment, n: u32) -> f64 {
    let m = seg.slope();
    let nf = f64::from(n);
    let la = m * seg.s0 + seg.v0 / nf;
    let lb = m * seg.s1 + seg.v1 / nf;
    abs_linear_pow_integral(la, lb, seg.width(), n)
}

fn segment_radii(ctx: &DimensionContext, v: &RadialProfile) -> Result<Vec<f64>> {
    v.knots()
        .iter()
        .map(|&s| geometry::phi_inv(ctx, s / ctx.sigma()))
        .collect()
}

/// Hyperbolic Dirichlet n-energy of the hyperbolic symmetrization of `v`,
/// integrated in the geodesic radius:
/// `(n sigma)^(n+1) sum |v'|^n int_{t_i}^{t_(i+1)} sinh(t)^(n^2-1) dt`.
pub fn hyperbolic_energy(ctx: &DimensionContext, v: &RadialProfile) -> Result<Estimate> {
    let n = ctx.n();
    let radii = segment_radii(ctx, v)?;
    let power = n * n - 1;
    let mut value = 0.0;
    let mut error = 0.0;
    for (seg, t) in v.segments().zip(radii.windows(2)) {
        let m = seg.slope().abs();
        if m == 0.0 {
            continue;
        }
        let r = quad::integrate_f64(|x| sinh_pow(x, power), t[0], t[1])?;
        let w = m.powi(n as i32);
        value += w * r.value;
        error += w * r.error;
    }
    let c = (ctx.nf() * ctx.sigma()).powi(n as i32 + 1);
    Ok(Estimate {
        value: c * value,
        error: c * error,
    })
}

/// The same energy integrated in the measure coordinate:
/// `(n sigma)^n sum |v'|^n int sinh(Phi^-1(s / sigma))^(n(n-1)) ds`.
///
/// Independent of [`hyperbolic_energy`] apart from `Phi`; each integrand
/// evaluation inverts `Phi`.
pub fn hyperbolic_energy_measure_route(ctx: &DimensionContext, v: &RadialProfile) -> Result<Estimate> {
    let n = ctx.n();
    let power = n * (n - 1);
    let failure = std::cell::Cell::new(None);
    let integrand = |s: f64| match geometry::phi_inv(ctx, s / ctx.sigma()) {
        Ok(t) => sinh_pow(t, power),
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let opts = QuadOptions::for_precision::<f64>();
    let mut value = 0.0;
    let mut error = 0.0;
    for seg in v.segments() {
        let m = seg.slope().abs();
        if m == 0.0 {
            continue;
        }
        // the integrand is only Holder at s = 0; grade toward it
        let breaks = if seg.s0 == 0.0 {
            quad::graded_breaks(0.0, seg.s1, 0.25, 12)
        } else {
            Vec::new()
        };
        let r = quad::integrate_with_breaks(integrand, seg.s0, seg.s1, &breaks, opts);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let r = r?;
        let w = m.powi(n as i32);
        value += w * r.value;
        error += w * r.error;
    }
    let c = (ctx.nf() * ctx.sigma()).powi(n as i32);
    Ok(Estimate {
        value: c * value,
        error: c * error,
    })
}

pub fn energy_report(ctx: &DimensionContext, v: &RadialProfile) -> Result<EnergyReport> {
    let hyp = hyperbolic_energy(ctx, v)?;
    Ok(EnergyReport {
        hyperbolic_energy: hyp.value,
        euclidean_energy: euclidean_energy(ctx, v),
        ln_norm: ln_norm(v, ctx.n()),
        extra_term: extra_term(ctx, v),
        quad_error_estimate: hyp.error,
    })
}

/// Below this argument `Phi_n` is summed from its power series.
const SERIES_CUTOFF: f64 = 20.0;

/// `sum_{j=0}^{n-2} t^j / j!`.
fn exp_partial_sum(n: u32, t: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for j in 0..n.saturating_sub(1) {
        if j > 0 {
            term *= t / f64::from(j);
        }
        sum += term;
    }
    sum
}

/// Truncated exponential `Phi_n(t) = e^t - sum_{j<=n-2} t^j / j!`.
pub fn phi_n(n: u32, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t < SERIES_CUTOFF {
        // tail of the exponential series from j = n-1
        let mut term = 1.0;
        for j in 1..n {
            term *= t / f64::from(j);
        }
        let mut sum = term;
        let mut j = f64::from(n);
        loop {
            term *= t / j;
            sum += term;
            if term <= f64::EPSILON * 0.25 * sum {
                break;
            }
            j += 1.0;
        }
        sum
    } else {
        t.exp() - exp_partial_sum(n, t)
    }
}

/// `ln Phi_n(t)`, finite for arguments far beyond the range of `exp`.
pub fn ln_phi_n(n: u32, t: f64) -> f64 {
    if t <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if t < SERIES_CUTOFF {
        return phi_n(n, t).ln();
    }
    let partial = exp_partial_sum(n, t);
    t + (-(partial.ln() - t).exp()).ln_1p()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(crate::error::domain("alpha", alpha, "alpha > 0"))
    }
}

/// Largest exponent `e^x` admitted inside the exponential functionals.
const MAX_EXPONENT: f64 = 700.0;

fn layer_cake<F: Fn(f64) -> f64>(v: &RadialProfile, f: F) -> Result<Estimate> {
    let mut value = 0.0;
    let mut error = 0.0;
    for seg in v.segments() {
        if seg.v0 == 0.0 {
            continue;
        }
        let r = quad::integrate_f64(|s| f(seg.eval(s)), seg.s0, seg.s1)?;
        value += r.value;
        error += r.error;
    }
    Ok(Estimate { value, error })
}

/// `int_{H^n} Phi_n(alpha |u|^(n/(n-1))) dVol_g` in layer-cake form.
pub fn mt_functional(ctx: &DimensionContext, v: &RadialProfile, alpha: f64) -> Result<Estimate> {
    check_alpha(alpha)?;
    let q = ctx.conjugate();
    let top = alpha * v.peak().powf(q);
    if top > MAX_EXPONENT {
        return Err(Error::Overflow { exponent: top });
    }
    let n = ctx.n();
    layer_cake(v, |x| phi_n(n, alpha * x.powf(q)))
}

/// `int Phi_n(alpha |u|^(n/(n-1))) / (1 + |u|)^p dVol_g`.
pub fn exact_growth_integral(ctx: &DimensionContext, v: &RadialProfile, alpha: f64, p: f64) -> Result<Estimate> {
    check_alpha(alpha)?;
    if !(p >= 0.0 && p.is_finite()) {
        return Err(crate::error::domain("p", p, "p >= 0"));
    }
    let q = ctx.conjugate();
    let top = alpha * v.peak().powf(q);
    if top > MAX_EXPONENT {
        return Err(Error::Overflow { exponent: top });
    }
    let n = ctx.n();
    layer_cake(v, |x| phi_n(n, alpha * x.powf(q)) / (1.0 + x).powf(p))
}

/// Exact-growth ratio with the sharp exponent and denominator power.
pub fn exact_growth_ratio(ctx: &DimensionContext, v: &RadialProfile) -> Result<Estimate> {
    exact_growth_ratio_with(ctx, v, ctx.alpha(), ctx.conjugate())
}

/// `(1 / ||u||^n) int Phi_n(alpha |u|^(n/(n-1))) / (1 + |u|)^p dVol_g`.
pub fn exact_growth_ratio_with(ctx: &DimensionContext, v: &RadialProfile, alpha: f64, p: f64) -> Result<Estimate> {
    if v.is_zero() {
        return Err(Error::ZeroProfile("exact-growth ratio"));
    }
    let norm = ln_norm(v, ctx.n());
    let num = exact_growth_integral(ctx, v, alpha, p)?;
    Ok(Estimate {
        value: num.value / norm,
        error: num.error / norm,
    })
}

/// `|a - b|^n - |a|^n - |b|^n + n a b^(n-1)`, non-negative when `a <= b`, `b >= 0`.
pub fn elementary_gap(n: u32, a: f64, b: f64) -> f64 {
    let k = n as i32;
    (a - b).abs().powi(k) - a.abs().powi(k) - b.abs().powi(k) + f64::from(n) * a * b.powi(k - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_context;
    use crate::profiles::random_profile;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cone(support: f64) -> RadialProfile {
        RadialProfile::new(vec![0.0, support], vec![1.0, 0.0]).unwrap()
    }

    #[test]
    fn zero_profile_has_zero_functionals() {
        let z = RadialProfile::zero();
        for n in [2, 3, 4] {
            let ctx = make_context(n).unwrap();
            assert_eq!(hyperbolic_energy(&ctx, &z).unwrap().value, 0.0);
            assert_eq!(euclidean_energy(&ctx, &z), 0.0);
            assert_eq!(ln_norm(&z, n), 0.0);
            assert_eq!(extra_term(&ctx, &z), 0.0);
            assert_eq!(mt_functional(&ctx, &z, ctx.alpha()).unwrap().value, 0.0);
            assert!(matches!(exact_growth_ratio(&ctx, &z), Err(Error::ZeroProfile(_))));
        }
    }

    #[test]
    fn cone_energies_n2() {
        let ctx = make_context(2).unwrap();
        let big_s = 3.0;
        let v = cone(big_s);
        let sigma = PI;
        // sinh^2(Phi^-1(x)) = x + x^2 / 4 for n = 2
        let hand = (2.0 * sigma).powi(2) / (big_s * big_s)
            * (big_s * big_s / (2.0 * sigma) + big_s.powi(3) / (12.0 * sigma * sigma));
        assert_relative_eq!(hyperbolic_energy(&ctx, &v).unwrap().value, hand, max_relative = 1e-12);
        let euclid_hand = (2.0 * sigma).powi(2) / (big_s * big_s) * big_s * big_s / (2.0 * sigma);
        assert_relative_eq!(euclidean_energy(&ctx, &v), euclid_hand, max_relative = 1e-14);
        assert_relative_eq!(ln_norm(&cone(1.0), 2), 1.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn near_step_profile_norm() {
        let eps = 1e-9;
        let v = RadialProfile::new(vec![0.0, 1.0, 1.0 + eps], vec![1.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(ln_norm(&v, 3), 1.0, max_relative = 1e-8);
    }

    #[test]
    fn energy_routes_agree() {
        for n in [2, 3, 4] {
            let ctx = make_context(n).unwrap();
            for seed in 0..4 {
                let v = random_profile(seed, 9, 4.0, 1.0).unwrap();
                let t_route = hyperbolic_energy(&ctx, &v).unwrap().value;
                let s_route = hyperbolic_energy_measure_route(&ctx, &v).unwrap().value;
                assert_relative_eq!(t_route, s_route, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn homogeneity() {
        let v = random_profile(8, 10, 2.0, 1.0).unwrap();
        let c = 1.7;
        let cv = v.scaled(c).unwrap();
        for n in [2, 3, 4] {
            let ctx = make_context(n).unwrap();
            let k = c.powi(n as i32);
            assert_relative_eq!(euclidean_energy(&ctx, &cv), k * euclidean_energy(&ctx, &v), max_relative = 1e-13);
            assert_relative_eq!(extra_term(&ctx, &cv), k * extra_term(&ctx, &v), max_relative = 1e-13);
            assert_relative_eq!(ln_norm(&cv, n), k * ln_norm(&v, n), max_relative = 1e-13);
            assert_relative_eq!(
                hyperbolic_energy(&ctx, &cv).unwrap().value,
                k * hyperbolic_energy(&ctx, &v).unwrap().value,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn extra_term_matches_quadrature_of_definition() {
        // integrate |w'|^n s^(n-1) directly from the w-transform
        let v = random_profile(21, 6, 2.0, 1.0).unwrap();
        for n in [2, 3, 4] {
            let ctx = make_context(n).unwrap();
            let w = crate::profiles::w_transform(&v, n);
            let mut direct = 0.0;
            for seg in v.segments() {
                let mid = 0.5 * (seg.s0 + seg.s1);
                let f = |s: f64| w.derivative(s).abs().powi(n as i32) * s.powi(n as i32 - 1);
                // stay strictly inside the segment so the one-sided derivative is the right one
                let lo = if seg.s0 == 0.0 { 0.0 } else { seg.s0 };
                direct += quad::integrate_f64(f, lo, mid).unwrap().value;
                direct += quad::integrate_f64(f, mid, seg.s1 * (1.0 - 1e-15)).unwrap().value;
            }
            direct *= (f64::from(n) - 1.0).powi(n as i32);
            assert_relative_eq!(extra_term(&ctx, &v), direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn extra_term_vanishes_on_the_critical_power() {
        // v = s^(-1/n) makes w constant; interpolation leaves an O(h^n) residue
        let n = 3;
        let (a, b) = (1.0f64, 2.0f64);
        let on_range = |m: usize| -> f64 {
            let mut knots = vec![0.0];
            let mut values = vec![a.powf(-1.0 / 3.0)];
            for i in 0..=m {
                let s = a + (b - a) * i as f64 / m as f64;
                knots.push(s);
                values.push(s.powf(-1.0 / 3.0));
            }
            knots.push(b + 1.0);
            values.push(0.0);
            let v = RadialProfile::new(knots, values).unwrap();
            v.segments()
                .filter(|seg| seg.s0 >= a && seg.s1 <= b)
                .map(|seg| extra_term_segment(&seg, n))
                .sum()
        };
        let coarse = on_range(100);
        let fine = on_range(400);
        assert!(fine < 1e-8, "term on the power range = {fine:e}");
        // h^3 scaling: a 4x finer mesh shrinks the term by ~64
        let rate = (coarse / fine).log(4.0);
        assert!((rate - 3.0).abs() < 0.1, "observed rate {rate}");
    }

    #[test]
    fn extra_term_constant_stretch_hand_antiderivative() {
        // v = c on [0, a], then linear to 0 at b. On [0, a]:
        // int (c/n)^n ds = a (c/n)^n.
        let (c, a, b) = (2.0, 1.5, 2.5);
        let v = RadialProfile::new(vec![0.0, a, b], vec![c, c, 0.0]).unwrap();
        let n = 3;
        let ctx = make_context(n).unwrap();
        let first = v.segments().next().unwrap();
        assert_relative_eq!(extra_term_segment(&first, n), a * (c / 3.0).powi(3), max_relative = 1e-15);
        // second piece: |m s + v/n| with m = -c/(b-a), hand integral of a linear function cubed
        let m = -c / (b - a);
        let l = |s: f64| m * s + (c + m * (s - a)) / 3.0;
        let root = (a * m - c) / (m * 4.0 / 3.0) * (1.0 / 1.0);
        let root = root.clamp(a, b);
        let prim = |x0: f64, x1: f64| {
            let slope = m * 4.0 / 3.0;
            (l(x1).powi(4) - l(x0).powi(4)) / (4.0 * slope)
        };
        let hand = prim(a, root).abs() + prim(root, b).abs();
        let second = v.segments().nth(1).unwrap();
        assert_relative_eq!(extra_term_segment(&second, n), hand, max_relative = 1e-13);
        assert!(extra_term(&ctx, &v) > 0.0);
    }

    #[test]
    fn phi_n_values() {
        assert_relative_eq!(phi_n(2, 1.0), std::f64::consts::E - 1.0, max_relative = 1e-15);
        for n in 2..=6 {
            assert_eq!(phi_n(n, 0.0), 0.0);
        }
        // 40-term series oracle
        let t = 0.01f64;
        let mut oracle = 0.0;
        let mut term = 1.0;
        for j in 0..40 {
            if j > 0 {
                term *= t / j as f64;
            }
            if j >= 3 {
                oracle += term;
            }
        }
        assert_relative_eq!(phi_n(4, t), oracle, max_relative = 1e-14);
        // lower bound t^(n-1)/(n-1)! and continuity across the series cutoff
        for n in 2..=5 {
            let fact: f64 = (1..n).map(f64::from).product();
            for &t in &[0.1, 1.0, 5.0, 19.999, 20.0, 30.0] {
                assert!(phi_n(n, t) >= t.powi(n as i32 - 1) / fact);
            }
            assert_relative_eq!(phi_n(n, 20.0 - 1e-12), phi_n(n, 20.0), max_relative = 1e-11);
            assert_relative_eq!(ln_phi_n(n, 35.0), phi_n(n, 35.0).ln(), max_relative = 1e-15);
        }
        assert!(ln_phi_n(3, 5000.0).is_finite());
    }

    #[test]
    fn mt_functional_monotone_in_alpha() {
        let ctx = make_context(3).unwrap();
        let v = random_profile(4, 10, 2.0, 0.8).unwrap();
        let mut prev = 0.0;
        for a in [0.5, 1.0, 4.0, ctx.alpha()] {
            let val = mt_functional(&ctx, &v, a).unwrap().value;
            assert!(val >= prev);
            prev = val;
        }
        assert!(matches!(
            mt_functional(&ctx, &v.scaled(100.0).unwrap(), ctx.alpha()),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn mt_functional_cone_against_refined_quadrature() {
        let ctx = make_context(2).unwrap();
        let big_s = 2.0;
        let v = cone(big_s);
        let got = mt_functional(&ctx, &v, 1.0).unwrap().value;
        // oracle: composite midpoint-free Simpson with 10x more panels than needed
        let f = |s: f64| ((1.0 - s / big_s).powi(2)).exp() - 1.0;
        let m = 20000;
        let h = big_s / m as f64;
        let mut acc = f(0.0) + f(big_s);
        for i in 1..m {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let oracle = acc * h / 3.0;
        assert_relative_eq!(got, oracle, max_relative = 1e-12);
    }

    #[test]
    fn exact_growth_crude_bound() {
        let ctx = make_context(2).unwrap();
        let v = random_profile(9, 12, 3.0, 1.0).unwrap();
        let v = v.scaled(1.0 / ln_norm(&v, 2).sqrt()).unwrap();
        if v.peak() <= 1.0 {
            let r = exact_growth_ratio(&ctx, &v).unwrap().value;
            assert!(r <= phi_n(2, ctx.alpha()) * v.support());
        }
    }

    #[test]
    fn elementary_gap_examples() {
        assert_eq!(elementary_gap(2, -3.0, 2.0), 0.0);
        assert!(elementary_gap(3, -1.0, 1.0) >= 0.0);
        assert!(elementary_gap(4, 0.5, 1.0) >= 0.0);
        assert!(elementary_gap(5, 1.0, 1.0) >= 0.0);
    }
}
