//! Non-increasing rearrangement profiles on the measure half-line and their
//! radial realizations on hyperbolic and Euclidean space.
//!
//! A [`RadialProfile`] is piecewise linear in the measure coordinate `s`
//! (hyperbolic volume) and vanishes from its last knot on. Realizing it on
//! H^n or R^n maps each knot through the volume of the corresponding ball;
//! the realized functions remember that they interpolate linearly in the
//! measure coordinate so that they stay exactly equimeasurable with the
//! profile.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{self, sinh_pow, DimensionContext};
use crate::quad::{self, Integral, QuadOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct RadialProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawProfile> for RadialProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        RadialProfile::new(raw.knots, raw.values)
    }
}

impl From<RadialProfile> for RawProfile {
    fn from(p: RadialProfile) -> Self {
        RawProfile {
            knots: p.knots,
            values: p.values,
        }
    }
}

/// One linear piece of a profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub s0: f64,
    pub s1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Segment {
    #[inline]
    pub fn width(&self) -> f64 {
        self.s1 - self.s0
    }

    /// Constant derivative `v'` on the segment (non-positive).
    #[inline]
    pub fn slope(&self) -> f64 {
        (self.v1 - self.v0) / (self.s1 - self.s0)
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        let theta = (s - self.s0) / self.width();
        self.v0 + (self.v1 - self.v0) * theta
    }
}

fn validate_monotone(what: &str, knots: &[f64], values: &[f64]) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidProfile(format!("{what}: {msg}")));
    if knots.is_empty() {
        return bad("no knots".into());
    }
    if knots.len() != values.len() {
        return bad(format!("{} knots but {} values", knots.len(), values.len()));
    }
    if knots[0] != 0.0 {
        return bad(format!("first knot must be 0, got {}", knots[0]));
    }
    if let Some(i) = knots.iter().chain(values).position(|x| !x.is_finite()) {
        return bad(format!("non-finite entry at position {i}"));
    }
    if let Some(w) = knots.windows(2).position(|w| w[1] <= w[0]) {
        return bad(format!("knots not strictly increasing at index {}", w + 1));
    }
    if let Some(i) = values.iter().position(|&v| v < 0.0) {
        return bad(format!("negative value at index {i}"));
    }
    if let Some(w) = values.windows(2).position(|w| w[1] > w[0]) {
        return bad(format!("values increase at index {}", w + 1));
    }
    if *values.last().unwrap() != 0.0 {
        return bad("last value must be exactly 0".into());
    }
    Ok(())
}

impl RadialProfile {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_monotone("profile", &knots, &values)?;
        Ok(RadialProfile { knots, values })
    }

    /// The identically zero profile.
    pub fn zero() -> Self {
        RadialProfile {
            knots: vec![0.0],
            values: vec![0.0],
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Measure of the support.
    pub fn support(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// `v(0)`, the supremum of the profile.
    pub fn peak(&self) -> f64 {
        self.values[0]
    }

    pub fn is_zero(&self) -> bool {
        self.values[0] == 0.0
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.knots.windows(2).zip(self.values.windows(2)).map(|(s, v)| Segment {
            s0: s[0],
            s1: s[1],
            v0: v[0],
            v1: v[1],
        })
    }

    fn segment_index(&self, s: f64) -> Option<usize> {
        if s < 0.0 || s >= self.support() {
            return None;
        }
        // last knot <= s
        let i = self.knots.partition_point(|&k| k <= s);
        Some(i - 1)
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self.segment_index(s) {
            Some(i) => Segment {
                s0: self.knots[i],
                s1: self.knots[i + 1],
                v0: self.values[i],
                v1: self.values[i + 1],
            }
            .eval(s),
            None if s < 0.0 => self.values[0],
            None => 0.0,
        }
    }

    /// Right derivative `v'(s)`; zero beyond the support.
    pub fn derivative(&self, s: f64) -> f64 {
        match self.segment_index(s) {
            Some(i) => (self.values[i + 1] - self.values[i]) / (self.knots[i + 1] - self.knots[i]),
            None => 0.0,
        }
    }

    /// `c * v` for `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(domain("scale", c, "finite c >= 0"));
        }
        Ok(RadialProfile {
            knots: self.knots.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }
}

/// On-disk profile format: `{"n": int, "knots": [...], "values": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub n: u32,
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl ProfileDocument {
    pub fn new(n: u32, profile: &RadialProfile) -> Self {
        ProfileDocument {
            n,
            knots: profile.knots.clone(),
            values: profile.values.clone(),
        }
    }

    pub fn into_parts(self) -> Result<(DimensionContext, RadialProfile)> {
        let ctx = DimensionContext::new(self.n)?;
        Ok((ctx, RadialProfile::new(self.knots, self.values)?))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidProfile(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile document serializes")
    }
}

/// How a realized radial function interpolates between its knots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Interpolation {
    /// Linear in the radial coordinate.
    Radius,
    /// Linear in the enclosed-volume coordinate; these are the knots in
    /// that coordinate.
    Measure { measure_knots: Vec<f64> },
}

/// Radial function on H^n sampled at geodesic radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicRadialFunction {
    radius_knots: Vec<f64>,
    values: Vec<f64>,
    interpolation: Interpolation,
}

/// Radial function on R^n sampled at Euclidean radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EuclideanRadialFunction {
    radius_knots: Vec<f64>,
    values: Vec<f64>,
    interpolation: Interpolation,
}

fn interp_linear(knots: &[f64], values: &[f64], x: f64) -> f64 {
    if x < 0.0 {
        return values[0];
    }
    if x >= *knots.last().unwrap() {
        return 0.0;
    }
    let i = knots.partition_point(|&k| k <= x) - 1;
    let theta = (x - knots[i]) / (knots[i + 1] - knots[i]);
    values[i] + (values[i + 1] - values[i]) * theta
}

impl HyperbolicRadialFunction {
    /// Piecewise linear in the geodesic radius.
    pub fn new(radius_knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_monotone("hyperbolic function", &radius_knots, &values)?;
        Ok(HyperbolicRadialFunction {
            radius_knots,
            values,
            interpolation: Interpolation::Radius,
        })
    }

    pub fn radius_knots(&self) -> &[f64] {
        &self.radius_knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> &Interpolation {
        &self.interpolation
    }

    /// `u(t)` at geodesic radius `t`.
    pub fn eval(&self, ctx: &DimensionContext, t: f64) -> Result<f64> {
        match &self.interpolation {
            Interpolation::Radius => Ok(interp_linear(&self.radius_knots, &self.values, t)),
            Interpolation::Measure { measure_knots } => {
                if t >= *self.radius_knots.last().unwrap() {
                    return Ok(0.0);
                }
                let i = self.radius_knots.partition_point(|&k| k <= t).max(1) - 1;
                let ds = ball_volume_between(ctx, self.radius_knots[i], t)?;
                let seg = Segment {
                    s0: measure_knots[i],
                    s1: measure_knots[i + 1],
                    v0: self.values[i],
                    v1: self.values[i + 1],
                };
                Ok(seg.v0 + seg.slope() * ds)
            }
        }
    }
}

impl EuclideanRadialFunction {
    pub fn new(radius_knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_monotone("euclidean function", &radius_knots, &values)?;
        Ok(EuclideanRadialFunction {
            radius_knots,
            values,
            interpolation: Interpolation::Radius,
        })
    }

    pub fn radius_knots(&self) -> &[f64] {
        &self.radius_knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> &Interpolation {
        &self.interpolation
    }

    pub fn eval(&self, ctx: &DimensionContext, r: f64) -> f64 {
        match &self.interpolation {
            Interpolation::Radius => interp_linear(&self.radius_knots, &self.values, r),
            Interpolation::Measure { measure_knots } => {
                interp_linear(measure_knots, &self.values, ctx.sigma() * r.powi(ctx.n() as i32))
            }
        }
    }

    /// Radius of the ball `{u > c}`, found by bisection on `eval` in the
    /// radial coordinate.
    pub fn superlevel_radius(&self, ctx: &DimensionContext, c: f64) -> f64 {
        if c >= self.values[0] {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = *self.radius_knots.last().unwrap();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(ctx, mid) > c {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// `sigma_n * (Phi(t1) - Phi(t0))` without cancellation.
pub fn ball_volume_between(ctx: &DimensionContext, t0: f64, t1: f64) -> Result<f64> {
    if t1 == t0 {
        return Ok(0.0);
    }
    let p = ctx.n() - 1;
    let r = quad::integrate_f64(|t| sinh_pow(t, p), t0, t1)?;
    Ok(ctx.omega() * r.value)
}

/// `v(s) = u(Phi^-1(s / sigma_n))` at the mapped knots.
pub fn profile_from_hyperbolic(ctx: &DimensionContext, u: &HyperbolicRadialFunction) -> Result<RadialProfile> {
    let knots = match &u.interpolation {
        Interpolation::Measure { measure_knots } => measure_knots.clone(),
        Interpolation::Radius => u
            .radius_knots
            .iter()
            .map(|&t| geometry::phi(ctx, t).map(|p| ctx.sigma() * p))
            .collect::<Result<Vec<_>>>()?,
    };
    RadialProfile::new(knots, u.values.clone())
}

/// The hyperbolic symmetrization `u#_g(x) = v(Vol_g(B_g(0, rho(x))))`.
pub fn hyperbolic_realization(ctx: &DimensionContext, v: &RadialProfile) -> Result<HyperbolicRadialFunction> {
    let radius_knots = v
        .knots
        .iter()
        .map(|&s| geometry::phi_inv(ctx, s / ctx.sigma()))
        .collect::<Result<Vec<_>>>()?;
    if radius_knots.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidProfile(
            "knots too close to separate in the geodesic radius".into(),
        ));
    }
    Ok(HyperbolicRadialFunction {
        radius_knots,
        values: v.values.clone(),
        interpolation: Interpolation::Measure {
            measure_knots: v.knots.clone(),
        },
    })
}

/// The Euclidean symmetrization `u#_e(x) = v(sigma_n |x|^n)`.
pub fn euclidean_realization(ctx: &DimensionContext, v: &RadialProfile) -> EuclideanRadialFunction {
    let inv_n = 1.0 / ctx.nf();
    EuclideanRadialFunction {
        radius_knots: v.knots.iter().map(|&s| (s / ctx.sigma()).powf(inv_n)).collect(),
        values: v.values.clone(),
        interpolation: Interpolation::Measure {
            measure_knots: v.knots.clone(),
        },
    }
}

/// `mu(level) = |{v > level}|`, the generalized inverse of `v`.
pub fn distribution_function(v: &RadialProfile, level: f64) -> Result<f64> {
    if !(level > 0.0) {
        return Err(domain("level", level, "level > 0"));
    }
    if level >= v.peak() {
        return Ok(0.0);
    }
    // first segment whose right value drops to the level
    for seg in v.segments() {
        if seg.v1 <= level {
            let theta = (seg.v0 - level) / (seg.v0 - seg.v1);
            return Ok(seg.s0 + theta * seg.width());
        }
    }
    Ok(v.support())
}

/// `w(s) = v(s) s^(1/n)`.
#[derive(Clone, Debug)]
pub struct WTransform<'a> {
    profile: &'a RadialProfile,
    inv_n: f64,
}

impl WTransform<'_> {
    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        self.profile.eval(s) * s.powf(self.inv_n)
    }

    /// `w'(s) = v'(s) s^(1/n) + v(s) s^(1/n - 1) / n` away from knots.
    pub fn derivative(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return f64::INFINITY;
        }
        let p = s.powf(self.inv_n);
        self.profile.derivative(s) * p + self.profile.eval(s) * p / s * self.inv_n
    }
}

pub fn w_transform(v: &RadialProfile, n: u32) -> WTransform<'_> {
    WTransform {
        profile: v,
        inv_n: 1.0 / f64::from(n),
    }
}

/// Seeded random profile on `[0, support]` with peak at most `max_value`.
pub fn random_profile(seed: u64, n_knots: usize, support: f64, max_value: f64) -> Result<RadialProfile> {
    if n_knots < 2 {
        return Err(domain("n_knots", n_knots as f64, "n_knots >= 2"));
    }
    if !(support > 0.0 && support.is_finite()) {
        return Err(domain("support", support, "finite support > 0"));
    }
    if !(max_value > 0.0 && max_value.is_finite()) {
        return Err(domain("max_value", max_value, "finite max_value > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut knots = Vec::with_capacity(n_knots);
    knots.push(0.0);
    let mut interior: Vec<f64> = (0..n_knots - 2).map(|_| rng.random::<f64>() * support).collect();
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    knots.extend(interior.into_iter().filter(|&x| x > 0.0 && x < support));
    knots.push(support);
    let mut values: Vec<f64> = (0..knots.len() - 1)
        .map(|_| max_value * (1.0 - rng.random::<f64>()))
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.push(0.0);
    RadialProfile::new(knots, values)
}

/// Sampling parameters of [`random_corpus`].
pub const CORPUS_KNOTS: (usize, usize) = (2, 50);
pub const CORPUS_SUPPORT: (f64, f64) = (1e-3, 1e3);

/// Seeded test corpus: knot counts uniform in 2..=50, support log-uniform
/// in [1e-3, 1e3], peak at most `max_value`.
pub fn random_corpus(seed: u64, count: usize, max_value: f64) -> Result<Vec<RadialProfile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let knots = rng.random_range(CORPUS_KNOTS.0..=CORPUS_KNOTS.1);
            let (lo, hi) = (CORPUS_SUPPORT.0.ln(), CORPUS_SUPPORT.1.ln());
            let support = (lo + (hi - lo) * rng.random::<f64>()).exp();
            random_profile(rng.random(), knots, support, max_value)
        })
        .collect()
}

/// `int_0^inf Psi(v(s)) ds`, the layer-cake side of an integral of `Psi(u)`.
pub fn measure_integral<F: Fn(f64) -> f64>(v: &RadialProfile, psi: F) -> Result<Integral<f64>> {
    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0;
    for seg in v.segments() {
        let r = quad::integrate_f64(|s| psi(seg.eval(s)), seg.s0, seg.s1)?;
        value += r.value;
        error += r.error;
        panels += r.panels;
    }
    Ok(Integral { value, error, panels })
}

/// `int_{R^n} Psi(u(x)) dx = omega * int_0^inf Psi(u(r)) r^(n-1) dr`.
pub fn euclidean_integral<F: Fn(f64) -> f64>(
    ctx: &DimensionContext,
    u: &EuclideanRadialFunction,
    psi: F,
) -> Result<Integral<f64>> {
    let p = ctx.n() as i32 - 1;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0;
    for w in u.radius_knots.windows(2) {
        let r = quad::integrate_f64(|r| psi(u.eval(ctx, r)) * r.powi(p), w[0], w[1])?;
        value += r.value;
        error += r.error;
        panels += r.panels;
    }
    Ok(Integral {
        value: ctx.omega() * value,
        error: ctx.omega() * error,
        panels,
    })
}

/// `int_{H^n} Psi(u) dVol_g` by the hyperbolic polar-coordinate formula.
pub fn hyperbolic_integral<F: Fn(f64) -> f64>(
    ctx: &DimensionContext,
    u: &HyperbolicRadialFunction,
    psi: F,
) -> Result<Integral<f64>> {
    let p = ctx.n() - 1;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0;
    let failure = std::cell::Cell::new(None);
    for w in u.radius_knots.windows(2) {
        let f = |t: f64| match u.eval(ctx, t) {
            Ok(x) => psi(x) * sinh_pow(t, p),
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        };
        let r = quad::integrate(f, w[0], w[1], QuadOptions::for_precision::<f64>());
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let r = r?;
        value += r.value;
        error += r.error;
        panels += r.panels;
    }
    Ok(Integral {
        value: ctx.omega() * value,
        error: ctx.omega() * error,
        panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_context;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn validation_rejects_bad_profiles() {
        assert!(RadialProfile::new(vec![0.0, 1.0], vec![1.0, 0.5]).is_err());
        assert!(RadialProfile::new(vec![0.1, 1.0], vec![1.0, 0.0]).is_err());
        assert!(RadialProfile::new(vec![0.0, 1.0, 1.0], vec![1.0, 0.5, 0.0]).is_err());
        assert!(RadialProfile::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.5, 0.0]).is_err());
        assert!(RadialProfile::new(vec![0.0, 1.0], vec![-1.0, 0.0]).is_err());
        assert!(RadialProfile::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(RadialProfile::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_ok());
        assert!(RadialProfile::new(vec![0.0], vec![0.0]).is_ok());
    }

    #[test]
    fn json_rejects_invalid_profile() {
        let bad = r#"{"n": 2, "knots": [0, 1], "values": [0, 1]}"#;
        let doc = ProfileDocument::from_json(bad).unwrap();
        assert!(doc.into_parts().is_err());
        let good = r#"{"n": 3, "knots": [0, 1, 2], "values": [2, 1, 0]}"#;
        let (ctx, v) = ProfileDocument::from_json(good).unwrap().into_parts().unwrap();
        assert_eq!(ctx.n(), 3);
        assert_eq!(v.eval(1.5), 0.5);
        assert!(serde_json::from_str::<RadialProfile>(r#"{"knots":[0,1],"values":[0,1]}"#).is_err());
    }

    #[test]
    fn zero_hyperbolic_function_gives_zero_profile() {
        let ctx = make_context(2).unwrap();
        let u = HyperbolicRadialFunction::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        let v = profile_from_hyperbolic(&ctx, &u).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn cone_in_t_maps_to_hyperbolic_ball_volume() {
        let ctx = make_context(2).unwrap();
        let u = HyperbolicRadialFunction::new(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        let v = profile_from_hyperbolic(&ctx, &u).unwrap();
        assert_eq!(v.values(), &[1.0, 0.0]);
        assert_relative_eq!(v.knots()[1], PI * 2.0 * (1f64.cosh() - 1.0), max_relative = 1e-14);
    }

    #[test]
    fn hyperbolic_round_trip_keeps_values() {
        let ctx = make_context(3).unwrap();
        let u = HyperbolicRadialFunction::new(vec![0.0, 0.3, 1.1, 2.0], vec![3.0, 2.0, 0.5, 0.0]).unwrap();
        let v = profile_from_hyperbolic(&ctx, &u).unwrap();
        let back = hyperbolic_realization(&ctx, &v).unwrap();
        assert_eq!(back.values(), u.values());
        for (a, b) in back.radius_knots().iter().zip(u.radius_knots()) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12, epsilon = 1e-300);
        }
        // between knots the realization follows v in the measure coordinate
        let t = 0.7;
        let s = ctx.sigma() * geometry::phi(&ctx, t).unwrap();
        assert_relative_eq!(back.eval(&ctx, t).unwrap(), v.eval(s), max_relative = 1e-12);
    }

    #[test]
    fn euclidean_realization_of_unit_ball() {
        let ctx = make_context(3).unwrap();
        let v = RadialProfile::new(vec![0.0, ctx.sigma()], vec![1.0, 0.0]).unwrap();
        let u = euclidean_realization(&ctx, &v);
        assert_eq!(u.radius_knots()[0], 0.0);
        assert_relative_eq!(u.radius_knots()[1], 1.0, max_relative = 1e-15);
        let z = euclidean_realization(&ctx, &RadialProfile::zero());
        assert_eq!(z.eval(&ctx, 0.3), 0.0);
    }

    #[test]
    fn superlevel_sets_are_equimeasurable() {
        for n in [2, 3, 4] {
            let ctx = make_context(n).unwrap();
            for seed in 0..10 {
                let v = random_profile(seed, 12, 5.0, 2.0).unwrap();
                let u = euclidean_realization(&ctx, &v);
                for c in [0.05, 0.5, 1.0, 1.7] {
                    if c >= v.peak() {
                        continue;
                    }
                    let r = u.superlevel_radius(&ctx, c);
                    let euclid = ctx.sigma() * r.powi(n as i32);
                    let mu = distribution_function(&v, c).unwrap();
                    assert_relative_eq!(euclid, mu, max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn distribution_function_cases() {
        let v = RadialProfile::new(vec![0.0, 1.0, 3.0, 4.0], vec![2.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(distribution_function(&v, 2.0).unwrap(), 0.0);
        assert_eq!(distribution_function(&v, 5.0).unwrap(), 0.0);
        // crossing on the segment from (1, 2) to (3, 1): 2 - (s - 1)/2 = 1.5
        assert_relative_eq!(distribution_function(&v, 1.5).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(distribution_function(&v, 1e-12).unwrap(), 4.0, max_relative = 1e-11);
        assert!(distribution_function(&v, 0.0).is_err());
        // generalized inverse at continuity points
        for lvl in [0.3, 0.9, 1.2, 1.99] {
            let mu = distribution_function(&v, lvl).unwrap();
            assert_relative_eq!(v.eval(mu), lvl, max_relative = 1e-14);
        }
    }

    #[test]
    fn w_transform_cases() {
        let z = RadialProfile::zero();
        let w = w_transform(&z, 3);
        assert_eq!(w.eval(0.5), 0.0);
        let v = RadialProfile::new(vec![0.0, 2.0, 3.0], vec![1.5, 1.5, 0.0]).unwrap();
        let w = w_transform(&v, 3);
        assert_eq!(w.eval(0.0), 0.0);
        assert_relative_eq!(w.eval(1.0), 1.5, max_relative = 1e-15);
        assert_relative_eq!(w.eval(1.7), 1.5 * 1.7f64.cbrt(), max_relative = 1e-15);
    }

    #[test]
    fn w_derivative_matches_central_difference() {
        let v = random_profile(11, 8, 3.0, 1.0).unwrap();
        for n in [2, 3, 5] {
            let w = w_transform(&v, n);
            for seg in v.segments() {
                let s = 0.5 * (seg.s0 + seg.s1);
                let h = 1e-6 * s;
                let fd = (w.eval(s + h) - w.eval(s - h)) / (2.0 * h);
                let exact = w.derivative(s);
                assert!(
                    (fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3),
                    "n={n} s={s} fd={fd} exact={exact}"
                );
            }
        }
    }

    #[test]
    fn random_profiles_are_deterministic_and_valid() {
        assert_eq!(random_profile(5, 20, 3.0, 2.0).unwrap(), random_profile(5, 20, 3.0, 2.0).unwrap());
        for seed in 1..=100 {
            let v = random_profile(seed, 20, 10.0, 1.0).unwrap();
            assert!(RadialProfile::new(v.knots().to_vec(), v.values().to_vec()).is_ok());
            assert!(v.values().windows(2).all(|w| w[1] <= w[0]));
        }
        assert!(random_profile(0, 1, 1.0, 1.0).is_err());
        assert!(random_profile(0, 2, 0.0, 1.0).is_err());
    }

    #[test]
    fn corpus_respects_ranges() {
        let corpus = random_corpus(3, 50, 1.0).unwrap();
        for v in &corpus {
            assert!(v.knots().len() >= 2 && v.knots().len() <= 50);
            assert!(v.support() >= 1e-3 && v.support() <= 1e3);
        }
    }
}
