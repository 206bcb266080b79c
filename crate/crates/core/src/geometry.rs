//! Radial geometry of the Poincare ball model of hyperbolic n-space.
//!
//! The normalized ball volume is `Phi(r) = n * int_0^r sinh(t)^(n-1) dt`,
//! so that a geodesic ball of radius `r` has volume `sigma_n * Phi(r)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{self, HasRule, Integral, QuadOptions};
use crate::real::Real;

/// Root-finding tolerance for `phi_inv`, relative to `max(1, s)`.
pub const TOL_ROOT: f64 = 1e-12;

/// Above this radius powers of `sinh` are evaluated through logarithms.
const LOG_SPACE_RADIUS: f64 = 30.0;

/// Dimension `n` together with the constants every other module needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionContext {
    n: u32,
    omega: f64,
    sigma: f64,
    alpha: f64,
    hardy: f64,
}

/// Gamma(n / 2) for integer n >= 1, exactly up to rounding.
fn gamma_half_integer(n: u32) -> f64 {
    if n % 2 == 0 {
        (1..n / 2).map(f64::from).product()
    } else {
        // Gamma(m + 1/2) = (2m)! / (4^m m!) sqrt(pi)
        let m = (n - 1) / 2;
        let mut g = PI.sqrt();
        for j in 0..m {
            g *= f64::from(j) + 0.5;
        }
        g
    }
}

impl DimensionContext {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        let nf = f64::from(n);
        let omega = 2.0 * PI.powf(nf / 2.0) / gamma_half_integer(n);
        let sigma = omega / nf;
        let alpha = nf * omega.powf(1.0 / (nf - 1.0));
        let hardy = ((nf - 1.0) / nf).powi(n as i32);
        Ok(DimensionContext {
            n,
            omega,
            sigma,
            alpha,
            hardy,
        })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// Surface area of the unit sphere in R^n.
    #[inline]
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Volume of the unit ball in R^n.
    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Sharp Moser exponent `n * omega^(1/(n-1))`.
    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Sharp Poincare-Sobolev constant `((n-1)/n)^n`.
    #[inline]
    pub fn hardy(&self) -> f64 {
        self.hardy
    }

    /// The critical exponent `n / (n - 1)`.
    #[inline]
    pub fn conjugate(&self) -> f64 {
        self.nf() / (self.nf() - 1.0)
    }
}

pub fn make_context(n: u32) -> Result<DimensionContext> {
    DimensionContext::new(n)
}

/// Hyperbolic distance from the origin of a point with Euclidean norm `x_norm`.
pub fn geodesic_radius(x_norm: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x_norm) {
        return Err(domain("x_norm", x_norm, "0 <= |x| < 1"));
    }
    Ok(2.0 * x_norm.atanh())
}

/// Euclidean norm of a point at geodesic distance `rho` from the origin.
pub fn euclidean_norm(rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(domain("rho", rho, "rho >= 0"));
    }
    Ok((rho / 2.0).tanh())
}

/// `ln sinh t` for `t > 0`, accurate for large `t`.
pub fn ln_sinh<T: Real>(t: T) -> T {
    if t.to_f64() > LOG_SPACE_RADIUS {
        let two = T::from_f64(2.0);
        t - two.ln() + (T::one() - (-(two * t)).exp()).ln()
    } else {
        t.sinh().ln()
    }
}

/// `sinh(t)^p`, switching to log space for large `t`.
pub fn sinh_pow<T: Real>(t: T, p: u32) -> T {
    if p == 0 {
        return T::one();
    }
    if t.to_f64() > LOG_SPACE_RADIUS {
        (T::from_f64(f64::from(p)) * ln_sinh(t)).exp()
    } else {
        t.sinh().powi(p as i32)
    }
}

fn check_radius(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain("r", t, "finite r >= 0"))
    }
}

/// `Phi(t)` by adaptive quadrature in the working precision `T`, for every n.
pub fn volume_fn<T: HasRule>(ctx: &DimensionContext, t: T) -> Result<T> {
    check_radius(t.to_f64())?;
    if t.to_f64() == 0.0 {
        return Ok(T::zero());
    }
    let p = ctx.n() - 1;
    let r = quad::integrate(|s: T| sinh_pow(s, p), T::zero(), t, QuadOptions::for_precision::<T>())?;
    Ok(T::from_f64(ctx.nf()) * r.value)
}

/// Normalized geodesic-ball volume `Phi(t)`; closed form `4 sinh^2(t/2)` for n = 2.
pub fn phi(ctx: &DimensionContext, t: f64) -> Result<f64> {
    check_radius(t)?;
    if ctx.n() == 2 {
        let h = (t / 2.0).sinh();
        return Ok(4.0 * h * h);
    }
    volume_fn(ctx, t)
}

/// `Phi'(t) = n sinh(t)^(n-1)`.
pub fn phi_derivative(ctx: &DimensionContext, t: f64) -> f64 {
    ctx.nf() * sinh_pow(t, ctx.n() - 1)
}

fn phi_inv_guess(ctx: &DimensionContext, s: f64) -> f64 {
    let nf = ctx.nf();
    if s < 1.0 {
        s.powf(1.0 / nf)
    } else {
        // Phi(t) ~ n/(n-1) * (e^t / 2)^(n-1)
        let x = s * (nf - 1.0) / nf;
        (x.ln() / (nf - 1.0) + std::f64::consts::LN_2).max(1.0)
    }
}

/// Inverse of `Phi`: bracketing, then Newton steps safeguarded by bisection.
pub fn phi_inv(ctx: &DimensionContext, s: f64) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(domain("s", s, "finite s >= 0"));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if ctx.n() == 2 {
        return Ok(2.0 * (s.sqrt() / 2.0).asinh());
    }
    let mut lo = 0.0;
    let mut hi = phi_inv_guess(ctx, s).max(f64::MIN_POSITIVE);
    let mut grow = 0;
    while phi(ctx, hi)? < s {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 2000 || !hi.is_finite() {
            return Err(Error::NoConvergence {
                what: "phi_inv bracket",
                target: s,
            });
        }
    }
    let mut t = phi_inv_guess(ctx, s).clamp(lo, hi);
    for _ in 0..200 {
        let f = phi(ctx, t)? - s;
        if f == 0.0 {
            return Ok(t);
        }
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let d = phi_derivative(ctx, t);
        let mut next = t - f / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - t).abs();
        t = next;
        if step <= 4.0 * f64::EPSILON * t || hi - lo <= 4.0 * f64::EPSILON * hi {
            let resid = (phi(ctx, t)? - s).abs();
            if resid <= TOL_ROOT * s.max(1.0) {
                return Ok(t);
            }
        }
    }
    Err(Error::NoConvergence {
        what: "phi_inv",
        target: s,
    })
}

/// `k(s) = sinh(Phi^-1(s))^(n(n-1)) - s^(n-1)`; exactly `s^2 / 4` when n = 2.
pub fn k_kernel(ctx: &DimensionContext, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(domain("s", s, "s >= 0"));
    }
    let n = ctx.n();
    if n == 2 {
        return Ok(s * s / 4.0);
    }
    let t = phi_inv(ctx, s)?;
    Ok(sinh_pow(t, n * (n - 1)) - s.powi(n as i32 - 1))
}

/// `omega_{n-1} * int_0^t_max f(t) sinh(t)^(n-1) dt`.
pub fn polar_integral<F: Fn(f64) -> f64>(ctx: &DimensionContext, f: F, t_max: f64) -> Result<Integral<f64>> {
    check_radius(t_max)?;
    let p = ctx.n() - 1;
    let r = quad::integrate_f64(|t| f(t) * sinh_pow(t, p), 0.0, t_max)?;
    Ok(Integral {
        value: ctx.omega() * r.value,
        error: ctx.omega() * r.error,
        panels: r.panels,
    })
}
