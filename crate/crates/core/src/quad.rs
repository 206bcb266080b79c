//! Globally adaptive Gauss-Legendre quadrature.
//!
//! Each panel is integrated with a fixed 20-point rule on the whole panel
//! and on its two halves; the difference between the two levels is the
//! panel's error estimate and the refined value is kept. The panel with the
//! largest estimate is bisected until the summed estimate meets the
//! requested tolerance.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::sync::OnceLock;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::real::Real;

/// Number of nodes in the base rule.
pub const ORDER: usize = 20;

/// Default relative tolerance in double precision.
pub const TOL_DOUBLE: f64 = 1e-12;
/// Default relative tolerance in extended precision.
pub const TOL_EXTENDED: f64 = 1e-20;

#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_f64(k as f64);
        let p2 = (T::from_f64((2 * k - 1) as f64) * x * p1 - T::from_f64((k - 1) as f64) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_f64(n as f64);
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

impl<T: Real> GaussLegendre<T> {
    /// Nodes and weights on [-1, 1] by Newton iteration on P_n in the
    /// working precision `T`.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let tol = T::EPSILON * 4.0;
        for i in 0..n.div_ceil(2) {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = T::from_f64(guess);
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs().to_f64() <= tol {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = T::from_f64(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Fixed-rule integral over [a, b].
    pub fn apply<F: Fn(T) -> T>(&self, f: &F, a: T, b: T) -> T {
        let half = (b - a) * T::from_f64(0.5);
        let mid = (a + b) * T::from_f64(0.5);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += *w * f(mid + half * *x);
        }
        acc * half
    }
}

/// Precision-specific access to the shared base rule.
pub trait HasRule: Real {
    fn rule() -> &'static GaussLegendre<Self>;
    fn default_tol() -> f64;
}

impl HasRule for f64 {
    fn rule() -> &'static GaussLegendre<f64> {
        static RULE: OnceLock<GaussLegendre<f64>> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(ORDER))
    }
    fn default_tol() -> f64 {
        TOL_DOUBLE
    }
}

impl HasRule for Dd {
    fn rule() -> &'static GaussLegendre<Dd> {
        static RULE: OnceLock<GaussLegendre<Dd>> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(ORDER))
    }
    fn default_tol() -> f64 {
        TOL_EXTENDED
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl QuadOptions {
    pub fn for_precision<T: HasRule>() -> Self {
        QuadOptions {
            rel_tol: T::default_tol(),
            abs_tol: 0.0,
            max_panels: 4000,
        }
    }

    pub fn rel(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Quadrature result with its two-level error estimate.
#[derive(Clone, Copy, Debug)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn make_panel<T: HasRule, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Panel<T> {
    let rule = T::rule();
    let mid = (a + b) * T::from_f64(0.5);
    let coarse = rule.apply(f, a, b);
    let fine = rule.apply(f, a, mid) + rule.apply(f, mid, b);
    let error = (fine - coarse).abs().to_f64();
    let error = if error.is_nan() { f64::INFINITY } else { error };
    Panel {
        a,
        b,
        value: fine,
        error,
    }
}

/// Integrates `f` over `[a, b]`, pre-splitting at the interior `breaks`.
pub fn integrate_with_breaks<T, F>(f: F, a: T, b: T, breaks: &[T], opts: QuadOptions) -> Result<Integral<T>>
where
    T: HasRule,
    F: Fn(T) -> T,
{
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error: 0.0,
            panels: 0,
        });
    }
    if a > b {
        let r = integrate_with_breaks(f, b, a, breaks, opts)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }
    let mut heap = BinaryHeap::new();
    let mut left = a;
    for &x in breaks.iter().filter(|&&x| x > a && x < b) {
        heap.push(make_panel(&f, left, x));
        left = x;
    }
    heap.push(make_panel(&f, left, b));

    loop {
        let mut total = T::zero();
        let mut err = 0.0;
        for p in heap.iter() {
            total += p.value;
            err += p.error;
        }
        let target = opts.rel_tol * total.abs().to_f64() + opts.abs_tol;
        if err <= target {
            return Ok(Integral {
                value: total,
                error: err,
                panels: heap.len(),
            });
        }
        if !total.is_finite() {
            return Err(Error::NonFinite {
                what: "quadrature sum",
                at: a.to_f64(),
            });
        }
        if heap.len() >= opts.max_panels {
            return Err(Error::QuadratureTolerance {
                a: a.to_f64(),
                b: b.to_f64(),
                estimate: err,
                target,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = (worst.a + worst.b) * T::from_f64(0.5);
        if !(mid > worst.a && mid < worst.b) {
            // panel collapsed to adjacent floating-point numbers
            return Err(Error::QuadratureTolerance {
                a: a.to_f64(),
                b: b.to_f64(),
                estimate: err,
                target,
            });
        }
        heap.push(make_panel(&f, worst.a, mid));
        heap.push(make_panel(&f, mid, worst.b));
    }
}

pub fn integrate<T, F>(f: F, a: T, b: T, opts: QuadOptions) -> Result<Integral<T>>
where
    T: HasRule,
    F: Fn(T) -> T,
{
    integrate_with_breaks(f, a, b, &[], opts)
}

/// Double-precision integral with the default tolerance.
pub fn integrate_f64<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<Integral<f64>> {
    integrate(f, a, b, QuadOptions::for_precision::<f64>())
}

/// Break points graded geometrically toward `a`: `a + (b - a) * ratio^j`.
pub fn graded_breaks(a: f64, b: f64, ratio: f64, levels: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (1..=levels).map(|j| a + (b - a) * ratio.powi(j as i32)).collect();
    out.reverse();
    out
}
