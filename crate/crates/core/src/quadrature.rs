//! Composite Gauss–Legendre quadrature with panel doubling.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed composite rule on `[a, b]` with `panels` equal panels.
#[derive(Clone, Debug)]
pub struct Composite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Composite {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Composite { nodes, weights }
    }

    /// Points and weights of the composite rule.
    pub fn points(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        (0..panels)
            .flat_map(|p| {
                let lo = a + p as f64 * h;
                self.nodes.iter().zip(&self.weights).map(move |(x, w)| (lo + 0.5 * h * (x + 1.0), 0.5 * h * w))
            })
            .collect()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        self.points(a, b, panels).iter().map(|(x, w)| w * f(*x)).sum()
    }
}

/// An integral value with the difference between the last two refinements.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

const ORDER: usize = 10;
const MAX_PANELS: usize = 1 << 12;

/// Doubles the panel count until two successive values agree within `tol/10`.
pub fn adaptive(f: impl Fn(usize) -> f64, tol: f64) -> Result<Estimate> {
    let mut panels = 1;
    let mut prev = f(panels);
    loop {
        panels *= 2;
        let cur = f(panels);
        let error = (cur - prev).abs();
        if error <= tol / 10.0 * cur.abs().max(1.0) {
            return Ok(Estimate { value: cur, error, panels });
        }
        if panels >= MAX_PANELS {
            return Err(Error::QuadratureNotConverged { estimate: error, tol });
        }
        prev = cur;
    }
}

pub fn integrate_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    let rule = Composite::new(ORDER);
    adaptive(|p| rule.integrate(&f, a, b, p), tol)
}

/// Tensor-product rule on `[a0, b0] × [a1, b1]`, refined in both directions together.
pub fn integrate_2d(f: impl Fn(f64, f64) -> f64 + Sync, x: (f64, f64), y: (f64, f64), tol: f64) -> Result<Estimate> {
    use rayon::prelude::*;
    let rule = Composite::new(ORDER);
    adaptive(
        |p| {
            let xs = rule.points(x.0, x.1, p);
            let ys = rule.points(y.0, y.1, p);
            let rows: Vec<f64> =
                xs.par_iter().map(|(u, wu)| wu * ys.iter().map(|(v, wv)| wv * f(*u, *v)).sum::<f64>()).collect();
            rows.iter().sum()
        },
        tol,
    )
}
