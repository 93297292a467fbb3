//! Certified lower bounds for real trigonometric polynomials on the torus
//! `T^d`, `d ≤ 2`.
//!
//! The bound at resolution `R` combines two valid estimates:
//!
//! * the grid minimum minus `h·G`, with `h = 2π/R` the grid spacing and
//!   `G = Σ |c_x|·‖x‖₁` a global Lipschitz constant for the ∞-norm;
//! * a local third-order Taylor estimate around every grid point, where the
//!   quadratic model is minimised exactly over the cell and the remainder is
//!   bounded by `Σ |c_x|·‖x‖₁³·min(1, |sin(x·θ)| + ‖x‖₁r) · r³/6`, `r = h/2`.
//!
//! The reported bound is the maximum over the dyadic chain `R, R/2, R/4, …`,
//! so it is nondecreasing along doublings of the resolution. A small
//! floating-point slack proportional to the non-constant coefficient mass is
//! subtracted at the end.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::GroupFunction;
use crate::scalar::Scalar;

/// `θ ↦ Σ_x c_x cos(x·θ)`, the real part of the transform of a finitely
/// supported function on `Z^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    dim: usize,
    terms: Vec<(Vec<f64>, f64)>,
    constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusBound {
    /// Certified: the polynomial is at least this value everywhere.
    pub bound: f64,
    pub resolution: usize,
    pub gradient_bound: f64,
    pub grid_min: f64,
    pub argmin: Vec<f64>,
}

impl TrigPolynomial {
    pub fn from_function<S: Scalar>(f: &GroupFunction<S>) -> Result<Self> {
        if f.group().is_finite() {
            return Err(Error::NeedFreeGroup);
        }
        let dim = f.group().rank();
        let mut constant = 0.0;
        let mut terms = Vec::new();
        for (x, v) in f.iter() {
            let c = v.to_f64();
            if x.coords().iter().all(|&k| k == 0) {
                constant += c;
            } else {
                terms.push((x.coords().iter().map(|&k| k as f64).collect(), c));
            }
        }
        Ok(TrigPolynomial {
            dim,
            terms,
            constant,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, theta: &[f64]) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|(x, c)| c * dot(x, theta).cos())
                .sum::<f64>()
    }

    /// Value, gradient, Hessian at `theta` (dimension ≤ 2), and a bound on
    /// the third directional derivative over the cell of radius `r`:
    /// `|sin(x·(θ+δ))| ≤ |sin(x·θ)| + ‖x‖₁ r`.
    fn eval_local(&self, theta: &[f64], r: f64) -> (f64, [f64; 2], [[f64; 2]; 2], f64) {
        let mut v = self.constant;
        let mut g = [0.0; 2];
        let mut h = [[0.0; 2]; 2];
        let mut third = 0.0;
        for (x, c) in &self.terms {
            let (s, co) = dot(x, theta).sin_cos();
            let n1: f64 = x.iter().map(|k| k.abs()).sum();
            third += c.abs() * n1.powi(3) * (s.abs() + n1 * r).min(1.0);
            v += c * co;
            for i in 0..self.dim {
                g[i] -= c * x[i] * s;
                for j in 0..self.dim {
                    h[i][j] -= c * x[i] * x[j] * co;
                }
            }
        }
        (v, g, h, third)
    }

    fn moment(&self, power: i32) -> f64 {
        self.terms
            .iter()
            .map(|(x, c)| c.abs() * x.iter().map(|k| k.abs()).sum::<f64>().powi(power))
            .sum()
    }

    /// `Σ |c_x| ‖x‖₁`.
    pub fn gradient_bound(&self) -> f64 {
        self.moment(1)
    }

    fn rounding_slack(&self) -> f64 {
        let mass: f64 = self.terms.iter().map(|(_, c)| c.abs()).sum();
        8.0 * f64::EPSILON * (self.terms.len() as f64 + 4.0) * mass
    }

    fn grid_point(&self, index: usize, resolution: usize) -> Vec<f64> {
        let h = 2.0 * PI / resolution as f64;
        match self.dim {
            1 => vec![index as f64 * h],
            _ => vec![(index / resolution) as f64 * h, (index % resolution) as f64 * h],
        }
    }

    fn grid_len(&self, resolution: usize) -> usize {
        resolution.pow(self.dim as u32)
    }

    /// Grid minimum and its location.
    pub fn grid_min(&self, resolution: usize) -> (f64, Vec<f64>) {
        let mut best = (f64::INFINITY, vec![0.0; self.dim]);
        for i in 0..self.grid_len(resolution) {
            let theta = self.grid_point(i, resolution);
            let v = self.eval(&theta);
            if v < best.0 {
                best = (v, theta);
            }
        }
        best
    }

    fn raw_bound(&self, resolution: usize) -> (f64, f64, Vec<f64>) {
        let h = 2.0 * PI / resolution as f64;
        let r = h / 2.0;
        let mut grid_min = f64::INFINITY;
        let mut argmin = vec![0.0; self.dim];
        let mut local = f64::INFINITY;
        for i in 0..self.grid_len(resolution) {
            let theta = self.grid_point(i, resolution);
            let (v, g, hess, third) = self.eval_local(&theta, r);
            if v < grid_min {
                grid_min = v;
                argmin = theta;
            }
            let q = match self.dim {
                1 => quad_min_1d(g[0], hess[0][0], r),
                _ => quad_min_2d(g, hess, r),
            };
            local = local.min(v + q - third * r.powi(3) / 6.0);
        }
        let first_order = grid_min - h * self.gradient_bound();
        (first_order.max(local), grid_min, argmin)
    }

    /// Certified lower bound for `min_θ p(θ)`.
    pub fn certified_min(&self, resolution: usize) -> Result<TorusBound> {
        if self.dim == 0 || self.dim > 2 {
            return Err(Error::UnsupportedRank(self.dim));
        }
        if resolution < 2 {
            return Err(Error::InvalidParameter("resolution must be >= 2".into()));
        }
        if self.terms.is_empty() {
            return Ok(TorusBound {
                bound: self.constant,
                resolution,
                gradient_bound: 0.0,
                grid_min: self.constant,
                argmin: vec![0.0; self.dim],
            });
        }
        let (mut bound, grid_min, argmin) = self.raw_bound(resolution);
        let mut r = resolution;
        while r % 2 == 0 && r >= 16 {
            r /= 2;
            bound = bound.max(self.raw_bound(r).0);
        }
        Ok(TorusBound {
            bound: bound - self.rounding_slack(),
            resolution,
            gradient_bound: self.gradient_bound(),
            grid_min,
            argmin,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `min_{|δ| ≤ r} gδ + aδ²/2`.
fn quad_min_1d(g: f64, a: f64, r: f64) -> f64 {
    let q = |d: f64| g * d + 0.5 * a * d * d;
    let mut best = q(r).min(q(-r));
    if a > 0.0 {
        let d = -g / a;
        if d.abs() <= r {
            best = best.min(q(d));
        }
    }
    best
}

/// `min_{‖δ‖∞ ≤ r} g·δ + δᵀHδ/2`.
fn quad_min_2d(g: [f64; 2], h: [[f64; 2]; 2], r: f64) -> f64 {
    let mut best = f64::INFINITY;
    // edges: fix one coordinate at ±r, minimise over the other
    for fixed in 0..2 {
        let free = 1 - fixed;
        for s in [-r, r] {
            let lin = g[free] + h[free][fixed] * s;
            let cst = g[fixed] * s + 0.5 * h[fixed][fixed] * s * s;
            best = best.min(cst + quad_min_1d(lin, h[free][free], r));
        }
    }
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if h[0][0] > 0.0 && det > 0.0 {
        let d0 = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let d1 = -(h[0][0] * g[1] - h[1][0] * g[0]) / det;
        if d0.abs() <= r && d1.abs() <= r {
            let v = g[0] * d0
                + g[1] * d1
                + 0.5 * (h[0][0] * d0 * d0 + 2.0 * h[0][1] * d0 * d1 + h[1][1] * d1 * d1);
            best = best.min(v);
        }
    }
    best
}
