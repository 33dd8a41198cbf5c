//! Product quadrature on R^3: a logarithmic radial grid times a sphere rule,
//! plus the shifted-kernel convolution sums used for Coulomb-type integrals.
//!
//! The grid places points `x_in = r_i s_n` with
//!
//! ```text
//! r_i = exp(-ln R_max + (i-1) h),  h = 2 ln(R_max) / (N_r - 1),
//! w_in = h r_i^3 w_n,
//! ```
//!
//! so radii run from `1/R_max` to `R_max`. Kernel singularities are shifted
//! to the origin, which the grid never samples. Sphere rules either come
//! from a Gauss-Legendre x uniform-phi product (self-contained) or are
//! loaded from a data file; both carry their polynomial exactness degree.
//!
//! Sums are deterministic: fixed point order with compensated (Kahan)
//! accumulation; the convolution parallelizes over output points only, with
//! each inner sum sequential, so results are bitwise identical for any
//! thread count.

use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::hydrogen;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("invalid sphere rule: {0}")]
    InvalidSphereRule(String),
    #[error("cannot read sphere rule file: {0}")]
    IoError(#[from] std::io::Error),
    #[error("invalid grid spec: {0}")]
    InvalidGridSpec(String),
    #[error("non-finite integrand value {value} at point ({x}, {y}, {z})")]
    NonFiniteIntegrand { value: f64, x: f64, y: f64, z: f64 },
}

/// Compensated accumulator; fixed addition order makes sums reproducible.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Exponent of the shifted kernel `1/|z|^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alpha {
    One,
    Two,
}

impl Alpha {
    fn power(self) -> i32 {
        match self {
            Alpha::One => 1,
            Alpha::Two => 2,
        }
    }
}

const WEIGHT_SUM_TOL: f64 = 1e-9;
const UNIT_NORM_TOL: f64 = 1e-12;
const EXACTNESS_TOL: f64 = 1e-9;
const MAX_PROBED_DEGREE: u32 = 64;

/// Quadrature rule on the unit sphere; weights in steradians (sum `4 pi`).
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Largest degree `d` such that all real spherical harmonics with
    /// `1 <= l <= d` integrate to zero within tolerance.
    pub exactness_degree: u32,
}

impl SphereRule {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// Gauss-Legendre nodes in `cos(theta)` (`l` points) times a uniform
    /// `phi` grid (`2l` points). Exact for spherical polynomials of degree
    /// `<= 2l - 1`.
    pub fn product(l: u32) -> Result<SphereRule, QuadError> {
        if l < 1 {
            return Err(QuadError::InvalidSphereRule("product order must be >= 1".into()));
        }
        let (nodes, gl_weights) = gauss_legendre(l as usize);
        let nphi = 2 * l as usize;
        let wphi = std::f64::consts::PI / l as f64;
        let mut points = Vec::with_capacity(l as usize * nphi);
        let mut weights = Vec::with_capacity(l as usize * nphi);
        for (u, wu) in nodes.iter().zip(&gl_weights) {
            let st = ((1.0 - u) * (1.0 + u)).max(0.0).sqrt();
            for j in 0..nphi {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / nphi as f64;
                points.push([st * phi.cos(), st * phi.sin(), *u]);
                weights.push(wu * wphi);
            }
        }
        Ok(SphereRule { points, weights, exactness_degree: 2 * l - 1 })
    }

    /// Load a rule from a text file: one `x y z w` line per point, `#`
    /// comments allowed, weights in steradians. Unit norms and the weight
    /// sum are validated; the exactness degree is probed on load.
    pub fn from_lebedev_file(path: &Path) -> Result<SphereRule, QuadError> {
        let text = std::fs::read_to_string(path)?;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
            let vals = vals.map_err(|e| {
                QuadError::InvalidSphereRule(format!("line {}: {e}", lineno + 1))
            })?;
            if vals.len() != 4 {
                return Err(QuadError::InvalidSphereRule(format!(
                    "line {}: expected 4 columns, got {}",
                    lineno + 1,
                    vals.len()
                )));
            }
            points.push([vals[0], vals[1], vals[2]]);
            weights.push(vals[3]);
        }
        if points.is_empty() {
            return Err(QuadError::InvalidSphereRule("no points in file".into()));
        }
        for (i, p) in points.iter().enumerate() {
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(QuadError::InvalidSphereRule(format!(
                    "point {i} has norm {norm}, expected 1"
                )));
            }
        }
        let mut sum = KahanSum::new();
        for &w in &weights {
            sum.add(w);
        }
        let four_pi = 4.0 * std::f64::consts::PI;
        if (sum.value() - four_pi).abs() > WEIGHT_SUM_TOL * four_pi {
            return Err(QuadError::InvalidSphereRule(format!(
                "weights sum to {}, expected 4*pi = {four_pi}",
                sum.value()
            )));
        }
        let mut rule = SphereRule { points, weights, exactness_degree: 0 };
        rule.exactness_degree = rule.probe_exactness();
        Ok(rule)
    }

    /// Largest consecutive degree whose harmonics all integrate to zero.
    fn probe_exactness(&self) -> u32 {
        let mut degree = 0;
        'outer: for l in 1..=MAX_PROBED_DEGREE {
            for k in -(l as i32)..=(l as i32) {
                let mut s = KahanSum::new();
                for (p, &w) in self.points.iter().zip(&self.weights) {
                    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                    let theta = (p[2] / r).clamp(-1.0, 1.0).acos();
                    let phi = p[1].atan2(p[0]);
                    s.add(w * hydrogen::real_sph_harm(l, k, theta, phi).unwrap());
                }
                if s.value().abs() > EXACTNESS_TOL {
                    break 'outer;
                }
            }
            degree = l;
        }
        degree
    }

    /// Rotate every node by the given rotation matrix (rows).
    pub fn rotated(&self, rot: &[[f64; 3]; 3]) -> SphereRule {
        let points = self
            .points
            .iter()
            .map(|p| {
                [
                    rot[0][0] * p[0] + rot[0][1] * p[1] + rot[0][2] * p[2],
                    rot[1][0] * p[0] + rot[1][1] * p[1] + rot[1][2] * p[2],
                    rot[2][0] * p[0] + rot[2][1] * p[1] + rot[2][2] * p[2],
                ]
            })
            .collect();
        SphereRule {
            points,
            weights: self.weights.clone(),
            exactness_degree: self.exactness_degree,
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence. Nodes come out in descending order; deterministic.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_deriv(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * d * d);
    }
    (nodes, weights)
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Parameters of the product grid.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub n_r: usize,
    pub r_max: f64,
    pub sphere: SphereRule,
}

impl GridSpec {
    pub fn new(n_r: usize, r_max: f64, sphere: SphereRule) -> Result<Self, QuadError> {
        if n_r < 2 {
            return Err(QuadError::InvalidGridSpec(format!("N_r must be >= 2, got {n_r}")));
        }
        if !(r_max > 1.0) {
            return Err(QuadError::InvalidGridSpec(format!("R_max must be > 1, got {r_max}")));
        }
        Ok(GridSpec { n_r, r_max, sphere })
    }
}

/// The materialized grid: points `r_i s_n` with weights `h r_i^3 w_n`,
/// ordered radial-major.
#[derive(Debug, Clone)]
pub struct Grid {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub radii: Vec<f64>,
    pub h: f64,
}

pub fn build_grid(spec: &GridSpec) -> Grid {
    let h = 2.0 * spec.r_max.ln() / (spec.n_r - 1) as f64;
    let radii: Vec<f64> = (0..spec.n_r)
        .map(|i| (-spec.r_max.ln() + i as f64 * h).exp())
        .collect();
    let nleb = spec.sphere.count();
    let mut points = Vec::with_capacity(spec.n_r * nleb);
    let mut weights = Vec::with_capacity(spec.n_r * nleb);
    for &r in &radii {
        let wr = h * r * r * r;
        for (s, &ws) in spec.sphere.points.iter().zip(&spec.sphere.weights) {
            points.push([r * s[0], r * s[1], r * s[2]]);
            weights.push(wr * ws);
        }
    }
    Grid { points, weights, radii, h }
}

/// `sum_i w_i f(x_i)` in fixed order with compensated accumulation.
pub fn integrate(
    f: impl Fn(&[f64; 3]) -> f64,
    grid: &Grid,
) -> Result<f64, QuadError> {
    let mut s = KahanSum::new();
    for (p, &w) in grid.points.iter().zip(&grid.weights) {
        let v = f(p);
        if !v.is_finite() {
            return Err(QuadError::NonFiniteIntegrand { value: v, x: p[0], y: p[1], z: p[2] });
        }
        s.add(w * v);
    }
    Ok(s.value())
}

/// Shifted-kernel convolution: for every grid point `x_i` returns
///
/// ```text
/// F(x_i) = sum_j w_j g(x_i - x_j) / |x_j|^alpha
/// ```
///
/// approximating `int g(x - z)/|z|^alpha dz`. The kernel singularity sits at
/// `z = 0`, which the grid never samples (`r >= 1/R_max`). Cost is
/// `O(N^2)` in the grid size with the inner sum streamed, never
/// materialized; the outer loop runs in parallel, each output in a fixed
/// deterministic order.
pub fn kernel_convolve(
    g: impl Fn(&[f64; 3]) -> f64 + Sync,
    alpha: Alpha,
    grid: &Grid,
) -> Result<Vec<f64>, QuadError> {
    let pow = alpha.power();
    let coef: Vec<f64> = grid
        .points
        .iter()
        .zip(&grid.weights)
        .map(|(p, &w)| {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            w / r.powi(pow)
        })
        .collect();
    grid.points
        .par_iter()
        .map(|xi| {
            let mut s = KahanSum::new();
            for (xj, &c) in grid.points.iter().zip(&coef) {
                let d = [xi[0] - xj[0], xi[1] - xj[1], xi[2] - xj[2]];
                let v = g(&d);
                if !v.is_finite() {
                    return Err(QuadError::NonFiniteIntegrand {
                        value: v,
                        x: d[0],
                        y: d[1],
                        z: d[2],
                    });
                }
                s.add(c * v);
            }
            Ok(s.value())
        })
        .collect()
}

/// The reference grid-parameter table: `(R_max, N_r, N_leb)` per index
/// 1..=12. Larger indices refine both directions.
pub const GRID_TABLE: [(f64, usize, usize); 12] = [
    (16.0, 10, 194),
    (18.0, 12, 266),
    (20.0, 14, 350),
    (22.0, 16, 590),
    (24.0, 18, 974),
    (26.0, 20, 1454),
    (28.0, 22, 2030),
    (30.0, 24, 2702),
    (32.0, 26, 3470),
    (34.0, 28, 4334),
    (34.0, 30, 5294),
    (34.0, 32, 5810),
];

pub fn table_entry(index: usize) -> Option<(f64, usize, usize)> {
    (1..=GRID_TABLE.len()).contains(&index).then(|| GRID_TABLE[index - 1])
}

/// Product-rule order with a point count comparable to the given target
/// (`2 L^2` points vs `N_leb`).
pub fn product_order_matching(n_leb: usize) -> u32 {
    ((n_leb as f64 / 2.0).sqrt().round() as u32).max(1)
}

/// Grid for a table index with the built-in product sphere rule.
pub fn grid_for_index(index: usize) -> Result<Grid, QuadError> {
    let (r_max, n_r, n_leb) = table_entry(index)
        .ok_or_else(|| QuadError::InvalidGridSpec(format!("index {index} out of 1..=12")))?;
    let rule = SphereRule::product(product_order_matching(n_leb))?;
    Ok(build_grid(&GridSpec::new(n_r, r_max, rule)?))
}
