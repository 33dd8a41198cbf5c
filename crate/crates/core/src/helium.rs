//! Two-electron ion application: the Coulomb pair constants `w1`, `w2`,
//! `w1_as`, `w2_as`, the 4x4 pair matrices over the n = 2 channels, the
//! ground-state energy enclosures and the validity thresholds, plus the
//! reference comparison table.
//!
//! Everything is computed in rescaled units where the electron-nucleus
//! problem is charge-free; all z-dependence enters through the `1/z`, `1/z^2`
//! prefactors of the interaction matrix elements. Energies are reported in
//! units of twice the hydrogen ground-state energy (one Hartree).

use thiserror::Error;

use crate::densela::{self, SymMatrix};
use crate::quadrature::{self, Alpha, Grid, KahanSum, QuadError};

#[derive(Debug, Error)]
pub enum HeliumError {
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Spectral gap of the unperturbed pair problem on symmetric functions
/// (`e_2 - e_1 = 3/8`).
pub const GAMMA0_SYM: f64 = 0.375;
/// Gap on antisymmetric functions (`e_3 - e_2 = 5/72`).
pub const GAMMA0_AS: f64 = 5.0 / 72.0;
/// Leading quadratic coefficient, symmetric sector.
pub const C_SYM: f64 = 1.0;
/// Leading quadratic coefficient, antisymmetric sector (`-5/8 z^2`).
pub const C_AS: f64 = 0.625;
/// Enclosure constant `k = 1/(1 - a - b)` at the sector choice
/// `a = 0.1`, `b = 0.8`.
pub const K_FACTOR: f64 = 10.0;
/// `b` used in the validity thresholds.
pub const B_PARAM: f64 = 0.8;

/// Display-rounded constants the reference table was built with.
pub const W1_TABLE: f64 = 0.6;
pub const W2_TABLE: f64 = 0.3;
/// Nominal antisymmetric constants quoted alongside the bounds.
pub const W1_AS_NOMINAL: f64 = 0.20;
pub const W2_AS_NOMINAL: f64 = 0.01;
/// `w2` value quoted with the threshold `z*`.
pub const W2_NOMINAL: f64 = 0.27;

/// Literature variational ground-state energies (times -1, Hartree) for
/// two-electron ions at z = 10, 20, 30, 40, 50.
pub const REFERENCE_NEG_ENERGIES: [(f64, f64); 5] = [
    (10.0, 93.9),
    (20.0, 387.7),
    (30.0, 881.4),
    (40.0, 1575.2),
    (50.0, 2468.9),
];

/// The four degenerate n = 2 channels `(l, k)` of the antisymmetric ground
/// space, in fixed order.
pub const CHANNELS: [(u32, i32); 4] = [(0, 0), (1, -1), (1, 0), (1, 1)];

const SQRT_PI: f64 = 1.7724538509055159;

/// `|psi_100|^2`, the 1s density.
#[inline]
fn density_1s(p: &[f64; 3]) -> f64 {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    (-2.0 * r).exp() / std::f64::consts::PI
}

#[inline]
fn psi_1s(p: &[f64; 3]) -> f64 {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    (-r).exp() / SQRT_PI
}

/// Channel orbital `psi_2lk` in closed form. For l = 1 the `1/r` of the
/// harmonic cancels against the radial factor, so no origin guard is needed.
#[inline]
fn psi_channel(ch: usize, p: &[f64; 3]) -> f64 {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    match ch {
        // (1/sqrt(2))(1 - r/2) e^(-r/2) * Y00
        0 => {
            const C: f64 = std::f64::consts::FRAC_1_SQRT_2;
            const Y00: f64 = 0.28209479177387814;
            C * (1.0 - 0.5 * r) * (-0.5 * r).exp() * Y00
        }
        // r e^(-r/2)/(2 sqrt 6) * sqrt(3/4pi) * {y, z, x}/r
        1 | 2 | 3 => {
            const C: f64 = 0.09973557010035818; // 1/(4 sqrt(2 pi))
            let comp = match ch {
                1 => p[1],
                2 => p[2],
                _ => p[0],
            };
            C * comp * (-0.5 * r).exp()
        }
        _ => unreachable!("channel index 0..4"),
    }
}

/// Computed pair constants plus the grid they came from.
#[derive(Debug, Clone)]
pub struct HeliumConstants {
    pub w1: f64,
    pub w2: f64,
    pub w1_as: f64,
    pub w2_as: f64,
    /// Human-readable description of the quadrature used.
    pub grid_label: String,
}

impl HeliumConstants {
    /// The display-rounded constants quoted with the thresholds.
    pub fn nominal() -> Self {
        HeliumConstants {
            w1: W1_TABLE,
            w2: W2_NOMINAL,
            w1_as: W1_AS_NOMINAL,
            w2_as: W2_AS_NOMINAL,
            grid_label: "nominal".into(),
        }
    }
}

/// The 4x4 channel matrices: direct (`a`, `c`) and exchange (`b`, `d`)
/// blocks for the `1/|x-y|` and `1/|x-y|^2` kernels, with
/// `m = a - b`, `n = c - d`, `q = n - m^2`.
#[derive(Debug, Clone)]
pub struct PairMatrices {
    pub a: SymMatrix,
    pub b: SymMatrix,
    pub c: SymMatrix,
    pub d: SymMatrix,
    pub m: SymMatrix,
    pub n: SymMatrix,
    pub q: SymMatrix,
}

/// Contract a tabulated pointwise field against a weight function over the
/// grid, in fixed order with compensated accumulation.
fn contract(grid: &Grid, field: &[f64], f: impl Fn(&[f64; 3]) -> f64) -> f64 {
    let mut s = KahanSum::new();
    for ((p, &w), &v) in grid.points.iter().zip(&grid.weights).zip(field) {
        s.add(w * f(p) * v);
    }
    s.value()
}

/// `w1 = C_1` and `w2 = C_2 - C_1^2` from the shifted-kernel convolutions
/// of the 1s density with itself.
pub fn compute_w1_w2(grid: &Grid) -> Result<(f64, f64), HeliumError> {
    let phi1 = quadrature::kernel_convolve(density_1s, Alpha::One, grid)?;
    let c1 = contract(grid, &phi1, density_1s);
    let phi2 = quadrature::kernel_convolve(density_1s, Alpha::Two, grid)?;
    let c2 = contract(grid, &phi2, density_1s);
    Ok((c1, c2 - c1 * c1))
}

/// `w1` alone (the `alpha = 1` half of [`compute_w1_w2`]); used by the
/// convergence scan where the second kernel is not needed.
pub fn compute_w1(grid: &Grid) -> Result<f64, HeliumError> {
    let phi1 = quadrature::kernel_convolve(density_1s, Alpha::One, grid)?;
    Ok(contract(grid, &phi1, density_1s))
}

/// All 16 entries of each channel matrix by shifted-kernel quadrature.
///
/// The direct blocks are contracted with the compact 1s density on the
/// outside (the two orderings of the double integral are equal, and this one
/// keeps the slowly decaying n = 2 product inside the convolution, where the
/// shifted evaluation stays within the well-resolved part of the grid). The
/// exchange blocks have compact factors on both sides and are evaluated as
/// written. All four matrices are symmetrized.
pub fn compute_pair_matrices(grid: &Grid) -> Result<PairMatrices, HeliumError> {
    let mut a = SymMatrix::zeros(4);
    let mut c = SymMatrix::zeros(4);
    for i in 0..4 {
        for j in i..4 {
            let prod = move |p: &[f64; 3]| psi_channel(i, p) * psi_channel(j, p);
            let g1 = quadrature::kernel_convolve(prod, Alpha::One, grid)?;
            a.set(i, j, contract(grid, &g1, density_1s));
            let g2 = quadrature::kernel_convolve(prod, Alpha::Two, grid)?;
            c.set(i, j, contract(grid, &g2, density_1s));
        }
    }

    let mut b_raw = [[0.0; 4]; 4];
    let mut d_raw = [[0.0; 4]; 4];
    for i in 0..4 {
        let cross = move |p: &[f64; 3]| psi_1s(p) * psi_channel(i, p);
        let g1 = quadrature::kernel_convolve(cross, Alpha::One, grid)?;
        let g2 = quadrature::kernel_convolve(cross, Alpha::Two, grid)?;
        for j in 0..4 {
            let outer = move |p: &[f64; 3]| psi_1s(p) * psi_channel(j, p);
            b_raw[i][j] = contract(grid, &g1, outer);
            d_raw[i][j] = contract(grid, &g2, outer);
        }
    }
    let b = SymMatrix::from_fn(4, |i, j| 0.5 * (b_raw[i][j] + b_raw[j][i]));
    let d = SymMatrix::from_fn(4, |i, j| 0.5 * (d_raw[i][j] + d_raw[j][i]));

    let m = a.sub(&b);
    let n = c.sub(&d);
    let mm = m.to_mat().matmul(&m.to_mat());
    let mut q = SymMatrix::from_fn(4, |i, j| n.get(i, j) - mm[(i, j)]);
    q.symmetrize();
    Ok(PairMatrices { a, b, c, d, m, n, q })
}

/// `w1_as` = smallest eigenvalue of M, `w2_as` = largest eigenvalue of Q.
pub fn compute_w_as(pm: &PairMatrices) -> (f64, f64) {
    let m_eig = densela::sym_eig(&pm.m).expect("4x4 symmetric");
    let q_eig = densela::sym_eig(&pm.q).expect("4x4 symmetric");
    (m_eig.values[0], q_eig.values[3])
}

/// Full constant set from one grid.
pub fn compute_constants(grid: &Grid, label: &str) -> Result<HeliumConstants, HeliumError> {
    let (w1, w2) = compute_w1_w2(grid)?;
    let pm = compute_pair_matrices(grid)?;
    let (w1_as, w2_as) = compute_w_as(&pm);
    Ok(HeliumConstants { w1, w2, w1_as, w2_as, grid_label: label.to_string() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Sym,
    Antisym,
}

impl std::fmt::Display for Symmetry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Symmetry::Sym => write!(f, "sym"),
            Symmetry::Antisym => write!(f, "antisym"),
        }
    }
}

/// Which constants feed the bound: the display-rounded values the reference
/// table used, or the quadrature-computed ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Paper,
    Full,
}

/// A ground-state energy bracket in Hartree-like units (`E / E_ref`).
#[derive(Debug, Clone)]
pub struct EnergyEnclosure {
    pub z: f64,
    pub symmetry: Symmetry,
    pub lower: f64,
    pub upper: f64,
    pub w1_used: f64,
    pub w2_used: f64,
    pub gamma0: f64,
    pub c: f64,
    pub k: f64,
    /// Whether z clears the sector's validity threshold.
    pub valid_z: bool,
}

/// `upper = -c z^2 + w1 z`, `lower = upper - k w2 / gamma0`; the width is
/// z-independent in these units.
pub fn energy_bounds(
    z: f64,
    symmetry: Symmetry,
    constants: &HeliumConstants,
    rounding: Rounding,
) -> EnergyEnclosure {
    let (c, gamma0) = match symmetry {
        Symmetry::Sym => (C_SYM, GAMMA0_SYM),
        Symmetry::Antisym => (C_AS, GAMMA0_AS),
    };
    let (w1, w2) = match (symmetry, rounding) {
        (Symmetry::Sym, Rounding::Paper) => (W1_TABLE, W2_TABLE),
        (Symmetry::Sym, Rounding::Full) => (constants.w1, constants.w2),
        (Symmetry::Antisym, Rounding::Paper) => (W1_AS_NOMINAL, W2_AS_NOMINAL),
        (Symmetry::Antisym, Rounding::Full) => (constants.w1_as, constants.w2_as),
    };
    let upper = -c * z * z + w1 * z;
    let lower = upper - K_FACTOR * w2 / gamma0;
    let z_min = match symmetry {
        Symmetry::Sym => z_min_sym(),
        Symmetry::Antisym => z_min_antisym(),
    };
    EnergyEnclosure {
        z,
        symmetry,
        lower,
        upper,
        w1_used: w1,
        w2_used: w2,
        gamma0,
        c,
        k: K_FACTOR,
        valid_z: z >= z_min,
    }
}

/// Smallest z for which the relative-boundedness condition holds on the
/// symmetric sector: `(9 + gamma0) / (b gamma0)`.
pub fn z_min_sym() -> f64 {
    // associated so the dyadic ratio (9 + 3/8)/(3/8) = 25 is exact
    (9.0 + GAMMA0_SYM) / GAMMA0_SYM / B_PARAM
}

/// Antisymmetric analogue: `(9 + 3/8 + gamma0_as) / (b gamma0_as)`.
pub fn z_min_antisym() -> f64 {
    (9.0 + 0.375 + GAMMA0_AS) / (B_PARAM * GAMMA0_AS)
}

/// Validity and interpretation thresholds derived from a constant set.
#[derive(Debug, Clone)]
pub struct Thresholds {
    pub z_min_sym: f64,
    pub z_min_as: f64,
    /// Smallest z where the error term is below the subleading term:
    /// `10 w2 / (w1 gamma0)`.
    pub z_star: f64,
    /// Positive root of the sector-comparison inequality with the quoted
    /// coefficient 160 on `w2_as`.
    pub z_crossover: f64,
    /// Same root with the coefficient `k / gamma0_as = 144` instead; the two
    /// candidate constants bracket the intended value.
    pub z_crossover_alt: f64,
}

fn positive_root(a: f64, b: f64, c: f64) -> f64 {
    // a z^2 - b z - c > 0, a > 0, c >= 0: largest root
    (b + (b * b + 4.0 * a * c).sqrt()) / (2.0 * a)
}

pub fn thresholds(constants: &HeliumConstants) -> Thresholds {
    let a = C_SYM - C_AS; // 3/8
    let b = constants.w1 - constants.w1_as;
    Thresholds {
        z_min_sym: z_min_sym(),
        z_min_as: z_min_antisym(),
        z_star: K_FACTOR * constants.w2 / (constants.w1 * GAMMA0_SYM),
        z_crossover: positive_root(a, b, 160.0 * constants.w2_as),
        z_crossover_alt: positive_root(a, b, K_FACTOR / GAMMA0_AS * constants.w2_as),
    }
}

/// One row of the reference comparison table.
#[derive(Debug, Clone)]
pub struct Table1Row {
    pub z: f64,
    pub e_exact: f64,
    /// Leading part `-(z^2 - w1 z)`.
    pub e_lead: f64,
    /// Relative width of the error term, percent.
    pub delta_pct: f64,
    /// Relative difference between reference and leading part, percent.
    pub err_pct: f64,
    pub lower: f64,
    pub upper: f64,
    pub in_interval: bool,
}

fn interval_distance(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        0.0
    }
}

/// Build the comparison table against the embedded reference energies.
///
/// With `Rounding::Paper` the bounds use the display-rounded constants the
/// published table was computed with, and interval membership is judged at
/// that table's display precision (the leading parts are printed as
/// integers, so a reference value counts as inside when it is within one
/// unit of the bracket). With `Rounding::Full` the computed constants are
/// used and membership is exact.
pub fn table1(rounding: Rounding, constants: &HeliumConstants) -> Vec<Table1Row> {
    REFERENCE_NEG_ENERGIES
        .iter()
        .map(|&(z, neg_e)| {
            let enc = energy_bounds(z, Symmetry::Sym, constants, rounding);
            let e_exact = -neg_e;
            let main = -enc.upper; // z^2 - w1 z
            let delta_pct = 100.0 * enc.k * enc.w2_used / (main * enc.gamma0);
            let err_pct = 100.0 * (e_exact - enc.upper).abs() / main;
            let dist = interval_distance(e_exact, enc.lower, enc.upper);
            let in_interval = match rounding {
                Rounding::Paper => dist < 1.0,
                Rounding::Full => dist == 0.0,
            };
            Table1Row {
                z,
                e_exact,
                e_lead: enc.upper,
                delta_pct,
                err_pct,
                lower: enc.lower,
                upper: enc.upper,
                in_interval,
            }
        })
        .collect()
}

pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut s = String::from("z,E_exact,E_lead,delta_pct,err_pct,lower,upper,in_interval\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.z, r.e_exact, r.e_lead, r.delta_pct, r.err_pct, r.lower, r.upper, r.in_interval
        ));
    }
    s
}

pub fn convergence_csv(rows: &[(usize, HeliumConstants)]) -> String {
    let mut s = String::from("index,w1,w2,w1_as,w2_as\n");
    for (idx, c) in rows {
        s.push_str(&format!("{},{},{},{},{}\n", idx, c.w1, c.w2, c.w1_as, c.w2_as));
    }
    s
}
