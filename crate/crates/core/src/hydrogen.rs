//! Hydrogen-like bound states in rescaled units (Bohr radius and nuclear
//! charge scaled out): energies, generalized Laguerre polynomials, real
//! spherical harmonics, the orbitals `psi_nlk` and the antisymmetric
//! two-particle pair functions built from them.
//!
//! Real harmonics are used throughout so every matrix assembled downstream
//! is real symmetric; the rotation-invariant kernels we integrate against
//! have identical spectra in the real and complex bases.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HydrogenError {
    #[error("principal quantum number must be >= 1, got {0}")]
    InvalidQuantumNumber(i64),
    #[error("Laguerre degree must be >= 0, got {0}")]
    InvalidDegree(i64),
    #[error("harmonic order |{k}| exceeds degree {ell}")]
    InvalidOrder { ell: u32, k: i32 },
    #[error("pair functions are defined for n = 2 orbitals, got n = {0}")]
    InvalidOrbital(u32),
}

/// `e_n = -1/(2 n^2)` in rescaled Hartree-like units.
pub fn energy(n: i64) -> Result<f64, HydrogenError> {
    if n < 1 {
        return Err(HydrogenError::InvalidQuantumNumber(n));
    }
    let nf = n as f64;
    Ok(-0.5 / (nf * nf))
}

fn factorial(n: u32) -> f64 {
    (2..=n as u64).map(|k| k as f64).product()
}

/// Generalized Laguerre polynomial `L_q^alpha(rho)`, normalized so that
/// `L_0 = 1` and `L_1 = 1 + alpha - rho` (no extra `(n+l)!` factor), with
/// the standard three-term recurrence.
pub fn laguerre(q: i64, alpha: f64, rho: f64) -> Result<f64, HydrogenError> {
    if q < 0 {
        return Err(HydrogenError::InvalidDegree(q));
    }
    let mut prev = 1.0; // L_0
    if q == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + alpha - rho; // L_1
    for k in 1..q {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - rho) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `d/drho L_q^alpha(rho) = -L_(q-1)^(alpha+1)(rho)`.
pub fn laguerre_deriv(q: i64, alpha: f64, rho: f64) -> Result<f64, HydrogenError> {
    if q < 0 {
        return Err(HydrogenError::InvalidDegree(q));
    }
    if q == 0 {
        return Ok(0.0);
    }
    Ok(-laguerre(q - 1, alpha + 1.0, rho)?)
}

/// Associated Legendre `P_l^m(x)` without the Condon-Shortley phase
/// (seed `P_m^m = (2m-1)!! (1-x^2)^(m/2)`).
fn assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    debug_assert!(m <= l);
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2.0 * m as f64 + 1.0) * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        let llf = ll as f64;
        let mf = m as f64;
        pll = (x * (2.0 * llf - 1.0) * pmmp1 - (llf + mf - 1.0) * pmm) / (llf - mf);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// Real orthonormal spherical harmonic of degree `ell` and order `k`
/// (`k > 0` pairs with `cos(k phi)`, `k < 0` with `sin(|k| phi)`).
pub fn real_sph_harm(ell: u32, k: i32, theta: f64, phi: f64) -> Result<f64, HydrogenError> {
    let ka = k.unsigned_abs();
    if ka > ell {
        return Err(HydrogenError::InvalidOrder { ell, k });
    }
    // ratio (l-|k|)!/(l+|k|)! computed as a product to avoid overflow
    let mut ratio = 1.0;
    for j in (ell - ka + 1)..=(ell + ka) {
        ratio /= j as f64;
    }
    let norm = ((2.0 * ell as f64 + 1.0) / (4.0 * std::f64::consts::PI) * ratio).sqrt();
    let p = assoc_legendre(ell, ka, theta.cos());
    let val = if k > 0 {
        std::f64::consts::SQRT_2 * norm * p * (ka as f64 * phi).cos()
    } else if k < 0 {
        std::f64::consts::SQRT_2 * norm * p * (ka as f64 * phi).sin()
    } else {
        norm * p
    };
    Ok(val)
}

/// Orbital quantum numbers `n >= 1`, `0 <= l <= n-1`, `-l <= k <= l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Orbital {
    pub n: u32,
    pub ell: u32,
    pub k: i32,
}

impl Orbital {
    pub fn new(n: u32, ell: u32, k: i32) -> Result<Self, HydrogenError> {
        if n < 1 {
            return Err(HydrogenError::InvalidQuantumNumber(n as i64));
        }
        if ell >= n {
            return Err(HydrogenError::InvalidQuantumNumber(ell as i64));
        }
        if k.unsigned_abs() > ell {
            return Err(HydrogenError::InvalidOrder { ell, k });
        }
        Ok(Orbital { n, ell, k })
    }
}

/// A point in rescaled Bohr-radius units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn from_array(a: &[f64; 3]) -> Self {
        Point3 { x: a[0], y: a[1], z: a[2] }
    }

    pub fn r(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn sub(&self, o: &Point3) -> Point3 {
        Point3 { x: self.x - o.x, y: self.y - o.y, z: self.z - o.z }
    }
}

/// Normalized radial factor `R_nl(r)` with `rho = 2r/n`, so that
/// `psi_nlk = R_nl(r) Y_lk`.
pub fn radial(n: u32, ell: u32, r: f64) -> f64 {
    let nf = n as f64;
    let rho = 2.0 * r / nf;
    let pref = ((2.0 / nf).powi(3) * factorial(n - ell - 1)
        / (2.0 * nf * factorial(n + ell)))
    .sqrt();
    let lag = laguerre((n - ell - 1) as i64, 2.0 * ell as f64 + 1.0, rho)
        .expect("degree is non-negative by orbital invariants");
    pref * (-0.5 * rho).exp() * rho.powi(ell as i32) * lag
}

/// `d R_nl / d r`, from the closed-form derivative of the Laguerre factor.
pub fn radial_deriv(n: u32, ell: u32, r: f64) -> f64 {
    let nf = n as f64;
    let rho = 2.0 * r / nf;
    let q = (n - ell - 1) as i64;
    let alpha = 2.0 * ell as f64 + 1.0;
    let pref = ((2.0 / nf).powi(3) * factorial(n - ell - 1)
        / (2.0 * nf * factorial(n + ell)))
    .sqrt();
    let lag = laguerre(q, alpha, rho).unwrap();
    let dlag = laguerre_deriv(q, alpha, rho).unwrap();
    let e = (-0.5 * rho).exp();
    let powl = |p: i32| if p < 0 && rho == 0.0 { 0.0 } else { rho.powi(p) };
    let d_drho = pref
        * e
        * (-0.5 * powl(ell as i32) * lag
            + ell as f64 * powl(ell as i32 - 1) * lag
            + powl(ell as i32) * dlag);
    d_drho * 2.0 / nf
}

/// The orbital `psi_nlk` evaluated at a point; real-valued, L2-normalized.
pub fn psi(orb: Orbital, x: Point3) -> f64 {
    let r = x.r();
    if r == 0.0 && orb.ell > 0 {
        return 0.0;
    }
    let theta = if r == 0.0 { 0.0 } else { (x.z / r).clamp(-1.0, 1.0).acos() };
    let phi = x.y.atan2(x.x);
    radial(orb.n, orb.ell, r)
        * real_sph_harm(orb.ell, orb.k, theta, phi)
            .expect("orbital invariants guarantee |k| <= l")
}

/// Antisymmetrized two-particle pair function
/// `(psi_100(x1) psi_2lk(x2) - psi_2lk(x1) psi_100(x2)) / sqrt(2)`.
pub fn pair_antisym(orb2: Orbital, x1: Point3, x2: Point3) -> Result<f64, HydrogenError> {
    if orb2.n != 2 {
        return Err(HydrogenError::InvalidOrbital(orb2.n));
    }
    let ground = Orbital { n: 1, ell: 0, k: 0 };
    Ok((psi(ground, x1) * psi(orb2, x2) - psi(orb2, x1) * psi(ground, x2))
        / std::f64::consts::SQRT_2)
}
