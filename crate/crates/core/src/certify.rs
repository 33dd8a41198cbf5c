//! Explicit smallness conditions and the certified enclosures they buy.
//!
//! For parameters `0 < b < 1`, `0 < a < 1 - b`, `k = 1/(1-a-b)`, the three
//! conditions
//!
//! ```text
//! (1)  ||Pperp W Pperp||_H0  <=  b gam0 / lam_star
//! (2)  ||P W P|| + k Phi(W)  <   a gam0
//! (3)  k Phi(W)              <   (a gam0 - ||P W P||) / 2
//! ```
//!
//! with `Phi(W) = (lam0 lam_star / gam0) ||Pperp W P||_H0^2` guarantee that
//! the perturbed spectrum near `lam0` consists of exactly m eigenvalues
//! inside `|lam - lam0| <= ||PWP|| + k Phi(W)`, with eigenvector distance at
//! most `k sqrt(Phi/gam0)` to the unperturbed eigenspace. The inequalities
//! are evaluated exactly as written: (1) non-strict, (2) and (3) strict, so
//! boundary cases are rejected conservatively.

use thiserror::Error;

use crate::densela::{self, SymMatrix};
use crate::fsmap::PerturbationProblem;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("invalid parameters: need 0 < b < 1 and 0 < a < 1 - b, got a = {a}, b = {b}")]
    InvalidParams { a: f64, b: f64 },
    #[error("certificate conditions fail; pass force to proceed")]
    InvalidCertificate,
    #[error(transparent)]
    Densela(#[from] densela::DenselaError),
}

/// The pair (a, b) with the derived constant k = 1/(1-a-b).
#[derive(Debug, Clone, Copy)]
pub struct CertifyParams {
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

impl CertifyParams {
    pub fn new(a: f64, b: f64) -> Result<Self, CertifyError> {
        if !(0.0 < b && b < 1.0 && 0.0 < a && a < 1.0 - b) {
            return Err(CertifyError::InvalidParams { a, b });
        }
        Ok(CertifyParams { a, b, k: 1.0 / (1.0 - a - b) })
    }
}

/// Evaluated conditions plus every derived bound. All fields are filled
/// whether or not the conditions pass.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    /// `||Pperp W Pperp||_H0`.
    pub form_norm_wperp: f64,
    /// `||P W P||`.
    pub pwp_norm: f64,
    /// `Phi(W)`.
    pub phi: f64,
    /// `(||PWP|| + k Phi) / gam0`; the trust-interval radius in gap units.
    pub r: f64,
    pub cond1: bool,
    pub cond2: bool,
    pub cond3: bool,
    pub valid: bool,
    /// Half-width `||PWP|| + k Phi` of the first-order interval.
    pub delta: f64,
    /// First-order interval `[lam0 - delta, lam0 + delta]`.
    pub eig_interval: (f64, f64),
    /// `k sqrt(Phi / gam0)`.
    pub vec_bound: f64,
    /// Rank-one refinement `[lam0 + <W> - k Phi, lam0 + <W> + k Phi]`
    /// (present only when m = 1).
    pub second_order_interval: Option<(f64, f64)>,
    /// Lowest-eigenvalue bracket `[lam0 + mu_min - k Phi, lam0 + mu_min]`
    /// (present only when m > 1).
    pub lowest_interval: Option<(f64, f64)>,
    /// Smallest eigenvalue of `P W P`.
    pub mu_min: f64,
}

impl Certificate {
    /// Flat `key=value` block, one per line, stable key set and order.
    pub fn to_kv_block(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("cond1={}\n", self.cond1));
        s.push_str(&format!("cond2={}\n", self.cond2));
        s.push_str(&format!("cond3={}\n", self.cond3));
        s.push_str(&format!("a={}\n", self.a));
        s.push_str(&format!("b={}\n", self.b));
        s.push_str(&format!("k={}\n", self.k));
        s.push_str(&format!("r={}\n", self.r));
        s.push_str(&format!("phi={}\n", self.phi));
        s.push_str(&format!("pwp_norm={}\n", self.pwp_norm));
        s.push_str(&format!("delta={}\n", self.delta));
        s.push_str(&format!("vec_bound={}\n", self.vec_bound));
        s
    }
}

/// `||W||_H0 = ||H0^(-1/2) W H0^(-1/2)||` for standalone matrices.
pub fn form_norm(w: &SymMatrix, h0: &SymMatrix) -> Result<f64, CertifyError> {
    let inv_sqrt = densela::spectral_apply(h0, |x| {
        if x > 0.0 { x.powf(-0.5) } else { f64::NAN }
    })?;
    let m = inv_sqrt.to_mat().matmul(&w.to_mat()).matmul(&inv_sqrt.to_mat());
    let conj = SymMatrix::from_fn(w.n(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    Ok(densela::op_norm(&conj)?)
}

/// `Phi(W) = (lam0 lam_star / gam0) ||Pperp W P||_H0^2`, computed in the
/// H0 eigenbasis where the mixed form-norm is a scaled block.
pub fn phi(prob: &PerturbationProblem) -> f64 {
    let wqp = prob.wqp(); // (n-m) x m in the eigenbasis
    let comp = prob.complement_values();
    let cluster = prob.cluster();
    let m = prob.multiplicity();
    // B = D_q^(-1/2) Wqp D_p^(-1/2); ||B||^2 = op_norm(B' B)
    let bt_b = SymMatrix::from_fn(m, |i, j| {
        (0..wqp.rows)
            .map(|s| wqp[(s, i)] * wqp[(s, j)] / comp[s])
            .sum::<f64>()
            / (cluster[i].sqrt() * cluster[j].sqrt())
    });
    let norm_sq = densela::op_norm(&bt_b).expect("m x m Gram matrix");
    prob.lam0() * prob.lam_star() / prob.gam0() * norm_sq
}

/// Upper bound `||P W Pperp W P|| / gam0` on `Phi(W)`; valid whenever the
/// selected cluster is the bottom of the spectrum, and computed from the
/// plain m x m Gram matrix of the coupling block.
pub fn phi_upper(prob: &PerturbationProblem) -> f64 {
    let wqp = prob.wqp();
    let m = prob.multiplicity();
    let gram = SymMatrix::from_fn(m, |i, j| {
        (0..wqp.rows).map(|s| wqp[(s, i)] * wqp[(s, j)]).sum::<f64>()
    });
    densela::op_norm(&gram).expect("m x m Gram matrix") / prob.gam0()
}

/// Evaluate all three conditions and fill in every derived quantity.
pub fn check_conditions(prob: &PerturbationProblem, params: &CertifyParams) -> Certificate {
    let m = prob.multiplicity();
    let gam0 = prob.gam0();
    let lam0 = prob.lam0();
    let lam_star = prob.lam_star();
    let k = params.k;

    let comp = prob.complement_values();
    let wqq = prob.wqq();
    let scaled_wqq = SymMatrix::from_fn(wqq.n(), |i, j| {
        wqq.get(i, j) / (comp[i].sqrt() * comp[j].sqrt())
    });
    let form_norm_wperp = densela::op_norm(&scaled_wqq).expect("finite complement block");

    let wpp_eig = densela::sym_eig(prob.wpp()).expect("m x m block");
    let pwp_norm = wpp_eig.values.iter().fold(0.0_f64, |c, &x| c.max(x.abs()));
    let mu_min = wpp_eig.values[0];

    let phi_val = phi(prob);

    let cond1 = form_norm_wperp <= params.b * gam0 / lam_star;
    let cond2 = pwp_norm + k * phi_val < params.a * gam0;
    let cond3 = k * phi_val < 0.5 * (params.a * gam0 - pwp_norm);
    let valid = cond1 && cond2 && cond3;

    let delta = pwp_norm + k * phi_val;
    let r = delta / gam0;
    let vec_bound = k * (phi_val / gam0).sqrt();

    let second_order_interval = (m == 1).then(|| {
        let center = lam0 + prob.wpp().get(0, 0);
        (center - k * phi_val, center + k * phi_val)
    });
    let lowest_interval =
        (m > 1).then(|| (lam0 + mu_min - k * phi_val, lam0 + mu_min));

    Certificate {
        a: params.a,
        b: params.b,
        k,
        form_norm_wperp,
        pwp_norm,
        phi: phi_val,
        r,
        cond1,
        cond2,
        cond3,
        valid,
        delta,
        eig_interval: (lam0 - delta, lam0 + delta),
        vec_bound,
        second_order_interval,
        lowest_interval,
        mu_min,
    }
}

/// The eigenvalue enclosures backed by a certificate.
#[derive(Debug, Clone)]
pub struct Enclosures {
    /// Contains every perturbed eigenvalue of the cluster.
    pub first_order: (f64, f64),
    /// Rank-one second-order refinement (m = 1 only).
    pub second_order: Option<(f64, f64)>,
    /// Bracket for the lowest perturbed eigenvalue (m > 1 only).
    pub lowest: Option<(f64, f64)>,
}

pub fn eigenvalue_enclosures(
    _prob: &PerturbationProblem,
    cert: &Certificate,
    force: bool,
) -> Result<Enclosures, CertifyError> {
    if !cert.valid && !force {
        return Err(CertifyError::InvalidCertificate);
    }
    Ok(Enclosures {
        first_order: cert.eig_interval,
        second_order: cert.second_order_interval,
        lowest: cert.lowest_interval,
    })
}

/// `k sqrt(Phi / gam0)`: distance bound between perturbed and unperturbed
/// eigenvectors (after aligning the basis inside the degenerate eigenspace).
pub fn eigenvector_bound(
    _prob: &PerturbationProblem,
    cert: &Certificate,
    force: bool,
) -> Result<f64, CertifyError> {
    if !cert.valid && !force {
        return Err(CertifyError::InvalidCertificate);
    }
    Ok(cert.vec_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsmap::Lam0Select;
    use approx::assert_abs_diff_eq;

    fn two_by_two(eps: f64) -> PerturbationProblem {
        let h0 = SymMatrix::diag(&[1.0, 2.0]);
        let w = SymMatrix::new(2, vec![0.0, eps, eps, 0.0]).unwrap();
        PerturbationProblem::new(h0, w, Lam0Select::Index(0), None).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(CertifyParams::new(0.1, 0.8).is_ok());
        assert_abs_diff_eq!(CertifyParams::new(0.1, 0.8).unwrap().k, 10.0, epsilon = 1e-14);
        assert!(CertifyParams::new(0.3, 0.8).is_err());
        assert!(CertifyParams::new(0.0, 0.5).is_err());
        assert!(CertifyParams::new(0.5, 0.0).is_err());
    }

    #[test]
    fn form_norm_cases() {
        let h0 = SymMatrix::diag(&[1.0, 2.0]);
        assert_abs_diff_eq!(form_norm(&h0, &h0).unwrap(), 1.0, epsilon = 1e-12);
        let w = SymMatrix::new(2, vec![0.0, 0.1, 0.1, 0.0]).unwrap();
        assert_abs_diff_eq!(
            form_norm(&w, &h0).unwrap(),
            0.1 / 2.0_f64.sqrt(),
            epsilon = 1e-12
        );
        assert_eq!(form_norm(&SymMatrix::zeros(2), &h0).unwrap(), 0.0);
        assert!(form_norm(&w, &SymMatrix::diag(&[1.0, -2.0])).is_err());
    }

    #[test]
    fn phi_hand_computed() {
        let p = two_by_two(0.1);
        assert_abs_diff_eq!(phi(&p), 0.01, epsilon = 1e-15);
        let pz = PerturbationProblem::new(
            SymMatrix::diag(&[1.0, 2.0]),
            SymMatrix::zeros(2),
            Lam0Select::Index(0),
            None,
        )
        .unwrap();
        assert_eq!(phi(&pz), 0.0);
    }

    #[test]
    fn phi_upper_hand_computed() {
        let p = two_by_two(0.1);
        assert_abs_diff_eq!(phi_upper(&p), 0.01, epsilon = 1e-15);
        assert!(phi(&p) <= phi_upper(&p) + 1e-12);
    }

    #[test]
    fn conditions_on_worked_example() {
        let p = two_by_two(0.1);
        let params = CertifyParams::new(0.1, 0.1).unwrap();
        assert_abs_diff_eq!(params.k, 1.25, epsilon = 1e-15);
        let cert = check_conditions(&p, &params);
        assert!(cert.cond1 && cert.cond2 && cert.cond3 && cert.valid);
        assert_abs_diff_eq!(cert.delta, 0.0125, epsilon = 1e-14);
        assert!(cert.r < params.a);
        assert_abs_diff_eq!(cert.vec_bound, 0.125, epsilon = 1e-13);
        assert_eq!(cert.pwp_norm, 0.0);
    }

    #[test]
    fn zero_w_always_certifies() {
        let p = PerturbationProblem::new(
            SymMatrix::diag(&[1.0, 2.0, 3.0]),
            SymMatrix::zeros(3),
            Lam0Select::Index(1),
            None,
        )
        .unwrap();
        for (a, b) in [(0.1, 0.8), (0.05, 0.9), (0.4, 0.5)] {
            let cert = check_conditions(&p, &CertifyParams::new(a, b).unwrap());
            assert!(cert.valid);
            assert_eq!(cert.delta, 0.0);
        }
    }

    #[test]
    fn cond1_boundary_violation() {
        // scale W so that ||Pperp W Pperp||_H0 = 1.01 * b gam0 / lam_star
        let b = 0.5;
        let h0 = SymMatrix::diag(&[1.0, 2.0]);
        // W supported on the complement only: Wqq = w22, form norm = w22 / 2
        let target = 1.01 * b * 1.0 / 2.0;
        let w22 = target * 2.0;
        let w = SymMatrix::new(2, vec![0.0, 0.0, 0.0, w22]).unwrap();
        let p = PerturbationProblem::new(h0, w, Lam0Select::Index(0), None).unwrap();
        let cert = check_conditions(&p, &CertifyParams::new(0.1, b).unwrap());
        assert!(!cert.cond1);
        assert!(!cert.valid);
    }

    #[test]
    fn enclosures_on_worked_example() {
        let p = two_by_two(0.1);
        let cert = check_conditions(&p, &CertifyParams::new(0.1, 0.1).unwrap());
        let enc = eigenvalue_enclosures(&p, &cert, false).unwrap();
        assert_abs_diff_eq!(enc.first_order.0, 1.0 - 0.0125, epsilon = 1e-14);
        assert_abs_diff_eq!(enc.first_order.1, 1.0 + 0.0125, epsilon = 1e-14);
        // <W> = 0 here, second-order interval coincides
        let so = enc.second_order.unwrap();
        assert_abs_diff_eq!(so.0, enc.first_order.0, epsilon = 1e-14);
        assert_abs_diff_eq!(so.1, enc.first_order.1, epsilon = 1e-14);
        assert!(enc.lowest.is_none());
        let lam1 = (3.0 - 1.04_f64.sqrt()) / 2.0;
        assert!(enc.first_order.0 <= lam1 && lam1 <= enc.first_order.1);
        assert!(so.0 <= lam1 && lam1 <= so.1);
    }

    #[test]
    fn degenerate_interval_for_zero_w() {
        let p = PerturbationProblem::new(
            SymMatrix::diag(&[1.0, 2.0]),
            SymMatrix::zeros(2),
            Lam0Select::Index(0),
            None,
        )
        .unwrap();
        let cert = check_conditions(&p, &CertifyParams::new(0.1, 0.1).unwrap());
        let enc = eigenvalue_enclosures(&p, &cert, false).unwrap();
        assert_eq!(enc.first_order, (1.0, 1.0));
    }

    #[test]
    fn invalid_certificate_gates_enclosures() {
        let h0 = SymMatrix::diag(&[1.0, 2.0]);
        let w = SymMatrix::new(2, vec![0.0, 0.0, 0.0, 1.9]).unwrap();
        let p = PerturbationProblem::new(h0, w, Lam0Select::Index(0), None).unwrap();
        let cert = check_conditions(&p, &CertifyParams::new(0.1, 0.1).unwrap());
        assert!(!cert.valid);
        assert!(matches!(
            eigenvalue_enclosures(&p, &cert, false),
            Err(CertifyError::InvalidCertificate)
        ));
        assert!(eigenvalue_enclosures(&p, &cert, true).is_ok());
        assert!(matches!(
            eigenvector_bound(&p, &cert, false),
            Err(CertifyError::InvalidCertificate)
        ));
    }

    #[test]
    fn eigenvector_bound_dominates_actual_distance() {
        let p = two_by_two(0.1);
        let cert = check_conditions(&p, &CertifyParams::new(0.1, 0.1).unwrap());
        let bound = eigenvector_bound(&p, &cert, false).unwrap();
        assert_abs_diff_eq!(bound, 0.125, epsilon = 1e-13);
        let h = p.h0().add(p.w());
        let e = densela::sym_eig(&h).unwrap();
        let v = e.vectors.column(0);
        let dist = ((v[0] - 1.0).powi(2) + v[1].powi(2)).sqrt();
        assert_abs_diff_eq!(dist, 0.0987, epsilon = 1e-4);
        assert!(dist <= bound);
    }

    #[test]
    fn kv_block_stable_keys() {
        let p = two_by_two(0.1);
        let cert = check_conditions(&p, &CertifyParams::new(0.1, 0.1).unwrap());
        let block = cert.to_kv_block();
        let keys: Vec<&str> = block.lines().map(|l| l.split('=').next().unwrap()).collect();
        assert_eq!(
            keys,
            vec!["cond1", "cond2", "cond3", "a", "b", "k", "r", "phi", "pwp_norm", "delta", "vec_bound"]
        );
        assert!(block.contains("cond1=true"));
    }

    #[test]
    fn monotone_degradation_under_scaling() {
        let p1 = two_by_two(0.05);
        let p2 = two_by_two(0.09);
        let params = CertifyParams::new(0.1, 0.1).unwrap();
        let c1 = check_conditions(&p1, &params);
        let c2 = check_conditions(&p2, &params);
        assert!(c1.valid && c2.valid);
        assert!(c2.phi >= c1.phi);
        assert!(c2.delta >= c1.delta);
    }
}
