//! The Feshbach-Schur reduction engine.
//!
//! For `H = H0 + W` with a selected eigenvalue cluster of `H0` (projector P,
//! rank m), the map sends the n-dimensional eigenproblem to the m x m family
//!
//! ```text
//! F(lambda) = P (H - lambda - (H - lambda) Rperp(lambda) (H - lambda)) P
//! H(lambda) = F(lambda) + lambda I = P H P + U(lambda)
//! U(lambda) = -P H Pperp (Hperp - lambda)^(-1) Pperp H P
//! ```
//!
//! expressed in an orthonormal basis of Ran P. Eigenvalues of `H` near the
//! cluster are exactly the fixed points `nu_i(lambda) = lambda` of the
//! ordered eigenvalue branches of `H(lambda)`, and eigenvectors lift back
//! through the Q-operator. All blocks are materialized once against the
//! eigenbasis of `H0`; the complement block `Hperp` is eigendecomposed a
//! single time so every resolvent application is a diagonal rescale.

use thiserror::Error;

use crate::certify::{self, CertifyParams};
use crate::densela::{self, norm2, DenselaError, EigDecomp, Mat, OrthProjector, SymMatrix};

#[derive(Debug, Error)]
pub enum FsError {
    #[error(transparent)]
    Densela(#[from] DenselaError),
    #[error("H0 is not positive definite (lowest eigenvalue {min_eigenvalue:e})")]
    H0NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("no eigenvalue cluster matches the selector: {0}")]
    NoSuchEigenvalue(String),
    #[error("selected cluster spans the whole spectrum; no gap")]
    GapUndefined,
    #[error("lambda = {lam:e} is within {distance:e} of the complement spectrum")]
    ResolventSingular { lam: f64, distance: f64 },
    #[error("iterate {lam:e} left the trust interval [{lo:e}, {hi:e}]")]
    LeftTrustRegion { lam: f64, lo: f64, hi: f64 },
    #[error("fixed-point iteration did not converge within {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("certificate conditions fail; pass force to solve anyway")]
    CertificateInvalid,
    #[error("branch index {index} out of range 1..={m}")]
    BranchIndex { index: usize, m: usize },
}

/// How to pick the unperturbed eigenvalue cluster.
#[derive(Debug, Clone, Copy)]
pub enum Lam0Select {
    /// i-th distinct eigenvalue of `H0`, ascending, 0-based.
    Index(usize),
    /// All eigenvalues within `tol * ||H0||` of the given value.
    Value(f64),
}

/// Relative tolerance used to merge near-degenerate eigenvalues of `H0`
/// into one cluster.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;

/// The assembled perturbation problem: `H0`, `W`, the selected cluster and
/// every block needed by the reduction, precomputed in the `H0` eigenbasis.
#[derive(Debug, Clone)]
pub struct PerturbationProblem {
    h0: SymMatrix,
    w: SymMatrix,
    n: usize,
    m: usize,
    lam0: f64,
    gam0: f64,
    lam_star: f64,
    cluster: Vec<f64>,
    /// H0 eigenvalues on the complement, ascending.
    comp_vals: Vec<f64>,
    /// orthonormal basis of Ran P (n x m).
    vp: Mat,
    /// orthonormal basis of Ran Pperp (n x (n-m)).
    vq: Mat,
    /// P H P in the P-basis.
    hpp: SymMatrix,
    /// Pperp H P block ((n-m) x m).
    hqp: Mat,
    /// eigendecomposition of Pperp H Pperp.
    hperp: EigDecomp,
    /// hperp.vectors' * hqp, so U(lambda) = -G' D(lambda) G.
    g: Mat,
    /// W blocks in the same bases (used by the certification formulas).
    wpp: SymMatrix,
    wqp: Mat,
    wqq: SymMatrix,
    /// cheap norm bound on H for singularity tolerances.
    scale: f64,
}

impl PerturbationProblem {
    pub fn new(
        h0: SymMatrix,
        w: SymMatrix,
        select: Lam0Select,
        cluster_tol: Option<f64>,
    ) -> Result<Self, FsError> {
        if h0.n() != w.n() {
            return Err(DenselaError::InvalidMatrix(format!(
                "H0 is {}x{0} but W is {1}x{1}",
                h0.n(),
                w.n()
            ))
            .into());
        }
        let n = h0.n();
        let e0 = densela::sym_eig(&h0)?;
        let beta = e0.values[0];
        if beta <= 0.0 {
            return Err(FsError::H0NotPositiveDefinite { min_eigenvalue: beta });
        }
        let norm0 = e0.values[n - 1].abs().max(beta.abs());
        let tol = cluster_tol.unwrap_or(DEFAULT_CLUSTER_TOL) * norm0.max(1.0);

        // distinct clusters by gap > tol
        let mut clusters: Vec<(usize, usize)> = Vec::new(); // [start, end)
        let mut start = 0;
        for i in 1..=n {
            if i == n || e0.values[i] - e0.values[i - 1] > tol {
                clusters.push((start, i));
                start = i;
            }
        }
        let (cs, ce) = match select {
            Lam0Select::Index(i) => *clusters
                .get(i)
                .ok_or_else(|| FsError::NoSuchEigenvalue(format!(
                    "index {i} but only {} distinct eigenvalues",
                    clusters.len()
                )))?,
            Lam0Select::Value(v) => *clusters
                .iter()
                .find(|&&(s, e)| e0.values[s..e].iter().any(|&x| (x - v).abs() <= tol))
                .ok_or_else(|| FsError::NoSuchEigenvalue(format!("no eigenvalue near {v}")))?,
        };
        let m = ce - cs;
        if m == n {
            return Err(FsError::GapUndefined);
        }
        let cluster: Vec<f64> = e0.values[cs..ce].to_vec();
        let lam0 = cluster.iter().sum::<f64>() / m as f64;
        let comp_idx: Vec<usize> = (0..n).filter(|i| *i < cs || *i >= ce).collect();
        let comp_vals: Vec<f64> = comp_idx.iter().map(|&i| e0.values[i]).collect();
        let gam0 = comp_vals
            .iter()
            .map(|&x| (x - lam0).abs())
            .fold(f64::INFINITY, f64::min);
        let lam_star = lam0 + gam0;

        let vp = Mat::from_columns(n, &(cs..ce).map(|j| e0.vectors.column(j)).collect::<Vec<_>>());
        let vq = Mat::from_columns(
            n,
            &comp_idx.iter().map(|&j| e0.vectors.column(j)).collect::<Vec<_>>(),
        );

        let h = h0.add(&w);
        let hpp = h.conjugate(&vp);
        let hqp = vq.transpose().matmul(&h.to_mat()).matmul(&vp);
        let hqq = h.conjugate(&vq);
        let hperp = densela::sym_eig(&hqq)?;
        let g = hperp.vectors.transpose().matmul(&hqp);

        let wpp = w.conjugate(&vp);
        let wqp = vq.transpose().matmul(&w.to_mat()).matmul(&vp);
        let wqq = w.conjugate(&vq);
        let scale = h.inf_norm().max(1.0);

        Ok(PerturbationProblem {
            h0,
            w,
            n,
            m,
            lam0,
            gam0,
            lam_star,
            cluster,
            comp_vals,
            vp,
            vq,
            hpp,
            hqp,
            hperp,
            g,
            wpp,
            wqp,
            wqq,
            scale,
        })
    }

    pub fn h0(&self) -> &SymMatrix {
        &self.h0
    }

    pub fn w(&self) -> &SymMatrix {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn multiplicity(&self) -> usize {
        self.m
    }

    pub fn lam0(&self) -> f64 {
        self.lam0
    }

    pub fn gam0(&self) -> f64 {
        self.gam0
    }

    pub fn lam_star(&self) -> f64 {
        self.lam_star
    }

    /// The cluster eigenvalues of `H0` represented by `lam0`.
    pub fn cluster(&self) -> &[f64] {
        &self.cluster
    }

    /// H0 eigenvalues on the complement subspace, ascending.
    pub fn complement_values(&self) -> &[f64] {
        &self.comp_vals
    }

    pub fn projector(&self) -> OrthProjector {
        OrthProjector::new(self.vp.clone()).expect("P-basis is orthonormal by construction")
    }

    pub fn projector_perp(&self) -> OrthProjector {
        OrthProjector::new(self.vq.clone()).expect("Pperp-basis is orthonormal by construction")
    }

    pub(crate) fn wpp(&self) -> &SymMatrix {
        &self.wpp
    }

    pub(crate) fn wqp(&self) -> &Mat {
        &self.wqp
    }

    pub(crate) fn wqq(&self) -> &SymMatrix {
        &self.wqq
    }

    /// 1/(d_j - lambda) over the complement spectrum of H, guarding the
    /// resolvent singularity.
    fn resolvent_coeffs(&self, lam: f64) -> Result<Vec<f64>, FsError> {
        let dist = self
            .hperp
            .values
            .iter()
            .map(|&d| (d - lam).abs())
            .fold(f64::INFINITY, f64::min);
        if dist <= 1e-10 * self.scale {
            return Err(FsError::ResolventSingular { lam, distance: dist });
        }
        Ok(self.hperp.values.iter().map(|&d| 1.0 / (d - lam)).collect())
    }

    /// `U(lambda) = -P H Pperp (Hperp - lambda)^(-1) Pperp H P`, m x m,
    /// symmetric by construction; negative semidefinite for real lambda
    /// below the complement spectrum.
    pub fn effective_interaction(&self, lam: f64) -> Result<SymMatrix, FsError> {
        let coeffs = self.resolvent_coeffs(lam)?;
        let k = self.g.rows;
        let m = self.m;
        Ok(SymMatrix::from_fn(m, |i, j| {
            -(0..k).map(|s| coeffs[s] * self.g[(s, i)] * self.g[(s, j)]).sum::<f64>()
        }))
    }

    /// `H(lambda) = P H P + U(lambda)`.
    pub fn effective_hamiltonian(&self, lam: f64) -> Result<SymMatrix, FsError> {
        Ok(self.hpp.add(&self.effective_interaction(lam)?))
    }

    /// `F(lambda) = H(lambda) - lambda I` in the P-basis.
    pub fn feshbach_map(&self, lam: f64) -> Result<SymMatrix, FsError> {
        let mut f = self.effective_hamiltonian(lam)?;
        for i in 0..self.m {
            f.set(i, i, f.get(i, i) - lam);
        }
        Ok(f)
    }

    /// Ordered eigenvalue branches `nu_1(lambda) <= ... <= nu_m(lambda)`.
    pub fn branch_eigenvalues(&self, lam: f64) -> Result<Vec<f64>, FsError> {
        Ok(densela::sym_eig(&self.effective_hamiltonian(lam)?)?.values)
    }

    /// Lift `phi` (in the P-basis) to the ambient space through
    /// `Q(lambda) = P - Pperp (Hperp - lambda)^(-1) Pperp H P`.
    pub fn q_operator_apply(&self, lam: f64, phi: &[f64]) -> Result<Vec<f64>, FsError> {
        assert_eq!(phi.len(), self.m);
        let coeffs = self.resolvent_coeffs(lam)?;
        let hqp_phi = self.hqp.matvec(phi);
        let mut y = self.hperp.vectors.transpose().matvec(&hqp_phi);
        for (yi, c) in y.iter_mut().zip(&coeffs) {
            *yi *= c;
        }
        let q_part = self.hperp.vectors.matvec(&y);
        let p_part = self.vp.matvec(phi);
        let perp = self.vq.matvec(&q_part);
        Ok(p_part.iter().zip(&perp).map(|(a, b)| a - b).collect())
    }
}

/// Options for the fixed-point solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveOpts {
    /// Certification parameter a in (0, 1-b).
    pub a: f64,
    /// Certification parameter b in (0, 1).
    pub b: f64,
    /// Solve even when the certificate conditions fail; the trust interval
    /// then falls back to radius `a * gam0`.
    pub force: bool,
    /// Convergence tolerance on `|nu_i(lambda) - lambda|`;
    /// defaults to `1e-12 * max(1, |lam0|)`.
    pub tol: Option<f64>,
    pub max_iter: usize,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts { a: 0.1, b: 0.8, force: false, tol: None, max_iter: 200 }
    }
}

/// One solved eigenvalue branch.
#[derive(Debug, Clone)]
pub struct BranchSolution {
    /// Branch index, 1-based, by ascending order of the branches.
    pub index: usize,
    pub lam: f64,
    pub iterations: usize,
    /// `|nu_i(lam) - lam|` at the returned value.
    pub residual: f64,
    /// Unit-normalized eigenvector of H in the ambient basis.
    pub eigenvector: Vec<f64>,
}

/// Solve the fixed-point equation `nu_i(lambda) = lambda` for branch `i`
/// (1-based) by Picard iteration from `lam0`, with a bisection fallback on
/// `nu_i(lambda) - lambda` over the trust interval.
pub fn solve_fixed_point(
    prob: &PerturbationProblem,
    index: usize,
    opts: &SolveOpts,
) -> Result<BranchSolution, FsError> {
    let m = prob.m;
    if index == 0 || index > m {
        return Err(FsError::BranchIndex { index, m });
    }
    let params = CertifyParams::new(opts.a, opts.b)
        .map_err(|e| DenselaError::InvalidMatrix(e.to_string()))?;
    let cert = certify::check_conditions(prob, &params);
    let radius = if cert.valid {
        cert.r * prob.gam0
    } else if opts.force {
        opts.a * prob.gam0
    } else {
        return Err(FsError::CertificateInvalid);
    };
    let lo = prob.lam0 - radius;
    let hi = prob.lam0 + radius;
    let tol = opts.tol.unwrap_or(1e-12 * prob.lam0.abs().max(1.0));

    let nu = |lam: f64| -> Result<f64, FsError> {
        Ok(prob.branch_eigenvalues(lam)?[index - 1])
    };

    let mut lam = prob.lam0;
    let mut iterations = 0;
    let mut converged = false;
    let mut last_residual = f64::INFINITY;
    while iterations < opts.max_iter {
        let next = nu(lam)?;
        iterations += 1;
        last_residual = (next - lam).abs();
        if !(lo..=hi).contains(&next) {
            return Err(FsError::LeftTrustRegion { lam: next, lo, hi });
        }
        lam = next;
        if last_residual <= tol {
            converged = true;
            break;
        }
    }

    if !converged {
        // nu_i is non-increasing on the trust interval, so g = nu - lambda is
        // strictly decreasing; bisect if the endpoints bracket a root.
        let g_lo = nu(lo)? - lo;
        let g_hi = nu(hi)? - hi;
        iterations += 2;
        if g_lo >= 0.0 && g_hi <= 0.0 {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let gm = nu(mid)? - mid;
                iterations += 1;
                lam = mid;
                last_residual = gm.abs();
                if last_residual <= tol {
                    converged = true;
                    break;
                }
                if gm > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
        }
        if !converged {
            return Err(FsError::NoConvergence { iterations, residual: last_residual });
        }
    }

    let residual = (nu(lam)? - lam).abs();
    let heff = prob.effective_hamiltonian(lam)?;
    let chi = densela::sym_eig(&heff)?.vectors.column(index - 1);
    let mut psi = prob.q_operator_apply(lam, &chi)?;
    let nrm = norm2(&psi);
    for x in &mut psi {
        *x /= nrm;
    }
    Ok(BranchSolution { index, lam, iterations, residual, eigenvector: psi })
}

/// Solve all m branches.
pub fn solve_all_branches(
    prob: &PerturbationProblem,
    opts: &SolveOpts,
) -> Result<Vec<BranchSolution>, FsError> {
    (1..=prob.multiplicity())
        .map(|i| solve_fixed_point(prob, i, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const EPS: f64 = 0.1;

    fn two_by_two() -> PerturbationProblem {
        let h0 = SymMatrix::diag(&[1.0, 2.0]);
        let w = SymMatrix::new(2, vec![0.0, EPS, EPS, 0.0]).unwrap();
        PerturbationProblem::new(h0, w, Lam0Select::Index(0), None).unwrap()
    }

    fn lam1() -> f64 {
        (3.0 - 1.04_f64.sqrt()) / 2.0
    }

    #[test]
    fn problem_assembly() {
        let p = two_by_two();
        assert_eq!(p.multiplicity(), 1);
        assert_eq!(p.lam0(), 1.0);
        assert_eq!(p.gam0(), 1.0);
        assert_eq!(p.lam_star(), 2.0);
    }

    #[test]
    fn rejects_indefinite_h0() {
        let h0 = SymMatrix::diag(&[-1.0, 2.0]);
        let w = SymMatrix::zeros(2);
        assert!(matches!(
            PerturbationProblem::new(h0, w, Lam0Select::Index(0), None),
            Err(FsError::H0NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn feshbach_map_rank_one_schur() {
        let p = two_by_two();
        for lam in [0.7, 0.9, 1.0, 1.3] {
            let f = p.feshbach_map(lam).unwrap();
            let want = (1.0 - lam) - EPS * EPS / (2.0 - lam);
            assert_abs_diff_eq!(f.get(0, 0), want, epsilon = 1e-14);
        }
    }

    #[test]
    fn feshbach_map_vanishes_at_eigenvalue() {
        let p = two_by_two();
        let f = p.feshbach_map(lam1()).unwrap();
        assert!(f.get(0, 0).abs() <= 1e-12);
    }

    #[test]
    fn feshbach_map_unperturbed() {
        let h0 = SymMatrix::diag(&[1.0, 2.0]);
        let w = SymMatrix::zeros(2);
        let p = PerturbationProblem::new(h0, w, Lam0Select::Index(0), None).unwrap();
        for lam in [0.5, 0.9, 1.2] {
            assert_abs_diff_eq!(p.feshbach_map(lam).unwrap().get(0, 0), 1.0 - lam, epsilon = 1e-14);
        }
    }

    #[test]
    fn effective_interaction_values() {
        let p = two_by_two();
        let u = p.effective_interaction(1.0).unwrap();
        assert_abs_diff_eq!(u.get(0, 0), -0.01, epsilon = 1e-15);

        let pz = PerturbationProblem::new(
            SymMatrix::diag(&[1.0, 2.0]),
            SymMatrix::zeros(2),
            Lam0Select::Index(0),
            None,
        )
        .unwrap();
        assert_eq!(pz.effective_interaction(1.1).unwrap().get(0, 0), 0.0);
    }

    #[test]
    fn effective_hamiltonian_values() {
        let p = two_by_two();
        let h = p.effective_hamiltonian(1.0).unwrap();
        assert_abs_diff_eq!(h.get(0, 0), 0.99, epsilon = 1e-15);
        // defining identity, exact
        for lam in [0.8, 1.0, 1.05] {
            let f = p.feshbach_map(lam).unwrap();
            let h = p.effective_hamiltonian(lam).unwrap();
            assert!((h.get(0, 0) - lam - f.get(0, 0)).abs() <= 1e-14);
        }
    }

    #[test]
    fn branch_eigenvalues_ordered() {
        let p = two_by_two();
        let nus = p.branch_eigenvalues(1.0).unwrap();
        assert_eq!(nus.len(), 1);
        assert_abs_diff_eq!(nus[0], 0.99, epsilon = 1e-15);
    }

    #[test]
    fn resolvent_singularity_detected() {
        let p = two_by_two();
        // Hperp for this fixture is the 1x1 block [2.0]
        assert!(matches!(
            p.feshbach_map(2.0 - 1e-14),
            Err(FsError::ResolventSingular { .. })
        ));
        assert!(p.feshbach_map(2.0 - 1e-6).is_ok());
    }

    #[test]
    fn fixed_point_closed_form() {
        let p = two_by_two();
        let opts = SolveOpts { a: 0.1, b: 0.1, ..Default::default() };
        let sol = solve_fixed_point(&p, 1, &opts).unwrap();
        assert_abs_diff_eq!(sol.lam, lam1(), epsilon = 1e-12);
        assert!(sol.residual <= 1e-12);
        assert_abs_diff_eq!(norm2(&sol.eigenvector), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fixed_point_unperturbed_one_iteration() {
        let h0 = SymMatrix::diag(&[1.0, 2.0, 3.0]);
        let w = SymMatrix::zeros(3);
        let p = PerturbationProblem::new(h0, w, Lam0Select::Index(1), None).unwrap();
        let sol = solve_fixed_point(&p, 1, &SolveOpts::default()).unwrap();
        assert_eq!(sol.lam, 2.0);
        assert_eq!(sol.iterations, 1);
    }

    #[test]
    fn branch_index_validation() {
        let p = two_by_two();
        assert!(matches!(
            solve_fixed_point(&p, 0, &SolveOpts::default()),
            Err(FsError::BranchIndex { .. })
        ));
        assert!(matches!(
            solve_fixed_point(&p, 2, &SolveOpts::default()),
            Err(FsError::BranchIndex { .. })
        ));
    }

    #[test]
    fn q_operator_closed_form() {
        let p = two_by_two();
        let l1 = lam1();
        let psi = p.q_operator_apply(l1, &[1.0]).unwrap();
        assert_abs_diff_eq!(psi[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(psi[1], -EPS / (2.0 - l1), epsilon = 1e-12);
    }

    #[test]
    fn q_operator_unperturbed_embeds() {
        let h0 = SymMatrix::diag(&[1.0, 2.0]);
        let w = SymMatrix::zeros(2);
        let p = PerturbationProblem::new(h0, w, Lam0Select::Index(0), None).unwrap();
        let psi = p.q_operator_apply(1.2, &[1.0]).unwrap();
        assert_eq!(psi, vec![1.0, 0.0]);
    }

    #[test]
    fn eigen_residual_after_solve() {
        let p = two_by_two();
        let opts = SolveOpts { a: 0.1, b: 0.1, ..Default::default() };
        let sol = solve_fixed_point(&p, 1, &opts).unwrap();
        let h = p.h0().add(p.w());
        let hpsi = h.apply(&sol.eigenvector);
        let mut res = 0.0_f64;
        for i in 0..2 {
            res += (hpsi[i] - sol.lam * sol.eigenvector[i]).powi(2);
        }
        assert!(res.sqrt() <= 1e-9 * h.inf_norm());
    }

    /// Deterministic 8x8 instance: fixed entries, no RNG. The fixed points
    /// must match a direct eigendecomposition of H.
    #[test]
    fn random_instance_matches_brute_force() {
        let n = 8;
        let h0 = SymMatrix::diag(&[1.0, 1.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0]);
        // small symmetric coupling, deterministic pattern
        let w = SymMatrix::from_fn(n, |i, j| {
            let t = ((i * 7 + j * 3 + 1) % 11) as f64 / 11.0 - 0.5;
            0.02 * t
        });
        let p = PerturbationProblem::new(h0.clone(), w.clone(), Lam0Select::Index(0), None).unwrap();
        assert_eq!(p.multiplicity(), 2);
        let opts = SolveOpts { a: 0.1, b: 0.8, ..Default::default() };
        let brute = densela::sym_eig(&h0.add(&w)).unwrap().values;
        for i in 1..=2 {
            let sol = solve_fixed_point(&p, i, &opts).unwrap();
            assert_abs_diff_eq!(sol.lam, brute[i - 1], epsilon = 1e-10);
        }
    }

    #[test]
    fn degenerate_cluster_merging() {
        let h0 = SymMatrix::diag(&[2.0, 2.0 + 1e-12, 5.0]);
        let w = SymMatrix::zeros(3);
        let p = PerturbationProblem::new(h0, w, Lam0Select::Index(0), None).unwrap();
        assert_eq!(p.multiplicity(), 2);
        assert_abs_diff_eq!(p.gam0(), 3.0, epsilon = 1e-9);
    }

    #[test]
    fn select_by_value() {
        let h0 = SymMatrix::diag(&[1.0, 4.0, 9.0]);
        let w = SymMatrix::zeros(3);
        let p = PerturbationProblem::new(h0, w, Lam0Select::Value(4.0), None).unwrap();
        assert_eq!(p.lam0(), 4.0);
        assert_eq!(p.gam0(), 3.0);
        assert!(PerturbationProblem::new(
            SymMatrix::diag(&[1.0, 4.0]),
            SymMatrix::zeros(2),
            Lam0Select::Value(2.5),
            None
        )
        .is_err());
    }
}
