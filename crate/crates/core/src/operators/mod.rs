//! Galerkin discretisation of the aperture operators and the parity-reduced
//! block systems.

pub mod basis;

use num_complex::Complex64;

pub use basis::ApertureBasis;

use crate::error::{Error, Result};
use crate::greens::KernelSet;
use crate::linalg::{condition_number, eig2, overlap, spectral_norm, to_complex, CMat, GuardedLu, Mat2, RMat};

/// Largest admissible condition number of a block operator.
pub const BLOCK_COND_GUARD: f64 = 1e10;
/// Largest admissible condition number of the reference matrix `Q̂`.
pub const REFERENCE_COND_GUARD: f64 = 1e8;
/// Reference constants tried in order.
pub const BETA0_CANDIDATES: [f64; 6] = [0.0, 1.0, -2.0, -1.0, 2.0, 3.0];
/// Minimum angular separation between eigenvector-branch assignments.
pub const BRANCH_ANGLE_GUARD: f64 = 10.0 * std::f64::consts::PI / 180.0;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Even (`+`) or odd (`−`) combination of the top and bottom apertures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Parity {
    #[serde(rename = "+")]
    Even,
    #[serde(rename = "-")]
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// Parity of the slit mode `m` resonance family.
    pub fn for_mode(m: u32) -> Self {
        if m % 2 == 1 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "+",
            Parity::Odd => "-",
        }
    }
}

/// Remainder-kernel Galerkin matrices and constants at one `(κ, k)`.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub kappa: f64,
    pub k: Complex64,
    pub eps: f64,
    pub beta_e: Complex64,
    pub beta_i: Complex64,
    pub beta_tilde: Complex64,
    /// `S^∞`: same-slit exterior plus interior remainders.
    pub same: CMat,
    /// `S^{∞,−}` with kernel `r_e(X − Y − ℓ)`.
    pub minus: CMat,
    /// `S^{∞,+}` with kernel `r_e(X − Y + ℓ)`.
    pub plus: CMat,
    /// `S̃^∞`.
    pub cross: CMat,
}

/// Galerkin matrices of `S^∞`, `S^{∞,±}` and `S̃^∞`.
pub fn assemble_sinf(ks: &KernelSet, basis: &ApertureBasis) -> OperatorSet {
    let n = basis.n;
    let eps = ks.cfg.aperture;
    let ell = basis.separation;
    let ext = &ks.exterior;

    let mut same = CMat::zeros(n, n);
    let mut minus = CMat::zeros(n, n);
    let mut plus = CMat::zeros(n, n);
    for (wavenumber, coeff) in ext.separable_terms() {
        let f = basis.exp_moments(wavenumber * eps);
        let shift = Complex64::from_polar(1.0, wavenumber * eps * ell);
        for i in 0..n {
            for j in 0..n {
                let v = coeff * f[i] * f[j].conj();
                same[(i, j)] += v;
                minus[(i, j)] += v / shift;
                plus[(i, j)] += v * shift;
            }
        }
    }
    let p_beta = ks.beta_e() * std::f64::consts::PI * std::f64::consts::PI;
    for m in [&mut same, &mut minus, &mut plus] {
        m[(0, 0)] -= p_beta;
    }
    same += basis.galerkin(|x, y| ext.nonseparable(x - y, true));
    minus += basis.galerkin(|x, y| ext.nonseparable(x - y - ell, true));
    plus += basis.galerkin(|x, y| ext.nonseparable(x - y + ell, true));

    let int = &ks.interior;
    let mut cross = CMat::zeros(n, n);
    for (row, (dm, xm)) in int.same_modes.iter().zip(&int.cross_modes).enumerate() {
        let c = basis.modes.row(row);
        for i in 0..n {
            for j in 0..n {
                let cc = c[i] * c[j] * (2.0 / eps);
                same[(i, j)] += dm * cc;
                cross[(i, j)] += xm * cc;
            }
        }
    }
    for (coeff, w) in int.tail.iter().zip(&basis.tails) {
        same += to_complex(w) * *coeff;
    }

    OperatorSet {
        kappa: ks.kappa,
        k: ks.k,
        eps,
        beta_e: ks.beta_e(),
        beta_i: ks.beta_i(),
        beta_tilde: ks.beta_tilde(),
        same,
        minus,
        plus,
        cross,
    }
}

impl OperatorSet {
    pub fn new(ks: &KernelSet, basis: &ApertureBasis) -> Self {
        assemble_sinf(ks, basis)
    }

    /// Spectral norms of `S^∞`, `S^{∞,−}`, `S^{∞,+}` and `S̃^∞`.
    pub fn remainder_norms(&self) -> [f64; 4] {
        [
            spectral_norm(&self.same),
            spectral_norm(&self.minus),
            spectral_norm(&self.plus),
            spectral_norm(&self.cross),
        ]
    }

    /// Block operator `𝕃_σ = 𝕊 + 𝕊^∞_σ`.
    pub fn block_operator(&self, basis: &ApertureBasis, beta0: f64, parity: Parity) -> CMat {
        let n = basis.n;
        let mut diag = to_complex(&(&basis.s + basis.projector() * beta0)) + &self.same;
        diag += &self.cross * Complex64::new(parity.sign(), 0.0);
        let off_minus = to_complex(&basis.s_minus) + &self.minus;
        let off_plus = to_complex(&basis.s_plus) + &self.plus;
        let mut l = CMat::zeros(2 * n, 2 * n);
        l.view_mut((0, 0), (n, n)).copy_from(&diag);
        l.view_mut((n, n), (n, n)).copy_from(&diag);
        l.view_mut((0, n), (n, n)).copy_from(&off_minus);
        l.view_mut((n, 0), (n, n)).copy_from(&off_plus);
        l
    }

    /// Full `4N × 4N` Galerkin matrix of the coupled aperture system.
    pub fn full_operator(&self, basis: &ApertureBasis) -> CMat {
        let n = basis.n;
        let p = to_complex(&basis.projector());
        let diag = &p * (self.beta_e + self.beta_i) + to_complex(&basis.s) + &self.same;
        let off_minus = &p * self.beta_e + to_complex(&basis.s_minus) + &self.minus;
        let off_plus = &p * self.beta_e + to_complex(&basis.s_plus) + &self.plus;
        let cross = &p * self.beta_tilde + &self.cross;
        let mut t = CMat::zeros(4 * n, 4 * n);
        for blk in 0..2 {
            let o = 2 * n * blk;
            t.view_mut((o, o), (n, n)).copy_from(&diag);
            t.view_mut((o + n, o + n), (n, n)).copy_from(&diag);
            t.view_mut((o, o + n), (n, n)).copy_from(&off_minus);
            t.view_mut((o + n, o), (n, n)).copy_from(&off_plus);
        }
        for s in 0..2 {
            let (r, c) = (s * n, 2 * n + s * n);
            t.view_mut((r, c), (n, n)).copy_from(&cross);
            t.view_mut((c, r), (n, n)).copy_from(&cross);
        }
        t
    }
}

/// Right-hand sides `e_1`, `e_2` (constant density on one slit block).
pub fn indicator_rhs(n: usize) -> CMat {
    let mut e = CMat::zeros(2 * n, 2);
    e[(0, 0)] = Complex64::new(std::f64::consts::PI, 0.0);
    e[(n, 1)] = Complex64::new(std::f64::consts::PI, 0.0);
    e
}

/// `⟨x, e_1⟩`, `⟨x, e_2⟩` for a block coefficient vector.
pub fn block_moments(x: &CMat, col: usize, n: usize) -> [Complex64; 2] {
    let pi = std::f64::consts::PI;
    [x[(0, col)] * pi, x[(n, col)] * pi]
}

/// The `ε`- and `k`-independent reference problem built from `𝕊`.
#[derive(Debug, Clone)]
pub struct ReferenceSystem {
    pub beta0: f64,
    pub q_hat: [[f64; 2]; 2],
    pub alpha: f64,
    pub alpha_tilde: f64,
    pub cond: f64,
}

/// `α`, `α̃` and `Q̂` for a given reference constant.
pub fn compute_alpha(basis: &ApertureBasis, beta0: f64) -> Result<ReferenceSystem> {
    let n = basis.n;
    let diag = &basis.s + basis.projector() * beta0;
    let mut s = RMat::zeros(2 * n, 2 * n);
    s.view_mut((0, 0), (n, n)).copy_from(&diag);
    s.view_mut((n, n), (n, n)).copy_from(&diag);
    s.view_mut((0, n), (n, n)).copy_from(&basis.s_minus);
    s.view_mut((n, 0), (n, n)).copy_from(&basis.s_plus);
    let lu = GuardedLu::new(&to_complex(&s), BLOCK_COND_GUARD)?;
    let x = lu.solve(&indicator_rhs(n))?;
    let m1 = block_moments(&x, 0, n);
    let m2 = block_moments(&x, 1, n);
    let q_hat = [[m1[0].re, m2[0].re], [m1[1].re, m2[1].re]];
    let qc = [
        [Complex64::new(q_hat[0][0], 0.0), Complex64::new(q_hat[0][1], 0.0)],
        [Complex64::new(q_hat[1][0], 0.0), Complex64::new(q_hat[1][1], 0.0)],
    ];
    let cond = condition_number(&CMat::from_fn(2, 2, |i, j| qc[i][j]));
    if !cond.is_finite() || cond >= REFERENCE_COND_GUARD {
        return Err(Error::SingularReference { beta0, cond });
    }
    Ok(ReferenceSystem {
        beta0,
        alpha: 0.5 * (q_hat[0][0] + q_hat[1][1]),
        alpha_tilde: 0.5 * (q_hat[0][1] + q_hat[1][0]),
        q_hat,
        cond,
    })
}

/// First reference constant from [`BETA0_CANDIDATES`] accepted by `accept`.
pub fn choose_beta0_with<F: Fn(&ReferenceSystem) -> bool>(basis: &ApertureBasis, accept: F) -> Result<ReferenceSystem> {
    let mut last = None;
    for &beta0 in &BETA0_CANDIDATES {
        match compute_alpha(basis, beta0) {
            Ok(r) if accept(&r) => return Ok(r),
            Ok(r) => last = Some(Error::SingularReference { beta0, cond: r.cond }),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(Error::SingularReference { beta0: 0.0, cond: f64::INFINITY }))
}

pub fn choose_beta0(basis: &ApertureBasis) -> Result<ReferenceSystem> {
    choose_beta0_with(basis, |_| true)
}

/// Eigen-pair of `𝕄_σ` labelled by its branch.
#[derive(Debug, Clone, Copy)]
pub struct Branch {
    pub lambda: Complex64,
    pub vector: [Complex64; 2],
}

/// Parity-reduced system at one `(κ, k)`.
pub struct ReducedSystem {
    pub parity: Parity,
    pub eps: f64,
    pub beta0: f64,
    pub n: usize,
    pub lu: GuardedLu,
    /// `𝕃_σ^{-1} e_1`, `𝕃_σ^{-1} e_2` as columns.
    pub l_inv_e: CMat,
    pub q: Mat2,
    pub b: Mat2,
    pub m: Mat2,
    /// Branches ordered `j = 1` (near `[1, 1]`) then `j = 2` (near `[1, −1]`).
    pub branches: [Branch; 2],
    /// Angle gap between the two candidate assignments.
    pub branch_gap: f64,
}

impl std::fmt::Debug for ReducedSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReducedSystem")
            .field("parity", &self.parity)
            .field("q", &self.q)
            .field("m", &self.m)
            .field("branches", &self.branches)
            .finish()
    }
}

pub fn coupling_matrix(ops: &OperatorSet, beta0: f64, parity: Parity) -> Mat2 {
    let beta = ops.beta_e + ops.beta_i - beta0;
    let diag = beta + ops.beta_tilde * parity.sign();
    [[diag, ops.beta_e], [ops.beta_e, diag]]
}

/// `ε(Q B + I)` for arbitrary `Q`.
pub fn scaled_system(q: &Mat2, b: &Mat2, eps: f64) -> Mat2 {
    let qb = crate::linalg::mat2_mul(q, b);
    [[(qb[0][0] + ONE) * eps, qb[0][1] * eps], [qb[1][0] * eps, (qb[1][1] + ONE) * eps]]
}

fn angle_to(v: &[Complex64; 2], t: &[Complex64; 2]) -> f64 {
    overlap(v, t).clamp(0.0, 1.0).acos()
}

/// Order the two eigen-pairs by their proximity to `[1, 1]`.
pub fn order_branches(m: &Mat2) -> ([Branch; 2], f64) {
    let pairs = eig2(m);
    let sym = [ONE, ONE];
    let a0 = angle_to(&pairs[0].1, &sym);
    let a1 = angle_to(&pairs[1].1, &sym);
    let (first, second) = if a0 <= a1 { (pairs[0], pairs[1]) } else { (pairs[1], pairs[0]) };
    (
        [
            Branch { lambda: first.0, vector: first.1 },
            Branch { lambda: second.0, vector: second.1 },
        ],
        (a0 - a1).abs(),
    )
}

pub fn build_reduced(ops: &OperatorSet, basis: &ApertureBasis, beta0: f64, parity: Parity) -> Result<ReducedSystem> {
    let n = basis.n;
    let l = ops.block_operator(basis, beta0, parity);
    let lu = GuardedLu::new(&l, BLOCK_COND_GUARD)?;
    let l_inv_e = lu.solve(&indicator_rhs(n))?;
    let m1 = block_moments(&l_inv_e, 0, n);
    let m2 = block_moments(&l_inv_e, 1, n);
    let q = [[m1[0], m2[0]], [m1[1], m2[1]]];
    let b = coupling_matrix(ops, beta0, parity);
    let m = scaled_system(&q, &b, ops.eps);
    let (branches, branch_gap) = order_branches(&m);
    Ok(ReducedSystem { parity, eps: ops.eps, beta0, n, lu, l_inv_e, q, b, m, branches, branch_gap })
}

impl ReducedSystem {
    /// Branch `j ∈ {1, 2}`, optionally tracked by overlap with a previous
    /// eigenvector instead of the fixed targets.
    pub fn branch(&self, j: usize, previous: Option<&[Complex64; 2]>) -> Result<Branch> {
        assert!(j == 1 || j == 2, "branch index must be 1 or 2");
        if let Some(prev) = previous {
            let o0 = overlap(&self.branches[0].vector, prev);
            let o1 = overlap(&self.branches[1].vector, prev);
            let gap = (o0.clamp(0.0, 1.0).acos() - o1.clamp(0.0, 1.0).acos()).abs();
            if gap < BRANCH_ANGLE_GUARD {
                return Err(Error::BranchAmbiguity(o0, o1));
            }
            return Ok(if o0 >= o1 { self.branches[0] } else { self.branches[1] });
        }
        if self.branch_gap < BRANCH_ANGLE_GUARD {
            let t = [ONE, ONE];
            return Err(Error::BranchAmbiguity(
                overlap(&self.branches[0].vector, &t),
                overlap(&self.branches[1].vector, &t),
            ));
        }
        Ok(self.branches[j - 1])
    }

    /// Surrogate `M̂ = ε(Q̂ B + I)` with the same coupling matrix.
    pub fn surrogate(&self, reference: &ReferenceSystem) -> Mat2 {
        let q = reference.q_hat;
        let qc = [
            [Complex64::new(q[0][0], 0.0), Complex64::new(q[0][1], 0.0)],
            [Complex64::new(q[1][0], 0.0), Complex64::new(q[1][1], 0.0)],
        ];
        scaled_system(&qc, &self.b, self.eps)
    }

    /// `⟨𝕃_σ^{-1} f, e_i⟩` together with `𝕃_σ^{-1} f`.
    pub fn apply_inverse(&self, rhs: &CMat) -> Result<(CMat, [Complex64; 2])> {
        let x = self.lu.solve(rhs)?;
        let g = block_moments(&x, 0, self.n);
        Ok((x, g))
    }
}

/// Closed-form eigenvalues of the symmetric surrogate.
pub fn surrogate_eigenvalues(reference: &ReferenceSystem, b: &Mat2, eps: f64) -> [Complex64; 2] {
    let (q, qt) = (reference.alpha, reference.alpha_tilde);
    let (bd, bo) = (b[0][0], b[0][1]);
    [eps + eps * (bd + bo) * (q + qt), eps + eps * (bd - bo) * (q - qt)]
}

/// `|λ_j − λ̂_j| / (τ|λ̂_j| + ετ)` for `M = ε((Q̂ + ΔQ)B + I)` against
/// `M̂ = ε(Q̂B + I)`, with `τ = ‖ΔQ‖₂` and branches matched by eigenvector.
pub fn perturbation_ratios(q_hat: &Mat2, delta_q: &Mat2, b: &Mat2, eps: f64) -> [f64; 2] {
    let dq = CMat::from_fn(2, 2, |i, j| delta_q[i][j]);
    let tau = spectral_norm(&dq);
    let q = [
        [q_hat[0][0] + delta_q[0][0], q_hat[0][1] + delta_q[0][1]],
        [q_hat[1][0] + delta_q[1][0], q_hat[1][1] + delta_q[1][1]],
    ];
    let (exact, _) = order_branches(&scaled_system(&q, b, eps));
    let (approx, _) = order_branches(&scaled_system(q_hat, b, eps));
    [0, 1].map(|j| (exact[j].lambda - approx[j].lambda).norm() / (tau * approx[j].lambda.norm() + eps * tau))
}

/// Geometry, Galerkin basis and reference constant shared by every solve.
#[derive(Debug, Clone)]
pub struct Discretisation {
    pub cfg: crate::domain::GratingConfig,
    pub basis: ApertureBasis,
    pub reference: ReferenceSystem,
    /// Truncation tolerance of the lattice sums.
    pub series_tol: f64,
}

impl Discretisation {
    pub fn new(cfg: &crate::domain::GratingConfig, n_basis: usize, n_quad: usize) -> Result<Self> {
        cfg.validate()?;
        let basis = ApertureBasis::new(n_basis, n_quad, cfg.separation)?;
        let reference = choose_beta0(&basis)?;
        Ok(Self { cfg: *cfg, basis, reference, series_tol: crate::greens::SERIES_TOL })
    }

    pub fn with_defaults(cfg: &crate::domain::GratingConfig) -> Result<Self> {
        Self::new(cfg, basis::DEFAULT_BASIS, basis::DEFAULT_QUADRATURE)
    }

    /// Same basis with a fixed reference constant.
    pub fn with_beta0(&self, beta0: f64) -> Result<Self> {
        let reference = compute_alpha(&self.basis, beta0)?;
        Ok(Self { reference, ..self.clone() })
    }

    /// Same separation and basis at a different aperture.
    pub fn with_aperture(&self, aperture: f64) -> Result<Self> {
        Ok(Self { cfg: self.cfg.with_aperture(aperture)?, ..self.clone() })
    }

    /// Same discretisation with a different lattice-sum tolerance.
    pub fn with_series_tol(&self, series_tol: f64) -> Result<Self> {
        if !(series_tol > 0.0 && series_tol < 1.0) {
            return Err(Error::InvalidConfig(format!("series tolerance {series_tol} outside (0, 1)")));
        }
        Ok(Self { series_tol, ..self.clone() })
    }

    pub fn beta0(&self) -> f64 {
        self.reference.beta0
    }

    pub fn kernels(&self, kappa: f64, k: Complex64) -> Result<KernelSet> {
        KernelSet::with_tolerance(&self.cfg, kappa, k, self.series_tol)
    }

    pub fn operators(&self, kappa: f64, k: Complex64) -> Result<OperatorSet> {
        Ok(OperatorSet::new(&self.kernels(kappa, k)?, &self.basis))
    }

    pub fn reduced(&self, kappa: f64, k: Complex64, parity: Parity) -> Result<ReducedSystem> {
        build_reduced(&self.operators(kappa, k)?, &self.basis, self.beta0(), parity)
    }
}
