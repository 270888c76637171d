//! Single-qudit density matrices and two-qudit pure states.
//!
//! A single qudit is described by its purity vector `q q_hat`:
//!
//! ```text
//! rho = 1/d + q sqrt((d-1)/d) q_hat.T,     Tr[rho^2] = q^2 + (1 - q^2)/d
//! ```
//!
//! A two-qudit pure state is a `d_A x d_B` coefficient matrix `alpha`
//! (`d_A <= d_B`) with Schmidt form `alpha = e^{i phi} S_A [Q 0] S_B^T`,
//! `S_A, S_B` special unitary and `Q` real non-negative diagonal.
//!
//! # Schmidt gauge
//!
//! The singular value decomposition is not unique. [`schmidt_decompose`] fixes
//! it as follows so that results are reproducible:
//!
//! 1. Singular values are sorted non-increasing; ties keep their index order.
//! 2. Within each cluster of equal singular values the left vectors are the
//!    Gram-Schmidt image of the standard basis `e_0, e_1, ..` projected onto the
//!    cluster subspace. Each vector therefore has a real positive pivot entry.
//! 3. Right vectors follow from `alpha`; rows of `S_B^T` that multiply zero
//!    singular values are completed from the standard basis.
//! 4. When free vectors exist (zero singular values or `d_B > d_A`), the last
//!    one absorbs the determinant phase of its factor. Any remaining
//!    determinant phase `delta` of `S_A` or `S_B` is removed as the scalar
//!    `e^{-i delta/d}` and moved into the global phase `phi`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::GeneratorBasis;
use crate::linalg::{ensure_unitary, hermitian_eigen, trace, trace_of_product};
use crate::{CMatrix, Error, Result, C64};

/// Eigenvalues above `-POSITIVITY_FLOOR` count as non-negative.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

const NORM_TOLERANCE: f64 = 1e-10;
const CLUSTER_TOLERANCE: f64 = 1e-9;
const ZERO_SINGULAR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QuditDensity {
    d: usize,
    rho: CMatrix,
    q: f64,
    q_hat: DVector<f64>,
}

/// Density matrix `1/d + q sqrt((d-1)/d) q_hat.T`.
pub fn density_from_purity(
    d: usize,
    q: f64,
    q_hat: &DVector<f64>,
    basis: &GeneratorBasis,
) -> Result<QuditDensity> {
    if basis.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: basis.dim(),
            context: "generator basis",
        });
    }
    if q_hat.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: q_hat.len(),
            context: "purity direction",
        });
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::PurityOutOfRange(q));
    }
    let norm = q_hat.norm();
    if q > 0.0 && (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitDirection(norm));
    }
    let weight = q * ((d - 1) as f64 / d as f64).sqrt();
    let rho = CMatrix::identity(d, d) * C64::from(1.0 / d as f64)
        + basis.combine(q_hat.as_slice()) * C64::from(weight);
    let (eigenvalues, _) = hermitian_eigen(&rho);
    if let Some(&min) = eigenvalues.first() {
        if min < -POSITIVITY_FLOOR {
            return Err(Error::NegativeEigenvalue { eigenvalue: min });
        }
    }
    Ok(QuditDensity {
        d,
        rho,
        q,
        q_hat: q_hat.clone(),
    })
}

impl QuditDensity {
    /// Recover `q` and `q_hat` from a Hermitian unit-trace PSD matrix.
    /// For the maximally mixed state the direction is the first generator.
    pub fn from_matrix(rho: CMatrix, basis: &GeneratorBasis) -> Result<Self> {
        let d = rho.nrows();
        if basis.dim() != d || !rho.is_square() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: d,
                context: "density matrix",
            });
        }
        let tr = trace(&rho);
        if (tr - C64::from(1.0)).norm() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm: tr.re });
        }
        let (eigenvalues, _) = hermitian_eigen(&rho);
        if eigenvalues[0] < -POSITIVITY_FLOOR {
            return Err(Error::NegativeEigenvalue {
                eigenvalue: eigenvalues[0],
            });
        }
        let components = basis.components(&rho);
        let weight = ((d - 1) as f64 / d as f64).sqrt();
        let q = (components.norm() / weight).min(1.0);
        let q_hat = if components.norm() > 1e-14 {
            components.normalize()
        } else {
            let mut e = DVector::zeros(basis.len());
            e[0] = 1.0;
            e
        };
        Ok(Self { d, rho, q, q_hat })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn q_hat(&self) -> &DVector<f64> {
        &self.q_hat
    }

    pub fn purity(&self) -> f64 {
        trace_of_product(&self.rho, &self.rho).re
    }

    /// Purity scalar recovered from `Tr[rho^2] = q^2 + (1 - q^2)/d`.
    pub fn purity_scalar(&self) -> f64 {
        let d = self.d as f64;
        ((d * self.purity() - 1.0) / (d - 1.0)).max(0.0).sqrt()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.rho).0
    }

    /// Diagonal profile `x_n = <n| q_hat.H |n>`. Fails when `q_hat` leaves the
    /// Cartan sector.
    pub fn diagonal_profile(&self, basis: &GeneratorBasis) -> Result<DiagonalProfile> {
        DiagonalProfile::from_direction(basis, &self.q_hat)
    }
}

/// Diagonal weights `x_n` of a Cartan-sector purity direction, with
/// `sum x_n = 0` and `sum x_n^2 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalProfile {
    x: Vec<f64>,
}

impl DiagonalProfile {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        let sum: f64 = x.iter().sum();
        let sum_sq: f64 = x.iter().map(|v| v * v).sum();
        if x.len() < 2 || sum.abs() > 1e-10 || (sum_sq - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidProfile { sum, sum_sq });
        }
        Ok(Self { x })
    }

    /// `(1, -1)/sqrt(2)`: the qubit profile of `q_hat = (1, 0, 0)`.
    pub fn qubit() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { x: vec![s, -s] }
    }

    /// Qutrit profile of `q_hat = (cos theta, sin theta, 0, ..)`:
    /// `sqrt(2/3) (cos(theta + 2pi/3), cos(theta + 4pi/3), cos theta)`.
    pub fn qutrit(theta: f64) -> Self {
        use std::f64::consts::PI;
        let s = (2.0f64 / 3.0).sqrt();
        Self {
            x: vec![
                s * (theta + 2.0 * PI / 3.0).cos(),
                s * (theta + 4.0 * PI / 3.0).cos(),
                s * theta.cos(),
            ],
        }
    }

    pub fn from_direction(basis: &GeneratorBasis, q_hat: &DVector<f64>) -> Result<Self> {
        let d = basis.dim();
        let mut x = vec![0.0; d];
        for beta in 0..d - 1 {
            for (n, h) in basis.cartan_diagonal(beta).into_iter().enumerate() {
                x[n] += q_hat[beta] * h;
            }
        }
        Self::new(x)
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Admissible half-width `theta_0(q)` of the qutrit angle domain.
pub fn qutrit_theta_bound(q: f64) -> Result<f64> {
    use std::f64::consts::PI;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::PurityOutOfRange(q));
    }
    if q <= 0.5 {
        Ok(PI / 3.0)
    } else {
        Ok((-1.0 / (2.0 * q)).acos() - 2.0 * PI / 3.0)
    }
}

/// Two-qudit pure state as its `d_A x d_B` amplitude matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    alpha: CMatrix,
}

impl CoefficientMatrix {
    pub fn new(alpha: CMatrix) -> Result<Self> {
        let (d_a, d_b) = alpha.shape();
        if d_a > d_b {
            return Err(Error::RowsExceedColumns { d_a, d_b });
        }
        if d_a < 2 {
            return Err(Error::InvalidDimension(d_a));
        }
        let norm = alpha.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { alpha })
    }

    /// Scale `alpha` to unit norm first.
    pub fn normalized(alpha: CMatrix) -> Result<Self> {
        let norm = alpha.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(alpha / C64::from(norm))
    }

    /// `sum_n c_n |n n>` embedded in a `d_A x d_B` matrix.
    pub fn diagonal(coefficients: &[f64], d_b: usize) -> Result<Self> {
        let d_a = coefficients.len();
        let mut alpha = CMatrix::zeros(d_a, d_b.max(d_a));
        for (n, &c) in coefficients.iter().enumerate() {
            alpha[(n, n)] = C64::from(c);
        }
        Self::new(alpha)
    }

    pub fn d_a(&self) -> usize {
        self.alpha.nrows()
    }

    pub fn d_b(&self) -> usize {
        self.alpha.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.alpha
    }

    /// `<self|other> = Tr[alpha^dagger beta]`.
    pub fn inner(&self, other: &CoefficientMatrix) -> C64 {
        trace_of_product(&self.alpha.adjoint(), &other.alpha)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.alpha
            .iter()
            .enumerate()
            .all(|(k, z)| k % self.d_a() == k / self.d_a() || z.norm() <= tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtForm {
    pub phi: f64,
    pub s_a: CMatrix,
    pub s_b: CMatrix,
    /// Diagonal of `Q`, non-increasing.
    pub q: DVector<f64>,
}

impl SchmidtForm {
    /// Rectangular `K = [Q 0]`.
    pub fn k(&self) -> CMatrix {
        let (d_a, d_b) = (self.s_a.nrows(), self.s_b.nrows());
        let mut k = CMatrix::zeros(d_a, d_b);
        for (n, &v) in self.q.iter().enumerate() {
            k[(n, n)] = C64::from(v);
        }
        k
    }

    pub fn reconstruct(&self) -> CMatrix {
        &self.s_a * self.k() * self.s_b.transpose() * C64::from_polar(1.0, self.phi)
    }

    /// `Q^2` as a real diagonal.
    pub fn q_squared(&self) -> Vec<f64> {
        self.q.iter().map(|v| v * v).collect()
    }
}

fn standard(d: usize, j: usize) -> DVector<C64> {
    let mut e = DVector::zeros(d);
    e[j] = C64::from(1.0);
    e
}

/// Extend `vectors` by Gram-Schmidt over `candidates` until `target` vectors
/// are present. Candidates are taken in order.
fn extend_orthonormal(
    vectors: &mut Vec<DVector<C64>>,
    candidates: impl Iterator<Item = DVector<C64>>,
    target: usize,
) {
    for mut w in candidates {
        if vectors.len() >= target {
            break;
        }
        for _ in 0..2 {
            for v in vectors.iter() {
                let c = v.dotc(&w);
                w -= v * c;
            }
        }
        let n = w.norm();
        if n > 1e-6 {
            vectors.push(w / C64::from(n));
        }
    }
}

fn from_columns(cols: &[DVector<C64>]) -> CMatrix {
    let d = cols[0].len();
    CMatrix::from_fn(d, cols.len(), |r, c| cols[c][r])
}

/// Gauge-fixed singular value decomposition `alpha = e^{i phi} S_A K S_B^T`.
pub fn schmidt_decompose(alpha: &CoefficientMatrix) -> SchmidtForm {
    let a = alpha.matrix();
    let (d_a, d_b) = a.shape();
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..d_a).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();

    // left vectors, canonical within each cluster of equal singular values
    let mut left: Vec<DVector<C64>> = Vec::with_capacity(d_a);
    let mut start = 0;
    while start < d_a {
        let mut end = start + 1;
        while end < d_a && (sigma[start] - sigma[end]).abs() <= CLUSTER_TOLERANCE {
            end += 1;
        }
        let mut projector = CMatrix::zeros(d_a, d_a);
        for &i in &order[start..end] {
            let col = u.column(i);
            projector += col * col.adjoint();
        }
        let mut cluster = Vec::new();
        let candidates = (0..d_a).map(|j| &projector * standard(d_a, j));
        // orthogonalise against earlier clusters too, to absorb rounding
        let mut all = left.clone();
        let before = all.len();
        extend_orthonormal(&mut all, candidates, before + (end - start));
        cluster.extend(all.drain(before..));
        left.extend(cluster);
        start = end;
    }
    // rounding can starve a cluster; complete from the standard basis
    let lefts_found = left.len();
    if lefts_found < d_a {
        extend_orthonormal(&mut left, (0..d_a).map(|j| standard(d_a, j)), d_a);
    }

    // rows of S_B^T stored as vectors r with (S_B^T)_{k m} = r_k[m]
    let mut rows: Vec<DVector<C64>> = Vec::with_capacity(d_b);
    let rank = sigma.iter().take_while(|&&s| s > ZERO_SINGULAR).count();
    for k in 0..rank {
        let row = a.adjoint() * &left[k] / C64::from(sigma[k]);
        // row^T = u_k^dagger alpha / sigma, stored conjugated back
        rows.push(row.map(|z| z.conj()));
    }
    // completion works with conjugated rows so the Hermitian Gram-Schmidt
    // yields rows orthonormal under sum_m r_km conj(r_lm)
    let mut conj_rows: Vec<DVector<C64>> = rows.iter().map(|r| r.map(|z| z.conj())).collect();
    extend_orthonormal(&mut conj_rows, (0..d_b).map(|j| standard(d_b, j)), d_b);
    let mut rows: Vec<DVector<C64>> = conj_rows.iter().map(|r| r.map(|z| z.conj())).collect();

    let mut s_a = from_columns(&left);
    let mut s_bt = CMatrix::from_fn(d_b, d_b, |k, m| rows[k][m]);

    // free vectors absorb their factor's determinant phase
    if rank < d_a {
        let delta = s_a.determinant().arg();
        let last = d_a - 1;
        let fix = C64::from_polar(1.0, -delta);
        left[last] *= fix;
        s_a = from_columns(&left);
    }
    if rank < d_b {
        let delta = s_bt.determinant().arg();
        let last = d_b - 1;
        rows[last] *= C64::from_polar(1.0, -delta);
        s_bt = CMatrix::from_fn(d_b, d_b, |k, m| rows[k][m]);
    }
    let delta_a = s_a.determinant().arg();
    let delta_b = s_bt.determinant().arg();
    s_a *= C64::from_polar(1.0, -delta_a / d_a as f64);
    s_bt *= C64::from_polar(1.0, -delta_b / d_b as f64);

    SchmidtForm {
        phi: delta_a / d_a as f64 + delta_b / d_b as f64,
        s_a,
        s_b: s_bt.transpose(),
        q: DVector::from_vec(sigma),
    }
}

/// Reduced density matrices `rho_A = alpha alpha^dagger`,
/// `rho_B = (alpha^dagger alpha)^T`.
pub fn reduced_densities(alpha: &CoefficientMatrix) -> (CMatrix, CMatrix) {
    let a = alpha.matrix();
    (a * a.adjoint(), (a.adjoint() * a).transpose())
}

/// Local-unitary invariants of a two-qudit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub d_a: usize,
    pub d_b: usize,
    /// I-concurrence `sqrt(2 (1 - Tr rho_A^2))`.
    pub concurrence: f64,
    /// `sqrt(2 (d_A - 1)/d_A)`.
    pub max_concurrence: f64,
    pub q_a: f64,
    pub q_b: f64,
    /// `Tr[Q^{2p}]` for `p = 1..=d_A`.
    pub trace_powers: Vec<f64>,
    /// `|det Q|`.
    pub det_q: f64,
}

impl EntanglementReport {
    /// Weight of the A-side connection integral, `sqrt((C_m^2 - C^2)/2)`.
    pub fn weight_a(&self) -> f64 {
        ((self.max_concurrence.powi(2) - self.concurrence.powi(2)) / 2.0)
            .max(0.0)
            .sqrt()
    }

    /// Weight of the B-side connection integral,
    /// `sqrt((C_m^2 - C^2)/2 + (d_B - d_A)/(d_A d_B))`.
    pub fn weight_b(&self) -> f64 {
        let extra = (self.d_b - self.d_a) as f64 / (self.d_a * self.d_b) as f64;
        (self.weight_a().powi(2) + extra).sqrt()
    }
}

pub fn max_concurrence(d_a: usize) -> f64 {
    (2.0 * (d_a - 1) as f64 / d_a as f64).sqrt()
}

/// `sum_{j<k} a_j a_k`, which equals `(1 - sum a_j^2)/2` for `sum a_j = 1`
/// without the cancellation near product states.
fn pair_sum(a: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (j, x) in a.iter().enumerate() {
        for y in &a[j + 1..] {
            acc += x * y;
        }
    }
    acc
}

pub fn entanglement_report(alpha: &CoefficientMatrix) -> EntanglementReport {
    let (d_a, d_b) = (alpha.d_a(), alpha.d_b());
    let sigma = alpha.matrix().clone().singular_values();
    let q2: Vec<f64> = sigma.iter().map(|s| s * s).collect();
    let trace_powers: Vec<f64> = (1..=d_a)
        .map(|p| q2.iter().map(|v| v.powi(p as i32)).sum())
        .collect();
    let purity = trace_powers[1];
    let purity_norm = |d: usize| {
        let d = d as f64;
        ((d * purity - 1.0) / (d - 1.0)).max(0.0).sqrt()
    };
    EntanglementReport {
        d_a,
        d_b,
        concurrence: 2.0 * pair_sum(&q2).sqrt(),
        max_concurrence: max_concurrence(d_a),
        q_a: purity_norm(d_a).min(1.0),
        q_b: purity_norm(d_b),
        trace_powers,
        det_q: sigma.iter().product::<f64>().abs(),
    }
}

/// `U_A alpha U_B^T`.
pub fn apply_local(
    alpha: &CoefficientMatrix,
    u_a: &CMatrix,
    u_b: &CMatrix,
) -> Result<CoefficientMatrix> {
    for (u, d, context) in [(u_a, alpha.d_a(), "U_A"), (u_b, alpha.d_b(), "U_B")] {
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: u.nrows(),
                context,
            });
        }
        ensure_unitary(u, 1e-10)?;
    }
    Ok(CoefficientMatrix {
        alpha: u_a * alpha.matrix() * u_b.transpose(),
    })
}

/// Real diagonal matrix helper for tests and presets.
pub fn real_diagonal(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| C64::from(v)),
    ))
}

impl From<&SchmidtForm> for DMatrix<f64> {
    fn from(s: &SchmidtForm) -> Self {
        DMatrix::from_diagonal(&s.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_generators;
    use crate::linalg::frobenius;
    use std::f64::consts::PI;

    fn e0(n: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[0] = 1.0;
        v
    }

    #[test]
    fn maximally_mixed_density() {
        let b = make_generators(4).unwrap();
        let rho = density_from_purity(4, 0.0, &e0(15), &b).unwrap();
        assert!(frobenius(&(rho.matrix() - CMatrix::identity(4, 4) * C64::from(0.25))) < 1e-15);
        assert!((rho.purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pure_qubit_along_z() {
        let b = make_generators(2).unwrap();
        let rho = density_from_purity(2, 1.0, &e0(3), &b).unwrap();
        assert!(frobenius(&(rho.matrix() - real_diagonal(&[1.0, 0.0]))) < 1e-15);
    }

    #[test]
    fn pure_qutrit_at_theta_zero() {
        let b = make_generators(3).unwrap();
        let rho = density_from_purity(3, 1.0, &e0(8), &b).unwrap();
        let diag: Vec<f64> = rho.matrix().diagonal().iter().map(|z| z.re).collect();
        for (got, want) in diag.iter().zip([0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        // agrees with 1/3 + (2q/3) cos(theta + 2 pi n/3)
        let theta: f64 = 0.2;
        let q = 0.7;
        let mut dir = DVector::zeros(8);
        dir[0] = theta.cos();
        dir[1] = theta.sin();
        let rho = density_from_purity(3, q, &dir, &b).unwrap();
        let expected = [
            1.0 / 3.0 + 2.0 * q / 3.0 * (theta + 2.0 * PI / 3.0).cos(),
            1.0 / 3.0 + 2.0 * q / 3.0 * (theta + 4.0 * PI / 3.0).cos(),
            1.0 / 3.0 + 2.0 * q / 3.0 * theta.cos(),
        ];
        for (n, want) in expected.iter().enumerate() {
            assert!((rho.matrix()[(n, n)].re - want).abs() < 1e-15);
        }
        let profile = rho.diagonal_profile(&b).unwrap();
        for (x, y) in profile
            .values()
            .iter()
            .zip(DiagonalProfile::qutrit(theta).values())
        {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn unphysical_purity_direction_is_rejected() {
        let b = make_generators(3).unwrap();
        // q = 1 with theta = pi/3 pushes an eigenvalue to 1/3 - 2/3 < 0
        let mut dir = DVector::zeros(8);
        dir[0] = (PI / 2.0).cos();
        dir[1] = (PI / 2.0).sin();
        match density_from_purity(3, 1.0, &dir, &b) {
            Err(Error::NegativeEigenvalue { eigenvalue }) => assert!(eigenvalue < -0.1),
            other => panic!("{other:?}"),
        }
        assert!(density_from_purity(3, 1.5, &e0(8), &b).is_err());
        assert!(density_from_purity(3, 0.5, &(e0(8) * 2.0), &b).is_err());
    }

    #[test]
    fn purity_round_trip() {
        let b = make_generators(3).unwrap();
        let mut dir = DVector::from_vec(vec![0.3, -0.2, 0.1, 0.4, 0.0, -0.1, 0.2, 0.05]);
        dir.normalize_mut();
        let rho = density_from_purity(3, 0.4, &dir, &b).unwrap();
        let back = QuditDensity::from_matrix(rho.matrix().clone(), &b).unwrap();
        assert!((back.q() - 0.4).abs() < 1e-13);
        assert!((back.q_hat() - &dir).norm() < 1e-13);
        assert!((rho.purity_scalar() - 0.4).abs() < 1e-13);
        let q: f64 = 0.4;
        assert!((rho.purity() - (q * q + (1.0 - q * q) / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn theta_bound_branches() {
        assert!((qutrit_theta_bound(0.5).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!(qutrit_theta_bound(1.0).unwrap().abs() < 1e-15);
        assert!((qutrit_theta_bound(0.25).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((qutrit_theta_bound(0.5 + 1e-12).unwrap() - PI / 3.0).abs() < 1e-5);
        assert!(qutrit_theta_bound(-0.1).is_err());
        assert!(qutrit_theta_bound(1.1).is_err());
    }

    #[test]
    fn two_qubit_diagonal_schmidt_form() {
        let q: f64 = 0.6;
        let alpha =
            CoefficientMatrix::diagonal(&[((1.0 + q) / 2.0).sqrt(), ((1.0 - q) / 2.0).sqrt()], 2)
                .unwrap();
        let s = schmidt_decompose(&alpha);
        assert!(s.phi.abs() < 1e-15);
        assert!(frobenius(&(&s.s_a - CMatrix::identity(2, 2))) < 1e-14);
        assert!(frobenius(&(&s.s_b - CMatrix::identity(2, 2))) < 1e-14);
        assert!((s.q[0] - ((1.0 + q) / 2.0).sqrt()).abs() < 1e-15);
        assert!((s.q[1] - ((1.0 - q) / 2.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn qubit_qutrit_dual_state_schmidt_form() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let alpha = CoefficientMatrix::new(CMatrix::from_row_slice(
            2,
            3,
            &[
                h.into(),
                0.0.into(),
                0.0.into(),
                0.0.into(),
                0.5.into(),
                0.5.into(),
            ],
        ))
        .unwrap();
        let s = schmidt_decompose(&alpha);
        assert!(s.phi.abs() < 1e-15);
        for v in s.q_squared() {
            assert!((v - 0.5).abs() < 1e-15);
        }
        assert!(frobenius(&(&s.s_a - CMatrix::identity(2, 2))) < 1e-14);
        // the displayed matrix in the qubit-qutrit example is S_B^T
        let expected = CMatrix::from_row_slice(
            3,
            3,
            &[
                1.0.into(),
                0.0.into(),
                0.0.into(),
                0.0.into(),
                h.into(),
                h.into(),
                0.0.into(),
                (-h).into(),
                h.into(),
            ],
        );
        assert!(frobenius(&(s.s_b.transpose() - expected)) < 1e-14);
        assert!(frobenius(&(s.reconstruct() - alpha.matrix())) < 1e-14);
    }

    #[test]
    fn rank_deficient_and_product_states() {
        let alpha = CoefficientMatrix::diagonal(&[1.0, 0.0, 0.0], 4).unwrap();
        let s = schmidt_decompose(&alpha);
        assert!(frobenius(&(s.reconstruct() - alpha.matrix())) < 1e-14);
        assert!((s.s_a.determinant() - C64::from(1.0)).norm() < 1e-13);
        assert!((s.s_b.determinant() - C64::from(1.0)).norm() < 1e-13);
        let (ra, rb) = reduced_densities(&alpha);
        assert!(frobenius(&(&ra * &ra - &ra)) < 1e-15);
        assert!(frobenius(&(&rb * &rb - &rb)) < 1e-15);
    }

    #[test]
    fn maximally_entangled_reduced_densities() {
        let d = 3;
        let c = 1.0 / (d as f64).sqrt();
        let alpha = CoefficientMatrix::diagonal(&vec![c; d], d).unwrap();
        let (ra, rb) = reduced_densities(&alpha);
        let mixed = CMatrix::identity(d, d) * C64::from(1.0 / d as f64);
        assert!(frobenius(&(ra - &mixed)) < 1e-15);
        assert!(frobenius(&(rb - &mixed)) < 1e-15);
        let r = entanglement_report(&alpha);
        assert!((r.concurrence - (4.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((r.max_concurrence - (4.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn qubit_qutrit_reduced_density_blocks() {
        let q: f64 = 0.3;
        let alpha =
            CoefficientMatrix::diagonal(&[((1.0 + q) / 2.0).sqrt(), ((1.0 - q) / 2.0).sqrt()], 3)
                .unwrap();
        let (ra, rb) = reduced_densities(&alpha);
        let q2 = real_diagonal(&[(1.0 + q) / 2.0, (1.0 - q) / 2.0]);
        assert!(frobenius(&(ra - &q2)) < 1e-15);
        assert!(frobenius(&(rb - real_diagonal(&[(1.0 + q) / 2.0, (1.0 - q) / 2.0, 0.0]))) < 1e-15);
        let r = entanglement_report(&alpha);
        assert!((r.concurrence - (1.0 - q * q).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn concurrence_examples() {
        let q: f64 = 0.45;
        let two_qubit =
            CoefficientMatrix::diagonal(&[((1.0 + q) / 2.0).sqrt(), ((1.0 - q) / 2.0).sqrt()], 2)
                .unwrap();
        let r = entanglement_report(&two_qubit);
        assert!((r.concurrence - (1.0 - q * q).sqrt()).abs() < 1e-14);
        assert!((r.concurrence - 2.0 * r.det_q).abs() < 1e-14);
        assert!((r.q_a - q).abs() < 1e-14);

        let theta = 0.1;
        let x = DiagonalProfile::qutrit(theta);
        let w = q * (2.0f64 / 3.0).sqrt();
        let coeffs: Vec<f64> = x
            .values()
            .iter()
            .map(|xn| (1.0 / 3.0 + w * xn).sqrt())
            .collect();
        let two_qutrit = CoefficientMatrix::diagonal(&coeffs, 3).unwrap();
        let r = entanglement_report(&two_qutrit);
        let cm = (4.0f64 / 3.0).sqrt();
        assert!((r.concurrence - cm * (1.0 - q * q).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn apply_local_examples() {
        let q: f64 = 0.2;
        let alpha =
            CoefficientMatrix::diagonal(&[((1.0 + q) / 2.0).sqrt(), ((1.0 - q) / 2.0).sqrt()], 2)
                .unwrap();
        let same = apply_local(&alpha, &CMatrix::identity(2, 2), &CMatrix::identity(2, 2)).unwrap();
        assert_eq!(same, alpha);

        let (a, b) = ([0.3, -0.3], [1.1, -1.1]);
        let ua = crate::linalg::diag_phases(&a);
        let ub = crate::linalg::diag_phases(&b);
        let moved = apply_local(&alpha, &ua, &ub).unwrap();
        assert!(moved.is_diagonal(1e-15));
        for n in 0..2 {
            let ratio = moved.matrix()[(n, n)] / alpha.matrix()[(n, n)];
            assert!((ratio - C64::from_polar(1.0, a[n] + b[n])).norm() < 1e-15);
        }
        assert!(apply_local(&alpha, &CMatrix::identity(3, 3), &ub).is_err());
        assert!(apply_local(&alpha, &real_diagonal(&[1.0, 2.0]), &ub).is_err());
    }

    #[test]
    fn coefficient_matrix_validation() {
        assert!(matches!(
            CoefficientMatrix::new(CMatrix::identity(3, 2)),
            Err(Error::RowsExceedColumns { .. })
        ));
        assert!(matches!(
            CoefficientMatrix::new(CMatrix::identity(2, 2)),
            Err(Error::NotNormalized { .. })
        ));
        assert!(CoefficientMatrix::normalized(CMatrix::identity(2, 2)).is_ok());
    }
}
