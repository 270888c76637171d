//! SU(d) generator basis, Cartan angles and velocity vectors.
//!
//! Generators are ordered Cartan first: `T = (H_1..H_{d-1}, P_1..P_{d^2-d})`,
//! normalised so that `Tr[T_a T_b] = delta_ab`. The non-diagonal sector is the
//! usual generalized Gell-Mann construction, one symmetric and one
//! antisymmetric matrix per level pair `(j, k)`, `j < k`, in lexicographic
//! order. The Cartan sector uses the nested traceless diagonals
//! `diag(1, .., 1, -l, 0, ..) / sqrt(l (l + 1))`, except for qutrits where the
//! two diagonals are negated and reversed:
//!
//! ```text
//! H_1 = -diag(1, 1, -2) / sqrt(6)     H_2 = -diag(1, -1, 0) / sqrt(2)
//! ```
//!
//! With these signs the qutrit purity direction `(cos t, sin t, 0, ..)` puts
//! the weights `cos(t + 2pi/3), cos(t + 4pi/3), cos t` on the three levels.
//! They differ from the textbook `lambda_8, lambda_3` by an overall sign.

use nalgebra::DVector;

use crate::linalg::{self, diag_phases, ensure_unitary, trace, trace_of_product};
use crate::{CMatrix, Error, Result, C64};

/// Default tolerance for unitarity, determinant and trace residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorBasis {
    d: usize,
    cartan: Vec<CMatrix>,
    nondiag: Vec<CMatrix>,
}

/// Build the orthonormal SU(d) generator basis.
pub fn make_generators(d: usize) -> Result<GeneratorBasis> {
    GeneratorBasis::new(d)
}

impl GeneratorBasis {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let mut cartan: Vec<CMatrix> = (1..d)
            .map(|l| {
                let norm = ((l * (l + 1)) as f64).sqrt();
                let mut m = CMatrix::zeros(d, d);
                for n in 0..l {
                    m[(n, n)] = C64::from(1.0 / norm);
                }
                m[(l, l)] = C64::from(-(l as f64) / norm);
                m
            })
            .collect();
        if d == 3 {
            cartan.reverse();
            for h in &mut cartan {
                *h *= C64::from(-1.0);
            }
        }

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut nondiag = Vec::with_capacity(d * d - d);
        for j in 0..d {
            for k in (j + 1)..d {
                let mut sym = CMatrix::zeros(d, d);
                sym[(j, k)] = C64::from(s);
                sym[(k, j)] = C64::from(s);
                let mut anti = CMatrix::zeros(d, d);
                anti[(j, k)] = C64::new(0.0, -s);
                anti[(k, j)] = C64::new(0.0, s);
                nondiag.push(sym);
                nondiag.push(anti);
            }
        }
        Ok(Self { d, cartan, nondiag })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of generators, `d^2 - 1`.
    pub fn len(&self) -> usize {
        self.d * self.d - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cartan(&self) -> &[CMatrix] {
        &self.cartan
    }

    pub fn nondiag(&self) -> &[CMatrix] {
        &self.nondiag
    }

    /// All generators, Cartan sector first.
    pub fn generators(&self) -> impl Iterator<Item = &CMatrix> {
        self.cartan.iter().chain(self.nondiag.iter())
    }

    pub fn generator(&self, index: usize) -> &CMatrix {
        if index < self.d - 1 {
            &self.cartan[index]
        } else {
            &self.nondiag[index - (self.d - 1)]
        }
    }

    /// Diagonal of `H_beta` as real numbers.
    pub fn cartan_diagonal(&self, beta: usize) -> Vec<f64> {
        self.cartan[beta].diagonal().iter().map(|z| z.re).collect()
    }

    /// Real components `Tr[T_a M]` of a Hermitian matrix.
    pub fn components(&self, m: &CMatrix) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.generators().map(|t| trace_of_product(t, m).re),
        )
    }

    /// `sum_a v_a T_a`.
    pub fn combine(&self, v: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.d, self.d);
        for (t, &c) in self.generators().zip(v) {
            m += t * C64::from(c);
        }
        m
    }

    /// Gram matrix `Tr[T_a T_b]`; equals the identity for an orthonormal basis.
    pub fn gram(&self) -> nalgebra::DMatrix<f64> {
        let gens: Vec<&CMatrix> = self.generators().collect();
        nalgebra::DMatrix::from_fn(gens.len(), gens.len(), |a, b| {
            trace_of_product(gens[a], gens[b]).re
        })
    }

    fn check_dim(&self, got: usize, context: &'static str) -> Result<()> {
        if got != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got,
                context,
            });
        }
        Ok(())
    }
}

/// A point of the Cartan torus, stored as per-level phases `chi_n` with
/// `sum chi_n = 0`. The coordinates `h` in the basis of [`GeneratorBasis`]
/// are `h_beta = sum_n chi_n <n|H_beta|n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanAngles {
    chi: Vec<f64>,
}

impl CartanAngles {
    pub fn zero(d: usize) -> Self {
        Self { chi: vec![0.0; d] }
    }

    /// Per-level phases. The sum must vanish up to rounding; the residual is
    /// removed so the stored phases sum to zero.
    pub fn from_levels(chi: Vec<f64>) -> Result<Self> {
        if chi.len() < 2 {
            return Err(Error::InvalidDimension(chi.len()));
        }
        let sum: f64 = chi.iter().sum();
        let scale = chi.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        if sum.abs() > 1e-9 * scale * chi.len() as f64 {
            return Err(Error::NonzeroPhaseSum { sum });
        }
        let mean = sum / chi.len() as f64;
        Ok(Self {
            chi: chi.into_iter().map(|c| c - mean).collect(),
        })
    }

    pub fn from_h(basis: &GeneratorBasis, h: &[f64]) -> Result<Self> {
        if h.len() != basis.dim() - 1 {
            return Err(Error::DimensionMismatch {
                expected: basis.dim() - 1,
                got: h.len(),
                context: "Cartan coordinates",
            });
        }
        let mut chi = vec![0.0; basis.dim()];
        for (beta, &hb) in h.iter().enumerate() {
            for (n, x) in basis.cartan_diagonal(beta).into_iter().enumerate() {
                chi[n] += hb * x;
            }
        }
        Self::from_levels(chi)
    }

    pub fn dim(&self) -> usize {
        self.chi.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.chi
    }

    pub fn h(&self, basis: &GeneratorBasis) -> Vec<f64> {
        (0..basis.dim() - 1)
            .map(|beta| {
                basis
                    .cartan_diagonal(beta)
                    .iter()
                    .zip(&self.chi)
                    .map(|(x, c)| x * c)
                    .sum()
            })
            .collect()
    }
}

/// `exp(i h.H) = diag(e^{i chi_0}, .., e^{i chi_{d-1}})`.
pub fn cartan_exponential(basis: &GeneratorBasis, h: &CartanAngles) -> Result<CMatrix> {
    basis.check_dim(h.dim(), "Cartan angles")?;
    Ok(diag_phases(h.levels()))
}

/// Per-level phases of a diagonal unitary, principal branch.
pub fn cartan_logarithm(u: &CMatrix) -> Result<CartanAngles> {
    if !linalg::is_diagonal(u, 1e-12) {
        return Err(Error::Config("matrix is not diagonal".into()));
    }
    let chi: Vec<f64> = u.diagonal().iter().map(|z| z.arg()).collect();
    // principal args of an SU(d) diagonal sum to a multiple of 2 pi; push the
    // excess onto the last level
    let sum: f64 = chi.iter().sum();
    let turns = (sum / std::f64::consts::TAU).round();
    let mut chi = chi;
    let last = chi.len() - 1;
    chi[last] -= turns * std::f64::consts::TAU;
    CartanAngles::from_levels(chi)
}

/// Velocity vector `u` with `U^dagger dU/dt = i u.T` for a path sample in SU(d).
pub fn velocity_vector(
    basis: &GeneratorBasis,
    u: &CMatrix,
    u_dot: &CMatrix,
    tolerance: f64,
) -> Result<DVector<f64>> {
    basis.check_dim(u.nrows(), "path sample")?;
    basis.check_dim(u_dot.nrows(), "path derivative")?;
    ensure_unitary(u, tolerance)?;
    let det_residual = (u.determinant() - C64::from(1.0)).norm();
    if det_residual > tolerance {
        return Err(Error::NotSpecial {
            residual: det_residual,
        });
    }
    let k = u.adjoint() * u_dot;
    let tr = trace(&k).norm();
    if tr > tolerance * (1.0 + linalg::frobenius(&k)) {
        return Err(Error::ResidualTrace { residual: tr });
    }
    let minus_i = C64::new(0.0, -1.0);
    Ok(DVector::from_iterator(
        basis.len(),
        basis
            .generators()
            .map(|t| (minus_i * trace_of_product(t, &k)).re),
    ))
}

/// A unitary sample split as `U = e^{i phase} U_bar` with `U_bar` in SU(d).
#[derive(Debug, Clone)]
pub struct SuProjection {
    pub u_bar: CMatrix,
    pub u_bar_dot: CMatrix,
    pub phase: f64,
    pub phase_rate: f64,
}

/// Strip the global phase of a unitary path sample. Among the `d` roots of
/// `det U` the one nearest `reference_phase` is chosen, so feeding the
/// previous sample's phase keeps the projection continuous along a path.
pub fn project_special_unitary(
    u: &CMatrix,
    u_dot: &CMatrix,
    reference_phase: f64,
) -> Result<SuProjection> {
    use std::f64::consts::TAU;
    ensure_unitary(u, 1e-8)?;
    let d = u.nrows() as f64;
    let base = u.determinant().arg() / d;
    let step = TAU / d;
    let k = ((reference_phase - base) / step).round();
    let phase = base + k * step;
    let phase_rate = trace(&(u.adjoint() * u_dot)).im / d;
    let rot = C64::from_polar(1.0, -phase);
    let u_bar = u * rot;
    let u_bar_dot = (u_dot - u * C64::new(0.0, phase_rate)) * rot;
    Ok(SuProjection {
        u_bar,
        u_bar_dot,
        phase,
        phase_rate,
    })
}

/// Velocity decomposition `u = v'_perp + v_par + h_dot` of a factorized path
/// `U = V exp(i h.H)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityDecomposition {
    /// Off-diagonal coset velocity before the Cartan rotation.
    pub v_perp: DVector<f64>,
    /// Off-diagonal velocity after conjugation by `exp(i h.H)`.
    pub v_perp_rot: DVector<f64>,
    /// Cartan component of the coset velocity.
    pub v_par: DVector<f64>,
    pub h_dot: DVector<f64>,
}

impl VelocityDecomposition {
    /// Reassembled velocity in generator order.
    pub fn velocity(&self) -> DVector<f64> {
        let cartan = &self.v_par + &self.h_dot;
        DVector::from_iterator(
            cartan.len() + self.v_perp_rot.len(),
            cartan.iter().chain(self.v_perp_rot.iter()).copied(),
        )
    }

    pub fn cartan_block(&self) -> DVector<f64> {
        &self.v_par + &self.h_dot
    }
}

/// Split a velocity vector `u` into rotated off-diagonal, coset-parallel and
/// Cartan-rate parts, given the Cartan angles `h` and the coset velocity
/// `v` (`V^dagger dV/dt = i v.T`) at the same instant.
pub fn decompose_velocity(
    basis: &GeneratorBasis,
    u: &DVector<f64>,
    h: &CartanAngles,
    v_from_coset: &DVector<f64>,
) -> Result<VelocityDecomposition> {
    let n = basis.len();
    let c = basis.dim() - 1;
    for (len, context) in [
        (u.len(), "velocity"),
        (v_from_coset.len(), "coset velocity"),
    ] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: len,
                context,
            });
        }
    }
    let rotated = rotate_off_diagonal(basis, &v_from_coset.rows(c, n - c).into_owned(), h)?;
    let v_par = v_from_coset.rows(0, c).into_owned();
    let h_dot = u.rows(0, c).into_owned() - &v_par;
    Ok(VelocityDecomposition {
        v_perp: v_from_coset.rows(c, n - c).into_owned(),
        v_perp_rot: rotated,
        v_par,
        h_dot,
    })
}

/// Components of `exp(-i h.H) (v_perp.P) exp(i h.H)` in the non-diagonal sector.
pub fn rotate_off_diagonal(
    basis: &GeneratorBasis,
    v_perp: &DVector<f64>,
    h: &CartanAngles,
) -> Result<DVector<f64>> {
    let e = cartan_exponential(basis, h)?;
    let mut m = CMatrix::zeros(basis.dim(), basis.dim());
    for (p, &c) in basis.nondiag().iter().zip(v_perp.iter()) {
        m += p * C64::from(c);
    }
    let rotated = e.adjoint() * m * e;
    Ok(DVector::from_iterator(
        basis.nondiag().len(),
        basis
            .nondiag()
            .iter()
            .map(|p| trace_of_product(p, &rotated).re),
    ))
}
