//! Closed-form phases for diagonal and Bloch-loop evolutions.
//!
//! Every function returns the nontrivial total phase on the principal branch
//! together with the geometric phase. Arctangent expressions are evaluated as
//! the argument of the underlying complex trace, so sign changes of the real
//! part produce the expected jumps by `pi`.

use std::f64::consts::PI;

use crate::linalg::wrap_angle;
use crate::state::{max_concurrence, qutrit_theta_bound, DiagonalProfile};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormResult {
    /// Nontrivial total phase in `(-pi, pi]`.
    pub phi_total_bar: f64,
    /// Turns added to `phi_total_bar` to reach the unwrapped branch.
    pub winding: i64,
    /// Geometric phase computed with `phi_total_bar + 2 pi winding`.
    pub phi_g: f64,
}

impl ClosedFormResult {
    fn from_parts(overlap: C64, integral: f64) -> Self {
        let phi_total_bar = if overlap.norm() == 0.0 {
            0.0
        } else {
            overlap.arg()
        };
        Self {
            phi_total_bar,
            winding: 0,
            phi_g: phi_total_bar - integral,
        }
    }

    pub fn unwrapped_total(&self) -> f64 {
        self.phi_total_bar + 2.0 * PI * self.winding as f64
    }

    /// Shift onto the branch nearest `reference_total`.
    pub fn aligned_to(&self, reference_total: f64) -> Self {
        let current = self.unwrapped_total();
        let turns = ((reference_total - current) / (2.0 * PI)).round() as i64;
        Self {
            phi_total_bar: self.phi_total_bar,
            winding: self.winding + turns,
            phi_g: self.phi_g + 2.0 * PI * turns as f64,
        }
    }

    /// Circular distance between the geometric phases of two results.
    pub fn geometric_gap(&self, phi_g: f64) -> f64 {
        wrap_angle(self.phi_g - phi_g).abs()
    }
}

fn check_purity(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::PurityOutOfRange(q));
    }
    Ok(())
}

fn check_phase_sum(chi: &[f64]) -> Result<()> {
    let sum: f64 = chi.iter().sum();
    let scale = chi.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    if sum.abs() > 1e-9 * scale {
        return Err(Error::NonzeroPhaseSum { sum });
    }
    Ok(())
}

fn check_len(x: &DiagonalProfile, chi: &[f64]) -> Result<()> {
    if chi.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: chi.len(),
            context: "per-level phases",
        });
    }
    Ok(())
}

/// Phasor sum `sum_n (1/d + w x_n) e^{i chi_n}` minus `w sum_n x_n chi_n`.
fn diagonal_phasor(weight: f64, x: &DiagonalProfile, chi: &[f64]) -> ClosedFormResult {
    let d = x.dim() as f64;
    let mut overlap = C64::new(0.0, 0.0);
    let mut integral = 0.0;
    for (&xn, &c) in x.values().iter().zip(chi) {
        overlap += C64::from_polar(1.0 / d + weight * xn, c);
        integral += weight * xn * c;
    }
    ClosedFormResult::from_parts(overlap, integral)
}

/// Single qudit with diagonal `rho0` under a diagonal SU(d) path.
pub fn single_qudit_diagonal(q: f64, x: &DiagonalProfile, chi: &[f64]) -> Result<ClosedFormResult> {
    check_purity(q)?;
    check_len(x, chi)?;
    check_phase_sum(chi)?;
    let d = x.dim() as f64;
    Ok(diagonal_phasor(q * ((d - 1.0) / d).sqrt(), x, chi))
}

/// Single qubit after a closed Bloch loop of solid angle `omega` with
/// Cartan angle `chi`.
pub fn single_qubit_partial(q: f64, chi: f64, omega: f64) -> ClosedFormResult {
    let overlap = C64::new(chi.cos(), q * chi.sin());
    ClosedFormResult::from_parts(overlap, q * (chi + omega / 2.0))
}

/// Single qutrit with profile angle `theta` under `diag(e^{i chi0}, e^{i chi1},
/// e^{-i(chi0 + chi1)})`.
pub fn single_qutrit_diagonal(
    q: f64,
    theta: f64,
    chi0: f64,
    chi1: f64,
) -> Result<ClosedFormResult> {
    check_purity(q)?;
    let bound = qutrit_theta_bound(q)?;
    if theta.abs() > bound + 1e-12 {
        return Err(Error::ThetaOutOfBounds { theta, bound });
    }
    let chi2 = -(chi0 + chi1);
    let c = [
        (theta + 2.0 * PI / 3.0).cos(),
        (theta + 4.0 * PI / 3.0).cos(),
        theta.cos(),
    ];
    let chi = [chi0, chi1, chi2];
    let mut overlap = C64::new(0.0, 0.0);
    let mut integral = 0.0;
    for n in 0..3 {
        overlap += C64::from_polar(1.0 / 3.0 + 2.0 * q / 3.0 * c[n], chi[n]);
        integral += 2.0 * q / 3.0 * chi[n] * c[n];
    }
    Ok(ClosedFormResult::from_parts(overlap, integral))
}

fn check_concurrence(c: f64, max: f64) -> Result<()> {
    if !(0.0..=max + 1e-12).contains(&c) {
        return Err(Error::Config(format!("concurrence {c} outside [0, {max}]")));
    }
    Ok(())
}

/// Two qubits in a partially cyclic evolution: closed Bloch loops with solid
/// angles `omega_a`, `omega_b` and Cartan angles `chi_a`, `chi_b`.
pub fn two_qubit_partial(
    c: f64,
    chi_a: f64,
    chi_b: f64,
    omega_a: f64,
    omega_b: f64,
) -> Result<ClosedFormResult> {
    check_concurrence(c, 1.0)?;
    let s = (1.0 - c * c).max(0.0).sqrt();
    let chi_t = chi_a + chi_b;
    let overlap = C64::new(chi_t.cos(), s * chi_t.sin());
    Ok(ClosedFormResult::from_parts(
        overlap,
        s * (chi_t + (omega_a + omega_b) / 2.0),
    ))
}

/// Two qubits after a cyclic evolution with `n = n_A + n_B`.
pub fn two_qubit_cyclic(c: f64, n: i64, omega_a: f64, omega_b: f64) -> f64 {
    n as f64 * PI - (1.0 - c * c).max(0.0).sqrt() * (omega_a + omega_b) / 2.0
}

/// Two qudits of equal dimension, diagonal state with profile `x`, under
/// diagonal paths with total angles `chi_t = chi_A + chi_B`.
pub fn two_qudit_diagonal(c: f64, x: &DiagonalProfile, chi_t: &[f64]) -> Result<ClosedFormResult> {
    check_len(x, chi_t)?;
    check_phase_sum(chi_t)?;
    let cm = max_concurrence(x.dim());
    check_concurrence(c, cm)?;
    let weight = ((cm * cm - c * c) / 2.0).max(0.0).sqrt();
    Ok(diagonal_phasor(weight, x, chi_t))
}

/// Two qutrits in the diagonal state with purity `q` and angle `theta`.
pub fn two_qutrit_example(
    q: f64,
    theta: f64,
    chi_t0: f64,
    chi_t1: f64,
) -> Result<ClosedFormResult> {
    single_qutrit_diagonal(q, theta, chi_t0, chi_t1)
}

/// Qubit-qutrit state `(sqrt(1+q)|00> + sqrt(1-q)|11>)/sqrt(2)` under
/// diagonal paths. The qutrit acts as a qubit with `chi_B = (chi_B0 -
/// chi_B1)/2`. Only `phi_g` is meaningful here: the true total phase carries
/// an extra `(chi_B0 + chi_B1)/2`.
pub fn qubit_qutrit_effective(
    c: f64,
    chi_a: f64,
    chi_b0: f64,
    chi_b1: f64,
) -> Result<ClosedFormResult> {
    two_qubit_partial(c, chi_a, (chi_b0 - chi_b1) / 2.0, 0.0, 0.0)
}

/// State `|00>/sqrt(2) + |11>/2 + |12>/2` under diagonal paths.
pub fn qubit_qutrit_dual(
    chi_a: f64,
    chi_b0: f64,
    chi_b1: f64,
    chi_b2: f64,
) -> Result<ClosedFormResult> {
    check_phase_sum(&[chi_b0, chi_b1, chi_b2])?;
    let overlap = C64::from_polar(0.5 * (chi_a - chi_b2 - chi_b1 / 2.0).cos(), -chi_b1 / 2.0)
        + C64::from_polar(0.5 * (chi_a - chi_b1 - chi_b2 / 2.0).cos(), -chi_b2 / 2.0);
    Ok(ClosedFormResult::from_parts(overlap, chi_b0 / 4.0))
}

/// Any two-qudit state under diagonal paths:
/// `sum_jk |alpha_jk|^2 e^{i(chi_Aj + chi_Bk)}` minus the matching weighted
/// sum of angles. Generalises the diagonal-state forms above to states with
/// off-diagonal amplitudes.
pub fn cartan_phasor(
    weights: &[Vec<f64>],
    chi_a: &[f64],
    chi_b: &[f64],
) -> Result<ClosedFormResult> {
    if weights.len() != chi_a.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: chi_a.len(),
            context: "A angles",
        });
    }
    let mut overlap = C64::new(0.0, 0.0);
    let mut integral = 0.0;
    for (row, &ca) in weights.iter().zip(chi_a) {
        if row.len() != chi_b.len() {
            return Err(Error::DimensionMismatch {
                expected: row.len(),
                got: chi_b.len(),
                context: "B angles",
            });
        }
        for (&w, &cb) in row.iter().zip(chi_b) {
            overlap += C64::from_polar(w, ca + cb);
            integral += w * (ca + cb);
        }
    }
    Ok(ClosedFormResult::from_parts(overlap, integral))
}
