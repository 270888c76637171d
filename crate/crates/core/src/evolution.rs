//! Piecewise local unitary paths.
//!
//! A path is authored in coordinates and synthesised as
//!
//! ```text
//! U(t) = G(t) V(theta, phi) exp(i diag(chi))
//! ```
//!
//! where `chi` are accumulated per-level Cartan angles, `V` is the qubit Bloch
//! factor (identity for `d != 2`) and `G` is the ordered product of constant
//! generator exponentials, newest on the left. Each segment moves one of the
//! three factors; the others are frozen. After its last segment a path holds
//! its final value.

use std::f64::consts::TAU;

use crate::algebra::CartanAngles;
use crate::linalg::{
    diag_phases, ensure_unitary, exp_i_hermitian, frobenius, hermitian_eigen,
    traceless_hermitian_residual,
};
use crate::quadrature;
use crate::{CMatrix, Error, Result, C64};

/// Coset closure tolerance `||V - 1||` used when reading Cartan angles.
pub const COSET_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum PathSegment {
    /// `chi_n += rates_n tau`; rates sum to zero.
    CartanLinear { rates: Vec<f64>, duration: f64 },
    /// Every factor frozen.
    CartanHold { duration: f64 },
    /// Qubit Bloch factor with `theta` and `phi` advancing linearly.
    BlochLoop {
        theta_rate: f64,
        phi_rate: f64,
        duration: f64,
    },
    /// `G <- exp(i generator tau) G` for a traceless Hermitian generator.
    GeneratorConst { generator: CMatrix, duration: f64 },
}

impl PathSegment {
    pub fn duration(&self) -> f64 {
        match self {
            PathSegment::CartanLinear { duration, .. }
            | PathSegment::CartanHold { duration }
            | PathSegment::BlochLoop { duration, .. }
            | PathSegment::GeneratorConst { duration, .. } => *duration,
        }
    }

    pub fn is_cartan(&self) -> bool {
        matches!(
            self,
            PathSegment::CartanLinear { .. } | PathSegment::CartanHold { .. }
        )
    }

    fn validate(&self, d: usize, index: usize) -> Result<()> {
        let bad = |reason: String| Error::InvalidSegment { index, reason };
        let duration = self.duration();
        if !duration.is_finite() || duration < 0.0 {
            return Err(bad(format!("duration {duration} must be finite and >= 0")));
        }
        match self {
            PathSegment::CartanLinear { rates, .. } => {
                if rates.len() != d {
                    return Err(bad(format!("{} rates for dimension {d}", rates.len())));
                }
                if rates.iter().any(|r| !r.is_finite()) {
                    return Err(bad("non-finite rate".into()));
                }
                let sum: f64 = rates.iter().sum();
                let scale = rates.iter().fold(1.0f64, |m, r| m.max(r.abs()));
                if sum.abs() > 1e-12 * scale * d as f64 {
                    return Err(Error::NonzeroPhaseSum { sum });
                }
            }
            PathSegment::CartanHold { .. } => {}
            PathSegment::BlochLoop {
                theta_rate,
                phi_rate,
                ..
            } => {
                if d != 2 {
                    return Err(bad(format!("Bloch loops need d = 2, got {d}")));
                }
                if !theta_rate.is_finite() || !phi_rate.is_finite() {
                    return Err(bad("non-finite rate".into()));
                }
            }
            PathSegment::GeneratorConst { generator, .. } => {
                if generator.nrows() != d || generator.ncols() != d {
                    return Err(bad(format!(
                        "generator is {}x{}, expected {d}x{d}",
                        generator.nrows(),
                        generator.ncols()
                    )));
                }
                let residual = traceless_hermitian_residual(generator);
                if residual > 1e-12 {
                    return Err(Error::NotTracelessHermitian { residual });
                }
            }
        }
        Ok(())
    }
}

/// Which one-sided limit to take at a segment boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Anything that yields a unitary and its time derivative.
pub trait UnitaryPath {
    fn dim(&self) -> usize;

    /// `(U(t), dU/dt)`, one-sided at breakpoints.
    fn sample(&self, t: f64, side: Side) -> Result<(CMatrix, CMatrix)>;

    /// Times where the derivative may jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Cartan angles where the path is diagonal, if it knows them.
    fn cartan_angles_at(&self, _t: f64) -> Option<CartanAngles> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Coordinates {
    chi: Vec<f64>,
    theta: f64,
    phi: f64,
    g: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalEvolution {
    d: usize,
    segments: Vec<PathSegment>,
    starts: Vec<f64>,
    checkpoints: Vec<Coordinates>,
    spectra: Vec<Option<(Vec<f64>, CMatrix)>>,
}

fn bloch_factor(theta: f64, phi: f64) -> CMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    let i = C64::i();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::from(c),
            i * s * C64::from_polar(1.0, -phi),
            i * s * C64::from_polar(1.0, phi),
            C64::from(c),
        ],
    )
}

fn bloch_derivative(theta: f64, phi: f64, theta_rate: f64, phi_rate: f64) -> CMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    let i = C64::i();
    let em = C64::from_polar(1.0, -phi);
    let ep = C64::from_polar(1.0, phi);
    let d_theta = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::from(-0.5 * s),
            i * 0.5 * c * em,
            i * 0.5 * c * ep,
            C64::from(-0.5 * s),
        ],
    );
    let d_phi = CMatrix::from_row_slice(2, 2, &[C64::from(0.0), s * em, -s * ep, C64::from(0.0)]);
    d_theta * C64::from(theta_rate) + d_phi * C64::from(phi_rate)
}

impl LocalEvolution {
    pub fn new(d: usize, segments: Vec<PathSegment>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        for (k, s) in segments.iter().enumerate() {
            s.validate(d, k)?;
        }
        let spectra: Vec<_> = segments
            .iter()
            .map(|s| match s {
                PathSegment::GeneratorConst { generator, .. } => Some(hermitian_eigen(generator)),
                _ => None,
            })
            .collect();
        let mut evo = Self {
            d,
            segments,
            starts: Vec::new(),
            checkpoints: Vec::new(),
            spectra,
        };
        let mut coords = Coordinates {
            chi: vec![0.0; d],
            theta: 0.0,
            phi: 0.0,
            g: CMatrix::identity(d, d),
        };
        let mut t = 0.0;
        for k in 0..evo.segments.len() {
            evo.starts.push(t);
            evo.checkpoints.push(coords.clone());
            let duration = evo.segments[k].duration();
            coords = evo.advance(k, &evo.checkpoints[k], duration);
            t += duration;
        }
        evo.starts.push(t);
        evo.checkpoints.push(coords);
        Ok(evo)
    }

    /// The identity path of dimension `d`.
    pub fn identity(d: usize) -> Result<Self> {
        Self::new(d, Vec::new())
    }

    /// A single linear Cartan segment.
    pub fn cartan(rates: Vec<f64>, duration: f64) -> Result<Self> {
        Self::new(
            rates.len(),
            vec![PathSegment::CartanLinear { rates, duration }],
        )
    }

    /// Qubit loop that ramps `theta` up from the pole along `phi = 0`, turns
    /// `phi` once through `2 pi` and ramps back down.
    pub fn bloch_cap(theta: f64, ramp: f64, loop_time: f64) -> Result<Self> {
        Self::new(
            2,
            vec![
                PathSegment::BlochLoop {
                    theta_rate: theta / ramp,
                    phi_rate: 0.0,
                    duration: ramp,
                },
                PathSegment::BlochLoop {
                    theta_rate: 0.0,
                    phi_rate: TAU / loop_time,
                    duration: loop_time,
                },
                PathSegment::BlochLoop {
                    theta_rate: -theta / ramp,
                    phi_rate: 0.0,
                    duration: ramp,
                },
            ],
        )
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    /// End of the last segment.
    pub fn duration(&self) -> f64 {
        *self.starts.last().unwrap_or(&0.0)
    }

    /// Segment boundaries, including `0` and the end time.
    pub fn boundaries(&self) -> &[f64] {
        &self.starts
    }

    pub fn is_cartan_only(&self) -> bool {
        self.segments.iter().all(PathSegment::is_cartan)
    }

    fn advance(&self, k: usize, from: &Coordinates, tau: f64) -> Coordinates {
        let mut c = from.clone();
        match &self.segments[k] {
            PathSegment::CartanLinear { rates, .. } => {
                for (x, r) in c.chi.iter_mut().zip(rates) {
                    *x += r * tau;
                }
            }
            PathSegment::CartanHold { .. } => {}
            PathSegment::BlochLoop {
                theta_rate,
                phi_rate,
                ..
            } => {
                c.theta += theta_rate * tau;
                c.phi += phi_rate * tau;
            }
            PathSegment::GeneratorConst { .. } => {
                let (values, vectors) = self.spectra[k].as_ref().expect("generator spectrum");
                c.g = exp_i_hermitian(values, vectors, tau) * &c.g;
            }
        }
        c
    }

    /// Segment index and local time for `t`; `None` past the end.
    fn locate(&self, t: f64, side: Side) -> Result<Option<(usize, f64)>> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::TimeOutOfRange(t));
        }
        let n = self.segments.len();
        let snap = 1e-12 * self.duration().max(1.0);
        for k in 0..n {
            let (start, end) = (self.starts[k], self.starts[k + 1]);
            let inside = match side {
                Side::Right => t >= start - snap && t < end - snap,
                Side::Left => t > start + snap && t <= end + snap,
            };
            if inside {
                return Ok(Some((k, (t - start).clamp(0.0, end - start))));
            }
        }
        Ok(None)
    }

    fn coordinates(&self, t: f64, side: Side) -> Result<(Coordinates, Option<usize>)> {
        match self.locate(t, side)? {
            Some((k, tau)) => Ok((self.advance(k, &self.checkpoints[k], tau), Some(k))),
            None if t <= 1e-12 * self.duration().max(1.0) => {
                Ok((self.checkpoints[0].clone(), None))
            }
            None => Ok((self.checkpoints.last().expect("end state").clone(), None)),
        }
    }

    fn compose(&self, c: &Coordinates, k: Option<usize>) -> (CMatrix, CMatrix) {
        let d = self.d;
        let diag = diag_phases(&c.chi);
        let bloch = if d == 2 {
            bloch_factor(c.theta, c.phi)
        } else {
            CMatrix::identity(d, d)
        };
        let u = &c.g * &bloch * &diag;
        let zero = CMatrix::zeros(d, d);
        let u_dot = match k.map(|k| (k, &self.segments[k])) {
            Some((_, PathSegment::CartanLinear { rates, .. })) => {
                let rates = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    d,
                    rates.iter().map(|&r| C64::new(0.0, r)),
                ));
                &u * rates
            }
            Some((
                _,
                PathSegment::BlochLoop {
                    theta_rate,
                    phi_rate,
                    ..
                },
            )) => &c.g * bloch_derivative(c.theta, c.phi, *theta_rate, *phi_rate) * &diag,
            Some((_, PathSegment::GeneratorConst { generator, .. })) => generator * C64::i() * &u,
            Some((_, PathSegment::CartanHold { .. })) | None => zero,
        };
        (u, u_dot)
    }

    /// `(U(t), dU/dt)` taking the right-hand limit at boundaries.
    pub fn synthesize(&self, t: f64) -> Result<(CMatrix, CMatrix)> {
        self.sample(t, Side::Right)
    }

    /// Coset factor `G V` at time `t`.
    pub fn coset_factor(&self, t: f64) -> Result<CMatrix> {
        let (c, _) = self.coordinates(t, Side::Right)?;
        let bloch = if self.d == 2 {
            bloch_factor(c.theta, c.phi)
        } else {
            CMatrix::identity(self.d, self.d)
        };
        Ok(&c.g * bloch)
    }

    pub fn coset_closed_at(&self, t: f64, tol: f64) -> Result<bool> {
        let v = self.coset_factor(t)?;
        Ok(frobenius(&(v - CMatrix::identity(self.d, self.d))) <= tol)
    }

    /// Accumulated, unreduced Cartan angles. Defined where the coset factor
    /// is closed.
    pub fn cartan_angles(&self, t: f64) -> Result<CartanAngles> {
        let (c, _) = self.coordinates(t, Side::Right)?;
        let v = self.coset_factor(t)?;
        let residual = frobenius(&(v - CMatrix::identity(self.d, self.d)));
        if residual > COSET_TOLERANCE {
            return Err(Error::OpenCosetFactor { t, residual });
        }
        CartanAngles::from_levels(c.chi)
    }

    /// `h(t)` at each requested time.
    pub fn cartan_trajectory(
        &self,
        basis: &crate::algebra::GeneratorBasis,
        times: &[f64],
    ) -> Result<Vec<Vec<f64>>> {
        times
            .iter()
            .map(|&t| self.cartan_angles(t).map(|a| a.h(basis)))
            .collect()
    }

    /// Bloch angles `(theta, phi)` at time `t` (qubits only).
    pub fn bloch_angles(&self, t: f64) -> Result<(f64, f64)> {
        let (c, _) = self.coordinates(t, Side::Right)?;
        Ok((c.theta, c.phi))
    }

    /// `2 int_0^t sin^2(theta/2) dphi` along the Bloch segments.
    pub fn accumulated_solid_angle(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::TimeOutOfRange(t));
        }
        let mut omega = 0.0;
        for (k, seg) in self.segments.iter().enumerate() {
            let start = self.starts[k];
            if start >= t {
                break;
            }
            if let PathSegment::BlochLoop {
                theta_rate,
                phi_rate,
                duration,
            } = seg
            {
                let theta0 = self.checkpoints[k].theta;
                let span = (t - start).min(*duration);
                omega += arc_solid_angle(theta0, *theta_rate, *phi_rate, span);
            }
        }
        Ok(omega)
    }
}

const ARC_PANELS: usize = 512;

fn arc_solid_angle(theta0: f64, theta_rate: f64, phi_rate: f64, span: f64) -> f64 {
    if phi_rate == 0.0 || span == 0.0 {
        return 0.0;
    }
    2.0 * phi_rate
        * quadrature::integrate(
            |tau| (0.5 * (theta0 + theta_rate * tau)).sin().powi(2),
            0.0,
            span,
            ARC_PANELS,
        )
}

impl UnitaryPath for LocalEvolution {
    fn dim(&self) -> usize {
        self.d
    }

    fn sample(&self, t: f64, side: Side) -> Result<(CMatrix, CMatrix)> {
        let (c, k) = self.coordinates(t, side)?;
        Ok(self.compose(&c, k))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.starts.clone()
    }

    fn cartan_angles_at(&self, t: f64) -> Option<CartanAngles> {
        self.cartan_angles(t).ok()
    }
}

/// Solid angle `Omega = 2 oint sin^2(theta/2) dphi` of a closed chain of Bloch
/// segments starting at polar angle `theta_start`.
pub fn solid_angle(theta_start: f64, arcs: &[PathSegment]) -> Result<f64> {
    let mut theta = theta_start;
    let mut phi = 0.0;
    let mut omega = 0.0;
    for (k, seg) in arcs.iter().enumerate() {
        seg.validate(2, k)?;
        match seg {
            PathSegment::BlochLoop {
                theta_rate,
                phi_rate,
                duration,
            } => {
                omega += arc_solid_angle(theta, *theta_rate, *phi_rate, *duration);
                theta += theta_rate * duration;
                phi += phi_rate * duration;
            }
            _ => {
                return Err(Error::InvalidSegment {
                    index: k,
                    reason: "solid angles take Bloch segments only".into(),
                })
            }
        }
    }
    let gap = frobenius(&(bloch_factor(theta, phi) - bloch_factor(theta_start, 0.0)));
    if gap > COSET_TOLERANCE || (theta - theta_start).abs() > 1e-9 {
        return Err(Error::OpenPath(format!(
            "ends at theta = {theta}, phi = {phi} from theta = {theta_start}, phi = 0"
        )));
    }
    Ok(omega)
}

/// Integer `n` (mod `d`) with `exp(i diag(chi)) = e^{2 pi i n/d} 1`, if any.
pub fn lattice_condition_check(angles: &CartanAngles, tol: f64) -> Option<usize> {
    let chi = angles.levels();
    let d = chi.len();
    let mut total: i64 = 0;
    for &c in chi {
        let delta = (chi[0] - c) / TAU;
        let l = delta.round();
        if ((delta - l) * TAU).abs() > tol {
            return None;
        }
        total += l as i64;
    }
    Some(total.rem_euclid(d as i64) as usize)
}

/// Uniform grid `t_i = i t_max / steps`, `i = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, steps: usize) -> Result<Self> {
        if !t_max.is_finite() || t_max <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "t_max = {t_max} must be positive"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidGrid("need at least one step".into()));
        }
        Ok(Self { t_max, steps })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.steps as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i == self.steps {
            self.t_max
        } else {
            self.t_max * i as f64 / self.steps as f64
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|i| self.point(i)).collect()
    }

    /// Whether `t` lies on a grid point (or beyond the grid).
    pub fn contains_node(&self, t: f64) -> bool {
        if t >= self.t_max * (1.0 - 1e-12) {
            return true;
        }
        let x = t / self.dt();
        (x - x.round()).abs() <= 1e-9 * x.abs().max(1.0)
    }
}

/// Local evolutions of both parties on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEvolution {
    pub a: LocalEvolution,
    pub b: LocalEvolution,
    pub grid: TimeGrid,
}

impl PairEvolution {
    /// Segment boundaries inside the grid must be grid points.
    pub fn new(a: LocalEvolution, b: LocalEvolution, grid: TimeGrid) -> Result<Self> {
        for (name, evo) in [("A", &a), ("B", &b)] {
            for &t in evo.boundaries() {
                if !grid.contains_node(t) {
                    return Err(Error::InvalidGrid(format!(
                        "segment boundary t = {t} of path {name} is not a grid point (dt = {})",
                        grid.dt()
                    )));
                }
            }
        }
        Ok(Self { a, b, grid })
    }
}

/// Checks that `u` is unitary and returns `u` unchanged; used by wrappers.
pub fn checked_unitary(u: CMatrix) -> Result<CMatrix> {
    ensure_unitary(&u, 1e-10)?;
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_generators, velocity_vector};
    use crate::linalg::unitarity_residual;
    use std::f64::consts::PI;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) {
        let r = frobenius(&(a - b));
        assert!(r < tol, "residual {r}");
    }

    #[test]
    fn cartan_segment_synthesis() {
        let evo = LocalEvolution::cartan(vec![1.0, 1.0, -2.0], 2.0 * PI).unwrap();
        let t = 0.7;
        let (u, u_dot) = evo.synthesize(t).unwrap();
        close(&u, &diag_phases(&[t, t, -2.0 * t]), 1e-15);
        let expected = diag_phases(&[t, t, -2.0 * t])
            * CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                C64::i(),
                C64::i(),
                C64::new(0.0, -2.0),
            ]));
        close(&u_dot, &expected, 1e-15);
    }

    #[test]
    fn bloch_segment_matches_coset_matrix() {
        let evo = LocalEvolution::new(
            2,
            vec![
                PathSegment::BlochLoop {
                    theta_rate: 1.0,
                    phi_rate: 0.0,
                    duration: PI / 2.0,
                },
                PathSegment::BlochLoop {
                    theta_rate: 0.0,
                    phi_rate: 1.0,
                    duration: TAU,
                },
            ],
        )
        .unwrap();
        let t = PI / 2.0 + 1.3;
        let (u, _) = evo.synthesize(t).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let i = C64::i();
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::from(h),
                i * h * C64::from_polar(1.0, -1.3),
                i * h * C64::from_polar(1.0, 1.3),
                C64::from(h),
            ],
        );
        close(&u, &expected, 1e-15);
    }

    #[test]
    fn empty_path_is_identity() {
        let evo = LocalEvolution::identity(3).unwrap();
        for t in [0.0, 1.0, 100.0] {
            let (u, u_dot) = evo.synthesize(t).unwrap();
            close(&u, &CMatrix::identity(3, 3), 0.0 + 1e-300);
            assert_eq!(frobenius(&u_dot), 0.0);
        }
        let zero = LocalEvolution::cartan(vec![1.0, -1.0], 0.0).unwrap();
        let (u, u_dot) = zero.synthesize(0.0).unwrap();
        close(&u, &CMatrix::identity(2, 2), 1e-300);
        assert_eq!(frobenius(&u_dot), 0.0);
    }

    #[test]
    fn rejects_bad_segments_and_times() {
        assert!(matches!(
            LocalEvolution::cartan(vec![1.0, 1.0, -1.0], 1.0),
            Err(Error::NonzeroPhaseSum { .. })
        ));
        assert!(LocalEvolution::new(
            3,
            vec![PathSegment::BlochLoop {
                theta_rate: 1.0,
                phi_rate: 0.0,
                duration: 1.0
            }]
        )
        .is_err());
        let not_traceless = CMatrix::identity(2, 2);
        assert!(matches!(
            LocalEvolution::new(
                2,
                vec![PathSegment::GeneratorConst {
                    generator: not_traceless,
                    duration: 1.0
                }]
            ),
            Err(Error::NotTracelessHermitian { .. })
        ));
        let evo = LocalEvolution::identity(2).unwrap();
        assert!(matches!(
            evo.synthesize(-1.0),
            Err(Error::TimeOutOfRange(_))
        ));
        assert!(evo.synthesize(f64::NAN).is_err());
    }

    #[test]
    fn cartan_trajectory_examples() {
        let basis2 = make_generators(2).unwrap();
        let evo = LocalEvolution::cartan(vec![1.0, -1.0], PI).unwrap();
        let chi = evo.cartan_angles(PI / 2.0).unwrap();
        assert!((chi.levels()[0] - PI / 2.0).abs() < 1e-15);
        let h = chi.h(&basis2);
        assert!((h[0] - 2f64.sqrt() * PI / 2.0).abs() < 1e-14);

        // piecewise two-qutrit profile, unreduced
        let third = 2.0 * PI / 3.0;
        let mut segs = Vec::new();
        for k in 0..6 {
            let rates = if k % 2 == 0 {
                vec![-1.0, 1.0, 0.0]
            } else {
                vec![-1.0, 0.0, 1.0]
            };
            segs.push(PathSegment::CartanLinear {
                rates,
                duration: third,
            });
        }
        let evo = LocalEvolution::new(3, segs).unwrap();
        let chi = evo.cartan_angles(third).unwrap();
        for (got, want) in chi.levels().iter().zip([-third, third, 0.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let chi = evo.cartan_angles(4.0 * PI).unwrap();
        for (got, want) in chi.levels().iter().zip([-4.0 * PI, 2.0 * PI, 2.0 * PI]) {
            assert!((got - want).abs() < 1e-13);
        }

        let hold = LocalEvolution::new(
            2,
            vec![
                PathSegment::CartanLinear {
                    rates: vec![1.0, -1.0],
                    duration: 1.0,
                },
                PathSegment::CartanHold { duration: 1.0 },
            ],
        )
        .unwrap();
        let a = hold.cartan_angles(1.2).unwrap();
        let b = hold.cartan_angles(1.9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn open_coset_has_no_cartan_angles() {
        let evo = LocalEvolution::bloch_cap(PI / 2.0, 1.0, TAU).unwrap();
        assert!(matches!(
            evo.cartan_angles(2.0),
            Err(Error::OpenCosetFactor { .. })
        ));
        assert!(evo.cartan_angles(2.0 + TAU).is_ok());
        assert!(evo.coset_closed_at(2.0 + TAU, 1e-9).unwrap());
    }

    #[test]
    fn synthesized_unitaries_are_special() {
        let g = CMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(0.2, 0.0),
                C64::new(0.0, 0.5),
                C64::new(0.1, 0.0),
                C64::new(0.0, -0.5),
                C64::new(-0.4, 0.0),
                C64::new(0.3, 0.3),
                C64::new(0.1, 0.0),
                C64::new(0.3, -0.3),
                C64::new(0.2, 0.0),
            ],
        );
        let evo = LocalEvolution::new(
            3,
            vec![
                PathSegment::CartanLinear {
                    rates: vec![1.0, 2.0, -3.0],
                    duration: 1.0,
                },
                PathSegment::GeneratorConst {
                    generator: g,
                    duration: 2.0,
                },
                PathSegment::CartanLinear {
                    rates: vec![-1.0, 0.5, 0.5],
                    duration: 1.0,
                },
            ],
        )
        .unwrap();
        for k in 0..=40 {
            let t = 0.1 * k as f64;
            let (u, u_dot) = evo.synthesize(t).unwrap();
            assert!(unitarity_residual(&u) < 1e-12);
            assert!((u.determinant() - C64::from(1.0)).norm() < 1e-12);
            // SU paths have traceless U^dagger dU
            let basis = make_generators(3).unwrap();
            velocity_vector(&basis, &u, &u_dot, 1e-10).unwrap();
        }
    }

    #[test]
    fn paths_are_continuous_at_boundaries() {
        let evo = LocalEvolution::bloch_cap(1.0, 0.5, 2.0).unwrap();
        for &b in evo.boundaries() {
            let (l, _) = evo.sample(b, Side::Left).unwrap();
            let (r, _) = evo.sample(b, Side::Right).unwrap();
            close(&l, &r, 1e-14);
        }
    }

    #[test]
    fn derivative_matches_central_differences() {
        let evo = LocalEvolution::new(
            2,
            vec![
                PathSegment::BlochLoop {
                    theta_rate: 0.7,
                    phi_rate: 1.9,
                    duration: 3.0,
                },
                PathSegment::CartanLinear {
                    rates: vec![0.4, -0.4],
                    duration: 3.0,
                },
            ],
        )
        .unwrap();
        for t in [0.9, 4.1] {
            let (_, exact) = evo.synthesize(t).unwrap();
            let err = |h: f64| {
                let (p, _) = evo.synthesize(t + h).unwrap();
                let (m, _) = evo.synthesize(t - h).unwrap();
                frobenius(&((p - m) / C64::from(2.0 * h) - &exact))
            };
            let order = (err(1e-2) / err(5e-3)).log2();
            assert!(order > 1.9, "order {order}");
        }
    }

    #[test]
    fn solid_angle_examples() {
        let turn = |theta_rate: f64, phi_rate: f64, duration: f64| PathSegment::BlochLoop {
            theta_rate,
            phi_rate,
            duration,
        };
        let omega = solid_angle(PI / 2.0, &[turn(0.0, 1.0, TAU)]).unwrap();
        assert!((omega - TAU).abs() < 1e-12);
        let omega = solid_angle(0.0, &[turn(0.0, 1.0, TAU)]).unwrap();
        assert!(omega.abs() < 1e-15);
        let omega = solid_angle(2.0 * PI / 3.0, &[turn(0.0, 1.0, TAU)]).unwrap();
        assert!((omega - 3.0 * PI).abs() < 1e-12);

        let cap = [
            turn(1.0, 0.0, 1.0),
            turn(0.0, 1.0, TAU),
            turn(-1.0, 0.0, 1.0),
        ];
        let omega = solid_angle(0.0, &cap).unwrap();
        assert!((omega - TAU * (1.0 - 1f64.cos())).abs() < 1e-12);

        let reversed = [
            turn(1.0, 0.0, 1.0),
            turn(0.0, -1.0, TAU),
            turn(-1.0, 0.0, 1.0),
        ];
        assert!((solid_angle(0.0, &reversed).unwrap() + omega).abs() < 1e-12);
        let twice = [cap.as_slice(), cap.as_slice()].concat();
        assert!((solid_angle(0.0, &twice).unwrap() - 2.0 * omega).abs() < 1e-12);

        assert!(matches!(
            solid_angle(PI / 2.0, &[turn(0.0, 1.0, PI)]),
            Err(Error::OpenPath(_))
        ));

        let evo = LocalEvolution::bloch_cap(1.0, 1.0, TAU).unwrap();
        assert!((evo.accumulated_solid_angle(10.0).unwrap() - omega).abs() < 1e-12);
        let half = evo.accumulated_solid_angle(1.0 + PI).unwrap();
        assert!((half - omega / 2.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_condition_examples() {
        assert_eq!(
            lattice_condition_check(&CartanAngles::zero(4), 1e-9),
            Some(0)
        );
        let third = 2.0 * PI / 3.0;
        let a = CartanAngles::from_levels(vec![third, third, third - TAU]).unwrap();
        assert_eq!(lattice_condition_check(&a, 1e-9), Some(1));
        let b = CartanAngles::from_levels(vec![PI / 2.0, -PI / 2.0]).unwrap();
        assert_eq!(lattice_condition_check(&b, 1e-9), None);
        let c = CartanAngles::from_levels(vec![PI, -PI]).unwrap();
        assert_eq!(lattice_condition_check(&c, 1e-9), Some(1));
    }

    #[test]
    fn grid_alignment_is_enforced() {
        let evo = LocalEvolution::new(
            2,
            vec![
                PathSegment::CartanLinear {
                    rates: vec![1.0, -1.0],
                    duration: 1.0,
                },
                PathSegment::CartanHold { duration: 1.0 },
            ],
        )
        .unwrap();
        let id = LocalEvolution::identity(2).unwrap();
        assert!(
            PairEvolution::new(evo.clone(), id.clone(), TimeGrid::new(2.0, 10).unwrap()).is_ok()
        );
        assert!(matches!(
            PairEvolution::new(evo, id, TimeGrid::new(2.0, 7).unwrap()),
            Err(Error::InvalidGrid(_))
        ));
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
    }
}
