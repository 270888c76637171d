//! Total, dynamical and geometric phases along local evolutions.
//!
//! For a pure two-qudit state `alpha(t) = U_A(t) alpha0 U_B(t)^T` the
//! geometric phase is
//!
//! ```text
//! phi_g(t) = arg Tr[alpha0^dagger alpha(t)] - D(t)
//! D(t)     = -i int_0^t (Tr[rho_A U_A^dagger dU_A] + Tr[rho_B U_B^dagger dU_B]) dt
//! ```
//!
//! with `rho_A = alpha0 alpha0^dagger` and `rho_B = (alpha0^dagger alpha0)^T`.
//! A single qudit uses `arg Tr[rho0 U(t)]` and `-i int Tr[rho0 U^dagger dU]`.
//!
//! `D` is integrated interval by interval with Simpson's rule on the interval
//! midpoint, taking one-sided limits at the interval ends. Segment boundaries
//! therefore never straddle a panel and the rule stays fourth order on any
//! grid that contains them.

use std::f64::consts::{FRAC_PI_4, TAU};

use nalgebra::DVector;

use crate::algebra::{velocity_vector, GeneratorBasis};
use crate::evolution::{
    lattice_condition_check, LocalEvolution, PairEvolution, Side, TimeGrid, UnitaryPath,
};
use crate::linalg::{spectral_radius_hermitian, trace_of_product, wrap_angle};
use crate::quadrature::simpson_panel;
use crate::state::{reduced_densities, CoefficientMatrix, EntanglementReport, QuditDensity};
use crate::{CMatrix, Error, Result, C64};

/// Overlaps below this magnitude have no meaningful argument.
pub const INDETERMINATE_OVERLAP: f64 = 1e-12;

pub const DEFAULT_CYCLIC_EPSILON: f64 = 1e-9;

/// Tolerance used when annotating cycles with lattice indices.
pub const LATTICE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseTrace {
    pub t: Vec<f64>,
    pub overlap: Vec<C64>,
    pub total_phase: Vec<f64>,
    pub dynamical_phase: Vec<f64>,
    pub geometric_phase: Vec<f64>,
    pub overlap_mag: Vec<f64>,
    /// Samples whose overlap was too small to carry a phase.
    pub indeterminate: Vec<bool>,
}

impl PhaseTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Index of the grid sample closest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        match self.t.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.t.len() => self.t.len() - 1,
            Err(i) => {
                if (self.t[i] - t).abs() < (t - self.t[i - 1]).abs() {
                    i
                } else {
                    i - 1
                }
            }
        }
    }

    pub fn final_geometric_phase(&self) -> f64 {
        *self.geometric_phase.last().unwrap_or(&0.0)
    }
}

/// One party of a trace: its initial reduced density and its path.
struct Party<'a> {
    rho: &'a CMatrix,
    path: &'a dyn UnitaryPath,
}

struct Sample {
    us: Vec<(CMatrix, CMatrix)>,
}

impl Sample {
    fn take(parties: &[Party], t: f64, side: Side) -> Result<Self> {
        let us = parties
            .iter()
            .map(|p| p.path.sample(t, side))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { us })
    }

    /// `-i sum_j Tr[rho_j U_j^dagger dU_j]`.
    fn rate(&self, parties: &[Party]) -> f64 {
        parties
            .iter()
            .zip(&self.us)
            .map(|(p, (u, u_dot))| {
                let k = u.adjoint() * u_dot;
                (trace_of_product(p.rho, &k) * C64::new(0.0, -1.0)).re
            })
            .sum()
    }

    /// Sum of spectral radii of `-i U^dagger dU`: a bound on the phase speed.
    fn speed(&self) -> f64 {
        self.us
            .iter()
            .map(|(u, u_dot)| {
                let k = u.adjoint() * u_dot * C64::new(0.0, -1.0);
                let herm = (&k + k.adjoint()) * C64::from(0.5);
                spectral_radius_hermitian(&herm)
            })
            .sum()
    }
}

fn build_trace<F>(parties: &[Party], grid: &TimeGrid, overlap: F) -> Result<PhaseTrace>
where
    F: Fn(&Sample) -> C64,
{
    let n = grid.steps();
    let dt = grid.dt();
    let mut trace = PhaseTrace {
        t: Vec::with_capacity(n + 1),
        overlap: Vec::with_capacity(n + 1),
        total_phase: Vec::with_capacity(n + 1),
        dynamical_phase: Vec::with_capacity(n + 1),
        geometric_phase: Vec::with_capacity(n + 1),
        overlap_mag: Vec::with_capacity(n + 1),
        indeterminate: Vec::with_capacity(n + 1),
    };
    let mut left = Sample::take(parties, 0.0, Side::Right)?;
    let mut dynamical = 0.0;
    let mut total = 0.0;
    for i in 0..=n {
        let t = grid.point(i);
        let o = overlap(&left);
        let mag = o.norm();
        let indeterminate = mag < INDETERMINATE_OVERLAP;
        if i == 0 {
            total = if indeterminate { 0.0 } else { o.arg() };
        } else if indeterminate {
            total += dynamical - trace.dynamical_phase[i - 1];
        } else {
            total += wrap_angle(o.arg() - total);
        }
        trace.t.push(t);
        trace.overlap.push(o);
        trace.overlap_mag.push(mag);
        trace.indeterminate.push(indeterminate);
        trace.total_phase.push(total);
        trace.dynamical_phase.push(dynamical);
        trace.geometric_phase.push(total - dynamical);
        if i == n {
            break;
        }
        let increment = left.speed() * dt;
        if increment >= FRAC_PI_4 {
            return Err(Error::GridTooCoarse { t, increment });
        }
        let t_next = grid.point(i + 1);
        let mid = Sample::take(parties, 0.5 * (t + t_next), Side::Right)?;
        let right = Sample::take(parties, t_next, Side::Left)?;
        dynamical += simpson_panel(
            left.rate(parties),
            mid.rate(parties),
            right.rate(parties),
            t_next - t,
        );
        left = Sample::take(parties, t_next, Side::Right)?;
        // the right limit matches the left one away from breakpoints
        let _ = right;
    }
    Ok(trace)
}

/// Phase trace of a two-qudit pure state under local evolutions.
pub fn run_trace(alpha0: &CoefficientMatrix, pair: &PairEvolution) -> Result<PhaseTrace> {
    run_trace_paths(alpha0, &pair.a, &pair.b, &pair.grid)
}

/// As [`run_trace`] for arbitrary path implementations.
pub fn run_trace_paths(
    alpha0: &CoefficientMatrix,
    a: &dyn UnitaryPath,
    b: &dyn UnitaryPath,
    grid: &TimeGrid,
) -> Result<PhaseTrace> {
    check_dims(alpha0, a.dim(), b.dim())?;
    let (rho_a, rho_b) = reduced_densities(alpha0);
    let parties = [
        Party {
            rho: &rho_a,
            path: a,
        },
        Party {
            rho: &rho_b,
            path: b,
        },
    ];
    let alpha = alpha0.matrix();
    let alpha_dag = alpha.adjoint();
    build_trace(&parties, grid, |s| {
        let (ua, _) = &s.us[0];
        let (ub, _) = &s.us[1];
        trace_of_product(&alpha_dag, &(ua * alpha * ub.transpose()))
    })
}

fn check_dims(alpha0: &CoefficientMatrix, d_a: usize, d_b: usize) -> Result<()> {
    if alpha0.d_a() != d_a {
        return Err(Error::DimensionMismatch {
            expected: alpha0.d_a(),
            got: d_a,
            context: "path A dimension",
        });
    }
    if alpha0.d_b() != d_b {
        return Err(Error::DimensionMismatch {
            expected: alpha0.d_b(),
            got: d_b,
            context: "path B dimension",
        });
    }
    Ok(())
}

/// Phase trace of a single, possibly mixed, qudit.
pub fn single_qudit_trace(
    rho0: &QuditDensity,
    evo: &dyn UnitaryPath,
    grid: &TimeGrid,
) -> Result<PhaseTrace> {
    if evo.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            got: evo.dim(),
            context: "path dimension",
        });
    }
    let rho = rho0.matrix();
    let parties = [Party { rho, path: evo }];
    build_trace(&parties, grid, |s| trace_of_product(rho, &s.us[0].0))
}

/// `<psi0|psi(t)>` and its exact time derivative.
pub fn overlap_with_derivative(
    alpha0: &CoefficientMatrix,
    a: &dyn UnitaryPath,
    b: &dyn UnitaryPath,
    t: f64,
    side: Side,
) -> Result<(C64, C64)> {
    let (ua, ua_dot) = a.sample(t, side)?;
    let (ub, ub_dot) = b.sample(t, side)?;
    let alpha = alpha0.matrix();
    let dag = alpha.adjoint();
    let o = trace_of_product(&dag, &(&ua * alpha * ub.transpose()));
    let o_dot = trace_of_product(
        &dag,
        &(&ua_dot * alpha * ub.transpose() + &ua * alpha * ub_dot.transpose()),
    );
    Ok((o, o_dot))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicEvent {
    pub t_cycle: f64,
    /// Total phase wrapped into `[0, 2 pi)`.
    pub phase: f64,
    /// Total phase on the unwrapped branch of the trace.
    pub unwrapped_phase: f64,
    pub overlap_mag: f64,
    pub n_a: Option<usize>,
    pub n_b: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CycleReport {
    pub events: Vec<CyclicEvent>,
    /// Every sample is cyclic; `events` then holds only `t = 0`.
    pub continuum: bool,
}

/// Refine a local maximum of `|o|` inside `[lo, hi]` by bisection on
/// `Re(conj(o) do/dt)`, falling back to the sampled vertex.
fn refine_peak(
    alpha0: &CoefficientMatrix,
    pair: &PairEvolution,
    lo: f64,
    hi: f64,
    guess: f64,
) -> Result<f64> {
    let slope = |t: f64, side: Side| -> Result<f64> {
        let (o, o_dot) = overlap_with_derivative(alpha0, &pair.a, &pair.b, t, side)?;
        Ok((o.conj() * o_dot).re)
    };
    let g_lo = slope(lo, Side::Right)?;
    let g_hi = slope(hi, Side::Left)?;
    if g_lo > 0.0 && g_hi < 0.0 {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if slope(m, Side::Right)? > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        return Ok(0.5 * (a + b));
    }
    if g_hi >= 0.0 {
        return Ok(hi);
    }
    Ok(guess)
}

/// Vertex of the parabola through three equally spaced samples.
fn quadratic_vertex(t: [f64; 3], y: [f64; 3]) -> f64 {
    let h = t[1] - t[0];
    let denom = y[0] - 2.0 * y[1] + y[2];
    if denom.abs() < 1e-300 {
        return t[1];
    }
    (t[1] + 0.5 * h * (y[0] - y[2]) / denom).clamp(t[0], t[2])
}

/// Cyclic points of a two-qudit trace.
pub fn detect_cycles(
    trace: &PhaseTrace,
    alpha0: &CoefficientMatrix,
    pair: &PairEvolution,
    epsilon: f64,
) -> Result<CycleReport> {
    let mags = &trace.overlap_mag;
    let n = mags.len();
    if n == 0 {
        return Ok(CycleReport::default());
    }
    let annotate = |t: f64| {
        let n_a = pair
            .a
            .cartan_angles_at(t)
            .and_then(|c| lattice_condition_check(&c, LATTICE_TOLERANCE));
        let n_b = pair
            .b
            .cartan_angles_at(t)
            .and_then(|c| lattice_condition_check(&c, LATTICE_TOLERANCE));
        (n_a, n_b)
    };
    let event_at = |t: f64, reference: f64| -> Result<CyclicEvent> {
        let (o, _) = overlap_with_derivative(alpha0, &pair.a, &pair.b, t, Side::Right)?;
        let (n_a, n_b) = annotate(t);
        let arg = o.arg();
        Ok(CyclicEvent {
            t_cycle: t,
            phase: arg.rem_euclid(TAU),
            unwrapped_phase: reference + wrap_angle(arg - reference),
            overlap_mag: o.norm(),
            n_a,
            n_b,
        })
    };
    if mags.iter().all(|&m| m >= 1.0 - epsilon) {
        return Ok(CycleReport {
            events: vec![event_at(0.0, 0.0)?],
            continuum: true,
        });
    }
    let mut events: Vec<CyclicEvent> = Vec::new();
    let mut i = 1;
    while i < n {
        let rising = mags[i] >= mags[i - 1];
        // skip across plateaus to their last sample
        let mut j = i;
        while j + 1 < n && mags[j + 1] == mags[i] {
            j += 1;
        }
        let falling = j + 1 == n || mags[j + 1] < mags[j];
        if rising && falling && mags[i] > 0.5 {
            let lo = trace.t[i - 1];
            let hi = if j + 1 < n {
                trace.t[j + 1]
            } else {
                trace.t[j]
            };
            let guess = if j + 1 < n && i == j {
                quadratic_vertex(
                    [trace.t[i - 1], trace.t[i], trace.t[i + 1]],
                    [mags[i - 1], mags[i], mags[i + 1]],
                )
            } else {
                trace.t[i]
            };
            let t_star = refine_peak(alpha0, pair, lo, hi, guess)?;
            let reference = trace.total_phase[trace.nearest_index(t_star)];
            let event = event_at(t_star, reference)?;
            if event.overlap_mag >= 1.0 - epsilon {
                let duplicate = events
                    .last()
                    .is_some_and(|e| (e.t_cycle - t_star).abs() < 1e-9);
                if !duplicate {
                    events.push(event);
                }
            }
        }
        i = j + 1;
    }
    Ok(CycleReport {
        events,
        continuum: false,
    })
}

/// Values `2 pi (n_A/d_A + n_B/d_B) mod 2 pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalLattice {
    pub d_a: usize,
    pub d_b: usize,
    /// Common denominator `L = lcm(d_A, d_B)`.
    pub denominator: usize,
    /// Numerators `m` of `2 pi m / L`, sorted.
    pub numerators: Vec<usize>,
    pub values: Vec<f64>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn fractional_lattice(d_a: usize, d_b: usize) -> Result<FractionalLattice> {
    for d in [d_a, d_b] {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
    }
    let l = d_a / gcd(d_a, d_b) * d_b;
    let mut numerators: Vec<usize> = (0..d_a)
        .flat_map(|n_a| (0..d_b).map(move |n_b| (n_a * (l / d_a) + n_b * (l / d_b)) % l))
        .collect();
    numerators.sort_unstable();
    numerators.dedup();
    let values = numerators
        .iter()
        .map(|&m| TAU * m as f64 / l as f64)
        .collect();
    Ok(FractionalLattice {
        d_a,
        d_b,
        denominator: l,
        numerators,
        values,
    })
}

impl FractionalLattice {
    /// Circular distance from `phase` to the nearest lattice value.
    pub fn distance(&self, phase: f64) -> f64 {
        self.values
            .iter()
            .map(|v| wrap_angle(phase - v).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, phase: f64, tol: f64) -> bool {
        self.distance(phase) <= tol
    }

    /// Lattice numerator closest to `phase`.
    pub fn nearest(&self, phase: f64) -> usize {
        let l = self.denominator as f64;
        ((phase.rem_euclid(TAU) / TAU * l).round() as usize) % self.denominator
    }
}

/// Geometric phase of a cyclic evolution from its fractional indices and
/// loop integrals `oint dx_j = int u_j dt`:
///
/// ```text
/// phi_g = 2 pi (n_A/d_A + n_B/d_B) - w_A q_A.oint dx_A - w_B q_B.oint dx_B
/// ```
pub fn master_phase_formula(
    report: &EntanglementReport,
    q_hat_a: &DVector<f64>,
    q_hat_b: &DVector<f64>,
    loop_a: &DVector<f64>,
    loop_b: &DVector<f64>,
    n_a: i64,
    n_b: i64,
) -> Result<f64> {
    let len = |d: usize| d * d - 1;
    for (v, d, context) in [
        (q_hat_a, report.d_a, "q_hat_A"),
        (loop_a, report.d_a, "loop integral A"),
        (q_hat_b, report.d_b, "q_hat_B"),
        (loop_b, report.d_b, "loop integral B"),
    ] {
        if v.len() != len(d) {
            return Err(Error::DimensionMismatch {
                expected: len(d),
                got: v.len(),
                context,
            });
        }
    }
    let fractional = TAU * (n_a as f64 / report.d_a as f64 + n_b as f64 / report.d_b as f64);
    Ok(fractional
        - report.weight_a() * q_hat_a.dot(loop_a)
        - report.weight_b() * q_hat_b.dot(loop_b))
}

/// `int u dt` over `[0, t_end]` on the grid, with `U^dagger dU = i u.T`.
pub fn connection_integral(
    basis: &GeneratorBasis,
    path: &LocalEvolution,
    grid: &TimeGrid,
    t_end: f64,
) -> Result<DVector<f64>> {
    let mut acc = DVector::zeros(basis.len());
    let u_at = |t: f64, side: Side| -> Result<DVector<f64>> {
        let (u, u_dot) = path.sample(t, side)?;
        velocity_vector(basis, &u, &u_dot, 1e-9)
    };
    for i in 0..grid.steps() {
        let (t0, t1) = (grid.point(i), grid.point(i + 1));
        if t0 >= t_end {
            break;
        }
        let t1 = t1.min(t_end);
        let l = u_at(t0, Side::Right)?;
        let m = u_at(0.5 * (t0 + t1), Side::Right)?;
        let r = u_at(t1, Side::Left)?;
        acc += (l + m * 4.0 + r) * ((t1 - t0) / 6.0);
    }
    Ok(acc)
}
