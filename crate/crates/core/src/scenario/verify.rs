//! Engine against closed form, plus the invariant suite, for one scenario.

use std::fmt::Write as _;

use super::config::{Scenario, System};
use super::exit;
use super::ScenarioResult;
use crate::algebra::make_generators;
use crate::closed_form::{
    cartan_phasor, qubit_qutrit_dual, qubit_qutrit_effective, single_qubit_partial,
    single_qudit_diagonal, two_qubit_partial, two_qudit_diagonal, ClosedFormResult,
};
use crate::evolution::{LocalEvolution, PairEvolution, PathSegment, UnitaryPath};
use crate::linalg::{is_diagonal, unitarity_residual, wrap_angle};
use crate::phase::{
    detect_cycles, fractional_lattice, run_trace, single_qudit_trace, CycleReport, PhaseTrace,
};
use crate::state::{
    apply_local, entanglement_report, CoefficientMatrix, DiagonalProfile, QuditDensity,
};
use crate::{CMatrix, Result};

/// Samples with a smaller overlap have no reliable phase and are skipped.
pub const MIN_OVERLAP: f64 = 1e-8;
/// Bound on invariant drift and unitarity residuals.
pub const INVARIANT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub oracle: &'static str,
    pub samples: usize,
    pub skipped: usize,
    /// `None` when the oracle fixes only the geometric phase.
    pub max_total_deviation: Option<f64>,
    pub max_geometric_deviation: f64,
}

impl Comparison {
    pub fn max_deviation(&self) -> f64 {
        self.max_total_deviation
            .unwrap_or(0.0)
            .max(self.max_geometric_deviation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub name: String,
    pub tolerance: f64,
    pub comparison: Option<Comparison>,
    /// `(name, residual)` pairs, each held to [`INVARIANT_TOLERANCE`].
    pub invariants: Vec<(String, f64)>,
    pub cycles: Option<CycleReport>,
    pub lattice: Option<(usize, usize)>,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        if self
            .invariants
            .iter()
            .any(|(_, r)| r.is_nan() || *r > INVARIANT_TOLERANCE)
        {
            return exit::TOLERANCE_EXCEEDED;
        }
        match &self.comparison {
            None => exit::NO_ORACLE,
            Some(c) if c.max_deviation().is_nan() || c.max_deviation() > self.tolerance => {
                exit::TOLERANCE_EXCEEDED
            }
            Some(_) => exit::OK,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {}", self.name);
        match &self.comparison {
            Some(c) => {
                let _ = writeln!(
                    out,
                    "oracle {} ({} samples, {} skipped)",
                    c.oracle, c.samples, c.skipped
                );
                if let Some(d) = c.max_total_deviation {
                    let _ = writeln!(out, "  max |total phase deviation|     {d:.3e}");
                }
                let _ = writeln!(
                    out,
                    "  max |geometric phase deviation| {:.3e}",
                    c.max_geometric_deviation
                );
                let verdict = if c.max_deviation() <= self.tolerance {
                    "ok"
                } else {
                    "EXCEEDED"
                };
                let _ = writeln!(out, "  tolerance {:.1e}: {verdict}", self.tolerance);
            }
            None => {
                let _ = writeln!(
                    out,
                    "no closed form covers this scenario; engine-only report"
                );
            }
        }
        let _ = writeln!(out, "invariants (bound {INVARIANT_TOLERANCE:.0e})");
        for (name, r) in &self.invariants {
            let flag = if *r <= INVARIANT_TOLERANCE {
                ""
            } else {
                "  EXCEEDED"
            };
            let _ = writeln!(out, "  {name:<28} {r:.3e}{flag}");
        }
        if let Some(cycles) = &self.cycles {
            if cycles.continuum {
                let _ = writeln!(out, "cycles: cyclic at every sample");
            } else {
                let _ = writeln!(out, "cycles: {}", cycles.events.len());
            }
            let lattice = self
                .lattice
                .and_then(|(a, b)| fractional_lattice(a, b).ok());
            for e in &cycles.events {
                let on = lattice
                    .as_ref()
                    .map(|l| {
                        if l.contains(e.phase, 1e-6) {
                            "on lattice"
                        } else {
                            "OFF lattice"
                        }
                    })
                    .unwrap_or("");
                let _ = writeln!(
                    out,
                    "  t = {:.9}  phase = {:.9}  |o| = {:.12}  {on}",
                    e.t_cycle, e.phase, e.overlap_mag
                );
            }
        }
        out
    }
}

/// Circular deviations of engine phases from an oracle at one sample.
fn deviations(
    r: &ClosedFormResult,
    trace: &PhaseTrace,
    i: usize,
    total_too: bool,
) -> (Option<f64>, f64) {
    let g = wrap_angle(r.phi_g - trace.geometric_phase[i]).abs();
    let t = total_too.then(|| wrap_angle(r.phi_total_bar - trace.total_phase[i]).abs());
    (t, g)
}

struct Accumulator {
    oracle: &'static str,
    total_too: bool,
    samples: usize,
    skipped: usize,
    total: f64,
    geometric: f64,
}

impl Accumulator {
    fn new(oracle: &'static str, total_too: bool) -> Self {
        Self {
            oracle,
            total_too,
            samples: 0,
            skipped: 0,
            total: 0.0,
            geometric: 0.0,
        }
    }

    fn add(&mut self, trace: &PhaseTrace, i: usize, r: Result<ClosedFormResult>) -> Result<()> {
        if trace.overlap_mag[i] < MIN_OVERLAP {
            self.skipped += 1;
            return Ok(());
        }
        let (t, g) = deviations(&r?, trace, i, self.total_too);
        self.samples += 1;
        self.total = self.total.max(t.unwrap_or(0.0));
        self.geometric = self.geometric.max(g);
        Ok(())
    }

    fn finish(self) -> Comparison {
        Comparison {
            oracle: self.oracle,
            samples: self.samples,
            skipped: self.skipped,
            max_total_deviation: self.total_too.then_some(self.total),
            max_geometric_deviation: self.geometric,
        }
    }
}

fn is_bloch_or_cartan(evo: &LocalEvolution) -> bool {
    evo.segments()
        .iter()
        .all(|s| s.is_cartan() || matches!(s, PathSegment::BlochLoop { .. }))
}

/// Profile reproducing diagonal weights `w_n = 1/d + weight x_n`.
fn profile_from_weights(w: &[f64]) -> Result<DiagonalProfile> {
    let d = w.len() as f64;
    let dev: Vec<f64> = w.iter().map(|v| v - 1.0 / d).collect();
    let norm = dev.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-12 {
        let basis = make_generators(w.len())?;
        let mut e = nalgebra::DVector::zeros(basis.len());
        e[0] = 1.0;
        return DiagonalProfile::from_direction(&basis, &e);
    }
    DiagonalProfile::new(dev.iter().map(|v| v / norm).collect())
}

fn pair_comparison(
    alpha: &CoefficientMatrix,
    pair: &PairEvolution,
    trace: &PhaseTrace,
) -> Result<Option<Comparison>> {
    let m = alpha.matrix();
    let (d_a, d_b) = (alpha.d_a(), alpha.d_b());
    let report = entanglement_report(alpha);
    let diagonal = alpha.is_diagonal(1e-12);
    let weights: Vec<Vec<f64>> = (0..d_a)
        .map(|r| (0..d_b).map(|c| m[(r, c)].norm_sqr()).collect())
        .collect();

    if pair.a.is_cartan_only() && pair.b.is_cartan_only() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let dual = (d_a, d_b) == (2, 3)
            && (0..2).all(|r| {
                (0..3).all(|c| {
                    let want = match (r, c) {
                        (0, 0) => h,
                        (1, 1) | (1, 2) => 0.5,
                        _ => 0.0,
                    };
                    (m[(r, c)].re - want).abs() < 1e-12 && m[(r, c)].im.abs() < 1e-12
                })
            });
        let real_diag =
            diagonal && (0..d_a).all(|n| m[(n, n)].im.abs() < 1e-12 && m[(n, n)].re >= 0.0);
        let qubit_ordered = d_a == 2 && weights[0][0] >= weights[1][1];
        let mut acc = if dual {
            Accumulator::new("qubit-qutrit dual form", true)
        } else if d_a == d_b && diagonal {
            Accumulator::new("equal-dimension diagonal form", true)
        } else if (d_a, d_b) == (2, 3) && real_diag && qubit_ordered {
            Accumulator::new(
                "qubit-qutrit effective qubit form (geometric phase only)",
                false,
            )
        } else {
            Accumulator::new("diagonal-path phasor sum", true)
        };
        let profile = if d_a == d_b && diagonal {
            Some(profile_from_weights(
                &(0..d_a).map(|n| weights[n][n]).collect::<Vec<_>>(),
            )?)
        } else {
            None
        };
        for (i, &t) in trace.t.iter().enumerate() {
            let chi_a = pair.a.cartan_angles(t)?.levels().to_vec();
            let chi_b = pair.b.cartan_angles(t)?.levels().to_vec();
            let r = match acc.oracle {
                "qubit-qutrit dual form" => {
                    qubit_qutrit_dual(chi_a[0], chi_b[0], chi_b[1], chi_b[2])
                }
                "equal-dimension diagonal form" => {
                    let chi_t: Vec<f64> = chi_a.iter().zip(&chi_b).map(|(a, b)| a + b).collect();
                    two_qudit_diagonal(
                        report.concurrence.min(report.max_concurrence),
                        profile.as_ref().unwrap(),
                        &chi_t,
                    )
                }
                "diagonal-path phasor sum" => cartan_phasor(&weights, &chi_a, &chi_b),
                _ => qubit_qutrit_effective(
                    report.concurrence.min(1.0),
                    chi_a[0],
                    chi_b[0],
                    chi_b[1],
                ),
            };
            acc.add(trace, i, r)?;
        }
        return Ok(Some(acc.finish()));
    }

    let qubits = (d_a, d_b) == (2, 2);
    if qubits
        && diagonal
        && weights[0][0] >= weights[1][1]
        && is_bloch_or_cartan(&pair.a)
        && is_bloch_or_cartan(&pair.b)
    {
        let mut acc = Accumulator::new("two-qubit partial cycle form", true);
        for (i, &t) in trace.t.iter().enumerate() {
            let closed = pair.a.coset_closed_at(t, 1e-9)? && pair.b.coset_closed_at(t, 1e-9)?;
            if !closed {
                continue;
            }
            let chi_a = pair.a.cartan_angles(t)?.levels()[0];
            let chi_b = pair.b.cartan_angles(t)?.levels()[0];
            let r = two_qubit_partial(
                report.concurrence.min(1.0),
                chi_a,
                chi_b,
                pair.a.accumulated_solid_angle(t)?,
                pair.b.accumulated_solid_angle(t)?,
            );
            acc.add(trace, i, r)?;
        }
        return Ok(Some(acc.finish()));
    }
    Ok(None)
}

fn single_comparison(
    rho: &QuditDensity,
    path: &LocalEvolution,
    trace: &PhaseTrace,
) -> Result<Option<Comparison>> {
    let d = rho.dim();
    if !is_diagonal(rho.matrix(), 1e-12) {
        return Ok(None);
    }
    let w: Vec<f64> = rho.matrix().diagonal().iter().map(|z| z.re).collect();
    if path.is_cartan_only() {
        let profile = profile_from_weights(&w)?;
        let mut acc = Accumulator::new("single-qudit diagonal form", true);
        for (i, &t) in trace.t.iter().enumerate() {
            let chi = path.cartan_angles(t)?;
            acc.add(
                trace,
                i,
                single_qudit_diagonal(rho.q(), &profile, chi.levels()),
            )?;
        }
        return Ok(Some(acc.finish()));
    }
    if d == 2 && is_bloch_or_cartan(path) {
        let q = w[0] - w[1];
        let mut acc = Accumulator::new("single-qubit partial cycle form", true);
        for (i, &t) in trace.t.iter().enumerate() {
            if !path.coset_closed_at(t, 1e-9)? {
                continue;
            }
            let chi = path.cartan_angles(t)?.levels()[0];
            let r = single_qubit_partial(q, chi, path.accumulated_solid_angle(t)?);
            acc.add(trace, i, Ok(r))?;
        }
        return Ok(Some(acc.finish()));
    }
    Ok(None)
}

fn max_unitarity_residual(paths: &[&LocalEvolution], times: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in paths {
        for &t in times {
            let (u, _) = p.synthesize(t)?;
            worst = worst.max(unitarity_residual(&u));
        }
    }
    Ok(worst)
}

fn pair_invariants(alpha: &CoefficientMatrix, pair: &PairEvolution) -> Result<Vec<(String, f64)>> {
    let times = pair.grid.times();
    let before = entanglement_report(alpha);
    let mut drift = [0.0f64; 4];
    for &t in times
        .iter()
        .step_by((times.len() / 64).max(1))
        .chain(times.last())
    {
        let (ua, _) = pair.a.sample(t, crate::evolution::Side::Right)?;
        let (ub, _) = pair.b.sample(t, crate::evolution::Side::Right)?;
        let after = entanglement_report(&apply_local(alpha, &ua, &ub)?);
        drift[0] = drift[0].max((after.concurrence - before.concurrence).abs());
        drift[1] = drift[1].max((after.max_concurrence - before.max_concurrence).abs());
        for (x, y) in after.trace_powers.iter().zip(&before.trace_powers) {
            drift[2] = drift[2].max((x - y).abs());
        }
        drift[3] = drift[3].max((after.det_q - before.det_q).abs());
    }
    Ok(vec![
        ("concurrence drift".into(), drift[0]),
        ("max concurrence drift".into(), drift[1]),
        ("Tr[Q^2p] drift".into(), drift[2]),
        ("|det Q| drift".into(), drift[3]),
        (
            "max unitarity residual".into(),
            max_unitarity_residual(&[&pair.a, &pair.b], &times)?,
        ),
    ])
}

fn single_invariants(
    rho: &QuditDensity,
    path: &LocalEvolution,
    times: &[f64],
) -> Result<Vec<(String, f64)>> {
    let mut drift = 0.0f64;
    let p0 = rho.purity_scalar();
    for &t in times.iter().step_by((times.len() / 64).max(1)) {
        let (u, _) = path.synthesize(t)?;
        let r: CMatrix = &u * rho.matrix() * u.adjoint();
        let p = (&r * &r).trace().re;
        drift = drift.max((p - p0).abs());
    }
    Ok(vec![
        ("purity drift".into(), drift),
        (
            "max unitarity residual".into(),
            max_unitarity_residual(&[path], times)?,
        ),
    ])
}

/// Run the trace of `scenario` and compare it with whichever closed form
/// applies.
pub fn verify(scenario: &Scenario, tolerance: f64) -> ScenarioResult<VerifyReport> {
    let name = scenario.config.name.clone();
    let report = match &scenario.system {
        System::Pair { alpha, pair } => {
            let trace = run_trace(alpha, pair)?;
            let cycles = detect_cycles(&trace, alpha, pair, scenario.config.tolerances.cyclic)?;
            VerifyReport {
                name,
                tolerance,
                comparison: pair_comparison(alpha, pair, &trace)?,
                invariants: pair_invariants(alpha, pair)?,
                cycles: Some(cycles),
                lattice: Some((alpha.d_a(), alpha.d_b())),
            }
        }
        System::Single { rho, path } => {
            let trace = single_qudit_trace(rho, path, &scenario.grid)?;
            VerifyReport {
                name,
                tolerance,
                comparison: single_comparison(rho, path, &trace)?,
                invariants: single_invariants(rho, path, &trace.t)?,
                cycles: None,
                lattice: None,
            }
        }
    };
    Ok(report)
}
