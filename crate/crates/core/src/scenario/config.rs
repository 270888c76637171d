//! Scenario schema and its translation into states and paths.
//!
//! Top-level keys:
//!
//! * `name`: free text.
//! * `dims`: `[d]` for a single qudit or `[d_A, d_B]` with `d_A <= d_B`.
//! * `initial_state`: a table with `kind` one of
//!   * `schmidt`: `q` in `[0, 1]`, optional `theta` (qutrits) or explicit
//!     profile `x`. Builds `sum_n sqrt(1/d + q sqrt((d-1)/d) x_n) |n n>` over
//!     the `d_A` levels; for a single qudit the diagonal density with the same
//!     weights.
//!   * `amplitudes`: `re` and optional `im` as nested row arrays; set
//!     `normalize = true` to rescale. A single qudit takes one row (a pure
//!     state).
//!   * `preset`: `name` from [`STATE_PRESETS`] with optional `q` and `theta`.
//! * `grid`: `t_max` and `steps`. Odd step counts are raised by one.
//! * `tolerances` (optional): `cyclic` (default `1e-9`) and `oracle` (default
//!   `1e-6`).
//! * `evolution.a`, `evolution.b`: arrays of segment tables with `kind` one of
//!   `cartan_linear {rates, duration}`, `cartan_hold {duration}`,
//!   `bloch_loop {theta_rate, phi_rate, duration}`,
//!   `bloch_cap {theta, ramp, loop_time}` and
//!   `generator_const {components | re, im, duration}`. Missing lists mean the
//!   identity.
//!
//! Any number may be written as a string: a fraction such as `"1/3"` or a
//! multiple of `pi` such as `"2pi/3"`, `"-pi/2"` or `"1.5*pi"`.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{ScenarioError, ScenarioResult};
use crate::algebra::make_generators;
use crate::evolution::{LocalEvolution, PairEvolution, PathSegment, TimeGrid};
use crate::state::{
    qutrit_theta_bound, real_diagonal, CoefficientMatrix, DiagonalProfile, QuditDensity,
};
use crate::{CMatrix, C64};

/// Named initial states accepted by `kind = "preset"`.
pub const STATE_PRESETS: &[&str] = &[
    "maximally_entangled",
    "two_qubit",
    "two_qutrit",
    "two_qutrit_uniform",
    "qubit_qutrit",
    "qubit_qutrit_dual",
    "qutrit_ququart",
];

/// A number, or a string expression in multiples of `pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Value(f64),
    Text(String),
}

impl From<f64> for Angle {
    fn from(v: f64) -> Self {
        Angle::Value(v)
    }
}

impl From<&str> for Angle {
    fn from(s: &str) -> Self {
        Angle::Text(s.to_string())
    }
}

impl Angle {
    pub fn value(&self) -> ScenarioResult<f64> {
        match self {
            Angle::Value(v) => Ok(*v),
            Angle::Text(s) => parse_angle(s)
                .ok_or_else(|| ScenarioError::Config(format!("cannot read number '{s}'"))),
        }
    }
}

/// Parse `"2pi/3"`, `"-pi"`, `"1.5*pi"`, `"0.25"` and similar.
pub fn parse_angle(text: &str) -> Option<f64> {
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .replace('π', "pi");
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b.parse::<f64>().ok()?),
        None => (s.as_str(), 1.0),
    };
    let Some(at) = num.find("pi") else {
        return Some(num.parse::<f64>().ok()? / den);
    };
    if !num[at + 2..].is_empty() {
        return None;
    }
    let coef = num[..at].trim_end_matches('*');
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().ok()?,
    };
    Some(c * PI / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Schmidt {
        q: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<Vec<f64>>,
    },
    Amplitudes {
        re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        normalize: bool,
    },
    Preset {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SegmentSpec {
    CartanLinear {
        rates: Vec<Angle>,
        duration: Angle,
    },
    CartanHold {
        duration: Angle,
    },
    BlochLoop {
        theta_rate: Angle,
        phi_rate: Angle,
        duration: Angle,
    },
    BlochCap {
        theta: Angle,
        ramp: Angle,
        loop_time: Angle,
    },
    GeneratorConst {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        components: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        re: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
        duration: Angle,
    },
}

impl SegmentSpec {
    fn kind(&self) -> &'static str {
        match self {
            SegmentSpec::CartanLinear { .. } => "cartan_linear",
            SegmentSpec::CartanHold { .. } => "cartan_hold",
            SegmentSpec::BlochLoop { .. } => "bloch_loop",
            SegmentSpec::BlochCap { .. } => "bloch_cap",
            SegmentSpec::GeneratorConst { .. } => "generator_const",
        }
    }

    /// Linear Cartan segment with literal rates and a duration expression.
    pub fn cartan(rates: &[f64], duration: &str) -> Self {
        SegmentSpec::CartanLinear {
            rates: rates.iter().map(|&r| Angle::Value(r)).collect(),
            duration: duration.into(),
        }
    }

    fn to_segments(&self, d: usize) -> ScenarioResult<Vec<PathSegment>> {
        Ok(match self {
            SegmentSpec::CartanLinear { rates, duration } => vec![PathSegment::CartanLinear {
                rates: rates
                    .iter()
                    .map(Angle::value)
                    .collect::<ScenarioResult<_>>()?,
                duration: duration.value()?,
            }],
            SegmentSpec::CartanHold { duration } => vec![PathSegment::CartanHold {
                duration: duration.value()?,
            }],
            SegmentSpec::BlochLoop {
                theta_rate,
                phi_rate,
                duration,
            } => vec![PathSegment::BlochLoop {
                theta_rate: theta_rate.value()?,
                phi_rate: phi_rate.value()?,
                duration: duration.value()?,
            }],
            SegmentSpec::BlochCap {
                theta,
                ramp,
                loop_time,
            } => {
                let evo =
                    LocalEvolution::bloch_cap(theta.value()?, ramp.value()?, loop_time.value()?)?;
                evo.segments().to_vec()
            }
            SegmentSpec::GeneratorConst {
                components,
                re,
                im,
                duration,
            } => {
                let generator = match (components, re) {
                    (Some(c), None) => {
                        let basis = make_generators(d)?;
                        if c.len() != basis.len() {
                            return Err(ScenarioError::Config(format!(
                                "{} generator components for dimension {d}, expected {}",
                                c.len(),
                                basis.len()
                            )));
                        }
                        basis.combine(c)
                    }
                    (None, Some(re)) => complex_matrix(re, im.as_ref(), "generator")?,
                    _ => {
                        return Err(ScenarioError::Config(
                            "generator_const needs exactly one of 'components' or 're'".into(),
                        ))
                    }
                };
                vec![PathSegment::GeneratorConst {
                    generator,
                    duration: duration.value()?,
                }]
            }
        })
    }
}

fn complex_matrix(
    re: &[Vec<f64>],
    im: Option<&Vec<Vec<f64>>>,
    what: &str,
) -> ScenarioResult<CMatrix> {
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || re.iter().any(|r| r.len() != cols) {
        return Err(ScenarioError::Config(format!(
            "{what}: 're' must be a non-empty rectangular array"
        )));
    }
    if let Some(im) = im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err(ScenarioError::Config(format!(
                "{what}: 'im' shape differs from 're'"
            )));
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |r, c| {
        C64::new(re[r][c], im.map_or(0.0, |m| m[r][c]))
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_max: Angle,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_cyclic")]
    pub cyclic: f64,
    #[serde(default = "default_oracle")]
    pub oracle: f64,
}

fn default_cyclic() -> f64 {
    crate::phase::DEFAULT_CYCLIC_EPSILON
}

fn default_oracle() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cyclic: default_cyclic(),
            oracle: default_oracle(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSpec {
    #[serde(default)]
    pub a: Vec<SegmentSpec>,
    #[serde(default)]
    pub b: Vec<SegmentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub dims: Vec<usize>,
    pub initial_state: InitialState,
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub evolution: EvolutionSpec,
}

/// How Cartan rates are shared between the two parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Split {
    /// As written in the scenario.
    #[default]
    AOnly,
    /// Every A segment is halved and copied onto B.
    Half,
}

#[derive(Debug, Clone, PartialEq)]
pub enum System {
    Single {
        rho: QuditDensity,
        path: LocalEvolution,
    },
    Pair {
        alpha: CoefficientMatrix,
        pair: PairEvolution,
    },
}

/// A validated scenario ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub system: System,
    pub grid: TimeGrid,
    pub warnings: Vec<String>,
}

fn schmidt_weights(
    d: usize,
    q: f64,
    theta: Option<f64>,
    x: Option<&Vec<f64>>,
) -> ScenarioResult<Vec<f64>> {
    if !(0.0..=1.0).contains(&q) {
        return Err(ScenarioError::Config(format!(
            "initial_state.q = {q} outside [0, 1]"
        )));
    }
    let profile = match (x, theta) {
        (Some(x), _) => DiagonalProfile::new(x.clone())
            .map_err(|e| ScenarioError::Config(format!("initial_state.x: {e}")))?,
        (None, Some(theta)) => {
            if d != 3 {
                return Err(ScenarioError::Config(
                    "initial_state.theta applies to qutrits only".into(),
                ));
            }
            let bound = qutrit_theta_bound(q)?;
            if theta.abs() > bound + 1e-12 {
                return Err(ScenarioError::Config(format!(
                    "initial_state.theta = {theta} outside |theta| <= {bound}"
                )));
            }
            DiagonalProfile::qutrit(theta)
        }
        (None, None) => {
            let basis = make_generators(d)?;
            let mut e = DVector::zeros(basis.len());
            e[0] = 1.0;
            DiagonalProfile::from_direction(&basis, &e)?
        }
    };
    if profile.dim() != d {
        return Err(ScenarioError::Config(format!(
            "initial_state.x has {} entries, expected {d}",
            profile.dim()
        )));
    }
    let w = q * ((d - 1) as f64 / d as f64).sqrt();
    let weights: Vec<f64> = profile
        .values()
        .iter()
        .map(|xn| 1.0 / d as f64 + w * xn)
        .collect();
    if let Some(min) = weights.iter().copied().reduce(f64::min) {
        if min < -1e-12 {
            return Err(ScenarioError::Config(format!(
                "initial_state: weight {min} is negative for this q and profile"
            )));
        }
    }
    Ok(weights.into_iter().map(|v| v.max(0.0)).collect())
}

/// Coefficient matrix of a named state.
pub fn preset_state(
    name: &str,
    q: Option<f64>,
    theta: Option<f64>,
) -> ScenarioResult<CoefficientMatrix> {
    let need_q = || {
        q.ok_or_else(|| {
            ScenarioError::Config(format!("state preset '{name}' needs initial_state.q"))
        })
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let alpha = match name {
        "maximally_entangled" => {
            let d = 3;
            CoefficientMatrix::diagonal(&vec![1.0 / (d as f64).sqrt(); d], d)?
        }
        "two_qubit" => {
            let q = need_q()?;
            let w = schmidt_weights(2, q, None, None)?;
            CoefficientMatrix::diagonal(&[w[0].sqrt(), w[1].sqrt()], 2)?
        }
        "two_qutrit" => {
            let q = need_q()?;
            let w = schmidt_weights(3, q, Some(theta.unwrap_or(0.0)), None)?;
            CoefficientMatrix::diagonal(&w.iter().map(|v| v.sqrt()).collect::<Vec<_>>(), 3)?
        }
        "two_qutrit_uniform" => {
            let q = need_q()?;
            if !(1.0 / 3.0 - 1e-12..=1.0 + 1e-12).contains(&q) {
                return Err(ScenarioError::Config(format!(
                    "two_qutrit_uniform needs 1/3 <= q <= 1, got {q}"
                )));
            }
            let on = (q / 3.0).sqrt();
            let off = ((1.0 - q).max(0.0) / 6.0).sqrt();
            CoefficientMatrix::new(CMatrix::from_fn(3, 3, |r, c| {
                C64::from(if r == c { on } else { off })
            }))?
        }
        "qubit_qutrit" => {
            let q = need_q()?;
            let w = schmidt_weights(2, q, None, None)?;
            CoefficientMatrix::diagonal(&[w[0].sqrt(), w[1].sqrt()], 3)?
        }
        "qubit_qutrit_dual" => CoefficientMatrix::new(CMatrix::from_row_slice(
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
        ))?,
        "qutrit_ququart" => {
            let a = 1.0 / 3f64.sqrt();
            let b = 1.0 / 6f64.sqrt();
            let mut m = CMatrix::zeros(3, 4);
            m[(0, 0)] = a.into();
            m[(1, 1)] = a.into();
            m[(2, 2)] = b.into();
            m[(2, 3)] = b.into();
            CoefficientMatrix::new(m)?
        }
        other => {
            return Err(ScenarioError::Config(format!(
                "unknown state preset '{other}'; available: {}",
                STATE_PRESETS.join(", ")
            )))
        }
    };
    Ok(alpha)
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> ScenarioResult<Self> {
        toml::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> ScenarioResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            ScenarioError::Config(m) => ScenarioError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario configs serialise")
    }

    fn path(&self, party: &str, specs: &[SegmentSpec], d: usize) -> ScenarioResult<LocalEvolution> {
        let mut segments = Vec::new();
        for (k, spec) in specs.iter().enumerate() {
            let at = |e: ScenarioError| match e {
                ScenarioError::Config(m) | ScenarioError::Numerical(m) => {
                    ScenarioError::Config(format!("evolution.{party}[{k}] ({}): {m}", spec.kind()))
                }
            };
            let segs = spec.to_segments(d).map_err(at)?;
            for s in &segs {
                LocalEvolution::new(d, vec![s.clone()]).map_err(|e| at(e.into()))?;
            }
            segments.extend(segs);
        }
        LocalEvolution::new(d, segments)
            .map_err(|e| ScenarioError::Config(format!("evolution.{party}: {e}")))
    }

    /// Validate and build states, paths and grid.
    pub fn build(&self, split: Split) -> ScenarioResult<Scenario> {
        let mut warnings = Vec::new();
        let mut steps = self.grid.steps;
        if steps == 0 {
            return Err(ScenarioError::Config("grid.steps must be positive".into()));
        }
        if steps % 2 == 1 {
            steps += 1;
            warnings.push(format!(
                "grid.steps raised from {} to {steps} (must be even)",
                self.grid.steps
            ));
        }
        let t_max = self
            .grid
            .t_max
            .value()
            .map_err(|e| ScenarioError::Config(format!("grid.t_max: {e}")))?;
        let grid =
            TimeGrid::new(t_max, steps).map_err(|e| ScenarioError::Config(format!("grid: {e}")))?;
        for &d in &self.dims {
            if d < 2 {
                return Err(ScenarioError::Config(format!(
                    "dims: dimension {d} must be at least 2"
                )));
            }
        }
        let system = match self.dims.as_slice() {
            [d] => {
                let d = *d;
                if !self.evolution.b.is_empty() {
                    return Err(ScenarioError::Config(
                        "evolution.b given for a single qudit".into(),
                    ));
                }
                if split == Split::Half {
                    return Err(ScenarioError::Config(
                        "--split half needs two qudits".into(),
                    ));
                }
                let rho = match &self.initial_state {
                    InitialState::Schmidt { q, theta, x } => {
                        let w = schmidt_weights(d, *q, *theta, x.as_ref())?;
                        real_diagonal(&w)
                    }
                    InitialState::Amplitudes { re, im, normalize } => {
                        let psi = complex_matrix(re, im.as_ref(), "initial_state")?;
                        if psi.nrows() != 1 || psi.ncols() != d {
                            return Err(ScenarioError::Config(format!(
                                "initial_state: a single qudit takes one row of {d} amplitudes"
                            )));
                        }
                        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
                        if !normalize && (norm - 1.0).abs() > 1e-10 {
                            return Err(ScenarioError::Config(format!(
                                "initial_state: amplitudes have norm^2 {norm}; set normalize = true"
                            )));
                        }
                        let v = psi.transpose() / C64::from(norm.sqrt());
                        &v * v.adjoint()
                    }
                    InitialState::Preset { .. } => {
                        return Err(ScenarioError::Config(
                            "state presets describe two qudits; use kind = \"schmidt\"".into(),
                        ))
                    }
                };
                let basis = make_generators(d)?;
                let rho = QuditDensity::from_matrix(rho, &basis)
                    .map_err(|e| ScenarioError::Config(format!("initial_state: {e}")))?;
                let path = self.path("a", &self.evolution.a, d)?;
                for &t in path.boundaries() {
                    if !grid.contains_node(t) {
                        return Err(ScenarioError::Config(format!(
                            "grid: segment boundary t = {t} is not a grid point"
                        )));
                    }
                }
                System::Single { rho, path }
            }
            [d_a, d_b] => {
                let (d_a, d_b) = (*d_a, *d_b);
                if d_a > d_b {
                    return Err(ScenarioError::Config(format!(
                        "dims: need d_A <= d_B, got [{d_a}, {d_b}]"
                    )));
                }
                let alpha = match &self.initial_state {
                    InitialState::Schmidt { q, theta, x } => {
                        let w = schmidt_weights(d_a, *q, *theta, x.as_ref())?;
                        CoefficientMatrix::diagonal(
                            &w.iter().map(|v| v.sqrt()).collect::<Vec<_>>(),
                            d_b,
                        )?
                    }
                    InitialState::Amplitudes { re, im, normalize } => {
                        let m = complex_matrix(re, im.as_ref(), "initial_state")?;
                        let m = if *normalize {
                            CoefficientMatrix::normalized(m)
                        } else {
                            CoefficientMatrix::new(m)
                        };
                        m.map_err(|e| ScenarioError::Config(format!("initial_state: {e}")))?
                    }
                    InitialState::Preset { name, q, theta } => preset_state(name, *q, *theta)?,
                };
                if alpha.d_a() != d_a || alpha.d_b() != d_b {
                    return Err(ScenarioError::Config(format!(
                        "initial_state is {}x{}, dims say {d_a}x{d_b}",
                        alpha.d_a(),
                        alpha.d_b()
                    )));
                }
                let (a_specs, b_specs) = match split {
                    Split::AOnly => (self.evolution.a.clone(), self.evolution.b.clone()),
                    Split::Half => {
                        let halves = self.half_split(d_a, d_b, &alpha)?;
                        (halves.clone(), halves)
                    }
                };
                let a = self.path("a", &a_specs, d_a)?;
                let b = self.path("b", &b_specs, d_b)?;
                let pair = PairEvolution::new(a, b, grid)
                    .map_err(|e| ScenarioError::Config(e.to_string()))?;
                System::Pair { alpha, pair }
            }
            other => {
                return Err(ScenarioError::Config(format!(
                    "dims must hold one or two entries, got {}",
                    other.len()
                )))
            }
        };
        Ok(Scenario {
            config: self.clone(),
            system,
            grid,
            warnings,
        })
    }

    fn half_split(
        &self,
        d_a: usize,
        d_b: usize,
        alpha: &CoefficientMatrix,
    ) -> ScenarioResult<Vec<SegmentSpec>> {
        let refuse = |why: &str| Err(ScenarioError::Config(format!("--split half: {why}")));
        if d_a != d_b {
            return refuse("needs equal dimensions");
        }
        if !self.evolution.b.is_empty() {
            return refuse("needs all rates on qudit A (evolution.b empty)");
        }
        if !alpha.is_diagonal(1e-12) {
            return refuse("needs a diagonal initial state");
        }
        let mut halves = Vec::new();
        for spec in &self.evolution.a {
            match spec {
                SegmentSpec::CartanLinear { rates, duration } => {
                    let rates = rates
                        .iter()
                        .map(|r| r.value().map(|v| Angle::Value(0.5 * v)))
                        .collect::<ScenarioResult<_>>()?;
                    halves.push(SegmentSpec::CartanLinear {
                        rates,
                        duration: duration.clone(),
                    });
                }
                SegmentSpec::CartanHold { .. } => halves.push(spec.clone()),
                _ => return refuse("needs Cartan segments only"),
            }
        }
        Ok(halves)
    }
}
