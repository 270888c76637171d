//! Built-in scenarios, including the figure reproductions.

use super::config::{
    Angle, EvolutionSpec, GridSpec, InitialState, ScenarioConfig, SegmentSpec, Tolerances,
};
use super::{ScenarioError, ScenarioResult};

const NAMES: &[&str] = &[
    "fig1a",
    "fig1b",
    "fig1c",
    "fig1d",
    "fig2a",
    "fig2b",
    "fig2c",
    "fig2d",
    "fig3",
    "fig4a",
    "fig4b",
    "fig4c",
    "fig4d",
    "fig6a",
    "fig6b",
    "fig6c",
    "fig6d",
    "qubit_pair",
    "qubit_pair_loops",
    "qubit_loop",
    "qutrit_ququart",
];

pub fn preset_names() -> &'static [&'static str] {
    NAMES
}

fn config(
    name: &str,
    dims: &[usize],
    initial_state: InitialState,
    t_max: &str,
    steps: usize,
    a: Vec<SegmentSpec>,
    b: Vec<SegmentSpec>,
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        dims: dims.to_vec(),
        initial_state,
        grid: GridSpec {
            t_max: t_max.into(),
            steps,
        },
        tolerances: Tolerances::default(),
        evolution: EvolutionSpec { a, b },
    }
}

fn schmidt(q: f64) -> InitialState {
    InitialState::Schmidt {
        q,
        theta: Some(0.0),
        x: None,
    }
}

fn named(name: &str, q: Option<f64>) -> InitialState {
    InitialState::Preset {
        name: name.to_string(),
        q,
        theta: None,
    }
}

/// Scenario for a built-in name.
pub fn preset(name: &str) -> ScenarioResult<ScenarioConfig> {
    let qutrit_loop = || vec![SegmentSpec::cartan(&[1.0, 1.0, -2.0], "2pi")];
    let cfg = match name {
        "fig1a" | "fig1b" | "fig1c" | "fig1d" => {
            let q = match name {
                "fig1a" => 0.0,
                "fig1b" => 0.2,
                "fig1c" => 0.6,
                _ => 1.0,
            };
            config(
                name,
                &[3, 3],
                schmidt(q),
                "2pi",
                4000,
                qutrit_loop(),
                vec![],
            )
        }
        "fig2a" | "fig2b" | "fig2c" | "fig2d" => {
            let q = match name {
                "fig2a" => 0.0,
                "fig2b" => 0.2,
                "fig2c" => 0.6,
                _ => 1.0,
            };
            let a = (0..6)
                .map(|k| {
                    let rates = if k % 2 == 0 {
                        [-1.0, 1.0, 0.0]
                    } else {
                        [-1.0, 0.0, 1.0]
                    };
                    SegmentSpec::cartan(&rates, "2pi/3")
                })
                .collect();
            config(name, &[3, 3], schmidt(q), "4pi", 4200, a, vec![])
        }
        "fig3" => config(
            name,
            &[3, 3],
            schmidt(0.0),
            "2pi",
            4000,
            vec![SegmentSpec::cartan(&[1.0, 30.0, -31.0], "2pi")],
            vec![],
        ),
        "fig4a" | "fig4b" | "fig4c" | "fig4d" => {
            let (r, steps) = match name {
                "fig4a" => (1.5, 4000),
                "fig4b" => (3.0, 4000),
                "fig4c" => (3.5, 4000),
                _ => (100.0, 40000),
            };
            config(
                name,
                &[2, 3],
                named("qubit_qutrit_dual", None),
                "4pi",
                steps,
                vec![SegmentSpec::cartan(&[r, -r], "4pi")],
                vec![SegmentSpec::cartan(&[1.0, 1.0, -2.0], "4pi")],
            )
        }
        "fig6a" | "fig6b" | "fig6c" | "fig6d" => {
            let q = match name {
                "fig6a" => 1.0 / 3.0,
                "fig6b" => 0.5,
                "fig6c" => 2.0 / 3.0,
                _ => 1.0,
            };
            config(
                name,
                &[3, 3],
                named("two_qutrit_uniform", Some(q)),
                "2pi",
                4000,
                qutrit_loop(),
                vec![SegmentSpec::cartan(&[2.0, 2.0, -4.0], "2pi")],
            )
        }
        "qubit_pair" => config(
            name,
            &[2, 2],
            InitialState::Schmidt {
                q: 0.8,
                theta: None,
                x: None,
            },
            "2pi",
            2000,
            vec![SegmentSpec::cartan(&[1.0, -1.0], "2pi")],
            vec![SegmentSpec::cartan(&[0.5, -0.5], "2pi")],
        ),
        "qubit_pair_loops" => {
            let cap = |theta: &str| SegmentSpec::BlochCap {
                theta: theta.into(),
                ramp: "pi/2".into(),
                loop_time: "2pi".into(),
            };
            config(
                name,
                &[2, 2],
                InitialState::Schmidt {
                    q: 0.6,
                    theta: None,
                    x: None,
                },
                "4pi",
                4000,
                vec![cap("pi/3"), SegmentSpec::cartan(&[0.5, -0.5], "pi")],
                vec![
                    cap("pi/2"),
                    SegmentSpec::CartanHold {
                        duration: "pi".into(),
                    },
                ],
            )
        }
        "qubit_loop" => config(
            name,
            &[2],
            InitialState::Schmidt {
                q: 1.0,
                theta: None,
                x: None,
            },
            "3pi",
            3000,
            vec![SegmentSpec::BlochCap {
                theta: "pi/2".into(),
                ramp: "pi/2".into(),
                loop_time: "2pi".into(),
            }],
            vec![],
        ),
        "qutrit_ququart" => config(
            name,
            &[3, 4],
            named("qutrit_ququart", None),
            "4pi",
            4800,
            qutrit_loop_long(),
            vec![SegmentSpec::CartanLinear {
                rates: [0.75, 0.75, 0.75, -2.25].map(Angle::Value).to_vec(),
                duration: "4pi".into(),
            }],
        ),
        other => {
            return Err(ScenarioError::Config(format!(
                "unknown preset '{other}'; available: {}",
                NAMES.join(", ")
            )))
        }
    };
    Ok(cfg)
}

fn qutrit_loop_long() -> Vec<SegmentSpec> {
    vec![SegmentSpec::cartan(&[1.0, 1.0, -2.0], "4pi")]
}
