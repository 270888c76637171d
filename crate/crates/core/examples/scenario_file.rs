//! Parse a scenario, run it, write the CSV record and read it back.

use qudit_phase::scenario::commands::execute;
use qudit_phase::scenario::record::Format;
use qudit_phase::scenario::{ScenarioConfig, Split, TraceRecord};

const SCENARIO: &str = r#"
name = "qubit loop beside a Cartan partner"
dims = [2, 2]

[initial_state]
kind = "schmidt"
q = 0.6

[grid]
t_max = "3pi"
steps = 1200

[[evolution.a]]
kind = "bloch_cap"
theta = "pi/3"
ramp = "pi/2"
loop_time = "2pi"

[[evolution.b]]
kind = "cartan_linear"
rates = [0.5, -0.5]
duration = "3pi"
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = ScenarioConfig::from_toml_str(SCENARIO)?.build(Split::AOnly)?;
    let record = execute(&scenario)?;
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("trace.csv");
    record.write(&path, Format::Csv)?;
    let text = std::fs::read_to_string(&path)?;
    for line in text
        .lines()
        .take(3)
        .chain(text.lines().filter(|l| l.starts_with('#')))
    {
        println!("{line}");
    }
    let back = TraceRecord::from_csv(&text)?;
    println!(
        "rows: {}, identical after reload: {}",
        back.rows(),
        back == record
    );
    Ok(())
}
