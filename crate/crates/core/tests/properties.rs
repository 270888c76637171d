use std::f64::consts::TAU;

use proptest::prelude::*;
use qudit_phase::evolution::{LocalEvolution, PairEvolution, Side, TimeGrid, UnitaryPath};
use qudit_phase::linalg::wrap_angle;
use qudit_phase::phase::{run_trace, run_trace_paths};
use qudit_phase::scenario::TraceRecord;
use qudit_phase::state::CoefficientMatrix;
use qudit_phase::{CMatrix, Result, C64};

/// `e^{i gamma(t)} U(t)` with `gamma = a t + b sin t`.
struct GlobalPhase<'a> {
    inner: &'a LocalEvolution,
    a: f64,
    b: f64,
}

impl UnitaryPath for GlobalPhase<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn sample(&self, t: f64, side: Side) -> Result<(CMatrix, CMatrix)> {
        let (u, u_dot) = self.inner.sample(t, side)?;
        let gamma = self.a * t + self.b * t.sin();
        let rate = self.a + self.b * t.cos();
        let e = C64::from_polar(1.0, gamma);
        Ok((&u * e, (u_dot + &u * C64::new(0.0, rate)) * e))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

fn state(re: &[f64], im: &[f64], d_a: usize, d_b: usize) -> CoefficientMatrix {
    let m = CMatrix::from_fn(d_a, d_b, |r, c| C64::new(re[r * d_b + c], im[r * d_b + c]));
    CoefficientMatrix::normalized(m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn geometric_phase_ignores_global_phase(
        re in prop::collection::vec(-1.0f64..1.0, 6),
        im in prop::collection::vec(-1.0f64..1.0, 6),
        rates in prop::collection::vec(-2.0f64..2.0, 2),
        a in -1.5f64..1.5,
        b in -1.0f64..1.0,
    ) {
        let alpha = state(&re, &im, 2, 3);
        let path_a = LocalEvolution::cartan(vec![rates[0], -rates[0]], TAU).unwrap();
        let path_b = LocalEvolution::cartan(vec![rates[1], 0.5, -rates[1] - 0.5], TAU).unwrap();
        let grid = TimeGrid::new(TAU, 800).unwrap();
        let pair = PairEvolution::new(path_a, path_b, grid).unwrap();
        let plain = run_trace(&alpha, &pair).unwrap();
        let wrapped = GlobalPhase { inner: &pair.a, a, b };
        let shifted = run_trace_paths(&alpha, &wrapped, &pair.b, &grid).unwrap();
        for i in 0..plain.len() {
            if plain.overlap_mag[i] > 1e-6 {
                let gap = wrap_angle(plain.geometric_phase[i] - shifted.geometric_phase[i]).abs();
                prop_assert!(gap < 1e-9, "t = {}: {gap:e}", plain.t[i]);
            }
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact(
        values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 7 * 5),
        name in "[a-z][a-z0-9 _-]{0,12}",
    ) {
        let record = TraceRecord {
            name: name.trim_end().to_string(),
            columns: values.chunks(5).map(<[f64]>::to_vec).collect(),
            diagnostics: vec![("mixed".into(), values[..3].to_vec())],
            ..Default::default()
        };
        let back = TraceRecord::from_csv(&record.to_csv()).unwrap();
        for (x, y) in back.columns.iter().flatten().zip(record.columns.iter().flatten()) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
        for (x, y) in back.diagnostics[0].1.iter().zip(&record.diagnostics[0].1) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
        prop_assert_eq!(back.name, record.name);
    }

    #[test]
    fn rate_split_between_parties_is_irrelevant(
        q in 0.0f64..1.0,
        total in prop::collection::vec(-3.0f64..3.0, 2),
        share in 0.0f64..1.0,
    ) {
        let w = [(1.0 + q) / 2.0, (1.0 - q) / 2.0];
        let alpha = CoefficientMatrix::diagonal(&[w[0].sqrt(), w[1].sqrt()], 2).unwrap();
        let rates = |f: f64| vec![f * total[0], -f * total[0]];
        let grid = TimeGrid::new(TAU, 600).unwrap();
        let mk = |fa: f64| {
            PairEvolution::new(
                LocalEvolution::cartan(rates(fa), TAU).unwrap(),
                LocalEvolution::cartan(rates(1.0 - fa), TAU).unwrap(),
                grid,
            )
            .unwrap()
        };
        let x = run_trace(&alpha, &mk(1.0)).unwrap();
        let y = run_trace(&alpha, &mk(share)).unwrap();
        for i in 0..x.len() {
            prop_assert!((x.overlap[i] - y.overlap[i]).norm() < 1e-12);
            prop_assert!((x.geometric_phase[i] - y.geometric_phase[i]).abs() < 1e-9);
        }
    }
}
