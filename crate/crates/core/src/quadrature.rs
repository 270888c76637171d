//! Composite Simpson rules on uniform grids.

/// Integral over one interval of width `h` from the left value, midpoint value
/// and right value.
#[inline]
pub fn simpson_panel(left: f64, mid: f64, right: f64, h: f64) -> f64 {
    h / 6.0 * (left + 4.0 * mid + right)
}

/// Composite Simpson integral of uniformly spaced samples. An even number of
/// intervals is integrated exactly by Simpson panels; an odd count closes the
/// last interval with the trapezoid rule.
pub fn simpson(samples: &[f64], h: f64) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    let mut acc = 0.0;
    for k in (0..even).step_by(2) {
        acc += h / 3.0 * (samples[k] + 4.0 * samples[k + 1] + samples[k + 2]);
    }
    if even < intervals {
        acc += 0.5 * h * (samples[n - 2] + samples[n - 1]);
    }
    acc
}

/// Integral of `f` over `[a, b]` with `panels` Simpson panels.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    let mut left = f(a);
    for k in 0..panels {
        let x0 = a + k as f64 * h;
        let mid = f(x0 + 0.5 * h);
        let right = f(x0 + h);
        acc += simpson_panel(left, mid, right, h);
        left = right;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let f = |x: f64| 2.0 * x * x * x - x * x + 3.0;
        let exact = |x: f64| 0.5 * x.powi(4) - x.powi(3) / 3.0 + 3.0 * x;
        let got = integrate(f, -1.0, 2.0, 3);
        assert!((got - (exact(2.0) - exact(-1.0))).abs() < 1e-12);

        let xs: Vec<f64> = (0..=4).map(|k| -1.0 + 0.75 * k as f64).map(f).collect();
        assert!((simpson(&xs, 0.75) - (exact(2.0) - exact(-1.0))).abs() < 1e-12);
    }

    #[test]
    fn odd_interval_count_uses_trapezoid_tail() {
        let xs = [1.0, 1.0, 1.0, 1.0];
        assert!((simpson(&xs, 0.5) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn fourth_order_convergence() {
        let exact = 1.0 - (2.0f64).cos();
        let e1 = (integrate(f64::sin, 0.0, 2.0, 8) - exact).abs();
        let e2 = (integrate(f64::sin, 0.0, 2.0, 16) - exact).abs();
        let order = (e1 / e2).log2();
        assert!(order > 3.9, "order {order}");
    }
}
