//! Derivative-free maximisation: cyclic coordinate ascent with a
//! golden-section line search on each coordinate.

use serde::{Deserialize, Serialize};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub x: Vec<f64>,
    pub value: f64,
    /// Best value seen so far, including this one.
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentResult {
    pub best_x: Vec<f64>,
    pub best_value: f64,
    pub trace: Vec<Evaluation>,
}

struct Tracker<'f, F> {
    f: &'f mut F,
    budget: usize,
    trace: Vec<Evaluation>,
    best_x: Vec<f64>,
    best_value: f64,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<'_, F> {
    fn exhausted(&self) -> bool {
        self.trace.len() >= self.budget
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        let raw = (self.f)(x);
        let value = if raw.is_nan() { f64::NEG_INFINITY } else { raw };
        if value > self.best_value || self.trace.is_empty() {
            self.best_value = value;
            self.best_x = x.to_vec();
        }
        self.trace.push(Evaluation {
            x: x.to_vec(),
            value,
            best: self.best_value,
        });
        value
    }
}

/// Maximises `f` over the box `bounds` starting from `x0`.
///
/// `x0` is always evaluated, so the trace is never empty; after that at most
/// `budget - 1` further evaluations are spent. Each cycle visits every
/// coordinate once and gives it an equal share of the remaining budget.
/// NaN values are treated as `-∞`.
pub fn coordinate_ascent<F>(
    mut f: F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    cycles: usize,
    budget: usize,
) -> AscentResult
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x0.len(), bounds.len(), "one bound per coordinate");
    let mut t = Tracker {
        f: &mut f,
        budget: budget.max(1),
        trace: Vec::new(),
        best_x: x0.to_vec(),
        best_value: f64::NEG_INFINITY,
    };
    t.eval(x0);
    let dims = x0.len();
    let lines = (cycles * dims).max(1);
    let mut line = 0;
    'outer: for _ in 0..cycles {
        for (k, &bound) in bounds.iter().enumerate() {
            if t.exhausted() {
                break 'outer;
            }
            let remaining = t.budget - t.trace.len();
            let share = (remaining / (lines - line).max(1)).max(2).min(remaining);
            line += 1;
            golden_line(&mut t, k, bound, share);
        }
    }
    AscentResult {
        best_x: t.best_x,
        best_value: t.best_value,
        trace: t.trace,
    }
}

/// Golden-section search on coordinate `k` from the current best point,
/// using at most `evals` evaluations.
fn golden_line<F: FnMut(&[f64]) -> f64>(
    t: &mut Tracker<'_, F>,
    k: usize,
    (lo, hi): (f64, f64),
    evals: usize,
) {
    if evals < 2 || hi <= lo {
        return;
    }
    let mut x = t.best_x.clone();
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    x[k] = c;
    let mut fc = t.eval(&x);
    x[k] = d;
    let mut fd = t.eval(&x);
    for _ in 2..evals {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            x[k] = c;
            fc = t.eval(&x);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            x[k] = d;
            fd = t.eval(&x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum_of_a_quadratic() {
        let f = |x: &[f64]| -(x[0] - 0.3).powi(2) - 2.0 * (x[1] + 1.2).powi(2);
        let r = coordinate_ascent(f, &[0.0, 0.0], &[(-2.0, 2.0), (-2.0, 2.0)], 3, 300);
        assert!((r.best_x[0] - 0.3).abs() < 1e-6);
        assert!((r.best_x[1] + 1.2).abs() < 1e-6);
        assert!(r.trace.len() <= 300);
    }

    #[test]
    fn best_in_trace_is_monotone() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() + x[1].cos();
        let r = coordinate_ascent(f, &[0.1, 0.1], &[(-3.0, 3.0), (-3.0, 3.0)], 3, 60);
        assert!(r.trace.windows(2).all(|w| w[1].best >= w[0].best));
        assert_eq!(r.trace.last().unwrap().best, r.best_value);
    }

    #[test]
    fn zero_budget_evaluates_start_only() {
        for budget in [0, 1] {
            let r = coordinate_ascent(|x: &[f64]| x[0], &[0.5], &[(0.0, 1.0)], 3, budget);
            assert_eq!(r.trace.len(), 1);
            assert_eq!(r.best_x, vec![0.5]);
        }
    }

    #[test]
    fn nan_is_never_best() {
        let f = |x: &[f64]| if x[0] > 0.5 { f64::NAN } else { x[0] };
        let r = coordinate_ascent(f, &[0.1], &[(0.0, 1.0)], 2, 40);
        assert!(r.best_value <= 0.5 && r.best_value > 0.49);
    }
}
