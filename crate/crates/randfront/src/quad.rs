//! Compensated summation and quadrature helpers.
//!
//! Every integral in the crate goes through these so that window averages,
//! position integrals and block decompositions agree to rounding level no
//! matter how the terms are grouped.

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated prefix sums of `terms`: the result has length
/// `terms.len() + 1` with `out[0] = 0`.
pub fn prefix_sums(terms: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = Kahan::new();
    let mut out = vec![0.0];
    for t in terms {
        acc.add(t);
        out.push(acc.value());
    }
    out
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mut acc = Kahan::new();
    for w in values.windows(2) {
        acc.add(0.5 * h * (w[0] + w[1]));
    }
    acc.value()
}

/// Trapezoid rule for `f` sampled on `n` uniform cells over `[lo, hi]`.
pub fn trapezoid_fn(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    assert!(n >= 1 && hi > lo);
    let h = (hi - lo) / n as f64;
    let mut acc = Kahan::new();
    acc.add(0.5 * h * f(lo));
    for i in 1..n {
        acc.add(h * f(lo + i as f64 * h));
    }
    acc.add(0.5 * h * f(hi));
    acc.value()
}
