//! Time-heterogeneous coefficient processes.
//!
//! A `DriverSpec` plus a 64-bit seed pins down one realization of the
//! bounded random coefficient `a(t)` driving the reaction term. Paths are
//! sampled on uniform grids, shifted in time by resampling the same
//! realization, and reduced to their least / upper means
//!
//! ```text
//! floor(a)   = lim inf_{t-s -> inf}  (1/(t-s)) int_s^t a
//! ceil(a)    = lim sup_{t-s -> inf}  (1/(t-s)) int_s^t a
//! ```
//!
//! estimated on a geometric ladder of window lengths. The block-average
//! decomposition splits a path into per-block means `alpha_k` and a bounded
//! deviation `A` with `A(kT) = 0` and `a - A' = alpha_k` inside each block.
//!
//! All sampling is driven by ChaCha8 (`chacha8-v1`), a counter-based stream
//! cipher, so seeds are portable across platforms and runs.

use crate::error::{Error, Result};
use crate::quad::{prefix_sums, Kahan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifier of the seeded generator; bump when the sampling layout changes.
pub const GENERATOR_VERSION: &str = "chacha8-v1";

/// Golden ratio, the default irrational frequency ratio for quasiperiodic
/// drivers.
pub const GOLDEN_RATIO: f64 = 1.618033988749895;

/// Menu of coefficient processes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessKind {
    /// `a(t) = level`.
    Constant { level: f64 },
    /// `a(t) = base + amplitude * sin(2 pi t / period)`.
    Periodic {
        base: f64,
        amplitude: f64,
        period: f64,
    },
    /// `a(t) = base + amp1 sin(freq1 t) + amp2 sin(freq2 t)` with
    /// `freq2 / freq1` irrational.
    Quasiperiodic {
        base: f64,
        amp1: f64,
        freq1: f64,
        amp2: f64,
        freq2: f64,
    },
    /// Two-state Markov jump process between `low` and `high`;
    /// `rate_up` is the switching rate low -> high, `rate_down` high -> low.
    Telegraph {
        low: f64,
        high: f64,
        rate_up: f64,
        rate_down: f64,
    },
}

/// A coefficient process together with the seed of its realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverSpec {
    pub kind: ProcessKind,
    pub seed: u64,
}

impl DriverSpec {
    pub fn constant(level: f64) -> Self {
        DriverSpec {
            kind: ProcessKind::Constant { level },
            seed: 0,
        }
    }

    pub fn periodic(base: f64, amplitude: f64, period: f64) -> Self {
        DriverSpec {
            kind: ProcessKind::Periodic {
                base,
                amplitude,
                period,
            },
            seed: 0,
        }
    }

    /// Quasiperiodic driver with the second frequency fixed to
    /// `freq1 * GOLDEN_RATIO`.
    pub fn quasiperiodic_golden(base: f64, amp1: f64, amp2: f64, freq1: f64) -> Self {
        DriverSpec {
            kind: ProcessKind::Quasiperiodic {
                base,
                amp1,
                freq1,
                amp2,
                freq2: freq1 * GOLDEN_RATIO,
            },
            seed: 0,
        }
    }

    pub fn telegraph(low: f64, high: f64, rate_up: f64, rate_down: f64, seed: u64) -> Self {
        DriverSpec {
            kind: ProcessKind::Telegraph {
                low,
                high,
                rate_up,
                rate_down,
            },
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Hard bounds `(a_min, a_max)` of the realized values.
    pub fn bounds(&self) -> (f64, f64) {
        match self.kind {
            ProcessKind::Constant { level } => (level, level),
            ProcessKind::Periodic {
                base, amplitude, ..
            } => (base - amplitude, base + amplitude),
            ProcessKind::Quasiperiodic {
                base, amp1, amp2, ..
            } => (base - amp1 - amp2, base + amp1 + amp2),
            ProcessKind::Telegraph { low, high, .. } => (low, high),
        }
    }

    /// Check the positivity and rate constraints.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        match self.kind {
            ProcessKind::Constant { level } => {
                if level <= 0.0 {
                    violations.push(format!("driver: constant level {level} must be positive"));
                }
            }
            ProcessKind::Periodic {
                base,
                amplitude,
                period,
            } => {
                if amplitude < 0.0 {
                    violations.push("driver: amplitude must be nonnegative".into());
                }
                if base <= amplitude {
                    violations.push(format!(
                        "driver: base {base} must exceed amplitude {amplitude} to keep a(t) > 0"
                    ));
                }
                if period <= 0.0 {
                    violations.push("driver: period must be positive".into());
                }
            }
            ProcessKind::Quasiperiodic {
                base,
                amp1,
                freq1,
                amp2,
                freq2,
            } => {
                if amp1 < 0.0 || amp2 < 0.0 {
                    violations.push("driver: amplitudes must be nonnegative".into());
                }
                if base <= amp1 + amp2 {
                    violations.push(format!(
                        "driver: base {base} must exceed the amplitude sum {} to keep a(t) > 0",
                        amp1 + amp2
                    ));
                }
                if freq1 <= 0.0 || freq2 <= 0.0 {
                    violations.push("driver: frequencies must be positive".into());
                }
            }
            ProcessKind::Telegraph {
                low,
                high,
                rate_up,
                rate_down,
            } => {
                if low <= 0.0 {
                    violations.push(format!("driver: low state {low} must be positive"));
                }
                if high < low {
                    violations.push(format!("driver: high state {high} must be >= low {low}"));
                }
                if rate_up <= 0.0 || rate_down <= 0.0 {
                    violations.push("driver: telegraph rates must be strictly positive".into());
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(violations))
        }
    }

    /// Materialize the realization over `[lo, hi]` (jump times for the
    /// telegraph process, nothing for the deterministic kinds).
    pub fn realize(&self, lo: f64, hi: f64) -> Realization {
        match self.kind {
            ProcessKind::Telegraph {
                rate_up, rate_down, ..
            } => Realization::Telegraph(TelegraphPath::generate(self, lo, hi, rate_up, rate_down)),
            _ => Realization::Closed(*self),
        }
    }
}

/// One realized sample path, evaluable at any time inside its window.
#[derive(Debug, Clone)]
pub enum Realization {
    /// Deterministic closed-form kinds.
    Closed(DriverSpec),
    /// A telegraph path with materialized jump times.
    Telegraph(TelegraphPath),
}

impl Realization {
    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            Realization::Closed(spec) => match spec.kind {
                ProcessKind::Constant { level } => level,
                ProcessKind::Periodic {
                    base,
                    amplitude,
                    period,
                } => base + amplitude * (2.0 * std::f64::consts::PI * t / period).sin(),
                ProcessKind::Quasiperiodic {
                    base,
                    amp1,
                    freq1,
                    amp2,
                    freq2,
                } => base + amp1 * (freq1 * t).sin() + amp2 * (freq2 * t).sin(),
                ProcessKind::Telegraph { .. } => unreachable!("telegraph is materialized"),
            },
            Realization::Telegraph(path) => path.value_at(t),
        }
    }
}

/// Materialized telegraph realization. The state at t = 0 is drawn from the
/// stationary distribution; holding times extend forward and backward from 0
/// on independent ChaCha8 streams. Two-state chains are reversible, so the
/// backward extension uses the same rates.
#[derive(Debug, Clone)]
pub struct TelegraphPath {
    low: f64,
    high: f64,
    /// true = high state on the interval containing t = 0.
    state_at_zero: bool,
    /// Ascending jump times > 0.
    forward: Vec<f64>,
    /// Descending jump times < 0.
    backward: Vec<f64>,
    window: (f64, f64),
}

impl TelegraphPath {
    fn generate(spec: &DriverSpec, lo: f64, hi: f64, rate_up: f64, rate_down: f64) -> Self {
        let (low, high) = match spec.kind {
            ProcessKind::Telegraph { low, high, .. } => (low, high),
            _ => unreachable!(),
        };
        let mut state_rng = ChaCha8Rng::seed_from_u64(spec.seed);
        state_rng.set_stream(0);
        let p_high = rate_up / (rate_up + rate_down);
        let state_at_zero = state_rng.gen::<f64>() < p_high;

        let holding = |rng: &mut ChaCha8Rng, state_high: bool| -> f64 {
            let rate = if state_high { rate_down } else { rate_up };
            let u: f64 = rng.gen::<f64>();
            -(1.0 - u).ln() / rate
        };

        let mut forward = Vec::new();
        if hi > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(1);
            let mut t = 0.0;
            let mut state = state_at_zero;
            while t <= hi {
                t += holding(&mut rng, state);
                forward.push(t);
                state = !state;
            }
        }
        let mut backward = Vec::new();
        if lo < 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(2);
            let mut t = 0.0;
            let mut state = state_at_zero;
            while t >= lo {
                t -= holding(&mut rng, state);
                backward.push(t);
                state = !state;
            }
        }
        TelegraphPath {
            low,
            high,
            state_at_zero,
            forward,
            backward,
            window: (lo, hi),
        }
    }

    fn value_at(&self, t: f64) -> f64 {
        debug_assert!(
            t >= self.window.0 - 1e-9 && t <= self.window.1 + 1e-9,
            "telegraph realization evaluated outside its window"
        );
        let flips = if t >= 0.0 {
            self.forward.partition_point(|&j| j <= t)
        } else {
            self.backward.partition_point(|&j| j > t)
        };
        let state = self.state_at_zero ^ (flips % 2 == 1);
        if state {
            self.high
        } else {
            self.low
        }
    }
}

/// Interpolation rule attached to a sampled path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    PiecewiseConstant,
    PiecewiseLinear,
}

/// A sampled realization of `t -> a(t)` on a uniform grid.
///
/// Paths are immutable after creation. A path produced by `sample_path`
/// remembers its spec, so it can be shifted in time by resampling the same
/// realization; derived paths (for example speed paths) cannot.
#[derive(Debug, Clone)]
pub struct CoefficientPath {
    t_start: f64,
    dt: f64,
    values: Vec<f64>,
    interp: Interpolation,
    bounds: (f64, f64),
    source: Option<DriverSpec>,
    source_offset: f64,
}

/// Least / upper mean estimate with its ladder diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct MeanEstimate {
    /// Value at the largest averaging window of the ladder.
    pub value: f64,
    /// Spread of the estimates across the ladder (uncertainty proxy).
    pub spread: f64,
    /// The largest averaging window actually used.
    pub window: f64,
}

/// Block-average decomposition of a path over blocks of length `block_len`:
/// per-block means `alphas` and the deviation path `A` with `A(kT) = 0`.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub block_len: f64,
    pub alphas: Vec<f64>,
    pub deviation: CoefficientPath,
}

impl BlockDecomposition {
    /// Sup norm of the deviation.
    pub fn deviation_sup(&self) -> f64 {
        self.deviation
            .values()
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Sample one realization of the driver on `[t0, t1]` with spacing `dt`.
///
/// Deterministic given `(spec, seed)`: repeated calls return bitwise
/// identical values.
pub fn sample_path(spec: &DriverSpec, t0: f64, t1: f64, dt: f64) -> Result<CoefficientPath> {
    spec.validate()?;
    if !(t0 < t1) {
        return Err(Error::InvalidArgument(format!(
            "sample window [{t0}, {t1}] is empty"
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt {dt} must be positive")));
    }
    let n_cells = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
    let realization = spec.realize(t0, t0 + (n_cells as f64) * dt);
    let values: Vec<f64> = (0..=n_cells)
        .map(|i| realization.value_at(t0 + i as f64 * dt))
        .collect();
    let interp = match spec.kind {
        ProcessKind::Telegraph { .. } => Interpolation::PiecewiseConstant,
        _ => Interpolation::PiecewiseLinear,
    };
    Ok(CoefficientPath {
        t_start: t0,
        dt,
        values,
        interp,
        bounds: spec.bounds(),
        source: Some(*spec),
        source_offset: 0.0,
    })
}

impl CoefficientPath {
    /// Build a path from raw samples (no regeneration possible).
    pub fn from_values(
        t_start: f64,
        dt: f64,
        values: Vec<f64>,
        interp: Interpolation,
    ) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(
                "a path needs at least two samples".into(),
            ));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt {dt} must be positive")));
        }
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(CoefficientPath {
            t_start,
            dt,
            values,
            interp,
            bounds: (lo, hi),
            source: None,
            source_offset: 0.0,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_start + self.dt * (self.values.len() - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.dt * (self.values.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interp
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    pub fn sample_times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.t_start + i as f64 * self.dt)
    }

    /// Evaluate at `t` by the path's interpolation. Clamps to the support
    /// ends within a rounding-tolerance; panics in debug builds farther out.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.values.len();
        let s = (t - self.t_start) / self.dt;
        debug_assert!(
            s > -1e-6 && s < (n - 1) as f64 + 1e-6,
            "path evaluated at t = {t} outside [{}, {}]",
            self.t_start,
            self.t_end()
        );
        let s = s.clamp(0.0, (n - 1) as f64);
        match self.interp {
            Interpolation::PiecewiseConstant => {
                let i = (s.floor() as usize).min(n - 1);
                self.values[i]
            }
            Interpolation::PiecewiseLinear => {
                let i = (s.floor() as usize).min(n - 2);
                let w = s - i as f64;
                self.values[i] * (1.0 - w) + self.values[i + 1] * w
            }
        }
    }

    /// Derived path with the same grid and interpolation, values mapped
    /// through `f`. The result has no source spec.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CoefficientPath {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        CoefficientPath {
            t_start: self.t_start,
            dt: self.dt,
            values,
            interp: self.interp,
            bounds: (lo, hi),
            source: None,
            source_offset: 0.0,
        }
    }

    /// Swap in new values on the same grid (derived path, no source).
    pub(crate) fn replace_values(&mut self, values: Vec<f64>) {
        assert_eq!(values.len(), self.values.len());
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        self.bounds = (lo, hi);
        self.values = values;
        self.source = None;
        self.source_offset = 0.0;
    }

    /// Time shift: the returned path holds `a(t + s)` on the same window.
    ///
    /// Requires a regenerable source unless `s == 0`. Shifts compose
    /// exactly: `shift(shift(p, s1), s2) == shift(p, s1 + s2)` bitwise.
    pub fn shift(&self, s: f64) -> Result<CoefficientPath> {
        if s == 0.0 {
            return Ok(self.clone());
        }
        let spec = self.source.ok_or_else(|| {
            Error::Domain(
                "cannot shift a derived path outside its support (no source spec)".into(),
            )
        })?;
        let offset = self.source_offset + s;
        let n_cells = self.values.len() - 1;
        let realization = spec.realize(self.t_start + offset, self.t_end() + offset);
        let values: Vec<f64> = (0..=n_cells)
            .map(|i| realization.value_at(self.t_start + i as f64 * self.dt + offset))
            .collect();
        Ok(CoefficientPath {
            t_start: self.t_start,
            dt: self.dt,
            values,
            interp: self.interp,
            bounds: self.bounds,
            source: Some(spec),
            source_offset: offset,
        })
    }

    /// Prefix integral `I[k] = int_{t0}^{t_k} a`, quadrature consistent with
    /// the interpolation (trapezoid for linear, left rectangle for constant).
    pub fn integral_prefix(&self) -> Vec<f64> {
        match self.interp {
            Interpolation::PiecewiseLinear => prefix_sums(
                self.values
                    .windows(2)
                    .map(|w| 0.5 * self.dt * (w[0] + w[1])),
            ),
            Interpolation::PiecewiseConstant => prefix_sums(
                self.values[..self.values.len() - 1]
                    .iter()
                    .map(|&v| self.dt * v),
            ),
        }
    }

    /// Least mean: ladder estimate of
    /// `lim_{r->inf} inf_{t-s>=r} (1/(t-s)) int_s^t a`.
    pub fn least_mean(&self, r_min: f64) -> Result<MeanEstimate> {
        self.mean_extreme(r_min, true)
    }

    /// Upper mean: ladder estimate of the corresponding lim sup.
    pub fn upper_mean(&self, r_min: f64) -> Result<MeanEstimate> {
        self.mean_extreme(r_min, false)
    }

    fn mean_extreme(&self, r_min: f64, minimize: bool) -> Result<MeanEstimate> {
        let horizon = self.horizon();
        if horizon < r_min {
            return Err(Error::Estimation {
                message: "path horizon too short for the requested averaging window".into(),
                attained: horizon,
                needed: r_min,
            });
        }
        if self.values.len() < 5 {
            return Err(Error::Estimation {
                message: "too few samples for the averaging ladder".into(),
                attained: horizon,
                needed: 4.0 * self.dt,
            });
        }
        let prefix = self.integral_prefix();
        let n_cells = self.values.len() - 1;
        // Geometric ladder of minimal windows r = H/16 .. H/2; each estimate
        // scans window lengths r, 2r, ... plus the full horizon.
        let ladder = [horizon / 16.0, horizon / 8.0, horizon / 4.0, horizon / 2.0];
        let mut estimates = [0.0_f64; 4];
        for (idx, &r) in ladder.iter().enumerate() {
            let r = r.max(2.0 * self.dt);
            let mut best = if minimize {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            let mut w = r;
            loop {
                let cells = ((w / self.dt).round() as usize).clamp(1, n_cells);
                let len = cells as f64 * self.dt;
                for i in 0..=(n_cells - cells) {
                    let avg = (prefix[i + cells] - prefix[i]) / len;
                    best = if minimize {
                        best.min(avg)
                    } else {
                        best.max(avg)
                    };
                }
                if cells == n_cells {
                    break;
                }
                w *= 2.0;
                if w >= horizon {
                    w = horizon;
                }
            }
            estimates[idx] = best;
        }
        let value = estimates[3];
        let lo = estimates.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = estimates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(MeanEstimate {
            value,
            spread: hi - lo,
            window: ladder[3].max(2.0 * self.dt),
        })
    }

    /// Block-average decomposition over blocks of length `block_len`.
    ///
    /// The path must cover an integer number of grid-aligned blocks.
    pub fn block_decomposition(&self, block_len: f64) -> Result<BlockDecomposition> {
        if !(block_len > 0.0) {
            return Err(Error::InvalidArgument(
                "block length must be positive".into(),
            ));
        }
        let cells_per_block = (block_len / self.dt).round() as usize;
        if cells_per_block == 0
            || (cells_per_block as f64 * self.dt - block_len).abs() > 1e-9 * block_len.max(1.0)
        {
            return Err(Error::Domain(format!(
                "block length {block_len} is not a multiple of the sample spacing {}",
                self.dt
            )));
        }
        let n_cells = self.values.len() - 1;
        if n_cells % cells_per_block != 0 {
            return Err(Error::Domain(format!(
                "path covers a partial trailing block: {n_cells} cells, {cells_per_block} per block"
            )));
        }
        let n_blocks = n_cells / cells_per_block;
        let block_t = cells_per_block as f64 * self.dt;
        let cell_quad = |i: usize| -> f64 {
            match self.interp {
                Interpolation::PiecewiseLinear => 0.5 * self.dt * (self.values[i] + self.values[i + 1]),
                Interpolation::PiecewiseConstant => self.dt * self.values[i],
            }
        };
        let mut alphas = Vec::with_capacity(n_blocks);
        let mut deviation = Vec::with_capacity(self.values.len());
        deviation.push(0.0);
        for b in 0..n_blocks {
            let start = b * cells_per_block;
            let mut block_sum = Kahan::new();
            for i in start..start + cells_per_block {
                block_sum.add(cell_quad(i));
            }
            let alpha = block_sum.value() / block_t;
            alphas.push(alpha);
            let mut acc = Kahan::new();
            for i in start..start + cells_per_block {
                acc.add(cell_quad(i) - alpha * self.dt);
                deviation.push(acc.value());
            }
        }
        let dev_path = CoefficientPath {
            t_start: self.t_start,
            dt: self.dt,
            values: deviation,
            interp: Interpolation::PiecewiseLinear,
            bounds: (0.0, 0.0),
            source: None,
            source_offset: 0.0,
        };
        let mut dev_path = dev_path;
        let lo = dev_path.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = dev_path
            .values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        dev_path.bounds = (lo, hi);
        Ok(BlockDecomposition {
            block_len: block_t,
            alphas,
            deviation: dev_path,
        })
    }
}
