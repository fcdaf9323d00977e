//! Dispersal kernels and their exponential moments.
//!
//! A kernel is a nonnegative density `J(t, y) = mass * m(t) * shape(y)` with
//! unit-mass shape and an optional bounded positive time modulation `m`.
//! The central quantity is the exponential moment
//!
//! ```text
//! L(t, mu) = int_R J(t, y) e^{mu y} dy,
//! ```
//!
//! finite exactly for `mu` below the abscissa of convergence of the shape.
//! The abscissa is kept as a symbolic sentinel for shapes with
//! super-exponential decay so that searches over `mu` never silently
//! overflow.

use crate::driver::CoefficientPath;
use crate::error::{Error, Result};

/// Built-in kernel shapes (all even in `y`, unit mass).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelShape {
    /// `exp(-y^2 / (2 s^2)) / (s sqrt(2 pi))`.
    Gaussian { scale: f64 },
    /// `(beta / 2) exp(-beta |y|)`.
    Laplace { rate: f64 },
    /// `max(0, R - |y|) / R^2`.
    Tent { radius: f64 },
}

/// Abscissa of convergence of `mu -> int J e^{mu y}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Abscissa {
    Finite(f64),
    Infinite,
}

impl Abscissa {
    /// Is the exponent admissible (strictly below the abscissa)?
    pub fn admits(&self, mu: f64) -> bool {
        match *self {
            Abscissa::Finite(sigma) => mu < sigma,
            Abscissa::Infinite => true,
        }
    }

    /// Finite value if any.
    pub fn finite(&self) -> Option<f64> {
        match *self {
            Abscissa::Finite(s) => Some(s),
            Abscissa::Infinite => None,
        }
    }

    /// `min(fraction * sigma, cap)` with the sentinel mapped to `cap`.
    pub fn capped(&self, fraction: f64, cap: f64) -> f64 {
        match *self {
            Abscissa::Finite(s) => (fraction * s).min(cap),
            Abscissa::Infinite => cap,
        }
    }
}

/// A dispersal kernel: shape, total mass, optional mass modulation in time.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub shape: KernelShape,
    pub mass: f64,
    /// Optional positive bounded modulation `m(t)` multiplying the mass,
    /// sampled like a coefficient path.
    pub modulation: Option<CoefficientPath>,
}

impl KernelSpec {
    pub fn gaussian(scale: f64) -> Self {
        KernelSpec {
            shape: KernelShape::Gaussian { scale },
            mass: 1.0,
            modulation: None,
        }
    }

    pub fn laplace(rate: f64) -> Self {
        KernelSpec {
            shape: KernelShape::Laplace { rate },
            mass: 1.0,
            modulation: None,
        }
    }

    pub fn tent(radius: f64) -> Self {
        KernelSpec {
            shape: KernelShape::Tent { radius },
            mass: 1.0,
            modulation: None,
        }
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_modulation(mut self, m: CoefficientPath) -> Self {
        self.modulation = Some(m);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        let param = match self.shape {
            KernelShape::Gaussian { scale } => ("scale", scale),
            KernelShape::Laplace { rate } => ("rate", rate),
            KernelShape::Tent { radius } => ("radius", radius),
        };
        if !(param.1 > 0.0) || !param.1.is_finite() {
            violations.push(format!(
                "kernel: {} {} must be positive and finite",
                param.0, param.1
            ));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            violations.push(format!("kernel: mass {} must be positive", self.mass));
        }
        if let Some(m) = &self.modulation {
            let (lo, hi) = m.bounds();
            if !(lo > 0.0) {
                violations.push(format!(
                    "kernel: modulation must stay bounded away from 0, found minimum {lo}"
                ));
            }
            if !hi.is_finite() {
                violations.push("kernel: modulation must be bounded above".into());
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(violations))
        }
    }

    /// Characteristic length of the shape (Gaussian scale, 1/rate, radius).
    pub fn length_scale(&self) -> f64 {
        match self.shape {
            KernelShape::Gaussian { scale } => scale,
            KernelShape::Laplace { rate } => 1.0 / rate,
            KernelShape::Tent { radius } => radius,
        }
    }

    /// Unit-mass density of the shape at `y`.
    pub fn shape_density(&self, y: f64) -> f64 {
        match self.shape {
            KernelShape::Gaussian { scale } => {
                let z = y / scale;
                (-0.5 * z * z).exp() / (scale * (2.0 * std::f64::consts::PI).sqrt())
            }
            KernelShape::Laplace { rate } => 0.5 * rate * (-rate * y.abs()).exp(),
            KernelShape::Tent { radius } => (radius - y.abs()).max(0.0) / (radius * radius),
        }
    }

    /// Modulation factor at time `t` (1 when unmodulated).
    pub fn modulation_at(&self, t: f64) -> f64 {
        self.modulation.as_ref().map_or(1.0, |m| m.eval(t))
    }

    /// Kernel density `J(t, y)`.
    pub fn density(&self, t: f64, y: f64) -> f64 {
        self.mass * self.modulation_at(t) * self.shape_density(y)
    }

    /// Total mass `int J(t, .) dy = mass * m(t)`.
    pub fn mass_at(&self, t: f64) -> f64 {
        self.mass * self.modulation_at(t)
    }

    /// Largest modulation factor over the sampled path (1 when unmodulated).
    pub fn max_modulation(&self) -> f64 {
        self.modulation.as_ref().map_or(1.0, |m| m.bounds().1)
    }

    /// Abscissa of convergence of the exponential moment.
    pub fn abscissa(&self) -> Abscissa {
        match self.shape {
            KernelShape::Laplace { rate } => Abscissa::Finite(rate),
            KernelShape::Gaussian { .. } | KernelShape::Tent { .. } => Abscissa::Infinite,
        }
    }

    /// Unit-mass exponential moment of the shape (closed forms).
    pub fn unit_exp_moment(&self, mu: f64) -> Result<f64> {
        if !self.abscissa().admits(mu.abs()) {
            let sigma = self.abscissa().finite().unwrap_or(f64::INFINITY);
            return Err(Error::BeyondAbscissa {
                mu: mu.abs(),
                sigma,
            });
        }
        Ok(match self.shape {
            KernelShape::Gaussian { scale } => (0.5 * mu * mu * scale * scale).exp(),
            KernelShape::Laplace { rate } => rate * rate / (rate * rate - mu * mu),
            KernelShape::Tent { radius } => {
                let z = 0.5 * mu * radius;
                if z.abs() < 1e-8 {
                    // sinh expansion keeps the limit exact at mu = 0
                    1.0 + z * z / 3.0
                } else {
                    let r = z.sinh() / z;
                    r * r
                }
            }
        })
    }

    /// Exponential moment `L(t, mu)`.
    ///
    /// Errors when `|mu|` reaches the abscissa of convergence.
    pub fn exp_moment(&self, t: f64, mu: f64) -> Result<f64> {
        Ok(self.mass_at(t) * self.unit_exp_moment(mu)?)
    }
}
