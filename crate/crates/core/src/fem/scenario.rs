//! Problem data: boundary signals, body loads and initial profiles.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::fem::mesh::{Material, Mesh1D, TimeGrid};

type SignalFn = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;
type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type FieldFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Scalar time signal with analytic first and second derivatives.
#[derive(Clone)]
pub enum Signal {
    Zero,
    Constant(f64),
    /// `a (1 − cos ωt)` while `t ≤ cutoff` (always, without cutoff), zero afterwards.
    RampCosine {
        amplitude: f64,
        omega: f64,
        cutoff: Option<f64>,
    },
    /// Closure returning `[s(t), ṡ(t), s̈(t)]`.
    Custom(SignalFn),
}

impl Signal {
    pub fn custom(f: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        Signal::Custom(Arc::new(f))
    }

    /// `[s, ṡ, s̈]` at time `t`.
    pub fn eval(&self, t: f64) -> [f64; 3] {
        match self {
            Signal::Zero => [0.0; 3],
            Signal::Constant(c) => [*c, 0.0, 0.0],
            Signal::RampCosine {
                amplitude,
                omega,
                cutoff,
            } => {
                if cutoff.is_some_and(|c| t > c) {
                    return [0.0; 3];
                }
                let (s, c) = (omega * t).sin_cos();
                [
                    amplitude * (1.0 - c),
                    amplitude * omega * s,
                    amplitude * omega * omega * c,
                ]
            }
            Signal::Custom(f) => f(t),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t)[0]
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Signal::Zero => true,
            Signal::Constant(c) => *c == 0.0,
            Signal::RampCosine { amplitude, .. } => *amplitude == 0.0,
            Signal::Custom(_) => false,
        }
    }
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signal::Zero => write!(f, "Zero"),
            Signal::Constant(c) => write!(f, "Constant({c})"),
            Signal::RampCosine {
                amplitude,
                omega,
                cutoff,
            } => f
                .debug_struct("RampCosine")
                .field("amplitude", amplitude)
                .field("omega", omega)
                .field("cutoff", cutoff)
                .finish(),
            Signal::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Spatial profile used for initial data.
#[derive(Clone)]
pub enum Profile {
    Zero,
    /// `u(x) = slope · x`.
    Linear { slope: f64 },
    Custom(ProfileFn),
}

impl Profile {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Linear { slope } => slope * x,
            Profile::Custom(f) => f(x),
        }
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Zero => write!(f, "Zero"),
            Profile::Linear { slope } => write!(f, "Linear {{ slope: {slope} }}"),
            Profile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Distributed load `f(x, t)` per unit length.
#[derive(Clone)]
pub enum BodyLoad {
    Zero,
    /// Spatially uniform load with the given time history.
    Uniform(Signal),
    Custom(FieldFn),
}

impl BodyLoad {
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        BodyLoad::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            BodyLoad::Zero => 0.0,
            BodyLoad::Uniform(s) => s.value(t),
            BodyLoad::Custom(f) => f(x, t),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BodyLoad::Zero => true,
            BodyLoad::Uniform(s) => s.is_zero(),
            BodyLoad::Custom(_) => false,
        }
    }
}

impl fmt::Debug for BodyLoad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyLoad::Zero => write!(f, "Zero"),
            BodyLoad::Uniform(s) => write!(f, "Uniform({s:?})"),
            BodyLoad::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Condition at `x = ℓ`; the end `x = 0` is always clamped.
#[derive(Clone, Debug)]
pub enum RightBoundary {
    /// `EA u′(ℓ, t) = g(t)`.
    Traction(Signal),
    /// `u(ℓ, t) = u_ℓ(t)`.
    Displacement(Signal),
    Free,
}

impl RightBoundary {
    pub fn is_dirichlet(&self) -> bool {
        matches!(self, RightBoundary::Displacement(_))
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub material: Material,
    pub length: f64,
    pub elements: usize,
    pub horizon: f64,
    pub steps: usize,
    pub right: RightBoundary,
    pub body: BodyLoad,
    pub initial_displacement: Profile,
    pub initial_velocity: Profile,
    pub update_enabled: bool,
    pub case_id: Option<u8>,
}

impl Scenario {
    pub fn mesh(&self) -> Result<Mesh1D> {
        Mesh1D::uniform(self.length, self.elements)
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.horizon, self.steps)
    }

    /// A bar with no load and no initial data; useful as a template.
    pub fn quiescent(material: Material, length: f64, elements: usize, horizon: f64, steps: usize) -> Self {
        Self {
            material,
            length,
            elements,
            horizon,
            steps,
            right: RightBoundary::Free,
            body: BodyLoad::Zero,
            initial_displacement: Profile::Zero,
            initial_velocity: Profile::Zero,
            update_enabled: true,
            case_id: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_cosine_derivatives() {
        let s = Signal::RampCosine {
            amplitude: 2.0,
            omega: 3.0,
            cutoff: Some(1.0),
        };
        let t = 0.4;
        let h = 1e-5;
        let [v, d1, d2] = s.eval(t);
        let fd1 = (s.value(t + h) - s.value(t - h)) / (2.0 * h);
        let fd2 = (s.value(t + h) - 2.0 * v + s.value(t - h)) / (h * h);
        assert!((d1 - fd1).abs() < 1e-6);
        assert!((d2 - fd2).abs() < 1e-3);
        assert_eq!(s.eval(1.5), [0.0; 3]);
    }
}
