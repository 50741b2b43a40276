use crate::error::{PgdError, Result};

/// Uniform P1 mesh of the bar `[0, ℓ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    length: f64,
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn uniform(length: f64, elements: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(PgdError::invalid(format!("bar length must be positive, got {length}")));
        }
        if elements == 0 {
            return Err(PgdError::invalid("element count must be at least 1"));
        }
        let h = length / elements as f64;
        let mut nodes: Vec<f64> = (0..=elements).map(|i| i as f64 * h).collect();
        nodes[elements] = length;
        Ok(Self { length, nodes })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn element_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Free degrees of freedom once the node at `x = 0` is eliminated.
    pub fn free_dofs(&self) -> usize {
        self.element_count()
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.element_count() as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Coordinates of the free nodes (all but `x = 0`).
    pub fn free_nodes(&self) -> &[f64] {
        &self.nodes[1..]
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }
}

/// Uniform time grid `tⁿ = n·hₜ`, `n = 0..=N_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(PgdError::invalid(format!("time horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(PgdError::invalid("time step count must be at least 1"));
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of time nodes, `N_t + 1`.
    pub fn nodes(&self) -> usize {
        self.steps + 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn t(&self, n: usize) -> f64 {
        if n == self.steps {
            self.horizon
        } else {
            n as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|n| self.t(n)).collect()
    }

    /// Same horizon, twice as many steps.
    pub fn refined(&self) -> Self {
        Self {
            horizon: self.horizon,
            steps: 2 * self.steps,
        }
    }
}

/// Density field: constant or piecewise constant per element.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Constant(f64),
    PerElement(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub youngs_modulus: f64,
    pub area: f64,
    pub density: Density,
    /// Linear viscous damping coefficient ζ (kg/m/s); zero when undamped.
    pub damping: f64,
}

impl Material {
    pub fn new(youngs_modulus: f64, area: f64, density: f64, damping: f64) -> Result<Self> {
        let m = Self {
            youngs_modulus,
            area,
            density: Density::Constant(density),
            damping,
        };
        m.validate(None)?;
        Ok(m)
    }

    pub fn with_density_profile(mut self, per_element: Vec<f64>) -> Result<Self> {
        self.density = Density::PerElement(per_element);
        self.validate(None)?;
        Ok(self)
    }

    pub fn validate(&self, elements: Option<usize>) -> Result<()> {
        if !(self.youngs_modulus > 0.0) {
            return Err(PgdError::invalid("Young's modulus must be positive"));
        }
        if !(self.area > 0.0) {
            return Err(PgdError::invalid("cross-section area must be positive"));
        }
        if !(self.damping >= 0.0) {
            return Err(PgdError::invalid("damping coefficient must be non-negative"));
        }
        match &self.density {
            Density::Constant(rho) if !(*rho > 0.0) => {
                Err(PgdError::invalid("density must be positive"))
            }
            Density::PerElement(rho) => {
                if rho.iter().any(|r| !(*r > 0.0)) {
                    return Err(PgdError::invalid("density must be positive everywhere"));
                }
                match elements {
                    Some(n) if n != rho.len() => Err(PgdError::invalid(format!(
                        "density profile has {} entries for {n} elements",
                        rho.len()
                    ))),
                    _ => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    pub fn density_at(&self, element: usize) -> f64 {
        match &self.density {
            Density::Constant(rho) => *rho,
            Density::PerElement(rho) => rho[element],
        }
    }

    /// ρA on element `e`.
    pub fn inertia(&self, element: usize) -> f64 {
        self.density_at(element) * self.area
    }

    pub fn axial_stiffness(&self) -> f64 {
        self.youngs_modulus * self.area
    }

    /// ρA when the density is uniform.
    pub fn uniform_inertia(&self) -> Option<f64> {
        match self.density {
            Density::Constant(rho) => Some(rho * self.area),
            Density::PerElement(_) => None,
        }
    }

    /// Wave speed `c = √(E/ρ)` for a uniform bar.
    pub fn wave_speed(&self) -> Option<f64> {
        match self.density {
            Density::Constant(rho) => Some((self.youngs_modulus / rho).sqrt()),
            Density::PerElement(_) => None,
        }
    }

    /// Nodal ρA on the free nodes (averaged across element interfaces).
    pub fn nodal_inertia(&self, mesh: &Mesh1D) -> Vec<f64> {
        let ne = mesh.element_count();
        (1..=ne)
            .map(|node| {
                if node == ne {
                    self.inertia(ne - 1)
                } else {
                    0.5 * (self.inertia(node - 1) + self.inertia(node))
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_scale_mesh() {
        let mesh = Mesh1D::uniform(0.2, 224).unwrap();
        assert_eq!(mesh.node_count(), 225);
        assert!((mesh.spacing() - 0.2 / 224.0).abs() < 1e-18);
        for w in mesh.nodes().windows(2) {
            assert!(((w[1] - w[0]) / mesh.spacing() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_and_midpoint() {
        assert_eq!(Mesh1D::uniform(1.0, 1).unwrap().nodes(), &[0.0, 1.0]);
        assert_eq!(Mesh1D::uniform(1.0, 4).unwrap().nodes()[2], 0.5);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Mesh1D::uniform(0.0, 3).is_err());
        assert!(Mesh1D::uniform(-1.0, 3).is_err());
        assert!(Mesh1D::uniform(1.0, 0).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(TimeGrid::new(0.0, 10).is_err());
    }

    #[test]
    fn time_grid_covers_horizon() {
        let g = TimeGrid::new(1.15e-3, 1025).unwrap();
        assert!((g.dt() * 1025.0 / 1.15e-3 - 1.0).abs() < 1e-14);
        assert_eq!(g.t(1025), 1.15e-3);
        assert_eq!(g.refined().steps(), 2050);
    }

    #[test]
    fn material_invariants() {
        assert!(Material::new(1.0, 1.0, 1.0, -1.0).is_err());
        assert!(Material::new(0.0, 1.0, 1.0, 0.0).is_err());
        let m = Material::new(220e9, 1e-3, 7000.0, 0.0).unwrap();
        assert!((m.wave_speed().unwrap() - (220e9f64 / 7000.0).sqrt()).abs() < 1e-9);
        assert!(m.clone().with_density_profile(vec![1.0, 0.0]).is_err());
    }
}
