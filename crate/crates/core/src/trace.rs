//! Sampled wavefunctions and densities with their parameter record.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModulatedPacket, PhysicsConstants, PotentialModel};
use crate::solver::{components, Components, EvaluationPoint};

/// Which coordinate the grid runs over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Samples in t at fixed x (Å).
    Time { x: f64 },
    /// Samples in x at fixed t (ps).
    Space { t: f64 },
}

impl Axis {
    pub fn point(&self, s: f64) -> EvaluationPoint {
        match *self {
            Axis::Time { x } => EvaluationPoint::new(x, s),
            Axis::Space { t } => EvaluationPoint::new(s, t),
        }
    }

    pub fn column_name(&self) -> &'static str {
        match self {
            Axis::Time { .. } => "t_ps",
            Axis::Space { .. } => "x_A",
        }
    }
}

/// Parameters a trace was computed from.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRecord {
    pub potential: String,
    pub lambda_eV_A: Option<f64>,
    pub energy_eV: f64,
    pub k_invA: f64,
    pub dk_invA: f64,
    pub constants: PhysicsConstants,
    pub version: String,
}

impl ParamRecord {
    pub fn new(model: &PotentialModel, packet: &ModulatedPacket) -> Self {
        Self {
            potential: model.name().to_string(),
            lambda_eV_A: match model {
                PotentialModel::Delta(w) => Some(w.lambda),
                _ => None,
            },
            energy_eV: packet.energy(),
            k_invA: packet.k,
            dk_invA: packet.dk,
            constants: packet.constants,
            version: crate::VERSION.to_string(),
        }
    }
}

/// `n` equally spaced samples from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(min.is_finite() && max.is_finite()) || max <= min {
        return Err(Error::Config(format!("grid needs samples >= 2 and min < max (got {min}, {max}, {n})")));
    }
    let h = (max - min) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { max } else { min + h * i as f64 }).collect())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("grid must be non-empty and strictly increasing".into()));
    }
    Ok(())
}

/// Sampled Ψ.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrace {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub params: Option<ParamRecord>,
}

impl ComplexTrace {
    /// Evaluates `f` on every grid point in parallel; output order follows the grid.
    pub fn sample<F>(axis: Axis, grid: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(EvaluationPoint) -> Result<Complex64> + Sync,
    {
        check_grid(&grid)?;
        let values = grid.par_iter().map(|&s| f(axis.point(s))).collect::<Result<Vec<_>>>()?;
        Ok(Self { axis, grid, values, params: None })
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// Per-sample ρ₊, ρ₋ and ρ_int.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComponentDensities {
    pub rho_plus: Vec<f64>,
    pub rho_minus: Vec<f64>,
    pub rho_int: Vec<f64>,
}

/// Sampled ρ, optionally with its component split.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTrace {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub rho: Vec<f64>,
    pub components: Option<ComponentDensities>,
    pub params: Option<ParamRecord>,
}

impl DensityTrace {
    pub fn from_values(axis: Axis, grid: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        check_grid(&grid)?;
        if grid.len() != rho.len() {
            return Err(Error::Config("grid and density lengths differ".into()));
        }
        Ok(Self { axis, grid, rho, components: None, params: None })
    }

    /// Samples the partial waves returned by `f`. With `split` the component
    /// densities are kept; ρ is always ρ₊ + ρ₋ + ρ_int so the split adds up.
    pub fn sample<F>(axis: Axis, grid: Vec<f64>, split: bool, f: F) -> Result<Self>
    where
        F: Fn(EvaluationPoint) -> Result<Components> + Sync,
    {
        check_grid(&grid)?;
        let parts = grid.par_iter().map(|&s| f(axis.point(s)).map(|c| c.densities())).collect::<Result<Vec<_>>>()?;
        let rho = parts.iter().map(|&(p, m, i)| (p + m + i).max(0.0)).collect();
        let components = split.then(|| ComponentDensities {
            rho_plus: parts.iter().map(|p| p.0).collect(),
            rho_minus: parts.iter().map(|p| p.1).collect(),
            rho_int: parts.iter().map(|p| p.2).collect(),
        });
        Ok(Self { axis, grid, rho, components, params: None })
    }

    /// Exact density of `packet` behind `model`.
    pub fn exact(
        model: &PotentialModel,
        packet: &ModulatedPacket,
        axis: Axis,
        grid: Vec<f64>,
        split: bool,
    ) -> Result<Self> {
        let mut tr = Self::sample(axis, grid, split, |p| components(model, packet, p))?;
        tr.params = Some(ParamRecord::new(model, packet));
        Ok(tr)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}
