//! Exact transmitted wavefunction for `x ≥ L`: the general Moshinsky-function
//! sum over Q-transform poles and resonance poles, its delta-well
//! specialization and free propagation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    q_transform_sine, DeltaWell, ModulatedPacket, PhysicsConstants, PoleExpansion, PotentialModel, ResonanceData,
    Transmission, POLE_THRESHOLD,
};
use crate::specfun::{moshinsky, MoshinskyArgs};

const I: Complex64 = Complex64::new(0.0, 1.0);
/// 1/(2i)
const HALF_OVER_I: Complex64 = Complex64::new(0.0, -0.5);

/// Position (Å) and time (ps) at which a wavefunction is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationPoint {
    pub x: f64,
    pub t: f64,
}

impl EvaluationPoint {
    pub fn new(x: f64, t: f64) -> Self {
        Self { x, t }
    }

    fn check(&self, x_min: f64) -> Result<()> {
        if !(self.x.is_finite() && self.t.is_finite()) {
            return Err(Error::Domain(format!("non-finite evaluation point ({}, {})", self.x, self.t)));
        }
        if self.t < 0.0 {
            return Err(Error::Domain(format!("t must be non-negative, got {}", self.t)));
        }
        if self.x < x_min {
            return Err(Error::Domain(format!("x = {} lies left of the transmission region x >= {x_min}", self.x)));
        }
        Ok(())
    }
}

/// The two partial waves ψ₊ (from k₊) and ψ₋ (from k₋) of a modulated state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Components {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl Components {
    pub fn total(&self) -> Complex64 {
        self.plus + self.minus
    }

    /// (ρ₊, ρ₋, ρ_int) with ρ_int = 2 Re[ψ₊ψ₋*].
    pub fn densities(&self) -> (f64, f64, f64) {
        (self.plus.norm_sqr(), self.minus.norm_sqr(), 2.0 * (self.plus * self.minus.conj()).re)
    }
}

/// Value of the general solution together with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralSolution {
    pub psi: Complex64,
    /// Pole groups of the resonance sum that were included.
    pub groups_used: usize,
    /// Magnitude of the last included group's contribution.
    pub truncation_residual: f64,
}

fn m(constants: PhysicsConstants, point: EvaluationPoint, q: Complex64) -> Result<Complex64> {
    moshinsky(&MoshinskyArgs::new(constants, point.x, q, point.t))
}

/// `Ψ = −[Σₘ αₘ t(κₘ) M(y_κₘ) + i Σₙ tₙ Φ̃(kₙ) M(y_kₙ)]`.
///
/// The resonance sum runs over the first `truncation` time-reversal groups of
/// `res` (all of them when `None`). Only the poles and residues of `qt` enter
/// the first sum; its constant term is used solely through `Φ̃(kₙ)`.
pub fn psi_general(
    constants: PhysicsConstants,
    point: EvaluationPoint,
    qt: &PoleExpansion,
    tx: &dyn Transmission,
    res: &ResonanceData,
    truncation: Option<usize>,
) -> Result<GeneralSolution> {
    point.check(res.length)?;
    for p in &qt.poles {
        for r in res.entries() {
            if (p.position - r.k).norm() < POLE_THRESHOLD {
                return Err(Error::PoleCollision { kappa: p.position, k_n: r.k });
            }
        }
    }
    if point.t == 0.0 {
        if point.x > 0.0 {
            return Ok(GeneralSolution { psi: Complex64::new(0.0, 0.0), groups_used: 0, truncation_residual: 0.0 });
        }
        return Err(Error::Domain("t = 0 at the cut-off edge is not evaluated".into()));
    }

    let mut direct = Complex64::new(0.0, 0.0);
    for p in &qt.poles {
        direct += p.residue * tx.amplitude(p.position)? * m(constants, point, p.position)?;
    }

    let limit = truncation.unwrap_or(usize::MAX);
    let mut resonant = Complex64::new(0.0, 0.0);
    let mut groups_used = 0;
    let mut last = 0.0;
    for group in res.groups().take(limit) {
        let mut term = Complex64::new(0.0, 0.0);
        for r in group {
            term += res.t_n(r) * qt.evaluate(r.k)? * m(constants, point, r.k)?;
        }
        resonant += term;
        last = term.norm();
        groups_used += 1;
    }

    let psi = -(direct + I * resonant);
    if !(psi.re.is_finite() && psi.im.is_finite()) {
        return Err(Error::NonFinite("psi_general"));
    }
    Ok(GeneralSolution { psi, groups_used, truncation_residual: last })
}

/// One partial wave `(1/2i)[t(k)M(y_k) − t(−k)M(y_₋k) + 2λ̃ Φ̃ₖ(iλ̃) M(y_iλ̃)]`,
/// Φ̃ₖ being the Q-transform of the single component sin(kx). Free
/// propagation drops the bound term and sets t ≡ 1.
fn partial_wave(
    constants: PhysicsConstants,
    point: EvaluationPoint,
    k: f64,
    well: Option<(&DeltaWell, Complex64)>,
) -> Result<Complex64> {
    if k == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let kc = Complex64::from(k);
    let mut s = match well {
        Some((w, _)) => w.amplitude(kc)? * m(constants, point, kc)? - w.amplitude(-kc)? * m(constants, point, -kc)?,
        None => m(constants, point, kc)? - m(constants, point, -kc)?,
    };
    if let Some((w, m_bound)) = well {
        s += 2.0 * w.lambda_tilde * q_transform_sine(k, w.bound_pole())? * m_bound;
    }
    Ok(HALF_OVER_I * s)
}

/// ψ₊ and ψ₋ for the delta well. Each partial wave is the exact solution for
/// the initial state sin(k±x) alone, so their sum is Ψ^δ.
pub fn psi_delta_components(point: EvaluationPoint, well: &DeltaWell, packet: &ModulatedPacket) -> Result<Components> {
    point.check(0.0)?;
    if point.t == 0.0 {
        return Ok(Components::default());
    }
    let c = packet.constants;
    let m_bound = m(c, point, well.bound_pole())?;
    Ok(Components {
        plus: partial_wave(c, point, packet.k_plus(), Some((well, m_bound)))?,
        minus: partial_wave(c, point, packet.k_minus(), Some((well, m_bound)))?,
    })
}

pub fn psi_delta(point: EvaluationPoint, well: &DeltaWell, packet: &ModulatedPacket) -> Result<Complex64> {
    Ok(psi_delta_components(point, well, packet)?.total())
}

/// ψ₊ and ψ₋ for free propagation.
pub fn psi_free_components(point: EvaluationPoint, packet: &ModulatedPacket) -> Result<Components> {
    point.check(0.0)?;
    if point.t == 0.0 {
        return Ok(Components::default());
    }
    let c = packet.constants;
    Ok(Components {
        plus: partial_wave(c, point, packet.k_plus(), None)?,
        minus: partial_wave(c, point, packet.k_minus(), None)?,
    })
}

/// `Ψ_f = (1/2i)[M(y_k₊) + M(y_k₋) − M(y_₋k₊) − M(y_₋k₋)]`.
pub fn psi_free(point: EvaluationPoint, packet: &ModulatedPacket) -> Result<Complex64> {
    Ok(psi_free_components(point, packet)?.total())
}

/// Partial waves for any potential model. Generic potentials go through
/// [`psi_general`] with the single-sine Q-transform of each component.
pub fn components(model: &PotentialModel, packet: &ModulatedPacket, point: EvaluationPoint) -> Result<Components> {
    match model {
        PotentialModel::Free => psi_free_components(point, packet),
        PotentialModel::Delta(w) => psi_delta_components(point, w, packet),
        PotentialModel::Generic { resonances, transmission } => {
            let part = |k: f64| -> Result<Complex64> {
                if k == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let qt = PoleExpansion::sine(k);
                Ok(psi_general(packet.constants, point, &qt, transmission.as_ref(), resonances, None)?.psi)
            };
            Ok(Components { plus: part(packet.k_plus())?, minus: part(packet.k_minus())? })
        }
    }
}

pub fn psi(model: &PotentialModel, packet: &ModulatedPacket, point: EvaluationPoint) -> Result<Complex64> {
    Ok(components(model, packet, point)?.total())
}
