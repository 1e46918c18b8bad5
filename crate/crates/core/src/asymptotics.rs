//! Closed-form approximate densities: quantum beats at the origin, the
//! two-level (Rabi) long-time density and the Rabi formula.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::model::{frequencies, q_transform_modulated, DeltaWell, ModulatedPacket, Transmission};
use crate::solver::EvaluationPoint;

const HALF_OVER_I: Complex64 = Complex64::new(0.0, -0.5);

/// Coefficients of the beat density at x = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeatCoefficients {
    /// t(k₊) t*(k₋)
    pub a1: Complex64,
    /// 2 t(k₊) λ̃ Φ̃*(iλ̃)
    pub a2: Complex64,
    /// 2 t*(k₋) λ̃ Φ̃(iλ̃)
    pub a3: Complex64,
    /// Quadrant-correct arg a1.
    pub phi: f64,
    pub t_plus: Complex64,
    pub t_minus: Complex64,
    /// 2λ̃ Φ̃(iλ̃)
    pub bound_weight: Complex64,
}

impl BeatCoefficients {
    pub fn new(well: &DeltaWell, packet: &ModulatedPacket) -> Result<Self> {
        let (t_plus, t_minus) = channel_amplitudes(well, packet)?;
        let phi_b = q_transform_modulated(packet, well.bound_pole())?;
        let lt = well.lambda_tilde;
        let a1 = t_plus * t_minus.conj();
        Ok(Self {
            a1,
            a2: 2.0 * t_plus * lt * phi_b.conj(),
            a3: 2.0 * t_minus.conj() * lt * phi_b,
            phi: a1.im.atan2(a1.re),
            t_plus,
            t_minus,
            bound_weight: 2.0 * lt * phi_b,
        })
    }
}

/// (t(k₊), t(k₋)), with a closed k₋ = 0 channel carrying no amplitude.
fn channel_amplitudes(tx: &dyn Transmission, packet: &ModulatedPacket) -> Result<(Complex64, Complex64)> {
    let tp = tx.amplitude(packet.k_plus().into())?;
    let tm = if packet.k_minus() > 0.0 { tx.amplitude(packet.k_minus().into())? } else { Complex64::new(0.0, 0.0) };
    Ok((tp, tm))
}

/// `Ψ_a(0,t) = (1/2i)[t₊e^{−iE₊t/ħ} + t₋e^{−iE₋t/ħ} + 2λ̃Φ̃(iλ̃)e^{−iE_bt/ħ}]`.
pub fn psi_beats_x0(t: f64, well: &DeltaWell, packet: &ModulatedPacket) -> Result<Complex64> {
    let b = BeatCoefficients::new(well, packet)?;
    let hbar = packet.constants.hbar;
    let ph = |e: f64| Complex64::from_polar(1.0, -e * t / hbar);
    Ok(HALF_OVER_I
        * (b.t_plus * ph(packet.energy_plus())
            + b.t_minus * ph(packet.energy_minus())
            + b.bound_weight * ph(well.bound_energy)))
}

/// Six-term beat density: carrier Ω̄ under an envelope at Ω.
pub fn rho_beats_x0(t: f64, well: &DeltaWell, packet: &ModulatedPacket) -> Result<f64> {
    let b = BeatCoefficients::new(well, packet)?;
    Ok(rho_beats_with(&b, t, well, packet))
}

/// [`rho_beats_x0`] with precomputed coefficients, for dense sampling.
pub fn rho_beats_with(b: &BeatCoefficients, t: f64, well: &DeltaWell, packet: &ModulatedPacket) -> f64 {
    let f = frequencies(packet, well.bound_energy);
    let (wb, w) = (f.omega_bar * t, f.big_omega * t);
    let (a1, a2, a3) = (b.a1, b.a2, b.a3);
    let constant = 0.5 * (b.t_plus.norm_sqr() + b.t_minus.norm_sqr() + b.bound_weight.norm_sqr());
    0.5 * (constant
        + a1.re * w.cos()
        + a1.im * w.sin()
        + (a2.re + a3.re) * wb.cos() * (w / 2.0).cos()
        + (a2.im - a3.im) * wb.sin() * (w / 2.0).cos()
        + (a2.im + a3.im) * wb.cos() * (w / 2.0).sin()
        + (a3.re - a2.re) * wb.sin() * (w / 2.0).sin())
}

/// `Ψ_2l = (1/2i)[t₊e^{i(k₊x − E₊t/ħ)} + t₋e^{i(k₋x − E₋t/ħ)}]`.
pub fn psi_two_level(point: EvaluationPoint, packet: &ModulatedPacket, tx: &dyn Transmission) -> Result<Complex64> {
    let (tp, tm) = channel_amplitudes(tx, packet)?;
    let hbar = packet.constants.hbar;
    let wave = |k: f64, e: f64| Complex64::from_polar(1.0, k * point.x - e * point.t / hbar);
    Ok(HALF_OVER_I
        * (tp * wave(packet.k_plus(), packet.energy_plus()) + tm * wave(packet.k_minus(), packet.energy_minus())))
}

/// `ρ_2l = ¼[(|t₊| + |t₋|)² − 4|t₊||t₋| sin²(Δk x − Ωt/2 + φ/2)]`, φ = arg t₊t₋*.
pub fn rho_two_level(point: EvaluationPoint, packet: &ModulatedPacket, tx: &dyn Transmission) -> Result<f64> {
    let (tp, tm) = channel_amplitudes(tx, packet)?;
    let a1 = tp * tm.conj();
    let phi = a1.im.atan2(a1.re);
    let (p, m) = (tp.norm(), tm.norm());
    let s = (packet.dk * point.x - 0.5 * packet.big_omega() * point.t + 0.5 * phi).sin();
    Ok(0.25 * ((p + m).powi(2) - 4.0 * p * m * s * s))
}

/// Free two-level density `1 − sin²(Δk x − Ωt/2)`.
pub fn rho_two_level_free(point: EvaluationPoint, packet: &ModulatedPacket) -> f64 {
    let s = (packet.dk * point.x - 0.5 * packet.big_omega() * point.t).sin();
    1.0 - s * s
}

/// `(|c₊|² + |c₋|²)² − 4|c₊|²|c₋|² sin²(Ω(t − t′)/2)`.
pub fn rabi_probability(c_plus: Complex64, c_minus: Complex64, dt: f64, big_omega: f64) -> f64 {
    let (p, m) = (c_plus.norm_sqr(), c_minus.norm_sqr());
    let s = (0.5 * big_omega * dt).sin();
    (p + m).powi(2) - 4.0 * p * m * s * s
}
