//! Physical constants, initial-state parametrization, potentials and
//! Q-transform pole data.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance below which an argument is treated as sitting on a pole (Å⁻¹).
pub const POLE_THRESHOLD: f64 = 1e-12;

/// ħ in eV·ps (CODATA 2018).
pub const HBAR_EV_PS: f64 = 6.582119569e-4;

/// ħ/mₑ in Å²/ps (CODATA 2018: 1.054571817e-34 J·s / 9.1093837015e-31 kg).
pub const HBAR_OVER_ME_A2_PS: f64 = 1.157_676_36e4;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Unit system (eV, Å, ps) and particle mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsConstants {
    /// ħ in eV·ps.
    pub hbar: f64,
    /// ħ/m in Å²/ps.
    pub hbar_over_m: f64,
    /// ħ²/2m in eV·Å², stored as `hbar * hbar_over_m / 2`.
    pub hbar2_over_2m: f64,
}

impl PhysicsConstants {
    pub fn new(hbar: f64, hbar_over_m: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0 && hbar_over_m.is_finite() && hbar_over_m > 0.0) {
            return Err(Error::Config(format!(
                "constants must be finite and positive (hbar={hbar}, hbar/m={hbar_over_m})"
            )));
        }
        Ok(Self { hbar, hbar_over_m, hbar2_over_2m: hbar * hbar_over_m / 2.0 })
    }

    /// Electron mass, CODATA ħ.
    pub fn electron() -> Self {
        Self::new(HBAR_EV_PS, HBAR_OVER_ME_A2_PS).expect("default constants are valid")
    }

    /// Particle of mass `mass_ratio · mₑ`.
    pub fn with_mass_ratio(hbar: f64, mass_ratio: f64) -> Result<Self> {
        if !(mass_ratio.is_finite() && mass_ratio > 0.0) {
            return Err(Error::Config(format!("mass_ratio must be positive, got {mass_ratio}")));
        }
        // ħ/m scales with ħ as well as with the mass.
        Self::new(hbar, HBAR_OVER_ME_A2_PS * (hbar / HBAR_EV_PS) / mass_ratio)
    }

    /// Kinetic energy ħ²k²/2m (eV).
    pub fn energy(&self, k: f64) -> f64 {
        self.hbar2_over_2m * k * k
    }

    /// Wavenumber of a free particle of energy `e` (eV).
    pub fn wavenumber(&self, e: f64) -> f64 {
        (e / self.hbar2_over_2m).sqrt()
    }

    /// Group velocity ħk/m (Å/ps).
    pub fn velocity(&self, k: f64) -> f64 {
        self.hbar_over_m * k
    }
}

impl Default for PhysicsConstants {
    fn default() -> Self {
        Self::electron()
    }
}

/// The cut-off initial state `2 sin(kx) cos(Δk x)` for `x ≤ 0`, i.e. the
/// superposition of `sin(k₊x)` and `sin(k₋x)` with `k± = k ± Δk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulatedPacket {
    pub k: f64,
    pub dk: f64,
    pub constants: PhysicsConstants,
}

impl ModulatedPacket {
    pub fn new(constants: PhysicsConstants, k: f64, dk: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Config(format!("carrier wavenumber must be positive, got {k}")));
        }
        if !(dk.is_finite() && (0.0..=k).contains(&dk)) {
            return Err(Error::Config(format!("dk must lie in [0, k={k}], got {dk}")));
        }
        Ok(Self { k, dk, constants })
    }

    /// Packet with carrier energy `energy` (eV).
    pub fn from_energy(constants: PhysicsConstants, energy: f64, dk: f64) -> Result<Self> {
        if !(energy.is_finite() && energy > 0.0) {
            return Err(Error::Config(format!("energy must be positive, got {energy}")));
        }
        Self::new(constants, constants.wavenumber(energy), dk)
    }

    pub fn k_plus(&self) -> f64 {
        self.k + self.dk
    }

    pub fn k_minus(&self) -> f64 {
        self.k - self.dk
    }

    pub fn energy(&self) -> f64 {
        self.constants.energy(self.k)
    }

    pub fn energy_plus(&self) -> f64 {
        self.constants.energy(self.k_plus())
    }

    pub fn energy_minus(&self) -> f64 {
        self.constants.energy(self.k_minus())
    }

    pub fn v_k(&self) -> f64 {
        self.constants.velocity(self.k)
    }

    pub fn v_plus(&self) -> f64 {
        self.constants.velocity(self.k_plus())
    }

    pub fn v_minus(&self) -> f64 {
        self.constants.velocity(self.k_minus())
    }

    /// Ω = (E₊ − E₋)/ħ, evaluated as 2·v_k·Δk (the two are algebraically equal).
    pub fn big_omega(&self) -> f64 {
        2.0 * self.v_k() * self.dk
    }

    /// Arrival time x/v₊ of the fast front.
    pub fn t_plus(&self, x: f64) -> f64 {
        x / self.v_plus()
    }

    /// Arrival time x/v₋ of the slow front (infinite when k₋ = 0).
    pub fn t_minus(&self, x: f64) -> f64 {
        x / self.v_minus()
    }

    /// Initial wavefunction: `2 sin(kx) cos(Δk x)` for `x ≤ 0`, zero otherwise.
    pub fn initial_state(&self, x: f64) -> f64 {
        if x > 0.0 {
            0.0
        } else {
            2.0 * (self.k * x).sin() * (self.dk * x).cos()
        }
    }

    /// The two momentum components with non-zero weight.
    pub fn components(&self) -> impl Iterator<Item = f64> {
        let (kp, km) = (self.k_plus(), self.k_minus());
        std::iter::once(kp).chain((km > 0.0).then_some(km))
    }
}

/// Attractive delta well `V(x) = −λ δ(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaWell {
    /// Strength λ (eV·Å).
    pub lambda: f64,
    /// λ̃ = mλ/ħ² (Å⁻¹).
    pub lambda_tilde: f64,
    /// Bound-state energy −ħ²λ̃²/2m (eV).
    pub bound_energy: f64,
    pub constants: PhysicsConstants,
}

impl DeltaWell {
    pub fn new(constants: &PhysicsConstants, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Config(format!("delta strength must be positive, got {lambda}")));
        }
        // m/ħ² = 1 / (ħ · ħ/m)
        let lambda_tilde = lambda / (constants.hbar * constants.hbar_over_m);
        Ok(Self { lambda, lambda_tilde, bound_energy: -constants.energy(lambda_tilde), constants: *constants })
    }

    /// Bound-state pole k = iλ̃.
    pub fn bound_pole(&self) -> Complex64 {
        Complex64::new(0.0, self.lambda_tilde)
    }

    /// The well's single resonance entry in the L → 0 limit: u²(0) → λ̃.
    pub fn resonance_data(&self) -> ResonanceData {
        let u = Complex64::new(self.lambda_tilde.sqrt(), 0.0);
        ResonanceData::new(0.0, vec![Resonance { k: self.bound_pole(), u0: u, ul: u }])
            .expect("a purely imaginary pole with real amplitudes is self-paired")
    }
}

/// Stationary transmission amplitude as a function of complex wavenumber.
pub trait Transmission: Sync {
    fn amplitude(&self, q: Complex64) -> Result<Complex64>;
}

/// t ≡ 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeTransmission;

impl Transmission for FreeTransmission {
    fn amplitude(&self, _q: Complex64) -> Result<Complex64> {
        Ok(Complex64::new(1.0, 0.0))
    }
}

impl Transmission for DeltaWell {
    fn amplitude(&self, q: Complex64) -> Result<Complex64> {
        transmission_delta(self, q)
    }
}

impl<F> Transmission for F
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    fn amplitude(&self, q: Complex64) -> Result<Complex64> {
        self(q)
    }
}

/// t(q) = q/(q − iλ̃).
pub fn transmission_delta(well: &DeltaWell, q: Complex64) -> Result<Complex64> {
    let d = q - well.bound_pole();
    check_pole(d, well.bound_pole())?;
    Ok(q / d)
}

fn check_pole(distance: Complex64, pole: Complex64) -> Result<()> {
    let d = distance.norm();
    if d < POLE_THRESHOLD {
        Err(Error::Pole { pole, distance: d })
    } else {
        Ok(())
    }
}

/// Resonant-state expansion `t(q) = iq e^{−iqL} Σₙ uₙ(0)uₙ(L) / (kₙ(q − kₙ))`,
/// from t = 2iq e^{−iqL} G⁺(0, L; q).
impl Transmission for ResonanceData {
    fn amplitude(&self, q: Complex64) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for r in self.entries() {
            let d = q - r.k;
            check_pole(d, r.k)?;
            sum += r.u0 * r.ul / (r.k * d);
        }
        Ok(I * q * (-I * q * self.length).exp() * sum)
    }
}

/// One resonance: complex pole `k` and the resonant state evaluated at the
/// two edges of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub k: Complex64,
    pub u0: Complex64,
    pub ul: Complex64,
}

/// Resonance poles of a potential of range `length`, grouped in
/// time-reversal pairs `k₋ₙ = −kₙ*`, `u₋ₙ = uₙ*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceData {
    pub length: f64,
    entries: Vec<Resonance>,
    /// Index groups; each holds either a self-conjugate pole or a pair.
    groups: Vec<Vec<usize>>,
}

impl ResonanceData {
    pub fn new(length: f64, entries: Vec<Resonance>) -> Result<Self> {
        if !(length.is_finite() && length >= 0.0) {
            return Err(Error::Config(format!("range L must be non-negative, got {length}")));
        }
        let tol = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-10 * (1.0 + a.norm());
        let mut used = vec![false; entries.len()];
        let mut groups = Vec::new();
        for i in 0..entries.len() {
            if used[i] {
                continue;
            }
            let e = entries[i];
            if !(e.k.re.is_finite() && e.k.im.is_finite()) {
                return Err(Error::Pairing(format!("non-finite pole {}", e.k)));
            }
            let partner_k = -e.k.conj();
            if tol(e.k, partner_k) {
                // Self-conjugate (purely imaginary) pole: amplitudes must be real.
                if !(tol(e.u0, e.u0.conj()) && tol(e.ul, e.ul.conj())) {
                    return Err(Error::Pairing(format!("imaginary pole {} requires real amplitudes", e.k)));
                }
                used[i] = true;
                groups.push(vec![i]);
                continue;
            }
            let j = (i + 1..entries.len())
                .find(|&j| !used[j] && tol(entries[j].k, partner_k))
                .ok_or_else(|| Error::Pairing(format!("pole {} has no partner {}", e.k, partner_k)))?;
            let p = entries[j];
            if !(tol(p.u0, e.u0.conj()) && tol(p.ul, e.ul.conj())) {
                return Err(Error::Pairing(format!("amplitudes of {} and {} are not conjugate", e.k, p.k)));
            }
            used[i] = true;
            used[j] = true;
            groups.push(vec![i, j]);
        }
        Ok(Self { length, entries, groups })
    }

    /// No resonances (free propagation).
    pub fn empty() -> Self {
        Self { length: 0.0, entries: Vec::new(), groups: Vec::new() }
    }

    pub fn entries(&self) -> &[Resonance] {
        &self.entries
    }

    /// Time-reversal groups in input order.
    pub fn groups(&self) -> impl Iterator<Item = impl Iterator<Item = &Resonance>> {
        self.groups.iter().map(move |g| g.iter().map(move |&i| &self.entries[i]))
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// tₙ = e^{−ikₙL} uₙ(0) uₙ(L).
    pub fn t_n(&self, r: &Resonance) -> Complex64 {
        (-I * r.k * self.length).exp() * r.u0 * r.ul
    }

    /// Reads columns `re_kn, im_kn, re_un0, im_un0, re_unL, im_unL`; a header
    /// row and `#` comment lines are skipped.
    pub fn from_csv_str(length: f64, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("re_kn") {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
            if cols.len() != 6 {
                return Err(Error::Config(format!("line {}: expected 6 columns, got {}", lineno + 1, cols.len())));
            }
            entries.push(Resonance {
                k: Complex64::new(cols[0], cols[1]),
                u0: Complex64::new(cols[2], cols[3]),
                ul: Complex64::new(cols[4], cols[5]),
            });
        }
        Self::new(length, entries)
    }

    pub fn from_csv_file(length: f64, path: &Path) -> Result<Self> {
        Self::from_csv_str(length, &std::fs::read_to_string(path)?)
    }
}

/// A simple pole κ with residue α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QPole {
    pub position: Complex64,
    pub residue: Complex64,
}

/// Pole/residue form of a Q-transform:
/// `Φ̃(Q) = constant_term + Σₘ αₘ/(Q − κₘ)`.
///
/// This is the Mittag-Leffler expansion with its `Φ̃(0) + Σ αₘ/κₘ` part folded
/// into `constant_term`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleExpansion {
    pub poles: Vec<QPole>,
    pub constant_term: Complex64,
}

impl PoleExpansion {
    pub fn new(poles: Vec<QPole>, constant_term: Complex64) -> Result<Self> {
        for (i, a) in poles.iter().enumerate() {
            for b in &poles[i + 1..] {
                if (a.position - b.position).norm() < POLE_THRESHOLD {
                    return Err(Error::Config(format!(
                        "duplicate Q-pole {} (only simple poles are supported)",
                        a.position
                    )));
                }
            }
        }
        Ok(Self { poles, constant_term })
    }

    /// Cut-off plane wave e^{ikx}: Φ̃ = 1/(k − Q), one pole at k with residue −1.
    pub fn plane_wave(k: f64) -> Self {
        Self {
            poles: vec![QPole { position: k.into(), residue: (-1.0).into() }],
            constant_term: Complex64::new(0.0, 0.0),
        }
    }

    /// Single component sin(k x): poles ±k with residues ±i/2.
    pub fn sine(k: f64) -> Self {
        let mut poles = Vec::new();
        if k != 0.0 {
            poles.push(QPole { position: k.into(), residue: 0.5 * I });
            poles.push(QPole { position: (-k).into(), residue: -0.5 * I });
        }
        Self { poles, constant_term: Complex64::new(0.0, 0.0) }
    }

    /// The modulated state 2 sin(kx) cos(Δk x): poles ±k₊, ±k₋ with residues ±i/2.
    /// A vanishing k₋ (Δk = k) carries zero weight and contributes no pole.
    pub fn modulated(packet: &ModulatedPacket) -> Self {
        let mut poles = Self::sine(packet.k_plus()).poles;
        poles.extend(Self::sine(packet.k_minus()).poles);
        Self { poles, constant_term: Complex64::new(0.0, 0.0) }
    }

    pub fn evaluate(&self, q: Complex64) -> Result<Complex64> {
        let mut sum = self.constant_term;
        for p in &self.poles {
            let d = q - p.position;
            check_pole(d, p.position)?;
            sum += p.residue / d;
        }
        Ok(sum)
    }
}

/// Q-transform of the cut-off plane wave, 1/(k − Q).
pub fn q_transform_plane(k: f64, q: Complex64) -> Result<Complex64> {
    let d = Complex64::from(k) - q;
    check_pole(d, k.into())?;
    Ok(1.0 / d)
}

/// Q-transform of a single component sin(kx): i k / ((Q + k)(Q − k)).
pub fn q_transform_sine(k: f64, q: Complex64) -> Result<Complex64> {
    if k == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    check_pole(q - k, k.into())?;
    check_pole(q + k, (-k).into())?;
    Ok(I * k / ((q + k) * (q - k)))
}

/// Q-transform of the modulated state:
/// `i[k₋/((Q+k₋)(Q−k₋)) + k₊/((Q+k₊)(Q−k₊))]`.
pub fn q_transform_modulated(packet: &ModulatedPacket, q: Complex64) -> Result<Complex64> {
    Ok(q_transform_sine(packet.k_minus(), q)? + q_transform_sine(packet.k_plus(), q)?)
}

/// Angular frequencies of the virtual two-level system relative to a reference
/// (bound-state) energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub omega_bar: f64,
    pub big_omega: f64,
}

/// ω± = (E± − E_b)/ħ, Ω̄ = (ω₊ + ω₋)/2, Ω = ω₊ − ω₋.
pub fn frequencies(packet: &ModulatedPacket, bound_energy: f64) -> Frequencies {
    let hbar = packet.constants.hbar;
    let omega_plus = (packet.energy_plus() - bound_energy) / hbar;
    let omega_minus = (packet.energy_minus() - bound_energy) / hbar;
    Frequencies {
        omega_plus,
        omega_minus,
        omega_bar: 0.5 * (omega_plus + omega_minus),
        big_omega: omega_plus - omega_minus,
    }
}

/// JSON configuration of the physical model. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(rename = "lambda_eV_A", default = "default_lambda")]
    pub lambda: f64,
    #[serde(rename = "energy_eV", default = "default_energy")]
    pub energy: f64,
    #[serde(rename = "dk_invA", default)]
    pub dk: f64,
    #[serde(default = "one")]
    pub mass_ratio: f64,
    #[serde(rename = "hbar_eV_ps", default = "default_hbar")]
    pub hbar: f64,
}

fn default_lambda() -> f64 {
    4.27
}
fn default_energy() -> f64 {
    0.08
}
fn one() -> f64 {
    1.0
}
fn default_hbar() -> f64 {
    HBAR_EV_PS
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { lambda: default_lambda(), energy: default_energy(), dk: 0.0, mass_ratio: 1.0, hbar: HBAR_EV_PS }
    }
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn constants(&self) -> Result<PhysicsConstants> {
        PhysicsConstants::with_mass_ratio(self.hbar, self.mass_ratio)
    }

    pub fn packet(&self) -> Result<ModulatedPacket> {
        ModulatedPacket::from_energy(self.constants()?, self.energy, self.dk)
    }

    pub fn well(&self) -> Result<DeltaWell> {
        DeltaWell::new(&self.constants()?, self.lambda)
    }
}

/// Potential in the transmission problem.
#[derive(Clone)]
pub enum PotentialModel {
    Free,
    Delta(DeltaWell),
    /// Finite-range potential described by its resonance poles and
    /// transmission amplitude.
    Generic {
        resonances: ResonanceData,
        transmission: Arc<dyn Transmission + Send>,
    },
}

impl std::fmt::Debug for PotentialModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Free => write!(f, "Free"),
            Self::Delta(w) => f.debug_tuple("Delta").field(w).finish(),
            Self::Generic { resonances, .. } => f
                .debug_struct("Generic")
                .field("length", &resonances.length)
                .field("poles", &resonances.entries().len())
                .finish(),
        }
    }
}

impl PotentialModel {
    pub fn transmission(&self, q: Complex64) -> Result<Complex64> {
        match self {
            Self::Free => Ok(Complex64::new(1.0, 0.0)),
            Self::Delta(w) => transmission_delta(w, q),
            Self::Generic { transmission, .. } => transmission.amplitude(q),
        }
    }

    /// Custom potential whose transmission amplitude is the resonant-state
    /// expansion of `resonances`.
    pub fn custom(resonances: ResonanceData) -> Self {
        let transmission = Arc::new(resonances.clone());
        Self::Generic { resonances, transmission }
    }

    /// Bound-state energy, when the potential has one.
    pub fn bound_energy(&self) -> Option<f64> {
        match self {
            Self::Delta(w) => Some(w.bound_energy),
            _ => None,
        }
    }

    /// Left edge of the transmission region.
    pub fn range(&self) -> f64 {
        match self {
            Self::Generic { resonances, .. } => resonances.length,
            _ => 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Free => "free",
            Self::Delta(_) => "delta",
            Self::Generic { .. } => "custom",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn default_constants() {
        let k = PhysicsConstants::electron();
        assert!((k.hbar2_over_2m - 3.80998).abs() < 1e-5);
        assert_eq!(k.hbar2_over_2m, k.hbar * k.hbar_over_m / 2.0);
    }

    #[test]
    fn plane_wave_q_transform() {
        assert!((q_transform_plane(0.1, c(0.0, 0.0)).unwrap() - c(10.0, 0.0)).norm() < 1e-14);
        let pe = PoleExpansion::plane_wave(0.1);
        assert_eq!(pe.poles[0].residue, c(-1.0, 0.0));
        // Residue by contour-free limit: (Q − k) Φ̃(Q) as Q → k.
        let eps = 1e-7;
        let q = c(0.1 + eps, 0.0);
        let res = (q - 0.1) * q_transform_plane(0.1, q).unwrap();
        assert!((res - c(-1.0, 0.0)).norm() < 1e-9);
        assert!(matches!(q_transform_plane(0.1, c(0.1, 1e-30)), Err(Error::Pole { .. })));
    }

    #[test]
    fn modulated_q_transform_residues_and_reduction() {
        let k = PhysicsConstants::electron();
        let p = ModulatedPacket::new(k, 0.15, 0.01).unwrap();
        let eps = 1e-9;
        let q = c(p.k_plus() + eps, 0.0);
        let res = (q - p.k_plus()) * q_transform_modulated(&p, q).unwrap();
        assert!((res - c(0.0, 0.5)).norm() < 1e-6);
        let q = c(-p.k_minus() + eps, 0.0);
        let res = (q + p.k_minus()) * q_transform_modulated(&p, q).unwrap();
        assert!((res - c(0.0, -0.5)).norm() < 1e-6);

        let p0 = ModulatedPacket::new(k, 0.15, 0.0).unwrap();
        let q = c(0.3, -0.2);
        let expect = 2.0 * I * 0.15 / (q * q - 0.15 * 0.15);
        assert!((q_transform_modulated(&p0, q).unwrap() - expect).norm() < 1e-13);
        assert!(q_transform_modulated(&p, c(p.k_minus(), 0.0)).is_err());
    }

    #[test]
    fn delta_transmission() {
        let k = PhysicsConstants::electron();
        let w = DeltaWell::new(&k, 4.27).unwrap();
        let lt = w.lambda_tilde;
        let t = transmission_delta(&w, c(lt, 0.0)).unwrap();
        assert!((t.norm_sqr() - 0.5).abs() < 1e-14);
        let t = transmission_delta(&w, c(1e9, 0.0)).unwrap();
        assert!((t - c(1.0, 0.0)).norm() < 1e-8);
        assert!(transmission_delta(&w, w.bound_pole()).is_err());
        assert!(w.bound_energy < 0.0);
        // E_b = −ħ²λ̃²/2m = −mλ²/2ħ²
        let eb = -w.lambda * w.lambda / (2.0 * k.hbar * k.hbar_over_m);
        assert!((w.bound_energy - eb).abs() < 1e-12);
    }

    #[test]
    fn delta_transmission_fixture() {
        // λ = 4.27 eV·Å, q = 0.1449 Å⁻¹: |t|² = q²/(q² + λ̃²) with
        // λ̃ = 4.27 / (6.582119569e-4 · 1.15767636e4) computed by hand.
        let k = PhysicsConstants::electron();
        let w = DeltaWell::new(&k, 4.27).unwrap();
        let lt = 4.27 / (6.582119569e-4 * 1.15767636e4);
        assert!((w.lambda_tilde - lt).abs() < 1e-15);
        let expect = 0.1449f64.powi(2) / (0.1449f64.powi(2) + lt * lt);
        let t = transmission_delta(&w, c(0.1449, 0.0)).unwrap();
        assert!((t.norm_sqr() - expect).abs() < 1e-14);
        assert!((t.norm_sqr() - 0.062_68).abs() < 1e-4);
    }

    #[test]
    fn frequencies_relations() {
        let k = PhysicsConstants::electron();
        let p = ModulatedPacket::from_energy(k, 0.08, 0.0).unwrap();
        assert_eq!(frequencies(&p, -1.0).big_omega, 0.0);
        let p = ModulatedPacket::from_energy(k, 0.08, 0.001).unwrap();
        let f = frequencies(&p, 0.0);
        assert!((f.omega_plus - p.energy_plus() / k.hbar).abs() < 1e-12);
        assert!((f.big_omega - p.big_omega()).abs() < 1e-9 * f.big_omega);
    }

    #[test]
    fn packet_rejects_out_of_range_dk() {
        let k = PhysicsConstants::electron();
        assert!(ModulatedPacket::new(k, 0.1, 0.2).is_err());
        assert!(ModulatedPacket::new(k, 0.1, -0.01).is_err());
        let p = ModulatedPacket::new(k, 0.1, 0.1).unwrap();
        assert_eq!(p.components().count(), 1);
        assert_eq!(PoleExpansion::modulated(&p).poles.len(), 2);
    }

    #[test]
    fn resonance_pairing() {
        let r = |k: Complex64, u: Complex64| Resonance { k, u0: u, ul: u };
        let ok = ResonanceData::new(1.0, vec![r(c(1.0, -0.1), c(0.3, 0.2)), r(c(-1.0, -0.1), c(0.3, -0.2))]);
        assert_eq!(ok.unwrap().group_count(), 1);
        let unpaired = ResonanceData::new(1.0, vec![r(c(1.0, -0.1), c(0.3, 0.2))]);
        assert!(matches!(unpaired, Err(Error::Pairing(_))));
        let wrong_u = ResonanceData::new(1.0, vec![r(c(1.0, -0.1), c(0.3, 0.2)), r(c(-1.0, -0.1), c(0.3, 0.2))]);
        assert!(matches!(wrong_u, Err(Error::Pairing(_))));
    }

    #[test]
    fn resonance_csv() {
        let text = "re_kn,im_kn,re_un0,im_un0,re_unL,im_unL\n\
                    1.0,-0.1,0.3,0.2,0.1,0.0\n\
                    -1.0,-0.1,0.3,-0.2,0.1,0.0\n";
        let d = ResonanceData::from_csv_str(2.0, text).unwrap();
        assert_eq!(d.entries().len(), 2);
        assert!(ResonanceData::from_csv_str(2.0, "1,2,3\n").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let cfg = ModelConfig::from_json(r#"{"lambda_eV_A": 4.27, "energy_eV": 0.08, "dk_invA": 0.001}"#).unwrap();
        assert_eq!(cfg.dk, 0.001);
        assert!(ModelConfig::from_json(r#"{"lambda": 1}"#).is_err());
        let heavy = ModelConfig { mass_ratio: 2.0, ..Default::default() }.constants().unwrap();
        assert!((heavy.hbar_over_m - HBAR_OVER_ME_A2_PS / 2.0).abs() < 1e-9);
    }

    #[test]
    fn resonance_expansion_reproduces_delta_transmission() {
        let w = DeltaWell::new(&PhysicsConstants::electron(), 4.27).unwrap();
        let res = w.resonance_data();
        for q in [c(0.1, 0.0), c(0.7, 0.0), c(0.2, -0.3)] {
            let a = res.amplitude(q).unwrap();
            assert!((a - transmission_delta(&w, q).unwrap()).norm() < 1e-14, "{a}");
        }
        let m = PotentialModel::custom(res);
        assert_eq!(m.name(), "custom");
        assert!(m.transmission(w.bound_pole()).is_err());
    }
}
