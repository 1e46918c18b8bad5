//! Transient features: wavefront peaks, delay-time, phase-time and spectral
//! frequency estimates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{transmission_delta, DeltaWell, ModulatedPacket};
use crate::solver::{psi_delta_components, psi_free_components, Components, EvaluationPoint};
use crate::trace::{DensityTrace, ParamRecord};

/// How a peak time was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    Grid,
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakEstimate {
    pub t_peak: f64,
    pub value: f64,
    pub refinement: Refinement,
    pub window: (f64, f64),
}

/// Width in t of one diffraction lobe at the fast front, √(2ħt₊/m)/v₊.
pub fn front_lobe_width(packet: &ModulatedPacket, x: f64) -> f64 {
    let tp = packet.t_plus(x);
    (2.0 * packet.constants.hbar_over_m * tp).sqrt() / packet.v_plus()
}

/// Search window for the main front: from 0.5·t₊ to min(t₋, 1.5·t₊), extended
/// to t₊ + 3 lobe widths when t₋ is so close to t₊ that the first lobe would
/// be cut off.
pub fn front_window(packet: &ModulatedPacket, x: f64) -> (f64, f64) {
    let tp = packet.t_plus(x);
    let hi = packet.t_minus(x).min(1.5 * tp).max(tp + 3.0 * front_lobe_width(packet, x));
    (0.5 * tp, hi)
}

/// Vertex of the parabola through (−1, a), (0, b), (1, c), as an offset in [−1, 1].
fn parabola_offset(a: f64, b: f64, c: f64) -> f64 {
    let d = a - 2.0 * b + c;
    if d >= 0.0 {
        return 0.0;
    }
    (0.5 * (a - c) / d).clamp(-1.0, 1.0)
}

/// Parabolic refinement on log-density around grid index `i`.
fn refine(grid: &[f64], rho: &[f64], i: usize) -> (f64, Refinement) {
    if i == 0 || i + 1 >= grid.len() || rho[i - 1] <= 0.0 || rho[i + 1] <= 0.0 || rho[i] <= 0.0 {
        return (grid[i], Refinement::Grid);
    }
    let off = parabola_offset(rho[i - 1].ln(), rho[i].ln(), rho[i + 1].ln());
    let h = if off < 0.0 { grid[i] - grid[i - 1] } else { grid[i + 1] - grid[i] };
    (grid[i] + off * h, Refinement::Parabolic)
}

/// First local maximum of `rho` inside `window` reaching half the window
/// maximum, refined parabolically.
pub fn first_major_peak(grid: &[f64], rho: &[f64], window: (f64, f64)) -> Result<PeakEstimate> {
    let not_found = Error::FrontNotFound { t_lo: window.0, t_hi: window.1 };
    let idx: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] >= window.0 && grid[i] <= window.1).collect();
    if idx.len() < 3 {
        return Err(not_found);
    }
    let wmax = idx.iter().map(|&i| rho[i]).fold(f64::NEG_INFINITY, f64::max);
    for &i in &idx[1..idx.len() - 1] {
        if rho[i] >= rho[i - 1] && rho[i] > rho[i + 1] && rho[i] >= 0.5 * wmax {
            let (t_peak, refinement) = refine(grid, rho, i);
            return Ok(PeakEstimate { t_peak, value: rho[i], refinement, window });
        }
    }
    Err(not_found)
}

/// Main wavefront maximum of a density trace sampled in t at position `x`.
pub fn find_main_front_peak(trace: &DensityTrace, packet: &ModulatedPacket, x: f64) -> Result<PeakEstimate> {
    let window = front_window(packet, x);
    let lobe = front_lobe_width(packet, x);
    let inside: Vec<f64> = trace.grid.iter().copied().filter(|&t| t >= window.0 && t <= window.1).collect();
    if inside.len() >= 2 {
        let h = (inside[inside.len() - 1] - inside[0]) / (inside.len() - 1) as f64;
        if lobe / h < 20.0 {
            return Err(Error::Precondition(format!(
                "front lobe ({lobe:.3e} ps) holds fewer than 20 samples at step {h:.3e} ps"
            )));
        }
    }
    first_major_peak(&trace.grid, &trace.rho, window)
}

/// Sampling controls for [`delay_time_measured`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayGridSpec {
    /// Samples per front lobe width on the coarse pass.
    pub samples_per_lobe: f64,
    /// Number of zoomed re-sampling passes around the two peaks.
    pub zoom_levels: usize,
    /// Samples per zoomed pass.
    pub zoom_samples: usize,
    /// Density whose front is timed.
    pub source: FrontSource,
}

/// Which density the front peak is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontSource {
    /// ρ = |ψ₊ + ψ₋|².
    Total,
    /// ρ₊ = |ψ₊|², the fast partial wave alone.
    Plus,
}

impl Default for DelayGridSpec {
    fn default() -> Self {
        Self { samples_per_lobe: 40.0, zoom_levels: 2, zoom_samples: 2001, source: FrontSource::Plus }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayReport {
    pub x_A: f64,
    pub dk_invA: f64,
    pub t_delta: f64,
    pub t_f: f64,
    pub delta_t_measured: f64,
    pub delta_t_analytic: f64,
    pub t_phi: f64,
    /// Sample spacing of the final matched grid (ps).
    pub grid_step: f64,
    pub params: ParamRecord,
}

fn sample_density<F>(grid: &[f64], source: FrontSource, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Components> + Sync,
{
    grid.par_iter()
        .map(|&t| {
            f(t).map(|c| match source {
                FrontSource::Total => c.total().norm_sqr(),
                FrontSource::Plus => c.plus.norm_sqr(),
            })
        })
        .collect()
}

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Δt = t_δ − t_f from the main-front peaks of the delta-well and free
/// densities at `x`, both sampled on identical grids. A coarse pass over the
/// front window locates the peaks; zoomed passes over a common interval
/// bracketing both then sharpen them.
pub fn delay_time_measured(
    well: &DeltaWell,
    packet: &ModulatedPacket,
    x: f64,
    spec: DelayGridSpec,
) -> Result<DelayReport> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("delay-time needs x > 0, got {x}")));
    }
    let window = front_window(packet, x);
    let lobe = front_lobe_width(packet, x);
    let n0 = (((window.1 - window.0) / lobe) * spec.samples_per_lobe).ceil().max(101.0) as usize;
    let grid = uniform(window.0, window.1, n0);
    let rho_d = sample_density(&grid, spec.source, |t| psi_delta_components(EvaluationPoint::new(x, t), well, packet))?;
    let rho_f = sample_density(&grid, spec.source, |t| psi_free_components(EvaluationPoint::new(x, t), packet))?;
    let mut t_d = first_major_peak(&grid, &rho_d, window)?.t_peak;
    let mut t_f = first_major_peak(&grid, &rho_f, window)?.t_peak;
    let mut h = grid[1] - grid[0];

    for _ in 0..spec.zoom_levels {
        let lo = t_d.min(t_f) - 3.0 * h;
        let hi = t_d.max(t_f) + 3.0 * h;
        let g = uniform(lo, hi, spec.zoom_samples.max(5));
        let rd = sample_density(&g, spec.source, |t| psi_delta_components(EvaluationPoint::new(x, t), well, packet))?;
        let rf = sample_density(&g, spec.source, |t| psi_free_components(EvaluationPoint::new(x, t), packet))?;
        t_d = refine_global(&g, &rd, (lo, hi))?;
        t_f = refine_global(&g, &rf, (lo, hi))?;
        h = g[1] - g[0];
    }

    Ok(DelayReport {
        x_A: x,
        dk_invA: packet.dk,
        t_delta: t_d,
        t_f,
        delta_t_measured: t_d - t_f,
        delta_t_analytic: delay_time_analytic(well, packet),
        t_phi: phase_time_closed_form(well, packet.k),
        grid_step: h,
        params: ParamRecord::new(&crate::model::PotentialModel::Delta(*well), packet),
    })
}

fn refine_global(grid: &[f64], rho: &[f64], window: (f64, f64)) -> Result<f64> {
    let i = (0..rho.len())
        .max_by(|&a, &b| rho[a].total_cmp(&rho[b]))
        .ok_or(Error::FrontNotFound { t_lo: window.0, t_hi: window.1 })?;
    if i == 0 || i + 1 == rho.len() {
        return Err(Error::FrontNotFound { t_lo: window.0, t_hi: window.1 });
    }
    Ok(refine(grid, rho, i).0)
}

/// Δt ≈ (−λ/2) / (v₊ (E₊ − E_b)).
pub fn delay_time_analytic(well: &DeltaWell, packet: &ModulatedPacket) -> f64 {
    -0.5 * well.lambda / (packet.v_plus() * (packet.energy_plus() - well.bound_energy))
}

/// t_φ = (−λ/2) / (v_k (E − E_b)).
pub fn phase_time_closed_form(well: &DeltaWell, k: f64) -> f64 {
    let c = well.constants;
    -0.5 * well.lambda / (c.velocity(k) * (c.energy(k) - well.bound_energy))
}

/// Both evaluations of the phase-time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseTime {
    pub numerical: f64,
    pub closed_form: f64,
}

/// t_φ = ħ dφ_t/dE by numerical differentiation of arg t(k(E)) (five-point
/// stencil with one Richardson step), alongside the closed form.
pub fn phase_time(well: &DeltaWell, k: f64) -> Result<PhaseTime> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("phase-time needs k > 0, got {k}")));
    }
    let c = well.constants;
    let e0 = c.energy(k);
    let amp = |e: f64| transmission_delta(well, c.wavenumber(e).into());
    let t0 = amp(e0)?;
    // phase differences via ratios, free of branch cuts
    let dphi = |d: f64| -> Result<f64> { Ok((amp(e0 + d)? / t0).arg()) };
    let stencil = |h: f64| -> Result<f64> {
        Ok((8.0 * (dphi(h)? - dphi(-h)?) - (dphi(2.0 * h)? - dphi(-2.0 * h)?)) / (12.0 * h))
    };
    let h = 2e-3 * e0;
    let d1 = stencil(h)?;
    let d2 = stencil(h / 2.0)?;
    let deriv = d2 + (d2 - d1) / 15.0;
    Ok(PhaseTime { numerical: c.hbar * deriv, closed_form: phase_time_closed_form(well, k) })
}

/// Spectral estimation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyMode {
    /// Dominant oscillation of the signal itself.
    Carrier,
    /// Oscillation of the rectified, low-passed signal (beat envelope).
    Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyEstimate {
    /// Angular frequency (rad/ps); zero when no significant peak exists.
    pub omega: f64,
    /// Bin spacing 2π/span of the unpadded spectrum (rad/ps).
    pub resolution: f64,
    /// Amplitude of the oscillation at `omega`.
    pub amplitude: f64,
    pub significant: bool,
}

fn check_uniform(grid: &[f64]) -> Result<f64> {
    if grid.len() < 8 {
        return Err(Error::InsufficientSpan(format!("{} samples", grid.len())));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-6 * h) {
        return Err(Error::Config("spectral estimates need a uniform grid".into()));
    }
    Ok(h)
}

fn hann(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos()).collect()
}

/// Hann-windowed, mean-detrended, 8× zero-padded magnitude spectrum.
/// Returns (magnitudes over non-negative bins, bin spacing in rad/ps).
fn spectrum(signal: &[f64], h: f64) -> (Vec<f64>, f64) {
    let n = signal.len();
    let w = hann(n);
    let wsum: f64 = w.iter().sum();
    let mean = signal.iter().zip(&w).map(|(s, w)| s * w).sum::<f64>() / wsum;
    let m = (8 * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..n {
        buf[i] = Complex64::new((signal[i] - mean) * w[i], 0.0);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let mags = buf[..m / 2].iter().map(|c| 2.0 * c.norm() / wsum).collect();
    (mags, 2.0 * PI / (m as f64 * h))
}

/// Local maxima of `mags` (excluding DC) as (bin, refined position, magnitude), strongest first.
fn spectral_peaks(mags: &[f64], max_bin: usize) -> Vec<(f64, f64)> {
    let mut peaks = Vec::new();
    for i in 1..max_bin.min(mags.len() - 1) {
        if mags[i] > mags[i - 1] && mags[i] >= mags[i + 1] && mags[i] > 0.0 {
            let pos = if mags[i - 1] > 0.0 && mags[i + 1] > 0.0 {
                i as f64 + parabola_offset(mags[i - 1].ln(), mags[i].ln(), mags[i + 1].ln())
            } else {
                i as f64
            };
            peaks.push((pos, mags[i]));
        }
    }
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks
}

/// Projected amplitude of the oscillation at `omega`: 2|Σ wᵢ(sᵢ − s̄)e^{−iωtᵢ}| / Σ wᵢ.
pub fn oscillation_amplitude(grid: &[f64], signal: &[f64], omega: f64) -> Result<f64> {
    check_uniform(grid)?;
    let w = hann(grid.len());
    let wsum: f64 = w.iter().sum();
    let mean = signal.iter().zip(&w).map(|(s, w)| s * w).sum::<f64>() / wsum;
    let acc: Complex64 = (0..grid.len())
        .map(|i| (signal[i] - mean) * w[i] * Complex64::from_polar(1.0, -omega * (grid[i] - grid[0])))
        .sum();
    Ok(2.0 * acc.norm() / wsum)
}

fn estimate_carrier(grid: &[f64], signal: &[f64], h: f64) -> FrequencyEstimate {
    let span = grid[grid.len() - 1] - grid[0];
    let resolution = 2.0 * PI / span;
    let (mags, dw) = spectrum(signal, h);
    let peaks = spectral_peaks(&mags, mags.len());
    let Some(&(pos, amp)) = peaks.first() else {
        return FrequencyEstimate { omega: 0.0, resolution, amplitude: 0.0, significant: false };
    };
    let mut omega = pos * dw;
    // a split carrier cos(Ω̄t)cos(Ωt/2) shows as a doublet around Ω̄
    if let Some(&(p2, _)) = peaks.iter().skip(1).find(|&&(p, a)| {
        a >= 0.3 * amp && ((p * dw) - omega).abs() <= 0.2 * omega && ((p - pos).abs() * dw) > resolution
    }) {
        omega = 0.5 * (omega + p2 * dw);
    }
    FrequencyEstimate { omega, resolution, amplitude: amp, significant: true }
}

/// Dominant angular frequency of a uniformly sampled trace.
///
/// Carrier mode takes the strongest spectral peak; when a comparable second
/// peak sits within 20% of it the midpoint of the doublet is returned.
/// Envelope mode rectifies the detrended signal, smooths it with a boxcar
/// one carrier period long and takes the strongest peak below half the
/// carrier. The trace must span at least five periods of the result.
pub fn estimate_frequency(trace: &DensityTrace, mode: FrequencyMode) -> Result<FrequencyEstimate> {
    estimate_frequency_raw(&trace.grid, &trace.rho, mode)
}

pub fn estimate_frequency_raw(grid: &[f64], signal: &[f64], mode: FrequencyMode) -> Result<FrequencyEstimate> {
    let h = check_uniform(grid)?;
    let span = grid[grid.len() - 1] - grid[0];
    let resolution = 2.0 * PI / span;
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    let spread = signal.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max);
    if spread <= 1e-12 * mean.abs().max(f64::MIN_POSITIVE) {
        return Ok(FrequencyEstimate { omega: 0.0, resolution, amplitude: 0.0, significant: false });
    }
    let carrier = estimate_carrier(grid, signal, h);
    let est = match mode {
        FrequencyMode::Carrier => carrier,
        FrequencyMode::Envelope => {
            let period = 2.0 * PI / carrier.omega;
            let width = ((period / h).round() as usize).max(1);
            let rect: Vec<f64> = signal.iter().map(|s| (s - mean).abs()).collect();
            let n = rect.len();
            if width >= n / 2 {
                return Err(Error::InsufficientSpan("carrier period comparable to the trace".into()));
            }
            let mut smooth = Vec::with_capacity(n - width + 1);
            let mut acc: f64 = rect[..width].iter().sum();
            smooth.push(acc / width as f64);
            for i in width..n {
                acc += rect[i] - rect[i - width];
                smooth.push(acc / width as f64);
            }
            let g = &grid[..smooth.len()];
            let (mags, dw) = spectrum(&smooth, h);
            let limit = ((0.5 * carrier.omega / dw) as usize).max(2);
            match spectral_peaks(&mags, limit).first() {
                Some(&(pos, amp)) => FrequencyEstimate {
                    omega: pos * dw,
                    resolution: 2.0 * PI / (g[g.len() - 1] - g[0]),
                    amplitude: amp,
                    significant: true,
                },
                None => FrequencyEstimate { omega: 0.0, resolution, amplitude: 0.0, significant: false },
            }
        }
    };
    if est.significant && est.omega * span / (2.0 * PI) < 5.0 {
        return Err(Error::InsufficientSpan(format!(
            "trace covers {:.2} periods of ω = {:.4e}, need 5",
            est.omega * span / (2.0 * PI),
            est.omega
        )));
    }
    Ok(est)
}

/// Start 5·2π/Ω̄ of the post-transient window for beats at the origin.
pub fn post_transient_start(well: &DeltaWell, packet: &ModulatedPacket) -> f64 {
    5.0 * 2.0 * PI / crate::model::frequencies(packet, well.bound_energy).omega_bar
}

/// Earliest t > x/v₋ at which |y_{k₋}(x, t)| reaches `y_min`, i.e. the slow
/// front has passed far enough for the two-level form to hold.
pub fn late_window_start(packet: &ModulatedPacket, x: f64, y_min: f64) -> f64 {
    let hm = packet.constants.hbar_over_m;
    let km = packet.k_minus().max(packet.k_plus() * 1e-12);
    let y = |t: f64| (hm * km * t - x) / (2.0 * hm * t).sqrt();
    let mut lo = x / (hm * km);
    let mut hi = lo.max(1e-12) * 2.0;
    while y(hi) < y_min {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if y(mid) < y_min {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// First time at or after `from` where |ρ_int| exceeds `fraction`·ρ₊; the
/// operational t_d bounding the interference-free stretch of the front.
pub fn interference_onset(trace: &DensityTrace, from: f64, fraction: f64) -> Option<f64> {
    let c = trace.components.as_ref()?;
    (0..trace.grid.len())
        .find(|&i| trace.grid[i] >= from && c.rho_int[i].abs() > fraction * c.rho_plus[i])
        .map(|i| trace.grid[i])
}
