//! Crank–Nicolson integration of the time-dependent Schrödinger equation on a
//! uniform grid, used to check the analytic solutions independently.
//!
//! The cut-off initial state is not normalizable, so the grid is a large
//! finite box with a smooth taper at its left end; only windows causally
//! insulated from the box edges are compared. Optional quadratic complex
//! absorbing potentials damp the fast waves radiated by the cut-off kink
//! before they return from the walls.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModulatedPacket, PhysicsConstants};

/// Potential seen by the integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OraclePotential {
    Free,
    /// −λδ(x), realized as −λ/dx on the grid node at x = 0.
    Delta {
        lambda: f64,
    },
}

/// Quadratic absorbers `−iW s²` ramping from 0 to W over `left` Å at the left
/// edge and `right` Å at the right edge (s is the fractional depth).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Absorber {
    pub left: f64,
    pub right: f64,
    /// Peak strength W (eV).
    pub strength: f64,
}

impl Absorber {
    fn potential(&self, x: f64, x_min: f64, x_max: f64) -> f64 {
        let depth = |d: f64, w: f64| if w > 0.0 && d < w { (1.0 - d / w).powi(2) } else { 0.0 };
        self.strength * (depth(x - x_min, self.left) + depth(x_max - x, self.right))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub dt: f64,
    /// Fraction of the box, from the left edge, over which the initial state is
    /// ramped up with a sin² profile.
    pub taper_fraction: f64,
    pub absorber: Option<Absorber>,
}

impl GridSpec {
    /// Default box for sub-ps runs of the standard parameters.
    pub fn standard() -> Self {
        Self { x_min: -40000.0, x_max: 2000.0, dx: 0.05, dt: 1e-6, taper_fraction: 0.05, absorber: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dx: f64,
    pub psi: Vec<Complex64>,
    pub t: f64,
    /// Width of the left taper (Å).
    pub taper_width: f64,
}

impl GridState {
    pub fn x(&self, j: usize) -> f64 {
        self.x_min + self.dx * j as f64
    }

    /// Grid index of position `x` when it falls on a node.
    pub fn node(&self, x: f64) -> Option<usize> {
        let f = (x - self.x_min) / self.dx;
        let j = f.round();
        ((f - j).abs() < 1e-6 && j >= 0.0 && (j as usize) < self.n_points).then_some(j as usize)
    }

    /// Σ|ψ|² dx.
    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx
    }

    /// Linear interpolation of ψ at `x`.
    pub fn value_at(&self, x: f64) -> Result<Complex64> {
        let f = (x - self.x_min) / self.dx;
        if !(f >= 0.0 && f <= (self.n_points - 1) as f64) {
            return Err(Error::Domain(format!("x = {x} outside the grid")));
        }
        let j = (f.floor() as usize).min(self.n_points - 2);
        let w = f - j as f64;
        Ok(self.psi[j] * (1.0 - w) + self.psi[j + 1] * w)
    }

    /// Writes `x, |ψ|², Re ψ, Im ψ` rows.
    pub fn write_snapshot_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# t_ps = {:.17e}", self.t)?;
        writeln!(out, "x_A,rho,re_psi,im_psi")?;
        for (j, v) in self.psi.iter().enumerate() {
            writeln!(out, "{:.17e},{:.17e},{:.17e},{:.17e}", self.x(j), v.norm_sqr(), v.re, v.im)?;
        }
        Ok(())
    }
}

/// Fills the box with `2 sin(kx) cos(Δk x)` for x ≤ 0 and zero beyond.
///
/// Fails when the grid cannot resolve the fast component (k₊·dx > 0.5), when
/// x = 0 is not a grid node, or when the edge of the tapered region could reach
/// x = 0 before `t_final`: it travels at v₊ and spreads by four diffraction
/// widths √(2ħt/m). A left absorber wider than the taper counts as part of it.
pub fn initialize_cutoff(spec: &GridSpec, packet: &ModulatedPacket, t_final: f64) -> Result<GridState> {
    let GridSpec { x_min, x_max, dx, .. } = *spec;
    if !(x_min < 0.0 && x_max > 0.0 && dx > 0.0 && spec.dt > 0.0) {
        return Err(Error::InfeasibleGrid(format!("need x_min < 0 < x_max and positive steps ({x_min}, {x_max})")));
    }
    let n_left = -x_min / dx;
    if (n_left - n_left.round()).abs() > 1e-6 {
        return Err(Error::InfeasibleGrid(format!("x = 0 is not a node for x_min = {x_min}, dx = {dx}")));
    }
    let n_points = ((x_max - x_min) / dx).round() as usize + 1;
    if n_points < 16 {
        return Err(Error::InfeasibleGrid(format!("{n_points} points cannot resolve anything")));
    }
    if packet.k_plus() * dx > 0.5 {
        return Err(Error::InfeasibleGrid(format!("k₊·dx = {:.3} exceeds 0.5; refine dx", packet.k_plus() * dx)));
    }
    let taper_width = spec.taper_fraction.clamp(0.0, 0.5) * (x_max - x_min);
    let edge = x_min + taper_width.max(spec.absorber.map_or(0.0, |a| a.left));
    let reach = packet.v_plus() * t_final + 4.0 * (2.0 * packet.constants.hbar_over_m * t_final).sqrt();
    if -edge < reach {
        return Err(Error::InfeasibleGrid(format!(
            "left edge region ends at {edge:.1} Å, within reach ({reach:.1} Å) of the origin by t = {t_final} ps"
        )));
    }
    let x_max_actual = x_min + dx * (n_points - 1) as f64;
    let psi = (0..n_points)
        .map(|j| {
            let x = x_min + dx * j as f64;
            let mut v = packet.initial_state(x);
            if taper_width > 0.0 && x < x_min + taper_width {
                let s = (0.5 * std::f64::consts::PI * (x - x_min) / taper_width).sin();
                v *= s * s;
            }
            Complex64::new(v, 0.0)
        })
        .collect();
    Ok(GridState { x_min, x_max: x_max_actual, n_points, dx, psi, t: 0.0, taper_width })
}

/// Crank–Nicolson propagator with Dirichlet ends and a precomputed
/// tridiagonal factorization.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    dt: f64,
    a: Complex64,
    /// RHS diagonal 1 − 2a − iV dt/2ħ.
    rhs_diag: Vec<Complex64>,
    /// Thomas forward-sweep factors.
    c_prime: Vec<Complex64>,
    inv_denom: Vec<Complex64>,
}

impl CrankNicolson {
    pub fn new(
        state: &GridState,
        potential: OraclePotential,
        dt: f64,
        constants: &PhysicsConstants,
        absorber: Option<Absorber>,
    ) -> Self {
        let n = state.n_points;
        let a = Complex64::new(0.0, constants.hbar_over_m * dt / (4.0 * state.dx * state.dx));
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        if let OraclePotential::Delta { lambda } = potential {
            if let Some(j) = state.node(0.0) {
                v[j] = Complex64::new(-lambda / state.dx, 0.0);
            }
        }
        if let Some(ab) = absorber {
            for (j, vj) in v.iter_mut().enumerate() {
                *vj -= Complex64::new(0.0, ab.potential(state.x(j), state.x_min, state.x_max));
            }
        }
        let half = Complex64::new(0.0, dt / (2.0 * constants.hbar));
        let lhs_diag: Vec<Complex64> = v.iter().map(|&vj| 1.0 + 2.0 * a + half * vj).collect();
        let rhs_diag = v.iter().map(|&vj| 1.0 - 2.0 * a - half * vj).collect();

        // LHS: sub/super diagonal −a
        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_denom = vec![Complex64::new(0.0, 0.0); n];
        inv_denom[0] = 1.0 / lhs_diag[0];
        c_prime[0] = -a * inv_denom[0];
        for j in 1..n {
            let d = lhs_diag[j] + a * c_prime[j - 1];
            inv_denom[j] = 1.0 / d;
            c_prime[j] = -a * inv_denom[j];
        }
        Self { dt, a, rhs_diag, c_prime, inv_denom }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `state` by one step.
    pub fn step(&self, state: &mut GridState, scratch: &mut Vec<Complex64>) {
        let n = state.n_points;
        let psi = &mut state.psi;
        let a = self.a;
        scratch.resize(n, Complex64::new(0.0, 0.0));
        let d = scratch;
        // RHS, forward sweep fused
        let mut prev_psi = Complex64::new(0.0, 0.0);
        let mut prev_d = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let next = if j + 1 < n { psi[j + 1] } else { Complex64::new(0.0, 0.0) };
            let r = self.rhs_diag[j] * psi[j] + a * (prev_psi + next);
            prev_psi = psi[j];
            let dj = (r + a * prev_d) * self.inv_denom[j];
            d[j] = dj;
            prev_d = dj;
        }
        psi[n - 1] = d[n - 1];
        for j in (0..n - 1).rev() {
            psi[j] = d[j] - self.c_prime[j] * psi[j + 1];
        }
        state.t += self.dt;
    }
}

/// One CN step with a freshly built propagator. Prefer [`CrankNicolson`] for
/// repeated steps.
pub fn step_crank_nicolson(state: &mut GridState, potential: OraclePotential, dt: f64, constants: &PhysicsConstants) {
    let cn = CrankNicolson::new(state, potential, dt, constants, None);
    cn.step(state, &mut Vec::new());
}

/// ψ recorded at a probe position.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbeHistory {
    pub x: f64,
    pub t: Vec<f64>,
    pub psi: Vec<Complex64>,
}

impl ProbeHistory {
    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// Steps until `t_max`, recording ψ at `probe_x` every `record_every` steps
/// (the initial state is not recorded).
pub fn evolve_probe(
    state: &mut GridState,
    cn: &CrankNicolson,
    probe_x: f64,
    t_max: f64,
    record_every: usize,
) -> Result<ProbeHistory> {
    state.value_at(probe_x)?;
    let steps = ((t_max - state.t) / cn.dt()).round().max(0.0) as usize;
    let every = record_every.max(1);
    let mut hist = ProbeHistory { x: probe_x, ..Default::default() };
    let mut scratch = Vec::new();
    for s in 1..=steps {
        cn.step(state, &mut scratch);
        if s % every == 0 {
            hist.t.push(state.t);
            hist.psi.push(state.value_at(probe_x)?);
        }
    }
    Ok(hist)
}

/// Relative L2 and pointwise differences between two sampled signals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub rel_l2: f64,
    pub max_abs: f64,
    pub samples: usize,
}

/// Compares `numeric` against `reference` on a common set of samples.
pub fn compare_to_analytic(numeric: &[f64], reference: &[f64]) -> Result<ErrorReport> {
    if numeric.len() != reference.len() || numeric.is_empty() {
        return Err(Error::Precondition("compared signals must be non-empty and of equal length".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut max_abs: f64 = 0.0;
    for (a, b) in numeric.iter().zip(reference) {
        let d = a - b;
        num += d * d;
        den += b * b;
        max_abs = max_abs.max(d.abs());
    }
    let rel_l2 = if den > 0.0 {
        (num / den).sqrt()
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ErrorReport { rel_l2, max_abs, samples: numeric.len() })
}

/// Second-order Richardson extrapolation from runs at h and h/2.
pub fn richardson(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse.iter().zip(fine).map(|(c, f)| f + (f - c) / 3.0).collect()
}

/// Convergence ratio ‖u_h − u_{h/2}‖ / ‖u_{h/2} − u_{h/4}‖ (≈ 4 for a
/// second-order scheme).
pub fn convergence_ratio(h: &[f64], h2: &[f64], h4: &[f64]) -> f64 {
    let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    d(h, h2) / d(h2, h4)
}

/// A family of CN runs on successively refined grids, compared at one probe
/// against the analytic density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OraclePlan {
    pub potential: OraclePotential,
    pub packet: ModulatedPacket,
    pub probe_x: f64,
    pub t_max: f64,
    /// Spacing of the recorded probe samples (ps); a multiple of every dt.
    pub sample_dt: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub taper_fraction: f64,
    pub absorber: Option<Absorber>,
    /// (dx, dt) per level, coarse to fine.
    pub levels: Vec<(f64, f64)>,
}

impl OraclePlan {
    /// Free packet at E = 0.08 eV, Δk = 0.02 Å⁻¹, probe x = 200 Å, t ≤ 0.2 ps.
    /// The three levels halve dx and quarter dt.
    pub fn free_default(constants: PhysicsConstants) -> Result<Self> {
        Ok(Self {
            potential: OraclePotential::Free,
            packet: ModulatedPacket::from_energy(constants, 0.08, 0.02)?,
            probe_x: 200.0,
            t_max: 0.2,
            sample_dt: 8e-4,
            x_min: -1500.0,
            x_max: 1000.0,
            taper_fraction: 0.05,
            absorber: Some(Absorber { left: 400.0, right: 300.0, strength: 50.0 }),
            levels: vec![(0.4, 1.6e-4), (0.2, 4e-5), (0.1, 1e-5)],
        })
    }

    /// Delta well λ = 4.27 eV·Å, E = 0.08 eV, Δk = 0.001 Å⁻¹, probe x = 0.2 Å,
    /// t ≤ 0.2 ps.
    pub fn delta_default(constants: PhysicsConstants) -> Result<Self> {
        Ok(Self {
            potential: OraclePotential::Delta { lambda: 4.27 },
            packet: ModulatedPacket::from_energy(constants, 0.08, 0.001)?,
            probe_x: 0.2,
            t_max: 0.2,
            sample_dt: 4e-4,
            x_min: -2000.0,
            x_max: 400.0,
            taper_fraction: 0.05,
            absorber: Some(Absorber { left: 500.0, right: 200.0, strength: 50.0 }),
            levels: vec![(0.04, 1e-5), (0.02, 5e-6)],
        })
    }

    /// Long coarse run at the first node right of the origin, long enough to
    /// resolve the beat envelope of the delta default.
    pub fn delta_beats(constants: PhysicsConstants) -> Result<Self> {
        let dx = 0.5;
        Ok(Self {
            potential: OraclePotential::Delta { lambda: 4.27 },
            packet: ModulatedPacket::from_energy(constants, 0.08, 0.001)?,
            probe_x: dx,
            t_max: 11.0,
            sample_dt: 2.5e-4,
            x_min: -23000.0,
            x_max: 1000.0,
            taper_fraction: 0.05,
            absorber: Some(Absorber { left: 1000.0, right: 500.0, strength: 20.0 }),
            levels: vec![(dx, 2.5e-4)],
        })
    }

    fn grid_spec(&self, dx: f64, dt: f64) -> GridSpec {
        GridSpec {
            x_min: self.x_min,
            x_max: self.x_max,
            dx,
            dt,
            taper_fraction: self.taper_fraction,
            absorber: self.absorber,
        }
    }

    fn record_every(&self, dt: f64) -> Result<usize> {
        let r = self.sample_dt / dt;
        if r < 0.5 || (r - r.round()).abs() > 1e-6 {
            return Err(Error::InfeasibleGrid(format!(
                "sample spacing {} is not a multiple of dt = {dt}",
                self.sample_dt
            )));
        }
        Ok(r.round() as usize)
    }

    /// Checks every level without stepping.
    pub fn check(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::Config("oracle plan has no grid levels".into()));
        }
        for &(dx, dt) in &self.levels {
            let state = initialize_cutoff(&self.grid_spec(dx, dt), &self.packet, self.t_max)?;
            state.value_at(self.probe_x)?;
            self.record_every(dt)?;
        }
        Ok(())
    }

    /// Runs one level and returns the probe history.
    pub fn run_level(&self, dx: f64, dt: f64) -> Result<ProbeHistory> {
        let spec = self.grid_spec(dx, dt);
        let mut state = initialize_cutoff(&spec, &self.packet, self.t_max)?;
        let cn = CrankNicolson::new(&state, self.potential, dt, &self.packet.constants, self.absorber);
        let every = self.record_every(dt)?;
        let hist = evolve_probe(&mut state, &cn, self.probe_x, self.t_max, every)?;
        if hist.psi.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("crank-nicolson probe"));
        }
        Ok(hist)
    }

    /// Analytic density at the probe.
    pub fn analytic(&self, t: &[f64]) -> Result<Vec<f64>> {
        use crate::solver::{psi_delta, psi_free, EvaluationPoint};
        let well = match self.potential {
            OraclePotential::Delta { lambda } => Some(crate::model::DeltaWell::new(&self.packet.constants, lambda)?),
            OraclePotential::Free => None,
        };
        t.par_iter()
            .map(|&t| {
                let pt = EvaluationPoint::new(self.probe_x, t);
                Ok(match &well {
                    Some(w) => psi_delta(pt, w, &self.packet)?,
                    None => psi_free(pt, &self.packet)?,
                }
                .norm_sqr())
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelResult {
    pub dx: f64,
    pub dt: f64,
    pub error: ErrorReport,
}

/// Outcome of an [`OraclePlan`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub probe_x: f64,
    pub levels: Vec<LevelResult>,
    /// Successive-difference ratio of the last three levels.
    pub convergence_ratio: Option<f64>,
    /// Extrapolation from the last two levels against the analytic density.
    pub richardson: Option<ErrorReport>,
    #[serde(skip)]
    pub t: Vec<f64>,
    #[serde(skip)]
    pub analytic: Vec<f64>,
    /// Probe density per level, coarse to fine.
    #[serde(skip)]
    pub numeric: Vec<Vec<f64>>,
}

impl OracleReport {
    /// Best available error: Richardson when present, else the finest level.
    pub fn best(&self) -> Option<ErrorReport> {
        self.richardson.or_else(|| self.levels.last().map(|l| l.error))
    }
}

/// Runs all levels of `plan` in parallel and compares them with the analytic
/// density.
pub fn run_plan(plan: &OraclePlan) -> Result<OracleReport> {
    plan.check()?;
    let hists = plan.levels.par_iter().map(|&(dx, dt)| plan.run_level(dx, dt)).collect::<Result<Vec<_>>>()?;
    let t = hists[0].t.clone();
    if hists.iter().any(|h| h.t.len() != t.len()) {
        return Err(Error::InfeasibleGrid("levels recorded different sample counts".into()));
    }
    let analytic = plan.analytic(&t)?;
    let numeric: Vec<Vec<f64>> = hists.iter().map(|h| h.density()).collect();
    let levels = plan
        .levels
        .iter()
        .zip(&numeric)
        .map(|(&(dx, dt), n)| Ok(LevelResult { dx, dt, error: compare_to_analytic(n, &analytic)? }))
        .collect::<Result<Vec<_>>>()?;
    let k = numeric.len();
    let convergence_ratio = (k >= 3).then(|| convergence_ratio(&numeric[k - 3], &numeric[k - 2], &numeric[k - 1]));
    let richardson = if k >= 2 {
        Some(compare_to_analytic(&richardson(&numeric[k - 2], &numeric[k - 1]), &analytic)?)
    } else {
        None
    };
    Ok(OracleReport { probe_x: plan.probe_x, levels, convergence_ratio, richardson, t, analytic, numeric })
}
