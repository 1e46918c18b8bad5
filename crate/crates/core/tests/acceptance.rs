//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is printed on every run.
//! The process exits non-zero if a criterion fails unexpectedly. A9 is known
//! not to hold at x = 1000 A (finite-distance correction to the peak shift,
//! see the README) and is reported without failing the run.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::bigfx::faddeeva_reference;
use common::rel_err;
use modwave::analysis::{
    delay_time_measured, estimate_frequency, find_main_front_peak, late_window_start, oscillation_amplitude,
    phase_time, phase_time_closed_form, post_transient_start, DelayGridSpec, FrequencyMode,
};
use modwave::asymptotics::{rho_beats_x0, rho_two_level};
use modwave::model::{frequencies, DeltaWell, ModulatedPacket, PhysicsConstants, PoleExpansion, PotentialModel};
use modwave::oracle::{run_plan, OraclePlan, OracleReport};
use modwave::solver::{psi_delta, psi_free, psi_general, EvaluationPoint};
use modwave::specfun::{faddeeva, moshinsky, MoshinskyArgs};
use modwave::trace::linspace;
use modwave::{Axis, Complex64, DensityTrace};
use rand::{Rng, SeedableRng};

type Criterion = (&'static str, fn() -> Outcome);

const KNOWN_UNATTAINABLE: &[&str] = &["A9"];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn electron() -> PhysicsConstants {
    PhysicsConstants::electron()
}

fn well() -> DeltaWell {
    DeltaWell::new(&electron(), 4.27).unwrap()
}

fn packet(dk: f64) -> ModulatedPacket {
    ModulatedPacket::from_energy(electron(), 0.08, dk).unwrap()
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn random_point(rng: &mut impl Rng) -> EvaluationPoint {
    EvaluationPoint::new(10f64.powf(rng.random_range(-2.0..4.0)), 10f64.powf(rng.random_range(-4.0..2.0)))
}

fn a1() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let moderate: Vec<Complex64> =
        (0..1000).map(|_| Complex64::new(rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0))).collect();
    let large: Vec<Complex64> = (0..100)
        .map(|_| Complex64::from_polar(rng.random_range(6.0..30.0), rng.random_range(-0.3..PI + 0.3)))
        .collect();
    let start = Instant::now();
    let wm: Vec<Complex64> = moderate.iter().map(|&z| faddeeva(z).unwrap()).collect();
    let wl: Vec<Complex64> = large.iter().map(|&z| faddeeva(z).unwrap()).collect();
    let elapsed = start.elapsed();
    let em = moderate.iter().zip(&wm).map(|(&z, &w)| rel_err(w, faddeeva_reference(z, 0))).fold(0.0, f64::max);
    let el = large.iter().zip(&wl).map(|(&z, &w)| rel_err(w, faddeeva_reference(z, 0))).fold(0.0, f64::max);
    outcome(
        em <= 1e-12 && el <= 1e-10 && elapsed < Duration::from_secs(1),
        format!(
            "max rel err {em:.2e} (<= 1e-12), large |z| {el:.2e} (<= 1e-10), {:.1} ms (< 1 s)",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn a2() -> Outcome {
    let c = electron();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let q = 0.01 + 0.99 * i as f64 / 19.0;
        for j in 0..20 {
            let t = 10f64.powf(-4.0 + 6.0 * j as f64 / 19.0);
            let qc = Complex64::from(q);
            let s = moshinsky(&MoshinskyArgs::new(c, 0.0, qc, t)).unwrap()
                + moshinsky(&MoshinskyArgs::new(c, 0.0, -qc, t)).unwrap();
            worst = worst.max((s - Complex64::from_polar(1.0, -0.5 * c.hbar_over_m * q * q * t)).norm());
        }
    }
    outcome(worst < 1e-10, format!("max |M(q)+M(-q)-phase| {worst:.2e} on 20x20 (q, t) grid (< 1e-10)"))
}

fn a3() -> Outcome {
    let w = well();
    let res = w.resonance_data();
    let mut rng = rand::rngs::StdRng::seed_from_u64(17);
    let (mut worst_mod, mut worst_pw) = (0.0f64, 0.0f64);
    for dk in [0.001, 0.02] {
        let p = packet(dk);
        let c = p.constants;
        let qt = PoleExpansion::modulated(&p);
        let waves: Vec<(f64, PoleExpansion)> = [p.k_plus(), -p.k_plus(), p.k_minus(), -p.k_minus()]
            .iter()
            .map(|&k| (k.signum(), PoleExpansion::plane_wave(k)))
            .collect();
        for _ in 0..500 {
            let pt = random_point(&mut rng);
            let d = psi_delta(pt, &w, &p).unwrap();
            worst_mod = worst_mod.max((psi_general(c, pt, &qt, &w, &res, None).unwrap().psi - d).norm());
            // sin(k+ x) + sin(k- x) from four plane waves
            let pw: Complex64 =
                waves.iter().map(|(s, e)| *s * psi_general(c, pt, e, &w, &res, None).unwrap().psi).sum::<Complex64>()
                    / Complex64::new(0.0, 2.0);
            worst_pw = worst_pw.max((pw - d).norm());
        }
    }
    outcome(
        worst_mod < 1e-12 && worst_pw < 1e-12,
        format!("1000 random (x,t): modulated {worst_mod:.2e}, plane-wave {worst_pw:.2e} (< 1e-12)"),
    )
}

fn a4() -> Outcome {
    let w = DeltaWell::new(&electron(), 1e-12).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(23);
    let mut worst = 0.0f64;
    for dk in [0.0, 0.001, 0.02] {
        let p = packet(dk);
        for _ in 0..500 {
            let pt = random_point(&mut rng);
            worst = worst.max((psi_delta(pt, &w, &p).unwrap() - psi_free(pt, &p).unwrap()).norm());
        }
    }
    outcome(worst < 1e-9, format!("max |psi_delta(1e-12) - psi_free| {worst:.2e} (< 1e-9)"))
}

fn a5() -> Outcome {
    let (w, p) = (well(), packet(0.001));
    let t0 = post_transient_start(&w, &p);
    let grid = linspace(t0, 50.0, 40_000).unwrap();
    let tr = DensityTrace::exact(&PotentialModel::Delta(w), &p, Axis::Time { x: 0.0 }, grid, false).unwrap();
    let approx: Vec<f64> = tr.grid.iter().map(|&t| rho_beats_x0(t, &w, &p).unwrap()).collect();
    let l2 = rel_l2(&approx, &tr.rho);
    let env = estimate_frequency(&tr, FrequencyMode::Envelope).unwrap();
    let omega = frequencies(&p, w.bound_energy).big_omega;
    let period_err = (omega / env.omega - 1.0).abs();
    outcome(
        l2 < 0.01 && period_err < 0.01,
        format!(
            "window [{t0:.3}, 50] ps: rel L2 {l2:.2e} (< 1e-2); envelope period {:.4} vs 2pi/Omega {:.4} ps, rel {period_err:.2e} (< 1e-2)",
            2.0 * PI / env.omega,
            2.0 * PI / omega
        ),
    )
}

fn late_trace(p: &ModulatedPacket, grid: Vec<f64>) -> DensityTrace {
    DensityTrace::exact(&PotentialModel::Delta(well()), p, Axis::Time { x: 1e8 }, grid, false).unwrap()
}

fn late_grid(p: &ModulatedPacket) -> Vec<f64> {
    let t0 = late_window_start(p, 1e8, 200.0);
    linspace(t0, t0 + 40.0 * 2.0 * PI / p.big_omega(), 8000).unwrap()
}

fn a6() -> Outcome {
    let (w, p) = (well(), packet(0.0005));
    let x = 1e8;
    let tr = late_trace(&p, late_grid(&p));
    let two: Vec<f64> = tr.grid.iter().map(|&t| rho_two_level(EvaluationPoint::new(x, t), &p, &w).unwrap()).collect();
    let l2 = rel_l2(&two, &tr.rho);
    let est = estimate_frequency(&tr, FrequencyMode::Carrier).unwrap();
    let rel = (est.omega / p.big_omega() - 1.0).abs();
    outcome(
        l2 < 0.01 && rel < 0.005,
        format!(
            "x = 1e8 A, t in [{:.1}, {:.1}] ps: rel L2 {l2:.2e} (< 1e-2); omega {:.5} vs Omega {:.5}, rel {rel:.2e} (< 5e-3)",
            tr.grid[0],
            tr.grid[tr.len() - 1],
            est.omega,
            p.big_omega()
        ),
    )
}

fn a7() -> Outcome {
    let (w, open) = (well(), packet(0.0005));
    let closed = ModulatedPacket::new(electron(), open.k, open.k).unwrap();
    let x = 1e8;
    let t0 = late_window_start(&open, x, 200.0);
    let grid = linspace(t0, t0 + 10.0 * 2.0 * PI / open.big_omega(), 4000).unwrap();
    let two: Vec<f64> = grid.iter().map(|&t| rho_two_level(EvaluationPoint::new(x, t), &closed, &w).unwrap()).collect();
    let mean = two.iter().sum::<f64>() / two.len() as f64;
    let var = two.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / two.len() as f64;
    let grid = late_grid(&open);
    let a_open = oscillation_amplitude(&grid, &late_trace(&open, grid.clone()).rho, open.big_omega()).unwrap();
    let a_closed = oscillation_amplitude(&grid, &late_trace(&closed, grid.clone()).rho, open.big_omega()).unwrap();
    let ratio = a_closed / a_open;
    outcome(
        var / mean < 1e-10 && ratio < 0.01,
        format!("dk = k: two-level variance/mean {:.2e} (< 1e-10); exact amplitude at Omega {ratio:.2e} of dk = 5e-4 (< 1e-2)", var / mean),
    )
}

fn a8() -> Outcome {
    let p = packet(0.0005);
    let x = 1e8;
    let (tp, tm) = (p.t_plus(x), p.t_minus(x));
    let grid = linspace(0.9 * tp, tp + 0.25 * (tm - tp), 20_000).unwrap();
    let tr = DensityTrace::exact(&PotentialModel::Delta(well()), &p, Axis::Time { x }, grid, true).unwrap();
    let comp = tr.components.as_ref().unwrap();
    let plus = DensityTrace::from_values(tr.axis, tr.grid.clone(), comp.rho_plus.clone()).unwrap();
    let peak = find_main_front_peak(&plus, &p, x).unwrap();
    let shift = (peak.t_peak / tp - 1.0).abs();
    let worst = (0..tr.len())
        .filter(|&i| tr.grid[i] >= tp)
        .map(|i| comp.rho_int[i].abs() / comp.rho_plus[i])
        .fold(0.0, f64::max);
    outcome(
        shift < 0.02 && worst < 0.05,
        format!(
            "rho+ peak {:.2} vs t+ {tp:.2} ps, rel {shift:.2e} (< 2e-2); max |rho_int|/rho+ on [t+, t+ + (t- - t+)/4] {worst:.3} (< 0.05)",
            peak.t_peak
        ),
    )
}

fn a9() -> Outcome {
    let w = well();
    let x = 1000.0;
    let spec = DelayGridSpec::default();
    let mut worst = 0.0f64;
    let mut all_negative = true;
    let mut rows = Vec::new();
    for dk in [0.005, 0.01, 0.02, 0.03, 0.05, 0.07, 0.1] {
        let r = delay_time_measured(&w, &packet(dk), x, spec).unwrap();
        let ratio = r.delta_t_measured / r.delta_t_analytic;
        worst = worst.max((ratio - 1.0).abs());
        all_negative &= r.delta_t_measured < 0.0;
        rows.push(format!("{dk}:{ratio:.3}"));
    }
    let r = delay_time_measured(&w, &packet(1e-4), x, spec).unwrap();
    let limit = (r.delta_t_measured / r.t_phi - 1.0).abs();
    outcome(
        worst <= 0.10 && all_negative && r.delta_t_measured < 0.0 && limit <= 0.10,
        format!(
            "x = 1000 A, measured/analytic by dk [{}]: max dev {worst:.3} (<= 0.10); all negative {all_negative}; dk = 1e-4 vs t_phi dev {limit:.3} (<= 0.10)",
            rows.join(" ")
        ),
    )
}

fn a10() -> Outcome {
    let w = well();
    let worst = (0..=200)
        .map(|i| {
            let k = 0.05 + 0.95 * i as f64 / 200.0;
            let pt = phase_time(&w, k).unwrap();
            ((pt.numerical - pt.closed_form) / pt.closed_form).abs()
        })
        .fold(0.0, f64::max);
    outcome(worst < 1e-8, format!("201 k in [0.05, 1]: max rel dev {worst:.2e} (< 1e-8)"))
}

fn a11(free: &OracleReport, delta: &OracleReport, elapsed: Duration) -> Outcome {
    let free_err = free.levels.last().unwrap().error.rel_l2;
    let ratio = free.convergence_ratio.unwrap_or(f64::NAN);
    let delta_err = delta.levels.last().unwrap().error.rel_l2;
    let rich = |r: &OracleReport| r.richardson.map_or(f64::NAN, |e| e.rel_l2);
    outcome(
        free_err < 1e-3 && (ratio - 4.0).abs() <= 0.5 && delta_err < 0.01 && elapsed < Duration::from_secs(300),
        format!(
            "free x = {} A: finest rel L2 {free_err:.2e} (< 1e-3), ratio {ratio:.2} (4 +- 0.5), extrapolated {:.2e}; delta x = {} A: finest {delta_err:.2e} (< 1e-2), extrapolated {:.2e}; {:.0} s (< 300 s)",
            free.probe_x,
            rich(free),
            delta.probe_x,
            rich(delta),
            elapsed.as_secs_f64()
        ),
    )
}

fn a12() -> Outcome {
    let w = well();
    let fig6 = delay_time_measured(&w, &packet(0.02), 1000.0, DelayGridSpec::default()).unwrap();
    let fig7 = delay_time_measured(&w, &packet(1e-4), 1000.0, DelayGridSpec::default()).unwrap();
    let t_phi = phase_time_closed_form(&w, packet(0.0).k);
    let same = |ours: f64, theirs: f64| ours.signum() == theirs.signum() && (ours / theirs).log10().abs() < 1.0;
    let pairs = [
        ("Delta t (dk = 0.02)", fig6.delta_t_measured, -1.055e-3),
        ("t_phi", t_phi, -2.05e-3),
        ("Delta t (dk = 1e-4)", fig7.delta_t_measured, -2.05e-3),
    ];
    let passed = pairs.iter().all(|&(_, a, b)| same(a, b));
    let detail = pairs
        .iter()
        .map(|(n, a, b)| format!("{n}: ours {a:.3e} ps, published {b:.3e} ps"))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(passed, format!("{detail} (same sign, within one decade)"))
}

fn main() {
    let oracle = std::thread::spawn(|| {
        let start = Instant::now();
        let (free, delta) = rayon::join(
            || run_plan(&OraclePlan::free_default(electron()).unwrap()).unwrap(),
            || run_plan(&OraclePlan::delta_default(electron()).unwrap()).unwrap(),
        );
        (free, delta, start.elapsed())
    });

    let criteria: [Criterion; 10] = [
        ("A1", a1),
        ("A2", a2),
        ("A3", a3),
        ("A4", a4),
        ("A5", a5),
        ("A6", a6),
        ("A7", a7),
        ("A8", a8),
        ("A9", a9),
        ("A10", a10),
    ];
    let mut results: Vec<(&str, Outcome)> = criteria.iter().map(|&(name, f)| (name, f())).collect();
    let (free, delta, elapsed) = oracle.join().expect("oracle thread");
    results.push(("A11", a11(&free, &delta, elapsed)));
    results.push(("A12", a12()));

    let mut unexpected = Vec::new();
    for (name, o) in &results {
        println!("{name:<4} {}  {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed && !KNOWN_UNATTAINABLE.contains(name) {
            unexpected.push(*name);
        }
    }
    let passed = results.iter().filter(|(_, o)| o.passed).count();
    println!("acceptance: {passed}/{} passed", results.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
