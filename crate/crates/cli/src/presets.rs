//! Named scenario presets. All share λ = 4.27 eV·Å and E = 0.08 eV.

use crate::config::{DkValue, GridConfig, Output, Potential, Probe, ScenarioConfig};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: fn() -> ScenarioConfig,
}

fn base(potential: Potential, dk: f64, probe: Probe, grid: (f64, f64, usize), outputs: &[Output]) -> ScenarioConfig {
    ScenarioConfig {
        potential,
        dk: DkValue::Value(dk),
        probe,
        grid: GridConfig { min: grid.0, max: grid.1, samples: grid.2 },
        outputs: outputs.to_vec(),
        ..Default::default()
    }
}

fn sweep() -> Vec<DkValue> {
    let mut v: Vec<DkValue> =
        [1e-4, 5e-4, 1e-3, 5e-3, 0.01, 0.02, 0.03, 0.05, 0.07, 0.1, 0.12].into_iter().map(DkValue::Value).collect();
    v.push(DkValue::Token("k".into()));
    v
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig2a",
        description: "rho(0,t), delta well, dk = 0: persistent oscillations",
        config: || base(Potential::Delta, 0.0, Probe::FixedX(0.0), (0.0, 0.02, 4001), &[Output::Exact]),
    },
    Preset {
        name: "fig2b",
        description: "rho(0,t), delta well, dk = 0.001: beating",
        config: || base(Potential::Delta, 0.001, Probe::FixedX(0.0), (0.0, 10.0, 40001), &[Output::Exact]),
    },
    Preset {
        name: "fig3a",
        description: "quantum beats at x = 0, dk = 0.0001, with the beat approximation",
        config: || {
            base(Potential::Delta, 1e-4, Probe::FixedX(0.0), (0.0, 50.0, 20000), &[Output::Exact, Output::BeatsApprox])
        },
    },
    Preset {
        name: "fig3b",
        description: "quantum beats at x = 0, dk = 0.0005, with the beat approximation",
        config: || {
            base(Potential::Delta, 5e-4, Probe::FixedX(0.0), (0.0, 50.0, 20000), &[Output::Exact, Output::BeatsApprox])
        },
    },
    Preset {
        name: "fig3c",
        description: "quantum beats at x = 0, dk = 0.001",
        config: || base(Potential::Delta, 1e-3, Probe::FixedX(0.0), (0.0, 50.0, 20000), &[Output::Exact]),
    },
    Preset {
        name: "fig3d",
        description: "quantum beats at x = 0, dk = 0.001, exact vs beat approximation",
        config: || {
            base(Potential::Delta, 1e-3, Probe::FixedX(0.0), (0.0, 50.0, 20000), &[Output::Exact, Output::BeatsApprox])
        },
    },
    Preset {
        name: "fig4",
        description: "diffraction in time at x = 1e8 A, dk = 0.0005, with rho_plus/rho_minus/rho_int",
        config: || {
            base(
                Potential::Delta,
                5e-4,
                Probe::FixedX(1e8),
                (58000.0, 66000.0, 20001),
                &[Output::Exact, Output::Components],
            )
        },
    },
    Preset {
        name: "fig5a",
        description: "Rabi oscillations at x = 1e8 A, dk = 0.0005, exact vs two-level",
        config: || {
            base(
                Potential::Delta,
                5e-4,
                Probe::FixedX(1e8),
                (64000.0, 70000.0, 20001),
                &[Output::Exact, Output::TwoLevel],
            )
        },
    },
    Preset {
        name: "fig5b",
        description: "free two-level density at x = 1e8 A, dk = 0.0005 (rerun with --dk k for the closed channel)",
        config: || {
            base(
                Potential::Free,
                5e-4,
                Probe::FixedX(1e8),
                (64000.0, 70000.0, 20001),
                &[Output::Exact, Output::TwoLevel],
            )
        },
    },
    Preset {
        name: "fig6",
        description: "delay-time measurement at x = 1000 A, dk = 0.02",
        config: || ScenarioConfig {
            dk_list: vec![DkValue::Value(0.02)],
            ..base(Potential::Delta, 0.02, Probe::FixedX(1000.0), (0.3, 0.8, 5001), &[Output::Exact, Output::Delay])
        },
    },
    Preset {
        name: "fig7",
        description: "delay-time sweep over dk at x = 1000 A, ending at dk = k",
        config: || ScenarioConfig {
            dk_list: sweep(),
            ..base(Potential::Delta, 0.02, Probe::FixedX(1000.0), (0.3, 0.8, 5001), &[Output::Delay])
        },
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
