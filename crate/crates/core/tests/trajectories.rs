use rabi_core::semiclassical::{integrate, Attractor, Controls, Dynamics, SemiclassicalState};
use rabi_core::{Complex64, RenormalizedParams};

const KB: f64 = 0.5;
const T_MAX: f64 = 120.0;

/// `(g_r, g_cr, initial alpha, expected attractor is SP)`.
const SCENARIOS: [(f64, f64, (f64, f64), bool); 4] = [
    (0.3, 2.0, (0.3, 0.3), false),
    (1.0, 1.5, (0.05, -0.05), true),
    (1.0, 2.1, (0.05, -0.05), false),
    (1.0, 2.1, (0.1, -0.05), true),
];

fn run(i: usize, dynamics: Dynamics) -> rabi_core::semiclassical::Trajectory {
    let (g_r, g_cr, (re, im), _) = SCENARIOS[i];
    let p = RenormalizedParams::new(g_r, g_cr, KB);
    let s0 = SemiclassicalState::slaved(Complex64::new(re, im), &p, -1.0);
    integrate(&s0, &p, dynamics, T_MAX, &Controls::default()).unwrap()
}

#[test]
fn adiabatic_scenarios_reach_expected_attractors() {
    for (i, &(.., sp)) in SCENARIOS.iter().enumerate() {
        let t = run(i, Dynamics::Adiabatic { sz_sign: -1.0 });
        if sp {
            assert!(t.attractor.is_sp(), "scenario {i}: {:?}", t.attractor);
        } else {
            assert_eq!(t.attractor, Attractor::NpDown, "scenario {i}");
        }
    }
}

#[test]
fn spin_norm_drift_over_long_run() {
    let p = RenormalizedParams::new(1.0, 2.1, KB);
    let s0 = SemiclassicalState::slaved(Complex64::new(0.1, -0.05), &p, -1.0);
    let t = integrate(&s0, &p, Dynamics::Full { eta: 100.0 }, 1e3, &Controls::default()).unwrap();
    assert!(t.max_norm_drift < 1e-6, "drift {:e}", t.max_norm_drift);
}
