//! Frozen stability map around the H1 reference scenario.
//!
//! H1 parameters came out of a gain/capacitance sweep. With the digital zone
//! controller updating once per minute, a light emulator turns each update
//! into an overcorrection (the loop gain through the nearly algebraic air
//! node exceeds the sampled-loop limit) and the emulated zone hunts at twice
//! the update period. Heavy internal mass, continuous control, or the
//! simulated PV all remove the oscillation.

use std::path::PathBuf;

use hil_testbed::analyzer::{hunting_in_log, HuntingParams, HuntingVerdict};
use hil_testbed::{run, Scenario};

fn verdict(overrides: &[String]) -> HuntingVerdict {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", "h1.json"]
        .iter()
        .collect();
    let s = Scenario::load(&path, overrides).unwrap();
    let log = run(&s).unwrap().log;
    hunting_in_log(
        &log,
        &"zone.T:emulated".parse().unwrap(),
        &"zone.T:setpoint".parse().unwrap(),
        &HuntingParams::default(),
    )
    .unwrap()
}

#[test]
fn only_light_mass_with_sampled_control_under_method1_hunts() {
    for interval in [0.0, 60.0] {
        for c_emu in [2_000.0, 500_000.0] {
            for mode in ["method1_emulated_pv", "method2_simulated_pv"] {
                let v = verdict(&[
                    format!("plant.hvac.control_interval_s={interval}"),
                    format!("plant.emulator.c_emu={c_emu}"),
                    format!("plant.pv_mode={mode}"),
                ]);
                let expect = interval == 60.0 && c_emu == 2_000.0 && mode == "method1_emulated_pv";
                assert_eq!(
                    v.is_hunting, expect,
                    "interval {interval} s, C_emu {c_emu}, {mode}: {v:?}"
                );
                // Tight tracking is a property of the light node only.
                if mode == "method2_simulated_pv" && c_emu == 2_000.0 {
                    assert!(v.peak_to_peak < 0.1, "{c_emu} {interval}: {v:?}");
                }
            }
        }
    }
}

#[test]
fn h1_hunts_at_twice_the_controller_period() {
    let v = verdict(&[]);
    assert!(v.is_hunting);
    assert_eq!(v.period_s, Some(120.0));
    assert!(v.peak_to_peak > 0.5 && v.crossings >= 6);
}
