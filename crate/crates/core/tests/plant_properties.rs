//! Plant-level properties checked against independent reference
//! integrators and paired runs.

use hil_testbed::geb::SupervisorySetpoints;
use hil_testbed::plant::{
    DischargeAir, EmulatorParams, Envelope, HvacParams, HvacUnit, OutdoorCondition, OutdoorEmulator, OutdoorKind,
    PidGains, Plant, PlantCommand, PlantParams, PvMode, ZoneEmulator, ZoneTarget,
};
use hil_testbed::psychro::CP_AIR;
use proptest::prelude::*;

/// RK4 at step `h` on `C dT/dt = q + g (t_dis - T)`; also returns the
/// integral of the heat flux accumulated from the RK4 stages.
fn rk4_node(t0: f64, c: f64, q: f64, g: f64, t_dis: f64, dt: f64, h: f64) -> (f64, f64) {
    let flux = |t: f64| q + g * (t_dis - t);
    let n = (dt / h).round() as usize;
    let (mut t, mut e) = (t0, 0.0);
    for _ in 0..n {
        let k1 = flux(t);
        let k2 = flux(t + 0.5 * h * k1 / c);
        let k3 = flux(t + 0.5 * h * k2 / c);
        let k4 = flux(t + h * k3 / c);
        let avg = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        t += h * avg / c;
        e += h * avg;
    }
    (t, e)
}

fn emulator_vs_fine_step(params: EmulatorParams) {
    let c = params.c_emu;
    let mut emu = ZoneEmulator::new(params, 22.0, 0.008).unwrap();
    let mut t_ref = 22.0;
    let mut e_ref = 0.0;
    let mut worst: f64 = 0.0;
    for k in 0..3600 {
        let s = f64::from(k);
        let target = ZoneTarget {
            t_c: 23.0 + 1.5 * (s / 600.0).sin(),
            w: 0.008,
        };
        let dis = DischargeAir::from_ratio(16.0 + 3.0 * (s / 250.0).cos(), 0.007, 0.4);
        emu.step(target, &dis, 1.0);
        let q = emu.state.heater_w - emu.state.cooling_w;
        let (t1, e) = rk4_node(t_ref, c, q, dis.m_dot * CP_AIR, dis.t_dis, 1.0, 0.1);
        t_ref = t1;
        e_ref += e;
        worst = worst.max((emu.state.t_emu - t_ref).abs());
    }
    assert!(worst <= 1e-6, "max deviation {worst:e} degC");
    // Net heat integrated by the reference equals C dT of the exact update.
    let stored = c * (emu.state.t_emu - 22.0);
    assert!(
        (stored - e_ref).abs() <= 1e-6 * e_ref.abs().max(1.0),
        "C dT {stored} vs integral {e_ref}"
    );
}

#[test]
fn emulator_matches_fine_step_reference_over_one_hour() {
    emulator_vs_fine_step(EmulatorParams::default());
}

#[test]
fn light_emulator_matches_fine_step_reference_over_one_hour() {
    emulator_vs_fine_step(EmulatorParams {
        c_emu: 2_000.0,
        temp_pid: PidGains::new(0.25, 0.005, 0.0).limits(-1.0, 1.0),
        ..EmulatorParams::default()
    });
}

fn command(t_z: f64, cooling_c: f64) -> PlantCommand {
    PlantCommand {
        zone_target: Some(ZoneTarget { t_c: t_z, w: 0.009 }),
        setpoints: SupervisorySetpoints {
            cooling_c,
            ..SupervisorySetpoints::default()
        },
        outdoor_target: OutdoorCondition {
            t_c: 30.0,
            rh_pct: 40.0,
        },
    }
}

fn discharge_trace(c_emu: f64, pv_mode: PvMode, zone_trace: &[f64]) -> Vec<DischargeAir> {
    let params = PlantParams {
        pv_mode,
        emulator: EmulatorParams {
            c_emu,
            ..EmulatorParams::default()
        },
        ..PlantParams::default()
    };
    let mut plant = Plant::new(params, command(zone_trace[0], 24.0)).unwrap();
    zone_trace
        .iter()
        .map(|&t| {
            plant.advance(60.0, &[(0.0, command(t, 24.0))]);
            plant.snapshot().discharge
        })
        .collect()
}

#[test]
fn method2_discharge_is_independent_of_emulator_mass() {
    let trace: Vec<f64> = (0..120).map(|n| 24.5 + 0.8 * (f64::from(n) / 9.0).sin()).collect();
    let light = discharge_trace(2_000.0, PvMode::Method2SimulatedPv, &trace);
    let heavy = discharge_trace(500_000.0, PvMode::Method2SimulatedPv, &trace);
    assert_eq!(light, heavy);
    // Method 1 closes the loop through the emulator, so mass matters there.
    let light1 = discharge_trace(2_000.0, PvMode::Method1EmulatedPv, &trace);
    let heavy1 = discharge_trace(500_000.0, PvMode::Method1EmulatedPv, &trace);
    assert_ne!(light1, heavy1);
}

#[test]
fn outdoor_step_reaches_632_percent_at_tau() {
    let mut o = OutdoorEmulator::new(
        OutdoorKind::Air,
        Envelope::default_for(OutdoorKind::Air),
        120.0,
        OutdoorCondition {
            t_c: 21.1,
            rh_pct: 50.0,
        },
    )
    .unwrap();
    let target = OutdoorCondition {
        t_c: 22.2,
        rh_pct: 50.0,
    };
    let threshold = 21.1 + 0.632 * 1.1;
    let mut crossed = None;
    for k in 1..=300 {
        let (v, _) = o.step(target, 1.0);
        if crossed.is_none() && v.t_c >= threshold {
            crossed = Some(k);
        }
    }
    let k = crossed.expect("reaches threshold");
    assert!((119..=121).contains(&k), "crossed at {k} s");
}

proptest! {
    #[test]
    fn outdoor_values_never_leave_envelope(
        targets in prop::collection::vec((-40.0f64..90.0, 0.0f64..100.0), 1..60),
        tau in 0.0f64..600.0,
        water in any::<bool>(),
    ) {
        let kind = if water { OutdoorKind::Water } else { OutdoorKind::Air };
        let env = Envelope::default_for(kind);
        let mut o = OutdoorEmulator::new(kind, env, tau, OutdoorCondition { t_c: targets[0].0, rh_pct: targets[0].1 }).unwrap();
        for (t, rh) in targets {
            let (v, _) = o.step(OutdoorCondition { t_c: t, rh_pct: rh }, 60.0);
            prop_assert!(v.t_c >= env.t_min_c && v.t_c <= env.t_max_c);
            if !water {
                prop_assert!(v.rh_pct >= env.rh_min_pct && v.rh_pct <= env.rh_max_pct);
            }
        }
    }

    #[test]
    fn coil_and_hvac_commands_stay_within_ratings(
        seq in prop::collection::vec((10.0f64..40.0, 0.002f64..0.015, 8.0f64..45.0, 15.0f64..32.0), 1..80),
        kp in 0.05f64..5.0,
        ki in 0.0f64..0.1,
    ) {
        let ep = EmulatorParams {
            c_emu: 2_000.0,
            temp_pid: PidGains::new(kp, ki, 0.0).limits(-1.0, 1.0),
            ..EmulatorParams::default()
        };
        let hp = HvacParams {
            cool_pid: PidGains::new(kp, ki, 0.0),
            heat_pid: PidGains::new(kp, ki, 0.0),
            ..HvacParams::default()
        };
        let mut emu = ZoneEmulator::new(ep.clone(), 22.0, 0.008).unwrap();
        let mut hvac = HvacUnit::new(hp.clone(), DischargeAir::from_ratio(20.0, 0.008, hp.m_dot)).unwrap();
        for (t_target, w_target, t_dis, pv) in seq {
            let spt = SupervisorySetpoints::default();
            let r = hvac.step(Some(pv), 0.009, &spt, 1.0);
            prop_assert!(r.cooling_w >= 0.0 && r.cooling_w <= hp.cooling_rated_w + 1e-9);
            prop_assert!(r.heating_w >= 0.0 && r.heating_w <= hp.heating_rated_w + 1e-9);
            prop_assert!(hvac.discharge.t_dis >= hp.t_dis_min - 1e-9 && hvac.discharge.t_dis <= hp.t_dis_max + 1e-9);
            prop_assert!(hvac.discharge.m_dot >= 0.0);
            let rh = hvac.discharge.rh_dis();
            prop_assert!((0.0..=100.0 + 1e-9).contains(&rh));
            emu.step(ZoneTarget { t_c: t_target, w: w_target }, &DischargeAir::from_ratio(t_dis, 0.008, 0.5), 1.0);
            let s = &emu.state;
            prop_assert!(s.heater_w >= 0.0 && s.heater_w <= ep.heater_rated_w);
            prop_assert!(s.cooling_w >= 0.0 && s.cooling_w <= ep.cooling_rated_w);
            prop_assert!(s.humidifier_kgs >= 0.0 && s.humidifier_kgs <= ep.humidifier_rated_kgs);
        }
    }

    #[test]
    fn emulator_heat_balance_holds_over_any_window(
        q_seq in prop::collection::vec((-4000.0f64..8000.0, 8.0f64..40.0, 0.0f64..1.0), 1..40),
        c in 500.0f64..1e6,
    ) {
        // Open-loop node updates: C dT equals the RK4 integral of net heat.
        let mut t: f64 = 22.0;
        let mut t_ref = 22.0;
        let mut e_ref = 0.0;
        for (q, t_dis, m) in q_seq {
            let g = m * CP_AIR;
            let t_eq = if g > 0.0 { t_dis + q / g } else { f64::NAN };
            t = if g > 0.0 { t_eq + (t - t_eq) * (-g * 60.0 / c).exp() } else { t + q * 60.0 / c };
            let (t1, e) = rk4_node(t_ref, c, q, g, t_dis, 60.0, 0.1);
            t_ref = t1;
            e_ref += e;
        }
        let stored = c * (t - 22.0);
        prop_assert!((stored - e_ref).abs() <= 1e-6 * e_ref.abs().max(1.0), "{} vs {}", stored, e_ref);
    }
}
