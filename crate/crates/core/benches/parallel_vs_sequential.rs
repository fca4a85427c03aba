//! Parallel versus sequential execution of the three batch workloads:
//! seeded trial batches, occupant population steps, and an H1-style
//! parameter sweep. Build with `--no-default-features` to measure the
//! fallback, where both strategies run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hil_testbed::building::{ZoneModel, ZoneParams};
use hil_testbed::occupants::{AgentSpec, OccupantParams, Population};
use hil_testbed::orchestrator::{run_trials, run_with};
use hil_testbed::plant::DischargeAir;
use hil_testbed::{Execution, Scenario};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn short_scenario() -> Scenario {
    let mut s = Scenario::default();
    s.run.horizon = 30;
    s.delays.comm_latency_s = 20.0;
    s.delays.jitter_up_s = 2.0;
    s.delays.jitter_down_s = 2.0;
    s
}

fn trials(c: &mut Criterion) {
    let s = short_scenario();
    let seeds: Vec<u64> = (0..16).collect();
    let mut g = c.benchmark_group("seeded_trials_16x30");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(run_trials(&s, &seeds, exec)).len())
        });
    }
    g.finish();
}

fn population(c: &mut Criterion) {
    let params = OccupantParams {
        agents: (0..4_000)
            .map(|id| AgentSpec {
                id,
                coords: [f64::from(id % 10), f64::from(id % 8), 1.1],
                t_pref_c: 21.0 + f64::from(id % 5),
                ..AgentSpec::default()
            })
            .collect(),
        ..OccupantParams::default()
    };
    let zone = ZoneModel::new(ZoneParams::default(), false, DischargeAir::from_ratio(14.0, 0.008, 0.5))
        .unwrap()
        .state;
    let dis = DischargeAir::from_ratio(14.0, 0.008, 0.5);
    let mut g = c.benchmark_group("population_step_4000_agents");
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            let mut pop = Population::new(params.clone());
            let mut step = 0;
            b.iter(|| {
                step += 1;
                black_box(pop.step(1, step, 60.0, &dis, &zone, exec)).gains
            })
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut base = Scenario::default();
    base.run.horizon = 20;
    base.plant.emulator.c_emu = 2_000.0;
    base.plant.substep_s = 0.25;
    let grid: Vec<(f64, f64)> = [0.0, 30.0, 60.0]
        .into_iter()
        .flat_map(|ci| [0.5, 1.0, 2.0].into_iter().map(move |kp| (ci, kp)))
        .collect();
    let mut g = c.benchmark_group("gain_sweep_9_cases");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                exec.map(&grid, |&(ci, kp)| {
                    let mut s = base.clone();
                    s.plant.hvac.control_interval_s = ci;
                    s.plant.hvac.cool_pid.kp = kp;
                    run_with(&s, Execution::Sequential).is_ok()
                })
                .len()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, trials, population, sweep);
criterion_main!(benches);
