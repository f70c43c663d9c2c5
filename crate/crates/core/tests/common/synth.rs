//! Deterministic synthetic battery histories with known per-cycle SOE.
//!
//! Each cycle has a constant-current charge phase with a rising voltage ramp
//! and a constant-current discharge phase with a falling ramp. The discharge
//! sample interval is solved so that the left-rectangle discharge energy is
//! exactly `target_soe` times the charge energy, which makes the generated
//! SOE known up to rounding.

use std::collections::BTreeSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use soe_analytics::cycledata::{
    history_metadata, write_telemetry, BatteryHistory, CycleRecord, OperatingConditions, PhaseKind,
    PhaseTrace, Sample, Segment,
};

pub const CHARGE_VOLTAGE: f64 = 4.2;
const CHARGE_SAMPLES: usize = 12;
const DISCHARGE_SAMPLES: usize = 12;

/// Conditions with a 1.5 A charge current.
pub fn cond(temp: f64, current: f64, cutoff: f64) -> OperatingConditions {
    OperatingConditions {
        ambient_temp_c: temp,
        discharge_current_a: current,
        cutoff_voltage_v: cutoff,
        charge_current_a: 1.5,
    }
}

/// SOE trajectory for a run of cycles: `start + slope * k + curve * k^2`
/// plus uniform noise, where `k` counts from zero within the run.
#[derive(Debug, Clone, Copy)]
pub struct Trajectory {
    pub start: f64,
    pub slope: f64,
    pub curve: f64,
    pub noise: f64,
}

#[derive(Debug, Clone)]
pub struct Run {
    pub label: Option<&'static str>,
    pub cycles: u32,
    pub conditions: OperatingConditions,
    pub soe: Trajectory,
}

#[derive(Debug, Clone)]
pub struct Spec {
    pub id: &'static str,
    pub seed: u64,
    pub rated_capacity_ah: f64,
    /// SOE of cycle 1, which precedes all runs and belongs to none of them.
    pub formation_soe: f64,
    pub runs: Vec<Run>,
    /// Single cycles inserted between consecutive runs, outside any segment.
    pub transition_cycles: bool,
    /// Acquisition-order indexes whose discharge stops well above cutoff.
    pub incomplete: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct SynthBattery {
    pub history: BatteryHistory,
    /// Target SOE of every generated cycle, by acquisition-order index.
    pub truth: Vec<(u32, f64)>,
}

impl SynthBattery {
    pub fn soe_of(&self, cycle_index: u32) -> f64 {
        self.truth
            .iter()
            .find(|(i, _)| *i == cycle_index)
            .map(|(_, s)| *s)
            .expect("cycle was generated")
    }

    pub fn write(&self, dir: &Path) {
        let id = &self.history.battery_id;
        let mut csv = Vec::new();
        write_telemetry(&self.history, &mut csv).unwrap();
        std::fs::write(dir.join(format!("{id}.csv")), csv).unwrap();
        let meta = history_metadata(&self.history, CHARGE_VOLTAGE).unwrap();
        std::fs::write(dir.join(format!("{id}.toml")), meta.to_toml()).unwrap();
    }
}

fn ramp(from: f64, to: f64, n: usize, k: usize) -> f64 {
    from + (to - from) * k as f64 / (n - 1) as f64
}

/// Builds one cycle whose left-rectangle SOE equals `soe`.
fn make_cycle(
    cycle_index: u32,
    conditions: OperatingConditions,
    soe: f64,
    incomplete: bool,
    rng: &mut ChaCha8Rng,
) -> CycleRecord {
    let ic = conditions.charge_current_a;
    let dt_c = 300.0 + rng.gen_range(-0.5..0.5);
    let charge: Vec<Sample> = (0..CHARGE_SAMPLES)
        .map(|k| {
            let v = ramp(3.5, CHARGE_VOLTAGE, CHARGE_SAMPLES, k);
            Sample::new(k as f64 * dt_c, v, ic)
        })
        .collect();
    let e_charged: f64 = charge[..CHARGE_SAMPLES - 1]
        .iter()
        .map(|s| s.voltage_v * s.current_a * dt_c)
        .sum();

    let id = conditions.discharge_current_a;
    let floor = if incomplete {
        conditions.cutoff_voltage_v + 0.4
    } else {
        conditions.cutoff_voltage_v
    };
    let volts: Vec<f64> = (0..DISCHARGE_SAMPLES)
        .map(|k| ramp(4.1, floor, DISCHARGE_SAMPLES, k))
        .collect();
    let v_sum: f64 = volts[..DISCHARGE_SAMPLES - 1].iter().sum();
    let dt_d = soe * e_charged / (id * v_sum);
    let discharge = volts
        .iter()
        .enumerate()
        .map(|(k, &v)| Sample::new(k as f64 * dt_d, v, id))
        .collect();

    CycleRecord {
        cycle_index,
        seq: cycle_index,
        charge: PhaseTrace::new(PhaseKind::Charge, charge),
        discharge: PhaseTrace::new(PhaseKind::Discharge, discharge),
        conditions,
        flags: BTreeSet::new(),
    }
}

pub fn generate(spec: &Spec) -> SynthBattery {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut cycles = Vec::new();
    let mut truth = Vec::new();
    let mut segments = Vec::new();
    let mut index = 1u32;

    let first = &spec.runs[0];
    cycles.push(make_cycle(
        index,
        first.conditions,
        spec.formation_soe,
        false,
        &mut rng,
    ));
    truth.push((index, spec.formation_soe));
    index += 1;

    for (r, run) in spec.runs.iter().enumerate() {
        if r > 0 && spec.transition_cycles {
            let soe = run.soe.start - 0.05;
            cycles.push(make_cycle(index, run.conditions, soe, false, &mut rng));
            truth.push((index, soe));
            index += 1;
        }
        let start = index;
        for k in 0..run.cycles {
            let k_f = f64::from(k);
            let t = &run.soe;
            let noise = if t.noise > 0.0 {
                rng.gen_range(-t.noise..t.noise)
            } else {
                0.0
            };
            let soe = t.start + t.slope * k_f + t.curve * k_f * k_f + noise;
            let incomplete = spec.incomplete.contains(&index);
            cycles.push(make_cycle(index, run.conditions, soe, incomplete, &mut rng));
            truth.push((index, soe));
            index += 1;
        }
        if let Some(label) = run.label {
            segments.push(Segment {
                label: label.to_string(),
                first_cycle: start,
                last_cycle: index - 1,
                conditions: run.conditions,
            });
        }
    }

    SynthBattery {
        history: BatteryHistory {
            battery_id: spec.id.to_string(),
            rated_capacity_ah: spec.rated_capacity_ah,
            rated_voltage_v: 3.7,
            cycles,
            segments,
        },
        truth,
    }
}

fn flat_run(cycles: u32, conditions: OperatingConditions, soe: Trajectory) -> Run {
    Run {
        label: None,
        cycles,
        conditions,
        soe,
    }
}

/// The committed fixture set.
///
/// * `SYN01`: 24 °C, 2 A, 2.2 V, slow linear fade with noise.
/// * `SYN02`: 24 °C, 4 A, 2.2 V, faster linear fade, two incomplete discharges.
/// * `SYN03`: three segments 24 °C/4 A, 43 °C/1 A and 43 °C/2 A at 2.2 V,
///   with a transition cycle between each pair.
/// * `SYN04`: 24 °C, 2 A, 2.7 V, accelerating fade.
pub fn fixture_specs() -> Vec<Spec> {
    vec![
        Spec {
            id: "SYN01",
            seed: 1,
            rated_capacity_ah: 2.0,
            formation_soe: 1.04,
            runs: vec![flat_run(
                40,
                cond(24.0, 2.0, 2.2),
                Trajectory {
                    start: 0.90,
                    slope: -0.0008,
                    curve: 0.0,
                    noise: 0.002,
                },
            )],
            transition_cycles: false,
            incomplete: vec![],
        },
        Spec {
            id: "SYN02",
            seed: 2,
            rated_capacity_ah: 2.0,
            formation_soe: 1.04,
            runs: vec![flat_run(
                40,
                cond(24.0, 4.0, 2.2),
                Trajectory {
                    start: 0.86,
                    slope: -0.0012,
                    curve: 0.0,
                    noise: 0.002,
                },
            )],
            transition_cycles: false,
            incomplete: vec![15, 28],
        },
        Spec {
            id: "SYN03",
            seed: 3,
            rated_capacity_ah: 2.0,
            formation_soe: 1.04,
            runs: vec![
                Run {
                    label: Some("24C-4A"),
                    cycles: 12,
                    conditions: cond(24.0, 4.0, 2.2),
                    soe: Trajectory {
                        start: 0.84,
                        slope: -0.001,
                        curve: 0.0,
                        noise: 0.002,
                    },
                },
                Run {
                    label: Some("43C-1A"),
                    cycles: 12,
                    conditions: cond(43.0, 1.0, 2.2),
                    soe: Trajectory {
                        start: 0.93,
                        slope: -0.001,
                        curve: 0.0,
                        noise: 0.002,
                    },
                },
                Run {
                    label: Some("43C-2A"),
                    cycles: 12,
                    conditions: cond(43.0, 2.0, 2.2),
                    soe: Trajectory {
                        start: 0.89,
                        slope: -0.001,
                        curve: 0.0,
                        noise: 0.002,
                    },
                },
            ],
            transition_cycles: true,
            incomplete: vec![],
        },
        Spec {
            id: "SYN04",
            seed: 4,
            rated_capacity_ah: 2.0,
            formation_soe: 1.04,
            runs: vec![flat_run(
                40,
                cond(24.0, 2.0, 2.7),
                Trajectory {
                    start: 0.90,
                    slope: -0.0002,
                    curve: -0.00004,
                    noise: 0.0,
                },
            )],
            transition_cycles: false,
            incomplete: vec![],
        },
    ]
}

pub fn fixtures() -> Vec<SynthBattery> {
    fixture_specs().iter().map(generate).collect()
}

/// Writes every fixture battery into `dir`.
pub fn write_fixtures(dir: &Path) {
    for b in fixtures() {
        b.write(dir);
    }
}
