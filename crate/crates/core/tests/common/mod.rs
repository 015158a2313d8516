//! Test-only oracles and fixtures.
//!
//! `reference_run` is a straight array-at-a-time port of the reference
//! script's flow: it reads the shipped CSV text with its own parser, works in
//! mph for every threshold, and classifies with a literal if-chain. It shares
//! no code with the crate's pipeline.

#![allow(dead_code)]

pub const PARAMS_CSV: &str = include_str!("../../data/params.csv");
pub const RATES_CSV: &str = include_str!("../../data/rates.csv");

const MPH_PER_MPS: f64 = 1.0 / 0.44704;
const G: f64 = 9.8;

#[derive(Debug, Clone)]
pub struct ReferenceOutput {
    pub opmodes: Vec<u8>,
    /// energy, CO, HC, NOx, CO2 per second
    pub per_second: Vec<[f64; 5]>,
    pub totals: [f64; 5],
    pub distance_m: f64,
    pub factors: Option<[f64; 5]>,
}

fn data_rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')).skip(1).map(|l| l.split(',').collect())
}

/// [A, B, C, M, f] for "LDV"/"LDT".
pub fn reference_params(code: &str) -> [f64; 5] {
    let row = data_rows(PARAMS_CSV).find(|r| r[0] == code).expect("params row");
    let v: Vec<f64> = row[1..].iter().map(|x| x.parse().unwrap()).collect();
    [v[0], v[1], v[2], v[3], v[4]]
}

pub fn reference_rate(code: &str, opmode: u8) -> [f64; 5] {
    let row = data_rows(RATES_CSV).find(|r| r[0] == code && r[1].parse::<u8>().unwrap() == opmode).expect("rate row");
    let v: Vec<f64> = row[2..].iter().map(|x| x.parse().unwrap()).collect();
    [v[0], v[1], v[2], v[3], v[4]]
}

/// Literal transcription of the operating-mode table, speeds in mph, VSP in kW/t.
pub fn reference_opmode(speed_mph: f64, acc_mph: f64, acc_prev1: f64, acc_prev2: f64, vsp: f64) -> u8 {
    if acc_mph <= -2.0 || (acc_mph < -1.0 && acc_prev1 < -1.0 && acc_prev2 < -1.0) {
        0
    } else if speed_mph < 1.0 {
        1
    } else if speed_mph < 25.0 {
        if vsp < 0.0 {
            11
        } else if vsp < 3.0 {
            12
        } else if vsp < 6.0 {
            13
        } else if vsp < 9.0 {
            14
        } else if vsp < 12.0 {
            15
        } else {
            16
        }
    } else if speed_mph < 50.0 {
        if vsp < 0.0 {
            21
        } else if vsp < 3.0 {
            22
        } else if vsp < 6.0 {
            23
        } else if vsp < 9.0 {
            24
        } else if vsp < 12.0 {
            25
        } else if vsp < 18.0 {
            27
        } else if vsp < 24.0 {
            28
        } else if vsp < 30.0 {
            29
        } else {
            30
        }
    } else if vsp < 6.0 {
        33
    } else if vsp < 12.0 {
        35
    } else if vsp < 18.0 {
        37
    } else if vsp < 24.0 {
        38
    } else if vsp < 30.0 {
        39
    } else {
        40
    }
}

/// `veh_type` 1 = LDV, 2 = LDT; speeds in m/s at 1 Hz, zero grade.
pub fn reference_run(veh_type: u8, speed: &[f64]) -> ReferenceOutput {
    let code = if veh_type == 1 { "LDV" } else { "LDT" };
    let [a_term, b_term, c_term, mass, f_mass] = reference_params(code);
    let n = speed.len();

    let mut acc = vec![0.0; n];
    for i in 1..n {
        acc[i] = speed[i] - speed[i - 1];
    }
    let mut vsp = vec![0.0; n];
    for i in 0..n {
        let v = speed[i];
        vsp[i] =
            (a_term * v + b_term * v.powi(2) + c_term * v.powi(3) + mass * (acc[i] + G * 0.0f64.sin()) * v) / f_mass;
    }
    let speed_mph: Vec<f64> = speed.iter().map(|v| v * MPH_PER_MPS).collect();
    let acc_mph: Vec<f64> = acc.iter().map(|a| a * MPH_PER_MPS).collect();

    let mut opmodes = vec![0u8; n];
    for i in 0..n {
        let p1 = if i >= 1 { acc_mph[i - 1] } else { 0.0 };
        let p2 = if i >= 2 { acc_mph[i - 2] } else { 0.0 };
        opmodes[i] = reference_opmode(speed_mph[i], acc_mph[i], p1, p2, vsp[i]);
    }

    let mut per_second = Vec::with_capacity(n);
    let mut totals = [0.0; 5];
    for &m in &opmodes {
        let rate = reference_rate(code, m);
        let mut sec = [0.0; 5];
        for k in 0..5 {
            sec[k] = rate[k] / 3600.0;
            totals[k] += sec[k];
        }
        per_second.push(sec);
    }
    let distance_m: f64 = speed.iter().sum();
    let factors = (distance_m > 0.0).then(|| {
        let km = distance_m / 1000.0;
        [totals[0] / km, totals[1] / km, totals[2] / km, totals[3] / km, totals[4] / km]
    });
    ReferenceOutput { opmodes, per_second, totals, distance_m, factors }
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Named oracle fixtures, speeds in m/s.
pub fn fixture_cycles() -> Vec<(&'static str, Vec<f64>)> {
    vec![
        ("idle_only", vec![0.0; 30]),
        ("constant_cruise", vec![20.0; 60]),
        ("sawtooth", sawtooth()),
        ("urban_mix", urban_mix()),
    ]
}

/// 0 → 13.4 m/s (about 30 mph) in 1 m/s² steps and back down.
pub fn sawtooth() -> Vec<f64> {
    let mut up: Vec<f64> = (0..=13).map(|k| k as f64).collect();
    up.push(13.4);
    let mut down: Vec<f64> = (0..=13).rev().map(|k| k as f64).collect();
    up.append(&mut down);
    up
}

/// Stop-and-go trace touching all three speed classes, braking and idle.
pub fn urban_mix() -> Vec<f64> {
    let mut v = Vec::new();
    v.extend([0.0; 5]);
    v.extend((1..=12).map(|k| k as f64 * 0.9));
    v.extend((0..20).map(|k| 10.8 + 0.3 * (k as f64 * 0.7).sin()));
    v.extend((1..=14).map(|k| 10.8 + k as f64 * 0.95));
    v.extend((0..25).map(|k| 24.1 + 0.5 * (k as f64 * 0.4).cos()));
    v.extend((1..=10).map(|k| (24.6 - k as f64 * 2.4).max(0.0)));
    v.extend([0.0; 8]);
    v.extend((1..=6).map(|k| k as f64 * 1.5));
    v.extend((1..=6).map(|k| 9.0 - k as f64 * 0.4));
    v
}

/// A deliberately broken table pair and the error it must produce.
pub struct CorruptTables {
    pub name: &'static str,
    pub params: String,
    pub rates: String,
    pub expect: fn(&movestar::tables::TableError) -> bool,
}

fn without_line(text: &str, prefix: &str) -> String {
    text.lines().filter(|l| !l.starts_with(prefix)).map(|l| format!("{l}\n")).collect()
}

pub fn corrupted_tables() -> Vec<CorruptTables> {
    use movestar::model::{OpMode, SourceType, Species};
    use movestar::tables::{TableError, Violation};

    let p = PARAMS_CSV.to_string();
    let r = RATES_CSV.to_string();
    let ldv_row = "LDV,0.156461,0.00200193,0.000492646,1.4788,1.4788";
    vec![
        CorruptTables {
            name: "rates missing LDT opmode 33",
            params: p.clone(),
            rates: without_line(&r, "LDT,33,"),
            expect: |e| {
                matches!(e, TableError::Incomplete { missing }
                    if *missing == vec![(SourceType::LightDutyTruck, OpMode::new(33).unwrap())])
            },
        },
        CorruptTables {
            name: "LDV mass zero",
            params: p.replace(ldv_row, "LDV,0.156461,0.00200193,0.000492646,0,1.4788"),
            rates: r.clone(),
            expect: |e| {
                matches!(e, TableError::Invalid(v) if *v == vec![Violation::InvalidParam {
                    source_type: SourceType::LightDutyVehicle, field: "M", value: 0.0 }])
            },
        },
        CorruptTables {
            name: "negative CO rate",
            params: p.clone(),
            rates: r.replace("LDV,13,136343.0,28.973,", "LDV,13,136343.0,-28.973,"),
            expect: |e| {
                matches!(e, TableError::Invalid(v) if *v == vec![Violation::InvalidRate {
                    source_type: SourceType::LightDutyVehicle, opmode: OpMode::new(13).unwrap(),
                    species: Species::CO, value: -28.973 }])
            },
        },
        CorruptTables {
            name: "duplicated LDV params row",
            params: format!("{p}{ldv_row}\n"),
            rates: r.clone(),
            expect: |e| {
                matches!(e, TableError::Invalid(v)
                    if *v == vec![Violation::DuplicateParams(SourceType::LightDutyVehicle)])
            },
        },
        CorruptTables {
            name: "duplicated rate row",
            params: p.clone(),
            rates: format!("{r}LDT,1,34200.0,8.892,0.8892,1.3338,2445.3\n"),
            expect: |e| {
                matches!(e, TableError::Invalid(v) if *v == vec![Violation::DuplicateRate {
                    source_type: SourceType::LightDutyTruck, opmode: OpMode::IDLE }])
            },
        },
        CorruptTables {
            name: "LDT params row missing",
            params: without_line(&p, "LDT,"),
            rates: r.clone(),
            expect: |e| {
                matches!(e, TableError::Invalid(v)
                    if *v == vec![Violation::MissingParams(SourceType::LightDutyTruck)])
            },
        },
        CorruptTables {
            name: "rates header missing NOx column",
            params: p.clone(),
            rates: r.replace("source_type,opmode,energy,CO,HC,NOx,CO2", "source_type,opmode,energy,CO,HC,CO2"),
            expect: |e| matches!(e, TableError::Schema { message, .. } if message.contains("NOx")),
        },
        CorruptTables {
            name: "non-numeric drag term",
            params: p.replace(ldv_row, "LDV,0.156461,0.00200193,abc,1.4788,1.4788"),
            rates: r.clone(),
            expect: |e| matches!(e, TableError::Parse { line: 7, message, .. } if message.contains("column C")),
        },
        CorruptTables {
            name: "unknown unit token",
            params: p.clone(),
            rates: r.replace("# unit: CO=g/h", "# unit: CO=lb/h"),
            expect: |e| matches!(e, TableError::Unit { message, .. } if message.contains("lb/h")),
        },
        CorruptTables {
            name: "unknown operating mode",
            params: p.clone(),
            rates: r.replace("LDV,16,", "LDV,17,"),
            expect: |e| matches!(e, TableError::Parse { line: 18, message, .. } if message.contains("17")),
        },
        CorruptTables {
            name: "unknown source type",
            params: p.replace("LDT,", "HDT,"),
            rates: r.clone(),
            expect: |e| matches!(e, TableError::Parse { line: 8, message, .. } if message.contains("HDT")),
        },
        CorruptTables {
            name: "short rate row",
            params: p.clone(),
            rates: r.replace("LDV,22,68247.8,13.7444,1.4332,2.25218,4879.72", "LDV,22,68247.8,13.7444"),
            expect: |e| matches!(e, TableError::Parse { line: 20, .. }),
        },
    ]
}

/// Draws a red-arrival scenario for which both the stop-and-go baseline and
/// the glide can be built.
pub fn random_red_scenario(rng: &mut impl rand::Rng) -> movestar::corridor::SignalScenario {
    use movestar::corridor::{compare_scenarios, Arrival, GlideOutcome, SignalScenario};
    use movestar::model::SourceType;

    let tables = movestar::tables::TableSet::shipped();
    loop {
        let green = rng.gen_range(20.0..45.0);
        let red = rng.gen_range(20.0..60.0);
        let sc = SignalScenario {
            approach_distance: rng.gen_range(200.0..900.0),
            cruise_speed: rng.gen_range(8.0..22.0),
            green,
            red,
            offset: rng.gen_range(0.0..green + red),
            vehicle: if rng.gen_bool(0.5) { SourceType::LightDutyVehicle } else { SourceType::LightDutyTruck },
        };
        if !matches!(sc.arrival(), Arrival::Red { .. }) {
            continue;
        }
        if matches!(compare_scenarios(&sc, &tables), Ok(r) if r.glide == GlideOutcome::Smoothed) {
            return sc;
        }
    }
}
