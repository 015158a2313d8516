use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use movestar::model::{aggregate_cycle, DriveCycle, SourceType};
use movestar::tables::TableSet;
use movestar_ffi::*;

struct Tables(*mut MovestarTables);

impl Tables {
    fn shipped() -> Tables {
        let mut t = ptr::null_mut();
        assert_eq!(unsafe { movestar_tables_load_default(&mut t) }, MovestarStatus::Ok);
        Tables(t)
    }
}

impl Drop for Tables {
    fn drop(&mut self) {
        unsafe { movestar_tables_free(self.0) }
    }
}

struct Session(*mut MovestarSession);

impl Session {
    fn new(tables: &Tables, veh: i32) -> Session {
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { movestar_session_create(tables.0, veh, &mut s) }, MovestarStatus::Ok);
        Session(s)
    }

    fn step(&self, v: f64) -> Result<MovestarStep, MovestarStatus> {
        let mut out = MovestarStep::default();
        match unsafe { movestar_session_step(self.0, v, &mut out) } {
            MovestarStatus::Ok => Ok(out),
            e => Err(e),
        }
    }

    fn finalize(&self) -> Result<MovestarSummary, MovestarStatus> {
        let mut out = MovestarSummary::default();
        match unsafe { movestar_session_finalize(self.0, &mut out) } {
            MovestarStatus::Ok => Ok(out),
            e => Err(e),
        }
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        unsafe { movestar_session_destroy(self.0) }
    }
}

fn trip() -> Vec<f64> {
    let mut v: Vec<f64> = vec![0.0; 4];
    v.extend((1..=12).map(|k| k as f64 * 1.1));
    v.extend([13.2; 20]);
    v.extend((0..10).map(|k| 13.2 - k as f64 * 1.32));
    v.extend([0.0; 5]);
    v
}

#[test]
fn session_matches_batch_aggregation() {
    let tables = Tables::shipped();
    let speeds = trip();
    let shipped = TableSet::shipped();
    for (veh, st) in [(1, SourceType::LightDutyVehicle), (2, SourceType::LightDutyTruck)] {
        let s = Session::new(&tables, veh);
        let mut steps = Vec::new();
        for &v in &speeds {
            steps.push(s.step(v).unwrap());
        }
        let summary = s.finalize().unwrap();
        let batch =
            aggregate_cycle(&DriveCycle::from_speeds(&speeds).unwrap(), shipped.params(st), shipped.rates()).unwrap();
        assert_eq!(summary.seconds, speeds.len());
        assert_eq!(summary.distance, batch.distance);
        assert_eq!(summary.totals, MovestarEmissions::from(batch.totals));
        assert!(summary.factors_defined);
        assert_eq!(summary.factors, MovestarEmissions::from(*batch.factors.per_km().unwrap()));
        for (step, rec) in steps.iter().zip(&batch.per_second) {
            assert_eq!(step.opmode, rec.opmode.id());
            assert_eq!(step.vsp, rec.vsp);
            assert_eq!(step.emissions, MovestarEmissions::from(rec.emissions));
        }
    }
}

#[test]
fn session_outlives_its_tables_handle() {
    let tables = Tables::shipped();
    let s = Session::new(&tables, 1);
    drop(tables);
    s.step(0.0).unwrap();
    let summary = s.finalize().unwrap();
    assert_eq!(summary.seconds, 1);
    assert!(!summary.factors_defined);
    assert_eq!(summary.factors, MovestarEmissions::default());
}

#[test]
fn bad_speeds_are_rejected_without_side_effects() {
    let tables = Tables::shipped();
    let s = Session::new(&tables, 2);
    assert_eq!(s.finalize(), Err(MovestarStatus::EmptySession));
    s.step(4.0).unwrap();
    assert_eq!(s.step(-0.5), Err(MovestarStatus::NegativeSpeed));
    assert_eq!(s.step(f64::NAN), Err(MovestarStatus::InvalidSpeed));
    assert_eq!(s.finalize().unwrap().seconds, 1);
    assert_eq!(s.step(5.0).unwrap().accel, 1.0);
}

#[test]
fn null_pointers_and_bad_vehicle() {
    let tables = Tables::shipped();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(movestar_tables_load_default(ptr::null_mut()), MovestarStatus::NullPointer);
        assert_eq!(movestar_session_create(ptr::null(), 1, &mut s), MovestarStatus::NullPointer);
        assert_eq!(movestar_session_create(tables.0, 1, ptr::null_mut()), MovestarStatus::NullPointer);
        assert_eq!(movestar_session_create(tables.0, 3, &mut s), MovestarStatus::UnknownVehicle);
        assert!(s.is_null());
        let mut step = MovestarStep::default();
        assert_eq!(movestar_session_step(ptr::null_mut(), 1.0, &mut step), MovestarStatus::NullPointer);
        let mut summary = MovestarSummary::default();
        assert_eq!(movestar_session_finalize(ptr::null(), &mut summary), MovestarStatus::NullPointer);
        let session = Session::new(&tables, 1);
        assert_eq!(movestar_session_step(session.0, 1.0, ptr::null_mut()), MovestarStatus::NullPointer);
        movestar_session_destroy(ptr::null_mut());
        movestar_tables_free(ptr::null_mut());
    }
}

#[test]
fn tables_load_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let shipped = TableSet::shipped();
    let params = dir.path().join("params.csv");
    let rates = dir.path().join("rates.csv");
    std::fs::write(&params, shipped.params_csv()).unwrap();
    std::fs::write(&rates, shipped.with_scaled_rates(2.0).rates_csv()).unwrap();
    let p = CString::new(params.to_str().unwrap()).unwrap();
    let r = CString::new(rates.to_str().unwrap()).unwrap();

    let mut t = ptr::null_mut();
    assert_eq!(unsafe { movestar_tables_load(p.as_ptr(), r.as_ptr(), &mut t) }, MovestarStatus::Ok);
    let doubled = Tables(t);
    let default = Tables::shipped();
    let (a, b) = (Session::new(&default, 1), Session::new(&doubled, 1));
    let (sa, sb) = (a.step(7.0).unwrap(), b.step(7.0).unwrap());
    assert_eq!(sb.emissions.co2, 2.0 * sa.emissions.co2);

    let missing = CString::new(dir.path().join("nope.csv").to_str().unwrap()).unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { movestar_tables_load(p.as_ptr(), missing.as_ptr(), &mut t) }, MovestarStatus::TableIo);
    assert!(t.is_null());

    std::fs::write(&rates, shipped.rates_csv().replace("LDT,40,", "LDT,40,-")).unwrap();
    assert_eq!(unsafe { movestar_tables_load(p.as_ptr(), r.as_ptr(), &mut t) }, MovestarStatus::TableInvalid);
    assert_eq!(unsafe { movestar_tables_load(ptr::null(), r.as_ptr(), &mut t) }, MovestarStatus::NullPointer);
    assert!(t.is_null());
}

#[test]
fn every_status_has_a_message() {
    for status in [
        MovestarStatus::Ok,
        MovestarStatus::NullPointer,
        MovestarStatus::InvalidArgument,
        MovestarStatus::UnknownVehicle,
        MovestarStatus::NegativeSpeed,
        MovestarStatus::InvalidSpeed,
        MovestarStatus::EmptySession,
        MovestarStatus::TableIo,
        MovestarStatus::TableInvalid,
        MovestarStatus::Model,
        MovestarStatus::Panic,
    ] {
        let msg = unsafe { CStr::from_ptr(movestar_status_message(status)) };
        assert!(!msg.to_bytes().is_empty());
    }
}

#[test]
fn sessions_run_on_separate_threads() {
    let expected = {
        let tables = Tables::shipped();
        let s = Session::new(&tables, 1);
        trip().iter().for_each(|&v| {
            s.step(v).unwrap();
        });
        s.finalize().unwrap()
    };
    let handles: Vec<_> = (0..4)
        .map(|_| {
            std::thread::spawn(|| {
                let tables = Tables::shipped();
                let s = Session::new(&tables, 1);
                for v in trip() {
                    s.step(v).unwrap();
                }
                s.finalize().unwrap()
            })
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), expected);
    }
}

/// Compiles and links a small C program against the header and static library.
#[test]
fn header_compiles_and_links_from_c() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = crate_dir.join("include");
    assert!(header_dir.join("movestar.h").exists());
    let target_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = target_dir.join("libmovestar_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or {} missing", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "movestar.h"

int main(void) {
    MovestarTables *tables = NULL;
    MovestarSession *session = NULL;
    MovestarStep step;
    MovestarSummary summary;
    if (movestar_tables_load_default(&tables) != MOVESTAR_STATUS_OK) return 1;
    if (movestar_session_create(tables, 1, &session) != MOVESTAR_STATUS_OK) return 2;
    movestar_tables_free(tables);
    for (int k = 0; k < 30; k++) {
        if (movestar_session_step(session, k < 10 ? k : 10.0, &step) != MOVESTAR_STATUS_OK) return 3;
    }
    if (movestar_session_step(session, -1.0, &step) != MOVESTAR_STATUS_NEGATIVE_SPEED) return 4;
    if (movestar_session_finalize(session, &summary) != MOVESTAR_STATUS_OK) return 5;
    printf("%zu %.1f %d %s\n", summary.seconds, summary.distance, summary.factors_defined,
           movestar_status_message(MOVESTAR_STATUS_OK));
    movestar_session_destroy(session);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let cc = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-I"])
        .arg(&header_dir)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout), "30 245.0 1 ok\n");
}
