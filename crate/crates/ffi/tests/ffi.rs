use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use flocksim_ffi::*;

const OSC: &str = r#"
n = 4
d = 1
horizon = 100
policy = "lazy"
hysteresis = false
x0 = [["0"], ["1/2"], ["21/16"], ["29/16"]]
v1 = [["1/8"], ["-1/8"], ["1/8"], ["-1/8"]]
"#;

fn last_error() -> String {
    let p = flocksim_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn new_sim(text: &str) -> *mut FlocksimSim {
    let toml = CString::new(text).unwrap();
    let mut sim = ptr::null_mut();
    assert_eq!(unsafe { flocksim_sim_new(toml.as_ptr(), &mut sim) }, FlocksimStatus::Ok);
    sim
}

#[test]
fn oscillator_through_the_c_interface() {
    let sim = new_sim(OSC);
    unsafe {
        assert_eq!(flocksim_sim_run(sim, 100, 0), FlocksimStatus::Ok);
        let (mut n, mut d, mut tick) = (0usize, 0usize, 0u64);
        assert_eq!(flocksim_sim_shape(sim, &mut n, &mut d, &mut tick), FlocksimStatus::Ok);
        assert_eq!((n, d, tick), (4, 1, 100));
        let (mut records, mut switches, mut period) = (0usize, 0usize, 0u64);
        assert_eq!(flocksim_sim_switches(sim, &mut records, &mut switches, &mut period), FlocksimStatus::Ok);
        assert_eq!((records, switches, period), (101, 100, 2));
        // v(t) = (-3)^{1-t} v(1)
        let mut v = 0.0;
        assert_eq!(flocksim_sim_velocity(sim, 0, 0, &mut v), FlocksimStatus::Ok);
        assert_eq!(v, -0.125 * 3f64.powi(-99));
        let mut text = ptr::null_mut();
        assert_eq!(flocksim_sim_position_text(sim, 0, 0, &mut text), FlocksimStatus::Ok);
        assert!(CStr::from_ptr(text).to_str().unwrap().contains('/'));
        flocksim_string_free(text);
        assert_eq!(flocksim_sim_position(sim, 4, 0, &mut v), FlocksimStatus::OutOfRange);
        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("t.jsonl").to_str().unwrap()).unwrap();
        assert_eq!(flocksim_sim_write_trace(sim, path.as_ptr()), FlocksimStatus::Ok);
        assert_eq!(std::fs::read_to_string(dir.path().join("t.jsonl")).unwrap().lines().count(), 103);
        flocksim_sim_free(sim);
    }
}

#[test]
fn budget_and_parse_errors_have_codes() {
    let sim = new_sim(OSC);
    unsafe {
        assert_eq!(flocksim_sim_run(sim, 100, 10), FlocksimStatus::Budget);
        let mut tick = 0u64;
        flocksim_sim_shape(sim, ptr::null_mut(), ptr::null_mut(), &mut tick);
        assert_eq!(tick, 10);
        flocksim_sim_free(sim);
    }
    let bad = CString::new(OSC.replace("\"21/16\"", "\"1/0\"")).unwrap();
    let mut sim = ptr::null_mut();
    assert_eq!(unsafe { flocksim_sim_new(bad.as_ptr(), &mut sim) }, FlocksimStatus::Parse);
    assert!(sim.is_null());
    assert!(last_error().contains("line 7"));
    assert_eq!(unsafe { flocksim_sim_new(ptr::null(), &mut sim) }, FlocksimStatus::NullPointer);
    assert_eq!(unsafe { flocksim_sim_run(ptr::null_mut(), 1, 0) }, FlocksimStatus::NullPointer);
    unsafe { flocksim_sim_free(ptr::null_mut()) };
}

#[test]
fn lowerbound_handle() {
    let mut lb = ptr::null_mut();
    unsafe {
        assert_eq!(flocksim_lowerbound_run(4, 32, 6, 1000, 0, &mut lb), FlocksimStatus::Ok);
        let mut theta = 0u64;
        assert_eq!(flocksim_lowerbound_theta(lb, 1, &mut theta), FlocksimStatus::Ok);
        assert_eq!(theta, 11);
        assert_eq!(flocksim_lowerbound_theta(lb, 5, &mut theta), FlocksimStatus::OutOfRange);
        let json = flocksim_lowerbound_json(lb);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["heights"][0]["theta"], 11);
        flocksim_string_free(json);
        flocksim_lowerbound_free(lb);
        assert_eq!(flocksim_lowerbound_run(4, 16, 6, 1000, 0, &mut lb), FlocksimStatus::Parse);
        assert!(last_error().contains("mod 6"));
    }
}

#[test]
fn spectrum_and_residue() {
    let lazy = CString::new("lazy").unwrap();
    let mut ev = [0.0f64; 4];
    unsafe {
        assert_eq!(flocksim_path_spectrum(4, lazy.as_ptr(), ev.as_mut_ptr(), 4), FlocksimStatus::Ok);
        assert_eq!(flocksim_path_spectrum(4, lazy.as_ptr(), ev.as_mut_ptr(), 3), FlocksimStatus::OutOfRange);
    }
    for (a, b) in ev.iter().zip([1.0, 2.0 / 3.0, 0.0, -1.0 / 3.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    let mut text = ptr::null_mut();
    unsafe {
        assert_eq!(flocksim_residue_canonical(3, &mut text), FlocksimStatus::Ok);
        let p = CStr::from_ptr(text).to_str().unwrap().to_string();
        flocksim_string_free(text);
        assert!(p.ends_with("4*x^11"), "{p}");
        assert_eq!(flocksim_residue_canonical(6, &mut text), FlocksimStatus::Budget);
        assert!(text.is_null());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/flocksim.h")).unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 14);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct FlocksimSim FlocksimSim;"));
    assert!(header.contains("FLOCKSIM_STATUS_BUDGET = 5"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which("cc") else { return };
    let dir = tempfile::tempdir().unwrap();
    let main = dir.path().join("main.c");
    std::fs::write(
        &main,
        "#include \"flocksim.h\"\nint main(void) { FlocksimSim *s = 0; return flocksim_sim_new(\"\", &s) == FLOCKSIM_STATUS_OK; }\n",
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = std::process::Command::new(cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(&include)
        .arg(&main)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which(name: &str) -> Result<std::path::PathBuf, ()> {
    let path = std::env::var_os("PATH").ok_or(())?;
    std::env::split_paths(&path).map(|d| d.join(name)).find(|p| p.is_file()).ok_or(())
}
