use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hrom_sim::config::{parse_scenario, render_scenario};
use hrom_sim::summary::parse_summary;

fn hrom_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hrom-sim")).args(args).output().expect("run hrom-sim")
}

fn write_cfg(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn summary_value(text: &str, key: &str) -> String {
    parse_summary(text).into_iter().find(|(k, _)| k == key).map(|(_, v)| v).unwrap_or_else(|| panic!("no {key}"))
}

const SHORT_TROT: &str = "controller.mode = pid_roll\nsim.duration = 0.3\ninit.roll = 0.02\nsim.lock = pitch, yaw\n";

#[test]
fn run_writes_log_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "trot.cfg", SHORT_TROT);
    let out = dir.path().join("out");
    let res = hrom_sim(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));

    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert_eq!(summary_value(&summary, "mode"), "pid_roll");
    assert_eq!(summary_value(&summary, "samples"), "300");
    let log = fs::read_to_string(out.join("log.csv")).unwrap();
    assert_eq!(log.lines().count(), 301);

    // Timestamps advance by exactly one step per row.
    let times: Vec<f64> = log.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    for (k, t) in times.iter().enumerate() {
        assert!((t - k as f64 * 1e-3).abs() < 1e-12);
    }

    // Recomputing from the CSV gives the same metrics.
    let res = hrom_sim(&["metrics", out.join("log.csv").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    let recomputed = String::from_utf8(res.stdout).unwrap();
    for key in ["forward_displacement", "roll_rms", "cone_violations", "slip.FR", "gait_cycles"] {
        assert_eq!(summary_value(&recomputed, key), summary_value(&summary, key), "{key}");
    }
}

#[test]
fn identical_config_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "trot.cfg", SHORT_TROT);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        assert_eq!(hrom_sim(&["run", &cfg, "--out", out.to_str().unwrap()]).status.code(), Some(0));
    }
    assert_eq!(fs::read(a.join("log.csv")).unwrap(), fs::read(b.join("log.csv")).unwrap());
}

#[test]
fn flags_override_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "trot.cfg", SHORT_TROT);
    let out = dir.path().join("out");
    let res = hrom_sim(&["run", &cfg, "--out", out.to_str().unwrap(), "--mode", "open_loop", "--duration", "0.05"]);
    assert_eq!(res.status.code(), Some(0));
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert_eq!(summary_value(&summary, "mode"), "open_loop");
    assert_eq!(summary_value(&summary, "samples"), "50");
}

#[test]
fn output_dir_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_file");
    let text = format!("sim.duration = 0.01\noutput.dir = {}\n", target.display());
    let cfg = write_cfg(dir.path(), "s.cfg", &text);
    assert_eq!(hrom_sim(&["run", &cfg]).status.code(), Some(0));
    assert!(target.join("log.csv").exists());
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("unknown.cfg", "gait.step_lenght = 0.1\n"),
        ("value.cfg", "sim.dt = fast\n"),
        ("invalid.cfg", "sim.duration = -1\n"),
    ] {
        let cfg = write_cfg(dir.path(), name, text);
        let res = hrom_sim(&["run", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
        assert_eq!(res.status.code(), Some(1), "{name}");
        assert!(String::from_utf8_lossy(&res.stderr).starts_with("error:"));
    }
    let missing = dir.path().join("missing.cfg");
    assert_eq!(hrom_sim(&["run", missing.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(hrom_sim(&["run"]).status.code(), Some(1));
    let cfg = write_cfg(dir.path(), "ok.cfg", "sim.duration = 1\n");
    assert_eq!(hrom_sim(&["run", &cfg, "--duration", "-2"]).status.code(), Some(1));
}

#[test]
fn runtime_error_exits_2_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "nan.cfg", "sim.duration = 0.1\ninit.velocity = NaN, 0, 0\n");
    let res = hrom_sim(&["run", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("step 0") && err.contains("dynamics") && err.contains("v_x"), "{err}");
}

#[test]
fn strict_escalates_convergence_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let text = "controller.mode = mpc\ngait.num_steps = 0\ncontact.ground_height = -1000\ninit.height = 1\n\
                init.roll = 0.1\nmpc.max_iterations = 1\nsim.duration = 0.05\n";
    let cfg = write_cfg(dir.path(), "mpc.cfg", text);
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    let relaxed = hrom_sim(&["run", &cfg, "--out", out]);
    assert_eq!(relaxed.status.code(), Some(0));
    let warnings: usize = summary_value(&String::from_utf8(relaxed.stdout).unwrap(), "mpc_warnings").parse().unwrap();
    assert!(warnings > 0);
    assert_eq!(hrom_sim(&["run", &cfg, "--out", out, "--strict"]).status.code(), Some(3));
}

#[test]
fn gait_emits_parseable_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "g.cfg", "gait.num_steps = 3\ngait.swing_out = 0.02\n");
    let res = hrom_sim(&["gait", &cfg, "--emit-blocks"]);
    assert_eq!(res.status.code(), Some(0));
    let text = String::from_utf8(res.stdout).unwrap();
    let schedule = hrom_sim::blocks::parse_schedule(&text).unwrap();
    assert_eq!(schedule.stages[0].loop_count(), 3);
    assert_eq!(schedule.stages[0].blocks().len(), 2);
}

#[test]
fn shipped_scenarios_parse_and_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            let s = parse_scenario(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(parse_scenario(&render_scenario(&s)).unwrap(), s);
            n += 1;
        }
    }
    assert!(n >= 6);
}
