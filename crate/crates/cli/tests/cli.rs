use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_escatter-entropy"))
        .args(args)
        .env_remove("ESCATTER_THREADS")
        .output()
        .expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bad_config_line_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "command = spinless-sweep\n# note\nenergy_ev 5\n").unwrap();
    let out = bin(&["--config", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        text(&out.stderr).contains("line 3"),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn unknown_key_and_bad_values_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "energy_ev = 5\npacket = 10\n").unwrap();
    let out = bin(&["spinless-sweep", "--config", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("unknown key `packet`"));

    let out = bin(&["spinless-sweep", "--energy-ev", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin(&["vn-compare", "--energy-ev", "5", "--n-grid", "9000"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin(&["spinless-sweep"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    let csv = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        format!(
            "command = spinless-sweep\nenergy-ev = 1\npacket_nm = 50\nout = {}\n",
            csv.display()
        ),
    )
    .unwrap();
    let out = bin(&[
        "--config",
        path_str(&cfg),
        "--energy-ev",
        "100",
        "--k-scale",
        "1.4142135623730951",
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let body = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert!(lines[0].starts_with("# escatter-entropy v0.1.0, config-hash="));
    assert!(lines[1].starts_with("energy_ev,packet_nm,"));
    assert!(lines[1].ends_with(",status"));
    assert_eq!(lines.len(), 3);
    let cols: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(cols[0], "100.0");
    assert_eq!(cols[1], "50.0");
    let s: f64 = cols[8].parse().unwrap();
    assert!((s - 0.742).abs() < 1e-3, "{s}");
    assert_eq!(*cols.last().unwrap(), "ok");
    // summary on stdout when writing a file
    assert!(!text(&out.stdout).trim().is_empty());
}

#[test]
fn failed_rows_exit_3_and_keep_the_rest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = bin(&[
        "spinless-sweep",
        "--energy-list",
        "1e-6,1",
        "--packet-nm",
        "10",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", text(&out.stderr));
    let body = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = body.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains("error:"), "{}", rows[0]);
    assert!(rows[1].ends_with(",ok"), "{}", rows[1]);
    assert!(text(&out.stderr).contains("row 0 failed"));
}

#[test]
fn json_output_is_inferred_from_extension() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("out.json");
    let out = bin(&[
        "postselect-range",
        "--energy-ev",
        "5",
        "--k-scale",
        "1.4142135623730951",
        "--cells",
        "1,2",
        "--out",
        path_str(&json),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["command"], "postselect-range");
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["cells"], 2);
    let ap = rows[1]["s_ap"].as_f64().unwrap();
    assert!((ap - 2.0).abs() < 0.03);
    assert_eq!(rows[1]["status"], "ok");
}

#[test]
fn table_goes_to_stdout_without_out() {
    let out = bin(&["equator", "--delta-theta-mrad", "1"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let body = text(&out.stdout);
    let row = body.lines().nth(2).unwrap();
    assert!(row.contains(",3141,"), "{row}");
    assert!(!text(&out.stderr).trim().is_empty());
}

#[test]
fn config_hash_ignores_output_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let run = |p: &Path, t: &str| {
        let out = bin(&[
            "spin-sweep",
            "--energy-ev",
            "100",
            "--packet-nm",
            "50",
            "--threads",
            t,
            "--out",
            path_str(p),
        ]);
        assert!(out.status.success(), "{}", text(&out.stderr));
        std::fs::read_to_string(p).unwrap()
    };
    let x = run(&a, "1");
    let y = run(&b, "2");
    assert_eq!(x, y);
    let c = dir.path().join("c.csv");
    let out = bin(&[
        "spin-sweep",
        "--energy-ev",
        "100",
        "--packet-nm",
        "60",
        "--out",
        path_str(&c),
    ]);
    assert!(out.status.success());
    let z = std::fs::read_to_string(&c).unwrap();
    assert_ne!(x.lines().next(), z.lines().next());
}
