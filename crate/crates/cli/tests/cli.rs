use std::process::{Command, Output};

fn msqueeze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msqueeze"))
        .args(args)
        .env_remove("MSQUEEZE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect();
    (header, rows)
}

#[test]
fn fig2_has_expected_columns_and_flat_start() {
    let text = stdout(&msqueeze(&["fig2", "-n", "20", "--points", "4"]));
    let (header, rows) = parse_csv(&text);
    assert_eq!(
        header,
        [
            "chi_t",
            "gain_sum_nonlocal_db",
            "gain_diff_nonlocal_db",
            "gain_local_db",
            "gain_avg_nonlocal_db",
            "mean_spin_1",
            "mean_spin_2"
        ]
    );
    assert_eq!(rows.len(), 4);
    for cell in &rows[0][1..5] {
        assert!(cell.parse::<f64>().unwrap().abs() < 1e-10);
    }
    assert!((rows[0][5].parse::<f64>().unwrap() - 5.0).abs() < 1e-10);
    assert!(!text.contains('\r'));
}

#[test]
fn odd_particle_number_is_a_config_error() {
    let out = msqueeze(&["fig2", "-n", "7"]);
    assert_eq!(out.status.code(), Some(2));
    let out = msqueeze(&["nonlocal-encoding", "-n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fig3_ratio_starts_at_one() {
    let (header, rows) = parse_csv(&stdout(&msqueeze(&["fig3", "--modes", "3,7", "--points", "5"])));
    assert_eq!(header, ["M", "r", "ratio", "approx_small_r", "approx_large_r"]);
    assert_eq!(rows.len(), 10);
    for row in rows.iter().filter(|r| r[1].parse::<f64>().unwrap() == 0.0) {
        assert!((row[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    }
    assert_eq!(rows[0][0], "3");
}

#[test]
fn twin_fock_json_reports_agreement() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&msqueeze(&["twin-fock", "-n", "4,10"]))).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for e in entries {
        let n = e["N"].as_f64().unwrap();
        assert_eq!(e["analytic"].as_f64().unwrap(), n * (n + 2.0) / 2.0);
        assert!(e["relative_deviation"].as_f64().unwrap() < 1e-6);
        assert_eq!(e["moment"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn output_file_and_format_switch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.json");
    let out = msqueeze(&["fig3", "--modes", "2", "--points", "3", "--format", "json", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(v[0]["M"], 2);
}

#[test]
fn seeded_output_is_deterministic() {
    let a = stdout(&msqueeze(&["cv-demo", "--seed", "11"]));
    let b = stdout(&msqueeze(&["cv-demo", "--seed", "11"]));
    assert_eq!(a, b);
    let (_, rows) = parse_csv(&a);
    for row in rows {
        assert!(row[9].parse::<f64>().unwrap() <= 1.0 + 1e-12);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_msqueeze"))
            .args(["fig2", "-n", "20", "--points", "5"])
            .env("MSQUEEZE_THREADS", threads)
            .output()
            .unwrap();
        stdout(&out)
    };
    assert_eq!(run("1"), run("4"));
    for bad in ["0", "many"] {
        let out = Command::new(env!("CARGO_BIN_EXE_msqueeze"))
            .args(["fig3"])
            .env("MSQUEEZE_THREADS", bad)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2));
    }
}

#[test]
fn fast_verify_reports_every_property() {
    let out = msqueeze(&[
        "verify",
        "--random-trials",
        "5",
        "--fig2-points",
        "4",
        "--mc-trials",
        "200",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let props = v["properties"].as_array().unwrap();
    assert!(props.len() >= 11);
    for p in props {
        assert!(!p["checks"].as_array().unwrap().is_empty(), "{}", p["id"]);
    }
    assert_eq!(out.status.success(), v["passed"].as_bool().unwrap());
}
