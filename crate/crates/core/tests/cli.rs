use std::fs;
use std::process::Command;

fn entqfi() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entqfi"))
}

#[test]
fn small_run_writes_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = entqfi()
        .args([
            "--states",
            "5",
            "--seed",
            "9",
            "--witness-limit",
            "2",
            "--eps-order",
            "ree=0.001",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "states.csv",
        "census_report.txt",
        "config.json",
        "fig1_concurrence.csv",
        "fig1_negativity.csv",
        "fig1_ree.csv",
    ] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let states = fs::read_to_string(dir.path().join("states.csv")).unwrap();
    assert_eq!(states.lines().count(), 6);
    let report = fs::read_to_string(dir.path().join("census_report.txt")).unwrap();
    assert!(report.contains("# states=5 seed=9"));
    assert!(report.contains("ree=0.001"));
    assert_eq!(report.lines().filter(|l| *l == "total,10").count(), 3);
}

#[test]
fn config_file_replays_a_run() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let ok = entqfi()
        .args([
            "--states",
            "4",
            "--seed",
            "3",
            "--grid-divisor",
            "3",
            "--refine-divisor",
            "5",
            "--out",
        ])
        .arg(first.path())
        .output()
        .unwrap();
    assert!(ok.status.success());
    let ok = entqfi()
        .arg("--config")
        .arg(first.path().join("config.json"))
        .arg("--out")
        .arg(second.path())
        .output()
        .unwrap();
    assert!(ok.status.success());
    for name in ["states.csv", "census_report.txt", "config.json"] {
        assert_eq!(
            fs::read(first.path().join(name)).unwrap(),
            fs::read(second.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn bad_configuration_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["--states", "0"],
        &["--grid-divisor", "6", "--refine-divisor", "4"],
        &["--eps-order", "ree"],
        &["--eps-order", "fidelity=0.1"],
        &["--ree-components", "0"],
    ];
    for args in cases {
        let out = entqfi()
            .args(args)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(!out.status.success(), "{args:?} accepted");
        assert!(
            String::from_utf8_lossy(&out.stderr).contains("error"),
            "{args:?}"
        );
    }
    assert!(!dir.path().join("states.csv").exists());
}

#[test]
fn unwritable_output_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = entqfi()
        .args(["--states", "1", "--out"])
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("file/sub"));
}
