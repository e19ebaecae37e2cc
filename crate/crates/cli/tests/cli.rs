use std::path::Path;
use std::process::Command;

use aasipp_cli::read_csv;

fn write_empty_map(path: &Path, size: usize) {
    let mut text = format!("type octile\nheight {size}\nwidth {size}\nmap\n");
    for _ in 0..size {
        text.push_str(&".".repeat(size));
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

fn aasipp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_aasipp"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn generated_batch_writes_csv_json_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("empty16.map");
    write_empty_map(&map, 16);
    let out = dir.path().join("run");
    let status = aasipp(&[
        "--map",
        map.to_str().unwrap(),
        "--generate",
        "separated",
        "--agents",
        "5",
        "--instances",
        "3",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
        "--dump-trajectories",
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let records = read_csv(std::fs::File::open(dir.path().join("run.csv")).unwrap()).unwrap();
    assert_eq!(records.len(), 6);
    assert!(records
        .iter()
        .all(|r| r.success && r.valid && r.agents == 5));
    assert_eq!(records[2].seed, 12);

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap())
            .unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 6);
    assert_eq!(json["summary"]["common_instances"], 3);

    let dump =
        std::fs::read_to_string(dir.path().join("run_trajectories").join("0_aa.txt")).unwrap();
    assert_eq!(dump.lines().filter(|l| l.starts_with("agent")).count(), 5);
}

#[test]
fn output_is_deterministic_apart_from_time() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("empty20.map");
    write_empty_map(&map, 20);
    let mut tables = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let run = aasipp(&[
            "--map",
            map.to_str().unwrap(),
            "--generate",
            "walk:500",
            "--agents",
            "6",
            "--instances",
            "4",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(run.status.success());
        let mut records =
            read_csv(std::fs::File::open(dir.path().join(format!("{name}.csv"))).unwrap()).unwrap();
        for r in &mut records {
            r.time_s = 0.0;
        }
        tables.push(records);
    }
    assert_eq!(tables[0], tables[1]);
}

#[test]
fn millisecond_timeout_fails_every_run() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("empty64.map");
    write_empty_map(&map, 64);
    let out = dir.path().join("slow");
    let run = aasipp(&[
        "--map",
        map.to_str().unwrap(),
        "--generate",
        "separated",
        "--agents",
        "50",
        "--instances",
        "2",
        "--timeout",
        "0.001",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let records = read_csv(std::fs::File::open(dir.path().join("slow.csv")).unwrap()).unwrap();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| !r.success && r.cost.is_none()));
}

#[test]
fn scenario_files_are_read_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("empty12.map");
    write_empty_map(&map, 12);
    let scen = dir.path().join("three.agents");
    std::fs::write(&scen, "agents 3\n0 0 11 11\n11 0 0 11\n5 0 5 11\n").unwrap();
    let out = dir.path().join("scen");
    let run = aasipp(&[
        "--map",
        map.to_str().unwrap(),
        "--scen",
        scen.to_str().unwrap(),
        "--mode",
        "aa",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let records = read_csv(std::fs::File::open(dir.path().join("scen.csv")).unwrap()).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!((records[0].mode.as_str(), records[0].agents), ("aa", 3));
    assert!(records[0].success && records[0].valid);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("m.map");
    write_empty_map(&map, 8);
    let missing = dir.path().join("missing.map");
    for args in [
        vec![
            "--map",
            missing.to_str().unwrap(),
            "--generate",
            "separated",
            "--agents",
            "2",
        ],
        vec!["--map", map.to_str().unwrap(), "--generate", "separated"],
        vec![
            "--map",
            map.to_str().unwrap(),
            "--generate",
            "spiral",
            "--agents",
            "2",
        ],
        vec![
            "--map",
            map.to_str().unwrap(),
            "--generate",
            "separated",
            "--agents",
            "2",
            "--mode",
            "octile",
        ],
        vec!["--map", map.to_str().unwrap()],
    ] {
        let run = aasipp(&args);
        assert_eq!(run.status.code(), Some(2), "{args:?}");
    }
}
