use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wavepath"))
}

fn scenario(name: &str) -> String {
    format!("{}/scenarios/{name}.cfg", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn run_writes_identical_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let o = run(&["run", &scenario("simple"), "--out", d.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ta = std::fs::read(a.join("trajectory.csv")).unwrap();
    assert_eq!(ta, std::fs::read(b.join("trajectory.csv")).unwrap());
    let text = String::from_utf8(ta).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,bump_x,bump_y,delta_x,delta_y,overlap_size,exc_spikes,wavefront_hit"
    );
    let footer = text.lines().last().unwrap();
    assert!(footer.starts_with("# outcome=reached,"), "{footer}");
}

#[test]
fn exhausted_budget_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        &scenario("s_maze"),
        "--max-steps",
        "20",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.contains("# outcome=step_budget_exhausted,steps=20,"));
}

#[test]
fn config_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "{\n  \"grid\": {\"nx\": 41 \"ny\": 41}\n}\n").unwrap();
    let o = run(&["run", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = run(&["run", &scenario("block_heterogeneous"), "--set", "seed=null"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));

    let o = run(&["run", &scenario("simple"), "--set", "start=[0,0]", "--set", "obstacles=[[0,0,1,1]]"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn verify_prints_report_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", &scenario("complex"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "scenario,outcome,steps,path_length,bfs_length,ratio,wavefronts");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "complex");
    assert_eq!(row[1], "reached");
    let ratio: f64 = row[5].parse().unwrap();
    assert!(ratio <= 1.6);
}

#[test]
fn sweep_partitions_output_by_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "sweep",
        &scenario("block_heterogeneous"),
        "--seeds",
        "0..2",
        "--max-steps",
        "30",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 4);
    for s in 0..=2 {
        assert!(dir.path().join(format!("seed_{s}")).join("trajectory.csv").exists());
    }
}

#[test]
fn render_frames_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<_> = ["a", "b"].iter().map(|n| dir.path().join(n)).collect();
    for d in &outs {
        let o = run(&[
            "render",
            &scenario("simple"),
            "--stride",
            "100",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let frame = |d: &Path| std::fs::read(d.join("frame_00100.pgm")).unwrap();
    let f = frame(&outs[0]);
    assert_eq!(f, frame(&outs[1]));
    assert!(f.starts_with(b"P5 41 41 255\n"));
    assert_eq!(f.len(), 13 + 41 * 41);
}

#[test]
fn wave_scenarios_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", &scenario("two_sources"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("wave.csv")).unwrap();
    assert_eq!(csv.lines().count(), 201);
}
