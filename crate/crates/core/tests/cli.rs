use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(command: &str, config: &str, dir: &Path) -> Output {
    let cfg = dir.join(format!("{command}.cfg"));
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_ilw-lab"))
        .args([command, cfg.to_str().unwrap(), dir.join("out").to_str().unwrap()])
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_SIM: &str = "L = 128\nn_points = 256\norigin = -96\nt_end = 0.5\ndt = 0.02\ncadence = 5\nwidth = 3\n";

#[test]
fn usage_errors_exit_2() {
    let o = Command::new(env!("CARGO_BIN_EXE_ilw-lab")).arg("simulate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let o = run("bogus", "", dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_key_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("simulate", "t_end = 1\nwobble = 3\n", dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("wobble"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn parse_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("simulate", "# header\nt_end = 1\ndt = fast\n", dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn simulate_writes_tagged_csvs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("simulate", SMALL_SIM, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out");
    let first: Vec<Vec<u8>> = ["trace.csv", "decay.csv", "final_field.csv"]
        .iter()
        .map(|n| fs::read(out.join(n)).unwrap())
        .collect();
    let trace = String::from_utf8(first[0].clone()).unwrap();
    let mut lines = trace.lines();
    assert!(lines.next().unwrap().starts_with("# config_hash="));
    assert_eq!(lines.next().unwrap(), "t,e0,e1,e2,linf,besov,tilbert_half");
    assert!(String::from_utf8_lossy(&first[2]).lines().next().unwrap().contains("config_hash="));

    let o = run("simulate", SMALL_SIM, dir.path());
    assert_eq!(o.status.code(), Some(0));
    for (n, bytes) in ["trace.csv", "decay.csv", "final_field.csv"].iter().zip(&first) {
        assert_eq!(&fs::read(out.join(n)).unwrap(), bytes, "{n} differs between runs");
    }
}

#[test]
fn final_field_can_seed_a_run() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run("simulate", SMALL_SIM, dir.path()).status.code(), Some(0));
    let seed = dir.path().join("seed.csv");
    fs::rename(dir.path().join("out/final_field.csv"), &seed).unwrap();
    let cfg = format!(
        "L = 128\nn_points = 256\norigin = -96\nt_end = 0.2\ndt = 0.02\ndatum = file\ndatum_file = {}\namplitude = 1\n",
        seed.display()
    );
    let o = run("simulate", &cfg, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn identities_pass_on_small_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("identities", "lattice_n = 60\nladder_n = 61\ncube_n = 11\n", dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    for q in ["c_sym3", "b_residual", "ladder d", "ladder r"] {
        assert!(stdout.contains(q), "{stdout}");
    }
    let ladder = fs::read_to_string(dir.path().join("out/ladder.csv")).unwrap();
    assert_eq!(ladder.lines().nth(1).unwrap(), "quantity,coarse,fine,ratio");
    assert_eq!(ladder.lines().count(), 6);
}

#[test]
fn symbols_and_kernel_and_decay() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("symbols", "lattice_n = 5\nkinds = d\nmodel = bo\n", dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let d = fs::read_to_string(dir.path().join("out/symbol_d.csv")).unwrap();
    assert_eq!(d.lines().count(), 2 + 25);

    let o = run("kernel", "times = 2\nj_min = -2\nx_min = -50\nx_max = 10\nhigh = true\n", dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = fs::read_to_string(dir.path().join("out/kernel_summary.csv")).unwrap();
    assert_eq!(s.lines().count(), 2 + 4);
    assert!(s.contains(",high,"));

    let o = run("decay", "L = 1024\nn_points = 2048\norigin = -768\ntimes = 1, 4\n", dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let k = fs::read_to_string(dir.path().join("out/ks_ratio.csv")).unwrap();
    assert_eq!(k.lines().nth(1).unwrap(), "t,r0,r1");
}

#[test]
fn numerical_guards_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("kernel", "times = 1\nj_min = 0\nhigh = true\nxi_max = 100\ndx = 1\n", dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("under-resolved"));

    let o = run("vectorfield", "t_end = 0.2\nstride = 5\nfault = flip_d\n", dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("residual"));
}
