use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lattice-ans")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn pseudo_bytes(n: usize, seed: u64) -> Vec<u8> {
    let mut x = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    (0..n)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 24) as u8
        })
        .collect()
}

#[test]
fn kmodel_capacity_and_benefit() {
    let o = run(&["capacity", "--model", "k-model:1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("0.694242"), "{out}");
    assert!(out.contains("39%"), "{out}");
}

#[test]
fn config_is_logged() {
    let o = run(&["--seed", "17", "capacity", "--model", "no-111"]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("seed: 17") && err.contains("no-111"), "{err}");
}

#[test]
fn abs_half_adds_constant_framing() {
    let dir = TempDir::new().unwrap();
    let mut overhead = Vec::new();
    for (i, n) in [0usize, 1, 17, 1000].into_iter().enumerate() {
        let input = path(&dir, &format!("in{i}"));
        let enc = path(&dir, &format!("enc{i}"));
        let dec = path(&dir, &format!("dec{i}"));
        fs::write(&input, pseudo_bytes(n, i as u64)).unwrap();
        assert!(run(&["abs", "encode", "--q", "0.5", "-i", &input, "-o", &enc, "--verify"]).status.success());
        overhead.push(fs::metadata(&enc).unwrap().len() as usize - n);
        assert!(run(&["abs", "decode", "-i", &enc, "-o", &dec, "--verify"]).status.success());
        assert_eq!(fs::read(&dec).unwrap(), fs::read(&input).unwrap());
    }
    assert!(overhead.iter().all(|&o| o == 41), "{overhead:?}");
}

#[test]
fn abs_skewed_roundtrip() {
    let dir = TempDir::new().unwrap();
    let (input, enc, dec) = (path(&dir, "in"), path(&dir, "enc"), path(&dir, "dec"));
    fs::write(&input, pseudo_bytes(500, 3)).unwrap();
    for extra in [&["--q", "3/16", "--digit-bits", "4"][..], &["--q", "0.3", "--floor"][..]] {
        let mut args = vec!["abs", "encode", "-i", &input, "-o", &enc, "--verify"];
        args.extend_from_slice(extra);
        assert!(run(&args).status.success());
        assert!(run(&["abs", "decode", "-i", &enc, "-o", &dec]).status.success());
        assert_eq!(fs::read(&dec).unwrap(), fs::read(&input).unwrap());
    }
}

#[test]
fn ans_roundtrip_and_corruption() {
    let dir = TempDir::new().unwrap();
    let (input, enc, dec) = (path(&dir, "in"), path(&dir, "enc"), path(&dir, "dec"));
    let text = b"the quick brown fox jumps over the lazy dog; ".repeat(40);
    fs::write(&input, &text).unwrap();
    for extra in [&[][..], &["--forbidden-eps", "0.05", "--key", "9", "--digit-bits", "3"][..]] {
        let mut args = vec!["ans", "encode", "-i", &input, "-o", &enc, "--verify"];
        args.extend_from_slice(extra);
        assert!(run(&args).status.success());
        assert!(fs::metadata(&enc).unwrap().len() < text.len() as u64 + 1100);
        assert!(run(&["ans", "decode", "-i", &enc, "-o", &dec, "--verify"]).status.success());
        assert_eq!(fs::read(&dec).unwrap(), text);
    }
    let mut bytes = fs::read(&enc).unwrap();
    bytes.truncate(5);
    fs::write(&enc, bytes).unwrap();
    assert_eq!(run(&["ans", "decode", "-i", &enc, "-o", &dec]).status.code(), Some(1));
}

#[test]
fn ans_single_symbol_and_empty_inputs() {
    let dir = TempDir::new().unwrap();
    let (input, enc, dec) = (path(&dir, "in"), path(&dir, "enc"), path(&dir, "dec"));
    for data in [Vec::new(), vec![b'a'; 300]] {
        fs::write(&input, &data).unwrap();
        assert!(run(&["ans", "encode", "-i", &input, "-o", &enc, "--verify"]).status.success());
        assert!(run(&["ans", "decode", "-i", &enc, "-o", &dec]).status.success());
        assert_eq!(fs::read(&dec).unwrap(), data);
    }
}

#[test]
fn strip_roundtrip() {
    let dir = TempDir::new().unwrap();
    let (input, enc, dec) = (path(&dir, "in"), path(&dir, "lat"), path(&dir, "dec"));
    fs::write(&input, pseudo_bytes(300, 5)).unwrap();
    for b in ["cyclic", "zero"] {
        let o = run(&["strip", "encode", "--width", "6", "--boundary", b, "--key", "4", "-i", &input, "-o", &enc, "--verify"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(fs::read_to_string(&enc).unwrap().starts_with("# strip model=hard-square width=6"));
        assert!(run(&["strip", "decode", "-i", &enc, "-o", &dec, "--verify"]).status.success());
        assert_eq!(fs::read(&dec).unwrap(), fs::read(&input).unwrap());
    }
}

#[test]
fn strip_capacity_csv() {
    let o = run(&["--format", "csv", "strip", "capacity", "--width", "4,6"]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "width,boundary,column_symbols,capacity,gap");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("4,cyclic,7,"));
}

#[test]
fn samples_feed_empirical_description() {
    let dir = TempDir::new().unwrap();
    let samples = path(&dir, "s");
    assert!(run(&["--seed", "2", "sample", "--rows", "20", "--cols", "20", "--count", "30", "-o", &samples]).status.success());
    let o = run(&["describe", "empirical", "--input", &samples, "--side", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let prob: f64 = out.lines().find_map(|l| l.strip_prefix("prob = ")).unwrap().parse().unwrap();
    assert!((0.15..0.3).contains(&prob), "{out}");
    assert!(out.contains("ploc_violation"));
}

#[test]
fn exact_description_of_center() {
    let out = stdout(&run(&["describe", "exact", "--side", "3"]));
    // 63 hard-square valuations of a 3×3 square, 16 with the center set
    assert!(out.contains("63") && out.contains(&format!("{:.15}", 16.0 / 63.0)), "{out}");
}

#[test]
fn merw_report_and_path() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "g");
    fs::write(&g, "2\n1 1\n1 0\n").unwrap();
    let out = stdout(&run(&["merw", "--graph", &g, "--path", "0,1,0"]));
    let lambda: f64 = out.lines().find_map(|l| l.strip_prefix("lambda = ")).unwrap().parse().unwrap();
    assert!((lambda - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    assert!(out.contains("path_prob = "));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["--seed", "8", "algo2", "--side", "30", "--trials", "3", "--fit-samples", "8"];
    let a = run(&args);
    let b = run(&["--jobs", "2", "--seed", "8", "algo2", "--side", "30", "--trials", "3", "--fit-samples", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run(&["--seed", "9", "algo2", "--side", "30", "--trials", "3", "--fit-samples", "8"]).stdout);
}

#[test]
fn algo1_reports_loss() {
    let out = stdout(&run(&["algo1", "--side", "64", "--trials", "2"]));
    assert!(out.contains("delta_h_optimal = 0.02174"), "{out}");
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["capacity", "--model", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["abs", "encode", "--q", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["strip", "capacity", "--boundary", "free"]).status.code(), Some(2));
    let missing = Path::new("/nonexistent/graph.txt").to_str().unwrap();
    assert_eq!(run(&["merw", "--graph", missing]).status.code(), Some(1));
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "g");
    fs::write(&g, "2\n0 1\n0 0\n").unwrap();
    assert_eq!(run(&["merw", "--graph", &g]).status.code(), Some(1));
}

/// The published k = 6 benefit is the only row that disagrees.
#[test]
fn report_flags_only_the_known_mismatch() {
    let o = run(&["--format", "csv", "report"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let failing: Vec<&str> = out.lines().filter(|l| l.ends_with(",FAIL")).collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].starts_with("kmodel_benefit_percent_k6,"));
    assert!(out.lines().any(|l| l.starts_with("algorithm2_delta_h_band,") && l.ends_with(",pass")));
}
