use std::path::Path;
use std::process::{Command, Output};

fn itc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itc")).args(args).output().unwrap()
}

fn read(prefix: &Path, suffix: &str) -> String {
    std::fs::read_to_string(format!("{}{suffix}", prefix.display())).unwrap()
}

#[test]
fn single_vector_finds_the_disk_center() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("disk");
    let out = itc(&[
        "cluster", "--synth", "disk:8@64x64", "--method", "itc-lattice", "--m", "1", "--seed", "7",
        "--out-prefix", prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let codebook = read(&prefix, "-codebook.csv");
    let mut lines = codebook.lines();
    assert_eq!(lines.next(), Some("k,u,v"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "0");
    assert!(row[1].split('.').nth(1).unwrap().len() == 6);
    let (u, v): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
    assert!(((u - 32.0).powi(2) + (v - 32.0).powi(2)).sqrt() <= 1.0, "({u}, {v})");

    assert!(read(&prefix, "-trace.csv").starts_with("iter,seconds,d_cs\n0,"));
    assert!(std::fs::read(format!("{}-labels.pgm", prefix.display())).unwrap().starts_with(b"P5\n64 64\n255\n"));
    assert!(std::fs::read(format!("{}-density.pgm", prefix.display())).unwrap().starts_with(b"P5\n64 64\n255\n"));
}

#[test]
fn repeated_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let prefix = dir.path().join(name);
        let out = itc(&[
            "cluster", "--synth", "ring:20:12@64x64", "--method", "itc-lattice", "--m", "9", "--seed", "5",
            "--out-prefix", prefix.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        prefix
    };
    let (a, b) = (run("a"), run("b"));
    for suffix in ["-codebook.csv", "-labels.pgm", "-density.pgm"] {
        assert_eq!(
            std::fs::read(format!("{}{suffix}", a.display())).unwrap(),
            std::fs::read(format!("{}{suffix}", b.display())).unwrap()
        );
    }
}

#[test]
fn exit_codes_by_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("x");
    let p = prefix.to_str().unwrap();
    let code = |args: &[&str]| itc(args).status.code();

    assert_eq!(code(&["cluster", "--synth", "disk:8@64x64", "--m", "0", "--out-prefix", p]), Some(1));
    assert_eq!(code(&["cluster", "--synth", "disk:8@64x64", "--m", "1"]), Some(1));
    assert_eq!(code(&["cluster", "--synth", "disk:40@64x64", "--m", "2", "--out-prefix", p]), Some(1));
    assert_eq!(
        code(&["cluster", "--synth", "disk:8@64x64", "--m", "2", "--method", "kmeans", "--weighted", "chamfer", "--out-prefix", p]),
        Some(1)
    );
    assert_eq!(code(&["cluster", "--synth", "disk:2@16x16", "--m", "50", "--out-prefix", p]), Some(1));

    let missing = dir.path().join("missing.pbm");
    assert_eq!(code(&["cluster", "--input", missing.to_str().unwrap(), "--m", "2", "--out-prefix", p]), Some(2));
    let blank = dir.path().join("blank.pbm");
    std::fs::write(&blank, b"P1\n3 1\n0 0 0\n").unwrap();
    assert_eq!(code(&["cluster", "--input", blank.to_str().unwrap(), "--m", "1", "--out-prefix", p]), Some(2));

    // the reference update strands a vector on this disk
    assert_eq!(
        code(&["cluster", "--synth", "disk:40@128x128", "--method", "itc-ref", "--m", "30", "--out-prefix", p]),
        Some(3)
    );
}

#[test]
fn bench_writes_one_row_per_repetition() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("bench.csv");
    let out = itc(&[
        "bench", "--shapes", "disk:6@32x32,bar:20:3@32x16", "--m", "2,4", "--methods", "itc-lattice,itc-ref,kmeans",
        "--max-iter", "5", "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("shape,n,m,method,rep,iterations,total_seconds,seconds_per_iter"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 3 * 10);
    for method in ["itc-lattice", "itc-ref", "kmeans"] {
        assert_eq!(rows.iter().filter(|r| r[3] == method).count(), 40);
    }
    assert!(rows.iter().all(|r| r[7].parse::<f64>().unwrap() > 0.0));
    assert_eq!(rows[0][1], "113");
}
