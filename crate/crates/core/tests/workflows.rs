use std::fs;
use std::path::Path;
use std::process::Command;

use potential_dcm::cli::{parse_config, run_sample, run_train, RunOptions};

const SMALL: &str = "n_interior = 80\nn_per_face = 10\nhidden_widths = [6, 6]\neval_grid = 2\n[adam]\nmax_iters = 20\n[lbfgs]\nmax_iters = 20\n";

fn dcm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dcm")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn eval_grid_two_gives_eight_field_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(SMALL).unwrap();
    cfg.output_dir = dir.path().to_path_buf();
    run_train(&cfg, RunOptions { quiet: true }).unwrap();
    let fields = fs::read_to_string(dir.path().join("fields.csv")).unwrap();
    assert_eq!(fields.lines().count(), 1 + 8);
    let vtk = fs::read_to_string(dir.path().join("fields.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0\n"));
    assert!(vtk.contains("\nPOINT_DATA 8\n"));
}

#[test]
fn identical_runs_give_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    for out in ["a", "b"] {
        let o = dcm(&[
            "train",
            &config,
            "--quiet",
            "--output-dir",
            dir.path().join(out).to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in [
        "convergence.csv",
        "fields.csv",
        "fields.vtk",
        "params.txt",
        "profile.csv",
    ] {
        assert_eq!(
            fs::read(dir.path().join("a").join(name)).unwrap(),
            fs::read(dir.path().join("b").join(name)).unwrap(),
            "{name}"
        );
    }
    let conv = fs::read_to_string(dir.path().join("a/convergence.csv")).unwrap();
    assert_eq!(conv.lines().next().unwrap(), "iter,phase,total,mse_g,mse_d,mse_n");
}

#[test]
fn seed_flag_changes_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    for (out, seed) in [("s1", "1"), ("s2", "2")] {
        let o = dcm(&[
            "train",
            &config,
            "--quiet",
            "--seed",
            seed,
            "--output-dir",
            dir.path().join(out).to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let read = |d: &str| fs::read(dir.path().join(d).join("params.txt")).unwrap();
    assert_ne!(read("s1"), read("s2"));
    let echoed = parse_config(&fs::read_to_string(dir.path().join("s2/config.toml")).unwrap()).unwrap();
    assert_eq!(echoed.seed, 2);
}

#[test]
fn evaluate_subcommand_reads_a_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let train = dir.path().join("train");
    assert!(
        dcm(&["train", &config, "--quiet", "--output-dir", train.to_str().unwrap()])
            .status
            .success()
    );
    let eval = dir.path().join("eval");
    let o = dcm(&[
        "evaluate",
        &config,
        train.join("params.txt").to_str().unwrap(),
        "--output-dir",
        eval.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read(train.join("fields.csv")).unwrap(),
        fs::read(eval.join("fields.csv")).unwrap()
    );
}

#[test]
fn sample_subcommand_lists_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "case = \"case3_cylinder\"\nn_interior = 40\nn_per_face = 5\n",
    );
    let out = dir.path().join("pts");
    let o = dcm(&["sample", &config, "--output-dir", out.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("samples.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,y,z,kind,nx,ny,nz,prescribed");
    assert_eq!(lines.len(), 1 + 40 + 4 * 5);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 8));
    let kinds = ["interior", "dirichlet", "neumann"];
    assert!(lines[1..].iter().all(|l| kinds.contains(&l.split(',').nth(3).unwrap())));

    let mut cfg = parse_config("n_interior = 40\nn_per_face = 5").unwrap();
    cfg.output_dir = dir.path().join("lib");
    assert_eq!(run_sample(&cfg).unwrap(), dir.path().join("lib/samples.csv"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "n_interior = 0\n");
    let o = dcm(&["train", &bad, "--output-dir", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_interior"));

    let o = dcm(&["train", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));

    let blow = write_config(
        dir.path(),
        "n_interior = 40\nn_per_face = 4\nhidden_widths = [4]\n[adam]\nlearning_rate = 1e200\nmax_iters = 50\n",
    );
    let out = dir.path().join("blow");
    let o = dcm(&["train", &blow, "--quiet", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(fs::read_dir(&out).unwrap().count(), 0);

    let good = write_config(dir.path(), SMALL);
    let o = dcm(&["bench", &good, "--vary", "width"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_subcommand_tabulates_variants() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("bench");
    let o = dcm(&[
        "bench",
        &config,
        "--vary",
        "depth",
        "--values",
        "1,2,3",
        "--quiet",
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("bench_depth.csv")).unwrap();
    let labels: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels, ["1", "2", "3"]);
}
