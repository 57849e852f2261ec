use mhdvem::mesh::{build_cube_mesh, write_poly_mesh};
use std::path::Path;
use std::process::{Command, Output};

fn mhdvem(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhdvem")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn voronoi_fixture() -> String {
    format!("{}/../core/tests/fixtures/voro27.pm", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn run_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let o = mhdvem(
        &["run", "--mesh", "cube:2", "--dt", "0.25", "--T", "1", "--manufactured", "--out", "steps.csv"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("steps.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "step,t,picard_iters,increment,div_u,div_B,energy");
    assert_eq!(lines.len(), 5);
    let last: Vec<&str> = lines[4].split(',').collect();
    assert_eq!(last[0], "4");
    assert_eq!(last[1].parse::<f64>().unwrap(), 1.0);
    assert!(last[4].parse::<f64>().unwrap() < 1e-11);
    assert!(stdout(&o).contains("relative errors"));
}

#[test]
fn zero_time_step_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = mhdvem(&["run", "--mesh", "cube:2", "--dt", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dt"), "{}", stderr(&o));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "mesh = cube:1\ndt = 0.5\nT = 1\nout = from_file.csv\n").unwrap();
    let o = mhdvem(&["run", "--config", "run.cfg", "--dt", "0.25"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("from_file.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let bad = mhdvem(&["run", "--config", "missing.cfg"], dir.path());
    assert_eq!(bad.status.code(), Some(3));
    std::fs::write(dir.path().join("bad.cfg"), "viscosity = 3\n").unwrap();
    assert_eq!(mhdvem(&["run", "--config", "bad.cfg"], dir.path()).status.code(), Some(2));
}

#[test]
fn voronoi_file_run_reports_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = format!("file:{}", voronoi_fixture());
    let o = mhdvem(&["run", "--mesh", &mesh, "--dt", "0.5", "--T", "1", "--out", "voro.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("max div u"));
}

#[test]
fn convergence_table_and_rates() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        mhdvem(&["convergence", "--mesh", "cube", "--levels", "2,4", "--dt", "0.25", "--out", "conv.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("conv.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "family,level,h,dt,err_u,err_E,err_B,err_p,div_u,div_B");
    assert_eq!(lines.len(), 3);
    let rows: Vec<Vec<f64>> =
        lines[1..].iter().map(|l| l.split(',').skip(2).map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows[1][1], 0.125);
    for r in &rows {
        assert!(r[6] <= 1e-9 && r[7] <= 1e-9);
    }
    let out = stdout(&o);
    let rate_line = out.lines().find(|l| l.contains("->")).unwrap();
    let printed: f64 = rate_line.split("u ").nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((printed - (rows[0][2] / rows[1][2]).log2()).abs() < 1e-3, "{rate_line}");
    let one = mhdvem(&["convergence", "--mesh", "cube", "--levels", "2"], dir.path());
    assert_eq!(one.status.code(), Some(2));
}

#[test]
fn mesh_info_counts_and_size() {
    let dir = tempfile::tempdir().unwrap();
    let o = mhdvem(&["mesh-info", "cube:4"], dir.path());
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("vertices 125") && out.contains("cells 64"), "{out}");
    let h: f64 = out.lines().find_map(|l| l.strip_prefix("h ")).unwrap().parse().unwrap();
    assert!((h - 3f64.sqrt() / 4.0).abs() < 1e-15);

    let v = mhdvem(&["mesh-info", &voronoi_fixture()], dir.path());
    let header = std::fs::read_to_string(voronoi_fixture()).unwrap();
    let counts: Vec<&str> = header.lines().nth(1).unwrap().split_whitespace().collect();
    let out = stdout(&v);
    assert!(v.status.success());
    for (name, n) in ["vertices", "edges", "faces", "cells"].iter().zip(counts) {
        assert!(out.contains(&format!("{name} {n}\n")), "{name} {n}: {out}");
    }
}

#[test]
fn flipped_face_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = build_cube_mesh::<f64>(2).unwrap();
    let mut text = Vec::new();
    write_poly_mesh(&mesh, &mut text).unwrap();
    let mut lines: Vec<String> = String::from_utf8(text).unwrap().lines().map(str::to_owned).collect();
    // reverse one interior face loop without touching the cell signs
    let face = mesh.face_cells().iter().position(|c| c.len() == 2).unwrap();
    let row = 2 + mesh.num_vertices() + mesh.num_edges() + face;
    let toks: Vec<i64> = lines[row].split_whitespace().map(|t| t.parse().unwrap()).collect();
    let reversed: Vec<String> = toks[1..].iter().rev().map(|e| (-e).to_string()).collect();
    lines[row] = format!("{} {}", toks[0], reversed.join(" "));
    std::fs::write(dir.path().join("flipped.pm"), lines.join("\n") + "\n").unwrap();

    let o = mhdvem(&["mesh-info", "file:flipped.pm"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("violation: cell"), "{}", stdout(&o));
    let r = mhdvem(&["run", "--mesh", "file:flipped.pm"], dir.path());
    assert_eq!(r.status.code(), Some(4));
}

#[test]
fn non_convergence_is_a_solver_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = mhdvem(&["run", "--mesh", "cube:2", "--picard-tol", "1e-30", "--picard-max", "2"], dir.path());
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("Picard"), "{}", stderr(&o));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    for (threads, out) in [("1", "one.csv"), ("4", "four.csv")] {
        let o = mhdvem(&["run", "--mesh", "tet:2", "--dt", "0.25", "--threads", threads, "--out", out], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = std::fs::read(dir.path().join("one.csv")).unwrap();
    let b = std::fs::read(dir.path().join("four.csv")).unwrap();
    assert_eq!(a, b);
    for (threads, out) in [("1", "c1.csv"), ("3", "c3.csv")] {
        let o = mhdvem(
            &["convergence", "--mesh", "tet", "--levels", "1,2", "--threads", threads, "--out", out],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(dir.path().join("c1.csv")).unwrap(), std::fs::read(dir.path().join("c3.csv")).unwrap());
}
