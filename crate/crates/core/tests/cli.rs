//! End-to-end runs of the `conical` binary.

use conical::geometry::{body_conforming_chart, BodyCurve};
use conical::io::{read_regions, FieldFile, Manifest};
use conical::solver::{freestream_field, Mesh, Solution};
use conical::{FreestreamSpec, IdealGas, PrimitiveState};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn conical(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conical"))
        .args(args)
        .env_remove("CONICAL_THREADS")
        .output()
        .expect("binary runs")
}

fn text(o: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    )
}

/// The bundled circular-cone config with some lines replaced.
fn cone_config(dir: &Path, edits: &[(&str, &str)]) -> PathBuf {
    let mut src = std::fs::read_to_string(bundled("circular_cone.toml")).unwrap();
    for (from, to) in edits {
        assert!(src.contains(from), "config has no '{from}'");
        src = src.replace(from, to);
    }
    let path = dir.join("case.toml");
    std::fs::write(&path, src).unwrap();
    path
}

fn solve(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "solve",
        "--quiet",
        "--config",
        config.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    conical(&args)
}

#[test]
fn bundled_cone_converges_and_writes_everything() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = solve(&bundled("circular_cone.toml"), &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    for f in ["field.txt", "residuals.csv", "regions.csv", "manifest.toml"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let m = Manifest::read(&out.join("manifest.toml")).unwrap();
    assert_eq!(m.run.status, "converged");
    assert!(m.run.final_residual < 1e-4);

    // the converged cone field has both a freestream and a post-shock region
    let c = conical(&["classify", out.join("field.txt").to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0), "{}", text(&c));
    let regions =
        read_regions(std::fs::File::open(out.join("field_regions.csv")).unwrap()).unwrap();
    assert!(regions.iter().any(|r| r.label.as_str() == "hyperbolic"));
    assert!(regions.iter().any(|r| r.label.as_str() == "elliptic"));
}

#[test]
fn every_bundled_config_loads() {
    for name in [
        "circular_cone.toml",
        "elliptic_cone.toml",
        "annulus_freestream.toml",
    ] {
        let cfg = conical::io::RunConfig::load(&bundled(name)).unwrap();
        cfg.build().unwrap();
    }
}

#[test]
fn missing_gas_block_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = cone_config(tmp.path(), &[("[gas]\ngamma = 1.4\n", "")]);
    let o = solve(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("[gas]"), "{}", text(&o));
}

#[test]
fn bad_values_name_their_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = cone_config(tmp.path(), &[("cfl = 0.9", "cfl = 2.0")]);
    let o = solve(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let t = text(&o);
    assert!(t.contains("line 19") && t.contains("cfl"), "{t}");
}

#[test]
fn iteration_limit_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = cone_config(
        tmp.path(),
        &[("max_iterations = 20000", "max_iterations = 1")],
    );
    let out = tmp.path().join("out");
    let o = solve(&cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
    assert_eq!(
        Manifest::read(&out.join("manifest.toml"))
            .unwrap()
            .run
            .status,
        "max-iterations"
    );
}

#[test]
fn divergence_exits_three_and_dumps_the_last_field() {
    // MUSCL with a single forward-Euler stage is linearly unstable; with per-cell
    // steps at CFL 1 the residual blows up within a few hundred iterations
    let tmp = tempfile::tempdir().unwrap();
    let cfg = cone_config(
        tmp.path(),
        &[
            ("n1 = 64\nn2 = 64", "n1 = 32\nn2 = 32"),
            ("cfl = 0.9", "cfl = 1.0\nlocal_time_stepping = true"),
            ("\"first-order\"", "\"muscl-minmod\""),
        ],
    );
    let out = tmp.path().join("out");
    let o = solve(&cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(3), "{}", text(&o));
    assert!(out.join("field_last.txt").is_file());
    let m = Manifest::read(&out.join("manifest.toml")).unwrap();
    assert_eq!(m.run.status, "diverged");
    assert!(m.run.message.unwrap().contains("divergence"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(conical(&["solve"]).status.code(), Some(1));
    assert_eq!(conical(&["bogus"]).status.code(), Some(1));
    assert_eq!(
        conical(&["solve", "--config", "/nonexistent.toml"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(conical(&["--help"]).status.code(), Some(0));
}

fn write_field(path: &Path, mesh: &Mesh, sol: &Solution) {
    FieldFile::from_solution(mesh, sol, &IdealGas::default())
        .unwrap()
        .write(path, conical::io::FieldFormat::Text)
        .unwrap();
}

fn band_mesh() -> Mesh {
    let chart = body_conforming_chart(
        BodyCurve::Circle {
            half_angle: 45f64.to_radians(),
        },
        BodyCurve::Circle {
            half_angle: 70f64.to_radians(),
        },
    )
    .unwrap();
    Mesh::new(Arc::new(chart), 8, 12).unwrap()
}

fn labels(csv: &Path) -> Vec<String> {
    read_regions(std::fs::File::open(csv).unwrap())
        .unwrap()
        .iter()
        .map(|r| r.label.as_str().to_string())
        .collect()
}

#[test]
fn classify_freestream_and_rest_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let gas = IdealGas::default();
    let mesh = band_mesh();

    let fs = FreestreamSpec::from_mach(2.0, 0.0, &gas).unwrap();
    let free = tmp.path().join("free.txt");
    write_field(&free, &mesh, &freestream_field(&mesh, &fs));
    let o = conical(&["classify", free.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let l = labels(&tmp.path().join("free_regions.csv"));
    assert_eq!(l.len(), 96);
    assert!(l.iter().all(|x| x == "hyperbolic"));
    assert!(text(&o).contains("100.00%"));

    let rest = vec![PrimitiveState::new(1.0, 0.0, 0.0, 0.0, 1.8); mesh.n_cells()];
    let still = tmp.path().join("rest.txt");
    write_field(
        &still,
        &mesh,
        &Solution::from_primitives(&mesh, &rest).unwrap(),
    );
    let csv = tmp.path().join("rest_map.csv");
    let o = conical(&[
        "classify",
        still.to_str().unwrap(),
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(labels(&csv).iter().all(|x| x == "elliptic"));
}

#[test]
fn malformed_field_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.txt");
    std::fs::write(&bad, "not a field\n").unwrap();
    let o = conical(&["classify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("malformed field file"), "{}", text(&o));
}

#[test]
fn verify_suites() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = tmp.path().join("summary.csv");
    let o = conical(&["verify", "--summary", summary.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let s = std::fs::read_to_string(&summary).unwrap();
    assert!(s.starts_with("key,value,tolerance,status\n"));
    assert!(s.lines().skip(1).all(|l| l.ends_with(",pass")), "{s}");
    assert!(s.contains("oracle_equivalence") && s.contains("mms_second_order"));

    assert_eq!(conical(&["verify", "--suite", ""]).status.code(), Some(1));
    assert_eq!(
        conical(&["verify", "--suite", "nope"]).status.code(),
        Some(1)
    );

    let o = conical(&["verify", "--suite", "oracle", "--mutate-source"]);
    assert_eq!(o.status.code(), Some(1));
    let t = text(&o);
    assert!(
        t.lines()
            .any(|l| l.starts_with("oracle_equivalence") && l.contains("FAIL")),
        "{t}"
    );
}

#[test]
fn thread_flag_beats_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = cone_config(tmp.path(), &[("n1 = 64\nn2 = 64", "n1 = 16\nn2 = 16")]);
    let run = |dir: &str, flag: Option<&str>| {
        let out = tmp.path().join(dir);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_conical"));
        cmd.args(["solve", "--quiet", "--config", cfg.to_str().unwrap()])
            .args(["--output", out.to_str().unwrap()])
            .env("CONICAL_THREADS", "3");
        if let Some(n) = flag {
            cmd.args(["--threads", n]);
        }
        assert_eq!(cmd.output().unwrap().status.code(), Some(0));
        Manifest::read(&out.join("manifest.toml")).unwrap()
    };
    assert_eq!(run("env", None).run.threads, 3);
    assert_eq!(run("flag", Some("2")).run.threads, 2);
}

#[test]
fn manifest_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = cone_config(tmp.path(), &[("n1 = 64\nn2 = 64", "n1 = 24\nn2 = 20")]);
    let first = tmp.path().join("first");
    assert_eq!(
        solve(&cfg, &first, &["--format", "binary"]).status.code(),
        Some(0)
    );
    assert!(first.join("field.bin").is_file());

    // re-run from nothing but the manifest's config echo
    let m = Manifest::read(&first.join("manifest.toml")).unwrap();
    let again = tmp.path().join("again.toml");
    std::fs::write(&again, m.config.to_toml()).unwrap();
    let second = tmp.path().join("second");
    assert_eq!(solve(&again, &second, &[]).status.code(), Some(0));
    let read = |d: &Path, f: &str| std::fs::read(d.join(f)).unwrap();
    assert_eq!(
        read(&first, "residuals.csv"),
        read(&second, "residuals.csv")
    );
    assert_eq!(read(&first, "field.bin"), read(&second, "field.bin"));
}

#[test]
fn init_from_a_converged_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = cone_config(tmp.path(), &[("n1 = 64\nn2 = 64", "n1 = 16\nn2 = 16")]);
    let first = tmp.path().join("first");
    assert_eq!(solve(&cfg, &first, &[]).status.code(), Some(0));
    let field = first.join("field.txt");
    let second = tmp.path().join("second");
    let o = solve(&cfg, &second, &["--init-from", field.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let a = Manifest::read(&first.join("manifest.toml")).unwrap();
    let b = Manifest::read(&second.join("manifest.toml")).unwrap();
    // the restart begins where the first run stopped
    let total = |r: &[f64; 5]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (ra, rb) = (
        total(&a.run.initial_residual),
        total(&b.run.initial_residual),
    );
    assert!(rb < 2e-4 * ra, "{rb:e} vs {ra:e}");

    // a field from a different mesh is refused
    let other = cone_config(tmp.path(), &[("n1 = 64\nn2 = 64", "n1 = 8\nn2 = 8")]);
    let o = solve(
        &other,
        &tmp.path().join("third"),
        &["--init-from", field.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn snapshots_are_written() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = cone_config(
        tmp.path(),
        &[
            ("n1 = 64\nn2 = 64", "n1 = 8\nn2 = 8"),
            (
                "formats = [\"text\"]",
                "formats = [\"text\"]\nsnapshot_every = 50",
            ),
            ("max_iterations = 20000", "max_iterations = 120"),
            ("threshold = 1e-4", "threshold = 1e-12"),
        ],
    );
    let out = tmp.path().join("out");
    assert_eq!(solve(&cfg, &out, &[]).status.code(), Some(2));
    for it in [50, 100] {
        let f = out.join(format!("snapshot_{it:07}.txt"));
        assert_eq!(FieldFile::read(&f).unwrap().rows.len(), 64);
    }
}
