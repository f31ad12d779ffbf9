use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nptspace::bipartite::Ensemble;
use nptspace::subspace::random_mixture_in_subspace;
use nptspace::{build_subspace, BipartiteDims, ComplexMatrix, DensityMatrix, C64};
use nptspace_cli::MatrixFile;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nptspace"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/paper_3x4.json")
}

fn write_state(dir: &Path, name: &str, rho: &DensityMatrix) -> PathBuf {
    let path = dir.join(name);
    MatrixFile::operator(rho.dims(), rho.matrix().clone())
        .write(&path)
        .unwrap();
    path
}

fn singlet() -> DensityMatrix {
    let dims = BipartiteDims::new(2, 2).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = [
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
        C64::new(-s, 0.0),
        C64::new(0.0, 0.0),
    ];
    DensityMatrix::pure(dims, &v).unwrap()
}

#[test]
fn verify_fixture_reports_six_negatives() {
    let out = run(&["verify", "--in", fixture().to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["negative_count"], 6);
    assert_eq!(report["is_psd"], true);
    let neg: Vec<f64> = report["negative_eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (pair, want) in neg.chunks(2).zip([-0.0204, -0.0159, -0.0105]) {
        assert!((pair[0] - want).abs() < 5e-4 && (pair[1] - want).abs() < 5e-4);
        assert!((pair[0] - pair[1]).abs() < 1e-6);
    }
}

#[test]
fn verify_maximally_mixed_is_ppt() {
    let dir = tempfile::tempdir().unwrap();
    let dims = BipartiteDims::new(3, 4).unwrap();
    let path = write_state(dir.path(), "mixed.json", &DensityMatrix::maximally_mixed(dims));
    let out = run(&["verify", "--in", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["negative_count"], 0);
    assert_eq!(report["negative_eigenvalues"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_perturbed_fixture_fails_psd() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = MatrixFile::read(&fixture()).unwrap();
    // Entry (3,3) is zero; pushing it negative breaks positivity and trace.
    file.matrix[(3, 3)] = C64::new(-0.05, 0.0);
    let path = dir.path().join("bad.json");
    file.write(&path).unwrap();
    let out = run(&["verify", "--in", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["is_psd"], false);
}

#[test]
fn verify_reports_subspace_membership_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(dir.path(), "singlet.json", &singlet());
    let report_path = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--in",
        path.to_str().unwrap(),
        "--subspace",
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("range in S      yes"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(report_path).unwrap()).unwrap();
    assert_eq!(report["range_in_subspace"], true);
    assert!(report["thresholds"]["negativity"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(code(&run(&["verify", "--in", path.to_str().unwrap()])), 2);
    std::fs::write(&path, r#"{"m": 2, "n": 2, "matrix": [[[1, 0]]]}"#).unwrap();
    assert_eq!(code(&run(&["verify", "--in", path.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["verify", "--in", "/definitely/missing.json"])), 2);
    assert_eq!(code(&run(&["verify"])), 2);
}

#[test]
fn subspace_writes_documents() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("s");
    let out = run(&[
        "subspace",
        "--m",
        "3",
        "--n",
        "4",
        "--out",
        out_dir.to_str().unwrap(),
        "--projector",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("dimension 6"));
    let p = MatrixFile::read(&out_dir.join("projector.json")).unwrap();
    assert!((p.matrix.trace().re - 6.0).abs() < 1e-10);
    let gens = MatrixFile::read(&out_dir.join("generators.json")).unwrap();
    assert_eq!((gens.matrix.rows(), gens.matrix.cols()), (6, 12));
    let onb = MatrixFile::read(&out_dir.join("orthonormal.json")).unwrap();
    let gram = onb.matrix.matmul(&onb.matrix.adjoint());
    assert!((&gram - &ComplexMatrix::identity(6)).max_abs() < 1e-12);
}

#[test]
fn subspace_two_by_two_and_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "subspace",
        "--m",
        "2",
        "--n",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("dimension 1"));

    let out = run(&[
        "subspace",
        "--m",
        "1",
        "--n",
        "5",
        "--out",
        dir.path().join("e").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("dimension 0"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));

    assert_eq!(code(&run(&["subspace", "--m", "0", "--n", "2", "--out", "x"])), 2);
}

#[test]
fn subspace_unwritable_path_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("sub");
    let out = run(&["subspace", "--m", "2", "--n", "2", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn construct_direct_two_by_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let out = run(&[
        "construct",
        "--m",
        "2",
        "--n",
        "2",
        "--method",
        "direct",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("d               1.50000"), "{text}");
    assert!(text.contains("negatives       1 "));
    let file = MatrixFile::read(&path).unwrap();
    assert_eq!(file.metadata["converged"], true);
    assert!(file.metadata.contains_key("solver_budgets"));
}

#[test]
fn construct_dual_cone_two_by_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let out = run(&[
        "construct",
        "--m",
        "2",
        "--n",
        "2",
        "--method",
        "dual-cone",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("c               0.500000"), "{text}");
    assert!(text.contains("negatives       1 "));
}

#[test]
fn construct_three_by_four_has_six_negatives() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let out = run(&["construct", "--m", "3", "--n", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("negatives       6 "));
    let out = run(&["verify", "--in", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["negative_count"], 6);
}

#[test]
fn construct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&run(&["construct", "--m", "1", "--n", "3", "--out", p])), 2);
    assert_eq!(
        code(&run(&[
            "construct",
            "--m",
            "2",
            "--n",
            "2",
            "--method",
            "magic",
            "--out",
            p
        ])),
        2
    );
    let out = run(&["construct", "--m", "3", "--n", "3", "--max-iter", "2", "--out", p]);
    assert_eq!(code(&out), 3);
    let partial = MatrixFile::read(&path).unwrap();
    assert_eq!(partial.metadata["converged"], false);
}

#[test]
fn construct_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert_eq!(
            code(&run(&[
                "construct",
                "--m",
                "2",
                "--n",
                "3",
                "--out",
                p.to_str().unwrap()
            ])),
            0
        );
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn witness_on_singlet() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(dir.path(), "singlet.json", &singlet());
    let out = run(&[
        "witness",
        "--in",
        path.to_str().unwrap(),
        "--m",
        "2",
        "--n",
        "2",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let cert: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cert["alpha"], serde_json::json!([0, 0]));
    assert_eq!(cert["beta"], serde_json::json!([1, 1]));
    assert!((cert["determinant"].as_f64().unwrap() + 0.25).abs() < 1e-12);
}

#[test]
fn witness_on_random_mixture_satisfies_identity() {
    let dir = tempfile::tempdir().unwrap();
    let dims = BipartiteDims::new(3, 4).unwrap();
    let basis = build_subspace(dims);
    let ens: Ensemble = random_mixture_in_subspace(&basis, 3, 2024).unwrap();
    let rho = ens.density_matrix();
    let path = write_state(dir.path(), "mix.json", &rho);
    let out = run(&["witness", "--in", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let cert: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let det = cert["determinant"].as_f64().unwrap();
    assert!(det < 0.0);
    // Recompute the 2×2 minor from ρ^Γ directly.
    let pt = rho.partial_transpose();
    let idx = |v: &Value| dims.index(v[0].as_u64().unwrap() as usize, v[1].as_u64().unwrap() as usize);
    let (a, b) = (idx(&cert["alpha"]), idx(&cert["beta"]));
    let direct = (pt[(a, a)] * pt[(b, b)] - pt[(a, b)] * pt[(b, a)]).re;
    assert!((direct - det).abs() < 1e-12);
    let s = &cert["mixture_sum"];
    let sum_sq = s[0].as_f64().unwrap().powi(2) + s[1].as_f64().unwrap().powi(2);
    assert!((det + sum_sq).abs() < 1e-10);
}

#[test]
fn witness_rejects_product_state() {
    let dir = tempfile::tempdir().unwrap();
    let dims = BipartiteDims::new(2, 2).unwrap();
    let e00 = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ];
    let path = write_state(dir.path(), "e00.json", &DensityMatrix::pure(dims, &e00).unwrap());
    let out = run(&["witness", "--in", path.to_str().unwrap(), "--m", "2", "--n", "2"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not supported on the subspace"));
    assert_eq!(code(&run(&["witness", "--in", path.to_str().unwrap(), "--m", "3"])), 2);
}

#[test]
fn stress_suites_pass_and_are_deterministic() {
    let args = [
        "stress", "--suite", "npt", "--m", "3", "--n", "4", "--trials", "200", "--seed", "7", "--json",
    ];
    let a = run(&args);
    assert_eq!(code(&a), 0);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    let b = run(&seq);
    assert_eq!(a.stdout, b.stdout);
    let report: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report["passed"], 200);

    let out = run(&[
        "stress", "--suite", "bound", "--m", "3", "--n", "4", "--trials", "200", "--seed", "7",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("200/200 passed"));

    let out = run(&["stress", "--suite", "npt", "--m", "2", "--n", "2", "--trials", "1"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn stress_usage_errors() {
    assert_eq!(
        code(&run(&[
            "stress", "--suite", "npt", "--m", "1", "--n", "3", "--trials", "5"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "stress", "--suite", "npt", "--m", "2", "--n", "2", "--trials", "0"
        ])),
        2
    );
    assert_eq!(code(&run(&["stress", "--suite", "other", "--m", "2", "--n", "2"])), 2);
}
