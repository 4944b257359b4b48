use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_greenrep"))
}

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_problem(dir: &tempfile::TempDir, json: &str) -> PathBuf {
    let p = dir.path().join("problem.json");
    std::fs::write(&p, json).unwrap();
    p
}

fn csv_rows(out: &Output) -> Vec<Vec<f64>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

fn header(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn selftest_detects_injected_rounding_fault() {
    let out = run(&["selftest", "--inject-fault", "rounding"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL interval containment"));
}

#[test]
fn enclose1d_constant_source_brackets_exact_solution() {
    let p = problem("oned_constant.json");
    let out = run(&["enclose1d", p.to_str().unwrap(), "--h", "0.0625"]);
    assert!(out.status.success());
    assert_eq!(header(&out), "x,lower,upper");
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 17);
    for r in &rows[1..16] {
        let exact = r[0] * (1.0 - r[0]) / 2.0;
        assert!(r[2] - r[1] > 0.0);
        assert!(r[1] <= exact && exact <= r[2], "{r:?}");
    }
}

#[test]
fn enclose1d_sweep_gaps_decrease() {
    let p = problem("oned_constant.json");
    let out = run(&["enclose1d", p.to_str().unwrap(), "--sweep"]);
    assert!(out.status.success());
    assert_eq!(header(&out), "h,c,eps,iterations,max_gap");
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[1][4] < w[0][4] && w[1][0] < w[0][0]));
}

#[test]
fn enclose1d_writes_out_and_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, plot) = (dir.path().join("u.csv"), dir.path().join("u.json"));
    let p = problem("oned_jump.json");
    let out = run(&[
        "enclose1d",
        p.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
        "--emit-plot",
        plot.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("x,lower,upper"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&plot).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["x"].as_array().unwrap().len(), 33);
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(&dir, "{\"schema\": 1,");
    assert_eq!(run(&["enclose1d", p.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["enclose2d", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn schema_violations_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    for json in [
        r#"{"schema": 2, "domain": {"type": "interval"}, "source": "1"}"#,
        r#"{"schema": 1, "domain": {"type": "interval"}, "source": "1", "extra": 0}"#,
        r#"{"schema": 1, "domain": {"type": "interval"}, "source": "1 +"}"#,
        r#"{"schema": 1, "domain": {"type": "interval"}, "source": "y"}"#,
        r#"{"schema": 1, "domain": {"type": "interval"}, "source": "1", "oned": {"h": 0.3}}"#,
    ] {
        let p = write_problem(&dir, json);
        let out = run(&["enclose1d", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{json}");
    }
}

#[test]
fn boundary_point_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        &dir,
        r#"{"schema": 1, "domain": {"type": "polygon", "vertices": [[0,0],[1,0],[0,1]]}, "source": "1", "points": [[0.5, 0]]}"#,
    );
    assert_eq!(run(&["enclose2d", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn sign_changing_source_needs_split() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        &dir,
        r#"{"schema": 1, "domain": {"type": "polygon", "vertices": [[0,0],[1,0],[0,1]]}, "source": "x - 0.3", "points": [[0.2, 0.2]]}"#,
    );
    let out = run(&["enclose2d", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("split"));
}

#[test]
fn invalid_split_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        &dir,
        r#"{"schema": 1, "domain": {"type": "polygon", "vertices": [[0,0],[1,0],[0,1]]}, "source": "x - 0.3",
            "split": {"plus": "x", "minus": "0.2"}, "points": [[0.2, 0.2]]}"#,
    );
    assert_eq!(run(&["enclose2d", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn square_f1_row_contains_series_value() {
    let p = problem("square_f1.json");
    let out = run(&["enclose2d", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(header(&out), "point_x,point_y,lower,upper,width,rel_error");
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[0][1]), (0.0, 0.0));
    assert!(rows[0][2] <= 0.073671 && 0.073671 <= rows[0][3], "{:?}", rows[0]);
    assert!(rows[1][2] <= 0.04528 && 0.04529 <= rows[1][3], "{:?}", rows[1]);
}

#[test]
fn l_shape_rows_for_both_points() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot.json");
    let p = problem("lshape_f1.json");
    let out = run(&["enclose2d", p.to_str().unwrap(), "--emit-plot", plot.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 2);
    assert!(rows[0][2] <= 0.1330 && 0.1234 <= rows[0][3]);
    assert!(rows[1][2] <= 0.1034 && 0.09855 <= rows[1][3]);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&plot).unwrap()).unwrap();
    assert_eq!(json["points"].as_array().unwrap().len(), 2);
    assert_eq!(json["domain"].as_array().unwrap().len(), 6);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        &dir,
        r#"{"schema": 1, "domain": {"type": "polygon", "vertices": [[-0.5,-0.5],[0.5,-0.5],[0.5,0.5],[-0.5,0.5]]},
            "source": "1", "points": [[0.1, 0.1], [-0.2, 0.3], [0.1, 0.1]],
            "mfs": {"n": 24}, "quad": {"deg_u": 6, "deg_k": 6, "subdiv": 4, "tol": 1e-10}}"#,
    );
    let one = run(&["enclose2d", p.to_str().unwrap(), "--threads", "1"]);
    let again = run(&["enclose2d", p.to_str().unwrap(), "--threads", "1"]);
    let many = run(&["enclose2d", p.to_str().unwrap(), "--threads", "4"]);
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, again.stdout);
    assert_eq!(one.stdout, many.stdout);
    let rows = csv_rows(&one);
    assert_eq!(rows[0][2..4], rows[2][2..4]);
}
