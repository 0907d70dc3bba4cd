use std::path::Path;
use std::process::{Command, Output};

use shapfx_cli::{parse_config, run, CliError, Engine};
use shapfx_core::closed_forms::ThreePointProblem;
use shapfx_core::distributions::discrete_value_function;
use shapfx_core::shapley_exact;

fn shapfx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapfx")).args(args).output().unwrap()
}

fn run_config(dir: &Path, name: &str, json: &str) -> Output {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    shapfx(&["run", path.to_str().unwrap()])
}

fn report_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn floats(v: &serde_json::Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn three_point_report_matches_discrete_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "tp.json",
        r#"{"schema":"shapfx/1","problem":{"kind":"three_point","p":[0.5,0.3,0.2],"y":[0,1,2]}}"#,
    );
    let r = report_json(&out);
    assert_eq!(r["engine"], "closed-form");
    let phi = floats(&r["phi"]);
    let problem = ThreePointProblem::new([0.5, 0.3, 0.2], [0.0, 1.0, 2.0]).unwrap();
    let oracle = shapley_exact(&discrete_value_function(&problem.to_joint().unwrap())).unwrap();
    for j in 0..2 {
        assert!((phi[j] - oracle.phi[j]).abs() < 1e-12);
    }
    let norm: f64 = floats(&r["phi_normalized"]).iter().sum();
    assert!((norm - 1.0).abs() < 1e-9);
    assert!(r.get("se").is_none());
}

#[test]
fn maxexp_report_matches_three_rate_formula() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "mx.json",
        r#"{"schema":"shapfx/1","problem":{"kind":"maxexp","lambda":[1,2,3]}}"#,
    );
    let phi = floats(&report_json(&out)["phi"]);
    let l = [1.0, 2.0, 3.0];
    for j in 0..3 {
        let (a, b, c) = (l[j], l[(j + 1) % 3], l[(j + 2) % 3]);
        let formula = 1.0 / a - 0.5 / (a + b) - 0.5 / (a + c) + 1.0 / (3.0 * (a + b + c));
        assert!((phi[j] - formula).abs() < 1e-14, "j={j}");
    }
}

#[test]
fn near_singular_covariance_exits_with_domain_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "ns.json",
        r#"{"schema":"shapfx/1","problem":{"kind":"gaussian_linear",
            "sigma":[[1,1],[1,1.0000000000001]],"beta":[1,1]}}"#,
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("covariance not full rank"));
}

#[test]
fn config_errors_name_the_field_and_position() {
    let dir = tempfile::tempdir().unwrap();
    for (json, needle) in [
        (r#"{"schema":"shapfx/1","problem":{"kind":"maxexp","lambda":[1],"lamda":[2]}}"#, "lamda"),
        (r#"{"schema":"shapfx/1","problem":{"kind":"maxexp","lambda":[1]},"outptu":{}}"#, "outptu"),
        (r#"{"schema":"shapfx/2","problem":{"kind":"maxexp","lambda":[1]}}"#, "schema"),
        (r#"{"schema":"shapfx/1","problem":{"kind":"maxexp"}}"#, "lambda"),
        (r#"{"schema":"shapfx/1","problem":{"kind":"cubic"}}"#, "cubic"),
        (
            r#"{"schema":"shapfx/1","problem":{"kind":"maxexp","lambda":[1]},"mc":{"n_outer":2,"n_inner":2,"seed":0}}"#,
            "mc",
        ),
    ] {
        let out = run_config(dir.path(), "bad.json", json);
        assert_eq!(out.status.code(), Some(2), "{json}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{err}");
    }
    let out = run_config(dir.path(), "syntax.json", "{\n\"schema\": \"shapfx/1\",\n\"problem\": {\n}");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn capacity_errors_surface_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    let lambda = vec!["1"; 26].join(",");
    let out = run_config(
        dir.path(),
        "cap.json",
        &format!(r#"{{"schema":"shapfx/1","problem":{{"kind":"maxexp","lambda":[{lambda}]}}}}"#),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("capacity exceeded"));
}

fn strip_wall_time(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes)
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_time_seconds\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn reruns_are_byte_identical_apart_from_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    for (name, json) in [
        (
            "g.json",
            r#"{"schema":"shapfx/1","problem":{"kind":"gaussian_linear","mu":[1,2,3],
                "sigma":[[1,0.3,0.1],[0.3,2,0.4],[0.1,0.4,1.5]],"beta0":1,"beta":[1,-2,0.5]}}"#,
        ),
        (
            "mc.json",
            r#"{"schema":"shapfx/1","problem":{"kind":"mc_generic",
                "model":{"family":"gaussian","sigma":[[1,0.5],[0.5,1]]},
                "response":{"form":"exp_linear","beta":[1,0.5]}},
                "mc":{"n_outer":50,"n_inner":20,"seed":11,"value_form":"ecv"}}"#,
        ),
    ] {
        let a = run_config(dir.path(), name, json);
        let b = run_config(dir.path(), name, json);
        assert!(a.status.success() && b.status.success());
        assert_eq!(strip_wall_time(&a.stdout), strip_wall_time(&b.stdout));
    }
}

#[test]
fn csv_report_is_lossless_and_written_to_path() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.csv");
    let json = format!(
        r#"{{"schema":"shapfx/1","problem":{{"kind":"fgm_exponential","theta":0.6,"beta":[2,1]}},
            "output":{{"path":{:?},"format":"csv"}}}}"#,
        out_path.to_str().unwrap()
    );
    let out = run_config(dir.path(), "csv.json", &json);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let report = run(&parse_config(&json).unwrap()).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("variable,phi,phi_normalized,se,sigma2,engine,wall_time_seconds"));
    for (j, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[1].parse::<f64>().unwrap(), report.phi[j]);
        assert_eq!(cells[2].parse::<f64>().unwrap(), report.phi_normalized[j]);
        assert_eq!(cells[3], "");
        assert_eq!(cells[5], "closed-form");
    }
}

#[test]
fn every_kind_dispatches() {
    let configs = [
        (r#"{"kind":"fgm_uniform","theta":1,"beta":[2,1]}"#, Engine::ClosedForm),
        (r#"{"kind":"lognormal2","beta":[2,1],"rho":0.5}"#, Engine::ClosedForm),
        (
            r#"{"kind":"discrete_table","atoms":[{"x":[0,0],"p":0.5,"y":0},{"x":[1,0],"p":0.3,"y":1},{"x":[0,1],"p":0.2,"y":2}]}"#,
            Engine::ExactEnumeration,
        ),
        (
            r#"{"kind":"anova_grid","axes":[{"values":[-1,1]},{"values":[-1,1],"weights":[0.5,0.5]}],"table":[0,-2,-4,6]}"#,
            Engine::ExactEnumeration,
        ),
    ];
    for (problem, engine) in configs {
        let cfg = parse_config(&format!(r#"{{"schema":"shapfx/1","problem":{problem}}}"#)).unwrap();
        let r = run(&cfg).unwrap();
        assert_eq!(r.engine, engine, "{problem}");
        assert!((r.phi_normalized.iter().sum::<f64>() - 1.0).abs() < 1e-9, "{problem}");
    }
    // x₁ + 2x₂ + 3x₁x₂ on the ±1 grid.
    let cfg = parse_config(
        r#"{"schema":"shapfx/1","problem":{"kind":"anova_grid","axes":[{"values":[-1,1]},{"values":[-1,1]}],"table":[0,-2,-4,6]}}"#,
    )
    .unwrap();
    assert_eq!(run(&cfg).unwrap().phi, vec![5.5, 8.5]);
}

#[test]
fn monte_carlo_report_carries_standard_errors() {
    let cfg = parse_config(
        r#"{"schema":"shapfx/1","problem":{"kind":"mc_generic",
            "model":{"family":"independent","margins":["uniform","exponential"]},
            "response":{"form":"linear","beta":[1,1]}},
            "mc":{"n_outer":100,"n_inner":50,"seed":1}}"#,
    )
    .unwrap();
    let r = run(&cfg).unwrap();
    assert_eq!(r.engine, Engine::MonteCarlo);
    let se = r.se.as_ref().unwrap();
    assert!(se.iter().all(|&s| s > 0.0));
    assert!(r.anomalies.as_ref().unwrap().is_empty());
    // φ = (1/12, 1) for independent inputs.
    assert!((r.phi[1] - 1.0).abs() < 4.0 * se[1]);
}

#[test]
fn figure1_command_writes_flagged_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let out = shapfx(&["figure1", "--betas", "8,1;4,1;2,1", "--rho-steps", "99", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|t| t.parse().unwrap()).collect()).collect();
    assert_eq!(csv.lines().next(), Some("beta1,beta2,abs_rho,phi1_over_sigma2"));
    assert_eq!(rows.len(), 3 * 101);
    for chunk in rows.chunks(101) {
        assert_eq!(chunk[100][2], 1.0);
        assert_eq!(chunk[100][3], 0.5);
        assert!(chunk[..100].iter().all(|r| r[2] < 1.0));
    }
    let bad = shapfx(&["figure1", "--betas", "8;1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn selftest_command_passes() {
    let out = shapfx(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn library_errors_map_to_exit_codes() {
    use shapfx_core::Error as E;
    assert_eq!(CliError::Config("x".into()).exit_code(), 2);
    assert_eq!(CliError::Core(E::NotFullRank("x".into())).exit_code(), 4);
    assert_eq!(CliError::Core(E::Singular("x".into())).exit_code(), 4);
    assert_eq!(CliError::Core(E::Domain("x".into())).exit_code(), 4);
}
