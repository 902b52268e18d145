use std::process::{Command, Output};

fn fhtdiag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fhtdiag")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn jsonl(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn gamma_has_unit_determinant() {
    let o = fhtdiag(&["eval", "gamma", "--lambda", "0.3+0.2i", "--z", "0.4+0.1i", "--format", "jsonl"]);
    assert!(o.status.success());
    let r = &jsonl(&o)[0];
    assert_eq!(r["check_id"], "gamma");
    assert_eq!(r["value"].as_array().unwrap().len(), 4);
    assert!(r["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn shore_values_parse_with_negative_numbers() {
    let o = fhtdiag(&["eval", "resolvent", "--lambda", "-0.2-", "--z", "-0.3", "--x", "-0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = fhtdiag(&["eval", "d", "--lambda", "-0.25", "--z", "0.3+"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn every_quantity_evaluates() {
    for args in [
        vec!["eval", "model", "--z", "0.3+0.2i"],
        vec!["eval", "phi", "--lambda-sq", "0.3", "--side", "l", "--x", "-0.4"],
        vec!["eval", "density", "--lambda-sq", "0.3"],
        vec!["eval", "rho", "--omega", "2"],
        vec!["eval", "rho", "--omega", "2+0.5i"],
        vec!["--bl", "-0.6", "--br", "1.4", "eval", "gamma", "--lambda", "-0.3+", "--z", "0.5-0.5i"],
    ] {
        let o = fhtdiag(&args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn csv_header_and_fields() {
    let o = fhtdiag(&["verify", "--suite", "jumps", "--grid", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rows.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["check_id", "anchor", "inputs", "residual", "tolerance", "pass", "value"]);
    let recs: Vec<csv::StringRecord> = rows.records().map(|r| r.unwrap()).collect();
    // five lambdas, three points on each of two subintervals
    assert_eq!(recs.len(), 30);
    for r in &recs {
        assert_eq!(&r[0], "z-jump");
        assert!(r[3].parse::<f64>().unwrap() <= r[4].parse::<f64>().unwrap());
        assert_eq!(&r[5], "true");
    }
}

#[test]
fn failing_tolerance_sets_the_exit_code() {
    let o = fhtdiag(&["eval", "gamma", "--lambda", "0.3+0.2i", "--z", "0.4+0.1i", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(",false,"));
}

#[test]
fn errors_exit_with_one() {
    let o = fhtdiag(&["eval", "gamma", "--lambda", "0.3", "--z", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("branch cut"));
    let o = fhtdiag(&["--bl", "-0.6", "--br", "1.4", "asymptotics", "sweep"]);
    assert_eq!(o.status.code(), Some(1));
    let o = fhtdiag(&["eval", "gamma", "--lambda", "x", "--z", "2"]);
    assert!(!o.status.success());
}

#[test]
fn sweep_records_carry_the_deviations() {
    let o = fhtdiag(&["asymptotics", "sweep", "--kappa", "6,12", "--format", "jsonl"]);
    assert!(o.status.success());
    let recs = jsonl(&o);
    // eight points, two shores, one step, two checks per step
    assert_eq!(recs.len(), 32);
    for r in &recs {
        let v = r["value"].as_array().unwrap();
        let (d0, d1) = (v[0][0].as_f64().unwrap(), v[1][0].as_f64().unwrap());
        assert!(d1 < d0);
    }
}

#[test]
fn special_suite_is_reproducible_and_written_to_a_file() {
    let dir = std::env::temp_dir().join(format!("fhtdiag-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |name: &str| {
        let p = dir.join(name);
        let o = fhtdiag(&["verify", "--suite", "special", "--draws", "5", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
        std::fs::read_to_string(p).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 5 * 7);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn report_summarizes_one_suite() {
    let o = fhtdiag(&["report", "--suite", "lambda-jumps", "--format", "jsonl", "--threads", "2"]);
    assert!(o.status.success());
    let recs = jsonl(&o);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["check_id"], "lambda-jumps");
    assert!(recs[0]["inputs"].as_str().unwrap().starts_with("checks=23 failed=0"));
}

#[test]
fn annulus_checks() {
    let o = fhtdiag(&["asymptotics", "annulus", "--kappa", "6,9", "--format", "jsonl"]);
    assert!(o.status.success());
    let recs = jsonl(&o);
    let ids: Vec<&str> = recs.iter().map(|r| r["check_id"].as_str().unwrap()).collect();
    assert_eq!(&ids[..4], ["annulus-saddle-angle", "annulus-membership", "annulus-map", "annulus-zero-disc"]);
    // three sectors, two shores, one step, two checks per step
    assert_eq!(recs.len(), 4 + 12);
}

#[test]
fn margin_is_validated() {
    let o = fhtdiag(&["verify", "--suite", "jumps", "--grid", "3", "--margin", "0.6"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fhtdiag(&["verify", "--suite", "jumps", "--grid", "2", "--margin", "0.2", "--format", "jsonl"]);
    assert!(o.status.success());
    let xs: Vec<String> = jsonl(&o).iter().take(4).map(|r| r["inputs"].as_str().unwrap().to_string()).collect();
    assert!(xs[0].ends_with("x=-0.8"), "{xs:?}");
    assert!(xs[2].ends_with("x=0.2"), "{xs:?}");
    assert!(xs[3].ends_with("x=0.8"), "{xs:?}");
}

#[test]
fn tolerance_override_reaches_the_report() {
    let o = fhtdiag(&["report", "--suite", "lambda-jumps", "--tol", "1e-20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("failed=20"));
}
