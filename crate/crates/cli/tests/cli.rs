use std::process::{Command, Output};

use serde_json::Value;

fn fcount(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcount"))
        .args(args.split_whitespace())
        .arg("--no-timestamp")
        .env_remove("FCOUNT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header row and data rows, split on commas.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let head = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (head, rows)
}

#[test]
fn pak_with_zero_rho_at_mass_two_is_poisson() {
    let (head, rows) = table(&stdout(&fcount(
        "pmf --family pak --k 1 --rho 0 --mass 2 --m-max 5",
    )));
    assert_eq!(head, ["m", "probability"]);
    assert_eq!(rows.len(), 6);
    let mut fact = 1.0;
    for (m, row) in rows.iter().enumerate() {
        if m > 0 {
            fact *= m as f64;
        }
        let p: f64 = row[1].parse().unwrap();
        let exact = (-2.0f64).exp() * 2f64.powi(m as i32) / fact;
        assert!((p - exact).abs() < 1e-15, "m={m}");
    }
}

#[test]
fn ppk_mean_at_two() {
    let (head, rows) = table(&stdout(&fcount("moments --family ppk --k 3 --lambda 1 --t 2")));
    let col = head.iter().position(|h| h == "mean").unwrap();
    let mean: f64 = rows[0][col].parse().unwrap();
    assert!((mean - 12.0).abs() < 1e-12);
}

#[test]
fn fppk_order_three_simulation() {
    let text = stdout(&fcount(
        "simulate --family fppk --k 3 --lambda 1 --alpha 0.95 --t-end 10 --n-paths 10000 --seed 42",
    ));
    for line in [
        "# family: fppk",
        "# alpha: 0.95",
        "# t_end: 10",
        "# n_paths: 10000",
        "# seed: 42",
    ] {
        assert!(text.contains(line), "missing {line}");
    }
    assert!(text.lines().next().unwrap().starts_with("# fcount "));
    let (head, rows) = table(&text);
    assert_eq!(head, ["path", "N(10)"]);
    assert_eq!(rows.len(), 10_000);
    // E N(10) = k(k+1)/2 * lambda 10^alpha / Γ(1+alpha)
    let exact = 6.0 * 10f64.powf(0.95) / statrs::function::gamma::gamma(1.95);
    let mean = rows.iter().map(|r| r[1].parse::<f64>().unwrap()).sum::<f64>() / 1e4;
    assert!((mean - exact).abs() < 0.05 * exact, "{mean} vs {exact}");
}

#[test]
fn json_mirrors_csv() {
    let args = "moments --family pak --k 2 --rho 0.4 --lambda 1.5 --t 2 --s 1";
    let csv = stdout(&fcount(args));
    let json: Value = serde_json::from_str(&stdout(&fcount(&format!("{args} --format json")))).unwrap();
    let (head, rows) = table(&csv);
    assert_eq!(json["command"], "moments");
    assert_eq!(json["params"]["rho"], "0.4");
    let cols: Vec<&str> = json["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(cols, head);
    for (c, cell) in rows[0].iter().enumerate() {
        let j = &json["rows"][0][c];
        match j {
            Value::Number(n) => assert_eq!(n.as_f64().unwrap(), cell.parse::<f64>().unwrap()),
            Value::String(s) => assert_eq!(s, cell),
            Value::Null => assert!(cell.is_empty()),
            other => panic!("unexpected {other}"),
        }
    }
}

#[test]
fn table_rate_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let rate = dir.path().join("rate.csv");
    std::fs::write(&rate, "time,rate\n0,2\n1,0.5\n").unwrap();
    let out = dir.path().join("pmf.csv");
    let args = format!(
        "pmf --family npak --k 2 --rho 0.4 --rate table:{} --t 2 --m-max 30 --output {}",
        rate.display(),
        out.display()
    );
    let o = fcount(&args);
    assert!(o.status.success() && o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains(&format!("# rate: table:{}", rate.display())));
    let (_, rows) = table(&text);
    // Λ(2) = 2 + 0.5
    let expected = fcount::distributions::pmf_polya_aeppli_order_k(2, 0.4, 2.5, 30).unwrap();
    for (m, row) in rows.iter().enumerate() {
        assert_eq!(row[1].parse::<f64>().unwrap(), expected.get(m));
    }
}

#[test]
fn usage_errors_name_the_parameters() {
    let cases = [
        ("moments --family fppk --k 2 --lambda 1 --t 1", "--alpha"),
        (
            "moments --family ppk --k 2 --lambda 1 --alpha 0.5 --t 1",
            "--alpha",
        ),
        ("moments --k 2 --lambda 1 --t 1", "--family"),
        ("moments --family nppk --lambda 1 --t 1", "--k"),
        (
            "moments --family nppk --k 1 --rate weibull:b=1 --t 1",
            "missing c",
        ),
        ("pmf --family pak --k 1 --rho 0 --mass 2 --t 1", "--mass"),
        ("pmf --family fppk --k 1 --alpha 0.5 --mass 2", "--mass"),
        (
            "simulate --family ppk --k 1 --lambda 1 --t-end 1 --method renewal",
            "--method",
        ),
        (
            "solve --family pak --k 1 --rho 0.2 --lambda 1 --t-end 1",
            "fppk or fpak",
        ),
        ("moments --family zzz --k 1 --t 1", "unknown family"),
    ];
    for (args, needle) in cases {
        let o = fcount(args);
        assert_eq!(o.status.code(), Some(2), "{args}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(needle), "{args}: {err}");
    }
    // clap's own usage errors share the exit code
    assert_eq!(
        fcount("moments --family ppk --k 1 --lambda 1").status.code(),
        Some(2)
    );
}

#[test]
fn numeric_failures_exit_one() {
    let o = fcount("pmf --family ppk --k 2 --lambda 1 --t=-1");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("numeric failure"));
}

#[test]
fn thread_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_fcount"))
        .args(["pmf", "--family", "ppk", "--k", "1", "--lambda", "1", "--t", "1"])
        .env("FCOUNT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn timestamp_only_when_asked() {
    let stamped = Command::new(env!("CARGO_BIN_EXE_fcount"))
        .args(["pmf", "--family", "ppk", "--k", "1", "--lambda", "1", "--t", "1"])
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&stamped.stdout).contains("# generated_unix: "));
    assert!(!stdout(&fcount("pmf --family ppk --k 1 --lambda 1 --t 1")).contains("generated"));
}

#[test]
fn governing_check_reports_small_residual() {
    let (head, rows) = table(&stdout(&fcount(
        "check-governing --family fppk --k 2 --lambda 1 --alpha 0.7 --n-points 2001",
    )));
    let col = head.iter().position(|h| h == "max_residual").unwrap();
    let r: f64 = rows[0][col].parse().unwrap();
    assert!(r < 1e-3, "{r}");
}
