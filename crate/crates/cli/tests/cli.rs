use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mvno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvno"))
        .args(args)
        .output()
        .expect("run mvno")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn market_json(overrides: &[(&str, f64)]) -> String {
    let mut fields = vec![
        ("q1", 600.0),
        ("q2", 400.0),
        ("p1", 40.0),
        ("p2", 30.0),
        ("c1", 8.0),
        ("c2", 6.0),
        ("ct1", 4.0),
        ("ct2", 3.0),
        ("cf1", 0.0),
        ("cf2", 0.0),
        ("eps", 0.5),
        ("gamma", 0.4),
        ("r0", 10.0),
        ("ct0", 2.0),
        ("cf0", 0.0),
    ];
    for (k, v) in overrides {
        fields.iter_mut().find(|f| f.0 == *k).unwrap().1 = *v;
    }
    let body: Vec<String> = fields.iter().map(|(k, v)| format!("\"{k}\": {v}")).collect();
    format!("{{{}}}", body.join(", "))
}

fn write_config(dir: &Path, name: &str, market: &str, run: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, format!("{{\"market\": {market}, \"run\": {run}}}")).unwrap();
    path.to_str().unwrap().to_string()
}

/// Data rows as maps from column name to value.
fn rows(csv: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| {
            header
                .iter()
                .zip(l.split(','))
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

fn f(row: &std::collections::HashMap<String, String>, col: &str) -> f64 {
    row[col].parse().unwrap()
}

#[test]
fn solve_sequential_reference() {
    let o = mvno(&["solve", "--scenario", "part-part-fs", "--leader", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &rows(&stdout(&o))[0];
    assert!((f(r, "w1") - 29.98693).abs() < 1e-4);
    assert!((f(r, "w2") - 91.29412).abs() < 1e-4);
    assert_eq!(r["p0"], "30");
    assert_eq!(r["boundary"], "true");
    assert_eq!(r["leader"], "1");
}

#[test]
fn solve_simultaneous_infeasible_exits_2() {
    let o = mvno(&["solve", "--scenario", "part-part-ps"]);
    assert_eq!(o.status.code(), Some(2));
    let r = &rows(&stdout(&o))[0];
    assert_eq!(r["feasible"], "false");
    assert_eq!(r["w1"], "");
}

#[test]
fn solve_no_entry() {
    let o = mvno(&["solve", "--scenario", "nonpart-nonpart"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &rows(&stdout(&o))[0];
    assert_eq!(r["r_mno1"], "16800");
    assert_eq!(r["r_mno2"], "8400");
    assert_eq!(r["w1"], "");
    assert_eq!(r["p0"], "");
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad_order = write_config(dir.path(), "a.json", &market_json(&[("p2", 50.0)]), "{}");
    let o = mvno(&["solve", "--config", &bad_order, "--scenario", "part-part-ps"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("p2 <= p1"), "{}", stderr(&o));

    let unknown = write_config(dir.path(), "b.json", &market_json(&[]), "{\"scenaro\": \"x\"}");
    let o = mvno(&["solve", "--config", &unknown]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("scenaro"));

    let margin = write_config(dir.path(), "c.json", &market_json(&[("c1", 39.0)]), "{}");
    let o = mvno(&["solve", "--config", &margin, "--scenario", "part-part-ps"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("h1"));

    for args in [
        vec!["solve"],
        vec!["solve", "--scenario", "part-part"],
        vec!["solve", "--scenario", "part-part-fs", "--leader", "3"],
        vec!["sweep", "--scenario", "part-part-fs", "--sweep", "gamma", "--from", "0", "--to", "1", "--steps", "5"],
        vec!["sweep", "--scenario", "part-part-fs", "--sweep", "r0", "--from", "0", "--to", "1", "--steps", "1"],
        vec!["solve", "--no-such-flag"],
        vec!["verify", "--config", "/no/such/file.json"],
    ] {
        assert_eq!(mvno(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn verify_reference_and_corrupted() {
    let o = mvno(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("PASS part-part-ps no-solution"));
    assert!(!text.contains("FAIL"));

    let o = mvno(&["verify", "--perturb-closed-form", "0.01"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL part-part-fs leader 1 bilevel search"));
}

#[test]
fn verify_interior_market() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.json", &market_json(&[("r0", 45.0)]), "{}");
    let o = mvno(&["verify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS part-part-ps KKT"));
}

#[test]
fn game_summaries() {
    let o = mvno(&["game"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# summary: (Part, Part) is a NE; uniqueness not guaranteed (r0 > r_bar_20)"));

    let dir = tempfile::tempdir().unwrap();
    let low = write_config(dir.path(), "low.json", &market_json(&[("r0", 1.0), ("c1", 2.0), ("ct1", 10.0)]), "{}");
    let o = mvno(&["game", "--config", &low]);
    assert!(stdout(&o).contains("# summary: unique NE: (Part, Part)"), "{}", stdout(&o));

    // the reference market itself at r0 = 1 has the leader pricing below cost
    let reference_low = write_config(dir.path(), "ref.json", &market_json(&[("r0", 1.0)]), "{}");
    let o = mvno(&["game", "--config", &reference_low]);
    let text = stdout(&o);
    assert!(text.contains("# sequential wholesale >= network cost: false"));
    assert!(text.contains("# summary: NE: (NonPart, Part)"), "{text}");
}

#[test]
fn symmetric_game_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let sym = market_json(&[("q1", 500.0), ("q2", 500.0), ("p1", 30.0), ("c1", 6.0), ("ct1", 3.0)]);
    let cfg = write_config(dir.path(), "s.json", &sym, "{}");
    let text = stdout(&mvno(&["game", "--config", &cfg]));
    let cells: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.rsplit(',').take(6).map(String::from).collect())
        .collect();
    // (Part, NonPart) mirrors (NonPart, Part): reversed columns are
    // nash, margin2, margin1, r2, r1, source
    assert_eq!(cells[1][3], cells[2][4]);
    assert_eq!(cells[1][4], cells[2][3]);
}

#[test]
fn gamma_sweep_trends() {
    let o = mvno(&[
        "sweep", "--scenario", "part-nonpart-1", "--sweep", "gamma", "--from", "0", "--to", "0.95", "--steps", "20",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# trend w1: increasing"));
    let rs = rows(&text);
    assert_eq!(rs.len(), 20);
    let scaled: Vec<f64> = rs.iter().map(|r| (1.0 - f(r, "sweep_value")) * f(r, "w1")).collect();
    let tail = &scaled[15..];
    let spread = tail.iter().cloned().fold(f64::MIN, f64::max) - tail.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.05 * scaled[19], "{scaled:?}");
}

#[test]
fn eps_sweep_keeps_prices() {
    for scenario in ["part-nonpart-2", "part-part-fs", "part-part-ps"] {
        let o = mvno(&["sweep", "--scenario", scenario, "--sweep", "eps", "--from", "0.1", "--to", "2", "--steps", "7"]);
        let text = stdout(&o);
        for col in ["w1", "w2", "p0"] {
            let line = format!("# trend {col}: ");
            if let Some(l) = text.lines().find(|l| l.starts_with(&line)) {
                assert!(l.ends_with("constant"), "{scenario} {l}");
            }
        }
        if scenario != "part-part-ps" {
            assert!(text.contains("# trend r_mvno: increasing"), "{text}");
        }
    }
}

#[test]
fn r0_sweep_switches_branch_at_threshold() {
    let o = mvno(&["sweep", "--scenario", "part-part-fs", "--leader", "1", "--sweep", "r0", "--from", "0", "--to", "50", "--steps", "51"]);
    let rs = rows(&stdout(&o));
    for r in &rs {
        let r0 = f(r, "sweep_value");
        if r0 <= 38.0 {
            assert_eq!(r["p0"], "30");
        } else {
            assert!(f(r, "p0") < 30.0);
        }
    }
    let p0: Vec<f64> = rs.iter().map(|r| f(r, "p0")).collect();
    assert!(p0.windows(2).skip(39).all(|w| w[1] < w[0]));
}

#[test]
fn sweep_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = mvno(&[
            "sweep", "--config", "../../configs/gamma_sweep.json", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let x = fs::read(&a).unwrap();
    assert!(!x.is_empty());
    assert_eq!(x, fs::read(&b).unwrap());
    let stdout_run = mvno(&["sweep", "--config", "../../configs/gamma_sweep.json"]).stdout;
    assert_eq!(x, stdout_run);
}
