//! CSV rendering. Numbers are rounded to 12 significant digits and printed
//! with the shortest representation that round-trips, so output is
//! byte-stable across runs and platforms.

use std::io::{self, Write};

use mvno_pricing::{PriceSolution, Thresholds};

pub const SOLUTION_COLUMNS: [&str; 17] = [
    "scenario", "leader", "w1", "w2", "p0", "boundary", "q0", "d1", "d2", "r_mvno", "r_mno1", "r_mno2", "feasible",
    "r_bar_10", "r_bar_20", "r_bar_0", "r_flat_0",
];

pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn solution_record(sol: &PriceSolution, t: &Thresholds) -> Vec<String> {
    let flows = sol.flows.as_ref();
    vec![
        sol.scenario.name().to_string(),
        sol.leader().map(|l| l.to_string()).unwrap_or_default(),
        opt(sol.wholesale[0]),
        opt(sol.wholesale[1]),
        opt(sol.p0),
        sol.boundary.to_string(),
        opt(flows.map(|f| f.q0)),
        opt(flows.map(|f| f.d1)),
        opt(flows.map(|f| f.d2)),
        opt(sol.profit_mvno),
        opt(sol.profit_mno1),
        opt(sol.profit_mno2),
        sol.feasible.to_string(),
        num(t.r_bar_10),
        num(t.r_bar_20),
        num(t.r_bar_0),
        num(t.r_flat_0),
    ]
}

/// Writes records then `# ` comment lines.
pub fn write_table<W: Write>(
    out: W,
    header: &[&str],
    rows: &[Vec<String>],
    comments: &[String],
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    out.flush()
}

/// Shape of a sequence: "constant", "increasing", "non-decreasing",
/// "decreasing", "non-increasing", "mixed", or "n/a" when shorter than two.
pub fn trend(values: &[f64]) -> &'static str {
    if values.len() < 2 {
        return "n/a";
    }
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-12 * scale;
    let (mut up, mut down, mut flat) = (false, false, false);
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d > tol {
            up = true;
        } else if d < -tol {
            down = true;
        } else {
            flat = true;
        }
    }
    match (up, down, flat) {
        (false, false, _) => "constant",
        (true, false, false) => "increasing",
        (true, false, true) => "non-decreasing",
        (false, true, false) => "decreasing",
        (false, true, true) => "non-increasing",
        (true, true, _) => "mixed",
    }
}
