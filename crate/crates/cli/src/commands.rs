use std::fs::File;
use std::io::{self, BufWriter, Write};

use mvno_pricing::game::{self, Profile};
use mvno_pricing::grid::map_indexed;
use mvno_pricing::oracle::{self, VerifyOptions};
use mvno_pricing::{solvers, Market, OracleError};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, SweepVar};
use crate::output::{self, num, solution_record, SOLUTION_COLUMNS};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write output: {0}")]
    Write(#[from] io::Error),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// How a command ended, mapped onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Infeasible,
    VerificationFailed,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Infeasible => 2,
            Outcome::VerificationFailed => 3,
        }
    }
}

fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = cfg.market(cfg.params)?;
    let scenario = cfg.require_scenario()?.resolve(&m);
    let sol = solvers::solve(&m, scenario);
    let row = solution_record(&sol, &solvers::thresholds(&m));
    output::write_table(sink(cfg)?, &SOLUTION_COLUMNS, &[row], &[])?;
    Ok(if sol.feasible { Outcome::Ok } else { Outcome::Infeasible })
}

type Series<'a> = dyn Fn(usize) -> Option<f64> + 'a;

pub fn sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = cfg.require_sweep()?;
    let choice = cfg.require_scenario()?;
    let values = spec.values();
    let markets: Vec<Market> = values
        .iter()
        .map(|&v| cfg.market(spec.var.apply(cfg.params, v)))
        .collect::<Result<_, _>>()?;

    let solutions = map_indexed(markets.len(), |k| {
        let m = &markets[k];
        solvers::solve(m, choice.resolve(m))
    });

    let mut header = vec!["sweep_value"];
    header.extend(SOLUTION_COLUMNS);
    let rows: Vec<Vec<String>> = solutions
        .iter()
        .zip(&markets)
        .zip(&values)
        .map(|((sol, m), &v)| {
            let mut row = vec![num(v)];
            row.extend(solution_record(sol, &solvers::thresholds(m)));
            row
        })
        .collect();

    let feasible: Vec<usize> = (0..solutions.len()).filter(|&k| solutions[k].feasible).collect();
    let mut comments = vec![format!(
        "sweep {} from {} to {} in {} steps; feasible points {}/{}",
        spec.var.name(),
        num(spec.from),
        num(spec.to),
        spec.steps,
        feasible.len(),
        solutions.len()
    )];
    let series = |f: &dyn Fn(usize) -> Option<f64>| -> Vec<f64> { feasible.iter().filter_map(|&k| f(k)).collect() };
    let columns: [(&str, &Series); 7] = [
        ("w1", &|k| solutions[k].wholesale[0]),
        ("w2", &|k| solutions[k].wholesale[1]),
        ("p0", &|k| solutions[k].p0),
        ("q0", &|k| solutions[k].flows.map(|f| f.q0)),
        ("r_mvno", &|k| solutions[k].profit_mvno),
        ("r_mno1", &|k| solutions[k].profit_mno1),
        ("r_mno2", &|k| solutions[k].profit_mno2),
    ];
    for (name, f) in columns {
        let v = series(f);
        if !v.is_empty() {
            comments.push(format!("trend {name}: {}", output::trend(&v)));
        }
    }
    if spec.var == SweepVar::Gamma {
        for i in 0..2 {
            let v = series(&|k| solutions[k].wholesale[i].map(|w| (1.0 - values[k]) * w));
            if let Some(last) = v.last() {
                comments.push(format!(
                    "trend (1-gamma)*w{}: {}, last {}",
                    i + 1,
                    output::trend(&v),
                    num(*last)
                ));
            }
        }
    }
    output::write_table(sink(cfg)?, &header, &rows, &comments)?;
    Ok(Outcome::Ok)
}

pub fn game(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = cfg.market(cfg.params)?;
    let leader = cfg.leader.unwrap_or_else(|| game::default_leader(&m));
    let report = game::check_partnership(&m, leader);

    let header = ["profile", "source", "r_mno1", "r_mno2", "margin_mno1", "margin_mno2", "nash"];
    let rows: Vec<Vec<String>> = Profile::ALL
        .iter()
        .map(|&p| {
            let cell = report.matrix.cell(p);
            let margins = report.nash.margins_at(p);
            vec![
                p.to_string(),
                cell.source.map(|s| s.name().to_string()).unwrap_or_default(),
                num(cell.payoffs[0]),
                num(cell.payoffs[1]),
                num(margins[0]),
                num(margins[1]),
                report.nash.is_equilibrium(p).to_string(),
            ]
        })
        .collect();

    let claim = |hyp: bool, holds: bool| match (hyp, holds) {
        (false, _) => "not asserted",
        (true, true) => "holds",
        (true, false) => "VIOLATED",
    };
    let equilibria: Vec<String> = report.nash.equilibria.iter().map(Profile::to_string).collect();
    let mut comments = vec![
        format!("leader: {leader}"),
        format!("equilibria: {}", if equilibria.is_empty() { "none".into() } else { equilibria.join(" ") }),
        format!("summary: {}", report.summary()),
        format!("r0 <= r_bar_0: {}", report.r0_le_r_bar_0),
        format!("r0 <= r_bar_20: {}", report.r0_le_r_bar_20),
        format!("sequential wholesale >= network cost: {}", report.wholesale_above_cost),
        format!("mno2 single-partner wholesale >= network cost: {}", report.single_wholesale2_above_cost),
        format!(
            "(Part, Part) is a NE under (a): {}",
            claim(report.hypothesis_a, report.claim_a_holds)
        ),
        format!(
            "(Part, Part) is the unique NE under (b): {}",
            claim(report.hypothesis_b, report.claim_b_holds)
        ),
    ];
    for l in &report.defection {
        comments.push(format!(
            "defection mno{}: defection when partnering {}, when not {}, margin {}, holds {}",
            l.mno,
            num(l.d_part),
            num(l.d_nonpart),
            num(l.d_nonpart - l.d_part),
            l.holds
        ));
    }
    output::write_table(sink(cfg)?, &header, &rows, &comments)?;
    Ok(Outcome::Ok)
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = cfg.market(cfg.params)?;
    let options = VerifyOptions {
        grid: cfg.grid,
        perturbation: cfg.perturbation,
    };
    let report = oracle::verify_market(&m, &options)?;
    let mut out = sink(cfg)?;
    let mut failed = 0;
    for c in &report.checks {
        if !c.pass {
            failed += 1;
        }
        writeln!(out, "{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name)?;
        for line in c.detail.lines() {
            writeln!(out, "    {line}")?;
        }
    }
    writeln!(out, "# {} checks, {} failed", report.checks.len(), failed)?;
    out.flush()?;
    Ok(if report.pass() {
        Outcome::Ok
    } else {
        Outcome::VerificationFailed
    })
}
