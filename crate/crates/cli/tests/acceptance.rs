//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use gprox_cli::suite::{self, Mutation, SuiteOptions, INVARIANTS};

struct Line {
    criterion: u8,
    passed: bool,
    summary: String,
}

fn criterion_from_suite(name: &str, criterion: u8, limit: Option<Duration>) -> Line {
    let opts = SuiteOptions {
        filter: Some(name.to_string()),
        ..SuiteOptions::default()
    };
    let start = Instant::now();
    let results = suite::run(&opts);
    let elapsed = start.elapsed();
    let result = results
        .into_iter()
        .find(|r| r.name == name)
        .expect("every invariant is reachable by its own name");
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let mut summary = format!(
        "{name}: {} instances, {} failures, {:.1}s",
        result.instances,
        result.failures,
        elapsed.as_secs_f64()
    );
    if let Some(l) = limit {
        summary.push_str(&format!(" (limit {}s)", l.as_secs()));
    }
    if let Some(w) = &result.first_failure {
        summary.push_str(&format!("; first counterexample {w}"));
    }
    Line {
        criterion,
        passed: result.passed() && in_time,
        summary,
    }
}

fn gprox(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gprox"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

/// Determinism, exit codes and negative controls of the command line.
fn cli_contract() -> Line {
    let mut problems = Vec::new();
    let [z3, s3, nonassoc, nondescending, block_order, too_big] = [
        "z3.json",
        "s3.json",
        "nonassoc.json",
        "nondescending.json",
        "block_order.json",
        "too_big.json",
    ]
    .map(fixture);

    let runs = [
        vec!["suite", "--max-n", "4", "--seed", "7"],
        vec!["suite", "--max-n", "3", "--seed", "7", "--json"],
        vec!["ug", &s3, "--json"],
        vec!["nu", &s3],
        vec!["rat", "tower", "{}", "{0}", "{0,1}"],
    ];
    for args in &runs {
        let first = gprox(args);
        let second = gprox(args);
        if first != second {
            problems.push(format!(
                "output of `{}` differs between runs",
                args.join(" ")
            ));
        }
    }

    let expected: [(Vec<&str>, i32); 8] = [
        (vec!["validate", &z3], 0),
        (vec!["validate", &nonassoc], 2),
        (vec!["validate", &nondescending], 2),
        (vec!["validate", &block_order], 1),
        (vec!["validate", &too_big], 3),
        (vec!["validate", &z3, "--require", "action_continuous"], 1),
        (vec!["rat", "claim", "{0}", "{0,1}"], 2),
        (vec!["rat", "far", "(0,1", "{1}"], 2),
    ];
    for (args, code) in &expected {
        let (got, _) = gprox(args);
        if got != *code {
            problems.push(format!(
                "`{}` exited {got}, expected {code}",
                args.join(" ")
            ));
        }
    }

    for m in Mutation::ALL {
        let (code, out) = gprox(&["suite", "--max-n", "3", "--mutate", m.name()]);
        if code != 1 || !out.contains("counterexample: #") {
            problems.push(format!("mutation {} was not caught", m.name()));
        }
    }

    Line {
        criterion: 11,
        passed: problems.is_empty(),
        summary: if problems.is_empty() {
            format!(
                "cli: {} determinism pairs, {} exit codes, {} mutations caught",
                runs.len(),
                expected.len(),
                Mutation::ALL.len()
            )
        } else {
            format!("cli: {}", problems.join("; "))
        },
    }
}

fn main() {
    let mut lines = Vec::new();
    for (name, criterion, _) in INVARIANTS {
        let limit = match criterion {
            1 => Some(Duration::from_secs(300)),
            6 => Some(Duration::from_secs(120)),
            _ => None,
        };
        let line = criterion_from_suite(name, criterion, limit);
        println!(
            "{} criterion {:>2}  {}",
            verdict(line.passed),
            line.criterion,
            line.summary
        );
        lines.push(line);
    }
    let line = cli_contract();
    println!(
        "{} criterion {:>2}  {}",
        verdict(line.passed),
        line.criterion,
        line.summary
    );
    lines.push(line);

    let failed = lines.iter().filter(|l| !l.passed).count();
    println!(
        "acceptance: {} of {} criteria pass",
        lines.len() - failed,
        lines.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}
