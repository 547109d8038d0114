#![allow(dead_code)]

use std::path::PathBuf;

/// Golden commands: file stem and arguments after the program name.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    (
        "solve_recurrence",
        &[
            "solve",
            "--domain",
            "seq",
            "y[n+2]-5*y[n+1]+6*y[n] = 2^n",
            "--roots",
            "2^1,3^1",
            "--initial",
            "1,2",
        ],
    ),
    (
        "solve_recurrence_json",
        &[
            "solve",
            "--domain",
            "seq",
            "y[n+2]-5*y[n+1]+6*y[n] = 2^n",
            "--roots",
            "2^1,3^1",
            "--initial",
            "1,2",
            "--format",
            "json",
        ],
    ),
    (
        "kernel_ode",
        &["kernel", "--domain", "ode", "--lambda", "2", "--m", "3"],
    ),
    (
        "kernel_ode_json",
        &[
            "kernel", "--domain", "ode", "--lambda", "2", "--m", "3", "--format", "json",
        ],
    ),
    ("check_invariant_seq", &["check-invariant", "--domain", "seq", "n*2^n"]),
    (
        "check_invariant_seq_json",
        &["check-invariant", "--domain", "seq", "n*2^n", "--format", "json"],
    ),
];

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_with_stdin(args: &[&str], input: &str) -> Outcome {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let argv = std::iter::once("polyexp").chain(args.iter().copied());
    let code = polyexp_cli::run(argv, &mut input.as_bytes(), &mut stdout, &mut stderr);
    Outcome {
        code,
        stdout: String::from_utf8(stdout).expect("utf-8 output"),
        stderr: String::from_utf8(stderr).expect("utf-8 output"),
    }
}

pub fn run(args: &[&str]) -> Outcome {
    run_with_stdin(args, "")
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.txt"))
}
