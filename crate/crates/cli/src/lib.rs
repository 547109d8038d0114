//! Command-line front end: parses equations and expressions, runs the
//! solver and the invariant-subspace tools, and prints text or JSON.
//!
//! Exit status is 0 on success, 1 when the input is well formed but the
//! request cannot be met (a non-invariant span passed to `decompose`, an
//! unfactored operator, a failed `verify`), and 2 on parse or usage errors.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polyexp::json::{DecompositionJson, PolyExpJson, SolutionJson};
use polyexp::structure::{check_invariance, closure, decompose, invariance_witness, make_subspace, Decomposition};
use polyexp::syntax::{format_operator_lhs, parse_roots, parse_scalar};
use polyexp::{
    format_polyexp, general_solution, kernel_basis, parse_equation, parse_expression, particular_solution, solve_ivp,
    verify_residual, Error, GaussianRational, OperatorBase, OperatorSpec, PolyExp,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_PARSE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Domain {
    /// Sequences in `n`, operator `S`.
    #[value(alias = "shift")]
    Seq,
    /// Functions of `t`, operator `D`.
    #[value(alias = "derivative")]
    Ode,
}

impl From<Domain> for OperatorBase {
    fn from(d: Domain) -> OperatorBase {
        match d {
            Domain::Seq => OperatorBase::Shift,
            Domain::Ode => OperatorBase::Derivative,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "polyexp",
    version,
    about = "Exact solver for constant-coefficient recurrences and ODEs with polynomial-exponential data"
)]
pub struct Cli {
    /// Sequence (recurrence) or function (ODE) setting; inferred when omitted.
    #[arg(long, global = true, value_enum)]
    pub domain: Option<Domain>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an equation such as "y[n+2]-5*y[n+1]+6*y[n] = 2^n".
    Solve {
        /// The equation; read from stdin when omitted.
        equation: Option<String>,
        /// Roots of the operator polynomial, e.g. "2^1,3^1".
        #[arg(long)]
        roots: Option<String>,
        /// Initial values y_0, y_1, ... or y(0), y'(0), ..., comma separated.
        #[arg(long)]
        initial: Option<String>,
        /// Print only a particular solution (no roots needed).
        #[arg(long, conflicts_with = "initial")]
        particular: bool,
    },
    /// Primary decomposition of the span of invariant generators.
    Decompose {
        /// Generators; one per line on stdin when omitted.
        generators: Vec<String>,
    },
    /// Smallest invariant space containing the generators, decomposed.
    Closure { generators: Vec<String> },
    /// Decide whether the span of the generators is invariant.
    CheckInvariant { generators: Vec<String> },
    /// Basis of ker (Op - lambda)^m.
    Kernel {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        m: usize,
    },
    /// Check that a candidate satisfies an equation exactly.
    Verify {
        equation: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        candidate: String,
    },
}

/// Failure of a command, already classified by exit status.
#[derive(Debug)]
struct Failure {
    error: Box<Error>,
    source: Option<String>,
    /// Output to print before the diagnostic (e.g. a witness report).
    payload: Option<Box<Output>>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Failure {
        Failure {
            error: Box::new(error),
            source: None,
            payload: None,
        }
    }
}

trait WithSource<T> {
    fn source(self, src: &str) -> Result<T, Failure>;
}

impl<T> WithSource<T> for polyexp::Result<T> {
    fn source(self, src: &str) -> Result<T, Failure> {
        self.map_err(|error| Failure {
            error: Box::new(error),
            source: Some(src.to_string()),
            payload: None,
        })
    }
}

#[derive(Debug)]
struct Output {
    text: String,
    json: Value,
}

/// Runs the command line `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let format = cli.format;
    match execute(cli, stdin) {
        Ok(out) => {
            emit(stdout, &out, format);
            EXIT_OK
        }
        Err(f) => {
            if let Some(out) = &f.payload {
                emit(stdout, out, format);
            }
            report(&f, format, stdout, stderr)
        }
    }
}

fn emit(stdout: &mut dyn Write, out: &Output, format: Format) {
    let _ = match format {
        Format::Text => writeln!(stdout, "{}", out.text),
        Format::Json => writeln!(
            stdout,
            "{}",
            serde_json::to_string_pretty(&out.json).expect("JSON values serialize")
        ),
    };
}

fn report(f: &Failure, format: Format, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let (code, kind) = match f.error.as_ref() {
        Error::Parse(_) => (EXIT_PARSE, "parse"),
        _ => (EXIT_DOMAIN, "domain"),
    };
    if format == Format::Json && f.payload.is_none() {
        let mut diag = json!({"error": {"kind": kind, "message": f.error.to_string()}});
        if let Error::Parse(p) = f.error.as_ref() {
            diag["error"]["message"] = json!(p.message);
            diag["error"]["offset"] = json!(p.offset);
            if let Some(h) = &p.hint {
                diag["error"]["hint"] = json!(h);
            }
        }
        let _ = writeln!(
            stdout,
            "{}",
            serde_json::to_string_pretty(&diag).expect("JSON values serialize")
        );
    }
    let _ = writeln!(stderr, "error: {}", f.error);
    if let (Error::Parse(p), Some(src)) = (f.error.as_ref(), &f.source) {
        let _ = writeln!(stderr, "  {src}");
        let col = src.get(..p.offset.min(src.len())).map_or(0, |s| s.chars().count());
        let _ = writeln!(stderr, "  {}^", " ".repeat(col));
    }
    code
}

fn read_stdin(stdin: &mut dyn Read) -> Result<String, Failure> {
    let mut buf = String::new();
    stdin
        .read_to_string(&mut buf)
        .map_err(|e| Error::Domain(format!("cannot read stdin: {e}")))?;
    Ok(buf)
}

fn single_input(arg: Option<String>, stdin: &mut dyn Read) -> Result<String, Failure> {
    let src = match arg {
        Some(s) => s,
        None => read_stdin(stdin)?,
    };
    Ok(src.trim().to_string())
}

fn generator_inputs(args: Vec<String>, stdin: &mut dyn Read) -> Result<Vec<String>, Failure> {
    if !args.is_empty() {
        return Ok(args);
    }
    Ok(read_stdin(stdin)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

/// Parses the generators in the requested domain, or, without one, in the
/// sequence domain unless some generator only makes sense as a function.
fn parse_generators(srcs: &[String], domain: Option<Domain>) -> Result<(Vec<PolyExp>, OperatorBase), Failure> {
    let base = match domain {
        Some(d) => d.into(),
        None => {
            let function_only = srcs.iter().any(|s| {
                matches!(parse_expression(s, OperatorBase::Shift), Err(Error::Parse(_)))
                    && parse_expression(s, OperatorBase::Derivative).is_ok()
            });
            if function_only {
                OperatorBase::Derivative
            } else {
                OperatorBase::Shift
            }
        }
    };
    let gens = srcs
        .iter()
        .map(|s| parse_expression(s, base).source(s))
        .collect::<Result<_, _>>()?;
    Ok((gens, base))
}

fn parse_scalar_list(src: &str) -> Result<Vec<GaussianRational>, Failure> {
    let mut offset = 0;
    let mut out = Vec::new();
    for item in src.split(',') {
        let here = offset;
        offset += item.len() + 1;
        out.push(parse_scalar(item).map_err(|e| match e {
            Error::Parse(p) => Failure {
                error: Box::new(Error::Parse(p.shifted(here))),
                source: Some(src.to_string()),
                payload: None,
            },
            other => other.into(),
        })?);
    }
    Ok(out)
}

fn execute(cli: Cli, stdin: &mut dyn Read) -> Result<Output, Failure> {
    let domain = cli.domain;
    match cli.command {
        Command::Solve {
            equation,
            roots,
            initial,
            particular,
        } => {
            let src = single_input(equation, stdin)?;
            let (mut op, rhs) = parse_equation(&src, domain.map(Into::into)).source(&src)?;
            if let Some(r) = roots {
                op = op.with_roots(parse_roots(&r).source(&r)?)?;
            }
            if particular {
                return solve_particular(&op, &rhs);
            }
            let initial = initial.map(|s| parse_scalar_list(&s)).transpose()?;
            solve(&op, &rhs, initial.as_deref())
        }
        Command::Decompose { generators } => {
            let srcs = generator_inputs(generators, stdin)?;
            let (gens, base) = parse_generators(&srcs, domain)?;
            let span = make_subspace(&gens, base)?;
            match invariance_witness(&span) {
                None => {
                    let d = decompose(&span)?;
                    Ok(decomposition_output(true, span.dim(), &d, None, base))
                }
                Some(w) => {
                    let doc = DecompositionJson::new(
                        false,
                        &Decomposition {
                            components: vec![],
                            is_full: false,
                        },
                        Some(&w),
                        base,
                    );
                    let text = format!(
                        "invariant: false\nwitness: {} maps to {}, outside the span",
                        format_polyexp(&w.element, base),
                        format_polyexp(&w.image, base)
                    );
                    Err(Failure {
                        error: Box::new(Error::NotInvariant),
                        source: None,
                        payload: Some(Box::new(Output {
                            text,
                            json: serde_json::to_value(doc).expect("serializable"),
                        })),
                    })
                }
            }
        }
        Command::Closure { generators } => {
            let srcs = generator_inputs(generators, stdin)?;
            let (gens, base) = parse_generators(&srcs, domain)?;
            let closed = closure(&gens, base)?;
            let d = decompose(&closed)?;
            let mut out = decomposition_output(true, closed.dim(), &d, None, base);
            let basis: Vec<_> = closed.basis().iter().map(|b| format_polyexp(b, base)).collect();
            out.text = format!("basis: {}\n{}", basis.join(", "), out.text);
            out.json["basis"] = serde_json::to_value(
                closed
                    .basis()
                    .iter()
                    .map(|b| PolyExpJson::new(b, base))
                    .collect::<Vec<_>>(),
            )
            .expect("serializable");
            Ok(out)
        }
        Command::CheckInvariant { generators } => {
            let srcs = generator_inputs(generators, stdin)?;
            let (gens, base) = parse_generators(&srcs, domain)?;
            let report = check_invariance(&gens, base)?;
            let dim = report.closure.as_ref().unwrap_or(&report.span).dim();
            Ok(decomposition_output(
                report.invariant,
                dim,
                &report.decomposition,
                report.witness.as_ref(),
                base,
            ))
        }
        Command::Kernel { lambda, m } => {
            let base: OperatorBase = domain.unwrap_or(Domain::Seq).into();
            let value = parse_scalar(&lambda).source(&lambda)?;
            let basis = kernel_basis(&value, m, base)?;
            let op = format!("({} - {value})^{m}", base.operator_symbol());
            let text = format!(
                "ker {op}: {}",
                basis
                    .iter()
                    .map(|b| format_polyexp(b, base))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            let json = json!({
                "base": base,
                "lambda": value,
                "m": m,
                "basis": basis.iter().map(|b| PolyExpJson::new(b, base)).collect::<Vec<_>>(),
            });
            Ok(Output { text, json })
        }
        Command::Verify { equation, candidate } => {
            let src = single_input(equation, stdin)?;
            let (op, rhs) = parse_equation(&src, domain.map(Into::into)).source(&src)?;
            let y = parse_expression(&candidate, op.base()).source(&candidate)?;
            let residual = y.apply_operator(&op).sub(&rhs);
            let verified = verify_residual(&op, &y, &rhs);
            let base = op.base();
            let out = Output {
                text: format!("verified: {verified}\nresidual: {}", format_polyexp(&residual, base)),
                json: json!({"verified": verified, "residual": PolyExpJson::new(&residual, base)}),
            };
            if verified {
                Ok(out)
            } else {
                Err(Failure {
                    error: Box::new(Error::Domain("the candidate does not satisfy the equation".into())),
                    source: None,
                    payload: Some(Box::new(out)),
                })
            }
        }
    }
}

fn decomposition_output(
    invariant: bool,
    dim: usize,
    d: &Decomposition,
    witness: Option<&polyexp::structure::Witness>,
    base: OperatorBase,
) -> Output {
    let mut lines = vec![format!("invariant: {invariant}")];
    if let Some(w) = witness {
        lines.push(format!(
            "witness: {} maps to {}, outside the span",
            format_polyexp(&w.element, base),
            format_polyexp(&w.image, base)
        ));
        lines.push(format!("closure dimension: {dim}"));
    } else {
        lines.push(format!("dimension: {dim}"));
    }
    for c in &d.components {
        let basis: Vec<_> = c.basis.iter().map(|b| format_polyexp(b, base)).collect();
        lines.push(format!(
            "component lambda={} multiplicity={}: {}",
            c.lambda,
            c.multiplicity,
            basis.join(", ")
        ));
    }
    lines.push(format!("full: {}", d.is_full));
    Output {
        text: lines.join("\n"),
        json: serde_json::to_value(DecompositionJson::new(invariant, d, witness, base)).expect("serializable"),
    }
}

fn solve_particular(op: &OperatorSpec, rhs: &PolyExp) -> Result<Output, Failure> {
    let y = particular_solution(op, rhs)?;
    if !verify_residual(op, &y, rhs) {
        return Err(Error::Internal("unverified particular solution".into()).into());
    }
    let base = op.base();
    Ok(Output {
        text: format!(
            "equation: {} = {}\nparticular: {}\nresidual_verified: true",
            format_operator_lhs(op),
            format_polyexp(rhs, base),
            format_polyexp(&y, base)
        ),
        json: json!({"particular": PolyExpJson::new(&y, base), "residual_verified": true}),
    })
}

fn solve(op: &OperatorSpec, rhs: &PolyExp, initial: Option<&[GaussianRational]>) -> Result<Output, Failure> {
    if op.factored().is_none() && op.order() > 0 {
        return Err(Error::Unfactored.into());
    }
    let general = general_solution(op, rhs)?;
    let solution = initial.map(|init| solve_ivp(op, rhs, init)).transpose()?;
    let verified = verify_residual(op, &general.particular, rhs)
        && general.homogeneous_basis.iter().all(|h| h.apply_operator(op).is_zero())
        && solution.as_ref().is_none_or(|y| verify_residual(op, y, rhs));
    if !verified {
        return Err(Error::Internal("unverified solution".into()).into());
    }
    let base = op.base();
    let fmt = |f: &PolyExp| format_polyexp(f, base);
    let homogeneous: Vec<_> = general.homogeneous_basis.iter().map(fmt).collect();
    let mut general_terms = vec![];
    if !general.particular.is_zero() {
        general_terms.push(fmt(&general.particular));
    }
    for (i, h) in homogeneous.iter().enumerate() {
        let wrapped = if h.contains(' ') { format!("({h})") } else { h.clone() };
        general_terms.push(format!("c{}*{wrapped}", i + 1));
    }
    let general_text = if general_terms.is_empty() {
        "0".to_string()
    } else {
        general_terms.join(" + ")
    };
    let mut lines = vec![
        format!("equation: {} = {}", format_operator_lhs(op), fmt(rhs)),
        format!("particular: {}", fmt(&general.particular)),
        format!("homogeneous: {}", homogeneous.join(", ")),
        format!("general: y = {general_text}"),
    ];
    if let Some(y) = &solution {
        lines.push(format!("solution: y = {}", fmt(y)));
    }
    lines.push("residual_verified: true".to_string());
    Ok(Output {
        text: lines.join("\n"),
        json: serde_json::to_value(SolutionJson::new(&general, solution.as_ref())).expect("serializable"),
    })
}
