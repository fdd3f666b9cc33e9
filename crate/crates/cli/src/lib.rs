// SPDX-License-Identifier: Apache-2.0

//! `psadf` command dispatch. [`run`] returns the process exit code:
//! 0 success, 1 check mismatch, 2 input error (file, syntax, incomplete
//! point), 3 analysis error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use psadf_core::check::{check_equivalence, Mismatch};
use psadf_core::graph::{bind, repetition_vector, PsadfGraph};
use psadf_core::maxplus::{build_mpag, mcm, MaxPlusMatrix, MaxPlusValue};
use psadf_core::model::{self, Model};
use psadf_core::paramopt::{worstcase_throughput, Options, WorstCase};
use psadf_core::rational::{to_decimal, to_display};
use psadf_core::report::{self, Report};
use psadf_core::sdf::{extract_numeric_matrix, sadf_worstcase_matrix};
use psadf_core::symbolic::{extract_graph, regions_containing, SymbolicMatrix};
use psadf_core::{Error, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ANALYSIS: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "psadf",
    version,
    about = "Worst-case throughput of SDF, SADF and parametric SADF models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Worst-case throughput of any model kind
    Throughput {
        file: PathBuf,
        /// Write the full JSON report here
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write a detailed text report here
        #[arg(long)]
        report: Option<PathBuf>,
        /// Enumerate every lattice point instead of branch and bound
        #[arg(long)]
        no_prune: bool,
    },
    /// Symbolic matrices and regions of a parametric model
    Extract {
        file: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Concrete matrix and throughput at one parameter point
    Evaluate {
        file: PathBuf,
        /// Assignments such as p=10,q=10,s=100,ci=1
        #[arg(long)]
        point: String,
    },
    /// Compare symbolic matrices with simulation at sampled points
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

type Outcome = Result<i32, Failure>;

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn analysis(e: Error) -> Failure {
    let code = match e {
        Error::Parse { .. } => EXIT_INPUT,
        _ => EXIT_ANALYSIS,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn load(path: &Path) -> Result<Model, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    model::parse(&text).map_err(|e| match e {
        Error::Parse { line, message } => input(format!("{}:{line}: {message}", path.display())),
        other => analysis(other),
    })
}

fn require_psadf(m: Model) -> Result<PsadfGraph, Failure> {
    match m {
        Model::Psadf(g) => Ok(g),
        other => Err(Failure {
            code: EXIT_ANALYSIS,
            message: format!("not a psadf model (found {})", other.kind()),
        }),
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    std::fs::write(path, body).map_err(|e| Failure {
        code: EXIT_ANALYSIS,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn write_json(path: &Path, r: &Report) -> Result<(), Failure> {
    let body = serde_json::to_string_pretty(r).expect("report serialises");
    write_file(path, &(body + "\n"))
}

/// Column-aligned rendering of a labelled matrix.
pub fn format_cells(labels: &[String], cells: &[Vec<String>]) -> String {
    let width = cells.iter().flatten().map(|s| s.len()).max().unwrap_or(1);
    let mut out = String::new();
    for (l, row) in labels.iter().zip(cells) {
        let parts: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
        let _ = writeln!(out, "  {l}' = [ {} ]", parts.join("  "));
    }
    out
}

fn format_matrix(m: &MaxPlusMatrix) -> String {
    let cells: Vec<Vec<String>> = m
        .rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| match v {
                    MaxPlusValue::NegInf => "-inf".to_string(),
                    MaxPlusValue::Finite(x) => to_display(x),
                })
                .collect()
        })
        .collect();
    format_cells(m.labels(), &cells)
}

fn throughput_line(tp: &Rational) -> String {
    format!("throughput = {} ({})", to_display(tp), to_decimal(tp))
}

/// λ, critical cycle and throughput of a concrete matrix.
fn cycle_summary(m: &MaxPlusMatrix) -> Result<(Rational, Vec<String>, report::AnalysisReport), Failure> {
    let g = build_mpag(m);
    let (lambda, cycle) = mcm(&g);
    let lambda = match lambda {
        MaxPlusValue::Finite(l) if l > Rational::from_integer(0.into()) => l,
        MaxPlusValue::Finite(l) => {
            return Err(analysis(Error::InvalidGraph(format!(
                "maximum cycle mean {} is not positive",
                to_display(&l)
            ))))
        }
        MaxPlusValue::NegInf => return Err(analysis(Error::NoCycle)),
    };
    let labels: Vec<String> = cycle.iter().map(|&i| m.labels()[i].clone()).collect();
    let a = report::analysis(m, &g, &lambda, &labels);
    Ok((lambda, labels, a))
}

fn region_heading(i: usize, m: &SymbolicMatrix) -> String {
    let lines = m.region.conflict_lines();
    if lines.is_empty() {
        format!("region {}: whole parameter space", i + 1)
    } else {
        format!("region {}: {}", i + 1, lines.join(", "))
    }
}

fn worstcase_text(g: &PsadfGraph, w: &WorstCase, detailed: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {} (psadf), {} tokens", g.name, g.token_count());
    let _ = writeln!(out, "repetition vector {}", w.repetition);
    let _ = writeln!(out, "schedule {}", w.schedule);
    for (i, r) in w.regions.iter().enumerate() {
        let _ = writeln!(out, "{}", region_heading(i, &r.symbolic));
        out.push_str(&r.symbolic.to_string());
        if detailed {
            let _ = writeln!(out, "  maxima:");
            for e in &r.maxima.entries {
                let at: Vec<String> = e
                    .max
                    .argmax
                    .iter()
                    .map(|(k, v)| format!("{k}={}", to_display(v)))
                    .collect();
                let _ = writeln!(
                    out,
                    "    ({},{}) {} = {} at {}",
                    e.row + 1,
                    e.col + 1,
                    e.polynomial,
                    to_display(&e.max.value),
                    at.join(",")
                );
            }
        }
    }
    let _ = writeln!(out, "worst-case matrix:");
    out.push_str(&format_matrix(&w.combined));
    let _ = writeln!(out, "lambda = {}", to_display(&w.lambda));
    let _ = writeln!(out, "critical cycle: {}", w.critical_cycle.join(" -> "));
    let _ = writeln!(out, "{}", throughput_line(&w.throughput));
    out
}

fn cmd_throughput(
    file: &Path,
    json: Option<&Path>,
    report_path: Option<&Path>,
    no_prune: bool,
    out: &mut dyn Write,
) -> Outcome {
    let m = load(file)?;
    let (text, rep) = match &m {
        Model::Sdf(g) => {
            let mat = extract_numeric_matrix(g).map_err(analysis)?;
            let (lambda, cycle, a) = cycle_summary(&mat)?;
            let mut t = String::new();
            let _ = writeln!(t, "model {} (sdf), {} tokens", g.name, g.token_count());
            let _ = writeln!(t, "matrix:");
            t.push_str(&format_matrix(&mat));
            let _ = writeln!(t, "lambda = {}", to_display(&lambda));
            let _ = writeln!(t, "critical cycle: {}", cycle.join(" -> "));
            let tp = Rational::from_integer(1.into()) / &lambda;
            let _ = writeln!(t, "{}", throughput_line(&tp));
            let rep = report::concrete_report(&m, &[], &[], a, g.token_labels());
            (t.clone(), rep)
        }
        Model::Sadf { name, set } => {
            let s = sadf_worstcase_matrix(set).map_err(analysis)?;
            let (lambda, cycle, a) = cycle_summary(&s.matrix)?;
            let mut t = String::new();
            let _ = writeln!(t, "model {name} (sadf), {} scenarios", set.scenarios.len());
            for (n, x) in &s.scenario_matrices {
                let _ = writeln!(t, "scenario {n}:");
                t.push_str(&format_matrix(x));
            }
            for d in &s.diagnostics {
                let _ = writeln!(t, "note: {d}");
            }
            let _ = writeln!(t, "worst-case matrix:");
            t.push_str(&format_matrix(&s.matrix));
            let _ = writeln!(t, "lambda = {}", to_display(&lambda));
            let _ = writeln!(t, "critical cycle: {}", cycle.join(" -> "));
            let tp = Rational::from_integer(1.into()) / &lambda;
            let _ = writeln!(t, "{}", throughput_line(&tp));
            let labels = s.matrix.labels().to_vec();
            let rep = report::concrete_report(&m, &s.scenario_matrices, &s.diagnostics, a, labels);
            (t, rep)
        }
        Model::Psadf(g) => {
            let w = worstcase_throughput(g, Options { prune: !no_prune }).map_err(analysis)?;
            if let Some(p) = report_path {
                write_file(p, &worstcase_text(g, &w, true))?;
            }
            (worstcase_text(g, &w, false), report::worstcase_report(g, &w))
        }
    };
    if let (Some(p), false) = (report_path, matches!(m, Model::Psadf(_))) {
        write_file(p, &text)?;
    }
    if let Some(p) = json {
        write_json(p, &rep)?;
    }
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

fn cmd_extract(file: &Path, json: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let g = require_psadf(load(file)?)?;
    let rv = repetition_vector(&g).map_err(analysis)?;
    let (schedule, ms) = extract_graph(&g).map_err(analysis)?;
    let mut t = String::new();
    let _ = writeln!(t, "model {} (psadf), {} tokens", g.name, g.token_count());
    let _ = writeln!(t, "repetition vector {rv}");
    let _ = writeln!(t, "schedule {schedule}");
    let _ = writeln!(t, "{} region(s)", ms.len());
    for (i, m) in ms.iter().enumerate() {
        let _ = writeln!(t, "{}", region_heading(i, m));
        t.push_str(&m.to_string());
    }
    if let Some(p) = json {
        write_json(p, &report::extract_report(&g, &rv, &schedule, &ms))?;
    }
    let _ = out.write_all(t.as_bytes());
    Ok(EXIT_OK)
}

fn cmd_evaluate(file: &Path, point: &str, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let g = require_psadf(load(file)?)?;
    let mut pt = model::parse_point(point).map_err(|e| match e {
        Error::Parse { message, .. } => input(format!("--point: {message}")),
        other => input(other.to_string()),
    })?;
    let missing = model::complete_point(&g, &mut pt);
    if !missing.is_empty() {
        return Err(input(format!("--point leaves {} unassigned", missing.join(", "))));
    }
    let b = bind(&g, &pt).map_err(|e| match e {
        Error::Binding(m) => input(m),
        other => analysis(other),
    })?;
    for w in &b.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let mat = extract_numeric_matrix(&b.graph).map_err(analysis)?;
    let (lambda, cycle, _) = cycle_summary(&mat)?;
    let (_, ms) = extract_graph(&g).map_err(analysis)?;
    let inside = regions_containing(&ms, &pt).map_err(analysis)?;
    let mut t = String::new();
    let shown: Vec<String> = pt.iter().map(|(k, v)| format!("{k}={}", to_display(v))).collect();
    let _ = writeln!(t, "point {}", shown.join(","));
    let _ = writeln!(t, "matrix:");
    t.push_str(&format_matrix(&mat));
    if inside.is_empty() {
        let _ = writeln!(t, "regions: none (point outside the parameter space)");
    } else {
        for i in &inside {
            let _ = writeln!(t, "in {}", region_heading(*i, &ms[*i]));
        }
    }
    let _ = writeln!(t, "lambda = {}", to_display(&lambda));
    let _ = writeln!(t, "critical cycle: {}", cycle.join(" -> "));
    let tp = Rational::from_integer(1.into()) / &lambda;
    let _ = writeln!(t, "{}", throughput_line(&tp));
    let _ = out.write_all(t.as_bytes());
    Ok(EXIT_OK)
}

fn describe_mismatch(m: &Mismatch, labels: &[String]) -> String {
    let shown: Vec<String> = m.point.iter().map(|(k, v)| format!("{k}={}", to_display(v))).collect();
    let mut t = format!("counterexample at {}\n", shown.join(","));
    match m.region {
        None => t.push_str("  no region contains the point\n"),
        Some(r) => {
            for (i, j, s, n) in &m.entries {
                let show = |v: &MaxPlusValue| match v {
                    MaxPlusValue::NegInf => "-inf".to_string(),
                    MaxPlusValue::Finite(x) => to_display(x),
                };
                let _ = writeln!(
                    t,
                    "  region {} entry ({}, {}) = {}, simulation gives {}",
                    r + 1,
                    labels[*i],
                    labels[*j],
                    show(s),
                    show(n)
                );
            }
        }
    }
    t
}

/// Runs the equivalence check on given matrices; exposed so that
/// corrupted matrices can be fed in directly.
pub fn check_with(
    g: &PsadfGraph,
    matrices: &[SymbolicMatrix],
    samples: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<i32, String> {
    if samples == 0 {
        let _ = writeln!(out, "0 samples requested, nothing to check");
        return Ok(EXIT_OK);
    }
    let rep = check_equivalence(g, matrices, samples, seed).map_err(|e| e.to_string())?;
    let _ = writeln!(
        out,
        "{}/{} samples passed, {} failed (seed {seed})",
        rep.passed,
        rep.samples,
        rep.samples - rep.passed
    );
    match &rep.first_failure {
        None => Ok(EXIT_OK),
        Some(m) => {
            let _ = out.write_all(describe_mismatch(m, &g.token_labels()).as_bytes());
            Ok(EXIT_MISMATCH)
        }
    }
}

fn cmd_check(file: &Path, samples: usize, seed: u64, out: &mut dyn Write) -> Outcome {
    let g = require_psadf(load(file)?)?;
    let (_, ms) = extract_graph(&g).map_err(analysis)?;
    check_with(&g, &ms, samples, seed, out).map_err(|message| Failure {
        code: EXIT_ANALYSIS,
        message,
    })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            return EXIT_INPUT;
        }
    };
    let result = match &cli.command {
        Command::Throughput {
            file,
            json,
            report,
            no_prune,
        } => cmd_throughput(file, json.as_deref(), report.as_deref(), *no_prune, out),
        Command::Extract { file, json } => cmd_extract(file, json.as_deref(), out),
        Command::Evaluate { file, point } => cmd_evaluate(file, point, out, err),
        Command::Check { file, samples, seed } => cmd_check(file, *samples, *seed, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
