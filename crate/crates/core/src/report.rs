//! End-to-end runs: read a problem, compute the census, optionally run the
//! oracle, and render a text or JSON report with an exit status.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::expr::{format_polynomial, parse_problem_with_options, ProblemInput, SolverOptions};
use crate::oracle::{run_oracle, CertifiedPoint, PointKind, DEFAULT_RADIUS};
use crate::pipeline::{census, derive_system, CuspCensus, PipelineError, Timings};

pub const EXIT_OK: i32 = 0;
/// Unreadable input or an internal consistency failure.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_CERTIFIED: i32 = 2;
pub const EXIT_NOT_ZERO_DIMENSIONAL: i32 = 3;
pub const EXIT_DEGENERATE_REGION: i32 = 4;
pub const EXIT_PARSE: i32 = 5;
/// Degree guard tripped, or the oracle left a box unresolved.
pub const EXIT_GUARD_OR_RESOLUTION: i32 = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Problem file; `-` reads standard input.
    pub input_path: PathBuf,
    pub json_output: bool,
    pub run_oracle: bool,
    pub oracle_radius: f64,
    pub degree_guard: u32,
    pub show_basis: bool,
    /// Include wall-clock timings. Off by default so output is reproducible.
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        let solver = SolverOptions::default();
        RunOptions {
            input_path: PathBuf::from("-"),
            json_output: false,
            run_oracle: false,
            oracle_radius: DEFAULT_RADIUS,
            degree_guard: solver.degree_guard,
            show_basis: false,
            timings: false,
        }
    }
}

/// What a run produced: an exit status and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutcome {
    fn failure(exit_code: i32, message: String) -> Self {
        RunOutcome {
            exit_code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Reads the input named by `opts` and runs it.
pub fn run(opts: &RunOptions) -> RunOutcome {
    let text = if opts.input_path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map(|_| buf)
            .map_err(|e| format!("cannot read standard input: {e}"))
    } else {
        std::fs::read_to_string(&opts.input_path)
            .map_err(|e| format!("cannot read {}: {e}", opts.input_path.display()))
    };
    match text {
        Ok(text) => run_text(&text, opts),
        Err(message) => RunOutcome::failure(EXIT_FAILURE, message),
    }
}

/// Runs a problem given as text. `opts.input_path` is ignored.
pub fn run_text(text: &str, opts: &RunOptions) -> RunOutcome {
    let solver = SolverOptions {
        oracle_radius: opts.oracle_radius,
        degree_guard: opts.degree_guard,
    };
    let problem = match parse_problem_with_options(text, solver) {
        Ok(p) => p,
        Err(e) => return RunOutcome::failure(EXIT_PARSE, e.to_string()),
    };
    if opts.run_oracle && !(opts.oracle_radius.is_finite() && opts.oracle_radius > 0.0) {
        return RunOutcome::failure(
            EXIT_PARSE,
            format!("oracle radius must be positive, got {}", opts.oracle_radius),
        );
    }

    // Whether the genericity certificate was obtained, when known.
    let mut certified = Some(true);
    let (mut result, exit_code, error) = match census(&problem) {
        Ok(c) => (Some(c), EXIT_OK, None),
        Err(e) => {
            let message = e.to_string();
            match e {
                PipelineError::DegenerateRegionForm { census, .. } => {
                    (Some(*census), EXIT_DEGENERATE_REGION, Some(message))
                }
                PipelineError::GenericityNotCertified { .. } => {
                    certified = Some(false);
                    (None, EXIT_NOT_CERTIFIED, Some(message))
                }
                PipelineError::NotZeroDimensional(_) => {
                    (None, EXIT_NOT_ZERO_DIMENSIONAL, Some(message))
                }
                PipelineError::DegreeGuard(_) => {
                    certified = None;
                    (None, EXIT_GUARD_OR_RESOLUTION, Some(message))
                }
                PipelineError::InconsistentSignatures { .. } => {
                    (None, EXIT_FAILURE, Some(message))
                }
            }
        }
    };

    let mut exit_code = exit_code;
    let mut error = error;
    if let (Some(c), true) = (result.as_mut(), opts.run_oracle) {
        let start = Instant::now();
        let d = derive_system(&problem.f1, &problem.f2);
        match run_oracle(&d, problem.u.as_ref(), opts.oracle_radius) {
            Ok(points) => {
                c.timings.oracle = Some(start.elapsed());
                let unresolved = points
                    .iter()
                    .filter(|p| p.kind == PointKind::Unresolved)
                    .count();
                if unresolved > 0 && exit_code == EXIT_OK {
                    exit_code = EXIT_GUARD_OR_RESOLUTION;
                    error = Some(format!(
                        "oracle left {unresolved} box(es) unresolved at the minimum width in [-{r}, {r}]²",
                        r = opts.oracle_radius
                    ));
                }
                c.oracle = Some(points);
            }
            Err(e) => {
                exit_code = EXIT_FAILURE;
                error = Some(e.to_string());
            }
        }
    }

    let stdout = if opts.json_output {
        let mut doc = match &result {
            Some(c) => report_json(&problem, c, opts.timings),
            None => stopped_report_json(&problem, certified),
        };
        doc["error"] = error.clone().map(Value::String).unwrap_or(Value::Null);
        let mut s = serde_json::to_string_pretty(&doc).expect("report is valid JSON");
        s.push('\n');
        s
    } else {
        result
            .as_ref()
            .map(|c| report_text(&problem, c, opts))
            .unwrap_or_default()
    };
    let stderr = error.map(|m| format!("error: {m}\n")).unwrap_or_default();
    RunOutcome {
        exit_code,
        stdout,
        stderr,
    }
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

fn timings_json(t: &Timings) -> Value {
    json!({
        "genericity": millis(t.genericity),
        "groebner": millis(t.groebner),
        "algebra": millis(t.algebra),
        "signatures": millis(t.signatures),
        "oracle": t.oracle.map(millis),
    })
}

fn input_echo(problem: &ProblemInput) -> Value {
    json!({
        "f1": format_polynomial(&problem.f1),
        "f2": format_polynomial(&problem.f2),
        "u": problem.u.as_ref().map(format_polynomial),
    })
}

/// Report for a run that stopped before the census; computed fields are `null`.
fn stopped_report_json(problem: &ProblemInput, certified: Option<bool>) -> Value {
    json!({
        "input_echo": input_echo(problem),
        "one_generic_certified": certified,
        "dim": null,
        "basis": null,
        "signatures": null,
        "cusps": null,
        "region": null,
        "oracle": null,
        "timings_ms": null,
    })
}

/// The JSON report of a completed census.
pub fn report_json(problem: &ProblemInput, c: &CuspCensus, timings: bool) -> Value {
    let [s1, s2, s3, s4] = c.signatures();
    json!({
        "input_echo": input_echo(problem),
        "one_generic_certified": c.one_generic_certified,
        "dim": c.dim,
        "basis": c.basis.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "signatures": {"theta1": s1, "theta2": s2, "theta3": s3, "theta4": s4},
        "cusps": {
            "total": c.total_cusps,
            "positive": c.positive_cusps,
            "negative": c.negative_cusps,
        },
        "region": c.region.map(|r| json!({"positive": r.positive, "negative": r.negative})),
        "oracle": c.oracle.as_ref().map(|pts| serde_json::to_value(pts).expect("serializable")),
        "timings_ms": if timings { timings_json(&c.timings) } else { Value::Null },
    })
}

fn signature_text(s: Option<i64>) -> String {
    s.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

fn point_text(p: &CertifiedPoint) -> String {
    let kind = match p.kind {
        PointKind::Cusp => "cusp",
        PointKind::Fold => "fold",
        PointKind::Unresolved => "unresolved",
    };
    let sign = match p.degree_sign {
        Some(1) => "+1",
        Some(_) => "-1",
        None => "?",
    };
    let region = match p.in_region {
        None => String::new(),
        Some(flag) => format!(
            "  in region: {}",
            match serde_json::to_value(flag).expect("serializable") {
                Value::Bool(b) => b.to_string(),
                _ => "unknown".to_string(),
            }
        ),
    };
    format!(
        "  {kind:<10} x in {}  y in {}  degree sign {sign}{region}",
        p.bx.x, p.bx.y
    )
}

/// Human-readable report with the same numbers as the JSON one.
pub fn report_text(problem: &ProblemInput, c: &CuspCensus, opts: &RunOptions) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "f1 = {}", format_polynomial(&problem.f1));
    let _ = writeln!(out, "f2 = {}", format_polynomial(&problem.f2));
    if let Some(u) = &problem.u {
        let _ = writeln!(out, "u  = {}", format_polynomial(u));
    }
    let _ = writeln!(
        out,
        "genericity: certified (I' is the unit ideal)"
    );
    let _ = writeln!(out, "dim A: {}", c.dim);
    if opts.show_basis {
        let basis: Vec<String> = c.basis.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(out, "basis: {}", basis.join(", "));
    }
    let [s1, s2, s3, s4] = c.signatures();
    let _ = writeln!(
        out,
        "signatures: theta1 = {}, theta2 = {}, theta3 = {}, theta4 = {}",
        signature_text(s1),
        signature_text(s2),
        signature_text(s3),
        signature_text(s4)
    );
    let _ = writeln!(
        out,
        "cusps: {} total, {} positive, {} negative",
        c.total_cusps, c.positive_cusps, c.negative_cusps
    );
    match (&problem.u, &c.region) {
        (Some(_), Some(r)) => {
            let _ = writeln!(
                out,
                "in region u > 0: {} positive, {} negative",
                r.positive, r.negative
            );
        }
        (Some(_), None) => {
            let _ = writeln!(out, "in region u > 0: withheld (degenerate region form)");
        }
        _ => {}
    }
    if let Some(points) = &c.oracle {
        let _ = writeln!(
            out,
            "oracle: {} point(s) in [-{r}, {r}]²",
            points.len(),
            r = opts.oracle_radius
        );
        for p in points {
            let _ = writeln!(out, "{}", point_text(p));
        }
    }
    if opts.timings {
        let t = &c.timings;
        let _ = writeln!(
            out,
            "timings (ms): genericity {:.1}, groebner {:.1}, algebra {:.1}, signatures {:.1}{}",
            millis(t.genericity),
            millis(t.groebner),
            millis(t.algebra),
            millis(t.signatures),
            t.oracle
                .map(|o| format!(", oracle {:.1}", millis(o)))
                .unwrap_or_default()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE_ONE: &str = "f1 = x*y^2 - x^2 + y^2 + x - y\nf2 = x - y\nu = 1 - x^2 - y^2\n";

    fn json_opts() -> RunOptions {
        RunOptions {
            json_output: true,
            ..RunOptions::default()
        }
    }

    #[test]
    fn example_one_json() {
        let out = run_text(EXAMPLE_ONE, &json_opts());
        assert_eq!(out.exit_code, EXIT_OK, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(
            v["signatures"],
            json!({"theta1": 2, "theta2": -2, "theta3": 0, "theta4": 0})
        );
        assert_eq!(v["cusps"], json!({"total": 2, "positive": 0, "negative": 2}));
        assert_eq!(v["region"], json!({"positive": 0, "negative": 1}));
        assert_eq!(v["oracle"], Value::Null);
        assert_eq!(v["timings_ms"], Value::Null);
        assert_eq!(v["error"], Value::Null);
        assert_eq!(v["basis"], json!(["1", "y"]));
    }

    #[test]
    fn output_is_deterministic() {
        let opts = RunOptions {
            run_oracle: true,
            ..json_opts()
        };
        let a = run_text(EXAMPLE_ONE, &opts);
        let b = run_text(EXAMPLE_ONE, &opts);
        assert_eq!(a, b);
    }

    #[test]
    fn text_mode_has_the_same_numbers() {
        let opts = RunOptions {
            show_basis: true,
            ..RunOptions::default()
        };
        let out = run_text(EXAMPLE_ONE, &opts);
        assert_eq!(out.exit_code, EXIT_OK);
        assert!(out.stdout.contains("dim A: 2"));
        assert!(out.stdout.contains("basis: 1, y"));
        assert!(out.stdout.contains("theta1 = 2, theta2 = -2, theta3 = 0, theta4 = 0"));
        assert!(out.stdout.contains("cusps: 2 total, 0 positive, 2 negative"));
        assert!(out.stdout.contains("in region u > 0: 0 positive, 1 negative"));
    }

    #[test]
    fn exit_statuses() {
        let squares = run_text("f1 = x^2\nf2 = y^2\n", &RunOptions::default());
        assert_eq!(squares.exit_code, EXIT_NOT_CERTIFIED);
        assert!(squares.stderr.contains("I'"));
        assert!(squares.stdout.is_empty());

        let identity = run_text("f1 = x\nf2 = y\n", &json_opts());
        assert_eq!(identity.exit_code, EXIT_OK);
        let v: Value = serde_json::from_str(&identity.stdout).unwrap();
        assert_eq!(v["cusps"]["total"], 0);

        let bad = run_text("f1 = x +\nf2 = y\n", &RunOptions::default());
        assert_eq!(bad.exit_code, EXIT_PARSE);
        assert!(bad.stderr.contains("line 1"));

        let missing = run_text("f2 = y\n", &RunOptions::default());
        assert_eq!(missing.exit_code, EXIT_PARSE);
        assert!(missing.stderr.contains("f1"));

        let degenerate = run_text("f1 = x\nf2 = x*y + y^3\nu = x\n", &json_opts());
        assert_eq!(degenerate.exit_code, EXIT_DEGENERATE_REGION);
        let v: Value = serde_json::from_str(&degenerate.stdout).unwrap();
        assert_eq!(v["region"], Value::Null);
        assert_eq!(v["cusps"]["total"], 1);
        assert!(v["error"].as_str().unwrap().contains("degenerate"));

        // The inputs parse under the guard but the derived system exceeds it.
        let guard = RunOptions {
            degree_guard: 6,
            ..RunOptions::default()
        };
        let tripped = run_text(
            "f1 = x^2*y^3 - x^2*y + x*y^2 - x\nf2 = x^3*y - x^2*y + y^3 + x - y\n",
            &guard,
        );
        assert_eq!(tripped.exit_code, EXIT_GUARD_OR_RESOLUTION, "{}", tripped.stderr);
    }

    #[test]
    fn uncertified_json_has_nulls() {
        let out = run_text("f1 = x^2\nf2 = y^2\n", &json_opts());
        assert_eq!(out.exit_code, EXIT_NOT_CERTIFIED);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["one_generic_certified"], false);
        assert_eq!(v["dim"], Value::Null);
        assert!(v["error"].as_str().unwrap().contains("not certified"));
    }

    #[test]
    fn oracle_points_in_json() {
        let opts = RunOptions {
            run_oracle: true,
            oracle_radius: 10.0,
            ..json_opts()
        };
        let out = run_text(EXAMPLE_ONE, &opts);
        assert_eq!(out.exit_code, EXIT_OK, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        let pts = v["oracle"].as_array().unwrap();
        assert_eq!(pts.len(), 2);
        for p in pts {
            assert_eq!(p["kind"], "cusp");
            assert_eq!(p["degree_sign"], -1);
            assert!(p["in_region"].is_boolean());
            assert_eq!(p["box"].as_array().unwrap().len(), 2);
        }
    }

    #[test]
    fn missing_file_is_a_failure() {
        let opts = RunOptions {
            input_path: PathBuf::from("/nonexistent/problem.txt"),
            ..RunOptions::default()
        };
        let out = run(&opts);
        assert_eq!(out.exit_code, EXIT_FAILURE);
        assert!(out.stderr.contains("/nonexistent/problem.txt"));
    }
}
