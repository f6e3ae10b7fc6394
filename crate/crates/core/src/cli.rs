//! The `ssg` command-line front end.
//!
//! Exit codes: 0 success, 1 failed check, 2 resource bound exhausted,
//! 3 usage or parse error.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::automata::{parse_group, AutomatonGroup};
use crate::builtin;
use crate::cantor::{Cone, RationalPoint};
use crate::error::Error;
use crate::germs::{germ_signature, periodic_nucleus};
use crate::rn::{parse_element, RnElement};
use crate::suites::{run_suite, Status, SuiteConfig, SUITES};
use crate::witnesses::{build_e_prime, phi, search_mover, separate_points, tuple_transporter};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BOUNDS: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "ssg",
    version,
    about = "Self-similar groups, their Röver–Nekrashevych groups and germs"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the nucleus of a contracting group.
    Nucleus {
        /// Built-in group name or path to a group file.
        group: String,
        #[arg(long, default_value_t = 64)]
        max_size: usize,
        #[arg(long, default_value_t = 64)]
        max_depth: usize,
    },
    /// Decide whether a word is the identity.
    Wp { group: String, word: String },
    /// Evaluate an element at a rational point.
    Eval {
        group: String,
        /// Path to an element file, or a word acting on the whole space.
        element: String,
        point: String,
    },
    /// Germ signature of an element at a point it fixes.
    Germ {
        group: String,
        element: String,
        point: String,
        #[arg(long, default_value_t = 16)]
        cap: usize,
        #[arg(long, default_value_t = 64)]
        max_size: usize,
        #[arg(long, default_value_t = 64)]
        max_depth: usize,
    },
    /// Build an element sending each `p` to `q`, given pairs `p:q`. Movers are
    /// found by a bounded search and may be missed.
    Transport {
        group: String,
        #[arg(required = true)]
        pairs: Vec<String>,
        /// Longest group word tried by the mover search.
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Conjugate an element into the stabilizer of the given points.
    Phi {
        group: String,
        element: String,
        #[arg(required = true)]
        points: Vec<String>,
    },
    /// Run a seeded verification suite.
    Verify {
        /// One of: germ, laws, oligo, stab.
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cases: usize,
        /// Group for the suites that accept one (oligo, laws).
        #[arg(long)]
        group: Option<String>,
    },
}

/// Failure of a command, with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BoundExceeded(_)
            | Error::NotContractingWithinBounds(_)
            | Error::NotStabilized(_) => EXIT_BOUNDS,
            Error::Parse { .. }
            | Error::UnknownState(_)
            | Error::LetterOutOfRange { .. }
            | Error::InvalidAutomaton(_)
            | Error::EmptyPeriod
            | Error::DuplicatePoint(_)
            | Error::InvalidElement(_)
            | Error::InvalidPartition(_) => EXIT_USAGE,
            _ => EXIT_CHECK_FAILED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn load_group(arg: &str) -> std::result::Result<Arc<AutomatonGroup>, Failure> {
    if let Some(g) = builtin::by_name(arg) {
        return Ok(Arc::new(g));
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(usage(format!(
            "`{arg}` is neither a built-in group ({}) nor a file",
            builtin::NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{arg}: {e}")))?;
    parse_group(&text).map(Arc::new).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{arg}: {}", f.message);
        f
    })
}

fn load_element(group: &Arc<AutomatonGroup>, arg: &str) -> std::result::Result<RnElement, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{arg}: {e}")))?;
        let (_, h) = parse_element(&text, group.clone()).map_err(|e| {
            let mut f = Failure::from(e);
            f.message = format!("{arg}: {}", f.message);
            f
        })?;
        return Ok(h);
    }
    Ok(RnElement::from_word(group.clone(), group.parse_word(arg)?))
}

fn load_point(group: &AutomatonGroup, arg: &str) -> std::result::Result<RationalPoint, Failure> {
    let p: RationalPoint = arg.parse()?;
    p.check_alphabet(group.degree())?;
    Ok(p)
}

fn color_enabled() -> bool {
    std::env::var("SSG_COLOR")
        .map(|v| v == "1")
        .unwrap_or(false)
}

fn paint(status: Status, text: String) -> String {
    if !color_enabled() {
        return text;
    }
    let code = match status {
        Status::Pass => "32",
        Status::Fail => "31",
        Status::NotStabilized => "33",
    };
    format!("\x1b[{code}m{text}\x1b[0m")
}

fn emit(
    out: &mut dyn Write,
    format: Format,
    text: String,
    json: serde_json::Value,
) -> std::io::Result<()> {
    match format {
        Format::Text => writeln!(out, "{text}"),
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&json).expect("json values serialize")
        ),
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> CmdResult {
    let format = cli.format;
    let io = |e: std::io::Error| Failure {
        code: EXIT_CHECK_FAILED,
        message: e.to_string(),
    };
    match cli.command {
        Command::Nucleus {
            group,
            max_size,
            max_depth,
        } => {
            let g = load_group(&group)?;
            let n = g.nucleus(max_size, max_depth)?;
            let names: Vec<String> = n.elements().iter().map(|w| g.format_word(w)).collect();
            let text = format!(
                "nucleus of {} ({} elements, depth certificate {})\n{}",
                g.name(),
                n.len(),
                n.depth_certificate(),
                names.join("\n")
            );
            emit(out, format, text, n.to_json(&g)).map_err(io)?;
        }
        Command::Wp { group, word } => {
            let g = load_group(&group)?;
            let w = g.parse_word(&word)?;
            let trivial = g.is_trivial(&w);
            let verdict = if trivial { "trivial" } else { "nontrivial" };
            let json = serde_json::json!({ "group": g.name(), "word": word, "trivial": trivial });
            emit(out, format, verdict.to_string(), json).map_err(io)?;
        }
        Command::Eval {
            group,
            element,
            point,
        } => {
            let g = load_group(&group)?;
            let h = load_element(&g, &element)?;
            let p = load_point(&g, &point)?;
            let image = h.evaluate(&p)?;
            let json = serde_json::json!({ "point": p, "image": image });
            emit(out, format, image.to_string(), json).map_err(io)?;
        }
        Command::Germ {
            group,
            element,
            point,
            cap,
            max_size,
            max_depth,
        } => {
            let g = load_group(&group)?;
            let h = load_element(&g, &element)?;
            let p = load_point(&g, &point)?;
            let nucleus = g.nucleus(max_size, max_depth)?;
            let data = periodic_nucleus(&g, &nucleus, p.period())?;
            let sig = germ_signature(&h, &p, &data, cap)?;
            emit(out, format, sig.render(&g), sig.to_json(&g)).map_err(io)?;
        }
        Command::Transport {
            group,
            pairs,
            max_len,
        } => {
            let g = load_group(&group)?;
            let mut parsed = Vec::new();
            for pair in &pairs {
                let (p, q) = pair
                    .split_once(':')
                    .ok_or_else(|| usage(format!("expected `p:q`, got `{pair}`")))?;
                parsed.push((load_point(&g, p)?, load_point(&g, q)?));
            }
            let mut movers = Vec::new();
            for (p, q) in &parsed {
                match search_mover(&g, p, q, max_len)? {
                    Some(m) => movers.push(m),
                    None => {
                        return Err(Failure {
                            code: EXIT_BOUNDS,
                            message: format!(
                                "no mover from {p} to {q} found with words up to length {max_len}"
                            ),
                        })
                    }
                }
            }
            let h = tuple_transporter(&g, &parsed, &movers)?;
            let json = serde_json::json!({
                "pairs": parsed.iter().map(|(p, q)| serde_json::json!([p, q])).collect::<Vec<_>>(),
                "element": h.to_json(),
            });
            emit(
                out,
                format,
                h.to_text("transporter").trim_end().to_string(),
                json,
            )
            .map_err(io)?;
        }
        Command::Phi {
            group,
            element,
            points,
        } => {
            let g = load_group(&group)?;
            let h = load_element(&g, &element)?;
            let pts = points
                .iter()
                .map(|p| load_point(&g, p))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let system = separate_points(g.degree(), &pts)?;
            let data = build_e_prime(g.degree(), &system)?;
            let image = phi(&h, &data)?;
            let cones = |v: &[Cone]| {
                v.iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let text = format!(
                "# E' = {}\n# gamma = {}\n# delta = {}\n{}",
                cones(&data.e_prime),
                cones(&data.gamma),
                cones(&data.delta),
                image.to_text("phi").trim_end()
            );
            let json = serde_json::json!({ "data": data, "element": image.to_json() });
            emit(out, format, text, json).map_err(io)?;
        }
        Command::Verify {
            suite,
            seed,
            cases,
            group,
        } => {
            if !SUITES.contains(&suite.as_str()) {
                return Err(usage(format!(
                    "unknown suite `{suite}` (expected one of {})",
                    SUITES.join(", ")
                )));
            }
            let group = group.as_deref().map(load_group).transpose()?;
            let report = run_suite(&suite, &SuiteConfig { seed, cases, group })?;
            let mut text = report.to_string();
            if color_enabled() {
                let lines: Vec<String> = text
                    .lines()
                    .map(|line| {
                        let status = report
                            .checks
                            .iter()
                            .find(|c| line.starts_with(c.id.as_str()))
                            .map(|c| c.status);
                        match status {
                            Some(s) => paint(s, line.to_string()),
                            None => line.to_string(),
                        }
                    })
                    .collect();
                text = lines.join("\n");
            }
            emit(out, format, text, report.to_json()).map_err(io)?;
            return Ok(report.exit_code);
        }
    }
    Ok(EXIT_OK)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ssg").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn nucleus_sizes() {
        for (name, size) in [("grigorchuk", 5), ("odometer", 3), ("trivial", 1)] {
            let (code, out, _) = run_args(&["--format", "json", "nucleus", name]);
            assert_eq!(code, 0);
            let v: serde_json::Value = serde_json::from_str(&out).unwrap();
            assert_eq!(v["elements"].as_array().unwrap().len(), size, "{name}");
        }
    }

    #[test]
    fn word_problem() {
        assert_eq!(run_args(&["wp", "grigorchuk", "a.a"]).1.trim(), "trivial");
        assert_eq!(run_args(&["wp", "grigorchuk", "b.c.d"]).1.trim(), "trivial");
        assert_eq!(run_args(&["wp", "odometer", "a.a"]).1.trim(), "nontrivial");
    }

    #[test]
    fn evaluation() {
        assert_eq!(run_args(&["eval", "odometer", "a", "(1)"]).1.trim(), "(0)");
        assert_eq!(
            run_args(&["eval", "odometer", "id", "0(01)"]).1.trim(),
            "0(01)"
        );
        assert_eq!(
            run_args(&["eval", "reflection", "a", "(01)"]).1.trim(),
            "(10)"
        );
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["wp", "nosuchgroup", "a"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["wp", "grigorchuk", "z"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["eval", "odometer", "a", "(2)"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn germ_needs_fixed_point() {
        let (code, _, err) = run_args(&["germ", "reflection", "a", "(01)"]);
        assert_eq!(code, EXIT_CHECK_FAILED);
        assert!(err.contains("does not fix"));
    }

    #[test]
    fn transport_pairs() {
        let (code, out, _) = run_args(&["transport", "reflection", "(0):01(1)", "(1):(0)"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.starts_with("rn transporter over reflection"));
    }
}
