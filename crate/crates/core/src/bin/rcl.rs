use clap::{Parser, Subcommand, ValueEnum};
use rcl::certify::{certify_sn, nf_type, Certificate};
use rcl::deriv::{check_derivation, from_json, to_json, Derivation};
use rcl::linear::check_sterm;
use rcl::reduce::{explore, longest_path, normalize, Budget, Outcome, ReductionStep, Strategy};
use rcl::term::path_string;
use rcl::types::TypeEq;
use rcl::{check_linear, eval_subst, parse_plain, parse_sterm, parse_term, to_plain, to_resource, Term};
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rcl", version, about = "Resource-control lambda calculus workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TypeEqArg {
    Multiset,
    Idempotent,
}

#[derive(clap::Args)]
struct Limits {
    /// Reduction steps before giving up.
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
    /// Term classes to visit before giving up.
    #[arg(long, default_value_t = 10_000)]
    budget_nodes: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check linearity of a term (explicit substitutions allowed).
    Check { term: String },
    /// Translate a lambda term into a resource term.
    Embed { term: String },
    /// Forget erasures and duplications.
    Project { term: String },
    /// Evaluate every explicit substitution, printing the trace.
    Subst { term: String },
    /// Reduce to normal form, printing the trace.
    Reduce {
        term: String,
        /// lo (leftmost-outermost) or exhaustive-first.
        #[arg(long, default_value = "lo")]
        strategy: Strategy,
        #[command(flatten)]
        limits: Limits,
    },
    /// Explore the reduction graph modulo structural equivalence.
    Graph {
        term: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// Type a normal form.
    NfType { term: String },
    /// Decide strong normalisation and produce a typing derivation.
    CertifySn {
        term: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// Validate a derivation given as JSON (inline, a path, or @path).
    CheckDeriv {
        derivation: String,
        #[arg(long, value_enum, default_value_t = TypeEqArg::Multiset)]
        type_eq: TypeEqArg,
    },
}

enum Failure {
    /// Input could not be read or parsed.
    Usage(String),
    /// A well-formed question with a negative answer; output already printed.
    Negative,
}

type Run = Result<(), Failure>;

fn read_arg(raw: &str) -> Result<String, Failure> {
    match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map(|s| s.trim_end().to_string())
            .map_err(|e| Failure::Usage(format!("cannot read {path}: {e}"))),
        None => Ok(raw.to_string()),
    }
}

fn parsed<E: std::fmt::Display>(r: Result<Term, E>) -> Result<Term, Failure> {
    r.map_err(|e| Failure::Usage(e.to_string()))
}

fn linear_term(raw: &str) -> Result<Term, Failure> {
    let t = parsed(parse_term(&read_arg(raw)?))?;
    let report = check_linear(&t);
    match report.violations.first() {
        None => Ok(t),
        Some(v) => Err(Failure::Usage(format!("not a resource term: {} at {}", v.detail, path_string(&v.position)))),
    }
}

fn emit(format: Format, text: impl FnOnce() -> String, json: impl FnOnce() -> Value) {
    match format {
        Format::Text => println!("{}", text()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&json()).expect("json")),
    }
}

fn verdict(ok: bool) -> Run {
    if ok {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

fn step_json(s: &ReductionStep) -> Value {
    json!({
        "rule": s.rule.id(),
        "position": path_string(&s.position),
        "before": s.before.to_string(),
        "after": s.after.to_string(),
        "adjusted": s.adjusted(),
    })
}

fn plural(n: usize, what: &str) -> String {
    if n == 1 {
        format!("1 {what}")
    } else {
        format!("{n} {what}s")
    }
}

fn deriv_text(d: &Derivation) -> String {
    format!("{}\n{d}", d.judgment()).trim_end().to_string()
}

fn run(cli: Cli) -> Run {
    let fmt = cli.format;
    match cli.command {
        Command::Check { term } => {
            let t = parsed(parse_sterm(&read_arg(&term)?))?;
            let report = check_sterm(&t);
            emit(
                fmt,
                || {
                    if report.ok {
                        "linear".into()
                    } else {
                        report
                            .violations
                            .iter()
                            .map(|v| format!("{} at {}: {} ({})", v.variable, path_string(&v.position), v.detail, v.rule))
                            .collect::<Vec<_>>()
                            .join("\n")
                    }
                },
                || serde_json::to_value(&report).expect("json"),
            );
            verdict(report.ok)
        }
        Command::Embed { term } => {
            let r = to_resource(&parsed(parse_plain(&read_arg(&term)?))?);
            emit(fmt, || r.to_string(), || json!({ "term": r.to_string() }));
            Ok(())
        }
        Command::Project { term } => {
            let p = to_plain(&linear_term(&term)?);
            emit(fmt, || p.to_string(), || json!({ "term": p.to_string() }));
            Ok(())
        }
        Command::Subst { term } => {
            let t = parsed(parse_sterm(&read_arg(&term)?))?;
            let (nf, trace) = eval_subst(&t).map_err(|e| Failure::Usage(e.to_string()))?;
            emit(
                fmt,
                || {
                    let mut lines: Vec<String> = trace
                        .steps
                        .iter()
                        .map(|s| format!("{} @ {} : {}", s.rule.id(), path_string(&s.position), s.after))
                        .collect();
                    lines.push(nf.to_string());
                    lines.join("\n")
                },
                || json!({ "result": nf.to_string(), "trace": serde_json::to_value(&trace).expect("json") }),
            );
            Ok(())
        }
        Command::Reduce { term, strategy, limits } => {
            let t = linear_term(&term)?;
            let out = normalize(&t, strategy, limits.max_steps, limits.budget_nodes);
            let (normal, status) = match &out {
                Outcome::Normal(nf, _) => (Some(nf.clone()), "normal"),
                Outcome::Exceeded(_) => (None, "exceeded"),
            };
            emit(
                fmt,
                || {
                    let mut lines: Vec<String> = out.trace().iter().map(ReductionStep::trace_line).collect();
                    lines.push(match &normal {
                        Some(nf) => format!("normal form after {}: {nf}", plural(out.trace().len(), "step")),
                        None => format!("no normal form within {} steps", limits.max_steps),
                    });
                    lines.join("\n")
                },
                || {
                    json!({
                        "status": status,
                        "normal_form": normal.as_ref().map(|n| n.to_string()),
                        "steps": out.trace().iter().map(step_json).collect::<Vec<_>>(),
                    })
                },
            );
            verdict(normal.is_some())
        }
        Command::Graph { term, limits } => {
            let t = linear_term(&term)?;
            let g = explore(&t, Budget { nodes: limits.budget_nodes, steps: limits.max_steps });
            let longest = longest_path(&g).ok();
            emit(
                fmt,
                || {
                    let mut lines = Vec::new();
                    for (i, n) in g.nodes.iter().enumerate() {
                        lines.push(format!("n{i}{} {}", if n.normal { " [nf]" } else { "" }, n.term));
                    }
                    for e in &g.edges {
                        lines.push(format!("n{} -> n{} {} @ {}", e.from, e.to, e.rule.id(), path_string(&e.position)));
                    }
                    lines.push(format!(
                        "{} classes, {} edges, {}{}",
                        g.nodes.len(),
                        g.edges.len(),
                        if g.complete { "complete" } else { "truncated" },
                        longest.map(|l| format!(", longest path {l}")).unwrap_or_default()
                    ));
                    lines.join("\n")
                },
                || {
                    let mut v = serde_json::to_value(&g).expect("json");
                    v["longest_path"] = json!(longest);
                    v
                },
            );
            verdict(g.complete)
        }
        Command::NfType { term } => {
            let t = linear_term(&term)?;
            match nf_type(&t) {
                Ok(d) => {
                    emit(fmt, || deriv_text(&d), || to_json(&d));
                    Ok(())
                }
                Err(e) => {
                    emit(fmt, || e.to_string(), || json!({ "error": e.to_string() }));
                    Err(Failure::Negative)
                }
            }
        }
        Command::CertifySn { term, limits } => {
            let t = linear_term(&term)?;
            let cert = certify_sn(&t, Budget { nodes: limits.budget_nodes, steps: limits.max_steps });
            match &cert {
                Certificate::Certified(d) => {
                    emit(fmt, || format!("certified\n{}", deriv_text(d)), || json!({ "verdict": "certified", "derivation": to_json(d) }))
                }
                Certificate::NotSn(c) => {
                    let rules: Vec<&str> = c.rules.iter().map(|r| r.id()).collect();
                    let path: Vec<String> = c.path.iter().map(Term::to_string).collect();
                    emit(
                        fmt,
                        || {
                            let mut lines = vec![format!("not strongly normalising: cycle back to step {}", c.repeat)];
                            lines.extend(path.iter().enumerate().map(|(i, p)| match rules.get(i) {
                                Some(r) => format!("{p}  --{r}-->"),
                                None => p.clone(),
                            }));
                            lines.join("\n")
                        },
                        || json!({ "verdict": "not-sn", "cycle": { "path": path, "rules": rules, "repeat": c.repeat } }),
                    )
                }
                Certificate::Unknown(why) => {
                    emit(fmt, || format!("unknown: {why}"), || json!({ "verdict": "unknown", "reason": why }))
                }
            }
            verdict(matches!(cert, Certificate::Certified(_)))
        }
        Command::CheckDeriv { derivation, type_eq } => {
            let raw = if derivation.trim_start().starts_with('{') {
                derivation
            } else {
                let path = derivation.strip_prefix('@').unwrap_or(&derivation);
                std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?
            };
            let v: Value = serde_json::from_str(&raw).map_err(|e| Failure::Usage(format!("invalid JSON: {e}")))?;
            let d = from_json(&v).map_err(|e| Failure::Usage(e.0))?;
            let mode = match type_eq {
                TypeEqArg::Multiset => TypeEq::Multiset,
                TypeEqArg::Idempotent => TypeEq::Idempotent,
            };
            let result = check_derivation(&d, mode);
            let errors: Vec<String> = result.as_ref().err().into_iter().flatten().map(|e| e.to_string()).collect();
            emit(
                fmt,
                || if errors.is_empty() { format!("ok: {}", d.judgment()) } else { errors.join("\n") },
                || json!({ "valid": errors.is_empty(), "judgment": d.judgment(), "errors": errors }),
            );
            verdict(result.is_ok())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("rcl: {msg}");
            ExitCode::from(2)
        }
    }
}
