mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use exshap::graphs::build_graph;
use exshap::hardness::Reduction;
use exshap::rules::{parse_rule_file, parse_rules};
use exshap::transforms::{hybrid_to_embedded, mc_to_embedded, to_hybrid, weighted_to_hybrid};
use exshap::values::{evaluate_all, poly_refusal, Method};
use exshap::{Caps, Error, Graph, LabeledGraph, Rule, RuleSet, ValueKind};

use render::{render, Entry, Format};

#[derive(Parser)]
#[command(
    name = "exshap",
    version,
    about = "Exact extended Shapley values for MC-nets rule files"
)]
struct Cli {
    /// Enumeration cap for players and graph nodes (overrides EXSHAP_CAP).
    #[arg(long, global = true)]
    cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute values for the players of a rule file.
    Eval {
        #[arg(long)]
        rules: PathBuf,
        /// Player count, for files without a `players:` header.
        #[arg(long)]
        players: Option<usize>,
        /// Comma-separated value kinds (mq, ef, hy, ss, my) or `all`.
        #[arg(long, default_value = "all")]
        value: String,
        /// A player number or `all`.
        #[arg(long, default_value = "all")]
        player: String,
        /// brute, colorings or poly.
        #[arg(long, default_value = "colorings")]
        method: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Also print floating-point approximations.
        #[arg(long)]
        decimal: bool,
        /// Recompute with a second method and fail on any difference.
        #[arg(long)]
        verify: bool,
    },
    /// Rewrite every rule of a file as hybrid or embedded rules.
    Convert {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        players: Option<usize>,
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Print the incompatibility graph of every (hybrid-normalized) rule.
    Graph {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        players: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        emit: Emit,
    },
    /// Recover a graph count from values of constructed games.
    Hardness {
        /// ef (independent sets), hy (exact colorings), ss (Hosoya index) or
        /// my (matchings by size).
        #[arg(long)]
        kind: String,
        /// Graph in the plain-text graph format; labels are ignored.
        #[arg(long)]
        graph: PathBuf,
    },
    /// Run built-in cross-checks between methods.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Hybrid,
    Embedded,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Dot,
    Text,
}

enum Failure {
    Usage(String),
    Parse(String),
    Cap(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Cap(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Cap(m) | Failure::Mismatch(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(p) => Failure::Parse(p.to_string()),
            e @ Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_rules(path: &Path, players: Option<usize>) -> Result<RuleSet, Failure> {
    let text = read(path)?;
    let set = match players {
        Some(n) => parse_rules(&text, n),
        None => parse_rule_file(&text),
    };
    set.map_err(|e| match e {
        Error::Parse(p) => Failure::Parse(format!("{}: {p}", path.display())),
        other => other.into(),
    })
}

fn parse_kinds(spec: &str) -> Result<Vec<ValueKind>, Failure> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok(ValueKind::ALL.to_vec());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<ValueKind>().map_err(|e| Failure::Usage(e.to_string())))
        .collect()
}

fn parse_players(spec: &str, n: usize) -> Result<Vec<usize>, Failure> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok((1..=n).collect());
    }
    match spec.parse::<usize>() {
        Ok(i) if (1..=n).contains(&i) => Ok(vec![i]),
        _ => Err(Failure::Usage(format!(
            "player must be `all` or a number in 1..={n}, got '{spec}'"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    caps: &Caps,
    rules: &Path,
    players: Option<usize>,
    value: &str,
    player: &str,
    method: &str,
    format: Format,
    decimal: bool,
    verify: bool,
) -> Outcome {
    let set = load_rules(rules, players)?;
    let n = set.n();
    let kinds = parse_kinds(value)?;
    let chosen = parse_players(player, n)?;
    let method: Method = method.parse().map_err(Failure::Usage)?;
    if method == Method::Poly {
        for &kind in &kinds {
            if let Some(reason) = poly_refusal(&set, kind) {
                return Err(Failure::Usage(format!(
                    "no polynomial method for {kind} on this input: {reason}; use --method colorings or brute"
                )));
            }
        }
    }
    let mut entries = Vec::new();
    for kind in kinds {
        let values = evaluate_all(&set, kind, method, caps)?;
        if verify {
            let other = if method == Method::Brute {
                Method::Colorings
            } else {
                Method::Brute
            };
            let check = evaluate_all(&set, kind, other, caps)?;
            if check != values {
                return Err(Failure::Mismatch(format!("{kind}: {method} and {other} disagree")));
            }
        }
        entries.extend(chosen.iter().map(|&i| Entry {
            kind,
            player: i,
            value: values[i - 1].clone(),
        }));
    }
    Ok(render(&entries, n, method.name(), format, decimal))
}

fn cmd_convert(rules: &Path, players: Option<usize>, to: Target) -> Outcome {
    let set = load_rules(rules, players)?;
    let n = set.n();
    let mut out = Vec::new();
    for rule in set.rules() {
        match to {
            Target::Hybrid => out.extend(to_hybrid(rule, n)?.into_iter().map(Rule::from)),
            Target::Embedded => match rule {
                Rule::Mc(m) => out.push(mc_to_embedded(m).into()),
                Rule::Embedded(e) => out.push(e.clone().into()),
                Rule::Hybrid(h) => out.push(hybrid_to_embedded(h)?.into()),
                Rule::Weighted(w) => {
                    for h in weighted_to_hybrid(w, n)? {
                        out.push(hybrid_to_embedded(&h)?.into());
                    }
                }
            },
        }
    }
    Ok(RuleSet::new(n, out)?.to_string())
}

fn cmd_graph(rules: &Path, players: Option<usize>, emit: Emit) -> Outcome {
    let set = load_rules(rules, players)?;
    let mut out = String::new();
    let mut idx = 0;
    for rule in set.rules() {
        for h in to_hybrid(rule, set.n())? {
            idx += 1;
            let g = build_graph(&h);
            let weight = render::fraction(h.weight());
            match emit {
                Emit::Dot => {
                    out += &format!("// rule {idx}, weight {weight}\n");
                    out += &g.to_dot();
                }
                Emit::Text => {
                    out += &format!("# rule {idx}, weight {weight}\n");
                    out += &g.to_text();
                }
            }
        }
    }
    Ok(out)
}

fn cmd_hardness(caps: &Caps, kind: &str, graph: &Path) -> Outcome {
    let kind: ValueKind = kind.parse().map_err(|e: String| Failure::Usage(e))?;
    let reduction = Reduction::for_kind(kind).ok_or_else(|| {
        Failure::Usage(format!(
            "{kind} is polynomial; hardness pipelines exist for ef, hy, ss and my"
        ))
    })?;
    let g: Graph = LabeledGraph::parse_text(&read(graph)?)?.graph().clone();
    let report = reduction.run(&g, caps)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if report.is_consistent() {
        Ok(json)
    } else {
        print!("{json}");
        Err(Failure::Mismatch(
            "recovered counts differ from direct enumeration".into(),
        ))
    }
}

fn cmd_selftest(caps: &Caps) -> Outcome {
    let mixed = "players: 6\n\
                    hybrid: (1 !2 -> 1) (2 !1 !3 -> 0) (3 !2 -> 0) (4 6 !5 -> 0) (5 !4 !6 -> 0)\n\
                    embedded: 1 2 | 3 5 !6 , 4 !3 !6 -> 1\n\
                    weighted: (1 2 -> 1) (4 -> 2) | (3 -> 5)\n\
                    mc: 1 !2 -> 3/2\n";
    let set = parse_rule_file(mixed)?;
    let mut out = String::new();
    for kind in ValueKind::ALL {
        let brute = evaluate_all(&set, kind, Method::Brute, caps)?;
        let colorings = evaluate_all(&set, kind, Method::Colorings, caps)?;
        if brute != colorings {
            return Err(Failure::Mismatch(format!("{kind}: brute force and colorings disagree")));
        }
        if poly_refusal(&set, kind).is_none() && evaluate_all(&set, kind, Method::Poly, caps)? != brute {
            return Err(Failure::Mismatch(format!("{kind}: polynomial method disagrees")));
        }
        out += &format!(
            "ok {kind}: methods agree, player 1 gets {}\n",
            render::fraction(&brute[0])
        );
    }
    for (name, g) in [("path on 4 nodes", Graph::path(4)), ("4-cycle", cycle4())] {
        for red in Reduction::ALL {
            if !red.run(&g, caps)?.is_consistent() {
                return Err(Failure::Mismatch(format!(
                    "{} pipeline failed on {name}",
                    red.value_kind()
                )));
            }
        }
        out += &format!("ok reductions on {name}\n");
    }
    Ok(out)
}

fn cycle4() -> Graph {
    Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).expect("valid edges")
}

fn run(cli: Cli) -> Outcome {
    let caps = cli.cap.map_or_else(Caps::from_env, Caps::uniform);
    match cli.command {
        Command::Eval {
            rules,
            players,
            value,
            player,
            method,
            format,
            decimal,
            verify,
        } => cmd_eval(
            &caps, &rules, players, &value, &player, &method, format, decimal, verify,
        ),
        Command::Convert { rules, players, to } => cmd_convert(&rules, players, to),
        Command::Graph { rules, players, emit } => cmd_graph(&rules, players, emit),
        Command::Hardness { kind, graph } => cmd_hardness(&caps, &kind, &graph),
        Command::Selftest => cmd_selftest(&caps),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
