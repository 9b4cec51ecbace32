mod error;
mod io;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bpn_core::bn_bridge::bpn_to_bn;
use bpn_core::cutnet::{self, sequentialize, sequentialize_rooted, type_cuts, ve_factorize, CutNet, RootedCutNet};
use bpn_core::dsep::{ci_oracle, disconnected, CiQuery};
use bpn_core::factors::{fmt_num, PROB_TOL};
use bpn_core::mll_graph::{check_correctness, dot, is_bayesian, jointree_check, json};
use bpn_core::rewrite::{normalize_with, termination_measure};
use bpn_core::semantics::{interpret_naive, interpret_rooted, query_from, Interpretation, Sampler};
use bpn_core::{Assignment, Factor};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "bpn", version, about = "Exact inference on Bayesian proof-nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// `--bn` or `--net`.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Bayesian network JSON
    #[arg(long)]
    bn: Option<PathBuf>,
    /// Proof-net JSON
    #[arg(long)]
    net: Option<PathBuf>,
}

/// `--bn`, `--net` or `--cutnet`.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct AnySource {
    #[arg(long)]
    bn: Option<PathBuf>,
    #[arg(long)]
    net: Option<PathBuf>,
    /// Cut-net JSON written by `ve` or `type-cuts`
    #[arg(long)]
    cutnet: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Naive,
    Ve,
}

#[derive(Subcommand)]
enum Command {
    /// Network to proof-net (with --bn) or proof-net back to network (with --net)
    Convert {
        #[command(flatten)]
        src: Source,
        /// Names kept as conclusions when translating a network
        #[arg(long, value_delimiter = ',')]
        query: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Posterior of the targets given the evidence
    Query {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<String>,
        /// NAME=VALUE pairs
        #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
        evidence: Vec<(String, String)>,
        #[arg(long, value_enum, default_value = "naive")]
        method: Method,
        /// Elimination order for --method ve (default: the other names, sorted)
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Factorize along an elimination order and write the cut-net
    Ve {
        #[command(flatten)]
        src: Source,
        /// Conclusion names when translating a network
        #[arg(long, value_delimiter = ',')]
        target: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        order: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge parallel cuts so each pair of components shares one cut
    TypeCuts {
        #[arg(long)]
        cutnet: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a sequent-calculus derivation of a proper cut-net
    Sequentialize {
        #[command(flatten)]
        src: AnySource,
        #[arg(long, value_delimiter = ',')]
        target: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Disconnection test for x independent of y given z; exit 0 when disconnected
    Dsep {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_delimiter = ',')]
        x: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        y: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        z: Vec<String>,
        /// Also run the brute-force independence check
        #[arg(long)]
        verify: bool,
    },
    /// Typing, correctness and Bayesian checks
    Check {
        #[arg(long)]
        net: PathBuf,
    },
    /// Cut-elimination to normal form
    Normalize {
        #[arg(long)]
        net: PathBuf,
        /// Also prune boxes cut against weakenings
        #[arg(long)]
        prune: bool,
        /// One line per step on stderr
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Width, largest table and work counters of an evaluation
    CostReport {
        #[command(flatten)]
        src: AnySource,
        #[arg(long, value_delimiter = ',')]
        target: Vec<String>,
    },
    /// Graphviz rendering of a net
    ExportDot {
        #[command(flatten)]
        src: AnySource,
        #[arg(long, value_delimiter = ',')]
        target: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward samples of every variable
    Sample {
        #[command(flatten)]
        src: Source,
        #[arg(long, required = true)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((k.to_string(), v.to_string())),
        _ => Err(format!("expected NAME=VALUE, got `{s}`")),
    }
}

fn factor_json(f: &Factor) -> Value {
    json!({
        "variables": f.vars(),
        "table": f.table().iter().map(|x| io::num(*x)).collect::<Vec<_>>(),
    })
}

fn report_json(i: &Interpretation, width: usize, components: usize) -> Value {
    let c = &i.counters;
    json!({
        "width": width,
        "components": components,
        "max_intermediate": i.max_intermediate,
        "counters": {
            "entries_written": c.entries_written,
            "multiplications": c.multiplications,
            "additions": c.additions,
            "total_work": c.total_work(),
        },
    })
}

fn rooted_from(src: &AnySource, target: &[String]) -> CliResult<RootedCutNet> {
    match &src.cutnet {
        Some(p) => io::load_cutnet(p),
        None => {
            let net = io::net_from(src.bn.as_ref(), src.net.as_ref(), target)?;
            Ok(RootedCutNet::new(CutNet::trivial(net)?, 0)?)
        }
    }
}

fn run(cmd: Command) -> CliResult<ExitCode> {
    match cmd {
        Command::Convert { src, query, out } => {
            let text = match (&src.bn, &src.net) {
                (Some(b), _) => json::to_json(&bpn_core::bn_bridge::bn_to_bpn(&io::load_bn(b)?, &query)?),
                (_, Some(n)) => bpn_to_bn(&io::load_net(n)?)?.to_json(),
                _ => unreachable!("clap enforces one source"),
            };
            io::emit(out.as_ref(), &text)?;
        }
        Command::Query { src, target, evidence, method, order, format } => {
            let ev = Assignment::from_pairs(evidence.iter().cloned());
            let mut names = target.clone();
            names.extend(evidence.iter().map(|(k, _)| k.clone()));
            let net = io::net_from(src.bn.as_ref(), src.net.as_ref(), &names)?;
            let marginal = match method {
                Method::Naive => {
                    if order.is_some() {
                        return Err(CliError::Usage("--order needs --method ve".to_string()));
                    }
                    interpret_naive(&net)?.factor
                }
                Method::Ve => {
                    let concl = net.conclusion_names();
                    let order = order
                        .unwrap_or_else(|| net.names().into_iter().filter(|n| !concl.contains(n)).collect());
                    interpret_rooted(&ve_factorize(&net, &order)?)?.factor
                }
            };
            let post = query_from(&marginal, &target, &ev)?;
            match format {
                Format::Text => print!("{post}"),
                Format::Json => println!("{}", factor_json(&post)),
            }
        }
        Command::Ve { src, target, order, out } => {
            let net = io::net_from(src.bn.as_ref(), src.net.as_ref(), &target)?;
            let rc = ve_factorize(&net, &order)?;
            eprintln!(
                "{} components, {} separating cuts, width {}",
                rc.cutnet().components().len(),
                rc.cutnet().separating_cuts().len(),
                rc.width()
            );
            io::emit(out.as_ref(), &io::cutnet_to_json(&rc))?;
        }
        Command::TypeCuts { cutnet, out } => {
            let rc = io::load_cutnet(&cutnet)?;
            let typed = type_cuts(rc.cutnet())?;
            eprintln!("{} separating cuts after typing", typed.separating_cuts().len());
            let rooted = RootedCutNet::new(typed, rc.root())?;
            io::emit(out.as_ref(), &io::cutnet_to_json(&rooted))?;
        }
        Command::Sequentialize { src, target, format } => {
            let tree = match &src.cutnet {
                Some(p) => sequentialize_rooted(&io::load_cutnet(p)?)?,
                None => sequentialize(&rooted_from(&src, &target)?.into_cutnet())?,
            };
            cutnet::check_proof_tree(&tree)?;
            match format {
                Format::Text => print!("{}", tree.render()),
                Format::Json => println!("{}", serde_json::to_string_pretty(&tree.to_json()).expect("serializable")),
            }
        }
        Command::Dsep { src, x, y, z, verify } => return dsep(src, x, y, z, verify),
        Command::Check { net } => return check(&net),
        Command::Normalize { net, prune, trace, out } => {
            let n = io::load_net(&net)?;
            let (nf, steps) = normalize_with(&n, prune, |_| 0);
            if trace {
                for r in &steps {
                    eprintln!("{r}");
                }
            }
            eprintln!(
                "{} steps, {} nodes left (measure {} -> {})",
                steps.len(),
                nf.node_count(),
                termination_measure(&n),
                termination_measure(&nf)
            );
            io::emit(out.as_ref(), &json::to_json(&nf))?;
        }
        Command::CostReport { src, target } => {
            let rc = rooted_from(&src, &target)?;
            let i = if src.cutnet.is_some() { interpret_rooted(&rc)? } else { interpret_naive(rc.net())? };
            let report = report_json(&i, rc.width(), rc.cutnet().components().len());
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
        Command::ExportDot { src, target, out } => {
            let rc = rooted_from(&src, &target)?;
            io::emit(out.as_ref(), &dot::to_dot(rc.net()))?;
        }
        Command::Sample { src, seed, count, format } => {
            let all = match &src.bn {
                Some(b) => io::load_bn(b)?.names(),
                None => Vec::new(),
            };
            let net = io::net_from(src.bn.as_ref(), src.net.as_ref(), &all)?;
            let mut sampler = Sampler::new(&net, seed)?;
            let draws: Vec<Assignment> = (0..count).map(|_| sampler.sample()).collect::<Result<_, _>>()?;
            match format {
                Format::Text => {
                    for a in &draws {
                        println!("{a}");
                    }
                }
                Format::Json => {
                    let rows: Vec<Value> = draws
                        .iter()
                        .map(|a| Value::Object(a.iter().map(|(k, v)| (k.to_string(), json!(v))).collect()))
                        .collect();
                    println!("{}", Value::Array(rows));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn dsep(src: Source, x: Vec<String>, y: Vec<String>, z: Vec<String>, verify: bool) -> CliResult<ExitCode> {
    if x.is_empty() && y.is_empty() {
        return Err(CliError::Usage("give --x or --y".to_string()));
    }
    let mut names = x.clone();
    names.extend(y.iter().cloned());
    names.extend(z.iter().cloned());
    let net = io::net_from(src.bn.as_ref(), src.net.as_ref(), &names)?;
    let listed: BTreeSet<&String> = names.iter().collect();
    let extra: Vec<String> = net.conclusion_names().into_iter().filter(|n| !listed.contains(n)).collect();
    let mut z = z;
    if !extra.is_empty() {
        eprintln!("warning: conditioning also on {}", extra.join(","));
        z.extend(extra);
    }
    let q = CiQuery::new(&x, &y, &z);
    let normal = bpn_core::rewrite::normalize(&net, true);
    let graphical = disconnected(&normal, &q)?;
    println!("disconnected: {graphical}");
    if verify {
        let joint = interpret_naive(&net)?.factor;
        let independent = ci_oracle(&joint, &q, PROB_TOL)?;
        println!("independent: {independent}");
        if graphical && !independent {
            eprintln!("warning: disconnected but not independent");
        }
    }
    Ok(if graphical { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn check(path: &Path) -> CliResult<ExitCode> {
    let net = json::from_json(&io::read(path)?)?;
    let violations = net.check_typed_graph();
    if !violations.is_empty() {
        println!("typed: false");
        for v in &violations {
            println!("  {v}");
        }
        return Ok(ExitCode::from(1));
    }
    let correct = check_correctness(&net)?;
    println!("typed: true");
    println!("correct: {correct}");
    println!("atomic: {}", net.is_atomic());
    println!("positive: {}", net.is_positive());
    println!("bayesian: {}", correct && is_bayesian(&net)?);
    if net.is_atomic() && net.is_positive() {
        println!("jointree: {}", jointree_check(&net)?);
    }
    if correct && net.is_positive() && is_bayesian(&net)? {
        let i = interpret_naive(&net)?;
        println!("mass: {}", fmt_num(i.factor.total()));
    }
    Ok(if correct { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
