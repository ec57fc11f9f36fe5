use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mll::io::{self, pretty};
use mll::ncl::{self, Configuration, Reconfiguration};
use mll::proofnet::Switching;
use mll::reduction::{self, EncodedInstance};
use mll::rewiring::{Equivalence, Reason};
use mll::{dot, Linking, Parity, Sequent};

const USAGE: u8 = 64;
const BAD_INPUT: u8 = 65;

#[derive(Parser)]
#[command(name = "mll", version, about = "Proof nets for unit-only MLL, rewiring, and constraint logic")]
struct Cli {
    /// Search budget in states.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for anything random.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a net for correctness.
    Check { net: PathBuf },
    /// Search for a rewiring path between two nets.
    Equiv { a: PathBuf, b: PathBuf },
    /// Parity of two nets on the same sequent.
    Parity { a: PathBuf, b: PathBuf },
    /// All correct linkings of a sequent, grouped into rewiring classes.
    Classes {
        /// Sequent text, or a file holding it.
        sequent: String,
    },
    /// Turn a net into a sequent proof.
    Sequentialise { net: PathBuf },
    /// Turn a sequent proof into a net.
    Translate {
        proof: Option<PathBuf>,
        /// Translate a random proof of roughly this size instead.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Reconfiguration search on a constraint graph.
    NclSolve { graph: PathBuf, from: PathBuf, to: PathBuf },
    /// Encode a reconfiguration instance into a directory.
    Encode {
        graph: PathBuf,
        gamma: PathBuf,
        delta: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read a configuration back off a net over an encoded graph.
    Decode {
        /// Encoding directory or its tables.json.
        tables: PathBuf,
        net: PathBuf,
    },
    /// Compile a reconfiguration sequence into a rewiring path.
    Compile {
        /// Directory written by `encode`.
        dir: PathBuf,
        /// JSON list of configurations from gamma to delta.
        path: PathBuf,
    },
    /// 3-partition through proof net search.
    #[command(name = "3p")]
    ThreePartition {
        #[arg(long, value_delimiter = ',')]
        values: Vec<u64>,
        #[arg(long)]
        k: u64,
    },
    /// Graphviz output for a net or a constraint graph.
    Dot {
        /// A net, or with --graph a constraint graph.
        input: PathBuf,
        /// Draw the switching graph for these par choices.
        #[arg(long, value_delimiter = ',')]
        switching: Option<Vec<usize>>,
        #[arg(long)]
        graph: bool,
        /// Orient the constraint graph by this configuration.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Worked examples.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// The two classes of nets on bot*bot, 1, 1, 1, bot*bot.
    #[command(name = "fig7", alias = "cycles")]
    Cycles,
    /// Encode and compile the AND gadget reconfiguration, then decode it.
    And,
    /// Central edge inversions of a nested boat gadget.
    Boat {
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
}

/// A finished command: exit code and what to print.
struct Out {
    code: u8,
    text: String,
}

fn ok(text: String) -> Out {
    Out { code: 0, text }
}

type Res = std::result::Result<Out, (u8, String)>;

fn bad<E: std::fmt::Display>(e: E) -> (u8, String) {
    (BAD_INPUT, e.to_string())
}

fn read(p: &Path) -> std::result::Result<String, (u8, String)> {
    fs::read_to_string(p).map_err(|e| bad(format!("{}: {e}", p.display())))
}

fn read_json(p: &Path) -> std::result::Result<Value, (u8, String)> {
    io::parse(&read(p)?).map_err(|e| bad(format!("{}: {e}", p.display())))
}

fn read_net(p: &Path) -> std::result::Result<(Sequent, Linking), (u8, String)> {
    io::net_from_json(&read_json(p)?).map_err(|e| bad(format!("{}: {e}", p.display())))
}

fn read_pair(a: &Path, b: &Path) -> std::result::Result<(Sequent, Linking, Linking), (u8, String)> {
    let (s, l1) = read_net(a)?;
    let (s2, l2) = read_net(b)?;
    if mll::print_sequent(&s) != mll::print_sequent(&s2) {
        return Err(bad("the two nets are over different sequents"));
    }
    let l2 = Linking::from_names(&s, &l2.to_names(&s2)).map_err(bad)?;
    Ok((s, l1, l2))
}

fn answer(format: Format, yes: bool, key: &str, word: (&str, &str)) -> Out {
    let text = match format {
        Format::Json => pretty(&json!({ key: yes })),
        _ => (if yes { word.0 } else { word.1 }).to_string(),
    };
    Out { code: if yes { 0 } else { 1 }, text }
}

fn run(cli: Cli) -> Res {
    let f = cli.format;
    match cli.cmd {
        Cmd::Check { net } => {
            let (s, l) = read_net(&net)?;
            if f == Format::Dot {
                let code = if mll::is_net(&s, &l) { 0 } else { 1 };
                return Ok(Out { code, text: dot::net_dot(&s, &l) });
            }
            let c = mll::is_correct_fast(&s, &l).map_err(bad)?;
            Ok(answer(f, c, "correct", ("correct", "incorrect")))
        }
        Cmd::Equiv { a, b } => {
            let (s, l1, l2) = read_pair(&a, &b)?;
            match mll::equivalent(&s, &l1, &l2, cli.budget).map_err(bad)? {
                Equivalence::Found(p) => Ok(ok(pretty(&io::path_to_json(&s, &p)))),
                Equivalence::Inequivalent(r) => {
                    let reason = match r {
                        Reason::Parity => json!({ "equivalent": false, "reason": "parity" }),
                        Reason::Exhausted { class_size } => {
                            json!({ "equivalent": false, "reason": "class exhausted", "class_size": class_size })
                        }
                    };
                    let text = match (f, r) {
                        (Format::Json, _) => pretty(&reason),
                        (_, Reason::Parity) => "inequivalent: parity".into(),
                        (_, Reason::Exhausted { class_size }) => {
                            format!("inequivalent: class of {class_size} nets exhausted")
                        }
                    };
                    Ok(Out { code: 1, text })
                }
                Equivalence::Unknown => Ok(Out { code: 2, text: "unknown: budget exhausted".into() }),
            }
        }
        Cmd::Parity { a, b } => {
            let (s, l1, l2) = read_pair(&a, &b)?;
            let p = mll::parity(&s, &l1, &l2).map_err(bad)?;
            let even = p == Parity::Even;
            let text = match f {
                Format::Json => pretty(&json!({ "parity": if even { "even" } else { "odd" } })),
                _ => (if even { "even" } else { "odd" }).into(),
            };
            Ok(Out { code: if even { 0 } else { 1 }, text })
        }
        Cmd::Classes { sequent } => {
            let text = if Path::new(&sequent).is_file() { read(Path::new(&sequent))? } else { sequent };
            let s = mll::parse_sequent(text.trim()).map_err(bad)?;
            let cs = match mll::classes(&s, cli.budget) {
                Ok(cs) => cs,
                Err(mll::Error::Budget(_)) => return Ok(Out { code: 2, text: "unknown: budget exhausted".into() }),
                Err(e) => return Err(bad(e)),
            };
            Ok(ok(match f {
                Format::Json => pretty(&Value::Array(
                    cs.iter()
                        .map(|c| Value::Array(c.iter().map(|l| json!(l.to_names(&s))).collect()))
                        .collect(),
                )),
                _ => classes_text(&cs),
            }))
        }
        Cmd::Sequentialise { net } => {
            let (s, l) = read_net(&net)?;
            if !mll::is_net(&s, &l) {
                return Ok(Out { code: 1, text: "not a proof net".into() });
            }
            let p = mll::sequentialise(&s, &l).map_err(bad)?;
            Ok(ok(pretty(&io::proof_to_json(&p))))
        }
        Cmd::Translate { proof, random } => {
            let p = match (proof, random) {
                (Some(path), None) => io::proof_from_json(&read_json(&path)?).map_err(bad)?,
                (None, Some(size)) => mll::random_proof(cli.seed, size),
                _ => return Err((USAGE, "give either a proof file or --random".into())),
            };
            if !mll::check_proof(&p) {
                return Ok(Out { code: 1, text: "not a valid proof".into() });
            }
            let l = mll::proof_to_net(&p).map_err(bad)?;
            let net = io::net_to_json(&p.conclusion, &l);
            Ok(ok(match random {
                Some(_) => pretty(&json!({ "proof": io::proof_to_json(&p), "net": net })),
                None => pretty(&net),
            }))
        }
        Cmd::NclSolve { graph, from, to } => {
            let g = io::graph_from_json(&read_json(&graph)?).map_err(bad)?;
            let a = io::config_from_json(&g, &read_json(&from)?).map_err(bad)?;
            let b = io::config_from_json(&g, &read_json(&to)?).map_err(bad)?;
            match ncl::reconfigurable(&g, &a, &b, cli.budget).map_err(bad)? {
                Reconfiguration::Found(path) => Ok(ok(pretty(&Value::Array(
                    path.iter().map(|c| io::config_to_json(&g, c)).collect(),
                )))),
                Reconfiguration::No => Ok(Out { code: 1, text: "no reconfiguration".into() }),
                Reconfiguration::Unknown => Ok(Out { code: 2, text: "unknown: budget exhausted".into() }),
            }
        }
        Cmd::Encode { graph, gamma, delta, out } => {
            let g = io::graph_from_json(&read_json(&graph)?).map_err(bad)?;
            let a = io::config_from_json(&g, &read_json(&gamma)?).map_err(bad)?;
            let b = io::config_from_json(&g, &read_json(&delta)?).map_err(bad)?;
            let inst = reduction::encode_instance(&g, &a, &b).map_err(bad)?;
            write_instance(&inst, &out)?;
            let s = &inst.graph.sequent;
            Ok(ok(format!(
                "{} nodes, {} bots, {} absorbers{}; written to {}",
                s.len(),
                s.bots().len(),
                inst.graph.p,
                if inst.swapped { ", first two absorbers exchanged in delta" } else { "" },
                out.display()
            )))
        }
        Cmd::Decode { tables, net } => {
            let tables = if tables.is_dir() { tables.join("tables.json") } else { tables };
            let enc = io::tables_from_json(&read_json(&tables)?).map_err(bad)?;
            let (s, l) = read_net(&net)?;
            if mll::print_sequent(&s) != mll::print_sequent(&enc.sequent) {
                return Err(bad("net is not over the encoded sequent"));
            }
            let l = Linking::from_names(&enc.sequent, &l.to_names(&s)).map_err(bad)?;
            let c = reduction::decode(&enc, &l).map_err(bad)?;
            Ok(ok(pretty(&io::config_to_json(&enc.graph, &c))))
        }
        Cmd::Compile { dir, path } => {
            let inst = read_instance(&dir)?;
            let g = &inst.graph.graph;
            let configs = io::configs_from_json(g, &read_json(&path)?).map_err(bad)?;
            let p = reduction::compile_reconfiguration(&inst, &configs).map_err(bad)?;
            let s = &inst.graph.sequent;
            p.verify(s).map_err(bad)?;
            Ok(ok(match f {
                Format::Json => pretty(&io::path_to_json(s, &p)),
                _ => format!("{} rewiring steps, all verified, ending at the encoded delta", p.len()),
            }))
        }
        Cmd::ThreePartition { values, k } => {
            let s = reduction::encode_3partition(&values, k).map_err(bad)?;
            match reduction::find_proof_net(&s, cli.budget) {
                Ok(Some(l)) => {
                    let groups = reduction::decode_3partition(&s, &l).map_err(bad)?;
                    Ok(ok(match f {
                        Format::Json => pretty(&json!({ "partition": groups })),
                        _ => groups
                            .iter()
                            .map(|g| g.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
                            .collect::<Vec<_>>()
                            .join("\n"),
                    }))
                }
                Ok(None) => Ok(Out { code: 1, text: "no partition".into() }),
                Err(mll::Error::Budget(_)) => Ok(Out { code: 2, text: "unknown: budget exhausted".into() }),
                Err(e) => Err(bad(e)),
            }
        }
        Cmd::Dot { input, switching, graph, config } => {
            if graph {
                let g = io::graph_from_json(&read_json(&input)?).map_err(bad)?;
                let c = match config {
                    Some(c) => Some(io::config_from_json(&g, &read_json(&c)?).map_err(bad)?),
                    None => None,
                };
                return Ok(ok(dot::graph_dot(&g, c.as_ref())));
            }
            let (s, l) = read_net(&input)?;
            Ok(ok(match switching {
                Some(sw) => {
                    let pars = mll::proofnet::pars(&s);
                    if sw.len() != pars.len() || sw.iter().zip(&pars).any(|(&i, &p)| i >= s.children(p).len()) {
                        return Err(bad(format!("switching needs one child index for each of {} pars", pars.len())));
                    }
                    dot::switching_dot(&s, &l, &Switching(sw))
                }
                None => dot::net_dot(&s, &l),
            }))
        }
        Cmd::Demo { which } => match which {
            Demo::Cycles => demo_two_cycles(cli.budget),
            Demo::And => demo_and(cli.budget),
            Demo::Boat { depth } => demo_boat(depth),
        },
    }
}

fn classes_text(cs: &[Vec<Linking>]) -> String {
    let total: usize = cs.iter().map(Vec::len).sum();
    let sizes: Vec<String> = cs.iter().map(|c| c.len().to_string()).collect();
    format!("{total} nets in {} classes of sizes {}", cs.len(), sizes.join(", "))
}

fn write_instance(inst: &EncodedInstance, dir: &Path) -> std::result::Result<(), (u8, String)> {
    let g = &inst.graph.graph;
    fs::create_dir_all(dir).map_err(bad)?;
    let files = [
        ("sequent.txt", mll::print_sequent(&inst.graph.sequent) + "\n"),
        ("gamma.json", pretty(&io::config_to_json(g, &inst.gamma))),
        ("delta.json", pretty(&io::config_to_json(g, &inst.delta))),
        ("tables.json", pretty(&io::tables_to_json(&inst.graph))),
    ];
    for (name, body) in files {
        fs::write(dir.join(name), body).map_err(|e| bad(format!("{name}: {e}")))?;
    }
    Ok(())
}

fn read_instance(dir: &Path) -> std::result::Result<EncodedInstance, (u8, String)> {
    let enc = io::tables_from_json(&read_json(&dir.join("tables.json"))?).map_err(bad)?;
    let text = read(&dir.join("sequent.txt"))?;
    if text.trim() != mll::print_sequent(&enc.sequent) {
        return Err(bad("sequent.txt does not match tables.json"));
    }
    let g = enc.graph.clone();
    let a = io::config_from_json(&g, &read_json(&dir.join("gamma.json"))?).map_err(bad)?;
    let b = io::config_from_json(&g, &read_json(&dir.join("delta.json"))?).map_err(bad)?;
    reduction::encode_instance(&g, &a, &b).map_err(bad)
}

fn demo_two_cycles(budget: usize) -> Res {
    let s = mll::parse_sequent("bot * bot, 1, 1, 1, bot * bot").map_err(bad)?;
    let cs = mll::classes(&s, budget).map_err(bad)?;
    let mut lines = vec![classes_text(&cs)];
    for (i, c) in cs.iter().enumerate() {
        let cyclic = c.iter().all(|l| {
            let n = mll::neighbors(&s, l).map(|v| v.len()).unwrap_or(0);
            n == 2
        });
        lines.push(format!("class {}: {} nets, {}", i + 1, c.len(), if cyclic { "a single rewiring cycle" } else { "not a cycle" }));
    }
    if let [a, b] = &cs[..] {
        let p = mll::parity(&s, &a[0], &b[0]).map_err(bad)?;
        lines.push(format!("parity across the classes: {}", if p == Parity::Even { "even" } else { "odd" }));
    }
    Ok(ok(lines.join("\n")))
}

fn demo_and(budget: usize) -> Res {
    let (g, named) = ncl::gadget_and();
    let (first, last) = (&named[0].1, &named[named.len() - 1].1);
    let path = match ncl::reconfigurable(&g, first, last, budget).map_err(bad)? {
        Reconfiguration::Found(p) => p,
        _ => return Ok(Out { code: 1, text: "AND gadget endpoints are not reconfigurable".into() }),
    };
    let inst = reduction::encode_instance(&g, first, last).map_err(bad)?;
    let s = &inst.graph.sequent;
    let rp = reduction::compile_reconfiguration(&inst, &path).map_err(bad)?;
    rp.verify(s).map_err(bad)?;
    let end = rp.end(s);
    let decoded = reduction::decode(&inst.graph, &end).map_err(bad)?;
    let mut shadow: Vec<Configuration> = vec![];
    for l in rp.linkings(s) {
        let c = reduction::decode(&inst.graph, &l).map_err(bad)?;
        if shadow.last() != Some(&c) {
            shadow.push(c);
        }
    }
    let shadow_ok = ncl::check_path(&g, &shadow).is_ok();
    let lines = [
        format!("reconfiguration: {} steps", path.len() - 1),
        format!("encoding: {} nodes, {} absorbers", s.len(), inst.graph.p),
        format!("compiled: {} rewiring steps, each verified", rp.len()),
        format!("ends at the encoded target: {}", end == inst.end),
        format!("decoded end matches: {}", decoded == *last),
        format!("decoded configurations along the way: {} distinct, valid sequence: {shadow_ok}", shadow.len()),
    ];
    let good = end == inst.end && decoded == *last && shadow_ok;
    Ok(Out { code: if good { 0 } else { 1 }, text: lines.join("\n") })
}

fn demo_boat(depth: usize) -> Res {
    let b = ncl::gadget_boat(depth).map_err(bad)?;
    match ncl::min_central_inversions(&b) {
        Some((n, path)) => Ok(ok(format!(
            "depth {depth}: {} vertices, {} edges; reversing the boat inverts the central edge {n} times ({} steps)",
            b.graph.vertices.len(),
            b.graph.edges.len(),
            path.len() - 1
        ))),
        None => Ok(Out { code: 1, text: format!("depth {depth}: the boat cannot be reversed") }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            if !out.text.is_empty() {
                // A closed pipe (e.g. `| head`) is not an error here.
                let _ = writeln!(std::io::stdout().lock(), "{}", out.text.trim_end());
            }
            ExitCode::from(out.code)
        }
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
