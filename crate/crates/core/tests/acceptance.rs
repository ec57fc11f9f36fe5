//! End-to-end acceptance checks, one line per criterion.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use common::*;
use mll::ncl::{self, Configuration, Reconfiguration};
use mll::reduction;
use mll::{parse_sequent, Parity, Sequent};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn two_cycles() -> Check {
    let s = parse_sequent("bot * bot, 1, 1, 1, bot * bot").map_err(|e| e.to_string())?;
    let all = nets(&s);
    ensure(all.len() == 24, format!("{} nets", all.len()))?;
    let classes = brute_classes(&s, &all);
    let mut sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
    sizes.sort();
    ensure(sizes == [12, 12], format!("class sizes {sizes:?}"))?;
    // A connected class where every net has exactly two neighbours is a cycle.
    for l in &all {
        let n = brute_neighbors(&s, l).len();
        ensure(n == 2, format!("a net with {n} neighbours"))?;
    }
    let lib = mll::classes(&s, 1000).map_err(|e| e.to_string())?;
    ensure(lib.len() == 2 && lib.iter().all(|c| c.len() == 12), "library classes differ")?;
    Ok("24 nets, 2 classes of 12, each a rewiring cycle".into())
}

fn factorial() -> Check {
    let mut out = vec![];
    for n in 2..=4usize {
        let text = format!("{}, {}", vec!["1"; n].join(", "), vec!["bot"; n].join(" * "));
        let s = parse_sequent(&text).map_err(|e| e.to_string())?;
        let all = nets(&s);
        let fact: usize = (1..=n).product();
        ensure(all.len() == fact, format!("n={n}: {} nets", all.len()))?;
        for l in &all {
            ensure(brute_neighbors(&s, l).is_empty(), format!("n={n}: a net can be rewired"))?;
        }
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                let e = mll::equivalent(&s, a, b, 10_000).map_err(|e| e.to_string())?;
                ensure(matches!(e, mll::Equivalence::Inequivalent(_)), format!("n={n}: two nets equivalent"))?;
            }
        }
        out.push(format!("{n}!={fact}"));
    }
    Ok(format!("{} nets, pairwise inequivalent", out.join(", ")))
}

fn parity_soundness() -> Check {
    let mut steps = 0;
    let mut seed = 0u64;
    while steps < 10_000 {
        seed += 1;
        let p = mll::random_proof(seed, 6 + (seed % 10) as usize);
        let s = p.conclusion.clone();
        let mut l = mll::proof_to_net(&p).map_err(|e| e.to_string())?;
        let mut state = seed;
        for _ in 0..40 {
            let ns = mll::neighbors(&s, &l).map_err(|e| e.to_string())?;
            if ns.is_empty() {
                break;
            }
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let (m, _) = ns[(state >> 33) as usize % ns.len()].clone();
            let par = mll::parity(&s, &l, &m).map_err(|e| e.to_string())?;
            ensure(par == Parity::Even, format!("odd step on seed {seed}"))?;
            l = m;
            steps += 1;
        }
    }
    Ok(format!("{steps} random steps, all even"))
}

fn basic_classification() -> Check {
    let mut count = 0;
    let mut nets_seen = 0;
    for s in basic_sequents(14) {
        let all = basic_nets(&s);
        if all.is_empty() {
            continue;
        }
        count += 1;
        nets_seen += all.len();
        let classes = brute_classes(&s, &all);
        ensure(classes.len() <= 2, format!("{} classes on {}", classes.len(), mll::print_sequent(&s)))?;
        let idx = class_index(&classes);
        let base = &all[0];
        for l in &all {
            let even = mll::parity(&s, base, l).map_err(|e| e.to_string())? == Parity::Even;
            ensure(even == (idx[l] == idx[base]), format!("parity disagrees on {}", mll::print_sequent(&s)))?;
        }
    }
    Ok(format!("{count} sequents, {nets_seen} nets"))
}

/// Sequents with up to 12 names, trimmed to those with at most 100
/// linkings each.
fn corpus() -> Vec<Sequent> {
    let mut out = vec![];
    for n in 2..=12 {
        for s in sequents(n) {
            let (b, o) = (s.bots().len() as u32, s.ones().len());
            if o == 0 || b == 0 || (o as u64).pow(b) > 100 {
                continue;
            }
            // Only balanced sequents can hold nets; keep a few others too.
            if s.balance() == 0 || n <= 6 {
                out.push(s);
            }
        }
    }
    out
}

fn checker_agreement(corpus: &[Sequent]) -> Check {
    let mut total = 0usize;
    let mut correct = 0usize;
    for s in corpus {
        for l in mll::restricted_linkings(s) {
            let fast = mll::is_correct_fast(s, &l).map_err(|e| e.to_string())?;
            let slow = mll::is_correct_exhaustive(s, &l).map_err(|e| e.to_string())?;
            ensure(fast == slow, format!("checkers disagree on {}", mll::print_sequent(s)))?;
            ensure(slow == dr_correct(s, &l), format!("oracle disagrees on {}", mll::print_sequent(s)))?;
            total += 1;
            correct += fast as usize;
        }
    }
    ensure(total >= 100_000, format!("only {total} linkings"))?;
    Ok(format!("{total} linkings over {} sequents, {correct} correct", corpus.len()))
}

fn empire_agreement(corpus: &[Sequent]) -> Check {
    let mut checked = 0;
    for s in corpus {
        for l in mll::restricted_linkings(s) {
            if !mll::is_correct_exhaustive(s, &l).map_err(|e| e.to_string())? {
                continue;
            }
            for (slot, &a) in s.bots().iter().enumerate() {
                let got: HashSet<usize> = mll::rewire_targets(s, &l, a).map_err(|e| e.to_string())?.into_iter().collect();
                let want: HashSet<usize> = s
                    .ones()
                    .iter()
                    .copied()
                    .filter(|&o| mll::is_correct_exhaustive(s, &l.with(slot, o)).unwrap())
                    .collect();
                ensure(got == want, format!("targets differ on {}", mll::print_sequent(s)))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} jumps"))
}

fn gadgets() -> Check {
    let (g, named) = ncl::gadget_and();
    let (a, b) = (&named[0].1, &named[3].1);
    let len = match ncl::reconfigurable(&g, a, b, 100_000).map_err(|e| e.to_string())? {
        Reconfiguration::Found(p) => p.len() - 1,
        _ => return Err("AND endpoints not reconfigurable".into()),
    };
    ensure(len == 3, format!("AND shortest path {len}"))?;
    let mut counts = vec![];
    for d in 0..=2 {
        let boat = ncl::gadget_boat(d).map_err(|e| e.to_string())?;
        let (n, path) = ncl::min_central_inversions(&boat).ok_or("boat not reversible")?;
        ensure(ncl::check_path(&boat.graph, &path).is_ok(), "boat witness invalid")?;
        ensure(ncl::central_inversions(&boat, &path) == n, "boat witness count")?;
        counts.push(n);
    }
    ensure(counts == [2, 4, 8], format!("boat counts {counts:?}"))?;
    Ok("AND shortest path 3, boat inversions 2, 4, 8".into())
}

/// Every total configuration, by brute force over orientations.
fn total_configs(g: &ncl::ConstraintGraph) -> Vec<Configuration> {
    let mut out = vec![Configuration(vec![])];
    for e in &g.edges {
        out = out
            .into_iter()
            .flat_map(|c| {
                let mut ends = e.ends.clone();
                ends.dedup();
                ends.into_iter().map(move |v| {
                    let mut c = c.clone();
                    c.0.push(Some(v));
                    c
                })
            })
            .collect();
    }
    out.into_iter().filter(|c| ncl::validate_config(g, c)).collect()
}

fn single_edge() -> ncl::ConstraintGraph {
    let mut g = ncl::ConstraintGraph::new();
    let u = g.add_vertex("u", 0);
    let w = g.add_vertex("w", 0);
    g.add_edge("e", &[u, w], 1);
    g
}

fn retraction() -> Check {
    let mut n = 0;
    for g in [ncl::gadget_and().0, single_edge()] {
        let enc = reduction::encode_graph(&g).map_err(|e| e.to_string())?;
        for c in total_configs(&g) {
            let l = reduction::encode_config(&enc, &c).map_err(|e| e.to_string())?;
            ensure(mll::is_correct_fast(&enc.sequent, &l).unwrap(), "encoding is not a net")?;
            let back = reduction::decode(&enc, &l).map_err(|e| e.to_string())?;
            ensure(back == c, format!("decode differs on {:?}", c.0))?;
            n += 1;
        }
    }
    Ok(format!("{n} configurations decode to themselves"))
}

fn compiler() -> Check {
    let (g, named) = ncl::gadget_and();
    let path: Vec<Configuration> = named.iter().map(|(_, c)| c.clone()).collect();
    let inst = reduction::encode_instance(&g, &path[0], &path[3]).map_err(|e| e.to_string())?;
    let s = &inst.graph.sequent;
    let p = reduction::compile_reconfiguration(&inst, &path).map_err(|e| e.to_string())?;
    ensure(p.start == inst.start, "path does not start at the encoded start")?;
    let mut cur = p.start.clone();
    for st in &p.steps {
        let slot = s.bot_slot(st.bot).ok_or("step moves a non-bot")?;
        ensure(cur.target(slot) != st.to, "a step that changes nothing")?;
        let next = cur.with(slot, st.to);
        let changed = cur.targets().iter().zip(next.targets()).filter(|(a, b)| a != b).count();
        ensure(changed == 1, "a step changing several jumps")?;
        ensure(mll::is_correct_fast(s, &next).unwrap(), "an incorrect intermediate net")?;
        cur = next;
    }
    ensure(cur == inst.end, "path does not end at the encoded target")?;
    let par = mll::parity(s, &inst.start, &inst.end).map_err(|e| e.to_string())?;
    ensure(par == Parity::Even, "endpoints at odd parity")?;
    Ok(format!("{} verified steps on {} nodes", p.len(), s.len()))
}

fn three_partition() -> Check {
    let s = reduction::encode_3partition(&[1, 2, 2], 5).map_err(|e| e.to_string())?;
    let l = reduction::find_proof_net(&s, 1_000_000).map_err(|e| e.to_string())?.ok_or("no net for {1,2,2}")?;
    ensure(dr_correct(&s, &l), "found linking is not a net")?;
    let groups = reduction::decode_3partition(&s, &l).map_err(|e| e.to_string())?;
    let mut flat: Vec<u64> = groups.iter().flatten().copied().collect();
    flat.sort();
    ensure(flat == [1, 2, 2] && groups.iter().all(|g| g.iter().sum::<u64>() == 5), format!("bad partition {groups:?}"))?;
    let s = reduction::encode_3partition(&[1, 1, 4], 3).map_err(|e| e.to_string())?;
    let none = reduction::find_proof_net(&s, 10_000_000).map_err(|e| e.to_string())?;
    ensure(none.is_none(), "a net for {1,1,4}")?;
    Ok(format!("{{1,2,2}} -> {groups:?}, {{1,1,4}} -> none"))
}

fn main() {
    let corpus = corpus();
    let criteria: Vec<Criterion> = vec![
        ("nets of bot*bot, 1, 1, 1, bot*bot", Duration::from_secs(1), Box::new(two_cycles)),
        ("n! inequivalent nets", Duration::from_secs(5), Box::new(factorial)),
        ("parity is even across rewiring steps", Duration::MAX, Box::new(parity_soundness)),
        ("basic sequents: two classes split by parity", Duration::from_secs(60), Box::new(basic_classification)),
        ("fast checker matches exhaustive checker", Duration::MAX, Box::new(|| checker_agreement(&corpus))),
        ("rewire targets match brute force", Duration::MAX, Box::new(|| empire_agreement(&corpus))),
        ("constraint logic gadgets", Duration::from_secs(60), Box::new(gadgets)),
        ("decode inverts encode", Duration::from_secs(30), Box::new(retraction)),
        ("compiled AND reconfiguration", Duration::from_secs(600), Box::new(compiler)),
        ("3-partition through proof search", Duration::from_secs(10), Box::new(three_partition)),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = run();
        let took = t.elapsed();
        let verdict = match &r {
            Ok(_) if took > *limit => {
                failed += 1;
                format!("FAIL ({took:.2?} over the {limit:.0?} limit)")
            }
            Ok(detail) => format!("PASS ({detail}; {took:.2?})"),
            Err(e) => {
                failed += 1;
                format!("FAIL ({e})")
            }
        };
        println!("criterion {:>2}: {name}: {verdict}", i + 1);
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
