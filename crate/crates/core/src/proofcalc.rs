//! Sequent-calculus proofs with the four unit rules, and their translation
//! to and from proof nets.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::proofnet::{correct_on, is_net, Linking};
use crate::sequent::{Formula, Kind, NodeId, Sequent};
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    One,
    Bot,
    Par,
    Tensor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub rule: Rule,
    pub conclusion: Sequent,
    /// Jump target of the introduced bot (bot rule only).
    pub jump: Option<String>,
    pub premises: Vec<ProofTree>,
}

impl ProofTree {
    /// Number of rule instances.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::size).sum::<usize>()
    }
}

fn root_formulas(s: &Sequent) -> BTreeMap<String, Formula> {
    s.roots().iter().map(|&r| (s.name(r).to_string(), s.formula(r))).collect()
}

/// Checks every inference against the rules, including name preservation.
pub fn check_proof(p: &ProofTree) -> bool {
    let concl = root_formulas(&p.conclusion);
    let prem: Vec<BTreeMap<String, Formula>> =
        p.premises.iter().map(|q| root_formulas(&q.conclusion)).collect();
    let ok = match p.rule {
        Rule::One => {
            p.premises.is_empty()
                && p.jump.is_none()
                && concl.len() == 1
                && concl.values().all(|f| f.kind == Kind::One)
        }
        Rule::Bot => {
            let Some(j) = &p.jump else { return false };
            if p.premises.len() != 1 || p.premises[0].conclusion.lookup(j).is_none() {
                return false;
            }
            let extra: Vec<_> = concl.iter().filter(|(k, _)| !prem[0].contains_key(*k)).collect();
            extra.len() == 1
                && extra[0].1.kind == Kind::Bot
                && prem[0].iter().all(|(k, f)| concl.get(k) == Some(f))
        }
        Rule::Par => {
            if p.premises.len() != 1 || p.jump.is_some() {
                return false;
            }
            let intro: Vec<_> = concl.iter().filter(|(k, _)| !prem[0].contains_key(*k)).collect();
            if intro.len() != 1 || intro[0].1.kind != Kind::Par {
                return false;
            }
            let (v, f) = intro[0];
            let mut expect = concl.clone();
            expect.remove(v);
            for c in &f.children {
                expect.insert(c.name.clone().unwrap(), c.clone());
            }
            expect == prem[0]
        }
        Rule::Tensor => {
            if p.premises.len() < 2 || p.jump.is_some() {
                return false;
            }
            let all_prem: BTreeSet<&String> = prem.iter().flat_map(|m| m.keys()).collect();
            let intro: Vec<_> = concl.iter().filter(|(k, _)| !all_prem.contains(*k)).collect();
            if intro.len() != 1 || intro[0].1.kind != Kind::Tensor {
                return false;
            }
            let (v, f) = intro[0];
            if f.children.len() != prem.len() {
                return false;
            }
            let mut rest = concl.clone();
            rest.remove(v);
            let mut seen = 0;
            for (c, m) in f.children.iter().zip(&prem) {
                let cn = c.name.clone().unwrap();
                if m.get(&cn) != Some(c) {
                    return false;
                }
                for (k, g) in m {
                    if *k != cn {
                        if rest.get(k) != Some(g) {
                            return false;
                        }
                        seen += 1;
                    }
                }
            }
            seen == rest.len()
        }
    };
    ok && p.premises.iter().all(check_proof)
}

/// The linking recorded by the bot rules of a proof, over its conclusion.
pub fn proof_to_net(p: &ProofTree) -> Result<Linking> {
    if !check_proof(p) {
        return Err(Error::Precondition("not a valid proof".into()));
    }
    let mut jumps = BTreeMap::new();
    collect_jumps(p, &mut jumps);
    Linking::from_names(&p.conclusion, &jumps)
}

fn collect_jumps(p: &ProofTree, out: &mut BTreeMap<String, String>) {
    if p.rule == Rule::Bot {
        let prem = &p.premises[0].conclusion;
        let a = p
            .conclusion
            .roots()
            .iter()
            .map(|&r| p.conclusion.name(r))
            .find(|n| prem.lookup(n).is_none())
            .unwrap();
        out.insert(a.to_string(), p.jump.clone().unwrap());
    }
    for q in &p.premises {
        collect_jumps(q, out);
    }
}

/// A proof of a correct net whose bot rules record the net's jumps.
pub fn sequentialise(s: &Sequent, l: &Linking) -> Result<ProofTree> {
    l.validate(s)?;
    if !is_net(s, l) {
        return Err(Error::Precondition("not a proof net".into()));
    }
    seq(s, l, s.roots().to_vec())
}

fn seq(s: &Sequent, l: &Linking, roots: Vec<NodeId>) -> Result<ProofTree> {
    let conclusion = s.restrict(&roots);
    if roots.len() == 1 && s.kind(roots[0]) == Kind::One {
        return Ok(ProofTree { rule: Rule::One, conclusion, jump: None, premises: vec![] });
    }
    let mut targeted = BTreeSet::new();
    for &r in &roots {
        for v in s.subtree(r) {
            if s.kind(v) == Kind::Bot {
                targeted.insert(l.of(s, v));
            }
        }
    }
    let without = |r: NodeId| roots.iter().copied().filter(|&x| x != r).collect::<Vec<_>>();
    for &r in &roots {
        if s.kind(r) == Kind::Par && !targeted.contains(&r) {
            let mut prem = without(r);
            prem.extend_from_slice(s.children(r));
            let p = seq(s, l, prem)?;
            return Ok(ProofTree { rule: Rule::Par, conclusion, jump: None, premises: vec![p] });
        }
    }
    for &r in &roots {
        if s.kind(r) == Kind::Bot && !targeted.contains(&r) {
            let p = seq(s, l, without(r))?;
            let jump = Some(s.name(l.of(s, r)).to_string());
            return Ok(ProofTree { rule: Rule::Bot, conclusion, jump, premises: vec![p] });
        }
    }
    for &r in &roots {
        if s.kind(r) != Kind::Tensor || targeted.contains(&r) {
            continue;
        }
        if let Some(parts) = split_at(s, l, &roots, r) {
            let premises = parts.into_iter().map(|p| seq(s, l, p)).collect::<Result<Vec<_>>>()?;
            return Ok(ProofTree { rule: Rule::Tensor, conclusion, jump: None, premises });
        }
    }
    Err(Error::Precondition("no rule applies; the net is not sequentialisable".into()))
}

/// Root lists of the components left by removing tensor root `t`, one per
/// child of `t`, if each is itself a correct net.
fn split_at(s: &Sequent, l: &Linking, roots: &[NodeId], t: NodeId) -> Option<Vec<Vec<NodeId>>> {
    let mut rest: Vec<NodeId> = roots.iter().copied().filter(|&x| x != t).collect();
    rest.extend_from_slice(s.children(t));
    let mut uf = UnionFind::new(s.len());
    for &r in &rest {
        for v in s.subtree(r) {
            for &c in s.children(v) {
                uf.union(v, c);
            }
            if s.kind(v) == Kind::Bot {
                uf.union(v, l.of(s, v));
            }
        }
    }
    let kids = s.children(t);
    let mut parts: Vec<Vec<NodeId>> = vec![vec![]; kids.len()];
    for &r in &rest {
        let c = uf.find(r);
        let i = kids.iter().position(|&k| uf.find(k) == c)?;
        parts[i].push(r);
    }
    for (i, &k) in kids.iter().enumerate() {
        if kids[..i].iter().any(|&j| uf.find(j) == uf.find(k)) {
            return None;
        }
    }
    for p in &mut parts {
        p.sort_by_key(|&r| (roots.iter().position(|&x| x == r).unwrap_or(usize::MAX), r));
    }
    parts.iter().all(|p| correct_on(s, l, p)).then_some(parts)
}

/// Retargets jumps onto ones, one verified rewiring step at a time.
pub fn normalize_to_unit_targets(s: &Sequent, l: &Linking) -> Result<Linking> {
    l.validate(s)?;
    if !is_net(s, l) {
        return Err(Error::Precondition("not a proof net".into()));
    }
    let mut l = l.clone();
    loop {
        let loose: Vec<usize> =
            (0..l.len()).filter(|&i| s.kind(l.target(i)) != Kind::One).collect();
        if loose.is_empty() {
            return Ok(l);
        }
        let direct = loose.iter().find_map(|&i| {
            s.ones().iter().map(|&w| l.with(i, w)).find(|m| is_net(s, m))
        });
        if let Some(m) = direct {
            l = m;
            continue;
        }
        // Otherwise move some jump one level down its target.
        let down = loose.iter().find_map(|&i| {
            let t = l.target(i);
            s.children(t).iter().map(|&c| l.with(i, c)).find(|m| is_net(s, m))
        });
        match down {
            Some(m) => l = m,
            None => return Err(Error::Precondition("no restricted form reached".into())),
        }
    }
}

struct Gen {
    rng: ChaCha8Rng,
    fresh: usize,
}

impl Gen {
    fn name(&mut self) -> String {
        self.fresh += 1;
        format!("n{}", self.fresh - 1)
    }

    fn one(&mut self) -> ProofTree {
        let c = Sequent::new(vec![Formula::one().named(self.name())]).unwrap();
        ProofTree { rule: Rule::One, conclusion: c, jump: None, premises: vec![] }
    }

    fn bot(&mut self, p: ProofTree) -> ProofTree {
        let c = &p.conclusion;
        let w = c.ones()[self.rng.gen_range(0..c.ones().len())];
        let jump = Some(c.name(w).to_string());
        let mut fs: Vec<Formula> = c.roots().iter().map(|&r| c.formula(r)).collect();
        let at = self.rng.gen_range(0..=fs.len());
        fs.insert(at, Formula::bot().named(self.name()));
        let conclusion = Sequent::new(fs).unwrap();
        ProofTree { rule: Rule::Bot, conclusion, jump, premises: vec![p] }
    }

    fn par(&mut self, p: ProofTree) -> ProofTree {
        let c = &p.conclusion;
        let mut cand: Vec<NodeId> =
            c.roots().iter().copied().filter(|&r| c.kind(r) != Kind::Par).collect();
        let k = 2 + usize::from(cand.len() > 2 && self.rng.gen_bool(0.3));
        let mut pick = vec![];
        for _ in 0..k {
            pick.push(cand.remove(self.rng.gen_range(0..cand.len())));
        }
        pick.sort_unstable();
        let mut fs = vec![];
        let mut placed = false;
        for &r in c.roots() {
            if pick.contains(&r) {
                if !placed {
                    let kids = pick.iter().map(|&x| c.formula(x)).collect();
                    fs.push(Formula::par(kids).named(self.name()));
                    placed = true;
                }
            } else {
                fs.push(c.formula(r));
            }
        }
        let conclusion = Sequent::new(fs).unwrap();
        ProofTree { rule: Rule::Par, conclusion, jump: None, premises: vec![p] }
    }

    fn tensor(&mut self, ps: Vec<ProofTree>) -> ProofTree {
        let mut ps: Vec<ProofTree> = ps
            .into_iter()
            .map(|p| {
                let c = &p.conclusion;
                if c.roots().iter().all(|&r| c.kind(r) == Kind::Tensor) {
                    self.bot(p)
                } else {
                    p
                }
            })
            .collect();
        let mut kids = vec![];
        let mut rest = vec![];
        for p in &ps {
            let c = &p.conclusion;
            let cand: Vec<NodeId> =
                c.roots().iter().copied().filter(|&r| c.kind(r) != Kind::Tensor).collect();
            let chosen = cand[self.rng.gen_range(0..cand.len())];
            kids.push(c.formula(chosen));
            rest.extend(c.roots().iter().filter(|&&r| r != chosen).map(|&r| c.formula(r)));
        }
        let at = self.rng.gen_range(0..=rest.len());
        rest.insert(at, Formula::tensor(kids).named(self.name()));
        let conclusion = Sequent::new(rest).unwrap();
        ProofTree { rule: Rule::Tensor, conclusion, jump: None, premises: std::mem::take(&mut ps) }
    }
}

/// A random valid proof, deterministic in `seed`. `size` bounds the number
/// of construction steps; bot rules always jump onto ones.
pub fn random_proof(seed: u64, size: usize) -> ProofTree {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), fresh: 0 };
    let mut pool = vec![g.one()];
    for _ in 1..size.max(1) {
        let roll: f64 = g.rng.gen();
        if roll < 0.15 {
            let p = g.one();
            pool.push(p);
            continue;
        }
        let i = g.rng.gen_range(0..pool.len());
        if roll < 0.5 {
            let p = pool.swap_remove(i);
            pool.push(g.bot(p));
        } else if roll < 0.75 {
            let c = &pool[i].conclusion;
            if c.roots().iter().filter(|&&r| c.kind(r) != Kind::Par).count() >= 2 {
                let p = pool.swap_remove(i);
                pool.push(g.par(p));
            }
        } else if pool.len() >= 2 {
            let a = pool.swap_remove(i);
            let j = g.rng.gen_range(0..pool.len());
            let b = pool.swap_remove(j);
            pool.push(g.tensor(vec![a, b]));
        }
    }
    while pool.len() > 1 {
        let a = pool.pop().unwrap();
        let b = pool.pop().unwrap();
        pool.push(g.tensor(vec![b, a]));
    }
    pool.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequent::parse_sequent;

    #[test]
    fn bot_over_one() {
        let one = ProofTree {
            rule: Rule::One,
            conclusion: parse_sequent("1:x").unwrap(),
            jump: None,
            premises: vec![],
        };
        let p = ProofTree {
            rule: Rule::Bot,
            conclusion: parse_sequent("bot:a, 1:x").unwrap(),
            jump: Some("x".into()),
            premises: vec![one.clone()],
        };
        assert!(check_proof(&p));
        let s = parse_sequent("bot:a, 1:x").unwrap();
        assert_eq!(proof_to_net(&p).unwrap(), Linking::from_pairs(&s, &[("a", "x")]).unwrap());
        let bad = ProofTree { jump: Some("a".into()), ..p.clone() };
        assert!(!check_proof(&bad));
        let outside = ProofTree { jump: Some("zz".into()), ..p };
        assert!(!check_proof(&outside));
    }

    #[test]
    fn tensor_of_ones() {
        let one = |n: &str| ProofTree {
            rule: Rule::One,
            conclusion: parse_sequent(&format!("1:{n}")).unwrap(),
            jump: None,
            premises: vec![],
        };
        let p = ProofTree {
            rule: Rule::Tensor,
            conclusion: parse_sequent("1:x * 1:y").unwrap(),
            jump: None,
            premises: vec![one("x"), one("y")],
        };
        assert!(check_proof(&p));
        let swapped = ProofTree { premises: vec![one("y"), one("x")], ..p };
        assert!(!check_proof(&swapped));
    }

    #[test]
    fn sequentialise_identity_net() {
        let s = parse_sequent("bot:a*bot:b, 1:x|1:y").unwrap();
        let l = Linking::from_pairs(&s, &[("a", "x"), ("b", "y")]).unwrap();
        let p = sequentialise(&s, &l).unwrap();
        assert!(check_proof(&p));
        assert_eq!(p.size(), 6);
        assert_eq!(proof_to_net(&p).unwrap(), l);
    }

    #[test]
    fn sequentialise_rejects_incorrect() {
        let s = parse_sequent("bot:a*bot:b, 1:x|1:y").unwrap();
        let l = Linking::from_pairs(&s, &[("a", "x"), ("b", "x")]).unwrap();
        assert!(sequentialise(&s, &l).is_err());
    }

    #[test]
    fn normalize_moves_tensor_jump() {
        let s = parse_sequent("bot:a, bot:b, 1:x * 1:y").unwrap();
        let l = Linking::from_pairs(&s, &[("a", "2"), ("b", "x")]).unwrap();
        assert!(is_net(&s, &l));
        let m = normalize_to_unit_targets(&s, &l).unwrap();
        assert!(m.is_restricted(&s) && is_net(&s, &m));
        let same = normalize_to_unit_targets(&s, &m).unwrap();
        assert_eq!(same, m);
    }

    #[test]
    fn random_proofs() {
        assert_eq!(random_proof(0, 1).rule, Rule::One);
        for seed in 0..50 {
            let p = random_proof(seed, 20);
            assert!(check_proof(&p), "seed {seed}");
            let l = proof_to_net(&p).unwrap();
            assert!(is_net(&p.conclusion, &l));
        }
        assert_ne!(random_proof(1, 20), random_proof(2, 20));
    }
}
