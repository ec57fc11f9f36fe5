//! JSON forms of nets, proofs, rewiring paths, constraint graphs,
//! configurations and encoding tables. Everything is keyed by name.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::ncl::{Configuration, ConstraintGraph};
use crate::proofcalc::{ProofTree, Rule};
use crate::reduction::{encode_graph, EncodedGraph};
use crate::rewiring::{RewirePath, Step};
use crate::{parse_sequent, print_sequent, Error, Linking, Result, Sequent};

#[derive(Serialize, Deserialize)]
struct NetJson {
    sequent: String,
    jumps: BTreeMap<String, String>,
}

pub fn net_to_json(s: &Sequent, l: &Linking) -> Value {
    json!({ "sequent": print_sequent(s), "jumps": l.to_names(s) })
}

pub fn net_from_json(v: &Value) -> Result<(Sequent, Linking)> {
    let n: NetJson = serde_json::from_value(v.clone())?;
    let s = parse_sequent(&n.sequent)?;
    let l = Linking::from_names(&s, &n.jumps)?;
    Ok((s, l))
}

pub fn proof_to_json(p: &ProofTree) -> Value {
    let rule = match p.rule {
        Rule::One => "one",
        Rule::Bot => "bot",
        Rule::Par => "par",
        Rule::Tensor => "tensor",
    };
    let mut m = Map::new();
    m.insert("rule".into(), rule.into());
    m.insert("conclusion".into(), print_sequent(&p.conclusion).into());
    if let Some(j) = &p.jump {
        m.insert("jump".into(), j.clone().into());
    }
    m.insert("premises".into(), p.premises.iter().map(proof_to_json).collect());
    Value::Object(m)
}

pub fn proof_from_json(v: &Value) -> Result<ProofTree> {
    let field = |k: &str| v.get(k).ok_or_else(|| Error::Json(format!("proof node without `{k}`")));
    let rule = match field("rule")?.as_str() {
        Some("one") => Rule::One,
        Some("bot") => Rule::Bot,
        Some("par") => Rule::Par,
        Some("tensor") => Rule::Tensor,
        other => return Err(Error::Json(format!("unknown rule {other:?}"))),
    };
    let conclusion = parse_sequent(field("conclusion")?.as_str().ok_or_else(|| Error::Json("conclusion".into()))?)?;
    let jump = match v.get("jump") {
        None | Some(Value::Null) => None,
        Some(Value::String(j)) => Some(j.clone()),
        Some(_) => return Err(Error::Json("jump must be a name".into())),
    };
    let premises = match v.get("premises") {
        None => vec![],
        Some(Value::Array(ps)) => ps.iter().map(proof_from_json).collect::<Result<_>>()?,
        Some(_) => return Err(Error::Json("premises must be a list".into())),
    };
    Ok(ProofTree { rule, conclusion, jump, premises })
}

pub fn path_to_json(s: &Sequent, p: &RewirePath) -> Value {
    let steps: Vec<Value> =
        p.steps.iter().map(|st| json!({ "bot": s.name(st.bot), "to": s.name(st.to) })).collect();
    json!({ "start": net_to_json(s, &p.start), "steps": steps })
}

pub fn path_from_json(v: &Value) -> Result<(Sequent, RewirePath)> {
    let (s, start) = net_from_json(v.get("start").ok_or_else(|| Error::Json("path without `start`".into()))?)?;
    #[derive(Deserialize)]
    struct StepJson {
        bot: String,
        to: String,
    }
    let raw: Vec<StepJson> = serde_json::from_value(v.get("steps").cloned().unwrap_or(Value::Array(vec![])))?;
    let steps = raw
        .into_iter()
        .map(|st| Ok(Step { bot: s.id(&st.bot)?, to: s.id(&st.to)? }))
        .collect::<Result<_>>()?;
    Ok((s, RewirePath { start, steps }))
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: String,
    constraint: u32,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: String,
    ends: Vec<String>,
    weight: u32,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
}

pub fn graph_to_json(g: &ConstraintGraph) -> Value {
    let gj = GraphJson {
        vertices: g.vertices.iter().map(|v| VertexJson { id: v.id.clone(), constraint: v.constraint }).collect(),
        edges: g
            .edges
            .iter()
            .map(|e| EdgeJson {
                id: e.id.clone(),
                ends: e.ends.iter().map(|&v| g.vertices[v].id.clone()).collect(),
                weight: e.weight,
            })
            .collect(),
    };
    serde_json::to_value(gj).expect("graph serializes")
}

pub fn graph_from_json(v: &Value) -> Result<ConstraintGraph> {
    let gj: GraphJson = serde_json::from_value(v.clone())?;
    let mut g = ConstraintGraph::new();
    for v in gj.vertices {
        if g.vertex(&v.id).is_some() {
            return Err(Error::DuplicateName(v.id));
        }
        g.add_vertex(v.id, v.constraint);
    }
    for e in gj.edges {
        if g.edge(&e.id).is_some() {
            return Err(Error::DuplicateName(e.id));
        }
        let ends = e
            .ends
            .iter()
            .map(|n| g.vertex(n).ok_or_else(|| Error::UnknownName(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        g.add_edge(e.id, &ends, e.weight);
    }
    g.validate()?;
    Ok(g)
}

/// Edge id to vertex id, with `null` for an unoriented edge.
pub fn config_to_json(g: &ConstraintGraph, c: &Configuration) -> Value {
    let m: Map<String, Value> = g
        .edges
        .iter()
        .zip(&c.0)
        .map(|(e, v)| (e.id.clone(), v.map_or(Value::Null, |v| g.vertices[v].id.clone().into())))
        .collect();
    Value::Object(m)
}

pub fn config_from_json(g: &ConstraintGraph, v: &Value) -> Result<Configuration> {
    let m = v.as_object().ok_or_else(|| Error::Json("configuration must be an object".into()))?;
    for k in m.keys() {
        if g.edge(k).is_none() {
            return Err(Error::UnknownName(k.clone()));
        }
    }
    let mut out = vec![];
    for e in &g.edges {
        out.push(match m.get(&e.id) {
            None | Some(Value::Null) => None,
            Some(Value::String(n)) => {
                let v = g.vertex(n).ok_or_else(|| Error::UnknownName(n.clone()))?;
                if !e.ends.contains(&v) {
                    return Err(Error::Json(format!("`{n}` is not an end of `{}`", e.id)));
                }
                Some(v)
            }
            Some(_) => return Err(Error::Json(format!("orientation of `{}` must be a name or null", e.id))),
        });
    }
    Ok(Configuration(out))
}

/// A list of configurations, as written by `ncl-solve`.
pub fn configs_from_json(g: &ConstraintGraph, v: &Value) -> Result<Vec<Configuration>> {
    v.as_array()
        .ok_or_else(|| Error::Json("expected a list of configurations".into()))?
        .iter()
        .map(|c| config_from_json(g, c))
        .collect()
}

/// Bookkeeping for an encoded graph: the graph itself plus the names of
/// every gadget part.
pub fn tables_to_json(enc: &EncodedGraph) -> Value {
    let s = &enc.sequent;
    let g = &enc.graph;
    let names = |ids: &[usize]| ids.iter().map(|&x| s.name(x).to_string()).collect::<Vec<_>>();
    let vertices: Vec<Value> = enc
        .vertices
        .iter()
        .zip(&g.vertices)
        .map(|(vg, v)| {
            json!({
                "id": v.id,
                "constraints": names(&vg.constraints),
                "indicator_target": s.name(vg.target),
            })
        })
        .collect();
    let edges: Vec<Value> = enc
        .edges
        .iter()
        .zip(&g.edges)
        .map(|(eg, e)| json!({ "id": e.id, "indicator": s.name(eg.indicator), "weights": names(&eg.weights) }))
        .collect();
    json!({
        "graph": graph_to_json(g),
        "n": enc.n,
        "m": enc.m,
        "p": enc.p,
        "vertices": vertices,
        "edges": edges,
        "absorbers": names(&enc.absorbers),
    })
}

/// Rebuilds the encoding from its tables, checking they match.
pub fn tables_from_json(v: &Value) -> Result<EncodedGraph> {
    let g = graph_from_json(v.get("graph").ok_or_else(|| Error::Json("tables without `graph`".into()))?)?;
    let enc = encode_graph(&g)?;
    if tables_to_json(&enc) != *v {
        return Err(Error::Json("tables do not match the encoding of their graph".into()));
    }
    Ok(enc)
}

pub fn parse(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value prints")
}
