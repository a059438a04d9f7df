use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::dynamics::Trace;

use super::{detect_switches, AnalysisError};

/// One flock over its lifetime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlockNode {
    pub id: usize,
    pub members: Vec<usize>,
    pub formed: u64,
    /// Leaves have height 0.
    pub height: usize,
    /// Earlier flocks this one came from.
    pub children: Vec<usize>,
    /// Later flocks this one went into.
    pub parents: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitEvent {
    pub tick: u64,
    pub from: usize,
    pub into: Vec<usize>,
}

/// Flock history of a trace: a forest when flocks only merge, a DAG otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Genealogy {
    pub nodes: Vec<FlockNode>,
    pub splits: Vec<SplitEvent>,
    /// Last tick at which an edge was lost.
    pub fragmentation_breakpoint: Option<u64>,
}

impl Genealogy {
    pub fn is_tree(&self) -> bool {
        self.splits.is_empty()
    }

    pub fn roots(&self) -> Vec<usize> {
        self.nodes.iter().filter(|n| n.parents.is_empty()).map(|n| n.id).collect()
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.nodes.iter().filter(|n| n.children.is_empty()).map(|n| n.id).collect()
    }

    pub fn formation_ticks_by_height(&self) -> BTreeMap<usize, Vec<u64>> {
        let mut out: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
        for n in &self.nodes {
            out.entry(n.height).or_default().push(n.formed);
        }
        out
    }

    /// Indented listing from the roots down.
    pub fn to_text(&self) -> String {
        // nodes reachable along several paths are expanded once
        fn walk(g: &Genealogy, id: usize, depth: usize, seen: &mut [bool], out: &mut String) {
            let n = &g.nodes[id];
            let pad = "  ".repeat(depth);
            if seen[id] {
                let _ = writeln!(out, "{pad}{:?} formed {} (above)", n.members, n.formed);
                return;
            }
            seen[id] = true;
            let _ = writeln!(out, "{pad}{:?} formed {} height {}", n.members, n.formed, n.height);
            for &c in &n.children {
                walk(g, c, depth + 1, seen, out);
            }
        }
        let mut out = String::new();
        let mut seen = vec![false; self.nodes.len()];
        for r in self.roots() {
            walk(self, r, 0, &mut seen, &mut out);
        }
        for s in &self.splits {
            let _ = writeln!(out, "split at {}: {:?} -> {:?}", s.tick, self.nodes[s.from].members, s.into);
        }
        out
    }

    /// Edge list `child -> parent` labeled with the parent's formation tick.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph fusion {\n");
        for n in &self.nodes {
            let label: Vec<String> = n.members.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "  n{} [label=\"{{{}}}\"];", n.id, label.join(","));
        }
        for n in &self.nodes {
            for &p in &n.parents {
                let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", n.id, p, self.nodes[p].formed);
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn fusion_tree(trace: &Trace) -> Result<Genealogy, AnalysisError> {
    let mut nodes: Vec<FlockNode> = Vec::new();
    let mut splits = Vec::new();
    let Some(first) = trace.records.first() else {
        return Ok(Genealogy { nodes, splits, fragmentation_breakpoint: None });
    };
    let mut alive: HashMap<Vec<usize>, usize> = HashMap::new();
    for f in &first.flocks {
        let id = nodes.len();
        nodes.push(FlockNode { id, members: f.clone(), formed: first.tick, height: 0, children: vec![], parents: vec![] });
        alive.insert(f.clone(), id);
    }
    let mut prev = first.flocks.clone();
    for rec in &trace.records[1..] {
        if rec.flocks == prev {
            continue;
        }
        let mut old_of = vec![usize::MAX; trace.n];
        for f in &prev {
            for &i in f {
                old_of[i] = alive[f];
            }
        }
        let mut next_alive = HashMap::new();
        let mut went_into: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for f in &rec.flocks {
            if let Some(&id) = alive.get(f) {
                next_alive.insert(f.clone(), id);
                continue;
            }
            let id = nodes.len();
            let mut children: Vec<usize> = f.iter().map(|&i| old_of[i]).collect();
            children.sort_unstable();
            children.dedup();
            let height = 1 + children.iter().map(|&c| nodes[c].height).max().unwrap_or(0);
            for &c in &children {
                nodes[c].parents.push(id);
                went_into.entry(c).or_default().push(id);
            }
            nodes.push(FlockNode { id, members: f.clone(), formed: rec.tick, height, children, parents: vec![] });
            next_alive.insert(f.clone(), id);
        }
        for (from, into) in went_into {
            let whole = into.len() == 1 && nodes[from].members.iter().all(|i| nodes[into[0]].members.contains(i));
            if !whole {
                splits.push(SplitEvent { tick: rec.tick, from, into });
            }
        }
        alive = next_alive;
        prev = rec.flocks.clone();
    }
    let fragmentation_breakpoint = detect_switches(trace)?.last_edge_loss();
    Ok(Genealogy { nodes, splits, fragmentation_breakpoint })
}
