//! Mutable working graph for the reduction rules. Vertices keep their
//! original instance ids across deletions; the result is compacted once at
//! the end so traces stay readable.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Instance, LayeredGraph, VertexId};

#[derive(Clone)]
pub(crate) struct Work {
    pub h: u8,
    pub layer_of: Vec<u8>,
    pub alive: Vec<bool>,
    pub adj: Vec<BTreeSet<u32>>,
    pub k: u64,
}

impl Work {
    pub fn from_instance(inst: &Instance) -> Self {
        let g = &inst.graph;
        let n = g.n();
        let mut adj = vec![BTreeSet::new(); n + 1];
        for e in g.edges() {
            adj[e.u.index()].insert(e.v.0);
            adj[e.v.index()].insert(e.u.0);
        }
        Work {
            h: g.h(),
            layer_of: (0..=n as u32)
                .map(|v| if v == 0 { 0 } else { g.layer_of(VertexId(v)) })
                .collect(),
            alive: vec![true; n + 1],
            adj,
            k: inst.k,
        }
    }

    pub fn n_alive(&self) -> usize {
        self.alive.iter().skip(1).filter(|a| **a).count()
    }

    pub fn m_alive(&self) -> usize {
        self.vertices()
            .map(|v| self.adj[v as usize].len())
            .sum::<usize>()
            / 2
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        (1..self.alive.len() as u32).filter(|&v| self.alive[v as usize])
    }

    pub fn layer_vertices(&self, layer: u8) -> Vec<u32> {
        self.vertices()
            .filter(|&v| self.layer_of[v as usize] == layer)
            .collect()
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.adj[v as usize].iter().copied()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].contains(&v)
    }

    pub fn delete_vertex(&mut self, v: u32) {
        debug_assert!(self.alive[v as usize]);
        self.alive[v as usize] = false;
        let nbs: Vec<u32> = self.adj[v as usize].iter().copied().collect();
        for w in nbs {
            self.adj[w as usize].remove(&v);
        }
        self.adj[v as usize].clear();
    }

    pub fn delete_edges_of(&mut self, v: u32) {
        let nbs: Vec<u32> = self.adj[v as usize].iter().copied().collect();
        for w in nbs {
            self.adj[w as usize].remove(&v);
        }
        self.adj[v as usize].clear();
    }

    pub fn add_edge(&mut self, u: u32, v: u32) {
        debug_assert!(self.alive[u as usize] && self.alive[v as usize]);
        debug_assert_eq!(
            self.layer_of[u as usize].abs_diff(self.layer_of[v as usize]),
            1,
            "rule added a non-consecutive edge"
        );
        self.adj[u as usize].insert(v);
        self.adj[v as usize].insert(u);
    }

    /// Connected components over alive vertices, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.alive.len()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s as usize] {
                continue;
            }
            let mut members = vec![s];
            seen[s as usize] = true;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &w in &self.adj[x as usize] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Components of the alive graph restricted to `keep` minus `removed`.
    pub fn components_within(&self, keep: &dyn Fn(u32) -> bool) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.alive.len()];
        let mut out = Vec::new();
        for s in self.vertices().filter(|&v| keep(v)) {
            if seen[s as usize] {
                continue;
            }
            let mut members = vec![s];
            seen[s as usize] = true;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &w in &self.adj[x as usize] {
                    if !seen[w as usize] && keep(w) {
                        seen[w as usize] = true;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// View of a vertex subset as a [`LayeredGraph`] with original layer
    /// indices kept. Returns the view plus the new-id -> old-id table.
    pub fn view(&self, members: &[u32]) -> (LayeredGraph, Vec<u32>) {
        let mut new_of: BTreeMap<u32, u32> = BTreeMap::new();
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        for (i, &v) in sorted.iter().enumerate() {
            new_of.insert(v, i as u32 + 1);
        }
        let mut layer_of = vec![0u8; sorted.len() + 1];
        for &v in &sorted {
            layer_of[new_of[&v] as usize] = self.layer_of[v as usize];
        }
        let mut edges = Vec::new();
        for &v in &sorted {
            for &w in &self.adj[v as usize] {
                if v < w {
                    if let Some(&nw) = new_of.get(&w) {
                        edges.push((new_of[&v], nw, 1));
                    }
                }
            }
        }
        let g = LayeredGraph::try_new_relaxed(self.h, layer_of, edges)
            .expect("work view stays layer-consistent");
        (g, std::iter::once(0).chain(sorted).collect())
    }

    /// Two-layer view of `members` (all on layers `lo`/`lo+1`), relabeled to
    /// layers 1 and 2.
    pub fn two_layer_view(&self, members: &[u32], lo: u8) -> (LayeredGraph, Vec<u32>) {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        let mut new_of: BTreeMap<u32, u32> = BTreeMap::new();
        for (i, &v) in sorted.iter().enumerate() {
            new_of.insert(v, i as u32 + 1);
        }
        let mut layer_of = vec![0u8; sorted.len() + 1];
        for &v in &sorted {
            debug_assert!(self.layer_of[v as usize] == lo || self.layer_of[v as usize] == lo + 1);
            layer_of[new_of[&v] as usize] = self.layer_of[v as usize] - lo + 1;
        }
        let mut edges = Vec::new();
        for &v in &sorted {
            for &w in &self.adj[v as usize] {
                if v < w {
                    if let Some(&nw) = new_of.get(&w) {
                        edges.push((new_of[&v], nw, 1));
                    }
                }
            }
        }
        let g = LayeredGraph::try_new_relaxed(2, layer_of, edges)
            .expect("two-layer view stays consistent");
        (g, std::iter::once(0).chain(sorted).collect())
    }

    /// Compacts alive vertices into a fresh instance: ids become contiguous
    /// in order, empty extreme layers are dropped (occupied layers of a
    /// reduced graph always form a contiguous span).
    pub fn to_instance(&self, k_star: u64) -> Instance {
        let survivors: Vec<u32> = self.vertices().collect();
        let lo_layer = survivors
            .iter()
            .map(|&v| self.layer_of[v as usize])
            .min()
            .unwrap_or(1);
        let hi_layer = survivors
            .iter()
            .map(|&v| self.layer_of[v as usize])
            .max()
            .unwrap_or(2);
        let span = (hi_layer - lo_layer + 1).max(2);
        let mut new_of = vec![0u32; self.alive.len()];
        for (i, &v) in survivors.iter().enumerate() {
            new_of[v as usize] = i as u32 + 1;
        }
        let mut layer_of = vec![0u8; survivors.len() + 1];
        for &v in &survivors {
            layer_of[new_of[v as usize] as usize] = self.layer_of[v as usize] - lo_layer + 1;
        }
        let mut edges = Vec::new();
        for &v in &survivors {
            for &w in &self.adj[v as usize] {
                if v < w {
                    edges.push((new_of[v as usize], new_of[w as usize], 1));
                }
            }
        }
        let graph = LayeredGraph::try_new_relaxed(span, layer_of, edges)
            .expect("compaction preserves validity");
        Instance {
            graph,
            k: self.k,
            k_star,
        }
    }
}
