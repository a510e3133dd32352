//! Crossing-free drawability for 2 and 3 layers, with optional endpoint and
//! partial-order constraints, producing witness drawings.
//!
//! The 2-layer case is caterpillar recognition: a bipartite graph has a
//! crossing-free 2-layer drawing iff every component is a caterpillar, and
//! that drawing is unique up to reversal and pendant permutation. The
//! 3-layer engine exploits the same rigidity: each side (layers 1-2 and 3-2)
//! decomposes into caterpillar blocks whose middle-layer projections must
//! appear contiguously and in block order, so the search runs over
//! middle-layer orders with per-side block states and memoized dead ends.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::graph::{count_crossings, Drawing, LayeredGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanarityError {
    #[error("operation requires a {expected}-layer graph, got {got}")]
    WrongLayerCount { expected: String, got: u8 },
    #[error("graph must be connected")]
    NotConnected,
    #[error("constraint vertex {0} is not on layer {1}")]
    ConstraintWrongLayer(VertexId, u8),
    #[error("endpoint pair on layer {0} must name two distinct vertices")]
    PairNotDistinct(u8),
    #[error("layer {0} has fewer than 2 vertices but an endpoint pair was supplied")]
    PairOnTinyLayer(u8),
    #[error("missing endpoint pair for layer {0}")]
    MissingPair(u8),
    #[error("order constraints are cyclic on layer {0}")]
    CyclicConstraints(u8),
}

/// Partial orders given as unions of chains, plus optional per-layer
/// leftmost/rightmost endpoint pairs.
#[derive(Clone, Debug, Default)]
pub struct OrderConstraints {
    h: u8,
    chains: Vec<Vec<Vec<VertexId>>>,
    pairs: Vec<Option<(VertexId, VertexId)>>,
}

impl OrderConstraints {
    pub fn empty(h: u8) -> Self {
        OrderConstraints {
            h,
            chains: vec![Vec::new(); h as usize],
            pairs: vec![None; h as usize],
        }
    }

    pub fn h(&self) -> u8 {
        self.h
    }

    pub fn add_chain(&mut self, layer: u8, chain: Vec<VertexId>) {
        if chain.len() >= 2 {
            self.chains[layer as usize - 1].push(chain);
        }
    }

    pub fn set_pair(&mut self, layer: u8, s: VertexId, t: VertexId) {
        self.pairs[layer as usize - 1] = Some((s, t));
    }

    pub fn chains(&self, layer: u8) -> &[Vec<VertexId>] {
        &self.chains[layer as usize - 1]
    }

    pub fn pair(&self, layer: u8) -> Option<(VertexId, VertexId)> {
        self.pairs[layer as usize - 1]
    }

    pub fn is_empty(&self) -> bool {
        self.chains.iter().all(|c| c.is_empty()) && self.pairs.iter().all(|p| p.is_none())
    }

    /// Chain successors as a digraph per layer, indexed by vertex id.
    fn digraph(&self, graph: &LayeredGraph, layer: u8) -> Vec<Vec<VertexId>> {
        let mut succ = vec![Vec::new(); graph.n() + 1];
        for chain in self.chains(layer) {
            for w in chain.windows(2) {
                succ[w[0].index()].push(w[1]);
            }
        }
        succ
    }

    /// Checks that chains live on their layers, pairs are distinct, and the
    /// induced relation per layer is acyclic.
    pub fn validate_for(&self, graph: &LayeredGraph) -> Result<(), PlanarityError> {
        for layer in 1..=self.h {
            for chain in self.chains(layer) {
                for &v in chain {
                    if v.0 == 0 || v.index() > graph.n() || graph.layer_of(v) != layer {
                        return Err(PlanarityError::ConstraintWrongLayer(v, layer));
                    }
                }
            }
            if let Some((s, t)) = self.pair(layer) {
                if s == t {
                    return Err(PlanarityError::PairNotDistinct(layer));
                }
                for v in [s, t] {
                    if v.0 == 0 || v.index() > graph.n() || graph.layer_of(v) != layer {
                        return Err(PlanarityError::ConstraintWrongLayer(v, layer));
                    }
                }
                if graph.layer(layer).len() < 2 {
                    return Err(PlanarityError::PairOnTinyLayer(layer));
                }
            }
            // Cycle check by DFS over chain successors.
            let succ = self.digraph(graph, layer);
            let mut state = vec![0u8; graph.n() + 1];
            fn dfs(v: usize, succ: &[Vec<VertexId>], state: &mut [u8]) -> bool {
                state[v] = 1;
                for w in &succ[v] {
                    match state[w.index()] {
                        0 => {
                            if dfs(w.index(), succ, state) {
                                return true;
                            }
                        }
                        1 => return true,
                        _ => {}
                    }
                }
                state[v] = 2;
                false
            }
            for v in graph.layer(layer) {
                if state[v.index()] == 0 && dfs(v.index(), &succ, &mut state) {
                    return Err(PlanarityError::CyclicConstraints(layer));
                }
            }
        }
        Ok(())
    }

    /// Whether a drawing satisfies every chain and pair.
    pub fn satisfied_by(&self, graph: &LayeredGraph, drawing: &Drawing) -> bool {
        let pos = drawing.positions(graph);
        for layer in 1..=self.h {
            for chain in self.chains(layer) {
                for w in chain.windows(2) {
                    if pos[w[0].index()] >= pos[w[1].index()] {
                        return false;
                    }
                }
            }
            if let Some((s, t)) = self.pair(layer) {
                let ord = drawing.order(layer);
                if ord.first() != Some(&s) || ord.last() != Some(&t) {
                    return false;
                }
            }
        }
        true
    }
}

/// A caterpillar component of one side's bipartite subgraph, reduced to its
/// per-layer group sequences. A group is a set of vertices whose internal
/// order is free (pendants of one backbone vertex); the group order is rigid
/// up to reversing the whole block.
#[derive(Clone, Debug)]
struct Block {
    spine_groups: Vec<Vec<VertexId>>,
    side_groups: Vec<Vec<VertexId>>,
}

/// Caterpillar test on an explicit component of a bipartite (two-layer-gap)
/// subgraph. `adj` is the adjacency restricted to that subgraph. Returns the
/// backbone in path order, starting at the end with the smaller vertex id.
fn caterpillar_backbone(
    members: &[VertexId],
    adj: &HashMap<VertexId, Vec<VertexId>>,
) -> Option<Vec<VertexId>> {
    let deg = |v: VertexId| adj.get(&v).map_or(0, |a| a.len());
    let edge_count: usize = members.iter().map(|v| deg(*v)).sum::<usize>() / 2;
    if edge_count != members.len() - 1 {
        return None; // has a cycle
    }
    let spine: Vec<VertexId> = members.iter().copied().filter(|v| deg(*v) >= 2).collect();
    if spine.is_empty() {
        // Single vertex or single edge: smallest id is the whole backbone.
        return Some(vec![*members.iter().min().unwrap()]);
    }
    let spine_set: HashSet<VertexId> = spine.iter().copied().collect();
    let spine_deg = |v: VertexId| adj[&v].iter().filter(|w| spine_set.contains(w)).count();
    let mut ends: Vec<VertexId> = spine
        .iter()
        .copied()
        .filter(|v| spine_deg(*v) <= 1)
        .collect();
    if spine.len() == 1 {
        return Some(spine);
    }
    if ends.len() != 2 || spine.iter().any(|v| spine_deg(*v) > 2) {
        return None; // spine is not a path
    }
    ends.sort();
    let start = ends[0];
    let mut path = vec![start];
    let mut prev = None;
    let mut cur = start;
    loop {
        let next = adj[&cur]
            .iter()
            .copied()
            .find(|w| spine_set.contains(w) && Some(*w) != prev);
        match next {
            Some(w) => {
                path.push(w);
                prev = Some(cur);
                cur = w;
            }
            None => break,
        }
    }
    if path.len() != spine.len() {
        return None; // spine disconnected: not a path
    }
    Some(path)
}

/// Expands a backbone into per-layer group sequences for the canonical
/// drawing: walking the backbone, a layer receives either the backbone
/// vertex itself or the pendants of the opposite-layer backbone vertex.
fn blocks_from_backbone(
    backbone: &[VertexId],
    adj: &HashMap<VertexId, Vec<VertexId>>,
    spine_layer_of: impl Fn(VertexId) -> bool,
) -> Block {
    let backbone_set: HashSet<VertexId> = backbone.iter().copied().collect();
    let mut spine_groups = Vec::new();
    let mut side_groups = Vec::new();
    for &b in backbone {
        let mut pend: Vec<VertexId> = adj
            .get(&b)
            .map(|a| {
                a.iter()
                    .copied()
                    .filter(|w| !backbone_set.contains(w))
                    .collect()
            })
            .unwrap_or_default();
        pend.sort();
        if spine_layer_of(b) {
            spine_groups.push(vec![b]);
            if !pend.is_empty() {
                side_groups.push(pend);
            }
        } else {
            side_groups.push(vec![b]);
            if !pend.is_empty() {
                spine_groups.push(pend);
            }
        }
    }
    Block {
        spine_groups,
        side_groups,
    }
}

/// Decides whether every component of a 2-layer graph is a caterpillar; on
/// success returns the canonical drawing (components left to right by
/// smallest vertex id, backbone in path order, pendant ties ascending).
pub fn is_caterpillar_forest(graph: &LayeredGraph) -> Result<Option<Drawing>, PlanarityError> {
    if graph.h() != 2 {
        return Err(PlanarityError::WrongLayerCount {
            expected: "2".into(),
            got: graph.h(),
        });
    }
    let adj_all = graph.adjacency();
    let mut order1 = Vec::new();
    let mut order2 = Vec::new();
    for comp in graph.components() {
        let mut adj: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
        for &v in &comp {
            let mut nb: Vec<VertexId> = adj_all[v.index()].iter().map(|(w, _)| *w).collect();
            nb.sort();
            adj.insert(v, nb);
        }
        let backbone = match caterpillar_backbone(&comp, &adj) {
            Some(b) => b,
            None => return Ok(None),
        };
        let block = blocks_from_backbone(&backbone, &adj, |v| graph.layer_of(v) == 2);
        for g in &block.spine_groups {
            order2.extend_from_slice(g);
        }
        for g in &block.side_groups {
            order1.extend_from_slice(g);
        }
    }
    let drawing = Drawing::new(vec![order1, order2]);
    debug_assert_eq!(count_crossings(graph, &drawing).unwrap().total, 0);
    Ok(Some(drawing))
}

/// Per-side search state: which block is open, its orientation, the current
/// group index, and how many of that group are still unplaced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct SideState {
    active: Option<(u16, bool, u16)>,
    done: u16,
}

struct Engine<'a> {
    graph: &'a LayeredGraph,
    constraints: &'a OrderConstraints,
    /// Side layer indices: [1] for h=2, [1, 3] for h=3.
    side_layers: Vec<u8>,
    /// Blocks per side.
    blocks: Vec<Vec<Block>>,
    /// For each side, vertex -> (block, group index forward, group index of
    /// membership) on the spine layer.
    spine_membership: Vec<HashMap<VertexId, (u16, u16)>>,
    spine: Vec<VertexId>,
    /// chain successors/predecessor counts on the spine layer
    spine_succ: Vec<Vec<VertexId>>,
    spine_pred_count: HashMap<VertexId, usize>,
    memo: HashSet<(Vec<u64>, Vec<SideState>)>,
}

impl<'a> Engine<'a> {
    fn spine_pair(&self) -> Option<(VertexId, VertexId)> {
        self.constraints.pair(2)
    }

    fn group_len(&self, side: usize, block: u16, fwd: bool, idx: u16) -> usize {
        let groups = &self.blocks[side][block as usize].spine_groups;
        let i = if fwd {
            idx as usize
        } else {
            groups.len() - 1 - idx as usize
        };
        groups[i].len()
    }

    fn group_count(&self, side: usize, block: u16) -> u16 {
        self.blocks[side][block as usize].spine_groups.len() as u16
    }

    fn in_group(&self, side: usize, block: u16, fwd: bool, idx: u16, v: VertexId) -> bool {
        let groups = &self.blocks[side][block as usize].spine_groups;
        let i = if fwd {
            idx as usize
        } else {
            groups.len() - 1 - idx as usize
        };
        groups[i].contains(&v)
    }

    fn search(
        &mut self,
        placed: &mut Vec<VertexId>,
        placed_set: &mut HashSet<VertexId>,
        group_remaining: &mut Vec<Vec<usize>>,
        states: Vec<SideState>,
        pred_left: &mut HashMap<VertexId, usize>,
    ) -> Option<Drawing> {
        if placed.len() == self.spine.len() {
            return self.finish(placed);
        }
        let key = (self.mask(placed_set), states.clone());
        if self.memo.contains(&key) {
            return None;
        }
        let candidates: Vec<VertexId> = self
            .spine
            .iter()
            .copied()
            .filter(|v| !placed_set.contains(v))
            .collect();
        for v in candidates {
            if pred_left.get(&v).copied().unwrap_or(0) > 0 {
                continue;
            }
            if let Some((s2, t2)) = self.spine_pair() {
                if placed.is_empty() && v != s2 {
                    continue;
                }
                if v == t2 && placed.len() + 1 != self.spine.len() {
                    continue;
                }
            }
            // For each side, the ways v can be accepted.
            let mut per_side_options: Vec<Vec<Option<(u16, bool, u16)>>> = Vec::new();
            let mut feasible = true;
            for side in 0..self.side_layers.len() {
                let membership = self.spine_membership[side].get(&v).copied();
                let st = states[side];
                let opts: Vec<Option<(u16, bool, u16)>> = match membership {
                    None => vec![None],
                    Some((block, _)) => match st.active {
                        Some((ab, fwd, gi)) => {
                            if ab == block && self.in_group(side, block, fwd, gi, v) {
                                vec![Some((block, fwd, gi))]
                            } else {
                                Vec::new()
                            }
                        }
                        None => {
                            let mut o = Vec::new();
                            let gc = self.group_count(side, block);
                            if self.in_group(side, block, true, 0, v) {
                                o.push(Some((block, true, 0)));
                            }
                            if gc > 1 && self.in_group(side, block, false, 0, v) {
                                o.push(Some((block, false, 0)));
                            }
                            o
                        }
                    },
                };
                if opts.is_empty() {
                    feasible = false;
                    break;
                }
                per_side_options.push(opts);
            }
            if !feasible {
                continue;
            }
            // Cartesian product over sides (at most 2x2).
            let combos: Vec<Vec<Option<(u16, bool, u16)>>> =
                per_side_options.iter().fold(vec![Vec::new()], |acc, opts| {
                    let mut next = Vec::new();
                    for prefix in &acc {
                        for o in opts {
                            let mut p = prefix.clone();
                            p.push(*o);
                            next.push(p);
                        }
                    }
                    next
                });
            for combo in combos {
                let mut new_states = states.clone();
                let mut saved_remaining = Vec::new();
                for (side, choice) in combo.iter().enumerate() {
                    if let Some((block, fwd, gi)) = choice {
                        let rem = &mut group_remaining[side][*block as usize];
                        saved_remaining.push((side, *block as usize, *rem));
                        if new_states[side].active.is_none() {
                            *rem = self.group_len(side, *block, *fwd, *gi);
                        }
                        *rem -= 1;
                        let mut st = new_states[side];
                        st.active = Some((*block, *fwd, *gi));
                        if *rem == 0 {
                            let next = *gi + 1;
                            if next >= self.group_count(side, *block) {
                                st.active = None;
                                st.done += 1;
                            } else {
                                *rem = self.group_len(side, *block, *fwd, next);
                                st.active = Some((*block, *fwd, next));
                            }
                        }
                        new_states[side] = st;
                    }
                }
                placed.push(v);
                placed_set.insert(v);
                let mut touched = Vec::new();
                for w in &self.spine_succ[v.index()] {
                    *pred_left.get_mut(w).unwrap() -= 1;
                    touched.push(*w);
                }
                let res = self.search(placed, placed_set, group_remaining, new_states, pred_left);
                for w in touched {
                    *pred_left.get_mut(&w).unwrap() += 1;
                }
                placed.pop();
                placed_set.remove(&v);
                for (side, block, rem) in saved_remaining {
                    group_remaining[side][block] = rem;
                }
                if res.is_some() {
                    return res;
                }
            }
        }
        self.memo.insert(key);
        None
    }

    fn mask(&self, placed: &HashSet<VertexId>) -> Vec<u64> {
        let mut mask = vec![0u64; self.spine.len() / 64 + 1];
        for (i, v) in self.spine.iter().enumerate() {
            if placed.contains(v) {
                mask[i / 64] |= 1 << (i % 64);
            }
        }
        mask
    }

    /// With the spine order fixed, derive each side layer's order, or fail.
    fn finish(&self, spine_order: &[VertexId]) -> Option<Drawing> {
        let spine_pos: HashMap<VertexId, usize> = spine_order
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i))
            .collect();
        let mut orders: Vec<Vec<VertexId>> = vec![Vec::new(); self.graph.h() as usize];
        orders[1] = spine_order.to_vec();
        for (side, &layer) in self.side_layers.iter().enumerate() {
            let ord = self.build_side_order(side, layer, &spine_pos)?;
            orders[layer as usize - 1] = ord;
        }
        let drawing = Drawing::new(orders);
        let total = count_crossings(self.graph, &drawing).ok()?.total;
        debug_assert_eq!(total, 0, "engine produced a crossing witness");
        if total != 0 {
            return None;
        }
        if !self.constraints.satisfied_by(self.graph, &drawing) {
            return None;
        }
        Some(drawing)
    }

    /// Orders one side layer: block side-sequences follow the blocks' spine
    /// spans; groups are internally free; chains and the optional endpoint
    /// pair are merged in by a key-monotone topological sort.
    fn build_side_order(
        &self,
        side: usize,
        layer: u8,
        spine_pos: &HashMap<VertexId, usize>,
    ) -> Option<Vec<VertexId>> {
        // Recover each block's orientation and position from the spine order.
        let mut block_info: Vec<(usize, usize, bool)> = Vec::new(); // (first pos, block, fwd)
        for (b, block) in self.blocks[side].iter().enumerate() {
            let first_fwd = &block.spine_groups[0];
            let last = &block.spine_groups[block.spine_groups.len() - 1];
            let min_first = first_fwd.iter().map(|v| spine_pos[v]).min().unwrap();
            let min_last = last.iter().map(|v| spine_pos[v]).min().unwrap();
            let fwd = min_first <= min_last;
            block_info.push((min_first.min(min_last), b, fwd));
        }
        block_info.sort_unstable();
        // Structural keys: (block rank, group rank) per keyed vertex.
        let mut key: HashMap<VertexId, (usize, usize)> = HashMap::new();
        for (rank, &(_, b, fwd)) in block_info.iter().enumerate() {
            let groups = &self.blocks[side][b].side_groups;
            for (gi, g) in groups.iter().enumerate() {
                let gi = if fwd { gi } else { groups.len() - 1 - gi };
                for &v in g {
                    key.insert(v, (rank, gi));
                }
            }
        }
        let members: Vec<VertexId> = self.graph.layer(layer).to_vec();
        let pair = self.constraints.pair(layer);
        // Precedence digraph: chains plus pinning of the endpoint pair.
        let mut succ: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
        let mut indeg: HashMap<VertexId, usize> = members.iter().map(|v| (*v, 0)).collect();
        let add_edge = |a: VertexId,
                        b: VertexId,
                        succ: &mut HashMap<VertexId, Vec<VertexId>>,
                        indeg: &mut HashMap<VertexId, usize>| {
            succ.entry(a).or_default().push(b);
            *indeg.get_mut(&b).unwrap() += 1;
        };
        for chain in self.constraints.chains(layer) {
            for w in chain.windows(2) {
                // Keyed order must already agree with the chain.
                if let (Some(ka), Some(kb)) = (key.get(&w[0]), key.get(&w[1])) {
                    if ka > kb {
                        return None;
                    }
                }
                add_edge(w[0], w[1], &mut succ, &mut indeg);
            }
        }
        if let Some((s, t)) = pair {
            for &v in &members {
                if v != s {
                    add_edge(s, v, &mut succ, &mut indeg);
                }
                if v != t && s != v {
                    add_edge(v, t, &mut succ, &mut indeg);
                }
            }
            // s must be structurally first-eligible, t last-eligible.
            if let Some(ks) = key.get(&s) {
                if key.values().any(|k| k < ks) {
                    return None;
                }
            }
            if let Some(kt) = key.get(&t) {
                if key.values().any(|k| k > kt) {
                    return None;
                }
            }
        }
        // Key-monotone Kahn: emit isolated (unkeyed) ready vertices eagerly,
        // otherwise the lowest-keyed ready vertex.
        let mut ready: Vec<VertexId> = members.iter().copied().filter(|v| indeg[v] == 0).collect();
        let mut out = Vec::with_capacity(members.len());
        let mut emitted: HashSet<VertexId> = HashSet::new();
        let mut last_key: Option<(usize, usize)> = None;
        while out.len() < members.len() {
            ready.sort_unstable_by_key(|v| (key.get(v).copied().map(|k| (1, k)), v.0));
            // unkeyed sort first because None < Some
            let v = *ready.first()?;
            ready.remove(0);
            if let Some(k) = key.get(&v) {
                if let Some(lk) = last_key {
                    if *k < lk {
                        return None; // chain forced a structural inversion
                    }
                }
                last_key = Some(*k);
            }
            out.push(v);
            emitted.insert(v);
            if let Some(ss) = succ.get(&v) {
                for w in ss.clone() {
                    let d = indeg.get_mut(&w).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        ready.push(w);
                    }
                }
            }
        }
        Some(out)
    }
}

/// Builds the per-side caterpillar blocks of `graph`. Fails (returns `None`)
/// as soon as one side component is not a caterpillar.
fn build_blocks(graph: &LayeredGraph, side_layers: &[u8]) -> Option<Vec<Vec<Block>>> {
    let mut all = Vec::new();
    for &layer in side_layers {
        // Bipartite subgraph between `layer` and the spine layer 2.
        let mut adj: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
        for e in graph.edges() {
            let (lu, lv) = (graph.layer_of(e.u), graph.layer_of(e.v));
            if (lu == layer && lv == 2) || (lu == 2 && lv == layer) {
                adj.entry(e.u).or_default().push(e.v);
                adj.entry(e.v).or_default().push(e.u);
            }
        }
        for nb in adj.values_mut() {
            nb.sort();
        }
        // Components of the side subgraph (only vertices with side edges).
        let mut seen: HashSet<VertexId> = HashSet::new();
        let mut blocks = Vec::new();
        let mut starts: Vec<VertexId> = adj.keys().copied().collect();
        starts.sort();
        for s in starts {
            if seen.contains(&s) {
                continue;
            }
            let mut comp = vec![s];
            seen.insert(s);
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &w in &adj[&x] {
                    if seen.insert(w) {
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort();
            let backbone = caterpillar_backbone(&comp, &adj)?;
            blocks.push(blocks_from_backbone(&backbone, &adj, |v| {
                graph.layer_of(v) == 2
            }));
        }
        all.push(blocks);
    }
    Some(all)
}

/// Crossing-free drawability for `h <= 3` under order constraints; the
/// workhorse behind [`crossing_free`] and [`crossing_free_with_orders`].
fn solve_constrained(
    graph: &LayeredGraph,
    constraints: &OrderConstraints,
) -> Result<Option<Drawing>, PlanarityError> {
    if graph.h() > 3 {
        return Err(PlanarityError::WrongLayerCount {
            expected: "2 or 3".into(),
            got: graph.h(),
        });
    }
    constraints.validate_for(graph)?;
    let side_layers: Vec<u8> = if graph.h() == 2 { vec![1] } else { vec![1, 3] };
    let blocks = match build_blocks(graph, &side_layers) {
        Some(b) => b,
        None => return Ok(None),
    };
    let mut spine_membership = Vec::new();
    for side_blocks in &blocks {
        let mut mem: HashMap<VertexId, (u16, u16)> = HashMap::new();
        for (b, block) in side_blocks.iter().enumerate() {
            for (gi, g) in block.spine_groups.iter().enumerate() {
                for &v in g {
                    mem.insert(v, (b as u16, gi as u16));
                }
            }
        }
        spine_membership.push(mem);
    }
    let spine: Vec<VertexId> = graph.layer(2).to_vec();
    let spine_succ = constraints.digraph(graph, 2);
    let mut pred_count: HashMap<VertexId, usize> = spine.iter().map(|v| (*v, 0)).collect();
    for v in &spine {
        for w in &spine_succ[v.index()] {
            *pred_count.get_mut(w).unwrap() += 1;
        }
    }
    let group_remaining: Vec<Vec<usize>> = blocks
        .iter()
        .map(|side_blocks| vec![0usize; side_blocks.len()])
        .collect();
    let mut engine = Engine {
        graph,
        constraints,
        side_layers: side_layers.clone(),
        blocks,
        spine_membership,
        spine,
        spine_succ,
        spine_pred_count: pred_count.clone(),
        memo: HashSet::new(),
    };
    let states = vec![
        SideState {
            active: None,
            done: 0
        };
        side_layers.len()
    ];
    let mut placed = Vec::new();
    let mut placed_set = HashSet::new();
    let mut group_remaining = group_remaining;
    let mut pred_left = engine.spine_pred_count.clone();
    Ok(engine.search(
        &mut placed,
        &mut placed_set,
        &mut group_remaining,
        states,
        &mut pred_left,
    ))
}

/// Decides crossing-free drawability for `h <= 3` and returns a witness.
pub fn crossing_free(graph: &LayeredGraph) -> Result<Option<Drawing>, PlanarityError> {
    solve_constrained(graph, &OrderConstraints::empty(graph.h()))
}

/// Crossing-free drawability compatible with partial orders given as chains
/// (plus optional endpoint pairs).
pub fn crossing_free_with_orders(
    graph: &LayeredGraph,
    constraints: &OrderConstraints,
) -> Result<Option<Drawing>, PlanarityError> {
    solve_constrained(graph, constraints)
}

/// Crossing-free drawability of a connected graph where `pairs[i]` must be
/// the leftmost and rightmost vertices of layer `i+1`. Implements the
/// auxiliary-graph construction: chain the `s` vertices, chain the `t`
/// vertices, guard each side with a fresh path, and test the result.
pub fn crossing_free_with_endpoints(
    graph: &LayeredGraph,
    pairs: &[(VertexId, VertexId)],
) -> Result<Option<Drawing>, PlanarityError> {
    let h = graph.h();
    if pairs.len() != h as usize {
        return Err(PlanarityError::MissingPair(pairs.len() as u8 + 1));
    }
    if !graph.is_connected() {
        return Err(PlanarityError::NotConnected);
    }
    for (i, &(s, t)) in pairs.iter().enumerate() {
        let layer = i as u8 + 1;
        if s == t {
            return Err(PlanarityError::PairNotDistinct(layer));
        }
        for v in [s, t] {
            if v.0 == 0 || v.index() > graph.n() || graph.layer_of(v) != layer {
                return Err(PlanarityError::ConstraintWrongLayer(v, layer));
            }
        }
        if graph.layer(layer).len() < 2 {
            return Err(PlanarityError::PairOnTinyLayer(layer));
        }
    }
    let adj = graph.adjacency();
    let has_other_neighbor = |v: VertexId, layer: u8, exclude: VertexId| {
        adj[v.index()]
            .iter()
            .any(|(w, _)| graph.layer_of(*w) == layer && *w != exclude)
    };
    // Quick refutation: both corner vertices of a layer gap already have
    // conflicting neighbors.
    for i in 2..=h {
        let (s_lo, _) = pairs[i as usize - 2];
        let (s_hi, _) = pairs[i as usize - 1];
        if has_other_neighbor(s_lo, i, s_hi) && has_other_neighbor(s_hi, i - 1, s_lo) {
            return Ok(None);
        }
        let (_, t_lo) = pairs[i as usize - 2];
        let (_, t_hi) = pairs[i as usize - 1];
        if has_other_neighbor(t_lo, i, t_hi) && has_other_neighbor(t_hi, i - 1, t_lo) {
            return Ok(None);
        }
    }
    // Build the augmented graph.
    let n = graph.n() as u32;
    let mut layer_of: Vec<u8> = (0..=n)
        .map(|v| {
            if v == 0 {
                0
            } else {
                graph.layer_of(VertexId(v))
            }
        })
        .collect();
    let mut edges: HashSet<(u32, u32)> = graph
        .edges()
        .iter()
        .map(|e| (e.u.0.min(e.v.0), e.u.0.max(e.v.0)))
        .collect();
    let s_guard: Vec<u32> = (1..=h).map(|i| n + i as u32).collect();
    let t_guard: Vec<u32> = (1..=h).map(|i| n + h as u32 + i as u32).collect();
    for i in 1..=h as usize {
        layer_of.push(i as u8);
    }
    for i in 1..=h as usize {
        layer_of.push(i as u8);
    }
    let add = |a: u32, b: u32, edges: &mut HashSet<(u32, u32)>| {
        edges.insert((a.min(b), a.max(b)));
    };
    for i in 2..=h as usize {
        let (s_lo, t_lo) = pairs[i - 2];
        let (s_hi, t_hi) = pairs[i - 1];
        add(s_lo.0, s_hi.0, &mut edges);
        add(t_lo.0, t_hi.0, &mut edges);
        add(s_guard[i - 2], s_guard[i - 1], &mut edges);
        add(t_guard[i - 2], t_guard[i - 1], &mut edges);
        if has_other_neighbor(s_lo, i as u8, s_hi) {
            add(s_guard[i - 2], s_hi.0, &mut edges);
        } else {
            add(s_guard[i - 1], s_lo.0, &mut edges);
        }
        if has_other_neighbor(t_lo, i as u8, t_hi) {
            add(t_guard[i - 2], t_hi.0, &mut edges);
        } else {
            add(t_guard[i - 1], t_lo.0, &mut edges);
        }
    }
    let edge_list: Vec<(u32, u32, u64)> = edges.into_iter().map(|(a, b)| (a, b, 1)).collect();
    let aug = LayeredGraph::try_new_relaxed(h, layer_of, edge_list)
        .expect("augmented graph is layer-consistent");
    let witness = crossing_free(&aug)?;
    let mut witness = match witness {
        Some(w) => w,
        None => return Ok(None),
    };
    // Normalize orientation so each s comes before its t, then strip guards.
    let pos = witness.positions(&aug);
    if pos[pairs[0].0.index()] > pos[pairs[0].1.index()] {
        witness = witness.reversed();
    }
    let orders: Vec<Vec<VertexId>> = witness
        .orders
        .iter()
        .map(|ord| ord.iter().copied().filter(|v| v.0 <= n).collect())
        .collect();
    let drawing = Drawing::new(orders);
    for (i, &(s, t)) in pairs.iter().enumerate() {
        let layer = i as u8 + 1;
        let ord = drawing.order(layer);
        if ord.first() != Some(&s) || ord.last() != Some(&t) {
            debug_assert!(false, "guarded witness lost its extremes");
            return Ok(None);
        }
    }
    debug_assert_eq!(count_crossings(graph, &drawing).unwrap().total, 0);
    Ok(Some(drawing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LayeredGraph;

    fn g2(layers: &[u8], edges: &[(u32, u32)]) -> LayeredGraph {
        let mut layer_of = vec![0];
        layer_of.extend_from_slice(layers);
        LayeredGraph::try_new(2, layer_of, edges.iter().map(|&(u, v)| (u, v, 1)).collect()).unwrap()
    }

    fn g3(layers: &[u8], edges: &[(u32, u32)]) -> LayeredGraph {
        let mut layer_of = vec![0];
        layer_of.extend_from_slice(layers);
        LayeredGraph::try_new(3, layer_of, edges.iter().map(|&(u, v)| (u, v, 1)).collect()).unwrap()
    }

    #[test]
    fn p4_is_a_caterpillar() {
        let g = g2(&[1, 2, 1, 2], &[(1, 2), (2, 3), (3, 4)]);
        let d = is_caterpillar_forest(&g).unwrap().expect("caterpillar");
        assert_eq!(count_crossings(&g, &d).unwrap().total, 0);
    }

    #[test]
    fn subdivided_k13_is_not_a_caterpillar() {
        // Spider with three legs of length 2: center 1 on layer 1.
        let g = g2(
            &[1, 2, 2, 2, 1, 1, 1],
            &[(1, 2), (1, 3), (1, 4), (2, 5), (3, 6), (4, 7)],
        );
        assert!(is_caterpillar_forest(&g).unwrap().is_none());
    }

    #[test]
    fn c4_is_not_a_caterpillar() {
        let g = g2(&[1, 2, 1, 2], &[(1, 2), (2, 3), (3, 4), (4, 1)]);
        assert!(is_caterpillar_forest(&g).unwrap().is_none());
    }

    #[test]
    fn three_layer_path_is_crossing_free() {
        let g = g3(&[1, 2, 3], &[(1, 2), (2, 3)]);
        let d = crossing_free(&g).unwrap().expect("path is planar");
        assert_eq!(count_crossings(&g, &d).unwrap().total, 0);
    }

    #[test]
    fn k22_is_not_crossing_free() {
        let g = g2(&[1, 1, 2, 2], &[(1, 3), (1, 4), (2, 3), (2, 4)]);
        assert!(crossing_free(&g).unwrap().is_none());
    }

    #[test]
    fn forced_crossing_by_chains() {
        // Two disjoint edges with contradictory chains.
        let g = g2(&[1, 1, 2, 2], &[(1, 3), (2, 4)]);
        let mut oc = OrderConstraints::empty(2);
        oc.add_chain(1, vec![VertexId(1), VertexId(2)]);
        oc.add_chain(2, vec![VertexId(4), VertexId(3)]);
        assert!(crossing_free_with_orders(&g, &oc).unwrap().is_none());
        let empty = OrderConstraints::empty(2);
        assert!(crossing_free_with_orders(&g, &empty).unwrap().is_some());
    }

    #[test]
    fn endpoint_pairs_on_a_path() {
        // P4 over two layers, ends of each layer as the pair.
        let g = g2(&[1, 2, 1, 2], &[(1, 2), (2, 3), (3, 4)]);
        let d = crossing_free_with_endpoints(
            &g,
            &[(VertexId(1), VertexId(3)), (VertexId(2), VertexId(4))],
        )
        .unwrap()
        .expect("path fits");
        assert_eq!(d.order(1).first(), Some(&VertexId(1)));
        assert_eq!(d.order(1).last(), Some(&VertexId(3)));
    }

    #[test]
    fn endpoint_pair_needs_two_vertices() {
        // Star with single layer-2 center: pair on layer 2 is an error.
        let g = g2(&[1, 1, 2], &[(1, 3), (2, 3)]);
        let err = crossing_free_with_endpoints(
            &g,
            &[(VertexId(1), VertexId(2)), (VertexId(3), VertexId(3))],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            PlanarityError::PairNotDistinct(2) | PlanarityError::PairOnTinyLayer(2)
        ));
    }
}
