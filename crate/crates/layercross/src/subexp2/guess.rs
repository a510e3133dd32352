//! Separator guessing: the interface-enumeration steps of the recursion.
//! A guess fixes the two separator edges, the middle vertex sets, the edges
//! crossing each separator edge with endpoint labels, a labeling of every
//! remaining vertex into left/middle/right via component analysis and
//! propagation, the relative order of all interface vertices, and a budget
//! split. Inconsistent branches are dropped silently.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use crate::graph::{EdgeId, VertexId};

use super::build::endpoint_on_layer;
use super::{isqrt, ExtendedInstance, Mode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    L,
    M,
    R,
}

impl Label {
    fn bit(self) -> u8 {
        match self {
            Label::L => 1,
            Label::M => 2,
            Label::R => 4,
        }
    }
}

/// A set of region labels. Separator endpoints carry several; everything
/// else ends up with exactly one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LabelSet(pub u8);

impl LabelSet {
    pub fn contains(self, l: Label) -> bool {
        self.0 & l.bit() != 0
    }

    fn insert(&mut self, l: Label) {
        self.0 |= l.bit();
    }

    fn is_empty(self) -> bool {
        self.0 == 0
    }

    fn single(self) -> Option<Label> {
        match self.0 {
            1 => Some(Label::L),
            2 => Some(Label::M),
            4 => Some(Label::R),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeparatorGuess {
    pub lsep: EdgeId,
    pub rsep: EdgeId,
    /// Guessed middle vertices per layer, excluding separator endpoints.
    pub mid1: BTreeSet<VertexId>,
    pub mid2: BTreeSet<VertexId>,
    pub middle_edges: BTreeSet<EdgeId>,
    pub cross_lsep: BTreeSet<EdgeId>,
    pub cross_rsep: BTreeSet<EdgeId>,
    pub labels: Vec<LabelSet>,
    /// Total order over the interface vertices of each layer.
    pub pi_next: [Vec<VertexId>; 2],
    /// Merged boundary order for elaborate instances.
    pub pi_ext: Option<Vec<VertexId>>,
    pub k_current: u64,
    pub k_left: u64,
    pub k_right: u64,
}

impl SeparatorGuess {
    /// Vertices the combination step places between the sub-drawings.
    pub fn mid_zone(&self, _ei: &ExtendedInstance, v: VertexId) -> bool {
        self.labels[v.index()].contains(Label::M)
    }
}

/// Relation of a vertex to a separator endpoint on its layer.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Rel {
    Lt,
    Eq,
    Gt,
}

/// Splits pendant components between the sides so the multiplicity sums
/// match the blueprint exactly. Subset-sum reconstruction over the left sum.
pub fn pendant_knapsack(
    pendants: &[(VertexId, u64)],
    blueprint: (u64, u64),
) -> Option<(Vec<VertexId>, Vec<VertexId>)> {
    let total: u64 = pendants.iter().map(|(_, m)| *m).sum();
    if blueprint.0 + blueprint.1 != total {
        return None;
    }
    let target = blueprint.0 as usize;
    // reach[s] = index of the item that first reached sum s, or usize::MAX.
    let mut reach: Vec<usize> = vec![usize::MAX; target + 1];
    reach[0] = usize::MAX - 1;
    for (i, &(_, m)) in pendants.iter().enumerate() {
        let m = m as usize;
        if m > target {
            continue;
        }
        for s in (0..=target - m).rev() {
            if reach[s] != usize::MAX && reach[s + m] == usize::MAX {
                reach[s + m] = i;
            }
        }
    }
    if reach[target] == usize::MAX {
        return None;
    }
    let mut left = Vec::new();
    let mut s = target;
    while s > 0 {
        let i = reach[s];
        left.push(pendants[i].0);
        s -= pendants[i].1 as usize;
    }
    left.sort();
    let left_set: BTreeSet<VertexId> = left.iter().copied().collect();
    let right: Vec<VertexId> = pendants
        .iter()
        .map(|(v, _)| *v)
        .filter(|v| !left_set.contains(v))
        .collect();
    Some((left, right))
}

/// Subsets of `items` with size in `0..=cap`, ordered by increasing size
/// then lexicographic index rank.
pub(crate) fn subsets_up_to<T: Copy>(items: &[T], cap: usize) -> Vec<Vec<T>> {
    let n = items.len();
    let mut out = vec![Vec::new()];
    for size in 1..=cap.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            let mut i = size as isize - 1;
            while i >= 0 && idx[i as usize] == n - size + i as usize {
                i -= 1;
            }
            if i < 0 {
                break;
            }
            let i = i as usize;
            idx[i] += 1;
            for j in i + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Guess sink: return `Break` to stop the stream early.
pub(crate) type Sink<'a> = &'a mut dyn FnMut(SeparatorGuess) -> ControlFlow<()>;

/// All full guesses of an extended instance, in deterministic order:
/// separator pairs by edge id, subsets by size then lexicographic rank.
pub fn enumerate_guesses(ei: &ExtendedInstance) -> Vec<SeparatorGuess> {
    let mut out = Vec::new();
    let _ = for_each_guess(ei, &mut |g| {
        out.push(g);
        ControlFlow::Continue(())
    });
    out
}

/// Streams the guesses in the same order, stopping when the sink breaks.
pub(crate) fn for_each_guess(ei: &ExtendedInstance, sink: Sink<'_>) -> ControlFlow<()> {
    let k = ei.k;
    if k == 0 {
        return ControlFlow::Continue(());
    }
    let g = &ei.graph;
    let s_cap = isqrt(k) as usize;
    for lsep in g.edge_ids() {
        for rsep in g.edge_ids() {
            if lsep == rsep {
                continue;
            }
            enumerate_for_pair(ei, lsep, rsep, s_cap, sink)?;
        }
    }
    ControlFlow::Continue(())
}

fn enumerate_for_pair(
    ei: &ExtendedInstance,
    lsep: EdgeId,
    rsep: EdgeId,
    s_cap: usize,
    out: Sink<'_>,
) -> ControlFlow<()> {
    let g = &ei.graph;
    let k = ei.k;
    let sep_eps: [VertexId; 4] = [
        endpoint_on_layer(g, lsep, 1),
        endpoint_on_layer(g, lsep, 2),
        endpoint_on_layer(g, rsep, 1),
        endpoint_on_layer(g, rsep, 2),
    ];
    let mid_candidates = |layer: u8| -> Vec<VertexId> {
        g.layer(layer)
            .iter()
            .copied()
            .filter(|v| *v != sep_eps[layer as usize - 1] && *v != sep_eps[layer as usize + 1])
            .collect()
    };
    // |MidFull| < 4*sqrt(k) + 2, i.e. (|MidFull| - 2)^2 < 16k.
    let mid_ok = |full: usize| full < 2 || ((full - 2) * (full - 2)) < (16 * k) as usize;
    let mid_cap = |eps: usize| {
        let mut cap = 0usize;
        while mid_ok(cap + 1 + eps) {
            cap += 1;
        }
        cap
    };
    let eps1 = if sep_eps[0] == sep_eps[2] { 1 } else { 2 };
    let eps2 = if sep_eps[1] == sep_eps[3] { 1 } else { 2 };
    let mids1 = subsets_up_to(&mid_candidates(1), mid_cap(eps1));
    let mids2 = subsets_up_to(&mid_candidates(2), mid_cap(eps2));
    // Crossing-edge candidates never share an endpoint with the edge they
    // cross.
    let cross_cands = |sep: EdgeId| -> Vec<EdgeId> {
        let se = g.edge(sep);
        g.edge_ids()
            .filter(|&e| e != lsep && e != rsep)
            .filter(|&e| {
                let f = g.edge(e);
                !f.touches(se.u) && !f.touches(se.v)
            })
            .collect()
    };
    let cl_cands = cross_cands(lsep);
    let cr_cands = cross_cands(rsep);
    for mid1 in &mids1 {
        for mid2 in &mids2 {
            let mid1: BTreeSet<VertexId> = mid1.iter().copied().collect();
            let mid2: BTreeSet<VertexId> = mid2.iter().copied().collect();
            let mid_full1: BTreeSet<VertexId> = mid1
                .iter()
                .copied()
                .chain([sep_eps[0], sep_eps[2]])
                .collect();
            let mid_full2: BTreeSet<VertexId> = mid2
                .iter()
                .copied()
                .chain([sep_eps[1], sep_eps[3]])
                .collect();
            let middle_edges: BTreeSet<EdgeId> = g
                .edge_ids()
                .filter(|&e| e != lsep && e != rsep)
                .filter(|&e| {
                    let f = g.edge(e);
                    let (lo, hi) = if g.layer_of(f.u) == 1 {
                        (f.u, f.v)
                    } else {
                        (f.v, f.u)
                    };
                    mid_full1.contains(&lo) && mid_full2.contains(&hi)
                })
                .collect();
            if (middle_edges.len() * middle_edges.len()) as u64 > 4 * k {
                continue;
            }
            for cl in subsets_up_to(&cl_cands, s_cap) {
                let cl: BTreeSet<EdgeId> = cl.iter().copied().collect();
                if cl.iter().any(|e| middle_edges.contains(e)) {
                    continue;
                }
                for cr in subsets_up_to(&cr_cands, s_cap) {
                    let cr: BTreeSet<EdgeId> = cr.iter().copied().collect();
                    if cr.iter().any(|e| middle_edges.contains(e)) {
                        continue;
                    }
                    label_stage(
                        ei,
                        lsep,
                        rsep,
                        &sep_eps,
                        &mid1,
                        &mid2,
                        &mid_full1,
                        &mid_full2,
                        &middle_edges,
                        &cl,
                        &cr,
                        out,
                    )?;
                }
            }
        }
    }
    ControlFlow::Continue(())
}

struct Frame<'a> {
    ei: &'a ExtendedInstance,
    lsep: EdgeId,
    rsep: EdgeId,
    sep_eps: [VertexId; 4],
    mid1: &'a BTreeSet<VertexId>,
    mid2: &'a BTreeSet<VertexId>,
    mid_full1: &'a BTreeSet<VertexId>,
    mid_full2: &'a BTreeSet<VertexId>,
    middle_edges: &'a BTreeSet<EdgeId>,
    cross_lsep: &'a BTreeSet<EdgeId>,
    cross_rsep: &'a BTreeSet<EdgeId>,
}

#[allow(clippy::too_many_arguments)]
fn label_stage(
    ei: &ExtendedInstance,
    lsep: EdgeId,
    rsep: EdgeId,
    sep_eps: &[VertexId; 4],
    mid1: &BTreeSet<VertexId>,
    mid2: &BTreeSet<VertexId>,
    mid_full1: &BTreeSet<VertexId>,
    mid_full2: &BTreeSet<VertexId>,
    middle_edges: &BTreeSet<EdgeId>,
    cross_lsep: &BTreeSet<EdgeId>,
    cross_rsep: &BTreeSet<EdgeId>,
    out: Sink<'_>,
) -> ControlFlow<()> {
    let g = &ei.graph;
    let n = g.n();
    let mut labels = vec![LabelSet::default(); n + 1];
    // Step B: separator endpoints by case.
    let shared_bottom = sep_eps[0] == sep_eps[2];
    let shared_top = sep_eps[1] == sep_eps[3];
    let assign = |labels: &mut Vec<LabelSet>, v: VertexId, l: Label| -> bool {
        if labels[v.index()].is_empty() {
            labels[v.index()].insert(l);
            true
        } else {
            labels[v.index()].contains(l)
        }
    };
    for (v, ls) in [
        (sep_eps[0], [Label::L, Label::M].as_slice()),
        (sep_eps[1], &[Label::L, Label::M]),
        (sep_eps[2], &[Label::M, Label::R]),
        (sep_eps[3], &[Label::M, Label::R]),
    ] {
        for &l in ls {
            labels[v.index()].insert(l);
        }
    }
    // Step C first half: middle vertices and middle-edge endpoints are M.
    for &v in mid1.iter().chain(mid2.iter()) {
        if !assign(&mut labels, v, Label::M) {
            return ControlFlow::Continue(());
        }
    }
    for &e in middle_edges {
        for v in g.edge(e).endpoints() {
            if !labels[v.index()].contains(Label::M) {
                return ControlFlow::Continue(());
            }
        }
    }
    let frame = Frame {
        ei,
        lsep,
        rsep,
        sep_eps: *sep_eps,
        mid1,
        mid2,
        mid_full1,
        mid_full2,
        middle_edges,
        cross_lsep,
        cross_rsep,
    };
    // Step C second half: label assignments for crossing-edge endpoints.
    let all_cross: Vec<EdgeId> = cross_lsep.union(cross_rsep).copied().collect();
    fn assign_cross(
        frame: &Frame<'_>,
        all_cross: &[EdgeId],
        idx: usize,
        labels: &mut Vec<LabelSet>,
        shared: (bool, bool),
        out: Sink<'_>,
    ) -> ControlFlow<()> {
        if idx == all_cross.len() {
            return component_stage(frame, labels, shared, out);
        }
        let e = all_cross[idx];
        let g = &frame.ei.graph;
        let in_l = frame.cross_lsep.contains(&e);
        let in_r = frame.cross_rsep.contains(&e);
        let feasible: &[(Label, Label)] = match (in_l, in_r) {
            (true, true) => &[(Label::L, Label::R), (Label::R, Label::L)],
            (true, false) => &[
                (Label::L, Label::M),
                (Label::M, Label::L),
                (Label::L, Label::R),
                (Label::R, Label::L),
            ],
            (false, true) => &[
                (Label::R, Label::M),
                (Label::M, Label::R),
                (Label::L, Label::R),
                (Label::R, Label::L),
            ],
            _ => unreachable!(),
        };
        let f = g.edge(e);
        let (lo, hi) = if g.layer_of(f.u) == 1 {
            (f.u, f.v)
        } else {
            (f.v, f.u)
        };
        for &(l1, l2) in feasible {
            let mut trial = labels.clone();
            let ok = {
                let mut a = |v: VertexId, l: Label| {
                    if trial[v.index()].is_empty() {
                        trial[v.index()].insert(l);
                        true
                    } else {
                        trial[v.index()].contains(l)
                    }
                };
                a(lo, l1) && a(hi, l2)
            };
            if ok {
                assign_cross(frame, all_cross, idx + 1, &mut trial, shared, out)?;
            }
        }
        ControlFlow::Continue(())
    }
    assign_cross(
        &frame,
        &all_cross,
        0,
        &mut labels,
        (shared_bottom, shared_top),
        out,
    )
}

/// Step D: classify the components hanging off separator endpoints and
/// branch over their placements, then propagate and finish.
fn component_stage(
    frame: &Frame<'_>,
    labels: &mut Vec<LabelSet>,
    shared: (bool, bool),
    out: Sink<'_>,
) -> ControlFlow<()> {
    let ei = frame.ei;
    let g = &ei.graph;
    let adj = g.adjacency();
    let sep_set: BTreeSet<VertexId> = frame.sep_eps.iter().copied().collect();
    let special_edges: BTreeSet<EdgeId> = frame
        .cross_lsep
        .iter()
        .chain(frame.cross_rsep.iter())
        .chain(frame.middle_edges.iter())
        .copied()
        .collect();
    let chain_members: BTreeSet<VertexId> = ei.chains.iter().flatten().flatten().copied().collect();
    // comps(v): components of (component of v) - v; every one touches v.
    let comps_of = |v: VertexId| -> Vec<Vec<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::from([v]);
        let mut comps = Vec::new();
        let mut nbrs: Vec<VertexId> = adj[v.index()].iter().map(|(w, _)| *w).collect();
        nbrs.sort();
        nbrs.dedup();
        for start in nbrs {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = vec![start];
            seen.insert(start);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &(w, _) in &adj[x.index()] {
                    if w != v && seen.insert(w) {
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort();
            comps.push(comp);
        }
        comps
    };
    #[derive(Clone)]
    struct CompPlan {
        // Components to branch over with per-component L/R choice.
        updown: Vec<Vec<VertexId>>,
        // Forced labels (component, label).
        forced: Vec<(Vec<VertexId>, Label)>,
        // Pendant split branch for the shared endpoint, if any.
        blueprint_pendants: Vec<(VertexId, u64)>,
    }
    let mut plan = CompPlan {
        updown: Vec::new(),
        forced: Vec::new(),
        blueprint_pendants: Vec::new(),
    };
    let (shared_bottom, shared_top) = shared;
    let mut seen_comp: BTreeSet<VertexId> = BTreeSet::new();
    for (i, &v) in frame.sep_eps.iter().enumerate() {
        if i == 2 && shared_bottom || i == 3 && shared_top {
            continue; // same vertex as its partner endpoint
        }
        let comps = comps_of(v);
        let mut updown_count = 0usize;
        for comp in comps {
            if comp.iter().any(|w| seen_comp.contains(w)) {
                continue; // already planned from another endpoint
            }
            let is_special = comp.iter().any(|w| sep_set.contains(w))
                || comp.iter().any(|w| {
                    adj[w.index()]
                        .iter()
                        .any(|(_, e)| special_edges.contains(e))
                });
            if is_special {
                continue;
            }
            let pi_defined = comp.iter().any(|w| chain_members.contains(w));
            if pi_defined {
                // Handled by the chain-split guesses below; the propagation
                // phase settles anything the splits leave open.
                continue;
            }
            if comp.len() == 1 && adj[comp[0].index()].len() == 1 {
                // Pendant component.
                let p = comp[0];
                let eid = adj[p.index()][0].1;
                let mult = g.edge(eid).mult;
                let on_shared = (shared_bottom && v == frame.sep_eps[0])
                    || (shared_top && v == frame.sep_eps[1]);
                if on_shared {
                    plan.blueprint_pendants.push((p, mult));
                } else {
                    // Pendants of a distinct endpoint sit on its outer side.
                    let side = if v == frame.sep_eps[0] || v == frame.sep_eps[1] {
                        Label::L
                    } else {
                        Label::R
                    };
                    plan.forced.push((comp.clone(), side));
                }
                seen_comp.extend(comp);
            } else {
                updown_count += 1;
                plan.updown.push(comp.clone());
                seen_comp.extend(comp);
            }
        }
        // Too many hanging components refute the guess.
        if (updown_count * updown_count) as u64 > 64 * frame.ei.k {
            return ControlFlow::Continue(());
        }
    }
    for (comp, l) in &plan.forced {
        for &w in comp {
            if labels[w.index()].is_empty() {
                labels[w.index()].insert(*l);
            } else if !labels[w.index()].contains(*l) {
                return ControlFlow::Continue(());
            }
        }
    }
    // Branch over pendant blueprints of the shared endpoint.
    let blueprints: Vec<Option<(Vec<VertexId>, Vec<VertexId>)>> =
        if plan.blueprint_pendants.is_empty() {
            vec![None]
        } else {
            let total: u64 = plan.blueprint_pendants.iter().map(|(_, m)| *m).sum();
            (0..=total)
                .filter_map(|left| pendant_knapsack(&plan.blueprint_pendants, (left, total - left)))
                .map(Some)
                .collect()
        };
    for bp in blueprints {
        let mut labels2 = labels.clone();
        let mut ok = true;
        if let Some((left, right)) = &bp {
            for &p in left {
                if labels2[p.index()].is_empty() {
                    labels2[p.index()].insert(Label::L);
                } else if !labels2[p.index()].contains(Label::L) {
                    ok = false;
                }
            }
            for &p in right {
                if labels2[p.index()].is_empty() {
                    labels2[p.index()].insert(Label::R);
                } else if !labels2[p.index()].contains(Label::R) {
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }
        // Branch over up-down component sides.
        let ud = plan.updown.clone();
        branch_updown(frame, &ud, 0, &mut labels2, out)?;
    }
    ControlFlow::Continue(())
}

fn branch_updown(
    frame: &Frame<'_>,
    updown: &[Vec<VertexId>],
    idx: usize,
    labels: &mut Vec<LabelSet>,
    out: Sink<'_>,
) -> ControlFlow<()> {
    if idx == updown.len() {
        return propagate_stage(frame, labels, out);
    }
    for side in [Label::L, Label::R] {
        let mut trial = labels.clone();
        let mut ok = true;
        for &w in &updown[idx] {
            if trial[w.index()].is_empty() {
                trial[w.index()].insert(side);
            } else if !trial[w.index()].contains(side) {
                ok = false;
                break;
            }
        }
        if ok {
            branch_updown(frame, updown, idx + 1, &mut trial, out)?;
        }
    }
    ControlFlow::Continue(())
}

/// Step E: reachability labeling from the origins, then consistency checks
/// and the ordering/budget stages.
fn propagate_stage(
    frame: &Frame<'_>,
    labels: &mut Vec<LabelSet>,
    out: Sink<'_>,
) -> ControlFlow<()> {
    let ei = frame.ei;
    let g = &ei.graph;
    let adj = g.adjacency();
    let n = g.n();
    let unique: Vec<Option<Label>> = labels.iter().map(|l| l.single()).collect();
    let lb = [ei.boundary_endpoint(true, 1), ei.boundary_endpoint(true, 2)];
    let rb = [
        ei.boundary_endpoint(false, 1),
        ei.boundary_endpoint(false, 2),
    ];
    let mut origins: [Vec<VertexId>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let cross_left: Vec<VertexId> = g
        .vertices()
        .filter(|v| labels[v.index()].contains(Label::L) && !labels[v.index()].is_empty())
        .filter(|v| {
            frame
                .cross_lsep
                .iter()
                .chain(frame.cross_rsep.iter())
                .any(|&e| g.edge(e).touches(*v))
        })
        .collect();
    let cross_right: Vec<VertexId> = g
        .vertices()
        .filter(|v| labels[v.index()].contains(Label::R))
        .filter(|v| {
            frame
                .cross_lsep
                .iter()
                .chain(frame.cross_rsep.iter())
                .any(|&e| g.edge(e).touches(*v))
        })
        .collect();
    origins[0].extend(lb);
    origins[0].extend([
        endpoint_on_layer(g, frame.lsep, 1),
        endpoint_on_layer(g, frame.lsep, 2),
    ]);
    origins[0].extend(cross_left);
    origins[2].extend(rb);
    origins[2].extend([
        endpoint_on_layer(g, frame.rsep, 1),
        endpoint_on_layer(g, frame.rsep, 2),
    ]);
    origins[2].extend(cross_right);
    if ei.mode == Mode::Elaborate {
        origins[0].extend(
            ei.left_ext_bnd
                .iter()
                .filter(|v| labels[v.index()].contains(Label::L)),
        );
        origins[2].extend(
            ei.right_ext_bnd
                .iter()
                .filter(|v| labels[v.index()].contains(Label::R)),
        );
    }
    origins[1] = g
        .vertices()
        .filter(|v| labels[v.index()].contains(Label::M))
        .collect();
    let blocked = |target: Label, v: VertexId| -> bool {
        match unique[v.index()] {
            Some(l) => l != target,
            None => false,
        }
    };
    let mut gained: Vec<LabelSet> = vec![LabelSet::default(); n + 1];
    for (oi, target) in [(0usize, Label::L), (1, Label::M), (2, Label::R)] {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut stack: Vec<VertexId> = origins[oi]
            .iter()
            .copied()
            .filter(|v| !blocked(target, *v))
            .collect();
        seen.extend(stack.iter().copied());
        while let Some(v) = stack.pop() {
            if labels[v.index()].is_empty() {
                gained[v.index()].insert(target);
            }
            for &(w, _) in &adj[v.index()] {
                if !blocked(target, w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
    }
    for v in g.vertices() {
        if labels[v.index()].is_empty() {
            match gained[v.index()].single() {
                Some(l) => labels[v.index()].insert(l),
                None => return ControlFlow::Continue(()), // unreached or clashed
            }
        }
    }
    // The outer boundary must end up on its own side.
    if !labels[lb[0].index()].contains(Label::L)
        || !labels[lb[1].index()].contains(Label::L)
        || !labels[rb[0].index()].contains(Label::R)
        || !labels[rb[1].index()].contains(Label::R)
    {
        return ControlFlow::Continue(());
    }
    if !zones_consistent(frame, labels) {
        return ControlFlow::Continue(());
    }
    order_stage(frame, labels, out)
}

/// Relation of each vertex to the separator endpoints, derived from labels
/// and the middle guesses alone.
fn rel_to(frame: &Frame<'_>, labels: &[LabelSet], v: VertexId, left_anchor: bool) -> Rel {
    let layer = frame.ei.graph.layer_of(v) as usize;
    let anchor = if left_anchor {
        frame.sep_eps[layer - 1]
    } else {
        frame.sep_eps[layer + 1]
    };
    if v == anchor {
        return Rel::Eq;
    }
    let other = if left_anchor {
        frame.sep_eps[layer + 1]
    } else {
        frame.sep_eps[layer - 1]
    };
    if v == other {
        // The other separator endpoint on this layer: left of rsep, right
        // of lsep.
        return if left_anchor { Rel::Gt } else { Rel::Lt };
    }
    let in_mid = if layer == 1 {
        frame.mid1.contains(&v)
    } else {
        frame.mid2.contains(&v)
    };
    if in_mid {
        return if left_anchor { Rel::Gt } else { Rel::Lt };
    }
    match labels[v.index()].single() {
        Some(Label::L) => Rel::Lt,
        Some(Label::R) => Rel::Gt,
        _ => Rel::Lt, // unreachable by construction; M vertices are mid/endpoints
    }
}

/// Verifies that the guessed crossing and middle sets match the zones the
/// labels force, and that the separator edges do not cross.
fn zones_consistent(frame: &Frame<'_>, labels: &[LabelSet]) -> bool {
    let g = &frame.ei.graph;
    for e in g.edge_ids() {
        if e == frame.lsep || e == frame.rsep {
            continue;
        }
        let f = g.edge(e);
        let (lo, hi) = if g.layer_of(f.u) == 1 {
            (f.u, f.v)
        } else {
            (f.v, f.u)
        };
        for (left_anchor, cross_set) in [(true, frame.cross_lsep), (false, frame.cross_rsep)] {
            let rl = rel_to(frame, labels, lo, left_anchor);
            let rh = rel_to(frame, labels, hi, left_anchor);
            let crosses = (rl == Rel::Lt && rh == Rel::Gt) || (rl == Rel::Gt && rh == Rel::Lt);
            if crosses != cross_set.contains(&e) {
                return false;
            }
        }
        // Middle membership: both endpoints within the separator span.
        let in_span = |v: VertexId| {
            rel_to(frame, labels, v, true) != Rel::Lt && rel_to(frame, labels, v, false) != Rel::Gt
        };
        let mid = in_span(lo) && in_span(hi);
        if mid != frame.middle_edges.contains(&e) {
            return false;
        }
    }
    // lsep and rsep must not cross.
    let l1 = endpoint_on_layer(g, frame.lsep, 1);
    let l2 = endpoint_on_layer(g, frame.lsep, 2);
    let r1 = rel_to(frame, labels, l1, false);
    let r2 = rel_to(frame, labels, l2, false);
    !(r1 == Rel::Gt || r2 == Rel::Gt)
}

/// Step F and G: interface orders within the zone blocks, the merged
/// boundary order, the fixed-crossing count, and the budget split.
fn order_stage(frame: &Frame<'_>, labels: &[LabelSet], out: Sink<'_>) -> ControlFlow<()> {
    let ei = frame.ei;
    let g = &ei.graph;
    let interface: BTreeSet<VertexId> = frame
        .cross_lsep
        .iter()
        .chain(frame.cross_rsep.iter())
        .flat_map(|&e| g.edge(e).endpoints())
        .chain(frame.mid_full1.iter().copied())
        .chain(frame.mid_full2.iter().copied())
        .collect();
    // Zone blocks per layer: L-part, left endpoint, middle, right endpoint,
    // R-part. Only the parts inside one block are permuted.
    let mut layer_block_perms: [Vec<Vec<VertexId>>; 2] = [Vec::new(), Vec::new()];
    for layer in 1..=2u8 {
        let li = layer as usize - 1;
        let members: Vec<VertexId> = interface
            .iter()
            .copied()
            .filter(|v| g.layer_of(*v) == layer)
            .collect();
        let le = frame.sep_eps[li];
        let re = frame.sep_eps[li + 2];
        let lpart: Vec<VertexId> = members
            .iter()
            .copied()
            .filter(|&v| v != le && v != re && rel_to(frame, labels, v, true) == Rel::Lt)
            .collect();
        let mpart: Vec<VertexId> = members
            .iter()
            .copied()
            .filter(|&v| {
                v != le
                    && v != re
                    && rel_to(frame, labels, v, true) == Rel::Gt
                    && rel_to(frame, labels, v, false) == Rel::Lt
            })
            .collect();
        let rpart: Vec<VertexId> = members
            .iter()
            .copied()
            .filter(|&v| v != le && v != re && rel_to(frame, labels, v, false) == Rel::Gt)
            .collect();
        let mut all_orders = Vec::new();
        for lp in permutations(&lpart) {
            for mp in permutations(&mpart) {
                for rp in permutations(&rpart) {
                    let mut ord = lp.clone();
                    ord.push(le);
                    ord.extend(mp.iter().copied());
                    if re != le {
                        ord.push(re);
                    }
                    ord.extend(rp.iter().copied());
                    all_orders.push(ord);
                }
            }
        }
        layer_block_perms[li] = all_orders
            .into_iter()
            .flat_map(|o| chain_compatible(ei, layer, o))
            .collect();
    }
    for o1 in &layer_block_perms[0] {
        for o2 in &layer_block_perms[1] {
            finish_guess(frame, labels, o1, o2, out)?;
        }
    }
    ControlFlow::Continue(())
}

fn permutations(items: &[VertexId]) -> Vec<Vec<VertexId>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut items = items.to_vec();
    items.sort();
    loop {
        out.push(items.clone());
        // next_permutation in lexicographic id order
        let mut i = items.len() - 1;
        while i > 0 && items[i - 1] >= items[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = items.len() - 1;
        while items[j] <= items[i - 1] {
            j -= 1;
        }
        items.swap(i - 1, j);
        items[i..].reverse();
    }
    out
}

/// Keeps an interface order only when it respects the instance's chains.
fn chain_compatible(
    ei: &ExtendedInstance,
    layer: u8,
    order: Vec<VertexId>,
) -> Option<Vec<VertexId>> {
    let pos: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    for chain in &ei.chains[layer as usize - 1] {
        let mut last: Option<usize> = None;
        for v in chain {
            if let Some(&p) = pos.get(v) {
                if last.is_some_and(|l| l >= p) {
                    return None;
                }
                last = Some(p);
            }
        }
    }
    Some(order)
}

fn finish_guess(
    frame: &Frame<'_>,
    labels: &[LabelSet],
    o1: &[VertexId],
    o2: &[VertexId],
    out: Sink<'_>,
) -> ControlFlow<()> {
    let ei = frame.ei;
    let g = &ei.graph;
    let k = ei.k;
    // Fixed crossings among the interface edges under the guessed order.
    let involved: Vec<EdgeId> = frame
        .cross_lsep
        .iter()
        .chain(frame.cross_rsep.iter())
        .chain(frame.middle_edges.iter())
        .chain([&frame.lsep, &frame.rsep])
        .copied()
        .collect();
    let mut pos: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, v) in o1.iter().enumerate() {
        pos.insert(*v, i);
    }
    for (i, v) in o2.iter().enumerate() {
        pos.insert(*v, i);
    }
    let boundary_eps: [VertexId; 4] = [
        ei.boundary_endpoint(true, 1),
        ei.boundary_endpoint(true, 2),
        ei.boundary_endpoint(false, 1),
        ei.boundary_endpoint(false, 2),
    ];
    let mut k_current = 0u64;
    for (a, &e1) in involved.iter().enumerate() {
        for &e2 in involved.iter().skip(a + 1) {
            let (f1, f2) = (g.edge(e1), g.edge(e2));
            let coords = |f: &crate::graph::Edge| -> Option<(usize, usize)> {
                let (lo, hi) = if g.layer_of(f.u) == 1 {
                    (f.u, f.v)
                } else {
                    (f.v, f.u)
                };
                Some((*pos.get(&lo)?, *pos.get(&hi)?))
            };
            let (Some((a1, a2)), Some((b1, b2))) = (coords(f1), coords(f2)) else {
                // Crossing-edge endpoints outside the interface set stay in
                // their zones; their mutual crossings are settled by zones.
                let crossing = zone_crossing(frame, labels, e1, e2);
                if crossing {
                    k_current += pair_weight(ei, e1, e2, &boundary_eps);
                }
                continue;
            };
            if (a1 < b1 && a2 > b2) || (a1 > b1 && a2 < b2) {
                k_current += pair_weight(ei, e1, e2, &boundary_eps);
            }
        }
    }
    if k_current > k {
        return ControlFlow::Continue(());
    }
    let k_rest = k - k_current;
    // Merged boundary order for elaborate instances.
    let pi_ext = if ei.mode == Mode::Elaborate {
        match merge_boundary_order(frame, o1) {
            Some(c) => Some(c),
            None => return ControlFlow::Continue(()),
        }
    } else {
        None
    };
    for k_left in 0..=k_rest {
        let k_right = k_rest - k_left;
        if 2 * k_left > k || 2 * k_right > k {
            continue;
        }
        debug_assert_eq!(k_current + k_left + k_right, k);
        out(SeparatorGuess {
            lsep: frame.lsep,
            rsep: frame.rsep,
            mid1: frame.mid1.clone(),
            mid2: frame.mid2.clone(),
            middle_edges: frame.middle_edges.clone(),
            cross_lsep: frame.cross_lsep.clone(),
            cross_rsep: frame.cross_rsep.clone(),
            labels: labels.to_vec(),
            pi_next: [o1.to_vec(), o2.to_vec()],
            pi_ext: pi_ext.clone(),
            k_current,
            k_left,
            k_right,
        })?;
    }
    ControlFlow::Continue(())
}

/// Crossing weight of an edge pair: the full multiplicity product, minus
/// the weighted-by-weighted share when the pair is pinned to opposite
/// endpoints of one boundary edge.
fn pair_weight(ei: &ExtendedInstance, e1: EdgeId, e2: EdgeId, boundary_eps: &[VertexId; 4]) -> u64 {
    let g = &ei.graph;
    let (f1, f2) = (g.edge(e1), g.edge(e2));
    let mut w = f1.mult * f2.mult;
    let (w1, w2) = (
        ei.weighted.get(&e1).copied().unwrap_or(0),
        ei.weighted.get(&e2).copied().unwrap_or(0),
    );
    if w1 > 0 && w2 > 0 {
        for b in [
            (boundary_eps[0], boundary_eps[1]),
            (boundary_eps[2], boundary_eps[3]),
        ] {
            if (f1.touches(b.0) && f2.touches(b.1)) || (f1.touches(b.1) && f2.touches(b.0)) {
                w -= w1 * w2;
                break;
            }
        }
    }
    w
}

fn zone_crossing(frame: &Frame<'_>, labels: &[LabelSet], e1: EdgeId, e2: EdgeId) -> bool {
    let g = &frame.ei.graph;
    let (f1, f2) = (g.edge(e1), g.edge(e2));
    let lo = |f: &crate::graph::Edge| if g.layer_of(f.u) == 1 { f.u } else { f.v };
    let hi = |f: &crate::graph::Edge| if g.layer_of(f.u) == 1 { f.v } else { f.u };
    // Zone-level comparison: definite crossing only when the zones are
    // strictly ordered oppositely on the two layers.
    let cmp = |a: VertexId, b: VertexId| -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        if a == b {
            return Some(Equal);
        }
        let ra = (
            rel_to(frame, labels, a, true),
            rel_to(frame, labels, a, false),
        );
        let rb = (
            rel_to(frame, labels, b, true),
            rel_to(frame, labels, b, false),
        );
        let zone = |r: (Rel, Rel)| match r {
            (Rel::Lt, _) => 0,
            (Rel::Eq, _) => 1,
            (Rel::Gt, Rel::Lt) => 2,
            (_, Rel::Eq) => 3,
            _ => 4,
        };
        let (za, zb) = (zone(ra), zone(rb));
        if za == zb {
            None
        } else {
            Some(za.cmp(&zb))
        }
    };
    let (c1, c2) = (cmp(lo(f1), lo(f2)), cmp(hi(f1), hi(f2)));
    matches!(
        (c1, c2),
        (
            Some(std::cmp::Ordering::Less),
            Some(std::cmp::Ordering::Greater)
        ) | (
            Some(std::cmp::Ordering::Greater),
            Some(std::cmp::Ordering::Less)
        )
    )
}

/// Merges the layer-1 interface order with the extended-boundary chain into
/// one total order over their union; drops the guess on a cycle.
fn merge_boundary_order(frame: &Frame<'_>, o1: &[VertexId]) -> Option<Vec<VertexId>> {
    let ei = frame.ei;
    let ext_chain = ei.chains[0].first()?;
    let members: BTreeSet<VertexId> = ext_chain
        .iter()
        .copied()
        .chain([
            endpoint_on_layer(&ei.graph, frame.lsep, 1),
            endpoint_on_layer(&ei.graph, frame.rsep, 1),
        ])
        .collect();
    let mut succ: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    let mut indeg: BTreeMap<VertexId, usize> = members.iter().map(|&v| (v, 0)).collect();
    let add = |a: VertexId,
               b: VertexId,
               succ: &mut BTreeMap<VertexId, BTreeSet<VertexId>>,
               indeg: &mut BTreeMap<VertexId, usize>| {
        if succ.entry(a).or_default().insert(b) {
            *indeg.get_mut(&b).unwrap() += 1;
        }
    };
    let restrict = |seq: &[VertexId]| -> Vec<VertexId> {
        seq.iter()
            .copied()
            .filter(|v| members.contains(v))
            .collect()
    };
    for seq in [restrict(o1), restrict(ext_chain)] {
        for w in seq.windows(2) {
            add(w[0], w[1], &mut succ, &mut indeg);
        }
    }
    let mut ready: Vec<VertexId> = members.iter().copied().filter(|v| indeg[v] == 0).collect();
    let mut outv = Vec::new();
    while !ready.is_empty() {
        ready.sort();
        let v = ready.remove(0);
        outv.push(v);
        if let Some(ss) = succ.get(&v) {
            for &w in ss.clone().iter() {
                let d = indeg.get_mut(&w).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(w);
                }
            }
        }
    }
    if outv.len() == members.len() {
        Some(outv)
    } else {
        None
    }
}
