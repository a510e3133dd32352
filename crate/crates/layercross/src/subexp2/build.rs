//! From plain instances to extended instances, and from a separator guess
//! to its two sub-instances plus the recombined drawing.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Drawing, EdgeId, Instance, LayeredGraph, VertexId};

use super::guess::{Label, SeparatorGuess};
use super::{ExtendedInstance, Mode};

/// All extended instances for one budget: a guard edge pinned to each guess
/// of the leftmost and rightmost layer-1 vertex. The guards become the
/// boundary edges; a drawing of the original extends to one of these with no
/// extra crossings for at least one guess.
pub fn lift_with_budget(inst: &Instance, budget: u64) -> Vec<ExtendedInstance> {
    let g = &inst.graph;
    let n = g.n() as u32;
    let layer1 = g.layer(1).to_vec();
    let mut out = Vec::new();
    let pairs: Vec<(VertexId, VertexId)> = if layer1.len() == 1 {
        vec![(layer1[0], layer1[0])]
    } else {
        let mut p = Vec::new();
        for &a in &layer1 {
            for &b in &layer1 {
                if a != b {
                    p.push((a, b));
                }
            }
        }
        p
    };
    for (ul, ur) in pairs {
        let mut layer_of: Vec<u8> = std::iter::once(0)
            .chain(g.vertices().map(|v| g.layer_of(v)))
            .collect();
        layer_of.push(2);
        layer_of.push(2);
        let mut edges: Vec<(u32, u32, u64)> =
            g.edges().iter().map(|e| (e.u.0, e.v.0, e.mult)).collect();
        edges.push((ul.0, n + 1, 1));
        edges.push((ur.0, n + 2, 1));
        let lifted =
            LayeredGraph::try_new(2, layer_of, edges).expect("guard vertices extend the layering");
        let leftbound = lifted.find_edge(ul, VertexId(n + 1)).unwrap();
        let rightbound = lifted.find_edge(ur, VertexId(n + 2)).unwrap();
        out.push(ExtendedInstance {
            graph: lifted,
            weighted: BTreeMap::new(),
            leftbound,
            rightbound,
            mode: Mode::Normal,
            left_ext_bnd: BTreeSet::new(),
            right_ext_bnd: BTreeSet::new(),
            chains: [Vec::new(), Vec::new()],
            k: budget,
            k_star: inst.k_star.max(1),
        });
    }
    out
}

/// The full guess stream of the driver: every budget `0..=k`, every
/// endpoint-pair guess.
pub fn lift_to_extended(inst: &Instance) -> Vec<ExtendedInstance> {
    (0..=inst.k)
        .flat_map(|b| lift_with_budget(inst, b))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rejected;

/// Builds the left and right sub-instances of a guess. Returns the
/// instances plus, for each side, the old-id table (`new id -> old id`,
/// index 0 unused). Rejects guesses whose sides break connectivity,
/// reachability, or any extended-instance invariant.
pub fn build_subinstances(
    ei: &ExtendedInstance,
    g: &SeparatorGuess,
) -> Result<
    (
        ExtendedInstance,
        ExtendedInstance,
        Vec<VertexId>,
        Vec<VertexId>,
    ),
    Rejected,
> {
    let left = build_side(ei, g, true)?;
    let right = build_side(ei, g, false)?;
    Ok((left.0, right.0, left.1, right.1))
}

fn build_side(
    ei: &ExtendedInstance,
    g: &SeparatorGuess,
    left: bool,
) -> Result<(ExtendedInstance, Vec<VertexId>), Rejected> {
    let graph = &ei.graph;
    let label = if left { Label::L } else { Label::R };
    let members: Vec<VertexId> = graph
        .vertices()
        .filter(|v| g.labels[v.index()].contains(label))
        .collect();
    let keep: BTreeSet<VertexId> = members.iter().copied().collect();
    let mut new_of: BTreeMap<VertexId, u32> = BTreeMap::new();
    for (i, &v) in members.iter().enumerate() {
        new_of.insert(v, i as u32 + 1);
    }
    let mut layer_of = vec![0u8; members.len() + 1];
    for &v in &members {
        layer_of[new_of[&v] as usize] = graph.layer_of(v);
    }
    // Induced edges keep their multiplicities; weighted shares transfer.
    let mut mult: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut wmult: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (i, e) in graph.edges().iter().enumerate() {
        if keep.contains(&e.u) && keep.contains(&e.v) {
            let key = (
                new_of[&e.u].min(new_of[&e.v]),
                new_of[&e.u].max(new_of[&e.v]),
            );
            *mult.entry(key).or_insert(0) += e.mult;
            if let Some(&w) = ei.weighted.get(&EdgeId(i)) {
                *wmult.entry(key).or_insert(0) += w;
            }
        }
    }
    // Replacement multi-edges for crossing edges straddling this side's
    // separator edge: the inside endpoint keeps a weighted stub to the
    // separator endpoint on the opposite layer.
    let sep_edge = if left { g.lsep } else { g.rsep };
    let sep1 = endpoint_on_layer(graph, sep_edge, 1);
    let sep2 = endpoint_on_layer(graph, sep_edge, 2);
    let cross_set = if left { &g.cross_lsep } else { &g.cross_rsep };
    for &ce in cross_set {
        let e = graph.edge(ce);
        let (lo, hi) = if graph.layer_of(e.u) == 1 {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        };
        let lo_in = g.labels[lo.index()].contains(label);
        let hi_in = g.labels[hi.index()].contains(label);
        let (a, b) = match (lo_in, hi_in) {
            (true, false) => (lo, sep2),
            (false, true) => (sep1, hi),
            _ => continue, // endpoints settled elsewhere
        };
        if !keep.contains(&a) || !keep.contains(&b) {
            return Err(Rejected);
        }
        let key = (new_of[&a].min(new_of[&b]), new_of[&a].max(new_of[&b]));
        let w = graph.edge(ce).mult;
        *mult.entry(key).or_insert(0) += w;
        *wmult.entry(key).or_insert(0) += w;
    }
    let edges: Vec<(u32, u32, u64)> = mult.iter().map(|(&(a, b), &m)| (a, b, m)).collect();
    let side_graph = LayeredGraph::try_new_relaxed(2, layer_of, edges).map_err(|_| Rejected)?;
    let mut weighted: BTreeMap<EdgeId, u64> = BTreeMap::new();
    for (&(a, b), &w) in &wmult {
        if w == 0 {
            continue;
        }
        let id = side_graph
            .find_edge(VertexId(a), VertexId(b))
            .expect("edge was just inserted");
        weighted.insert(id, w);
    }
    // Boundary edges of the side: the outer boundary survives, the
    // separator edge becomes the inner boundary.
    let (lb_old, rb_old) = if left {
        (ei.leftbound, g.lsep)
    } else {
        (g.rsep, ei.rightbound)
    };
    let map_edge = |old: EdgeId| -> Result<EdgeId, Rejected> {
        let e = graph.edge(old);
        let (a, b) = (
            new_of.get(&e.u).ok_or(Rejected)?,
            new_of.get(&e.v).ok_or(Rejected)?,
        );
        side_graph
            .find_edge(VertexId(*a), VertexId(*b))
            .ok_or(Rejected)
    };
    let leftbound = map_edge(lb_old)?;
    let rightbound = map_edge(rb_old)?;
    // Project the extended partial order: parent chains, then the guessed
    // separator-zone orders (and the merged boundary chain in elaborate
    // mode), each restricted to surviving vertices.
    let mut chains: [Vec<Vec<VertexId>>; 2] = [Vec::new(), Vec::new()];
    for layer in 0..2 {
        let mut source: Vec<Vec<VertexId>> = ei.chains[layer].clone();
        source.push(g.pi_next[layer].clone());
        if layer == 0 {
            if let Some(extra) = &g.pi_ext {
                source.push(extra.clone());
            }
        }
        for chain in source {
            let projected: Vec<VertexId> = chain
                .iter()
                .filter(|v| keep.contains(v))
                .map(|v| VertexId(new_of[v]))
                .collect();
            if projected.len() >= 2 {
                chains[layer].push(projected);
            }
        }
    }
    let (mode, left_ext, right_ext) = match ei.mode {
        Mode::Normal => {
            if !side_graph.is_connected() {
                return Err(Rejected);
            }
            (Mode::Normal, BTreeSet::new(), BTreeSet::new())
        }
        Mode::Elaborate => {
            let inner = VertexId(*new_of.get(&sep1).ok_or(Rejected)?);
            let (l, r) = if left {
                (
                    ei.left_ext_bnd
                        .iter()
                        .filter(|v| keep.contains(v))
                        .map(|v| VertexId(new_of[v]))
                        .collect::<BTreeSet<_>>(),
                    BTreeSet::from([inner]),
                )
            } else {
                (
                    BTreeSet::from([inner]),
                    ei.right_ext_bnd
                        .iter()
                        .filter(|v| keep.contains(v))
                        .map(|v| VertexId(new_of[v]))
                        .collect::<BTreeSet<_>>(),
                )
            };
            (Mode::Elaborate, l, r)
        }
    };
    let mut side = ExtendedInstance {
        graph: side_graph,
        weighted,
        leftbound,
        rightbound,
        mode,
        left_ext_bnd: left_ext,
        right_ext_bnd: right_ext,
        chains,
        k: if left { g.k_left } else { g.k_right },
        k_star: ei.k_star,
    };
    if side.mode == Mode::Elaborate {
        // The boundary chain must come first on layer 1; synthesize it from
        // the merged order if the projection dropped it.
        let ext: Vec<VertexId> = side
            .left_ext_bnd
            .iter()
            .chain(side.right_ext_bnd.iter())
            .copied()
            .collect();
        let have = side.chains[0]
            .first()
            .is_some_and(|c| c.iter().collect::<BTreeSet<_>>() == ext.iter().collect());
        if !have {
            let mut chain: Vec<VertexId> = side.left_ext_bnd.iter().copied().collect();
            let lb1 = side.boundary_endpoint(true, 1);
            let rb1 = side.boundary_endpoint(false, 1);
            chain.retain(|v| *v != lb1);
            chain.insert(0, lb1);
            let mut right: Vec<VertexId> = side
                .right_ext_bnd
                .iter()
                .copied()
                .filter(|v| *v != rb1 && !chain.contains(v))
                .collect();
            right.push(rb1);
            chain.extend(right);
            side.chains[0].insert(0, chain);
        }
    }
    side.validate().map_err(|_| Rejected)?;
    let old_of: Vec<VertexId> = std::iter::once(VertexId(0)).chain(members).collect();
    Ok((side, old_of))
}

pub(crate) fn endpoint_on_layer(graph: &LayeredGraph, e: EdgeId, layer: u8) -> VertexId {
    let edge = graph.edge(e);
    if graph.layer_of(edge.u) == layer {
        edge.u
    } else {
        edge.v
    }
}

/// Glues sub-drawings around the guessed middle: left order, then the
/// middle vertices in guessed order, then the right order, deduplicating
/// the shared separator endpoints.
pub fn combine_drawings(
    ei: &ExtendedInstance,
    g: &SeparatorGuess,
    left: (&Drawing, &[VertexId]),
    right: (&Drawing, &[VertexId]),
) -> Drawing {
    let mut orders: Vec<Vec<VertexId>> = vec![Vec::new(), Vec::new()];
    for layer in 0..2usize {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut ord = Vec::new();
        for v in &left.0.orders[layer] {
            let old = left.1[v.index()];
            if seen.insert(old) {
                ord.push(old);
            }
        }
        for v in &g.pi_next[layer] {
            if g.mid_zone(ei, *v) && seen.insert(*v) {
                ord.push(*v);
            }
        }
        for v in &right.0.orders[layer] {
            let old = right.1[v.index()];
            if seen.insert(old) {
                ord.push(old);
            }
        }
        // Any leftover vertex of the layer would mean a labeling gap; the
        // guess builder rejects those, so this is defensive only.
        for v in ei.graph.layer(layer as u8 + 1) {
            if seen.insert(*v) {
                ord.push(*v);
            }
        }
        orders[layer] = ord;
    }
    Drawing::new(orders)
}
