//! Exact base case of the recursion: guess the set of edges involved in
//! counted crossings, guess the relative order of the interface vertices,
//! and complete the drawing so that every remaining edge crosses nothing.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Drawing, EdgeId, VertexId};
use crate::planarity::{crossing_free_with_orders, is_caterpillar_forest, OrderConstraints};

use super::guess::subsets_up_to;
use super::{ExtendedInstance, Mode};

/// Exhaustive reference decision over all valid drawings; used as the
/// recursion-depth fallback when one layer is small.
pub(crate) fn brute_extended(ei: &ExtendedInstance) -> Option<Drawing> {
    let g = &ei.graph;
    let orders: Vec<Vec<VertexId>> = (1..=2).map(|l| g.layer(l).to_vec()).collect();
    fn perms(mut items: Vec<VertexId>, f: &mut impl FnMut(&[VertexId])) {
        items.sort();
        loop {
            f(&items);
            let mut i = items.len().saturating_sub(1);
            while i > 0 && items[i - 1] >= items[i] {
                i -= 1;
            }
            if i == 0 {
                return;
            }
            let mut j = items.len() - 1;
            while items[j] <= items[i - 1] {
                j -= 1;
            }
            items.swap(i - 1, j);
            items[i..].reverse();
        }
    }
    let mut found: Option<Drawing> = None;
    let layer2 = orders[1].clone();
    perms(orders[0].clone(), &mut |o1| {
        if found.is_some() {
            return;
        }
        perms(layer2.clone(), &mut |o2| {
            if found.is_some() {
                return;
            }
            let d = Drawing::new(vec![o1.to_vec(), o2.to_vec()]);
            if ei.accepts(&d) {
                found = Some(d);
            }
        });
    });
    found
}

/// The base case. For budget zero on a plain connected instance this is a
/// constrained planarity test; otherwise crossing-involved edge sets are
/// guessed by increasing size, interface orders enumerated, and the rest of
/// the graph completed crossing-free.
pub fn base_case(ei: &ExtendedInstance) -> Option<Drawing> {
    let g = &ei.graph;
    if ei.k == 0 && ei.weighted.is_empty() && ei.mode == Mode::Normal {
        let mut oc = OrderConstraints::empty(2);
        for layer in 1..=2u8 {
            for chain in &ei.chains[layer as usize - 1] {
                oc.add_chain(layer, chain.clone());
            }
            let (s, t) = (
                ei.boundary_endpoint(true, layer),
                ei.boundary_endpoint(false, layer),
            );
            if s != t && g.layer(layer).len() >= 2 {
                oc.set_pair(layer, s, t);
            }
        }
        let d = crossing_free_with_orders(g, &oc).ok()??;
        debug_assert!(ei.accepts(&d));
        return Some(d);
    }
    let boundary = [ei.leftbound, ei.rightbound];
    let candidates: Vec<EdgeId> = g.edge_ids().filter(|e| !boundary.contains(e)).collect();
    let base_interface: BTreeSet<VertexId> = ei
        .weighted
        .keys()
        .flat_map(|&e| g.edge(e).endpoints())
        .chain(boundary.iter().flat_map(|&e| g.edge(e).endpoints()))
        .collect();
    let cap = (2 * ei.k as usize).min(candidates.len());
    for x_set in subsets_up_to(&candidates, cap) {
        if x_set.len() == 1 {
            continue; // a single edge cannot cross itself
        }
        let x: BTreeSet<EdgeId> = x_set.iter().copied().collect();
        // Quick prune: everything outside X, the weighted edges, and the
        // boundary must itself be caterpillar-drawable.
        if !rest_is_caterpillar(ei, &x) {
            continue;
        }
        let interface: BTreeSet<VertexId> = base_interface
            .iter()
            .copied()
            .chain(x.iter().flat_map(|&e| g.edge(e).endpoints()))
            .collect();
        if let Some(d) = try_interface_orders(ei, &x, &interface) {
            return Some(d);
        }
    }
    None
}

/// The edges outside `X` (and outside the weighted and boundary sets) must
/// admit a crossing-free drawing on their own.
fn rest_is_caterpillar(ei: &ExtendedInstance, x: &BTreeSet<EdgeId>) -> bool {
    let g = &ei.graph;
    let layer_of: Vec<u8> = std::iter::once(0)
        .chain(g.vertices().map(|v| g.layer_of(v)))
        .collect();
    let edges: Vec<(u32, u32, u64)> = g
        .edge_ids()
        .filter(|e| {
            !x.contains(e)
                && !ei.weighted.contains_key(e)
                && *e != ei.leftbound
                && *e != ei.rightbound
        })
        .map(|e| {
            let f = g.edge(e);
            (f.u.0, f.v.0, 1)
        })
        .collect();
    let rest = crate::graph::LayeredGraph::try_new_relaxed(2, layer_of, edges)
        .expect("subgraph of a valid graph");
    is_caterpillar_forest(&rest).ok().flatten().is_some()
}

/// Enumerates interface orders compatible with the chains and boundary
/// pinning, prices the fixed crossings, and completes.
fn try_interface_orders(
    ei: &ExtendedInstance,
    x: &BTreeSet<EdgeId>,
    interface: &BTreeSet<VertexId>,
) -> Option<Drawing> {
    let g = &ei.graph;
    let per_layer: [Vec<VertexId>; 2] = [
        interface
            .iter()
            .copied()
            .filter(|v| g.layer_of(*v) == 1)
            .collect(),
        interface
            .iter()
            .copied()
            .filter(|v| g.layer_of(*v) == 2)
            .collect(),
    ];
    let zeta1 = layer_orders(ei, 1, &per_layer[0]);
    let zeta2 = layer_orders(ei, 2, &per_layer[1]);
    let involved: Vec<EdgeId> = x
        .iter()
        .copied()
        .chain(ei.weighted.keys().copied())
        .chain([ei.leftbound, ei.rightbound])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    for z1 in &zeta1 {
        for z2 in &zeta2 {
            let mut pos: BTreeMap<VertexId, usize> = BTreeMap::new();
            for (i, v) in z1.iter().enumerate() {
                pos.insert(*v, i);
            }
            for (i, v) in z2.iter().enumerate() {
                pos.insert(*v, i);
            }
            let k_cur = fixed_crossings(ei, &involved, &pos);
            if k_cur > ei.k {
                continue;
            }
            if let Some(d) = complete(ei, x, z1, z2) {
                debug_assert!(ei.accepts(&d));
                return Some(d);
            }
        }
    }
    None
}

/// All orders of the interface vertices of one layer that pin the boundary
/// endpoints to the ends and respect the chains.
fn layer_orders(ei: &ExtendedInstance, layer: u8, members: &[VertexId]) -> Vec<Vec<VertexId>> {
    let lb = ei.boundary_endpoint(true, layer);
    let rb = ei.boundary_endpoint(false, layer);
    let inner: Vec<VertexId> = members
        .iter()
        .copied()
        .filter(|&v| v != lb && v != rb)
        .collect();
    let mut out = Vec::new();
    let mut items = inner.clone();
    items.sort();
    loop {
        let mut ord = vec![lb];
        ord.extend(items.iter().copied());
        if rb != lb {
            ord.push(rb);
        }
        if chain_ok(ei, layer, &ord) {
            out.push(ord);
        }
        let mut i = items.len();
        if i < 2 {
            break;
        }
        i -= 1;
        let mut ii = i;
        while ii > 0 && items[ii - 1] >= items[ii] {
            ii -= 1;
        }
        if ii == 0 {
            break;
        }
        let mut j = items.len() - 1;
        while items[j] <= items[ii - 1] {
            j -= 1;
        }
        items.swap(ii - 1, j);
        items[ii..].reverse();
    }
    out
}

fn chain_ok(ei: &ExtendedInstance, layer: u8, order: &[VertexId]) -> bool {
    let pos: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    for chain in &ei.chains[layer as usize - 1] {
        let mut last: Option<usize> = None;
        for v in chain {
            if let Some(&p) = pos.get(v) {
                if last.is_some_and(|l| l >= p) {
                    return false;
                }
                last = Some(p);
            }
        }
    }
    true
}

/// Counted crossings among the involved edges under the interface order,
/// honoring the boundary exception for weighted pairs.
fn fixed_crossings(
    ei: &ExtendedInstance,
    involved: &[EdgeId],
    pos: &BTreeMap<VertexId, usize>,
) -> u64 {
    let g = &ei.graph;
    let b_eps = [
        (ei.boundary_endpoint(true, 1), ei.boundary_endpoint(true, 2)),
        (
            ei.boundary_endpoint(false, 1),
            ei.boundary_endpoint(false, 2),
        ),
    ];
    let mut total = 0u64;
    for (i, &e1) in involved.iter().enumerate() {
        for &e2 in involved.iter().skip(i + 1) {
            let (f1, f2) = (g.edge(e1), g.edge(e2));
            let lohi = |f: &crate::graph::Edge| {
                if g.layer_of(f.u) == 1 {
                    (pos[&f.u], pos[&f.v])
                } else {
                    (pos[&f.v], pos[&f.u])
                }
            };
            let (a1, a2) = lohi(f1);
            let (b1, b2) = lohi(f2);
            if (a1 < b1 && a2 > b2) || (a1 > b1 && a2 < b2) {
                let mut w = f1.mult * f2.mult;
                let (w1, w2) = (
                    ei.weighted.get(&e1).copied().unwrap_or(0),
                    ei.weighted.get(&e2).copied().unwrap_or(0),
                );
                if w1 > 0 && w2 > 0 {
                    for (bu, bv) in b_eps {
                        if (f1.touches(bu) && f2.touches(bv)) || (f1.touches(bv) && f2.touches(bu))
                        {
                            w -= w1 * w2;
                            break;
                        }
                    }
                }
                total += w;
            }
        }
    }
    total
}

/// Completes an interface order into a full drawing in which the remaining
/// edges cross nothing. Layer 1 is enumerated as interleavings; layer 2
/// grows left to right with incremental rejection of any crossing that
/// involves an edge outside the guessed set.
fn complete(
    ei: &ExtendedInstance,
    x: &BTreeSet<EdgeId>,
    z1: &[VertexId],
    z2: &[VertexId],
) -> Option<Drawing> {
    let g = &ei.graph;
    let free_edge = |e: EdgeId| {
        !x.contains(&e) && !ei.weighted.contains_key(&e) && e != ei.leftbound && e != ei.rightbound
    };
    // Adjacency annotated with edge ids for the incremental check.
    let adj = g.adjacency();
    let interface: BTreeSet<VertexId> = z1.iter().chain(z2.iter()).copied().collect();
    let layer1: Vec<VertexId> = g.layer(1).to_vec();
    let layer2: Vec<VertexId> = g.layer(2).to_vec();
    let mut order1: Vec<VertexId> = Vec::with_capacity(layer1.len());
    let mut found: Option<Drawing> = None;
    fn extendable(
        z: &[VertexId],
        interface: &BTreeSet<VertexId>,
        v: VertexId,
        consumed: usize,
    ) -> Option<usize> {
        // Interface vertices must appear in exactly the guessed order; the
        // boundary pins are its first and last members, so free vertices may
        // only go strictly between them.
        if interface.contains(&v) {
            if z.get(consumed) != Some(&v) {
                return None;
            }
            Some(consumed + 1)
        } else {
            if consumed == 0 || consumed == z.len() {
                return None;
            }
            Some(consumed)
        }
    }
    // DFS over layer-1 interleavings.
    #[allow(clippy::too_many_arguments)]
    fn dfs1(
        ei: &ExtendedInstance,
        z1: &[VertexId],
        z2: &[VertexId],
        interface: &BTreeSet<VertexId>,
        layer1: &[VertexId],
        layer2: &[VertexId],
        order1: &mut Vec<VertexId>,
        consumed: usize,
        adj: &[Vec<(VertexId, EdgeId)>],
        free_edge: &impl Fn(EdgeId) -> bool,
        found: &mut Option<Drawing>,
    ) {
        if found.is_some() {
            return;
        }
        if order1.len() == layer1.len() {
            if consumed != z1.len() {
                return;
            }
            if !chain_ok_full(ei, 1, order1) || !blocks_ok(ei, order1) {
                return;
            }
            let mut order2 = Vec::with_capacity(layer2.len());
            dfs2(
                ei,
                z2,
                interface,
                layer2,
                order1,
                &mut order2,
                0,
                adj,
                free_edge,
                found,
            );
            return;
        }
        for &v in layer1 {
            if order1.contains(&v) {
                continue;
            }
            let Some(c2) = extendable(z1, interface, v, consumed) else {
                continue;
            };
            order1.push(v);
            dfs1(
                ei, z1, z2, interface, layer1, layer2, order1, c2, adj, free_edge, found,
            );
            order1.pop();
            if found.is_some() {
                return;
            }
        }
    }
    #[allow(clippy::too_many_arguments)]
    fn dfs2(
        ei: &ExtendedInstance,
        z2: &[VertexId],
        interface: &BTreeSet<VertexId>,
        layer2: &[VertexId],
        order1: &[VertexId],
        order2: &mut Vec<VertexId>,
        consumed: usize,
        adj: &[Vec<(VertexId, EdgeId)>],
        free_edge: &impl Fn(EdgeId) -> bool,
        found: &mut Option<Drawing>,
    ) {
        if found.is_some() {
            return;
        }
        if order2.len() == layer2.len() {
            if consumed != z2.len() {
                return;
            }
            if !chain_ok_full(ei, 2, order2) {
                return;
            }
            let d = Drawing::new(vec![order1.to_vec(), order2.to_vec()]);
            if ei.accepts(&d) {
                *found = Some(d);
            }
            return;
        }
        let pos1: BTreeMap<VertexId, usize> =
            order1.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        'cand: for &v in layer2 {
            if order2.contains(&v) {
                continue;
            }
            let Some(c2) = extendable(z2, interface, v, consumed) else {
                continue;
            };
            // Incremental freedom check: edges of v against edges of the
            // already placed layer-2 vertices; a crossing is allowed only
            // when both edges are in the guessed involved set.
            for &(u, ev) in &adj[v.index()] {
                let Some(&pu) = pos1.get(&u) else { continue };
                for &w in order2.iter() {
                    for &(u2, ew) in &adj[w.index()] {
                        let Some(&pu2) = pos1.get(&u2) else { continue };
                        // w sits left of v on layer 2, so the pair crosses
                        // exactly when w's endpoint lies right of v's.
                        if pu2 > pu && (free_edge(ev) || free_edge(ew)) {
                            continue 'cand;
                        }
                    }
                }
            }
            order2.push(v);
            dfs2(
                ei, z2, interface, layer2, order1, order2, c2, adj, free_edge, found,
            );
            order2.pop();
            if found.is_some() {
                return;
            }
        }
    }
    dfs1(
        ei,
        z1,
        z2,
        &interface,
        &layer1,
        &layer2,
        &mut order1,
        0,
        &adj,
        &free_edge,
        &mut found,
    );
    found
}

fn chain_ok_full(ei: &ExtendedInstance, layer: u8, order: &[VertexId]) -> bool {
    let pos: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    for chain in &ei.chains[layer as usize - 1] {
        for w in chain.windows(2) {
            match (pos.get(&w[0]), pos.get(&w[1])) {
                (Some(a), Some(b)) if a >= b => return false,
                _ => {}
            }
        }
    }
    true
}

/// Extended-boundary blocks must be consecutive on layer 1.
fn blocks_ok(ei: &ExtendedInstance, order1: &[VertexId]) -> bool {
    if ei.mode != Mode::Elaborate {
        return true;
    }
    for block in [&ei.left_ext_bnd, &ei.right_ext_bnd] {
        if block.len() < 2 {
            continue;
        }
        let posns: Vec<usize> = order1
            .iter()
            .enumerate()
            .filter(|(_, v)| block.contains(v))
            .map(|(i, _)| i)
            .collect();
        if posns[posns.len() - 1] - posns[0] != posns.len() - 1 {
            return false;
        }
    }
    true
}
