//! Search procedures for the separation-based rules: maximal proper
//! backbones for the 4- and 5-separations, and BFS-ball centered search for
//! the 6-separation. Every candidate is verified against the rule's
//! conditions before use; long cycles met along the way refute the instance
//! outright (a cycle with at least `2k + 4` vertices inside one layer gap
//! cannot be drawn with `k` crossings).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::graph::VertexId;
use crate::planarity::crossing_free_with_endpoints;

use super::work::Work;

/// A verified rule candidate. `orders` hold the rigid drawing of `H` per
/// layer (original ids, left to right); `matching`/`triples` are ordered
/// left to right.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub members: Vec<u32>,
    pub separator: Vec<u32>,
    pub orders: [Vec<u32>; 3],
    pub matching: Vec<(u32, u32)>,
    pub triples: Vec<(u32, u32, u32)>,
}

pub(crate) enum Search {
    DecidedNo,
    Candidates(Vec<Candidate>),
}

fn pos_map(order: &[u32]) -> HashMap<u32, usize> {
    order.iter().enumerate().map(|(i, v)| (*v, i)).collect()
}

/// Unique crossing-free drawing of the member set viewed on `lo`/`lo+1`,
/// constrained to keep `pairs` extreme. Orders are returned in original ids.
pub(crate) fn rigid_two_layer_orders(
    work: &Work,
    members: &[u32],
    lo: u8,
    pairs: [(u32, u32); 2],
) -> Option<[Vec<u32>; 2]> {
    let (view, old_of) = work.two_layer_view(members, lo);
    let new_of: HashMap<u32, u32> = old_of
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &v)| (v, i as u32))
        .collect();
    let vp = |v: u32| new_of.get(&v).map(|&x| VertexId(x));
    let p: Vec<(VertexId, VertexId)> = pairs
        .iter()
        .map(|&(a, b)| Some((vp(a)?, vp(b)?)))
        .collect::<Option<_>>()?;
    let d = crossing_free_with_endpoints(&view, &p).ok()??;
    Some([
        d.order(1).iter().map(|v| old_of[v.index()]).collect(),
        d.order(2).iter().map(|v| old_of[v.index()]).collect(),
    ])
}

/// Canonical caterpillar extremes of a connected member set on layers
/// `lo`/`lo+1`: the leftmost and rightmost vertex of each layer in its
/// unique drawing. Returns (lo_order, hi_order) as well.
fn caterpillar_extremes(
    work: &Work,
    members: &[u32],
    lo: u8,
) -> Option<([Vec<u32>; 2], (u32, u32), (u32, u32))> {
    let (view, old_of) = work.two_layer_view(members, lo);
    let d = crate::planarity::is_caterpillar_forest(&view).ok()??;
    if !view.is_connected() {
        return None;
    }
    let o1: Vec<u32> = d.order(1).iter().map(|v| old_of[v.index()]).collect();
    let o2: Vec<u32> = d.order(2).iter().map(|v| old_of[v.index()]).collect();
    if o1.is_empty() || o2.is_empty() {
        return None;
    }
    let u = (o1[0], *o1.last().unwrap());
    let v = (o2[0], *o2.last().unwrap());
    Some(([o1, o2], u, v))
}

/// The greedy matching of the running-time lemmas: an anchored edge on each
/// end, `2k + 1` edges packed from the left, `2k` from the right. Scanning
/// happens on `scan_hi`'s side when a filter restricts that side.
#[allow(clippy::too_many_arguments)]
pub(crate) fn greedy_matching(
    work: &Work,
    members: &BTreeSet<u32>,
    lo_order: &[u32],
    hi_order: &[u32],
    u_pair: (u32, u32),
    v_pair: (u32, u32),
    k: u64,
    hi_filter: Option<&BTreeSet<u32>>,
    lo_filter: Option<&BTreeSet<u32>>,
) -> Option<Vec<(u32, u32)>> {
    let lo_pos = pos_map(lo_order);
    let hi_pos = pos_map(hi_order);
    let mut saturated: BTreeSet<u32> = BTreeSet::new();
    let mut m: Vec<(u32, u32)> = Vec::new();
    let push = |m: &mut Vec<(u32, u32)>, saturated: &mut BTreeSet<u32>, x: u32, y: u32| {
        m.push((x, y));
        saturated.insert(x);
        saturated.insert(y);
    };
    push(&mut m, &mut saturated, u_pair.0, v_pair.0);
    let scan_hi = hi_filter.is_some();
    let admissible = |v: u32, on_hi: bool| {
        let f = if on_hi { hi_filter } else { lo_filter };
        f.is_none_or(|s| s.contains(&v))
    };
    let grab = |saturated: &mut BTreeSet<u32>, m: &mut Vec<(u32, u32)>, reverse: bool| -> bool {
        let scan: Vec<u32> = if scan_hi {
            hi_order.to_vec()
        } else {
            lo_order.to_vec()
        };
        let scan: Vec<u32> = if reverse {
            scan.into_iter().rev().collect()
        } else {
            scan
        };
        for &s in &scan {
            if saturated.contains(&s) || !admissible(s, scan_hi) {
                continue;
            }
            // Partner: first unsaturated neighbor inside H on the other side.
            let other_pos = if scan_hi { &lo_pos } else { &hi_pos };
            let mut partners: Vec<u32> = work
                .neighbors(s)
                .filter(|w| members.contains(w) && !saturated.contains(w))
                .filter(|w| other_pos.contains_key(w))
                .filter(|&w| admissible(w, !scan_hi))
                .collect();
            partners.sort_by_key(|w| other_pos[w]);
            if reverse {
                partners.reverse();
            }
            if let Some(&p) = partners.first() {
                let (x, y) = if scan_hi { (p, s) } else { (s, p) };
                push(m, saturated, x, y);
                return true;
            }
        }
        false
    };
    for _ in 0..2 * k + 1 {
        if !grab(&mut saturated, &mut m, false) {
            return None;
        }
    }
    if saturated.contains(&u_pair.1) || saturated.contains(&v_pair.1) {
        return None;
    }
    push(&mut m, &mut saturated, u_pair.1, v_pair.1);
    for _ in 0..2 * k {
        if !grab(&mut saturated, &mut m, true) {
            return None;
        }
    }
    debug_assert_eq!(m.len() as u64, 4 * k + 3);
    // Both coordinate orders must strictly increase once sorted.
    m.sort_by_key(|(x, _)| lo_pos[x]);
    for w in m.windows(2) {
        if hi_pos[&w[0].1] >= hi_pos[&w[1].1] || lo_pos[&w[0].0] >= lo_pos[&w[1].0] {
            return None;
        }
    }
    if m[0] != (u_pair.0, v_pair.0) || *m.last().unwrap() != (u_pair.1, v_pair.1) {
        return None;
    }
    Some(m)
}

/// Vertices with exactly two non-pendent neighbors, restricted to the layer
/// pair, with the middle-layer side barred from third-layer contacts.
fn backbone_candidates(work: &Work, lo: u8) -> BTreeSet<u32> {
    let third = if lo == 1 { 3 } else { 1 };
    let mut out = BTreeSet::new();
    for v in work.vertices() {
        let l = work.layer_of[v as usize];
        if l != lo && l != lo + 1 {
            continue;
        }
        if l == 2
            && work
                .neighbors(v)
                .any(|w| work.layer_of[w as usize] == third)
        {
            continue;
        }
        let non_pendent = work.neighbors(v).filter(|&w| work.degree(w) >= 2).count();
        if non_pendent == 2 {
            out.insert(v);
        }
    }
    out
}

/// Path components of the candidate subgraph with at least `4k + 1`
/// vertices; long cycles refute the instance.
fn backbone_paths(work: &Work, cand: &BTreeSet<u32>, k: u64) -> Result<Vec<Vec<u32>>, Search> {
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    let mut paths = Vec::new();
    for &s in cand.iter() {
        if seen.contains(&s) {
            continue;
        }
        let mut comp = vec![s];
        seen.insert(s);
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for w in work.neighbors(x) {
                if cand.contains(&w) && seen.insert(w) {
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        if (comp.len() as u64) < 4 * k + 1 {
            continue;
        }
        let deg_in = |v: u32| {
            work.neighbors(v)
                .filter(|w| cand.contains(w) && comp.contains(w))
                .count()
        };
        let ends: Vec<u32> = comp.iter().copied().filter(|&v| deg_in(v) <= 1).collect();
        if ends.is_empty() {
            // A cycle on one layer gap with >= 4k + 1 >= 2k + 4 vertices.
            return Err(Search::DecidedNo);
        }
        // Trace the path from its smaller end.
        let start = *ends.iter().min().unwrap();
        let mut path = vec![start];
        let mut prev = None;
        let mut cur = start;
        loop {
            let next = work
                .neighbors(cur)
                .find(|&w| cand.contains(&w) && comp.contains(&w) && Some(w) != prev);
            match next {
                Some(w) => {
                    path.push(w);
                    prev = Some(cur);
                    cur = w;
                }
                None => break,
            }
        }
        if path.len() != comp.len() {
            continue; // not a clean path; no rule application here
        }
        paths.push(path);
    }
    Ok(paths)
}

/// 4-separation search (match rules) on the given layer pair.
pub(crate) fn search_match(work: &Work, lo: u8, k: u64) -> Search {
    let cand = backbone_candidates(work, lo);
    let paths = match backbone_paths(work, &cand, k) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let mut out = Vec::new();
    for path in paths {
        // Extend both ends by their non-pendent neighbor outside the path.
        let path_set: BTreeSet<u32> = path.iter().copied().collect();
        let extend = |x: u32, avoid: Option<u32>| -> Vec<u32> {
            work.neighbors(x)
                .filter(|&w| {
                    let l = work.layer_of[w as usize];
                    l == lo || l == lo + 1
                })
                .filter(|&w| work.degree(w) >= 2 && !path_set.contains(&w) && Some(w) != avoid)
                .collect()
        };
        let (first, last) = (path[0], *path.last().unwrap());
        let (z_left, z_right) = if path.len() == 1 {
            let ext = extend(first, None);
            if ext.len() < 2 {
                continue;
            }
            (ext[0], ext[1])
        } else {
            let el = extend(first, None);
            let er = extend(last, None);
            match (el.first(), er.first()) {
                (Some(&a), Some(&b)) => (a, b),
                _ => continue,
            }
        };
        if z_left == z_right {
            return Search::DecidedNo; // the two ends close a long cycle
        }
        let mut pp = vec![z_left];
        pp.extend_from_slice(&path);
        pp.push(z_right);
        // Interior pendants join H.
        let mut a_set: BTreeSet<u32> = pp.iter().copied().collect();
        for &z in &pp[1..pp.len() - 1] {
            for w in work.neighbors(z) {
                if work.degree(w) == 1 {
                    a_set.insert(w);
                }
            }
        }
        // Boundary edges at the two ends.
        let boundary_edge = |x: u32, inner: u32, a_set: &mut BTreeSet<u32>| -> (u32, u32) {
            let outside: Vec<u32> = work
                .neighbors(x)
                .filter(|w| !a_set.contains(w))
                .filter(|&w| {
                    let l = work.layer_of[w as usize];
                    l == lo || l == lo + 1
                })
                .collect();
            match outside.first() {
                Some(&t) => {
                    a_set.insert(t);
                    (x, t)
                }
                None => (x, inner),
            }
        };
        let be1 = boundary_edge(z_left, pp[1], &mut a_set);
        let be2 = boundary_edge(z_right, pp[pp.len() - 2], &mut a_set);
        let ordered = |e: (u32, u32)| {
            if work.layer_of[e.0 as usize] == lo {
                e
            } else {
                (e.1, e.0)
            }
        };
        let (u1, v1) = ordered(be1);
        let (u2, v2) = ordered(be2);
        let boundary: BTreeSet<u32> = [u1, v1, u2, v2].into_iter().collect();
        if boundary.len() != 4 {
            continue; // ends meet; no clean separation here
        }
        // Separation closure: interior members keep all neighbors inside H.
        let members: Vec<u32> = a_set.iter().copied().collect();
        let closed = members
            .iter()
            .all(|&v| boundary.contains(&v) || work.neighbors(v).all(|w| a_set.contains(&w)));
        if !closed {
            continue;
        }
        let orders = match rigid_two_layer_orders(work, &members, lo, [(u1, u2), (v1, v2)]) {
            Some(o) => o,
            None => continue,
        };
        let matching = match greedy_matching(
            work,
            &a_set,
            &orders[0],
            &orders[1],
            (u1, u2),
            (v1, v2),
            k,
            None,
            None,
        ) {
            Some(m) => m,
            None => continue,
        };
        let mut full_orders: [Vec<u32>; 3] = Default::default();
        full_orders[lo as usize - 1] = orders[0].clone();
        full_orders[lo as usize] = orders[1].clone();
        out.push(Candidate {
            members,
            separator: vec![u1, v1, u2, v2],
            orders: full_orders,
            matching,
            triples: Vec::new(),
        });
    }
    Search::Candidates(out)
}

/// 5-separation search (paths rules): an apex vertex `w` on the far layer
/// dominates a caterpillar region on the layer pair.
pub(crate) fn search_paths(work: &Work, lo: u8, k: u64) -> Search {
    let apex_layer = if lo == 1 { 3 } else { 1 };
    let mid_layer = 2u8;
    let mut out = Vec::new();
    for w in work.layer_vertices(apex_layer) {
        let w_nbrs: BTreeSet<u32> = work.neighbors(w).collect();
        if w_nbrs.len() < 2 {
            continue;
        }
        // Region: pair-layer vertices whose far-layer contacts are only w.
        let in_region = |v: u32| {
            let l = work.layer_of[v as usize];
            (l == lo || l == lo + 1)
                && work
                    .neighbors(v)
                    .all(|x| work.layer_of[x as usize] != apex_layer || x == w)
        };
        let comps = work.components_within(&in_region);
        for comp in comps {
            if (comp.len() as u64) < 4 * k + 1 {
                continue;
            }
            let (orders, u_ext, v_ext) = match caterpillar_extremes(work, &comp, lo) {
                Some(r) => r,
                None => continue,
            };
            let (u1, u2) = u_ext;
            let (v1, v2) = v_ext;
            // Boundary paths must attach to the apex on the middle layer.
            let (m1, m2) = if lo == mid_layer { (u1, u2) } else { (v1, v2) };
            if !w_nbrs.contains(&m1) || !w_nbrs.contains(&m2) {
                continue;
            }
            if !work.has_edge(u1, v1) || !work.has_edge(u2, v2) {
                continue;
            }
            let a_set: BTreeSet<u32> = comp.iter().copied().collect();
            let boundary: BTreeSet<u32> = [u1, v1, u2, v2].into_iter().collect();
            let closed = comp.iter().all(|&v| {
                boundary.contains(&v) || work.neighbors(v).all(|x| a_set.contains(&x) || x == w)
            });
            if !closed {
                continue;
            }
            let (hi_filter, lo_filter) = if lo == mid_layer {
                (None, Some(&w_nbrs))
            } else {
                (Some(&w_nbrs), None)
            };
            let matching = match greedy_matching(
                work,
                &a_set,
                &orders[0],
                &orders[1],
                (u1, u2),
                (v1, v2),
                k,
                hi_filter,
                lo_filter,
            ) {
                Some(m) => m,
                None => continue,
            };
            let mut full_orders: [Vec<u32>; 3] = Default::default();
            full_orders[lo as usize - 1] = orders[0].clone();
            full_orders[lo as usize] = orders[1].clone();
            out.push(Candidate {
                members: comp,
                separator: vec![u1, v1, u2, v2, w],
                orders: full_orders,
                matching,
                triples: Vec::new(),
            });
        }
    }
    Search::Candidates(out)
}

/// BFS ball of radius `r` around `v` with a visit cap; `None` when the cap
/// is exceeded (which refutes the instance by the distance lemma).
fn bfs_ball(work: &Work, v: u32, r: u128, cap: u128) -> Option<BTreeSet<u32>> {
    let mut dist: BTreeMap<u32, u128> = BTreeMap::new();
    dist.insert(v, 0);
    let mut q = VecDeque::from([v]);
    while let Some(x) = q.pop_front() {
        let dx = dist[&x];
        if dx == r {
            continue;
        }
        for w in work.neighbors(x) {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(dx + 1);
                if dist.len() as u128 > cap {
                    return None;
                }
                q.push_back(w);
            }
        }
    }
    Some(dist.into_keys().collect())
}

/// 6-separation search: centered BFS balls, anchored path-triple pairs, and
/// a rigid-drawing check of the enclosed region.
pub(crate) fn search_six(work: &Work, k: u64) -> Search {
    let k128 = k as u128;
    let radius = (1u128 << 11) * (k128 + 2).pow(6);
    let cap = (1u128 << 12) * (radius + 2 * k128 + 2) * (k128 + 2).pow(6);
    let mut out = Vec::new();
    for center in work.layer_vertices(2) {
        let has1 = work
            .neighbors(center)
            .any(|x| work.layer_of[x as usize] == 1);
        let has3 = work
            .neighbors(center)
            .any(|x| work.layer_of[x as usize] == 3);
        if !has1 || !has3 {
            continue;
        }
        let ball = match bfs_ball(work, center, radius, cap) {
            Some(b) => b,
            None => return Search::DecidedNo,
        };
        // Anchored triples x-y-z inside the ball.
        let mut triples = Vec::new();
        for &y in &ball {
            if work.layer_of[y as usize] != 2 {
                continue;
            }
            for x in work
                .neighbors(y)
                .filter(|&x| work.layer_of[x as usize] == 1)
            {
                for z in work
                    .neighbors(y)
                    .filter(|&z| work.layer_of[z as usize] == 3)
                {
                    if ball.contains(&x) && ball.contains(&z) {
                        triples.push((x, y, z));
                    }
                }
            }
        }
        for i in 0..triples.len() {
            for j in 0..triples.len() {
                if i == j {
                    continue;
                }
                let (t1, t2) = (triples[i], triples[j]);
                let s: BTreeSet<u32> = [t1.0, t1.1, t1.2, t2.0, t2.1, t2.2].into_iter().collect();
                if s.len() != 6 || s.contains(&center) {
                    continue;
                }
                // Component of G - S containing the center, fully in the ball.
                let comps = work.components_within(&|v| !s.contains(&v));
                let comp = match comps.iter().find(|c| c.contains(&center)) {
                    Some(c) => c.clone(),
                    None => continue,
                };
                if !comp.iter().all(|v| ball.contains(v)) {
                    continue;
                }
                let mut members: Vec<u32> = comp;
                members.extend(s.iter().copied());
                members.sort_unstable();
                let member_set: BTreeSet<u32> = members.iter().copied().collect();
                // Separation closure for the interior.
                let interior_ok = members
                    .iter()
                    .filter(|v| !s.contains(v))
                    .all(|&v| work.neighbors(v).all(|x| member_set.contains(&x)));
                if !interior_ok {
                    continue;
                }
                let (view, old_of) = work.view(&members);
                if !view.is_connected() {
                    continue;
                }
                let new_of: HashMap<u32, VertexId> = old_of
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(idx, &v)| (v, VertexId(idx as u32)))
                    .collect();
                let pairs = [
                    (new_of[&t1.0], new_of[&t2.0]),
                    (new_of[&t1.1], new_of[&t2.1]),
                    (new_of[&t1.2], new_of[&t2.2]),
                ];
                let d = match crossing_free_with_endpoints(&view, &pairs) {
                    Ok(Some(d)) => d,
                    _ => continue,
                };
                let orders: [Vec<u32>; 3] = [
                    d.order(1).iter().map(|v| old_of[v.index()]).collect(),
                    d.order(2).iter().map(|v| old_of[v.index()]).collect(),
                    d.order(3).iter().map(|v| old_of[v.index()]).collect(),
                ];
                let family = match greedy_triples(work, &member_set, &orders, t1, t2, k) {
                    Some(f) => f,
                    None => continue,
                };
                out.push(Candidate {
                    members,
                    separator: vec![t1.0, t1.1, t1.2, t2.0, t2.1, t2.2],
                    orders,
                    matching: Vec::new(),
                    triples: family,
                });
                if !out.is_empty() {
                    return Search::Candidates(out);
                }
            }
        }
    }
    Search::Candidates(out)
}

/// Greedy vertex-disjoint x-y-z path packing by middle-layer order; the
/// anchored triples must come out first and last. Returns exactly `4k + 3`
/// triples: the left `2k + 2` and right `2k + 1` of the packing.
pub(crate) fn greedy_triples(
    work: &Work,
    members: &BTreeSet<u32>,
    orders: &[Vec<u32>; 3],
    t1: (u32, u32, u32),
    t2: (u32, u32, u32),
    k: u64,
) -> Option<Vec<(u32, u32, u32)>> {
    let p1 = pos_map(&orders[0]);
    let p2 = pos_map(&orders[1]);
    let p3 = pos_map(&orders[2]);
    let mut used: BTreeSet<u32> = BTreeSet::new();
    let mut fam: Vec<(u32, u32, u32)> = Vec::new();
    for &(x, y, z) in &[t1, t2] {
        used.extend([x, y, z]);
        fam.push((x, y, z));
    }
    for &y in &orders[1] {
        if used.contains(&y) {
            continue;
        }
        let mut xs: Vec<u32> = work
            .neighbors(y)
            .filter(|x| members.contains(x) && !used.contains(x))
            .filter(|&x| work.layer_of[x as usize] == 1)
            .collect();
        let mut zs: Vec<u32> = work
            .neighbors(y)
            .filter(|z| members.contains(z) && !used.contains(z))
            .filter(|&z| work.layer_of[z as usize] == 3)
            .collect();
        xs.sort_by_key(|x| p1.get(x).copied().unwrap_or(usize::MAX));
        zs.sort_by_key(|z| p3.get(z).copied().unwrap_or(usize::MAX));
        if let (Some(&x), Some(&z)) = (xs.first(), zs.first()) {
            if p1.contains_key(&x) && p3.contains_key(&z) {
                used.extend([x, y, z]);
                fam.push((x, y, z));
            }
        }
    }
    if (fam.len() as u64) < 4 * k + 3 {
        return None;
    }
    fam.sort_by_key(|(_, y, _)| p2.get(y).copied().unwrap_or(usize::MAX));
    if fam[0] != t1 || *fam.last().unwrap() != t2 {
        return None;
    }
    // Keep the outermost packing around the middle: left 2k+2, right 2k+1.
    let need = (4 * k + 3) as usize;
    let left = (2 * k + 2) as usize;
    let right = need - left;
    let mut picked: Vec<(u32, u32, u32)> = fam[..left].to_vec();
    picked.extend_from_slice(&fam[fam.len() - right..]);
    // All three coordinates must be strictly increasing.
    for w in picked.windows(2) {
        let (a, b) = (w[0], w[1]);
        if p1[&a.0] >= p1[&b.0] || p2[&a.1] >= p2[&b.1] || p3[&a.2] >= p3[&b.2] {
            return None;
        }
    }
    Some(picked)
}
