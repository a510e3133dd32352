//! Fixpoint kernelization mode: rules fire one at a time in a fixed order,
//! with separations found by naive enumeration of separator tuples. This
//! mode exists to cross-validate the scheduled searches on small graphs.

use std::collections::BTreeSet;

use crate::graph::Instance;
use crate::planarity::crossing_free_with_endpoints;

use super::backbone::Candidate;
use super::rules;
use super::work::Work;
use super::{
    apply_match_candidate, apply_paths_candidate, apply_six_candidate, Kernel3Error,
    Kernel3Outcome, RuleApplication, RuleId,
};

const FIXPOINT_MAX_N: usize = 60;

/// Enumerates components of `G - separator` that stay on the allowed layers
/// and keeps their unions: the all-eligible union first, then each single
/// component.
fn component_unions(work: &Work, separator: &BTreeSet<u32>, layers: &[u8]) -> Vec<Vec<u32>> {
    let comps = work.components_within(&|v| !separator.contains(&v));
    let eligible: Vec<Vec<u32>> = comps
        .into_iter()
        .filter(|c| {
            c.iter()
                .all(|&v| layers.contains(&work.layer_of[v as usize]))
        })
        .collect();
    let mut out = Vec::new();
    if eligible.len() > 1 {
        let mut union: Vec<u32> = eligible.iter().flatten().copied().collect();
        union.sort_unstable();
        out.push(union);
    }
    out.extend(eligible);
    out
}

fn two_layer_candidate(
    work: &Work,
    members: &[u32],
    lo: u8,
    u_pair: (u32, u32),
    v_pair: (u32, u32),
    k: u64,
    apex: Option<u32>,
) -> Option<Candidate> {
    let member_set: BTreeSet<u32> = members.iter().copied().collect();
    // H must be connected.
    let (view, _) = work.view(members);
    if !view.is_connected() {
        return None;
    }
    let orders = super::backbone::rigid_two_layer_orders(
        work,
        members,
        lo,
        [(u_pair.0, u_pair.1), (v_pair.0, v_pair.1)],
    )?;
    let w_nbrs: Option<BTreeSet<u32>> = apex.map(|w| work.neighbors(w).collect());
    let (hi_filter, lo_filter) = match (&w_nbrs, lo) {
        (Some(nb), 1) => (Some(nb), None),
        (Some(nb), _) => (None, Some(nb)),
        (None, _) => (None, None),
    };
    let matching = super::backbone::greedy_matching(
        work,
        &member_set,
        &orders[0],
        &orders[1],
        u_pair,
        v_pair,
        k,
        hi_filter,
        lo_filter,
    )?;
    let mut full_orders: [Vec<u32>; 3] = Default::default();
    full_orders[lo as usize - 1] = orders[0].clone();
    full_orders[lo as usize] = orders[1].clone();
    let mut separator = vec![u_pair.0, v_pair.0, u_pair.1, v_pair.1];
    if let Some(w) = apex {
        separator.push(w);
    }
    Some(Candidate {
        members: members.to_vec(),
        separator,
        orders: full_orders,
        matching,
        triples: Vec::new(),
    })
}

/// Naive 4-separation: every ordered pair of disjoint edges on the layer
/// pair, every eligible component union.
fn naive_match(work: &mut Work, lo: u8, k: u64) -> Option<RuleApplication> {
    let layers = [lo, lo + 1];
    let mut pair_edges: Vec<(u32, u32)> = Vec::new();
    for v in work.layer_vertices(lo) {
        for w in work.neighbors(v) {
            if work.layer_of[w as usize] == lo + 1 {
                pair_edges.push((v, w));
            }
        }
    }
    pair_edges.sort_unstable();
    for &(u1, v1) in &pair_edges {
        for &(u2, v2) in &pair_edges {
            let sep: BTreeSet<u32> = [u1, v1, u2, v2].into_iter().collect();
            if sep.len() != 4 {
                continue;
            }
            for union in component_unions(work, &sep, &layers) {
                let mut members = union;
                members.extend(sep.iter().copied());
                members.sort_unstable();
                // Middle-layer interior may not touch the third layer.
                let third = if lo == 1 { 3 } else { 1 };
                let ok = members.iter().all(|&v| {
                    sep.contains(&v)
                        || work
                            .neighbors(v)
                            .all(|x| work.layer_of[x as usize] != third)
                });
                if !ok {
                    continue;
                }
                if let Some(cand) =
                    two_layer_candidate(work, &members, lo, (u1, u2), (v1, v2), k, None)
                {
                    let rule = if lo == 1 {
                        RuleId::MatchA
                    } else {
                        RuleId::MatchB
                    };
                    if let Some(app) = apply_match_candidate(work, &cand, lo, k, rule) {
                        return Some(app);
                    }
                }
            }
        }
    }
    None
}

/// Naive 5-separation: every apex on the far layer, every ordered pair of
/// edges whose middle endpoints see the apex.
fn naive_paths(work: &mut Work, lo: u8, k: u64) -> Option<RuleApplication> {
    let layers = [lo, lo + 1];
    let apex_layer = if lo == 1 { 3 } else { 1 };
    let mid_is_lo = lo == 2;
    for w in work.layer_vertices(apex_layer) {
        let w_nbrs: BTreeSet<u32> = work.neighbors(w).collect();
        let mut pair_edges: Vec<(u32, u32)> = Vec::new();
        for v in work.layer_vertices(lo) {
            for x in work.neighbors(v) {
                if work.layer_of[x as usize] != lo + 1 {
                    continue;
                }
                let mid = if mid_is_lo { v } else { x };
                if w_nbrs.contains(&mid) {
                    pair_edges.push((v, x));
                }
            }
        }
        pair_edges.sort_unstable();
        for &(u1, v1) in &pair_edges {
            for &(u2, v2) in &pair_edges {
                let mut sep: BTreeSet<u32> = [u1, v1, u2, v2].into_iter().collect();
                if sep.len() != 4 {
                    continue;
                }
                sep.insert(w);
                for union in component_unions(work, &sep, &layers) {
                    let mut members = union;
                    members.extend([u1, v1, u2, v2]);
                    members.sort_unstable();
                    members.dedup();
                    let member_set: BTreeSet<u32> = members.iter().copied().collect();
                    let bnd: BTreeSet<u32> = [u1, v1, u2, v2].into_iter().collect();
                    let ok = members.iter().all(|&v| {
                        bnd.contains(&v)
                            || work.neighbors(v).all(|x| member_set.contains(&x) || x == w)
                    });
                    if !ok {
                        continue;
                    }
                    if let Some(cand) =
                        two_layer_candidate(work, &members, lo, (u1, u2), (v1, v2), k, Some(w))
                    {
                        let rule = if lo == 1 {
                            RuleId::PathsA
                        } else {
                            RuleId::PathsB
                        };
                        if let Some(app) = apply_paths_candidate(work, &cand, lo, k, rule) {
                            return Some(app);
                        }
                    }
                }
            }
        }
    }
    None
}

/// Naive 6-separation: every pair of disjoint anchored triples, every
/// component of the remainder.
fn naive_six(work: &mut Work, k: u64) -> Option<RuleApplication> {
    let mut triples = Vec::new();
    for y in work.layer_vertices(2) {
        for x in work
            .neighbors(y)
            .filter(|&x| work.layer_of[x as usize] == 1)
        {
            for z in work
                .neighbors(y)
                .filter(|&z| work.layer_of[z as usize] == 3)
            {
                triples.push((x, y, z));
            }
        }
    }
    for i in 0..triples.len() {
        for j in 0..triples.len() {
            if i == j {
                continue;
            }
            let (t1, t2) = (triples[i], triples[j]);
            let sep: BTreeSet<u32> = [t1.0, t1.1, t1.2, t2.0, t2.1, t2.2].into_iter().collect();
            if sep.len() != 6 {
                continue;
            }
            for union in component_unions(work, &sep, &[1, 2, 3]) {
                let mut members = union;
                members.extend(sep.iter().copied());
                members.sort_unstable();
                let member_set: BTreeSet<u32> = members.iter().copied().collect();
                let interior_ok = members.iter().all(|&v| {
                    sep.contains(&v) || work.neighbors(v).all(|x| member_set.contains(&x))
                });
                if !interior_ok {
                    continue;
                }
                let (view, old_of) = work.view(&members);
                if !view.is_connected() {
                    continue;
                }
                let new_of: std::collections::HashMap<u32, crate::graph::VertexId> = old_of
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(idx, &v)| (v, crate::graph::VertexId(idx as u32)))
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
                let family = super::backbone::greedy_triples(work, &member_set, &orders, t1, t2, k);
                if let Some(family) = family {
                    let cand = Candidate {
                        members,
                        separator: vec![t1.0, t1.1, t1.2, t2.0, t2.1, t2.2],
                        orders,
                        matching: Vec::new(),
                        triples: family,
                    };
                    if let Some(app) = apply_six_candidate(work, &cand, k) {
                        return Some(app);
                    }
                }
            }
        }
    }
    None
}

pub(crate) fn kernelize_fixpoint(inst: &Instance) -> Result<Kernel3Outcome, Kernel3Error> {
    if inst.graph.n() > FIXPOINT_MAX_N {
        return Err(Kernel3Error::FixpointTooLarge(inst.graph.n()));
    }
    let mut work = Work::from_instance(inst);
    let mut trace = Vec::new();
    'outer: loop {
        for rule in [RuleId::Comp, RuleId::Pend, RuleId::DegTwo, RuleId::Nice] {
            let pass = match rule {
                RuleId::Comp => rules::pass_comp(&mut work, true),
                RuleId::Pend => rules::pass_pend(&mut work, true),
                RuleId::DegTwo => rules::pass_degtwo(&mut work, true),
                RuleId::Nice => rules::pass_nice(&mut work, true),
                _ => unreachable!(),
            };
            if !pass.0.is_empty() {
                trace.extend(pass.0);
                continue 'outer;
            }
        }
        for (rule, lo) in [(RuleId::MatchA, 1u8), (RuleId::MatchB, 2u8)] {
            let _ = rule;
            if let Some(app) = naive_match(&mut work, lo, inst.k) {
                trace.push(app);
                continue 'outer;
            }
        }
        for lo in [1u8, 2u8] {
            if let Some(app) = naive_paths(&mut work, lo, inst.k) {
                trace.push(app);
                continue 'outer;
            }
        }
        if let Some(app) = naive_six(&mut work, inst.k) {
            trace.push(app);
            continue 'outer;
        }
        break;
    }
    if rules::final_rule_rejects(&work) {
        return Ok(Kernel3Outcome::DecidedNo);
    }
    if work.n_alive() == 0 {
        return Ok(Kernel3Outcome::DecidedYes { witness: None });
    }
    Ok(Kernel3Outcome::Kernelized {
        instance: work.to_instance(inst.k_star),
        trace,
    })
}
