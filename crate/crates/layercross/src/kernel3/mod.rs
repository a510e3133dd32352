//! 3-layer kernelization: reduction rules 1-9 plus the final size rule,
//! with a scheduled mode (backbone- and ball-driven searches) and a naive
//! fixpoint mode used as a cross-validation oracle.

mod backbone;
mod fixpoint;
mod rules;
mod work;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{Drawing, Instance, VertexId};
use crate::planarity::crossing_free;

pub use backbone::Candidate;
use backbone::Search;
use work::Work;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Kernel3Error {
    #[error("kernelization requires a 3-layer instance, got {0} layers")]
    NotThreeLayers(u8),
    #[error("kernelization handles unit multiplicities only")]
    MultiEdge,
    #[error("fixpoint mode is limited to 60 vertices, got {0}")]
    FixpointTooLarge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RuleId {
    Comp,
    Pend,
    DegTwo,
    Nice,
    MatchA,
    MatchB,
    PathsA,
    PathsB,
    PathsC,
    Final,
}

impl RuleId {
    pub fn name(self) -> &'static str {
        match self {
            RuleId::Comp => "comp",
            RuleId::Pend => "pend",
            RuleId::DegTwo => "degtwo",
            RuleId::Nice => "nice",
            RuleId::MatchA => "matchA",
            RuleId::MatchB => "matchB",
            RuleId::PathsA => "pathsA",
            RuleId::PathsB => "pathsB",
            RuleId::PathsC => "pathsC",
            RuleId::Final => "final",
        }
    }
}

/// One rule application, in the coordinates of the input instance.
#[derive(Clone, Debug)]
pub struct RuleApplication {
    pub rule: RuleId,
    pub deleted: Vec<VertexId>,
    pub added_edges: Vec<(VertexId, VertexId)>,
    pub locus: Vec<VertexId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    Scheduled,
    Fixpoint,
}

#[derive(Clone, Debug)]
pub enum Kernel3Outcome {
    DecidedYes {
        witness: Option<Drawing>,
    },
    DecidedNo,
    Kernelized {
        instance: Instance,
        trace: Vec<RuleApplication>,
    },
}

#[derive(Clone, Debug)]
pub enum RuleOutcome {
    Changed(Instance, RuleApplication),
    NotApplicable,
    DecidedNo,
    DecidedYes,
}

/// Kernel size bounds from the final rule: (max vertices, max edges).
pub fn final_bounds(k: u64) -> (u128, u128) {
    let k = k as u128;
    (
        (1u128 << 15) * (k + 2).pow(8),
        (1u128 << 16) * (k + 2).pow(8) + k,
    )
}

fn check_input(inst: &Instance) -> Result<(), Kernel3Error> {
    if inst.graph.h() != 3 {
        return Err(Kernel3Error::NotThreeLayers(inst.graph.h()));
    }
    if inst.graph.edges().iter().any(|e| e.mult > 1) {
        return Err(Kernel3Error::MultiEdge);
    }
    Ok(())
}

/// Deletion window and reconnection shared by the separation rules. `lo` is
/// the rule's lower layer; `m` the ordered matching.
fn apply_match_candidate(
    work: &mut Work,
    cand: &Candidate,
    lo: u8,
    k: u64,
    rule: RuleId,
) -> Option<RuleApplication> {
    let members: BTreeSet<u32> = cand.members.iter().copied().collect();
    let lo_order = &cand.orders[lo as usize - 1];
    let hi_order = &cand.orders[lo as usize];
    let px: std::collections::HashMap<u32, usize> =
        lo_order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let py: std::collections::HashMap<u32, usize> =
        hi_order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let m = &cand.matching;
    let ki = k as usize;
    let (e_l, e_m, e_r) = (m[2 * ki], m[2 * ki + 1], m[2 * ki + 2]);
    // z1: the endpoint of the left window edge whose backbone continues
    // rightward; z2 mirrors it on the right edge.
    let continues = |x: u32, partner_pos: usize, on_lo: bool, rightward: bool| {
        work.neighbors(x).any(|nb| {
            if !members.contains(&nb) {
                return false;
            }
            let p = if on_lo { py.get(&nb) } else { px.get(&nb) };
            p.is_some_and(|&p| {
                if rightward {
                    p > partner_pos
                } else {
                    p < partner_pos
                }
            })
        })
    };
    let z1 = {
        let fx = continues(e_l.0, py[&e_l.1], true, true);
        let fy = continues(e_l.1, px[&e_l.0], false, true);
        match (fx, fy) {
            (true, false) => e_l.0,
            (false, true) => e_l.1,
            _ => return None,
        }
    };
    let z2 = {
        let fx = continues(e_r.0, py[&e_r.1], true, false);
        let fy = continues(e_r.1, px[&e_r.0], false, false);
        match (fx, fy) {
            (true, false) => e_r.0,
            (false, true) => e_r.1,
            _ => return None,
        }
    };
    let window = |order: &[u32], a: u32, b: u32, pm: &std::collections::HashMap<u32, usize>| {
        let (pa, pb) = (pm[&a], pm[&b]);
        order[pa + 1..pb].to_vec()
    };
    let win_lo = window(lo_order, e_l.0, e_r.0, &px);
    let win_hi = window(hi_order, e_l.1, e_r.1, &py);
    let (zl1, zl2) = (work.layer_of[z1 as usize], work.layer_of[z2 as usize]);
    let mut deleted = Vec::new();
    let mut added = Vec::new();
    if zl1 != zl2 {
        for &v in win_lo.iter().chain(win_hi.iter()) {
            work.delete_vertex(v);
            deleted.push(v);
        }
        work.add_edge(z1, z2);
        added.push((z1, z2));
    } else {
        // Both continuations on one side: restore the opposite-side middle
        // matching endpoint with fresh edges to z1 and z2.
        let keep = if zl1 == lo { e_m.1 } else { e_m.0 };
        for &v in win_lo.iter().chain(win_hi.iter()) {
            if v == keep {
                continue;
            }
            work.delete_vertex(v);
            deleted.push(v);
        }
        work.delete_edges_of(keep);
        work.add_edge(z1, keep);
        work.add_edge(z2, keep);
        added.push((z1, keep));
        added.push((z2, keep));
    }
    if deleted.is_empty() {
        return None;
    }
    Some(RuleApplication {
        rule,
        deleted: deleted.into_iter().map(VertexId).collect(),
        added_edges: added
            .into_iter()
            .map(|(a, b)| (VertexId(a), VertexId(b)))
            .collect(),
        locus: cand.separator.iter().map(|&v| VertexId(v)).collect(),
    })
}

/// Deletion for the 5-separation rules: the windows clear out, except that
/// the middle-layer center of the window survives with two fresh edges.
fn apply_paths_candidate(
    work: &mut Work,
    cand: &Candidate,
    lo: u8,
    k: u64,
    rule: RuleId,
) -> Option<RuleApplication> {
    let lo_order = &cand.orders[lo as usize - 1];
    let hi_order = &cand.orders[lo as usize];
    let px: std::collections::HashMap<u32, usize> =
        lo_order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let py: std::collections::HashMap<u32, usize> =
        hi_order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let m = &cand.matching;
    let ki = k as usize;
    let (e_l, e_m, e_r) = (m[2 * ki], m[2 * ki + 1], m[2 * ki + 2]);
    let win_lo = lo_order[px[&e_l.0] + 1..px[&e_r.0]].to_vec();
    let win_hi = hi_order[py[&e_l.1] + 1..py[&e_r.1]].to_vec();
    // The kept vertex is on layer 2; its new partners are on the other side.
    let (keep, partners) = if lo == 1 {
        (e_m.1, (e_l.0, e_r.0))
    } else {
        (e_m.0, (e_l.1, e_r.1))
    };
    let mut deleted = Vec::new();
    for &v in win_lo.iter().chain(win_hi.iter()) {
        if v == keep {
            continue;
        }
        work.delete_vertex(v);
        deleted.push(v);
    }
    if deleted.is_empty() {
        return None;
    }
    work.delete_edges_of(keep);
    work.add_edge(partners.0, keep);
    work.add_edge(partners.1, keep);
    Some(RuleApplication {
        rule,
        deleted: deleted.into_iter().map(VertexId).collect(),
        added_edges: vec![
            (VertexId(partners.0), VertexId(keep)),
            (VertexId(partners.1), VertexId(keep)),
        ],
        locus: cand.separator.iter().map(|&v| VertexId(v)).collect(),
    })
}

/// Deletion for the 6-separation rule over all three layers.
fn apply_six_candidate(work: &mut Work, cand: &Candidate, k: u64) -> Option<RuleApplication> {
    let pos: Vec<std::collections::HashMap<u32, usize>> = cand
        .orders
        .iter()
        .map(|o| o.iter().enumerate().map(|(i, v)| (*v, i)).collect())
        .collect();
    let t = &cand.triples;
    let ki = k as usize;
    let (t_l, t_m, t_r) = (t[2 * ki], t[2 * ki + 1], t[2 * ki + 2]);
    let keep = t_m.1;
    let mut deleted = Vec::new();
    let windows = [
        (0usize, t_l.0, t_r.0),
        (1usize, t_l.1, t_r.1),
        (2usize, t_l.2, t_r.2),
    ];
    for (li, a, b) in windows {
        let (pa, pb) = (pos[li][&a], pos[li][&b]);
        for &v in &cand.orders[li][pa + 1..pb] {
            if v == keep {
                continue;
            }
            work.delete_vertex(v);
            deleted.push(v);
        }
    }
    if deleted.is_empty() {
        return None;
    }
    work.delete_edges_of(keep);
    work.add_edge(t_l.0, keep);
    work.add_edge(t_r.0, keep);
    Some(RuleApplication {
        rule: RuleId::PathsC,
        deleted: deleted.into_iter().map(VertexId).collect(),
        added_edges: vec![
            (VertexId(t_l.0), VertexId(keep)),
            (VertexId(t_r.0), VertexId(keep)),
        ],
        locus: cand.separator.iter().map(|&v| VertexId(v)).collect(),
    })
}

enum StageResult {
    No,
    Applied(Vec<RuleApplication>),
}

/// Runs one separation stage to its own fixpoint: search, apply the first
/// workable candidate, repeat.
fn run_separation_stage(work: &mut Work, rule: RuleId, k: u64, single: bool) -> StageResult {
    let mut apps = Vec::new();
    loop {
        let search = match rule {
            RuleId::MatchA => backbone::search_match(work, 1, k),
            RuleId::MatchB => backbone::search_match(work, 2, k),
            RuleId::PathsA => backbone::search_paths(work, 1, k),
            RuleId::PathsB => backbone::search_paths(work, 2, k),
            RuleId::PathsC => backbone::search_six(work, k),
            _ => unreachable!(),
        };
        let candidates = match search {
            Search::DecidedNo => return StageResult::No,
            Search::Candidates(c) => c,
        };
        let lo = match rule {
            RuleId::MatchA | RuleId::PathsA => 1,
            _ => 2,
        };
        let mut applied = false;
        for cand in &candidates {
            let app = match rule {
                RuleId::MatchA | RuleId::MatchB => apply_match_candidate(work, cand, lo, k, rule),
                RuleId::PathsA | RuleId::PathsB => apply_paths_candidate(work, cand, lo, k, rule),
                RuleId::PathsC => apply_six_candidate(work, cand, k),
                _ => unreachable!(),
            };
            if let Some(app) = app {
                apps.push(app);
                applied = true;
                break;
            }
        }
        if !applied || single {
            return StageResult::Applied(apps);
        }
    }
}

/// Scheduled kernelization: crossing-free shortcut, component cleanup, the
/// local rules to fixpoint, the separation stages with degree-two re-passes,
/// ball-centered 6-separations with local cleanup, then the size rule.
pub fn kernelize3(inst: &Instance, mode: KernelMode) -> Result<Kernel3Outcome, Kernel3Error> {
    check_input(inst)?;
    if let Some(witness) =
        crossing_free(&inst.graph).expect("3-layer graph accepted by the planarity engine")
    {
        return Ok(Kernel3Outcome::DecidedYes {
            witness: Some(witness),
        });
    }
    if inst.k == 0 {
        return Ok(Kernel3Outcome::DecidedNo);
    }
    // A yes-instance stays planar after deleting one edge per crossing, and
    // planar bipartite graphs have at most 2n - 4 edges.
    if inst.graph.m() as u64 > 2 * inst.graph.n() as u64 + inst.k {
        return Ok(Kernel3Outcome::DecidedNo);
    }
    if mode == KernelMode::Fixpoint {
        return fixpoint::kernelize_fixpoint(inst);
    }
    let mut work = Work::from_instance(inst);
    let mut trace = Vec::new();
    let run_local = |work: &mut Work, trace: &mut Vec<RuleApplication>| {
        for pass in [rules::pass_pend, rules::pass_degtwo, rules::pass_nice] {
            trace.extend(pass(work, false).0);
        }
    };
    trace.extend(rules::pass_comp(&mut work, false).0);
    run_local(&mut work, &mut trace);
    for stage in [RuleId::MatchA, RuleId::MatchB] {
        match run_separation_stage(&mut work, stage, inst.k, false) {
            StageResult::No => return Ok(Kernel3Outcome::DecidedNo),
            StageResult::Applied(a) => trace.extend(a),
        }
    }
    trace.extend(rules::pass_degtwo(&mut work, false).0);
    for stage in [RuleId::PathsA, RuleId::PathsB] {
        match run_separation_stage(&mut work, stage, inst.k, false) {
            StageResult::No => return Ok(Kernel3Outcome::DecidedNo),
            StageResult::Applied(a) => trace.extend(a),
        }
    }
    trace.extend(rules::pass_degtwo(&mut work, false).0);
    match run_separation_stage(&mut work, RuleId::PathsC, inst.k, false) {
        StageResult::No => return Ok(Kernel3Outcome::DecidedNo),
        StageResult::Applied(a) => {
            let any = !a.is_empty();
            trace.extend(a);
            if any {
                run_local(&mut work, &mut trace);
            }
        }
    }
    if rules::final_rule_rejects(&work) {
        return Ok(Kernel3Outcome::DecidedNo);
    }
    Ok(Kernel3Outcome::Kernelized {
        instance: work.to_instance(inst.k_star),
        trace,
    })
}

/// Applies a single rule once (the first applicable site in the module's
/// deterministic search order).
pub fn apply_rule(rule: RuleId, inst: &Instance) -> Result<RuleOutcome, Kernel3Error> {
    check_input(inst)?;
    if rule == RuleId::Final {
        // Pure size check; no need to materialize the working graph.
        let (vmax, emax) = final_bounds(inst.k);
        return Ok(
            if (inst.graph.n() as u128) > vmax || (inst.graph.m() as u128) > emax {
                RuleOutcome::DecidedNo
            } else {
                RuleOutcome::NotApplicable
            },
        );
    }
    let mut work = Work::from_instance(inst);
    let outcome = match rule {
        RuleId::Comp => rules::pass_comp(&mut work, true),
        RuleId::Pend => rules::pass_pend(&mut work, true),
        RuleId::DegTwo => rules::pass_degtwo(&mut work, true),
        RuleId::Nice => rules::pass_nice(&mut work, true),
        RuleId::MatchA | RuleId::MatchB | RuleId::PathsA | RuleId::PathsB | RuleId::PathsC => {
            return Ok(match run_separation_stage(&mut work, rule, inst.k, true) {
                StageResult::No => RuleOutcome::DecidedNo,
                StageResult::Applied(mut a) => {
                    if let Some(app) = a.pop() {
                        RuleOutcome::Changed(work.to_instance(inst.k_star), app)
                    } else {
                        RuleOutcome::NotApplicable
                    }
                }
            });
        }
        RuleId::Final => unreachable!("handled before the work graph is built"),
    };
    let mut a = outcome.0;
    Ok(if let Some(app) = a.pop() {
        if work.n_alive() == 0 {
            RuleOutcome::DecidedYes
        } else {
            RuleOutcome::Changed(work.to_instance(inst.k_star), app)
        }
    } else {
        RuleOutcome::NotApplicable
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeparationVariant {
    FourSep,
    FiveSep,
    SixSep,
}

#[derive(Clone, Debug)]
pub enum SeparationSearch {
    /// A long-cycle obstruction was met; the instance is a no-instance.
    DecidedNo,
    Candidates(Vec<Candidate>),
}

/// Enumerates verified candidates for the separation rules.
pub fn find_backbone_separations(
    inst: &Instance,
    variant: SeparationVariant,
) -> Result<SeparationSearch, Kernel3Error> {
    check_input(inst)?;
    let work = Work::from_instance(inst);
    let mut all = Vec::new();
    let searches: Vec<Search> = match variant {
        SeparationVariant::FourSep => vec![
            backbone::search_match(&work, 1, inst.k),
            backbone::search_match(&work, 2, inst.k),
        ],
        SeparationVariant::FiveSep => vec![
            backbone::search_paths(&work, 1, inst.k),
            backbone::search_paths(&work, 2, inst.k),
        ],
        SeparationVariant::SixSep => vec![backbone::search_six(&work, inst.k)],
    };
    for s in searches {
        match s {
            Search::DecidedNo => return Ok(SeparationSearch::DecidedNo),
            Search::Candidates(c) => all.extend(c),
        }
    }
    Ok(SeparationSearch::Candidates(all))
}
