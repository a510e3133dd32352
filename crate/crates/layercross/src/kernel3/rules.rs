//! The local reduction rules: crossing-free components, pendant caps,
//! degree-two caps, nice components, and the final size rule.

use crate::graph::VertexId;
use crate::planarity::crossing_free;

use super::work::Work;
use super::{RuleApplication, RuleId};

/// Applications performed by one pass (possibly none).
pub(crate) struct Pass(pub Vec<RuleApplication>);

fn app(
    rule: RuleId,
    deleted: Vec<u32>,
    added: Vec<(u32, u32)>,
    locus: Vec<u32>,
) -> RuleApplication {
    RuleApplication {
        rule,
        deleted: deleted.into_iter().map(VertexId).collect(),
        added_edges: added
            .into_iter()
            .map(|(a, b)| (VertexId(a), VertexId(b)))
            .collect(),
        locus: locus.into_iter().map(VertexId).collect(),
    }
}

/// Deletes every connected component that can be drawn without crossings.
pub(crate) fn pass_comp(work: &mut Work, single: bool) -> Pass {
    let mut apps = Vec::new();
    for comp in work.components() {
        let (view, _) = work.view(&comp);
        if crossing_free(&view).ok().flatten().is_some() {
            for &v in &comp {
                work.delete_vertex(v);
            }
            apps.push(app(RuleId::Comp, comp.clone(), Vec::new(), comp));
            if single {
                break;
            }
        }
    }
    Pass(apps)
}

/// Pendant neighbors of `u` on layer `layer`.
fn pendants_of(work: &Work, u: u32, layer: u8) -> Vec<u32> {
    work.neighbors(u)
        .filter(|&w| work.layer_of[w as usize] == layer && work.degree(w) == 1)
        .collect()
}

/// Caps pendant neighborhoods of middle-layer vertices at `k + 1` per side.
pub(crate) fn pass_pend(work: &mut Work, single: bool) -> Pass {
    let cap = work.k as usize + 1;
    let mut apps = Vec::new();
    loop {
        let mut changed = false;
        for u in work.layer_vertices(2) {
            for side in [1u8, 3u8] {
                let pend = pendants_of(work, u, side);
                if pend.len() > cap {
                    let doomed: Vec<u32> = pend[..pend.len() - cap].to_vec();
                    for &v in if single { &doomed[..1] } else { &doomed[..] } {
                        work.delete_vertex(v);
                        apps.push(app(RuleId::Pend, vec![v], Vec::new(), vec![u]));
                        if single {
                            return Pass(apps);
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Pass(apps)
}

/// Caps `|Q(u,v)|`, the degree-two middle vertices joining `u` in layer 1 to
/// `v` in layer 3, at `k + 1`.
pub(crate) fn pass_degtwo(work: &mut Work, single: bool) -> Pass {
    let cap = work.k as usize + 1;
    let mut apps = Vec::new();
    loop {
        let mut changed = false;
        let mut groups: std::collections::BTreeMap<(u32, u32), Vec<u32>> =
            std::collections::BTreeMap::new();
        for w in work.layer_vertices(2) {
            if work.degree(w) != 2 {
                continue;
            }
            let nb: Vec<u32> = work.neighbors(w).collect();
            let (a, b) = (nb[0], nb[1]);
            let (la, lb) = (work.layer_of[a as usize], work.layer_of[b as usize]);
            if la.min(lb) == 1 && la.max(lb) == 3 {
                let key = if la == 1 { (a, b) } else { (b, a) };
                groups.entry(key).or_default().push(w);
            }
        }
        for ((u, v), q) in groups {
            if q.len() > cap {
                let doomed: Vec<u32> = q[..q.len() - cap].to_vec();
                for &w in if single { &doomed[..1] } else { &doomed[..] } {
                    work.delete_vertex(w);
                    apps.push(app(RuleId::DegTwo, vec![w], Vec::new(), vec![u, v]));
                    if single {
                        return Pass(apps);
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Pass(apps)
}

/// Nice components of `G - u` for `u` in layer 1 or 3: caterpillar-shaped
/// components on the two opposite layers whose only outside neighbor is `u`.
/// At `2k + 2` or more of them, delete down to `2k + 1`, trivial ones first.
pub(crate) fn pass_nice(work: &mut Work, single: bool) -> Pass {
    let keep = 2 * work.k as usize + 1;
    let mut apps = Vec::new();
    loop {
        let mut changed = false;
        for (u_layer, comp_lo) in [(1u8, 2u8), (3u8, 1u8)] {
            // Components inside the two layers away from u's layer.
            let comps = work.components_within(&|v| {
                let l = work.layer_of[v as usize];
                l == comp_lo || l == comp_lo + 1
            });
            let mut assigned: std::collections::BTreeMap<u32, Vec<Vec<u32>>> =
                std::collections::BTreeMap::new();
            for comp in comps {
                // Unique neighbor on u's layer?
                let mut outside = std::collections::BTreeSet::new();
                for &v in &comp {
                    for w in work.neighbors(v) {
                        if work.layer_of[w as usize] == u_layer {
                            outside.insert(w);
                        }
                    }
                }
                if outside.len() != 1 {
                    continue;
                }
                let (view, _) = work.two_layer_view(&comp, comp_lo);
                if crate::planarity::is_caterpillar_forest(&view)
                    .ok()
                    .flatten()
                    .is_none()
                {
                    continue;
                }
                assigned
                    .entry(*outside.iter().next().unwrap())
                    .or_default()
                    .push(comp);
            }
            for (u, mut comps) in assigned {
                if comps.len() <= keep {
                    continue;
                }
                // Trivial components first, then by smallest member.
                comps.sort_by_key(|c| (c.len() != 1, c[0]));
                let doom = comps.len() - keep;
                for comp in comps.into_iter().take(if single { 1 } else { doom }) {
                    for &v in &comp {
                        work.delete_vertex(v);
                    }
                    apps.push(app(RuleId::Nice, comp, Vec::new(), vec![u]));
                    if single {
                        return Pass(apps);
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Pass(apps)
}

/// Final size rule: a reduced graph larger than the kernel bound cannot be a
/// yes-instance.
pub(crate) fn final_rule_rejects(work: &Work) -> bool {
    let k = work.k as u128;
    let vertex_bound = (1u128 << 15) * (k + 2).pow(8);
    let edge_bound = (1u128 << 16) * (k + 2).pow(8) + k;
    (work.n_alive() as u128) > vertex_bound || (work.m_alive() as u128) > edge_bound
}
