//! Gadget constructions and their pinned drawings. Vertex ids follow
//! construction order, gadget by gadget; port vertices are exported by name.
//!
//! The bit gadgets are 13-vertex paths over three layers (`Z`), optionally
//! with an extra apex splitting the central span (`U`), and their
//! complements carrying pendant bundles of size `p`. A symbol gadget chains
//! one bit gadget per encoding bit between two filling fans; its complement
//! chains complement gadgets through connector forks. The string encoder
//! concatenates symbol gadgets; the complement side gets one collector
//! vertex per symbol on layer 4. The reductions wrap those in pendant
//! anchors (4 layers) or anchor-plus-collector guards (5 layers).

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Drawing, Instance, LayeredGraph, VertexId};

use super::df::DfInstance;
use super::{GadgetError, GadgetParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetKind {
    Z,
    Zhat,
    U,
    Uhat,
    F,
    C,
}

impl GadgetKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "z" => GadgetKind::Z,
            "zhat" => GadgetKind::Zhat,
            "u" => GadgetKind::U,
            "uhat" => GadgetKind::Uhat,
            "f" => GadgetKind::F,
            "c" => GadgetKind::C,
            _ => return None,
        })
    }
}

/// A built gadget: graph, its canonical drawing, and named ports.
#[derive(Clone, Debug)]
pub struct Built {
    pub graph: LayeredGraph,
    pub drawing: Drawing,
    pub ports: BTreeMap<String, VertexId>,
}

/// A built reduction instance with its budget and optional witness drawing.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub instance: Instance,
    pub ports: BTreeMap<String, VertexId>,
    pub witness_drawing: Option<Drawing>,
}

struct B {
    h: u8,
    layer_of: Vec<u8>,
    edges: BTreeSet<(u32, u32)>,
}

impl B {
    fn new(h: u8) -> Self {
        B {
            h,
            layer_of: vec![0],
            edges: BTreeSet::new(),
        }
    }

    fn v(&mut self, layer: u8) -> u32 {
        self.layer_of.push(layer);
        (self.layer_of.len() - 1) as u32
    }

    fn vs(&mut self, layer: u8, count: u64) -> Vec<u32> {
        (0..count).map(|_| self.v(layer)).collect()
    }

    fn e(&mut self, a: u32, b: u32) {
        self.edges.insert((a.min(b), a.max(b)));
    }

    fn graph(&self) -> LayeredGraph {
        LayeredGraph::try_new(
            self.h,
            self.layer_of.clone(),
            self.edges.iter().map(|&(a, b)| (a, b, 1)).collect(),
        )
        .expect("builders construct valid layered graphs")
    }
}

fn drawing(orders: Vec<Vec<u32>>) -> Drawing {
    Drawing::new(
        orders
            .into_iter()
            .map(|o| o.into_iter().map(VertexId).collect())
            .collect(),
    )
}

fn ports(list: &[(&str, u32)]) -> BTreeMap<String, VertexId> {
    list.iter()
        .map(|&(name, v)| (name.to_string(), VertexId(v)))
        .collect()
}

/// One bit gadget of a symbol chain: the 13 path vertices and, for one
/// bits, the apex above the central span.
struct SGadget {
    w: [u32; 13],
    extra: Option<u32>,
}

/// One symbol gadget: filling fans around the bit chain.
struct SCopy {
    a: u32,
    x_first: Vec<u32>,
    d: u32,
    gadgets: Vec<SGadget>,
    a2: u32,
    x_last: Vec<u32>,
    c2: u32,
    d2: u32,
}

impl SCopy {
    fn b(&self) -> u32 {
        self.gadgets[0].w[0]
    }

    fn b2(&self) -> u32 {
        self.gadgets.last().unwrap().w[12]
    }
}

const ZU_LAYER: [u8; 13] = [3, 2, 1, 2, 3, 2, 1, 2, 3, 2, 1, 2, 3];

/// Adds one symbol gadget. `junction` reuses an existing layer-2 vertex as
/// the lowest member of the first fan (string concatenation).
fn add_s_copy(b: &mut B, params: &GadgetParams, bits: &[bool], junction: Option<u32>) -> SCopy {
    let p = params.p;
    let a = b.v(1);
    let w0 = b.v(3);
    let mut x_first = Vec::new();
    if let Some(j) = junction {
        x_first.push(j);
    }
    while (x_first.len() as u64) < p {
        x_first.push(b.v(2));
    }
    for &x in &x_first {
        b.e(a, x);
        b.e(x, w0);
    }
    // The second-lowest fan member is shared with the first path vertex.
    let d = x_first[1];
    let mut gadgets: Vec<SGadget> = Vec::new();
    let mut prev = w0;
    for (j, &bit) in bits.iter().enumerate() {
        let mut w = [0u32; 13];
        w[0] = prev;
        w[1] = if j == 0 { d } else { b.v(ZU_LAYER[1]) };
        for (i, &layer) in ZU_LAYER.iter().enumerate().skip(2) {
            w[i] = b.v(layer);
        }
        for i in 0..12 {
            b.e(w[i], w[i + 1]);
        }
        let extra = bit.then(|| {
            let x = b.v(3);
            b.e(w[5], x);
            b.e(w[7], x);
            x
        });
        prev = w[12];
        gadgets.push(SGadget { w, extra });
    }
    let a2 = b.v(1);
    let c2 = gadgets.last().unwrap().w[11];
    let mut x_last = vec![c2];
    while (x_last.len() as u64) < p {
        x_last.push(b.v(2));
    }
    let d2 = x_last[1];
    for &x in &x_last {
        b.e(a2, x);
        b.e(x, prev);
    }
    SCopy {
        a,
        x_first,
        d,
        gadgets,
        a2,
        x_last,
        c2,
        d2,
    }
}

/// Canonical per-layer blocks of a symbol gadget, left to right. The
/// junction member of the first fan is skipped (its block belongs to the
/// previous copy).
fn s_blocks(copy: &SCopy, junction: Option<u32>) -> [Vec<u32>; 3] {
    let mut l1 = vec![copy.a];
    let mut l2: Vec<u32> = Vec::new();
    let mut l3 = vec![copy.b()];
    let mut first: Vec<u32> = copy
        .x_first
        .iter()
        .copied()
        .filter(|&x| x != copy.d && Some(x) != junction)
        .collect();
    first.sort_unstable();
    l2.extend(first);
    for (j, g) in copy.gadgets.iter().enumerate() {
        l1.extend([g.w[2], g.w[6], g.w[10]]);
        if j == 0 {
            l2.push(copy.d);
        } else {
            l2.push(g.w[1]);
        }
        l2.extend([g.w[3], g.w[5], g.w[7], g.w[9], g.w[11]]);
        l3.push(g.w[4]);
        if let Some(x) = g.extra {
            l3.push(x);
        }
        l3.extend([g.w[8], g.w[12]]);
    }
    l1.push(copy.a2);
    let mut last: Vec<u32> = copy
        .x_last
        .iter()
        .copied()
        .filter(|&x| x != copy.c2 && x != copy.d2)
        .collect();
    last.sort_unstable();
    l2.extend(last);
    l2.push(copy.d2);
    [l1, l2, l3]
}

/// One complement bit gadget: the 5-vertex spine plus pendant bundles.
struct HatGadget {
    h: [u32; 5],
    a1: Vec<u32>,
    a3: Vec<u32>,
    b0: Vec<u32>,
    b2: Vec<u32>,
    b4: Vec<u32>,
}

/// A symbol complement: spines joined by connector forks.
struct HatCopy {
    gadgets: Vec<HatGadget>,
    conns: Vec<(u32, Vec<u32>)>,
}

impl HatCopy {
    fn v3_vertices(&self) -> Vec<u32> {
        self.gadgets
            .iter()
            .flat_map(|g| [g.h[0], g.h[2], g.h[4]])
            .collect()
    }
}

fn add_hat_copy(b: &mut B, params: &GadgetParams, bits: &[bool]) -> HatCopy {
    let p = params.p;
    let mut gadgets: Vec<HatGadget> = Vec::new();
    let mut conns = Vec::new();
    for (j, &bit) in bits.iter().enumerate() {
        let conn = (j > 0).then(|| {
            let z = b.v(2);
            let pend = b.vs(1, p);
            for &q in &pend {
                b.e(q, z);
            }
            (z, pend)
        });
        let h = [b.v(3), b.v(2), b.v(3), b.v(2), b.v(3)];
        for i in 0..4 {
            b.e(h[i], h[i + 1]);
        }
        let a1 = b.vs(1, p);
        for &q in &a1 {
            b.e(q, h[1]);
        }
        let a3 = b.vs(1, p);
        for &q in &a3 {
            b.e(q, h[3]);
        }
        let b0 = b.vs(2, p);
        for &q in &b0 {
            b.e(q, h[0]);
        }
        let b2 = if bit {
            Vec::new()
        } else {
            let s = b.vs(2, p);
            for &q in &s {
                b.e(q, h[2]);
            }
            s
        };
        let b4 = b.vs(2, p);
        for &q in &b4 {
            b.e(q, h[4]);
        }
        if let Some((z, pend)) = conn {
            b.e(z, gadgets.last().unwrap().h[4]);
            b.e(z, h[0]);
            conns.push((z, pend));
        }
        gadgets.push(HatGadget {
            h,
            a1,
            a3,
            b0,
            b2,
            b4,
        });
    }
    HatCopy { gadgets, conns }
}

/// Canonical standalone blocks of a complement gadget.
fn hat_blocks(copy: &HatCopy) -> [Vec<u32>; 3] {
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    let mut l3 = Vec::new();
    for (j, g) in copy.gadgets.iter().enumerate() {
        if j > 0 {
            let (z, pend) = &copy.conns[j - 1];
            l1.extend(pend.iter().copied());
            l2.push(*z);
        }
        l1.extend(g.a1.iter().copied());
        l1.extend(g.a3.iter().copied());
        l2.extend(g.b0.iter().copied());
        l2.push(g.h[1]);
        l2.extend(g.b2.iter().copied());
        l2.push(g.h[3]);
        l2.extend(g.b4.iter().copied());
        l3.extend([g.h[0], g.h[2], g.h[4]]);
    }
    [l1, l2, l3]
}

/// Interleaved blocks of one symbol gadget with its complement drawn
/// restrictively inside it: every complement spine vertex sits in the gap
/// its bit assigns, pendant bundles slot into the adjacent pockets, and the
/// connector forks bridge consecutive bit gadgets.
fn restrictive_blocks(s: &SCopy, hat: &HatCopy, junction: Option<u32>) -> [Vec<u32>; 3] {
    let mut l1 = vec![s.a];
    let mut l2: Vec<u32> = Vec::new();
    let mut l3 = vec![s.b()];
    let mut first: Vec<u32> = s
        .x_first
        .iter()
        .copied()
        .filter(|&x| x != s.d && Some(x) != junction)
        .collect();
    first.sort_unstable();
    l2.extend(first);
    for (j, (g, hg)) in s.gadgets.iter().zip(hat.gadgets.iter()).enumerate() {
        // Layer 1: the gadget's three spine vertices with the complement's
        // pendant bundles in the two pockets, then any connector fork.
        l1.push(g.w[2]);
        l1.extend(hg.a1.iter().copied());
        l1.push(g.w[6]);
        l1.extend(hg.a3.iter().copied());
        l1.push(g.w[10]);
        if let Some((_, pend)) = hat.conns.get(j) {
            l1.extend(pend.iter().copied());
        }
        // Layer 2.
        l2.push(if j == 0 { s.d } else { g.w[1] });
        l2.extend(hg.b0.iter().copied());
        l2.push(g.w[3]);
        l2.push(hg.h[1]);
        l2.push(g.w[5]);
        l2.extend(hg.b2.iter().copied());
        l2.push(g.w[7]);
        l2.push(hg.h[3]);
        l2.push(g.w[9]);
        l2.extend(hg.b4.iter().copied());
        l2.push(g.w[11]);
        if let Some((z, _)) = hat.conns.get(j) {
            l2.push(*z);
        }
        // Layer 3.
        l3.push(hg.h[0]);
        l3.push(g.w[4]);
        l3.push(hg.h[2]);
        if let Some(x) = g.extra {
            l3.push(x);
        }
        l3.push(g.w[8]);
        l3.push(hg.h[4]);
        l3.push(g.w[12]);
    }
    l1.push(s.a2);
    let mut last: Vec<u32> = s
        .x_last
        .iter()
        .copied()
        .filter(|&x| x != s.c2 && x != s.d2)
        .collect();
    last.sort_unstable();
    l2.extend(last);
    l2.push(s.d2);
    [l1, l2, l3]
}

/// Standalone basic gadgets with canonical drawings and ports.
pub fn build_gadget(kind: GadgetKind, params: &GadgetParams) -> Result<Built, GadgetError> {
    let p = params.p;
    let mut b = B::new(3);
    Ok(match kind {
        GadgetKind::Z | GadgetKind::U => {
            let w: Vec<u32> = ZU_LAYER.iter().map(|&l| b.v(l)).collect();
            for i in 0..12 {
                b.e(w[i], w[i + 1]);
            }
            let mut l3 = vec![w[0], w[4], w[8], w[12]];
            let mut plist: Vec<(String, u32)> = w
                .iter()
                .enumerate()
                .map(|(i, &v)| (format!("w{i}"), v))
                .collect();
            plist.push(("u".into(), w[0]));
            plist.push(("v".into(), w[12]));
            if kind == GadgetKind::U {
                let x = b.v(3);
                b.e(w[5], x);
                b.e(w[7], x);
                l3 = vec![w[0], w[4], x, w[8], w[12]];
                plist.push(("w".into(), x));
            }
            Built {
                graph: b.graph(),
                drawing: drawing(vec![
                    vec![w[2], w[6], w[10]],
                    vec![w[1], w[3], w[5], w[7], w[9], w[11]],
                    l3,
                ]),
                ports: plist
                    .iter()
                    .map(|(n, v)| (n.clone(), VertexId(*v)))
                    .collect(),
            }
        }
        GadgetKind::Zhat | GadgetKind::Uhat => {
            let bit = kind == GadgetKind::Uhat;
            let hat = add_hat_copy(&mut b, params, &[bit]);
            let [l1, l2, l3] = hat_blocks(&hat);
            let g = &hat.gadgets[0];
            Built {
                graph: b.graph(),
                drawing: drawing(vec![l1, l2, l3]),
                ports: ports(&[
                    ("x", g.h[0]),
                    ("w0", g.h[0]),
                    ("w1", g.h[1]),
                    ("w2", g.h[2]),
                    ("w3", g.h[3]),
                    ("w4", g.h[4]),
                    ("y", g.h[4]),
                ]),
            }
        }
        GadgetKind::F => {
            let a = b.v(1);
            let bb = b.v(3);
            let x = b.vs(2, p);
            for &q in &x {
                b.e(a, q);
                b.e(q, bb);
            }
            Built {
                graph: b.graph(),
                drawing: drawing(vec![vec![a], x.clone(), vec![bb]]),
                ports: ports(&[("a", a), ("b", bb), ("c", x[0]), ("d", x[1])]),
            }
        }
        GadgetKind::C => {
            let x = b.v(3);
            let y = b.v(3);
            let z = b.v(2);
            b.e(x, z);
            b.e(y, z);
            let pend = b.vs(1, p);
            for &q in &pend {
                b.e(q, z);
            }
            Built {
                graph: b.graph(),
                drawing: drawing(vec![pend, vec![z], vec![x, y]]),
                ports: ports(&[("x", x), ("y", y), ("z", z)]),
            }
        }
    })
}

fn s_ports(copy: &SCopy) -> BTreeMap<String, VertexId> {
    ports(&[
        ("a", copy.a),
        ("b", copy.b()),
        ("c", copy.x_first[0]),
        ("d", copy.d),
        ("a'", copy.a2),
        ("b'", copy.b2()),
        ("c'", copy.c2),
        ("d'", copy.d2),
    ])
}

/// Symbol gadget for symbol `i` with its canonical drawing.
pub fn build_s(i: usize, params: &GadgetParams) -> Result<Built, GadgetError> {
    let bits = params.bits(i)?;
    let mut b = B::new(3);
    let copy = add_s_copy(&mut b, params, &bits, None);
    let [l1, l2, l3] = s_blocks(&copy, None);
    Ok(Built {
        graph: b.graph(),
        drawing: drawing(vec![l1, l2, l3]),
        ports: s_ports(&copy),
    })
}

/// Symbol complement gadget with its canonical drawing.
pub fn build_shat(i: usize, params: &GadgetParams) -> Result<Built, GadgetError> {
    let bits = params.bits(i)?;
    let mut b = B::new(3);
    let hat = add_hat_copy(&mut b, params, &bits);
    let [l1, l2, l3] = hat_blocks(&hat);
    let first = hat.gadgets.first().unwrap().h[0];
    let last = hat.gadgets.last().unwrap().h[4];
    Ok(Built {
        graph: b.graph(),
        drawing: drawing(vec![l1, l2, l3]),
        ports: ports(&[("x", first), ("y", last)]),
    })
}

/// The disjoint union of a symbol gadget and its own complement, drawn
/// restrictively; the count is exactly `14*ell - 2`.
pub fn restrictive_drawing(i: usize, params: &GadgetParams) -> Result<(Built, u64), GadgetError> {
    let bits = params.bits(i)?;
    let mut b = B::new(3);
    let copy = add_s_copy(&mut b, params, &bits, None);
    let hat = add_hat_copy(&mut b, params, &bits);
    let [l1, l2, l3] = restrictive_blocks(&copy, &hat, None);
    let mut ports = s_ports(&copy);
    ports.insert("hat.x".into(), VertexId(hat.gadgets[0].h[0]));
    ports.insert("hat.y".into(), VertexId(hat.gadgets.last().unwrap().h[4]));
    Ok((
        Built {
            graph: b.graph(),
            drawing: drawing(vec![l1, l2, l3]),
            ports,
        },
        params.restrictive_count(),
    ))
}

struct RParts {
    copies: Vec<SCopy>,
}

impl RParts {
    fn b1(&self) -> u32 {
        self.copies[0].b()
    }

    fn bn2(&self) -> u32 {
        self.copies.last().unwrap().b2()
    }
}

fn add_r(b: &mut B, s: &DfInstance, params: &GadgetParams) -> Result<RParts, GadgetError> {
    let mut copies: Vec<SCopy> = Vec::new();
    for &sym in &s.symbols {
        let bits = params.bits(sym + 1)?;
        let junction = copies.last().map(|c| c.d2);
        let copy = add_s_copy(b, params, &bits, junction);
        copies.push(copy);
    }
    Ok(RParts { copies })
}

fn r_blocks(parts: &RParts, hats: &BTreeMap<usize, &HatCopy>) -> [Vec<u32>; 3] {
    let mut l = [Vec::new(), Vec::new(), Vec::new()];
    for (i, copy) in parts.copies.iter().enumerate() {
        let junction = (i > 0).then(|| parts.copies[i - 1].d2);
        let blocks = match hats.get(&i) {
            Some(hat) => restrictive_blocks(copy, hat, junction),
            None => s_blocks(copy, junction),
        };
        for (li, blk) in blocks.into_iter().enumerate() {
            l[li].extend(blk);
        }
    }
    l
}

/// The string encoder: one symbol gadget per input symbol, concatenated by
/// merging adjacent filling-fan members.
pub fn build_r(s: &DfInstance, params: &GadgetParams) -> Result<Built, GadgetError> {
    let mut b = B::new(3);
    let parts = add_r(&mut b, s, params)?;
    let [l1, l2, l3] = r_blocks(&parts, &BTreeMap::new());
    let mut pm = ports(&[
        ("a_1", parts.copies[0].a),
        ("b_1", parts.b1()),
        ("a'_n", parts.copies.last().unwrap().a2),
        ("b'_n", parts.bn2()),
    ]);
    for (i, c) in parts.copies.iter().enumerate() {
        pm.insert(format!("r{}.b", i + 1), VertexId(c.b()));
        pm.insert(format!("r{}.b'", i + 1), VertexId(c.b2()));
    }
    Ok(Built {
        graph: b.graph(),
        drawing: drawing(vec![l1, l2, l3]),
        ports: pm,
    })
}

struct RhatParts {
    pairs: Vec<(HatCopy, HatCopy, u32)>,
}

fn add_rhat(b: &mut B, params: &GadgetParams) -> Result<RhatParts, GadgetError> {
    let mut pairs = Vec::new();
    for i in 1..=params.k as usize {
        let bits = params.bits(i)?;
        let h1 = add_hat_copy(b, params, &bits);
        let h2 = add_hat_copy(b, params, &bits);
        let v = b.v(4);
        for q in h1.v3_vertices().into_iter().chain(h2.v3_vertices()) {
            b.e(v, q);
        }
        pairs.push((h1, h2, v));
    }
    Ok(RhatParts { pairs })
}

/// The collector side: two complement copies per symbol, all layer-3
/// vertices tied to one layer-4 collector.
pub fn build_rhat(params: &GadgetParams) -> Result<Built, GadgetError> {
    let mut b = B::new(4);
    let parts = add_rhat(&mut b, params)?;
    let mut l = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for (h1, h2, v) in &parts.pairs {
        for hat in [h1, h2] {
            let blocks = hat_blocks(hat);
            for (li, blk) in blocks.into_iter().enumerate() {
                l[li].extend(blk);
            }
        }
        l[3].push(*v);
    }
    let mut pm = BTreeMap::new();
    for (i, (_, _, v)) in parts.pairs.iter().enumerate() {
        pm.insert(format!("v{}", i + 1), VertexId(*v));
    }
    let [l1, l2, l3, l4] = l;
    Ok(Built {
        graph: b.graph(),
        drawing: drawing(vec![l1, l2, l3, l4]),
        ports: pm,
    })
}

/// Normalized factor placement: for symbol `t` (0-based), the copies that
/// host its two complement gadgets.
fn witness_placement(
    s: &DfInstance,
    witness: &[super::df::Factor],
) -> Result<Vec<(usize, usize)>, GadgetError> {
    if !s.witness_valid(witness) {
        return Err(GadgetError::BadWitness(
            "not k disjoint factors with distinct first symbols".into(),
        ));
    }
    let mut placement = vec![(0usize, 0usize); s.k];
    for f in witness {
        placement[f.symbol] = (f.start, f.end - 1);
    }
    Ok(placement)
}

/// The 4-layer drawing of the encoder and collector sides for a yes
/// witness: each complement sits restrictively inside its factor-endpoint
/// copy, collectors are ordered by factor position, and the count is
/// exactly `2k(14*ell - 2)`.
pub fn yes_drawing(
    s: &DfInstance,
    params: &GadgetParams,
    witness: &[super::df::Factor],
) -> Result<Built, GadgetError> {
    let placement = witness_placement(s, witness)?;
    let mut b = B::new(4);
    let parts = add_r(&mut b, s, params)?;
    let rhat = add_rhat(&mut b, params)?;
    let mut hats: BTreeMap<usize, &HatCopy> = BTreeMap::new();
    for (t, (start, end)) in placement.iter().enumerate() {
        hats.insert(*start, &rhat.pairs[t].0);
        hats.insert(*end, &rhat.pairs[t].1);
    }
    let [l1, l2, l3] = r_blocks(&parts, &hats);
    // Collectors ordered by factor start position.
    let mut order: Vec<(usize, usize)> = placement
        .iter()
        .enumerate()
        .map(|(t, (start, _))| (*start, t))
        .collect();
    order.sort_unstable();
    let l4: Vec<u32> = order.iter().map(|&(_, t)| rhat.pairs[t].2).collect();
    let mut pm = ports(&[
        ("a_1", parts.copies[0].a),
        ("b_1", parts.b1()),
        ("b'_n", parts.bn2()),
    ]);
    for (i, (_, _, v)) in rhat.pairs.iter().enumerate() {
        pm.insert(format!("v{}", i + 1), VertexId(*v));
    }
    Ok(Built {
        graph: b.graph(),
        drawing: drawing(vec![l1, l2, l3, l4]),
        ports: pm,
    })
}

/// The 4-layer reduction: encoder and collector plus pendant anchors at the
/// string's ends and collector-to-anchor ties. The budget is
/// `2k(14l-2) + k(k-1)/2 + k(k-1)(12l+1)`.
pub fn build_nokern4(
    s: &DfInstance,
    params: &GadgetParams,
    witness: Option<&[super::df::Factor]>,
) -> Result<Reduction, GadgetError> {
    let placement = witness.map(|w| witness_placement(s, w)).transpose()?;
    let mut b = B::new(4);
    let parts = add_r(&mut b, s, params)?;
    let rhat = add_rhat(&mut b, params)?;
    let anchor_l = b.vs(4, params.p);
    for &q in &anchor_l {
        b.e(q, parts.b1());
    }
    let anchor_r = b.vs(4, params.p);
    for &q in &anchor_r {
        b.e(q, parts.bn2());
    }
    for (_, _, v) in &rhat.pairs {
        b.e(*v, parts.b1());
        b.e(*v, parts.bn2());
    }
    let witness_drawing = placement.map(|placement| {
        let mut hats: BTreeMap<usize, &HatCopy> = BTreeMap::new();
        for (t, (start, end)) in placement.iter().enumerate() {
            hats.insert(*start, &rhat.pairs[t].0);
            hats.insert(*end, &rhat.pairs[t].1);
        }
        let [l1, l2, l3] = r_blocks(&parts, &hats);
        let mut order: Vec<(usize, usize)> = placement
            .iter()
            .enumerate()
            .map(|(t, (start, _))| (*start, t))
            .collect();
        order.sort_unstable();
        let mut l4: Vec<u32> = anchor_l.clone();
        l4.extend(order.iter().map(|&(_, t)| rhat.pairs[t].2));
        l4.extend(anchor_r.iter().copied());
        drawing(vec![l1, l2, l3, l4])
    });
    let mut pm = ports(&[("b_1", parts.b1()), ("b'_n", parts.bn2())]);
    for (i, (_, _, v)) in rhat.pairs.iter().enumerate() {
        pm.insert(format!("v{}", i + 1), VertexId(*v));
    }
    Ok(Reduction {
        instance: Instance::new(b.graph(), params.nokern4_budget()),
        ports: pm,
        witness_drawing,
    })
}

/// The 5-layer reduction: anchors gain layer-5 guards and one layer-5
/// vertex collects the symbol collectors, keeping the budget at
/// `2k(14l-2)`.
pub fn build_eth5(
    s: &DfInstance,
    params: &GadgetParams,
    witness: Option<&[super::df::Factor]>,
) -> Result<Reduction, GadgetError> {
    let placement = witness.map(|w| witness_placement(s, w)).transpose()?;
    let mut b = B::new(5);
    let parts = add_r(&mut b, s, params)?;
    let rhat = add_rhat(&mut b, params)?;
    let x = b.v(5);
    let x2 = b.v(5);
    let anchor_l = b.vs(4, params.p);
    for &q in &anchor_l {
        b.e(q, parts.b1());
        b.e(q, x);
    }
    let anchor_r = b.vs(4, params.p);
    for &q in &anchor_r {
        b.e(q, parts.bn2());
        b.e(q, x2);
    }
    let (y, y2) = (anchor_l[0], anchor_r[0]);
    let z = b.v(5);
    b.e(z, y);
    b.e(z, y2);
    for (_, _, v) in &rhat.pairs {
        b.e(z, *v);
    }
    let witness_drawing = placement.map(|placement| {
        let mut hats: BTreeMap<usize, &HatCopy> = BTreeMap::new();
        for (t, (start, end)) in placement.iter().enumerate() {
            hats.insert(*start, &rhat.pairs[t].0);
            hats.insert(*end, &rhat.pairs[t].1);
        }
        let [l1, l2, l3] = r_blocks(&parts, &hats);
        let mut order: Vec<(usize, usize)> = placement
            .iter()
            .enumerate()
            .map(|(t, (start, _))| (*start, t))
            .collect();
        order.sort_unstable();
        // The left anchor ends with its guard-tied member, the right one
        // starts with it.
        let mut l4: Vec<u32> = anchor_l[1..].to_vec();
        l4.push(y);
        l4.extend(order.iter().map(|&(_, t)| rhat.pairs[t].2));
        l4.push(y2);
        l4.extend(anchor_r[1..].iter().copied());
        let l5 = vec![x, z, x2];
        drawing(vec![l1, l2, l3, l4, l5])
    });
    let mut pm = ports(&[
        ("b_1", parts.b1()),
        ("b'_n", parts.bn2()),
        ("x", x),
        ("x'", x2),
        ("z", z),
        ("y", y),
        ("y'", y2),
    ]);
    for (i, (_, _, v)) in rhat.pairs.iter().enumerate() {
        pm.insert(format!("v{}", i + 1), VertexId(*v));
    }
    Ok(Reduction {
        instance: Instance::new(b.graph(), params.eth5_budget()),
        ports: pm,
        witness_drawing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::count_crossings;

    fn params(k: u64, p: u64) -> GadgetParams {
        GadgetParams::new(k, Some(p)).unwrap()
    }

    #[test]
    fn basic_gadget_shapes_and_canonical_counts() {
        let prm = params(2, 5);
        for (kind, n_expected) in [
            (GadgetKind::Z, 13),
            (GadgetKind::U, 14),
            (GadgetKind::Zhat, 5 + 5 * 5),
            (GadgetKind::Uhat, 5 + 4 * 5),
            (GadgetKind::F, 2 + 5),
            (GadgetKind::C, 3 + 5),
        ] {
            let built = build_gadget(kind, &prm).unwrap();
            assert_eq!(built.graph.n(), n_expected, "{kind:?} vertex count");
            assert_eq!(
                count_crossings(&built.graph, &built.drawing).unwrap().total,
                0,
                "{kind:?} canonical drawing"
            );
        }
    }

    #[test]
    fn symbol_gadgets_draw_canonically() {
        for k in [2u64, 4] {
            let prm = params(k, 5);
            for i in 1..=k as usize {
                let s = build_s(i, &prm).unwrap();
                assert_eq!(count_crossings(&s.graph, &s.drawing).unwrap().total, 0);
                let sh = build_shat(i, &prm).unwrap();
                assert_eq!(count_crossings(&sh.graph, &sh.drawing).unwrap().total, 0);
            }
        }
    }

    #[test]
    fn restrictive_counts_match_formula() {
        for (k, want) in [(2u64, 26u64), (4, 40), (8, 54)] {
            let prm = params(k, 5);
            for i in 1..=k as usize {
                let (built, claimed) = restrictive_drawing(i, &prm).unwrap();
                assert_eq!(claimed, want);
                let got = count_crossings(&built.graph, &built.drawing).unwrap().total;
                assert_eq!(got, want, "k={k} i={i}");
            }
        }
    }

    #[test]
    fn r_draws_canonically_and_yes_drawing_counts() {
        let prm = params(2, 5);
        let s = DfInstance::parse("aabb", 2).unwrap();
        let r = build_r(&s, &prm).unwrap();
        assert_eq!(count_crossings(&r.graph, &r.drawing).unwrap().total, 0);
        let w = super::super::df::df_solve(&s).unwrap().unwrap();
        let yd = yes_drawing(&s, &prm, &w).unwrap();
        let got = count_crossings(&yd.graph, &yd.drawing).unwrap().total;
        assert_eq!(got, 104, "2k(14l-2) for k=2, l=2");
    }
}
