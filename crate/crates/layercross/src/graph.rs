//! Layered-graph data model, validation, and crossing counting.
//!
//! A layered graph places every vertex on one of `h` horizontal layers and
//! only allows edges between consecutive layers. A drawing is one permutation
//! per layer; two edges of the same layer gap cross when their endpoint
//! orders invert. Parallel edges are stored once with a multiplicity, and a
//! crossing between edges of multiplicities `a` and `b` counts `a * b`.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// 1-based vertex identifier. Vertex ids of a graph are contiguous `1..=n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index of an edge in [`LayeredGraph::edges`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub mult: u64,
}

impl Edge {
    pub fn endpoints(&self) -> [VertexId; 2] {
        [self.u, self.v]
    }

    pub fn other(&self, w: VertexId) -> VertexId {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, w: VertexId) -> bool {
        self.u == w || self.v == w
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("layer count {0} outside supported range 2..=5")]
    BadLayerCount(u8),
    #[error("vertex {0} has layer {1} outside 1..={2}")]
    BadLayer(VertexId, u8, u8),
    #[error("layer {0} is empty")]
    EmptyLayer(u8),
    #[error("edge {0}-{1} is a self-loop")]
    SelfLoop(VertexId, VertexId),
    #[error("edge {0}-{1} joins non-consecutive layers {2} and {3}")]
    NonConsecutiveLayers(VertexId, VertexId, u8, u8),
    #[error("edge {0}-{1} listed twice; parallel edges must be merged into a multiplicity")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge {0}-{1} has zero multiplicity")]
    ZeroMultiplicity(VertexId, VertexId),
    #[error("edge references unknown vertex {0}")]
    UnknownVertex(VertexId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DrawingError {
    #[error("drawing has {0} layers, graph has {1}")]
    LayerCountMismatch(usize, u8),
    #[error("layer {0} order is not a permutation of that layer's vertex set")]
    NotAPermutation(u8),
    #[error("exception edge {0:?} is not a boundary edge of this call")]
    BadException(EdgeId),
}

/// An `h`-layer graph with vertex ids `1..=n` and edges only between
/// consecutive layers.
#[derive(Clone, PartialEq, Eq)]
pub struct LayeredGraph {
    h: u8,
    /// `layer_of[v]` for v in 1..=n; entry 0 is unused.
    layer_of: Vec<u8>,
    edges: Vec<Edge>,
    /// Vertices of each layer in ascending id order.
    layers: Vec<Vec<VertexId>>,
}

impl fmt::Debug for LayeredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LayeredGraph")
            .field("h", &self.h)
            .field("n", &self.n())
            .field("m", &self.edges.len())
            .finish()
    }
}

/// Checks every layered-graph invariant on raw parts. `layer_of[0]` is
/// ignored. Returns the first violation found.
pub fn validate(h: u8, layer_of: &[u8], edges: &[(u32, u32, u64)]) -> Result<(), GraphError> {
    validate_impl(h, layer_of, edges, false)
}

fn validate_impl(
    h: u8,
    layer_of: &[u8],
    edges: &[(u32, u32, u64)],
    allow_empty_layers: bool,
) -> Result<(), GraphError> {
    if !(2..=5).contains(&h) {
        return Err(GraphError::BadLayerCount(h));
    }
    let n = layer_of.len().saturating_sub(1) as u32;
    let mut seen_layer = vec![false; h as usize + 1];
    for v in 1..=n {
        let l = layer_of[v as usize];
        if l < 1 || l > h {
            return Err(GraphError::BadLayer(VertexId(v), l, h));
        }
        seen_layer[l as usize] = true;
    }
    if !allow_empty_layers {
        for l in 1..=h {
            if !seen_layer[l as usize] {
                return Err(GraphError::EmptyLayer(l));
            }
        }
    }
    let mut seen_pairs = HashSet::new();
    for &(u, v, mult) in edges {
        let (uu, vv) = (VertexId(u), VertexId(v));
        if u == 0 || u > n {
            return Err(GraphError::UnknownVertex(uu));
        }
        if v == 0 || v > n {
            return Err(GraphError::UnknownVertex(vv));
        }
        if u == v {
            return Err(GraphError::SelfLoop(uu, vv));
        }
        let (lu, lv) = (layer_of[u as usize], layer_of[v as usize]);
        if lu.abs_diff(lv) != 1 {
            return Err(GraphError::NonConsecutiveLayers(uu, vv, lu, lv));
        }
        if mult == 0 {
            return Err(GraphError::ZeroMultiplicity(uu, vv));
        }
        if !seen_pairs.insert((u.min(v), u.max(v))) {
            return Err(GraphError::DuplicateEdge(uu, vv));
        }
    }
    Ok(())
}

impl LayeredGraph {
    /// Builds a graph from parts, enforcing every invariant. Edges are stored
    /// with their lower-layer endpoint first.
    pub fn try_new(
        h: u8,
        layer_of: Vec<u8>,
        edges: Vec<(u32, u32, u64)>,
    ) -> Result<Self, GraphError> {
        Self::build(h, layer_of, edges, false)
    }

    /// Like [`try_new`](Self::try_new), but tolerates empty layers. Used for
    /// subgraphs and generator intermediates.
    pub(crate) fn try_new_relaxed(
        h: u8,
        layer_of: Vec<u8>,
        edges: Vec<(u32, u32, u64)>,
    ) -> Result<Self, GraphError> {
        Self::build(h, layer_of, edges, true)
    }

    fn build(
        h: u8,
        layer_of: Vec<u8>,
        edges: Vec<(u32, u32, u64)>,
        allow_empty_layers: bool,
    ) -> Result<Self, GraphError> {
        validate_impl(h, &layer_of, &edges, allow_empty_layers)?;
        let n = layer_of.len() - 1;
        let mut layers = vec![Vec::new(); h as usize + 1];
        for v in 1..=n {
            layers[layer_of[v] as usize].push(VertexId(v as u32));
        }
        let edges = edges
            .into_iter()
            .map(|(u, v, mult)| {
                let (u, v) = if layer_of[u as usize] <= layer_of[v as usize] {
                    (u, v)
                } else {
                    (v, u)
                };
                Edge {
                    u: VertexId(u),
                    v: VertexId(v),
                    mult,
                }
            })
            .collect();
        Ok(LayeredGraph {
            h,
            layer_of,
            edges,
            layers,
        })
    }

    pub fn h(&self) -> u8 {
        self.h
    }

    pub fn n(&self) -> usize {
        self.layer_of.len() - 1
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Sum of edge multiplicities.
    pub fn weighted_m(&self) -> u64 {
        self.edges.iter().map(|e| e.mult).sum()
    }

    pub fn layer_of(&self, v: VertexId) -> u8 {
        self.layer_of[v.index()]
    }

    /// Vertices of layer `l` (1-based) in ascending id order.
    pub fn layer(&self, l: u8) -> &[VertexId] {
        &self.layers[l as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (1..=self.n() as u32).map(VertexId)
    }

    /// Looks up an edge by endpoint pair, in either orientation.
    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.edges
            .iter()
            .position(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
            .map(EdgeId)
    }

    /// Adjacency lists (neighbors with edge ids), indexed by vertex id.
    pub fn adjacency(&self) -> Vec<Vec<(VertexId, EdgeId)>> {
        let mut adj = vec![Vec::new(); self.n() + 1];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u.index()].push((e.v, EdgeId(i)));
            adj[e.v.index()].push((e.u, EdgeId(i)));
        }
        adj
    }

    pub fn degree_table(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n() + 1];
        for e in &self.edges {
            deg[e.u.index()] += 1;
            deg[e.v.index()] += 1;
        }
        deg
    }

    /// Connected components as sorted vertex lists, ordered by smallest
    /// contained vertex id.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.n();
        let adj = self.adjacency();
        let mut comp = vec![usize::MAX; n + 1];
        let mut out: Vec<Vec<VertexId>> = Vec::new();
        for s in 1..=n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = vec![VertexId(s as u32)];
            while let Some(x) = stack.pop() {
                for &(w, _) in &adj[x] {
                    if comp[w.index()] == usize::MAX {
                        comp[w.index()] = id;
                        members.push(w);
                        stack.push(w.index());
                    }
                }
            }
            members.sort();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Induced subgraph on `keep` (sorted unique ids); keeps the layer count
    /// and layer indices, relabels vertices to `1..=|keep|`, and returns the
    /// old-to-new map. The subgraph may have empty layers.
    pub fn induced(&self, keep: &[VertexId]) -> (LayeredGraph, Vec<Option<VertexId>>) {
        let mut old_to_new: Vec<Option<VertexId>> = vec![None; self.n() + 1];
        for (i, v) in keep.iter().enumerate() {
            old_to_new[v.index()] = Some(VertexId(i as u32 + 1));
        }
        let mut layer_of = vec![0u8; keep.len() + 1];
        for v in keep {
            layer_of[old_to_new[v.index()].unwrap().index()] = self.layer_of(*v);
        }
        let mut edges = Vec::new();
        for e in &self.edges {
            if let (Some(nu), Some(nv)) = (old_to_new[e.u.index()], old_to_new[e.v.index()]) {
                edges.push((nu.0, nv.0, e.mult));
            }
        }
        let g = LayeredGraph::try_new_relaxed(self.h, layer_of, edges)
            .expect("induced subgraph of a valid graph is valid");
        (g, old_to_new)
    }
}

/// One permutation per layer; the object whose crossings get counted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Drawing {
    pub orders: Vec<Vec<VertexId>>,
}

impl Drawing {
    pub fn new(orders: Vec<Vec<VertexId>>) -> Self {
        Drawing { orders }
    }

    /// Natural drawing: every layer in ascending vertex-id order.
    pub fn natural(graph: &LayeredGraph) -> Self {
        Drawing {
            orders: (1..=graph.h()).map(|l| graph.layer(l).to_vec()).collect(),
        }
    }

    pub fn order(&self, layer: u8) -> &[VertexId] {
        &self.orders[layer as usize - 1]
    }

    pub fn validate_for(&self, graph: &LayeredGraph) -> Result<(), DrawingError> {
        if self.orders.len() != graph.h() as usize {
            return Err(DrawingError::LayerCountMismatch(
                self.orders.len(),
                graph.h(),
            ));
        }
        for l in 1..=graph.h() {
            let mut got: Vec<VertexId> = self.order(l).to_vec();
            got.sort();
            got.dedup();
            if got != graph.layer(l) {
                return Err(DrawingError::NotAPermutation(l));
            }
        }
        Ok(())
    }

    /// Position of every vertex within its layer order (0-based).
    pub fn positions(&self, graph: &LayeredGraph) -> Vec<u32> {
        let mut pos = vec![0u32; graph.n() + 1];
        for ord in &self.orders {
            for (i, v) in ord.iter().enumerate() {
                pos[v.index()] = i as u32;
            }
        }
        pos
    }

    pub fn reversed(&self) -> Self {
        Drawing {
            orders: self
                .orders
                .iter()
                .map(|o| o.iter().rev().copied().collect())
                .collect(),
        }
    }
}

/// A decision instance: graph plus crossing budget. `k_star` carries the
/// original parameter through recursions that shrink `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: LayeredGraph,
    pub k: u64,
    pub k_star: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("budget k={0} exceeds original parameter k*={1}")]
    BudgetAboveOriginal(u64, u64),
}

impl Instance {
    pub fn new(graph: LayeredGraph, k: u64) -> Self {
        Instance {
            graph,
            k,
            k_star: k,
        }
    }

    pub fn with_budget(&self, k: u64) -> Result<Self, InstanceError> {
        if k > self.k_star {
            return Err(InstanceError::BudgetAboveOriginal(k, self.k_star));
        }
        Ok(Instance {
            graph: self.graph.clone(),
            k,
            k_star: self.k_star,
        })
    }
}

/// Crossing totals per consecutive-layer gap, plus optional explicit pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingReport {
    pub total: u64,
    /// `per_gap[i]` counts crossings between layers `i+1` and `i+2`.
    pub per_gap: Vec<u64>,
    /// Crossing edge pairs; only materialized by the pairwise counter.
    pub pairs: Option<Vec<(EdgeId, EdgeId)>>,
}

/// Binary indexed tree over u64 sums.
struct Fenwick {
    data: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            data: vec![0; n + 1],
        }
    }

    fn add(&mut self, mut i: usize, v: u64) {
        i += 1;
        while i < self.data.len() {
            self.data[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over [0, i].
    fn prefix(&self, mut i: usize) -> u64 {
        let mut s = 0;
        i += 1;
        while i > 0 {
            s += self.data[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Counts weighted crossings for one layer gap by inversion counting.
/// `edges` are (lower pos, upper pos, mult, id) tuples.
fn count_gap(edges: &mut [(u32, u32, u64)], upper_size: usize) -> u64 {
    // Sort by lower-endpoint position; batch lower ties so edges sharing a
    // lower endpoint never count against each other.
    edges.sort_unstable();
    let mut fw = Fenwick::new(upper_size);
    let mut placed: u64 = 0;
    let mut total: u64 = 0;
    let mut i = 0;
    while i < edges.len() {
        let mut j = i;
        while j < edges.len() && edges[j].0 == edges[i].0 {
            j += 1;
        }
        for &(_, up, mult) in &edges[i..j] {
            // Earlier edges with strictly larger upper position cross this one.
            let up_to_here = fw.prefix(up as usize);
            total += mult * (placed - up_to_here);
        }
        for &(_, up, mult) in &edges[i..j] {
            fw.add(up as usize, mult);
            placed += mult;
        }
        i = j;
    }
    total
}

/// Weighted crossing count via per-gap inversion counting,
/// `O((m + n) log n)` per gap.
pub fn count_crossings(
    graph: &LayeredGraph,
    drawing: &Drawing,
) -> Result<CrossingReport, DrawingError> {
    drawing.validate_for(graph)?;
    let pos = drawing.positions(graph);
    let mut per_gap = vec![0u64; graph.h() as usize - 1];
    let mut buckets: Vec<Vec<(u32, u32, u64)>> = vec![Vec::new(); graph.h() as usize - 1];
    for e in graph.edges() {
        let gap = graph.layer_of(e.u) as usize - 1;
        buckets[gap].push((pos[e.u.index()], pos[e.v.index()], e.mult));
    }
    for (gap, bucket) in buckets.iter_mut().enumerate() {
        let upper_size = graph.layer(gap as u8 + 2).len();
        per_gap[gap] = count_gap(bucket, upper_size);
    }
    Ok(CrossingReport {
        total: per_gap.iter().sum(),
        per_gap,
        pairs: None,
    })
}

/// Whether edges `a` and `b` cross under `pos`; assumes the same layer gap.
#[inline]
pub fn edges_cross(a: &Edge, b: &Edge, pos: &[u32]) -> bool {
    let (a1, a2) = (pos[a.u.index()], pos[a.v.index()]);
    let (b1, b2) = (pos[b.u.index()], pos[b.v.index()]);
    (a1 < b1 && a2 > b2) || (a1 > b1 && a2 < b2)
}

/// Quadratic pairwise counter; materializes the crossing pair list. Slower
/// than [`count_crossings`] but the arithmetic is independent of it.
pub fn count_crossings_pairwise(
    graph: &LayeredGraph,
    drawing: &Drawing,
) -> Result<CrossingReport, DrawingError> {
    drawing.validate_for(graph)?;
    let pos = drawing.positions(graph);
    let mut per_gap = vec![0u64; graph.h() as usize - 1];
    let mut pairs = Vec::new();
    let m = graph.m();
    for i in 0..m {
        let a = graph.edge(EdgeId(i));
        for j in i + 1..m {
            let b = graph.edge(EdgeId(j));
            if graph.layer_of(a.u) != graph.layer_of(b.u) {
                continue;
            }
            if edges_cross(a, b, &pos) {
                per_gap[graph.layer_of(a.u) as usize - 1] += a.mult * b.mult;
                pairs.push((EdgeId(i), EdgeId(j)));
            }
        }
    }
    Ok(CrossingReport {
        total: per_gap.iter().sum(),
        per_gap,
        pairs: Some(pairs),
    })
}

/// Weighted counting with boundary exceptions: a crossing between two edges
/// of `weighted` that sit on opposite endpoints of the same edge in
/// `boundary` counts zero. Used by the extended-instance semantics where
/// those crossings were already charged when the instance was created.
pub fn count_crossings_weighted(
    graph: &LayeredGraph,
    drawing: &Drawing,
    boundary: &[EdgeId],
    weighted: &HashSet<EdgeId>,
) -> Result<CrossingReport, DrawingError> {
    let mut report = count_crossings(graph, drawing)?;
    for &b in boundary {
        if b.0 >= graph.m() {
            return Err(DrawingError::BadException(b));
        }
    }
    let pos = drawing.positions(graph);
    let mut excepted: HashSet<(EdgeId, EdgeId)> = HashSet::new();
    for &b in boundary {
        let be = graph.edge(b);
        for &i in weighted {
            if i == b || !graph.edge(i).touches(be.u) {
                continue;
            }
            for &j in weighted {
                if j == b || j == i || !graph.edge(j).touches(be.v) {
                    continue;
                }
                excepted.insert((i.min(j), i.max(j)));
            }
        }
    }
    for (i, j) in excepted {
        let (ei, ej) = (graph.edge(i), graph.edge(j));
        if graph.layer_of(ei.u) == graph.layer_of(ej.u) && edges_cross(ei, ej, &pos) {
            let gap = graph.layer_of(ei.u) as usize - 1;
            let w = ei.mult * ej.mult;
            report.per_gap[gap] -= w;
            report.total -= w;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_mn(m: u32, n: u32) -> LayeredGraph {
        let mut layer_of = vec![0u8];
        layer_of.extend(std::iter::repeat_n(1, m as usize));
        layer_of.extend(std::iter::repeat_n(2, n as usize));
        let mut edges = Vec::new();
        for u in 1..=m {
            for v in m + 1..=m + n {
                edges.push((u, v, 1));
            }
        }
        LayeredGraph::try_new(2, layer_of, edges).unwrap()
    }

    #[test]
    fn validate_accepts_alternating_path() {
        // P4 across two layers: 1-3, 3-2, 2-4.
        let g = LayeredGraph::try_new(
            2,
            vec![0, 1, 1, 2, 2],
            vec![(1, 3, 1), (3, 2, 1), (2, 4, 1)],
        );
        assert!(g.is_ok());
    }

    #[test]
    fn validate_rejects_same_layer_edge() {
        let err = validate(2, &[0, 1, 1, 2], &[(1, 2, 1)]).unwrap_err();
        assert!(matches!(err, GraphError::NonConsecutiveLayers(..)));
    }

    #[test]
    fn validate_rejects_layer_skipping_edge() {
        let err = validate(3, &[0, 1, 2, 3], &[(1, 3, 1)]).unwrap_err();
        assert!(matches!(err, GraphError::NonConsecutiveLayers(..)));
    }

    #[test]
    fn single_edge_never_crosses() {
        let g = LayeredGraph::try_new(2, vec![0, 1, 2], vec![(1, 2, 1)]).unwrap();
        let r = count_crossings(&g, &Drawing::natural(&g)).unwrap();
        assert_eq!(r.total, 0);
    }

    #[test]
    fn k22_natural_order_has_one_crossing() {
        let g = k_mn(2, 2);
        let r = count_crossings(&g, &Drawing::natural(&g)).unwrap();
        assert_eq!(r.total, 1);
        let rp = count_crossings_pairwise(&g, &Drawing::natural(&g)).unwrap();
        assert_eq!(rp.total, 1);
        assert_eq!(rp.pairs.unwrap().len(), 1);
    }

    #[test]
    fn multiplicities_multiply() {
        // Two multi-edges that cross: 2 * 3 = 6.
        let g = LayeredGraph::try_new(2, vec![0, 1, 1, 2, 2], vec![(1, 4, 2), (2, 3, 3)]).unwrap();
        let r = count_crossings(&g, &Drawing::natural(&g)).unwrap();
        assert_eq!(r.total, 6);
    }

    #[test]
    fn complete_bipartite_invariance() {
        // Every drawing of K_{m,n} has C(m,2) * C(n,2) crossings.
        for m in 1..=4u32 {
            for n in 1..=4u32 {
                let g = k_mn(m, n);
                let want = (m as u64 * (m as u64 - 1) / 2) * (n as u64 * (n as u64 - 1) / 2);
                let natural = Drawing::natural(&g);
                assert_eq!(count_crossings(&g, &natural).unwrap().total, want);
                let mut swapped = natural.clone();
                swapped.orders[0].reverse();
                assert_eq!(count_crossings(&g, &swapped).unwrap().total, want);
            }
        }
    }

    #[test]
    fn weighted_boundary_exception_zeroes_forced_pair() {
        // Layer 1: 1=lb1, 2. Layer 2: 3=lb2, 4. leftbound = (1,3).
        // Weighted edges (1,4) and (2,3) sit on opposite endpoints of the
        // boundary edge and always cross when 1 and 3 are leftmost.
        let g = LayeredGraph::try_new(
            2,
            vec![0, 1, 1, 2, 2],
            vec![(1, 3, 1), (1, 4, 2), (2, 3, 3)],
        )
        .unwrap();
        let d = Drawing::natural(&g);
        let plain = count_crossings(&g, &d).unwrap();
        assert_eq!(plain.total, 6);
        let weighted: HashSet<EdgeId> = [EdgeId(1), EdgeId(2)].into_iter().collect();
        let r = count_crossings_weighted(&g, &d, &[EdgeId(0)], &weighted).unwrap();
        assert_eq!(r.total, 0);
        // Without exceptions the plain rule applies.
        let r2 = count_crossings_weighted(&g, &d, &[], &weighted).unwrap();
        assert_eq!(r2.total, 6);
    }
}
