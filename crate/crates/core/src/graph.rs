//! Simple labeled graphs and the structural operations the graphic KL
//! recursion relies on: compositions (partitions into connected blocks),
//! induced unions, quotients, blocks and chromatic polynomials.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::poly::IntPoly;

/// Vertex sets are bitmasks; graphs are limited to 64 vertices.
pub type VertexMask = u64;

pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("{family} requires n >= {min}, got {n}")]
    FamilyIndex { family: Family, n: usize, min: usize },
    #[error("graph has {0} vertices; at most {MAX_VERTICES} are supported")]
    TooManyVertices(usize),
    #[error("edge ({0}, {1}) is a loop or out of range")]
    BadEdge(usize, usize),
    #[error("partition blocks must be nonempty, disjoint and cover all vertices")]
    NotAPartition,
    #[error("block {0:?} does not induce a connected subgraph")]
    DisconnectedBlock(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Path,
    Cycle,
    Fan,
    Wheel,
    SquareOfPath,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Path => "path",
            Family::Cycle => "cycle",
            Family::Fan => "fan",
            Family::Wheel => "wheel",
            Family::SquareOfPath => "square_of_path",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<VertexMask>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        Ok(SimpleGraph { n, adj: vec![0; n] })
    }

    /// Build from an edge list; duplicate edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(GraphError::BadEdge(u, v));
            }
            g.adj[u] |= 1 << v;
            g.adj[v] |= 1 << u;
        }
        Ok(g)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            let mut m = self.adj[u] & !((2u64 << u).wrapping_sub(1));
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                out.push((u, v));
                m &= m - 1;
            }
        }
        out
    }

    pub fn neighbors(&self, v: usize) -> VertexMask {
        self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn all_vertices(&self) -> VertexMask {
        full_mask(self.n)
    }

    /// Whether `set` induces a connected subgraph (the empty set does not).
    pub fn is_connected_set(&self, set: VertexMask) -> bool {
        if set == 0 {
            return false;
        }
        let start = set & set.wrapping_neg();
        self.reach(start, set) == set
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.is_connected_set(self.all_vertices())
    }

    /// Vertex sets of connected components, ordered by smallest vertex.
    pub fn components(&self) -> Vec<VertexMask> {
        let mut left = self.all_vertices();
        let mut out = Vec::new();
        while left != 0 {
            let start = left & left.wrapping_neg();
            let comp = self.reach(start, left);
            out.push(comp);
            left &= !comp;
        }
        out
    }

    fn reach(&self, start: VertexMask, within: VertexMask) -> VertexMask {
        let mut seen = start;
        let mut frontier = start;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = self.adj[v] & within & !seen;
            seen |= new;
            frontier |= new;
        }
        seen
    }

    /// Subgraph induced by `set`, relabeled to `0..|set|` in increasing order.
    pub fn induced_subgraph(&self, set: VertexMask) -> SimpleGraph {
        let verts = mask_to_vec(set);
        let mut index = [usize::MAX; MAX_VERTICES];
        for (i, &v) in verts.iter().enumerate() {
            index[v] = i;
        }
        let mut adj = vec![0; verts.len()];
        for (i, &v) in verts.iter().enumerate() {
            for w in mask_to_vec(self.adj[v] & set) {
                adj[i] |= 1 << index[w];
            }
        }
        SimpleGraph { n: verts.len(), adj }
    }

    /// Same vertex set with one edge removed.
    pub fn delete_edge(&self, u: usize, v: usize) -> SimpleGraph {
        let mut g = self.clone();
        g.adj[u] &= !(1 << v);
        g.adj[v] &= !(1 << u);
        g
    }

    /// Disjoint union; the vertices of `other` are shifted past ours.
    pub fn disjoint_union(&self, other: &SimpleGraph) -> Result<SimpleGraph, GraphError> {
        let n = self.n + other.n;
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut adj = self.adj.clone();
        adj.extend(other.adj.iter().map(|a| a << self.n));
        Ok(SimpleGraph { n, adj })
    }
}

pub(crate) fn full_mask(n: usize) -> VertexMask {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn mask_to_vec(mut m: VertexMask) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Named graph families. Fans and wheels use vertex 0 as the hub and
/// `1..=n` as the rim (in cyclic order for wheels); paths and cycles use
/// `0..n`. `S_n` is the square of the path `0-1-...-n` (n edges, n+1
/// vertices), the indexing under which `S_n` and `F_n` agree for n <= 4.
pub fn make_family(family: Family, n: usize) -> Result<SimpleGraph, GraphError> {
    let min = match family {
        Family::Cycle | Family::Wheel => 3,
        _ => 1,
    };
    if n < min {
        return Err(GraphError::FamilyIndex { family, n, min });
    }
    let mut edges = Vec::new();
    let n_vertices = match family {
        Family::Path => {
            edges.extend((1..n).map(|i| (i - 1, i)));
            n
        }
        Family::Cycle => {
            edges.extend((1..n).map(|i| (i - 1, i)));
            edges.push((0, n - 1));
            n
        }
        Family::Fan | Family::Wheel => {
            edges.extend((1..=n).map(|i| (0, i)));
            edges.extend((1..n).map(|i| (i, i + 1)));
            if family == Family::Wheel {
                edges.push((1, n));
            }
            n + 1
        }
        Family::SquareOfPath => {
            edges.extend((1..=n).map(|i| (i - 1, i)));
            edges.extend((2..=n).map(|i| (i - 2, i)));
            n + 1
        }
    };
    SimpleGraph::from_edges(n_vertices, &edges)
}

/// Chromatic polynomials of the named families in closed form: paths
/// `t(t-1)^(n-1)`, cycles `(t-1)^n + (-1)^n (t-1)`, fans and squares of
/// paths `t(t-1)(t-2)^(n-1)`, wheels `t((t-2)^n + (-1)^n (t-2))`.
pub fn chromatic_closed(family: Family, n: usize) -> Result<IntPoly, GraphError> {
    make_family(family, n)?;
    let t = IntPoly::t();
    let tm1 = IntPoly::from_i64s(&[-1, 1]);
    let tm2 = IntPoly::from_i64s(&[-2, 1]);
    let sign = BigInt::from(if n.is_multiple_of(2) { 1 } else { -1 });
    let e = n as u32;
    Ok(match family {
        Family::Path => &t * &tm1.pow(e - 1),
        Family::Cycle => &tm1.pow(e) + &tm1.scale(&sign),
        Family::Fan | Family::SquareOfPath => &(&t * &tm1) * &tm2.pow(e - 1),
        Family::Wheel => &t * &(&tm2.pow(e) + &tm2.scale(&sign)),
    })
}

/// `|V| - #components`
pub fn rank(g: &SimpleGraph) -> usize {
    g.n_vertices() - g.components().len()
}

/// A partition of the vertex set; a composition when every block is connected.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexPartition {
    blocks: Vec<VertexMask>,
}

impl VertexPartition {
    /// Blocks are normalized to increasing order of their smallest vertex.
    pub fn new(n: usize, blocks: Vec<VertexMask>) -> Result<Self, GraphError> {
        let mut seen = 0;
        for &b in &blocks {
            if b == 0 || b & seen != 0 {
                return Err(GraphError::NotAPartition);
            }
            seen |= b;
        }
        if seen != full_mask(n) {
            return Err(GraphError::NotAPartition);
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|b| b.trailing_zeros());
        Ok(VertexPartition { blocks })
    }

    pub fn from_vecs(n: usize, blocks: &[Vec<usize>]) -> Result<Self, GraphError> {
        let mut masks = Vec::with_capacity(blocks.len());
        for b in blocks {
            let mut m = 0;
            for &v in b {
                if v >= n || m >> v & 1 == 1 {
                    return Err(GraphError::NotAPartition);
                }
                m |= 1 << v;
            }
            masks.push(m);
        }
        Self::new(n, masks)
    }

    pub fn singletons(n: usize) -> Self {
        VertexPartition { blocks: (0..n).map(|v| 1 << v).collect() }
    }

    pub fn blocks(&self) -> &[VertexMask] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_vecs(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|&b| mask_to_vec(b)).collect()
    }

    fn check_composition(&self, g: &SimpleGraph) -> Result<(), GraphError> {
        if self.blocks.iter().fold(0, |a, b| a | b) != g.all_vertices() {
            return Err(GraphError::NotAPartition);
        }
        match self.blocks.iter().find(|&&b| !g.is_connected_set(b)) {
            Some(&b) => Err(GraphError::DisconnectedBlock(mask_to_vec(b))),
            None => Ok(()),
        }
    }
}

/// `G[C]`: keep exactly the edges with both ends in a common block.
pub fn induced_union(g: &SimpleGraph, c: &VertexPartition) -> Result<SimpleGraph, GraphError> {
    c.check_composition(g)?;
    let mut out = SimpleGraph::empty(g.n_vertices())?;
    for &b in c.blocks() {
        for v in mask_to_vec(b) {
            out.adj[v] = g.adj[v] & b;
        }
    }
    Ok(out)
}

/// `G/C`: one vertex per block (in block order), adjacent when some edge
/// crosses between the blocks.
pub fn contract(g: &SimpleGraph, c: &VertexPartition) -> Result<SimpleGraph, GraphError> {
    c.check_composition(g)?;
    let blocks = c.blocks();
    let mut out = SimpleGraph::empty(blocks.len())?;
    for (i, &bi) in blocks.iter().enumerate() {
        let reach = mask_to_vec(bi).into_iter().fold(0, |acc, v| acc | g.adj[v]);
        for (j, &bj) in blocks.iter().enumerate() {
            if i != j && reach & bj != 0 {
                out.adj[i] |= 1 << j;
            }
        }
    }
    Ok(out)
}

/// Calls `f` once with every connected vertex set that contains `anchor` and
/// lies inside `allowed`.
fn for_each_connected_set(
    g: &SimpleGraph,
    anchor: usize,
    allowed: VertexMask,
    f: &mut dyn FnMut(VertexMask),
) {
    fn grow(
        g: &SimpleGraph,
        allowed: VertexMask,
        current: VertexMask,
        mut ext: VertexMask,
        mut excluded: VertexMask,
        f: &mut dyn FnMut(VertexMask),
    ) {
        f(current);
        while ext != 0 {
            let bit = ext & ext.wrapping_neg();
            ext &= !bit;
            let v = bit.trailing_zeros() as usize;
            let new_ext = ext | (g.adj[v] & allowed & !current & !excluded & !bit);
            grow(g, allowed, current | bit, new_ext, excluded | bit, f);
            excluded |= bit;
        }
    }
    let start = 1u64 << anchor;
    grow(g, allowed, start, g.adj[anchor] & allowed & !start, start, f);
}

/// Visit every composition of `g` exactly once.
///
/// Each block is anchored at the smallest vertex not yet assigned and grown
/// only through connected supersets, so no disconnected or duplicate
/// partition is ever generated.
pub fn for_each_composition(g: &SimpleGraph, f: &mut dyn FnMut(&VertexPartition)) {
    fn place(
        g: &SimpleGraph,
        remaining: VertexMask,
        blocks: &mut Vec<VertexMask>,
        f: &mut dyn FnMut(&VertexPartition),
    ) {
        if remaining == 0 {
            f(&VertexPartition { blocks: blocks.clone() });
            return;
        }
        let anchor = remaining.trailing_zeros() as usize;
        let mut sets = Vec::new();
        for_each_connected_set(g, anchor, remaining, &mut |s| sets.push(s));
        for s in sets {
            blocks.push(s);
            place(g, remaining & !s, blocks, f);
            blocks.pop();
        }
    }
    let mut blocks = Vec::new();
    place(g, g.all_vertices(), &mut blocks, f);
}

/// All compositions of `g` as a stream.
pub fn compositions(g: &SimpleGraph) -> impl Iterator<Item = VertexPartition> {
    let mut out = Vec::new();
    for_each_composition(g, &mut |c| out.push(c.clone()));
    out.into_iter()
}

/// Maximal biconnected subgraphs, each relabeled to `0..k` in increasing
/// vertex order. Bridges form two-vertex blocks and isolated vertices form
/// one-vertex blocks.
pub fn biconnected_components(g: &SimpleGraph) -> Vec<SimpleGraph> {
    block_vertex_sets(g)
        .into_iter()
        .map(|(verts, edges)| {
            let idx: HashMap<usize, usize> = mask_to_vec(verts).into_iter().enumerate().map(|(i, v)| (v, i)).collect();
            let relabeled: Vec<_> = edges.iter().map(|&(u, v)| (idx[&u], idx[&v])).collect();
            SimpleGraph::from_edges(idx.len(), &relabeled).expect("block of a valid graph")
        })
        .collect()
}

/// Blocks as (vertex set, edge list) in original labels.
pub fn block_vertex_sets(g: &SimpleGraph) -> Vec<(VertexMask, Vec<(usize, usize)>)> {
    struct State<'a> {
        g: &'a SimpleGraph,
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<(usize, usize)>,
        out: Vec<(VertexMask, Vec<(usize, usize)>)>,
    }

    fn dfs(s: &mut State<'_>, u: usize, parent: Option<usize>) {
        s.time += 1;
        s.disc[u] = s.time;
        s.low[u] = s.time;
        for v in mask_to_vec(s.g.adj[u]) {
            if s.disc[v] == 0 {
                s.stack.push((u, v));
                dfs(s, v, Some(u));
                s.low[u] = s.low[u].min(s.low[v]);
                if s.low[v] >= s.disc[u] {
                    let mut edges = Vec::new();
                    let mut verts = 0;
                    while let Some(e) = s.stack.pop() {
                        verts |= (1u64 << e.0) | (1u64 << e.1);
                        edges.push((e.0.min(e.1), e.0.max(e.1)));
                        if e == (u, v) {
                            break;
                        }
                    }
                    edges.sort_unstable();
                    s.out.push((verts, edges));
                }
            } else if Some(v) != parent && s.disc[v] < s.disc[u] {
                s.stack.push((u, v));
                s.low[u] = s.low[u].min(s.disc[v]);
            }
        }
    }

    let n = g.n_vertices();
    let mut s = State { g, disc: vec![0; n], low: vec![0; n], time: 0, stack: Vec::new(), out: Vec::new() };
    for v in 0..n {
        if s.disc[v] == 0 {
            if g.adj[v] == 0 {
                s.disc[v] = usize::MAX;
                s.out.push((1 << v, Vec::new()));
            } else {
                dfs(&mut s, v, None);
            }
        }
    }
    s.out.sort_by_key(|(m, e)| (m.trailing_zeros(), e.clone()));
    s.out
}

/// Exact chromatic polynomial by deletion-contraction.
///
/// Intermediate graphs are memoized under a canonical labeling. The memo
/// table lives for one call, so concurrent calls share nothing.
pub fn chromatic_polynomial(g: &SimpleGraph) -> IntPoly {
    let mut memo = HashMap::new();
    chromatic_rec(g, &mut memo)
}

const CANON_MAX_VERTICES: usize = 10;
const CANON_MAX_LABELINGS: u64 = 50_000;

fn chromatic_rec(g: &SimpleGraph, memo: &mut HashMap<(usize, u64), IntPoly>) -> IntPoly {
    let n = g.n_vertices();
    let e = g.n_edges();
    let comps = g.components();
    if e + comps.len() == n {
        // forest
        return &IntPoly::monomial(BigInt::from(1), comps.len()) * &IntPoly::from_i64s(&[-1, 1]).pow(e as u32);
    }
    if comps.len() > 1 {
        // isolated vertices and tree components contribute t and t(t-1)^k factors
        return comps
            .iter()
            .map(|&c| chromatic_rec(&g.induced_subgraph(c), memo))
            .fold(IntPoly::one(), |a, b| &a * &b);
    }
    if e == n * (n - 1) / 2 {
        return (0..n as i64).fold(IntPoly::one(), |acc, i| &acc * &IntPoly::from_i64s(&[-i, 1]));
    }
    let key = canonical_key(g);
    if let Some(k) = key {
        if let Some(p) = memo.get(&k) {
            return p.clone();
        }
    }
    // branch on an edge at a vertex of minimum positive degree
    let u = (0..n).filter(|&v| g.degree(v) > 0).min_by_key(|&v| g.degree(v)).expect("graph has edges");
    let v = g.neighbors(u).trailing_zeros() as usize;
    let deleted = g.delete_edge(u, v);
    let contracted = contract_edge(g, u, v);
    let p = &chromatic_rec(&deleted, memo) - &chromatic_rec(&contracted, memo);
    if let Some(k) = key {
        memo.insert(k, p.clone());
    }
    p
}

/// Merge `v` into `u`, drop `v`, and relabel.
fn contract_edge(g: &SimpleGraph, u: usize, v: usize) -> SimpleGraph {
    let n = g.n_vertices();
    let relabel = |w: usize| if w > v { w - 1 } else { w };
    let mut edges = Vec::new();
    for (a, b) in g.edges() {
        let a2 = if a == v { u } else { a };
        let b2 = if b == v { u } else { b };
        if a2 != b2 {
            edges.push((relabel(a2), relabel(b2)));
        }
    }
    SimpleGraph::from_edges(n - 1, &edges).expect("contraction of a valid graph")
}

/// Canonical key: lexicographically smallest upper-triangle adjacency bit
/// string over all labelings that list vertices by increasing invariant
/// `(degree, sorted neighbour degrees)`. Only those labelings are searched,
/// so it is exhaustive within invariant classes. `None` when the graph is
/// too large for the search.
pub fn canonical_key(g: &SimpleGraph) -> Option<(usize, u64)> {
    let n = g.n_vertices();
    if n > CANON_MAX_VERTICES {
        return None;
    }
    let invariant = |v: usize| {
        let mut nd: Vec<usize> = mask_to_vec(g.neighbors(v)).into_iter().map(|w| g.degree(w)).collect();
        nd.sort_unstable();
        (g.degree(v), nd)
    };
    let mut verts: Vec<(usize, Vec<usize>, usize)> = (0..n).map(|v| {
        let (d, nd) = invariant(v);
        (d, nd, v)
    }).collect();
    verts.sort();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, item) in verts.iter().enumerate() {
        if i > 0 && (verts[i - 1].0, &verts[i - 1].1) == (item.0, &item.1) {
            classes.last_mut().expect("nonempty").push(item.2);
        } else {
            classes.push(vec![item.2]);
        }
    }
    let labelings = classes.iter().try_fold(1u64, |acc, c| {
        let f = (1..=c.len() as u64).product::<u64>();
        acc.checked_mul(f).filter(|&x| x <= CANON_MAX_LABELINGS)
    })?;
    let _ = labelings;

    let mut order = Vec::with_capacity(n);
    let mut best = u64::MAX;
    permute_classes(g, &classes, 0, &mut vec![false; n], &mut order, &mut best);
    Some((n, best))
}

fn permute_classes(
    g: &SimpleGraph,
    classes: &[Vec<usize>],
    class: usize,
    used: &mut Vec<bool>,
    order: &mut Vec<usize>,
    best: &mut u64,
) {
    if class == classes.len() {
        let bits = adjacency_bits(g, order);
        if bits < *best {
            *best = bits;
        }
        return;
    }
    let members = &classes[class];
    let placed_in_class = members.iter().filter(|&&v| used[v]).count();
    if placed_in_class == members.len() {
        permute_classes(g, classes, class + 1, used, order, best);
        return;
    }
    for &v in members {
        if !used[v] {
            used[v] = true;
            order.push(v);
            permute_classes(g, classes, class, used, order, best);
            order.pop();
            used[v] = false;
        }
    }
}

fn adjacency_bits(g: &SimpleGraph, order: &[usize]) -> u64 {
    let mut bits = 0u64;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            bits = bits << 1 | u64::from(g.has_edge(order[i], order[j]));
        }
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPoly;

    fn p(v: &[i64]) -> IntPoly {
        IntPoly::from_i64s(v)
    }

    #[test]
    fn family_shapes() {
        let f1 = make_family(Family::Fan, 1).unwrap();
        assert_eq!((f1.n_vertices(), f1.n_edges()), (2, 1));
        let w3 = make_family(Family::Wheel, 3).unwrap();
        assert_eq!((w3.n_vertices(), w3.n_edges()), (4, 6));
        assert_eq!(make_family(Family::SquareOfPath, 5).unwrap().n_edges(), 9);
        assert!(matches!(make_family(Family::Wheel, 2), Err(GraphError::FamilyIndex { .. })));
        assert!(matches!(make_family(Family::Cycle, 2), Err(GraphError::FamilyIndex { .. })));
        assert!(make_family(Family::Fan, 0).is_err());
    }

    #[test]
    fn square_of_path_matches_fan_up_to_four() {
        for n in 1..=4 {
            let s = make_family(Family::SquareOfPath, n).unwrap();
            let f = make_family(Family::Fan, n).unwrap();
            assert_eq!(canonical_key(&s), canonical_key(&f), "n = {n}");
        }
        let s5 = make_family(Family::SquareOfPath, 5).unwrap();
        let f5 = make_family(Family::Fan, 5).unwrap();
        assert_eq!((s5.n_edges(), rank(&s5)), (f5.n_edges(), rank(&f5)));
        assert_ne!(canonical_key(&s5), canonical_key(&f5));
    }

    #[test]
    fn ranks() {
        for n in 1..8 {
            assert_eq!(rank(&make_family(Family::Fan, n).unwrap()), n);
        }
        for n in 3..8 {
            assert_eq!(rank(&make_family(Family::Wheel, n).unwrap()), n);
        }
        assert_eq!(rank(&SimpleGraph::empty(5).unwrap()), 0);
    }

    #[test]
    fn path_compositions() {
        let g = make_family(Family::Path, 3).unwrap();
        let mut got: Vec<_> = compositions(&g).map(|c| c.block_vecs()).collect();
        got.sort();
        let mut expect = vec![
            vec![vec![0], vec![1], vec![2]],
            vec![vec![0, 1], vec![2]],
            vec![vec![0], vec![1, 2]],
            vec![vec![0, 1, 2]],
        ];
        expect.sort();
        assert_eq!(got, expect);
        assert_eq!(compositions(&SimpleGraph::empty(1).unwrap()).count(), 1);
    }

    /// Brute force over all set partitions, keeping those with connected blocks.
    fn brute_compositions(g: &SimpleGraph) -> usize {
        fn rec(g: &SimpleGraph, v: usize, blocks: &mut Vec<u64>) -> usize {
            if v == g.n_vertices() {
                return usize::from(blocks.iter().all(|&b| g.is_connected_set(b)));
            }
            let mut total = 0;
            for i in 0..blocks.len() {
                blocks[i] |= 1 << v;
                total += rec(g, v + 1, blocks);
                blocks[i] &= !(1 << v);
            }
            blocks.push(1 << v);
            total += rec(g, v + 1, blocks);
            blocks.pop();
            total
        }
        rec(g, 0, &mut Vec::new())
    }

    #[test]
    fn fan_three_has_thirteen_compositions() {
        let f3 = make_family(Family::Fan, 3).unwrap();
        assert_eq!(brute_compositions(&f3), 13);
        assert_eq!(compositions(&f3).count(), 13);
    }

    #[test]
    fn composition_counts_match_set_partition_brute_force() {
        for fam in [Family::Fan, Family::Wheel, Family::SquareOfPath, Family::Cycle] {
            for n in 3..7 {
                let g = make_family(fam, n).unwrap();
                let all: Vec<_> = compositions(&g).collect();
                assert_eq!(all.len(), brute_compositions(&g), "{fam} {n}");
                let uniq: std::collections::HashSet<_> = all.iter().cloned().collect();
                assert_eq!(uniq.len(), all.len());
                assert!(all.iter().all(|c| c.blocks().iter().all(|&b| g.is_connected_set(b))));
            }
        }
    }

    #[test]
    fn rank_additivity_over_compositions() {
        for (fam, lo) in [(Family::Fan, 1), (Family::Wheel, 3)] {
            for n in lo..=6 {
                let g = make_family(fam, n).unwrap();
                for c in compositions(&g) {
                    let gc = induced_union(&g, &c).unwrap();
                    let q = contract(&g, &c).unwrap();
                    assert_eq!(rank(&g), rank(&gc) + rank(&q));
                }
            }
        }
    }

    #[test]
    fn induced_union_and_contract_extremes() {
        let g = make_family(Family::Wheel, 5).unwrap();
        let singles = VertexPartition::singletons(g.n_vertices());
        assert_eq!(induced_union(&g, &singles).unwrap().n_edges(), 0);
        assert_eq!(contract(&g, &singles).unwrap(), g);
        let whole = VertexPartition::new(g.n_vertices(), vec![g.all_vertices()]).unwrap();
        assert_eq!(induced_union(&g, &whole).unwrap(), g);
        let q = contract(&g, &whole).unwrap();
        assert_eq!((q.n_vertices(), q.n_edges()), (1, 0));
    }

    #[test]
    fn disconnected_blocks_are_rejected() {
        let g = make_family(Family::Path, 3).unwrap();
        let c = VertexPartition::from_vecs(3, &[vec![0, 2], vec![1]]).unwrap();
        assert_eq!(induced_union(&g, &c), Err(GraphError::DisconnectedBlock(vec![0, 2])));
        assert!(contract(&g, &c).is_err());
        assert_eq!(VertexPartition::from_vecs(3, &[vec![0, 1]]), Err(GraphError::NotAPartition));
    }

    /// The 12-vertex example graph with its highlighted composition, vertex
    /// labels shifted down by one.
    #[test]
    fn twelve_vertex_fixture() {
        let thin = [(11, 8), (9, 8), (11, 10), (11, 3), (8, 1), (4, 5), (2, 4), (8, 2), (7, 8)];
        let bold = [(1, 3), (4, 3), (1, 4), (6, 10), (6, 7), (10, 7), (11, 12), (12, 9), (5, 2)];
        let shift = |es: &[(usize, usize)]| es.iter().map(|&(a, b)| (a - 1, b - 1)).collect::<Vec<_>>();
        let mut all = shift(&thin);
        all.extend(shift(&bold));
        let g = SimpleGraph::from_edges(12, &all).unwrap();
        let blocks = [vec![1, 3, 4], vec![2, 5], vec![6, 7, 10], vec![8], vec![9, 11, 12]];
        let c = VertexPartition::from_vecs(12, &blocks.map(|b| b.iter().map(|v| v - 1).collect::<Vec<_>>())).unwrap();
        let gc = induced_union(&g, &c).unwrap();
        let mut expect_bold = shift(&bold).into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect::<Vec<_>>();
        expect_bold.sort();
        assert_eq!(gc.edges(), expect_bold);
        // quotient: blocks in order {1,3,4},{2,5},{6,7,10},{8},{9,11,12}
        let q = contract(&g, &c).unwrap();
        let expect = SimpleGraph::from_edges(5, &[(3, 4), (3, 0), (0, 1), (3, 1), (2, 3), (0, 4), (2, 4)]).unwrap();
        assert_eq!(q, expect);
        assert_eq!(rank(&g), rank(&gc) + rank(&q));
    }

    #[test]
    fn fan_twelve_quotient_fixture() {
        let f12 = make_family(Family::Fan, 12).unwrap();
        let c = VertexPartition::from_vecs(
            13,
            &[vec![0, 1, 2, 7, 9, 10], vec![3, 4], vec![5], vec![6], vec![8], vec![11], vec![12]],
        )
        .unwrap();
        let q = contract(&f12, &c).unwrap();
        // hub joined to all six others, plus paths {3,4}-{5}-{6} and {11}-{12}
        let expect = SimpleGraph::from_edges(
            7,
            &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (1, 2), (2, 3), (5, 6)],
        )
        .unwrap();
        assert_eq!(q, expect);
        let gc = induced_union(&f12, &c).unwrap();
        // two triangles at the hub, the spoke 0-10, and the path 3-4
        assert_eq!(gc.n_edges(), 3 + 3 + 1 + 1);
    }

    fn falling(t: i64, n: usize) -> i64 {
        (0..n as i64).map(|i| t - i).product()
    }

    #[test]
    fn chromatic_closed_forms() {
        let t = IntPoly::t();
        let tm1 = p(&[-1, 1]);
        let tm2 = p(&[-2, 1]);
        for b in 1..8 {
            let g = make_family(Family::Path, b).unwrap();
            assert_eq!(chromatic_polynomial(&g), &t * &tm1.pow(b as u32 - 1));
        }
        for n in 1..9 {
            let g = make_family(Family::Fan, n).unwrap();
            assert_eq!(chromatic_polynomial(&g), &(&t * &tm1) * &tm2.pow(n as u32 - 1));
        }
        for n in 3..9u32 {
            let g = make_family(Family::Wheel, n as usize).unwrap();
            let sign = if (n - 1) % 2 == 0 { 1 } else { -1 };
            let expect = &t * &(&tm2.pow(n) - &tm2.scale(&BigInt::from(sign)));
            assert_eq!(chromatic_polynomial(&g), expect);
        }
        for family in [Family::Path, Family::Cycle, Family::Fan, Family::Wheel, Family::SquareOfPath] {
            for n in 3..9 {
                let g = make_family(family, n).unwrap();
                assert_eq!(chromatic_closed(family, n).unwrap(), chromatic_polynomial(&g), "{family} {n}");
            }
        }
        assert!(chromatic_closed(Family::Wheel, 2).is_err());
        let k4 = make_family(Family::Wheel, 3).unwrap();
        assert_eq!(chromatic_polynomial(&k4).eval_at(&crate::poly::rat(4, 1)), crate::poly::rat(falling(4, 4), 1));
    }

    fn brute_colorings(g: &SimpleGraph, q: usize) -> usize {
        let n = g.n_vertices();
        let mut colors = vec![0usize; n];
        let mut count = 0;
        loop {
            if g.edges().iter().all(|&(u, v)| colors[u] != colors[v]) {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return count;
                }
                colors[i] += 1;
                if colors[i] < q {
                    break;
                }
                colors[i] = 0;
                i += 1;
            }
        }
    }

    fn lcg_graph(seed: u64, n: usize, density: u64) -> SimpleGraph {
        let mut s = seed;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if (s >> 33) % 100 < density {
                    edges.push((u, v));
                }
            }
        }
        SimpleGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn chromatic_counts_proper_colorings() {
        for seed in 0..40 {
            let n = 2 + (seed as usize % 6);
            let g = lcg_graph(seed, n, 45);
            let chi = chromatic_polynomial(&g);
            for q in 1..=4 {
                let v = chi.eval_at(&crate::poly::rat(q as i64, 1));
                assert_eq!(v, crate::poly::rat(brute_colorings(&g, q) as i64, 1), "seed {seed} q {q}");
            }
        }
    }

    #[test]
    fn block_decompositions() {
        let tree = SimpleGraph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let blocks = biconnected_components(&tree);
        assert_eq!(blocks.len(), 4);
        assert!(blocks.iter().all(|b| b.n_edges() == 1 && b.n_vertices() == 2));
        let c = make_family(Family::Cycle, 6).unwrap();
        assert_eq!(biconnected_components(&c).len(), 1);
        let bowtie = SimpleGraph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let blocks = biconnected_components(&bowtie);
        assert_eq!(blocks.len(), 2);
        assert!(blocks.iter().all(|b| b.n_edges() == 3));
        let lone = SimpleGraph::empty(2).unwrap();
        assert_eq!(biconnected_components(&lone).len(), 2);
    }

    #[test]
    fn chromatic_is_multiplicative_over_blocks() {
        for seed in 100..160 {
            let n = 2 + (seed as usize % 7);
            let g = lcg_graph(seed, n, 35);
            let k = g.components().len();
            let blocks = biconnected_components(&g);
            let m = blocks.len();
            let prod = blocks.iter().map(chromatic_polynomial).fold(IntPoly::one(), |a, b| &a * &b);
            // chi_G * t^(m-k) = prod chi_{G_i}
            let lhs = chromatic_polynomial(&g).shift(m - k);
            assert_eq!(lhs, prod, "seed {seed}");
        }
    }

    #[test]
    fn canonical_key_is_label_invariant() {
        let g = make_family(Family::Fan, 5).unwrap();
        // reverse the rim labels
        let relabeled: Vec<_> = g.edges().iter().map(|&(a, b)| {
            let f = |v: usize| if v == 0 { 0 } else { 6 - v };
            (f(a), f(b))
        }).collect();
        let h = SimpleGraph::from_edges(6, &relabeled).unwrap();
        assert_eq!(canonical_key(&g), canonical_key(&h));
        assert_ne!(canonical_key(&g), canonical_key(&make_family(Family::Wheel, 5).unwrap()));
    }
}
