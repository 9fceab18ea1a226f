//! Matroids as exact rank oracles over bitmask subsets of the ground set,
//! with flats, localization, simplified contraction and characteristic
//! polynomials.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng;
use thiserror::Error;

use crate::graph::{self, Family, SimpleGraph};
use crate::poly::IntPoly;

/// Subsets of the ground set `0..m`.
pub type ElementMask = u32;

pub const MAX_GROUND: usize = 32;
/// Ground sets up to this size get a precomputed rank table and flats by a
/// full subset sweep; larger ones use closure walks.
pub const SWEEP_LIMIT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error("ground set of {0} elements exceeds {MAX_GROUND}")]
    GroundTooLarge(usize),
    #[error("element {0} is a loop")]
    Loop(usize),
    #[error("{0:#b} is not a flat")]
    NotAFlat(ElementMask),
    #[error("whirl matroids need n >= 3, got {0}")]
    WhirlIndex(usize),
    #[error("rank axiom violated: {0}")]
    RankAxiom(String),
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
}

/// What a ground-set element stands for.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElementLabel {
    Edge(usize, usize),
    Index(usize),
}

impl fmt::Display for ElementLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementLabel::Edge(u, v) => write!(f, "({u},{v})"),
            ElementLabel::Index(i) => write!(f, "e{i}"),
        }
    }
}

type RankFn = Arc<dyn Fn(ElementMask) -> usize + Send + Sync>;

#[derive(Clone)]
pub struct RankOracleMatroid {
    labels: Vec<ElementLabel>,
    rank_fn: RankFn,
    table: Option<Arc<Vec<u8>>>,
    full_rank: usize,
}

impl fmt::Debug for RankOracleMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RankOracleMatroid")
            .field("ground", &self.labels.len())
            .field("rank", &self.full_rank)
            .finish()
    }
}

pub(crate) fn mask_bits(mut m: ElementMask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

fn full(m: usize) -> ElementMask {
    if m >= 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

impl RankOracleMatroid {
    /// Wrap a rank function. Loops are rejected.
    pub fn from_rank_fn(
        labels: Vec<ElementLabel>,
        rank_fn: impl Fn(ElementMask) -> usize + Send + Sync + 'static,
    ) -> Result<Self, MatroidError> {
        Self::build(labels, Arc::new(rank_fn))
    }

    fn build(labels: Vec<ElementLabel>, rank_fn: RankFn) -> Result<Self, MatroidError> {
        let m = labels.len();
        if m > MAX_GROUND {
            return Err(MatroidError::GroundTooLarge(m));
        }
        let table = (m <= SWEEP_LIMIT).then(|| {
            Arc::new((0..=full(m)).map(|x| rank_fn(x) as u8).collect::<Vec<u8>>())
        });
        let full_rank = match &table {
            Some(t) => t[full(m) as usize] as usize,
            None => rank_fn(full(m)),
        };
        let matroid = RankOracleMatroid { labels, rank_fn, table, full_rank };
        if let Some(e) = (0..m).find(|&e| matroid.rank(1 << e) == 0) {
            return Err(MatroidError::Loop(e));
        }
        Ok(matroid)
    }

    pub fn ground_size(&self) -> usize {
        self.labels.len()
    }

    pub fn ground(&self) -> ElementMask {
        full(self.labels.len())
    }

    pub fn labels(&self) -> &[ElementLabel] {
        &self.labels
    }

    pub fn rank(&self, x: ElementMask) -> usize {
        match &self.table {
            Some(t) => t[x as usize] as usize,
            None => (self.rank_fn)(x),
        }
    }

    /// Rank of the whole ground set.
    pub fn full_rank(&self) -> usize {
        self.full_rank
    }

    pub fn closure(&self, x: ElementMask) -> ElementMask {
        let r = self.rank(x);
        mask_bits(self.ground() & !x).fold(x, |acc, e| {
            if self.rank(x | 1 << e) == r {
                acc | 1 << e
            } else {
                acc
            }
        })
    }

    pub fn is_flat(&self, x: ElementMask) -> bool {
        if x & !self.ground() != 0 {
            return false;
        }
        let r = self.rank(x);
        mask_bits(self.ground() & !x).all(|e| self.rank(x | 1 << e) > r)
    }

    /// Every flat exactly once, sorted by rank and then by mask.
    pub fn flats(&self) -> Vec<Flat> {
        let mut out = if self.ground_size() <= SWEEP_LIMIT {
            self.flats_by_sweep()
        } else {
            self.flats_by_walk()
        };
        out.sort_by_key(|f| (f.rank, f.elements));
        out
    }

    fn flats_by_sweep(&self) -> Vec<Flat> {
        (0..=self.ground())
            .filter(|&x| self.is_flat(x))
            .map(|x| Flat { elements: x, rank: self.rank(x) })
            .collect()
    }

    /// Breadth-first walk from the bottom flat along covers `cl(F + e)`.
    pub(crate) fn flats_by_walk(&self) -> Vec<Flat> {
        let bottom = self.closure(0);
        let mut seen = HashSet::from([bottom]);
        let mut queue = VecDeque::from([bottom]);
        while let Some(f) = queue.pop_front() {
            for e in mask_bits(self.ground() & !f) {
                let g = self.closure(f | 1 << e);
                if seen.insert(g) {
                    queue.push_back(g);
                }
            }
        }
        seen.into_iter().map(|x| Flat { elements: x, rank: self.rank(x) }).collect()
    }

    pub fn lattice(&self) -> FlatLattice {
        FlatLattice::new(self.flats())
    }

    /// Exhaustive check of the local rank axioms when the ground set has at
    /// most `exhaustive_limit` elements, otherwise `samples` random
    /// `(X, e, f)` triples.
    pub fn check_rank_axioms(
        &self,
        exhaustive_limit: usize,
        samples: usize,
        rng: &mut impl Rng,
    ) -> Result<(), MatroidError> {
        let m = self.ground_size();
        if self.rank(0) != 0 {
            return Err(MatroidError::RankAxiom("r(empty) != 0".into()));
        }
        let check = |x: ElementMask, e: usize, f: usize| -> Result<(), MatroidError> {
            let r = self.rank(x);
            if r > x.count_ones() as usize {
                return Err(MatroidError::RankAxiom(format!("r({x:#b}) exceeds its size")));
            }
            let (re, rf, ref_) = (self.rank(x | 1 << e), self.rank(x | 1 << f), self.rank(x | 1 << e | 1 << f));
            if x >> e & 1 == 0 && !(re == r || re == r + 1) {
                return Err(MatroidError::RankAxiom(format!("adding {e} to {x:#b} is not a unit step")));
            }
            if re + rf < ref_ + r {
                return Err(MatroidError::RankAxiom(format!("submodularity fails at {x:#b}, {e}, {f}")));
            }
            Ok(())
        };
        if m == 0 {
            return Ok(());
        }
        if m <= exhaustive_limit {
            for x in 0..=self.ground() {
                for e in 0..m {
                    for f in e..m {
                        check(x, e, f)?;
                    }
                }
            }
        } else {
            for _ in 0..samples {
                let x = rng.random::<u32>() & self.ground();
                check(x, rng.random_range(0..m), rng.random_range(0..m))?;
            }
        }
        Ok(())
    }

    /// Direct sum; the elements of `other` follow ours.
    pub fn direct_sum(&self, other: &RankOracleMatroid) -> Result<RankOracleMatroid, MatroidError> {
        let shift = self.ground_size();
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let (a, b) = (self.clone(), other.clone());
        let low = self.ground();
        Self::build(labels, Arc::new(move |x| a.rank(x & low) + b.rank(x >> shift)))
    }
}

/// A closed set with its rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flat {
    pub elements: ElementMask,
    pub rank: usize,
}

impl Flat {
    pub fn len(&self) -> usize {
        self.elements.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.elements == 0
    }

    pub fn contains(&self, other: &Flat) -> bool {
        other.elements & !self.elements == 0
    }
}

/// Lattice of flats ordered by inclusion; flats are sorted by rank.
#[derive(Clone, Debug)]
pub struct FlatLattice {
    flats: Vec<Flat>,
    index: HashMap<ElementMask, usize>,
}

impl FlatLattice {
    pub fn new(mut flats: Vec<Flat>) -> Self {
        flats.sort_by_key(|f| (f.rank, f.elements));
        let index = flats.iter().enumerate().map(|(i, f)| (f.elements, i)).collect();
        FlatLattice { flats, index }
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn index_of(&self, elements: ElementMask) -> Option<usize> {
        self.index.get(&elements).copied()
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.flats.len() - 1
    }

    pub fn rank(&self) -> usize {
        self.flats.last().map_or(0, |f| f.rank)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.flats[j].contains(&self.flats[i])
    }

    /// Indices of flats containing flat `i`, in rank order (including `i`).
    pub fn up_set(&self, i: usize) -> Vec<usize> {
        (i..self.flats.len()).filter(|&j| self.leq(i, j)).collect()
    }

    /// `mu(i, j)` for every `j >= i`, as pairs in rank order.
    pub fn mobius_from(&self, i: usize) -> Vec<(usize, i64)> {
        let up = self.up_set(i);
        let mut mu: Vec<(usize, i64)> = Vec::with_capacity(up.len());
        for &j in &up {
            if j == i {
                mu.push((j, 1));
                continue;
            }
            let s: i64 = mu
                .iter()
                .filter(|&&(k, _)| self.flats[k].rank < self.flats[j].rank && self.leq(k, j))
                .map(|&(_, v)| v)
                .sum();
            mu.push((j, -s));
        }
        mu
    }

    /// Characteristic polynomial of the interval `[i, j]`:
    /// `sum over k in [i, j] of mu(i, k) t^(rk j - rk k)`.
    pub fn interval_characteristic(&self, mu_from_i: &[(usize, i64)], j: usize) -> IntPoly {
        let top = self.flats[j].rank;
        let mut coeffs = vec![0i64; top + 1];
        for &(k, m) in mu_from_i {
            if self.leq(k, j) {
                coeffs[top - self.flats[k].rank] += m;
            }
        }
        IntPoly::new(coeffs.into_iter().map(BigInt::from).collect())
    }
}

/// `chi_M(t) = sum over flats F of mu(bottom, F) t^(rk M - rk F)`.
pub fn characteristic_polynomial(m: &RankOracleMatroid) -> IntPoly {
    let lattice = m.lattice();
    let mu = lattice.mobius_from(lattice.bottom());
    lattice.interval_characteristic(&mu, lattice.top())
}

/// `(t-2)^n - (-1)^n`, the characteristic polynomial of the whirl `W^n`.
pub fn whirl_characteristic_closed(n: usize) -> IntPoly {
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    &IntPoly::from_i64s(&[-2, 1]).pow(n as u32) - &IntPoly::from_i64s(&[sign])
}

/// Graphic matroid on the edges of `g` (in `g.edges()` order); rank is
/// `|V| - #components` of the spanning subgraph, via union-find.
pub fn graphic_matroid(g: &SimpleGraph) -> Result<RankOracleMatroid, MatroidError> {
    let edges = g.edges();
    let labels = edges.iter().map(|&(u, v)| ElementLabel::Edge(u, v)).collect();
    let n = g.n_vertices();
    RankOracleMatroid::build(labels, Arc::new(move |x| forest_rank(n, &edges, x)))
}

pub(crate) fn forest_rank(n: usize, edges: &[(usize, usize)], x: ElementMask) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    let mut rank = 0;
    for e in mask_bits(x) {
        let (a, b) = (find(&mut parent, edges[e].0), find(&mut parent, edges[e].1));
        if a != b {
            parent[a] = b;
            rank += 1;
        }
    }
    rank
}

/// Mask of the rim (outer cycle) edges of the wheel `W_n` in the element
/// order used by [`graphic_matroid`] and [`whirl_matroid`].
pub fn wheel_rim_mask(n: usize) -> Result<ElementMask, MatroidError> {
    let g = graph::make_family(Family::Wheel, n)?;
    Ok(g.edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, _))| u != 0)
        .fold(0, |acc, (i, _)| acc | 1 << i))
}

/// The whirl `W^n`: the graphic matroid of `W_n` with the rim declared
/// independent. Its rank agrees with the wheel's on every set except the
/// rim itself, which has rank `n`.
pub fn whirl_matroid(n: usize) -> Result<RankOracleMatroid, MatroidError> {
    if n < 3 {
        return Err(MatroidError::WhirlIndex(n));
    }
    let g = graph::make_family(Family::Wheel, n)?;
    let edges = g.edges();
    let rim = wheel_rim_mask(n)?;
    let labels = edges.iter().map(|&(u, v)| ElementLabel::Edge(u, v)).collect();
    let nv = g.n_vertices();
    RankOracleMatroid::build(
        labels,
        Arc::new(move |x| if x == rim { n } else { forest_rank(nv, &edges, x) }),
    )
}

/// The two flat classes of the whirl `W^n` described in terms of the wheel:
/// `L1` holds the rim minus one edge, `L2` the whole ground set together with
/// every wheel flat that does not contain the rim.
pub fn whirl_flat_classes(n: usize) -> Result<(Vec<ElementMask>, Vec<ElementMask>), MatroidError> {
    if n < 3 {
        return Err(MatroidError::WhirlIndex(n));
    }
    let wheel = graphic_matroid(&graph::make_family(Family::Wheel, n)?)?;
    let rim = wheel_rim_mask(n)?;
    let l1 = mask_bits(rim).map(|e| rim & !(1 << e)).collect();
    let mut l2 = vec![wheel.ground()];
    l2.extend(wheel.flats().into_iter().map(|f| f.elements).filter(|&f| rim & !f != 0));
    Ok((l1, l2))
}

/// Restriction `M_F` to the flat `F`; elements keep their relative order.
pub fn localization(m: &RankOracleMatroid, f: &Flat) -> Result<RankOracleMatroid, MatroidError> {
    if !m.is_flat(f.elements) {
        return Err(MatroidError::NotAFlat(f.elements));
    }
    let members: Vec<usize> = mask_bits(f.elements).collect();
    let labels = members.iter().map(|&e| m.labels[e].clone()).collect();
    let parent = m.clone();
    RankOracleMatroid::build(labels, Arc::new(move |x| parent.rank(lift(&members, x))))
}

fn lift(members: &[usize], x: ElementMask) -> ElementMask {
    mask_bits(x).fold(0, |acc, i| acc | 1 << members[i])
}

/// Contraction `M^F` by the flat `F`, simplified: on `E \ F` the rank is
/// `X -> r(X + F) - r(F)`, and of each parallel class only the smallest
/// element is kept. Contraction by a flat creates no loops.
pub fn contraction(m: &RankOracleMatroid, f: &Flat) -> Result<RankOracleMatroid, MatroidError> {
    if !m.is_flat(f.elements) {
        return Err(MatroidError::NotAFlat(f.elements));
    }
    let base = f.elements;
    let base_rank = f.rank;
    let mut reps: Vec<usize> = Vec::new();
    for e in mask_bits(m.ground() & !base) {
        let parallel = reps.iter().any(|&r| m.rank(base | 1 << r | 1 << e) == base_rank + 1);
        if !parallel {
            reps.push(e);
        }
    }
    let labels = reps.iter().map(|&e| m.labels[e].clone()).collect();
    let parent = m.clone();
    RankOracleMatroid::build(labels, Arc::new(move |x| parent.rank(base | lift(&reps, x)) - base_rank))
}

/// Simplification: contraction by the bottom flat.
pub fn simplification(m: &RankOracleMatroid) -> Result<RankOracleMatroid, MatroidError> {
    let bottom = m.closure(0);
    contraction(m, &Flat { elements: bottom, rank: m.rank(bottom) })
}

/// Matroid of `g` restricted to the flat spanned by a composition's blocks.
pub fn composition_flat(g: &SimpleGraph, c: &graph::VertexPartition) -> Result<Flat, MatroidError> {
    let gc = graph::induced_union(g, c)?;
    let edges = g.edges();
    let elements = edges
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| gc.has_edge(u, v))
        .fold(0, |acc, (i, _)| acc | 1 << i);
    Ok(Flat { elements, rank: graph::rank(&gc) })
}
