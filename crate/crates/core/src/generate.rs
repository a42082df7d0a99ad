//! Seeded instance generators for both graph classes.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{VertexId, WeightedGraph};
use crate::matching::{line_graph_multi, WeightedBipartiteGraph};
use crate::oracle::{contains_pattern, PatternKind};
use crate::weight::Weight;

const MAX_TRIES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    LgBipartite,
    Augmented,
    Peculiar,
    CutsetGlued,
    ModuleSubst,
    ForkFreePrime,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::LgBipartite,
        Family::Augmented,
        Family::Peculiar,
        Family::CutsetGlued,
        Family::ModuleSubst,
        Family::ForkFreePrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::LgBipartite => "lg-bipartite",
            Family::Augmented => "augmented",
            Family::Peculiar => "peculiar",
            Family::CutsetGlued => "cutset-glued",
            Family::ModuleSubst => "module-subst",
            Family::ForkFreePrime => "fork-free-prime",
        }
    }

    /// Smallest and largest accepted `size`.
    pub fn size_bounds(self) -> (usize, usize) {
        match self {
            Family::LgBipartite => (1, 64),
            Family::Augmented => (4, 64),
            Family::Peculiar => (1, 8),
            Family::CutsetGlued => (6, 48),
            Family::ModuleSubst => (4, 32),
            Family::ForkFreePrime => (2, 24),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    Unit,
    Random,
}

impl FromStr for WeightMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unit" => Ok(WeightMode::Unit),
            "random" => Ok(WeightMode::Random),
            other => Err(format!("unknown weight mode {other:?}")),
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Unit => "unit",
            WeightMode::Random => "random",
        })
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("size {size} is outside {min}..={max} for {family}")]
    Size {
        family: Family,
        size: usize,
        min: usize,
        max: usize,
    },
    #[error("no instance found after {0} attempts")]
    Exhausted(usize),
}

/// A generated instance with the augments planted in it (as id sets).
#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: WeightedGraph,
    pub augments: Vec<(Vec<VertexId>, Vec<VertexId>)>,
}

/// `p/q` with `p` in `1..=7` and `q` in `1..=5`, or 1.
pub fn random_weight(rng: &mut impl Rng, mode: WeightMode) -> Weight {
    match mode {
        WeightMode::Unit => Weight::one(),
        WeightMode::Random => Weight::ratio(rng.gen_range(1..=7), rng.gen_range(1..=5)),
    }
}

pub fn reweight(g: &WeightedGraph, rng: &mut impl Rng, mode: WeightMode) -> WeightedGraph {
    let w = (0..g.n()).map(|_| random_weight(rng, mode)).collect();
    g.with_weights(w).expect("same length")
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Instance of `family` with parameter `size`: roughly the vertex count,
/// except for `peculiar` (largest part size) and `fork-free-prime` (`n` in
/// `K_{n,n}` minus a perfect matching).
pub fn generate(
    family: Family,
    size: usize,
    seed: u64,
    mode: WeightMode,
) -> Result<Generated, GenerateError> {
    let (min, max) = family.size_bounds();
    if size < min || size > max {
        return Err(GenerateError::Size {
            family,
            size,
            min,
            max,
        });
    }
    let mut rng = rng_for(seed);
    let plain = |graph| Generated {
        graph,
        augments: Vec::new(),
    };
    Ok(match family {
        Family::LgBipartite => plain(lg_bipartite(&mut rng, size, mode)),
        Family::Augmented => augmented(&mut rng, size, mode),
        Family::Peculiar => {
            let spec = PeculiarSpec::random(&mut rng, size);
            plain(peculiar(&spec, &mut rng, mode))
        }
        Family::CutsetGlued => plain(cutset_glued(&mut rng, size, mode, true)?),
        Family::ModuleSubst => plain(module_subst(&mut rng, size, mode)?),
        Family::ForkFreePrime => plain(reweight(&k_nn_minus_matching(size), &mut rng, mode)),
    })
}

/// Random bipartite graph with edge probability `p`.
pub fn random_bipartite(
    rng: &mut impl Rng,
    n1: usize,
    n2: usize,
    p: f64,
    mode: WeightMode,
) -> WeightedBipartiteGraph {
    let mut b = WeightedBipartiteGraph::new(n1, n2);
    for u in 0..n1 {
        for v in 0..n2 {
            if rng.gen_bool(p) {
                b.add_edge(u, v, random_weight(rng, mode))
                    .expect("fresh edge");
            }
        }
    }
    b
}

/// Root edges as `(left, right)` pairs, `m` of them, with occasional
/// parallel edges.
fn random_root(rng: &mut impl Rng, m: usize) -> Vec<(usize, usize)> {
    let n1 = (m / 2).max(2);
    let n2 = (m.div_ceil(2)).max(2);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(m);
    while edges.len() < m {
        let e = (rng.gen_range(0..n1), rng.gen_range(0..n2));
        if !edges.contains(&e) || rng.gen_bool(0.15) {
            edges.push(e);
        }
    }
    edges
}

/// Line graph of a random bipartite multigraph with `m` edges.
pub fn lg_bipartite(rng: &mut impl Rng, m: usize, mode: WeightMode) -> WeightedGraph {
    let list: Vec<(usize, usize, Weight)> = random_root(rng, m)
        .into_iter()
        .map(|(u, v)| (u, v, random_weight(rng, mode)))
        .collect();
    line_graph_multi(&list)
}

/// Adjacency-matrix builder used by the constructions below.
struct Builder {
    adj: Vec<Vec<bool>>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder {
            adj: vec![vec![false; n]; n],
        }
    }

    fn from_graph(g: &WeightedGraph) -> Self {
        let mut b = Builder::new(g.n());
        for (u, v) in g.edges() {
            b.set(u, v, true);
        }
        b
    }

    fn add_vertex(&mut self) -> usize {
        let n = self.adj.len();
        for row in &mut self.adj {
            row.push(false);
        }
        self.adj.push(vec![false; n + 1]);
        n
    }

    fn set(&mut self, u: usize, v: usize, on: bool) {
        if u != v {
            self.adj[u][v] = on;
            self.adj[v][u] = on;
        }
    }

    fn build(&self, rng: &mut impl Rng, mode: WeightMode) -> WeightedGraph {
        let n = self.adj.len();
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.adj[u][v])
            .collect();
        let w = (0..n).map(|_| random_weight(rng, mode)).collect();
        WeightedGraph::new(w, &edges).expect("simple by construction")
    }
}

/// Line graph of a bipartite multigraph with flat edges augmented.
///
/// Some root edges `ab` are subdivided twice into `a s1 s2 b`; in the line
/// graph `x = a s1` and `y = s1 s2` form a flat edge, which is replaced by
/// cliques `X` and `Y` of sizes 1 to 3 (not both 1) joined by a random
/// nonempty edge set.
pub fn augmented(rng: &mut impl Rng, size: usize, mode: WeightMode) -> Generated {
    let t = 1 + rng.gen_range(0..=size / 8);
    let mut plan: Vec<(usize, usize)> = Vec::new();
    let mut cost = 0;
    for _ in 0..t {
        let (sx, sy) = loop {
            let s = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            if s != (1, 1) {
                break s;
            }
        };
        if cost + sx + sy + 1 > size {
            break;
        }
        cost += sx + sy + 1;
        plan.push((sx, sy));
    }
    if plan.is_empty() {
        plan.push((2, 1));
        cost = 4;
    }
    let t = plan.len();
    let m0 = size.saturating_sub(cost);
    // left 0..t and right 0..t carry the subdivided edges a_j b_j
    let mut root: Vec<(usize, usize)> = random_root(rng, m0)
        .into_iter()
        .map(|(u, v)| (u + t, v + t))
        .collect();
    let n1 = root.iter().map(|e| e.0 + 1).max().unwrap_or(t).max(t);
    let n2 = root.iter().map(|e| e.1 + 1).max().unwrap_or(t).max(t);
    // tie a few extra edges to a_j and b_j so the pieces connect
    for j in 0..t {
        if n2 > t && rng.gen_bool(0.7) {
            root.push((j, rng.gen_range(t..n2)));
        }
        if n1 > t && rng.gen_bool(0.7) {
            root.push((rng.gen_range(t..n1), j));
        }
    }
    let mut xy = Vec::with_capacity(t);
    for j in 0..t {
        let (s1, s2) = (n2 + j, n1 + j);
        let x = root.len();
        root.push((j, s1));
        root.push((s2, s1));
        root.push((s2, j));
        xy.push((x, x + 1));
    }
    let list: Vec<(usize, usize, Weight)> =
        root.iter().map(|&(u, v)| (u, v, Weight::one())).collect();
    let base = line_graph_multi(&list);
    let mut b = Builder::from_graph(&base);
    let mut sides = Vec::with_capacity(t);
    for (&(x, y), &(sx, sy)) in xy.iter().zip(&plan) {
        let nx: Vec<usize> = (0..base.n())
            .filter(|&v| v != y && base.adjacent(x, v))
            .collect();
        let ny: Vec<usize> = (0..base.n())
            .filter(|&v| v != x && base.adjacent(y, v))
            .collect();
        let mut xs = vec![x];
        let mut ys = vec![y];
        for (side, count, outside) in [(&mut xs, sx, &nx), (&mut ys, sy, &ny)] {
            for _ in 1..count {
                let c = b.add_vertex();
                for &o in outside.iter() {
                    b.set(c, o, true);
                }
                for &s in side.iter() {
                    b.set(c, s, true);
                }
                side.push(c);
            }
        }
        let mut pairs: Vec<(usize, usize)> = xs
            .iter()
            .flat_map(|&a| ys.iter().map(move |&c| (a, c)))
            .collect();
        pairs.shuffle(rng);
        let keep = rng.gen_range(1..=pairs.len());
        for (i, &(a, c)) in pairs.iter().enumerate() {
            b.set(a, c, i < keep);
        }
        sides.push((xs, ys));
    }
    let graph = b.build(rng, mode);
    Generated {
        augments: sides
            .into_iter()
            .map(|(xs, ys)| {
                (
                    xs.iter().map(|&v| graph.id(v)).collect(),
                    ys.iter().map(|&v| graph.id(v)).collect(),
                )
            })
            .collect(),
        graph,
    }
}

/// Part sizes and removed edges of a peculiar graph. Removed edges are
/// index pairs into `(A_1, B_2)`, `(A_2, B_3)` and `(A_3, B_1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeculiarSpec {
    pub a: [usize; 3],
    pub b: [usize; 3],
    pub k: [usize; 3],
    pub removed: [Vec<(usize, usize)>; 3],
}

impl PeculiarSpec {
    /// All parts of size one; the 9-vertex graph.
    pub fn minimal() -> Self {
        PeculiarSpec {
            a: [1; 3],
            b: [1; 3],
            k: [1; 3],
            removed: [vec![(0, 0)], vec![(0, 0)], vec![(0, 0)]],
        }
    }

    pub fn random(rng: &mut impl Rng, max_part: usize) -> Self {
        let mut part = || rng.gen_range(1..=max_part);
        let a = [part(), part(), part()];
        let b = [part(), part(), part()];
        let k = [part(), part(), part()];
        let removed = std::array::from_fn(|i| {
            let (na, nb) = (a[i], b[(i + 1) % 3]);
            let mut all: Vec<(usize, usize)> =
                (0..na).flat_map(|x| (0..nb).map(move |y| (x, y))).collect();
            all.shuffle(rng);
            all.truncate(rng.gen_range(1..=all.len()));
            all.sort_unstable();
            all
        });
        PeculiarSpec { a, b, k, removed }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.a.iter().chain(&self.b).chain(&self.k).any(|&s| s == 0) {
            return Err("every part must be nonempty".into());
        }
        for i in 0..3 {
            if self.removed[i].is_empty() {
                return Err(format!(
                    "no edge removed between A{} and B{}",
                    i + 1,
                    (i + 1) % 3 + 1
                ));
            }
            let (na, nb) = (self.a[i], self.b[(i + 1) % 3]);
            if self.removed[i].iter().any(|&(x, y)| x >= na || y >= nb) {
                return Err("removed edge out of range".into());
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.a.iter().chain(&self.b).chain(&self.k).sum()
    }
}

/// Peculiar graph of `spec`. Vertices are numbered `A_1 A_2 A_3 B_1 B_2
/// B_3 K_1 K_2 K_3`, each part contiguous.
pub fn peculiar(spec: &PeculiarSpec, rng: &mut impl Rng, mode: WeightMode) -> WeightedGraph {
    spec.validate().expect("valid peculiar spec");
    let sizes = [spec.a, spec.b, spec.k].concat();
    let mut start = [0; 10];
    for i in 0..9 {
        start[i + 1] = start[i] + sizes[i];
    }
    let part = |p: usize| start[p]..start[p + 1];
    let mut b = Builder::new(spec.n());
    let core = 0..start[6];
    for u in core.clone() {
        for v in core.clone() {
            b.set(u, v, true);
        }
    }
    for (i, removed) in spec.removed.iter().enumerate() {
        let (pa, pb) = (i, 3 + (i + 1) % 3);
        for &(x, y) in removed {
            b.set(start[pa] + x, start[pb] + y, false);
        }
    }
    for i in 0..3 {
        let ki = part(6 + i);
        for u in ki.clone() {
            for v in ki.clone() {
                b.set(u, v, true);
            }
            for v in core.clone() {
                if !part(i).contains(&v) && !part(3 + i).contains(&v) {
                    b.set(u, v, true);
                }
            }
        }
    }
    b.build(rng, mode)
}

/// Vertices whose neighbourhood is a clique.
pub fn simplicial_vertices(g: &WeightedGraph) -> Vec<usize> {
    (0..g.n())
        .filter(|&v| g.is_clique(g.neighbors(v)))
        .collect()
}

/// Identifies `u` of `g` with `v` of `h`; the shared vertex keeps `u`'s
/// weight. Ids are renumbered.
pub fn glue_at_vertex(g: &WeightedGraph, u: usize, h: &WeightedGraph, v: usize) -> WeightedGraph {
    glue(g, &[u], h, &[v])
}

/// Identifies the clique `s` of `g` with the equally long clique `t` of `h`,
/// position by position.
pub fn glue(g: &WeightedGraph, s: &[usize], h: &WeightedGraph, t: &[usize]) -> WeightedGraph {
    assert_eq!(s.len(), t.len());
    let n = g.n();
    let mut map = vec![usize::MAX; h.n()];
    for (&a, &b) in s.iter().zip(t) {
        map[b] = a;
    }
    let mut next = n;
    for m in map.iter_mut() {
        if *m == usize::MAX {
            *m = next;
            next += 1;
        }
    }
    let mut weights = g.weights().to_vec();
    weights.resize(next, Weight::one());
    for b in 0..h.n() {
        if map[b] >= n {
            weights[map[b]] = h.weight(b).clone();
        }
    }
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    for (a, b) in h.edges() {
        let (x, y) = (map[a].min(map[b]), map[a].max(map[b]));
        if !(x < n && y < n && g.adjacent(x, y)) {
            edges.push((x, y));
        }
    }
    WeightedGraph::new(weights, &edges).expect("glued along a clique")
}

pub fn is_claw_odd_hole_free(g: &WeightedGraph) -> bool {
    contains_pattern(g, PatternKind::Claw).is_none()
        && contains_pattern(g, PatternKind::OddHole).is_none()
}

pub fn is_fork_odd_hole_free(g: &WeightedGraph) -> bool {
    contains_pattern(g, PatternKind::Fork).is_none()
        && contains_pattern(g, PatternKind::OddHole).is_none()
}

/// (claw, odd hole)-free pieces joined along clique cutsets: elementary
/// pieces share a simplicial vertex or an edge, peculiar pieces (when
/// `with_peculiar`) become separate components, since no peculiar vertex
/// can take an outside neighbour without creating a claw.
pub fn cutset_glued(
    rng: &mut impl Rng,
    size: usize,
    mode: WeightMode,
    with_peculiar: bool,
) -> Result<WeightedGraph, GenerateError> {
    for _ in 0..MAX_TRIES {
        let mut g = WeightedGraph::empty();
        let mut elementary: Option<WeightedGraph> = None;
        if with_peculiar && size >= 9 {
            let spec = PeculiarSpec::random(rng, 1 + (size - 9) / 9);
            g = peculiar(&spec, rng, mode);
        }
        while g.n() + elementary.as_ref().map_or(0, |e| e.n()) < size {
            let room = size - g.n() - elementary.as_ref().map_or(0, |e| e.n()) + 1;
            let piece = if room >= 5 && rng.gen_bool(0.5) {
                let k = rng.gen_range(4..=room.min(9));
                augmented(rng, k, mode).graph
            } else {
                let k = rng.gen_range(1..=room.min(7));
                lg_bipartite(rng, k, mode)
            };
            elementary = Some(match elementary {
                None => piece,
                Some(e) => join_pieces(rng, &e, &piece),
            });
        }
        if let Some(e) = elementary {
            g = g.disjoint_union(&e);
        }
        let g = g.relabeled();
        if g.n() <= size && is_claw_odd_hole_free(&g) {
            return Ok(g);
        }
    }
    Err(GenerateError::Exhausted(MAX_TRIES))
}

fn join_pieces(rng: &mut impl Rng, g: &WeightedGraph, h: &WeightedGraph) -> WeightedGraph {
    if rng.gen_bool(0.4) {
        let ge: Vec<(usize, usize)> = g.edges().collect();
        let he: Vec<(usize, usize)> = h.edges().collect();
        for _ in 0..20 {
            let (Some(&(a, b)), Some(&(c, d))) = (ge.choose(rng), he.choose(rng)) else {
                break;
            };
            let out = glue(g, &[a, b], h, &[c, d]);
            if contains_pattern(&out, PatternKind::Claw).is_none() {
                return out;
            }
        }
    }
    let (sg, sh) = (simplicial_vertices(g), simplicial_vertices(h));
    match (sg.choose(rng), sh.choose(rng)) {
        (Some(&u), Some(&v)) => glue_at_vertex(g, u, h, v),
        _ => g.disjoint_union(h),
    }
}

/// `K_{n,n}` minus a perfect matching; sides are `0..n` and `n..2n`.
pub fn k_nn_minus_matching(n: usize) -> WeightedGraph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, n + j)))
        .collect();
    WeightedGraph::unit(2 * n, &edges).expect("simple")
}

/// Replaces vertex `v` by the graph `h`, each vertex of `h` taking `v`'s
/// neighbours.
pub fn substitute(g: &WeightedGraph, v: usize, h: &WeightedGraph) -> WeightedGraph {
    let mut b = Builder::from_graph(g);
    let outside: Vec<usize> = g.neighbors(v).to_vec();
    let mut new = vec![v];
    for _ in 1..h.n() {
        new.push(b.add_vertex());
    }
    for (i, &x) in new.iter().enumerate() {
        for &o in &outside {
            b.set(x, o, true);
        }
        for (j, &y) in new.iter().enumerate() {
            if i < j {
                b.set(x, y, h.adjacent(i, j));
            }
        }
    }
    let n = b.adj.len();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |w| (u, w)))
        .filter(|&(u, w)| b.adj[u][w])
        .collect();
    WeightedGraph::unit(n, &edges).expect("simple")
}

fn small_module(rng: &mut impl Rng, k: usize) -> WeightedGraph {
    let all: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    match rng.gen_range(0..4) {
        0 => WeightedGraph::unit(k, &all).unwrap(),
        1 => WeightedGraph::unit(k, &[]).unwrap(),
        _ => {
            let e: Vec<_> = all.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
            WeightedGraph::unit(k, &e).unwrap()
        }
    }
}

/// (fork, odd hole)-free graphs built by nested module substitution into
/// a claw with its centre blown up to a clique, or into `K_{k,k}` minus a
/// perfect matching.
pub fn module_subst(
    rng: &mut impl Rng,
    size: usize,
    mode: WeightMode,
) -> Result<WeightedGraph, GenerateError> {
    for _ in 0..MAX_TRIES {
        let base = if size >= 6 && rng.gen_bool(0.5) {
            SubstBase::MatchingCore
        } else {
            SubstBase::ClawClique
        };
        if let Some(g) = substitution_attempt(rng, base, size, mode) {
            return Ok(g);
        }
    }
    Err(GenerateError::Exhausted(MAX_TRIES))
}

/// Starting graph for [`module_subst_from`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubstBase {
    /// A claw whose centre is a clique of 1 to 3 vertices.
    ClawClique,
    /// `K_{k,k}` minus a perfect matching, `k` in 3..=4.
    MatchingCore,
}

pub fn module_subst_from(
    rng: &mut impl Rng,
    base: SubstBase,
    size: usize,
    mode: WeightMode,
) -> Result<WeightedGraph, GenerateError> {
    for _ in 0..MAX_TRIES {
        if let Some(g) = substitution_attempt(rng, base, size, mode) {
            return Ok(g);
        }
    }
    Err(GenerateError::Exhausted(MAX_TRIES))
}

fn substitution_attempt(
    rng: &mut impl Rng,
    base: SubstBase,
    size: usize,
    mode: WeightMode,
) -> Option<WeightedGraph> {
    let mut g = match base {
        SubstBase::MatchingCore => k_nn_minus_matching(rng.gen_range(3..=(size / 2).clamp(3, 4))),
        SubstBase::ClawClique => {
            let claw = PatternKind::Claw.graph().expect("pattern");
            let c = rng.gen_range(1..=3);
            let all: Vec<(usize, usize)> = (0..c)
                .flat_map(|i| (i + 1..c).map(move |j| (i, j)))
                .collect();
            substitute(&claw, 0, &WeightedGraph::unit(c, &all).unwrap())
        }
    };
    let mut ok = true;
    while g.n() < size {
        let k = rng.gen_range(2..=(size - g.n() + 1).min(4));
        let v = rng.gen_range(0..g.n());
        let next = substitute(&g, v, &small_module(rng, k));
        if contains_pattern(&next, PatternKind::Fork).is_some() {
            ok = false;
            break;
        }
        g = next;
    }
    if ok && g.n() <= size && is_fork_odd_hole_free(&g) {
        return Some(reweight(&g, rng, mode));
    }
    None
}

/// Random prime fork-free graph on `n` vertices, grown one vertex at a
/// time with random neighbourhoods.
pub fn random_prime_fork_free(
    rng: &mut impl Rng,
    n: usize,
    mode: WeightMode,
) -> Result<WeightedGraph, GenerateError> {
    assert!(
        n >= 4,
        "prime graphs with more than two vertices have at least four"
    );
    for _ in 0..MAX_TRIES {
        let mut b = Builder::new(4);
        b.set(0, 1, true);
        b.set(1, 2, true);
        b.set(2, 3, true);
        let mut stuck = false;
        while b.adj.len() < n && !stuck {
            stuck = true;
            for _ in 0..50 {
                let m = b.adj.len();
                let p = rng.gen_range(0.2..0.8);
                let nb: Vec<usize> = (0..m).filter(|_| rng.gen_bool(p)).collect();
                if nb.is_empty() {
                    continue;
                }
                let v = b.add_vertex();
                for &u in &nb {
                    b.set(v, u, true);
                }
                let g = b.build(rng, WeightMode::Unit);
                if contains_pattern(&g, PatternKind::Fork).is_none() {
                    stuck = false;
                    break;
                }
                b.adj.pop();
                for row in &mut b.adj {
                    row.pop();
                }
            }
        }
        let g = b.build(rng, mode);
        if g.n() == n && crate::modular::strong_modules(&g).len() == 1 {
            return Ok(g);
        }
    }
    Err(GenerateError::Exhausted(MAX_TRIES))
}

/// An odd hole (length 5 or 7) sharing a vertex or an edge with `g`,
/// plus a few random chords to the rest. Returns `None` if the chords
/// destroyed every odd hole.
pub fn inject_odd_hole(
    g: &WeightedGraph,
    rng: &mut impl Rng,
    mode: WeightMode,
) -> Option<WeightedGraph> {
    let len = if rng.gen_bool(0.5) { 5 } else { 7 };
    let cycle: Vec<(usize, usize)> = (0..len).map(|i| (i, (i + 1) % len)).collect();
    let hole = reweight(&WeightedGraph::unit(len, &cycle).unwrap(), rng, mode);
    let mut out = if g.is_empty() {
        hole
    } else if g.m() > 0 && rng.gen_bool(0.5) {
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let &(a, b) = edges.choose(rng).unwrap();
        glue(g, &[a, b], &hole, &[0, 1])
    } else {
        glue_at_vertex(g, rng.gen_range(0..g.n()), &hole, 0)
    };
    let n = out.n();
    let mut b = Builder::from_graph(&out);
    for _ in 0..rng.gen_range(0..=2) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        b.set(u, v, true);
    }
    let weights = out.weights().to_vec();
    out = b
        .build(rng, WeightMode::Unit)
        .with_weights(weights)
        .unwrap();
    contains_pattern(&out, PatternKind::OddHole).map(|_| out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::Augment;
    use crate::oracle::find_clique_cutset;

    #[test]
    fn minimal_peculiar_graph() {
        let g = peculiar(&PeculiarSpec::minimal(), &mut rng_for(0), WeightMode::Unit);
        assert_eq!(g.n(), 9);
        assert!(is_claw_odd_hole_free(&g));
        assert_eq!(crate::fork::independence_number(&g), 3);
        assert!(find_clique_cutset(&g).is_none());
    }

    #[test]
    fn random_peculiar_graphs_have_alpha_three() {
        let mut rng = rng_for(7);
        for _ in 0..20 {
            let spec = PeculiarSpec::random(&mut rng, 2);
            let g = peculiar(&spec, &mut rng, WeightMode::Random);
            assert_eq!(crate::fork::independence_number(&g), 3);
            assert!(is_claw_odd_hole_free(&g));
        }
    }

    #[test]
    fn line_graphs_avoid_forbidden_patterns() {
        let mut rng = rng_for(3);
        let b = random_bipartite(&mut rng, 5, 4, 0.5, WeightMode::Random);
        let g = b.line_graph().0;
        for p in [
            PatternKind::Claw,
            PatternKind::Gem,
            PatternKind::Wheel4,
            PatternKind::OddHole,
        ] {
            assert!(contains_pattern(&g, p).is_none(), "{p:?}");
        }
    }

    #[test]
    fn augmented_instances_are_in_class() {
        for seed in 0..20 {
            let gen = generate(Family::Augmented, 14, seed, WeightMode::Random).unwrap();
            assert!(is_claw_odd_hole_free(&gen.graph), "seed {seed}");
            assert!(!gen.augments.is_empty());
            for (xs, ys) in &gen.augments {
                let x = xs.iter().map(|&i| gen.graph.index_of(i).unwrap()).collect();
                let y = ys.iter().map(|&i| gen.graph.index_of(i).unwrap()).collect();
                assert_eq!(Augment::new(&gen.graph, x, y).validate(&gen.graph), Ok(()));
            }
        }
    }

    #[test]
    fn fork_free_prime_is_k44_minus_matching() {
        let g = generate(Family::ForkFreePrime, 4, 1, WeightMode::Unit)
            .unwrap()
            .graph;
        assert_eq!((g.n(), g.m()), (8, 12));
        assert_eq!(crate::modular::strong_modules(&g).len(), 1);
        assert!(contains_pattern(&g, PatternKind::Fork).is_none());
    }

    #[test]
    fn generators_are_deterministic() {
        for f in Family::ALL {
            let size = f.size_bounds().0.max(6).min(f.size_bounds().1);
            let a = generate(f, size, 11, WeightMode::Random).unwrap().graph;
            let b = generate(f, size, 11, WeightMode::Random).unwrap().graph;
            assert_eq!(a, b, "{f}");
        }
    }

    #[test]
    fn glued_and_substituted_instances_are_in_class() {
        let mut rng = rng_for(5);
        for _ in 0..10 {
            assert!(is_claw_odd_hole_free(
                &cutset_glued(&mut rng, 16, WeightMode::Unit, true).unwrap()
            ));
            assert!(is_fork_odd_hole_free(
                &module_subst(&mut rng, 12, WeightMode::Unit).unwrap()
            ));
        }
    }

    #[test]
    fn random_prime_fork_free_is_prime() {
        let mut rng = rng_for(9);
        let g = random_prime_fork_free(&mut rng, 9, WeightMode::Random).unwrap();
        assert_eq!(g.n(), 9);
        assert_eq!(crate::modular::strong_modules(&g).len(), 1);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(generate(Family::Peculiar, 0, 0, WeightMode::Unit).is_err());
        assert!(generate(Family::ForkFreePrime, 100, 0, WeightMode::Unit).is_err());
    }
}
