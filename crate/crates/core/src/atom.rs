//! Counting on atoms: direct enumeration when `alpha <= 3`, otherwise the
//! elementary-graph route through augment replacement and matchings.

use std::collections::{BTreeSet, HashMap};

use crate::engine::{Engine, Estimate};
use crate::error::{CountError, GraphClass};
use crate::graph::{WeightVector, WeightedGraph};
use crate::matching::line_graph_total_weight;
use crate::weight::Weight;

/// `W_0..W_3` when the graph has no independent set of size four.
pub fn small_alpha_weight(g: &WeightedGraph) -> Option<WeightVector> {
    let n = g.n();
    let mut w = vec![
        Weight::one(),
        Weight::zero(),
        Weight::zero(),
        Weight::zero(),
    ];
    for a in 0..n {
        let wa = g.weight(a);
        w[1] += wa;
        for b in a + 1..n {
            if g.adjacent(a, b) {
                continue;
            }
            let wab = wa * g.weight(b);
            for c in b + 1..n {
                if g.adjacent(a, c) || g.adjacent(b, c) {
                    continue;
                }
                w[3] += &wab * g.weight(c);
                if (c + 1..n).any(|d| !g.adjacent(a, d) && !g.adjacent(b, d) && !g.adjacent(c, d)) {
                    return None;
                }
            }
            w[2] += wab;
        }
    }
    Some(WeightVector::new(w))
}

/// Gallai graph: one vertex per edge of `g` (in `g.edges()` order), with
/// `xy ~ yz` exactly when `(x, y, z)` is an induced path.
pub fn gallai_graph(g: &WeightedGraph) -> (WeightedGraph, Vec<(usize, usize)>) {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let index: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let key = |a: usize, b: usize| index[&(a.min(b), a.max(b))];
    let mut adj = Vec::new();
    for y in 0..g.n() {
        let nb = g.neighbors(y);
        for (i, &x) in nb.iter().enumerate() {
            for &z in &nb[i + 1..] {
                if !g.adjacent(x, z) {
                    adj.push((key(x, y), key(y, z)));
                }
            }
        }
    }
    let gal = WeightedGraph::unit(edges.len(), &adj).expect("each induced P3 is counted once");
    (gal, edges)
}

/// Edge 2-colouring in which the two edges of every induced `P3` differ.
/// Edges isolated in the Gallai graph are left uncoloured.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryColouring {
    edges: Vec<(usize, usize)>,
    colours: Vec<Option<u8>>,
}

impl ElementaryColouring {
    pub fn colour(&self, u: usize, v: usize) -> Option<u8> {
        let e = (u.min(v), u.max(v));
        let i = self.edges.binary_search(&e).ok()?;
        self.colours[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), Option<u8>)> + '_ {
        self.edges.iter().copied().zip(self.colours.iter().copied())
    }
}

/// The Gallai graph has an odd cycle through this edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotElementary {
    pub edge: (usize, usize),
}

pub fn elementary_colouring(g: &WeightedGraph) -> Result<ElementaryColouring, NotElementary> {
    let (gal, edges) = gallai_graph(g);
    let mut colours: Vec<Option<u8>> = vec![None; edges.len()];
    for s in 0..gal.n() {
        if colours[s].is_some() || gal.degree(s) == 0 {
            continue;
        }
        colours[s] = Some(1);
        let mut stack = vec![s];
        while let Some(a) = stack.pop() {
            let ca = colours[a].unwrap();
            for &b in gal.neighbors(a) {
                match colours[b] {
                    None => {
                        colours[b] = Some(3 - ca);
                        stack.push(b);
                    }
                    Some(cb) if cb == ca => return Err(NotElementary { edge: edges[b] }),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(ElementaryColouring { edges, colours })
}

/// Cobipartite piece `(X, Y, F)`: `X` and `Y` disjoint cliques, each a
/// module of the graph with the other removed, no outside vertex complete
/// to both, and `F` the nonempty set of `X`-`Y` edges. Local indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augment {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub f: Vec<(usize, usize)>,
}

impl Augment {
    /// Builds the augment for given sides, reading `F` off the graph.
    pub fn new(g: &WeightedGraph, mut x: Vec<usize>, mut y: Vec<usize>) -> Self {
        x.sort_unstable();
        y.sort_unstable();
        let f = x
            .iter()
            .flat_map(|&a| y.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| g.adjacent(a, b))
            .collect();
        Augment { x, y, f }
    }

    pub fn len(&self) -> usize {
        self.x.len() + self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self) -> Vec<usize> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.y);
        v.sort_unstable();
        v
    }

    /// Checks every defining property against `g`.
    pub fn validate(&self, g: &WeightedGraph) -> Result<(), String> {
        let n = g.n();
        let mut side = vec![0u8; n];
        for &v in &self.x {
            if v >= n {
                return Err(format!("vertex {v} out of range"));
            }
            side[v] = 1;
        }
        for &v in &self.y {
            if v >= n {
                return Err(format!("vertex {v} out of range"));
            }
            if side[v] != 0 {
                return Err(format!("vertex {v} is on both sides"));
            }
            side[v] = 2;
        }
        if self.x.is_empty() || self.y.is_empty() {
            return Err("empty side".into());
        }
        if !g.is_clique(&self.x) || !g.is_clique(&self.y) {
            return Err("a side is not a clique".into());
        }
        let f = Augment::new(g, self.x.clone(), self.y.clone()).f;
        if f.is_empty() {
            return Err("no edges between the sides".into());
        }
        if f != self.f {
            return Err("edge set F does not match the graph".into());
        }
        for z in (0..n).filter(|&z| side[z] == 0) {
            let to_x = self.x.iter().filter(|&&a| g.adjacent(z, a)).count();
            let to_y = self.y.iter().filter(|&&b| g.adjacent(z, b)).count();
            if to_x != 0 && to_x != self.x.len() {
                return Err(format!("vertex {} splits X", g.id(z)));
            }
            if to_y != 0 && to_y != self.y.len() {
                return Err(format!("vertex {} splits Y", g.id(z)));
            }
            if to_x != 0 && to_y != 0 {
                return Err(format!("vertex {} is complete to both sides", g.id(z)));
            }
        }
        Ok(())
    }
}

/// Refines `(N[p], N[q])` to the largest pair of sides that agree with
/// `p` (resp. `q`) outside the other side.
fn grow_augment(g: &WeightedGraph, p: usize, q: usize) -> Option<Augment> {
    let n = g.n();
    let closed = |v: usize| -> Vec<bool> {
        let mut m = vec![false; n];
        m[v] = true;
        for &u in g.neighbors(v) {
            m[u] = true;
        }
        m
    };
    let nb: Vec<Vec<bool>> = (0..n).map(closed).collect();
    let same_outside =
        |a: usize, b: usize, other: &[bool]| (0..n).all(|z| other[z] || nb[a][z] == nb[b][z]);
    let mut in_x = nb[p].clone();
    let mut in_y = nb[q].clone();
    loop {
        let nx: Vec<bool> = (0..n)
            .map(|v| in_x[v] && v != q && same_outside(v, p, &in_y))
            .collect();
        let ny: Vec<bool> = (0..n)
            .map(|v| in_y[v] && v != p && same_outside(v, q, &nx))
            .collect();
        // vertices claimed by both sides go to neither
        let both: Vec<bool> = (0..n).map(|v| nx[v] && ny[v]).collect();
        let nx: Vec<bool> = (0..n).map(|v| nx[v] && !both[v]).collect();
        let ny: Vec<bool> = (0..n).map(|v| ny[v] && !both[v]).collect();
        if nx == in_x && ny == in_y {
            break;
        }
        in_x = nx;
        in_y = ny;
    }
    if !in_x[p] || !in_y[q] {
        return None;
    }
    let x: Vec<usize> = (0..n).filter(|&v| in_x[v]).collect();
    let y: Vec<usize> = (0..n).filter(|&v| in_y[v]).collect();
    let z = Augment::new(g, x, y);
    z.validate(g).ok().map(|_| z)
}

/// A maximal family of pairwise disjoint augments with at least three
/// vertices, each oriented so that `|X| >= |Y|`, listed by smallest vertex.
///
/// Candidates come from every edge `pq` as a seed, refined by
/// [`grow_augment`]; larger candidates are preferred.
pub fn find_augments(g: &WeightedGraph) -> Vec<Augment> {
    let mut seen = BTreeSet::new();
    let mut candidates = Vec::new();
    for (a, b) in g.edges() {
        for (p, q) in [(a, b), (b, a)] {
            let Some(mut z) = grow_augment(g, p, q) else {
                continue;
            };
            if z.len() < 3 {
                continue;
            }
            if z.x.len() < z.y.len() {
                z = Augment::new(g, z.y, z.x);
            }
            if seen.insert((z.x.clone(), z.y.clone())) {
                candidates.push(z);
            }
        }
    }
    candidates.sort_by(|s, t| {
        t.len()
            .cmp(&s.len())
            .then_with(|| s.vertices().cmp(&t.vertices()))
    });
    let mut used = vec![false; g.n()];
    let mut chosen: Vec<Augment> = Vec::new();
    for z in candidates {
        if z.vertices().iter().any(|&v| used[v]) {
            continue;
        }
        for v in z.vertices() {
            used[v] = true;
        }
        chosen.push(z);
    }
    chosen.sort_by_key(|z| z.vertices()[0]);
    chosen
}

/// Weights of the four-vertex gadget replacing an augment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetParams {
    pub rho: Weight,
    pub rho_bar: Weight,
    pub sigma: Weight,
    pub sigma_bar: Weight,
}

/// `(W_1(X), W_1(Y), W_2(Z))` for an augment `Z`.
pub fn augment_sums(g: &WeightedGraph, z: &Augment) -> (Weight, Weight, Weight) {
    let w1x: Weight = z.x.iter().map(|&v| g.weight(v)).sum();
    let w1y: Weight = z.y.iter().map(|&v| g.weight(v)).sum();
    let mut w2 = Weight::zero();
    for &a in &z.x {
        for &b in &z.y {
            if !g.adjacent(a, b) {
                w2 += g.weight(a) * g.weight(b);
            }
        }
    }
    (w1x, w1y, w2)
}

/// Gadget weights with `sigma = 0`: `rho = W_2(Z) / W_1(Y)`,
/// `rho_bar = W_1(X) - rho`, `sigma_bar = W_1(Y)`.
pub fn gadget_params(g: &WeightedGraph, z: &Augment) -> GadgetParams {
    let (w1x, w1y, w2) = augment_sums(g, z);
    let rho = w2.checked_div(&w1y).expect("Y has positive weight");
    let rho_bar = w1x.checked_sub(&rho).expect("W_2(Z) <= W_1(X) W_1(Y)");
    GadgetParams {
        rho,
        rho_bar,
        sigma: Weight::zero(),
        sigma_bar: w1y,
    }
}

/// Replaces `Z` by the path `x1 - x2 - y2` with weights `rho`, `rho_bar`,
/// `sigma_bar`. `x1` and `x2` see the outside neighbours of `X`, `y2`
/// those of `Y`. Zero-weight gadget vertices are dropped. Every `W_k` is
/// preserved.
///
/// `x2` keeps the id of the smallest vertex of `X`, `y2` that of the
/// smallest vertex of `Y`, and `x1` the id of the second vertex of `X`
/// (or a fresh id when `|X| = 1`).
pub fn replace_augment(g: &WeightedGraph, z: &Augment) -> Result<WeightedGraph, CountError> {
    z.validate(g)
        .map_err(|e| CountError::Input(format!("invalid augment: {e}")))?;
    let params = gadget_params(g, z);
    let n = g.n();
    let mut in_z = vec![false; n];
    for v in z.vertices() {
        in_z[v] = true;
    }
    let keep: Vec<usize> = (0..n).filter(|&v| !in_z[v]).collect();
    let outside_x: Vec<usize> = keep
        .iter()
        .enumerate()
        .filter(|&(_, &v)| g.adjacent(v, z.x[0]))
        .map(|(i, _)| i)
        .collect();
    let outside_y: Vec<usize> = keep
        .iter()
        .enumerate()
        .filter(|&(_, &v)| g.adjacent(v, z.y[0]))
        .map(|(i, _)| i)
        .collect();

    let mut ids: Vec<usize> = keep.iter().map(|&v| g.id(v)).collect();
    let mut weights: Vec<Weight> = keep.iter().map(|&v| g.weight(v).clone()).collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    for (u, v) in g.edges() {
        if let (Some(&a), Some(&b)) = (pos.get(&u), pos.get(&v)) {
            edges.push((a, b));
        }
    }
    let fresh = g.ids().iter().max().map_or(0, |&m| m + 1);
    let mut attach =
        |id: usize, w: Weight, outside: &[usize], ids: &mut Vec<usize>| -> Option<usize> {
            if w.is_zero() {
                return None;
            }
            let i = ids.len();
            ids.push(id);
            weights.push(w);
            edges.extend(outside.iter().map(|&o| (o, i)));
            Some(i)
        };
    let x2 = attach(g.id(z.x[0]), params.rho_bar.clone(), &outside_x, &mut ids);
    let x1_id = z.x.get(1).map_or(fresh, |&v| g.id(v));
    let x1 = attach(x1_id, params.rho.clone(), &outside_x, &mut ids);
    let y2 = attach(g.id(z.y[0]), params.sigma_bar.clone(), &outside_y, &mut ids);
    if let (Some(a), Some(b)) = (x1, x2) {
        edges.push((a, b));
    }
    if let (Some(a), Some(b)) = (x2, y2) {
        edges.push((a, b));
    }
    Ok(WeightedGraph::with_ids(ids, weights, &edges)?)
}

/// Replaces every augment of `find_augments`, largest vertex indices
/// first so that earlier indices stay valid.
pub fn replace_all_augments(g: &WeightedGraph) -> Result<(WeightedGraph, usize), CountError> {
    let augments = find_augments(g);
    let count = augments.len();
    // apply in canonical order, remapping through stable ids
    let id_sets: Vec<(Vec<usize>, Vec<usize>)> = augments
        .iter()
        .map(|z| {
            (
                z.x.iter().map(|&v| g.id(v)).collect(),
                z.y.iter().map(|&v| g.id(v)).collect(),
            )
        })
        .collect();
    let mut cur = g.clone();
    for (xs, ys) in id_sets {
        let x = xs
            .iter()
            .map(|&id| cur.index_of(id).expect("untouched vertex"))
            .collect();
        let y = ys
            .iter()
            .map(|&id| cur.index_of(id).expect("untouched vertex"))
            .collect();
        let z = Augment::new(&cur, x, y);
        cur = replace_augment(&cur, &z)?;
    }
    Ok((cur, count))
}

/// `W(G)` for an atom of a (claw, odd hole)-free graph.
///
/// With no independent 4-set the answer is read off directly. Otherwise
/// the graph must be elementary: its augments are replaced by gadgets and
/// the result counted as a line graph of a bipartite graph. Failure of
/// either step is a rejection.
pub fn atom_weight(g: &WeightedGraph, eps: f64, engine: &Engine) -> Result<Estimate, CountError> {
    let g = g.normalize();
    if let Some(v) = small_alpha_weight(&g) {
        engine.record(|t| t.small_alpha_atoms += 1);
        return Ok(Estimate::exact(v.total()));
    }
    engine.record(|t| t.elementary_atoms += 1);
    if let Err(NotElementary { edge }) = elementary_colouring(&g) {
        return Err(CountError::reject(
            GraphClass::ClawOddHoleFree,
            format!(
                "atom with independence number > 3 is not elementary (odd Gallai cycle through edge {}-{})",
                g.id(edge.0),
                g.id(edge.1)
            ),
        ));
    }
    let (replaced, count) = replace_all_augments(&g)?;
    engine.record(|t| t.augments_replaced += count as u64);
    line_graph_total_weight(&replaced, eps, engine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::WeightedBipartiteGraph;
    use crate::oracle::{brute_weight_vector, PatternKind};

    fn complete(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        WeightedGraph::unit(n, &edges).unwrap()
    }

    fn lkk(a: usize, b: usize) -> WeightedGraph {
        let mut h = WeightedBipartiteGraph::new(a, b);
        for u in 0..a {
            for v in 0..b {
                h.add_edge(u, v, Weight::one()).unwrap();
            }
        }
        h.line_graph().0
    }

    #[test]
    fn small_alpha_examples() {
        let v = small_alpha_weight(&complete(4)).unwrap();
        assert_eq!(v.entries(), &[Weight::one(), Weight::from(4)]);
        assert!(small_alpha_weight(&lkk(4, 4)).is_none());
        let claw = PatternKind::Claw.graph().unwrap();
        assert_eq!(small_alpha_weight(&claw).unwrap().total(), Weight::from(9));
    }

    #[test]
    fn gallai_examples() {
        let (gal, _) = gallai_graph(&complete(3));
        assert_eq!((gal.n(), gal.m()), (3, 0));
        let p3 = WeightedGraph::unit(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(gallai_graph(&p3).0.m(), 1);
        let (gal, _) = gallai_graph(&PatternKind::Claw.graph().unwrap());
        assert_eq!((gal.n(), gal.m()), (3, 3));
    }

    #[test]
    fn colouring_examples() {
        assert!(elementary_colouring(&PatternKind::Claw.graph().unwrap()).is_err());
        let c = elementary_colouring(&complete(3)).unwrap();
        assert!(c.edges().all(|(_, col)| col.is_none()));
        let l = lkk(3, 3);
        let c = elementary_colouring(&l).unwrap();
        for y in 0..l.n() {
            for &x in l.neighbors(y) {
                for &z in l.neighbors(y) {
                    if x < z && !l.adjacent(x, z) {
                        assert_ne!(c.colour(x, y), c.colour(y, z));
                    }
                }
            }
        }
    }

    #[test]
    fn line_graph_without_twins_has_no_augments() {
        assert!(find_augments(&lkk(3, 3)).is_empty());
        assert!(find_augments(&lkk(3, 4)).is_empty());
    }

    /// Flat edge `x - y` with `x` on a triangle `a b x` and `y` on `y c d`,
    /// with a pendant on each of `a b c d`, then `x` blown up to `{x, x'}` and `y` to `{y, y'}` with `F` a
    /// perfect matching.
    fn pendant_augment() -> (WeightedGraph, Augment) {
        // 0 a, 1 b, 2 x, 3 x', 4 y, 5 y', 6 c, 7 d
        let edges = [
            (0, 1),
            (0, 2),
            (1, 2),
            (0, 3),
            (1, 3),
            (2, 3),
            (4, 5),
            (4, 6),
            (4, 7),
            (5, 6),
            (5, 7),
            (6, 7),
            (2, 4),
            (3, 5),
            (0, 8),
            (1, 9),
            (6, 10),
            (7, 11),
        ];
        let g = WeightedGraph::unit(12, &edges).unwrap();
        let z = Augment::new(&g, vec![2, 3], vec![4, 5]);
        (g, z)
    }

    #[test]
    fn finds_the_pendant_augment() {
        let (g, z) = pendant_augment();
        assert_eq!(z.validate(&g), Ok(()));
        assert_eq!(find_augments(&g), vec![z]);
    }

    #[test]
    fn gadget_preserves_weight_vector() {
        let (g, z) = pendant_augment();
        let h = replace_augment(&g, &z).unwrap();
        assert_eq!(h.n(), 11);
        assert_eq!(
            brute_weight_vector(&g).unwrap(),
            brute_weight_vector(&h).unwrap()
        );
    }

    #[test]
    fn degenerate_augment_is_a_relabelled_edge() {
        let (a, b) = (Weight::ratio(2, 3), Weight::ratio(5, 7));
        let g = WeightedGraph::new(vec![a.clone(), b.clone()], &[(0, 1)]).unwrap();
        let z = Augment::new(&g, vec![0], vec![1]);
        let p = gadget_params(&g, &z);
        assert!(p.rho.is_zero());
        let h = replace_augment(&g, &z).unwrap();
        assert_eq!(h.n(), 2);
        assert_eq!(h.weights(), &[a, b]);
        assert_eq!(h.m(), 1);
    }

    #[test]
    fn three_vertex_augment_params() {
        // X = {0, 1}, Y = {2}, F = {0-2}
        let g = WeightedGraph::unit(3, &[(0, 1), (0, 2)]).unwrap();
        let z = Augment::new(&g, vec![0, 1], vec![2]);
        let (w1x, w1y, w2) = augment_sums(&g, &z);
        assert_eq!(
            (w1x, w1y.clone(), w2.clone()),
            (Weight::from(2), Weight::one(), Weight::one())
        );
        let p = gadget_params(&g, &z);
        assert_eq!(p.rho, Weight::one());
        assert_eq!(p.rho_bar, Weight::one());
        assert_eq!(p.sigma_bar, Weight::one());
        assert_eq!(&p.rho * &p.sigma_bar + &p.rho_bar * &p.sigma, w2);
    }

    #[test]
    fn atom_examples() {
        let engine = Engine::exact();
        let claw = PatternKind::Claw.graph().unwrap();
        assert_eq!(
            atom_weight(&claw, 0.0, &engine).unwrap().value,
            Weight::from(9)
        );
        let l = lkk(4, 4);
        let w = atom_weight(&l, 0.0, &engine).unwrap();
        assert_eq!(w.value, brute_weight_vector(&l).unwrap().total());
        assert_eq!(engine.trace().elementary_atoms, 1);
    }
}
