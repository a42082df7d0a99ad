//! Line graphs of bipartite graphs and the reduction of their independent
//! sets to weighted matchings, counted through permanents.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::engine::{Engine, Estimate};
use crate::error::{CountError, GraphClass};
use crate::graph::WeightedGraph;
use crate::permanent::PermanentInstance;
use crate::weight::Weight;

/// Edge-weighted bipartite graph with parts `0..n1` and `0..n2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedBipartiteGraph {
    n1: usize,
    n2: usize,
    edges: BTreeMap<(usize, usize), Weight>,
}

impl WeightedBipartiteGraph {
    pub fn new(n1: usize, n2: usize) -> Self {
        WeightedBipartiteGraph {
            n1,
            n2,
            edges: BTreeMap::new(),
        }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: Weight) -> Result<(), CountError> {
        self.check(u, v, &w)?;
        if self.edges.contains_key(&(u, v)) {
            return Err(CountError::Input(format!("duplicate edge ({u}, {v})")));
        }
        self.edges.insert((u, v), w);
        Ok(())
    }

    /// Adds `w` to the weight of `uv`, creating the edge if needed.
    pub fn add_parallel(&mut self, u: usize, v: usize, w: Weight) -> Result<(), CountError> {
        self.check(u, v, &w)?;
        *self.edges.entry((u, v)).or_insert_with(Weight::zero) += w;
        Ok(())
    }

    fn check(&self, u: usize, v: usize, w: &Weight) -> Result<(), CountError> {
        if u >= self.n1 || v >= self.n2 {
            return Err(CountError::Input(format!("edge ({u}, {v}) out of range")));
        }
        if w.is_zero() {
            return Err(CountError::Input(format!(
                "edge ({u}, {v}) has zero weight"
            )));
        }
        Ok(())
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<&Weight> {
        self.edges.get(&(u, v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Weight)> {
        self.edges.iter().map(|(&(u, v), w)| (u, v, w))
    }

    pub fn neighbors_left(&self, u: usize) -> impl Iterator<Item = (usize, &Weight)> {
        self.edges
            .range((u, 0)..(u + 1, 0))
            .map(|(&(_, v), w)| (v, w))
    }

    /// The line graph; vertex `i` is the `i`-th edge in `edges()` order.
    pub fn line_graph(&self) -> (WeightedGraph, Vec<(usize, usize)>) {
        let list: Vec<(usize, usize, Weight)> =
            self.edges().map(|(u, v, w)| (u, v, w.clone())).collect();
        let g = line_graph_multi(&list);
        (g, list.into_iter().map(|(u, v, _)| (u, v)).collect())
    }
}

/// Line graph of a bipartite multigraph given as `(left, right, weight)`
/// triples; repeated pairs are parallel edges.
pub fn line_graph_multi(edges: &[(usize, usize, Weight)]) -> WeightedGraph {
    let mut adj = Vec::new();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if edges[i].0 == edges[j].0 || edges[i].1 == edges[j].1 {
                adj.push((i, j));
            }
        }
    }
    let weights = edges.iter().map(|e| e.2.clone()).collect();
    WeightedGraph::new(weights, &adj).expect("line graph is simple")
}

/// Collapses each class of true twins (equal closed neighbourhoods) into
/// its smallest member, carrying the class's total weight. Adjacent twins
/// never share an independent set, so every `W_k` is preserved.
///
/// Returns the merged graph and, per merged vertex, the original members.
pub fn merge_parallel(g: &WeightedGraph) -> (WeightedGraph, Vec<Vec<usize>>) {
    let n = g.n();
    let mut by_closed: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let mut key: Vec<usize> = g.neighbors(v).to_vec();
        key.push(v);
        key.sort_unstable();
        let c = *by_closed.entry(key).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(v);
    }
    if classes.len() == n {
        return (g.clone(), classes);
    }
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let mut merged = g
        .induced_subgraph(&reps)
        .expect("representatives are vertices");
    // representatives are increasing, so class order matches local order
    for (i, class) in classes.iter().enumerate() {
        let w: Weight = class.iter().map(|&v| g.weight(v)).sum();
        merged.set_weight(i, w);
    }
    (merged, classes)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("not the line graph of a bipartite graph: {0}")]
pub struct NotLineGraphOfBipartite(pub String);

impl From<NotLineGraphOfBipartite> for CountError {
    fn from(e: NotLineGraphOfBipartite) -> Self {
        CountError::reject(GraphClass::ClawOddHoleFree, e.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootRecovery {
    pub root: WeightedBipartiteGraph,
    /// Root edge `(left, right)` for each vertex of the line graph.
    pub mapping: Vec<(usize, usize)>,
}

/// Recovers a simple bipartite `H` with `L(H) = g`.
///
/// Each edge `uv` of a diamond-free graph lies in exactly one maximal
/// clique, `{u, v}` plus the common neighbours. These cliques become root
/// vertices; a vertex of `g` in fewer than two of them gets fresh leaf
/// endpoints. The candidate root is then checked to be bipartite and its
/// line graph compared with `g` edge for edge. A triangle therefore comes
/// back as `K_{1,3}`.
pub fn recover_bipartite_root(g: &WeightedGraph) -> Result<RootRecovery, NotLineGraphOfBipartite> {
    let n = g.n();
    let fail = |msg: String| Err(NotLineGraphOfBipartite(msg));

    let mut clique_index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut member_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, v) in g.edges() {
        let mut c: Vec<usize> = vec![u, v];
        c.extend(
            g.neighbors(u)
                .iter()
                .copied()
                .filter(|&x| x != v && g.adjacent(x, v)),
        );
        c.sort_unstable();
        if !g.is_clique(&c) {
            return fail(format!("edge {}-{} lies in a diamond", g.id(u), g.id(v)));
        }
        let next = clique_index.len();
        let id = *clique_index.entry(c.clone()).or_insert(next);
        if id == next {
            for &x in &c {
                member_of[x].push(id);
            }
        }
    }

    let mut root_vertices = clique_index.len();
    let mut ends: Vec<(usize, usize)> = Vec::with_capacity(n);
    for (x, cs) in member_of.iter().enumerate() {
        match cs.len() {
            0 => {
                ends.push((root_vertices, root_vertices + 1));
                root_vertices += 2;
            }
            1 => {
                ends.push((cs[0], root_vertices));
                root_vertices += 1;
            }
            2 => ends.push((cs[0], cs[1])),
            k => return fail(format!("vertex {} lies in {k} maximal cliques", g.id(x))),
        }
    }

    // two-colour the root, components seeded at their smallest vertex
    let mut root_adj = vec![Vec::new(); root_vertices];
    for &(a, b) in &ends {
        root_adj[a].push(b);
        root_adj[b].push(a);
    }
    let mut side = vec![usize::MAX; root_vertices];
    let mut pos = vec![0usize; root_vertices];
    let mut counts = [0usize; 2];
    for s in 0..root_vertices {
        if side[s] != usize::MAX {
            continue;
        }
        side[s] = 0;
        let mut stack = vec![s];
        while let Some(a) = stack.pop() {
            for &b in &root_adj[a] {
                if side[b] == usize::MAX {
                    side[b] = 1 - side[a];
                    stack.push(b);
                } else if side[b] == side[a] {
                    return fail("root graph has an odd cycle".into());
                }
            }
        }
    }
    for s in 0..root_vertices {
        pos[s] = counts[side[s]];
        counts[side[s]] += 1;
    }

    let mut root = WeightedBipartiteGraph::new(counts[0], counts[1]);
    let mut mapping = Vec::with_capacity(n);
    for (x, &(a, b)) in ends.iter().enumerate() {
        let (l, r) = if side[a] == 0 { (a, b) } else { (b, a) };
        let (l, r) = (pos[l], pos[r]);
        if root.weight(l, r).is_some() {
            return fail(format!("vertex {} has a true twin", g.id(x)));
        }
        if g.weight(x).is_zero() {
            return fail(format!("vertex {} has zero weight", g.id(x)));
        }
        root.add_edge(l, r, g.weight(x).clone())
            .map_err(|e| NotLineGraphOfBipartite(e.to_string()))?;
        mapping.push((l, r));
    }

    for x in 0..n {
        for y in x + 1..n {
            let share = mapping[x].0 == mapping[y].0 || mapping[x].1 == mapping[y].1;
            if share != g.adjacent(x, y) {
                return fail(format!(
                    "vertices {} and {} disagree with the candidate root",
                    g.id(x),
                    g.id(y)
                ));
            }
        }
    }
    Ok(RootRecovery { root, mapping })
}

/// Square instance whose permanent is `(n1-k)! (n2-k)! M_k(b)`: `n2 - k`
/// extra rows complete to the right part and `n1 - k` extra columns
/// complete to the left part.
pub fn pad_for_k(b: &WeightedBipartiteGraph, k: usize) -> Result<PermanentInstance, CountError> {
    let (n1, n2) = (b.n1(), b.n2());
    if k > n1.min(n2) {
        return Err(CountError::Input(format!(
            "k = {k} exceeds min(n1, n2) = {}",
            n1.min(n2)
        )));
    }
    let dim = n1 + n2 - k;
    Ok(PermanentInstance::from_fn(dim, |i, j| {
        match (i < n1, j < n2) {
            (true, true) => b.weight(i, j).cloned().unwrap_or_else(Weight::zero),
            (false, false) => Weight::zero(),
            _ => Weight::one(),
        }
    }))
}

/// `n!` as a weight.
pub fn factorial(n: usize) -> Weight {
    (1..=n as u64).map(Weight::from_integer).product()
}

/// `M_0..M_kmax` of `b`, each from one padded permanent.
pub fn matching_weights(
    b: &WeightedBipartiteGraph,
    eps: f64,
    engine: &Engine,
) -> Result<Vec<Estimate>, CountError> {
    let (n1, n2) = (b.n1(), b.n2());
    let mut out = vec![Estimate::exact(Weight::one())];
    if b.m() == 0 {
        return Ok(out);
    }
    // M_k(c B) = c^k M_k(B): pull the largest weight out before padding
    let c = b
        .edges()
        .map(|(_, _, w)| w)
        .max()
        .cloned()
        .expect("nonempty");
    let mut scaled = WeightedBipartiteGraph::new(n1, n2);
    for (u, v, w) in b.edges() {
        scaled.add_edge(u, v, w / &c)?;
    }
    for k in 1..=n1.min(n2) {
        let a = pad_for_k(&scaled, k)?;
        let p = engine.permanent(&a, eps)?;
        let div = factorial(n1 - k) * factorial(n2 - k);
        out.push(Estimate {
            value: p.value * c.pow(k as u32) / div,
            ..p
        });
    }
    Ok(out)
}

/// `W_0..W_kmax` of a graph that is the line graph of a bipartite
/// multigraph, one permanent call per `k` at accuracy `eps / (n + 1)`.
pub fn line_graph_weight_vector(
    g: &WeightedGraph,
    eps: f64,
    engine: &Engine,
) -> Result<Vec<Estimate>, CountError> {
    let g = g.normalize();
    let (merged, _) = merge_parallel(&g);
    let rec = recover_bipartite_root(&merged)?;
    matching_weights(&rec.root, eps / (g.n() + 1) as f64, engine)
}

/// `W(g) = sum_k M_k(root)` with `M_0 = 1`.
pub fn line_graph_total_weight(
    g: &WeightedGraph,
    eps: f64,
    engine: &Engine,
) -> Result<Estimate, CountError> {
    let terms = line_graph_weight_vector(g, eps, engine)?;
    let total: Weight = terms.iter().map(|t| &t.value).sum();
    Ok(Estimate::combine(total, eps, &terms))
}
