//! Modular decomposition and counting by contraction of prime modules.

use serde::Serialize;

use crate::engine::Estimate;
use crate::error::CountError;
use crate::graph::{VertexId, WeightedGraph};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Leaf,
    Parallel,
    Series,
    Prime,
}

/// Node of the standard tree. Vertex sets are sorted local indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleNode {
    pub vertices: Vec<usize>,
    pub kind: NodeKind,
    pub children: Vec<ModuleNode>,
}

impl ModuleNode {
    fn visit<'a>(&'a self, out: &mut Vec<&'a ModuleNode>) {
        out.push(self);
        for c in &self.children {
            c.visit(out);
        }
    }

    /// Preorder listing of the subtree.
    pub fn nodes(&self) -> Vec<&ModuleNode> {
        let mut out = Vec::new();
        self.visit(&mut out);
        out
    }
}

/// Whether no vertex outside `set` distinguishes two of its members.
pub fn is_module(g: &WeightedGraph, set: &[usize]) -> bool {
    let Some(&first) = set.first() else {
        return true;
    };
    let mut inside = vec![false; g.n()];
    for &v in set {
        inside[v] = true;
    }
    (0..g.n()).filter(|&x| !inside[x]).all(|x| {
        set.iter()
            .all(|&v| g.adjacent(x, v) == g.adjacent(x, first))
    })
}

/// Smallest module of `g[within]` containing `u` and `v`.
fn module_closure(g: &WeightedGraph, within: &[usize], u: usize, v: usize) -> Vec<bool> {
    let n = g.n();
    let mut inside = vec![false; n];
    inside[u] = true;
    inside[v] = true;
    let mut members = vec![u, v];
    let mut grew = true;
    while grew {
        grew = false;
        for &x in within {
            if inside[x] {
                continue;
            }
            let a = g.adjacent(x, members[0]);
            if members.iter().any(|&m| g.adjacent(x, m) != a) {
                inside[x] = true;
                members.push(x);
                grew = true;
            }
        }
    }
    inside
}

fn components_within(g: &WeightedGraph, set: &[usize], complement: bool) -> Vec<Vec<usize>> {
    let mut seen = vec![true; g.n()];
    for &v in set {
        seen[v] = false;
    }
    let mut out = Vec::new();
    for &s in set {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut comp = Vec::new();
        while let Some(u) = stack.pop() {
            comp.push(u);
            for &v in set {
                if !seen[v] && g.adjacent(u, v) != complement {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out.sort();
    out
}

fn decompose(g: &WeightedGraph, set: Vec<usize>) -> ModuleNode {
    if set.len() == 1 {
        return ModuleNode {
            vertices: set,
            kind: NodeKind::Leaf,
            children: Vec::new(),
        };
    }
    let (kind, parts) = {
        let comps = components_within(g, &set, false);
        if comps.len() > 1 {
            (NodeKind::Parallel, comps)
        } else {
            let co = components_within(g, &set, true);
            if co.len() > 1 {
                (NodeKind::Series, co)
            } else {
                (NodeKind::Prime, maximal_proper_modules(g, &set))
            }
        }
    };
    ModuleNode {
        vertices: set,
        kind,
        children: parts.into_iter().map(|p| decompose(g, p)).collect(),
    }
}

/// Maximal strong modules of a set whose graph and complement are both
/// connected: `u` and `v` share one exactly when the smallest module
/// containing both is not the whole set.
fn maximal_proper_modules(g: &WeightedGraph, set: &[usize]) -> Vec<Vec<usize>> {
    let k = set.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let nx = p[x];
            p[x] = r;
            x = nx;
        }
        r
    }
    for i in 0..k {
        for j in i + 1..k {
            if find(&mut parent, i) == find(&mut parent, j) {
                continue;
            }
            let m = module_closure(g, set, set[i], set[j]);
            if set.iter().any(|&x| !m[x]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, &v) in set.iter().enumerate().take(k) {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// Standard modular decomposition tree of `g`; `None` for the empty graph.
/// Children are ordered by smallest vertex.
pub fn standard_tree(g: &WeightedGraph) -> Option<ModuleNode> {
    if g.is_empty() {
        return None;
    }
    Some(decompose(g, (0..g.n()).collect()))
}

/// All strong modules with at least two vertices, in preorder of the
/// standard tree (so the vertex set comes first).
pub fn strong_modules(g: &WeightedGraph) -> Vec<Vec<usize>> {
    standard_tree(g).map_or_else(Vec::new, |t| {
        t.nodes()
            .into_iter()
            .filter(|m| m.vertices.len() >= 2)
            .map(|m| m.vertices.clone())
            .collect()
    })
}

/// One contraction of the extended tree: the vertices `members` of
/// `G_{i-1}` (by id) induce the prime leaf `M̃_i` and are replaced by one
/// vertex with id `rep`, the smallest of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtendedStep {
    pub members: Vec<VertexId>,
    pub kind: NodeKind,
    pub rep: VertexId,
}

/// Postorder sequence of contractions reducing a graph to one vertex.
/// Series and parallel nodes with `k` children give `k - 1` steps of two
/// vertices each, so that every leaf is prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtendedTree {
    pub steps: Vec<ExtendedStep>,
}

impl ExtendedTree {
    pub fn h(&self) -> usize {
        self.steps.len()
    }

    /// `G_0, ..., G_h` and the leaves `M̃_1..M̃_h`, each contracted vertex
    /// getting weight `nonempty(M̃_i)`.
    pub fn replay<F>(
        &self,
        g: &WeightedGraph,
        mut nonempty: F,
    ) -> Result<(Vec<WeightedGraph>, Vec<WeightedGraph>), CountError>
    where
        F: FnMut(&WeightedGraph) -> Result<Weight, CountError>,
    {
        let mut graphs = vec![g.clone()];
        let mut leaves = Vec::with_capacity(self.h());
        for step in &self.steps {
            let cur = graphs.last().unwrap();
            let local: Vec<usize> = step
                .members
                .iter()
                .map(|&id| {
                    cur.index_of(id)
                        .ok_or_else(|| CountError::Input(format!("vertex {id} missing")))
                })
                .collect::<Result<_, _>>()?;
            let leaf = cur.induced_subgraph(&local)?;
            let w = nonempty(&leaf)?;
            let next = contract_module(cur, &local, step.rep, w)?;
            leaves.push(leaf);
            graphs.push(next);
        }
        Ok((graphs, leaves))
    }

    /// Leaf graphs with every contracted vertex given weight 1.
    pub fn leaves(&self, g: &WeightedGraph) -> Vec<WeightedGraph> {
        self.replay(g, |_| Ok(Weight::one()))
            .expect("steps come from this graph")
            .1
    }
}

fn min_id(g: &WeightedGraph, set: &[usize]) -> VertexId {
    set.iter().map(|&v| g.id(v)).min().expect("nonempty")
}

fn postorder(g: &WeightedGraph, node: &ModuleNode, steps: &mut Vec<ExtendedStep>) {
    if node.kind == NodeKind::Leaf {
        return;
    }
    let mut children: Vec<&ModuleNode> = node.children.iter().collect();
    children.sort_by_key(|c| min_id(g, &c.vertices));
    for c in &children {
        postorder(g, c, steps);
    }
    let reps: Vec<VertexId> = children.iter().map(|c| min_id(g, &c.vertices)).collect();
    match node.kind {
        NodeKind::Prime => steps.push(ExtendedStep {
            members: reps.clone(),
            kind: NodeKind::Prime,
            rep: reps[0],
        }),
        _ => {
            let mut acc = reps[0];
            for &r in &reps[1..] {
                steps.push(ExtendedStep {
                    members: vec![acc, r],
                    kind: node.kind,
                    rep: acc.min(r),
                });
                acc = acc.min(r);
            }
        }
    }
}

pub fn extended_tree(g: &WeightedGraph) -> ExtendedTree {
    let mut steps = Vec::new();
    if let Some(t) = standard_tree(g) {
        postorder(g, &t, &mut steps);
    }
    ExtendedTree { steps }
}

/// Replaces module `m` by one vertex of the given weight. The weight that
/// preserves `W` is the total over nonempty independent sets of `g[m]`.
pub fn contract_module(
    g: &WeightedGraph,
    m: &[usize],
    id: VertexId,
    nonempty_weight: Weight,
) -> Result<WeightedGraph, CountError> {
    if m.is_empty() {
        return Err(CountError::Input("empty module".into()));
    }
    Ok(g.contract(m, id, nonempty_weight)?)
}

/// `W(g)` by contracting prime leaves bottom-up, each counted with
/// `prime_counter` at `eps_leaf`.
pub(crate) fn contract_count<F>(
    g: &WeightedGraph,
    mut prime_counter: F,
    eps: f64,
    eps_leaf: f64,
) -> Result<Estimate, CountError>
where
    F: FnMut(&WeightedGraph, f64) -> Result<Estimate, CountError>,
{
    let g = g.normalize();
    match g.n() {
        0 => return Ok(Estimate::exact(Weight::one())),
        1 => return Ok(Estimate::exact(Weight::one() + g.weight(0))),
        _ => {}
    }
    let tree = extended_tree(&g);
    let mut parts = Vec::with_capacity(tree.h());
    let (graphs, _) = tree.replay(&g, |leaf| {
        let e = prime_counter(leaf, eps_leaf)?;
        let w = e
            .value
            .checked_sub(&Weight::one())
            .filter(|w| !w.is_zero())
            .ok_or_else(|| CountError::Input("leaf estimate fell below 1".into()))?;
        parts.push(e);
        Ok(w)
    })?;
    let last = graphs.last().unwrap();
    debug_assert_eq!(last.n(), 1);
    Ok(Estimate::combine(
        Weight::one() + last.weight(0),
        eps,
        &parts,
    ))
}

/// `W(g)` from the extended tree; every prime leaf is counted at
/// `eps / (2 n^2)` and the result is one plus the final vertex weight.
pub fn count_with_modules<F>(
    g: &WeightedGraph,
    prime_counter: F,
    eps: f64,
) -> Result<Estimate, CountError>
where
    F: FnMut(&WeightedGraph, f64) -> Result<Estimate, CountError>,
{
    let n = g.n().max(1) as f64;
    contract_count(g, prime_counter, eps, eps / (2.0 * n * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_weight_vector;

    fn p4() -> WeightedGraph {
        WeightedGraph::unit(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    fn exact(h: &WeightedGraph, _: f64) -> Result<Estimate, CountError> {
        Ok(Estimate::exact(brute_weight_vector(h)?.total()))
    }

    #[test]
    fn p4_is_prime() {
        let g = p4();
        assert_eq!(strong_modules(&g), vec![vec![0, 1, 2, 3]]);
        let t = extended_tree(&g);
        assert_eq!(t.h(), 1);
        assert_eq!(t.steps[0].kind, NodeKind::Prime);
    }

    #[test]
    fn triangle_has_only_the_whole_set() {
        let k3 = WeightedGraph::unit(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(strong_modules(&k3), vec![vec![0, 1, 2]]);
        assert_eq!(extended_tree(&k3).h(), 2);
    }

    #[test]
    fn twins_with_apex() {
        let g = WeightedGraph::unit(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(strong_modules(&g), vec![vec![0, 1, 2], vec![1, 2]]);
    }

    #[test]
    fn single_vertex_has_no_steps() {
        let g = WeightedGraph::unit(1, &[]).unwrap();
        assert_eq!(extended_tree(&g).h(), 0);
    }

    #[test]
    fn corrected_contraction_on_adjacent_twins() {
        // u:a, v:b adjacent, both adjacent to x:c
        let (a, b, c) = (Weight::ratio(1, 2), Weight::ratio(2, 3), Weight::from(3));
        let g =
            WeightedGraph::new(vec![a.clone(), b.clone(), c], &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let h = contract_module(&g, &[0, 1], 0, &a + &b).unwrap();
        assert_eq!(
            brute_weight_vector(&g).unwrap().total(),
            brute_weight_vector(&h).unwrap().total()
        );
        let wrong = contract_module(&g, &[0, 1], 0, Weight::one() + &a + &b).unwrap();
        assert_ne!(
            brute_weight_vector(&g).unwrap().total(),
            brute_weight_vector(&wrong).unwrap().total()
        );
    }

    #[test]
    fn corrected_contraction_on_false_twins() {
        let (a, b) = (Weight::ratio(1, 2), Weight::ratio(2, 3));
        let g = WeightedGraph::new(
            vec![a.clone(), b.clone(), Weight::from(5)],
            &[(0, 2), (1, 2)],
        )
        .unwrap();
        let h = contract_module(&g, &[0, 1], 0, &a + &b + &a * &b).unwrap();
        assert_eq!(
            brute_weight_vector(&g).unwrap().total(),
            brute_weight_vector(&h).unwrap().total()
        );
    }

    #[test]
    fn contraction_needs_a_module() {
        assert!(contract_module(&p4(), &[0, 1], 0, Weight::one()).is_err());
    }

    #[test]
    fn counting_on_nested_substitution() {
        // P4 with its ends blown up into a triangle and a co-edge
        let edges = [
            (0, 1),
            (0, 2),
            (1, 2),
            (0, 3),
            (1, 3),
            (2, 3),
            (3, 4),
            (4, 5),
            (4, 6),
        ];
        let g = WeightedGraph::new((1..=7).map(|i| Weight::ratio(i, 3)).collect(), &edges).unwrap();
        let mut calls = 0;
        let e = count_with_modules(
            &g,
            |h, eps| {
                calls += 1;
                exact(h, eps)
            },
            0.0,
        )
        .unwrap();
        assert_eq!(e.value, brute_weight_vector(&g).unwrap().total());
        assert!(calls >= 3);
    }

    #[test]
    fn each_step_conserves_weight() {
        let edges = [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (1, 5), (5, 6)];
        let g = WeightedGraph::new((1..=7).map(|i| Weight::ratio(i, 2)).collect(), &edges).unwrap();
        let t = extended_tree(&g);
        let (graphs, leaves) = t
            .replay(&g, |l| {
                Ok(brute_weight_vector(l)?
                    .total()
                    .checked_sub(&Weight::one())
                    .unwrap())
            })
            .unwrap();
        assert_eq!(leaves.len(), t.h());
        let w0 = brute_weight_vector(&g).unwrap().total();
        for gi in &graphs {
            assert_eq!(brute_weight_vector(gi).unwrap().total(), w0);
        }
        assert_eq!(graphs.last().unwrap().n(), 1);
    }
}
