//! Clique cutset decomposition and the counting recursion over it.

use crate::engine::{Engine, Estimate};
use crate::error::CountError;
use crate::graph::WeightedGraph;
use crate::weight::Weight;

/// Decomposition of a connected graph along clique cutsets.
///
/// Indices follow the bottom-up convention: `A_0` is what remains after
/// every cut, and `(A'_i, K_i)` for `i = h, h-1, ..., 1` are the pieces in
/// the order they were split off. `A_i = A'_i ∪ K_i` is an atom and `K_i`
/// separates `A'_i` from the rest of `G_i = A_0 ∪ A'_1 ∪ ... ∪ A'_i`.
/// All sets hold sorted local vertex indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutsetTree {
    base: Vec<usize>,
    parts: Vec<Vec<usize>>,
    cliques: Vec<Vec<usize>>,
}

impl CutsetTree {
    /// Number of cutsets.
    pub fn h(&self) -> usize {
        self.cliques.len()
    }

    /// `A_i`, for `0 <= i <= h`.
    pub fn atom(&self, i: usize) -> Vec<usize> {
        if i == 0 {
            return self.base.clone();
        }
        let mut a = self.parts[i - 1].clone();
        a.extend_from_slice(&self.cliques[i - 1]);
        a.sort_unstable();
        a
    }

    pub fn atoms(&self) -> Vec<Vec<usize>> {
        (0..=self.h()).map(|i| self.atom(i)).collect()
    }

    /// `A'_i = A_i \ K_i`, for `1 <= i <= h`.
    pub fn part(&self, i: usize) -> &[usize] {
        &self.parts[i - 1]
    }

    /// `K_i`, for `1 <= i <= h`.
    pub fn clique(&self, i: usize) -> &[usize] {
        &self.cliques[i - 1]
    }
}

/// Minimal elimination ordering by MCS-M, with the fill graph it induces.
///
/// Returns `(number, fill)` where `number[v]` is the elimination position
/// of `v` (0 is eliminated first) and `fill[v]` lists the neighbours of `v`
/// in the minimal triangulation.
pub fn mcs_m(g: &WeightedGraph) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = g.n();
    let mut label = vec![0usize; n];
    let mut number = vec![usize::MAX; n];
    let mut h: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    let mut reached = vec![false; n];
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for i in (0..n).rev() {
        let v = (0..n)
            .filter(|&u| number[u] == usize::MAX)
            .max_by_key(|&u| (label[u], std::cmp::Reverse(u)))
            .expect("an unnumbered vertex remains");
        number[v] = i;
        reached.fill(false);
        reached[v] = true;
        let mut s = Vec::new();
        for &y in g.neighbors(v) {
            if number[y] == usize::MAX {
                reached[y] = true;
                buckets[label[y]].push(y);
                s.push(y);
            }
        }
        for j in 0..=n {
            while let Some(y) = buckets[j].pop() {
                for &z in g.neighbors(y) {
                    if number[z] != usize::MAX || reached[z] {
                        continue;
                    }
                    reached[z] = true;
                    if label[z] > j {
                        buckets[label[z]].push(z);
                        s.push(z);
                    } else {
                        buckets[j].push(z);
                    }
                }
            }
        }
        for &u in &s {
            label[u] += 1;
            if !g.adjacent(u, v) {
                h[u].push(v);
                h[v].push(u);
            }
        }
    }
    (number, h)
}

/// Splits off clique-cutset pieces in elimination order: for each vertex
/// `x`, if its later neighbours `S` in the triangulation form a clique of
/// `G`, the component of `G' - S` holding `x` is cut away together with
/// `S` as an atom.
pub fn decompose_cutsets(g: &WeightedGraph) -> CutsetTree {
    let n = g.n();
    let (number, fill) = mcs_m(g);
    let mut order = vec![0usize; n];
    for v in 0..n {
        order[number[v]] = v;
    }
    let mut alive = vec![true; n];
    let mut alive_count = n;
    let mut parts = Vec::new();
    let mut cliques = Vec::new();
    for &x in &order {
        if !alive[x] {
            continue;
        }
        let mut s: Vec<usize> = fill[x]
            .iter()
            .copied()
            .filter(|&u| number[u] > number[x] && alive[u])
            .collect();
        s.sort_unstable();
        if !g.is_clique(&s) {
            continue;
        }
        let mut blocked = alive.clone();
        for &u in &s {
            blocked[u] = false;
        }
        let comp = component_within(g, x, &blocked);
        let mut sep: Vec<usize> = s
            .iter()
            .copied()
            .filter(|&u| {
                g.neighbors(u)
                    .iter()
                    .any(|&c| comp.binary_search(&c).is_ok())
            })
            .collect();
        sep.sort_unstable();
        if comp.len() + sep.len() < alive_count && has_other_full_component(g, &alive, &comp, &sep)
        {
            let s = sep;
            for &u in &comp {
                alive[u] = false;
            }
            alive_count -= comp.len();
            parts.push(comp);
            cliques.push(s);
        }
    }
    parts.reverse();
    cliques.reverse();
    CutsetTree {
        base: (0..n).filter(|&v| alive[v]).collect(),
        parts,
        cliques,
    }
}

/// Whether `G' - sep` has a component besides `comp` that sees all of
/// `sep`, making `sep` a minimal separator of `G'`.
fn has_other_full_component(
    g: &WeightedGraph,
    alive: &[bool],
    comp: &[usize],
    sep: &[usize],
) -> bool {
    let mut allowed = alive.to_vec();
    for &u in sep.iter().chain(comp) {
        allowed[u] = false;
    }
    let mut done = allowed.iter().map(|a| !a).collect::<Vec<_>>();
    for v in 0..g.n() {
        if done[v] {
            continue;
        }
        let other = component_within(g, v, &allowed);
        for &u in &other {
            done[u] = true;
        }
        let full = sep.iter().all(|&t| {
            g.neighbors(t)
                .iter()
                .any(|&c| other.binary_search(&c).is_ok())
        });
        if full {
            return true;
        }
    }
    false
}

fn component_within(g: &WeightedGraph, start: usize, allowed: &[bool]) -> Vec<usize> {
    let mut seen = vec![false; g.n()];
    seen[start] = true;
    let mut stack = vec![start];
    let mut out = Vec::new();
    while let Some(u) = stack.pop() {
        out.push(u);
        for &v in g.neighbors(u) {
            if allowed[v] && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `W(G)` from the cutset tree: processing pieces from `A'_h` down,
/// `W(G_i) = W(A'_i) * W(G_{i-1})` once each `v` in `K_i` is reweighted to
/// `w(v) * W(A'_i \ N(v)) / W(A'_i)`. Every counter call runs at
/// `eps / n^2`.
///
/// `g` must be connected; the counter sees induced subgraphs of atoms.
pub fn count_with_cutsets<F>(
    g: &WeightedGraph,
    mut atom_counter: F,
    eps: f64,
) -> Result<Estimate, CountError>
where
    F: FnMut(&WeightedGraph, f64) -> Result<Estimate, CountError>,
{
    let n = g.n();
    if n == 0 {
        return Ok(Estimate::exact(Weight::one()));
    }
    let tree = decompose_cutsets(g);
    let eps_atom = eps / (n * n) as f64;
    let mut weights: Vec<Weight> = g.weights().to_vec();
    let mut parts = Vec::new();
    let mut total = Weight::one();
    for i in (1..=tree.h()).rev() {
        let current = g.with_weights(weights.clone())?;
        let piece = tree.part(i);
        let wa = atom_counter(&current.induced_subgraph(piece)?, eps_atom)?;
        for &v in tree.clique(i) {
            let rest: Vec<usize> = piece
                .iter()
                .copied()
                .filter(|&u| !g.adjacent(u, v))
                .collect();
            let wv = atom_counter(&current.induced_subgraph(&rest)?, eps_atom)?;
            weights[v] = &weights[v] * &wv.value / &wa.value;
            parts.push(wv);
        }
        total *= &wa.value;
        parts.push(wa);
    }
    let current = g.with_weights(weights)?;
    let w0 = atom_counter(&current.induced_subgraph(&tree.atom(0))?, eps_atom)?;
    total *= &w0.value;
    parts.push(w0);
    Ok(Estimate::combine(total, eps, &parts))
}

/// Splits `g` into connected components, counts each with `counter` at
/// `eps / (2r)` for `r` components, and multiplies.
pub(crate) fn product_over_components<F>(
    g: &WeightedGraph,
    eps: f64,
    engine: &Engine,
    mut counter: F,
) -> Result<Estimate, CountError>
where
    F: FnMut(&WeightedGraph, f64) -> Result<Estimate, CountError>,
{
    let comps = g.connected_components();
    if comps.len() == 1 {
        return counter(g, eps);
    }
    engine.record(|t| t.components += comps.len() as u64);
    let eps_c = eps / (2 * comps.len().max(1)) as f64;
    let mut total = Weight::one();
    let mut parts = Vec::with_capacity(comps.len());
    for c in &comps {
        let e = counter(&g.induced_subgraph(c)?, eps_c)?;
        total *= &e.value;
        parts.push(e);
    }
    Ok(Estimate::combine(total, eps, &parts))
}

/// `W(G)` for (claw, odd hole)-free graphs.
///
/// Components are multiplied; each component is split along clique
/// cutsets; pieces that are themselves decomposable are handled
/// recursively and genuine atoms go to
/// [`atom_weight`](crate::atom::atom_weight). Any returned value is exact
/// (or within the sampling contract) for every input graph; inputs outside
/// the class may instead be rejected.
pub fn count_claw_odd_hole_free(
    g: &WeightedGraph,
    eps: f64,
    engine: &Engine,
) -> Result<Estimate, CountError> {
    claw_inner(&g.normalize(), eps, engine)
}

fn claw_inner(g: &WeightedGraph, eps: f64, engine: &Engine) -> Result<Estimate, CountError> {
    if g.is_empty() {
        return Ok(Estimate::exact(Weight::one()));
    }
    product_over_components(g, eps, engine, |c, e| {
        let whole = c.n();
        count_with_cutsets(
            c,
            |piece, e2| {
                if piece.n() == whole {
                    engine.record(|t| t.cutset_atoms += 1);
                    crate::atom::atom_weight(piece, e2, engine)
                } else {
                    claw_inner(piece, e2, engine)
                }
            },
            e,
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_weight_vector;

    fn two_triangles() -> WeightedGraph {
        WeightedGraph::unit(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap()
    }

    fn exact_counter(h: &WeightedGraph, _eps: f64) -> Result<Estimate, CountError> {
        Ok(Estimate::exact(brute_weight_vector(h)?.total()))
    }

    #[test]
    fn complete_graph_is_one_atom() {
        let edges: Vec<_> = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .collect();
        let k4 = WeightedGraph::unit(4, &edges).unwrap();
        let t = decompose_cutsets(&k4);
        assert_eq!(t.h(), 0);
        assert_eq!(t.atom(0), vec![0, 1, 2, 3]);
    }

    #[test]
    fn bowtie_splits_at_the_shared_vertex() {
        let t = decompose_cutsets(&two_triangles());
        assert_eq!(t.h(), 1);
        assert_eq!(t.clique(1), &[2]);
        let mut atoms = t.atoms();
        atoms.sort();
        assert_eq!(atoms, vec![vec![0, 1, 2], vec![2, 3, 4]]);
    }

    #[test]
    fn c5_is_an_atom() {
        let c5 = WeightedGraph::unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(decompose_cutsets(&c5).h(), 0);
    }

    #[test]
    fn path_splits_into_edges() {
        let p = WeightedGraph::unit(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let t = decompose_cutsets(&p);
        assert_eq!(t.h(), 2);
        assert!(t.atoms().iter().all(|a| a.len() == 2));
    }

    #[test]
    fn recursion_matches_oracle_on_small_examples() {
        let w = count_with_cutsets(&two_triangles(), exact_counter, 0.0).unwrap();
        assert_eq!(w.value, Weight::from(10));
        let p3 = WeightedGraph::unit(3, &[(0, 1), (1, 2)]).unwrap();
        let w = count_with_cutsets(&p3, exact_counter, 0.0).unwrap();
        assert_eq!(w.value, Weight::from(5));
    }

    #[test]
    fn no_cutset_means_one_counter_call() {
        let c5 = WeightedGraph::unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let mut calls = 0;
        let w = count_with_cutsets(
            &c5,
            |h, e| {
                calls += 1;
                exact_counter(h, e)
            },
            0.0,
        )
        .unwrap();
        assert_eq!(calls, 1);
        assert_eq!(w.value, Weight::from(11));
    }

    #[test]
    fn weighted_path_recursion() {
        let ws = vec![
            Weight::ratio(1, 2),
            Weight::from(3),
            Weight::ratio(2, 5),
            Weight::ratio(7, 4),
        ];
        let g = WeightedGraph::new(ws, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let w = count_with_cutsets(&g, exact_counter, 0.0).unwrap();
        assert_eq!(w.value, brute_weight_vector(&g).unwrap().total());
    }
}
