//! Vertex-weighted simple graphs.
//!
//! Vertices are addressed by dense local indices `0..n`. Each vertex also
//! carries a stable id that survives induced-subgraph operations, so that
//! decomposition artifacts can always be mapped back to the input graph.

use std::collections::HashMap;

use thiserror::Error;

use crate::weight::Weight;

/// Stable vertex identifier.
pub type VertexId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("duplicate vertex id {0}")]
    DuplicateId(VertexId),
    #[error("expected {expected} weights, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("scaling factor must be positive")]
    NonPositiveScale,
    #[error("{0} is not a module of the graph")]
    NotAModule(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    ids: Vec<VertexId>,
    weights: Vec<Weight>,
    adj: Vec<Vec<usize>>,
    matrix: Vec<bool>,
}

impl std::fmt::Debug for WeightedGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightedGraph")
            .field("ids", &self.ids)
            .field("weights", &self.weights)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl WeightedGraph {
    pub fn empty() -> Self {
        WeightedGraph {
            ids: Vec::new(),
            weights: Vec::new(),
            adj: Vec::new(),
            matrix: Vec::new(),
        }
    }

    /// Graph on `0..weights.len()` with ids equal to indices.
    pub fn new(weights: Vec<Weight>, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let ids = (0..weights.len()).collect();
        Self::with_ids(ids, weights, edges)
    }

    /// Graph with every weight equal to one.
    pub fn unit(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::new(vec![Weight::one(); n], edges)
    }

    /// Edges are given in local indices; `ids[i]` is the stable id of vertex `i`.
    pub fn with_ids(
        ids: Vec<VertexId>,
        weights: Vec<Weight>,
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let n = ids.len();
        if weights.len() != n {
            return Err(GraphError::LengthMismatch {
                expected: n,
                got: weights.len(),
            });
        }
        let mut seen = HashMap::with_capacity(n);
        for &id in &ids {
            if seen.insert(id, ()).is_some() {
                return Err(GraphError::DuplicateId(id));
            }
        }
        let mut matrix = vec![false; n * n];
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::UnknownVertex(u));
            }
            if v >= n {
                return Err(GraphError::UnknownVertex(v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if matrix[u * n + v] {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            matrix[u * n + v] = true;
            matrix[v * n + u] = true;
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(WeightedGraph {
            ids,
            weights,
            adj,
            matrix,
        })
    }

    /// Builds from an adjacency predicate; used internally where the edge
    /// set is already known to be simple.
    fn from_matrix(ids: Vec<VertexId>, weights: Vec<Weight>, matrix: Vec<bool>) -> Self {
        let n = ids.len();
        let adj = (0..n)
            .map(|u| (0..n).filter(|&v| matrix[u * n + v]).collect())
            .collect();
        WeightedGraph {
            ids,
            weights,
            adj,
            matrix,
        }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, v: usize) -> VertexId {
        self.ids[v]
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn index_of(&self, id: VertexId) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    pub fn weight(&self, v: usize) -> &Weight {
        &self.weights[v]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.matrix[u * self.n() + v]
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Sum of all vertex weights, i.e. `W_1`.
    pub fn total_weight(&self) -> Weight {
        self.weights.iter().sum()
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| self.adjacent(u, v)))
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| !self.adjacent(u, v)))
    }

    /// Same structure, new weights.
    pub fn with_weights(&self, weights: Vec<Weight>) -> Result<Self, GraphError> {
        if weights.len() != self.n() {
            return Err(GraphError::LengthMismatch {
                expected: self.n(),
                got: weights.len(),
            });
        }
        Ok(WeightedGraph {
            weights,
            ..self.clone()
        })
    }

    pub fn set_weight(&mut self, v: usize, w: Weight) {
        self.weights[v] = w;
    }

    /// `G[U]`. Local indices of the result follow the sorted order of `U`.
    pub fn induced_subgraph(&self, set: &[usize]) -> Result<Self, GraphError> {
        let mut keep: Vec<usize> = set.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&v| v >= self.n()) {
            return Err(GraphError::UnknownVertex(bad));
        }
        Ok(self.induced_sorted(&keep))
    }

    fn induced_sorted(&self, keep: &[usize]) -> Self {
        let k = keep.len();
        let mut matrix = vec![false; k * k];
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate() {
                matrix[i * k + j] = self.adjacent(u, v);
            }
        }
        WeightedGraph::from_matrix(
            keep.iter().map(|&v| self.ids[v]).collect(),
            keep.iter().map(|&v| self.weights[v].clone()).collect(),
            matrix,
        )
    }

    /// `G[V \ U]`.
    pub fn remove_vertices(&self, set: &[usize]) -> Result<Self, GraphError> {
        let mut drop = vec![false; self.n()];
        for &v in set {
            if v >= self.n() {
                return Err(GraphError::UnknownVertex(v));
            }
            drop[v] = true;
        }
        let keep: Vec<usize> = (0..self.n()).filter(|&v| !drop[v]).collect();
        Ok(self.induced_sorted(&keep))
    }

    /// `G \ N[v]`.
    pub fn delete_closed_neighborhood(&self, v: usize) -> Result<Self, GraphError> {
        if v >= self.n() {
            return Err(GraphError::UnknownVertex(v));
        }
        let keep: Vec<usize> = (0..self.n())
            .filter(|&u| u != v && !self.adjacent(u, v))
            .collect();
        Ok(self.induced_sorted(&keep))
    }

    /// Drops zero-weight vertices; every `W_k` is unchanged.
    pub fn normalize(&self) -> Self {
        let keep: Vec<usize> = (0..self.n())
            .filter(|&v| !self.weights[v].is_zero())
            .collect();
        if keep.len() == self.n() {
            return self.clone();
        }
        self.induced_sorted(&keep)
    }

    /// Multiplies every weight by `lambda`, so `W_k` scales by `lambda^k`.
    pub fn scale_weights(&self, lambda: &Weight) -> Result<Self, GraphError> {
        if lambda.is_zero() {
            return Err(GraphError::NonPositiveScale);
        }
        let weights = self.weights.iter().map(|w| w * lambda).collect();
        Ok(WeightedGraph {
            weights,
            ..self.clone()
        })
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// their smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut members = vec![s];
            comp[s] = c;
            let mut i = 0;
            while i < members.len() {
                let u = members[i];
                i += 1;
                for &v in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = c;
                        members.push(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    pub fn complement(&self) -> Self {
        let n = self.n();
        let mut matrix = vec![false; n * n];
        for u in 0..n {
            for v in 0..n {
                matrix[u * n + v] = u != v && !self.adjacent(u, v);
            }
        }
        WeightedGraph::from_matrix(self.ids.clone(), self.weights.clone(), matrix)
    }

    /// Replaces the vertex set `module` by one vertex with id `id`, the
    /// given weight, and the module's common outside neighbourhood. The new
    /// vertex takes the position of the smallest module member.
    pub fn contract(
        &self,
        module: &[usize],
        id: VertexId,
        weight: Weight,
    ) -> Result<Self, GraphError> {
        let n = self.n();
        let mut inside = vec![false; n];
        for &v in module {
            if v >= n {
                return Err(GraphError::UnknownVertex(v));
            }
            inside[v] = true;
        }
        let Some(&rep) = module.iter().min() else {
            return Ok(self.clone());
        };
        for x in (0..n).filter(|&x| !inside[x]) {
            let first = self.adjacent(x, rep);
            if module.iter().any(|&v| self.adjacent(x, v) != first) {
                return Err(GraphError::NotAModule(format!("{module:?}")));
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&v| !inside[v] || v == rep).collect();
        let mut g = self.induced_sorted(&keep);
        let pos = keep.iter().position(|&v| v == rep).unwrap();
        if g.ids.iter().enumerate().any(|(i, &x)| x == id && i != pos) {
            return Err(GraphError::DuplicateId(id));
        }
        g.ids[pos] = id;
        g.weights[pos] = weight;
        Ok(g)
    }

    /// Disjoint union; ids of `other` are shifted past the largest id of `self`.
    pub fn disjoint_union(&self, other: &WeightedGraph) -> Self {
        let shift = self.ids.iter().max().map_or(0, |&m| m + 1);
        let n = self.n();
        let mut ids = self.ids.clone();
        ids.extend(other.ids.iter().map(|&x| x + shift));
        let mut weights = self.weights.clone();
        weights.extend(other.weights.iter().cloned());
        let edges: Vec<(usize, usize)> = self
            .edges()
            .chain(other.edges().map(|(u, v)| (u + n, v + n)))
            .collect();
        WeightedGraph::with_ids(ids, weights, &edges).expect("disjoint union is simple")
    }

    /// Same graph with ids renumbered to `0..n`.
    pub fn relabeled(&self) -> Self {
        WeightedGraph {
            ids: (0..self.n()).collect(),
            ..self.clone()
        }
    }

    /// Vertices reordered by `order` (a permutation of `0..n`): new vertex
    /// `i` is old vertex `order[i]`. Ids travel with their vertices.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let n = self.n();
        assert_eq!(order.len(), n);
        let mut matrix = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                matrix[i * n + j] = self.adjacent(order[i], order[j]);
            }
        }
        WeightedGraph::from_matrix(
            order.iter().map(|&v| self.ids[v]).collect(),
            order.iter().map(|&v| self.weights[v].clone()).collect(),
            matrix,
        )
    }

    /// Smallest positive and largest weight, or `None` for the empty graph.
    pub fn weight_range(&self) -> Option<(Weight, Weight)> {
        let lo = self.weights.iter().filter(|w| !w.is_zero()).min()?.clone();
        let hi = self.weights.iter().max()?.clone();
        Some((lo, hi))
    }
}

/// `W_0, ..., W_alpha`: total weight of the independent sets of each size.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightVector(Vec<Weight>);

impl WeightVector {
    /// Trailing zero entries are trimmed so the length is `alpha + 1`.
    pub fn new(mut entries: Vec<Weight>) -> Self {
        while entries.len() > 1 && entries.last().is_some_and(Weight::is_zero) {
            entries.pop();
        }
        if entries.is_empty() {
            entries.push(Weight::one());
        }
        WeightVector(entries)
    }

    pub fn alpha(&self) -> usize {
        self.0.len() - 1
    }

    pub fn get(&self, k: usize) -> Weight {
        self.0.get(k).cloned().unwrap_or_else(Weight::zero)
    }

    pub fn entries(&self) -> &[Weight] {
        &self.0
    }

    pub fn total(&self) -> Weight {
        self.0.iter().sum()
    }

    /// `W_alpha`.
    pub fn top(&self) -> &Weight {
        self.0.last().expect("nonempty")
    }

    /// Coefficient-wise product of two independence polynomials (disjoint union).
    pub fn convolve(&self, other: &WeightVector) -> WeightVector {
        let mut out = vec![Weight::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        WeightVector::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        WeightedGraph::unit(n, &edges).unwrap()
    }

    #[test]
    fn rejects_malformed_edges() {
        assert_eq!(
            WeightedGraph::unit(2, &[(0, 2)]),
            Err(GraphError::UnknownVertex(2))
        );
        assert_eq!(
            WeightedGraph::unit(2, &[(1, 1)]),
            Err(GraphError::SelfLoop(1))
        );
        assert_eq!(
            WeightedGraph::unit(2, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(1, 0))
        );
    }

    #[test]
    fn induced_identity_and_empty() {
        let g = cycle(5);
        assert_eq!(g.induced_subgraph(&[0, 1, 2, 3, 4]).unwrap(), g);
        assert!(g.induced_subgraph(&[]).unwrap().is_empty());
        assert_eq!(g.induced_subgraph(&[7]), Err(GraphError::UnknownVertex(7)));
    }

    #[test]
    fn induced_c5_prefix_is_p3() {
        let p = cycle(5).induced_subgraph(&[0, 1, 2]).unwrap();
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(p.ids(), &[0, 1, 2]);
    }

    #[test]
    fn closed_neighbourhood_deletion() {
        let star = WeightedGraph::unit(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(star.delete_closed_neighborhood(0).unwrap().is_empty());
        let c5 = cycle(5).delete_closed_neighborhood(0).unwrap();
        assert_eq!(c5.ids(), &[2, 3]);
        assert_eq!(c5.m(), 1);
        let k4 = WeightedGraph::unit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        for v in 0..4 {
            assert!(k4.delete_closed_neighborhood(v).unwrap().is_empty());
        }
        assert_eq!(
            k4.delete_closed_neighborhood(4),
            Err(GraphError::UnknownVertex(4))
        );
    }

    #[test]
    fn normalize_drops_zero_weights_only() {
        let g = WeightedGraph::new(vec![Weight::zero(), Weight::ratio(2, 3)], &[(0, 1)]).unwrap();
        let h = g.normalize();
        assert_eq!(h.n(), 1);
        assert_eq!(h.ids(), &[1]);
        let unit = cycle(4);
        assert_eq!(unit.normalize(), unit);
    }

    #[test]
    fn scale_by_zero_is_an_error() {
        assert_eq!(
            cycle(3).scale_weights(&Weight::zero()),
            Err(GraphError::NonPositiveScale)
        );
        assert_eq!(cycle(3).scale_weights(&Weight::one()).unwrap(), cycle(3));
    }

    #[test]
    fn components_of_disjoint_union() {
        let g = WeightedGraph::unit(3, &[(0, 1)]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 1], vec![2]]);
        assert!(WeightedGraph::empty().connected_components().is_empty());
        assert_eq!(cycle(5).connected_components().len(), 1);
    }

    #[test]
    fn complement_examples() {
        let k3 = cycle(3);
        assert_eq!(k3.complement().m(), 0);
        let c5 = cycle(5);
        let co = c5.complement();
        assert_eq!(co.m(), 5);
        assert!(co.adjacent(0, 2) && co.adjacent(2, 4) && co.adjacent(4, 1));
        assert_eq!(co.complement(), c5);
    }

    #[test]
    fn contract_requires_a_module() {
        let p3 = WeightedGraph::unit(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(
            p3.contract(&[0, 1], 9, Weight::one()),
            Err(GraphError::NotAModule(_))
        ));
        let g = p3.contract(&[0, 2], 9, Weight::from_integer(3)).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.ids(), &[9, 1]);
        assert_eq!(g.weight(0), &Weight::from_integer(3));
        assert!(g.adjacent(0, 1));
    }

    #[test]
    fn weight_vector_trims_and_convolves() {
        let v = WeightVector::new(vec![Weight::one(), Weight::from(2), Weight::zero()]);
        assert_eq!(v.alpha(), 1);
        let sq = v.convolve(&v);
        assert_eq!(
            sq.entries(),
            &[Weight::one(), Weight::from(4), Weight::from(4)]
        );
    }
}
