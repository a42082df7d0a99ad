//! Brute-force ground truth and forbidden-pattern detectors.
//!
//! Everything here is exponential and meant for small instances only.

use std::collections::HashMap;

use crate::error::CountError;
use crate::graph::{WeightVector, WeightedGraph};
use crate::matching::WeightedBipartiteGraph;
use crate::permanent::PermanentInstance;
use crate::weight::Weight;

pub const DEFAULT_ORACLE_CAP: usize = 20;
pub const ORACLE_CAP_ENV: &str = "WISC_ORACLE_CAP";
pub const PERMANENT_ORACLE_CAP: usize = 9;
pub const MATCHING_ORACLE_CAP: usize = 18;

/// Vertex cap for [`brute_weight_vector`]: `$WISC_ORACLE_CAP` if set and
/// valid, otherwise 20. Never more than 64.
pub fn oracle_cap() -> usize {
    std::env::var(ORACLE_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(DEFAULT_ORACLE_CAP)
        .min(64)
}

/// `W_0..W_alpha` by exhaustive search, under the configured cap.
pub fn brute_weight_vector(g: &WeightedGraph) -> Result<WeightVector, CountError> {
    brute_weight_vector_capped(g, oracle_cap())
}

pub fn brute_weight_vector_capped(
    g: &WeightedGraph,
    cap: usize,
) -> Result<WeightVector, CountError> {
    let n = g.n();
    if n > cap.min(64) {
        return Err(CountError::OracleCap { n, cap });
    }
    let closed: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(1u64 << v, |m, &u| m | (1 << u)))
        .collect();
    let mut memo = HashMap::new();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    Ok(WeightVector::new(poly(all, g, &closed, &mut memo)))
}

/// Independence polynomial of `G[mask]`: either the lowest vertex is
/// left out, or it is taken and its closed neighbourhood removed.
fn poly(
    mask: u64,
    g: &WeightedGraph,
    closed: &[u64],
    memo: &mut HashMap<u64, Vec<Weight>>,
) -> Vec<Weight> {
    if mask == 0 {
        return vec![Weight::one()];
    }
    if let Some(p) = memo.get(&mask) {
        return p.clone();
    }
    let v = mask.trailing_zeros() as usize;
    let mut out = poly(mask & !(1 << v), g, closed, memo);
    let with = poly(mask & !closed[v], g, closed, memo);
    if out.len() < with.len() + 1 {
        out.resize(with.len() + 1, Weight::zero());
    }
    for (k, c) in with.iter().enumerate() {
        out[k + 1] += c * g.weight(v);
    }
    memo.insert(mask, out.clone());
    out
}

/// The small forbidden induced subgraphs used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternKind {
    Claw,
    Diamond,
    Gem,
    Fork,
    Wheel4,
    OddHole,
}

impl PatternKind {
    pub const ALL: [PatternKind; 6] = [
        PatternKind::Claw,
        PatternKind::Diamond,
        PatternKind::Gem,
        PatternKind::Fork,
        PatternKind::Wheel4,
        PatternKind::OddHole,
    ];

    /// The fixed pattern graph; `None` for odd holes, which have no single
    /// representative.
    pub fn graph(self) -> Option<WeightedGraph> {
        let edges: &[(usize, usize)] = match self {
            PatternKind::Claw => &[(0, 1), (0, 2), (0, 3)],
            PatternKind::Diamond => &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)],
            // P4 1-2-3-4 plus a vertex 0 adjacent to all of it
            PatternKind::Gem => &[(1, 2), (2, 3), (3, 4), (0, 1), (0, 2), (0, 3), (0, 4)],
            // claw 0;1,2,3 with 3 extended to 4
            PatternKind::Fork => &[(0, 1), (0, 2), (0, 3), (3, 4)],
            // C4 1-2-3-4 plus hub 0
            PatternKind::Wheel4 => &[
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 1),
                (0, 1),
                (0, 2),
                (0, 3),
                (0, 4),
            ],
            PatternKind::OddHole => return None,
        };
        let n = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap() + 1;
        Some(WeightedGraph::unit(n, edges).expect("pattern graphs are simple"))
    }
}

/// An induced copy of the pattern, as vertex indices of `g`. For the fixed
/// patterns the witness is listed in the pattern's own vertex order; for
/// odd holes it is the cycle in order.
pub fn contains_pattern(g: &WeightedGraph, kind: PatternKind) -> Option<Vec<usize>> {
    match kind {
        PatternKind::Claw => find_claw(g),
        PatternKind::Fork => find_fork(g),
        PatternKind::OddHole => find_odd_hole(g),
        other => find_induced(g, &other.graph().unwrap()),
    }
}

fn independent_triples(g: &WeightedGraph, c: usize) -> impl Iterator<Item = [usize; 3]> + '_ {
    let nb = g.neighbors(c);
    (0..nb.len()).flat_map(move |i| {
        (i + 1..nb.len()).flat_map(move |j| {
            (j + 1..nb.len()).filter_map(move |k| {
                let (a, b, d) = (nb[i], nb[j], nb[k]);
                (!g.adjacent(a, b) && !g.adjacent(a, d) && !g.adjacent(b, d)).then_some([a, b, d])
            })
        })
    })
}

fn find_claw(g: &WeightedGraph) -> Option<Vec<usize>> {
    (0..g.n()).find_map(|c| {
        independent_triples(g, c)
            .next()
            .map(|[a, b, d]| vec![c, a, b, d])
    })
}

fn find_fork(g: &WeightedGraph) -> Option<Vec<usize>> {
    for c in 0..g.n() {
        for t in independent_triples(g, c) {
            for r in 0..3 {
                let (a, b, d) = (t[(r + 1) % 3], t[(r + 2) % 3], t[r]);
                for &e in g.neighbors(d) {
                    if e != c && !g.adjacent(e, c) && !g.adjacent(e, a) && !g.adjacent(e, b) {
                        return Some(vec![c, a, b, d, e]);
                    }
                }
            }
        }
    }
    None
}

/// Generic induced-subgraph search by backtracking over injective maps.
pub fn find_induced(g: &WeightedGraph, pattern: &WeightedGraph) -> Option<Vec<usize>> {
    let k = pattern.n();
    if k > g.n() {
        return None;
    }
    let mut map = Vec::with_capacity(k);
    let mut used = vec![false; g.n()];
    if extend(g, pattern, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn extend(g: &WeightedGraph, p: &WeightedGraph, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let i = map.len();
    if i == p.n() {
        return true;
    }
    for x in 0..g.n() {
        if used[x] || g.degree(x) < p.degree(i) {
            continue;
        }
        if (0..i).all(|j| p.adjacent(i, j) == g.adjacent(x, map[j])) {
            used[x] = true;
            map.push(x);
            if extend(g, p, map, used) {
                return true;
            }
            map.pop();
            used[x] = false;
        }
    }
    false
}

/// Induced cycle of odd length at least five, found by growing chordless
/// paths from their smallest vertex.
fn find_odd_hole(g: &WeightedGraph) -> Option<Vec<usize>> {
    let n = g.n();
    let mut path = Vec::new();
    let mut on_path = vec![false; n];
    for s in 0..n {
        path.clear();
        path.push(s);
        on_path[s] = true;
        if grow_hole(g, s, &mut path, &mut on_path) {
            return Some(path);
        }
        on_path[s] = false;
    }
    None
}

fn grow_hole(g: &WeightedGraph, s: usize, path: &mut Vec<usize>, on_path: &mut [bool]) -> bool {
    let last = *path.last().unwrap();
    let len = path.len();
    for &x in g.neighbors(last) {
        if x <= s || on_path[x] {
            continue;
        }
        // x must see no interior path vertex other than `last`
        if len >= 2 && path[1..len - 1].iter().any(|&p| g.adjacent(p, x)) {
            continue;
        }
        if len >= 2 && g.adjacent(x, s) {
            let cycle = len + 1;
            if cycle >= 5 && cycle % 2 == 1 {
                path.push(x);
                return true;
            }
            continue;
        }
        path.push(x);
        on_path[x] = true;
        if grow_hole(g, s, path, on_path) {
            return true;
        }
        on_path[x] = false;
        path.pop();
    }
    false
}

/// Naive `n!` expansion.
pub fn brute_permanent(a: &PermanentInstance) -> Result<Weight, CountError> {
    let n = a.dim();
    if n > PERMANENT_ORACLE_CAP {
        return Err(CountError::OracleCap {
            n,
            cap: PERMANENT_ORACLE_CAP,
        });
    }
    fn rec(a: &PermanentInstance, row: usize, used: u32) -> Weight {
        if row == a.dim() {
            return Weight::one();
        }
        let mut total = Weight::zero();
        for j in 0..a.dim() {
            if used & (1 << j) == 0 && !a.get(row, j).is_zero() {
                total += a.get(row, j) * rec(a, row + 1, used | (1 << j));
            }
        }
        total
    }
    Ok(rec(a, 0, 0))
}

/// Total weight of the `k`-edge matchings of `b`.
pub fn brute_matching_weight(b: &WeightedBipartiteGraph, k: usize) -> Result<Weight, CountError> {
    let (n1, n2) = (b.n1(), b.n2());
    if n1 + n2 > MATCHING_ORACLE_CAP {
        return Err(CountError::OracleCap {
            n: n1 + n2,
            cap: MATCHING_ORACLE_CAP,
        });
    }
    if k > n1.min(n2) {
        return Ok(Weight::zero());
    }
    fn rec(b: &WeightedBipartiteGraph, left: usize, used: u32, need: usize) -> Weight {
        if need == 0 {
            return Weight::one();
        }
        if b.n1() - left < need {
            return Weight::zero();
        }
        let mut total = rec(b, left + 1, used, need);
        for (v, w) in b.neighbors_left(left) {
            if used & (1 << v) == 0 {
                total += w * rec(b, left + 1, used | (1 << v), need - 1);
            }
        }
        total
    }
    Ok(rec(b, 0, 0, k))
}

/// Some clique whose removal disconnects the graph, by enumerating all
/// cliques. `None` for graphs with no clique cutset.
pub fn find_clique_cutset(g: &WeightedGraph) -> Option<Vec<usize>> {
    let mut clique = Vec::new();
    search_cutset(g, 0, &mut clique)
}

fn search_cutset(g: &WeightedGraph, from: usize, clique: &mut Vec<usize>) -> Option<Vec<usize>> {
    if disconnects(g, clique) {
        return Some(clique.clone());
    }
    for v in from..g.n() {
        if clique.iter().all(|&u| g.adjacent(u, v)) {
            clique.push(v);
            if let Some(s) = search_cutset(g, v + 1, clique) {
                return Some(s);
            }
            clique.pop();
        }
    }
    None
}

fn disconnects(g: &WeightedGraph, set: &[usize]) -> bool {
    let n = g.n();
    let mut seen = vec![false; n];
    for &v in set {
        seen[v] = true;
    }
    let Some(start) = (0..n).find(|&v| !seen[v]) else {
        return false;
    };
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.iter().any(|s| !s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        WeightedGraph::unit(n, &edges).unwrap()
    }

    fn ints(xs: &[u64]) -> Vec<Weight> {
        xs.iter().map(|&x| Weight::from(x)).collect()
    }

    #[test]
    fn claw_and_c5_vectors() {
        let claw = PatternKind::Claw.graph().unwrap();
        let v = brute_weight_vector(&claw).unwrap();
        assert_eq!(v.entries(), ints(&[1, 4, 3, 1]).as_slice());
        assert_eq!(v.total(), Weight::from(9));
        let v = brute_weight_vector(&cycle(5)).unwrap();
        assert_eq!(v.entries(), ints(&[1, 5, 5]).as_slice());
        assert_eq!(v.total(), Weight::from(11));
    }

    #[test]
    fn single_vertex_and_empty() {
        let a = Weight::ratio(5, 3);
        let g = WeightedGraph::new(vec![a.clone()], &[]).unwrap();
        assert_eq!(
            brute_weight_vector(&g).unwrap().entries(),
            &[Weight::one(), a]
        );
        let e = brute_weight_vector(&WeightedGraph::empty()).unwrap();
        assert_eq!(e.entries(), &[Weight::one()]);
        assert_eq!(e.alpha(), 0);
    }

    #[test]
    fn cap_is_enforced() {
        let g = WeightedGraph::unit(5, &[]).unwrap();
        assert_eq!(
            brute_weight_vector_capped(&g, 4),
            Err(CountError::OracleCap { n: 5, cap: 4 })
        );
    }

    #[test]
    fn edgeless_twenty_is_binomial() {
        let g = WeightedGraph::unit(20, &[]).unwrap();
        let v = brute_weight_vector(&g).unwrap();
        assert_eq!(v.get(10), Weight::from(184_756));
        assert_eq!(v.total(), Weight::from(1 << 20));
    }

    #[test]
    fn patterns_find_themselves() {
        for kind in PatternKind::ALL {
            if let Some(p) = kind.graph() {
                let w = contains_pattern(&p, kind).unwrap_or_else(|| panic!("{kind:?}"));
                assert_eq!(w.len(), p.n());
            }
        }
        assert_eq!(
            contains_pattern(&cycle(5), PatternKind::OddHole).map(|w| w.len()),
            Some(5)
        );
        assert_eq!(
            contains_pattern(&cycle(7), PatternKind::OddHole).map(|w| w.len()),
            Some(7)
        );
        assert_eq!(contains_pattern(&cycle(6), PatternKind::OddHole), None);
        assert_eq!(contains_pattern(&cycle(3), PatternKind::OddHole), None);
    }

    #[test]
    fn chords_break_holes() {
        let mut edges: Vec<_> = (0..7).map(|i| (i, (i + 1) % 7)).collect();
        edges.push((0, 2));
        // chord leaves the induced cycle 0-2-3-4-5-6 of length 6 and a triangle
        let g = WeightedGraph::unit(7, &edges).unwrap();
        assert_eq!(contains_pattern(&g, PatternKind::OddHole), None);
        edges.push((0, 3));
        // now 0-3-4-5-6 is an induced 5-cycle
        let g = WeightedGraph::unit(7, &edges).unwrap();
        let w = contains_pattern(&g, PatternKind::OddHole).unwrap();
        assert_eq!(w.len(), 5);
    }

    #[test]
    fn permanent_oracle_examples() {
        assert_eq!(
            brute_permanent(&PermanentInstance::ones(3)).unwrap(),
            Weight::from(6)
        );
        assert_eq!(
            brute_permanent(&PermanentInstance::identity(4)).unwrap(),
            Weight::one()
        );
        let a = PermanentInstance::new(vec![ints(&[1, 2]), ints(&[3, 4])]).unwrap();
        assert_eq!(brute_permanent(&a).unwrap(), Weight::from(10));
        assert!(brute_permanent(&PermanentInstance::ones(10)).is_err());
    }

    #[test]
    fn matching_oracle_examples() {
        let mut k22 = WeightedBipartiteGraph::new(2, 2);
        for u in 0..2 {
            for v in 0..2 {
                k22.add_edge(u, v, Weight::one()).unwrap();
            }
        }
        assert_eq!(brute_matching_weight(&k22, 0).unwrap(), Weight::one());
        assert_eq!(brute_matching_weight(&k22, 1).unwrap(), Weight::from(4));
        assert_eq!(brute_matching_weight(&k22, 2).unwrap(), Weight::from(2));
        assert_eq!(brute_matching_weight(&k22, 3).unwrap(), Weight::zero());
        let mut e = WeightedBipartiteGraph::new(1, 1);
        e.add_edge(0, 0, Weight::ratio(2, 7)).unwrap();
        assert_eq!(brute_matching_weight(&e, 1).unwrap(), Weight::ratio(2, 7));
    }

    #[test]
    fn clique_cutset_oracle() {
        let bowtie =
            WeightedGraph::unit(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let s = find_clique_cutset(&bowtie).unwrap();
        assert!(bowtie.is_clique(&s) && disconnects(&bowtie, &s));
        let c5 = WeightedGraph::unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(find_clique_cutset(&c5), None);
        let split = WeightedGraph::unit(2, &[]).unwrap();
        assert_eq!(find_clique_cutset(&split), Some(vec![]));
    }
}
