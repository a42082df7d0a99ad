//! Counting on (fork, odd hole)-free graphs, and the top coefficient
//! `W_alpha` by weight scaling.

use std::fmt;
use std::str::FromStr;

use crate::cutset::{count_claw_odd_hole_free, product_over_components};
use crate::engine::{Engine, Estimate};
use crate::error::{CountError, GraphClass};
use crate::graph::{VertexId, WeightedGraph};
use crate::modular::{contract_count, count_with_modules};
use crate::weight::Weight;

/// One term of `W(G) = 1 + sum_i w(v_i) W(R_i)`: the independent sets whose
/// first vertex is `v_i`.
#[derive(Clone, Debug)]
pub struct PartitionTerm {
    pub index: usize,
    pub pivot: VertexId,
    /// `G[{v_i, ..., v_n} \ N[v_i]]`.
    pub restricted: WeightedGraph,
}

pub fn partition_terms(g: &WeightedGraph) -> Vec<PartitionTerm> {
    (0..g.n())
        .map(|i| {
            let rest: Vec<usize> = (i + 1..g.n()).filter(|&u| !g.adjacent(i, u)).collect();
            PartitionTerm {
                index: i,
                pivot: g.id(i),
                restricted: g.induced_subgraph(&rest).expect("indices in range"),
            }
        })
        .collect()
}

/// `W(G)` for a prime (fork, odd hole)-free graph.
///
/// Each `R_i` is reduced by modular contraction; its prime leaves are
/// claw-free, so they go to the claw driver. Primality is not checked in
/// release builds.
pub fn count_prime_fork_free(
    g: &WeightedGraph,
    eps: f64,
    engine: &Engine,
) -> Result<Estimate, CountError> {
    let g = g.normalize();
    debug_assert!(
        g.n() > 12 || crate::modular::strong_modules(&g).len() <= 1,
        "count_prime_fork_free needs a prime graph"
    );
    engine.record(|t| t.prime_leaves += 1);
    let mut total = Weight::one();
    let mut parts = Vec::with_capacity(g.n());
    for term in partition_terms(&g) {
        engine.record(|t| t.partition_terms += 1);
        let r = contract_count(
            &term.restricted,
            |leaf, e| count_claw_odd_hole_free(leaf, e, engine),
            eps,
            eps,
        )
        .map_err(|e| e.reclass(GraphClass::ForkOddHoleFree))?;
        total += g.weight(term.index) * &r.value;
        parts.push(r);
    }
    Ok(Estimate::combine(total, eps, &parts))
}

/// `W(G)` for (fork, odd hole)-free graphs: components are multiplied and
/// each is reduced to prime leaves counted by [`count_prime_fork_free`].
pub fn count_fork_free(
    g: &WeightedGraph,
    eps: f64,
    engine: &Engine,
) -> Result<Estimate, CountError> {
    let g = g.normalize();
    product_over_components(&g, eps, engine, |c, e| {
        count_with_modules(c, |leaf, el| count_prime_fork_free(leaf, el, engine), e)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Driver {
    Claw,
    Fork,
}

impl Driver {
    pub fn class(self) -> GraphClass {
        match self {
            Driver::Claw => GraphClass::ClawOddHoleFree,
            Driver::Fork => GraphClass::ForkOddHoleFree,
        }
    }

    pub fn count(
        self,
        g: &WeightedGraph,
        eps: f64,
        engine: &Engine,
    ) -> Result<Estimate, CountError> {
        match self {
            Driver::Claw => count_claw_odd_hole_free(g, eps, engine),
            Driver::Fork => count_fork_free(g, eps, engine),
        }
    }
}

impl fmt::Display for Driver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Driver::Claw => "claw",
            Driver::Fork => "fork",
        })
    }
}

impl FromStr for Driver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "claw" => Ok(Driver::Claw),
            "fork" => Ok(Driver::Fork),
            other => Err(format!("unknown class {other:?} (expected claw or fork)")),
        }
    }
}

/// Size of a largest independent set, by branch and bound.
pub fn independence_number(g: &WeightedGraph) -> usize {
    let n = g.n();
    let words = n.div_ceil(64).max(1);
    let mut nb = vec![vec![0u64; words]; n];
    for (u, v) in g.edges() {
        nb[u][v / 64] |= 1 << (v % 64);
        nb[v][u / 64] |= 1 << (u % 64);
    }
    let mut all = vec![0u64; words];
    for v in 0..n {
        all[v / 64] |= 1 << (v % 64);
    }
    let mut best = 0;
    mis(&nb, all, 0, &mut best);
    best
}

fn mis(nb: &[Vec<u64>], set: Vec<u64>, size: usize, best: &mut usize) {
    let count: usize = set.iter().map(|w| w.count_ones() as usize).sum();
    if count == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + count <= *best {
        return;
    }
    let members = (0..set.len() * 64).filter(|&v| set[v / 64] >> (v % 64) & 1 == 1);
    let deg = |v: usize| -> usize {
        nb[v]
            .iter()
            .zip(&set)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    };
    let (v, d) = members
        .map(|v| (v, deg(v)))
        .max_by_key(|&(v, d)| (d, std::cmp::Reverse(v)))
        .unwrap();
    let take: Vec<u64> = set.iter().zip(&nb[v]).map(|(s, a)| s & !a).collect();
    let mut take = take;
    take[v / 64] &= !(1 << (v % 64));
    mis(nb, take, size + 1, best);
    if d > 0 {
        let mut skip = set;
        skip[v / 64] &= !(1 << (v % 64));
        mis(nb, skip, size, best);
    }
}

/// Scale factor for [`count_max_weight`]:
/// `ceil(2^n (w_max / w_min)^alpha / (eps / 2) / min(w_min, 1))`.
pub fn scaling_factor(g: &WeightedGraph, alpha: usize, eps: f64) -> Result<Weight, CountError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CountError::Input(format!(
            "epsilon must lie in (0, 1), got {eps}"
        )));
    }
    let Some((wmin, wmax)) = g.weight_range() else {
        return Ok(Weight::one());
    };
    let half = Weight::from_f64(eps / 2.0).expect("finite");
    let floor_one = if wmin < Weight::one() {
        wmin.clone()
    } else {
        Weight::one()
    };
    let ratio = &wmax / &wmin;
    let raw = Weight::from(2u64).pow(g.n() as u32) * ratio.pow(alpha as u32) / half / floor_one;
    Ok(raw.ceil())
}

/// Estimate of `W_alpha(G)` as `W(lambda G) / lambda^alpha`, with the count
/// itself run at `eps / 2`.
pub fn count_max_weight(
    g: &WeightedGraph,
    driver: Driver,
    eps: f64,
    engine: &Engine,
) -> Result<Estimate, CountError> {
    let g = g.normalize();
    let alpha = independence_number(&g);
    let lambda = scaling_factor(&g, alpha, eps)?;
    let scaled = g.scale_weights(&lambda)?;
    let w = driver.count(&scaled, eps / 2.0, engine)?;
    Ok(Estimate {
        value: w.value / lambda.pow(alpha as u32),
        eps,
        engine: w.engine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::WeightedBipartiteGraph;
    use crate::oracle::{brute_weight_vector, contains_pattern, PatternKind};

    fn k_nn_minus_matching(n: usize) -> WeightedGraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    edges.push((i, n + j));
                }
            }
        }
        WeightedGraph::unit(2 * n, &edges).unwrap()
    }

    fn l_k33() -> WeightedGraph {
        let mut h = WeightedBipartiteGraph::new(3, 3);
        for u in 0..3 {
            for v in 0..3 {
                h.add_edge(u, v, Weight::one()).unwrap();
            }
        }
        h.line_graph().0
    }

    #[test]
    fn partition_sums_to_total() {
        let g = WeightedGraph::new(
            (1..=6).map(|i| Weight::ratio(i, 4)).collect(),
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)],
        )
        .unwrap();
        let mut sum = Weight::one();
        for t in partition_terms(&g) {
            sum += g.weight(t.index) * brute_weight_vector(&t.restricted).unwrap().total();
        }
        assert_eq!(sum, brute_weight_vector(&g).unwrap().total());
    }

    #[test]
    fn k44_minus_matching() {
        let g = k_nn_minus_matching(4);
        assert!(contains_pattern(&g, PatternKind::Fork).is_none());
        let e = Engine::exact();
        let w = count_prime_fork_free(&g, 0.0, &e).unwrap();
        assert_eq!(w.value, brute_weight_vector(&g).unwrap().total());
        // the restricted graph of a pivot has a claw
        let r = g.delete_closed_neighborhood(0).unwrap();
        assert!(contains_pattern(&r, PatternKind::Claw).is_some());
        assert_eq!(count_fork_free(&g, 0.0, &e).unwrap().value, w.value);
    }

    #[test]
    fn p4_partition_count() {
        let g = WeightedGraph::unit(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let w = count_prime_fork_free(&g, 0.0, &Engine::exact()).unwrap();
        assert_eq!(w.value, Weight::from(8u64));
    }

    #[test]
    fn drivers_agree_on_line_graph() {
        let g = l_k33();
        let e = Engine::exact();
        assert_eq!(
            count_fork_free(&g, 0.0, &e).unwrap().value,
            count_claw_odd_hole_free(&g, 0.0, &e).unwrap().value
        );
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(independence_number(&l_k33()), 3);
        assert_eq!(independence_number(&k_nn_minus_matching(4)), 4);
        assert_eq!(
            independence_number(&WeightedGraph::unit(70, &[]).unwrap()),
            70
        );
        assert_eq!(independence_number(&WeightedGraph::empty()), 0);
    }

    #[test]
    fn max_weight_examples() {
        let e = Engine::exact();
        let w = count_max_weight(&l_k33(), Driver::Fork, 0.05, &e).unwrap();
        assert_eq!(w.value.floor(), Weight::from(6u64));
        let single = WeightedGraph::new(vec![Weight::ratio(3, 7)], &[]).unwrap();
        let w = count_max_weight(&single, Driver::Claw, 0.1, &e).unwrap();
        assert!(w.value.relative_error(&Weight::ratio(3, 7)) <= 0.1);
        let two = WeightedGraph::unit(4, &[(0, 1), (2, 3)]).unwrap();
        let w = count_max_weight(&two, Driver::Claw, 0.05, &e).unwrap();
        assert!(w.value.relative_error(&Weight::from(4u64)) <= 0.05);
    }

    #[test]
    fn small_weights_still_within_eps() {
        let g =
            WeightedGraph::new(vec![Weight::ratio(1, 50); 6], &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let exact = brute_weight_vector(&g).unwrap().top().clone();
        let w = count_max_weight(&g, Driver::Claw, 0.05, &Engine::exact()).unwrap();
        assert!(w.value >= exact);
        assert!(w.value.relative_error(&exact) <= 0.05);
    }

    #[test]
    fn driver_parses() {
        assert_eq!("claw".parse::<Driver>(), Ok(Driver::Claw));
        assert!("star".parse::<Driver>().is_err());
    }
}
