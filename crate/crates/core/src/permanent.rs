//! Permanents of nonnegative rational matrices: Ryser's formula for exact
//! values and an annealed matchings chain for approximate ones.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{EngineKind, Estimate};
use crate::error::CountError;
use crate::weight::Weight;

/// Square matrix with nonnegative rational entries.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PermanentInstance {
    rows: Vec<Vec<Weight>>,
}

impl PermanentInstance {
    pub fn new(rows: Vec<Vec<Weight>>) -> Result<Self, CountError> {
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(CountError::Input(format!(
                "row {bad} has {} entries, expected {n}",
                rows[bad].len()
            )));
        }
        Ok(PermanentInstance { rows })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Weight) -> Self {
        PermanentInstance {
            rows: (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect(),
        }
    }

    pub fn ones(n: usize) -> Self {
        Self::from_fn(n, |_, _| Weight::one())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| {
            if i == j {
                Weight::one()
            } else {
                Weight::zero()
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Weight {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<Weight>] {
        &self.rows
    }

    fn support(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|r| (0..r.len()).filter(|&j| !r[j].is_zero()).collect())
            .collect()
    }
}

/// Whether some permutation has all entries nonzero.
pub fn has_perfect_matching(a: &PermanentInstance) -> bool {
    let n = a.dim();
    let support = a.support();
    let mut mate_r: Vec<Option<usize>> = vec![None; n];
    for u in 0..n {
        let mut seen = vec![false; n];
        if !augment(u, &support, &mut mate_r, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(
    u: usize,
    support: &[Vec<usize>],
    mate_r: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &v in &support[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if mate_r[v].is_none_or(|w| augment(w, support, mate_r, seen)) {
            mate_r[v] = Some(u);
            return true;
        }
    }
    false
}

/// Exact permanent by Ryser's inclusion-exclusion over column subsets,
/// visited in Gray-code order. Rows are first scaled to integers.
pub fn permanent_exact(a: &PermanentInstance) -> Weight {
    let n = a.dim();
    if n == 0 {
        return Weight::one();
    }
    let mut scale = BigInt::one();
    let mut int_rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in a.rows() {
        let l = row.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        int_rows.push(row.iter().map(|w| w.numer() * (&l / w.denom())).collect());
        scale *= l;
    }
    let bound: BigInt = int_rows
        .iter()
        .map(|r| r.iter().sum::<BigInt>())
        .product::<BigInt>()
        << n;
    let total = if bound.bits() < 126 {
        let rows: Vec<Vec<i128>> = int_rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_i128().unwrap()).collect())
            .collect();
        BigInt::from(ryser_i128(&rows))
    } else {
        ryser_big(&int_rows)
    };
    Weight::from_rational(num_rational::BigRational::new(total, scale))
        .expect("permanent of a nonnegative matrix is nonnegative")
}

fn ryser_i128(a: &[Vec<i128>]) -> i128 {
    let n = a.len();
    let mut sums = vec![0i128; n];
    let mut total: i128 = 0;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        if gray & (1 << j) != 0 {
            for (s, row) in sums.iter_mut().zip(a) {
                *s += row[j];
            }
        } else {
            for (s, row) in sums.iter_mut().zip(a) {
                *s -= row[j];
            }
        }
        let mut term: i128 = 1;
        for &s in &sums {
            term *= s;
            if term == 0 {
                break;
            }
        }
        if gray.count_ones() % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

fn ryser_big(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut sums = vec![BigInt::zero(); n];
    let mut total = BigInt::zero();
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        let add = gray & (1 << j) != 0;
        for (s, row) in sums.iter_mut().zip(a) {
            if add {
                *s += &row[j];
            } else {
                *s -= &row[j];
            }
        }
        if sums.iter().any(Zero::is_zero) {
            continue;
        }
        let term: BigInt = sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Tuning for the sampling engine.
#[derive(Clone, Debug, PartialEq)]
pub struct McmcConfig {
    /// Hard cap on chain steps per permanent call.
    pub max_steps: u64,
    /// Samples per temperature in the scheduling pass.
    pub pilot_samples: usize,
    /// Chain steps between recorded samples, per nonzero entry.
    pub thin_per_edge: usize,
    /// Multiplier applied to pilot variance estimates.
    pub variance_safety: f64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            max_steps: 400_000_000,
            pilot_samples: 256,
            thin_per_edge: 2,
            variance_safety: 2.0,
        }
    }
}

pub struct McmcOutcome {
    pub result: Result<Estimate, CountError>,
    pub steps: u64,
}

/// Approximate permanent with the default configuration.
pub fn permanent_mcmc(a: &PermanentInstance, eps: f64, seed: u64) -> Result<Estimate, CountError> {
    permanent_mcmc_with(a, eps, seed, &McmcConfig::default()).result
}

/// Monomer-dimer chain on the bipartite support of `a`, annealed in the
/// activity `beta`.
///
/// `Z(beta) = sum over matchings M of w(M) * beta^|M|`. The run starts at
/// `beta_1 = 1 / sum(w)` where `Z(beta_1) = 1 / Pr[empty]`, multiplies
/// `beta` by `1 + 1/n` per stage (each stage ratio is the mean of
/// `q^|M|`, which lies in `[1, e]`), and stops once perfect matchings carry
/// at least half the mass. Then `perm = Z(beta_f) * Pr[perfect] / beta_f^n`.
///
/// A short pilot pass fixes the schedule and per-stage variances; sample
/// sizes for the main pass are chosen so that the relative variance of the
/// product is at most `eps^2 / 4`, which by Chebyshev gives success
/// probability at least 3/4.
pub fn permanent_mcmc_with(
    a: &PermanentInstance,
    eps: f64,
    seed: u64,
    config: &McmcConfig,
) -> McmcOutcome {
    let n = a.dim();
    if n == 0 {
        return McmcOutcome {
            result: Ok(Estimate::exact(Weight::one())),
            steps: 0,
        };
    }
    if !has_perfect_matching(a) {
        return McmcOutcome {
            result: Ok(Estimate::exact(Weight::zero())),
            steps: 0,
        };
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return McmcOutcome {
            result: Err(CountError::Input(format!(
                "eps must be positive, got {eps}"
            ))),
            steps: 0,
        };
    }
    let max = a
        .rows()
        .iter()
        .flatten()
        .max()
        .cloned()
        .unwrap_or_else(Weight::one);
    let mut chain = Chain::new(a, &max, seed);
    let out = chain.run(eps, config);
    let steps = chain.steps;
    let result = out.map(|scaled| {
        let scaled = Weight::from_f64(scaled).unwrap_or_else(Weight::zero);
        Estimate {
            value: scaled * max.pow(n as u32),
            eps,
            engine: EngineKind::Mcmc,
        }
    });
    McmcOutcome { result, steps }
}

struct Chain {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    mate_l: Vec<usize>,
    mate_r: Vec<usize>,
    /// weight of the edge currently matched at each left vertex
    wl: Vec<f64>,
    size: usize,
    rng: ChaCha8Rng,
    steps: u64,
}

const NONE: usize = usize::MAX;

struct Schedule {
    beta_1: f64,
    q: f64,
    stages: usize,
    /// relative variances: empty-probability stage, ratio stages, final stage
    v_empty: f64,
    v_ratio: Vec<f64>,
    v_final: f64,
}

impl Chain {
    fn new(a: &PermanentInstance, max: &Weight, seed: u64) -> Self {
        let n = a.dim();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let w = a.get(i, j);
                if !w.is_zero() {
                    edges.push((i, j, (w / max).to_f64()));
                }
            }
        }
        Chain {
            n,
            edges,
            mate_l: vec![NONE; n],
            mate_r: vec![NONE; n],
            wl: vec![0.0; n],
            size: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            steps: 0,
        }
    }

    fn reset(&mut self) {
        self.mate_l.fill(NONE);
        self.mate_r.fill(NONE);
        self.size = 0;
    }

    fn thin(&self, config: &McmcConfig) -> u64 {
        (config.thin_per_edge * self.edges.len() + 4 * self.n) as u64
    }

    fn step(&mut self, beta: f64) {
        self.steps += 1;
        let (u, v, w) = self.edges[self.rng.gen_range(0..self.edges.len())];
        let mu = self.mate_l[u];
        let mv = self.mate_r[v];
        if mu == v {
            if beta * w <= 1.0 || self.rng.gen::<f64>() < 1.0 / (beta * w) {
                self.mate_l[u] = NONE;
                self.mate_r[v] = NONE;
                self.size -= 1;
            }
        } else if mu == NONE && mv == NONE {
            if beta * w >= 1.0 || self.rng.gen::<f64>() < beta * w {
                self.mate_l[u] = v;
                self.mate_r[v] = u;
                self.wl[u] = w;
                self.size += 1;
            }
        } else if mv == NONE {
            // u matched elsewhere: slide its edge onto v
            let old = self.wl[u];
            if w >= old || self.rng.gen::<f64>() < w / old {
                self.mate_r[mu] = NONE;
                self.mate_l[u] = v;
                self.mate_r[v] = u;
                self.wl[u] = w;
            }
        } else if mu == NONE {
            let old = self.wl[mv];
            if w >= old || self.rng.gen::<f64>() < w / old {
                self.mate_l[mv] = NONE;
                self.mate_l[u] = v;
                self.mate_r[v] = u;
                self.wl[u] = w;
            }
        }
    }

    fn advance(&mut self, beta: f64, steps: u64) {
        for _ in 0..steps {
            self.step(beta);
        }
    }

    fn sample_sizes(&mut self, beta: f64, count: usize, thin: u64) -> Vec<usize> {
        (0..count)
            .map(|_| {
                self.advance(beta, thin);
                self.size
            })
            .collect()
    }

    fn run(&mut self, eps: f64, config: &McmcConfig) -> Result<f64, CountError> {
        let schedule = self.pilot(config)?;
        let n = self.n;
        let thin = self.thin(config);

        // Neyman allocation of samples: N_i proportional to sqrt(v_i), with
        // sum(v_i / N_i) = eps^2 / 4.
        let mut vs = vec![schedule.v_empty];
        vs.extend(schedule.v_ratio.iter().copied());
        vs.push(schedule.v_final);
        let root_sum: f64 = vs.iter().map(|v| v.sqrt()).sum();
        let c = 4.0 * root_sum / (eps * eps);
        let counts: Vec<usize> = vs
            .iter()
            .map(|v| ((c * v.sqrt()).ceil() as usize).max(64))
            .collect();
        let burn = 8 * thin;
        let needed = counts
            .iter()
            .map(|&k| k as u64 * thin + burn)
            .fold(0u64, u64::saturating_add);
        if self.steps.saturating_add(needed) > config.max_steps {
            return Err(CountError::BudgetExceeded {
                budget: config.max_steps,
                needed: self.steps.saturating_add(needed),
            });
        }

        self.reset();
        let mut beta = schedule.beta_1;
        self.advance(beta, burn);
        let sizes = self.sample_sizes(beta, counts[0], thin);
        let empty = sizes.iter().filter(|&&s| s == 0).count().max(1);
        let mut log_z = (sizes.len() as f64 / empty as f64).ln();
        for stage in 0..schedule.stages {
            let sizes = self.sample_sizes(beta, counts[1 + stage], thin);
            let mean = sizes
                .iter()
                .map(|&s| schedule.q.powi(s as i32))
                .sum::<f64>()
                / sizes.len() as f64;
            log_z += mean.ln();
            beta *= schedule.q;
            self.advance(beta, burn / 4);
        }
        let sizes = self.sample_sizes(beta, *counts.last().unwrap(), thin);
        let perfect = sizes.iter().filter(|&&s| s == n).count();
        if perfect == 0 {
            return Err(CountError::BudgetExceeded {
                budget: config.max_steps,
                needed: u64::MAX,
            });
        }
        let p = perfect as f64 / sizes.len() as f64;
        Ok((log_z + p.ln() - n as f64 * beta.ln()).exp())
    }

    /// Walks the temperature schedule with short runs to fix the number
    /// of stages and estimate each stage's relative variance.
    fn pilot(&mut self, config: &McmcConfig) -> Result<Schedule, CountError> {
        let n = self.n;
        let thin = self.thin(config);
        let total: f64 = self.edges.iter().map(|e| e.2).sum();
        let beta_1 = 1.0 / total;
        let q = 1.0 + 1.0 / n as f64;
        let pilot = config.pilot_samples.max(16);
        let safety = config.variance_safety;
        let floor = 1.0 / pilot as f64;

        self.reset();
        let mut beta = beta_1;
        self.advance(beta, 8 * thin);
        let sizes = self.sample_sizes(beta, pilot, thin);
        let p0 = sizes.iter().filter(|&&s| s == 0).count() as f64 / pilot as f64;
        let p0 = p0.max(floor);
        let v_empty = safety * (1.0 - p0) / p0;

        let mut v_ratio = Vec::new();
        let mut sizes = sizes;
        loop {
            let pf = sizes.iter().filter(|&&s| s == n).count() as f64 / pilot as f64;
            if pf >= 0.5 {
                let v_final = safety * ((1.0 - pf) / pf).max(floor);
                return Ok(Schedule {
                    beta_1,
                    q,
                    stages: v_ratio.len(),
                    v_empty,
                    v_ratio,
                    v_final,
                });
            }
            let xs: Vec<f64> = sizes.iter().map(|&s| q.powi(s as i32)).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
            v_ratio.push(safety * (var / (mean * mean)).max(floor * 1e-2));
            beta *= q;
            if self.steps > config.max_steps {
                return Err(CountError::BudgetExceeded {
                    budget: config.max_steps,
                    needed: self.steps,
                });
            }
            self.advance(beta, 2 * thin);
            sizes = self.sample_sizes(beta, pilot, thin);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u64) -> Weight {
        (1..=n).map(Weight::from_integer).product()
    }

    #[test]
    fn small_exact_values() {
        assert_eq!(
            permanent_exact(&PermanentInstance::ones(3)),
            Weight::from(6)
        );
        assert_eq!(
            permanent_exact(&PermanentInstance::identity(4)),
            Weight::one()
        );
        let a = PermanentInstance::new(vec![
            vec![Weight::from(1), Weight::from(2)],
            vec![Weight::from(3), Weight::from(4)],
        ])
        .unwrap();
        assert_eq!(permanent_exact(&a), Weight::from(10));
        assert_eq!(permanent_exact(&PermanentInstance::ones(0)), Weight::one());
    }

    #[test]
    fn all_ones_is_factorial_up_to_twelve() {
        for n in 1..=12 {
            assert_eq!(
                permanent_exact(&PermanentInstance::ones(n)),
                factorial(n as u64),
                "n = {n}"
            );
        }
    }

    #[test]
    fn rational_entries_are_scaled_back() {
        let a = PermanentInstance::new(vec![
            vec![Weight::ratio(1, 2), Weight::ratio(1, 3)],
            vec![Weight::ratio(1, 5), Weight::ratio(1, 7)],
        ])
        .unwrap();
        let expected = Weight::ratio(1, 14) + Weight::ratio(1, 15);
        assert_eq!(permanent_exact(&a), expected);
    }

    #[test]
    fn huge_entries_take_the_bignum_path() {
        let big = Weight::from_integer(10).pow(30);
        let a = PermanentInstance::from_fn(3, |_, _| big.clone());
        assert_eq!(permanent_exact(&a), Weight::from(6) * big.pow(3));
    }

    #[test]
    fn rejects_non_square() {
        assert!(PermanentInstance::new(vec![vec![Weight::one(); 2]]).is_err());
    }

    #[test]
    fn perfect_matching_check() {
        assert!(has_perfect_matching(&PermanentInstance::identity(3)));
        let mut rows = PermanentInstance::ones(3).rows().to_vec();
        rows[0] = vec![Weight::zero(); 3];
        assert!(!has_perfect_matching(
            &PermanentInstance::new(rows).unwrap()
        ));
    }

    #[test]
    fn mcmc_zero_permanent_is_exact_zero() {
        let a = PermanentInstance::from_fn(3, |i, _| {
            if i == 0 {
                Weight::zero()
            } else {
                Weight::one()
            }
        });
        let e = permanent_mcmc(&a, 0.1, 1).unwrap();
        assert!(e.value.is_zero());
        assert!(e.is_exact());
    }

    #[test]
    fn mcmc_close_on_small_instances() {
        let e = permanent_mcmc(&PermanentInstance::ones(4), 0.1, 3).unwrap();
        assert!(
            e.value.relative_error(&Weight::from(24)) < 0.1,
            "{}",
            e.value.to_f64()
        );
        let e = permanent_mcmc(&PermanentInstance::identity(5), 0.1, 3).unwrap();
        assert!(
            e.value.relative_error(&Weight::one()) < 0.1,
            "{}",
            e.value.to_f64()
        );
    }

    #[test]
    fn mcmc_is_deterministic_per_seed() {
        let a = PermanentInstance::ones(4);
        assert_eq!(permanent_mcmc(&a, 0.2, 9), permanent_mcmc(&a, 0.2, 9));
    }

    #[test]
    fn mcmc_reports_budget_overrun() {
        let config = McmcConfig {
            max_steps: 10_000,
            ..McmcConfig::default()
        };
        let out = permanent_mcmc_with(&PermanentInstance::ones(5), 1e-4, 1, &config);
        assert!(matches!(out.result, Err(CountError::BudgetExceeded { .. })));
    }
}
