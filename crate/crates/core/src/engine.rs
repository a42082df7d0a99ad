//! Permanent engines and per-run bookkeeping.

use std::cell::{Cell, RefCell};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CountError;
use crate::permanent::{self, McmcConfig, PermanentInstance};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Exact,
    Mcmc,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineKind::Exact => f.write_str("exact"),
            EngineKind::Mcmc => f.write_str("mcmc"),
        }
    }
}

impl FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(EngineKind::Exact),
            "mcmc" => Ok(EngineKind::Mcmc),
            _ => Err(format!("unknown engine {s:?}")),
        }
    }
}

/// A computed quantity together with its relative error bound.
///
/// Exact results carry `eps == 0`. Sampled results promise
/// `|value / truth - 1| <= eps` with probability at least 3/4.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: Weight,
    pub eps: f64,
    pub engine: EngineKind,
}

impl Estimate {
    pub fn exact(value: Weight) -> Self {
        Estimate {
            value,
            eps: 0.0,
            engine: EngineKind::Exact,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.engine == EngineKind::Exact
    }

    /// Wraps a value assembled from `parts`; approximate if any part was.
    pub(crate) fn combine<'a>(
        value: Weight,
        eps: f64,
        parts: impl IntoIterator<Item = &'a Estimate>,
    ) -> Self {
        if parts.into_iter().all(Estimate::is_exact) {
            Estimate::exact(value)
        } else {
            Estimate {
                value,
                eps,
                engine: EngineKind::Mcmc,
            }
        }
    }
}

/// Counters describing what a pipeline run did.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub components: u64,
    pub cutset_atoms: u64,
    pub small_alpha_atoms: u64,
    pub elementary_atoms: u64,
    pub augments_replaced: u64,
    pub prime_leaves: u64,
    pub partition_terms: u64,
    pub permanent_exact: u64,
    pub permanent_mcmc: u64,
    pub permanent_trivial: u64,
    pub mcmc_steps: u64,
}

/// Configuration plus mutable bookkeeping for a single counting run.
///
/// Sampling seeds are derived from the root seed and a call counter, so a
/// run is reproducible as long as the sequence of engine calls is.
#[derive(Debug)]
pub struct Engine {
    kind: EngineKind,
    seed: u64,
    exact_cap: usize,
    mcmc: McmcConfig,
    calls: Cell<u64>,
    trace: RefCell<Trace>,
}

pub const DEFAULT_EXACT_CAP: usize = 22;

impl Engine {
    pub fn new(kind: EngineKind, seed: u64) -> Self {
        Engine {
            kind,
            seed,
            exact_cap: DEFAULT_EXACT_CAP,
            mcmc: McmcConfig::default(),
            calls: Cell::new(0),
            trace: RefCell::new(Trace::default()),
        }
    }

    pub fn exact() -> Self {
        Engine::new(EngineKind::Exact, 0)
    }

    pub fn mcmc(seed: u64) -> Self {
        Engine::new(EngineKind::Mcmc, seed)
    }

    pub fn with_exact_cap(mut self, cap: usize) -> Self {
        self.exact_cap = cap;
        self
    }

    pub fn with_mcmc_config(mut self, config: McmcConfig) -> Self {
        self.mcmc = config;
        self
    }

    pub fn kind(&self) -> EngineKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trace(&self) -> Trace {
        self.trace.borrow().clone()
    }

    pub(crate) fn record(&self, f: impl FnOnce(&mut Trace)) {
        f(&mut self.trace.borrow_mut());
    }

    fn next_seed(&self) -> u64 {
        let i = self.calls.get();
        self.calls.set(i + 1);
        // splitmix64 of the call index, mixed into the root seed
        let mut z = i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        self.seed ^ z ^ (z >> 31)
    }

    /// Permanent of `a` to relative accuracy `eps`.
    ///
    /// Zero permanents and dimension <= 1 are always answered exactly. The
    /// exact engine falls back to sampling above its size cap.
    pub fn permanent(&self, a: &PermanentInstance, eps: f64) -> Result<Estimate, CountError> {
        if a.dim() <= 1 || !permanent::has_perfect_matching(a) {
            self.record(|t| t.permanent_trivial += 1);
            let value = if a.dim() == 0 {
                Weight::one()
            } else if a.dim() == 1 {
                a.get(0, 0).clone()
            } else {
                Weight::zero()
            };
            return Ok(Estimate::exact(value));
        }
        if self.kind == EngineKind::Exact && a.dim() <= self.exact_cap {
            self.record(|t| t.permanent_exact += 1);
            return Ok(Estimate::exact(permanent::permanent_exact(a)));
        }
        let seed = self.next_seed();
        let out = permanent::permanent_mcmc_with(a, eps, seed, &self.mcmc);
        self.record(|t| {
            t.permanent_mcmc += 1;
            t.mcmc_steps += out.steps;
        });
        out.result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_per_call_and_repeat_per_engine() {
        let a = Engine::mcmc(7);
        let b = Engine::mcmc(7);
        let xs: Vec<u64> = (0..4).map(|_| a.next_seed()).collect();
        let ys: Vec<u64> = (0..4).map(|_| b.next_seed()).collect();
        assert_eq!(xs, ys);
        assert!(xs.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn combine_is_exact_only_if_all_parts_are() {
        let e = Estimate::exact(Weight::one());
        let m = Estimate {
            value: Weight::one(),
            eps: 0.1,
            engine: EngineKind::Mcmc,
        };
        assert!(Estimate::combine(Weight::one(), 0.2, [&e, &e]).is_exact());
        let c = Estimate::combine(Weight::one(), 0.2, [&e, &m]);
        assert_eq!(c.engine, EngineKind::Mcmc);
        assert_eq!(c.eps, 0.2);
    }

    #[test]
    fn engine_kind_parses() {
        assert_eq!("mcmc".parse::<EngineKind>(), Ok(EngineKind::Mcmc));
        assert!("fast".parse::<EngineKind>().is_err());
    }
}
