//! Parallel trial loop with schedule-independent aggregation.
//!
//! Trial `t` of a campaign with seed `s` draws everything from seed `s ^ t`.
//! Per-property statistics are merged with max, min and integer counts, and
//! ties are broken by the smaller trial index, so the result does not depend
//! on how trials are split across threads.

use rayon::prelude::*;
use serde_json::Value;

use cayley_core::rng::trial_seed;

use crate::report::{PropertyResult, Witness};

/// Pass rule for one property.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    /// Pass iff the largest value is at most the bound.
    AtMost(f64),
    /// Pass iff the smallest value is at least the bound.
    AtLeast(f64),
    /// Each value is a hit indicator; pass iff there are no hits. `worst` is
    /// the number of hits and the witness is the first hit.
    Count,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertySpec {
    pub name: String,
    pub kind: Kind,
}

impl PropertySpec {
    pub fn at_most(name: &str, bound: f64) -> Self {
        Self { name: name.into(), kind: Kind::AtMost(bound) }
    }

    pub fn at_least(name: &str, bound: f64) -> Self {
        Self { name: name.into(), kind: Kind::AtLeast(bound) }
    }

    pub fn count(name: &str) -> Self {
        Self { name: name.into(), kind: Kind::Count }
    }
}

/// Metrics of one trial, aligned with the campaign's property list. `None`
/// means the property was not evaluated in this trial; NaN counts as the
/// worst possible value.
#[derive(Debug, Clone, Default)]
pub struct TrialOutcome {
    pub metrics: Vec<Option<f64>>,
    pub bin: Option<usize>,
}

impl TrialOutcome {
    pub fn new(metrics: Vec<Option<f64>>) -> Self {
        Self { metrics, bin: None }
    }

    /// Every metric NaN: the trial could not be evaluated.
    pub fn failed(len: usize) -> Self {
        Self::new(vec![Some(f64::NAN); len])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Extreme {
    value: f64,
    trial: u64,
}

#[derive(Debug, Clone, PartialEq)]
struct Acc {
    extreme: Option<Extreme>,
    hits: u64,
}

/// Aggregated statistics of a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    accs: Vec<Acc>,
    pub histogram: Vec<u64>,
}

fn better(kind: Kind, a: Extreme, b: Extreme) -> Extreme {
    let wins = match kind {
        Kind::AtMost(_) => b.value > a.value,
        Kind::AtLeast(_) | Kind::Count => b.value < a.value,
    };
    if wins || (b.value == a.value && b.trial < a.trial) {
        b
    } else {
        a
    }
}

impl Aggregate {
    /// Hits of a [`Kind::Count`] property.
    pub fn hits(&self, property: usize) -> u64 {
        self.accs.get(property).map_or(0, |a| a.hits)
    }

    fn empty(props: usize, bins: usize) -> Self {
        Self {
            accs: vec![Acc { extreme: None, hits: 0 }; props],
            histogram: vec![0; bins],
        }
    }

    fn push(mut self, specs: &[PropertySpec], trial: u64, out: TrialOutcome) -> Self {
        for ((acc, spec), m) in self.accs.iter_mut().zip(specs).zip(out.metrics) {
            let Some(v) = m else { continue };
            let value = match spec.kind {
                Kind::AtMost(_) if v.is_nan() => f64::INFINITY,
                Kind::AtLeast(_) if v.is_nan() => f64::NEG_INFINITY,
                Kind::Count => {
                    let hit = v.is_nan() || v != 0.0;
                    acc.hits += u64::from(hit);
                    if hit { 0.0 } else { 1.0 }
                }
                _ => v,
            };
            let e = Extreme { value, trial };
            acc.extreme = Some(match acc.extreme {
                None => e,
                Some(a) => better(spec.kind, a, e),
            });
        }
        if let Some(b) = out.bin {
            if let Some(slot) = self.histogram.get_mut(b) {
                *slot += 1;
            }
        }
        self
    }

    fn merge(mut self, other: Self, specs: &[PropertySpec]) -> Self {
        for ((a, b), spec) in self.accs.iter_mut().zip(other.accs).zip(specs) {
            a.hits += b.hits;
            a.extreme = match (a.extreme, b.extreme) {
                (None, x) | (x, None) => x,
                (Some(x), Some(y)) => Some(better(spec.kind, x, y)),
            };
        }
        for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
            *a += b;
        }
        self
    }
}

/// Runs `trials` trials of `trial(t, seed ^ t)` on the current rayon pool.
pub fn run_trials<F>(specs: &[PropertySpec], bins: usize, seed: u64, trials: u64, trial: F) -> Aggregate
where
    F: Fn(u64, u64) -> TrialOutcome + Sync,
{
    let n = specs.len();
    (0..trials)
        .into_par_iter()
        .fold(
            || Aggregate::empty(n, bins),
            |acc, t| acc.push(specs, t, trial(t, trial_seed(seed, t))),
        )
        .reduce(|| Aggregate::empty(n, bins), |a, b| a.merge(b, specs))
}

/// Report values must be finite JSON numbers; infinities from failed trials
/// become the extreme finite doubles.
fn finite(v: f64) -> f64 {
    if v == f64::INFINITY {
        f64::MAX
    } else if v == f64::NEG_INFINITY {
        f64::MIN
    } else {
        v
    }
}

/// Turns an aggregate into report rows. `detail(i, seed)` may attach
/// reproduction data to the witness of property `i`.
pub fn finish<D>(specs: &[PropertySpec], agg: &Aggregate, seed: u64, detail: D) -> Vec<PropertyResult>
where
    D: Fn(usize, u64) -> Option<Value>,
{
    specs
        .iter()
        .zip(&agg.accs)
        .enumerate()
        .map(|(i, (spec, acc))| {
            let witness_trial = match spec.kind {
                Kind::Count if acc.hits == 0 => None,
                _ => acc.extreme.map(|e| e.trial),
            };
            let (worst, pass) = match (spec.kind, acc.extreme) {
                (_, None) => (None, true),
                (Kind::Count, Some(_)) => (Some(acc.hits as f64), acc.hits == 0),
                (Kind::AtMost(b), Some(e)) => (Some(finite(e.value)), e.value <= b),
                (Kind::AtLeast(b), Some(e)) => (Some(finite(e.value)), e.value >= b),
            };
            let witness = witness_trial.map(|t| {
                let s = trial_seed(seed, t);
                Witness { trial: t, seed: s, detail: detail(i, s) }
            });
            PropertyResult { name: spec.name.clone(), pass, worst, witness }
        })
        .collect()
}
