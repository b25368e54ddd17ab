//! Capacity laws and reproducible i.i.d. edge capacities.
//!
//! Capacities are fixed-point integers with [`CAP_SCALE`] units per capacity
//! unit so that flow values and cut capacities compare exactly.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::lattice::Lattice;

/// Fixed-point capacity.
pub type Fixed = i64;

/// Fixed-point units per capacity unit.
pub const CAP_SCALE: Fixed = 1 << 20;

/// Largest representable single-edge capacity, in capacity units. Samples
/// above it saturate.
pub const MAX_CAPACITY: f64 = (1u64 << 31) as f64;

/// Quantizes to the fixed-point grid, rounding half to even.
pub fn to_fixed(x: f64) -> Fixed {
    (x.min(MAX_CAPACITY) * CAP_SCALE as f64).round_ties_even() as Fixed
}

pub fn fixed_to_f64(v: Fixed) -> f64 {
    v as f64 / CAP_SCALE as f64
}

/// Common law of the i.i.d. edge capacities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CapacityLaw {
    Constant { c: f64 },
    /// `P(t = hi) = p`, `P(t = 0) = 1 − p`.
    Bernoulli { p: f64, hi: f64 },
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

impl CapacityLaw {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let law: CapacityLaw = serde_json::from_str(s)?;
        law.validate()?;
        Ok(law)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let value_ok = |v: f64| v.is_finite() && (0.0..=MAX_CAPACITY).contains(&v);
        match self {
            CapacityLaw::Constant { c } if !value_ok(*c) => {
                Err(config(format!("constant capacity {c} out of range")))
            }
            CapacityLaw::Bernoulli { p, hi } if !(0.0..=1.0).contains(p) || !value_ok(*hi) => {
                Err(config(format!("invalid bernoulli law p={p} hi={hi}")))
            }
            CapacityLaw::Uniform { a, b } if !value_ok(*a) || !value_ok(*b) || a > b => {
                Err(config(format!("invalid uniform law on [{a}, {b}]")))
            }
            CapacityLaw::Exponential { rate } if !(rate.is_finite() && *rate > 0.0) => {
                Err(config(format!("exponential rate must be positive, got {rate}")))
            }
            CapacityLaw::Discrete { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return Err(config("discrete law needs matching nonempty values and probs"));
                }
                if values.iter().any(|&v| !value_ok(v)) {
                    return Err(config("discrete law values must be nonnegative"));
                }
                if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                    return Err(config("discrete law probabilities must lie in [0, 1]"));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(config(format!("discrete law probabilities sum to {total}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The law scaled by `factor ≥ 0`.
    pub fn scaled(&self, factor: f64) -> CapacityLaw {
        match self {
            CapacityLaw::Constant { c } => CapacityLaw::Constant { c: c * factor },
            CapacityLaw::Bernoulli { p, hi } => CapacityLaw::Bernoulli {
                p: *p,
                hi: hi * factor,
            },
            CapacityLaw::Uniform { a, b } => CapacityLaw::Uniform {
                a: a * factor,
                b: b * factor,
            },
            CapacityLaw::Exponential { rate } => CapacityLaw::Exponential {
                rate: rate / factor,
            },
            CapacityLaw::Discrete { values, probs } => CapacityLaw::Discrete {
                values: values.iter().map(|v| v * factor).collect(),
                probs: probs.clone(),
            },
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            CapacityLaw::Constant { c } => *c,
            CapacityLaw::Bernoulli { p, hi } => p * hi,
            CapacityLaw::Uniform { a, b } => 0.5 * (a + b),
            CapacityLaw::Exponential { rate } => 1.0 / rate,
            CapacityLaw::Discrete { values, probs } => {
                values.iter().zip(probs).map(|(v, p)| v * p).sum()
            }
        }
    }

    /// Draws one capacity (in capacity units, before quantization).
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            CapacityLaw::Constant { c } => *c,
            CapacityLaw::Bernoulli { p, hi } => {
                if rng.random::<f64>() < *p {
                    *hi
                } else {
                    0.0
                }
            }
            CapacityLaw::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            CapacityLaw::Exponential { rate } => Exp::new(*rate)
                .expect("validated rate")
                .sample(rng),
            CapacityLaw::Discrete { values, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                *values.last().expect("validated nonempty")
            }
        }
    }
}

/// `Λ({0})`, the probability that an edge has capacity zero.
pub fn atom_at_zero(law: &CapacityLaw) -> f64 {
    match law {
        CapacityLaw::Constant { c } => f64::from(*c == 0.0),
        CapacityLaw::Bernoulli { p, hi } => {
            if *hi == 0.0 {
                1.0
            } else {
                1.0 - p
            }
        }
        CapacityLaw::Uniform { a, b } => f64::from(*a == 0.0 && *b == 0.0),
        CapacityLaw::Exponential { .. } => 0.0,
        CapacityLaw::Discrete { values, probs } => values
            .iter()
            .zip(probs)
            .filter(|(v, _)| **v == 0.0)
            .map(|(_, p)| p)
            .sum(),
    }
}

/// Whether `∫ e^{θx} dΛ(x) < ∞` for some `θ > 0`.
pub fn has_exponential_moment(law: &CapacityLaw) -> bool {
    match law {
        // bounded support
        CapacityLaw::Constant { .. }
        | CapacityLaw::Bernoulli { .. }
        | CapacityLaw::Uniform { .. }
        | CapacityLaw::Discrete { .. } => true,
        // any θ < rate
        CapacityLaw::Exponential { .. } => true,
    }
}

/// One sampled capacity per lattice edge, in canonical edge order.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacityAssignment {
    pub law: CapacityLaw,
    pub seed: u64,
    pub values: Vec<Fixed>,
}

impl CapacityAssignment {
    /// Capacities given directly, e.g. hand-built test instances.
    pub fn from_values(values: Vec<Fixed>) -> Self {
        Self {
            law: CapacityLaw::Constant { c: 0.0 },
            seed: 0,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, edge: usize) -> Option<Fixed> {
        self.values.get(edge).copied()
    }

    /// Every capacity multiplied by an integer factor.
    pub fn scaled(&self, factor: Fixed) -> Self {
        Self {
            law: self.law.scaled(factor as f64),
            seed: self.seed,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn total(&self) -> Option<Fixed> {
        self.values.iter().try_fold(0 as Fixed, |acc, &v| acc.checked_add(v))
    }
}

/// Counter-based capacity of edge `index`: the generator is keyed by `seed`
/// and positioned on stream `index`, so the value depends on nothing else.
pub fn edge_value(law: &CapacityLaw, seed: u64, index: u64) -> Fixed {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    to_fixed(law.draw(&mut rng))
}

pub fn sample_edges(law: &CapacityLaw, num_edges: usize, seed: u64) -> CapacityAssignment {
    let base = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..num_edges as u64)
        .map(|i| {
            let mut rng = base.clone();
            rng.set_stream(i);
            to_fixed(law.draw(&mut rng))
        })
        .collect();
    CapacityAssignment {
        law: law.clone(),
        seed,
        values,
    }
}

/// Samples `t(e)` for every edge of `lattice`.
pub fn sample(law: &CapacityLaw, lattice: &Lattice, seed: u64) -> CapacityAssignment {
    sample_edges(law, lattice.num_edges(), seed)
}

/// Critical bond-percolation parameters `p_c(d)`, looked up by dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcTable(pub BTreeMap<usize, f64>);

impl Default for PcTable {
    /// `p_c(2) = 1/2` exactly; `p_c(3) ≈ 0.2488` from numerical estimates.
    fn default() -> Self {
        PcTable(BTreeMap::from([(2, 0.5), (3, 0.2488)]))
    }
}

impl PcTable {
    pub fn get(&self, d: usize) -> Result<f64> {
        self.0
            .get(&d)
            .copied()
            .ok_or_else(|| config(format!("no critical parameter p_c({d}) configured")))
    }
}
