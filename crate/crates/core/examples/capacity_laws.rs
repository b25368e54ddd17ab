//! Sample capacities from each law and compare empirical and exact means.

use percoflow::capacity::{atom_at_zero, fixed_to_f64, has_exponential_moment, sample_edges, CapacityLaw};

fn main() {
    let laws = [
        CapacityLaw::Constant { c: 1.0 },
        CapacityLaw::Bernoulli { p: 0.6, hi: 2.0 },
        CapacityLaw::Uniform { a: 0.0, b: 1.0 },
        CapacityLaw::Exponential { rate: 2.0 },
        CapacityLaw::Discrete {
            values: vec![0.0, 0.5, 3.0],
            probs: vec![0.2, 0.5, 0.3],
        },
    ];
    for law in &laws {
        let caps = sample_edges(law, 100_000, 1);
        let mean = caps.values.iter().map(|&v| fixed_to_f64(v)).sum::<f64>() / caps.len() as f64;
        println!(
            "{:<60} mean {:.4} (exact {:.4}), P(0) = {:.2}, exp. moment: {}",
            serde_json::to_string(law).unwrap(),
            mean,
            law.mean(),
            atom_at_zero(law),
            has_exponential_moment(law)
        );
    }
}
