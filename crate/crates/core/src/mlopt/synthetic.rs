//! Seeded two-cluster dataset for exercising the forest.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::dataset::{Dataset, DatasetRow};
use super::Schema;

pub const EVENTS: [&str; 10] =
    ["br_miss", "l1d_miss", "l2_miss", "l3_miss", "dtlb_miss", "fp_scalar", "fp_vector", "loads", "stores", "stalls"];
pub const BACKENDS: [&str; 5] = ["clang", "gcc", "icc", "pgcc", "polly"];

/// Features informative of the class; the rest are shared noise.
const INFORMATIVE: usize = 4;

/// `n` rows in two clusters. Cluster membership decides whether icc or
/// polly is the fastest target; about a fifth of the rows have pgcc
/// fastest overall, so their labels come from relabeling.
pub fn generate(seed: u64, n: usize, prefix: &str) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0f64, 1.0).expect("valid sigma");
    let jitter = Normal::new(0.0f64, 20_000.0).expect("valid sigma");
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let polly_wins = rng.gen_bool(0.5);
        let features = (0..EVENTS.len())
            .map(|f| {
                let centre: f64 = if f >= INFORMATIVE {
                    3.0
                } else if polly_wins {
                    4.5
                } else {
                    1.5
                };
                let v: f64 = (centre + noise.sample(&mut rng)).max(0.0);
                (v * 1e6).round() / 1e6
            })
            .collect();
        let base = 1_000_000.0 + jitter.sample(&mut rng).abs();
        let (icc, polly) = if polly_wins { (base, base * 0.8) } else { (base * 0.8, base) };
        let pgcc = if rng.gen_bool(0.2) { base * 0.7 } else { base * 1.3 };
        let times = [("clang", base * 1.2), ("gcc", base * 1.1), ("icc", icc), ("pgcc", pgcc), ("polly", polly)]
            .into_iter()
            .map(|(b, t)| (b.to_string(), t.round() as u64))
            .collect();
        rows.push(DatasetRow { loop_id: format!("{prefix}{i:03}"), features, times });
    }
    Dataset { schema: Schema::new(&EVENTS), backends: BACKENDS.iter().map(|b| b.to_string()).collect(), rows }
}
