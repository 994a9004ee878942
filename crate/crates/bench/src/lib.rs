//! Fixtures shared by the benchmarks.

use mixpop_core::population::SpecSampler;
use mixpop_core::PopulationSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The 42-agent reference population with nine types.
pub fn reference_spec() -> PopulationSpec {
    PopulationSpec::from_integers(
        &[(18, 4), (9, 3), (8, 1), (7, 3)],
        &[(5, 3), (10, 2), (14, 10), (19, 1), (25, 15)],
    )
    .expect("reference spec is valid")
}

/// `count` small random populations drawn from one seed.
pub fn sampled_specs(count: usize, seed: u64) -> Vec<PopulationSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = SpecSampler::default();
    (0..count).map(|_| sampler.sample(&mut rng)).collect()
}
