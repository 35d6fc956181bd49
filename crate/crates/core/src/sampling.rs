use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut SampleRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn uniform_vec(rng: &mut SampleRng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| uniform(rng, lo, hi)).collect()
}

pub fn log_uniform(rng: &mut SampleRng, lo: f64, hi: f64) -> f64 {
    uniform(rng, lo.ln(), hi.ln()).exp()
}
