use rand::Rng;

use crate::error::{Error, Result};
use crate::glm::sigmoid;
use crate::rng::RngSeed;

use super::{conditional_logit, IsingParams, SampleMatrix};

/// Full sweeps discarded before recording.
pub const DEFAULT_BURN_IN: usize = 200;
/// Sweeps between recorded states.
pub const DEFAULT_THIN: usize = 5;

/// Single-site Gibbs sampler with sequential sweeps over `0..p`, started
/// from independent fair signs.
pub fn gibbs_sample(
    params: &IsingParams,
    n: usize,
    burn_in: usize,
    thin: usize,
    seed: RngSeed,
) -> Result<SampleMatrix> {
    if n == 0 {
        return Err(Error::invalid("gibbs_sample needs n >= 1"));
    }
    if thin == 0 {
        return Err(Error::invalid("gibbs_sample needs thin >= 1"));
    }
    let p = params.p();
    let mut rng = seed.rng();
    let mut z: Vec<i8> = (0..p).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    let sweep = |z: &mut Vec<i8>, rng: &mut rand_chacha::ChaCha8Rng| {
        for v in 0..p {
            let prob_plus = sigmoid(conditional_logit(params, v, z));
            z[v] = if rng.random::<f64>() < prob_plus { 1 } else { -1 };
        }
    };
    for _ in 0..burn_in {
        sweep(&mut z, &mut rng);
    }
    let mut values = Vec::with_capacity(n * p);
    for _ in 0..n {
        for _ in 0..thin {
            sweep(&mut z, &mut rng);
        }
        values.extend_from_slice(&z);
    }
    SampleMatrix::new(n, p, values)
}
