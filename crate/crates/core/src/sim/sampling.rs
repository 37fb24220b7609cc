use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::circuit::BitRoles;
use super::simulate::{joint_from_weights, target_given_control, OutcomeDistribution};
use crate::error::{Error, Result};

/// Shots handled per parallel work item. Counts do not depend on this value.
pub const DEFAULT_CHUNK: u64 = 8192;

/// ChaCha stream reserved for shot sampling.
const SHOT_STREAM: u64 = 0x53_484f_5453;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
    pub bit_roles: Option<BitRoles>,
    pub shots: u64,
    pub seed: u64,
}

impl Counts {
    pub fn empirical(&self) -> Result<OutcomeDistribution> {
        let n = self.shots as f64;
        OutcomeDistribution::new(
            self.labels.clone(),
            self.counts.iter().map(|&c| c as f64 / n).collect(),
            self.bit_roles,
        )
    }

    pub fn joint_control_target(&self) -> Result<[[u64; 2]; 2]> {
        let roles = self
            .bit_roles
            .ok_or_else(|| Error::InvalidArgument("counts have no bit roles".into()))?;
        let w: Vec<f64> = self.counts.iter().map(|&c| c as f64).collect();
        Ok(joint_from_weights(&self.labels, &w, roles)?.map(|r| r.map(|x| x as u64)))
    }

    /// `P(t | c)` from counts; `None` for control values never observed.
    pub fn conditional(&self) -> Result<[Option<[f64; 2]>; 2]> {
        let j = self.joint_control_target()?;
        Ok(target_given_control(&j.map(|r| r.map(|x| x as f64))))
    }
}

/// Uniform in `[0, 1)` for shot `index`: the ChaCha20 keystream word pair at position `2·index`.
fn shot_uniforms(seed: u64, start: u64, len: u64) -> impl Iterator<Item = f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(SHOT_STREAM);
    rng.set_word_pos(2 * start as u128);
    (0..len).map(move |_| (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
}

fn inverse_cdf(cdf: &[f64], last_nonzero: usize, u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(last_nonzero)
}

/// Multinomial sample with chunk size `chunk`; every shot draws from its own counter position,
/// so the result is a function of `(d, shots, seed)` alone.
pub fn sample_shots_chunked(
    d: &OutcomeDistribution,
    shots: u64,
    seed: u64,
    chunk: u64,
) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let chunk = chunk.max(1);
    let mut acc = 0.0;
    let cdf: Vec<f64> = d
        .probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    let last_nonzero = d.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let n_chunks = shots.div_ceil(chunk);
    let k = d.labels.len();
    let counts = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let start = ci * chunk;
            let len = chunk.min(shots - start);
            let mut local = vec![0u64; k];
            for u in shot_uniforms(seed, start, len) {
                local[inverse_cdf(&cdf, last_nonzero, u)] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(Counts {
        labels: d.labels.clone(),
        counts,
        bit_roles: d.bit_roles,
        shots,
        seed,
    })
}

pub fn sample_shots(d: &OutcomeDistribution, shots: u64, seed: u64) -> Result<Counts> {
    sample_shots_chunked(d, shots, seed, DEFAULT_CHUNK)
}
