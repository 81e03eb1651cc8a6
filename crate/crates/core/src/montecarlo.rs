//! Seeded Monte-Carlo estimators.
//!
//! Sample `i` of an estimate with seed `s` draws from its own generator,
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `i`, so the value of each
//! sample does not depend on which thread computes it. Samples are collected
//! in index order and reduced with a fixed pairwise tree; the mean is
//! therefore bit-identical for any number of worker threads.

use nalgebra::Matrix2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_parallel_in_place, TransitionAmplitude};
use crate::classes::sample_class_state;
use crate::entanglement::{concurrence_pure_2q, MeasureSet};
use crate::fidelity::{clamp_unit, class_fixed_entanglement_fidelity, ClassTag, SingleQubitAvgFidelity};
use crate::qstate::{check_cap, PureState};
use crate::{Error, Result, C64};

/// Floor on the standard error when converting a difference into sigmas.
pub const SIGMA_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Estimate {
    /// Mean and standard error (sample standard deviation over `√n`, zero for
    /// a single sample) of values in index order.
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::Domain("an estimate needs at least one sample".into()));
        }
        let mean = pairwise_sum(values) / n as f64;
        let std_error = if n > 1 {
            let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
            (pairwise_sum(&sq) / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std_error,
            samples: n,
            seed,
        })
    }

    /// `|mean - target| / max(std_error, 1e-12)`.
    pub fn sigma_distance(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.std_error.max(SIGMA_FLOOR)
    }

    /// Distance between two independent estimates in combined standard errors.
    pub fn sigma_distance_to(&self, other: &Estimate) -> f64 {
        let se = (self.std_error.powi(2) + other.std_error.powi(2)).sqrt();
        (self.mean - other.mean).abs() / se.max(SIGMA_FLOOR)
    }
}

/// Sum in a fixed binary tree over the slice; depends only on the values and
/// their order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        values.iter().sum()
    } else {
        let (a, b) = values.split_at(values.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Mixes a label into a base seed (FNV-1a of the label, then SplitMix64).
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for sample `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Evaluates `sample` for indices `0..samples` in parallel and reduces the
/// results deterministically.
pub fn parallel_estimate<F>(samples: usize, seed: u64, sample: F) -> Result<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let [e] = parallel_estimates(samples, seed, |rng| Ok([sample(rng)?]))?;
    Ok(e)
}

/// As [`parallel_estimate`] for `K` quantities computed from the same draws.
pub fn parallel_estimates<const K: usize, F>(samples: usize, seed: u64, sample: F) -> Result<[Estimate; K]>
where
    F: Fn(&mut ChaCha8Rng) -> Result<[f64; K]> + Sync,
{
    if samples == 0 {
        return Err(Error::Domain("samples must be at least 1".into()));
    }
    let rows: Vec<[f64; K]> = (0..samples as u64)
        .into_par_iter()
        .map(|i| sample(&mut substream(seed, i)))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(K);
    for k in 0..K {
        let column: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        out.push(Estimate::from_values(&column, seed)?);
    }
    Ok(out.try_into().expect("one estimate per quantity"))
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random 2×2 unitary: Gram-Schmidt on a complex Ginibre matrix, which
/// leaves the triangular factor with a positive diagonal.
pub fn haar_unitary_2(rng: &mut ChaCha8Rng) -> Matrix2<C64> {
    loop {
        let (a0, a1, b0, b1) = (gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng));
        let na = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if na < 1e-300 {
            continue;
        }
        let (u0, u1) = (a0 / na, a1 / na);
        let proj = u0.conj() * b0 + u1.conj() * b1;
        let (w0, w1) = (b0 - proj * u0, b1 - proj * u1);
        let nw = (w0.norm_sqr() + w1.norm_sqr()).sqrt();
        if nw < 1e-300 {
            continue;
        }
        return Matrix2::new(u0, w0 / nw, u1, w1 / nw);
    }
}

/// Haar-random `n`-qubit pure state (normalized complex Gaussian vector).
pub fn haar_pure_state(n_qubits: usize, rng: &mut ChaCha8Rng) -> Result<PureState> {
    if n_qubits == 0 {
        return Err(Error::Domain("a state needs at least one qubit".into()));
    }
    check_cap(n_qubits)?;
    loop {
        let amps: Vec<C64> = (0..1usize << n_qubits).map(|_| gaussian(rng)).collect();
        match PureState::new(amps) {
            Ok(psi) => return Ok(psi),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// `(U_1 ⊗ … ⊗ U_n) ψ` with independent Haar `U_i`.
pub fn random_local_rotation(psi: &PureState, rng: &mut ChaCha8Rng) -> PureState {
    let mut out = psi.clone();
    for q in 1..=psi.n_qubits() {
        let u = haar_unitary_2(rng);
        out.apply_single_qubit_unchecked(q, &u);
    }
    out
}

/// Fidelity of `psi` with its image under independent channels.
pub fn transfer_fidelity(psi: &PureState, fs: &[TransitionAmplitude]) -> Result<f64> {
    if fs.len() != psi.n_qubits() {
        return Err(Error::Shape(format!(
            "{} channel amplitudes for {} qubits",
            fs.len(),
            psi.n_qubits()
        )));
    }
    let mut rho = psi.to_density();
    apply_parallel_in_place(&mut rho, fs);
    clamp_unit(rho.expectation_unchecked(psi.amplitudes()))
}

/// Local-unitary orbit average of the transfer fidelity, every qubit sent
/// through a channel with amplitude `f`.
pub fn mc_fidelity_local_unitary_orbit(
    psi: &PureState,
    f: TransitionAmplitude,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    mc_fidelity_local_unitary_orbit_channels(psi, &vec![f; psi.n_qubits()], samples, seed)
}

/// As [`mc_fidelity_local_unitary_orbit`] with one amplitude per qubit.
pub fn mc_fidelity_local_unitary_orbit_channels(
    psi: &PureState,
    fs: &[TransitionAmplitude],
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    transfer_fidelity(psi, fs)?;
    parallel_estimate(samples, seed, |rng| {
        transfer_fidelity(&random_local_rotation(psi, rng), fs)
    })
}

/// Haar average of the transfer fidelity of `n`-qubit states.
pub fn mc_fidelity_haar(n_qubits: usize, f: TransitionAmplitude, samples: usize, seed: u64) -> Result<Estimate> {
    haar_pure_state(n_qubits, &mut substream(seed, 0))?;
    let fs = vec![f; n_qubits];
    parallel_estimate(samples, seed, |rng| {
        transfer_fidelity(&haar_pure_state(n_qubits, rng)?, &fs)
    })
}

/// Haar averages of `J1..J4` over three-qubit states, read from measures
/// (`J_i = C²_jk / 4`, `J4 = τ₃² / 4`), and of `C²` over two-qubit states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantAverages {
    pub j: [Estimate; 4],
    pub concurrence_sq_2q: Estimate,
}

pub fn mc_invariant_averages(samples: usize, seed: u64) -> Result<InvariantAverages> {
    let j = parallel_estimates(samples, derive_seed(seed, "three-qubit invariants"), |rng| {
        let m = MeasureSet::from_state(&haar_pure_state(3, rng)?)?.squared();
        Ok([m.c2_bc / 4.0, m.c2_ac / 4.0, m.c2_ab / 4.0, m.tau3_sq / 4.0])
    })?;
    let concurrence_sq_2q = parallel_estimate(samples, derive_seed(seed, "two-qubit concurrence"), |rng| {
        Ok(concurrence_pure_2q(&haar_pure_state(2, rng)?)?.powi(2))
    })?;
    Ok(InvariantAverages { j, concurrence_sq_2q })
}

/// Pooled residual between sampled transfer fidelities and the class formula.
///
/// `states` members of class `tag` are drawn; each is rotated by
/// `samples_per_state` random local unitaries and every rotated fidelity is
/// compared with the closed form evaluated on the measures of that member.
/// The estimate's mean is zero when the closed form is right.
pub fn mc_class_residual(
    tag: ClassTag,
    f: TransitionAmplitude,
    states: usize,
    samples_per_state: usize,
    seed: u64,
) -> Result<Estimate> {
    if states == 0 || samples_per_state == 0 {
        return Err(Error::Domain("need at least one state and one sample".into()));
    }
    let f1 = SingleQubitAvgFidelity::from_amplitude(f)?;
    let member_seed = derive_seed(seed, "class members");
    let members: Vec<(PureState, f64)> = (0..states as u64)
        .into_par_iter()
        .map(|k| {
            let c = sample_class_state(tag, &mut substream(member_seed, k))?;
            let psi = c.to_state();
            let measures = MeasureSet::from_state(&psi)?.squared();
            let closed = class_fixed_entanglement_fidelity(tag, f1, &measures)?;
            Ok((psi, closed))
        })
        .collect::<Result<_>>()?;
    let fs = [f; 3];
    parallel_estimate(states * samples_per_state, derive_seed(seed, "class orbit"), |rng| {
        // Sample streams are indexed globally, so member k owns a contiguous
        // block; the member is recovered from the stream's own index.
        let index = rng.get_stream() as usize;
        let (psi, closed) = &members[index / samples_per_state];
        Ok(transfer_fidelity(&random_local_rotation(psi, rng), &fs)? - closed)
    })
}
