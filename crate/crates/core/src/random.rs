//! Seeded generation of random unitaries, states and channels.
//!
//! Every draw goes through [`ChaCha8Rng`]. Independent work items (shots,
//! trials) use `(seed, stream)` so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channels::KrausChannel;
use crate::linalg::{ComplexMatrix, DensityMatrix, PureState, C64};

/// Name recorded in reports next to the seed.
pub const GENERATOR_NAME: &str = "ChaCha8Rng (rand_chacha 0.9), stream = work-item index";

/// Generator for work item `stream` under `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-distributed unitary: Gram–Schmidt on the columns of a complex
/// Gaussian matrix (the QR construction with the phase fixed by R's diagonal).
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        for q in &cols {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (c, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            m.set(r, c, *z);
        }
    }
    m
}

pub fn random_pure_state(qubits: usize, rng: &mut ChaCha8Rng) -> PureState {
    let dim = 1usize << qubits;
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Random full-rank mixed state `G G† / tr(G G†)` from a Ginibre matrix.
pub fn random_density(qubits: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let dim = 1usize << qubits;
    let g = ComplexMatrix::from_raw(dim, dim, (0..dim * dim).map(|_| gaussian(rng)).collect());
    let gg = g.matmul(&g.adjoint());
    let tr = gg.trace().re;
    DensityMatrix::from_raw(gg.scale_real(1.0 / tr), true)
}

/// Random CPTP channel on `qubits` qubits by Stinespring dilation with a
/// two-qubit environment: `K_e = (I ⊗ ⟨e|) V (I ⊗ |0⟩)`.
pub fn random_cptp(qubits: usize, rng: &mut ChaCha8Rng) -> KrausChannel {
    const ENV: usize = 4;
    let dim = 1usize << qubits;
    let v = random_unitary(dim * ENV, rng);
    let ops = (0..ENV)
        .map(|e| {
            let mut k = ComplexMatrix::zeros(dim, dim);
            for r in 0..dim {
                for c in 0..dim {
                    k.set(r, c, v.get(r * ENV + e, c * ENV));
                }
            }
            k
        })
        .collect();
    KrausChannel::new(ops).expect("Stinespring Kraus family is complete")
}

/// Uniform draw in [0, 1).
pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rand::Rng::random::<f64>(rng)
}
