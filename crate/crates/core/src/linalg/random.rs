use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::{ComplexMatrix, C64};

/// The generator used everywhere randomness is needed.
pub type Rng64 = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`; campaigns and restarts
/// give each worker its own stream instead of sharing a generator.
pub fn sub_rng(seed: u64, stream: u64) -> Rng64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_normal(rng: &mut Rng64) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut Rng64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` pushed back into `Q`.
pub fn haar_unitary(d: usize, rng: &mut Rng64) -> ComplexMatrix {
    assert!(d >= 1, "haar_unitary needs d >= 1");
    let g = ginibre(d, d, rng);
    let qr = DMatrix::from_fn(d, d, |i, j| g[(i, j)]).qr();
    let q = qr.q();
    let r = qr.r();
    let phases: Vec<C64> = (0..d)
        .map(|j| {
            let x = r[(j, j)];
            if x.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                x / x.norm()
            }
        })
        .collect();
    ComplexMatrix::from_fn(d, d, |i, j| q[(i, j)] * phases[j])
}

/// Uniformly random unit vector.
pub fn random_pure_vector(n: usize, rng: &mut Rng64) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// `GG†/Tr(GG†)` with `G` an `n × rank` Ginibre matrix (Hilbert–Schmidt
/// measure when `rank = n`).
pub fn random_density_matrix(n: usize, rank: usize, rng: &mut Rng64) -> ComplexMatrix {
    let g = ginibre(n, rank.max(1), rng);
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    m.hermitian_part().scale_real(1.0 / t)
}
