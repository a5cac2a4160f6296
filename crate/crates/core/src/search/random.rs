//! Seeded random matrices. Every trial draws from its own ChaCha stream keyed
//! by (seed, stream), so serial and parallel sweeps generate identical data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c64, op_norm, skew_part, CMatrix};

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_matrix<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im)
    })
}

/// Haar-distributed unitary: QR of a complex Gaussian with the phases of diag(R) removed.
pub fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let qr = gaussian_matrix(n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c64(1.0, 0.0)
        };
        for z in q.column_mut(j).iter_mut() {
            *z *= ph;
        }
    }
    q
}

/// Skew-Hermitian matrix with Gaussian entries, rescaled to operator norm `norm`.
pub fn random_skew<R: Rng>(n: usize, norm: f64, rng: &mut R) -> CMatrix {
    let x = skew_part(&gaussian_matrix(n, rng));
    let s = op_norm(&x);
    if s == 0.0 || norm == 0.0 {
        return CMatrix::zeros(n, n);
    }
    x * c64(norm / s, 0.0)
}
