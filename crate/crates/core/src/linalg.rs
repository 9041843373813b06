//! Small dense complex vectors and matrices.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type Cvec = DVector<C64>;
pub type Cmat = DMatrix<C64>;

pub const DEFAULT_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `⟨u|v⟩`, antilinear in `u`.
pub fn inner(u: &Cvec, v: &Cvec) -> C64 {
    u.dotc(v)
}

/// Computational basis vector `|i⟩` in dimension `d`.
pub fn ket(d: usize, i: usize) -> Cvec {
    let mut v = Cvec::zeros(d);
    v[i] = c(1.0, 0.0);
    v
}

/// Normalized vector from real amplitudes.
pub fn real_state(amplitudes: &[f64]) -> Cvec {
    let v = Cvec::from_iterator(amplitudes.len(), amplitudes.iter().map(|&x| c(x, 0.0)));
    let n = v.norm();
    v / c(n, 0.0)
}

pub fn omega(d: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64)
}

pub fn hadamard() -> Cmat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Cmat::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
}

/// Discrete Fourier matrix, `F|a⟩ = Σ_m ω^{am} |m⟩ / √d`.
pub fn fourier(d: usize) -> Cmat {
    let w = omega(d);
    let s = 1.0 / (d as f64).sqrt();
    Cmat::from_fn(d, d, |m, a| w.powu((a * m % d) as u32) * s)
}

/// Block-diagonal embedding of `block` at rows/columns `offset..`.
pub fn embed(d: usize, offset: usize, block: &Cmat) -> Cmat {
    let mut m = Cmat::identity(d, d);
    m.view_mut((offset, offset), block.shape()).copy_from(block);
    m
}

/// Largest entry of `|M†M − I|`.
pub fn unitarity_deviation(m: &Cmat) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let g = m.adjoint() * m;
    max_identity_deviation(&g)
}

pub fn max_identity_deviation(g: &Cmat) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g[(i, j)] - c(target, 0.0)).norm());
        }
    }
    dev
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Cmat {
    let g = Cmat::from_fn(d, d, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / c(rjj.norm(), 0.0)
        } else {
            c(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Kronecker product of a list of vectors, first factor most significant.
pub fn kron_all(factors: &[Cvec]) -> Cvec {
    factors
        .iter()
        .fold(Cvec::from_element(1, c(1.0, 0.0)), |acc, v| acc.kronecker(v))
}
