//! Seeded random models and elements for harnesses, examples and tests.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::component::MatrixModel;
use crate::ncpoly::{Letter, NCPoly, Scalar, Word};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Scalar::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<Scalar> {
    DVector::from_fn(n, |_, _| complex_gaussian(rng))
}

/// Complex Gaussian `d×d` matrix scaled so that its typical norm is O(1).
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<Scalar> {
    let s = 1.0 / (d as f64).sqrt();
    DMatrix::from_fn(d, d, |_, _| complex_gaussian(rng) * s)
}

/// Haar-ish unitary from the QR factorization of a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<Scalar> {
    gaussian_matrix(rng, d).qr().q()
}

fn generators<R: Rng + ?Sized>(rng: &mut R, d: usize, n_gens: usize) -> Vec<DMatrix<Scalar>> {
    (0..n_gens).map(|_| gaussian_matrix(rng, d)).collect()
}

/// Reflection-positive component: Schmidt state with random positive weights.
pub fn schmidt_model<R: Rng + ?Sized>(rng: &mut R, d: usize, n_gens: usize) -> MatrixModel {
    let weights: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
    let gens = generators(rng, d, n_gens);
    MatrixModel::with_schmidt(gens, &weights).expect("valid Schmidt model")
}

/// Component whose state matrix is `U diag(λ) U*` with random complex `λ`.
/// Normal, so `τ∘θ = conj∘τ`, but generally not reflection positive.
pub fn normal_model<R: Rng + ?Sized>(rng: &mut R, d: usize, n_gens: usize) -> MatrixModel {
    let u = unitary(rng, d);
    let lambda = DMatrix::from_diagonal(&gaussian_vector(rng, d));
    let x = &u * lambda * u.adjoint();
    let state = flatten(&x).normalize();
    let gens = generators(rng, d, n_gens);
    MatrixModel::new(d, gens, state).expect("valid normal model")
}

/// Component whose state matrix is a random Hermitian matrix, typically
/// indefinite. Its Gram matrices are Hermitian.
pub fn hermitian_model<R: Rng + ?Sized>(rng: &mut R, d: usize, n_gens: usize) -> MatrixModel {
    let m = gaussian_matrix(rng, d);
    let x = &m + m.adjoint();
    let state = flatten(&x).normalize();
    let gens = generators(rng, d, n_gens);
    MatrixModel::new(d, gens, state).expect("valid Hermitian-state model")
}

/// `ξ[k·d + l] = X[k, l]`.
pub fn flatten(x: &DMatrix<Scalar>) -> DVector<Scalar> {
    let d = x.nrows();
    DVector::from_fn(d * d, |i, _| x[(i / d, i % d)])
}

/// Uniform random letter over components with the given generator counts.
pub fn letter<R: Rng + ?Sized>(rng: &mut R, gens: &[usize], reflected: bool) -> Letter {
    let choices: Vec<(usize, usize)> = gens
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| (0..n).map(move |g| (i, g)))
        .collect();
    let (i, g) = choices[rng.random_range(0..choices.len())];
    if reflected { Letter::refl(i, g) } else { Letter::pos(i, g) }
}

/// Random word of exactly `len` letters, each reflected with probability ½
/// when `mixed`, otherwise all positive.
pub fn word<R: Rng + ?Sized>(rng: &mut R, gens: &[usize], len: usize, mixed: bool) -> Word {
    let letters: Vec<Letter> = (0..len)
        .map(|_| {
            let refl = mixed && rng.random_bool(0.5);
            letter(rng, gens, refl)
        })
        .collect();
    Word::new(letters)
}

/// Random polynomial with `n_terms` monomials of length ≤ `max_len`.
pub fn poly<R: Rng + ?Sized>(rng: &mut R, gens: &[usize], max_len: usize, n_terms: usize, mixed: bool) -> NCPoly {
    let mut p = NCPoly::zero();
    for _ in 0..n_terms {
        let len = rng.random_range(0..=max_len);
        p.add_term(word(rng, gens, len, mixed), complex_gaussian(rng));
    }
    p
}
