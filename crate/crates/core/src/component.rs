//! Matrix realizations of a single component `(A_i, A_i⁺, A_i⁻, θ_i, τ_i)`.
//!
//! A component acts on `ℂᵈ ⊗ ℂᵈ`. A positive generator `g` acts as `g ⊗ I`,
//! its reflection `θ(g)` as `I ⊗ conj(g)`. The two actions commute, and
//! `g ↦ I ⊗ conj(g)` is anti-linear, multiplicative and involutive on the
//! generated algebra. The state is the vector functional of a unit vector
//! `ξ`, stored with `ξ[k·d + l]` the coefficient of `e_k ⊗ e_l`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ncpoly::{Letter, Scalar, Word};
use crate::positivity::GramReport;

/// Default maximum size of a word basis used for a Gram matrix.
pub const DEFAULT_BASIS_CAP: usize = 2_000;

/// Component-level pairing `τ_i(θ(a)·b)` on monomials.
///
/// `neg` lists the generators of `a`, `pos` those of `b`, both in operator
/// order. Linear extension is the caller's business.
pub trait MomentOracle: Send + Sync {
    fn num_generators(&self) -> usize;

    fn moment(&self, neg: &[usize], pos: &[usize]) -> Result<Scalar>;

    fn unit(&self) -> Scalar {
        Scalar::new(1.0, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixModel {
    dim: usize,
    generators: Vec<DMatrix<Scalar>>,
    state: DVector<Scalar>,
}

impl MatrixModel {
    pub fn new(dim: usize, generators: Vec<DMatrix<Scalar>>, state: DVector<Scalar>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModel("dimension must be at least 1".into()));
        }
        for (k, g) in generators.iter().enumerate() {
            if g.shape() != (dim, dim) {
                return Err(Error::InvalidModel(format!(
                    "generator {k} has shape {:?}, expected ({dim}, {dim})",
                    g.shape()
                )));
            }
            if g.iter().any(|z| !z.is_finite()) {
                return Err(Error::InvalidModel(format!("generator {k} has non-finite entries")));
            }
        }
        if state.len() != dim * dim {
            return Err(Error::InvalidModel(format!(
                "state has length {}, expected {}",
                state.len(),
                dim * dim
            )));
        }
        if state.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidModel("state has non-finite entries".into()));
        }
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidModel(format!("state has norm {norm}, expected 1")));
        }
        Ok(Self { dim, generators, state })
    }

    pub fn with_schmidt(generators: Vec<DMatrix<Scalar>>, weights: &[f64]) -> Result<Self> {
        let state = schmidt_state(weights)?;
        let dim = weights.len();
        Self::new(dim, generators, state)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[DMatrix<Scalar>] {
        &self.generators
    }

    pub fn state(&self) -> &DVector<Scalar> {
        &self.state
    }

    /// `ξ` reshaped to the `d×d` matrix `X` with `ξ = Σ X_kl e_k ⊗ e_l`.
    pub fn state_matrix(&self) -> DMatrix<Scalar> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |k, l| self.state[k * d + l])
    }

    /// Whether `τ_i(θ(x)) = conj(τ_i(x))` for every `x`. This holds exactly
    /// when the state matrix is normal, and is implied by reflection
    /// positivity.
    pub fn is_theta_symmetric(&self, tol: f64) -> bool {
        let x = self.state_matrix();
        let lhs = &x * x.adjoint();
        let rhs = x.adjoint() * &x;
        (lhs - rhs).iter().all(|z| z.norm() <= tol)
    }

    fn check_ids(&self, ids: &[usize]) -> Result<()> {
        match ids.iter().find(|&&g| g >= self.generators.len()) {
            Some(&g) => Err(Error::UnknownGenerator { algebra_id: 0, local_id: g }),
            None => Ok(()),
        }
    }

    /// Product of the listed generators in operator order.
    pub fn local_operator(&self, word: &[usize]) -> Result<DMatrix<Scalar>> {
        self.check_ids(word)?;
        let mut m = DMatrix::identity(self.dim, self.dim);
        for &g in word {
            m *= &self.generators[g];
        }
        Ok(m)
    }

    /// `g ⊗ I` on `ℂᵈ ⊗ ℂᵈ`.
    pub fn positive_action(&self, g: &DMatrix<Scalar>) -> DMatrix<Scalar> {
        g.kronecker(&DMatrix::identity(self.dim, self.dim))
    }

    /// `I ⊗ conj(g)` on `ℂᵈ ⊗ ℂᵈ`.
    pub fn reflected_action(&self, g: &DMatrix<Scalar>) -> DMatrix<Scalar> {
        DMatrix::<Scalar>::identity(self.dim, self.dim).kronecker(&g.map(|z| z.conj()))
    }

    /// Operator of a single letter on `ℂᵈ ⊗ ℂᵈ`; only the face and local id
    /// of the letter are used.
    pub fn letter_action(&self, letter: Letter) -> Result<DMatrix<Scalar>> {
        self.check_ids(&[letter.gen.local_id])?;
        let g = &self.generators[letter.gen.local_id];
        Ok(if letter.reflected { self.reflected_action(g) } else { self.positive_action(g) })
    }

    /// `⟨ξ, (I ⊗ conj(a))(b ⊗ I) ξ⟩` with `a`, `b` the products of `neg`,
    /// `pos`. Computed on the `d×d` state matrix as `tr(X* b X a*)`.
    pub fn eval_local_moment(&self, neg: &[usize], pos: &[usize]) -> Result<Scalar> {
        let a = self.local_operator(neg)?;
        let b = self.local_operator(pos)?;
        let x = self.state_matrix();
        let y = b * &x * a.adjoint();
        Ok(x.iter().zip(y.iter()).map(|(xi, yi)| xi.conj() * yi).sum())
    }
}

impl MomentOracle for MatrixModel {
    fn num_generators(&self) -> usize {
        self.generators.len()
    }

    fn moment(&self, neg: &[usize], pos: &[usize]) -> Result<Scalar> {
        self.eval_local_moment(neg, pos)
    }
}

/// `ξ = Σ_k √p_k e_k ⊗ e_k` with `p` the weights normalized to sum 1.
pub fn schmidt_state(weights: &[f64]) -> Result<DVector<Scalar>> {
    if weights.is_empty() {
        return Err(Error::InvalidModel("Schmidt weights are empty".into()));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidModel("Schmidt weights must be finite and nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroWeights);
    }
    let d = weights.len();
    let mut xi = DVector::zeros(d * d);
    for (k, w) in weights.iter().enumerate() {
        xi[k * d + k] = Scalar::new((w / total).sqrt(), 0.0);
    }
    Ok(xi)
}

/// All words over `n_gens` generators of length at most `max_len`, ordered
/// by length and then lexicographically.
pub fn local_words(n_gens: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * n_gens);
        for w in &layer {
            for g in 0..n_gens {
                let mut v: Vec<usize> = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Number of words of length ≤ `max_len` over `n` letters, saturating.
pub(crate) fn word_count(n: usize, max_len: usize) -> usize {
    let mut total: usize = 1;
    let mut layer: usize = 1;
    for _ in 0..max_len {
        layer = layer.saturating_mul(n);
        total = total.saturating_add(layer);
    }
    total
}

/// Gram matrix `G_kl = τ_i(θ(w_k) w_l)` over every local positive word of
/// length ≤ `max_len`, certified PSD at `tol`. Basis words are labelled with
/// algebra id 0.
pub fn check_component_rp(oracle: &dyn MomentOracle, max_len: usize, tol: f64) -> Result<GramReport> {
    check_component_rp_capped(oracle, 0, max_len, tol, DEFAULT_BASIS_CAP)
}

pub(crate) fn check_component_rp_capped(
    oracle: &dyn MomentOracle,
    algebra_id: usize,
    max_len: usize,
    tol: f64,
    cap: usize,
) -> Result<GramReport> {
    let size = word_count(oracle.num_generators(), max_len);
    if size > cap {
        return Err(Error::BasisCap { size, cap });
    }
    let words = local_words(oracle.num_generators(), max_len);
    let n = words.len();
    let mut g = DMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            g[(k, l)] = oracle.moment(&words[k], &words[l])?;
        }
    }
    let basis = words
        .iter()
        .map(|w| Word::new(w.iter().map(|&id| Letter::pos(algebra_id, id))))
        .collect();
    Ok(GramReport::from_matrix(basis, g, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Scalar {
        Scalar::new(re, im)
    }

    fn sample_generator() -> DMatrix<Scalar> {
        DMatrix::from_row_slice(2, 2, &[c(0.3, 0.1), c(-1.2, 0.4), c(0.7, -0.5), c(0.2, 0.9)])
    }

    #[test]
    fn unit_moment_is_one() {
        let m = MatrixModel::with_schmidt(vec![sample_generator()], &[0.3, 0.7]).unwrap();
        assert!((m.eval_local_moment(&[], &[]).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn scalar_model_moments() {
        let g = DMatrix::from_element(1, 1, c(2.5, -0.5));
        let m = MatrixModel::new(1, vec![g], DVector::from_element(1, c(1.0, 0.0))).unwrap();
        assert_eq!(m.eval_local_moment(&[], &[0]).unwrap(), c(2.5, -0.5));
        // θ(g) acts as conj(g)
        assert_eq!(m.eval_local_moment(&[0], &[]).unwrap(), c(2.5, 0.5));
    }

    #[test]
    fn schmidt_pairing_matches_hand_formula() {
        // τ(θ(g) g) = Σ_{k,l} √(p_k p_l) |g_lk|² with p = (1/2, 1/2)
        let g = sample_generator();
        let m = MatrixModel::with_schmidt(vec![g.clone()], &[0.5, 0.5]).unwrap();
        let p = [0.5f64, 0.5];
        let mut expected = 0.0;
        for k in 0..2 {
            for l in 0..2 {
                expected += (p[k] * p[l]).sqrt() * g[(l, k)].norm_sqr();
            }
        }
        let got = m.eval_local_moment(&[0], &[0]).unwrap();
        assert!((got - c(expected, 0.0)).norm() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn moment_matches_representation() {
        let g0 = sample_generator();
        let g1 = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.5), c(-0.3, 0.0)]);
        let state = DVector::from_vec(vec![c(0.5, 0.1), c(-0.2, 0.3), c(0.4, -0.4), c(0.1, 0.2)]);
        let state = state.normalize();
        let m = MatrixModel::new(2, vec![g0, g1], state.clone()).unwrap();
        for (neg, pos) in [(vec![], vec![0]), (vec![1, 0], vec![0, 1]), (vec![0], vec![1, 1, 0])] {
            let mut v = state.clone();
            for &g in pos.iter().rev() {
                v = m.positive_action(&m.generators()[g]) * v;
            }
            for &g in neg.iter().rev() {
                v = m.reflected_action(&m.generators()[g]) * v;
            }
            let direct = state.dotc(&v);
            let fast = m.eval_local_moment(&neg, &pos).unwrap();
            assert!((direct - fast).norm() < 1e-12);
        }
    }

    #[test]
    fn faces_commute_in_representation() {
        let m = MatrixModel::with_schmidt(vec![sample_generator()], &[1.0, 2.0]).unwrap();
        let h = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(2.0, 0.0), c(-1.0, 0.0), c(0.5, 0.5)]);
        let p = m.positive_action(&m.generators()[0]);
        let r = m.reflected_action(&h);
        assert_eq!(&p * &r, &r * &p);
    }

    #[test]
    fn schmidt_state_examples() {
        let s = schmidt_state(&[1.0]).unwrap();
        assert_eq!(s.as_slice(), &[c(1.0, 0.0)]);

        let s = schmidt_state(&[1.0, 1.0]).unwrap();
        let r = 0.5f64.sqrt();
        assert_eq!(s.as_slice(), &[c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]);

        let s = schmidt_state(&[3.0, 1.0]).unwrap();
        assert!((s[0].re - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((s[3].re - 0.25f64.sqrt()).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-15);

        assert_eq!(schmidt_state(&[0.0, 0.0]), Err(Error::ZeroWeights));
        assert!(schmidt_state(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn invalid_models_are_rejected() {
        let s = schmidt_state(&[1.0, 1.0]).unwrap();
        let bad = DMatrix::zeros(3, 3);
        assert!(MatrixModel::new(2, vec![bad], s.clone()).is_err());
        assert!(MatrixModel::new(2, vec![], s.scale(2.0)).is_err());
        assert!(MatrixModel::new(2, vec![], DVector::zeros(3)).is_err());
        let m = MatrixModel::new(2, vec![], s).unwrap();
        assert!(matches!(m.eval_local_moment(&[], &[0]), Err(Error::UnknownGenerator { .. })));
    }

    #[test]
    fn component_rp_trivial_and_schmidt() {
        let m = MatrixModel::with_schmidt(vec![sample_generator()], &[0.5, 0.5]).unwrap();
        let r = check_component_rp(&m, 0, 1e-8).unwrap();
        assert_eq!(r.matrix.shape(), (1, 1));
        assert!((r.matrix[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(r.psd);

        let r = check_component_rp(&m, 3, 1e-8).unwrap();
        assert_eq!(r.basis.len(), 4);
        assert!(r.psd, "min eig {}", r.min_eig);
        assert!(r.witness.is_none());
    }

    #[test]
    fn indefinite_state_fails_rp_with_witness() {
        // ξ = (e₁⊗e₁ − e₂⊗e₂)/√2, g = E₁₂: τ(θ(g)g) = −1/2
        let r = 0.5f64.sqrt();
        let state = DVector::from_vec(vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-r, 0.0)]);
        let g = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let m = MatrixModel::new(2, vec![g], state).unwrap();
        assert!((m.eval_local_moment(&[0], &[0]).unwrap() - c(-0.5, 0.0)).norm() < 1e-15);
        let report = check_component_rp(&m, 1, 1e-8).unwrap();
        assert!(!report.psd);
        let w = report.witness.clone().unwrap();
        let value = crate::positivity::quadratic_form(&report.matrix, &w);
        assert!(value.re < -1e-6);
    }

    #[test]
    fn basis_cap_is_enforced() {
        let m = MatrixModel::with_schmidt(vec![sample_generator(); 3], &[1.0, 1.0]).unwrap();
        let err = check_component_rp_capped(&m, 0, 4, 1e-8, 50).unwrap_err();
        assert_eq!(err, Error::BasisCap { size: 121, cap: 50 });
    }

    #[test]
    fn local_word_enumeration_order() {
        let w = local_words(2, 2);
        assert_eq!(w, vec![vec![], vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(word_count(2, 2), 7);
    }
}
