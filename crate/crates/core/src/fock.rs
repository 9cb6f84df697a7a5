//! Free product of the component Hilbert spaces, truncated at a fixed tensor
//! length, with positive letters acting on the left and reflected letters on
//! the right.
//!
//! Component `i` lives on `H_i = ℂᵈ ⊗ ℂᵈ` with unit vector `ξ_i`. The space
//! is spanned by the vacuum `Ω` and alternating tensors
//! `η_1 ⊗ ⋯ ⊗ η_n` with `η_k ∈ H_{i_k}° = ξ_{i_k}^⊥` and `i_k ≠ i_{k+1}`.
//! An operator `T` on `H_i` acts on the left by identifying the leftmost
//! slot (or `ξ_i` when that slot belongs to another component) with a
//! vector of `H_i`, applying `T`, and splitting the result into its `ξ_i`
//! part (which removes the slot) and its `H_i°` part. The right action does
//! the same on the rightmost slot. The product state is `⟨Ω, · Ω⟩`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};

use crate::component::MatrixModel;
use crate::error::{Error, Result};
use crate::ncpoly::{Letter, NCPoly, Scalar};

pub const DEFAULT_DIM_CAP: usize = 50_000;

/// `(component, basis index)` of one tensor slot; index 0 is `ξ_i` and never
/// appears inside a tensor.
type Slot = (usize, usize);

/// Sparse vector over the basis.
pub type SparseVec = BTreeMap<usize, Scalar>;

#[derive(Clone, Debug)]
struct FockComponent {
    hdim: usize,
    /// Letter actions in the orthonormal basis `(ξ, f_1, …, f_{d²−1})`.
    left: Vec<DMatrix<Scalar>>,
    right: Vec<DMatrix<Scalar>>,
}

#[derive(Clone, Debug)]
pub struct FreeProductSpace {
    depth: usize,
    comps: Vec<FockComponent>,
    basis: Vec<Vec<Slot>>,
    index: HashMap<Vec<Slot>, usize>,
}

/// Unitary whose first column is `xi` and whose remaining columns are an
/// orthonormal basis of `xi^⊥`, obtained by Gram–Schmidt over the standard
/// basis vectors in order.
pub fn adapted_basis(xi: &DVector<Scalar>) -> DMatrix<Scalar> {
    let n = xi.len();
    let mut cols: Vec<DVector<Scalar>> = vec![xi.normalize()];
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = DVector::zeros(n);
        v[k] = Scalar::new(1.0, 0.0);
        // two passes keep the basis orthonormal to working precision
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            cols.push(v / Scalar::new(norm, 0.0));
        }
    }
    DMatrix::from_columns(&cols)
}

/// Number of alternating tensors of length 1..=depth, saturating.
fn count_dimension(slot_dims: &[usize], depth: usize) -> usize {
    // ends[i]: number of tensors of the current length whose last slot is i
    let mut ends: Vec<usize> = slot_dims.to_vec();
    let mut total: usize = 1usize.saturating_add(ends.iter().fold(0usize, |a, &b| a.saturating_add(b)));
    for _ in 1..depth {
        let sum = ends.iter().fold(0usize, |a, &b| a.saturating_add(b));
        ends = slot_dims
            .iter()
            .zip(&ends)
            .map(|(&d, &e)| d.saturating_mul(sum - e))
            .collect();
        total = ends.iter().fold(total, |a, &b| a.saturating_add(b));
    }
    total
}

impl FreeProductSpace {
    pub fn build(models: &[MatrixModel], depth: usize) -> Result<Self> {
        Self::build_capped(models, depth, DEFAULT_DIM_CAP)
    }

    pub fn build_capped(models: &[MatrixModel], depth: usize, cap: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidModel("truncation depth must be at least 1".into()));
        }
        let slot_dims: Vec<usize> = models.iter().map(|m| m.dim() * m.dim() - 1).collect();
        let dim = count_dimension(&slot_dims, depth);
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }

        let comps = models
            .iter()
            .map(|m| {
                let u = adapted_basis(m.state());
                let ut = u.adjoint();
                let left = m.generators().iter().map(|g| &ut * m.positive_action(g) * &u).collect();
                let right = m.generators().iter().map(|g| &ut * m.reflected_action(g) * &u).collect();
                FockComponent { hdim: m.dim() * m.dim(), left, right }
            })
            .collect();

        let mut basis: Vec<Vec<Slot>> = vec![Vec::new()];
        let mut layer: Vec<Vec<Slot>> = vec![Vec::new()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for t in &layer {
                for (i, &sd) in slot_dims.iter().enumerate() {
                    if t.last().is_some_and(|s| s.0 == i) {
                        continue;
                    }
                    for r in 1..=sd {
                        let mut v = t.clone();
                        v.push((i, r));
                        next.push(v);
                    }
                }
            }
            basis.extend(next.iter().cloned());
            layer = next;
        }
        debug_assert_eq!(basis.len(), dim);
        let index = basis.iter().enumerate().map(|(k, t)| (t.clone(), k)).collect();
        Ok(Self { depth, comps, basis, index })
    }

    /// Space deep enough that every word of `p` is evaluated exactly.
    pub fn for_poly(models: &[MatrixModel], p: &NCPoly) -> Result<Self> {
        Self::build(models, p.max_word_len().max(1))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Slot component indices of basis vector `k` (empty for `Ω`).
    pub fn tensor_pattern(&self, k: usize) -> Vec<usize> {
        self.basis[k].iter().map(|s| s.0).collect()
    }

    pub fn vacuum(&self) -> DVector<Scalar> {
        let mut v = DVector::zeros(self.dim());
        v[0] = Scalar::new(1.0, 0.0);
        v
    }

    fn letter_matrix(&self, letter: Letter) -> Result<&DMatrix<Scalar>> {
        let comp = self
            .comps
            .get(letter.gen.algebra_id)
            .ok_or(Error::UnknownComponent(letter.gen.algebra_id))?;
        let mats = if letter.reflected { &comp.right } else { &comp.left };
        mats.get(letter.gen.local_id).ok_or(Error::UnknownGenerator {
            algebra_id: letter.gen.algebra_id,
            local_id: letter.gen.local_id,
        })
    }

    /// Applies one letter to a sparse vector.
    pub fn act_sparse(&self, letter: Letter, v: &SparseVec) -> Result<SparseVec> {
        let m = self.letter_matrix(letter)?;
        let i = letter.gen.algebra_id;
        let hdim = self.comps[i].hdim;
        let left = !letter.reflected;
        let mut out = SparseVec::new();
        let mut push = |t: Vec<Slot>, z: Scalar| {
            let k = self.index[&t];
            *out.entry(k).or_default() += z;
        };
        for (&k, &x) in v {
            if x == Scalar::default() {
                continue;
            }
            let t = &self.basis[k];
            let slot = if left { t.first() } else { t.last() };
            match slot {
                Some(&(ci, s)) if ci == i => {
                    for r in 0..hdim {
                        let z = m[(r, s)];
                        if z == Scalar::default() {
                            continue;
                        }
                        let mut nt = t.clone();
                        let pos = if left { 0 } else { nt.len() - 1 };
                        if r == 0 {
                            nt.remove(pos);
                        } else {
                            nt[pos] = (i, r);
                        }
                        push(nt, x * z);
                    }
                }
                _ => {
                    push(t.clone(), x * m[(0, 0)]);
                    for r in 1..hdim {
                        let z = m[(r, 0)];
                        if z == Scalar::default() {
                            continue;
                        }
                        if t.len() == self.depth {
                            return Err(Error::DepthOverflow { depth: self.depth });
                        }
                        let mut nt = t.clone();
                        if left {
                            nt.insert(0, (i, r));
                        } else {
                            nt.push((i, r));
                        }
                        push(nt, x * z);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Applies one letter: positive letters by the left action of `g ⊗ I`,
    /// reflected letters by the right action of `I ⊗ conj(g)`.
    pub fn act(&self, letter: Letter, v: &DVector<Scalar>) -> Result<DVector<Scalar>> {
        if v.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!("vector of length {} on a space of dimension {}", v.len(), self.dim())));
        }
        let sparse: SparseVec = v
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != Scalar::default())
            .map(|(k, z)| (k, *z))
            .collect();
        let out = self.act_sparse(letter, &sparse)?;
        let mut dense = DVector::zeros(self.dim());
        for (k, z) in out {
            dense[k] = z;
        }
        Ok(dense)
    }

    /// Applies `p` to a sparse vector, letters right to left.
    pub fn apply(&self, p: &NCPoly, v: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::new();
        for (w, c) in p.terms() {
            let mut u = v.clone();
            for &l in w.letters().iter().rev() {
                u = self.act_sparse(l, &u)?;
            }
            for (k, z) in u {
                *out.entry(k).or_default() += c * z;
            }
        }
        Ok(out)
    }

    /// `⟨Ω, p Ω⟩`. Every word of `p` must fit within the truncation depth.
    pub fn oracle_tau(&self, p: &NCPoly) -> Result<Scalar> {
        if p.max_word_len() > self.depth {
            return Err(Error::DepthOverflow { depth: self.depth });
        }
        let omega: SparseVec = [(0, Scalar::new(1.0, 0.0))].into();
        Ok(self.apply(p, &omega)?.get(&0).copied().unwrap_or_default())
    }

    /// `⟨Ω, p_1 p_2 ⋯ p_n Ω⟩` applying the factors one at a time, which is
    /// much cheaper than expanding the product first.
    pub fn oracle_tau_product(&self, factors: &[NCPoly]) -> Result<Scalar> {
        let total: usize = factors.iter().map(NCPoly::max_word_len).sum();
        if total > self.depth {
            return Err(Error::DepthOverflow { depth: self.depth });
        }
        let mut v: SparseVec = [(0, Scalar::new(1.0, 0.0))].into();
        for f in factors.iter().rev() {
            v = self.apply(f, &v)?;
        }
        Ok(v.get(&0).copied().unwrap_or_default())
    }
}

/// `⟨Ω, p Ω⟩` on a space whose depth is the longest word of `p`.
pub fn oracle_tau(models: &[MatrixModel], p: &NCPoly) -> Result<Scalar> {
    FreeProductSpace::for_poly(models, p)?.oracle_tau(p)
}
