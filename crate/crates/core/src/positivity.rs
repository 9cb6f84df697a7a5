//! Gram matrices, PSD certification, Schur products and the
//! reflection-positivity harness for the product state.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::bifree::{BiFreeSystem, CenteredTerm};
use crate::component::{check_component_rp_capped, word_count};
use crate::error::{Error, Result};
use crate::ncpoly::{Letter, NCPoly, Scalar, Word};
use crate::random;

/// Gram matrix over a word basis together with its PSD verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct GramReport {
    pub basis: Vec<Word>,
    pub matrix: DMatrix<Scalar>,
    /// Smallest eigenvalue of the Hermitian part `(G + G*)/2`.
    pub min_eig: f64,
    pub psd: bool,
    /// Present iff `!psd`. Either `w*Gw < 0` or `w*Gw` is not real.
    pub witness: Option<DVector<Scalar>>,
    /// `max |G_kl − conj(G_lk)|`.
    pub hermitian_defect: f64,
    pub tol: f64,
}

impl GramReport {
    pub fn from_matrix(basis: Vec<Word>, matrix: DMatrix<Scalar>, tol: f64) -> Self {
        let hermitian_defect = hermitian_defect(&matrix);
        let hermitian_part = (&matrix + matrix.adjoint()) * Scalar::new(0.5, 0.0);
        let (values, vectors) = hermitian_eigen(&hermitian_part);
        let min_eig = values.first().copied().unwrap_or(0.0);
        let psd = min_eig >= -tol && hermitian_defect <= tol;
        let witness = if psd {
            None
        } else if min_eig < -tol {
            Some(canonical_phase(vectors.column(0).into_owned()))
        } else {
            // Hermitian part is PSD but G is not Hermitian: take the
            // direction where w*Gw has the largest imaginary part.
            let skew = (&matrix - matrix.adjoint()) * Scalar::new(0.0, -0.5);
            let (sv, svec) = hermitian_eigen(&skew);
            let k = if sv[0].abs() > sv[sv.len() - 1].abs() { 0 } else { sv.len() - 1 };
            Some(canonical_phase(svec.column(k).into_owned()))
        };
        Self { basis, matrix, min_eig, psd, witness, hermitian_defect, tol }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn hermitian_defect(m: &DMatrix<Scalar>) -> f64 {
    let n = m.nrows();
    let mut d: f64 = 0.0;
    for k in 0..n {
        for l in 0..n {
            d = d.max((m[(k, l)] - m[(l, k)].conj()).norm());
        }
    }
    d
}

/// Unit norm, largest-modulus entry real and positive.
fn canonical_phase(v: DVector<Scalar>) -> DVector<Scalar> {
    let mut best = 0;
    for k in 1..v.len() {
        if v[k].norm() > v[best].norm() + 1e-12 {
            best = k;
        }
    }
    let phase = if v[best].norm() > 0.0 { v[best].conj() / v[best].norm() } else { Scalar::new(1.0, 0.0) };
    let v = v * phase;
    let n = v.norm();
    v / Scalar::new(n, 0.0)
}

/// Eigenvalues (ascending) and matching eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &DMatrix<Scalar>) -> (Vec<f64>, DMatrix<Scalar>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let cols: Vec<DVector<Scalar>> = order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
    (values, DMatrix::from_columns(&cols))
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &DMatrix<Scalar>) -> f64 {
    let h = (m + m.adjoint()) * Scalar::new(0.5, 0.0);
    hermitian_eigen(&h).0.first().copied().unwrap_or(0.0)
}

/// `c* G c`.
pub fn quadratic_form(g: &DMatrix<Scalar>, c: &DVector<Scalar>) -> Scalar {
    c.dotc(&(g * c))
}

/// Entrywise (Schur) product.
pub fn hadamard(a: &DMatrix<Scalar>, b: &DMatrix<Scalar>) -> Result<DMatrix<Scalar>> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!("{:?} ∘ {:?}", a.shape(), b.shape())));
    }
    Ok(a.component_mul(b))
}

/// All positive words of length ≤ `max_len` over the system's generators,
/// sorted by (length, algebra id sequence, local id sequence).
pub fn positive_words(sys: &BiFreeSystem, max_len: usize) -> Result<Vec<Word>> {
    let letters: Vec<Letter> = sys
        .generator_counts()
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| (0..n).map(move |g| Letter::pos(i, g)))
        .collect();
    let size = word_count(letters.len(), max_len);
    let cap = sys.config().basis_cap;
    if size > cap {
        return Err(Error::BasisCap { size, cap });
    }
    let mut words = vec![Vec::new()];
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let next: Vec<Vec<Letter>> = layer
            .iter()
            .flat_map(|w| {
                letters.iter().map(move |l| {
                    let mut v = w.clone();
                    v.push(*l);
                    v
                })
            })
            .collect();
        words.extend(next.iter().cloned());
        layer = next;
    }
    words.sort_by_key(|w| {
        (
            w.len(),
            w.iter().map(|l| l.gen.algebra_id).collect::<Vec<_>>(),
            w.iter().map(|l| l.gen.local_id).collect::<Vec<_>>(),
        )
    });
    Ok(words.into_iter().map(Word::new).collect())
}

/// `Σ c_k w_k`.
pub fn combination(basis: &[Word], coeffs: &DVector<Scalar>) -> NCPoly {
    let mut p = NCPoly::zero();
    for (w, c) in basis.iter().zip(coeffs.iter()) {
        p.add_term(w.clone(), *c);
    }
    p
}

/// `G_kl = τ(θ(w_k) w_l)` over positive basis words, evaluated row-parallel.
pub fn build_gram(sys: &BiFreeSystem, basis: &[Word]) -> Result<GramReport> {
    let cap = sys.config().basis_cap;
    if basis.len() > cap {
        return Err(Error::BasisCap { size: basis.len(), cap });
    }
    if let Some(w) = basis.iter().find(|w| !w.is_positive()) {
        return Err(Error::InvalidModel(format!("Gram basis word {w} is not positive")));
    }
    let n = basis.len();
    let rows: Vec<Vec<Scalar>> = basis
        .par_iter()
        .map(|wk| {
            let reflected = wk.theta();
            basis.iter().map(|wl| sys.evaluate_word(&reflected.concat(wl))).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let matrix = DMatrix::from_fn(n, n, |k, l| rows[k][l]);
    Ok(GramReport::from_matrix(basis.to_vec(), matrix, sys.config().psd_tol))
}

/// Centered terms of one alternation pattern and the matrices of the
/// factor-wise positivity argument.
#[derive(Clone, Debug)]
pub struct PatternBlock {
    pub pattern: Vec<usize>,
    /// Unit-coefficient centered terms `a_n^{(k)}⋯a_1^{(k)}`.
    pub terms: Vec<CenteredTerm>,
    /// `levels[m]_{kl} = τ_{i_m}(θ(a_m^{(k)}) a_m^{(l)})`.
    pub levels: Vec<DMatrix<Scalar>>,
    /// Entrywise product of all levels.
    pub schur: DMatrix<Scalar>,
    /// `τ(θ(term_k) term_l)` through the product-state pairing.
    pub direct: DMatrix<Scalar>,
}

/// Groups the centered decompositions of `basis` by alternation pattern and
/// builds, per pattern, the component Gram matrix at each tensor level.
pub fn pattern_blocks(sys: &BiFreeSystem, basis: &[Word]) -> Result<Vec<PatternBlock>> {
    let mut groups: BTreeMap<Vec<usize>, Vec<CenteredTerm>> = BTreeMap::new();
    for w in basis {
        let p = NCPoly::monomial(w.clone(), Scalar::new(1.0, 0.0));
        for t in sys.center_decompose(&p)? {
            let unit = CenteredTerm { coefficient: Scalar::new(1.0, 0.0), factors: t.factors };
            let group = groups.entry(unit.pattern()).or_default();
            if !group.contains(&unit) {
                group.push(unit);
            }
        }
    }
    let mut blocks = Vec::with_capacity(groups.len());
    for (pattern, terms) in groups {
        let p = terms.len();
        let mut levels = Vec::with_capacity(pattern.len());
        for m in 0..pattern.len() {
            let mut g = DMatrix::zeros(p, p);
            for k in 0..p {
                for l in 0..p {
                    g[(k, l)] = sys.local_pairing(&terms[k].factors[m], &terms[l].factors[m])?;
                }
            }
            levels.push(g);
        }
        let mut schur = DMatrix::from_element(p, p, Scalar::new(1.0, 0.0));
        for g in &levels {
            schur = hadamard(&schur, g)?;
        }
        let mut direct = DMatrix::zeros(p, p);
        for k in 0..p {
            for l in 0..p {
                direct[(k, l)] = sys.centered_pairing(&terms[k], &terms[l])?;
            }
        }
        blocks.push(PatternBlock { pattern, terms, levels, schur, direct });
    }
    Ok(blocks)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoremStatus {
    Pass,
    /// Every component is reflection positive but the product is not.
    TheoremFailure,
    /// Some component is not reflection positive.
    HypothesisFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentVerdict {
    pub component: usize,
    pub min_eig: f64,
    pub hermitian_defect: f64,
    pub psd: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomCheck {
    pub trials: usize,
    pub min_real: f64,
    pub max_abs_imag: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub status: TheoremStatus,
    pub components: Vec<ComponentVerdict>,
    pub gram: GramReport,
    /// `τ(θ(a)a)` for `a` the Gram witness, evaluated directly.
    pub witness_value: Option<Scalar>,
    pub random: RandomCheck,
}

impl TheoremReport {
    pub fn hypothesis_holds(&self) -> bool {
        self.components.iter().all(|c| c.psd)
    }
}

/// Checks reflection positivity of the product on words of length ≤
/// `max_len`: every component first, then the product Gram matrix, then
/// `trials` random elements `a ∈ A⁺` with `τ(θ(a)a) ≥ −tol` and
/// `|Im τ(θ(a)a)| ≤ moment_tol`.
pub fn verify_theorem(sys: &BiFreeSystem, max_len: usize, trials: usize, tol: f64, seed: u64) -> Result<TheoremReport> {
    let cfg = sys.config();
    let mut components = Vec::with_capacity(sys.num_components());
    for i in 0..sys.num_components() {
        let r = check_component_rp_capped(sys.component(i)?, i, max_len, tol, cfg.basis_cap)?;
        components.push(ComponentVerdict {
            component: i,
            min_eig: r.min_eig,
            hermitian_defect: r.hermitian_defect,
            psd: r.psd,
        });
    }

    let basis = positive_words(sys, max_len)?;
    let mut gram = build_gram(sys, &basis)?;
    gram = GramReport::from_matrix(gram.basis, gram.matrix, tol);
    let witness_value = match &gram.witness {
        Some(w) => {
            let a = combination(&basis, w);
            Some(sys.evaluate_tau(&a.theta().mul_capped(&a, cfg.term_cap)?)?)
        }
        None => None,
    };

    let mut rng = random::rng(seed);
    let mut min_real = f64::INFINITY;
    let mut max_abs_imag: f64 = 0.0;
    for _ in 0..trials {
        let c = random::gaussian_vector(&mut rng, basis.len());
        let a = combination(&basis, &c);
        let v = sys.evaluate_tau(&a.theta().mul_capped(&a, cfg.term_cap)?)?;
        min_real = min_real.min(v.re);
        max_abs_imag = max_abs_imag.max(v.im.abs());
    }
    if trials == 0 {
        min_real = 0.0;
    }
    let random = RandomCheck {
        trials,
        min_real,
        max_abs_imag,
        passed: min_real >= -tol && max_abs_imag <= cfg.moment_tol,
    };

    let status = if !components.iter().all(|c| c.psd) {
        TheoremStatus::HypothesisFailure
    } else if gram.psd && random.passed {
        TheoremStatus::Pass
    } else {
        TheoremStatus::TheoremFailure
    };
    Ok(TheoremReport { status, components, gram, witness_value, random })
}
