//! The bi-free product functional.
//!
//! Every positive element is rewritten as a sum of centered alternating
//! products `b_n⋯b_1` with `b_k ∈ A_{i(k)}⁺`, `i(k) ≠ i(k+1)` and
//! `τ_{i(k)}(b_k) = 0`. For two such products the product state is
//!
//! ```text
//! τ(θ(a_m)⋯θ(a_1) b_n⋯b_1) = δ_mn ∏_k δ_{i(k) j(k)} τ_{i(k)}(θ(a_k) b_k)
//! ```
//!
//! and a general bipartite word `θ(a)·b` is evaluated by decomposing `a` and
//! `b` separately and summing over pairs.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rand::Rng;

use crate::component::{MatrixModel, MomentOracle, DEFAULT_BASIS_CAP};
use crate::error::{Error, Result};
use crate::ncpoly::{Letter, NCPoly, Scalar, Word, DEFAULT_TERM_CAP, DROP_TOL};
use crate::random;

/// Caps and tolerances shared by the evaluator and the harnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub term_cap: usize,
    /// `|τ_i(x)|` at or below this counts as centered.
    pub center_tol: f64,
    pub moment_tol: f64,
    pub psd_tol: f64,
    pub basis_cap: usize,
    pub dim_cap: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            term_cap: DEFAULT_TERM_CAP,
            center_tol: 1e-11,
            moment_tol: 1e-9,
            psd_tol: 1e-8,
            basis_cap: DEFAULT_BASIS_CAP,
            dim_cap: crate::fock::DEFAULT_DIM_CAP,
        }
    }
}

/// One element of `A_i⁺`, as a combination of local generator words.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalElement {
    algebra_id: usize,
    coeffs: BTreeMap<Vec<usize>, Scalar>,
}

impl LocalElement {
    pub fn zero(algebra_id: usize) -> Self {
        Self { algebra_id, coeffs: BTreeMap::new() }
    }

    pub fn unit(algebra_id: usize) -> Self {
        Self::monomial(algebra_id, Vec::new(), Scalar::new(1.0, 0.0))
    }

    pub fn monomial(algebra_id: usize, word: Vec<usize>, c: Scalar) -> Self {
        let mut e = Self::zero(algebra_id);
        e.add_term(word, c);
        e
    }

    pub fn algebra_id(&self) -> usize {
        self.algebra_id
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<usize>, Scalar> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, word: Vec<usize>, c: Scalar) {
        let entry = self.coeffs.entry(word.clone()).or_default();
        *entry += c;
        if entry.norm() < DROP_TOL {
            self.coeffs.remove(&word);
        }
    }

    /// Local product; both factors must belong to the same component.
    pub fn mul(&self, other: &LocalElement) -> LocalElement {
        assert_eq!(self.algebra_id, other.algebra_id, "local product across components");
        let mut out = Self::zero(self.algebra_id);
        for (u, a) in &self.coeffs {
            for (v, b) in &other.coeffs {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, a * b);
            }
        }
        out
    }

    /// `self − t·1`.
    pub fn minus_unit(&self, t: Scalar) -> LocalElement {
        let mut out = self.clone();
        out.add_term(Vec::new(), -t);
        out
    }

    pub fn to_poly(&self) -> NCPoly {
        let mut p = NCPoly::zero();
        for (w, c) in &self.coeffs {
            p.add_term(Word::new(w.iter().map(|&g| Letter::pos(self.algebra_id, g))), *c);
        }
        p
    }
}

/// `coefficient · b_n⋯b_1`, factors stored in operator order (`factors[0]`
/// is the leftmost, `b_n`).
#[derive(Clone, Debug, PartialEq)]
pub struct CenteredTerm {
    pub coefficient: Scalar,
    pub factors: Vec<LocalElement>,
}

impl CenteredTerm {
    pub fn pattern(&self) -> Vec<usize> {
        self.factors.iter().map(LocalElement::algebra_id).collect()
    }

    pub fn to_poly(&self) -> Result<NCPoly> {
        let mut p = NCPoly::scalar(self.coefficient);
        for f in &self.factors {
            p = p.mul(&f.to_poly())?;
        }
        Ok(p)
    }
}

/// Sum of the terms as a single polynomial.
pub fn reassemble(terms: &[CenteredTerm]) -> Result<NCPoly> {
    let mut p = NCPoly::zero();
    for t in terms {
        p = p.add(&t.to_poly()?);
    }
    Ok(p)
}

type MomentKey = (usize, Vec<usize>, Vec<usize>);

/// Registered components plus memoized local moments, decompositions and
/// word values. Immutable apart from the caches, which are safe for
/// concurrent use.
pub struct BiFreeSystem {
    components: Vec<Arc<dyn MomentOracle>>,
    config: Config,
    moments: RwLock<HashMap<MomentKey, Scalar>>,
    decompositions: RwLock<HashMap<Word, Arc<Vec<CenteredTerm>>>>,
    words: RwLock<HashMap<Word, Scalar>>,
}

impl BiFreeSystem {
    pub fn new(components: Vec<Arc<dyn MomentOracle>>, config: Config) -> Self {
        Self {
            components,
            config,
            moments: RwLock::default(),
            decompositions: RwLock::default(),
            words: RwLock::default(),
        }
    }

    pub fn from_models(models: &[MatrixModel], config: Config) -> Self {
        let components = models
            .iter()
            .map(|m| Arc::new(m.clone()) as Arc<dyn MomentOracle>)
            .collect();
        Self::new(components, config)
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn generator_counts(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.num_generators()).collect()
    }

    pub fn component(&self, i: usize) -> Result<&dyn MomentOracle> {
        self.components.get(i).map(|c| c.as_ref()).ok_or(Error::UnknownComponent(i))
    }

    pub fn check_letter(&self, letter: &Letter) -> Result<()> {
        let c = self.component(letter.gen.algebra_id)?;
        if letter.gen.local_id >= c.num_generators() {
            return Err(Error::UnknownGenerator {
                algebra_id: letter.gen.algebra_id,
                local_id: letter.gen.local_id,
            });
        }
        Ok(())
    }

    /// Memoized `τ_i(θ(neg)·pos)` on local monomials.
    pub fn moment(&self, algebra_id: usize, neg: &[usize], pos: &[usize]) -> Result<Scalar> {
        let key = (algebra_id, neg.to_vec(), pos.to_vec());
        if let Some(v) = self.moments.read().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = self.component(algebra_id)?.moment(neg, pos).map_err(|e| match e {
            Error::UnknownGenerator { local_id, .. } => Error::UnknownGenerator { algebra_id, local_id },
            other => other,
        })?;
        self.moments.write().unwrap().insert(key, v);
        Ok(v)
    }

    /// `τ_i(x)` for `x ∈ A_i⁺`.
    pub fn local_tau(&self, x: &LocalElement) -> Result<Scalar> {
        let mut s = Scalar::default();
        for (w, c) in x.coeffs() {
            s += c * self.moment(x.algebra_id(), &[], w)?;
        }
        Ok(s)
    }

    /// `τ_i(θ(a)·b)`, anti-linear in `a` and linear in `b`.
    pub fn local_pairing(&self, a: &LocalElement, b: &LocalElement) -> Result<Scalar> {
        assert_eq!(a.algebra_id(), b.algebra_id(), "pairing across components");
        let mut s = Scalar::default();
        for (u, alpha) in a.coeffs() {
            for (v, beta) in b.coeffs() {
                s += alpha.conj() * beta * self.moment(a.algebra_id(), u, v)?;
            }
        }
        Ok(s)
    }

    /// Rewrites a positive-face polynomial as a sum of centered alternating
    /// terms. The terms sum back to `p`.
    pub fn center_decompose(&self, p: &NCPoly) -> Result<Vec<CenteredTerm>> {
        if !p.is_positive() {
            return Err(Error::NotPositiveFace);
        }
        let mut out = Vec::new();
        for (w, c) in p.terms() {
            for t in self.decompose_word(w)?.iter() {
                out.push(CenteredTerm { coefficient: t.coefficient * c, factors: t.factors.clone() });
                if out.len() > self.config.term_cap {
                    return Err(Error::TermCap { count: out.len(), cap: self.config.term_cap });
                }
            }
        }
        Ok(out)
    }

    fn decompose_word(&self, w: &Word) -> Result<Arc<Vec<CenteredTerm>>> {
        if let Some(t) = self.decompositions.read().unwrap().get(w) {
            return Ok(Arc::clone(t));
        }
        debug_assert!(w.is_positive());
        let mut factors = Vec::with_capacity(w.len());
        for l in w.letters() {
            self.check_letter(l)?;
            factors.push(LocalElement::monomial(
                l.gen.algebra_id,
                vec![l.gen.local_id],
                Scalar::new(1.0, 0.0),
            ));
        }
        let terms = Arc::new(self.expand(Scalar::new(1.0, 0.0), factors)?);
        self.decompositions.write().unwrap().insert(w.clone(), Arc::clone(&terms));
        Ok(terms)
    }

    /// Repeatedly splits the first uncentered factor `x` into `x°` and
    /// `τ(x)·1`. Dropping a unit factor merges its neighbours, so the total
    /// factor count strictly falls along that branch.
    fn expand(&self, coefficient: Scalar, factors: Vec<LocalElement>) -> Result<Vec<CenteredTerm>> {
        let cap = self.config.term_cap;
        let mut out = Vec::new();
        let mut stack = vec![(coefficient, factors)];
        while let Some((coef, factors)) = stack.pop() {
            let factors = merge_adjacent(factors);
            if coef.norm() < DROP_TOL || factors.iter().any(LocalElement::is_zero) {
                continue;
            }
            let mut uncentered = None;
            for (j, f) in factors.iter().enumerate() {
                let t = self.local_tau(f)?;
                if t.norm() > self.config.center_tol {
                    uncentered = Some((j, t));
                    break;
                }
            }
            match uncentered {
                None => {
                    out.push(CenteredTerm { coefficient: coef, factors });
                    if out.len() > cap {
                        return Err(Error::TermCap { count: out.len(), cap });
                    }
                }
                Some((j, t)) => {
                    let mut centered = factors.clone();
                    centered[j] = centered[j].minus_unit(t);
                    let mut removed = factors;
                    removed.remove(j);
                    stack.push((coef * t, removed));
                    stack.push((coef, centered));
                }
            }
            if stack.len() > cap {
                return Err(Error::TermCap { count: stack.len(), cap });
            }
        }
        Ok(out)
    }

    /// Product-state pairing of `θ(a)` with `b` for two centered alternating
    /// terms, `a` given unreflected. Zero unless lengths and index patterns
    /// agree; the coefficient of `a` enters conjugated.
    pub fn centered_pairing(&self, a: &CenteredTerm, b: &CenteredTerm) -> Result<Scalar> {
        if a.factors.len() != b.factors.len()
            || a.factors.iter().zip(&b.factors).any(|(x, y)| x.algebra_id() != y.algebra_id())
        {
            return Ok(Scalar::default());
        }
        let mut v = a.coefficient.conj() * b.coefficient;
        for (x, y) in a.factors.iter().zip(&b.factors) {
            v *= self.local_pairing(x, y)?;
        }
        Ok(v)
    }

    /// `τ` of a single normal-form word, memoized.
    pub fn evaluate_word(&self, w: &Word) -> Result<Scalar> {
        if let Some(v) = self.words.read().unwrap().get(w) {
            return Ok(*v);
        }
        for l in w.letters() {
            self.check_letter(l)?;
        }
        let (neg, pos) = w.split();
        // θ(g_1)⋯θ(g_r) = θ(g_1⋯g_r)
        let a = neg.theta();
        let a_terms = self.decompose_word(&a)?;
        let b_terms = self.decompose_word(&pos)?;

        let mut by_pattern: HashMap<Vec<usize>, Vec<&CenteredTerm>> = HashMap::new();
        for t in b_terms.iter() {
            by_pattern.entry(t.pattern()).or_default().push(t);
        }
        let mut v = Scalar::default();
        for ta in a_terms.iter() {
            if let Some(matching) = by_pattern.get(&ta.pattern()) {
                for tb in matching {
                    v += self.centered_pairing(ta, tb)?;
                }
            }
        }
        self.words.write().unwrap().insert(w.clone(), v);
        Ok(v)
    }

    /// The product state on an arbitrary polynomial.
    pub fn evaluate_tau(&self, p: &NCPoly) -> Result<Scalar> {
        let mut v = Scalar::default();
        for (w, c) in p.terms() {
            v += c * self.evaluate_word(w)?;
        }
        Ok(v)
    }

    /// Random centered element of `A_i⁺` spanned by local words of length
    /// 1..=`max_len`.
    pub fn random_centered<R: Rng + ?Sized>(&self, algebra_id: usize, rng: &mut R, max_len: usize) -> Result<LocalElement> {
        let n = self.component(algebra_id)?.num_generators();
        let mut x = LocalElement::zero(algebra_id);
        for w in crate::component::local_words(n, max_len).into_iter().skip(1) {
            x.add_term(w, random::complex_gaussian(rng));
        }
        let t = self.local_tau(&x)?;
        Ok(x.minus_unit(t))
    }

    /// Samples products of random centered elements following `pattern` and
    /// checks that each has vanishing product state.
    pub fn verify_freeness(&self, pattern: &[usize], trials: usize, seed: u64) -> Result<bool> {
        if pattern.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotAlternating(pattern.to_vec()));
        }
        for &i in pattern {
            self.component(i)?;
        }
        let mut rng = random::rng(seed);
        for _ in 0..trials {
            let mut p = NCPoly::one();
            for &i in pattern {
                let x = self.random_centered(i, &mut rng, 2)?;
                p = p.mul_capped(&x.to_poly(), self.config.term_cap)?;
            }
            if self.evaluate_tau(&p)?.norm() > self.config.moment_tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn merge_adjacent(factors: Vec<LocalElement>) -> Vec<LocalElement> {
    let mut out: Vec<LocalElement> = Vec::with_capacity(factors.len());
    for f in factors {
        match out.last_mut() {
            Some(last) if last.algebra_id() == f.algebra_id() => *last = last.mul(&f),
            _ => out.push(f),
        }
    }
    out
}
