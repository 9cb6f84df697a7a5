//! Words and sparse noncommutative polynomials in bipartite normal form.
//!
//! Every generator `g` lives in the positive face of some component; its
//! reflection `θ(g)` lives in the negative face. Letters of opposite faces
//! commute, so every word has a unique normal form in which all reflected
//! letters precede all unreflected ones. The relative order inside each face
//! is never changed.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex coefficient type used throughout the crate.
pub type Scalar = Complex64;

/// Coefficients with modulus below this are dropped when terms combine.
pub const DROP_TOL: f64 = 1e-12;

/// Default maximum number of terms a product may produce.
pub const DEFAULT_TERM_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorRef {
    pub algebra_id: usize,
    pub local_id: usize,
}

impl GeneratorRef {
    pub fn new(algebra_id: usize, local_id: usize) -> Self {
        Self { algebra_id, local_id }
    }
}

/// A generator `g ∈ A_i⁺`, or its reflection `θ(g) ∈ A_i⁻` when `reflected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: GeneratorRef,
    pub reflected: bool,
}

impl Letter {
    pub fn pos(algebra_id: usize, local_id: usize) -> Self {
        Self { gen: GeneratorRef::new(algebra_id, local_id), reflected: false }
    }

    pub fn refl(algebra_id: usize, local_id: usize) -> Self {
        Self { gen: GeneratorRef::new(algebra_id, local_id), reflected: true }
    }

    pub fn theta(self) -> Self {
        Self { reflected: !self.reflected, ..self }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.reflected {
            write!(f, "~")?;
        }
        write!(f, "{}.{}", self.gen.algebra_id, self.gen.local_id)
    }
}

/// A monomial in bipartite normal form: reflected letters first, then
/// unreflected letters. The empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Stable two-face partition of `letters`: reflected letters move left past
/// unreflected ones, nothing else is reordered.
pub fn normalize<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let (mut neg, pos): (Vec<Letter>, Vec<Letter>) =
        letters.into_iter().partition(|l| l.reflected);
    neg.extend(pos);
    Word { letters: neg }
}

impl Word {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn new<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        normalize(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of reflected letters, i.e. the index of the face boundary.
    pub fn boundary(&self) -> usize {
        self.letters.iter().take_while(|l| l.reflected).count()
    }

    pub fn neg_letters(&self) -> &[Letter] {
        &self.letters[..self.boundary()]
    }

    pub fn pos_letters(&self) -> &[Letter] {
        &self.letters[self.boundary()..]
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| !l.reflected)
    }

    pub fn concat(&self, other: &Word) -> Word {
        normalize(self.letters.iter().chain(&other.letters).copied())
    }

    /// Letter-wise reflection; order is preserved because θ is multiplicative.
    pub fn theta(&self) -> Word {
        normalize(self.letters.iter().map(|l| l.theta()))
    }

    /// Splits at the face boundary into (negative block, positive block).
    pub fn split(&self) -> (Word, Word) {
        let b = self.boundary();
        (
            Word { letters: self.letters[..b].to_vec() },
            Word { letters: self.letters[b..].to_vec() },
        )
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Sparse polynomial `Σ c_w w` over normal-form words.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NCPoly {
    terms: BTreeMap<Word, Scalar>,
}

impl NCPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(Scalar::new(1.0, 0.0))
    }

    pub fn scalar(c: Scalar) -> Self {
        Self::monomial(Word::unit(), c)
    }

    pub fn monomial(word: Word, c: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(word, c);
        p
    }

    /// Monomial from letters in operator order; the word is normalized.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I, c: Scalar) -> Self {
        Self::monomial(normalize(letters), c)
    }

    /// Adds `c·word`, combining with an existing term and dropping the
    /// result when it falls below [`DROP_TOL`].
    ///
    /// Panics on non-finite coefficients.
    pub fn add_term(&mut self, word: Word, c: Scalar) {
        assert!(c.is_finite(), "non-finite coefficient {c} for word {word}");
        match self.terms.entry(word) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().norm() < DROP_TOL {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if c.norm() >= DROP_TOL {
                    e.insert(c);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, word: &Word) -> Scalar {
        self.terms.get(word).copied().unwrap_or_default()
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn is_positive(&self) -> bool {
        self.terms.keys().all(Word::is_positive)
    }

    pub fn add(&self, other: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &NCPoly) -> NCPoly {
        self.add(&other.scale(Scalar::new(-1.0, 0.0)))
    }

    pub fn scale(&self, lambda: Scalar) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * lambda);
        }
        out
    }

    /// Product with the default term cap.
    pub fn mul(&self, other: &NCPoly) -> Result<NCPoly> {
        self.mul_capped(other, DEFAULT_TERM_CAP)
    }

    /// Bilinear product: words concatenate and re-normalize, coefficients
    /// multiply, like terms combine. Fails once more than `cap` distinct
    /// terms are live.
    pub fn mul_capped(&self, other: &NCPoly, cap: usize) -> Result<NCPoly> {
        let mut out = NCPoly::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a * b);
                if out.len() > cap {
                    return Err(Error::TermCap { count: out.len(), cap });
                }
            }
        }
        Ok(out)
    }

    /// Anti-linear reflection: toggles every letter's face and conjugates
    /// every coefficient.
    pub fn theta(&self) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            // adding +0 turns a conjugated -0 back into +0
            out.add_term(w.theta(), c.conj() + Scalar::default());
        }
        out
    }

    /// Per-term split `(negative word, positive word, coefficient)` with
    /// `term = coefficient · neg · pos`.
    pub fn split_faces(&self) -> Vec<(Word, Word, Scalar)> {
        self.terms
            .iter()
            .map(|(w, c)| {
                let (neg, pos) = w.split();
                (neg, pos, *c)
            })
            .collect()
    }

    /// Largest coefficient-wise difference to `other`.
    pub fn max_diff(&self, other: &NCPoly) -> f64 {
        let mut m: f64 = 0.0;
        for (w, c) in &self.terms {
            m = m.max((c - other.coeff(w)).norm());
        }
        for (w, c) in &other.terms {
            if !self.terms.contains_key(w) {
                m = m.max(c.norm());
            }
        }
        m
    }

    pub fn approx_eq(&self, other: &NCPoly, tol: f64) -> bool {
        self.max_diff(other) <= tol
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·{w}")?;
        }
        Ok(())
    }
}
