//! Formal complex linear combinations of graded words in the generators
//! M, Mt, F[..], Ft[..], with canonical ordering, grading and evaluation to
//! concrete 4×4 matrices at a point (metric, y).
//!
//! Words are kept formal rather than collapsed to their 2-dimensional matrix
//! image so the grading survives evaluation-time collapse: every evaluated
//! word lands in span{𝕀₄, slash(ŷ)}, but its degree is a property of the
//! word, not of the matrix.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;

use crate::cmatrix::CMat4;
use crate::error::{Error, Result};
use crate::gamma::{GammaRep, RepId};
use crate::metric::{Frame4, Metric4, OneForm, Tangent};
use crate::scalar::Real;

/// Generator families. `M`/`Mt` are the normalized degree-0 pair; `F`/`Ft`
/// carry 1 to 3 one-form labels and have degree equal to their arity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GeneratorKind {
    M,
    Mt,
    F,
    Ft,
}

impl GeneratorKind {
    pub fn arity_range(self) -> std::ops::RangeInclusive<usize> {
        match self {
            GeneratorKind::M | GeneratorKind::Mt => 0..=0,
            GeneratorKind::F | GeneratorKind::Ft => 1..=3,
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorKind::M => write!(f, "M"),
            GeneratorKind::Mt => write!(f, "Mt"),
            GeneratorKind::F => write!(f, "F"),
            GeneratorKind::Ft => write!(f, "Ft"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Generator {
    kind: GeneratorKind,
    forms: Vec<String>,
}

impl Generator {
    pub fn new(kind: GeneratorKind, forms: Vec<String>) -> Result<Self> {
        if !kind.arity_range().contains(&forms.len()) {
            return Err(Error::UnsupportedArity(forms.len()));
        }
        Ok(Self { kind, forms })
    }

    pub fn m() -> Self {
        Self {
            kind: GeneratorKind::M,
            forms: Vec::new(),
        }
    }

    pub fn mt() -> Self {
        Self {
            kind: GeneratorKind::Mt,
            forms: Vec::new(),
        }
    }

    pub fn f(forms: &[&str]) -> Result<Self> {
        Self::new(
            GeneratorKind::F,
            forms.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn ft(forms: &[&str]) -> Result<Self> {
        Self::new(
            GeneratorKind::Ft,
            forms.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn forms(&self) -> &[String] {
        &self.forms
    }

    /// y-homogeneity degree: 0 for M/Mt, arity for the form families.
    pub fn degree(&self) -> usize {
        match self.kind {
            GeneratorKind::M | GeneratorKind::Mt => 0,
            GeneratorKind::F | GeneratorKind::Ft => self.forms.len(),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if !self.forms.is_empty() {
            write!(f, "[{}]", self.forms.join(","))?;
        }
        Ok(())
    }
}

/// Evaluation point: metric with its orthonormal frame, named 1-forms, the
/// tangent vector y, a gamma representation matching the frame metric, and
/// the null-cone tolerance guarding the normalized generators.
#[derive(Clone, Debug)]
pub struct EvalContext<T> {
    pub metric: Metric4<T>,
    pub frame: Frame4<T>,
    forms: BTreeMap<String, OneForm<T>>,
    pub y: Tangent<T>,
    pub rep: GammaRep<T>,
    pub tol_null: T,
}

impl<T: Real> EvalContext<T> {
    pub fn new(
        metric: Metric4<T>,
        forms: Vec<OneForm<T>>,
        y: Tangent<T>,
        rep_id: RepId,
        tol_null: T,
    ) -> Result<Self> {
        let frame = metric.orthonormal_frame()?;
        let rep = GammaRep::build(rep_id, metric.signature());
        let mut map = BTreeMap::new();
        for f in forms {
            if map.insert(f.name.clone(), f).is_some() {
                return Err(Error::InvalidContext("duplicate 1-form name".into()));
            }
        }
        Ok(Self {
            metric,
            frame,
            forms: map,
            y,
            rep,
            tol_null,
        })
    }

    /// Same point with a different tangent vector.
    pub fn with_y(&self, y: Tangent<T>) -> Self {
        let mut c = self.clone();
        c.y = y;
        c
    }

    /// Same point with one extra (or replaced) 1-form bound.
    pub fn with_form(&self, form: OneForm<T>) -> Self {
        let mut c = self.clone();
        c.forms.insert(form.name.clone(), form);
        c
    }

    pub fn form(&self, name: &str) -> Result<&OneForm<T>> {
        self.forms
            .get(name)
            .ok_or_else(|| Error::UnknownForm(name.to_string()))
    }

    pub fn form_names(&self) -> impl Iterator<Item = &str> {
        self.forms.keys().map(|s| s.as_str())
    }

    pub fn norm_squared_y(&self) -> T {
        self.metric.norm_squared(&self.y)
    }

    pub fn y_frame(&self) -> [T; 4] {
        self.frame.vector_to_frame(&self.y)
    }

    pub fn slash_y(&self) -> CMat4<T> {
        self.rep.slash(&self.y_frame())
    }
}

/// Evaluates one generator at the context point.
///
/// M  → slash(ŷ)/|g(y,y)|^{1/2} − 𝕀₄   (Mt with +𝕀₄)
/// F  → slash(ŷ)^k − (A·y)(B·y)…·𝕀₄    (Ft with +)
pub fn evaluate_generator<T: Real>(g: &Generator, ctx: &EvalContext<T>) -> Result<CMat4<T>> {
    let slash = ctx.slash_y();
    let id = CMat4::identity();
    match g.kind {
        GeneratorKind::M | GeneratorKind::Mt => {
            let gy = ctx.norm_squared_y();
            if gy.abs() <= ctx.tol_null {
                return Err(Error::NullVectorForM {
                    norm: gy.to_f64_lossy(),
                });
            }
            let normalized = slash.scale_re(T::one() / gy.abs().sqrt());
            Ok(match g.kind {
                GeneratorKind::M => normalized - id,
                _ => normalized + id,
            })
        }
        GeneratorKind::F | GeneratorKind::Ft => {
            let mut pairing = T::one();
            for name in &g.forms {
                pairing = pairing * ctx.form(name)?.pair(&ctx.y);
            }
            let lead = slash.pow(g.forms.len());
            Ok(match g.kind {
                GeneratorKind::F => lead - id.scale_re(pairing),
                _ => lead + id.scale_re(pairing),
            })
        }
    }
}

/// Canonically ordered factor sequence; the key of a word.
pub type WordKey = Vec<Generator>;

fn word_degree(key: &WordKey) -> usize {
    key.iter().map(|g| g.degree()).sum()
}

/// Formal complex linear combination of words. Words are stored with sorted
/// factor sequences (the algebra is commutative, so sorting is sound), like
/// terms merged and exact-zero coefficients pruned.
#[derive(Clone, PartialEq, Debug)]
pub struct AlgebraElement<T> {
    words: BTreeMap<WordKey, Complex<T>>,
}

impl<T: Real> AlgebraElement<T> {
    pub fn zero() -> Self {
        Self {
            words: BTreeMap::new(),
        }
    }

    /// Multiplicative identity: the empty word with coefficient 1.
    pub fn one() -> Self {
        Self::word(Vec::new(), Complex::new(T::one(), T::zero()))
    }

    pub fn from_generator(g: Generator) -> Self {
        Self::word(vec![g], Complex::new(T::one(), T::zero()))
    }

    pub fn word(mut factors: Vec<Generator>, coefficient: Complex<T>) -> Self {
        factors.sort();
        let mut words = BTreeMap::new();
        if !(coefficient.re == T::zero() && coefficient.im == T::zero()) {
            words.insert(factors, coefficient);
        }
        Self { words }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = (&WordKey, &Complex<T>)> {
        self.words.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut words = self.words.clone();
        for (key, c) in &other.words {
            let entry = words
                .entry(key.clone())
                .or_insert_with(|| Complex::new(T::zero(), T::zero()));
            *entry = *entry + *c;
            if entry.re == T::zero() && entry.im == T::zero() {
                words.remove(key);
            }
        }
        Self { words }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        if c.re == T::zero() && c.im == T::zero() {
            return Self::zero();
        }
        Self {
            words: self
                .words
                .iter()
                .map(|(k, v)| (k.clone(), *v * c))
                .collect(),
        }
    }

    pub fn scale_re(&self, c: T) -> Self {
        self.scale(Complex::new(c, T::zero()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in &self.words {
            for (kb, cb) in &other.words {
                let mut key = ka.clone();
                key.extend(kb.iter().cloned());
                key.sort();
                let c = *ca * *cb;
                let entry = out
                    .words
                    .entry(key.clone())
                    .or_insert_with(|| Complex::new(T::zero(), T::zero()));
                *entry = *entry + c;
                if entry.re == T::zero() && entry.im == T::zero() {
                    out.words.remove(&key);
                }
            }
        }
        out
    }

    /// Partition of words by total degree; the parts sum back to `self`.
    pub fn grade_decompose(&self) -> BTreeMap<usize, Self> {
        let mut parts: BTreeMap<usize, Self> = BTreeMap::new();
        for (key, c) in &self.words {
            let d = word_degree(key);
            parts
                .entry(d)
                .or_insert_with(Self::zero)
                .words
                .insert(key.clone(), *c);
        }
        parts
    }

    pub fn grade_part(&self, k: usize) -> Self {
        self.grade_decompose().remove(&k).unwrap_or_else(Self::zero)
    }

    pub fn max_degree(&self) -> usize {
        self.words.keys().map(|k| word_degree(k)).max().unwrap_or(0)
    }

    /// Σ_words coefficient × Π evaluate_generator(factor).
    pub fn evaluate(&self, ctx: &EvalContext<T>) -> Result<CMat4<T>> {
        let mut out = CMat4::zero();
        for (key, c) in &self.words {
            let mut prod = CMat4::identity();
            for g in key {
                prod = prod * evaluate_generator(g, ctx)?;
            }
            out = out + prod.scale(*c);
        }
        Ok(out)
    }

    /// Canonical textual form, e.g. `(1+0i)*M*F[A] + (2+0i)*Ft[A]`.
    pub fn canonical_text(&self) -> String {
        if self.words.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (key, c) in &self.words {
            let mut s = format!("({}{:+}i)", c.re, c.im);
            if key.is_empty() {
                s.push_str("*1");
            } else {
                for g in key {
                    s.push('*');
                    s.push_str(&g.to_string());
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

/// eval(a)·eval(b) − eval(b)·eval(a); vanishes for any two elements of the
/// commutative span at a shared context.
pub fn commutator<T: Real>(
    a: &AlgebraElement<T>,
    b: &AlgebraElement<T>,
    ctx: &EvalContext<T>,
) -> Result<CMat4<T>> {
    let ma = a.evaluate(ctx)?;
    let mb = b.evaluate(ctx)?;
    Ok(ma * mb - mb * ma)
}
