//! Dual trace engine.
//!
//! The numeric path sums diagonal entries of evaluated matrices. The symbolic
//! path evaluates traces of gamma words by the contraction recursion
//!
//!   Tr(γ_{i1}…γ_{in}) = Σ_{k=2..n} (−1)^k η_{i1 ik} Tr(word minus 1,k),
//!
//! anchored at Tr(𝕀₄) = 4 and zero for odd length. Algebra elements are
//! expanded into gamma words with scalar prefactors, so the two paths stay
//! independent and cross-validate each other.

use std::collections::HashMap;

use num_complex::Complex;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebra::{AlgebraElement, EvalContext, Generator, GeneratorKind};
use crate::cmatrix::CMat4;
use crate::error::{Error, Result};
use crate::metric::Signature;
use crate::scalar::Real;

/// Index sequence for a product γ_{i1}…γ_{in}; indices run 1..=4.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GammaWord(Vec<u8>);

impl GammaWord {
    pub fn new(indices: Vec<u8>) -> Result<Self> {
        for &i in &indices {
            if !(1..=4).contains(&i) {
                return Err(Error::GammaIndex(i));
            }
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cyclic rotation by `k` positions, for cyclicity checks.
    pub fn rotated(&self, k: usize) -> Self {
        if self.0.is_empty() {
            return self.clone();
        }
        let n = self.0.len();
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(self.0[(i + k) % n]);
        }
        Self(v)
    }
}

/// Sum of diagonal entries.
pub fn numeric_trace<T: Real>(m: &CMat4<T>) -> Complex<T> {
    m.trace()
}

fn symbolic_trace_memo<T: Real>(word: &[u8], signs: &[T; 4], memo: &mut HashMap<Vec<u8>, T>) -> T {
    let n = word.len();
    if n == 0 {
        return T::of(4.0);
    }
    if n % 2 == 1 {
        return T::zero();
    }
    if let Some(v) = memo.get(word) {
        return *v;
    }
    let first = word[0];
    let mut acc = T::zero();
    let mut sign = T::one(); // (−1)^k starting at k = 2
    for k in 1..n {
        if word[k] == first {
            let mut rest = Vec::with_capacity(n - 2);
            rest.extend_from_slice(&word[1..k]);
            rest.extend_from_slice(&word[k + 1..]);
            let eta = signs[(first - 1) as usize];
            acc = acc + sign * eta * symbolic_trace_memo(&rest, signs, memo);
        }
        sign = -sign;
    }
    memo.insert(word.to_vec(), acc);
    acc
}

/// Trace of a gamma word from the contraction recursion alone. Exact for
/// ±1 metric signs: every intermediate value is an integer.
pub fn symbolic_trace<T: Real>(word: &GammaWord, eta: Signature) -> T {
    let signs = eta.signs::<T>();
    let mut memo = HashMap::new();
    symbolic_trace_memo(&word.0, &signs, &mut memo)
}

/// Closed-form length-4 value 4(η_ij η_kl − η_ik η_jl + η_il η_jk).
pub fn length_four_closed_form<T: Real>(word: [u8; 4], eta: Signature) -> T {
    let signs = eta.signs::<T>();
    let e = |a: u8, b: u8| {
        if a == b {
            signs[(a - 1) as usize]
        } else {
            T::zero()
        }
    };
    let [i, j, k, l] = word;
    T::of(4.0) * (e(i, j) * e(k, l) - e(i, k) * e(j, l) + e(i, l) * e(j, k))
}

/// One factor of a word, linearized as α·slash(ŷ)^m + β·𝕀₄.
struct LinearFactor<T> {
    slash_coeff: T,
    slash_power: usize,
    scalar: T,
}

fn linearize_factor<T: Real>(g: &Generator, ctx: &EvalContext<T>) -> Result<LinearFactor<T>> {
    match g.kind() {
        GeneratorKind::M | GeneratorKind::Mt => {
            let gy = ctx.norm_squared_y();
            if gy.abs() <= ctx.tol_null {
                return Err(Error::NullVectorForM {
                    norm: gy.to_f64_lossy(),
                });
            }
            let sign = if g.kind() == GeneratorKind::M {
                -T::one()
            } else {
                T::one()
            };
            Ok(LinearFactor {
                slash_coeff: T::one() / gy.abs().sqrt(),
                slash_power: 1,
                scalar: sign,
            })
        }
        GeneratorKind::F | GeneratorKind::Ft => {
            let mut pairing = T::one();
            for name in g.forms() {
                pairing = pairing * ctx.form(name)?.pair(&ctx.y);
            }
            let sign = if g.kind() == GeneratorKind::F {
                -T::one()
            } else {
                T::one()
            };
            Ok(LinearFactor {
                slash_coeff: T::one(),
                slash_power: g.forms().len(),
                scalar: sign * pairing,
            })
        }
    }
}

/// Tr(slash(ŷ)^p) expanded over index tuples weighted by ŷ components, each
/// tuple traced through the contraction recursion.
fn slash_power_trace<T: Real>(
    yhat: &[T; 4],
    p: usize,
    signs: &[T; 4],
    memo: &mut HashMap<Vec<u8>, T>,
) -> T {
    if p == 0 {
        return T::of(4.0);
    }
    if p % 2 == 1 {
        return T::zero();
    }
    let active: Vec<u8> = (0..4u8)
        .filter(|&i| yhat[i as usize] != T::zero())
        .map(|i| i + 1)
        .collect();
    if active.is_empty() {
        return T::zero();
    }
    let mut total = T::zero();
    let mut word = vec![0u8; p];
    let mut stack = vec![0usize; p];
    let mut depth = 0usize;
    let mut coeff = vec![T::one(); p + 1];
    // Iterative enumeration of tuples over the active indices.
    loop {
        if depth == p {
            total = total + coeff[p] * symbolic_trace_memo(&word, signs, memo);
            depth -= 1;
            stack[depth] += 1;
            continue;
        }
        if stack[depth] == active.len() {
            stack[depth] = 0;
            if depth == 0 {
                break;
            }
            depth -= 1;
            stack[depth] += 1;
            continue;
        }
        let idx = active[stack[depth]];
        word[depth] = idx;
        coeff[depth + 1] = coeff[depth] * yhat[(idx - 1) as usize];
        depth += 1;
    }
    total
}

/// Expansion cost caps: beyond these the symbolic path degrades to `None`
/// in the report instead of enumerating 4^power index tuples.
const MAX_EXPANSION_FACTORS: usize = 16;
const MAX_SLASH_POWER: usize = 10;

/// Symbolic-path trace of an element: binomial expansion of each word over
/// its factors' slash and scalar parts, gamma words traced symbolically.
/// Returns `None` when a word exceeds the expansion caps.
pub fn symbolic_trace_of_element<T: Real>(
    a: &AlgebraElement<T>,
    ctx: &EvalContext<T>,
) -> Result<Option<Complex<T>>> {
    let yhat = ctx.y_frame();
    let signs = ctx.rep.signature().signs::<T>();
    let mut memo: HashMap<Vec<u8>, T> = HashMap::new();
    let mut total = Complex::new(T::zero(), T::zero());
    for (key, c) in a.words() {
        let factors: Vec<LinearFactor<T>> = key
            .iter()
            .map(|g| linearize_factor(g, ctx))
            .collect::<Result<_>>()?;
        let n = factors.len();
        let total_power: usize = factors.iter().map(|f| f.slash_power).sum();
        if n > MAX_EXPANSION_FACTORS || total_power > MAX_SLASH_POWER {
            return Ok(None);
        }
        let mut word_total = T::zero();
        for mask in 0u32..(1u32 << n) {
            let mut pre = T::one();
            let mut power = 0usize;
            for (b, f) in factors.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    pre = pre * f.slash_coeff;
                    power += f.slash_power;
                } else {
                    pre = pre * f.scalar;
                }
            }
            if pre == T::zero() {
                continue;
            }
            word_total = word_total + pre * slash_power_trace(&yhat, power, &signs, &mut memo);
        }
        total = total + *c * Complex::new(word_total, T::zero());
    }
    Ok(Some(total))
}

/// Numeric and symbolic traces of an element with their residual.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceReport<T> {
    pub expression: String,
    pub numeric: Complex<T>,
    pub symbolic: Option<Complex<T>>,
    pub residual: T,
}

impl<T: Real + Serialize> Serialize for TraceReport<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("TraceReport", 4)?;
        s.serialize_field("expr", &self.expression)?;
        s.serialize_field("numeric", &[self.numeric.re, self.numeric.im])?;
        match &self.symbolic {
            Some(z) => s.serialize_field("symbolic", &Some([z.re, z.im]))?,
            None => s.serialize_field("symbolic", &Option::<[T; 2]>::None)?,
        }
        s.serialize_field("residual", &self.residual)?;
        s.end()
    }
}

/// Traces an element along both paths and reports the residual. The
/// symbolic entry is absent for words beyond the expansion caps; the
/// residual is defined only when both paths are present.
pub fn trace_of_element<T: Real>(
    a: &AlgebraElement<T>,
    ctx: &EvalContext<T>,
) -> Result<TraceReport<T>> {
    let numeric = numeric_trace(&a.evaluate(ctx)?);
    let symbolic = symbolic_trace_of_element(a, ctx)?;
    let residual = match &symbolic {
        Some(s) => (numeric - s).norm(),
        None => T::zero(),
    };
    Ok(TraceReport {
        expression: a.canonical_text(),
        numeric,
        symbolic,
        residual,
    })
}
