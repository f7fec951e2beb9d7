//! 4D pseudo-Riemannian metrics with signature bookkeeping, causal
//! classification, dual metrics and orthonormal frames. Everything downstream
//! evaluates in a frame where the metric has components diag(±1).

use std::fmt;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cmatrix::{dot4, sym_eigen, RMat4};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Ordered quadruple of signs, one per orthonormal axis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Signature(pub [i8; 4]);

/// Default convention: timelike vectors have negative norm.
pub const MOSTLY_PLUS: Signature = Signature([-1, 1, 1, 1]);
pub const MOSTLY_MINUS: Signature = Signature([1, -1, -1, -1]);

impl Signature {
    pub fn new(signs: [i8; 4]) -> Result<Self> {
        for s in signs {
            if s != 1 && s != -1 {
                return Err(Error::InvalidContext(format!(
                    "signature entries must be ±1, got {s}"
                )));
            }
        }
        Ok(Self(signs))
    }

    pub fn signs<T: Real>(&self) -> [T; 4] {
        let mut out = [T::zero(); 4];
        for i in 0..4 {
            out[i] = if self.0[i] > 0 { T::one() } else { -T::one() };
        }
        out
    }

    pub fn negative_count(&self) -> usize {
        self.0.iter().filter(|&&s| s < 0).count()
    }

    /// One sign differing from the other three.
    pub fn is_lorentzian(&self) -> bool {
        matches!(self.negative_count(), 1 | 3)
    }

    /// Parses `-+++` style strings or comma-separated `-1,1,1,1`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains(',') {
            let parts: Vec<&str> = t.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::InvalidContext(format!(
                    "signature `{s}` needs 4 entries"
                )));
            }
            let mut signs = [0i8; 4];
            for (i, p) in parts.iter().enumerate() {
                signs[i] = match p.trim() {
                    "1" | "+1" => 1,
                    "-1" => -1,
                    other => {
                        return Err(Error::InvalidContext(format!(
                            "signature entry `{other}` must be ±1"
                        )))
                    }
                };
            }
            return Ok(Self(signs));
        }
        let chars: Vec<char> = t.chars().collect();
        if chars.len() != 4 {
            return Err(Error::InvalidContext(format!(
                "signature `{s}` needs 4 signs"
            )));
        }
        let mut signs = [0i8; 4];
        for (i, c) in chars.iter().enumerate() {
            signs[i] = match c {
                '+' => 1,
                '-' => -1,
                other => {
                    return Err(Error::InvalidContext(format!(
                        "signature character `{other}` must be + or -"
                    )))
                }
            };
        }
        Ok(Self(signs))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.0 {
            write!(f, "{}", if s > 0 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = <[i8; 4]>::deserialize(deserializer)?;
        Signature::new(raw).map_err(D::Error::custom)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalCharacter {
    Timelike,
    Null,
    Spacelike,
}

impl fmt::Display for CausalCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CausalCharacter::Timelike => write!(f, "timelike"),
            CausalCharacter::Null => write!(f, "null"),
            CausalCharacter::Spacelike => write!(f, "spacelike"),
        }
    }
}

/// Tangent vector, upper-index components.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Tangent<T>(pub [T; 4]);

impl<T: Real> Tangent<T> {
    pub fn new(components: [T; 4]) -> Self {
        Self(components)
    }

    pub fn scaled(&self, lambda: T) -> Self {
        let mut c = self.0;
        for v in &mut c {
            *v = *v * lambda;
        }
        Self(c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut c = self.0;
        for i in 0..4 {
            c[i] = c[i] + other.0[i];
        }
        Self(c)
    }

    pub fn euclidean_norm(&self) -> T {
        dot4(&self.0, &self.0).sqrt()
    }
}

/// 1-form, lower-index components, carries the label used to reference it
/// from expressions.
#[derive(Clone, PartialEq, Debug)]
pub struct OneForm<T> {
    pub name: String,
    pub components: [T; 4],
}

impl<T: Real> OneForm<T> {
    pub fn new(name: impl Into<String>, components: [T; 4]) -> Self {
        Self {
            name: name.into(),
            components,
        }
    }

    /// Natural pairing A_i y^i; frame independent.
    pub fn pair(&self, y: &Tangent<T>) -> T {
        dot4(&self.components, &y.0)
    }
}

/// Non-degenerate symmetric bilinear form on a 4D tangent space.
///
/// The declared signature is an ordered sign quadruple whose inertia
/// (count of negative signs) must match the spectrum of `components`;
/// orthonormal frames are ordered to follow it.
#[derive(Clone, PartialEq, Debug)]
pub struct Metric4<T> {
    components: RMat4<T>,
    signature: Signature,
}

fn degeneracy_threshold<T: Real>(components: &RMat4<T>) -> T {
    let scale = components.max_abs().max(T::one());
    T::of(1e-12) * scale * scale * scale * scale
}

impl<T: Real> Metric4<T> {
    /// Builds a metric, symmetrizing the input exactly and validating
    /// non-degeneracy and the Sylvester inertia of the declared signature.
    pub fn new(components: RMat4<T>, signature: Signature) -> Result<Self> {
        let half = T::of(0.5);
        let mut sym = RMat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                sym.e[i][j] = half * (components.e[i][j] + components.e[j][i]);
            }
        }
        let det = sym.det();
        let threshold = degeneracy_threshold(&sym);
        if det.abs() <= threshold {
            return Err(Error::DegenerateMetric {
                det: det.to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
        let (vals, _) = sym_eigen(&sym);
        let actual_neg = vals.iter().filter(|v| **v < T::zero()).count();
        if actual_neg != signature.negative_count() {
            let mut actual = Signature([1; 4]);
            for (i, v) in vals.iter().enumerate() {
                actual.0[i] = if *v < T::zero() { -1 } else { 1 };
            }
            return Err(Error::SignatureMismatch {
                declared: signature.to_string(),
                actual: actual.to_string(),
            });
        }
        Ok(Self {
            components: sym,
            signature,
        })
    }

    /// Diagonal metric with entries equal to the signature signs.
    pub fn from_signature(signature: Signature) -> Self {
        Self {
            components: RMat4::diagonal(signature.signs()),
            signature,
        }
    }

    pub fn minkowski() -> Self {
        Self::from_signature(MOSTLY_PLUS)
    }

    pub fn components(&self) -> &RMat4<T> {
        &self.components
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    /// True when the components are exactly the diagonal sign matrix of the
    /// declared signature, i.e. the metric is already orthonormal.
    pub fn is_orthonormal_flat(&self) -> bool {
        let diag = RMat4::diagonal(self.signature.signs::<T>());
        self.components.max_diff(&diag) <= T::of(1e-12)
    }

    /// Symmetric bilinear extension g(y, z). Accumulation groups each term
    /// so a y/z swap hits the same float operations in the same order,
    /// keeping `norm_bilinear(y, z) == norm_bilinear(z, y)` bit for bit.
    pub fn norm_bilinear(&self, y: &Tangent<T>, z: &Tangent<T>) -> T {
        let g = &self.components.e;
        let mut acc = T::zero();
        for i in 0..4 {
            acc = acc + g[i][i] * (y.0[i] * z.0[i]);
        }
        for i in 0..4 {
            for j in i + 1..4 {
                acc = acc + g[i][j] * (y.0[i] * z.0[j] + z.0[i] * y.0[j]);
            }
        }
        acc
    }

    pub fn norm_squared(&self, y: &Tangent<T>) -> T {
        self.norm_bilinear(y, y)
    }

    pub fn causal_character(&self, y: &Tangent<T>, tol: T) -> CausalCharacter {
        let n = self.norm_squared(y);
        if n < -tol {
            CausalCharacter::Timelike
        } else if n <= tol {
            CausalCharacter::Null
        } else {
            CausalCharacter::Spacelike
        }
    }

    /// Matrix inverse with the same signature bookkeeping.
    pub fn dual(&self) -> Result<Self> {
        let det = self.components.det();
        let threshold = degeneracy_threshold(&self.components);
        if det.abs() <= threshold {
            return Err(Error::DegenerateMetric {
                det: det.to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
        let inv = self.components.inverse().ok_or(Error::DegenerateMetric {
            det: det.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        })?;
        // Re-symmetrize: inversion of a symmetric matrix is symmetric up to
        // rounding.
        let half = T::of(0.5);
        let mut sym = RMat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                sym.e[i][j] = half * (inv.e[i][j] + inv.e[j][i]);
            }
        }
        Ok(Self {
            components: sym,
            signature: self.signature,
        })
    }

    /// g*(a, a) = g^{ij} a_i a_j.
    pub fn dual_norm_squared(&self, a: &OneForm<T>) -> Result<T> {
        let dual = self.dual()?;
        let t = Tangent::new(a.components);
        Ok(dual.norm_squared(&t))
    }

    /// Raises an index: (a♯)^i = g^{ij} a_j.
    pub fn raise(&self, a: &OneForm<T>) -> Result<Tangent<T>> {
        let dual = self.dual()?;
        Ok(Tangent::new(dual.components.mat_vec(&a.components)))
    }

    /// Lowers an index: (y♭)_i = g_{ij} y^j.
    pub fn lower(&self, y: &Tangent<T>, name: impl Into<String>) -> OneForm<T> {
        OneForm::new(name, self.components.mat_vec(&y.0))
    }

    /// Orthonormal frame via symmetric eigendecomposition: columns are frame
    /// vectors scaled by |λ|^{-1/2}, ordered so the frame metric follows the
    /// declared signature sign by sign.
    pub fn orthonormal_frame(&self) -> Result<Frame4<T>> {
        let (vals, vecs) = sym_eigen(&self.components);
        let mut neg: Vec<usize> = (0..4).filter(|&k| vals[k] < T::zero()).collect();
        let mut pos: Vec<usize> = (0..4).filter(|&k| vals[k] >= T::zero()).collect();
        // Deterministic order inside each sign class: ascending eigenvalue.
        neg.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        pos.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        if neg.len() != self.signature.negative_count() {
            let mut actual = Signature([1; 4]);
            for (i, v) in vals.iter().enumerate() {
                actual.0[i] = if *v < T::zero() { -1 } else { 1 };
            }
            return Err(Error::SignatureMismatch {
                declared: self.signature.to_string(),
                actual: actual.to_string(),
            });
        }
        let mut neg_iter = neg.into_iter();
        let mut pos_iter = pos.into_iter();
        let mut basis = RMat4::zero();
        for slot in 0..4 {
            let k = if self.signature.0[slot] < 0 {
                neg_iter.next().unwrap()
            } else {
                pos_iter.next().unwrap()
            };
            let lambda = vals[k];
            if lambda == T::zero() {
                return Err(Error::DegenerateMetric {
                    det: 0.0,
                    threshold: degeneracy_threshold(&self.components).to_f64_lossy(),
                });
            }
            let scale = T::one() / lambda.abs().sqrt();
            let mut col = vecs.column(k);
            // Fix the overall eigenvector sign so frames are deterministic.
            let lead = col
                .iter()
                .find(|v| **v != T::zero())
                .copied()
                .unwrap_or(T::one());
            let orient = if lead < T::zero() {
                -T::one()
            } else {
                T::one()
            };
            for v in &mut col {
                *v = *v * scale * orient;
            }
            for i in 0..4 {
                basis.e[i][slot] = col[i];
            }
        }
        let basis_inv = basis.inverse().ok_or(Error::DegenerateMetric {
            det: 0.0,
            threshold: degeneracy_threshold(&self.components).to_f64_lossy(),
        })?;
        Ok(Frame4 {
            basis,
            basis_inv,
            eta: self.signature,
        })
    }
}

/// Orthonormal frame: `basisᵀ · g · basis = diag(eta)`.
#[derive(Clone, PartialEq, Debug)]
pub struct Frame4<T> {
    pub basis: RMat4<T>,
    basis_inv: RMat4<T>,
    pub eta: Signature,
}

impl<T: Real> Frame4<T> {
    /// Frame components ŷ of a tangent vector: y = basis · ŷ.
    pub fn vector_to_frame(&self, y: &Tangent<T>) -> [T; 4] {
        self.basis_inv.mat_vec(&y.0)
    }

    /// Frame components of a 1-form: Â_a = A(e_a).
    pub fn form_to_frame(&self, a: &OneForm<T>) -> [T; 4] {
        self.basis.transpose().mat_vec(&a.components)
    }

    /// Coordinate components of the a-th frame vector.
    pub fn axis(&self, slot: usize) -> Tangent<T> {
        Tangent::new(self.basis.column(slot))
    }

    /// First frame axis with the requested sign, when the signature has one.
    pub fn axis_with_sign(&self, sign: i8) -> Option<Tangent<T>> {
        (0..4)
            .find(|&s| self.eta.0[s] == sign)
            .map(|slot| self.axis(slot))
    }

    /// Residual of the defining relation, for verification.
    pub fn orthonormality_residual(&self, metric: &Metric4<T>) -> T {
        let btgb = self
            .basis
            .transpose()
            .mat_mul(metric.components())
            .mat_mul(&self.basis);
        btgb.max_diff(&RMat4::diagonal(self.eta.signs()))
    }
}

/// JSON description of a metric: either `{"signature": [-1,1,1,1]}` for
/// diagonal sign metrics or `{"components": [[...4 rows...]]}` for a general
/// symmetric matrix, optionally with an explicit signature to validate.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    #[serde(default)]
    pub signature: Option<Signature>,
    #[serde(default)]
    pub components: Option<[[f64; 4]; 4]>,
}

impl MetricSpec {
    pub fn build<T: Real>(&self) -> Result<Metric4<T>> {
        match (&self.components, &self.signature) {
            (None, Some(sig)) => Ok(Metric4::from_signature(*sig)),
            (Some(rows), declared) => {
                for row in rows {
                    for v in row {
                        if !v.is_finite() {
                            return Err(Error::InvalidContext(
                                "metric components must be finite".into(),
                            ));
                        }
                    }
                }
                let mut comp = RMat4::zero();
                for i in 0..4 {
                    for j in 0..4 {
                        comp.e[i][j] = T::of(rows[i][j]);
                    }
                }
                let signature = match declared {
                    Some(sig) => *sig,
                    None => {
                        // Derive the inertia and order negatives first.
                        let (vals, _) = sym_eigen(&comp);
                        let negs = vals.iter().filter(|v| **v < T::zero()).count();
                        let mut signs = [1i8; 4];
                        for s in signs.iter_mut().take(negs) {
                            *s = -1;
                        }
                        Signature(signs)
                    }
                };
                Metric4::new(comp, signature)
            }
            (None, None) => Err(Error::InvalidContext(
                "metric needs `signature` or `components`".into(),
            )),
        }
    }
}
