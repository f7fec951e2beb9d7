//! Concrete 4×4 gamma-matrix representations satisfying
//! γ_i γ_j + γ_j γ_i = 2 η_ij 𝕀₄ for any 4D sign pattern.
//!
//! Three audited base sets (Dirac, Weyl, Majorana) are stored for the
//! signature (+,−,−,−); any other signature is reached by multiplying each
//! generator whose square must flip sign by the imaginary unit, which
//! preserves tracelessness and all cross anticommutators.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::Serialize;
use serde_json::json;

use crate::cmatrix::CMat4;
use crate::error::{Error, Result};
use crate::metric::{Signature, MOSTLY_MINUS};
use crate::scalar::Real;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RepId {
    Dirac,
    Weyl,
    Majorana,
}

impl RepId {
    pub const ALL: [RepId; 3] = [RepId::Dirac, RepId::Weyl, RepId::Majorana];
}

impl fmt::Display for RepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepId::Dirac => write!(f, "dirac"),
            RepId::Weyl => write!(f, "weyl"),
            RepId::Majorana => write!(f, "majorana"),
        }
    }
}

impl FromStr for RepId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirac" => Ok(RepId::Dirac),
            "weyl" => Ok(RepId::Weyl),
            "majorana" => Ok(RepId::Majorana),
            other => Err(Error::InvalidContext(format!(
                "unknown representation `{other}` (expected dirac, weyl or majorana)"
            ))),
        }
    }
}

type Block<T> = [[Complex<T>; 2]; 2];

fn cz<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::of(re), T::of(im))
}

fn pauli<T: Real>(k: usize) -> Block<T> {
    match k {
        0 => [[cz(1.0, 0.0), cz(0.0, 0.0)], [cz(0.0, 0.0), cz(1.0, 0.0)]],
        1 => [[cz(0.0, 0.0), cz(1.0, 0.0)], [cz(1.0, 0.0), cz(0.0, 0.0)]],
        2 => [[cz(0.0, 0.0), cz(0.0, -1.0)], [cz(0.0, 1.0), cz(0.0, 0.0)]],
        3 => [[cz(1.0, 0.0), cz(0.0, 0.0)], [cz(0.0, 0.0), cz(-1.0, 0.0)]],
        _ => unreachable!(),
    }
}

fn block_scale<T: Real>(b: Block<T>, c: Complex<T>) -> Block<T> {
    [[b[0][0] * c, b[0][1] * c], [b[1][0] * c, b[1][1] * c]]
}

fn zero_block<T: Real>() -> Block<T> {
    [[cz(0.0, 0.0), cz(0.0, 0.0)], [cz(0.0, 0.0), cz(0.0, 0.0)]]
}

fn from_blocks<T: Real>(a: Block<T>, b: Block<T>, c: Block<T>, d: Block<T>) -> CMat4<T> {
    CMat4::from_fn(|i, j| match (i / 2, j / 2) {
        (0, 0) => a[i][j],
        (0, 1) => b[i][j - 2],
        (1, 0) => c[i - 2][j],
        (1, 1) => d[i - 2][j - 2],
        _ => unreachable!(),
    })
}

/// Base generator set for signature (+,−,−,−).
fn base_set<T: Real>(rep: RepId) -> [CMat4<T>; 4] {
    let i1: Block<T> = pauli(0);
    let s1: Block<T> = pauli(1);
    let s2: Block<T> = pauli(2);
    let s3: Block<T> = pauli(3);
    let neg = cz::<T>(-1.0, 0.0);
    let im = cz::<T>(0.0, 1.0);
    let mim = cz::<T>(0.0, -1.0);
    let z = zero_block::<T>();
    match rep {
        RepId::Dirac => [
            from_blocks(i1, z, z, block_scale(i1, neg)),
            from_blocks(z, s1, block_scale(s1, neg), z),
            from_blocks(z, s2, block_scale(s2, neg), z),
            from_blocks(z, s3, block_scale(s3, neg), z),
        ],
        RepId::Weyl => [
            from_blocks(z, i1, i1, z),
            from_blocks(z, s1, block_scale(s1, neg), z),
            from_blocks(z, s2, block_scale(s2, neg), z),
            from_blocks(z, s3, block_scale(s3, neg), z),
        ],
        RepId::Majorana => [
            from_blocks(z, s2, s2, z),
            from_blocks(block_scale(s3, im), z, z, block_scale(s3, im)),
            from_blocks(z, block_scale(s2, neg), s2, z),
            from_blocks(block_scale(s1, mim), z, z, block_scale(s1, mim)),
        ],
    }
}

/// Ordered quadruple of gamma matrices for a fixed signature.
#[derive(Clone, PartialEq, Debug)]
pub struct GammaRep<T> {
    gammas: [CMat4<T>; 4],
    signature: Signature,
    rep_id: RepId,
}

impl<T: Real> GammaRep<T> {
    /// Builds the representation for any of the 16 sign patterns.
    pub fn build(rep_id: RepId, signature: Signature) -> Self {
        let mut gammas = base_set::<T>(rep_id);
        for (slot, g) in gammas.iter_mut().enumerate() {
            if signature.0[slot] != MOSTLY_MINUS.0[slot] {
                *g = g.scale(cz(0.0, 1.0));
            }
        }
        Self {
            gammas,
            signature,
            rep_id,
        }
    }

    pub fn gamma(&self, slot: usize) -> &CMat4<T> {
        &self.gammas[slot]
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn rep_id(&self) -> RepId {
        self.rep_id
    }

    /// Contraction Σ_i v^i γ_i for frame components v.
    pub fn slash(&self, v: &[T; 4]) -> CMat4<T> {
        let mut out = CMat4::zero();
        for (slot, g) in self.gammas.iter().enumerate() {
            if v[slot] != T::zero() {
                out = out + g.scale_re(v[slot]);
            }
        }
        out
    }

    /// Worst anticommutator residual max‖{γ_i,γ_j} − 2η_ij𝕀‖ over all pairs.
    pub fn clifford_residual(&self) -> T {
        let signs = self.signature.signs::<T>();
        let mut worst = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                let anti = *self.gamma(i) * *self.gamma(j) + *self.gamma(j) * *self.gamma(i);
                let expected = if i == j {
                    CMat4::identity().scale_re(T::of(2.0) * signs[i])
                } else {
                    CMat4::zero()
                };
                let r = (anti - expected).max_norm();
                if r > worst {
                    worst = r;
                }
            }
        }
        worst
    }

    /// Debug serialization: gammas as nested [re, im] pairs.
    pub fn to_json(&self) -> serde_json::Value
    where
        T: Serialize,
    {
        json!({
            "rep": self.rep_id.to_string(),
            "signature": self.signature.0,
            "gammas": self.gammas.iter().collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MOSTLY_PLUS;

    fn all_signatures() -> Vec<Signature> {
        let mut out = Vec::new();
        for bits in 0..16u8 {
            let mut s = [1i8; 4];
            for (slot, v) in s.iter_mut().enumerate() {
                if bits & (1 << slot) != 0 {
                    *v = -1;
                }
            }
            out.push(Signature(s));
        }
        out
    }

    #[test]
    fn clifford_relation_all_reps_all_signatures() {
        for sig in all_signatures() {
            for rep_id in RepId::ALL {
                let rep = GammaRep::<f64>::build(rep_id, sig);
                assert!(
                    rep.clifford_residual() == 0.0,
                    "residual for {rep_id} {sig} should be exactly zero on ±1 entries"
                );
            }
        }
    }

    #[test]
    fn gammas_are_traceless() {
        for rep_id in RepId::ALL {
            let rep = GammaRep::<f64>::build(rep_id, MOSTLY_PLUS);
            for i in 0..4 {
                let t = rep.gamma(i).trace();
                assert_eq!(t.re, 0.0);
                assert_eq!(t.im, 0.0);
            }
        }
    }

    #[test]
    fn pair_traces_match_metric() {
        for sig in [MOSTLY_PLUS, MOSTLY_MINUS] {
            for rep_id in RepId::ALL {
                let rep = GammaRep::<f64>::build(rep_id, sig);
                let signs = sig.signs::<f64>();
                for i in 0..4 {
                    for j in 0..4 {
                        let t = (*rep.gamma(i) * *rep.gamma(j)).trace();
                        let expected = if i == j { 4.0 * signs[i] } else { 0.0 };
                        assert!(
                            (t.re - expected).abs() < 1e-12 && t.im.abs() < 1e-12,
                            "Tr(γ{i}γ{j}) = {t} in {rep_id} {sig}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn timelike_generator_squares_negative() {
        let rep = GammaRep::<f64>::build(RepId::Dirac, MOSTLY_PLUS);
        let sq = *rep.gamma(0) * *rep.gamma(0);
        let expected = CMat4::identity().scale_re(-1.0);
        assert!((sq - expected).max_norm() == 0.0);
    }

    #[test]
    fn slash_examples() {
        let rep = GammaRep::<f64>::build(RepId::Dirac, MOSTLY_PLUS);
        assert_eq!(rep.slash(&[0.0; 4]), CMat4::zero());
        assert_eq!(rep.slash(&[1.0, 0.0, 0.0, 0.0]), *rep.gamma(0));

        // slash(y)² = η(y,y)·𝕀 for a generic vector.
        let y = [0.7, -1.3, 0.4, 2.1];
        let eta: f64 = -y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
        let sq = rep.slash(&y) * rep.slash(&y);
        let residual = (sq - CMat4::identity().scale_re(eta)).max_norm();
        assert!(residual <= 1e-12 * (1.0 + y.iter().map(|v| v * v).sum::<f64>()));
    }

    #[test]
    fn json_dump_has_expected_shape() {
        let rep = GammaRep::<f64>::build(RepId::Weyl, MOSTLY_PLUS);
        let v = rep.to_json();
        assert_eq!(v["rep"], "weyl");
        assert_eq!(v["gammas"].as_array().unwrap().len(), 4);
        assert_eq!(v["gammas"][0][0][0].as_array().unwrap().len(), 2);
    }
}
