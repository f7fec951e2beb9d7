//! Flat-metric correspondence between algebra elements and first-order
//! differential operators: momentum-space symbols, central-difference
//! application to plane waves on a periodic lattice, and the non-homogeneous
//! norm function of the potential-coupled operator.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::algebra::{AlgebraElement, EvalContext, Generator};
use crate::cmatrix::{cvec_max_norm, cvec_sub, CMat4, CVec4};
use crate::error::{Error, Result};
use crate::gamma::GammaRep;
use crate::metric::{OneForm, Tangent};
use crate::scalar::Real;
use crate::trace::numeric_trace;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OperatorKind {
    /// i γ^i ∂_i − m 𝕀₄
    DiracMass,
    /// i (γ^i − A^i 𝕀₄) ∂_i
    DiracForm,
    /// i γ^i ∂_i − m·slash(A♯), the potential-coupled operator
    U1Covariant,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorKind::DiracMass => write!(f, "dirac-mass"),
            OperatorKind::DiracForm => write!(f, "dirac-form"),
            OperatorKind::U1Covariant => write!(f, "u1-covariant"),
        }
    }
}

impl FromStr for OperatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirac-mass" | "dirac_mass" | "mass" => Ok(OperatorKind::DiracMass),
            "dirac-form" | "dirac_form" | "dirac-a" | "form" => Ok(OperatorKind::DiracForm),
            "u1-covariant" | "u1_covariant" | "u1" => Ok(OperatorKind::U1Covariant),
            other => Err(Error::InvalidContext(format!(
                "unknown operator kind `{other}`"
            ))),
        }
    }
}

/// First-order operator on flat space.
#[derive(Clone, Debug)]
pub struct FlatOperator<T> {
    pub kind: OperatorKind,
    pub mass: T,
    pub form: Option<OneForm<T>>,
}

impl<T: Real> FlatOperator<T> {
    pub fn dirac_mass(mass: T) -> Result<Self> {
        if mass <= T::zero() {
            return Err(Error::MassRequired);
        }
        Ok(Self {
            kind: OperatorKind::DiracMass,
            mass,
            form: None,
        })
    }

    pub fn dirac_form(form: OneForm<T>) -> Self {
        Self {
            kind: OperatorKind::DiracForm,
            mass: T::zero(),
            form: Some(form),
        }
    }

    pub fn u1_covariant(mass: T, form: OneForm<T>) -> Self {
        Self {
            kind: OperatorKind::U1Covariant,
            mass,
            form: Some(form),
        }
    }

    fn form_ref(&self) -> Result<&OneForm<T>> {
        self.form
            .as_ref()
            .ok_or_else(|| Error::InvalidContext("operator needs a 1-form".into()))
    }
}

fn raise_flat<T: Real>(rep: &GammaRep<T>, lower: &[T; 4]) -> [T; 4] {
    let signs = rep.signature().signs::<T>();
    let mut out = [T::zero(); 4];
    for i in 0..4 {
        out[i] = signs[i] * lower[i];
    }
    out
}

/// Momentum-space symbol of the operator: derivatives replaced by the
/// covector p under the phase convention exp(−i p·x), so i∂_j ↦ p_j.
pub fn symbol_matrix<T: Real>(
    op: &FlatOperator<T>,
    p: &[T; 4],
    rep: &GammaRep<T>,
) -> Result<CMat4<T>> {
    let p_raised = raise_flat(rep, p);
    let slash_p = rep.slash(&p_raised);
    match op.kind {
        OperatorKind::DiracMass => {
            if op.mass <= T::zero() {
                return Err(Error::MassRequired);
            }
            Ok(slash_p - CMat4::identity().scale_re(op.mass))
        }
        OperatorKind::DiracForm => {
            let a = op.form_ref()?;
            // A^i p_i = g*(A, p) on the flat metric.
            let a_raised = raise_flat(rep, &a.components);
            let pairing = crate::cmatrix::dot4(&a_raised, p);
            Ok(slash_p - CMat4::identity().scale_re(pairing))
        }
        OperatorKind::U1Covariant => {
            let a = op.form_ref()?;
            let a_raised = raise_flat(rep, &a.components);
            Ok(slash_p - rep.slash(&a_raised).scale_re(op.mass))
        }
    }
}

/// Determinant of the mass-operator symbol in closed form:
/// det(slash(p♯) − m𝕀) = (m² − g*(p,p))², singular exactly on the shell
/// g*(p,p) = m².
pub fn mass_symbol_det<T: Real>(mass: T, p: &[T; 4], rep: &GammaRep<T>) -> T {
    let signs = rep.signature().signs::<T>();
    let mut gpp = T::zero();
    for i in 0..4 {
        gpp = gpp + signs[i] * p[i] * p[i];
    }
    let d = mass * mass - gpp;
    d * d
}

/// Plane wave u·exp(−i p_j x^j); p is a covector, u a spinor amplitude.
#[derive(Clone, Debug)]
pub struct PlaneWave<T> {
    pub momentum: [T; 4],
    pub amplitude: CVec4<T>,
}

impl<T: Real> PlaneWave<T> {
    pub fn new(momentum: [T; 4], amplitude: CVec4<T>) -> Result<Self> {
        if cvec_max_norm(&amplitude) == T::zero() {
            return Err(Error::InvalidContext("plane wave amplitude is zero".into()));
        }
        Ok(Self {
            momentum,
            amplitude,
        })
    }

    pub fn phase_at(&self, x: &[T; 4]) -> Complex<T> {
        let arg = -crate::cmatrix::dot4(&self.momentum, x);
        Complex::new(arg.cos(), arg.sin())
    }
}

/// Periodic 4D lattice with uniform spacing and points per axis.
#[derive(Clone, Copy, Debug)]
pub struct Lattice<T> {
    pub spacing: T,
    pub extent: usize,
}

impl<T: Real> Lattice<T> {
    pub fn new(spacing: T, extent: usize) -> Result<Self> {
        if spacing <= T::zero() {
            return Err(Error::InvalidContext(
                "lattice spacing must be positive".into(),
            ));
        }
        if extent < 8 {
            return Err(Error::InvalidContext(format!(
                "lattice extent {extent} below minimum 8"
            )));
        }
        Ok(Self { spacing, extent })
    }

    /// Spacing 2π/extent: box length 2π, so integer-mode momenta are
    /// commensurate and one mode spans exactly one wavelength.
    pub fn unit_box(extent: usize) -> Result<Self> {
        Self::new(T::of(std::f64::consts::TAU) / T::of(extent as f64), extent)
    }

    pub fn box_length(&self) -> T {
        self.spacing * T::of(self.extent as f64)
    }

    pub fn sites(&self) -> usize {
        self.extent * self.extent * self.extent * self.extent
    }

    fn check_commensurate(&self, p: &[T; 4]) -> Result<()> {
        let tau = T::of(std::f64::consts::TAU);
        for (j, &pj) in p.iter().enumerate() {
            let modes = pj * self.box_length() / tau;
            if (modes - modes.round()).abs() > T::of(1e-9) {
                return Err(Error::IncommensurateMomentum {
                    component: j,
                    value: pj.to_f64_lossy(),
                    box_len: self.box_length().to_f64_lossy(),
                });
            }
        }
        Ok(())
    }
}

/// Spinor field sampled on a lattice.
#[derive(Clone, Debug)]
pub struct Field4<T> {
    pub lattice: Lattice<T>,
    pub data: Vec<CVec4<T>>,
}

impl<T: Real> Field4<T> {
    fn index(extent: usize, idx: [usize; 4]) -> usize {
        ((idx[0] * extent + idx[1]) * extent + idx[2]) * extent + idx[3]
    }

    pub fn at(&self, idx: [usize; 4]) -> &CVec4<T> {
        &self.data[Self::index(self.lattice.extent, idx)]
    }
}

fn wave_field<T: Real>(w: &PlaneWave<T>, lat: &Lattice<T>) -> Field4<T> {
    let n = lat.extent;
    let h = lat.spacing;
    let mut data = Vec::with_capacity(lat.sites());
    let mut idx = [0usize; 4];
    loop {
        let x = [
            h * T::of(idx[0] as f64),
            h * T::of(idx[1] as f64),
            h * T::of(idx[2] as f64),
            h * T::of(idx[3] as f64),
        ];
        let phase = w.phase_at(&x);
        data.push([
            w.amplitude[0] * phase,
            w.amplitude[1] * phase,
            w.amplitude[2] * phase,
            w.amplitude[3] * phase,
        ]);
        // Odometer increment over the 4 axes.
        let mut axis = 3;
        loop {
            idx[axis] += 1;
            if idx[axis] < n {
                break;
            }
            idx[axis] = 0;
            if axis == 0 {
                return Field4 {
                    lattice: *lat,
                    data,
                };
            }
            axis -= 1;
        }
    }
}

struct DiscreteStencil<T> {
    /// Matrix applied to the centered difference along each axis.
    derivative: [CMat4<T>; 4],
    /// Pointwise matrix term.
    local: CMat4<T>,
}

fn stencil<T: Real>(op: &FlatOperator<T>, rep: &GammaRep<T>) -> Result<DiscreteStencil<T>> {
    let signs = rep.signature().signs::<T>();
    let i_unit = Complex::new(T::zero(), T::one());
    let mut derivative = [CMat4::zero(); 4];
    for j in 0..4 {
        // γ^j = η^{jj} γ_j contracted against ∂_j, times the overall i.
        derivative[j] = rep.gamma(j).scale_re(signs[j]).scale(i_unit);
    }
    let local = match op.kind {
        OperatorKind::DiracMass => {
            if op.mass <= T::zero() {
                return Err(Error::MassRequired);
            }
            CMat4::identity().scale_re(-op.mass)
        }
        OperatorKind::DiracForm => {
            let a = op.form_ref()?;
            let a_raised = raise_flat(rep, &a.components);
            for j in 0..4 {
                let correction = CMat4::identity().scale_re(a_raised[j]).scale(i_unit);
                derivative[j] = derivative[j] - correction;
            }
            CMat4::zero()
        }
        OperatorKind::U1Covariant => {
            let a = op.form_ref()?;
            let a_raised = raise_flat(rep, &a.components);
            rep.slash(&a_raised).scale_re(-op.mass)
        }
    };
    Ok(DiscreteStencil { derivative, local })
}

/// Applies the operator with centered differences to the sampled plane wave.
pub fn apply_discrete<T: Real>(
    op: &FlatOperator<T>,
    w: &PlaneWave<T>,
    lat: &Lattice<T>,
    rep: &GammaRep<T>,
) -> Result<Field4<T>> {
    lat.check_commensurate(&w.momentum)?;
    let st = stencil(op, rep)?;
    let field = wave_field(w, lat);
    let n = lat.extent;
    let inv_2h = T::one() / (T::of(2.0) * lat.spacing);
    let mut out = vec![[Complex::new(T::zero(), T::zero()); 4]; field.data.len()];
    let mut idx = [0usize; 4];
    for site in 0..field.data.len() {
        let mut acc = st.local.mat_vec(&field.data[site]);
        for axis in 0..4 {
            let mut up = idx;
            up[axis] = (idx[axis] + 1) % n;
            let mut dn = idx;
            dn[axis] = (idx[axis] + n - 1) % n;
            let fu = &field.data[Field4::<T>::index(n, up)];
            let fd = &field.data[Field4::<T>::index(n, dn)];
            let diff = [
                (fu[0] - fd[0]).scale(inv_2h),
                (fu[1] - fd[1]).scale(inv_2h),
                (fu[2] - fd[2]).scale(inv_2h),
                (fu[3] - fd[3]).scale(inv_2h),
            ];
            let term = st.derivative[axis].mat_vec(&diff);
            for k in 0..4 {
                acc[k] = acc[k] + term[k];
            }
        }
        out[site] = acc;
        let mut axis = 3;
        loop {
            idx[axis] += 1;
            if idx[axis] < n {
                break;
            }
            idx[axis] = 0;
            if axis == 0 {
                break;
            }
            axis -= 1;
        }
    }
    Ok(Field4 {
        lattice: *lat,
        data: out,
    })
}

/// Max-norm error of the discrete application against the exact symbol
/// action symbol·u·phase over all lattice sites.
pub fn max_error_vs_symbol<T: Real>(
    op: &FlatOperator<T>,
    w: &PlaneWave<T>,
    lat: &Lattice<T>,
    rep: &GammaRep<T>,
) -> Result<T> {
    let sym = symbol_matrix(op, &w.momentum, rep)?;
    let exact_amp = sym.mat_vec(&w.amplitude);
    let applied = apply_discrete(op, w, lat, rep)?;
    let n = lat.extent;
    let h = lat.spacing;
    let mut worst = T::zero();
    let mut idx = [0usize; 4];
    for site in 0..applied.data.len() {
        let x = [
            h * T::of(idx[0] as f64),
            h * T::of(idx[1] as f64),
            h * T::of(idx[2] as f64),
            h * T::of(idx[3] as f64),
        ];
        let phase = w.phase_at(&x);
        let expected = [
            exact_amp[0] * phase,
            exact_amp[1] * phase,
            exact_amp[2] * phase,
            exact_amp[3] * phase,
        ];
        let err = cvec_max_norm(&cvec_sub(&applied.data[site], &expected));
        if err > worst {
            worst = err;
        }
        let mut axis = 3;
        loop {
            idx[axis] += 1;
            if idx[axis] < n {
                break;
            }
            idx[axis] = 0;
            if axis == 0 {
                break;
            }
            axis -= 1;
        }
    }
    Ok(worst)
}

/// Convergence study across lattice refinements at a fixed 2π box.
#[derive(Clone, Debug)]
pub struct ConvergenceReport<T> {
    pub extents: Vec<usize>,
    pub max_errors: Vec<T>,
    /// Mean log2 error ratio per halving of the spacing.
    pub order_estimate: T,
}

pub fn convergence_study<T: Real>(
    op: &FlatOperator<T>,
    w: &PlaneWave<T>,
    extents: &[usize],
    rep: &GammaRep<T>,
) -> Result<ConvergenceReport<T>> {
    let mut max_errors = Vec::with_capacity(extents.len());
    for &n in extents {
        let lat = Lattice::unit_box(n)?;
        max_errors.push(max_error_vs_symbol(op, w, &lat, rep)?);
    }
    let mut ratios = Vec::new();
    for pair in max_errors.windows(2) {
        if pair[1] > T::zero() {
            ratios.push((pair[0] / pair[1]).ln() / T::of(std::f64::consts::LN_2));
        }
    }
    let order_estimate = if ratios.is_empty() {
        T::zero()
    } else {
        let mut s = T::zero();
        for r in &ratios {
            s = s + *r;
        }
        s / T::of(ratios.len() as f64)
    };
    Ok(ConvergenceReport {
        extents: extents.to_vec(),
        max_errors,
        order_estimate,
    })
}

/// Norm function of the potential-coupled operator with its homogeneity
/// split: f(y) = ¼Tr(M·(slash(ŷ) − m·slash(Â♯))) decomposes as
/// f = f₁ + f₀ with f₁ positively 1-homogeneous and f₀ 0-homogeneous.
#[derive(Clone, Copy, Debug)]
pub struct GammaNormTrace<T> {
    pub value: T,
    pub homogeneous_part: T,
    pub inhomogeneous_part: T,
    /// Max |f(λy) − λf₁ − f₀| over the λ sample set {0.5, 2, 4}.
    pub reconstruction_residual: T,
    pub inhomogeneous: bool,
}

pub fn gamma_norm_trace<T: Real>(
    ctx: &EvalContext<T>,
    a: &OneForm<T>,
    mass: T,
) -> Result<GammaNormTrace<T>> {
    if !ctx.metric.is_orthonormal_flat() {
        return Err(Error::FlatOnly);
    }
    let f_at = |y: &Tangent<T>| -> Result<T> {
        let ctxy = ctx.with_y(*y);
        let yhat = ctxy.y_frame();
        let ahat = ctxy.frame.form_to_frame(a);
        let signs = ctxy.frame.eta.signs::<T>();
        let mut a_sharp = [T::zero(); 4];
        for i in 0..4 {
            a_sharp[i] = signs[i] * ahat[i];
        }
        let gamma_term = ctxy.rep.slash(&yhat) - ctxy.rep.slash(&a_sharp).scale_re(mass);
        let m_mat = AlgebraElement::from_generator(Generator::m()).evaluate(&ctxy)?;
        Ok(T::of(0.25) * numeric_trace(&(m_mat * gamma_term)).re)
    };
    let y = ctx.y;
    let f1x = f_at(&y)?;
    let f2x = f_at(&y.scaled(T::of(2.0)))?;
    let homogeneous_part = f2x - f1x;
    let inhomogeneous_part = f1x - homogeneous_part;
    let mut residual = T::zero();
    for lam in [0.5, 2.0, 4.0] {
        let lam = T::of(lam);
        let f_lam = f_at(&y.scaled(lam))?;
        let recon = lam * homogeneous_part + inhomogeneous_part;
        let r = (f_lam - recon).abs();
        if r > residual {
            residual = r;
        }
    }
    Ok(GammaNormTrace {
        value: f1x,
        homogeneous_part,
        inhomogeneous_part,
        reconstruction_residual: residual,
        inhomogeneous: inhomogeneous_part.abs() > T::of(1e-9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::RepId;
    use crate::metric::{Metric4, MOSTLY_PLUS};

    fn rep() -> GammaRep<f64> {
        GammaRep::build(RepId::Dirac, MOSTLY_PLUS)
    }

    fn unit_amp() -> CVec4<f64> {
        [
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.5),
            Complex::new(-0.3, 0.0),
            Complex::new(0.2, -0.1),
        ]
    }

    #[test]
    fn symbol_of_zero_momentum_is_minus_mass() {
        let op = FlatOperator::dirac_mass(2.5).unwrap();
        let s = symbol_matrix(&op, &[0.0; 4], &rep()).unwrap();
        assert!((s - CMat4::identity().scale_re(-2.5)).max_norm() < 1e-15);
    }

    #[test]
    fn dirac_form_with_zero_form_is_massless_slash() {
        let op = FlatOperator::dirac_form(OneForm::new("A", [0.0; 4]));
        let p = [0.7, -0.2, 0.1, 0.4];
        let r = rep();
        let s = symbol_matrix(&op, &p, &r).unwrap();
        let expected = r.slash(&raise_flat(&r, &p));
        assert!((s - expected).max_norm() < 1e-15);
    }

    #[test]
    fn mass_requires_positive_value() {
        assert!(matches!(
            FlatOperator::<f64>::dirac_mass(0.0),
            Err(Error::MassRequired)
        ));
    }

    #[test]
    fn symbol_matches_scaled_normalized_generator() {
        // With m = |g*(p,p)|^{1/2} and y = p♯/m, the symbol equals m·M(y).
        let r = rep();
        let metric = Metric4::<f64>::minkowski();
        let m = 2.0;
        let y = Tangent::new([1.0, 0.0, 0.0, 0.0]);
        let p_raised = [m * y.0[0], m * y.0[1], m * y.0[2], m * y.0[3]];
        // Lower the index to build the covector argument.
        let signs = MOSTLY_PLUS.signs::<f64>();
        let mut p = [0.0; 4];
        for i in 0..4 {
            p[i] = signs[i] * p_raised[i];
        }
        let op = FlatOperator::dirac_mass(m).unwrap();
        let sym = symbol_matrix(&op, &p, &r).unwrap();
        let ctx = EvalContext::new(metric, vec![], y, RepId::Dirac, 1e-12).unwrap();
        let m_eval = AlgebraElement::from_generator(Generator::m())
            .evaluate(&ctx)
            .unwrap();
        assert!((sym - m_eval.scale_re(m)).max_norm() <= 1e-12);
    }

    #[test]
    fn constant_wave_returns_minus_mass_amplitude() {
        let op = FlatOperator::dirac_mass(1.5).unwrap();
        let w = PlaneWave::new([0.0; 4], unit_amp()).unwrap();
        let lat = Lattice::unit_box(8).unwrap();
        let out = apply_discrete(&op, &w, &lat, &rep()).unwrap();
        for site in [[0usize; 4], [3, 1, 0, 5]] {
            let v = out.at(site);
            for k in 0..4 {
                let expected = unit_amp()[k].scale(-1.5);
                assert!((v[k] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn incommensurate_momentum_rejected() {
        let op = FlatOperator::dirac_mass(1.0).unwrap();
        let w = PlaneWave::new([0.5, 0.0, 0.0, 0.0], unit_amp()).unwrap();
        let lat = Lattice::unit_box(8).unwrap();
        assert!(matches!(
            apply_discrete(&op, &w, &lat, &rep()),
            Err(Error::IncommensurateMomentum { component: 0, .. })
        ));
    }

    #[test]
    fn halving_h_quarters_the_error() {
        let op = FlatOperator::dirac_mass(1.0).unwrap();
        let w = PlaneWave::new([1.0, 2.0, 0.0, 1.0], unit_amp()).unwrap();
        let r = rep();
        let report = convergence_study(&op, &w, &[8, 16, 32], &r).unwrap();
        for pair in report.max_errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
        }
        assert!((1.9..=2.1).contains(&report.order_estimate));
    }

    #[test]
    fn lattice_validation() {
        assert!(Lattice::<f64>::new(0.0, 8).is_err());
        assert!(Lattice::<f64>::new(0.1, 4).is_err());
        assert!(Lattice::<f64>::unit_box(8).is_ok());
    }

    #[test]
    fn mass_symbol_det_closed_form_and_on_shell_zero() {
        let r = rep();
        // g*(p♯,p♯) = −9 + 25 = 16 = m² with m = 4: exactly on the shell.
        let p_raised = [3.0, 5.0, 0.0, 0.0];
        let signs = MOSTLY_PLUS.signs::<f64>();
        let mut p = [0.0; 4];
        for i in 0..4 {
            p[i] = signs[i] * p_raised[i];
        }
        let op = FlatOperator::dirac_mass(4.0).unwrap();
        let sym = symbol_matrix(&op, &p, &r).unwrap();
        let det = sym.det();
        assert!(det.norm() <= 1e-9, "on-shell det = {det}");
        assert_eq!(mass_symbol_det(4.0, &p, &r), 0.0);

        // Off shell the closed form matches the matrix determinant.
        let p2 = [-1.3, 0.4, 0.2, 0.1];
        let sym2 = symbol_matrix(&op, &p2, &r).unwrap();
        let closed = mass_symbol_det(4.0, &p2, &r);
        assert!((sym2.det().re - closed).abs() < 1e-9 * closed.abs().max(1.0));
        assert!(sym2.det().im.abs() < 1e-9);
    }

    #[test]
    fn gamma_norm_trace_examples() {
        let metric = Metric4::<f64>::minkowski();
        let y = Tangent::new([1.0, 0.0, 0.0, 0.0]);
        let ctx = EvalContext::new(metric, vec![], y, RepId::Dirac, 1e-12).unwrap();

        // A = 0, m = 1, unit timelike y: f = −1, no inhomogeneous part.
        let a0 = OneForm::new("A", [0.0; 4]);
        let g0 = gamma_norm_trace(&ctx, &a0, 1.0).unwrap();
        assert!((g0.value + 1.0).abs() < 1e-12);
        assert!(g0.inhomogeneous_part.abs() < 1e-12);
        assert!(!g0.inhomogeneous);
        assert!(g0.reconstruction_residual < 1e-9);

        // A = (0.1,0,0,0): f₀ = −m(A·y)/|g|^{1/2} = −0.1.
        let a = OneForm::new("A", [0.1, 0.0, 0.0, 0.0]);
        let g = gamma_norm_trace(&ctx, &a, 1.0).unwrap();
        assert!((g.inhomogeneous_part + 0.1).abs() < 1e-10);
        assert!(g.inhomogeneous);
        assert!(g.reconstruction_residual < 1e-9);

        // f(2y) ≠ 2f(y) whenever the inhomogeneous part is present.
        let ctx2 = ctx.with_y(y.scaled(2.0));
        let g2 = gamma_norm_trace(&ctx2, &a, 1.0).unwrap();
        assert!((g2.value - 2.0 * g.value).abs() > 1e-6);
    }

    #[test]
    fn gamma_norm_trace_guards() {
        let curved = Metric4::new(
            crate::cmatrix::RMat4::from_rows([
                [-1.0, 0.2, 0.0, 0.0],
                [0.2, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]),
            MOSTLY_PLUS,
        )
        .unwrap();
        let ctx = EvalContext::new(
            curved,
            vec![],
            Tangent::new([1.0, 0.0, 0.0, 0.0]),
            RepId::Dirac,
            1e-12,
        )
        .unwrap();
        assert!(matches!(
            gamma_norm_trace(&ctx, &OneForm::new("A", [0.0; 4]), 1.0),
            Err(Error::FlatOnly)
        ));

        let flat = EvalContext::new(
            Metric4::<f64>::minkowski(),
            vec![],
            Tangent::new([1.0, 1.0, 0.0, 0.0]),
            RepId::Dirac,
            1e-12,
        )
        .unwrap();
        assert!(matches!(
            gamma_norm_trace(&flat, &OneForm::new("A", [0.0; 4]), 1.0),
            Err(Error::NullVectorForM { .. })
        ));
    }
}
