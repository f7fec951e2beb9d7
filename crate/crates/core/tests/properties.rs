//! Property checks for the module invariants that the acceptance criteria
//! do not already sample: frame construction over random metrics, dual
//! involution, slash contraction, representation-independent word traces,
//! evaluation homomorphism, the span{𝕀, slash} structure of evaluated
//! elements, dual-path agreement and homogeneity under random sampling, and
//! parser robustness under proptest.

use num_complex::Complex;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clifford_finsler::algebra::{AlgebraElement, EvalContext, Generator};
use clifford_finsler::cmatrix::{sym_eigen, CMat4, RMat4};
use clifford_finsler::diracop::gamma_norm_trace;
use clifford_finsler::expr::{parse, print_canonical};
use clifford_finsler::finsler::{randers_norm, second_order_lagrangian, RandersData};
use clifford_finsler::gamma::{GammaRep, RepId};
use clifford_finsler::metric::{Metric4, OneForm, Signature, Tangent, MOSTLY_PLUS};
use clifford_finsler::trace::trace_of_element;

type C64 = Complex<f64>;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xfeed_f00d)
}

/// Random well-conditioned symmetric matrix with the requested number of
/// negative eigenvalues, plus its negatives-first declared signature.
fn random_metric(rng: &mut ChaCha8Rng, negatives: usize) -> Metric4<f64> {
    // Random rotation from the eigenvectors of a random symmetric matrix.
    let mut s = RMat4::<f64>::zero();
    for i in 0..4 {
        for j in i..4 {
            let v = rng.gen_range(-1.0..1.0);
            s.e[i][j] = v;
            s.e[j][i] = v;
        }
    }
    let (_, q) = sym_eigen(&s);
    let mut vals = [0.0; 4];
    for (k, v) in vals.iter_mut().enumerate() {
        let mag = rng.gen_range(0.3..3.0);
        *v = if k < negatives { -mag } else { mag };
    }
    let g = q.mat_mul(&RMat4::diagonal(vals)).mat_mul(&q.transpose());
    let mut signs = [1i8; 4];
    for s in signs.iter_mut().take(negatives) {
        *s = -1;
    }
    Metric4::new(g, Signature(signs)).expect("well-conditioned by construction")
}

#[test]
fn frames_orthonormalize_random_metrics() {
    let mut r = rng();
    for k in 0..1000 {
        let negs = k % 4;
        let metric = random_metric(&mut r, negs);
        let frame = metric.orthonormal_frame().unwrap();
        let residual = frame.orthonormality_residual(&metric);
        assert!(residual <= 1e-12, "residual {residual:.3e} at case {k}");
    }
}

#[test]
fn dual_metric_is_an_involution() {
    let mut r = rng();
    for k in 0..300 {
        let metric = random_metric(&mut r, k % 4);
        let round = metric.dual().unwrap().dual().unwrap();
        assert!(round.components().max_diff(metric.components()) <= 1e-10);
        // The dual really is the matrix inverse: G·G⁻¹ = 𝕀 within 1e-10.
        let prod = metric
            .components()
            .mat_mul(metric.dual().unwrap().components());
        assert!(prod.max_diff(&RMat4::identity()) <= 1e-10);
    }
}

#[test]
fn bilinear_form_is_exactly_symmetric_on_random_inputs() {
    let mut r = rng();
    for k in 0..500 {
        let metric = random_metric(&mut r, k % 4);
        let y = Tangent::new([
            r.gen_range(-5.0..5.0),
            r.gen_range(-5.0..5.0),
            r.gen_range(-5.0..5.0),
            r.gen_range(-5.0..5.0),
        ]);
        let z = Tangent::new([
            r.gen_range(-5.0..5.0),
            r.gen_range(-5.0..5.0),
            r.gen_range(-5.0..5.0),
            r.gen_range(-5.0..5.0),
        ]);
        // Bitwise equality, not approximate.
        assert_eq!(metric.norm_bilinear(&y, &z), metric.norm_bilinear(&z, &y));
    }
}

#[test]
fn norms_pull_back_through_frames() {
    let mut r = rng();
    for _ in 0..300 {
        let metric = random_metric(&mut r, 1);
        let frame = metric.orthonormal_frame().unwrap();
        let y = Tangent::new([
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
        ]);
        let yf = frame.vector_to_frame(&y);
        let eta = frame.eta.signs::<f64>();
        let frame_norm: f64 = (0..4).map(|i| eta[i] * yf[i] * yf[i]).sum();
        let direct = metric.norm_squared(&y);
        assert!((frame_norm - direct).abs() <= 1e-10 * (1.0 + direct.abs()));
    }
}

#[test]
fn slash_squares_to_the_norm() {
    let mut r = rng();
    let rep = GammaRep::<f64>::build(RepId::Dirac, MOSTLY_PLUS);
    let signs = MOSTLY_PLUS.signs::<f64>();
    for _ in 0..1000 {
        let y: [f64; 4] = [
            r.gen_range(-3.0..3.0),
            r.gen_range(-3.0..3.0),
            r.gen_range(-3.0..3.0),
            r.gen_range(-3.0..3.0),
        ];
        let eta: f64 = (0..4).map(|i| signs[i] * y[i] * y[i]).sum();
        let sq = rep.slash(&y) * rep.slash(&y);
        let residual = (sq - CMat4::identity().scale_re(eta)).max_norm();
        let y2: f64 = y.iter().map(|v| v * v).sum();
        assert!(residual <= 1e-12 * (1.0 + y2));
    }
}

#[test]
fn even_word_traces_agree_across_representations() {
    let mut r = rng();
    for _ in 0..200 {
        let len = 2 * r.gen_range(1..=4usize);
        let indices: Vec<usize> = (0..len).map(|_| r.gen_range(0..4)).collect();
        let mut traces = Vec::new();
        for rep_id in RepId::ALL {
            let rep = GammaRep::<f64>::build(rep_id, MOSTLY_PLUS);
            let mut prod = CMat4::<f64>::identity();
            for &i in &indices {
                prod = prod * *rep.gamma(i);
            }
            traces.push(prod.trace());
        }
        for t in &traces[1..] {
            assert!((*t - traces[0]).norm() <= 1e-12);
        }
    }
}

fn random_element(r: &mut ChaCha8Rng) -> AlgebraElement<f64> {
    let gens = [
        Generator::m(),
        Generator::mt(),
        Generator::f(&["A"]).unwrap(),
        Generator::ft(&["A"]).unwrap(),
        Generator::f(&["A", "B"]).unwrap(),
        Generator::ft(&["B"]).unwrap(),
    ];
    let mut elem = AlgebraElement::zero();
    for _ in 0..r.gen_range(1..4) {
        let mut word = AlgebraElement::one();
        for _ in 0..r.gen_range(0..3) {
            word = word.mul(&AlgebraElement::from_generator(
                gens[r.gen_range(0..gens.len())].clone(),
            ));
        }
        elem = elem.add(&word.scale(C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))));
    }
    elem
}

fn random_ctx(r: &mut ChaCha8Rng) -> EvalContext<f64> {
    let metric = Metric4::<f64>::minkowski();
    let y = loop {
        let y = Tangent::new([
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
        ]);
        if metric.norm_squared(&y).abs() > 1e-3 {
            break y;
        }
    };
    EvalContext::new(
        metric,
        vec![
            OneForm::new(
                "A",
                [r.gen_range(-0.25..0.25), r.gen_range(-0.25..0.25), 0.0, 0.1],
            ),
            OneForm::new(
                "B",
                [0.0, r.gen_range(-0.25..0.25), r.gen_range(-0.25..0.25), 0.0],
            ),
        ],
        y,
        RepId::Dirac,
        1e-12,
    )
    .unwrap()
}

#[test]
fn evaluation_is_a_homomorphism_on_random_pairs() {
    let mut r = rng();
    for _ in 0..1000 {
        let ctx = random_ctx(&mut r);
        let a = random_element(&mut r);
        let b = random_element(&mut r);
        let lhs = a.mul(&b).evaluate(&ctx).unwrap();
        let rhs = a.evaluate(&ctx).unwrap() * b.evaluate(&ctx).unwrap();
        let scale = lhs.max_norm().max(rhs.max_norm()).max(1.0);
        assert!((lhs - rhs).max_norm() / scale <= 1e-10);
    }
}

/// Least-squares projection of a matrix onto span{𝕀₄, slash(ŷ)}.
fn span_residual(x: &CMat4<f64>, slash: &CMat4<f64>) -> f64 {
    let inner = |a: &CMat4<f64>, b: &CMat4<f64>| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += a.e[i][j].conj() * b.e[i][j];
            }
        }
        acc
    };
    let id = CMat4::<f64>::identity();
    let g11 = inner(&id, &id);
    let g12 = inner(&id, slash);
    let g21 = inner(slash, &id);
    let g22 = inner(slash, slash);
    let b1 = inner(&id, x);
    let b2 = inner(slash, x);
    let det = g11 * g22 - g12 * g21;
    let alpha = (b1 * g22 - b2 * g12) / det;
    let beta = (g11 * b2 - g21 * b1) / det;
    let recon = id.scale(alpha) + slash.scale(beta);
    (*x - recon).max_norm()
}

#[test]
fn evaluated_elements_lie_in_the_identity_slash_plane() {
    let mut r = rng();
    for _ in 0..500 {
        let ctx = random_ctx(&mut r);
        let elem = random_element(&mut r);
        let x = elem.evaluate(&ctx).unwrap();
        let slash = ctx.slash_y();
        let residual = span_residual(&x, &slash);
        assert!(
            residual <= 1e-10 * x.max_norm().max(1.0),
            "residual {residual:.3e}"
        );
    }
}

#[test]
fn second_order_dual_paths_agree_on_random_draws() {
    let mut r = rng();
    let metric = Metric4::<f64>::minkowski();
    for _ in 0..1000 {
        let y = loop {
            let y = Tangent::new([
                r.gen_range(-2.0..2.0),
                r.gen_range(-2.0..2.0),
                r.gen_range(-2.0..2.0),
                r.gen_range(-2.0..2.0),
            ]);
            if metric.norm_squared(&y).abs() > 1e-6 {
                break y;
            }
        };
        let form = OneForm::new(
            "A",
            [
                r.gen_range(-0.25..0.25),
                r.gen_range(-0.25..0.25),
                r.gen_range(-0.25..0.25),
                r.gen_range(-0.25..0.25),
            ],
        );
        let d = RandersData::new(metric.clone(), form).unwrap();
        let ctx = d.context(y, RepId::Dirac, 1e-12).unwrap();
        let v = second_order_lagrangian(&d, &y, &ctx).unwrap();
        let rel = (v.squared_trace - v.direct).abs() / v.direct.abs().max(1.0);
        assert!(rel <= 1e-9, "rel {rel:.3e}");
    }
}

#[test]
fn randers_norm_is_positively_homogeneous_on_random_draws() {
    let mut r = rng();
    let metric = Metric4::<f64>::minkowski();
    for _ in 0..300 {
        let y = Tangent::new([
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
        ]);
        let form = OneForm::new(
            "A",
            [
                r.gen_range(-0.25..0.25),
                r.gen_range(-0.25..0.25),
                0.0,
                r.gen_range(-0.25..0.25),
            ],
        );
        let d = RandersData::new(metric.clone(), form).unwrap();
        let ctx = d.context(y, RepId::Dirac, 1e-12).unwrap();
        let base = randers_norm(&d, &y, &ctx).unwrap().value();
        for lam in [0.5, 2.0, 7.0] {
            let scaled = randers_norm(&d, &y.scaled(lam), &ctx).unwrap().value();
            assert!((scaled - lam * base).abs() <= 1e-10 * (1.0 + (lam * base).abs()));
        }
    }
}

#[test]
fn potential_norm_decomposition_reconstructs() {
    let mut r = rng();
    let metric = Metric4::<f64>::minkowski();
    for _ in 0..200 {
        let y = loop {
            let y = Tangent::new([
                r.gen_range(-2.0..2.0),
                r.gen_range(-2.0..2.0),
                r.gen_range(-2.0..2.0),
                r.gen_range(-2.0..2.0),
            ]);
            if metric.norm_squared(&y).abs() > 1e-2 {
                break y;
            }
        };
        let a = OneForm::new(
            "A",
            [
                r.gen_range(-0.25..0.25),
                r.gen_range(-0.25..0.25),
                r.gen_range(-0.25..0.25),
                r.gen_range(-0.25..0.25),
            ],
        );
        let mass = r.gen_range(0.2..2.0);
        let ctx = EvalContext::new(metric.clone(), vec![], y, RepId::Dirac, 1e-12).unwrap();
        let g = gamma_norm_trace(&ctx, &a, mass).unwrap();
        assert!(g.reconstruction_residual <= 1e-9);
    }
}

#[test]
fn trace_reports_cross_validate_on_random_elements() {
    let mut r = rng();
    for _ in 0..500 {
        let ctx = random_ctx(&mut r);
        let elem = random_element(&mut r);
        let report = trace_of_element(&elem, &ctx).unwrap();
        let scale = report.numeric.norm().max(1.0);
        assert!(
            report.residual <= 1e-10 * scale,
            "residual {:.3e}",
            report.residual
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// Arbitrary inputs never panic the parser.
    #[test]
    fn parser_total_on_arbitrary_strings(s in ".{0,512}") {
        let _ = parse(&s);
    }

    /// Grammar-flavored inputs never panic the parser.
    #[test]
    fn parser_total_on_grammar_soup(s in "[MFtTrGade\\[\\](),*+\\-0-9.i _]{0,256}") {
        let _ = parse(&s);
    }

    /// Whatever parses prints back to a structurally identical tree.
    #[test]
    fn parse_print_roundtrip(s in "[MFt\\[\\]ABC(),*+\\-0-9. ]{1,64}") {
        if let Ok(ast) = parse(&s) {
            let printed = print_canonical(&ast);
            let reparsed = parse(&printed).expect("canonical text must reparse");
            prop_assert_eq!(ast, reparsed);
        }
    }
}
