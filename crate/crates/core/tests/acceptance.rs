//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use common::{oracle_tau, one_line};
use irpdf_core::fixalg::{self, FiniteActionSpace, MatrixField};
use irpdf_core::linalg::{self, CMatrix};
use irpdf_core::linear_examples::{
    circle_phi, haar_unitary, rep_phi, sample_circle, sample_sphere, sphere_phi,
};
use irpdf_core::mc::{
    self, CircleSampler, ExperimentConfig, SamplerSpec, SphereSampler, StabilizerSampler, VkSampler,
};
use irpdf_core::rep::standard_representation;
use irpdf_core::rng::{stream, StreamRng};
use irpdf_core::vk::{self, TrivialCocycle, VkAction};
use irpdf_core::{
    compare, estimate, estimate_with_workers, gram, icc, psd_check, sample_config,
    FinitaryPermutation, GroupElement, ThomaParams, UnitaryMatrix, DEFAULT_TOLERANCE,
};
use num_complex::Complex64;

type Outcome = Result<String, String>;

const Z: f64 = 4.0;
const ELEMENTS: [&str; 6] = ["(1 2)", "(1 2 3)", "(1 2)(3 4)", "(1 2 3 4)", "(1 2)(3 4 5)", "e"];

fn perm(s: &str) -> FinitaryPermutation {
    s.parse().expect("valid cycle notation")
}

fn params(alpha: &[f64], beta: &[f64]) -> ThomaParams {
    ThomaParams::new(alpha.to_vec(), beta.to_vec()).expect("valid parameters")
}

fn parameter_sets() -> Vec<(&'static str, ThomaParams)> {
    vec![
        ("α=(0.5,0.5)", params(&[0.5, 0.5], &[])),
        ("α=(0.4,0.3) β=(0.2)", params(&[0.4, 0.3], &[0.2])),
        ("β=(1)", params(&[], &[1.0])),
        ("α=(1)", params(&[1.0], &[])),
    ]
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn thoma_identity() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (name, p) in parameter_sets() {
        for s in ELEMENTS {
            let g = perm(s);
            let n = g.max_support().max(1);
            let target = oracle_tau(p.alpha(), p.beta(), &one_line(&g, n));
            ensure((target - p.tau(&g)).abs() < 1e-14, || {
                format!("{name} {s}: library τ {} differs from oracle {target}", p.tau(&g))
            })?;
            let sampler = VkSampler {
                params: p.clone(),
                element: g,
            };
            let est = estimate(&sampler, 100_000, 0x5EED_0001).map_err(|e| e.to_string())?;
            let v = compare(&est, Complex64::new(target, 0.0), Z);
            worst = worst.max(v.zscore);
            ensure(v.pass, || {
                format!("{name} {s}: mean {} vs τ {target}, z = {:.2}", est.mean.re, v.zscore)
            })?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("24 comparisons, max z = {worst:.2}, {secs:.1} s"))
}

fn random_triple(rng: &mut StreamRng, sets: &[(&str, ThomaParams)]) -> (FinitaryPermutation, FinitaryPermutation, irpdf_core::Configuration) {
    use rand::Rng;
    let p = &sets[rng.random_range(0..sets.len())].1;
    let g = FinitaryPermutation::random(rng.random_range(1..=20), rng);
    let h = FinitaryPermutation::random(rng.random_range(1..=20), rng);
    let omega = sample_config(p, 20, rng);
    (g, h, omega)
}

fn triple_params() -> Vec<(&'static str, ThomaParams)> {
    let mut sets = parameter_sets();
    sets.push(("α=(0.3) β=(0.3,0.2)", params(&[0.3], &[0.3, 0.2])));
    sets.push(("β=(0.5,0.5)", params(&[], &[0.5, 0.5])));
    sets
}

fn cocycle_identity() -> Outcome {
    let sets = triple_params();
    let mut failures = 0;
    for i in 0..10_000u64 {
        let (g, h, omega) = random_triple(&mut stream(0xC0C0, i), &sets);
        let lhs = omega.cocycle_sign(&g.compose(&h)).map_err(|e| e.to_string())?;
        let moved = omega.act(&h).map_err(|e| e.to_string())?;
        let rhs = omega.cocycle_sign(&h).map_err(|e| e.to_string())?
            * moved.cocycle_sign(&g).map_err(|e| e.to_string())?;
        if lhs != rhs {
            failures += 1;
        }
    }
    ensure(failures == 0, || format!("{failures} of 10000 triples failed"))?;
    Ok("10000 triples, 0 failures".into())
}

fn equivariance() -> Outcome {
    let sets = triple_params();
    let irs = vk::make_cocycle_irpdf(
        VkAction {
            params: sets[0].1.clone(),
            n: 20,
        },
        TrivialCocycle,
    );
    let (mut vk_failures, mut irs_failures) = (0, 0);
    for i in 0..10_000u64 {
        let (g, h, omega) = random_triple(&mut stream(0xE9E9, i), &sets);
        let moved = vk::act(&h, &omega).map_err(|e| e.to_string())?;
        let conj = h.inverse().compose(&g).compose(&h);
        if moved.phi(&g).map_err(|e| e.to_string())? != omega.phi(&conj).map_err(|e| e.to_string())? {
            vk_failures += 1;
        }
        let lhs = irs.evaluate(&moved, &g).map_err(|e| e.to_string())?;
        let rhs = irs.evaluate(&omega, &conj).map_err(|e| e.to_string())?;
        if lhs != rhs {
            irs_failures += 1;
        }
    }
    ensure(vk_failures == 0 && irs_failures == 0, || {
        format!("sign cocycle: {vk_failures} failures, trivial cocycle: {irs_failures} failures")
    })?;
    Ok("10000 triples each for the sign and trivial cocycles, 0 failures".into())
}

fn check_psd<G: GroupElement>(
    label: &str,
    phi: &dyn Fn(&G) -> Complex64,
    elements: &[G],
    worst: &mut f64,
) -> Result<(), String> {
    let a = gram(&phi, elements).map_err(|e| e.to_string())?;
    let report = psd_check(&a, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    *worst = worst.min(report.min_eigenvalue / report.spectral_norm.max(1.0));
    ensure(report.psd, || format!("{label}: min eigenvalue {}", report.min_eigenvalue))
}

fn positive_definiteness() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut rng = stream(0x9D9D, 0);
    let perms: Vec<FinitaryPermutation> = (0..10).map(|_| FinitaryPermutation::random(8, &mut rng)).collect();

    for (name, p) in parameter_sets() {
        check_psd(&format!("Thoma {name}"), &|g: &FinitaryPermutation| Complex64::new(p.tau(g), 0.0), &perms, &mut worst)?;
    }

    for (name, p) in parameter_sets() {
        let configs: Vec<_> = (0..1000).map(|i| sample_config(&p, 8, &mut stream(0xA7A7, i))).collect();
        let avg = |g: &FinitaryPermutation| {
            let s: f64 = configs.iter().map(|w| w.phi(g).expect("n covers supports")).sum();
            Complex64::new(s / configs.len() as f64, 0.0)
        };
        check_psd(&format!("VK average {name}"), &avg, &perms, &mut worst)?;
        let irs_avg = |g: &FinitaryPermutation| {
            let s = configs.iter().filter(|w| w.is_fixed(g).expect("n covers supports")).count();
            Complex64::new(s as f64 / configs.len() as f64, 0.0)
        };
        check_psd(&format!("stabilizer average {name}"), &irs_avg, &perms, &mut worst)?;
    }

    for n in [2usize, 3] {
        let unitaries: Vec<UnitaryMatrix> = (0..10).map(|_| haar_unitary(n, &mut rng)).collect();
        let xi = sample_sphere(n, &mut rng);
        check_psd(&format!("sphere n={n}"), &|g: &UnitaryMatrix| sphere_phi(g, &xi).expect("dims agree"), &unitaries, &mut worst)?;
        let trace = |g: &UnitaryMatrix| g.normalized_trace();
        check_psd(&format!("normalized trace n={n}"), &trace, &unitaries, &mut worst)?;
    }

    let (group, _, rep) = standard_representation(3).map_err(|e| e.to_string())?;
    let xi = sample_sphere(2, &mut rng);
    let elements: Vec<_> = (0..10).map(|i| group.element((i * 5 + 1) % 6)).collect();
    for g in 0..6 {
        let base = group.element(g);
        let phi = |h: &irpdf_core::TableElement| rep_phi(&rep, &base, h, &xi).expect("homomorphism");
        check_psd(&format!("representation example base {g}"), &phi, &elements, &mut worst)?;
    }
    Ok(format!("all Gram matrices PSD, min relative eigenvalue {worst:.2e}"))
}

fn rigidity() -> Outcome {
    let regular = ThomaParams::regular();
    let mut nonzero = 0usize;
    for s in ELEMENTS.iter().filter(|s| **s != "e") {
        let sampler = VkSampler {
            params: regular.clone(),
            element: perm(s),
        };
        let values = mc::sample_values(&sampler, 100_000, 0x0515, 8).map_err(|e| e.to_string())?;
        nonzero += values.iter().filter(|v| **v != linalg::ZERO).count();
    }
    ensure(nonzero == 0, || format!("{nonzero} samples with φ_ω(g) ≠ 0 under α=β=∅"))?;

    let control = StabilizerSampler {
        params: params(&[0.5, 0.5], &[]),
        element: perm("(1 2)"),
    };
    let values = mc::sample_values(&control, 100_000, 0x0516, 8).map_err(|e| e.to_string())?;
    let fixed = values.iter().filter(|v| **v == linalg::ONE).count();
    let p = fixed as f64 / values.len() as f64;
    ensure(fixed > 0 && fixed < values.len(), || "control φ is constant".into())?;
    ensure((0.46..=0.54).contains(&p), || format!("fixing probability {p}"))?;
    Ok(format!("0 exceptions over 5×10⁵ samples; control P(g.ω = ω) = {p:.4}"))
}

fn fixed_unitaries(n: usize) -> Vec<UnitaryMatrix> {
    let mut rng = stream(0x5FE2, n as u64);
    let diag = CMatrix::from_diagonal(&linalg::CVector::from_iterator(
        n,
        (0..n).map(|k| Complex64::from_polar(1.0, 0.7 * (k + 1) as f64)),
    ));
    let cyclic = CMatrix::from_fn(n, n, |r, c| if r == (c + 1) % n { linalg::ONE } else { linalg::ZERO });
    vec![
        UnitaryMatrix::new(diag).expect("diagonal phases are unitary"),
        UnitaryMatrix::new(cyclic).expect("permutation matrices are unitary"),
        haar_unitary(n, &mut rng),
    ]
}

fn sphere_example() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2usize, 3] {
        for (i, gamma) in fixed_unitaries(n).into_iter().enumerate() {
            let target: Complex64 = (0..n).map(|k| gamma.matrix()[(k, k)]).sum::<Complex64>() / n as f64;
            let est = estimate(&SphereSampler { gamma }, 100_000, 0x5A5A).map_err(|e| e.to_string())?;
            let v = compare(&est, target, Z);
            worst = worst.max(v.zscore);
            ensure(v.pass, || format!("n={n} unitary {i}: mean {} vs {target}, z = {:.2}", est.mean, v.zscore))?;
        }
    }
    // direct sanity of the evaluation map
    let xi = sample_sphere(3, &mut stream(1, 1));
    let one = sphere_phi(&UnitaryMatrix::identity(3), &xi).map_err(|e| e.to_string())?;
    ensure((one - linalg::ONE).norm() < 1e-12, || format!("φ_ξ(e) = {one}"))?;
    Ok(format!("6 comparisons, max z = {worst:.2}"))
}

fn circle_example() -> Outcome {
    let mut worst = 0.0f64;
    for k in [-2i64, -1, 1, 2, 3] {
        let est = estimate(&CircleSampler { k }, 100_000, 0xC1C1).map_err(|e| e.to_string())?;
        let v = compare(&est, linalg::ZERO, Z);
        worst = worst.max(v.zscore);
        ensure(v.pass, || format!("k={k}: mean {}, z = {:.2}", est.mean, v.zscore))?;
    }
    let est = estimate(&CircleSampler { k: 0 }, 100_000, 0xC1C1).map_err(|e| e.to_string())?;
    ensure(est.mean == linalg::ONE && est.stderr == 0.0, || format!("k=0: mean {}", est.mean))?;
    let z = sample_circle(&mut stream(3, 3));
    ensure(circle_phi(z, 0).map_err(|e| e.to_string())? == linalg::ONE, || "z⁰ ≠ 1".into())?;
    Ok(format!("k ∈ {{-2,-1,1,2,3}} max z = {worst:.2}; k = 0 exactly 1"))
}

struct S3Model {
    space: FiniteActionSpace,
    rep: irpdf_core::FiniteRepresentation,
    basis: fixalg::FixedPointBasis,
}

fn s3_model() -> Result<S3Model, String> {
    let (group, _, rep) = standard_representation(3).map_err(|e| e.to_string())?;
    let space = FiniteActionSpace::left_multiplication(Arc::clone(&group));
    let all: Vec<usize> = (0..group.order()).collect();
    let basis = fixalg::fixed_space(&space, &rep, &all).map_err(|e| e.to_string())?;
    Ok(S3Model { space, rep, basis })
}

fn check_family(model: &S3Model, ps: &[MatrixField]) -> Result<(), String> {
    let points = model.space.len();
    ensure(ps.len() == 2, || format!("{} minimal projections", ps.len()))?;
    for (i, p) in ps.iter().enumerate() {
        for w in 0..points {
            ensure(p.rank_at(w) == 1, || format!("projection {i} has rank {} at point {w}", p.rank_at(w)))?;
        }
    }
    let cross = ps[0].mul(&ps[1]).max_abs();
    ensure(cross < 1e-9, || format!("projections not orthogonal: {cross:e}"))?;
    let sum = ps[0].add(&ps[1]).sub(&MatrixField::identity(points, 2)).max_abs();
    ensure(sum < 1e-9, || format!("projections do not sum to 1: {sum:e}"))
}

/// `(φ^{p₁} + φ^{p₂})/2` with `φ^p` the function of the normalized field `p/τ_M(p)`.
fn average_deviation(model: &S3Model, ps: &[MatrixField]) -> Result<f64, String> {
    let fns = ps
        .iter()
        .map(|p| {
            let t = p.trace(&model.space);
            fixalg::irpdf_from_positive_element(&p.scale(t.inv()), &model.rep, &model.space)
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, String>>()?;
    let mut worst = 0.0f64;
    for w in 0..model.space.len() {
        for gamma in 0..6 {
            let avg = (fns[0].phi(w, gamma) + fns[1].phi(w, gamma)) / 2.0;
            let target = linalg::trace(model.rep.matrix_at(gamma)) / 2.0;
            worst = worst.max((avg - target).norm());
        }
    }
    Ok(worst)
}

fn fixed_point_algebra() -> Outcome {
    let start = Instant::now();
    let model = s3_model()?;
    ensure(model.basis.dimension() == 4, || format!("dim M^θ = {}", model.basis.dimension()))?;
    let first = fixalg::minimal_projections_seeded(&model.basis, 1).map_err(|e| e.to_string())?;
    let second = fixalg::minimal_projections_seeded(&model.basis, 2).map_err(|e| e.to_string())?;
    check_family(&model, &first)?;
    check_family(&model, &second)?;
    let distance = first
        .iter()
        .map(|p| second.iter().map(|q| p.sub(q).max_abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    ensure(distance > 1e-3, || "both seeds produced the same family".into())?;
    for p in first.iter().chain(&second) {
        let t = p.trace(&model.space);
        ensure((t - Complex64::new(0.5, 0.0)).norm() < 1e-10, || format!("τ_M(p) = {t}"))?;
    }
    let dev = average_deviation(&model, &first)?.max(average_deviation(&model, &second)?);
    ensure(dev <= 1e-10, || format!("average deviates from tr∘π/2 by {dev:e}"))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("took {secs:.2} s"))?;
    Ok(format!("dim 4, 2 rank-1 projections per basis, families differ by {distance:.3}, average deviation {dev:.1e}, {secs:.2} s"))
}

fn expectation_identity() -> Outcome {
    let model = s3_model()?;
    let ps = fixalg::minimal_projections_seeded(&model.basis, 1).map_err(|e| e.to_string())?;
    let mut fields = vec![MatrixField::identity(model.space.len(), 2)];
    fields.extend(ps);
    let mut worst = 0.0f64;
    for f in &fields {
        // Σ μ(ω) f_ω computed here directly, against τ_M(f) from the library
        let mut sum = CMatrix::zeros(2, 2);
        for (w, &mu) in model.space.weights().iter().enumerate() {
            sum += f.at(w) * Complex64::new(mu, 0.0);
        }
        let tau: Complex64 = (0..model.space.len())
            .map(|w| linalg::trace(f.at(w)) * (model.space.weights()[w] / 2.0))
            .sum();
        let residual = linalg::max_abs(&(sum - CMatrix::identity(2, 2) * tau));
        let check = fixalg::expectation_identity_check(f, &model.space);
        ensure(check.holds, || format!("library check failed, residual {:e}", check.residual))?;
        worst = worst.max(residual);
    }
    ensure(worst <= 1e-9, || format!("residual {worst:e}"))?;
    Ok(format!("identity field and 2 projections, max residual {worst:.1e}"))
}

fn icc_witness() -> Outcome {
    use rand::Rng;
    for i in 0..100u64 {
        let mut rng = stream(0x1CC, i);
        let size = rng.random_range(1..=8);
        let set: Vec<FinitaryPermutation> = (0..size)
            .map(|_| FinitaryPermutation::random(rng.random_range(1..=10), &mut rng))
            .collect();
        let report = icc::displacing_element(&set);
        // independent recheck of γFγ⁻¹ ∩ F ⊆ {e}
        let gamma = &report.witness;
        for f in &set {
            let c = gamma.compose(f).compose(&gamma.inverse());
            ensure(c.is_identity() || !set.contains(&c), || format!("set {i}: {c} stays in F"))?;
        }
        ensure(report.verified, || format!("set {i} not verified"))?;
    }
    Ok("100 random sets verified".into())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = |name: &str, workers: usize| ExperimentConfig {
        sampler: SamplerSpec::Vk {
            alpha: vec![0.4, 0.3],
            beta: vec![0.2],
        },
        elements: ELEMENTS.iter().map(|s| serde_json::json!(s)).collect(),
        samples: 20_000,
        seed: 77,
        output: dir.path().join(name),
        z_threshold: Z,
        workers: Some(workers),
    };
    let mut bodies = Vec::new();
    for (name, workers) in [("a.csv", 4), ("b.csv", 4), ("c.csv", 1), ("d.csv", 8)] {
        mc::run_experiment(&config(name, workers)).map_err(|e| e.to_string())?;
        bodies.push(std::fs::read(dir.path().join(name)).map_err(|e| e.to_string())?);
    }
    ensure(bodies.windows(2).all(|w| w[0] == w[1]), || "CSV bodies differ".into())?;

    let sampler = VkSampler {
        params: params(&[0.5], &[0.3]),
        element: perm("(1 2 3)(4 5)"),
    };
    let one = estimate_with_workers(&sampler, 50_000, 9, 1).map_err(|e| e.to_string())?;
    let eight = estimate_with_workers(&sampler, 50_000, 9, 8).map_err(|e| e.to_string())?;
    ensure(one == eight, || format!("1 worker {one:?} vs 8 workers {eight:?}"))?;
    Ok("identical CSVs across reruns and 1/4/8 workers; identical estimates for 1 and 8 workers".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Thoma identity", thoma_identity),
        ("cocycle identity", cocycle_identity),
        ("equivariance", equivariance),
        ("positive definiteness", positive_definiteness),
        ("disintegration rigidity", rigidity),
        ("sphere example", sphere_example),
        ("circle example", circle_example),
        ("fixed-point algebra", fixed_point_algebra),
        ("expectation identity", expectation_identity),
        ("ICC witness", icc_witness),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())))));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
