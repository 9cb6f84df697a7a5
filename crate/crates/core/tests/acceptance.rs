//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use bifree::bifree::{BiFreeSystem, CenteredTerm, Config, LocalElement};
use bifree::component::check_component_rp;
use bifree::fock::FreeProductSpace;
use bifree::ncpoly::{NCPoly, Scalar};
use bifree::positivity::{
    combination, hadamard, min_eigenvalue, pattern_blocks, positive_words, quadratic_form, verify_theorem,
    PatternBlock, TheoremStatus,
};
use bifree::{random, MatrixModel};
use nalgebra::DMatrix;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn model_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

/// Criterion 1: Evaluator and Fock oracle agree to 1e-8 on ≥ 200 random monomials of
/// length ≤ 4 over two d=2 components, within 30 s.
fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(101);
    let pairs = [
        vec![random::schmidt_model(&mut rng, 2, 2), random::schmidt_model(&mut rng, 2, 2)],
        vec![random::normal_model(&mut rng, 2, 2), random::normal_model(&mut rng, 2, 2)],
    ];
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for models in &pairs {
        let sys = BiFreeSystem::from_models(models, Config::default());
        let space = FreeProductSpace::build(models, 4).map_err(|e| e.to_string())?;
        let gens = sys.generator_counts();
        for _ in 0..200 {
            let len = rng.random_range(1..=4);
            let w = random::word(&mut rng, &gens, len, true);
            let a = sys.evaluate_word(&w).map_err(|e| e.to_string())?;
            let b = space
                .oracle_tau(&NCPoly::monomial(w.clone(), Scalar::new(1.0, 0.0)))
                .map_err(|e| e.to_string())?;
            worst = worst.max((a - b).norm());
            ensure((a - b).norm() <= 1e-8, || format!("word {w}: {a} vs {b}"))?;
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} monomials, max |diff| {worst:.2e}, {elapsed:.2?}"))
}

fn random_rp_system<R: Rng>(rng: &mut R) -> BiFreeSystem {
    let n = rng.random_range(2..=3);
    let models: Vec<MatrixModel> = (0..n)
        .map(|_| {
            let d = rng.random_range(1..=3);
            let g = rng.random_range(1..=2);
            random::schmidt_model(rng, d, g)
        })
        .collect();
    BiFreeSystem::from_models(&models, Config::default())
}

/// Criterion 2: Randomized Schmidt-state models pass verify_theorem at maxLen 2 with
/// 500 random elements, within 2 min total. Returns the pattern blocks for
/// criterion 6.
fn theorem_at_desk_scale(blocks: &mut Vec<PatternBlock>) -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(202);
    let mut worst_eig = f64::INFINITY;
    let mut worst_re = f64::INFINITY;
    let mut worst_im: f64 = 0.0;
    let models = 20;
    for k in 0..models {
        let sys = random_rp_system(&mut rng);
        let r = verify_theorem(&sys, 2, 500, 1e-8, 1000 + k).map_err(|e| e.to_string())?;
        ensure(r.status == TheoremStatus::Pass, || format!("model {k}: {:?}", r.status))?;
        ensure(r.gram.min_eig >= -1e-8, || format!("model {k}: min eig {}", r.gram.min_eig))?;
        ensure(r.random.trials == 500 && r.random.min_real >= -1e-8, || {
            format!("model {k}: min Re {}", r.random.min_real)
        })?;
        ensure(r.random.max_abs_imag <= 1e-9, || format!("model {k}: max |Im| {}", r.random.max_abs_imag))?;
        worst_eig = worst_eig.min(r.gram.min_eig);
        worst_re = worst_re.min(r.random.min_real);
        worst_im = worst_im.max(r.random.max_abs_imag);
        let basis = positive_words(&sys, 2).map_err(|e| e.to_string())?;
        blocks.extend(pattern_blocks(&sys, &basis).map_err(|e| e.to_string())?);
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{models} models, min eig {worst_eig:.2e}, min Re {worst_re:.3}, max |Im| {worst_im:.2e}, {elapsed:.2?}"
    ))
}

/// Criterion 3: Centered alternating positive words of length 1–4 vanish to 1e-9 via
/// both routes, over ≥ 100 random instances.
fn freeness_vanishing() -> Outcome {
    let mut rng = random::rng(303);
    let models = vec![random::schmidt_model(&mut rng, 2, 2), random::schmidt_model(&mut rng, 2, 2)];
    let sys = BiFreeSystem::from_models(&models, Config::default());
    let spaces: Vec<FreeProductSpace> = (1..=4)
        .map(|n| FreeProductSpace::build(&models, 2 * n))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let instances = 120;
    for k in 0..instances {
        let len = 1 + k % 4;
        let first = rng.random_range(0..2);
        let pattern: Vec<usize> = (0..len).map(|j| (first + j) % 2).collect();
        let factors: Vec<NCPoly> = pattern
            .iter()
            .map(|&i| sys.random_centered(i, &mut rng, 2).map(|x| x.to_poly()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let mut product = NCPoly::one();
        for f in &factors {
            product = product.mul(f).map_err(|e| e.to_string())?;
        }
        let a = sys.evaluate_tau(&product).map_err(|e| e.to_string())?;
        let b = spaces[len - 1].oracle_tau_product(&factors).map_err(|e| e.to_string())?;
        worst = worst.max(a.norm()).max(b.norm());
        ensure(a.norm() <= 1e-9 && b.norm() <= 1e-9, || format!("pattern {pattern:?}: {a}, {b}"))?;
    }
    Ok(format!("{instances} instances, max |tau| {worst:.2e}"))
}

/// Criterion 4: centered_pairing is exactly 0 whenever lengths or patterns differ, over all
/// alternating patterns of length ≤ 3 with two components.
fn delta_orthogonality() -> Outcome {
    let mut rng = random::rng(404);
    let models = vec![random::schmidt_model(&mut rng, 2, 2), random::schmidt_model(&mut rng, 3, 2)];
    let sys = BiFreeSystem::from_models(&models, Config::default());
    let mut patterns: Vec<Vec<usize>> = vec![vec![]];
    for len in 1..=3 {
        for first in 0..2 {
            patterns.push((0..len).map(|j| (first + j) % 2).collect());
        }
    }
    let term = |pattern: &[usize], rng: &mut rand_chacha::ChaCha8Rng| -> Result<CenteredTerm, String> {
        let factors: Vec<LocalElement> = pattern
            .iter()
            .map(|&i| sys.random_centered(i, rng, 2))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        Ok(CenteredTerm { coefficient: random::complex_gaussian(rng), factors })
    };
    let mut zero_pairs = 0;
    for pa in &patterns {
        for pb in &patterns {
            for _ in 0..5 {
                let a = term(pa, &mut rng)?;
                let b = term(pb, &mut rng)?;
                let v = sys.centered_pairing(&a, &b).map_err(|e| e.to_string())?;
                if pa != pb {
                    ensure(v == Scalar::new(0.0, 0.0), || format!("{pa:?} vs {pb:?}: {v}"))?;
                    zero_pairs += 1;
                } else {
                    ensure(v != Scalar::new(0.0, 0.0), || format!("{pa:?} paired with itself vanished"))?;
                }
            }
        }
    }
    Ok(format!("{} patterns, {zero_pairs} mismatched pairs all exactly 0", patterns.len()))
}

/// Criterion 5: θ∘θ = id, θ(pq) = θ(p)θ(q), θ(λp) = conj(λ)θ(p) on ≥ 1000 random
/// polynomials.
fn involution_homomorphism() -> Outcome {
    let mut rng = random::rng(505);
    let gens = [2, 3, 1];
    let (mut e_inv, mut e_mul, mut e_lin) = (0.0f64, 0.0f64, 0.0f64);
    let n = 1000;
    for _ in 0..n {
        let p = random::poly(&mut rng, &gens, 4, 5, true);
        let q = random::poly(&mut rng, &gens, 4, 5, true);
        let lambda = random::complex_gaussian(&mut rng);
        e_inv = e_inv.max(p.theta().theta().max_diff(&p));
        let pq = p.mul(&q).map_err(|e| e.to_string())?;
        let tp_tq = p.theta().mul(&q.theta()).map_err(|e| e.to_string())?;
        e_mul = e_mul.max(pq.theta().max_diff(&tp_tq));
        e_lin = e_lin.max(p.scale(lambda).theta().max_diff(&p.theta().scale(lambda.conj())));
    }
    ensure(e_inv <= 1e-12, || format!("involution defect {e_inv}"))?;
    ensure(e_mul <= 1e-10, || format!("homomorphism defect {e_mul}"))?;
    ensure(e_lin <= 1e-12, || format!("anti-linearity defect {e_lin}"))?;
    Ok(format!("{n} polynomials, defects {e_inv:.1e} / {e_mul:.1e} / {e_lin:.1e}"))
}

/// Criterion 6: Hadamard products of random PSD pairs, and of the per-level component
/// Gram blocks from criterion 2, have min eigenvalue ≥ −1e-10.
fn schur_step(blocks: &[PatternBlock]) -> Outcome {
    let mut rng = random::rng(606);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(1..=8);
        let psd = |rng: &mut rand_chacha::ChaCha8Rng| -> DMatrix<Scalar> {
            let k = rng.random_range(1..=n);
            let x = DMatrix::from_fn(k, n, |_, _| random::complex_gaussian(rng));
            x.adjoint() * x
        };
        let a = psd(&mut rng);
        let b = psd(&mut rng);
        let h = hadamard(&a, &b).map_err(|e| e.to_string())?;
        let m = min_eigenvalue(&h);
        worst = worst.min(m);
        ensure(m >= -1e-10, || format!("random pair of size {n}: {m}"))?;
    }
    ensure(!blocks.is_empty(), || "no pattern blocks from criterion 2".into())?;
    let mut block_worst = f64::INFINITY;
    let mut max_mismatch: f64 = 0.0;
    for b in blocks {
        let m = min_eigenvalue(&b.schur);
        block_worst = block_worst.min(m);
        ensure(m >= -1e-10, || format!("pattern {:?}: Schur min eig {m}", b.pattern))?;
        let scale = 1.0 + b.direct.norm();
        max_mismatch = max_mismatch.max((&b.schur - &b.direct).norm() / scale);
    }
    ensure(max_mismatch <= 1e-10, || format!("Schur product differs from pairing by {max_mismatch}"))?;
    Ok(format!(
        "random min eig {worst:.2e}; {} pattern blocks, min eig {block_worst:.2e}",
        blocks.len()
    ))
}

/// Criterion 7: c*Gc = τ(θ(a)a) to 1e-9 for random c over the length-≤2 basis.
fn quadratic_form_consistency() -> Outcome {
    let mut rng = random::rng(707);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for _ in 0..3 {
        let sys = random_rp_system(&mut rng);
        let basis = positive_words(&sys, 2).map_err(|e| e.to_string())?;
        let gram = bifree::build_gram(&sys, &basis).map_err(|e| e.to_string())?;
        for _ in 0..30 {
            let c = random::gaussian_vector(&mut rng, basis.len());
            let a = combination(&basis, &c);
            let direct = sys.evaluate_tau(&a.theta().mul(&a).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let form = quadratic_form(&gram.matrix, &c);
            worst = worst.max((direct - form).norm());
            ensure((direct - form).norm() <= 1e-9, || format!("{direct} vs {form}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} vectors, max |diff| {worst:.2e}"))
}

/// Criterion 8: A model with one non-RP component yields hypothesis failure (exit 3)
/// and a Gram witness with w*Gw < −1e-6, confirmed by direct evaluation.
fn negative_control() -> Outcome {
    // random search over Hermitian-state d=2 components
    let mut rng = random::rng(808);
    let mut found = None;
    for attempt in 0..200 {
        let m = random::hermitian_model(&mut rng, 2, 1);
        let r = check_component_rp(&m, 2, 1e-8).map_err(|e| e.to_string())?;
        if r.min_eig < -1e-6 {
            found = Some((attempt, m));
            break;
        }
    }
    let (attempt, bad) = found.ok_or("no non-RP component found")?;
    let good = random::schmidt_model(&mut rng, 2, 2);
    let sys = BiFreeSystem::from_models(&[good, bad], Config::default());
    let report = verify_theorem(&sys, 2, 100, 1e-8, 1).map_err(|e| e.to_string())?;
    ensure(report.status == TheoremStatus::HypothesisFailure, || format!("status {:?}", report.status))?;
    let w = report.gram.witness.clone().ok_or("no Gram witness")?;
    let form = quadratic_form(&report.gram.matrix, &w);
    ensure(form.re < -1e-6, || format!("w*Gw = {form}"))?;
    let basis = positive_words(&sys, 2).map_err(|e| e.to_string())?;
    let a = combination(&basis, &w);
    let direct = sys.evaluate_tau(&a.theta().mul(&a).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(direct.re < -1e-6 && (direct - form).norm() <= 1e-9, || format!("direct {direct} vs {form}"))?;

    let out = Command::new(env!("CARGO_BIN_EXE_bifree"))
        .args(["verify-theorem", model_path("non_rp.json").to_str().unwrap(), "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(3), || format!("exit code {:?}", out.status.code()))?;
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let gram = &json["result"]["gram"];
    let cli_form = gram["witness_quadratic_form"][0].as_f64().ok_or("no witness in report")?;
    let cli_direct = gram["witness_value"][0].as_f64().ok_or("no witness value in report")?;
    ensure(cli_form < -1e-6 && (cli_form - cli_direct).abs() <= 1e-9, || {
        format!("CLI witness {cli_form} vs {cli_direct}")
    })?;
    Ok(format!(
        "search hit after {} tries, w*Gw {:.4}, direct {:.4}; CLI exit 3, w*Gw {cli_form:.4}",
        attempt + 1,
        form.re,
        direct.re
    ))
}

/// Criterion 9: Two `verify-theorem --json` runs with identical inputs are
/// byte-identical.
fn determinism() -> Outcome {
    let run = || -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_bifree"))
            .args(["verify-theorem", model_path("three_components.json").to_str().unwrap(), "--json"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(0), || format!("exit code {:?}", out.status.code()))?;
        Ok(out.stdout)
    };
    let first = run()?;
    let second = run()?;
    ensure(first == second, || "reports differ".into())?;
    Ok(format!("{} identical bytes", first.len()))
}

fn main() {
    let mut blocks = Vec::new();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 oracle equivalence", oracle_equivalence()),
        ("2 theorem at desk scale", theorem_at_desk_scale(&mut blocks)),
        ("3 freeness vanishing", freeness_vanishing()),
        ("4 delta-orthogonality", delta_orthogonality()),
        ("5 involution/homomorphism", involution_homomorphism()),
        ("6 Schur step", schur_step(&blocks)),
        ("7 quadratic-form consistency", quadratic_form_consistency()),
        ("8 negative control", negative_control()),
        ("9 determinism", determinism()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", results.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", results.len());
}
