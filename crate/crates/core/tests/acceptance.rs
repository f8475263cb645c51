//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs with `cargo test -p wavekit --test acceptance`.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use wavekit::diffusion::BrickLayout;
use wavekit::gf2::{proper_nontrivial_subspaces, Subspace};
use wavekit::groups::{
    fn_generators, is_primitive, minimal_block, random_reduction_experiment, spn_generators,
    subspace_block_oracle, verify_reduction, verify_sufficient_conditions, BlockSystem, Conclusion,
    GeneratorAction,
};
use wavekit::instance::{
    build_from_text, build_reference_instance, reference_ddt, KAT_FILE, LAMBDA_FILE, MISSING_SUM,
    SBOX_FILE,
};
use wavekit::sbox::SBoxTable;
use wavekit::toys::{cube_spec, random_bijective_spec, random_spec, LayerKind};
use wavekit::trails::{differential_bound, exhaustive_trail_check, linear_bound, min_active_sboxes, Model};
use wavekit::wave::{verify_kats, CertificatePath, FeistelCipher, Kat, WaveSpec};
use wavekit::Error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(
        elapsed < limit,
        format!("{what} took {elapsed:?}, budget {limit:?}"),
    )
}

fn ddt_reproduction() -> Outcome {
    let sbox = SBoxTable::parse(SBOX_FILE).map_err(|e| e.to_string())?;
    let reference = reference_ddt().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let ddt = sbox.ddt().map_err(|e| e.to_string())?;
    let du = ddt.differential_uniformity();
    let elapsed = start.elapsed();
    let mut cells = 0;
    for u in 0..16u64 {
        for v in 0..32u64 {
            ensure(
                ddt.get(u, v) == reference[u as usize][v as usize],
                format!("cell ({u:X},{v:02X}) differs"),
            )?;
            cells += 1;
        }
    }
    ensure(du == 2, format!("differential uniformity {du}"))?;
    within(elapsed, Duration::from_millis(1), "DDT")?;
    Ok(format!("{cells} cells equal, uniformity 2, {elapsed:?}"))
}

fn sum_set() -> Outcome {
    let sbox = SBoxTable::parse(SBOX_FILE).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let size = sbox.image_sum_set().len();
    let missing = sbox.missing_sums();
    let elapsed = start.elapsed();
    ensure(size == 31, format!("sum set has {size} elements"))?;
    ensure(missing == [MISSING_SUM], format!("missing {missing:?}"))?;
    within(elapsed, Duration::from_millis(1), "sum set")?;
    Ok(format!("31 sums, missing 0x11, {elapsed:?}"))
}

fn lambda_certification() -> Outcome {
    let inst = build_reference_instance().map_err(|e| e.to_string())?;
    let lambda = inst.spec().lambda();
    let l = lambda.layout();
    let start = Instant::now();
    let rank = lambda.matrix().rank();
    let kernel = lambda.kernel();
    let expected = Subspace::span(40, (0..8).map(|j| l.place_w(MISSING_SUM, j))).map_err(|e| e.to_string())?;
    let parallel = lambda.is_parallel_kernel();
    let proper = lambda.properness().map_err(|e| e.to_string())?;
    let branch = lambda.branch_number(3).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(rank == 32, format!("rank {rank}"))?;
    ensure(kernel == expected && kernel.dim() == 8, "kernel differs from the 0x11 span")?;
    ensure(parallel, "kernel not parallel")?;
    ensure(proper.proper && proper.walls_checked == 254, format!("{proper:?}"))?;
    let x = branch.witness.value();
    let image = lambda.apply(x);
    let total = l.w_weight(x) + l.v_weight(image);
    ensure(
        branch.value == 2 && total == 2 && !kernel.contains(x),
        format!("branch number {} (witness weight {total})", branch.value),
    )?;
    within(elapsed, Duration::from_secs(10), "layer certification")?;
    Ok(format!(
        "rank 32, kernel dim 8, parallel, proper over 254 walls, branch number 2 at {}, {elapsed:?}",
        branch.witness.to_hex()
    ))
}

fn exhaustively_bijective(spec: &WaveSpec) -> bool {
    let n = spec.width();
    let mut seen = vec![false; 1 << n];
    (0..1u64 << n).all(|x| !std::mem::replace(&mut seen[spec.rho(x) as usize], true))
}

fn bijectivity() -> Outcome {
    let inst = build_reference_instance().map_err(|e| e.to_string())?;
    let cert = inst.spec().certify().map_err(|e| e.to_string())?;
    ensure(cert.bijective && cert.path == CertificatePath::PerBrick, format!("{cert:?}"))?;

    let layouts = [
        (BrickLayout::new(2, 2, 3), LayerKind::Parallel),
        (BrickLayout::new(3, 2, 3), LayerKind::Parallel),
        (BrickLayout::new(2, 3, 4), LayerKind::Dense),
        (BrickLayout::new(2, 4, 5), LayerKind::Parallel),
        (BrickLayout::new(3, 3, 4), LayerKind::Dense),
        (BrickLayout::new(4, 3, 4), LayerKind::Parallel),
        (BrickLayout::new(2, 6, 7), LayerKind::Dense),
    ];
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let (mut pass, mut fail, mut generic) = (0, 0, 0);
    for i in 0.. {
        if pass >= 20 && fail >= 20 {
            break;
        }
        ensure(i < 5000, format!("only {pass} passing and {fail} failing toys"))?;
        let (layout, kind) = &layouts[i % layouts.len()];
        let layout = *layout.as_ref().map_err(|e| e.to_string())?;
        let kind = *kind;
        let spec = random_spec(layout, kind, &mut rng).map_err(|e| e.to_string())?;
        let cert = spec.certify().map_err(|e| e.to_string())?;
        let truth = exhaustively_bijective(&spec);
        ensure(cert.bijective == truth, format!("certificate disagrees on toy {i}"))?;
        if let Some(c) = &cert.collision {
            let x = u64::from_str_radix(c.x.trim_start_matches("0x"), 16).unwrap();
            let y = u64::from_str_radix(c.y.trim_start_matches("0x"), 16).unwrap();
            ensure(x != y && spec.rho(x) == spec.rho(y), "collision witness is not a collision")?;
        }
        if cert.path == CertificatePath::Generic {
            generic += 1;
        }
        if truth {
            pass += 1;
        } else {
            fail += 1;
        }
    }
    Ok(format!(
        "reference per-brick certificate; {pass} bijective and {fail} non-bijective toys agree ({generic} via the generic path)"
    ))
}

fn cipher_correctness() -> Outcome {
    let inst = build_reference_instance().map_err(|e| e.to_string())?;
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let trials = 100_000;
    for _ in 0..trials / 1000 {
        let cipher = FeistelCipher::with_test_only_keys(inst.spec().clone(), rng.gen(), 48)
            .map_err(|e| e.to_string())?;
        for _ in 0..1000 {
            let pt: u64 = rng.gen();
            let ct = cipher.encrypt_block(pt).map_err(|e| e.to_string())?;
            ensure(cipher.decrypt_block(ct).map_err(|e| e.to_string())? == pt, format!("round trip failed for {pt:#X}"))?;
        }
    }
    // toy b=1, s=2, t=3, three rounds: every key schedule and every block
    let toy = random_bijective_spec(BrickLayout::new(1, 2, 3).unwrap(), LayerKind::Parallel, 1)
        .map_err(|e| e.to_string())?;
    let mut blocks = 0;
    for keys in 0..64u64 {
        let round_keys = vec![keys >> 4, (keys >> 2) & 3, keys & 3];
        let cipher = FeistelCipher::new(toy.clone(), round_keys).map_err(|e| e.to_string())?;
        let mut images = [false; 16];
        for pt in 0..16u64 {
            let ct = cipher.encrypt_block(pt).map_err(|e| e.to_string())?;
            ensure(!std::mem::replace(&mut images[ct as usize], true), "toy encryption not injective")?;
            ensure(cipher.decrypt_block(ct).map_err(|e| e.to_string())? == pt, "toy round trip failed")?;
            blocks += 1;
        }
    }
    Ok(format!(
        "{trials} random round trips at 48 rounds; {blocks} toy blocks over all 64 key schedules; decryption uses the forward wave function only"
    ))
}

fn differential_bounds() -> Outcome {
    let inst = build_reference_instance().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let a3 = min_active_sboxes(inst.spec(), 3, Model::Coarse).map_err(|e| e.to_string())?;
    let d3 = differential_bound(inst.spec(), 3, Model::Coarse).map_err(|e| e.to_string())?;
    let d48 = differential_bound(inst.spec(), 48, Model::Coarse).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(a3.min_active == 2 && a3.pattern() == "1-0-1", format!("{} active, pattern {}", a3.min_active, a3.pattern()))?;
    ensure(d3.diff_prob_log2 == Ratio::from_integer(-6), format!("3 rounds: {}", d3.diff_prob_log2))?;
    ensure(d48.diff_prob_log2 == Ratio::from_integer(-96), format!("48 rounds: {}", d48.diff_prob_log2))?;
    within(elapsed, Duration::from_secs(5), "differential bounds")?;
    Ok(format!("2 active S-boxes over 3 rounds (1-0-1); log2 -6 and -96; {elapsed:?}"))
}

fn linear_bounds() -> Outcome {
    let inst = build_reference_instance().map_err(|e| e.to_string())?;
    let l3 = linear_bound(inst.spec(), 3, Model::Coarse).map_err(|e| e.to_string())?;
    let l48 = linear_bound(inst.spec(), 48, Model::Coarse).map_err(|e| e.to_string())?;
    ensure(l3.bias_log2 == Some(Ratio::from_integer(-3)), format!("3 rounds: {:?}", l3.bias_log2))?;
    ensure(l48.bias_log2 == Some(Ratio::from_integer(-33)), format!("48 rounds: {:?}", l48.bias_log2))?;
    ensure(
        l48.data_complexity_log2 == Some(Ratio::from_integer(66)),
        format!("data: {:?}", l48.data_complexity_log2),
    )?;
    Ok("bias log2 -3 and -33, data complexity log2 66".into())
}

fn non_invariance() -> Outcome {
    let inst = build_reference_instance().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let sbox = &inst.spec().sboxes()[0];
    let xi = Subspace::span(5, [MISSING_SUM]).map_err(|e| e.to_string())?;
    let zero = sbox.is_delta_non_invariant(&xi, 0).map_err(|e| e.to_string())?;
    ensure(zero, "S-box is not 0-non-invariant")?;
    let report = verify_sufficient_conditions(inst.spec(), 1).map_err(|e| e.to_string())?;
    let set = report.condition("small-kernel").ok_or("missing condition set")?;
    ensure(
        set.hypotheses_hold && set.conclusion == Conclusion::HypothesesHoldConclusionByTheorem,
        format!("{set:?}"),
    )?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30), "non-invariance")?;
    Ok(format!("0-non-invariant; small-kernel checklist at delta 1 holds; {elapsed:?}"))
}

fn group_results() -> Outcome {
    let start = Instant::now();
    // (a) two primitivity oracles on toy specs with n <= 8
    let layouts = [
        (BrickLayout::new(2, 2, 3), LayerKind::Parallel),
        (BrickLayout::new(2, 2, 3), LayerKind::BlockDiagonal),
        (BrickLayout::new(2, 3, 4), LayerKind::Parallel),
        (BrickLayout::new(2, 3, 3), LayerKind::Dense),
        (BrickLayout::new(3, 2, 3), LayerKind::Parallel),
        (BrickLayout::new(2, 4, 5), LayerKind::Parallel),
        (BrickLayout::new(4, 2, 2), LayerKind::BlockDiagonal),
    ];
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let (mut agree, mut primitive) = (0, 0);
    let mut i = 0;
    while agree < 50 {
        let (layout, kind) = &layouts[i % layouts.len()];
        i += 1;
        let spec = Arc::new(random_spec(*layout.as_ref().unwrap(), *kind, &mut rng).map_err(|e| e.to_string())?);
        if !spec.certify().map_err(|e| e.to_string())?.bijective {
            continue;
        }
        let action = spn_generators(&spec).map_err(|e| e.to_string())?;
        let blocks = is_primitive(&action).map_err(|e| e.to_string())?;
        let oracle = subspace_block_oracle(&spec).map_err(|e| e.to_string())?;
        ensure(blocks.primitive == oracle.primitive, format!("oracles disagree on toy {i}"))?;
        if let Some(b) = &blocks.blocks {
            ensure(b.is_invariant_under(&action) && b.is_uniform(), "witness blocks not a block system")?;
        }
        agree += 1;
        primitive += blocks.primitive as usize;
    }
    // (b) random non-affine permutations of (F2)^6
    let experiment = random_reduction_experiment(6, 500, 2024).map_err(|e| e.to_string())?;
    ensure(experiment.counterexamples.is_empty(), "counterexample to the reduction")?;
    // (c) a toy meeting the differential-uniformity conditions
    let cube = cube_spec(1).map_err(|e| e.to_string())?;
    let conditions = verify_sufficient_conditions(&cube, 1).map_err(|e| e.to_string())?;
    let uniform = conditions.condition("uniform").ok_or("missing condition set")?;
    ensure(uniform.conclusion == Conclusion::Confirmed, format!("{uniform:?}"))?;
    let reduction = verify_reduction(&cube).map_err(|e| e.to_string())?;
    ensure(reduction.spn.primitive && reduction.feistel.primitive, format!("{reduction:?}"))?;
    let feistel = is_primitive(&fn_generators(&cube).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(feistel.primitive, "Feistel action of the cube toy imprimitive")?;
    // (d) cosets of every subspace are blocks of the translation group
    let mut cosets = 0;
    for n in 1..=4 {
        let t = GeneratorAction::translation_group(n).map_err(|e| e.to_string())?;
        for u in proper_nontrivial_subspaces(n).map_err(|e| e.to_string())? {
            let bs = BlockSystem::cosets(&u);
            ensure(bs.is_invariant_under(&t) && bs.is_uniform() && !bs.is_trivial(), "coset partition not a block system")?;
            if u.dim() == 1 {
                let mb = minimal_block(&t, 0, u.basis()[0]).map_err(|e| e.to_string())?;
                ensure(mb == bs, "minimal block differs from the cosets of a line")?;
            }
            cosets += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(600), "group experiments")?;
    Ok(format!(
        "(a) {agree} toys agree ({primitive} primitive); (b) 500 random permutations, 0 counterexamples; (c) cube toy primitive on 2^6 and 2^12 points; (d) {cosets} coset systems; {elapsed:?}"
    ))
}

fn trail_soundness() -> Outcome {
    let cases = [
        (BrickLayout::new(2, 2, 3), LayerKind::Parallel),
        (BrickLayout::new(3, 2, 3), LayerKind::Parallel),
        (BrickLayout::new(2, 3, 3), LayerKind::Parallel),
        (BrickLayout::new(2, 2, 2), LayerKind::Parallel),
        (BrickLayout::new(5, 2, 2), LayerKind::Parallel),
        (BrickLayout::new(2, 2, 3), LayerKind::BlockDiagonal),
        (BrickLayout::new(3, 2, 3), LayerKind::BlockDiagonal),
        (BrickLayout::new(2, 3, 3), LayerKind::Dense),
        (BrickLayout::new(2, 2, 3), LayerKind::Dense),
        (BrickLayout::new(4, 2, 3), LayerKind::Parallel),
        (BrickLayout::new(3, 1, 2), LayerKind::Dense),
        (BrickLayout::new(2, 5, 5), LayerKind::Parallel),
    ];
    let mut checks = 0;
    let count = cases.len();
    for (seed, (layout, kind)) in cases.into_iter().enumerate() {
        let spec = random_bijective_spec(layout.unwrap(), kind, seed as u64).map_err(|e| e.to_string())?;
        for rounds in 1..=4 {
            for model in [Model::Coarse, Model::Refined] {
                let audit = exhaustive_trail_check(&spec, rounds, model).map_err(|e| e.to_string())?;
                ensure(
                    audit.sound && audit.model_min <= audit.true_min,
                    format!("spec {seed}, {rounds} rounds, {model:?}: {audit:?}"),
                )?;
                checks += 1;
            }
        }
    }
    Ok(format!("{} specs, {checks} audits, model minimum never above the true minimum", count))
}

fn kat_stability() -> Outcome {
    let inst = build_reference_instance().map_err(|e| e.to_string())?;
    let kats = Kat::parse_file(KAT_FILE).map_err(|e| e.to_string())?;
    ensure(kats.len() == 20, format!("{} vectors", kats.len()))?;
    let bad = verify_kats(inst.spec(), &kats).map_err(|e| e.to_string())?;
    ensure(bad.is_empty(), format!("{} mismatches", bad.len()))?;
    let mut mutations = 0;
    for (name, original, is_sbox) in [("S-box", SBOX_FILE, true), ("matrix", LAMBDA_FILE, false)] {
        let bytes = original.as_bytes();
        for i in 0..bytes.len() {
            let mut m = bytes.to_vec();
            m[i] ^= 0x01;
            let Ok(text) = String::from_utf8(m) else { continue };
            let result = if is_sbox {
                build_from_text(&text, LAMBDA_FILE)
            } else {
                build_from_text(SBOX_FILE, &text)
            };
            ensure(
                matches!(result, Err(Error::CertificationFailed(_))),
                format!("{name} byte {i} mutation accepted"),
            )?;
            mutations += 1;
        }
    }
    Ok(format!("20 vectors verify; all {mutations} single-byte data mutations rejected"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("DDT reproduction", ddt_reproduction),
        ("sum set", sum_set),
        ("diffusion layer certification", lambda_certification),
        ("bijectivity", bijectivity),
        ("cipher correctness", cipher_correctness),
        ("differential bounds", differential_bounds),
        ("linear bounds", linear_bounds),
        ("non-invariance", non_invariance),
        ("group results at toy scale", group_results),
        ("truncated-model soundness", trail_soundness),
        ("KAT stability", kat_stability),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why}) [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
