use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use wavekit::diffusion::BrickLayout;
use wavekit::gf2::Subspace;
use wavekit::groups::{
    feistel_inverse, fn_generators, is_primitive, is_primitive_exhaustive, is_transitive, orbit,
    spn_generators, spn_generators_for, subspace_block_oracle, BlockSystem, GeneratorAction,
};
use wavekit::instance::build_reference_instance;
use wavekit::toys::{random_bijective_spec, LayerKind};

fn toy() -> Arc<wavekit::wave::WaveSpec> {
    random_bijective_spec(BrickLayout::new(2, 2, 3).unwrap(), LayerKind::Parallel, 11).unwrap()
}

#[test]
fn toy_generators_act_on_the_right_domain() {
    let spec = toy();
    let spn = spn_generators(&spec).unwrap();
    assert_eq!(spn.generators().len(), 5);
    assert_eq!(spn.domain_size(), 16);
    assert!(spn.contains_translations());
    spn.check_bijective().unwrap();

    let fnw = fn_generators(&spec).unwrap();
    assert_eq!(fnw.generators().len(), 5);
    assert_eq!(fnw.domain_size(), 256);
    assert!(fnw.contains_translations());
    fnw.check_bijective().unwrap();
}

#[test]
fn translations_commute() {
    let t = GeneratorAction::translation_group(5).unwrap();
    let g = t.generators();
    for a in g {
        for b in g {
            assert!((0..32).all(|x| a.apply(b.apply(x)) == b.apply(a.apply(x))));
        }
    }
}

/// `(x₁, x₂) ρ̄ σ_(0,k) ρ̄⁻¹ = (x₁ ⊕ k, x₂)`, with `ρ̄⁻¹` built from `ρ` alone.
fn assert_conjugation(rho: &dyn Fn(u64) -> u64, points: impl Iterator<Item = (u64, u64, u64)>) {
    for (x1, x2, k) in points {
        let (y1, y2) = (x2, x1 ^ rho(x2));
        let (z1, z2) = (y1, y2 ^ k);
        assert_eq!((z2 ^ rho(z1), z1), (x1 ^ k, x2));
    }
}

#[test]
fn feistel_conjugates_right_translations_to_left_ones() {
    let spec = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(42);
    let points: Vec<_> = (0..10_000).map(|_| (rng.gen_range(0..16), rng.gen_range(0..16), rng.gen_range(0..16))).collect();
    assert_conjugation(&|x| spec.rho(x), points.into_iter());

    let inst = build_reference_instance().unwrap();
    let points: Vec<_> = (0..10_000)
        .map(|_| (rng.gen::<u32>() as u64, rng.gen::<u32>() as u64, rng.gen::<u32>() as u64))
        .collect();
    assert_conjugation(&|x| inst.spec().rho(x), points.into_iter());

    let inverse = feistel_inverse(4, |x| spec.rho(x));
    let fnw = fn_generators(&spec).unwrap();
    let bar = fnw.generators().last().unwrap();
    assert!((0..256).all(|x| inverse(bar.apply(x)) == x));
    // and through the encoded generators: ρ̄ then σ_(0,k) then ρ̄⁻¹ is σ_(k,0)
    for k in 0..16u64 {
        assert!((0..256).all(|x| inverse(bar.apply(x) ^ k) == x ^ (k << 4)));
    }
}

#[test]
fn feistel_map_alone_is_not_transitive() {
    let spec = toy();
    let fnw = fn_generators(&spec).unwrap();
    let bar = fnw.generators().last().unwrap().clone();
    let alone = GeneratorAction::new(8, vec![bar]).unwrap();
    assert!(!alone.contains_translations());
    assert_eq!(orbit(&alone, 0).unwrap(), vec![0]);
    assert!(!is_transitive(&alone).unwrap());
}

#[test]
fn linear_rho_is_imprimitive() {
    let action = spn_generators_for(4, Arc::new(|x| x)).unwrap();
    let p = is_primitive(&action).unwrap();
    assert!(!p.primitive);
    let blocks = p.blocks.unwrap();
    assert!(blocks.is_invariant_under(&action) && !blocks.is_trivial());
}

#[test]
fn block_diagonal_layers_leave_a_subspace_invariant() {
    let spec = random_bijective_spec(BrickLayout::new(2, 2, 3).unwrap(), LayerKind::BlockDiagonal, 5).unwrap();
    let oracle = subspace_block_oracle(&spec).unwrap();
    assert!(!oracle.primitive);
    let basis: Vec<u64> = oracle
        .witness
        .unwrap()
        .iter()
        .map(|h| u64::from_str_radix(h.trim_start_matches("0x"), 16).unwrap())
        .collect();
    let u = Subspace::span(4, basis).unwrap();
    let action = spn_generators(&spec).unwrap();
    assert!(BlockSystem::cosets(&u).is_invariant_under(&action));
    // every brick is such a subspace
    let layout = spec.layout();
    for j in 0..layout.bricks {
        let wall = layout.v_wall(1 << j);
        assert!(BlockSystem::cosets(&wall).is_invariant_under(&action), "brick {j}");
    }
    assert!(!is_primitive(&action).unwrap().primitive);
}

#[test]
fn returned_blocks_are_invariant_and_exhaustive_search_agrees() {
    for seed in 0..6 {
        let kind = if seed % 2 == 0 { LayerKind::Parallel } else { LayerKind::BlockDiagonal };
        let spec = random_bijective_spec(BrickLayout::new(2, 2, 3).unwrap(), kind, seed).unwrap();
        let action = spn_generators(&spec).unwrap();
        let fast = is_primitive(&action).unwrap();
        let slow = is_primitive_exhaustive(&action).unwrap();
        assert_eq!(fast.primitive, slow.primitive, "seed {seed}");
        for p in [fast, slow] {
            if let Some(b) = p.blocks {
                assert!(b.is_invariant_under(&action) && b.is_uniform() && !b.is_trivial());
            }
        }
    }
}
