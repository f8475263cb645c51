use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use wavekit::diffusion::BrickLayout;
use wavekit::gf2::{mask, BitMatrix, BitVector, Subspace};
use wavekit::instance::build_reference_instance;
use wavekit::toys::{random_bijective_spec, random_sbox, LayerKind};
use wavekit::wave::FeistelCipher;

fn matrix() -> impl Strategy<Value = BitMatrix> {
    (1usize..12, 1usize..12).prop_flat_map(|(rows, cols)| {
        prop::collection::vec(any::<u64>(), rows)
            .prop_map(move |data| BitMatrix::from_rows(cols, data.into_iter().map(|r| r & mask(cols)).collect()).unwrap())
    })
}

fn sbox_dims() -> impl Strategy<Value = (usize, usize, u64)> {
    prop_oneof![Just((3usize, 3usize)), Just((4, 4)), Just((4, 5))].prop_flat_map(|(s, t)| (Just(s), Just(t), any::<u64>()))
}

proptest! {
    #[test]
    fn rank_nullity(m in matrix()) {
        prop_assert_eq!(m.rank() + m.kernel().dim(), m.rows());
        prop_assert_eq!(m.image().dim(), m.rank());
        for &k in m.kernel().basis() {
            prop_assert_eq!(m.apply(k), 0);
        }
    }

    #[test]
    fn preimage_of_zero_is_kernel(m in matrix()) {
        let zero = Subspace::zero(m.cols()).unwrap();
        prop_assert_eq!(m.preimage(&zero).unwrap(), m.kernel());
        let full = Subspace::full(m.cols()).unwrap();
        prop_assert!(m.preimage(&full).unwrap().is_full());
    }

    #[test]
    fn preimage_lands_in_target(m in matrix(), gens in prop::collection::vec(any::<u64>(), 0..4)) {
        let target = Subspace::span(m.cols(), gens.into_iter().map(|g| g & mask(m.cols()))).unwrap();
        let pre = m.preimage(&target).unwrap();
        for x in pre.elements().take(64) {
            prop_assert!(target.contains(m.apply(x)));
        }
        prop_assert!(m.kernel().is_subspace_of(&pre));
    }

    #[test]
    fn hex_round_trip(width in 1usize..=64, bits in any::<u64>()) {
        let v = BitVector::new(width, bits & mask(width)).unwrap();
        prop_assert_eq!(BitVector::from_hex(&v.to_hex(), width).unwrap(), v);
    }

    #[test]
    fn ddt_invariants((s, t, seed) in sbox_dims()) {
        let f = random_sbox(s, t, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
        let ddt = f.ddt().unwrap();
        prop_assert_eq!(ddt.get(0, 0), 1 << s);
        for u in 0..1u64 << s {
            prop_assert_eq!(ddt.row(u).iter().sum::<u32>(), 1 << s);
            prop_assert!(ddt.row(u).iter().all(|c| c % 2 == 0));
            if u != 0 {
                prop_assert_eq!(ddt.get(u, 0), 0);
            }
        }
        prop_assert_eq!(ddt.differential_uniformity(), f.differential_uniformity());
    }

    #[test]
    fn uniformity_bounds_derivative_images((s, t, seed) in sbox_dims()) {
        let f = random_sbox(s, t, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
        let du = f.differential_uniformity();
        prop_assert!(f.is_weakly_delta_du(du).unwrap());
        for u in 1..1u64 << s {
            prop_assert!(f.derivative_image_size(u) as u32 * du >= 1 << s);
        }
    }

    #[test]
    fn toy_cipher_round_trips(seed in 0u64..64, master in any::<u64>(), pt in any::<u64>(), rounds in 1usize..9) {
        let spec = random_bijective_spec(BrickLayout::new(3, 2, 3).unwrap(), LayerKind::Parallel, seed).unwrap();
        let cipher = FeistelCipher::with_test_only_keys(spec, master, rounds).unwrap();
        let pt = pt & mask(12);
        prop_assert_eq!(cipher.decrypt_block(cipher.encrypt_block(pt).unwrap()).unwrap(), pt);
    }
}

#[test]
fn reference_cipher_round_trips() {
    let inst = build_reference_instance().unwrap();
    let spec: Arc<_> = inst.spec().clone();
    proptest!(|(master in any::<u64>(), pt in any::<u64>(), rounds in 1usize..64)| {
        let cipher = FeistelCipher::with_test_only_keys(spec.clone(), master, rounds).unwrap();
        prop_assert_eq!(cipher.decrypt_block(cipher.encrypt_block(pt).unwrap()).unwrap(), pt);
    });
}
