//! Seeded generators for small wave ciphers, used by tests, the CLI `--toy`
//! flag and the demo.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::diffusion::{BrickLayout, DiffusionLayer};
use crate::error::{Error, Result};
use crate::gf2::{mask, BitMatrix};
use crate::sbox::SBoxTable;
use crate::wave::WaveSpec;

/// Draws before [`random_bijective_spec`] gives up.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerKind {
    /// Per-brick compressions followed by a random invertible mix: the kernel
    /// is parallel with `t − s` dimensions per brick.
    Parallel,
    /// Per-brick compressions only. Every wall maps into itself, so the layer
    /// is never proper when `b ≥ 2`.
    BlockDiagonal,
    /// A random surjective matrix with no imposed structure.
    Dense,
}

/// A random injective S-box with `0 ↦ 0`.
pub fn random_sbox(s: usize, t: usize, rng: &mut impl Rng) -> Result<SBoxTable> {
    if s > 16 || t < s || t > 20 {
        return Err(Error::InvalidArgument(format!("toy S-box {s}x{t} out of range")));
    }
    let mut outputs: Vec<u64> = (1..1u64 << t).collect();
    outputs.shuffle(rng);
    let mut table = vec![0];
    table.extend_from_slice(&outputs[..(1 << s) - 1]);
    SBoxTable::new(s, t, table)
}

fn random_full_rank(rows: usize, cols: usize, rng: &mut impl Rng) -> Result<BitMatrix> {
    loop {
        let data = (0..rows).map(|_| rng.gen::<u64>() & mask(cols)).collect();
        let m = BitMatrix::from_rows(cols, data)?;
        if m.rank() == cols.min(rows) {
            return Ok(m);
        }
    }
}

pub fn random_invertible(n: usize, rng: &mut impl Rng) -> Result<BitMatrix> {
    random_full_rank(n, n, rng)
}

pub fn random_layer(layout: BrickLayout, kind: LayerKind, rng: &mut impl Rng) -> Result<DiffusionLayer> {
    let (n, m) = (layout.n(), layout.m());
    let matrix = match kind {
        LayerKind::Dense => random_full_rank(m, n, rng)?,
        LayerKind::Parallel | LayerKind::BlockDiagonal => {
            let mut rows = Vec::with_capacity(m);
            for j in 0..layout.bricks {
                let a = random_full_rank(layout.t, layout.s, rng)?;
                rows.extend(a.row_bits().iter().map(|&r| layout.place_v(r, j)));
            }
            if kind == LayerKind::Parallel {
                let q = random_invertible(n, rng)?;
                for r in &mut rows {
                    *r = q.apply(*r);
                }
            }
            BitMatrix::from_rows(n, rows)?
        }
    };
    DiffusionLayer::new(layout, matrix)
}

/// A random spec with independent S-boxes; it may or may not be bijective.
pub fn random_spec(layout: BrickLayout, kind: LayerKind, rng: &mut impl Rng) -> Result<WaveSpec> {
    let lambda = random_layer(layout, kind, rng)?;
    let sboxes = (0..layout.bricks)
        .map(|_| random_sbox(layout.s, layout.t, rng))
        .collect::<Result<_>>()?;
    WaveSpec::new(lambda, sboxes)
}

/// The first bijective spec with a proper layer drawn from `seed`.
pub fn random_bijective_spec(layout: BrickLayout, kind: LayerKind, seed: u64) -> Result<Arc<WaveSpec>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let spec = random_spec(layout, kind, &mut rng)?;
        let proper = kind == LayerKind::BlockDiagonal || spec.lambda().is_proper();
        if proper && spec.certify()?.bijective {
            return Ok(Arc::new(spec));
        }
    }
    Err(Error::InvalidArgument(format!(
        "no bijective toy spec with b={} s={} t={} in {MAX_ATTEMPTS} draws",
        layout.bricks, layout.s, layout.t
    )))
}

/// Parses `b,s,t`.
pub fn parse_toy_dims(text: &str) -> Result<BrickLayout> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidArgument(format!("--toy expects b,s,t: {e}")))?;
    match parts[..] {
        [b, s, t] => BrickLayout::new(b, s, t),
        _ => Err(Error::InvalidArgument(format!("--toy expects three numbers b,s,t, got {text:?}"))),
    }
}

/// `x ↦ x³` on `GF(8) = F₂[z]/(z³ + z + 1)`: an APN permutation.
pub fn cube_sbox() -> SBoxTable {
    let mul = |a: u64, b: u64| {
        let mut acc = 0u64;
        for i in 0..3 {
            if b >> i & 1 == 1 {
                acc ^= a << i;
            }
        }
        for i in (3..5).rev() {
            if acc >> i & 1 == 1 {
                acc ^= 0b1011 << (i - 3);
            }
        }
        acc
    };
    let table = (0..8).map(|x| mul(mul(x, x), x)).collect();
    SBoxTable::new(3, 3, table).expect("valid 3-bit table")
}

/// Two bricks of the cube S-box behind a random proper invertible 6×6 layer.
///
/// The S-box has uniformity 2 and the kernel is zero, so this spec meets the
/// differential-uniformity conditions for primitivity at `δ = 1`.
pub fn cube_spec(seed: u64) -> Result<Arc<WaveSpec>> {
    let layout = BrickLayout::new(2, 3, 3)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let lambda = DiffusionLayer::new(layout, random_invertible(6, &mut rng)?)?;
        if lambda.is_proper() {
            return Ok(Arc::new(WaveSpec::uniform(lambda, cube_sbox())?));
        }
    }
    Err(Error::InvalidArgument("no proper 6x6 layer found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_is_apn_permutation() {
        let c = cube_sbox();
        assert!(c.is_injective());
        assert!(c.is_apn());
        assert_eq!(c.apply(2), 3); // z³ = z + 1
    }

    #[test]
    fn parallel_layers_have_parallel_kernels() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..20 {
            let l = random_layer(BrickLayout::new(3, 2, 3).unwrap(), LayerKind::Parallel, &mut rng).unwrap();
            assert!(l.is_parallel_kernel());
            assert!(l.kernel_bricks().iter().all(|k| k.dim() == 1));
        }
    }

    #[test]
    fn block_diagonal_is_not_proper() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let l = random_layer(BrickLayout::new(2, 2, 3).unwrap(), LayerKind::BlockDiagonal, &mut rng).unwrap();
        assert!(!l.is_proper());
    }

    #[test]
    fn toy_dims() {
        assert_eq!(parse_toy_dims("2,2,3").unwrap(), BrickLayout::new(2, 2, 3).unwrap());
        assert!(parse_toy_dims("2,2").is_err());
        assert!(parse_toy_dims("a,b,c").is_err());
    }

    #[test]
    fn seeded_specs_are_reproducible() {
        let l = BrickLayout::new(2, 2, 3).unwrap();
        let a = random_bijective_spec(l, LayerKind::Parallel, 9).unwrap();
        let b = random_bijective_spec(l, LayerKind::Parallel, 9).unwrap();
        assert!((0..16).all(|x| a.rho(x) == b.rho(x)));
    }
}
