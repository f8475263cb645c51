//! Wave functions `ε_k(x) = ((x)γ)λ ⊕ k` and the Feistel ciphers built on them.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::diffusion::{BrickLayout, DiffusionLayer};
use crate::error::{Error, Result};
use crate::gf2::{mask, BitVector};
use crate::sbox::SBoxTable;

/// Largest kernel dimension the generic bijectivity path will enumerate.
pub const GENERIC_KERNEL_MAX_DIM: usize = 24;

/// Inputs at or below this width get an exhaustive affinity test.
pub const AFFINE_EXHAUSTIVE_BITS: usize = 20;

const AFFINE_RANDOM_TRIALS: usize = 256;

/// Parallel S-box layer `γ` followed by a compressing layer `λ`.
///
/// The composite `ρ = γλ` is evaluated through one lookup table per brick:
/// by linearity `xρ = ⊕_j (x_j γ_j)λ`.
pub struct WaveSpec {
    lambda: DiffusionLayer,
    sboxes: Vec<SBoxTable>,
    brick_tables: Vec<Vec<u64>>,
    certificate: OnceLock<Result<BijectivityCertificate>>,
}

impl WaveSpec {
    pub fn new(lambda: DiffusionLayer, sboxes: Vec<SBoxTable>) -> Result<Self> {
        let l = lambda.layout();
        if sboxes.len() != l.bricks {
            return Err(Error::DimensionMismatch(format!(
                "{} S-boxes for {} bricks",
                sboxes.len(),
                l.bricks
            )));
        }
        for sb in &sboxes {
            if sb.in_bits() != l.s || sb.out_bits() != l.t {
                return Err(Error::DimensionMismatch(format!(
                    "{}x{} S-box in a layout with s={} t={}",
                    sb.in_bits(),
                    sb.out_bits(),
                    l.s,
                    l.t
                )));
            }
            if let Some((a, b)) = sb.collision() {
                return Err(Error::NotInjective(a, b));
            }
            if !sb.is_normalized() {
                return Err(Error::NotNormalized(sb.apply(0)));
            }
        }
        let brick_tables = sboxes
            .iter()
            .enumerate()
            .map(|(j, sb)| {
                sb.table()
                    .iter()
                    .map(|&y| lambda.apply(l.place_w(y, j)))
                    .collect()
            })
            .collect();
        Ok(Self {
            lambda,
            sboxes,
            brick_tables,
            certificate: OnceLock::new(),
        })
    }

    /// The same S-box in every brick.
    pub fn uniform(lambda: DiffusionLayer, sbox: SBoxTable) -> Result<Self> {
        let b = lambda.layout().bricks;
        Self::new(lambda, vec![sbox; b])
    }

    pub fn layout(&self) -> BrickLayout {
        self.lambda.layout()
    }

    pub fn lambda(&self) -> &DiffusionLayer {
        &self.lambda
    }

    pub fn sboxes(&self) -> &[SBoxTable] {
        &self.sboxes
    }

    /// `n`, the width of the wave function's input and output.
    pub fn width(&self) -> usize {
        self.layout().n()
    }

    /// The parallel S-box layer `xγ ∈ W`.
    pub fn gamma(&self, x: u64) -> u64 {
        let l = self.layout();
        (0..l.bricks).fold(0, |acc, j| {
            acc | l.place_w(self.sboxes[j].apply(l.v_brick(x, j)), j)
        })
    }

    /// The generating function `ρ = γλ`.
    #[inline]
    pub fn rho(&self, x: u64) -> u64 {
        let l = self.layout();
        self.brick_tables
            .iter()
            .enumerate()
            .fold(0, |acc, (j, t)| acc ^ t[l.v_brick(x, j) as usize])
    }

    /// `ε_k(x) = xρ ⊕ k`.
    #[inline]
    pub fn wave_apply(&self, key: u64, x: u64) -> u64 {
        self.rho(x) ^ key
    }

    pub fn wave_apply_vector(&self, key: &BitVector, x: &BitVector) -> Result<BitVector> {
        let n = self.width();
        if key.width() != n || x.width() != n {
            return Err(Error::DimensionMismatch(format!(
                "wave function takes {n}-bit inputs, got key {} and x {}",
                key.width(),
                x.width()
            )));
        }
        BitVector::new(n, self.wave_apply(key.value(), x.value()))
    }

    /// Checks `{a⊕b : a,b ∈ Im γ} ∩ Ker λ = {0}`, which holds iff every `ε_k`
    /// is a permutation. The result is computed once and cached.
    pub fn certify(&self) -> Result<BijectivityCertificate> {
        self.certificate
            .get_or_init(|| self.compute_certificate())
            .clone()
    }

    pub fn is_bijective(&self) -> Result<bool> {
        Ok(self.certify()?.bijective)
    }

    fn compute_certificate(&self) -> Result<BijectivityCertificate> {
        let l = self.layout();
        let sum_sets: Vec<Vec<bool>> = self
            .sboxes
            .iter()
            .map(|sb| {
                let mut set = vec![false; 1 << l.t];
                for v in sb.image_sum_set() {
                    set[v as usize] = true;
                }
                set
            })
            .collect();
        let kernel_bricks = self.lambda.kernel_bricks();
        if self.lambda.is_parallel_kernel() {
            let mut bricks = Vec::with_capacity(l.bricks);
            for (j, k) in kernel_bricks.iter().enumerate() {
                let kernel_hits = k
                    .elements()
                    .filter(|&v| v != 0 && sum_sets[j][v as usize])
                    .map(|v| BitVector::new(l.t, v).map(|b| b.to_hex()))
                    .collect::<Result<_>>()?;
                bricks.push(BrickCertificate {
                    brick: j + 1,
                    kernel_dim: k.dim(),
                    kernel_basis: k.basis_vectors().iter().map(BitVector::to_hex).collect(),
                    sum_set_size: sum_sets[j].iter().filter(|&&b| b).count(),
                    kernel_hits,
                });
            }
            let bad = bricks.iter().find(|b| !b.kernel_hits.is_empty()).map(|b| {
                let j = b.brick - 1;
                let k = kernel_bricks[j]
                    .elements()
                    .find(|&v| v != 0 && sum_sets[j][v as usize])
                    .expect("hit recorded");
                l.place_w(k, j)
            });
            let collision = bad.map(|k| self.collision_for_kernel_vector(k));
            Ok(BijectivityCertificate {
                bijective: collision.is_none(),
                path: CertificatePath::PerBrick,
                bricks,
                kernel_vectors_checked: None,
                collision,
            })
        } else {
            let kernel = self.lambda.kernel();
            if kernel.dim() > GENERIC_KERNEL_MAX_DIM {
                return Err(Error::DomainTooLarge(format!(
                    "generic bijectivity check enumerates 2^{} kernel vectors",
                    kernel.dim()
                )));
            }
            let in_product = |k: u64| (0..l.bricks).all(|j| sum_sets[j][l.w_brick(k, j) as usize]);
            let bad = kernel.elements().find(|&k| k != 0 && in_product(k));
            let collision = bad.map(|k| self.collision_for_kernel_vector(k));
            Ok(BijectivityCertificate {
                bijective: collision.is_none(),
                path: CertificatePath::Generic,
                bricks: Vec::new(),
                kernel_vectors_checked: Some(kernel.size() as u64),
                collision,
            })
        }
    }

    /// Given a non-zero kernel vector lying in the sum set of `Im γ`, builds
    /// two distinct inputs with the same image under `ρ`.
    fn collision_for_kernel_vector(&self, k: u64) -> Collision {
        let l = self.layout();
        let (mut x, mut y) = (0u64, 0u64);
        for (j, sb) in self.sboxes.iter().enumerate() {
            let target = l.w_brick(k, j);
            let (a, b) = (0..1u64 << l.s)
                .flat_map(|a| (0..1u64 << l.s).map(move |b| (a, b)))
                .find(|&(a, b)| sb.apply(a) ^ sb.apply(b) == target)
                .expect("kernel vector lies in the product of the sum sets");
            x |= l.place_v(a, j);
            y |= l.place_v(b, j);
        }
        debug_assert_eq!(self.rho(x), self.rho(y));
        let n = self.width();
        Collision {
            x: BitVector::new(n, x).expect("n-bit").to_hex(),
            y: BitVector::new(n, y).expect("n-bit").to_hex(),
            image: BitVector::new(n, self.rho(x)).expect("n-bit").to_hex(),
        }
    }

    /// Some `(x, y)` with `g(x⊕y) ≠ g(x) ⊕ g(y)` for `g = ρ ⊕ ρ(0)`, or `None` if `ρ` is affine.
    pub fn affine_violation(&self) -> Option<(u64, u64)> {
        affine_violation(self.width(), |x| self.rho(x), 0)
    }
}

impl fmt::Debug for WaveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveSpec")
            .field("layout", &self.layout())
            .field("sboxes", &self.sboxes)
            .field("lambda", &self.lambda)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificatePath {
    /// Parallel kernel: each brick's sum set is intersected with its kernel brick.
    PerBrick,
    /// Every kernel vector is tested against the product of the per-brick sum sets.
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrickCertificate {
    pub brick: usize,
    pub kernel_dim: usize,
    pub kernel_basis: Vec<String>,
    pub sum_set_size: usize,
    /// Non-zero kernel-brick vectors that are sums of two S-box outputs.
    pub kernel_hits: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub x: String,
    pub y: String,
    pub image: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectivityCertificate {
    pub bijective: bool,
    pub path: CertificatePath,
    pub bricks: Vec<BrickCertificate>,
    pub kernel_vectors_checked: Option<u64>,
    /// Two inputs with the same image, present exactly when `bijective` is false.
    pub collision: Option<Collision>,
}

impl fmt::Display for BijectivityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bijective: {}", crate::diffusion::yes_no(self.bijective))?;
        match self.path {
            CertificatePath::PerBrick => {
                writeln!(f, "path: per-brick (parallel kernel)")?;
                for b in &self.bricks {
                    writeln!(
                        f,
                        "  brick {}: kernel dim {} [{}], sum set {}, hits [{}]",
                        b.brick,
                        b.kernel_dim,
                        b.kernel_basis.join(" "),
                        b.sum_set_size,
                        b.kernel_hits.join(" ")
                    )?;
                }
            }
            CertificatePath::Generic => writeln!(
                f,
                "path: generic ({} kernel vectors checked)",
                self.kernel_vectors_checked.unwrap_or(0)
            )?,
        }
        if let Some(c) = &self.collision {
            writeln!(f, "collision: {} and {} both map to {}", c.x, c.y, c.image)?;
        }
        Ok(())
    }
}

/// Some `(x, y)` with `g(x⊕y) ≠ g(x) ⊕ g(y)` where `g = f ⊕ f(0)`, or `None`
/// if `f` is affine on `(F₂)^bits`.
///
/// Up to [`AFFINE_EXHAUSTIVE_BITS`] every input is checked: each `x` is split
/// as its lowest set bit plus the rest, so additivity over all pairs follows
/// by induction. Wider maps get [`AFFINE_RANDOM_TRIALS`] seeded random pairs,
/// which can only prove non-affinity.
pub fn affine_violation(bits: usize, f: impl Fn(u64) -> u64, seed: u64) -> Option<(u64, u64)> {
    let f0 = f(0);
    let g = |x: u64| f(x) ^ f0;
    if bits <= AFFINE_EXHAUSTIVE_BITS {
        let mut values = vec![0u64; 1 << bits];
        for x in 1..1u64 << bits {
            let low = x & x.wrapping_neg();
            let rest = x ^ low;
            let gx = g(x);
            values[x as usize] = gx;
            if rest != 0 && gx != values[rest as usize] ^ values[low as usize] {
                return Some((rest, low));
            }
        }
        None
    } else {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let m = mask(bits);
        (0..AFFINE_RANDOM_TRIALS)
            .map(|_| (rng.gen::<u64>() & m, rng.gen::<u64>() & m))
            .find(|&(x, y)| g(x ^ y) != g(x) ^ g(y))
    }
}

pub fn is_affine(bits: usize, f: impl Fn(u64) -> u64) -> bool {
    affine_violation(bits, f, 0).is_none()
}

/// TEST-ONLY round keys: `k_i` is the low `n` bits of `master` rotated left by
/// `7·i mod 64`, for `i = 1..=rounds`. Not a key schedule anyone should use.
pub fn test_only_round_keys(master: u64, rounds: usize, n: usize) -> Vec<u64> {
    (1..=rounds)
        .map(|i| master.rotate_left((7 * i % 64) as u32) & mask(n))
        .collect()
}

/// An `r`-round Feistel network whose F-function in round `i` is `ε_{k_i}`.
#[derive(Clone, Debug)]
pub struct FeistelCipher {
    spec: Arc<WaveSpec>,
    round_keys: Vec<u64>,
}

impl FeistelCipher {
    /// Fails unless the spec's bijectivity certificate passes.
    pub fn new(spec: Arc<WaveSpec>, round_keys: Vec<u64>) -> Result<Self> {
        if round_keys.is_empty() {
            return Err(Error::InvalidArgument("at least one round is required".into()));
        }
        let n = spec.width();
        if let Some(&k) = round_keys.iter().find(|&&k| k & !mask(n) != 0) {
            return Err(Error::ValueTooWide { value: k, width: n });
        }
        let cert = spec.certify()?;
        if !cert.bijective {
            return Err(Error::NotBijective);
        }
        Ok(Self { spec, round_keys })
    }

    /// Round keys from [`test_only_round_keys`].
    pub fn with_test_only_keys(spec: Arc<WaveSpec>, master: u64, rounds: usize) -> Result<Self> {
        let n = spec.width();
        Self::new(spec, test_only_round_keys(master, rounds, n))
    }

    pub fn spec(&self) -> &WaveSpec {
        &self.spec
    }

    pub fn rounds(&self) -> usize {
        self.round_keys.len()
    }

    pub fn round_keys(&self) -> &[u64] {
        &self.round_keys
    }

    /// `(x₁, x₂) ↦ (x₂, x₁ ⊕ ε_{k_i}(x₂))` for each round in order.
    pub fn encrypt(&self, (mut x1, mut x2): (u64, u64)) -> (u64, u64) {
        for &k in &self.round_keys {
            (x1, x2) = (x2, x1 ^ self.spec.wave_apply(k, x2));
        }
        (x1, x2)
    }

    /// `(y₁, y₂) ↦ (y₂ ⊕ ε_{k_i}(y₁), y₁)` for each round in reverse.
    /// Only the forward wave function is evaluated.
    pub fn decrypt(&self, (mut y1, mut y2): (u64, u64)) -> (u64, u64) {
        for &k in self.round_keys.iter().rev() {
            (y1, y2) = (y2 ^ self.spec.wave_apply(k, y1), y1);
        }
        (y1, y2)
    }

    /// Encrypts a `2n`-bit block whose left half is the most significant.
    pub fn encrypt_block(&self, block: u64) -> Result<u64> {
        let n = self.block_half()?;
        Ok(join(self.encrypt(split(block, n)), n))
    }

    pub fn decrypt_block(&self, block: u64) -> Result<u64> {
        let n = self.block_half()?;
        Ok(join(self.decrypt(split(block, n)), n))
    }

    /// Traces every intermediate state, starting with the plaintext.
    pub fn encrypt_trace(&self, (mut x1, mut x2): (u64, u64)) -> Vec<(u64, u64)> {
        let mut out = vec![(x1, x2)];
        for &k in &self.round_keys {
            (x1, x2) = (x2, x1 ^ self.spec.wave_apply(k, x2));
            out.push((x1, x2));
        }
        out
    }

    fn block_half(&self) -> Result<usize> {
        let n = self.spec.width();
        if 2 * n > 64 {
            return Err(Error::DomainTooLarge(format!("{}-bit blocks do not fit in 64 bits", 2 * n)));
        }
        Ok(n)
    }
}

fn split(block: u64, n: usize) -> (u64, u64) {
    ((block >> n) & mask(n), block & mask(n))
}

fn join((l, r): (u64, u64), n: usize) -> u64 {
    (l << n) | r
}

/// One known-answer line: `master=<hex64> rounds=<r> pt=<hex64> ct=<hex64>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kat {
    pub master: u64,
    pub rounds: usize,
    pub pt: u64,
    pub ct: u64,
}

impl fmt::Display for Kat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "master=0x{:016X} rounds={} pt=0x{:016X} ct=0x{:016X}",
            self.master, self.rounds, self.pt, self.ct
        )
    }
}

fn parse_hex64(text: &str, line: usize) -> Result<u64> {
    let digits = text
        .strip_prefix("0x")
        .or_else(|| text.strip_prefix("0X"))
        .ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected 0x-prefixed hex, got {text:?}"),
        })?;
    u64::from_str_radix(digits, 16).map_err(|e| Error::Parse {
        line,
        msg: format!("{text:?}: {e}"),
    })
}

impl Kat {
    /// Parses a KAT file; blank lines and `#` comments are skipped.
    pub fn parse_file(text: &str) -> Result<Vec<Kat>> {
        let mut out = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            out.push(Self::parse_line(line, i + 1)?);
        }
        Ok(out)
    }

    pub fn parse_line(line: &str, line_no: usize) -> Result<Kat> {
        let (mut master, mut rounds, mut pt, mut ct) = (None, None, None, None);
        for field in line.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected key=value, got {field:?}"),
            })?;
            match key {
                "master" => master = Some(parse_hex64(value, line_no)?),
                "pt" => pt = Some(parse_hex64(value, line_no)?),
                "ct" => ct = Some(parse_hex64(value, line_no)?),
                "rounds" => {
                    rounds = Some(value.parse().map_err(|e| Error::Parse {
                        line: line_no,
                        msg: format!("rounds: {e}"),
                    })?)
                }
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("unknown field {other:?}"),
                    })
                }
            }
        }
        let missing = |name: &str| Error::Parse {
            line: line_no,
            msg: format!("missing {name}"),
        };
        Ok(Kat {
            master: master.ok_or_else(|| missing("master"))?,
            rounds: rounds.ok_or_else(|| missing("rounds"))?,
            pt: pt.ok_or_else(|| missing("pt"))?,
            ct: ct.ok_or_else(|| missing("ct"))?,
        })
    }
}

/// `count` vectors with ChaCha20-drawn master keys and plaintexts.
pub fn generate_kats(spec: &Arc<WaveSpec>, rounds: usize, count: usize, seed: u64) -> Result<Vec<Kat>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = spec.width();
    (0..count)
        .map(|_| {
            let master = rng.gen::<u64>();
            let pt = rng.gen::<u64>() & mask(2 * n);
            let cipher = FeistelCipher::with_test_only_keys(spec.clone(), master, rounds)?;
            Ok(Kat {
                master,
                rounds,
                pt,
                ct: cipher.encrypt_block(pt)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KatMismatch {
    pub index: usize,
    pub expected: Kat,
    pub got_ct: u64,
    pub got_pt: u64,
}

/// Re-encrypts and re-decrypts every vector, returning the ones that disagree.
pub fn verify_kats(spec: &Arc<WaveSpec>, kats: &[Kat]) -> Result<Vec<KatMismatch>> {
    let mut bad = Vec::new();
    for (index, kat) in kats.iter().enumerate() {
        let cipher = FeistelCipher::with_test_only_keys(spec.clone(), kat.master, kat.rounds)?;
        let got_ct = cipher.encrypt_block(kat.pt)?;
        let got_pt = cipher.decrypt_block(kat.ct)?;
        if got_ct != kat.ct || got_pt != kat.pt {
            bad.push(KatMismatch {
                index,
                expected: *kat,
                got_ct,
                got_pt,
            });
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitMatrix;

    fn tiny_spec() -> WaveSpec {
        // b=1, s=2, t=3; λ keeps the first two columns, kernel span{001}
        let sb = SBoxTable::new(2, 3, vec![0, 0b011, 0b101, 0b110]).unwrap();
        let m = BitMatrix::from_rows(2, vec![0b10, 0b01, 0b00]).unwrap();
        let d = DiffusionLayer::new(BrickLayout::new(1, 2, 3).unwrap(), m).unwrap();
        WaveSpec::uniform(d, sb).unwrap()
    }

    #[test]
    fn rho_matches_definition() {
        let spec = tiny_spec();
        for x in 0..4 {
            assert_eq!(spec.rho(x), spec.lambda().apply(spec.gamma(x)));
        }
        assert_eq!(spec.rho(1), 0b01);
        assert_eq!(spec.rho(2), 0b10);
    }

    #[test]
    fn tiny_spec_certificate() {
        let spec = tiny_spec();
        let c = spec.certify().unwrap();
        assert!(c.bijective, "{c}");
        assert_eq!(c.path, CertificatePath::PerBrick);
    }

    #[test]
    fn feistel_round_by_hand() {
        let spec = Arc::new(tiny_spec());
        let c = FeistelCipher::new(spec.clone(), vec![0b01, 0b10]).unwrap();
        // round 1: (1,2) -> (2, 1 ^ (ρ(2) ^ 1)) = (2, 1 ^ 3) = (2, 2)
        // round 2: (2,2) -> (2, 2 ^ (ρ(2) ^ 2)) = (2, 2)
        assert_eq!(c.encrypt((1, 2)), (2, 2));
        assert_eq!(c.decrypt((2, 2)), (1, 2));
    }

    #[test]
    fn key_schedule_rotation() {
        let keys = test_only_round_keys(0x0123_4567_89AB_CDEF, 10, 32);
        assert_eq!(keys[0], 0x0123_4567_89AB_CDEFu64.rotate_left(7) & 0xFFFF_FFFF);
        assert_eq!(keys.len(), 10);
        assert_eq!(test_only_round_keys(1, 10, 32)[8], 1u64.rotate_left(63) & 0xFFFF_FFFF);
    }

    #[test]
    fn affinity() {
        assert!(is_affine(8, |x| x ^ 0x5A));
        assert!(is_affine(24, |x| (x << 1 | x >> 23) & 0xFF_FFFF));
        let v = affine_violation(3, |x| (x * x) & 7, 0).unwrap();
        let f = |x: u64| (x * x) & 7;
        assert_ne!(f(v.0 ^ v.1), f(v.0) ^ f(v.1));
    }

    #[test]
    fn kat_line_round_trip() {
        let k = Kat {
            master: 0x0123_4567_89AB_CDEF,
            rounds: 48,
            pt: 0,
            ct: 0xDEAD_BEEF,
        };
        let line = k.to_string();
        assert_eq!(line, "master=0x0123456789ABCDEF rounds=48 pt=0x0000000000000000 ct=0x00000000DEADBEEF");
        assert_eq!(Kat::parse_line(&line, 1).unwrap(), k);
        assert!(Kat::parse_line("master=1 rounds=2 pt=0x0 ct=0x0", 3).is_err());
        assert!(Kat::parse_line("master=0x1 pt=0x0 ct=0x0", 3).is_err());
    }

    #[test]
    fn rejects_non_normalized_sbox() {
        let sb = SBoxTable::new(2, 3, vec![1, 0b011, 0b101, 0b110]).unwrap();
        let m = BitMatrix::from_rows(2, vec![0b10, 0b01, 0b00]).unwrap();
        let d = DiffusionLayer::new(BrickLayout::new(1, 2, 3).unwrap(), m).unwrap();
        assert!(matches!(WaveSpec::uniform(d, sb), Err(Error::NotNormalized(1))));
    }
}
