//! Permutation groups on `(F₂)^N` given by generators: orbits, minimal block
//! systems and primitivity, plus harnesses that test the primitivity results
//! for wave ciphers on small instances.
//!
//! Points are `u64` values below `2^N`. Every algorithm is exhaustive over the
//! domain, so `N` is capped by [`max_domain_bits`].

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::yes_no;
use crate::error::{Error, Result};
use crate::gf2::{mask, proper_nontrivial_subspaces, BitVector, Subspace};
use crate::wave::{affine_violation, WaveSpec};

/// Default cap on `N` for group computations on `2^N` points.
pub const DEFAULT_MAX_DOMAIN_BITS: usize = 24;

/// Environment variable overriding [`DEFAULT_MAX_DOMAIN_BITS`].
pub const DOMAIN_BITS_ENV: &str = "WAVEKIT_MAX_DOMAIN_BITS";

/// Largest `n` for [`subspace_block_oracle`].
pub const SUBSPACE_ORACLE_MAX_BITS: usize = 8;

/// Largest `n` for [`verify_reduction`]; the Feistel action lives on `2^(2n)` points.
pub const REDUCTION_MAX_BITS: usize = 10;

/// Number of stabilizer generators tried before settling for a finer suborbit partition.
const SCHREIER_BUDGET: usize = 24;

pub fn max_domain_bits() -> usize {
    std::env::var(DOMAIN_BITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DOMAIN_BITS)
        .min(40)
}

fn check_domain(bits: usize) -> Result<()> {
    let cap = max_domain_bits();
    if bits > cap {
        return Err(Error::DomainTooLarge(format!(
            "group computations on 2^{bits} points exceed the 2^{cap} cap (set {DOMAIN_BITS_ENV} to raise it)"
        )));
    }
    Ok(())
}

pub type PointMap = Arc<dyn Fn(u64) -> u64 + Send + Sync>;

#[derive(Clone)]
pub struct Generator {
    pub name: String,
    map: PointMap,
    /// `Some(k)` when the generator is the translation `x ↦ x ⊕ k`.
    translation: Option<u64>,
}

impl Generator {
    pub fn new(name: impl Into<String>, map: PointMap) -> Self {
        Self {
            name: name.into(),
            map,
            translation: None,
        }
    }

    pub fn translation(bits: usize, k: u64) -> Self {
        let width = bits.div_ceil(4).max(1);
        Self {
            name: format!("σ_{k:0width$X}"),
            map: Arc::new(move |x| x ^ k),
            translation: Some(k),
        }
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        (self.map)(x)
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Generator({})", self.name)
    }
}

/// A group given by generators acting on all `2^bits` bit strings.
#[derive(Clone, Debug)]
pub struct GeneratorAction {
    bits: usize,
    generators: Vec<Generator>,
    /// The generated group is known to contain every translation of the domain.
    contains_translations: bool,
}

impl GeneratorAction {
    pub fn new(bits: usize, generators: Vec<Generator>) -> Result<Self> {
        if bits == 0 || bits > 63 {
            return Err(Error::WidthOutOfRange(bits));
        }
        let contains_translations = spans_domain(bits, &generators);
        Ok(Self {
            bits,
            generators,
            contains_translations,
        })
    }

    /// `T_N`, generated by the unit translations.
    pub fn translation_group(bits: usize) -> Result<Self> {
        let gens = (0..bits).map(|i| Generator::translation(bits, 1 << i)).collect();
        Self::new(bits, gens)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn domain_size(&self) -> u64 {
        1 << self.bits
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn contains_translations(&self) -> bool {
        self.contains_translations
    }

    /// Confirms every generator is a permutation of the domain.
    pub fn check_bijective(&self) -> Result<()> {
        check_domain(self.bits)?;
        let size = self.domain_size();
        for g in &self.generators {
            let mut seen = vec![false; size as usize];
            for x in 0..size {
                let y = g.apply(x);
                if y >= size {
                    return Err(Error::ValueTooWide {
                        value: y,
                        width: self.bits,
                    });
                }
                if std::mem::replace(&mut seen[y as usize], true) {
                    let first = (0..x).find(|&z| g.apply(z) == y).expect("earlier preimage");
                    return Err(Error::NotInjective(first, x));
                }
            }
        }
        Ok(())
    }
}

/// Whether the translation generators alone span `(F₂)^bits`.
fn spans_domain(bits: usize, generators: &[Generator]) -> bool {
    let ks = generators.iter().filter_map(|g| g.translation);
    Subspace::span(bits, ks).map(|s| s.is_full()).unwrap_or(false)
}

/// `⟨T_n, ρ⟩` acting on `(F₂)^n`.
pub fn spn_generators_for(bits: usize, rho: PointMap) -> Result<GeneratorAction> {
    let mut gens: Vec<Generator> = (0..bits)
        .map(|i| Generator::translation(bits, 1 << (bits - 1 - i)))
        .collect();
    gens.push(Generator::new("ρ", rho));
    GeneratorAction::new(bits, gens)
}

/// `⟨T_(0,n), ρ̄⟩` acting on `(F₂)^n × (F₂)^n`, encoded as `x₁ ‖ x₂`.
///
/// The group contains every translation of the product space because
/// `σ_(k,0) = ρ̄ σ_(0,k) ρ̄⁻¹` (apply left to right), so it is flagged as such.
pub fn fn_generators_for(bits: usize, rho: PointMap) -> Result<GeneratorAction> {
    let n = bits;
    let mut gens: Vec<Generator> = (0..n)
        .map(|i| {
            let k = 1u64 << (n - 1 - i);
            let mut g = Generator::translation(2 * n, k);
            g.name = format!("σ_(0,{k:X})");
            g
        })
        .collect();
    let low = mask(n);
    gens.push(Generator::new(
        "ρ̄",
        Arc::new(move |x| {
            let (x1, x2) = (x >> n, x & low);
            (x2 << n) | (x1 ^ rho(x2))
        }),
    ));
    let mut action = GeneratorAction::new(2 * n, gens)?;
    action.contains_translations = true;
    Ok(action)
}

fn certified_rho(spec: &Arc<WaveSpec>) -> Result<PointMap> {
    if !spec.certify()?.bijective {
        return Err(Error::NotBijective);
    }
    let s = spec.clone();
    Ok(Arc::new(move |x| s.rho(x)))
}

pub fn spn_generators(spec: &Arc<WaveSpec>) -> Result<GeneratorAction> {
    spn_generators_for(spec.width(), certified_rho(spec)?)
}

pub fn fn_generators(spec: &Arc<WaveSpec>) -> Result<GeneratorAction> {
    fn_generators_for(spec.width(), certified_rho(spec)?)
}

/// The inverse of `ρ̄`: `(y₁, y₂) ↦ (y₂ ⊕ ρ(y₁), y₁)`.
pub fn feistel_inverse(bits: usize, rho: impl Fn(u64) -> u64) -> impl Fn(u64) -> u64 {
    let low = mask(bits);
    move |y| {
        let (y1, y2) = (y >> bits, y & low);
        ((y2 ^ rho(y1)) << bits) | y1
    }
}

/// Breadth-first orbit of `start`, in discovery order.
pub fn orbit(action: &GeneratorAction, start: u64) -> Result<Vec<u64>> {
    check_domain(action.bits)?;
    let size = action.domain_size();
    if start >= size {
        return Err(Error::ValueTooWide {
            value: start,
            width: action.bits,
        });
    }
    let mut seen = vec![false; size as usize];
    seen[start as usize] = true;
    let mut out = vec![start];
    let mut head = 0;
    while head < out.len() {
        let x = out[head];
        head += 1;
        for g in &action.generators {
            let y = g.apply(x);
            if !std::mem::replace(&mut seen[y as usize], true) {
                out.push(y);
            }
        }
    }
    Ok(out)
}

pub fn is_transitive(action: &GeneratorAction) -> Result<bool> {
    Ok(orbit(action, 0)?.len() as u64 == action.domain_size())
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    #[inline]
    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    #[inline]
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        self.components -= 1;
        true
    }
}

/// A partition of the domain into equally sized cells.
#[derive(Clone, PartialEq, Eq)]
pub struct BlockSystem {
    bits: usize,
    /// Cell index of every point; cells are numbered by their smallest point.
    labels: Vec<u32>,
    cell_size: u64,
    cell_count: u64,
}

impl BlockSystem {
    fn from_union_find(bits: usize, uf: &mut UnionFind) -> Self {
        let size = 1usize << bits;
        let mut label_of_root = vec![u32::MAX; size];
        let mut labels = vec![0u32; size];
        let mut next = 0u32;
        for x in 0..size as u32 {
            let r = uf.find(x) as usize;
            if label_of_root[r] == u32::MAX {
                label_of_root[r] = next;
                next += 1;
            }
            labels[x as usize] = label_of_root[r];
        }
        let cell_count = next as u64;
        Self {
            bits,
            labels,
            cell_size: size as u64 / cell_count,
            cell_count,
        }
    }

    /// The cosets `U + v` of a subspace.
    pub fn cosets(u: &Subspace) -> Self {
        let bits = u.width();
        let mut uf = UnionFind::new(1 << bits);
        for x in 0..1u64 << bits {
            for &b in u.basis() {
                uf.union(x as u32, (x ^ b) as u32);
            }
        }
        Self::from_union_find(bits, &mut uf)
    }

    pub fn cell_size(&self) -> u64 {
        self.cell_size
    }

    pub fn cell_count(&self) -> u64 {
        self.cell_count
    }

    /// Cells of unequal size would make this partition no block system at all.
    pub fn is_uniform(&self) -> bool {
        let mut counts = vec![0u64; self.cell_count as usize];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts.iter().all(|&c| c == self.cell_size)
    }

    pub fn is_trivial(&self) -> bool {
        self.cell_count == 1 || self.cell_size == 1
    }

    pub fn same_cell(&self, a: u64, b: u64) -> bool {
        self.labels[a as usize] == self.labels[b as usize]
    }

    /// Points of the cell containing `x`, ascending.
    pub fn cell_of(&self, x: u64) -> Vec<u64> {
        let l = self.labels[x as usize];
        (0..self.labels.len() as u64)
            .filter(|&y| self.labels[y as usize] == l)
            .collect()
    }

    pub fn cells(&self) -> Vec<Vec<u64>> {
        let mut cells = vec![Vec::new(); self.cell_count as usize];
        for (x, &l) in self.labels.iter().enumerate() {
            cells[l as usize].push(x as u64);
        }
        cells
    }

    /// Every generator maps every cell onto a cell.
    pub fn is_invariant_under(&self, action: &GeneratorAction) -> bool {
        action.generators.iter().all(|g| {
            let mut image_label = vec![u32::MAX; self.cell_count as usize];
            self.labels.iter().enumerate().all(|(x, &l)| {
                let target = self.labels[g.apply(x as u64) as usize];
                let slot = &mut image_label[l as usize];
                if *slot == u32::MAX {
                    *slot = target;
                }
                *slot == target
            })
        })
    }

    /// The cell of 0 as a subspace, when it is one.
    pub fn zero_cell_subspace(&self) -> Option<Subspace> {
        let cell = self.cell_of(0);
        let span = Subspace::span(self.bits, cell.iter().copied()).ok()?;
        (span.size() == cell.len() as u128).then_some(span)
    }

    pub fn summary(&self) -> BlockSummary {
        let width = self.bits;
        let cell = self.cell_of(0);
        BlockSummary {
            cell_size: self.cell_size,
            cell_count: self.cell_count,
            zero_cell_basis: self.zero_cell_subspace().map(|s| {
                s.basis_vectors().iter().map(BitVector::to_hex).collect()
            }),
            zero_cell_sample: cell
                .iter()
                .take(16)
                .map(|&v| BitVector::new(width, v).expect("in domain").to_hex())
                .collect(),
        }
    }
}

impl fmt::Debug for BlockSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BlockSystem({} cells of {} on 2^{} points)",
            self.cell_count, self.cell_size, self.bits
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub cell_size: u64,
    pub cell_count: u64,
    /// Basis of the cell through 0 when that cell is a subspace.
    pub zero_cell_basis: Option<Vec<String>>,
    /// Up to 16 points of the cell through 0.
    pub zero_cell_sample: Vec<String>,
}

/// Union-find closure: the finest invariant partition with `a` and `b` together.
fn block_closure(action: &GeneratorAction, a: u64, b: u64) -> UnionFind {
    let mut uf = UnionFind::new(action.domain_size() as usize);
    let mut pending = vec![(a, b)];
    while let Some((x, y)) = pending.pop() {
        if !uf.union(x as u32, y as u32) {
            continue;
        }
        if uf.components == 1 {
            break;
        }
        for g in &action.generators {
            pending.push((g.apply(x), g.apply(y)));
        }
    }
    uf
}

/// The finest block system in which `a` and `b` share a cell.
pub fn minimal_block(action: &GeneratorAction, a: u64, b: u64) -> Result<BlockSystem> {
    check_domain(action.bits)?;
    let size = action.domain_size();
    for p in [a, b] {
        if p >= size {
            return Err(Error::ValueTooWide {
                value: p,
                width: action.bits,
            });
        }
    }
    let mut uf = block_closure(action, a, b);
    Ok(BlockSystem::from_union_find(action.bits, &mut uf))
}

#[derive(Clone, Debug)]
pub struct Primitivity {
    pub primitive: bool,
    /// Smallest `b` whose minimal block with 0 is non-trivial.
    pub witness_point: Option<u64>,
    pub blocks: Option<BlockSystem>,
    /// Number of points `b` whose minimal block with 0 was computed.
    pub candidates_tested: usize,
}

/// Suborbit representatives of the stabilizer of 0, or of a subgroup of it.
///
/// When the group contains all translations, `y ↦ (y ⊕ x)g ⊕ xg` fixes 0 and
/// lies in the group for every point `x` and generator `g`. Points in the same
/// orbit of such maps have the same minimal block with 0, so only the
/// smallest point of each orbit needs testing. A partial generating set only
/// makes the orbits finer, which costs time but never correctness.
fn stabilizer_orbit_representatives(action: &GeneratorAction) -> Vec<u64> {
    let size = action.domain_size();
    let others: Vec<&Generator> = action
        .generators
        .iter()
        .filter(|g| g.translation.is_none())
        .collect();
    let mut uf = UnionFind::new(size as usize);
    let mut rng = ChaCha20Rng::seed_from_u64(0x5EED);
    let mut shifts = vec![0u64];
    shifts.extend((1..SCHREIER_BUDGET).map(|_| rng.gen::<u64>() & (size - 1)));
    'outer: for x in shifts {
        for g in &others {
            let gx = g.apply(x);
            for y in 1..size {
                uf.union(y as u32, (g.apply(y ^ x) ^ gx) as u32);
            }
            // the point 0 is its own class
            if uf.components == 2 {
                break 'outer;
            }
        }
    }
    let mut seen_root = vec![false; size as usize];
    let mut reps = Vec::new();
    for y in 1..size {
        let r = uf.find(y as u32) as usize;
        if !std::mem::replace(&mut seen_root[r], true) {
            reps.push(y);
        }
    }
    reps
}

fn primitivity_over(action: &GeneratorAction, candidates: &[u64]) -> Result<Primitivity> {
    if !is_transitive(action)? {
        return Err(Error::NotTransitive {
            orbit: orbit(action, 0)?.len() as u64,
            domain: action.domain_size(),
        });
    }
    let found = candidates
        .par_iter()
        .position_first(|&b| block_closure(action, 0, b).components > 1);
    Ok(match found {
        None => Primitivity {
            primitive: true,
            witness_point: None,
            blocks: None,
            candidates_tested: candidates.len(),
        },
        Some(i) => {
            let b = candidates[i];
            Primitivity {
                primitive: false,
                witness_point: Some(b),
                blocks: Some(minimal_block(action, 0, b)?),
                candidates_tested: i + 1,
            }
        }
    })
}

/// Primitive iff every minimal block of `{0, b}` is the whole domain.
///
/// Only base point 0 is needed because the group is transitive. The witness
/// is the block system for the smallest failing `b`.
pub fn is_primitive(action: &GeneratorAction) -> Result<Primitivity> {
    check_domain(action.bits)?;
    if action.domain_size() <= 2 {
        return Ok(Primitivity {
            primitive: is_transitive(action)?,
            witness_point: None,
            blocks: None,
            candidates_tested: 0,
        });
    }
    let candidates = if action.contains_translations {
        stabilizer_orbit_representatives(action)
    } else {
        (1..action.domain_size()).collect()
    };
    primitivity_over(action, &candidates)
}

/// [`is_primitive`] without the stabilizer shortcut: every `b ≠ 0` is tried.
pub fn is_primitive_exhaustive(action: &GeneratorAction) -> Result<Primitivity> {
    check_domain(action.bits)?;
    let candidates: Vec<u64> = (1..action.domain_size()).collect();
    primitivity_over(action, &candidates)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceOracle {
    pub primitive: bool,
    /// First subspace `U` in canonical order whose cosets are preserved.
    pub witness: Option<Vec<String>>,
    pub subspaces_checked: usize,
}

/// Searches for a proper non-trivial `U` with `(u⊕v)γ ⊕ vγ ∈ Uλ⁻¹` for all
/// `u ∈ U, v ∈ V`; such a `U` exists iff `⟨T_n, ρ⟩` is imprimitive.
///
/// Testing `u` on a basis of `U` suffices: the condition for `u₁` and `u₂`
/// gives it for `u₁ ⊕ u₂` by telescoping through `v ⊕ u₂`.
pub fn subspace_block_oracle(spec: &WaveSpec) -> Result<SubspaceOracle> {
    let n = spec.width();
    if n > SUBSPACE_ORACLE_MAX_BITS {
        return Err(Error::DomainTooLarge(format!(
            "subspace oracle limited to n <= {SUBSPACE_ORACLE_MAX_BITS}, got {n}"
        )));
    }
    if !spec.certify()?.bijective {
        return Err(Error::NotBijective);
    }
    let gamma: Vec<u64> = (0..1u64 << n).map(|x| spec.gamma(x)).collect();
    let matrix = spec.lambda().matrix();
    let subspaces: Vec<Subspace> = proper_nontrivial_subspaces(n)?.collect();
    let found = subspaces.par_iter().position_first(|u| {
        let pre = matrix.preimage(u).expect("widths agree");
        u.basis().iter().all(|&b| {
            (0..1u64 << n).all(|v| pre.contains(gamma[(b ^ v) as usize] ^ gamma[v as usize]))
        })
    });
    Ok(match found {
        None => SubspaceOracle {
            primitive: true,
            witness: None,
            subspaces_checked: subspaces.len(),
        },
        Some(i) => SubspaceOracle {
            primitive: false,
            witness: Some(
                subspaces[i]
                    .basis_vectors()
                    .iter()
                    .map(BitVector::to_hex)
                    .collect(),
            ),
            subspaces_checked: i + 1,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitivitySummary {
    pub primitive: bool,
    pub domain_bits: usize,
    pub witness_point: Option<String>,
    pub blocks: Option<BlockSummary>,
    pub candidates_tested: usize,
    pub millis: u128,
}

fn summarize(action: &GeneratorAction) -> Result<PrimitivitySummary> {
    let start = Instant::now();
    let p = is_primitive(action)?;
    let bits = action.bits;
    Ok(PrimitivitySummary {
        primitive: p.primitive,
        domain_bits: bits,
        witness_point: p
            .witness_point
            .map(|b| BitVector::new(bits, b).expect("in domain").to_hex()),
        blocks: p.blocks.as_ref().map(BlockSystem::summary),
        candidates_tested: p.candidates_tested,
        millis: start.elapsed().as_millis(),
    })
}

/// Primitivity of the SPN-like group and of the Feistel group built on one `ρ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub n: usize,
    pub spn: PrimitivitySummary,
    pub feistel: PrimitivitySummary,
    /// SPN primitive implies Feistel primitive.
    pub implication_holds: bool,
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n: {}", self.n)?;
        for (name, s) in [("<T_n, rho>", &self.spn), ("<T_(0,n), rho-bar>", &self.feistel)] {
            write!(
                f,
                "{name} on 2^{} points: {} ({} candidates, {} ms)",
                s.domain_bits,
                if s.primitive { "primitive" } else { "imprimitive" },
                s.candidates_tested,
                s.millis
            )?;
            if let (Some(b), Some(bl)) = (&s.witness_point, &s.blocks) {
                write!(f, "; blocks of size {} through 0 and {b}", bl.cell_size)?;
            }
            writeln!(f)?;
        }
        writeln!(f, "implication holds: {}", yes_no(self.implication_holds))
    }
}

/// Checks "SPN group primitive ⟹ Feistel group primitive" for one bijective,
/// non-affine `ρ` on `(F₂)^n`. Affine `ρ` is refused with [`Error::AffineRho`].
pub fn verify_reduction_for(n: usize, rho: PointMap) -> Result<ReductionReport> {
    if n == 0 || n > REDUCTION_MAX_BITS {
        return Err(Error::DomainTooLarge(format!(
            "reduction check needs 1 <= n <= {REDUCTION_MAX_BITS}, got {n}"
        )));
    }
    if affine_violation(n, |x| rho(x), 0).is_none() {
        return Err(Error::AffineRho);
    }
    let spn_action = spn_generators_for(n, rho.clone())?;
    spn_action.check_bijective()?;
    let spn = summarize(&spn_action)?;
    let feistel = summarize(&fn_generators_for(n, rho)?)?;
    Ok(ReductionReport {
        n,
        implication_holds: !spn.primitive || feistel.primitive,
        spn,
        feistel,
    })
}

pub fn verify_reduction(spec: &Arc<WaveSpec>) -> Result<ReductionReport> {
    let rho = certified_rho(spec)?;
    verify_reduction_for(spec.width(), rho)
}

/// Outcome of [`random_reduction_experiment`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionExperiment {
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub affine_skipped: usize,
    pub spn_primitive: usize,
    pub feistel_primitive: usize,
    /// Tables of `ρ` for which the SPN group is primitive but the Feistel group is not.
    pub counterexamples: Vec<Vec<u64>>,
    pub millis: u128,
}

impl fmt::Display for ReductionExperiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "random permutations of (F2)^{} (seed {})", self.n, self.seed)?;
        writeln!(f, "trials: {} ({} affine skipped)", self.trials, self.affine_skipped)?;
        writeln!(f, "SPN group primitive: {}", self.spn_primitive)?;
        writeln!(f, "Feistel group primitive: {}", self.feistel_primitive)?;
        writeln!(f, "counterexamples: {}", self.counterexamples.len())?;
        writeln!(f, "time: {} ms", self.millis)
    }
}

/// Runs [`verify_reduction_for`] on `trials` seeded random non-affine
/// permutations. Affine draws are skipped and redrawn.
pub fn random_reduction_experiment(n: usize, trials: usize, seed: u64) -> Result<ReductionExperiment> {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut tables = Vec::with_capacity(trials);
    let mut affine_skipped = 0;
    while tables.len() < trials {
        let mut table: Vec<u64> = (0..1u64 << n).collect();
        table.shuffle(&mut rng);
        if affine_violation(n, |x| table[x as usize], 0).is_none() {
            affine_skipped += 1;
            continue;
        }
        tables.push(table);
    }
    let reports: Vec<(Vec<u64>, ReductionReport)> = tables
        .into_par_iter()
        .map(|t| {
            let shared = Arc::new(t.clone());
            let r = verify_reduction_for(n, Arc::new(move |x| shared[x as usize]))?;
            Ok((t, r))
        })
        .collect::<Result<_>>()?;
    Ok(ReductionExperiment {
        n,
        seed,
        trials,
        affine_skipped,
        spn_primitive: reports.iter().filter(|(_, r)| r.spn.primitive).count(),
        feistel_primitive: reports.iter().filter(|(_, r)| r.feistel.primitive).count(),
        counterexamples: reports
            .into_iter()
            .filter(|(_, r)| !r.implication_holds)
            .map(|(t, _)| t)
            .collect(),
        millis: start.elapsed().as_millis(),
    })
}

/// Per-brick hypothesis values for [`verify_sufficient_conditions`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrickHypotheses {
    pub brick: usize,
    pub differential_uniformity: u32,
    /// Differential uniformity at most `2^δ`.
    pub uniform: bool,
    /// Every derivative image has more than `2^(s−1−δ)` points.
    pub weakly_uniform: bool,
    pub non_invariant: bool,
    /// `(δ−1)`-non-invariance.
    pub non_invariant_below: bool,
    pub kernel_dim: usize,
    /// `dim(Ker λ ∩ W_j) < s − δ`.
    pub small_kernel: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conclusion {
    /// Hypotheses hold and primitivity was confirmed exhaustively.
    Confirmed,
    /// Hypotheses hold but the group is imprimitive: a bug or a false statement.
    Contradicted,
    /// Hypotheses hold; the domain is too large to check, so primitivity rests on the proof.
    HypothesesHoldConclusionByTheorem,
    /// Some hypothesis fails, so nothing is claimed.
    HypothesesNotMet,
}

/// One set of sufficient conditions for primitivity of `⟨T_n, ρ⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionSet {
    pub name: &'static str,
    pub description: &'static str,
    pub hypotheses_hold: bool,
    pub conclusion: Conclusion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SufficientConditionsReport {
    pub delta: usize,
    pub rho_bijective: bool,
    pub lambda_proper: bool,
    pub parallel_kernel: bool,
    pub bricks: Vec<BrickHypotheses>,
    /// Exhaustive primitivity of `⟨T_n, ρ⟩`, when the domain is small enough.
    pub primitive: Option<bool>,
    pub condition_sets: Vec<ConditionSet>,
}

impl SufficientConditionsReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionSet> {
        self.condition_sets.iter().find(|c| c.name == name)
    }

    /// No condition set was contradicted.
    pub fn consistent(&self) -> bool {
        self.condition_sets
            .iter()
            .all(|c| c.conclusion != Conclusion::Contradicted)
    }
}

fn mark(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

impl fmt::Display for SufficientConditionsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "delta: {}", self.delta)?;
        writeln!(f, "rho bijective: {}", mark(self.rho_bijective))?;
        writeln!(f, "lambda proper: {}", mark(self.lambda_proper))?;
        writeln!(f, "parallel kernel: {}", mark(self.parallel_kernel))?;
        for b in &self.bricks {
            writeln!(
                f,
                "brick {}: uniformity {} ({}), weak ({}), non-invariant ({}), non-invariant at delta-1 ({}), kernel dim {} ({})",
                b.brick,
                b.differential_uniformity,
                mark(b.uniform),
                mark(b.weakly_uniform),
                mark(b.non_invariant),
                mark(b.non_invariant_below),
                b.kernel_dim,
                mark(b.small_kernel)
            )?;
        }
        match self.primitive {
            Some(p) => writeln!(f, "<T_n, rho> primitive (exhaustive): {}", yes_no(p))?,
            None => writeln!(f, "<T_n, rho> primitive (exhaustive): not checked, domain too large")?,
        }
        for c in &self.condition_sets {
            writeln!(
                f,
                "{}: hypotheses {} -> {:?}",
                c.name,
                if c.hypotheses_hold { "hold" } else { "not met" },
                c.conclusion
            )?;
            writeln!(f, "  {}", c.description)?;
        }
        Ok(())
    }
}

/// Evaluates three sets of sufficient conditions for primitivity of
/// `⟨T_n, ρ⟩` at a given `δ`, then checks the conclusion exhaustively when
/// `2^n` points fit under the domain cap.
pub fn verify_sufficient_conditions(spec: &Arc<WaveSpec>, delta: usize) -> Result<SufficientConditionsReport> {
    let l = spec.layout();
    if delta == 0 || delta >= l.s {
        return Err(Error::InvalidArgument(format!(
            "delta must satisfy 1 <= delta < s = {}, got {delta}",
            l.s
        )));
    }
    let rho_bijective = spec.certify()?.bijective;
    let lambda_proper = spec.lambda().properness()?.proper;
    let parallel_kernel = spec.lambda().is_parallel_kernel();
    let bound = 1u32 << delta;
    let bricks = spec
        .sboxes()
        .iter()
        .zip(spec.lambda().kernel_bricks())
        .enumerate()
        .map(|(j, (sb, k))| {
            let du = sb.differential_uniformity();
            Ok(BrickHypotheses {
                brick: j + 1,
                differential_uniformity: du,
                uniform: du <= bound,
                weakly_uniform: sb.is_weakly_delta_du(bound)?,
                non_invariant: sb.is_delta_non_invariant(&k, delta)?,
                non_invariant_below: sb.is_delta_non_invariant(&k, delta - 1)?,
                kernel_dim: k.dim(),
                small_kernel: k.dim() + delta < l.s,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let primitive = if spec.width() <= max_domain_bits() && rho_bijective {
        Some(is_primitive(&spn_generators(spec)?)?.primitive)
    } else {
        None
    };
    let base = rho_bijective && lambda_proper && parallel_kernel;
    let all = |f: fn(&BrickHypotheses) -> bool| bricks.iter().all(f);
    let sets = [
        (
            "uniform",
            "each S-box 2^delta-differentially uniform and delta-non-invariant; parallel kernel",
            base && all(|b| b.uniform && b.non_invariant),
        ),
        (
            "weakly-uniform",
            "each S-box weakly 2^delta-differentially uniform and delta-non-invariant; parallel kernel",
            base && all(|b| b.weakly_uniform && b.non_invariant),
        ),
        (
            "small-kernel",
            "each S-box 2^delta-differentially uniform and (delta-1)-non-invariant; parallel kernel with brick dims below s - delta",
            base && all(|b| b.uniform && b.non_invariant_below && b.small_kernel),
        ),
    ];
    let condition_sets = sets
        .into_iter()
        .map(|(name, description, hypotheses_hold)| ConditionSet {
            name,
            description,
            hypotheses_hold,
            conclusion: match (hypotheses_hold, primitive) {
                (false, _) => Conclusion::HypothesesNotMet,
                (true, Some(true)) => Conclusion::Confirmed,
                (true, Some(false)) => Conclusion::Contradicted,
                (true, None) => Conclusion::HypothesesHoldConclusionByTheorem,
            },
        })
        .collect();
    Ok(SufficientConditionsReport {
        delta,
        rho_bijective,
        lambda_proper,
        parallel_kernel,
        bricks,
        primitive,
        condition_sets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_group_blocks_are_cosets() {
        let t2 = GeneratorAction::translation_group(2).unwrap();
        assert!(t2.contains_translations());
        let bs = minimal_block(&t2, 0b00, 0b01).unwrap();
        assert_eq!(bs.cells(), vec![vec![0, 1], vec![2, 3]]);
        let p = is_primitive(&t2).unwrap();
        assert!(!p.primitive);
        assert_eq!(p.witness_point, Some(1));
    }

    #[test]
    fn same_point_gives_singletons() {
        let t3 = GeneratorAction::translation_group(3).unwrap();
        let bs = minimal_block(&t3, 5, 5).unwrap();
        assert_eq!(bs.cell_size(), 1);
        assert_eq!(bs.cell_count(), 8);
    }

    #[test]
    fn empty_generators_fix_everything() {
        let a = GeneratorAction::new(3, vec![]).unwrap();
        assert_eq!(orbit(&a, 6).unwrap(), vec![6]);
        assert!(!is_transitive(&a).unwrap());
        assert!(matches!(is_primitive(&a), Err(Error::NotTransitive { orbit: 1, domain: 8 })));
    }

    #[test]
    fn full_symmetric_group_is_primitive() {
        // a 6-cycle fixing 0 and 1, together with the translations
        let mut gens: Vec<Generator> = (0..3).map(|i| Generator::translation(3, 1 << i)).collect();
        let perm = [0u64, 1, 3, 4, 5, 6, 7, 2];
        gens.push(Generator::new("p", Arc::new(move |x| perm[x as usize])));
        let a = GeneratorAction::new(3, gens).unwrap();
        let fast = is_primitive(&a).unwrap();
        let slow = is_primitive_exhaustive(&a).unwrap();
        assert_eq!(fast.primitive, slow.primitive);
        assert!(fast.primitive);

        // a linear 3-cycle keeps the group affine, hence imprimitive
        let mut gens: Vec<Generator> = (0..3).map(|i| Generator::translation(3, 1 << i)).collect();
        let perm = [0u64, 2, 3, 1, 4, 6, 7, 5];
        gens.push(Generator::new("p", Arc::new(move |x| perm[x as usize])));
        let a = GeneratorAction::new(3, gens).unwrap();
        let fast = is_primitive(&a).unwrap();
        assert!(!fast.primitive);
        assert_eq!(fast.witness_point, is_primitive_exhaustive(&a).unwrap().witness_point);
        assert!(fast.blocks.unwrap().is_invariant_under(&a));
    }

    #[test]
    fn domain_guard() {
        let a = GeneratorAction::translation_group(30).unwrap();
        assert!(matches!(orbit(&a, 0), Err(Error::DomainTooLarge(_))));
    }

    #[test]
    fn affine_rho_refused() {
        let r = verify_reduction_for(4, Arc::new(|x| x ^ 3));
        assert!(matches!(r, Err(Error::AffineRho)));
    }
}
