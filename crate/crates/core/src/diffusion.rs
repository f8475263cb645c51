//! The compressing linear layer `λ : W → V` and its structural properties.
//!
//! Bricks are numbered from 1 in reports; brick 1 occupies the most
//! significant bits of a vector.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{mask, BitMatrix, BitVector, Subspace};

/// Default input-brick-weight cap for [`DiffusionLayer::branch_number`].
pub const DEFAULT_BRANCH_CAP: usize = 3;

const MAX_WALL_BRICKS: usize = 24;

/// `b` bricks of `s` bits on `V` and `t` bits on `W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BrickLayout {
    pub bricks: usize,
    pub s: usize,
    pub t: usize,
}

impl BrickLayout {
    pub fn new(bricks: usize, s: usize, t: usize) -> Result<Self> {
        if bricks == 0 || s == 0 || t < s || bricks * t > 64 {
            return Err(Error::InvalidArgument(format!(
                "invalid brick layout b={bricks} s={s} t={t} (need 1 <= s <= t, b*t <= 64)"
            )));
        }
        Ok(Self { bricks, s, t })
    }

    /// `n = b·s`.
    pub fn n(&self) -> usize {
        self.bricks * self.s
    }

    /// `m = b·t`.
    pub fn m(&self) -> usize {
        self.bricks * self.t
    }

    /// Shift of brick `j` (0-based) inside a vector of `b` bricks of `width` bits.
    #[inline]
    fn shift(&self, j: usize, width: usize) -> usize {
        (self.bricks - 1 - j) * width
    }

    #[inline]
    pub fn v_brick(&self, x: u64, j: usize) -> u64 {
        (x >> self.shift(j, self.s)) & mask(self.s)
    }

    #[inline]
    pub fn w_brick(&self, y: u64, j: usize) -> u64 {
        (y >> self.shift(j, self.t)) & mask(self.t)
    }

    #[inline]
    pub fn place_v(&self, value: u64, j: usize) -> u64 {
        value << self.shift(j, self.s)
    }

    #[inline]
    pub fn place_w(&self, value: u64, j: usize) -> u64 {
        value << self.shift(j, self.t)
    }

    pub fn v_brick_mask(&self, j: usize) -> u64 {
        self.place_v(mask(self.s), j)
    }

    pub fn w_brick_mask(&self, j: usize) -> u64 {
        self.place_w(mask(self.t), j)
    }

    /// Activity pattern of a `V` vector, one bit per brick with brick 1 most
    /// significant (the same order as the bricks inside a vector).
    pub fn v_pattern(&self, x: u64) -> u32 {
        (0..self.bricks).fold(0, |acc, j| acc << 1 | (self.v_brick(x, j) != 0) as u32)
    }

    pub fn w_pattern(&self, y: u64) -> u32 {
        (0..self.bricks).fold(0, |acc, j| acc << 1 | (self.w_brick(y, j) != 0) as u32)
    }

    /// Number of non-zero bricks of a `V` vector.
    pub fn v_weight(&self, x: u64) -> usize {
        self.v_pattern(x).count_ones() as usize
    }

    pub fn w_weight(&self, y: u64) -> usize {
        self.w_pattern(y).count_ones() as usize
    }

    /// The wall `⊕_{j∈I} V_j`; bit `j` of `bricks` selects brick `j + 1`.
    pub fn v_wall(&self, bricks: u32) -> Subspace {
        let gens = (0..self.bricks)
            .filter(|j| bricks >> j & 1 == 1)
            .flat_map(|j| (0..self.s).map(move |b| self.place_v(1 << b, j)));
        Subspace::span(self.n(), gens).expect("layout widths validated")
    }

    pub fn w_wall(&self, bricks: u32) -> Subspace {
        let gens = (0..self.bricks)
            .filter(|j| bricks >> j & 1 == 1)
            .flat_map(|j| (0..self.t).map(move |b| self.place_w(1 << b, j)));
        Subspace::span(self.m(), gens).expect("layout widths validated")
    }
}

/// A surjective linear map `W → V` stored as an `m × n` matrix.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffusionLayer {
    layout: BrickLayout,
    matrix: BitMatrix,
}

/// Outcome of the wall-by-wall properness test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Properness {
    pub proper: bool,
    pub walls_checked: usize,
    /// 1-based bricks of the first wall whose preimage falls inside `W' + Ker λ`.
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchNumber {
    pub value: usize,
    /// An input `x ∉ Ker λ` attaining the minimum.
    pub witness: BitVector,
    pub image: BitVector,
}

impl DiffusionLayer {
    pub fn new(layout: BrickLayout, matrix: BitMatrix) -> Result<Self> {
        if matrix.rows() != layout.m() || matrix.cols() != layout.n() {
            return Err(Error::DimensionMismatch(format!(
                "layout needs a {}x{} matrix, got {}x{}",
                layout.m(),
                layout.n(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        let rank = matrix.rank();
        if rank != layout.n() {
            return Err(Error::NotSurjective {
                rank,
                cols: layout.n(),
            });
        }
        Ok(Self { layout, matrix })
    }

    pub fn layout(&self) -> BrickLayout {
        self.layout
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    #[inline]
    pub fn apply(&self, y: u64) -> u64 {
        self.matrix.apply(y)
    }

    pub fn kernel(&self) -> Subspace {
        self.matrix.kernel()
    }

    /// `Ker λ ∩ W_j` expressed as a subspace of `(F₂)^t` (0-based `j`).
    pub fn kernel_brick(&self, j: usize) -> Subspace {
        let l = self.layout;
        let inter = self.kernel().intersection(&l.w_wall(1 << j));
        Subspace::span(l.t, inter.basis().iter().map(|&v| l.w_brick(v, j)))
            .expect("layout widths validated")
    }

    pub fn kernel_bricks(&self) -> Vec<Subspace> {
        (0..self.layout.bricks).map(|j| self.kernel_brick(j)).collect()
    }

    /// `Ker λ = ⊕_j (Ker λ ∩ W_j)`.
    pub fn is_parallel_kernel(&self) -> bool {
        let total: usize = self.kernel_bricks().iter().map(Subspace::dim).sum();
        total == self.kernel().dim()
    }

    /// Tests `V'λ⁻¹ ⊄ W' + Ker λ` for every wall, stopping at the first failure.
    pub fn properness(&self) -> Result<Properness> {
        let l = self.layout;
        if l.bricks > MAX_WALL_BRICKS {
            return Err(Error::DomainTooLarge(format!(
                "{} bricks give 2^{} walls",
                l.bricks, l.bricks
            )));
        }
        let kernel = self.kernel();
        let walls = (1u32 << l.bricks).saturating_sub(2) as usize;
        let violation = (1u32..(1u32 << l.bricks) - 1)
            .into_par_iter()
            .find_first(|&set| self.wall_preimage_contained(set, &kernel));
        Ok(match violation {
            None => Properness {
                proper: true,
                walls_checked: walls,
                witness: None,
            },
            Some(set) => Properness {
                proper: false,
                walls_checked: set as usize,
                witness: Some((0..l.bricks).filter(|j| set >> j & 1 == 1).map(|j| j + 1).collect()),
            },
        })
    }

    /// Whether `V'λ⁻¹ ⊆ W' + Ker λ` for the wall on the given brick set.
    pub fn wall_preimage_contained(&self, bricks: u32, kernel: &Subspace) -> bool {
        let l = self.layout;
        let pre = self
            .matrix
            .preimage(&l.v_wall(bricks))
            .expect("widths match by construction");
        let target = l.w_wall(bricks).join(kernel);
        pre.is_subspace_of(&target)
    }

    pub fn is_proper(&self) -> bool {
        self.properness().map(|p| p.proper).unwrap_or(false)
    }

    /// `min_{x ∉ Ker λ} w_b(x) + w_b(xλ)`.
    ///
    /// Searches inputs by increasing number of active bricks up to `cap`.
    /// Any input with more than `cap` active bricks scores at least `cap + 2`,
    /// so the search is exact once the best value found is `≤ cap + 1`.
    pub fn branch_number(&self, cap: usize) -> Result<BranchNumber> {
        let l = self.layout;
        let cap = cap.clamp(1, l.bricks);
        let mut best: Option<(usize, u64)> = None;
        for weight in 1..=cap {
            if let Some((v, _)) = best {
                if weight + 1 >= v {
                    break;
                }
            }
            let found = self.best_at_weight(weight);
            if let Some((v, x)) = found {
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, x));
                }
            }
        }
        match best {
            Some((value, x)) if value <= cap + 1 || cap == l.bricks => Ok(BranchNumber {
                value,
                witness: BitVector::new(l.m(), x)?,
                image: BitVector::new(l.n(), self.apply(x))?,
            }),
            Some((value, _)) => Err(Error::SearchCapReached {
                lower: cap + 2,
                upper: value,
            }),
            None => Err(Error::SearchCapReached {
                lower: cap + 2,
                upper: 2 * l.bricks,
            }),
        }
    }

    /// Smallest `w_b(x) + w_b(xλ)` over inputs with exactly `weight` active
    /// bricks outside the kernel; ties go to the numerically smallest `x`.
    fn best_at_weight(&self, weight: usize) -> Option<(usize, u64)> {
        let l = self.layout;
        let nonzero = (1u64 << l.t) - 1;
        let sets: Vec<u32> = (0u32..1 << l.bricks)
            .filter(|s| s.count_ones() as usize == weight)
            .collect();
        sets.par_iter()
            .filter_map(|&set| {
                let bricks: Vec<usize> = (0..l.bricks).filter(|j| set >> j & 1 == 1).collect();
                let mut best: Option<(usize, u64)> = None;
                let combos = nonzero.pow(weight as u32);
                for mut c in 0..combos {
                    let mut x = 0u64;
                    for &j in &bricks {
                        x |= l.place_w(c % nonzero + 1, j);
                        c /= nonzero;
                    }
                    let y = self.apply(x);
                    if y == 0 {
                        continue;
                    }
                    let score = weight + l.v_weight(y);
                    if best.is_none_or(|(bv, bx)| score < bv || (score == bv && x < bx)) {
                        best = Some((score, x));
                    }
                }
                best
            })
            .min()
    }

    /// `adjacency[j][q]`: some row of `W` brick `j` has a 1 in a column of `V` brick `q`.
    pub fn brick_connectivity(&self) -> Vec<Vec<bool>> {
        let l = self.layout;
        (0..l.bricks)
            .map(|j| {
                let rows = (0..l.t).fold(0u64, |acc, b| acc | self.matrix.row_bits()[j * l.t + b]);
                (0..l.bricks).map(|q| rows & l.v_brick_mask(q) != 0).collect()
            })
            .collect()
    }

    /// Output-brick activity pattern reachable from each input brick, in the
    /// same bit order as [`BrickLayout::v_pattern`].
    pub fn connectivity_masks(&self) -> Vec<u32> {
        self.brick_connectivity()
            .iter()
            .map(|row| row.iter().fold(0u32, |acc, &c| acc << 1 | c as u32))
            .collect()
    }

    pub fn analyze(&self, branch_cap: usize) -> Result<LayerReport> {
        let kernel = self.kernel();
        let properness = self.properness()?;
        let branch = match self.branch_number(branch_cap) {
            Ok(b) => BranchReport::Exact {
                value: b.value,
                witness: b.witness.to_hex(),
                image: b.image.to_hex(),
            },
            Err(Error::SearchCapReached { lower, upper }) => BranchReport::Bounded { lower, upper },
            Err(e) => return Err(e),
        };
        Ok(LayerReport {
            bricks: self.layout.bricks,
            s: self.layout.s,
            t: self.layout.t,
            rank: self.matrix.rank(),
            kernel_dim: kernel.dim(),
            kernel_basis: kernel
                .basis_vectors()
                .iter()
                .map(BitVector::to_hex)
                .collect(),
            kernel_brick_dims: self.kernel_bricks().iter().map(Subspace::dim).collect(),
            parallel_kernel: self.is_parallel_kernel(),
            proper: properness.proper,
            walls_checked: properness.walls_checked,
            properness_witness: properness.witness,
            branch_number: branch,
            connectivity: self.brick_connectivity(),
        })
    }
}

impl fmt::Debug for DiffusionLayer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffusionLayer({:?}, {:?})", self.layout, self.matrix)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchReport {
    Exact {
        value: usize,
        witness: String,
        image: String,
    },
    Bounded {
        lower: usize,
        upper: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerReport {
    pub bricks: usize,
    pub s: usize,
    pub t: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub kernel_basis: Vec<String>,
    pub kernel_brick_dims: Vec<usize>,
    pub parallel_kernel: bool,
    pub proper: bool,
    pub walls_checked: usize,
    pub properness_witness: Option<Vec<usize>>,
    pub branch_number: BranchReport,
    pub connectivity: Vec<Vec<bool>>,
}

impl fmt::Display for LayerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "layer: {}x{} (b={}, s={}, t={})",
            self.bricks * self.t,
            self.bricks * self.s,
            self.bricks,
            self.s,
            self.t
        )?;
        writeln!(f, "rank: {}", self.rank)?;
        writeln!(f, "kernel dim: {}", self.kernel_dim)?;
        writeln!(f, "kernel basis: {}", self.kernel_basis.join(" "))?;
        writeln!(
            f,
            "kernel brick dims: {}",
            self.kernel_brick_dims
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        )?;
        writeln!(f, "parallel kernel: {}", yes_no(self.parallel_kernel))?;
        match &self.properness_witness {
            None => writeln!(f, "proper: yes ({} walls checked)", self.walls_checked)?,
            Some(w) => writeln!(f, "proper: no (wall on bricks {w:?})")?,
        }
        match &self.branch_number {
            BranchReport::Exact {
                value,
                witness,
                image,
            } => writeln!(f, "branch number: {value} (x = {witness}, xλ = {image})")?,
            BranchReport::Bounded { lower, upper } => {
                writeln!(f, "branch number: in [{lower}, {upper}] (search cap reached)")?
            }
        }
        writeln!(f, "brick connectivity (W brick -> V bricks):")?;
        for (j, row) in self.connectivity.iter().enumerate() {
            let targets: Vec<String> = row
                .iter()
                .enumerate()
                .filter(|(_, &c)| c)
                .map(|(q, _)| (q + 1).to_string())
                .collect();
            writeln!(f, "  {} -> {}", j + 1, targets.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
