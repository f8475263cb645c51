//! Linear algebra over GF(2).
//!
//! Vectors and matrix rows are packed into a single `u64`. Bit index 0 is the
//! most significant bit of a vector, so the integer value of a vector is what
//! its hexadecimal rendering shows: the 4-bit vector `(0,0,0,1)` is `0x1`.
//!
//! Matrices act on row vectors from the right (`y = x·M`), so an `m × n`
//! matrix maps width-`m` vectors to width-`n` vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_WIDTH: usize = 64;

/// Default cap on the number of subspaces [`enumerate_subspaces`] may yield.
pub const DEFAULT_SUBSPACE_CAP: u128 = 10_000_000;

/// The low `width` bits set.
#[inline]
pub fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

fn check_width(width: usize) -> Result<()> {
    if width == 0 || width > MAX_WIDTH {
        Err(Error::WidthOutOfRange(width))
    } else {
        Ok(())
    }
}

/// A vector over GF(2) of width 1..=64.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVector {
    width: u8,
    bits: u64,
}

impl BitVector {
    pub fn new(width: usize, bits: u64) -> Result<Self> {
        check_width(width)?;
        if bits & !mask(width) != 0 {
            return Err(Error::ValueTooWide { value: bits, width });
        }
        Ok(Self {
            width: width as u8,
            bits,
        })
    }

    pub fn zero(width: usize) -> Result<Self> {
        Self::new(width, 0)
    }

    /// The standard basis vector with a single 1 at `index` (0 = most significant).
    pub fn unit(width: usize, index: usize) -> Result<Self> {
        check_width(width)?;
        if index >= width {
            return Err(Error::DimensionMismatch(format!(
                "index {index} out of range for width {width}"
            )));
        }
        Self::new(width, 1u64 << (width - 1 - index))
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn value(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.width());
        (self.bits >> (self.width() - 1 - index)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, bit: bool) {
        assert!(index < self.width());
        let m = 1u64 << (self.width() - 1 - index);
        if bit {
            self.bits |= m;
        } else {
            self.bits &= !m;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Standard inner product over GF(2).
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.width, other.width);
        (self.bits & other.bits).count_ones() & 1 == 1
    }

    /// `self` followed by `low`; `self` ends up in the most significant bits.
    pub fn concat(&self, low: &Self) -> Result<Self> {
        let width = self.width() + low.width();
        check_width(width)?;
        Self::new(width, (self.bits << low.width()) | low.bits)
    }

    /// Splits into a high part of `high_width` bits and the remaining low part.
    pub fn split(&self, high_width: usize) -> Result<(Self, Self)> {
        if high_width == 0 || high_width >= self.width() {
            return Err(Error::DimensionMismatch(format!(
                "cannot split width {} at {high_width}",
                self.width()
            )));
        }
        let low_width = self.width() - high_width;
        Ok((
            Self::new(high_width, self.bits >> low_width)?,
            Self::new(low_width, self.bits & mask(low_width))?,
        ))
    }

    /// Renders as `0x`-prefixed upper-case hex with `ceil(width/4)` digits.
    pub fn to_hex(&self) -> String {
        format!("0x{:0digits$X}", self.bits, digits = self.width().div_ceil(4))
    }

    pub fn from_hex(text: &str, width: usize) -> Result<Self> {
        let digits = text
            .strip_prefix("0x")
            .or_else(|| text.strip_prefix("0X"))
            .ok_or_else(|| parse_err(0, format!("missing 0x prefix in {text:?}")))?;
        if digits.is_empty() || digits.len() > 16 {
            return Err(parse_err(0, format!("bad hex literal {text:?}")));
        }
        let bits = u64::from_str_radix(digits, 16)
            .map_err(|e| parse_err(0, format!("bad hex literal {text:?}: {e}")))?;
        Self::new(width, bits)
    }
}

impl std::ops::BitXor for BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: Self) -> Self {
        assert_eq!(self.width, rhs.width, "xor of vectors with different widths");
        Self {
            width: self.width,
            bits: self.bits ^ rhs.bits,
        }
    }
}

impl std::ops::BitXorAssign for BitVector {
    fn bitxor_assign(&mut self, rhs: Self) {
        *self = *self ^ rhs;
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.to_hex(), self.width)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn parse_err(line: usize, msg: String) -> Error {
    Error::Parse { line, msg }
}

/// Dense `rows × cols` matrix over GF(2), one packed `u64` per row.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn from_rows(cols: usize, data: Vec<u64>) -> Result<Self> {
        check_width(cols)?;
        check_width(data.len())?;
        if let Some(&bad) = data.iter().find(|&&r| r & !mask(cols) != 0) {
            return Err(Error::ValueTooWide {
                value: bad,
                width: cols,
            });
        }
        Ok(Self {
            rows: data.len(),
            cols,
            data,
        })
    }

    pub fn zero(rows: usize, cols: usize) -> Result<Self> {
        check_width(rows)?;
        Self::from_rows(cols, vec![0; rows])
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_width(n)?;
        Self::from_rows(n, (0..n).map(|i| 1u64 << (n - 1 - i)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_bits(&self) -> &[u64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector {
            width: self.cols as u8,
            bits: self.data[i],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        (self.data[i] >> (self.cols - 1 - j)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        assert!(i < self.rows && j < self.cols);
        let m = 1u64 << (self.cols - 1 - j);
        if bit {
            self.data[i] |= m;
        } else {
            self.data[i] &= !m;
        }
    }

    /// `x·M` on packed bits; `x` has `rows` significant bits.
    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        let mut acc = 0;
        let mut rest = x & mask(self.rows);
        while rest != 0 {
            let b = 63 - rest.leading_zeros() as usize;
            acc ^= self.data[self.rows - 1 - b];
            rest &= !(1u64 << b);
        }
        acc
    }

    pub fn mul_vec(&self, x: &BitVector) -> Result<BitVector> {
        if x.width() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of width {} times {}x{} matrix",
                x.width(),
                self.rows,
                self.cols
            )));
        }
        BitVector::new(self.cols, self.apply(x.bits))
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        Subspace::span(self.cols, self.data.iter().copied())
            .expect("cols already validated")
            .dim()
    }

    /// Row space, i.e. the image of `x ↦ x·M`.
    pub fn image(&self) -> Subspace {
        Subspace::span(self.cols, self.data.iter().copied()).expect("cols already validated")
    }

    /// `{x : x·M = 0}`; its dimension is `rows - rank`.
    pub fn kernel(&self) -> Subspace {
        // Track each row's combination in a tag word alongside its value.
        let mut pivots: Vec<(u64, u64)> = Vec::new();
        let mut kernel = Vec::new();
        for (i, &row) in self.data.iter().enumerate() {
            let mut value = row;
            let mut tag = 1u64 << (self.rows - 1 - i);
            for &(pv, pt) in &pivots {
                if value & top_bit(pv) != 0 {
                    value ^= pv;
                    tag ^= pt;
                }
            }
            if value == 0 {
                kernel.push(tag);
            } else {
                pivots.push((value, tag));
            }
        }
        Subspace::span(self.rows, kernel).expect("rows already validated")
    }

    /// `{x : x·M ∈ target}`.
    pub fn preimage(&self, target: &Subspace) -> Result<Subspace> {
        if target.width() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "subspace of width {} against {} matrix columns",
                target.width(),
                self.cols
            )));
        }
        // Reduction modulo an RREF basis is linear, so composing it with M
        // gives a matrix whose kernel is exactly the preimage.
        let reduced = self.data.iter().map(|&r| target.reduce(r)).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: reduced,
        }
        .kernel())
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zero(self.cols, self.rows).expect("dims already validated");
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Parses the plain-text matrix format: one row per line written with `0`
    /// and `1`, optional spaces, `#` starting a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cols = None;
        let mut data = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let mut row = 0u64;
            let mut len = 0usize;
            for c in line.chars().filter(|c| !c.is_whitespace()) {
                let bit = match c {
                    '0' => 0,
                    '1' => 1,
                    other => {
                        return Err(parse_err(lineno + 1, format!("unexpected character {other:?}")))
                    }
                };
                len += 1;
                if len > MAX_WIDTH {
                    return Err(parse_err(lineno + 1, "row wider than 64 columns".into()));
                }
                row = (row << 1) | bit;
            }
            if len == 0 {
                continue;
            }
            match cols {
                None => cols = Some(len),
                Some(c) if c != len => {
                    return Err(parse_err(
                        lineno + 1,
                        format!("row has {len} entries, expected {c}"),
                    ))
                }
                _ => {}
            }
            data.push(row);
        }
        let cols = cols.ok_or_else(|| parse_err(0, "matrix has no rows".into()))?;
        if data.len() > MAX_WIDTH {
            return Err(parse_err(0, "more than 64 rows".into()));
        }
        Self::from_rows(cols, data)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let row: Vec<&str> = (0..self.cols)
                .map(|j| if self.get(i, j) { "1" } else { "0" })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        f.write_str(&self.to_text())
    }
}

#[inline]
fn top_bit(v: u64) -> u64 {
    debug_assert!(v != 0);
    1u64 << (63 - v.leading_zeros())
}

/// A subspace of `(F₂)^width` held as a reduced row-echelon basis.
///
/// Basis vectors are sorted by pivot, leftmost (most significant) first, and
/// each pivot column is clear in every other basis vector. The representation
/// is canonical, so derived equality is subspace equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subspace {
    width: usize,
    basis: Vec<u64>,
}

impl Subspace {
    pub fn zero(width: usize) -> Result<Self> {
        check_width(width)?;
        Ok(Self {
            width,
            basis: Vec::new(),
        })
    }

    pub fn full(width: usize) -> Result<Self> {
        check_width(width)?;
        Ok(Self {
            width,
            basis: (0..width).rev().map(|b| 1u64 << b).collect(),
        })
    }

    pub fn span(width: usize, generators: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut s = Self::zero(width)?;
        for g in generators {
            if g & !mask(width) != 0 {
                return Err(Error::ValueTooWide { value: g, width });
            }
            s.insert(g);
        }
        Ok(s)
    }

    pub fn from_vectors(width: usize, vectors: &[BitVector]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.width() != width) {
            return Err(Error::DimensionMismatch(format!(
                "vector width {} in subspace of width {width}",
                v.width()
            )));
        }
        Self::span(width, vectors.iter().map(|v| v.value()))
    }

    /// Builds directly from a basis already in canonical form.
    pub(crate) fn from_rref_unchecked(width: usize, basis: Vec<u64>) -> Self {
        debug_assert!(Self::span(width, basis.iter().copied()).unwrap().basis == basis);
        Self { width, basis }
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let p = top_bit(r);
        for b in self.basis.iter_mut() {
            if *b & p != 0 {
                *b ^= r;
            }
        }
        let pos = self
            .basis
            .iter()
            .position(|&b| top_bit(b) < p)
            .unwrap_or(self.basis.len());
        self.basis.insert(pos, r);
        true
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.width
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<BitVector> {
        self.basis
            .iter()
            .map(|&b| BitVector::new(self.width, b).expect("basis fits width"))
            .collect()
    }

    /// Number of elements, `2^dim`.
    pub fn size(&self) -> u128 {
        1u128 << self.dim()
    }

    /// Canonical representative of `v + S`; zero iff `v ∈ S`. Linear in `v`.
    #[inline]
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.basis {
            if v & top_bit(b) != 0 {
                v ^= b;
            }
        }
        v
    }

    #[inline]
    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub fn contains_vector(&self, x: &BitVector) -> Result<bool> {
        if x.width() != self.width {
            return Err(Error::DimensionMismatch(format!(
                "vector width {} against subspace width {}",
                x.width(),
                self.width
            )));
        }
        Ok(self.contains(x.value()))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.width == other.width && self.basis.iter().all(|&b| other.contains(b))
    }

    /// `S + T`.
    pub fn join(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.width, other.width);
        let mut s = self.clone();
        for &b in &other.basis {
            s.insert(b);
        }
        s
    }

    /// `S ∩ T`.
    pub fn intersection(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.width, other.width);
        // Zassenhaus: row-reduce [a | a] and [b | 0]; rows with zero left half
        // carry a basis of the intersection in their right half.
        let w = self.width;
        if 2 * w > 64 {
            return self.intersection_wide(other);
        }
        let mut z = Subspace {
            width: 2 * w,
            basis: Vec::new(),
        };
        for &a in &self.basis {
            z.insert((a << w) | a);
        }
        for &b in &other.basis {
            z.insert(b << w);
        }
        let low: Vec<u64> = z
            .basis
            .iter()
            .filter(|&&v| v >> w == 0)
            .map(|&v| v & mask(w))
            .collect();
        Subspace::span(w, low).expect("width already validated")
    }

    fn intersection_wide(&self, other: &Subspace) -> Subspace {
        // Coefficient vectors (c, d) with c·A = d·B give c·A ∈ S ∩ T.
        let rows: Vec<u64> = self.basis.iter().chain(other.basis.iter()).copied().collect();
        if rows.is_empty() {
            return Subspace::zero(self.width).expect("width already validated");
        }
        let stacked = BitMatrix {
            rows: rows.len(),
            cols: self.width,
            data: rows,
        };
        let k = self.dim();
        let n = stacked.rows;
        let ker = stacked.kernel();
        let elems = ker.basis.iter().map(|&coef| {
            let c = coef >> (n - k);
            let mut acc = 0u64;
            for (i, &a) in self.basis.iter().enumerate() {
                if (c >> (k - 1 - i)) & 1 == 1 {
                    acc ^= a;
                }
            }
            acc
        });
        Subspace::span(self.width, elems.collect::<Vec<_>>()).expect("width already validated")
    }

    /// All `2^dim` elements, in the order of the binary counter over the basis.
    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        let d = self.dim();
        assert!(d < 64, "subspace too large to enumerate");
        (0u64..(1u64 << d)).map(move |c| {
            let mut acc = 0;
            let mut rest = c;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                acc ^= self.basis[d - 1 - i];
                rest &= rest - 1;
            }
            acc
        })
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.width.div_ceil(4);
        let basis: Vec<String> = self
            .basis
            .iter()
            .map(|b| format!("0x{b:0digits$X}"))
            .collect();
        write!(f, "Subspace(w={}, span{{{}}})", self.width, basis.join(", "))
    }
}

/// Gaussian binomial coefficient `[n choose k]_2`, or `None` on overflow.
pub fn gaussian_binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        let top = 1u128.checked_shl((n - i) as u32)?.checked_sub(1)?;
        let bottom = (1u128 << (i + 1)) - 1;
        num = num.checked_mul(top)?;
        den = den.checked_mul(bottom)?;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    Some(num / den)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Number of subspaces of `(F₂)^n` with dimension at most `max_dim`.
pub fn subspace_count(n: usize, max_dim: usize) -> Option<u128> {
    (0..=max_dim.min(n)).try_fold(0u128, |acc, k| acc.checked_add(gaussian_binomial(n, k)?))
}

/// Every subspace of `(F₂)^n` with dimension ≤ `max_dim`, each exactly once.
///
/// Order: by dimension, then pivot positions (lexicographic, leftmost
/// first), then the free entries read as a binary counter.
pub fn enumerate_subspaces(n: usize, max_dim: usize) -> Result<SubspaceIter> {
    enumerate_subspaces_capped(n, max_dim, DEFAULT_SUBSPACE_CAP)
}

pub fn enumerate_subspaces_capped(n: usize, max_dim: usize, cap: u128) -> Result<SubspaceIter> {
    check_width(n)?;
    let max_dim = max_dim.min(n);
    match subspace_count(n, max_dim) {
        Some(c) if c <= cap => Ok(SubspaceIter::new(n, max_dim)),
        Some(c) => Err(Error::DomainTooLarge(format!(
            "{c} subspaces of (F2)^{n} up to dim {max_dim} exceed cap {cap}"
        ))),
        None => Err(Error::DomainTooLarge(format!(
            "subspace count of (F2)^{n} overflows"
        ))),
    }
}

/// Proper non-trivial subspaces, i.e. `0 < dim < n`.
pub fn proper_nontrivial_subspaces(n: usize) -> Result<impl Iterator<Item = Subspace>> {
    Ok(enumerate_subspaces(n, n.saturating_sub(1))?.filter(|s| !s.is_zero()))
}

pub struct SubspaceIter {
    n: usize,
    max_dim: usize,
    dim: usize,
    /// Pivot positions as bit indices (0 = most significant); `None` when exhausted.
    pivots: Option<Vec<usize>>,
    free: Vec<(usize, usize)>,
    counter: u64,
}

impl SubspaceIter {
    fn new(n: usize, max_dim: usize) -> Self {
        let mut it = Self {
            n,
            max_dim,
            dim: 0,
            pivots: Some(Vec::new()),
            free: Vec::new(),
            counter: 0,
        };
        it.load_free();
        it
    }

    fn load_free(&mut self) {
        self.free.clear();
        if let Some(p) = &self.pivots {
            for (r, &pos) in p.iter().enumerate() {
                for col in pos + 1..self.n {
                    if !p.contains(&col) {
                        self.free.push((r, col));
                    }
                }
            }
        }
        self.counter = 0;
    }

    fn advance_pivots(&mut self) {
        let Some(p) = self.pivots.as_mut() else {
            return;
        };
        let k = p.len();
        // Next k-combination of 0..n in lexicographic order.
        let mut i = k;
        while i > 0 {
            i -= 1;
            if p[i] < self.n - k + i {
                p[i] += 1;
                for j in i + 1..k {
                    p[j] = p[j - 1] + 1;
                }
                self.load_free();
                return;
            }
        }
        self.dim += 1;
        if self.dim > self.max_dim {
            self.pivots = None;
        } else {
            self.pivots = Some((0..self.dim).collect());
            self.load_free();
        }
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        let pivots = self.pivots.as_ref()?;
        let n = self.n;
        let mut basis: Vec<u64> = pivots.iter().map(|&p| 1u64 << (n - 1 - p)).collect();
        for (i, &(r, col)) in self.free.iter().enumerate() {
            if (self.counter >> (self.free.len() - 1 - i)) & 1 == 1 {
                basis[r] |= 1u64 << (n - 1 - col);
            }
        }
        let s = Subspace::from_rref_unchecked(n, basis);
        self.counter += 1;
        if self.counter >> self.free.len() != 0 {
            self.advance_pivots();
        }
        Some(s)
    }
}

/// `x ∈ S`, the membership test by reduction against the canonical basis.
pub fn span_contains(s: &Subspace, x: &BitVector) -> Result<bool> {
    s.contains_vector(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_follows_msb_first_convention() {
        let v = BitVector::unit(4, 3).unwrap();
        assert_eq!(v.to_hex(), "0x1");
        assert!(v.get(3));
        assert_eq!(BitVector::from_hex("0x11", 5).unwrap().value(), 0b10001);
        assert_eq!(BitVector::new(5, 0x11).unwrap().to_hex(), "0x11");
        assert!(BitVector::from_hex("0x20", 5).is_err());
        assert!(BitVector::from_hex("20", 5).is_err());
    }

    #[test]
    fn concat_and_split() {
        let hi = BitVector::new(32, 0x01234567).unwrap();
        let lo = BitVector::new(32, 0x89ABCDEF).unwrap();
        let whole = hi.concat(&lo).unwrap();
        assert_eq!(whole.to_hex(), "0x0123456789ABCDEF");
        assert_eq!(whole.split(32).unwrap(), (hi, lo));
    }

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(BitMatrix::identity(4).unwrap().rank(), 4);
        assert_eq!(BitMatrix::zero(3, 5).unwrap().rank(), 0);
    }

    #[test]
    fn kernel_examples() {
        assert!(BitMatrix::identity(6).unwrap().kernel().is_zero());
        let k = BitMatrix::zero(2, 3).unwrap().kernel();
        assert_eq!(k, Subspace::full(2).unwrap());
        // rows 1 and 3 equal, row 2 zero
        let m = BitMatrix::from_rows(3, vec![0b101, 0b000, 0b101]).unwrap();
        assert_eq!(m.kernel(), Subspace::span(3, [0b010, 0b101]).unwrap());
    }

    #[test]
    fn preimage_edges() {
        let m = BitMatrix::from_rows(3, vec![0b110, 0b011, 0b101, 0b111]).unwrap();
        assert_eq!(m.preimage(&Subspace::zero(3).unwrap()).unwrap(), m.kernel());
        assert_eq!(
            m.preimage(&Subspace::full(3).unwrap()).unwrap(),
            Subspace::full(4).unwrap()
        );
        assert!(m.preimage(&Subspace::zero(4).unwrap()).is_err());
    }

    #[test]
    fn subspace_canonical_equality() {
        let a = Subspace::span(4, [0b1100, 0b0110]).unwrap();
        let b = Subspace::span(4, [0b1010, 0b0110, 0b1100]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.basis(), &[0b1010, 0b0110]);
        assert_eq!(a.elements().count(), 4);
    }

    #[test]
    fn intersection_and_join() {
        let a = Subspace::span(4, [0b1000, 0b0100]).unwrap();
        let b = Subspace::span(4, [0b0100, 0b0010]).unwrap();
        assert_eq!(a.intersection(&b), Subspace::span(4, [0b0100]).unwrap());
        assert_eq!(a.join(&b).dim(), 3);
        let wide_a = Subspace::span(40, [1u64 << 39, 1 << 3]).unwrap();
        let wide_b = Subspace::span(40, [(1u64 << 39) ^ 1, 1 << 3]).unwrap();
        assert_eq!(
            wide_a.intersection(&wide_b),
            Subspace::span(40, [1 << 3]).unwrap()
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_subspaces(2, 2).unwrap().count(), 5);
        assert_eq!(enumerate_subspaces(4, 4).unwrap().count(), 67);
        let only: Vec<_> = enumerate_subspaces(1, 0).unwrap().collect();
        assert_eq!(only, vec![Subspace::zero(1).unwrap()]);
        assert!(matches!(
            enumerate_subspaces_capped(8, 8, 1000),
            Err(Error::DomainTooLarge(_))
        ));
    }

    #[test]
    fn matrix_text_round_trip() {
        let text = "# comment\n1 0 1\n\n0 1 1 # trailing\n";
        let m = BitMatrix::parse(text).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 3));
        assert_eq!(BitMatrix::parse(&m.to_text()).unwrap(), m);
        assert!(BitMatrix::parse("1 0\n1\n").is_err());
        assert!(BitMatrix::parse("1 2\n").is_err());
    }
}
