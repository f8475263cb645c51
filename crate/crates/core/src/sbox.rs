//! Lookup-table S-boxes with `s` input and `t ≥ s` output bits, and their
//! differential and linear statistics.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{enumerate_subspaces, mask, BitVector, Subspace};

/// Largest table this module will build a DDT or LAT for: `2^(s+t)` cells.
const MAX_TABLE_BITS: usize = 24;

/// Enumeration guards for the non-invariance check.
pub const NON_INVARIANCE_MAX_S: usize = 6;
pub const NON_INVARIANCE_MAX_T: usize = 7;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SBoxTable {
    s: usize,
    t: usize,
    table: Vec<u64>,
}

impl SBoxTable {
    pub fn new(s: usize, t: usize, table: Vec<u64>) -> Result<Self> {
        if s == 0 || s > 16 {
            return Err(Error::InvalidArgument(format!("S-box input width {s} not in 1..=16")));
        }
        if t < s || t > 32 {
            return Err(Error::InvalidArgument(format!(
                "S-box output width {t} not in {s}..=32"
            )));
        }
        if table.len() != 1 << s {
            return Err(Error::DimensionMismatch(format!(
                "S-box with s={s} needs {} entries, got {}",
                1 << s,
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&y| y & !mask(t) != 0) {
            return Err(Error::ValueTooWide { value: bad, width: t });
        }
        Ok(Self { s, t, table })
    }

    pub fn identity(s: usize) -> Result<Self> {
        Self::new(s, s, (0..1u64 << s).collect())
    }

    pub fn in_bits(&self) -> usize {
        self.s
    }

    pub fn out_bits(&self) -> usize {
        self.t
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    pub fn apply_vector(&self, x: &BitVector) -> Result<BitVector> {
        if x.width() != self.s {
            return Err(Error::DimensionMismatch(format!(
                "input width {} for S-box with s={}",
                x.width(),
                self.s
            )));
        }
        BitVector::new(self.t, self.apply(x.value()))
    }

    /// Whether `0 ↦ 0`.
    pub fn is_normalized(&self) -> bool {
        self.table[0] == 0
    }

    /// First colliding input pair, if any.
    pub fn collision(&self) -> Option<(u64, u64)> {
        let mut seen = std::collections::HashMap::with_capacity(self.table.len());
        for (x, &y) in self.table.iter().enumerate() {
            if let Some(&prev) = seen.get(&y) {
                return Some((prev, x as u64));
            }
            seen.insert(y, x as u64);
        }
        None
    }

    pub fn is_injective(&self) -> bool {
        self.collision().is_none()
    }

    fn check_table_size(&self) -> Result<()> {
        if self.s + self.t > MAX_TABLE_BITS {
            return Err(Error::DomainTooLarge(format!(
                "{}x{} S-box tables have 2^{} cells",
                self.s,
                self.t,
                self.s + self.t
            )));
        }
        Ok(())
    }

    /// Difference distribution table: `entries[u][v] = #{x : f(x) ⊕ f(x⊕u) = v}`.
    pub fn ddt(&self) -> Result<DDTable> {
        self.check_table_size()?;
        let cols = 1usize << self.t;
        let rows: Vec<Vec<u32>> = (0..1u64 << self.s)
            .into_par_iter()
            .map(|u| {
                let mut row = vec![0u32; cols];
                for x in 0..1u64 << self.s {
                    row[(self.apply(x) ^ self.apply(x ^ u)) as usize] += 1;
                }
                row
            })
            .collect();
        Ok(DDTable {
            s: self.s,
            t: self.t,
            entries: rows.concat(),
        })
    }

    /// Maximum DDT entry over non-zero input differences.
    pub fn differential_uniformity(&self) -> u32 {
        (1..1u64 << self.s)
            .map(|u| {
                let mut counts = std::collections::HashMap::new();
                let mut best = 0;
                for x in 0..1u64 << self.s {
                    let c = counts.entry(self.apply(x) ^ self.apply(x ^ u)).or_insert(0u32);
                    *c += 1;
                    best = best.max(*c);
                }
                best
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_apn(&self) -> bool {
        self.differential_uniformity() == 2
    }

    /// Image of the derivative `x ↦ f(x) ⊕ f(x⊕u)`.
    pub fn derivative_image(&self, u: u64) -> BTreeSet<u64> {
        assert!(u < 1 << self.s);
        (0..1u64 << self.s)
            .map(|x| self.apply(x) ^ self.apply(x ^ u))
            .collect()
    }

    pub fn derivative_image_size(&self, u: u64) -> usize {
        self.derivative_image(u).len()
    }

    /// Weak δ-differential uniformity: `|Im D_u| > 2^(s-1)/δ` for every `u ≠ 0`.
    pub fn is_weakly_delta_du(&self, delta: u32) -> Result<bool> {
        if delta == 0 {
            return Err(Error::InvalidArgument("delta must be at least 1".into()));
        }
        let half = 1u64 << (self.s - 1);
        Ok((1..1u64 << self.s).all(|u| self.derivative_image_size(u) as u64 * delta as u64 > half))
    }

    /// `{f(x) ⊕ f(y)}` over all input pairs.
    pub fn image_sum_set(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for &a in &self.table {
            for &b in &self.table {
                out.insert(a ^ b);
            }
        }
        out
    }

    /// Vectors of `(F₂)^t` absent from [`Self::image_sum_set`].
    pub fn missing_sums(&self) -> Vec<u64> {
        let sums = self.image_sum_set();
        (0..1u64 << self.t).filter(|v| !sums.contains(v)).collect()
    }

    /// Linear approximation table, `c(a,b) = #{x : a·x = b·f(x)} − 2^(s−1)`.
    pub fn lat(&self) -> Result<LATable> {
        self.check_table_size()?;
        let half = 1i32 << (self.s - 1);
        let rows: Vec<Vec<i32>> = (0..1u64 << self.s)
            .into_par_iter()
            .map(|a| {
                (0..1u64 << self.t)
                    .map(|b| {
                        let agree = (0..1u64 << self.s)
                            .filter(|&x| {
                                (a & x).count_ones() & 1 == (b & self.apply(x)).count_ones() & 1
                            })
                            .count() as i32;
                        agree - half
                    })
                    .collect()
            })
            .collect();
        Ok(LATable {
            s: self.s,
            t: self.t,
            entries: rows.concat(),
        })
    }

    /// `max |c(a,b)| / 2^s` over input masks `a ≠ 0` and output masks `b ≠ 0`.
    ///
    /// A non-surjective S-box has biased approximations with `a = 0`: some
    /// `b·f(x)` is far from balanced. They are left out, as an S-box with a
    /// zero input mask is not active in a trail.
    pub fn max_bias(&self) -> Result<Ratio<u64>> {
        Ok(self.lat()?.max_bias())
    }

    fn check_non_invariance_args(&self, kernel_brick: &Subspace, delta: usize) -> Result<()> {
        if self.s > NON_INVARIANCE_MAX_S || self.t > NON_INVARIANCE_MAX_T {
            return Err(Error::DomainTooLarge(format!(
                "non-invariance enumeration limited to s <= {NON_INVARIANCE_MAX_S}, t <= {NON_INVARIANCE_MAX_T}"
            )));
        }
        if kernel_brick.width() != self.t {
            return Err(Error::DimensionMismatch(format!(
                "kernel brick of width {} for S-box with t={}",
                kernel_brick.width(),
                self.t
            )));
        }
        if delta >= self.s {
            return Err(Error::InvalidArgument(format!(
                "delta {delta} must be below s={}",
                self.s
            )));
        }
        if let Some((a, b)) = self.collision() {
            return Err(Error::NotInjective(a, b));
        }
        if !self.is_normalized() {
            return Err(Error::NotNormalized(self.table[0]));
        }
        Ok(())
    }

    /// First proper pair `(V', W')` with `V'f + K = W'` as point sets and
    /// `dim W' ≥ s − δ`, or `None` when the S-box is δ-non-invariant.
    ///
    /// `W'` is determined by `V'`, so only `V'` is enumerated: the sum set is
    /// materialized and kept when it is closed under addition.
    pub fn non_invariance_violation(
        &self,
        kernel_brick: &Subspace,
        delta: usize,
    ) -> Result<Option<(Subspace, Subspace)>> {
        self.check_non_invariance_args(kernel_brick, delta)?;
        let kernel: Vec<u64> = kernel_brick.elements().collect();
        let mut seen = vec![false; 1 << self.t];
        for v_sub in enumerate_subspaces(self.s, self.s - 1)? {
            seen.iter_mut().for_each(|b| *b = false);
            let mut points = Vec::new();
            for v in v_sub.elements() {
                let y = self.apply(v);
                for &k in &kernel {
                    let p = (y ^ k) as usize;
                    if !seen[p] {
                        seen[p] = true;
                        points.push(p as u64);
                    }
                }
            }
            let span = Subspace::span(self.t, points.iter().copied())?;
            if span.size() != points.len() as u128 || span.is_full() {
                continue;
            }
            if span.dim() + delta >= self.s {
                return Ok(Some((v_sub, span)));
            }
        }
        Ok(None)
    }

    /// δ-non-invariance with respect to a kernel brick `K = Ker λ ∩ W_j`.
    pub fn is_delta_non_invariant(&self, kernel_brick: &Subspace, delta: usize) -> Result<bool> {
        Ok(self.non_invariance_violation(kernel_brick, delta)?.is_none())
    }

    /// Parses `sbox s=<s> t=<t>` followed by `2^s` hex outputs.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header = None;
        let mut values = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if header.is_none() {
                header = Some(parse_header(line).map_err(|msg| Error::Parse {
                    line: lineno + 1,
                    msg,
                })?);
                continue;
            }
            for tok in line.split_whitespace() {
                let digits = tok
                    .strip_prefix("0x")
                    .or_else(|| tok.strip_prefix("0X"))
                    .unwrap_or(tok);
                let v = u64::from_str_radix(digits, 16).map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad hex value {tok:?}: {e}"),
                })?;
                values.push(v);
            }
        }
        let (s, t) = header.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing `sbox s=<s> t=<t>` header".into(),
        })?;
        Self::new(s, t, values)
    }

    pub fn to_text(&self) -> String {
        let digits = self.t.div_ceil(4);
        let mut out = format!("sbox s={} t={}\n", self.s, self.t);
        for chunk in self.table.chunks(8) {
            let line: Vec<String> = chunk.iter().map(|v| format!("0x{v:0digits$X}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

fn parse_header(line: &str) -> std::result::Result<(usize, usize), String> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("sbox") {
        return Err(format!("expected `sbox s=<s> t=<t>`, got {line:?}"));
    }
    let mut s = None;
    let mut t = None;
    for p in parts {
        let (key, val) = p
            .split_once('=')
            .ok_or_else(|| format!("bad header field {p:?}"))?;
        let val: usize = val.parse().map_err(|_| format!("bad number in {p:?}"))?;
        match key {
            "s" => s = Some(val),
            "t" => t = Some(val),
            _ => return Err(format!("unknown header field {key:?}")),
        }
    }
    match (s, t) {
        (Some(s), Some(t)) => Ok((s, t)),
        _ => Err("header needs both s= and t=".into()),
    }
}

impl fmt::Debug for SBoxTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SBoxTable({}x{}, {:X?})", self.s, self.t, self.table)
    }
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DDTable {
    s: usize,
    t: usize,
    entries: Vec<u32>,
}

impl DDTable {
    pub fn get(&self, u: u64, v: u64) -> u32 {
        self.entries[((u as usize) << self.t) | v as usize]
    }

    pub fn row(&self, u: u64) -> &[u32] {
        let w = 1usize << self.t;
        &self.entries[u as usize * w..(u as usize + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.entries.chunks(1 << self.t)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.s, self.t)
    }

    pub fn differential_uniformity(&self) -> u32 {
        self.rows().skip(1).flat_map(|r| r.iter().copied()).max().unwrap_or(0)
    }

    /// Renders with `.` for zero cells, one row per input difference.
    pub fn to_text(&self) -> String {
        let in_digits = self.s.div_ceil(4);
        let mut out = String::new();
        for (u, row) in self.rows().enumerate() {
            out.push_str(&format!("0x{u:0in_digits$X} |"));
            for &c in row {
                if c == 0 {
                    out.push_str("  .");
                } else {
                    out.push_str(&format!("{c:>3}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for DDTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DDTable {}x{}\n{}", self.s, self.t, self.to_text())
    }
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LATable {
    s: usize,
    t: usize,
    entries: Vec<i32>,
}

impl LATable {
    pub fn get(&self, a: u64, b: u64) -> i32 {
        self.entries[((a as usize) << self.t) | b as usize]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i32]> {
        self.entries.chunks(1 << self.t)
    }

    pub fn max_bias(&self) -> Ratio<u64> {
        let w = 1usize << self.t;
        let best = self
            .entries
            .iter()
            .enumerate()
            .filter(|(i, _)| i % w != 0 && *i >= w)
            .map(|(_, c)| c.unsigned_abs() as u64)
            .max()
            .unwrap_or(0);
        Ratio::new(best, 1u64 << self.s)
    }
}

impl fmt::Debug for LATable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LATable {}x{}", self.s, self.t)
    }
}
