//! Truncated differential trails over the Feistel structure and the
//! single-trail differential and linear bounds derived from them.
//!
//! A state is a pair of brick-activity patterns `(L, R)`, brick 1 in the most
//! significant bit. One round maps `(L, R)` to `(R, X)`:
//!
//! * if `R = 0` the F-function sees no difference and `X = L`;
//! * otherwise `popcount(R)` S-boxes are active, the F-output pattern `P` is
//!   any non-zero subset of a candidate set `C`, and `X` is any pattern
//!   compatible with `L ⊕ P`: a brick of `X` may be inactive only where `L`
//!   and `P` agree.
//!
//! `C` is every brick in the coarse model and the bricks reachable from `R`
//! through `λ` in the refined one. Both over-approximate the real trails, so
//! their minima are lower bounds on active S-boxes.

use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf2::mask;
use crate::wave::WaveSpec;

/// Upper limit on `4^b · (rounds + 1)` table entries for the trail search.
pub const MAX_TABLE_ENTRIES: u64 = 1 << 26;

/// Largest `n` accepted by [`exhaustive_trail_check`].
pub const EXHAUSTIVE_MAX_BITS: usize = 10;

/// Largest round count accepted by [`exhaustive_trail_check`].
pub const EXHAUSTIVE_MAX_ROUNDS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Any non-zero F-output pattern.
    Coarse,
    /// F-output patterns restricted to the bricks `λ` connects to the active inputs.
    Refined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TruncatedState {
    pub left: u32,
    pub right: u32,
}

impl TruncatedState {
    pub fn render(&self, bricks: usize) -> String {
        format!(
            "L:{:0b$b} R:{:0b$b}",
            self.left,
            self.right,
            b = bricks
        )
    }
}

/// Transition structure of the truncated model for a fixed layout.
struct TrailModel {
    /// `C` for every right pattern `R`.
    candidates: Vec<u32>,
}

impl TrailModel {
    fn new(spec: &WaveSpec, model: Model) -> Self {
        let b = spec.layout().bricks;
        let all = mask(b) as u32;
        let candidates = match model {
            Model::Coarse => vec![all; 1 << b],
            Model::Refined => {
                let conn = spec.lambda().connectivity_masks();
                (0u32..1 << b)
                    .map(|r| {
                        (0..b)
                            .filter(|&j| r >> (b - 1 - j) & 1 == 1)
                            .fold(0, |acc, j| acc | conn[j])
                    })
                    .collect()
            }
        };
        Self { candidates }
    }

    fn allows(&self, from: TruncatedState, to: TruncatedState) -> bool {
        if to.left != from.right {
            return false;
        }
        if from.right == 0 {
            return to.right == from.left;
        }
        let c = self.candidates[from.right as usize];
        if c == 0 {
            return false;
        }
        if to.right & !c != from.left & !c {
            return false;
        }
        from.left & c != 0 || to.right & c != 0
    }

    /// Every state reachable from `from` in one round, ascending by right pattern.
    fn successors(&self, from: TruncatedState) -> impl Iterator<Item = TruncatedState> + '_ {
        let (l, r) = (from.left, from.right);
        let c = if r == 0 { 0 } else { self.candidates[r as usize] };
        let fixed = if r == 0 { l } else { l & !c };
        let need_active = r != 0 && l & c == 0;
        // submasks of `c`, ascending
        let mut sub = Some(0u32);
        std::iter::from_fn(move || {
            let y = sub?;
            sub = if y == c { None } else { Some(((y | !c).wrapping_add(1)) & c) };
            Some(y)
        })
        .filter(move |&y| !(need_active && y == 0) && (r != 0 || y == 0))
        .filter(move |_| r == 0 || c != 0)
        .map(move |y| TruncatedState { left: r, right: fixed | y })
    }
}

/// Minimum active S-boxes over `rounds` rounds together with a witness trail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveSboxes {
    pub rounds: usize,
    pub model: Model,
    pub min_active: usize,
    /// `rounds + 1` states, the first being the input difference pattern.
    pub trail: Vec<TruncatedState>,
    /// Active S-boxes in each round of the witness.
    pub per_round: Vec<usize>,
}

impl ActiveSboxes {
    /// Rows of `L:… R:…` masks for the witness.
    pub fn rendered_trail(&self, bricks: usize) -> Vec<String> {
        self.trail.iter().map(|s| s.render(bricks)).collect()
    }

    /// The witness's per-round activity, e.g. `1-0-1`.
    pub fn pattern(&self) -> String {
        self.per_round
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join("-")
    }
}

fn check_table_size(bricks: usize, rounds: usize) -> Result<()> {
    let entries = (1u64 << (2 * bricks).min(63)).saturating_mul(rounds as u64 + 1);
    if bricks > 13 || entries > MAX_TABLE_ENTRIES {
        return Err(Error::DomainTooLarge(format!(
            "trail search over {bricks} bricks and {rounds} rounds needs {entries} table entries"
        )));
    }
    Ok(())
}

/// Minimum number of active S-boxes over all non-zero `rounds`-round
/// truncated trails.
///
/// A backward pass fills `best[k][state]`, the cheapest continuation of `k`
/// rounds from `state`; each round costs `O(4^b)` because the successors of
/// `(L, R)` only depend on `L` outside `C`. Among optimal trails the witness
/// prefers an active first round, then the lexicographically smallest
/// per-round activity, then the smallest state sequence.
pub fn min_active_sboxes(spec: &WaveSpec, rounds: usize, model: Model) -> Result<ActiveSboxes> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    let b = spec.layout().bricks;
    check_table_size(b, rounds)?;
    let tm = TrailModel::new(spec, model);
    let size = 1usize << b;
    let idx = |l: u32, r: u32| (l as usize) << b | r as usize;

    let mut best: Vec<Vec<u32>> = vec![vec![0; size * size]];
    for _ in 0..rounds {
        let prev = best.last().expect("seeded with round 0");
        let next: Vec<u32> = (0..size)
            .into_par_iter()
            .flat_map_iter(|r| {
                let r = r as u32;
                let cost = r.count_ones();
                if r == 0 {
                    // (L, 0) -> (0, L) at no cost
                    return (0..size as u32).map(|l| prev[idx(0, l)]).collect::<Vec<_>>();
                }
                let c = tm.candidates[r as usize];
                let outside = !c & mask(b) as u32;
                let mut any = vec![u32::MAX; size];
                let mut nonzero = vec![u32::MAX; size];
                for x in 0..size as u32 {
                    let v = prev[idx(r, x)];
                    let key = (x & outside) as usize;
                    any[key] = any[key].min(v);
                    if x & c != 0 {
                        nonzero[key] = nonzero[key].min(v);
                    }
                }
                (0..size as u32)
                    .map(|l| {
                        let key = (l & outside) as usize;
                        let tail = if l & c != 0 { any[key] } else { nonzero[key] };
                        tail.saturating_add(cost)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        // flat_map_iter yields entries ordered by (R, L); transpose to (L, R)
        let mut table = vec![0u32; size * size];
        for r in 0..size {
            for l in 0..size {
                table[idx(l as u32, r as u32)] = next[r * size + l];
            }
        }
        best.push(table);
    }

    let last = &best[rounds];
    let min_active = (1..size * size).map(|s| last[s]).min().expect("non-zero states exist");
    let optimal_starts: Vec<usize> = (1..size * size).filter(|&s| last[s] == min_active).collect();
    let active_first: Vec<usize> = optimal_starts.iter().copied().filter(|&s| s & (size - 1) != 0).collect();
    let starts = if active_first.is_empty() { optimal_starts } else { active_first };

    // Forward pass over optimal trails, keeping at each round only the states
    // whose right half has the fewest active bricks: this fixes the
    // lexicographically smallest activity pattern.
    let state_of = |s: usize| TruncatedState {
        left: (s >> b) as u32,
        right: (s & (size - 1)) as u32,
    };
    let cheapest = |states: Vec<usize>| -> Vec<usize> {
        let low = states.iter().map(|&s| (s & (size - 1)).count_ones()).min().unwrap_or(0);
        states.into_iter().filter(|&s| (s & (size - 1)).count_ones() == low).collect()
    };
    let mut levels = vec![cheapest(starts)];
    for k in (1..rounds).rev() {
        let mut seen = vec![false; size * size];
        let mut next = Vec::new();
        for &s in levels.last().expect("non-empty") {
            let st = state_of(s);
            let want = best[k + 1][s] - st.right.count_ones();
            for t in tm.successors(st) {
                let ti = idx(t.left, t.right);
                if best[k][ti] == want && !std::mem::replace(&mut seen[ti], true) {
                    next.push(ti);
                }
            }
        }
        next.sort_unstable();
        levels.push(cheapest(next));
    }
    // Keep only states that continue to the next level, then walk forward
    // taking the smallest state each time.
    let mut alive: Vec<Vec<bool>> = levels.iter().map(|_| vec![false; size * size]).collect();
    for &s in levels.last().expect("non-empty") {
        alive[rounds - 1][s] = true;
    }
    for k in (0..rounds - 1).rev() {
        for &s in &levels[k] {
            let ok = tm
                .successors(state_of(s))
                .any(|t| alive[k + 1][idx(t.left, t.right)]);
            alive[k][s] = ok;
        }
    }
    let first = *levels[0].iter().find(|&&s| alive[0][s]).expect("an optimal trail exists");
    let mut state = state_of(first);
    let mut trail = vec![state];
    let mut per_round = Vec::with_capacity(rounds);
    for k in 0..rounds {
        per_round.push(state.right.count_ones() as usize);
        let next = if k + 1 < rounds {
            tm.successors(state)
                .filter(|t| alive[k + 1][idx(t.left, t.right)])
                .min_by_key(|t| idx(t.left, t.right))
                .expect("live successor")
        } else {
            tm.successors(state).min_by_key(|t| idx(t.left, t.right)).expect("successor")
        };
        trail.push(next);
        state = next;
    }
    let min_active = min_active as usize;
    debug_assert_eq!(per_round.iter().sum::<usize>(), min_active);
    Ok(ActiveSboxes {
        rounds,
        model,
        min_active,
        trail,
        per_round,
    })
}

/// Exact rational with a lossless `2^x` rendering.
fn ser_ratio<S: Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_ratio(r))
}

fn ser_opt_ratio<S: Serializer>(r: &Option<Ratio<i64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&fmt_ratio(r)),
        None => s.serialize_none(),
    }
}

pub fn fmt_ratio(r: &Ratio<i64>) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact `log2` of a positive dyadic rational `p/q`.
pub fn log2_dyadic(value: Ratio<u64>) -> Result<Ratio<i64>> {
    let (n, d) = (*value.numer(), *value.denom());
    if n == 0 || !n.is_power_of_two() || !d.is_power_of_two() {
        return Err(Error::NonDyadic(format!("{n}/{d}")));
    }
    Ok(Ratio::from_integer(
        n.trailing_zeros() as i64 - d.trailing_zeros() as i64,
    ))
}

/// Single-trail bounds for one round count. Every value is exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundLedger {
    pub rounds: usize,
    pub model: Model,
    pub min_active_sboxes: usize,
    pub trail: Vec<String>,
    pub activity_pattern: String,
    /// Worst DDT entry over `2^s` across all S-boxes.
    pub max_diff_prob: String,
    #[serde(serialize_with = "ser_ratio")]
    pub diff_prob_log2: Ratio<i64>,
    pub max_bias: Option<String>,
    /// Active S-boxes in any three consecutive rounds, when a linear bound was computed.
    pub active_per_three_rounds: Option<usize>,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub bias_log2: Option<Ratio<i64>>,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub data_complexity_log2: Option<Ratio<i64>>,
    pub note: &'static str,
}

const SINGLE_TRAIL_NOTE: &str = "single-trail bound";

impl fmt::Display for BoundLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rounds: {} ({:?} model, {})", self.rounds, self.model, self.note)?;
        writeln!(f, "min active S-boxes: {}", self.min_active_sboxes)?;
        writeln!(f, "witness pattern: {}", self.activity_pattern)?;
        for row in &self.trail {
            writeln!(f, "  {row}")?;
        }
        writeln!(f, "max differential probability per S-box: {}", self.max_diff_prob)?;
        writeln!(f, "differential trail probability: 2^{}", fmt_ratio(&self.diff_prob_log2))?;
        if let (Some(mb), Some(a3), Some(bias), Some(data)) = (
            &self.max_bias,
            self.active_per_three_rounds,
            &self.bias_log2,
            &self.data_complexity_log2,
        ) {
            writeln!(f, "max linear bias per S-box: {mb}")?;
            writeln!(f, "active S-boxes per 3 rounds: {a3}")?;
            writeln!(f, "linear trail bias: 2^{}", fmt_ratio(bias))?;
            writeln!(f, "data complexity: 2^{} known plaintexts", fmt_ratio(data))?;
        }
        Ok(())
    }
}

fn max_diff_prob(spec: &WaveSpec) -> Ratio<u64> {
    let du = spec
        .sboxes()
        .iter()
        .map(|s| s.differential_uniformity())
        .max()
        .unwrap_or(0);
    Ratio::new(du as u64, 1 << spec.layout().s)
}

fn max_bias(spec: &WaveSpec) -> Result<Ratio<u64>> {
    let mut best = Ratio::from_integer(0);
    for s in spec.sboxes() {
        best = best.max(s.max_bias()?);
    }
    Ok(best)
}

/// `log2 p ≤ A_r · log2(maxDDT / 2^s)`.
pub fn differential_bound(spec: &WaveSpec, rounds: usize, model: Model) -> Result<BoundLedger> {
    let active = min_active_sboxes(spec, rounds, model)?;
    let p = max_diff_prob(spec);
    let diff_prob_log2 = log2_dyadic(p)? * active.min_active as i64;
    Ok(BoundLedger {
        rounds,
        model,
        min_active_sboxes: active.min_active,
        trail: active.rendered_trail(spec.layout().bricks),
        activity_pattern: active.pattern(),
        max_diff_prob: format!("{p}"),
        diff_prob_log2,
        max_bias: None,
        active_per_three_rounds: None,
        bias_log2: None,
        data_complexity_log2: None,
        note: SINGLE_TRAIL_NOTE,
    })
}

/// Piling-up composition in blocks of three rounds: `e₃ = 2^(A₃−1)·β^A₃` and,
/// for `r = 3q`, `log2 e_r = (q−1) + q·log2 e₃`. Includes the differential figures.
pub fn linear_bound(spec: &WaveSpec, rounds: usize, model: Model) -> Result<BoundLedger> {
    if rounds == 0 || !rounds.is_multiple_of(3) {
        return Err(Error::RoundsNotMultipleOfThree(rounds));
    }
    let q = (rounds / 3) as i64;
    let a3 = min_active_sboxes(spec, 3, model)?.min_active as i64;
    let beta = max_bias(spec)?;
    let e3_log2 = Ratio::from_integer(a3 - 1) + log2_dyadic(beta)? * a3;
    let bias_log2 = Ratio::from_integer(q - 1) + e3_log2 * q;
    let mut ledger = differential_bound(spec, rounds, model)?;
    ledger.max_bias = Some(format!("{beta}"));
    ledger.active_per_three_rounds = Some(a3 as usize);
    ledger.bias_log2 = Some(bias_log2);
    ledger.data_complexity_log2 = Some(bias_log2 * -2);
    Ok(ledger)
}

/// A concrete difference step `(ΔL, ΔR, ΔF)`.
type Transition = (u64, u64, u64);

/// Result of comparing the truncated model with every concrete difference trail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrailAudit {
    pub rounds: usize,
    pub model: Model,
    pub model_min: usize,
    pub true_min: usize,
    /// Concrete one-round transitions whose activity pattern the model allows.
    pub transitions_checked: u64,
    /// A concrete transition the model does not allow, as hex `(ΔL, ΔR, ΔF)`.
    pub unmodeled_transition: Option<(String, String, String)>,
    pub sound: bool,
}

/// Audits the truncated model against every concrete difference trail.
///
/// Round keys are taken independent and uniform, so a difference trail is
/// realizable exactly when each step `ΔR → ΔF` occurs in the derivative of
/// `ρ` at `ΔR`. The true minimum is found by a dynamic program over the
/// `2^(2n)` difference pairs.
pub fn exhaustive_trail_check(spec: &WaveSpec, rounds: usize, model: Model) -> Result<TrailAudit> {
    let l = spec.layout();
    let n = l.n();
    if n > EXHAUSTIVE_MAX_BITS || rounds == 0 || rounds > EXHAUSTIVE_MAX_ROUNDS {
        return Err(Error::DomainTooLarge(format!(
            "exhaustive trail check needs n <= {EXHAUSTIVE_MAX_BITS} and 1 <= rounds <= {EXHAUSTIVE_MAX_ROUNDS}, got n={n}, rounds={rounds}"
        )));
    }
    let size = 1usize << n;
    let derivatives: Vec<Vec<u64>> = (0..size as u64)
        .into_par_iter()
        .map(|d| {
            let mut seen = vec![false; size];
            for x in 0..size as u64 {
                seen[(spec.rho(x) ^ spec.rho(x ^ d)) as usize] = true;
            }
            (0..size as u64).filter(|&v| seen[v as usize]).collect()
        })
        .collect();

    let tm = TrailModel::new(spec, model);
    let pattern = |v: u64| l.v_pattern(v);
    let checked: Vec<(u64, Option<Transition>)> = (0..size as u64)
        .into_par_iter()
        .map(|dl| {
            let mut count = 0u64;
            for dr in 0..size as u64 {
                if dl == 0 && dr == 0 {
                    continue;
                }
                for &df in &derivatives[dr as usize] {
                    let from = TruncatedState {
                        left: pattern(dl),
                        right: pattern(dr),
                    };
                    let to = TruncatedState {
                        left: pattern(dr),
                        right: pattern(dl ^ df),
                    };
                    if !tm.allows(from, to) {
                        return (count, Some((dl, dr, df)));
                    }
                    count += 1;
                }
            }
            (count, None)
        })
        .collect();
    let transitions_checked = checked.iter().map(|c| c.0).sum();
    let unmodeled = checked.iter().find_map(|c| c.1);

    // best[(ΔL, ΔR)] over k remaining rounds
    let idx = |a: u64, b: u64| (a as usize) << n | b as usize;
    let mut best = vec![0u32; size * size];
    for _ in 0..rounds {
        best = (0..size * size)
            .into_par_iter()
            .map(|s| {
                let (dl, dr) = ((s >> n) as u64, (s & (size - 1)) as u64);
                let cost = l.v_weight(dr) as u32;
                derivatives[dr as usize]
                    .iter()
                    .map(|&df| best[idx(dr, dl ^ df)])
                    .min()
                    .unwrap_or(u32::MAX)
                    .saturating_add(cost)
            })
            .collect();
    }
    let true_min = best[1..].iter().copied().min().expect("non-zero states exist") as usize;
    let model_min = min_active_sboxes(spec, rounds, model)?.min_active;
    let hex = |v: u64| format!("0x{v:X}");
    Ok(TrailAudit {
        rounds,
        model,
        model_min,
        true_min,
        transitions_checked,
        unmodeled_transition: unmodeled.map(|(a, b, c)| (hex(a), hex(b), hex(c))),
        sound: unmodeled.is_none() && model_min <= true_min,
    })
}
