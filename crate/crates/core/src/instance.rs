//! The 64-bit reference wave cipher: eight copies of a 4×5 APN S-box and a
//! 40×32 compressing layer, loaded from the bundled data files and certified
//! before use.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::diffusion::{yes_no, DiffusionLayer, LayerReport, DEFAULT_BRANCH_CAP};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, Subspace};
use crate::groups::{verify_sufficient_conditions, SufficientConditionsReport};
use crate::sbox::SBoxTable;
use crate::trails::{differential_bound, linear_bound, BoundLedger, Model};
use crate::wave::{BijectivityCertificate, CertificatePath, WaveSpec};

pub const SBOX_FILE: &str = include_str!("../data/gamma1.sbox");
pub const LAMBDA_FILE: &str = include_str!("../data/lambda40x32.mat");
/// Reference difference distribution table of the S-box.
pub const DDT_FILE: &str = include_str!("../data/gamma1.ddt");
/// 48-round known-answer vectors produced by an independent implementation.
pub const KAT_FILE: &str = include_str!("../data/kats_r48.txt");

pub const SBOX_SHA256: &str = "83e3da1f08e8a14bc20975ed8c950dad47e70c2a5720342b8325be22ba011c3b";
pub const LAMBDA_SHA256: &str = "6354a2f37a37bbbb0e5ab13f496228e97dc1a4c7f63a2eb6022b3f5d95806aa5";

pub const BRICKS: usize = 8;
pub const SBOX_IN: usize = 4;
pub const SBOX_OUT: usize = 5;
pub const DEFAULT_ROUNDS: usize = 48;
/// The one non-zero vector of `(F₂)^5` that is not a sum of two S-box outputs,
/// and the generator of every kernel brick.
pub const MISSING_SUM: u64 = 0x11;
/// Number of walls of an 8-brick layout: proper non-empty brick subsets.
pub const WALLS: usize = (1 << BRICKS) - 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug)]
pub struct ReferenceInstance {
    spec: Arc<WaveSpec>,
    checks: Vec<Check>,
}

impl ReferenceInstance {
    pub fn spec(&self) -> &Arc<WaveSpec> {
        &self.spec
    }

    pub fn rounds(&self) -> usize {
        DEFAULT_ROUNDS
    }

    /// Every certification check, in the order run; all passed.
    pub fn checks(&self) -> &[Check] {
        &self.checks
    }
}

/// Builds the reference cipher from the bundled data files.
pub fn build_reference_instance() -> Result<ReferenceInstance> {
    build_from_text(SBOX_FILE, LAMBDA_FILE)
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Parses the reference DDT: 16 rows of 32 counts.
pub fn reference_ddt() -> Result<Vec<Vec<u32>>> {
    let mut rows = Vec::new();
    for (i, raw) in DDT_FILE.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("bad count {t:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != 1 << SBOX_OUT {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected {} counts, got {}", 1 << SBOX_OUT, row.len()),
            });
        }
        rows.push(row);
    }
    if rows.len() != 1 << SBOX_IN {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected {} rows, got {}", 1 << SBOX_IN, rows.len()),
        });
    }
    Ok(rows)
}

struct Certifier {
    checks: Vec<Check>,
}

impl Certifier {
    fn check(&mut self, name: &'static str, passed: bool, detail: String) -> Result<()> {
        self.checks.push(Check { name, passed, detail: detail.clone() });
        if passed {
            Ok(())
        } else {
            Err(Error::CertificationFailed(format!("{name}: {detail}")))
        }
    }
}

fn failed(what: &str, e: Error) -> Error {
    Error::CertificationFailed(format!("{what}: {e}"))
}

/// Builds and certifies the reference cipher from S-box and matrix texts.
///
/// Checks run in a fixed order and the first failure aborts with
/// [`Error::CertificationFailed`] naming it. The content checksums come last,
/// so a structural defect is reported as such rather than as a bad hash.
pub fn build_from_text(sbox_text: &str, lambda_text: &str) -> Result<ReferenceInstance> {
    certify(sbox_text, lambda_text).map_err(|e| match e {
        Error::CertificationFailed(_) => e,
        other => Error::CertificationFailed(other.to_string()),
    })
}

fn certify(sbox_text: &str, lambda_text: &str) -> Result<ReferenceInstance> {
    let mut c = Certifier { checks: Vec::new() };

    let sbox = SBoxTable::parse(sbox_text).map_err(|e| failed("S-box file", e))?;
    c.check(
        "S-box shape",
        sbox.in_bits() == SBOX_IN && sbox.out_bits() == SBOX_OUT,
        format!("{}x{}", sbox.in_bits(), sbox.out_bits()),
    )?;
    let ddt = sbox.ddt()?;
    let reference = reference_ddt()?;
    let mismatch = (0..1u64 << SBOX_IN)
        .flat_map(|u| (0..1u64 << SBOX_OUT).map(move |v| (u, v)))
        .find(|&(u, v)| ddt.get(u, v) != reference[u as usize][v as usize]);
    c.check(
        "DDT matches reference",
        mismatch.is_none(),
        match mismatch {
            None => "16x32 cells equal".into(),
            Some((u, v)) => format!(
                "DDT mismatch at ({u:#X}, {v:#04X}): {} vs reference {}",
                ddt.get(u, v),
                reference[u as usize][v as usize]
            ),
        },
    )?;
    c.check(
        "injective and normalized",
        sbox.is_injective() && sbox.is_normalized(),
        format!("injective {}, 0 -> {:#04X}", yes_no(sbox.is_injective()), sbox.apply(0)),
    )?;
    let du = sbox.differential_uniformity();
    c.check("APN", du == 2, format!("differential uniformity {du}"))?;
    let sums = sbox.image_sum_set();
    let missing = sbox.missing_sums();
    c.check(
        "sum set",
        sums.len() == 31 && missing == [MISSING_SUM],
        format!(
            "{} sums, missing {}",
            sums.len(),
            missing.iter().map(|m| format!("{m:#04X}")).collect::<Vec<_>>().join(", ")
        ),
    )?;

    let matrix = BitMatrix::parse(lambda_text).map_err(|e| failed("matrix file", e))?;
    let (n, m) = (BRICKS * SBOX_IN, BRICKS * SBOX_OUT);
    c.check(
        "matrix shape",
        matrix.rows() == m && matrix.cols() == n,
        format!("{}x{}", matrix.rows(), matrix.cols()),
    )?;
    let rank = matrix.rank();
    c.check("rank", rank == n, if rank == n { format!("rank {rank}") } else { format!("rank {rank} < {n}") })?;
    let bad_row = matrix.row_bits().iter().position(|r| r.count_ones() != 1);
    c.check(
        "one 1 per row",
        bad_row.is_none(),
        match bad_row {
            None => format!("{m} rows"),
            Some(i) => format!("row {i} has {} ones", matrix.row_bits()[i].count_ones()),
        },
    )?;
    let layout = crate::diffusion::BrickLayout::new(BRICKS, SBOX_IN, SBOX_OUT)?;
    let lambda = DiffusionLayer::new(layout, matrix)?;
    let kernel = lambda.kernel();
    let expected = Subspace::span(m, (0..BRICKS).map(|j| layout.place_w(MISSING_SUM, j)))?;
    c.check(
        "kernel is the span of 0x11 in every brick",
        kernel == expected,
        format!("kernel dim {}", kernel.dim()),
    )?;
    c.check("parallel kernel", lambda.is_parallel_kernel(), format!("{} bricks", BRICKS))?;
    let properness = lambda.properness()?;
    c.check(
        "proper",
        properness.proper && properness.walls_checked == WALLS,
        format!("{} walls checked", properness.walls_checked),
    )?;
    let branch = lambda.branch_number(DEFAULT_BRANCH_CAP)?;
    c.check(
        "branch number",
        branch.value == 2,
        format!(
            "{} (x = {}, x·λ = {})",
            branch.value,
            branch.witness.to_hex(),
            branch.image.to_hex()
        ),
    )?;

    let spec = Arc::new(WaveSpec::uniform(lambda, sbox)?);
    let cert = spec.certify()?;
    c.check(
        "rho bijective",
        cert.bijective && cert.path == CertificatePath::PerBrick,
        format!("{:?} path, bijective {}", cert.path, yes_no(cert.bijective)),
    )?;

    let sbox_hash = sha256_hex(sbox_text);
    c.check(
        "S-box checksum",
        sbox_hash == SBOX_SHA256,
        format!("sha256 {sbox_hash}"),
    )?;
    let lambda_hash = sha256_hex(lambda_text);
    c.check(
        "matrix checksum",
        lambda_hash == LAMBDA_SHA256,
        format!("sha256 {lambda_hash}"),
    )?;
    Ok(ReferenceInstance { spec, checks: c.checks })
}

/// A split of the S-boxes into two groups of four, with the wiring facts the
/// trail argument relies on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BrickGroups {
    /// 1-based S-box indices of each group.
    pub groups: [Vec<usize>; 2],
    /// Each S-box reads from two S-boxes of one group.
    pub inputs_from_one_group: bool,
    /// Each S-box writes to two S-boxes, one per group.
    pub outputs_to_both_groups: bool,
    /// S-boxes of different groups never write to the same S-box.
    pub groups_disjoint: bool,
    /// Every S-box writes to exactly two S-boxes.
    pub fan_out_two: bool,
}

/// Finds a grouping of S-boxes satisfying the three wiring properties, if one exists.
///
/// `conn[i][q]` says output brick `i` reaches input brick `q`.
pub fn brick_groups(conn: &[Vec<bool>]) -> Option<BrickGroups> {
    let b = conn.len();
    if b == 0 || b > 16 {
        return None;
    }
    let fan_out_two = conn.iter().all(|row| row.iter().filter(|&&c| c).count() == 2);
    let sources = |q: usize| (0..b).filter(move |&i| conn[i][q]);
    // group bit per brick; brick 0 is fixed in group 0
    (0..1u32 << (b - 1)).find_map(|bits| {
        let group = |j: usize| if j == 0 { 0 } else { (bits >> (j - 1)) & 1 };
        let inputs = (0..b).all(|q| {
            let src: Vec<usize> = sources(q).collect();
            src.len() == 2 && group(src[0]) == group(src[1])
        });
        let outputs = conn.iter().all(|row| {
            let dst: Vec<usize> = (0..b).filter(|&q| row[q]).collect();
            dst.len() == 2 && group(dst[0]) != group(dst[1])
        });
        let disjoint = (0..b).all(|q| {
            let mut g = sources(q).map(group);
            let first = g.next();
            g.all(|x| Some(x) == first)
        });
        (inputs && outputs && disjoint).then(|| BrickGroups {
            groups: [0, 1].map(|k| (0..b).filter(|&j| group(j) == k).map(|j| j + 1).collect()),
            inputs_from_one_group: inputs,
            outputs_to_both_groups: outputs,
            groups_disjoint: disjoint,
            fan_out_two,
        })
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SBoxSummary {
    pub s: usize,
    pub t: usize,
    pub table: Vec<String>,
    pub injective: bool,
    pub differential_uniformity: u32,
    pub apn: bool,
    pub max_bias: String,
    pub sum_set_size: usize,
    pub missing_sums: Vec<String>,
}

pub fn summarize_sbox(sbox: &SBoxTable) -> Result<SBoxSummary> {
    let du = sbox.differential_uniformity();
    let width = sbox.out_bits().div_ceil(4);
    Ok(SBoxSummary {
        s: sbox.in_bits(),
        t: sbox.out_bits(),
        table: sbox.table().iter().map(|v| format!("0x{v:0width$X}")).collect(),
        injective: sbox.is_injective(),
        differential_uniformity: du,
        apn: du == 2,
        max_bias: sbox.max_bias()?.to_string(),
        sum_set_size: sbox.image_sum_set().len(),
        missing_sums: sbox.missing_sums().iter().map(|v| format!("0x{v:0width$X}")).collect(),
    })
}

/// Everything the reference cipher's security argument rests on, recomputed.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub rounds: usize,
    pub checks: Vec<Check>,
    pub sbox: SBoxSummary,
    /// Difference distribution table: 16 input differences by 32 output differences.
    pub ddt: Vec<Vec<u32>>,
    pub layer: LayerReport,
    pub groups: Option<BrickGroups>,
    pub bijectivity: BijectivityCertificate,
    pub differential: Vec<BoundLedger>,
    pub linear: Vec<BoundLedger>,
    pub non_invariant_at_zero: bool,
    pub sufficient_conditions: SufficientConditionsReport,
}

/// Recomputes every figure of the reference design.
pub fn full_analysis_report(inst: &ReferenceInstance) -> Result<AnalysisReport> {
    let spec = inst.spec();
    let sbox = &spec.sboxes()[0];
    let ddt = sbox.ddt()?;
    let layer = spec.lambda().analyze(DEFAULT_BRANCH_CAP)?;
    let rounds = [3, inst.rounds()];
    let differential = rounds
        .iter()
        .map(|&r| differential_bound(spec, r, Model::Coarse))
        .collect::<Result<Vec<_>>>()?;
    let linear = rounds
        .iter()
        .map(|&r| linear_bound(spec, r, Model::Coarse))
        .collect::<Result<Vec<_>>>()?;
    let kernel_brick = spec.lambda().kernel_brick(0);
    Ok(AnalysisReport {
        rounds: inst.rounds(),
        checks: inst.checks().to_vec(),
        sbox: summarize_sbox(sbox)?,
        ddt: ddt.rows().map(<[u32]>::to_vec).collect(),
        groups: brick_groups(&layer.connectivity),
        layer,
        bijectivity: spec.certify()?,
        differential,
        linear,
        non_invariant_at_zero: sbox.is_delta_non_invariant(&kernel_brick, 0)?,
        sufficient_conditions: verify_sufficient_conditions(spec, 1)?,
    })
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== certification ==")?;
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail)?;
        }
        let s = &self.sbox;
        writeln!(f, "\n== S-box ({}x{}) ==", s.s, s.t)?;
        writeln!(f, "table: {}", s.table.join(" "))?;
        writeln!(f, "injective: {}", yes_no(s.injective))?;
        writeln!(f, "differential uniformity: {} (APN: {})", s.differential_uniformity, yes_no(s.apn))?;
        writeln!(f, "max bias: {}", s.max_bias)?;
        writeln!(f, "sum set: {} elements, missing {}", s.sum_set_size, s.missing_sums.join(", "))?;
        writeln!(f, "\n== difference distribution table ==")?;
        write!(f, "    ")?;
        for v in 0..self.ddt.first().map_or(0, Vec::len) {
            write!(f, "{v:>3X}")?;
        }
        writeln!(f)?;
        for (u, row) in self.ddt.iter().enumerate() {
            write!(f, "{u:>3X} ")?;
            for c in row {
                write!(f, "{c:>3}")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "\n== diffusion layer ==")?;
        write!(f, "{}", self.layer)?;
        match &self.groups {
            Some(g) => {
                writeln!(f, "S-box groups: {:?} and {:?}", g.groups[0], g.groups[1])?;
                writeln!(f, "  inputs of each S-box come from one group: {}", yes_no(g.inputs_from_one_group))?;
                writeln!(f, "  outputs of each S-box reach both groups: {}", yes_no(g.outputs_to_both_groups))?;
                writeln!(f, "  groups write to disjoint S-boxes: {}", yes_no(g.groups_disjoint))?;
                writeln!(f, "  every S-box feeds exactly two S-boxes: {}", yes_no(g.fan_out_two))?;
            }
            None => writeln!(f, "S-box groups: none satisfy the wiring properties")?,
        }
        writeln!(f, "\n== bijectivity ==")?;
        write!(f, "{}", self.bijectivity)?;
        writeln!(f, "\n== differential bounds ==")?;
        for l in &self.differential {
            writeln!(f, "{l}")?;
        }
        writeln!(f, "== linear bounds ==")?;
        for l in &self.linear {
            writeln!(f, "{l}")?;
        }
        writeln!(f, "== primitivity hypotheses ==")?;
        writeln!(f, "S-box 0-non-invariant w.r.t. span{{0x11}}: {}", yes_no(self.non_invariant_at_zero))?;
        write!(f, "{}", self.sufficient_conditions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_builds() {
        let inst = build_reference_instance().unwrap();
        assert!(inst.checks().iter().all(|c| c.passed));
        assert_eq!(inst.spec().width(), 32);
    }

    #[test]
    fn ddt_mutation_detected() {
        let bad = SBOX_FILE.replace("0x0E 0x07", "0x0E 0x06");
        assert_ne!(bad, SBOX_FILE);
        match build_from_text(&bad, LAMBDA_FILE) {
            Err(Error::CertificationFailed(msg)) => assert!(msg.contains("DDT mismatch"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zeroed_row_detected() {
        let mut lines: Vec<String> = LAMBDA_FILE.lines().map(String::from).collect();
        let second_row = lines
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
            .nth(1)
            .unwrap()
            .0;
        lines[second_row] = lines[second_row].replace('1', "0");
        let bad = lines.join("\n") + "\n";
        match build_from_text(SBOX_FILE, &bad) {
            Err(Error::CertificationFailed(msg)) => assert!(msg.contains("rank 31 < 32"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comment_edit_caught_by_checksum() {
        let bad = LAMBDA_FILE.replacen("compressing", "Compressing", 1);
        match build_from_text(SBOX_FILE, &bad) {
            Err(Error::CertificationFailed(msg)) => assert!(msg.starts_with("matrix checksum"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
