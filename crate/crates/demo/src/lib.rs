//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes plain strings or numbers and returns a JSON string,
//! either the result or `{"error": "..."}`, so the page needs no glue beyond
//! `JSON.parse`.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

use wavekit::instance::{build_reference_instance, summarize_sbox, SBoxSummary};
use wavekit::sbox::SBoxTable;
use wavekit::trails::{differential_bound, fmt_ratio, Model};
use wavekit::wave::FeistelCipher;

/// Rounds the trail curve will compute before refusing.
pub const MAX_CURVE_ROUNDS: usize = 96;

fn respond<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| json!({ "error": e.to_string() }).to_string()),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn parse_u64(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let digits = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u64::from_str_radix(digits, 16).map_err(|e| format!("{t:?} is not a 64-bit hex value: {e}"))
}

#[derive(Serialize)]
struct SBoxAnalysis {
    summary: SBoxSummary,
    ddt: Vec<Vec<u32>>,
}

fn analyze(text: &str) -> Result<SBoxAnalysis, String> {
    let sbox = SBoxTable::parse(text).map_err(|e| e.to_string())?;
    let summary = summarize_sbox(&sbox).map_err(|e| e.to_string())?;
    let ddt = sbox.ddt().map_err(|e| e.to_string())?;
    Ok(SBoxAnalysis {
        summary,
        ddt: ddt.rows().map(<[u32]>::to_vec).collect(),
    })
}

/// Summary and DDT of an S-box given in the `sbox s=.. t=..` file format.
#[wasm_bindgen]
pub fn analyze_sbox(text: &str) -> String {
    respond(analyze(text))
}

#[derive(Serialize)]
struct Trace {
    round_keys: Vec<String>,
    /// `(left, right)` halves before the first round and after each round.
    states: Vec<[String; 2]>,
    ciphertext: String,
    decrypts_to_plaintext: bool,
}

fn trace(master: &str, plaintext: &str, rounds: usize) -> Result<Trace, String> {
    let inst = build_reference_instance().map_err(|e| e.to_string())?;
    let cipher = FeistelCipher::with_test_only_keys(inst.spec().clone(), parse_u64(master)?, rounds)
        .map_err(|e| e.to_string())?;
    let pt = parse_u64(plaintext)?;
    let states = cipher.encrypt_trace((pt >> 32, pt & 0xFFFF_FFFF));
    let ct = cipher.encrypt_block(pt).map_err(|e| e.to_string())?;
    Ok(Trace {
        round_keys: cipher.round_keys().iter().map(|k| format!("0x{k:08X}")).collect(),
        states: states
            .iter()
            .map(|(l, r)| [format!("0x{l:08X}"), format!("0x{r:08X}")])
            .collect(),
        ciphertext: format!("0x{ct:016X}"),
        decrypts_to_plaintext: cipher.decrypt_block(ct).map_err(|e| e.to_string())? == pt,
    })
}

/// Round-by-round encryption of one block under the reference instance,
/// with TEST-ONLY round keys derived from `master`.
#[wasm_bindgen]
pub fn encrypt_trace(master: &str, plaintext: &str, rounds: usize) -> String {
    respond(trace(master, plaintext, rounds))
}

#[derive(Serialize)]
struct CurvePoint {
    rounds: usize,
    min_active: usize,
    pattern: String,
    diff_prob_log2: String,
}

fn curve(max_rounds: usize, refined: bool) -> Result<Vec<CurvePoint>, String> {
    if max_rounds == 0 || max_rounds > MAX_CURVE_ROUNDS {
        return Err(format!("rounds must be in 1..={MAX_CURVE_ROUNDS}"));
    }
    let inst = build_reference_instance().map_err(|e| e.to_string())?;
    let model = if refined { Model::Refined } else { Model::Coarse };
    (1..=max_rounds)
        .map(|r| {
            let b = differential_bound(inst.spec(), r, model).map_err(|e| e.to_string())?;
            Ok(CurvePoint {
                rounds: r,
                min_active: b.min_active_sboxes,
                pattern: b.activity_pattern,
                diff_prob_log2: fmt_ratio(&b.diff_prob_log2),
            })
        })
        .collect()
}

/// Minimum active S-boxes and the differential trail bound for 1..=`max_rounds`.
#[wasm_bindgen]
pub fn trail_curve(max_rounds: usize, refined: bool) -> String {
    respond(curve(max_rounds, refined))
}
