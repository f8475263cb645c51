//! The `wavekit` command line. [`run`] takes the argument list and output
//! streams so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::fs;
use std::io::{self, Read, Write};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::json;

use crate::diffusion::{BrickLayout, DiffusionLayer, DEFAULT_BRANCH_CAP};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::groups::{
    fn_generators, is_primitive, is_transitive, random_reduction_experiment, spn_generators,
    subspace_block_oracle, verify_reduction, verify_sufficient_conditions, SUBSPACE_ORACLE_MAX_BITS,
};
use crate::instance::{self, build_reference_instance, full_analysis_report, summarize_sbox};
use crate::sbox::SBoxTable;
use crate::toys::{parse_toy_dims, random_bijective_spec, random_spec, LayerKind};
use crate::trails::{differential_bound, linear_bound, Model};
use crate::wave::{generate_kats, verify_kats, FeistelCipher, Kat, WaveSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "wavekit", version, about = "Wave cipher construction and analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct SpecArgs {
    /// Random toy spec with b bricks of s input and t output bits (needs --seed)
    #[arg(long, value_name = "B,S,T")]
    toy: Option<String>,
    /// Seed for randomized commands
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct KeyArgs {
    /// Master key for the TEST-ONLY key expansion
    #[arg(long, value_parser = parse_hex, conflicts_with = "keys")]
    master: Option<u64>,
    /// File with one round key (hex) per line
    #[arg(long, value_name = "FILE")]
    keys: Option<String>,
    /// Number of rounds (default 48, or the number of keys in --keys)
    #[arg(long)]
    rounds: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Coarse,
    Refined,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Coarse => Model::Coarse,
            ModelArg::Refined => Model::Refined,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Differential and linear properties of an S-box file
    SboxAnalyze {
        file: String,
        /// Include the full difference distribution table
        #[arg(long)]
        ddt: bool,
        #[arg(long)]
        json: bool,
    },
    /// Rank, kernel, properness and branch number of a matrix file
    LambdaCheck {
        file: String,
        /// Brick layout; defaults to 8,4,5 for a 40x32 matrix
        #[arg(long, value_name = "B,S,T")]
        layout: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Bijectivity certificate of the reference or a toy wave function
    WaveCertify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        json: bool,
    },
    /// Encrypt one block
    Encrypt {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, value_parser = parse_hex)]
        pt: u64,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        json: bool,
    },
    /// Decrypt one block
    Decrypt {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, value_parser = parse_hex)]
        ct: u64,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        json: bool,
    },
    /// Generate known-answer vectors for the reference cipher
    KatGen {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = instance::DEFAULT_ROUNDS)]
        rounds: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Check known-answer vectors against the reference cipher ("-" reads stdin)
    KatVerify {
        /// KAT file; the bundled vectors when omitted
        file: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Transitivity and primitivity of the groups generated by a toy spec
    GroupCheck {
        #[command(flatten)]
        spec: SpecArgs,
        /// δ for the sufficient-condition checklist
        #[arg(long, default_value_t = 1)]
        delta: usize,
        #[arg(long)]
        json: bool,
    },
    /// SPN primitivity implies Feistel primitivity, on a toy spec or random permutations
    ReduceVerify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Width of the random permutations when no --toy is given
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long)]
        json: bool,
    },
    /// Single-trail differential and linear bounds
    TrailBound {
        #[arg(long, default_value_t = instance::DEFAULT_ROUNDS)]
        rounds: usize,
        #[arg(long, value_enum, default_value = "coarse")]
        model: ModelArg,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        json: bool,
    },
    /// Full certification and analysis of the 64-bit reference cipher
    #[command(name = "paper-report", visible_alias = "reference-report")]
    ReferenceReport {
        #[arg(long)]
        json: bool,
    },
}

fn parse_hex(s: &str) -> std::result::Result<u64, String> {
    let digits = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .unwrap_or(s)
        .replace('_', "");
    u64::from_str_radix(&digits, 16).map_err(|e| format!("bad hex value {s:?}: {e}"))
}

/// What a command produced: the text or JSON already rendered, and whether
/// the thing checked held up.
struct Outcome {
    body: String,
    passed: bool,
}

fn render<T: Serialize + std::fmt::Display>(value: &T, json: bool) -> Result<String> {
    if json {
        serde_json::to_string_pretty(value)
            .map(|s| s + "\n")
            .map_err(|e| Error::InvalidArgument(format!("JSON encoding failed: {e}")))
    } else {
        Ok(value.to_string())
    }
}

fn render_json(value: serde_json::Value) -> String {
    serde_json::to_string_pretty(&value).expect("JSON values always encode") + "\n"
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::InvalidArgument(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("reading {path}: {e}")))
}

fn require_seed(spec: &SpecArgs, what: &str) -> Result<u64> {
    spec.seed
        .ok_or_else(|| Error::InvalidArgument(format!("{what} is randomized and needs --seed")))
}

/// The reference spec, or a bijective toy when `--toy` is given.
fn load_spec(args: &SpecArgs) -> Result<Arc<WaveSpec>> {
    match &args.toy {
        None => Ok(build_reference_instance()?.spec().clone()),
        Some(dims) => {
            let layout = parse_toy_dims(dims)?;
            let seed = require_seed(args, "--toy")?;
            random_bijective_spec(layout, LayerKind::Parallel, seed)
        }
    }
}

fn cipher_from(key: &KeyArgs, spec: Arc<WaveSpec>) -> Result<(FeistelCipher, &'static str)> {
    match (&key.keys, key.master) {
        (Some(path), _) => {
            let text = read_input(path)?;
            let keys = text
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(|l| parse_hex(l).map_err(Error::InvalidArgument))
                .collect::<Result<Vec<u64>>>()?;
            if let Some(r) = key.rounds.filter(|&r| r != keys.len()) {
                return Err(Error::InvalidArgument(format!(
                    "--rounds {r} but {} keys in {path}",
                    keys.len()
                )));
            }
            Ok((FeistelCipher::new(spec, keys)?, "explicit"))
        }
        (None, Some(master)) => {
            let rounds = key.rounds.unwrap_or(instance::DEFAULT_ROUNDS);
            Ok((FeistelCipher::with_test_only_keys(spec, master, rounds)?, "test-only"))
        }
        (None, None) => Err(Error::InvalidArgument("one of --master or --keys is required".into())),
    }
}

fn block_text(value: u64, bits: usize) -> String {
    format!("0x{value:0width$X}", width = bits.div_ceil(4))
}

fn layout_for(matrix: &BitMatrix, layout: Option<&str>) -> Result<BrickLayout> {
    match layout {
        Some(l) => parse_toy_dims(l),
        None if matrix.rows() == 40 && matrix.cols() == 32 => {
            BrickLayout::new(instance::BRICKS, instance::SBOX_IN, instance::SBOX_OUT)
        }
        None => Err(Error::InvalidArgument(format!(
            "{}x{} matrix: pass --layout b,s,t",
            matrix.rows(),
            matrix.cols()
        ))),
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::SboxAnalyze { file, ddt, json } => {
            let sbox = SBoxTable::parse(&read_input(&file)?)?;
            let summary = summarize_sbox(&sbox)?;
            let table = sbox.ddt()?;
            if json {
                let mut v = serde_json::to_value(&summary).expect("plain data");
                if ddt {
                    v["ddt"] = json!(table.rows().map(<[u32]>::to_vec).collect::<Vec<_>>());
                }
                return Ok(Outcome { body: render_json(v), passed: true });
            }
            let mut body = format!(
                "s: {}\nt: {}\ninjective: {}\ndifferential uniformity: {}\nAPN: {}\nmax bias: {}\nsum set: {}\nmissing sums: {}\n",
                summary.s,
                summary.t,
                yes_no(summary.injective),
                summary.differential_uniformity,
                yes_no(summary.apn),
                summary.max_bias,
                summary.sum_set_size,
                summary.missing_sums.join(" ")
            );
            if ddt {
                body.push_str(&table.to_text());
            }
            Ok(Outcome { body, passed: true })
        }
        Command::LambdaCheck { file, layout, json } => {
            let matrix = BitMatrix::parse(&read_input(&file)?)?;
            let layout = layout_for(&matrix, layout.as_deref())?;
            let lambda = DiffusionLayer::new(layout, matrix)?;
            let report = lambda.analyze(DEFAULT_BRANCH_CAP)?;
            let passed = report.proper;
            Ok(Outcome { body: render(&report, json)?, passed })
        }
        Command::WaveCertify { spec, json } => {
            let spec = match &spec.toy {
                None => build_reference_instance()?.spec().clone(),
                Some(dims) => {
                    let layout = parse_toy_dims(dims)?;
                    let mut rng = ChaCha20Rng::seed_from_u64(require_seed(&spec, "--toy")?);
                    Arc::new(random_spec(layout, LayerKind::Parallel, &mut rng)?)
                }
            };
            let cert = spec.certify()?;
            Ok(Outcome { passed: cert.bijective, body: render(&cert, json)? })
        }
        Command::Encrypt { key, pt, spec, json } => crypt(key, pt, spec, json, true),
        Command::Decrypt { key, ct, spec, json } => crypt(key, ct, spec, json, false),
        Command::KatGen { count, rounds, seed, json } => {
            let seed = seed.ok_or_else(|| Error::InvalidArgument("kat-gen needs --seed".into()))?;
            let spec = build_reference_instance()?.spec().clone();
            let kats = generate_kats(&spec, rounds, count, seed)?;
            let body = if json {
                render_json(json!(kats.iter().map(kat_json).collect::<Vec<_>>()))
            } else {
                let mut s = format!("# {count} vectors, {rounds} rounds, seed {seed}, TEST-ONLY key expansion\n");
                for k in &kats {
                    s.push_str(&format!("{k}\n"));
                }
                s
            };
            Ok(Outcome { body, passed: true })
        }
        Command::KatVerify { file, json } => {
            let text = match &file {
                Some(f) => read_input(f)?,
                None => instance::KAT_FILE.to_string(),
            };
            let kats = Kat::parse_file(&text)?;
            let spec = build_reference_instance()?.spec().clone();
            let bad = verify_kats(&spec, &kats)?;
            let passed = bad.is_empty() && !kats.is_empty();
            let body = if json {
                render_json(json!({
                    "vectors": kats.len(),
                    "mismatches": bad.iter().map(|m| json!({
                        "index": m.index,
                        "expected": kat_json(&m.expected),
                        "got_ct": block_text(m.got_ct, 64),
                        "got_pt": block_text(m.got_pt, 64),
                    })).collect::<Vec<_>>(),
                    "verified": passed,
                }))
            } else {
                let mut s = format!("vectors: {}\n", kats.len());
                for m in &bad {
                    s.push_str(&format!(
                        "mismatch at vector {}: expected ct {}, got {}\n",
                        m.index + 1,
                        block_text(m.expected.ct, 64),
                        block_text(m.got_ct, 64)
                    ));
                }
                s.push_str(&format!("verified: {}\n", yes_no(passed)));
                s
            };
            Ok(Outcome { body, passed })
        }
        Command::GroupCheck { spec, delta, json } => {
            if spec.toy.is_none() {
                return Err(Error::InvalidArgument(
                    "group-check works on toy specs only: pass --toy b,s,t --seed N".into(),
                ));
            }
            let spec = load_spec(&spec)?;
            group_check(&spec, delta, json)
        }
        Command::ReduceVerify { spec: args, n, trials, json } => {
            let seed = require_seed(&args, "reduce-verify")?;
            if args.toy.is_some() {
                let spec = load_spec(&args)?;
                let report = verify_reduction(&spec)?;
                Ok(Outcome { passed: report.implication_holds, body: render(&report, json)? })
            } else {
                let report = random_reduction_experiment(n, trials, seed)?;
                Ok(Outcome { passed: report.counterexamples.is_empty(), body: render(&report, json)? })
            }
        }
        Command::TrailBound { rounds, model, spec, json } => {
            let spec = load_spec(&spec)?;
            let ledger = if rounds % 3 == 0 {
                linear_bound(&spec, rounds, model.into())?
            } else {
                differential_bound(&spec, rounds, model.into())?
            };
            Ok(Outcome { body: render(&ledger, json)?, passed: true })
        }
        Command::ReferenceReport { json } => {
            let inst = build_reference_instance()?;
            let report = full_analysis_report(&inst)?;
            let passed = report.sufficient_conditions.consistent();
            Ok(Outcome { body: render(&report, json)?, passed })
        }
    }
}

fn kat_json(k: &Kat) -> serde_json::Value {
    json!({
        "master": block_text(k.master, 64),
        "rounds": k.rounds,
        "pt": block_text(k.pt, 64),
        "ct": block_text(k.ct, 64),
    })
}

fn crypt(key: KeyArgs, input: u64, spec: SpecArgs, json: bool, forward: bool) -> Result<Outcome> {
    let spec = load_spec(&spec)?;
    let bits = 2 * spec.width();
    if bits < 64 && input >> bits != 0 {
        return Err(Error::ValueTooWide { value: input, width: bits });
    }
    let (cipher, schedule) = cipher_from(&key, spec)?;
    let output = if forward {
        cipher.encrypt_block(input)?
    } else {
        cipher.decrypt_block(input)?
    };
    let (a, b) = if forward { ("pt", "ct") } else { ("ct", "pt") };
    let body = if json {
        render_json(json!({
            a: block_text(input, bits),
            b: block_text(output, bits),
            "rounds": cipher.rounds(),
            "key_schedule": schedule,
        }))
    } else {
        format!("{}\n", block_text(output, bits))
    };
    Ok(Outcome { body, passed: true })
}

#[derive(Serialize)]
struct GroupReport {
    n: usize,
    spn_transitive: bool,
    spn_primitive: bool,
    spn_witness: Option<String>,
    feistel_transitive: bool,
    feistel_primitive: Option<bool>,
    subspace_oracle_primitive: Option<bool>,
    subspace_oracle_witness: Option<Vec<String>>,
    oracles_agree: bool,
    sufficient_conditions: crate::groups::SufficientConditionsReport,
}

impl std::fmt::Display for GroupReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "<T_n, rho> transitive: {}", yes_no(self.spn_transitive))?;
        write!(f, "<T_n, rho> primitive: {}", yes_no(self.spn_primitive))?;
        match &self.spn_witness {
            Some(b) => writeln!(f, " (minimal block of 0 and {b} is non-trivial)")?,
            None => writeln!(f)?,
        }
        writeln!(f, "<T_(0,n), rho-bar> transitive: {}", yes_no(self.feistel_transitive))?;
        match self.feistel_primitive {
            Some(p) => writeln!(f, "<T_(0,n), rho-bar> primitive: {}", yes_no(p))?,
            None => writeln!(f, "<T_(0,n), rho-bar> primitive: not checked, domain too large")?,
        }
        match self.subspace_oracle_primitive {
            Some(p) => {
                write!(f, "subspace oracle: {}", if p { "primitive" } else { "imprimitive" })?;
                match &self.subspace_oracle_witness {
                    Some(w) => writeln!(f, " (U spanned by {})", w.join(" "))?,
                    None => writeln!(f)?,
                }
            }
            None => writeln!(f, "subspace oracle: not run, n > {SUBSPACE_ORACLE_MAX_BITS}")?,
        }
        writeln!(f, "oracles agree: {}", yes_no(self.oracles_agree))?;
        write!(f, "{}", self.sufficient_conditions)
    }
}

fn group_check(spec: &Arc<WaveSpec>, delta: usize, json: bool) -> Result<Outcome> {
    let n = spec.width();
    let spn = spn_generators(spec)?;
    let spn_result = is_primitive(&spn)?;
    let feistel = fn_generators(spec)?;
    let feistel_fits = 2 * n <= crate::groups::max_domain_bits();
    let feistel_transitive = if feistel_fits { is_transitive(&feistel)? } else { true };
    let feistel_primitive = if feistel_fits { Some(is_primitive(&feistel)?.primitive) } else { None };
    let oracle = if n <= SUBSPACE_ORACLE_MAX_BITS {
        Some(subspace_block_oracle(spec)?)
    } else {
        None
    };
    let oracles_agree = oracle.as_ref().is_none_or(|o| o.primitive == spn_result.primitive);
    let report = GroupReport {
        n,
        spn_transitive: is_transitive(&spn)?,
        spn_primitive: spn_result.primitive,
        spn_witness: spn_result.witness_point.map(|b| block_text(b, n)),
        feistel_transitive,
        feistel_primitive,
        subspace_oracle_primitive: oracle.as_ref().map(|o| o.primitive),
        subspace_oracle_witness: oracle.and_then(|o| o.witness),
        oracles_agree,
        sufficient_conditions: verify_sufficient_conditions(spec, delta)?,
    };
    let passed = report.oracles_agree
        && report.sufficient_conditions.consistent()
        && (!report.spn_primitive || report.feistel_primitive != Some(false));
    Ok(Outcome { body: render(&report, json)?, passed })
}

fn yes_no(b: bool) -> &'static str {
    crate::diffusion::yes_no(b)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CertificationFailed(_)
        | Error::NotBijective
        | Error::NotSurjective { .. }
        | Error::NotTransitive { .. }
        | Error::AffineRho => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.body.as_bytes());
            if outcome.passed {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
