use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use bregular::automata::{dfao_from_dfa, kernel_explore};
use bregular::cli::{
    instance, jump_indicator, parse_real, run_analyze, run_batch, BatchEntry, ChecksPatch, CliError, OutputFormat,
    ScenarioPatch, SourceSpec, EXIT_OK,
};
use bregular::fk::{analyze_fk, FkError};
use bregular::floorlog::{u_seq, v_seq};
use bregular::langreg::{decide_regularity, verify_length_claim, words};
use bregular::numeration::DigitStream;
use bregular::rkseq::{check_lemmas, classify_all, detect_period};

/// Exact analysis of the b-regularity of floor(log_b(alpha*n + beta)).
#[derive(Parser)]
#[command(name = "bregular", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// u_n for n in [from, to].
    Seq(SeqArgs),
    /// Per-k records of r_k with case tags and lemma checks.
    Rk(RkArgs),
    /// Base-b digits of a real in [0, 1), or of any real's fractional part with --frac.
    Digits(DigitsArgs),
    /// Words of the base-changed language L_b(u).
    Language(LanguageArgs),
    /// Regularity verdict for L_b(u).
    Decide(DecideArgs),
    /// Truncated kernel exploration of v or r.
    Kernel(KernelArgs),
    /// Level counts f_k, d_k and their alignment with r.
    Fk(FkArgs),
    /// Minimal automaton for L_b(u), as a state table or DOT.
    Dfa(DfaArgs),
    /// The whole chain, from normalization to level counts.
    Analyze(AnalyzeArgs),
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Slope: INT, INT/INT, sqrt(INT) or RAT+RAT*sqrt(INT).
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    beta: String,
    #[arg(long, default_value_t = 2)]
    base: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeqFormat {
    Json,
    Tsv,
}

#[derive(Args)]
struct SeqArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// First index; defaults to the least n with alpha*n + beta > 0.
    #[arg(long, allow_hyphen_values = true)]
    from: Option<BigInt>,
    #[arg(long, allow_hyphen_values = true)]
    to: BigInt,
    #[arg(long, value_enum, default_value = "json")]
    format: SeqFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum RkCheck {
    Lemmas,
    None,
}

#[derive(Args)]
struct RkArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long, default_value_t = 20)]
    kmax: u32,
    #[arg(long, value_enum, default_value = "lemmas")]
    check: RkCheck,
    #[arg(long, default_value_t = 1000)]
    window: u64,
}

#[derive(Args)]
struct DigitsArgs {
    /// A real in [0, 1), or any real with --frac.
    #[arg(long, allow_hyphen_values = true)]
    value: String,
    #[arg(long, default_value_t = 2)]
    base: u32,
    #[arg(long, default_value_t = 32)]
    count: usize,
    /// Expand the fractional part and report the integer part separately.
    #[arg(long)]
    frac: bool,
}

#[derive(Args, Clone)]
struct SourceArgs {
    #[arg(long, default_value = "rk", value_parser = ["rk", "periodic", "explicit", "tm-blocks"])]
    source: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, default_value_t = 2)]
    base: u32,
    /// Preperiod digits of a periodic source ("12" or "1,10,3").
    #[arg(long)]
    pre: Option<String>,
    /// Repeated digits of a periodic source.
    #[arg(long)]
    period: Option<String>,
    /// Digits of an explicit finite source.
    #[arg(long)]
    word: Option<String>,
    /// Block substituted for 0 in the Thue-Morse word.
    #[arg(long)]
    block_a: Option<String>,
    /// Block substituted for 1 in the Thue-Morse word.
    #[arg(long)]
    block_b: Option<String>,
}

impl SourceArgs {
    fn source_spec(&self) -> SourceSpec {
        SourceSpec {
            kind: self.source.clone(),
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            pre: self.pre.clone(),
            period: self.period.clone(),
            word: self.word.clone(),
            block_a: self.block_a.clone(),
            block_b: self.block_b.clone(),
        }
    }
}

#[derive(Args)]
struct LanguageArgs {
    #[command(flatten)]
    src: SourceArgs,
    /// Last word index printed.
    #[arg(long, default_value_t = 32)]
    nmax: usize,
    #[arg(long, default_value_t = 1000)]
    window: usize,
}

#[derive(Args)]
struct DecideArgs {
    #[command(flatten)]
    src: SourceArgs,
    #[arg(long, default_value_t = 1000)]
    window: usize,
    /// Include the full state table.
    #[arg(long)]
    table: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelSeq {
    V,
    R,
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long, value_enum, default_value = "v")]
    seq: KernelSeq,
    #[arg(long, default_value_t = 8)]
    depth: u32,
    #[arg(long, default_value_t = 256)]
    prefix: usize,
}

#[derive(Args)]
struct FkArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long, default_value_t = 200)]
    kmax: i64,
    /// Levels are also counted by enumerating n up to this index.
    #[arg(long, default_value_t = 100_000)]
    nmax: u64,
    #[arg(long, default_value_t = 1000)]
    window: u64,
}

#[derive(Args)]
struct DfaArgs {
    #[command(flatten)]
    src: SourceArgs,
    #[arg(long, default_value_t = 1000)]
    window: usize,
    /// Graphviz output instead of the JSON state table.
    #[arg(long)]
    dot: bool,
    /// The automaton with output computing the indicator of the set.
    #[arg(long)]
    dfao: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// JSON scenario; flags override its fields.
    #[arg(long, conflicts_with = "batch")]
    scenario: Option<String>,
    /// JSON array of scenarios, run concurrently.
    #[arg(long)]
    batch: Option<String>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long)]
    base: Option<u32>,
    #[arg(long)]
    kmax: Option<u32>,
    #[arg(long)]
    nmax: Option<u64>,
    #[arg(long)]
    window: Option<u64>,
    #[arg(long)]
    no_lemmas: bool,
    #[arg(long)]
    no_dfao: bool,
    #[arg(long)]
    no_kernel: bool,
    #[arg(long)]
    no_fk: bool,
    #[arg(long, value_parser = ["pretty", "json"])]
    format: Option<String>,
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))
}

fn seq(a: SeqArgs) -> Result<String, CliError> {
    let norm = instance(&a.inst.alpha, &a.inst.beta, a.inst.base)?;
    let from = a.from.unwrap_or_else(|| norm.n_min().clone());
    if a.to < from {
        return Err(CliError::Usage("--to must not be below --from".into()));
    }
    let u = u_seq(&norm, &from, &a.to).map_err(usage)?;
    let v = v_seq(&norm, &from, &a.to).map_err(usage)?;
    Ok(match a.format {
        SeqFormat::Json => pretty(&json!({
            "from": from.to_string(),
            "to": a.to.to_string(),
            "u": u,
            "v": v.values,
            "v_settled_after": v.settled_after,
        })),
        SeqFormat::Tsv => {
            let mut out = String::from("n\tu\tv\n");
            let mut n = from;
            for (u, v) in u.iter().zip(&v.values) {
                out.push_str(&format!("{n}\t{u}\t{v}\n"));
                n += 1u32;
            }
            out
        }
    })
}

fn rk(a: RkArgs) -> Result<String, CliError> {
    let norm = instance(&a.inst.alpha, &a.inst.beta, a.inst.base)?;
    let internal = |e: bregular::rkseq::RkError| CliError::Internal(e.to_string());
    let (records, lemmas) = match a.check {
        RkCheck::Lemmas => {
            let (records, report) = check_lemmas(&norm, a.kmax).map_err(internal)?;
            if !report.is_clean() {
                return Err(CliError::Internal(format!("lemma violations: {report:?}")));
            }
            (records, Some(report))
        }
        RkCheck::None => (classify_all(&norm, a.kmax).map_err(internal)?, None),
    };
    Ok(pretty(&json!({
        "normalization": norm.record(),
        "records": records,
        "lemmas": lemmas,
        "periodicity": detect_period(&norm, a.window),
    })))
}

fn digits(a: DigitsArgs) -> Result<String, CliError> {
    let x = parse_real("value", &a.value)?;
    let (int_part, x) = if a.frac { (x.floor(), x.frac()) } else { (BigInt::from(0), x) };
    let mut stream = DigitStream::new(&x, a.base).map_err(usage)?;
    Ok(pretty(&json!({
        "value": x.to_string(),
        "integer_part": int_part.to_string(),
        "base": a.base,
        "digits": stream.prefix(a.count),
    })))
}

fn language(a: LanguageArgs) -> Result<String, CliError> {
    let src = a.src.source_spec().build(a.src.base)?;
    let lw = words(&src, a.src.base, a.nmax);
    let listed: Vec<_> = (0..lw.count())
        .map(|n| {
            json!({
                "n": n,
                "term": lw.term(n).to_string(),
                "value": lw.value(n).to_string(),
                "word": lw.word(n).to_string(),
            })
        })
        .collect();
    Ok(pretty(&json!({
        "base": a.src.base,
        "words": listed,
        "length_claim": verify_length_claim(&lw),
        "periodicity": src.periodicity(a.window as u64),
    })))
}

fn decide(a: DecideArgs) -> Result<String, CliError> {
    let src = a.src.source_spec().build(a.src.base)?;
    let verdict = decide_regularity(&src, a.src.base, a.window).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(pretty(&verdict.summary(a.table)))
}

fn kernel(a: KernelArgs) -> Result<String, CliError> {
    let norm = instance(&a.inst.alpha, &a.inst.beta, a.inst.base)?;
    let len = u64::from(a.inst.base)
        .checked_pow(a.depth)
        .and_then(|p| p.checked_mul(a.prefix as u64))
        .filter(|&n| n <= 1 << 26)
        .ok_or_else(|| CliError::Usage("base^depth * prefix exceeds 2^26 terms".into()))?;
    let seq = match a.seq {
        KernelSeq::V => jump_indicator(&norm, len),
        KernelSeq::R => bregular::rkseq::r_direct_seq(&norm, len as u32),
    };
    let report = kernel_explore(&seq, a.inst.base, a.depth, a.prefix).map_err(usage)?;
    Ok(pretty(&report))
}

fn fk(a: FkArgs) -> Result<String, CliError> {
    let norm = instance(&a.inst.alpha, &a.inst.beta, a.inst.base)?;
    match analyze_fk(&norm, a.kmax, &BigInt::from(a.nmax), a.window) {
        Ok(analysis) => Ok(pretty(&json!({
            "k_min": analysis.counts.k_min,
            "f": analysis.counts.f.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "d": analysis.d.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "m0": analysis.alignment.m0,
            "alignment": analysis.alignment,
            "verdict": analysis.verdict,
            "enumerated_levels": analysis.enumerated_levels,
        }))),
        Err(FkError::Internal(msg)) => Err(CliError::Internal(msg)),
        Err(e) => Err(usage(e)),
    }
}

fn dfa(a: DfaArgs) -> Result<String, CliError> {
    let src = a.src.source_spec().build(a.src.base)?;
    let verdict = decide_regularity(&src, a.src.base, a.window).map_err(|e| CliError::Internal(e.to_string()))?;
    let Some(m) = verdict.dfa() else {
        eprintln!("no automaton: the verdict is {}", verdict.kind());
        return Ok(pretty(&verdict.summary(false)));
    };
    Ok(match (a.dfao, a.dot) {
        (false, false) => pretty(&m.table()),
        (false, true) => m.to_dot(),
        (true, false) => pretty(&dfao_from_dfa(m).table()),
        (true, true) => dfao_from_dfa(m).to_dot(),
    })
}

fn analyze(a: AnalyzeArgs) -> Result<(String, i32), CliError> {
    let flags = ScenarioPatch {
        name: a.name,
        alpha: a.alpha,
        beta: a.beta,
        base: a.base,
        kmax: a.kmax,
        nmax: a.nmax,
        window: a.window,
        checks: ChecksPatch {
            lemmas: a.no_lemmas.then_some(false),
            dfao: a.no_dfao.then_some(false),
            kernel: a.no_kernel.then_some(false),
            fk: a.no_fk.then_some(false),
        },
        format: a.format.as_deref().map(|f| match f {
            "json" => OutputFormat::Json,
            _ => OutputFormat::Pretty,
        }),
    };
    if let Some(path) = a.batch {
        let entries = ScenarioPatch::batch_from_json(&read(&path)?)?;
        let results = run_batch(&entries, &flags);
        let code = results
            .iter()
            .map(|r| match r {
                BatchEntry::Completed(_) => EXIT_OK,
                BatchEntry::Failed { exit_code, .. } => *exit_code,
            })
            .max()
            .unwrap_or(EXIT_OK);
        for r in &results {
            if let BatchEntry::Failed { name, error, .. } = r {
                eprintln!("scenario {}: {error}", name.as_deref().unwrap_or("(unnamed)"));
            }
        }
        return Ok((pretty(&results), code));
    }
    let base = match a.scenario {
        Some(path) => ScenarioPatch::from_json(&read(&path)?)?,
        None => ScenarioPatch::default(),
    };
    let scenario = base.overlay(&flags).resolve()?;
    Ok((run_analyze(&scenario)?.to_json(), EXIT_OK))
}

fn dispatch(command: Command) -> Result<(String, i32), CliError> {
    let done = |s: String| (s, EXIT_OK);
    match command {
        Command::Seq(a) => seq(a).map(done),
        Command::Rk(a) => rk(a).map(done),
        Command::Digits(a) => digits(a).map(done),
        Command::Language(a) => language(a).map(done),
        Command::Decide(a) => decide(a).map(done),
        Command::Kernel(a) => kernel(a).map(done),
        Command::Fk(a) => fk(a).map(done),
        Command::Dfa(a) => dfa(a).map(done),
        Command::Analyze(a) => analyze(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok((out, code)) => {
            // a closed pipe downstream is not a failure of the analysis
            let _ = writeln!(io::stdout(), "{}", out.trim_end());
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
