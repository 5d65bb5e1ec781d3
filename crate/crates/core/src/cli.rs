//! Command-line front end. [`dispatch`] parses arguments, runs one command and
//! returns the process exit code: 0 on success, 1 on a domain error, 2 on a
//! usage error.

use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::acsearch::{self, brute_a, exact_a_with, BruteTable, SearchOptions};
use crate::analysis::{self, RatePoint, RateSource, Series};
use crate::automata::Dfa;
use crate::debruijn::{self, generate_lex_least, generate_with_start_bit, is_debruijn};
use crate::dio::{enumerate_nonneg, solve_two};
use crate::error::Error;
use crate::psc::{self, Psc};
use crate::tseq::{SizeMagnitude, TParams, TSeq};
use crate::witness::{
    self, acceptance_length_equation, build_case, build_m1, build_m2, build_mhat, case_for,
    check_materialized, quoted_n1, quoted_n2, BitSource, WitnessSpec,
};
use crate::words::BitString;
use crate::{Integer, Natural, Rational};

#[derive(Parser, Debug)]
#[command(name = "autoplex", version, about = "Automatic complexity of normal sequences")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every command. Each flag may also be set through an
/// `AUTOPLEX_` environment variable; flags win.
#[derive(Args, Debug, Clone)]
pub struct Config {
    #[arg(long, global = true, value_enum, default_value = "text", env = "AUTOPLEX_FORMAT")]
    pub format: Format,
    /// Largest zone order materialized.
    #[arg(long, global = true, default_value_t = psc::DEFAULT_ZONE_CAP,
          value_parser = clap::value_parser!(u32).range(1..=debruijn::ORDER_CAP as i64),
          env = "AUTOPLEX_ZONE_CAP")]
    pub zone_cap: u32,
    /// Largest automaton materialized, in states.
    #[arg(long, global = true, default_value_t = witness::DEFAULT_STATE_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..), env = "AUTOPLEX_STATE_BUDGET")]
    pub state_budget: u64,
    /// Largest prefix materialized, in bits.
    #[arg(long, global = true, default_value_t = psc::DEFAULT_PREFIX_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..), env = "AUTOPLEX_PREFIX_BUDGET")]
    pub prefix_budget: u64,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 7, env = "AUTOPLEX_SEED")]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Exact,
    Scaled,
}

impl Mode {
    fn params(self) -> TParams {
        match self {
            Mode::Exact => TParams::exact(),
            Mode::Scaled => TParams::scaled(),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Seq {
    Psc,
    Tseq,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// De Bruijn strings.
    Debruijn {
        #[arg(long)]
        order: u32,
        /// Start with this bit instead of the lexicographically least string.
        #[arg(long)]
        start_bit: Option<u8>,
        /// Rotate left by this many positions.
        #[arg(long, default_value_t = 0)]
        rotate: u64,
    },
    /// The Pierce–Shields Champernowne sequence.
    Psc {
        #[command(subcommand)]
        cmd: PscCmd,
    },
    /// The repeated de Bruijn sequence `T`.
    Tseq {
        #[command(subcommand)]
        cmd: TseqCmd,
    },
    /// Automata read as JSON.
    Dfa {
        #[command(subcommand)]
        cmd: DfaCmd,
    },
    /// Automatic complexity of a string.
    Acx {
        #[command(subcommand)]
        cmd: AcxCmd,
    },
    /// Witness automata and their certificates.
    Witness {
        #[command(subcommand)]
        cmd: WitnessCmd,
    },
    /// Linear Diophantine equations.
    Dio {
        #[command(subcommand)]
        cmd: DioCmd,
    },
    /// Complexity-rate bounds.
    Rates(RatesArgs),
    /// Quick end-to-end self-check.
    Verify,
}

#[derive(Subcommand, Debug)]
enum PscCmd {
    /// Bits of zone `C_n`.
    Zone {
        #[arg(long)]
        n: u32,
    },
    /// The first `len` bits, or `len` bits from `start`.
    Prefix {
        #[arg(long)]
        len: u64,
        #[arg(long, default_value = "0")]
        start: Natural,
    },
    /// Block-aligned Champernowne check for zones `from..=to`.
    Verify {
        #[arg(long, default_value_t = 1)]
        from: u32,
        #[arg(long)]
        to: u32,
    },
    /// Square half-lengths inside zone `C_j`.
    Lemma {
        #[arg(long)]
        j: u32,
    },
    /// Zone and prefix lengths.
    Len {
        #[arg(long)]
        n: u64,
    },
}

#[derive(Subcommand, Debug)]
enum TseqCmd {
    Prefix {
        #[arg(long)]
        len: u64,
        #[arg(long, value_enum, default_value = "scaled")]
        mode: Mode,
    },
    /// Exponent, zone length and prefix length of zone `j`.
    Len {
        #[arg(long)]
        j: u32,
        #[arg(long, value_enum, default_value = "scaled")]
        mode: Mode,
    },
}

#[derive(Subcommand, Debug)]
enum DfaCmd {
    /// Accepted strings of one length; reads the automaton from `--dfa` or stdin.
    Count {
        #[arg(long)]
        length: usize,
        #[arg(long, default_value = "-")]
        dfa: String,
        /// Also report whether this string is the only one accepted.
        #[arg(long)]
        string: Option<BitString>,
    },
}

#[derive(Subcommand, Debug)]
enum AcxCmd {
    Exact {
        #[arg(long)]
        string: BitString,
        #[arg(long)]
        max_states: Option<usize>,
        #[arg(long, default_value_t = acsearch::DEFAULT_SEARCH_CAP)]
        max_len: usize,
    },
    Brute {
        #[arg(long)]
        string: BitString,
        #[arg(long, default_value_t = acsearch::BRUTE_DEFAULT_STATES)]
        max_states: usize,
    },
    /// `(|x| + 1) / k` for `k`-th power free strings.
    Lower {
        #[arg(long)]
        string: BitString,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
}

#[derive(Subcommand, Debug)]
enum WitnessCmd {
    /// Two-loop machine for `C̄_{n+1}` followed by `p_len` bits.
    Case {
        #[arg(long)]
        n: u64,
        /// Defaults to the case that applies to `n`.
        #[arg(long)]
        case: Option<u8>,
        #[arg(long, default_value = "0")]
        p_len: Natural,
        /// Build the automaton and count its accepted strings.
        #[arg(long)]
        materialize: bool,
    },
    /// The four-loop machine for `C̄_65`.
    Mhat,
    /// `M1` for `T̄_n`.
    M1 {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "scaled")]
        mode: Mode,
        #[arg(long)]
        materialize: bool,
    },
    /// `M2` for `T̄_n · w`.
    M2 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        w: Natural,
        #[arg(long, value_enum, default_value = "scaled")]
        mode: Mode,
        #[arg(long)]
        materialize: bool,
    },
}

#[derive(Subcommand, Debug)]
enum DioCmd {
    /// Nonnegative solutions of `constant + Σ coeff_i x_i = target`.
    Solve {
        #[arg(long, value_delimiter = ',', required = true)]
        coeffs: Vec<Natural>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        constant: Integer,
        #[arg(long, allow_hyphen_values = true)]
        target: Integer,
        /// Lower bounds, one per coefficient.
        #[arg(long, value_delimiter = ',')]
        bounds: Vec<Natural>,
    },
    /// All integer solutions of `a·x + b·y = c`.
    Family {
        #[arg(long, allow_hyphen_values = true)]
        a: Integer,
        #[arg(long, allow_hyphen_values = true)]
        b: Integer,
        #[arg(long, allow_hyphen_values = true)]
        c: Integer,
    },
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct RatesArgs {
    #[command(subcommand)]
    cmd: Option<RatesCmd>,
    #[command(flatten)]
    range: RangeArgs,
}

#[derive(Args, Debug)]
struct RangeArgs {
    #[arg(long, value_enum, default_value = "psc")]
    seq: Seq,
    #[arg(long, value_enum, default_value = "scaled")]
    mode: Mode,
    #[arg(long, default_value = "0")]
    from: Natural,
    #[arg(long, default_value = "100")]
    to: Natural,
    #[arg(long, default_value = "1")]
    step: Natural,
}

#[derive(Subcommand, Debug)]
enum RatesCmd {
    /// Closed-form bounds at each `n`.
    Series {
        #[arg(long)]
        which: Series,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<u64>,
    },
    /// Ratios with constant state count, for `j` in `j_list`.
    Tail {
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        j_list: Vec<u64>,
    },
    /// Sliding-window word frequencies of a prefix.
    Freq {
        #[arg(long, value_enum, default_value = "psc")]
        seq: Seq,
        #[arg(long, value_enum, default_value = "scaled")]
        mode: Mode,
        #[arg(long)]
        len: u64,
        #[arg(long)]
        k: usize,
    },
}

/// What a command produced, in every format it supports.
struct Output {
    text: String,
    json: Value,
    csv: Option<String>,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Self {
            text: text.into(),
            json,
            csv: None,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type CmdResult = std::result::Result<Output, Failure>;

/// Runs one command, reading any automaton input from stdin.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    dispatch_with_input(argv, &mut std::io::stdin().lock(), out, err)
}

pub fn dispatch_with_input<I, T>(
    argv: I,
    input: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let cfg = cli.config.clone();
    match run(cli.command, &cfg, input) {
        Ok(o) => match render(&o, cfg.format) {
            Some(s) => {
                let _ = out.write_all(s.as_bytes());
                0
            }
            None => {
                let _ = writeln!(err, "error: this command has no csv output");
                2
            }
        },
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn render(o: &Output, format: Format) -> Option<String> {
    let mut s = match format {
        Format::Text => o.text.clone(),
        Format::Json => serde_json::to_string_pretty(&o.json).expect("values serialize"),
        Format::Csv => o.csv.clone()?,
    };
    if !s.ends_with('\n') {
        s.push('\n');
    }
    Some(s)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("values serialize")
}

fn rational_json(r: &Rational) -> Value {
    json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
        "decimal": analysis::decimal_string(r, analysis::DECIMAL_DIGITS),
    })
}

fn psc_for(cfg: &Config) -> Psc {
    Psc::new()
        .with_zone_cap(cfg.zone_cap)
        .with_prefix_budget(cfg.prefix_budget)
}

fn tseq_for(cfg: &Config, mode: Mode) -> TSeq {
    TSeq::new(mode.params()).with_prefix_budget(cfg.prefix_budget)
}

fn run(cmd: Command, cfg: &Config, input: &mut dyn Read) -> CmdResult {
    match cmd {
        Command::Debruijn { order, start_bit, rotate } => cmd_debruijn(order, start_bit, rotate),
        Command::Psc { cmd } => cmd_psc(cmd, cfg),
        Command::Tseq { cmd } => cmd_tseq(cmd, cfg),
        Command::Dfa { cmd } => cmd_dfa(cmd, input),
        Command::Acx { cmd } => cmd_acx(cmd),
        Command::Witness { cmd } => cmd_witness(cmd, cfg),
        Command::Dio { cmd } => cmd_dio(cmd),
        Command::Rates(args) => cmd_rates(args, cfg),
        Command::Verify => cmd_verify(cfg),
    }
}

fn cmd_debruijn(order: u32, start_bit: Option<u8>, rotation: u64) -> CmdResult {
    let d = match start_bit {
        None => generate_lex_least(order)?,
        Some(b @ (0 | 1)) => generate_with_start_bit(order, b == 1)?,
        Some(b) => return Err(Failure::Usage(format!("start bit must be 0 or 1, not {b}"))),
    };
    let d = if rotation == 0 { d } else { debruijn::rotate(&d, rotation)? };
    let bits = d.bits().to_text();
    let json = json!({
        "order": order,
        "length": d.bits().len().to_string(),
        "bits": bits,
        "is_debruijn": is_debruijn(d.bits(), order),
    });
    Ok(Output::new(bits, json))
}

fn cmd_psc(cmd: PscCmd, cfg: &Config) -> CmdResult {
    let psc = psc_for(cfg);
    Ok(match cmd {
        PscCmd::Zone { n } => {
            let z = psc.zone(n)?;
            let f = psc::factorize(n as u64);
            let json = json!({
                "n": n,
                "s": f.s,
                "t": f.t.to_string(),
                "length": z.len().to_string(),
                "bits": z.to_text(),
            });
            Output::new(z.to_text(), json)
        }
        PscCmd::Prefix { len, start } => {
            let bits = psc.bits(&start, len)?;
            let json = json!({"start": start.to_string(), "length": len.to_string(), "bits": bits.to_text()});
            Output::new(bits.to_text(), json)
        }
        PscCmd::Verify { from, to } => {
            if from == 0 || from > to {
                return Err(Failure::Usage(format!("need 1 <= from <= to, got {from}..{to}")));
            }
            let mut rows = Vec::new();
            for n in from..=to {
                rows.push((n, psc.verify_zone(n)?));
            }
            let all = rows.iter().all(|r| r.1);
            let text = rows
                .iter()
                .map(|(n, ok)| format!("zone {n}: {}", if *ok { "ok" } else { "FAILED" }))
                .collect::<Vec<_>>()
                .join("\n");
            let csv = std::iter::once("n,ok".to_string())
                .chain(rows.iter().map(|(n, ok)| format!("{n},{ok}")))
                .collect::<Vec<_>>()
                .join("\n");
            let json = json!({
                "zones": rows.iter().map(|(n, ok)| json!({"n": n, "ok": ok})).collect::<Vec<_>>(),
                "all_ok": all,
            });
            Output::new(text, json).with_csv(csv)
        }
        PscCmd::Lemma { j } => {
            let r = psc.verify_loop_lemma(j)?;
            let text = format!(
                "j = {}, modulus {}: {} squares, half-lengths {:?}, {} violations",
                r.j,
                r.modulus,
                r.squares_scanned,
                r.observed_half_lengths,
                r.violations.len()
            );
            let mut json = to_json(&r);
            json["ok"] = json!(r.ok());
            Output::new(text, json)
        }
        PscCmd::Len { n } => {
            let zone = psc::zone_length(n);
            let prefix = psc::cumulative_length_closed(n);
            let text = format!("|C_{n}| = {zone}\n|C̄_{n}| = {prefix}");
            let json = json!({"n": n, "zone_length": zone.to_string(), "prefix_length": prefix.to_string()});
            Output::new(text, json)
        }
    })
}

fn cmd_tseq(cmd: TseqCmd, cfg: &Config) -> CmdResult {
    Ok(match cmd {
        TseqCmd::Prefix { len, mode } => {
            let bits = tseq_for(cfg, mode).prefix(len)?;
            let json = json!({"length": len.to_string(), "bits": bits.to_text()});
            Output::new(bits.to_text(), json)
        }
        TseqCmd::Len { j, mode } => {
            let seq = tseq_for(cfg, mode);
            let magnitude = seq.zone_magnitude(j)?;
            let mut json = json!({"j": j, "magnitude": to_json(&magnitude)});
            let mut text = match &magnitude {
                SizeMagnitude::Digits { digits } => format!("|T_{j}| has {digits} digits"),
                SizeMagnitude::LogLog10 { value } => format!("log10 log10 |T_{j}| = {value:.6}"),
            };
            if let (Ok(f), Ok(z), Ok(c)) = (seq.exponent(j), seq.zone_length(j), seq.cumulative_length(j)) {
                text = format!("f({j}) = {f}\n|T_{j}| = {z}\n|T̄_{j}| = {c}");
                json["exponent"] = json!(f.to_string());
                json["zone_length"] = json!(z.to_string());
                json["prefix_length"] = json!(c.to_string());
            }
            Output::new(text, json)
        }
    })
}

fn cmd_dfa(cmd: DfaCmd, input: &mut dyn Read) -> CmdResult {
    let DfaCmd::Count { length, dfa, string } = cmd;
    let raw = if dfa == "-" {
        let mut s = String::new();
        input
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(&dfa).map_err(|e| Failure::Usage(format!("cannot read {dfa}: {e}")))?
    };
    let m = Dfa::from_json(&raw)?;
    let count = m.count_accepted(length);
    let mut json = json!({"states": m.state_count(), "length": length, "count": count.to_string()});
    let mut text = count.to_string();
    if let Some(x) = string {
        if x.len() != length {
            return Err(Failure::Usage(format!("string has length {}, not {length}", x.len())));
        }
        let unique = m.uniquely_accepts(&x);
        json["accepts"] = json!(m.accepts(&x));
        json["unique"] = json!(unique);
        text = format!("{count}\nunique: {unique}");
    }
    Ok(Output::new(text, json))
}

fn cmd_acx(cmd: AcxCmd) -> CmdResult {
    Ok(match cmd {
        AcxCmd::Exact { string, max_states, max_len } => {
            let r = exact_a_with(&string, SearchOptions { max_len, max_states })?;
            let json = json!({"string": string.to_text(), "value": r.value, "witness": to_json(&r.witness)});
            Output::new(r.value.to_string(), json)
        }
        AcxCmd::Brute { string, max_states } => match brute_a(&string, max_states)? {
            Some(r) => {
                let json = json!({"string": string.to_text(), "value": r.value, "witness": to_json(&r.witness)});
                Output::new(r.value.to_string(), json)
            }
            None => Output::new(
                format!("more than {max_states} states"),
                json!({"string": string.to_text(), "value": null, "max_states": max_states}),
            ),
        },
        AcxCmd::Lower { string, k } => {
            let lb = acsearch::powerfree_lower_bound(&string, k);
            let text = match &lb {
                Some(r) => format!("{r}"),
                None => format!("not {k}-power free"),
            };
            let json = json!({
                "string": string.to_text(),
                "k": k,
                "bound": lb.as_ref().map(rational_json),
            });
            Output::new(text, json)
        }
    })
}

fn witness_output(spec: &WitnessSpec, source: Option<&dyn BitSource>, cfg: &Config) -> CmdResult {
    let cert = acceptance_length_equation(spec, &spec.target_len)?;
    let states = spec.state_count();
    let ratio = Rational::new(states.clone().into(), spec.target_len.clone().into());
    let mut json = json!({
        "name": spec.name,
        "states": states.to_string(),
        "target_len": spec.target_len.to_string(),
        "ratio": rational_json(&ratio),
        "unique": cert.is_unique(),
        "spec": to_json(spec),
        "equation": to_json(&cert),
    });
    let mut text = format!(
        "{}\nstates: {states}\ntarget length: {}\nsolutions: {}\nunique: {}",
        spec.name,
        spec.target_len,
        cert.solutions.len(),
        cert.is_unique()
    );
    if let Some(src) = source {
        let check = check_materialized(spec, src, cfg.state_budget)?;
        text.push_str(&format!(
            "\nmaterialized: {} states, {} accepted, unique: {}",
            check.states, check.dp_count, check.unique
        ));
        json["materialized"] = to_json(&check);
    }
    Ok(Output::new(text, json))
}

fn cmd_witness(cmd: WitnessCmd, cfg: &Config) -> CmdResult {
    match cmd {
        WitnessCmd::Case { n, case, p_len, materialize } => {
            let case = match case.or_else(|| case_for(n)) {
                Some(c) => c,
                None => return Err(Failure::Usage(format!("no case applies to n = {n}"))),
            };
            let spec = build_case(case, n, &p_len)?;
            let psc = psc_for(cfg);
            let mut o = witness_output(&spec, materialize.then_some(&psc as &dyn BitSource), cfg)?;
            o.json["case"] = json!(case);
            o.json["quoted_bound"] = json!(witness::quoted_case_bound(case, n, &p_len)?.to_string());
            Ok(o)
        }
        WitnessCmd::Mhat => cmd_mhat(),
        WitnessCmd::M1 { n, mode, materialize } => {
            let seq = tseq_for(cfg, mode);
            let spec = build_m1(n, &seq)?;
            let mut o = witness_output(&spec, materialize.then_some(&seq as &dyn BitSource), cfg)?;
            o.json["quoted_states"] = json!(witness::quoted_m1(n, &seq)?.to_string());
            Ok(o)
        }
        WitnessCmd::M2 { n, w, mode, materialize } => {
            let seq = tseq_for(cfg, mode);
            let spec = build_m2(n, &w, &seq)?;
            let mut o = witness_output(&spec, materialize.then_some(&seq as &dyn BitSource), cfg)?;
            o.json["quoted_states"] = json!(witness::quoted_m2(n, &w, &seq)?.to_string());
            Ok(o)
        }
    }
}

fn cmd_mhat() -> CmdResult {
    let spec = build_mhat()?;
    let target = psc::cumulative_length_closed(65);
    let cert = acceptance_length_equation(&spec, &target)?;
    let (n1, n2) = (quoted_n1(), quoted_n2());
    let frac = |a: &BigUint| Rational::new(a.clone().into(), target.clone().into());
    let quoted_ratio = frac(&n2);
    let limit = Rational::new(173.into(), 1000.into());
    let solutions: Vec<Vec<u64>> = cert
        .solutions
        .iter()
        .map(|s| s.iter().map(|v| crate::scalar::to_u64(v).expect("small")).collect())
        .collect();
    let json = json!({
        "name": spec.name,
        "target_len": target.to_string(),
        "n1": n1.to_string(),
        "n2": n2.to_string(),
        "structural_states": spec.state_count().to_string(),
        "n2_lt_n1": n2 < n1,
        "ratio": rational_json(&quoted_ratio),
        "structural_ratio": rational_json(&frac(&spec.state_count())),
        "ratio_lt_0173": quoted_ratio < limit,
        "solutions": solutions,
        "equation": to_json(&cert),
    });
    let text = format!(
        "n1 = {n1}\nn2 = {n2}\nn2 < n1: {}\nn2 / |C̄_65| = {}\nsolutions: {:?}",
        n2 < n1,
        analysis::decimal_string(&quoted_ratio, analysis::DECIMAL_DIGITS),
        solutions
    );
    Ok(Output::new(text, json))
}

fn cmd_dio(cmd: DioCmd) -> CmdResult {
    Ok(match cmd {
        DioCmd::Solve { coeffs, constant, target, bounds } => {
            let bounds = if bounds.is_empty() {
                vec![BigUint::zero(); coeffs.len()]
            } else if bounds.len() == coeffs.len() {
                bounds
            } else {
                return Err(Failure::Usage("need one bound per coefficient".into()));
            };
            let cert = enumerate_nonneg(&coeffs, &constant, &target, &bounds)?;
            let text = cert
                .solutions
                .iter()
                .map(|s| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join("\n");
            let csv = cert
                .solutions
                .iter()
                .map(|s| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
                .collect::<Vec<_>>()
                .join("\n");
            let text = if text.is_empty() { "no solutions".into() } else { text };
            let mut json = to_json(&cert);
            json["unique"] = json!(cert.is_unique());
            Output::new(text, json).with_csv(csv)
        }
        DioCmd::Family { a, b, c } => match solve_two(&a, &b, &c)? {
            Some(f) => {
                let text = format!(
                    "({}, {}) + d·({}, {})",
                    f.base.0, f.base.1, f.step.0, f.step.1
                );
                let json = json!({
                    "gcd": f.gcd.to_string(),
                    "base": [f.base.0.to_string(), f.base.1.to_string()],
                    "step": [f.step.0.to_string(), f.step.1.to_string()],
                });
                Output::new(text, json)
            }
            None => Output::new("no integer solutions", json!(null)),
        },
    })
}

fn cmd_rates(args: RatesArgs, cfg: &Config) -> CmdResult {
    match args.cmd {
        None => rates_range(args.range, cfg),
        Some(RatesCmd::Series { which, n_list }) => {
            let ns = if n_list.is_empty() { which.default_ns() } else { n_list };
            let vals = analysis::bound_series(which, &ns)?;
            series_output(which.name(), "n", &ns, &vals)
        }
        Some(RatesCmd::Tail { n, j_list }) => {
            let vals = analysis::constant_state_tail(n, &j_list)?;
            series_output("tail", "j", &j_list, &vals)
        }
        Some(RatesCmd::Freq { seq, mode, len, k }) => {
            let x = match seq {
                Seq::Psc => psc_for(cfg).prefix(len)?,
                Seq::Tseq => tseq_for(cfg, mode).prefix(len)?,
            };
            let r = analysis::frequency_report(&x, k)?;
            let dev = analysis::decimal_string(&r.max_deviation, analysis::DECIMAL_DIGITS);
            let csv = std::iter::once("word,count".to_string())
                .chain(
                    r.counts
                        .iter()
                        .enumerate()
                        .map(|(w, c)| format!("{},{c}", BitString::from_value(w as u64, k))),
                )
                .collect::<Vec<_>>()
                .join("\n");
            let text = format!("{} windows, max deviation {dev}", r.windows);
            Ok(Output::new(text, to_json(&r)).with_csv(csv))
        }
    }
}

fn series_output(name: &str, key: &str, xs: &[u64], vals: &[Rational]) -> CmdResult {
    let rows: Vec<String> = xs
        .iter()
        .zip(vals)
        .map(|(x, v)| {
            format!(
                "{x},{},{},{}",
                v.numer(),
                v.denom(),
                analysis::decimal_string(v, analysis::DECIMAL_DIGITS)
            )
        })
        .collect();
    let csv = std::iter::once(format!("{key},num,den,decimal"))
        .chain(rows)
        .collect::<Vec<_>>()
        .join("\n");
    let text = xs
        .iter()
        .zip(vals)
        .map(|(x, v)| format!("{key} = {x}: {}", analysis::decimal_string(v, analysis::DECIMAL_DIGITS)))
        .collect::<Vec<_>>()
        .join("\n");
    let json = json!({
        "series": name,
        "values": xs.iter().zip(vals).map(|(x, v)| json!({key: x, "bound": rational_json(v)})).collect::<Vec<_>>(),
    });
    Ok(Output::new(text, json).with_csv(csv))
}

fn rates_range(r: RangeArgs, cfg: &Config) -> CmdResult {
    if r.step.is_zero() || r.from > r.to {
        return Err(Failure::Usage("need step > 0 and from <= to".into()));
    }
    let mut ms = Vec::new();
    let mut m = r.from.clone();
    while m <= r.to {
        ms.push(m.clone());
        m += &r.step;
        if ms.len() > 1_000_000 {
            return Err(Failure::Usage("more than 10^6 points requested".into()));
        }
    }
    let psc = psc_for(cfg);
    let seq = tseq_for(cfg, r.mode);
    let source = match r.seq {
        Seq::Psc => RateSource::Psc(&psc),
        Seq::Tseq => RateSource::Tseq(&seq),
    };
    let pts = analysis::rate_profile(source, &ms)?;
    let csv = std::iter::once(RatePoint::csv_header().to_string())
        .chain(pts.iter().map(RatePoint::csv_row))
        .collect::<Vec<_>>()
        .join("\n");
    let text = pts
        .iter()
        .map(|p| {
            format!(
                "m = {}: {} ({} states, {})",
                p.m,
                analysis::decimal_string(&p.bound, analysis::DECIMAL_DIGITS),
                p.states,
                p.source
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Output::new(text, to_json(&pts)).with_csv(csv))
}

fn cmd_verify(cfg: &Config) -> CmdResult {
    let mut checks: Vec<(&str, Result<bool, Error>)> = Vec::new();
    checks.push((
        "de Bruijn orders 1..=12",
        (1..=12).try_fold(true, |ok, n| {
            let d = generate_lex_least(n)?;
            Ok(ok && is_debruijn(d.bits(), n))
        }),
    ));
    let psc = psc_for(cfg);
    let zone_top = cfg.zone_cap.min(10);
    checks.push((
        "Champernowne zones",
        (1..=zone_top).try_fold(true, |ok, n| Ok(ok && psc.verify_zone(n)?)),
    ));
    checks.push(("exact search vs exhaustive sweep, length <= 6", verify_search()));
    checks.push(("exact search vs exhaustive oracle, sampled", verify_sampled(cfg.seed)));
    checks.push(("two-loop witnesses materialized", verify_cases(&psc, cfg)));
    checks.push(("four-loop machine equation", verify_mhat()));
    checks.push((
        "loop lemma j = 3, 4",
        [3u32, 4].iter().try_fold(true, |ok, &j| Ok(ok && psc.verify_loop_lemma(j)?.ok())),
    ));
    let all = checks.iter().all(|c| matches!(c.1, Ok(true)));
    let line = |(name, r): &(&str, Result<bool, Error>)| match r {
        Ok(true) => format!("ok      {name}"),
        Ok(false) => format!("FAILED  {name}"),
        Err(e) => format!("ERROR   {name}: {e}"),
    };
    let text = checks.iter().map(line).collect::<Vec<_>>().join("\n");
    let json = json!({
        "checks": checks.iter().map(|(n, r)| json!({
            "name": n,
            "ok": matches!(r, Ok(true)),
            "error": r.as_ref().err().map(|e| e.to_string()),
        })).collect::<Vec<_>>(),
        "all_ok": all,
    });
    if all {
        Ok(Output::new(text, json))
    } else {
        Err(Failure::Domain(Error::Invalid(format!("self-check failed\n{text}"))))
    }
}

fn verify_search() -> Result<bool, Error> {
    let t = BruteTable::build(6, 5)?;
    for k in 0..=6usize {
        for v in 0..1u64 << k {
            let x = BitString::from_value(v, k);
            if Some(acsearch::exact_a(&x)?.value) != t.value(&x) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn verify_sampled(seed: u64) -> Result<bool, Error> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    for _ in 0..10 {
        let len = rng.gen_range(7..=8);
        let x = BitString::from_bits((0..len).map(|_| rng.gen::<bool>()));
        let e = acsearch::exact_a(&x)?.value;
        let b = brute_a(&x, 4)?.map(|r| r.value);
        if b.is_some_and(|b| b != e) || (b.is_none() && e <= 4) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn verify_cases(psc: &Psc, cfg: &Config) -> Result<bool, Error> {
    for (case, n) in [(1u8, 4u64), (2, 3), (3, 6), (4, 5)] {
        let spec = build_case(case, n, &BigUint::zero())?;
        let c = check_materialized(&spec, psc, cfg.state_budget)?;
        if !c.unique || c.solutions != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn verify_mhat() -> Result<bool, Error> {
    let spec = build_mhat()?;
    let cert = acceptance_length_equation(&spec, &psc::cumulative_length_closed(65))?;
    let want: Vec<BigUint> = [2u32, 3, 9, 13].map(BigUint::from).to_vec();
    Ok(cert.solutions == vec![want] && quoted_n2() < quoted_n1())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        call_with(args, "")
    }

    fn call_with(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("autoplex").chain(args.iter().copied());
        let code = dispatch_with_input(argv, &mut stdin.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn debruijn_text() {
        assert_eq!(call(&["debruijn", "--order", "3"]), (0, "00010111\n".into(), String::new()));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["debruijn"]).0, 2);
        assert_eq!(call(&["--format", "xml", "debruijn", "--order", "3"]).0, 2);
        assert_eq!(call(&["debruijn", "--order", "3", "--start-bit", "2"]).0, 2);
        assert_eq!(call(&["debruijn", "--order", "3", "--format", "csv"]).0, 2);
    }

    #[test]
    fn domain_errors_exit_one() {
        let (code, _, err) = call(&["debruijn", "--order", "0"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error:"));
        assert_eq!(call(&["acx", "exact", "--string", &"0".repeat(19)]).0, 1);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("witness"));
    }

    #[test]
    fn dfa_count_from_stdin() {
        let m = r#"{"states":2,"start":0,"accept":[0],"delta":[[0,1],[1,1]]}"#;
        let (code, out, _) = call_with(&["dfa", "count", "--length", "5", "--string", "00000"], m);
        assert_eq!(code, 0);
        assert_eq!(out, "1\nunique: true\n");
    }
}
