//! Batch command-line front end: reads JSON from a file or stdin, writes a
//! JSON payload, and reports a status code.

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::field::Field;
use crate::graded::{coherence_probe, colon_degree_ideal, GradedModule, GradedModuleSpec, MonoidIdeal};
use crate::infquot::{delta_points, is_infinite_quotient, FamilySpec, InfquotVerdict, TruncatedProfiniteElement};
use crate::kummer::{picard_group, HomSpec, MonoidHom};
use crate::lattice::RationalVector;
use crate::monoid::{MonoidPresentation, MonoidSpec};
use crate::parabolic::{hom_space, ParabolicSheaf, ParabolicSpec};

/// Exit status of a successful command.
pub const EXIT_OK: i32 = 0;
/// Malformed input: unreadable file, bad JSON, bad flags.
pub const EXIT_PARSE: i32 = 1;
/// A semantic precondition failed (for example a non-sharp monoid).
pub const EXIT_SEMANTIC: i32 = 2;
/// The infinite-quotient test was inconclusive at the given level.
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Environment variable naming the default coefficient field.
pub const FIELD_ENV: &str = "MONOSTACK_FIELD";

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub status: i32,
    pub payload: Value,
    pub summary: String,
}

#[derive(Debug, Parser)]
#[command(name = "monostack", version, about = "Monoid combinatorics of infinite root stacks")]
struct Cli {
    /// Pretty-print the payload and write a human-readable summary to stderr.
    #[arg(long, global = true)]
    pretty: bool,
    /// Coefficient field, `Q` or `Fp:<p>` (overrides input files and the
    /// MONOSTACK_FIELD variable).
    #[arg(long, global = true)]
    field: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input JSON file; stdin when absent or `-`.
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LevelArgs {
    input: Option<PathBuf>,
    #[arg(long)]
    level: u64,
}

#[derive(Debug, Args)]
struct OptionalLevelArgs {
    input: Option<PathBuf>,
    #[arg(long)]
    level: Option<u64>,
}

#[derive(Debug, Args)]
struct DepthArgs {
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    depth: u64,
}

#[derive(Debug, Args)]
struct LevelsArgs {
    input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4])]
    levels: Vec<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monoid structure.
    #[command(subcommand)]
    Monoid(MonoidCommand),
    /// Points of Δ_P ∩ 1/n P.
    Delta(LevelArgs),
    /// Points of Δ_P⁰ ∩ 1/n P.
    Delta0(LevelArgs),
    /// Infinite quotients.
    #[command(subcommand)]
    Infquot(InfquotCommand),
    /// Kummer homomorphisms.
    #[command(subcommand)]
    Kummer(KummerCommand),
    /// The grading group (1/n P)^gp / P^gp.
    Picard(LevelArgs),
    /// Monoid ideals.
    #[command(subcommand)]
    Ideal(IdealCommand),
    /// Coherence probes.
    #[command(subcommand)]
    Probe(ProbeCommand),
    /// Parabolic sheaves over the log point.
    #[command(subcommand)]
    Parabolic(ParabolicCommand),
}

#[derive(Debug, Subcommand)]
enum MonoidCommand {
    /// Ranks, flags, facets, extreme rays and Hilbert basis.
    Info(InputArgs),
    /// The Hilbert basis.
    Hilbert(InputArgs),
    /// The saturation, as a monoid.
    Saturate(InputArgs),
}

#[derive(Debug, Subcommand)]
enum InfquotCommand {
    /// Decide whether a truncated family comes from an element of P.
    Check(DepthArgs),
}

#[derive(Debug, Subcommand)]
enum KummerCommand {
    /// Decide whether a homomorphism is Kummer.
    Check(InputArgs),
}

#[derive(Debug, Subcommand)]
enum IdealCommand {
    /// Minimal generators of an ideal of 1/n P.
    Mingens(LevelArgs),
}

#[derive(Debug, Subcommand)]
enum ProbeCommand {
    /// Minimal-generator counts of a colon-degree ideal per level.
    Coherence(LevelsArgs),
}

#[derive(Debug, Subcommand)]
enum ParabolicCommand {
    /// Parabolic sheaf -> graded module.
    ToGraded(InputArgs),
    /// Graded module -> parabolic sheaf.
    FromGraded(InputArgs),
    /// Restriction to a divisor level.
    Restrict(LevelArgs),
    /// Induction to a multiple level.
    Induce(LevelArgs),
    /// Whether the sheaf is induced from a divisor level (all divisors
    /// when `--level` is absent).
    CheckInduced(OptionalLevelArgs),
    /// A basis of the homomorphisms between two sheaves.
    Hom(InputArgs),
}

#[derive(Debug, Deserialize)]
struct FamilyInput {
    monoid: MonoidSpec,
    #[serde(flatten)]
    family: FamilySpec,
}

#[derive(Debug, Deserialize)]
struct IdealInput {
    monoid: MonoidSpec,
    #[serde(default)]
    generators: Option<Vec<RationalVector>>,
    #[serde(default)]
    colon: Option<[RationalVector; 2]>,
}

#[derive(Debug, Deserialize)]
struct PairInput {
    monoid: MonoidSpec,
    pair: [RationalVector; 2],
}

#[derive(Debug, Deserialize)]
struct HomInput {
    source: ParabolicSpec,
    target: ParabolicSpec,
}

/// Failure inside a command, already classified by exit code.
struct Failure {
    status: i32,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => EXIT_PARSE,
            _ => EXIT_SEMANTIC,
        };
        let debug = format!("{e:?}");
        let kind = debug
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or("Error")
            .to_string();
        Failure {
            status,
            kind,
            message: e.to_string(),
        }
    }
}

fn parse_failure(kind: &str, message: String) -> Failure {
    Failure {
        status: EXIT_PARSE,
        kind: kind.into(),
        message,
    }
}

type Outcome = std::result::Result<(i32, Value, String), Failure>;

struct Context<'a> {
    field_flag: Option<Field>,
    default_field: Field,
    stdin: &'a mut dyn FnMut() -> std::io::Result<String>,
}

impl Context<'_> {
    fn read(&mut self, path: &Option<PathBuf>) -> std::result::Result<String, Failure> {
        match path {
            Some(p) if p.as_os_str() != "-" => {
                std::fs::read_to_string(p).map_err(|e| parse_failure("Io", format!("{}: {e}", p.display())))
            }
            _ => (self.stdin)().map_err(|e| parse_failure("Io", format!("stdin: {e}"))),
        }
    }

    fn json<T: serde::de::DeserializeOwned>(&mut self, path: &Option<PathBuf>) -> std::result::Result<T, Failure> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| parse_failure("Json", e.to_string()))
    }

    /// Flag, then the input's own field, then the default.
    fn field_for(&self, given: &Option<String>) -> std::result::Result<Option<String>, Failure> {
        if let Some(f) = self.field_flag {
            return Ok(Some(f.to_string()));
        }
        match given {
            Some(s) => Ok(Some(s.parse::<Field>()?.to_string())),
            None => Ok(Some(self.default_field.to_string())),
        }
    }

    fn sheaf(&mut self, path: &Option<PathBuf>) -> std::result::Result<ParabolicSheaf, Failure> {
        let mut spec: ParabolicSpec = self.json(path)?;
        self.sheaf_from(&mut spec)
    }

    fn sheaf_from(&self, spec: &mut ParabolicSpec) -> std::result::Result<ParabolicSheaf, Failure> {
        spec.field = self.field_for(&spec.field)?;
        Ok(ParabolicSheaf::from_spec(spec)?)
    }
}

fn monoid(spec: &MonoidSpec) -> std::result::Result<MonoidPresentation, Failure> {
    Ok(MonoidPresentation::from_spec(spec)?)
}

fn ok(payload: Value, summary: String) -> Outcome {
    Ok((EXIT_OK, payload, summary))
}

fn dispatch(cli: Cli, ctx: &mut Context) -> Outcome {
    match cli.command {
        Command::Monoid(cmd) => match cmd {
            MonoidCommand::Info(a) => {
                let p = monoid(&ctx.json(&a.input)?)?;
                let (sharp, saturated, simplicial) = (p.is_sharp(), p.is_saturated(), p.is_simplicial());
                let hb = p.hilbert_basis_unchecked().to_vec();
                let summary = format!(
                    "rank {} in Z^{}; sharp: {sharp}, saturated: {saturated}, simplicial: {simplicial}; {} Hilbert basis elements",
                    p.group_rank(),
                    p.ambient_rank(),
                    hb.len()
                );
                ok(
                    json!({
                        "monoid": p.to_spec(),
                        "ambient_rank": p.ambient_rank(),
                        "group_rank": p.group_rank(),
                        "flags": {"sharp": sharp, "saturated": saturated, "simplicial": simplicial},
                        "facets": p.cone().facets(),
                        "extreme_rays": p.cone().extreme_rays(),
                        "hilbert_basis": hb,
                    }),
                    summary,
                )
            }
            MonoidCommand::Hilbert(a) => {
                let p = monoid(&ctx.json(&a.input)?)?;
                let hb = p.hilbert_basis_unchecked().to_vec();
                let summary = format!("{} Hilbert basis elements", hb.len());
                ok(json!({ "hilbert_basis": hb }), summary)
            }
            MonoidCommand::Saturate(a) => {
                let p = monoid(&ctx.json(&a.input)?)?.saturate()?;
                let summary = format!("saturation generated by {} elements", p.generators().len());
                ok(json!(p.to_spec()), summary)
            }
        },
        Command::Delta(a) => {
            let p = monoid(&ctx.json(&a.input)?)?;
            let d = delta_points(&p, a.level)?;
            let points: Vec<Value> = (0..d.len())
                .map(|i| {
                    json!({
                        "point": d.point(i),
                        "label": d.label(i).residues(),
                        "delta0": d.in_delta0(i),
                    })
                })
                .collect();
            let summary = format!("{} points of Δ at level {}", d.len(), a.level);
            ok(json!({ "level": a.level, "count": d.len(), "points": points }), summary)
        }
        Command::Delta0(a) => {
            let p = monoid(&ctx.json(&a.input)?)?;
            let pts = delta_points(&p, a.level)?.delta0_points();
            let summary = format!("{} points of Δ⁰ at level {}", pts.len(), a.level);
            ok(json!({ "level": a.level, "count": pts.len(), "points": pts }), summary)
        }
        Command::Infquot(InfquotCommand::Check(a)) => {
            let input: FamilyInput = ctx.json(&a.input)?;
            let p = monoid(&input.monoid)?;
            let x = TruncatedProfiniteElement::from_spec(&p, &input.family)?;
            let verdict = is_infinite_quotient(&x, a.depth)?;
            let status = verdict.status();
            match verdict {
                InfquotVerdict::ConfirmedElement(e) => ok(
                    json!({ "verdict": status, "element": e.vector() }),
                    format!("the family comes from {:?}", e.vector()),
                ),
                InfquotVerdict::NotAnInfiniteQuotient { obstructions } => {
                    let obs: Vec<Value> = obstructions.iter().map(|(m, j)| json!({"m0": m, "j": j})).collect();
                    ok(
                        json!({ "verdict": status, "obstructions": obs }),
                        format!("not an infinite quotient ({} obstructions)", obs.len()),
                    )
                }
                InfquotVerdict::InconclusiveAtLevel(n) => Ok((
                    EXIT_INCONCLUSIVE,
                    json!({ "verdict": status, "level": n }),
                    format!("inconclusive at level {n}"),
                )),
            }
        }
        Command::Kummer(KummerCommand::Check(a)) => {
            let spec: HomSpec = ctx.json(&a.input)?;
            let h = MonoidHom::from_spec(&spec)?;
            let kummer = h.is_kummer();
            let cokernel = h.cokernel().ok().map(|g| g.invariant_factors);
            let summary = format!("Kummer: {kummer}");
            ok(json!({ "kummer": kummer, "cokernel": cokernel }), summary)
        }
        Command::Picard(a) => {
            let p = monoid(&ctx.json(&a.input)?)?;
            let g = picard_group(&p, a.level)?;
            let summary = if g.is_trivial() {
                "trivial group".to_string()
            } else {
                let parts: Vec<String> = g.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
                parts.join(" x ")
            };
            ok(
                json!({ "level": a.level, "invariant_factors": g.invariant_factors, "order": g.order() }),
                summary,
            )
        }
        Command::Ideal(IdealCommand::Mingens(a)) => {
            let input: IdealInput = ctx.json(&a.input)?;
            let p = monoid(&input.monoid)?;
            let ideal = match (&input.generators, &input.colon) {
                (Some(g), None) => MonoidIdeal::generated(&p, a.level, g)?,
                (None, Some([x, y])) => colon_degree_ideal(&p, a.level, x, y)?,
                _ => {
                    return Err(parse_failure(
                        "Json",
                        "give exactly one of \"generators\" and \"colon\"".into(),
                    ))
                }
            };
            let gens = ideal.min_generators()?;
            let summary = format!("{} minimal generators at level {}", gens.len(), a.level);
            ok(
                json!({ "level": a.level, "count": gens.len(), "generators": gens }),
                summary,
            )
        }
        Command::Probe(ProbeCommand::Coherence(a)) => {
            let input: PairInput = ctx.json(&a.input)?;
            let p = monoid(&input.monoid)?;
            let table = coherence_probe(&p, &input.pair[0], &input.pair[1], &a.levels)?;
            let counts: Vec<String> = table.rows.iter().map(|r| format!("{}:{}", r.n, r.min_gens)).collect();
            let summary = format!("min_gens per level {}", counts.join(" "));
            ok(json!(table), summary)
        }
        Command::Parabolic(cmd) => match cmd {
            ParabolicCommand::ToGraded(a) => {
                let e = ctx.sheaf(&a.input)?;
                let m = e.to_graded()?;
                let summary = format!("graded module of total dimension {}", m.total_dim());
                ok(json!(m.to_spec()), summary)
            }
            ParabolicCommand::FromGraded(a) => {
                let mut spec: GradedModuleSpec = ctx.json(&a.input)?;
                spec.field = ctx.field_for(&spec.field)?;
                let m = GradedModule::from_spec(&spec)?;
                let e = ParabolicSheaf::from_graded(&m);
                let summary = format!("parabolic sheaf of total dimension {}", e.total_dim());
                ok(json!(e.to_spec()), summary)
            }
            ParabolicCommand::Restrict(a) => {
                let e = ctx.sheaf(&a.input)?.restrict(a.level)?;
                let summary = format!("restricted to level {}", a.level);
                ok(json!(e.to_spec()), summary)
            }
            ParabolicCommand::Induce(a) => {
                let e = ctx.sheaf(&a.input)?.induce(a.level)?;
                let summary = format!("induced to level {}", a.level);
                ok(json!(e.to_spec()), summary)
            }
            ParabolicCommand::CheckInduced(a) => {
                let e = ctx.sheaf(&a.input)?;
                let candidates = match a.level {
                    Some(m) => vec![m],
                    None => crate::infquot::divisors(e.level()),
                };
                let mut checked = Vec::new();
                let mut minimal = None;
                for m in candidates {
                    let induced = e.is_induced_from(m)?;
                    if induced && minimal.is_none() {
                        minimal = Some(m);
                    }
                    checked.push(json!({ "n": m, "induced": induced }));
                }
                let summary = match minimal {
                    Some(m) => format!("induced from level {m}"),
                    None => "not induced from the tested levels".into(),
                };
                ok(
                    json!({ "level": e.level(), "checked": checked, "minimal": minimal }),
                    summary,
                )
            }
            ParabolicCommand::Hom(a) => {
                let mut input: HomInput = ctx.json(&a.input)?;
                let s = ctx.sheaf_from(&mut input.source)?;
                let t = ctx.sheaf_from(&mut input.target)?;
                let basis = hom_space(&s, &t)?;
                let maps: Vec<Value> = basis
                    .iter()
                    .map(|f| {
                        let blocks: serde_json::Map<String, Value> = f
                            .blocks()
                            .iter()
                            .enumerate()
                            .filter(|(_, b)| !b.is_zero())
                            .map(|(l, b)| {
                                let rows: Vec<Vec<String>> = b
                                    .to_rows()
                                    .iter()
                                    .map(|r| r.iter().map(crate::field::format_rat).collect())
                                    .collect();
                                (s.representative(l).to_string(), json!(rows))
                            })
                            .collect();
                        Value::Object(blocks)
                    })
                    .collect();
                let summary = format!("Hom has dimension {}", basis.len());
                ok(json!({ "dimension": basis.len(), "basis": maps }), summary)
            }
        },
    }
}

/// Run one invocation; `argv[0]` is the program name. Inputs not given as
/// files are read through `stdin`.
pub fn run_with_stdin(argv: &[String], stdin: &mut dyn FnMut() -> std::io::Result<String>) -> CommandResult {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let status = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_PARSE,
            };
            return CommandResult {
                status,
                payload: Value::Null,
                summary: e.to_string(),
            };
        }
    };
    let field_flag = match cli.field.as_deref().map(str::parse::<Field>).transpose() {
        Ok(f) => f,
        Err(e) => return failure(e.into()),
    };
    let default_field = match std::env::var(FIELD_ENV) {
        Ok(s) => match s.parse() {
            Ok(f) => f,
            Err(e) => return failure(Failure::from(e)),
        },
        Err(_) => Field::Rational,
    };
    let mut ctx = Context {
        field_flag,
        default_field,
        stdin,
    };
    match dispatch(cli, &mut ctx) {
        Ok((status, payload, summary)) => CommandResult {
            status,
            payload,
            summary,
        },
        Err(f) => failure(f),
    }
}

fn failure(f: Failure) -> CommandResult {
    CommandResult {
        status: f.status,
        payload: json!({ "error": { "kind": f.kind, "message": f.message } }),
        summary: format!("error: {}", f.message),
    }
}

/// Run one invocation reading stdin when needed.
pub fn run(argv: &[String]) -> CommandResult {
    run_with_stdin(argv, &mut || {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    })
}

/// Whether `--pretty` was requested (for the binary's output formatting).
pub fn wants_pretty(argv: &[String]) -> bool {
    argv.iter().skip(1).any(|a| a == "--pretty")
}
