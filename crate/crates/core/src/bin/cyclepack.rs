use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use cyclepack::dtd::validate_dtd;
use cyclepack::flatwall::{
    nonstrong_case_pack, strong_case_pack, theorem_dispatch, weak_flat_check, CaseCertificate, FlatContext, Route,
    TheoremMode,
};
use cyclepack::gen::{
    gen_complete, gen_d, gen_equal_length_wall, gen_f, gen_flat_instance, gen_grid, gen_nonstrong_instance,
    gen_wall_uniform, EqualLengthWall, FlatCase, LayeredDigraph,
};
use cyclepack::io::{
    extract_digraph, read_json, sha256_file, to_json, write_json, DecomposedDigraph, DispatchBundle, FlatBundle,
    PackResult, RunManifest,
};
use cyclepack::minors::{expand_model, ExpansionMix, MinorModel};
use cyclepack::oracle::{
    check_equal_length_wall, enum_cycles, layered_structure_check, no_equal_length_arcdisjoint,
    strong_after_single_deletions, verify_packing, CyclePacking, EqualLengthAudit, PackingClaim,
};
use cyclepack::selftest;
use cyclepack::{Error, Verdict};

#[derive(Parser)]
#[command(name = "cyclepack", version, about = "Disjoint directed cycles of pairwise distinct lengths")]
struct Cli {
    /// Write a run manifest (parameters, input digests, verdicts) here.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a fixture.
    Gen(GenArgs),
    /// Run a packing pipeline on a certificate.
    Pack(PackArgs),
    /// Check files and print a pass/fail JSON report.
    Verify(VerifyArgs),
    /// Re-emit the digraph inside any document as JSON or DOT.
    Export(ExportArgs),
    /// Run the acceptance suite.
    Selftest {
        /// Run only this criterion.
        #[arg(long)]
        only: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Complete,
    Grid,
    Wall,
    Fk,
    Dk,
    Eqwall,
    Flat,
    /// A dispatch certificate: a random butterfly-minor model of the
    /// complete digraph on `k` vertices.
    Minor,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    #[arg(long)]
    k: Option<usize>,
    /// Half the number of layers of D_k.
    #[arg(long = "N")]
    n: Option<u64>,
    /// Flat gadget case: 1..6 or dense.
    #[arg(long)]
    case: Option<FlatCase>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Subdivision length of every wall link.
    #[arg(long, default_value_t = 1)]
    len: usize,
    /// Flat fixture of order 8 with a forward and a reverse gadget.
    #[arg(long)]
    nonstrong: bool,
    /// Expansion steps for `minor`.
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PackMode {
    Strong,
    Nonstrong,
    Dispatch,
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Conn,
    Sem,
}

#[derive(Args)]
struct PackArgs {
    #[arg(long)]
    mode: PackMode,
    #[arg(long)]
    cert: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "conn")]
    theorem: Theorem,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    /// First file: the digraph source; every further file: a packing.
    Packing,
    Flat,
    Dtd,
    Dk,
    Eqwall,
}

#[derive(Args)]
struct VerifyArgs {
    kind: VerifyKind,
    #[arg(long = "in", num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    /// Cycles sampled per layered digraph.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// What a command leaves behind for the manifest.
#[derive(Default)]
struct Run {
    inputs: Vec<PathBuf>,
    outputs: Vec<String>,
    verdicts: Vec<Verdict>,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Format(_) | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn emit(text: &str, out: Option<&Path>, run: &mut Run) -> CmdResult {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            run.outputs.push(p.display().to_string());
        }
        None => out_stdout(text),
    }
    Ok(())
}

/// Stdout closed early (a pager, `head`) is not an error.
fn out_stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn need_k(k: Option<usize>) -> Result<usize, Failure> {
    k.ok_or_else(|| Failure::Usage("--k is required".into()))
}

fn gen(a: &GenArgs, run: &mut Run) -> CmdResult {
    let text = match a.kind {
        GenKind::Complete => to_json(&gen_complete(need_k(a.k)?)?)?,
        GenKind::Grid => to_json(&gen_grid(need_k(a.k)?)?)?,
        GenKind::Wall => to_json(&gen_wall_uniform(need_k(a.k)?, a.len)?)?,
        GenKind::Fk => {
            let (digraph, decomposition) = gen_f(need_k(a.k)?)?;
            to_json(&DecomposedDigraph { digraph, decomposition })?
        }
        GenKind::Dk => to_json(&gen_d(need_k(a.k)?, a.n)?)?,
        GenKind::Eqwall => to_json(&gen_equal_length_wall(need_k(a.k)?)?)?,
        GenKind::Flat => {
            let case = a.case.ok_or_else(|| Failure::Usage("--case is required".into()))?;
            if a.nonstrong {
                to_json(&gen_nonstrong_instance(case, a.seed, false)?)?
            } else {
                to_json(&gen_flat_instance(need_k(a.k)?, case, a.seed)?)?
            }
        }
        GenKind::Minor => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let model = expand_model(need_k(a.k)?, a.steps, ExpansionMix::ALL, &mut rng)?;
            to_json(&DispatchBundle {
                digraph: model.source.clone(),
                certificate: CaseCertificate::Minor { model },
                mode: None,
            })?
        }
    };
    emit(&text, a.out.as_deref(), run)
}

/// A dispatch certificate from a bundle, a bare minor model, a digraph
/// with a decomposition, or a digraph with a wall.
fn load_dispatch(path: &Path) -> Result<DispatchBundle, Failure> {
    let v: Value = read_json(path)?;
    let parse_err = |e: serde_json::Error| Failure::Usage(format!("{}: {e}", path.display()));
    if v.get("certificate").is_some() {
        return serde_json::from_value(v).map_err(parse_err);
    }
    if v.get("ops").is_some() {
        let model: MinorModel = serde_json::from_value(v).map_err(parse_err)?;
        return Ok(DispatchBundle { digraph: model.source.clone(), certificate: CaseCertificate::Minor { model }, mode: None });
    }
    if v.get("decomposition").is_some() {
        let b: DecomposedDigraph = serde_json::from_value(v).map_err(parse_err)?;
        return Ok(DispatchBundle {
            digraph: b.digraph,
            certificate: CaseCertificate::Dtd { decomposition: b.decomposition },
            mode: None,
        });
    }
    if v.get("wall").is_some() {
        let b: FlatBundle = serde_json::from_value(v).map_err(parse_err)?;
        return Ok(DispatchBundle {
            digraph: b.digraph,
            certificate: CaseCertificate::Flat { removed: Vec::new(), wall: b.wall },
            mode: None,
        });
    }
    Err(Failure::Usage(format!("{}: not a dispatch certificate", path.display())))
}

fn pack(a: &PackArgs, run: &mut Run) -> CmdResult {
    run.inputs.push(a.cert.clone());
    let (digraph, pipeline, route, cycles) = match a.mode {
        PackMode::Strong | PackMode::Nonstrong => {
            let b: FlatBundle = read_json(&a.cert)?;
            let ctx = FlatContext::new(b.digraph.clone(), b.wall)?;
            let (pipeline, pack, route) = match a.mode {
                PackMode::Strong => {
                    let order = ctx.wall.order;
                    let k = a.k.unwrap_or(order.saturating_sub(2) / 3);
                    ("strong", strong_case_pack(&ctx, k)?, Route::StrongWall)
                }
                _ => ("nonstrong", nonstrong_case_pack(&ctx)?, Route::NonstrongWall),
            };
            (b.digraph, pipeline, route, pack.cycles)
        }
        PackMode::Dispatch => {
            let b = load_dispatch(&a.cert)?;
            let mode = match (a.theorem, b.mode) {
                (Theorem::Sem, _) => TheoremMode::MainSem,
                (Theorem::Conn, _) if a.k.is_some() => TheoremMode::MainConn { k: need_k(a.k)? },
                (Theorem::Conn, Some(m)) => m,
                (Theorem::Conn, None) => return Err(Failure::Usage("--k is required".into())),
            };
            let out = theorem_dispatch(&b.digraph, &b.certificate, mode)?;
            (b.digraph, "dispatch", out.route, out.cycles)
        }
    };
    let claim = PackingClaim::DistinctLengths;
    let verdict = verify_packing(&digraph, &CyclePacking { cycles: cycles.clone(), claim: claim.clone() });
    let result = PackResult {
        pipeline: pipeline.into(),
        route: Some(route),
        lengths: cycles.iter().map(|c| c.len()).collect(),
        cycles,
        claim,
        verdict: verdict.clone(),
    };
    emit(&to_json(&result)?, a.out.as_deref(), run)?;
    run.verdicts.push(verdict.clone());
    if verdict.ok {
        Ok(())
    } else {
        Err(Failure::Check(verdict.violation.unwrap_or_default()))
    }
}

fn report(file: &Path, verdict: Verdict, extra: Value) -> Value {
    let mut v = json!({ "file": file.display().to_string(), "ok": verdict.ok });
    if let Some(msg) = verdict.violation {
        v["violation"] = json!(msg);
    }
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn verify_one(kind: VerifyKind, path: &Path, samples: usize) -> Result<Value, Failure> {
    Ok(match kind {
        VerifyKind::Packing => unreachable!("handled with its source"),
        VerifyKind::Flat => {
            let b: FlatBundle = read_json(path)?;
            match FlatContext::new(b.digraph, b.wall) {
                Ok(ctx) => {
                    let r = weak_flat_check(&ctx);
                    let verdict = match r.pair {
                        None => Verdict::pass(),
                        Some((x, y)) => Verdict::fail(format!("outside path joins {x} and {y}, which share no brick")),
                    };
                    report(path, verdict, json!({ "order": ctx.wall.order }))
                }
                Err(e) => report(path, Verdict::fail(e.to_string()), json!({})),
            }
        }
        VerifyKind::Dtd => {
            let b: DecomposedDigraph = read_json(path)?;
            match validate_dtd(&b.digraph, &b.decomposition) {
                Ok(w) => report(path, Verdict::pass(), json!({ "width": w })),
                Err(e) => report(path, Verdict::fail(e.to_string()), json!({})),
            }
        }
        VerifyKind::Dk => {
            let ld: LayeredDigraph = read_json(path)?;
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let mut verdict = layered_structure_check(&ld, samples, &mut rng);
            let mut extra = json!({ "vertices": ld.digraph.n(), "samples": samples });
            if verdict.ok && ld.digraph.n() <= 4096 {
                verdict = strong_after_single_deletions(&ld.digraph);
                extra["single_deletions"] = json!(ld.digraph.n());
            }
            if verdict.ok {
                match no_equal_length_arcdisjoint(&ld.digraph, 100_000) {
                    EqualLengthAudit::Verified { cycles } => extra["exhaustive_cycles"] = json!(cycles),
                    EqualLengthAudit::Refuted { first, second } => {
                        verdict = Verdict::fail(format!(
                            "arc-disjoint cycles {:?} and {:?} share a length",
                            first.vertices, second.vertices
                        ))
                    }
                    EqualLengthAudit::Inconclusive { .. } => extra["exhaustive_cycles"] = Value::Null,
                }
            }
            report(path, verdict, extra)
        }
        VerifyKind::Eqwall => {
            let e: EqualLengthWall = read_json(path)?;
            let mut verdict = check_equal_length_wall(&e);
            let mut extra = json!({ "L": e.target_length });
            if verdict.ok {
                if let Some(cycles) = enum_cycles(&e.wall.host, 100_000).complete() {
                    extra["cycles"] = json!(cycles.len());
                    if let Some(c) = cycles.iter().find(|c| c.len() != e.target_length) {
                        verdict = Verdict::fail(format!("cycle of length {}", c.len()));
                    }
                }
            }
            report(path, verdict, extra)
        }
    })
}

fn verify(a: &VerifyArgs, run: &mut Run) -> CmdResult {
    run.inputs.extend(a.inputs.iter().cloned());
    let mut results = Vec::new();
    if let VerifyKind::Packing = a.kind {
        if a.inputs.len() < 2 {
            return Err(Failure::Usage("verify packing needs a source file and at least one packing".into()));
        }
        let src: Value = read_json(&a.inputs[0])?;
        let d = extract_digraph(&src)?;
        for p in &a.inputs[1..] {
            let packing: CyclePacking = read_json(p)?;
            let verdict = verify_packing(&d, &packing);
            run.verdicts.push(verdict.clone());
            results.push(report(p, verdict, json!({ "cycles": packing.cycles.len() })));
        }
    } else {
        for p in &a.inputs {
            let r = verify_one(a.kind, p, a.samples)?;
            run.verdicts.push(Verdict { ok: r["ok"] == json!(true), violation: r["violation"].as_str().map(String::from) });
            results.push(r);
        }
    }
    let ok = results.iter().all(|r| r["ok"] == json!(true));
    let text = serde_json::to_string_pretty(&json!({ "ok": ok, "results": results })).expect("json value");
    out_stdout(&format!("{text}\n"));
    if ok {
        Ok(())
    } else {
        Err(Failure::Check("verification failed".into()))
    }
}

fn export(a: &ExportArgs, run: &mut Run) -> CmdResult {
    run.inputs.push(a.input.clone());
    let v: Value = read_json(&a.input)?;
    let d = extract_digraph(&v)?;
    let text = match a.format {
        Format::Json => to_json(&d)?,
        Format::Dot => d.to_dot(),
    };
    emit(&text, a.out.as_deref(), run)
}

fn run_selftest(only: Option<usize>, run: &mut Run) -> CmdResult {
    let reports = match only {
        Some(id) => vec![selftest::run_criterion(id)?],
        None => selftest::run_all(),
    };
    for r in &reports {
        out_stdout(&format!(
            "criterion {} ({}): {} [{} ms] {}\n",
            r.id,
            r.name,
            if r.ok { "PASS" } else { "FAIL" },
            r.elapsed_ms,
            r.detail
        ));
        run.verdicts.push(if r.ok { Verdict::pass() } else { Verdict::fail(r.detail.clone()) });
    }
    if reports.iter().all(|r| r.ok) {
        Ok(())
    } else {
        Err(Failure::Check("acceptance suite failed".into()))
    }
}

fn write_manifest(path: &Path, argv: &[String], run: &Run, start: Instant) -> Result<(), Error> {
    let mut inputs = BTreeMap::new();
    for p in &run.inputs {
        inputs.insert(p.display().to_string(), sha256_file(p)?);
    }
    let manifest = RunManifest {
        command: argv.get(1).cloned().unwrap_or_default(),
        parameters: argv.iter().skip(2).cloned().collect(),
        inputs,
        outputs: run.outputs.clone(),
        verdicts: run.verdicts.clone(),
        wall_clock_ms: start.elapsed().as_millis(),
    };
    write_json(path, &manifest)
}

fn main() -> ExitCode {
    let start = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let mut run = Run::default();
    let res = match &cli.command {
        Command::Gen(a) => gen(a, &mut run),
        Command::Pack(a) => pack(a, &mut run),
        Command::Verify(a) => verify(a, &mut run),
        Command::Export(a) => export(a, &mut run),
        Command::Selftest { only } => run_selftest(*only, &mut run),
    };
    if let Some(path) = &cli.manifest {
        if let Err(e) = write_manifest(path, &argv, &run, start) {
            eprintln!("error: manifest: {e}");
            return ExitCode::from(2);
        }
    }
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
