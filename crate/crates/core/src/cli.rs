//! The `tourney` command line. [`run`] is callable in-process and returns
//! the exit code together with everything that would go to stdout.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{optimize_alpha, theorem1_verify};
use crate::census::{census_bruteforce, census_document, census_fast, count_pattern, verify_lifting_identities};
use crate::constructions::{
    carousel, carousel_class, is_near_regular, iterated_blowup, random_tournament, transitive, Alpha,
    BlowupSpec,
};
use crate::diagnostics::{degree_report, diagnose};
use crate::error::{Error, Result};
use crate::format;
use crate::pattern::PatternId;
use crate::rational::parse_decimal;
use crate::search::{enumerate_classes, enumerate_tournaments, exhaustive_max, local_search, max_table, LocalSearchConfig, MoveSet};
use crate::tournament::Tournament;

#[derive(Parser, Debug)]
#[command(name = "tourney", version, about = "Induced subtournament counts, constructions and audits")]
pub struct Cli {
    /// Worker threads (defaults to available parallelism).
    #[arg(long, global = true, env = "TOURNEY_THREADS")]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a tournament and write it in tour/1 format.
    Construct(ConstructArgs),
    /// Exact census of every tournament in a file.
    Count(CountArgs),
    /// Maximise the number of induced copies of a pattern.
    Maximize(MaximizeArgs),
    /// Degree bands, cut, quasi-randomness and inequality audits.
    Diagnose(DiagnoseArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Optimise the blow-up fraction.
    OptimizeAlpha(OptimizeArgs),
    /// All tournaments on n vertices up to isomorphism.
    Enumerate(EnumerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Transitive,
    Carousel,
    CarouselClass,
    Random,
    Iterated,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "auto")]
    pub alpha: String,
    #[arg(long, default_value_t = 4)]
    pub base_cutoff: usize,
    /// Output file; tour/1 text goes to stdout when omitted.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
    /// Level sidecar for `iterated` (default: `<output>.levels.json`).
    #[arg(long)]
    pub levels: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Use the 4-subset enumeration instead of the fast census.
    #[arg(long)]
    pub bruteforce: bool,
    /// Also count this pattern (named or `custom:<n>:<bits>`).
    #[arg(long)]
    pub pattern: Option<String>,
}

#[derive(Args, Debug)]
pub struct MaximizeArgs {
    #[arg(long)]
    pub pattern: String,
    #[arg(long)]
    pub n: usize,
    /// With `--exhaustive`, tabulate every n from here up to `--n`.
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long, conflicts_with = "local")]
    pub exhaustive: bool,
    #[arg(long)]
    pub local: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value = "arc_flip")]
    pub moves: String,
    #[arg(long)]
    pub first_improvement: bool,
    #[arg(long)]
    pub plateau_budget: Option<usize>,
    #[arg(long)]
    pub audit: bool,
    /// Directory receiving maximizers / witnesses as tour/1 files.
    #[arg(long)]
    pub emit_witnesses: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Density tolerance (default 4/sqrt(n)).
    #[arg(long)]
    pub tol: Option<String>,
    /// Normalised out-degree threshold for the cut.
    #[arg(long)]
    pub threshold: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Theorem1,
    Prop1,
    Lifting,
    CensusOracle,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => return (2, format!("error: cannot start thread pool: {e}\n")),
    };
    match pool.install(|| dispatch(&cli)) {
        Ok((ok, out)) => (if ok { 0 } else { 1 }, out),
        Err(e) => (1, format!("error: {e}\n")),
    }
}

fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serialisable");
    s.push('\n');
    s
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn dispatch(cli: &Cli) -> Result<(bool, String)> {
    let fmt = cli.format;
    match &cli.command {
        Command::Construct(a) => construct(a).map(|s| (true, s)),
        Command::Count(a) => count(a, fmt).map(|s| (true, s)),
        Command::Maximize(a) => maximize(a, fmt).map(|s| (true, s)),
        Command::Diagnose(a) => diagnose_cmd(a, fmt).map(|s| (true, s)),
        Command::Verify(a) => {
            let doc = verify(a.suite, a.n_max)?;
            let pass = doc["pass"].as_bool().unwrap_or(false);
            Ok((pass, render(&doc)))
        }
        Command::OptimizeAlpha(a) => {
            let r = optimize_alpha(a.tol)?;
            Ok((true, render(&json!(r))))
        }
        Command::Enumerate(a) => {
            let ts = enumerate_tournaments(a.n)?;
            match &a.output {
                Some(p) => {
                    format::write_file(p, &ts)?;
                    Ok((true, render(&json!({"n": a.n, "classes": ts.len(), "output": p}))))
                }
                None => Ok((true, format::write_string(&ts))),
            }
        }
    }
}

fn construct(a: &ConstructArgs) -> Result<String> {
    if a.n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let alpha: Alpha = a.alpha.parse()?;
    let mut sidecar = None;
    let ts: Vec<Tournament> = match a.kind {
        Kind::Transitive => vec![transitive(a.n)],
        Kind::Carousel if a.n < 3 => {
            return Err(Error::Domain(format!("carousel needs n >= 3, got {}", a.n)));
        }
        Kind::Carousel => vec![carousel(a.n)],
        Kind::CarouselClass => carousel_class(a.n)?.iter().map(|c| c.to_tournament()).collect(),
        Kind::Random => vec![random_tournament(a.n, a.seed)],
        Kind::Iterated => {
            let mut spec = BlowupSpec::new(a.n, alpha, a.seed);
            spec.base_cutoff = a.base_cutoff;
            let b = iterated_blowup(&spec)?;
            sidecar = Some(json!({
                "n": a.n,
                "alpha": spec.alpha.value(),
                "seed": a.seed,
                "base_cutoff": spec.base_cutoff,
                "plan": spec.levels(),
                "levels": b.levels,
            }));
            vec![b.tournament]
        }
    };
    let Some(out) = &a.output else {
        return Ok(format::write_string(&ts));
    };
    format::write_file(out, &ts)?;
    let mut doc = json!({
        "kind": format!("{:?}", a.kind).to_lowercase(),
        "n": a.n,
        "tournaments": ts.len(),
        "output": out,
    });
    if let Some(side) = sidecar {
        let path = a.levels.clone().unwrap_or_else(|| sidecar_path(out));
        std::fs::write(&path, render(&side))?;
        doc["levels"] = json!(path);
    }
    Ok(render(&doc))
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".levels.json");
    PathBuf::from(s)
}

fn count(a: &CountArgs, fmt: OutputFormat) -> Result<String> {
    let ts = format::read_file(&a.input)?;
    let pattern = a.pattern.as_deref().map(str::parse::<PatternId>).transpose()?;
    let censuses: Vec<_> = ts
        .iter()
        .map(|t| if a.bruteforce { census_bruteforce(t) } else { census_fast(t) })
        .collect();
    if fmt == OutputFormat::Csv {
        let rows = censuses.iter().map(|c| {
            vec![
                c.n.to_string(),
                c.tt3.to_string(),
                c.c3.to_string(),
                c.tt4.to_string(),
                c.c3plus.to_string(),
                c.c3minus.to_string(),
                c.c4.to_string(),
            ]
        });
        return Ok(csv(&["n", "tt3", "c3", "tt4", "c3plus", "c3minus", "c4"], rows));
    }
    let mut docs = Vec::new();
    for (t, c) in ts.iter().zip(&censuses) {
        let mut d = census_document(c);
        if let Some(p) = &pattern {
            d["pattern"] = json!({"name": p.name(), "count": count_pattern(p, t)?});
        }
        docs.push(d);
    }
    Ok(render(&json!({
        "method": if a.bruteforce { "bruteforce" } else { "fast" },
        "tournaments": docs,
    })))
}

fn maximize(a: &MaximizeArgs, fmt: OutputFormat) -> Result<String> {
    let pattern: PatternId = a.pattern.parse()?;
    if a.local {
        let mut cfg = LocalSearchConfig::new(a.seed, a.restarts);
        cfg.moves = a.moves.parse::<MoveSet>()?;
        cfg.first_improvement = a.first_improvement;
        cfg.plateau_budget = a.plateau_budget;
        cfg.audit = a.audit;
        let r = local_search(&pattern, a.n, &cfg)?;
        if let (Some(dir), Some(w)) = (&a.emit_witnesses, &r.witness) {
            std::fs::create_dir_all(dir)?;
            format::write_file(dir.join(format!("{}_n{}_local.tour", pattern.name(), a.n)), std::slice::from_ref(w))?;
        }
        return Ok(render(&r.to_json()));
    }
    if let Some(lo) = a.n_min {
        let rows = max_table(&pattern, lo..=a.n)?;
        if fmt == OutputFormat::Csv {
            let lines = rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    r.best_count.to_string(),
                    crate::rational::exact_string(&r.density),
                    crate::rational::to_f64(&r.density).to_string(),
                ]
            });
            return Ok(csv(&["n", "best_count", "density_exact", "density"], lines));
        }
        let docs: Vec<Value> = rows.iter().map(|r| r.to_json()).collect();
        return Ok(render(&json!({"pattern": pattern.name(), "table": docs})));
    }
    let r = exhaustive_max(&pattern, a.n)?;
    if let Some(dir) = &a.emit_witnesses {
        std::fs::create_dir_all(dir)?;
        let ts: Vec<Tournament> = r.maximizers.iter().map(|c| c.to_tournament()).collect();
        format::write_file(dir.join(format!("{}_n{}_maximizers.tour", pattern.name(), a.n)), &ts)?;
    }
    Ok(render(&r.to_json()))
}

fn diagnose_cmd(a: &DiagnoseArgs, fmt: OutputFormat) -> Result<String> {
    let ts = format::read_file(&a.input)?;
    let tol = a.tol.as_deref().map(parse_decimal).transpose()?;
    let threshold = a.threshold.as_deref().map(parse_decimal).transpose()?;
    if fmt == OutputFormat::Csv {
        let mut rows = Vec::new();
        for (idx, t) in ts.iter().enumerate() {
            let h = degree_report(t);
            for (k, &c) in h.bins.iter().enumerate() {
                rows.push(vec![idx.to_string(), format!("{:.2}", k as f64 * h.bin_width), c.to_string()]);
            }
        }
        return Ok(csv(&["tournament", "bin_start", "count"], rows));
    }
    let docs: Vec<Value> = ts.iter().map(|t| diagnose(t, tol.clone(), threshold.clone())).collect();
    Ok(render(&json!({"tournaments": docs})))
}

/// Number of seeded hosts in the lifting suite.
const LIFTING_RANDOM_HOSTS: u64 = 1000;

fn verify(suite: Suite, n_max: Option<usize>) -> Result<Value> {
    let doc = match suite {
        Suite::Theorem1 => {
            let rows = theorem1_verify(n_max.unwrap_or(8))?;
            let pass = rows.iter().all(|r| r.pass);
            json!({"suite": "theorem1", "pass": pass, "rows": rows})
        }
        Suite::Prop1 => {
            let hi = n_max.unwrap_or(7);
            let mut rows = Vec::new();
            for n in 3..=hi {
                let r = exhaustive_max(&PatternId::C3, n)?;
                let near: Vec<_> = enumerate_classes(n)?
                    .iter()
                    .filter(|c| is_near_regular(&c.to_tournament()))
                    .copied()
                    .collect();
                rows.push(json!({
                    "n": n,
                    "best_count": r.best_count,
                    "maximizers": r.maximizers.len(),
                    "near_regular_classes": near.len(),
                    "pass": r.maximizers == near,
                }));
            }
            let pass = rows.iter().all(|r| r["pass"] == true);
            json!({"suite": "prop1", "pass": pass, "rows": rows})
        }
        Suite::Lifting => {
            let hi = n_max.unwrap_or(7);
            let random_ok = (0..LIFTING_RANDOM_HOSTS)
                .filter(|&s| verify_lifting_identities(&random_tournament(25, s)))
                .count();
            let mut enumerated = Vec::new();
            for n in 1..=hi {
                let classes = enumerate_classes(n)?;
                let ok = classes
                    .iter()
                    .filter(|c| verify_lifting_identities(&c.to_tournament()))
                    .count();
                enumerated.push(json!({"n": n, "classes": classes.len(), "hold": ok}));
            }
            let pass = random_ok as u64 == LIFTING_RANDOM_HOSTS
                && enumerated.iter().all(|e| e["classes"] == e["hold"]);
            json!({
                "suite": "lifting",
                "pass": pass,
                "random": {"n": 25, "hosts": LIFTING_RANDOM_HOSTS, "hold": random_ok},
                "enumerated": enumerated,
            })
        }
        Suite::CensusOracle => {
            let corpus = oracle_corpus()?;
            let mismatches: Vec<Value> = corpus
                .iter()
                .filter(|(_, t)| census_fast(t) != census_bruteforce(t))
                .map(|(label, t)| json!({"label": label, "bits": t.to_bits()}))
                .collect();
            let mut kinds: Vec<&str> = corpus.iter().map(|(l, _)| l.split(':').next().unwrap()).collect();
            kinds.dedup();
            json!({
                "suite": "census-oracle",
                "pass": mismatches.is_empty(),
                "tournaments": corpus.len(),
                "kinds": kinds,
                "mismatches": mismatches,
            })
        }
        Suite::All => {
            let parts: Vec<Value> = [Suite::Theorem1, Suite::Prop1, Suite::Lifting, Suite::CensusOracle]
                .into_iter()
                .map(|s| verify(s, None))
                .collect::<Result<_>>()?;
            let pass = parts.iter().all(|p| p["pass"] == true);
            json!({"suite": "all", "pass": pass, "suites": parts})
        }
    };
    Ok(doc)
}

/// Labeled hosts with `4 <= n <= 30` covering every construction kind.
pub fn oracle_corpus() -> Result<Vec<(String, Tournament)>> {
    let mut out = Vec::new();
    for n in 4..=30 {
        for seed in 0..4u64 {
            out.push((format!("random:{n}:{seed}"), random_tournament(n, seed * 1000 + n as u64)));
        }
    }
    for n in 4..=30 {
        out.push((format!("transitive:{n}"), transitive(n)));
        out.push((format!("carousel:{n}"), carousel(n)));
    }
    for n in [6, 8, 10] {
        for (i, c) in carousel_class(n)?.iter().enumerate() {
            out.push((format!("carousel-class:{n}:{i}"), c.to_tournament()));
        }
    }
    for n in 4..=30 {
        for alpha in [Alpha::Auto, Alpha::Fixed(0.3)] {
            let spec = BlowupSpec::new(n, alpha, n as u64);
            out.push((format!("iterated:{n}:{:?}", alpha), iterated_blowup(&spec)?.tournament));
        }
    }
    for n in 4..=5 {
        for (i, t) in enumerate_tournaments(n)?.into_iter().enumerate() {
            out.push((format!("enumerated:{n}:{i}"), t));
        }
    }
    Ok(out)
}
