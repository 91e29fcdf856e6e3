//! Command-line front end for `chabauty-core`.

pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

use chabauty_core::cache::ProfileCache;
use chabauty_core::chabauty::{
    agreement_radius, closure_descent_suite, discreteness_check, local_two_transitivity, prime_content,
    quotient_graph, torsion_claim_check, valency_one_report, verify_pro_pi_transfer,
};
use chabauty_core::spec::t3_base;
use chabauty_core::{verify, EdgeIndexedGraph, Engine, Error, GroupSpec, Report, TreeBall};
use clap::{Parser, ValueEnum};

use config::{load_config, OutputMode, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Covering tree ball around a vertex of the base graph.
    Tree,
    /// Stabilizer (or moving, with --d) profile.
    Profile,
    /// k-closure profiles for k = 1..kmax.
    Closure,
    /// Profile of the +k subgroup.
    Plusk,
    /// Quotient edge-indexed graph.
    Quotient,
    /// Unimodularity of the base graph or of the spec's quotient.
    Unimodular,
    /// Agreement radius of --spec and --other.
    Agreement,
    /// Prime content of the layers; with --k > --r also the pro-π transfer.
    Primes,
    /// Torsion claim for every p in --pi.
    Torsion,
    /// Discreteness and local 2-transitivity.
    Discrete,
    /// Valency-1 experiment.
    Valency1,
    /// Full acceptance suite.
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "chabauty", version, about = "Finite local-action models of tree automorphism groups")]
pub struct Cli {
    pub command: Command,
    /// key=value file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base graph file (`v`/`e` lines).
    #[arg(long)]
    pub base: Option<String>,
    /// Spec expression, e.g. "universal a=Sym(3) b=Alt(3)".
    #[arg(long)]
    pub spec: Option<String>,
    /// Second spec for `agreement`.
    #[arg(long)]
    pub other: Option<String>,
    /// Root type, by name or index.
    #[arg(long)]
    pub root: Option<String>,
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub rmax: Option<String>,
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub kmax: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub depth: Option<String>,
    /// Prime set, e.g. 2,3.
    #[arg(long)]
    pub pi: Option<String>,
    /// text, json or dot.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub cache_dir: Option<String>,
    /// Maximal predicted number of portraits.
    #[arg(long)]
    pub capacity: Option<String>,
    #[arg(long)]
    pub threads: Option<String>,
}

impl Cli {
    /// Config file values overridden by flags.
    pub fn resolve(&self) -> Result<RunConfig, String> {
        let mut cfg = match &self.config {
            Some(p) => load_config(p)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("base", &self.base),
            ("spec", &self.spec),
            ("other", &self.other),
            ("root", &self.root),
            ("r", &self.r),
            ("rmax", &self.rmax),
            ("d", &self.d),
            ("k", &self.k),
            ("kmax", &self.kmax),
            ("n", &self.n),
            ("m", &self.m),
            ("depth", &self.depth),
            ("pi", &self.pi),
            ("mode", &self.mode),
            ("cache_dir", &self.cache_dir),
            ("capacity", &self.capacity),
            ("threads", &self.threads),
        ];
        for (key, v) in flags {
            if let Some(v) = v {
                cfg.set(key, v).map_err(|e| format!("--{}: {e}", key.replace('_', "-")))?;
            }
        }
        Ok(cfg)
    }
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(code: i32, kind: &str, msg: &str) -> Outcome {
        let msg = msg.replace('\n', " ");
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error kind={kind}: {msg}\n"),
        }
    }
}

fn core_error(e: Error) -> Outcome {
    let code = match e {
        Error::Capacity(_) => EXIT_CAPACITY,
        _ => EXIT_USAGE,
    };
    let text = e.to_string();
    let msg = text.split_once(": ").map(|x| x.1).unwrap_or(&text);
    Outcome::error(code, e.kind(), msg)
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: EXIT_OK,
                    stdout: e.render().to_string(),
                    stderr: String::new(),
                };
            }
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            return Outcome::error(EXIT_USAGE, "usage", first);
        }
    };
    let cfg = match cli.resolve() {
        Ok(c) => c,
        Err(e) => return Outcome::error(EXIT_USAGE, "config", &e),
    };
    run_config(cli.command, &cfg)
}

/// Runs a resolved command, inside a pool of `cfg.threads` workers if given.
pub fn run_config(command: Command, cfg: &RunConfig) -> Outcome {
    let go = || match execute(command, cfg) {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => e,
    };
    match cfg.threads {
        Some(0) => Outcome::error(EXIT_USAGE, "config", "`threads` must be at least 1"),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(go),
            Err(e) => Outcome::error(EXIT_USAGE, "config", &e.to_string()),
        },
        None => go(),
    }
}

struct Inputs {
    base: Arc<EdgeIndexedGraph>,
    engine: Engine,
}

impl Inputs {
    fn new(cfg: &RunConfig) -> Result<Inputs, Outcome> {
        let base = match &cfg.base {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Outcome::error(EXIT_USAGE, "io", &format!("{}: {e}", p.display())))?;
                EdgeIndexedGraph::parse(&text).map_err(core_error)?
            }
            None => t3_base(),
        };
        if let Err(d) = base.validate() {
            return Err(Outcome::error(EXIT_USAGE, "domain", &format!("invalid base graph: {d}")));
        }
        let cache = match &cfg.cache_dir {
            Some(dir) => ProfileCache::new(dir),
            None => ProfileCache::from_env(),
        };
        let mut engine = Engine::new().with_cache(cache);
        if let Some(c) = cfg.capacity {
            engine = engine.with_portrait_cap(c);
        }
        Ok(Inputs {
            base: Arc::new(base),
            engine,
        })
    }

    fn spec_text(&self, text: Option<&String>, flag: &str) -> Result<GroupSpec, Outcome> {
        let text = text.ok_or_else(|| Outcome::error(EXIT_USAGE, "usage", &format!("missing --{flag}")))?;
        GroupSpec::parse(text, Some(&self.base)).map_err(core_error)
    }

    fn spec(&self, cfg: &RunConfig) -> Result<GroupSpec, Outcome> {
        self.spec_text(cfg.spec.as_ref(), "spec")
    }
}

fn root_of(base: &EdgeIndexedGraph, cfg: &RunConfig) -> Result<usize, Outcome> {
    let Some(r) = &cfg.root else { return Ok(0) };
    if let Some(q) = base.vertex_by_name(r) {
        return Ok(q);
    }
    match r.parse::<usize>() {
        Ok(q) if q < base.vertex_count() => Ok(q),
        _ => Err(Outcome::error(EXIT_USAGE, "domain", &format!("unknown root type `{r}`"))),
    }
}

fn render(cfg: &RunConfig, report: &Report) -> Result<String, Outcome> {
    match cfg.mode {
        OutputMode::Text => Ok(report.to_text()),
        OutputMode::Json => Ok(format!("{:#}\n", report.to_json())),
        OutputMode::Dot => Err(Outcome::error(
            EXIT_USAGE,
            "usage",
            "dot output is only available for quotient and unimodular",
        )),
    }
}

fn graph_report(g: &EdgeIndexedGraph) -> Report {
    let vertices: Vec<Report> = g
        .vertices()
        .iter()
        .map(|v| Report::new().with("name", v.name.as_str()).with("color", v.color))
        .collect();
    let mut edges = Vec::new();
    for (i, d) in g.darts().iter().enumerate() {
        if d.reverse < i {
            continue;
        }
        let r = &g.darts()[d.reverse];
        edges.push(
            Report::new()
                .with("from", g.vertices()[d.origin].name.as_str())
                .with("to", g.vertices()[d.target].name.as_str())
                .with("index", d.index)
                .with("reverse_index", r.index),
        );
    }
    Report::new().with("vertices", vertices).with("edges", edges)
}

fn graph_output(cfg: &RunConfig, g: &EdgeIndexedGraph, extra: Report) -> Result<String, Outcome> {
    match cfg.mode {
        OutputMode::Dot => Ok(g.export_dot()),
        OutputMode::Text => Ok(format!("{}{}", g.to_text(), extra.to_text())),
        OutputMode::Json => {
            let mut r = graph_report(g);
            for (k, v) in extra.entries() {
                r.push(k.clone(), v.clone());
            }
            render(cfg, &r)
        }
    }
}

fn execute(command: Command, cfg: &RunConfig) -> Result<(i32, String), Outcome> {
    let inputs = Inputs::new(cfg)?;
    let e = &inputs.engine;
    let base = &inputs.base;
    let ok = |s: String| Ok((EXIT_OK, s));
    match command {
        Command::Tree => {
            let root = root_of(base, cfg)?;
            let tree = TreeBall::build(base.clone(), root, cfg.r).map_err(core_error)?;
            let report = Report::new()
                .with("root", base.vertices()[root].name.as_str())
                .with("radius", cfg.r)
                .with("vertices", tree.len())
                .with("sphere_sizes", tree.sphere_sizes());
            ok(render(cfg, &report)?)
        }
        Command::Profile => {
            let spec = inputs.spec(cfg)?;
            let root = root_of(spec.base(), cfg)?;
            let d = cfg.d;
            let p = e.profile(&spec, root, cfg.r, d).map_err(core_error)?;
            let report = Report::new()
                .with("spec", spec.to_string())
                .with("root", spec.base().vertices()[root].name.as_str())
                .with("radius", cfg.r)
                .with("displacement", d)
                .with("size", p.len())
                .with("digest", p.digest());
            ok(render(cfg, &report)?)
        }
        Command::Closure => {
            let spec = inputs.spec(cfg)?;
            let root = root_of(spec.base(), cfg)?;
            let rep = closure_descent_suite(e, &spec, root, cfg.r, cfg.kmax).map_err(core_error)?;
            let code = if rep.chain_holds && rep.contains_spec { EXIT_OK } else { EXIT_VERIFY };
            let report = Report::new()
                .with("spec", spec.to_string())
                .with("radius", cfg.r)
                .with("descent", rep.to_report());
            Ok((code, render(cfg, &report)?))
        }
        Command::Plusk => {
            let spec = inputs.spec(cfg)?;
            let root = root_of(spec.base(), cfg)?;
            let own = e.profile(&spec, root, cfg.r, 0).map_err(core_error)?;
            let p = e.plus_k_profile(&spec, cfg.k, root, cfg.r).map_err(core_error)?;
            let contained = chabauty_core::profile_contains(&own, &p).map_err(core_error)?;
            let report = Report::new()
                .with("spec", spec.to_string())
                .with("k", cfg.k)
                .with("radius", cfg.r)
                .with("own_size", own.len())
                .with("plusk_size", p.len())
                .with("contained", contained)
                .with("digest", p.digest());
            Ok((if contained { EXIT_OK } else { EXIT_VERIFY }, render(cfg, &report)?))
        }
        Command::Quotient => {
            let spec = inputs.spec(cfg)?;
            let q = quotient_graph(e, &spec, cfg.rmax).map_err(core_error)?;
            ok(graph_output(cfg, &q, Report::new())?)
        }
        Command::Unimodular => {
            let g = match &cfg.spec {
                Some(_) => quotient_graph(e, &inputs.spec(cfg)?, cfg.rmax).map_err(core_error)?,
                None => (**base).clone(),
            };
            let uni = g.is_unimodular().map_err(core_error)?;
            ok(graph_output(cfg, &g, Report::new().with("unimodular", uni))?)
        }
        Command::Agreement => {
            let a = inputs.spec(cfg)?;
            let b = inputs.spec_text(cfg.other.as_ref(), "other")?;
            let root = root_of(a.base(), cfg)?;
            let rep = agreement_radius(e, &a, &b, root, cfg.rmax, cfg.d).map_err(core_error)?;
            ok(render(cfg, &rep.to_report())?)
        }
        Command::Primes => {
            let spec = inputs.spec(cfg)?;
            let root = root_of(spec.base(), cfg)?;
            let mut levels = Vec::new();
            for n in 0..=cfg.depth {
                let p = prime_content(e, &spec, root, n).map_err(core_error)?;
                levels.push(Report::new().with("level", n).with("primes", &p));
            }
            let mut report = Report::new().with("spec", spec.to_string()).with("layers", levels);
            let mut code = EXIT_OK;
            if cfg.k > cfg.r {
                let rep = verify_pro_pi_transfer(e, &spec, &cfg.pi, cfg.r, cfg.k, cfg.depth).map_err(core_error)?;
                if rep.violated() {
                    code = EXIT_VERIFY;
                }
                report.push("transfer", rep.to_report());
            }
            Ok((code, render(cfg, &report)?))
        }
        Command::Torsion => {
            let spec = inputs.spec(cfg)?;
            let root = root_of(spec.base(), cfg)?;
            let mut rows = Vec::new();
            for &p in &cfg.pi {
                let out = torsion_claim_check(e, &spec, root, p, cfg.n, cfg.m).map_err(core_error)?;
                rows.push(Report::new().with("p", p).with("outcome", out.to_report()));
            }
            let report = Report::new()
                .with("spec", spec.to_string())
                .with("n", cfg.n)
                .with("m", cfg.m)
                .with("checks", rows);
            ok(render(cfg, &report)?)
        }
        Command::Discrete => {
            let spec = inputs.spec(cfg)?;
            let root = root_of(spec.base(), cfg)?;
            let rep = discreteness_check(e, &spec, root, cfg.rmax).map_err(core_error)?;
            let mut report = Report::new().with("spec", spec.to_string()).with("discreteness", rep.to_report());
            if spec.is_universal() {
                let lt = local_two_transitivity(&spec).map_err(core_error)?;
                report.push("local", lt.to_report());
            }
            ok(render(cfg, &report)?)
        }
        Command::Valency1 => {
            let rep = valency_one_report(e).map_err(core_error)?;
            let code = if rep.passed() { EXIT_OK } else { EXIT_VERIFY };
            Ok((code, render(cfg, &rep.to_report())?))
        }
        Command::Verify => {
            let results = verify::run_all(e);
            let failed = results.iter().filter(|r| !r.passed).count();
            let out = match cfg.mode {
                OutputMode::Text => {
                    let mut s: String = results.iter().map(|r| r.line() + "\n").collect();
                    s.push_str(&format!("{} passed, {} failed\n", results.len() - failed, failed));
                    s
                }
                _ => {
                    let rows: Vec<Report> = results
                        .iter()
                        .map(|r| {
                            Report::new()
                                .with("id", r.id)
                                .with("name", r.name)
                                .with("passed", r.passed)
                                .with("detail", r.detail.as_str())
                        })
                        .collect();
                    render(cfg, &Report::new().with("criteria", rows).with("failed", failed))?
                }
            };
            Ok((if failed == 0 { EXIT_OK } else { EXIT_VERIFY }, out))
        }
    }
}
