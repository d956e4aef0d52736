use std::fmt::Write as _;
use std::io::Write;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use diffseq::chain::longest_mono_diffseq;
use diffseq::formulas::{self, Bounds};
use diffseq::primechain::{find_chain, verify_chain, ChainRecord, ChainSearch, Strategy};
use diffseq::sets::{self, GapSet};
use diffseq::solver::{self, SearchBudget, SolveOptions, SolveRecord, SolveResult, SolveStatus};
use diffseq::witnesses::{named_witness, WITNESS_NAMES};
use diffseq::{table1, Coloring};

/// Writes to stdout, propagating errors (a closed pipe ends the command quietly).
macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)?
    };
}

macro_rules! out {
    ($($arg:tt)*) => {
        write!(std::io::stdout().lock(), $($arg)*)?
    };
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_INCOMPLETE: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;

const CHAIN_ESCALATION_LIMIT: u64 = 100_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "diffseq",
    version,
    about = "Monochromatic S-diffsequence numbers f(S,k;r)"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalFlags,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalFlags {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Worker threads for the solver. DIFFSEQ_WORKERS takes precedence.
    #[arg(long, default_value_t = 1, global = true)]
    pub workers: usize,

    /// Search-node budget per computation.
    #[arg(long, global = true)]
    pub max_nodes: Option<u64>,

    /// Wall-clock budget per computation, in seconds.
    #[arg(long, global = true)]
    pub max_seconds: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute f(S,k;r) exactly.
    Compute {
        #[arg(long)]
        set: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 1000)]
        nmax: u64,
        /// Only decide feasibility at this n.
        #[arg(long)]
        at: Option<u64>,
    },
    /// Recompute the reference table and diff against the published values.
    Table1 {
        /// Restrict to these row labels (e.g. T,F,P+1).
        #[arg(long, value_delimiter = ',')]
        rows: Vec<String>,
        /// Minutes allowed for the hardest cell, f(T,8;2).
        #[arg(long, default_value_t = 25)]
        hard_cell_minutes: u64,
    },
    /// Check a coloring for monochromatic k-term S-diffsequences.
    Verify {
        /// Coloring string (0-9, a-z).
        #[arg(long, conflicts_with = "file")]
        coloring: Option<String>,
        /// File holding a coloring string or a JSON result from `compute`.
        #[arg(long)]
        file: Option<std::path::PathBuf>,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
    },
    /// Generate a named coloring and check its claim.
    Witness {
        name: String,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        i: Option<u64>,
        /// Prefix length for colorings of all of N.
        #[arg(long)]
        n: Option<u64>,
        /// Raw positional parameters, overriding the named flags.
        #[arg(long, value_delimiter = ',')]
        params: Vec<u64>,
    },
    /// Search for primes p_1 < ... < p_k with every gap in P + t.
    Chain {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        #[arg(long, default_value = "dfs")]
        strategy: String,
        /// Multiply the bound by 10 (up to 1e8) until a chain is found.
        #[arg(long)]
        escalate: bool,
    },
    /// Registered bounds for (S, k, r), or the full registry.
    Bounds {
        #[arg(long, required_unless_present = "registry")]
        set: Option<String>,
        #[arg(long, required_unless_present = "registry")]
        k: Option<u64>,
        #[arg(long, default_value_t = 2)]
        r: u64,
        #[arg(long)]
        registry: bool,
    },
    /// List the set catalog, or enumerate one set.
    Sets {
        #[arg(long)]
        enumerate: Option<String>,
        #[arg(long, default_value_t = 100)]
        upto: u64,
    },
}

pub fn workers(flag: usize) -> Result<usize> {
    let w = match std::env::var("DIFFSEQ_WORKERS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .context("DIFFSEQ_WORKERS must be an integer")?,
        _ => flag,
    };
    if w == 0 {
        bail!("worker count must be at least 1");
    }
    Ok(w)
}

impl GlobalFlags {
    fn options(&self) -> Result<SolveOptions> {
        Ok(SolveOptions {
            budget: SearchBudget {
                max_nodes: self.max_nodes,
                max_time: self.max_seconds.map(Duration::from_secs),
            },
            workers: workers(self.workers)?,
            ..Default::default()
        })
    }
}

pub fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    match cli.command {
        Command::Compute {
            ref set,
            k,
            r,
            nmax,
            at,
        } => cmd_compute(g, set, k, r, nmax, at),
        Command::Table1 {
            ref rows,
            hard_cell_minutes,
        } => cmd_table1(g, rows, hard_cell_minutes),
        Command::Verify {
            ref coloring,
            ref file,
            ref set,
            k,
            r,
        } => cmd_verify(
            g,
            coloring.as_deref(),
            file.as_deref(),
            set.as_deref(),
            k,
            r,
        ),
        Command::Witness {
            ref name,
            k,
            m,
            i,
            n,
            ref params,
        } => cmd_witness(g, name, k, m, i, n, params),
        Command::Chain {
            t,
            k,
            bound,
            ref strategy,
            escalate,
        } => cmd_chain(g, t, k, bound, strategy, escalate),
        Command::Bounds {
            ref set,
            k,
            r,
            registry,
        } => cmd_bounds(g, set.as_deref(), k, r, registry),
        Command::Sets {
            ref enumerate,
            upto,
        } => cmd_sets(g, enumerate.as_deref(), upto),
    }
}

fn parse_set(spec: &str) -> Result<GapSet> {
    GapSet::parse(spec).with_context(|| format!("bad set spec {spec:?}"))
}

fn render_result(format: Format, res: &SolveResult) -> String {
    match format {
        Format::Json => res.to_json(),
        Format::Csv => {
            let rec = res.to_record();
            format!(
                "spec,k,r,status,value,certificate,nodes,elapsed_ms\n\"{}\",{},{},{},{},{},{},{}",
                rec.spec,
                rec.k,
                rec.r,
                rec.status,
                rec.value.map_or(String::new(), |v| v.to_string()),
                rec.certificate.unwrap_or_default(),
                rec.nodes,
                rec.elapsed_ms
            )
        }
        Format::Text => {
            let mut s = format!("f({}, {}; {}): {}", res.spec, res.k, res.r, res.status);
            if let Some(v) = res.value {
                let _ = write!(s, " value {v}");
            }
            if let Some(c) = &res.certificate {
                let _ = write!(s, "\ncertificate [1,{}]: {c}", c.n());
            }
            let _ = write!(s, "\nnodes {} elapsed {:.3?}", res.nodes, res.elapsed);
            s
        }
    }
}

fn cmd_compute(
    g: &GlobalFlags,
    spec: &str,
    k: usize,
    r: usize,
    nmax: u64,
    at: Option<u64>,
) -> Result<u8> {
    let set = parse_set(spec)?;
    let opts = g.options()?;
    let res = match at {
        Some(n) => solver::check_at(&set, k, r, n, &opts)?,
        None => solver::compute_f_with(&set, k, r, nmax, &opts)?,
    };
    outln!("{}", render_result(g.format, &res));
    Ok(match res.status {
        SolveStatus::Exact | SolveStatus::FeasibleAt(_) => EXIT_OK,
        _ => EXIT_INCOMPLETE,
    })
}

/// Per-cell default budget.
pub const CELL_NODES: u64 = 1_000_000_000;
pub const CELL_MINUTES: u64 = 10;

fn cmd_table1(g: &GlobalFlags, rows: &[String], hard_minutes: u64) -> Result<u8> {
    let base = g.options()?;
    if let Some(bad) = rows
        .iter()
        .find(|r| !table1::ROWS.iter().any(|row| row.label == r.as_str()))
    {
        bail!("unknown table row {bad:?}");
    }
    outln!("row,spec,k,expected,value,status,nodes,elapsed_ms,citation");
    let mut mismatches = Vec::new();
    let mut incomplete = false;
    for cell in table1::cells() {
        if !rows.is_empty() && !rows.iter().any(|r| r == cell.label) {
            continue;
        }
        let Some(expected) = cell.expected else {
            outln!(
                "{},{},{},?,,skipped,0,0,\"{}\"",
                cell.label,
                cell.spec,
                cell.k,
                cell.citation()
            );
            continue;
        };
        let minutes = if cell.label == "T" && cell.k == 8 {
            hard_minutes
        } else {
            CELL_MINUTES
        };
        let opts = SolveOptions {
            budget: SearchBudget {
                max_nodes: Some(base.budget.max_nodes.unwrap_or(CELL_NODES)),
                max_time: Some(
                    base.budget
                        .max_time
                        .unwrap_or(Duration::from_secs(60 * minutes)),
                ),
            },
            ..base
        };
        let res = solver::compute_f_with(&cell.set(), cell.k, 2, 4 * expected + 10, &opts)?;
        let status = match (res.status, res.value) {
            (SolveStatus::Exact, Some(v)) if v == expected => "match",
            (SolveStatus::Exact, _) => {
                mismatches.push(format!("{} (got {:?})", cell.citation(), res.value));
                "mismatch"
            }
            _ => {
                incomplete = true;
                "incomplete"
            }
        };
        outln!(
            "{},{},{},{},{},{},{},{},\"{}\"",
            cell.label,
            cell.spec,
            cell.k,
            expected,
            res.value.map_or(String::new(), |v| v.to_string()),
            status,
            res.nodes,
            res.elapsed.as_millis(),
            cell.citation()
        );
    }
    if !mismatches.is_empty() {
        for m in &mismatches {
            eprintln!("mismatch: {m}");
        }
        return Ok(EXIT_MISMATCH);
    }
    Ok(if incomplete { EXIT_INCOMPLETE } else { EXIT_OK })
}

fn cmd_verify(
    g: &GlobalFlags,
    coloring: Option<&str>,
    file: Option<&std::path::Path>,
    set: Option<&str>,
    k: Option<usize>,
    r: Option<usize>,
) -> Result<u8> {
    let (text, mut spec, mut k, mut r) =
        (coloring.map(str::to_string), set.map(str::to_string), k, r);
    let text = match (text, file) {
        (Some(t), _) => t,
        (None, Some(path)) => {
            let raw = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            match serde_json::from_str::<SolveRecord>(&raw) {
                Ok(rec) => {
                    spec = spec.or(Some(rec.spec));
                    k = k.or(Some(rec.k));
                    r = r.or(Some(rec.r));
                    rec.certificate.context("result carries no certificate")?
                }
                Err(_) => raw.trim().to_string(),
            }
        }
        (None, None) => bail!("pass --coloring or --file"),
    };
    let spec = spec.context("--set is required")?;
    let k = k.context("--k is required")?;
    let set = parse_set(&spec)?;
    let c = match r {
        Some(r) => Coloring::parse(&text, r)?,
        None => Coloring::parse_infer(&text)?,
    };
    let (len, witness) = longest_mono_diffseq(&c, &set);
    let pass = len < k;
    match g.format {
        Format::Json => outln!(
            "{}",
            serde_json::json!({
                "spec": set.to_string(),
                "k": k,
                "n": c.n(),
                "longest": len,
                "witness": witness.positions,
                "witness_color": witness.color,
                "pass": pass,
            })
        ),
        _ => {
            outln!(
                "longest monochromatic {} diffsequence in [1,{}]: {len}",
                set,
                c.n()
            );
            outln!("witness (color {}): {:?}", witness.color, witness.positions);
            outln!(
                "{}",
                if pass {
                    format!("pass: no {k}-term chain")
                } else {
                    format!("fail: {k}-term chain present")
                }
            );
        }
    }
    Ok(if pass { EXIT_OK } else { EXIT_INCOMPLETE })
}

fn witness_params(
    name: &str,
    k: Option<u64>,
    m: Option<u64>,
    i: Option<u64>,
    n: Option<u64>,
) -> Result<Vec<u64>> {
    let need = |v: Option<u64>, flag: &str| v.with_context(|| format!("{name} needs --{flag}"));
    Ok(match name {
        "chi_k" | "C_k" | "D_k" | "thm34" | "prop36" => vec![need(k, "k")?],
        "thm35" => vec![need(m, "m")?, need(k, "k")?],
        "mod_block" => vec![need(m, "m")?, n.unwrap_or(1000)],
        "lemma25" => vec![need(m, "m")?, i.unwrap_or(1), n.unwrap_or(100)],
        "p_not_3acc" => vec![n.unwrap_or(2000)],
        "remark1" => vec![n.unwrap_or(100)],
        other => {
            let known: Vec<&str> = WITNESS_NAMES.iter().map(|(n, _)| *n).collect();
            bail!("unknown witness {other:?}; known: {}", known.join(", "))
        }
    })
}

fn cmd_witness(
    g: &GlobalFlags,
    name: &str,
    k: Option<u64>,
    m: Option<u64>,
    i: Option<u64>,
    n: Option<u64>,
    params: &[u64],
) -> Result<u8> {
    let params = if params.is_empty() {
        witness_params(name, k, m, i, n)?
    } else {
        params.to_vec()
    };
    let w = named_witness(name, &params)?;
    let check = w.check();
    match g.format {
        Format::Json => outln!(
            "{}",
            serde_json::json!({
                "header": w.header(),
                "coloring": w.coloring.to_text(),
                "n": w.coloring.n(),
                "longest": check.longest,
                "pass": check.holds,
            })
        ),
        _ => {
            out!("{}", w.dump());
            outln!(
                "length {}; longest {:?}; claim {}",
                w.coloring.n(),
                check.longest,
                if check.holds { "pass" } else { "FAIL" }
            );
        }
    }
    Ok(if check.holds {
        EXIT_OK
    } else {
        EXIT_INCOMPLETE
    })
}

fn cmd_chain(
    g: &GlobalFlags,
    t: u64,
    k: usize,
    bound: u64,
    strategy: &str,
    escalate: bool,
) -> Result<u8> {
    let strategy: Strategy = strategy.parse()?;
    let started = Instant::now();
    let mut bound = bound;
    loop {
        match find_chain(t, k, bound, strategy)? {
            ChainSearch::Found(chain) => {
                let ok = verify_chain(&chain);
                let rec = ChainRecord::new(&chain, bound, strategy);
                match g.format {
                    Format::Json => outln!("{}", serde_json::to_string_pretty(&rec)?),
                    _ => {
                        outln!(
                            "chain (t={t}, k={k}, bound={bound}, {strategy}): {:?}",
                            chain.elements
                        );
                        outln!(
                            "gaps {:?} = primes {:?} + {t}",
                            chain.gaps,
                            chain.gap_witnesses
                        );
                        outln!("verified: {ok}; {:.3?}", started.elapsed());
                    }
                }
                return Ok(if ok { EXIT_OK } else { EXIT_MISMATCH });
            }
            ChainSearch::NotFoundUpTo(b) => {
                if escalate && b < CHAIN_ESCALATION_LIMIT {
                    bound = (b * 10).min(CHAIN_ESCALATION_LIMIT);
                    continue;
                }
                match g.format {
                    Format::Json => outln!(
                        "{}",
                        serde_json::json!({"t": t, "k": k, "status": format!("NotFoundUpTo({b})"), "bound": b})
                    ),
                    _ => outln!("no chain with elements <= {b}"),
                }
                return Ok(EXIT_INCOMPLETE);
            }
        }
    }
}

fn render_bounds(b: &Bounds) -> String {
    let show = |v: &Option<formulas::BoundValue>| {
        v.as_ref()
            .map_or("-".to_string(), |b| format!("{} [{}]", b.value, b.id))
    };
    let mut s = format!(
        "lower {}\nupper {}\nconjecture {}",
        show(&b.lower),
        show(&b.upper),
        show(&b.conjecture)
    );
    if let Some(e) = b.exact {
        let _ = write!(s, "\nexact {e}");
    }
    for c in &b.conflicts {
        let _ = write!(s, "\nCONFLICT {c}");
    }
    s
}

fn cmd_bounds(
    g: &GlobalFlags,
    set: Option<&str>,
    k: Option<u64>,
    r: u64,
    registry: bool,
) -> Result<u8> {
    if registry {
        out!("{}", formulas::registry_csv());
        return Ok(EXIT_OK);
    }
    let set = parse_set(set.context("--set is required")?)?;
    let k = k.context("--k is required")?;
    let b = formulas::bound(&set, k, r);
    match g.format {
        Format::Json => outln!("{}", serde_json::to_string_pretty(&b)?),
        _ => outln!("{}", render_bounds(&b)),
    }
    Ok(EXIT_OK)
}

fn cmd_sets(g: &GlobalFlags, enumerate: Option<&str>, upto: u64) -> Result<u8> {
    if let Some(spec) = enumerate {
        let set = parse_set(spec)?;
        let items = set.enumerate(upto);
        match g.format {
            Format::Json => outln!(
                "{}",
                serde_json::json!({"spec": set.to_string(), "upto": upto, "elements": items})
            ),
            _ => outln!(
                "{}: {}",
                set,
                items
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
        return Ok(EXIT_OK);
    }
    for (syntax, meaning) in sets::catalog() {
        outln!("{syntax:<22} {meaning}");
    }
    Ok(EXIT_OK)
}
