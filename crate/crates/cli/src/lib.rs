//! Command-line front end: configuration, KL table caching, and report
//! rendering for the `gkstab` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gkstab_core::charge::{central_charge_poly, hilbert_min_depth, hilbert_oracle, leading_coefficient};
use gkstab_core::ktheory::{class_of_parabolic_verma, class_of_simple, is_minimal_coset_rep, Block};
use gkstab_core::polyengine::parse_q;
use gkstab_core::rootsys::{LieType, Weight};
use gkstab_core::rvsc::{verify_stratum, AxiomReport, Positivity, VerifyOptions};
use gkstab_core::stab::{parse_scan_script, scan, StabilityReport};
use gkstab_core::weylkl::{KLTable, WeylGroup};
use gkstab_core::{Error, Q};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "gkstab",
    version,
    about = "GK strata, central charges and stability checks for the principal block of category O"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Root datum, Weyl group order, GK strata and Verma expansions of simples.
    Info(CommonArgs),
    /// Central charge polynomial of every simple in the chosen strata.
    Charge(CommonArgs),
    /// Check both axioms, harmonicity and equivariance for the chosen strata.
    Verify(CommonArgs),
    /// Compare Hilbert-series leading coefficients with charge values.
    Oracle(CommonArgs),
    /// Phases of simples at the points listed in a scan script.
    Scan {
        #[command(flatten)]
        common: CommonArgs,
        /// Scan script: `word l1 .. lr u1 .. ur` per line, `#` comments.
        script: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Lie type, e.g. `A2`, or a family letter combined with --rank.
    #[arg(long = "type")]
    pub lie_type: String,
    /// Rank, when --type is a bare family letter.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Stratum (GK dimension) or `all`.
    #[arg(long, default_value = "all")]
    pub d: String,
    /// Charge scale: a positive rational or `auto`.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    pub norm: String,
    /// Number of seeded sample points for positivity checks (at least 1000).
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Number of series coefficients computed by the Hilbert oracle.
    #[arg(long, default_value_t = 200)]
    pub oracle_depth: usize,
    /// Directory holding cached KL tables.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for sampled positivity points and random combinations.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Validated settings shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub lie_type: LieType,
    pub d: Option<usize>,
    pub norm: Option<Q>,
    pub grid: usize,
    pub oracle_depth: usize,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

pub const MIN_GRID: usize = 1000;
pub const NO_DOUBLE_ZERO_COMBOS: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("verification failed: {0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Config(_) | CliError::Input(_) => 2,
        }
    }
}

fn input(e: Error) -> CliError {
    CliError::Input(e.to_string())
}

impl RunConfig {
    pub fn from_args(a: &CommonArgs) -> Result<Self, CliError> {
        let name = a.lie_type.trim();
        let full = if name.len() == 1 {
            match a.rank {
                Some(r) => format!("{name}{r}"),
                None => return Err(CliError::Config(format!("type `{name}` needs --rank"))),
            }
        } else {
            name.to_string()
        };
        let lie_type: LieType = full.parse().map_err(|e: Error| CliError::Config(e.to_string()))?;
        if let Some(r) = a.rank {
            if r != lie_type.rank {
                return Err(CliError::Config(format!("--rank {r} contradicts type {lie_type}")));
            }
        }
        let d = match a.d.trim() {
            "all" => None,
            s => Some(
                s.parse()
                    .map_err(|_| CliError::Config(format!("--d must be an integer or `all`, got `{s}`")))?,
            ),
        };
        let norm = match a.norm.trim() {
            "auto" => None,
            s => {
                let q = parse_q(s).ok_or_else(|| CliError::Config(format!("--norm `{s}` is not a rational")))?;
                if q <= Q::from_integer(0.into()) {
                    return Err(CliError::Config(format!("--norm must be positive, got {q}")));
                }
                Some(q)
            }
        };
        if a.grid < MIN_GRID {
            return Err(CliError::Config(format!("--grid must be at least {MIN_GRID}")));
        }
        if a.oracle_depth < 8 {
            return Err(CliError::Config("--oracle-depth must be at least 8".into()));
        }
        Ok(RunConfig {
            lie_type,
            d,
            norm,
            grid: a.grid,
            oracle_depth: a.oracle_depth,
            cache_dir: a.cache_dir.clone(),
            format: a.format,
            seed: a.seed,
        })
    }

    fn echo(&self) -> Value {
        json!({
            "type": self.lie_type.to_string(),
            "d": self.d.map_or(json!("all"), |d| json!(d)),
            "norm": self.norm.as_ref().map_or("auto".to_string(), Q::to_string),
            "grid": self.grid,
            "oracle_depth": self.oracle_depth,
            "seed": self.seed,
        })
    }
}

/// How the KL table was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheState {
    Disabled,
    Hit,
    Created,
    Rebuilt,
}

impl CacheState {
    fn as_str(self) -> &'static str {
        match self {
            CacheState::Disabled => "disabled",
            CacheState::Hit => "hit",
            CacheState::Created => "created",
            CacheState::Rebuilt => "rebuilt",
        }
    }
}

pub fn cache_path(dir: &Path, t: LieType) -> PathBuf {
    dir.join(format!("kl-{t}.txt"))
}

/// Loads the KL table from the cache directory, recomputing and rewriting
/// it when missing, stale or corrupt.
pub fn load_block(cfg: &RunConfig) -> Result<(Block, CacheState), CliError> {
    let t = cfg.lie_type;
    let Some(dir) = &cfg.cache_dir else {
        return Ok((Block::new(t).map_err(input)?, CacheState::Disabled));
    };
    let rd = gkstab_core::rootsys::RootDatum::new(t).map_err(input)?;
    let group = WeylGroup::new(&rd);
    let path = cache_path(dir, t);
    let mut state = CacheState::Created;
    if let Ok(text) = fs::read_to_string(&path) {
        match KLTable::from_cache_str(&group, &text) {
            Ok(kl) => return Ok((Block::with_kl(t, kl).map_err(input)?, CacheState::Hit)),
            Err(_) => state = CacheState::Rebuilt,
        }
    }
    let kl = KLTable::compute(&group);
    fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cache dir {}: {e}", dir.display())))?;
    fs::write(&path, kl.to_cache_string(&group))
        .map_err(|e| CliError::Config(format!("writing {}: {e}", path.display())))?;
    Ok((Block::with_kl(t, kl).map_err(input)?, state))
}

/// Rendered output of a successful command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub passed: bool,
}

fn strata_to_run(block: &Block, cfg: &RunConfig) -> Result<Vec<usize>, CliError> {
    match cfg.d {
        None => Ok(block.strata().dims()),
        Some(d) if d > block.n_pos() => Err(CliError::Config(format!(
            "stratum {d} exceeds |roots+| = {} for {}",
            block.n_pos(),
            block.lie_type()
        ))),
        Some(d) => Ok(vec![d]),
    }
}

fn document(command: &str, cfg: &RunConfig, block: &Block, cache: CacheState, results: Value) -> Value {
    json!({
        "tool_version": TOOL_VERSION,
        "command": command,
        "config": cfg.echo(),
        "type_data": {
            "type": block.lie_type().to_string(),
            "rank": block.rank(),
            "weyl_order": block.order(),
            "positive_roots": block.n_pos(),
            "kl_cache": cache.as_str(),
        },
        "results": results,
    })
}

fn finish(cfg: &RunConfig, mut doc: Value, table: String, passed: bool) -> Output {
    doc["pass"] = json!(passed);
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n",
        Format::Table => table,
    };
    Output { text, passed }
}

fn names(block: &Block, ws: &[usize]) -> Vec<String> {
    ws.iter().map(|&w| block.name(w)).collect()
}

pub fn cmd_info(cfg: &RunConfig) -> Result<Output, CliError> {
    let (block, cache) = load_block(cfg)?;
    let rd = &block.rd;
    let strata: serde_json::Map<String, Value> = block
        .strata()
        .strata
        .iter()
        .map(|(d, ws)| {
            (
                d.to_string(),
                json!(names(&block, &ws.iter().copied().collect::<Vec<_>>())),
            )
        })
        .collect();
    let simples: Vec<Value> = (0..block.order())
        .map(|w| {
            json!({
                "simple": block.name(w),
                "gk": block.gk_of_simple(w),
                "verma_expansion": class_of_simple(&block, w).render(&block.group),
            })
        })
        .collect();
    let roots: Vec<String> = (0..rd.n_pos).map(|k| rd.root_name(k)).collect();
    let results = json!({
        "cartan": rd.cartan,
        "positive_roots": roots,
        "rho_alpha": rd.rho.alpha.iter().map(Q::to_string).collect::<Vec<_>>(),
        "strata": strata,
        "simples": simples,
    });
    let mut t = String::new();
    writeln!(
        t,
        "type {}  |W| = {}  |roots+| = {}",
        block.lie_type(),
        block.order(),
        block.n_pos()
    )
    .unwrap();
    writeln!(t, "cartan {:?}", rd.cartan).unwrap();
    writeln!(t, "positive roots: {}", roots.join(", ")).unwrap();
    for (d, ws) in &block.strata().strata {
        writeln!(
            t,
            "stratum {d}: {}",
            names(&block, &ws.iter().copied().collect::<Vec<_>>()).join(" ")
        )
        .unwrap();
    }
    for w in 0..block.order() {
        writeln!(
            t,
            "L({}) = {}",
            block.name(w),
            class_of_simple(&block, w).render(&block.group)
        )
        .unwrap();
    }
    Ok(finish(cfg, document("info", cfg, &block, cache, results), t, true))
}

pub fn cmd_charge(cfg: &RunConfig) -> Result<Output, CliError> {
    let (block, cache) = load_block(cfg)?;
    let mut results = Vec::new();
    let mut t = String::new();
    for d in strata_to_run(&block, cfg)? {
        let members = block.strata().stratum(d);
        let mut charges = Vec::new();
        let mut scale = gkstab_core::charge::normalization(&block, d);
        writeln!(t, "stratum {d}{}", if members.is_empty() { " (empty)" } else { "" }).unwrap();
        for &w in &members {
            let mut z = central_charge_poly(&block, &class_of_simple(&block, w), d).map_err(input)?;
            if let Some(s) = &cfg.norm {
                z = z.with_normalization(s);
            }
            scale = z.normalization.clone();
            writeln!(t, "  L({}): {}", block.name(w), z.render()).unwrap();
            charges.push(json!({ "simple": block.name(w), "charge": z.render() }));
        }
        if let Some(s) = &cfg.norm {
            scale = s.clone();
        }
        results.push(json!({
            "d": d,
            "empty": members.is_empty(),
            "normalization": scale.to_string(),
            "charges": charges,
        }));
    }
    Ok(finish(
        cfg,
        document("charge", cfg, &block, cache, json!(results)),
        t,
        true,
    ))
}

fn q_list(v: &[Q]) -> Vec<String> {
    v.iter().map(Q::to_string).collect()
}

fn axiom_report_json(block: &Block, r: &AxiomReport) -> Value {
    let axiom1: Vec<Value> = r
        .axiom1
        .iter()
        .map(|v| {
            let mut entry = json!({
                "simple": block.name(v.simple),
                "charge": v.charge.render(),
                "tier": v.positivity.tier(),
            });
            match &v.positivity {
                Positivity::Sampled { points } => entry["points"] = json!(points),
                Positivity::Fail { witness, value } => {
                    entry["witness_m"] = json!(q_list(witness));
                    entry["value"] = json!(value.to_string());
                }
                Positivity::CoeffCert => {}
            }
            entry
        })
        .collect();
    let axiom2: Vec<Value> = r
        .axiom2
        .iter()
        .map(|t| {
            json!({
                "wall": format!("m{}", t.alpha + 1),
                "order_one": names(block, &t.order_one),
                "order_zero": names(block, &t.order_zero),
                "order_two_or_more": names(block, &t.higher),
                "shift_by_one": t.shift_one,
                "shift_by_zero": t.shift_zero,
                "length_criterion": t.length_criterion,
                "pass": t.pass(),
            })
        })
        .collect();
    let harmonic: Vec<Value> = r
        .harmonic
        .iter()
        .map(|(w, h)| json!({ "simple": block.name(*w), "annihilated": h.annihilated, "mean_value": h.mean_value }))
        .collect();
    let equivariant: Vec<Value> = r
        .equivariant
        .iter()
        .map(|(w, e)| json!({ "simple": block.name(*w), "pass": e }))
        .collect();
    json!({
        "d": r.d,
        "empty": r.axiom1.is_empty(),
        "normalization": r.normalization.to_string(),
        "axiom1": axiom1,
        "axiom1_alcoves": block.order(),
        "axiom2": axiom2,
        "harmonic": harmonic,
        "w_equivariance": equivariant,
        "no_double_zero": r.no_double_zero,
        "max_wall_order": r.max_wall_order,
        "pass": r.pass(),
    })
}

fn axiom_report_table(block: &Block, r: &AxiomReport, t: &mut String) {
    let verdict = if r.pass() { "PASS" } else { "FAIL" };
    writeln!(
        t,
        "stratum {}: {verdict}  (normalization {}, max wall order {})",
        r.d, r.normalization, r.max_wall_order
    )
    .unwrap();
    for v in &r.axiom1 {
        writeln!(
            t,
            "  axiom1 L({}) {}  charge {}",
            block.name(v.simple),
            v.positivity.tier(),
            v.charge.render()
        )
        .unwrap();
        if let Positivity::Fail { witness, value } = &v.positivity {
            writeln!(t, "    witness m = ({}) value {value}", q_list(witness).join(", ")).unwrap();
        }
    }
    for a in &r.axiom2 {
        writeln!(
            t,
            "  axiom2 wall m{}: order1 [{}] order0 [{}] shift1 {} shift0 {} length {}",
            a.alpha + 1,
            names(block, &a.order_one).join(" "),
            names(block, &a.order_zero).join(" "),
            a.shift_one,
            a.shift_zero,
            a.length_criterion
        )
        .unwrap();
    }
    let harmonic = r.harmonic.iter().all(|(_, h)| h.pass());
    let equivariant = r.equivariant.iter().all(|&(_, e)| e);
    writeln!(
        t,
        "  harmonic {harmonic}  equivariant {equivariant}  no double zero {}",
        r.no_double_zero
    )
    .unwrap();
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let (block, cache) = load_block(cfg)?;
    let opts = VerifyOptions {
        grid: cfg.grid,
        seed: cfg.seed,
        combos: NO_DOUBLE_ZERO_COMBOS,
    };
    let mut reports = Vec::new();
    let mut t = String::new();
    let mut passed = true;
    for d in strata_to_run(&block, cfg)? {
        let r = verify_stratum(&block, d, &opts).map_err(input)?;
        passed &= r.pass();
        axiom_report_table(&block, &r, &mut t);
        reports.push(axiom_report_json(&block, &r));
    }
    writeln!(t, "{}", if passed { "PASS" } else { "FAIL" }).unwrap();
    let doc = document("verify", cfg, &block, cache, json!(reports));
    Ok(finish(cfg, doc, t, passed))
}

/// The first `count` dominant integral weights in order of total size.
pub fn oracle_weights(rank: usize, count: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut total = 0i64;
    while out.len() < count {
        let mut level: Vec<Vec<i64>> = vec![vec![]];
        for i in 0..rank {
            level = level
                .into_iter()
                .flat_map(|p| {
                    let used: i64 = p.iter().sum();
                    let range: Vec<i64> = if i + 1 == rank {
                        vec![total - used]
                    } else {
                        (0..=total - used).collect()
                    };
                    range.into_iter().map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        level.sort_by(|a, b| b.cmp(a));
        out.extend(level);
        total += 1;
    }
    out.truncate(count);
    out
}

pub const ORACLE_WEIGHTS: usize = 5;

fn subsets(rank: usize) -> Vec<Vec<usize>> {
    (0..1usize << rank)
        .map(|mask| (0..rank).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

pub fn cmd_oracle(cfg: &RunConfig) -> Result<Output, CliError> {
    let (block, cache) = load_block(cfg)?;
    let mut rows = Vec::new();
    let mut t = String::new();
    let mut passed = true;
    for subset in subsets(block.rank()) {
        let needed = hilbert_min_depth(&block, &subset);
        if cfg.oracle_depth < needed {
            return Err(CliError::Config(format!(
                "--oracle-depth {} is too small for {} parabolic {:?}; need at least {needed}",
                cfg.oracle_depth,
                block.lie_type(),
                subset.iter().map(|i| i + 1).collect::<Vec<_>>()
            )));
        }
        for w in (0..block.order()).filter(|&w| is_minimal_coset_rep(&block.group, &subset, w)) {
            let class = class_of_parabolic_verma(&block, &subset, w).map_err(input)?;
            let gk = gkstab_core::charge::gk_dimension(&block, &class).map_err(input)?;
            if cfg.d.is_some_and(|d| d != gk) {
                continue;
            }
            for omega in oracle_weights(block.rank(), ORACLE_WEIGHTS) {
                let lambda: Weight = block.rd.weight_from_ints(&omega);
                let sample = hilbert_oracle(&block, &subset, w, &lambda, cfg.oracle_depth)
                    .map_err(|e| CliError::Failed(format!("I={subset:?} w={}: {e}", block.name(w))))?;
                let mut charge = leading_coefficient(&block, &class, &lambda).map_err(input)?;
                let mut oracle = sample.lc.clone();
                if let Some(s) = &cfg.norm {
                    let default = gkstab_core::charge::normalization(&block, gk);
                    charge = charge * s / &default;
                    oracle = oracle * s / &default;
                }
                let ok = charge == oracle;
                passed &= ok;
                let subset_names: Vec<String> = subset.iter().map(|i| format!("{}", i + 1)).collect();
                writeln!(
                    t,
                    "I={{{}}} w={} lambda={:?} gk={gk} period={} oracle={oracle} charge={charge} {}",
                    subset_names.join(","),
                    block.name(w),
                    omega,
                    sample.fitted.period,
                    if ok { "match" } else { "MISMATCH" }
                )
                .unwrap();
                rows.push(json!({
                    "parabolic": subset.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "w": block.name(w),
                    "lambda_omega": omega,
                    "gk": gk,
                    "period": sample.fitted.period,
                    "onset": sample.fitted.onset,
                    "oracle_lc": oracle.to_string(),
                    "charge_lc": charge.to_string(),
                    "match": ok,
                }));
            }
        }
    }
    writeln!(t, "{}", if passed { "PASS" } else { "FAIL" }).unwrap();
    let doc = document("oracle", cfg, &block, cache, json!(rows));
    Ok(finish(cfg, doc, t, passed))
}

fn stability_json(block: &Block, r: &StabilityReport) -> Value {
    let entries: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            json!({
                "simple": block.name(e.simple),
                "re": e.value.re.to_string(),
                "im": e.value.im.to_string(),
                "phase": e.phase.class.to_string(),
                "tan": e.phase.tan.as_ref().map(Q::to_string),
                "phase_approx": format!("{:.6}", e.phase.approx),
            })
        })
        .collect();
    json!({
        "word": r.point.word_string(),
        "lambda_omega": q_list(&r.point.lambda.omega),
        "mu_omega": q_list(&r.point.mu.omega),
        "d": r.d,
        "simples": entries,
    })
}

pub fn cmd_scan(cfg: &RunConfig, script: &Path) -> Result<Output, CliError> {
    let text = fs::read_to_string(script).map_err(|e| CliError::Input(format!("{}: {e}", script.display())))?;
    let (block, cache) = load_block(cfg)?;
    let points = parse_scan_script(&block, &text).map_err(input)?;
    let mut reports = Vec::new();
    let mut t = String::new();
    for d in strata_to_run(&block, cfg)? {
        let rs = scan(&block, &points, d, cfg.norm.as_ref()).map_err(|e| match e {
            Error::AssertionFailure(msg) => CliError::Failed(msg),
            other => input(other),
        })?;
        for r in &rs {
            writeln!(
                t,
                "word {} lambda ({}) mu ({}) d={}",
                r.point.word_string(),
                q_list(&r.point.lambda.omega).join(", "),
                q_list(&r.point.mu.omega).join(", "),
                d
            )
            .unwrap();
            for e in &r.entries {
                writeln!(
                    t,
                    "  L({}) {}  phase {} (approx {:.6})",
                    block.name(e.simple),
                    e.value,
                    e.phase.class,
                    e.phase.approx
                )
                .unwrap();
            }
            reports.push(stability_json(&block, r));
        }
    }
    Ok(finish(
        cfg,
        document("scan", cfg, &block, cache, json!(reports)),
        t,
        true,
    ))
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Info(a) => cmd_info(&RunConfig::from_args(a)?),
        Command::Charge(a) => cmd_charge(&RunConfig::from_args(a)?),
        Command::Verify(a) => cmd_verify(&RunConfig::from_args(a)?),
        Command::Oracle(a) => cmd_oracle(&RunConfig::from_args(a)?),
        Command::Scan { common, script } => cmd_scan(&RunConfig::from_args(common)?, script),
    }
}
