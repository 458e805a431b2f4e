//! Batch commands behind the `cokplex` binary. Each `cmd_*` function is
//! usable on its own; [`run`] adds argument parsing, output and exit codes.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::classify::{
    cross_validate, evaluate, fingerprint_matrix, render_table, sweep, CorpusEntry, CvConfig, LabeledCorpus,
    Method, MetricsReport, SweepGrid, SweepRow,
};
use crate::conflict::{build_conflict_graph_with, pairing_count, ConflictOptions, Layout, WeightScheme};
use crate::error::{Error, Result};
use crate::molgraph::{parse_molecule_json, parse_sdf, reduce, ClassLabel, Molecule, ReducedGraph};
use crate::qubo::{
    build_cokplex_pbo, export_qubo, quadratize, BijectionMode, CokplexOptions, PenaltyRule, QuboRecord, StarMode,
};
use crate::similarity::{similarity, CountScheme, SimilarityCache, SimilarityParams, SimilarityResult};
use crate::solve::DEFAULT_SOLVER_CAP;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SKIPPED: i32 = 3;
pub const EXIT_DATA: i32 = 4;

/// Exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::File { source, .. } => exit_code(source),
        Error::SizeCap { .. } | Error::TupleCap { .. } | Error::MonomialCap { .. } => EXIT_SKIPPED,
        Error::InvalidParameter(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Every tunable of a run. Loaded from JSON; missing fields take defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub rh: bool,
    pub rb: bool,
    pub fc: bool,
    pub dn: bool,
    #[serde(with = "crate::threshold_serde")]
    pub d_t: f64,
    pub k: usize,
    pub delta: f64,
    pub mode: BijectionMode,
    pub penalty: PenaltyRule,
    pub star: StarMode,
    pub weights: WeightScheme,
    pub count: CountScheme,
    pub solver_cap: usize,
    pub method: Method,
    pub kappa: usize,
    pub folds: usize,
    pub seed: u64,
    /// Worker threads; `None` uses all cores.
    pub threads: Option<usize>,
    /// JSON-lines similarity cache; `None` keeps scores in memory.
    pub cache: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = SimilarityParams::default();
        let cv = CvConfig::default();
        RunConfig {
            rh: false,
            rb: false,
            fc: false,
            dn: false,
            d_t: p.layout.d_t,
            k: p.k,
            delta: p.delta,
            mode: p.mode,
            penalty: p.rule,
            star: p.star,
            weights: p.weights,
            count: p.count,
            solver_cap: DEFAULT_SOLVER_CAP,
            method: Method::Graph,
            kappa: cv.kappa,
            folds: cv.folds,
            seed: cv.seed,
            threads: None,
            cache: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))
    }

    pub fn layout(&self) -> Layout {
        Layout { rh: self.rh, rb: self.rb, fc: self.fc, dn: self.dn, d_t: self.d_t }
    }

    pub fn params(&self) -> SimilarityParams {
        SimilarityParams {
            layout: self.layout(),
            k: self.k,
            delta: self.delta,
            mode: self.mode,
            rule: self.penalty,
            star: self.star,
            weights: self.weights,
            count: self.count,
            solver_cap: self.solver_cap,
        }
    }

    pub fn cv(&self) -> CvConfig {
        CvConfig { folds: self.folds, kappa: self.kappa, seed: self.seed }
    }

    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        if self.kappa == 0 || self.kappa % 2 == 0 {
            return Err(Error::InvalidParameter(format!("kappa must be an odd positive integer, got {}", self.kappa)));
        }
        if self.folds < 2 {
            return Err(Error::InvalidParameter(format!("folds must be at least 2, got {}", self.folds)));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter("threads must be positive".into()));
        }
        Ok(())
    }

    fn open_cache(&self) -> Result<SimilarityCache> {
        match &self.cache {
            Some(path) => SimilarityCache::open(path),
            None => Ok(SimilarityCache::in_memory()),
        }
    }
}

/// Reads every molecule in a MOL/SDF file, or the single molecule of a
/// `.json` file.
pub fn load_molecules(path: &Path) -> Result<Vec<Molecule>> {
    let read = || -> Result<Vec<Molecule>> {
        let text = fs::read_to_string(path)?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Ok(vec![parse_molecule_json(&text)?])
        } else {
            parse_sdf(&text)
        }
    };
    read().map_err(|e| e.in_file(path))
}

fn load_single(path: &Path) -> Result<Molecule> {
    let mut mols = load_molecules(path)?;
    if mols.len() > 1 {
        log::warn!("{}: {} records, using the first", path.display(), mols.len());
    }
    Ok(mols.swap_remove(0))
}

fn load_graph(path: &Path) -> Result<ReducedGraph> {
    let mol = load_single(path)?;
    reduce(&mol).map_err(|e| e.in_file(path))
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "molecule".into())
}

/// Writes `<stem>.json` and `<stem>.dot` into `out_dir` for every record of
/// `input`; multi-record files get `<stem>-<n>` with `n` counted from 1.
pub fn cmd_reduce(input: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mols = load_molecules(input)?;
    fs::create_dir_all(out_dir)?;
    let stem = file_stem(input);
    let mut written = Vec::new();
    for (i, mol) in mols.iter().enumerate() {
        let graph = reduce(mol).map_err(|e| e.in_file(input))?;
        let name = if mols.len() == 1 { stem.clone() } else { format!("{stem}-{}", i + 1) };
        let json = out_dir.join(format!("{name}.json"));
        fs::write(&json, graph.to_json_pretty() + "\n")?;
        fs::write(out_dir.join(format!("{name}.dot")), graph.to_dot())?;
        written.push(json);
    }
    Ok(written)
}

pub fn cmd_similarity(left: &Path, right: &Path, cfg: &RunConfig) -> Result<SimilarityResult> {
    cfg.validate()?;
    similarity(&load_graph(left)?, &load_graph(right)?, &cfg.params())
}

/// Quadratized co-k-plex polynomial of a molecule pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboExport {
    pub left: String,
    pub right: String,
    pub k: usize,
    pub mode: BijectionMode,
    /// Source variable `i` selects the pairing `pairs[i]`.
    pub pairs: Vec<(usize, usize)>,
    pub vacuous: bool,
    pub qubo: QuboRecord,
    pub source_vars: usize,
    /// Ancilla id → the two variables whose product it stands for.
    pub ancilla_map: Vec<(usize, (usize, usize))>,
    pub penalty_weight: f64,
}

pub fn cmd_qubo(left: &Path, right: &Path, cfg: &RunConfig) -> Result<QuboExport> {
    cfg.validate()?;
    let (g, h) = (load_graph(left)?, load_graph(right)?);
    let size = pairing_count(&g, &h, &cfg.layout());
    if size > cfg.solver_cap {
        return Err(Error::SizeCap { size, cap: cfg.solver_cap });
    }
    let cg = build_conflict_graph_with(&[&g, &h], &ConflictOptions::new(cfg.layout()).weights(cfg.weights))?;
    let opts = CokplexOptions { mode: cfg.mode, rule: cfg.penalty, star: cfg.star, ..CokplexOptions::new(cfg.k) };
    let pbo = build_cokplex_pbo(&cg, &opts)?;
    let quad = quadratize(&pbo.poly);
    Ok(QuboExport {
        left: g.name.clone(),
        right: h.name.clone(),
        k: cfg.k,
        mode: cfg.mode,
        pairs: cg.vertices().iter().map(|v| v.pair()).collect(),
        vacuous: pbo.vacuous,
        qubo: export_qubo(&quad.poly)?,
        source_vars: quad.source_vars,
        ancilla_map: quad.ancilla_map.into_iter().collect(),
        penalty_weight: quad.penalty_weight,
    })
}

/// One corpus manifest line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    /// Molecule file, relative to the manifest's directory.
    pub path: PathBuf,
    pub label: ClassLabel,
    /// Defaults to the file stem.
    pub id: Option<String>,
}

fn parse_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(i + 1, e.to_string())))
        .collect()
}

/// Reads a JSON-lines manifest and loads every listed molecule.
pub fn load_manifest(path: &Path, method: Method) -> Result<LabeledCorpus> {
    let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
    let rows: Vec<ManifestEntry> = parse_jsonl(&text).map_err(|e| e.in_file(path))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let entries = rows
        .into_iter()
        .map(|row| {
            let file = base.join(&row.path);
            let mol = load_single(&file)?;
            let graph = match method {
                Method::Graph => Some(reduce(&mol).map_err(|e| e.in_file(&file))?),
                Method::Fingerprint => None,
            };
            if method == Method::Fingerprint && mol.fingerprint.is_none() {
                return Err(Error::Data(format!("{}: no fingerprint", file.display())));
            }
            Ok(CorpusEntry { id: row.id.unwrap_or_else(|| file_stem(&row.path)), label: row.label, graph, fingerprint: mol.fingerprint })
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledCorpus::new(entries)
}

/// Output of a cross-validation or sweep run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput<T> {
    pub result: T,
    /// Pair scores solved in this run rather than read from the cache.
    pub pairs_computed: usize,
}

pub fn cmd_crossval(manifest: &Path, cfg: &RunConfig) -> Result<RunOutput<MetricsReport>> {
    cfg.validate()?;
    let corpus = load_manifest(manifest, cfg.method)?;
    let mut cache = cfg.open_cache()?;
    let result = match cfg.method {
        Method::Graph => evaluate(&corpus, Method::Graph, &cfg.params(), &cfg.cv(), &mut cache)?,
        Method::Fingerprint => cross_validate(&corpus.ids(), &corpus.labels(), &fingerprint_matrix(&corpus)?, &cfg.cv())?,
    };
    Ok(RunOutput { result, pairs_computed: cache.computed() })
}

pub fn cmd_sweep(manifest: &Path, cfg: &RunConfig, grid: &SweepGrid, reduced_pairs: bool) -> Result<RunOutput<Vec<SweepRow>>> {
    cfg.validate()?;
    if cfg.method != Method::Graph {
        return Err(Error::InvalidParameter("sweeps need the graph method".into()));
    }
    let corpus = load_manifest(manifest, Method::Graph)?;
    let mut cache = cfg.open_cache()?;
    let result = sweep(&corpus, &cfg.params(), grid, &cfg.cv(), reduced_pairs, &mut cache)?;
    Ok(RunOutput { result, pairs_computed: cache.computed() })
}

#[derive(Debug, Parser)]
#[command(name = "cokplex", version, about = "Molecular similarity via maximum weighted co-k-plexes")]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce every molecule of a MOL/SDF/JSON file to JSON and DOT.
    Reduce {
        input: PathBuf,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Similarity of two molecules as JSON on stdout.
    Similarity {
        /// Molecule file (MOL, SDF or JSON; first record is used).
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Export the quadratized co-k-plex QUBO of a molecule pair.
    Qubo {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Stratified k-fold cross-validation of the k-NN classifier.
    Crossval {
        manifest: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        /// Report JSON file; stdout when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate every combination of a parameter grid.
    Sweep {
        manifest: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        /// Layout indices, e.g. 0,7,15 (default: all 16).
        #[arg(long, value_delimiter = ',')]
        layouts: Option<Vec<u8>>,
        /// Distance thresholds (default: 0,0.5,1,1.5,5,10).
        #[arg(long, value_delimiter = ',')]
        dts: Option<Vec<f64>>,
        /// k values (default: 1..5).
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
        /// δ values (default: 0.3,0.4,0.5).
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        /// Drop pairs skipped in any cell from every cell.
        #[arg(long)]
        reduced_pairs: bool,
        /// Rows as JSON; the table always goes to stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

/// Config file plus flag overrides.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Layout index 0..15; sets all four matching flags.
    #[arg(long)]
    pub layout: Option<u8>,
    /// Match ring hydrogen counts.
    #[arg(long)]
    pub rh: bool,
    /// Match ring bond orders.
    #[arg(long)]
    pub rb: bool,
    /// Match formal charges.
    #[arg(long)]
    pub fc: bool,
    /// Match degree signatures.
    #[arg(long)]
    pub dn: bool,
    /// Distance threshold (`inf` disables distance conflicts).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Co-k-plex parameter; 1 is maximum independent set.
    #[arg(long)]
    pub k: Option<usize>,
    /// Weight of the larger coverage ratio in the score, in [0, 1].
    #[arg(long)]
    pub delta: Option<f64>,
    /// allow | forbid
    #[arg(long, value_parser = parse_enum::<BijectionMode>)]
    pub mode: Option<BijectionMode>,
    /// containment | induced
    #[arg(long, value_parser = parse_enum::<StarMode>)]
    pub star: Option<StarMode>,
    /// label | unit
    #[arg(long, value_parser = parse_enum::<WeightScheme>)]
    pub weights: Option<WeightScheme>,
    /// graph | fingerprint
    #[arg(long, value_parser = parse_enum::<Method>)]
    pub method: Option<Method>,
    /// Explicit penalty weight instead of min(w) + 1.
    #[arg(long)]
    pub penalty: Option<f64>,
    /// Largest conflict graph solved; larger pairs are skipped.
    #[arg(long)]
    pub solver_cap: Option<usize>,
    /// Neighbours per k-NN vote (odd).
    #[arg(long)]
    pub kappa: Option<usize>,
    /// Cross-validation folds.
    #[arg(long)]
    pub folds: Option<usize>,
    /// Fold shuffling seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON-lines similarity cache file.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

fn parse_enum<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(index) = self.layout {
            let l = Layout::from_index(index, cfg.d_t)?;
            (cfg.rh, cfg.rb, cfg.fc, cfg.dn) = (l.rh, l.rb, l.fc, l.dn);
        }
        cfg.rh |= self.rh;
        cfg.rb |= self.rb;
        cfg.fc |= self.fc;
        cfg.dn |= self.dn;
        macro_rules! set {
            ($($field:ident <- $flag:ident),*) => { $(if let Some(v) = self.$flag.clone() { cfg.$field = v; })* };
        }
        set!(d_t <- dt, k <- k, delta <- delta, mode <- mode, star <- star, weights <- weights, method <- method,
             solver_cap <- solver_cap, kappa <- kappa, folds <- folds, seed <- seed);
        if let Some(p) = self.penalty {
            cfg.penalty = PenaltyRule::Explicit(p);
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        if self.cache.is_some() {
            cfg.cache = self.cache.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::from(e).in_file(path)),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn init_threads(cfg: &RunConfig) {
    if let Some(n) = cfg.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::warn!("thread pool already initialised; ignoring threads = {n}");
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Reduce { input, out } => {
            for path in cmd_reduce(&input, &out)? {
                println!("{}", path.display());
            }
            Ok(EXIT_OK)
        }
        Command::Similarity { left, right, config } => {
            let result = cmd_similarity(&left, &right, &config.resolve()?)?;
            write_or_print(None, &to_json(&result)?)?;
            Ok(if result.skipped { EXIT_SKIPPED } else { EXIT_OK })
        }
        Command::Qubo { left, right, config, out } => {
            let export = cmd_qubo(&left, &right, &config.resolve()?)?;
            write_or_print(out.as_deref(), &to_json(&export)?)?;
            Ok(EXIT_OK)
        }
        Command::Crossval { manifest, config, out } => {
            let cfg = config.resolve()?;
            init_threads(&cfg);
            let run = cmd_crossval(&manifest, &cfg)?;
            log::info!("pairs computed: {}", run.pairs_computed);
            write_or_print(out.as_deref(), &to_json(&run.result)?)?;
            Ok(EXIT_OK)
        }
        Command::Sweep { manifest, config, layouts, dts, ks, deltas, reduced_pairs, out } => {
            let cfg = config.resolve()?;
            init_threads(&cfg);
            let default = SweepGrid::default();
            let grid = SweepGrid {
                layouts: layouts.unwrap_or(default.layouts),
                d_t: dts.unwrap_or(default.d_t),
                k: ks.unwrap_or(default.k),
                delta: deltas.unwrap_or(default.delta),
            };
            let run = cmd_sweep(&manifest, &cfg, &grid, reduced_pairs)?;
            log::info!("pairs computed: {}", run.pairs_computed);
            if let Some(path) = out.as_deref() {
                write_or_print(Some(path), &to_json(&run.result)?)?;
            }
            print!("{}", render_table(&run.result));
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
